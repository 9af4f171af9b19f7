use rank2_toda_demo::{heatmap, ladder, summary, MAX_NODES};

#[test]
fn summary_lists_both_representations() {
    let s = summary(3).unwrap();
    assert_eq!(s["algebra"], "G2");
    assert_eq!(s["reps"][0]["dim"], 7);
    assert_eq!(s["reps"][1]["dim"], 14);
    assert_eq!(s["reps"][1]["relations_exact"], true);
    assert!(summary(0).is_err());
}

#[test]
fn heatmap_shape_and_origin() {
    let h = heatmap("B2(0,1)", 3, 9, 0.25, "det").unwrap();
    let v = h["values"].as_array().unwrap();
    assert_eq!(v.len(), 81);
    // K = I at the origin
    assert!((v[0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(heatmap("B2(0,1)", 3, MAX_NODES + 1, 0.25, "det").is_err());
    assert!(heatmap("B2(0,1)", 3, 9, 0.25, "trace").is_err());
    assert!(heatmap("C3", 3, 9, 0.25, "det").is_err());
}

#[test]
fn ladder_closes_for_a2() {
    let r = ladder("A2(1,0)", 1, 4, 0.25).unwrap();
    assert_eq!(r["closes"], true);
    assert_eq!(r["spacings"].as_array().unwrap().len(), 3);
}
