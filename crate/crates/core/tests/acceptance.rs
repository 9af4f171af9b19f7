//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.
//!
//! Pinned settings:
//! - identity sweeps: 100 seeds per algebra for the Jacobi families, 50 for the appendices
//! - closure: three coefficient seeds per case, degree-2 polynomials with
//!   coefficients in [-1/4, 1/4], tol 1e-12, nodes 17/33/65 on [0,1]^2,
//!   order >= stencil - 0.5 for both stencils, residual < 1e-6 at h = 1/64 for stencil 4
//! - calibration: the three default seeds, exact and field oracles

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rank2_toda::algebra::{fundamental_pair, verify_defining_relations};
use rank2_toda::dynamics::coefficients::CoefficientSet;
use rank2_toda::dynamics::fields::{Grid, SolveOptions};
use rank2_toda::grading::GradingCase;
use rank2_toda::suite::{run_suite, Families, IdentityRow};
use rank2_toda::verify::calibration::{calibrate_ambiguous, DEFAULT_SEEDS};
use rank2_toda::verify::residual::{halving_ladder, verify_ladder, ResidualReport, DEFAULT_THRESHOLD};

const JACOBI_SEEDS: u64 = 100;
const APPENDIX_SEEDS: u64 = 50;
const CLOSURE_SEEDS: [u64; 3] = [1, 2, 3];
const AMPLITUDE: f64 = 0.25;
const TOL: f64 = 1e-12;
const COARSE_NODES: usize = 17;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        ok,
        detail: detail.into(),
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn criterion1() -> Verdict {
    let t = Instant::now();
    let want = [(1u8, [3usize, 3]), (2, [4, 5]), (3, [7, 14])];
    let mut ok = true;
    let mut dims = Vec::new();
    for (p, d) in want {
        match fundamental_pair(p) {
            Ok(reps) => {
                let got = [reps[0].dim, reps[1].dim];
                let exact = reps.iter().all(|r| verify_defining_relations(r).all_zero());
                ok &= got == d && exact;
                dims.push(format!("p={p}: {got:?}{}", if exact { "" } else { " relations FAIL" }));
            }
            Err(e) => {
                ok = false;
                dims.push(format!("p={p}: {e}"));
            }
        }
    }
    let el = t.elapsed();
    ok &= el < Duration::from_secs(5);
    verdict(ok, format!("{}; relations exact; {}", dims.join(", "), secs(el)))
}

/// Identity rows per algebra for the Jacobi families and for the appendices.
struct Sweeps {
    jacobi: Vec<(u8, Vec<IdentityRow>, Duration)>,
    appendix: Vec<(u8, Vec<IdentityRow>)>,
    error: Option<String>,
}

fn sweeps() -> Sweeps {
    let mut s = Sweeps {
        jacobi: Vec::new(),
        appendix: Vec::new(),
        error: None,
    };
    for p in 1..=3u8 {
        let t = Instant::now();
        let jac = Families {
            jacobi: true,
            appendix1: false,
            appendix2: false,
        };
        match run_suite(p, 0..JACOBI_SEEDS, jac) {
            Ok((rows, _)) => s.jacobi.push((p, rows, t.elapsed())),
            Err(e) => s.error = Some(format!("p={p}: {e}")),
        }
        let app = Families {
            jacobi: false,
            appendix1: true,
            appendix2: true,
        };
        match run_suite(p, 1000..1000 + APPENDIX_SEEDS, app) {
            Ok((rows, _)) => s.appendix.push((p, rows)),
            Err(e) => s.error = Some(format!("p={p}: {e}")),
        }
    }
    s
}

/// All rows of `family` zero, and the number of distinct seeds they cover.
fn family(rows: &[IdentityRow], family: &str, check: Option<&str>) -> (bool, usize, usize) {
    let sel: Vec<&IdentityRow> = rows
        .iter()
        .filter(|r| r.family == family && check.is_none_or(|c| r.check == c))
        .collect();
    let mut seeds: Vec<u64> = sel.iter().map(|r| r.seed).collect();
    seeds.dedup();
    (sel.iter().all(|r| r.zero), sel.len(), seeds.len())
}

fn criterion2(s: &Sweeps) -> Verdict {
    if let Some(e) = &s.error {
        return verdict(false, e.clone());
    }
    let mut ok = true;
    let mut parts = Vec::new();
    let mut total = Duration::ZERO;
    for (p, rows, el) in &s.jacobi {
        total += *el;
        for j in [1, 2] {
            let (zero, _, seeds) = family(rows, "first_jacobi", Some(&format!("j={j}")));
            ok &= zero && seeds as u64 >= JACOBI_SEEDS;
            parts.push(format!(
                "p={p} j={j}: {seeds} seeds{}",
                if zero { "" } else { " NONZERO" }
            ));
        }
    }
    ok &= total < Duration::from_secs(60);
    verdict(ok, format!("{}; exact zero; sweep {}", parts.join(", "), secs(total)))
}

fn criterion3(s: &Sweeps) -> Verdict {
    if let Some(e) = &s.error {
        return verdict(false, e.clone());
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, rows, _) in &s.jacobi {
        let (z2, n2, seeds) = family(rows, "second_jacobi", None);
        let (zg, ng, _) = family(rows, "generalized_jacobi", None);
        ok &= z2 && zg && seeds as u64 >= JACOBI_SEEDS && ng > 0;
        parts.push(format!(
            "p={p}: {n2} second + {ng} Det3 checks{}",
            if z2 && zg { "" } else { " NONZERO" }
        ));
    }
    verdict(ok, format!("{}; exact zero", parts.join(", ")))
}

fn criterion4(s: &Sweeps) -> Verdict {
    if let Some(e) = &s.error {
        return verdict(false, e.clone());
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, rows) in &s.appendix {
        let (z, n, seeds) = family(rows, "appendix1", None);
        ok &= z && seeds as u64 >= APPENDIX_SEEDS;
        parts.push(format!(
            "p={p}: {n} checks over {seeds} seeds{}",
            if z { "" } else { " NONZERO" }
        ));
    }
    verdict(ok, parts.join(", "))
}

fn criterion5(s: &Sweeps) -> Verdict {
    if let Some(e) = &s.error {
        return verdict(false, e.clone());
    }
    let Some((_, rows)) = s.appendix.iter().find(|(p, _)| *p == 3) else {
        return verdict(false, "no G2 sweep");
    };
    let (z, n, seeds) = family(rows, "appendix2", None);
    let kinds: std::collections::BTreeSet<&str> = rows
        .iter()
        .filter(|r| r.family == "appendix2")
        .map(|r| r.check.as_str())
        .collect();
    let ok = z && seeds as u64 >= APPENDIX_SEEDS && kinds.len() >= 9;
    verdict(
        ok,
        format!(
            "{n} checks ({} kinds) over {seeds} G2 seeds; exact zero: {z}",
            kinds.len()
        ),
    )
}

fn coefficients(case: GradingCase, seed: u64, reduce: &[&str]) -> CoefficientSet {
    let mut c = CoefficientSet::random_scaled(case, seed, 2, AMPLITUDE);
    if case == GradingCase::G2_10 {
        c = c.zero_pair("c^3_2");
    }
    for s in reduce {
        c = c.zero_pair(s);
    }
    c
}

fn ladder(case: GradingCase, seed: u64, stencil: u8, reduce: &[&str]) -> Result<ResidualReport, String> {
    let options = SolveOptions {
        tol: TOL,
        ..SolveOptions::default()
    };
    verify_ladder(
        case,
        &coefficients(case, seed, reduce),
        &halving_ladder(Grid::unit(COARSE_NODES), 3),
        &options,
        stencil,
        DEFAULT_THRESHOLD,
    )
    .map_err(|e| format!("{case} seed {seed}: {e}"))
}

/// Stencil 4 must close; stencil 2 must converge at order >= 1.5.
fn closure(case: GradingCase, reduce: &[&str]) -> (bool, String) {
    let t = Instant::now();
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut min4 = f64::INFINITY;
    let mut min2 = f64::INFINITY;
    let mut notes = Vec::new();
    for seed in CLOSURE_SEEDS {
        match (ladder(case, seed, 4, reduce), ladder(case, seed, 2, reduce)) {
            (Ok(r4), Ok(r2)) => {
                let c2 = r2.certified().all(|e| e.converges);
                if !r4.closes() || !c2 {
                    ok = false;
                    for e in r4.certified().filter(|e| !(e.converges && e.below_threshold)) {
                        notes.push(format!(
                            "seed {seed} {}: {:?} {:?}",
                            e.name,
                            e.residuals.last(),
                            e.order
                        ));
                    }
                    for e in r2.certified().filter(|e| !e.converges) {
                        notes.push(format!("seed {seed} stencil 2 {}: {:?}", e.name, e.order));
                    }
                }
                worst = worst.max(r4.max_certified_residual());
                min4 = min4.min(r4.min_certified_order().unwrap_or(f64::INFINITY));
                min2 = min2.min(r2.min_certified_order().unwrap_or(f64::INFINITY));
            }
            (Err(e), _) | (_, Err(e)) => {
                ok = false;
                notes.push(e);
            }
        }
    }
    let el = t.elapsed();
    ok &= el < Duration::from_secs(600);
    let ord = |o: f64| {
        if o.is_finite() {
            format!("{o:.2}")
        } else {
            "saturated".into()
        }
    };
    let mut s = format!(
        "{case}: max residual {worst:.1e}, min order {} (stencil 4) / {} (stencil 2), {}",
        ord(min4),
        ord(min2),
        secs(el)
    );
    if !notes.is_empty() {
        s.push_str(&format!(" [{}]", notes.join("; ")));
    }
    (ok, s)
}

fn criterion6() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for case in GradingCase::ALL {
        let (c, s) = closure(case, &[]);
        ok &= c;
        parts.push(s);
    }
    verdict(ok, parts.join("\n         "))
}

fn criterion7() -> Verdict {
    let (a, sa) = closure(GradingCase::B2_10, &["c^2"]);
    let (b, sb) = closure(GradingCase::G2_10, &["c^3_1", "c^3_2"]);
    verdict(a && b, format!("c^2 = 0: {sa}\n         c^3 = 0: {sb}"))
}

fn criterion8() -> Verdict {
    match calibrate_ambiguous(&DEFAULT_SEEDS) {
        Ok(r) => {
            let parts: Vec<String> = r
                .findings
                .iter()
                .map(|f| format!("{} -> {:?} (stable {})", f.question, f.closing, f.stable))
                .collect();
            verdict(r.confirmed() && r.seeds.len() >= 3, parts.join("; "))
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn main() -> ExitCode {
    let s = sweeps();
    let results = [
        ("representation construction", criterion1()),
        ("first Jacobi identity", criterion2(&s)),
        ("second Jacobi and Det3 constants", criterion3(&s)),
        ("appendix I relations", criterion4(&s)),
        ("appendix II relations", criterion5(&s)),
        ("closure of the five systems", criterion6()),
        ("reductions", criterion7()),
        ("calibration findings", criterion8()),
    ];
    let mut failed = 0;
    for (i, (name, v)) in results.iter().enumerate() {
        println!(
            "{} criterion {}: {name}: {}",
            if v.ok { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
        failed += usize::from(!v.ok);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
