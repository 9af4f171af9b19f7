//! Browser bindings: representation summary, a field heatmap and a residual
//! ladder. Each returns a JSON string; `www/index.html` draws them.

use rank2_toda::algebra::{fundamental_pair, verify_defining_relations};
use rank2_toda::dynamics::coefficients::CoefficientSet;
use rank2_toda::dynamics::fields::{solve, Grid, SolveOptions};
use rank2_toda::grading::GradingCase;
use rank2_toda::verify::residual::{halving_ladder, verify_ladder, OrderEstimate, DEFAULT_THRESHOLD};
use rank2_toda::{Error, Result};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest grid the page may request; keeps a frame under a second.
pub const MAX_NODES: usize = 129;

fn coefficients(case: GradingCase, seed: u32, amplitude: f64) -> CoefficientSet {
    let c = CoefficientSet::random_scaled(case, seed as u64, 2, amplitude);
    if case == GradingCase::G2_10 {
        c.zero_pair("c^3_2")
    } else {
        c
    }
}

pub fn summary(p: u8) -> Result<Value> {
    let pair = fundamental_pair(p)?;
    let reps: Vec<Value> = pair
        .iter()
        .map(|r| {
            json!({
                "label": r.label,
                "dim": r.dim,
                "weights": r.basis.iter().map(|b| b.weight).collect::<Vec<_>>(),
                "basis": r.basis.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                "relations_exact": verify_defining_relations(r).all_zero(),
            })
        })
        .collect();
    Ok(json!({ "algebra": pair[0].algebra.name(), "reps": reps }))
}

pub fn heatmap(case: &str, seed: u32, nodes: usize, amplitude: f64, quantity: &str) -> Result<Value> {
    let case: GradingCase = case.parse()?;
    if !(5..=MAX_NODES).contains(&nodes) {
        return Err(Error::InvalidParameter(format!("nodes must be in 5..={MAX_NODES}")));
    }
    let pick: fn(&rank2_toda::dynamics::fields::NodeFields) -> f64 = match quantity {
        "u11" => |n| n.u[0][0],
        "u12" => |n| n.u[0][1],
        "u21" => |n| n.u[1][0],
        "u22" => |n| n.u[1][1],
        "det" => |n| n.det,
        _ => return Err(Error::InvalidParameter(format!("unknown quantity `{quantity}`"))),
    };
    let field = solve(
        case,
        &coefficients(case, seed, amplitude),
        Grid::unit(nodes),
        &SolveOptions::default(),
    )?;
    let values: Vec<f64> = field.nodes.iter().map(pick).collect();
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    Ok(json!({
        "case": case.to_string(),
        "nx": nodes,
        "ny": nodes,
        "values": values,
        "min": lo,
        "max": hi,
        "singular": field.nodes.iter().map(|n| n.singular).collect::<Vec<_>>(),
    }))
}

pub fn ladder(case: &str, seed: u32, stencil: u8, amplitude: f64) -> Result<Value> {
    let case: GradingCase = case.parse()?;
    let grids = halving_ladder(Grid::unit(17), 3);
    let r = verify_ladder(
        case,
        &coefficients(case, seed, amplitude),
        &grids,
        &SolveOptions::default(),
        stencil,
        DEFAULT_THRESHOLD,
    )?;
    let eqs: Vec<Value> = r
        .equations
        .iter()
        .map(|e| {
            json!({
                "name": e.name,
                "role": e.role,
                "residuals": e.residuals,
                "order": match e.order {
                    OrderEstimate::Order(o) => json!(o),
                    OrderEstimate::Saturated => json!("saturated"),
                    OrderEstimate::Unavailable => json!(null),
                },
            })
        })
        .collect();
    Ok(json!({
        "case": case.to_string(),
        "spacings": r.spacings,
        "closes": r.closes(),
        "excluded": r.excluded_nodes.len(),
        "equations": eqs,
    }))
}

fn to_js(r: Result<Value>) -> std::result::Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn representation_summary(p: u8) -> std::result::Result<String, JsError> {
    to_js(summary(p))
}

/// `quantity` is one of `u11 u12 u21 u22 det`.
#[wasm_bindgen]
pub fn field_heatmap(
    case: &str,
    seed: u32,
    nodes: usize,
    amplitude: f64,
    quantity: &str,
) -> std::result::Result<String, JsError> {
    to_js(heatmap(case, seed, nodes, amplitude, quantity))
}

#[wasm_bindgen]
pub fn residual_ladder(case: &str, seed: u32, stencil: u8, amplitude: f64) -> std::result::Result<String, JsError> {
    to_js(ladder(case, seed, stencil, amplitude))
}
