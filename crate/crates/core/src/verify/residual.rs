//! Finite-difference residuals of a solution field and their convergence.

use std::io::Write;

use serde::Serialize;

use crate::dynamics::coefficients::CoefficientSet;
use crate::dynamics::fields::{solve, Grid, SolutionField, SolveOptions};
use crate::dynamics::multiplets::{det2, inv2, u_matrix};
use crate::error::{Error, Result};
use crate::grading::GradingCase;
use crate::matrix::Matrix;
use crate::verify::stencil::{dx, dy, has_support, mixed_derivative, radius, GridFn};
use crate::verify::systems::{equations, fields, rhs, Equation, Lhs, NodeVals, Role};

/// Residuals of one field at one spacing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelResidual {
    pub h: f64,
    pub nodes: usize,
    /// Interior nodes evaluated.
    pub evaluated: usize,
    /// One per equation: `max |lhs - rhs| / max(1, max |rhs|)`.
    pub residuals: Vec<f64>,
    /// Interior nodes skipped because their stencil touches a singular node.
    pub excluded: Vec<[f64; 2]>,
}

/// Per-node values on the grid: `u` entries, then the system fields.
struct Samples {
    nx: usize,
    ny: usize,
    quantities: Vec<Vec<f64>>,
    singular: Vec<bool>,
}

fn sample(field: &SolutionField) -> Result<Samples> {
    let case = field.case;
    let nf = crate::verify::systems::field_names(case).len();
    let rows = field.map_nodes(|ix, iy, pe, cv| {
        let node = field.node(ix, iy);
        if node.singular {
            return Ok(None);
        }
        let u = u_matrix(case, pe)?;
        let f = fields(case, pe, cv)?;
        Ok(Some((u, f)))
    })?;
    let n = rows.len();
    let mut quantities = vec![vec![f64::NAN; n]; 4 + nf];
    let mut singular = vec![false; n];
    for (idx, row) in rows.into_iter().enumerate() {
        match row {
            None => singular[idx] = true,
            Some((u, f)) => {
                for (q, v) in u.data().iter().chain(f.iter()).enumerate() {
                    quantities[q][idx] = *v;
                }
            }
        }
    }
    Ok(Samples {
        nx: field.grid.nx,
        ny: field.grid.ny,
        quantities,
        singular,
    })
}

/// Region where a level is evaluated. Every level of a ladder uses the window of
/// the coarsest one, so the maxima are taken over the same set of points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub x: [f64; 2],
    pub y: [f64; 2],
    /// Nodes within this max-norm distance of a singular node are skipped.
    pub exclusion: f64,
}

impl Window {
    /// Interior of `grid` for a stencil of the given order.
    pub fn interior(grid: &Grid, order: u8) -> Result<Self> {
        let r = radius(order)? as f64;
        let (hx, hy) = (grid.hx(), grid.hy());
        Ok(Window {
            x: [grid.x0 + r * hx, grid.x1 - r * hx],
            y: [grid.y0 + r * hy, grid.y1 - r * hy],
            exclusion: r * hx.max(hy),
        })
    }

    fn contains(&self, x: f64, y: f64, slack: f64) -> bool {
        x >= self.x[0] - slack && x <= self.x[1] + slack && y >= self.y[0] - slack && y <= self.y[1] + slack
    }
}

/// Residual of every equation of the field's case over its own interior.
pub fn residual_level(field: &SolutionField, order: u8) -> Result<LevelResidual> {
    residual_in(field, order, &Window::interior(&field.grid, order)?)
}

/// Residual of every equation at the nodes of `field` inside `window`.
pub fn residual_in(field: &SolutionField, order: u8, window: &Window) -> Result<LevelResidual> {
    let r = radius(order)?;
    let case = field.case;
    let eqs = equations(case);
    let s = sample(field)?;
    let (hx, hy) = (field.grid.hx(), field.grid.hy());
    let slack = 1e-9 * hx.min(hy);
    let kx = r.max((window.exclusion / hx + 1e-9).ceil() as usize);
    let ky = r.max((window.exclusion / hy + 1e-9).ceil() as usize);
    let g = |q: usize| GridFn {
        data: &s.quantities[q],
        nx: s.nx,
        ny: s.ny,
    };
    let mut worst = vec![0.0f64; eqs.len()];
    let mut scale = vec![1.0f64; eqs.len()];
    let mut excluded = Vec::new();
    let mut evaluated = 0;
    for iy in 0..s.ny {
        for ix in 0..s.nx {
            let (x, y) = (field.grid.x0 + ix as f64 * hx, field.grid.y0 + iy as f64 * hy);
            if !has_support(s.nx, s.ny, ix, iy, order) || !window.contains(x, y, slack) {
                continue;
            }
            let ys = iy.saturating_sub(ky)..=(iy + ky).min(s.ny - 1);
            let touches = ys
                .into_iter()
                .any(|jy| (ix.saturating_sub(kx)..=(ix + kx).min(s.nx - 1)).any(|jx| s.singular[jy * s.nx + jx]));
            if touches {
                excluded.push([x, y]);
                continue;
            }
            evaluated += 1;
            let val = |q: usize| s.quantities[q][iy * s.nx + ix];
            let u = Matrix::from_fn(2, 2, |i, j| val(2 * i + j));
            let ux = Matrix::from_fn(2, 2, |i, j| dx(&g(2 * i + j), ix, iy, hx, order).unwrap_or(f64::NAN));
            let uy = Matrix::from_fn(2, 2, |i, j| dy(&g(2 * i + j), ix, iy, hy, order).unwrap_or(f64::NAN));
            let uxy = Matrix::from_fn(2, 2, |i, j| {
                mixed_derivative(&g(2 * i + j), ix, iy, hx, hy, order).unwrap_or(f64::NAN)
            });
            let ui = inv2(&u);
            // (u^-1 u_x)_y = u^-1 u_xy - u^-1 u_y u^-1 u_x
            let maurer = ui.mul(&uxy).sub(&ui.mul(&uy).mul(&ui).mul(&ux));
            let umaurer = u.mul(&maurer);
            let nf = s.quantities.len() - 4;
            let node = NodeVals {
                cbrt_det: det2(&u).cbrt(),
                fields: (0..nf).map(|f| val(4 + f)).collect(),
                c: field.coef_vals(ix, iy)?,
                u,
            };
            let right = rhs(case, &node);
            for (e, (eqn, rv)) in eqs.iter().zip(right).enumerate() {
                let lv = match eqn.lhs {
                    Lhs::Maurer { i, j } => maurer[(i, j)],
                    Lhs::UMaurer { i, j } => umaurer[(i, j)],
                    Lhs::Dx { f } => dx(&g(4 + f), ix, iy, hx, order)?,
                    Lhs::Dy { f } => dy(&g(4 + f), ix, iy, hy, order)?,
                };
                let d = (lv - rv).abs();
                worst[e] = if d.is_nan() { f64::INFINITY } else { worst[e].max(d) };
                scale[e] = scale[e].max(rv.abs());
            }
        }
    }
    if evaluated == 0 {
        return Err(Error::AllSingular);
    }
    Ok(LevelResidual {
        h: hx.max(hy),
        nodes: s.nx * s.ny,
        evaluated,
        residuals: worst.iter().zip(&scale).map(|(w, s)| w / s).collect(),
        excluded,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum OrderEstimate {
    Order(f64),
    /// The finest residual sits at the rounding floor, so no rate can be read off.
    Saturated,
    /// Fewer than three spacings were run.
    Unavailable,
}

/// Residuals below `FLOOR_FACTOR * tol / h^2` are treated as rounding noise: integrator
/// error of size `tol` is amplified by `1/h^2` in the mixed derivative.
pub const FLOOR_FACTOR: f64 = 1.0;

pub fn rounding_floor(h: f64, tol: f64) -> f64 {
    FLOOR_FACTOR * tol.max(f64::EPSILON) / (h * h)
}

/// `log2(r(h)/r(h/2))` averaged over the two finest pairs of a halving sequence.
pub fn convergence_order(spacings: &[f64], residuals: &[f64], tol: f64) -> OrderEstimate {
    let n = residuals.len();
    if n < 3 || spacings.len() != n {
        return OrderEstimate::Unavailable;
    }
    if residuals[n - 1] <= rounding_floor(spacings[n - 1], tol) {
        return OrderEstimate::Saturated;
    }
    let rates: Vec<f64> = (n - 2..n)
        .map(|k| (residuals[k - 1] / residuals[k]).ln() / (spacings[k - 1] / spacings[k]).ln())
        .collect();
    OrderEstimate::Order(rates.iter().sum::<f64>() / rates.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquationSummary {
    pub name: String,
    pub role: Role,
    pub residuals: Vec<f64>,
    pub order: OrderEstimate,
    /// Order at least `stencil - 0.5`, or saturated.
    pub converges: bool,
    pub below_threshold: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub case: GradingCase,
    pub stencil: u8,
    pub tol: f64,
    pub threshold: f64,
    pub spacings: Vec<f64>,
    pub equations: Vec<EquationSummary>,
    /// Excluded interior nodes at the finest spacing.
    pub excluded_nodes: Vec<[f64; 2]>,
    pub evaluated_nodes: Vec<usize>,
}

impl ResidualReport {
    pub fn certified(&self) -> impl Iterator<Item = &EquationSummary> {
        self.equations.iter().filter(|e| e.role == Role::Certified)
    }

    /// Every certified equation converges at the stencil order and ends below threshold.
    pub fn closes(&self) -> bool {
        self.certified().all(|e| e.converges && e.below_threshold)
    }

    /// Every certified equation is below threshold or converging.
    pub fn acceptable(&self) -> bool {
        self.certified().all(|e| e.converges || e.below_threshold)
    }

    pub fn max_certified_residual(&self) -> f64 {
        self.certified()
            .filter_map(|e| e.residuals.last())
            .fold(0.0, |a, &b| a.max(b))
    }

    pub fn min_certified_order(&self) -> Option<f64> {
        self.certified()
            .filter_map(|e| match e.order {
                OrderEstimate::Order(o) => Some(o),
                _ => None,
            })
            .reduce(f64::min)
    }

    pub fn csv_header() -> &'static [&'static str] {
        &[
            "case",
            "stencil",
            "finest_h",
            "equations",
            "max_residual",
            "min_order",
            "saturated",
            "excluded_nodes",
            "closes",
        ]
    }

    /// One-line summary in [`ResidualReport::csv_header`] order.
    pub fn write_csv_summary<W: Write>(&self, w: W, header: bool) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        if header {
            wr.write_record(Self::csv_header())?;
        }
        let saturated = self.certified().filter(|e| e.order == OrderEstimate::Saturated).count();
        wr.write_record([
            self.case.to_string(),
            self.stencil.to_string(),
            format!("{:?}", self.spacings.last().copied().unwrap_or(f64::NAN)),
            self.certified().count().to_string(),
            format!("{:e}", self.max_certified_residual()),
            self.min_certified_order().map_or(String::new(), |o| format!("{o:.3}")),
            saturated.to_string(),
            self.excluded_nodes.len().to_string(),
            self.closes().to_string(),
        ])?;
        wr.flush()?;
        Ok(())
    }
}

/// Default spacing threshold and ladder.
pub const DEFAULT_THRESHOLD: f64 = 1e-6;

/// Summarise per-level residuals of the equations of `case`.
pub fn summarize(case: GradingCase, stencil: u8, tol: f64, threshold: f64, levels: &[LevelResidual]) -> ResidualReport {
    let spacings: Vec<f64> = levels.iter().map(|l| l.h).collect();
    let equations = equations(case)
        .into_iter()
        .enumerate()
        .map(|(e, Equation { name, role, .. })| {
            let residuals: Vec<f64> = levels.iter().map(|l| l.residuals[e]).collect();
            let order = convergence_order(&spacings, &residuals, tol);
            let converges = match order {
                OrderEstimate::Order(o) => o >= stencil as f64 - 0.5,
                OrderEstimate::Saturated => true,
                OrderEstimate::Unavailable => false,
            };
            let below_threshold = residuals.last().is_some_and(|r| *r < threshold);
            EquationSummary {
                name,
                role,
                residuals,
                order,
                converges,
                below_threshold,
            }
        })
        .collect();
    ResidualReport {
        case,
        stencil,
        tol,
        threshold,
        spacings,
        equations,
        excluded_nodes: levels.last().map(|l| l.excluded.clone()).unwrap_or_default(),
        evaluated_nodes: levels.iter().map(|l| l.evaluated).collect(),
    }
}

/// Solve on each grid of a halving ladder and summarise.
pub fn verify_ladder(
    case: GradingCase,
    coeffs: &CoefficientSet,
    grids: &[Grid],
    options: &SolveOptions,
    stencil: u8,
    threshold: f64,
) -> Result<ResidualReport> {
    Ok(verify_ladder_fields(case, coeffs, grids, options, stencil, threshold)?.0)
}

/// As [`verify_ladder`], also returning the field on the finest grid.
pub fn verify_ladder_fields(
    case: GradingCase,
    coeffs: &CoefficientSet,
    grids: &[Grid],
    options: &SolveOptions,
    stencil: u8,
    threshold: f64,
) -> Result<(ResidualReport, SolutionField)> {
    let Some(coarse) = grids.first() else {
        return Err(Error::InvalidParameter("empty grid ladder".into()));
    };
    let window = Window::interior(coarse, stencil)?;
    let mut levels = Vec::with_capacity(grids.len());
    let mut last = None;
    for g in grids {
        let field = solve(case, coeffs, *g, options)?;
        levels.push(residual_in(&field, stencil, &window)?);
        last = Some(field);
    }
    let field = last.expect("nonempty ladder");
    Ok((summarize(case, stencil, options.tol, threshold, &levels), field))
}

/// `base` and two successive halvings.
pub fn halving_ladder(base: Grid, levels: usize) -> Vec<Grid> {
    let mut out = vec![base];
    for _ in 1..levels {
        let next = out.last().expect("nonempty").refined();
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_of_a_clean_power_law() {
        let h = [0.1f64, 0.05, 0.025];
        let r: Vec<f64> = h.iter().map(|h| 3.0 * h.powi(4)).collect();
        match convergence_order(&h, &r, 1e-14) {
            OrderEstimate::Order(o) => assert!((o - 4.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exact_zero_is_saturated() {
        assert_eq!(
            convergence_order(&[0.1, 0.05, 0.025], &[0.0; 3], 1e-12),
            OrderEstimate::Saturated
        );
        assert_eq!(
            convergence_order(&[0.1, 0.05], &[1.0, 0.1], 1e-12),
            OrderEstimate::Unavailable
        );
    }

    #[test]
    fn zero_coefficients_give_zero_residual() {
        for case in GradingCase::ALL {
            let f = solve(
                case,
                &CoefficientSet::zeros(case),
                Grid::unit(9),
                &SolveOptions::default(),
            )
            .unwrap();
            let l = residual_level(&f, 4).unwrap();
            assert!(l.residuals.iter().all(|r| *r < 1e-12), "{case}: {:?}", l.residuals);
            assert_eq!(l.evaluated, 25);
        }
    }

    #[test]
    fn a2_constant_unit_coefficients() {
        let case = GradingCase::A2_10;
        let c = CoefficientSet::constants(case, 1.0);
        let f = solve(case, &c, Grid::unit(65), &SolveOptions::default()).unwrap();
        let l = residual_level(&f, 4).unwrap();
        let eqs = equations(case);
        for (e, r) in eqs.iter().zip(&l.residuals) {
            if e.role == Role::Certified {
                assert!(*r < 1e-6, "{}: {r}", e.name);
            }
        }
    }
}
