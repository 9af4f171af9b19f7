//! `K = M+(y) K0 M-(x)` on a rectangular grid and the node fields built from it.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::algebra::{fundamental_pair, Representation};
use crate::dynamics::coefficients::CoefficientSet;
use crate::dynamics::integrate::{integrate_m, Generator, IntegrationStats};
use crate::dynamics::loperator::{build_l_operator, Grade0, Side};
use crate::dynamics::multiplets::{det2, multiplet_names, multiplets, u_matrix, CoefVals, Variant};
use crate::error::{Error, Result};
use crate::grading::GradingCase;
use crate::identities::{alpha_table, sample_pair, AlphaTable, ElementSource, PairElement, WordVectors};
use crate::matrix::Matrix;

/// Nodes `x0 + i hx`, `i < nx` (likewise in y).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn unit(n: usize) -> Self {
        Grid {
            x0: 0.0,
            x1: 1.0,
            y0: 0.0,
            y1: 1.0,
            nx: n,
            ny: n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.nx >= 2
            && self.ny >= 2
            && [self.x0, self.x1, self.y0, self.y1].iter().all(|v| v.is_finite())
            && self.x1 > self.x0
            && self.y1 > self.y0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("bad grid {self:?}")))
        }
    }

    pub fn hx(&self) -> f64 {
        (self.x1 - self.x0) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y1 - self.y0) / (self.ny - 1) as f64
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x0 + i as f64 * self.hx()).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|i| self.y0 + i as f64 * self.hy()).collect()
    }

    /// Same rectangle with the spacing halved.
    pub fn refined(&self) -> Self {
        Grid {
            nx: 2 * self.nx - 1,
            ny: 2 * self.ny - 1,
            ..*self
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    /// G2(1,0) gauge `c^3_2 = cb^3_2 = 0`.
    pub gauge: bool,
    /// Constant group element between the two paths; `None` is the identity.
    pub base_seed: Option<u64>,
    /// Relative size below which `<j|K|j>` or `det u` marks a node singular.
    pub singular_threshold: f64,
    #[serde(skip)]
    pub a0: Grade0,
    #[serde(skip)]
    pub b0: Grade0,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-12,
            gauge: true,
            base_seed: None,
            singular_threshold: DEFAULT_SINGULAR_THRESHOLD,
            a0: Grade0::default(),
            b0: Grade0::default(),
        }
    }
}

/// Quantities at one node. `alphas` and `multiplets` are absent where the
/// highest-weight elements vanish.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeFields {
    pub u: [[f64; 2]; 2],
    pub det: f64,
    pub alphas: Option<AlphaTable<f64>>,
    pub multiplets: Vec<f64>,
    pub singular: bool,
}

#[derive(Clone, Debug)]
pub struct SolutionField {
    pub case: GradingCase,
    pub grid: Grid,
    pub coeffs: CoefficientSet,
    pub options: SolveOptions,
    pub reps: [Representation; 2],
    /// `M-_j(x_i)` per representation.
    pub mminus: [Vec<Matrix<f64>>; 2],
    /// `M+_j(y_k) K0_j` per representation.
    pub mplus: [Vec<Matrix<f64>>; 2],
    pub stats: IntegrationStats,
    /// Row-major in y: node `(i, k)` is at `k * nx + i`.
    pub nodes: Vec<NodeFields>,
}

/// Nodes where `|<j|K|j>|`, `|u_11|` or `|det u|` fall below this (relative to
/// `max(1, max|u|)`) are singular. Finite differences lose their order well
/// before an actual pole, hence the generous default.
pub const DEFAULT_SINGULAR_THRESHOLD: f64 = 0.05;

pub fn solve(case: GradingCase, coeffs: &CoefficientSet, grid: Grid, options: &SolveOptions) -> Result<SolutionField> {
    grid.validate()?;
    coeffs.validate()?;
    let reps = fundamental_pair(case.p())?;
    let gauge = options.gauge && case == GradingCase::G2_10;
    let lp = build_l_operator(case, Side::Plus, coeffs, gauge)?;
    let lm = build_l_operator(case, Side::Minus, coeffs, gauge)?;
    let base: [Matrix<f64>; 2] = match options.base_seed {
        Some(seed) => sample_pair(&reps, seed, 12).map(|m| m.to_f64()),
        None => [Matrix::identity(reps[0].dim), Matrix::identity(reps[1].dim)],
    };
    let mut stats = IntegrationStats::default();
    let mut mminus: [Vec<Matrix<f64>>; 2] = Default::default();
    let mut mplus: [Vec<Matrix<f64>>; 2] = Default::default();
    let (xs, ys) = (grid.xs(), grid.ys());
    for (j, r) in reps.iter().enumerate() {
        let cm = lm.compile(r, coeffs)?;
        let cp = lp.compile(r, coeffs)?;
        let gm = Generator {
            rep: r,
            g0: &options.a0,
            l: &cm,
        };
        let gp = Generator {
            rep: r,
            g0: &options.b0,
            l: &cp,
        };
        let (pm, s1) = integrate_m(&gm, Side::Minus, &xs, options.tol)?;
        let (pp, s2) = integrate_m(&gp, Side::Plus, &ys, options.tol)?;
        stats.accepted += s1.accepted + s2.accepted;
        stats.rejected += s1.rejected + s2.rejected;
        mminus[j] = pm;
        mplus[j] = pp.into_iter().map(|m| m.mul(&base[j])).collect();
    }
    let mut field = SolutionField {
        case,
        grid,
        coeffs: coeffs.clone(),
        options: options.clone(),
        reps,
        mminus,
        mplus,
        stats,
        nodes: Vec::new(),
    };
    field.nodes = field.assemble(Variant::Calibrated)?;
    Ok(field)
}

impl SolutionField {
    pub fn k(&self, ix: usize, iy: usize) -> [Matrix<f64>; 2] {
        [0, 1].map(|j| self.mplus[j][iy].mul(&self.mminus[j][ix]))
    }

    pub fn coef_vals(&self, ix: usize, iy: usize) -> Result<CoefVals<f64>> {
        let (xs, ys) = (
            self.grid.x0 + ix as f64 * self.grid.hx(),
            self.grid.y0 + iy as f64 * self.grid.hy(),
        );
        Ok(CoefVals::from_values(self.coeffs.at(xs, ys)?))
    }

    pub fn node(&self, ix: usize, iy: usize) -> &NodeFields {
        &self.nodes[iy * self.grid.nx + ix]
    }

    /// Evaluate `f` on every node with an element source for `K` there.
    pub fn map_nodes<T>(
        &self,
        mut f: impl FnMut(usize, usize, &PairElement<f64>, &CoefVals<f64>) -> Result<T>,
    ) -> Result<Vec<T>> {
        let vecs = WordVectors::<f64>::new(&self.reps);
        let mut out = Vec::with_capacity(self.grid.nx * self.grid.ny);
        for iy in 0..self.grid.ny {
            for ix in 0..self.grid.nx {
                let pe = PairElement::new(&vecs, self.k(ix, iy));
                out.push(f(ix, iy, &pe, &self.coef_vals(ix, iy)?)?);
            }
        }
        Ok(out)
    }

    /// Node fields with the multiplets of the given reading.
    pub fn assemble(&self, variant: Variant) -> Result<Vec<NodeFields>> {
        let case = self.case;
        self.map_nodes(|_, _, pe, cv| {
            let u = u_matrix(case, pe)?;
            let det = det2(&u);
            let scale = u.data().iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let d1 = pe.diag(1)?;
            let d2 = pe.diag(2)?;
            let th = self.options.singular_threshold;
            let tiny = |v: f64| v.abs() < th * scale;
            let mut singular = tiny(d1) || tiny(d2) || tiny(u[(0, 0)]) || det.abs() < th * scale * scale;
            if case == GradingCase::G2_10 && det <= 0.0 {
                singular = true;
            }
            let vanishes = |v: f64| v.abs() < 1e-12 * scale;
            let (alphas, mults) = if vanishes(d1) || vanishes(d2) {
                (None, Vec::new())
            } else {
                (Some(alpha_table(pe, case.p())?), multiplets(case, variant, pe, cv)?)
            };
            Ok(NodeFields {
                u: [[u[(0, 0)], u[(0, 1)]], [u[(1, 0)], u[(1, 1)]]],
                det,
                alphas,
                multiplets: mults,
                singular,
            })
        })
    }

    pub fn singular_nodes(&self) -> Vec<(usize, usize)> {
        let nx = self.grid.nx;
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.singular)
            .map(|(i, _)| (i % nx, i / nx))
            .collect()
    }

    pub fn csv_header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["x", "y", "u11", "u12", "u21", "u22", "det_u", "singular"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        h.extend(multiplet_names(self.case).iter().map(|s| s.to_string()));
        h
    }

    /// One row per node; multiplets are empty where undefined.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(self.csv_header())?;
        let nm = multiplet_names(self.case).len();
        for (idx, n) in self.nodes.iter().enumerate() {
            let (ix, iy) = (idx % self.grid.nx, idx / self.grid.nx);
            let mut row = vec![
                format!("{:?}", self.grid.x0 + ix as f64 * self.grid.hx()),
                format!("{:?}", self.grid.y0 + iy as f64 * self.grid.hy()),
            ];
            row.extend(n.u.iter().flatten().map(|v| format!("{v:?}")));
            row.push(format!("{:?}", n.det));
            row.push(n.singular.to_string());
            if n.multiplets.len() == nm {
                row.extend(n.multiplets.iter().map(|v| format!("{v:?}")));
            } else {
                row.extend(std::iter::repeat_n(String::new(), nm));
            }
            wr.write_record(row)?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::coefficients::CoefficientFn;

    #[test]
    fn zero_operators_give_identity_u() {
        for case in GradingCase::ALL {
            let f = solve(
                case,
                &CoefficientSet::zeros(case),
                Grid::unit(5),
                &SolveOptions::default(),
            )
            .unwrap();
            for n in &f.nodes {
                assert_eq!(n.u, [[1.0, 0.0], [0.0, 1.0]]);
                assert!(!n.singular);
                let a = n.alphas.as_ref().unwrap();
                assert_eq!((a.alpha1, a.bar_alpha21), (0.0, 0.0));
                assert!(n.multiplets.iter().all(|v| *v == 0.0));
            }
        }
    }

    #[test]
    fn origin_node_is_identity() {
        let case = GradingCase::A2_10;
        let f = solve(
            case,
            &CoefficientSet::constants(case, 0.8),
            Grid::unit(9),
            &SolveOptions::default(),
        )
        .unwrap();
        let k = f.k(0, 0);
        assert_eq!(k[0], Matrix::identity(3));
        assert_eq!(f.node(0, 0).u, [[1.0, 0.0], [0.0, 1.0]]);
        assert!(f.node(4, 4).u[0][1] != 0.0);
    }

    #[test]
    fn kx_matches_k_times_l_minus() {
        // dK/dx = K L-(x): compare a central difference with the operator
        let case = GradingCase::B2_10;
        let c = CoefficientSet::random(case, 5, 2);
        let grid = Grid::unit(201);
        let f = solve(case, &c, grid, &SolveOptions::default()).unwrap();
        let lm = build_l_operator(case, Side::Minus, &c, false)
            .unwrap()
            .compile(&f.reps[1], &c)
            .unwrap();
        let (ix, iy) = (100, 60);
        let h = grid.hx();
        let dk = f.k(ix + 1, iy)[1].sub(&f.k(ix - 1, iy)[1]).scale(&(0.5 / h));
        let expect = f.k(ix, iy)[1].mul(&lm.at(ix as f64 * h));
        assert!(dk.sub(&expect).max_abs() < 1e-3, "{}", dk.sub(&expect).max_abs());
    }

    #[test]
    fn csv_has_header_and_row_per_node() {
        let case = GradingCase::G2_10;
        let c = CoefficientSet::zeros(case).set("c^2", CoefficientFn::constant(0.5));
        let f = solve(case, &c, Grid::unit(3), &SolveOptions::default()).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 10);
        assert!(lines[0].starts_with("x,y,u11,u12,u21,u22,det_u,singular,p1_1"));
    }

    #[test]
    fn gauge_flag_rejects_nonzero_top_coefficient() {
        let case = GradingCase::G2_10;
        let c = CoefficientSet::zeros(case).set("c^3_2", CoefficientFn::constant(1.0));
        assert!(solve(case, &c, Grid::unit(3), &SolveOptions::default()).is_err());
        let opts = SolveOptions {
            gauge: false,
            ..SolveOptions::default()
        };
        assert!(solve(case, &c, Grid::unit(3), &opts).is_ok());
    }
}
