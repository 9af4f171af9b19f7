//! Adaptive Dormand-Prince 5(4) for the linear matrix ODEs
//! `M-_x = M- A(x)` and `M+_y = A(y) M+`, started from the identity.

use crate::algebra::Representation;
use crate::dynamics::loperator::{CompiledL, Grade0, Side};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [&[f64]; 7] = [
    &[],
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
    ],
    &[
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// The coefficient matrix `A(t) = g0(t) + L(t)` of one side.
pub struct Generator<'a> {
    pub rep: &'a Representation,
    pub g0: &'a Grade0,
    pub l: &'a CompiledL,
}

impl Generator<'_> {
    pub fn at(&self, t: f64) -> Matrix<f64> {
        let l = self.l.at(t);
        if self.g0.is_zero() {
            l
        } else {
            l.add(&self.g0.at(self.rep, t))
        }
    }
}

fn rhs(side: Side, a: &Matrix<f64>, m: &Matrix<f64>) -> Matrix<f64> {
    match side {
        Side::Minus => m.mul(a),
        Side::Plus => a.mul(m),
    }
}

fn axpy(y: &Matrix<f64>, terms: &[(f64, &Matrix<f64>)], h: f64) -> Matrix<f64> {
    let mut out = y.clone();
    for (c, k) in terms {
        if *c != 0.0 {
            out = out.add(&k.scale(&(c * h)));
        }
    }
    out
}

/// Integrate from `abscissae[0]` (where `M = I`) through every abscissa in order;
/// returns `M` at each. Steps are clipped so the abscissae are hit exactly.
pub fn integrate_m(
    gen: &Generator,
    side: Side,
    abscissae: &[f64],
    tol: f64,
) -> Result<(Vec<Matrix<f64>>, IntegrationStats)> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if abscissae.windows(2).any(|w| w[1].is_nan() || w[1] <= w[0]) || abscissae.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter(
            "abscissae must be finite and strictly increasing".into(),
        ));
    }
    let n = gen.l.dim();
    let mut stats = IntegrationStats::default();
    let Some(&t0) = abscissae.first() else {
        return Ok((Vec::new(), stats));
    };
    let mut out = vec![Matrix::identity(n)];
    let mut t = t0;
    let mut y = Matrix::identity(n);
    let span = abscissae[abscissae.len() - 1] - t0;
    let mut h = (span / 64.0).max(1e-3 * span);
    for &target in &abscissae[1..] {
        while t < target {
            let last = target - t <= h;
            let step = if last { target - t } else { h };
            if step < 1e-14 * (1.0 + t.abs()) {
                return Err(Error::IntegrationFailure {
                    at: t,
                    reason: "step size underflow".into(),
                });
            }
            let mut k: Vec<Matrix<f64>> = Vec::with_capacity(7);
            for s in 0..7 {
                let terms: Vec<(f64, &Matrix<f64>)> = A[s].iter().copied().zip(k.iter()).collect();
                let ys = axpy(&y, &terms, step);
                k.push(rhs(side, &gen.at(t + C[s] * step), &ys));
            }
            let terms5: Vec<(f64, &Matrix<f64>)> = B5.iter().copied().zip(k.iter()).collect();
            let y5 = axpy(&y, &terms5, step);
            let mut err = 0.0f64;
            for (idx, v5) in y5.data().iter().enumerate() {
                let e: f64 = (0..7).map(|s| (B5[s] - B4[s]) * k[s].data()[idx]).sum::<f64>() * step;
                let scale = tol + tol * v5.abs().max(y.data()[idx].abs());
                err = err.max(e.abs() / scale);
            }
            if !err.is_finite() {
                return Err(Error::IntegrationFailure {
                    at: t,
                    reason: "non-finite state".into(),
                });
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                stats.accepted += 1;
                t = if last { target } else { t + step };
                y = y5;
                if !last {
                    h = step * factor;
                }
            } else {
                stats.rejected += 1;
                h = step * factor;
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fundamental_pair;
    use crate::dynamics::coefficients::{CoefficientFn, CoefficientSet};
    use crate::dynamics::loperator::build_l_operator;
    use crate::grading::GradingCase;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn zero_generator_gives_identity() {
        let case = GradingCase::B2_10;
        let reps = fundamental_pair(2).unwrap();
        let c = CoefficientSet::zeros(case);
        let l = build_l_operator(case, Side::Minus, &c, false)
            .unwrap()
            .compile(&reps[1], &c)
            .unwrap();
        let g0 = Grade0::default();
        let gen = Generator {
            rep: &reps[1],
            g0: &g0,
            l: &l,
        };
        let (path, _) = integrate_m(&gen, Side::Minus, &grid(5), 1e-12).unwrap();
        assert!(path.iter().all(|m| *m == Matrix::identity(5)));
    }

    #[test]
    fn constant_coefficients_match_exponential() {
        let case = GradingCase::G2_01;
        let reps = fundamental_pair(3).unwrap();
        let c = CoefficientSet::constants(case, 0.7);
        for side in [Side::Minus, Side::Plus] {
            let spec = build_l_operator(case, side, &c, false).unwrap();
            let l = spec.compile(&reps[0], &c).unwrap();
            let g0 = Grade0::default();
            let gen = Generator {
                rep: &reps[0],
                g0: &g0,
                l: &l,
            };
            let (path, _) = integrate_m(&gen, side, &grid(9), 1e-12).unwrap();
            let a = l.at(0.0);
            for (i, m) in path.iter().enumerate() {
                let x = i as f64 / 8.0;
                let e = a.exp_nilpotent(&x).unwrap();
                assert!(m.sub(&e).max_abs() < 1e-11, "{side:?} {i}");
            }
        }
    }

    #[test]
    fn diagonal_grade0_integrates_to_exponentials() {
        let reps = fundamental_pair(1).unwrap();
        let case = GradingCase::A2_10;
        let c = CoefficientSet::zeros(case);
        let l = build_l_operator(case, Side::Minus, &c, false)
            .unwrap()
            .compile(&reps[0], &c)
            .unwrap();
        let g0 = Grade0 {
            h: [Some(CoefficientFn::constant(0.5)), None],
        };
        let gen = Generator {
            rep: &reps[0],
            g0: &g0,
            l: &l,
        };
        let (path, _) = integrate_m(&gen, Side::Minus, &grid(3), 1e-12).unwrap();
        // weight of |1> under h1 is 1
        assert!((path[2][(0, 0)] - 0.5f64.exp()).abs() < 1e-11);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let reps = fundamental_pair(1).unwrap();
        let c = CoefficientSet::zeros(GradingCase::A2_10);
        let l = build_l_operator(GradingCase::A2_10, Side::Minus, &c, false)
            .unwrap()
            .compile(&reps[0], &c)
            .unwrap();
        let g0 = Grade0::default();
        let gen = Generator {
            rep: &reps[0],
            g0: &g0,
            l: &l,
        };
        assert!(integrate_m(&gen, Side::Minus, &grid(3), 0.0).is_err());
        assert!(integrate_m(&gen, Side::Minus, &[0.0, 0.0], 1e-9).is_err());
    }
}
