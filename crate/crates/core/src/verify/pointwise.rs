//! Exact closure at a single point.
//!
//! Locally `K(x+dx, y+dy) = (1 + dy L+) K (1 + dx L-)` to first order in each
//! variable, so substituting jets for the two translations gives `u_x`, `u_y`,
//! `u_xy` and the multiplet derivatives with no discretisation error. Over
//! rationals every certified residual must vanish identically.

use std::rc::Rc;

use serde::Serialize;

use crate::dynamics::coefficients::{barred, slots, CoefficientSet};
use crate::dynamics::loperator::{build_l_operator, Side};
use crate::dynamics::multiplets::{det2, inv2, u_matrix, CoefVals};
use crate::error::{Error, Result};
use crate::grading::GradingCase;
use crate::identities::{ElementSource, PairElement, Translated};
use crate::jet::Jet;
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::verify::systems::{equations, fields, rhs, Equation, Lhs, NodeVals};

/// Jet symbol of the left (`L+`, y) translation.
const Y: usize = 0;
/// Jet symbol of the right (`L-`, x) translation.
const X: usize = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointResidual<S> {
    pub equation: Equation,
    pub lhs: S,
    pub rhs: S,
}

impl<S: Scalar> PointResidual<S> {
    pub fn residual(&self) -> S {
        self.lhs.clone() - self.rhs.clone()
    }
}

fn slot_value<S: Scalar>(case: GradingCase, cv: &CoefVals<S>, name: &str) -> S {
    let un = slots(case);
    if let Some(i) = un.iter().position(|s| *s == name) {
        return cv.plain[i].clone();
    }
    let i = un.iter().position(|s| barred(s) == name).expect("known slot");
    cv.bar[i].clone()
}

/// Values and first-order jets of everything the equations need at one point.
#[derive(Clone, Debug)]
pub struct PointJets<S> {
    pub case: GradingCase,
    pub u: Matrix<S>,
    /// `(u^-1 u_x)_y`.
    pub maurer: Matrix<S>,
    /// Fields in [`fields`] order, as jets in the two translations.
    pub fields: Vec<Jet<S>>,
    pub cbrt_det: S,
    pub cv: CoefVals<S>,
}

/// Jets of `u` and the fields of `case` at the element `base`, with coefficient
/// values `cv` (plain at x, barred at y).
pub fn point_jets<S: Scalar>(
    case: GradingCase,
    base: &PairElement<S>,
    cv: &CoefVals<S>,
    gauge: bool,
) -> Result<PointJets<S>> {
    let reps = base.vecs.reps;
    let gauge = gauge && case == GradingCase::G2_10;
    let names = CoefficientSet::zeros(case);
    let lp = build_l_operator(case, Side::Plus, &names, gauge)?;
    let lm = build_l_operator(case, Side::Minus, &names, gauge)?;
    let val = |s: &str| slot_value(case, cv, s);
    let pair = |spec: &crate::dynamics::loperator::LOperatorSpec| -> [Rc<Matrix<S>>; 2] {
        [0, 1].map(|j| Rc::new(spec.matrix_with(&reps[j], val)))
    };
    let t = Translated::with_matrices(base, vec![pair(&lp)], vec![pair(&lm)]);
    for j in [1, 2] {
        if base.diag(j)?.is_zero() {
            return Err(Error::SingularElement(format!("<{j}|K|{j}>")));
        }
    }
    let u = u_matrix(case, &t)?;
    if det2(&u).value().is_zero() {
        return Err(Error::SingularElement("det u".into()));
    }
    let cvj = cv.map(|v| Jet::constant(v.clone()));
    let fields = fields(case, &t, &cvj)?;
    let maurer = inv2(&u).mul(&u.map(|e| e.derivative(X))).map(|e| e.derivative(Y));
    Ok(PointJets {
        case,
        u: u.map(|e| e.value()),
        maurer: maurer.map(|e| e.value()),
        fields,
        cbrt_det: if case == GradingCase::G2_10 {
            // det u = <1|K|1>^3 exactly
            base.diag(1)?
        } else {
            S::one()
        },
        cv: cv.clone(),
    })
}

impl<S: Scalar> PointJets<S> {
    /// Both sides of every equation, with the fields replaced by `fields`.
    pub fn residuals_with(&self, fields: &[Jet<S>]) -> Vec<PointResidual<S>> {
        let umaurer = self.u.mul(&self.maurer);
        let node = NodeVals {
            cbrt_det: self.cbrt_det.clone(),
            u: self.u.clone(),
            fields: fields.iter().map(|f| f.value()).collect(),
            c: self.cv.clone(),
        };
        equations(self.case)
            .into_iter()
            .zip(rhs(self.case, &node))
            .map(|(equation, rhs)| {
                let lhs = match equation.lhs {
                    Lhs::Maurer { i, j } => self.maurer[(i, j)].clone(),
                    Lhs::UMaurer { i, j } => umaurer[(i, j)].clone(),
                    Lhs::Dx { f } => fields[f].derivative(X).value(),
                    Lhs::Dy { f } => fields[f].derivative(Y).value(),
                };
                PointResidual { equation, lhs, rhs }
            })
            .collect()
    }

    pub fn residuals(&self) -> Vec<PointResidual<S>> {
        self.residuals_with(&self.fields)
    }
}

/// Left and right sides of every equation of `case` at the element `base`.
pub fn pointwise_residuals<S: Scalar>(
    case: GradingCase,
    base: &PairElement<S>,
    cv: &CoefVals<S>,
    gauge: bool,
) -> Result<Vec<PointResidual<S>>> {
    Ok(point_jets(case, base, cv, gauge)?.residuals())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fundamental_pair;
    use crate::identities::{sample_pair, WordVectors};
    use crate::scalar::{rat, Rational};
    use crate::verify::systems::Role;

    fn coef(case: GradingCase, seed: i64) -> CoefVals<Rational> {
        let n = slots(case).len();
        let v = |i: usize| rat(((i as i64 * 7 + seed * 5) % 13) - 6, 4 + (i as i64 % 3));
        let mut cv = CoefVals {
            plain: (0..n).map(v).collect(),
            bar: (0..n).map(|i| v(i + n)).collect(),
        };
        if case == GradingCase::G2_10 {
            cv.plain[4] = rat(0, 1);
            cv.bar[4] = rat(0, 1);
        }
        cv
    }

    #[test]
    fn certified_equations_close_exactly() {
        for case in GradingCase::ALL {
            let reps = fundamental_pair(case.p()).unwrap();
            let vecs = WordVectors::<Rational>::new(&reps);
            for seed in 0..2u64 {
                let pe = PairElement::new(&vecs, sample_pair(&reps, seed + 3, 10));
                let res = pointwise_residuals(case, &pe, &coef(case, seed as i64), true).unwrap();
                for r in res.iter().filter(|r| r.equation.role == Role::Certified) {
                    assert!(
                        r.residual().is_zero(),
                        "{case} {}: {} vs {}",
                        r.equation.name,
                        r.lhs,
                        r.rhs
                    );
                }
                let printed: Vec<_> = res.iter().filter(|r| r.equation.role == Role::Printed).collect();
                if !printed.is_empty() {
                    assert!(
                        printed.iter().any(|r| !r.residual().is_zero()),
                        "{case}: printed forms all close"
                    );
                }
            }
        }
    }
}
