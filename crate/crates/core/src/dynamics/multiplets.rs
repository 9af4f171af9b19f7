//! Per-node field quantities: the u-matrix and the case-specific multiplets,
//! written over any [`ElementSource`] so the same code serves exact rationals,
//! floating fields and jets.

use serde::{Deserialize, Serialize};

use crate::dynamics::coefficients::slots;
use crate::error::Result;
use crate::grading::GradingCase;
use crate::identities::{alpha, bar_alpha, ElementSource};
use crate::matrix::Matrix;
use crate::scalar::{rat, Scalar};

/// Which reading of an ambiguous displayed formula to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Printed,
    Calibrated,
}

/// Sign of `d^2` inside the G2(0,1) multiplets relative to the `L` display.
pub const G2_01_DD_SIGN: i64 = -1;

/// Coefficient values at one node in [`slots`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefVals<T> {
    pub plain: Vec<T>,
    pub bar: Vec<T>,
}

impl<T: Scalar> CoefVals<T> {
    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> CoefVals<U> {
        CoefVals {
            plain: self.plain.iter().map(&f).collect(),
            bar: self.bar.iter().map(&f).collect(),
        }
    }
}

impl CoefVals<f64> {
    pub fn from_values(v: crate::dynamics::coefficients::CoefficientValues) -> Self {
        CoefVals {
            plain: v.plain,
            bar: v.bar,
        }
    }
}

/// Representation holding `u` and the root spanning its basis `(|j>, X_j^-|j>)`.
pub fn u_rep(case: GradingCase) -> u8 {
    case.red_root()
}

/// `u_ab = <w_a| K |w_b>` with `w = ((), (r))`.
pub fn u_matrix<T: Scalar>(case: GradingCase, src: &dyn ElementSource<T>) -> Result<Matrix<T>> {
    let r = u_rep(case);
    let w: [&[u8]; 2] = [&[], &[r]];
    let mut rows = Vec::with_capacity(2);
    for a in w {
        let mut row = Vec::with_capacity(2);
        for b in w {
            row.push(src.me(r, a, b)?);
        }
        rows.push(row);
    }
    Ok(Matrix::from_rows(rows))
}

pub fn det2<T: Scalar>(u: &Matrix<T>) -> T {
    u[(0, 0)].clone() * u[(1, 1)].clone() - u[(0, 1)].clone() * u[(1, 0)].clone()
}

pub fn inv2<T: Scalar>(u: &Matrix<T>) -> Matrix<T> {
    let d = det2(u);
    Matrix::from_rows(vec![
        vec![u[(1, 1)].clone() / d.clone(), -u[(0, 1)].clone() / d.clone()],
        vec![-u[(1, 0)].clone() / d.clone(), u[(0, 0)].clone() / d],
    ])
}

/// Multiplet component names of a case.
pub fn multiplet_names(case: GradingCase) -> &'static [&'static str] {
    match case {
        GradingCase::A2_10 | GradingCase::B2_01 => &[],
        GradingCase::B2_10 => &["p1", "p2", "pb1", "pb2"],
        GradingCase::G2_01 => &[
            "p1", "p2", "p3", "p4", "pb1", "pb2", "pb3", "pb4", "q1", "q2", "qb1", "qb2",
        ],
        GradingCase::G2_10 => &["p1_1", "p1_2", "pb1_1", "pb1_2", "p2", "pb2"],
    }
}

fn slot<T: Scalar>(case: GradingCase, vals: &[T], name: &str) -> T {
    let i = slots(case).iter().position(|s| *s == name).expect("known slot");
    vals[i].clone()
}

fn k<T: Scalar>(n: i64, d: i64) -> T {
    T::from_rational(&rat(n, d))
}

/// Multiplet values in [`multiplet_names`] order.
///
/// G2(0,1): `p_1..p_4` are the components `T111, T112, T122, T222` of the
/// symmetric spinor, i.e. `p_1 = d1 + 1/3 d^2 alpha1112`, ..., `p_4 = d4 + 2 d^2 alpha2`.
pub fn multiplets<T: Scalar>(
    case: GradingCase,
    variant: Variant,
    src: &dyn ElementSource<T>,
    cv: &CoefVals<T>,
) -> Result<Vec<T>> {
    let c = |n: &str| slot(case, &cv.plain, n);
    let cb = |n: &str| slot(case, &cv.bar, n);
    match case {
        GradingCase::A2_10 | GradingCase::B2_01 => Ok(Vec::new()),
        GradingCase::B2_10 => {
            let two = T::from_i64(2);
            Ok(vec![
                c("c2") + two.clone() * c("c^2") * alpha(src, &[1])?,
                c("c1") + two.clone() * c("c^2") * alpha(src, &[2, 1])?,
                cb("c2") + two.clone() * cb("c^2") * bar_alpha(src, &[1])?,
                cb("c1") + two * cb("c^2") * bar_alpha(src, &[1, 2])?,
            ])
        }
        GradingCase::G2_01 => {
            let sigma = T::from_i64(match variant {
                Variant::Printed => 1,
                Variant::Calibrated => G2_01_DD_SIGN,
            });
            let d = [c("d1"), c("d2"), c("d3"), c("d4")];
            let db = [cb("d1"), cb("d2"), cb("d3"), cb("d4")];
            let dd = sigma.clone() * c("d^2");
            let ddb = sigma * cb("d^2");
            let p = crate::identities::g2_spinor(src, &d, &dd)?;
            let pb = crate::identities::g2_bar_spinor(src, &db, &ddb)?;
            let q = crate::identities::q_pair(&p, &alpha(src, &[1])?);
            let qb = crate::identities::q_pair(&pb, &bar_alpha(src, &[1])?);
            Ok(p.into_iter().chain(pb).chain(q).chain(qb).collect())
        }
        GradingCase::G2_10 => {
            let top: T = match variant {
                Variant::Printed => k(1, 1),
                Variant::Calibrated => k(3, 1),
            };
            let spinor = |c11: T, c12: T, c2: T, c31: T, a1: T, a21: T, a121: T| {
                [
                    -c12 + k::<T>(4, 1) * c2.clone() * a1.clone()
                        - k::<T>(6, 1) * c31.clone() * a1.clone() * a1.clone(),
                    c11 + k::<T>(4, 1) * c2 * a21.clone() - top.clone() * c31 * (a121 + k::<T>(2, 1) * a1 * a21),
                ]
            };
            let a1 = alpha(src, &[1])?;
            let ab1 = bar_alpha(src, &[1])?;
            let p1 = spinor(
                c("c^1_1"),
                c("c^1_2"),
                c("c^2"),
                c("c^3_1"),
                a1.clone(),
                alpha(src, &[2, 1])?,
                alpha(src, &[1, 2, 1])?,
            );
            let pb1 = spinor(
                cb("c^1_1"),
                cb("c^1_2"),
                cb("c^2"),
                cb("c^3_1"),
                ab1.clone(),
                bar_alpha(src, &[1, 2])?,
                bar_alpha(src, &[1, 2, 1])?,
            );
            let three = T::from_i64(3);
            let p2 = c("c^2") - three.clone() * c("c^3_1") * a1;
            let pb2 = cb("c^2") - three * cb("c^3_1") * ab1;
            Ok(p1.into_iter().chain(pb1).chain([p2, pb2]).collect())
        }
    }
}
