//! The five closed systems as (left side, right side) pairs per scalar equation.

use serde::Serialize;

use crate::dynamics::multiplets::{det2, inv2, multiplet_names, multiplets, CoefVals, Variant, G2_01_DD_SIGN};
use crate::error::Result;
use crate::grading::GradingCase;
use crate::identities::ElementSource;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// What the left side differentiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Lhs {
    /// Entry `(i, j)` of `(u^-1 u_x)_y`.
    Maurer { i: usize, j: usize },
    /// Entry `(i, j)` of `u (u^-1 u_x)_y`.
    UMaurer { i: usize, j: usize },
    /// `d/dx` of field `f`.
    Dx { f: usize },
    /// `d/dy` of field `f`.
    Dy { f: usize },
}

/// Certified equations gate pass/fail; printed ones are the displayed readings
/// that calibration replaced, reported for comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Certified,
    Printed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Equation {
    pub name: String,
    pub lhs: Lhs,
    pub role: Role,
}

fn eq(name: impl Into<String>, lhs: Lhs, role: Role) -> Equation {
    Equation {
        name: name.into(),
        lhs,
        role,
    }
}

/// Field names: the calibrated multiplets, then (for G2 cases) the printed ones.
pub fn field_names(case: GradingCase) -> Vec<String> {
    let base = multiplet_names(case);
    let mut out: Vec<String> = base.iter().map(|s| s.to_string()).collect();
    if has_printed_fields(case) {
        out.extend(base.iter().map(|s| format!("{s}_printed")));
    }
    out
}

fn has_printed_fields(case: GradingCase) -> bool {
    matches!(case, GradingCase::G2_01 | GradingCase::G2_10)
}

pub fn fields<T: Scalar>(case: GradingCase, src: &dyn ElementSource<T>, cv: &CoefVals<T>) -> Result<Vec<T>> {
    let mut out = multiplets(case, Variant::Calibrated, src, cv)?;
    if has_printed_fields(case) {
        out.extend(multiplets(case, Variant::Printed, src, cv)?);
    }
    Ok(out)
}

fn field(case: GradingCase, name: &str, printed: bool) -> usize {
    let names = multiplet_names(case);
    let i = names.iter().position(|n| *n == name).expect("multiplet name");
    if printed {
        i + names.len()
    } else {
        i
    }
}

fn u_components(prefix: &str, umaurer: bool, role: Role, only: Option<(usize, usize)>) -> Vec<Equation> {
    let mut out = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            if only.is_some_and(|o| o != (i, j)) {
                continue;
            }
            let lhs = if umaurer {
                Lhs::UMaurer { i, j }
            } else {
                Lhs::Maurer { i, j }
            };
            out.push(eq(format!("{prefix}[{}{}]", i + 1, j + 1), lhs, role));
        }
    }
    out
}

/// Equations in the order [`rhs`] returns their right sides.
pub fn equations(case: GradingCase) -> Vec<Equation> {
    use Role::*;
    let f = |n: &str| field(case, n, false);
    let fp = |n: &str| field(case, n, true);
    match case {
        GradingCase::A2_10 => {
            let mut v = u_components("A2", false, Certified, None);
            v.extend(u_components("A2 printed X=c2cb2", false, Printed, Some((1, 1))));
            v
        }
        GradingCase::B2_10 => {
            let mut v = u_components("B2", true, Certified, None);
            v.push(eq("UB2 (p1)_y", Lhs::Dy { f: f("p1") }, Certified));
            v.push(eq("UB2 (p2)_y", Lhs::Dy { f: f("p2") }, Certified));
            v.push(eq("UB2 (pb1)_x", Lhs::Dx { f: f("pb1") }, Certified));
            v.push(eq("UB2 (pb2)_x", Lhs::Dx { f: f("pb2") }, Certified));
            v
        }
        GradingCase::B2_01 => u_components("B21", false, Certified, None),
        GradingCase::G2_01 => {
            let mut v = u_components("BE", true, Certified, None);
            for i in (1..=4).rev() {
                v.push(eq(
                    format!("BLE (pb{i})_x"),
                    Lhs::Dx {
                        f: f(&format!("pb{i}")),
                    },
                    Certified,
                ));
            }
            for i in (1..=4).rev() {
                v.push(eq(
                    format!("BLE conj (p{i})_y"),
                    Lhs::Dy { f: f(&format!("p{i}")) },
                    Certified,
                ));
            }
            v.extend(u_components("BE printed", true, Printed, None));
            for i in (1..=4).rev() {
                v.push(eq(
                    format!("BLE printed (pb{i})_x"),
                    Lhs::Dx {
                        f: fp(&format!("pb{i}")),
                    },
                    Printed,
                ));
            }
            v
        }
        GradingCase::G2_10 => {
            let mut v = u_components("HV", true, Certified, None);
            v.push(eq("LLL (pb1_1)_x", Lhs::Dx { f: f("pb1_1") }, Certified));
            v.push(eq("LLL (pb1_2)_x", Lhs::Dx { f: f("pb1_2") }, Certified));
            v.push(eq("LLL (pb2)_x", Lhs::Dx { f: f("pb2") }, Certified));
            v.push(eq("LLL conj (p1_1)_y", Lhs::Dy { f: f("p1_1") }, Certified));
            v.push(eq("LLL conj (p1_2)_y", Lhs::Dy { f: f("p1_2") }, Certified));
            v.push(eq("LLL conj (p2)_y", Lhs::Dy { f: f("p2") }, Certified));
            v.extend(u_components("HV printed", true, Printed, None));
            v.push(eq("LLL printed (pb1_1)_x", Lhs::Dx { f: fp("pb1_1") }, Printed));
            v.push(eq("LLL printed (pb1_2)_x", Lhs::Dx { f: fp("pb1_2") }, Printed));
            v
        }
    }
}

/// Everything a right side may use at one node.
#[derive(Clone, Debug)]
pub struct NodeVals<S> {
    pub u: Matrix<S>,
    /// Real cube root of `det u` (G2(1,0) only; otherwise unused).
    pub cbrt_det: S,
    pub fields: Vec<S>,
    pub c: CoefVals<S>,
}

fn outer<S: Scalar>(a: &[S; 2], b: &[S; 2]) -> Matrix<S> {
    Matrix::from_fn(2, 2, |i, j| a[i].clone() * b[j].clone())
}

fn flat<S: Scalar>(m: &Matrix<S>) -> Vec<S> {
    m.data().to_vec()
}

fn n<S: Scalar>(v: i64) -> S {
    S::from_i64(v)
}

/// Symmetric rank-3 spinor `T[i][j][k] = P[i + j + k]`.
fn spinor_tensor<S: Scalar>(p: &[S]) -> impl Fn(usize, usize, usize) -> S + '_ {
    move |i, j, k| p[i + j + k].clone()
}

/// `sum (-1)^(i+j+k+l) u_ij u_kl Tb[1-a][i][k] T[1-b][j][l]`, the calibrated BE bilinear.
fn be_bilinear<S: Scalar>(u: &Matrix<S>, pb: &[S], p: &[S], printed: bool) -> Matrix<S> {
    let tb = spinor_tensor(pb);
    let t = spinor_tensor(p);
    // printed pairing: p^11 = (Pa, Pd), p^12 = p^21 = (Pa, Pb), p^22 = (Pc, Pb)
    let printed_pair = |q: &[S], j: usize, l: usize, b: usize| -> S {
        match (j + l, b) {
            (0, 0) => q[1].clone(),
            (0, 1) => q[0].clone(),
            (1, 0) => q[1].clone(),
            (1, 1) => q[2].clone(),
            (2, 0) => q[3].clone(),
            (2, 1) => q[2].clone(),
            _ => unreachable!(),
        }
    };
    Matrix::from_fn(2, 2, |a, b| {
        let mut acc = S::zero();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let (x, y) = if printed {
                            (printed_pair(pb, i, k, a), printed_pair(p, j, l, b))
                        } else {
                            (tb(1 - a, i, k), t(1 - b, j, l))
                        };
                        let term = u[(i, j)].clone() * u[(k, l)].clone() * x * y;
                        acc = if (i + j + k + l) % 2 == 0 {
                            acc + term
                        } else {
                            acc - term
                        };
                    }
                }
            }
        }
        acc
    })
}

/// The four BLE right sides `[(pb4)_x, (pb3)_x, (pb2)_x, (pb1)_x]` divided by `f`.
/// With `u -> u^T` and the bars swapped this is the conjugate y-system.
fn ble<S: Scalar>(u: &Matrix<S>, p: &[S], printed: bool) -> [S; 4] {
    let (u11, u12, u21, u22) = (
        u[(0, 0)].clone(),
        u[(0, 1)].clone(),
        u[(1, 0)].clone(),
        u[(1, 1)].clone(),
    );
    let (p1, p2, p3, p4) = (p[0].clone(), p[1].clone(), p[2].clone(), p[3].clone());
    let c = |a: &S, b: &S, d: &S| a.clone() * b.clone() * d.clone();
    let three: S = n(3);
    let two: S = n(2);
    let third_line_last = if printed {
        c(&u11, &u12, &u21)
    } else {
        c(&u11, &u12, &u22)
    };
    [
        p1.clone() * c(&u11, &u11, &u11) - three.clone() * p2.clone() * c(&u11, &u11, &u12)
            + three.clone() * p3.clone() * c(&u11, &u12, &u12)
            - p4.clone() * c(&u12, &u12, &u12),
        p1.clone() * c(&u11, &u11, &u21) - p2.clone() * (c(&u11, &u11, &u22) + two.clone() * c(&u11, &u21, &u12))
            + p3.clone() * (two.clone() * third_line_last + c(&u12, &u12, &u21))
            - p4.clone() * c(&u12, &u12, &u22),
        p1.clone() * c(&u11, &u21, &u21) - p2.clone() * (c(&u21, &u21, &u12) + two.clone() * c(&u11, &u21, &u22))
            + p3.clone() * (two * c(&u22, &u12, &u21) + c(&u22, &u22, &u11))
            - p4.clone() * c(&u22, &u22, &u12),
        p1 * c(&u21, &u21, &u21) - three.clone() * p2 * c(&u21, &u21, &u22) + three * p3 * c(&u21, &u22, &u22)
            - p4 * c(&u22, &u22, &u22),
    ]
}

/// Right sides in [`equations`] order.
pub fn rhs<S: Scalar>(case: GradingCase, v: &NodeVals<S>) -> Vec<S> {
    let u = &v.u;
    let det = det2(u);
    let fld = |name: &str, printed: bool| v.fields[field(case, name, printed)].clone();
    let cp = |i: usize| v.c.plain[i].clone();
    let cb = |i: usize| v.c.bar[i].clone();
    match case {
        GradingCase::A2_10 => {
            let (c1, c2, cb1, cb2) = (cp(0), cp(1), cb(0), cb(1));
            let m = |x: S| {
                let m = Matrix::from_rows(vec![
                    vec![c2.clone() * cb2.clone(), c1.clone() * cb2.clone()],
                    vec![c2.clone() * cb1.clone(), x],
                ]);
                inv2(u).mul(&m).scale(&(S::one() / det.clone()))
            };
            let mut out = flat(&m(c1.clone() * cb1.clone()));
            out.push(m(c2.clone() * cb2.clone())[(1, 1)].clone());
            out
        }
        GradingCase::B2_10 => {
            let (c2, cb2) = (cp(2), cb(2));
            let (p1, p2, pb1, pb2) = (fld("p1", false), fld("p2", false), fld("pb1", false), fld("pb2", false));
            let two: S = n(2);
            let m = outer(&[pb1.clone(), pb2.clone()], &[p1.clone(), p2.clone()])
                .scale(&two)
                .add(&u.scale(&(n::<S>(4) * c2.clone() * cb2.clone() / det.clone())));
            let mut out = flat(&m);
            let fy = two.clone() * c2 / det.clone();
            let fx = two * cb2 / det;
            out.push(fy.clone() * (u[(0, 0)].clone() * pb2.clone() - u[(1, 0)].clone() * pb1.clone()));
            out.push(fy * (u[(0, 1)].clone() * pb2 - u[(1, 1)].clone() * pb1));
            out.push(fx.clone() * (u[(0, 0)].clone() * p2.clone() - u[(0, 1)].clone() * p1.clone()));
            out.push(fx * (u[(1, 0)].clone() * p2 - u[(1, 1)].clone() * p1));
            out
        }
        GradingCase::B2_01 => {
            let (d1, d2, d3) = (cp(0), cp(1), cp(2));
            let (db1, db2, db3) = (cb(0), cb(1), cb(2));
            let left = Matrix::from_rows(vec![vec![db2.clone(), -db3], vec![db1, -db2]]);
            let right = Matrix::from_rows(vec![vec![d2.clone(), d1], vec![-d3, -d2]]);
            flat(&inv2(u).mul(&left).mul(u).mul(&right).scale(&(S::one() / det)))
        }
        GradingCase::G2_01 => {
            let sigma: S = n(G2_01_DD_SIGN);
            let (dd, ddb) = (cp(4), cb(4));
            let names =
                |pre: &str, printed: bool| -> Vec<S> { (1..=4).map(|i| fld(&format!("{pre}{i}"), printed)).collect() };
            let (p, pb) = (names("p", false), names("pb", false));
            let (pp, pbp) = (names("p", true), names("pb", true));
            let last = u.scale(&(n::<S>(4) * dd.clone() * ddb.clone() / det.clone()));
            let inv_det = S::one() / det.clone();
            let mut out = flat(&be_bilinear(u, &pb, &p, false).scale(&inv_det).add(&last));
            let f = n::<S>(2) * sigma.clone() * ddb.clone() / (det.clone() * det.clone());
            out.extend(ble(u, &p, false).into_iter().map(|x| f.clone() * x));
            let fc = n::<S>(2) * sigma * dd / (det.clone() * det.clone());
            out.extend(ble(&u.transpose(), &pb, false).into_iter().map(|x| fc.clone() * x));
            out.extend(flat(&be_bilinear(u, &pbp, &pp, true).scale(&inv_det).add(&last)));
            let fpr = n::<S>(2) * ddb / (det.clone() * det);
            out.extend(ble(u, &pp, true).into_iter().map(|x| fpr.clone() * x));
            out
        }
        GradingCase::G2_10 => {
            let cb3 = [cb(3), cb(4)];
            let c3 = [cp(3), cp(4)];
            let cbrt = v.cbrt_det.clone();
            let eps = Matrix::from_rows(vec![vec![S::zero(), S::one()], vec![-S::one(), S::zero()]]);
            let vec2 = |a: Vec<S>| [a[0].clone(), a[1].clone()];
            let mut out = Vec::new();
            for printed in [false, true] {
                let p1 = [fld("p1_1", printed), fld("p1_2", printed)];
                let pb1 = [fld("pb1_1", printed), fld("pb1_2", printed)];
                let (p2, pb2) = (fld("p2", printed), fld("pb2", printed));
                let ucb3 = vec2(u.apply(&cb3));
                let c3u = vec2(u.left_apply(&c3));
                let (k3, k72): (i64, i64) = if printed { (18, 0) } else { (36, 72) };
                let hv = outer(&pb1, &p1)
                    .scale(&(n::<S>(3) * cbrt.clone()))
                    .add(&u.scale(&(n::<S>(12) * pb2.clone() * p2.clone() / cbrt.clone())))
                    .add(&outer(&ucb3, &c3u).scale(&(n::<S>(k3) / det.clone())))
                    .add(&outer(&vec2(eps.apply(&cb3)), &vec2(eps.apply(&c3))).scale(&n(k72)));
                let inv23 = S::one() / (cbrt.clone() * cbrt.clone());
                let inv13 = S::one() / cbrt.clone();
                let uep = vec2(u.mul(&eps).apply(&p1));
                let utepb = vec2(u.transpose().mul(&eps).apply(&pb1));
                let ecb3 = vec2(eps.apply(&cb3));
                let ec3 = vec2(eps.apply(&c3));
                let (k4, k12): (i64, i64) = if printed { (1, 0) } else { (4, 12) };
                let pb1x: Vec<S> = (0..2)
                    .map(|i| {
                        n::<S>(k4) * inv23.clone() * pb2.clone() * uep[i].clone()
                            - n::<S>(k12) * inv13.clone() * p2.clone() * ecb3[i].clone()
                    })
                    .collect();
                if printed {
                    out.extend(flat(&hv));
                    out.extend(pb1x);
                    continue;
                }
                let p1y: Vec<S> = (0..2)
                    .map(|i| {
                        n::<S>(k4) * inv23.clone() * p2.clone() * utepb[i].clone()
                            - n::<S>(k12) * inv13.clone() * pb2.clone() * ec3[i].clone()
                    })
                    .collect();
                let dot = |a: &[S; 2], b: &[S; 2]| a[0].clone() * b[0].clone() + a[1].clone() * b[1].clone();
                let pb2x = -(n::<S>(3) * inv23.clone() * dot(&cb3, &uep));
                let p2y = -(n::<S>(3) * inv23.clone() * dot(&c3, &utepb));
                out.extend(flat(&hv));
                out.extend(pb1x);
                out.push(pb2x);
                out.extend(p1y);
                out.push(p2y);
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equation_and_rhs_counts_agree() {
        for case in GradingCase::ALL {
            let nf = field_names(case).len();
            let ns = crate::dynamics::coefficients::slots(case).len();
            let v = NodeVals {
                u: Matrix::from_rows(vec![vec![2.0, 0.5], vec![-0.25, 1.5]]),
                cbrt_det: 1.5f64.cbrt(),
                fields: (0..nf).map(|i| 0.1 * i as f64).collect(),
                c: CoefVals {
                    plain: vec![0.3; ns],
                    bar: vec![-0.7; ns],
                },
            };
            assert_eq!(rhs(case, &v).len(), equations(case).len(), "{case}");
        }
    }

    #[test]
    fn printed_be_pairing_differs() {
        let u = Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let p = [1.0, 2.0, 3.0, 4.0];
        let a = be_bilinear(&u, &p, &p, false);
        let b = be_bilinear(&u, &p, &p, true);
        assert!(a.sub(&b).max_abs() > 0.0);
    }
}
