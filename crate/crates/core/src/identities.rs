//! Matrix elements of group elements, the alpha/theta ratios, and exact checks of
//! the first, second and generalized Jacobi identities and the appendix relations.
//!
//! Left and right translation derivatives are computed algebraically: each
//! generator `X` in a derivative word becomes a factor `(1 + e X)` next to `G`
//! with a nilpotent symbol `e`, and the derivative is the top jet coefficient.
//! Product order: `(W)_l f(G)` uses `(1+e_1 W_1)...(1+e_n W_n) G` and `(W)_r f(G)`
//! uses `G (1+e_1 W_1)...(1+e_n W_n)`, i.e. the word is inserted next to `G` as written.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use rand::Rng;
use serde::Serialize;

use crate::algebra::{check_root, Representation};
use crate::error::{Error, Result};
use crate::grading::GradingCase;
use crate::jet::Jet;
use crate::matrix::Matrix;
use crate::rng::{rng, Stream};
use crate::scalar::{rat, Magnitude, Rational, Scalar};

/// A group element in one fundamental representation.
#[derive(Clone, Debug)]
pub struct GroupElement<S> {
    pub label: u8,
    pub matrix: Matrix<S>,
    pub provenance: String,
}

/// `exp(t X)` with `X` one of the Chevalley raising/lowering generators.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub root: u8,
    pub raise: bool,
    pub t: Rational,
}

impl Factor {
    fn label(&self) -> String {
        format!(
            "exp({} {}{})",
            crate::scalar::rat_string(&self.t),
            if self.raise { "E" } else { "F" },
            self.root
        )
    }
}

const STEPS: [(i64, i64); 8] = [(1, 1), (-1, 1), (1, 2), (-1, 2), (1, 3), (-1, 3), (2, 1), (-2, 1)];

/// Factors drawn from `{E1,E2,F1,F2}` with `t` in `{±1, ±1/2, ±1/3, ±2}`.
pub fn sample_factors(seed: u64, length: usize) -> Vec<Factor> {
    let mut r = rng(seed, Stream::GroupFactors);
    (0..length)
        .map(|_| {
            let g: u8 = r.gen_range(0..4);
            let (n, d) = STEPS[r.gen_range(0..STEPS.len())];
            Factor {
                root: g % 2 + 1,
                raise: g < 2,
                t: rat(n, d),
            }
        })
        .collect()
}

pub fn element_from_factors(r: &Representation, factors: &[Factor]) -> Result<GroupElement<Rational>> {
    let mut m = Matrix::identity(r.dim);
    for f in factors {
        check_root(f.root)?;
        m = m.mul(&r.generator(f.root, f.raise).exp_nilpotent(&f.t)?);
    }
    let provenance = if factors.is_empty() {
        "identity".to_string()
    } else {
        factors.iter().map(Factor::label).collect::<Vec<_>>().join(" ")
    };
    Ok(GroupElement {
        label: r.label,
        matrix: m,
        provenance,
    })
}

/// Product of `length` unipotent factors; deterministic in `seed`.
pub fn sample_group_element(r: &Representation, seed: u64, length: usize) -> GroupElement<Rational> {
    element_from_factors(r, &sample_factors(seed, length)).expect("Chevalley generators are nilpotent")
}

/// The same sampled word evaluated in both fundamental representations.
pub fn sample_pair(reps: &[Representation; 2], seed: u64, length: usize) -> [Matrix<Rational>; 2] {
    let f = sample_factors(seed, length);
    [0, 1].map(|i| element_from_factors(&reps[i], &f).expect("nilpotent").matrix)
}

/// Torus element `D` with `D|v> = a_1^{w_1} a_2^{w_2} |v>` on weight vectors.
pub fn torus_element(r: &Representation, a: [&Rational; 2]) -> Matrix<Rational> {
    Matrix::from_fn(r.dim, r.dim, |i, j| {
        if i != j {
            return rat(0, 1);
        }
        let w = r.basis[i].weight;
        a[0].powi(w[0] as i32) * a[1].powi(w[1] as i32)
    })
}

/// Anything that can produce `<j| X^+_{bra} G X^-_{ket} |j>`.
pub trait ElementSource<S> {
    fn me(&self, j: u8, bra: &[u8], ket: &[u8]) -> Result<S>;

    fn diag(&self, j: u8) -> Result<S> {
        self.me(j, &[], &[])
    }
}

type VectorCache<S> = RefCell<HashMap<(u8, bool, Vec<u8>), Rc<Vec<S>>>>;
type GeneratorCache<S> = RefCell<HashMap<(u8, u8, bool), Rc<Matrix<S>>>>;

/// Memoised bra/ket coordinate vectors of both representations.
pub struct WordVectors<'a, S> {
    pub reps: &'a [Representation; 2],
    cache: VectorCache<S>,
    gens: GeneratorCache<S>,
}

impl<'a, S: Scalar> WordVectors<'a, S> {
    pub fn new(reps: &'a [Representation; 2]) -> Self {
        WordVectors {
            reps,
            cache: RefCell::new(HashMap::new()),
            gens: RefCell::new(HashMap::new()),
        }
    }

    fn vector(&self, j: u8, bra: bool, word: &[u8]) -> Result<Rc<Vec<S>>> {
        let idx = check_root(j)?;
        let key = (j, bra, word.to_vec());
        if let Some(v) = self.cache.borrow().get(&key) {
            return Ok(v.clone());
        }
        let r = &self.reps[idx];
        let v = if bra { r.bra(word)? } else { r.ket(word)? };
        let v: Rc<Vec<S>> = Rc::new(v.iter().map(S::from_rational).collect());
        self.cache.borrow_mut().insert(key, v.clone());
        Ok(v)
    }

    pub fn bra(&self, j: u8, word: &[u8]) -> Result<Rc<Vec<S>>> {
        self.vector(j, true, word)
    }

    pub fn ket(&self, j: u8, word: &[u8]) -> Result<Rc<Vec<S>>> {
        self.vector(j, false, word)
    }

    /// Generator matrix in representation `j`, converted to `S`.
    pub fn generator(&self, j: u8, root: u8, raise: bool) -> Result<Rc<Matrix<S>>> {
        let idx = check_root(j)?;
        check_root(root)?;
        let key = (j, root, raise);
        if let Some(m) = self.gens.borrow().get(&key) {
            return Ok(m.clone());
        }
        let m = Rc::new(self.reps[idx].generator(root, raise).map(S::from_rational));
        self.gens.borrow_mut().insert(key, m.clone());
        Ok(m)
    }
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// `G` given in both fundamental representations.
pub struct PairElement<'a, S> {
    pub vecs: &'a WordVectors<'a, S>,
    pub k: [Matrix<S>; 2],
}

impl<'a, S: Scalar> PairElement<'a, S> {
    pub fn new(vecs: &'a WordVectors<'a, S>, k: [Matrix<S>; 2]) -> Self {
        PairElement { vecs, k }
    }
}

impl<'a, S: Scalar> ElementSource<S> for PairElement<'a, S> {
    fn me(&self, j: u8, bra: &[u8], ket: &[u8]) -> Result<S> {
        let b = self.vecs.bra(j, bra)?;
        let k = self.vecs.ket(j, ket)?;
        Ok(dot(&b, &self.k[j as usize - 1].apply(&k)))
    }
}

/// A translated element `(1+e A_1)...(1+e A_m) G (1+e B_1)...(1+e B_n)` with
/// matrix-valued factors given per representation.
pub struct Translated<'a, 'b, S> {
    base: &'b PairElement<'a, S>,
    left: Vec<[Rc<Matrix<S>>; 2]>,
    right: Vec<[Rc<Matrix<S>>; 2]>,
}

/// A generator letter in a derivative word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gen {
    pub root: u8,
    pub raise: bool,
}

pub const fn up(root: u8) -> Gen {
    Gen { root, raise: true }
}

pub const fn down(root: u8) -> Gen {
    Gen { root, raise: false }
}

impl<'a, 'b, S: Scalar> Translated<'a, 'b, S> {
    pub fn with_matrices(
        base: &'b PairElement<'a, S>,
        left: Vec<[Rc<Matrix<S>>; 2]>,
        right: Vec<[Rc<Matrix<S>>; 2]>,
    ) -> Self {
        Translated { base, left, right }
    }

    pub fn with_generators(base: &'b PairElement<'a, S>, left: &[Gen], right: &[Gen]) -> Result<Self> {
        let conv = |g: &Gen| -> Result<[Rc<Matrix<S>>; 2]> {
            Ok([
                base.vecs.generator(1, g.root, g.raise)?,
                base.vecs.generator(2, g.root, g.raise)?,
            ])
        };
        Ok(Translated {
            base,
            left: left.iter().map(conv).collect::<Result<_>>()?,
            right: right.iter().map(conv).collect::<Result<_>>()?,
        })
    }

    pub fn nvars(&self) -> usize {
        self.left.len() + self.right.len()
    }
}

impl<'a, 'b, S: Scalar> ElementSource<Jet<S>> for Translated<'a, 'b, S> {
    fn me(&self, j: u8, bra: &[u8], ket: &[u8]) -> Result<Jet<S>> {
        let idx = check_root(j)?;
        let n = self.nvars();
        let mut b: Vec<Jet<S>> = self.base.vecs.bra(j, bra)?.iter().cloned().map(Jet::constant).collect();
        for (k, f) in self.left.iter().enumerate() {
            let m = &f[idx];
            let eps = Jet::symbol(k, n);
            let moved = jet_left_apply(&b, m);
            b = b.into_iter().zip(moved).map(|(x, y)| x + eps.clone() * y).collect();
        }
        let mut v: Vec<Jet<S>> = self.base.vecs.ket(j, ket)?.iter().cloned().map(Jet::constant).collect();
        for (k, f) in self.right.iter().enumerate().rev() {
            let m = &f[idx];
            let eps = Jet::symbol(self.left.len() + k, n);
            let moved = jet_apply(m, &v);
            v = v.into_iter().zip(moved).map(|(x, y)| x + eps.clone() * y).collect();
        }
        let kv = jet_apply(&self.base.k[idx], &v);
        Ok(dot(&b, &kv))
    }
}

fn jet_apply<S: Scalar>(m: &Matrix<S>, v: &[Jet<S>]) -> Vec<Jet<S>> {
    (0..m.rows())
        .map(|i| {
            let mut acc = Jet::zero();
            for (j, vj) in v.iter().enumerate() {
                let a = &m[(i, j)];
                if !a.is_zero() && !vj.is_zero() {
                    acc = acc + vj.clone() * Jet::constant(a.clone());
                }
            }
            acc
        })
        .collect()
}

fn jet_left_apply<S: Scalar>(v: &[Jet<S>], m: &Matrix<S>) -> Vec<Jet<S>> {
    (0..m.cols())
        .map(|j| {
            let mut acc = Jet::zero();
            for (i, vi) in v.iter().enumerate() {
                let a = &m[(i, j)];
                if !a.is_zero() && !vi.is_zero() {
                    acc = acc + vi.clone() * Jet::constant(a.clone());
                }
            }
            acc
        })
        .collect()
}

/// `(left)_l (right)_r f(G)`: mixed translation derivative of any expression in
/// matrix elements.
pub fn translation_derivative<S, F>(base: &PairElement<S>, left: &[Gen], right: &[Gen], f: F) -> Result<S>
where
    S: Scalar,
    F: Fn(&dyn ElementSource<Jet<S>>) -> Result<Jet<S>>,
{
    let t = Translated::with_generators(base, left, right)?;
    let n = t.nvars();
    Ok(f(&t)?.top(n))
}

/// Left derivative written as an operator string: `ops = [X_a, X_b]` means
/// `X_a (X_b f)`, the rightmost letter acting first.
pub fn left_ops(ops: &[Gen]) -> Vec<Gen> {
    ops.iter().rev().copied().collect()
}

fn nonzero<S: Scalar>(v: S, what: &str) -> Result<S> {
    if v.is_zero() {
        Err(Error::SingularElement(what.to_string()))
    } else {
        Ok(v)
    }
}

/// `<w_last| G X^-_{w} |w_last> / <w_last|G|w_last>` for a ket word as written.
pub fn alpha<S: Scalar>(src: &dyn ElementSource<S>, ket: &[u8]) -> Result<S> {
    let j = *ket.last().ok_or_else(|| Error::InvalidWord {
        word: vec![],
        reason: "alpha needs a nonempty word".into(),
    })?;
    let d = nonzero(src.diag(j)?, &format!("<{j}|G|{j}>"))?;
    Ok(src.me(j, &[], ket)? / d)
}

/// `<w_first| X^+_{w} G |w_first> / <w_first|G|w_first>` for a bra word as written.
pub fn bar_alpha<S: Scalar>(src: &dyn ElementSource<S>, bra: &[u8]) -> Result<S> {
    let j = *bra.first().ok_or_else(|| Error::InvalidWord {
        word: vec![],
        reason: "alpha needs a nonempty word".into(),
    })?;
    let d = nonzero(src.diag(j)?, &format!("<{j}|G|{j}>"))?;
    Ok(src.me(j, bra, &[])? / d)
}

/// `theta_j = prod_i <i|G|i>^{-K_ji}`.
pub fn theta<S: Scalar>(src: &dyn ElementSource<S>, p: u8, j: u8) -> Result<S> {
    let cd = crate::algebra::cartan_matrix(p)?;
    let mut acc = S::one();
    for i in [1u8, 2] {
        let d = nonzero(src.diag(i)?, &format!("<{i}|G|{i}>"))?;
        acc = acc * d.powi(-cd.kji(j, i) as i32);
    }
    Ok(acc)
}

/// Subscripts name the word as written: `alpha21 = <1|G X2^- X1^-|1>/<1|G|1>`,
/// `bar_alpha12 = <1|X1^+ X2^+ G|1>/<1|G|1>`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaTable<S> {
    pub alpha1: S,
    pub alpha2: S,
    pub bar_alpha1: S,
    pub bar_alpha2: S,
    pub alpha12: S,
    pub alpha21: S,
    pub bar_alpha12: S,
    pub bar_alpha21: S,
    pub theta1: S,
    pub theta2: S,
    pub g2: Option<G2Alphas<S>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct G2Alphas<S> {
    pub alpha112: S,
    pub alpha1112: S,
    pub alpha121: S,
    pub bar_alpha211: S,
    pub bar_alpha2111: S,
    pub bar_alpha121: S,
}

pub fn alpha_table<S: Scalar>(src: &dyn ElementSource<S>, p: u8) -> Result<AlphaTable<S>> {
    let g2 = if p == 3 {
        Some(G2Alphas {
            alpha112: alpha(src, &[1, 1, 2])?,
            alpha1112: alpha(src, &[1, 1, 1, 2])?,
            alpha121: alpha(src, &[1, 2, 1])?,
            bar_alpha211: bar_alpha(src, &[2, 1, 1])?,
            bar_alpha2111: bar_alpha(src, &[2, 1, 1, 1])?,
            bar_alpha121: bar_alpha(src, &[1, 2, 1])?,
        })
    } else {
        None
    };
    Ok(AlphaTable {
        alpha1: alpha(src, &[1])?,
        alpha2: alpha(src, &[2])?,
        bar_alpha1: bar_alpha(src, &[1])?,
        bar_alpha2: bar_alpha(src, &[2])?,
        alpha12: alpha(src, &[1, 2])?,
        alpha21: alpha(src, &[2, 1])?,
        bar_alpha12: bar_alpha(src, &[1, 2])?,
        bar_alpha21: bar_alpha(src, &[2, 1])?,
        theta1: theta(src, p, 1)?,
        theta2: theta(src, p, 2)?,
        g2,
    })
}

/// `sdet - theta_j`, where `sdet` of the 2x2 block with corner `<j|G|j>` is
/// `det / <j|G|j>^2`.
pub fn check_first_jacobi<S: Scalar>(src: &dyn ElementSource<S>, p: u8, j: u8) -> Result<S> {
    let a = src.me(j, &[j], &[j])?;
    let b = src.me(j, &[j], &[])?;
    let c = src.me(j, &[], &[j])?;
    let d = nonzero(src.diag(j)?, &format!("<{j}|G|{j}>"))?;
    let det = a * d.clone() - b * c;
    Ok(det / (d.clone() * d) - theta(src, p, j)?)
}

/// Barred and unbarred residuals of the rank-2 second Jacobi identity.
pub fn check_second_jacobi<S: Scalar>(src: &dyn ElementSource<S>, p: u8) -> Result<(S, S)> {
    let ps = S::from_i64(p as i64);
    let barred = bar_alpha(src, &[2, 1])? + ps.clone() * bar_alpha(src, &[1, 2])?
        - ps.clone() * bar_alpha(src, &[1])? * bar_alpha(src, &[2])?;
    let plain = alpha(src, &[1, 2])? + ps.clone() * alpha(src, &[2, 1])? - ps * alpha(src, &[1])? * alpha(src, &[2])?;
    Ok((barred, plain))
}

pub fn det3<S: Scalar>(src: &dyn ElementSource<S>, j: u8, bras: &[&[u8]; 3], kets: &[&[u8]; 3]) -> Result<S> {
    let mut m = [
        [S::zero(), S::zero(), S::zero()],
        [S::zero(), S::zero(), S::zero()],
        [S::zero(), S::zero(), S::zero()],
    ];
    for (a, bra) in bras.iter().enumerate() {
        for (b, ket) in kets.iter().enumerate() {
            m[a][b] = src.me(j, bra, ket)?;
        }
    }
    let t = |a: usize, b: usize, c: usize| m[0][a].clone() * m[1][b].clone() * m[2][c].clone();
    Ok(t(0, 1, 2) + t(1, 2, 0) + t(2, 0, 1) - t(2, 1, 0) - t(0, 2, 1) - t(1, 0, 2))
}

/// `Det3 - C(G)` over the highest-grade bra/ket bases of each case.
pub fn check_generalized_jacobi<S: Scalar>(src: &dyn ElementSource<S>, case: GradingCase) -> Result<S> {
    let g11 = || src.diag(1);
    match case {
        GradingCase::A2_10 | GradingCase::B2_10 | GradingCase::G2_10 => {
            let d = det3(src, 2, &[&[], &[2], &[2, 1]], &[&[], &[2], &[1, 2]])?;
            let closed = match case {
                GradingCase::A2_10 => S::one(),
                GradingCase::B2_10 => S::from_i64(2) * g11()?.powi(2),
                _ => S::from_i64(3) * g11()?.powi(4),
            };
            Ok(d - closed)
        }
        GradingCase::B2_01 => {
            let d = det3(src, 1, &[&[], &[1], &[1, 2]], &[&[], &[1], &[2, 1]])?;
            Ok(d - g11()?)
        }
        GradingCase::G2_01 => Err(Error::UnsupportedCase {
            op: "check_generalized_jacobi",
            case: case.to_string(),
        }),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedResidual<S> {
    pub name: String,
    pub residual: S,
}

/// Appendix I derivative relations for every `(i, q)`.
pub fn check_appendix1<S: Scalar + Magnitude>(base: &PairElement<S>, p: u8) -> Result<Vec<NamedResidual<S>>> {
    let cd = crate::algebra::cartan_matrix(p)?;
    let mut out = Vec::new();
    for i in [1u8, 2] {
        for q in [1u8, 2] {
            let th = theta(base, p, i)?;
            let kiq = S::from_i64(cd.kji(i, q));
            let delta = if i == q { th.clone() } else { S::zero() };

            let d = translation_derivative(base, &[], &[down(q)], |s| theta(s, p, i))?;
            out.push(NamedResidual {
                name: format!("(X-{q})_r theta{i} + theta{i} K{i}{q} alpha{q}"),
                residual: d + th.clone() * kiq.clone() * alpha(base, &[q])?,
            });
            let d = translation_derivative(base, &[up(q)], &[], |s| theta(s, p, i))?;
            out.push(NamedResidual {
                name: format!("(X+{q})_l theta{i} + theta{i} K{i}{q} bar_alpha{q}"),
                residual: d + th.clone() * kiq * bar_alpha(base, &[q])?,
            });
            let d = translation_derivative(base, &[], &[down(q)], |s| bar_alpha(s, &[i]))?;
            out.push(NamedResidual {
                name: format!("(X-{q})_r bar_alpha{i} - d{i}{q} theta{i}"),
                residual: d - delta.clone(),
            });
            let d = translation_derivative(base, &[up(q)], &[], |s| alpha(s, &[i]))?;
            out.push(NamedResidual {
                name: format!("(X+{q})_l alpha{i} - d{i}{q} theta{i}"),
                residual: d - delta,
            });
        }
    }
    Ok(out)
}

/// Constant coefficients `d1..d4, d^2` (and barred) of the G2(0,1) line operators.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct G2LineConstants<S> {
    pub d: [S; 4],
    pub dd: S,
    pub db: [S; 4],
    pub ddb: S,
}

impl G2LineConstants<Rational> {
    pub fn sample(seed: u64) -> Self {
        let mut r = rng(seed, Stream::AppendixConstants);
        let mut draw = || rat(r.gen_range(-9..=9), r.gen_range(1..=5));
        G2LineConstants {
            d: [draw(), draw(), draw(), draw()],
            dd: draw(),
            db: [draw(), draw(), draw(), draw()],
            ddb: draw(),
        }
    }
}

/// The symmetric spinor `(P_d, P_a, P_b, P_c) = (T111, T112, T122, T222)` built from
/// `d_i` and `sigma * d^2` times alpha ratios (`sigma = +1` is the printed line form).
pub fn g2_spinor<S: Scalar>(src: &dyn ElementSource<S>, d: &[S; 4], dd: &S) -> Result<[S; 4]> {
    let third = S::from_rational(&rat(1, 3));
    Ok([
        d[0].clone() + third.clone() * dd.clone() * alpha(src, &[1, 1, 1, 2])?,
        d[1].clone() + third * dd.clone() * alpha(src, &[1, 1, 2])?,
        d[2].clone() + S::from_rational(&rat(2, 3)) * dd.clone() * alpha(src, &[1, 2])?,
        d[3].clone() + S::from_i64(2) * dd.clone() * alpha(src, &[2])?,
    ])
}

/// Conjugate spinor from raising words.
pub fn g2_bar_spinor<S: Scalar>(src: &dyn ElementSource<S>, db: &[S; 4], ddb: &S) -> Result<[S; 4]> {
    let third = S::from_rational(&rat(1, 3));
    Ok([
        db[0].clone() + third.clone() * ddb.clone() * bar_alpha(src, &[2, 1, 1, 1])?,
        db[1].clone() + third * ddb.clone() * bar_alpha(src, &[2, 1, 1])?,
        db[2].clone() + S::from_rational(&rat(2, 3)) * ddb.clone() * bar_alpha(src, &[2, 1])?,
        db[3].clone() + S::from_i64(2) * ddb.clone() * bar_alpha(src, &[2])?,
    ])
}

/// `q_1 = P_a - 2 P_b a + P_c a^2`, `q_2 = P_d - 2 P_a a + P_b a^2` with `a = alpha1`
/// (or `bar_alpha1` for the conjugate line).
pub fn q_pair<S: Scalar>(t: &[S; 4], a: &S) -> [S; 2] {
    let two = S::from_i64(2);
    let a2 = a.clone() * a.clone();
    [
        t[1].clone() - two.clone() * t[2].clone() * a.clone() + t[3].clone() * a2.clone(),
        t[0].clone() - two * t[1].clone() * a.clone() + t[2].clone() * a2,
    ]
}

pub fn g2_q<S: Scalar>(src: &dyn ElementSource<S>, k: &G2LineConstants<S>) -> Result<[S; 2]> {
    let t = g2_spinor(src, &k.d, &k.dd)?;
    Ok(q_pair(&t, &alpha(src, &[1])?))
}

pub fn g2_q_bar<S: Scalar>(src: &dyn ElementSource<S>, k: &G2LineConstants<S>) -> Result<[S; 2]> {
    let t = g2_bar_spinor(src, &k.db, &k.ddb)?;
    Ok(q_pair(&t, &bar_alpha(src, &[1])?))
}

fn lift<S: Scalar>(k: &G2LineConstants<S>) -> G2LineConstants<Jet<S>> {
    let c = |x: &S| Jet::constant(x.clone());
    G2LineConstants {
        d: [c(&k.d[0]), c(&k.d[1]), c(&k.d[2]), c(&k.d[3])],
        dd: c(&k.dd),
        db: [c(&k.db[0]), c(&k.db[1]), c(&k.db[2]), c(&k.db[3])],
        ddb: c(&k.ddb),
    }
}

/// `P = p22_1 alpha1 - p22_2` with `p22 = (d4 + 2 d^2 alpha2, d3 + 2/3 d^2 alpha12)`.
pub fn g2_p_combination<S: Scalar>(src: &dyn ElementSource<S>, k: &G2LineConstants<S>) -> Result<S> {
    let t = g2_spinor(src, &k.d, &k.dd)?;
    Ok(t[3].clone() * alpha(src, &[1])? - t[2].clone())
}

/// Right derivative `((A X1^-X2^- + B X2^-X1^-) X1^-)_r` followed by `(X1^+)_r`
/// applied to `<1|G|1>^2`.
pub fn appendix2_annihilation<S: Scalar>(base: &PairElement<S>, a: &S, b: &S) -> Result<S> {
    let sq = |s: &dyn ElementSource<Jet<S>>| -> Result<Jet<S>> { Ok(s.diag(1)?.powi(2)) };
    let x = translation_derivative(base, &[], &[up(1), down(1), down(2), down(1)], sq)?;
    let y = translation_derivative(base, &[], &[up(1), down(2), down(1), down(1)], sq)?;
    Ok(a.clone() * x + b.clone() * y)
}

/// Appendix II relations for G2. Every residual is exactly zero.
pub fn check_appendix2<S: Scalar + Magnitude>(
    base: &PairElement<S>,
    k: &G2LineConstants<S>,
) -> Result<Vec<NamedResidual<S>>> {
    let mut out = Vec::new();
    let kj = lift(k);
    let mut push = |name: &str, residual: S| {
        out.push(NamedResidual {
            name: name.to_string(),
            residual,
        })
    };

    // (a) the line components are lowest/highest with respect to the red root
    for i in 0..2 {
        let r = translation_derivative(base, &[up(2)], &[], |s| Ok(g2_q(s, &kj)?[i].clone()))?;
        push(&format!("X+2 q{}", i + 1), r);
        let r = translation_derivative(base, &[], &[down(2)], |s| Ok(g2_q_bar(s, &kj)?[i].clone()))?;
        push(&format!("X-2 qbar{}", i + 1), r);
    }

    // (b) Det3 over <1|, <1|X1, <1|X1X2X1X1X2 and |1>, X1|1>, X2X1X1X2X1|1>
    let d = det3(base, 1, &[&[], &[1], &[1, 2, 1, 1, 2]], &[&[], &[1], &[2, 1, 1, 2, 1]])?;
    let sq = |s: &dyn ElementSource<Jet<S>>| -> Result<Jet<S>> { Ok(s.diag(1)?.powi(2)) };
    let mut tot = S::zero();
    for (cr, wr) in [(2, [1u8, 2, 1]), (-3, [2, 1, 1])] {
        for (cl, wl) in [(2, [1u8, 2, 1]), (-3, [1, 1, 2])] {
            let left: Vec<Gen> = wl.iter().map(|&i| up(i)).collect();
            let right: Vec<Gen> = wr.iter().map(|&i| down(i)).collect();
            tot = tot + S::from_i64(cr * cl) * translation_derivative(base, &left, &right, sq)?;
        }
    }
    let closed = tot * S::from_rational(&rat(1, 16)) + base.diag(1)?;
    push("Det3 - (1/16)(..)_r(..)_l <1|K|1>^2 - <1|K|1>", d - closed);
    push(
        "(X1+)_r ((2 X1X2 - 3 X2X1) X1)_r <1|K|1>^2",
        appendix2_annihilation(base, &S::from_i64(2), &S::from_i64(-3))?,
    );

    // (c) derivatives of q1 along raising words (operator strings, rightmost first)
    let th1 = theta(base, 3, 1)?;
    let th2 = theta(base, 3, 2)?;
    let pc = g2_p_combination(base, k)?;
    let t = g2_spinor(base, &k.d, &k.dd)?;
    let p221 = t[3].clone();
    let (ab1, ab2) = (bar_alpha(base, &[1])?, bar_alpha(base, &[2])?);
    let (ab21, ab12) = (bar_alpha(base, &[2, 1])?, bar_alpha(base, &[1, 2])?);
    let q1 = |s: &dyn ElementSource<Jet<S>>| -> Result<Jet<S>> { Ok(g2_q(s, &kj)?[0].clone()) };
    let two = S::from_i64(2);
    let four = S::from_i64(4);

    let d = translation_derivative(base, &left_ops(&[up(1)]), &[], q1)?;
    push("(X1+ q1) - 2 theta1 P", d - two.clone() * th1.clone() * pc.clone());

    let d = translation_derivative(base, &left_ops(&[up(2)]), &[], |s| g2_p_combination(s, &kj))?;
    push("X2+ P", d);

    let d = translation_derivative(base, &left_ops(&[up(2), up(1)]), &[], q1)?;
    push(
        "(X2+X1+ q1) - 2 theta1 ab2 P",
        d - two.clone() * th1.clone() * ab2.clone() * pc.clone(),
    );

    let d = translation_derivative(base, &left_ops(&[up(1), up(1)]), &[], q1)?;
    let rhs =
        two.clone() * th1.clone() * th1.clone() * p221.clone() - four.clone() * th1.clone() * ab1.clone() * pc.clone();
    push("(X1+X1+ q1) - 2 theta1^2 p22_1 + 4 theta1 ab1 P", d - rhs);

    let d = translation_derivative(base, &left_ops(&[up(1), up(2), up(1)]), &[], q1)?;
    let rhs = two.clone() * th1.clone() * (ab21 - two.clone() * ab1.clone() * ab2.clone()) * pc.clone()
        + two * th1.clone() * th1.clone() * ab2.clone() * p221.clone();
    push("(X1+X2+X1+ q1) - formula", d - rhs);

    let d = translation_derivative(base, &left_ops(&[up(2), up(1), up(1)]), &[], q1)?;
    let rhs = four.clone() * th1.clone() * th1.clone() * ab2.clone() * p221
        + four.clone() * k.dd.clone() * th1.clone() * th1.clone() * th2
        - four.clone() * th1.clone() * ab1 * ab2 * pc.clone()
        - four * th1 * ab12 * pc;
    push("(X2+X1+X1+ q1) - formula", d - rhs);

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fundamental_pair;

    fn zero(x: &Rational) -> bool {
        Scalar::is_zero(x)
    }

    #[test]
    fn identity_element_basics() {
        let reps = fundamental_pair(1).unwrap();
        let vecs = WordVectors::<Rational>::new(&reps);
        let id = PairElement::new(&vecs, [Matrix::identity(3), Matrix::identity(3)]);
        assert_eq!(id.me(2, &[], &[]).unwrap(), rat(1, 1));
        assert_eq!(id.me(2, &[2], &[]).unwrap(), rat(0, 1));
        let t = alpha_table(&id, 1).unwrap();
        assert!(zero(&t.alpha1) && zero(&t.bar_alpha21));
        assert_eq!(t.theta1, rat(1, 1));
        assert_eq!(t.theta2, rat(1, 1));
    }

    #[test]
    fn exp_f1_matrix_element() {
        let reps = fundamental_pair(1).unwrap();
        let a = rat(3, 7);
        let g = reps[0].f(1).exp_nilpotent(&a).unwrap();
        let vecs = WordVectors::<Rational>::new(&reps);
        let pe = PairElement::new(&vecs, [g, Matrix::identity(3)]);
        // <1| exp(aF1) X1^-|1> = 0, <1|X1^+ exp(aF1)|1> = a * norm
        assert_eq!(pe.me(1, &[], &[1]).unwrap(), rat(0, 1));
        assert_eq!(pe.me(1, &[1], &[]).unwrap(), a * reps[0].norms[1].clone());
    }

    #[test]
    fn sampling_is_deterministic() {
        let reps = fundamental_pair(1).unwrap();
        let a = sample_group_element(&reps[1], 42, 6);
        let b = sample_group_element(&reps[1], 42, 6);
        assert_eq!(a.matrix, b.matrix);
        assert_eq!(a.provenance, b.provenance);
        assert_eq!(sample_group_element(&reps[1], 1, 0).matrix, Matrix::identity(3));
        assert_eq!(a.matrix.det(), rat(1, 1));
    }

    #[test]
    fn single_factor_is_truncated_exponential() {
        let reps = fundamental_pair(1).unwrap();
        let f = Factor {
            root: 1,
            raise: false,
            t: rat(1, 2),
        };
        let g = element_from_factors(&reps[0], &[f]).unwrap();
        let expect = Matrix::identity(3).add(&reps[0].f(1).scale(&rat(1, 2)));
        assert_eq!(g.matrix, expect);
    }

    #[test]
    fn theta1_closed_form() {
        for p in 1..=3 {
            let reps = fundamental_pair(p).unwrap();
            let vecs = WordVectors::<Rational>::new(&reps);
            let pe = PairElement::new(&vecs, sample_pair(&reps, 5, 10));
            let th = theta(&pe, p, 1).unwrap();
            let g1 = pe.diag(1).unwrap();
            assert_eq!(th, pe.diag(2).unwrap() / (g1.clone() * g1));
        }
    }

    #[test]
    fn a2_first_jacobi_two_factor_example() {
        let reps = fundamental_pair(1).unwrap();
        let f = [
            Factor {
                root: 1,
                raise: false,
                t: rat(2, 1),
            },
            Factor {
                root: 2,
                raise: false,
                t: rat(-1, 3),
            },
            Factor {
                root: 1,
                raise: true,
                t: rat(1, 2),
            },
        ];
        let k = [0, 1].map(|i| element_from_factors(&reps[i], &f).unwrap().matrix);
        let vecs = WordVectors::<Rational>::new(&reps);
        let pe = PairElement::new(&vecs, k);
        assert!(zero(&check_first_jacobi(&pe, 1, 1).unwrap()));
        assert!(zero(&check_first_jacobi(&pe, 1, 2).unwrap()));
    }

    #[test]
    fn singular_element_is_reported() {
        let reps = fundamental_pair(1).unwrap();
        let vecs = WordVectors::<Rational>::new(&reps);
        let z = PairElement::new(&vecs, [Matrix::zeros(3, 3), Matrix::zeros(3, 3)]);
        assert!(matches!(alpha_table(&z, 1), Err(Error::SingularElement(_))));
    }

    #[test]
    fn generalized_jacobi_constants_at_identity() {
        for case in [
            GradingCase::A2_10,
            GradingCase::B2_10,
            GradingCase::B2_01,
            GradingCase::G2_10,
        ] {
            let reps = fundamental_pair(case.p()).unwrap();
            let vecs = WordVectors::<Rational>::new(&reps);
            let id = PairElement::new(&vecs, [Matrix::identity(reps[0].dim), Matrix::identity(reps[1].dim)]);
            assert!(zero(&check_generalized_jacobi(&id, case).unwrap()), "{case}");
        }
    }

    #[test]
    fn swapped_appendix2_labelling_is_not_annihilated() {
        let reps = fundamental_pair(3).unwrap();
        let vecs = WordVectors::<Rational>::new(&reps);
        let pe = PairElement::new(&vecs, sample_pair(&reps, 11, 12));
        let good = appendix2_annihilation(&pe, &rat(2, 1), &rat(-3, 1)).unwrap();
        let swapped = appendix2_annihilation(&pe, &rat(-3, 1), &rat(2, 1)).unwrap();
        assert!(zero(&good));
        assert!(!zero(&swapped));
    }
}
