//! The `L±` operators of each graded system.

use std::fmt;

use serde::Serialize;

use crate::algebra::{Representation, RootWord};
use crate::dynamics::coefficients::{barred, CoefficientFn, CoefficientSet};
use crate::error::{Error, Result};
use crate::grading::GradingCase;
use crate::matrix::Matrix;
use crate::scalar::{rat, rat_to_f64, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    /// `M+_y = (B0 + L+) M+`, raising generators, barred coefficients of `y`.
    Plus,
    /// `M-_x = M- (A0 + L-)`, lowering generators, unbarred coefficients of `x`.
    Minus,
}

impl Side {
    pub fn raise(self) -> bool {
        self == Side::Plus
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LTerm {
    pub factor: Rational,
    pub slot: String,
    pub word: RootWord,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LOperatorSpec {
    pub case: GradingCase,
    pub side: Side,
    pub terms: Vec<LTerm>,
}

/// `L+` as displayed: (numeric factor, unbarred slot, raising word).
fn plus_table(case: GradingCase) -> Vec<((i64, i64), &'static str, &'static str)> {
    match case {
        GradingCase::A2_10 => vec![((1, 1), "c1", "1"), ((1, 1), "c2", "[2,1]")],
        GradingCase::B2_10 => vec![
            ((1, 1), "c1", "1"),
            ((1, 1), "c2", "[2,1]"),
            ((1, 1), "c^2", "[[2,1],1]"),
        ],
        GradingCase::B2_01 => vec![
            ((1, 1), "d1", "2"),
            ((1, 1), "d2", "[1,2]"),
            ((1, 2), "d3", "[1,[1,2]]"),
        ],
        GradingCase::G2_01 => vec![
            ((1, 1), "d1", "2"),
            ((1, 1), "d2", "[1,2]"),
            ((1, 2), "d3", "[1,[1,2]]"),
            ((1, 6), "d4", "[1,[1,[1,2]]]"),
            ((1, 3), "d^2", "[2,[1,[1,[1,2]]]]"),
        ],
        GradingCase::G2_10 => vec![
            ((1, 1), "c^1_1", "1"),
            ((1, 1), "c^1_2", "[1,2]"),
            ((1, 1), "c^2", "[1,[1,2]]"),
            ((1, 1), "c^3_1", "[1,[1,[1,2]]]"),
            ((1, 1), "c^3_2", "[2,[1,[1,[1,2]]]]"),
        ],
    }
}

/// Build `L+` (barred slots, raising words) or `L-` (unbarred slots, transposed
/// lowering words). `gauge` drops the `c^3_2` term of G2(1,0).
pub fn build_l_operator(case: GradingCase, side: Side, coeffs: &CoefficientSet, gauge: bool) -> Result<LOperatorSpec> {
    if coeffs.case != case {
        return Err(Error::Config(format!(
            "coefficients are for {}, not {case}",
            coeffs.case
        )));
    }
    let mut terms = Vec::new();
    for ((n, d), slot, word) in plus_table(case) {
        let slot = match side {
            Side::Plus => barred(slot),
            Side::Minus => slot.to_string(),
        };
        if gauge && case == GradingCase::G2_10 && slot.starts_with("c") && slot.ends_with("^3_2") {
            if coeffs.fns.get(&slot).is_some_and(|f| !f.is_zero()) {
                return Err(Error::Config(format!(
                    "gauge c^3_2 = 0 conflicts with nonzero `{slot}`"
                )));
            }
            continue;
        }
        coeffs.get(&slot)?;
        let w = RootWord::parse(word)?;
        terms.push(LTerm {
            factor: rat(n, d),
            slot,
            word: match side {
                Side::Plus => w,
                Side::Minus => w.transposed(),
            },
        });
    }
    Ok(LOperatorSpec { case, side, terms })
}

impl LOperatorSpec {
    /// Word matrices in a representation, ready for repeated evaluation.
    pub fn compile(&self, r: &Representation, coeffs: &CoefficientSet) -> Result<CompiledL> {
        let raise = self.side.raise();
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok((
                    rat_to_f64(&t.factor),
                    coeffs.get(&t.slot)?.clone(),
                    t.word.matrix(r, raise).to_f64(),
                ))
            })
            .collect::<Result<_>>()?;
        Ok(CompiledL { dim: r.dim, terms })
    }

    /// Exact matrix with every slot replaced by the given rational values.
    pub fn exact_matrix(&self, r: &Representation, values: impl Fn(&str) -> Rational) -> Matrix<Rational> {
        self.matrix_with(r, values)
    }

    /// Matrix over any scalar type, slot values supplied by name.
    pub fn matrix_with<S: Scalar>(&self, r: &Representation, values: impl Fn(&str) -> S) -> Matrix<S> {
        let raise = self.side.raise();
        self.terms.iter().fold(Matrix::zeros(r.dim, r.dim), |acc, t| {
            let k = S::from_rational(&t.factor) * values(&t.slot);
            acc.add(&t.word.matrix(r, raise).map(S::from_rational).scale(&k))
        })
    }
}

impl fmt::Display for LOperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let raise = self.side.raise();
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                format!(
                    "{} {} {}",
                    crate::scalar::rat_string(&t.factor),
                    t.slot,
                    t.word.label(raise)
                )
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Debug)]
pub struct CompiledL {
    dim: usize,
    terms: Vec<(f64, CoefficientFn, Matrix<f64>)>,
}

impl CompiledL {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, t: f64) -> Matrix<f64> {
        self.terms
            .iter()
            .fold(Matrix::zeros(self.dim, self.dim), |acc, (k, f, m)| {
                acc.add(&m.scale(&(k * f.value(t))))
            })
    }
}

/// Grade-zero part `A0(x)` or `B0(y)`: Cartan-valued, `a_1(t) h_1 + a_2(t) h_2`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Grade0 {
    pub h: [Option<CoefficientFn>; 2],
}

impl Grade0 {
    pub fn is_zero(&self) -> bool {
        self.h.iter().all(|f| f.as_ref().is_none_or(|f| f.is_zero()))
    }

    pub fn at(&self, r: &Representation, t: f64) -> Matrix<f64> {
        let mut m = Matrix::zeros(r.dim, r.dim);
        for (i, f) in self.h.iter().enumerate() {
            if let Some(f) = f {
                m = m.add(&r.h(i as u8 + 1).to_f64().scale(&f.value(t)));
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fundamental_pair;
    use crate::grading::grading_operator;

    #[test]
    fn a2_minus_side_display() {
        let c = CoefficientSet::zeros(GradingCase::A2_10);
        let l = build_l_operator(GradingCase::A2_10, Side::Minus, &c, false).unwrap();
        assert_eq!(l.to_string(), "1/1 c1 X-1 + 1/1 c2 [X-1,X-2]");
        let l = build_l_operator(
            GradingCase::B2_10,
            Side::Plus,
            &CoefficientSet::zeros(GradingCase::B2_10),
            false,
        )
        .unwrap();
        assert_eq!(l.terms[2].word.label(true), "[[X+2,X+1],X+1]");
    }

    #[test]
    fn missing_slot_is_error() {
        let c = CoefficientSet::new(GradingCase::B2_01).set("d1", CoefficientFn::zero());
        assert!(matches!(
            build_l_operator(GradingCase::B2_01, Side::Minus, &c, false),
            Err(Error::MissingCoefficient(_))
        ));
    }

    #[test]
    fn gauge_drops_top_term() {
        let c = CoefficientSet::zeros(GradingCase::G2_10);
        let l = build_l_operator(GradingCase::G2_10, Side::Plus, &c, true).unwrap();
        assert_eq!(l.terms.len(), 4);
        let c = c.set("cb^3_2", CoefficientFn::constant(1.0));
        assert!(build_l_operator(GradingCase::G2_10, Side::Plus, &c, true).is_err());
    }

    #[test]
    fn words_have_admissible_grades() {
        for case in GradingCase::ALL {
            let reps = fundamental_pair(case.p()).unwrap();
            let g = grading_operator(&reps[0].algebra, case.c()).unwrap();
            let l = build_l_operator(case, Side::Plus, &CoefficientSet::zeros(case), false).unwrap();
            for t in &l.terms {
                let d = g.grade(&t.word);
                assert!(d >= 1 && d <= case.max_grade(), "{case} {}", t.word);
            }
            assert_eq!(l.terms.iter().map(|t| g.grade(&t.word)).max(), Some(case.max_grade()));
        }
    }

    #[test]
    fn minus_is_transpose_image_of_plus() {
        // with equal values in barred and unbarred slots, L- = L+^T
        for case in GradingCase::ALL {
            let reps = fundamental_pair(case.p()).unwrap();
            let c = CoefficientSet::zeros(case);
            let lp = build_l_operator(case, Side::Plus, &c, false).unwrap();
            let lm = build_l_operator(case, Side::Minus, &c, false).unwrap();
            // same value for a slot and its barred partner
            let vals = |s: &str| {
                let plain: String = if s.as_bytes()[1] == b'b' {
                    format!("{}{}", &s[..1], &s[2..])
                } else {
                    s.into()
                };
                rat(plain.bytes().map(|b| b as i64).sum::<i64>() % 11 + 1, 3)
            };
            for r in &reps {
                let mp = lp.exact_matrix(r, vals);
                let mm = lm.exact_matrix(r, vals);
                // contravariant form: <v, X w> = <X^T v, w> with the diagonal norms
                let n = Matrix::from_fn(r.dim, r.dim, |i, j| if i == j { r.norms[i].clone() } else { rat(0, 1) });
                let ninv = n.inverse().unwrap();
                assert_eq!(mm, ninv.mul(&mp.transpose()).mul(&n), "{case} j={}", r.label);
            }
        }
    }
}
