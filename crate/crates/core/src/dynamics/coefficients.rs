//! Named coefficient functions of one variable with closed-form descriptors.
//!
//! Unbarred slots (`c1`, `d^2`, ...) feed `L-` and depend on `x`; barred slots
//! (`cb1`, `db^2`, ...) feed `L+` and depend on `y`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grading::GradingCase;
use crate::rng::{rng, Stream};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CoefficientFn {
    /// `sum_k a_k t^k`
    Poly { coeffs: Vec<f64> },
    /// `offset + amp * sin(freq * t + phase)`
    Trig {
        amp: f64,
        freq: f64,
        phase: f64,
        offset: f64,
    },
}

impl CoefficientFn {
    pub fn constant(v: f64) -> Self {
        CoefficientFn::Poly { coeffs: vec![v] }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            CoefficientFn::Poly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, a| acc * t + a),
            CoefficientFn::Trig {
                amp,
                freq,
                phase,
                offset,
            } => offset + amp * (freq * t + phase).sin(),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            CoefficientFn::Poly { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, a)| acc * t + k as f64 * a),
            CoefficientFn::Trig { amp, freq, phase, .. } => amp * freq * (freq * t + phase).cos(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            CoefficientFn::Poly { coeffs } => coeffs.iter().all(|&a| a == 0.0),
            CoefficientFn::Trig { amp, offset, .. } => *amp == 0.0 && *offset == 0.0,
        }
    }
}

/// `poly:a0,a1,...` or `trig:amp,freq,phase,offset`; a bare number is a constant.
impl FromStr for CoefficientFn {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::Config(format!("coefficient `{s}`: {m}"));
        let s = s.trim();
        let (kind, rest) = s.split_once(':').unwrap_or(("poly", s));
        let nums: Vec<f64> = rest
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| bad("not a number")))
            .collect::<Result<_>>()?;
        if nums.iter().any(|x| !x.is_finite()) {
            return Err(bad("non-finite value"));
        }
        match kind.trim() {
            "poly" => Ok(CoefficientFn::Poly { coeffs: nums }),
            "trig" => match nums.as_slice() {
                &[amp, freq, phase, offset] => Ok(CoefficientFn::Trig {
                    amp,
                    freq,
                    phase,
                    offset,
                }),
                _ => Err(bad("trig needs amp,freq,phase,offset")),
            },
            _ => Err(bad("kind must be poly or trig")),
        }
    }
}

impl fmt::Display for CoefficientFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientFn::Poly { coeffs } => {
                let v: Vec<String> = coeffs.iter().map(|a| format!("{a:?}")).collect();
                write!(f, "poly:{}", v.join(","))
            }
            CoefficientFn::Trig {
                amp,
                freq,
                phase,
                offset,
            } => {
                write!(f, "trig:{amp:?},{freq:?},{phase:?},{offset:?}")
            }
        }
    }
}

/// Unbarred slot names of a case, in the order of its `L` display.
pub fn slots(case: GradingCase) -> &'static [&'static str] {
    match case {
        GradingCase::A2_10 => &["c1", "c2"],
        GradingCase::B2_10 => &["c1", "c2", "c^2"],
        GradingCase::B2_01 => &["d1", "d2", "d3"],
        GradingCase::G2_01 => &["d1", "d2", "d3", "d4", "d^2"],
        GradingCase::G2_10 => &["c^1_1", "c^1_2", "c^2", "c^3_1", "c^3_2"],
    }
}

/// `c1 -> cb1`, `d^2 -> db^2`.
pub fn barred(slot: &str) -> String {
    let mut s = String::with_capacity(slot.len() + 1);
    s.push_str(&slot[..1]);
    s.push('b');
    s.push_str(&slot[1..]);
    s
}

pub fn all_slots(case: GradingCase) -> Vec<String> {
    let un = slots(case);
    un.iter()
        .map(|s| s.to_string())
        .chain(un.iter().map(|s| barred(s)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub case: GradingCase,
    pub fns: BTreeMap<String, CoefficientFn>,
}

impl CoefficientSet {
    pub fn new(case: GradingCase) -> Self {
        CoefficientSet {
            case,
            fns: BTreeMap::new(),
        }
    }

    /// Every slot set to zero.
    pub fn zeros(case: GradingCase) -> Self {
        let mut c = Self::new(case);
        for s in all_slots(case) {
            c.fns.insert(s, CoefficientFn::zero());
        }
        c
    }

    /// Every slot set to the same constant.
    pub fn constants(case: GradingCase, v: f64) -> Self {
        let mut c = Self::new(case);
        for s in all_slots(case) {
            c.fns.insert(s, CoefficientFn::constant(v));
        }
        c
    }

    /// Polynomials of the given degree with coefficients uniform in `[-1, 1]`.
    pub fn random(case: GradingCase, seed: u64, degree: usize) -> Self {
        Self::random_scaled(case, seed, degree, 1.0)
    }

    /// Polynomial coefficients drawn uniformly from `[-amplitude, amplitude]`.
    pub fn random_scaled(case: GradingCase, seed: u64, degree: usize, amplitude: f64) -> Self {
        let mut r = rng(seed, Stream::Coefficients);
        let mut c = Self::new(case);
        for s in all_slots(case) {
            let coeffs = (0..=degree).map(|_| amplitude * r.gen_range(-1.0..=1.0)).collect();
            c.fns.insert(s, CoefficientFn::Poly { coeffs });
        }
        c
    }

    pub fn set(mut self, slot: &str, f: CoefficientFn) -> Self {
        self.fns.insert(slot.to_string(), f);
        self
    }

    /// Zero a slot and its barred partner.
    pub fn zero_pair(self, slot: &str) -> Self {
        self.set(slot, CoefficientFn::zero())
            .set(&barred(slot), CoefficientFn::zero())
    }

    pub fn get(&self, slot: &str) -> Result<&CoefficientFn> {
        self.fns
            .get(slot)
            .ok_or_else(|| Error::MissingCoefficient(slot.to_string()))
    }

    /// Value at `t`; absent slots are an error.
    pub fn value(&self, slot: &str, t: f64) -> Result<f64> {
        Ok(self.get(slot)?.value(t))
    }

    /// Reject slots that do not belong to the case.
    pub fn validate(&self) -> Result<()> {
        let known = all_slots(self.case);
        for k in self.fns.keys() {
            if !known.contains(k) {
                return Err(Error::Config(format!("slot `{k}` does not belong to {}", self.case)));
            }
        }
        Ok(())
    }

    /// Values of all unbarred slots at `x` and barred slots at `y`.
    pub fn at(&self, x: f64, y: f64) -> Result<CoefficientValues> {
        let un = slots(self.case);
        let mut plain = Vec::with_capacity(un.len());
        let mut bar = Vec::with_capacity(un.len());
        for s in un {
            plain.push(self.fns.get(*s).map_or(0.0, |f| f.value(x)));
            bar.push(self.fns.get(&barred(s)).map_or(0.0, |f| f.value(y)));
        }
        Ok(CoefficientValues { plain, bar })
    }
}

/// Slot values at one node, in [`slots`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientValues {
    pub plain: Vec<f64>,
    pub bar: Vec<f64>,
}
