//! `key = value` run configuration.
//!
//! One assignment per line; `#` starts a comment; blank lines are ignored.
//! Unknown or repeated keys are errors. Coefficient polynomials are given as
//! `coef.<slot> = a0, a1, ...` (ascending powers of the slot's variable).
//!
//! | key | default | meaning |
//! |---|---|---|
//! | `p` | 1 | algebra: 1 = A2, 2 = B2, 3 = G2 |
//! | `grading` | `1,0` | grading vector `c` (solve-verify) |
//! | `seed` | 1 | run seed; feeds the ChaCha8 streams |
//! | `seeds` | 100 | identity sweep size (seeds `seed..seed+seeds`) |
//! | `appendix` | true | include appendix identities in the sweep |
//! | `coefficients` | `random` | `random` or `zero` base for unset slots |
//! | `degree` | 2 | degree of random coefficient polynomials |
//! | `amplitude` | 1 | random polynomial coefficients lie in `[-amplitude, amplitude]` |
//! | `zero` | none | comma list of slots forced to zero with their barred partners |
//! | `grid` | 17 | nodes per side of the coarsest level |
//! | `levels` | 3 | spacing halvings run (≥3 for an order estimate) |
//! | `rect` | `0,1,0,1` | `x0, x1, y0, y1` |
//! | `tol` | 1e-12 | integrator tolerance |
//! | `stencil` | 4 | finite-difference order, 2 or 4 |
//! | `threshold` | 1e-6 | residual threshold at the finest level |
//! | `gauge` | true | G2(1,0): set `c^3_2 = cb^3_2 = 0` |
//! | `singular_threshold` | 0.05 | relative size marking a node singular |
//! | `base_seed` | none | constant group element between the two paths |
//! | `calibration_seeds` | `101,202,303` | coefficient draws for `report` |
//! | `out` | `out` | output directory |

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rank2_toda::dynamics::coefficients::{all_slots, slots, CoefficientFn, CoefficientSet};
use rank2_toda::dynamics::fields::{Grid, SolveOptions, DEFAULT_SINGULAR_THRESHOLD};
use rank2_toda::grading::GradingCase;
use rank2_toda::verify::calibration::DEFAULT_SEEDS;
use rank2_toda::verify::residual::{halving_ladder, DEFAULT_THRESHOLD};
use rank2_toda::{Error, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientBase {
    Random,
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub p: u8,
    pub grading: [u8; 2],
    pub seed: u64,
    pub seeds: u64,
    pub appendix: bool,
    pub coefficients: CoefficientBase,
    pub degree: usize,
    pub amplitude: f64,
    pub zero: Vec<String>,
    pub coef: BTreeMap<String, Vec<f64>>,
    pub grid: usize,
    pub levels: usize,
    pub rect: [f64; 4],
    pub tol: f64,
    pub stencil: u8,
    pub threshold: f64,
    pub gauge: bool,
    pub singular_threshold: f64,
    pub base_seed: Option<u64>,
    pub calibration_seeds: Vec<u64>,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: String::new(),
            p: 1,
            grading: [1, 0],
            seed: 1,
            seeds: 100,
            appendix: true,
            coefficients: CoefficientBase::Random,
            degree: 2,
            amplitude: 1.0,
            zero: Vec::new(),
            coef: BTreeMap::new(),
            grid: 17,
            levels: 3,
            rect: [0.0, 1.0, 0.0, 1.0],
            tol: 1e-12,
            stencil: 4,
            threshold: DEFAULT_THRESHOLD,
            gauge: true,
            singular_threshold: DEFAULT_SINGULAR_THRESHOLD,
            base_seed: None,
            calibration_seeds: DEFAULT_SEEDS.to_vec(),
            out: PathBuf::from("out"),
        }
    }
}

fn bad(key: &str, value: &str, why: impl std::fmt::Display) -> Error {
    Error::Config(format!("`{key} = {value}`: {why}"))
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split([',', ' ', '\t']).map(str::trim).filter(|s| !s.is_empty())
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e| bad(key, v, e))
}

fn nums<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    list(v).map(|s| num(key, s)).collect()
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(key, v, "expected true or false")),
    }
}

impl RunConfig {
    /// Parse `text` on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        let mut seen = BTreeSet::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !seen.insert(k.to_string()) {
                return Err(Error::Config(format!("line {}: duplicate key `{k}`", n + 1)));
            }
            c.set(k, v).map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("line {}: {m}", n + 1)),
                other => other,
            })?;
        }
        Ok(c)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "p" => self.p = num(key, v)?,
            "grading" => {
                let g: Vec<u8> = nums(key, v)?;
                self.grading = g.try_into().map_err(|_| bad(key, v, "expected two entries"))?;
            }
            "seed" => self.seed = num(key, v)?,
            "seeds" => self.seeds = num(key, v)?,
            "appendix" => self.appendix = boolean(key, v)?,
            "coefficients" => {
                self.coefficients = match v {
                    "random" => CoefficientBase::Random,
                    "zero" => CoefficientBase::Zero,
                    _ => return Err(bad(key, v, "expected random or zero")),
                }
            }
            "degree" => self.degree = num(key, v)?,
            "amplitude" => self.amplitude = num(key, v)?,
            "zero" => self.zero = list(v).map(String::from).collect(),
            "grid" => self.grid = num(key, v)?,
            "levels" => self.levels = num(key, v)?,
            "rect" => {
                let r: Vec<f64> = nums(key, v)?;
                self.rect = r.try_into().map_err(|_| bad(key, v, "expected x0, x1, y0, y1"))?;
            }
            "tol" => self.tol = num(key, v)?,
            "stencil" => self.stencil = num(key, v)?,
            "threshold" => self.threshold = num(key, v)?,
            "gauge" => self.gauge = boolean(key, v)?,
            "singular_threshold" => self.singular_threshold = num(key, v)?,
            "base_seed" => self.base_seed = Some(num(key, v)?),
            "calibration_seeds" => self.calibration_seeds = nums(key, v)?,
            "out" => self.out = PathBuf::from(v),
            _ => match key.strip_prefix("coef.") {
                Some(slot) if !slot.is_empty() => {
                    self.coef.insert(slot.to_string(), nums(key, v)?);
                }
                _ => return Err(Error::Config(format!("unknown key `{key}`"))),
            },
        }
        Ok(())
    }

    /// Reject values no command can use.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if !(1..=3).contains(&self.p) {
            return fail(format!("p must be 1, 2 or 3, got {}", self.p));
        }
        if ![2, 4].contains(&self.stencil) {
            return fail(format!("stencil must be 2 or 4, got {}", self.stencil));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return fail(format!("tol must be positive, got {}", self.tol));
        }
        if self.grid < 5 || self.levels == 0 {
            return fail(format!(
                "need grid >= 5 and levels >= 1, got {} and {}",
                self.grid, self.levels
            ));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return fail(format!("amplitude must be non-negative, got {}", self.amplitude));
        }
        if self.threshold.is_nan()
            || self.threshold <= 0.0
            || self.singular_threshold.is_nan()
            || self.singular_threshold < 0.0
        {
            return fail("thresholds must be positive".into());
        }
        Ok(())
    }

    pub fn case(&self) -> Result<GradingCase> {
        GradingCase::from_parts(self.p, self.grading).map_err(|e| Error::Config(e.to_string()))
    }

    /// Coefficient functions: the base draw, then `zero`, then `coef.*`.
    pub fn coefficient_set(&self) -> Result<CoefficientSet> {
        let case = self.case()?;
        let mut c = match self.coefficients {
            CoefficientBase::Random => CoefficientSet::random_scaled(case, self.seed, self.degree, self.amplitude),
            CoefficientBase::Zero => CoefficientSet::zeros(case),
        };
        let known = all_slots(case);
        let unknown = |s: &str| Error::Config(format!("{case} has no slot `{s}`; slots are {}", known.join(", ")));
        for s in &self.zero {
            if !slots(case).contains(&s.as_str()) {
                return Err(unknown(s));
            }
            c = c.zero_pair(s);
        }
        for (s, a) in &self.coef {
            if !known.contains(s) {
                return Err(unknown(s));
            }
            c = c.set(s, CoefficientFn::Poly { coeffs: a.clone() });
        }
        if case == GradingCase::G2_10 && self.gauge {
            c = c.zero_pair("c^3_2");
        }
        Ok(c)
    }

    pub fn grids(&self) -> Vec<Grid> {
        let [x0, x1, y0, y1] = self.rect;
        let base = Grid {
            x0,
            x1,
            y0,
            y1,
            nx: self.grid,
            ny: self.grid,
        };
        halving_ladder(base, self.levels)
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            tol: self.tol,
            gauge: self.gauge,
            base_seed: self.base_seed,
            singular_threshold: self.singular_threshold,
            ..SolveOptions::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_comments() {
        let c = RunConfig::parse("# run\np = 3\n\ngrading = 1, 0  # G2(1,0)\ntol=1e-10\n").unwrap();
        assert_eq!(c.p, 3);
        assert_eq!(c.case().unwrap(), GradingCase::G2_10);
        assert_eq!(c.tol, 1e-10);
        assert_eq!(c.stencil, 4);
    }

    #[test]
    fn unknown_and_duplicate_keys_fail() {
        assert!(matches!(RunConfig::parse("colour = red"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse("p = 1\np = 2"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse("just text"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse("gauge = maybe"), Err(Error::Config(_))));
    }

    #[test]
    fn coefficient_overrides() {
        let c = RunConfig::parse("p = 2\ngrading = 1,0\nzero = c^2\ncoef.c1 = 1, 0.5").unwrap();
        let set = c.coefficient_set().unwrap();
        assert_eq!(set.value("c^2", 0.3).unwrap(), 0.0);
        assert_eq!(set.value("cb^2", 0.3).unwrap(), 0.0);
        assert_eq!(set.value("c1", 2.0).unwrap(), 2.0);
        let c = RunConfig::parse("coef.nope = 1").unwrap();
        assert!(c.coefficient_set().is_err());
    }

    #[test]
    fn ladder() {
        let g = RunConfig::default().grids();
        assert_eq!(g.iter().map(|g| g.nx).collect::<Vec<_>>(), vec![17, 33, 65]);
    }
}
