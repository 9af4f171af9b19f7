//! Integer gradings `[H, X_j^±] = ±c_j X_j^±`, graded generator words, and the
//! red-subalgebra block that carries the u-matrix.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{BasisWord, CartanData, Representation, RootWord};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{rat, Rational, Scalar};

/// The five graded systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GradingCase {
    A2_10,
    B2_10,
    B2_01,
    G2_01,
    G2_10,
}

impl GradingCase {
    pub const ALL: [GradingCase; 5] = [
        GradingCase::A2_10,
        GradingCase::B2_10,
        GradingCase::B2_01,
        GradingCase::G2_01,
        GradingCase::G2_10,
    ];

    pub fn p(self) -> u8 {
        match self {
            GradingCase::A2_10 => 1,
            GradingCase::B2_10 | GradingCase::B2_01 => 2,
            GradingCase::G2_01 | GradingCase::G2_10 => 3,
        }
    }

    pub fn c(self) -> [u8; 2] {
        match self {
            GradingCase::A2_10 | GradingCase::B2_10 | GradingCase::G2_10 => [1, 0],
            GradingCase::B2_01 | GradingCase::G2_01 => [0, 1],
        }
    }

    /// The simple root with `c_i = 0`; it also labels the representation holding u.
    pub fn red_root(self) -> u8 {
        if self.c()[0] == 0 {
            1
        } else {
            2
        }
    }

    pub fn max_grade(self) -> i64 {
        match self {
            GradingCase::A2_10 | GradingCase::B2_01 => 1,
            GradingCase::B2_10 | GradingCase::G2_01 => 2,
            GradingCase::G2_10 => 3,
        }
    }

    pub fn from_parts(p: u8, c: [u8; 2]) -> Result<GradingCase> {
        GradingCase::ALL
            .into_iter()
            .find(|g| g.p() == p && g.c() == c)
            .ok_or_else(|| Error::InvalidParameter(format!("no graded system for p={p}, c=({},{})", c[0], c[1])))
    }
}

impl fmt::Display for GradingCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GradingCase::A2_10 => "A2(1,0)",
            GradingCase::B2_10 => "B2(1,0)",
            GradingCase::B2_01 => "B2(0,1)",
            GradingCase::G2_01 => "G2(0,1)",
            GradingCase::G2_10 => "G2(1,0)",
        };
        f.write_str(s)
    }
}

impl FromStr for GradingCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_uppercase();
        match norm.as_str() {
            "A210" => Ok(GradingCase::A2_10),
            "B210" => Ok(GradingCase::B2_10),
            "B201" => Ok(GradingCase::B2_01),
            "G201" => Ok(GradingCase::G2_01),
            "G210" => Ok(GradingCase::G2_10),
            _ => Err(Error::InvalidParameter(format!("unknown case `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GradingSpec {
    pub c: [u8; 2],
    /// `H = s_1 h_1 + s_2 h_2`.
    #[serde(serialize_with = "ser_rats")]
    pub s: [Rational; 2],
    /// Grades of the simple generators and Cartan elements.
    pub grades: BTreeMap<String, i64>,
    pub red_roots: Vec<u8>,
}

fn ser_rats<S: serde::Serializer>(v: &[Rational; 2], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(2))?;
    for r in v {
        seq.serialize_element(&crate::scalar::rat_string(r))?;
    }
    seq.end()
}

impl GradingSpec {
    /// Grade of a multi-commutator: sum of `c` over its letters.
    pub fn grade(&self, w: &RootWord) -> i64 {
        w.letters().iter().map(|&i| self.c[i as usize - 1] as i64).sum()
    }

    /// Matrix of `H` in a representation.
    pub fn h_matrix(&self, r: &Representation) -> Matrix<Rational> {
        r.h(1).scale(&self.s[0]).add(&r.h(2).scale(&self.s[1]))
    }
}

pub fn grading_operator(cd: &CartanData, c: [u8; 2]) -> Result<GradingSpec> {
    if c.iter().any(|&x| x > 1) {
        return Err(Error::InvalidParameter(format!(
            "c entries must be 0 or 1, got ({},{})",
            c[0], c[1]
        )));
    }
    if c == [0, 0] {
        return Err(Error::TrivialGrading);
    }
    // sum_i s_i K_{ji} = c_j  =>  s = K^{-1} c
    let cr = [rat(c[0] as i64, 1), rat(c[1] as i64, 1)];
    let s = [0, 1].map(|i| cd.kinv[i][0].clone() * cr[0].clone() + cd.kinv[i][1].clone() * cr[1].clone());
    let mut grades = BTreeMap::new();
    for (i, &ci) in c.iter().enumerate() {
        grades.insert(format!("X+{}", i + 1), ci as i64);
        grades.insert(format!("X-{}", i + 1), -(ci as i64));
        grades.insert(format!("h{}", i + 1), 0);
    }
    let red_roots = (1..=2u8).filter(|&i| c[i as usize - 1] == 0).collect();
    Ok(GradingSpec {
        c,
        s,
        grades,
        red_roots,
    })
}

/// Positive-root multi-commutators `[[..[a_1,a_2],..],a_k]`, one per positive root,
/// in order of height then discovery.
pub fn positive_root_words(r: &Representation) -> Vec<RootWord> {
    let mut kept: Vec<(RootWord, Matrix<Rational>)> = Vec::new();
    for i in [1u8, 2] {
        let w = RootWord::Simple(i);
        kept.push((w.clone(), w.matrix(r, true)));
    }
    // growing from X2 first yields [X2,X1], [[X2,X1],X1], ...
    let mut level: Vec<RootWord> = vec![RootWord::Simple(2), RootWord::Simple(1)];
    while !level.is_empty() {
        let mut next = Vec::new();
        for w in &level {
            for a in [1u8, 2] {
                let cand = RootWord::br(w.clone(), RootWord::Simple(a));
                let m = cand.matrix(r, true);
                if m.is_zero() {
                    continue;
                }
                let mut rows: Vec<Vec<Rational>> = kept.iter().map(|(_, k)| k.data().to_vec()).collect();
                rows.push(m.data().to_vec());
                let n = rows.len();
                if Matrix::from_rows(rows).rank() == n {
                    kept.push((cand.clone(), m));
                    next.push(cand);
                }
            }
        }
        level = next;
    }
    kept.into_iter().map(|(w, _)| w).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct GradedComponent {
    pub grade: i64,
    pub words: Vec<String>,
}

/// Every generator word grouped by grade, from most negative to most positive.
pub fn graded_decomposition(r: &Representation, g: &GradingSpec) -> Vec<GradedComponent> {
    let mut by_grade: BTreeMap<i64, Vec<String>> = BTreeMap::new();
    for w in positive_root_words(r) {
        let d = g.grade(&w);
        by_grade.entry(d).or_default().push(w.label(true));
        by_grade.entry(-d).or_default().push(w.transposed().label(false));
    }
    by_grade
        .entry(0)
        .or_default()
        .extend(["h1".to_string(), "h2".to_string()]);
    by_grade
        .into_iter()
        .map(|(grade, words)| GradedComponent { grade, words })
        .collect()
}

/// The u-matrix basis of a grading, or the marker for the principal grading.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum UBasis {
    /// No red root: the grade-0 subalgebra is abelian and there is no u-block.
    Principal,
    Red {
        root: u8,
        words: Vec<BasisWord>,
    },
}

impl UBasis {
    pub fn words(&self) -> &[BasisWord] {
        match self {
            UBasis::Principal => &[],
            UBasis::Red { words, .. } => words,
        }
    }
}

/// Orbit of the highest vector under the red `sl2`: `|j>, X_i^-|j>, (X_i^-)^2|j>, ...`.
pub fn u_basis(r: &Representation, g: &GradingSpec) -> Result<UBasis> {
    let root = match g.red_roots.as_slice() {
        [] => return Ok(UBasis::Principal),
        [i] => *i,
        _ => return Err(Error::TrivialGrading),
    };
    let mut words = Vec::new();
    let mut word: Vec<u8> = Vec::new();
    loop {
        let v = r.ket(&word)?;
        if v.iter().all(Scalar::is_zero) {
            break;
        }
        let idx = v.iter().position(|x| !Scalar::is_zero(x)).expect("nonzero");
        words.push(BasisWord {
            word: word.clone(),
            weight: r.basis[idx].weight,
        });
        word.push(root);
    }
    Ok(UBasis::Red { root, words })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{cartan_matrix, fundamental_pair};

    #[test]
    fn a2_principal_grading_coefficients() {
        let cd = cartan_matrix(1).unwrap();
        let g = grading_operator(&cd, [1, 1]).unwrap();
        assert_eq!(g.s, [rat(1, 1), rat(1, 1)]);
        assert_eq!(g.grades["X+1"], 1);
        assert_eq!(g.grades["X+2"], 1);
        assert!(g.red_roots.is_empty());
    }

    #[test]
    fn trivial_grading_rejected() {
        let cd = cartan_matrix(2).unwrap();
        assert!(matches!(grading_operator(&cd, [0, 0]), Err(Error::TrivialGrading)));
    }

    #[test]
    fn h_acts_by_grade_on_every_root_word() {
        for case in GradingCase::ALL {
            let reps = fundamental_pair(case.p()).unwrap();
            let g = grading_operator(&reps[0].algebra, case.c()).unwrap();
            for r in &reps {
                let h = g.h_matrix(r);
                for w in positive_root_words(r) {
                    let x = w.matrix(r, true);
                    let d = rat(g.grade(&w), 1);
                    assert_eq!(h.bracket(&x).unwrap(), x.scale(&d), "{case} {w}");
                    let y = w.transposed().matrix(r, false);
                    assert_eq!(h.bracket(&y).unwrap(), y.scale(&-d));
                }
            }
        }
    }

    #[test]
    fn max_grades_match_cases() {
        for case in GradingCase::ALL {
            let reps = fundamental_pair(case.p()).unwrap();
            let g = grading_operator(&reps[0].algebra, case.c()).unwrap();
            let dec = graded_decomposition(&reps[0], &g);
            assert_eq!(dec.last().unwrap().grade, case.max_grade(), "{case}");
            assert_eq!(dec.first().unwrap().grade, -case.max_grade());
        }
    }

    #[test]
    fn a2_grade_one_words() {
        let reps = fundamental_pair(1).unwrap();
        let g = grading_operator(&reps[0].algebra, [1, 0]).unwrap();
        let dec = graded_decomposition(&reps[1], &g);
        let one = dec.iter().find(|c| c.grade == 1).unwrap();
        assert_eq!(one.words, vec!["X+1", "[X+2,X+1]"]);
    }

    #[test]
    fn root_counts() {
        let counts: Vec<usize> = (1..=3)
            .map(|p| positive_root_words(&fundamental_pair(p).unwrap()[0]).len())
            .collect();
        assert_eq!(counts, vec![3, 4, 6]);
    }

    #[test]
    fn u_basis_has_length_two_for_every_case() {
        for case in GradingCase::ALL {
            let reps = fundamental_pair(case.p()).unwrap();
            let g = grading_operator(&reps[0].algebra, case.c()).unwrap();
            let r = &reps[case.red_root() as usize - 1];
            let ub = u_basis(r, &g).unwrap();
            let words: Vec<Vec<u8>> = ub.words().iter().map(|b| b.word.clone()).collect();
            assert_eq!(words, vec![vec![], vec![case.red_root()]], "{case}");
        }
    }

    #[test]
    fn principal_grading_marker() {
        let reps = fundamental_pair(1).unwrap();
        let g = grading_operator(&reps[0].algebra, [1, 1]).unwrap();
        assert_eq!(u_basis(&reps[0], &g).unwrap(), UBasis::Principal);
    }

    #[test]
    fn case_names_round_trip() {
        for case in GradingCase::ALL {
            assert_eq!(case.to_string().parse::<GradingCase>().unwrap(), case);
        }
        assert!("C3(1,0)".parse::<GradingCase>().is_err());
    }
}
