//! Cartan data, Chevalley generators and the two fundamental representations,
//! built from nothing but the Cartan matrix in exact rational arithmetic.
//!
//! Root indices are 1-based (`1` or `2`) everywhere in the public API.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{rat, Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CartanData {
    pub p: u8,
    /// `k[j][i]`: `[h_i, X_j^+] = k[j][i] X_j^+` (0-based storage).
    pub k: [[i64; 2]; 2],
    #[serde(skip)]
    pub kinv: [[Rational; 2]; 2],
}

impl CartanData {
    /// `K_{ji}` with 1-based indices.
    pub fn kji(&self, j: u8, i: u8) -> i64 {
        self.k[j as usize - 1][i as usize - 1]
    }

    pub fn name(&self) -> &'static str {
        match self.p {
            1 => "A2",
            2 => "B2",
            _ => "G2",
        }
    }
}

pub fn cartan_matrix(p: u8) -> Result<CartanData> {
    if !(1..=3).contains(&p) {
        return Err(Error::InvalidParameter(format!("p must be 1, 2 or 3, got {p}")));
    }
    let pi = p as i64;
    let k = [[2, -1], [-pi, 2]];
    let det = 4 - pi;
    let kinv = [[rat(2, det), rat(1, det)], [rat(pi, det), rat(2, det)]];
    Ok(CartanData { p, k, kinv })
}

pub(crate) fn check_root(i: u8) -> Result<usize> {
    match i {
        1 | 2 => Ok(i as usize - 1),
        _ => Err(Error::InvalidWord {
            word: vec![i],
            reason: "root index must be 1 or 2".into(),
        }),
    }
}

/// A basis vector `F_{w_n} ... F_{w_1} |j>`: `word = [w_1, ..., w_n]`, i.e. in
/// order of application, outermost last.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisWord {
    pub word: Vec<u8>,
    /// Eigenvalues of `h_1`, `h_2`. Fundamental weights are integral, so integers suffice.
    pub weight: [i64; 2],
}

impl fmt::Display for BasisWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.word.iter().map(|i| i.to_string()).collect();
        write!(f, "({})", w.join(","))
    }
}

#[derive(Clone, Debug)]
pub struct Representation {
    pub algebra: CartanData,
    pub label: u8,
    pub dim: usize,
    pub basis: Vec<BasisWord>,
    /// Diagonal of the contravariant form on the basis (all positive).
    pub norms: Vec<Rational>,
    e: [Matrix<Rational>; 2],
    f: [Matrix<Rational>; 2],
    h: [Matrix<Rational>; 2],
}

impl Representation {
    pub fn e(&self, i: u8) -> &Matrix<Rational> {
        &self.e[i as usize - 1]
    }

    pub fn f(&self, i: u8) -> &Matrix<Rational> {
        &self.f[i as usize - 1]
    }

    pub fn h(&self, i: u8) -> &Matrix<Rational> {
        &self.h[i as usize - 1]
    }

    /// Raising (`raise = true`) or lowering generator `i`.
    pub fn generator(&self, i: u8, raise: bool) -> &Matrix<Rational> {
        if raise {
            self.e(i)
        } else {
            self.f(i)
        }
    }

    /// Replace a generator matrix; used to inject faults in tests and demos.
    pub fn with_e(mut self, i: u8, m: Matrix<Rational>) -> Self {
        self.e[i as usize - 1] = m;
        self
    }

    /// Named matrices in a fixed order, for dumps.
    pub fn named_matrices(&self) -> Vec<(&'static str, &Matrix<Rational>)> {
        vec![
            ("E1", &self.e[0]),
            ("E2", &self.e[1]),
            ("F1", &self.f[0]),
            ("F2", &self.f[1]),
            ("H1", &self.h[0]),
            ("H2", &self.h[1]),
        ]
    }

    /// Plain-text dump of the basis and all six matrices.
    pub fn dump(&self) -> String {
        let mut s = format!(
            "# {} fundamental representation j={} dim={}\n",
            self.algebra.name(),
            self.label,
            self.dim
        );
        s.push_str("basis\n");
        for (b, n) in self.basis.iter().zip(&self.norms) {
            s.push_str(&format!(
                "{} weight=({},{}) norm={}\n",
                b,
                b.weight[0],
                b.weight[1],
                crate::scalar::rat_string(n)
            ));
        }
        for (name, m) in self.named_matrices() {
            s.push_str(&format!("\n{name}\n{}", m.dump()));
        }
        s
    }

    /// Coordinates of the highest vector.
    pub fn highest<S: Scalar>(&self) -> Vec<S> {
        let mut v = vec![S::zero(); self.dim];
        v[0] = S::one();
        v
    }

    /// `X^-_{b_1} ... X^-_{b_m} |j>` for the word `[b_1, ..., b_m]` as written.
    pub fn ket(&self, word: &[u8]) -> Result<Vec<Rational>> {
        let mut v = self.highest();
        for &b in word.iter().rev() {
            check_root(b).map_err(|_| invalid(word))?;
            v = self.f(b).apply(&v);
        }
        Ok(v)
    }

    /// `<j| X^+_{a_1} ... X^+_{a_k}` for the word `[a_1, ..., a_k]` as written.
    pub fn bra(&self, word: &[u8]) -> Result<Vec<Rational>> {
        let mut v = self.highest();
        for &a in word {
            check_root(a).map_err(|_| invalid(word))?;
            v = self.e(a).left_apply(&v);
        }
        Ok(v)
    }
}

fn invalid(word: &[u8]) -> Error {
    Error::InvalidWord {
        word: word.to_vec(),
        reason: "root index must be 1 or 2".into(),
    }
}

type WordVec = BTreeMap<Vec<u8>, Rational>;

/// Verma-module arithmetic on lowering words, with the contravariant form.
struct VermaForm<'a> {
    cd: &'a CartanData,
    hw: [i64; 2],
    e_cache: HashMap<(u8, Vec<u8>), WordVec>,
    form_cache: HashMap<(Vec<u8>, Vec<u8>), Rational>,
}

impl<'a> VermaForm<'a> {
    fn weight(&self, word: &[u8]) -> [i64; 2] {
        let mut w = self.hw;
        for &i in word {
            for (k, wk) in w.iter_mut().enumerate() {
                *wk -= self.cd.k[i as usize - 1][k];
            }
        }
        w
    }

    /// `E_i` applied to the word vector, via `[E_i, F_l] = delta_il h_l`.
    fn raise(&mut self, i: u8, word: &[u8]) -> WordVec {
        if word.is_empty() {
            return WordVec::new();
        }
        let key = (i, word.to_vec());
        if let Some(v) = self.e_cache.get(&key) {
            return v.clone();
        }
        let (last, rest) = (word[word.len() - 1], &word[..word.len() - 1]);
        let mut out = WordVec::new();
        for (w, c) in self.raise(i, rest) {
            let mut nw = w;
            nw.push(last);
            add_to(&mut out, nw, c);
        }
        if i == last {
            let h = self.weight(rest)[i as usize - 1];
            if h != 0 {
                add_to(&mut out, rest.to_vec(), rat(h, 1));
            }
        }
        self.e_cache.insert(key, out.clone());
        out
    }

    fn form(&mut self, a: &[u8], b: &[u8]) -> Rational {
        if self.weight(a) != self.weight(b) {
            return rat(0, 1);
        }
        if a.is_empty() {
            return if b.is_empty() { rat(1, 1) } else { rat(0, 1) };
        }
        let key = (a.to_vec(), b.to_vec());
        if let Some(v) = self.form_cache.get(&key) {
            return v.clone();
        }
        let (last, rest) = (a[a.len() - 1], &a[..a.len() - 1]);
        let mut s = rat(0, 1);
        for (w, c) in self.raise(last, b) {
            s += c * self.form(rest, &w);
        }
        self.form_cache.insert(key, s.clone());
        s
    }

    fn inner(&mut self, a: &WordVec, b: &WordVec) -> Rational {
        let mut s = rat(0, 1);
        for (wa, ca) in a {
            for (wb, cb) in b {
                let f = self.form(wa, wb);
                if !Scalar::is_zero(&f) {
                    s += ca * cb * f;
                }
            }
        }
        s
    }
}

fn add_to(v: &mut WordVec, w: Vec<u8>, c: Rational) {
    let entry = v.entry(w.clone()).or_insert_with(|| rat(0, 1));
    *entry += c;
    if Scalar::is_zero(entry) {
        v.remove(&w);
    }
}

/// Build the `j`-th fundamental representation.
///
/// Words are explored breadth-first (length, then lexicographic); a word is kept
/// when it raises the rank of the form's Gram matrix on its weight space. Kept
/// vectors are orthogonalised within each weight space so the Gram matrix is diagonal.
pub fn build_fundamental_rep(cd: &CartanData, j: u8) -> Result<Representation> {
    check_root(j).map_err(|_| Error::InvalidParameter(format!("j must be 1 or 2, got {j}")))?;
    let hw = if j == 1 { [1, 0] } else { [0, 1] };
    let mut vf = VermaForm {
        cd,
        hw,
        e_cache: HashMap::new(),
        form_cache: HashMap::new(),
    };

    let mut words: Vec<Vec<u8>> = vec![vec![]];
    let mut frontier: Vec<Vec<u8>> = vec![vec![]];
    while !frontier.is_empty() {
        let mut cands: Vec<Vec<u8>> = frontier
            .iter()
            .flat_map(|w| {
                [1u8, 2].map(|i| {
                    let mut nw = w.clone();
                    nw.push(i);
                    nw
                })
            })
            .collect();
        cands.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        cands.dedup();
        let mut next = Vec::new();
        for c in cands {
            let wt = vf.weight(&c);
            let mut same: Vec<Vec<u8>> = words.iter().filter(|w| vf.weight(w) == wt).cloned().collect();
            same.push(c.clone());
            let n = same.len();
            let gram = Matrix::from_fn(n, n, |_, _| rat(0, 1));
            let mut gram = gram;
            for a in 0..n {
                for b in 0..n {
                    gram[(a, b)] = vf.form(&same[a], &same[b]);
                }
            }
            if gram.rank() == n {
                words.push(c.clone());
                next.push(c);
            }
        }
        frontier = next;
    }

    // Gram-Schmidt inside each weight space.
    let mut vecs: Vec<WordVec> = Vec::with_capacity(words.len());
    for w in &words {
        let mut v = WordVec::new();
        v.insert(w.clone(), rat(1, 1));
        let wt = vf.weight(w);
        let unit = v.clone();
        for u in &vecs {
            let uw = vf.weight(u.keys().next().expect("nonempty"));
            if uw != wt {
                continue;
            }
            let coef = vf.inner(&unit, u) / vf.inner(u, u);
            for (k, c) in u {
                add_to(&mut v, k.clone(), -(coef.clone() * c));
            }
        }
        vecs.push(v);
    }
    let norms: Vec<Rational> = vecs.iter().map(|v| vf.inner(v, v)).collect();
    let n = vecs.len();

    let project = |vf: &mut VermaForm, img: &WordVec| -> Vec<Rational> {
        vecs.iter()
            .zip(&norms)
            .map(|(u, nu)| vf.inner(u, img) / nu.clone())
            .collect()
    };
    let mut f_mats = Vec::new();
    let mut e_mats = Vec::new();
    for i in [1u8, 2] {
        let mut fm = Matrix::zeros(n, n);
        let mut em = Matrix::zeros(n, n);
        for (k, v) in vecs.iter().enumerate() {
            let mut fimg = WordVec::new();
            let mut eimg = WordVec::new();
            for (w, c) in v {
                let mut nw = w.clone();
                nw.push(i);
                add_to(&mut fimg, nw, c.clone());
                for (w2, c2) in vf.raise(i, w) {
                    add_to(&mut eimg, w2, c.clone() * c2);
                }
            }
            for (m, x) in project(&mut vf, &fimg).into_iter().enumerate() {
                fm[(m, k)] = x;
            }
            for (m, x) in project(&mut vf, &eimg).into_iter().enumerate() {
                em[(m, k)] = x;
            }
        }
        f_mats.push(fm);
        e_mats.push(em);
    }
    let basis: Vec<BasisWord> = words
        .iter()
        .map(|w| BasisWord {
            word: w.clone(),
            weight: vf.weight(w),
        })
        .collect();
    let h_mats: Vec<Matrix<Rational>> = (0..2)
        .map(|i| Matrix::from_fn(n, n, |a, b| if a == b { rat(basis[a].weight[i], 1) } else { rat(0, 1) }))
        .collect();
    let [e1, e2]: [Matrix<Rational>; 2] = e_mats.try_into().expect("two");
    let [f1, f2]: [Matrix<Rational>; 2] = f_mats.try_into().expect("two");
    let [h1, h2]: [Matrix<Rational>; 2] = h_mats.try_into().expect("two");
    Ok(Representation {
        algebra: cd.clone(),
        label: j,
        dim: n,
        basis,
        norms,
        e: [e1, e2],
        f: [f1, f2],
        h: [h1, h2],
    })
}

/// Both fundamental representations, indexed by `label - 1`.
pub fn fundamental_pair(p: u8) -> Result<[Representation; 2]> {
    let cd = cartan_matrix(p)?;
    Ok([build_fundamental_rep(&cd, 1)?, build_fundamental_rep(&cd, 2)?])
}

pub fn bracket(a: &Matrix<Rational>, b: &Matrix<Rational>) -> Result<Matrix<Rational>> {
    a.bracket(b)
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationResidual {
    pub relation: String,
    pub residual: Vec<Vec<String>>,
    pub zero: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub algebra: String,
    pub label: u8,
    pub dim: usize,
    pub relations: Vec<RelationResidual>,
}

impl RelationReport {
    pub fn all_zero(&self) -> bool {
        self.relations.iter().all(|r| r.zero)
    }
}

/// Residuals of `[E_i,F_j] - d_ij H_j`, `[H_i,E_j] - K_ji E_j`, `[H_i,F_j] + K_ji F_j`,
/// `[H_1,H_2]`, plus nilpotency of `E_i`, `F_i`.
pub fn verify_defining_relations(r: &Representation) -> RelationReport {
    let cd = &r.algebra;
    let mut relations = Vec::new();
    let mut push = |name: String, m: Matrix<Rational>| {
        let residual = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| crate::scalar::rat_string(&m[(i, j)])).collect())
            .collect();
        relations.push(RelationResidual {
            zero: m.is_zero(),
            relation: name,
            residual,
        });
    };
    for i in [1u8, 2] {
        for j in [1u8, 2] {
            let mut m = r.e(i).bracket(r.f(j)).expect("square");
            if i == j {
                m = m.sub(r.h(j));
            }
            push(format!("[E{i},F{j}] - d{i}{j} H{j}"), m);
        }
    }
    for i in [1u8, 2] {
        for j in [1u8, 2] {
            let k = rat(cd.kji(j, i), 1);
            let m = r.h(i).bracket(r.e(j)).expect("square").sub(&r.e(j).scale(&k));
            push(format!("[H{i},E{j}] - K{j}{i} E{j}"), m);
            let m = r.h(i).bracket(r.f(j)).expect("square").add(&r.f(j).scale(&k));
            push(format!("[H{i},F{j}] + K{j}{i} F{j}"), m);
        }
    }
    push("[H1,H2]".into(), r.h(1).bracket(r.h(2)).expect("square"));
    for i in [1u8, 2] {
        push(format!("E{i}^dim"), r.e(i).pow(r.dim as u32));
        push(format!("F{i}^dim"), r.f(i).pow(r.dim as u32));
    }
    RelationReport {
        algebra: cd.name().into(),
        label: r.label,
        dim: r.dim,
        relations,
    }
}

/// A multi-commutator of simple generators, e.g. `[2,[1,2]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootWord {
    Simple(u8),
    Bracket(Box<RootWord>, Box<RootWord>),
}

impl RootWord {
    pub fn br(a: RootWord, b: RootWord) -> RootWord {
        RootWord::Bracket(Box::new(a), Box::new(b))
    }

    /// Parse `1`, `[1,2]`, `[[2,1],1]`, ...
    pub fn parse(s: &str) -> Result<RootWord> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let w = parse_word(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(Error::InvalidParameter(format!("trailing input in root word `{s}`")));
        }
        Ok(w)
    }

    /// Simple roots used, with multiplicity.
    pub fn letters(&self) -> Vec<u8> {
        match self {
            RootWord::Simple(i) => vec![*i],
            RootWord::Bracket(a, b) => {
                let mut v = a.letters();
                v.extend(b.letters());
                v
            }
        }
    }

    /// The transpose image: `T([a,b]) = [T(b), T(a)]`. Together with swapping
    /// raising and lowering generators this is the "hermitian conjugation".
    pub fn transposed(&self) -> RootWord {
        match self {
            RootWord::Simple(i) => RootWord::Simple(*i),
            RootWord::Bracket(a, b) => RootWord::br(b.transposed(), a.transposed()),
        }
    }

    /// Matrix of the word built from raising (`raise`) or lowering generators.
    pub fn matrix(&self, r: &Representation, raise: bool) -> Matrix<Rational> {
        match self {
            RootWord::Simple(i) => r.generator(*i, raise).clone(),
            RootWord::Bracket(a, b) => a
                .matrix(r, raise)
                .bracket(&b.matrix(r, raise))
                .expect("same representation"),
        }
    }

    pub fn label(&self, raise: bool) -> String {
        match self {
            RootWord::Simple(i) => format!("X{}{}", if raise { "+" } else { "-" }, i),
            RootWord::Bracket(a, b) => format!("[{},{}]", a.label(raise), b.label(raise)),
        }
    }
}

impl fmt::Display for RootWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootWord::Simple(i) => write!(f, "{i}"),
            RootWord::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

fn parse_word(chars: &[char], pos: &mut usize) -> Result<RootWord> {
    let err = |m: &str| Error::InvalidParameter(format!("root word: {m}"));
    match chars.get(*pos) {
        Some('1') | Some('2') => {
            let i = chars[*pos].to_digit(10).expect("digit") as u8;
            *pos += 1;
            Ok(RootWord::Simple(i))
        }
        Some('[') => {
            *pos += 1;
            let a = parse_word(chars, pos)?;
            if chars.get(*pos) != Some(&',') {
                return Err(err("expected ','"));
            }
            *pos += 1;
            let b = parse_word(chars, pos)?;
            if chars.get(*pos) != Some(&']') {
                return Err(err("expected ']'"));
            }
            *pos += 1;
            Ok(RootWord::br(a, b))
        }
        _ => Err(err("expected 1, 2 or '['")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(r: &Representation) -> Vec<Vec<u8>> {
        r.basis.iter().map(|b| b.word.clone()).collect()
    }

    #[test]
    fn cartan_inverse_exact() {
        for p in 1..=3 {
            let cd = cartan_matrix(p).unwrap();
            for a in 0..2 {
                for b in 0..2 {
                    let mut s = rat(0, 1);
                    for k in 0..2 {
                        s += rat(cd.k[a][k], 1) * cd.kinv[k][b].clone();
                    }
                    assert_eq!(s, rat((a == b) as i64, 1));
                }
            }
        }
        assert_eq!(cartan_matrix(1).unwrap().kinv[0][1], rat(1, 3));
        assert!(cartan_matrix(4).is_err());
        assert!(cartan_matrix(0).is_err());
    }

    #[test]
    fn a2_quark_basis() {
        let cd = cartan_matrix(1).unwrap();
        let r = build_fundamental_rep(&cd, 2).unwrap();
        assert_eq!(words(&r), vec![vec![], vec![2], vec![2, 1]]);
        assert_eq!(r.basis[0].weight, [0, 1]);
        assert_eq!(r.basis[1].weight, [1, -1]);
    }

    #[test]
    fn b2_dims_by_label() {
        let [r1, r2] = fundamental_pair(2).unwrap();
        assert_eq!((r1.dim, r2.dim), (4, 5));
        assert_eq!(words(&r1), vec![vec![], vec![1], vec![1, 2], vec![1, 2, 1]]);
    }

    #[test]
    fn g2_adjoint_gram_is_diagonal_positive() {
        let [r1, r2] = fundamental_pair(3).unwrap();
        assert_eq!((r1.dim, r2.dim), (7, 14));
        assert!(r2.norms.iter().all(|n| *n > rat(0, 1)));
        // two words share the zero weight
        let zero: Vec<_> = r2.basis.iter().filter(|b| b.weight == [0, 0]).collect();
        assert_eq!(zero.len(), 2);
    }

    #[test]
    fn perturbed_generator_is_detected() {
        let cd = cartan_matrix(1).unwrap();
        let r = build_fundamental_rep(&cd, 2).unwrap();
        let mut e1 = r.e(1).clone();
        e1[(1, 2)] += rat(1, 1);
        let bad = r.with_e(1, e1);
        let rep = verify_defining_relations(&bad);
        assert!(!rep.all_zero());
        assert!(rep
            .relations
            .iter()
            .any(|x| x.relation.starts_with("[E1,F1]") && !x.zero));
    }

    #[test]
    fn bracket_identity_is_zero() {
        let cd = cartan_matrix(1).unwrap();
        let r = build_fundamental_rep(&cd, 2).unwrap();
        let i = Matrix::identity(r.dim);
        assert!(bracket(&i, r.e(1)).unwrap().is_zero());
        assert_eq!(bracket(r.e(1), r.f(1)).unwrap(), *r.h(1));
    }

    #[test]
    fn root_word_parse_and_transpose() {
        let w = RootWord::parse("[[2,1],1]").unwrap();
        assert_eq!(w.to_string(), "[[2,1],1]");
        assert_eq!(w.transposed().to_string(), "[1,[1,2]]");
        assert_eq!(w.letters(), vec![2, 1, 1]);
        assert!(RootWord::parse("[1,3]").is_err());
        assert!(RootWord::parse("[1,2").is_err());
    }

    #[test]
    fn kets_and_bras_use_written_order() {
        let cd = cartan_matrix(1).unwrap();
        let r = build_fundamental_rep(&cd, 2).unwrap();
        // X1^- X2^- |2> is the third basis vector
        let v = r.ket(&[1, 2]).unwrap();
        assert_eq!(v, vec![rat(0, 1), rat(0, 1), rat(1, 1)]);
        assert!(r.ket(&[2, 1]).unwrap().iter().all(Scalar::is_zero));
        assert!(r.ket(&[3]).is_err());
        // <2| X2^+ X1^+ pairs with it
        let b = r.bra(&[2, 1]).unwrap();
        assert_eq!(b[2], r.norms[2]);
    }
}
