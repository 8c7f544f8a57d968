//! Combing pure braids on surfaces with boundary.
//!
//! The combed normal form splits a braid as `α_1 α_2 ⋯ α_n`, where `α_k` only
//! uses generators with second index `j_k`. Factor `k` equals the product of
//! the conjugates `u^v` of its letters `u` by the later letters `v` of smaller
//! second index. Every such `v` is a suffix of one word, so factor `k` is
//! described by that word and a list of (letter, suffix length) pairs, and
//! the conjugates unfold into a straight-line program of linear size.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fingerprint::{EqualityChecker, Verdict};
use crate::presentation::{conjugate_unchecked, free_reduce, push_reduced, BraidWord, Letter, SurfaceParams};
use crate::slp::{CompressedWord, SlpJson, Symbol};

/// Summary of one combed factor: the conjugating word `v` and, for each
/// letter of the factor in order, its signed first index `c` and the length
/// `d` of the suffix of `v` it is conjugated by.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairEncoding {
    pub k: u32,
    pub v: BraidWord,
    pub pairs: Vec<(i64, usize)>,
}

impl PairEncoding {
    /// Number of integers needed to store the encoding.
    pub fn encoded_len(&self) -> usize {
        self.v.len() + 2 * self.pairs.len()
    }
}

/// Two linear passes over `w`.
pub fn extract_factor_encoding(w: &[Letter], k: u32, params: &SurfaceParams) -> PairEncoding {
    let jk = params.strand_index(k);
    let Some(start) = w.iter().position(|l| l.second() == jk) else {
        return PairEncoding { k, v: BraidWord::new(), pairs: Vec::new() };
    };
    let v: BraidWord = w[start + 1..].iter().copied().filter(|l| l.second() < jk).collect();
    let mut remaining = v.len();
    let mut pairs = Vec::new();
    for &letter in &w[start..] {
        if letter.second() < jk {
            remaining -= 1;
        } else if letter.second() == jk {
            pairs.push((letter.sign() as i64 * letter.first() as i64, remaining));
        }
    }
    PairEncoding { k, v, pairs }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleLabel {
    /// The conjugate of letter `c` by the suffix of length `d`.
    Pair { c: i64, d: usize },
    Root,
}

/// A factor program together with the meaning of each rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorSlp {
    pub k: u32,
    pub slp: CompressedWord,
    pub labels: Vec<RuleLabel>,
}

impl FactorSlp {
    fn label_name(&self, label: RuleLabel) -> String {
        match label {
            RuleLabel::Pair { c, d } => format!("X_{{{c},{d}}}"),
            RuleLabel::Root => format!("X_{}", self.k),
        }
    }

    /// Rules written with `X_{c,d}` names; terminals appear as `X_{c,0}`.
    pub fn labelled_rules(&self) -> Vec<(String, Vec<String>)> {
        (0..self.slp.num_rules())
            .map(|r| {
                let rhs = self
                    .slp
                    .rule(r)
                    .iter()
                    .map(|s| match *s {
                        Symbol::Terminal(l) => format!("X_{{{},0}}", l.sign() as i64 * l.first() as i64),
                        Symbol::Rule(q) => self.label_name(self.labels[q as usize]),
                    })
                    .collect();
                (self.label_name(self.labels[r]), rhs)
            })
            .collect()
    }
}

/// Builds the program for factor `enc.k`. Only the `(c, d)` symbols reachable
/// from the root are created; they are ordered by `d`, then `c`, and the root
/// comes last.
pub fn build_factor_slp(enc: &PairEncoding, params: &SurfaceParams) -> FactorSlp {
    let jk = params.strand_index(enc.k);
    let width = (jk - 1) as i64;
    let span = (2 * width + 1) as usize;
    let slot = |c: i64| (c + width) as usize;
    let letter_of = |c: i64| Letter::with_sign(c.unsigned_abs() as u32, jk, c < 0);
    let two_g = params.two_g();
    let vlen = enc.v.len();
    let conjugator = |d: usize| enc.v[vlen - d];

    let max_d = enc.pairs.iter().map(|&(_, d)| d).max().unwrap_or(0);
    // ids[d * span + slot(c)]: rule index of X_{c,d}, NONE if unreachable.
    const NONE: u32 = u32::MAX;
    const WANTED: u32 = u32::MAX - 1;
    let mut ids = vec![NONE; (max_d + 1) * span];
    for &(c, d) in &enc.pairs {
        if d > 0 {
            ids[d * span + slot(c)] = WANTED;
        }
    }
    for d in (2..=max_d).rev() {
        let a = conjugator(d);
        for s in 0..span {
            if ids[d * span + s] == WANTED {
                let c = s as i64 - width;
                for b in conjugate_unchecked(letter_of(c), a, two_g).as_slice() {
                    ids[(d - 1) * span + slot(b.sign() as i64 * b.first() as i64)] = WANTED;
                }
            }
        }
    }

    let mut rhs = Vec::new();
    let mut starts = vec![0];
    let mut labels = Vec::new();
    let code = |b: &Letter| b.sign() as i64 * b.first() as i64;
    for d in 1..=max_d {
        let a = conjugator(d);
        for s in 0..span {
            if ids[d * span + s] != WANTED {
                continue;
            }
            let c = s as i64 - width;
            for b in conjugate_unchecked(letter_of(c), a, two_g).as_slice() {
                rhs.push(if d == 1 {
                    Symbol::Terminal(*b)
                } else {
                    Symbol::Rule(ids[(d - 1) * span + slot(code(b))])
                });
            }
            ids[d * span + s] = labels.len() as u32;
            labels.push(RuleLabel::Pair { c, d });
            starts.push(rhs.len());
        }
    }
    for &(c, d) in &enc.pairs {
        rhs.push(if d == 0 { Symbol::Terminal(letter_of(c)) } else { Symbol::Rule(ids[d * span + slot(c)]) });
    }
    starts.push(rhs.len());
    labels.push(RuleLabel::Root);

    let slp = CompressedWord::from_raw(params.factor_generators(enc.k), rhs, starts);
    FactorSlp { k: enc.k, slp, labels }
}

/// `19 (2g + p + n) m`.
pub fn size_bound(params: &SurfaceParams, m: usize) -> u128 {
    19 * (2 * params.g as u128 + params.p as u128 + params.n as u128) * m as u128
}

/// Combed normal form with factors `2..n` kept compressed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombedNormalForm {
    pub params: SurfaceParams,
    /// Freely reduced; every letter has second index `j_1`.
    pub factor1: BraidWord,
    /// Factors `k = 2..n`, in order.
    pub factors: Vec<FactorSlp>,
}

impl CombedNormalForm {
    pub fn sizes(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.slp.size()).collect()
    }

    pub fn eval_lengths(&self) -> Vec<BigUint> {
        self.factors.iter().map(|f| f.slp.eval_length()).collect()
    }

    /// Factor `k` (1-based) expanded and reduced, if no intermediate exceeds
    /// `max_len`.
    pub fn reduced_factor(&self, k: u32, max_len: u64) -> Result<BraidWord> {
        if k == 1 {
            return Ok(self.factor1.clone());
        }
        self.factors[(k - 2) as usize].slp.reduced_word(max_len)
    }

    pub fn to_json(&self) -> CombedJson {
        CombedJson {
            params: self.params,
            factor1: self.factor1.to_string(),
            factors: self.factors.iter().map(|f| f.slp.to_json()).collect(),
            sizes: self.sizes(),
            eval_lengths: self.eval_lengths().iter().map(|l| l.to_string()).collect(),
        }
    }
}

/// Wire form of a combed normal form; big integers travel as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombedJson {
    pub params: SurfaceParams,
    pub factor1: String,
    pub factors: Vec<SlpJson>,
    pub sizes: Vec<usize>,
    pub eval_lengths: Vec<String>,
}

fn check_bounded(w: &[Letter], params: &SurfaceParams) -> Result<()> {
    if params.closed {
        return Err(Error::InvalidParams("combing needs a surface with boundary".into()));
    }
    params.check_word(w)
}

/// Polynomial-size combing: factor 1 as a plain word, the rest as programs.
pub fn comb_compressed(w: &[Letter], params: &SurfaceParams) -> Result<CombedNormalForm> {
    check_bounded(w, params)?;
    let factor1 = free_reduce(&BraidWord::from(w.to_vec()).subsequence_with_second(params.first_strand()));
    let factors = (2..=params.n)
        .map(|k| build_factor_slp(&extract_factor_encoding(w, k, params), params))
        .collect();
    Ok(CombedNormalForm { params: *params, factor1, factors })
}

/// Classical combing into reduced plain words `w_1..w_n`.
///
/// Letters are appended one at a time to an already combed word: a letter of
/// strand `k` is pushed left past the factors `k+1..n`, conjugating each of
/// their letters. `budget` caps the total number of letters produced by
/// conjugation; exponential blowup shows up as [`Error::BudgetExceeded`].
pub fn comb_classical(w: &[Letter], params: &SurfaceParams, budget: u64) -> Result<Vec<BraidWord>> {
    check_bounded(w, params)?;
    let n = params.n as usize;
    let two_g = params.two_g();
    let mut factors: Vec<Vec<Letter>> = vec![Vec::new(); n];
    let mut spent = 0u64;
    let mut scratch = Vec::new();
    for &x in w {
        let k = params.strand_of(x.second()).expect("validated") as usize - 1;
        for factor in &mut factors[k + 1..] {
            scratch.clear();
            for &u in factor.iter() {
                let image = conjugate_unchecked(u, x, two_g);
                spent += image.as_slice().len() as u64;
                for &b in image.as_slice() {
                    push_reduced(&mut scratch, b);
                }
            }
            if spent > budget {
                return Err(Error::BudgetExceeded { budget });
            }
            std::mem::swap(factor, &mut scratch);
        }
        push_reduced(&mut factors[k], x);
    }
    Ok(factors.into_iter().map(BraidWord::from).collect())
}

/// Factor-by-factor outcome of comparing two braids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub factor1_equal: bool,
    /// Verdicts for factors `2..n`.
    pub factors: Vec<Verdict>,
}

impl Comparison {
    pub fn equal(&self) -> bool {
        self.factor1_equal && self.factors.iter().all(|v| v.equal)
    }
}

/// Compares two combed forms factor by factor.
pub fn compare_combed(a: &CombedNormalForm, b: &CombedNormalForm, checker: &EqualityChecker) -> Comparison {
    Comparison {
        factor1_equal: a.factor1 == b.factor1,
        factors: a
            .factors
            .iter()
            .zip(&b.factors)
            .map(|(x, y)| checker.free_group_eq_verdict(&x.slp, &y.slp))
            .collect(),
    }
}

pub fn compare_words(w1: &[Letter], w2: &[Letter], params: &SurfaceParams, checker: &EqualityChecker) -> Result<Comparison> {
    let a = comb_compressed(w1, params)?;
    let b = comb_compressed(w2, params)?;
    Ok(compare_combed(&a, &b, checker))
}

/// Word problem in the pure braid group of a surface with boundary.
pub fn words_equal(w1: &[Letter], w2: &[Letter], params: &SurfaceParams, checker: &EqualityChecker) -> Result<bool> {
    compare_words(w1, w2, params, checker).map(|c| c.equal())
}

/// `(A(1,2)^-1 A(2,3))^-m A(3,4) (A(1,2)^-1 A(2,3))^m` in the 4-strand disc
/// group; its combed form has length exponential in `m`.
pub fn beta_m(m: usize) -> BraidWord {
    let (a12, a23, a34) = (Letter::new(1, 2), Letter::new(2, 3), Letter::new(3, 4));
    let mut out = Vec::with_capacity(4 * m + 1);
    for _ in 0..m {
        out.extend([a23.inv(), a12]);
    }
    out.push(a34);
    for _ in 0..m {
        out.extend([a12.inv(), a23]);
    }
    out.into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_word;

    fn w(s: &str) -> BraidWord {
        parse_word(s).unwrap()
    }

    fn p4() -> SurfaceParams {
        SurfaceParams::disc(4).unwrap()
    }

    #[test]
    fn encodings_of_seven_letter_word() {
        let word = w("A(1,2) A(1,4) A(1,2) A(2,3)^-1 A(2,4) A(1,3) A(1,2)");
        let e3 = extract_factor_encoding(&word, 3, &p4());
        assert_eq!(e3.v, w("A(1,2)"));
        assert_eq!(e3.pairs, [(-2, 1), (1, 1)]);
        let e4 = extract_factor_encoding(&word, 4, &p4());
        assert_eq!(e4.v, w("A(1,2) A(2,3)^-1 A(1,3) A(1,2)"));
        assert_eq!(e4.pairs, [(1, 4), (2, 2)]);
        let e2 = extract_factor_encoding(&word, 2, &p4());
        assert!(e2.v.is_empty());
        assert_eq!(e2.pairs, [(1, 0), (1, 0), (1, 0)]);
        let e1 = extract_factor_encoding(&word, 1, &p4());
        assert!(e1.pairs.is_empty());
    }

    #[test]
    fn worked_factor_program() {
        let word = w("A(1,4) A(1,3) A(2,4)^-1 A(1,2)");
        let f = build_factor_slp(&extract_factor_encoding(&word, 4, &p4()), &p4());
        let rules = f.labelled_rules();
        let names: Vec<&str> = rules.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(names, ["X_{-3,1}", "X_{-2,1}", "X_{-1,1}", "X_{1,1}", "X_{3,1}", "X_{1,2}", "X_4"]);
        assert_eq!(rules[6].1, ["X_{1,2}", "X_{-2,1}"]);
        assert_eq!(rules[5].1, ["X_{1,1}", "X_{3,1}", "X_{1,1}", "X_{-3,1}", "X_{-1,1}"]);
        assert_eq!(f.slp.size(), 22);
        // The printed 17-letter word is the expansion of X_{1,2}; the root
        // appends X_{-2,1}.
        let mut body = Vec::new();
        f.slp.expand_into(5, &mut |l| body.push(l));
        let printed = w("A(1,4) A(2,4) A(1,4) A(2,4)^-1 A(1,4)^-1 A(3,4) A(1,4) A(2,4) A(1,4) A(2,4)^-1 A(1,4)^-1 \
                         A(3,4)^-1 A(1,4) A(2,4) A(1,4)^-1 A(2,4)^-1 A(1,4)^-1");
        assert_eq!(body, printed.letters());
        let root = f.slp.evaluate(100).unwrap();
        assert_eq!(root, printed.concat(&w("A(1,4) A(2,4)^-1 A(1,4)^-1")));
        let classical = comb_classical(&word, &p4(), 1000).unwrap();
        assert_eq!(root.reduced(), classical[3]);
    }

    #[test]
    fn empty_encoding_gives_empty_program() {
        let enc = PairEncoding { k: 3, v: BraidWord::new(), pairs: vec![] };
        let f = build_factor_slp(&enc, &p4());
        assert!(f.slp.is_empty_word());
        assert_eq!(f.slp.size(), 0);
    }

    #[test]
    fn single_letter_word() {
        let params = SurfaceParams::bounded(1, 2, 3).unwrap();
        for k in 1..=3 {
            let letter = Letter::new(2, params.strand_index(k));
            let nf = comb_compressed(&[letter], &params).unwrap();
            for kk in 1..=3 {
                let f = nf.reduced_factor(kk, 100).unwrap();
                let expected = if kk == k { vec![letter] } else { vec![] };
                assert_eq!(f.letters(), &expected[..]);
            }
        }
    }

    #[test]
    fn empty_word_combs_to_trivial_factors() {
        let nf = comb_compressed(&[], &p4()).unwrap();
        assert!(nf.factor1.is_empty());
        assert_eq!(nf.sizes(), [0, 0, 0]);
        assert!(comb_classical(&[], &p4(), 10).unwrap().iter().all(|f| f.is_empty()));
    }

    #[test]
    fn beta_one_classical() {
        let beta = beta_m(1);
        assert_eq!(beta.len(), 5);
        assert_eq!(beta_m(2).len(), 9);
        let factors = comb_classical(&beta, &p4(), 1_000).unwrap();
        assert!(factors[..3].iter().all(|f| f.is_empty()));
        assert_eq!(factors[3], w("A(2,4) A(3,4) A(2,4)^-1"));
    }

    #[test]
    fn central_word_is_fixed_by_conjugation() {
        let g = w("A(1,2)^-1 A(2,3)");
        let word = g.inverse().concat(&w("A(1,4) A(2,4) A(3,4)")).concat(&g);
        let factors = comb_classical(&word, &p4(), 1_000).unwrap();
        assert!(factors[..3].iter().all(|f| f.is_empty()));
        assert_eq!(factors[3], w("A(1,4) A(2,4) A(3,4)"));
    }

    #[test]
    fn already_combed_word() {
        let word = w("A(1,2) A(1,2) A(2,3)^-1 A(1,3) A(3,4) A(1,4)^-1");
        let factors = comb_classical(&word, &p4(), 100).unwrap();
        assert_eq!(factors[1], w("A(1,2) A(1,2)"));
        assert_eq!(factors[2], w("A(2,3)^-1 A(1,3)"));
        assert_eq!(factors[3], w("A(3,4) A(1,4)^-1"));
    }

    #[test]
    fn classical_budget() {
        assert!(matches!(comb_classical(&beta_m(6), &p4(), 100), Err(Error::BudgetExceeded { budget: 100 })));
    }

    #[test]
    fn closed_params_rejected() {
        let closed = SurfaceParams::closed(1, 2).unwrap();
        assert!(matches!(comb_compressed(&[], &closed), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn word_problem_examples() {
        let checker = EqualityChecker::default();
        let a = w("A(1,2) A(3,4)");
        let b = w("A(3,4) A(1,2)");
        assert!(words_equal(&a, &b, &p4(), &checker).unwrap());
        assert!(!words_equal(&w("A(1,2)"), &w("A(1,3)"), &p4(), &checker).unwrap());
        let padded = a.concat(&w("A(1,2) A(1,2)^-1"));
        assert!(words_equal(&a, &padded, &p4(), &checker).unwrap());
    }
}
