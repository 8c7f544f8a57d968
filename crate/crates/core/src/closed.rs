//! Pure braids on closed orientable surfaces of genus `g >= 1`.
//!
//! Here `P_n(S)` splits as `π1(S) ⋉ P_{n-1}(S \ {p_1})`. The section
//! [`section_s`] lifts surface-group words to braids, [`project`] forgets all
//! strands but the first, and [`f_rewrite`] identifies the kernel with the
//! pure braid group of the once-bordered surface `S'`, where the compressed
//! word problem of [`crate::combing`] applies. Combing itself is classical
//! (exponential) here and every such path takes a letter budget.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::combing::{comb_compressed, CombedJson, CombedNormalForm};
use crate::error::{Error, Result};
use crate::presentation::{
    conjugate_by, conjugate_unchecked, free_reduce, push_reduced, BraidWord, Letter, Scanner,
    SurfaceParams,
};

/// `a_i^{±1}`, `1 <= i <= 2g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pi1Letter {
    pub index: u32,
    pub inverse: bool,
}

impl Pi1Letter {
    pub const fn new(index: u32) -> Self {
        Self { index, inverse: false }
    }

    #[must_use]
    pub const fn inv(self) -> Self {
        Self { inverse: !self.inverse, ..self }
    }
}

impl fmt::Display for Pi1Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}{}", self.index, if self.inverse { "^-1" } else { "" })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Pi1Word(pub Vec<Pi1Letter>);

impl Pi1Word {
    pub fn letters(&self) -> &[Pi1Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[must_use]
    pub fn inverse(&self) -> Self {
        Self(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    #[must_use]
    pub fn concat(&self, other: &Self) -> Self {
        Self(self.0.iter().chain(&other.0).copied().collect())
    }

    #[must_use]
    pub fn reduced(&self) -> Self {
        let mut out: Vec<Pi1Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self(out)
    }

    pub fn check(&self, g: u32) -> Result<()> {
        match self.0.iter().find(|l| l.index == 0 || l.index > 2 * g) {
            Some(l) => Err(Error::InvalidParams(format!("{l} is not a generator of the genus-{g} surface group"))),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Pi1Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, l) in self.0.iter().enumerate() {
            if idx > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Pi1Word {
    type Err = Error;

    /// `a1 a2^-1 a3`; whitespace optional.
    fn from_str(text: &str) -> Result<Self> {
        let mut sc = Scanner { bytes: text.as_bytes(), pos: 0 };
        let mut out = Vec::new();
        loop {
            sc.skip_ws();
            if sc.at_end() {
                return Ok(Self(out));
            }
            sc.expect(b'a')?;
            let index = sc.int()?;
            let inverse = sc.exponent()?;
            out.push(Pi1Letter { index, inverse });
        }
    }
}

fn require_closed(params: &SurfaceParams) -> Result<()> {
    if params.closed {
        Ok(())
    } else {
        Err(Error::InvalidParams("this operation needs a closed surface".into()))
    }
}

/// `[x, y] = x y x^-1 y^-1`.
fn commutator<T: Copy>(x: T, y: T, inv: impl Fn(T) -> T) -> [T; 4] {
    [x, y, inv(x), inv(y)]
}

/// `[a_2g^-1, a_2g-1] ⋯ [a_2^-1, a_1]`, one commutator per handle.
pub fn surface_relator(g: u32) -> Pi1Word {
    Pi1Word(
        (1..=g)
            .rev()
            .flat_map(|h| commutator(Pi1Letter::new(2 * h).inv(), Pi1Letter::new(2 * h - 1), Pi1Letter::inv))
            .collect(),
    )
}

/// The surface relator written in the generators `A(i, j)`, `i <= 2g`.
pub fn commutator_product(g: u32, j: u32) -> BraidWord {
    lift(&surface_relator(g), j)
}

fn lift(word: &Pi1Word, j: u32) -> BraidWord {
    word.0.iter().map(|l| Letter::with_sign(l.index, j, l.inverse)).collect()
}

/// `B_k = A(2g, j_k) A(j_1, j_k) ⋯ A(j_{k-1}, j_k)`.
pub fn b_k(params: &SurfaceParams, k: u32) -> Result<BraidWord> {
    require_closed(params)?;
    if k == 0 || k > params.n {
        return Err(Error::InvalidParams(format!("strand {k} out of range 1..={}", params.n)));
    }
    let jk = params.strand_index(k);
    Ok(std::iter::once(Letter::new(params.two_g(), jk))
        .chain((1..k).map(|t| Letter::new(params.strand_index(t), jk)))
        .collect())
}

fn section_with(gamma: &Pi1Word, params: &SurfaceParams, image: impl Fn(u32) -> BraidWord) -> Result<BraidWord> {
    require_closed(params)?;
    gamma.check(params.g)?;
    let images: Vec<BraidWord> = (1..=params.two_g()).map(image).collect();
    let mut out = BraidWord::new();
    for l in &gamma.0 {
        let img = &images[l.index as usize - 1];
        if l.inverse {
            out.extend_from(&img.inverse());
        } else {
            out.extend_from(img);
        }
    }
    Ok(out)
}

fn b_product(params: &SurfaceParams, from: u32) -> BraidWord {
    let mut out = BraidWord::new();
    for k in from..=params.n {
        out.extend_from(&b_k(params, k).expect("closed and in range"));
    }
    out
}

/// The section `a_i -> A(i, j_1)` for `i < 2g`, `a_2g -> B_1 ⋯ B_n`.
pub fn section_s(gamma: &Pi1Word, params: &SurfaceParams) -> Result<BraidWord> {
    require_closed(params)?;
    let j1 = params.first_strand();
    let top = b_product(params, 1);
    section_with(gamma, params, |i| if i == params.two_g() { top.clone() } else { Letter::new(i, j1).into_word() })
}

/// The alternative section `a_i -> A(i, j_1)` for odd `i` and
/// `a_i -> A(i, j_1) B_2 ⋯ B_n` for even `i`.
pub fn section_rho(gamma: &Pi1Word, params: &SurfaceParams) -> Result<BraidWord> {
    require_closed(params)?;
    let j1 = params.first_strand();
    let tail = b_product(params, 2);
    section_with(gamma, params, |i| {
        let head = Letter::new(i, j1).into_word();
        if i % 2 == 0 {
            head.concat(&tail)
        } else {
            head
        }
    })
}

trait IntoWord {
    fn into_word(self) -> BraidWord;
}

impl IntoWord for Letter {
    fn into_word(self) -> BraidWord {
        BraidWord::from(vec![self])
    }
}

/// Forgets every strand but the first.
pub fn project(w: &[Letter], params: &SurfaceParams) -> Result<Pi1Word> {
    require_closed(params)?;
    params.check_word(w)?;
    let j1 = params.first_strand();
    Ok(Pi1Word(
        w.iter()
            .filter(|l| l.second() == j1)
            .map(|l| Pi1Letter { index: l.first(), inverse: l.is_inverse() })
            .collect(),
    ))
}

/// Both sides of the closed-surface relation for strand `k`:
/// the commutator product over `A(i, j_k)` and
/// `∏_{l=2g+1}^{j_k-1} A(l, j_k) ∏_{j=j_k+1}^{2g+n} A(j_k, j)`.
pub fn tr_relation(params: &SurfaceParams, k: u32) -> Result<(BraidWord, BraidWord)> {
    require_closed(params)?;
    if k == 0 || k > params.n {
        return Err(Error::InvalidParams(format!("strand {k} out of range 1..={}", params.n)));
    }
    let jk = params.strand_index(k);
    let lhs = commutator_product(params.g, jk);
    let rhs = (params.two_g() + 1..jk)
        .map(|l| Letter::new(l, jk))
        .chain((jk + 1..=params.last_strand()).map(|j| Letter::new(jk, j)))
        .collect();
    Ok((lhs, rhs))
}

/// The once-bordered surface `S'` obtained by removing the first point.
pub fn punctured_params(params: &SurfaceParams) -> Result<SurfaceParams> {
    require_closed(params)?;
    SurfaceParams::bounded(params.g, 1, params.n - 1)
}

/// Rewrites a word in the kernel generators (second index at least `j_2`)
/// as a word in the generators of `P_{n-1}(S')`.
pub fn f_rewrite(w: &[Letter], params: &SurfaceParams) -> Result<BraidWord> {
    require_closed(params)?;
    params.check_word(w)?;
    let j1 = params.first_strand();
    if let Some(&bad) = w.iter().find(|l| l.second() == j1) {
        return Err(Error::NotKernel(bad));
    }
    let target = punctured_params(params)?;
    let two_g = params.two_g();
    let mut out = BraidWord::new();
    for &letter in w {
        let k = params.strand_of(letter.second()).expect("validated");
        let j_prev = target.strand_index(k - 1);
        let i = letter.first();
        let image: BraidWord = if i <= two_g {
            Letter::new(i, j_prev).into_word()
        } else if i == two_g + 1 {
            let correction: BraidWord = (1..k - 1)
                .map(|t| Letter::new(target.strand_index(t), j_prev))
                .chain((k..params.n).map(|t| Letter::new(j_prev, target.strand_index(t))))
                .collect();
            commutator_product(params.g, j_prev).concat(&correction.inverse())
        } else {
            Letter::new(i - 1, j_prev).into_word()
        };
        if letter.is_inverse() {
            out.extend_from(&image.inverse());
        } else {
            out.extend_from(&image);
        }
    }
    Ok(out)
}

/// A match of (a prefix of) a cyclic conjugate of the relator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct RelatorMatch {
    start: usize,
    len: usize,
    inverse: bool,
    offset: usize,
}

/// All cyclic rotations of the relator, then of its inverse.
fn rotations(g: u32) -> Vec<(bool, usize, Vec<Pi1Letter>)> {
    let r = surface_relator(g);
    let ri = r.inverse();
    let n = r.len();
    let mut out = Vec::with_capacity(2 * n);
    for (inverse, word) in [(false, &r), (true, &ri)] {
        for offset in 0..n {
            let rot = (0..n).map(|t| word.0[(offset + t) % n]).collect();
            out.push((inverse, offset, rot));
        }
    }
    out
}

/// Leftmost start, then longest match, then relator before inverse, then
/// smaller rotation offset.
fn find_half_relator(word: &[Pi1Letter], rots: &[(bool, usize, Vec<Pi1Letter>)], rel_len: usize) -> Option<RelatorMatch> {
    for start in 0..word.len() {
        let mut best: Option<RelatorMatch> = None;
        for (inverse, offset, rot) in rots {
            let len = word[start..].iter().zip(rot).take_while(|(a, b)| a == b).count();
            if 2 * len > rel_len && best.is_none_or(|b| len > b.len) {
                best = Some(RelatorMatch { start, len, inverse: *inverse, offset: *offset });
            }
        }
        if best.is_some() {
            return best;
        }
    }
    None
}

/// For genus 1: the leftmost `a2^± a1^±`, which is the first half of a
/// rotation of the relator or its inverse.
fn find_torus_swap(word: &[Pi1Letter], rots: &[(bool, usize, Vec<Pi1Letter>)]) -> Option<RelatorMatch> {
    let start = word.windows(2).position(|p| p[0].index == 2 && p[1].index == 1)?;
    rots.iter()
        .find(|(_, _, rot)| rot[..2] == word[start..start + 2])
        .map(|(inverse, offset, _)| RelatorMatch { start, len: 2, inverse: *inverse, offset: *offset })
}

/// Normal form in the surface group. For the torus this is `a1^x a2^y`; for
/// higher genus it is the result of Dehn's algorithm with a fixed scan order,
/// which is the empty word exactly for trivial elements.
pub fn pi1_normal_form(gamma: &Pi1Word, g: u32) -> Pi1Word {
    assert!(g >= 1, "the sphere is not supported");
    if g == 1 {
        let (mut x, mut y) = (0i64, 0i64);
        for l in &gamma.0 {
            let e = if l.inverse { -1 } else { 1 };
            if l.index == 1 {
                x += e;
            } else {
                y += e;
            }
        }
        let power = |index: u32, e: i64| {
            std::iter::repeat(Pi1Letter { index, inverse: e < 0 }).take(e.unsigned_abs() as usize)
        };
        return Pi1Word(power(1, x).chain(power(2, y)).collect());
    }
    let rots = rotations(g);
    let rel_len = 8 * g as usize / 2;
    let mut word = gamma.reduced().0;
    while let Some(m) = find_half_relator(&word, &rots, rel_len) {
        let rot = &rots.iter().find(|(i, o, _)| *i == m.inverse && *o == m.offset).unwrap().2;
        let replacement = Pi1Word(rot[m.len..].to_vec()).inverse();
        word.splice(m.start..m.start + m.len, replacement.0);
        word = Pi1Word(word).reduced().0;
    }
    Pi1Word(word)
}

/// Equality in the surface group.
pub fn pi1_equal(a: &Pi1Word, b: &Pi1Word, g: u32) -> bool {
    if g == 1 {
        return pi1_normal_form(a, g) == pi1_normal_form(b, g);
    }
    pi1_normal_form(&a.concat(&b.inverse()), g).is_empty()
}

/// Splits `w` as `w1 · rest` (same braid), where `w1` only has first-strand
/// letters and `rest` none, by pushing first-strand letters to the left.
pub fn closed_comb_stage1(w: &[Letter], params: &SurfaceParams, budget: u64) -> Result<(BraidWord, BraidWord)> {
    require_closed(params)?;
    params.check_word(w)?;
    let j1 = params.first_strand();
    let two_g = params.two_g();
    let (mut head, mut rest): (Vec<Letter>, Vec<Letter>) = (Vec::new(), Vec::new());
    let mut scratch = Vec::new();
    let mut spent = 0u64;
    for &x in w {
        if x.second() != j1 {
            push_reduced(&mut rest, x);
            continue;
        }
        scratch.clear();
        for &u in &rest {
            let image = conjugate_unchecked(u, x, two_g);
            spent += image.as_slice().len() as u64;
            for &b in image.as_slice() {
                push_reduced(&mut scratch, b);
            }
        }
        if spent > budget {
            return Err(Error::BudgetExceeded { budget });
        }
        std::mem::swap(&mut rest, &mut scratch);
        push_reduced(&mut head, x);
    }
    Ok((head.into(), rest.into()))
}

/// Rewrites a first-strand word that is trivial in the surface group as a
/// kernel word representing the same braid.
///
/// Each step replaces a long piece `s` of a rotation `s t` of the relator by
/// `t^-1`. The lifted relator equals a kernel word, so the lifted piece is a
/// kernel word times `L(t)^-1`; that kernel word is pushed to the right end.
fn eliminate_first_strand(head: &[Letter], params: &SurfaceParams, budget: u64) -> Result<BraidWord> {
    let g = params.g;
    let j1 = params.first_strand();
    let rots = rotations(g);
    let rel_len = surface_relator(g).len();
    let (_, kernel_rhs) = tr_relation(params, 1)?;
    let kernel_of = [kernel_rhs.clone(), kernel_rhs.inverse()];
    let relator_word = [surface_relator(g), surface_relator(g).inverse()];

    let mut word = Pi1Word(head.iter().map(|l| Pi1Letter { index: l.first(), inverse: l.is_inverse() }).collect())
        .reduced()
        .0;
    // Kernel words produced so far, as a product E_m ⋯ E_1.
    let mut kernel: Vec<Letter> = Vec::new();
    let mut spent = 0u64;
    while !word.is_empty() {
        let found =
            if g == 1 { find_torus_swap(&word, &rots) } else { find_half_relator(&word, &rots, rel_len) };
        let Some(m) = found else {
            return Err(Error::ReductionStuck(lift(&Pi1Word(word), j1).to_string()));
        };
        let rot = &rots.iter().find(|(i, o, _)| *i == m.inverse && *o == m.offset).unwrap().2;
        let tail = Pi1Word(rot[m.len..].to_vec());
        // rotation = x^-1 R x, with x the first `offset` letters of R (or R^-1).
        let x = lift(&Pi1Word(relator_word[m.inverse as usize].0[..m.offset].to_vec()), j1);
        let rotated_kernel = conjugate_by(&kernel_of[m.inverse as usize], &x, params, budget)?;

        let mut next: Vec<Letter> = lift(&Pi1Word(word[..m.start].to_vec()), j1).into_letters();
        let after: Vec<Pi1Letter> = tail.inverse().0.into_iter().chain(word[m.start + m.len..].iter().copied()).collect();
        let after_lift = lift(&Pi1Word(after.clone()), j1);
        let moved = conjugate_by(&rotated_kernel, &after_lift, params, budget)?;
        spent += moved.len() as u64;
        if spent > budget {
            return Err(Error::BudgetExceeded { budget });
        }
        let mut combined = moved.into_letters();
        combined.extend_from_slice(&kernel);
        kernel = free_reduce(&combined).into_letters();
        next.extend(after_lift.letters());
        word = Pi1Word(next.iter().map(|l| Pi1Letter { index: l.first(), inverse: l.is_inverse() }).collect())
            .reduced()
            .0;
    }
    Ok(kernel.into())
}

/// `w = section_s(gamma) · kernel`, with the kernel combed over `S'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedDecomposition {
    pub gamma: Pi1Word,
    /// The kernel word in the generators of `P_{n-1}(S')`.
    pub kernel_word: BraidWord,
    /// `None` for a single strand, where the kernel is trivial.
    pub kernel: Option<CombedNormalForm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedJson {
    pub gamma: String,
    pub kernel: Option<CombedJson>,
}

impl ClosedDecomposition {
    pub fn to_json(&self) -> ClosedJson {
        ClosedJson { gamma: self.gamma.to_string(), kernel: self.kernel.as_ref().map(|k| k.to_json()) }
    }
}

/// Combs a braid on a closed surface: the surface-group part in normal form
/// and the kernel part combed (compressed) over `S'`.
pub fn closed_comb(w: &[Letter], params: &SurfaceParams, budget: u64) -> Result<ClosedDecomposition> {
    require_closed(params)?;
    params.check_word(w)?;
    let gamma = pi1_normal_form(&project(w, params)?, params.g);
    let mut shifted = section_s(&gamma, params)?.inverse();
    shifted.extend_from(w);
    let (head, rest) = closed_comb_stage1(&shifted, params, budget)?;
    let mut kernel = eliminate_first_strand(&head, params, budget)?;
    kernel.extend_from(&rest);
    let kernel = free_reduce(&kernel);
    if params.n == 1 {
        return Ok(ClosedDecomposition { gamma, kernel_word: BraidWord::new(), kernel: None });
    }
    let target = punctured_params(params)?;
    let kernel_word = free_reduce(&f_rewrite(&kernel, params)?);
    let combed = comb_compressed(&kernel_word, &target)?;
    Ok(ClosedDecomposition { gamma, kernel_word, kernel: Some(combed) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combing::compare_words;
    use crate::fingerprint::EqualityChecker;
    use crate::presentation::relation_instances;

    fn pw(s: &str) -> Pi1Word {
        s.parse().unwrap()
    }

    fn kernel_trivial(word: &[Letter], params: &SurfaceParams) -> bool {
        let target = punctured_params(params).unwrap();
        let image = f_rewrite(word, params).unwrap();
        compare_words(&image, &[], &target, &EqualityChecker::default()).unwrap().equal()
    }

    #[test]
    fn pi1_words_round_trip() {
        let w = pw("a1 a2^-1  a3");
        assert_eq!(w.to_string(), "a1 a2^-1 a3");
        assert_eq!(w.to_string().parse::<Pi1Word>().unwrap(), w);
        assert!("b1".parse::<Pi1Word>().is_err());
        assert!(pw("a5").check(2).is_err());
    }

    #[test]
    fn relator_shape() {
        assert_eq!(surface_relator(1), pw("a2^-1 a1 a2 a1^-1"));
        assert_eq!(surface_relator(2), pw("a4^-1 a3 a4 a3^-1 a2^-1 a1 a2 a1^-1"));
    }

    #[test]
    fn b_k_and_section_images() {
        let params = SurfaceParams::closed(1, 3).unwrap();
        assert_eq!(b_k(&params, 1).unwrap(), "A(2,3)".parse().unwrap());
        assert_eq!(b_k(&params, 3).unwrap(), "A(2,5) A(3,5) A(4,5)".parse().unwrap());
        let top = section_s(&pw("a2"), &params).unwrap();
        assert_eq!(top, "A(2,3) A(2,4) A(3,4) A(2,5) A(3,5) A(4,5)".parse().unwrap());
        assert_eq!(project(&top, &params).unwrap(), pw("a2"));
        assert_eq!(section_s(&pw("a1^-1"), &params).unwrap(), "A(1,3)^-1".parse().unwrap());
        let rho = section_rho(&pw("a1 a2"), &params).unwrap();
        assert_eq!(project(&rho, &params).unwrap(), pw("a1 a2"));
    }

    #[test]
    fn torus_normal_form_sorts_exponents() {
        assert_eq!(pi1_normal_form(&pw("a2 a1 a2^-1 a1 a2"), 1), pw("a1 a1 a2"));
        assert!(pi1_equal(&pw("a1 a2"), &pw("a2 a1"), 1));
        assert!(!pi1_equal(&pw("a1"), &pw("a2"), 1));
    }

    #[test]
    fn dehn_reduction() {
        assert!(pi1_normal_form(&surface_relator(2), 2).is_empty());
        assert!(pi1_normal_form(&surface_relator(2).inverse(), 2).is_empty());
        let short = pw("a1 a3^-1");
        assert_eq!(pi1_normal_form(&short, 2), short);
        let conj = pw("a3 a1").concat(&surface_relator(2)).concat(&pw("a1^-1 a3^-1"));
        assert!(pi1_normal_form(&conj, 2).is_empty());
        assert!(!pi1_equal(&pw("a1 a2"), &pw("a2 a1"), 2));
    }

    #[test]
    fn stage1_separates_first_strand() {
        let params = SurfaceParams::closed(1, 2).unwrap();
        let w: BraidWord = "A(3,4) A(1,3) A(2,4)^-1 A(2,3)".parse().unwrap();
        let (head, rest) = closed_comb_stage1(&w, &params, 1000).unwrap();
        assert!(head.iter().all(|l| l.second() == 3));
        assert!(rest.iter().all(|l| l.second() == 4));
        assert_eq!(head, "A(1,3) A(2,3)".parse().unwrap());
    }

    #[test]
    fn f_rewrite_images() {
        let params = SurfaceParams::closed(1, 3).unwrap();
        assert_eq!(f_rewrite(&[Letter::new(2, 4)], &params).unwrap(), "A(2,3)".parse().unwrap());
        assert_eq!(f_rewrite(&[Letter::new(4, 5)], &params).unwrap(), "A(3,4)".parse().unwrap());
        let image = f_rewrite(&[Letter::new(3, 4)], &params).unwrap();
        assert_eq!(image, "A(2,3)^-1 A(1,3) A(2,3) A(1,3)^-1 A(3,4)^-1".parse().unwrap());
        assert!(matches!(f_rewrite(&[Letter::new(1, 3)], &params), Err(Error::NotKernel(_))));
    }

    #[test]
    fn kernel_relations_survive_rewriting() {
        for (g, n) in [(1, 2), (1, 3), (2, 2), (2, 3)] {
            let params = SurfaceParams::closed(g, n).unwrap();
            let j1 = params.first_strand();
            for (a, u) in relation_instances(&params) {
                if a.second() == j1 || u.second() == j1 {
                    continue;
                }
                let lhs = vec![a.inv(), u, a];
                let rhs = conjugate_by(&[u], &[a], &params, 100).unwrap();
                let rel = BraidWord::from(lhs).concat(&rhs.inverse());
                assert!(kernel_trivial(&rel, &params), "{a} {u} on {params}");
            }
            for k in 2..=n {
                let (lhs, rhs) = tr_relation(&params, k).unwrap();
                assert!(kernel_trivial(&lhs.concat(&rhs.inverse()), &params), "TR({k}) on {params}");
            }
        }
    }

    #[test]
    fn section_of_relator_is_trivial() {
        for (g, n) in [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3)] {
            let params = SurfaceParams::closed(g, n).unwrap();
            let lifted = section_s(&surface_relator(g), &params).unwrap();
            let d = closed_comb(&lifted, &params, 1 << 20).unwrap();
            assert!(d.gamma.is_empty());
            if let Some(k) = &d.kernel {
                let checker = EqualityChecker::default();
                let empty = comb_compressed(&[], &k.params).unwrap();
                assert!(crate::combing::compare_combed(k, &empty, &checker).equal(), "{params}");
            }
        }
    }

    #[test]
    fn decomposition_recovers_parts() {
        let params = SurfaceParams::closed(1, 3).unwrap();
        let gamma = pw("a1 a2 a1");
        let kernel: BraidWord = "A(3,4) A(2,5)^-1 A(4,5)".parse().unwrap();
        let w = section_s(&gamma, &params).unwrap().concat(&kernel);
        let d = closed_comb(&w, &params, 1 << 20).unwrap();
        assert_eq!(d.gamma, pw("a1 a1 a2"));
        let json = serde_json::to_value(d.to_json()).unwrap();
        assert_eq!(json["gamma"], "a1 a1 a2");
        assert_eq!(json["kernel"]["params"]["n"], 2);
    }

    #[test]
    fn hidden_relators_move_into_the_kernel() {
        let checker = EqualityChecker::default();
        for (g, n) in [(1, 2), (1, 3), (2, 2), (2, 3)] {
            let params = SurfaceParams::closed(g, n).unwrap();
            let target = punctured_params(&params).unwrap();
            let padded = pw("a1 a2^-1").concat(&surface_relator(g)).concat(&pw("a2 a1^-1 a2"));
            let kernel: BraidWord = (2..=n)
                .flat_map(|k| {
                    let jk = params.strand_index(k);
                    [Letter::new(1, jk), Letter::new(2 * g + 1, jk).inv()]
                })
                .collect();
            let w = section_s(&padded, &params).unwrap().concat(&kernel);
            let d = closed_comb(&w, &params, 1 << 22).unwrap();
            assert!(pi1_equal(&d.gamma, &pw("a2"), g), "{params}");
            assert_eq!(d.gamma, pi1_normal_form(&pw("a2"), g));
            let expected = f_rewrite(&kernel, &params).unwrap();
            assert!(compare_words(&d.kernel_word, &expected, &target, &checker).unwrap().equal(), "{params}");
        }
    }

    #[test]
    fn bounded_surfaces_are_rejected() {
        let params = SurfaceParams::bounded(1, 1, 2).unwrap();
        assert!(section_s(&pw("a1"), &params).is_err());
        assert!(closed_comb(&[], &params, 10).is_err());
    }
}
