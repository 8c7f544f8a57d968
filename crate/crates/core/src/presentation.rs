//! Generators and conjugation relations of the pure braid group of an
//! orientable surface.
//!
//! A generator `A(i,j)` moves the point whose index is `j`; its first index
//! `i` says around what: a handle curve (`i <= 2g`), a boundary component, or
//! an earlier point. Combing needs exactly one operation from the relations:
//! rewriting a conjugate `a^-1 u a`, where `a` has a smaller second index than
//! `u`, as a short word whose letters all share the second index of `u`.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Genus, boundary count and strand count of the surface.
///
/// In closed mode `p` is ignored and reported as 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceParams {
    pub g: u32,
    pub p: u32,
    pub n: u32,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub closed: bool,
}

impl SurfaceParams {
    pub fn bounded(g: u32, p: u32, n: u32) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidParams("a bounded surface needs p >= 1".into()));
        }
        if n == 0 {
            return Err(Error::InvalidParams("at least one strand is required".into()));
        }
        Ok(Self { g, p, n, closed: false })
    }

    pub fn closed(g: u32, n: u32) -> Result<Self> {
        if g == 0 {
            return Err(Error::InvalidParams("the sphere is not supported (closed mode needs g >= 1)".into()));
        }
        if n == 0 {
            return Err(Error::InvalidParams("at least one strand is required".into()));
        }
        Ok(Self { g, p: 0, n, closed: true })
    }

    /// The classical pure braid group on `n` strands (the disc).
    pub fn disc(n: u32) -> Result<Self> {
        Self::bounded(0, 1, n)
    }

    /// Re-checks the invariants; useful after deserialization.
    pub fn validate(&self) -> Result<()> {
        if self.closed {
            Self::closed(self.g, self.n).map(|_| ())
        } else {
            Self::bounded(self.g, self.p, self.n).map(|_| ())
        }
    }

    pub fn two_g(&self) -> u32 {
        2 * self.g
    }

    fn offset(&self) -> u32 {
        if self.closed {
            2 * self.g
        } else {
            2 * self.g + self.p - 1
        }
    }

    /// `j_k`, the second index of the generators that move point `k` (1-based).
    pub fn strand_index(&self, k: u32) -> u32 {
        debug_assert!(k >= 1 && k <= self.n);
        self.offset() + k
    }

    pub fn first_strand(&self) -> u32 {
        self.strand_index(1)
    }

    pub fn last_strand(&self) -> u32 {
        self.strand_index(self.n)
    }

    /// Inverse of [`strand_index`](Self::strand_index).
    pub fn strand_of(&self, j: u32) -> Option<u32> {
        if j >= self.first_strand() && j <= self.last_strand() {
            Some(j - self.offset())
        } else {
            None
        }
    }

    pub fn is_valid(&self, letter: Letter) -> bool {
        letter.i >= 1 && letter.i < letter.j && self.strand_of(letter.j).is_some()
    }

    pub fn check_letter(&self, letter: Letter) -> Result<()> {
        if self.is_valid(letter) {
            Ok(())
        } else {
            Err(Error::InvalidLetter(letter))
        }
    }

    pub fn check_word(&self, word: &[Letter]) -> Result<()> {
        word.iter().try_for_each(|&l| self.check_letter(l))
    }

    /// All positive generators, ordered by second index then first index.
    pub fn generators(&self) -> Vec<Letter> {
        (1..=self.n)
            .flat_map(|k| {
                let j = self.strand_index(k);
                (1..j).map(move |i| Letter::new(i, j))
            })
            .collect()
    }

    /// Positive generators of the free factor moved by strand `k`.
    pub fn factor_generators(&self, k: u32) -> Vec<Letter> {
        let j = self.strand_index(k);
        (1..j).map(|i| Letter::new(i, j)).collect()
    }
}

impl fmt::Display for SurfaceParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.closed {
            write!(f, "closed g={} n={}", self.g, self.n)
        } else {
            write!(f, "g={} p={} n={}", self.g, self.p, self.n)
        }
    }
}

/// A signed generator `A(i,j)^{±1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    i: u32,
    j: u32,
    inverse: bool,
}

impl Letter {
    pub const fn new(i: u32, j: u32) -> Self {
        Self { i, j, inverse: false }
    }

    pub const fn with_sign(i: u32, j: u32, inverse: bool) -> Self {
        Self { i, j, inverse }
    }

    pub const fn first(self) -> u32 {
        self.i
    }

    pub const fn second(self) -> u32 {
        self.j
    }

    pub const fn is_inverse(self) -> bool {
        self.inverse
    }

    /// `+1` or `-1`.
    pub const fn sign(self) -> i8 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    #[must_use]
    pub const fn inv(self) -> Self {
        Self { inverse: !self.inverse, ..self }
    }

    /// The positive generator underlying this letter.
    #[must_use]
    pub const fn positive(self) -> Self {
        Self { inverse: false, ..self }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A({},{})", self.i, self.j)?;
        if self.inverse {
            f.write_str("^-1")?;
        }
        Ok(())
    }
}

/// A word in the generators. Validity against a surface is checked where the
/// word is used, via [`SurfaceParams::check_word`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BraidWord(Vec<Letter>);

impl BraidWord {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }

    pub fn extend_from(&mut self, other: &[Letter]) {
        self.0.extend_from_slice(other);
    }

    /// Formal inverse: reversed, every sign flipped.
    #[must_use]
    pub fn inverse(&self) -> Self {
        Self(inverse_of(&self.0))
    }

    #[must_use]
    pub fn concat(&self, other: &[Letter]) -> Self {
        let mut out = self.0.clone();
        out.extend_from_slice(other);
        Self(out)
    }

    #[must_use]
    pub fn reduced(&self) -> Self {
        free_reduce(&self.0)
    }

    /// Letters whose second index equals `j`, in order.
    pub fn subsequence_with_second(&self, j: u32) -> Self {
        self.0.iter().copied().filter(|l| l.j == j).collect()
    }
}

impl Deref for BraidWord {
    type Target = [Letter];

    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for BraidWord {
    fn from(letters: Vec<Letter>) -> Self {
        Self(letters)
    }
}

impl FromIterator<Letter> for BraidWord {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a BraidWord {
    type Item = &'a Letter;
    type IntoIter = std::slice::Iter<'a, Letter>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, letter) in self.0.iter().enumerate() {
            if idx > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{letter}")?;
        }
        Ok(())
    }
}

impl FromStr for BraidWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_word(s)
    }
}

pub fn inverse_of(word: &[Letter]) -> Vec<Letter> {
    word.iter().rev().map(|l| l.inv()).collect()
}

/// Iteratively deletes adjacent inverse pairs.
pub fn free_reduce(word: &[Letter]) -> BraidWord {
    let mut out = Vec::with_capacity(word.len());
    for &letter in word {
        push_reduced(&mut out, letter);
    }
    BraidWord(out)
}

/// Appends `letter` to an already reduced word, cancelling if possible.
pub(crate) fn push_reduced(word: &mut Vec<Letter>, letter: Letter) {
    if word.last() == Some(&letter.inv()) {
        word.pop();
    } else {
        word.push(letter);
    }
}

/// Parses the textual form `A(1,2) A(1,4)^-1`; whitespace between letters is
/// optional.
pub fn parse_word(text: &str) -> Result<BraidWord> {
    let mut parser = Scanner { bytes: text.as_bytes(), pos: 0 };
    let mut out = Vec::new();
    loop {
        parser.skip_ws();
        if parser.at_end() {
            return Ok(BraidWord(out));
        }
        let start = parser.pos;
        parser.expect(b'A')?;
        parser.expect(b'(')?;
        let i = parser.int()?;
        parser.expect(b',')?;
        let j = parser.int()?;
        parser.expect(b')')?;
        let inverse = parser.exponent()?;
        if i >= j {
            return Err(Error::Syntax {
                position: start,
                message: format!("first index {i} must be smaller than second index {j}"),
            });
        }
        out.push(Letter::with_sign(i, j, inverse));
    }
}

/// Parses and validates against `params`.
pub fn parse_word_for(text: &str, params: &SurfaceParams) -> Result<BraidWord> {
    let word = parse_word(text)?;
    params.check_word(&word)?;
    Ok(word)
}

pub fn format_word(word: &[Letter]) -> String {
    BraidWord(word.to_vec()).to_string()
}

pub(crate) struct Scanner<'a> {
    pub(crate) bytes: &'a [u8],
    pub(crate) pos: usize,
}

impl Scanner<'_> {
    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.bytes.len()
    }

    pub(crate) fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    pub(crate) fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax { position: self.pos, message: message.into() }
    }

    pub(crate) fn expect(&mut self, byte: u8) -> Result<()> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", byte as char)))
        }
    }

    pub(crate) fn int(&mut self) -> Result<u32> {
        let start = self.pos;
        match self.peek() {
            Some(b'1'..=b'9') => self.pos += 1,
            _ => return Err(self.error("expected a positive integer")),
        }
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Syntax { position: start, message: "integer out of range".into() })
    }

    /// Optional `^-1` / `^+1`; returns whether the letter is inverted.
    pub(crate) fn exponent(&mut self) -> Result<bool> {
        if self.peek() != Some(b'^') {
            return Ok(false);
        }
        self.pos += 1;
        let inverse = match self.peek() {
            Some(b'-') => true,
            Some(b'+') => false,
            _ => return Err(self.error("expected `^-1` or `^+1`")),
        };
        self.pos += 1;
        self.expect(b'1')?;
        Ok(inverse)
    }
}

/// The six relation families; each has an unprimed (positive conjugator) and
/// a primed (inverse conjugator) form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelationFamily {
    PR1,
    PR2,
    PR3,
    PR4,
    ER1,
    ER2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelationCase {
    pub family: RelationFamily,
    pub primed: bool,
}

impl fmt::Display for RelationCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.family, if self.primed { "'" } else { "" })
    }
}

/// Which index of the relation a template letter takes as its first index;
/// the second index is always that of the conjugated letter.
#[derive(Debug, Clone, Copy)]
enum Slot {
    /// First index of the conjugator.
    I,
    /// Second index of the conjugator.
    J,
    /// First index of the conjugated letter.
    R,
}

type Template = &'static [(Slot, bool)];

use Slot::{I, J, R};

const P: bool = false;
const N: bool = true;

/// Right-hand sides of `a^-1 A(r,s) a` for `a = A(i,j)` (column 0) and for
/// `a = A(i,j)^-1` (column 1). In ER1 the conjugator is `A(r+1,j)` and in ER2
/// it is `A(r-1,j)`, so `I` there denotes `r+1` and `r-1` respectively.
const TABLE: [[Template; 2]; 6] = [
    // PR1
    [&[(R, P)], &[(R, P)]],
    // PR2 (r = j)
    [
        &[(I, P), (J, P), (I, N)],
        &[(J, N), (I, N), (J, P), (I, P), (J, P)],
    ],
    // PR3 (r = i)
    [
        &[(I, P), (J, P), (I, P), (J, N), (I, N)],
        &[(J, N), (I, P), (J, P)],
    ],
    // PR4
    [
        &[(I, P), (J, P), (I, N), (J, N), (R, P), (J, P), (I, P), (J, N), (I, N)],
        &[(J, N), (I, N), (J, P), (I, P), (R, P), (I, N), (J, N), (I, P), (J, P)],
    ],
    // ER1 (i = r+1)
    [&[(R, P), (I, P), (J, N), (I, N)], &[(R, P), (J, P)]],
    // ER2 (i = r-1)
    [
        &[(I, P), (J, P), (I, N), (R, P), (J, P), (I, P), (J, N), (I, N)],
        &[(J, N), (R, P), (I, N), (J, N), (I, P), (J, P)],
    ],
];

/// Longest right-hand side in the table.
pub const MAX_IMAGE_LEN: usize = 9;

fn family_for(i: u32, j: u32, r: u32, two_g: u32) -> RelationFamily {
    use RelationFamily::*;
    if r == j {
        PR2
    } else if r > j || r + 1 < i {
        PR1
    } else if r + 1 == i {
        if r >= two_g || r % 2 == 0 {
            PR1
        } else {
            ER1
        }
    } else if r == i {
        PR3
    } else if r == i + 1 {
        if r > two_g || r % 2 == 1 {
            PR4
        } else {
            ER2
        }
    } else {
        PR4
    }
}

fn check_swappable(a: Letter, u: Letter, params: &SurfaceParams) -> Result<()> {
    params.check_letter(a)?;
    params.check_letter(u)?;
    if a.j >= u.j {
        return Err(Error::NotSwappable { conjugator: a, target: u });
    }
    Ok(())
}

/// Which relation rewrites `a^-1 u a`.
pub fn classify_relation(a: Letter, u: Letter, params: &SurfaceParams) -> Result<RelationCase> {
    check_swappable(a, u, params)?;
    Ok(RelationCase { family: family_for(a.i, a.j, u.i, params.two_g()), primed: a.inverse })
}

/// Fixed-capacity conjugation image; never longer than [`MAX_IMAGE_LEN`].
#[derive(Debug, Clone, Copy)]
pub(crate) struct Image {
    letters: [Letter; MAX_IMAGE_LEN],
    len: u8,
}

impl Image {
    pub(crate) fn as_slice(&self) -> &[Letter] {
        &self.letters[..self.len as usize]
    }
}

/// Unchecked core of [`conjugate_letter`]; callers guarantee validity and
/// `a.second() < u.second()`.
pub(crate) fn conjugate_unchecked(u: Letter, a: Letter, two_g: u32) -> Image {
    let family = family_for(a.i, a.j, u.i, two_g);
    let template = TABLE[family as usize][a.inverse as usize];
    let s = u.j;
    let mut letters = [u; MAX_IMAGE_LEN];
    let len = template.len();
    for (slot, &(which, inv)) in template.iter().enumerate() {
        let first = match which {
            Slot::I => a.i,
            Slot::J => a.j,
            Slot::R => u.i,
        };
        // (a^-1 u a)^-1 = a^-1 u^-1 a: reverse and flip for inverse targets.
        let at = if u.inverse { len - 1 - slot } else { slot };
        letters[at] = Letter::with_sign(first, s, inv ^ u.inverse);
    }
    Image { letters, len: len as u8 }
}

/// Rewrites `a^-1 u a` as a word whose letters all have the second index of `u`.
pub fn conjugate_letter(u: Letter, a: Letter, params: &SurfaceParams) -> Result<BraidWord> {
    check_swappable(a, u, params)?;
    Ok(BraidWord(conjugate_unchecked(u, a, params.two_g()).as_slice().to_vec()))
}

/// `v^-1 w v` for a word `w` and a conjugator `v` whose letters all have
/// second index below every letter of `w`. Freely reduced after every step.
pub fn conjugate_by(target: &[Letter], conjugator: &[Letter], params: &SurfaceParams, budget: u64) -> Result<BraidWord> {
    params.check_word(target)?;
    params.check_word(conjugator)?;
    if let (Some(min_target), Some(max_conj)) =
        (target.iter().min_by_key(|l| l.j), conjugator.iter().max_by_key(|l| l.j))
    {
        if max_conj.j >= min_target.j {
            return Err(Error::NotSwappable { conjugator: *max_conj, target: *min_target });
        }
    }
    let two_g = params.two_g();
    let mut current = free_reduce(target).0;
    let mut next = Vec::new();
    for &a in conjugator {
        next.clear();
        for &u in &current {
            for &b in conjugate_unchecked(u, a, two_g).as_slice() {
                push_reduced(&mut next, b);
            }
        }
        if next.len() as u64 > budget {
            return Err(Error::BudgetExceeded { budget });
        }
        std::mem::swap(&mut current, &mut next);
    }
    Ok(BraidWord(current))
}

/// `v^-1 u v` for a single letter `u`.
pub fn conjugate_word(u: Letter, v: &[Letter], params: &SurfaceParams, budget: u64) -> Result<BraidWord> {
    conjugate_by(&[u], v, params, budget)
}

/// Every pair `(a, u)` with `a` a signed generator, `u` a positive generator,
/// and `a.second() < u.second()`: one instance of each conjugation relation.
pub fn relation_instances(params: &SurfaceParams) -> Vec<(Letter, Letter)> {
    let gens = params.generators();
    let mut out = Vec::new();
    for &u in &gens {
        for &a in gens.iter().filter(|a| a.j < u.j) {
            out.push((a, u));
            out.push((a.inv(), u));
        }
    }
    out
}
