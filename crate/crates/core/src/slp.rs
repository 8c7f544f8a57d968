//! Straight-line programs ("compressed words") over braid letters.
//!
//! A program is a list of rules; rule `k` may only mention terminals and
//! rules with a smaller index, and the last rule is the root. Evaluations can
//! be exponentially longer than the program, so lengths are big integers and
//! every operation that materialises letters takes an explicit limit.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::presentation::{parse_word, push_reduced, BraidWord, Letter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Terminal(Letter),
    /// Index of a rule (0-based; serialized as `X<index+1>`).
    Rule(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedWord {
    /// Positive generators of the terminal alphabet, sorted and deduplicated.
    terminals: Vec<Letter>,
    rhs: Vec<Symbol>,
    /// `rhs[starts[k]..starts[k + 1]]` is the production of rule `k`.
    starts: Vec<usize>,
}

impl CompressedWord {
    /// Builds a program from its rules, the last one being the root.
    ///
    /// Non-root rules with empty productions are removed together with every
    /// reference to them. Terminals must belong to `terminals` (up to sign).
    pub fn new(terminals: Vec<Letter>, rules: Vec<Vec<Symbol>>) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::MalformedSlp("a program needs at least a root rule".into()));
        }
        let terminals = normalize_alphabet(terminals);
        let root = rules.len() - 1;
        let mut renumber = vec![None; rules.len()];
        let mut rhs = Vec::new();
        let mut starts = vec![0];
        for (k, production) in rules.into_iter().enumerate() {
            let begin = rhs.len();
            for sym in production {
                match sym {
                    Symbol::Terminal(l) => {
                        if terminals.binary_search(&l.positive()).is_err() {
                            return Err(Error::MalformedSlp(format!("terminal {l} is not in the alphabet")));
                        }
                        rhs.push(sym);
                    }
                    Symbol::Rule(r) => {
                        if r as usize >= k {
                            return Err(Error::MalformedSlp(format!(
                                "rule X{} refers to X{}, which is not smaller",
                                k + 1,
                                r + 1
                            )));
                        }
                        if let Some(new) = renumber[r as usize] {
                            rhs.push(Symbol::Rule(new));
                        }
                    }
                }
            }
            if rhs.len() == begin && k != root {
                continue;
            }
            renumber[k] = Some((starts.len() - 1) as u32);
            starts.push(rhs.len());
        }
        Ok(Self { terminals, rhs, starts })
    }

    /// Trusted constructor for builders that already guarantee rankedness and
    /// non-empty inner rules.
    pub(crate) fn from_raw(terminals: Vec<Letter>, rhs: Vec<Symbol>, starts: Vec<usize>) -> Self {
        debug_assert!(starts.len() >= 2 && starts[0] == 0 && *starts.last().unwrap() == rhs.len());
        debug_assert!(starts.windows(2).rev().skip(1).all(|w| w[0] < w[1]));
        Self { terminals: normalize_alphabet(terminals), rhs, starts }
    }

    /// The program whose root is `word` itself.
    pub fn from_word(word: &[Letter]) -> Self {
        Self {
            terminals: normalize_alphabet(word.to_vec()),
            rhs: word.iter().copied().map(Symbol::Terminal).collect(),
            starts: vec![0, word.len()],
        }
    }

    pub fn empty() -> Self {
        Self::from_word(&[])
    }

    /// Same program with a larger declared alphabet.
    #[must_use]
    pub fn with_alphabet(mut self, extra: impl IntoIterator<Item = Letter>) -> Self {
        self.terminals.extend(extra);
        self.terminals = normalize_alphabet(std::mem::take(&mut self.terminals));
        self
    }

    pub fn terminals(&self) -> &[Letter] {
        &self.terminals
    }

    pub fn num_rules(&self) -> usize {
        self.starts.len() - 1
    }

    pub fn rule(&self, k: usize) -> &[Symbol] {
        &self.rhs[self.starts[k]..self.starts[k + 1]]
    }

    pub fn root(&self) -> usize {
        self.num_rules() - 1
    }

    /// Sum of the production lengths.
    pub fn size(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty_word(&self) -> bool {
        self.rule(self.root()).is_empty()
    }

    /// Second indices appearing in the alphabet.
    fn alphabet_strands(&self) -> Vec<u32> {
        let mut s: Vec<u32> = self.terminals.iter().map(|l| l.second()).collect();
        s.dedup();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Exact length of the evaluation.
    pub fn eval_length(&self) -> BigUint {
        // Only keep lengths that are still referenced later; evaluation
        // lengths of deep programs have thousands of bits.
        let mut last_use = vec![0usize; self.num_rules()];
        for k in 0..self.num_rules() {
            for sym in self.rule(k) {
                if let Symbol::Rule(r) = *sym {
                    last_use[r as usize] = k;
                }
            }
        }
        let mut lengths: Vec<Option<BigUint>> = vec![None; self.num_rules()];
        for k in 0..self.num_rules() {
            let mut total = BigUint::zero();
            let mut terminals = 0u64;
            for sym in self.rule(k) {
                match *sym {
                    Symbol::Terminal(_) => terminals += 1,
                    Symbol::Rule(r) => total += lengths[r as usize].as_ref().expect("ranked"),
                }
            }
            total += terminals;
            for sym in self.rule(k) {
                if let Symbol::Rule(r) = *sym {
                    if last_use[r as usize] == k {
                        lengths[r as usize] = None;
                    }
                }
            }
            lengths[k] = Some(total);
        }
        lengths.pop().flatten().unwrap_or_default()
    }

    /// Per-rule lengths when they all fit in a `u64`.
    pub(crate) fn rule_lengths_u64(&self) -> Option<Vec<u64>> {
        let mut lengths = Vec::with_capacity(self.num_rules());
        for k in 0..self.num_rules() {
            let mut total = 0u64;
            for sym in self.rule(k) {
                let add = match *sym {
                    Symbol::Terminal(_) => 1,
                    Symbol::Rule(r) => lengths[r as usize],
                };
                total = total.checked_add(add)?;
            }
            lengths.push(total);
        }
        Some(lengths)
    }

    /// Evaluation length if it fits in a `u64`.
    pub fn eval_length_u64(&self) -> Option<u64> {
        self.rule_lengths_u64().map(|l| *l.last().unwrap())
    }

    /// Expands the program. The length is computed first; nothing is expanded
    /// when it exceeds `max_len`.
    pub fn evaluate(&self, max_len: u64) -> Result<BraidWord> {
        match self.eval_length_u64() {
            Some(len) if len <= max_len => {}
            _ => return Err(Error::TooLong { length: self.eval_length(), limit: max_len }),
        }
        let mut out = Vec::new();
        self.expand_into(self.root(), &mut |l| out.push(l));
        Ok(out.into())
    }

    /// Streams the letters of rule `k` without recursion.
    pub(crate) fn expand_into(&self, k: usize, sink: &mut impl FnMut(Letter)) {
        let mut stack: Vec<(usize, usize)> = vec![(k, 0)];
        while let Some((rule, pos)) = stack.pop() {
            let production = self.rule(rule);
            if pos == production.len() {
                continue;
            }
            stack.push((rule, pos + 1));
            match production[pos] {
                Symbol::Terminal(l) => sink(l),
                Symbol::Rule(r) => stack.push((r as usize, 0)),
            }
        }
    }

    /// Program for `ev(self) · ev(other)`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let (a, b) = (self.alphabet_strands(), other.alphabet_strands());
        if !a.is_empty() && !b.is_empty() && a != b {
            return Err(Error::AlphabetMismatch);
        }
        Ok(self.concat_unchecked(other))
    }

    pub(crate) fn concat_unchecked(&self, other: &Self) -> Self {
        let mut terminals = self.terminals.clone();
        terminals.extend_from_slice(&other.terminals);
        if other.is_empty_word() {
            return self.clone().with_alphabet(terminals);
        }
        if self.is_empty_word() {
            return other.clone().with_alphabet(terminals);
        }
        let shift = self.num_rules() as u32;
        let mut rhs = self.rhs.clone();
        rhs.extend(other.rhs.iter().map(|s| match *s {
            Symbol::Rule(r) => Symbol::Rule(r + shift),
            t => t,
        }));
        let mut starts = self.starts.clone();
        let base = self.rhs.len();
        starts.extend(other.starts[1..].iter().map(|s| s + base));
        rhs.push(Symbol::Rule(self.root() as u32));
        rhs.push(Symbol::Rule(shift + other.root() as u32));
        starts.push(rhs.len());
        Self::from_raw(terminals, rhs, starts)
    }

    /// Program for the formal inverse: every production mirrored, every
    /// terminal sign flipped.
    #[must_use]
    pub fn invert(&self) -> Self {
        let mut rhs = Vec::with_capacity(self.rhs.len());
        for k in 0..self.num_rules() {
            rhs.extend(self.rule(k).iter().rev().map(|s| match *s {
                Symbol::Terminal(l) => Symbol::Terminal(l.inv()),
                r => r,
            }));
        }
        Self { terminals: self.terminals.clone(), rhs, starts: self.starts.clone() }
    }

    /// Program whose evaluation is the free reduction of this one.
    ///
    /// Computed bottom-up by reducing each reachable rule's expansion from
    /// the already-reduced expansions of its children; fails with
    /// [`Error::TooLong`] as soon as one reduced intermediate exceeds
    /// `max_len`.
    pub fn reduce(&self, max_len: u64) -> Result<Self> {
        let word = self.reduced_word(max_len)?;
        Ok(Self::from_word(&word).with_alphabet(self.terminals.iter().copied()))
    }

    /// The freely reduced evaluation, computed as in [`reduce`](Self::reduce).
    pub fn reduced_word(&self, max_len: u64) -> Result<BraidWord> {
        let reachable = self.reachable();
        let mut memo: Vec<Option<Vec<Letter>>> = vec![None; self.num_rules()];
        for k in 0..self.num_rules() {
            if !reachable[k] {
                continue;
            }
            let mut word = Vec::new();
            for sym in self.rule(k) {
                match *sym {
                    Symbol::Terminal(l) => push_reduced(&mut word, l),
                    Symbol::Rule(r) => {
                        for &l in memo[r as usize].as_ref().expect("ranked") {
                            push_reduced(&mut word, l);
                        }
                    }
                }
                if word.len() as u64 > max_len {
                    return Err(Error::TooLong { length: BigUint::from(word.len()), limit: max_len });
                }
            }
            memo[k] = Some(word);
        }
        Ok(memo.pop().flatten().unwrap_or_default().into())
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_rules()];
        seen[self.root()] = true;
        for k in (0..self.num_rules()).rev() {
            if seen[k] {
                for sym in self.rule(k) {
                    if let Symbol::Rule(r) = *sym {
                        seen[r as usize] = true;
                    }
                }
            }
        }
        seen
    }

    pub fn to_json(&self) -> SlpJson {
        let name = |r: u32| format!("X{}", r + 1);
        SlpJson {
            terminals: self.terminals.iter().map(|l| l.to_string()).collect(),
            rules: (0..self.num_rules())
                .map(|k| RuleJson {
                    lhs: name(k as u32),
                    rhs: self
                        .rule(k)
                        .iter()
                        .map(|s| match *s {
                            Symbol::Terminal(l) => l.to_string(),
                            Symbol::Rule(r) => name(r),
                        })
                        .collect(),
                })
                .collect(),
            root: name(self.root() as u32),
        }
    }

    pub fn from_json(json: &SlpJson) -> Result<Self> {
        let parse_letter = |s: &str| -> Result<Letter> {
            let word = parse_word(s)?;
            match word.letters() {
                [l] => Ok(*l),
                _ => Err(Error::MalformedSlp(format!("`{s}` is not a single letter"))),
            }
        };
        let terminals = json.terminals.iter().map(|s| parse_letter(s)).collect::<Result<Vec<_>>>()?;
        let mut names: HashMap<&str, u32> = HashMap::new();
        let mut rules = Vec::with_capacity(json.rules.len());
        for (k, rule) in json.rules.iter().enumerate() {
            if !is_rule_name(&rule.lhs) {
                return Err(Error::MalformedSlp(format!("bad rule name `{}`", rule.lhs)));
            }
            let mut production = Vec::with_capacity(rule.rhs.len());
            for sym in &rule.rhs {
                if is_rule_name(sym) {
                    let r = names
                        .get(sym.as_str())
                        .ok_or_else(|| Error::MalformedSlp(format!("`{sym}` used before its rule")))?;
                    production.push(Symbol::Rule(*r));
                } else {
                    production.push(Symbol::Terminal(parse_letter(sym)?));
                }
            }
            if names.insert(rule.lhs.as_str(), k as u32).is_some() {
                return Err(Error::MalformedSlp(format!("duplicate rule `{}`", rule.lhs)));
            }
            rules.push(production);
        }
        match json.rules.last() {
            Some(last) if last.lhs == json.root => {}
            _ => return Err(Error::MalformedSlp("the root must be the last rule".into())),
        }
        Self::new(terminals, rules)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("plain data serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(text)?)
    }
}

impl fmt::Display for CompressedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.num_rules() {
            write!(f, "X{} ->", k + 1)?;
            for sym in self.rule(k) {
                match sym {
                    Symbol::Terminal(l) => write!(f, " {l}")?,
                    Symbol::Rule(r) => write!(f, " X{}", r + 1)?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn is_rule_name(s: &str) -> bool {
    s.len() > 1 && s.starts_with('X') && s[1..].bytes().all(|b| b.is_ascii_digit())
}

fn normalize_alphabet(mut letters: Vec<Letter>) -> Vec<Letter> {
    for l in &mut letters {
        *l = l.positive();
    }
    letters.sort_unstable();
    letters.dedup();
    letters
}

/// Wire form: `{"terminals":[..],"rules":[{"lhs":"X1","rhs":[..]}..],"root":"Xq"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlpJson {
    pub terminals: Vec<String>,
    pub rules: Vec<RuleJson>,
    pub root: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleJson {
    pub lhs: String,
    pub rhs: Vec<String>,
}

/// The Fibonacci family: `X1 -> b`, `X2 -> a`, `Xi -> X(i-1) X(i-2)`.
/// Its size is `2n - 2` and its evaluation has length `F_n`.
pub fn fibonacci(n: usize, a: Letter, b: Letter) -> CompressedWord {
    assert!(n >= 1, "the Fibonacci family starts at n = 1");
    let mut rules = vec![vec![Symbol::Terminal(b)]];
    if n >= 2 {
        rules.push(vec![Symbol::Terminal(a)]);
    }
    for i in 2..n {
        rules.push(vec![Symbol::Rule(i as u32 - 1), Symbol::Rule(i as u32 - 2)]);
    }
    CompressedWord::new(vec![a, b], rules).expect("well-formed by construction")
}

/// `F_n` with `F_1 = F_2 = 1`.
pub fn fibonacci_number(n: usize) -> BigUint {
    let (mut x, mut y) = (BigUint::zero(), BigUint::from(1u32));
    for _ in 0..n {
        let next = &x + &y;
        x = std::mem::replace(&mut y, next);
    }
    x
}

/// Lossy conversion used for reporting.
pub fn approx_log2(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_u64().map_or(0.0, |v| (v as f64).log2());
    }
    let top = (x >> (bits - 64)).to_u64().unwrap_or(u64::MAX);
    (top as f64).log2() + (bits - 64) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::free_reduce;

    const A: Letter = Letter::new(1, 3);
    const B: Letter = Letter::new(2, 3);

    fn as_ab(word: &[Letter]) -> String {
        word.iter().map(|l| if *l == A { 'a' } else { 'b' }).collect()
    }

    fn w(s: &str) -> BraidWord {
        parse_word(s).unwrap()
    }

    #[test]
    fn fibonacci_words() {
        let expected = ["b", "a", "ab", "aba", "abaab", "abaababa", "abaababaabaab"];
        for (n, word) in expected.iter().enumerate() {
            let slp = fibonacci(n + 1, A, B);
            assert_eq!(as_ab(&slp.evaluate(100).unwrap()), *word);
        }
        for n in 3..=40 {
            let slp = fibonacci(n, A, B);
            assert_eq!(slp.size(), 2 * n - 2);
            assert_eq!(slp.eval_length(), fibonacci_number(n));
        }
        assert_eq!(fibonacci_number(7), BigUint::from(13u32));
    }

    #[test]
    fn evaluate_guards_length() {
        let slp = fibonacci(90, A, B);
        match slp.evaluate(1000) {
            Err(Error::TooLong { length, limit: 1000 }) => assert_eq!(length, fibonacci_number(90)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(fibonacci(200, A, B).eval_length_u64().is_none());
    }

    #[test]
    fn empty_program() {
        let e = CompressedWord::empty();
        assert!(e.evaluate(0).unwrap().is_empty());
        assert_eq!(e.eval_length(), BigUint::zero());
        assert_eq!(e.size(), 0);
    }

    #[test]
    fn empty_rules_are_pruned() {
        let slp = CompressedWord::new(
            vec![A],
            vec![vec![], vec![Symbol::Terminal(A), Symbol::Rule(0)], vec![Symbol::Rule(1), Symbol::Rule(0)]],
        )
        .unwrap();
        assert_eq!(slp.num_rules(), 2);
        assert_eq!(slp.rule(1), &[Symbol::Rule(0)]);
        assert_eq!(slp.evaluate(10).unwrap(), w("A(1,3)"));
    }

    #[test]
    fn rankedness_is_enforced() {
        let err = CompressedWord::new(vec![A], vec![vec![Symbol::Rule(0)]]).unwrap_err();
        assert!(matches!(err, Error::MalformedSlp(_)));
        let err = CompressedWord::new(vec![A], vec![vec![Symbol::Terminal(B)]]).unwrap_err();
        assert!(matches!(err, Error::MalformedSlp(_)));
        assert!(CompressedWord::new(vec![], vec![]).is_err());
    }

    #[test]
    fn concat_and_invert() {
        let ab = fibonacci(5, A, B).concat(&fibonacci(4, A, B)).unwrap();
        assert_eq!(ab.evaluate(100).unwrap(), fibonacci(6, A, B).evaluate(100).unwrap());
        assert!(ab.size() <= 8 + 6 + 2);

        let x = CompressedWord::from_word(&w("A(1,2) A(2,3)"));
        assert_eq!(x.invert().evaluate(10).unwrap(), w("A(2,3)^-1 A(1,2)^-1"));

        let other = CompressedWord::from_word(&w("A(1,4)"));
        let same = CompressedWord::from_word(&w("A(1,3)"));
        assert_eq!(same.concat(&other), Err(Error::AlphabetMismatch));
        assert!(same.concat(&CompressedWord::empty()).is_ok());
    }

    #[test]
    fn reduce_matches_naive() {
        let slp = CompressedWord::from_word(&w("A(1,2) A(1,2)^-1"));
        assert!(slp.reduce(10).unwrap().is_empty_word());
        let fib = fibonacci(12, A, B);
        let both = fib.concat(&fib.invert()).unwrap();
        assert!(both.reduce(1_000).unwrap().is_empty_word());
        let naive = free_reduce(&fib.evaluate(1_000).unwrap());
        assert_eq!(fib.reduced_word(1_000).unwrap(), naive);
        assert!(matches!(fib.reduce(5), Err(Error::TooLong { .. })));
    }

    #[test]
    fn json_round_trip() {
        let slp = fibonacci(6, A, B);
        let text = slp.to_json_string();
        assert_eq!(
            text,
            r#"{"terminals":["A(1,3)","A(2,3)"],"rules":[{"lhs":"X1","rhs":["A(2,3)"]},{"lhs":"X2","rhs":["A(1,3)"]},{"lhs":"X3","rhs":["X2","X1"]},{"lhs":"X4","rhs":["X3","X2"]},{"lhs":"X5","rhs":["X4","X3"]},{"lhs":"X6","rhs":["X5","X4"]}],"root":"X6"}"#
        );
        let back = CompressedWord::from_json_str(&text).unwrap();
        assert_eq!(back, slp);
        assert_eq!(back.to_json_string(), text);
    }

    #[test]
    fn json_rejects_bad_programs() {
        let bad = [
            r#"{"terminals":[],"rules":[{"lhs":"X1","rhs":["X2"]}],"root":"X1"}"#,
            r#"{"terminals":["A(1,3)"],"rules":[{"lhs":"X1","rhs":["A(1,3)"]}],"root":"X2"}"#,
            r#"{"terminals":["A(1,3)"],"rules":[{"lhs":"Y","rhs":[]}],"root":"Y"}"#,
            r#"{"terminals":["A(1,3)"],"rules":[{"lhs":"X1","rhs":["A(1,4)"]}],"root":"X1"}"#,
            r#"{"terminals":["A(1,3) A(2,3)"],"rules":[{"lhs":"X1","rhs":[]}],"root":"X1"}"#,
        ];
        for text in bad {
            assert!(CompressedWord::from_json_str(text).is_err(), "{text}");
        }
    }
}
