//! Randomised equality tests on compressed words.
//!
//! Letter equality uses a polynomial rolling hash evaluated bottom-up over
//! the program; free-group triviality maps the terminal alphabet into
//! `SL(2, Z)` through a free embedding and multiplies matrices bottom-up.
//! Both run modulo independently drawn primes in `[2^61, 2^62)`. A "not
//! equal" verdict is always correct; an "equal" verdict is wrong with
//! probability at most `2^-lambda` while the evaluation length stays below
//! about `2^50` (see [`EqualityChecker::error_bound_log2`]).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::presentation::{free_reduce, Letter};
use crate::slp::{CompressedWord, Symbol};

pub const DEFAULT_LAMBDA: u32 = 64;
pub const DEFAULT_EXACT_THRESHOLD: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 0x6272_6169_6463_6f6d;

/// Upper limit on the number of primes used for one verdict.
pub const MAX_PRIMES: usize = 64;

const PRIME_BITS: u32 = 61;
/// log2 of the number of primes in `[2^61, 2^62)`, rounded down.
const LOG2_PRIME_COUNT: f64 = 55.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckerConfig {
    pub lambda: u32,
    /// Evaluations up to this length are compared by expansion instead.
    pub exact_threshold: u64,
    pub seed: u64,
}

impl Default for CheckerConfig {
    fn default() -> Self {
        Self { lambda: DEFAULT_LAMBDA, exact_threshold: DEFAULT_EXACT_THRESHOLD, seed: DEFAULT_SEED }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Fingerprint { primes: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdict {
    pub equal: bool,
    pub method: Method,
}

#[derive(Debug, Clone)]
pub struct EqualityChecker {
    config: CheckerConfig,
    primes: Vec<u64>,
    /// One random hash base per prime.
    bases: Vec<u64>,
}

impl Default for EqualityChecker {
    fn default() -> Self {
        Self::new(CheckerConfig::default())
    }
}

impl EqualityChecker {
    pub fn new(config: CheckerConfig) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
        let primes: Vec<u64> = (0..MAX_PRIMES).map(|_| random_prime(&mut rng)).collect();
        let bases = primes.iter().map(|&p| rng.gen_range(2..p - 1)).collect();
        Self { config, primes, bases }
    }

    pub fn config(&self) -> &CheckerConfig {
        &self.config
    }

    /// Whether the two programs evaluate to the same letter sequence.
    pub fn monoid_eq(&self, a: &CompressedWord, b: &CompressedWord) -> bool {
        self.monoid_eq_verdict(a, b).equal
    }

    pub fn monoid_eq_verdict(&self, a: &CompressedWord, b: &CompressedWord) -> Verdict {
        let (la, lb) = (a.eval_length(), b.eval_length());
        if la != lb {
            return Verdict { equal: false, method: Method::Exact };
        }
        match u64::try_from(&la) {
            Ok(len) if len <= self.config.exact_threshold => {
                Verdict { equal: monoid_eq_exact(a, b), method: Method::Exact }
            }
            _ => {
                let primes = self.primes_for_hash(log2_big(&la));
                Verdict { equal: self.monoid_eq_fingerprint(a, b, primes), method: Method::Fingerprint { primes } }
            }
        }
    }

    /// Hash comparison with the first `primes` primes, regardless of length.
    /// The caller must already know the lengths are equal.
    pub fn monoid_eq_fingerprint(&self, a: &CompressedWord, b: &CompressedWord, primes: usize) -> bool {
        (0..primes.min(MAX_PRIMES)).all(|t| {
            let (p, base) = (self.primes[t], self.bases[t]);
            poly_hash(a, p, base) == poly_hash(b, p, base)
        })
    }

    /// Whether the evaluation freely reduces to the empty word.
    pub fn free_group_trivial(&self, a: &CompressedWord) -> bool {
        self.free_group_trivial_verdict(a).equal
    }

    pub fn free_group_trivial_verdict(&self, a: &CompressedWord) -> Verdict {
        match a.eval_length_u64() {
            Some(len) if len <= self.config.exact_threshold => {
                Verdict { equal: free_group_trivial_exact(a), method: Method::Exact }
            }
            _ => {
                let primes = self.primes_for_matrices(a);
                Verdict { equal: self.free_group_trivial_fingerprint(a, primes), method: Method::Fingerprint { primes } }
            }
        }
    }

    /// Matrix test with the first `primes` primes, regardless of length.
    pub fn free_group_trivial_fingerprint(&self, a: &CompressedWord, primes: usize) -> bool {
        let alphabet = a.terminals();
        (0..primes.min(MAX_PRIMES)).all(|t| matrix_eval(a, alphabet, self.primes[t]) == IDENTITY)
    }

    /// Whether the evaluations are equal as free-group elements.
    pub fn free_group_eq(&self, a: &CompressedWord, b: &CompressedWord) -> bool {
        self.free_group_eq_verdict(a, b).equal
    }

    pub fn free_group_eq_verdict(&self, a: &CompressedWord, b: &CompressedWord) -> Verdict {
        self.free_group_trivial_verdict(&a.concat_unchecked(&b.invert()))
    }

    /// Number of primes the hash test uses for evaluations of length
    /// `2^log2_len`.
    fn primes_for_hash(&self, log2_len: f64) -> usize {
        primes_needed(self.config.lambda, PRIME_BITS as f64 - log2_len)
    }

    fn primes_for_matrices(&self, a: &CompressedWord) -> usize {
        primes_needed(self.config.lambda, matrix_bits_per_prime(a))
    }

    /// log2 of the error bound of a fingerprint "equal" verdict on `a` (for
    /// triviality) with the number of primes this checker would use. `0.0`
    /// means no guarantee.
    pub fn error_bound_log2(&self, a: &CompressedWord) -> f64 {
        let bits = matrix_bits_per_prime(a);
        if bits <= 0.0 {
            return 0.0;
        }
        -(bits * self.primes_for_matrices(a) as f64)
    }
}

fn primes_needed(lambda: u32, bits_per_prime: f64) -> usize {
    if bits_per_prime < 1.0 {
        return MAX_PRIMES;
    }
    ((lambda as f64 / bits_per_prime).ceil() as usize).clamp(1, MAX_PRIMES)
}

/// Security bits of one prime for the matrix test: a non-identity product of
/// `L` generator images has an off-identity entry of absolute value at most
/// `c^L` (with `c` the largest row norm), so at most `L log2(c) / 61` of the
/// candidate primes divide it.
fn matrix_bits_per_prime(a: &CompressedWord) -> f64 {
    let len = log2_big(&a.eval_length());
    let t = a.terminals().len().saturating_sub(1) as f64;
    let row_norm = 8.0 * t * t + 4.0 * t + 2.0;
    let divisors = len + row_norm.log2().log2() - (PRIME_BITS as f64).log2();
    LOG2_PRIME_COUNT - divisors.max(0.0) - 1.0
}

fn log2_big(x: &num_bigint::BigUint) -> f64 {
    crate::slp::approx_log2(x).max(0.0)
}

pub fn monoid_eq_exact(a: &CompressedWord, b: &CompressedWord) -> bool {
    let (Some(la), Some(lb)) = (a.eval_length_u64(), b.eval_length_u64()) else {
        return false;
    };
    la == lb && a.evaluate(la).ok() == b.evaluate(lb).ok()
}

pub fn free_group_trivial_exact(a: &CompressedWord) -> bool {
    let Some(len) = a.eval_length_u64() else {
        return false;
    };
    a.evaluate(len).map(|w| free_reduce(&w).is_empty()).unwrap_or(false)
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

fn letter_code(l: Letter) -> u64 {
    // Distinct small positive codes; injective for indices below 2^20.
    let base = ((l.first() as u64) << 21 | l.second() as u64) << 1;
    base + l.is_inverse() as u64 + 1
}

/// `(hash, base^len)` of the root, with `hash(xy) = hash(x) base^|y| + hash(y)`.
fn poly_hash(a: &CompressedWord, p: u64, base: u64) -> (u64, u64) {
    let mut table: Vec<(u64, u64)> = Vec::with_capacity(a.num_rules());
    for k in 0..a.num_rules() {
        let (mut h, mut pw) = (0u64, 1u64);
        for sym in a.rule(k) {
            let (sh, spw) = match *sym {
                Symbol::Terminal(l) => (letter_code(l) % p, base),
                Symbol::Rule(r) => table[r as usize],
            };
            h = add_mod(mul_mod(h, spw, p), sh, p);
            pw = mul_mod(pw, spw, p);
        }
        table.push((h, pw));
    }
    table[a.root()]
}

type Mat = [u64; 4];
const IDENTITY: Mat = [1, 0, 0, 1];

fn mat_mul(x: &Mat, y: &Mat, p: u64) -> Mat {
    [
        add_mod(mul_mod(x[0], y[0], p), mul_mod(x[1], y[2], p), p),
        add_mod(mul_mod(x[0], y[1], p), mul_mod(x[1], y[3], p), p),
        add_mod(mul_mod(x[2], y[0], p), mul_mod(x[3], y[2], p), p),
        add_mod(mul_mod(x[2], y[1], p), mul_mod(x[3], y[3], p), p),
    ]
}

fn signed_mod(x: i128, p: u64) -> u64 {
    x.rem_euclid(p as i128) as u64
}

/// Image of the `t`-th free generator: `B^t A B^-t` with `A = [[1,2],[0,1]]`
/// and `B = [[1,0],[2,1]]`. These form a free basis of a free subgroup of
/// `SL(2, Z)`.
pub(crate) fn generator_matrix(t: u64, inverse: bool) -> [i128; 4] {
    let t = t as i128;
    if inverse {
        [4 * t + 1, -2, 8 * t * t, 1 - 4 * t]
    } else {
        [1 - 4 * t, 2, -8 * t * t, 4 * t + 1]
    }
}

fn matrix_eval(a: &CompressedWord, alphabet: &[Letter], p: u64) -> Mat {
    let images: Vec<[Mat; 2]> = (0..alphabet.len() as u64)
        .map(|t| [false, true].map(|inv| generator_matrix(t, inv).map(|x| signed_mod(x, p))))
        .collect();
    let mut table: Vec<Mat> = Vec::with_capacity(a.num_rules());
    for k in 0..a.num_rules() {
        let mut m = IDENTITY;
        for sym in a.rule(k) {
            let factor = match *sym {
                Symbol::Terminal(l) => {
                    let t = alphabet.binary_search(&l.positive()).expect("terminal in alphabet");
                    &images[t][l.is_inverse() as usize]
                }
                Symbol::Rule(r) => &table[r as usize],
            };
            m = mat_mul(&m, factor, p);
        }
        table.push(m);
    }
    table[a.root()]
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &WITNESSES {
        if n % q == 0 {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Uniform over the primes of `[2^61, 2^62)` (rejection sampling).
fn random_prime(rng: &mut impl Rng) -> u64 {
    loop {
        let candidate = rng.gen_range(1u64 << PRIME_BITS..1u64 << (PRIME_BITS + 1));
        if is_prime(candidate) {
            return candidate;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_word;
    use crate::slp::fibonacci;

    fn slp(s: &str) -> CompressedWord {
        CompressedWord::from_word(&parse_word(s).unwrap())
    }

    fn forced() -> EqualityChecker {
        EqualityChecker::new(CheckerConfig { exact_threshold: 0, ..CheckerConfig::default() })
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..50).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]);
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2, 3, 5, 7
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn generator_images_are_unimodular() {
        for t in 0..20 {
            for inv in [false, true] {
                let m = generator_matrix(t, inv);
                assert_eq!(m[0] * m[3] - m[1] * m[2], 1);
            }
            let (x, y) = (generator_matrix(t, false), generator_matrix(t, true));
            let prod = [
                x[0] * y[0] + x[1] * y[2],
                x[0] * y[1] + x[1] * y[3],
                x[2] * y[0] + x[3] * y[2],
                x[2] * y[1] + x[3] * y[3],
            ];
            assert_eq!(prod, [1, 0, 0, 1]);
        }
    }

    #[test]
    fn seeded_reproducibility() {
        let a = EqualityChecker::new(CheckerConfig { seed: 7, ..Default::default() });
        let b = EqualityChecker::new(CheckerConfig { seed: 7, ..Default::default() });
        let c = EqualityChecker::new(CheckerConfig { seed: 8, ..Default::default() });
        assert_eq!(a.primes, b.primes);
        assert_ne!(a.primes, c.primes);
        assert!(a.primes.iter().all(|&p| is_prime(p) && p >> 61 == 1));
    }

    #[test]
    fn fibonacci_monoid_equality() {
        let (x, y) = (parse_word("A(1,3)").unwrap()[0], parse_word("A(2,3)").unwrap()[0]);
        let fib7 = fibonacci(7, x, y);
        let literal: Vec<Letter> = "abaababaabaab".chars().map(|c| if c == 'a' { x } else { y }).collect();
        let literal = CompressedWord::from_word(&literal);
        for checker in [EqualityChecker::default(), forced()] {
            assert!(checker.monoid_eq(&fib7, &literal));
            assert!(checker.monoid_eq(&fib7, &fib7));
            assert!(!checker.monoid_eq(&fib7, &fibonacci(8, x, y)));
        }
        let v = forced().monoid_eq_verdict(&fib7, &literal);
        assert!(matches!(v.method, Method::Fingerprint { primes: 2 }));
    }

    #[test]
    fn triviality() {
        for checker in [EqualityChecker::default(), forced()] {
            let w = slp("A(1,4) A(2,4) A(3,4)^-1");
            assert!(checker.free_group_trivial(&w.concat(&w.invert()).unwrap()));
            assert!(!checker.free_group_trivial(&slp("A(1,4) A(2,4)")));
            assert!(checker.free_group_trivial(&CompressedWord::empty()));
            assert!(checker.free_group_eq(&slp("A(1,4) A(2,4) A(2,4)^-1"), &slp("A(1,4)")));
            assert!(!checker.free_group_eq(&slp("A(1,4) A(2,4)"), &slp("A(2,4) A(1,4)")));
        }
    }

    #[test]
    fn huge_evaluations_use_many_primes() {
        let (x, y) = (parse_word("A(1,3)").unwrap()[0], parse_word("A(2,3)").unwrap()[0]);
        let fib = fibonacci(300, x, y);
        let checker = EqualityChecker::default();
        let v = checker.free_group_trivial_verdict(&fib.concat(&fib.invert()).unwrap());
        assert_eq!(v, Verdict { equal: true, method: Method::Fingerprint { primes: MAX_PRIMES } });
        assert!(!checker.free_group_trivial(&fib));
        assert_eq!(checker.error_bound_log2(&fib), 0.0);
        assert!(checker.error_bound_log2(&fibonacci(20, x, y)) <= -64.0);
    }
}
