//! Repdigits a_(k) = a (10^k - 1) / 9 and the congruence 10^k = 1 that
//! decides when they are Niven.
//!
//! a_(k) has digit sum a k, and a R_k = 0 (mod a k) iff k | R_k iff
//! 10^k = 1 (mod 9k). The stronger modulus 9ka is also reported.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{multiplicative_order_factored, Factorization};
use crate::digits::{Digit, DigitString, RepBlockForm};
use crate::error::{ArithError, DigitError};
use crate::perm::is_niven;

/// A named prime of the exponent parameterization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NamedPrime {
    pub name: &'static str,
    pub value: &'static str,
    /// Minimal power of 3 in k required once this prime appears.
    pub min_n: u32,
}

/// The nine non-3 primes, in parameter order (alpha, beta, gamma1, gamma2,
/// delta1..delta5).
pub const CONJECTURE_PRIMES: [NamedPrime; 9] = [
    NamedPrime { name: "m0", value: "37", min_n: 1 },
    NamedPrime { name: "m1", value: "333667", min_n: 2 },
    NamedPrime { name: "m21", value: "757", min_n: 3 },
    NamedPrime { name: "m22", value: "440334654777631", min_n: 3 },
    NamedPrime { name: "m31", value: "163", min_n: 4 },
    NamedPrime { name: "m32", value: "9397", min_n: 4 },
    NamedPrime { name: "m33", value: "2462401", min_n: 4 },
    NamedPrime { name: "m34", value: "676421558270641", min_n: 4 },
    NamedPrime { name: "m35", value: "130654897808007778425046117", min_n: 4 },
];

/// The m32 value as typeset in the source listing. It is composite
/// (19 * 523) and 10 has even order modulo it; 9397 is used instead.
pub const PRINTED_M32: u64 = 9937;

/// Exponents (n, alpha, beta, gamma1, gamma2, delta1..delta5) of
/// k = 3^n * prod m_i^e_i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConjectureConstraints {
    pub n: u32,
    /// alpha, beta, gamma1, gamma2, delta1..delta5
    pub exps: [u32; 9],
}

impl ConjectureConstraints {
    pub fn new(n: u32, exps: [u32; 9]) -> Self {
        ConjectureConstraints { n, exps }
    }

    pub fn power_of_three(n: u32) -> Self {
        ConjectureConstraints { n, exps: [0; 9] }
    }

    /// Smallest n the ladder allows for these prime exponents.
    pub fn required_n(&self) -> u32 {
        self.exps
            .iter()
            .zip(CONJECTURE_PRIMES.iter())
            .filter(|(&e, _)| e > 0)
            .map(|(_, p)| p.min_n)
            .max()
            .unwrap_or(0)
    }

    pub fn satisfies_ladder(&self) -> bool {
        self.n >= self.required_n()
    }

    pub fn factored(&self) -> FactoredK {
        let mut factors = vec![(BigUint::from(3u32), self.n)];
        for (p, &e) in CONJECTURE_PRIMES.iter().zip(self.exps.iter()) {
            factors.push((p.value.parse().expect("valid literal"), e));
        }
        FactoredK::new(factors)
    }
}

impl fmt::Display for ConjectureConstraints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}", self.n)?;
        let names = ["alpha", "beta", "gamma1", "gamma2", "delta1", "delta2", "delta3", "delta4", "delta5"];
        for (name, e) in names.iter().zip(self.exps.iter()) {
            if *e > 0 {
                write!(f, " {name}={e}")?;
            }
        }
        Ok(())
    }
}

/// An exponent k kept as its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredK {
    /// Sorted by prime, zero multiplicities dropped.
    factors: Vec<(BigUint, u32)>,
}

impl FactoredK {
    /// Merges repeated primes and drops zero exponents. Primality of the
    /// bases is the caller's responsibility; see [`FactoredK::checked`].
    pub fn new(factors: impl IntoIterator<Item = (BigUint, u32)>) -> Self {
        let mut map: BTreeMap<BigUint, u32> = BTreeMap::new();
        for (p, e) in factors {
            if e > 0 {
                *map.entry(p).or_insert(0) += e;
            }
        }
        FactoredK {
            factors: map.into_iter().collect(),
        }
    }

    /// Like [`FactoredK::new`] but rejects non-prime bases.
    pub fn checked(factors: impl IntoIterator<Item = (BigUint, u32)>) -> Result<Self, ArithError> {
        let k = FactoredK::new(factors);
        for (p, _) in &k.factors {
            if !crate::arith::probable_prime(p).is_prime() {
                return Err(ArithError::NotPrime(p.to_string()));
            }
        }
        Ok(k)
    }

    pub fn factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    pub fn value(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e))
    }

    /// Recovers the parameter tuple when every prime is 3 or one of the
    /// named primes.
    pub fn exponents(&self) -> Option<ConjectureConstraints> {
        let mut c = ConjectureConstraints::power_of_three(0);
        'outer: for (p, e) in &self.factors {
            if *p == BigUint::from(3u32) {
                c.n = *e;
                continue;
            }
            for (i, np) in CONJECTURE_PRIMES.iter().enumerate() {
                if p.to_string() == np.value {
                    c.exps[i] = *e;
                    continue 'outer;
                }
            }
            return None;
        }
        Some(c)
    }

    pub fn as_factorization(&self) -> Factorization {
        self.factors.iter().cloned().collect()
    }
}

impl From<u64> for FactoredK {
    fn from(k: u64) -> Self {
        let f = crate::arith::factorize(&BigUint::from(k), crate::arith::DEFAULT_FACTOR_BUDGET)
            .expect("64-bit values factor by trial division and rho");
        FactoredK::new(f)
    }
}

impl fmt::Display for FactoredK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

fn check_modulus(m: &BigUint) -> Result<(), ArithError> {
    if *m < BigUint::from(2u32) {
        Err(ArithError::ModulusTooSmall)
    } else {
        Ok(())
    }
}

/// 10^k mod m.
pub fn modpow10(k: &BigUint, m: &BigUint) -> Result<BigUint, ArithError> {
    check_modulus(m)?;
    Ok(BigUint::from(10u32).modpow(k, m))
}

/// 10^k mod m with k given by its factorization: raises to each prime in
/// turn, so k itself is never formed.
pub fn modpow10_factored(k: &FactoredK, m: &BigUint) -> Result<BigUint, ArithError> {
    check_modulus(m)?;
    let mut r = BigUint::from(10u32) % m;
    for (p, e) in &k.factors {
        for _ in 0..*e {
            r = r.modpow(p, m);
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepdigitCheck {
    /// 10^k = 1 (mod 9ka)
    pub strict: bool,
    /// 10^k = 1 (mod 9k), i.e. a_(k) is Niven
    pub exact: bool,
}

pub fn repdigit_niven_check(a: Digit, k: &FactoredK) -> RepdigitCheck {
    let nine_k = k.value() * 9u32;
    let exact = modpow10_factored(k, &nine_k)
        .map(|r| r.is_one())
        .unwrap_or(false);
    let strict = if a.value() == 0 {
        false
    } else {
        let m = &nine_k * a.value() as u32;
        modpow10_factored(k, &m).map(|r| r.is_one()).unwrap_or(false)
    };
    RepdigitCheck { strict, exact }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridBounds {
    pub max_n: u32,
    /// Upper bound for each of the nine prime exponents.
    pub max_exp: [u32; 9],
}

impl GridBounds {
    pub fn uniform(max_n: u32, max_exp: u32) -> Self {
        GridBounds {
            max_n,
            max_exp: [max_exp; 9],
        }
    }
}

/// Default cap on the bit length of 9k.
pub const DEFAULT_BIT_CAP: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TupleKind {
    /// Satisfies the ladder: the exact condition must hold.
    Admissible,
    /// n is one below the ladder's requirement: the exact condition must fail.
    Violation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridEntry {
    pub tuple: ConjectureConstraints,
    pub kind: TupleKind,
    pub k_bits: u64,
    pub exact: bool,
    /// Digits a for which the 9ka congruence holds.
    pub strict_digits: Vec<u8>,
    /// ord_{9k}(10) divides k; None when the order was not computed.
    pub order_divides_k: Option<bool>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_us: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridReport {
    pub bit_cap: u64,
    pub entries: Vec<GridEntry>,
    /// Tuples whose 9k exceeded the bit cap.
    pub skipped: u64,
    pub passed: usize,
    pub failed: usize,
}

impl GridReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &GridEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    pub fn strip_timings(&mut self) {
        for e in &mut self.entries {
            e.elapsed_us = None;
        }
    }
}

fn tuples(bounds: &GridBounds) -> Vec<ConjectureConstraints> {
    let mut out = Vec::new();
    let mut exps = [0u32; 9];
    fn rec(
        i: usize,
        exps: &mut [u32; 9],
        bounds: &GridBounds,
        out: &mut Vec<ConjectureConstraints>,
    ) {
        if i == 9 {
            for n in 0..=bounds.max_n {
                out.push(ConjectureConstraints::new(n, *exps));
            }
            return;
        }
        for e in 0..=bounds.max_exp[i] {
            exps[i] = e;
            rec(i + 1, exps, bounds, out);
        }
        exps[i] = 0;
    }
    rec(0, &mut exps, bounds, &mut out);
    out
}

fn evaluate(
    tuple: ConjectureConstraints,
    kind: TupleKind,
    bit_cap: u64,
    with_orders: bool,
    order_budget: Duration,
) -> Option<GridEntry> {
    let start = Instant::now();
    let k = tuple.factored();
    let k_value = k.value();
    let nine_k = &k_value * 9u32;
    if nine_k.bits() > bit_cap {
        return None;
    }
    // one power modulo 9k * lcm(1..9) serves every digit
    let r = modpow10_factored(&k, &(&nine_k * 2520u32)).expect("modulus >= 2");
    let exact = (&r % &nine_k).is_one();
    let strict_digits = (1..=9u8)
        .filter(|&a| (&r % (&nine_k * a as u32)).is_one())
        .collect();
    let order_divides_k = if with_orders {
        let mut f = k.as_factorization();
        *f.entry(BigUint::from(3u32)).or_insert(0) += 2;
        multiplicative_order_factored(&nine_k, &f, order_budget)
            .ok()
            .map(|ord| (&k_value % ord).is_zero())
    } else {
        None
    };
    let pass = match kind {
        TupleKind::Admissible => exact,
        TupleKind::Violation => !exact,
    };
    Some(GridEntry {
        tuple,
        kind,
        k_bits: k_value.bits(),
        exact,
        strict_digits,
        order_divides_k,
        pass,
        elapsed_us: Some(start.elapsed().as_micros() as u64),
    })
}

/// Checks 10^k = 1 (mod 9k) for every ladder-admissible tuple in bounds,
/// and that it fails for each minimal violation (n one below the ladder's
/// requirement). Tuples with 9k over `bit_cap` bits are counted as skipped.
pub fn verify_conjecture_grid(
    bounds: &GridBounds,
    bit_cap: u64,
    with_orders: bool,
) -> GridReport {
    let mut work: Vec<(ConjectureConstraints, TupleKind)> = Vec::new();
    for t in tuples(bounds) {
        let req = t.required_n();
        if t.n >= req {
            work.push((t, TupleKind::Admissible));
            if t.n == req && req > 0 {
                work.push((
                    ConjectureConstraints::new(req - 1, t.exps),
                    TupleKind::Violation,
                ));
            }
        }
    }
    let results: Vec<Option<GridEntry>> = work
        .par_iter()
        .map(|&(t, kind)| {
            evaluate(t, kind, bit_cap, with_orders, crate::arith::DEFAULT_FACTOR_BUDGET)
        })
        .collect();
    let skipped = results.iter().filter(|r| r.is_none()).count() as u64;
    let entries: Vec<GridEntry> = results.into_iter().flatten().collect();
    let passed = entries.iter().filter(|e| e.pass).count();
    GridReport {
        bit_cap,
        failed: entries.len() - passed,
        passed,
        skipped,
        entries,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub k: u64,
    /// Exponent tuple when k is 3^n times named primes and satisfies the ladder.
    pub tuple: Option<ConjectureConstraints>,
}

/// Every k <= max_k with 10^k = 1 (mod 9k), with its parameter tuple if any.
pub fn sweep_exact_solutions(max_k: u64) -> Vec<SweepEntry> {
    let primes: Vec<u64> = CONJECTURE_PRIMES
        .iter()
        .filter_map(|p| p.value.parse::<u64>().ok())
        .collect();
    (1..=max_k)
        .into_par_iter()
        .filter(|&k| {
            let m = 9 * k as u128;
            let mut r: u128 = 1 % m;
            let mut base: u128 = 10 % m;
            let mut e = k;
            while e > 0 {
                if e & 1 == 1 {
                    r = r * base % m;
                }
                base = base * base % m;
                e >>= 1;
            }
            r == 1 % m
        })
        .map(|k| {
            let mut rest = k;
            let mut c = ConjectureConstraints::power_of_three(0);
            while rest % 3 == 0 {
                rest /= 3;
                c.n += 1;
            }
            for (i, &p) in primes.iter().enumerate() {
                while rest % p == 0 {
                    rest /= p;
                    c.exps[i] += 1;
                }
            }
            let tuple = (rest == 1 && c.satisfies_ladder()).then_some(c);
            SweepEntry { k, tuple }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroInsertion {
    pub modified: String,
    pub original_digit_sum: u64,
    pub residue: u64,
    pub is_niven: bool,
}

/// Inserts `count` zeros so that `position` digits remain to their right,
/// and reduces the result modulo the original digit sum.
pub fn zero_insertion_probe(
    base: &RepBlockForm,
    position: usize,
    count: usize,
) -> Result<ZeroInsertion, DigitError> {
    let s = base.expand();
    if position > s.len() {
        return Err(DigitError::TooLong(position as u64));
    }
    let cut = s.len() - position;
    let mut digits = s.digits()[..cut].to_vec();
    digits.extend(std::iter::repeat_n(Digit::ZERO, count));
    digits.extend_from_slice(&s.digits()[cut..]);
    let modified = DigitString::new(digits)?;
    let sum = s.digit_sum();
    if sum == 0 {
        return Err(DigitError::AllZero);
    }
    Ok(ZeroInsertion {
        modified: modified.compress().to_string(),
        original_digit_sum: sum,
        residue: modified.value_mod(sum)?,
        is_niven: is_niven(&modified),
    })
}

/// k as u64 if it fits.
pub fn small_k(k: &FactoredK) -> Option<u64> {
    k.value().to_u64()
}
