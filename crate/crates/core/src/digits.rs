//! Decimal digit model: single digits, ordered digit strings, digit
//! multisets and the rep-block notation `d_(n)` used for long runs.
//!
//! Numbers are never materialized as machine integers. Divisibility is
//! decided by streaming the digits through a Horner loop modulo the
//! divisor, which keeps every check linear in the digit count.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::DigitError;

/// A single decimal digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digit(u8);

impl Digit {
    pub const ZERO: Digit = Digit(0);

    pub fn new(value: u8) -> Result<Self, DigitError> {
        if value <= 9 {
            Ok(Digit(value))
        } else {
            Err(DigitError::DigitOutOfRange(value))
        }
    }

    pub fn from_char(c: char) -> Result<Self, DigitError> {
        c.to_digit(10)
            .map(|d| Digit(d as u8))
            .ok_or(DigitError::InvalidChar(c))
    }

    #[inline]
    pub const fn value(self) -> u8 {
        self.0
    }

    pub fn to_char(self) -> char {
        (b'0' + self.0) as char
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Streams `digits` (most significant first) through Horner's rule mod `m`.
///
/// `m` must be nonzero; callers validate.
#[inline]
pub(crate) fn horner_mod(digits: impl IntoIterator<Item = u8>, m: u64) -> u64 {
    let m = m as u128;
    let mut acc: u128 = 0;
    for d in digits {
        acc = (acc * 10 + d as u128) % m;
    }
    acc as u64
}

/// An ordered digit sequence, most significant digit first. Leading zeros
/// are allowed and do not change the numeric value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitString {
    digits: Vec<Digit>,
}

impl DigitString {
    pub fn new(digits: Vec<Digit>) -> Result<Self, DigitError> {
        if digits.is_empty() {
            return Err(DigitError::Empty);
        }
        Ok(DigitString { digits })
    }

    /// Builds a string from raw digit values, validating each.
    pub fn from_values(values: &[u8]) -> Result<Self, DigitError> {
        let digits = values
            .iter()
            .map(|&v| Digit::new(v))
            .collect::<Result<Vec<_>, _>>()?;
        DigitString::new(digits)
    }

    pub(crate) fn from_values_unchecked(values: &[u8]) -> Self {
        debug_assert!(!values.is_empty() && values.iter().all(|&v| v <= 9));
        DigitString {
            digits: values.iter().map(|&v| Digit(v)).collect(),
        }
    }

    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = u8> + '_ {
        self.digits.iter().map(|d| d.0)
    }

    pub fn is_all_zero(&self) -> bool {
        self.digits.iter().all(|d| d.0 == 0)
    }

    pub fn digit_sum(&self) -> u64 {
        self.values().map(u64::from).sum()
    }

    /// The numeric value reduced modulo `m`.
    pub fn value_mod(&self, m: u64) -> Result<u64, DigitError> {
        if m == 0 {
            return Err(DigitError::ZeroModulus);
        }
        Ok(horner_mod(self.values(), m))
    }

    /// Strips leading zeros.
    pub fn normalize(&self) -> Result<DigitString, DigitError> {
        let first = self
            .digits
            .iter()
            .position(|d| d.0 != 0)
            .ok_or(DigitError::AllZero)?;
        Ok(DigitString {
            digits: self.digits[first..].to_vec(),
        })
    }

    /// Full numeric value as a big integer.
    pub fn to_biguint(&self) -> BigUint {
        let mut acc = BigUint::zero();
        for d in self.values() {
            acc = acc * 10u32 + d as u32;
        }
        acc
    }

    pub fn multiset(&self) -> Result<DigitMultiset, DigitError> {
        DigitMultiset::from_digits(self.values())
    }

    pub fn compress(&self) -> RepBlockForm {
        let mut blocks: Vec<(Digit, usize)> = Vec::new();
        for &d in &self.digits {
            match blocks.last_mut() {
                Some((last, n)) if *last == d => *n += 1,
                _ => blocks.push((d, 1)),
            }
        }
        RepBlockForm { blocks }
    }

    /// Parses either a plain digit string or rep-block notation.
    pub fn parse(input: &str) -> Result<Self, DigitError> {
        input.parse::<RepBlockForm>().map(|r| r.expand())
    }
}

impl fmt::Display for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.digits {
            write!(f, "{}", d.0)?;
        }
        Ok(())
    }
}

impl FromStr for DigitString {
    type Err = DigitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DigitString::parse(s)
    }
}

/// Digit content of a number, ignoring order.
///
/// Two strings share a multiset exactly when one is a rearrangement of the
/// other, so every permutation-invariant property is a function of this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DigitMultiset {
    counts: [u32; 10],
    len: u32,
}

impl DigitMultiset {
    pub fn from_counts(counts: [u32; 10]) -> Result<Self, DigitError> {
        let len: u64 = counts.iter().map(|&c| c as u64).sum();
        if len == 0 {
            return Err(DigitError::Empty);
        }
        if counts[1..].iter().all(|&c| c == 0) {
            return Err(DigitError::AllZero);
        }
        let len = u32::try_from(len).map_err(|_| DigitError::TooLong(len))?;
        Ok(DigitMultiset { counts, len })
    }

    pub fn from_digits(values: impl IntoIterator<Item = u8>) -> Result<Self, DigitError> {
        let mut counts = [0u32; 10];
        for v in values {
            let d = Digit::new(v)?;
            counts[d.0 as usize] += 1;
        }
        DigitMultiset::from_counts(counts)
    }

    /// `count` copies of `digit`. Rejects `digit == 0`.
    pub fn repdigit(digit: u8, count: u32) -> Result<Self, DigitError> {
        let d = Digit::new(digit)?;
        let mut counts = [0u32; 10];
        counts[d.0 as usize] = count;
        DigitMultiset::from_counts(counts)
    }

    #[inline]
    pub fn counts(&self) -> &[u32; 10] {
        &self.counts
    }

    #[inline]
    pub fn count(&self, digit: u8) -> u32 {
        self.counts[digit as usize]
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn digit_sum(&self) -> u64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(d, &c)| d as u64 * c as u64)
            .sum()
    }

    /// Digit values present, ascending.
    pub fn distinct(&self) -> impl Iterator<Item = u8> + '_ {
        (0u8..10).filter(move |&d| self.counts[d as usize] > 0)
    }

    pub fn zeros(&self) -> u32 {
        self.counts[0]
    }

    pub fn has_zero(&self) -> bool {
        self.counts[0] > 0
    }

    /// True when every digit is the same nonzero value.
    pub fn is_repdigit(&self) -> bool {
        self.counts[0] == 0 && self.distinct().count() == 1
    }

    /// Exactly one nonzero digit, any number of zeros (`a0_(n)`).
    pub fn is_single_nonzero(&self) -> bool {
        self.counts[1..].iter().sum::<u32>() == 1
    }

    pub fn with_zeros(&self, extra: u32) -> DigitMultiset {
        let mut counts = self.counts;
        counts[0] += extra;
        DigitMultiset {
            counts,
            len: self.len + extra,
        }
    }

    pub fn without_zeros(&self) -> DigitMultiset {
        let mut counts = self.counts;
        counts[0] = 0;
        DigitMultiset {
            counts,
            len: self.len - self.counts[0],
        }
    }

    /// Descending digit order: the largest arrangement, never zero-led.
    pub fn canonical(&self) -> DigitString {
        DigitString::from_values_unchecked(&self.sorted_values(true))
    }

    /// Digits sorted ascending (or descending) as raw values.
    pub fn sorted_values(&self, descending: bool) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len());
        let order: Box<dyn Iterator<Item = u8>> = if descending {
            Box::new((0u8..10).rev())
        } else {
            Box::new(0u8..10)
        };
        for d in order {
            out.extend(std::iter::repeat_n(d, self.counts[d as usize] as usize));
        }
        out
    }

    /// Number of distinct arrangements, k! / prod(c_d!).
    pub fn orbit_size(&self) -> BigUint {
        // Build the multinomial as a product of binomials so intermediates stay exact.
        let mut total = BigUint::one();
        let mut placed: u64 = 0;
        for &c in &self.counts {
            for i in 1..=c as u64 {
                placed += 1;
                total = total * placed / i;
            }
        }
        total
    }

    /// Orbit size if it fits a `u64`.
    pub fn orbit_size_u64(&self) -> Option<u64> {
        u64::try_from(self.orbit_size()).ok()
    }
}

impl PartialOrd for DigitMultiset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by canonical numeric value.
impl Ord for DigitMultiset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| {
            for d in (0..10).rev() {
                // More copies of a larger digit first means a larger canonical value.
                match self.counts[d].cmp(&other.counts[d]) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl fmt::Display for DigitMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical())
    }
}

impl FromStr for DigitMultiset {
    type Err = DigitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DigitString::parse(s)?.multiset()
    }
}

impl TryFrom<String> for DigitMultiset {
    type Error = DigitError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<DigitMultiset> for String {
    fn from(m: DigitMultiset) -> String {
        m.canonical().to_string()
    }
}

/// Run-length view of a digit string: `1_(3)60_(5)` is `111600000`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RepBlockForm {
    blocks: Vec<(Digit, usize)>,
}

impl RepBlockForm {
    /// Builds a canonical form, merging equal neighbours. Zero repeats are rejected.
    pub fn new(blocks: impl IntoIterator<Item = (Digit, usize)>) -> Result<Self, DigitError> {
        let mut out: Vec<(Digit, usize)> = Vec::new();
        for (d, n) in blocks {
            if n == 0 {
                return Err(DigitError::ZeroRepeat);
            }
            match out.last_mut() {
                Some((last, m)) if *last == d => *m += n,
                _ => out.push((d, n)),
            }
        }
        if out.is_empty() {
            return Err(DigitError::Empty);
        }
        Ok(RepBlockForm { blocks: out })
    }

    pub fn blocks(&self) -> &[(Digit, usize)] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|&(_, n)| n).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn expand(&self) -> DigitString {
        let mut digits = Vec::with_capacity(self.len());
        for &(d, n) in &self.blocks {
            digits.extend(std::iter::repeat_n(d, n));
        }
        DigitString { digits }
    }

    /// Value mod `m` without expanding the runs.
    pub fn value_mod(&self, m: u64) -> Result<u64, DigitError> {
        if m == 0 {
            return Err(DigitError::ZeroModulus);
        }
        let mm = m as u128;
        let mut acc: u128 = 0;
        for &(d, n) in &self.blocks {
            // Appending n copies of d: acc * 10^n + d * (10^n - 1) / 9, done by doubling.
            let (pow, rep) = run_mod(d.0 as u128, n as u64, mm);
            acc = (acc * pow + rep) % mm;
        }
        Ok(acc as u64)
    }
}

/// Returns (10^n mod m, d_(n) mod m).
fn run_mod(d: u128, n: u64, m: u128) -> (u128, u128) {
    // (p, r) for a run of length len; combining two runs a, b: (pa*pb, ra*pb + rb).
    let mut result = (1 % m, 0u128);
    let mut base = (10 % m, d % m);
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = (result.0 * base.0 % m, (result.1 * base.0 + base.1) % m);
        }
        base = (base.0 * base.0 % m, (base.1 * base.0 + base.1) % m);
        e >>= 1;
    }
    result
}

/// Runs of three or more render as `d_(n)`; shorter runs are written out.
impl fmt::Display for RepBlockForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(d, n) in &self.blocks {
            if n >= 3 {
                write!(f, "{}_({})", d, n)?;
            } else {
                for _ in 0..n {
                    write!(f, "{}", d)?;
                }
            }
        }
        Ok(())
    }
}

impl FromStr for RepBlockForm {
    type Err = DigitError;

    /// Grammar: `block := digit ["_(" count ")"]`, `string := block+`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let mut blocks = Vec::new();
        let mut chars = s.char_indices().peekable();
        while let Some((pos, c)) = chars.next() {
            let d = Digit::from_char(c).map_err(|_| DigitError::Syntax {
                input: s.to_string(),
                position: pos,
            })?;
            let mut repeat = 1usize;
            if let Some(&(upos, '_')) = chars.peek() {
                chars.next();
                match chars.next() {
                    Some((_, '(')) => {}
                    _ => {
                        return Err(DigitError::Syntax {
                            input: s.to_string(),
                            position: upos,
                        })
                    }
                }
                let mut count = String::new();
                loop {
                    match chars.next() {
                        Some((_, ')')) => break,
                        Some((_, c)) if c.is_ascii_digit() => count.push(c),
                        Some((p, _)) => {
                            return Err(DigitError::Syntax {
                                input: s.to_string(),
                                position: p,
                            })
                        }
                        None => {
                            return Err(DigitError::Syntax {
                                input: s.to_string(),
                                position: s.len(),
                            })
                        }
                    }
                }
                repeat = count.parse().map_err(|_| DigitError::Syntax {
                    input: s.to_string(),
                    position: upos,
                })?;
            }
            blocks.push((d, repeat));
        }
        RepBlockForm::new(blocks)
    }
}
