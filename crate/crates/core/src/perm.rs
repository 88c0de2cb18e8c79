//! Orbits of digit strings under position permutations, and the PINN
//! predicate in two independent forms: exhaustive orbit enumeration and
//! the transposition criterion.

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::digits::{horner_mod, DigitMultiset, DigitString};
use crate::error::PermError;
use crate::record::PinnRecord;

/// Default cap on the number of arrangements the brute-force path visits.
pub const DEFAULT_ORBIT_BUDGET: u64 = 10_000_000;

/// Distinct arrangements of a multiset in lexicographic order, starting
/// from the ascending arrangement (zero-led strings included).
#[derive(Debug, Clone)]
pub struct OrbitIterator {
    multiset: DigitMultiset,
    current: Vec<u8>,
    started: bool,
    done: bool,
}

impl OrbitIterator {
    pub fn new(multiset: DigitMultiset) -> Self {
        OrbitIterator {
            current: multiset.sorted_values(false),
            multiset,
            started: false,
            done: false,
        }
    }

    pub fn multiset(&self) -> &DigitMultiset {
        &self.multiset
    }

    /// Advances and exposes the next arrangement without allocating.
    pub fn advance(&mut self) -> Option<&[u8]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        if next_permutation(&mut self.current) {
            Some(&self.current)
        } else {
            self.done = true;
            None
        }
    }
}

impl Iterator for OrbitIterator {
    type Item = DigitString;

    fn next(&mut self) -> Option<DigitString> {
        self.advance().map(DigitString::from_values_unchecked)
    }
}

pub fn orbit(m: &DigitMultiset) -> OrbitIterator {
    OrbitIterator::new(*m)
}

/// Standard next-lexicographic-permutation step; false once the last
/// (descending) arrangement has been passed.
fn next_permutation(v: &mut [u8]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Divisible by its own digit sum. All-zero strings are not Niven.
pub fn is_niven(s: &DigitString) -> bool {
    let sum = s.digit_sum();
    sum != 0 && horner_mod(s.values(), sum) == 0
}

/// Successful exhaustive check. `quotients[j]` is value_j / digit_sum for
/// the j-th arrangement in lexicographic order; empty when collection was
/// not requested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustiveProof {
    pub checked: u64,
    #[serde(with = "crate::record::biguint_vec_serde")]
    pub quotients: Vec<BigUint>,
}

/// First arrangement (lexicographically) whose value is not a multiple of
/// the digit sum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureWitness {
    pub arrangement: String,
    pub digit_sum: u64,
    pub residue: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BruteForceVerdict {
    Pinn(ExhaustiveProof),
    NotPinn(FailureWitness),
}

impl BruteForceVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, BruteForceVerdict::Pinn(_))
    }
}

fn bruteforce(
    m: &DigitMultiset,
    budget: u64,
    collect: bool,
) -> Result<BruteForceVerdict, PermError> {
    let orbit_size = m.orbit_size();
    if orbit_size > BigUint::from(budget) {
        return Err(PermError::BudgetExceeded {
            orbit: orbit_size.to_string(),
            budget,
        });
    }
    let sum = m.digit_sum();
    let mut quotients = Vec::new();
    let mut checked = 0u64;
    let mut it = OrbitIterator::new(*m);
    while let Some(arr) = it.advance() {
        checked += 1;
        let residue = horner_mod(arr.iter().copied(), sum);
        if residue != 0 {
            return Ok(BruteForceVerdict::NotPinn(FailureWitness {
                arrangement: DigitString::from_values_unchecked(arr).to_string(),
                digit_sum: sum,
                residue,
            }));
        }
        if collect {
            let value = DigitString::from_values_unchecked(arr).to_biguint();
            quotients.push(value / sum);
        }
    }
    Ok(BruteForceVerdict::Pinn(ExhaustiveProof { checked, quotients }))
}

/// Enumerates the whole orbit and checks every arrangement, returning all
/// quotients on success.
pub fn is_pinn_bruteforce(m: &DigitMultiset, budget: u64) -> Result<BruteForceVerdict, PermError> {
    bruteforce(m, budget, true)
}

/// Same verdict as [`is_pinn_bruteforce`] without materializing quotients.
pub fn is_pinn_bruteforce_count(
    m: &DigitMultiset,
    budget: u64,
) -> Result<BruteForceVerdict, PermError> {
    bruteforce(m, budget, false)
}

/// Evidence for the transposition criterion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionProof {
    /// Digit value pairs (u, v) with u > v, both present.
    pub digit_pairs_checked: Vec<(u8, u8)>,
    /// Position gaps d for which every offset was checked.
    pub position_gaps_checked: Vec<usize>,
    /// Canonical value mod digit sum.
    pub base_residue: u64,
}

/// The first swap whose value change is not a multiple of the digit sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapFailure {
    pub high: u8,
    pub low: u8,
    pub offset: usize,
    pub gap: usize,
    pub residue: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionVerdict {
    pub holds: bool,
    pub proof: CriterionProof,
    pub swap_failure: Option<SwapFailure>,
}

/// Exact PINN test without enumerating the orbit.
///
/// Every permutation is a product of transpositions, and swapping digit u
/// at position j with v at position i changes the value by
/// (u - v)(10^j - 10^i). So all arrangements share one residue mod the
/// digit sum s iff s divides every such change, and then they are all
/// multiples of s iff the canonical arrangement is.
pub fn is_pinn_criterion(m: &DigitMultiset) -> CriterionVerdict {
    let k = m.len();
    let s = m.digit_sum();
    let sm = s as u128;
    let distinct: Vec<u8> = m.distinct().collect();

    // pow10[i] = 10^i mod s
    let mut pow10 = Vec::with_capacity(k);
    let mut p = 1 % sm;
    for _ in 0..k {
        pow10.push(p);
        p = p * 10 % sm;
    }

    let mut pairs = Vec::new();
    for (a, &hi) in distinct.iter().enumerate().rev() {
        for &lo in distinct[..a].iter().rev() {
            pairs.push((hi, lo));
        }
    }

    let mut gaps_checked = Vec::new();
    let mut swap_failure = None;
    if !pairs.is_empty() {
        'gaps: for gap in 1..k {
            let span = (pow10[gap] + sm - 1) % sm; // 10^gap - 1 mod s
            for offset in 0..k - gap {
                let shifted = pow10[offset] * span % sm;
                for &(hi, lo) in &pairs {
                    let r = (hi - lo) as u128 * shifted % sm;
                    if r != 0 {
                        swap_failure = Some(SwapFailure {
                            high: hi,
                            low: lo,
                            offset,
                            gap,
                            residue: r as u64,
                        });
                        break 'gaps;
                    }
                }
            }
            gaps_checked.push(gap);
        }
    }

    let base_residue = horner_mod(m.sorted_values(true), s);
    CriterionVerdict {
        holds: swap_failure.is_none() && base_residue == 0,
        proof: CriterionProof {
            digit_pairs_checked: pairs,
            position_gaps_checked: gaps_checked,
            base_residue,
        },
        swap_failure,
    }
}

/// Fast boolean form of [`is_pinn_criterion`] for search loops.
///
/// Since 10^d - 1 is a multiple of 9 for every d >= 1, the swap condition
/// over all gaps and offsets collapses to s | 9(u - v) for each present
/// pair when k >= 2. The criterion test suite checks both forms agree.
pub fn is_pinn(m: &DigitMultiset) -> bool {
    let s = m.digit_sum();
    if m.len() >= 2 {
        let mut prev: Option<u8> = None;
        for d in m.distinct() {
            if let Some(p) = prev {
                // Differences of adjacent present digits generate all others.
                if !(9 * (d - p) as u64).is_multiple_of(s) {
                    return false;
                }
            }
            prev = Some(d);
        }
    }
    horner_mod(m.sorted_values(true), s) == 0
}

/// Checks that a set of values, read as k-digit strings with leading zeros,
/// contains every rearrangement of each of its members.
pub fn values_closed_under_permutation(
    values: &[DigitString],
    k: usize,
) -> Result<bool, PermError> {
    let mut by_multiset: HashMap<DigitMultiset, std::collections::HashSet<Vec<u8>>> =
        HashMap::new();
    for v in values {
        let Ok(norm) = v.normalize() else {
            return Ok(false);
        };
        if norm.len() > k {
            return Err(PermError::LengthMismatch {
                expected: k,
                found: norm.len(),
            });
        }
        let mut padded = vec![0u8; k - norm.len()];
        padded.extend(norm.values());
        let ms = DigitMultiset::from_digits(padded.iter().copied())
            .expect("normalized value has a nonzero digit");
        by_multiset.entry(ms).or_default().insert(padded);
    }
    Ok(by_multiset
        .iter()
        .all(|(ms, members)| BigUint::from(members.len()) == ms.orbit_size()))
}

/// True iff the records' combined orbit values form a permutation-closed
/// set of PINNs: every record's orbit is entirely Niven.
pub fn orbit_closure_check(records: &[PinnRecord], k: usize) -> Result<bool, PermError> {
    for r in records {
        if r.multiset.len() != k {
            return Err(PermError::LengthMismatch {
                expected: k,
                found: r.multiset.len(),
            });
        }
    }
    Ok(records.iter().all(|r| is_pinn_criterion(&r.multiset).holds))
}
