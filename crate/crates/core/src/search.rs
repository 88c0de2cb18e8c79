//! Exhaustive search over digit multisets.
//!
//! A k-digit PINN is determined by its digit multiset, so the search walks
//! the C(k+9, 9) multisets instead of the 10^k integers. Stage 1 covers
//! zero-free multisets; stage 2 pads every shorter zero-free PINN with
//! zeros up to length k and keeps the ones that stay PINNs.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::digits::{DigitMultiset, DigitString};
use crate::error::SearchError;
use crate::perm::{is_pinn, is_pinn_bruteforce_count, BruteForceVerdict, DEFAULT_ORBIT_BUDGET};
use crate::record::PinnRecord;

/// Hard cap on k for zero-free enumeration (C(28, 8) ~ 3.1M multisets).
pub const MAX_STAGE1_K: usize = 20;

/// Default upper bound for [`census`].
pub const DEFAULT_CENSUS_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub k: usize,
    /// false: stage 1 only (zero-free multisets); true: stage 1 plus zero augmentation.
    pub allow_zero: bool,
    pub exclude_repdigits: bool,
    /// Orbits up to this size are re-checked by full enumeration.
    pub orbit_budget: u64,
    pub parallel_chunks: usize,
    /// Also scan every zero-containing multiset and compare with stage 2.
    pub exhaustive_zero_scan: bool,
}

impl SearchConfig {
    pub fn new(k: usize) -> Self {
        SearchConfig {
            k,
            allow_zero: true,
            exclude_repdigits: false,
            orbit_budget: DEFAULT_ORBIT_BUDGET,
            parallel_chunks: 64,
            exhaustive_zero_scan: false,
        }
    }

    pub fn stage1(k: usize) -> Self {
        SearchConfig {
            allow_zero: false,
            ..SearchConfig::new(k)
        }
    }

    fn validate(&self) -> Result<(), SearchError> {
        if self.k == 0 {
            return Err(SearchError::ZeroLength);
        }
        if self.orbit_budget == 0 {
            return Err(SearchError::ZeroBudget);
        }
        Ok(())
    }
}

/// Outcome of scanning all zero-containing multisets directly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroScan {
    pub scanned: u64,
    pub found: usize,
    /// PINNs the direct scan found but stage 2 did not.
    pub missed_by_stage2: Vec<DigitMultiset>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchReport {
    pub k: usize,
    /// Sorted ascending by canonical value.
    pub records: Vec<PinnRecord>,
    pub stage1_count: usize,
    pub stage2_count: usize,
    pub multisets_scanned: u64,
    /// Records whose full orbit was also enumerated.
    pub bruteforce_confirmed: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_scan: Option<ZeroScan>,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Equality ignores `elapsed`.
impl PartialEq for SearchReport {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k
            && self.records == other.records
            && self.stage1_count == other.stage1_count
            && self.stage2_count == other.stage2_count
            && self.multisets_scanned == other.multisets_scanned
            && self.bruteforce_confirmed == other.bruteforce_confirmed
            && self.zero_scan == other.zero_scan
    }
}

impl Eq for SearchReport {}

impl SearchReport {
    pub fn multisets(&self) -> Vec<DigitMultiset> {
        self.records.iter().map(|r| r.multiset).collect()
    }

    pub fn canonicals(&self) -> Vec<String> {
        self.records.iter().map(|r| r.canonical.clone()).collect()
    }

    /// Every k-digit number (no leading zero) in the union of the orbits,
    /// ascending.
    pub fn values(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .records
            .iter()
            .flat_map(|r| {
                crate::perm::orbit(&r.multiset)
                    .filter(|s| s.digits()[0].value() != 0)
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
            })
            .collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }
}

/// Zero-free PINN multisets for each length below some k.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LowerCatalog {
    by_length: BTreeMap<usize, Vec<DigitMultiset>>,
}

impl LowerCatalog {
    pub fn new() -> Self {
        LowerCatalog::default()
    }

    /// Registers the complete zero-free list for length `j` (possibly empty).
    pub fn insert(&mut self, j: usize, multisets: Vec<DigitMultiset>) {
        self.by_length.insert(j, multisets);
    }

    pub fn get(&self, j: usize) -> Option<&[DigitMultiset]> {
        self.by_length.get(&j).map(|v| v.as_slice())
    }

    /// Runs stage 1 for j = 1..k-1.
    pub fn build(k: usize) -> Result<Self, SearchError> {
        let mut cat = LowerCatalog::new();
        for j in 1..k {
            let report = search_stage1(&SearchConfig {
                orbit_budget: 1,
                ..SearchConfig::stage1(j)
            })?;
            cat.insert(j, report.multisets());
        }
        Ok(cat)
    }
}

/// All count vectors of length k over digits `lo..=9`, in a fixed order.
fn enumerate_multisets(k: usize, lo: u8) -> Vec<[u32; 10]> {
    fn rec(d: u8, lo: u8, left: u32, counts: &mut [u32; 10], out: &mut Vec<[u32; 10]>) {
        if d < lo {
            if left == 0 {
                out.push(*counts);
            }
            return;
        }
        if d == lo {
            counts[d as usize] = left;
            out.push(*counts);
            counts[d as usize] = 0;
            return;
        }
        for c in (0..=left).rev() {
            counts[d as usize] = c;
            rec(d - 1, lo, left - c, counts, out);
        }
        counts[d as usize] = 0;
    }
    let mut out = Vec::new();
    rec(9, lo, k as u32, &mut [0; 10], &mut out);
    out
}

fn scan(
    candidates: &[[u32; 10]],
    chunks: usize,
    keep: impl Fn(&DigitMultiset) -> bool + Sync,
) -> Vec<DigitMultiset> {
    let chunk_len = candidates.len().div_ceil(chunks.max(1)).max(1);
    let mut found: Vec<DigitMultiset> = candidates
        .par_chunks(chunk_len)
        .flat_map_iter(|chunk| {
            chunk
                .iter()
                .filter_map(|c| DigitMultiset::from_counts(*c).ok())
                .filter(|m| keep(m) && is_pinn(m))
                .collect::<Vec<_>>()
        })
        .collect();
    found.sort();
    found
}

/// Turns passing multisets into records, enumerating orbits within budget
/// as an independent confirmation.
fn certify_all(
    found: &[DigitMultiset],
    budget: u64,
) -> Result<(Vec<PinnRecord>, usize), SearchError> {
    let results: Vec<Result<(PinnRecord, bool), SearchError>> = found
        .par_iter()
        .map(|m| {
            let record = PinnRecord::certify_criterion(m).map_err(|e| {
                SearchError::OracleDisagreement(format!("{m}: fast filter passed, criterion {e:?}"))
            })?;
            let confirmed = match is_pinn_bruteforce_count(m, budget) {
                Ok(BruteForceVerdict::Pinn(_)) => true,
                Ok(BruteForceVerdict::NotPinn(w)) => {
                    return Err(SearchError::OracleDisagreement(format!(
                        "{m}: enumeration found {} with residue {}",
                        w.arrangement, w.residue
                    )))
                }
                Err(_) => false,
            };
            Ok((record, confirmed))
        })
        .collect();
    let mut records = Vec::with_capacity(results.len());
    let mut confirmed = 0;
    for r in results {
        let (rec, c) = r?;
        confirmed += c as usize;
        records.push(rec);
    }
    Ok((records, confirmed))
}

/// Stage 1: all k-digit multisets over 1..9.
pub fn search_stage1(cfg: &SearchConfig) -> Result<SearchReport, SearchError> {
    cfg.validate()?;
    if cfg.allow_zero {
        return Err(SearchError::ZerosAllowed);
    }
    if cfg.k > MAX_STAGE1_K {
        return Err(SearchError::LengthCap {
            k: cfg.k,
            cap: MAX_STAGE1_K,
        });
    }
    let start = Instant::now();
    let candidates = enumerate_multisets(cfg.k, 1);
    let found = scan(&candidates, cfg.parallel_chunks, |m| {
        !(cfg.exclude_repdigits && m.is_repdigit())
    });
    let (records, confirmed) = certify_all(&found, cfg.orbit_budget)?;
    Ok(SearchReport {
        k: cfg.k,
        stage1_count: records.len(),
        stage2_count: 0,
        records,
        multisets_scanned: candidates.len() as u64,
        bruteforce_confirmed: confirmed,
        zero_scan: None,
        elapsed: start.elapsed(),
    })
}

/// Stage 2: zero augmentation of every shorter zero-free PINN, merged with
/// the stage-1 result for k.
pub fn search_stage2(cfg: &SearchConfig, lower: &LowerCatalog) -> Result<SearchReport, SearchError> {
    cfg.validate()?;
    if !cfg.allow_zero {
        return Err(SearchError::ZerosDisallowed);
    }
    let start = Instant::now();
    let mut augmented = BTreeSet::new();
    let mut scanned = 0u64;
    for j in 1..cfg.k {
        let base = lower.get(j).ok_or(SearchError::MissingLowerCatalog(j))?;
        for m in base {
            scanned += 1;
            let padded = m.with_zeros((cfg.k - j) as u32);
            if is_pinn(&padded) {
                augmented.insert(padded);
            }
        }
    }
    let augmented: Vec<DigitMultiset> = augmented.into_iter().collect();
    let (aug_records, aug_confirmed) = certify_all(&augmented, cfg.orbit_budget)?;

    let stage1 = search_stage1(&SearchConfig {
        allow_zero: false,
        ..cfg.clone()
    })?;

    let zero_scan = if cfg.exhaustive_zero_scan {
        let candidates: Vec<[u32; 10]> = enumerate_multisets(cfg.k, 0)
            .into_iter()
            .filter(|c| c[0] > 0)
            .collect();
        let direct = scan(&candidates, cfg.parallel_chunks, |_| true);
        let missed = direct
            .iter()
            .filter(|m| augmented.binary_search(m).is_err())
            .copied()
            .collect();
        Some(ZeroScan {
            scanned: candidates.len() as u64,
            found: direct.len(),
            missed_by_stage2: missed,
        })
    } else {
        None
    };

    let stage2_count = aug_records.len();
    let mut records = stage1.records;
    records.extend(aug_records);
    records.sort_by_key(|a| a.multiset);
    Ok(SearchReport {
        k: cfg.k,
        stage1_count: stage1.stage1_count,
        stage2_count,
        records,
        multisets_scanned: stage1.multisets_scanned + scanned,
        bruteforce_confirmed: stage1.bruteforce_confirmed + aug_confirmed,
        zero_scan,
        elapsed: start.elapsed(),
    })
}

/// Both stages (or stage 1 alone when zeros are disallowed).
pub fn search(cfg: &SearchConfig) -> Result<SearchReport, SearchError> {
    if !cfg.allow_zero {
        return search_stage1(cfg);
    }
    cfg.validate()?;
    let lower = LowerCatalog::build(cfg.k)?;
    search_stage2(cfg, &lower)
}

/// Multisets of `lower` (length k-1) whose one-zero padding is not in
/// `upper` (length k). Empty iff the value set of the shorter PINNs is
/// contained in that of the longer ones.
pub fn nesting_failures(lower: &SearchReport, upper: &SearchReport) -> Vec<DigitMultiset> {
    let upper_set: BTreeSet<DigitMultiset> = upper.records.iter().map(|r| r.multiset).collect();
    lower
        .records
        .iter()
        .map(|r| r.multiset)
        .filter(|m| {
            let pad = upper.k.saturating_sub(m.len()) as u32;
            !upper_set.contains(&m.with_zeros(pad))
        })
        .collect()
}

/// PINNs outside the expected digit-sum pattern: not a single nonzero
/// digit, not a repdigit, and digit sum not a multiple of 3 in [3, 81].
pub fn digit_sum_exceptions(records: &[PinnRecord]) -> Vec<DigitMultiset> {
    records
        .iter()
        .map(|r| r.multiset)
        .filter(|m| !m.is_single_nonzero() && !m.without_zeros().is_repdigit())
        .filter(|m| {
            let s = m.digit_sum();
            s % 3 != 0 || !(3..=81).contains(&s)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub max_value: u64,
    pub pinn_count: u64,
    pub niven_count: u64,
    pub digit_sum_histogram: BTreeMap<u64, u64>,
    /// Non-trivial, non-repdigit PINNs violating the digit-sum pattern.
    pub exceptions: Vec<u64>,
}

fn digit_counts(mut n: u64) -> ([u32; 10], u64) {
    let mut counts = [0u32; 10];
    let mut sum = 0;
    while n > 0 {
        let d = n % 10;
        counts[d as usize] += 1;
        sum += d;
        n /= 10;
    }
    (counts, sum)
}

/// Counts PINNs and Niven numbers in 1..=max_value.
pub fn census(max_value: u64, limit: u64) -> Result<CensusReport, SearchError> {
    if max_value > limit {
        return Err(SearchError::CensusBound {
            max: max_value,
            limit,
        });
    }
    let chunk = 1 << 16;
    let starts: Vec<u64> = (1..=max_value).step_by(chunk).collect();
    let partials: Vec<(u64, u64, BTreeMap<u64, u64>, Vec<u64>)> = starts
        .par_iter()
        .map(|&lo| {
            let hi = (lo + chunk as u64 - 1).min(max_value);
            let mut pinn = 0;
            let mut niven = 0;
            let mut hist = BTreeMap::new();
            let mut exceptions = Vec::new();
            for n in lo..=hi {
                let (counts, sum) = digit_counts(n);
                if n % sum != 0 {
                    continue;
                }
                niven += 1;
                let m = DigitMultiset::from_counts(counts).expect("n >= 1");
                if is_pinn(&m) {
                    pinn += 1;
                    *hist.entry(sum).or_insert(0) += 1;
                    let trivial = m.is_single_nonzero() || m.without_zeros().is_repdigit();
                    if !trivial && (sum % 3 != 0 || !(3..=81).contains(&sum)) {
                        exceptions.push(n);
                    }
                }
            }
            (pinn, niven, hist, exceptions)
        })
        .collect();
    let mut report = CensusReport {
        max_value,
        pinn_count: 0,
        niven_count: 0,
        digit_sum_histogram: BTreeMap::new(),
        exceptions: Vec::new(),
    };
    for (p, n, h, e) in partials {
        report.pinn_count += p;
        report.niven_count += n;
        for (s, c) in h {
            *report.digit_sum_histogram.entry(s).or_insert(0) += c;
        }
        report.exceptions.extend(e);
    }
    Ok(report)
}

/// Ascending PINN values in 1..=max_value.
pub fn pinn_values_up_to(max_value: u64, limit: u64) -> Result<Vec<u64>, SearchError> {
    if max_value > limit {
        return Err(SearchError::CensusBound {
            max: max_value,
            limit,
        });
    }
    Ok((1..=max_value)
        .filter(|&n| {
            let (counts, _) = digit_counts(n);
            is_pinn(&DigitMultiset::from_counts(counts).expect("n >= 1"))
        })
        .collect())
}

/// "index value" lines, 1-based.
pub fn bfile_lines<T: std::fmt::Display>(values: &[T]) -> String {
    let mut out = String::new();
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{} {}\n", i + 1, v));
    }
    out
}

/// CSV rendering of a report, one row per record.
pub fn report_csv(report: &SearchReport) -> String {
    let mut out = String::from("canonical,rep_block,length,digit_sum,orbit_size,has_zero\n");
    for r in &report.records {
        let rep = DigitString::parse(&r.canonical)
            .expect("canonical is a digit string")
            .compress();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.canonical,
            rep,
            r.multiset.len(),
            r.digit_sum,
            r.orbit_size,
            r.multiset.has_zero()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canon(report: &SearchReport) -> Vec<String> {
        report.canonicals()
    }

    #[test]
    fn enumeration_counts() {
        // C(k+8, 8) zero-free and C(k+9, 9) overall
        assert_eq!(enumerate_multisets(4, 1).len(), 495);
        assert_eq!(enumerate_multisets(4, 0).len(), 715);
        assert_eq!(enumerate_multisets(14, 1).len(), 319_770);
        assert_eq!(enumerate_multisets(1, 1).len(), 9);
    }

    #[test]
    fn stage1_k2() {
        let r = search_stage1(&SearchConfig::stage1(2)).unwrap();
        assert_eq!(canon(&r), ["21", "42", "54", "63", "72", "81", "84"]);
        assert_eq!(r.bruteforce_confirmed, 7);
    }

    #[test]
    fn stage1_k4_is_n45() {
        let r = search_stage1(&SearchConfig::stage1(4)).unwrap();
        assert_eq!(r.records.len(), 12);
        assert_eq!(r.multisets_scanned, 495);
        let expected: Vec<DigitMultiset> = [
            "1116", "1125", "1134", "1224", "1233", "2223", "2448", "2268", "2466", "3699",
            "4446", "6669",
        ]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
        assert_eq!(r.multisets(), expected);
    }

    #[test]
    fn stage2_examples() {
        let lower = LowerCatalog::build(4).unwrap();
        let r = search_stage2(&SearchConfig::new(4), &lower).unwrap();
        assert_eq!(r.stage1_count, 12);
        assert_eq!(r.stage2_count, 33);
        // every 3-digit PINN takes one more zero
        let k3 = search(&SearchConfig::new(3)).unwrap();
        assert!(nesting_failures(&k3, &r).is_empty());

        let r3 = search(&SearchConfig::new(3)).unwrap();
        assert!(r3.multisets().contains(&"120".parse().unwrap()));

        let rep27 = DigitMultiset::repdigit(1, 27).unwrap();
        assert!(is_pinn(&rep27));
        assert!(!is_pinn(&rep27.with_zeros(1)));
    }

    #[test]
    fn stage2_requires_lower_lengths() {
        let mut lower = LowerCatalog::new();
        lower.insert(1, vec!["1".parse().unwrap()]);
        assert_eq!(
            search_stage2(&SearchConfig::new(3), &lower),
            Err(SearchError::MissingLowerCatalog(2))
        );
    }

    #[test]
    fn config_errors() {
        assert_eq!(
            search_stage1(&SearchConfig::stage1(0)),
            Err(SearchError::ZeroLength)
        );
        assert_eq!(
            search_stage1(&SearchConfig::stage1(21)),
            Err(SearchError::LengthCap { k: 21, cap: 20 })
        );
        assert_eq!(
            search_stage1(&SearchConfig::new(3)),
            Err(SearchError::ZerosAllowed)
        );
        let cfg = SearchConfig {
            orbit_budget: 0,
            ..SearchConfig::stage1(3)
        };
        assert_eq!(search_stage1(&cfg), Err(SearchError::ZeroBudget));
    }

    #[test]
    fn zero_scan_agrees_with_stage2() {
        for k in 2..=7 {
            let cfg = SearchConfig {
                exhaustive_zero_scan: true,
                ..SearchConfig::new(k)
            };
            let r = search(&cfg).unwrap();
            let scan = r.zero_scan.unwrap();
            assert!(scan.missed_by_stage2.is_empty(), "k={k}");
            assert_eq!(scan.found, r.stage2_count, "k={k}");
        }
    }

    #[test]
    fn census_examples() {
        assert_eq!(census(9, DEFAULT_CENSUS_LIMIT).unwrap().pinn_count, 9);
        let c = census(99, DEFAULT_CENSUS_LIMIT).unwrap();
        assert_eq!(c.pinn_count, 32);
        let c = census(100_000, DEFAULT_CENSUS_LIMIT).unwrap();
        assert!(c.pinn_count < c.niven_count);
        assert!(c.exceptions.is_empty());
        assert_eq!(
            census(11, 10),
            Err(SearchError::CensusBound { max: 11, limit: 10 })
        );
    }

    #[test]
    fn values_and_bfile() {
        let r = search(&SearchConfig::new(2)).unwrap();
        let v = r.values();
        assert_eq!(v.len(), 23);
        assert_eq!(v.first().map(String::as_str), Some("10"));
        assert_eq!(v.last().map(String::as_str), Some("90"));
        let b = bfile_lines(&v[..3]);
        assert_eq!(b, "1 10\n2 12\n3 18\n");
    }

    #[test]
    fn csv_rows() {
        let r = search(&SearchConfig::new(3)).unwrap();
        let csv = report_csv(&r);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 34);
        assert!(lines.contains(&"111,1_(3),3,3,1,false"));
        assert!(lines.contains(&"210,210,3,3,6,true"));
    }
}
