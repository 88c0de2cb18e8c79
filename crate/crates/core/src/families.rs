//! Closed-form PINN families.
//!
//! Two sources: the explicit decompositions for k = 1..9 (kept verbatim in
//! `data/catalog.txt`), and ten parametrized families that pad a fixed
//! nonzero core with zeros to any length k.

use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::digits::{Digit, DigitMultiset, RepBlockForm};
use crate::error::{DigitError, FamilyError};
use crate::perm::{
    is_pinn, is_pinn_bruteforce_count, is_pinn_criterion, BruteForceVerdict, CriterionProof,
};

const CATALOG_DATA: &str = include_str!("../data/catalog.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyId {
    Ka,
    Kb,
    Kc,
    Kd,
    Ke,
    Kf,
    Kg,
    Kh,
    Ki,
    Kj,
}

impl FamilyId {
    pub const ALL: [FamilyId; 10] = [
        FamilyId::Ka,
        FamilyId::Kb,
        FamilyId::Kc,
        FamilyId::Kd,
        FamilyId::Ke,
        FamilyId::Kf,
        FamilyId::Kg,
        FamilyId::Kh,
        FamilyId::Ki,
        FamilyId::Kj,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::Ka => "ka",
            FamilyId::Kb => "kb",
            FamilyId::Kc => "kc",
            FamilyId::Kd => "kd",
            FamilyId::Ke => "ke",
            FamilyId::Kf => "kf",
            FamilyId::Kg => "kg",
            FamilyId::Kh => "kh",
            FamilyId::Ki => "ki",
            FamilyId::Kj => "kj",
        }
    }

    /// Nonzero cores in rep-block notation; members are `core 0_(k - len)`.
    fn cores(self) -> &'static [&'static str] {
        match self {
            FamilyId::Ka => &["1", "2", "3", "4", "5", "6", "7", "8", "9"],
            FamilyId::Kb => &["12", "18", "24", "27", "36", "45", "48"],
            FamilyId::Kc => &[
                "1_(3)", "2_(3)", "3_(3)", "4_(3)", "5_(3)", "6_(3)", "7_(3)", "8_(3)", "9_(3)",
            ],
            FamilyId::Kd => &["117", "126", "135", "144", "225", "234", "288", "468"],
            FamilyId::Ke => &[
                "1_(3)6", "1125", "1134", "1224", "1233", "2_(3)3", "2448", "2268", "2466",
                "3699", "4_(3)6", "6_(3)9",
            ],
            FamilyId::Kf => &[
                "1_(4)5", "1_(3)24", "1_(3)33", "11223", "12_(4)", "2_(3)48", "2_(3)66", "22446",
                "24_(4)", "3_(3)99", "33669", "36_(4)", "48_(4)",
            ],
            FamilyId::Kg => &[
                "1_(5)4", "1_(4)23", "1_(3)2_(3)", "2_(5)8", "2_(4)46", "2_(3)4_(3)", "3_(4)69",
                "3_(3)6_(3)", "4_(3)8_(3)",
            ],
            FamilyId::Kh => &[
                "1_(6)3", "1_(5)22", "2_(6)6", "2_(5)44", "3_(6)9", "3_(5)66", "4_(5)88",
            ],
            FamilyId::Ki => &["1_(7)2", "2_(7)4", "3_(7)6", "4_(7)8"],
            FamilyId::Kj => &[
                "1_(9)", "2_(9)", "3_(9)", "4_(9)", "5_(9)", "6_(9)", "7_(9)", "8_(9)", "9_(9)",
            ],
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FamilyId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown family {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyTemplate {
    pub id: FamilyId,
    /// Nonzero cores; each member appends zeros up to length k.
    pub base_patterns: Vec<RepBlockForm>,
    /// Core length plus one.
    pub min_k: usize,
}

impl FamilyTemplate {
    pub fn get(id: FamilyId) -> FamilyTemplate {
        let base_patterns: Vec<RepBlockForm> = id
            .cores()
            .iter()
            .map(|s| s.parse().expect("family cores are well-formed"))
            .collect();
        let core_len = base_patterns[0].len();
        debug_assert!(base_patterns.iter().all(|p| p.len() == core_len));
        FamilyTemplate {
            id,
            base_patterns,
            min_k: core_len + 1,
        }
    }

    pub fn all() -> Vec<FamilyTemplate> {
        FamilyId::ALL.into_iter().map(FamilyTemplate::get).collect()
    }

    pub fn core_len(&self) -> usize {
        self.min_k - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "name", rename_all = "snake_case")]
pub enum InstanceSource {
    Family(FamilyId),
    /// A named set from the k = 1..9 listings, e.g. `N45`.
    Listed(String),
}

impl fmt::Display for InstanceSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceSource::Family(id) => write!(f, "{id}"),
            InstanceSource::Listed(name) => f.write_str(name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyInstance {
    pub source: InstanceSource,
    pub k: usize,
    pub members: Vec<DigitMultiset>,
    /// Members in listing order and notation (`120_(8)`, not the canonical `210_(8)`).
    pub patterns: Vec<RepBlockForm>,
}

impl FamilyInstance {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn instantiate(template: &FamilyTemplate, k: usize) -> Result<FamilyInstance, FamilyError> {
    if k < template.min_k {
        return Err(FamilyError::KTooSmall {
            family: template.id.to_string(),
            k,
            min_k: template.min_k,
        });
    }
    let zeros = k - template.core_len();
    let patterns: Vec<RepBlockForm> = template
        .base_patterns
        .iter()
        .map(|core| {
            RepBlockForm::new(
                core.blocks()
                    .iter()
                    .copied()
                    .chain(std::iter::once((Digit::ZERO, zeros))),
            )
            .expect("positive repeats")
        })
        .collect();
    let members = patterns
        .iter()
        .map(|p| p.expand().multiset().expect("cores are nonzero"))
        .collect();
    Ok(FamilyInstance {
        source: InstanceSource::Family(template.id),
        k,
        members,
        patterns,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberVerdict {
    pub multiset: DigitMultiset,
    pub pattern: String,
    pub digit_sum: u64,
    pub verdict: bool,
    pub proof: CriterionProof,
    /// Full-orbit verdict when the orbit fits the budget.
    pub bruteforce: Option<bool>,
}

/// Checks every member with the criterion, and by enumeration when the
/// orbit has at most `budget` arrangements.
pub fn verify_family(instance: &FamilyInstance, budget: u64) -> Vec<MemberVerdict> {
    instance
        .members
        .par_iter()
        .zip(instance.patterns.par_iter())
        .map(|(m, p)| {
            let crit = is_pinn_criterion(m);
            let bruteforce = match is_pinn_bruteforce_count(m, budget) {
                Ok(BruteForceVerdict::Pinn(_)) => Some(true),
                Ok(BruteForceVerdict::NotPinn(_)) => Some(false),
                Err(_) => None,
            };
            MemberVerdict {
                multiset: *m,
                pattern: p.to_string(),
                digit_sum: m.digit_sum(),
                verdict: crit.holds && bruteforce != Some(false),
                proof: crit.proof,
                bruteforce,
            }
        })
        .collect()
}

struct ParsedCatalog {
    sets: Vec<FamilyInstance>,
}

fn parse_catalog(data: &str) -> Result<ParsedCatalog, FamilyError> {
    let mut sets = Vec::new();
    for (idx, line) in data.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: &str| FamilyError::CatalogData {
            line: line_no,
            reason: reason.to_string(),
        };
        let (head, body) = line.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let mut head = head.split_whitespace();
        let k: usize = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("missing length"))?;
        let name = head.next().ok_or_else(|| bad("missing set name"))?;
        let mut patterns = Vec::new();
        let mut members = Vec::new();
        for token in body.split_whitespace() {
            let rep: RepBlockForm = token.parse().map_err(|e: DigitError| bad(&e.to_string()))?;
            if rep.len() != k {
                return Err(bad(&format!("{token} has length {}, expected {k}", rep.len())));
            }
            members.push(rep.expand().multiset()?);
            patterns.push(rep);
        }
        sets.push(FamilyInstance {
            source: InstanceSource::Listed(name.to_string()),
            k,
            members,
            patterns,
        });
    }
    Ok(ParsedCatalog { sets })
}

fn parsed_catalog() -> &'static ParsedCatalog {
    static CATALOG: OnceLock<ParsedCatalog> = OnceLock::new();
    CATALOG.get_or_init(|| parse_catalog(CATALOG_DATA).expect("bundled catalog parses"))
}

/// The listed decomposition of the k-digit PINNs, k = 1..9.
pub fn catalog(k: usize) -> Result<Vec<FamilyInstance>, FamilyError> {
    if !(1..=9).contains(&k) {
        return Err(FamilyError::CatalogRange(k));
    }
    Ok(parsed_catalog()
        .sets
        .iter()
        .filter(|s| s.k == k)
        .cloned()
        .collect())
}

/// Union of all listed multisets for k, sorted by canonical value.
pub fn catalog_multisets(k: usize) -> Result<Vec<DigitMultiset>, FamilyError> {
    let mut all: Vec<DigitMultiset> = catalog(k)?
        .into_iter()
        .flat_map(|s| s.members)
        .collect();
    all.sort();
    all.dedup();
    Ok(all)
}

/// Padding every family member at `k_from` with zeros gives a member of
/// the same family at `k_to`, and the padded multiset is still a PINN.
pub fn zero_augmentation_property(k_from: usize, k_to: usize) -> bool {
    if k_to < k_from {
        return false;
    }
    FamilyTemplate::all()
        .iter()
        .filter(|t| t.min_k <= k_from)
        .all(|t| {
            let (Ok(lo), Ok(hi)) = (instantiate(t, k_from), instantiate(t, k_to)) else {
                return false;
            };
            lo.members.iter().all(|m| {
                let padded = m.with_zeros((k_to - k_from) as u32);
                hi.members.contains(&padded) && is_pinn(&padded)
            })
        })
}

/// One row of the two-nonzero-digit quotient table: for all j, r >= 0,
/// `high 0_(j) low 0_(r) = modulus * (run_(j) last 0_(r))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuotientPattern {
    pub leading: u8,
    pub trailing: u8,
    pub modulus: u32,
    pub run: u8,
    pub last: u8,
}

impl QuotientPattern {
    pub fn quotient(&self, j: usize, r: usize) -> RepBlockForm {
        let mut blocks = Vec::new();
        if j > 0 {
            blocks.push((Digit::new(self.run).expect("digit"), j));
        }
        blocks.push((Digit::new(self.last).expect("digit"), 1));
        if r > 0 {
            blocks.push((Digit::ZERO, r));
        }
        RepBlockForm::new(blocks).expect("positive repeats")
    }

    pub fn number(&self, j: usize, r: usize) -> RepBlockForm {
        let mut blocks = vec![(Digit::new(self.leading).expect("digit"), 1)];
        if j > 0 {
            blocks.push((Digit::ZERO, j));
        }
        blocks.push((Digit::new(self.trailing).expect("digit"), 1));
        if r > 0 {
            blocks.push((Digit::ZERO, r));
        }
        RepBlockForm::new(blocks).expect("positive repeats")
    }
}

/// Quotients for every ordered arrangement of the kb cores.
pub const KB_QUOTIENTS: [QuotientPattern; 14] = {
    const fn q(leading: u8, trailing: u8, modulus: u32, run: u8, last: u8) -> QuotientPattern {
        QuotientPattern {
            leading,
            trailing,
            modulus,
            run,
            last,
        }
    }
    [
        q(1, 2, 3, 3, 4),
        q(2, 1, 3, 6, 7),
        q(1, 8, 9, 1, 2),
        q(8, 1, 9, 8, 9),
        q(2, 4, 6, 3, 4),
        q(4, 2, 6, 6, 7),
        q(2, 7, 9, 2, 3),
        q(7, 2, 9, 7, 8),
        q(3, 6, 9, 3, 4),
        q(6, 3, 9, 6, 7),
        q(4, 5, 9, 4, 5),
        q(5, 4, 9, 5, 6),
        q(4, 8, 12, 3, 4),
        q(8, 4, 12, 6, 7),
    ]
};

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(s: &str) -> DigitMultiset {
        s.parse().unwrap()
    }

    #[test]
    fn template_shapes() {
        let counts: Vec<usize> = FamilyTemplate::all()
            .iter()
            .map(|t| t.base_patterns.len())
            .collect();
        assert_eq!(counts, [9, 7, 9, 8, 12, 13, 9, 7, 4, 9]);
        let mins: Vec<usize> = FamilyTemplate::all().iter().map(|t| t.min_k).collect();
        assert_eq!(mins, [2, 3, 4, 4, 5, 6, 7, 8, 9, 10]);
    }

    #[test]
    fn instantiate_examples() {
        let ka = instantiate(&FamilyTemplate::get(FamilyId::Ka), 12).unwrap();
        assert_eq!(ka.members.len(), 9);
        for (a, m) in (1..=9u8).zip(&ka.members) {
            assert_eq!(*m, DigitMultiset::repdigit(a, 1).unwrap().with_zeros(11));
        }
        let kj = instantiate(&FamilyTemplate::get(FamilyId::Kj), 10).unwrap();
        for (a, m) in (1..=9u8).zip(&kj.members) {
            assert_eq!(*m, DigitMultiset::repdigit(a, 9).unwrap().with_zeros(1));
        }
        assert_eq!(kj.patterns[0].to_string(), "1_(9)0");
        let kb = instantiate(&FamilyTemplate::get(FamilyId::Kb), 10).unwrap();
        assert_eq!(kb.members.len(), 7);
        assert!(kb.members.contains(&ms("12").with_zeros(8)));
        assert_eq!(kb.patterns[0].to_string(), "120_(8)");
        for t in FamilyTemplate::all() {
            for k in t.min_k..t.min_k + 5 {
                let inst = instantiate(&t, k).unwrap();
                assert!(inst.members.iter().all(|m| m.len() == k));
                assert!(inst.patterns.iter().all(|p| p.len() == k));
            }
        }
    }

    #[test]
    fn instantiate_below_min() {
        assert_eq!(
            instantiate(&FamilyTemplate::get(FamilyId::Kj), 9),
            Err(FamilyError::KTooSmall {
                family: "kj".into(),
                k: 9,
                min_k: 10
            })
        );
    }

    #[test]
    fn verify_examples() {
        let ka = instantiate(&FamilyTemplate::get(FamilyId::Ka), 15).unwrap();
        let v = verify_family(&ka, 1_000_000);
        assert_eq!(v.len(), 9);
        assert!(v.iter().all(|m| m.verdict && m.bruteforce == Some(true)));

        let kb = instantiate(&FamilyTemplate::get(FamilyId::Kb), 12).unwrap();
        let v = verify_family(&kb, 1_000_000);
        assert!(v.iter().all(|m| m.verdict));
        let sums: Vec<u64> = v.iter().map(|m| m.digit_sum).collect();
        assert_eq!(sums, [3, 9, 6, 9, 9, 9, 12]);

        let kj = instantiate(&FamilyTemplate::get(FamilyId::Kj), 11).unwrap();
        assert!(verify_family(&kj, 1_000_000).iter().all(|m| m.verdict));
    }

    #[test]
    fn catalog_shapes() {
        let k3 = catalog(3).unwrap();
        let sizes: Vec<usize> = k3.iter().map(|s| s.len()).collect();
        assert_eq!(sizes, [9, 7, 9, 8]);
        assert_eq!(catalog_multisets(3).unwrap().len(), 33);

        let k6 = catalog(6).unwrap();
        assert_eq!(k6.len(), 7);
        assert_eq!(k6[6].source, InstanceSource::Listed("N67".into()));
        assert_eq!(k6[6].len(), 9);

        let k9 = catalog(9).unwrap();
        let n910 = k9.last().unwrap();
        assert_eq!(n910.source, InstanceSource::Listed("N910".into()));
        for a in 1..=9u8 {
            assert!(n910.members.contains(&DigitMultiset::repdigit(a, 9).unwrap()));
        }
        let n89 = catalog(8).unwrap().into_iter().last().unwrap();
        assert_eq!(n89.len(), 4);

        assert_eq!(catalog(0), Err(FamilyError::CatalogRange(0)));
        assert_eq!(catalog(10), Err(FamilyError::CatalogRange(10)));
    }

    #[test]
    fn catalog_sets_are_disjoint_and_length_exact() {
        for k in 1..=9 {
            let sets = catalog(k).unwrap();
            let total: usize = sets.iter().map(|s| s.len()).sum();
            assert_eq!(total, catalog_multisets(k).unwrap().len(), "k={k}");
            assert!(sets.iter().flat_map(|s| &s.members).all(|m| m.len() == k));
        }
    }

    #[test]
    fn catalog_parse_rejects_wrong_length() {
        let err = parse_catalog("4 X: 900\n").err().unwrap();
        assert!(matches!(err, FamilyError::CatalogData { line: 1, .. }));
        assert!(parse_catalog("4 X 9000\n").is_err());
    }

    #[test]
    fn zero_augmentation_examples() {
        assert!(zero_augmentation_property(10, 11));
        assert!(zero_augmentation_property(12, 14));
        assert!(!zero_augmentation_property(11, 10));
        let rep = DigitMultiset::repdigit(1, 27).unwrap();
        assert!(is_pinn(&rep));
        assert!(!is_pinn(&rep.with_zeros(1)));
    }
}
