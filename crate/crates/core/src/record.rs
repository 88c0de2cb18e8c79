use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::digits::DigitMultiset;
use crate::error::PermError;
use crate::perm::{
    is_pinn_bruteforce, is_pinn_criterion, BruteForceVerdict, CriterionProof, ExhaustiveProof,
    FailureWitness, SwapFailure,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PinnProof {
    Criterion(CriterionProof),
    Exhaustive(ExhaustiveProof),
}

/// A verified permutation-invariant Niven number, identified by its
/// digit multiset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PinnRecord {
    pub multiset: DigitMultiset,
    pub canonical: String,
    pub digit_sum: u64,
    #[serde(with = "biguint_serde")]
    pub orbit_size: BigUint,
    pub proof: PinnProof,
}

/// Why a multiset is not a PINN.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Refutation {
    /// A concrete arrangement that is not Niven.
    Arrangement(FailureWitness),
    /// All arrangements share a residue, but it is nonzero.
    BaseResidue { digit_sum: u64, residue: u64 },
    /// Two arrangements differ by a non-multiple of the digit sum.
    Swap(SwapFailure),
}

impl PinnRecord {
    fn build(multiset: DigitMultiset, proof: PinnProof) -> Self {
        PinnRecord {
            canonical: multiset.canonical().to_string(),
            digit_sum: multiset.digit_sum(),
            orbit_size: multiset.orbit_size(),
            multiset,
            proof,
        }
    }

    /// Certifies with the transposition criterion.
    pub fn certify_criterion(multiset: &DigitMultiset) -> Result<Self, Refutation> {
        let v = is_pinn_criterion(multiset);
        if v.holds {
            return Ok(PinnRecord::build(*multiset, PinnProof::Criterion(v.proof)));
        }
        match v.swap_failure {
            Some(f) => Err(Refutation::Swap(f)),
            None => Err(Refutation::BaseResidue {
                digit_sum: multiset.digit_sum(),
                residue: v.proof.base_residue,
            }),
        }
    }

    /// Certifies by visiting every arrangement; errors if over budget.
    pub fn certify_exhaustive(
        multiset: &DigitMultiset,
        budget: u64,
    ) -> Result<Result<Self, Refutation>, PermError> {
        Ok(match is_pinn_bruteforce(multiset, budget)? {
            BruteForceVerdict::Pinn(p) => {
                Ok(PinnRecord::build(*multiset, PinnProof::Exhaustive(p)))
            }
            BruteForceVerdict::NotPinn(w) => Err(Refutation::Arrangement(w)),
        })
    }

    /// Exhaustive when the orbit fits the budget, criterion otherwise.
    pub fn certify(multiset: &DigitMultiset, budget: u64) -> Result<Self, Refutation> {
        match PinnRecord::certify_exhaustive(multiset, budget) {
            Ok(r) => r,
            Err(_) => PinnRecord::certify_criterion(multiset),
        }
    }

    pub fn len(&self) -> usize {
        self.multiset.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub(crate) mod biguint_serde {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) mod biguint_vec_serde {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_str_radix(10)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_fields() {
        let m: DigitMultiset = "2448".parse().unwrap();
        let r = PinnRecord::certify(&m, 1_000).unwrap();
        assert_eq!(r.canonical, "8442");
        assert_eq!(r.digit_sum, 18);
        assert_eq!(r.orbit_size, BigUint::from(12u32));
        match &r.proof {
            PinnProof::Exhaustive(p) => assert_eq!(p.quotients.len(), 12),
            p => panic!("{p:?}"),
        }
        // over budget falls back to the criterion
        let r = PinnRecord::certify(&m, 5).unwrap();
        assert!(matches!(r.proof, PinnProof::Criterion(_)));
    }

    #[test]
    fn refutations() {
        let m: DigitMultiset = "13".parse().unwrap();
        assert!(matches!(
            PinnRecord::certify(&m, 100),
            Err(Refutation::Arrangement(_))
        ));
        assert!(matches!(
            PinnRecord::certify_criterion(&m),
            Err(Refutation::Swap(_))
        ));
        let m: DigitMultiset = "11".parse().unwrap();
        assert_eq!(
            PinnRecord::certify_criterion(&m),
            Err(Refutation::BaseResidue {
                digit_sum: 2,
                residue: 1
            })
        );
    }

    #[test]
    fn json_round_trip() {
        let m: DigitMultiset = "1_(5)4".parse().unwrap();
        for r in [
            PinnRecord::certify(&m, 100).unwrap(),
            PinnRecord::certify_criterion(&m).unwrap(),
        ] {
            let json = serde_json::to_string(&r).unwrap();
            let back: PinnRecord = serde_json::from_str(&json).unwrap();
            assert_eq!(back, r);
        }
    }
}
