use num_bigint::BigUint;
use num_traits::ToPrimitive;
use pinn_core::perm::{is_pinn_bruteforce_count, DEFAULT_ORBIT_BUDGET};
use pinn_core::repdigit::{modpow10, modpow10_factored, repdigit_niven_check, FactoredK};
use pinn_core::{
    is_niven, is_pinn, is_pinn_criterion, orbit, Digit, DigitMultiset, DigitString, RepBlockForm,
};
use proptest::prelude::*;

fn digit_vec(max_len: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..=9, 1..=max_len)
}

fn nonzero_vec(max_len: usize) -> impl Strategy<Value = Vec<u8>> {
    digit_vec(max_len).prop_filter("not all zero", |v| v.iter().any(|&d| d != 0))
}

fn multiset(max_len: usize) -> impl Strategy<Value = DigitMultiset> {
    nonzero_vec(max_len).prop_map(|v| DigitMultiset::from_digits(v).unwrap())
}

proptest! {
    #[test]
    fn value_mod_matches_biguint(v in digit_vec(60), m in 1u64..1_000_000) {
        let s = DigitString::from_values(&v).unwrap();
        let expected = (s.to_biguint() % m).to_u64().unwrap();
        prop_assert_eq!(s.value_mod(m).unwrap(), expected);
        prop_assert_eq!(s.compress().value_mod(m).unwrap(), expected);
    }

    #[test]
    fn normalize_keeps_value(v in nonzero_vec(30)) {
        let s = DigitString::from_values(&v).unwrap();
        let n = s.normalize().unwrap();
        prop_assert_eq!(n.to_biguint(), s.to_biguint());
        prop_assert!(n.digits()[0].value() != 0);
        prop_assert_eq!(n.digit_sum(), s.digit_sum());
    }

    #[test]
    fn digit_sum_permutation_invariant(v in nonzero_vec(20), seed in any::<u64>()) {
        let s = DigitString::from_values(&v).unwrap();
        let mut w = v.clone();
        let len = w.len();
        let mut x = seed;
        for i in (1..len).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            w.swap(i, (x >> 33) as usize % (i + 1));
        }
        let t = DigitString::from_values(&w).unwrap();
        prop_assert_eq!(s.digit_sum(), t.digit_sum());
        prop_assert_eq!(s.multiset().unwrap(), t.multiset().unwrap());
    }

    #[test]
    fn rep_block_round_trip(v in digit_vec(40)) {
        let s = DigitString::from_values(&v).unwrap();
        let r = s.compress();
        prop_assert_eq!(r.expand(), s.clone());
        let reparsed: RepBlockForm = r.to_string().parse().unwrap();
        prop_assert_eq!(reparsed.expand(), s);
    }

    #[test]
    fn multiset_string_round_trip(m in multiset(30)) {
        let text = m.canonical().to_string();
        let back = DigitString::parse(&text).unwrap().multiset().unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn criterion_agrees_with_enumeration_small(m in multiset(6)) {
        let brute = is_pinn_bruteforce_count(&m, DEFAULT_ORBIT_BUDGET).unwrap().holds();
        prop_assert_eq!(is_pinn_criterion(&m).holds, brute);
        prop_assert_eq!(is_pinn(&m), brute);
    }

    #[test]
    fn criterion_agrees_with_enumeration_medium(v in prop::collection::vec(0u8..=9, 7..=8)
        .prop_filter("not all zero", |v| v.iter().any(|&d| d != 0)))
    {
        let m = DigitMultiset::from_digits(v).unwrap();
        let brute = is_pinn_bruteforce_count(&m, DEFAULT_ORBIT_BUDGET).unwrap().holds();
        prop_assert_eq!(is_pinn_criterion(&m).holds, brute);
        prop_assert_eq!(is_pinn(&m), brute);
    }

    #[test]
    fn orbit_count_is_multinomial(m in multiset(8)) {
        let n = orbit(&m).count() as u64;
        prop_assert_eq!(BigUint::from(n), m.orbit_size());
        prop_assert_eq!(Some(n), m.orbit_size_u64());
    }

    #[test]
    fn orbit_members_are_distinct_rearrangements(m in multiset(6)) {
        let all: Vec<DigitString> = orbit(&m).collect();
        let mut sorted = all.clone();
        sorted.sort_by_key(|s| s.values().collect::<Vec<_>>());
        sorted.dedup();
        prop_assert_eq!(sorted.len(), all.len());
        for s in &all {
            prop_assert_eq!(s.multiset().unwrap(), m);
        }
    }

    #[test]
    fn niven_orbit_consistency(m in multiset(5)) {
        let every = orbit(&m).all(|s| is_niven(&s));
        prop_assert_eq!(every, is_pinn(&m));
    }

    #[test]
    fn modpow_factored_matches_plain(k in 1u64..200_000, m in 2u64..10_000_000) {
        let fk = FactoredK::from(k);
        prop_assert_eq!(fk.value(), BigUint::from(k));
        prop_assert_eq!(
            modpow10_factored(&fk, &BigUint::from(m)).unwrap(),
            modpow10(&BigUint::from(k), &BigUint::from(m)).unwrap()
        );
    }

    #[test]
    fn strict_implies_exact(k in 1u64..5000, a in 1u8..=9) {
        let c = repdigit_niven_check(Digit::new(a).unwrap(), &FactoredK::from(k));
        prop_assert!(!c.strict || c.exact);
    }
}

#[test]
fn exact_condition_matches_repdigit_niven() {
    for k in 1..=10_000usize {
        let fk = FactoredK::from(k as u64);
        for a in 1..=9u8 {
            let check = repdigit_niven_check(Digit::new(a).unwrap(), &fk);
            let literal = RepBlockForm::new([(Digit::new(a).unwrap(), k)]).unwrap().expand();
            assert_eq!(check.exact, is_niven(&literal), "a = {a}, k = {k}");
        }
    }
}
