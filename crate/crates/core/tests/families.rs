use num_bigint::BigUint;
use pinn_core::families::{
    catalog, instantiate, verify_family, zero_augmentation_property, FamilyTemplate,
    KB_QUOTIENTS,
};
use pinn_core::perm::DEFAULT_ORBIT_BUDGET;
use pinn_core::{is_pinn, DigitString, FamilyId};

#[test]
fn families_hold_for_ten_to_sixteen() {
    for t in FamilyTemplate::all() {
        for k in 10..=16 {
            let inst = instantiate(&t, k).unwrap();
            for v in verify_family(&inst, DEFAULT_ORBIT_BUDGET) {
                assert!(v.verdict, "{} k = {k}: {}", t.id, v.pattern);
                assert_ne!(v.bruteforce, Some(false), "{} k = {k}: {}", t.id, v.pattern);
            }
        }
    }
}

#[test]
fn small_family_orbits_are_enumerated() {
    let inst = instantiate(&FamilyTemplate::get(FamilyId::Kb), 12).unwrap();
    let verdicts = verify_family(&inst, DEFAULT_ORBIT_BUDGET);
    assert!(verdicts.iter().all(|v| v.bruteforce == Some(true)));
    let inst = instantiate(&FamilyTemplate::get(FamilyId::Kg), 16).unwrap();
    let verdicts = verify_family(&inst, 1000);
    assert!(verdicts.iter().all(|v| v.verdict && v.bruteforce.is_none()));
}

#[test]
fn catalog_sets_are_families_or_zero_free() {
    for k in 3..=9 {
        for set in catalog(k).unwrap() {
            let is_family = FamilyTemplate::all().into_iter().any(|t| {
                instantiate(&t, k).map(|i| i.members == set.members).unwrap_or(false)
            });
            let zero_free = set.members.iter().all(|m| !m.has_zero());
            assert!(is_family || zero_free, "{}", set.source);
        }
    }
}

#[test]
fn zero_augmentation_between_lengths() {
    for k in 2..=15 {
        assert!(zero_augmentation_property(k, k + 1), "k = {k}");
    }
    assert!(zero_augmentation_property(10, 16));
}

#[test]
fn kb_quotient_table() {
    for q in KB_QUOTIENTS {
        for j in 0..8 {
            for r in 0..4 {
                let n = q.number(j, r).expand().to_biguint();
                let quot = q.quotient(j, r).expand().to_biguint();
                assert_eq!(n, quot * BigUint::from(q.modulus), "{q:?} j = {j} r = {r}");
            }
        }
    }
}

#[test]
fn printed_kb_quotient_holds_only_without_gap() {
    // 2 0_(j) 4 0 against 6 * 2_(j) 4 0
    for j in 0..8 {
        let n = DigitString::parse(&format!("2{}40", "0".repeat(j))).unwrap().to_biguint();
        let q = DigitString::parse(&format!("{}40", "2".repeat(j))).unwrap().to_biguint();
        assert_eq!(n == q * 6u32, j == 0, "j = {j}");
    }
}

#[test]
fn family_members_are_pinn_at_minimum_length() {
    for t in FamilyTemplate::all() {
        let inst = instantiate(&t, t.min_k).unwrap();
        assert!(inst.members.iter().all(is_pinn), "{}", t.id);
    }
}
