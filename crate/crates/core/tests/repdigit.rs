use std::time::Duration;

use num_bigint::BigUint;
use pinn_core::arith::{factorize, multiplicative_order, probable_prime};
use pinn_core::repdigit::{
    repdigit_niven_check, sweep_exact_solutions, verify_conjecture_grid, zero_insertion_probe,
    ConjectureConstraints, FactoredK, GridBounds, TupleKind, CONJECTURE_PRIMES, DEFAULT_BIT_CAP,
    PRINTED_M32,
};
use pinn_core::Digit;

const BUDGET: Duration = Duration::from_secs(5);

fn big(s: &str) -> BigUint {
    s.parse().unwrap()
}

#[test]
fn named_primes_are_prime_with_expected_orders() {
    let orders = [3u32, 9, 27, 27, 81, 81, 81, 81, 81];
    for (p, ord) in CONJECTURE_PRIMES.iter().zip(orders) {
        let v = big(p.value);
        assert!(probable_prime(&v).is_prime(), "{}", p.name);
        assert_eq!(multiplicative_order(&v, BUDGET).unwrap(), BigUint::from(ord), "{}", p.name);
        assert_eq!(3u32.pow(p.min_n), ord, "{}", p.name);
    }
}

#[test]
fn ten_to_81_minus_one_is_product_of_named_primes() {
    let n = BigUint::from(10u32).pow(81) - 1u32;
    let product = CONJECTURE_PRIMES
        .iter()
        .fold(BigUint::from(729u32), |acc, p| acc * big(p.value));
    assert_eq!(n, product);
}

#[test]
fn small_part_of_ten_to_27_minus_one_factors() {
    let n = BigUint::from(10u32).pow(27) - 1u32;
    let f = factorize(&n, BUDGET).unwrap();
    let expected = [("3", 5), ("37", 1), ("757", 1), ("333667", 1), ("440334654777631", 1)];
    let expected: Vec<(BigUint, u32)> = expected.iter().map(|&(p, e)| (big(p), e)).collect();
    assert_eq!(f.into_iter().collect::<Vec<_>>(), expected);
}

#[test]
fn printed_m32_is_composite_and_breaks_the_grid() {
    let m = BigUint::from(PRINTED_M32);
    assert!(!probable_prime(&m).is_prime());
    assert_eq!(multiplicative_order(&m, BUDGET).unwrap(), BigUint::from(522u32));
    let k = FactoredK::new([(big("3"), 4), (m, 1)]);
    assert!(!repdigit_niven_check(Digit::new(1).unwrap(), &k).exact);
}

#[test]
fn grid_up_to_first_powers() {
    let report = verify_conjecture_grid(&GridBounds::uniform(7, 1), DEFAULT_BIT_CAP, false);
    assert!(report.all_pass(), "{:?}", report.failures().next());
    let admissible = report
        .entries
        .iter()
        .filter(|e| e.kind == TupleKind::Admissible)
        .count();
    assert!(admissible > 2000);
}

#[test]
fn grid_orders_divide_k() {
    let mut bounds = GridBounds::uniform(6, 1);
    bounds.max_exp[2..].fill(0);
    let report = verify_conjecture_grid(&bounds, DEFAULT_BIT_CAP, true);
    assert!(report.all_pass());
    for e in &report.entries {
        assert_eq!(e.order_divides_k, Some(e.exact), "{}", e.tuple);
    }
}

#[test]
fn minimal_violations() {
    for (n, exps) in [
        (0, [1, 0, 0, 0, 0, 0, 0, 0, 0]),
        (1, [0, 1, 0, 0, 0, 0, 0, 0, 0]),
        (2, [0, 0, 1, 0, 0, 0, 0, 0, 0]),
        (3, [0, 0, 0, 0, 0, 0, 0, 0, 1]),
    ] {
        let t = ConjectureConstraints::new(n, exps);
        assert!(!t.satisfies_ladder());
        assert!(!repdigit_niven_check(Digit::new(1).unwrap(), &t.factored()).exact, "{t}");
        let ok = ConjectureConstraints::new(n + 1, exps);
        assert!(repdigit_niven_check(Digit::new(1).unwrap(), &ok.factored()).exact, "{ok}");
    }
}

#[test]
fn exact_solutions_below_hundred_thousand() {
    let sweep = sweep_exact_solutions(100_000);
    let ks: Vec<u64> = sweep.iter().map(|e| e.k).collect();
    assert_eq!(
        ks,
        [
            1, 3, 9, 27, 81, 111, 243, 333, 729, 999, 2187, 2997, 4107, 6561, 8991, 12321, 13203,
            19683, 20439, 26973, 36963, 39609, 59049, 61317, 80919
        ]
    );
    assert!(sweep.iter().all(|e| e.tuple.is_some()));
}

#[test]
fn strict_condition_only_for_ones() {
    // 10^k - 1 is odd, prime to 5 and 7 for odd k, and has exactly 3^(2 + v3(k))
    let exact: Vec<u64> = sweep_exact_solutions(3000).iter().map(|e| e.k).collect();
    for k in exact {
        let fk = FactoredK::from(k);
        for a in 1..=9u8 {
            let c = repdigit_niven_check(Digit::new(a).unwrap(), &fk);
            assert!(c.exact);
            assert_eq!(c.strict, a == 1, "a = {a}, k = {k}");
        }
    }
}

#[test]
fn zero_insertion_residues() {
    let cases = [("1_(27)", 1, 18), ("1_(81)", 1, 72), ("1_(111)", 1, 102)];
    for (base, count, residue) in cases {
        let z = zero_insertion_probe(&base.parse().unwrap(), 1, count).unwrap();
        assert_eq!(z.residue, residue, "{base}");
        assert!(!z.is_niven);
    }
    let z = zero_insertion_probe(&"1_(111)".parse().unwrap(), 1, 2).unwrap();
    assert_eq!((z.original_digit_sum, z.residue), (111, 12));
}

#[test]
fn exact_solutions_give_repdigit_pinns() {
    for e in sweep_exact_solutions(2000) {
        for a in 1..=9u8 {
            let m = pinn_core::DigitMultiset::repdigit(a, e.k as u32).unwrap();
            assert!(pinn_core::is_pinn(&m), "{a}_({})", e.k);
        }
    }
}
