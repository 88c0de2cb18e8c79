//! Primality, factorization and multiplicative order on big integers.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::ArithError;

/// Trial division bound used before Pollard rho.
pub const TRIAL_DIVISION_BOUND: u32 = 1_000_000;

/// Per-number wall-clock budget for Pollard rho.
pub const DEFAULT_FACTOR_BUDGET: Duration = Duration::from_secs(5);

/// Miller-Rabin with the first 13 prime bases is deterministic below this.
const MR_DETERMINISTIC_BOUND: u128 = 3_317_044_064_679_887_385_961_981;
const MR_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimalityVerdict {
    Composite,
    /// Proven prime (deterministic Miller-Rabin range).
    Prime,
    /// Passed Baillie-PSW; no known counterexample exists.
    ProbablePrime,
}

impl PrimalityVerdict {
    pub fn is_prime(self) -> bool {
        !matches!(self, PrimalityVerdict::Composite)
    }
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_DIVISION_BOUND as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                let mut j = i * i;
                while j <= n {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        sieve
            .iter()
            .enumerate()
            .filter_map(|(i, &p)| p.then_some(i as u32))
            .collect()
    })
}

fn miller_rabin(n: &BigUint, base: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = base.modpow(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if x == n_minus_1 {
            return true;
        }
        if x == one {
            return false;
        }
    }
    false
}

/// Jacobi symbol (a/n) for odd n > 0.
fn jacobi(a: &BigUint, n: &BigUint) -> i32 {
    let mut a = a % n;
    let mut n = n.clone();
    let mut result = 1;
    let three = BigUint::from(3u32);
    let five = BigUint::from(5u32);
    let eight = BigUint::from(8u32);
    let four = BigUint::from(4u32);
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        a >>= tz;
        let n_mod_8 = &n % &eight;
        if tz % 2 == 1 && (n_mod_8 == three || n_mod_8 == five) {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        if &a % &four == three && &n % &four == three {
            result = -result;
        }
        a %= &n;
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// Strong Lucas probable-prime test with Selfridge parameters.
fn strong_lucas(n: &BigUint) -> bool {
    let r = n.sqrt();
    if &r * &r == *n {
        return false;
    }
    // D = 5, -7, 9, -11, ... with (D/n) = -1
    let mut d_abs: u64 = 5;
    let mut negative = false;
    let d_mod_n = loop {
        let d_big = BigUint::from(d_abs) % n;
        let d_mod = if negative {
            (n - &d_big) % n
        } else {
            d_big
        };
        match jacobi(&d_mod, n) {
            -1 => break d_mod,
            0 if BigUint::from(d_abs) % n != BigUint::zero() => return false,
            _ => {}
        }
        d_abs += 2;
        negative = !negative;
    };
    // P = 1, Q = (1 - D) / 4
    let q_mod_n = {
        let four_inv = mod_inverse(&BigUint::from(4u32), n).expect("n odd");
        let one_minus_d = (BigUint::one() + n - &d_mod_n) % n;
        one_minus_d * four_inv % n
    };
    let half = |x: BigUint| -> BigUint {
        if x.is_odd() {
            (x + n) >> 1
        } else {
            x >> 1
        }
    };

    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let d = &n_plus_1 >> s;

    let mut u = BigUint::one();
    let mut v = BigUint::one();
    let mut qk = q_mod_n.clone();
    let bits = d.bits();
    for i in (0..bits - 1).rev() {
        // double
        u = &u * &v % n;
        v = (&v * &v + n + n - (&qk << 1u32) % n) % n;
        qk = &qk * &qk % n;
        if d.bit(i) {
            let u_next = half((&u + &v) % n);
            let v_next = half((&d_mod_n * &u + &v) % n);
            u = u_next;
            v = v_next;
            qk = &qk * &q_mod_n % n;
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v + n + n - (&qk << 1u32) % n) % n;
        qk = &qk * &qk % n;
        if v.is_zero() {
            return true;
        }
    }
    false
}

fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    use num_bigint::BigInt;
    let a = BigInt::from(a.clone());
    let m_int = BigInt::from(m.clone());
    let e = a.extended_gcd(&m_int);
    if !e.gcd.is_one() {
        return None;
    }
    let x = ((e.x % &m_int) + &m_int) % &m_int;
    x.to_biguint()
}

/// Deterministic Miller-Rabin below 3.3e24, Baillie-PSW above.
pub fn probable_prime(n: &BigUint) -> PrimalityVerdict {
    if *n < BigUint::from(2u32) {
        return PrimalityVerdict::Composite;
    }
    for &p in &small_primes()[..50] {
        if *n == BigUint::from(p) {
            return PrimalityVerdict::Prime;
        }
        if (n % p).is_zero() {
            return PrimalityVerdict::Composite;
        }
    }
    if let Some(small) = n.to_u128() {
        if small < MR_DETERMINISTIC_BOUND {
            let all = MR_BASES
                .iter()
                .all(|&b| miller_rabin(n, &BigUint::from(b)));
            return if all {
                PrimalityVerdict::Prime
            } else {
                PrimalityVerdict::Composite
            };
        }
    }
    if miller_rabin(n, &BigUint::from(2u32)) && strong_lucas(n) {
        PrimalityVerdict::ProbablePrime
    } else {
        PrimalityVerdict::Composite
    }
}

/// Prime factorization as prime -> exponent.
pub type Factorization = BTreeMap<BigUint, u32>;

fn rho_u64(n: u64, deadline: Instant) -> Option<u64> {
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    for c in 1u64.. {
        if Instant::now() > deadline {
            return None;
        }
        let f = |x: u64| (mulmod(x, x) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut ys = 0u64;
        let mut r = 1u64;
        let m = 128u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y));
                }
                g = q.gcd(&n);
                k += m;
            }
            r *= 2;
            if r > 1 << 40 {
                break;
            }
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n && g > 1 {
            return Some(g);
        }
    }
    None
}

fn rho_big(n: &BigUint, deadline: Instant) -> Option<BigUint> {
    let one = BigUint::one();
    let mut c = BigUint::one();
    loop {
        if Instant::now() > deadline {
            return None;
        }
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut g = one.clone();
        let mut q = one.clone();
        let mut ys = y.clone();
        let mut r: u64 = 1;
        let m: u64 = 128;
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = q * diff % n;
                }
                g = q.gcd(n);
                k += m;
                if Instant::now() > deadline {
                    return None;
                }
            }
            r *= 2;
        }
        if g == *n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g > one {
                    break;
                }
            }
        }
        if g != *n && g > one {
            return Some(g);
        }
        c += 1u32;
    }
}

fn split(n: BigUint, deadline: Instant, out: &mut Factorization) -> Result<(), ArithError> {
    if n.is_one() {
        return Ok(());
    }
    if probable_prime(&n).is_prime() {
        *out.entry(n).or_insert(0) += 1;
        return Ok(());
    }
    let factor = match n.to_u64() {
        Some(small) => rho_u64(small, deadline).map(BigUint::from),
        None => rho_big(&n, deadline),
    }
    .ok_or_else(|| ArithError::FactorizationTimeout(n.to_string()))?;
    let other = &n / &factor;
    split(factor, deadline, out)?;
    split(other, deadline, out)
}

/// Trial division to 10^6, then Pollard rho (Brent) within `budget`.
pub fn factorize(n: &BigUint, budget: Duration) -> Result<Factorization, ArithError> {
    let deadline = Instant::now() + budget;
    let mut out = Factorization::new();
    let mut rest = n.clone();
    if rest.is_zero() {
        return Ok(out);
    }
    for &p in small_primes() {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        while (&rest % p).is_zero() {
            rest /= p;
            *out.entry(pb.clone()).or_insert(0) += 1;
        }
    }
    split(rest, deadline, &mut out)?;
    Ok(out)
}

fn factor_cache() -> &'static Mutex<HashMap<BigUint, Factorization>> {
    static CACHE: OnceLock<Mutex<HashMap<BigUint, Factorization>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn factorize_cached(n: &BigUint, budget: Duration) -> Result<Factorization, ArithError> {
    if let Some(f) = factor_cache().lock().expect("cache lock").get(n) {
        return Ok(f.clone());
    }
    let f = factorize(n, budget)?;
    factor_cache()
        .lock()
        .expect("cache lock")
        .insert(n.clone(), f.clone());
    Ok(f)
}

/// Least t >= 1 with 10^t = 1 (mod m), given the factorization of m.
pub fn multiplicative_order_factored(
    m: &BigUint,
    factors: &Factorization,
    budget: Duration,
) -> Result<BigUint, ArithError> {
    if m.is_one() {
        return Ok(BigUint::one());
    }
    if m.is_zero() {
        return Err(ArithError::ModulusTooSmall);
    }
    if !m.gcd(&BigUint::from(10u32)).is_one() {
        return Err(ArithError::NotCoprime(m.to_string()));
    }
    // ord_m = lcm of the orders modulo each prime power, each found by
    // stripping primes from p^(e-1) (p - 1)
    let ten = BigUint::from(10u32);
    let mut order = BigUint::one();
    for (p, &e) in factors {
        let pe = p.pow(e);
        let pm1 = p - 1u32;
        let mut t = &pm1 * p.pow(e - 1);
        let mut support: Vec<BigUint> = factorize_cached(&pm1, budget)?.into_keys().collect();
        if e > 1 {
            support.push(p.clone());
        }
        for q in support {
            while (&t % &q).is_zero() {
                let candidate = &t / &q;
                if ten.modpow(&candidate, &pe).is_one() {
                    t = candidate;
                } else {
                    break;
                }
            }
        }
        order = order.lcm(&t);
    }
    Ok(order)
}

/// Multiplicative order of 10 modulo m.
pub fn multiplicative_order(m: &BigUint, budget: Duration) -> Result<BigUint, ArithError> {
    if m.is_zero() {
        return Err(ArithError::ModulusTooSmall);
    }
    if !m.gcd(&BigUint::from(10u32)).is_one() {
        return Err(ArithError::NotCoprime(m.to_string()));
    }
    let factors = factorize(m, budget)?;
    multiplicative_order_factored(m, &factors, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(s: &str) -> BigUint {
        s.parse().unwrap()
    }

    #[test]
    fn primality_small_range_matches_sieve() {
        let primes: std::collections::HashSet<u32> =
            small_primes().iter().copied().take_while(|&p| p < 20_000).collect();
        for n in 0u32..20_000 {
            let v = probable_prime(&BigUint::from(n));
            assert_eq!(v.is_prime(), primes.contains(&n), "n={n}");
            if v.is_prime() {
                assert_eq!(v, PrimalityVerdict::Prime);
            }
        }
    }

    #[test]
    fn primality_known_values() {
        assert_eq!(probable_prime(&big("37")), PrimalityVerdict::Prime);
        assert_eq!(probable_prime(&big("333667")), PrimalityVerdict::Prime);
        assert_eq!(
            probable_prime(&big("130654897808007778425046117")),
            PrimalityVerdict::ProbablePrime
        );
        // Carmichael numbers and strong pseudoprimes to several bases
        for c in ["561", "3215031751", "3825123056546413051", "318665857834031151167461"] {
            assert_eq!(probable_prime(&big(c)), PrimalityVerdict::Composite, "{c}");
        }
        // 2^89 - 1 is a Mersenne prime above the deterministic bound
        assert_eq!(
            probable_prime(&big("618970019642690137449562111")),
            PrimalityVerdict::ProbablePrime
        );
        // product of two large primes above the bound
        let p = big("1000000000000000000117");
        let q = big("1000000000000000000000007");
        assert_eq!(probable_prime(&(p * q)), PrimalityVerdict::Composite);
    }

    #[test]
    fn strong_lucas_rejects_lucas_pseudoprime_products() {
        // 5459 and 5777 are strong Lucas pseudoprimes but fail base-2 MR;
        // they must be composite overall.
        for c in ["5459", "5777", "10877", "16109", "18971"] {
            assert_eq!(probable_prime(&big(c)), PrimalityVerdict::Composite);
            assert!(strong_lucas(&big(c)), "{c} is a strong Lucas pseudoprime");
        }
    }

    #[test]
    fn factorization() {
        let f = factorize(&big("130654897808007778425046116"), DEFAULT_FACTOR_BUDGET).unwrap();
        let expect: Factorization = [
            ("2", 2),
            ("3", 5),
            ("11311", 1),
            ("55975961", 1),
            ("212303360693", 1),
        ]
        .iter()
        .map(|(p, e)| (big(p), *e))
        .collect();
        assert_eq!(f, expect);
        let f = factorize(&big("9937"), DEFAULT_FACTOR_BUDGET).unwrap();
        assert_eq!(f.keys().cloned().collect::<Vec<_>>(), vec![big("19"), big("523")]);
    }

    #[test]
    fn orders() {
        let ord = |m: &str| multiplicative_order(&big(m), DEFAULT_FACTOR_BUDGET).unwrap();
        assert_eq!(ord("9"), big("1"));
        assert_eq!(ord("37"), big("3"));
        assert_eq!(ord("333667"), big("9"));
        assert_eq!(ord("81"), big("9"));
        assert_eq!(ord("9397"), big("81"));
        assert_eq!(ord("9937"), big("522"));
        assert_eq!(ord("130654897808007778425046117"), big("81"));
        assert_eq!(
            multiplicative_order(&big("12"), DEFAULT_FACTOR_BUDGET),
            Err(ArithError::NotCoprime("12".into()))
        );
    }

    #[test]
    fn orders_match_direct_search() {
        for m in (1u64..3000).filter(|m| m % 2 != 0 && m % 5 != 0) {
            let mut t = 1u64;
            let mut x = 10 % m;
            while x != 1 % m {
                x = x * 10 % m;
                t += 1;
            }
            let got = multiplicative_order(&BigUint::from(m), DEFAULT_FACTOR_BUDGET).unwrap();
            assert_eq!(got, BigUint::from(t), "m={m}");
        }
    }
}
