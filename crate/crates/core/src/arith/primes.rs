//! Integer primality and factorization: deterministic Miller-Rabin on u64,
//! strong-base Miller-Rabin above that, trial division up to the configured
//! budget, and Brent's variant of Pollard rho for the survivors.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic for all u64 (Sinclair/Jaeschke base set).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin with the first 40 prime bases for inputs above u64.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    if n.is_even() {
        return false;
    }
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    const BASES: [u32; 40] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83,
        89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173,
    ];
    'witness: for a in BASES {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn brent_rho_u64(n: u64, seed: u64) -> Option<u64> {
    // Brent's cycle-finding variant; n odd composite, not a prime power of 2.
    let c = seed % (n - 2) + 1;
    let f = |x: u64| (mulmod_u64(x, x, n) + c) % n;
    let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
    let (mut g, mut x, mut ys) = (1u64, 0u64, 0u64);
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0u64;
        while k < r && g == 1 {
            ys = y;
            let lim = 128.min(r - k);
            for _ in 0..lim {
                y = f(y);
                q = mulmod_u64(q, x.abs_diff(y), n);
            }
            g = gcd_u64(q, n);
            k += lim;
        }
        r <<= 1;
        if r > 1 << 24 {
            return None;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd_u64(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    if g == n {
        None
    } else {
        Some(g)
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn brent_rho_big(n: &BigUint, seed: u64, max_iters: u64) -> Option<BigUint> {
    let one = BigUint::one();
    let c = BigUint::from(seed | 1);
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut y = BigUint::from(2u32);
    let (mut r, mut q) = (1u64, BigUint::one());
    let mut g = BigUint::one();
    let (mut x, mut ys) = (BigUint::zero(), BigUint::zero());
    let mut iters = 0u64;
    while g == one {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0u64;
        while k < r && g == one {
            ys = y.clone();
            let lim = 128.min(r - k);
            for _ in 0..lim {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            g = q.gcd(n);
            k += lim;
            iters += lim;
            if iters > max_iters {
                return None;
            }
        }
        r <<= 1;
    }
    if &g == n {
        loop {
            ys = f(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(n);
            if g > one {
                break;
            }
            iters += 1;
            if iters > max_iters {
                return None;
            }
        }
    }
    if &g == n {
        None
    } else {
        Some(g)
    }
}

/// Factor `n >= 1` into prime powers, sorted by prime. Trial division runs up
/// to `budget`; what survives must yield to rho within an effort cap keyed to
/// the same budget, otherwise the call fails rather than guess.
pub fn factor_biguint(n: &BigUint, budget: u64) -> Result<Vec<(BigUint, u32)>> {
    if n.is_zero() {
        return Err(Error::ZeroInput("factor(0)"));
    }
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let mut rest = n.clone();
    for p in [2u64, 3, 5] {
        let pb = BigUint::from(p);
        let mut e = 0u32;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            e += 1;
        }
        if e > 0 {
            out.push((pb, e));
        }
    }
    // 6k +/- 1 wheel up to the trial bound (and not past the square root).
    let mut d = 7u64;
    let mut step = 4u64; // alternates 4, 2 to hit 7, 11, 13, 17, ...
    while d <= budget {
        let db = BigUint::from(d);
        if &db * &db > rest {
            break;
        }
        if (&rest % &db).is_zero() {
            let mut e = 0u32;
            while (&rest % &db).is_zero() {
                rest /= &db;
                e += 1;
            }
            out.push((db, e));
        }
        d += step;
        step = 6 - step;
    }
    if !rest.is_one() {
        let mut stack = vec![rest];
        while let Some(m) = stack.pop() {
            if is_prime(&m) {
                merge_prime(&mut out, m, 1);
                continue;
            }
            // Perfect powers first so rho only sees non-powers.
            if let Some((root, k)) = perfect_power(&m) {
                for _ in 0..k {
                    stack.push(root.clone());
                }
                continue;
            }
            let split = if let Some(small) = m.to_u64() {
                (1u64..40)
                    .find_map(|s| brent_rho_u64(small, s.wrapping_mul(0x9e3779b97f4a7c15)))
                    .map(BigUint::from)
            } else {
                let cap = budget.max(1 << 20);
                (1u64..20).find_map(|s| brent_rho_big(&m, 2 * s + 1, cap))
            };
            match split {
                Some(f) => {
                    let q = &m / &f;
                    stack.push(f);
                    stack.push(q);
                }
                None => {
                    return Err(Error::FactorBudget {
                        n: m.to_string(),
                        budget,
                    })
                }
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    // Merge any duplicate primes produced by independent branches.
    let mut merged: Vec<(BigUint, u32)> = Vec::with_capacity(out.len());
    for (p, e) in out {
        match merged.last_mut() {
            Some(last) if last.0 == p => last.1 += e,
            _ => merged.push((p, e)),
        }
    }
    Ok(merged)
}

fn merge_prime(out: &mut Vec<(BigUint, u32)>, p: BigUint, e: u32) {
    for entry in out.iter_mut() {
        if entry.0 == p {
            entry.1 += e;
            return;
        }
    }
    out.push((p, e));
}

/// If n = r^k with k >= 2, return (r, k) with r not itself a perfect power.
fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    let bits = n.bits();
    for k in (2..=bits.max(2)).rev() {
        let k32 = k as u32;
        let r = n.nth_root(k32);
        if r <= BigUint::one() {
            continue;
        }
        if r.pow(k32) == *n {
            return Some((r, k32));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small() {
        let primes: Vec<u64> = (0..100).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97]
        );
        assert!(is_prime_u64(2_147_483_647)); // 2^31 - 1
        assert!(!is_prime_u64(3_215_031_751)); // strong pseudoprime to 2,3,5,7
        assert!(is_prime(&BigUint::parse_bytes(b"170141183460469231731687303715884105727", 10).unwrap()));
    }

    #[test]
    fn factor_roundtrip() {
        for n in [1u64, 2, 12, 97, 5040, 1_000_003, 999_999_999_989, 600_851_475_143] {
            let nb = BigUint::from(n);
            let f = factor_biguint(&nb, 1_000_000).unwrap();
            let back: BigUint = f
                .iter()
                .map(|(p, e)| p.pow(*e))
                .product();
            assert_eq!(back, nb, "n = {n}");
            for (p, _) in &f {
                assert!(is_prime(p), "claimed prime {p} of {n}");
            }
            for w in f.windows(2) {
                assert!(w[0].0 < w[1].0);
            }
        }
    }

    #[test]
    fn factor_semiprime_beyond_trial_bound() {
        // Both factors exceed the trial bound; rho must find them.
        let p = BigUint::from(1_000_003u64);
        let q = BigUint::from(1_000_033u64);
        let f = factor_biguint(&(&p * &q), 1000).unwrap();
        assert_eq!(f, vec![(p, 1), (q, 1)]);
    }

    #[test]
    fn perfect_powers_unwrapped() {
        let n = BigUint::from(1_000_003u64).pow(3);
        let f = factor_biguint(&n, 1000).unwrap();
        assert_eq!(f, vec![(BigUint::from(1_000_003u64), 3)]);
    }
}
