//! Exact rational arithmetic helpers: places of Q, factorization into signed
//! prime powers, square classes, Jacobi symbols, p-adic valuations, and exact
//! squareness tests in each completion Q_v.

pub mod primes;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    let (num, den) = match compact.split_once('/') {
        Some((n, d)) => (n, d),
        None => (compact.as_str(), "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {num:?} in rational {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {den:?} in rational {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(num, den))
}

/// A place of Q: a finite prime or the real place. Ordered with primes
/// ascending and the real place last, which fixes the printing order of
/// ramification sets such as `{2, 113, inf}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PlaceQ {
    Prime(BigUint),
    RealPlace,
}

impl PlaceQ {
    pub fn prime_u64(p: u64) -> PlaceQ {
        PlaceQ::Prime(BigUint::from(p))
    }

    pub fn parse(s: &str) -> Result<PlaceQ> {
        let s = s.trim();
        match s {
            "inf" | "oo" | "infinity" | "real" => Ok(PlaceQ::RealPlace),
            _ => {
                let p: BigUint = s
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad place {s:?} (prime or inf)")))?;
                if !primes::is_prime(&p) {
                    return Err(Error::Parse(format!("{s} is not prime")));
                }
                Ok(PlaceQ::Prime(p))
            }
        }
    }
}

impl Ord for PlaceQ {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (PlaceQ::Prime(a), PlaceQ::Prime(b)) => a.cmp(b),
            (PlaceQ::Prime(_), PlaceQ::RealPlace) => Ordering::Less,
            (PlaceQ::RealPlace, PlaceQ::Prime(_)) => Ordering::Greater,
            (PlaceQ::RealPlace, PlaceQ::RealPlace) => Ordering::Equal,
        }
    }
}

impl PartialOrd for PlaceQ {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PlaceQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceQ::Prime(p) => write!(f, "{p}"),
            PlaceQ::RealPlace => write!(f, "inf"),
        }
    }
}

/// Signed prime-power factorization of a nonzero rational. Exponents are
/// negative on denominator primes; factors are sorted by prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i8,
    pub factors: Vec<(BigUint, i64)>,
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.sign < 0 {
            parts.push("-1".into());
        }
        for (p, e) in &self.factors {
            if *e == 1 {
                parts.push(p.to_string());
            } else {
                parts.push(format!("{p}^{e}"));
            }
        }
        if parts.is_empty() {
            parts.push("1".into());
        }
        write!(f, "{}", parts.join(" * "))
    }
}

/// Factor a nonzero rational into sign and prime powers.
pub fn factor(q: &Rat, budget: u64) -> Result<Factorization> {
    if q.is_zero() {
        return Err(Error::ZeroInput("factor(0)"));
    }
    let sign = if q.is_negative() { -1 } else { 1 };
    let num = q.numer().magnitude();
    let den = q.denom().magnitude();
    let mut map: Vec<(BigUint, i64)> = primes::factor_biguint(num, budget)?
        .into_iter()
        .map(|(p, e)| (p, e as i64))
        .collect();
    for (p, e) in primes::factor_biguint(den, budget)? {
        match map.iter_mut().find(|(q, _)| *q == p) {
            Some(entry) => entry.1 -= e as i64,
            None => map.push((p, -(e as i64))),
        }
    }
    map.retain(|(_, e)| *e != 0);
    map.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(Factorization { sign, factors: map })
}

/// The squarefree integer representing the square class of a nonzero rational:
/// sign times the product of primes with odd exponent. `sf(1/2) = 2`.
pub fn squarefree_part(q: &Rat, budget: u64) -> Result<BigInt> {
    let f = factor(q, budget)?;
    let mut out = BigInt::one();
    for (p, e) in &f.factors {
        if e.rem_euclid(2) == 1 {
            out *= BigInt::from(p.clone());
        }
    }
    if f.sign < 0 {
        out = -out;
    }
    Ok(out)
}

/// Jacobi symbol (a|n) for odd positive n; 0 when gcd(a, n) > 1.
pub fn jacobi(a: &BigInt, n: &BigUint) -> Result<i32> {
    if n.is_even() || n.is_zero() {
        return Err(Error::Diagnostic(format!("jacobi modulus {n} must be odd positive")));
    }
    let mut n = n.clone();
    let reduced = a.mod_floor(&BigInt::from_biguint(Sign::Plus, n.clone()));
    let mut a = reduced.magnitude().clone();
    let mut t = 1i32;
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = (&n % 8u32).to_u32().unwrap();
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u32().unwrap() == 3 && (&n % 4u32).to_u32().unwrap() == 3 {
            t = -t;
        }
        a %= &n;
    }
    Ok(if n.is_one() { t } else { 0 })
}

/// p-adic valuation of a nonzero rational.
pub fn padic_val(q: &Rat, p: &BigUint) -> Result<i64> {
    if q.is_zero() {
        return Err(Error::ZeroInput("padic_val(0)"));
    }
    let count = |n: &BigUint| -> i64 {
        let mut n = n.clone();
        let mut v = 0i64;
        while (&n % p).is_zero() {
            n /= p;
            v += 1;
        }
        v
    };
    Ok(count(q.numer().magnitude()) - count(q.denom().magnitude()))
}

/// The p-free unit part of q as a signed integer `sign * num' * den'`, which
/// lies in the same square class of Z_p^* as q / p^v. Cheap: no factorization.
pub fn unit_part_signed(q: &Rat, p: &BigUint) -> Result<BigInt> {
    if q.is_zero() {
        return Err(Error::ZeroInput("unit_part(0)"));
    }
    let strip = |n: &BigUint| -> BigUint {
        let mut n = n.clone();
        while (&n % p).is_zero() {
            n /= p;
        }
        n
    };
    let num = strip(q.numer().magnitude());
    let den = strip(q.denom().magnitude());
    let mut u = BigInt::from(num * den);
    if q.is_negative() {
        u = -u;
    }
    Ok(u)
}

/// The 2-free unit part of q reduced mod 8, in 1, 3, 5, 7.
pub fn unit_mod8(q: &Rat) -> Result<u32> {
    let two = BigUint::from(2u32);
    let u = unit_part_signed(q, &two)?;
    Ok(u.mod_floor(&BigInt::from(8)).to_u32().unwrap())
}

/// epsilon(u) = (u-1)/2 mod 2 for odd u, from the residue mod 8 (mod 4 suffices).
pub fn eps2(u_mod8: u32) -> u32 {
    match u_mod8 % 4 {
        1 => 0,
        3 => 1,
        _ => unreachable!("odd unit"),
    }
}

/// omega(u) = (u^2-1)/8 mod 2 for odd u, from the residue mod 8.
pub fn omega2(u_mod8: u32) -> u32 {
    match u_mod8 {
        1 | 7 => 0,
        3 | 5 => 1,
        _ => unreachable!("odd unit"),
    }
}

/// Exact squareness of a nonzero rational in the completion Q_v.
pub fn is_square_in_qv(q: &Rat, v: &PlaceQ) -> Result<bool> {
    if q.is_zero() {
        return Err(Error::ZeroInput("is_square_in_qv(0)"));
    }
    match v {
        PlaceQ::RealPlace => Ok(q.is_positive()),
        PlaceQ::Prime(p) if p.to_u32() == Some(2) => {
            Ok(padic_val(q, p)?.rem_euclid(2) == 0 && unit_mod8(q)? == 1)
        }
        PlaceQ::Prime(p) => {
            if padic_val(q, p)?.rem_euclid(2) != 0 {
                return Ok(false);
            }
            let u = unit_part_signed(q, p)?;
            Ok(jacobi(&u, p)? == 1)
        }
    }
}

/// Exact squareness in Q itself, with the witness square root.
pub fn sqrt_rat(q: &Rat) -> Option<Rat> {
    if q.is_zero() {
        return Some(Rat::zero());
    }
    if q.is_negative() {
        return None;
    }
    let ns = q.numer().magnitude().sqrt();
    let ds = q.denom().magnitude().sqrt();
    if &(&ns * &ns) == q.numer().magnitude() && &(&ds * &ds) == q.denom().magnitude() {
        Some(Rat::new(BigInt::from(ns), BigInt::from(ds)))
    } else {
        None
    }
}

pub fn is_square_rat(q: &Rat) -> bool {
    sqrt_rat(q).is_some()
}

/// Multiply square classes of nonzero rationals (just the product; callers
/// reduce with `squarefree_part` when a canonical representative is needed).
pub fn square_class_mul(a: &Rat, b: &Rat) -> Rat {
    a * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_examples() {
        let f = factor(&rat(-18, 5), 1000).unwrap();
        assert_eq!(f.sign, -1);
        assert_eq!(
            f.factors,
            vec![
                (BigUint::from(2u32), 1),
                (BigUint::from(3u32), 2),
                (BigUint::from(5u32), -1)
            ]
        );
        let f = factor(&rat_int(1), 1000).unwrap();
        assert_eq!(f.sign, 1);
        assert!(f.factors.is_empty());
        assert_eq!(f.to_string(), "1");
        assert_eq!(factor(&rat(-18, 5), 1000).unwrap().to_string(), "-1 * 2 * 3^2 * 5^-1");
    }

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_part(&rat(-18, 5), 1000).unwrap(), BigInt::from(-10));
        assert_eq!(squarefree_part(&rat(1, 2), 1000).unwrap(), BigInt::from(2));
        assert_eq!(squarefree_part(&rat(49, 4), 1000).unwrap(), BigInt::from(1));
        assert_eq!(squarefree_part(&rat_int(452), 1000).unwrap(), BigInt::from(113));
    }

    #[test]
    fn jacobi_matches_euler_for_primes() {
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23] {
            let pb = BigUint::from(p);
            for a in 1..p {
                let euler = {
                    // a^((p-1)/2) mod p in {1, p-1}
                    let e = BigUint::from(a).modpow(&BigUint::from((p - 1) / 2), &pb);
                    if e.is_one() {
                        1
                    } else {
                        -1
                    }
                };
                assert_eq!(jacobi(&BigInt::from(a), &pb).unwrap(), euler, "({a}|{p})");
            }
        }
        // Composite modulus multiplicativity: (2|15) = (2|3)(2|5) = (-1)(-1) = 1.
        assert_eq!(jacobi(&BigInt::from(2), &BigUint::from(15u32)).unwrap(), 1);
        assert_eq!(jacobi(&BigInt::from(3), &BigUint::from(15u32)).unwrap(), 0);
    }

    #[test]
    fn valuations_and_units() {
        let q = rat(-24, 25);
        assert_eq!(padic_val(&q, &BigUint::from(2u32)).unwrap(), 3);
        assert_eq!(padic_val(&q, &BigUint::from(5u32)).unwrap(), -2);
        assert_eq!(padic_val(&q, &BigUint::from(7u32)).unwrap(), 0);
        assert_eq!(unit_mod8(&rat(7, 1)).unwrap(), 7);
        assert_eq!(unit_mod8(&rat(-1, 1)).unwrap(), 7);
        assert_eq!(unit_mod8(&rat(5, 3)).unwrap(), 7); // 5*3 = 15 = 7 mod 8
        assert_eq!(eps2(1), 0);
        assert_eq!(eps2(5), 0);
        assert_eq!(eps2(3), 1);
        assert_eq!(eps2(7), 1);
        assert_eq!(omega2(1), 0);
        assert_eq!(omega2(7), 0);
        assert_eq!(omega2(3), 1);
        assert_eq!(omega2(5), 1);
    }

    #[test]
    fn square_tests_at_places() {
        let real = PlaceQ::RealPlace;
        let p2 = PlaceQ::prime_u64(2);
        let p3 = PlaceQ::prime_u64(3);
        let p5 = PlaceQ::prime_u64(5);
        assert!(is_square_in_qv(&rat(4, 9), &real).unwrap());
        assert!(!is_square_in_qv(&rat(-4, 9), &real).unwrap());
        assert!(is_square_in_qv(&rat_int(17), &p2).unwrap()); // 17 = 1 mod 8
        assert!(!is_square_in_qv(&rat_int(5), &p2).unwrap());
        assert!(!is_square_in_qv(&rat_int(2), &p2).unwrap());
        assert!(is_square_in_qv(&rat_int(4), &p2).unwrap());
        assert!(is_square_in_qv(&rat_int(-7), &p2).unwrap()); // -7 = 1 mod 8
        assert!(is_square_in_qv(&rat_int(9), &p3).unwrap());
        assert!(!is_square_in_qv(&rat_int(3), &p3).unwrap());
        assert!(is_square_in_qv(&rat(1, 9), &p3).unwrap());
        assert!(!is_square_in_qv(&rat_int(2), &p5).unwrap());
        assert!(is_square_in_qv(&rat_int(-1), &p5).unwrap()); // -1 = 4 mod 5 square
        assert!(is_square_in_qv(&rat_int(6), &p5).unwrap()); // 6 = 1 mod 5
    }

    #[test]
    fn place_order_and_display() {
        let mut v = vec![PlaceQ::RealPlace, PlaceQ::prime_u64(113), PlaceQ::prime_u64(2)];
        v.sort();
        let s: Vec<String> = v.iter().map(|p| p.to_string()).collect();
        assert_eq!(s, vec!["2", "113", "inf"]);
        assert_eq!(PlaceQ::parse("inf").unwrap(), PlaceQ::RealPlace);
        assert_eq!(PlaceQ::parse("7").unwrap(), PlaceQ::prime_u64(7));
        assert!(PlaceQ::parse("6").is_err());
    }

    #[test]
    fn rational_parse_format() {
        assert_eq!(parse_rat("-3/4").unwrap(), rat(-3, 4));
        assert_eq!(parse_rat(" 5 ").unwrap(), rat_int(5));
        assert_eq!(parse_rat("6/4").unwrap(), rat(3, 2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("").is_err());
        assert_eq!(rat(3, 2).to_string(), "3/2");
        assert_eq!(rat(4, 2).to_string(), "2");
        assert_eq!(sqrt_rat(&rat(9, 4)).unwrap(), rat(3, 2));
        assert!(sqrt_rat(&rat(2, 1)).is_none());
    }
}
