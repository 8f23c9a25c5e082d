//! Integer polynomial utilities backing the rational layer: primitive parts,
//! a primitive-PRS gcd, Yun squarefree decomposition, and exact resultants
//! via Bareiss elimination on the Sylvester matrix.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::Rat;
use crate::qx::poly::PolyQ;

/// Ascending coefficients, no trailing zeros, empty = 0.
pub type ZPoly = Vec<BigInt>;

pub fn ztrim(mut p: ZPoly) -> ZPoly {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn zdeg(p: &ZPoly) -> i64 {
    p.len() as i64 - 1
}

pub fn zlc(p: &ZPoly) -> BigInt {
    p.last().cloned().unwrap_or_else(BigInt::zero)
}

pub fn zneg(p: &ZPoly) -> ZPoly {
    p.iter().map(|c| -c).collect()
}

pub fn zmul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    ztrim(out)
}

pub fn zscale(p: &ZPoly, s: &BigInt) -> ZPoly {
    if s.is_zero() {
        return vec![];
    }
    p.iter().map(|c| c * s).collect()
}

pub fn zsub(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    let zero = BigInt::zero();
    for i in 0..n {
        out.push(a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero));
    }
    ztrim(out)
}

pub fn zderiv(p: &ZPoly) -> ZPoly {
    if p.len() <= 1 {
        return vec![];
    }
    ztrim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect(),
    )
}

/// Horner evaluation.
pub fn zeval(p: &ZPoly, x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub fn zcontent(p: &ZPoly) -> BigInt {
    let mut g = BigInt::zero();
    for c in p {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Primitive part with positive leading coefficient, plus the removed factor.
pub fn zprimitive(p: &ZPoly) -> (BigInt, ZPoly) {
    if p.is_empty() {
        return (BigInt::one(), vec![]);
    }
    let mut c = zcontent(p);
    if zlc(p).is_negative() {
        c = -c;
    }
    let q: ZPoly = p.iter().map(|x| x / &c).collect();
    (c, q)
}

/// Exact division; panics if not exact (internal invariant).
pub fn zexact_div(a: &ZPoly, b: &ZPoly) -> ZPoly {
    assert!(!b.is_empty(), "division by zero");
    let mut rem = a.clone();
    if rem.len() < b.len() {
        assert!(rem.is_empty(), "inexact division");
        return vec![];
    }
    let mut quot = vec![BigInt::zero(); rem.len() - b.len() + 1];
    let lc = zlc(b);
    for i in (0..quot.len()).rev() {
        let top = rem[i + b.len() - 1].clone();
        if top.is_zero() {
            continue;
        }
        let (q, r) = top.div_rem(&lc);
        assert!(r.is_zero(), "inexact division");
        for (j, d) in b.iter().enumerate() {
            rem[i + j] -= d * &q;
        }
        quot[i] = q;
    }
    assert!(ztrim(rem).is_empty(), "inexact division remainder");
    ztrim(quot)
}

/// Pseudo-remainder: prem(a, b) with deg a >= deg b >= 0.
fn zpseudo_rem(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let mut r = a.clone();
    let db = zdeg(b);
    let lc = zlc(b);
    while zdeg(&r) >= db && !r.is_empty() {
        let dr = zdeg(&r) as usize;
        let coef = zlc(&r);
        // r = lc(b) * r - coef * x^(dr-db) * b
        let mut new_r = zscale(&r, &lc);
        for (j, c) in b.iter().enumerate() {
            new_r[dr - db as usize + j] -= c * &coef;
        }
        r = ztrim(new_r);
        if zdeg(&r) == dr as i64 {
            unreachable!("pseudo remainder did not reduce degree");
        }
    }
    r
}

/// Primitive gcd with positive leading coefficient.
pub fn zgcd(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let (_, mut a) = zprimitive(&ztrim(a.clone()));
    let (_, mut b) = zprimitive(&ztrim(b.clone()));
    if a.is_empty() {
        return b;
    }
    if b.is_empty() {
        return a;
    }
    if zdeg(&a) < zdeg(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = zpseudo_rem(&a, &b);
        let (_, r) = zprimitive(&r);
        a = b;
        b = r;
        if zdeg(&a) < zdeg(&b) {
            std::mem::swap(&mut a, &mut b);
        }
    }
    a
}

/// Yun squarefree decomposition: returns pairs (squarefree primitive part
/// with positive leading coefficient, multiplicity), multiplicities
/// ascending. Content and sign of the input are dropped.
pub fn zsquarefree_decomposition(f: &ZPoly) -> Vec<(ZPoly, u32)> {
    let (_, f) = zprimitive(&ztrim(f.clone()));
    if zdeg(&f) < 1 {
        return vec![];
    }
    let df = zderiv(&f);
    let g = zgcd(&f, &df);
    if zdeg(&g) == 0 {
        return vec![(f, 1)];
    }
    let mut out = Vec::new();
    // Gauss's lemma keeps every division below exact over Z: each divisor is
    // primitive and divides over Q.
    let mut c = zexact_div(&f, &g);
    let mut d = zsub(&zexact_div(&df, &g), &zderiv(&c));
    let mut i = 1u32;
    while zdeg(&c) >= 1 {
        let a = zgcd(&c, &d);
        if zdeg(&a) >= 1 {
            out.push((a.clone(), i));
        }
        c = zexact_div(&c, &a);
        d = zsub(&zexact_div(&d, &a), &zderiv(&c));
        i += 1;
    }
    out
}

/// PolyQ -> (scale, primitive integer poly): p = scale * P, lc(P) > 0.
pub fn from_polyq(p: &PolyQ) -> (Rat, ZPoly) {
    if p.is_zero() {
        return (Rat::zero(), vec![]);
    }
    // common denominator
    let mut den = BigInt::one();
    for c in p.coeffs() {
        den = den.lcm(c.denom());
    }
    let ints: ZPoly = p
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&den / c.denom()))
        .collect();
    let (cont, prim) = zprimitive(&ztrim(ints));
    (Rat::new(cont, den), prim)
}

pub fn to_polyq(p: &ZPoly) -> PolyQ {
    PolyQ::new(p.iter().map(|c| Rat::from(c.clone())).collect())
}

pub fn zinf_norm(p: &ZPoly) -> BigInt {
    p.iter().map(|c| c.abs()).max().unwrap_or_else(BigInt::zero)
}

/// Resultant of two integer polynomials via Bareiss (fraction-free Gaussian
/// elimination) on the Sylvester matrix. Res of two constants is 1; if either
/// is zero the resultant is 0 (unless the other is a nonzero constant).
pub fn zresultant(f: &ZPoly, g: &ZPoly) -> BigInt {
    let f = ztrim(f.clone());
    let g = ztrim(g.clone());
    let (m, n) = (zdeg(&f), zdeg(&g));
    if m < 0 || n < 0 {
        // Res(f, 0): zero unless the other input is a nonzero constant.
        return if m == 0 || n == 0 { BigInt::one() } else { BigInt::zero() };
    }
    if m == 0 {
        return zlc(&f).pow(n as u32);
    }
    if n == 0 {
        return zlc(&g).pow(m as u32);
    }
    let size = (m + n) as usize;
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    // n rows of f's coefficients (descending), then m rows of g's.
    for row in 0..n as usize {
        for (k, c) in f.iter().rev().enumerate() {
            mat[row][row + k] = c.clone();
        }
    }
    for row in 0..m as usize {
        for (k, c) in g.iter().rev().enumerate() {
            mat[n as usize + row][row + k] = c.clone();
        }
    }
    bareiss_det(mat)
}

fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero(), "Bareiss division not exact");
                m[i][j] = q;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Resultant of two rational polynomials.
pub fn resultant_q(f: &PolyQ, g: &PolyQ) -> Rat {
    if f.is_zero() || g.is_zero() {
        if f.is_constant() && g.is_constant() && !(f.is_zero() && g.is_zero()) {
            return Rat::one();
        }
        return Rat::zero();
    }
    let (sf, fz) = from_polyq(f);
    let (sg, gz) = from_polyq(g);
    let r = zresultant(&fz, &gz);
    // Res(sf*F, sg*G) = sf^deg G * sg^deg F * Res(F, G)
    let pow = |s: &Rat, e: i64| -> Rat {
        let mut acc = Rat::one();
        let mut i = 0;
        while i < e {
            acc *= s;
            i += 1;
        }
        acc
    };
    pow(&sf, g.deg()) * pow(&sg, f.deg()) * Rat::from(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qx::poly::parse_poly;

    fn zp(coeffs: &[i64]) -> ZPoly {
        ztrim(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn gcd_basics() {
        // (x-1)(x+2)^2 and (x+2)(x-3)
        let a = zmul(&zp(&[-1, 1]), &zmul(&zp(&[2, 1]), &zp(&[2, 1])));
        let b = zmul(&zp(&[2, 1]), &zp(&[-3, 1]));
        assert_eq!(zgcd(&a, &b), zp(&[2, 1]));
        assert_eq!(zgcd(&zp(&[]), &zp(&[4, 2])), zp(&[2, 1]));
        // coprime
        assert_eq!(zgcd(&zp(&[1, 1]), &zp(&[1, 0, 1])), zp(&[1]));
    }

    #[test]
    fn squarefree_decomposition() {
        // f = (x-1)^2 (x+3) x^3
        let f = zmul(
            &zmul(&zp(&[-1, 1]), &zp(&[-1, 1])),
            &zmul(&zp(&[3, 1]), &zp(&[0, 0, 0, 1])),
        );
        let dec = zsquarefree_decomposition(&f);
        assert_eq!(dec.len(), 3);
        assert_eq!(dec[0], (zp(&[3, 1]), 1));
        assert_eq!(dec[1], (zp(&[-1, 1]), 2));
        assert_eq!(dec[2], (zp(&[0, 1]), 3));
        // squarefree input
        let g = zp(&[-1, 0, 1]);
        assert_eq!(zsquarefree_decomposition(&g), vec![(g.clone(), 1)]);
    }

    #[test]
    fn resultants() {
        // Res(x^2-1, x-2) = (2)^2 - 1 = 3
        assert_eq!(zresultant(&zp(&[-1, 0, 1]), &zp(&[-2, 1])), BigInt::from(3));
        // Res(x-a, x-b) = b - a -> (x-1, x-3): 3-1 = 2... sign convention:
        // Res(f,g) = lc(f)^deg g * prod g over roots of f: g(1) = 1-3 = -2
        assert_eq!(zresultant(&zp(&[-1, 1]), &zp(&[-3, 1])), BigInt::from(-2));
        // disc-style: Res(x^2+1, 2x) = 4 * (i)(-i)... prod 2x over roots +-i = 4*1 = 4
        assert_eq!(zresultant(&zp(&[1, 0, 1]), &zp(&[0, 2])), BigInt::from(4));
        // swap symmetry: Res(g,f) = (-1)^(mn) Res(f,g)
        assert_eq!(zresultant(&zp(&[0, 2]), &zp(&[1, 0, 1])), BigInt::from(4));
        // common factor -> 0
        assert_eq!(
            zresultant(&zmul(&zp(&[1, 1]), &zp(&[5, 3])), &zp(&[1, 1])),
            BigInt::zero()
        );
        // constants
        assert_eq!(zresultant(&zp(&[7]), &zp(&[1, 2, 1])), BigInt::from(49));
    }

    #[test]
    fn rational_resultant_scaling() {
        let f = parse_poly("1/2*x^2 - 1/2").unwrap(); // (x^2-1)/2
        let g = parse_poly("x - 2").unwrap();
        // Res = (1/2)^1 * Res(x^2-1, x-2) = 3/2
        assert_eq!(resultant_q(&f, &g), crate::arith::rat(3, 2));
    }

    #[test]
    fn primitive_parts() {
        let p = parse_poly("-2*x^2 + 4*x - 6").unwrap();
        let (s, z) = from_polyq(&p);
        assert_eq!(s, crate::arith::rat(-2, 1));
        assert_eq!(z, zp(&[3, -2, 1]));
        let p = parse_poly("1/2*x + 1/3").unwrap();
        let (s, z) = from_polyq(&p);
        assert_eq!(s, crate::arith::rat(1, 6));
        assert_eq!(z, zp(&[2, 3]));
    }
}
