//! Arithmetic in a residue field k(P) = Q[x]/(pi), pi monic irreducible,
//! and a decision procedure for squares there.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{sqrt_rat, Rat};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::qx::factor::poly_factor;
use crate::qx::poly::PolyQ;
use crate::qx::zpoly::resultant_q;

/// The residue field at a finite place of Q(x).
///
/// Everything except `inv` (and the things built on it) is well defined for
/// any monic modulus; irreducibility is the caller's responsibility.
#[derive(Clone, Debug)]
pub struct NumField {
    pi: PolyQ,
}

impl NumField {
    pub fn new(pi: PolyQ) -> NumField {
        assert!(
            pi.is_monic() && pi.deg() >= 1,
            "modulus must be monic and nonconstant"
        );
        NumField { pi }
    }

    pub fn modulus(&self) -> &PolyQ {
        &self.pi
    }

    pub fn degree(&self) -> usize {
        self.pi.deg() as usize
    }

    pub fn reduce(&self, a: &PolyQ) -> PolyQ {
        a.rem(&self.pi)
    }

    pub fn mul(&self, a: &PolyQ, b: &PolyQ) -> PolyQ {
        self.reduce(&a.mul(b))
    }

    /// Inverse mod pi by the extended Euclidean algorithm.
    pub fn inv(&self, a: &PolyQ) -> Result<PolyQ> {
        let a = self.reduce(a);
        if a.is_zero() {
            return Err(Error::ZeroInput("inverse of 0 in k(P)"));
        }
        let (g, _, v) = xgcd(&self.pi, &a);
        if !g.is_one() {
            return Err(Error::Diagnostic(format!(
                "modulus {} is not irreducible (gcd with {} is {})",
                self.pi, a, g
            )));
        }
        Ok(self.reduce(&v))
    }

    pub fn div(&self, a: &PolyQ, b: &PolyQ) -> Result<PolyQ> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow_i64(&self, a: &PolyQ, e: i64) -> Result<PolyQ> {
        let (mut sq, mut e) = if e < 0 {
            (self.inv(a)?, e.unsigned_abs())
        } else {
            (self.reduce(a), e as u64)
        };
        let mut acc = PolyQ::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            sq = self.mul(&sq, &sq);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Field norm down to Q.  For monic pi this is Res(pi, a), the product
    /// of a over the embeddings of k(P).
    pub fn norm(&self, a: &PolyQ) -> Rat {
        resultant_q(&self.pi, &self.reduce(a))
    }
}

/// Extended gcd in Q[x]: (g, u, v) with u*a + v*b = g and g monic (or zero).
fn xgcd(a: &PolyQ, b: &PolyQ) -> (PolyQ, PolyQ, PolyQ) {
    let mut r0 = a.clone();
    let mut r1 = b.clone();
    let mut u0 = PolyQ::one();
    let mut u1 = PolyQ::zero();
    let mut v0 = PolyQ::zero();
    let mut v1 = PolyQ::one();
    while !r1.is_zero() {
        let (q, r) = r0.divrem(&r1);
        let u2 = u0.sub(&q.mul(&u1));
        let v2 = v0.sub(&q.mul(&v1));
        r0 = r1;
        r1 = r;
        u0 = u1;
        u1 = u2;
        v0 = v1;
        v1 = v2;
    }
    if r0.is_zero() {
        return (r0, u0, v0);
    }
    let s = r0.lc().recip();
    (r0.scale(&s), u0.scale(&s), v0.scale(&s))
}

fn int_node(j: usize) -> Rat {
    let k = BigInt::from(((j + 1) / 2) as i64);
    Rat::from_integer(if j % 2 == 1 { k } else { -k })
}

/// Interpolate the unique polynomial of degree < pts.len() through pts.
fn lagrange(pts: &[(Rat, Rat)]) -> PolyQ {
    let mut acc = PolyQ::zero();
    for (i, (xi, yi)) in pts.iter().enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut basis = PolyQ::one();
        let mut denom = Rat::one();
        for (j, (xj, _)) in pts.iter().enumerate() {
            if i == j {
                continue;
            }
            basis = basis.mul(&PolyQ::new(vec![-xj.clone(), Rat::one()]));
            denom *= xi.clone() - xj.clone();
        }
        acc = acc.add(&basis.scale(&(yi.clone() / denom)));
    }
    acc
}

/// mu(y + s*x) as a polynomial in y with coefficients in k(P).
/// Coefficients come back reduced, ascending in y.
fn subst_shift(kp: &NumField, mu: &PolyQ, s: i64) -> Vec<PolyQ> {
    let m = mu.deg() as usize;
    let sx = kp.reduce(&PolyQ::new(vec![
        Rat::zero(),
        Rat::from_integer(BigInt::from(s)),
    ]));
    let mut pows = vec![PolyQ::one()];
    for i in 1..=m {
        pows.push(kp.mul(&pows[i - 1], &sx));
    }
    let mut out = vec![PolyQ::zero(); m + 1];
    for i in 0..=m {
        let mi = mu.coeff(i);
        if mi.is_zero() {
            continue;
        }
        let mut binom = BigInt::one();
        for j in 0..=i {
            let c = mi.clone() * Rat::from_integer(binom.clone());
            out[j] = out[j].add(&pows[i - j].scale(&c));
            if j < i {
                binom = binom * BigInt::from((i - j) as i64) / BigInt::from((j + 1) as i64);
            }
        }
    }
    for c in out.iter_mut() {
        *c = kp.reduce(c);
    }
    out
}

/// If gcd(y^2 - r, G) in k(P)[y] is linear, return its root; None otherwise.
/// G is given by its k(P) coefficients ascending in y.
fn quad_gcd_root(kp: &NumField, r: &PolyQ, g: &[PolyQ]) -> Result<Option<PolyQ>> {
    // reduce G modulo y^2 - r by Horner, using y^2 = r
    let mut c0 = PolyQ::zero();
    let mut c1 = PolyQ::zero();
    for gi in g.iter().rev() {
        let nc0 = kp.mul(&c1, r).add(gi);
        c1 = c0;
        c0 = kp.reduce(&nc0);
    }
    if c1.is_zero() {
        // remainder is constant: zero means gcd = y^2 - r itself (not linear),
        // nonzero means gcd = 1
        return Ok(None);
    }
    // remainder c1*y + c0 is linear; it divides y^2 - r iff its root squares to r
    let w = kp.div(&c0, &c1)?.neg();
    if kp.mul(&w, &w) == kp.reduce(r) {
        Ok(Some(w))
    } else {
        Ok(None)
    }
}

/// Decide whether r is a square in k(P) = Q[x]/(pi), returning a witness w
/// with w^2 = r mod pi when it is.
///
/// Linear pi reduces to a rational square test.  Otherwise: pick a shift s
/// with N_s(y) = Res_x(pi, (y - s x)^2 - r) squarefree (computed by
/// evaluation and interpolation), factor N_s over Q, and read a root of
/// y^2 - r off the gcd of each irreducible piece, shifted back.  A linear
/// gcd is a square root; if none of the pieces produce one the quadratic is
/// irreducible over k(P).
pub fn sqrt_in_kp(r: &PolyQ, pi: &PolyQ, cfg: &Config) -> Result<Option<PolyQ>> {
    let kp = NumField::new(pi.clone());
    let r = kp.reduce(r);
    if r.is_zero() {
        return Ok(Some(PolyQ::zero()));
    }
    let d = kp.degree();
    if r.is_constant() {
        if let Some(w) = sqrt_rat(&r.coeff(0)) {
            return Ok(Some(PolyQ::constant(w)));
        }
        if d == 1 {
            return Ok(None);
        }
        // a nonsquare rational can still be a square in the extension
    }
    if d == 1 {
        // the reduction of a nonconstant r mod linear pi is constant
        unreachable!("reduced element has degree < 1");
    }

    let npts = 2 * d + 1;
    let inner_cap = (2 * cfg.poly_degree_cap).max(2 * d);
    for s in 0..=(4 * d * d + 2) {
        let s_rat = Rat::from_integer(BigInt::from(s as i64));
        let mut pts = Vec::with_capacity(npts);
        for j in 0..npts {
            let yj = int_node(j);
            let lin = PolyQ::new(vec![yj.clone(), -s_rat.clone()]);
            let gy = lin.mul(&lin).sub(&r);
            pts.push((yj, resultant_q(pi, &gy)));
        }
        let ns = lagrange(&pts);
        if ns.deg() != 2 * d as i64 {
            return Err(Error::Diagnostic(format!(
                "norm polynomial has degree {}, expected {}",
                ns.deg(),
                2 * d
            )));
        }
        if ns.gcd(&ns.derivative()).deg() != 0 {
            continue;
        }
        let (_, facs) = poly_factor(&ns, inner_cap)?;
        for (mu, _) in &facs {
            let g = subst_shift(&kp, mu, s as i64);
            if let Some(w) = quad_gcd_root(&kp, &r, &g)? {
                return Ok(Some(w));
            }
        }
        return Ok(None);
    }
    Err(Error::Diagnostic(
        "no squarefree shift found in norm descent".into(),
    ))
}

/// Convenience wrapper when only the yes/no answer matters.
pub fn is_square_in_kp(r: &PolyQ, pi: &PolyQ, cfg: &Config) -> Result<bool> {
    Ok(sqrt_in_kp(r, pi, cfg)?.is_some())
}
