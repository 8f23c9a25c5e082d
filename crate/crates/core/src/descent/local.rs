//! Local solvability of 2-descent equations over the completions of Q.
//!
//! Two equation shapes appear in the descent: the quartic homogeneous space
//! `d w^2 = d^2 u^4 + a d u^2 v^2 + b v^4` of a 2-isogeny, and the pair of
//! quadrics of a full 2-descent.  Over R both reduce to sign analysis.  Over
//! Q_p a primitive point has u or v a unit, so each shape dehomogenizes into
//! two affine charts, and solvability becomes: does an integer polynomial
//! take a value in the square class of Z_p somewhere on a p-adic disc?  That
//! question is decided exactly by subdividing residue classes until each one
//! is settled by a unit-stability or Hensel criterion.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::arith::{jacobi, PlaceQ};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::qx::zpoly::{zderiv, zeval, ZPoly};

/// One place's verdict for one candidate, with a human-readable reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalWitness {
    pub place: PlaceQ,
    pub solvable: bool,
    pub detail: String,
}

fn vp(n: &BigInt, p: &BigUint) -> u32 {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p.clone());
    let mut n = n.clone();
    let mut v = 0u32;
    while (&n % &pb).is_zero() {
        n /= &pb;
        v += 1;
    }
    v
}

fn unit_part(n: &BigInt, p: &BigUint, v: u32) -> BigInt {
    let pb = BigInt::from(p.clone());
    let mut n = n.clone();
    for _ in 0..v {
        n /= &pb;
    }
    n
}

/// Squareness of a nonzero integer in Z_p: even valuation and a square unit
/// part (Legendre symbol 1 for odd p, residue 1 mod 8 for p = 2).
fn is_square_zp(n: &BigInt, p: &BigUint) -> Result<bool> {
    let v = vp(n, p);
    if v % 2 != 0 {
        return Ok(false);
    }
    let u = unit_part(n, p, v);
    if p.to_u32_digits() == [2] {
        let r = ((&u % 8i32) + 8i32) % 8i32;
        Ok(r == BigInt::one())
    } else {
        Ok(jacobi(&u, p)? == 1)
    }
}

fn is_two(p: &BigUint) -> bool {
    *p == BigUint::from(2u32)
}

/// Status of one square-value condition on a residue class c mod p^k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cond {
    /// The value has a constant square class on the class, and it is a square.
    Yes,
    /// Constant square class, not a square: no point of the class satisfies it.
    No,
    /// The polynomial has a root inside the class (exact center zero, or a
    /// Hensel root: v(g) > 2 v(g') and v(g) - v(g') >= k keeps it in the disc).
    Root,
    /// Not yet settled at this depth.
    Open,
}

/// Classify g on the class c mod p^k.  The divided Taylor coefficients of an
/// integer polynomial are integers, so for z = c + p^k t,
/// v(g(z) - g(c)) >= min(v(g'(c)) + k, 2k).  When that bound exceeds
/// v(g(c)) + 1 (+3 for p = 2, where units are square iff 1 mod 8) the
/// valuation and unit square class of g are constant on the whole class.
fn cond_status(g: &ZPoly, dg: &ZPoly, c: &BigInt, k: u32, p: &BigUint) -> Result<Cond> {
    let val = zeval(g, c);
    if val.is_zero() {
        return Ok(Cond::Root);
    }
    let m = vp(&val, p);
    let dval = zeval(dg, c);
    let mp = if dval.is_zero() { None } else { Some(vp(&dval, p)) };
    if let Some(mp) = mp {
        if m > 2 * mp && m - mp >= k {
            return Ok(Cond::Root);
        }
    }
    let taylor = match mp {
        Some(mp) => (mp + k).min(2 * k),
        None => 2 * k,
    };
    let need = m + if is_two(p) { 3 } else { 1 };
    if taylor >= need {
        return Ok(if is_square_zp(&val, p)? { Cond::Yes } else { Cond::No });
    }
    Ok(Cond::Open)
}

/// Decide whether g takes a square value (or 0) on c0 + p^k0 Z_p, returning a
/// witness string for acceptance.  `cap` bounds the subdivision depth k.
///
/// Termination: a chain of undecided classes has v(g(center)) growing with k,
/// so it converges to a root z* of g; once k > v(g'(z*)) the Hensel branch
/// fires.  For the polynomials used here all roots are simple, and
/// v(g'(z*)) is bounded by the valuation of disc(g) * lc(g), which callers
/// fold into `cap` (plus `hensel_cap_extra` slack).  Exceeding the cap is an
/// internal error, never an "unknown" verdict.
fn square_value_search(
    g: &ZPoly,
    p: &BigUint,
    c0: BigInt,
    k0: u32,
    cap: u32,
    tag: &str,
) -> Result<Option<String>> {
    let dg = zderiv(g);
    let pb = BigInt::from(p.clone());
    let mut stack = vec![(c0, k0)];
    while let Some((c, k)) = stack.pop() {
        match cond_status(g, &dg, &c, k, p)? {
            Cond::Yes => {
                return Ok(Some(format!(
                    "{tag}: every z = {c} mod {p}^{k} gives a nonzero square value"
                )));
            }
            Cond::Root => {
                return Ok(Some(format!(
                    "{tag}: the chart polynomial has a root z = {c} mod {p}^{k} (point with w = 0)"
                )));
            }
            Cond::No => {}
            Cond::Open => {
                if k + 1 > cap {
                    return Err(Error::PrecisionCap(format!(
                        "square-value search at p = {p} (depth {} > cap {cap})",
                        k + 1
                    )));
                }
                let step = num_traits::pow::pow(pb.clone(), k as usize);
                let mut j = BigInt::zero();
                while j < pb {
                    stack.push((&c + &j * &step, k + 1));
                    j += 1;
                }
            }
        }
    }
    Ok(None)
}

/// Joint version for a full 2-descent pair: find z in c0 + p^k0 Z_p with both
/// g1(z) and g2(z) squares (or zero) in Z_p.  A class is accepted when both
/// conditions are uniformly square, or when one polynomial has a root inside
/// the class while the other condition holds on all of it.  g1 and g2 never
/// share a root (their resultant is nonzero), so subdividing separates their
/// roots and every class eventually resolves.
fn pair_square_search(
    g1: &ZPoly,
    g2: &ZPoly,
    p: &BigUint,
    c0: BigInt,
    k0: u32,
    cap: u32,
    tag: &str,
) -> Result<Option<String>> {
    let dg1 = zderiv(g1);
    let dg2 = zderiv(g2);
    let pb = BigInt::from(p.clone());
    let mut stack = vec![(c0, k0)];
    while let Some((c, k)) = stack.pop() {
        let s1 = cond_status(g1, &dg1, &c, k, p)?;
        if s1 == Cond::No {
            continue;
        }
        let s2 = cond_status(g2, &dg2, &c, k, p)?;
        if s2 == Cond::No {
            continue;
        }
        match (s1, s2) {
            (Cond::Yes, Cond::Yes) => {
                return Ok(Some(format!(
                    "{tag}: both conditions are squares on z = {c} mod {p}^{k}"
                )));
            }
            (Cond::Root, Cond::Yes) => {
                return Ok(Some(format!(
                    "{tag}: first quadric vanishes at a point of z = {c} mod {p}^{k}, second is a square there"
                )));
            }
            (Cond::Yes, Cond::Root) => {
                return Ok(Some(format!(
                    "{tag}: second quadric vanishes at a point of z = {c} mod {p}^{k}, first is a square there"
                )));
            }
            _ => {
                if k + 1 > cap {
                    return Err(Error::PrecisionCap(format!(
                        "pair square search at p = {p} (depth {} > cap {cap})",
                        k + 1
                    )));
                }
                let step = num_traits::pow::pow(pb.clone(), k as usize);
                let mut j = BigInt::zero();
                while j < pb {
                    stack.push((&c + &j * &step, k + 1));
                    j += 1;
                }
            }
        }
    }
    Ok(None)
}

/// Depth cap for the torsor charts at p.  Both charts of
/// d F = d^3 z^4 + a d^2 z^2 + d b (and its reciprocal) have
/// disc * lc = 16 d^12 b (a^2-4b)^2 * d^3 up to sign, so the valuation of
/// 16 d^13 b (a^2-4b)^2 bounds v_p(g'(root)) at every simple root, which is
/// the depth at which the Hensel branch must fire.
fn torsor_cap(d: &BigInt, a: &BigInt, b: &BigInt, p: &BigUint, cfg: &Config) -> u32 {
    let disc4b = a * a - BigInt::from(4) * b;
    let q = BigInt::from(16) * num_traits::pow::pow(d.clone(), 13) * b * &disc4b * &disc4b;
    vp(&q, p) + cfg.hensel_cap_extra + 3
}

/// Local solvability of d w^2 = d^2 u^4 + a d u^2 v^2 + b v^4 at one place.
pub fn torsor_solvable_at(
    d: &BigInt,
    a: &BigInt,
    b: &BigInt,
    v: &PlaceQ,
    cfg: &Config,
) -> Result<LocalWitness> {
    debug_assert!(!d.is_zero() && !b.is_zero());
    match v {
        PlaceQ::RealPlace => Ok(torsor_real(d, a, b)),
        PlaceQ::Prime(p) => {
            let cap = torsor_cap(d, a, b, p, cfg);
            // Chart A (v a unit, z = u/v): w'^2 = F(z)/d with
            // F = d^2 z^4 + a d z^2 + b; test d*F for squares.
            let d2 = d * d;
            let chart_a: ZPoly = vec![d * b, BigInt::zero(), a * &d2, BigInt::zero(), d * &d2];
            if let Some(detail) =
                square_value_search(&chart_a, p, BigInt::zero(), 0, cap, "chart u/v")?
            {
                return Ok(LocalWitness { place: v.clone(), solvable: true, detail });
            }
            // Chart B (u a unit, s = v/u in pZ_p): reciprocal coefficients.
            let chart_b: ZPoly = vec![d * &d2, BigInt::zero(), a * &d2, BigInt::zero(), d * b];
            if let Some(detail) =
                square_value_search(&chart_b, p, BigInt::zero(), 1, cap, "chart v/u")?
            {
                return Ok(LocalWitness { place: v.clone(), solvable: true, detail });
            }
            Ok(LocalWitness {
                place: v.clone(),
                solvable: false,
                detail: format!(
                    "no residue class of either chart yields a square value of the quartic over Q_{p}"
                ),
            })
        }
    }
}

/// Sign analysis over R.  With t = (u/v)^2 >= 0 the quartic divided by v^4 is
/// q(t) = d^2 t^2 + a d t + b, and a real point exists iff q(t)/d >= 0
/// somewhere on t >= 0 (v = 0 contributes the value d * u^4).
fn torsor_real(d: &BigInt, a: &BigInt, b: &BigInt) -> LocalWitness {
    let (solvable, detail) = if d.is_positive() {
        (true, "d > 0: take u = 1, v = 0, w = sqrt(d)".to_string())
    } else if b.is_negative() {
        (true, "d < 0, b < 0: take u = 0, v = 1, w = sqrt(b/d)".to_string())
    } else {
        // d < 0, b > 0: the minimum of q on t >= 0 is b - a^2/4 at t = -a/(2d)
        // when a >= 0, and q(0) = b > 0 otherwise.
        let disc4b = a * a - BigInt::from(4) * b;
        if !a.is_negative() && !disc4b.is_negative() {
            (
                true,
                "d < 0, b > 0, a >= 0, a^2 >= 4b: the quartic is nonpositive near t = -a/(2d)"
                    .to_string(),
            )
        } else {
            (
                false,
                "d < 0 and the quartic is positive for all real (u, v) != 0".to_string(),
            )
        }
    };
    LocalWitness { place: PlaceQ::RealPlace, solvable, detail }
}

/// Depth cap for the quadric pair at p.  Each quadric is alpha z^2 + gamma;
/// its roots z* have v(2 alpha z*) <= v(4 alpha gamma), and the roots of the
/// two quadrics separate at depth v(alpha1 gamma2 - alpha2 gamma1), so the
/// sum of those three valuations (plus slack) bounds the subdivision depth.
fn pair_cap(g1: &ZPoly, g2: &ZPoly, p: &BigUint, cfg: &Config) -> u32 {
    let four = BigInt::from(4);
    let q1 = &four * &g1[2] * &g1[0];
    let q2 = &four * &g2[2] * &g2[0];
    let res = &g1[2] * &g2[0] - &g2[2] * &g1[0];
    debug_assert!(!res.is_zero(), "the quadrics share a root");
    let extra = if is_two(p) { 2 } else { 0 };
    vp(&q1, p) + vp(&q2, p) + vp(&res, p) + cfg.hensel_cap_extra + extra + 3
}

/// Local solvability of the standard full 2-descent pair of quadrics
///   d1 z1^2 - d2 z2^2 = e2,   d1 z1^2 - d1 d2 z3^2 = e3
/// (roots e1 = 0 < ... normalized so that e2 < e3).  Eliminating z1 = z, the
/// system is solvable iff some z has both d2 (d1 z^2 - e2) and
/// d1 d2 (d1 z^2 - e3) square or zero.
pub fn pair_solvable_at(
    d1: &BigInt,
    d2: &BigInt,
    e2: &BigInt,
    e3: &BigInt,
    v: &PlaceQ,
    cfg: &Config,
) -> Result<LocalWitness> {
    debug_assert!(e2 < e3 && !e2.is_zero() && !e3.is_zero());
    match v {
        PlaceQ::RealPlace => Ok(pair_real(d1, d2, e2, e3)),
        PlaceQ::Prime(p) => {
            let d1d2 = d1 * d2;
            // Chart A: z in Z_p.
            let h1: ZPoly = vec![-(d2 * e2), BigInt::zero(), d1 * d2];
            let h2: ZPoly = vec![-(&d1d2 * e3), BigInt::zero(), d1 * &d1d2];
            let cap = pair_cap(&h1, &h2, p, cfg);
            if let Some(detail) =
                pair_square_search(&h1, &h2, p, BigInt::zero(), 0, cap, "chart z")?
            {
                return Ok(LocalWitness { place: v.clone(), solvable: true, detail });
            }
            // Chart B: z = 1/s with s in pZ_p; multiply through by s^2.
            let g1: ZPoly = vec![d1 * d2, BigInt::zero(), -(d2 * e2)];
            let g2: ZPoly = vec![d1 * &d1d2, BigInt::zero(), -(&d1d2 * e3)];
            let cap = pair_cap(&g1, &g2, p, cfg);
            if let Some(detail) =
                pair_square_search(&g1, &g2, p, BigInt::zero(), 1, cap, "chart 1/z")?
            {
                return Ok(LocalWitness { place: v.clone(), solvable: true, detail });
            }
            Ok(LocalWitness {
                place: v.clone(),
                solvable: false,
                detail: format!("the quadric pair has no common solution over Q_{p}"),
            })
        }
    }
}

/// Over R, T = d1 z^2 sweeps [0, oo) or (-oo, 0] with the sign of d1, and the
/// conditions read (T - e2)/d2 >= 0 and (T - e3)/(d1 d2) >= 0.  With e2 < e3
/// the four sign cases collapse to the table below.
fn pair_real(d1: &BigInt, d2: &BigInt, e2: &BigInt, e3: &BigInt) -> LocalWitness {
    let _ = e3;
    let (solvable, detail) = match (d1.is_positive(), d2.is_positive()) {
        (true, true) => (true, "d1, d2 > 0: large z satisfies both quadrics".to_string()),
        (false, true) => {
            if !e2.is_positive() {
                (true, "d1 < 0 < d2, e2 <= 0: T = e2 satisfies both".to_string())
            } else {
                (false, "d1 < 0 < d2 with e2 > 0: T <= 0 < e2 empty".to_string())
            }
        }
        (true, false) => {
            if !e2.is_negative() {
                (true, "d2 < 0 < d1, e2 >= 0: T in [0, e2] works".to_string())
            } else {
                (false, "d2 < 0 < d1 with e2 < 0: [0, e2] empty".to_string())
            }
        }
        (false, false) => (
            false,
            "d1, d2 < 0: the conditions force e3 <= T <= e2 against e2 < e3".to_string(),
        ),
    };
    LocalWitness { place: PlaceQ::RealPlace, solvable, detail }
}
