//! Polynomial factorization over Q: squarefree decomposition (Yun), modular
//! factorization by distinct-degree plus Cantor-Zassenhaus splitting, linear
//! Hensel lifting to above the Landau-Mignotte bound, and subset
//! recombination. Inputs are monicized first so the lift never fights the
//! leading coefficient.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::qx::poly::PolyQ;
use crate::qx::zpoly::{
    self, from_polyq, to_polyq, zdeg, zmul, zprimitive, zsquarefree_decomposition, ztrim, ZPoly,
};

// ---- arithmetic in Fp[x], p a small odd prime ---------------------------

type FpPoly = Vec<u64>;

fn fp_trim(mut f: FpPoly) -> FpPoly {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

fn fp_deg(f: &FpPoly) -> i64 {
    f.len() as i64 - 1
}

fn addm(a: u64, b: u64, p: u64) -> u64 {
    (a + b) % p
}

fn subm(a: u64, b: u64, p: u64) -> u64 {
    (a + p - b % p) % p
}

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

fn invm(a: u64, p: u64) -> u64 {
    // extended Euclid; a != 0 mod p
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert!(r == 1, "not invertible mod p");
    ((t % p as i128 + p as i128) % p as i128) as u64
}

fn fp_mul(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = addm(out[i + j], mulm(x, y, p), p);
        }
    }
    fp_trim(out)
}

fn fp_sub(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(subm(
            a.get(i).copied().unwrap_or(0),
            b.get(i).copied().unwrap_or(0),
            p,
        ));
    }
    fp_trim(out)
}

fn fp_scale(a: &FpPoly, s: u64, p: u64) -> FpPoly {
    fp_trim(a.iter().map(|&c| mulm(c, s, p)).collect())
}

fn fp_monic(a: &FpPoly, p: u64) -> FpPoly {
    match a.last() {
        None => vec![],
        Some(&lc) if lc == 1 => a.clone(),
        Some(&lc) => fp_scale(a, invm(lc, p), p),
    }
}

fn fp_divrem(a: &FpPoly, b: &FpPoly, p: u64) -> (FpPoly, FpPoly) {
    assert!(!b.is_empty());
    let mut rem = a.clone();
    if rem.len() < b.len() {
        return (vec![], rem);
    }
    let mut quot = vec![0u64; rem.len() - b.len() + 1];
    let lc_inv = invm(*b.last().unwrap(), p);
    for i in (0..quot.len()).rev() {
        let c = mulm(rem[i + b.len() - 1], lc_inv, p);
        if c == 0 {
            continue;
        }
        quot[i] = c;
        for (j, &d) in b.iter().enumerate() {
            rem[i + j] = subm(rem[i + j], mulm(c, d, p), p);
        }
    }
    (fp_trim(quot), fp_trim(rem))
}

fn fp_gcd(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let (_, r) = fp_divrem(&a, &b, p);
        a = b;
        b = r;
    }
    fp_monic(&a, p)
}

fn fp_deriv(a: &FpPoly, p: u64) -> FpPoly {
    if a.len() <= 1 {
        return vec![];
    }
    fp_trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mulm(c, (i as u64) % p, p))
            .collect(),
    )
}

fn fp_powmod(base: &FpPoly, exp: &BigUint, f: &FpPoly, p: u64) -> FpPoly {
    let mut acc: FpPoly = vec![1];
    let (_, mut b) = fp_divrem(base, f, p);
    let bits = exp.bits();
    for i in 0..bits {
        if exp.bit(i) {
            acc = fp_divrem(&fp_mul(&acc, &b, p), f, p).1;
        }
        if i + 1 < bits {
            b = fp_divrem(&fp_mul(&b, &b, p), f, p).1;
        }
    }
    acc
}

// ---- modular factorization ----------------------------------------------

struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        // splitmix64
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }
}

/// Distinct-degree then equal-degree factorization of a monic squarefree f.
fn factor_mod_p(f: &FpPoly, p: u64) -> Vec<FpPoly> {
    let mut out = Vec::new();
    let mut f = fp_monic(f, p);
    let mut rng = Rng(0x0DDB1A5E5BAD5EEDu64 ^ p ^ ((fp_deg(&f) as u64) << 32));
    let pexp = BigUint::from(p);
    // h tracks x^(p^d) mod f across the loop.
    let x: FpPoly = vec![0, 1];
    let mut h = x.clone();
    let mut d = 0i64;
    while fp_deg(&f) > 0 {
        d += 1;
        if 2 * d > fp_deg(&f) {
            out.push(f.clone());
            break;
        }
        h = fp_powmod(&h, &pexp, &f, p);
        let g = fp_gcd(&fp_sub(&h, &x, p), &f, p);
        if fp_deg(&g) > 0 {
            equal_degree_split(&g, d as usize, p, &mut rng, &mut out);
            f = fp_divrem(&f, &g, p).0;
            h = fp_divrem(&h, &f, p).1;
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| {
        for i in (0..a.len()).rev() {
            match a[i].cmp(&b[i]) {
                std::cmp::Ordering::Equal => {}
                o => return o,
            }
        }
        std::cmp::Ordering::Equal
    }));
    out
}

/// Cantor-Zassenhaus: f monic squarefree, all irreducible factors of degree d.
fn equal_degree_split(f: &FpPoly, d: usize, p: u64, rng: &mut Rng, out: &mut Vec<FpPoly>) {
    if fp_deg(f) as usize == d {
        out.push(fp_monic(f, p));
        return;
    }
    let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) >> 1;
    loop {
        // random nonconstant polynomial of degree < deg f
        let deg = fp_deg(f) as usize;
        let mut r: FpPoly = (0..deg).map(|_| rng.next() % p).collect();
        r = fp_trim(r);
        if fp_deg(&r) < 1 {
            continue;
        }
        let s = fp_powmod(&r, &e, f, p);
        // gcd(s - 1, f)
        let mut s1 = s.clone();
        if s1.is_empty() {
            s1 = vec![p - 1];
        } else {
            s1[0] = subm(s1[0], 1, p);
            s1 = fp_trim(s1);
        }
        let g = fp_gcd(&s1, f, p);
        let dg = fp_deg(&g);
        if dg > 0 && dg < fp_deg(f) {
            equal_degree_split(&g, d, p, rng, out);
            equal_degree_split(&fp_divrem(f, &g, p).0, d, p, rng, out);
            return;
        }
    }
}

// ---- Hensel lifting -------------------------------------------------------

fn zp_reduce(f: &ZPoly, m: &BigInt) -> ZPoly {
    ztrim(f.iter().map(|c| c.mod_floor(m)).collect())
}

fn zp_symmetric(f: &ZPoly, m: &BigInt) -> ZPoly {
    let half = m / 2;
    ztrim(
        f.iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

fn fp_to_zpoly(f: &FpPoly) -> ZPoly {
    ztrim(f.iter().map(|&c| BigInt::from(c)).collect())
}

fn zpoly_to_fp(f: &ZPoly, p: u64) -> FpPoly {
    use num_traits::ToPrimitive;
    let pb = BigInt::from(p);
    fp_trim(f.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect())
}

/// Lift the coprime monic pair (g0, h0) with f = g0 h0 mod p to modulus p^K.
/// f is monic with coefficients already reduced mod p^K.
fn lift_pair(f: &ZPoly, g0: &FpPoly, h0: &FpPoly, p: u64, target: &BigInt) -> (ZPoly, ZPoly) {
    // Bezout: s g0 + t h0 = 1 in Fp[x].
    let (s, t) = fp_bezout(g0, h0, p);
    let mut g = fp_to_zpoly(g0);
    let mut h = fp_to_zpoly(h0);
    let pb = BigInt::from(p);
    let mut m = pb.clone();
    while &m < target {
        // error term: (f - g h) / m, reduced mod p
        let prod = zmul(&g, &h);
        let diff = zpoly::zsub(f, &prod);
        let e: ZPoly = diff.iter().map(|c| c / &m).collect();
        let e_p = zpoly_to_fp(&ztrim(e), p);
        // delta_g = (t e) rem g0; delta_h = s e + q h0 where q is the quotient
        let (q, dg) = fp_divrem(&fp_mul(&t, &e_p, p), g0, p);
        let dh_raw = {
            let se = fp_mul(&s, &e_p, p);
            let qh = fp_mul(&q, h0, p);
            fp_trim(
                (0..se.len().max(qh.len()))
                    .map(|i| addm(se.get(i).copied().unwrap_or(0), qh.get(i).copied().unwrap_or(0), p))
                    .collect(),
            )
        };
        let add_scaled = |base: &mut ZPoly, delta: &FpPoly| {
            let mut v = base.clone();
            if v.len() < delta.len() {
                v.resize(delta.len(), BigInt::zero());
            }
            for (i, &d) in delta.iter().enumerate() {
                v[i] += &m * BigInt::from(d);
            }
            *base = ztrim(v);
        };
        add_scaled(&mut g, &dg);
        add_scaled(&mut h, &dh_raw);
        m *= &pb;
        g = zp_reduce(&g, &m);
        h = zp_reduce(&h, &m);
    }
    (g, h)
}

fn fp_bezout(a: &FpPoly, b: &FpPoly, p: u64) -> (FpPoly, FpPoly) {
    // returns (s, t) with s a + t b = 1; requires gcd = 1
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1): (FpPoly, FpPoly) = (vec![1], vec![]);
    let (mut t0, mut t1): (FpPoly, FpPoly) = (vec![], vec![1]);
    while !r1.is_empty() {
        let (q, r) = fp_divrem(&r0, &r1, p);
        let new_s = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        let new_t = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = new_s;
        t0 = t1;
        t1 = new_t;
    }
    // r0 = gcd, a constant; normalize to 1
    assert!(fp_deg(&r0) == 0, "bezout of non-coprime pair");
    let inv = invm(r0[0], p);
    (fp_scale(&s0, inv, p), fp_scale(&t0, inv, p))
}

/// Lift all modular factors of monic f to factors mod p^K (divide and conquer).
fn hensel_tree(f: &ZPoly, facs: &[FpPoly], p: u64, target: &BigInt) -> Vec<ZPoly> {
    if facs.len() == 1 {
        return vec![zp_reduce(f, target)];
    }
    let mid = facs.len() / 2;
    let (left, right) = facs.split_at(mid);
    let g0 = left.iter().fold(vec![1u64], |acc, f| fp_mul(&acc, f, p));
    let h0 = right.iter().fold(vec![1u64], |acc, f| fp_mul(&acc, f, p));
    let (g, h) = lift_pair(&zp_reduce(f, target), &g0, &h0, p, target);
    let mut out = hensel_tree(&g, left, p, target);
    out.extend(hensel_tree(&h, right, p, target));
    out
}

// ---- recombination --------------------------------------------------------

fn try_zdiv(a: &ZPoly, b: &ZPoly) -> Option<ZPoly> {
    if b.is_empty() {
        return None;
    }
    let mut rem = a.clone();
    if rem.len() < b.len() {
        return None;
    }
    let mut quot = vec![BigInt::zero(); rem.len() - b.len() + 1];
    let lc = b.last().unwrap().clone();
    for i in (0..quot.len()).rev() {
        let top = rem[i + b.len() - 1].clone();
        if top.is_zero() {
            continue;
        }
        let (q, r) = top.div_rem(&lc);
        if !r.is_zero() {
            return None;
        }
        for (j, d) in b.iter().enumerate() {
            rem[i + j] -= d * &q;
        }
        quot[i] = q;
    }
    if ztrim(rem).is_empty() {
        Some(ztrim(quot))
    } else {
        None
    }
}

/// Find the true irreducible integer factors of monic f from its lifted
/// modular factors by testing subset products mod p^K.
fn recombine(f: &ZPoly, lifted: Vec<ZPoly>, p_k: &BigInt) -> Vec<ZPoly> {
    let mut result = Vec::new();
    let mut remaining = f.clone();
    let mut pool: Vec<ZPoly> = lifted;
    let mut size = 1usize;
    'outer: while !pool.is_empty() {
        if 2 * size > pool.len() {
            // Any proper factor of `remaining` would use at most half the
            // pool, and all those subset sizes were already ruled out; what's
            // left is a single irreducible true factor.
            result.push(remaining.clone());
            pool.clear();
            break;
        }
        let indices: Vec<usize> = (0..pool.len()).collect();
        let mut combo = vec![0usize; size];
        if subset_search(&indices, size, 0, &mut combo, 0, &mut |chosen: &[usize]| {
            let mut prod: ZPoly = vec![BigInt::one()];
            for &i in chosen {
                prod = zp_reduce(&zmul(&prod, &pool[i]), p_k);
            }
            let cand = zp_symmetric(&prod, p_k);
            if let Some(quot) = try_zdiv(&remaining, &cand) {
                remaining = quot;
                result.push(cand);
                // drop used modular factors
                let mut keep = Vec::new();
                for (i, item) in pool.iter().enumerate() {
                    if !chosen.contains(&i) {
                        keep.push(item.clone());
                    }
                }
                pool = keep;
                true
            } else {
                false
            }
        }) {
            // found one at this size; retry same size with reduced pool
            continue 'outer;
        }
        size += 1;
    }
    result
}

/// Enumerate size-k subsets of indices; callback returns true to stop.
fn subset_search(
    indices: &[usize],
    k: usize,
    start: usize,
    combo: &mut Vec<usize>,
    depth: usize,
    cb: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    if depth == k {
        return cb(combo);
    }
    for i in start..indices.len() {
        combo[depth] = indices[i];
        if subset_search(indices, k, i + 1, combo, depth + 1, cb) {
            return true;
        }
    }
    false
}

// ---- top level -------------------------------------------------------------

/// Deterministic order on integer polynomials: degree, then coefficients from
/// the top down.
fn zcmp(a: &ZPoly, b: &ZPoly) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        for i in (0..a.len()).rev() {
            match a[i].cmp(&b[i]) {
                std::cmp::Ordering::Equal => {}
                o => return o,
            }
        }
        std::cmp::Ordering::Equal
    })
}

/// Factor a primitive squarefree integer polynomial with positive leading
/// coefficient into primitive irreducible factors (positive lc, sorted).
pub fn zfactor_squarefree(f: &ZPoly, cap: usize) -> Result<Vec<ZPoly>> {
    let n = zdeg(f);
    if n > cap as i64 {
        return Err(Error::DegreeCap {
            deg: n as usize,
            cap,
        });
    }
    if n <= 1 {
        return Ok(vec![f.clone()]);
    }
    // Monicize: fh(x) = L^(n-1) f(x/L) is monic over Z, with coefficients
    // b_i = a_i L^(n-1-i) for i < n and b_n = 1.
    let lc = f.last().unwrap().clone();
    let fh: ZPoly = {
        let n = n as usize;
        ztrim(
            (0..=n)
                .map(|i| {
                    if i == n {
                        BigInt::one()
                    } else {
                        &f[i] * lc.pow((n - 1 - i) as u32)
                    }
                })
                .collect(),
        )
    };

    // Pick the smallest odd prime keeping fh squarefree mod p.
    let mut p = 3u64;
    let p = loop {
        if crate::arith::primes::is_prime_u64(p) {
            let fp = zpoly_to_fp(&fh, p);
            if fp_deg(&fp) == zdeg(&fh) {
                let d = fp_deriv(&fp, p);
                if fp_deg(&fp_gcd(&fp, &d, p)) == 0 {
                    break p;
                }
            }
        }
        p += 2;
        if p > 10_000 {
            return Err(Error::Diagnostic(
                "no good prime below 10^4 for squarefree reduction (input not squarefree?)".into(),
            ));
        }
    };

    let facs = factor_mod_p(&zpoly_to_fp(&fh, p), p);
    if facs.len() == 1 {
        return Ok(vec![f.clone()]);
    }

    // Landau-Mignotte style bound for monic fh: |coeff of any monic factor|
    // <= 2^n * (n+1) * ||fh||_inf. Lift past twice that.
    let bound = (BigInt::one() << (zdeg(&fh) as usize))
        * BigInt::from(zdeg(&fh) + 1)
        * zpoly::zinf_norm(&fh);
    let mut p_k = BigInt::from(p);
    while p_k <= &bound * 2 {
        p_k *= BigInt::from(p);
    }

    let lifted = hensel_tree(&zp_reduce(&fh, &p_k), &facs, p, &p_k);
    let monic_factors = recombine(&fh, lifted, &p_k);

    // Map back through the monicization: g(x) = pp(gh(L x)).
    let mut out: Vec<ZPoly> = monic_factors
        .iter()
        .map(|gh| {
            let mapped: ZPoly = gh
                .iter()
                .enumerate()
                .map(|(i, c)| c * lc.pow(i as u32))
                .collect();
            zprimitive(&ztrim(mapped)).1
        })
        .collect();
    out.sort_by(zcmp);

    // Defensive reconstruction check; factorization feeds everything above.
    let prod = out
        .iter()
        .fold(vec![BigInt::one()], |acc, g| zmul(&acc, g));
    if prod != *f {
        return Err(Error::Diagnostic(format!(
            "factor reconstruction mismatch for {:?}",
            to_polyq(f).to_string()
        )));
    }
    Ok(out)
}

/// Factor a nonzero rational polynomial: returns (unit, [(monic irreducible,
/// multiplicity)]) with factors sorted deterministically and
/// unit * prod poly^mult == input exactly.
pub fn poly_factor(f: &PolyQ, cap: usize) -> Result<(Rat, Vec<(PolyQ, u32)>)> {
    if f.is_zero() {
        return Err(Error::ZeroInput("poly_factor(0)"));
    }
    if f.deg() > cap as i64 {
        return Err(Error::DegreeCap {
            deg: f.deg() as usize,
            cap,
        });
    }
    let (scale, fz) = from_polyq(f);
    if zdeg(&fz) < 1 {
        return Ok((f.coeff(0), vec![]));
    }
    let mut unit = scale;
    let mut factors: Vec<(PolyQ, u32)> = Vec::new();
    for (part, mult) in zsquarefree_decomposition(&fz) {
        for irr in zfactor_squarefree(&part, cap)? {
            let pq = to_polyq(&irr);
            let lc = pq.lc();
            // unit absorbs lc^mult so the reported factor is monic
            let mut lc_pow = Rat::one();
            for _ in 0..mult {
                lc_pow *= &lc;
            }
            unit *= lc_pow;
            factors.push((pq.monic(), mult));
        }
    }
    factors.sort_by(|a, b| a.0.cmp_order(&b.0).then(a.1.cmp(&b.1)));
    // Verify reconstruction exactly.
    let mut check = PolyQ::constant(unit.clone());
    for (g, m) in &factors {
        check = check.mul(&g.pow(*m));
    }
    if &check != f {
        return Err(Error::Diagnostic(format!(
            "poly_factor reconstruction mismatch on {f}"
        )));
    }
    Ok((unit, factors))
}
