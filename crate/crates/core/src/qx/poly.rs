//! Dense univariate polynomials over Q and the rational functions built from
//! them, with the `3*x^2 - 1/2*x + 4` parse/print format used everywhere a
//! polynomial crosses the CLI boundary.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::qx::zpoly;

/// Coefficients ascending by power; no trailing zeros; empty vec is the zero
/// polynomial.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PolyQ {
    coeffs: Vec<Rat>,
}

impl PolyQ {
    pub fn new(mut coeffs: Vec<Rat>) -> PolyQ {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        PolyQ { coeffs }
    }

    pub fn zero() -> PolyQ {
        PolyQ { coeffs: vec![] }
    }

    pub fn one() -> PolyQ {
        PolyQ::constant(Rat::one())
    }

    pub fn x() -> PolyQ {
        PolyQ::new(vec![Rat::zero(), Rat::one()])
    }

    pub fn constant(c: Rat) -> PolyQ {
        PolyQ::new(vec![c])
    }

    pub fn from_int_coeffs(ascending: &[i64]) -> PolyQ {
        PolyQ::new(ascending.iter().map(|&n| Rat::from(BigInt::from(n))).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree with deg(0) = -1, so valuation arithmetic stays in i64.
    pub fn deg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn lc(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().map_or(false, |c| c.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, t: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn scale(&self, s: &Rat) -> PolyQ {
        if s.is_zero() {
            return PolyQ::zero();
        }
        PolyQ {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn monic(&self) -> PolyQ {
        if self.is_zero() {
            return PolyQ::zero();
        }
        self.scale(&self.lc().recip())
    }

    pub fn add(&self, other: &PolyQ) -> PolyQ {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        PolyQ::new(out)
    }

    pub fn sub(&self, other: &PolyQ) -> PolyQ {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PolyQ {
        PolyQ {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &PolyQ) -> PolyQ {
        if self.is_zero() || other.is_zero() {
            return PolyQ::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyQ::new(out)
    }

    pub fn pow(&self, mut e: u32) -> PolyQ {
        let mut base = self.clone();
        let mut acc = PolyQ::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Long division; divisor must be nonzero.
    pub fn divrem(&self, div: &PolyQ) -> (PolyQ, PolyQ) {
        assert!(!div.is_zero(), "division by zero polynomial");
        let mut rem = self.coeffs.clone();
        let dd = div.coeffs.len();
        if rem.len() < dd {
            return (PolyQ::zero(), self.clone());
        }
        let mut quot = vec![Rat::zero(); rem.len() - dd + 1];
        let lc_inv = div.lc().recip();
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd - 1] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, d) in div.coeffs.iter().enumerate() {
                let t = d * &c;
                rem[i + j] -= t;
            }
            quot[i] = c;
        }
        (PolyQ::new(quot), PolyQ::new(rem))
    }

    pub fn rem(&self, div: &PolyQ) -> PolyQ {
        self.divrem(div).1
    }

    /// Exact division, panicking on a nonzero remainder (internal use only).
    pub fn exact_div(&self, div: &PolyQ) -> PolyQ {
        let (q, r) = self.divrem(div);
        assert!(r.is_zero(), "exact_div with nonzero remainder");
        q
    }

    pub fn divides(&self, other: &PolyQ) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.divrem(self).1.is_zero()
    }

    pub fn derivative(&self) -> PolyQ {
        if self.coeffs.len() <= 1 {
            return PolyQ::zero();
        }
        PolyQ::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from(BigInt::from(i)))
                .collect(),
        )
    }

    /// Monic gcd, computed on integer primitive parts to avoid coefficient
    /// swell.
    pub fn gcd(&self, other: &PolyQ) -> PolyQ {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        let (_, a) = self.primitive_z();
        let (_, b) = other.primitive_z();
        let g = zpoly::zgcd(&a, &b);
        zpoly::to_polyq(&g).monic()
    }

    /// Write self = scale * P with P a primitive integer polynomial with
    /// positive leading coefficient.
    pub fn primitive_z(&self) -> (Rat, Vec<BigInt>) {
        zpoly::from_polyq(self)
    }

    /// Substitute x -> x + c.
    pub fn shift(&self, c: &Rat) -> PolyQ {
        // Horner in the polynomial ring.
        let mut acc = PolyQ::zero();
        let xc = PolyQ::new(vec![c.clone(), Rat::one()]);
        for coeff in self.coeffs.iter().rev() {
            acc = acc.mul(&xc).add(&PolyQ::constant(coeff.clone()));
        }
        acc
    }

    /// Deterministic order: by degree, then coefficients from the top down.
    pub fn cmp_order(&self, other: &PolyQ) -> Ordering {
        match self.coeffs.len().cmp(&other.coeffs.len()) {
            Ordering::Equal => {}
            o => return o,
        }
        for i in (0..self.coeffs.len()).rev() {
            match self.coeffs[i].cmp(&other.coeffs[i]) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl fmt::Debug for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for i in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mag = c.abs();
            if i == 0 {
                out.push_str(&mag.to_string());
            } else {
                if !mag.is_one() {
                    out.push_str(&mag.to_string());
                    out.push('*');
                }
                if i == 1 {
                    out.push('x');
                } else {
                    out.push_str(&format!("x^{i}"));
                }
            }
        }
        write!(f, "{out}")
    }
}

/// A rational function num/den with den monic and gcd(num, den) = 1.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFuncQ {
    num: PolyQ,
    den: PolyQ,
}

impl RatFuncQ {
    pub fn new(num: PolyQ, den: PolyQ) -> Result<RatFuncQ> {
        if den.is_zero() {
            return Err(Error::ZeroInput("rational function denominator"));
        }
        if num.is_zero() {
            return Ok(RatFuncQ {
                num: PolyQ::zero(),
                den: PolyQ::one(),
            });
        }
        let g = num.gcd(&den);
        let mut num = num.exact_div(&g);
        let mut den = den.exact_div(&g);
        let lc = den.lc().recip();
        num = num.scale(&lc);
        den = den.scale(&lc);
        Ok(RatFuncQ { num, den })
    }

    pub fn from_poly(p: PolyQ) -> RatFuncQ {
        RatFuncQ {
            num: p,
            den: PolyQ::one(),
        }
    }

    pub fn from_rat(q: Rat) -> RatFuncQ {
        RatFuncQ::from_poly(PolyQ::constant(q))
    }

    pub fn num(&self) -> &PolyQ {
        &self.num
    }

    pub fn den(&self) -> &PolyQ {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Rat> {
        if self.is_constant() {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn mul(&self, other: &RatFuncQ) -> RatFuncQ {
        RatFuncQ::new(self.num.mul(&other.num), self.den.mul(&other.den)).unwrap()
    }

    pub fn add(&self, other: &RatFuncQ) -> RatFuncQ {
        RatFuncQ::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
        .unwrap()
    }

    pub fn neg(&self) -> RatFuncQ {
        RatFuncQ {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RatFuncQ) -> RatFuncQ {
        self.add(&other.neg())
    }

    pub fn inv(&self) -> Result<RatFuncQ> {
        if self.is_zero() {
            return Err(Error::ZeroInput("inverse of zero rational function"));
        }
        RatFuncQ::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &RatFuncQ) -> Result<RatFuncQ> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow_i64(&self, e: i64) -> Result<RatFuncQ> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = RatFuncQ::from_poly(PolyQ::one());
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Evaluate at a rational point; None when the denominator vanishes.
    pub fn eval(&self, t: &Rat) -> Option<Rat> {
        let d = self.den.eval(t);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(t) / d)
    }

    /// Multiplicity of the monic irreducible pi: v(num) - v(den).
    pub fn val_at(&self, pi: &PolyQ) -> i64 {
        assert!(!self.is_zero(), "valuation of zero");
        let count = |p: &PolyQ| -> i64 {
            let mut p = p.clone();
            let mut v = 0;
            loop {
                let (q, r) = p.divrem(pi);
                if !r.is_zero() {
                    return v;
                }
                v += 1;
                p = q;
            }
        };
        count(&self.num) - count(&self.den)
    }

    /// Valuation at the infinite place (uniformizer 1/x).
    pub fn val_at_infinity(&self) -> i64 {
        assert!(!self.is_zero(), "valuation of zero");
        self.den.deg() - self.num.deg()
    }

    /// Ratio of leading coefficients: the unit value at infinity.
    pub fn leading_unit_at_infinity(&self) -> Rat {
        self.num.lc() / self.den.lc()
    }

    /// self / pi^m as a rational function.
    pub fn shift_out(&self, pi: &PolyQ, m: i64) -> RatFuncQ {
        let pi_f = RatFuncQ::from_poly(pi.clone());
        self.mul(&pi_f.pow_i64(-m).expect("pi nonzero"))
    }
}

impl fmt::Display for RatFuncQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFuncQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// ---- parsing ----------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Var,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let bytes: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            'x' => {
                out.push(Tok::Var);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = bytes[start..i].iter().collect();
                out.push(Tok::Num(digits.parse().unwrap()));
            }
            _ => return Err(Error::Parse(format!("unexpected character {c:?} in {s:?}"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<RatFuncQ> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            match t {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFuncQ> {
        let mut acc = self.unary()?;
        while let Some(t) = self.peek() {
            match t {
                Tok::Star => {
                    self.bump();
                    acc = acc.mul(&self.unary()?);
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = acc.div(&rhs)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFuncQ> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFuncQ> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let neg = if matches!(self.peek(), Some(Tok::Minus)) {
                self.bump();
                true
            } else {
                false
            };
            match self.bump() {
                Some(Tok::Num(n)) => {
                    let e: i64 = n
                        .to_string()
                        .parse()
                        .map_err(|_| Error::Parse("exponent too large".into()))?;
                    return base.pow_i64(if neg { -e } else { e });
                }
                _ => return Err(Error::Parse("expected integer exponent after ^".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFuncQ> {
        match self.bump() {
            Some(Tok::Num(n)) => Ok(RatFuncQ::from_rat(Rat::from(n))),
            Some(Tok::Var) => Ok(RatFuncQ::from_poly(PolyQ::x())),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(Error::Parse("missing closing parenthesis".into())),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parse an expression in x into a rational function: polynomials, fractions,
/// parentheses, and integer powers (negative allowed) all work.
pub fn parse_ratfunc(s: &str) -> Result<RatFuncQ> {
    let toks = tokenize(s)?;
    let mut p = Parser { toks: &toks, pos: 0 };
    let r = p.expr()?;
    if p.pos != toks.len() {
        return Err(Error::Parse(format!("trailing input in {s:?}")));
    }
    Ok(r)
}

/// Parse an expression that must reduce to a polynomial.
pub fn parse_poly(s: &str) -> Result<PolyQ> {
    let r = parse_ratfunc(s)?;
    if !r.den().is_one() {
        return Err(Error::Parse(format!("{s:?} is not a polynomial")));
    }
    Ok(r.num().clone())
}
