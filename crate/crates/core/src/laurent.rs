//! 2-torsion classes over iterated Laurent towers Q((t1))...((tn)).
//!
//! Entries are restricted to monomials q*t1^e1*...*tn^en with q rational.
//! This loses nothing: in residue characteristic zero every unit of the
//! tower is a square times its leading monomial (1 + m is a square by the
//! binomial series), so every square class — hence every 2-torsion symbol
//! class — has a monomial representative.  Within the model everything
//! below is exact.
//!
//! The last-adjoined variable tn sits on top; residue steps strip the last
//! exponent.  A class normalizes as an inertial part tensor one ramified
//! symbol (chi, tn), and every question (triviality, ramification index,
//! genus) recurses through that normal form down to a class over Q.

use std::fmt;

use num_traits::{One, Zero};

use crate::arith::{is_square_rat, parse_rat, Rat};
use crate::brq::{class_of, quad_field_splits, BrauerClass2Q, SymbolQ};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::qx::split_top_level;

/// A monomial q * t1^e1 * ... * tn^en with q a nonzero rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialElem {
    pub coeff: Rat,
    pub exps: Vec<i64>,
}

impl MonomialElem {
    pub fn new(coeff: Rat, exps: Vec<i64>) -> Result<MonomialElem> {
        if coeff.is_zero() {
            return Err(Error::ZeroInput("monomial coefficient"));
        }
        Ok(MonomialElem { coeff, exps })
    }

    pub fn constant(q: Rat, height: usize) -> Result<MonomialElem> {
        MonomialElem::new(q, vec![0; height])
    }

    pub fn one(height: usize) -> MonomialElem {
        MonomialElem {
            coeff: Rat::one(),
            exps: vec![0; height],
        }
    }

    pub fn height(&self) -> usize {
        self.exps.len()
    }

    pub fn mul(&self, other: &MonomialElem) -> MonomialElem {
        assert_eq!(self.exps.len(), other.exps.len(), "height mismatch");
        MonomialElem {
            coeff: self.coeff.clone() * other.coeff.clone(),
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn pow(&self, e: i64) -> MonomialElem {
        MonomialElem {
            coeff: pow_rat(&self.coeff, e),
            exps: self.exps.iter().map(|x| x * e).collect(),
        }
    }

    /// Squares of the tower are exactly: even exponents and a rational
    /// square coefficient.
    pub fn is_square(&self) -> bool {
        self.exps.iter().all(|e| e % 2 == 0) && is_square_rat(&self.coeff)
    }

    /// Strip the top variable: (monomial one level down, exponent of tn).
    pub fn split_last(&self) -> (MonomialElem, i64) {
        let mut exps = self.exps.clone();
        let last = exps.pop().expect("split_last at height 0");
        (
            MonomialElem {
                coeff: self.coeff.clone(),
                exps,
            },
            last,
        )
    }

    /// View a monomial one level up (exponent 0 in the new top variable).
    pub fn lift(&self) -> MonomialElem {
        let mut exps = self.exps.clone();
        exps.push(0);
        MonomialElem {
            coeff: self.coeff.clone(),
            exps,
        }
    }

    pub fn parse(s: &str, height: usize) -> Result<MonomialElem> {
        let mut body = s.trim();
        let mut neg = false;
        while let Some(rest) = body.strip_prefix('-') {
            neg = !neg;
            body = rest.trim_start();
        }
        if body.is_empty() {
            return Err(Error::Parse("empty monomial".into()));
        }
        let mut coeff = Rat::one();
        let mut exps = vec![0i64; height];
        for factor in body.split('*') {
            let f = factor.trim();
            if let Some(rest) = f.strip_prefix('t') {
                let (idx_str, exp) = match rest.split_once('^') {
                    Some((i, e)) => (
                        i,
                        e.parse::<i64>()
                            .map_err(|_| Error::Parse(format!("bad exponent in {:?}", f)))?,
                    ),
                    None => (rest, 1),
                };
                let idx: usize = if idx_str.is_empty() {
                    1
                } else {
                    idx_str
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad variable in {:?}", f)))?
                };
                if idx == 0 || idx > height {
                    return Err(Error::Parse(format!(
                        "variable t{} out of range for height {}",
                        idx, height
                    )));
                }
                exps[idx - 1] += exp;
            } else {
                coeff *= parse_rat(f)?;
            }
        }
        if neg {
            coeff = -coeff;
        }
        MonomialElem::new(coeff, exps)
    }
}

impl fmt::Display for MonomialElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factors: Vec<String> = self
            .exps
            .iter()
            .enumerate()
            .filter(|(_, e)| **e != 0)
            .map(|(i, e)| {
                if *e == 1 {
                    format!("t{}", i + 1)
                } else {
                    format!("t{}^{}", i + 1, e)
                }
            })
            .collect();
        if factors.is_empty() {
            return write!(f, "{}", self.coeff);
        }
        let tail = factors.join("*");
        if self.coeff.is_one() {
            write!(f, "{}", tail)
        } else if (-self.coeff.clone()).is_one() {
            write!(f, "-{}", tail)
        } else {
            write!(f, "{}*{}", self.coeff, tail)
        }
    }
}

fn pow_rat(q: &Rat, e: i64) -> Rat {
    if e == 0 {
        return Rat::one();
    }
    let (mut base, mut e) = if e < 0 {
        (q.recip(), e.unsigned_abs())
    } else {
        (q.clone(), e as u64)
    };
    let mut acc = Rat::one();
    while e > 0 {
        if e & 1 == 1 {
            acc *= base.clone();
        }
        base = base.clone() * base.clone();
        e >>= 1;
    }
    acc
}

/// A 2-torsion class over the height-n tower, as a list of symbols with
/// monomial entries.  Height 0 is a class over Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentClass {
    height: usize,
    symbols: Vec<(MonomialElem, MonomialElem)>,
}

impl LaurentClass {
    pub fn new(height: usize, symbols: Vec<(MonomialElem, MonomialElem)>) -> Result<LaurentClass> {
        for (a, b) in &symbols {
            if a.height() != height || b.height() != height {
                return Err(Error::Parse(format!(
                    "symbol entries must have {} exponents",
                    height
                )));
            }
        }
        Ok(LaurentClass { height, symbols })
    }

    pub fn trivial(height: usize) -> LaurentClass {
        LaurentClass {
            height,
            symbols: Vec::new(),
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn symbols(&self) -> &[(MonomialElem, MonomialElem)] {
        &self.symbols
    }

    pub fn combine(&self, other: &LaurentClass) -> LaurentClass {
        assert_eq!(self.height, other.height, "height mismatch");
        let mut symbols = self.symbols.clone();
        symbols.extend(other.symbols.iter().cloned());
        LaurentClass {
            height: self.height,
            symbols,
        }
    }

    /// View the class one level up the tower.
    pub fn lift(&self) -> LaurentClass {
        LaurentClass {
            height: self.height + 1,
            symbols: self
                .symbols
                .iter()
                .map(|(a, b)| (a.lift(), b.lift()))
                .collect(),
        }
    }

    /// "[(a, b); ...] @ height n"
    pub fn parse(s: &str) -> Result<LaurentClass> {
        let (body, h) = s
            .trim()
            .rsplit_once('@')
            .ok_or_else(|| Error::Parse("class must end with \"@ height n\"".into()))?;
        let h = h.trim();
        let height: usize = h
            .strip_prefix("height")
            .ok_or_else(|| Error::Parse(format!("expected \"height n\", got {:?}", h)))?
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad height in {:?}", h)))?;
        let inner = body
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("class must look like [(a, b); ...]: {:?}", body)))?;
        let mut symbols = Vec::new();
        if !inner.trim().is_empty() {
            for part in split_top_level(inner, ';') {
                let p = part.trim();
                let entry = p
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| Error::Parse(format!("symbol must look like (a, b): {:?}", p)))?;
                let halves = split_top_level(entry, ',');
                if halves.len() != 2 {
                    return Err(Error::Parse(format!(
                        "symbol must have exactly two entries: {:?}",
                        p
                    )));
                }
                symbols.push((
                    MonomialElem::parse(&halves[0], height)?,
                    MonomialElem::parse(&halves[1], height)?,
                ));
            }
        }
        LaurentClass::new(height, symbols)
    }

    /// The class over Q presented by a height-0 class.
    pub fn to_brq(&self, budget: u64) -> Result<BrauerClass2Q> {
        assert_eq!(self.height, 0, "to_brq needs height 0");
        let mut syms = Vec::new();
        for (a, b) in &self.symbols {
            syms.push(SymbolQ::new(a.coeff.clone(), b.coeff.clone())?);
        }
        class_of(&syms, budget)
    }
}

impl fmt::Display for LaurentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (a, b)) in self.symbols.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "({}, {})", a, b)?;
        }
        write!(f, "] @ height {}", self.height)
    }
}

/// Inertial-times-ramified normal form at the top of the tower:
/// the input is equivalent to (lift of inertial_residue) tensor (nsr_char, tn).
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub inertial_residue: LaurentClass,
    pub nsr_char: MonomialElem,
}

/// Apply (u t^i, w t^j) = (u, w) (x) (u^j w^i (-1)^{ij}, t) to every symbol
/// and collect the two factors.  Inertial symbols with a square entry are
/// dropped on the spot.
pub fn normalize(c: &LaurentClass) -> Result<NormalForm> {
    if c.height == 0 {
        return Err(Error::Parse("normalize needs height >= 1".into()));
    }
    let down = c.height - 1;
    let mut inertial = Vec::new();
    let mut chi = MonomialElem::one(down);
    for (a, b) in &c.symbols {
        let (u, i) = a.split_last();
        let (w, j) = b.split_last();
        if !u.is_square() && !w.is_square() {
            inertial.push((u.clone(), w.clone()));
        }
        chi = chi.mul(&u.pow(j)).mul(&w.pow(i));
        if (i % 2 != 0) && (j % 2 != 0) {
            chi.coeff = -chi.coeff;
        }
    }
    Ok(NormalForm {
        inertial_residue: LaurentClass::new(down, inertial)?,
        nsr_char: chi,
    })
}

/// 2 when the top-level character is a non-square (the class needs a
/// ramified extension), 1 otherwise.
pub fn ramification_index(c: &LaurentClass) -> Result<u32> {
    Ok(if normalize(c)?.nsr_char.is_square() { 1 } else { 2 })
}

/// Triviality through the tower: a ramified class is never trivial; an
/// unramified one is trivial exactly when its residue is.  Bottoms out in
/// the ramification set over Q.
pub fn is_trivial(c: &LaurentClass, cfg: &Config) -> Result<bool> {
    if c.height == 0 {
        return Ok(c.to_brq(cfg.factor_budget)?.is_trivial());
    }
    let nf = normalize(c)?;
    Ok(nf.nsr_char.is_square() && is_trivial(&nf.inertial_residue, cfg)?)
}

/// Does c split over the quadratic extension by the square root of d?
///
/// Height 0 is the splitting test over Q.  Above that, write d = delta *
/// tn^eps with eps in {0, 1} mod squares and c ~ I (x) (chi, tn):
/// a ramified root (eps = 1) turns tn into delta times a square, leaving
/// the inertial class I (x) (chi, delta), which must have trivial residue;
/// an inertial root (eps = 0) extends the residue field, so chi must become
/// a square there (chi or chi*delta a square below) and the inertial
/// residue must itself split over sqrt(delta).
pub fn split_by_quad(c: &LaurentClass, d: &MonomialElem, cfg: &Config) -> Result<bool> {
    assert_eq!(c.height(), d.height(), "height mismatch");
    if c.height == 0 {
        return quad_field_splits(&d.coeff, &c.to_brq(cfg.factor_budget)?);
    }
    let nf = normalize(c)?;
    let (delta, e) = d.split_last();
    let chi = nf.nsr_char;
    if e % 2 != 0 {
        let extra = LaurentClass::new(c.height - 1, vec![(chi, delta)])?;
        is_trivial(&nf.inertial_residue.combine(&extra), cfg)
    } else {
        let chi_splits = chi.is_square() || chi.mul(&delta).is_square();
        Ok(chi_splits && split_by_quad(&nf.inertial_residue, &delta, cfg)?)
    }
}

/// Certify that a nontrivial class has index 2 (is a quaternion class).
///
/// Unramified at the top: the index equals that of the residue.  Ramified:
/// the index is twice the index of the inertial part over the character
/// extension, so index 2 means the inertial residue splits over sqrt(chi).
pub fn certify_index_two(c: &LaurentClass, cfg: &Config) -> Result<()> {
    if c.height == 0 {
        // a nonempty ramification set over Q always has index exactly 2
        return Ok(());
    }
    let nf = normalize(c)?;
    if nf.nsr_char.is_square() {
        return certify_index_two(&nf.inertial_residue, cfg);
    }
    if split_by_quad(&nf.inertial_residue, &nf.nsr_char, cfg)? {
        Ok(())
    } else {
        Err(Error::NotIndexTwo(format!(
            "inertial residue {} does not split over sqrt({}); the index is at least 4",
            nf.inertial_residue, nf.nsr_char
        )))
    }
}

/// One step of the genus walk down the tower.
#[derive(Clone, Debug)]
pub struct ChainStep {
    pub level: usize,
    pub e: u32,
    pub action: String,
    pub residue: String,
}

#[derive(Clone, Debug)]
pub struct GenusLaurentReport {
    pub chain: Vec<ChainStep>,
    pub size_bound: u64,
}

impl GenusLaurentReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "size_bound": self.size_bound,
            "chain": self.chain.iter().map(|s| serde_json::json!({
                "level": s.level,
                "e": s.e,
                "action": s.action,
                "residue": s.residue,
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for GenusLaurentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "genus size bound: {}", self.size_bound)?;
        for s in &self.chain {
            writeln!(f, "level {}: e = {}, {} (residue {})", s.level, s.e, s.action, s.residue)?;
        }
        Ok(())
    }
}

/// Walk the tower: stop at the first ramified level (a prime-index class
/// totally ramified there is alone in its genus), or descend through
/// unramified levels to the base field, where 2-torsion genus is trivial.
pub fn genus_laurent(c: &LaurentClass, cfg: &Config) -> Result<GenusLaurentReport> {
    if is_trivial(c, cfg)? {
        return Err(Error::TrivialClass);
    }
    certify_index_two(c, cfg)?;
    let mut chain = Vec::new();
    let mut cur = c.clone();
    loop {
        if cur.height == 0 {
            chain.push(ChainStep {
                level: 0,
                e: 1,
                action: "base field reached: 2-torsion class over a global field, genus trivial"
                    .into(),
                residue: cur.to_brq(cfg.factor_budget)?.to_string(),
            });
            break;
        }
        let nf = normalize(&cur)?;
        if !nf.nsr_char.is_square() {
            chain.push(ChainStep {
                level: cur.height,
                e: 2,
                action: format!(
                    "ramified (character {}): a prime-index class with e = 2 is alone in its genus",
                    nf.nsr_char
                ),
                residue: nf.inertial_residue.to_string(),
            });
            break;
        }
        chain.push(ChainStep {
            level: cur.height,
            e: 1,
            action: "unramified: descend to the residue class".into(),
            residue: nf.inertial_residue.to_string(),
        });
        cur = nf.inertial_residue;
    }
    Ok(GenusLaurentReport {
        chain,
        size_bound: 1,
    })
}

/// One level of the inertial/ramified certificate.
#[derive(Clone, Debug)]
pub struct GenSplLevel {
    pub level: usize,
    pub inertial: String,
    pub nsr_char: String,
}

#[derive(Clone, Debug)]
pub struct GenSplReport {
    pub levels: Vec<GenSplLevel>,
    pub base: String,
}

impl GenSplReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "verdict": "trivial",
            "levels": self.levels.iter().map(|l| serde_json::json!({
                "level": l.level,
                "inertial": l.inertial,
                "char": l.nsr_char,
            })).collect::<Vec<_>>(),
            "base": self.base,
        })
    }
}

impl fmt::Display for GenSplReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gen_spl: trivial (the class is alone in its split genus)")?;
        for l in &self.levels {
            writeln!(
                f,
                "level {}: inertial {} (x) ({}, t{})",
                l.level, l.inertial, l.nsr_char, l.level
            )?;
        }
        write!(f, "base class over Q: {}", self.base)
    }
}

/// Emit the inertial (x) ramified certificate at every level.  For a
/// quaternion class the ramified factor has index dividing 2, its powers
/// coprime to e are just itself, and the inertial residue recurses — so the
/// split genus is the singleton.
pub fn gen_spl_decomposition(c: &LaurentClass, cfg: &Config) -> Result<GenSplReport> {
    if is_trivial(c, cfg)? {
        return Err(Error::TrivialClass);
    }
    certify_index_two(c, cfg)?;
    let mut levels = Vec::new();
    let mut cur = c.clone();
    while cur.height >= 1 {
        let nf = normalize(&cur)?;
        levels.push(GenSplLevel {
            level: cur.height,
            inertial: nf.inertial_residue.to_string(),
            nsr_char: nf.nsr_char.to_string(),
        });
        cur = nf.inertial_residue;
    }
    Ok(GenSplReport {
        levels,
        base: cur.to_brq(cfg.factor_budget)?.to_string(),
    })
}
