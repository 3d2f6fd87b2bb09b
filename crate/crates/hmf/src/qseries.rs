//! Sparse exact-rational Laurent series in a fractional power of `q`.
//!
//! A [`FracQSeries`] stores coefficients of `q^(n/denom)` for integer keys
//! `n`, together with a rational truncation bound `prec`: coefficients at
//! exponents `>= prec` are unknown and never stored. All ring operations
//! propagate `prec` pessimistically, so every emitted coefficient is fully
//! determined by the known parts of the operands. In particular,
//! multiplying by a series with a pole lowers the precision by the pole
//! order.

use crate::{rat_i64, Error, Int, Rat, Result};
use num::{Integer, One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Laurent series `sum c(n) q^(n/denom)` truncated at exponent `prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracQSeries {
    denom: u64,
    coeffs: BTreeMap<i64, Rat>,
    prec: Rat,
}

impl FracQSeries {
    /// Builds a series from `(key, coefficient)` pairs with exponents
    /// `key/denom`. Zero coefficients and terms at or beyond `prec` are
    /// dropped, and `denom` is reduced to its minimal value.
    pub fn new(denom: u64, terms: Vec<(i64, Rat)>, prec: Rat) -> Self {
        assert!(denom > 0, "denom must be positive");
        let mut coeffs = BTreeMap::new();
        for (k, c) in terms {
            if c.is_zero() {
                continue;
            }
            let e = coeffs.entry(k).or_insert_with(Rat::zero);
            *e += c;
            if e.is_zero() {
                coeffs.remove(&k);
            }
        }
        let mut s = FracQSeries { denom, coeffs, prec };
        s.normalize();
        s
    }

    /// Series with integer exponents.
    pub fn from_int_terms(terms: Vec<(i64, Rat)>, prec: Rat) -> Self {
        Self::new(1, terms, prec)
    }

    pub fn zero(prec: Rat) -> Self {
        FracQSeries { denom: 1, coeffs: BTreeMap::new(), prec }
    }

    pub fn one(prec: Rat) -> Self {
        Self::constant(Rat::one(), prec)
    }

    pub fn constant(c: Rat, prec: Rat) -> Self {
        Self::from_int_terms(vec![(0, c)], prec)
    }

    /// The monomial `c * q^e`.
    pub fn monomial(c: Rat, e: &Rat, prec: Rat) -> Self {
        let d = e.denom().to_u64_digits().1;
        let denom = if d.is_empty() { 1 } else { d[0] };
        let key = int_to_i64(e.numer());
        Self::new(denom, vec![(key, c)], prec)
    }

    fn normalize(&mut self) {
        let bound = &self.prec * rat_i64(self.denom as i64);
        self.coeffs.retain(|k, c| !c.is_zero() && rat_i64(*k) < bound);
        let mut g: u64 = self.denom;
        for k in self.coeffs.keys() {
            g = g.gcd(&(k.unsigned_abs().min(u64::MAX)));
            if g == 1 {
                break;
            }
        }
        if g > 1 {
            self.coeffs = self
                .coeffs
                .iter()
                .map(|(k, c)| (k / g as i64, c.clone()))
                .collect();
            self.denom /= g;
        }
        if self.coeffs.is_empty() {
            self.denom = 1;
        }
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    pub fn prec(&self) -> &Rat {
        &self.prec
    }

    /// True when no coefficient below `prec` is nonzero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exponent of the first nonzero term, if any.
    pub fn ord(&self) -> Option<Rat> {
        self.coeffs
            .keys()
            .next()
            .map(|k| Rat::new(Int::from(*k), Int::from(self.denom)))
    }

    /// Iterates over `(exponent, coefficient)` pairs in increasing order.
    pub fn terms(&self) -> impl Iterator<Item = (Rat, &Rat)> + '_ {
        let d = self.denom;
        self.coeffs
            .iter()
            .map(move |(k, c)| (Rat::new(Int::from(*k), Int::from(d)), c))
    }

    /// Coefficient at exponent `e`; `None` when `e >= prec` (unknown).
    pub fn coeff(&self, e: &Rat) -> Option<Rat> {
        if *e >= self.prec {
            return None;
        }
        let scaled = e * rat_i64(self.denom as i64);
        if !scaled.is_integer() {
            return Some(Rat::zero());
        }
        let k = int_to_i64(scaled.numer());
        Some(self.coeffs.get(&k).cloned().unwrap_or_else(Rat::zero))
    }

    /// Coefficient at integer exponent `n`; `None` beyond precision.
    pub fn coeff_int(&self, n: i64) -> Option<Rat> {
        self.coeff(&rat_i64(n))
    }

    fn lift_keys(&self, denom: u64) -> impl Iterator<Item = (i64, &Rat)> + '_ {
        debug_assert!(denom % self.denom == 0);
        let f = (denom / self.denom) as i64;
        self.coeffs.iter().map(move |(k, c)| (k * f, c))
    }

    pub fn neg(&self) -> Self {
        FracQSeries {
            denom: self.denom,
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c.clone())).collect(),
            prec: self.prec.clone(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let denom = self.denom.lcm(&rhs.denom);
        let prec = self.prec.clone().min(rhs.prec.clone());
        let mut terms: Vec<(i64, Rat)> = self.lift_keys(denom).map(|(k, c)| (k, c.clone())).collect();
        terms.extend(rhs.lift_keys(denom).map(|(k, c)| (k, c.clone())));
        Self::new(denom, terms, prec)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.prec.clone());
        }
        FracQSeries {
            denom: self.denom,
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, v * c)).collect(),
            prec: self.prec.clone(),
        }
    }

    /// Multiplies by `q^e` (shifts all exponents, including `prec`).
    pub fn shift(&self, e: &Rat) -> Self {
        let d = e.denom().to_u64_digits().1;
        let ed = if d.is_empty() { 1u64 } else { d[0] };
        let denom = self.denom.lcm(&ed);
        let off = int_to_i64(&(e.numer() * Int::from(denom / ed)));
        let f = (denom / self.denom) as i64;
        let coeffs = self.coeffs.iter().map(|(k, c)| (k * f + off, c.clone())).collect();
        let mut s = FracQSeries { denom, coeffs, prec: &self.prec + e };
        s.normalize();
        s
    }

    /// Truncates to a (smaller) precision.
    pub fn truncated(&self, prec: Rat) -> Self {
        let mut s = self.clone();
        if prec < s.prec {
            s.prec = prec;
            s.normalize();
        }
        s
    }

    /// Precision of the product of two series with the given orders and
    /// precisions: unknown coefficients of either factor must not influence
    /// any emitted coefficient.
    fn mul_prec(&self, rhs: &Self) -> Rat {
        let mut p = &self.prec + &rhs.prec;
        if let Some(oa) = self.ord() {
            p = p.min(oa + &rhs.prec);
        }
        if let Some(ob) = rhs.ord() {
            p = p.min(ob + &self.prec);
        }
        p
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let prec = self.mul_prec(rhs);
        if self.is_zero() || rhs.is_zero() {
            return Self::zero(prec);
        }
        let denom = self.denom.lcm(&rhs.denom);
        let bound = &prec * rat_i64(denom as i64);
        // key cutoff: keep keys k with k < bound
        let kmax: i64 = if bound.is_integer() {
            int_to_i64(bound.numer())
        } else {
            int_to_i64(&bound.floor().numer().clone()) + 1
        };
        let a: Vec<(i64, &Rat)> = self.lift_keys(denom).collect();
        let b: Vec<(i64, &Rat)> = rhs.lift_keys(denom).collect();
        let coeffs = if (a.len() as u64) * (b.len() as u64) <= 1 << 10 {
            convolve_sparse(&a, &b, kmax)
        } else {
            convolve_dense(&a, &b, kmax)
        };
        let mut s = FracQSeries { denom, coeffs, prec };
        s.normalize();
        s
    }

    /// Inverse of a series with nonzero leading coefficient, computed by
    /// leading-term-normalized geometric expansion.
    pub fn invert(&self) -> Result<Self> {
        let (k0, c0) = match self.coeffs.iter().next() {
            Some((k, c)) => (*k, c.clone()),
            None => return Err(Error::InversionOfZeroSeries),
        };
        let ord = Rat::new(Int::from(k0), Int::from(self.denom));
        // u = self / (c0 q^ord) - 1 has positive order
        let unit = self.shift(&(-ord.clone())).scale(&c0.recip());
        let mut u = unit;
        let one_t = Self::one(u.prec.clone());
        u = u.sub(&one_t);
        let target = u.prec().clone();
        let mut acc = Self::one(target.clone());
        let mut term = Self::one(target.clone());
        let neg_u = u.neg();
        while !term.is_zero() {
            // truncate back to the target: powers of a positive-order
            // series gain precision under mul, which would loop forever
            term = term.mul(&neg_u).truncated(target.clone());
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        Ok(acc.scale(&c0.recip()).shift(&(-ord)))
    }

    /// Integer power, with negative exponents via [`FracQSeries::invert`].
    pub fn pow_int(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(Self::one(self.prec.clone()));
        }
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc: Option<Self> = None;
        let mut sq = base;
        loop {
            if n & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq),
                });
            }
            n >>= 1;
            if n == 0 {
                break;
            }
            sq = sq.mul(&sq);
        }
        Ok(acc.unwrap())
    }

    /// Applies `q -> q^m` for positive rational `m` to exponents and `prec`.
    pub fn substitute_scale(&self, m: &Rat) -> Self {
        assert!(m.is_positive(), "substitution scale must be positive");
        let md = m.denom().to_u64_digits().1;
        let md = if md.is_empty() { 1u64 } else { md[0] };
        let mn = m.numer().clone();
        let denom_big = Int::from(self.denom) * Int::from(md);
        let denom = int_to_i64(&denom_big) as u64;
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, c)| (int_to_i64(&(Int::from(*k) * &mn)), c.clone()))
            .collect();
        let mut s = FracQSeries { denom, coeffs, prec: &self.prec * m };
        s.normalize();
        s
    }

    /// Keeps exactly the terms with integral exponent; `denom` becomes 1.
    pub fn integer_part(&self) -> Self {
        let d = self.denom as i64;
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(k, _)| *k % d == 0)
            .map(|(k, c)| (k / d, c.clone()))
            .collect();
        FracQSeries { denom: 1, coeffs, prec: self.prec.clone() }
    }

    /// Expands `prod_{n>=1} (1 - q^n)^{b(n)}` through `q^(prec-1)`, where
    /// `b(n) = exps[n-1]` (missing entries are zero). Exponents may be any
    /// rationals. The expansion is exact, so the result carries the
    /// requested precision.
    pub fn product_expansion(exps: &[Rat], prec: i64) -> Self {
        let nmax = (prec.max(0)) as usize;
        // q (log f)' = sum_N C_N q^N with C_N = -sum_{d | N} d * b(d)
        let mut c = vec![Rat::zero(); nmax + 1];
        for (i, b) in exps.iter().enumerate() {
            let d = i + 1;
            if b.is_zero() || d > nmax {
                continue;
            }
            let step = b * rat_i64(d as i64);
            let mut m = d;
            while m <= nmax {
                c[m] -= &step;
                m += d;
            }
        }
        exp_from_log_derivative(&c, prec)
    }

    /// The eta product `prod eta(m tau)^(r_m)` for `factors = [(m, r)]`,
    /// with exact fractional leading exponent `sum m*r/24`.
    pub fn eta_product(factors: &[(u64, i64)], prec: &Rat) -> Self {
        assert!(!factors.is_empty(), "eta_product needs at least one factor");
        let mut lead = Rat::zero();
        for (m, r) in factors {
            lead += Rat::new(Int::from(*m as i64 * *r), Int::from(24));
        }
        // expansion part needs exponents n with lead + n < prec
        let span = prec - &lead;
        let nmax = if span.is_positive() {
            int_to_i64(&span.ceil().numer().clone()) + 1
        } else {
            0
        };
        let mut c = vec![Rat::zero(); (nmax.max(0) as usize) + 1];
        for (m, r) in factors {
            let m = *m as usize;
            let mut d = m;
            while d < c.len() {
                // (1 - q^d) factors for d any multiple of m, exponent r
                let step = rat_i64((d * *r as usize) as i64);
                let mut n = d;
                while n < c.len() {
                    c[n] -= &step;
                    n += d;
                }
                d += m;
            }
        }
        let unit = exp_from_log_derivative(&c, nmax.max(0));
        unit.shift(&lead).truncated(prec.clone())
    }

    /// If `self = c * other` for a single nonzero rational `c` on the common
    /// precision, returns `c`. Zero series are proportional to anything.
    pub fn proportional_to(&self, other: &Self) -> Option<Rat> {
        let prec = self.prec.clone().min(other.prec.clone());
        let a = self.truncated(prec.clone());
        let b = other.truncated(prec);
        if a.is_zero() || b.is_zero() {
            return if a.is_zero() && b.is_zero() { Some(Rat::one()) } else { None };
        }
        let (ka, ca) = a.coeffs.iter().next().unwrap();
        let oa = Rat::new(Int::from(*ka), Int::from(a.denom));
        let cb = b.coeff(&oa)?;
        if cb.is_zero() {
            return None;
        }
        let c = ca / &cb;
        if a == b.scale(&c) {
            Some(c)
        } else {
            None
        }
    }

    /// Structured-text serialization with a bit-exact round trip.
    pub fn to_text(&self) -> String {
        let mut out = String::from("qseries v1\n");
        out.push_str(&format!("denom {}\n", self.denom));
        out.push_str(&format!("prec {}\n", rat_str(&self.prec)));
        for (k, c) in &self.coeffs {
            out.push_str(&format!("term {} {}\n", k, rat_str(c)));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut denom: Option<u64> = None;
        let mut prec: Option<Rat> = None;
        let mut terms = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let tag = it.next().unwrap();
            let err = |m: &str| Error::Parse(format!("line {}: {}", i + 1, m));
            match tag {
                "qseries" => {}
                "denom" => {
                    denom = Some(
                        it.next()
                            .ok_or_else(|| err("missing denom"))?
                            .parse()
                            .map_err(|_| err("bad denom"))?,
                    )
                }
                "prec" => {
                    prec = Some(parse_rat(it.next().ok_or_else(|| err("missing prec"))?)?)
                }
                "term" => {
                    let k: i64 = it
                        .next()
                        .ok_or_else(|| err("missing exponent"))?
                        .parse()
                        .map_err(|_| err("bad exponent"))?;
                    let c = parse_rat(it.next().ok_or_else(|| err("missing coefficient"))?)?;
                    terms.push((k, c));
                }
                _ => return Err(err(&format!("unknown tag {tag}"))),
            }
        }
        let denom = denom.ok_or_else(|| Error::Parse("missing denom".into()))?;
        let prec = prec.ok_or_else(|| Error::Parse("missing prec".into()))?;
        Ok(Self::new(denom, terms, prec))
    }
}

/// Solves `q g' = (sum_k c[k] q^k) g`, `g(0) = 1`, through `q^(prec-1)`.
fn exp_from_log_derivative(c: &[Rat], prec: i64) -> FracQSeries {
    let nmax = prec.max(0) as usize;
    let mut g = vec![Rat::zero(); nmax.max(1)];
    g[0] = Rat::one();
    for n in 1..g.len() {
        let mut acc = Rat::zero();
        for k in 1..=n.min(c.len() - 1) {
            if !c[k].is_zero() && !g[n - k].is_zero() {
                acc += &c[k] * &g[n - k];
            }
        }
        if !acc.is_zero() {
            g[n] = acc / rat_i64(n as i64);
        }
    }
    FracQSeries::from_int_terms(
        g.into_iter().enumerate().map(|(n, c)| (n as i64, c)).collect(),
        rat_i64(prec.max(0)),
    )
}

fn convolve_sparse(a: &[(i64, &Rat)], b: &[(i64, &Rat)], kmax: i64) -> BTreeMap<i64, Rat> {
    let mut out: BTreeMap<i64, Rat> = BTreeMap::new();
    for (ka, ca) in a {
        for (kb, cb) in b {
            let k = ka + kb;
            if k >= kmax {
                break;
            }
            let e = out.entry(k).or_insert_with(Rat::zero);
            *e += *ca * *cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Dense convolution over a common integer denominator. Much faster than
/// rational accumulation when both operands have large dense support.
fn convolve_dense(a: &[(i64, &Rat)], b: &[(i64, &Rat)], kmax: i64) -> BTreeMap<i64, Rat> {
    let (oa, va, da) = to_int_vec(a);
    let (ob, vb, db) = to_int_vec(b);
    let lo = oa + ob;
    if lo >= kmax {
        return BTreeMap::new();
    }
    let len = (kmax - lo) as usize;
    let mut acc = vec![Int::zero(); len];
    for (i, ca) in va.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        let jmax = len.saturating_sub(i).min(vb.len());
        for (j, cb) in vb.iter().enumerate().take(jmax) {
            if cb.is_zero() {
                continue;
            }
            acc[i + j] += ca * cb;
        }
    }
    let den = da * db;
    let mut out = BTreeMap::new();
    for (i, v) in acc.into_iter().enumerate() {
        if !v.is_zero() {
            out.insert(lo + i as i64, Rat::new(v, den.clone()));
        }
    }
    out
}

fn to_int_vec(a: &[(i64, &Rat)]) -> (i64, Vec<Int>, Int) {
    let lo = a.first().map(|(k, _)| *k).unwrap_or(0);
    let hi = a.last().map(|(k, _)| *k).unwrap_or(0);
    let mut den = Int::one();
    for (_, c) in a {
        den = den.lcm(c.denom());
    }
    let mut v = vec![Int::zero(); (hi - lo + 1) as usize];
    for (k, c) in a {
        v[(k - lo) as usize] = c.numer() * (&den / c.denom());
    }
    (lo, v, den)
}

pub(crate) fn int_to_i64(n: &Int) -> i64 {
    use num::ToPrimitive;
    n.to_i64().expect("exponent out of i64 range")
}

pub(crate) fn rat_str(r: &Rat) -> String {
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn parse_rat(s: &str) -> Result<Rat> {
    let bad = || Error::Parse(format!("bad rational: {s}"));
    match s.split_once('/') {
        None => {
            let n: Int = s.parse().map_err(|_| bad())?;
            Ok(Rat::from_integer(n))
        }
        Some((a, b)) => {
            let n: Int = a.parse().map_err(|_| bad())?;
            let d: Int = b.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
    }
}

impl fmt::Display for FracQSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        } else {
            for (i, (k, c)) in self.coeffs.iter().enumerate() {
                let neg = c.is_negative();
                if i == 0 {
                    if neg {
                        write!(f, "-")?;
                    }
                } else if neg {
                    write!(f, " - ")?;
                } else {
                    write!(f, " + ")?;
                }
                let a = c.abs();
                let e = Rat::new(Int::from(*k), Int::from(self.denom));
                if e.is_zero() {
                    write!(f, "{}", rat_str(&a))?;
                } else {
                    if !a.is_one() {
                        write!(f, "{}*", rat_str(&a))?;
                    }
                    if e.is_one() {
                        write!(f, "q")?;
                    } else if e.is_integer() {
                        write!(f, "q^{}", e.numer())?;
                    } else {
                        write!(f, "q^({})", rat_str(&e))?;
                    }
                }
            }
        }
        write!(f, " + O(q^{})", rat_str(&self.prec))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn s(terms: &[(i64, i64)], prec: i64) -> FracQSeries {
        FracQSeries::from_int_terms(
            terms.iter().map(|(k, c)| (*k, rat_i64(*c))).collect(),
            rat_i64(prec),
        )
    }

    #[test]
    fn add_basic() {
        // (1 + q) + (-1) = q
        let a = s(&[(0, 1), (1, 1)], 10);
        let b = s(&[(0, -1)], 10);
        assert_eq!(a.add(&b), s(&[(1, 1)], 10));
    }

    #[test]
    fn add_precision_rule() {
        // (q^-1 + 2, prec 5) + (q^4, prec 3) = q^-1 + 2 with prec 3
        let a = s(&[(-1, 1), (0, 2)], 5);
        let b = s(&[(4, 1)], 3);
        let c = a.add(&b);
        assert_eq!(c, s(&[(-1, 1), (0, 2)], 3));
        assert_eq!(*c.prec(), rat_i64(3));
    }

    #[test]
    fn mul_geometric() {
        // (1 - q) * (1 + q + q^2 + ...) = 1
        let a = s(&[(0, 1), (1, -1)], 30);
        let b = FracQSeries::from_int_terms(
            (0..30).map(|n| (n, Rat::one())).collect(),
            rat_i64(30),
        );
        let c = a.mul(&b);
        assert_eq!(c, FracQSeries::one(rat_i64(30)));
    }

    #[test]
    fn mul_pole_lowers_precision() {
        let a = s(&[(-2, 1)], 5); // q^-2, prec 5
        let b = s(&[(0, 1), (1, 1)], 5);
        let c = a.mul(&b);
        // unknown terms of b above q^5 shift down to q^3
        assert_eq!(*c.prec(), rat_i64(3));
    }

    #[test]
    fn pow_inverse_roundtrip() {
        let a = s(&[(0, 1), (1, -1)], 12);
        let inv = a.pow_int(-1).unwrap();
        let expect = FracQSeries::from_int_terms(
            (0..12).map(|n| (n, Rat::one())).collect(),
            rat_i64(12),
        );
        assert_eq!(inv, expect);
        let prod = a.mul(&inv);
        assert_eq!(prod, FracQSeries::one(prod.prec().clone()));
    }

    #[test]
    fn invert_zero_errors() {
        let z = FracQSeries::zero(rat_i64(5));
        assert!(matches!(z.pow_int(-1), Err(Error::InversionOfZeroSeries)));
    }

    #[test]
    fn eta_delta_prefix() {
        // Delta = eta(tau)^24 = q - 24q^2 + 252q^3 - 1472q^4 + 4830q^5 ...
        let d = FracQSeries::eta_product(&[(1, 24)], &rat_i64(6));
        for (n, c) in [(1, 1), (2, -24), (3, 252), (4, -1472), (5, 4830)] {
            assert_eq!(d.coeff_int(n).unwrap(), rat_i64(c), "Delta q^{n}");
        }
    }

    #[test]
    fn eta_fractional_lead() {
        // eta(tau)^2 eta(3tau)^2 = q^(1/3) (1 - 2q - q^2 + 5q^4 + 4q^5 - 7q^6 ...)
        let e = FracQSeries::eta_product(&[(1, 2), (3, 2)], &rat(22, 3));
        let expect = [(0, 1), (1, -2), (2, -1), (3, 0), (4, 5), (5, 4), (6, -7)];
        for (n, c) in expect {
            let exp = rat(1, 3) + rat_i64(n);
            assert_eq!(e.coeff(&exp).unwrap(), rat_i64(c), "at q^(1/3)*q^{n}");
        }
    }

    #[test]
    fn eta_s4_prefix() {
        // eta(tau)^4 eta(5tau)^4 = q - 4q^2 + 2q^3 + 8q^4 - 5q^5 ...
        let e = FracQSeries::eta_product(&[(1, 4), (5, 4)], &rat_i64(6));
        for (n, c) in [(1, 1), (2, -4), (3, 2), (4, 8), (5, -5)] {
            assert_eq!(e.coeff_int(n).unwrap(), rat_i64(c), "s4 q^{n}");
        }
    }

    #[test]
    fn gamma0_3_product_prefix() {
        // (1-q)^(-6) (1-q^2)^(21) (1-q^3)^(-76) (1-q^4)^(345) (1-q^5)^(-1734)
        // = 1 + 6q + 0q^2 + 6q^3 + 6q^4 + 0q^5 through q^5
        let exps = vec![
            rat_i64(-6),
            rat_i64(21),
            rat_i64(-76),
            rat_i64(345),
            rat_i64(-1734),
        ];
        let p = FracQSeries::product_expansion(&exps, 6);
        for (n, c) in [(0, 1), (1, 6), (2, 0), (3, 6), (4, 6), (5, 0)] {
            assert_eq!(p.coeff_int(n).unwrap(), rat_i64(c), "theta q^{n}");
        }
    }

    #[test]
    fn substitute_and_integer_part() {
        let a = s(&[(0, 1), (1, 1)], 10);
        let b = a.substitute_scale(&rat_i64(4));
        assert_eq!(b, s(&[(0, 1), (4, 1)], 40));
        let theta = FracQSeries::from_int_terms(
            vec![(0, rat_i64(1)), (1, rat_i64(2)), (4, rat_i64(2)), (9, rat_i64(2))],
            rat_i64(16),
        );
        let t5 = theta.substitute_scale(&rat(1, 5));
        assert_eq!(t5.coeff(&rat(1, 5)).unwrap(), rat_i64(2));
        assert_eq!(t5.coeff(&rat(4, 5)).unwrap(), rat_i64(2));
        assert_eq!(t5.coeff(&rat(9, 5)).unwrap(), rat_i64(2));
        let mixed = FracQSeries::new(
            5,
            vec![(0, rat_i64(1)), (1, rat_i64(2)), (5, rat_i64(3))],
            rat_i64(3),
        );
        assert_eq!(mixed.integer_part(), s(&[(0, 1), (1, 3)], 3));
    }

    #[test]
    fn text_roundtrip() {
        let a = FracQSeries::new(
            3,
            vec![(-4, rat(2, 1)), (0, rat(10, 1)), (5, rat(-7, 3))],
            rat(115, 7),
        );
        let b = FracQSeries::from_text(&a.to_text()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn proportionality() {
        let a = s(&[(1, 2), (2, -8), (3, 4)], 5);
        let b = s(&[(1, 1), (2, -4), (3, 2)], 5);
        assert_eq!(a.proportional_to(&b), Some(rat_i64(2)));
        let c = s(&[(1, 1), (2, -4), (3, 3)], 5);
        assert_eq!(a.proportional_to(&c), None);
    }
}
