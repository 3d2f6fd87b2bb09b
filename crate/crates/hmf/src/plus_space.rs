//! Weakly holomorphic plus-space forms for `(Gamma_0(p), chi_p)`:
//! principal parts, the obstruction pairing against weight-2 plus-space
//! cusp forms, and the solver that extends a principal part to its unique
//! full q-expansion.
//!
//! The solver works with the ansatz `F * Delta(p tau)^b` inside
//! `M_{12b}(Gamma_0(p), chi)`: the plus-space structure ties the pole
//! order at the other cusp to the coefficients `c(pn)`, so a single
//! `Delta(p tau)` factor per `ceil(M/p)` of pole depth suffices. The
//! solution is pinned down by the principal part together with the
//! plus-space vanishing conditions, solved exactly; uniqueness holds
//! because there are no holomorphic weight-0 forms with nontrivial
//! character. The computed expansion is then validated against the full
//! requested precision: principal part exact, plus-space support
//! everywhere.

use crate::classical::{self, DirichletChar};
use crate::qseries::{rat_str, FracQSeries};
use crate::{linalg, rat, rat_i64, Error, Rat, Result};
use num::{One, Signed, Zero};
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

/// A prescribed pole structure: `n -> c(-n)` for `n > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrincipalPart {
    p: u64,
    poles: BTreeMap<u64, Rat>,
}

impl PrincipalPart {
    /// Builds a principal part, checking plus-space support: poles may only
    /// sit at exponents `-n` with `chi_p(n) != -1`.
    pub fn new(p: u64, poles: BTreeMap<u64, Rat>) -> Result<Self> {
        let chi = DirichletChar::legendre(p);
        for (n, c) in &poles {
            if !c.is_zero() && chi.eval(*n as i64) == -1 {
                return Err(Error::SupportViolation(format!("-{n}")));
            }
        }
        let poles = poles.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(PrincipalPart { p, poles })
    }

    pub fn from_pairs(p: u64, pairs: &[(u64, i64)]) -> Result<Self> {
        Self::new(
            p,
            pairs.iter().map(|(n, c)| (*n, rat_i64(*c))).collect(),
        )
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn poles(&self) -> &BTreeMap<u64, Rat> {
        &self.poles
    }

    pub fn max_pole(&self) -> u64 {
        self.poles.keys().next_back().copied().unwrap_or(0)
    }

    /// `c(-n)` for `n > 0`.
    pub fn coeff(&self, n: u64) -> Rat {
        self.poles.get(&n).cloned().unwrap_or_else(Rat::zero)
    }

    /// `c(-n) * delta_p(n)`.
    pub fn tilde_coeff(&self, n: u64) -> Rat {
        self.coeff(n) * delta_p(self.p, -(n as i64))
    }

    /// Exact rational linear combination of principal parts.
    pub fn linear_combination(parts: &[(Rat, &PrincipalPart)]) -> Result<Self> {
        assert!(!parts.is_empty());
        let p = parts[0].1.p;
        let mut poles: BTreeMap<u64, Rat> = BTreeMap::new();
        for (c, pp) in parts {
            assert_eq!(pp.p, p, "mixed fields in combination");
            for (n, v) in &pp.poles {
                let e = poles.entry(*n).or_insert_with(Rat::zero);
                *e += c * v;
            }
        }
        Self::new(p, poles)
    }

    fn cache_key(&self, prec: i64) -> String {
        crate::cache::DiskCache::realize_key(self.p, &self.poles, prec)
    }
}

/// `delta_p(n) = 1` if `n = 0 mod p`, else `1/2`.
pub fn delta_p(p: u64, n: i64) -> Rat {
    if n.rem_euclid(p as i64) == 0 {
        Rat::one()
    } else {
        rat(1, 2)
    }
}

/// A fully expanded weakly holomorphic plus-space form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlusForm {
    p: u64,
    series: FracQSeries,
    principal: PrincipalPart,
}

impl PlusForm {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn series(&self) -> &FracQSeries {
        &self.series
    }

    pub fn principal(&self) -> &PrincipalPart {
        &self.principal
    }

    /// `c(n)` for any integer `n` (0 beyond the principal part below, None
    /// at or beyond the precision).
    pub fn coeff(&self, n: i64) -> Option<Rat> {
        self.series.coeff_int(n)
    }

    /// `c(n) * delta_p(n)`.
    pub fn tilde_coeff(&self, n: i64) -> Option<Rat> {
        self.coeff(n).map(|c| c * delta_p(self.p, n))
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(0).expect("constant term within precision")
    }

    /// Precision as an integer exponent bound.
    pub fn prec(&self) -> i64 {
        crate::qseries::int_to_i64(&self.series.prec().floor().numer().clone())
    }

    /// Linear combination of realized forms (the realization map is linear
    /// in the principal part, so this is again the realization of the
    /// combined principal part).
    pub fn linear_combination(parts: &[(Rat, &PlusForm)]) -> Result<Self> {
        assert!(!parts.is_empty());
        let p = parts[0].1.p;
        let mut series = FracQSeries::zero(parts[0].1.series.prec().clone());
        let pp_parts: Vec<(Rat, &PrincipalPart)> =
            parts.iter().map(|(c, f)| (c.clone(), &f.principal)).collect();
        for (c, f) in parts {
            assert_eq!(f.p, p, "mixed fields in combination");
            series = series.add(&f.series.scale(c));
        }
        Ok(PlusForm {
            p,
            series,
            principal: PrincipalPart::linear_combination(&pp_parts)?,
        })
    }

    /// Checks plus-space support over the whole stored expansion.
    pub fn validate_support(&self) -> Result<()> {
        let chi = DirichletChar::legendre(self.p);
        for (e, c) in self.series.terms() {
            if c.is_zero() {
                continue;
            }
            debug_assert!(e.is_integer());
            let n = crate::qseries::int_to_i64(e.numer());
            if chi.eval(n) == -1 {
                return Err(Error::SupportViolation(format!("{n}")));
            }
        }
        Ok(())
    }
}

/// `sum_{n>0} ctilde(-n) a(n)`: the pairing a principal part must
/// annihilate against every weight-2 plus-space cusp form to extend to a
/// weakly holomorphic form.
pub fn obstruction_pairing(pp: &PrincipalPart, cusp: &FracQSeries) -> Rat {
    let mut acc = Rat::zero();
    for (n, _) in pp.poles.iter() {
        let a = cusp
            .coeff_int(*n as i64)
            .unwrap_or_else(|| panic!("cusp form precision too low for pole {n}"));
        acc += pp.tilde_coeff(*n) * a;
    }
    acc
}

/// Shared expensive state: spanning subsets per `(p, weight, prec)`,
/// obstruction spaces, realized forms, and the optional disk cache.
pub struct Workspace {
    subsets: RefCell<HashMap<(u64, u32, i64), Rc<Vec<FracQSeries>>>>,
    obstruction: RefCell<HashMap<(u64, i64), Rc<Vec<FracQSeries>>>>,
    realized: RefCell<HashMap<String, PlusForm>>,
    pub disk: crate::cache::DiskCache,
}

impl Default for Workspace {
    fn default() -> Self {
        Self::new()
    }
}

impl Workspace {
    pub fn new() -> Self {
        Workspace {
            subsets: RefCell::new(HashMap::new()),
            obstruction: RefCell::new(HashMap::new()),
            realized: RefCell::new(HashMap::new()),
            disk: crate::cache::DiskCache::from_env(),
        }
    }

    pub fn with_disk_cache(dir: std::path::PathBuf) -> Self {
        let mut w = Self::new();
        w.disk = crate::cache::DiskCache::at(dir);
        w
    }

    fn subset(&self, p: u64, weight: u32, prec: i64) -> Result<Rc<Vec<FracQSeries>>> {
        let key = (p, weight, prec);
        if let Some(v) = self.subsets.borrow().get(&key) {
            return Ok(v.clone());
        }
        let chi = DirichletChar::legendre(p);
        let v = Rc::new(classical::spanning_subset(p, weight, &chi, prec)?);
        self.subsets.borrow_mut().insert(key, v.clone());
        Ok(v)
    }

    /// Basis of the weight-2 plus-space cusp forms `S_2^+(Gamma_0(p), chi)`,
    /// normalized with leading coefficient 1 when one-dimensional.
    pub fn obstruction_space(&self, p: u64, prec: i64) -> Result<Rc<Vec<FracQSeries>>> {
        let key = (p, prec);
        if let Some(v) = self.obstruction.borrow().get(&key) {
            return Ok(v.clone());
        }
        let v = Rc::new(compute_obstruction_space(self, p, prec)?);
        self.obstruction.borrow_mut().insert(key, v.clone());
        Ok(v)
    }

    /// The unique weakly holomorphic plus-space form with the given
    /// principal part, expanded through `q^(prec-1)`.
    pub fn realize(&self, pp: &PrincipalPart, prec: i64) -> Result<PlusForm> {
        let key = pp.cache_key(prec);
        if let Some(f) = self.realized.borrow().get(&key) {
            return Ok(f.clone());
        }
        if let Some(series) = self.disk.load(&key) {
            let f = PlusForm { p: pp.p, series, principal: pp.clone() };
            if f.validate_support().is_ok() && principal_matches(&f) {
                self.realized.borrow_mut().insert(key, f.clone());
                return Ok(f);
            }
        }
        let f = realize_uncached(self, pp, prec)?;
        self.disk.store(&key, &f.series)?;
        self.realized.borrow_mut().insert(key, f.clone());
        Ok(f)
    }
}

fn principal_matches(f: &PlusForm) -> bool {
    let mut seen: BTreeMap<u64, Rat> = BTreeMap::new();
    for (e, c) in f.series.terms() {
        if e.is_negative() {
            seen.insert((-crate::qseries::int_to_i64(e.numer())) as u64, c.clone());
        }
    }
    seen == *f.principal.poles()
}

fn realize_uncached(ws: &Workspace, pp: &PrincipalPart, prec: i64) -> Result<PlusForm> {
    let p = pp.p;
    // obstruction check against every weight-2 plus-space cusp form
    let obs_prec = pp.max_pole() as i64 + 2;
    for cusp in ws.obstruction_space(p, obs_prec)?.iter() {
        let pairing = obstruction_pairing(pp, cusp);
        if !pairing.is_zero() {
            return Err(Error::Obstructed(rat_str(&pairing)));
        }
    }
    let m = pp.max_pole();
    let b = m.div_ceil(p).max(1) as u32;
    match realize_with_ansatz(ws, pp, prec, b) {
        Ok(f) => Ok(f),
        // one deeper ansatz covers any unexpectedly deep pole at the
        // other cusp before giving up
        Err(Error::Inconsistent(_)) => realize_with_ansatz(ws, pp, prec, b + 1),
        Err(e) => Err(e),
    }
}

fn realize_with_ansatz(ws: &Workspace, pp: &PrincipalPart, prec: i64, b: u32) -> Result<PlusForm> {
    let p = pp.p;
    let chi = DirichletChar::legendre(p);
    let weight = 12 * b;
    let pb = (p as i64) * (b as i64);
    let sturm = classical::sturm_bound(p, weight);

    // probe the dimension cheaply, then size the solve precision so the
    // scan below the precision horizon finds enough vanishing conditions
    let dim = ws.subset(p, weight, sturm + 16)?.len();
    let need = dim + 24;
    let avail_needed = (need as i64) * 2 * (p as i64) / (p as i64 - 1) + 16;
    let solve_prec = 2 * pb + avail_needed;
    let basis_low = ws.subset(p, weight, solve_prec)?;

    let dp = classical::delta(solve_prec)
        .substitute_scale(&rat_i64(p as i64))
        .truncated(rat_i64(solve_prec))
        .pow_int(b as i64)
        .expect("positive power");
    let dp_inv = dp.pow_int(-1).expect("Delta(p tau)^b is invertible");

    // target coefficients of h = F * Delta(p tau)^b below q^(pb) come from
    // the principal part alone
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let mut rhs: Vec<Rat> = Vec::new();
    for j in 0..pb {
        let mut want = Rat::zero();
        for (n, c) in pp.poles() {
            let idx = j + *n as i64;
            if let Some(dv) = dp.coeff_int(idx) {
                want += c * dv;
            }
        }
        rows.push(
            basis_low
                .iter()
                .map(|f| f.coeff_int(j).expect("within solve precision"))
                .collect(),
        );
        rhs.push(want);
    }
    // plus-space vanishing conditions on F = h / Delta(p tau)^b, scanned
    // only over exponents that every column actually knows
    let f_low: Vec<FracQSeries> = basis_low.iter().map(|h| h.mul(&dp_inv)).collect();
    let avail = f_low
        .iter()
        .map(|f| crate::qseries::int_to_i64(&f.prec().floor().numer().clone()))
        .min()
        .unwrap_or(0);
    let mut n = 0i64;
    let mut added = 0usize;
    while added < need {
        if n >= avail {
            return Err(Error::PrecisionTooLow(format!(
                "only {added} plus-space conditions available below q^{avail}"
            )));
        }
        if chi.eval(n) == -1 {
            rows.push(
                f_low
                    .iter()
                    .map(|f| f.coeff_int(n).expect("within available precision"))
                    .collect(),
            );
            rhs.push(Rat::zero());
            added += 1;
        }
        n += 1;
    }
    let x = linalg::solve_unique(&rows, &rhs)?;

    // full evaluation
    let full_prec = prec + pb;
    let basis_full = ws.subset(p, weight, full_prec)?;
    let mut h = FracQSeries::zero(rat_i64(full_prec));
    for (xi, f) in x.iter().zip(basis_full.iter()) {
        if !xi.is_zero() {
            h = h.add(&f.scale(xi));
        }
    }
    let dp_full = classical::delta(full_prec)
        .substitute_scale(&rat_i64(p as i64))
        .truncated(rat_i64(full_prec))
        .pow_int(b as i64)
        .expect("positive power");
    let series = h
        .mul(&dp_full.pow_int(-1).expect("invertible"))
        .truncated(rat_i64(prec));
    let form = PlusForm { p, series, principal: pp.clone() };
    if !principal_matches(&form) {
        return Err(Error::Inconsistent(
            "realized expansion does not match the principal part".into(),
        ));
    }
    form.validate_support()?;
    Ok(form)
}

fn compute_obstruction_space(ws: &Workspace, p: u64, prec: i64) -> Result<Vec<FracQSeries>> {
    let chi = DirichletChar::legendre(p);
    let weight = 14;
    let sturm = classical::sturm_bound(p, weight);
    let dim = ws.subset(p, weight, sturm + 16)?.len();
    let need = dim + 24;
    let avail_needed = (need as i64) * 2 * (p as i64) / (p as i64 - 1) + 16;
    let solve_prec = (2 * (p as i64) + avail_needed).max(prec + 2 * p as i64);
    let basis = ws.subset(p, weight, solve_prec)?;
    let dp_inv = classical::delta(solve_prec)
        .substitute_scale(&rat_i64(p as i64))
        .truncated(rat_i64(solve_prec))
        .pow_int(-1)
        .expect("invertible");
    let f_forms: Vec<FracQSeries> = basis.iter().map(|h| h.mul(&dp_inv)).collect();
    let avail = f_forms
        .iter()
        .map(|f| crate::qseries::int_to_i64(&f.prec().floor().numer().clone()))
        .min()
        .unwrap_or(0);

    let mut rows: Vec<Vec<Rat>> = Vec::new();
    // vanishing to order p+1 at infinity: h_j = 0 for j <= p
    for j in 0..=(p as i64) {
        rows.push(
            basis
                .iter()
                .map(|f| f.coeff_int(j).expect("within solve precision"))
                .collect(),
        );
    }
    // plus-space support of F = h / Delta(p tau), scanned only over
    // exponents every column knows
    let mut n = 1i64;
    let mut added = 0usize;
    while added < need {
        if n >= avail {
            return Err(Error::PrecisionTooLow(format!(
                "only {added} plus-space conditions available below q^{avail}"
            )));
        }
        if chi.eval(n) == -1 {
            rows.push(
                f_forms
                    .iter()
                    .map(|f| f.coeff_int(n).expect("within available precision"))
                    .collect(),
            );
            added += 1;
        }
        n += 1;
    }
    let kernel = linalg::kernel(&rows, dim);
    let mut out = Vec::new();
    for v in kernel {
        let mut f = FracQSeries::zero(rat_i64(solve_prec));
        for (c, b) in v.iter().zip(basis.iter()) {
            if !c.is_zero() {
                f = f.add(&b.scale(c));
            }
        }
        let cusp = f.mul(&dp_inv).truncated(rat_i64(prec));
        out.push(cusp);
    }
    // normalize leading coefficients to 1
    for f in out.iter_mut() {
        if let Some(o) = f.ord() {
            let lead = f.coeff(&o).unwrap();
            *f = f.scale(&lead.recip());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_part_support_checked() {
        // chi_29(2) = -1: a pole at q^{-2} is not allowed
        assert!(matches!(
            PrincipalPart::from_pairs(29, &[(2, 2)]),
            Err(Error::SupportViolation(_))
        ));
        let pp = PrincipalPart::from_pairs(29, &[(4, 2), (1, 6)]).unwrap();
        assert_eq!(pp.max_pole(), 4);
        assert_eq!(pp.tilde_coeff(4), rat_i64(1));
        assert_eq!(pp.tilde_coeff(1), rat_i64(3));
        assert_eq!(pp.tilde_coeff(7), rat_i64(0));
        // n = p itself is allowed (chi = 0) and keeps full weight
        let pp29 = PrincipalPart::from_pairs(29, &[(29, 1), (1, 6)]).unwrap();
        assert_eq!(pp29.tilde_coeff(29), rat_i64(1));
    }

    #[test]
    fn obstruction_space_p5_empty_p29_printed() {
        let ws = Workspace::new();
        assert!(ws.obstruction_space(5, 20).unwrap().is_empty());

        let obs = ws.obstruction_space(29, 20).unwrap();
        assert_eq!(obs.len(), 1, "unique weight-2 plus-space cusp form");
        let f = &obs[0];
        let expect: &[(i64, i64)] = &[
            (1, 1),
            (2, 0),
            (3, 0),
            (4, -3),
            (5, -3),
            (6, 5),
            (7, 2),
            (8, 0),
            (9, -2),
            (13, -1),
            (16, -1),
        ];
        for (n, c) in expect {
            assert_eq!(f.coeff_int(*n).unwrap(), rat_i64(*c), "cusp form q^{n}");
        }
    }

    #[test]
    fn obstruction_space_p37_printed() {
        let ws = Workspace::new();
        let obs = ws.obstruction_space(37, 14).unwrap();
        assert_eq!(obs.len(), 1);
        let f = &obs[0];
        let expect: &[(i64, i64)] = &[
            (1, 1),
            (2, 0),
            (3, -1),
            (4, -2),
            (7, 3),
            (9, -2),
            (10, 4),
            (11, -3),
            (12, 2),
        ];
        for (n, c) in expect {
            assert_eq!(f.coeff_int(*n).unwrap(), rat_i64(*c), "cusp form q^{n}");
        }
    }

    #[test]
    fn pairing_examples() {
        let ws = Workspace::new();
        let obs = ws.obstruction_space(29, 10).unwrap();
        let pp = PrincipalPart::from_pairs(29, &[(4, 2), (1, 6)]).unwrap();
        // 3*a(1) + 1*a(4) = 3 - 3 = 0
        assert_eq!(obstruction_pairing(&pp, &obs[0]), rat_i64(0));
        let empty = PrincipalPart::from_pairs(29, &[]).unwrap();
        assert_eq!(obstruction_pairing(&empty, &obs[0]), rat_i64(0));
        // an unrealizable principal part: single simple pole at q^{-1}
        let bad = PrincipalPart::from_pairs(29, &[(1, 1)]).unwrap();
        assert_eq!(obstruction_pairing(&bad, &obs[0]), rat(1, 2));
        assert!(matches!(ws.realize(&bad, 10), Err(Error::Obstructed(_))));
    }

    #[test]
    fn realize_gundlach_input_p5() {
        // poles {1: 2} realizes the classical weight-5 product input:
        // 2q^-1 + 10 + 22q - 108q^4 + 110q^5 + 88q^6 - 790q^9 + 680q^10
        let ws = Workspace::new();
        let pp = PrincipalPart::from_pairs(5, &[(1, 2)]).unwrap();
        let f = ws.realize(&pp, 12).unwrap();
        let expect: &[(i64, i64)] = &[
            (-1, 2),
            (0, 10),
            (1, 22),
            (2, 0),
            (3, 0),
            (4, -108),
            (5, 110),
            (6, 88),
            (7, 0),
            (9, -790),
            (10, 680),
        ];
        for (n, c) in expect {
            assert_eq!(f.coeff(*n).unwrap(), rat_i64(*c), "F q^{n}");
        }
        f.validate_support().unwrap();
    }

    #[test]
    fn realize_is_linear() {
        let ws = Workspace::new();
        let pp1 = PrincipalPart::from_pairs(37, &[(3, 2), (1, 2)]).unwrap();
        let pp2 = PrincipalPart::from_pairs(37, &[(4, 2), (1, 4)]).unwrap();
        let f1 = ws.realize(&pp1, 16).unwrap();
        let f2 = ws.realize(&pp2, 16).unwrap();
        let sum_pp = PrincipalPart::linear_combination(&[
            (rat_i64(1), &pp1),
            (rat_i64(1), &pp2),
        ])
        .unwrap();
        let f12 = ws.realize(&sum_pp, 16).unwrap();
        let combo = PlusForm::linear_combination(&[(rat_i64(1), &f1), (rat_i64(1), &f2)]).unwrap();
        assert_eq!(f12.series(), combo.series());
    }
}
