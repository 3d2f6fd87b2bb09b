//! The two Borcherds product constructions and their interplay:
//!
//! - products on `Gamma_0(l)` expanded from half-integral-weight inputs:
//!   `Psi_f = q^A prod (1 - q^n)^(btilde(n^2))`;
//! - restrictions of Hilbert Borcherds products to the curve of a totally
//!   positive `lambda`, computed directly by lattice enumeration, with the
//!   half-integral input recovered independently by theta contraction.
//!
//! Divisors, cusp-form status, Heegner divisor analysis on `Gamma_0(l)`,
//! and the resolution of leading exponents (Weyl vectors) live here too.

use crate::classical::index_gamma0;
use crate::plus_space::{delta_p, PlusForm};
use crate::qseries::{int_to_i64, FracQSeries};
use crate::quadfield::{FieldElement, QuadField};
use crate::{rat, rat_i64, Error, Int, Rat, Result};
use num::{One, Signed, Zero};
use std::collections::BTreeMap;

/// A Borcherds product on the Hilbert modular surface, described by its
/// weakly holomorphic input form.
#[derive(Clone, Debug)]
pub struct ProductSpec {
    pub name: String,
    pub input: PlusForm,
    /// Reference interior points of the Weyl chamber used for relation
    /// checking; leading exponents at other curves are resolved per call.
    pub chamber_ref: Vec<FieldElement>,
}

impl ProductSpec {
    pub fn new(name: impl Into<String>, input: PlusForm, chamber_ref: Vec<FieldElement>) -> Self {
        ProductSpec { name: name.into(), input, chamber_ref }
    }

    /// Weight `c(0)/2`.
    pub fn weight(&self) -> Rat {
        self.input.constant_term() / rat_i64(2)
    }
}

/// The divisor as the sparse map `n -> ctilde(-n)`.
pub fn divisor_of(input: &PlusForm) -> BTreeMap<u64, Rat> {
    let pp = input.principal();
    pp.poles()
        .keys()
        .map(|n| (*n, pp.tilde_coeff(*n)))
        .collect()
}

/// Effective vanishing order along the curve of discriminant `n`:
/// `sum_m ctilde(-n m^2)`.
pub fn effective_order(input: &PlusForm, n: u64) -> Rat {
    let pp = input.principal();
    let mut acc = Rat::zero();
    let mut m = 1u64;
    while n * m * m <= pp.max_pole() {
        acc += pp.tilde_coeff(n * m * m);
        m += 1;
    }
    acc
}

/// A holomorphic product has nonnegative integral effective orders on
/// every curve in its divisor.
pub fn is_holomorphic(input: &PlusForm) -> bool {
    input.principal().poles().keys().all(|n| {
        let e = effective_order(input, *n);
        e.is_integer() && !e.is_negative()
    })
}

/// Remark-level cusp criterion: a holomorphic product is a cusp form when
/// some pole exponent is the norm of an integer of the field.
pub fn is_cusp_form(field: &QuadField, input: &PlusForm) -> bool {
    input
        .principal()
        .poles()
        .keys()
        .any(|n| field.is_norm(*n))
}

/// Theta contraction: the half-integral input `f` of the restricted
/// product, with `b(m) = sum_r ctilde((m p - r^2)/(4 l))`; coefficients of
/// `F` are not halved when `l = p`.
pub fn theta_contract(input: &PlusForm, ell: u64, prec: i64) -> Result<FracQSeries> {
    let p = input.p();
    let nf = input.prec();
    // b(m) is determined only while the deepest index m p / (4 l) is known
    let max_prec = (4 * ell as i64 * nf) / (p as i64);
    if prec > max_prec {
        return Err(Error::PrecisionTooLow(format!(
            "theta contraction to q^{prec} needs the input through q^{}",
            (prec * p as i64 + 4 * ell as i64 - 1) / (4 * ell as i64) + 1
        )));
    }
    let m_pole = input.principal().max_pole() as i64;
    let m_min = -(4 * (ell as i64) * m_pole) / (p as i64) - 1;
    let mut terms: Vec<(i64, Rat)> = Vec::new();
    for m in m_min..prec {
        let mut acc = Rat::zero();
        // r^2 <= m p + 4 l M
        let r2max = m * p as i64 + 4 * (ell as i64) * m_pole;
        if r2max < 0 {
            continue;
        }
        let rmax = Int::from(r2max).sqrt();
        let rmax = int_to_i64(&rmax);
        for r in -rmax..=rmax {
            let num = m * p as i64 - r * r;
            if num.rem_euclid(4 * ell as i64) != 0 {
                continue;
            }
            let idx = num / (4 * ell as i64);
            let c = input
                .coeff(idx)
                .ok_or_else(|| Error::PrecisionTooLow(format!("input coefficient {idx}")))?;
            if c.is_zero() {
                continue;
            }
            if ell == p {
                acc += c;
            } else {
                acc += c * delta_p(p, idx);
            }
        }
        if !acc.is_zero() {
            terms.push((m, acc));
        }
    }
    let f = FracQSeries::from_int_terms(terms, rat_i64(prec));
    check_kohnen_support(&f, ell)?;
    Ok(f)
}

/// Same contraction computed through the series operations (scale the
/// exponents, multiply by `theta(tau/p)`, keep integer exponents); used to
/// cross-check the direct coefficient formula.
pub fn theta_contract_series(input: &PlusForm, ell: u64, prec: i64) -> Result<FracQSeries> {
    let p = input.p();
    let nf = input.prec();
    let mut scaled_terms: Vec<(i64, Rat)> = Vec::new();
    for n in -(input.principal().max_pole() as i64)..nf {
        let c = input.coeff(n).unwrap();
        if c.is_zero() {
            continue;
        }
        let cc = if ell == p { c } else { c * delta_p(p, n) };
        scaled_terms.push((n, cc));
    }
    let halved = FracQSeries::from_int_terms(scaled_terms, rat_i64(nf));
    let scaled = halved.substitute_scale(&rat(4 * ell as i64, p as i64));
    // theta(tau / p) far enough that all integer exponents below prec are complete
    let theta_prec = &rat_i64(prec) - scaled.ord().unwrap_or_else(Rat::zero);
    let theta_prec_int = int_to_i64(&theta_prec.ceil().numer().clone()).max(1) * p as i64 + 1;
    let mut theta_terms = vec![(0i64, Rat::one())];
    let mut r = 1i64;
    while r * r < theta_prec_int {
        theta_terms.push((r * r, rat_i64(2)));
        r += 1;
    }
    let theta = FracQSeries::from_int_terms(theta_terms, rat_i64(theta_prec_int))
        .substitute_scale(&rat(1, p as i64));
    let f = scaled.mul(&theta).integer_part().truncated(rat_i64(prec));
    check_kohnen_support(&f, ell)?;
    Ok(f)
}

/// Plus-space support in `A_l`: coefficients vanish unless the exponent is
/// a square modulo `4l`.
pub fn check_kohnen_support(f: &FracQSeries, ell: u64) -> Result<()> {
    let m = 4 * ell as i64;
    let squares: std::collections::BTreeSet<i64> = (0..m).map(|r| (r * r) % m).collect();
    for (e, c) in f.terms() {
        if c.is_zero() {
            continue;
        }
        let n = int_to_i64(e.numer());
        if !squares.contains(&n.rem_euclid(m)) {
            return Err(Error::SupportViolation(format!("{n} mod {m}")));
        }
    }
    Ok(())
}

/// `Psi_f(tau) = q^A prod_{n>=1} (1 - q^n)^(btilde(n^2))` with
/// `btilde(n) = b(n) delta_l(n)`.
pub fn gamma0_lift(f: &FracQSeries, ell: u64, leading: &Rat, prec: i64) -> Result<FracQSeries> {
    let mut exps = Vec::new();
    for n in 1..prec.max(1) {
        let idx = n * n;
        let b = f
            .coeff_int(idx)
            .ok_or_else(|| Error::PrecisionTooLow(format!("input coefficient {idx}")))?;
        exps.push(b * delta_p(ell, idx));
    }
    Ok(FracQSeries::product_expansion(&exps, prec).shift(leading))
}

/// Restriction of the Hilbert Borcherds product of `input` to the curve of
/// `lambda`, as `q^A prod (1-q^n)^(btilde(n^2))` with
/// `btilde(n^2) = sum_{Tr(lambda nu) = n} ctilde(p N(nu))`.
///
/// When the curve lies in the divisor (positive wall order) the zero
/// series is returned. A vanishing wall order with nonzero wall terms only
/// changes the result by a nonzero constant, which restriction identities
/// do not see.
pub fn restrict_product(
    field: &QuadField,
    input: &PlusForm,
    lambda: &FieldElement,
    leading: &Rat,
    prec: i64,
) -> Result<FracQSeries> {
    let p = field.p();
    assert_eq!(p, input.p());
    let ell = lambda.norm();
    assert!(ell.is_integer() && ell.is_positive());
    let ell_i = int_to_i64(ell.numer());
    let m_pole = input.principal().max_pole() as i64;
    match wall_order(field, input, lambda) {
        o if o.is_positive() => return Ok(FracQSeries::zero(rat_i64(prec))),
        o if o.is_negative() => {
            return Err(Error::Inconsistent(format!(
                "restriction of {} has a pole along the curve",
                ell_i
            )))
        }
        _ => {}
    }
    // precision demand: slice indices reach p n^2 / (4 l)
    let nmax = prec - 1;
    let needed = (p as i64) * nmax * nmax / (4 * ell_i) + 1;
    if input.prec() < needed {
        return Err(Error::PrecisionTooLow(format!(
            "restriction to q^{prec} at norm {ell_i} needs the input through q^{needed}"
        )));
    }
    let mut exps = Vec::new();
    for n in 1..prec.max(1) {
        let mut acc = Rat::zero();
        for nu in field.enumerate_trace_slice(lambda, n, -m_pole) {
            let c = input
                .coeff(nu.pnorm)
                .ok_or_else(|| Error::PrecisionTooLow(format!("input coefficient {}", nu.pnorm)))?;
            if !c.is_zero() {
                acc += c * delta_p(p, nu.pnorm);
            }
        }
        exps.push(acc);
    }
    Ok(FracQSeries::product_expansion(&exps, prec).shift(leading))
}

/// Total `ctilde`-order of the wall factors orthogonal to `lambda`
/// (one representative per `+-` pair, `nu = 0` excluded).
pub fn wall_order(field: &QuadField, input: &PlusForm, lambda: &FieldElement) -> Rat {
    let m_pole = input.principal().max_pole() as i64;
    let mut acc = Rat::zero();
    for nu in field.enumerate_trace_slice(lambda, 0, -m_pole) {
        if nu.u == 0 && nu.v == 0 {
            continue;
        }
        // count each +-pair once: keep the representative with u > 0 or
        // (u == 0 and v > 0)
        if nu.u < 0 || (nu.u == 0 && nu.v < 0) {
            continue;
        }
        if nu.pnorm >= 0 {
            continue; // only negative indices contribute wall factors
        }
        if let Some(c) = input.coeff(nu.pnorm) {
            if !c.is_zero() {
                acc += c * delta_p(field.p(), nu.pnorm);
            }
        }
    }
    acc
}

/// One group of Heegner points on `X_0(level)` sharing a minimal
/// discriminant and stabilizer order.
#[derive(Clone, Debug, PartialEq)]
pub struct HeegnerClassCount {
    pub level: u64,
    pub disc: i64,
    pub count: usize,
    /// `1/e` for stabilizer order `e` (1, 1/2 or 1/3).
    pub elliptic_weight: Rat,
    /// Vanishing order of the product at each of these points.
    pub order: Rat,
}

/// Heegner divisor analysis of the product attached to `f` on
/// `Gamma_0(level)`: for every class of points with nonzero order
/// `sum_m ctilde(m^2 D)`, the class count and stabilizer weight.
pub fn heegner_orders(f: &FracQSeries, level: u64) -> Vec<HeegnerClassCount> {
    let max_pole = f
        .ord()
        .map(|o| (-int_to_i64(&o.floor().numer().clone())).max(0))
        .unwrap_or(0);
    let mut out: Vec<HeegnerClassCount> = Vec::new();
    if max_pole == 0 {
        return out;
    }
    let order_at = |d: i64| -> Rat {
        let mut acc = Rat::zero();
        let mut m = 1i64;
        while m * m * (-d) <= max_pole {
            let idx = m * m * d;
            if let Some(c) = f.coeff_int(idx) {
                if !c.is_zero() {
                    acc += c * delta_p(level, idx);
                }
            }
            m += 1;
        }
        acc
    };
    // points are indexed by a primitive discriminant D' and an orbit of
    // P^1(Z/level) positions; the minimal level|a discriminant at the point
    // is g^2 D' where g collects the primes of `level` missing the form
    let p1 = p1_classes(level);
    for dp in (-max_pole..0).filter(|d| d.rem_euclid(4) == 0 || d.rem_euclid(4) == 1) {
        for q0 in reduced_primitive_forms(dp) {
            let auts = proper_automorphs(&q0, dp);
            let mut seen: Vec<(u64, u64)> = Vec::new();
            for v in &p1 {
                if seen.contains(v) {
                    continue;
                }
                // orbit of v under the automorph action
                let mut orbit = vec![*v];
                for a in &auts {
                    let w = p1_canonical(apply_mat(a, *v, level), level);
                    if !orbit.contains(&w) {
                        orbit.push(w);
                    }
                }
                seen.extend(orbit.iter().copied());
                let e = (auts.len() + 1) / orbit.len();
                let g: u64 = prime_factors(level)
                    .into_iter()
                    .filter(|q| eval_form(&q0, *v, *q) % q != 0)
                    .product();
                let dmin = (g * g) as i64 * dp;
                let order = order_at(dmin);
                if order.is_zero() {
                    continue;
                }
                let weight = rat(1, e as i64);
                if let Some(entry) = out.iter_mut().find(|h| {
                    h.disc == dmin && h.elliptic_weight == weight && h.order == order
                }) {
                    entry.count += 1;
                } else {
                    out.push(HeegnerClassCount {
                        level,
                        disc: dmin,
                        count: 1,
                        elliptic_weight: weight,
                        order,
                    });
                }
            }
        }
    }
    out
}

/// How a leading exponent was produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeadingTier {
    /// Valence bookkeeping on `Gamma_0(l)` for `l = 1` or prime.
    Valence,
    /// Weyl vector solved from two prime-norm curves inside the chamber.
    WeylVector(String),
}

/// Resolves the leading exponent `A = Tr(lambda h_W)` of the restriction.
///
/// For `N(lambda)` equal to 1 or a prime the valence identity on
/// `Gamma_0(l)` determines `A` directly (the product is an eigenform of
/// the Fricke involution, so the two cusps carry equal orders). For
/// composite norms the Weyl vector of the chamber containing
/// `chamber_ref` is solved from two independent prime-norm curves inside
/// that chamber and `A` is read off as a trace.
pub fn resolve_leading(
    field: &QuadField,
    spec: &ProductSpec,
    lambda: &FieldElement,
) -> Result<(Rat, LeadingTier)> {
    let ell = lambda.norm();
    let ell_i = int_to_i64(ell.numer()) as u64;
    if ell_i == 1 || is_prime(ell_i) {
        return Ok((valence_leading(field, &spec.input, lambda)?, LeadingTier::Valence));
    }
    // Weyl-vector route
    let walls: Vec<u64> = spec
        .input
        .principal()
        .poles()
        .keys()
        .copied()
        .collect();
    let anchors = prime_anchors_in_chamber(field, &walls, &spec.chamber_ref, 2)?;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut names = Vec::new();
    for mu in &anchors {
        let a = valence_leading(field, &spec.input, mu)?;
        // Tr(mu (x + y sqrt p)) = 2 a_mu x + 2 p b_mu y
        rows.push(vec![
            rat_i64(2) * &mu.a,
            rat_i64(2 * field.p() as i64) * &mu.b,
        ]);
        rhs.push(a);
        names.push(format!("norm {}", mu.norm()));
    }
    let h = crate::linalg::solve_unique(&rows, &rhs).map_err(|e| {
        Error::UnresolvableLeadingExponent(format!("Weyl vector solve failed: {e}"))
    })?;
    let a = rat_i64(2) * &lambda.a * &h[0] + rat_i64(2 * field.p() as i64) * &lambda.b * &h[1];
    Ok((a, LeadingTier::WeylVector(names.join(", "))))
}

/// Leading exponent via the valence formula on `Gamma_0(l)`, `l = 1` or
/// prime: `2A + sum(order / e) = w * index / 12` (one cusp when `l = 1`).
fn valence_leading(_field: &QuadField, input: &PlusForm, lambda: &FieldElement) -> Result<Rat> {
    let ell = int_to_i64(lambda.norm().numer()) as u64;
    // contraction only needs the principal part plus a couple of terms
    let f = theta_contract(input, ell, 2)?;
    let w = input.constant_term(); // restriction weight = c(0)
    let classes = heegner_orders(&f, ell);
    let mut interior = Rat::zero();
    for h in &classes {
        interior += &h.order * &h.elliptic_weight * rat_i64(h.count as i64);
    }
    let valence = w * rat_i64(index_gamma0(ell) as i64) / rat_i64(12);
    let a = if ell == 1 {
        valence - interior
    } else {
        (valence - interior) / rat_i64(2)
    };
    Ok(a)
}

/// Finds `count` pairwise non-proportional totally positive elements of
/// norm 1 or prime lying strictly inside the chamber of all reference
/// points (with respect to the given wall norms).
fn prime_anchors_in_chamber(
    field: &QuadField,
    wall_norms: &[u64],
    refs: &[FieldElement],
    count: usize,
) -> Result<Vec<FieldElement>> {
    let mut found: Vec<FieldElement> = Vec::new();
    let eps2 = field.unit_sq();
    let eps2_inv = eps2.conj();
    for norm in 1..400u64 {
        if norm != 1 && !is_prime(norm) {
            continue;
        }
        for rep in field.norm_n_orbits(norm) {
            // scan a few unit translates of the orbit representative
            let mut shifted = vec![rep.clone()];
            let mut up = rep.clone();
            let mut down = rep.clone();
            for _ in 0..4 {
                up = up.mul(&eps2);
                down = down.mul(&eps2_inv);
                shifted.push(up.clone());
                shifted.push(down.clone());
            }
            for mu in shifted {
                if field.on_wall(wall_norms, &mu) {
                    continue;
                }
                if !refs
                    .iter()
                    .all(|r| field.same_chamber(wall_norms, r, &mu))
                {
                    continue;
                }
                if found
                    .iter()
                    .any(|f| (&f.a * &mu.b - &f.b * &mu.a).is_zero())
                {
                    continue;
                }
                found.push(mu);
                if found.len() == count {
                    return Ok(found);
                }
            }
        }
    }
    Err(Error::UnresolvableLeadingExponent(format!(
        "found only {} prime-norm anchors in the chamber",
        found.len()
    )))
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut m = n;
    let mut q = 2;
    while q * q <= m {
        if m % q == 0 {
            out.push(q);
            while m % q == 0 {
                m /= q;
            }
        }
        q += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Canonical representatives of `P^1(Z/n)` (first columns mod scaling).
pub fn p1_classes(n: u64) -> Vec<(u64, u64)> {
    if n == 1 {
        return vec![(0, 0)];
    }
    let mut reps: Vec<(u64, u64)> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for x in 0..n {
        for y in 0..n {
            if num::integer::gcd(num::integer::gcd(x, y), n) != 1 {
                continue;
            }
            let c = p1_canonical((x, y), n);
            if seen.insert(c) {
                reps.push(c);
            }
        }
    }
    reps
}

fn p1_canonical(v: (u64, u64), n: u64) -> (u64, u64) {
    if n == 1 {
        return (0, 0);
    }
    let mut best = None;
    for u in 1..n {
        if num::integer::gcd(u, n) != 1 {
            continue;
        }
        let c = ((v.0 * u) % n, (v.1 * u) % n);
        if best.is_none() || Some(c) < best {
            best = Some(c);
        }
    }
    best.unwrap()
}

fn apply_mat(m: &[[i64; 2]; 2], v: (u64, u64), n: u64) -> (u64, u64) {
    if n == 1 {
        return (0, 0);
    }
    let n_i = n as i64;
    let x = (m[0][0] * v.0 as i64 + m[0][1] * v.1 as i64).rem_euclid(n_i) as u64;
    let y = (m[1][0] * v.0 as i64 + m[1][1] * v.1 as i64).rem_euclid(n_i) as u64;
    (x, y)
}

fn eval_form(q: &(i64, i64, i64), v: (u64, u64), modn: u64) -> u64 {
    let m = modn as i64;
    let (a, b, c) = *q;
    let x = v.0 as i64;
    let y = v.1 as i64;
    ((a * x * x + b * x * y + c * y * y).rem_euclid(m)) as u64
}

/// Reduced primitive positive binary quadratic forms of discriminant `d`.
pub fn reduced_primitive_forms(d: i64) -> Vec<(i64, i64, i64)> {
    assert!(d < 0);
    let mut out = Vec::new();
    let bmax = (((-d) / 3) as f64).sqrt() as i64 + 1;
    for b in -bmax..=bmax {
        if (b * b - d) % 4 != 0 {
            continue;
        }
        let ac = (b * b - d) / 4;
        let mut a = 1;
        while a * a <= ac {
            if ac % a == 0 {
                let c = ac / a;
                // reduced: |b| <= a <= c, with b >= 0 when |b| = a or a = c
                if b.abs() <= a && a <= c && !(b < 0 && (b.abs() == a || a == c)) {
                    let g = num::integer::gcd(
                        num::integer::gcd(a.unsigned_abs(), b.unsigned_abs()),
                        c.unsigned_abs(),
                    );
                    if g == 1 {
                        out.push((a, b, c));
                    }
                }
            }
            a += 1;
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Nontrivial proper automorphs of a reduced form modulo `+-1` (empty for
/// `d < -4`; one generator listed per nontrivial element).
fn proper_automorphs(q: &(i64, i64, i64), d: i64) -> Vec<[[i64; 2]; 2]> {
    let (a, b, c) = *q;
    match d {
        -4 => {
            // (t, u) = (0, 1)
            let m = [[-b / 2, -c], [a, b / 2]];
            vec![m]
        }
        -3 => {
            // (t, u) = (1, 1) and its square
            let m = [[(1 - b) / 2, -c], [a, (1 + b) / 2]];
            let m2 = mat_mul(&m, &m);
            vec![m, m2]
        }
        _ => Vec::new(),
    }
}

fn mat_mul(x: &[[i64; 2]; 2], y: &[[i64; 2]; 2]) -> [[i64; 2]; 2] {
    [
        [
            x[0][0] * y[0][0] + x[0][1] * y[1][0],
            x[0][0] * y[0][1] + x[0][1] * y[1][1],
        ],
        [
            x[1][0] * y[0][0] + x[1][1] * y[1][0],
            x[1][0] * y[0][1] + x[1][1] * y[1][1],
        ],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plus_space::{PrincipalPart, Workspace};

    fn gundlach_input(prec: i64) -> PlusForm {
        let ws = Workspace::new();
        let pp = PrincipalPart::from_pairs(5, &[(1, 2)]).unwrap();
        ws.realize(&pp, prec).unwrap()
    }

    #[test]
    fn divisors_and_orders() {
        let ws = Workspace::new();
        // phi_2 input at p=29: poles {4: 2, 1: 6}; div = 3T_1 + T_4
        let pp = PrincipalPart::from_pairs(29, &[(4, 2), (1, 6)]).unwrap();
        let f = ws.realize(&pp, 8).unwrap();
        let div = divisor_of(&f);
        assert_eq!(div.get(&1), Some(&rat_i64(3)));
        assert_eq!(div.get(&4), Some(&rat_i64(1)));
        assert_eq!(effective_order(&f, 1), rat_i64(4)); // 3 + 1 from T_4's T_1 part
        assert!(is_holomorphic(&f));
        let k29 = QuadField::new(29);
        assert!(is_cusp_form(&k29, &f));
    }

    #[test]
    fn contraction_example_ell5() {
        // p = 5, l = p: f = 2q^-4 + 10 + 4q + 22q^4 + 20q^5 + 44q^9 - 104q^16 + 130q^20
        let input = gundlach_input(26);
        let f = theta_contract(&input, 5, 21).unwrap();
        let expect: &[(i64, i64)] = &[
            (-4, 2),
            (0, 10),
            (1, 4),
            (2, 0),
            (4, 22),
            (5, 20),
            (9, 44),
            (16, -104),
            (20, 130),
        ];
        for (n, c) in expect {
            assert_eq!(f.coeff_int(*n).unwrap(), rat_i64(*c), "f q^{n}");
        }
        // the series route agrees
        let f2 = theta_contract_series(&input, 5, 21).unwrap();
        assert_eq!(f, f2);
    }

    #[test]
    fn contraction_example_ell11() {
        // l = 11: f = 2q^-8 + 2q^-7 + 10 + 2q + 2q^4 + 20q^5 + 22q^9 + 22q^12
        let input = gundlach_input(16);
        let f = theta_contract(&input, 11, 13).unwrap();
        let expect: &[(i64, i64)] = &[
            (-8, 2),
            (-7, 2),
            (0, 10),
            (1, 2),
            (4, 2),
            (5, 20),
            (9, 22),
            (12, 22),
        ];
        for (n, c) in expect {
            assert_eq!(f.coeff_int(*n).unwrap(), rat_i64(*c), "f q^{n}");
        }
        let f2 = theta_contract_series(&input, 11, 13).unwrap();
        assert_eq!(f, f2);
    }

    #[test]
    fn heegner_classes_small() {
        // discriminant -4 on X_0(5): two classes, both elliptic of order 2
        let f = FracQSeries::from_int_terms(vec![(-4, rat_i64(2))], rat_i64(1));
        let h = heegner_orders(&f, 5);
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].disc, -4);
        assert_eq!(h[0].count, 2);
        assert_eq!(h[0].elliptic_weight, rat(1, 2));
        assert_eq!(h[0].order, rat_i64(1));
        // discriminant -3 on X_0(3): one class, elliptic of order 3
        let f3 = FracQSeries::from_int_terms(vec![(-3, rat_i64(1))], rat_i64(1));
        let h3 = heegner_orders(&f3, 3);
        assert_eq!(h3.len(), 1);
        assert_eq!(h3[0].count, 1);
        assert_eq!(h3[0].elliptic_weight, rat(1, 3));
        // no poles: no Heegner zeros
        let f0 = FracQSeries::from_int_terms(vec![(0, rat_i64(10))], rat_i64(2));
        assert!(heegner_orders(&f0, 5).is_empty());
    }

    #[test]
    fn example_lift_ell5_leading_and_series() {
        // restriction of the weight-5 product to lambda_5 = (5 + sqrt5)/2:
        // q^2 (1 - 2q - 10q^2 + 0q^3 + 140q^4 ...)
        let input = gundlach_input(40);
        let k5 = QuadField::new(5);
        let lam5 = k5.elem_half(5, 1);
        let spec = ProductSpec::new("s5", input.clone(), vec![lam5.clone()]);
        let (a, tier) = resolve_leading(&k5, &spec, &lam5).unwrap();
        assert_eq!(a, rat_i64(2));
        assert_eq!(tier, LeadingTier::Valence);
        let res = restrict_product(&k5, &input, &lam5, &a, 10).unwrap();
        let expect: &[(i64, i64)] = &[(2, 1), (3, -2), (4, -10), (5, 0), (6, 140)];
        for (n, c) in expect {
            assert_eq!(res.coeff_int(*n).unwrap(), rat_i64(*c), "res q^{n}");
        }
        // consistency: lift of the contraction with the same leading exponent
        let f = theta_contract(&input, 5, 90).unwrap();
        let lift = gamma0_lift(&f, 5, &a, 10).unwrap();
        assert_eq!(res, lift);
    }

    #[test]
    fn example_lift_ell11() {
        // lambda_11 = (7 + sqrt5)/2: q^3 (1 - q - q^2 - 10q^3 + 0q^4 + 10q^5 + 121q^6)
        let input = gundlach_input(110);
        let k5 = QuadField::new(5);
        let lam11 = k5.elem_half(7, 1);
        let spec = ProductSpec::new("s5", input.clone(), vec![lam11.clone()]);
        let (a, _) = resolve_leading(&k5, &spec, &lam11).unwrap();
        assert_eq!(a, rat_i64(3));
        let res = restrict_product(&k5, &input, &lam11, &a, 10).unwrap();
        let expect: &[(i64, i64)] =
            &[(3, 1), (4, -1), (5, -1), (6, -10), (7, 0), (8, 10), (9, 121)];
        for (n, c) in expect {
            assert_eq!(res.coeff_int(*n).unwrap(), rat_i64(*c), "res q^{n}");
        }
    }

    #[test]
    fn diagonal_restriction_vanishes_on_divisor() {
        // phi_2 at p=29 contains 3T_1: restriction to the diagonal is zero
        let ws = Workspace::new();
        let pp = PrincipalPart::from_pairs(29, &[(4, 2), (1, 6)]).unwrap();
        let f = ws.realize(&pp, 40).unwrap();
        let k29 = QuadField::new(29);
        let one = k29.one();
        assert!(wall_order(&k29, &f, &one).is_positive());
        let res = restrict_product(&k29, &f, &one, &Rat::zero(), 5).unwrap();
        assert!(res.is_zero());
    }
}
