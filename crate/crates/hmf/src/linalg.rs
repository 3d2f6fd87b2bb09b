//! Exact Gaussian elimination over the rationals.
//!
//! Sizes here are small (tens of rows, a few hundred columns), so plain
//! row reduction with per-row content normalization is enough.

use crate::{Rat, Result};
use num::{One, Signed, Zero};

/// Row-reduces `rows` in place to reduced row echelon form (pivots 1) and
/// returns the pivot column of each resulting nonzero row, in order.
/// Rows are content-normalized during elimination to keep the rational
/// entries from blowing up.
pub fn rref(rows: &mut Vec<Vec<Rat>>) -> Vec<usize> {
    let ncols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    for r in rows.iter_mut() {
        r.resize(ncols, Rat::zero());
        normalize_content(r);
    }
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let mut sel = None;
        for (i, r) in rows.iter().enumerate().skip(row) {
            if !r[col].is_zero() {
                sel = Some(i);
                break;
            }
        }
        let Some(sel) = sel else { continue };
        rows.swap(row, sel);
        let pivot_row = rows[row].clone();
        let pv = pivot_row[col].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i != row && !r[col].is_zero() {
                let f = r[col].clone() / &pv;
                for (v, p) in r.iter_mut().zip(pivot_row.iter()) {
                    if !p.is_zero() {
                        *v -= &f * p;
                    }
                }
                normalize_content(r);
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows.len() {
            break;
        }
    }
    rows.retain(|r| r.iter().any(|v| !v.is_zero()));
    // scale pivots to 1 for reduced-echelon semantics
    for (r, &p) in rows.iter_mut().zip(pivots.iter()) {
        let inv = r[p].clone().recip();
        if !inv.is_one() {
            for v in r.iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
        }
    }
    pivots
}

/// Rank of a matrix (consumes a copy).
pub fn rank(mut rows: Vec<Vec<Rat>>) -> usize {
    rref(&mut rows).len()
}

/// Solves `A x = b` for a single exact solution, requiring the solution to
/// be unique. `a` is given by rows. Returns `Err` with a description when
/// the system is inconsistent or underdetermined.
pub fn solve_unique(a: &[Vec<Rat>], b: &[Rat]) -> Result<Vec<Rat>> {
    let nvars = a.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut rows: Vec<Vec<Rat>> = a
        .iter()
        .zip(b.iter())
        .map(|(r, rhs)| {
            let mut v = r.clone();
            v.resize(nvars, Rat::zero());
            v.push(rhs.clone());
            v
        })
        .collect();
    let pivots = rref(&mut rows);
    if pivots.iter().any(|&p| p == nvars) {
        return Err(crate::Error::Inconsistent("no solution".into()));
    }
    if pivots.len() < nvars {
        return Err(crate::Error::Inconsistent(format!(
            "solution not unique: rank {} over {} unknowns",
            pivots.len(),
            nvars
        )));
    }
    let mut x = vec![Rat::zero(); nvars];
    for (row, &p) in rows.iter().zip(pivots.iter()) {
        x[p] = row[nvars].clone();
    }
    Ok(x)
}

/// Basis of the kernel of `A` (rows of the returned matrix are kernel
/// vectors of length `ncols`).
pub fn kernel(a: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let mut rows: Vec<Vec<Rat>> = a
        .iter()
        .map(|r| {
            let mut v = r.clone();
            v.resize(ncols, Rat::zero());
            v
        })
        .collect();
    let pivots = rref(&mut rows);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); ncols];
        v[free] = Rat::one();
        for (row, &p) in rows.iter().zip(pivots.iter()) {
            if !row[free].is_zero() {
                v[p] = -row[free].clone();
            }
        }
        basis.push(v);
    }
    basis
}

/// Incremental rank tracking modulo the Mersenne prime `2^61 - 1`. Used
/// only to pick independent spanning candidates quickly; every exact
/// computation downstream re-validates over the rationals.
pub struct ModRank {
    rows: Vec<Vec<u64>>,
}

pub const MOD_P: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MOD_P as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    acc
}

fn invmod(a: u64) -> u64 {
    powmod(a, MOD_P - 2)
}

/// Reduces a rational to `Z / (2^61 - 1)`; panics if the denominator is
/// divisible by the modulus (impossible for the bounded denominators here).
pub fn rat_mod(r: &Rat) -> u64 {
    use num::Integer;
    let p = crate::Int::from(MOD_P);
    let n = r.numer().mod_floor(&p);
    let d = r.denom().mod_floor(&p);
    let n = n.to_u64_digits().1.first().copied().unwrap_or(0);
    let d = d.to_u64_digits().1.first().copied().unwrap_or(0);
    assert!(d != 0, "denominator divisible by the rank-filter modulus");
    mulmod(n, invmod(d))
}

impl Default for ModRank {
    fn default() -> Self {
        Self::new()
    }
}

impl ModRank {
    pub fn new() -> Self {
        ModRank { rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the current basis; if a new pivot remains the
    /// row is added and `true` returned.
    pub fn try_add(&mut self, mut row: Vec<u64>) -> bool {
        for r in &self.rows {
            let p = r.iter().position(|v| *v != 0).unwrap();
            if row[p] != 0 {
                let f = mulmod(row[p], invmod(r[p]));
                for (x, y) in row.iter_mut().zip(r.iter()) {
                    if *y != 0 {
                        let sub = mulmod(f, *y);
                        *x = (*x + MOD_P - sub) % MOD_P;
                    }
                }
            }
        }
        if let Some(p) = row.iter().position(|v| *v != 0) {
            let at = self
                .rows
                .iter()
                .position(|r| r.iter().position(|v| *v != 0).unwrap() > p)
                .unwrap_or(self.rows.len());
            self.rows.insert(at, row);
            true
        } else {
            false
        }
    }
}

/// Divides a vector by the gcd of its entries' numerators over the lcm of
/// denominators, making it integral and content-free; the sign is chosen so
/// the first nonzero entry is positive.
pub fn normalize_content(v: &mut [Rat]) {
    use num::Integer;
    let mut den = crate::Int::one();
    for x in v.iter() {
        if !x.is_zero() {
            den = den.lcm(x.denom());
        }
    }
    let mut num = crate::Int::zero();
    for x in v.iter() {
        if !x.is_zero() {
            num = num.gcd(&(x.numer() * (&den / x.denom())));
        }
    }
    if num.is_zero() {
        return;
    }
    let scale = Rat::new(den, num);
    let mut flip = false;
    for x in v.iter() {
        if !x.is_zero() {
            flip = x.is_negative();
            break;
        }
    }
    let scale = if flip { -scale } else { scale };
    for x in v.iter_mut() {
        if !x.is_zero() {
            *x *= &scale;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat_i64;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| rat_i64(x)).collect())
            .collect()
    }

    #[test]
    fn rank_and_solve() {
        assert_eq!(rank(m(&[&[1, 2], &[2, 4], &[0, 1]])), 2);
        let a = m(&[&[2, 0], &[0, 3], &[2, 3]]);
        let b = vec![rat_i64(4), rat_i64(9), rat_i64(13)];
        let x = solve_unique(&a, &b).unwrap();
        assert_eq!(x, vec![rat_i64(2), rat_i64(3)]);
    }

    #[test]
    fn kernel_basic() {
        let a = m(&[&[1, 1, 0], &[0, 0, 1]]);
        let k = kernel(&a, 3);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![rat_i64(-1), rat_i64(1), rat_i64(0)]);
    }

    #[test]
    fn content_normalization() {
        let mut v = vec![crate::rat(-2, 3), crate::rat(4, 3), rat_i64(-2)];
        normalize_content(&mut v);
        assert_eq!(v, vec![rat_i64(1), rat_i64(-2), rat_i64(3)]);
    }
}
