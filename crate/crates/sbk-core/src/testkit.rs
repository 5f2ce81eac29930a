//! Test-only support: independent oracles and randomized instance
//! generators used by the property and acceptance suites. Nothing here is
//! part of the production surface, and nothing here may call into the
//! engines it is used to check.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};

use crate::trunc::{TruncMonomial, TruncPoly, TruncRing};

/// All monomials of the ring with total degree at most `cap`, in a fixed
/// order.
pub fn monomials_up_to(ring: &TruncRing, cap: u64) -> Vec<TruncMonomial> {
    let vars = ring.var_count();
    let mut out = Vec::new();
    let mut exps = vec![0u32; vars];
    loop {
        let total: u64 = exps.iter().map(|&e| e as u64).sum();
        if total <= cap {
            out.push(TruncMonomial::from_exps(exps.clone()));
        }
        // Odometer with early pruning would be nicer; the grids here are
        // tiny, so plain counting in base (cap+1) suffices.
        let mut i = 0;
        loop {
            if i == vars {
                out.sort();
                return out;
            }
            exps[i] += 1;
            if exps[i] as u64 <= cap {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}

/// Bounded-degree linear-algebra membership oracle: decides whether
/// `p = sum q_k g_k` has a solution with every cofactor of total degree at
/// most `deg_cap`, by solving the exact linear system over the rationals.
///
/// Sound and complete for the bounded question. Independent of the
/// completion-based membership path.
pub fn macaulay_member(
    ring: &TruncRing,
    gens: &[TruncPoly],
    p: &TruncPoly,
    deg_cap: u64,
) -> bool {
    if p.is_zero() {
        return true;
    }
    let gens: Vec<&TruncPoly> = gens.iter().filter(|g| !g.is_zero()).collect();
    if gens.is_empty() {
        return false;
    }
    let cof_monos = monomials_up_to(ring, deg_cap);

    // Column space: one unknown per (generator, cofactor monomial).
    // Row space: every monomial reachable by cofactor * generator term.
    let mut row_index: std::collections::BTreeMap<TruncMonomial, usize> =
        std::collections::BTreeMap::new();
    let mut touch = |m: TruncMonomial, rows: &mut std::collections::BTreeMap<TruncMonomial, usize>| {
        let next = rows.len();
        rows.entry(m).or_insert(next);
    };
    for g in &gens {
        for (gm, _) in g.terms() {
            for cm in &cof_monos {
                touch(gm.mul(cm), &mut row_index);
            }
        }
    }
    for (pm, _) in p.terms() {
        if !row_index.contains_key(pm) {
            return false;
        }
    }

    let rows = row_index.len();
    let cols = gens.len() * cof_monos.len();
    let mut matrix: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); cols + 1]; rows];
    for (k, g) in gens.iter().enumerate() {
        for (ci, cm) in cof_monos.iter().enumerate() {
            let col = k * cof_monos.len() + ci;
            for (gm, gc) in g.terms() {
                let row = row_index[&gm.mul(cm)];
                matrix[row][col] += gc.clone();
            }
        }
    }
    for (pm, pc) in p.terms() {
        let row = row_index[pm];
        matrix[row][cols] = pc.clone();
    }

    // Gaussian elimination; consistent iff no row reduces to (0...0 | c).
    let mut pivot_row = 0usize;
    for col in 0..cols {
        let Some(r) = (pivot_row..rows).find(|&r| !matrix[r][col].is_zero()) else {
            continue;
        };
        matrix.swap(pivot_row, r);
        let inv = BigRational::one() / matrix[pivot_row][col].clone();
        for c in col..=cols {
            let v = matrix[pivot_row][c].clone() * inv.clone();
            matrix[pivot_row][c] = v;
        }
        for rr in 0..rows {
            if rr == pivot_row || matrix[rr][col].is_zero() {
                continue;
            }
            let f = matrix[rr][col].clone();
            for c in col..=cols {
                let delta = &f * &matrix[pivot_row][c];
                matrix[rr][c] -= delta;
            }
        }
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    for r in 0..rows {
        if matrix[r][..cols].iter().all(Zero::is_zero) && !matrix[r][cols].is_zero() {
            return false;
        }
    }
    true
}

/// Deterministic pseudo-random stream for instance generation; a tiny
/// xorshift so the suites do not depend on RNG crates staying stable.
pub struct TestRng {
    state: u64,
}

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng { state: seed.max(1) }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.state = x;
        x
    }

    /// Uniform in `0..bound`.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound.max(1)
    }

    /// Uniform in `lo..=hi` inclusive.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.below((hi - lo + 1) as u64) as i64)
    }
}

/// A random polynomial over the ring grid with the given term count,
/// exponent bound, and coefficient range.
pub fn random_poly(
    rng: &mut TestRng,
    ring: &TruncRing,
    terms: usize,
    max_exp: u32,
    max_coef: i64,
) -> TruncPoly {
    let mut p = TruncPoly::zero(ring);
    for _ in 0..terms {
        let exps: Vec<u32> = (0..ring.var_count())
            .map(|_| rng.below(max_exp as u64 + 1) as u32)
            .collect();
        let c = rng.range_i64(-max_coef, max_coef);
        if c != 0 {
            p.add_term(TruncMonomial::from_exps(exps), BigRational::from(BigInt::from(c)));
        }
    }
    p
}

/// A random pure difference binomial support pair in `N[x]^n` with entry
/// degrees at most `deg` and coefficients in `0..=height`.
pub fn random_support(
    rng: &mut TestRng,
    n: usize,
    deg: usize,
    height: i64,
) -> crate::expvec::ExpVector {
    let entries = (0..n)
        .map(|_| {
            let coeffs: Vec<i64> = (0..=deg).map(|_| rng.range_i64(0, height)).collect();
            crate::poly::SymPoly::from_i64s(&coeffs)
        })
        .collect();
    crate::expvec::ExpVector::new(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trunc::parse_trunc_poly;

    #[test]
    fn macaulay_agrees_on_simple_cases() {
        let r = TruncRing::new(2, 1);
        let g = parse_trunc_poly(&r, "y[1][0]^2 - y[2][0]").unwrap();
        // g * y[1][1] is a member at cofactor degree 1.
        let p = parse_trunc_poly(&r, "y[1][0]^2 * y[1][1] - y[1][1] * y[2][0]").unwrap();
        assert!(macaulay_member(&r, &[g.clone()], &p, 1));
        // y[1][0] alone is not.
        let q = parse_trunc_poly(&r, "y[1][0]").unwrap();
        assert!(!macaulay_member(&r, &[g], &q, 3));
    }

    #[test]
    fn monomial_universe_counts() {
        let r = TruncRing::new(1, 1);
        // Two variables, total degree <= 2: C(4, 2) = 6 monomials.
        assert_eq!(monomials_up_to(&r, 2).len(), 6);
    }
}
