//! `Z[x]`-lattices: generator management, bounded element enumeration, the
//! truncated membership oracle, and M-saturation.
//!
//! Full `Z[x]`-module membership would need completion over `Z[x]`; every
//! engine here works on the bounded problem instead — cofactors of degree at
//! most `d` — which linearizes to exact integer linear algebra and is sound
//! and complete for the bounded question.

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expvec::ExpVector;
use crate::poly::SymPoly;

/// A finitely generated `Z[x]`-submodule of `Z[x]^n`, stored by generators.
///
/// Generators are kept canonical: no zero vectors, global sign normalized
/// (the only units of `Z[x]`), sorted, deduplicated.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Lattice {
    n: usize,
    generators: Vec<ExpVector>,
}

impl Lattice {
    pub fn new(n: usize, generators: Vec<ExpVector>) -> Result<Self> {
        for g in &generators {
            if g.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: g.len() });
            }
        }
        let mut lat = Lattice { n, generators };
        lat.canonicalize();
        Ok(lat)
    }

    pub fn zero(n: usize) -> Self {
        Lattice { n, generators: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[ExpVector] {
        &self.generators
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    fn canonicalize(&mut self) {
        let mut gens: Vec<ExpVector> = self
            .generators
            .iter()
            .filter(|g| !g.is_zero())
            .map(sign_normalize)
            .collect();
        gens.sort();
        gens.dedup();
        self.generators = gens;
    }

    fn with_extra(&self, extra: ExpVector) -> Lattice {
        let mut gens = self.generators.clone();
        gens.push(extra);
        let mut lat = Lattice { n: self.n, generators: gens };
        lat.canonicalize();
        lat
    }
}

/// Multiplies by `-1` if needed so the first nonzero entry has positive
/// leading coefficient.
fn sign_normalize(g: &ExpVector) -> ExpVector {
    for e in g.entries() {
        let lc = e.lc();
        if lc.is_positive() {
            return g.clone();
        }
        if lc.is_negative() {
            return g.neg();
        }
    }
    g.clone()
}

/// Bounds for enumeration and bounded membership.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumBounds {
    /// Maximum degree of each cofactor polynomial.
    pub coeff_deg: usize,
    /// Maximum absolute value of each cofactor coefficient.
    pub height: u64,
    /// Hard cap on the number of combinations visited.
    pub max_combinations: u64,
}

impl Default for EnumBounds {
    fn default() -> Self {
        EnumBounds { coeff_deg: 2, height: 2, max_combinations: 4_000_000 }
    }
}

/// Streams every nonzero combination `sum c_k g_k` with `deg(c_k) <= d` and
/// cofactor coefficients bounded by `H` in absolute value, in a fixed
/// deterministic order.
pub fn enumerate_stream<F: FnMut(ExpVector)>(
    lat: &Lattice,
    bounds: &EnumBounds,
    mut visit: F,
) -> Result<()> {
    if lat.is_zero() {
        return Ok(());
    }
    let slots = (bounds.coeff_deg + 1) * lat.generators.len();
    let radix = 2 * bounds.height + 1;
    let total = (radix as f64).powi(slots as i32);
    if total > bounds.max_combinations as f64 {
        return Err(Error::ResourceCap {
            context: "enumerate_elements",
            detail: format!(
                "{}^{} combinations exceed cap {}",
                radix, slots, bounds.max_combinations
            ),
        });
    }

    let mut digits = vec![0u64; slots];
    let h = bounds.height as i64;
    loop {
        // Decode digits into cofactors and accumulate the combination.
        let mut acc = ExpVector::zero(lat.n);
        for (k, g) in lat.generators.iter().enumerate() {
            let coeffs: Vec<BigInt> = (0..=bounds.coeff_deg)
                .map(|t| BigInt::from(digits[k * (bounds.coeff_deg + 1) + t] as i64 - h))
                .collect();
            let c = SymPoly::from_coeffs(coeffs);
            if !c.is_zero() {
                acc = acc.add(&g.scale(&c));
            }
        }
        if !acc.is_zero() {
            visit(acc);
        }

        // Odometer increment.
        let mut i = 0;
        loop {
            if i == slots {
                return Ok(());
            }
            digits[i] += 1;
            if digits[i] < radix {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// All nonzero combinations at the given bounds, canonically ordered.
pub fn enumerate_elements(lat: &Lattice, bounds: &EnumBounds) -> Result<BTreeSet<ExpVector>> {
    let mut out = BTreeSet::new();
    enumerate_stream(lat, bounds, |h| {
        out.insert(h);
    })?;
    Ok(out)
}

/// Decides whether `v = sum c_k g_k` has an integer solution with
/// `deg(c_k) <= d`, by Hermite-style column reduction of the Z-linearization.
/// Sound and complete for the bounded problem; a semi-decision for full
/// membership. Returns the witness cofactors when the answer is yes.
pub fn truncated_member_witness(
    lat: &Lattice,
    v: &ExpVector,
    coeff_deg: usize,
) -> Option<Vec<SymPoly>> {
    if v.is_zero() {
        return Some(vec![SymPoly::zero(); lat.generators.len()]);
    }
    if lat.is_zero() {
        return None;
    }
    assert_eq!(v.len(), lat.n, "vector dimension mismatch");

    // Unknowns: for each generator k, d+1 coefficients of c_k.
    // Equations: for each coordinate i and each x-degree j,
    //   sum_k sum_t c_{k,t} * g_k[i].coeff(j - t) = v[i].coeff(j).
    let gen_count = lat.generators.len();
    let unknowns = gen_count * (coeff_deg + 1);
    let max_gen_deg = lat
        .generators
        .iter()
        .map(ExpVector::max_deg)
        .max()
        .unwrap_or(-1)
        .max(0) as usize;
    let max_j = (coeff_deg + max_gen_deg).max(v.max_deg().max(0) as usize);

    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    let mut rhs: Vec<BigInt> = Vec::new();
    for i in 0..lat.n {
        for j in 0..=max_j {
            let mut row = vec![BigInt::zero(); unknowns];
            for (k, g) in lat.generators.iter().enumerate() {
                for t in 0..=coeff_deg {
                    if j >= t {
                        row[k * (coeff_deg + 1) + t] = g.entry(i).coeff(j - t);
                    }
                }
            }
            rows.push(row);
            rhs.push(v.entry(i).coeff(j));
        }
    }

    let solution = solve_integer_system(rows, rhs, unknowns)?;
    let cofactors: Vec<SymPoly> = (0..gen_count)
        .map(|k| {
            SymPoly::from_coeffs(
                solution[k * (coeff_deg + 1)..(k + 1) * (coeff_deg + 1)].to_vec(),
            )
        })
        .collect();
    debug_assert_eq!(
        {
            let mut acc = ExpVector::zero(lat.n);
            for (c, g) in cofactors.iter().zip(lat.generators.iter()) {
                acc = acc.add(&g.scale(c));
            }
            acc
        },
        *v
    );
    Some(cofactors)
}

pub fn truncated_member(lat: &Lattice, v: &ExpVector, coeff_deg: usize) -> bool {
    truncated_member_witness(lat, v, coeff_deg).is_some()
}

/// Solves `A z = b` exactly over the integers by column Hermite reduction.
/// `A` is given by rows; returns one solution or `None`.
fn solve_integer_system(
    mut a: Vec<Vec<BigInt>>,
    b: Vec<BigInt>,
    unknowns: usize,
) -> Option<Vec<BigInt>> {
    // u tracks column operations: columns of A are combinations of the
    // original unknowns, z = u * y for the reduced system's y.
    let rows = a.len();
    let mut u: Vec<Vec<BigInt>> = (0..unknowns)
        .map(|i| {
            let mut e = vec![BigInt::zero(); unknowns];
            e[i] = BigInt::one();
            e
        })
        .collect();
    // u is indexed [col][orig_unknown]; column j of A corresponds to u[j].

    let mut pivot_col = 0usize;
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    for row in 0..rows {
        if pivot_col == unknowns {
            break;
        }
        // Clear row entries right of pivot_col by gcd column combinations.
        loop {
            let mut nonzero: Option<usize> = None;
            for col in pivot_col..unknowns {
                if !a[row][col].is_zero() {
                    nonzero = Some(col);
                    break;
                }
            }
            let Some(first) = nonzero else { break };
            // Move to pivot position.
            if first != pivot_col {
                for r in a.iter_mut() {
                    r.swap(first, pivot_col);
                }
                u.swap(first, pivot_col);
            }
            let mut done = true;
            for col in (pivot_col + 1)..unknowns {
                if a[row][col].is_zero() {
                    continue;
                }
                done = false;
                let (p, q) = (a[row][pivot_col].clone(), a[row][col].clone());
                let e = p.extended_gcd(&q);
                // g = s*p + t*q; combine columns so pivot holds g, col holds 0.
                let (g, s, t) = (e.gcd, e.x, e.y);
                let (pg, qg) = (&p / &g, &q / &g);
                for r in a.iter_mut() {
                    let x = r[pivot_col].clone();
                    let y = r[col].clone();
                    r[pivot_col] = &s * &x + &t * &y;
                    r[col] = -&qg * &x + &pg * &y;
                }
                let ux = u[pivot_col].clone();
                let uy = u[col].clone();
                for i in 0..unknowns {
                    u[pivot_col][i] = &s * &ux[i] + &t * &uy[i];
                    u[col][i] = -&qg * &ux[i] + &pg * &uy[i];
                }
            }
            if done {
                break;
            }
        }
        if !a[row][pivot_col].is_zero() {
            pivots.push((row, pivot_col));
            pivot_col += 1;
        }
    }

    // Forward substitution on the triangularized system.
    let mut y = vec![BigInt::zero(); unknowns];
    let mut b_res = b;
    for &(row, col) in &pivots {
        let num = b_res[row].clone();
        let den = a[row][col].clone();
        if num.is_zero() {
            continue;
        }
        let (q, r) = num.div_rem(&den);
        if !r.is_zero() {
            return None;
        }
        y[col] = q;
        for rr in 0..rows {
            let delta = &a[rr][col] * &y[col];
            b_res[rr] -= delta;
        }
    }
    if b_res.iter().any(|c| !c.is_zero()) {
        return None;
    }

    // z = sum over columns of y[col] * u[col].
    let mut z = vec![BigInt::zero(); unknowns];
    for col in 0..unknowns {
        if y[col].is_zero() {
            continue;
        }
        for i in 0..unknowns {
            z[i] += &y[col] * &u[col][i];
        }
    }
    Some(z)
}

/// The `m -> o_m` map: the m-th transforming degree of the unity, recorded as
/// constants in the exponent ring. The default maps every `m` to 1, which
/// models a difference operator fixing roots of unity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmMap {
    entries: Vec<(u64, SymPoly)>,
}

impl OmMap {
    pub fn trivial() -> Self {
        OmMap { entries: Vec::new() }
    }

    pub fn with_entries(entries: Vec<(u64, SymPoly)>) -> Result<Self> {
        for (m, o) in &entries {
            if *m == 1 && *o != SymPoly::one() {
                return Err(Error::Precondition {
                    op: "OmMap",
                    detail: "o_1 must be 1".into(),
                });
            }
        }
        Ok(OmMap { entries })
    }

    pub fn get(&self, m: u64) -> SymPoly {
        self.entries
            .iter()
            .find(|(k, _)| *k == m)
            .map(|(_, o)| o.clone())
            .unwrap_or_else(SymPoly::one)
    }
}

impl Default for OmMap {
    fn default() -> Self {
        OmMap::trivial()
    }
}

/// Configuration for the bounded M-saturation fixpoint.
#[derive(Clone, Copy, Debug)]
pub struct SatConfig {
    /// Divisibility scan limit: factors `m` with `2 <= m <= m_bound`.
    pub m_bound: u64,
    pub enum_bounds: EnumBounds,
    pub max_rounds: usize,
    /// Degree bound used by the membership oracle when testing candidates.
    pub member_deg: usize,
}

impl Default for SatConfig {
    fn default() -> Self {
        SatConfig {
            m_bound: 4,
            enum_bounds: EnumBounds::default(),
            max_rounds: 16,
            member_deg: 3,
        }
    }
}

/// Bounded realization of M-saturation: repeatedly scan enumerated elements
/// `w` of the current lattice for divisibility `w = m f` with
/// `2 <= m <= m_bound`, and add `(x - o_m) f` when it is not already a
/// bounded member. Returns a lattice containing the input and contained in
/// the true saturation.
pub fn sat_m(lat: &Lattice, om: &OmMap, cfg: &SatConfig) -> Result<Lattice> {
    if cfg.m_bound < 2 {
        return Err(Error::Precondition {
            op: "sat_m",
            detail: format!("m_bound must be at least 2, got {}", cfg.m_bound),
        });
    }
    let mut current = lat.clone();
    for _ in 0..cfg.max_rounds {
        let mut added = false;
        let elements = enumerate_elements(&current, &cfg.enum_bounds)?;
        for w in &elements {
            for m in 2..=cfg.m_bound {
                let mb = BigInt::from(m);
                if !w.entries().iter().all(|e| e.divisible_by(&mb)) {
                    continue;
                }
                let f = w.map(|e| e.div_exact(&mb));
                let x_minus_om = &SymPoly::x() - &om.get(m);
                let candidate = f.scale(&x_minus_om);
                if candidate.is_zero() {
                    continue;
                }
                if !truncated_member(&current, &candidate, cfg.member_deg) {
                    current = current.with_extra(candidate);
                    added = true;
                }
            }
        }
        if !added {
            return Ok(current);
        }
    }
    Err(Error::IterationCap { context: "sat_m", iterations: cfg.max_rounds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(entries: &[&[i64]]) -> ExpVector {
        ExpVector::from_i64s(entries)
    }

    fn lat(n: usize, gens: &[&[&[i64]]]) -> Lattice {
        Lattice::new(n, gens.iter().map(|g| v(g)).collect()).unwrap()
    }

    #[test]
    fn enumeration_finds_scaled_generator() {
        let l = lat(2, &[&[&[-1, 1], &[1, -1]]]);
        let bounds = EnumBounds { coeff_deg: 1, height: 1, ..Default::default() };
        let els = enumerate_elements(&l, &bounds).unwrap();
        // c = x + 1 gives (x^2 - 1, 1 - x^2)
        assert!(els.contains(&v(&[&[-1, 0, 1], &[1, 0, -1]])));
    }

    #[test]
    fn enumeration_zero_lattice_empty() {
        let l = Lattice::zero(2);
        let els = enumerate_elements(&l, &EnumBounds::default()).unwrap();
        assert!(els.is_empty());
    }

    #[test]
    fn enumeration_example_multiplied_generator() {
        let l = lat(2, &[&[&[1, -1, 1], &[-1, 1, -1]]]);
        let bounds = EnumBounds { coeff_deg: 1, height: 1, ..Default::default() };
        let els = enumerate_elements(&l, &bounds).unwrap();
        // c = x + 1 gives (x^3 + 1, -(x^3 + 1))
        assert!(els.contains(&v(&[&[1, 0, 0, 1], &[-1, 0, 0, -1]])));
    }

    #[test]
    fn truncated_member_examples() {
        let l = lat(2, &[&[&[-1, 1], &[1, -1]]]);
        assert!(truncated_member(&l, &v(&[&[-1, 0, 1], &[1, 0, -1]]), 1));
        assert!(truncated_member(&l, &ExpVector::zero(2), 0));
        // Second coordinate forces c = -c.
        for d in 0..=3 {
            assert!(!truncated_member(&l, &v(&[&[-1, 1], &[-1, 1]]), d));
        }
    }

    #[test]
    fn truncated_member_monotone_in_degree() {
        let l = lat(2, &[&[&[1, -1, 1], &[-1, 1, -1]]]);
        let target = v(&[&[1, 0, 0, 1], &[-1, 0, 0, -1]]);
        assert!(!truncated_member(&l, &target, 0));
        assert!(truncated_member(&l, &target, 1));
        assert!(truncated_member(&l, &target, 2));
    }

    #[test]
    fn truncated_member_witness_is_exact() {
        let l = lat(2, &[&[&[-1, 1], &[1, -1]]]);
        let target = v(&[&[-1, 0, 1], &[1, 0, -1]]);
        let w = truncated_member_witness(&l, &target, 1).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0], SymPoly::from_i64s(&[1, 1]));
    }

    #[test]
    fn sat_m_primitive_generator_unchanged() {
        let l = lat(2, &[&[&[-1, 1], &[1, -1]]]);
        let s = sat_m(&l, &OmMap::trivial(), &SatConfig::default()).unwrap();
        assert_eq!(s, l);
    }

    #[test]
    fn sat_m_gains_halved_multiple() {
        let l = lat(2, &[&[&[-2, 2], &[2, -2]]]);
        let s = sat_m(&l, &OmMap::trivial(), &SatConfig::default()).unwrap();
        // (x - 1) * (x - 1, 1 - x) = ((x-1)^2, -(x-1)^2)
        let gained = v(&[&[1, -2, 1], &[-1, 2, -1]]);
        assert!(truncated_member(&s, &gained, 2));
        assert!(!truncated_member(&l, &gained, 3));
        // Saturation contains the input.
        for g in l.generators() {
            assert!(truncated_member(&s, g, 2));
        }
    }

    #[test]
    fn sat_m_zero_lattice() {
        let l = Lattice::zero(3);
        let s = sat_m(&l, &OmMap::trivial(), &SatConfig::default()).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn sat_m_idempotent_at_bounds() {
        let l = lat(2, &[&[&[-2, 2], &[2, -2]]]);
        let cfg = SatConfig::default();
        let s1 = sat_m(&l, &OmMap::trivial(), &cfg).unwrap();
        let s2 = sat_m(&s1, &OmMap::trivial(), &cfg).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn enumeration_agrees_with_membership() {
        // Cross-oracle agreement, exhaustive at small bounds.
        let l = lat(2, &[&[&[-1, 1], &[1, -1]], &[&[2], &[0, 1]]]);
        let bounds = EnumBounds { coeff_deg: 1, height: 1, ..Default::default() };
        for w in enumerate_elements(&l, &bounds).unwrap() {
            assert!(truncated_member(&l, &w, 1), "enumerated {w} must be a member");
        }
    }

    #[test]
    fn canonicalization_is_permutation_invariant() {
        let g1 = v(&[&[-1, 1], &[1, -1]]);
        let g2 = v(&[&[2], &[0, 1]]);
        let a = Lattice::new(2, vec![g1.clone(), g2.clone()]).unwrap();
        let b = Lattice::new(2, vec![g2, g1.neg()]).unwrap();
        assert_eq!(a, b);
    }
}
