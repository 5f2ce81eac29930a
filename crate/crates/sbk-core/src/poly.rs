//! Univariate integer polynomials in `x` used as symbolic exponents.
//!
//! A `SymPoly` is an element of `Z[x]` in canonical trimmed form; elements of
//! `N[x]` are the special case with all coefficients nonnegative. The degree
//! of the zero polynomial is `-1` throughout, as a real value rather than a
//! sentinel, so that product-order comparisons on signature tuples work
//! uniformly.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Integer polynomial in `x`, coefficient of `x^k` at index `k`.
///
/// Canonical form: the last stored coefficient is nonzero, or the vector is
/// empty (the zero polynomial). Equality and ordering are structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymPoly {
    coeffs: Vec<BigInt>,
}

// Wire format: plain integer array `[c0, c1, ...]`. Coefficients beyond the
// i128 range have no JSON representation here and are rejected.
impl Serialize for SymPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let ints: std::result::Result<Vec<i128>, _> = self
            .coeffs
            .iter()
            .map(|c| i128::try_from(c.clone()).map_err(|_| {
                serde::ser::Error::custom("coefficient exceeds the serializable integer range")
            }))
            .collect();
        ints?.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let ints = Vec::<i128>::deserialize(deserializer)?;
        if ints.len() > 64 {
            return Err(D::Error::custom("polynomial degree exceeds the supported range"));
        }
        Ok(SymPoly::from_coeffs(ints.into_iter().map(BigInt::from).collect()))
    }
}

impl SymPoly {
    pub fn zero() -> Self {
        SymPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        SymPoly::constant(1)
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        SymPoly::monomial(BigInt::one(), 1)
    }

    pub fn constant<T: Into<BigInt>>(c: T) -> Self {
        SymPoly::from_coeffs(vec![c.into()])
    }

    /// `c * x^deg`.
    pub fn monomial(c: BigInt, deg: usize) -> Self {
        if c.is_zero() {
            return SymPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); deg + 1];
        coeffs[deg] = c;
        SymPoly { coeffs }
    }

    /// Builds from a coefficient vector, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, Zero::is_zero) {
            coeffs.pop();
        }
        SymPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        SymPoly::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the stored degree).
    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// All coefficients nonnegative, i.e. membership in `N[x]`.
    pub fn is_nonneg(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    /// Degree, with `deg(0) = -1`.
    pub fn deg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    /// Leading coefficient, with `lc(0) = 0`.
    pub fn lc(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    /// Leading term as a `(coefficient, degree)` pair.
    pub fn leading(&self) -> Term {
        Term { coef: self.lc(), degree: self.deg() }
    }

    /// Sum of all coefficients' absolute values.
    pub fn mass(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// `x^s * self`.
    pub fn shift_by_x_power(&self, s: usize) -> Self {
        if self.is_zero() || s == 0 {
            return self.clone();
        }
        let mut coeffs = vec![BigInt::zero(); s];
        coeffs.extend(self.coeffs.iter().cloned());
        SymPoly { coeffs }
    }

    /// Splits into positive and negative parts: `f = f_+ - f_-` with both in
    /// `N[x]` and disjoint supports.
    pub fn split_parts(&self) -> (SymPoly, SymPoly) {
        let mut plus = Vec::with_capacity(self.coeffs.len());
        let mut minus = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if c.is_negative() {
                plus.push(BigInt::zero());
                minus.push(-c.clone());
            } else {
                plus.push(c.clone());
                minus.push(BigInt::zero());
            }
        }
        (SymPoly::from_coeffs(plus), SymPoly::from_coeffs(minus))
    }

    /// Signed parts `(h^+, h^-)`: the positive/negative split reordered so
    /// that the first component has the strictly larger degree; on ties the
    /// negative part comes first.
    pub fn signed_parts(&self) -> (SymPoly, SymPoly) {
        let (plus, minus) = self.split_parts();
        if plus.deg() > minus.deg() {
            (plus, minus)
        } else {
            (minus, plus)
        }
    }

    /// Componentwise coefficient minimum (useful on `N[x]` operands).
    pub fn coeff_min(&self, other: &SymPoly) -> SymPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|k| self.coeff(k).min(other.coeff(k)))
            .collect();
        SymPoly::from_coeffs(coeffs)
    }

    /// Componentwise `max(0, self - other)`.
    pub fn coeff_sat_sub(&self, other: &SymPoly) -> SymPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|k| {
                let d = self.coeff(k) - other.coeff(k);
                if d.is_negative() { BigInt::zero() } else { d }
            })
            .collect();
        SymPoly::from_coeffs(coeffs)
    }

    /// Truncates to the coefficients of degree < `deg_cap` (drops the rest).
    pub fn below_degree(&self, deg_cap: i64) -> SymPoly {
        if deg_cap <= 0 {
            return SymPoly::zero();
        }
        let keep = (deg_cap as usize).min(self.coeffs.len());
        SymPoly::from_coeffs(self.coeffs[..keep].to_vec())
    }

    /// Coefficientwise `self <= other` (for `N[x]` divisibility of supports).
    pub fn le_coeffwise(&self, other: &SymPoly) -> bool {
        (0..self.coeffs.len()).all(|k| self.coeff(k) <= other.coeff(k))
    }

    /// True if every coefficient is divisible by `m`.
    pub fn divisible_by(&self, m: &BigInt) -> bool {
        self.coeffs.iter().all(|c| (c % m).is_zero())
    }

    /// Divides every coefficient by `m`; caller must check divisibility.
    pub fn div_exact(&self, m: &BigInt) -> SymPoly {
        SymPoly::from_coeffs(self.coeffs.iter().map(|c| c / m).collect())
    }
}

impl Add for &SymPoly {
    type Output = SymPoly;
    fn add(self, rhs: &SymPoly) -> SymPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        SymPoly::from_coeffs(coeffs)
    }
}

impl Sub for &SymPoly {
    type Output = SymPoly;
    fn sub(self, rhs: &SymPoly) -> SymPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect();
        SymPoly::from_coeffs(coeffs)
    }
}

impl Neg for &SymPoly {
    type Output = SymPoly;
    fn neg(self) -> SymPoly {
        SymPoly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &SymPoly {
    type Output = SymPoly;
    fn mul(self, rhs: &SymPoly) -> SymPoly {
        if self.is_zero() || rhs.is_zero() {
            return SymPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        SymPoly::from_coeffs(coeffs)
    }
}

/// Total order used for canonical sorting of polynomials and vectors:
/// degree first, then coefficients from the top down.
impl Ord for SymPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.coeffs.len().cmp(&other.coeffs.len()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.coeffs.iter().rev().zip(other.coeffs.iter().rev()) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for SymPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            match k {
                0 => write!(f, "{}", a)?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{}", a)?;
                    }
                    if k == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{}", k)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// A term `coef * x^degree` of a polynomial in `N[x]`.
///
/// The zero term is `(0, -1)`; otherwise `coef > 0` and `degree >= 0`.
/// The order is degree first, then coefficient, with the zero term minimal.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Term {
    pub coef: BigInt,
    pub degree: i64,
}

impl Term {
    pub fn zero() -> Self {
        Term { coef: BigInt::zero(), degree: -1 }
    }

    pub fn is_zero(&self) -> bool {
        self.degree == -1
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| self.coef.cmp(&other.coef))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Strict comparison `t1 < t2` in the term order.
pub fn term_less(t1: &Term, t2: &Term) -> bool {
    t1 < t2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> SymPoly {
        SymPoly::from_i64s(cs)
    }

    #[test]
    fn canonical_form_trims_trailing_zeros() {
        assert_eq!(p(&[1, 2, 0, 0]), p(&[1, 2]));
        assert!(p(&[0, 0]).is_zero());
        assert_eq!(p(&[]).deg(), -1);
    }

    #[test]
    fn split_parts_examples() {
        // x - 1
        assert_eq!(p(&[-1, 1]).split_parts(), (p(&[0, 1]), p(&[1])));
        // x^2 + 1 - x
        assert_eq!(p(&[1, -1, 1]).split_parts(), (p(&[1, 0, 1]), p(&[0, 1])));
        assert_eq!(SymPoly::zero().split_parts(), (SymPoly::zero(), SymPoly::zero()));
    }

    #[test]
    fn signed_parts_examples() {
        assert_eq!(p(&[-1, 1]).signed_parts(), (p(&[0, 1]), p(&[1])));
        // 1 - x: negative part has the higher degree
        assert_eq!(p(&[1, -1]).signed_parts(), (p(&[0, 1]), p(&[1])));
        assert_eq!(SymPoly::zero().signed_parts(), (SymPoly::zero(), SymPoly::zero()));
    }

    #[test]
    fn leading_data() {
        let t = p(&[0, 1, 3]).leading();
        assert_eq!((t.coef, t.degree), (BigInt::from(3), 2));
        let z = SymPoly::zero().leading();
        assert!(z.is_zero());
        assert_eq!(z.degree, -1);
        let c = p(&[1, 0, 0, 1]).leading();
        assert_eq!((c.coef, c.degree), (BigInt::from(1), 3));
    }

    #[test]
    fn term_order_examples() {
        let t = |c: i64, d: i64| Term { coef: BigInt::from(c), degree: d };
        assert!(term_less(&t(5, 1), &t(1, 2)));
        assert!(term_less(&t(1, 2), &t(3, 2)));
        assert!(term_less(&Term::zero(), &t(1, 0)));
        assert!(!term_less(&t(1, 2), &t(5, 1)));
    }

    #[test]
    fn arithmetic_examples() {
        let xm1 = p(&[-1, 1]);
        let xp1 = p(&[1, 1]);
        assert_eq!(&xm1 * &xp1, p(&[-1, 0, 1]));
        assert_eq!(xm1.shift_by_x_power(1), p(&[0, -1, 1]));
        // (x^2 - x + 1)(x + 1) = x^3 + 1
        assert_eq!(&p(&[1, -1, 1]) * &xp1, p(&[1, 0, 0, 1]));
    }

    #[test]
    fn coeffwise_helpers() {
        let a = p(&[1, 0, 1]);
        let b = p(&[0, 1]);
        assert_eq!(a.coeff_min(&b), SymPoly::zero());
        assert_eq!(a.coeff_sat_sub(&b), p(&[1, -1, 1]).split_parts().0);
        assert_eq!(p(&[1, 2, 3]).below_degree(2), p(&[1, 2]));
        assert!(b.le_coeffwise(&p(&[0, 2])));
        assert!(!a.le_coeffwise(&b));
    }

    #[test]
    fn divisibility() {
        let two = BigInt::from(2);
        assert!(p(&[2, -4]).divisible_by(&two));
        assert_eq!(p(&[2, -4]).div_exact(&two), p(&[1, -2]));
        assert!(!p(&[1, 2]).divisible_by(&two));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_poly() -> impl Strategy<Value = SymPoly> {
            proptest::collection::vec(-6i64..=6, 0..6).prop_map(|v| SymPoly::from_i64s(&v))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]

            #[test]
            fn split_parts_disjoint_and_reconstruct(f in arb_poly()) {
                let (plus, minus) = f.split_parts();
                prop_assert!(plus.is_nonneg() && minus.is_nonneg());
                prop_assert_eq!(&plus - &minus, f);
                for k in 0..=(plus.deg().max(minus.deg()).max(0) as usize) {
                    prop_assert!(plus.coeff(k).is_zero() || minus.coeff(k).is_zero());
                }
            }

            #[test]
            fn signed_parts_degree_order(h in arb_poly()) {
                let (a, b) = h.signed_parts();
                prop_assert!(a.deg() >= b.deg());
            }

            #[test]
            fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
                prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                prop_assert_eq!(&a + &b, &b + &a);
                prop_assert_eq!(&(&a - &b) + &b, a);
            }

            #[test]
            fn term_order_total(a in arb_poly(), b in arb_poly()) {
                let (ta, tb) = (a.leading(), b.leading());
                let less = term_less(&ta, &tb);
                let greater = term_less(&tb, &ta);
                prop_assert!(!(less && greater));
                if !less && !greater {
                    prop_assert_eq!(ta, tb);
                }
            }
        }
    }
}
