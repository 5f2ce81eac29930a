//! Fixed-length tuples of symbolic exponents, and the sign-pattern and
//! signature data attached to lattice elements.

use std::cmp::Ordering;
use std::fmt;

use num::bigint::BigInt;
use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::poly::SymPoly;

/// An element of `Z[x]^n` (a lattice vector) or of `N[x]^n` (a monomial
/// support), depending on context.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExpVector {
    entries: Vec<SymPoly>,
}

impl ExpVector {
    pub fn new(entries: Vec<SymPoly>) -> Self {
        assert!(!entries.is_empty(), "dimension must be at least 1");
        ExpVector { entries }
    }

    pub fn zero(n: usize) -> Self {
        ExpVector::new(vec![SymPoly::zero(); n])
    }

    pub fn from_i64s(entries: &[&[i64]]) -> Self {
        ExpVector::new(entries.iter().map(|cs| SymPoly::from_i64s(cs)).collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entries(&self) -> &[SymPoly] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &SymPoly {
        &self.entries[i]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(SymPoly::is_zero)
    }

    pub fn is_nonneg(&self) -> bool {
        self.entries.iter().all(SymPoly::is_nonneg)
    }

    pub fn map<F: FnMut(&SymPoly) -> SymPoly>(&self, f: F) -> ExpVector {
        ExpVector::new(self.entries.iter().map(f).collect())
    }

    pub fn add(&self, other: &ExpVector) -> ExpVector {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ExpVector) -> ExpVector {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> ExpVector {
        self.map(|a| -a)
    }

    /// Componentwise multiplication by a scalar `c` in `Z[x]`.
    pub fn scale(&self, c: &SymPoly) -> ExpVector {
        self.map(|a| a * c)
    }

    pub fn shift_by_x_power(&self, s: usize) -> ExpVector {
        self.map(|a| a.shift_by_x_power(s))
    }

    fn zip<F: Fn(&SymPoly, &SymPoly) -> SymPoly>(&self, other: &ExpVector, f: F) -> ExpVector {
        assert_eq!(self.len(), other.len(), "vector length mismatch");
        ExpVector::new(
            self.entries
                .iter()
                .zip(other.entries.iter())
                .map(|(a, b)| f(a, b))
                .collect(),
        )
    }

    /// Componentwise positive/negative split.
    pub fn split_parts(&self) -> (ExpVector, ExpVector) {
        let (mut plus, mut minus) = (Vec::new(), Vec::new());
        for e in &self.entries {
            let (p, m) = e.split_parts();
            plus.push(p);
            minus.push(m);
        }
        (ExpVector::new(plus), ExpVector::new(minus))
    }

    /// Componentwise signed split `(h^+, h^-)`.
    pub fn signed_parts(&self) -> (ExpVector, ExpVector) {
        let (mut plus, mut minus) = (Vec::new(), Vec::new());
        for e in &self.entries {
            let (p, m) = e.signed_parts();
            plus.push(p);
            minus.push(m);
        }
        (ExpVector::new(plus), ExpVector::new(minus))
    }

    /// Componentwise coefficient minimum.
    pub fn coeff_min(&self, other: &ExpVector) -> ExpVector {
        self.zip(other, |a, b| a.coeff_min(b))
    }

    /// Coefficientwise `self <= other` in every component.
    pub fn le_coeffwise(&self, other: &ExpVector) -> bool {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .all(|(a, b)| a.le_coeffwise(b))
    }

    pub fn max_deg(&self) -> i64 {
        self.entries.iter().map(SymPoly::deg).max().unwrap_or(-1)
    }

    /// Sign pattern of leading coefficients.
    pub fn sign_pattern(&self) -> SignPattern {
        SignPattern {
            pattern: self
                .entries
                .iter()
                .map(|e| {
                    let lc = e.lc();
                    if lc.is_zero() {
                        Sign::Zero
                    } else if lc.is_positive() {
                        Sign::Plus
                    } else {
                        Sign::Minus
                    }
                })
                .collect(),
        }
    }

    /// The length-`3n` signature tuple
    /// `(deg(h_1^+), lc(h_1^+), ..., deg(h_n^+), lc(h_n^+), deg(h_1^-), ..., deg(h_n^-))`.
    pub fn signature(&self) -> Signature {
        let mut entries = Vec::with_capacity(3 * self.len());
        let mut minus_degs = Vec::with_capacity(self.len());
        for e in &self.entries {
            let (p, m) = e.signed_parts();
            entries.push(BigInt::from(p.deg()));
            entries.push(p.lc());
            minus_degs.push(BigInt::from(m.deg()));
        }
        entries.extend(minus_degs);
        Signature { entries }
    }
}

impl fmt::Debug for ExpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", e)?;
        }
        write!(f, ")")
    }
}

/// One of `+`, `-`, `0`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
    Zero,
}

/// Map from coordinates to `{+, -, 0}`; the all-zero pattern is
/// representable but excluded from the index set used by the basis engine.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SignPattern {
    pattern: Vec<Sign>,
}

impl SignPattern {
    pub fn signs(&self) -> &[Sign] {
        &self.pattern
    }

    pub fn is_all_zero(&self) -> bool {
        self.pattern.iter().all(|s| *s == Sign::Zero)
    }

    pub fn flip(&self) -> SignPattern {
        SignPattern {
            pattern: self
                .pattern
                .iter()
                .map(|s| match s {
                    Sign::Plus => Sign::Minus,
                    Sign::Minus => Sign::Plus,
                    Sign::Zero => Sign::Zero,
                })
                .collect(),
        }
    }

    pub fn positive_coords(&self) -> Vec<usize> {
        self.coords_of(Sign::Plus)
    }

    pub fn negative_coords(&self) -> Vec<usize> {
        self.coords_of(Sign::Minus)
    }

    fn coords_of(&self, s: Sign) -> Vec<usize> {
        self.pattern
            .iter()
            .enumerate()
            .filter(|(_, t)| **t == s)
            .map(|(i, _)| i)
            .collect()
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.pattern {
            match s {
                Sign::Plus => write!(f, "+")?,
                Sign::Minus => write!(f, "-")?,
                Sign::Zero => write!(f, "0")?,
            }
        }
        Ok(())
    }
}

/// Signature tuple compared in the product order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Signature {
    entries: Vec<BigInt>,
}

impl Signature {
    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        Signature { entries: entries.iter().map(|&e| BigInt::from(e)).collect() }
    }

    /// Componentwise `self <= other` (the product order).
    pub fn dominated_by(&self, other: &Signature) -> bool {
        other.dominates(self)
    }

    /// Componentwise `self >= other`.
    pub fn dominates(&self, other: &Signature) -> bool {
        debug_assert_eq!(self.entries.len(), other.entries.len());
        self.entries
            .iter()
            .zip(other.entries.iter())
            .all(|(a, b)| a >= b)
    }
}

/// Strict lexicographic comparison of the leading-term tuples
/// `(lt(h_1^+), ..., lt(h_n^+))` — the induction measure of the reduction.
pub fn leading_tuple_cmp(a: &ExpVector, b: &ExpVector) -> Ordering {
    debug_assert_eq!(a.len(), b.len());
    for (ea, eb) in a.entries().iter().zip(b.entries().iter()) {
        let (pa, _) = ea.signed_parts();
        let (pb, _) = eb.signed_parts();
        match pa.leading().cmp(&pb.leading()) {
            Ordering::Equal => continue,
            ord => return ord,
        }
    }
    Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(entries: &[&[i64]]) -> ExpVector {
        ExpVector::from_i64s(entries)
    }

    #[test]
    fn sign_pattern_examples() {
        assert_eq!(v(&[&[-1, 1], &[1, -1]]).sign_pattern().to_string(), "+-");
        assert_eq!(v(&[&[1, -1, 1], &[-1, 1]]).sign_pattern().to_string(), "++");
        assert!(v(&[&[], &[]]).sign_pattern().is_all_zero());
    }

    #[test]
    fn signature_examples() {
        assert_eq!(
            v(&[&[-1, 1], &[1, -1]]).signature(),
            Signature::from_i64s(&[1, 1, 1, 1, 0, 0])
        );
        assert_eq!(
            v(&[&[1, -1, 1], &[-1, 1, -1]]).signature(),
            Signature::from_i64s(&[2, 1, 2, 1, 1, 1])
        );
        // Negative parts vanish: degrees report -1.
        assert_eq!(
            v(&[&[1, 0, 0, 1], &[-1, 0, 0, -1]]).signature(),
            Signature::from_i64s(&[3, 1, 3, 1, -1, -1])
        );
    }

    #[test]
    fn signature_negation_invariant() {
        let h = v(&[&[1, -1, 1], &[-1, 1]]);
        assert_eq!(h.signature(), h.neg().signature());
        assert_eq!(h.sign_pattern().flip(), h.neg().sign_pattern());
    }

    #[test]
    fn measure_comparison() {
        let small = v(&[&[-1, 1], &[1, -1]]);
        let big = v(&[&[-1, 0, 1], &[1, 0, -1]]);
        assert_eq!(leading_tuple_cmp(&small, &big), Ordering::Less);
        assert_eq!(leading_tuple_cmp(&big, &big), Ordering::Equal);
    }
}
