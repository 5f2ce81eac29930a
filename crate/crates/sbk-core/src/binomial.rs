//! Pure difference binomials `Y^a - Y^b` given by two supports in `N[x]^n`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expvec::ExpVector;
use crate::lattice::Lattice;
use crate::trunc::{expand_binomial, TruncPoly, TruncRing};

/// A pure binomial with componentwise disjoint supports, canonically
/// oriented so `Y^a - Y^b` and `Y^b - Y^a` are one value up to a recorded
/// sign.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct DiffBinomial {
    plus: ExpVector,
    minus: ExpVector,
}

impl DiffBinomial {
    /// Normalizes: cancels common monomial parts componentwise, then orients
    /// so the larger support comes first. Returns the recorded sign: `1` if
    /// the stored value equals `Y^plus - Y^minus` as given, `-1` if the
    /// orientation was flipped.
    pub fn new(plus: ExpVector, minus: ExpVector) -> Result<(DiffBinomial, i8)> {
        if plus.len() != minus.len() {
            return Err(Error::DimensionMismatch { expected: plus.len(), got: minus.len() });
        }
        if !plus.is_nonneg() || !minus.is_nonneg() {
            return Err(Error::Precondition {
                op: "DiffBinomial::new",
                detail: "supports must lie in N[x]^n".into(),
            });
        }
        let common = plus.coeff_min(&minus);
        let plus = plus.sub(&common);
        let minus = minus.sub(&common);
        if plus == minus {
            return Err(Error::ZeroBinomial);
        }
        match plus.cmp(&minus) {
            Ordering::Greater => Ok((DiffBinomial { plus, minus }, 1)),
            _ => Ok((DiffBinomial { plus: minus, minus: plus }, -1)),
        }
    }

    /// The binomial `Y^{h_+} - Y^{h_-}` of a nonzero lattice vector, split
    /// into positive and negative parts componentwise.
    pub fn of_vector(h: &ExpVector) -> Result<(DiffBinomial, i8)> {
        if h.is_zero() {
            return Err(Error::ZeroVector);
        }
        let (plus, minus) = h.split_parts();
        DiffBinomial::new(plus, minus)
    }

    pub fn n(&self) -> usize {
        self.plus.len()
    }

    pub fn plus(&self) -> &ExpVector {
        &self.plus
    }

    pub fn minus(&self) -> &ExpVector {
        &self.minus
    }

    /// The lattice vector `plus - minus`.
    pub fn vector(&self) -> ExpVector {
        self.plus.sub(&self.minus)
    }

    /// Largest shift index needed to express the binomial.
    pub fn max_deg(&self) -> i64 {
        self.plus.max_deg().max(self.minus.max_deg())
    }

    /// Expansion into a truncated ring.
    pub fn expand(&self, ring: &TruncRing) -> Result<TruncPoly> {
        expand_binomial(ring, &self.plus, &self.minus)
    }
}

impl fmt::Display for DiffBinomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Y^{} - Y^{}", self.plus, self.minus)
    }
}

/// The support lattice generated by `plus - minus` over a set of binomials.
pub fn lattice_of_binomials(n: usize, binomials: &[DiffBinomial]) -> Result<Lattice> {
    let gens = binomials.iter().map(DiffBinomial::vector).collect();
    Lattice::new(n, gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(entries: &[&[i64]]) -> ExpVector {
        ExpVector::from_i64s(entries)
    }

    #[test]
    fn of_vector_examples() {
        // (x-1, 1-x) -> y1^x y2 - y1 y2^x
        let (b, _) = DiffBinomial::of_vector(&v(&[&[-1, 1], &[1, -1]])).unwrap();
        assert_eq!(b.plus(), &v(&[&[0, 1], &[1]]));
        assert_eq!(b.minus(), &v(&[&[1], &[0, 1]]));

        // (x^2-x+1, x-1) -> y1^{x^2+1} y2^x - y1^x y2
        let (b, _) = DiffBinomial::of_vector(&v(&[&[1, -1, 1], &[-1, 1]])).unwrap();
        assert_eq!(b.plus(), &v(&[&[1, 0, 1], &[0, 1]]));
        assert_eq!(b.minus(), &v(&[&[0, 1], &[1]]));

        // (x^3+1, x^2-1) -> y1^{x^3+1} y2^{x^2} - y2
        let (b, _) = DiffBinomial::of_vector(&v(&[&[1, 0, 0, 1], &[-1, 0, 1]])).unwrap();
        assert_eq!(b.plus(), &v(&[&[1, 0, 0, 1], &[0, 0, 1]]));
        assert_eq!(b.minus(), &v(&[&[], &[1]]));
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(matches!(
            DiffBinomial::of_vector(&ExpVector::zero(2)),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn degenerate_binomial_rejected() {
        let s = v(&[&[2], &[]]);
        assert!(matches!(DiffBinomial::new(s.clone(), s), Err(Error::ZeroBinomial)));
    }

    #[test]
    fn orientation_is_canonical() {
        let a = v(&[&[0, 1], &[1]]);
        let b = v(&[&[1], &[0, 1]]);
        let (x, sx) = DiffBinomial::new(a.clone(), b.clone()).unwrap();
        let (y, sy) = DiffBinomial::new(b, a).unwrap();
        assert_eq!(x, y);
        assert_eq!(sx, -sy);
    }

    #[test]
    fn common_parts_cancelled() {
        // y1^{1+x} y2 - y1 y2^{1+x} normalizes to y1^x y2 - y1 y2^x... after
        // cancelling the shared y1 y2 it is y1^x - y2^x.
        let (b, _) = DiffBinomial::new(v(&[&[1, 1], &[1]]), v(&[&[1], &[1, 1]])).unwrap();
        assert_eq!(b.plus(), &v(&[&[0, 1], &[]]));
        assert_eq!(b.minus(), &v(&[&[], &[0, 1]]));
    }

    #[test]
    fn lattice_round_trip() {
        let vs = [v(&[&[-1, 1], &[1, -1]]), v(&[&[1, -1, 1], &[-1, 1]])];
        let bins: Vec<DiffBinomial> = vs
            .iter()
            .map(|h| DiffBinomial::of_vector(h).unwrap().0)
            .collect();
        let lat = lattice_of_binomials(2, &bins).unwrap();
        let expected = Lattice::new(2, vs.to_vec()).unwrap();
        assert_eq!(lat, expected);
    }

    #[test]
    fn empty_set_gives_zero_lattice() {
        assert!(lattice_of_binomials(2, &[]).unwrap().is_zero());
    }
}
