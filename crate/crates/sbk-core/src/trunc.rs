//! The truncated sigma-polynomial ring: commutative polynomials with
//! rational coefficients in the variables `y[i][j]` for `1 <= i <= n`,
//! `0 <= j <= D`, where `y[i][j]` realizes the j-th transform of the i-th
//! indeterminate. All bounded engines operate in this ring.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::expvec::ExpVector;
use crate::poly::SymPoly;

/// Ring context: dimension `n` and truncation degree `D`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct TruncRing {
    pub n: usize,
    pub d: usize,
}

impl TruncRing {
    pub fn new(n: usize, d: usize) -> Self {
        assert!(n >= 1 && d >= 1, "ring needs n >= 1 and D >= 1");
        TruncRing { n, d }
    }

    pub fn var_count(&self) -> usize {
        self.n * (self.d + 1)
    }

    pub fn var_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j <= self.d);
        i * (self.d + 1) + j
    }

    pub fn var_pair(&self, idx: usize) -> (usize, usize) {
        (idx / (self.d + 1), idx % (self.d + 1))
    }

    /// The variable `y[i+1][j]` as a monomial (`i` is 0-based here).
    pub fn var_monomial(&self, i: usize, j: usize) -> TruncMonomial {
        let mut exps = vec![0u32; self.var_count()];
        exps[self.var_index(i, j)] = 1;
        TruncMonomial { exps }
    }
}

/// Monomial as a dense exponent matrix `e[i][j]`, flattened.
///
/// `Ord` is the fixed global monomial order of the ring: total degree first,
/// ties by lexicographic comparison with variables ordered by `(i, j)`
/// ascending.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TruncMonomial {
    exps: Vec<u32>,
}

impl TruncMonomial {
    pub fn one(ring: &TruncRing) -> Self {
        TruncMonomial { exps: vec![0; ring.var_count()] }
    }

    pub fn from_exps(exps: Vec<u32>) -> Self {
        TruncMonomial { exps }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn total_degree(&self) -> u64 {
        self.exps.iter().map(|&e| e as u64).sum()
    }

    pub fn mul(&self, other: &TruncMonomial) -> TruncMonomial {
        TruncMonomial {
            exps: self
                .exps
                .iter()
                .zip(other.exps.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn divides(&self, other: &TruncMonomial) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller must ensure divisibility.
    pub fn div_into(&self, other: &TruncMonomial) -> TruncMonomial {
        TruncMonomial {
            exps: other
                .exps
                .iter()
                .zip(self.exps.iter())
                .map(|(b, a)| b - a)
                .collect(),
        }
    }

    pub fn lcm(&self, other: &TruncMonomial) -> TruncMonomial {
        TruncMonomial {
            exps: self
                .exps
                .iter()
                .zip(other.exps.iter())
                .map(|(a, b)| *a.max(b))
                .collect(),
        }
    }

    pub fn gcd(&self, other: &TruncMonomial) -> TruncMonomial {
        TruncMonomial {
            exps: self
                .exps
                .iter()
                .zip(other.exps.iter())
                .map(|(a, b)| *a.min(b))
                .collect(),
        }
    }
}

impl Ord for TruncMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.exps.iter().zip(other.exps.iter()) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for TruncMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in the truncated ring; no zero coefficients are stored.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct TruncPoly {
    ring: TruncRing,
    terms: BTreeMap<TruncMonomial, BigRational>,
}

impl TruncPoly {
    pub fn zero(ring: &TruncRing) -> Self {
        TruncPoly { ring: *ring, terms: BTreeMap::new() }
    }

    pub fn constant(ring: &TruncRing, c: BigRational) -> Self {
        let mut p = TruncPoly::zero(ring);
        p.add_term(TruncMonomial::one(ring), c);
        p
    }

    pub fn one(ring: &TruncRing) -> Self {
        TruncPoly::constant(ring, BigRational::one())
    }

    pub fn from_monomial(ring: &TruncRing, m: TruncMonomial) -> Self {
        let mut p = TruncPoly::zero(ring);
        p.add_term(m, BigRational::one());
        p
    }

    pub fn ring(&self) -> &TruncRing {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TruncMonomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: TruncMonomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Leading term under the ring's monomial order.
    pub fn leading_term(&self) -> Option<(&TruncMonomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn add(&self, other: &TruncPoly) -> TruncPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &TruncPoly) -> TruncPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> TruncPoly {
        let mut out = TruncPoly::zero(&self.ring);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> TruncPoly {
        if c.is_zero() {
            return TruncPoly::zero(&self.ring);
        }
        let mut out = TruncPoly::zero(&self.ring);
        for (m, a) in &self.terms {
            out.terms.insert(m.clone(), a * c);
        }
        out
    }

    pub fn mul_monomial(&self, m: &TruncMonomial) -> TruncPoly {
        let mut out = TruncPoly::zero(&self.ring);
        for (a, c) in &self.terms {
            out.terms.insert(a.mul(m), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &TruncPoly) -> TruncPoly {
        let mut out = TruncPoly::zero(&self.ring);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn square(&self) -> TruncPoly {
        self.mul(self)
    }

    /// Divides out the common monomial factor; returns `(content, primitive)`
    /// with `self = content * primitive`.
    pub fn monomial_content_split(&self) -> (TruncMonomial, TruncPoly) {
        let Some((first, _)) = self.terms.iter().next() else {
            return (TruncMonomial::one(&self.ring), self.clone());
        };
        let mut content = first.clone();
        for (m, _) in self.terms.iter().skip(1) {
            content = content.gcd(m);
            if content.is_one() {
                break;
            }
        }
        if content.is_one() {
            return (content, self.clone());
        }
        let mut prim = TruncPoly::zero(&self.ring);
        for (m, c) in &self.terms {
            prim.terms.insert(content.div_into(m), c.clone());
        }
        (content, prim)
    }

    /// True if the polynomial is `c * M` for a single monomial `M`.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// True if the polynomial is a difference `a (Y^u - Y^v)` of two
    /// monomials with opposite coefficients.
    pub fn is_pure_binomial_shape(&self) -> bool {
        if self.terms.len() != 2 {
            return false;
        }
        let mut it = self.terms.values();
        let (a, b) = (it.next().unwrap(), it.next().unwrap());
        *a == -b.clone()
    }

    /// Normalizes so the leading coefficient is 1.
    pub fn monic(&self) -> TruncPoly {
        match self.leading_term() {
            None => self.clone(),
            Some((_, lc)) => {
                let inv = BigRational::one() / lc.clone();
                self.scale(&inv)
            }
        }
    }

    /// Canonical representative up to a global nonzero rational factor:
    /// monic, and for sign-symmetric shapes deterministic by construction.
    pub fn canonical_scalar_form(&self) -> TruncPoly {
        self.monic()
    }
}

/// Expands a monomial support `f` in `N[x]^n` into the truncated ring: the
/// coefficient `c` of `x^j` in `f_i` becomes the exponent of `y[i][j]`.
pub fn expand(ring: &TruncRing, f: &ExpVector) -> Result<TruncMonomial> {
    if f.len() != ring.n {
        return Err(Error::DimensionMismatch { expected: ring.n, got: f.len() });
    }
    let mut exps = vec![0u32; ring.var_count()];
    for (i, e) in f.entries().iter().enumerate() {
        if !e.is_nonneg() {
            return Err(Error::Precondition {
                op: "expand",
                detail: format!("support entry {e} has a negative coefficient"),
            });
        }
        if e.deg() > ring.d as i64 {
            return Err(Error::TruncationOverflow { index: e.deg() as usize, max: ring.d });
        }
        for j in 0..=(e.deg().max(0) as usize) {
            let c = e.coeff(j);
            let c32 = u32::try_from(c).map_err(|_| Error::Precondition {
                op: "expand",
                detail: "exponent coefficient exceeds u32".into(),
            })?;
            exps[ring.var_index(i, j)] = c32;
        }
    }
    Ok(TruncMonomial { exps })
}

/// The difference binomial `Y^{f} - Y^{g}` of two supports, expanded.
pub fn expand_binomial(ring: &TruncRing, plus: &ExpVector, minus: &ExpVector) -> Result<TruncPoly> {
    let mut p = TruncPoly::zero(ring);
    p.add_term(expand(ring, plus)?, BigRational::one());
    p.add_term(expand(ring, minus)?, -BigRational::one());
    Ok(p)
}

/// The shift endomorphism: replaces every `y[i][j]` by `y[i][j+1]`.
/// Constants are fixed. Errors when a `y[i][D]` occurs.
pub fn shift(p: &TruncPoly) -> Result<TruncPoly> {
    let ring = p.ring;
    let mut out = TruncPoly::zero(&ring);
    for (m, c) in &p.terms {
        let mut exps = vec![0u32; ring.var_count()];
        for (idx, &e) in m.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let (i, j) = ring.var_pair(idx);
            if j == ring.d {
                return Err(Error::TruncationOverflow { index: j + 1, max: ring.d });
            }
            exps[ring.var_index(i, j + 1)] = e;
        }
        out.terms.insert(TruncMonomial { exps }, c.clone());
    }
    Ok(out)
}

/// Applies `shift` `s` times.
pub fn shift_pow(p: &TruncPoly, s: usize) -> Result<TruncPoly> {
    let mut out = p.clone();
    for _ in 0..s {
        out = shift(&out)?;
    }
    Ok(out)
}

/// The exponent vector of a pure monomial, as an element of `N[x]^n`.
pub fn monomial_support(ring: &TruncRing, m: &TruncMonomial) -> ExpVector {
    let mut entries = Vec::with_capacity(ring.n);
    for i in 0..ring.n {
        let coeffs: Vec<BigInt> = (0..=ring.d)
            .map(|j| BigInt::from(m.exps[ring.var_index(i, j)]))
            .collect();
        entries.push(SymPoly::from_coeffs(coeffs));
    }
    ExpVector::new(entries)
}

impl fmt::Display for TruncPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            write!(f, "{}", a)?;
            for (idx, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let (i, j) = self.ring.var_pair(idx);
                write!(f, " * y[{}][{}]^{}", i + 1, j, e)?;
            }
        }
        Ok(())
    }
}

/// Parses the textual format printed by `Display`: a signed sum of terms
/// `c * y[i][j]^e * ...`, with `c` a rational like `3` or `-5/2`; the
/// coefficient and exponents may be omitted when they are 1.
pub fn parse_trunc_poly(ring: &TruncRing, input: &str) -> Result<TruncPoly> {
    let mut p = TruncPoly::zero(ring);
    let s = input.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial text".into()));
    }
    if s == "0" {
        return Ok(p);
    }
    let mut chars = s.chars().peekable();
    let mut sign = BigRational::one();
    let mut expect_term = true;
    loop {
        skip_ws(&mut chars);
        match chars.peek() {
            None => {
                if expect_term {
                    return Err(Error::Parse("trailing sign without a term".into()));
                }
                break;
            }
            Some('+') => {
                if expect_term {
                    return Err(Error::Parse("unexpected '+'".into()));
                }
                chars.next();
                sign = BigRational::one();
                expect_term = true;
                continue;
            }
            Some('-') => {
                chars.next();
                sign = if expect_term { -sign } else { -BigRational::one() };
                expect_term = true;
                continue;
            }
            _ => {}
        }
        if !expect_term {
            return Err(Error::Parse(format!("unexpected input at `{}`", rest(&mut chars))));
        }
        let (m, c) = parse_term(ring, &mut chars)?;
        p.add_term(m, &sign * c);
        sign = BigRational::one();
        expect_term = false;
    }
    Ok(p)
}

fn rest(chars: &mut std::iter::Peekable<std::str::Chars>) -> String {
    chars.collect()
}

fn skip_ws(chars: &mut std::iter::Peekable<std::str::Chars>) {
    while chars.peek().map_or(false, |c| c.is_whitespace()) {
        chars.next();
    }
}

fn parse_term(
    ring: &TruncRing,
    chars: &mut std::iter::Peekable<std::str::Chars>,
) -> Result<(TruncMonomial, BigRational)> {
    skip_ws(chars);
    let mut coef = BigRational::one();
    let mut have_any = false;
    if chars.peek().map_or(false, |c| c.is_ascii_digit()) {
        coef = parse_rational(chars)?;
        have_any = true;
    }
    let mut exps = vec![0u32; ring.var_count()];
    loop {
        skip_ws(chars);
        let mut after_star = false;
        if chars.peek() == Some(&'*') {
            chars.next();
            skip_ws(chars);
            after_star = true;
        }
        if chars.peek() != Some(&'y') {
            if after_star {
                return Err(Error::Parse("dangling '*' without a variable".into()));
            }
            break;
        }
        if have_any && !after_star {
            return Err(Error::Parse("factors must be separated by '*'".into()));
        }
        chars.next();
        let i = parse_bracketed(chars)?;
        let j = parse_bracketed(chars)?;
        if i == 0 || i > ring.n {
            return Err(Error::Parse(format!("variable index i={} out of range 1..={}", i, ring.n)));
        }
        if j > ring.d {
            return Err(Error::Parse(format!("shift index j={} exceeds D={}", j, ring.d)));
        }
        let e = if chars.peek() == Some(&'^') {
            chars.next();
            parse_usize(chars)?
        } else {
            1
        };
        exps[ring.var_index(i - 1, j)] += u32::try_from(e)
            .map_err(|_| Error::Parse("exponent too large".into()))?;
        have_any = true;
    }
    if !have_any {
        return Err(Error::Parse("expected coefficient or variable".into()));
    }
    Ok((TruncMonomial { exps }, coef))
}

fn parse_bracketed(chars: &mut std::iter::Peekable<std::str::Chars>) -> Result<usize> {
    if chars.next() != Some('[') {
        return Err(Error::Parse("expected '['".into()));
    }
    let v = parse_usize(chars)?;
    if chars.next() != Some(']') {
        return Err(Error::Parse("expected ']'".into()));
    }
    Ok(v)
}

fn parse_usize(chars: &mut std::iter::Peekable<std::str::Chars>) -> Result<usize> {
    let mut digits = String::new();
    while chars.peek().map_or(false, |c| c.is_ascii_digit()) {
        digits.push(chars.next().unwrap());
    }
    digits
        .parse::<usize>()
        .map_err(|e| Error::Parse(format!("bad integer: {e}")))
}

fn parse_bigint(chars: &mut std::iter::Peekable<std::str::Chars>) -> Result<BigInt> {
    let mut digits = String::new();
    while chars.peek().map_or(false, |c| c.is_ascii_digit()) {
        digits.push(chars.next().unwrap());
    }
    digits
        .parse::<BigInt>()
        .map_err(|e| Error::Parse(format!("bad integer: {e}")))
}

fn parse_rational(chars: &mut std::iter::Peekable<std::str::Chars>) -> Result<BigRational> {
    let num = parse_bigint(chars)?;
    let den = if chars.peek() == Some(&'/') {
        chars.next();
        parse_bigint(chars)?
    } else {
        BigInt::one()
    };
    if den.is_zero() {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(BigRational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> TruncRing {
        TruncRing::new(2, 2)
    }

    fn v(entries: &[&[i64]]) -> ExpVector {
        ExpVector::from_i64s(entries)
    }

    #[test]
    fn expand_examples() {
        let r = TruncRing::new(2, 1);
        let m = expand(&r, &v(&[&[0, 1], &[1]])).unwrap();
        // y[1][1] * y[2][0]
        assert_eq!(m.exps(), &[0, 1, 1, 0]);

        let r2 = ring();
        let m2 = expand(&r2, &v(&[&[1, 0, 1], &[0, 1]])).unwrap();
        // y[1][2] * y[1][0] * y[2][1]
        assert_eq!(m2.exps(), &[1, 0, 1, 0, 1, 0]);

        let one = expand(&r2, &v(&[&[], &[]])).unwrap();
        assert!(one.is_one());
    }

    #[test]
    fn expand_overflow() {
        let r = TruncRing::new(2, 1);
        let err = expand(&r, &v(&[&[0, 0, 1], &[]])).unwrap_err();
        assert!(matches!(err, Error::TruncationOverflow { .. }));
    }

    #[test]
    fn expand_is_monoid_morphism() {
        let r = TruncRing::new(2, 3);
        let a = v(&[&[1, 2], &[0, 0, 1]]);
        let b = v(&[&[0, 1, 1], &[2]]);
        let lhs = expand(&r, &a.add(&b)).unwrap();
        let rhs = expand(&r, &a).unwrap().mul(&expand(&r, &b).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn shift_example() {
        let r = ring();
        // B = y[1][1] y[2][0] - y[1][0] y[2][1]
        let b = expand_binomial(&r, &v(&[&[0, 1], &[1]]), &v(&[&[1], &[0, 1]])).unwrap();
        let sb = shift(&b).unwrap();
        let expected =
            expand_binomial(&r, &v(&[&[0, 0, 1], &[0, 1]]), &v(&[&[0, 1], &[0, 0, 1]])).unwrap();
        assert_eq!(sb, expected);

        let c = TruncPoly::constant(&r, BigRational::from(BigInt::from(5)));
        assert_eq!(shift(&c).unwrap(), c);

        let top = TruncPoly::from_monomial(&r, r.var_monomial(0, 2));
        assert!(matches!(shift(&top), Err(Error::TruncationOverflow { .. })));
    }

    #[test]
    fn shift_is_ring_endomorphism() {
        let r = TruncRing::new(2, 3);
        let p = expand_binomial(&r, &v(&[&[0, 1], &[1]]), &v(&[&[1], &[0, 1]])).unwrap();
        let q = expand_binomial(&r, &v(&[&[0, 0, 1], &[1]]), &v(&[&[2], &[0, 1]])).unwrap();
        assert_eq!(
            shift(&p.mul(&q)).unwrap(),
            shift(&p).unwrap().mul(&shift(&q).unwrap())
        );
        assert_eq!(
            shift(&p.add(&q)).unwrap(),
            shift(&p).unwrap().add(&shift(&q).unwrap())
        );
    }

    #[test]
    fn monomial_order_is_deglex() {
        let r = ring();
        let y10 = TruncMonomial::from_exps(vec![1, 0, 0, 0, 0, 0]);
        let y11 = TruncMonomial::from_exps(vec![0, 1, 0, 0, 0, 0]);
        let y20 = TruncMonomial::from_exps(vec![0, 0, 0, 1, 0, 0]);
        // Degree dominates.
        assert!(y10.mul(&y20) > y11);
        // Same degree: earlier variable with the larger exponent wins.
        assert!(y10 > y11);
        assert!(y11 > y20);
        let _ = r;
    }

    #[test]
    fn content_split() {
        let r = ring();
        let b = expand_binomial(&r, &v(&[&[0, 1], &[1]]), &v(&[&[1], &[0, 1]])).unwrap();
        let m = expand(&r, &v(&[&[1], &[0, 0, 2]])).unwrap();
        let prod = b.mul_monomial(&m);
        let (content, prim) = prod.monomial_content_split();
        assert_eq!(content, m);
        assert_eq!(prim, b);
    }

    #[test]
    fn display_and_parse_round_trip() {
        let r = ring();
        let b = expand_binomial(&r, &v(&[&[0, 1], &[1]]), &v(&[&[1], &[0, 1]])).unwrap();
        let text = b.to_string();
        // Leading monomial first: y[1][0] has the highest precedence.
        assert_eq!(text, "-1 * y[1][0]^1 * y[2][1]^1 + 1 * y[1][1]^1 * y[2][0]^1");
        assert_eq!(parse_trunc_poly(&r, &text).unwrap(), b);

        let c = TruncPoly::constant(&r, BigRational::new(BigInt::from(-3), BigInt::from(2)));
        assert_eq!(parse_trunc_poly(&r, &c.to_string()).unwrap(), c);

        let z = TruncPoly::zero(&r);
        assert_eq!(parse_trunc_poly(&r, &z.to_string()).unwrap(), z);

        // Shorthand: omitted coefficient and exponent.
        let p = parse_trunc_poly(&r, "y[1][0] + 2 * y[2][1]^2").unwrap();
        assert_eq!(p.term_count(), 2);
        assert_eq!(parse_trunc_poly(&r, &p.to_string()).unwrap(), p);
    }

    #[test]
    fn parse_rejects_out_of_range() {
        let r = ring();
        assert!(parse_trunc_poly(&r, "y[3][0]").is_err());
        assert!(parse_trunc_poly(&r, "y[1][5]").is_err());
        assert!(parse_trunc_poly(&r, "1 +").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_poly(r: TruncRing) -> impl Strategy<Value = TruncPoly> {
            proptest::collection::vec(
                (
                    proptest::collection::vec(0u32..3, r.var_count()),
                    -4i64..=4,
                ),
                0..5,
            )
            .prop_map(move |terms| {
                let mut p = TruncPoly::zero(&r);
                for (exps, c) in terms {
                    p.add_term(
                        TruncMonomial::from_exps(exps),
                        BigRational::from(BigInt::from(c)),
                    );
                }
                p
            })
        }

        proptest! {
            #[test]
            fn text_round_trip(p in arb_poly(TruncRing::new(2, 2))) {
                let r = TruncRing::new(2, 2);
                let back = parse_trunc_poly(&r, &p.to_string()).unwrap();
                prop_assert_eq!(back, p);
            }

            #[test]
            fn mul_distributes(a in arb_poly(TruncRing::new(2, 1)),
                               b in arb_poly(TruncRing::new(2, 1)),
                               c in arb_poly(TruncRing::new(2, 1))) {
                prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            }
        }
    }
}
