//! Membership certificates for radical well-mixed closures.
//!
//! A certificate is a DAG of inference steps over the truncated ring:
//!
//! - `AXIOM`: a stated generator;
//! - `IDEAL`: a linear combination of earlier steps with explicit
//!   polynomial cofactors;
//! - `SHIFT`: the image of an earlier step under the shift endomorphism;
//! - `WELLMIXED`: from a factored product `a * b` conclude `a * shift(b)`;
//! - `RADICAL`: from `p^2` conclude `p`.
//!
//! The checker validates each step by exact expansion and never needs
//! completion, so it is independently trustworthy relative to the search
//! that produced the certificate.

use std::collections::BTreeMap;
use std::fmt;

use num::rational::BigRational;
use num::{BigInt, One};
use serde::{Deserialize, Serialize};

use crate::binomial::{lattice_of_binomials, DiffBinomial};
use crate::basis::{find_reducer, reduce_once};
use crate::error::{Error, Result};
use crate::expvec::ExpVector;
use crate::lattice::truncated_member;
use crate::poly::SymPoly;
use crate::trunc::{
    expand, expand_binomial, parse_trunc_poly, shift, TruncMonomial, TruncPoly, TruncRing,
};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Rule {
    Axiom,
    Ideal,
    Shift,
    WellMixed,
    Radical,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Axiom => "AXIOM",
            Rule::Ideal => "IDEAL",
            Rule::Shift => "SHIFT",
            Rule::WellMixed => "WELLMIXED",
            Rule::Radical => "RADICAL",
        };
        write!(f, "{}", s)
    }
}

/// Rule-specific payload data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepData {
    None,
    /// Cofactors parallel to the premise list.
    Ideal { cofactors: Vec<TruncPoly> },
    /// The tracked factorization `premise = a * b`; the conclusion is
    /// `a * shift(b)`.
    WellMixed { a: TruncPoly, b: TruncPoly },
}

#[derive(Clone, Debug)]
pub struct CertStep {
    pub id: usize,
    pub rule: Rule,
    pub premises: Vec<usize>,
    pub payload: TruncPoly,
    pub data: StepData,
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub n: usize,
    pub d: usize,
    pub goal: TruncPoly,
    pub steps: Vec<CertStep>,
}

/// A failed check, pointing at the offending step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckFailure {
    pub step_id: Option<usize>,
    pub reason: String,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.step_id {
            Some(id) => write!(f, "step {}: {}", id, self.reason),
            None => write!(f, "{}", self.reason),
        }
    }
}

/// Validates every step of the certificate against the axiom set by exact
/// expansion. Returns the diagnostic for the first failing step.
pub fn check_certificate(
    cert: &Certificate,
    axioms: &[TruncPoly],
) -> std::result::Result<(), CheckFailure> {
    let ring = TruncRing::new(cert.n.max(1), cert.d.max(1));
    let fail = |id: Option<usize>, reason: String| CheckFailure { step_id: id, reason };
    if cert.steps.is_empty() {
        return Err(fail(None, "certificate has no steps".into()));
    }
    for (pos, step) in cert.steps.iter().enumerate() {
        if step.id != pos {
            return Err(fail(Some(step.id), format!("step ids must be sequential, expected {pos}")));
        }
        if step.payload.ring() != &ring {
            return Err(fail(Some(step.id), "payload ring mismatch".into()));
        }
        for &p in &step.premises {
            if p >= pos {
                return Err(fail(Some(step.id), format!("premise {p} does not precede the step")));
            }
        }
        let premise = |k: usize| -> &TruncPoly { &cert.steps[step.premises[k]].payload };
        match (&step.rule, &step.data) {
            (Rule::Axiom, StepData::None) => {
                if !step.premises.is_empty() {
                    return Err(fail(Some(step.id), "axiom steps take no premises".into()));
                }
                if !axioms.iter().any(|a| a == &step.payload) {
                    return Err(fail(Some(step.id), "payload is not a stated axiom".into()));
                }
            }
            (Rule::Ideal, StepData::Ideal { cofactors }) => {
                if cofactors.len() != step.premises.len() || step.premises.is_empty() {
                    return Err(fail(Some(step.id), "cofactors must parallel premises".into()));
                }
                let mut acc = TruncPoly::zero(&ring);
                for (k, c) in cofactors.iter().enumerate() {
                    acc = acc.add(&c.mul(premise(k)));
                }
                if acc != step.payload {
                    return Err(fail(Some(step.id), "combination does not expand to the payload".into()));
                }
            }
            (Rule::Shift, StepData::None) => {
                if step.premises.len() != 1 {
                    return Err(fail(Some(step.id), "shift takes one premise".into()));
                }
                match shift(premise(0)) {
                    Ok(s) if s == step.payload => {}
                    Ok(_) => return Err(fail(Some(step.id), "payload is not the shift of the premise".into())),
                    Err(_) => return Err(fail(Some(step.id), "premise cannot be shifted within D".into())),
                }
            }
            (Rule::WellMixed, StepData::WellMixed { a, b }) => {
                if step.premises.len() != 1 {
                    return Err(fail(Some(step.id), "well-mixed takes one premise".into()));
                }
                if &a.mul(b) != premise(0) {
                    return Err(fail(Some(step.id), "premise is not the stated product a*b".into()));
                }
                match shift(b) {
                    Ok(sb) if a.mul(&sb) == step.payload => {}
                    Ok(_) => return Err(fail(Some(step.id), "payload is not a * shift(b)".into())),
                    Err(_) => return Err(fail(Some(step.id), "factor b cannot be shifted within D".into())),
                }
            }
            (Rule::Radical, StepData::None) => {
                if step.premises.len() != 1 {
                    return Err(fail(Some(step.id), "radical takes one premise".into()));
                }
                if &step.payload.square() != premise(0) {
                    return Err(fail(Some(step.id), "premise is not the square of the payload".into()));
                }
            }
            _ => {
                return Err(fail(Some(step.id), "rule/data mismatch".into()));
            }
        }
    }
    let last = cert.steps.last().unwrap();
    if last.payload != cert.goal {
        return Err(fail(Some(last.id), "final payload differs from the goal".into()));
    }
    Ok(())
}

/// Rule toggles shared by the certificate builder and the closure engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleToggles {
    pub shift: bool,
    pub wellmixed: bool,
    pub radical: bool,
}

impl Default for RuleToggles {
    fn default() -> Self {
        RuleToggles { shift: true, wellmixed: true, radical: true }
    }
}

impl RuleToggles {
    pub fn all() -> Self {
        Self::default()
    }
}

/// Step-count-capped builder; computes payloads so each emitted step is
/// well-formed by construction.
pub struct CertBuilder {
    ring: TruncRing,
    steps: Vec<CertStep>,
    toggles: RuleToggles,
    max_steps: usize,
}

pub type StepId = usize;

impl CertBuilder {
    pub fn new(ring: TruncRing, toggles: RuleToggles, max_steps: usize) -> Self {
        CertBuilder { ring, steps: Vec::new(), toggles, max_steps }
    }

    pub fn ring(&self) -> &TruncRing {
        &self.ring
    }

    pub fn payload(&self, id: StepId) -> &TruncPoly {
        &self.steps[id].payload
    }

    fn push(&mut self, rule: Rule, premises: Vec<usize>, payload: TruncPoly, data: StepData) -> Result<StepId> {
        if self.steps.len() >= self.max_steps {
            return Err(Error::ResourceCap {
                context: "certificate builder",
                detail: format!("more than {} steps", self.max_steps),
            });
        }
        let id = self.steps.len();
        self.steps.push(CertStep { id, rule, premises, payload, data });
        Ok(id)
    }

    pub fn axiom(&mut self, p: TruncPoly) -> Result<StepId> {
        self.push(Rule::Axiom, vec![], p, StepData::None)
    }

    pub fn ideal(&mut self, parts: &[(StepId, TruncPoly)]) -> Result<StepId> {
        let mut payload = TruncPoly::zero(&self.ring);
        let mut premises = Vec::new();
        let mut cofactors = Vec::new();
        for (id, c) in parts {
            if c.is_zero() {
                continue;
            }
            payload = payload.add(&c.mul(self.payload(*id)));
            premises.push(*id);
            cofactors.push(c.clone());
        }
        if premises.is_empty() {
            return Err(Error::Precondition {
                op: "CertBuilder::ideal",
                detail: "an ideal step needs at least one nonzero cofactor".into(),
            });
        }
        self.push(Rule::Ideal, premises, payload, StepData::Ideal { cofactors })
    }

    pub fn scale(&mut self, id: StepId, c: BigRational) -> Result<StepId> {
        let cof = TruncPoly::constant(&self.ring, c);
        self.ideal(&[(id, cof)])
    }

    pub fn mul_monomial(&mut self, id: StepId, m: &TruncMonomial) -> Result<StepId> {
        if m.is_one() {
            return Ok(id);
        }
        let cof = TruncPoly::from_monomial(&self.ring, m.clone());
        self.ideal(&[(id, cof)])
    }

    pub fn shift_step(&mut self, id: StepId) -> Result<StepId> {
        if !self.toggles.shift {
            return Err(Error::RuleDisabled { rule: "shift" });
        }
        let payload = shift(self.payload(id))?;
        self.push(Rule::Shift, vec![id], payload, StepData::None)
    }

    /// From a premise with payload `a * b`, concludes `a * shift(b)`.
    pub fn wellmixed(&mut self, premise: StepId, a: TruncPoly, b: TruncPoly) -> Result<StepId> {
        if !self.toggles.wellmixed {
            return Err(Error::RuleDisabled { rule: "wellmixed" });
        }
        debug_assert_eq!(&a.mul(&b), self.payload(premise));
        let payload = a.mul(&shift(&b)?);
        self.push(Rule::WellMixed, vec![premise], payload, StepData::WellMixed { a, b })
    }

    /// From a premise with payload `p^2`, concludes `p`.
    pub fn radical(&mut self, premise: StepId, conclusion: TruncPoly) -> Result<StepId> {
        if !self.toggles.radical {
            return Err(Error::RuleDisabled { rule: "radical" });
        }
        debug_assert_eq!(&conclusion.square(), self.payload(premise));
        self.push(Rule::Radical, vec![premise], conclusion, StepData::None)
    }

    pub fn finish(self, goal_step: StepId) -> Certificate {
        let goal = self.steps[goal_step].payload.clone();
        Certificate { n: self.ring.n, d: self.ring.d, goal, steps: self.steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// The monomial-stripping ladder: from a fact `Y^u * q` in the ideal,
/// derives `Y^w * q` whenever `deg(w_i) >= deg(u_i)` for every coordinate.
///
/// Well-mixed moves push exponent units upward, multiplication fills in the
/// rest, and radical halvings bring the multiplicity back down.
pub fn monomial_adjust(
    b: &mut CertBuilder,
    fact: StepId,
    u: &ExpVector,
    q: &TruncPoly,
    w: &ExpVector,
) -> Result<StepId> {
    let ring = *b.ring();
    debug_assert_eq!(
        &TruncPoly::from_monomial(&ring, expand(&ring, u)?).mul(q),
        b.payload(fact)
    );
    if u == w {
        return Ok(fact);
    }
    for i in 0..u.len() {
        if u.entry(i).deg() > w.entry(i).deg() {
            return Err(Error::Precondition {
                op: "monomial_adjust",
                detail: format!(
                    "target degree {} below source degree {} at coordinate {}",
                    w.entry(i).deg(),
                    u.entry(i).deg(),
                    i
                ),
            });
        }
    }

    // Phase 1: well-mixed unit moves push each coordinate's mass up to the
    // target's top degree.
    let mut cur = u.clone();
    let mut cur_step = fact;
    for i in 0..u.len() {
        if cur.entry(i).is_zero() {
            continue;
        }
        let target_deg = w.entry(i).deg();
        loop {
            let e = cur.entry(i).clone();
            let mut class: Option<usize> = None;
            for jj in 0..(target_deg.max(0) as usize) {
                if e.coeff(jj) > num::BigInt::from(0) {
                    class = Some(jj);
                    break;
                }
            }
            let Some(jj) = class else { break };
            let count = e.coeff(jj);
            // b-part: y_i^{count * x^jj}; a-part: everything else times q.
            let class_poly = SymPoly::monomial(count.clone(), jj);
            let mut rest = cur.clone();
            rest = ExpVector::new(
                (0..rest.len())
                    .map(|k| {
                        if k == i {
                            &rest.entry(k).clone() - &class_poly
                        } else {
                            rest.entry(k).clone()
                        }
                    })
                    .collect(),
            );
            let a_poly =
                TruncPoly::from_monomial(&ring, expand(&ring, &rest)?).mul(q);
            let b_vec = ExpVector::new(
                (0..cur.len())
                    .map(|k| if k == i { class_poly.clone() } else { SymPoly::zero() })
                    .collect(),
            );
            let b_poly = TruncPoly::from_monomial(&ring, expand(&ring, &b_vec)?);
            cur_step = b.wellmixed(cur_step, a_poly, b_poly)?;
            cur = rest.add(&b_vec.shift_by_x_power(1));
        }
    }

    // Phase 2: multiply up to 2^k * w with 2^k covering every mass.
    let mut k = 0u32;
    for i in 0..cur.len() {
        let mass = cur.entry(i).mass();
        while BigInt::from(2u32).pow(k) < mass {
            k += 1;
        }
    }
    let mut scaled_w = w.clone();
    for _ in 0..k {
        scaled_w = scaled_w.add(&scaled_w.clone());
    }
    let fill = scaled_w.sub(&cur);
    debug_assert!(fill.is_nonneg(), "2^k w must cover the moved multiplier");
    if !fill.is_zero() {
        let fill_mono = expand(&ring, &fill)?;
        cur_step = b.mul_monomial(cur_step, &fill_mono)?;
    }

    // Phase 3: halve k times via radical steps.
    let mut level = scaled_w;
    for _ in 0..k {
        let half = ExpVector::new(
            level
                .entries()
                .iter()
                .map(|e| e.div_exact(&BigInt::from(2)))
                .collect(),
        );
        // payload * q = (Y^half q)^2
        let squared = b.ideal(&[(cur_step, q.clone())])?;
        let half_poly = TruncPoly::from_monomial(&ring, expand(&ring, &half)?).mul(q);
        cur_step = b.radical(squared, half_poly)?;
        level = half;
    }
    debug_assert_eq!(level, *w);
    Ok(cur_step)
}

/// Caps for certificate construction.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CertCaps {
    pub max_depth: usize,
    pub max_steps: usize,
    /// Largest cofactor degree tried by the lattice-membership precheck.
    pub precheck_deg: usize,
}

impl Default for CertCaps {
    fn default() -> Self {
        CertCaps { max_depth: 64, max_steps: 50_000, precheck_deg: 6 }
    }
}

/// Builds a membership certificate for the binomial of a lattice vector `h`
/// against a finite basis, by the inductive rewriting followed by the
/// monomial-stripping ladder, the square, and the radical rule.
pub struct CertEngine<'a> {
    builder: CertBuilder,
    basis: &'a [DiffBinomial],
    axiom_steps: BTreeMap<usize, StepId>,
    memo: BTreeMap<ExpVector, StepId>,
    caps: CertCaps,
}

impl<'a> CertEngine<'a> {
    pub fn new(ring: TruncRing, basis: &'a [DiffBinomial], toggles: RuleToggles, caps: CertCaps) -> Self {
        CertEngine {
            builder: CertBuilder::new(ring, toggles, caps.max_steps),
            basis,
            axiom_steps: BTreeMap::new(),
            memo: BTreeMap::new(),
            caps,
        }
    }

    fn ring(&self) -> TruncRing {
        *self.builder.ring()
    }

    /// `Y^{h_+} - Y^{h_-}` for a vector in either orientation.
    fn poly_of(&self, h: &ExpVector) -> Result<TruncPoly> {
        let (plus, minus) = h.split_parts();
        expand_binomial(&self.ring(), &plus, &minus)
    }

    fn monomial_of(&self, u: &ExpVector) -> Result<TruncPoly> {
        Ok(TruncPoly::from_monomial(&self.ring(), expand(&self.ring(), u)?))
    }

    /// Step whose payload equals `poly(v)` for the oriented basis vector `v`.
    fn oriented_basis_step(&mut self, v: &ExpVector) -> Result<StepId> {
        let (canon, sign) = DiffBinomial::of_vector(v)?;
        let idx = self
            .basis
            .iter()
            .position(|b| *b == canon)
            .expect("oriented vector must come from the basis");
        let axiom = match self.axiom_steps.get(&idx) {
            Some(&s) => s,
            None => {
                let payload = canon.expand(&self.ring())?;
                let s = self.builder.axiom(payload)?;
                self.axiom_steps.insert(idx, s);
                s
            }
        };
        if sign == 1 {
            Ok(axiom)
        } else {
            self.builder.scale(axiom, -BigRational::one())
        }
    }

    /// Main entry: a step whose payload is `poly(h)`.
    pub fn certify(&mut self, h: &ExpVector, depth: usize) -> Result<StepId> {
        if let Some(&s) = self.memo.get(h) {
            return Ok(s);
        }
        if depth > self.caps.max_depth {
            return Err(Error::ResourceCap {
                context: "membership certificate",
                detail: format!("recursion deeper than {}", self.caps.max_depth),
            });
        }

        // Exact basis element (in either orientation): a one-step axiom.
        if let Ok((canon, _)) = DiffBinomial::of_vector(h) {
            if self.basis.contains(&canon) {
                let step = self.oriented_basis_step(h)?;
                self.memo.insert(h.clone(), step);
                return Ok(step);
            }
        }

        let g = find_reducer(h, self.basis).ok_or_else(|| Error::NoApplicableBasis {
            stuck: h.to_string(),
        })?;
        let out = reduce_once(h, &g)?;

        // Residual certificate first (strictly smaller measure).
        let w_step = if out.w.is_zero() {
            None
        } else {
            Some(self.certify(&out.w, depth + 1)?)
        };

        let eps = out.epsilon;
        let (hv, gv) = if eps == 1 { (h.clone(), g.clone()) } else { (h.neg(), g.neg()) };
        let (hp, hm) = hv.split_parts();
        let (gp, gm) = gv.split_parts();
        let s = out.s;

        // Shifted copies of the oriented basis binomial, up to sigma^s.
        let g_step = self.oriented_basis_step(&gv)?;
        let mut shifts: Vec<StepId> = vec![g_step];
        for c in 1..=s {
            let prev = shifts[c - 1];
            shifts.push(self.builder.shift_step(prev)?);
        }

        // Fact (i): M * poly(H) = Y^nu * sigma^s(poly(G)) + eps * Y^c * poly(w).
        let nu = self.monomial_of(&out.axiom_cofactor)?;
        let mut parts: Vec<(StepId, TruncPoly)> = vec![(shifts[s], nu)];
        if let Some(ws) = w_step {
            let mut cof = self.monomial_of(&out.residual_cofactor)?;
            if eps == -1 {
                cof = cof.neg();
            }
            parts.push((ws, cof));
        }
        let fact_i = self.builder.ideal(&parts)?;
        let m_vec = out.multiplier.clone();
        debug_assert_eq!(
            self.builder.payload(fact_i),
            &self.monomial_of(&m_vec)?.mul(&self.poly_of(&hv)?)
        );

        // Fact (ii): multiply by y_j^{x^s G_j+ - e} to reach Y^{x^s G_+} * poly(H).
        let r = &gp.entry(out.j).shift_by_x_power(s) - &out.e;
        debug_assert!(r.is_nonneg());
        let r_vec = ExpVector::new(
            (0..hv.len())
                .map(|k| if k == out.j { r.clone() } else { SymPoly::zero() })
                .collect(),
        );
        let fact_ii = {
            let mono = expand(&self.ring(), &r_vec)?;
            self.builder.mul_monomial(fact_i, &mono)?
        };
        let state_plus = gp.shift_by_x_power(s);
        debug_assert_eq!(
            self.builder.payload(fact_ii),
            &self.monomial_of(&state_plus)?.mul(&self.poly_of(&hv)?)
        );

        // Fact (iii): subtract poly(H) * sigma^s(poly(G)).
        let h_poly = self.poly_of(&hv)?;
        let fact_iii = self
            .builder
            .ideal(&[(fact_ii, TruncPoly::one(&self.ring())), (shifts[s], h_poly.neg())])?;
        let state_minus = gm.shift_by_x_power(s);
        debug_assert_eq!(
            self.builder.payload(fact_iii),
            &self.monomial_of(&state_minus)?.mul(&self.poly_of(&hv)?)
        );

        // Both monomial facts via the sign-symmetric descent.
        let tau = hv.sign_pattern();
        let pos: Vec<usize> = tau.positive_coords();
        let neg: Vec<usize> = tau.negative_coords();
        let fact_minus = self.descend(
            fact_iii,
            &hv,
            &gp,
            &gm,
            s,
            &pos,
            &neg,
            &shifts,
            &hm,
            true,
        )?;
        let fact_plus = self.descend(
            fact_ii,
            &hv,
            &gm,
            &gp,
            s,
            &neg,
            &pos,
            &shifts,
            &hp,
            false,
        )?;

        // poly(H)^2 = Y^{H+} poly(H) - Y^{H-} poly(H), then the radical rule.
        let square = self.builder.ideal(&[
            (fact_plus, TruncPoly::one(&self.ring())),
            (fact_minus, TruncPoly::one(&self.ring()).neg()),
        ])?;
        debug_assert_eq!(self.builder.payload(square), &h_poly.square());
        let mut step = self.builder.radical(square, h_poly)?;
        if eps == -1 {
            step = self.builder.scale(step, -BigRational::one())?;
        }
        debug_assert_eq!(self.builder.payload(step), &self.poly_of(h)?);
        self.memo.insert(h.clone(), step);
        Ok(step)
    }

    /// Shared descent: lowers the shift on the descending coordinate block
    /// by repeated use of the shifted basis binomial, then adjusts to the
    /// target multiplier.
    ///
    /// For the minus-side call (`subtract = true`): `big = G_+`, `small =
    /// G_-`, descending block = positive coordinates, start state
    /// `Y^{x^s G_-}`, target `H_-`. The plus side swaps all roles.
    #[allow(clippy::too_many_arguments)]
    fn descend(
        &mut self,
        start: StepId,
        hv: &ExpVector,
        big: &ExpVector,
        small: &ExpVector,
        s: usize,
        desc: &[usize],
        park: &[usize],
        shifts: &[StepId],
        target: &ExpVector,
        subtract: bool,
    ) -> Result<StepId> {
        let n = hv.len();
        let restrict = |v: &ExpVector, coords: &[usize]| -> ExpVector {
            ExpVector::new(
                (0..n)
                    .map(|i| {
                        if coords.contains(&i) {
                            v.entry(i).clone()
                        } else {
                            SymPoly::zero()
                        }
                    })
                    .collect(),
            )
        };
        let h_poly = self.poly_of(hv)?;
        let park_mono = restrict(&small.shift_by_x_power(s), park);
        let mut state = small.shift_by_x_power(s);
        let mut step = start;
        if !desc.is_empty() {
            let delta = desc
                .iter()
                .map(|&i| big.entry(i).deg() - small.entry(i).deg())
                .min()
                .unwrap();
            debug_assert!(delta >= 1, "descending coordinates must drop degree");
            let mut c = s;
            while c > 0 {
                let c_next = c.saturating_sub(delta as usize).max(0);
                // Swing up to the big side at shift c_next on the
                // descending block.
                let swing = restrict(&big.shift_by_x_power(c_next), desc).add(&park_mono);
                step = monomial_adjust(
                    &mut self.builder,
                    step,
                    &state,
                    &h_poly,
                    &swing,
                )?;
                // Multiply to the full shifted plus-support.
                let fill = restrict(&big.shift_by_x_power(c_next), park);
                if !fill.is_zero() {
                    let mono = expand(&self.ring(), &fill)?;
                    step = self.builder.mul_monomial(step, &mono)?;
                }
                // Exchange through the shifted basis binomial.
                let cof_mono = self.monomial_of(&park_mono)?.mul(&h_poly);
                let cof = if subtract { cof_mono.neg() } else { cof_mono };
                step = self
                    .builder
                    .ideal(&[(step, TruncPoly::one(&self.ring())), (shifts[c_next], cof)])?;
                // Strip the parked copy of the small side.
                let full_state = small.shift_by_x_power(c_next).add(
                    &restrict(&small.shift_by_x_power(s), park),
                );
                let next_state =
                    restrict(&small.shift_by_x_power(c_next), desc).add(&park_mono);
                debug_assert_eq!(
                    self.builder.payload(step),
                    &self.monomial_of(&full_state)?.mul(&h_poly)
                );
                step = monomial_adjust(
                    &mut self.builder,
                    step,
                    &full_state,
                    &h_poly,
                    &next_state,
                )?;
                state = next_state;
                c = c_next;
            }
        }
        monomial_adjust(&mut self.builder, step, &state, &h_poly, target)
    }

    pub fn into_certificate(self, goal_step: StepId) -> Certificate {
        self.builder.finish(goal_step)
    }
}

/// End-to-end membership certification of `h` against a basis: checks that
/// `h` plausibly lies in the support lattice, runs the recursive rewriting,
/// and returns the assembled certificate.
pub fn membership_certificate(
    h: &ExpVector,
    basis: &[DiffBinomial],
    toggles: RuleToggles,
    caps: &CertCaps,
) -> Result<Certificate> {
    if h.is_zero() {
        return Err(Error::ZeroVector);
    }
    let n = h.len();
    let lat = lattice_of_binomials(n, basis)?;
    let plausible = (0..=caps.precheck_deg).any(|d| truncated_member(&lat, h, d));
    if !plausible {
        return Err(Error::NotInLattice { bound: caps.precheck_deg });
    }
    let mut d = h.split_parts().0.max_deg().max(h.split_parts().1.max_deg());
    for b in basis {
        d = d.max(b.max_deg());
    }
    let ring = TruncRing::new(n, d.max(1) as usize);
    let mut engine = CertEngine::new(ring, basis, toggles, *caps);
    let goal = engine.certify(h, 0)?;
    Ok(engine.into_certificate(goal))
}

/// The expanded truncated polynomials of a basis, the axiom set its
/// certificates are checked against.
pub fn basis_axioms(ring: &TruncRing, basis: &[DiffBinomial]) -> Result<Vec<TruncPoly>> {
    basis.iter().map(|b| b.expand(ring)).collect()
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct StepJson {
    id: usize,
    rule: Rule,
    premises: Vec<usize>,
    payload: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cofactors: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct CertJson {
    n: usize,
    #[serde(rename = "D")]
    d: usize,
    goal: String,
    steps: Vec<StepJson>,
}

impl Certificate {
    pub fn to_json(&self) -> serde_json::Value {
        let steps = self
            .steps
            .iter()
            .map(|s| StepJson {
                id: s.id,
                rule: s.rule,
                premises: s.premises.clone(),
                payload: s.payload.to_string(),
                cofactors: match &s.data {
                    StepData::Ideal { cofactors } => {
                        Some(cofactors.iter().map(|c| c.to_string()).collect())
                    }
                    _ => None,
                },
                a: match &s.data {
                    StepData::WellMixed { a, .. } => Some(a.to_string()),
                    _ => None,
                },
                b: match &s.data {
                    StepData::WellMixed { b, .. } => Some(b.to_string()),
                    _ => None,
                },
            })
            .collect();
        serde_json::to_value(CertJson {
            n: self.n,
            d: self.d,
            goal: self.goal.to_string(),
            steps,
        })
        .expect("certificate serialization cannot fail")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Certificate> {
        let cj: CertJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::Parse(format!("malformed certificate: {e}")))?;
        let ring = TruncRing::new(cj.n.max(1), cj.d.max(1));
        let parse = |s: &str| parse_trunc_poly(&ring, s);
        let mut steps = Vec::new();
        for sj in cj.steps {
            let data = match sj.rule {
                Rule::Ideal => {
                    let cofs = sj.cofactors.ok_or_else(|| {
                        Error::Parse(format!("step {}: ideal step without cofactors", sj.id))
                    })?;
                    StepData::Ideal {
                        cofactors: cofs.iter().map(|c| parse(c)).collect::<Result<_>>()?,
                    }
                }
                Rule::WellMixed => {
                    let a = sj.a.ok_or_else(|| {
                        Error::Parse(format!("step {}: well-mixed step without factor a", sj.id))
                    })?;
                    let b = sj.b.ok_or_else(|| {
                        Error::Parse(format!("step {}: well-mixed step without factor b", sj.id))
                    })?;
                    StepData::WellMixed { a: parse(&a)?, b: parse(&b)? }
                }
                _ => StepData::None,
            };
            steps.push(CertStep {
                id: sj.id,
                rule: sj.rule,
                premises: sj.premises,
                payload: parse(&sj.payload)?,
                data,
            });
        }
        Ok(Certificate { n: cj.n, d: cj.d, goal: parse(&cj.goal)?, steps })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{compute_basis, BasisConfig};
    use crate::lattice::Lattice;

    fn v(entries: &[&[i64]]) -> ExpVector {
        ExpVector::from_i64s(entries)
    }

    fn example_basis() -> Vec<DiffBinomial> {
        let l = Lattice::new(2, vec![v(&[&[-1, 1], &[1, -1]])]).unwrap();
        compute_basis(&l, &BasisConfig::default()).unwrap().binomials()
    }

    fn check(cert: &Certificate, basis: &[DiffBinomial]) {
        let ring = TruncRing::new(cert.n, cert.d);
        let axioms = basis_axioms(&ring, basis).unwrap();
        if let Err(f) = check_certificate(cert, &axioms) {
            panic!("certificate rejected: {f}");
        }
    }

    #[test]
    fn axiom_certificate_for_basis_element() {
        let basis = example_basis();
        let h = v(&[&[-1, 1], &[1, -1]]);
        let cert =
            membership_certificate(&h, &basis, RuleToggles::all(), &CertCaps::default()).unwrap();
        assert_eq!(cert.steps.len(), 1);
        assert_eq!(cert.steps[0].rule, Rule::Axiom);
        check(&cert, &basis);
    }

    #[test]
    fn certificate_for_squared_shift() {
        // h = (x^2 - 1, 1 - x^2): the first derived element.
        let basis = example_basis();
        let h = v(&[&[-1, 0, 1], &[1, 0, -1]]);
        let cert =
            membership_certificate(&h, &basis, RuleToggles::all(), &CertCaps::default()).unwrap();
        check(&cert, &basis);
        // Ends in a radical step (possibly after an orientation scale).
        assert!(cert
            .steps
            .iter()
            .any(|s| s.rule == Rule::Radical));
        assert!(cert.steps.iter().any(|s| s.rule == Rule::WellMixed));
    }

    #[test]
    fn certificates_through_degree_five() {
        let basis = example_basis();
        for i in 2..=5usize {
            let mut plus = vec![0i64; i + 1];
            plus[0] = -1;
            plus[i] = 1;
            let minus: Vec<i64> = plus.iter().map(|c| -c).collect();
            let h = ExpVector::from_i64s(&[&plus, &minus]);
            let cert =
                membership_certificate(&h, &basis, RuleToggles::all(), &CertCaps::default())
                    .unwrap();
            check(&cert, &basis);
        }
    }

    #[test]
    fn not_in_lattice_is_rejected() {
        let basis = example_basis();
        let h = v(&[&[-1, 1], &[-1, 1]]);
        assert!(matches!(
            membership_certificate(&h, &basis, RuleToggles::all(), &CertCaps::default()),
            Err(Error::NotInLattice { .. })
        ));
    }

    #[test]
    fn radical_toggle_blocks_assembly() {
        let basis = example_basis();
        let h = v(&[&[-1, 0, 1], &[1, 0, -1]]);
        let toggles = RuleToggles { radical: false, ..RuleToggles::all() };
        assert!(matches!(
            membership_certificate(&h, &basis, toggles, &CertCaps::default()),
            Err(Error::RuleDisabled { rule: "radical" })
        ));
    }

    #[test]
    fn mixed_lattice_membership() {
        // Second paper lattice: both basis elements and a derived element.
        let l = Lattice::new(2, vec![v(&[&[1, -1, 1], &[-1, 1, -1]])]).unwrap();
        let basis = compute_basis(&l, &BasisConfig::default()).unwrap().binomials();
        assert_eq!(basis.len(), 2);
        // (x+1)^2 * g = (x^2+2x+1)(x^2-x+1) ... pick x * g + g = (x+1) g,
        // whose binomial is the second basis element; then (x^2+x) g.
        let g = v(&[&[1, -1, 1], &[-1, 1, -1]]);
        let h = g.scale(&SymPoly::from_i64s(&[0, 1, 1]));
        let cert =
            membership_certificate(&h, &basis, RuleToggles::all(), &CertCaps::default()).unwrap();
        check(&cert, &basis);
    }

    #[test]
    fn checker_rejects_mutations() {
        let basis = example_basis();
        let h = v(&[&[-1, 0, 1], &[1, 0, -1]]);
        let cert =
            membership_certificate(&h, &basis, RuleToggles::all(), &CertCaps::default()).unwrap();
        let ring = TruncRing::new(cert.n, cert.d);
        let axioms = basis_axioms(&ring, &basis).unwrap();

        // Perturb one ideal cofactor.
        let mut bad = cert.clone();
        let idx = bad
            .steps
            .iter()
            .position(|s| matches!(s.data, StepData::Ideal { .. }))
            .unwrap();
        if let StepData::Ideal { cofactors } = &mut bad.steps[idx].data {
            cofactors[0] = cofactors[0].add(&TruncPoly::one(&ring));
        }
        let failure = check_certificate(&bad, &axioms).unwrap_err();
        assert_eq!(failure.step_id, Some(idx));

        // Perturb a payload.
        let mut bad = cert.clone();
        let last = bad.steps.len() - 1;
        bad.steps[last].payload = bad.steps[last].payload.add(&TruncPoly::one(&ring));
        assert!(check_certificate(&bad, &axioms).is_err());

        // Drop an axiom from the axiom set.
        assert!(check_certificate(&cert, &[]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let basis = example_basis();
        let h = v(&[&[-1, 0, 1], &[1, 0, -1]]);
        let cert =
            membership_certificate(&h, &basis, RuleToggles::all(), &CertCaps::default()).unwrap();
        let json = cert.to_json();
        let back = Certificate::from_json(&json).unwrap();
        let ring = TruncRing::new(cert.n, cert.d);
        let axioms = basis_axioms(&ring, &basis).unwrap();
        check_certificate(&back, &axioms).unwrap();
        assert_eq!(back.steps.len(), cert.steps.len());
    }
}
