//! Bounded closure engines: well-mixed / radical well-mixed saturation with
//! certificate-carrying provenance, the colon closure, T-saturated closures,
//! quasi-normality, and the recursive decomposition driver.
//!
//! Every engine here computes a sound under-approximation at truncation `D`:
//! each added generator is justified by a rule application that can be
//! replayed as a checkable certificate, and non-membership verdicts are
//! always "not derivable at bounds".

use std::collections::{BTreeMap, BTreeSet};

use num::rational::BigRational;

use serde::{Deserialize, Serialize};

use crate::binomial::{lattice_of_binomials, DiffBinomial};
use crate::cert::{CertBuilder, Certificate, RuleToggles, StepId};
use crate::error::{Error, Result};
use crate::expvec::ExpVector;
use crate::groebner::{saturate_by_variable, Groebner, GroebnerCaps, TruncatedIdeal};
use crate::lattice::{sat_m, Lattice, OmMap, SatConfig};

use crate::trunc::{expand, shift, TruncMonomial, TruncPoly, TruncRing};

/// Configuration for the saturation engines.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClosureConfig {
    /// Truncation degree.
    pub d: usize,
    pub rules: RuleToggles,
    /// Fixpoint rounds before flagging a partial result.
    pub max_iterations: usize,
    pub max_generators: usize,
    /// Bound on `k` when certifying colon discoveries `v^k p`.
    pub colon_power_cap: usize,
    /// Additions with any single exponent above this are dropped.
    pub max_exponent_height: u32,
    #[serde(skip)]
    pub groebner: GroebnerCaps,
}

impl ClosureConfig {
    pub fn with_trunc(d: usize) -> Self {
        ClosureConfig {
            d,
            rules: RuleToggles::all(),
            max_iterations: 6,
            max_generators: 300,
            colon_power_cap: 4,
            max_exponent_height: 6,
            groebner: GroebnerCaps::default(),
        }
    }
}

/// Generators plus explicitly factored products; the factored form is what
/// the well-mixed rule fires on.
#[derive(Clone, Debug, Default)]
pub struct ClosureInput {
    pub gens: Vec<TruncPoly>,
    pub products: Vec<(TruncPoly, TruncPoly)>,
}

impl ClosureInput {
    pub fn from_gens(gens: Vec<TruncPoly>) -> Self {
        ClosureInput { gens, products: Vec::new() }
    }

    /// The pairwise product set `F * G`, each product tagged with its
    /// factorization.
    pub fn product_set(f: &[TruncPoly], g: &[TruncPoly]) -> Self {
        let mut input = ClosureInput::default();
        for a in f {
            for b in g {
                let p = a.mul(b);
                if !p.is_zero() {
                    input.gens.push(p);
                    input.products.push((a.clone(), b.clone()));
                }
            }
        }
        input
    }

    fn axioms(&self) -> Vec<TruncPoly> {
        self.gens.clone()
    }
}

/// How a generator entered the saturated set; enough to replay a
/// certificate over the input axioms.
#[derive(Clone, Debug)]
enum Provenance {
    Input,
    /// Shift of an earlier generator.
    Shift { src: usize },
    /// From the factored fact `a * b = gens[src]`, the conclusion
    /// `a * shift(b)`.
    Mixed { src: usize, a: TruncPoly, b: TruncPoly },
    /// From the fact `v^k * p` in the ideal (with recorded cofactors
    /// against the then-current generators), the conclusion
    /// `p * shift(v)^k`.
    MixedChain { fact_combo: Vec<(usize, TruncPoly)>, v: (usize, usize), k: usize, p: TruncPoly },
    /// From the fact `square = poly^2` in the ideal, the conclusion `poly`.
    Root { square_combo: Vec<(usize, TruncPoly)> },
}

#[derive(Clone, Debug)]
struct TrackedGen {
    poly: TruncPoly,
    provenance: Provenance,
    /// Factored-form tag the well-mixed rule may fire on.
    tag: Option<(TruncPoly, TruncPoly)>,
}

/// Result of a bounded closure saturation.
pub struct ClosureResult {
    ring: TruncRing,
    gens: Vec<TrackedGen>,
    gb: Groebner,
    axioms: Vec<TruncPoly>,
    pub iterations: usize,
    /// False when the iteration cap stopped the engine before a fixpoint;
    /// the result is still a sound under-approximation.
    pub reached_fixpoint: bool,
}

impl ClosureResult {
    pub fn ring(&self) -> &TruncRing {
        &self.ring
    }

    pub fn generator_polys(&self) -> Vec<TruncPoly> {
        self.gens.iter().map(|g| g.poly.clone()).collect()
    }

    pub fn generator_count(&self) -> usize {
        self.gens.len()
    }

    pub fn ideal(&self) -> TruncatedIdeal {
        TruncatedIdeal::new(self.ring, self.generator_polys())
    }

    /// Membership in the saturated ideal ("derivable at bounds").
    pub fn contains(&self, p: &TruncPoly) -> bool {
        self.gb.contains(p)
    }

    /// Replays the provenance of generator `idx` as certificate steps.
    fn emit_generator(
        &self,
        idx: usize,
        builder: &mut CertBuilder,
        memo: &mut BTreeMap<usize, StepId>,
    ) -> Result<StepId> {
        if let Some(&s) = memo.get(&idx) {
            return Ok(s);
        }
        let gen = &self.gens[idx];
        let step = match &gen.provenance {
            Provenance::Input => builder.axiom(gen.poly.clone())?,
            Provenance::Shift { src } => {
                let s = self.emit_generator(*src, builder, memo)?;
                builder.shift_step(s)?
            }
            Provenance::Mixed { src, a, b } => {
                let s = self.emit_generator(*src, builder, memo)?;
                builder.wellmixed(s, a.clone(), b.clone())?
            }
            Provenance::MixedChain { fact_combo, v, k, p } => {
                let fact = self.emit_combo(fact_combo, builder, memo)?;
                // fact: v^k * p; walk v^{k-t} shift(v)^t * p up to t = k.
                let var_mono = self.ring.var_monomial(v.0, v.1);
                let svar_mono = self.ring.var_monomial(v.0, v.1 + 1);
                let var_poly = TruncPoly::from_monomial(&self.ring, var_mono.clone());
                let mut cur = fact;
                for t in 1..=*k {
                    let mut a = p.clone();
                    for _ in 0..(k - t) {
                        a = a.mul_monomial(&var_mono);
                    }
                    for _ in 0..(t - 1) {
                        a = a.mul_monomial(&svar_mono);
                    }
                    cur = builder.wellmixed(cur, a, var_poly.clone())?;
                }
                cur
            }
            Provenance::Root { square_combo } => {
                let sq = self.emit_combo(square_combo, builder, memo)?;
                builder.radical(sq, gen.poly.clone())?
            }
        };
        memo.insert(idx, step);
        Ok(step)
    }

    fn emit_combo(
        &self,
        combo: &[(usize, TruncPoly)],
        builder: &mut CertBuilder,
        memo: &mut BTreeMap<usize, StepId>,
    ) -> Result<StepId> {
        let mut parts = Vec::new();
        for (gi, cof) in combo {
            let s = self.emit_generator(*gi, builder, memo)?;
            parts.push((s, cof.clone()));
        }
        builder.ideal(&parts)
    }

    /// Certificate that generator `idx` lies in the closure of the inputs.
    pub fn certificate_for_generator(&self, idx: usize, toggles: RuleToggles) -> Result<Certificate> {
        let mut builder = CertBuilder::new(self.ring, toggles, 100_000);
        let mut memo = BTreeMap::new();
        let goal = self.emit_generator(idx, &mut builder, &mut memo)?;
        Ok(builder.finish(goal))
    }

    /// Certificate for an arbitrary member of the saturated ideal.
    pub fn certificate_for(&self, p: &TruncPoly, toggles: RuleToggles) -> Result<Certificate> {
        let cofs = self.gb.member_cofactors(p).ok_or_else(|| Error::Precondition {
            op: "certificate_for",
            detail: "element is not derivable at bounds".into(),
        })?;
        let mut builder = CertBuilder::new(self.ring, toggles, 100_000);
        let mut memo = BTreeMap::new();
        let combo: Vec<(usize, TruncPoly)> = cofs
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let goal = self.emit_combo(&combo, &mut builder, &mut memo)?;
        Ok(builder.finish(goal))
    }

    pub fn axioms(&self) -> &[TruncPoly] {
        &self.axioms
    }
}

fn exponent_height(p: &TruncPoly) -> u32 {
    p.terms()
        .flat_map(|(m, _)| m.exps().iter().copied())
        .max()
        .unwrap_or(0)
}

/// Bounded fixpoint of the well-mixed / radical well-mixed closure rules at
/// truncation `D`, starting from tagged generators. Output is a sound
/// under-approximation of the corresponding closure.
pub fn closure_saturate(input: &ClosureInput, cfg: &ClosureConfig) -> Result<ClosureResult> {
    let n = input
        .gens
        .iter()
        .map(|g| g.ring().n)
        .chain(std::iter::once(1))
        .max()
        .unwrap();
    let ring = TruncRing::new(n, cfg.d);
    let mut gens: Vec<TrackedGen> = Vec::new();
    let mut seen: BTreeSet<TruncPoly> = BTreeSet::new();
    for (i, g) in input.gens.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        if g.ring() != &ring {
            return Err(Error::DimensionMismatch {
                expected: ring.var_count(),
                got: g.ring().var_count(),
            });
        }
        let tag = input.products.get(i).cloned();
        if seen.insert(g.canonical_scalar_form()) {
            gens.push(TrackedGen { poly: g.clone(), provenance: Provenance::Input, tag });
        }
    }

    let mut iterations = 0usize;
    let mut reached_fixpoint = false;
    let mut gb = Groebner::new(&ring, &gens.iter().map(|g| g.poly.clone()).collect::<Vec<_>>(), &cfg.groebner)?;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let mut additions: Vec<TrackedGen> = Vec::new();
        let offer = |tg: TrackedGen,
                         seen: &mut BTreeSet<TruncPoly>,
                         additions: &mut Vec<TrackedGen>,
                         gb: &Groebner| {
            if tg.poly.is_zero() {
                return;
            }
            if exponent_height(&tg.poly) > cfg.max_exponent_height {
                return;
            }
            let canon = tg.poly.canonical_scalar_form();
            if seen.contains(&canon) {
                return;
            }
            if gb.contains(&tg.poly) {
                // Already derivable as a combination; not a new generator.
                return;
            }
            seen.insert(canon);
            additions.push(tg);
        };

        // Shift pass.
        if cfg.rules.shift {
            for idx in 0..gens.len() {
                if let Ok(sp) = shift(&gens[idx].poly) {
                    let tag = match &gens[idx].tag {
                        Some((a, b)) => match (shift(a), shift(b)) {
                            (Ok(sa), Ok(sb)) => Some((sa, sb)),
                            _ => None,
                        },
                        None => None,
                    };
                    offer(
                        TrackedGen { poly: sp, provenance: Provenance::Shift { src: idx }, tag },
                        &mut seen,
                        &mut additions,
                        &gb,
                    );
                }
            }
        }

        let mut discovered_primitives: Vec<TruncPoly> = Vec::new();

        if cfg.rules.wellmixed {
            // Tagged factored products: a * shift(b) and b * shift(a).
            for idx in 0..gens.len() {
                let Some((a, b)) = gens[idx].tag.clone() else { continue };
                for (x, y) in [(a.clone(), b.clone()), (b, a)] {
                    if let Ok(sy) = shift(&y) {
                        let poly = x.mul(&sy);
                        offer(
                            TrackedGen {
                                poly,
                                provenance: Provenance::Mixed { src: idx, a: x.clone(), b: y.clone() },
                                tag: Some((x.clone(), sy)),
                            },
                            &mut seen,
                            &mut additions,
                            &gb,
                        );
                    }
                }
            }

            // Unit moves: push one exponent class of a monomial content up.
            for idx in 0..gens.len() {
                let (content, prim) = gens[idx].poly.monomial_content_split();
                if content.is_one() || prim.is_monomial() {
                    continue;
                }
                for (slot, &e) in content.exps().to_vec().iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    let (i, j) = ring.var_pair(slot);
                    if j + 1 > ring.d {
                        continue;
                    }
                    let mut rest = content.exps().to_vec();
                    rest[slot] = 0;
                    let a = prim.mul_monomial(&TruncMonomial::from_exps(rest));
                    let b = TruncPoly::from_monomial(
                        &ring,
                        power_monomial(&ring, i, j, e),
                    );
                    let poly = a.mul(&shift(&b).expect("class below D shifts"));
                    offer(
                        TrackedGen {
                            poly,
                            provenance: Provenance::Mixed { src: idx, a: a.clone(), b },
                            tag: None,
                        },
                        &mut seen,
                        &mut additions,
                        &gb,
                    );
                }
            }

            // Colon discovery: for used variables v, saturate by v and turn
            // every certified fact v^k p into p * shift(v)^k.
            let gen_polys: Vec<TruncPoly> = gens.iter().map(|g| g.poly.clone()).collect();
            for slot in 0..ring.var_count() {
                let (i, j) = ring.var_pair(slot);
                let used = gen_polys
                    .iter()
                    .any(|g| g.terms().any(|(m, _)| m.exps()[slot] > 0));
                if !used {
                    continue;
                }
                let sat = saturate_by_variable(&ring, &gen_polys, (i, j), &cfg.groebner)?;
                for p in sat {
                    if p.is_zero() || gb.contains(&p) {
                        continue;
                    }
                    let p = p.canonical_scalar_form();
                    discovered_primitives.push(p.monomial_content_split().1);
                    if j + 1 > ring.d {
                        continue;
                    }
                    // Smallest certified power.
                    let var_mono = ring.var_monomial(i, j);
                    let mut power = p.clone();
                    let mut k = 0usize;
                    let mut found = None;
                    while k < cfg.colon_power_cap {
                        power = power.mul_monomial(&var_mono);
                        k += 1;
                        if gb.contains(&power) {
                            found = Some(k);
                            break;
                        }
                    }
                    let Some(k) = found else { continue };
                    let combo = gb
                        .member_cofactors(&power)
                        .expect("verified member has cofactors")
                        .into_iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .collect();
                    let mut poly = p.clone();
                    let svar = ring.var_monomial(i, j + 1);
                    for _ in 0..k {
                        poly = poly.mul_monomial(&svar);
                    }
                    offer(
                        TrackedGen {
                            poly,
                            provenance: Provenance::MixedChain {
                                fact_combo: combo,
                                v: (i, j),
                                k,
                                p: p.clone(),
                            },
                            tag: None,
                        },
                        &mut seen,
                        &mut additions,
                        &gb,
                    );
                }
            }
        }

        if cfg.rules.radical {
            // Halve monomial contents: (Y^ceil(c/2) q)^2 is a multiple of
            // the generator, so the radical rule strips half the content.
            for idx in 0..gens.len() {
                let (content, prim) = gens[idx].poly.monomial_content_split();
                let halved = half_up(&content);
                if halved != content {
                    let fill = TruncMonomial::from_exps(
                        halved
                            .exps()
                            .iter()
                            .zip(content.exps())
                            .map(|(h, c)| 2 * h - c)
                            .collect(),
                    );
                    let conclusion = prim.mul_monomial(&halved);
                    let cof = prim.mul_monomial(&fill);
                    offer(
                        TrackedGen {
                            poly: conclusion,
                            provenance: Provenance::Root { square_combo: vec![(idx, cof)] },
                            tag: None,
                        },
                        &mut seen,
                        &mut additions,
                        &gb,
                    );
                }
            }

            // Square tests on content-free parts of generators and of colon
            // discoveries.
            let mut candidates: Vec<TruncPoly> = gens
                .iter()
                .map(|g| g.poly.monomial_content_split().1.canonical_scalar_form())
                .collect();
            candidates.extend(
                discovered_primitives
                    .iter()
                    .map(|p| p.canonical_scalar_form()),
            );
            candidates.sort_by(|a, b| a.to_string().cmp(&b.to_string()));
            candidates.dedup();
            for q in candidates {
                if q.is_zero() || gb.contains(&q) {
                    continue;
                }
                let sq = q.square();
                if !gb.contains(&sq) {
                    continue;
                }
                let combo = gb
                    .member_cofactors(&sq)
                    .expect("verified member has cofactors")
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                offer(
                    TrackedGen {
                        poly: q.clone(),
                        provenance: Provenance::Root { square_combo: combo },
                        tag: None,
                    },
                    &mut seen,
                    &mut additions,
                    &gb,
                );
            }
        }

        if additions.is_empty() {
            reached_fixpoint = true;
            break;
        }
        gens.extend(additions);
        if gens.len() > cfg.max_generators {
            return Err(Error::ResourceCap {
                context: "closure_saturate",
                detail: format!("more than {} generators", cfg.max_generators),
            });
        }
        gb = Groebner::new(
            &ring,
            &gens.iter().map(|g| g.poly.clone()).collect::<Vec<_>>(),
            &cfg.groebner,
        )?;
    }

    Ok(ClosureResult {
        ring,
        gens,
        gb,
        axioms: input.axioms(),
        iterations,
        reached_fixpoint,
    })
}

fn power_monomial(ring: &TruncRing, i: usize, j: usize, e: u32) -> TruncMonomial {
    let mut exps = vec![0u32; ring.var_count()];
    exps[ring.var_index(i, j)] = e;
    TruncMonomial::from_exps(exps)
}

fn half_up(m: &TruncMonomial) -> TruncMonomial {
    TruncMonomial::from_exps(m.exps().iter().map(|&e| e.div_ceil(2)).collect())
}

/// The support lattice of the colon of the radical well-mixed closure by
/// the multiplicative monomial set: the M-saturation of the support lattice
/// of the input binomials (trivial partial character; the unit-ideal
/// degeneracy cannot occur there).
pub fn colon_m(
    n: usize,
    binomials: &[DiffBinomial],
    om: &OmMap,
    cfg: &SatConfig,
) -> Result<Lattice> {
    let lat = lattice_of_binomials(n, binomials)?;
    sat_m(&lat, om, cfg)
}

/// Specification of the monomial set `T`: monomials whose exponent at
/// coordinate `j_i` has degree strictly below `a_i`; other coordinates are
/// unconstrained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TSet {
    /// Parallel lists: constrained coordinates (0-based) and their bounds.
    pub coords: Vec<usize>,
    pub bounds: Vec<usize>,
}

impl TSet {
    pub fn new(coords: Vec<usize>, bounds: Vec<usize>) -> Result<Self> {
        if coords.is_empty() || coords.len() != bounds.len() {
            return Err(Error::Precondition {
                op: "TSet::new",
                detail: "need matching nonempty coordinate and bound lists".into(),
            });
        }
        Ok(TSet { coords, bounds })
    }

    pub fn bound_for(&self, coord: usize) -> Option<usize> {
        self.coords
            .iter()
            .position(|&c| c == coord)
            .map(|k| self.bounds[k])
    }

    /// Membership of a monomial support in `T`.
    pub fn contains_support(&self, f: &ExpVector) -> bool {
        self.coords
            .iter()
            .zip(self.bounds.iter())
            .all(|(&c, &a)| f.entry(c).deg() < a as i64)
    }

    /// The largest `T`-submonomial of a support: full entries off the
    /// constrained coordinates, only the low-degree part on them.
    fn t_part(&self, f: &ExpVector) -> ExpVector {
        ExpVector::new(
            (0..f.len())
                .map(|i| match self.bound_for(i) {
                    None => f.entry(i).clone(),
                    Some(a) => f.entry(i).below_degree(a as i64),
                })
                .collect(),
        )
    }

    /// Whether `y[i][j]` may appear in a `T`-monomial.
    fn allows_variable(&self, i: usize, j: usize) -> bool {
        match self.bound_for(i) {
            None => true,
            Some(a) => j < a,
        }
    }

    /// Monomial-ideal membership for `[y_{j_1}^{x^{a_1}}, ...]`: the support
    /// has a term of degree at least `a_i` at some constrained coordinate.
    pub fn monomial_ideal_contains(&self, f: &ExpVector) -> bool {
        self.coords
            .iter()
            .zip(self.bounds.iter())
            .any(|(&c, &a)| f.entry(c).deg() >= a as i64)
    }
}

/// Outcome of the bounded T-saturated closure.
#[derive(Clone, Debug)]
pub struct TsatOutcome {
    pub gens: Vec<TruncPoly>,
    /// Pure-binomial generators, as difference binomials.
    pub binomials: Vec<DiffBinomial>,
    /// Variable powers `(i, j)` of T-monomials stripped or saturated away;
    /// these drive the decomposition branches.
    pub stripped_powers: BTreeSet<(usize, usize)>,
    /// Whether anything outside the starting ideal was added.
    pub grew: bool,
    pub reached_fixpoint: bool,
}

/// Input generators for the T-saturation: binomials plus explicitly
/// factored monomial multiples of binomials.
#[derive(Clone, Debug, Default)]
pub struct TsatInput {
    pub binomials: Vec<DiffBinomial>,
    pub products: Vec<(ExpVector, DiffBinomial)>,
}

/// Bounded realization of the T-saturated closure `N(I)`: repeatedly strip
/// the T-part of every tracked monomial factor and close under shift within
/// the truncation. Only explicitly factored monomial multiples are
/// stripped; hidden colon members are out of reach of this engine, which
/// keeps it a sound under-approximation of the closure.
pub fn t_saturated_closure(
    n: usize,
    input: &TsatInput,
    t: &TSet,
    cfg: &ClosureConfig,
) -> Result<TsatOutcome> {
    let ring = TruncRing::new(n, cfg.d);
    let mut gens: Vec<TruncPoly> = Vec::new();
    let mut seen: BTreeSet<TruncPoly> = BTreeSet::new();
    let push = |p: TruncPoly, gens: &mut Vec<TruncPoly>, seen: &mut BTreeSet<TruncPoly>| -> bool {
        if p.is_zero() {
            return false;
        }
        let canon = p.canonical_scalar_form();
        if seen.insert(canon) {
            gens.push(p);
            true
        } else {
            false
        }
    };
    // The input set stands for a sigma-ideal: materialize every in-domain
    // shift up front so they do not count as growth.
    let seed = |p: TruncPoly, gens: &mut Vec<TruncPoly>, seen: &mut BTreeSet<TruncPoly>| {
        let mut cur = p;
        while push(cur.clone(), gens, seen) {
            match shift(&cur) {
                Ok(sp) => cur = sp,
                Err(_) => break,
            }
        }
    };
    for b in &input.binomials {
        let p = b.expand(&ring)?;
        seed(p, &mut gens, &mut seen);
    }
    for (m, b) in &input.products {
        let mono = expand(&ring, m)?;
        let p = b.expand(&ring)?.mul_monomial(&mono);
        seed(p, &mut gens, &mut seen);
    }

    let mut stripped_powers = BTreeSet::new();
    let mut grew = false;
    let mut reached_fixpoint = false;
    let mut iterations = 0usize;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let gb = Groebner::new(&ring, &gens, &cfg.groebner)?;
        let mut additions: Vec<TruncPoly> = Vec::new();

        // Strip T-parts of monomial contents.
        for g in gens.clone() {
            let (content, prim) = g.monomial_content_split();
            if content.is_one() {
                continue;
            }
            let support = crate::trunc::monomial_support(&ring, &content);
            let t_part = t.t_part(&support);
            if t_part.is_zero() {
                continue;
            }
            let kept = support.sub(&t_part);
            let stripped = prim.mul_monomial(&expand(&ring, &kept)?);
            if !gb.contains(&stripped) {
                record_powers(&t_part, &mut stripped_powers);
                additions.push(stripped);
            }
        }

        // Close under shift within the truncation; shifts alone are part of
        // the sigma-ideal and do not count as growth.
        let mut shift_additions: Vec<TruncPoly> = Vec::new();
        if cfg.rules.shift {
            for g in gens.clone() {
                if let Ok(sp) = shift(&g) {
                    if !gb.contains(&sp) {
                        shift_additions.push(sp);
                    }
                }
            }
        }

        let mut any = false;
        for p in additions {
            let canon = p.canonical_scalar_form();
            if !seen.contains(&canon) && !gb.contains(&p) {
                seen.insert(canon);
                gens.push(p);
                any = true;
                grew = true;
            }
        }
        for p in shift_additions {
            let canon = p.canonical_scalar_form();
            if !seen.contains(&canon) && !gb.contains(&p) {
                seen.insert(canon);
                gens.push(p);
                any = true;
            }
        }
        if !any {
            reached_fixpoint = true;
            break;
        }
        if gens.len() > cfg.max_generators {
            return Err(Error::ResourceCap {
                context: "t_saturated_closure",
                detail: format!("more than {} generators", cfg.max_generators),
            });
        }
    }

    let binomials = gens
        .iter()
        .filter_map(|g| trunc_to_binomial(&ring, g))
        .collect();
    Ok(TsatOutcome { gens, binomials, stripped_powers, grew, reached_fixpoint })
}

fn record_powers(support: &ExpVector, out: &mut BTreeSet<(usize, usize)>) {
    for (i, e) in support.entries().iter().enumerate() {
        for j in 0..=e.deg().max(0) as usize {
            if e.coeff(j) > num::BigInt::from(0) {
                out.insert((i, j));
            }
        }
    }
}

/// Reads a pure binomial (up to a rational scalar) back into a
/// `DiffBinomial`, if the polynomial has that shape.
pub fn trunc_to_binomial(ring: &TruncRing, p: &TruncPoly) -> Option<DiffBinomial> {
    if !p.is_pure_binomial_shape() {
        return None;
    }
    let mut it = p.terms();
    let (m1, c1) = it.next().unwrap();
    let (m2, _) = it.next().unwrap();
    let (a, b) = if c1 > &BigRational::from(num::BigInt::from(0)) {
        (m1, m2)
    } else {
        (m2, m1)
    };
    let plus = crate::trunc::monomial_support(ring, a);
    let minus = crate::trunc::monomial_support(ring, b);
    DiffBinomial::new(plus, minus).ok().map(|(b, _)| b)
}

/// Bounded quasi-normality check: the ideal is T-saturated at caps, and
/// every generator whose one monomial lies in `[y_{j_1}^{x^{a_1}}, ...]`
/// has the other monomial in it too.
pub fn is_quasi_normal(
    n: usize,
    binomials: &[DiffBinomial],
    t: &TSet,
    cfg: &ClosureConfig,
) -> Result<bool> {
    for b in binomials {
        let plus_in = t.monomial_ideal_contains(b.plus());
        let minus_in = t.monomial_ideal_contains(b.minus());
        if plus_in != minus_in {
            return Ok(false);
        }
    }
    let input = TsatInput { binomials: binomials.to_vec(), products: vec![] };
    let outcome = t_saturated_closure(n, &input, t, cfg)?;
    Ok(!outcome.grew)
}

/// A node of the decomposition tree.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecompNode {
    /// The colon component: a normal lattice ideal.
    ColonLeaf {
        #[serde(skip)]
        lattice: Lattice,
        generators: Vec<String>,
    },
    /// Quasi-normal leaf with its finite generator set.
    QuasiNormal {
        monomials: Vec<String>,
        generators: Vec<String>,
    },
    /// Every generator absorbed by the monomial ideal.
    MonomialAbsorbed { monomials: Vec<String> },
    /// The unit ideal.
    Unit,
    /// Internal branching node.
    Branch {
        reason: String,
        monomials: Vec<String>,
        children: Vec<DecompNode>,
        /// True when caps stopped refinement below this node.
        capped: bool,
    },
}

/// Measure tracked by the decomposition driver: the constrained-variable
/// set must grow or the bound vector must strictly drop.
fn measure_advanced(old: &TSet, new: &TSet) -> bool {
    if new.coords.len() > old.coords.len() {
        return true;
    }
    if new.coords.len() == old.coords.len() {
        let mut some_drop = false;
        for (&c, &a) in new.coords.iter().zip(new.bounds.iter()) {
            match old.bound_for(c) {
                None => return true,
                Some(old_a) => {
                    if a > old_a {
                        return false;
                    }
                    if a < old_a {
                        some_drop = true;
                    }
                }
            }
        }
        return some_drop;
    }
    false
}

fn monomial_names(t: &TSet) -> Vec<String> {
    t.coords
        .iter()
        .zip(t.bounds.iter())
        .map(|(&c, &a)| format!("y[{}]^(x^{})", c + 1, a))
        .collect()
}

/// Recursive decomposition driver. The root splits into the colon
/// component plus monomial-augmented branches; each branch is refined until
/// it is quasi-normal or absorbed by its monomial ideal.
pub fn decompose(
    n: usize,
    binomials: &[DiffBinomial],
    initial: Option<TSet>,
    om: &OmMap,
    sat_cfg: &SatConfig,
    cfg: &ClosureConfig,
) -> Result<DecompNode> {
    match initial {
        Some(t) => decompose_branch(n, binomials.to_vec(), t, cfg, 0),
        None => {
            let lattice = colon_m(n, binomials, om, sat_cfg)?;
            let colon = DecompNode::ColonLeaf {
                generators: lattice.generators().iter().map(|g| g.to_string()).collect(),
                lattice: lattice.clone(),
            };
            // Monomial witnesses: a colon-basis element f with m*f in the
            // ideal for a monomial m != 1 opens a branch per variable power
            // of m. For normal inputs every witness is 1 and the tree is
            // the colon leaf alone.
            let mut children = vec![colon];
            let ring = TruncRing::new(n, cfg.d);
            let mut ideal_gens: Vec<TruncPoly> = Vec::new();
            for b in binomials {
                let p = b.expand(&ring)?;
                ideal_gens.push(p.clone());
                let mut cur = p;
                while let Ok(sp) = shift(&cur) {
                    ideal_gens.push(sp.clone());
                    cur = sp;
                }
            }
            let gb = Groebner::new(&ring, &ideal_gens, &cfg.groebner)?;
            let basis_cfg = crate::basis::BasisConfig {
                enum_bounds: crate::lattice::EnumBounds {
                    coeff_deg: 1,
                    height: 1,
                    ..Default::default()
                },
                stability_window: 1,
                max_rounds: 4,
            };
            let colon_basis = crate::basis::compute_basis(&lattice, &basis_cfg)?;
            let mut branch_powers: BTreeSet<(usize, usize)> = BTreeSet::new();
            for b in colon_basis.binomials() {
                if b.max_deg() > cfg.d as i64 {
                    continue;
                }
                let f = b.expand(&ring)?;
                if gb.contains(&f) {
                    continue; // witness m = 1
                }
                // Search single-variable witnesses m = y[i][j]^e, e <= 2.
                let mut witness: Option<TruncMonomial> = None;
                'search: for slot in 0..ring.var_count() {
                    let (i, j) = ring.var_pair(slot);
                    for e in 1..=2u32 {
                        let m = power_monomial(&ring, i, j, e);
                        if gb.contains(&f.mul_monomial(&m)) {
                            witness = Some(m);
                            break 'search;
                        }
                    }
                }
                if let Some(m) = witness {
                    let support = crate::trunc::monomial_support(&ring, &m);
                    record_powers(&support, &mut branch_powers);
                }
            }
            for (i, j) in branch_powers {
                let t = TSet::new(vec![i], vec![j])?;
                children.push(decompose_branch(n, binomials.to_vec(), t, cfg, 0)?);
            }
            if children.len() == 1 {
                return Ok(children.pop().unwrap());
            }
            Ok(DecompNode::Branch {
                reason: "colon and monomial components".into(),
                monomials: vec![],
                children,
                capped: false,
            })
        }
    }
}

fn decompose_branch(
    n: usize,
    binomials: Vec<DiffBinomial>,
    t: TSet,
    cfg: &ClosureConfig,
    depth: usize,
) -> Result<DecompNode> {
    if depth > 12 {
        return Ok(DecompNode::Branch {
            reason: "depth cap".into(),
            monomials: monomial_names(&t),
            children: vec![],
            capped: true,
        });
    }

    // Fully absorbed: every generator, both sides.
    if binomials.iter().all(|b| {
        t.monomial_ideal_contains(b.plus()) && t.monomial_ideal_contains(b.minus())
    }) {
        return Ok(DecompNode::MonomialAbsorbed { monomials: monomial_names(&t) });
    }

    // Violating generator: one side in the monomial ideal, the other not.
    if let Some(b) = binomials.iter().find(|b| {
        t.monomial_ideal_contains(b.plus()) != t.monomial_ideal_contains(b.minus())
    }) {
        let outside = if t.monomial_ideal_contains(b.plus()) { b.minus() } else { b.plus() };
        if outside.is_zero() {
            return Ok(DecompNode::Unit);
        }
        let mut powers = BTreeSet::new();
        record_powers(outside, &mut powers);
        let mut children = Vec::new();
        let mut capped = false;
        for (i, j) in powers {
            let new_t = augment(&t, i, j)?;
            debug_assert!(measure_advanced(&t, &new_t), "branch must advance the measure");
            match decompose_branch(n, binomials.clone(), new_t, cfg, depth + 1) {
                Ok(node) => children.push(node),
                Err(Error::ResourceCap { .. }) | Err(Error::IterationCap { .. }) => capped = true,
                Err(e) => return Err(e),
            }
        }
        return Ok(DecompNode::Branch {
            reason: "generator splits over the monomial ideal".into(),
            monomials: monomial_names(&t),
            children,
            capped,
        });
    }

    // Saturate; branch on stripped powers when the ideal grew.
    let input = TsatInput { binomials: binomials.clone(), products: vec![] };
    let outcome = t_saturated_closure(n, &input, &t, cfg)?;
    if !outcome.grew {
        return Ok(DecompNode::QuasiNormal {
            monomials: monomial_names(&t),
            generators: binomials.iter().map(|b| b.to_string()).collect(),
        });
    }
    let saturated = outcome.binomials.clone();
    let mut children = Vec::new();
    let mut capped = !outcome.reached_fixpoint;

    // Component with the saturated ideal: quasi-normal or further split.
    let respects = saturated.iter().all(|b| {
        t.monomial_ideal_contains(b.plus()) == t.monomial_ideal_contains(b.minus())
    });
    if respects {
        children.push(DecompNode::QuasiNormal {
            monomials: monomial_names(&t),
            generators: saturated.iter().map(|b| b.to_string()).collect(),
        });
    } else {
        match decompose_branch(n, saturated, t.clone(), cfg, depth + 1) {
            Ok(node) => children.push(node),
            Err(Error::ResourceCap { .. }) | Err(Error::IterationCap { .. }) => capped = true,
            Err(e) => return Err(e),
        }
    }

    // Branches from the stripped T-monomials.
    for (i, j) in outcome.stripped_powers {
        if !t.allows_variable(i, j) {
            continue;
        }
        let new_t = augment(&t, i, j)?;
        debug_assert!(measure_advanced(&t, &new_t), "strip branch must advance the measure");
        match decompose_branch(n, binomials.clone(), new_t, cfg, depth + 1) {
            Ok(node) => children.push(node),
            Err(Error::ResourceCap { .. }) | Err(Error::IterationCap { .. }) => capped = true,
            Err(e) => return Err(e),
        }
    }
    Ok(DecompNode::Branch {
        reason: "saturation grew the ideal".into(),
        monomials: monomial_names(&t),
        children,
        capped,
    })
}

fn augment(t: &TSet, coord: usize, bound: usize) -> Result<TSet> {
    let mut coords = t.coords.clone();
    let mut bounds = t.bounds.clone();
    match t.bound_for(coord) {
        None => {
            coords.push(coord);
            bounds.push(bound);
        }
        Some(old) => {
            debug_assert!(bound < old, "existing coordinate must strictly drop");
            let k = coords.iter().position(|&c| c == coord).unwrap();
            bounds[k] = bound;
        }
    }
    TSet::new(coords, bounds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cert::{basis_axioms, check_certificate};
    use crate::trunc::expand_binomial;

    fn v(entries: &[&[i64]]) -> ExpVector {
        ExpVector::from_i64s(entries)
    }

    fn bin(h: &[&[i64]]) -> DiffBinomial {
        DiffBinomial::of_vector(&v(h)).unwrap().0
    }

    /// B = y1^x y2 - y1 y2^x.
    fn b_binomial() -> DiffBinomial {
        bin(&[&[-1, 1], &[1, -1]])
    }

    /// C = y1^{x^2} y2 - y1 y2^{x^2}.
    fn c_poly(ring: &TruncRing) -> TruncPoly {
        expand_binomial(ring, &v(&[&[0, 0, 1], &[1]]), &v(&[&[1], &[0, 0, 1]])).unwrap()
    }

    fn closure_of_b(d: usize, rules: RuleToggles) -> ClosureResult {
        let ring = TruncRing::new(2, d);
        let mut cfg = ClosureConfig::with_trunc(d);
        cfg.rules = rules;
        let input = ClosureInput::from_gens(vec![b_binomial().expand(&ring).unwrap()]);
        closure_saturate(&input, &cfg).unwrap()
    }

    #[test]
    fn radical_wellmixed_closure_derives_second_shift() {
        let res = closure_of_b(2, RuleToggles::all());
        let ring = TruncRing::new(2, 2);
        assert!(res.contains(&c_poly(&ring)), "C must be derivable at D=2 with all rules");
    }

    #[test]
    fn wellmixed_only_closure_misses_second_shift() {
        for d in 2..=4 {
            let rules = RuleToggles { radical: false, ..RuleToggles::all() };
            let res = closure_of_b(d, rules);
            let ring = TruncRing::new(2, d);
            assert!(
                !res.contains(&c_poly(&ring)),
                "C must not be derivable without the radical rule at D={d}"
            );
        }
    }

    #[test]
    fn monomial_square_root_is_stripped() {
        let ring = TruncRing::new(1, 1);
        let y = TruncPoly::from_monomial(&ring, ring.var_monomial(0, 0));
        let input = ClosureInput::from_gens(vec![y.square()]);
        let res = closure_saturate(&input, &ClosureConfig::with_trunc(1)).unwrap();
        assert!(res.contains(&y));
    }

    #[test]
    fn empty_input_gives_zero_ideal() {
        let cfg = ClosureConfig::with_trunc(2);
        let res = closure_saturate(&ClosureInput::default(), &cfg).unwrap();
        assert_eq!(res.generator_count(), 0);
        let ring = TruncRing::new(1, 2);
        assert!(res.contains(&TruncPoly::zero(&ring)));
    }

    #[test]
    fn closure_is_extensive_and_idempotent() {
        let res = closure_of_b(2, RuleToggles::all());
        let ring = TruncRing::new(2, 2);
        // Extensive.
        assert!(res.contains(&b_binomial().expand(&ring).unwrap()));
        // Idempotent: re-running on the output adds nothing new.
        let cfg = ClosureConfig::with_trunc(2);
        let again = closure_saturate(&ClosureInput::from_gens(res.generator_polys()), &cfg).unwrap();
        let gb_first = res.ideal();
        for g in again.generator_polys() {
            assert!(res.contains(&g));
        }
        for g in gb_first.generators() {
            assert!(again.contains(g));
        }
    }

    #[test]
    fn closure_monotone_in_rules() {
        let weak = closure_of_b(2, RuleToggles { radical: false, ..RuleToggles::all() });
        let strong = closure_of_b(2, RuleToggles::all());
        for g in weak.generator_polys() {
            assert!(strong.contains(&g));
        }
    }

    #[test]
    fn every_added_generator_has_a_valid_certificate() {
        let res = closure_of_b(2, RuleToggles::all());
        for idx in 0..res.generator_count() {
            let cert = res.certificate_for_generator(idx, RuleToggles::all()).unwrap();
            if let Err(f) = check_certificate(&cert, res.axioms()) {
                panic!("generator {idx} certificate rejected: {f}");
            }
        }
    }

    #[test]
    fn member_certificates_validate() {
        let res = closure_of_b(2, RuleToggles::all());
        let ring = TruncRing::new(2, 2);
        let c = c_poly(&ring);
        let cert = res.certificate_for(&c, RuleToggles::all()).unwrap();
        assert_eq!(cert.goal, c);
        check_certificate(&cert, res.axioms()).unwrap();
    }

    #[test]
    fn colon_m_examples() {
        let lat = colon_m(2, &[b_binomial()], &OmMap::trivial(), &SatConfig::default()).unwrap();
        let expected = Lattice::new(2, vec![v(&[&[-1, 1], &[1, -1]])]).unwrap();
        assert_eq!(lat, expected);

        let empty = colon_m(2, &[], &OmMap::trivial(), &SatConfig::default()).unwrap();
        assert!(empty.is_zero());
    }

    #[test]
    fn t_saturation_strips_tracked_monomial_factor() {
        // y2 * B tracked in factored form; T = monomials with deg(f_2) < 1.
        let t = TSet::new(vec![1], vec![1]).unwrap();
        let input = TsatInput {
            binomials: vec![],
            products: vec![(v(&[&[], &[1]]), b_binomial())],
        };
        let cfg = ClosureConfig::with_trunc(2);
        let out = t_saturated_closure(2, &input, &t, &cfg).unwrap();
        let ring = TruncRing::new(2, 2);
        let b = b_binomial().expand(&ring).unwrap();
        let gb = Groebner::new(&ring, &out.gens, &cfg.groebner).unwrap();
        assert!(gb.contains(&b), "saturation must gain B itself");
        assert!(out.grew);
    }

    #[test]
    fn t_saturation_fixpoint_left_alone() {
        let t = TSet::new(vec![1], vec![1]).unwrap();
        let input = TsatInput { binomials: vec![b_binomial()], products: vec![] };
        let cfg = ClosureConfig::with_trunc(2);
        let out = t_saturated_closure(2, &input, &t, &cfg).unwrap();
        assert!(!out.grew, "an already saturated set stays put");
    }

    #[test]
    fn quasi_normal_examples() {
        let cfg = ClosureConfig::with_trunc(3);
        // {B}, J = {1}, a = (2): neither side in [y1^{x^2}].
        let t = TSet::new(vec![0], vec![2]).unwrap();
        assert!(is_quasi_normal(2, &[b_binomial()], &t, &cfg).unwrap());

        // {y1^{x^2} y2 - y1 y2^{x^2}}: left side in, right side not.
        let b2 = bin(&[&[-1, 0, 1], &[1, 0, -1]]);
        assert!(!is_quasi_normal(2, &[b2], &t, &cfg).unwrap());

        // Empty set is quasi-normal.
        assert!(is_quasi_normal(2, &[], &t, &cfg).unwrap());
    }

    #[test]
    fn decompose_normal_input_is_colon_leaf() {
        let cfg = ClosureConfig::with_trunc(2);
        let node = decompose(
            2,
            &[b_binomial()],
            None,
            &OmMap::trivial(),
            &SatConfig::default(),
            &cfg,
        )
        .unwrap();
        match node {
            DecompNode::ColonLeaf { lattice, .. } => {
                assert_eq!(lattice, Lattice::new(2, vec![v(&[&[-1, 1], &[1, -1]])]).unwrap());
            }
            other => panic!("expected a colon leaf, got {other:?}"),
        }
    }

    #[test]
    fn decompose_empty_input() {
        let cfg = ClosureConfig::with_trunc(2);
        let node = decompose(2, &[], None, &OmMap::trivial(), &SatConfig::default(), &cfg).unwrap();
        match node {
            DecompNode::ColonLeaf { lattice, .. } => assert!(lattice.is_zero()),
            other => panic!("expected a colon leaf, got {other:?}"),
        }
    }

    #[test]
    fn decompose_branches_on_split_generator() {
        // J = {1}, a = (2): the generator has one side in [y1^{x^2}].
        let cfg = ClosureConfig::with_trunc(2);
        let b2 = bin(&[&[-1, 0, 1], &[1, 0, -1]]);
        let t = TSet::new(vec![0], vec![2]).unwrap();
        let node = decompose(
            2,
            &[b2],
            Some(t),
            &OmMap::trivial(),
            &SatConfig::default(),
            &cfg,
        )
        .unwrap();
        match node {
            DecompNode::Branch { reason, children, .. } => {
                assert!(reason.contains("splits"), "{reason}");
                assert!(!children.is_empty());
            }
            other => panic!("expected a branch, got {other:?}"),
        }
    }

    #[test]
    fn product_closure_members_lie_in_both_factors() {
        // Small fixed instance of the intersection property.
        let ring = TruncRing::new(2, 2);
        let f = b_binomial().expand(&ring).unwrap();
        let g = bin(&[&[-1, 1], &[2]]).expand(&ring).unwrap();
        let cfg = ClosureConfig::with_trunc(2);
        let fg = closure_saturate(&ClosureInput::product_set(&[f.clone()], &[g.clone()]), &cfg).unwrap();
        let cf = closure_saturate(&ClosureInput::from_gens(vec![f]), &cfg).unwrap();
        let cg = closure_saturate(&ClosureInput::from_gens(vec![g]), &cfg).unwrap();
        for gen in fg.generator_polys() {
            assert!(cf.contains(&gen), "{gen} escapes the F-closure");
            assert!(cg.contains(&gen), "{gen} escapes the G-closure");
        }
    }
}
