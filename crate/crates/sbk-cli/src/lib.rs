//! Library backing the `sbk` binary: command implementations that return
//! structured reports, so the acceptance suite can drive them in-process
//! while the binary stays a thin argument-parsing shell.

pub mod formats;
pub mod report;

use std::fmt;
use std::path::Path;

use serde_json::json;

use sbk_core::basis::TauBasis;
use sbk_core::cert::basis_axioms;
use sbk_core::closure::{ClosureResult, DecompNode};
use sbk_core::{
    check_certificate, closure_saturate, compute_basis, membership_certificate, parse_trunc_poly,
    BasisConfig, CertCaps, Certificate, ClosureConfig, ClosureInput, DiffBinomial, EnumBounds,
    ExpVector, Lattice, OmMap, RuleToggles, SatConfig, TruncPoly, TruncRing,
};

use formats::{
    parse_element, parse_rules, rules_list, BasisFile, BinomialFile, BoundsFile, ChainFile,
    GensFile, LatticeFile, TauFile,
};
use report::RunReport;

/// Exit discipline: 0 success, 1 semantic failure (stuck membership,
/// invalid certificate, failed verification), 2 malformed input, 3 resource
/// cap.
#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Failed(String),
    Resource(String),
}

impl CliError {
    pub fn parse<E: fmt::Display>(e: E) -> Self {
        CliError::Parse(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "input error: {m}"),
            CliError::Failed(m) => write!(f, "{m}"),
            CliError::Resource(m) => write!(f, "resource cap: {m}"),
        }
    }
}

fn lift(e: sbk_core::Error) -> CliError {
    use sbk_core::Error::*;
    match e {
        ResourceCap { .. } | IterationCap { .. } => CliError::Resource(e.to_string()),
        NotInLattice { .. } | NoApplicableBasis { .. } | RuleDisabled { .. } => {
            CliError::Failed(e.to_string())
        }
        other => CliError::Parse(other.to_string()),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// Test hook: `SBK_DISABLE_RADICAL=1` turns the radical rule off everywhere.
pub fn env_toggles(mut toggles: RuleToggles) -> RuleToggles {
    if std::env::var("SBK_DISABLE_RADICAL").map_or(false, |v| v == "1") {
        toggles.radical = false;
    }
    toggles
}

/// Common bound flags with the documented defaults.
#[derive(Clone, Copy, Debug)]
pub struct Bounds {
    pub trunc: usize,
    pub enum_deg: usize,
    pub height: u64,
    pub stability: usize,
    pub caps: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { trunc: 3, enum_deg: 2, height: 2, stability: 2, caps: 6 }
    }
}

impl Bounds {
    pub fn basis_config(&self) -> BasisConfig {
        BasisConfig {
            enum_bounds: EnumBounds {
                coeff_deg: self.enum_deg,
                height: self.height,
                ..Default::default()
            },
            stability_window: self.stability,
            max_rounds: 8,
        }
    }

    pub fn closure_config(&self, rules: RuleToggles) -> ClosureConfig {
        let mut cfg = ClosureConfig::with_trunc(self.trunc);
        cfg.rules = rules;
        cfg.max_iterations = self.caps;
        cfg
    }
}

// ---------------------------------------------------------------------------
// basis
// ---------------------------------------------------------------------------

pub struct BasisOutcome {
    pub report: RunReport,
    pub file: BasisFile,
}

pub fn cmd_basis(lattice: &Path, bounds: &Bounds) -> Result<BasisOutcome, CliError> {
    let lat: Lattice = read_json::<LatticeFile>(lattice)?.into_lattice()?;
    let result = compute_basis(&lat, &bounds.basis_config()).map_err(lift)?;
    let taus: Vec<TauFile> = result
        .per_tau
        .iter()
        .map(|tb: &TauBasis| TauFile {
            tau: tb.tau.to_string(),
            g: tb.g.clone(),
            f: tb.f.iter().map(BinomialFile::from_binomial).collect(),
        })
        .collect();
    let file = BasisFile {
        n: lat.n(),
        taus,
        bounds: BoundsFile {
            enum_deg: result.bounds_used.coeff_deg,
            height: result.bounds_used.height,
        },
        stable_for: result.stable_for,
    };
    let binomials = result.binomials();
    let mut report = RunReport::new("basis");
    report.config(json!({
        "lattice": lattice.display().to_string(),
        "enum_deg": bounds.enum_deg,
        "height": bounds.height,
        "stability": bounds.stability,
    }));
    report.results(json!({
        "basis": binomials.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        "count": binomials.len(),
        "bounds_used": { "enum_deg": file.bounds.enum_deg, "height": file.bounds.height },
        "stable_for": file.stable_for,
    }));
    for b in &binomials {
        report.line(format!("basis element: {b}"));
    }
    report.line(format!(
        "stable for {} consecutive bound increases (final bounds: deg {}, height {})",
        file.stable_for, file.bounds.enum_deg, file.bounds.height
    ));
    Ok(BasisOutcome { report, file })
}

// ---------------------------------------------------------------------------
// member
// ---------------------------------------------------------------------------

pub struct MemberOutcome {
    pub report: RunReport,
    pub certificate: Certificate,
}

pub fn cmd_member(
    basis_file: &Path,
    element_json: &str,
    bounds: &Bounds,
) -> Result<MemberOutcome, CliError> {
    let basis_data: BasisFile = read_json(basis_file)?;
    let basis = basis_data.binomials()?;
    let h = parse_element(element_json)?;
    if h.len() != basis_data.n {
        return Err(CliError::Parse(format!(
            "element has {} coordinates, basis expects {}",
            h.len(),
            basis_data.n
        )));
    }
    let toggles = env_toggles(RuleToggles::all());
    let caps = CertCaps::default();
    let cert = membership_certificate(&h, &basis, toggles, &caps).map_err(lift)?;

    // Re-validate through the independent checker before reporting success.
    let ring = TruncRing::new(cert.n, cert.d);
    let axioms = basis_axioms(&ring, &basis).map_err(lift)?;
    if let Err(f) = check_certificate(&cert, &axioms) {
        return Err(CliError::Failed(format!("constructed certificate failed validation: {f}")));
    }

    let mut report = RunReport::new("member");
    report.config(json!({
        "basis": basis_file.display().to_string(),
        "element": h.to_string(),
        "caps": bounds.caps,
    }));
    report.results(json!({
        "certified": true,
        "steps": cert.steps.len(),
        "trunc": cert.d,
        "goal": cert.goal.to_string(),
    }));
    report.line(format!("certified membership of {h} with {} steps at D = {}", cert.steps.len(), cert.d));
    Ok(MemberOutcome { report, certificate: cert })
}

// ---------------------------------------------------------------------------
// closure
// ---------------------------------------------------------------------------

pub struct ClosureOutcome {
    pub report: RunReport,
    pub result: ClosureResult,
    pub capped: bool,
}

pub fn cmd_closure(
    gens_file: &Path,
    rules: RuleToggles,
    queries: &[String],
    bounds: &Bounds,
) -> Result<ClosureOutcome, CliError> {
    let gens_data: GensFile = read_json(gens_file)?;
    let trunc = gens_data.trunc.unwrap_or(bounds.trunc);
    let ring = TruncRing::new(gens_data.n, trunc);
    let (gens, products) = gens_data.parse_polys(&ring)?;
    let input = ClosureInput { gens, products };
    let cfg = bounds.closure_config(rules);
    let result = closure_saturate(&input, &cfg).map_err(lift)?;

    let mut verdicts = Vec::new();
    let mut lines = Vec::new();
    for q in queries {
        let poly = parse_trunc_poly(&ring, q).map_err(CliError::parse)?;
        let derivable = result.contains(&poly);
        let verdict = if derivable { "derivable" } else { "not derivable at bounds" };
        lines.push(format!("query {q}: {verdict}"));
        verdicts.push(json!({ "query": q, "verdict": verdict }));
    }

    let capped = !result.reached_fixpoint;
    let mut report = RunReport::new("closure");
    report.config(json!({
        "gens": gens_file.display().to_string(),
        "trunc": trunc,
        "rules": rules_list(&rules),
        "caps": bounds.caps,
    }));
    report.results(json!({
        "generators": result.generator_count(),
        "iterations": result.iterations,
        "fixpoint": result.reached_fixpoint,
        "partial": capped,
        "queries": verdicts,
    }));
    report.line(format!(
        "saturated to {} generators in {} iterations{}",
        result.generator_count(),
        result.iterations,
        if capped { " (iteration cap hit: partial result)" } else { "" }
    ));
    for l in lines {
        report.line(l);
    }
    Ok(ClosureOutcome { report, result, capped })
}

// ---------------------------------------------------------------------------
// chain
// ---------------------------------------------------------------------------

pub struct ChainOutcome {
    pub report: RunReport,
    /// For each step after the first: did it add anything new.
    pub added: Vec<bool>,
    pub stabilization: Option<usize>,
}

pub fn cmd_chain(spec_file: &Path, bounds: &Bounds) -> Result<ChainOutcome, CliError> {
    let spec: ChainFile = read_json(spec_file)?;
    let rules = env_toggles(match &spec.rules {
        Some(list) => parse_rules(&list.join(","))?,
        None => RuleToggles::all(),
    });
    let ring = TruncRing::new(spec.n, spec.trunc);
    let mut steps: Vec<Vec<TruncPoly>> = Vec::new();
    for step in &spec.steps {
        let mut polys = Vec::new();
        for s in step {
            polys.push(parse_trunc_poly(&ring, s).map_err(CliError::parse)?);
        }
        steps.push(polys);
    }
    if steps.is_empty() {
        return Err(CliError::Parse("chain needs at least one step".into()));
    }

    let mut cfg = ClosureConfig::with_trunc(spec.trunc);
    cfg.rules = rules;
    cfg.max_iterations = bounds.caps;

    let mut report = RunReport::new("chain");
    report.config(json!({
        "spec": spec_file.display().to_string(),
        "trunc": spec.trunc,
        "rules": rules_list(&rules),
        "steps": steps.len(),
    }));

    let mut added = Vec::new();
    let mut cumulative: Vec<TruncPoly> = steps[0].clone();
    for k in 1..steps.len() {
        let closed = closure_saturate(&ClosureInput::from_gens(cumulative.clone()), &cfg)
            .map_err(lift)?;
        let new = steps[k].iter().any(|g| !closed.contains(g));
        added.push(new);
        report.line(format!(
            "step {}: {}",
            k + 1,
            if new { "adds new generators" } else { "adds nothing" }
        ));
        cumulative.extend(steps[k].clone());
    }
    let stabilization = if added.iter().any(|a| *a) && *added.last().unwrap() {
        None
    } else {
        // Last index that still added, 1-based step count.
        let last_add = added.iter().rposition(|a| *a).map(|i| i + 2).unwrap_or(1);
        Some(last_add)
    };
    match stabilization {
        Some(k) => report.line(format!("chain stabilizes at k = {k}")),
        None => report.line("chain still growing at bounds".to_string()),
    }
    report.results(json!({
        "added": added,
        "stabilization": stabilization,
    }));
    Ok(ChainOutcome { report, added, stabilization })
}

// ---------------------------------------------------------------------------
// verify-examples
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LegStatus {
    Pass,
    Fail,
    Bounded,
}

impl fmt::Display for LegStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LegStatus::Pass => write!(f, "PASS"),
            LegStatus::Fail => write!(f, "FAIL"),
            LegStatus::Bounded => write!(f, "BOUND-FAILURE"),
        }
    }
}

pub struct VerifyOutcome {
    pub report: RunReport,
    pub legs: Vec<(String, LegStatus)>,
}

impl VerifyOutcome {
    pub fn all_pass(&self) -> bool {
        self.legs.iter().all(|(_, s)| *s == LegStatus::Pass)
    }
}

fn vec2(a: &[i64], b: &[i64]) -> ExpVector {
    ExpVector::from_i64s(&[a, b])
}

fn classify<T>(r: Result<T, CliError>, ok: impl FnOnce(T) -> bool) -> LegStatus {
    match r {
        Ok(v) => {
            if ok(v) {
                LegStatus::Pass
            } else {
                LegStatus::Fail
            }
        }
        Err(CliError::Resource(_)) => LegStatus::Bounded,
        Err(CliError::Parse(m)) if m.contains("truncation overflow") => LegStatus::Bounded,
        Err(_) => LegStatus::Fail,
    }
}

/// The four built-in desk-scale scenarios: three basis-plus-membership
/// checks and the well-mixed/radical discrimination experiment.
pub fn cmd_verify_examples(trunc_override: Option<usize>) -> VerifyOutcome {
    let toggles = env_toggles(RuleToggles::all());
    let mut legs: Vec<(String, LegStatus)> = Vec::new();
    let mut report = RunReport::new("verify-examples");
    report.config(json!({
        "trunc_override": trunc_override,
        "radical_enabled": toggles.radical,
    }));

    let basis_cfg = BasisConfig::default();
    let caps = CertCaps::default();

    struct Scenario {
        name: &'static str,
        generator: ExpVector,
        expected: Vec<&'static str>,
        member: ExpVector,
    }
    let scenarios = [
        Scenario {
            name: "two-variable twist, degree one",
            generator: vec2(&[-1, 1], &[1, -1]),
            expected: &["Y^(x, 1) - Y^(1, x)"][..],
            member: vec2(&[-1, 0, 1], &[1, 0, -1]),
        },
        Scenario {
            name: "symmetric quadratic lattice",
            generator: vec2(&[1, -1, 1], &[-1, 1, -1]),
            expected: &["Y^(x^2 + 1, x) - Y^(x, x^2 + 1)", "Y^(x^3 + 1, 0) - Y^(0, x^3 + 1)"][..],
            member: vec2(&[1, 0, 1, 0, 1], &[-1, 0, -1, 0, -1]),
        },
        Scenario {
            name: "mixed quadratic lattice",
            generator: vec2(&[1, -1, 1], &[-1, 1]),
            expected: &["Y^(x^2 + 1, x) - Y^(x, 1)", "Y^(x^3 + 1, x^2) - Y^(0, 1)"][..],
            member: vec2(&[1, 0, 1, 0, 1], &[-1, 0, 0, 1]),
        },
    ];

    for sc in &scenarios {
        // Basis leg.
        let lat = Lattice::new(2, vec![sc.generator.clone()]).expect("valid scenario lattice");
        let basis_result = compute_basis(&lat, &basis_cfg).map_err(lift);
        let (basis, basis_status) = match basis_result {
            Ok(res) => {
                let got: Vec<String> = res.binomials().iter().map(|b| b.to_string()).collect();
                let mut want: Vec<String> = sc.expected.iter().map(|s| s.to_string()).collect();
                want.sort();
                let mut got_sorted = got.clone();
                got_sorted.sort();
                let ok = got_sorted == want;
                (res.binomials(), if ok { LegStatus::Pass } else { LegStatus::Fail })
            }
            Err(CliError::Resource(_)) => (vec![], LegStatus::Bounded),
            Err(_) => (vec![], LegStatus::Fail),
        };
        legs.push((format!("{}: basis", sc.name), basis_status));

        // Membership leg: certify a derived element and re-check it.
        let member_status = if basis.is_empty() {
            LegStatus::Bounded
        } else {
            let mut caps = caps;
            if let Some(d) = trunc_override {
                // Forcing a tiny D makes certification impossible without
                // exceeding the truncation: report a bound failure.
                let needed = sc
                    .member
                    .split_parts()
                    .0
                    .max_deg()
                    .max(sc.member.split_parts().1.max_deg());
                if (d as i64) < needed {
                    legs.push((format!("{}: membership", sc.name), LegStatus::Bounded));
                    continue;
                }
                caps = CertCaps::default();
            }
            classify(
                membership_certificate(&sc.member, &basis, toggles, &caps).map_err(lift),
                |cert| {
                    let ring = TruncRing::new(cert.n, cert.d);
                    match basis_axioms(&ring, &basis) {
                        Ok(axioms) => check_certificate(&cert, &axioms).is_ok(),
                        Err(_) => false,
                    }
                },
            )
        };
        legs.push((format!("{}: membership", sc.name), member_status));
    }

    // Discrimination scenario: without the radical rule the second shifted
    // binomial stays out at every truncation up to 4.
    {
        let name = "well-mixed vs radical discrimination";
        let d = trunc_override.unwrap_or(4).min(4);
        let status = if d < 2 {
            LegStatus::Bounded
        } else {
            let ring = TruncRing::new(2, d);
            let b = DiffBinomial::of_vector(&vec2(&[-1, 1], &[1, -1]))
                .unwrap()
                .0
                .expand(&ring)
                .map_err(lift);
            let c = DiffBinomial::of_vector(&vec2(&[-1, 0, 1], &[1, 0, -1]))
                .unwrap()
                .0
                .expand(&ring)
                .map_err(lift);
            match (b, c) {
                (Ok(b), Ok(c)) => {
                    let mut cfg = ClosureConfig::with_trunc(d);
                    cfg.rules = RuleToggles { radical: false, shift: true, wellmixed: true };
                    classify(
                        closure_saturate(&ClosureInput::from_gens(vec![b]), &cfg).map_err(lift),
                        |res| !res.contains(&c),
                    )
                }
                _ => LegStatus::Bounded,
            }
        };
        legs.push((format!("{name}: non-derivability"), status));
    }

    for (name, status) in &legs {
        report.line(format!("{status}: {name}"));
    }
    report.results(json!({
        "legs": legs
            .iter()
            .map(|(n, s)| json!({ "name": n, "status": s.to_string() }))
            .collect::<Vec<_>>(),
        "all_pass": legs.iter().all(|(_, s)| *s == LegStatus::Pass),
    }));
    VerifyOutcome { report, legs }
}

// ---------------------------------------------------------------------------
// check (standalone certificate checker)
// ---------------------------------------------------------------------------

pub struct CheckOutcome {
    pub report: RunReport,
    pub valid: bool,
    pub diagnostic: Option<String>,
}

pub fn cmd_check(cert_file: &Path, gens_file: &Path) -> Result<CheckOutcome, CliError> {
    let value: serde_json::Value = read_json(cert_file)?;
    let cert = Certificate::from_json(&value).map_err(CliError::parse)?;
    let ring = TruncRing::new(cert.n, cert.d);
    let gens_data: GensFile = read_json(gens_file)?;
    if gens_data.n != cert.n {
        return Err(CliError::Parse(format!(
            "certificate is over n = {}, axioms over n = {}",
            cert.n, gens_data.n
        )));
    }
    let (axioms, _) = gens_data.parse_polys(&ring)?;
    let mut report = RunReport::new("check");
    report.config(json!({
        "cert": cert_file.display().to_string(),
        "gens": gens_file.display().to_string(),
    }));
    match check_certificate(&cert, &axioms) {
        Ok(()) => {
            report.line(format!("certificate valid: {} steps, goal {}", cert.steps.len(), cert.goal));
            report.results(json!({ "valid": true, "steps": cert.steps.len() }));
            Ok(CheckOutcome { report, valid: true, diagnostic: None })
        }
        Err(f) => {
            report.line(format!("certificate INVALID at {f}"));
            report.results(json!({
                "valid": false,
                "step": f.step_id,
                "reason": f.reason,
            }));
            Ok(CheckOutcome { report, valid: false, diagnostic: Some(f.to_string()) })
        }
    }
}

// ---------------------------------------------------------------------------
// decompose (driver surface used by tests and the README walkthrough)
// ---------------------------------------------------------------------------

pub fn run_decompose(
    binomials: &[DiffBinomial],
    n: usize,
    bounds: &Bounds,
) -> Result<DecompNode, CliError> {
    let cfg = bounds.closure_config(env_toggles(RuleToggles::all()));
    sbk_core::decompose(n, binomials, None, &OmMap::trivial(), &SatConfig::default(), &cfg)
        .map_err(lift)
}
