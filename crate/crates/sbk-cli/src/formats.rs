//! File formats for the command-line surface. All polynomial payloads use
//! the textual form printed by the library (`c * y[i][j]^e * ...`);
//! exponent polynomials are plain integer arrays `[c0, c1, ...]`.

use serde::{Deserialize, Serialize};

use sbk_core::{
    parse_trunc_poly, DiffBinomial, ExpVector, Lattice, RuleToggles, SymPoly, TruncPoly, TruncRing,
};

use crate::CliError;

/// `{"n": int, "generators": [[[c0, c1, ...], ...], ...]}`
#[derive(Serialize, Deserialize)]
pub struct LatticeFile {
    pub n: usize,
    pub generators: Vec<ExpVector>,
}

impl LatticeFile {
    pub fn into_lattice(self) -> Result<Lattice, CliError> {
        Lattice::new(self.n, self.generators).map_err(CliError::parse)
    }

    pub fn from_lattice(lat: &Lattice) -> Self {
        LatticeFile { n: lat.n(), generators: lat.generators().to_vec() }
    }
}

/// One sign-pattern slice of a basis file.
#[derive(Serialize, Deserialize)]
pub struct TauFile {
    pub tau: String,
    #[serde(rename = "G")]
    pub g: Vec<ExpVector>,
    #[serde(rename = "F")]
    pub f: Vec<BinomialFile>,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct BinomialFile {
    pub plus: ExpVector,
    pub minus: ExpVector,
}

impl BinomialFile {
    pub fn into_binomial(self) -> Result<DiffBinomial, CliError> {
        DiffBinomial::new(self.plus, self.minus)
            .map(|(b, _)| b)
            .map_err(CliError::parse)
    }

    pub fn from_binomial(b: &DiffBinomial) -> Self {
        BinomialFile { plus: b.plus().clone(), minus: b.minus().clone() }
    }
}

/// Output of `basis`, re-read by `member`.
#[derive(Serialize, Deserialize)]
pub struct BasisFile {
    pub n: usize,
    pub taus: Vec<TauFile>,
    pub bounds: BoundsFile,
    pub stable_for: usize,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
pub struct BoundsFile {
    pub enum_deg: usize,
    pub height: u64,
}

impl BasisFile {
    pub fn binomials(&self) -> Result<Vec<DiffBinomial>, CliError> {
        let mut out = Vec::new();
        for tau in &self.taus {
            for b in &tau.f {
                let bin = b.clone().into_binomial()?;
                if !out.contains(&bin) {
                    out.push(bin);
                }
            }
        }
        out.sort();
        Ok(out)
    }
}

/// Generators for the closure commands:
/// `{"n":, "trunc":, "gens": [poly-text], "products": [[poly, poly]]}`.
#[derive(Serialize, Deserialize)]
pub struct GensFile {
    pub n: usize,
    #[serde(default)]
    pub trunc: Option<usize>,
    #[serde(default)]
    pub gens: Vec<String>,
    #[serde(default)]
    pub products: Vec<(String, String)>,
}

impl GensFile {
    pub fn parse_polys(&self, ring: &TruncRing) -> Result<(Vec<TruncPoly>, Vec<(TruncPoly, TruncPoly)>), CliError> {
        let mut gens = Vec::new();
        for s in &self.gens {
            gens.push(parse_trunc_poly(ring, s).map_err(CliError::parse)?);
        }
        let mut products = Vec::new();
        for (a, b) in &self.products {
            let pa = parse_trunc_poly(ring, a).map_err(CliError::parse)?;
            let pb = parse_trunc_poly(ring, b).map_err(CliError::parse)?;
            gens.push(pa.mul(&pb));
            products.push((pa, pb));
        }
        Ok((gens, products))
    }
}

/// Chain experiment specification: cumulative generator increments.
#[derive(Serialize, Deserialize)]
pub struct ChainFile {
    pub n: usize,
    pub trunc: usize,
    #[serde(default)]
    pub rules: Option<Vec<String>>,
    pub steps: Vec<Vec<String>>,
}

/// Parses an exponent vector from inline JSON: `[[c0, c1, ...], ...]`.
pub fn parse_element(json: &str) -> Result<ExpVector, CliError> {
    let raw: Vec<Vec<i64>> = serde_json::from_str(json)
        .map_err(|e| CliError::Parse(format!("element must be an array of integer arrays: {e}")))?;
    if raw.is_empty() {
        return Err(CliError::Parse("element needs at least one coordinate".into()));
    }
    Ok(ExpVector::new(
        raw.into_iter()
            .map(|cs| SymPoly::from_i64s(&cs))
            .collect(),
    ))
}

/// Parses `--rules shift,wellmixed,radical` (any subset, any order).
pub fn parse_rules(list: &str) -> Result<RuleToggles, CliError> {
    let mut toggles = RuleToggles { shift: false, wellmixed: false, radical: false };
    for part in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match part {
            "shift" => toggles.shift = true,
            "wellmixed" => toggles.wellmixed = true,
            "radical" => toggles.radical = true,
            other => {
                return Err(CliError::Parse(format!(
                    "unknown rule `{other}` (expected shift, wellmixed, radical)"
                )))
            }
        }
    }
    Ok(toggles)
}

pub fn rules_list(toggles: &RuleToggles) -> Vec<&'static str> {
    let mut out = Vec::new();
    if toggles.shift {
        out.push("shift");
    }
    if toggles.wellmixed {
        out.push("wellmixed");
    }
    if toggles.radical {
        out.push("radical");
    }
    out
}
