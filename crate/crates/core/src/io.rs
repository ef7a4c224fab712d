//! JSON files for expansions and group-ring modules.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bqf::Bqf;
use crate::commalg::GroupRingModule;
use crate::error::{Error, Result};
use crate::padic::ScalarCtx;
use crate::qexp::{SiegelExpansion, Weight};
use crate::symrep::SymVector;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffEntry {
    pub m: i64,
    pub r: i64,
    pub n: i64,
    pub vec: Vec<i128>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionFile {
    pub p: u64,
    pub mod_exp: u32,
    pub weight: [u32; 2],
    pub precision: u64,
    pub coeffs: Vec<CoeffEntry>,
}

impl ExpansionFile {
    /// Canonical form: keys ascending in (m, r, n), zero vectors dropped.
    pub fn from_expansion(f: &SiegelExpansion) -> Self {
        let w = f.weight();
        ExpansionFile {
            p: f.ctx().p(),
            mod_exp: f.ctx().m(),
            weight: [w.j, w.k],
            precision: f.precision(),
            coeffs: f
                .iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(q, v)| CoeffEntry { m: q.m, r: q.r, n: q.n, vec: v.coeffs().iter().map(|&x| x as i128).collect() })
                .collect(),
        }
    }

    /// Validates and reduces coefficients mod p^m. Repeated keys are an error.
    pub fn to_expansion(&self) -> Result<SiegelExpansion> {
        let ctx = ScalarCtx::new(self.p, self.mod_exp)?;
        let weight = Weight::new(self.weight[0], self.weight[1])?;
        let mut f = SiegelExpansion::new(ctx, weight, self.precision)?;
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.coeffs {
            let q = Bqf::new(c.m, c.r, c.n);
            if !q.is_semidefinite() {
                return Err(Error::Parse(format!("key {q} is not positive semidefinite")));
            }
            if !seen.insert(q) {
                return Err(Error::Parse(format!("key {q} appears twice")));
            }
            if c.vec.len() != weight.degree() + 1 {
                return Err(Error::DegreeMismatch { expected: weight.degree(), found: c.vec.len().saturating_sub(1) });
            }
            f.insert(q, SymVector::from_ints(ctx, &c.vec))?;
        }
        Ok(f)
    }
}

pub fn expansion_from_json(s: &str) -> Result<SiegelExpansion> {
    let file: ExpansionFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_expansion()
}

pub fn expansion_to_json(f: &SiegelExpansion) -> String {
    serde_json::to_string_pretty(&ExpansionFile::from_expansion(f)).expect("serializable") + "\n"
}

pub fn load_expansion(path: &Path) -> Result<SiegelExpansion> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    expansion_from_json(&s)
}

pub fn save_expansion(f: &SiegelExpansion, path: &Path) -> Result<()> {
    std::fs::write(path, expansion_to_json(f)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Each generator either as a list of rows or flattened row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GenMatrix {
    Rows(Vec<Vec<u64>>),
    Flat(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleFile {
    pub p: u64,
    #[serde(rename = "N")]
    pub n: u32,
    pub q: usize,
    pub dim: usize,
    pub gens: Vec<GenMatrix>,
}

impl ModuleFile {
    pub fn to_module(&self) -> Result<GroupRingModule> {
        let d = self.dim;
        let gens = self
            .gens
            .iter()
            .map(|g| match g {
                GenMatrix::Rows(rows) => Ok(rows.clone()),
                GenMatrix::Flat(xs) if xs.len() == d * d => Ok(xs.chunks(d.max(1)).map(|c| c.to_vec()).collect()),
                GenMatrix::Flat(xs) => Err(Error::InvalidModule(format!("flat generator of length {} for dim {d}", xs.len()))),
            })
            .collect::<Result<Vec<_>>>()?;
        if gens.iter().any(|g| g.len() != d) {
            return Err(Error::InvalidModule(format!("generator size does not match dim {d}")));
        }
        GroupRingModule::new(self.p, self.n, self.q, gens)
    }

    pub fn from_module(m: &GroupRingModule) -> Self {
        ModuleFile { p: m.p(), n: m.n(), q: m.q(), dim: m.dim(), gens: m.gens().iter().cloned().map(GenMatrix::Rows).collect() }
    }
}

pub fn module_from_json(s: &str) -> Result<GroupRingModule> {
    let file: ModuleFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_module()
}

pub fn load_module(path: &Path) -> Result<GroupRingModule> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    module_from_json(&s)
}
