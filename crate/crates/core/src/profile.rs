//! Numeric fingerprints of del Pezzo fibrations, read from JSON.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cone::dual_rays;
use crate::error::{Error, Result};
use crate::lattice::LatticeVector;

/// The nef cone of curves of the generic fiber in Euclidean coordinates,
/// with the anticanonical height as a linear functional.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NefConeEta {
    pub generators: Vec<LatticeVector>,
    #[serde(default)]
    pub facets: Vec<LatticeVector>,
    pub height: LatticeVector,
}

impl NefConeEta {
    pub fn rank(&self) -> usize {
        self.height.len()
    }

    pub fn height_of(&self, v: &[i64]) -> i64 {
        crate::arith::dot(self.height.coords(), v)
    }

    /// Fills in facets from the generators when they were omitted.
    pub fn with_facets(mut self) -> Result<Self> {
        if self.facets.is_empty() {
            let gens: Vec<Vec<i64>> = self.generators.iter().map(|g| g.0.clone()).collect();
            self.facets = dual_rays(&gens, self.rank())?.into_iter().map(LatticeVector).collect();
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibrationProfile {
    pub name: String,
    pub fiber_degree: i64,
    pub rho_eta: usize,
    pub neg: i64,
    /// `maxdef(d)` for the negative heights `d` that carry sections.
    pub maxdef_table: BTreeMap<i64, i64>,
    pub brauer_order: u64,
    pub num_profiles: u64,
    pub lattice_index: u64,
    pub has_ff_conic: bool,
    pub nef_cone_eta: NefConeEta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl FibrationProfile {
    pub fn from_json(s: &str) -> Result<Self> {
        let p: FibrationProfile =
            serde_json::from_str(s).map_err(|e| Error::domain(format!("invalid profile JSON: {e}")))?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Domain(format!("profile {}: {m}", self.name)));
        if !(1..=8).contains(&self.fiber_degree) {
            return bad(format!("fiber degree {} outside 1..=8", self.fiber_degree));
        }
        if self.rho_eta == 0 {
            return bad("rho_eta must be positive".into());
        }
        for (&d, &m) in &self.maxdef_table {
            if d >= 0 || d < self.neg {
                return bad(format!("maxdef key {d} must lie in [neg, 0) = [{}, 0)", self.neg));
            }
            if m < 0 {
                return bad(format!("maxdef({d}) = {m} is negative"));
            }
        }
        if self.brauer_order == 0 || self.num_profiles == 0 || self.lattice_index == 0 {
            return bad("brauer_order, num_profiles and lattice_index must be positive".into());
        }
        let cone = &self.nef_cone_eta;
        if cone.rank() != self.rho_eta {
            return bad(format!("height functional has length {} but rho_eta is {}", cone.rank(), self.rho_eta));
        }
        if cone.generators.is_empty() || cone.generators.iter().any(|g| g.len() != self.rho_eta) {
            return bad("nef cone generators must be nonempty with length rho_eta".into());
        }
        if cone.facets.iter().any(|f| f.len() != self.rho_eta) {
            return bad("nef cone facets must have length rho_eta".into());
        }
        Ok(())
    }
}

pub const SHIPPED: [&str; 4] = ["cubic-pencil", "x5-pencil", "hypersurface-23", "diagonal-cubic"];

/// The profile files bundled with the library.
pub fn shipped_json(name: &str) -> Option<&'static str> {
    Some(match name {
        "cubic-pencil" => include_str!("../../../profiles/cubic-pencil.json"),
        "x5-pencil" => include_str!("../../../profiles/x5-pencil.json"),
        "hypersurface-23" => include_str!("../../../profiles/hypersurface-23.json"),
        "diagonal-cubic" => include_str!("../../../profiles/diagonal-cubic.json"),
        _ => return None,
    })
}

pub fn shipped(name: &str) -> Result<FibrationProfile> {
    let s = shipped_json(name).ok_or_else(|| Error::NotFound(format!("no shipped profile named {name}")))?;
    FibrationProfile::from_json(s)
}
