//! Worked-example reports and their serialization as sorted-key JSON or CSV.

use serde::Serialize;
use serde_json::Value;

use crate::arith::{rat_to_string, Rational};
use crate::curves;
use crate::error::{Error, Result};
use crate::lattice::PicardLattice;
use crate::manin::{self, ConvergenceReport, CountingModel};
use crate::profile::{self, FibrationProfile};
use crate::thresholds::{threshold_report, ThresholdReport};
use crate::weyl;

pub const DEFAULT_Q: i64 = 2;
pub const DEFAULT_DMAX: i64 = 20;

const WEYL_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonodromyReport {
    pub group: String,
    pub order: usize,
    pub line_orbits: Vec<usize>,
    pub conic_orbits: Vec<usize>,
    pub invariant_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleReport {
    pub name: String,
    pub fiber_degree: i64,
    pub thresholds: ThresholdReport,
    pub monodromy: Option<MonodromyReport>,
    pub tau: u64,
    pub alpha: String,
    pub counting: ConvergenceReport,
    pub notes: Vec<String>,
}

/// Monodromy of the fiber lattice for the examples whose monodromy group is
/// known: the full Weyl group for the cubic pencil and the `(Z/3)^3`
/// subgroup for the diagonal cubic.
pub fn example_monodromy(name: &str) -> Result<Option<MonodromyReport>> {
    let group_label = match name {
        "cubic-pencil" => "W(E6)",
        "diagonal-cubic" => "(Z/3)^3",
        _ => return Ok(None),
    };
    let lat = PicardLattice::of_degree(3)?;
    let w = weyl::generate_group(&weyl::weyl_generators(&lat)?, WEYL_CAP)?;
    let g = if name == "diagonal-cubic" { weyl::find_diagonal_cubic_subgroup(&w, &lat)? } else { w };
    let lines = curves::enumerate_neg_one_curves(&lat);
    let conics = curves::enumerate_conic_classes(&lat);
    Ok(Some(MonodromyReport {
        group: group_label.to_string(),
        order: g.order(),
        line_orbits: weyl::orbits(&g, &lines)?.sizes(),
        conic_orbits: weyl::orbits(&g, &conics)?.sizes(),
        invariant_rank: weyl::invariant_sublattice(g.generators(), lat.rank()).len(),
    }))
}

pub fn profile_report(p: &FibrationProfile, q: Rational, d_max: i64) -> Result<ExampleReport> {
    let model = CountingModel::from_rank_one_profile(p.clone(), q)?;
    let counting = manin::convergence_report(&model, d_max)?;
    let alpha = manin::alpha(&p.nef_cone_eta)?.value;
    let thresholds = threshold_report(p);
    let mut notes = Vec::new();
    if thresholds.maxdef_table_empty {
        notes.push("maxdef table is empty; maxdef(X) taken as 0".to_string());
    }
    notes.push(format!(
        "extrapolated constant / theorem constant = {:.6}, compared with q^{} = {}",
        counting.offset, model.dim_offset, counting.expected_offset
    ));
    Ok(ExampleReport {
        name: p.name.clone(),
        fiber_degree: p.fiber_degree,
        thresholds,
        monodromy: example_monodromy(&p.name)?,
        tau: manin::tau(p),
        alpha: rat_to_string(&alpha),
        counting,
        notes,
    })
}

pub fn run_example(name: &str, q: Rational, d_max: i64) -> Result<ExampleReport> {
    if !profile::SHIPPED.contains(&name) {
        return Err(Error::NotFound(format!(
            "unknown example {name}; expected one of {}",
            profile::SHIPPED.join(", ")
        )));
    }
    profile_report(&profile::shipped(name)?, q, d_max)
}

/// Pretty JSON with object keys in sorted order and a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    // serde_json::Map is a BTreeMap here, so going through Value sorts keys.
    let value = serde_json::to_value(v).map_err(|e| Error::domain(format!("serialization failed: {e}")))?;
    let mut s = serde_json::to_string_pretty(&value).expect("values serialize");
    s.push('\n');
    Ok(s)
}

/// A flat table for CSV output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

pub fn convergence_table(r: &ConvergenceReport) -> Table {
    Table {
        header: ["d", "exact", "asymptotic", "ratio"].map(String::from).to_vec(),
        rows: r
            .rows
            .iter()
            .map(|row| {
                vec![row.d.to_string(), rat_to_string(&row.exact), rat_to_string(&row.asymptotic), row.ratio.to_string()]
            })
            .collect(),
    }
}

/// Flattens any report into `key,value` rows with dotted paths.
pub fn key_value_table<T: Serialize>(v: &T) -> Result<Table> {
    let value = serde_json::to_value(v).map_err(|e| Error::domain(format!("serialization failed: {e}")))?;
    let mut rows = Vec::new();
    flatten("", &value, &mut rows);
    Ok(Table { header: vec!["key".into(), "value".into()], rows })
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<Vec<String>>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        Value::String(s) => out.push(vec![prefix.to_string(), s.clone()]),
        Value::Null => out.push(vec![prefix.to_string(), String::new()]),
        other => out.push(vec![prefix.to_string(), other.to_string()]),
    }
}
