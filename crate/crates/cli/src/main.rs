use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dpsec_core::arith::{parse_rational, Rational};
use dpsec_core::curves::{self, CurveClassKind};
use dpsec_core::fujita::{self, PolarizedSurface};
use dpsec_core::manin::{self, CountingModel};
use dpsec_core::profile::{self, FibrationProfile};
use dpsec_core::report::{self, Table};
use dpsec_core::ruled::{self, HirzebruchModel, NormalBundleType};
use dpsec_core::thresholds;
use dpsec_core::weyl;
use dpsec_core::{Error, LatticeVector, PicardLattice};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "dpsec", version, about = "Lattice, monodromy, threshold and counting computations for del Pezzo fibrations")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveKind {
    Lines,
    Conics,
    Cubics,
    Effective,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupKind {
    Weyl,
    DiagonalCubic,
}

#[derive(Subcommand)]
enum Command {
    /// Gram matrix and canonical class of the degree d del Pezzo lattice.
    Lattice {
        #[arg(long)]
        degree: i64,
    },
    /// Enumerate curve classes, or inspect a single class.
    Curves {
        #[arg(long)]
        degree: i64,
        #[arg(long, value_enum, default_value_t = CurveKind::Lines)]
        kind: CurveKind,
        /// Comma-separated coordinates in the basis H, E_1..E_n of a class to classify and decompose.
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        class: Option<LatticeVector>,
    },
    /// Generate the Weyl group, or run the signed-permutation extension analysis.
    Weyl {
        #[arg(long, required_unless_present = "extension")]
        degree: Option<i64>,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
        #[arg(long)]
        extension: bool,
    },
    /// Orbits of lines or conics under a monodromy group.
    Orbits {
        #[arg(long)]
        degree: i64,
        #[arg(long, value_enum, default_value_t = GroupKind::Weyl)]
        group: GroupKind,
        #[arg(long, value_enum, default_value_t = CurveKind::Lines)]
        classes: CurveKind,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
    /// Fujita invariant of a polarized surface, or the generic a-invariant class of a vertical family.
    Fujita {
        #[arg(long, conflicts_with = "hirzebruch")]
        degree: Option<i64>,
        #[arg(long)]
        hirzebruch: Option<i64>,
        /// Comma-separated polarization; defaults to the anticanonical class.
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        polarization: Option<LatticeVector>,
        /// Classify the vertical family of this fiber class instead.
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true, requires = "degree")]
        family: Option<LatticeVector>,
    },
    /// Height thresholds of a fibration profile.
    Thresholds {
        /// Shipped profile name or path to a profile JSON file.
        #[arg(long)]
        profile: String,
    },
    /// Ruled surface computations.
    Ruled {
        #[command(subcommand)]
        op: RuledOp,
    },
    /// Exact count against the predicted asymptotic.
    Count {
        #[arg(long, required_unless_present = "model")]
        profile: Option<String>,
        /// Counting model JSON file with explicit translates.
        #[arg(long, conflicts_with = "profile")]
        model: Option<String>,
        #[arg(long, default_value = "2", value_parser = parse_q)]
        q: Rational,
        #[arg(long, default_value_t = report::DEFAULT_DMAX)]
        dmax: i64,
    },
    /// Reproduce one of the shipped worked examples.
    Example {
        name: String,
        #[arg(long, default_value = "2", value_parser = parse_q)]
        q: Rational,
        #[arg(long, default_value_t = report::DEFAULT_DMAX)]
        dmax: i64,
    },
}

#[derive(Subcommand)]
enum RuledOp {
    /// Break a section of height q on F_e into a rigid and a movable part.
    Break {
        #[arg(long, allow_hyphen_values = true)]
        q: i64,
        #[arg(long)]
        e: i64,
    },
    /// Random blow-up sequences checked against the fiber lemmas.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Normal bundle types reachable by gluing vertical curves.
    Glue {
        /// Starting splitting type as `a,b`.
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        start: LatticeVector,
        #[arg(long, default_value_t = 20)]
        hmax: i64,
    },
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

enum Output {
    Value(Value),
    Table(Value, Table),
}

fn parse_vector(s: &str) -> Result<LatticeVector, String> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| format!("bad coordinate {t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(LatticeVector)
}

fn parse_q(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("{s:?} is not a rational number"))
}

fn load_profile(spec: &str) -> Result<FibrationProfile, Failure> {
    if let Some(s) = profile::shipped_json(spec) {
        return Ok(FibrationProfile::from_json(s)?);
    }
    let path = Path::new(spec);
    if !path.is_file() {
        return Err(Failure::Usage(format!(
            "{spec} is neither a shipped profile ({}) nor a file",
            profile::SHIPPED.join(", ")
        )));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {spec}: {e}")))?;
    Ok(FibrationProfile::from_json(&text)?)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn class_list(lat: &PicardLattice, kind: CurveKind) -> Vec<LatticeVector> {
    match kind {
        CurveKind::Lines => curves::enumerate_neg_one_curves(lat),
        CurveKind::Conics => curves::enumerate_conic_classes(lat),
        CurveKind::Cubics => curves::enumerate_cubic_classes(lat).into_iter().map(|(c, _)| c).collect(),
        CurveKind::Effective => curves::effective_cone_generators(lat),
    }
}

fn run(cmd: Command) -> Result<Output, Failure> {
    let out = match cmd {
        Command::Lattice { degree } => {
            let lat = PicardLattice::of_degree(degree)?;
            Output::Value(json!({
                "degree": lat.degree(),
                "rank": lat.rank(),
                "gram": lat.gram().matrix(),
                "canonical": lat.canonical(),
            }))
        }
        Command::Curves { degree, kind, class } => {
            let lat = PicardLattice::of_degree(degree)?;
            if let Some(c) = class {
                lat.check(&c)?;
                let nef = curves::is_nef(&lat, &c)?;
                let decomposition = if nef { Some(curves::decompose_nef_integral(&lat, &c)?) } else { None };
                Output::Value(json!({
                    "class": c,
                    "square": lat.square(&c)?,
                    "anticanonical_degree": lat.anticanonical_degree(&c)?,
                    "kind": curves::curve_kind(&lat, &c)?,
                    "nef": nef,
                    "decomposition": decomposition,
                }))
            } else if let CurveKind::Cubics = kind {
                let classes: Vec<(LatticeVector, CurveClassKind)> = curves::enumerate_cubic_classes(&lat);
                let rows: Vec<Value> = classes.iter().map(|(c, k)| json!({"class": c, "kind": k})).collect();
                Output::Value(json!({"degree": degree, "kind": "cubics", "count": rows.len(), "classes": rows}))
            } else {
                let classes = class_list(&lat, kind);
                let name = kind_name(kind);
                Output::Value(json!({"degree": degree, "kind": name, "count": classes.len(), "classes": classes}))
            }
        }
        Command::Weyl { degree, cap, extension } => {
            if extension {
                let r = weyl::conic_bundle_extension_analysis();
                let verified = weyl::verify_extension_claims(&r);
                let mut v = to_value(&r);
                v["claims_verified"] = json!(verified.is_ok());
                v["split"] = json!(r.subgroups.iter().filter(|s| s.split).count());
                v["non_split"] = json!(r.subgroups.iter().filter(|s| !s.split).count());
                verified?;
                Output::Value(v)
            } else {
                let degree = degree.expect("clap requires degree");
                let lat = PicardLattice::of_degree(degree)?;
                let gens = weyl::weyl_generators(&lat)?;
                let g = weyl::generate_group(&gens, cap)?;
                let lines = curves::enumerate_neg_one_curves(&lat);
                let line_orbits = weyl::orbits(&g, &lines)?.sizes();
                let preserves = g.elements().all(|x| x.preserves(lat.gram()));
                Output::Value(json!({
                    "degree": degree,
                    "order": g.order(),
                    "generators": gens.len(),
                    "line_orbits": line_orbits,
                    "preserves_pairing": preserves,
                }))
            }
        }
        Command::Orbits { degree, group, classes, cap } => {
            let lat = PicardLattice::of_degree(degree)?;
            let w = weyl::generate_group(&weyl::weyl_generators(&lat)?, cap)?;
            let g = match group {
                GroupKind::Weyl => w,
                GroupKind::DiagonalCubic => {
                    if degree != 3 {
                        return Err(Failure::Core(Error::domain("the diagonal cubic group lives on degree 3")));
                    }
                    weyl::find_diagonal_cubic_subgroup(&w, &lat)?
                }
            };
            let cls = class_list(&lat, classes);
            let part = weyl::orbits(&g, &cls)?;
            Output::Value(json!({
                "degree": degree,
                "group_order": g.order(),
                "classes": kind_name(classes),
                "sizes": part.sizes(),
                "orbits": part.orbits,
                "invariant_sublattice": weyl::invariant_sublattice(g.generators(), lat.rank()),
            }))
        }
        Command::Fujita { degree, hirzebruch, polarization, family } => {
            if let Some(c) = family {
                let d = degree.expect("clap requires degree");
                Output::Value(json!({
                    "class": c,
                    "fiber_degree": d,
                    "generic_a": fujita::classify_vertical_family(&c, d)?,
                }))
            } else {
                let base = match (degree, hirzebruch) {
                    (Some(d), None) => PolarizedSurface::del_pezzo(d, LatticeVector(Vec::new()))?,
                    (None, Some(e)) => PolarizedSurface::hirzebruch(e, LatticeVector(Vec::new()))?,
                    _ => return Err(Failure::Usage("give exactly one of --degree or --hirzebruch".into())),
                };
                let l = polarization.unwrap_or_else(|| base.anticanonical());
                let s = base.with_polarization(l.clone());
                Output::Value(json!({
                    "surface": match hirzebruch { Some(e) => format!("F_{e}"), None => format!("dP{}", degree.unwrap_or(0)) },
                    "polarization": l,
                    "a": fujita::a_invariant(&s)?,
                }))
            }
        }
        Command::Thresholds { profile } => {
            let p = load_profile(&profile)?;
            let mut v = to_value(&thresholds::threshold_report(&p));
            v["profile"] = json!(p.name);
            Output::Value(v)
        }
        Command::Ruled { op } => match op {
            RuledOp::Break { q, e } => {
                let m = HirzebruchModel::new(e)?;
                let b = ruled::break_section(q, e)?;
                let mut v = to_value(&b);
                v["minimal_moving_height"] = json!(m.minimal_moving_height());
                v["q"] = json!(q);
                v["e"] = json!(e);
                Output::Value(v)
            }
            RuledOp::Fuzz { seed, trials, depth } => {
                let r = ruled::fuzz_fibers(seed, trials, depth);
                let mut v = to_value(&r);
                v["clean"] = json!(r.clean());
                Output::Value(v)
            }
            RuledOp::Glue { start, hmax } => {
                let [a, b] = start.coords() else {
                    return Err(Failure::Usage("--start takes two integers a,b".into()));
                };
                let nb = NormalBundleType::new(*a, *b)?;
                let reach = ruled::reachable_balanced_heights(nb, hmax)?;
                let covered = ruled::check_balanced_coverage(nb, hmax).is_ok();
                let types: Vec<Value> = reach.iter().map(|(h, t)| json!({"height": h, "a": t.a, "b": t.b})).collect();
                Output::Value(json!({"start": [a, b], "hmax": hmax, "reachable": types, "balanced_from_start_plus_6": covered}))
            }
        },
        Command::Count { profile, model, q, dmax } => {
            let m = match (profile, model) {
                (Some(p), None) => CountingModel::from_rank_one_profile(load_profile(&p)?, q)?,
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))?;
                    CountingModel::from_json(&text)?
                }
                _ => return Err(Failure::Usage("give exactly one of --profile or --model".into())),
            };
            let r = manin::convergence_report(&m, dmax)?;
            let table = report::convergence_table(&r);
            Output::Table(to_value(&r), table)
        }
        Command::Example { name, q, dmax } => {
            if !profile::SHIPPED.contains(&name.as_str()) {
                return Err(Failure::Usage(format!(
                    "unknown example {name}; expected one of {}",
                    profile::SHIPPED.join(", ")
                )));
            }
            Output::Value(to_value(&report::run_example(&name, q, dmax)?))
        }
    };
    Ok(out)
}

fn kind_name(k: CurveKind) -> &'static str {
    match k {
        CurveKind::Lines => "lines",
        CurveKind::Conics => "conics",
        CurveKind::Cubics => "cubics",
        CurveKind::Effective => "effective",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            let text = match (out, cli.format) {
                (Output::Value(v) | Output::Table(v, _), Format::Json) => report::to_json(&v),
                (Output::Table(_, t), Format::Csv) => Ok(t.to_csv()),
                (Output::Value(v), Format::Csv) => report::key_value_table(&v).map(|t| t.to_csv()),
            };
            match text {
                Ok(s) => {
                    print!("{s}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
