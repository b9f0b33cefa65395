//! Fujita invariants of polarized surfaces with polyhedral effective cones,
//! and the generic a-invariant of vertical curve families on del Pezzo fibers.

use std::fmt;

use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::arith::{rat, rat_to_string, Rational};
use crate::curves::{self, CurveClassKind};
use crate::error::{Error, Result};
use crate::lattice::{Gram, LatticeVector, PicardLattice};
use crate::lp::{self, LpOutcome};

/// A surface given by its intersection form, canonical class, effective cone
/// generators and a polarization.
#[derive(Debug, Clone)]
pub struct PolarizedSurface {
    pub gram: Gram,
    pub canonical: LatticeVector,
    pub effective: Vec<LatticeVector>,
    pub polarization: LatticeVector,
}

impl PolarizedSurface {
    pub fn plane(l: LatticeVector) -> Self {
        let lat = PicardLattice::new(0).expect("plane");
        Self::del_pezzo_lattice(&lat, l)
    }

    pub fn del_pezzo(degree: i64, l: LatticeVector) -> Result<Self> {
        Ok(Self::del_pezzo_lattice(&PicardLattice::of_degree(degree)?, l))
    }

    pub fn del_pezzo_lattice(lat: &PicardLattice, l: LatticeVector) -> Self {
        PolarizedSurface {
            gram: lat.gram().clone(),
            canonical: lat.canonical().clone(),
            effective: curves::effective_cone_generators(lat),
            polarization: l,
        }
    }

    /// `F_e` in the basis `(C_0, F)` with `C_0^2 = -e`, `C_0.F = 1`, `F^2 = 0`.
    pub fn hirzebruch(e: i64, l: LatticeVector) -> Result<Self> {
        if e < 0 {
            return Err(Error::domain(format!("Hirzebruch index {e} is negative")));
        }
        Ok(PolarizedSurface {
            gram: Gram::new(vec![vec![-e, 1], vec![1, 0]])?,
            canonical: LatticeVector(vec![-2, -(e + 2)]),
            effective: vec![LatticeVector(vec![1, 0]), LatticeVector(vec![0, 1])],
            polarization: l,
        })
    }

    pub fn anticanonical(&self) -> LatticeVector {
        self.canonical.neg()
    }

    pub fn with_polarization(&self, l: LatticeVector) -> Self {
        PolarizedSurface { polarization: l, ..self.clone() }
    }
}

/// The value of an a-invariant: an exact rational or `+inf` for a
/// polarization that is not big.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FujitaValue {
    Finite(Rational),
    Infinite,
}

impl fmt::Display for FujitaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FujitaValue::Finite(r) => f.write_str(&rat_to_string(r)),
            FujitaValue::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for FujitaValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `min { t : K + tL is in the effective cone }`.
///
/// Solved as the linear program `min t` over `sum lambda_i e_i - t L = K`,
/// `lambda >= 0`, with `t` split into two non-negative parts.
pub fn a_invariant(s: &PolarizedSurface) -> Result<FujitaValue> {
    let l = &s.polarization;
    let dim = s.gram.dim();
    if l.len() != dim || s.canonical.len() != dim {
        return Err(Error::domain("polarization and canonical class must match the lattice rank"));
    }
    for g in &s.effective {
        if s.gram.pair(l, g)? < 0 {
            return Err(Error::domain(format!("polarization {l} is not nef: it meets {g} negatively")));
        }
    }
    let m = s.effective.len();
    let a: Vec<Vec<Rational>> = (0..dim)
        .map(|r| {
            let mut row: Vec<Rational> = s.effective.iter().map(|g| rat(g.coords()[r])).collect();
            row.push(rat(-l.coords()[r]));
            row.push(rat(l.coords()[r]));
            row
        })
        .collect();
    let b: Vec<Rational> = s.canonical.coords().iter().map(|&x| rat(x)).collect();
    let mut c = vec![Rational::zero(); m + 2];
    c[m] = rat(1);
    c[m + 1] = rat(-1);
    match lp::minimize(&a, &b, &c) {
        LpOutcome::Optimal { value, .. } => Ok(FujitaValue::Finite(value)),
        LpOutcome::Infeasible => Ok(FujitaValue::Infinite),
        LpOutcome::Unbounded => Err(Error::domain("effective cone is not pointed; a-invariant unbounded")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum AInvariantClass {
    GreaterThanOne,
    EqualOne,
    LessThanOne,
}

/// Generic a-invariant (against `-K`) of a family of vertical curves whose
/// class on the fiber lattice of the given degree is `c`.
///
/// Recognized classes are lines, conics, cubics, `-K`, `-2K`, and in degree 1
/// the pullbacks of `-K` from a degree 2 model, which are exactly the classes
/// with `C^2 = 2` and `-K.C = 2`.
pub fn classify_vertical_family(c: &LatticeVector, fiber_degree: i64) -> Result<AInvariantClass> {
    if !(1..=8).contains(&fiber_degree) {
        return Err(Error::domain(format!("fiber degree {fiber_degree} outside 1..=8")));
    }
    let lat = PicardLattice::of_degree(fiber_degree)?;
    let kk = lat.anticanonical();
    let s = lat.square(c)?;
    let k = lat.anticanonical_degree(c)?;
    use AInvariantClass::*;
    if *c == kk {
        return Ok(match fiber_degree {
            1 => GreaterThanOne,
            2 => EqualOne,
            _ => LessThanOne,
        });
    }
    if *c == kk.scale(2) {
        return Ok(if fiber_degree == 1 { EqualOne } else { LessThanOne });
    }
    if fiber_degree == 1 && (s, k) == (2, 2) {
        return Ok(EqualOne);
    }
    match curves::curve_kind(&lat, c)? {
        Some(CurveClassKind::NegOneCurve) => Ok(GreaterThanOne),
        Some(CurveClassKind::Conic) => Ok(EqualOne),
        Some(CurveClassKind::CubicLinePullback | CurveClassKind::CubicAnticanonical) => Ok(LessThanOne),
        None => Err(Error::domain(format!(
            "class {c} (square {s}, anticanonical degree {k}) is not a recognized curve kind"
        ))),
    }
}

/// Classes whose vertical families have generic a-invariant above 1.
pub fn larger_a_locus(lat: &PicardLattice) -> Vec<LatticeVector> {
    let mut out = curves::enumerate_neg_one_curves(lat);
    if lat.degree() == 1 {
        out.push(lat.anticanonical());
    }
    out.sort();
    out
}
