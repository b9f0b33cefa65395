//! Counting sections by height: alpha constants as exact cone volumes, the
//! exact counting function under a translate model, and its predicted
//! asymptotic.

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{self, parse_rational, rat, rat_to_f64, rat_to_string, Rational};
use crate::cone::{dual_rays, pulling_triangulation};
use crate::error::{Error, Result};
use crate::profile::{FibrationProfile, NefConeEta};

/// Largest rank for which slices are enumerated point by point.
pub const MAX_ENUMERATION_RANK: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Simplex {
    pub generators: Vec<usize>,
    pub det: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphaResult {
    #[serde(serialize_with = "ser_rat")]
    pub value: Rational,
    pub triangulation: Vec<Simplex>,
}

/// `rho * vol(cone ∩ {height <= 1})` in the normalization where `Z^rho` has
/// covolume 1.
///
/// Each simplicial cone `<g_1..g_rho>` of a pulling triangulation contributes
/// `|det g| / (prod height(g_i) * (rho - 1)!)`.
pub fn alpha(cone: &NefConeEta) -> Result<AlphaResult> {
    let rho = cone.rank();
    let gens = primitive_generators(cone)?;
    for g in &gens {
        if cone.height_of(g) <= 0 {
            return Err(Error::domain(format!("generator {g:?} has non-positive height")));
        }
    }
    let facets = if rho == 1 { vec![vec![1]] } else { dual_rays(&gens, rho)? };
    let simplices = pulling_triangulation(&gens, &facets);
    let denom_fact = Rational::from_integer(arith::factorial(rho - 1));
    let mut value = Rational::zero();
    let mut triangulation = Vec::new();
    for s in simplices {
        let m: Vec<Vec<i64>> = s.iter().map(|&i| gens[i].clone()).collect();
        let det = arith::det(&m);
        let hprod: i128 = s.iter().map(|&i| cone.height_of(&gens[i]) as i128).product();
        value += Rational::new(BigInt::from(det.abs()), BigInt::from(hprod)) / &denom_fact;
        triangulation.push(Simplex { generators: s, det: det as i64 });
    }
    Ok(AlphaResult { value, triangulation })
}

fn primitive_generators(cone: &NefConeEta) -> Result<Vec<Vec<i64>>> {
    let rho = cone.rank();
    let mut out: Vec<Vec<i64>> = Vec::new();
    for g in &cone.generators {
        if g.len() != rho {
            return Err(Error::domain("generator length does not match the height functional"));
        }
        if g.is_zero() {
            return Err(Error::domain("zero generator"));
        }
        let p = arith::primitive(&g.coords().iter().map(|&x| x as i128).collect::<Vec<_>>());
        if !out.contains(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

pub fn tau(p: &FibrationProfile) -> u64 {
    p.num_profiles * p.lattice_index
}

/// Number of `gamma` in `translate + Z^rho` with `gamma - translate` in the
/// cone and `height(gamma) = i`.
pub fn lattice_points_at_height(cone: &NefConeEta, translate: &[Rational], i: i64) -> Result<u64> {
    let rho = cone.rank();
    if rho > MAX_ENUMERATION_RANK {
        return Err(Error::CapExceeded { cap: MAX_ENUMERATION_RANK });
    }
    if translate.len() != rho {
        return Err(Error::domain("translate length does not match the cone rank"));
    }
    let th: Rational = translate.iter().zip(cone.height.coords()).map(|(t, &h)| t * rat(h)).sum();
    let j = rat(i) - th;
    if !j.is_integer() || j.is_negative() {
        return Ok(0);
    }
    let j = j.to_integer().to_i64().expect("height fits in i64");
    Ok(points_in_slice(cone, j)?.len() as u64)
}

/// Integral points `x` of the cone with `height(x) = j`.
pub fn points_in_slice(cone: &NefConeEta, j: i64) -> Result<Vec<Vec<i64>>> {
    let rho = cone.rank();
    let gens = primitive_generators(cone)?;
    let facets = if rho == 1 { vec![vec![1]] } else { dual_rays(&gens, rho)? };
    // The slice is the convex hull of the scaled generators j g / height(g).
    let mut lo = vec![i64::MAX; rho];
    let mut hi = vec![i64::MIN; rho];
    for g in &gens {
        let h = cone.height_of(g);
        if h <= 0 {
            return Err(Error::domain(format!("generator {g:?} has non-positive height")));
        }
        for k in 0..rho {
            let v = Rational::new(BigInt::from(j * g[k]), BigInt::from(h));
            lo[k] = lo[k].min(v.floor().to_integer().to_i64().expect("fits"));
            hi[k] = hi[k].max(v.ceil().to_integer().to_i64().expect("fits"));
        }
    }
    let mut out = Vec::new();
    let mut x = lo.clone();
    loop {
        if cone.height_of(&x) == j && facets.iter().all(|f| arith::dot(f, &x) >= 0) {
            out.push(x.clone());
        }
        let mut k = rho;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if x[k] < hi[k] {
                x[k] += 1;
                break;
            }
            x[k] = lo[k];
        }
    }
}

fn ser_rat<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rat_to_string(r))
}

fn de_rat<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
    let s = String::deserialize(d)?;
    parse_rational(&s).ok_or_else(|| serde::de::Error::custom(format!("not a rational: {s}")))
}

fn ser_rat_vecs<S: Serializer>(v: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let strs: Vec<Vec<String>> = v.iter().map(|t| t.iter().map(rat_to_string).collect()).collect();
    strs.serialize(s)
}

fn de_rat_vecs<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
    let strs: Vec<Vec<String>> = Vec::deserialize(d)?;
    strs.into_iter()
        .map(|t| {
            t.into_iter()
                .map(|s| parse_rational(&s).ok_or_else(|| serde::de::Error::custom(format!("not a rational: {s}"))))
                .collect()
        })
        .collect()
}

fn default_offset() -> i64 {
    2
}

/// A profile with one translate per intersection profile and coset, a value
/// of `q`, and the dimension rule `dim = height + dim_offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingModel {
    pub profile: FibrationProfile,
    #[serde(serialize_with = "ser_rat_vecs", deserialize_with = "de_rat_vecs")]
    pub translates: Vec<Vec<Rational>>,
    #[serde(serialize_with = "ser_rat", deserialize_with = "de_rat")]
    pub q: Rational,
    #[serde(default = "default_offset")]
    pub dim_offset: i64,
}

impl CountingModel {
    pub fn new(profile: FibrationProfile, translates: Vec<Vec<Rational>>, q: Rational) -> Result<Self> {
        let m = CountingModel { profile, translates, q, dim_offset: 2 };
        m.validate()?;
        Ok(m)
    }

    /// Rank one profiles whose cone generator has height `lattice_index`:
    /// translates `j/D` times the generator for `j < D`, once per profile.
    pub fn from_rank_one_profile(profile: FibrationProfile, q: Rational) -> Result<Self> {
        let cone = &profile.nef_cone_eta;
        if profile.rho_eta != 1 || cone.generators.len() != 1 {
            return Err(Error::domain("default translates need a rank one profile"));
        }
        let g = cone.generators[0].coords()[0];
        let d = profile.lattice_index as i64;
        let mut translates = Vec::new();
        for _ in 0..profile.num_profiles {
            for j in 0..d {
                translates.push(vec![Rational::new(BigInt::from(j * g), BigInt::from(d))]);
            }
        }
        Self::new(profile, translates, q)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: CountingModel =
            serde_json::from_str(s).map_err(|e| Error::domain(format!("invalid counting model JSON: {e}")))?;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        if self.q <= Rational::one() {
            return Err(Error::domain(format!("q = {} must exceed 1", rat_to_string(&self.q))));
        }
        let rho = self.profile.rho_eta;
        if self.translates.iter().any(|t| t.len() != rho) {
            return Err(Error::domain("every translate must have length rho_eta"));
        }
        if self.translates.len() as u64 != tau(&self.profile) {
            return Err(Error::domain(format!(
                "{} translates given but tau = {}",
                self.translates.len(),
                tau(&self.profile)
            )));
        }
        let h = self.profile.nef_cone_eta.height.coords();
        for t in &self.translates {
            let th: Rational = t.iter().zip(h).map(|(x, &y)| x * rat(y)).sum();
            if th < rat(self.profile.neg) {
                return Err(Error::domain("translate height is below neg"));
            }
        }
        Ok(())
    }

    fn q_pow(&self, e: i64) -> Rational {
        if e >= 0 {
            Pow::pow(&self.q, e as u64)
        } else {
            Pow::pow(&self.q.recip(), (-e) as u64)
        }
    }
}

/// `sum_{i=1}^{d} sum_t |Br| * points(t, i) * q^(i + dim_offset)`.
pub fn count_exact(m: &CountingModel, d: i64) -> Result<Rational> {
    let mut total = Rational::zero();
    let br = rat(m.profile.brauer_order as i64);
    for i in 1..=d {
        let mut pts = 0u64;
        for t in &m.translates {
            pts += lattice_points_at_height(&m.profile.nef_cone_eta, t, i)?;
        }
        if pts > 0 {
            total += &br * rat(pts as i64) * m.q_pow(i + m.dim_offset);
        }
    }
    Ok(total)
}

/// `tau * alpha * |Br| * q / (q - 1)`.
pub fn theorem_constant(m: &CountingModel) -> Result<Rational> {
    let a = alpha(&m.profile.nef_cone_eta)?.value;
    let one = Rational::one();
    Ok(rat(tau(&m.profile) as i64) * a * rat(m.profile.brauer_order as i64) * &m.q / (&m.q - one))
}

/// `theorem_constant * q^d * d^(rho - 1)`.
pub fn asymptotic(m: &CountingModel, d: i64) -> Result<Rational> {
    if d < 1 {
        return Err(Error::domain("the asymptotic needs d >= 1"));
    }
    let rho = m.profile.rho_eta as u64;
    Ok(theorem_constant(m)? * m.q_pow(d) * Pow::pow(&rat(d), rho - 1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub d: i64,
    #[serde(serialize_with = "ser_rat")]
    pub exact: Rational,
    #[serde(serialize_with = "ser_rat")]
    pub asymptotic: Rational,
    pub ratio: f64,
    /// `exact / (q^d d^(rho-1))`.
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Aitken extrapolation of the last three normalized values.
    pub extrapolated_constant: f64,
    pub stabilized: bool,
    pub tolerance: f64,
    #[serde(serialize_with = "ser_rat")]
    pub theorem_constant: Rational,
    /// `extrapolated_constant / theorem_constant`, compared with `q^dim_offset`.
    pub offset: f64,
    pub expected_offset: f64,
}

pub const STABILITY_TOLERANCE: f64 = 0.05;

pub fn convergence_report(m: &CountingModel, d_max: i64) -> Result<ConvergenceReport> {
    if d_max < 3 {
        return Err(Error::domain(format!("d_max = {d_max} must be at least 3")));
    }
    let rho = m.profile.rho_eta as u64;
    let mut rows = Vec::new();
    let mut norms: Vec<Rational> = Vec::new();
    let mut exact = Rational::zero();
    let br = rat(m.profile.brauer_order as i64);
    let cst = theorem_constant(m)?;
    for d in 1..=d_max {
        let mut pts = 0u64;
        for t in &m.translates {
            pts += lattice_points_at_height(&m.profile.nef_cone_eta, t, d)?;
        }
        exact += &br * rat(pts as i64) * m.q_pow(d + m.dim_offset);
        let scale = m.q_pow(d) * Pow::pow(&rat(d), rho - 1);
        let asym = &cst * &scale;
        let norm = &exact / &scale;
        rows.push(ConvergenceRow {
            d,
            exact: exact.clone(),
            asymptotic: asym.clone(),
            ratio: rat_to_f64(&(&exact / &asym)),
            normalized: rat_to_f64(&norm),
        });
        norms.push(norm);
    }
    let n = norms.len();
    let (r0, r1, r2) = (&norms[n - 3], &norms[n - 2], &norms[n - 1]);
    let d1 = r2 - r1;
    let d0 = r1 - r0;
    let den = &d1 - &d0;
    let extrap = if den.is_zero() { r2.clone() } else { r2 - &d1 * &d1 / den };
    let rel = |a: &Rational, b: &Rational| -> f64 {
        if b.is_zero() {
            return if a.is_zero() { 0.0 } else { f64::INFINITY };
        }
        rat_to_f64(&((a - b) / b).abs())
    };
    let stabilized = rel(r2, r1) <= STABILITY_TOLERANCE && rel(r2, &extrap) <= STABILITY_TOLERANCE;
    let offset = if cst.is_zero() { f64::NAN } else { rat_to_f64(&(&extrap / &cst)) };
    Ok(ConvergenceReport {
        rows,
        extrapolated_constant: rat_to_f64(&extrap),
        stabilized,
        tolerance: STABILITY_TOLERANCE,
        theorem_constant: cst,
        offset,
        expected_offset: rat_to_f64(&m.q_pow(m.dim_offset)),
    })
}

/// Leading coefficient of the slice-count polynomial of a cone whose slice
/// counts are polynomial in the height from `i0` on, via the
/// `(rho - 1)`-th forward difference.
pub fn slice_leading_coefficient(cone: &NefConeEta, i0: i64) -> Result<Rational> {
    let rho = cone.rank();
    let zero = vec![Rational::zero(); rho];
    let vals: Vec<i64> = (0..rho as i64)
        .map(|k| lattice_points_at_height(cone, &zero, i0 + k).map(|v| v as i64))
        .collect::<Result<_>>()?;
    let mut diff = vals;
    for _ in 1..rho {
        diff = diff.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(Rational::new(BigInt::from(diff[0]), arith::factorial(rho - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_frac;
    use crate::lattice::LatticeVector;
    use crate::profile::shipped;

    fn cone(gens: &[&[i64]], height: &[i64]) -> NefConeEta {
        NefConeEta {
            generators: gens.iter().map(|g| LatticeVector(g.to_vec())).collect(),
            facets: Vec::new(),
            height: LatticeVector(height.to_vec()),
        }
    }

    fn rank_one_model(gen_height: i64, translate: Rational, br: u64, q: Rational) -> CountingModel {
        let mut p = shipped("cubic-pencil").unwrap();
        p.nef_cone_eta = cone(&[&[1]], &[gen_height]);
        p.lattice_index = 1;
        p.brauer_order = br;
        CountingModel::new(p, vec![vec![translate]], q).unwrap()
    }

    #[test]
    fn alpha_fixtures() {
        assert_eq!(alpha(&cone(&[&[1]], &[1])).unwrap().value, rat(1));
        assert_eq!(alpha(&cone(&[&[1]], &[3])).unwrap().value, rat_frac(1, 3));
        assert_eq!(alpha(&cone(&[&[1, 0], &[0, 1]], &[2, 2])).unwrap().value, rat_frac(1, 4));
        assert!(alpha(&cone(&[&[1, 0], &[0, 1]], &[1, -1])).is_err());
    }

    #[test]
    fn alpha_scaling() {
        let c = cone(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, -1]], &[2, 2, 1]);
        let a = alpha(&c).unwrap().value;
        let c2 = cone(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, -1]], &[4, 4, 2]);
        assert_eq!(alpha(&c2).unwrap().value, a / rat(8));
    }

    #[test]
    fn slice_counts() {
        let c1 = cone(&[&[1]], &[1]);
        assert_eq!(lattice_points_at_height(&c1, &[rat(-1)], 5).unwrap(), 1);
        let c2 = cone(&[&[1, 0], &[0, 1]], &[1, 1]);
        assert_eq!(lattice_points_at_height(&c2, &[rat(0), rat(0)], 4).unwrap(), 5);
        assert_eq!(lattice_points_at_height(&c2, &[rat(1), rat(1)], 1).unwrap(), 0);
        let c4 = cone(&[&[1, 0, 0, 0]], &[1, 1, 1, 1]);
        assert_eq!(lattice_points_at_height(&c4, &vec![rat(0); 4], 1), Err(Error::CapExceeded { cap: 3 }));
    }

    #[test]
    fn counting_fixtures() {
        let m = rank_one_model(1, rat(1), 1, rat(2));
        assert_eq!(count_exact(&m, 3).unwrap(), rat(56));
        assert_eq!(count_exact(&m, 0).unwrap(), rat(0));
        let m3 = rank_one_model(1, rat(1), 3, rat(2));
        assert_eq!(count_exact(&m3, 3).unwrap(), rat(168));
    }

    #[test]
    fn asymptotic_fixtures() {
        let m = rank_one_model(1, rat(0), 1, rat(2));
        assert_eq!(asymptotic(&m, 10).unwrap(), rat(2048));
        assert_eq!(asymptotic(&m, 11).unwrap() / asymptotic(&m, 10).unwrap(), rat(2));
        let mut p = shipped("cubic-pencil").unwrap();
        p.rho_eta = 2;
        p.lattice_index = 1;
        p.nef_cone_eta = cone(&[&[1, 0], &[0, 1]], &[1, 1]);
        let m2 = CountingModel::new(p, vec![vec![rat(0), rat(0)]], rat(2)).unwrap();
        assert_eq!(asymptotic(&m2, 10).unwrap(), rat(20480));
    }

    #[test]
    fn model_validation() {
        let p = shipped("cubic-pencil").unwrap();
        assert!(CountingModel::new(p.clone(), vec![vec![rat(0)]], rat(2)).is_err());
        assert!(CountingModel::from_rank_one_profile(p.clone(), rat(1)).is_err());
        let m = CountingModel::from_rank_one_profile(p, rat(2)).unwrap();
        assert_eq!(m.translates.len(), 3);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(CountingModel::from_json(&s).unwrap(), m);
    }

    #[test]
    fn report_shape() {
        let m = rank_one_model(1, rat(0), 1, rat(2));
        assert!(convergence_report(&m, 2).is_err());
        let r = convergence_report(&m, 10).unwrap();
        assert_eq!(r.rows.len(), 10);
        assert!(r.stabilized);
        assert!((r.offset - 4.0).abs() < 0.01);
    }

    #[test]
    fn ehrhart_leading_coefficient_is_alpha() {
        for gens in [&[&[1i64, 0][..], &[0, 1][..]][..], &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]] {
            let rho = gens.len();
            let c = cone(gens, &vec![1; rho]);
            assert_eq!(slice_leading_coefficient(&c, 20).unwrap(), alpha(&c).unwrap().value);
        }
    }
}
