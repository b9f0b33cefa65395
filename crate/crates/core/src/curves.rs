//! Lines, conics and cubics on a del Pezzo lattice, the effective and nef
//! cones of curves, and decompositions of nef classes into free classes.
//!
//! Enumeration writes `C = (a, c_1, ..., c_n)` so that `C^2 = a^2 - sum c_i^2`
//! and `-K.C = 3a + sum c_i`. Cauchy-Schwarz on `(c_i)` gives
//! `(k - 3a)^2 <= n (a^2 - s)`, i.e. `(9-n) a^2 - 6 k a + k^2 + n s <= 0`,
//! which bounds `a` whenever `n <= 8`. The same inequality applied to the
//! remaining coordinates prunes the search over `c`.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::lattice::{LatticeVector, PicardLattice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CurveClassKind {
    NegOneCurve,
    Conic,
    CubicLinePullback,
    /// Pullback of an anticanonical cubic from a degree 3 model.
    CubicAnticanonical,
}

/// All classes with `C^2 = s` and `-K.C = k`, sorted lexicographically.
pub fn classes_with(lat: &PicardLattice, s: i64, k: i64) -> Vec<LatticeVector> {
    let n = lat.n() as i64;
    let lead = 9 - n;
    let f = |a: i64| lead * a * a - 6 * k * a + k * k + n * s;
    let disc = 36 * k * k - 4 * lead * (k * k + n * s);
    if disc < 0 {
        return Vec::new();
    }
    let root = (disc as f64).sqrt();
    let lo = ((6.0 * k as f64 - root) / (2 * lead) as f64).floor() as i64 - 1;
    let hi = ((6.0 * k as f64 + root) / (2 * lead) as f64).ceil() as i64 + 1;
    let mut out = Vec::new();
    let mut buf = vec![0i64; lat.n()];
    for a in lo..=hi {
        if f(a) > 0 {
            continue;
        }
        let q = a * a - s;
        if q < 0 {
            continue;
        }
        fill(&mut buf, 0, k - 3 * a, q, &mut |c| {
            let mut v = Vec::with_capacity(c.len() + 1);
            v.push(a);
            v.extend_from_slice(c);
            out.push(LatticeVector(v));
        });
    }
    out.sort();
    out
}

fn fill(buf: &mut [i64], i: usize, sum: i64, sq: i64, emit: &mut impl FnMut(&[i64])) {
    let r = (buf.len() - i) as i64;
    if r == 0 {
        if sum == 0 && sq == 0 {
            emit(buf);
        }
        return;
    }
    if sq < 0 || sum * sum > r * sq {
        return;
    }
    let m = isqrt(sq);
    for x in -m..=m {
        buf[i] = x;
        fill(buf, i + 1, sum - x, sq - x * x, emit);
    }
}

fn isqrt(x: i64) -> i64 {
    let mut r = (x as f64).sqrt() as i64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

pub fn enumerate_neg_one_curves(lat: &PicardLattice) -> Vec<LatticeVector> {
    classes_with(lat, -1, 1)
}

pub fn enumerate_conic_classes(lat: &PicardLattice) -> Vec<LatticeVector> {
    classes_with(lat, 0, 2)
}

/// Cubic classes: `C^2 = 1, -K.C = 3`, plus on degrees 2 and 3 the
/// anticanonical-type classes `C^2 = 3, -K.C = 3` (`-K` itself on a cubic
/// surface, `-K + E` for a line `E` in degree 2).
pub fn enumerate_cubic_classes(lat: &PicardLattice) -> Vec<(LatticeVector, CurveClassKind)> {
    let mut out: Vec<_> = classes_with(lat, 1, 3)
        .into_iter()
        .map(|c| (c, CurveClassKind::CubicLinePullback))
        .collect();
    if matches!(lat.degree(), 2 | 3) {
        out.extend(classes_with(lat, 3, 3).into_iter().map(|c| (c, CurveClassKind::CubicAnticanonical)));
    }
    out.sort();
    out
}

/// Recognizes the class kinds above, `None` for anything else.
pub fn curve_kind(lat: &PicardLattice, c: &LatticeVector) -> Result<Option<CurveClassKind>> {
    let s = lat.square(c)?;
    let k = lat.anticanonical_degree(c)?;
    Ok(match (s, k) {
        (-1, 1) => Some(CurveClassKind::NegOneCurve),
        (0, 2) => Some(CurveClassKind::Conic),
        (1, 3) => Some(CurveClassKind::CubicLinePullback),
        (3, 3) if matches!(lat.degree(), 2 | 3) => Some(CurveClassKind::CubicAnticanonical),
        _ => None,
    })
}

/// Extreme rays of the effective cone: the lines when `n >= 2`,
/// `{E_1, H - E_1}` when `n = 1`, `{H}` on the plane.
pub fn effective_cone_generators(lat: &PicardLattice) -> Vec<LatticeVector> {
    match lat.n() {
        0 => vec![lat.h()],
        1 => vec![lat.e(1), lat.class(1, &[1])],
        _ => enumerate_neg_one_curves(lat),
    }
}

pub fn effective_cone(lat: &PicardLattice) -> Result<Cone> {
    Cone::from_generators(effective_cone_generators(lat), lat.gram())
}

/// The nef cone of curves, dual to the effective cone. Its facets are the
/// effective generators and its generators are computed extreme rays.
pub fn nef_curve_cone(lat: &PicardLattice) -> Result<Cone> {
    let eff = effective_cone_generators(lat);
    Cone { generators: eff, facets: Vec::new() }.dual(lat.gram())
}

pub fn is_nef(lat: &PicardLattice, c: &LatticeVector) -> Result<bool> {
    lat.check(c)?;
    Ok(effective_cone_generators(lat).iter().all(|g| lat.pair_raw(g.coords(), c.coords()) >= 0))
}

/// Integral nef classes of anticanonical degree `k` (`C^2` lies in `0..=k^2/deg`
/// by Hodge index).
pub fn nef_classes_of_degree(lat: &PicardLattice, k: i64) -> Vec<LatticeVector> {
    let eff = effective_cone_generators(lat);
    let mut out = Vec::new();
    for s in 0..=(k * k) / lat.degree() {
        for c in classes_with(lat, s, k) {
            if eff.iter().all(|g| lat.pair_raw(g.coords(), c.coords()) >= 0) {
                out.push(c);
            }
        }
    }
    out.sort();
    out
}

/// The generating set used by [`decompose_nef_integral`]: `-K`, then the nef
/// classes of degree 3, then of degree 2, each block in lexicographic order.
pub fn free_generators(lat: &PicardLattice) -> Vec<LatticeVector> {
    let kk = lat.anticanonical();
    let mut out = vec![kk.clone()];
    for k in [3, 2] {
        out.extend(nef_classes_of_degree(lat, k).into_iter().filter(|c| *c != kk));
    }
    out
}

fn require_degree_two(lat: &PicardLattice) -> Result<()> {
    if lat.degree() < 2 {
        return Err(Error::domain("decomposition needs a del Pezzo surface of degree at least 2"));
    }
    Ok(())
}

/// Writes a nef integral class as a sum of classes from [`free_generators`].
pub fn decompose_nef_integral(lat: &PicardLattice, c: &LatticeVector) -> Result<Vec<LatticeVector>> {
    require_degree_two(lat)?;
    if !is_nef(lat, c)? {
        return Err(Error::domain(format!("class {c} is not nef")));
    }
    let gens = free_generators(lat);
    let eff = effective_cone_generators(lat);
    let mut failed: HashSet<(LatticeVector, usize)> = HashSet::new();
    let mut parts = Vec::new();
    if search(lat, &gens, &eff, c.clone(), 0, &mut failed, &mut parts) {
        Ok(parts)
    } else {
        Err(Error::DecompositionNotFound(c.0.clone()))
    }
}

fn search(
    lat: &PicardLattice,
    gens: &[LatticeVector],
    eff: &[LatticeVector],
    rest: LatticeVector,
    start: usize,
    failed: &mut HashSet<(LatticeVector, usize)>,
    parts: &mut Vec<LatticeVector>,
) -> bool {
    if rest.is_zero() {
        return true;
    }
    if failed.contains(&(rest.clone(), start)) {
        return false;
    }
    for (i, g) in gens.iter().enumerate().skip(start) {
        let r = rest.sub(g);
        let deg = lat.degree_raw(r.coords());
        if deg < 0 || deg == 1 {
            continue;
        }
        if !eff.iter().all(|e| lat.pair_raw(e.coords(), r.coords()) >= 0) {
            continue;
        }
        parts.push(g.clone());
        if search(lat, gens, eff, r, i, failed, parts) {
            return true;
        }
        parts.pop();
    }
    failed.insert((rest, start));
    false
}

/// Splits a nef class of anticanonical degree at least 4 into two nef classes
/// of degree at least 2.
///
/// Among all splits the most balanced one (least `|c0 - c1|^2` in
/// coordinates) is returned, ties broken by the lexicographically smallest `c0`.
pub fn break_fiber_class(lat: &PicardLattice, c: &LatticeVector) -> Result<(LatticeVector, LatticeVector)> {
    require_degree_two(lat)?;
    let k = lat.anticanonical_degree(c)?;
    if k <= 3 {
        return Err(Error::domain(format!("class {c} has anticanonical degree {k} <= 3")));
    }
    if !is_nef(lat, c)? {
        return Err(Error::domain(format!("class {c} is not nef")));
    }
    let eff = effective_cone_generators(lat);
    let mut best: Option<(i64, LatticeVector, LatticeVector)> = None;
    for k0 in 2..=k - 2 {
        for c0 in nef_classes_of_degree(lat, k0) {
            let c1 = c.sub(&c0);
            if !eff.iter().all(|e| lat.pair_raw(e.coords(), c1.coords()) >= 0) {
                continue;
            }
            let d = c0.sub(&c1);
            let spread: i64 = d.coords().iter().map(|x| x * x).sum();
            let better = match &best {
                None => true,
                Some((s, b0, _)) => spread < *s || (spread == *s && c0 < *b0),
            };
            if better {
                best = Some((spread, c0, c1));
            }
        }
    }
    best.map(|(_, a, b)| (a, b))
        .ok_or_else(|| Error::NotFound(format!("no nef split of {c}")))
}

/// Tally of a multiset of classes, for display.
pub fn tally(parts: &[LatticeVector]) -> BTreeMap<LatticeVector, usize> {
    let mut m = BTreeMap::new();
    for p in parts {
        *m.entry(p.clone()).or_insert(0) += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(lat: &PicardLattice, s: i64, k: i64, bound: i64) -> Vec<LatticeVector> {
        // Independent oracle: scan a box directly.
        let n = lat.n();
        let mut out = Vec::new();
        let width = (2 * bound + 1) as usize;
        let total = width.pow(n as u32 + 1);
        for mut idx in 0..total {
            let mut v = Vec::with_capacity(n + 1);
            for _ in 0..=n {
                v.push((idx % width) as i64 - bound);
                idx /= width;
            }
            let v = LatticeVector(v);
            if lat.square(&v).unwrap() == s && lat.anticanonical_degree(&v).unwrap() == k {
                out.push(v);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn line_counts() {
        let want = [0, 1, 3, 6, 10, 16, 27, 56, 240];
        for (n, &w) in want.iter().enumerate() {
            let lat = PicardLattice::new(n).unwrap();
            assert_eq!(enumerate_neg_one_curves(&lat).len(), w, "n={n}");
        }
    }

    #[test]
    fn matches_box_scan_small_n() {
        for n in 0..=4 {
            let lat = PicardLattice::new(n).unwrap();
            for (s, k) in [(-1, 1), (0, 2), (1, 3)] {
                assert_eq!(classes_with(&lat, s, k), brute(&lat, s, k, 4), "n={n} s={s} k={k}");
            }
        }
    }

    #[test]
    fn small_cases() {
        let l1 = PicardLattice::new(1).unwrap();
        assert_eq!(enumerate_neg_one_curves(&l1), vec![l1.e(1)]);
        assert_eq!(enumerate_conic_classes(&l1), vec![l1.class(1, &[1])]);
        let l0 = PicardLattice::new(0).unwrap();
        assert!(enumerate_conic_classes(&l0).is_empty());
        assert_eq!(enumerate_cubic_classes(&l0), vec![(l0.h(), CurveClassKind::CubicLinePullback)]);
    }

    #[test]
    fn cubic_surface_counts() {
        let lat = PicardLattice::new(6).unwrap();
        let conics = enumerate_conic_classes(&lat);
        assert_eq!(conics.len(), 27);
        let kk = lat.anticanonical();
        for l in enumerate_neg_one_curves(&lat) {
            assert!(conics.contains(&kk.sub(&l)));
        }
        let cubics = enumerate_cubic_classes(&lat);
        let pull = cubics.iter().filter(|c| c.1 == CurveClassKind::CubicLinePullback).count();
        assert_eq!(pull, 72);
        let anti: Vec<_> = cubics.iter().filter(|c| c.1 == CurveClassKind::CubicAnticanonical).collect();
        assert_eq!(anti.len(), 1);
        assert_eq!(anti[0].0, kk);
    }

    #[test]
    fn degree_two_anticanonical_cubics() {
        let lat = PicardLattice::new(7).unwrap();
        let kk = lat.anticanonical();
        let anti: Vec<_> = enumerate_cubic_classes(&lat)
            .into_iter()
            .filter(|c| c.1 == CurveClassKind::CubicAnticanonical)
            .map(|c| c.0)
            .collect();
        assert!(!anti.contains(&kk));
        let mut expect: Vec<_> = enumerate_neg_one_curves(&lat).iter().map(|e| kk.add(e)).collect();
        expect.sort();
        assert_eq!(anti, expect);
    }

    #[test]
    fn cones_small() {
        let l1 = PicardLattice::new(1).unwrap();
        let nef = nef_curve_cone(&l1).unwrap();
        let mut g = nef.generators.clone();
        g.sort();
        assert_eq!(g, vec![l1.class(1, &[1]), l1.h()]);
        let l0 = PicardLattice::new(0).unwrap();
        assert_eq!(nef_curve_cone(&l0).unwrap().generators, vec![l0.h()]);
        assert_eq!(effective_cone_generators(&l0), vec![l0.h()]);
    }

    #[test]
    fn cubic_surface_nef_cone() {
        let lat = PicardLattice::new(6).unwrap();
        let nef = nef_curve_cone(&lat).unwrap();
        assert_eq!(nef.facets.len(), 27);
        for c in enumerate_conic_classes(&lat) {
            assert!(nef.contains(&c, lat.gram()).unwrap());
        }
        for g in &nef.generators {
            for f in &nef.facets {
                assert!(lat.pair(g, f).unwrap() >= 0);
            }
        }
        // each facet is tight on rank-1 independent rays
        for f in &nef.facets {
            let tight: Vec<Vec<i64>> =
                nef.generators.iter().filter(|g| lat.pair(g, f).unwrap() == 0).map(|g| g.0.clone()).collect();
            assert_eq!(crate::arith::rank(&tight), 6);
        }
    }

    #[test]
    fn decompositions() {
        let lat = PicardLattice::new(6).unwrap();
        let kk = lat.anticanonical();
        assert_eq!(decompose_nef_integral(&lat, &kk).unwrap(), vec![kk.clone()]);
        let conic = lat.class(1, &[1, 0, 0, 0, 0, 0]);
        assert_eq!(decompose_nef_integral(&lat, &conic).unwrap(), vec![conic.clone()]);
        let two = kk.scale(2);
        let parts = decompose_nef_integral(&lat, &two).unwrap();
        let sum = parts.iter().fold(LatticeVector::zero(7), |a, p| a.add(p));
        assert_eq!(sum, two);
        let e = lat.e(1);
        assert!(matches!(decompose_nef_integral(&lat, &e), Err(Error::Domain(_))));
        let l8 = PicardLattice::new(8).unwrap();
        assert!(decompose_nef_integral(&l8, &l8.anticanonical()).is_err());
    }

    #[test]
    fn breaking() {
        let lat = PicardLattice::new(6).unwrap();
        let kk = lat.anticanonical();
        let (a, b) = break_fiber_class(&lat, &kk.scale(2)).unwrap();
        assert_eq!((a, b), (kk.clone(), kk.clone()));
        let conic = lat.class(1, &[1, 0, 0, 0, 0, 0]);
        assert!(matches!(break_fiber_class(&lat, &conic), Err(Error::Domain(_))));

        let l1 = PicardLattice::new(1).unwrap();
        let c = l1.h().scale(2);
        let (a, b) = break_fiber_class(&l1, &c).unwrap();
        assert_eq!(a.add(&b), c);
        assert!(is_nef(&l1, &a).unwrap() && is_nef(&l1, &b).unwrap());
        assert!(l1.anticanonical_degree(&a).unwrap() >= 2);
        assert!(l1.anticanonical_degree(&b).unwrap() >= 2);
    }
}
