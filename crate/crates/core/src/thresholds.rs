//! Explicit height thresholds computed from a fibration profile, and the
//! corner decomposition of up-sets of monotone functions on `Z^m_{>=0}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::FibrationProfile;

/// `sup_d maxdef(d)`, taken to be 0 when no negative height carries sections.
pub fn maxdef_of_x(p: &FibrationProfile) -> i64 {
    p.maxdef_table.values().copied().max().unwrap_or(0)
}

/// `max(-2 neg - 1, 1)`.
pub fn non_dominant_threshold(p: &FibrationProfile) -> i64 {
    (-2 * p.neg - 1).max(1)
}

/// `d + 3n - maxdef(d)`: minimal height of a broken curve with a section of
/// height `d` through `n` general points.
pub fn maxdef_height_bound(p: &FibrationProfile, d: i64, n: i64) -> Result<i64> {
    let m = *p
        .maxdef_table
        .get(&d)
        .ok_or_else(|| Error::domain(format!("no sections of height {d} in profile {}", p.name)))?;
    if n < m {
        return Err(Error::domain(format!("point count {n} is below maxdef({d}) = {m}")));
    }
    Ok(d + 3 * n - m)
}

/// The six terms whose maximum is `Q(X)`.
pub fn q_terms(p: &FibrationProfile) -> [i64; 6] {
    let m = maxdef_of_x(p);
    let neg = p.neg;
    [
        3,
        -2 * neg - 5,
        -neg + 3,
        2 * m - 5 * neg - 5,
        2 * m - neg - 3,
        2 * m + 2 + 2 * (-neg).max(0),
    ]
}

pub fn q_of_x(p: &FibrationProfile) -> i64 {
    *q_terms(p).iter().max().expect("six terms")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MbbSource {
    ImprovedLemma,
    QFormula,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MbbBound {
    pub bound: i64,
    pub source: MbbSource,
}

/// 3 when `maxdef(d) - d <= 2` for all `d` and the generic fiber has no
/// conic, otherwise `Q(X)`.
pub fn mbb_bound(p: &FibrationProfile) -> MbbBound {
    if !p.has_ff_conic && p.maxdef_table.iter().all(|(&d, &m)| m - d <= 2) {
        MbbBound { bound: 3, source: MbbSource::ImprovedLemma }
    } else {
        MbbBound { bound: q_of_x(p), source: MbbSource::QFormula }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GwThresholds {
    pub n_even: i64,
    pub n_odd: i64,
    pub n_balanced: i64,
    pub a_balanced: i64,
}

fn ceil_half(x: i64) -> i64 {
    (x + 1).div_euclid(2)
}

pub fn gw_thresholds(p: &FibrationProfile) -> GwThresholds {
    let m = maxdef_of_x(p);
    let pos = (-p.neg).max(0);
    let q = q_of_x(p);
    GwThresholds {
        n_even: m + 2 + pos,
        n_odd: (m + pos).max(1),
        n_balanced: ceil_half(q + 2),
        a_balanced: ceil_half(q + 8),
    }
}

/// `-neg - 1`, a strict upper bound on the height of a low family sweeping
/// out a subvariety with the same generic a-invariant.
pub fn same_a_low_height_bound(p: &FibrationProfile) -> i64 {
    -p.neg - 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub maxdef: i64,
    pub maxdef_table_empty: bool,
    pub non_dominant_threshold: i64,
    pub q: i64,
    pub q_terms: [i64; 6],
    pub mbb_bound: MbbBound,
    pub gw: GwThresholds,
    pub same_a_low_height_bound: i64,
}

pub fn threshold_report(p: &FibrationProfile) -> ThresholdReport {
    ThresholdReport {
        maxdef: maxdef_of_x(p),
        maxdef_table_empty: p.maxdef_table.is_empty(),
        non_dominant_threshold: non_dominant_threshold(p),
        q: q_of_x(p),
        q_terms: q_terms(p),
        mbb_bound: mbb_bound(p),
        gw: gw_thresholds(p),
        same_a_low_height_bound: same_a_low_height_bound(p),
    }
}

const SPOT_CHECKS: usize = 256;

/// Minimal points `v` of the box `0 <= v <= bound` with `oracle(v) >= c`.
///
/// Monotonicity is spot-checked on seeded random comparable pairs first. A
/// point of the up-set is minimal iff every `v - e_i` (with `v_i > 0`) falls
/// below `c`. Corners come back in lexicographic order.
pub fn monotone_corners<F>(oracle: F, c: i64, bound: &[u32], seed: u64) -> Result<Vec<Vec<u32>>>
where
    F: Fn(&[u32]) -> i64,
{
    let m = bound.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SPOT_CHECKS {
        let lo: Vec<u32> = bound.iter().map(|&b| rng.gen_range(0..=b)).collect();
        let hi: Vec<u32> = lo.iter().zip(bound).map(|(&l, &b)| rng.gen_range(l..=b)).collect();
        if oracle(&lo) > oracle(&hi) {
            return Err(Error::domain(format!("oracle is not monotone: f({lo:?}) > f({hi:?})")));
        }
    }
    let mut out = Vec::new();
    let mut v = vec![0u32; m];
    loop {
        if oracle(&v) >= c {
            let minimal = (0..m).all(|i| {
                if v[i] == 0 {
                    return true;
                }
                let mut w = v.clone();
                w[i] -= 1;
                oracle(&w) < c
            });
            if minimal {
                out.push(v.clone());
            }
        }
        // Odometer step, last coordinate fastest.
        let mut i = m;
        loop {
            if i == 0 {
                out.sort();
                return Ok(out);
            }
            i -= 1;
            if v[i] < bound[i] {
                v[i] += 1;
                break;
            }
            v[i] = 0;
        }
    }
}
