//! Sections of Hirzebruch surfaces, degenerate fibers of ruled surfaces as
//! weighted trees, and gluing rules for normal bundles of sections.

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HirzebruchModel {
    pub e: i64,
}

impl HirzebruchModel {
    pub fn new(e: i64) -> Result<Self> {
        if e < 0 {
            return Err(Error::domain(format!("Hirzebruch index {e} is negative")));
        }
        Ok(HirzebruchModel { e })
    }

    /// `e`: the section `C_0 + eF` is the lowest one that moves.
    pub fn minimal_moving_height(&self) -> i64 {
        section_height(*self, SectionClass { k: self.e })
    }
}

/// The class `C_0 + kF`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionClass {
    pub k: i64,
}

/// `(2 C_0 + e F) . (C_0 + k F) = -e + 2k`.
pub fn section_height(m: HirzebruchModel, s: SectionClass) -> i64 {
    -m.e + 2 * s.k
}

/// Fiber coefficients of the two decompositions of a section of height `q`:
/// `C_0 + rigid F + T` with `T` an unspecified vertical residual, and
/// `C_1 + movable F` with `C_1` a minimal moving section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrokenSection {
    pub rigid: i64,
    pub movable: i64,
    pub has_vertical_residual: bool,
}

pub fn break_section(q: i64, e: i64) -> Result<BrokenSection> {
    if q < e {
        return Err(Error::HeightBelowModel { q, e });
    }
    if (q - e).rem_euclid(2) != 0 {
        return Err(Error::NonIntegralCoefficient { q, e });
    }
    Ok(BrokenSection { rigid: (q + e) / 2, movable: (q - e) / 2, has_vertical_residual: true })
}

/// A fiber of a ruled surface: components with self-intersection and
/// multiplicity, their intersection graph, and the component met by a
/// marked section.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberTree {
    pub components: Vec<(i64, u64)>,
    pub edges: Vec<(usize, usize)>,
    pub marked: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlowUpTarget {
    /// A general point of a component.
    Component(usize),
    /// The node where two components meet.
    Edge(usize, usize),
    /// The point where the marked section meets the fiber.
    SectionPoint,
}

impl FiberTree {
    /// The smooth fiber, met by the marked section.
    pub fn irreducible() -> Self {
        FiberTree { components: vec![(0, 1)], edges: Vec::new(), marked: Some(0) }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let e = (i.min(j), i.max(j));
        self.edges.contains(&e)
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| if a == i { Some(b) } else if b == i { Some(a) } else { None })
            .collect();
        v.sort();
        v
    }

    /// `(sum m_i C_i) . C_j` for every `j`; all zero for a genuine fiber.
    pub fn fiber_pairings(&self) -> Vec<i64> {
        (0..self.len())
            .map(|j| {
                let (s, m) = self.components[j];
                m as i64 * s + self.neighbors(j).iter().map(|&i| self.components[i].1 as i64).sum::<i64>()
            })
            .collect()
    }

    /// `(sum m_i C_i)^2`.
    pub fn fiber_square(&self) -> i64 {
        self.fiber_pairings().iter().zip(&self.components).map(|(p, c)| p * c.1 as i64).sum()
    }

    pub fn is_consistent(&self) -> bool {
        self.fiber_pairings().iter().all(|&p| p == 0)
    }

    pub fn targets(&self) -> Vec<BlowUpTarget> {
        let mut t: Vec<BlowUpTarget> = (0..self.len()).map(BlowUpTarget::Component).collect();
        t.extend(self.edges.iter().map(|&(a, b)| BlowUpTarget::Edge(a, b)));
        if self.marked.is_some() {
            t.push(BlowUpTarget::SectionPoint);
        }
        t
    }
}

pub fn blow_up_fiber(t: &FiberTree, target: BlowUpTarget) -> Result<FiberTree> {
    let mut out = t.clone();
    let new = t.len();
    match target {
        BlowUpTarget::Component(i) => {
            if i >= t.len() {
                return Err(Error::domain(format!("component {i} out of range")));
            }
            out.components[i].0 -= 1;
            out.components.push((-1, t.components[i].1));
            out.edges.push((i, new));
        }
        BlowUpTarget::Edge(a, b) => {
            let (i, j) = (a.min(b), a.max(b));
            if !t.has_edge(i, j) {
                return Err(Error::domain(format!("components {i} and {j} do not meet")));
            }
            out.components[i].0 -= 1;
            out.components[j].0 -= 1;
            out.components.push((-1, t.components[i].1 + t.components[j].1));
            out.edges.retain(|&e| e != (i, j));
            out.edges.push((i, new));
            out.edges.push((j, new));
        }
        BlowUpTarget::SectionPoint => {
            let i = t.marked.ok_or_else(|| Error::domain("the fiber has no marked section"))?;
            out.components[i].0 -= 1;
            out.components.push((-1, t.components[i].1));
            out.edges.push((i, new));
            out.marked = Some(new);
        }
    }
    out.edges.sort();
    Ok(out)
}

/// Given a multiplicity one `(-1)`-component, returns the index of another
/// `(-1)`-component.
pub fn verify_second_minus_one(t: &FiberTree) -> Result<usize> {
    if t.len() < 2 {
        return Err(Error::NotApplicable("the fiber is irreducible".into()));
    }
    let first = t
        .components
        .iter()
        .position(|&(s, m)| s == -1 && m == 1)
        .ok_or_else(|| Error::NotApplicable("no (-1)-component of multiplicity 1".into()))?;
    (0..t.len())
        .find(|&j| j != first && t.components[j].0 == -1)
        .ok_or_else(|| Error::Falsified(format!("component {first} is the only (-1)-curve in {t:?}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionStep {
    /// Index in the tree as it was just before this step.
    pub index: usize,
    pub mult: u64,
}

/// Repeatedly contracts the lowest-index unmarked `(-1)`-component until the
/// fiber is irreducible.
pub fn contract_keeping_section(t: &FiberTree) -> Result<(Vec<ContractionStep>, FiberTree)> {
    let marked = t.marked.ok_or_else(|| Error::domain("the fiber has no marked section"))?;
    if t.components[marked].1 != 1 {
        return Err(Error::domain("the marked component must have multiplicity 1"));
    }
    let mut cur = t.clone();
    let mut steps = Vec::new();
    while cur.len() > 1 {
        let mk = cur.marked.expect("marked is kept");
        let Some(i) = (0..cur.len()).find(|&i| i != mk && cur.components[i].0 == -1) else {
            return Err(Error::Falsified(format!("no contractible component avoiding the section in {cur:?}")));
        };
        steps.push(ContractionStep { index: i, mult: cur.components[i].1 });
        cur = contract(&cur, i);
    }
    Ok((steps, cur))
}

fn contract(t: &FiberTree, i: usize) -> FiberTree {
    let nbrs = t.neighbors(i);
    let mut comps = t.components.clone();
    for &n in &nbrs {
        comps[n].0 += 1;
    }
    comps.remove(i);
    let shift = |j: usize| if j > i { j - 1 } else { j };
    let mut edges: BTreeSet<(usize, usize)> =
        t.edges.iter().filter(|&&(a, b)| a != i && b != i).map(|&(a, b)| (shift(a), shift(b))).collect();
    for (x, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[x + 1..] {
            edges.insert((shift(a), shift(b)));
        }
    }
    FiberTree { components: comps, edges: edges.into_iter().collect(), marked: t.marked.map(shift) }
}

/// A random fiber obtained by `depth` blow-ups at uniformly chosen targets.
pub fn random_fiber(rng: &mut ChaCha8Rng, depth: usize) -> (FiberTree, Vec<BlowUpTarget>) {
    let mut t = FiberTree::irreducible();
    let mut seq = Vec::with_capacity(depth);
    for _ in 0..depth {
        let targets = t.targets();
        let pick = targets[rng.gen_range(0..targets.len())];
        t = blow_up_fiber(&t, pick).expect("target comes from the tree");
        seq.push(pick);
    }
    (t, seq)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub seed: u64,
    pub trials: usize,
    pub max_depth: usize,
    pub inconsistent: usize,
    pub second_minus_one_applicable: usize,
    pub second_minus_one_found: usize,
    pub contraction_applicable: usize,
    pub contraction_succeeded: usize,
}

impl FuzzReport {
    pub fn clean(&self) -> bool {
        self.inconsistent == 0
            && self.second_minus_one_found == self.second_minus_one_applicable
            && self.contraction_succeeded == self.contraction_applicable
    }
}

/// Builds `trials` random fibers of depth `0..=max_depth` and checks them.
pub fn fuzz_fibers(seed: u64, trials: usize, max_depth: usize) -> FuzzReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = FuzzReport {
        seed,
        trials,
        max_depth,
        inconsistent: 0,
        second_minus_one_applicable: 0,
        second_minus_one_found: 0,
        contraction_applicable: 0,
        contraction_succeeded: 0,
    };
    for _ in 0..trials {
        let depth = rng.gen_range(0..=max_depth);
        let (t, _) = random_fiber(&mut rng, depth);
        if !t.is_consistent() || t.fiber_square() != 0 {
            r.inconsistent += 1;
        }
        match verify_second_minus_one(&t) {
            Ok(_) => {
                r.second_minus_one_applicable += 1;
                r.second_minus_one_found += 1;
            }
            Err(Error::Falsified(_)) => r.second_minus_one_applicable += 1,
            Err(_) => {}
        }
        if t.marked.is_some_and(|m| t.components[m].1 == 1) {
            r.contraction_applicable += 1;
            if let Ok((_, end)) = contract_keeping_section(&t) {
                if end.components == vec![(0, 1)] && end.marked == Some(0) {
                    r.contraction_succeeded += 1;
                }
            }
        }
    }
    r
}

/// Splitting type `O(a) + O(b)` with `a <= b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalBundleType {
    pub a: i64,
    pub b: i64,
}

impl NormalBundleType {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        if a > b {
            return Err(Error::domain(format!("splitting type ({a}, {b}) must have a <= b")));
        }
        Ok(NormalBundleType { a, b })
    }

    pub fn height(&self) -> i64 {
        self.a + self.b
    }

    pub fn gap(&self) -> i64 {
        self.b - self.a
    }
}

/// Normal bundle after gluing a general vertical cubic (3) or quartic (4)
/// to a section with balanced or nearly balanced normal bundle.
pub fn glue_normal_bundle(nb: NormalBundleType, vertical_degree: i64) -> Result<NormalBundleType> {
    let a = nb.a;
    let (na, nbb) = match (nb.gap(), vertical_degree) {
        (0, 3) => (a + 1, a + 2),
        (0, 4) => (a + 2, a + 2),
        (1, 3) => (a + 2, a + 2),
        (1, 4) => (a + 2, a + 3),
        (g, 3 | 4) => return Err(Error::domain(format!("no gluing rule for splitting gap {g}"))),
        (_, d) => return Err(Error::domain(format!("vertical degree {d} is not 3 or 4"))),
    };
    NormalBundleType::new(na, nbb)
}

/// All `(height, type)` pairs reachable from `start` by gluings, up to `h_max`.
pub fn reachable_balanced_heights(start: NormalBundleType, h_max: i64) -> Result<BTreeSet<(i64, NormalBundleType)>> {
    if start.gap() > 1 {
        return Err(Error::domain("start must be balanced or nearly balanced"));
    }
    let mut seen = BTreeSet::new();
    if start.height() > h_max {
        return Ok(seen);
    }
    let mut queue = VecDeque::from([start]);
    seen.insert((start.height(), start));
    while let Some(nb) = queue.pop_front() {
        for d in [3, 4] {
            let next = glue_normal_bundle(nb, d)?;
            if next.height() <= h_max && seen.insert((next.height(), next)) {
                queue.push_back(next);
            }
        }
    }
    Ok(seen)
}

/// Checks that every height from `start + 6` to `h_max` carries a balanced
/// type for even heights and a nearly balanced one for odd heights.
pub fn check_balanced_coverage(start: NormalBundleType, h_max: i64) -> Result<()> {
    let reach = reachable_balanced_heights(start, h_max)?;
    for h in start.height() + 6..=h_max {
        let want = NormalBundleType::new(h.div_euclid(2), h - h.div_euclid(2))?;
        if !reach.contains(&(h, want)) {
            return Err(Error::Falsified(format!("height {h} does not carry {want:?}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heights() {
        let m = HirzebruchModel::new(2).unwrap();
        assert_eq!(section_height(m, SectionClass { k: 0 }), -2);
        assert_eq!(section_height(m, SectionClass { k: 2 }), 2);
        assert_eq!(section_height(HirzebruchModel::new(0).unwrap(), SectionClass { k: 0 }), 0);
        for e in 0..=6 {
            assert_eq!(HirzebruchModel::new(e).unwrap().minimal_moving_height(), e);
        }
    }

    #[test]
    fn breaking_sections() {
        assert_eq!(break_section(5, 1).unwrap(), BrokenSection { rigid: 3, movable: 2, has_vertical_residual: true });
        assert_eq!(break_section(3, 3).unwrap().movable, 0);
        assert_eq!(break_section(4, 1), Err(Error::NonIntegralCoefficient { q: 4, e: 1 }));
        assert_eq!(break_section(1, 3), Err(Error::HeightBelowModel { q: 1, e: 3 }));
    }

    #[test]
    fn blow_ups() {
        let t = blow_up_fiber(&FiberTree::irreducible(), BlowUpTarget::Component(0)).unwrap();
        assert_eq!(t.components, vec![(-1, 1), (-1, 1)]);
        assert_eq!(t.edges, vec![(0, 1)]);
        let chain = blow_up_fiber(&t, BlowUpTarget::Edge(0, 1)).unwrap();
        assert_eq!(chain.components, vec![(-2, 1), (-2, 1), (-1, 2)]);
        assert_eq!(chain.edges, vec![(0, 2), (1, 2)]);
        assert!(chain.is_consistent());
        let leaf = blow_up_fiber(&t, BlowUpTarget::Component(1)).unwrap();
        assert_eq!(leaf.components, vec![(-1, 1), (-2, 1), (-1, 1)]);
        assert!(blow_up_fiber(&t, BlowUpTarget::Component(7)).is_err());
        assert!(blow_up_fiber(&chain, BlowUpTarget::Edge(0, 1)).is_err());
    }

    #[test]
    fn second_minus_one() {
        let t = blow_up_fiber(&FiberTree::irreducible(), BlowUpTarget::Component(0)).unwrap();
        assert_eq!(verify_second_minus_one(&t).unwrap(), 1);
        let chain = blow_up_fiber(&t, BlowUpTarget::Edge(0, 1)).unwrap();
        assert!(matches!(verify_second_minus_one(&chain), Err(Error::NotApplicable(_))));
        assert!(matches!(verify_second_minus_one(&FiberTree::irreducible()), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn contraction() {
        let (steps, end) = contract_keeping_section(&FiberTree::irreducible()).unwrap();
        assert!(steps.is_empty());
        assert_eq!(end, FiberTree::irreducible());
        let t = blow_up_fiber(&FiberTree::irreducible(), BlowUpTarget::Component(0)).unwrap();
        let (steps, end) = contract_keeping_section(&t).unwrap();
        assert_eq!(steps, vec![ContractionStep { index: 1, mult: 1 }]);
        assert_eq!(end, FiberTree::irreducible());
        let mut unmarked = t.clone();
        unmarked.marked = None;
        assert!(contract_keeping_section(&unmarked).is_err());
    }

    #[test]
    fn section_point_moves_mark() {
        let t = blow_up_fiber(&FiberTree::irreducible(), BlowUpTarget::SectionPoint).unwrap();
        assert_eq!(t.marked, Some(1));
        let (steps, end) = contract_keeping_section(&t).unwrap();
        assert_eq!(steps[0].index, 0);
        assert_eq!(end.marked, Some(0));
    }

    #[test]
    fn fuzz_small() {
        let r = fuzz_fibers(1, 200, 8);
        assert!(r.clean(), "{r:?}");
        assert!(r.second_minus_one_applicable > 0);
    }

    #[test]
    fn gluing() {
        let nb = |a, b| NormalBundleType::new(a, b).unwrap();
        assert_eq!(glue_normal_bundle(nb(3, 3), 3).unwrap(), nb(4, 5));
        assert_eq!(glue_normal_bundle(nb(3, 3), 4).unwrap(), nb(5, 5));
        assert_eq!(glue_normal_bundle(nb(3, 4), 3).unwrap(), nb(5, 5));
        assert_eq!(glue_normal_bundle(nb(3, 4), 4).unwrap(), nb(5, 6));
        assert!(glue_normal_bundle(nb(3, 5), 3).is_err());
        assert!(glue_normal_bundle(nb(3, 3), 5).is_err());
    }

    #[test]
    fn reachability() {
        let start = NormalBundleType::new(3, 3).unwrap();
        let r = reachable_balanced_heights(start, 14).unwrap();
        let hs: BTreeSet<i64> = r.iter().map(|x| x.0).collect();
        assert_eq!(hs, BTreeSet::from([6, 9, 10, 12, 13, 14]));
        check_balanced_coverage(start, 40).unwrap();
        check_balanced_coverage(NormalBundleType::new(3, 4).unwrap(), 41).unwrap();
        assert!(reachable_balanced_heights(start, 5).unwrap().is_empty());
    }
}
