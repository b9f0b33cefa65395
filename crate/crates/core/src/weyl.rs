//! Weyl groups of del Pezzo lattices as integral isometries, orbits of curve
//! classes, invariant sublattices, and two finite group searches: a `(Z/3)^3`
//! monodromy inside `W(E_6)` and extensions of `S_4` by `{1, sigma}` inside `B_4`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::curves;
use crate::error::{Error, Result};
use crate::lattice::{Gram, LatticeVector, PicardLattice};

/// A square integer matrix acting on column vectors, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IsometryElement {
    dim: usize,
    entries: Box<[i32]>,
}

impl IsometryElement {
    pub fn identity(dim: usize) -> Self {
        let mut e = vec![0; dim * dim];
        for i in 0..dim {
            e[i * dim + i] = 1;
        }
        IsometryElement { dim, entries: e.into() }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::domain("isometry matrix must be square"));
        }
        let entries = rows.iter().flatten().map(|&x| x as i32).collect();
        Ok(IsometryElement { dim, entries })
    }

    fn from_entries(dim: usize, entries: Box<[i32]>) -> Self {
        IsometryElement { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.dim).map(|r| r.iter().map(|&x| x as i64).collect()).collect()
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.dim + j] as i64
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.entries
            .chunks(self.dim)
            .map(|r| r.iter().zip(v).map(|(&a, &b)| a as i64 * b).sum())
            .collect()
    }

    pub fn apply_vec(&self, v: &LatticeVector) -> LatticeVector {
        LatticeVector(self.apply(v.coords()))
    }

    /// `self * other`, acting as `other` first.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut e = vec![0i32; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    e[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        IsometryElement { dim: n, entries: e.into() }
    }

    /// `M^T G M = G`.
    pub fn preserves(&self, gram: &Gram) -> bool {
        let n = self.dim;
        let m = self.rows();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let ci: Vec<i64> = (0..n).map(|r| m[r][i]).collect();
                let cj: Vec<i64> = (0..n).map(|r| m[r][j]).collect();
                gram.pair_unchecked(&ci, &cj) == gram.matrix()[i][j]
            })
        })
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }
}

/// Reflection `x -> x + pair(x, r) r` in a root `r` with `r^2 = -2`.
pub fn reflection(lat: &PicardLattice, r: &LatticeVector) -> IsometryElement {
    let dim = lat.rank();
    let gr = lat.gram().apply(r.coords());
    let rows: Vec<Vec<i64>> = (0..dim)
        .map(|i| (0..dim).map(|j| i64::from(i == j) + r.coords()[i] * gr[j]).collect())
        .collect();
    IsometryElement::from_rows(&rows).expect("square")
}

/// Simple roots `E_i - E_{i+1}` and, for `n >= 3`, `H - E_1 - E_2 - E_3`.
pub fn simple_roots(lat: &PicardLattice) -> Result<Vec<LatticeVector>> {
    let n = lat.n();
    if n < 2 {
        return Err(Error::domain(format!("the Weyl group is trivial for n = {n}")));
    }
    let mut roots: Vec<LatticeVector> = (1..n).map(|i| lat.e(i).sub(&lat.e(i + 1))).collect();
    if n >= 3 {
        let mut b = vec![0; n];
        b[..3].copy_from_slice(&[1, 1, 1]);
        roots.push(lat.class(1, &b));
    }
    Ok(roots)
}

pub fn weyl_generators(lat: &PicardLattice) -> Result<Vec<IsometryElement>> {
    Ok(simple_roots(lat)?.iter().map(|r| reflection(lat, r)).collect())
}

/// A finite matrix group with its elements listed in discovery order.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    dim: usize,
    generators: Vec<IsometryElement>,
    elements: IndexSet<Box<[i32]>>,
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[IsometryElement] {
        &self.generators
    }

    pub fn element(&self, i: usize) -> IsometryElement {
        IsometryElement::from_entries(self.dim, self.elements[i].clone())
    }

    pub fn elements(&self) -> impl Iterator<Item = IsometryElement> + '_ {
        self.elements.iter().map(|e| IsometryElement::from_entries(self.dim, e.clone()))
    }

    pub fn contains(&self, g: &IsometryElement) -> bool {
        self.elements.contains(&g.entries)
    }

    /// The element set in canonical (sorted) order.
    pub fn sorted_elements(&self) -> Vec<IsometryElement> {
        let mut v: Vec<_> = self.elements().collect();
        v.sort();
        v
    }
}

/// Closure of `gens` under multiplication; fails once more than `cap`
/// elements have been found.
pub fn generate_group(gens: &[IsometryElement], cap: usize) -> Result<FiniteGroup> {
    let dim = gens.first().map_or(0, |g| g.dim);
    if gens.iter().any(|g| g.dim != dim) {
        return Err(Error::domain("generators have different dimensions"));
    }
    let id = IsometryElement::identity(dim);
    let mut elements: IndexSet<Box<[i32]>> = IndexSet::new();
    elements.insert(id.entries.clone());
    let mut head = 0;
    while head < elements.len() {
        let g = IsometryElement::from_entries(dim, elements[head].clone());
        head += 1;
        for s in gens {
            let h = s.mul(&g);
            if elements.insert(h.entries) && elements.len() > cap {
                return Err(Error::CapExceeded { cap });
            }
        }
    }
    Ok(FiniteGroup { dim, generators: gens.to_vec(), elements })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    pub representative: LatticeVector,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitPartition {
    pub orbits: Vec<Orbit>,
}

impl OrbitPartition {
    /// Orbit sizes in ascending order.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s: Vec<_> = self.orbits.iter().map(|o| o.size).collect();
        s.sort();
        s
    }
}

/// Orbits of the group generated by `gens` on a finite set of classes.
///
/// Only the generators are applied, so the group never has to be listed.
pub fn orbits_under(gens: &[IsometryElement], classes: &[LatticeVector]) -> Result<OrbitPartition> {
    let set: BTreeSet<&LatticeVector> = classes.iter().collect();
    let mut seen: BTreeSet<LatticeVector> = BTreeSet::new();
    let mut orbits = Vec::new();
    for c in set.iter() {
        if seen.contains(*c) {
            continue;
        }
        let mut orbit = vec![(*c).clone()];
        seen.insert((*c).clone());
        let mut queue = VecDeque::from([(*c).clone()]);
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = g.apply_vec(&x);
                if !set.contains(&y) {
                    return Err(Error::domain(format!("the action sends {x} to {y}, outside the class set")));
                }
                if seen.insert(y.clone()) {
                    orbit.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
        let representative = orbit.iter().min().expect("nonempty").clone();
        orbits.push(Orbit { representative, size: orbit.len() });
    }
    orbits.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(OrbitPartition { orbits })
}

pub fn orbits(group: &FiniteGroup, classes: &[LatticeVector]) -> Result<OrbitPartition> {
    if group.generators.is_empty() {
        return orbits_under(&[IsometryElement::identity(group.dim)], classes);
    }
    orbits_under(&group.generators, classes)
}

/// A Z-basis (Hermite normal form) of the vectors fixed by every generator.
pub fn invariant_sublattice(gens: &[IsometryElement], rank: usize) -> Vec<LatticeVector> {
    let mut rows = Vec::new();
    for g in gens {
        let m = g.rows();
        for (i, row) in m.into_iter().enumerate() {
            let mut r = row;
            r[i] -= 1;
            rows.push(r);
        }
    }
    arith::integer_kernel(&rows, rank).into_iter().map(LatticeVector).collect()
}

fn line_permutation(g: &IsometryElement, index: &BTreeMap<LatticeVector, u8>, lines: &[LatticeVector]) -> Vec<u8> {
    lines.iter().map(|l| index[&g.apply_vec(l)]).collect()
}

fn compose(p: &[u8], q: &[u8]) -> Vec<u8> {
    // p after q
    q.iter().map(|&i| p[i as usize]).collect()
}

fn perm_orbit_sizes(gens: &[&Vec<u8>], m: usize) -> Vec<usize> {
    let mut seen = vec![false; m];
    let mut sizes = Vec::new();
    for s in 0..m {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut size = 0;
        while let Some(x) = stack.pop() {
            size += 1;
            for g in gens {
                let y = g[x] as usize;
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        sizes.push(size);
    }
    sizes.sort();
    sizes
}

/// Searches `W(E_6)` for an elementary abelian subgroup of order 27 whose
/// orbits on the lines and on the conic classes all have size 9.
///
/// Elements are handled as permutations of the 27 lines (the action is
/// faithful). Commuting order-3 elements `a, b, c` are chosen in element order
/// and the first triple spanning a group of order 27 with the required orbits
/// is returned.
pub fn find_diagonal_cubic_subgroup(weyl: &FiniteGroup, lat: &PicardLattice) -> Result<FiniteGroup> {
    let lines = curves::enumerate_neg_one_curves(lat);
    if lines.len() != 27 || weyl.dim() != lat.rank() {
        return Err(Error::domain("the diagonal cubic search needs the cubic surface lattice"));
    }
    let index: BTreeMap<LatticeVector, u8> = lines.iter().enumerate().map(|(i, l)| (l.clone(), i as u8)).collect();
    let id: Vec<u8> = (0..27).collect();
    let mut threes: Vec<(usize, Vec<u8>)> = Vec::new();
    for (i, g) in weyl.elements().enumerate() {
        let p = line_permutation(&g, &index, &lines);
        if p != id && compose(&p, &compose(&p, &p)) == id {
            threes.push((i, p));
        }
    }
    let commute = |p: &[u8], q: &[u8]| compose(p, q) == compose(q, p);
    let span = |gs: &[&Vec<u8>]| -> BTreeSet<Vec<u8>> {
        let mut set = BTreeSet::from([id.clone()]);
        let mut queue = vec![id.clone()];
        while let Some(x) = queue.pop() {
            for g in gs {
                let y = compose(g, &x);
                if set.insert(y.clone()) {
                    queue.push(y);
                }
            }
        }
        set
    };
    let conics: Vec<LatticeVector> = lines.iter().map(|l| lat.anticanonical().sub(l)).collect();
    for (ai, (ia, a)) in threes.iter().enumerate() {
        for (bi, (ib, b)) in threes.iter().enumerate().skip(ai + 1) {
            if !commute(a, b) {
                continue;
            }
            let ab = span(&[a, b]);
            if ab.len() != 9 {
                continue;
            }
            for (ic, c) in threes.iter().skip(bi + 1) {
                if ab.contains(c) || !commute(a, c) || !commute(b, c) {
                    continue;
                }
                if perm_orbit_sizes(&[a, b, c], 27) != vec![9, 9, 9] {
                    continue;
                }
                let gens = vec![weyl.element(*ia), weyl.element(*ib), weyl.element(*ic)];
                let group = generate_group(&gens, 27)?;
                if orbits(&group, &conics)?.sizes() != vec![9, 9, 9] {
                    continue;
                }
                return Ok(group);
            }
        }
    }
    Err(Error::NotFound("no (Z/3)^3 subgroup with line orbits 9, 9, 9".into()))
}

/// An element of the hyperoctahedral group `B_m`.
///
/// It sends the sign vector `v` to `w` with `w[perm[i]] = signs[i] * v[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedPermutation {
    pub perm: Vec<u8>,
    pub signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn identity(m: usize) -> Self {
        SignedPermutation { perm: (0..m as u8).collect(), signs: vec![1; m] }
    }

    /// The central element negating every coordinate.
    pub fn sigma(m: usize) -> Self {
        SignedPermutation { perm: (0..m as u8).collect(), signs: vec![-1; m] }
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Self) -> Self {
        let perm = other.perm.iter().map(|&j| self.perm[j as usize]).collect();
        let signs = (0..other.perm.len())
            .map(|i| self.signs[other.perm[i] as usize] * other.signs[i])
            .collect();
        SignedPermutation { perm, signs }
    }

    pub fn act(&self, v: &[i8]) -> Vec<i8> {
        let mut w = vec![0; v.len()];
        for i in 0..v.len() {
            w[self.perm[i] as usize] = self.signs[i] * v[i];
        }
        w
    }

    pub fn is_pure_sign(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| p as usize == i)
    }
}

fn close_signed(gens: &[SignedPermutation], m: usize) -> BTreeSet<SignedPermutation> {
    let mut set = BTreeSet::from([SignedPermutation::identity(m)]);
    let mut queue = vec![SignedPermutation::identity(m)];
    while let Some(x) = queue.pop() {
        for g in gens {
            let y = g.compose(&x);
            if set.insert(y.clone()) {
                queue.push(y);
            }
        }
    }
    set
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionSubgroup {
    pub order: usize,
    pub split: bool,
    pub orbit_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub subgroups: Vec<ExtensionSubgroup>,
}

/// Enumerates every subgroup `G <= B_4` of order 48 that contains `sigma`,
/// maps onto `S_4`, and meets the sign subgroup exactly in `{1, sigma}`.
///
/// Such a `G` is generated by `sigma` and lifts of the transpositions
/// `(12), (23), (34)`, so all `16^3` lift choices are tried. `G` splits iff
/// one of the `2^3` choices of lifts inside `G` generates a group of order 24.
pub fn conic_bundle_extension_analysis() -> ExtensionReport {
    const M: usize = 4;
    let sigma = SignedPermutation::sigma(M);
    let transpositions: Vec<Vec<u8>> = (0..M - 1)
        .map(|i| {
            let mut p: Vec<u8> = (0..M as u8).collect();
            p.swap(i, i + 1);
            p
        })
        .collect();
    let sign_vectors: Vec<Vec<i8>> = (0..1u32 << M)
        .map(|b| (0..M).map(|i| if b >> i & 1 == 1 { -1 } else { 1 }).collect())
        .collect();
    let lift = |p: &Vec<u8>, bits: u32| SignedPermutation {
        perm: p.clone(),
        signs: (0..M).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect(),
    };

    let mut found: BTreeSet<BTreeSet<SignedPermutation>> = BTreeSet::new();
    for choice in 0..(1u32 << (M * (M - 1))) {
        let mut gens: Vec<SignedPermutation> = transpositions
            .iter()
            .enumerate()
            .map(|(k, p)| lift(p, (choice >> (M * k)) & 0xF))
            .collect();
        gens.push(sigma.clone());
        let g = close_signed(&gens, M);
        if g.len() != 48 {
            continue;
        }
        let kernel: Vec<_> = g.iter().filter(|x| x.is_pure_sign()).collect();
        if kernel.len() != 2 {
            continue;
        }
        found.insert(g);
    }

    let mut subgroups = Vec::new();
    for g in &found {
        let lifts: Vec<Vec<&SignedPermutation>> =
            transpositions.iter().map(|t| g.iter().filter(|x| &x.perm == t).collect()).collect();
        let split = (0..1u32 << lifts.len()).any(|c| {
            let gens: Vec<SignedPermutation> =
                lifts.iter().enumerate().map(|(k, l)| l[(c >> k & 1) as usize].clone()).collect();
            close_signed(&gens, M).len() == 24
        });
        let mut seen = BTreeSet::new();
        let mut orbit_sizes = Vec::new();
        for v in &sign_vectors {
            if seen.contains(v) {
                continue;
            }
            let orbit: BTreeSet<Vec<i8>> = g.iter().map(|x| x.act(v)).collect();
            orbit_sizes.push(orbit.len());
            seen.extend(orbit);
        }
        orbit_sizes.sort();
        subgroups.push(ExtensionSubgroup { order: g.len(), split, orbit_sizes });
    }
    ExtensionReport { subgroups }
}

/// Checks the two statements about the report: non-split extensions act
/// transitively on the 16 sign vectors, and intransitive ones have an orbit of
/// size 2, 4 or 8.
pub fn verify_extension_claims(report: &ExtensionReport) -> Result<()> {
    for (i, s) in report.subgroups.iter().enumerate() {
        let transitive = s.orbit_sizes == vec![16];
        if !s.split && !transitive {
            return Err(Error::Falsified(format!("non-split subgroup {i} has orbits {:?}", s.orbit_sizes)));
        }
        if !transitive && !s.orbit_sizes.iter().any(|o| [2, 4, 8].contains(o)) {
            return Err(Error::Falsified(format!("subgroup {i} has orbits {:?}", s.orbit_sizes)));
        }
    }
    Ok(())
}
