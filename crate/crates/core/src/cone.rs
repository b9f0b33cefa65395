//! Polyhedral cones in exact integer arithmetic: double description for
//! dualization and a pulling triangulation for volumes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::arith::{self, dot, primitive};
use crate::error::{Error, Result};
use crate::lattice::{Gram, LatticeVector};

/// A cone given by extreme rays and/or inequality normals.
///
/// A class `x` lies in the cone when `pair(x, f) >= 0` for every facet normal `f`,
/// where the pairing is the one of the ambient lattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cone {
    pub generators: Vec<LatticeVector>,
    pub facets: Vec<LatticeVector>,
}

impl Cone {
    /// Computes the facet normals of `cone(generators)` under `gram`.
    pub fn from_generators(generators: Vec<LatticeVector>, gram: &Gram) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::domain("a cone needs at least one generator"));
        }
        let rows: Vec<Vec<i64>> = generators.iter().map(|g| gram.apply(g.coords())).collect();
        let facets = dual_rays(&rows, gram.dim())?.into_iter().map(LatticeVector).collect();
        Ok(Cone { generators: normalize(generators), facets })
    }

    /// The dual cone `{x : pair(x, g) >= 0 for all generators g}`, returned with
    /// its extreme rays as generators and the original generators as facets.
    pub fn dual(&self, gram: &Gram) -> Result<Self> {
        let rows: Vec<Vec<i64>> = self.generators.iter().map(|g| gram.apply(g.coords())).collect();
        let gens = dual_rays(&rows, gram.dim())?.into_iter().map(LatticeVector).collect();
        Ok(Cone { generators: gens, facets: self.generators.clone() })
    }

    pub fn contains(&self, v: &LatticeVector, gram: &Gram) -> Result<bool> {
        for f in &self.facets {
            if gram.pair(v, f)? < 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn normalize(v: Vec<LatticeVector>) -> Vec<LatticeVector> {
    let set: BTreeSet<LatticeVector> = v.into_iter().collect();
    set.into_iter().collect()
}

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
}

struct Ray {
    v: Vec<i64>,
    zero: Bits,
}

/// Extreme rays of `{x in Q^dim : a . x >= 0 for every row a}`.
///
/// The rows must span `Q^dim` so that the cone is pointed. Rays are returned
/// as primitive integer vectors in lexicographic order.
pub fn dual_rays(rows: &[Vec<i64>], dim: usize) -> Result<Vec<Vec<i64>>> {
    let mut cons: Vec<Vec<i64>> = Vec::new();
    for r in rows {
        if r.len() != dim {
            return Err(Error::domain("constraint length does not match dimension"));
        }
        if r.iter().all(|&x| x == 0) {
            continue;
        }
        let p = primitive(&r.iter().map(|&x| x as i128).collect::<Vec<_>>());
        if !cons.contains(&p) {
            cons.push(p);
        }
    }
    cons.sort();

    // Greedy independent subset to seed the iteration.
    let mut basis: Vec<usize> = Vec::new();
    let mut basis_rows: Vec<Vec<i64>> = Vec::new();
    for (i, c) in cons.iter().enumerate() {
        basis_rows.push(c.clone());
        if arith::rank(&basis_rows) == basis_rows.len() {
            basis.push(i);
            if basis.len() == dim {
                break;
            }
        } else {
            basis_rows.pop();
        }
    }
    if basis.len() < dim {
        return Err(Error::domain(format!(
            "inequalities have rank {} < {dim}; the cone is not pointed",
            basis.len()
        )));
    }

    // Order: basis first, then the rest.
    let mut order = basis.clone();
    order.extend((0..cons.len()).filter(|i| !basis.contains(i)));
    let cons: Vec<Vec<i64>> = order.iter().map(|&i| cons[i].clone()).collect();
    let m = cons.len();

    let inv = arith::inverse(&cons[..dim]).expect("basis rows are independent");
    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let col: Vec<_> = inv.iter().map(|row| row[j].clone()).collect();
            let v = arith::primitive_from_rational(&col);
            let mut zero = Bits::new(m);
            for (k, c) in cons[..dim].iter().enumerate() {
                if dot(c, &v) == 0 {
                    zero.set(k);
                }
            }
            Ray { v, zero }
        })
        .collect();

    for k in dim..m {
        let a = &cons[k];
        let vals: Vec<i128> = rays.iter().map(|r| dot(a, &r.v) as i128).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > 0).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < 0).collect();
        if neg.is_empty() {
            for (i, r) in rays.iter_mut().enumerate() {
                if vals[i] == 0 {
                    r.zero.set(k);
                }
            }
            continue;
        }
        let mut fresh: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zero.and(&rays[q].zero);
                if (common.count() as usize) + 2 < dim {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(i, r)| i == p || i == q || !common.subset_of(&r.zero));
                if !adjacent {
                    continue;
                }
                let v: Vec<i128> = rays[q]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(&x, &y)| vals[p] * x as i128 - vals[q] * y as i128)
                    .collect();
                let v = primitive(&v);
                let mut zero = common;
                zero.set(k);
                fresh.push(Ray { v, zero });
            }
        }
        let mut next: Vec<Ray> = Vec::new();
        for (i, mut r) in rays.into_iter().enumerate() {
            if vals[i] > 0 {
                next.push(r);
            } else if vals[i] == 0 {
                r.zero.set(k);
                next.push(r);
            }
        }
        next.extend(fresh);
        rays = next;
    }
    let mut out: Vec<Vec<i64>> = rays.into_iter().map(|r| r.v).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Splits a pointed full-dimensional cone into simplicial cones.
///
/// `gens` are the generators (in any pointed configuration; non-extreme
/// generators are allowed), `facets` the Euclidean facet normals of their cone.
/// Returns index sets into `gens`, each of size `dim`.
pub fn pulling_triangulation(gens: &[Vec<i64>], facets: &[Vec<i64>]) -> Vec<Vec<usize>> {
    let dim = gens.first().map_or(0, |g| g.len());
    let all: Vec<usize> = (0..gens.len()).collect();
    pull(gens, facets, &all, dim)
}

fn pull(gens: &[Vec<i64>], facets: &[Vec<i64>], face: &[usize], dim: usize) -> Vec<Vec<usize>> {
    if dim == 1 {
        return vec![vec![face[0]]];
    }
    let apex = face[0];
    let mut subfaces: Vec<Vec<usize>> = Vec::new();
    for f in facets {
        let sub: Vec<usize> = face.iter().copied().filter(|&i| dot(f, &gens[i]) == 0).collect();
        if sub.contains(&apex) || sub.is_empty() || subfaces.contains(&sub) {
            continue;
        }
        let rows: Vec<Vec<i64>> = sub.iter().map(|&i| gens[i].clone()).collect();
        if arith::rank(&rows) == dim - 1 {
            subfaces.push(sub);
        }
    }
    let mut out = Vec::new();
    for sub in subfaces {
        for mut s in pull(gens, facets, &sub, dim - 1) {
            s.insert(0, apex);
            out.push(s);
        }
    }
    out
}
