//! The Picard lattice of the plane blown up at `n` general points.
//!
//! Classes are written in the geometric basis `(H, E_1, ..., E_n)`, with
//! intersection form `diag(1, -1, ..., -1)` and canonical class
//! `K = -3H + E_1 + ... + E_n`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An integral class, read as a divisor or a curve through the pairing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticeVector(coords)
    }

    pub fn zero(rank: usize) -> Self {
        LatticeVector(vec![0; rank])
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        LatticeVector(v)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Self {
        LatticeVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        LatticeVector(v)
    }
}

/// A symmetric integral bilinear form given by its Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gram(Vec<Vec<i64>>);

impl Gram {
    pub fn new(m: Vec<Vec<i64>>) -> Result<Self> {
        let n = m.len();
        if m.iter().any(|r| r.len() != n) {
            return Err(Error::domain("gram matrix must be square"));
        }
        for i in 0..n {
            for j in 0..i {
                if m[i][j] != m[j][i] {
                    return Err(Error::domain("gram matrix must be symmetric"));
                }
            }
        }
        Ok(Gram(m))
    }

    pub fn identity(n: usize) -> Self {
        Gram((0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.0
    }

    /// `G v`, the linear functional `x -> pair(x, v)` in coordinates.
    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.0.iter().map(|row| crate::arith::dot(row, v)).collect()
    }

    pub fn pair(&self, a: &LatticeVector, b: &LatticeVector) -> Result<i64> {
        let n = self.dim();
        if a.len() != n || b.len() != n {
            return Err(Error::domain(format!(
                "class lengths {} and {} do not match lattice rank {n}",
                a.len(),
                b.len()
            )));
        }
        Ok(self.pair_unchecked(a.coords(), b.coords()))
    }

    pub(crate) fn pair_unchecked(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut s = 0;
        for (i, row) in self.0.iter().enumerate() {
            if a[i] == 0 {
                continue;
            }
            s += a[i] * crate::arith::dot(row, b);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PicardLattice {
    n: usize,
    gram: Gram,
    canonical: LatticeVector,
}

impl PicardLattice {
    /// The blow-up of the plane at `n` points, `0 <= n <= 8`.
    pub fn new(n: usize) -> Result<Self> {
        if n > 8 {
            return Err(Error::domain(format!(
                "blow-up count {n} outside 0..=8 (degree {} is not a del Pezzo degree)",
                9 - n as i64
            )));
        }
        let rank = n + 1;
        let gram = (0..rank)
            .map(|i| (0..rank).map(|j| if i != j { 0 } else if i == 0 { 1 } else { -1 }).collect())
            .collect();
        let mut k = vec![1; rank];
        k[0] = -3;
        Ok(PicardLattice { n, gram: Gram(gram), canonical: LatticeVector(k) })
    }

    /// The lattice of the del Pezzo surface of the given degree in its blow-up model.
    pub fn of_degree(degree: i64) -> Result<Self> {
        if !(1..=9).contains(&degree) {
            return Err(Error::domain(format!("del Pezzo degree {degree} outside 1..=9")));
        }
        Self::new((9 - degree) as usize)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.n + 1
    }

    pub fn degree(&self) -> i64 {
        9 - self.n as i64
    }

    pub fn gram(&self) -> &Gram {
        &self.gram
    }

    pub fn canonical(&self) -> &LatticeVector {
        &self.canonical
    }

    pub fn anticanonical(&self) -> LatticeVector {
        self.canonical.neg()
    }

    pub fn pair(&self, a: &LatticeVector, b: &LatticeVector) -> Result<i64> {
        self.gram.pair(a, b)
    }

    pub fn square(&self, a: &LatticeVector) -> Result<i64> {
        self.gram.pair(a, a)
    }

    /// `-K . c`.
    pub fn anticanonical_degree(&self, c: &LatticeVector) -> Result<i64> {
        Ok(-self.gram.pair(&self.canonical, c)?)
    }

    pub(crate) fn pair_raw(&self, a: &[i64], b: &[i64]) -> i64 {
        // diag(1, -1, ..., -1)
        a[0] * b[0] - a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum::<i64>()
    }

    pub(crate) fn degree_raw(&self, c: &[i64]) -> i64 {
        3 * c[0] - c[1..].iter().sum::<i64>()
    }

    pub fn h(&self) -> LatticeVector {
        LatticeVector::unit(self.rank(), 0)
    }

    /// `E_i` for `1 <= i <= n`.
    pub fn e(&self, i: usize) -> LatticeVector {
        assert!((1..=self.n).contains(&i), "exceptional index {i} out of range");
        LatticeVector::unit(self.rank(), i)
    }

    /// Builds `a H - sum b_i E_i`.
    pub fn class(&self, a: i64, b: &[i64]) -> LatticeVector {
        assert_eq!(b.len(), self.n, "expected {} exceptional coefficients", self.n);
        let mut v = Vec::with_capacity(self.rank());
        v.push(a);
        v.extend(b.iter().map(|x| -x));
        LatticeVector(v)
    }

    pub fn check(&self, v: &LatticeVector) -> Result<()> {
        if v.len() != self.rank() {
            return Err(Error::domain(format!(
                "class {v} has length {} but the lattice has rank {}",
                v.len(),
                self.rank()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane() {
        let l = PicardLattice::new(0).unwrap();
        assert_eq!(l.rank(), 1);
        assert_eq!(l.degree(), 9);
        assert_eq!(l.canonical().coords(), &[-3]);
    }

    #[test]
    fn cubic_surface() {
        let l = PicardLattice::new(6).unwrap();
        assert_eq!(l.rank(), 7);
        assert_eq!(l.degree(), 3);
        let k = l.canonical().clone();
        assert_eq!(l.pair(&k, &k).unwrap(), 3);
        assert_eq!(l.anticanonical_degree(&l.anticanonical()).unwrap(), 3);
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(PicardLattice::new(9), Err(Error::Domain(_))));
        assert!(PicardLattice::of_degree(0).is_err());
    }

    #[test]
    fn pairings() {
        let l = PicardLattice::new(2).unwrap();
        let h = l.h();
        assert_eq!(l.pair(&h, &h).unwrap(), 1);
        let c = l.class(1, &[1, 1]);
        assert_eq!(l.square(&c).unwrap(), -1);
        assert!(l.pair(&c, &LatticeVector::new(vec![1, 0])).is_err());
    }

    #[test]
    fn low_degree_classes() {
        let l = PicardLattice::new(1).unwrap();
        assert_eq!(l.anticanonical_degree(&l.e(1)).unwrap(), 1);
        assert_eq!(l.anticanonical_degree(&l.class(1, &[1])).unwrap(), 2);
    }

    #[test]
    fn canonical_square_matches_degree() {
        for n in 0..=8 {
            let l = PicardLattice::new(n).unwrap();
            let k = l.canonical().clone();
            assert_eq!(l.square(&k).unwrap() + n as i64, 9);
        }
    }
}
