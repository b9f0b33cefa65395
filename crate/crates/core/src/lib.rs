//! Lattice, group, threshold and counting computations for del Pezzo
//! fibrations over the projective line.

pub mod arith;
pub mod cone;
pub mod curves;
pub mod error;
pub mod fujita;
pub mod lattice;
pub mod lp;
pub mod manin;
pub mod profile;
pub mod report;
pub mod ruled;
pub mod thresholds;
pub mod weyl;

pub use cone::Cone;
pub use error::{Error, Result};
pub use lattice::{Gram, LatticeVector, PicardLattice};
