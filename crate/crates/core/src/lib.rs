//! Controlled homotopy equivalences from simplicial maps with contractible
//! point inverses.

pub mod cellulation;
pub mod complex;
pub mod cone;
pub mod contractibility;
pub mod controlled;
pub mod error;
pub mod fixtures;
pub mod fiber;
pub mod homology;
pub mod homotopy;
pub mod io;
pub mod map;
pub mod metric;
pub mod svg;
pub mod verify;

pub use complex::{closure_complex, Point, Simplex, SimplicialComplex, TOL};
pub use error::{Error, Result};
pub use map::SimplicialMap;
