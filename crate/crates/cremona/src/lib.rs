//! Exact combinatorial engine for plane curves and linear systems under
//! Cremona transformations.
//!
//! Systems are degree (or a class `kE + hF` on `F_n`) plus multiplicities on
//! a proximity forest of points. Everything is integer arithmetic on Picard
//! lattices; generic position of points is assumed unless declared.

pub mod cluster;
pub mod error;
pub mod factorize;
pub mod io;
pub mod lattice;
pub mod minimize;
pub mod model;
pub mod notation;
pub mod par;
pub mod systems;
pub mod transforms;

pub use error::{Error, Result};
