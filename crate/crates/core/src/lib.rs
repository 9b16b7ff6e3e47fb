//! Riemann-Liouville fractional calculus on uniform grids: operators, the
//! time-reflection dual, a catalog of integration-by-parts identities, and a
//! fractional variational solver.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod duality;
pub mod error;
pub mod fractional;
pub mod grid;
pub mod identities;
pub mod special;
pub mod variational;

pub use error::{Error, Result};
pub use grid::{make_grid, FractionalOrder, Grid, GridFunction, NormKind};
