//! Local dynamics of holomorphic germs of `(C^2, 0)` with one neutral and one
//! attracting eigenvalue.

pub mod beltrami;
pub mod error;
pub mod germ;
pub mod invariant_sets;
pub mod io;
pub mod manifolds;
pub mod normal_forms;
pub mod petals;
pub mod rotation;
pub mod series;

pub use error::{Error, Result};
pub use germ::{Germ2, Point2};
pub use series::{Coeff, Complex, Series1, Series2};
