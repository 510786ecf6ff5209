//! Volume functionals for divisor and curve classes on varieties presented by
//! numerical data: an intersection form together with nef and
//! pseudo-effective cones.

pub mod algebra;
pub mod cones;
pub mod cycle_volume;
pub mod divisor_volume;
pub mod error;
pub mod optimize;
pub mod toric;
pub mod varieties;
pub mod verify;
pub mod zariski_surface;

pub use error::{Error, Result};
