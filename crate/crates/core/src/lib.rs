pub mod error;
pub mod junction;
pub mod lead_green;
pub mod plane_green;
pub mod resolvent;
pub mod scattering;
pub mod specfun;
pub mod spectrum;

pub use error::{Error, Result};
