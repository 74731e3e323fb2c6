pub mod combmap;
pub mod error;
pub mod exactalg;
pub mod fisher;
pub mod ising;
pub mod kacward;
pub mod kasteleyn;
pub mod zeta;

pub use error::{Error, Result};
