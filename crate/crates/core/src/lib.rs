pub mod construction;
pub mod error;
pub mod fit;
pub mod lattice;
pub mod littlewood_paley;
pub mod region;
pub mod solver;
pub mod spectral;
pub mod trilinear;

pub use error::{LabError, Result};
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
