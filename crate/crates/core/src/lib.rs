pub mod baselines;
pub mod cells;
pub mod cli;
pub mod error;
pub mod geom;
pub mod instance;
pub mod lp;
pub mod netfinder;
pub mod packing;
pub mod rng;
pub mod system;

pub use error::{Error, Result};
