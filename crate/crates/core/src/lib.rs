pub mod cli;
pub mod denoise;
pub mod error;
pub mod eval;
pub mod geom;
pub mod junction;
pub mod material;
pub mod netgraph;
pub mod raster;
pub mod simplify;
pub mod skeleton;

pub use error::{Error, Result};
