//! Front end for `holobgs`: hologram generation, reconstruction, the GS/BGS
//! convergence benchmark and side-by-side comparisons, all driven by
//! serializable run manifests.

pub mod commands;
pub mod error;
pub mod manifest;

pub use commands::execute;
pub use error::{CliError, CliResult};
pub use manifest::RunManifest;
