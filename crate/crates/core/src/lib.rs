//! Hilbert geometry of model properly convex cusp domains, the cusp Lie group
//! families and their normalization, and the figure-eight holonomy family.

pub mod cusplie;
pub mod cuspvol;
pub mod domains;
pub mod fig8;
pub mod hilbert;
pub mod projlin;
pub mod selftest;

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
