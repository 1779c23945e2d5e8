//! Inhomogeneous Galton-Watson trees (IGWTs): branching processes whose
//! offspring distribution depends on the generation.
//!
//! The crate covers the full modeling loop for tree-shaped network
//! topologies such as low-voltage electrical distribution grids:
//!
//! - offspring families on `{0, 2, 3, ...}` parametrized by mean and
//!   variance ([`offspring`]),
//! - generation-indexed mean and variance structures assembled into a
//!   [`ModelSpec`] ([`structure`]),
//! - exact and truncated analytical moments of vertex counts, leaf
//!   counts and tree height ([`moments`]),
//! - reproducible simulation of tree corpora ([`simulate`]),
//! - maximum-likelihood fitting from offspring tallies ([`estimate`]),
//! - goodness-of-fit reports comparing data, simulation and analytics
//!   ([`check`]).
//!
//! ```
//! use igwt::{moments, simulate, ModelSpec, SimConfig};
//!
//! let model = ModelSpec::reference();
//! let totals = moments::total_moments(&model, 1e-12).unwrap();
//! let trees = simulate::sample_ensemble(&model, 100, &SimConfig::new(7)).unwrap();
//! let mean_size = trees.iter().map(|t| t.len() as f64).sum::<f64>() / 100.0;
//! assert!((mean_size - totals.mean).abs() < 15.0);
//! ```
//!
//! Runnable walkthroughs for each capability live under `examples/`.

pub mod check;
pub mod corpus;
pub mod error;
pub mod estimate;
pub mod moments;
pub mod offspring;
pub mod optim;
pub mod simulate;
pub mod stats;
pub mod structure;
pub mod tree;

pub use error::{Error, Result};
pub use estimate::{fit, log_likelihood, FitOptions, FitResult, FitTemplate};
pub use moments::{moment_report, MomentReport};
pub use offspring::{MomentPair, NativeParams, OffspringFamily};
pub use simulate::SimConfig;
pub use stats::{tally, SufficientStats};
pub use structure::{ModelSpec, StructureKind, StructureSpec};
pub use tree::{OrderedTree, TreeSummary};
