//! Finite-space imprecise-probability inference.
//!
//! The crate models beliefs as credal sets (finite extreme-point lists of
//! probability mass vectors) on product spaces, conditions them by regular
//! extension, and updates them under incomplete observations with the
//! conservative inference rule: data coarsened by an unknown process is
//! handled by enumerating its completions, data coarsened at random by
//! ordinary conditioning. On top of the engine sit three pipelines:
//! credal/Bayesian-network queries with incompleteness-tagged evidence,
//! imprecise-Beta parametric inference over incomplete paired samples, and
//! a cautious set-valued classifier.

pub mod classifier;
pub mod cir;
pub mod cohgraph;
pub mod conditional;
pub mod config;
pub mod credal;
pub mod error;
pub mod gamble;
pub mod incompleteness;
pub mod lp;
pub mod net;
pub mod parametric;
pub mod prevision;
pub mod products;
pub mod space;

pub use config::Config;
pub use credal::CredalSet;
pub use error::{Error, Result};
pub use gamble::Gamble;
pub use prevision::LinearPrevision;
pub use space::{Event, ProductSpace, VariableSpec};
