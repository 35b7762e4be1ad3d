//! Panel econometrics for labor-share analysis.
//!
//! The crate covers the full pipeline: ingesting industry panel and
//! industrial-relations data, deriving regression variables (labor share,
//! capital-output ratio, growth-accounting TFP, employment growth), building
//! qualitative bargaining indices from a coded legal-text codebook, and
//! estimating the share-capital model by fixed effects, 2SLS, and system GMM
//! with overidentification and serial-correlation diagnostics, elasticity
//! mapping, and regression-table rendering.

pub mod derive;
pub mod diagnostics;
pub mod dist;
pub mod elasticity;
pub mod error;
pub mod estimators;
pub mod ingest;
pub mod irlex;
pub mod linalg;
pub mod panel;
pub mod report;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
pub use panel::{Dimension, GroupSpec, ObsKey, PanelFrame};
