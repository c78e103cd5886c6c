//! Asymmetry analysis for bilateral landmark shapes.
//!
//! A bilateral organism photographed or scanned as a set of labelled
//! landmarks is rarely perfectly symmetric. This crate quantifies how far
//! each shape departs from bilateral symmetry and tests whether one group
//! of shapes (say, a clinical group) is systematically more asymmetric
//! than another.
//!
//! The pipeline:
//!
//! 1. [`registration`] brings every configuration into a frame where the
//!    symmetry midplane is {x_1 = 0}, estimating the plane from the data
//!    when it is not known.
//! 2. [`features`] turns a registered configuration into elementary
//!    asymmetry features: signed per-coordinate differences between
//!    mirrored landmark pairs (and plane offsets of unpaired landmarks),
//!    their magnitudes, or per-landmark distances.
//! 3. [`scores`] aggregates features into per-subject scalar scores,
//!    optionally with data-driven weights.
//! 4. [`stats`] compares scores between two groups (t and rank tests) and
//!    selects individually asymmetric features with a bootstrap-calibrated
//!    union-intersection test.
//! 5. [`report`] and [`plot`] render deterministic tables and dot plots;
//!    [`io`] defines the landmark file format; [`synth`] generates
//!    synthetic cohorts with known planted asymmetry; [`cli`] wires it all
//!    into a command line tool.
//!
//! ```
//! use bilasym::model::{Configuration, PairingScheme};
//! use bilasym::features::{absolute_features, signed_features};
//! use bilasym::scores::ScoreSpec;
//!
//! // A quadrilateral with landmarks 1 and 3 mirrored across {x_1 = 0}
//! // and landmarks 2 and 4 on the midline (1-based labels).
//! let scheme = PairingScheme::from_one_based(&[(1, 3)], &[2, 4])?;
//! let shape = Configuration::from_rows(&[
//!     vec![-0.95, 0.36],
//!     vec![-0.28, 2.11],
//!     vec![0.99, 0.54],
//!     vec![-0.31, -1.37],
//! ])?;
//!
//! let signed = signed_features(&shape, &scheme)?;
//! let magnitudes = absolute_features(&signed);
//! let l2 = ScoreSpec::l2(magnitudes.len())?.evaluate(&magnitudes)?;
//! assert!((l2 - 0.2085).abs() < 1e-12);
//! # Ok::<(), bilasym::Error>(())
//! ```

pub mod cli;
pub mod error;
pub mod features;
pub mod io;
pub mod model;
pub mod plot;
pub mod registration;
pub mod report;
pub mod scores;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use model::{
    reflect_config, Configuration, FeatureIndex, FeatureKind, FeatureVector, PairingScheme,
    Plane, RegistrationMode, RigidMotion, TwoGroupDataset,
};
