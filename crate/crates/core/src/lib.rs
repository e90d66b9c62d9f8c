//! Census engine for prime periodic orbits of symbolic flow models.
//!
//! A flow model is a strongly connected directed graph whose edges carry a
//! positive traversal time and an integer homology weight vector. Its prime
//! periodic orbits are the primitive closed edge walks up to rotation; each
//! orbit has a length (sum of edge times) and a homology class (sum of edge
//! weights). This crate enumerates every orbit up to a length cutoff, counts
//! orbits and ordered orbit pairs by homology class, computes the
//! thermodynamic constants of the model (entropy, winding cycle, entropy
//! Hessian), and evaluates the Gaussian local-limit and pair-correlation
//! predictions those constants determine.
//!
//! The pipeline is:
//!
//! 1. [`model`] — define and validate a [`MarkovFlowModel`], work with
//!    homology lattice coordinates.
//! 2. [`census`] — enumerate orbits into an [`OrbitTable`] and query the
//!    counting functions.
//! 3. [`thermo`] — solve for pressure, entropy and the winding cycle;
//!    assemble a [`ThermoSummary`].
//! 4. [`asymptotics`] — evaluate the Gaussian-side predictions.
//! 5. [`report`] — compare measured counts against predictions in a
//!    [`CensusReport`].
//!
//! The `orbitpair` command-line tool (a separate crate in this workspace)
//! drives the same pipeline from model files on disk. A longer guide with
//! worked examples lives in the `book/` directory of the repository.

pub mod asymptotics;
pub mod census;
pub mod error;
pub mod model;
pub mod numeric;
pub mod report;
pub mod thermo;

pub use asymptotics::BoxRegion;
pub use census::{CensusOptions, OrbitTable, PrimeOrbit};
pub use error::Error;
pub use model::{HomologyClass, MarkovFlowModel, ValidationReport};
pub use report::CensusReport;
pub use thermo::ThermoSummary;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
