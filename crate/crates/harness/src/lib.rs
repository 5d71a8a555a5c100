//! Experiment engine for the large-array single-carrier receiver: seeded
//! Monte Carlo SER sweeps, the residual-ISI check against its closed form,
//! decision-point SNR calibration, CSV output and the `lsasc` command line.

pub mod analyze;
pub mod calibration;
pub mod cli;
pub mod config;
pub mod csv;
pub mod error;
pub mod experiment;
pub mod isi;

pub use config::{ConfigBuilder, Correlation, ExperimentConfig, ExperimentKind, ProfileSpec, SweepPoint};
pub use csv::{emit_csv, to_csv};
pub use error::{HarnessError, Result};
pub use experiment::{run_ser_experiment, SerPoint};
pub use isi::{run_isi_validation, IsiValidation};
