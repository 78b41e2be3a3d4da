//! Gaussian covariance-matrix toolkit for continuous-variable QKD.
//!
//! Builds the covariance matrices of one-way, two-way and floodlight
//! entanglement-based circuits over thermal-loss channels, evaluates
//! asymptotic reverse-reconciliation key rates, checks the `U(n)` covariance
//! of those states, and simulates heterodyne statistics.
//!
//! ```
//! use cvqkd::{build_two_way, key_rate, ChannelParams, TwoWayParams};
//!
//! let ch = ChannelParams::new(0.9, 0.05)?;
//! let state = build_two_way(&TwoWayParams::new(3.0, 3.0, 0.5, 1.2)?, ch, ch)?;
//! let report = key_rate(&state, 1.0)?;
//! assert!(report.key_rate > 0.0);
//! # Ok::<(), cvqkd::Error>(())
//! ```

pub mod channel;
pub mod error;
pub mod keyrate;
pub mod nelder_mead;
pub mod protocol;
pub mod simulator;
pub mod state;
pub mod symmetry;
pub mod symplectic;

pub use channel::{apply_channel, ChannelParams};
pub use error::{Error, Result};
pub use keyrate::{
    g_entropy, gaussian_mutual_information, holevo, key_rate, mutual_information, noise_threshold,
    optimize_rate, Bounds, KeyRateReport, Optimum, OptimizerConfig, Protocol, Threshold,
};
pub use protocol::{
    build_floodlight, build_mdi, build_one_way, build_two_way, FloodlightParams, OneWayNormalization,
    ProtocolKind, ProtocolState, TwoWayParams,
};
pub use simulator::{empirical_covariance, run_test, sample_outcomes, RunRecord, TestRegion};
pub use state::{quadrature_indices, su_mm_coherent_state, CovarianceMatrix, LambdaMatrix};
pub use symplectic::{symplectic_eigenvalues, ModeTag, SymplecticTransform};
