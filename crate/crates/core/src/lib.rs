//! Open-system exciton dynamics under spectrally filtered sunlight.
//!
//! The crate covers the whole pipeline used to design semi-transparent
//! organic PV filters for agrivoltaic greenhouses: exciton Hamiltonians and
//! structured baths ([`system`], [`bath`]), reduced density-matrix dynamics
//! ([`dynamics`]), solar spectra and filter profiles ([`illumination`]),
//! transport and quantum-information metrics ([`metrics`]), the PCE/ETR
//! Pareto search ([`optimizer`]), site climate and soiling ([`environment`]),
//! reactivity-based eco-design scores ([`ecodesign`]) and a numerical
//! validation harness ([`validation`]).
//!
//! Units: energies in cm⁻¹, times in fs, wavelengths in nm.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod density;
pub mod dynamics;
pub mod ecodesign;
pub mod environment;
pub mod error;
pub mod illumination;
pub mod io;
pub mod metrics;
pub mod optimizer;
pub mod system;
pub mod trajectory;
pub mod units;
pub mod validation;

pub use bath::{BathSpec, VibronicMode};
pub use density::{thermal_state, DensityMatrix};
pub use dynamics::{propagate, HierarchyConfig, Method, SbdConfig};
pub use error::{Error, Result};
pub use system::{apply_static_disorder, build_fmo_system, ExcitonSystem};
pub use trajectory::Trajectory;

pub type C64 = num_complex::Complex64;
pub type CMatrix = nalgebra::DMatrix<C64>;
pub type RMatrix = nalgebra::DMatrix<f64>;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
