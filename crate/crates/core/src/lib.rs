//! Three identical bosons on a line with contact repulsion `c` and a
//! short-range three-body potential, solved in hyperspherical coordinates.
//!
//! Units: `hbar = 1`, particle mass `1/2`. The pipeline runs
//! [`channels`] (hyperangular eigenvalues) → [`radial`] (lowest-channel
//! hyperradial equation) → [`scattering`] (partial amplitude `f0`), with
//! [`couplings`] quantifying the dropped non-adiabatic terms and [`wkb`]
//! supplying the quasiclassical constant used by the closed-form amplitude.

pub mod channels;
pub mod couplings;
pub mod error;
pub mod fit;
pub mod par;
mod potential;
pub mod quad;
pub mod radial;
pub mod scattering;
pub mod specfun;
pub mod wkb;

pub use channels::{solve_lambda, AdiabaticChannel, ChannelEigenvalue, HyperCoords};
pub use couplings::{adiabaticity_report, coupling_matrices, CouplingMatrices};
pub use error::{Error, Result};
pub use par::Execution;
pub use radial::{
    construct_f_basis, integrate_radial, match_ratio, MatchResult, ModelPotential, RadialOptions, RadialSolution,
    ThreeBodyPotential,
};
pub use scattering::{
    analytic_amplitude, extract_amplitude, numeric_amplitude, scaling_sweep, Amplitude, AnalyticAmplitudeParams,
    KRange, SweepMode, SweepResult,
};
pub use specfun::CylinderOrder;
pub use wkb::{xi_constant, XiEstimate};

pub use num_complex::Complex64;
