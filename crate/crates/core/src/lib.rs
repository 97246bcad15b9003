//! Nonlinear Doebner-Goldin quantum dynamics on a periodic 1D lattice.
//!
//! The nonlinear flow is realized by conjugating linear Schrödinger evolution
//! with the gauge intertwiner `N_D`; nonlinear observables are the
//! `N_D`-conjugated position and momentum spectral measures.

pub mod dump;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod gauge;
pub mod gpvm;
pub mod grid;
pub mod interval;
pub mod propagators;
pub mod spectral;

pub use error::{Error, Result};
pub use gauge::{apply_gauge, gauge_inverse_check, GaugeParam};
pub use grid::{
    density_current, inner_product, normalize, partial_statistic, tensor_product, Amplitudes,
    DensityCurrent, Grid1D, WaveFn, WaveFn2,
};
pub use interval::{Interval, IntervalSet, Partition};
pub use propagators::{
    free_evolve, momentum_projection, position_projection, split_step_evolve, Potential,
    PotentialShape, Scheme, StepConfig,
};
