//! Discrete evolutions `du/dt = A u` driven by block-banded lattice operators.
//!
//! The crate bundles the numerical pieces needed to study how fast a solution
//! of such an evolution may decay at two different times:
//!
//! * [`lattice_ops`] builds finite-window banded operators and audits their
//!   band constants.
//! * [`special_fn`] provides integer-order Bessel functions (Miller recurrence)
//!   and log-domain decay envelopes.
//! * [`evolution`] propagates states with a dense Padé matrix exponential and
//!   evaluates closed-form Bessel model solutions.
//! * [`eigen_engine`] extends generalized eigenvectors of `A*` from seed blocks
//!   and audits their growth in the band index.
//! * [`favard`] builds the polynomial families that reproduce coordinate
//!   vectors and evaluates moment functionals.
//! * [`uniqueness_probe`] pairs solutions with eigenvector families, checks the
//!   exponential identity in time, fits indicator slopes and classifies decay.
//! * [`stationary`] bounds the decay rate of kernel vectors and of lattice
//!   Schrödinger eigenfunctions.
//!
//! Experiment configuration, reports and the acceptance suite used by the
//! `discevo` binary live in [`config`], [`experiments`] and [`acceptance`].
//!
//! ```
//! use discrete_evolution::lattice_ops::build_laplacian_1d;
//! use discrete_evolution::state::{LatticeState, Window};
//! use num_complex::Complex64;
//!
//! let w = Window::centered(3);
//! let lap = build_laplacian_1d(Complex64::new(1.0, 0.0), w).unwrap();
//! let y = lap.apply(&LatticeState::delta(w, 0, 0.0).unwrap()).unwrap();
//! assert_eq!(y.at(0).re, -2.0);
//! assert_eq!(y.at(1).re, 1.0);
//! ```

pub mod acceptance;
pub mod config;
pub mod eigen_engine;
pub mod error;
pub mod evolution;
pub mod experiments;
pub mod expm;
pub mod favard;
pub mod lattice_ops;
pub mod sampling;
pub mod special_fn;
pub mod state;
pub mod stationary;
pub mod stats;
pub mod uniqueness_probe;

pub use error::{Error, Result};
pub use lattice_ops::{BandConstants, BandedOperator};
pub use state::{LatticeState, Window};
