//! Seeded random operators, potentials and states for experiments and tests.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::lattice_ops::{scalar_block, BandedOperator, Block};
use crate::state::{LatticeState, Window};

/// Magnitude limits for random banded operators.
///
/// External entries get magnitudes in `[min_external, max_external]`, all other
/// entries magnitudes in `[0, max_entry]`; phases are uniform.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorLimits {
    pub max_entry: f64,
    pub min_external: f64,
    pub max_external: f64,
}

impl Default for OperatorLimits {
    fn default() -> Self {
        Self { max_entry: 2.0, min_external: 0.5, max_external: 2.0 }
    }
}

/// Independent sub-generator for trial `index` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index + 1);
    rng
}

pub fn random_phase<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

pub fn random_complex<R: Rng>(rng: &mut R, max_abs: f64) -> Complex64 {
    random_phase(rng) * rng.gen_range(0.0..=max_abs)
}

/// Random scalar (`m = 1`) operator with half-bandwidth `s`.
pub fn random_scalar_operator<R: Rng>(rng: &mut R, s: usize, window: Window, limits: &OperatorLimits) -> BandedOperator {
    let si = s as i64;
    BandedOperator::new(s, 1, window, |j, k| {
        let z = if (j - k).abs() == si {
            random_phase(rng) * rng.gen_range(limits.min_external..=limits.max_external)
        } else {
            random_complex(rng, limits.max_entry)
        };
        scalar_block(z)
    })
    .expect("external magnitudes are bounded away from zero")
}

/// Random `m x m` block with entries of modulus at most `max_abs`.
pub fn random_block<R: Rng>(rng: &mut R, m: usize, max_abs: f64) -> Block {
    DMatrix::from_fn(m, m, |_, _| random_complex(rng, max_abs))
}

/// Real potential with values uniform in `[-bound, bound]`.
pub fn random_potential<R: Rng>(rng: &mut R, window: Window, bound: f64) -> Vec<f64> {
    (0..window.len()).map(|_| rng.gen_range(-bound..=bound)).collect()
}

/// State with independent complex standard-normal-ish components (uniform disc).
pub fn random_state<R: Rng>(rng: &mut R, window: Window, m: usize) -> LatticeState {
    let values = (0..window.len() * m).map(|_| random_complex(rng, 1.0)).collect();
    LatticeState::from_values(window, m, 0.0, values).expect("shape matches")
}

/// Seeds for a generalized eigenvector: `2s` blocks of dimension `m`.
pub fn random_seeds<R: Rng>(rng: &mut R, s: usize, m: usize) -> Vec<Vec<Complex64>> {
    (0..2 * s).map(|_| (0..m).map(|_| random_complex(rng, 1.0)).collect()).collect()
}
