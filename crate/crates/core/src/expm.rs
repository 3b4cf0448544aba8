//! Dense complex matrix exponential: scaling and squaring with a degree-13
//! diagonal Padé approximant.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

type CMat = DMatrix<Complex64>;

const THETA_13: f64 = 5.371_920_351_148_152;

const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Largest absolute column sum.
pub fn one_norm(a: &CMat) -> f64 {
    a.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Number of squarings used for `exp(a)`.
pub fn squaring_count(norm: f64) -> u32 {
    if norm <= THETA_13 {
        0
    } else {
        (norm / THETA_13).log2().ceil().max(0.0) as u32
    }
}

/// `exp(a)` for a square complex matrix.
pub fn expm(a: &CMat) -> Result<CMat> {
    if !a.is_square() {
        return Err(Error::InvalidArgument("expm needs a square matrix".into()));
    }
    let n = a.nrows();
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(Error::Numeric("non-finite matrix passed to expm".into()));
    }
    let sq = squaring_count(norm);
    let b = a * Complex64::new(0.5f64.powi(sq as i32), 0.0);
    let id = CMat::identity(n, n);
    let b2 = &b * &b;
    let b4 = &b2 * &b2;
    let b6 = &b4 * &b2;
    let c = |i: usize| Complex64::new(PADE_13[i], 0.0);

    let inner_u = &b6 * c(13) + &b4 * c(11) + &b2 * c(9);
    let u = &b * (&b6 * inner_u + &b6 * c(7) + &b4 * c(5) + &b2 * c(3) + &id * c(1));
    let inner_v = &b6 * c(12) + &b4 * c(10) + &b2 * c(8);
    let v = &b6 * inner_v + &b6 * c(6) + &b4 * c(4) + &b2 * c(2) + &id * c(0);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or_else(|| Error::Numeric("singular Padé denominator".into()))?;
    for _ in 0..sq {
        r = &r * &r;
    }
    if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numeric("matrix exponential produced non-finite entries".into()));
    }
    Ok(r)
}
