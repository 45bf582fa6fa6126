//! Analytic harmonic-oscillator layer.
//!
//! Everything here is in dimensionless units (ħ = m = spring constant = 1), so
//! the oscillator Hamiltonian is `ĥ = p̂²/2 + x̂²/2` with eigenvalues `n + 1/2`.
//! Hermite polynomials follow the physicists' convention (leading coefficient
//! `2^n`), which is the one matching the normalization `(2^n n! √π)^{-1/2}`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::OscillatorError;
use crate::exactalg::Rational;

/// Relative magnitude below which samples are ignored when counting nodes.
///
/// Gaussian tails flip sign on roundoff noise alone; anything smaller than
/// this fraction of the largest sample is treated as zero.
pub const NODE_THRESHOLD: f64 = 1e-9;

/// Quantum number `n` of an oscillator eigenstate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LevelIndex(pub u32);

impl LevelIndex {
    pub fn new(n: u32) -> Self {
        LevelIndex(n)
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Oscillator energy `n + 1/2`, exact.
    pub fn energy(self) -> Rational {
        oscillator_energy(self)
    }
}

impl From<u32> for LevelIndex {
    fn from(n: u32) -> Self {
        LevelIndex(n)
    }
}

impl fmt::Display for LevelIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Physicists' Hermite polynomial with exact integer monomial coefficients,
/// lowest power first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermitePoly {
    n: u32,
    coefficients: Vec<BigInt>,
}

impl HermitePoly {
    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Monomial coefficients, `coefficients()[k]` multiplies `x^k`.
    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    /// Horner evaluation in floating point.
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    /// `Σ |c_k| |x|^k`, the natural scale for judging evaluation error.
    pub fn abs_eval(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * ax + c.to_f64().unwrap_or(f64::NAN).abs())
    }
}

/// One sample `φ_n(x)` of an eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavefunctionSample {
    pub x: f64,
    pub value: f64,
}

impl WavefunctionSample {
    pub fn new(n: LevelIndex, x: f64) -> Result<Self, OscillatorError> {
        Ok(WavefunctionSample {
            x,
            value: eigenfunction_value(n, x)?,
        })
    }
}

/// `h_n = n + 1/2`.
pub fn oscillator_energy(n: LevelIndex) -> Rational {
    Rational::new(BigInt::from(2 * u64::from(n.0) + 1), BigInt::from(2))
}

/// Builds `η_n` from `η_{k+1} = 2x η_k − 2k η_{k−1}`.
pub fn hermite(n: LevelIndex) -> HermitePoly {
    let n = n.0;
    let mut prev: Vec<BigInt> = vec![BigInt::from(1)];
    if n == 0 {
        return HermitePoly { n, coefficients: prev };
    }
    let mut cur: Vec<BigInt> = vec![BigInt::zero(), BigInt::from(2)];
    for k in 1..n {
        let mut next = vec![BigInt::zero(); cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c * 2;
        }
        let two_k = BigInt::from(2 * u64::from(k));
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c * &two_k;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    HermitePoly { n, coefficients: cur }
}

// Rescale the recurrence state when it leaves [2^-400, 2^400].
const RESCALE_HIGH: f64 = 2.58e120;
const RESCALE_LOW: f64 = 3.87e-121;

/// Normalized eigenfunction `φ_n(x) = (2^n n! √π)^{-1/2} e^{-x²/2} η_n(x)`.
///
/// Evaluated through the normalized three-term recurrence
/// `φ_{k+1} = √(2/(k+1)) x φ_k − √(k/(k+1)) φ_{k−1}` with the Gaussian
/// factored out and carried as a logarithm, so neither factorials nor raw
/// Hermite values ever appear.
pub fn eigenfunction_value(n: LevelIndex, x: f64) -> Result<f64, OscillatorError> {
    if !x.is_finite() {
        return Err(OscillatorError::NonFiniteInput { x });
    }
    let n = n.0;
    // log of the scale factor pulled out of (prev, cur), starting from the Gaussian
    let mut log_scale = -0.5 * x * x;
    let mut prev = 0.0_f64;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    for k in 0..n {
        let kf = f64::from(k);
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        let mag = cur.abs().max(prev.abs());
        if mag > RESCALE_HIGH || (mag < RESCALE_LOW && mag > 0.0) {
            let s = mag.ln();
            cur /= mag;
            prev /= mag;
            log_scale += s;
        }
    }
    if cur == 0.0 {
        return Ok(0.0);
    }
    let log_mag = cur.abs().ln() + log_scale;
    if log_mag > f64::MAX.ln() {
        return Err(OscillatorError::Range {
            n,
            x,
            log_magnitude: log_mag,
        });
    }
    Ok(cur.signum() * log_mag.exp())
}

/// Number of nodes of `φ_n`, i.e. `n`.
pub fn analytic_node_count(n: LevelIndex) -> usize {
    n.0 as usize
}

/// Counts sign changes between consecutive samples, skipping samples whose
/// magnitude is at most [`NODE_THRESHOLD`] times the largest one.
pub fn count_sign_changes(values: &[f64]) -> usize {
    let max = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return 0;
    }
    let threshold = NODE_THRESHOLD * max;
    let mut last: Option<bool> = None;
    let mut changes = 0;
    for v in values.iter().filter(|v| v.abs() > threshold) {
        let positive = *v > 0.0;
        if let Some(prev) = last {
            if prev != positive {
                changes += 1;
            }
        }
        last = Some(positive);
    }
    changes
}
