//! Coherent states, phases and measurement signs.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Gaussian phase-space center in dimensionless units (x·√(ħ/mω) = x_phys).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherentState<T> {
    pub x0: T,
    pub p0: T,
}

impl<T: Real> CoherentState<T> {
    pub fn new(x0: T, p0: T) -> Result<Self> {
        if !(x0.is_finite() && p0.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite state ({x0}, {p0})")));
        }
        Ok(Self { x0, p0 })
    }

    /// α = (x0 + i p0)/√2.
    pub fn alpha(&self) -> Complex<T> {
        Complex::new(self.x0, self.p0) * T::FRAC_1_SQRT_2()
    }

    pub fn from_alpha(alpha: Complex<T>) -> Self {
        Self {
            x0: alpha.re * T::SQRT_2(),
            p0: alpha.im * T::SQRT_2(),
        }
    }

    /// Phase-space center at phase θ.
    pub fn trajectory(&self, theta: Phase<T>) -> (T, T) {
        classical_trajectory(*self, theta)
    }

    /// The parity image (−x0, −p0).
    pub fn reflected(&self) -> Self {
        Self {
            x0: -self.x0,
            p0: -self.p0,
        }
    }
}

/// θ = ωt in radians.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Phase<T>(pub T);

impl<T: Real> Phase<T> {
    pub fn new(theta: T) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite phase {theta}")));
        }
        Ok(Self(theta))
    }

    pub fn value(self) -> T {
        self.0
    }
}

impl<T> From<T> for Phase<T> {
    fn from(v: T) -> Self {
        Phase(v)
    }
}

/// Dichotomic measurement outcome s = ±1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignChoice {
    Plus,
    Minus,
}

impl SignChoice {
    pub const BOTH: [SignChoice; 2] = [SignChoice::Plus, SignChoice::Minus];

    pub fn value<T: Real>(self) -> T {
        match self {
            SignChoice::Plus => T::one(),
            SignChoice::Minus => -T::one(),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            SignChoice::Plus => SignChoice::Minus,
            SignChoice::Minus => SignChoice::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            SignChoice::Plus => '+',
            SignChoice::Minus => '-',
        }
    }

    pub fn parse(c: char) -> Option<Self> {
        match c {
            '+' => Some(SignChoice::Plus),
            '-' => Some(SignChoice::Minus),
            _ => None,
        }
    }
}

/// Classical path (x_θ, p_θ) through the state's center.
pub fn classical_trajectory<T: Real>(state: CoherentState<T>, theta: Phase<T>) -> (T, T) {
    let (s, c) = theta.0.sin_cos();
    (state.x0 * c + state.p0 * s, state.p0 * c - state.x0 * s)
}
