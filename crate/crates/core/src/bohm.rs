//! Bohm trajectories for the Moshinsky half-plane wave and the chopped
//! coherent state.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::currents::{chopped_wavefunction_with_derivative, ChoppedState};
use crate::error::{Error, Result};
use crate::ode::{DormandPrince, Halt};
use crate::scalar::Real;
use crate::special::{erf, erfc_complex};
use crate::state::{Phase, SignChoice};

/// M(x, p, t) = ⟨x|e^{−iHt}θ(x̂)|p⟩ for a free particle (ħ = m = 1).
///
/// Closed form ½ e^{i(px − p²t/2)} erfc(−e^{−iπ/4}(x − pt)/√(2t)).
pub fn moshinsky<T: Real>(x: T, p: T, t: T) -> Result<Complex<T>> {
    Ok(moshinsky_with_derivative(x, p, t)?.0)
}

/// (M, ∂M/∂x).
pub fn moshinsky_with_derivative<T: Real>(x: T, p: T, t: T) -> Result<(Complex<T>, Complex<T>)> {
    if !(t >= T::zero()) {
        return Err(Error::InvalidInput(format!("Moshinsky time must be ≥ 0, got {t}")));
    }
    let half = T::lit(0.5);
    let plane = Complex::from_polar(T::one(), p * x);
    if t == T::zero() {
        let m = if x > T::zero() {
            plane
        } else if x < T::zero() {
            Complex::new(T::zero(), T::zero())
        } else {
            plane * half
        };
        return Ok((m, m * Complex::new(T::zero(), p)));
    }
    let rot = Complex::from_polar(T::one(), -T::FRAC_PI_4());
    let scale = (T::lit(2.0) * t).sqrt();
    let z = -rot * ((x - p * t) / scale);
    let front = Complex::from_polar(half, p * x - half * p * p * t);
    let m = front * erfc_complex(z);
    // d/dx erfc(z) = −(2/√π) e^{−z²} dz/dx, dz/dx = −e^{−iπ/4}/√(2t)
    let derf = (-z * z).exp() * rot * (T::lit(2.0) / (T::PI().sqrt() * scale));
    let dm = m * Complex::new(T::zero(), p) + front * derf;
    Ok((m, dm))
}

/// What the trajectories are guided by.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BohmSource<T> {
    /// Free half-plane wave with momentum p, time in units of the free evolution.
    Moshinsky { p: T },
    /// Chopped coherent state in the oscillator, time = phase θ.
    Chopped(ChoppedState<T>),
}

impl<T: Real> BohmSource<T> {
    /// (|ψ|², J) at (x, t).
    pub fn density_current(&self, x: T, t: T) -> Result<(T, T)> {
        let (psi, dpsi) = match *self {
            BohmSource::Moshinsky { p } => moshinsky_with_derivative(x, p, t)?,
            BohmSource::Chopped(cs) => chopped_wavefunction_with_derivative(cs, x, Phase(t))?,
        };
        Ok((psi.norm_sqr(), (psi.conj() * dpsi).im))
    }

    /// Guidance velocity J/|ψ|², or `None` below the density floor.
    pub fn velocity(&self, x: T, t: T, floor: T) -> Option<T> {
        let (rho, j) = self.density_current(x, t).ok()?;
        if rho < floor || !rho.is_finite() {
            return None;
        }
        Some(j / rho)
    }

    fn classical(&self, seed: T, t: T) -> T {
        match *self {
            BohmSource::Moshinsky { p } => seed + p * t,
            BohmSource::Chopped(cs) => {
                let (s, c) = t.sin_cos();
                seed * c + cs.parent.p0 * s
            }
        }
    }
}

/// Integration controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BohmOptions<T> {
    pub rtol: T,
    pub atol: T,
    pub density_floor: T,
    /// Trajectories start here rather than at the singular t = 0.
    pub t_start: T,
}

impl<T: Real> Default for BohmOptions<T> {
    fn default() -> Self {
        Self {
            rtol: T::lit(1e-8),
            atol: T::lit(1e-10),
            density_floor: T::lit(1e-12),
            t_start: T::lit(1e-7),
        }
    }
}

/// Trajectories on a common time grid. A path shorter than `times` stopped
/// early; `halted[k]` then holds the time and cause.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryBundle<T> {
    pub seeds: Vec<T>,
    pub times: Vec<T>,
    pub paths: Vec<Vec<T>>,
    pub classical_paths: Vec<Vec<T>>,
    pub halted: Vec<Option<(T, String)>>,
}

impl<T: Real> TrajectoryBundle<T> {
    /// First time each path reaches `level` (linear interpolation on the grid).
    pub fn first_crossings(&self, level: T) -> Vec<Option<T>> {
        self.paths.iter().map(|p| first_crossing(&self.times, p, level)).collect()
    }

    pub fn classical_first_crossings(&self, level: T) -> Vec<Option<T>> {
        self.classical_paths.iter().map(|p| first_crossing(&self.times, p, level)).collect()
    }
}

fn first_crossing<T: Real>(times: &[T], path: &[T], level: T) -> Option<T> {
    let side = |v: T| v > level;
    let start = side(*path.first()?);
    path.windows(2).zip(times.windows(2)).find_map(|(x, t)| {
        if side(x[1]) != start {
            let f = (level - x[0]) / (x[1] - x[0]);
            Some(t[0] + f * (t[1] - t[0]))
        } else {
            None
        }
    })
}

/// Integrates ẋ = J/|ψ|² from each seed; paths are sampled at `times`.
pub fn bohm_trajectories<T: Real>(
    source: BohmSource<T>,
    seeds: &[T],
    times: &[T],
    opts: &BohmOptions<T>,
) -> Result<TrajectoryBundle<T>> {
    if times.is_empty() || times.windows(2).any(|w| !(w[0] < w[1])) || !(times[0] >= opts.t_start) {
        return Err(Error::InvalidInput("times must be increasing and not before t_start".into()));
    }
    for (k, &s) in seeds.iter().enumerate() {
        if source.velocity(s, opts.t_start, opts.density_floor).is_none() {
            return Err(Error::DensityFloor {
                seed: k,
                theta: opts.t_start.as_f64(),
            });
        }
    }
    let dp = DormandPrince {
        rtol: opts.rtol,
        atol: opts.atol,
        ..DormandPrince::default()
    };
    let runs: Vec<(Vec<T>, Option<Halt<T>>)> = seeds
        .par_iter()
        .map(|&s| dp.solve(|t, x| source.velocity(x, t, opts.density_floor), opts.t_start, s, times))
        .collect();
    let mut paths = Vec::with_capacity(seeds.len());
    let mut halted = Vec::with_capacity(seeds.len());
    for (path, halt) in runs {
        halted.push(halt.map(|h| match h {
            Halt::Rhs { t, .. } => (t, "density below floor".to_string()),
            Halt::StepUnderflow { t } => (t, "step underflow".to_string()),
            Halt::TooManySteps { t } => (t, "step budget exhausted".to_string()),
        }));
        paths.push(path);
    }
    let classical_paths = seeds
        .iter()
        .map(|&s| times.iter().map(|&t| source.classical(s, t)).collect())
        .collect();
    Ok(TrajectoryBundle {
        seeds: seeds.to_vec(),
        times: times.to_vec(),
        paths,
        classical_paths,
        halted,
    })
}

/// Cumulative chopped density at θ = 0, normalized: F(x) = ∫_{−∞}^x |θψ|² / N.
pub fn initial_cumulative<T: Real>(cs: ChoppedState<T>, x: T) -> T {
    let x0 = cs.parent.x0;
    let half = T::lit(0.5);
    let norm = cs.norm();
    match cs.chop_sign {
        SignChoice::Plus => {
            if x <= T::zero() {
                T::zero()
            } else {
                half * (erf(x - x0) + erf(x0)) / norm
            }
        }
        SignChoice::Minus => {
            if x >= T::zero() {
                T::one()
            } else {
                half * (T::one() + erf(x - x0)) / norm
            }
        }
    }
}

/// Positions splitting the initial chopped density at the given fractions.
pub fn quantile_seeds<T: Real>(cs: ChoppedState<T>, fractions: &[T]) -> Result<Vec<T>> {
    let reach = cs.parent.x0.abs() + T::lit(12.0);
    fractions
        .iter()
        .map(|&u| {
            if !(u > T::zero() && u < T::one()) {
                return Err(Error::InvalidInput(format!("quantile fraction {u} outside (0, 1)")));
            }
            let (mut lo, mut hi) = match cs.chop_sign {
                SignChoice::Plus => (T::zero(), reach),
                SignChoice::Minus => (-reach, T::zero()),
            };
            for _ in 0..200 {
                let mid = T::lit(0.5) * (lo + hi);
                if initial_cumulative(cs, mid) < u {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= T::epsilon() * T::lit(4.0) * (T::one() + mid.abs()) {
                    break;
                }
            }
            Ok(T::lit(0.5) * (lo + hi))
        })
        .collect()
}

/// Equally spaced fractions k/(count+1), k = 1..count.
pub fn equal_fractions<T: Real>(count: usize) -> Vec<T> {
    (1..=count)
        .map(|k| T::from_usize_lossy(k) / T::from_usize_lossy(count + 1))
        .collect()
}
