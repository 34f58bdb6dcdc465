//! Chopped-state wavefunctions and currents, sequential probabilities,
//! the current route to q(−,+), and the small-time series.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lg::QpValue;
use crate::quad::GaussKronrod;
use crate::scalar::Real;
use crate::special::{erf, faddeeva, factorial, gamma_half};
use crate::state::{classical_trajectory, CoherentState, Phase, SignChoice};

/// The post-measurement state θ(±x̂)|α⟩ at θ = 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChoppedState<T> {
    pub parent: CoherentState<T>,
    pub chop_sign: SignChoice,
}

impl<T: Real> ChoppedState<T> {
    pub fn new(parent: CoherentState<T>, chop_sign: SignChoice) -> Self {
        Self { parent, chop_sign }
    }

    /// ½(1 + s erf(x0)).
    pub fn norm(&self) -> T {
        T::lit(0.5) * (T::one() + self.chop_sign.value::<T>() * erf(self.parent.x0))
    }
}

/// A current in units of ω.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurrentSample<T> {
    pub theta: Phase<T>,
    pub value: T,
}

/// I_± = ∫ over the ± half-line of exp(−(y−a)²/2 + i b y + i c y²) dy.
pub fn chopped_gaussian_integral<T: Real>(sign: SignChoice, a: T, b: T, c: T) -> Complex<T> {
    let big_a = Complex::new(T::lit(0.5), -c);
    let big_b = Complex::new(a, b);
    let sa = big_a.sqrt();
    let z = big_b / (sa * T::lit(2.0));
    let iz = Complex::new(-z.im, z.re);
    let w = match sign {
        SignChoice::Plus => faddeeva(-iz),
        SignChoice::Minus => faddeeva(iz),
    };
    w * (T::PI().sqrt() * (-a * a * T::lit(0.5)).exp()) / (sa * T::lit(2.0))
}

fn caustic_guard<T: Real>(theta: T) -> Result<T> {
    let s = theta.sin();
    let k = (theta / T::PI()).round();
    let gap = (theta - k * T::PI()).abs();
    let floor = if k == T::zero() {
        T::min_positive_value() * T::lit(1e3)
    } else {
        T::lit(1e3) * T::epsilon() * theta.abs()
    };
    if s == T::zero() || gap <= floor {
        return Err(Error::Caustic { theta: theta.as_f64() });
    }
    Ok(s)
}

/// Propagator prefactor (2πi sin θ)^{−1/2} π^{−1/4} with the Maslov phase.
fn prefactor<T: Real>(theta: T, sin_t: T) -> Complex<T> {
    let k = (theta / T::PI()).floor();
    let phase = -T::FRAC_PI_4() - T::FRAC_PI_2() * k;
    Complex::from_polar(T::one(), phase)
        / (T::lit(2.0) * T::PI() * sin_t.abs()).sqrt()
        * T::PI().powf(T::lit(-0.25))
}

/// φ^±(x, θ) and ∂φ^±/∂x.
pub fn chopped_wavefunction_with_derivative<T: Real>(
    cs: ChoppedState<T>,
    x: T,
    theta: Phase<T>,
) -> Result<(Complex<T>, Complex<T>)> {
    let t = theta.0;
    let sin_t = caustic_guard(t)?;
    let cot = t.cos() / sin_t;
    let (a, p0) = (cs.parent.x0, cs.parent.p0);
    let b = p0 - x / sin_t;
    let c = T::lit(0.5) * cot;
    let i = chopped_gaussian_integral(cs.chop_sign, a, b, c);
    let big_a = Complex::new(T::lit(0.5), -c);
    let big_b = Complex::new(a, b);
    let edge = cs.chop_sign.value::<T>() * (-a * a * T::lit(0.5)).exp();
    let di_db = Complex::new(T::zero(), T::one()) * (big_b * i + edge) / (big_a * T::lit(2.0));
    let front = prefactor(t, sin_t) * Complex::from_polar(T::one(), x * x * c);
    let phi = front * i;
    let dphi = front * (Complex::new(T::zero(), x * cot) * i - di_db / sin_t);
    Ok((phi, dphi))
}

/// φ^±_α(x, θ), the chopped coherent state evolved to phase θ.
pub fn chopped_wavefunction<T: Real>(cs: ChoppedState<T>, x: T, theta: Phase<T>) -> Result<Complex<T>> {
    Ok(chopped_wavefunction_with_derivative(cs, x, theta)?.0)
}

/// J_±(x, θ) = Im(φ* ∂φ/∂x).
pub fn chopped_current<T: Real>(cs: ChoppedState<T>, x: T, theta: Phase<T>) -> Result<CurrentSample<T>> {
    let (phi, dphi) = chopped_wavefunction_with_derivative(cs, x, theta)?;
    Ok(CurrentSample {
        theta,
        value: (phi.conj() * dphi).im,
    })
}

/// Classical (Liouville) flux through the origin of the chopped Wigner ensemble.
pub fn classical_chopped_current<T: Real>(cs: ChoppedState<T>, theta: Phase<T>) -> CurrentSample<T> {
    let (x0, p0) = (cs.parent.x0, cs.parent.p0);
    let (xt, g) = classical_trajectory(cs.parent, theta);
    let sg = theta.0.sin().signum();
    let s = cs.chop_sign.value::<T>();
    let value = (-s * sg * (-x0 * x0 - p0 * p0).exp()
        + T::PI().sqrt() * (-xt * xt).exp() * g * (T::one() - s * sg * erf(g)))
        / (T::lit(2.0) * T::PI());
    CurrentSample { theta, value }
}

/// J(x, θ) = p_θ e^{−(x−x_θ)²}/√π for the unmeasured coherent state.
pub fn free_current<T: Real>(state: CoherentState<T>, x: T, theta: Phase<T>) -> CurrentSample<T> {
    let (xt, pt) = classical_trajectory(state, theta);
    let d = x - xt;
    CurrentSample {
        theta,
        value: pt * (-d * d).exp() / T::PI().sqrt(),
    }
}

/// p12(s1, s2): chop with s1 at θ = 0, find the s2 side at θ2.
pub fn sequential_prob<T: Real>(state: CoherentState<T>, s1: SignChoice, s2: SignChoice, theta2: Phase<T>) -> Result<T> {
    caustic_guard(theta2.0)?;
    let cs = ChoppedState::new(state, s1);
    let quad = GaussKronrod::new(T::lit(1e-12), T::lit(1e-11));
    let density = |x: T| {
        chopped_wavefunction(cs, x, theta2)
            .map(|v| v.norm_sqr())
            .unwrap_or_else(|_| T::nan())
    };
    let r = match s2 {
        SignChoice::Plus => quad.integrate_upper(density, T::zero())?,
        SignChoice::Minus => quad.integrate_lower(density, T::zero())?,
    };
    Ok(r.value)
}

/// ½(J_− − J_+ + 𝕁_+ + 𝕁_−) at the origin; its integral from 0 is q(−,+).
pub fn qp_current_combination<T: Real>(state: CoherentState<T>, theta: Phase<T>) -> Result<T> {
    let minus = ChoppedState::new(state, SignChoice::Minus);
    let plus = ChoppedState::new(state, SignChoice::Plus);
    let jm = chopped_current(minus, T::zero(), theta)?.value;
    let jp = chopped_current(plus, T::zero(), theta)?.value;
    let cl = classical_chopped_current(plus, theta).value + classical_chopped_current(minus, theta).value;
    Ok(T::lit(0.5) * (jm - jp + cl))
}

/// q(−,+) at (0, θ2) by integrating currents at the origin.
///
/// The (tan θ)^{−1/2} start-up singularity is removed by θ = u².
pub fn qp_via_currents<T: Real>(state: CoherentState<T>, theta2: Phase<T>) -> Result<QpValue<T>> {
    let t2 = theta2.0;
    if !(t2 > T::zero() && t2 < T::PI()) {
        return Err(Error::InvalidInput(format!("θ2 must lie in (0, π), got {t2}")));
    }
    let quad = GaussKronrod::new(T::lit(1e-11), T::lit(1e-10));
    let mut failure = None;
    let r = quad.integrate(
        |u: T| match qp_current_combination(state, Phase(u * u)) {
            Ok(v) => T::lit(2.0) * u * v,
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        },
        T::zero(),
        t2.sqrt(),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(QpValue {
        value: r.value,
        terms_used: r.evaluations,
        residual: r.error,
    })
}

/// ψ^{(n)}(0) for n = 0..count of the coherent state at θ = 0.
pub fn coherent_derivatives<T: Real>(state: CoherentState<T>, count: usize) -> Vec<Complex<T>> {
    let beta = Complex::new(state.x0, state.p0);
    let scale = T::PI().powf(T::lit(-0.25)) * (-state.x0 * state.x0 * T::lit(0.5)).exp();
    let mut he = Vec::with_capacity(count + 1);
    he.push(Complex::new(T::one(), T::zero()));
    if count >= 1 {
        he.push(beta);
    }
    for n in 1..count {
        let next = beta * he[n] - he[n - 1] * T::from_usize_lossy(n);
        he.push(next);
    }
    he.into_iter().map(|h| h * scale).collect()
}

/// K_±(n) = (±1)^n 2^{(n−1)/2} e^{iπ(n+1)/4} Γ((n+1)/2).
pub fn k_coeff<T: Real>(sign: SignChoice, n: usize) -> Complex<T> {
    let s = if sign == SignChoice::Minus && n % 2 == 1 { -T::one() } else { T::one() };
    let mag = T::lit(2.0).powf((T::from_usize_lossy(n) - T::one()) * T::lit(0.5)) * gamma_half::<T>(n + 1);
    Complex::from_polar(s * mag, T::PI() * T::from_usize_lossy(n + 1) * T::lit(0.25))
}

/// L(n) = K_+(n) + K_−(n).
pub fn l_coeff<T: Real>(n: usize) -> Complex<T> {
    k_coeff::<T>(SignChoice::Plus, n) + k_coeff::<T>(SignChoice::Minus, n)
}

/// Q(n, ℓ) = K_−(n)K_−(ℓ)* − K_+(n)K_+(ℓ)* + L(n)L(ℓ)*.
pub fn q_coeff<T: Real>(n: usize, l: usize) -> Complex<T> {
    let (m, p) = (SignChoice::Minus, SignChoice::Plus);
    k_coeff::<T>(m, n) * k_coeff::<T>(m, l).conj() - k_coeff::<T>(p, n) * k_coeff::<T>(p, l).conj()
        + l_coeff::<T>(n) * l_coeff::<T>(l).conj()
}

/// Double series for q(−,+) in powers of s^{1/2}; s = tan θ for the oscillator,
/// s = t for the free particle. Keeps n ≥ 1, ℓ ≥ 0, n + ℓ ≤ order + 1.
pub fn smalltime_series<T: Real>(derivs: &[Complex<T>], s: T, order: usize) -> Result<T> {
    if derivs.len() < order + 1 {
        return Err(Error::InvalidInput(format!(
            "series of order {order} needs {} derivatives, got {}",
            order + 1,
            derivs.len()
        )));
    }
    let mut acc = Complex::new(T::zero(), T::zero());
    for n in 1..=order + 1 {
        for l in 0..=(order + 1 - n) {
            let w = T::from_usize_lossy(n)
                / (T::from_usize_lossy(n + l) * factorial::<T>(n) * factorial::<T>(l))
                * s.powf(T::from_usize_lossy(n + l) * T::lit(0.5));
            acc += q_coeff::<T>(n, l) * derivs[n - 1] * derivs[l].conj() * w;
        }
    }
    Ok(-acc.re / (T::lit(2.0) * T::PI()))
}

/// Small-phase approximation to q(−,+) at (0, θ).
pub fn smalltime_qp<T: Real>(derivs: &[Complex<T>], theta: Phase<T>, order: usize) -> Result<T> {
    smalltime_series(derivs, theta.0.tan(), order)
}

/// The three-term closed form: |ψ|²/(2√π) s^{1/2} + J(0)/2 s + (…) s^{3/2},
/// with J(0) = Im(ψ*ψ') carrying no extra ω.
pub fn smalltime_three_term<T: Real>(derivs: &[Complex<T>], theta: Phase<T>) -> Result<T> {
    if derivs.len() < 3 {
        return Err(Error::InvalidInput("three-term form needs ψ, ψ', ψ''".into()));
    }
    let s = theta.0.tan();
    let (p, pp, ppp) = (derivs[0], derivs[1], derivs[2]);
    let sqrt_pi = T::PI().sqrt();
    let j0 = (p.conj() * pp).im;
    let c1 = Complex::new(T::lit(0.25), T::lit(0.75));
    let third = pp.norm_sqr() - (c1 * ppp.conj() * p).re - (c1.conj() * ppp * p.conj()).re;
    Ok(p.norm_sqr() / (T::lit(2.0) * sqrt_pi) * s.sqrt()
        + j0 * T::lit(0.5) * s
        + third / (T::lit(6.0) * sqrt_pi) * s.powf(T::lit(1.5)))
}
