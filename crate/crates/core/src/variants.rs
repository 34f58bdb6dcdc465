//! Coherent-state projectors, thermal coherent states and the squeeze map.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{ground, Eigenbasis};
use crate::error::{Error, Result};
use crate::lg::{LgReport, Order, QpValue, Schedule, Series, Truncation};
use crate::optimize::NelderMead;
use crate::scalar::Real;
use crate::state::{classical_trajectory, CoherentState, Phase, SignChoice};

/// Projector centers relative to the state, γ_i = e^{−iθ_i}β_i − α.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaPair<T> {
    pub g1: Complex<T>,
    pub g2: Complex<T>,
}

impl<T: Real> GammaPair<T> {
    pub fn new(g1: Complex<T>, g2: Complex<T>) -> Result<Self> {
        if !(g1.re.is_finite() && g1.im.is_finite() && g2.re.is_finite() && g2.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite γ".into()));
        }
        Ok(Self { g1, g2 })
    }
}

/// Which pair of coherent-state projector outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProjectorBranch {
    PlusPlus,
    PlusMinus,
    /// q(+,−) with γ1 ↔ γ2.
    MinusPlus,
    MinusMinus,
}

impl ProjectorBranch {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "++" => Ok(Self::PlusPlus),
            "+-" => Ok(Self::PlusMinus),
            "-+" => Ok(Self::MinusPlus),
            "--" => Ok(Self::MinusMinus),
            _ => Err(Error::InvalidInput(format!("branch must be one of ++, +-, -+, --; got {s:?}"))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::PlusPlus => "++",
            Self::PlusMinus => "+-",
            Self::MinusPlus => "-+",
            Self::MinusMinus => "--",
        }
    }
}

/// q for projectors onto |β1⟩ at θ1 and |β2⟩ at θ2, in the frame-absorbed variables.
pub fn coherent_projector_qp<T: Real>(gamma: GammaPair<T>, branch: ProjectorBranch) -> T {
    let (a, b) = (gamma.g1.norm_sqr(), gamma.g2.norm_sqr());
    let both = (gamma.g1 * gamma.g2.conj()).exp().re * (-a - b).exp();
    match branch {
        ProjectorBranch::PlusPlus => both,
        ProjectorBranch::PlusMinus => (-a).exp() - both,
        ProjectorBranch::MinusPlus => (-b).exp() - both,
        ProjectorBranch::MinusMinus => T::one() - (-a).exp() - (-b).exp() + both,
    }
}

/// Minimizes a projector branch over (|γ1|, |γ2|, arg γ2 − arg γ1).
///
/// Sixteen starts on a log-spaced radius grid plus, for (+,+), the equal-radius
/// warm start; each is refined by Nelder–Mead.
pub fn coherent_projector_optimize<T: Real>(branch: ProjectorBranch) -> Result<(GammaPair<T>, T)> {
    let f = |v: &[T]| {
        let g = GammaPair {
            g1: Complex::new(v[0], T::zero()),
            g2: Complex::from_polar(v[1], v[2]),
        };
        coherent_projector_qp(g, branch)
    };
    let nm = NelderMead {
        f_tol: T::lit(1e-13),
        x_tol: T::lit(1e-8),
        max_iter: 20_000,
    };
    let radii = [0.35, 0.7, 1.4, 2.8];
    let mut starts: Vec<[T; 3]> = Vec::with_capacity(17);
    for (i, &r1) in radii.iter().enumerate() {
        for (j, &r2) in radii.iter().enumerate() {
            let phase = if (i + j) % 2 == 0 { -1.0 } else { 1.0 };
            starts.push([T::lit(r1), T::lit(r2), T::lit(phase)]);
        }
    }
    if branch == ProjectorBranch::PlusPlus {
        starts.push([T::lit(1.5), T::lit(1.5), T::lit(-1.0)]);
    }
    let step = [T::lit(0.2), T::lit(0.2), T::lit(0.3)];
    let best = starts
        .iter()
        .map(|s| nm.minimize(f, s, &step))
        .fold(None::<crate::optimize::SimplexResult<T>>, |acc, r| match acc {
            Some(a) if a.value <= r.value => Some(a),
            _ => Some(r),
        })
        .expect("at least one start");
    if !best.converged {
        return Err(Error::Optimizer(format!("projector branch {} did not settle", branch.label())));
    }
    let (r1, r2, phi) = (best.x[0], best.x[1], best.x[2]);
    // a negative radius is a half-turn of the phase
    let g1 = Complex::new(r1, T::zero());
    let g2 = Complex::from_polar(r2, phi);
    let (g1, g2) = if r1 < T::zero() { (-g1, -g2) } else { (g1, g2) };
    let pi = T::PI();
    let tau = T::lit(2.0) * pi;
    let arg = g2.arg();
    let wrapped = arg - tau * ((arg + pi) / tau).floor();
    let g2 = Complex::from_polar(g2.norm(), wrapped);
    Ok((GammaPair { g1, g2 }, best.value))
}

/// Outcome of a two-coherent-state superposition check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionCheck<T> {
    pub norm: T,
    pub overlap: Complex<T>,
    pub q: T,
}

/// ⟨a|b⟩ for coherent states.
fn coherent_overlap<T: Real>(a: Complex<T>, b: Complex<T>) -> Complex<T> {
    (a.conj() * b - (a.norm_sqr() + b.norm_sqr()) * T::lit(0.5)).exp()
}

/// Builds the superposition that saturates −1/8 for projectors onto |β1⟩, |β2⟩.
///
/// (+,+): |ψ⟩ = −|β1⟩ − |β2⟩ with ⟨β1|β2⟩ = −½.
/// (+,−): |ψ⟩ = |β1⟩ − √3|β2⟩ with ⟨β1|β2⟩ = √3/2.
pub fn superposition_max_check<T: Real>(branch: ProjectorBranch) -> Result<SuperpositionCheck<T>> {
    let half = T::lit(0.5);
    let (b1, b2, c1, c2) = match branch {
        ProjectorBranch::PlusPlus => {
            // |β1−β2|² = 2 ln 2 and Im(β1*β2) = π
            let d = (T::LN_2() * half).sqrt();
            let y = T::PI() / (T::lit(2.0) * d);
            (Complex::new(d, y), Complex::new(-d, y), -T::one(), -T::one())
        }
        ProjectorBranch::PlusMinus => {
            let delta = (-T::lit(2.0) * (T::lit(3.0).sqrt() * half).ln()).sqrt();
            (Complex::new(T::zero(), T::zero()), Complex::new(delta, T::zero()), T::one(), -T::lit(3.0).sqrt())
        }
        _ => {
            return Err(Error::InvalidInput(format!(
                "superposition check covers ++ and +-, not {}",
                branch.label()
            )))
        }
    };
    let o12 = coherent_overlap(b1, b2);
    let one = Complex::new(T::one(), T::zero());
    // ⟨β_i|ψ⟩ with |ψ⟩ = c1|β1⟩ + c2|β2⟩
    let on1 = one * c1 + o12 * c2;
    let on2 = o12.conj() * c1 + one * c2;
    let norm = (c1 * c1 + c2 * c2 + T::lit(2.0) * c1 * c2 * o12.re).sqrt();
    let (on1, on2) = (on1 / norm, on2 / norm);
    // Re⟨ψ|P2 P1|ψ⟩ = Re ⟨ψ|β2⟩⟨β2|β1⟩⟨β1|ψ⟩
    let both = (on2.conj() * o12.conj() * on1).re;
    let q = match branch {
        ProjectorBranch::PlusPlus => both,
        _ => on1.norm_sqr() - both,
    };
    Ok(SuperpositionCheck { norm, overlap: o12, q })
}

/// Dimensionless temperature k_B T/ħω and the cap on retained number states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams<T> {
    pub temperature: T,
    pub n_max_thermal: usize,
}

impl<T: Real> ThermalParams<T> {
    pub fn new(temperature: T) -> Result<Self> {
        if !(temperature >= T::zero() && temperature.is_finite()) {
            return Err(Error::InvalidInput(format!("temperature must be ≥ 0, got {temperature}")));
        }
        Ok(Self {
            temperature,
            n_max_thermal: 2000,
        })
    }

    /// Normalized Boltzmann weights, kept until the dropped tail is below 1e-10.
    pub fn weights(&self) -> Result<Vec<T>> {
        if self.temperature == T::zero() {
            return Ok(vec![T::one()]);
        }
        let r = (-T::one() / self.temperature).exp();
        let cut = T::lit(1e-10);
        let mut w = vec![T::one()];
        let mut tail = r;
        while tail > cut {
            if w.len() > self.n_max_thermal {
                return Err(Error::NonConvergence {
                    what: "thermal weights",
                    terms: w.len(),
                    residual: tail.as_f64(),
                    tol: cut.as_f64(),
                });
            }
            w.push(tail);
            tail *= r;
        }
        let total: T = w.iter().copied().sum();
        Ok(w.into_iter().map(|v| v / total).collect())
    }
}

/// Two-time moments of a (mixed) state: ⟨Q1⟩, ⟨Q2⟩, C12.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments<T> {
    pub q1: T,
    pub q2: T,
    pub c12: T,
    pub terms: usize,
    pub residual: T,
}

impl<T: Real> Moments<T> {
    pub fn qp(&self, s1: SignChoice, s2: SignChoice) -> QpValue<T> {
        let (a, b) = (s1.value::<T>(), s2.value::<T>());
        QpValue {
            value: T::lit(0.25) * (T::one() + a * self.q1 + b * self.q2 + a * b * self.c12),
            terms_used: self.terms,
            residual: T::lit(0.25) * self.residual,
        }
    }
}

/// Moments of the number state |ℓ⟩ under the translated measurements θ(±(x̂ + x_i)).
///
/// C = (2A_ℓ(x1)−1)(2A_ℓ(x2)−1) + 4 Σ_{n≠ℓ} cos((n−ℓ)Δθ) A_n(x1) A_n(x2),
/// A_n(x) = ∫_{−x}^∞ ψ_ℓ ψ_n.
pub fn number_state_moments<T: Real>(ell: usize, x1: T, x2: T, dtheta: T, trunc: &Truncation<T>) -> Result<Moments<T>> {
    let basis = Eigenbasis::new(ell.max(1))?;
    let d1 = basis.overlap_halfline(ell, ell, -x1)?;
    let d2 = basis.overlap_halfline(ell, ell, -x2)?;
    let two = T::lit(2.0);
    let (q1, q2) = (two * d1 - T::one(), two * d2 - T::one());
    let s = number_state_tail(ell, -x1, -x2, dtheta, trunc);
    if s.residual > trunc.tol {
        return Err(Error::NonConvergence {
            what: "number-state correlator",
            terms: s.terms,
            residual: s.residual.as_f64(),
            tol: trunc.tol.as_f64(),
        });
    }
    Ok(Moments {
        q1,
        q2,
        c12: q1 * q2 + T::lit(4.0) * s.value,
        terms: s.terms,
        residual: T::lit(4.0) * s.residual,
    })
}

/// Σ_{n≠ℓ} cos((n−ℓ)Δθ) J_{ℓn}(a1) J_{ℓn}(a2) with a WKB tail estimate.
fn number_state_tail<T: Real>(ell: usize, a1: T, a2: T, dtheta: T, trunc: &Truncation<T>) -> Series<T> {
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    // ψ_{ℓ−1}, ψ_ℓ at both points
    let mut r1 = (T::zero(), ground(a1));
    let mut r2 = (T::zero(), ground(a2));
    let step = |(prev, cur): (T, T), a: T, n: usize| -> (T, T) {
        // ψ_{n+1} from ψ_{n−1}, ψ_n
        let fnn = T::from_usize_lossy(n);
        let next = (two / (fnn + T::one())).sqrt() * a * cur - (fnn / (fnn + T::one())).sqrt() * prev;
        (cur, next)
    };
    for n in 0..ell {
        r1 = step(r1, a1, n);
        r2 = step(r2, a2, n);
    }
    let (l1m, l1) = r1;
    let (l2m, l2) = r2;
    let sq_2l = (two * T::from_usize_lossy(ell)).sqrt();

    let (sd, cd) = dtheta.sin_cos();
    let start = -T::from_usize_lossy(ell) * dtheta;
    let (mut sn, mut cn) = start.sin_cos();
    let mut p1 = (T::zero(), ground(a1));
    let mut p2 = (T::zero(), ground(a2));
    let gap = {
        let (s, c) = (dtheta * half).sin_cos();
        two * s.abs().min(c.abs())
    };
    let aa = (a1 * a1).max(a2 * a2);
    let n_check = (((T::lit(1.5) * aa + T::lit(10.0)) * half).ceil().to_usize().unwrap_or(usize::MAX)).max(2 * ell + 8);
    let env_scale = (two / T::PI()).sqrt();

    let mut sum = T::zero();
    let mut residual = T::infinity();
    let mut terms = 0;
    for n in 0..=trunc.n_max {
        if n != ell {
            let fnn = T::from_usize_lossy(n);
            let sq_2n = (two * fnn).sqrt();
            let denom = two * (fnn - T::from_usize_lossy(ell));
            let j1 = (sq_2n * p1.0 * l1 - sq_2l * l1m * p1.1) / denom;
            let j2 = (sq_2n * p2.0 * l2 - sq_2l * l2m * p2.1) / denom;
            sum += cn * j1 * j2;
        }
        terms = n + 1;

        if n >= n_check && n % 16 == 0 {
            let fnn = T::from_usize_lossy(n);
            let m2 = two * fnn + T::one();
            let e1 = env_scale * (m2 - a1 * a1).powf(T::lit(-0.25));
            let e2 = env_scale * (m2 - a2 * a2).powf(T::lit(-0.25));
            let sq_2n = (two * fnn).sqrt();
            let denom = two * (fnn - T::from_usize_lossy(ell));
            let amp1 = (sq_2n * l1.abs() + sq_2l * l1m.abs()) * e1 / denom;
            let amp2 = (sq_2n * l2.abs() + sq_2l * l2m.abs()) * e2 / denom;
            let reach = (T::one() / gap).min(two * (fnn + T::one()));
            residual = two * amp1 * amp2 * reach;
            if residual <= trunc.tol {
                break;
            }
        }

        p1 = step(p1, a1, n);
        p2 = step(p2, a2, n);
        if (n + 1) % 256 == 0 {
            let (s, c) = ((T::from_usize_lossy(n + 1) - T::from_usize_lossy(ell)) * dtheta).sin_cos();
            sn = s;
            cn = c;
        } else {
            let c = cn * cd - sn * sd;
            sn = sn * cd + cn * sd;
            cn = c;
        }
    }
    Series { value: sum, terms, residual }
}

/// Thermal mixture of displaced number states: weighted moments at (θ1, θ2).
pub fn thermal_moments<T: Real>(
    state: CoherentState<T>,
    tp: &ThermalParams<T>,
    theta1: Phase<T>,
    theta2: Phase<T>,
    trunc: &Truncation<T>,
) -> Result<Moments<T>> {
    if !(theta1.0 < theta2.0) {
        return Err(Error::InvalidInput(format!(
            "phases must increase (θ1 = {}, θ2 = {})",
            theta1.0, theta2.0
        )));
    }
    let w = tp.weights()?;
    let x1 = classical_trajectory(state, theta1).0;
    let x2 = classical_trajectory(state, theta2).0;
    let dt = theta2.0 - theta1.0;
    let parts: Vec<Result<Moments<T>>> = (0..w.len())
        .into_par_iter()
        .map(|ell| number_state_moments(ell, x1, x2, dt, trunc))
        .collect();
    let mut out = Moments {
        q1: T::zero(),
        q2: T::zero(),
        c12: T::zero(),
        terms: 0,
        residual: T::zero(),
    };
    for (wl, m) in w.iter().zip(parts) {
        let m = m?;
        out.q1 += *wl * m.q1;
        out.q2 += *wl * m.q2;
        out.c12 += *wl * m.c12;
        out.terms = out.terms.max(m.terms);
        out.residual = out.residual.max(m.residual);
    }
    Ok(out)
}

/// Per-number-state quasi-probabilities q_ℓ, for ℓ = 0..count.
pub fn number_state_qps<T: Real>(
    state: CoherentState<T>,
    count: usize,
    s1: SignChoice,
    s2: SignChoice,
    theta1: Phase<T>,
    theta2: Phase<T>,
    trunc: &Truncation<T>,
) -> Result<Vec<T>> {
    let x1 = classical_trajectory(state, theta1).0;
    let x2 = classical_trajectory(state, theta2).0;
    (0..count)
        .into_par_iter()
        .map(|ell| Ok(number_state_moments(ell, x1, x2, theta2.0 - theta1.0, trunc)?.qp(s1, s2).value))
        .collect()
}

/// q(s1, s2) for the displaced thermal state.
pub fn thermal_qp<T: Real>(
    state: CoherentState<T>,
    tp: &ThermalParams<T>,
    s1: SignChoice,
    s2: SignChoice,
    theta1: Phase<T>,
    theta2: Phase<T>,
    trunc: &Truncation<T>,
) -> Result<QpValue<T>> {
    Ok(thermal_moments(state, tp, theta1, theta2, trunc)?.qp(s1, s2))
}

/// LG report of the given order for the thermal state on an equally spaced schedule.
pub fn thermal_lg_report<T: Real>(
    state: CoherentState<T>,
    tp: &ThermalParams<T>,
    order: Order,
    dtheta: T,
    theta1: Phase<T>,
    trunc: &Truncation<T>,
) -> Result<LgReport<T>> {
    let schedule = Schedule::equally_spaced(theta1, dtheta, order.times())?;
    let ph = &schedule.phases;
    let mut residual = T::zero();
    let mut pair = |i: usize, j: usize| -> Result<Moments<T>> {
        let m = thermal_moments(state, tp, ph[i], ph[j], trunc)?;
        residual = residual.max(m.residual);
        Ok(m)
    };
    let mut report = match order {
        Order::Two => {
            let m = pair(0, 1)?;
            LgReport::lg2(m.q1, m.q2, m.c12)
        }
        Order::Three => LgReport::lg3(pair(0, 1)?.c12, pair(1, 2)?.c12, pair(0, 2)?.c12),
        Order::Four => LgReport::lg4([pair(0, 1)?.c12, pair(1, 2)?.c12, pair(2, 3)?.c12, pair(0, 3)?.c12]),
    };
    report.residual = residual;
    Ok(report)
}

/// Reference state and spacing used for the thermal curves (θ in (0, π) orientation).
pub fn thermal_reference<T: Real>(order: Order) -> (CoherentState<T>, T) {
    let (x0, p0, dt) = match order {
        Order::Two => (0.55, -1.925, 0.555),
        Order::Three => (0.859, -3.317, 0.254),
        Order::Four => (0.929, -3.666, 0.166),
    };
    (CoherentState { x0: T::lit(x0), p0: T::lit(p0) }, T::lit(dt))
}

/// violation(T̃)/violation(0) at the reference point, for each temperature.
pub fn thermal_violation_curve<T: Real>(order: Order, temperatures: &[T], trunc: &Truncation<T>) -> Result<Vec<(T, T)>> {
    let (state, dt) = thermal_reference::<T>(order);
    let at = |t: T| -> Result<T> {
        let tp = ThermalParams::new(t)?;
        let r = thermal_lg_report(state, &tp, order, dt, Phase(T::zero()), trunc)?;
        Ok(order.violation(r.extremal.1))
    };
    let base = at(T::zero())?;
    if !(base > T::zero()) {
        return Err(Error::InvalidInput("reference point shows no violation at zero temperature".into()));
    }
    temperatures.iter().map(|&t| Ok((t, at(t)? / base))).collect()
}

/// Squeezing parameter ζ = r e^{iφ}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams<T> {
    pub r: T,
    pub phi: T,
}

impl<T: Real> SqueezeParams<T> {
    pub fn new(r: T, phi: T) -> Result<Self> {
        if !(r.is_finite() && phi.is_finite()) {
            return Err(Error::InvalidInput("non-finite squeezing".into()));
        }
        Ok(Self { r, phi })
    }

    pub fn from_complex(zeta: Complex<T>) -> Result<Self> {
        Self::new(zeta.norm(), zeta.arg())
    }

    pub fn negated(self) -> Self {
        Self {
            r: self.r,
            phi: self.phi + T::PI(),
        }
    }
}

/// The coherent state and phases equivalent to a squeezed coherent state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezeMap<T> {
    pub beta: Complex<T>,
    pub theta1: Phase<T>,
    pub theta2: Phase<T>,
    /// S†x̂(θ_i)S = a_i x̂ + b_i p̂.
    pub coeffs: [(T, T); 2],
}

/// Maps D(α)S(ζ)|0⟩ measured at (θ1, θ2) onto a coherent state |β⟩ at (θ1′, θ2′).
///
/// S†D(α)S = D(β) with β = α cosh r + α* e^{iφ} sinh r; each θ(a x̂ + b p̂)
/// equals θ(x̂(θ′)) with θ′ = atan2(b, a), taken on the branch nearest θ.
pub fn squeeze_map<T: Real>(alpha: Complex<T>, zeta: SqueezeParams<T>, theta1: Phase<T>, theta2: Phase<T>) -> SqueezeMap<T> {
    let (ch, sh) = (zeta.r.cosh(), zeta.r.sinh());
    let (s, c) = zeta.phi.sin_cos();
    let beta = alpha * ch + alpha.conj() * Complex::from_polar(sh, zeta.phi);
    let tau = T::lit(2.0) * T::PI();
    let map = |t: T| -> (T, T, T) {
        let (st, ct) = t.sin_cos();
        let a = ct * (ch - c * sh) - st * s * sh;
        let b = -ct * s * sh + st * (ch + c * sh);
        let d = b.atan2(a) - t;
        let d = d - tau * ((d + T::PI()) / tau).floor();
        (t + d, a, b)
    };
    let (t1, a1, b1) = map(theta1.0);
    let (mut t2, a2, b2) = map(theta2.0);
    if theta2.0 > theta1.0 {
        while t2 <= t1 {
            t2 += tau;
        }
    }
    SqueezeMap {
        beta,
        theta1: Phase(t1),
        theta2: Phase(t2),
        coeffs: [(a1, b1), (a2, b2)],
    }
}
