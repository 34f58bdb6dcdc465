//! Temporal correlators, quasi-probabilities and LG2/LG3/LG4 evaluation.

use serde::{Deserialize, Serialize};

use crate::eigen::ground;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special::erf;
use crate::state::{classical_trajectory, CoherentState, Phase, SignChoice};

/// Truncation control for the eigenfunction sum.
///
/// The sum stops once the tail estimate drops below `tol`; reaching `n_max`
/// first is reported as non-convergence by the strict entry points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation<T> {
    pub tol: T,
    pub n_max: usize,
}

impl<T: Real> Default for Truncation<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-8),
            n_max: 1_000_000,
        }
    }
}

impl<T: Real> Truncation<T> {
    pub fn new(tol: T, n_max: usize) -> Self {
        Self { tol, n_max }
    }
}

/// Truncated series with its tail estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series<T> {
    pub value: T,
    pub terms: usize,
    pub residual: T,
}

impl<T: Real> Series<T> {
    pub fn converged(&self, tol: T) -> bool {
        self.residual <= tol
    }
}

/// A quasi-probability with convergence metadata.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QpValue<T> {
    pub value: T,
    pub terms_used: usize,
    pub residual: T,
}

impl<T: Real> QpValue<T> {
    pub fn exact(value: T) -> Self {
        Self {
            value,
            terms_used: 0,
            residual: T::zero(),
        }
    }
}

/// ⟨Q(θ)⟩ = erf(x_θ).
pub fn single_time_avg<T: Real>(state: CoherentState<T>, theta: Phase<T>) -> T {
    erf(classical_trajectory(state, theta).0)
}

/// Gap of the slowest oscillation in the tail, min(2|sin(Δθ/2)|, 2|cos(Δθ/2)|).
fn oscillation_gap<T: Real>(dtheta: T) -> T {
    let (s, c) = (dtheta * T::lit(0.5)).sin_cos();
    T::lit(2.0) * s.abs().min(c.abs())
}

/// C = e1 e2 + 4 Σ_{n≥1} cos(nΔθ) J_{0n}(x1) J_{0n}(x2), translated-measurement form.
///
/// Never fails; check `residual` against the tolerance. Multiples of π are
/// evaluated in closed form.
pub fn correlator_series<T: Real>(x1: T, x2: T, dtheta: T, trunc: &Truncation<T>) -> Series<T> {
    let e1 = erf(x1);
    let e2 = erf(x2);
    let half = T::lit(0.5);
    let (sh, ch) = (dtheta * half).sin_cos();
    let exact_tol = T::lit(4.0) * T::epsilon();
    if sh.abs() <= exact_tol {
        // completeness: Σ_n ⟨0|θ2|n⟩⟨n|θ1|0⟩ = ⟨0|θ2 θ1|0⟩
        let value = T::lit(2.0) * erf(x1.min(x2)) + T::one() - e1 - e2;
        return Series {
            value,
            terms: 0,
            residual: T::zero(),
        };
    }
    if ch.abs() <= exact_tol {
        // parity: Σ_n (−1)^n ⟨0|θ2|n⟩⟨n|θ1|0⟩ = ⟨0|θ2 Π θ1|0⟩
        let value = (e1 + e2).abs() - T::one();
        return Series {
            value,
            terms: 0,
            residual: T::zero(),
        };
    }

    let g1 = ground(x1);
    let g2 = ground(x2);
    let gg = g1 * g2;
    let gap = oscillation_gap(dtheta);
    let xx = (x1 * x1).max(x2 * x2);
    let n_check = ((T::lit(1.5) * xx + T::lit(10.0)) * half)
        .ceil()
        .to_usize()
        .unwrap_or(usize::MAX)
        .max(8);
    let two_over_pi = T::lit(2.0) / T::PI();

    let (sd, cd) = dtheta.sin_cos();
    let (mut cn, mut sn) = (cd, sd);
    let (mut a_prev, mut a_cur) = (T::zero(), g1);
    let (mut b_prev, mut b_cur) = (T::zero(), g2);
    let mut sqrt_nm1 = T::zero();
    let mut sum = T::zero();
    let mut residual = T::infinity();
    let mut terms = 0;

    for n in 1..=trunc.n_max {
        let fnn = T::from_usize_lossy(n);
        sum += cn * a_cur * b_cur / (T::lit(2.0) * fnn);
        terms = n;

        let sqrt_n = fnn.sqrt();
        let r = T::one() / sqrt_n;
        let up = T::SQRT_2() * r;
        let down = sqrt_nm1 * r;
        let a_next = up * x1 * a_cur - down * a_prev;
        let b_next = up * x2 * b_cur - down * b_prev;
        a_prev = a_cur;
        a_cur = a_next;
        b_prev = b_cur;
        b_cur = b_next;
        sqrt_nm1 = sqrt_n;

        if n % 256 == 0 {
            let (s, c) = (T::from_usize_lossy(n + 1) * dtheta).sin_cos();
            cn = c;
            sn = s;
        } else {
            let c = cn * cd - sn * sd;
            sn = sn * cd + cn * sd;
            cn = c;
        }

        if n >= n_check && (n % 16 == 0 || n == trunc.n_max) {
            // WKB envelope |ψ_m(x)| ≲ √(2/π)(2m+1−x²)^{−1/4}
            let m2 = T::lit(2.0) * fnn + T::one();
            let env = T::lit(4.0) * gg * two_over_pi
                * ((m2 - x1 * x1) * (m2 - x2 * x2)).powf(T::lit(-0.25))
                / (T::lit(2.0) * (fnn + T::one()));
            let reach = (T::one() / gap).min(T::lit(2.0) * (fnn + T::one()));
            residual = T::lit(2.0) * env * reach;
            if residual <= trunc.tol {
                break;
            }
        }
    }
    Series {
        value: e1 * e2 + T::lit(4.0) * gg * sum,
        terms,
        residual,
    }
}

fn strict_series<T: Real>(s: Series<T>, trunc: &Truncation<T>, what: &'static str) -> Result<Series<T>> {
    if !s.converged(trunc.tol) {
        return Err(Error::NonConvergence {
            what,
            terms: s.terms,
            residual: s.residual.as_f64(),
            tol: trunc.tol.as_f64(),
        });
    }
    let bound = T::one() + T::lit(10.0) * trunc.tol;
    if s.value.abs() > bound {
        return Err(Error::CorrelatorRange { value: s.value.as_f64() });
    }
    Ok(s)
}

fn check_order<T: Real>(theta1: Phase<T>, theta2: Phase<T>) -> Result<()> {
    if !(theta1.0 < theta2.0) {
        return Err(Error::InvalidInput(format!(
            "phases must increase (θ1 = {}, θ2 = {})",
            theta1.0, theta2.0
        )));
    }
    Ok(())
}

/// Two-time correlator C(θ1, θ2) for the coherent state.
pub fn correlator<T: Real>(
    state: CoherentState<T>,
    theta1: Phase<T>,
    theta2: Phase<T>,
    trunc: &Truncation<T>,
) -> Result<T> {
    check_order(theta1, theta2)?;
    Ok(correlator_checked(state, theta1, theta2, trunc)?.value)
}

fn correlator_checked<T: Real>(
    state: CoherentState<T>,
    theta1: Phase<T>,
    theta2: Phase<T>,
    trunc: &Truncation<T>,
) -> Result<Series<T>> {
    let x1 = classical_trajectory(state, theta1).0;
    let x2 = classical_trajectory(state, theta2).0;
    strict_series(correlator_series(x1, x2, theta2.0 - theta1.0, trunc), trunc, "correlator")
}

/// q(s1,s2) = ¼(1 + s1⟨Q1⟩ + s2⟨Q2⟩ + s1 s2 C12).
pub fn quasiprob<T: Real>(
    state: CoherentState<T>,
    s1: SignChoice,
    s2: SignChoice,
    theta1: Phase<T>,
    theta2: Phase<T>,
    trunc: &Truncation<T>,
) -> Result<QpValue<T>> {
    check_order(theta1, theta2)?;
    let c = correlator_checked(state, theta1, theta2, trunc)?;
    Ok(qp_from_parts(
        single_time_avg(state, theta1),
        single_time_avg(state, theta2),
        c,
        s1,
        s2,
    ))
}

/// All four quasi-probabilities from one correlator, ordered ++, +−, −+, −−.
pub fn quasiprob_all<T: Real>(
    state: CoherentState<T>,
    theta1: Phase<T>,
    theta2: Phase<T>,
    trunc: &Truncation<T>,
) -> Result<[QpValue<T>; 4]> {
    check_order(theta1, theta2)?;
    let c = correlator_checked(state, theta1, theta2, trunc)?;
    let q1 = single_time_avg(state, theta1);
    let q2 = single_time_avg(state, theta2);
    Ok(SIGN_PAIRS.map(|(a, b)| qp_from_parts(q1, q2, c, a, b)))
}

pub(crate) const SIGN_PAIRS: [(SignChoice, SignChoice); 4] = [
    (SignChoice::Plus, SignChoice::Plus),
    (SignChoice::Plus, SignChoice::Minus),
    (SignChoice::Minus, SignChoice::Plus),
    (SignChoice::Minus, SignChoice::Minus),
];

fn qp_from_parts<T: Real>(q1: T, q2: T, c: Series<T>, s1: SignChoice, s2: SignChoice) -> QpValue<T> {
    let (a, b) = (s1.value::<T>(), s2.value::<T>());
    QpValue {
        value: T::lit(0.25) * (T::one() + a * q1 + b * q2 + a * b * c.value),
        terms_used: c.terms,
        residual: T::lit(0.25) * c.residual,
    }
}

/// Ordered measurement phases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule<T> {
    pub phases: Vec<Phase<T>>,
    pub equal_spacing: Option<T>,
}

impl<T: Real> Schedule<T> {
    pub fn new(phases: Vec<Phase<T>>) -> Result<Self> {
        if !(2..=4).contains(&phases.len()) {
            return Err(Error::InvalidInput(format!(
                "schedule needs 2 to 4 phases, got {}",
                phases.len()
            )));
        }
        if phases.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::InvalidInput("schedule phases must strictly increase".into()));
        }
        Ok(Self {
            phases,
            equal_spacing: None,
        })
    }

    pub fn equally_spaced(theta1: Phase<T>, dtheta: T, count: usize) -> Result<Self> {
        if !(dtheta > T::zero()) {
            return Err(Error::InvalidInput(format!("spacing must be positive, got {dtheta}")));
        }
        let phases = (0..count)
            .map(|k| Phase(theta1.0 + T::from_usize_lossy(k) * dtheta))
            .collect();
        let mut s = Self::new(phases)?;
        s.equal_spacing = Some(dtheta);
        Ok(s)
    }
}

/// LG inequality order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order {
    Two,
    Three,
    Four,
}

impl Order {
    pub fn from_int(n: u32) -> Result<Self> {
        match n {
            2 => Ok(Order::Two),
            3 => Ok(Order::Three),
            4 => Ok(Order::Four),
            _ => Err(Error::InvalidInput(format!("order must be 2, 3 or 4, got {n}"))),
        }
    }

    pub fn as_int(self) -> u32 {
        match self {
            Order::Two => 2,
            Order::Three => 3,
            Order::Four => 4,
        }
    }

    /// Number of measurement times.
    pub fn times(self) -> usize {
        self.as_int() as usize
    }

    /// Ranks values so that smaller means more violating.
    pub fn badness<T: Real>(self, value: T) -> T {
        match self {
            Order::Four => -value,
            _ => value,
        }
    }

    /// Violation magnitude, zero when the inequality holds.
    pub fn violation<T: Real>(self, value: T) -> T {
        match self {
            Order::Four => (value - T::lit(2.0)).max(T::zero()),
            _ => (-value).max(T::zero()),
        }
    }

    /// Percentage of the largest quantum violation.
    ///
    /// LG2 and LG3 are measured against 0.5 (four times the −1/8 quasi-probability
    /// floor); LG4 against the excess 2√2 − 2 over the classical bound 2.
    pub fn luders_percent<T: Real>(self, value: T) -> T {
        let hundred = T::lit(100.0);
        match self {
            Order::Four => hundred * (value - T::lit(2.0)) / (T::lit(2.0) * T::SQRT_2() - T::lit(2.0)),
            _ => hundred * value.abs() / T::lit(0.5),
        }
    }
}

/// Inequality values for one order, in a fixed label order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LgReport<T> {
    pub order: Order,
    pub entries: Vec<(String, T)>,
    pub extremal: (String, T),
    /// Largest truncation residual among the correlators used.
    pub residual: T,
}

impl<T: Real> LgReport<T> {
    pub fn get(&self, label: &str) -> Option<T> {
        self.entries.iter().find(|(l, _)| l == label).map(|(_, v)| *v)
    }

    fn build(order: Order, entries: Vec<(String, T)>, residual: T) -> Self {
        let extremal = entries
            .iter()
            .fold(None::<&(String, T)>, |best, e| match best {
                Some(b) if order.badness(b.1) <= order.badness(e.1) => Some(b),
                _ => Some(e),
            })
            .cloned()
            .expect("non-empty report");
        Self {
            order,
            entries,
            extremal,
            residual,
        }
    }

    /// 1 + s1⟨Q1⟩ + s2⟨Q2⟩ + s1 s2 C12 for the four sign pairs.
    pub fn lg2(q1: T, q2: T, c12: T) -> Self {
        Self::lg2_labelled("", q1, q2, c12, T::zero())
    }

    fn lg2_labelled(prefix: &str, q1: T, q2: T, c12: T, residual: T) -> Self {
        let entries = SIGN_PAIRS
            .iter()
            .map(|&(a, b)| {
                let (sa, sb) = (a.value::<T>(), b.value::<T>());
                (
                    format!("{prefix}{}{}", a.symbol(), b.symbol()),
                    T::one() + sa * q1 + sb * q2 + sa * sb * c12,
                )
            })
            .collect();
        Self::build(Order::Two, entries, residual)
    }

    /// L1..L4 from the three correlators.
    pub fn lg3(c12: T, c23: T, c13: T) -> Self {
        Self::lg3_with_residual(c12, c23, c13, T::zero())
    }

    fn lg3_with_residual(c12: T, c23: T, c13: T, residual: T) -> Self {
        let one = T::one();
        let entries = vec![
            ("L1".to_string(), one + c12 + c23 + c13),
            ("L2".to_string(), one - c12 - c23 + c13),
            ("L3".to_string(), one + c12 - c23 - c13),
            ("L4".to_string(), one - c12 + c23 - c13),
        ];
        Self::build(Order::Three, entries, residual)
    }

    /// The eight bounded sums over the cycle [C12, C23, C34, C14]; each must be ≤ 2.
    pub fn lg4(c: [T; 4]) -> Self {
        Self::lg4_with_residual(c, T::zero())
    }

    fn lg4_with_residual(c: [T; 4], residual: T) -> Self {
        const NAMES: [&str; 4] = ["C12", "C23", "C34", "C14"];
        let total: T = c.iter().copied().sum();
        let mut entries = Vec::with_capacity(8);
        for k in 0..4 {
            let label: String = (0..4)
                .map(|j| format!("{}{}", if j == k { '-' } else { '+' }, NAMES[j]))
                .collect();
            entries.push((label, total - T::lit(2.0) * c[k]));
        }
        for k in 0..4 {
            let label: String = (0..4)
                .map(|j| format!("{}{}", if j == k { '+' } else { '-' }, NAMES[j]))
                .collect();
            entries.push((label, T::lit(2.0) * c[k] - total));
        }
        Self::build(Order::Four, entries, residual)
    }
}

/// Whether truncation failures abort (`Strict`) or are carried in `residual`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Strict,
    Relaxed,
}

/// LG report on the equally spaced schedule θ1, θ1+Δθ, ….
pub fn lg_report<T: Real>(
    state: CoherentState<T>,
    order: Order,
    dtheta: T,
    theta1: Phase<T>,
    trunc: &Truncation<T>,
) -> Result<LgReport<T>> {
    lg_report_mode(state, order, dtheta, theta1, trunc, Mode::Strict)
}

pub fn lg_report_mode<T: Real>(
    state: CoherentState<T>,
    order: Order,
    dtheta: T,
    theta1: Phase<T>,
    trunc: &Truncation<T>,
    mode: Mode,
) -> Result<LgReport<T>> {
    let schedule = Schedule::equally_spaced(theta1, dtheta, order.times())?;
    let xs: Vec<T> = schedule
        .phases
        .iter()
        .map(|&p| classical_trajectory(state, p).0)
        .collect();
    let mut residual = T::zero();
    let mut corr = |i: usize, j: usize| -> Result<T> {
        let s = correlator_series(xs[i], xs[j], T::from_usize_lossy(j - i) * dtheta, trunc);
        let s = match mode {
            Mode::Strict => strict_series(s, trunc, "correlator")?,
            Mode::Relaxed => s,
        };
        residual = residual.max(s.residual);
        Ok(s.value)
    };
    let report = match order {
        Order::Two => {
            let c12 = corr(0, 1)?;
            return Ok(LgReport::lg2_labelled("", erf(xs[0]), erf(xs[1]), c12, residual));
        }
        Order::Three => {
            let (c12, c23, c13) = (corr(0, 1)?, corr(1, 2)?, corr(0, 2)?);
            LgReport::lg3_with_residual(c12, c23, c13, T::zero())
        }
        Order::Four => {
            let c = [corr(0, 1)?, corr(1, 2)?, corr(2, 3)?, corr(0, 3)?];
            LgReport::lg4_with_residual(c, T::zero())
        }
    };
    Ok(LgReport { residual, ..report })
}

/// The twelve LG2 values over the three pairs of a three-time schedule,
/// labelled "ij:s1s2".
pub fn lg2_pairs_report<T: Real>(
    state: CoherentState<T>,
    schedule: &Schedule<T>,
    trunc: &Truncation<T>,
) -> Result<LgReport<T>> {
    if schedule.phases.len() != 3 {
        return Err(Error::InvalidInput("pairwise LG2 needs three phases".into()));
    }
    let mut entries = Vec::with_capacity(12);
    let mut residual = T::zero();
    for (i, j) in [(0usize, 1usize), (1, 2), (0, 2)] {
        let (ti, tj) = (schedule.phases[i], schedule.phases[j]);
        let c = correlator_checked(state, ti, tj, trunc)?;
        residual = residual.max(c.residual);
        let r = LgReport::lg2_labelled(
            &format!("{}{}:", i + 1, j + 1),
            single_time_avg(state, ti),
            single_time_avg(state, tj),
            c.value,
            c.residual,
        );
        entries.extend(r.entries);
    }
    Ok(LgReport::build(Order::Two, entries, residual))
}
