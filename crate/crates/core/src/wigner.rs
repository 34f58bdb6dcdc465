//! Phase-space route: Wigner functions of gaussian and chopped states, the
//! quasi-probability as a clipped 2-D integral, and Wigner LG2 quantities.

use std::io::Write;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::currents::sequential_prob;
use crate::error::{Error, Result};
use crate::lg::QpValue;
use crate::scalar::Real;
use crate::special::{damped_re_erf, erf};
use crate::state::{classical_trajectory, CoherentState, Phase, SignChoice};

/// W = (1/π) exp(−(p−p0)² − (X−x0)²).
pub fn wigner_coherent<T: Real>(state: CoherentState<T>, x: T, p: T) -> T {
    let (dx, dp) = (x - state.x0, p - state.p0);
    (-dx * dx - dp * dp).exp() / T::PI()
}

/// Wigner function of ½(P_{s1}ρ + ρP_{s1}) for the coherent state ρ.
pub fn chopped_wigner<T: Real>(state: CoherentState<T>, s1: SignChoice, x: T, p: T) -> T {
    GaussianState::coherent(state).chopped_wigner(s1, x, p)
}

/// A gaussian Wigner function: mean (x0, p0) and covariance (sxx, sxp, spp).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianState<T> {
    pub x0: T,
    pub p0: T,
    pub sxx: T,
    pub sxp: T,
    pub spp: T,
}

impl<T: Real> GaussianState<T> {
    pub fn coherent(state: CoherentState<T>) -> Self {
        let h = T::lit(0.5);
        Self {
            x0: state.x0,
            p0: state.p0,
            sxx: h,
            sxp: T::zero(),
            spp: h,
        }
    }

    /// Displaced thermal state at k_B T/ħω = `temperature`.
    pub fn thermal(state: CoherentState<T>, temperature: T) -> Result<Self> {
        if !(temperature >= T::zero()) || !temperature.is_finite() {
            return Err(Error::InvalidInput(format!("temperature must be ≥ 0, got {temperature}")));
        }
        let var = if temperature == T::zero() {
            T::lit(0.5)
        } else {
            // ½ coth(1/2T̃)
            let e = (-T::one() / temperature).exp();
            T::lit(0.5) * (T::one() + e) / (T::one() - e)
        };
        Ok(Self {
            x0: state.x0,
            p0: state.p0,
            sxx: var,
            sxp: T::zero(),
            spp: var,
        })
    }

    /// D(α)S(ζ)|0⟩ with ζ = r e^{iφ}.
    pub fn squeezed(alpha: Complex<T>, r: T, phi: T) -> Self {
        let (ch, sh) = (r.cosh(), r.sinh());
        let (s, c) = phi.sin_cos();
        let m = [[ch - c * sh, -s * sh], [-s * sh, ch + c * sh]];
        let h = T::lit(0.5);
        let centre = CoherentState::from_alpha(alpha);
        Self {
            x0: centre.x0,
            p0: centre.p0,
            sxx: h * (m[0][0] * m[0][0] + m[0][1] * m[0][1]),
            sxp: h * (m[0][0] * m[1][0] + m[0][1] * m[1][1]),
            spp: h * (m[1][0] * m[1][0] + m[1][1] * m[1][1]),
        }
    }

    fn det(&self) -> T {
        self.sxx * self.spp - self.sxp * self.sxp
    }

    /// Free oscillator evolution through phase θ.
    pub fn evolve(&self, theta: Phase<T>) -> Self {
        let (s, c) = theta.0.sin_cos();
        let (x0, p0) = classical_trajectory(CoherentState { x0: self.x0, p0: self.p0 }, theta);
        // R Σ Rᵀ with R = [[c, s], [−s, c]]
        let sxx = c * c * self.sxx + T::lit(2.0) * c * s * self.sxp + s * s * self.spp;
        let sxp = (c * c - s * s) * self.sxp + c * s * (self.spp - self.sxx);
        let spp = s * s * self.sxx - T::lit(2.0) * c * s * self.sxp + c * c * self.spp;
        Self { x0, p0, sxx, sxp, spp }
    }

    pub fn wigner(&self, x: T, p: T) -> T {
        let (dx, dp) = (x - self.x0, p - self.p0);
        let det = self.det();
        let quad = (self.spp * dx * dx - T::lit(2.0) * self.sxp * dx * dp + self.sxx * dp * dp) / det;
        (-T::lit(0.5) * quad).exp() / (T::lit(2.0) * T::PI() * det.sqrt())
    }

    /// Wigner function of the symmetrized chop ½(P_{s1}ρ + ρP_{s1}).
    pub fn chopped_wigner(&self, s1: SignChoice, x: T, p: T) -> T {
        let two = T::lit(2.0);
        let v = self.det() / self.sxx;
        let mu = self.p0 + self.sxp / self.sxx * (x - self.x0);
        let dx = x - self.x0;
        let m = (-dx * dx / (two * self.sxx)).exp() / (two * T::PI() * self.sxx).sqrt();
        let norm = m / (two * T::PI() * v).sqrt();
        let k = (p - mu) / (two * v).sqrt();
        let w = norm * (-k * k).exp();
        T::lit(0.5) * (w + s1.value::<T>() * norm * damped_re_erf((two * v).sqrt() * x, k))
    }

    /// Tr(P_{s1}ρ).
    pub fn chopped_norm(&self, s1: SignChoice) -> T {
        T::lit(0.5) * (T::one() + s1.value::<T>() * erf(self.x0 / (T::lit(2.0) * self.sxx).sqrt()))
    }
}

/// Grid size and tolerances for phase-space integration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    /// Half-width in units of √(2σ) (±6 around a coherent state's center).
    pub half_width: T,
    /// Nodes per axis; odd, so the doubled-spacing grid shares nodes.
    pub points: usize,
    pub richardson_tol: T,
}

impl<T: Real> Default for GridSpec<T> {
    fn default() -> Self {
        Self {
            half_width: T::lit(6.0),
            points: 801,
            richardson_tol: T::lit(1e-4),
        }
    }
}

impl<T: Real> GridSpec<T> {
    fn validate(&self) -> Result<()> {
        if self.points < 5 || self.points.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!("grid points must be odd and ≥ 5, got {}", self.points)));
        }
        if !(self.half_width > T::zero()) {
            return Err(Error::InvalidInput("grid half-width must be positive".into()));
        }
        Ok(())
    }
}

/// A sampled phase-space density with its marginals.
///
/// `values[ix * np + ip]` is the density at (x_min + ix·dx, p_min + ip·dp).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseField<T> {
    pub x_min: T,
    pub p_min: T,
    pub dx: T,
    pub dp: T,
    pub nx: usize,
    pub np: usize,
    pub values: Vec<T>,
    pub marginal_x: Vec<T>,
    pub marginal_p: Vec<T>,
    pub total: T,
}

impl<T: Real> PhaseField<T> {
    pub fn x_at(&self, ix: usize) -> T {
        self.x_min + T::from_usize_lossy(ix) * self.dx
    }

    pub fn p_at(&self, ip: usize) -> T {
        self.p_min + T::from_usize_lossy(ip) * self.dp
    }

    /// CSV with header `X,p,f`, one row per node.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::Io {
            path: "<phase field>".into(),
            message: e.to_string(),
        };
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["X", "p", "f"]).map_err(io)?;
        for ix in 0..self.nx {
            for ip in 0..self.np {
                let v = self.values[ix * self.np + ip];
                w.write_record([
                    format!("{:.16e}", self.x_at(ix)),
                    format!("{:.16e}", self.p_at(ip)),
                    format!("{v:.16e}"),
                ])
                .map_err(io)?;
            }
        }
        w.flush().map_err(|e| Error::Io {
            path: "<phase field>".into(),
            message: e.to_string(),
        })
    }
}

/// Region kept by the measurement factor θ(a X + b p).
#[derive(Clone, Copy, Debug)]
struct HalfPlane<T> {
    a: T,
    b: T,
}

/// Exact integrals of the four bilinear hat functions of the unit square over
/// its part where the linear form l(u, v) = l00 + (l10−l00)u + (l01−l00)v ≥ 0.
fn clipped_cell_weights<T: Real>(l00: T, l10: T, l01: T) -> [T; 4] {
    let l11 = l10 + l01 - l00;
    let corners = [(T::zero(), T::zero(), l00), (T::one(), T::zero(), l10), (T::one(), T::one(), l11), (T::zero(), T::one(), l01)];
    let quarter = T::lit(0.25);
    if corners.iter().all(|c| c.2 >= T::zero()) {
        return [quarter; 4];
    }
    if corners.iter().all(|c| c.2 <= T::zero()) {
        return [T::zero(); 4];
    }
    let mut poly: Vec<(T, T)> = Vec::with_capacity(5);
    for i in 0..4 {
        let (pu, pv, lp) = corners[i];
        let (qu, qv, lq) = corners[(i + 1) % 4];
        if lp >= T::zero() {
            poly.push((pu, pv));
        }
        if (lp >= T::zero()) != (lq >= T::zero()) {
            let t = lp / (lp - lq);
            poly.push((pu + t * (qu - pu), pv + t * (qv - pv)));
        }
    }
    // hats ordered (0,0), (1,0), (0,1), (1,1)
    let hats = |u: T, v: T| [(T::one() - u) * (T::one() - v), u * (T::one() - v), (T::one() - u) * v, u * v];
    let mut w = [T::zero(); 4];
    let half = T::lit(0.5);
    for k in 1..poly.len().saturating_sub(1) {
        let (a, b, c) = (poly[0], poly[k], poly[k + 1]);
        let area = half * ((b.0 - a.0) * (c.1 - a.1) - (c.0 - a.0) * (b.1 - a.1)).abs();
        let mids = [
            (half * (a.0 + b.0), half * (a.1 + b.1)),
            (half * (b.0 + c.0), half * (b.1 + c.1)),
            (half * (c.0 + a.0), half * (c.1 + a.1)),
        ];
        for m in mids {
            let h = hats(m.0, m.1);
            for j in 0..4 {
                w[j] += area / T::lit(3.0) * h[j];
            }
        }
    }
    w
}

struct Lattice<T> {
    x_min: T,
    p_min: T,
    dx: T,
    dp: T,
    n: usize,
}

impl<T: Real> Lattice<T> {
    fn coarsened(&self) -> Self {
        Self {
            x_min: self.x_min,
            p_min: self.p_min,
            dx: self.dx * T::lit(2.0),
            dp: self.dp * T::lit(2.0),
            n: self.n / 2 + 1,
        }
    }

    /// Node weights of the clipped bilinear rule, row-major like `PhaseField`.
    fn weights(&self, keep: Option<HalfPlane<T>>) -> Vec<T> {
        let n = self.n;
        let cell = self.dx * self.dp;
        let mut w = vec![T::zero(); n * n];
        let form = |ix: usize, ip: usize| match keep {
            Some(h) => h.a * (self.x_min + T::from_usize_lossy(ix) * self.dx) + h.b * (self.p_min + T::from_usize_lossy(ip) * self.dp),
            None => T::one(),
        };
        for ix in 0..n - 1 {
            for ip in 0..n - 1 {
                let cw = clipped_cell_weights(form(ix, ip), form(ix + 1, ip), form(ix, ip + 1));
                w[ix * n + ip] += cw[0] * cell;
                w[(ix + 1) * n + ip] += cw[1] * cell;
                w[ix * n + ip + 1] += cw[2] * cell;
                w[(ix + 1) * n + ip + 1] += cw[3] * cell;
            }
        }
        w
    }
}

fn step<T: Real>(v: T) -> T {
    if v > T::zero() {
        T::one()
    } else if v < T::zero() {
        T::zero()
    } else {
        T::lit(0.5)
    }
}

/// Integrates `density · θ(keep)` on the lattice. The returned value is
/// Richardson-extrapolated against the doubled spacing, and the residual is
/// the size of that correction; `PhaseField::total` is the plain fine-grid sum.
fn integrate_density<T: Real, F>(lat: &Lattice<T>, density: F, keep: Option<HalfPlane<T>>, tol: T) -> Result<(QpValue<T>, PhaseField<T>)>
where
    F: Fn(T, T) -> T + Sync,
{
    let n = lat.n;
    let raw: Vec<T> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (ix, ip) = (k / n, k % n);
            let x = lat.x_min + T::from_usize_lossy(ix) * lat.dx;
            let p = lat.p_min + T::from_usize_lossy(ip) * lat.dp;
            density(x, p)
        })
        .collect();

    let fine_w = lat.weights(keep);
    let coarse = lat.coarsened();
    let coarse_w = coarse.weights(keep);

    let mut total = T::zero();
    let mut marginal_x = vec![T::zero(); n];
    let mut marginal_p = vec![T::zero(); n];
    for ix in 0..n {
        for ip in 0..n {
            let c = fine_w[ix * n + ip] * raw[ix * n + ip];
            total += c;
            marginal_x[ix] += c / lat.dx;
            marginal_p[ip] += c / lat.dp;
        }
    }
    let mut coarse_total = T::zero();
    for ix in 0..coarse.n {
        for ip in 0..coarse.n {
            coarse_total += coarse_w[ix * coarse.n + ip] * raw[2 * ix * n + 2 * ip];
        }
    }
    let estimate = (total - coarse_total).abs() / T::lit(3.0);
    if estimate > tol {
        return Err(Error::GridTooCoarse {
            estimate: estimate.as_f64(),
            tol: tol.as_f64(),
        });
    }

    let values = match keep {
        None => raw,
        Some(h) => raw
            .into_iter()
            .enumerate()
            .map(|(k, v)| {
                let x = lat.x_min + T::from_usize_lossy(k / n) * lat.dx;
                let p = lat.p_min + T::from_usize_lossy(k % n) * lat.dp;
                v * step(h.a * x + h.b * p)
            })
            .collect(),
    };
    Ok((
        QpValue {
            value: total + (total - coarse_total) / T::lit(3.0),
            terms_used: n * n,
            residual: estimate,
        },
        PhaseField {
            x_min: lat.x_min,
            p_min: lat.p_min,
            dx: lat.dx,
            dp: lat.dp,
            nx: n,
            np: n,
            values,
            marginal_x,
            marginal_p,
            total,
        },
    ))
}

fn lattice_for<T: Real>(g: &GaussianState<T>, grid: &GridSpec<T>) -> Result<Lattice<T>> {
    grid.validate()?;
    let two = T::lit(2.0);
    let hx = grid.half_width * (two * g.sxx).sqrt();
    let hp = grid.half_width * (two * g.spp).sqrt();
    let cells = T::from_usize_lossy(grid.points - 1);
    Ok(Lattice {
        x_min: g.x0 - hx,
        p_min: g.p0 - hp,
        dx: two * hx / cells,
        dp: two * hp / cells,
        n: grid.points,
    })
}

/// q(s1, s2) at phases (0, θ2) for a gaussian state, as ∫ W_ρ̄ θ(s2 X_{−θ2}).
pub fn qp_via_wigner_gaussian<T: Real>(
    g: &GaussianState<T>,
    s1: SignChoice,
    s2: SignChoice,
    theta2: Phase<T>,
    grid: &GridSpec<T>,
) -> Result<(QpValue<T>, PhaseField<T>)> {
    if !theta2.0.is_finite() {
        return Err(Error::InvalidInput("non-finite θ2".into()));
    }
    let lat = lattice_for(g, grid)?;
    // Heisenberg x̂(θ2) has Weyl symbol X cos θ2 + p sin θ2
    let (s, c) = theta2.0.sin_cos();
    let sign = s2.value::<T>();
    let keep = HalfPlane { a: sign * c, b: sign * s };
    let g = *g;
    integrate_density(&lat, move |x, p| g.chopped_wigner(s1, x, p), Some(keep), grid.richardson_tol)
}

/// q(s1, s2) at phases (0, θ2) for the coherent state via phase space.
pub fn qp_via_wigner<T: Real>(
    state: CoherentState<T>,
    s1: SignChoice,
    s2: SignChoice,
    theta2: Phase<T>,
    grid: &GridSpec<T>,
) -> Result<(QpValue<T>, PhaseField<T>)> {
    qp_via_wigner_gaussian(&GaussianState::coherent(state), s1, s2, theta2, grid)
}

/// The chopped Wigner function alone, sampled on the grid.
pub fn chopped_field<T: Real>(state: CoherentState<T>, s1: SignChoice, grid: &GridSpec<T>) -> Result<PhaseField<T>> {
    let g = GaussianState::coherent(state);
    let lat = lattice_for(&g, grid)?;
    Ok(integrate_density(&lat, move |x, p| g.chopped_wigner(s1, x, p), None, grid.richardson_tol)?.1)
}

/// ⟨P_s(θ)⟩ = ½(1 + s erf(x_θ)).
pub fn projector_avg<T: Real>(state: CoherentState<T>, s: SignChoice, theta: Phase<T>) -> T {
    T::lit(0.5) * (T::one() + s.value::<T>() * erf(classical_trajectory(state, theta).0))
}

/// q^W(s1, s2) = 1 − ⟨P_{−s1}(0)⟩ − ⟨P_{−s2}(θ2)⟩ + p12(−s1, −s2).
pub fn wigner_lg2<T: Real>(state: CoherentState<T>, s1: SignChoice, s2: SignChoice, theta2: Phase<T>) -> Result<T> {
    let p12 = sequential_prob(state, s1.flip(), s2.flip(), theta2)?;
    Ok(T::one() - projector_avg(state, s1.flip(), Phase(T::zero())) - projector_avg(state, s2.flip(), theta2) + p12)
}

/// q^W(A, B) = 1 − |a|² − |b|² + |a|²|⟨A|B⟩|² for rank-one projectors.
///
/// `a = ⟨ψ|A⟩`, `b = ⟨ψ|B⟩`; rejects data no unit ψ, A, B can realize.
pub fn projector_qw_bound<T: Real>(overlap: Complex<T>, a: Complex<T>, b: Complex<T>) -> Result<T> {
    let (na, nb, no) = (a.norm_sqr(), b.norm_sqr(), overlap.norm_sqr());
    let det = T::one() - na - nb - no + T::lit(2.0) * (a * overlap * b.conj()).re;
    let slack = -T::lit(1e3) * T::epsilon();
    if det < slack || T::one() - na < slack || T::one() - nb < slack || T::one() - no < slack {
        return Err(Error::InconsistentGram { det: det.as_f64() });
    }
    Ok(T::one() - na - nb + na * no)
}
