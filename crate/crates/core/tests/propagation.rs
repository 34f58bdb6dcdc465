//! Brute-force Crank-Nicolson propagation on a position grid, used as an
//! independent check of the phase and sign conventions.

use num_complex::Complex64 as C;
use qho_lg::currents::sequential_prob;
use qho_lg::lg::quasiprob;
use qho_lg::{CoherentState, Phase, SignChoice, Truncation};

struct Grid {
    x: Vec<f64>,
    dx: f64,
}

impl Grid {
    fn new(half: f64, n: usize) -> Self {
        let dx = 2.0 * half / (n - 1) as f64;
        Self {
            x: (0..n).map(|i| -half + i as f64 * dx).collect(),
            dx,
        }
    }

    fn coherent(&self, s: CoherentState<f64>) -> Vec<C> {
        let norm = std::f64::consts::PI.powf(-0.25);
        self.x
            .iter()
            .map(|&x| C::from_polar(norm * (-(x - s.x0).powi(2) / 2.0).exp(), s.p0 * x))
            .collect()
    }

    /// i∂ψ/∂θ = (−½∂² + ½x²)ψ, Dirichlet walls, to phase `theta`.
    fn evolve(&self, psi: &[C], theta: f64, steps: usize) -> Vec<C> {
        let n = psi.len();
        let dt = theta / steps as f64;
        let k = 0.5 / (self.dx * self.dx);
        let half = C::new(0.0, 0.5 * dt);
        // H = tridiag(−k, 2k + V, −k)
        let diag: Vec<f64> = self.x.iter().map(|&x| 2.0 * k + 0.5 * x * x).collect();
        let mut cur = psi.to_vec();
        let mut rhs = vec![C::new(0.0, 0.0); n];
        let mut cp = vec![C::new(0.0, 0.0); n];
        for _ in 0..steps {
            for i in 0..n {
                let mut h = cur[i] * diag[i];
                if i > 0 {
                    h -= cur[i - 1] * k;
                }
                if i + 1 < n {
                    h -= cur[i + 1] * k;
                }
                rhs[i] = cur[i] - half * h;
            }
            // Thomas solve of (1 + i dt/2 H) next = rhs
            let off = half * (-k);
            let mut b0 = C::new(1.0, 0.0) + half * diag[0];
            cp[0] = off / b0;
            cur[0] = rhs[0] / b0;
            for i in 1..n {
                b0 = C::new(1.0, 0.0) + half * diag[i] - off * cp[i - 1];
                cp[i] = off / b0;
                cur[i] = (rhs[i] - off * cur[i - 1]) / b0;
            }
            for i in (0..n - 1).rev() {
                let next = cur[i + 1];
                cur[i] -= cp[i] * next;
            }
        }
        cur
    }

    /// Half-line weight: ½ on the node at the jump.
    fn weight(x: f64, s: SignChoice) -> f64 {
        let side = match s {
            SignChoice::Plus => x,
            SignChoice::Minus => -x,
        };
        if side > 0.0 {
            1.0
        } else if side == 0.0 {
            0.5
        } else {
            0.0
        }
    }

    fn chop(&self, psi: &[C], s: SignChoice) -> Vec<C> {
        psi.iter().zip(&self.x).map(|(&v, &x)| v * Self::weight(x, s)).collect()
    }

    /// ∫ over the s half-line of a* b.
    fn half_overlap(&self, a: &[C], b: &[C], s: SignChoice) -> C {
        a.iter()
            .zip(b)
            .zip(&self.x)
            .map(|((u, v), &x)| u.conj() * v * Self::weight(x, s))
            .sum::<C>()
            * self.dx
    }
}

#[test]
fn mean_position_follows_x0_cos_plus_p0_sin() {
    let g = Grid::new(10.0, 1201);
    let s = CoherentState::new(0.55, -1.925).unwrap();
    let theta = 0.7;
    let psi = g.evolve(&g.coherent(s), theta, 1400);
    let mean: f64 = psi.iter().zip(&g.x).map(|(v, &x)| v.norm_sqr() * x).sum::<f64>() * g.dx;
    let expect = s.x0 * theta.cos() + s.p0 * theta.sin();
    assert!((mean - expect).abs() < 1e-3, "{mean} vs {expect}");
}

#[test]
fn quasiprob_matches_grid_propagation() {
    let g = Grid::new(10.0, 4001);
    let s = CoherentState::new(0.55, -1.925).unwrap();
    let theta = 0.555;
    let psi = g.coherent(s);
    let full = g.evolve(&psi, theta, 4000);
    for s1 in SignChoice::BOTH {
        let chopped = g.evolve(&g.chop(&psi, s1), theta, 4000);
        for s2 in SignChoice::BOTH {
            // Re⟨ψ(θ)| P_{s2} U(θ) P_{s1} |ψ⟩
            let q_grid = g.half_overlap(&full, &chopped, s2).re;
            let q = quasiprob(s, s1, s2, Phase(0.0), Phase(theta), &Truncation::default()).unwrap().value;
            assert!((q - q_grid).abs() < 1e-3, "{s1:?}{s2:?}: {q} vs grid {q_grid}");
            let p_grid = g.half_overlap(&chopped, &chopped, s2).re;
            let p = sequential_prob(s, s1, s2, Phase(theta)).unwrap();
            assert!((p - p_grid).abs() < 1e-3, "{s1:?}{s2:?}: {p} vs grid {p_grid}");
        }
    }
    // the mirrored momentum is not violating at this spacing
    let mirrored = CoherentState::new(0.55, 1.925).unwrap();
    let q = quasiprob(mirrored, SignChoice::Minus, SignChoice::Plus, Phase(0.0), Phase(theta), &Truncation::default()).unwrap();
    assert!(q.value > 0.0, "{q:?}");
}
