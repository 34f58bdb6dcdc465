//! Derivative-free minimizers: Nelder–Mead simplex and golden-section search.

use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct SimplexResult<T> {
    pub x: Vec<T>,
    pub value: T,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct NelderMead<T> {
    pub f_tol: T,
    pub x_tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for NelderMead<T> {
    fn default() -> Self {
        Self {
            f_tol: T::lit(1e-12),
            x_tol: T::lit(1e-9),
            max_iter: 5000,
        }
    }
}

impl<T: Real> NelderMead<T> {
    /// Minimize `f` from `x0` with per-coordinate initial simplex offsets `step`.
    pub fn minimize<F: FnMut(&[T]) -> T>(&self, mut f: F, x0: &[T], step: &[T]) -> SimplexResult<T> {
        let n = x0.len();
        assert_eq!(step.len(), n);
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        let mut pts: Vec<Vec<T>> = Vec::with_capacity(n + 1);
        pts.push(x0.to_vec());
        for i in 0..n {
            let mut p = x0.to_vec();
            p[i] += step[i];
            pts.push(p);
        }
        let mut vals: Vec<T> = pts.iter().map(|p| f(p)).collect();
        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iter {
            iterations += 1;
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap_or(std::cmp::Ordering::Equal));
            pts = order.iter().map(|&i| pts[i].clone()).collect();
            vals = order.iter().map(|&i| vals[i]).collect();

            let spread = (vals[n] - vals[0]).abs();
            let size = pts[1..]
                .iter()
                .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (*a - *b).abs()))
                .fold(T::zero(), T::max);
            if spread <= self.f_tol && size <= self.x_tol {
                converged = true;
                break;
            }

            let mut centroid = vec![T::zero(); n];
            for p in &pts[..n] {
                for (c, v) in centroid.iter_mut().zip(p) {
                    *c += *v;
                }
            }
            let inv = T::one() / T::from_usize_lossy(n);
            centroid.iter_mut().for_each(|c| *c *= inv);
            let along = |t: T| -> Vec<T> {
                centroid
                    .iter()
                    .zip(&pts[n])
                    .map(|(c, w)| *c + t * (*w - *c))
                    .collect()
            };

            let xr = along(-T::one());
            let fr = f(&xr);
            if fr < vals[0] {
                let xe = along(-two);
                let fe = f(&xe);
                if fe < fr {
                    pts[n] = xe;
                    vals[n] = fe;
                } else {
                    pts[n] = xr;
                    vals[n] = fr;
                }
                continue;
            }
            if fr < vals[n - 1] {
                pts[n] = xr;
                vals[n] = fr;
                continue;
            }
            let (xc, fc) = if fr < vals[n] {
                let xc = along(-half);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(half);
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < vals[n].min(fr) {
                pts[n] = xc;
                vals[n] = fc;
                continue;
            }
            let best = pts[0].clone();
            for i in 1..=n {
                pts[i] = pts[i]
                    .iter()
                    .zip(&best)
                    .map(|(p, b)| *b + half * (*p - *b))
                    .collect();
                vals[i] = f(&pts[i]);
            }
        }
        let (ib, _) = vals
            .iter()
            .enumerate()
            .fold((0, T::infinity()), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        SimplexResult {
            x: pts[ib].clone(),
            value: vals[ib],
            iterations,
            converged,
        }
    }
}

/// Golden-section minimization on [a, b] down to bracket width `tol`.
/// Returns (argmin, min).
pub fn golden_section<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, tol: T) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) * T::lit(0.5);
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let nm = NelderMead::<f64> {
            f_tol: 1e-14,
            x_tol: 1e-8,
            max_iter: 20000,
        };
        let r = nm.minimize(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &[0.1, 0.1],
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn golden_quadratic() {
        let (x, v) = golden_section(|x: f64| (x - 0.3).powi(2) + 2.0, -1.0, 2.0, 1e-9);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 2.0).abs() < 1e-15);
    }
}
