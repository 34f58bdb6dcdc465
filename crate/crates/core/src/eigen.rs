//! Oscillator eigenfunctions by normalized recurrence, and half-line overlaps.

use crate::error::{Error, Result};
use crate::quad::GaussKronrod;
use crate::scalar::Real;
use crate::special::erfc;

/// Immutable table of recurrence constants for ψ_0..ψ_{n_max}.
///
/// ψ_{n+1} = √(2/(n+1)) x ψ_n − √(n/(n+1)) ψ_{n−1}. Shareable across threads.
#[derive(Clone, Debug)]
pub struct Eigenbasis<T> {
    n_max: usize,
    up: Vec<T>,
    down: Vec<T>,
    sqrt_2n: Vec<T>,
}

impl<T: Real> Eigenbasis<T> {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidInput("eigenbasis needs n_max ≥ 1".into()));
        }
        let up = (0..n_max)
            .map(|n| (T::lit(2.0) / T::from_usize_lossy(n + 1)).sqrt())
            .collect();
        let down = (0..n_max)
            .map(|n| (T::from_usize_lossy(n) / T::from_usize_lossy(n + 1)).sqrt())
            .collect();
        let sqrt_2n = (0..=n_max)
            .map(|n| (T::lit(2.0) * T::from_usize_lossy(n)).sqrt())
            .collect();
        Ok(Self {
            n_max,
            up,
            down,
            sqrt_2n,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            Err(Error::IndexOutOfRange {
                index: n,
                n_max: self.n_max,
            })
        } else {
            Ok(())
        }
    }

    /// Writes ψ_0(x)..ψ_{out.len()−1}(x).
    pub fn fill(&self, x: T, out: &mut [T]) -> Result<()> {
        if out.is_empty() {
            return Ok(());
        }
        self.check(out.len() - 1)?;
        out[0] = ground(x);
        if out.len() > 1 {
            out[1] = T::SQRT_2() * x * out[0];
        }
        for n in 1..out.len().saturating_sub(1) {
            out[n + 1] = self.up[n] * x * out[n] - self.down[n] * out[n - 1];
        }
        Ok(())
    }

    /// (ψ_n(x), ψ'_n(x)).
    pub fn eigenfunction(&self, n: usize, x: T) -> Result<(T, T)> {
        self.check(n)?;
        let (prev, cur) = self.pair(n, x);
        Ok((cur, self.sqrt_2n[n] * prev - x * cur))
    }

    /// (ψ_{n−1}(x), ψ_n(x)) with ψ_{−1} = 0.
    fn pair(&self, n: usize, x: T) -> (T, T) {
        let mut prev = T::zero();
        let mut cur = ground(x);
        for k in 0..n {
            let next = if k == 0 {
                T::SQRT_2() * x * cur
            } else {
                self.up[k] * x * cur - self.down[k] * prev
            };
            prev = cur;
            cur = next;
        }
        (prev, cur)
    }

    /// ∫_a^∞ ψ_m ψ_n dx.
    pub fn overlap_halfline(&self, m: usize, n: usize, a: T) -> Result<T> {
        self.check(m)?;
        self.check(n)?;
        if m == n {
            return self.diagonal(n, a);
        }
        let (m, n) = if m < n { (m, n) } else { (n, m) };
        let (pm1, pm) = self.pair(m, a);
        let (pn1, pn) = self.pair(n, a);
        let num = self.sqrt_2n[n] * pn1 * pm - self.sqrt_2n[m] * pm1 * pn;
        Ok(num / (T::lit(2.0) * T::from_usize_lossy(n - m)))
    }

    fn diagonal(&self, n: usize, a: T) -> Result<T> {
        if n == 0 {
            return Ok(T::lit(0.5) * erfc(a));
        }
        if a < T::zero() {
            return Ok(T::one() - self.diagonal(n, -a)?);
        }
        let reach = (T::from_usize_lossy(2 * n + 1)).sqrt() + T::lit(10.0);
        let quad = GaussKronrod::new(T::lit(1e-13), T::lit(1e-12));
        let f = |x: T| {
            let (_, v) = self.pair(n, x);
            v * v
        };
        let r = if a >= reach {
            quad.integrate_upper(f, a)?
        } else {
            quad.integrate(f, a, reach)?
        };
        Ok(r.value)
    }
}

/// ψ_0(x) = π^{−1/4} e^{−x²/2}.
#[inline]
pub fn ground<T: Real>(x: T) -> T {
    T::PI().powf(T::lit(-0.25)) * (-x * x * T::lit(0.5)).exp()
}

/// J_{0n}(a) = ∫_a^∞ ψ_0 ψ_n for n = 1..=count, streamed into `out[n-1]`.
pub fn ground_overlaps<T: Real>(a: T, out: &mut [T]) {
    let g = ground(a);
    let mut prev = T::zero();
    let mut cur = g;
    let mut sqrt_nm1 = T::zero();
    for (i, slot) in out.iter_mut().enumerate() {
        let sqrt_n = T::from_usize_lossy(i + 1).sqrt();
        *slot = g * cur / (T::SQRT_2() * sqrt_n);
        let r = T::one() / sqrt_n;
        let next = T::SQRT_2() * r * a * cur - sqrt_nm1 * r * prev;
        prev = cur;
        cur = next;
        sqrt_nm1 = sqrt_n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_order_values() {
        let b = Eigenbasis::<f64>::new(40).unwrap();
        let pi4 = std::f64::consts::PI.powf(-0.25);
        assert_eq!(b.eigenfunction(0, 0.0).unwrap(), (pi4, 0.0));
        let (v, d) = b.eigenfunction(1, 0.0).unwrap();
        assert_eq!(v, 0.0);
        assert_relative_eq!(d, 2f64.sqrt() * pi4, max_relative = 1e-15);
    }

    #[test]
    fn high_order_against_extended_precision() {
        let b = Eigenbasis::<f64>::new(200).unwrap();
        let (v, d) = b.eigenfunction(25, 1.3).unwrap();
        assert_relative_eq!(v, 0.05731102076154465218759342, max_relative = 1e-12);
        assert_relative_eq!(d, -2.075037579691192403440487, max_relative = 1e-12);
        let (v, _) = b.eigenfunction(200, 7.5).unwrap();
        assert_relative_eq!(v, -0.09112306655642863932623336, max_relative = 1e-10);
        let (v, _) = b.eigenfunction(150, -10.0).unwrap();
        assert_relative_eq!(v, -0.2118525967663007919273761, max_relative = 1e-10);
    }

    #[test]
    fn index_guard() {
        let b = Eigenbasis::<f64>::new(5).unwrap();
        assert!(matches!(b.eigenfunction(6, 0.0), Err(Error::IndexOutOfRange { .. })));
        assert!(Eigenbasis::<f64>::new(0).is_err());
    }

    #[test]
    fn overlap_examples() {
        let b = Eigenbasis::<f64>::new(200).unwrap();
        assert_relative_eq!(b.overlap_halfline(0, 0, 0.0).unwrap(), 0.5, max_relative = 1e-15);
        assert!(b.overlap_halfline(0, 2, -12.0).unwrap().abs() < 1e-12);
        assert_relative_eq!(b.overlap_halfline(3, 3, 0.7).unwrap(), 0.4022552466345765479630148, epsilon = 1e-12);
        assert_relative_eq!(b.overlap_halfline(40, 40, -2.3).unwrap(), 0.5820255163794932679311404, epsilon = 1e-11);
        assert_eq!(b.overlap_halfline(2, 7, 0.4).unwrap(), b.overlap_halfline(7, 2, 0.4).unwrap());
    }

    #[test]
    fn off_diagonal_matches_quadrature() {
        let b = Eigenbasis::<f64>::new(20).unwrap();
        let q = GaussKronrod::new(1e-13, 1e-13);
        for &(m, n, a) in &[(1usize, 4usize, 0.3f64), (5, 2, -1.1), (0, 9, 0.8)] {
            let direct = q
                .integrate_upper(|x| b.eigenfunction(m, x).unwrap().0 * b.eigenfunction(n, x).unwrap().0, a)
                .unwrap()
                .value;
            assert_relative_eq!(b.overlap_halfline(m, n, a).unwrap(), direct, epsilon = 1e-11);
        }
    }

    #[test]
    fn streamed_ground_overlaps() {
        let b = Eigenbasis::<f64>::new(50).unwrap();
        let mut out = vec![0.0; 50];
        ground_overlaps(-0.9, &mut out);
        for n in 1..=50 {
            assert_relative_eq!(out[n - 1], b.overlap_halfline(0, n, -0.9).unwrap(), epsilon = 1e-15);
        }
    }

    #[test]
    fn completeness_of_ground_projection() {
        // Σ_{n≤N} J_{0n}(a)² → J_00(a); the tail falls off like N^{-1/2}
        let b = Eigenbasis::<f64>::new(10).unwrap();
        for &a in &[-3.0, -1.0, 0.0, 0.4, 2.0, 3.0] {
            let j00 = b.overlap_halfline(0, 0, a).unwrap();
            let gap = |n: usize| {
                let mut out = vec![0.0; n];
                ground_overlaps(a, &mut out);
                j00 - j00 * j00 - out.iter().map(|v| v * v).sum::<f64>()
            };
            let gaps: Vec<f64> = [200, 800, 3200, 12800].iter().map(|&n| gap(n)).collect();
            for w in gaps.windows(2) {
                assert!(w[1] > 0.0 && w[1] < w[0], "a = {a}: {gaps:?}");
                let ratio = w[0] / w[1];
                assert!((1.7..2.3).contains(&ratio), "a = {a}: rate {ratio}");
            }
        }
        let mut out = vec![0.0; 200];
        ground_overlaps(3.0, &mut out);
        let j00 = b.overlap_halfline(0, 0, 3.0).unwrap();
        assert!((j00 - j00 * j00 - out.iter().map(|v| v * v).sum::<f64>()) < 1.2e-6);
    }

    #[test]
    fn single_precision_recurrence() {
        let b = Eigenbasis::<f32>::new(30).unwrap();
        let (v, _) = b.eigenfunction(25, 1.3).unwrap();
        assert!((v - 0.057311).abs() < 1e-4);
    }
}
