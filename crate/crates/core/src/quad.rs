//! Adaptive Gauss–Kronrod (7/15) quadrature on finite and infinite intervals.

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct GaussKronrod<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Real> Default for GaussKronrod<T> {
    fn default() -> Self {
        Self::new(T::lit(1e-10), T::lit(1e-10))
    }
}

#[derive(Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn kronrod<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Panel<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let h = half * (b - a);
    let fc = f(center);
    let mut resk = fc * T::lit(WGK[7]);
    let mut resg = fc * T::lit(WG[3]);
    let mut resabs = resk.abs();
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = h * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let wk = T::lit(WGK[j]);
        resk += wk * (f1 + f2);
        resabs += wk * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = resk * half;
    let mut resasc = T::lit(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        resasc += T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * h;
    resabs *= h.abs();
    resasc *= h.abs();
    let mut error = ((resk - resg) * h).abs();
    if resasc != T::zero() && error != T::zero() {
        let scale = (T::lit(200.0) * error / resasc).powf(T::lit(1.5));
        error = resasc * scale.min(T::one());
    }
    let floor = T::lit(50.0) * T::epsilon() * resabs;
    if resabs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) {
        error = error.max(floor);
    }
    Panel { a, b, value, error }
}

impl<T: Real> GaussKronrod<T> {
    pub fn new(abs_tol: T, rel_tol: T) -> Self {
        Self {
            abs_tol,
            rel_tol,
            max_intervals: 4000,
        }
    }

    pub fn with_max_intervals(mut self, n: usize) -> Self {
        self.max_intervals = n.max(1);
        self
    }

    /// ∫_a^b f.
    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F, a: T, b: T) -> Result<Integral<T>> {
        if a == b {
            return Ok(Integral {
                value: T::zero(),
                error: T::zero(),
                evaluations: 0,
            });
        }
        let mut panels = vec![kronrod(&mut f, a, b)];
        let mut evaluations = 15;
        loop {
            let value: T = panels.iter().map(|p| p.value).sum();
            let error: T = panels.iter().map(|p| p.error).sum();
            let tol = self.abs_tol.max(self.rel_tol * value.abs());
            if !value.is_finite() {
                return Err(Error::Quadrature {
                    error: f64::INFINITY,
                    tol: tol.as_f64(),
                });
            }
            if error <= tol {
                return Ok(Integral {
                    value,
                    error,
                    evaluations,
                });
            }
            if panels.len() >= self.max_intervals {
                return Err(Error::Quadrature {
                    error: error.as_f64(),
                    tol: tol.as_f64(),
                });
            }
            let (worst, _) = panels
                .iter()
                .enumerate()
                .fold((0, T::neg_infinity()), |acc, (i, p)| {
                    if p.error > acc.1 {
                        (i, p.error)
                    } else {
                        acc
                    }
                });
            let p = panels.swap_remove(worst);
            let mid = T::lit(0.5) * (p.a + p.b);
            if mid <= p.a.min(p.b) || mid >= p.a.max(p.b) {
                return Err(Error::Quadrature {
                    error: error.as_f64(),
                    tol: tol.as_f64(),
                });
            }
            panels.push(kronrod(&mut f, p.a, mid));
            panels.push(kronrod(&mut f, mid, p.b));
            evaluations += 30;
        }
    }

    /// ∫_a^∞ f, via x = a + t/(1−t).
    pub fn integrate_upper<F: FnMut(T) -> T>(&self, mut f: F, a: T) -> Result<Integral<T>> {
        self.integrate(
            |t| {
                let s = T::one() - t;
                f(a + t / s) / (s * s)
            },
            T::zero(),
            T::one(),
        )
    }

    /// ∫_{−∞}^b f.
    pub fn integrate_lower<F: FnMut(T) -> T>(&self, mut f: F, b: T) -> Result<Integral<T>> {
        self.integrate_upper(|x| f(-x), -b)
    }

    /// ∫_{−∞}^{∞} f, split at `pivot`.
    pub fn integrate_line<F: FnMut(T) -> T>(&self, mut f: F, pivot: T) -> Result<Integral<T>> {
        let half = GaussKronrod {
            abs_tol: self.abs_tol * T::lit(0.5),
            ..*self
        };
        let up = half.integrate_upper(&mut f, pivot)?;
        let lo = half.integrate_lower(&mut f, pivot)?;
        Ok(Integral {
            value: up.value + lo.value,
            error: up.error + lo.error,
            evaluations: up.evaluations + lo.evaluations,
        })
    }
}
