//! Embedded Dormand–Prince 5(4) integration of scalar ODEs.

use crate::scalar::Real;

#[derive(Clone, Copy, Debug)]
pub struct DormandPrince<T> {
    pub rtol: T,
    pub atol: T,
    pub h_min: T,
    pub max_steps: usize,
}

impl<T: Real> Default for DormandPrince<T> {
    fn default() -> Self {
        Self {
            rtol: T::lit(1e-8),
            atol: T::lit(1e-10),
            h_min: T::lit(1e-14),
            max_steps: 200_000,
        }
    }
}

/// Why an integration stopped early.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Halt<T> {
    /// The right-hand side refused to evaluate at (t, x).
    Rhs { t: T, x: T },
    StepUnderflow { t: T },
    TooManySteps { t: T },
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

impl<T: Real> DormandPrince<T> {
    /// Integrate dx/dt = f(t, x) from (t0, x0), reporting x at each of `outputs`
    /// (ascending, ≥ t0). `f` returns `None` where the field is undefined.
    /// On early halt returns the values reached so far plus the reason.
    pub fn solve<F>(&self, mut f: F, t0: T, x0: T, outputs: &[T]) -> (Vec<T>, Option<Halt<T>>)
    where
        F: FnMut(T, T) -> Option<T>,
    {
        let mut out = Vec::with_capacity(outputs.len());
        let (mut t, mut x) = (t0, x0);
        let span = outputs.last().map(|&e| (e - t0).abs()).unwrap_or(T::one());
        let mut h = (span * T::lit(1e-3)).max(self.h_min * T::lit(10.0));
        let mut steps = 0;
        let mut k = [T::zero(); 7];
        let mut k0_valid = false;
        for &target in outputs {
            while t < target {
                if steps >= self.max_steps {
                    return (out, Some(Halt::TooManySteps { t }));
                }
                let step = h.min(target - t);
                if !k0_valid {
                    match f(t, x) {
                        Some(v) => k[0] = v,
                        None => return (out, Some(Halt::Rhs { t, x })),
                    }
                    k0_valid = true;
                }
                let mut failed = false;
                for s in 1..7 {
                    let mut xs = x;
                    for j in 0..s {
                        xs += step * T::lit(A[s][j]) * k[j];
                    }
                    match f(t + T::lit(C[s]) * step, xs) {
                        Some(v) => k[s] = v,
                        None => {
                            failed = true;
                            break;
                        }
                    }
                }
                steps += 1;
                if failed {
                    h = step * T::lit(0.25);
                    if h < self.h_min {
                        return (out, Some(Halt::Rhs { t, x }));
                    }
                    continue;
                }
                let mut x5 = x;
                let mut x4 = x;
                for s in 0..7 {
                    x5 += step * T::lit(B5[s]) * k[s];
                    x4 += step * T::lit(B4[s]) * k[s];
                }
                let scale = self.atol + self.rtol * x.abs().max(x5.abs());
                let err = ((x5 - x4) / scale).abs();
                if err <= T::one() {
                    t = if step == target - t { target } else { t + step };
                    x = x5;
                    k[0] = k[6];
                    let grow = if err == T::zero() {
                        T::lit(5.0)
                    } else {
                        (T::lit(0.9) * err.powf(T::lit(-0.2))).min(T::lit(5.0))
                    };
                    if step == h || grow < T::one() {
                        h = step * grow;
                    }
                } else {
                    h = step * (T::lit(0.9) * err.powf(T::lit(-0.2))).max(T::lit(0.1));
                    if h < self.h_min {
                        return (out, Some(Halt::StepUnderflow { t }));
                    }
                }
            }
            out.push(x);
        }
        (out, None)
    }
}
