//! Complex error function family built on the Faddeeva function.

use num_complex::Complex;

use crate::scalar::Real;

/// Faddeeva function w(z) = e^{-z²} erfc(-iz).
///
/// Poppe & Wijers continued-fraction / Taylor scheme, with the usual
/// reflection for the lower half plane. Relative accuracy is about 1e-14 in f64.
pub fn faddeeva<T: Real>(z: Complex<T>) -> Complex<T> {
    let (xi, yi) = (z.re, z.im);
    let zero = T::zero();
    let one = T::one();
    let two = T::lit(2.0);
    let factor = T::FRAC_2_SQRT_PI();

    let xabs = xi.abs();
    let yabs = yi.abs();
    let x = xabs / T::lit(6.3);
    let y = yabs / T::lit(4.4);
    let mut qrho = x * x + y * y;
    let xabsq = xabs * xabs;
    let mut xquad = xabsq - yabs * yabs;
    let yquad = two * xabs * yabs;

    let small = qrho < T::lit(0.085264);
    let (mut u, mut v);
    let (mut u2, mut v2) = (zero, zero);

    if small {
        qrho = (one - T::lit(0.85) * y) * qrho.sqrt();
        let n = (T::lit(6.0) + T::lit(72.0) * qrho).round().to_usize().unwrap_or(6);
        let mut j = 2 * n + 1;
        let mut xsum = one / T::from_usize_lossy(j);
        let mut ysum = zero;
        for i in (1..=n).rev() {
            j -= 2;
            let fi = T::from_usize_lossy(i);
            let xaux = (xsum * xquad - ysum * yquad) / fi;
            ysum = (xsum * yquad + ysum * xquad) / fi;
            xsum = xaux + one / T::from_usize_lossy(j);
        }
        let u1 = -factor * (xsum * yabs + ysum * xabs) + one;
        let v1 = factor * (xsum * xabs - ysum * yabs);
        let daux = (-xquad).exp();
        u2 = daux * yquad.cos();
        v2 = -daux * yquad.sin();
        u = u1 * u2 - v1 * v2;
        v = u1 * v2 + v1 * u2;
    } else {
        let (h, kapn, nu);
        if qrho > one {
            h = zero;
            kapn = 0usize;
            qrho = qrho.sqrt();
            nu = (T::lit(3.0) + T::lit(1442.0) / (T::lit(26.0) * qrho + T::lit(77.0)))
                .floor()
                .to_usize()
                .unwrap_or(3);
        } else {
            qrho = (one - y) * (one - qrho).sqrt();
            h = T::lit(1.88) * qrho;
            kapn = (T::lit(7.0) + T::lit(34.0) * qrho).round().to_usize().unwrap_or(7);
            nu = (T::lit(16.0) + T::lit(26.0) * qrho).round().to_usize().unwrap_or(16);
        }
        let h2 = two * h;
        let use_h = h > zero;
        let mut qlambda = if use_h { h2.powi(kapn as i32) } else { zero };
        let (mut rx, mut ry, mut sx, mut sy) = (zero, zero, zero, zero);
        for n in (0..=nu).rev() {
            let np1 = T::from_usize_lossy(n + 1);
            let tx = yabs + h + np1 * rx;
            let ty = xabs - np1 * ry;
            let c = T::lit(0.5) / (tx * tx + ty * ty);
            rx = c * tx;
            ry = c * ty;
            if use_h && n <= kapn {
                let tx = qlambda + sx;
                sx = rx * tx - ry * sy;
                sy = ry * tx + rx * sy;
                qlambda /= h2;
            }
        }
        if h == zero {
            u = factor * rx;
            v = factor * ry;
        } else {
            u = factor * sx;
            v = factor * sy;
        }
        if yabs == zero {
            u = (-xabs * xabs).exp();
        }
    }

    if yi < zero {
        if small {
            u2 = two * u2;
            v2 = two * v2;
        } else {
            xquad = -xquad;
            let w1 = two * xquad.exp();
            u2 = w1 * yquad.cos();
            v2 = -w1 * yquad.sin();
        }
        u = u2 - u;
        v = v2 - v;
        if xi > zero {
            v = -v;
        }
    } else if xi < zero {
        v = -v;
    }
    Complex::new(u, v)
}

fn erf_series<T: Real>(z: Complex<T>) -> Complex<T> {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let eps = T::epsilon();
    for n in 1..200usize {
        let fname = T::from_usize_lossy(n);
        term = -term * z2 / fname;
        let add = term / T::from_usize_lossy(2 * n + 1);
        sum += add;
        if add.norm() <= eps * sum.norm() {
            break;
        }
    }
    sum * T::FRAC_2_SQRT_PI()
}

/// Complex error function.
pub fn erf_complex<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.norm() < T::lit(1.5) {
        return erf_series(z);
    }
    if z.re < T::zero() {
        return -erf_complex(-z);
    }
    let one = Complex::new(T::one(), T::zero());
    one - (-z * z).exp() * faddeeva(Complex::new(-z.im, z.re))
}

/// Complex complementary error function.
pub fn erfc_complex<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.re < T::zero() {
        return Complex::new(T::lit(2.0), T::zero()) - erfc_complex(-z);
    }
    if z.norm() < T::lit(0.5) {
        return Complex::new(T::one(), T::zero()) - erf_series(z);
    }
    (-z * z).exp() * faddeeva(Complex::new(-z.im, z.re))
}

/// Real error function.
pub fn erf<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1.5) {
        return erf_series(Complex::new(x, T::zero())).re;
    }
    let s = x.signum();
    s * (T::one() - erfc(x.abs()))
}

/// Real complementary error function, accurate in the far tail.
pub fn erfc<T: Real>(x: T) -> T {
    if x < T::zero() {
        return T::lit(2.0) - erfc(-x);
    }
    if x < T::lit(0.5) {
        return T::one() - erf_series(Complex::new(x, T::zero())).re;
    }
    (-x * x).exp() * faddeeva(Complex::new(T::zero(), x)).re
}

/// e^{-k²} · Re erf(x + i k), evaluated without overflow for large |k|.
pub fn damped_re_erf<T: Real>(x: T, k: T) -> T {
    if x < T::zero() {
        return -damped_re_erf(-x, -k);
    }
    let w = faddeeva(Complex::new(-k, x));
    let phase = Complex::new(T::zero(), -T::lit(2.0) * x * k).exp();
    (-k * k).exp() - (phase * w).re * (-x * x).exp()
}

/// Γ(k/2) for positive integer k, by exact half-integer recursion.
pub fn gamma_half<T: Real>(k: usize) -> T {
    assert!(k > 0, "gamma_half needs k ≥ 1");
    let mut g = if k.is_multiple_of(2) { T::one() } else { T::PI().sqrt() };
    let mut m = if k.is_multiple_of(2) { 2 } else { 1 };
    while m < k {
        g = g * T::from_usize_lossy(m) / T::lit(2.0);
        m += 2;
    }
    g
}

/// n! as a float.
pub fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * T::from_usize_lossy(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type C = Complex<f64>;

    #[test]
    fn erf_zero_and_symmetry() {
        assert_eq!(erf_complex(C::new(0.0, 0.0)), C::new(0.0, 0.0));
        let z = C::new(0.3, 0.7);
        let a = erf_complex(z.conj());
        let b = erf_complex(z).conj();
        assert!((a - b).norm() < 1e-12);
        for &z in &[C::new(0.3, 0.7), C::new(2.1, -0.4), C::new(-3.0, 5.0), C::new(0.01, 8.0)] {
            let d = erf_complex(-z) + erf_complex(z);
            assert!(d.norm() <= 1e-12 * erf_complex(z).norm().max(1.0));
        }
    }

    #[test]
    fn erf_frozen_values() {
        // 30-digit reference values
        let v = erf_complex(C::new(1.0, 1.0));
        assert_relative_eq!(v.re, 1.316151281697947644880271, max_relative = 1e-13);
        assert_relative_eq!(v.im, 0.1904534692378346862841089, max_relative = 1e-13);
        let v = erf_complex(C::new(2.5, -1.75));
        assert_relative_eq!(v.re, 1.007417655175574552461126, max_relative = 1e-12);
        assert_relative_eq!(v.im, -0.0008153708878429744479776406, max_relative = 1e-11);
        let v = erf_complex(C::new(-0.4, 3.2));
        assert_relative_eq!(v.re, -2910.523873308698779804997, max_relative = 1e-12);
        assert_relative_eq!(v.im, -3302.181676787228000806715, max_relative = 1e-12);
    }

    #[test]
    fn faddeeva_frozen_values() {
        let w = faddeeva(C::new(1.0, 1.0));
        assert_relative_eq!(w.re, 0.3047442052569125924571388, max_relative = 1e-13);
        assert_relative_eq!(w.im, 0.2082189382028316272874373, max_relative = 1e-13);
        let w = faddeeva(C::new(-3.0, -0.5));
        assert_relative_eq!(w.re, -0.03744011710042425957138364, max_relative = 1e-12);
        assert_relative_eq!(w.im, -0.1930284794273171125044667, max_relative = 1e-12);
        let w = faddeeva(C::new(30.0, 0.2));
        assert_relative_eq!(w.re, 0.0001255794016952812033518061, max_relative = 1e-10);
        assert_relative_eq!(w.im, 0.01881594627190845008447825, max_relative = 1e-12);
    }

    #[test]
    fn real_erf_and_erfc() {
        assert_relative_eq!(erf(0.55f64), 0.5633233663251089, max_relative = 1e-14);
        assert_relative_eq!(erf(3.0f64), 0.9999779095030014, max_relative = 1e-14);
        assert_relative_eq!(erf(-2.0f64), -0.9953222650189527, max_relative = 1e-14);
        assert_relative_eq!(erfc(6.0f64), 2.151973671249891311659335e-17, max_relative = 1e-12);
        assert_relative_eq!(erfc(-1.0f64), 1.842700792949714869341221, max_relative = 1e-14);
        assert_relative_eq!(erf(0.3f32), 0.32862676, max_relative = 1e-6);
    }

    #[test]
    fn erfc_complex_matches_one_minus_erf() {
        for &z in &[C::new(0.2, 0.1), C::new(1.7, -2.3), C::new(-0.8, 0.9)] {
            let d = erfc_complex(z) + erf_complex(z) - C::new(1.0, 0.0);
            assert!(d.norm() < 1e-13, "{z}");
        }
    }

    #[test]
    fn damped_matches_direct() {
        for &(x, k) in &[(0.3, 0.4), (-1.2, 0.7), (2.0, -1.5), (0.0, 2.0)] {
            let direct = (-k * k as f64).exp() * erf_complex(C::new(x, k)).re;
            assert_relative_eq!(damped_re_erf(x, k), direct, epsilon = 1e-13);
        }
        // far field stays finite where the undamped value overflows
        let v = damped_re_erf(0.5f64, 40.0);
        assert!(v.is_finite() && v.abs() < 1.0);
    }

    #[test]
    fn gamma_half_integers() {
        assert_relative_eq!(gamma_half::<f64>(1), std::f64::consts::PI.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(gamma_half::<f64>(2), 1.0);
        assert_relative_eq!(gamma_half::<f64>(5), 0.75 * std::f64::consts::PI.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(gamma_half::<f64>(8), 6.0);
        assert_relative_eq!(factorial::<f64>(6), 720.0);
    }
}
