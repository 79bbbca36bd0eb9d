//! Small numerical toolbox shared across the crate: finite differences,
//! 2x2 symmetric eigenvalues, cubic Hermite interpolation, adaptive
//! quadrature, an embedded Runge-Kutta 4(5) stepper and least squares.

/// Central first derivative of a scalar function of two variables.
///
/// Step sizes are scaled per coordinate so the stencil stays accurate for
/// arguments of very different magnitude.
pub fn central_gradient<F: Fn(f64, f64) -> f64>(f: F, x: f64, y: f64, h: f64) -> [f64; 2] {
    let hx = h * x.abs().max(1.0);
    let hy = h * y.abs().max(1.0);
    [
        (f(x + hx, y) - f(x - hx, y)) / (2.0 * hx),
        (f(x, y + hy) - f(x, y - hy)) / (2.0 * hy),
    ]
}

/// Central second-derivative (Hessian) stencil for a scalar function of two
/// variables.
pub fn central_hessian<F: Fn(f64, f64) -> f64>(f: F, x: f64, y: f64, h: f64) -> [[f64; 2]; 2] {
    let hx = h * x.abs().max(1.0);
    let hy = h * y.abs().max(1.0);
    let fxx = (f(x + hx, y) - 2.0 * f(x, y) + f(x - hx, y)) / (hx * hx);
    let fyy = (f(x, y + hy) - 2.0 * f(x, y) + f(x, y - hy)) / (hy * hy);
    let fxy = (f(x + hx, y + hy) - f(x + hx, y - hy) - f(x - hx, y + hy) + f(x - hx, y - hy))
        / (4.0 * hx * hy);
    [[fxx, fxy], [fxy, fyy]]
}

/// Central derivative of a scalar function along a fixed direction.
pub fn directional_derivative<F: Fn(f64, f64) -> f64>(
    f: F,
    x: f64,
    y: f64,
    dir: [f64; 2],
    h: f64,
) -> f64 {
    let scale = h * (x.abs() + y.abs()).max(1.0);
    (f(x + scale * dir[0], y + scale * dir[1]) - f(x - scale * dir[0], y - scale * dir[1]))
        / (2.0 * scale)
}

/// Eigenvalues of a symmetric 2x2 matrix, smallest first.
pub fn sym2_eigenvalues(m: [[f64; 2]; 2]) -> (f64, f64) {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    ((tr - disc) / 2.0, (tr + disc) / 2.0)
}

/// Cubic Hermite basis on `[x0, x1]` from values and derivatives at the ends.
/// Returns `(H(x), H'(x), H''(x))`.
pub fn hermite_cubic(x0: f64, x1: f64, f0: f64, d0: f64, f1: f64, d1: f64, x: f64) -> (f64, f64, f64) {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let (t2, t3) = (t * t, t * t * t);
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let v = h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1;
    let d00 = 6.0 * t2 - 6.0 * t;
    let d10 = 3.0 * t2 - 4.0 * t + 1.0;
    let d01 = -6.0 * t2 + 6.0 * t;
    let d11 = 3.0 * t2 - 2.0 * t;
    let d = (d00 * f0 + d01 * f1) / h + d10 * d0 + d11 * d1;
    let s00 = 12.0 * t - 6.0;
    let s10 = 6.0 * t - 4.0;
    let s01 = -12.0 * t + 6.0;
    let s11 = 6.0 * t - 2.0;
    let s = (s00 * f0 + s01 * f1) / (h * h) + (s10 * d0 + s11 * d1) / h;
    (v, d, s)
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), fm)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (left, flm) = simpson(f, a, fa, m, fm);
        let (right, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, flm, tol / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, right, frm, tol / 2.0, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let (whole, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, fm, tol, 40)
}

/// Error raised by the adaptive Runge-Kutta driver.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("non-finite state encountered at t = {t}")]
    NonFinite { t: f64 },
}

/// Dormand-Prince 5(4) embedded pair with PI-free step control.
///
/// Integrates `y' = f(t, y)` for a two-component state from `t0` to `t1`
/// (either direction) with relative tolerance `rtol` and absolute
/// tolerance `atol`.
pub fn rk45<F: Fn(f64, [f64; 2]) -> [f64; 2]>(
    f: &F,
    t0: f64,
    y0: [f64; 2],
    t1: f64,
    rtol: f64,
    atol: f64,
) -> Result<[f64; 2], OdeError> {
    if t0 == t1 {
        return Ok(y0);
    }
    let dir = (t1 - t0).signum();
    let mut t = t0;
    let mut y = y0;
    let mut h = dir * ((t1 - t0).abs() / 16.0).min(1e-2).max(1e-10);

    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    const E1: f64 = 71.0 / 57600.0;
    const E3: f64 = -71.0 / 16695.0;
    const E4: f64 = 71.0 / 1920.0;
    const E5: f64 = -17253.0 / 339200.0;
    const E6: f64 = 22.0 / 525.0;
    const E7: f64 = -1.0 / 40.0;

    let axpy = |y: [f64; 2], terms: &[(f64, [f64; 2])], h: f64| {
        let mut out = y;
        for (c, k) in terms {
            out[0] += h * c * k[0];
            out[1] += h * c * k[1];
        }
        out
    };

    let mut steps = 0u64;
    loop {
        if (t - t1) * dir >= 0.0 {
            return Ok(y);
        }
        if h.abs() < 1e-14 * (1.0 + t.abs()) {
            return Err(OdeError::StepUnderflow { t });
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        let k1 = f(t, y);
        let k2 = f(t + A21 * h, axpy(y, &[(A21, k1)], h));
        let k3 = f(t + 0.3 * h, axpy(y, &[(A31, k1), (A32, k2)], h));
        let k4 = f(t + 0.8 * h, axpy(y, &[(A41, k1), (A42, k2), (A43, k3)], h));
        let k5 = f(
            t + 8.0 / 9.0 * h,
            axpy(y, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)], h),
        );
        let k6 = f(
            t + h,
            axpy(y, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)], h),
        );
        let ynew = axpy(y, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)], h);
        let k7 = f(t + h, ynew);
        let err = [
            h * (E1 * k1[0] + E3 * k3[0] + E4 * k4[0] + E5 * k5[0] + E6 * k6[0] + E7 * k7[0]),
            h * (E1 * k1[1] + E3 * k3[1] + E4 * k4[1] + E5 * k5[1] + E6 * k6[1] + E7 * k7[1]),
        ];
        if !ynew[0].is_finite() || !ynew[1].is_finite() {
            return Err(OdeError::NonFinite { t });
        }
        let sc0 = atol + rtol * y[0].abs().max(ynew[0].abs());
        let sc1 = atol + rtol * y[1].abs().max(ynew[1].abs());
        let errnorm = ((err[0] / sc0).powi(2) + (err[1] / sc1).powi(2)).sqrt() / std::f64::consts::SQRT_2;
        if errnorm <= 1.0 {
            t += h;
            y = ynew;
        }
        let factor = if errnorm > 0.0 {
            (0.9 * errnorm.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
        steps += 1;
        if steps > 50_000_000 {
            return Err(OdeError::StepUnderflow { t });
        }
    }
}

/// Least-squares straight-line fit; returns `(slope, intercept)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    (slope, (sy - slope * sx) / n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_of_quadratic() {
        let g = central_gradient(|x, y| x * x + 3.0 * x * y, 2.0, -1.0, 1e-6);
        assert!((g[0] - 1.0).abs() < 1e-8);
        assert!((g[1] - 6.0).abs() < 1e-8);
    }

    #[test]
    fn sym2_eigen_ordering() {
        let (lo, hi) = sym2_eigenvalues([[2.0, 1.0], [1.0, 2.0]]);
        assert!((lo - 1.0).abs() < 1e-14 && (hi - 3.0).abs() < 1e-14);
    }

    #[test]
    fn hermite_reproduces_cubic() {
        // x^3 is reproduced exactly by the cubic basis.
        let f = |x: f64| x * x * x;
        let d = |x: f64| 3.0 * x * x;
        let (v, dv, sv) = hermite_cubic(1.0, 2.0, f(1.0), d(1.0), f(2.0), d(2.0), 1.3);
        assert!((v - f(1.3)).abs() < 1e-13);
        assert!((dv - d(1.3)).abs() < 1e-12);
        assert!((sv - 6.0 * 1.3).abs() < 1e-11);
    }

    #[test]
    fn simpson_integrates_smooth() {
        let v = integrate(&|x: f64| (x * x).exp(), 0.0, 1.0, 1e-12);
        assert!((v - 1.4626517459071816).abs() < 1e-10);
    }

    #[test]
    fn rk45_harmonic_oscillator() {
        let f = |_t: f64, y: [f64; 2]| [y[1], -y[0]];
        let y = rk45(&f, 0.0, [1.0, 0.0], std::f64::consts::PI, 1e-12, 1e-12).unwrap();
        assert!((y[0] + 1.0).abs() < 1e-9);
        assert!(y[1].abs() < 1e-9);
    }

    #[test]
    fn fit_recovers_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (m, b) = linear_fit(&xs, &ys);
        assert!((m - 2.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
    }
}
