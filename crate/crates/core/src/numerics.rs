//! Small numerical kernels: sphere areas, polar quadrature weights, sine-power
//! antiderivatives, adaptive Simpson quadrature and a Dormand-Prince integrator.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Area of the unit sphere `S^n`, `2 pi^((n+1)/2) / Gamma((n+1)/2)`.
pub fn sphere_area(n: usize) -> f64 {
    // Gamma at integer and half-integer arguments, via omega_n = 2 pi / (n-1) omega_{n-2}
    match n {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (n as f64 - 1.0) * sphere_area(n - 2),
    }
}

/// `int_0^x sin^m(s) ds`.
pub fn sin_power_integral(m: usize, x: f64) -> f64 {
    match m {
        0 => x,
        1 => 1.0 - x.cos(),
        _ => {
            let mf = m as f64;
            -x.sin().powi(m as i32 - 1) * x.cos() / mf + (mf - 1.0) / mf * sin_power_integral(m - 2, x)
        }
    }
}

/// Weights of the periodic trapezoid rule on `[0, 2pi)` with `n` nodes.
pub fn periodic_weights(n: usize) -> Vec<f64> {
    vec![2.0 * PI / n as f64; n]
}

/// Trapezoid weights on `[0, pi]` with `n` nodes including both endpoints.
///
/// Spectrally accurate for integrands whose even reflection about both endpoints is smooth.
pub fn reflected_trapezoid_weights(n: usize) -> Vec<f64> {
    let h = PI / (n - 1) as f64;
    let mut w = vec![h; n];
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    w
}

/// Clenshaw-Curtis weights `w_j` with `sum_j w_j g(theta_j) = int_0^pi g(theta) sin(theta) d theta`
/// for `theta_j = j pi / (n-1)`, exact when `g` is a cosine polynomial of degree `< n`.
pub fn clenshaw_curtis_weights(n: usize) -> Vec<f64> {
    let m = n - 1;
    let mf = m as f64;
    (0..n)
        .map(|j| {
            let theta = j as f64 * PI / mf;
            let cj = if j == 0 || j == m { 1.0 } else { 2.0 };
            let mut s = 0.0;
            for k in 0..=m / 2 {
                let two_k = 2 * k;
                let bk = if two_k == 0 || two_k == m { 1.0 } else { 2.0 };
                let tk = 2.0 / (1.0 - (two_k * two_k) as f64);
                s += bk * tk * (two_k as f64 * theta).cos();
            }
            cj * s / (2.0 * mf)
        })
        .collect()
}

/// Quadrature weights for `int_0^pi g(theta) sin^(n-1)(theta) d theta` on the uniform
/// pole-to-pole grid, where `g` extends evenly across both poles.
pub fn polar_weights(n: usize, nodes: usize) -> Vec<f64> {
    let h = PI / (nodes - 1) as f64;
    if n % 2 == 1 {
        // sin^(n-1) is an even power: the integrand is smooth and even-periodic
        reflected_trapezoid_weights(nodes)
            .into_iter()
            .enumerate()
            .map(|(j, w)| w * (j as f64 * h).sin().powi(n as i32 - 1))
            .collect()
    } else {
        clenshaw_curtis_weights(nodes)
            .into_iter()
            .enumerate()
            .map(|(j, w)| w * (j as f64 * h).sin().powi(n as i32 - 2))
            .collect()
    }
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Integrates the scalar autonomous ODE `y' = f(y)` from `y0` over `[0, t]` with an
/// embedded Dormand-Prince 5(4) pair and relative tolerance `rtol`.
pub fn dormand_prince<F: Fn(f64) -> Result<f64>>(f: &F, y0: f64, t: f64, rtol: f64) -> Result<f64> {
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] =
        [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];
    if t == 0.0 {
        return Ok(y0);
    }
    let mut y = y0;
    let mut s = 0.0;
    let mut h = (t * 1e-3).min(t);
    let mut iterations = 0usize;
    while s < t {
        iterations += 1;
        if iterations > 10_000_000 {
            return Err(Error::Domain("ODE integration did not converge".into()));
        }
        if s + h > t {
            h = t - s;
        }
        let mut k = [0.0; 7];
        for stage in 0..7 {
            let yi = y + h * (0..stage).map(|j| A[stage][j] * k[j]).sum::<f64>();
            k[stage] = f(yi)?;
        }
        let y5 = y + h * (0..7).map(|j| B5[j] * k[j]).sum::<f64>();
        let y4 = y + h * (0..7).map(|j| B4[j] * k[j]).sum::<f64>();
        let scale = rtol * y.abs().max(y5.abs()).max(1e-300);
        let err = (y5 - y4).abs() / scale;
        if err <= 1.0 {
            s += h;
            y = y5;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < 1e-300 {
            return Err(Error::Domain("ODE step size underflow".into()));
        }
    }
    Ok(y)
}
