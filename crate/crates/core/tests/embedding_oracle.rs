//! Brute-force check of the graph geometry: embed the hypersurface in `R^(n+2)`,
//! differentiate the embedding numerically, and read the shape operator and area
//! element off the induced metric and second fundamental form.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sphereflow::functionals::FunctionalRecord;
use sphereflow::geometry::{Chart, GraphField, ShapeData};
use sphereflow::symfunc::{binomial, elementary_all};

const STEP: f64 = 1e-4;
/// Radial offset used to find the outward direction.
const FRAC_STEP: f64 = 1e-6;
/// Generic azimuth angles, away from the coordinate singularities.
const AZIMUTH: [f64; 3] = [0.7, 1.1, 2.3];

type Profile = dyn Fn(f64) -> f64;

/// Point of the graph at chart coordinates `(theta, phi_1, ..., phi_(n-1))`.
fn embed(n: usize, u: &Profile, c: &[f64]) -> DVector<f64> {
    let r = u(c[0]);
    let mut x = vec![c[0].cos()];
    let mut tail = c[0].sin();
    for &phi in &c[1..n] {
        x.push(tail * phi.cos());
        tail *= phi.sin();
    }
    x.push(tail);
    let mut out = vec![r.cos()];
    out.extend(x.iter().map(|xi| r.sin() * xi));
    DVector::from_vec(out)
}

/// Principal curvatures (ascending) and area density at the given coordinates.
fn oracle(n: usize, u: &Profile, c: &[f64]) -> (Vec<f64>, f64) {
    let at = |shifts: &[(usize, f64)]| {
        let mut p = c.to_vec();
        for &(i, s) in shifts {
            p[i] += s;
        }
        embed(n, u, &p)
    };
    let h = STEP;
    let x0 = at(&[]);
    let first: Vec<DVector<f64>> = (0..n).map(|i| (at(&[(i, h)]) - at(&[(i, -h)])) / (2.0 * h)).collect();
    let mut second = vec![vec![DVector::zeros(n + 2); n]; n];
    for i in 0..n {
        for j in 0..n {
            second[i][j] = if i == j {
                (at(&[(i, h)]) - 2.0 * &x0 + at(&[(i, -h)])) / (h * h)
            } else {
                (at(&[(i, h), (j, h)]) - at(&[(i, h), (j, -h)]) - at(&[(i, -h), (j, h)]) + at(&[(i, -h), (j, -h)]))
                    / (4.0 * h * h)
            };
        }
    }
    // outward direction: increasing geodesic distance from the chart origin
    let r = u(c[0]);
    let mut radial = embed(n, &move |_| r + FRAC_STEP, c) - embed(n, &move |_| r - FRAC_STEP, c);
    radial /= radial.norm();
    let mut cols = vec![x0.clone()];
    cols.extend(first.iter().cloned());
    cols.push(radial.clone());
    let q = DMatrix::from_columns(&cols).qr().q();
    let mut normal: DVector<f64> = q.column(n + 1).into_owned();
    if normal.dot(&radial) < 0.0 {
        normal = -normal;
    }
    let g = DMatrix::from_fn(n, n, |i, j| first[i].dot(&first[j]));
    let b = DMatrix::from_fn(n, n, |i, j| -second[i][j].dot(&normal));
    let l = g.clone().cholesky().expect("metric is positive definite").l();
    let li = l.try_inverse().expect("invertible");
    let s = &li * b * li.transpose();
    let s = (&s + s.transpose()) * 0.5;
    let mut kappa: Vec<f64> = s.symmetric_eigen().eigenvalues.iter().copied().collect();
    kappa.sort_by(f64::total_cmp);
    (kappa, g.determinant().sqrt())
}

/// Jacobian of the hyperspherical coordinates of `S^(n-1)`.
fn azimuth_jacobian(n: usize, phi: &[f64]) -> f64 {
    (0..n.saturating_sub(2)).map(|i| phi[i].sin().powi((n - 2 - i) as i32)).product()
}

fn coords(n: usize, theta: f64) -> Vec<f64> {
    let mut c = vec![theta];
    c.extend(AZIMUTH.iter().take(n - 1));
    c
}

fn random_profile(rng: &mut ChaCha8Rng) -> (f64, [f64; 3]) {
    let b = rng.gen_range(0.5..1.0);
    let a = [rng.gen_range(-0.05..0.05), rng.gen_range(-0.03..0.03), rng.gen_range(-0.02..0.02)];
    (b, a)
}

fn profile_fn(b: f64, a: [f64; 3]) -> impl Fn(f64) -> f64 {
    move |t: f64| b + a[0] * t.cos() + a[1] * (2.0 * t).cos() + a[2] * (3.0 * t).cos()
}

#[test]
fn shape_operator_matches_embedding() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cases = [[2; 5].as_slice(), &[3, 1]].concat();
    for n in cases {
        let chart = if n == 1 { Chart::Circle } else { Chart::Axisym };
        let (b, a) = random_profile(&mut rng);
        let u = profile_fn(b, a);
        let field = GraphField::from_fn(chart, n, 256, &u).unwrap();
        let shape = ShapeData::compute(&field).unwrap();
        let mut worst = 0.0_f64;
        for j in (1..field.nodes() - 1).step_by(7) {
            let theta = field.coordinate(j);
            let (expected, _) = oracle(n, &u, &coords(n, theta));
            let mut got = shape.kappa[j].values().to_vec();
            got.sort_by(f64::total_cmp);
            for (x, y) in got.iter().zip(&expected) {
                worst = worst.max((x - y).abs());
            }
        }
        assert!(worst < 1e-5, "n={n}, b={b}, a={a:?}: worst curvature mismatch {worst:e}");
    }
}

/// Composite Simpson rule with `m` (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let inner: f64 = (1..m).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

#[test]
fn mixed_volumes_match_embedding() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (n, chart) in [(1, Chart::Circle), (2, Chart::Axisym), (3, Chart::Axisym)] {
        let (b, a) = random_profile(&mut rng);
        let u = profile_fn(b, a);
        let field = GraphField::from_fn(chart, n, 256, &u).unwrap();
        let shape = ShapeData::compute(&field).unwrap();
        let rec = FunctionalRecord::geometric(0.0, &field, &shape, &[]).unwrap();
        let (upper, azimuth_area) = match n {
            1 => (2.0 * PI, 1.0),
            2 => (PI, 2.0 * PI),
            _ => (PI, 4.0 * PI),
        };
        for k in 0..=n {
            let density = |theta: f64| {
                let c = coords(n, theta);
                let (kappa, da) = oracle(n, &u, &c);
                elementary_all(&kappa)[k] * da / azimuth_jacobian(n, &c[1..])
            };
            // stay clear of the coordinate singularities at the poles; the omitted caps carry
            // O(eps^n) of the integral
            let eps = if n == 1 { 0.0 } else { 1e-3 };
            let expected = azimuth_area * simpson(density, eps, upper - eps, 2000) / binomial(n, k);
            let rel = (rec.v[k] - expected).abs() / expected.abs();
            assert!(rel < 1e-5, "n={n}, k={k}: V_k {} vs embedding {expected} (rel {rel:e})", rec.v[k]);
        }
    }
}
