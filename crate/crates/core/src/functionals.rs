//! Curvature integrals `V_k`, quermassintegrals `W_k`, the monotone quantities
//! `phi_1`, `phi_2`, `phi_3` along inverse curvature flows, Alexandrov-Fenchel
//! slacks, evolution-identity residuals and curvature decay norms.

use std::io::Write;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::geometry::{enclosed_volume, GraphField, ShapeData};
use crate::numerics::sphere_area;
use crate::symfunc::{binomial, elementary_all, CurvatureSpec};

/// Exponents `q` of the decay norms `int H^q` stored in every record.
pub const DEFAULT_DECAY_EXPONENTS: [f64; 2] = [1.0, 2.0];

/// Relative tolerance below which an inequality slack counts as equality.
pub const EQUALITY_TOL: f64 = 1e-8;

/// `W_{2k+1} - A_k` and its normalization by `W_1^((n-2k)/n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phi3 {
    pub k: usize,
    pub numerator: f64,
    pub value: f64,
}

/// Integral quantities of one surface at flow time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalRecord {
    pub t: f64,
    pub n: usize,
    /// `V_0 ..= V_n`.
    pub v: Vec<f64>,
    /// `W_0 ..= W_{n+1}`.
    pub w: Vec<f64>,
    pub phi1: Option<f64>,
    pub phi2: Option<f64>,
    /// One entry per `k >= 1` with `2k + 1 <= n`.
    pub phi3: Vec<Phi3>,
    pub h_max: f64,
    /// `(q, int H^q)`.
    pub decay: Vec<(f64, f64)>,
    /// Smallest `F` over the nodes (flow records only).
    pub f_min: Option<f64>,
    /// `max (H/n) F^p` over the nodes (flow records only).
    pub pinch: Option<f64>,
    /// `int H_k F^(-p)` for `k = 0 ..= n` (flow records only).
    pub speed_moments: Vec<f64>,
}

impl FunctionalRecord {
    /// Geometric quantities only; no curvature function involved.
    pub fn geometric(t: f64, field: &GraphField, shape: &ShapeData, qs: &[f64]) -> Result<Self> {
        let n = field.n();
        let sym: Vec<Vec<f64>> = shape.kappa.iter().map(|k| elementary_all(k.values())).collect();
        let v: Vec<f64> = (0..=n).map(|k| shape.integrate(sym.iter().map(|h| h[k])) / binomial(n, k)).collect();
        let w = quermassintegrals(&v, enclosed_volume(field), n);
        let h_max = sym.iter().map(|h| h[1]).fold(f64::NEG_INFINITY, f64::max);
        let decay = decay_norms(shape, qs)?;
        let mut rec = Self {
            t,
            n,
            v,
            w,
            phi1: None,
            phi2: None,
            phi3: Vec::new(),
            h_max,
            decay,
            f_min: None,
            pinch: None,
            speed_moments: Vec::new(),
        };
        if n >= 1 {
            rec.phi1 = Some(phi1(&rec)?);
        }
        if n >= 2 {
            rec.phi2 = Some(phi2(&rec)?);
        }
        rec.phi3 = (1..)
            .take_while(|k| 2 * k + 1 <= n)
            .map(|k| {
                let numerator = rec.w[2 * k + 1] - a_k(n, k, rec.w[1]);
                Ok(Phi3 { k, numerator, value: phi3(&rec, k)? })
            })
            .collect::<Result<_>>()?;
        Ok(rec)
    }

    /// Full flow record including `F`-dependent diagnostics.
    pub fn compute(t: f64, field: &GraphField, shape: &ShapeData, spec: &CurvatureSpec, qs: &[f64]) -> Result<Self> {
        let mut rec = Self::geometric(t, field, shape, qs)?;
        let n = field.n();
        let p = spec.p();
        let mut moments = vec![0.0; n + 1];
        let mut f_min = f64::INFINITY;
        let mut pinch = f64::NEG_INFINITY;
        for (j, kappa) in shape.kappa.iter().enumerate() {
            let f = spec.value(kappa).map_err(|e| Error::DegenerateCurvature { node: j, reason: e.to_string() })?;
            let h = elementary_all(kappa.values());
            let speed = f.powf(-p);
            for (k, m) in moments.iter_mut().enumerate() {
                *m += shape.weight[j] * h[k] * speed;
            }
            f_min = f_min.min(f);
            pinch = pinch.max(h[1] / n as f64 * f.powf(p));
        }
        rec.f_min = Some(f_min);
        rec.pinch = Some(pinch);
        rec.speed_moments = moments;
        Ok(rec)
    }

    pub fn phi3_for(&self, k: usize) -> Option<&Phi3> {
        self.phi3.iter().find(|p| p.k == k)
    }

    pub fn decay_for(&self, q: f64) -> Option<f64> {
        self.decay.iter().find(|(qq, _)| *qq == q).map(|(_, x)| *x)
    }
}

/// `V_k = int H_k / C(n,k) dmu`.
pub fn mixed_volume(field: &GraphField, k: usize) -> Result<f64> {
    let n = field.n();
    if k > n {
        return Err(Error::Argument(format!("V_k needs 0 <= k <= n = {n}, got k = {k}")));
    }
    let shape = ShapeData::compute(field)?;
    Ok(shape.integrate(shape.kappa.iter().map(|kv| elementary_all(kv.values())[k])) / binomial(n, k))
}

/// `V_k(B_rho) = omega_n cos^k(rho) sin^(n-k)(rho)`.
pub fn ball_mixed_volume(n: usize, k: usize, rho: f64) -> Result<f64> {
    if k > n {
        return Err(Error::Argument(format!("V_k needs 0 <= k <= n = {n}, got k = {k}")));
    }
    if !(rho > 0.0 && rho <= std::f64::consts::FRAC_PI_2) {
        return Err(Error::Argument(format!("ball radius must lie in (0, pi/2], got {rho}")));
    }
    Ok(sphere_area(n) * rho.cos().powi(k as i32) * rho.sin().powi((n - k) as i32))
}

/// `W_0 ..= W_{n+1}` from the volume and `V_0 ..= V_n` by upward recursion.
pub fn quermassintegrals(v: &[f64], w0: f64, n: usize) -> Vec<f64> {
    let nf = n as f64;
    let mut w = vec![w0, v[0] / (nf + 1.0)];
    for k in 1..=n {
        let kf = k as f64;
        w.push(v[k] / (nf + 1.0) + kf / (nf + 2.0 - kf) * w[k - 1]);
    }
    w
}

/// `m!!` with `0!! = (-1)!! = 1`.
fn double_factorial(m: isize) -> f64 {
    let mut out = 1.0;
    let mut i = m;
    while i > 1 {
        out *= i as f64;
        i -= 2;
    }
    out
}

/// Closed form for the odd quermassintegral `W_{2k+1}` as a combination of `V_{2k}, V_{2k-2}, ...`.
pub fn odd_quermass_explicit(v: &[f64], n: usize, k: usize) -> Result<f64> {
    if 2 * k + 1 > n + 1 || v.len() < n + 1 {
        return Err(Error::Argument(format!("W_(2k+1) needs 2k+1 <= n+1 and V_0..V_n; got n = {n}, k = {k}")));
    }
    let (n, k2) = (n as isize, 2 * k as isize);
    let top = double_factorial(k2) * double_factorial(n - k2);
    let sum: f64 = (0..=k as isize)
        .map(|i| top / (double_factorial(k2 - 2 * i) * double_factorial(n - k2 + 2 * i)) * v[(k2 - 2 * i) as usize])
        .sum();
    Ok(sum / (n + 1) as f64)
}

/// Right-hand side `A_k` of the odd quermassintegral inequality as a function of `W_1`.
pub fn a_k(n: usize, k: usize, w1: f64) -> f64 {
    let omega = sphere_area(n);
    let nf = n as f64;
    let x = (nf + 1.0) * w1 / omega;
    let base = (n - 2 * k) as f64;
    let sum: f64 = (0..=k)
        .map(|i| {
            let e = base + 2.0 * i as f64;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * base / e * binomial(k, i) * x.powf(e / nf)
        })
        .sum();
    omega / (nf + 1.0) * sum
}

pub fn phi1(rec: &FunctionalRecord) -> Result<f64> {
    let n = rec.n as f64;
    let (v0, v1) = (rec.v[0], *rec.v.get(1).ok_or_else(|| Error::Argument("phi1 needs V_1".into()))?);
    Ok(v1 * v1 / v0.powf(2.0 * (n - 1.0) / n) + v0.powf(2.0 / n))
}

pub fn phi2(rec: &FunctionalRecord) -> Result<f64> {
    if rec.n < 2 {
        return Err(Error::Argument("phi2 needs n >= 2".into()));
    }
    let n = rec.n as f64;
    Ok((rec.v[2] + rec.v[0]) / rec.v[0].powf((n - 2.0) / n))
}

pub fn phi3(rec: &FunctionalRecord, k: usize) -> Result<f64> {
    let n = rec.n;
    if k == 0 || 2 * k + 1 > n {
        return Err(Error::Argument(format!("phi3 needs k >= 1 and 2k+1 <= n = {n}, got k = {k}")));
    }
    let w1 = rec.w[1];
    Ok((rec.w[2 * k + 1] - a_k(n, k, w1)) / w1.powf((n - 2 * k) as f64 / n as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inequality {
    I,
    II,
    III(usize),
}

impl Inequality {
    pub fn name(&self) -> String {
        match self {
            Inequality::I => "I".into(),
            Inequality::II => "II".into(),
            Inequality::III(k) => format!("III_k{k}"),
        }
    }
}

/// `LHS - RHS` of an Alexandrov-Fenchel type inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slack {
    pub value: f64,
    /// Sum of the absolute values of the terms; the reference for relative checks.
    pub scale: f64,
    /// `|value| < EQUALITY_TOL * scale`.
    pub equality: bool,
}

impl Slack {
    fn new(value: f64, scale: f64) -> Self {
        Self { value, scale, equality: value.abs() < EQUALITY_TOL * scale }
    }

    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.value / self.scale
        } else {
            self.value
        }
    }
}

pub fn af_slack(rec: &FunctionalRecord, which: Inequality) -> Result<Slack> {
    let n = rec.n;
    let nf = n as f64;
    let omega = sphere_area(n);
    match which {
        Inequality::I | Inequality::II if n < 2 => {
            Err(Error::Argument(format!("inequality {} needs n >= 2", which.name())))
        }
        Inequality::I => {
            let (v0, v1) = (rec.v[0] / omega, rec.v[1] / omega);
            let (a, b, c) = (v1 * v1, v0.powf(2.0 * (nf - 1.0) / nf), v0 * v0);
            Ok(Slack::new(a - (b - c), a.abs() + b.abs() + c.abs()))
        }
        Inequality::II => {
            let (v0, v2) = (rec.v[0] / omega, rec.v[2] / omega);
            let (a, b, c) = (v2, v0.powf((nf - 2.0) / nf), v0);
            Ok(Slack::new(a - (b - c), a.abs() + b.abs() + c.abs()))
        }
        Inequality::III(k) => {
            if k == 0 || 2 * k + 1 > n {
                return Err(Error::Argument(format!("inequality III needs k >= 1 and 2k+1 <= n, got k = {k}")));
            }
            let (w, a) = (rec.w[2 * k + 1], a_k(n, k, rec.w[1]));
            Ok(Slack::new(w - a, w.abs() + a.abs()))
        }
    }
}

/// Inequalities applicable in dimension `n`.
pub fn applicable_inequalities(n: usize) -> Vec<Inequality> {
    let mut out = Vec::new();
    if n >= 2 {
        out.push(Inequality::I);
        out.push(Inequality::II);
    }
    out.extend((1..).take_while(|k| 2 * k + 1 <= n).map(Inequality::III));
    out
}

/// `(q, int H^q dmu)` for each `q >= 1`.
pub fn decay_norms(shape: &ShapeData, qs: &[f64]) -> Result<Vec<(f64, f64)>> {
    if let Some(q) = qs.iter().find(|&&q| !(q >= 1.0)) {
        return Err(Error::Argument(format!("decay exponent must be >= 1, got {q}")));
    }
    let h = shape.mean_curvature();
    Ok(qs.iter().map(|&q| (q, shape.integrate(h.iter().map(|x| x.abs().powf(q))))).collect())
}

/// Evolution identity being checked by central differences along a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    /// `d/dt int H_k = int ((k+1) H_{k+1} - (n+1-k) H_{k-1}) F^(-p)`.
    MixedVolume(usize),
    /// `d/dt W_k = (n+1-k)/(n+1) int H~_k F^(-p)`.
    Quermass(usize),
}

impl Identity {
    fn quantity(&self, rec: &FunctionalRecord) -> f64 {
        match *self {
            Identity::MixedVolume(k) => rec.v[k] * binomial(rec.n, k),
            Identity::Quermass(k) => rec.w[k],
        }
    }

    fn rate(&self, rec: &FunctionalRecord) -> f64 {
        let n = rec.n;
        let m = &rec.speed_moments;
        match *self {
            Identity::MixedVolume(k) => {
                let up = if k < n { (k + 1) as f64 * m[k + 1] } else { 0.0 };
                let down = if k > 0 { (n + 1 - k) as f64 * m[k - 1] } else { 0.0 };
                up - down
            }
            Identity::Quermass(k) => (n + 1 - k) as f64 / (n + 1) as f64 * m[k] / binomial(n, k),
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        let ok = match *self {
            Identity::MixedVolume(k) => k <= n,
            Identity::Quermass(k) => (1..=n).contains(&k),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Argument(format!("identity {self:?} not defined for n = {n}")))
        }
    }
}

/// Largest relative mismatch between the central-difference derivative of the
/// identity's quantity and its predicted rate, over interior records.
///
/// Uses records `0, stride, 2 stride, ...`, which must be uniformly spaced in time.
pub fn evolution_identity_residual(records: &[FunctionalRecord], identity: Identity, stride: usize) -> Result<f64> {
    if stride == 0 {
        return Err(Error::Argument("stride must be at least 1".into()));
    }
    let recs: Vec<&FunctionalRecord> = records.iter().step_by(stride).collect();
    if recs.len() < 3 {
        return Err(Error::Argument(format!("need at least 3 records, got {}", recs.len())));
    }
    if recs.iter().any(|r| r.speed_moments.is_empty()) {
        return Err(Error::Argument("records carry no flow moments".into()));
    }
    identity.check(recs[0].n)?;
    let dt = recs[1].t - recs[0].t;
    if recs.windows(2).any(|w| ((w[1].t - w[0].t) - dt).abs() > 1e-9 * dt.max(1e-300)) {
        return Err(Error::Argument("records are not uniformly spaced in time".into()));
    }
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for i in 1..recs.len() - 1 {
        let derivative =
            (identity.quantity(recs[i + 1]) - identity.quantity(recs[i - 1])) / (recs[i + 1].t - recs[i - 1].t);
        let rate = identity.rate(recs[i]);
        worst = worst.max((derivative - rate).abs());
        scale = scale.max(rate.abs()).max(derivative.abs());
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// `(2k)!!(n-2k)!!/n!! - sum_i (-1)^i (n-2k)/(n-2k+2i) C(k,i)` in exact arithmetic.
pub fn telescoping_defect(n: usize, k: usize) -> Result<Ratio<i128>> {
    if 2 * k + 1 > n {
        return Err(Error::Argument(format!("need 2k+1 <= n, got n = {n}, k = {k}")));
    }
    let df = |m: i128| -> i128 { (1..=m).rev().step_by(2).product() };
    let (n, k) = (n as i128, k as i128);
    let lead = Ratio::new(df(2 * k) * df(n - 2 * k), df(n));
    let mut binom = 1i128;
    let mut sum = Ratio::from_integer(0);
    for i in 0..=k {
        if i > 0 {
            binom = binom * (k - i + 1) / i;
        }
        let term = Ratio::new((n - 2 * k) * binom, n - 2 * k + 2 * i);
        sum = if i % 2 == 0 { sum + term } else { sum - term };
    }
    Ok(lead - sum)
}

pub fn csv_header(n: usize) -> String {
    let mut cols = vec!["t".to_string()];
    cols.extend((0..=n).map(|k| format!("V{k}")));
    cols.extend((0..=n + 1).map(|k| format!("W{k}")));
    cols.extend(
        ["phi1", "phi2", "phi3_k1", "Hmax", "Fmin", "pinch", "decay_q1", "decay_q2"].iter().map(|s| s.to_string()),
    );
    cols.join(",")
}

fn fmt(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.16e}"),
        None => "nan".into(),
    }
}

pub fn csv_row(rec: &FunctionalRecord) -> String {
    let mut cols = vec![fmt(Some(rec.t))];
    cols.extend(rec.v.iter().map(|&x| fmt(Some(x))));
    cols.extend(rec.w.iter().map(|&x| fmt(Some(x))));
    cols.push(fmt(rec.phi1));
    cols.push(fmt(rec.phi2));
    cols.push(fmt(rec.phi3_for(1).map(|p| p.value)));
    cols.push(fmt(Some(rec.h_max)));
    cols.push(fmt(rec.f_min));
    cols.push(fmt(rec.pinch));
    cols.push(fmt(rec.decay_for(1.0)));
    cols.push(fmt(rec.decay_for(2.0)));
    cols.join(",")
}

/// One header line and one row per record.
pub fn write_csv<W: Write>(records: &[FunctionalRecord], out: &mut W) -> Result<()> {
    let n = records.first().map_or(0, |r| r.n);
    writeln!(out, "{}", csv_header(n))?;
    for rec in records {
        writeln!(out, "{}", csv_row(rec))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Chart;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8, PI};

    fn ball_record(n: usize, rho: f64) -> FunctionalRecord {
        let chart = if n == 1 { Chart::Circle } else { Chart::Axisym };
        let f = GraphField::ball(chart, n, 128, rho).unwrap();
        let s = ShapeData::compute(&f).unwrap();
        FunctionalRecord::geometric(0.0, &f, &s, &DEFAULT_DECAY_EXPONENTS).unwrap()
    }

    #[test]
    fn mixed_volume_examples() {
        let f = GraphField::ball(Chart::Axisym, 2, 64, FRAC_PI_4).unwrap();
        for k in 0..=2 {
            assert_relative_eq!(mixed_volume(&f, k).unwrap(), 2.0 * PI, max_relative = 1e-12);
        }
        let eq = GraphField::ball(Chart::Axisym, 3, 64, FRAC_PI_2).unwrap();
        for k in 1..=3 {
            assert!(mixed_volume(&eq, k).unwrap().abs() < 1e-14);
        }
        assert!(mixed_volume(&eq, 4).is_err());
    }

    #[test]
    fn ball_formula_examples() {
        assert_relative_eq!(ball_mixed_volume(2, 0, FRAC_PI_2).unwrap(), 4.0 * PI, epsilon = 1e-14);
        assert!(ball_mixed_volume(4, 2, FRAC_PI_2).unwrap().abs() < 1e-14);
        assert_relative_eq!(ball_mixed_volume(3, 1, FRAC_PI_4).unwrap(), 6.978_864_199_638_879, epsilon = 1e-12);
        assert!(ball_mixed_volume(2, 0, 2.0).is_err());
        assert!(ball_mixed_volume(2, 3, 1.0).is_err());
    }

    #[test]
    fn quermass_equator_n3() {
        let r = ball_record(3, FRAC_PI_2);
        let pi2 = PI * PI;
        let expect = [4.0 * pi2 / 3.0, pi2 / 2.0, pi2 / 3.0, pi2 / 3.0];
        for (w, e) in r.w.iter().zip(expect) {
            assert_relative_eq!(*w, e, epsilon = 1e-10);
        }
        assert_relative_eq!(r.w[1] * 4.0, r.v[0], max_relative = 1e-15);
    }

    #[test]
    fn odd_explicit_examples() {
        let v = [1.3, 0.0, 2.9, 0.0];
        assert_relative_eq!(odd_quermass_explicit(&v, 3, 1).unwrap(), 0.25 * (2.9 + 2.0 / 3.0 * 1.3), epsilon = 1e-15);
        let r = ball_record(3, FRAC_PI_2);
        assert_relative_eq!(odd_quermass_explicit(&r.v, 3, 1).unwrap(), PI * PI / 3.0, epsilon = 1e-12);
        assert!(odd_quermass_explicit(&v, 3, 2).is_err());
        for n in [3, 4, 5] {
            for rho in [FRAC_PI_8, FRAC_PI_3, 1.1] {
                let r = ball_record(n, rho);
                for k in (0..).take_while(|k| 2 * k + 1 <= n + 1) {
                    assert_relative_eq!(
                        odd_quermass_explicit(&r.v, n, k).unwrap(),
                        r.w[2 * k + 1],
                        max_relative = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn phi_on_balls() {
        for rho in [FRAC_PI_8, FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
            let r = ball_record(2, rho);
            assert_relative_eq!(r.phi1.unwrap(), 4.0 * PI, max_relative = 1e-12);
            assert_relative_eq!(r.phi2.unwrap(), 4.0 * PI, max_relative = 1e-12);
            for which in [Inequality::I, Inequality::II] {
                assert!(af_slack(&r, which).unwrap().equality);
            }
        }
        let r = ball_record(3, FRAC_PI_2);
        assert!(r.phi3[0].value.abs() < 1e-12);
        for rho in [0.3, 0.9, FRAC_PI_2] {
            let r = ball_record(3, rho);
            let s = af_slack(&r, Inequality::III(1)).unwrap();
            assert!(s.equality, "{s:?}");
        }
        let r = ball_record(5, 0.8);
        for k in 1..=2 {
            assert!(af_slack(&r, Inequality::III(k)).unwrap().equality);
        }
    }

    fn perturbed_record(n: usize) -> FunctionalRecord {
        let f = GraphField::from_fn(Chart::Axisym, n, 128, |t| 0.7 + 0.05 * t.cos()).unwrap();
        let s = ShapeData::compute(&f).unwrap();
        FunctionalRecord::geometric(0.0, &f, &s, &DEFAULT_DECAY_EXPONENTS).unwrap()
    }

    #[test]
    fn perturbed_slacks_positive() {
        let r = perturbed_record(2);
        let sl = af_slack(&r, Inequality::I).unwrap();
        assert!(sl.value > 0.0 && !sl.equality, "{sl:?}");
        assert!(af_slack(&r, Inequality::III(1)).is_err());
        let r = perturbed_record(3);
        for which in [Inequality::I, Inequality::II, Inequality::III(1)] {
            let sl = af_slack(&r, which).unwrap();
            assert!(sl.value > 0.0 && !sl.equality, "{which:?} {sl:?}");
        }
    }

    #[test]
    fn second_inequality_is_gauss_bonnet_for_surfaces() {
        // int K_intrinsic = int (1 + k1 k2) = 4 pi for every closed convex surface in S^3
        let r = perturbed_record(2);
        assert!(af_slack(&r, Inequality::II).unwrap().relative().abs() < 1e-9);
        assert_relative_eq!(r.phi2.unwrap(), 4.0 * PI, max_relative = 1e-9);
    }

    #[test]
    fn decay_examples() {
        let rho = 0.6;
        let r = ball_record(2, rho);
        assert_relative_eq!(r.decay_for(1.0).unwrap(), 8.0 * PI * rho.sin() * rho.cos(), max_relative = 1e-12);
        let eq = ball_record(2, FRAC_PI_2);
        assert!(eq.decay.iter().all(|(_, x)| x.abs() < 1e-14));
        let f = GraphField::ball(Chart::Axisym, 2, 32, 0.5).unwrap();
        assert!(decay_norms(&ShapeData::compute(&f).unwrap(), &[0.5]).is_err());
    }

    #[test]
    fn telescoping_is_zero() {
        for n in 1..=11 {
            for k in (0..).take_while(|k| 2 * k + 1 <= n) {
                assert_eq!(telescoping_defect(n, k).unwrap(), Ratio::from_integer(0), "n={n} k={k}");
            }
        }
        assert!(telescoping_defect(4, 2).is_err());
    }

    #[test]
    fn csv_layout() {
        let r = ball_record(2, 0.5);
        assert_eq!(csv_header(2), "t,V0,V1,V2,W0,W1,W2,W3,phi1,phi2,phi3_k1,Hmax,Fmin,pinch,decay_q1,decay_q2");
        let row = csv_row(&r);
        assert_eq!(row.split(',').count(), 16);
        assert!(row.contains("nan"));
    }

    #[test]
    fn residual_needs_records() {
        let r = ball_record(2, 0.5);
        assert!(evolution_identity_residual(&[r.clone(), r], Identity::MixedVolume(0), 1).is_err());
    }
}
