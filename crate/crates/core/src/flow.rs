//! Method-of-lines integration of the scalar inverse curvature flow
//! `du/dt = v / F^p` with classical RK4 in time.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::functionals::{FunctionalRecord, DEFAULT_DECAY_EXPONENTS};
use crate::geometry::{Chart, GraphField, ShapeData, CONVEXITY_FLOOR, MIN_NODES};
use crate::numerics::{adaptive_simpson, dormand_prince};
use crate::symfunc::CurvatureSpec;

pub const DEFAULT_CFL: f64 = 0.2;
pub const DEFAULT_STOP_EPS_EQUATOR: f64 = 1e-2;
pub const DEFAULT_STOP_F_MIN: f64 = 1e-4;
pub const DEFAULT_MAX_STEPS: usize = 2_000_000;
pub const DEFAULT_RECORD_EVERY: usize = 1000;

#[derive(Debug, Clone)]
pub struct FlowConfig {
    pub spec: CurvatureSpec,
    pub initial: GraphField,
    pub cfl: f64,
    pub stop_eps_equator: f64,
    pub stop_f_min: f64,
    pub max_steps: usize,
    /// Record every this many steps (ignored when `record_interval` is set).
    pub record_every: usize,
    /// Record at uniform flow times `0, dt_rec, 2 dt_rec, ...`; steps are shortened to hit them.
    pub record_interval: Option<f64>,
    /// Stop exactly at this flow time if nothing else stops the run first.
    pub stop_time: Option<f64>,
    /// Keep a profile snapshot every this many records; 0 keeps none.
    pub snapshot_every: usize,
}

impl FlowConfig {
    pub fn new(spec: CurvatureSpec, initial: GraphField) -> Self {
        Self {
            spec,
            initial,
            cfl: DEFAULT_CFL,
            stop_eps_equator: DEFAULT_STOP_EPS_EQUATOR,
            stop_f_min: DEFAULT_STOP_F_MIN,
            max_steps: DEFAULT_MAX_STEPS,
            record_every: DEFAULT_RECORD_EVERY,
            record_interval: None,
            stop_time: None,
            snapshot_every: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::Config(format!("cfl must lie in (0, 1), got {}", self.cfl)));
        }
        if !(self.stop_eps_equator > 0.0 && self.stop_f_min > 0.0) {
            return Err(Error::Config("stop thresholds must be positive".into()));
        }
        if self.max_steps == 0 || self.record_every == 0 {
            return Err(Error::Config("max_steps and record_every must be at least 1".into()));
        }
        if let Some(dt) = self.record_interval {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::Config(format!("record_interval must be positive, got {dt}")));
            }
        }
        if let Some(t) = self.stop_time {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("stop_time must be positive, got {t}")));
            }
        }
        if self.spec.n() != self.initial.n() {
            return Err(Error::Config(format!(
                "curvature function has n = {} but the initial profile has n = {}",
                self.spec.n(),
                self.initial.n()
            )));
        }
        if self.spec.p() != 1.0 && !self.spec.vanishes_on_boundary() {
            return Err(Error::Config(format!(
                "p = {} requires a curvature function vanishing on the boundary of the positive cone; {} does not",
                self.spec.p(),
                self.spec.label()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    ReachedEquator,
    CurvatureDegenerate { node: usize, reason: String },
    StepLimit,
    ReachedStopTime,
}

impl Termination {
    pub fn name(&self) -> &'static str {
        match self {
            Termination::ReachedEquator => "ReachedEquator",
            Termination::CurvatureDegenerate { .. } => "CurvatureDegenerate",
            Termination::StepLimit => "StepLimit",
            Termination::ReachedStopTime => "ReachedStopTime",
        }
    }
}

/// A flow surface at time `t` with its geometry and curvature-function values.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    pub field: GraphField,
    pub shape: ShapeData,
    /// `F` at every node.
    pub f: Vec<f64>,
}

impl FlowState {
    /// Fails with a degenerate-curvature error if some node leaves the positive cone.
    pub fn new(t: f64, field: GraphField, spec: &CurvatureSpec) -> Result<Self> {
        let shape = ShapeData::compute(&field)?;
        let f = curvature_values(&shape, spec)?;
        Ok(Self { t, field, shape, f })
    }

    pub fn f_min(&self) -> f64 {
        self.f.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `F` at every node of a strictly convex shape.
pub fn curvature_values(shape: &ShapeData, spec: &CurvatureSpec) -> Result<Vec<f64>> {
    shape
        .kappa
        .iter()
        .enumerate()
        .map(|(j, k)| {
            if k.min() <= CONVEXITY_FLOOR {
                return Err(Error::DegenerateCurvature { node: j, reason: format!("kappa_min = {:e}", k.min()) });
            }
            spec.value(k).map_err(|e| Error::DegenerateCurvature { node: j, reason: e.to_string() })
        })
        .collect()
}

/// `v / F^p` at every node.
pub fn flow_speed(state: &FlowState, spec: &CurvatureSpec) -> Vec<f64> {
    state.shape.v.iter().zip(&state.f).map(|(v, f)| v / f.powf(spec.p())).collect()
}

/// Fused per-node evaluation of the scalar flow on a fixed grid.
struct Kernel<'a> {
    spec: &'a CurvatureSpec,
    chart: Chart,
    n: usize,
    h: f64,
    /// `cot(theta_j)` away from the poles (axisymmetric chart only).
    cot: Vec<f64>,
}

impl<'a> Kernel<'a> {
    fn new(spec: &'a CurvatureSpec, field: &GraphField) -> Self {
        let nodes = field.nodes();
        let cot = match field.chart() {
            Chart::Circle => Vec::new(),
            Chart::Axisym => (0..nodes)
                .map(|j| {
                    let theta = field.coordinate(j);
                    theta.cos() / theta.sin()
                })
                .collect(),
        };
        Self { spec, chart: field.chart(), n: field.n(), h: field.spacing(), cot }
    }

    /// Writes `v / F^p` into `speed` and, if requested, the per-node diffusion bound
    /// `p (F_m / v^2 + (n-1) F_a) / (F^(p+1) sin^2 u)`. Returns `min F`.
    fn eval(&self, u: &[f64], speed: &mut [f64], mut diffusion: Option<&mut [f64]>) -> Result<f64> {
        let nodes = u.len();
        if nodes < MIN_NODES {
            return Err(Error::Config(format!("derivative stencils need N >= {MIN_NODES}, got {nodes}")));
        }
        let last = nodes - 1;
        let at = |j: isize| -> f64 {
            let idx = match self.chart {
                Chart::Circle => j.rem_euclid(nodes as isize) as usize,
                Chart::Axisym => {
                    if j < 0 {
                        (-j) as usize
                    } else if j as usize > last {
                        2 * last - j as usize
                    } else {
                        j as usize
                    }
                }
            };
            u[idx]
        };
        let p = self.spec.p();
        let reps = (self.n - 1) as f64;
        let (c1, c2) = (1.0 / (12.0 * self.h), 1.0 / (12.0 * self.h * self.h));
        let mut f_min = f64::INFINITY;
        for j in 0..nodes {
            let uj = u[j];
            if !(uj > 0.0 && uj < PI) {
                return Err(Error::DegenerateCurvature { node: j, reason: format!("u = {uj} left (0, pi)") });
            }
            let ji = j as isize;
            let (m2, m1, p1, p2) = (at(ji - 2), at(ji - 1), at(ji + 1), at(ji + 2));
            let pole = self.chart == Chart::Axisym && (j == 0 || j == last);
            let du = if pole { 0.0 } else { (m2 - p2 + 8.0 * (p1 - m1)) * c1 };
            let d2u = (-(m2 + p2) + 16.0 * (m1 + p1) - 30.0 * uj) * c2;
            let (s, c) = uj.sin_cos();
            let s2 = s * s;
            let v2 = 1.0 + du * du / s2;
            let v = v2.sqrt();
            let umbilic = c / (v * s);
            let m = umbilic * (1.0 + du * du / (v2 * s2)) - d2u / (v2 * v * s2);
            let a = match self.chart {
                Chart::Circle => m,
                Chart::Axisym => {
                    let q = if pole { d2u } else { du * self.cot[j] };
                    umbilic - q / (v * s2)
                }
            };
            if !(m.is_finite() && a.is_finite()) || m.min(a) <= CONVEXITY_FLOOR {
                return Err(Error::DegenerateCurvature {
                    node: j,
                    reason: format!("principal curvatures ({m:e}, {a:e}) left the positive cone"),
                });
            }
            let degenerate = |e: Error| Error::DegenerateCurvature { node: j, reason: e.to_string() };
            let Some(d) = diffusion.as_deref_mut() else {
                let f = self.spec.axial_value(m, a).map_err(degenerate)?;
                speed[j] = v / if p == 1.0 { f } else { f.powf(p) };
                f_min = f_min.min(f);
                continue;
            };
            let (f, f_m, f_a) = self.spec.axial(m, a).map_err(degenerate)?;
            let fp = if p == 1.0 { f } else { f.powf(p) };
            speed[j] = v / fp;
            let mut coeff = f_m / v2;
            if self.chart == Chart::Axisym {
                coeff += reps * f_a;
            }
            d[j] = p * coeff / (s2 * fp * f);
            f_min = f_min.min(f);
        }
        Ok(f_min)
    }

    /// One classical RK4 step from `u` with first stage `k1`, written into `out`.
    fn rk4(&self, u: &[f64], k1: &[f64], dt: f64, work: &mut RkWork, out: &mut [f64]) -> Result<()> {
        let RkWork { k2, k3, k4, tmp } = work;
        let half = 0.5 * dt;
        for j in 0..u.len() {
            tmp[j] = u[j] + half * k1[j];
        }
        self.eval(tmp, k2, None)?;
        for j in 0..u.len() {
            tmp[j] = u[j] + half * k2[j];
        }
        self.eval(tmp, k3, None)?;
        for j in 0..u.len() {
            tmp[j] = u[j] + dt * k3[j];
        }
        self.eval(tmp, k4, None)?;
        let sixth = dt / 6.0;
        for j in 0..u.len() {
            out[j] = u[j] + sixth * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]);
        }
        Ok(())
    }
}

struct RkWork {
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl RkWork {
    fn new(nodes: usize) -> Self {
        Self { k2: vec![0.0; nodes], k3: vec![0.0; nodes], k4: vec![0.0; nodes], tmp: vec![0.0; nodes] }
    }
}

/// Stable explicit step: `cfl h^2 / max diffusion`, capped so that `max speed * dt <= h`.
pub fn adaptive_dt(state: &FlowState, spec: &CurvatureSpec, cfl: f64) -> Result<f64> {
    let kernel = Kernel::new(spec, &state.field);
    let nodes = state.field.nodes();
    let (mut speed, mut diffusion) = (vec![0.0; nodes], vec![0.0; nodes]);
    kernel.eval(state.field.u(), &mut speed, Some(&mut diffusion))?;
    dt_bound(&speed, &diffusion, kernel.h, cfl)
}

fn dt_bound(speed: &[f64], diffusion: &[f64], h: f64, cfl: f64) -> Result<f64> {
    let (mut dmax, mut smax) = (0.0_f64, 0.0_f64);
    for (j, (&d, &s)) in diffusion.iter().zip(speed).enumerate() {
        if !(d.is_finite() && s.is_finite()) {
            return Err(Error::DegenerateCurvature { node: j, reason: "non-finite diffusion coefficient".into() });
        }
        dmax = dmax.max(d);
        smax = smax.max(s);
    }
    Ok((cfl * h * h / dmax).min(h / smax))
}

/// One RK4 step of size `dt`.
pub fn step(state: &FlowState, spec: &CurvatureSpec, dt: f64) -> Result<FlowState> {
    let kernel = Kernel::new(spec, &state.field);
    let nodes = state.field.nodes();
    let mut k1 = vec![0.0; nodes];
    kernel.eval(state.field.u(), &mut k1, None)?;
    let mut next = vec![0.0; nodes];
    kernel.rk4(state.field.u(), &k1, dt, &mut RkWork::new(nodes), &mut next)?;
    let field =
        state.field.with_values(next).map_err(|e| Error::DegenerateCurvature { node: 0, reason: e.to_string() })?;
    FlowState::new(state.t + dt, field, spec)
}

#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub times: Vec<f64>,
    pub records: Vec<FunctionalRecord>,
    /// `(t, profile)` pairs kept every `snapshot_every` records.
    pub snapshots: Vec<(f64, GraphField)>,
    pub termination: Termination,
    pub steps: usize,
    pub t_stop: f64,
    /// Last state on which every node was strictly convex.
    pub final_state: FlowState,
    /// Stop time plus the time a geodesic sphere of radius `u_max` needs to reach the equator.
    pub t_star_estimate: f64,
}

struct Recorder<'a> {
    spec: &'a CurvatureSpec,
    snapshot_every: usize,
    times: Vec<f64>,
    records: Vec<FunctionalRecord>,
    snapshots: Vec<(f64, GraphField)>,
}

impl Recorder<'_> {
    fn push(&mut self, state: &FlowState) -> Result<()> {
        if self.times.last().is_some_and(|&t| t >= state.t) {
            return Ok(());
        }
        let rec = FunctionalRecord::compute(state.t, &state.field, &state.shape, self.spec, &DEFAULT_DECAY_EXPONENTS)?;
        if self.snapshot_every > 0 && self.records.len() % self.snapshot_every == 0 {
            self.snapshots.push((state.t, state.field.clone()));
        }
        self.times.push(state.t);
        self.records.push(rec);
        Ok(())
    }
}

/// Integrates until the equator, a stop time, a curvature failure or the step budget.
pub fn run(config: &FlowConfig) -> Result<FlowTrace> {
    config.validate()?;
    let spec = &config.spec;
    let initial = FlowState::new(0.0, config.initial.clone(), spec)?;
    let kernel = Kernel::new(spec, &initial.field);
    let nodes = initial.field.nodes();
    let mut rec = Recorder {
        spec,
        snapshot_every: config.snapshot_every,
        times: Vec::new(),
        records: Vec::new(),
        snapshots: Vec::new(),
    };
    rec.push(&initial)?;
    let mut last_good = initial.clone();

    let mut u = initial.field.u().to_vec();
    let mut t = 0.0;
    let (mut k1, mut diffusion) = (vec![0.0; nodes], vec![0.0; nodes]);
    let mut f_min = kernel.eval(&u, &mut k1, Some(&mut diffusion))?;
    let (mut next_u, mut next_k1, mut next_diffusion) = (vec![0.0; nodes], vec![0.0; nodes], vec![0.0; nodes]);
    let mut work = RkWork::new(nodes);
    let mut records_hit = 0usize;
    let record_time = |i: usize| config.record_interval.map(|dt| (i + 1) as f64 * dt);
    let mut steps = 0usize;

    let termination = loop {
        if u.iter().all(|&x| (x - FRAC_PI_2).abs() < config.stop_eps_equator) || f_min < config.stop_f_min {
            break Termination::ReachedEquator;
        }
        if config.stop_time.is_some_and(|ts| t >= ts) {
            break Termination::ReachedStopTime;
        }
        if steps >= config.max_steps {
            break Termination::StepLimit;
        }
        let mut dt = match dt_bound(&k1, &diffusion, kernel.h, config.cfl) {
            Ok(dt) => dt,
            Err(Error::DegenerateCurvature { node, reason }) => {
                break Termination::CurvatureDegenerate { node, reason }
            }
            Err(e) => return Err(e),
        };
        // land exactly on record and stop times
        let next_record = record_time(records_hit);
        let mut land = next_record.filter(|&tr| t + dt >= tr);
        if let Some(ts) = config.stop_time {
            if t + dt >= ts && land.is_none_or(|l| ts < l) {
                land = Some(ts);
            }
        }
        if let Some(l) = land {
            dt = l - t;
        }
        let t_new = land.unwrap_or(t + dt);
        let advanced = kernel
            .rk4(&u, &k1, dt, &mut work, &mut next_u)
            .and_then(|()| kernel.eval(&next_u, &mut next_k1, Some(&mut next_diffusion)));
        match advanced {
            Ok(fm) => {
                std::mem::swap(&mut u, &mut next_u);
                std::mem::swap(&mut k1, &mut next_k1);
                std::mem::swap(&mut diffusion, &mut next_diffusion);
                f_min = fm;
                t = t_new;
            }
            Err(Error::DegenerateCurvature { node, reason }) => {
                break Termination::CurvatureDegenerate { node, reason }
            }
            Err(e) => return Err(e),
        }
        steps += 1;
        let record_now = match next_record {
            Some(tr) => t >= tr,
            None => steps % config.record_every == 0,
        };
        if record_now {
            if next_record.is_some() {
                records_hit += 1;
            }
            match FlowState::new(t, initial.field.with_values(u.clone())?, spec) {
                Ok(state) => {
                    rec.push(&state)?;
                    last_good = state;
                }
                Err(Error::DegenerateCurvature { node, reason }) => {
                    break Termination::CurvatureDegenerate { node, reason }
                }
                Err(e) => return Err(e),
            }
        }
    };
    let state = match FlowState::new(t, initial.field.with_values(u)?, spec) {
        Ok(state) => state,
        Err(Error::DegenerateCurvature { .. }) => last_good,
        Err(e) => return Err(e),
    };
    // the final state is always recorded unless it coincides with the previous record
    rec.push(&state)?;
    let t = state.t;
    let t_star_estimate = t + equator_tail(spec.n(), spec.p(), state.field.u_max());
    Ok(FlowTrace {
        times: rec.times,
        records: rec.records,
        snapshots: rec.snapshots,
        termination,
        steps,
        t_stop: t,
        final_state: state,
        t_star_estimate,
    })
}

/// Time for a geodesic sphere of radius `u` to reach the equator under the flow:
/// `int_u^(pi/2) n^p cot^p(s) ds`.
pub fn equator_tail(n: usize, p: f64, u: f64) -> f64 {
    if u >= FRAC_PI_2 {
        return 0.0;
    }
    let nf = n as f64;
    if p == 1.0 {
        return -nf * u.sin().ln();
    }
    let np = nf.powf(p);
    adaptive_simpson(&|s: f64| np * (s.cos() / s.sin()).max(0.0).powf(p), u, FRAC_PI_2, 1e-13)
}

/// Radius at time `t` of the geodesic sphere of initial radius `u0` under the flow.
pub fn round_flow_oracle(n: usize, p: f64, u0: f64, t: f64) -> Result<f64> {
    if !(u0 > 0.0 && u0 < FRAC_PI_2) {
        return Err(Error::Argument(format!("u0 must lie in (0, pi/2), got {u0}")));
    }
    if !(t >= 0.0 && p > 0.0 && n >= 1) {
        return Err(Error::Argument("need t >= 0, p > 0, n >= 1".into()));
    }
    let nf = n as f64;
    if p == 1.0 {
        let s = u0.sin() * (t / nf).exp();
        if s > 1.0 + 1e-15 {
            return Err(Error::Domain(format!("t = {t} is beyond the equator time {}", equator_tail(n, p, u0))));
        }
        return Ok(s.min(1.0).asin());
    }
    let t_star = equator_tail(n, p, u0);
    if t > t_star {
        return Err(Error::Domain(format!("t = {t} is beyond the equator time {t_star}")));
    }
    if t == t_star {
        return Ok(FRAC_PI_2);
    }
    let np = nf.powf(p);
    dormand_prince(
        &|u: f64| {
            if u >= FRAC_PI_2 {
                Err(Error::Domain("oracle crossed the equator".into()))
            } else {
                Ok(u.tan().powf(p) / np)
            }
        },
        u0,
        t,
        1e-12,
    )
}
