//! Radial graphs `r = u(x)` over a geodesic polar chart of `S^{n+1}`.
//!
//! Two charts are supported. `Circle` is the full periodic chart of `S^1`
//! (curves in `S^2`). `Axisym` is the polar angle `theta` in `[0, pi]` of
//! `S^n`, `n >= 2`, for profiles that are invariant under rotations fixing
//! the axis; the azimuthal principal curvature then has multiplicity `n - 1`.
//!
//! Derivatives use fourth-order central stencils. Ghost nodes come from
//! periodic wrap (`Circle`) or even reflection across the poles (`Axisym`),
//! so the discrete odd derivative vanishes identically at both poles.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::numerics::{periodic_weights, polar_weights, sin_power_integral, sphere_area};
use crate::symfunc::KappaVector;

/// Minimum number of grid nodes accepted by the derivative stencils.
pub const MIN_NODES: usize = 16;

/// Principal curvatures at or below this value count as non-positive; it absorbs
/// the roundoff of `cos u` at `u = pi/2`.
pub const CONVEXITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chart {
    Circle,
    Axisym,
}

impl Chart {
    pub fn name(self) -> &'static str {
        match self {
            Chart::Circle => "circle",
            Chart::Axisym => "axisym",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "circle" => Ok(Chart::Circle),
            "axisym" => Ok(Chart::Axisym),
            other => Err(Error::Parse(format!("unknown chart '{other}' (expected circle or axisym)"))),
        }
    }
}

/// Discretized radial function over a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphField {
    chart: Chart,
    n: usize,
    u: Vec<f64>,
}

impl GraphField {
    pub fn new(chart: Chart, n: usize, u: Vec<f64>) -> Result<Self> {
        match chart {
            Chart::Circle if n != 1 => {
                return Err(Error::Config(format!("circle chart requires n = 1, got n = {n}")));
            }
            Chart::Axisym if n < 2 => {
                return Err(Error::Config(format!("axisym chart requires n >= 2, got n = {n}")));
            }
            _ => {}
        }
        if u.len() < 3 {
            return Err(Error::Config(format!("graph field needs at least 3 nodes, got {}", u.len())));
        }
        if let Some(j) = u.iter().position(|&x| !(x > 0.0 && x < PI)) {
            return Err(Error::Domain(format!("u[{j}] = {} is outside (0, pi)", u[j])));
        }
        Ok(Self { chart, n, u })
    }

    /// Samples `profile` at the chart coordinates.
    pub fn from_fn(chart: Chart, n: usize, nodes: usize, profile: impl Fn(f64) -> f64) -> Result<Self> {
        let u = (0..nodes).map(|j| profile(coordinate(chart, nodes, j))).collect();
        Self::new(chart, n, u)
    }

    /// Geodesic sphere of radius `rho` about the chart origin.
    pub fn ball(chart: Chart, n: usize, nodes: usize, rho: f64) -> Result<Self> {
        Self::new(chart, n, vec![rho; nodes])
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> usize {
        self.u.len()
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn spacing(&self) -> f64 {
        spacing(self.chart, self.nodes())
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        coordinate(self.chart, self.nodes(), j)
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.nodes()).map(|j| self.coordinate(j)).collect()
    }

    pub fn u_min(&self) -> f64 {
        self.u.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn u_max(&self) -> f64 {
        self.u.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Same chart and dimension with new values.
    pub fn with_values(&self, u: Vec<f64>) -> Result<Self> {
        if u.len() != self.nodes() {
            return Err(Error::Config("node count changed".into()));
        }
        Self::new(self.chart, self.n, u)
    }
}

pub fn spacing(chart: Chart, nodes: usize) -> f64 {
    match chart {
        Chart::Circle => 2.0 * PI / nodes as f64,
        Chart::Axisym => PI / (nodes - 1) as f64,
    }
}

pub fn coordinate(chart: Chart, nodes: usize, j: usize) -> f64 {
    j as f64 * spacing(chart, nodes)
}

/// First and second chart derivatives at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartDerivatives {
    pub du: Vec<f64>,
    pub d2u: Vec<f64>,
}

/// Fourth-order central differences of arbitrary nodal values on the chart grid.
pub fn differentiate(chart: Chart, values: &[f64]) -> Result<ChartDerivatives> {
    let nodes = values.len();
    if nodes < MIN_NODES {
        return Err(Error::Config(format!("derivative stencils need N >= {MIN_NODES}, got {nodes}")));
    }
    let h = spacing(chart, nodes);
    let last = (nodes - 1) as isize;
    let at = |j: isize| -> f64 {
        let idx = match chart {
            Chart::Circle => j.rem_euclid(nodes as isize),
            Chart::Axisym => {
                if j < 0 {
                    -j
                } else if j > last {
                    2 * last - j
                } else {
                    j
                }
            }
        };
        values[idx as usize]
    };
    let mut du = Vec::with_capacity(nodes);
    let mut d2u = Vec::with_capacity(nodes);
    for j in 0..nodes as isize {
        let (m2, m1, c, p1, p2) = (at(j - 2), at(j - 1), at(j), at(j + 1), at(j + 2));
        let pole = chart == Chart::Axisym && (j == 0 || j == last);
        du.push(if pole { 0.0 } else { (m2 - p2 + 8.0 * (p1 - m1)) / (12.0 * h) });
        d2u.push((-(m2 + p2) + 16.0 * (m1 + p1) - 30.0 * c) / (12.0 * h * h));
    }
    Ok(ChartDerivatives { du, d2u })
}

pub fn chart_derivatives(field: &GraphField) -> Result<ChartDerivatives> {
    differentiate(field.chart, &field.u)
}

/// `v = sqrt(1 + |Du|^2 / sin^2 u)`.
pub fn gradient_factor(field: &GraphField, deriv: &ChartDerivatives) -> Vec<f64> {
    field
        .u
        .iter()
        .zip(&deriv.du)
        .map(|(&u, &du)| {
            let s = u.sin();
            (1.0 + du * du / (s * s)).sqrt()
        })
        .collect()
}

/// Mixed shape operator `h^i_j` at one node, diagonal in the (meridian, azimuth) frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeOperator {
    /// Meridional entry `h^theta_theta` (the only entry on the circle chart).
    pub meridian: f64,
    /// Azimuthal entry, repeated `n - 1` times; `None` on the circle chart.
    pub azimuth: Option<f64>,
}

/// Shape operator of a radial graph with respect to the outward normal; geodesic
/// spheres about the chart origin have `h^i_j = cot(u) delta^i_j`.
pub fn shape_operator(field: &GraphField, deriv: &ChartDerivatives, v: &[f64]) -> Vec<ShapeOperator> {
    let nodes = field.nodes();
    (0..nodes)
        .map(|j| {
            let u = field.u[j];
            let (s, c) = u.sin_cos();
            let du = deriv.du[j];
            let d2u = deriv.d2u[j];
            let vj = v[j];
            // sigma~^{theta theta} = 1/v^2; sigma~^{phi phi} = 1/sin^2(theta)
            let umbilic = c / (vj * s);
            let grad2 = du * du / (vj * vj * s * s);
            let meridian = umbilic * (1.0 + grad2) - d2u / (vj * vj * vj * s * s);
            let azimuth = match field.chart {
                Chart::Circle => None,
                Chart::Axisym => {
                    // covariant u_{phi phi} / sin^2(theta) = cot(theta) u'; tends to u'' at the poles
                    let q = if j == 0 || j == nodes - 1 {
                        d2u
                    } else {
                        let theta = field.coordinate(j);
                        du * theta.cos() / theta.sin()
                    };
                    Some(umbilic - q / (vj * s * s))
                }
            };
            ShapeOperator { meridian, azimuth }
        })
        .collect()
}

/// Principal curvatures `(k_merid, k_azim, ..., k_azim)` at every node.
pub fn principal_curvatures(n: usize, shape: &[ShapeOperator]) -> Vec<KappaVector> {
    shape.iter().map(|s| kappa_of(n, s)).collect()
}

fn kappa_of(n: usize, s: &ShapeOperator) -> KappaVector {
    let mut k = Vec::with_capacity(n);
    k.push(s.meridian);
    if let Some(a) = s.azimuth {
        k.extend(std::iter::repeat(a).take(n - 1));
    }
    KappaVector::from_raw(k)
}

/// Area weights `sqrt(det g)` times the chart quadrature weight, and their sum `V_0`.
pub fn area_measure(field: &GraphField, deriv: &ChartDerivatives) -> (Vec<f64>, f64) {
    let nodes = field.nodes();
    let n = field.n;
    let chart_w = chart_weights(field.chart, n, nodes);
    let weights: Vec<f64> = (0..nodes)
        .map(|j| {
            let s = field.u[j].sin();
            let du = deriv.du[j];
            chart_w[j] * (du * du + s * s).sqrt() * s.powi(n as i32 - 1)
        })
        .collect();
    let total = weights.iter().sum();
    (weights, total)
}

/// Quadrature weights of the chart measure `d sigma` on `S^n`.
pub fn chart_weights(chart: Chart, n: usize, nodes: usize) -> Vec<f64> {
    match chart {
        Chart::Circle => periodic_weights(nodes),
        Chart::Axisym => {
            let azimuth = sphere_area(n - 1);
            polar_weights(n, nodes).into_iter().map(|w| w * azimuth).collect()
        }
    }
}

/// Volume `W_0` of the body `{0 <= r <= u(x)}`.
pub fn enclosed_volume(field: &GraphField) -> f64 {
    let w = chart_weights(field.chart, field.n, field.nodes());
    field.u.iter().zip(&w).map(|(&u, &wj)| wj * sin_power_integral(field.n, u)).sum()
}

/// Geometric state at every node of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeData {
    pub n: usize,
    pub deriv: ChartDerivatives,
    pub v: Vec<f64>,
    pub shape: Vec<ShapeOperator>,
    pub kappa: Vec<KappaVector>,
    pub weight: Vec<f64>,
    pub area: f64,
}

impl ShapeData {
    pub fn compute(field: &GraphField) -> Result<Self> {
        let deriv = chart_derivatives(field)?;
        let v = gradient_factor(field, &deriv);
        let shape = shape_operator(field, &deriv, &v);
        if let Some(j) = shape.iter().position(|s| !s.meridian.is_finite() || s.azimuth.is_some_and(|a| !a.is_finite()))
        {
            return Err(Error::DegenerateCurvature { node: j, reason: "non-finite shape operator".into() });
        }
        let kappa = principal_curvatures(field.n, &shape);
        let (weight, area) = area_measure(field, &deriv);
        Ok(Self { n: field.n, deriv, v, shape, kappa, weight, area })
    }

    pub fn nodes(&self) -> usize {
        self.kappa.len()
    }

    /// Smallest principal curvature over all nodes, with its node index.
    pub fn kappa_min(&self) -> (usize, f64) {
        self.kappa
            .iter()
            .enumerate()
            .map(|(j, k)| (j, k.min()))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
    }

    pub fn strictly_convex(&self) -> bool {
        self.kappa_min().1 > CONVEXITY_FLOOR
    }

    /// Mean curvature `H` at every node.
    pub fn mean_curvature(&self) -> Vec<f64> {
        self.kappa.iter().map(KappaVector::mean_curvature).collect()
    }

    /// Quadrature of nodal values against the area measure.
    pub fn integrate(&self, values: impl IntoIterator<Item = f64>) -> f64 {
        self.weight.iter().zip(values).map(|(w, f)| w * f).sum()
    }

    /// Largest chart gradient `max |Du|`.
    pub fn grad_max(&self) -> f64 {
        self.deriv.du.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
    }
}

/// Distance of the graph from the equator `u = pi/2`.
pub fn equator_distance(field: &GraphField) -> f64 {
    field.u.iter().fold(0.0_f64, |a, &u| a.max((u - FRAC_PI_2).abs()))
}

/// Profile of the geodesic sphere of radius `rho` whose centre lies at distance `alpha`
/// from the chart origin along the axis: `cos u cos alpha + sin u sin alpha cos t = cos rho`.
/// Requires `alpha < rho`.
pub fn off_centre_sphere(alpha: f64, rho: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| {
        let a = alpha.cos();
        let b = alpha.sin() * t.cos();
        let r = (a * a + b * b).sqrt();
        b.atan2(a) + (rho.cos() / r).acos()
    }
}
