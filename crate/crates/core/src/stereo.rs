//! Stereographic projection from the antipode of the chart origin, which maps the
//! geodesic polar chart `(r, x)` to Euclidean polar coordinates `(2 tan(r/2), x)`
//! with conformal factor `e^psi = 1 / (1 + rho^2/4)`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{differentiate, Chart, GraphField, ShapeData, CONVEXITY_FLOOR};

/// `rho = 2 tan(r/2)`.
pub fn project_radius(r: f64) -> Result<f64> {
    if !(0.0..PI).contains(&r) {
        return Err(Error::Argument(format!("projectable radii lie in [0, pi), got {r}")));
    }
    let rho = 2.0 * (0.5 * r).tan();
    if !rho.is_finite() {
        return Err(Error::Domain(format!("projection of r = {r} overflows")));
    }
    Ok(rho)
}

/// `r = 2 arctan(rho/2)`.
pub fn unproject_radius(rho: f64) -> f64 {
    2.0 * (0.5 * rho).atan()
}

/// `(e^(2 psi), e^psi)` at Euclidean radius `rho`.
pub fn conformal_factor(rho: f64) -> (f64, f64) {
    let e = 1.0 / (1.0 + 0.25 * rho * rho);
    (e * e, e)
}

/// Principal curvatures of the projected Euclidean hypersurface and the normal
/// derivative `psi_alpha nu^alpha` at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedShape {
    /// Euclidean radius `2 tan(u/2)` at every node.
    pub radius: Vec<f64>,
    pub meridian: Vec<f64>,
    /// Empty on the circle chart.
    pub azimuth: Vec<f64>,
    pub psi_normal: Vec<f64>,
}

impl ProjectedShape {
    pub fn compute(field: &GraphField) -> Result<Self> {
        let radius = field.u().iter().map(|&u| project_radius(u)).collect::<Result<Vec<_>>>()?;
        let d = differentiate(field.chart(), &radius)?;
        let nodes = field.nodes();
        let mut meridian = Vec::with_capacity(nodes);
        let mut azimuth = Vec::new();
        let mut psi_normal = Vec::with_capacity(nodes);
        for j in 0..nodes {
            let (r, r1, r2) = (radius[j], d.du[j], d.d2u[j]);
            let norm = (r * r + r1 * r1).sqrt();
            meridian.push((r * r + 2.0 * r1 * r1 - r * r2) / norm.powi(3));
            if field.chart() == Chart::Axisym {
                let q = if j == 0 || j == nodes - 1 {
                    r2
                } else {
                    let theta = field.coordinate(j);
                    r1 * theta.cos() / theta.sin()
                };
                azimuth.push((1.0 - q / r) / norm);
            }
            psi_normal.push(-0.5 * r * r / ((1.0 + 0.25 * r * r) * norm));
        }
        Ok(Self { radius, meridian, azimuth, psi_normal })
    }

    /// Largest Euclidean principal curvature over all nodes.
    pub fn kappa_max(&self) -> f64 {
        self.meridian.iter().chain(&self.azimuth).copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Max-node residual of `e^psi h^i_j - h^^i_j - (psi_alpha nu^alpha) delta^i_j`.
pub fn curvature_transfer_residual(field: &GraphField) -> Result<f64> {
    let shape = ShapeData::compute(field)?;
    let proj = ProjectedShape::compute(field)?;
    let mut worst = 0.0_f64;
    for (j, s) in shape.shape.iter().enumerate() {
        let (_, e_psi) = conformal_factor(proj.radius[j]);
        let psi_n = proj.psi_normal[j];
        worst = worst.max((e_psi * s.meridian - proj.meridian[j] - psi_n).abs());
        if let Some(a) = s.azimuth {
            worst = worst.max((e_psi * a - proj.azimuth[j] - psi_n).abs());
        }
    }
    Ok(worst)
}

/// Convexity certificate of a stored or evolved profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub strictly_convex: bool,
    pub kappa_min: f64,
    /// Node attaining `kappa_min`.
    pub kappa_min_node: usize,
    pub hemisphere_contained: bool,
    pub u_max: f64,
    pub u_min: f64,
    /// Rolling-ball bound `1 / max kappa^` in projected coordinates.
    pub inball_radius: f64,
}

pub fn certify(field: &GraphField) -> Result<Certificate> {
    let shape = ShapeData::compute(field)?;
    let (kappa_min_node, kappa_min) = shape.kappa_min();
    let proj = ProjectedShape::compute(field)?;
    let u_max = field.u_max();
    Ok(Certificate {
        strictly_convex: kappa_min > CONVEXITY_FLOOR,
        kappa_min,
        kappa_min_node,
        hemisphere_contained: u_max < FRAC_PI_2,
        u_max,
        u_min: field.u_min(),
        inball_radius: 1.0 / proj.kappa_max(),
    })
}
