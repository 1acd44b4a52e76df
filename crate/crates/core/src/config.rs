//! Run documents: one JSON file describing the curvature function, the initial
//! profile, the integration parameters and the output locations.
//!
//! Every field outside `curvature` and `geometry.n` has a default, listed in the
//! `default_*` functions below. Relative paths are resolved against the directory
//! holding the document.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{
    FlowConfig, DEFAULT_CFL, DEFAULT_MAX_STEPS, DEFAULT_RECORD_EVERY, DEFAULT_STOP_EPS_EQUATOR, DEFAULT_STOP_F_MIN,
};
use crate::geometry::{Chart, GraphField};
use crate::profile::load_profile;
use crate::symfunc::CurvatureFields;

pub const DEFAULT_NODES: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunDocument {
    pub curvature: CurvatureFields,
    pub geometry: GeometrySection,
    #[serde(default)]
    pub flow: FlowSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    /// `circle` for `n = 1`, `axisym` otherwise when omitted.
    #[serde(default)]
    pub chart: Option<String>,
    pub n: usize,
    #[serde(default = "default_nodes", alias = "N")]
    pub nodes: usize,
    pub initial: InitialData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialData {
    /// Geodesic ball of the given radius around the chart origin.
    Ball(f64),
    /// `base + sum_m amplitudes[m-1] cos(m t)`.
    Perturbed { base: f64, amplitudes: Vec<f64> },
    /// A stored profile.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSection {
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_stop_eps_equator")]
    pub stop_eps_equator: f64,
    #[serde(default = "default_stop_f_min", alias = "stop_F_min")]
    pub stop_f_min: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default)]
    pub record_interval: Option<f64>,
    #[serde(default)]
    pub stop_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_trace_path")]
    pub trace_path: PathBuf,
    #[serde(default = "default_report_path")]
    pub report_path: PathBuf,
    /// Write a profile snapshot every this many records; 0 writes none.
    #[serde(default)]
    pub snapshot_every: usize,
}

fn default_nodes() -> usize {
    DEFAULT_NODES
}
fn default_cfl() -> f64 {
    DEFAULT_CFL
}
fn default_stop_eps_equator() -> f64 {
    DEFAULT_STOP_EPS_EQUATOR
}
fn default_stop_f_min() -> f64 {
    DEFAULT_STOP_F_MIN
}
fn default_max_steps() -> usize {
    DEFAULT_MAX_STEPS
}
fn default_record_every() -> usize {
    DEFAULT_RECORD_EVERY
}
fn default_trace_path() -> PathBuf {
    "trace.csv".into()
}
fn default_report_path() -> PathBuf {
    "report.json".into()
}

impl Default for FlowSection {
    fn default() -> Self {
        Self {
            cfl: DEFAULT_CFL,
            stop_eps_equator: DEFAULT_STOP_EPS_EQUATOR,
            stop_f_min: DEFAULT_STOP_F_MIN,
            max_steps: DEFAULT_MAX_STEPS,
            record_every: DEFAULT_RECORD_EVERY,
            record_interval: None,
            stop_time: None,
        }
    }
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { trace_path: default_trace_path(), report_path: default_report_path(), snapshot_every: 0 }
    }
}

/// A parsed document together with its source text and location.
#[derive(Debug, Clone)]
pub struct LoadedDocument {
    pub document: RunDocument,
    pub text: String,
    pub base_dir: PathBuf,
}

impl LoadedDocument {
    pub fn read(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let document = parse_document(&text)?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { document, text, base_dir })
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn trace_path(&self) -> PathBuf {
        self.resolve(&self.document.output.trace_path)
    }

    pub fn report_path(&self) -> PathBuf {
        self.resolve(&self.document.output.report_path)
    }

    pub fn chart(&self) -> Result<Chart> {
        let g = &self.document.geometry;
        match &g.chart {
            Some(name) => Chart::parse(name).map_err(|e| Error::Config(e.to_string())),
            None if g.n == 1 => Ok(Chart::Circle),
            None => Ok(Chart::Axisym),
        }
    }

    /// Builds the initial profile. Errors from the profile itself (values outside
    /// `(0, pi)`) come back as domain errors; structural problems as config errors.
    pub fn initial_field(&self) -> Result<GraphField> {
        let g = &self.document.geometry;
        let chart = self.chart()?;
        let field = match &g.initial {
            InitialData::Ball(rho) => GraphField::ball(chart, g.n, g.nodes, *rho)?,
            InitialData::Perturbed { base, amplitudes } => GraphField::from_fn(chart, g.n, g.nodes, |t| {
                base + amplitudes.iter().enumerate().map(|(m, a)| a * ((m + 1) as f64 * t).cos()).sum::<f64>()
            })?,
            InitialData::File(path) => {
                let field = load_profile(&self.resolve(path)).map_err(|e| Error::Config(e.to_string()))?;
                if field.chart() != chart || field.n() != g.n {
                    return Err(Error::Config(format!(
                        "stored profile is {} with n = {}, document asks for {} with n = {}",
                        field.chart().name(),
                        field.n(),
                        chart.name(),
                        g.n
                    )));
                }
                field
            }
        };
        Ok(field)
    }

    pub fn flow_config(&self, initial: GraphField) -> Result<FlowConfig> {
        let d = &self.document;
        let spec = d.curvature.to_spec(d.geometry.n).map_err(|e| Error::Config(e.to_string()))?;
        let f = &d.flow;
        let config = FlowConfig {
            cfl: f.cfl,
            stop_eps_equator: f.stop_eps_equator,
            stop_f_min: f.stop_f_min,
            max_steps: f.max_steps,
            record_every: f.record_every,
            record_interval: f.record_interval,
            stop_time: f.stop_time,
            snapshot_every: d.output.snapshot_every,
            ..FlowConfig::new(spec, initial)
        };
        config.validate()?;
        Ok(config)
    }
}

pub fn parse_document(text: &str) -> Result<RunDocument> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid run document: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_takes_defaults() {
        let d = parse_document(
            r#"{"curvature": {"family": "mean", "p": 1}, "geometry": {"n": 2, "initial": {"ball": 0.5}}}"#,
        )
        .unwrap();
        assert_eq!(d.geometry.nodes, DEFAULT_NODES);
        assert_eq!(d.flow, FlowSection::default());
        assert_eq!(d.output, OutputSection::default());
        let loaded = LoadedDocument { document: d, text: String::new(), base_dir: "/runs".into() };
        assert_eq!(loaded.chart().unwrap(), Chart::Axisym);
        assert_eq!(loaded.report_path(), PathBuf::from("/runs/report.json"));
    }

    #[test]
    fn perturbed_profile() {
        let d = parse_document(
            r#"{"curvature": {"family": "root_k", "k": 2, "p": 1},
                "geometry": {"chart": "axisym", "n": 2, "N": 32,
                             "initial": {"perturbed": {"base": 0.7, "amplitudes": [0.05, 0.01]}}}}"#,
        )
        .unwrap();
        let loaded = LoadedDocument { document: d, text: String::new(), base_dir: PathBuf::new() };
        let f = loaded.initial_field().unwrap();
        assert_eq!(f.nodes(), 32);
        assert!((f.u()[0] - 0.76).abs() < 1e-15);
        assert!(loaded.flow_config(f).is_ok());
    }

    #[test]
    fn rejects_unknown_fields_and_bad_families() {
        assert!(parse_document(r#"{"curvature": {"family": "mean", "p": 1}}"#).is_err());
        assert!(parse_document(
            r#"{"curvature": {"family": "mean", "p": 1}, "geometry": {"n": 2, "initial": {"ball": 0.5}}, "extra": 1}"#
        )
        .is_err());
        let d = parse_document(
            r#"{"curvature": {"family": "cube", "p": 1}, "geometry": {"n": 2, "initial": {"ball": 0.5}}}"#,
        )
        .unwrap();
        let loaded = LoadedDocument { document: d, text: String::new(), base_dir: PathBuf::new() };
        let f = loaded.initial_field().unwrap();
        assert!(matches!(loaded.flow_config(f), Err(Error::Config(_))));
    }
}
