//! Subcommand drivers. Each returns the process exit status and writes human-readable
//! messages to the supplied streams.
//!
//! Exit statuses: 0 success (a run that ends with degenerate curvature still counts),
//! 1 failed property or I/O failure, 2 unreadable or invalid input documents, 3 initial
//! or stored profiles that are not strictly convex.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::LoadedDocument;
use crate::error::{Error, Result};
use crate::flow::{run, FlowState, FlowTrace, Termination};
use crate::functionals::{af_slack, applicable_inequalities, write_csv, FunctionalRecord, DEFAULT_DECAY_EXPONENTS};
use crate::geometry::{equator_distance, Chart, GraphField, ShapeData};
use crate::profile::{load_profile, write_profile};
use crate::stereo::{certify, Certificate};
use crate::suite::{run_suite, SuiteOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_CONVEX: i32 = 3;

pub fn run_flow_command(config_path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let doc = match LoadedDocument::read(config_path) {
        Ok(doc) => doc,
        Err(e) => return fail(err, EXIT_INPUT, &e),
    };
    let initial = match doc.initial_field() {
        Ok(f) => f,
        Err(e @ Error::Domain(_)) => return fail(err, EXIT_NOT_CONVEX, &e),
        Err(e) => return fail(err, EXIT_INPUT, &e),
    };
    let config = match doc.flow_config(initial.clone()) {
        Ok(c) => c,
        Err(e) => return fail(err, EXIT_INPUT, &e),
    };
    match certify(&initial) {
        Ok(c) if c.strictly_convex => {}
        Ok(c) => {
            let _ = writeln!(
                err,
                "error: initial profile is not strictly convex at node {} (kappa_min = {:e})",
                c.kappa_min_node, c.kappa_min
            );
            return EXIT_NOT_CONVEX;
        }
        Err(e) => return fail(err, EXIT_NOT_CONVEX, &e),
    }
    if let Err(e) = FlowState::new(0.0, initial, &config.spec) {
        return fail(err, EXIT_NOT_CONVEX, &e);
    }

    let trace = match run(&config) {
        Ok(t) => t,
        Err(e) => return fail(err, EXIT_FAILURE, &e),
    };
    match write_run_outputs(&doc, &trace) {
        Ok(report_path) => {
            let _ = writeln!(
                out,
                "{}: t_stop = {:.12e}, steps = {}, T* estimate = {:.12e}, report {}",
                trace.termination.name(),
                trace.t_stop,
                trace.steps,
                trace.t_star_estimate,
                report_path.display()
            );
            EXIT_OK
        }
        Err(e) => fail(err, EXIT_FAILURE, &e),
    }
}

fn write_run_outputs(doc: &LoadedDocument, trace: &FlowTrace) -> Result<PathBuf> {
    let report_path = doc.report_path();
    let mut csv = Vec::new();
    write_csv(&trace.records, &mut csv)?;
    std::fs::write(doc.trace_path(), csv)?;

    let stem = report_path.file_stem().and_then(|s| s.to_str()).unwrap_or("report").to_owned();
    let dir = report_path.parent().map(Path::to_path_buf).unwrap_or_default();
    for (i, (t, field)) in trace.snapshots.iter().enumerate() {
        let mut buf = format!("# t = {t:.18e}\n").into_bytes();
        write_profile(field, &mut buf)?;
        std::fs::write(dir.join(format!("{stem}.snap{i:05}.txt")), buf)?;
    }

    let report = run_report(doc, trace)?;
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)? + "\n")?;
    Ok(report_path)
}

fn run_report(doc: &LoadedDocument, trace: &FlowTrace) -> Result<Value> {
    let state = &trace.final_state;
    let rec = match trace.records.last() {
        Some(r) => r.clone(),
        None => FunctionalRecord::geometric(state.t, &state.field, &state.shape, &DEFAULT_DECAY_EXPONENTS)?,
    };
    let certificate = certify(&state.field)?;
    let mut report = geometry_report(&state.field, &state.shape, &rec, &certificate)?;
    let degenerate = match &trace.termination {
        Termination::CurvatureDegenerate { node, reason } => json!({ "node": node, "reason": reason }),
        _ => Value::Null,
    };
    let config: Value = serde_json::from_str(&doc.text).unwrap_or_else(|_| Value::String(doc.text.clone()));
    let head = json!({
        "status": trace.termination.name(),
        "degenerate": degenerate,
        "t_stop": trace.t_stop,
        "t_star_estimate": trace.t_star_estimate,
        "steps": trace.steps,
        "records": trace.records.len(),
        "f_min": rec.f_min,
        "pinch": rec.pinch,
    });
    let mut merged = head.as_object().cloned().unwrap_or_default();
    merged.append(&mut report);
    merged.insert("config".into(), config);
    Ok(Value::Object(merged))
}

/// Functionals, slacks and certificate of one profile.
fn geometry_report(
    field: &GraphField,
    shape: &ShapeData,
    rec: &FunctionalRecord,
    cert: &Certificate,
) -> Result<Map<String, Value>> {
    let mut slacks = Map::new();
    for which in applicable_inequalities(field.n()) {
        let s = af_slack(rec, which)?;
        slacks.insert(
            which.name(),
            json!({ "value": s.value, "scale": s.scale, "relative": s.relative(), "equality": s.equality }),
        );
    }
    let phi3: Vec<Value> =
        rec.phi3.iter().map(|p| json!({ "k": p.k, "value": p.value, "numerator": p.numerator })).collect();
    let decay: Vec<Value> = rec.decay.iter().map(|(q, v)| json!({ "q": q, "value": v })).collect();
    let body = json!({
        "chart": field.chart().name(),
        "n": field.n(),
        "nodes": field.nodes(),
        "u_max": field.u_max(),
        "u_min": field.u_min(),
        "grad_max": shape.grad_max(),
        "equator_distance": equator_distance(field),
        "h_max": rec.h_max,
        "certificate": serde_json::to_value(cert)?,
        "V": rec.v,
        "W": rec.w,
        "phi1": rec.phi1,
        "phi2": rec.phi2,
        "phi3": phi3,
        "slacks": slacks,
        "decay": decay,
    });
    Ok(body.as_object().cloned().unwrap_or_default())
}

pub fn verify_command(profile: &Path, n: usize, chart: &str, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let chart = match Chart::parse(chart) {
        Ok(c) => c,
        Err(e) => return fail(err, EXIT_INPUT, &e),
    };
    let field = match load_profile(profile) {
        Ok(f) => f,
        Err(e) => return fail(err, EXIT_INPUT, &e),
    };
    if field.chart() != chart || field.n() != n {
        let _ = writeln!(
            err,
            "error: profile header says {} with n = {}, expected {} with n = {n}",
            field.chart().name(),
            field.n(),
            chart.name()
        );
        return EXIT_INPUT;
    }
    match verify_report(&field) {
        Ok(Ok(report)) => match serde_json::to_string_pretty(&report) {
            Ok(text) => {
                let _ = writeln!(out, "{text}");
                EXIT_OK
            }
            Err(e) => fail(err, EXIT_FAILURE, &e.into()),
        },
        Ok(Err(cert)) => {
            let _ = writeln!(
                err,
                "error: profile is not strictly convex at node {} (kappa_min = {:e})",
                cert.kappa_min_node, cert.kappa_min
            );
            EXIT_NOT_CONVEX
        }
        Err(e) => fail(err, EXIT_NOT_CONVEX, &e),
    }
}

/// The report of a strictly convex profile, or its failed certificate.
fn verify_report(field: &GraphField) -> Result<std::result::Result<Value, Certificate>> {
    let cert = certify(field)?;
    if !cert.strictly_convex {
        return Ok(Err(cert));
    }
    let shape = ShapeData::compute(field)?;
    let rec = FunctionalRecord::geometric(0.0, field, &shape, &DEFAULT_DECAY_EXPONENTS)?;
    let mut body = geometry_report(field, &shape, &rec, &cert)?;
    let mut report = Map::new();
    report.insert("status".into(), Value::String("verified".into()));
    report.append(&mut body);
    Ok(Ok(Value::Object(report)))
}

pub fn property_suite_command(options: &SuiteOptions, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let report = match run_suite(options) {
        Ok(r) => r,
        Err(e @ Error::Argument(_)) => return fail(err, EXIT_INPUT, &e),
        Err(e) => return fail(err, EXIT_FAILURE, &e),
    };
    if let Err(e) = report.write_summary(out) {
        return fail(err, EXIT_FAILURE, &e);
    }
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

fn fail(err: &mut dyn Write, status: i32, e: &Error) -> i32 {
    let _ = writeln!(err, "error: {e}");
    status
}
