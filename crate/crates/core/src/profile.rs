//! Plain-text storage of graph profiles.
//!
//! The first line is `<chart> <n> <nodes>`; each following line holds the chart
//! coordinate and the value of `u` at one node. Blank lines and lines starting with
//! `#` are ignored.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Chart, GraphField};

/// Largest mismatch tolerated between a stored coordinate and the chart grid.
const COORDINATE_TOL: f64 = 1e-9;

pub fn write_profile<W: Write>(field: &GraphField, out: &mut W) -> Result<()> {
    writeln!(out, "{} {} {}", field.chart().name(), field.n(), field.nodes())?;
    for (j, u) in field.u().iter().enumerate() {
        writeln!(out, "{:.18} {:.18}", field.coordinate(j), u)?;
    }
    Ok(())
}

pub fn save_profile(field: &GraphField, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_profile(field, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn parse_profile(text: &str) -> Result<GraphField> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line, header) = lines.next().ok_or_else(|| Error::Parse("profile is empty".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [chart, n, nodes] = fields[..] else {
        return Err(Error::Parse(format!("line {line}: expected header `<chart> <n> <nodes>`")));
    };
    let chart = Chart::parse(chart).map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
    let n: usize = number(n, line, "dimension")?;
    let nodes: usize = number(nodes, line, "node count")?;

    let mut u = Vec::with_capacity(nodes);
    for (line, text) in lines {
        let fields: Vec<&str> = text.split_whitespace().collect();
        let [x, value] = fields[..] else {
            return Err(Error::Parse(format!("line {line}: expected `<coordinate> <u>`")));
        };
        let x: f64 = number(x, line, "coordinate")?;
        let value: f64 = number(value, line, "profile value")?;
        if !(x.is_finite() && value.is_finite()) {
            return Err(Error::Parse(format!("line {line}: non-finite entry")));
        }
        let j = u.len();
        if j < nodes {
            let expected = crate::geometry::coordinate(chart, nodes, j);
            if (x - expected).abs() > COORDINATE_TOL {
                return Err(Error::Parse(format!(
                    "line {line}: coordinate {x} does not match grid node {j} at {expected}"
                )));
            }
        }
        u.push(value);
    }
    if u.len() != nodes {
        return Err(Error::Parse(format!("header announces {nodes} nodes, found {}", u.len())));
    }
    GraphField::new(chart, n, u).map_err(|e| Error::Parse(e.to_string()))
}

pub fn load_profile(path: &Path) -> Result<GraphField> {
    let text = std::fs::read_to_string(path)?;
    parse_profile(&text)
}

fn number<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("line {line}: cannot read {what} from `{s}`")))
}
