use std::io::Read;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::graph::{DynamicGraph, Event};

/// On-disk event stream formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    /// Header line, then `src_id,dst_id,timestamp,state_label,f1,...,fk`
    /// with comma-separated real-valued edge features.
    JodieCsv,
    /// `src dst timestamp`, whitespace-separated, no header.
    EdgeList,
}

impl GraphFormat {
    pub fn parse_name(name: &str) -> Result<Self> {
        match name {
            "jodie_csv" | "jodie-csv" | "csv" => Ok(GraphFormat::JodieCsv),
            "edge_list" | "edge-list" => Ok(GraphFormat::EdgeList),
            other => Err(Error::invalid(format!("unknown graph format '{other}'"))),
        }
    }
}

/// Reads an event stream and builds a graph. Events are sorted stably by
/// time, features are populated (or zero-width when the format carries
/// none) and `node_count` is one past the largest id seen.
pub fn load_events(source: &mut dyn Read, format: GraphFormat) -> Result<DynamicGraph> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    parse_events(&text, format)
}

/// In-memory variant of [`load_events`].
pub fn parse_events(text: &str, format: GraphFormat) -> Result<DynamicGraph> {
    match format {
        GraphFormat::JodieCsv => parse_jodie_csv(text),
        GraphFormat::EdgeList => parse_edge_list(text),
    }
}

fn parse_field<T: std::str::FromStr>(field: &str, line: usize, what: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    field.trim().parse().map_err(|e| Error::Parse {
        line,
        msg: format!("invalid {what} '{}': {e}", field.trim()),
    })
}

fn parse_time(field: &str, line: usize) -> Result<f64> {
    let t: f64 = parse_field(field, line, "timestamp")?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Parse { line, msg: format!("timestamp {t} must be finite and >= 0") });
    }
    Ok(t)
}

fn parse_jodie_csv(text: &str) -> Result<DynamicGraph> {
    let mut events = Vec::new();
    let mut feature_rows: Vec<Vec<f64>> = Vec::new();
    let mut feature_dim: Option<usize> = None;
    let mut max_id: Option<usize> = None;
    // First line is the header.
    for (lineno, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let line_display = lineno + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 4 {
            return Err(Error::Parse {
                line: line_display,
                msg: format!("expected at least 4 comma-separated fields, got {}", fields.len()),
            });
        }
        let src: usize = parse_field(fields[0], line_display, "source id")?;
        let dst: usize = parse_field(fields[1], line_display, "destination id")?;
        let time = parse_time(fields[2], line_display)?;
        let _state: f64 = parse_field(fields[3], line_display, "state label")?;
        let feats: Vec<f64> = fields[4..]
            .iter()
            .map(|f| parse_field(f, line_display, "edge feature"))
            .collect::<Result<_>>()?;
        match feature_dim {
            None => feature_dim = Some(feats.len()),
            Some(d) if d != feats.len() => {
                return Err(Error::Parse {
                    line: line_display,
                    msg: format!("expected {d} edge features, got {}", feats.len()),
                });
            }
            _ => {}
        }
        max_id = Some(max_id.map_or(src.max(dst), |m| m.max(src).max(dst)));
        events.push(Event {
            src,
            dst,
            time,
            edge_feature_index: Some(feature_rows.len()),
        });
        feature_rows.push(feats);
    }
    let node_count = max_id.map_or(0, |m| m + 1);
    let edge_features = Matrix::from_rows(&feature_rows);
    DynamicGraph::new(node_count, events, Matrix::zeros(node_count, 0), edge_features)
}

fn parse_edge_list(text: &str) -> Result<DynamicGraph> {
    let mut events = Vec::new();
    let mut max_id: Option<usize> = None;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_display = lineno + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_display,
                msg: format!("expected 'src dst timestamp', got {} fields", fields.len()),
            });
        }
        let src: usize = parse_field(fields[0], line_display, "source id")?;
        let dst: usize = parse_field(fields[1], line_display, "destination id")?;
        let time = parse_time(fields[2], line_display)?;
        max_id = Some(max_id.map_or(src.max(dst), |m| m.max(src).max(dst)));
        events.push(Event::new(src, dst, time));
    }
    let node_count = max_id.map_or(0, |m| m + 1);
    DynamicGraph::from_events(node_count, events)
}

/// Serializes a graph's event stream in the edge-list format. Timestamps
/// render as shortest round-tripping decimals, so reloading reproduces the
/// stream exactly.
pub fn to_edge_list(g: &DynamicGraph) -> String {
    let mut out = String::new();
    for ev in g.events() {
        out.push_str(&format!("{} {} {}\n", ev.src, ev.dst, ev.time));
    }
    out
}
