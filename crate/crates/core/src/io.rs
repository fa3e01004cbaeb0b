//! File formats.
//!
//! * Path collections: CSV long format with header `t,entity,channel,value`,
//!   rows sorted by `(entity, channel, t)`.
//! * Edge documents (ground truth and thresholded complexes):
//!   `{"n": .., "edges": [[i, j], ..]}` with 0-based vertex indices. Complex
//!   documents carry the full simplex list as well.
//! * Probability documents: `n`, `n_tries`, `tau`, and per order a list of
//!   `{"vertices": [..], "frequency": ..}` records, frequencies printed with
//!   six decimals.
//! * Metrics documents: one field per metric.

use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::complex::{ProbabilityTensors, SimplicialComplex};
use crate::error::{Error, Result};
use crate::evalmetrics::{Metric, MetricsRecord};
use crate::synthgen::GroundTruth;
use crate::timeseries::{MultivariatePath, TimeGrid};

pub const CSV_HEADER: [&str; 4] = ["t", "entity", "channel", "value"];

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => parse_err(line, format!("{other:?}")),
    }
}

/// Write paths in long format. Entities appear in the given order.
pub fn write_paths_csv<W: Write>(out: W, paths: &[MultivariatePath<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for p in paths {
        for c in 0..p.dim() {
            for (t, row) in p.grid().times().iter().zip(p.rows()) {
                w.write_record([t.to_string(), p.label().to_string(), c.to_string(), row[c].to_string()])
                    .map_err(csv_err)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

struct EntityRows {
    first_line: u64,
    channels: HashMap<usize, Vec<(f64, f64, u64)>>,
}

/// Read a long-format collection. Entities keep their order of first
/// appearance; each entity may have its own time grid but all its channels
/// must share it.
pub fn read_paths_csv<R: Read>(input: R) -> Result<Vec<MultivariatePath<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(input);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(parse_err(
            1,
            format!(
                "expected header `t,entity,channel,value`, found `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut order: Vec<String> = Vec::new();
    let mut entities: HashMap<String, EntityRows> = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 4 {
            return Err(parse_err(line, format!("expected 4 fields, found {}", rec.len())));
        }
        let t: f64 = rec[0].parse().map_err(|_| parse_err(line, format!("bad time `{}`", &rec[0])))?;
        let entity = rec[1].to_string();
        let channel: usize = rec[2].parse().map_err(|_| parse_err(line, format!("bad channel `{}`", &rec[2])))?;
        let value: f64 = rec[3].parse().map_err(|_| parse_err(line, format!("bad value `{}`", &rec[3])))?;
        if !t.is_finite() || !value.is_finite() {
            return Err(parse_err(line, "non-finite number"));
        }
        let slot = entities.entry(entity.clone()).or_insert_with(|| {
            order.push(entity.clone());
            EntityRows { first_line: line, channels: HashMap::new() }
        });
        slot.channels.entry(channel).or_default().push((t, value, line));
    }
    if order.is_empty() {
        return Err(parse_err(1, "no data rows"));
    }
    order
        .into_iter()
        .map(|name| {
            let mut rows = entities.remove(&name).expect("entity recorded");
            let dim = rows.channels.len();
            let mut columns = Vec::with_capacity(dim);
            for c in 0..dim {
                let mut samples = rows
                    .channels
                    .remove(&c)
                    .ok_or_else(|| parse_err(rows.first_line, format!("entity `{name}` is missing channel {c}")))?;
                samples.sort_by(|a, b| a.0.total_cmp(&b.0));
                if let Some(w) = samples.windows(2).find(|w| w[0].0 == w[1].0) {
                    return Err(parse_err(w[1].2, format!("duplicate time {} for `{name}` channel {c}", w[1].0)));
                }
                columns.push(samples);
            }
            let times: Vec<f64> = columns[0].iter().map(|s| s.0).collect();
            for (c, col) in columns.iter().enumerate() {
                if col.len() != times.len() || col.iter().zip(&times).any(|(s, t)| s.0 != *t) {
                    return Err(parse_err(
                        col[0].2,
                        format!("channel {c} of `{name}` is sampled on a different grid than channel 0"),
                    ));
                }
            }
            let grid = TimeGrid::new(times).map_err(|e| parse_err(rows.first_line, format!("entity `{name}`: {e}")))?;
            let values = (0..grid.len()).flat_map(|i| columns.iter().map(move |col| col[i].1)).collect();
            MultivariatePath::new(name, grid, values, dim)
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeDoc {
    n: usize,
    edges: Vec<[usize; 2]>,
}

fn json_err(e: serde_json::Error) -> Error {
    if e.is_io() {
        return Error::Io(e.into());
    }
    parse_err(e.line() as u64, e.to_string())
}

pub fn ground_truth_to_json(truth: &GroundTruth) -> String {
    let doc = EdgeDoc { n: truth.n(), edges: truth.edges().into_iter().map(|(i, j)| [i, j]).collect() };
    serde_json::to_string_pretty(&doc).expect("edge document serializes") + "\n"
}

/// Read `n` and `edges` from any edge-carrying document (ground truth or
/// thresholded complex).
pub fn edges_from_json(text: &str) -> Result<GroundTruth> {
    let doc: EdgeDoc = serde_json::from_str(text).map_err(json_err)?;
    let edges: Vec<(usize, usize)> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
    GroundTruth::from_edges(doc.n, &edges)
}

#[derive(Serialize)]
struct ComplexDoc<'a> {
    n: usize,
    labels: &'a [String],
    tau: f64,
    edges: Vec<[usize; 2]>,
    simplices: Vec<&'a [usize]>,
}

pub fn complex_to_json(complex: &SimplicialComplex, labels: &[String], tau: f64) -> String {
    let doc = ComplexDoc {
        n: complex.n(),
        labels,
        tau,
        edges: complex.edges().into_iter().map(|(i, j)| [i, j]).collect(),
        simplices: complex.simplices().map(|s| s.vertices()).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("complex document serializes") + "\n"
}

#[derive(Serialize)]
struct FreqRecordOut {
    vertices: Vec<usize>,
    frequency: Box<RawValue>,
}

#[derive(Serialize)]
struct OrderOut {
    order: usize,
    records: Vec<FreqRecordOut>,
}

#[derive(Serialize)]
struct ProbabilityDocOut<'a> {
    n: usize,
    n_tries: usize,
    tau: f64,
    labels: &'a [String],
    orders: Vec<OrderOut>,
}

#[derive(Deserialize)]
struct FreqRecordIn {
    vertices: Vec<usize>,
    frequency: f64,
}

#[derive(Deserialize)]
struct OrderIn {
    order: usize,
    records: Vec<FreqRecordIn>,
}

#[derive(Deserialize)]
struct ProbabilityDocIn {
    n: usize,
    n_tries: usize,
    tau: f64,
    #[serde(default)]
    labels: Vec<String>,
    orders: Vec<OrderIn>,
}

fn six_decimals(x: f64) -> Box<RawValue> {
    RawValue::from_string(format!("{x:.6}")).expect("fixed-point literal is valid JSON")
}

pub fn probability_to_json(prob: &ProbabilityTensors, labels: &[String], tau: f64) -> String {
    let orders = prob
        .orders()
        .map(|order| OrderOut {
            order,
            records: prob
                .records(order)
                .into_iter()
                .map(|(vertices, f)| FreqRecordOut { vertices, frequency: six_decimals(f) })
                .collect(),
        })
        .collect();
    let doc = ProbabilityDocOut { n: prob.n(), n_tries: prob.n_tries(), tau, labels, orders };
    serde_json::to_string_pretty(&doc).expect("probability document serializes") + "\n"
}

/// Parsed probability document: tensors, threshold and vertex labels.
pub fn probability_from_json(text: &str) -> Result<(ProbabilityTensors, f64, Vec<String>)> {
    let doc: ProbabilityDocIn = serde_json::from_str(text).map_err(json_err)?;
    let k_max = doc.orders.iter().map(|o| o.order).max().unwrap_or(2).max(2);
    let records = doc
        .orders
        .into_iter()
        .flat_map(|o| {
            let order = o.order;
            o.records.into_iter().map(move |r| (order, r))
        })
        .map(|(order, r)| {
            if r.vertices.len() != order {
                return Err(Error::InvalidArgument(format!("record {:?} listed under order {order}", r.vertices)));
            }
            Ok((r.vertices, r.frequency))
        })
        .collect::<Result<Vec<_>>>()?;
    let prob = ProbabilityTensors::from_frequencies(doc.n, doc.n_tries, k_max, records)?;
    Ok((prob, doc.tau, doc.labels))
}

#[derive(Serialize)]
struct MetricsDoc {
    tpe: f64,
    tne: f64,
    accuracy: f64,
    precision: f64,
    recall: f64,
    f1: f64,
    degenerate: Vec<&'static str>,
}

pub fn metrics_to_json(rec: &MetricsRecord) -> String {
    let doc = MetricsDoc {
        tpe: rec.get(Metric::Tpe),
        tne: rec.get(Metric::Tne),
        accuracy: rec.get(Metric::Accuracy),
        precision: rec.get(Metric::Precision),
        recall: rec.get(Metric::Recall),
        f1: rec.get(Metric::F1),
        degenerate: rec.degenerate.iter().map(|m| m.key()).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("metrics document serializes") + "\n"
}
