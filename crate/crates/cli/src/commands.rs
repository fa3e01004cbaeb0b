use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;
use sigplex::complex::{estimate_probability_tensors, threshold_complex, ProbabilityTensors};
use sigplex::evalmetrics::{aggregate, auc, confusion, format_table, metrics, MetricsRecord};
use sigplex::io::{
    complex_to_json, edges_from_json, ground_truth_to_json, metrics_to_json, probability_to_json, read_paths_csv,
    write_paths_csv,
};
use sigplex::synthgen::simulate_with_stream;
use sigplex::{ground_truth_adjacency, Error, Grid, Path as SeriesPath, Substream, TimeGrid};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

/// Vertex counts covered by `reproduce`.
pub const REPRODUCE_SIZES: [usize; 4] = [5, 6, 7, 8];

fn prepare_out(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_file(path: PathBuf, contents: &[u8]) -> CliResult<PathBuf> {
    fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Grid shared by every vertex, or the union of their grids.
fn common_grid(paths: &[SeriesPath]) -> sigplex::Result<Grid> {
    let first = paths[0].grid();
    if paths.iter().all(|p| p.grid() == first) {
        return Ok(first.clone());
    }
    TimeGrid::union(paths.iter().map(|p| p.grid()))
}

/// Simulate the chain dataset; writes `dataset.csv`, `truth.json` and
/// `config.txt`.
pub fn cmd_generate(cfg: &RunConfig) -> CliResult<String> {
    let data = simulate_with_stream(&cfg.synth, Substream::root(cfg.synth.seed).named("generate"))?;
    let truth = ground_truth_adjacency(cfg.synth.n)?;
    prepare_out(&cfg.out)?;

    let mut csv = Vec::new();
    write_paths_csv(&mut csv, &data)?;
    let csv_path = write_file(cfg.out.join("dataset.csv"), &csv)?;
    let truth_path = write_file(cfg.out.join("truth.json"), ground_truth_to_json(&truth).as_bytes())?;
    write_file(cfg.out.join("config.txt"), cfg.to_text().as_bytes())?;

    let grid = data[0].grid();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "generated {} vertices x {} times x {} channels on [{}, {}] (seed {})",
        data.len(),
        grid.len(),
        data[0].dim(),
        grid.start(),
        grid.end(),
        cfg.synth.seed
    );
    let _ = writeln!(s, "dataset: {}", csv_path.display());
    let _ = writeln!(s, "truth:   {} ({} edges)", truth_path.display(), truth.edges().len());
    Ok(s)
}

/// Estimate hyperedge frequencies for a dataset and threshold them; writes
/// `probability.json` and `complex.json`.
pub fn cmd_infer(cfg: &RunConfig, data_path: &Path) -> CliResult<String> {
    let text = fs::File::open(data_path).map_err(|e| CliError::io(data_path, e))?;
    let data = read_paths_csv(text)?;
    if data.len() < 2 {
        return Err(Error::InvalidArgument(format!("dataset has {} series; need at least 2", data.len())).into());
    }
    let grid = common_grid(&data)?;
    let l = cfg.subset_len.resolve(grid.len());
    let prob = estimate_probability_tensors(
        &data,
        &cfg.inference,
        &grid,
        cfg.n_tries,
        l,
        Substream::root(cfg.synth.seed).named("infer"),
    )?;
    let complex = threshold_complex(&prob, cfg.tau)?;
    if !complex.is_downward_closed() {
        return Err(Error::Invariant("thresholded complex is not downward closed".into()).into());
    }
    let labels: Vec<String> = data.iter().map(|p| p.label().to_string()).collect();

    prepare_out(&cfg.out)?;
    let prob_path =
        write_file(cfg.out.join("probability.json"), probability_to_json(&prob, &labels, cfg.tau).as_bytes())?;
    let complex_path =
        write_file(cfg.out.join("complex.json"), complex_to_json(&complex, &labels, cfg.tau).as_bytes())?;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} vertices, {} tries on {} of {} times, order {}, K = {}",
        data.len(),
        cfg.n_tries,
        l,
        grid.len(),
        cfg.inference.order,
        cfg.inference.k_max
    );
    let edges = complex.edges();
    let _ = writeln!(s, "{} edges with frequency >= {}:", edges.len(), cfg.tau);
    for (i, j) in edges {
        let _ = writeln!(s, "  {} - {}  {:.2}", labels[i], labels[j], prob.frequency(&[i, j]));
    }
    let _ = writeln!(s, "frequencies: {}", prob_path.display());
    let _ = writeln!(s, "complex:     {}", complex_path.display());
    Ok(s)
}

/// Score a predicted edge document against a ground truth document; writes
/// `metrics.json`.
pub fn cmd_evaluate(cfg: &RunConfig, pred_path: &Path, truth_path: &Path) -> CliResult<String> {
    let pred = edges_from_json(&read_file(pred_path)?)?;
    let truth = edges_from_json(&read_file(truth_path)?)?;
    if pred.n() != truth.n() {
        return Err(Error::InvalidArgument(format!(
            "prediction has n = {} but ground truth has n = {}",
            pred.n(),
            truth.n()
        ))
        .into());
    }
    let rec = metrics(&confusion(pred.adjacency(), &truth)?);
    prepare_out(&cfg.out)?;
    let path = write_file(cfg.out.join("metrics.json"), metrics_to_json(&rec).as_bytes())?;

    let mut s = format_table(&[(truth.n(), rec.clone())], true);
    if !rec.degenerate.is_empty() {
        let names: Vec<&str> = rec.degenerate.iter().map(|m| m.key()).collect();
        let _ = writeln!(s, "undefined ratios reported as 0: {}", names.join(", "));
    }
    let _ = writeln!(s, "metrics: {}", path.display());
    Ok(s)
}

/// Outcome of one simulated run of `reproduce`.
pub struct RunOutcome {
    pub metrics: MetricsRecord,
    /// Pair frequency and whether the pair is a true edge, for `i < j`.
    pub pair_scores: Vec<(f64, bool)>,
}

/// Seed tree of `reproduce`: run `r` at size `n` draws from
/// `root(seed).index(n).index(r)`.
pub fn run_stream(seed: u64, n: usize, run: usize) -> Substream {
    Substream::root(seed).index(n as u64).index(run as u64)
}

/// Generate, infer and score one chain dataset.
pub fn single_run(cfg: &RunConfig, n: usize, stream: Substream) -> sigplex::Result<RunOutcome> {
    let synth = sigplex::Synth { n, ..cfg.synth.clone() };
    let data = simulate_with_stream(&synth, stream.named("generate"))?;
    let grid = data[0].grid().clone();
    let l = cfg.subset_len.resolve(grid.len());
    let prob = estimate_probability_tensors(&data, &cfg.inference, &grid, cfg.n_tries, l, stream.named("tries"))?;
    let complex = threshold_complex(&prob, cfg.tau)?;
    if !complex.is_downward_closed() {
        return Err(Error::Invariant("thresholded complex is not downward closed".into()));
    }
    let truth = ground_truth_adjacency(n)?;
    Ok(RunOutcome {
        metrics: metrics(&confusion(&complex.adjacency_matrix(), &truth)?),
        pair_scores: pair_scores(&prob, &truth),
    })
}

fn pair_scores(prob: &ProbabilityTensors, truth: &sigplex::GroundTruth) -> Vec<(f64, bool)> {
    let m = prob.pair_matrix();
    let n = prob.n();
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| (m[i][j], truth.has_edge(i, j))).collect()
}

/// Per-size summary produced by `reproduce`.
pub struct SizeSummary {
    pub n: usize,
    pub mean: MetricsRecord,
    pub auc: f64,
    pub edge_frequency: f64,
    pub non_edge_frequency: f64,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Run the table experiment for every size in [`REPRODUCE_SIZES`].
pub fn reproduce_summaries(cfg: &RunConfig) -> sigplex::Result<Vec<SizeSummary>> {
    REPRODUCE_SIZES
        .iter()
        .map(|&n| {
            let outcomes: Vec<RunOutcome> = (0..cfg.runs)
                .into_par_iter()
                .map(|r| single_run(cfg, n, run_stream(cfg.synth.seed, n, r)))
                .collect::<sigplex::Result<_>>()?;
            let records: Vec<MetricsRecord> = outcomes.iter().map(|o| o.metrics.clone()).collect();
            let scores: Vec<(f64, bool)> = outcomes.into_iter().flat_map(|o| o.pair_scores).collect();
            let (s, labels): (Vec<f64>, Vec<bool>) = scores.iter().copied().unzip();
            Ok(SizeSummary {
                n,
                mean: aggregate(&records)?,
                auc: auc(&s, &labels)?,
                edge_frequency: mean(scores.iter().filter(|p| p.1).map(|p| p.0)),
                non_edge_frequency: mean(scores.iter().filter(|p| !p.1).map(|p| p.0)),
            })
        })
        .collect()
}

/// Mean metrics over `runs` simulated datasets per size, with the reference
/// values alongside; writes `table.txt` and `reproduce.json`.
pub fn cmd_reproduce(cfg: &RunConfig) -> CliResult<String> {
    let summaries = reproduce_summaries(cfg)?;
    let columns: Vec<(usize, MetricsRecord)> = summaries.iter().map(|s| (s.n, s.mean.clone())).collect();
    let mut table = format_table(&columns, true);
    let _ = writeln!(
        table,
        "\nmean of {} runs per column (seed {}); reference values in parentheses",
        cfg.runs, cfg.synth.seed
    );

    let doc = json!({
        "seed": cfg.synth.seed,
        "runs": cfg.runs,
        "config": cfg.to_text(),
        "columns": summaries.iter().map(|s| json!({
            "n": s.n,
            "metrics": serde_json::from_str::<serde_json::Value>(&metrics_to_json(&s.mean)).expect("metrics document is valid JSON"),
            "auc": s.auc,
            "mean_edge_frequency": s.edge_frequency,
            "mean_non_edge_frequency": s.non_edge_frequency,
        })).collect::<Vec<_>>(),
    });
    prepare_out(&cfg.out)?;
    let table_path = write_file(cfg.out.join("table.txt"), table.as_bytes())?;
    let json_text = serde_json::to_string_pretty(&doc).expect("summary serializes") + "\n";
    let json_path = write_file(cfg.out.join("reproduce.json"), json_text.as_bytes())?;

    let mut s = table;
    let _ = writeln!(s, "table:   {}", table_path.display());
    let _ = writeln!(s, "summary: {}", json_path.display());
    Ok(s)
}
