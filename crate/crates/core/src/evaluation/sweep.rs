//! β-grid sweeps: perturb the ground truth, score every candidate, and
//! correlate each metric with the edit distance row by row.
//!
//! Grids are indexed `[β1][β2]`. For each β2 the metric's cell means are
//! correlated with the mean edit distance across β1, then the rows are
//! averaged.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{auc_selection, spearman};
use crate::classifiers::Classifier;
use crate::datasets::{evaluation_instances, Dataset, Task};
use crate::error::{invalid, Error, Result};
use crate::fidelity::{fid_alpha_delta, fid_original, mean, FidelityConfig};
use crate::graph::{edit_distance, Explanation, LabeledGraph};
use crate::rng::StreamRng;
use crate::samplers::{check_prob, perturb_explanation};

pub const DEFAULT_BETA_GRID: [f64; 6] = [0.0, 0.1, 0.3, 0.5, 0.7, 0.9];

/// Metric names in output order.
pub const METRICS: [&str; 7] =
    ["fid_plus", "fid_minus", "fid_delta", "fid_alpha_plus", "fid_alpha_minus", "fid_alpha_delta", "auc"];

const TAG_PERTURB: u64 = 0x5EE9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub beta_grid: Vec<f64>,
    pub candidates_per_cell: usize,
    pub fidelity: FidelityConfig,
    pub seed: u64,
    /// Hops of the ego graphs built for node tasks.
    pub ego_hops: usize,
    /// Motif nodes evaluated for node tasks.
    pub max_nodes: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            beta_grid: DEFAULT_BETA_GRID.to_vec(),
            candidates_per_cell: 10,
            fidelity: FidelityConfig::default(),
            seed: 0,
            ego_hops: 3,
            max_nodes: 100,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.beta_grid.len() < 2 {
            return invalid("the β grid needs at least two values");
        }
        for &b in &self.beta_grid {
            check_prob("beta", b)?;
        }
        if self.candidates_per_cell == 0 {
            return invalid("candidates_per_cell must be at least 1");
        }
        self.fidelity.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub num_graphs: usize,
    /// One `[β1][β2]` grid of cell means per entry of [`METRICS`].
    pub cells: Vec<Vec<Vec<f64>>>,
    pub edit_distance: Vec<Vec<f64>>,
    /// Per metric and β2 row; `None` where a side is constant.
    pub row_spearman: Vec<Vec<Option<f64>>>,
    /// Row average per metric, undefined rows counting as 0.
    pub spearman: Vec<f64>,
    pub undefined_rows: Vec<usize>,
}

impl SweepResult {
    pub fn metric_index(name: &str) -> Result<usize> {
        METRICS
            .iter()
            .position(|m| *m == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown metric {name:?}; known: {}", METRICS.join(", "))))
    }

    pub fn grid(&self, metric: &str) -> Result<&Vec<Vec<f64>>> {
        Ok(&self.cells[Self::metric_index(metric)?])
    }

    pub fn averaged(&self, metric: &str) -> Result<f64> {
        Ok(self.spearman[Self::metric_index(metric)?])
    }
}

/// Metric values for one candidate draw, in [`METRICS`] order, plus the
/// mean edit distance.
fn score_candidate(
    f: &dyn Classifier,
    data: &Dataset,
    cfg: &SweepConfig,
    cell: (usize, usize),
    candidate: usize,
) -> Result<([f64; 7], f64)> {
    let (b1, b2) = (cfg.beta_grid[cell.0], cfg.beta_grid[cell.1]);
    let mut pairs: Vec<(LabeledGraph, Explanation)> = Vec::with_capacity(data.len());
    let mut edits = Vec::with_capacity(data.len());
    let mut aucs = Vec::with_capacity(data.len());
    for (i, (lg, gt)) in data.graphs.iter().zip(&data.gt_explanations).enumerate() {
        let path = [TAG_PERTURB, cell.0 as u64, cell.1 as u64, candidate as u64, i as u64];
        let mut rng = StreamRng::substream(cfg.seed, &path);
        let cand = perturb_explanation(&lg.graph, gt, b1, b2, &mut rng)?;
        edits.push(edit_distance(cand.edges(), gt.edges()) as f64);
        match auc_selection(cand.edges(), gt.edges(), lg.graph.edges()) {
            Ok(a) => aucs.push(a),
            Err(Error::UndefinedAuc(_)) => {}
            Err(e) => return Err(e),
        }
        pairs.push((lg.clone(), cand));
    }
    let orig = fid_original(f, &pairs, &cfg.fidelity)?;
    let samp = fid_alpha_delta(f, &pairs, &cfg.fidelity)?;
    let auc = if aucs.is_empty() { f64::NAN } else { mean(aucs.into_iter()) };
    Ok((
        [orig.fid_plus, orig.fid_minus, orig.fid_delta, samp.fid_plus, samp.fid_minus, samp.fid_delta, auc],
        mean(edits.into_iter()),
    ))
}

/// Runs the protocol. Node tasks are first turned into ego-graph instances.
pub fn run_sweep(data: &Dataset, f: &dyn Classifier, cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let data = match data.task {
        Task::NodeClassification => evaluation_instances(data, cfg.ego_hops, cfg.max_nodes, cfg.seed)?,
        Task::GraphClassification => data.clone(),
    };
    if data.gt_explanations.len() != data.len() || data.is_empty() {
        return invalid("the sweep needs a ground-truth explanation for every graph");
    }
    let g = cfg.beta_grid.len();
    let jobs: Vec<(usize, usize, usize)> = (0..g)
        .flat_map(|i| (0..g).flat_map(move |j| (0..cfg.candidates_per_cell).map(move |c| (i, j, c))))
        .collect();
    let scored = jobs
        .par_iter()
        .map(|&(i, j, c)| score_candidate(f, &data, cfg, (i, j), c))
        .collect::<Result<Vec<_>>>()?;

    let mut cells = vec![vec![vec![0.0; g]; g]; METRICS.len()];
    let mut edit = vec![vec![0.0; g]; g];
    let per_cell = cfg.candidates_per_cell;
    for (chunk, cell) in scored.chunks(per_cell).zip((0..g).flat_map(|i| (0..g).map(move |j| (i, j)))) {
        for (m, grid) in cells.iter_mut().enumerate() {
            grid[cell.0][cell.1] = mean(chunk.iter().map(|(v, _)| v[m]));
        }
        edit[cell.0][cell.1] = mean(chunk.iter().map(|(_, e)| *e));
    }

    let mut row_spearman = Vec::with_capacity(METRICS.len());
    let mut averaged = Vec::with_capacity(METRICS.len());
    let mut undefined = Vec::with_capacity(METRICS.len());
    for grid in &cells {
        let rows: Vec<Option<f64>> = (0..g)
            .map(|j| {
                let xs: Vec<f64> = (0..g).map(|i| grid[i][j]).collect();
                let ys: Vec<f64> = (0..g).map(|i| edit[i][j]).collect();
                match spearman(&xs, &ys) {
                    Ok(r) => Ok(Some(r)),
                    Err(Error::UndefinedCorrelation(_)) => Ok(None),
                    // NaN cells (no defined AUC) leave the row undefined.
                    Err(Error::InvalidArgument(_)) if xs.iter().any(|x| x.is_nan()) => Ok(None),
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<_>>()?;
        averaged.push(rows.iter().map(|r| r.unwrap_or(0.0)).sum::<f64>() / g as f64);
        undefined.push(rows.iter().filter(|r| r.is_none()).count());
        row_spearman.push(rows);
    }
    Ok(SweepResult {
        config: cfg.clone(),
        num_graphs: data.len(),
        cells,
        edit_distance: edit,
        row_spearman,
        spearman: averaged,
        undefined_rows: undefined,
    })
}

fn fmt(v: f64) -> String {
    // Shortest representation that parses back to the same value.
    format!("{v:?}")
}

/// One metric's grid as CSV: a header of β2 values, then one row per β1.
pub fn emit_heatmap(result: &SweepResult, metric: &str) -> Result<String> {
    let grid = if metric == "edit_distance" { &result.edit_distance } else { result.grid(metric)? };
    let betas = &result.config.beta_grid;
    let mut out = String::from("beta1\\beta2");
    for b in betas {
        out.push(',');
        out.push_str(&fmt(*b));
    }
    out.push('\n');
    for (b1, row) in betas.iter().zip(grid) {
        out.push_str(&fmt(*b1));
        for v in row {
            out.push(',');
            out.push_str(&fmt(*v));
        }
        out.push('\n');
    }
    Ok(out)
}

/// A heatmap parsed back: β1 values, β2 values and the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Heatmap {
    pub beta1: Vec<f64>,
    pub beta2: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

pub fn parse_heatmap(csv: &str) -> Result<Heatmap> {
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Data(format!("bad number {s:?}: {e}")));
    let mut lines = csv.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Data("empty heatmap".into()))?;
    let beta2 = header.split(',').skip(1).map(num).collect::<Result<Vec<_>>>()?;
    let (mut beta1, mut values) = (Vec::new(), Vec::new());
    for line in lines {
        let mut cols = line.split(',');
        beta1.push(num(cols.next().unwrap_or(""))?);
        let row = cols.map(num).collect::<Result<Vec<_>>>()?;
        if row.len() != beta2.len() {
            return Err(Error::Data(format!("row has {} values, header has {}", row.len(), beta2.len())));
        }
        values.push(row);
    }
    Ok(Heatmap { beta1, beta2, values })
}

/// The correlation table: the averaged row first, then one row per β2.
/// Undefined rows are left empty.
pub fn summary_csv(result: &SweepResult) -> String {
    let mut out = String::from("row");
    for m in METRICS {
        out.push(',');
        out.push_str(m);
    }
    out.push('\n');
    out.push_str("average");
    for v in &result.spearman {
        out.push(',');
        out.push_str(&fmt(*v));
    }
    out.push('\n');
    for (j, b2) in result.config.beta_grid.iter().enumerate() {
        out.push_str(&format!("beta2={}", fmt(*b2)));
        for rows in &result.row_spearman {
            out.push(',');
            if let Some(v) = rows[j] {
                out.push_str(&fmt(v));
            }
        }
        out.push('\n');
    }
    out
}
