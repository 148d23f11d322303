//! generate, fidelity, sweep and bridge-check.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use fidelis::classifiers::{BridgeClassifier, Classifier};
use fidelis::datasets::{
    evaluation_instances, gen_appendix_b, gen_ba2motifs, gen_tree_cycles, gen_tree_grid, Dataset, Task,
};
use fidelis::evaluation::{emit_heatmap, run_sweep, summary_csv, SweepConfig, DEFAULT_BETA_GRID, METRICS};
use fidelis::fidelity::{
    fid_alpha_delta, fid_original, fid_typical_exact, FidelityConfig, FidelityReport, LabelSource, Metric,
    DEFAULT_ENUMERATION_CAP,
};
use fidelis::io::{load_dataset, load_explanations, save_dataset};
use fidelis::{Error, Explanation, LabeledGraph, Result, SampleMode, StreamRng};
use serde::{Deserialize, Serialize};

use crate::classifier_arg::resolve;
use crate::output::{manifest_json, num, write};
use crate::Command;

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct GenerateArgs {
    /// ba2motifs, tree-cycles, tree-grid or appendix-b.
    pub dataset: String,
    /// Graphs to draw (ba2motifs: 1000, appendix-b: 5000).
    #[arg(long)]
    pub count: Option<usize>,
    /// Motifs attached to the tree (tree datasets, default 80).
    #[arg(long)]
    pub motifs: Option<usize>,
    /// appendix-b: vertices (default 30).
    #[arg(long)]
    pub n: Option<usize>,
    /// appendix-b: edge probability (default 0.3).
    #[arg(long)]
    pub p: Option<f64>,
    /// appendix-b: planting probability (default 0.75).
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, env = "FIDELIS_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output JSONL file. A manifest is written next to it.
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

fn generated(a: &GenerateArgs) -> Result<Dataset> {
    let tree = a.dataset.starts_with("tree-");
    let er = a.dataset == "appendix-b";
    if a.motifs.is_some() && !tree {
        return usage(format!("--motifs applies to tree datasets, not {}", a.dataset));
    }
    if a.count.is_some() && tree {
        return usage("tree datasets take --motifs, not --count");
    }
    if (a.n.is_some() || a.p.is_some() || a.q.is_some()) && !er {
        return usage("--n, --p and --q apply to appendix-b only");
    }
    match a.dataset.as_str() {
        "ba2motifs" => gen_ba2motifs(a.count.unwrap_or(1000), a.seed),
        "tree-cycles" => gen_tree_cycles(a.motifs.unwrap_or(80), a.seed),
        "tree-grid" => gen_tree_grid(a.motifs.unwrap_or(80), a.seed),
        "appendix-b" => gen_appendix_b(
            a.n.unwrap_or(30),
            a.p.unwrap_or(0.3),
            a.q.unwrap_or(0.75),
            a.count.unwrap_or(5000),
            a.seed,
        ),
        other => usage(format!("unknown dataset {other:?}; known: ba2motifs, tree-cycles, tree-grid, appendix-b")),
    }
}

pub fn generate(a: GenerateArgs) -> Result<()> {
    let data = generated(&a)?;
    save_dataset(&data, &a.out)?;
    let mut manifest_path = a.out.clone().into_os_string();
    manifest_path.push(".manifest.json");
    let resolved = serde_json::json!({ "name": data.name, "graphs": data.len(), "num_classes": data.num_classes });
    write(manifest_path.as_ref(), &manifest_json(&Command::Generate(a.clone()), resolved)?)?;
    match &data.node_task {
        Some(nt) => println!("wrote {} ({} nodes, {} motifs)", a.out.display(), data.graphs[0].graph.num_nodes(), nt.motifs.len()),
        None => println!("wrote {} graphs to {}", data.len(), a.out.display()),
    }
    Ok(())
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelArg {
    True,
    Predicted,
}

impl From<LabelArg> for LabelSource {
    fn from(l: LabelArg) -> Self {
        match l {
            LabelArg::True => LabelSource::TrueLabel,
            LabelArg::Predicted => LabelSource::Predicted,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorArg {
    /// Explanation removed outright / kept alone.
    Original,
    /// M sampled perturbations per side.
    Sampled,
    /// Enumeration over the typical set of subsets.
    Exact,
}

/// Settings shared by `fidelity` and `sweep`.
#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 0.1)]
    pub alpha1: f64,
    #[arg(long, default_value_t = 0.9)]
    pub alpha2: f64,
    /// Perturbations M per graph and side.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    /// ratio or bernoulli.
    #[arg(long, default_value = "ratio")]
    pub mode: SampleMode,
    /// probability or accuracy.
    #[arg(long, default_value = "probability")]
    pub metric: Metric,
    #[arg(long, value_enum, default_value_t = LabelArg::True)]
    pub label_source: LabelArg,
    #[arg(long, env = "FIDELIS_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Ego-graph radius for node-classification datasets.
    #[arg(long, default_value_t = 3)]
    pub ego_hops: usize,
    /// Motif nodes evaluated on node-classification datasets.
    #[arg(long, default_value_t = 100)]
    pub max_nodes: usize,
}

impl SamplingArgs {
    fn config(&self) -> Result<FidelityConfig> {
        let cfg = FidelityConfig {
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            samples: self.samples,
            mode: self.mode,
            metric: self.metric,
            seed: self.seed,
            label_source: self.label_source.into(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct FidelityArgs {
    /// Dataset JSONL.
    #[arg(long)]
    pub data: PathBuf,
    /// Explanations JSONL; the dataset's ground truth when omitted.
    #[arg(long)]
    pub explanations: Option<PathBuf>,
    /// builtin:motif[:DATASET], builtin:noisy:delta=D, builtin:constant:P0,P1,
    /// builtin:appendix-b:n=N,p=P, bridge:cmd=..., bridge:tcp=HOST:PORT.
    #[arg(long, default_value = "builtin:motif")]
    pub classifier: String,
    #[arg(long, value_enum, default_value_t = EstimatorArg::Sampled)]
    pub estimator: EstimatorArg,
    /// Half-width of the admissible subset sizes for the exact estimator.
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    /// Largest edge pool the exact estimator enumerates.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: usize,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// Output directory: report.json, report.csv, manifest.json.
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

/// Node tasks become ego-graph instances so that every explanation has a
/// graph of its own.
fn instances(data: Dataset, s: &SamplingArgs) -> Result<Dataset> {
    match data.task {
        Task::NodeClassification => evaluation_instances(&data, s.ego_hops, s.max_nodes, s.seed),
        Task::GraphClassification => Ok(data),
    }
}

fn report_csv(r: &FidelityReport, n: usize) -> String {
    let est = serde_json::to_value(r.estimator).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    format!(
        "estimator,alpha1,alpha2,samples,num_graphs,fid_plus,fid_minus,fid_delta\n{est},{},{},{},{n},{},{},{}\n",
        num(r.config.alpha1),
        num(r.config.alpha2),
        r.config.samples,
        num(r.fid_plus),
        num(r.fid_minus),
        num(r.fid_delta)
    )
}

pub fn fidelity(a: FidelityArgs) -> Result<()> {
    let cfg = a.sampling.config()?;
    if !(0.0..=1.0).contains(&a.eps) {
        return usage(format!("--eps must lie in [0, 1], got {}", a.eps));
    }
    let data = instances(load_dataset(&a.data)?, &a.sampling)?;
    let explanations = match &a.explanations {
        None => data.gt_explanations.clone(),
        Some(path) => {
            let loaded = load_explanations(path, &data)?;
            if !loaded.missing.is_empty() {
                eprintln!(
                    "warning: {} graph(s) without an explanation line, treated as empty (first: {})",
                    loaded.missing.len(),
                    loaded.missing[0]
                );
            }
            loaded.explanations
        }
    };
    for (i, (lg, e)) in data.graphs.iter().zip(&explanations).enumerate() {
        if !e.is_bound_to(&lg.graph) {
            return usage(format!("explanation {i} has edges outside graph {i}"));
        }
    }
    let pairs: Vec<(LabeledGraph, Explanation)> = data.graphs.iter().cloned().zip(explanations).collect();
    let f = resolve(&a.classifier, Some(&data))?;
    let report = match a.estimator {
        EstimatorArg::Original => fid_original(f.as_ref(), &pairs, &cfg)?,
        EstimatorArg::Sampled => fid_alpha_delta(f.as_ref(), &pairs, &cfg)?,
        EstimatorArg::Exact => fid_typical_exact(f.as_ref(), &pairs, &cfg, a.eps, a.cap)?,
    };
    write(&a.out.join("report.json"), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    write(&a.out.join("report.csv"), &report_csv(&report, pairs.len()))?;
    let resolved = serde_json::json!({ "dataset": data.name, "num_graphs": pairs.len(), "config": cfg });
    write(&a.out.join("manifest.json"), &manifest_json(&Command::Fidelity(a.clone()), resolved)?)?;
    println!(
        "{} graphs: fid+ {:.6}  fid- {:.6}  fidΔ {:.6}  ({})",
        pairs.len(),
        report.fid_plus,
        report.fid_minus,
        report.fid_delta,
        a.out.display()
    );
    Ok(())
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "builtin:motif")]
    pub classifier: String,
    /// β grid shared by both axes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub betas: Option<Vec<f64>>,
    /// Candidate explanations per cell.
    #[arg(long, default_value_t = 10)]
    pub candidates: usize,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// Output directory.
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

pub fn sweep(a: SweepArgs) -> Result<()> {
    let cfg = SweepConfig {
        beta_grid: a.betas.clone().unwrap_or_else(|| DEFAULT_BETA_GRID.to_vec()),
        candidates_per_cell: a.candidates,
        fidelity: a.sampling.config()?,
        seed: a.sampling.seed,
        ego_hops: a.sampling.ego_hops,
        max_nodes: a.sampling.max_nodes,
    };
    cfg.validate()?;
    let data = load_dataset(&a.data)?;
    let f = resolve(&a.classifier, Some(&data))?;
    let result = run_sweep(&data, f.as_ref(), &cfg)?;
    write(&a.out.join("summary.csv"), &summary_csv(&result))?;
    for m in METRICS.iter().chain(&["edit_distance"]) {
        write(&a.out.join(format!("heatmap_{m}.csv")), &emit_heatmap(&result, m)?)?;
    }
    write(&a.out.join("result.json"), &(serde_json::to_string_pretty(&result)? + "\n"))?;
    let resolved = serde_json::json!({ "dataset": data.name, "config": cfg });
    write(&a.out.join("manifest.json"), &manifest_json(&Command::Sweep(a.clone()), resolved)?)?;
    println!("averaged Spearman with edit distance over {} graphs:", result.num_graphs);
    for (m, v) in METRICS.iter().zip(&result.spearman) {
        println!("  {m:<16} {v:+.4}");
    }
    if !result.undefined_rows.is_empty() {
        println!("  undefined rows per metric: {:?}", result.undefined_rows);
    }
    Ok(())
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct BridgeCheckArgs {
    /// bridge:cmd=... or bridge:tcp=HOST:PORT (builtins are accepted too).
    #[arg(long)]
    pub classifier: String,
    /// Featureless BA-2motifs graphs to send.
    #[arg(long, default_value_t = 4)]
    pub graphs: usize,
    #[arg(long, env = "FIDELIS_SEED", default_value_t = 0)]
    pub seed: u64,
}

pub fn bridge_check(a: BridgeCheckArgs) -> Result<()> {
    let count = a.graphs.max(2).next_multiple_of(2);
    let data = gen_ba2motifs(count, a.seed)?;
    let f: Box<dyn Classifier> = if let Some(cmd) = a.classifier.strip_prefix("bridge:cmd=") {
        let b = BridgeClassifier::spawn(cmd)?;
        println!("hello: num_classes={} feature_dim={}", b.num_classes(), b.feature_dim());
        Box::new(b)
    } else if let Some(addr) = a.classifier.strip_prefix("bridge:tcp=") {
        let b = BridgeClassifier::connect(addr)?;
        println!("hello: num_classes={} feature_dim={}", b.num_classes(), b.feature_dim());
        Box::new(b)
    } else {
        resolve(&a.classifier, Some(&data))?
    };
    let graphs: Vec<_> = data.graphs.iter().take(a.graphs.max(1)).map(|g| g.graph.clone()).collect();
    let mut rngs: Vec<_> = (0..graphs.len()).map(|i| StreamRng::substream(a.seed, &[i as u64])).collect();
    let out = f.classify_batch(&graphs, &mut rngs)?;
    for (i, d) in out.iter().enumerate() {
        let probs: Vec<String> = d.probs().iter().map(|p| format!("{p:.6}")).collect();
        println!("graph {i}: [{}]", probs.join(", "));
    }
    println!("ok");
    Ok(())
}
