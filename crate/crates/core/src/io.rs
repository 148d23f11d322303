//! JSON-Lines dataset and explanation files.
//!
//! A dataset file starts with an optional header
//! `{"name": …, "num_classes": …, "task": …}` followed by one graph per line:
//! `{"num_nodes": n, "edges": [[u, v], …], "features": [[…], …], "label": y,
//! "gt_explanation": [[u, v], …]}`. Features are omitted when they are the
//! default all-ones width-10 matrix. Node-classification files add
//! `node_labels` and `motifs` to their single graph line.
//!
//! An explanation file holds lines `{"graph_index": i, "edges": [[u, v], …]}`.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::datasets::{Dataset, NodeTask, Task};
use crate::error::{Error, Result};
use crate::graph::{EdgeSet, Explanation, Features, Graph, LabeledGraph, DEFAULT_FEATURE_DIM};

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    name: String,
    num_classes: usize,
    task: Task,
}

#[derive(Debug, Serialize, Deserialize)]
struct MotifRecord {
    nodes: Vec<u32>,
    edges: Vec<[u32; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GraphRecord {
    pub num_nodes: usize,
    pub edges: Vec<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub label: Option<usize>,
    #[serde(default)]
    pub gt_explanation: Option<Vec<[u32; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    node_labels: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    motifs: Option<Vec<MotifRecord>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ExplanationRecord {
    graph_index: usize,
    edges: Vec<[u32; 2]>,
}

fn pairs(edges: &EdgeSet) -> Vec<[u32; 2]> {
    edges.iter().map(|e| [e.u(), e.v()]).collect()
}

fn edge_set(pairs: &[[u32; 2]]) -> Result<EdgeSet> {
    EdgeSet::from_pairs(pairs.iter().map(|p| (p[0], p[1]))).map_err(|e| Error::Data(e.to_string()))
}

fn features_json(f: &Features) -> Option<Vec<Vec<f64>>> {
    if f.dim() == DEFAULT_FEATURE_DIM && f.is_all_ones() {
        None
    } else {
        Some((0..f.rows()).map(|r| f.row(r).to_vec()).collect())
    }
}

/// The wire form of a graph, as used in dataset files and the bridge protocol.
pub fn graph_to_record(g: &Graph) -> GraphRecord {
    GraphRecord {
        num_nodes: g.num_nodes(),
        edges: pairs(g.edges()),
        features: features_json(g.features()),
        label: None,
        gt_explanation: None,
        node_labels: None,
        motifs: None,
    }
}

pub fn graph_to_json(g: &Graph) -> serde_json::Value {
    serde_json::to_value(graph_to_record(g)).expect("graph records serialize")
}

pub fn graph_from_record(r: &GraphRecord) -> Result<Graph> {
    let edges = edge_set(&r.edges)?;
    let features = match &r.features {
        Some(rows) => Features::from_rows(rows).map_err(|e| Error::Data(e.to_string()))?,
        None => Features::ones(r.num_nodes, DEFAULT_FEATURE_DIM),
    };
    Graph::new(r.num_nodes, edges, features).map_err(|e| Error::Data(e.to_string()))
}

pub fn write_dataset<W: Write>(d: &Dataset, mut w: W) -> Result<()> {
    let header = Header { name: d.name.clone(), num_classes: d.num_classes, task: d.task };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for (i, (lg, gt)) in d.graphs.iter().zip(&d.gt_explanations).enumerate() {
        let mut rec = graph_to_record(&lg.graph);
        rec.label = Some(lg.label);
        rec.gt_explanation = Some(pairs(gt.edges()));
        if let (0, Some(nt)) = (i, &d.node_task) {
            rec.node_labels = Some(nt.node_labels.clone());
            rec.motifs = Some(
                nt.motifs
                    .iter()
                    .zip(&nt.motif_edges)
                    .map(|(n, e)| MotifRecord { nodes: n.clone(), edges: pairs(e) })
                    .collect(),
            );
        }
        serde_json::to_writer(&mut w, &rec)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_dataset(d: &Dataset, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_dataset(d, std::io::BufWriter::new(f))
}

/// Reads a dataset. Files without a header get the name `fallback_name`,
/// graph-classification task, and as many classes as the labels require
/// (at least two).
pub fn read_dataset<R: BufRead>(r: R, fallback_name: &str) -> Result<Dataset> {
    let mut header: Option<Header> = None;
    let mut graphs = Vec::new();
    let mut gts = Vec::new();
    let mut node_task = None;
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line)
            .map_err(|e| Error::Data(format!("line {}: {e}", lineno + 1)))?;
        if lineno == 0 && value.get("num_nodes").is_none() {
            header = Some(
                serde_json::from_value(value).map_err(|e| Error::Data(format!("header: {e}")))?,
            );
            continue;
        }
        let rec: GraphRecord = serde_json::from_value(value)
            .map_err(|e| Error::Data(format!("line {}: {e}", lineno + 1)))?;
        let g = graph_from_record(&rec).map_err(|e| Error::Data(format!("line {}: {e}", lineno + 1)))?;
        let gt = match &rec.gt_explanation {
            Some(p) => Explanation::new(edge_set(p)?, g.num_nodes())
                .map_err(|e| Error::Data(format!("line {}: {e}", lineno + 1)))?,
            None => Explanation::empty(g.num_nodes()),
        };
        if let (Some(labels), Some(motifs)) = (rec.node_labels, rec.motifs) {
            let mut nodes = Vec::new();
            let mut edges = Vec::new();
            for m in motifs {
                nodes.push(m.nodes);
                edges.push(edge_set(&m.edges)?);
            }
            node_task = Some(NodeTask { node_labels: labels, motifs: nodes, motif_edges: edges });
        }
        graphs.push(LabeledGraph::new(g, rec.label.unwrap_or(0)));
        gts.push(gt);
    }
    let (name, num_classes, task) = match header {
        Some(h) => (h.name, h.num_classes, h.task),
        None => {
            let k = graphs.iter().map(|g| g.label + 1).max().unwrap_or(2).max(2);
            let task = if node_task.is_some() { Task::NodeClassification } else { Task::GraphClassification };
            (fallback_name.to_string(), k, task)
        }
    };
    let d = Dataset { name, task, num_classes, graphs, gt_explanations: gts, node_task };
    d.validate().map_err(|e| Error::Data(e.to_string()))?;
    Ok(d)
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let f = std::fs::File::open(path)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
    read_dataset(std::io::BufReader::new(f), stem)
}

pub fn write_explanations<W: Write>(expls: &[Explanation], mut w: W) -> Result<()> {
    for (i, e) in expls.iter().enumerate() {
        serde_json::to_writer(&mut w, &ExplanationRecord { graph_index: i, edges: pairs(e.edges()) })?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Explanations read from a file, aligned to `data`, plus the indices that
/// had no line and were left empty.
#[derive(Debug)]
pub struct LoadedExplanations {
    pub explanations: Vec<Explanation>,
    pub missing: Vec<usize>,
}

pub fn read_explanations<R: BufRead>(r: R, data: &Dataset) -> Result<LoadedExplanations> {
    let mut slots: Vec<Option<Explanation>> = vec![None; data.len()];
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ExplanationRecord = serde_json::from_str(&line)
            .map_err(|e| Error::Data(format!("explanations line {}: {e}", lineno + 1)))?;
        let Some(slot) = slots.get_mut(rec.graph_index) else {
            return Err(Error::Data(format!(
                "explanations line {}: graph_index {} out of range for {} graphs",
                lineno + 1,
                rec.graph_index,
                data.len()
            )));
        };
        let host = data.graphs[rec.graph_index].graph.num_nodes();
        *slot = Some(Explanation::new(edge_set(&rec.edges)?, host).map_err(|e| Error::Data(e.to_string()))?);
    }
    let mut missing = Vec::new();
    let explanations = slots
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            s.unwrap_or_else(|| {
                missing.push(i);
                Explanation::empty(data.graphs[i].graph.num_nodes())
            })
        })
        .collect();
    Ok(LoadedExplanations { explanations, missing })
}

pub fn load_explanations(path: &Path, data: &Dataset) -> Result<LoadedExplanations> {
    let f = std::fs::File::open(path)?;
    read_explanations(std::io::BufReader::new(f), data)
}
