//! Resolving `--classifier` strings.
//!
//! ```text
//! builtin:motif[:DATASET]          Bayes motif rule for the dataset's construction
//! builtin:noisy:delta=D            f_δ over the dataset's graphs as typical set
//! builtin:constant:P0,P1,...       fixed class distribution
//! builtin:appendix-b:n=N,p=P       the planted-cycle example classifier
//! bridge:cmd=SHELL COMMAND         stdio bridge server
//! bridge:tcp=HOST:PORT             TCP bridge server
//! ```

use std::collections::HashMap;

use fidelis::classifiers::{
    AppendixBClassifier, BridgeClassifier, ClassDistribution, Classifier, Constant, ContainmentIndicator, MotifBayes,
    MotifRule, NoisyClassifier, TypicalSet,
};
use fidelis::datasets::{ba_cycle_motif, ba_house_motif, Dataset, TreeMotif};
use fidelis::{Containment, Error, Graph, Result};

fn bad(text: &str, why: &str) -> Error {
    Error::InvalidArgument(format!("classifier {text:?}: {why}"))
}

fn params(text: &str, body: &str) -> Result<HashMap<String, String>> {
    body.split(',')
        .filter(|s| !s.is_empty())
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad(text, &format!("expected key=value, got {kv:?}")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn num<T: std::str::FromStr>(text: &str, map: &HashMap<String, String>, key: &str) -> Result<T> {
    map.get(key)
        .ok_or_else(|| bad(text, &format!("missing {key}=")))?
        .parse()
        .map_err(|_| bad(text, &format!("bad value for {key}")))
}

fn motif_rule(dataset: &str) -> Result<MotifRule> {
    match dataset {
        "ba2motifs" => MotifRule::new(
            vec![ba_cycle_motif(), ba_house_motif()],
            ClassDistribution::uniform(2),
            Containment::FixedIds,
        ),
        other => Err(Error::InvalidArgument(format!("no motif rule for dataset {other:?}"))),
    }
}

fn tree_indicator(motif: TreeMotif) -> Result<ContainmentIndicator> {
    // A cycle of the motif's girth: any tree-attached copy of it is found by
    // isomorphism, and trees themselves have none.
    let k = match motif {
        TreeMotif::Cycle(k) => k,
        TreeMotif::Grid(..) => 4,
    };
    let motif = Graph::from_pairs(k as usize, (0..k).map(|i| (i, (i + 1) % k)))?;
    Ok(ContainmentIndicator { motif, mode: Containment::Isomorphism })
}

pub fn resolve(text: &str, data: Option<&Dataset>) -> Result<Box<dyn Classifier>> {
    if let Some(rest) = text.strip_prefix("bridge:") {
        if let Some(cmd) = rest.strip_prefix("cmd=") {
            return Ok(Box::new(BridgeClassifier::spawn(cmd)?));
        }
        if let Some(addr) = rest.strip_prefix("tcp=") {
            return Ok(Box::new(BridgeClassifier::connect(addr)?));
        }
        return Err(bad(text, "expected bridge:cmd=... or bridge:tcp=..."));
    }
    let Some(rest) = text.strip_prefix("builtin:") else {
        return Err(bad(text, "expected a builtin: or bridge: prefix"));
    };
    let (kind, body) = rest.split_once(':').unwrap_or((rest, ""));
    let dataset_name = || -> Result<String> {
        if !body.is_empty() && !body.contains('=') {
            return Ok(body.to_string());
        }
        data.map(|d| d.name.clone()).ok_or_else(|| bad(text, "name a dataset or pass --data"))
    };
    match kind {
        "motif" => {
            let name = dataset_name()?;
            match name.as_str() {
                "tree-cycles" => Ok(Box::new(tree_indicator(TreeMotif::Cycle(6))?)),
                "tree-grid" => Ok(Box::new(tree_indicator(TreeMotif::Grid(3, 3))?)),
                n if n.starts_with("tree-cycles-ego") => Ok(Box::new(tree_indicator(TreeMotif::Cycle(6))?)),
                n if n.starts_with("tree-grid-ego") => Ok(Box::new(tree_indicator(TreeMotif::Grid(3, 3))?)),
                other => Ok(Box::new(MotifBayes(motif_rule(other)?))),
            }
        }
        "noisy" => {
            let map = params(text, body)?;
            let delta: f64 = num(text, &map, "delta")?;
            let data = data.ok_or_else(|| bad(text, "needs --data for its typical set"))?;
            let rule = motif_rule(map.get("dataset").map(String::as_str).unwrap_or(&data.name))?;
            let ts = TypicalSet::new(data.graphs.iter().map(|g| g.graph.clone()).collect())?;
            Ok(Box::new(NoisyClassifier::new(rule, ts, delta)?))
        }
        "constant" => {
            let probs = body
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| bad(text, "expected comma-separated probabilities")))
                .collect::<Result<Vec<_>>>()?;
            Ok(Box::new(Constant(ClassDistribution::new(probs)?)))
        }
        "appendix-b" => {
            let map = params(text, body)?;
            Ok(Box::new(AppendixBClassifier::new(num(text, &map, "n")?, num(text, &map, "p")?)?))
        }
        _ => Err(bad(text, "unknown builtin")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fidelis::datasets::gen_ba2motifs;

    #[test]
    fn resolves_builtins() {
        let d = gen_ba2motifs(4, 1).unwrap();
        assert_eq!(resolve("builtin:motif", Some(&d)).unwrap().num_classes(), 2);
        assert_eq!(resolve("builtin:motif:tree-grid", None).unwrap().num_classes(), 2);
        assert_eq!(resolve("builtin:constant:0.2,0.3,0.5", None).unwrap().num_classes(), 3);
        assert!(!resolve("builtin:noisy:delta=0.5", Some(&d)).unwrap().is_deterministic());
        assert!(resolve("builtin:appendix-b:n=30,p=0.3", None).is_ok());
    }

    #[test]
    fn rejects_bad_specs() {
        for s in ["gcn", "builtin:what", "builtin:constant:0.2,x", "builtin:noisy:delta=1", "bridge:udp=1", "builtin:motif"] {
            assert!(matches!(resolve(s, None), Err(Error::InvalidArgument(_))), "{s}");
        }
        assert!(matches!(resolve("builtin:appendix-b:n=30", None), Err(Error::InvalidArgument(_))));
    }
}
