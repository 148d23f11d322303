//! Subgraph containment tests.

use crate::error::{invalid, Result};
use crate::graph::Graph;

/// How motif vertex ids relate to host vertex ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Containment {
    /// Motif ids are host ids; containment is edge-set inclusion.
    FixedIds,
    /// Some injective vertex map carries every motif edge onto a host edge.
    Isomorphism,
}

pub fn contains_subgraph(host: &Graph, motif: &Graph, mode: Containment) -> Result<bool> {
    match mode {
        Containment::FixedIds => {
            if motif.num_nodes() > host.num_nodes() {
                return invalid(format!(
                    "motif has {} nodes, host only {}",
                    motif.num_nodes(),
                    host.num_nodes()
                ));
            }
            Ok(motif.edges().is_subset(host.edges()))
        }
        Containment::Isomorphism => Ok(embeds(host, motif)),
    }
}

/// Backtracking search for a monomorphism of the motif's non-isolated
/// vertices into the host. Isolated motif vertices can always be placed
/// as long as the host has enough vertices overall.
fn embeds(host: &Graph, motif: &Graph) -> bool {
    if motif.num_nodes() > host.num_nodes() || motif.num_edges() > host.num_edges() {
        return false;
    }
    if motif.num_edges() == 0 {
        return true;
    }
    let m_adj = motif.adjacency();
    let h_adj = host.adjacency();
    let h_deg: Vec<usize> = h_adj.iter().map(Vec::len).collect();

    // Order motif vertices so each one (after the first of its component)
    // has as many already-placed neighbours as possible.
    let active: Vec<usize> = (0..motif.num_nodes()).filter(|&v| !m_adj[v].is_empty()).collect();
    let mut order = Vec::with_capacity(active.len());
    let mut placed = vec![false; motif.num_nodes()];
    while order.len() < active.len() {
        let next = active
            .iter()
            .copied()
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let back = m_adj[v].iter().filter(|&&w| placed[w as usize]).count();
                (back, m_adj[v].len(), std::cmp::Reverse(v))
            })
            .expect("unplaced vertex remains");
        placed[next] = true;
        order.push(next);
    }

    let mut map = vec![u32::MAX; motif.num_nodes()];
    let mut used = vec![false; host.num_nodes()];
    extend(0, &order, &m_adj, &h_adj, &h_deg, &mut map, &mut used)
}

fn extend(
    depth: usize,
    order: &[usize],
    m_adj: &[Vec<u32>],
    h_adj: &[Vec<u32>],
    h_deg: &[usize],
    map: &mut [u32],
    used: &mut [bool],
) -> bool {
    let Some(&v) = order.get(depth) else {
        return true;
    };
    let need = m_adj[v].len();
    // Candidates: neighbours of an already-mapped neighbour's image, or all
    // host vertices when v starts a new component.
    let anchor = m_adj[v].iter().find(|&&w| map[w as usize] != u32::MAX);
    let candidates: Box<dyn Iterator<Item = u32> + '_> = match anchor {
        Some(&w) => Box::new(h_adj[map[w as usize] as usize].iter().copied()),
        None => Box::new(0..h_adj.len() as u32),
    };
    for c in candidates {
        let ci = c as usize;
        if used[ci] || h_deg[ci] < need {
            continue;
        }
        let consistent = m_adj[v].iter().all(|&w| {
            let img = map[w as usize];
            img == u32::MAX || h_adj[ci].binary_search(&img).is_ok()
        });
        if !consistent {
            continue;
        }
        map[v] = c;
        used[ci] = true;
        if extend(depth + 1, order, m_adj, h_adj, h_deg, map, used) {
            return true;
        }
        map[v] = u32::MAX;
        used[ci] = false;
    }
    false
}
