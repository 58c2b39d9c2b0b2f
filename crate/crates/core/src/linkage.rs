//! Co-citation, bibliographic coupling, clustering and reference levels.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::io;
use std::str::FromStr;

use serde::Serialize;

use crate::network::{CitationNetwork, NetworkError, NodeId};

pub const DEFAULT_PAIR_STRENGTH: u32 = 1;
pub const DEFAULT_CLUSTER_STRENGTH: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkPair {
    pub a: NodeId,
    pub b: NodeId,
    pub strength: u32,
    /// Co-citing nodes (co-citation) or shared references (coupling).
    pub witnesses: Vec<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterMode {
    /// Co-citation: documents linked by being cited together.
    Cited,
    /// Bibliographic coupling: documents linked by citing the same works.
    Citing,
}

impl FromStr for ClusterMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cited" => Ok(Self::Cited),
            "citing" => Ok(Self::Citing),
            _ => Err(format!("unknown cluster mode {s:?} (cited, citing)")),
        }
    }
}

/// Emits every pair inside each witness's neighbor list.
fn pairs_by_witness<'a>(
    net: &'a CitationNetwork,
    neighbors: impl Fn(usize) -> &'a [NodeId],
    min_strength: u32,
) -> Vec<LinkPair> {
    let mut acc: BTreeMap<(NodeId, NodeId), Vec<NodeId>> = BTreeMap::new();
    for (i, node) in net.nodes.iter().enumerate() {
        let list = neighbors(i);
        for (x, &a) in list.iter().enumerate() {
            for &b in &list[x + 1..] {
                acc.entry((a, b)).or_default().push(node.id);
            }
        }
    }
    let mut pairs: Vec<LinkPair> = acc
        .into_iter()
        .filter(|(_, w)| w.len() as u32 >= min_strength.max(1))
        .map(|((a, b), witnesses)| LinkPair {
            a,
            b,
            strength: witnesses.len() as u32,
            witnesses,
        })
        .collect();
    pairs.sort_by(|p, q| {
        q.strength
            .cmp(&p.strength)
            .then(p.a.cmp(&q.a))
            .then(p.b.cmp(&q.b))
    });
    pairs
}

/// Pairs of nodes cited together; witnesses are the nodes citing both.
pub fn cocitations(net: &CitationNetwork, min_strength: u32) -> Vec<LinkPair> {
    pairs_by_witness(net, |i| &net.nodes[i].cited_nodes, min_strength)
}

/// Pairs of nodes sharing references; witnesses are the shared cited nodes.
pub fn bibliographic_couplings(net: &CitationNetwork, min_strength: u32) -> Vec<LinkPair> {
    pairs_by_witness(net, |i| &net.nodes[i].citing_nodes, min_strength)
}

pub fn link_pairs(net: &CitationNetwork, mode: ClusterMode, min_strength: u32) -> Vec<LinkPair> {
    match mode {
        ClusterMode::Cited => cocitations(net, min_strength),
        ClusterMode::Citing => bibliographic_couplings(net, min_strength),
    }
}

/// Connected components of the pair graph; singletons omitted, largest first.
pub fn cluster(net: &CitationNetwork, mode: ClusterMode, min_strength: u32) -> Vec<Vec<NodeId>> {
    components(&link_pairs(net, mode, min_strength))
}

/// Breadth-first components over an undirected pair list.
pub fn components(pairs: &[LinkPair]) -> Vec<Vec<NodeId>> {
    let mut adj: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for p in pairs {
        adj.entry(p.a).or_default().push(p.b);
        adj.entry(p.b).or_default().push(p.a);
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &start in adj.keys() {
        if !seen.insert(start) {
            continue;
        }
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(n) = queue.pop_front() {
            for &m in &adj[&n] {
                if seen.insert(m) {
                    comp.push(m);
                    queue.push_back(m);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out.sort_by(|x, y| y.len().cmp(&x.len()).then(x[0].cmp(&y[0])));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelSet {
    pub origin: NodeId,
    /// `levels[k]` is the k-th reference level.
    pub levels: Vec<BTreeSet<NodeId>>,
    /// When set, each level also contains every lower level.
    pub cumulative: bool,
}

impl LevelSet {
    /// Level k as the union of levels 0..=k.
    pub fn to_cumulative(&self) -> LevelSet {
        if self.cumulative {
            return self.clone();
        }
        let mut acc = BTreeSet::new();
        let levels = self
            .levels
            .iter()
            .map(|l| {
                acc.extend(l.iter().copied());
                acc.clone()
            })
            .collect();
        LevelSet {
            origin: self.origin,
            levels,
            cumulative: true,
        }
    }

    /// Level of `node`, if it is reachable.
    pub fn level_of(&self, node: NodeId) -> Option<usize> {
        self.levels.iter().position(|l| l.contains(&node))
    }
}

/// Reference levels of `origin`: level 0 is its local references, level k+1
/// the references of level k not seen before. Stops after `max_depth` or at
/// the first empty level. Each node sits at its minimal level.
pub fn reference_levels(
    net: &CitationNetwork,
    origin: NodeId,
    max_depth: usize,
) -> Result<LevelSet, NetworkError> {
    let origin_node = net.try_node(origin)?;
    let mut seen: BTreeSet<NodeId> = BTreeSet::from([origin]);
    let mut current: BTreeSet<NodeId> = origin_node.cited_nodes.iter().copied().collect();
    current.remove(&origin);
    let mut levels = Vec::new();
    while !current.is_empty() && levels.len() <= max_depth {
        seen.extend(current.iter().copied());
        let next: BTreeSet<NodeId> = current
            .iter()
            .flat_map(|n| net.nodes[n.index()].cited_nodes.iter().copied())
            .filter(|n| !seen.contains(n))
            .collect();
        levels.push(current);
        current = next;
    }
    Ok(LevelSet {
        origin,
        levels,
        cumulative: false,
    })
}

/// Every simple citation chain leaving `origin`, up to `max_len` hops, in
/// depth-first order. Each chain starts with `origin`.
pub fn citation_paths(
    net: &CitationNetwork,
    origin: NodeId,
    max_len: usize,
) -> Result<Vec<Vec<NodeId>>, NetworkError> {
    net.try_node(origin)?;
    let mut out = Vec::new();
    let mut path = vec![origin];
    walk(net, &mut path, max_len, &mut out);
    Ok(out)
}

fn walk(net: &CitationNetwork, path: &mut Vec<NodeId>, max_len: usize, out: &mut Vec<Vec<NodeId>>) {
    if path.len() > max_len {
        return;
    }
    let last = *path.last().expect("path starts with origin");
    for &next in &net.nodes[last.index()].cited_nodes {
        if path.contains(&next) {
            continue;
        }
        path.push(next);
        out.push(path.clone());
        walk(net, path, max_len, out);
        path.pop();
    }
}

/// Indented chain listing, one chain per line.
pub fn render_paths(paths: &[Vec<NodeId>]) -> String {
    let mut s = String::new();
    for p in paths {
        let indent = "  ".repeat(p.len().saturating_sub(2));
        let chain = p
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(" -> ");
        let _ = writeln!(s, "{indent}{chain}");
    }
    s
}

fn join_ids(ids: &[NodeId]) -> String {
    ids.iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn write_pairs_csv<W: io::Write>(pairs: &[LinkPair], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["a", "b", "strength", "witnesses"])?;
    for p in pairs {
        w.write_record([
            p.a.to_string(),
            p.b.to_string(),
            p.strength.to_string(),
            join_ids(&p.witnesses),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_clusters_csv<W: io::Write>(clusters: &[Vec<NodeId>], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["cluster", "size", "nodes"])?;
    for (i, c) in clusters.iter().enumerate() {
        w.write_record([(i + 1).to_string(), c.len().to_string(), join_ids(c)])?;
    }
    w.flush()?;
    Ok(())
}
