//! Node numbering, strict reference resolution and the citation matrix.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{
    normalize_author, normalize_key, normalize_number, parse_cited_ref, record_key, BibRecord,
    CitedRef, RefKey,
};

/// 1-based node number in (year, journal, volume, page) order.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("page {page} out of range (1..={pages})")]
    PageOutOfRange { page: usize, pages: usize },
    #[error("page size must be at least 1")]
    ZeroPageSize,
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Node {
    pub id: NodeId,
    pub record: BibRecord,
    pub lcs: u32,
    pub gcs: u32,
    pub cited_nodes: Vec<NodeId>,
    pub citing_nodes: Vec<NodeId>,
}

impl Node {
    pub fn first_author(&self) -> &str {
        self.record.first_author().unwrap_or("[ANONYMOUS]")
    }

    /// `4306 1973 FRANCIS L`
    pub fn label(&self) -> String {
        format!(
            "{} {} {}",
            self.id,
            self.record.pub_year,
            self.first_author()
        )
    }

    /// Key other records would use to cite this node.
    pub fn key(&self) -> RefKey {
        record_key(&self.record)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnresolvedRef {
    pub citing: NodeId,
    pub cited_ref: CitedRef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    /// The reference resolved to the record that carries it.
    SelfCitation,
    /// Another reference of the same record already produced this edge.
    DuplicateEdge,
}

/// A reference that matched a node but did not become a new edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DroppedRef {
    pub citing: NodeId,
    pub target: NodeId,
    pub reason: DropReason,
    pub cited_ref: CitedRef,
}

/// Key used for strict resolution: first author, year, volume, begin page.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatchKey {
    pub author_key: String,
    pub year: i32,
    pub volume: String,
    pub page: String,
}

impl MatchKey {
    pub fn of_ref(r: &CitedRef) -> Option<Self> {
        if r.author_key.is_empty() {
            return None;
        }
        Some(MatchKey {
            author_key: r.author_key.clone(),
            year: r.year?,
            volume: r.volume.clone()?,
            page: r.page.clone()?,
        })
    }

    pub fn of_record(r: &BibRecord) -> Option<Self> {
        let author_key = normalize_key(r.first_author()?);
        if author_key.is_empty() {
            return None;
        }
        Some(MatchKey {
            author_key,
            year: r.pub_year,
            volume: r.volume.as_deref().and_then(normalize_number)?,
            page: r.begin_page.as_deref().and_then(normalize_number)?,
        })
    }
}

/// Node lookup by strict key.
#[derive(Debug, Default)]
pub struct MatchIndex {
    map: HashMap<MatchKey, Vec<NodeId>>,
}

impl MatchIndex {
    pub fn build(nodes: &[Node]) -> Self {
        let mut map: HashMap<MatchKey, Vec<NodeId>> = HashMap::new();
        for node in nodes {
            if let Some(key) = MatchKey::of_record(&node.record) {
                map.entry(key).or_default().push(node.id);
            }
        }
        MatchIndex { map }
    }

    /// All nodes sharing the reference's strict key, ascending.
    pub fn candidates(&self, r: &CitedRef) -> &[NodeId] {
        MatchKey::of_ref(r)
            .and_then(|k| self.map.get(&k))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

/// Outcome of resolving one reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    pub node: NodeId,
    /// Set when more than one node carried the key.
    pub ambiguous_with: Vec<NodeId>,
}

/// Strict resolution: author, year, volume and page must all be present and equal.
/// Ties resolve to the lowest node id.
pub fn resolve_reference(r: &CitedRef, index: &MatchIndex) -> Option<Resolution> {
    let candidates = index.candidates(r);
    let (&first, rest) = candidates.split_first()?;
    Some(Resolution {
        node: first,
        ambiguous_with: rest.to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Ordinal {
    Missing,
    Numeric(u64, String),
    Text(String),
}

/// Volumes and pages sort by their leading integer, then by the rest.
fn ordinal(s: Option<&str>) -> Ordinal {
    let Some(s) = s.and_then(normalize_number) else {
        return Ordinal::Missing;
    };
    let digits = s.bytes().take_while(u8::is_ascii_digit).count();
    match s[..digits].parse::<u64>() {
        Ok(n) => Ordinal::Numeric(n, s[digits..].to_string()),
        Err(_) => Ordinal::Text(s),
    }
}

/// Leading part of the node order, computed once per record.
#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct SortKey {
    year: i32,
    source: String,
    volume: Ordinal,
    page: Ordinal,
    first_author: String,
}

impl SortKey {
    fn of(r: &BibRecord) -> Self {
        SortKey {
            year: r.pub_year,
            source: r.source_title.to_uppercase(),
            volume: ordinal(r.volume.as_deref()),
            page: ordinal(r.begin_page.as_deref()),
            first_author: r.first_author().map(normalize_key).unwrap_or_default(),
        }
    }
}

fn compare_records(a: &(SortKey, BibRecord), b: &(SortKey, BibRecord)) -> Ordering {
    let ((ka, a), (kb, b)) = (a, b);
    ka.cmp(kb)
        .then_with(|| a.title.cmp(&b.title))
        .then_with(|| a.record_id.cmp(&b.record_id))
        .then_with(|| a.authors.cmp(&b.authors))
        .then_with(|| a.cited_refs.cmp(&b.cited_refs))
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CitationNetwork {
    pub nodes: Vec<Node>,
    /// `(citing, cited)` pairs.
    pub edges: BTreeSet<(NodeId, NodeId)>,
    pub unresolved: Vec<UnresolvedRef>,
    pub dropped: Vec<DroppedRef>,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

/// Numbers the records and resolves every cited reference.
pub fn build_network(records: Vec<BibRecord>) -> CitationNetwork {
    let mut keyed: Vec<(SortKey, BibRecord)> =
        records.into_iter().map(|r| (SortKey::of(&r), r)).collect();
    keyed.sort_by(compare_records);
    let records = keyed.into_iter().map(|(_, r)| r);

    let mut nodes: Vec<Node> = records
        .into_iter()
        .enumerate()
        .map(|(i, record)| Node {
            id: NodeId(i as u32 + 1),
            gcs: record.global_cites,
            record,
            lcs: 0,
            cited_nodes: Vec::new(),
            citing_nodes: Vec::new(),
        })
        .collect();

    let index = MatchIndex::build(&nodes);
    let mut net = CitationNetwork::default();

    for node in &nodes {
        for raw in &node.record.cited_refs {
            let cited_ref = parse_cited_ref(raw);
            let Some(resolution) = resolve_reference(&cited_ref, &index) else {
                net.unresolved.push(UnresolvedRef {
                    citing: node.id,
                    cited_ref,
                });
                continue;
            };
            if !resolution.ambiguous_with.is_empty() {
                net.warnings.push(format!(
                    "node {}: reference {:?} matches nodes {} and {}; using {}",
                    node.id,
                    cited_ref.raw,
                    resolution.node,
                    join_ids(&resolution.ambiguous_with),
                    resolution.node
                ));
            }
            let target = resolution.node;
            let reason = if target == node.id {
                Some(DropReason::SelfCitation)
            } else if !net.edges.insert((node.id, target)) {
                Some(DropReason::DuplicateEdge)
            } else {
                None
            };
            if let Some(reason) = reason {
                net.dropped.push(DroppedRef {
                    citing: node.id,
                    target,
                    reason,
                    cited_ref,
                });
            }
        }
    }

    for &(citing, cited) in &net.edges {
        nodes[citing.index()].cited_nodes.push(cited);
        nodes[cited.index()].citing_nodes.push(citing);
    }
    for node in &mut nodes {
        // Edges iterate in (citing, cited) order, so cited lists are sorted already.
        node.citing_nodes.sort_unstable();
        node.lcs = node.citing_nodes.len() as u32;
    }
    net.nodes = nodes;
    net
}

fn join_ids(ids: &[NodeId]) -> String {
    ids.iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// One line of the citation matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatrixRow {
    pub cited_nodes: Vec<NodeId>,
    pub cited_count: usize,
    pub node: NodeId,
    pub year: i32,
    pub first_author: String,
    pub gcs: u32,
    pub lcs: u32,
    pub citing_nodes: Vec<NodeId>,
}

impl MatrixRow {
    /// Tab-separated, in matrix column order.
    pub fn to_text(&self) -> String {
        format!(
            "{}\t{}\t{} {} {}\t{}\t{}\t{}",
            join_ids(&self.cited_nodes),
            self.cited_count,
            self.node,
            self.year,
            self.first_author,
            self.gcs,
            self.lcs,
            join_ids(&self.citing_nodes)
        )
    }
}

pub fn page_count(items: usize, page_size: usize) -> usize {
    items.div_ceil(page_size.max(1))
}

/// Page (1-based) that lists `node`.
pub fn page_of(node: NodeId, page_size: usize) -> usize {
    node.index() / page_size.max(1) + 1
}

impl CitationNetwork {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        if id.0 == 0 {
            return None;
        }
        self.nodes.get(id.index())
    }

    pub fn try_node(&self, id: NodeId) -> Result<&Node, NetworkError> {
        self.node(id).ok_or(NetworkError::UnknownNode(id))
    }

    /// Total number of parsed cited references across all records.
    pub fn cited_ref_count(&self) -> usize {
        self.nodes.iter().map(|n| n.record.cited_refs.len()).sum()
    }

    pub fn matrix_rows(
        &self,
        page: usize,
        page_size: usize,
    ) -> Result<Vec<MatrixRow>, NetworkError> {
        if page_size == 0 {
            return Err(NetworkError::ZeroPageSize);
        }
        let pages = page_count(self.nodes.len(), page_size);
        if page == 0 || page > pages {
            return Err(NetworkError::PageOutOfRange { page, pages });
        }
        let start = (page - 1) * page_size;
        let end = (start + page_size).min(self.nodes.len());
        Ok(self.nodes[start..end]
            .iter()
            .map(|n| MatrixRow {
                cited_nodes: n.cited_nodes.clone(),
                cited_count: n.cited_nodes.len(),
                node: n.id,
                year: n.record.pub_year,
                first_author: n.first_author().to_string(),
                gcs: n.gcs,
                lcs: n.lcs,
                citing_nodes: n.citing_nodes.clone(),
            })
            .collect())
    }

    /// Distinct source titles of the corpus, upper-cased.
    pub fn journals(&self) -> BTreeSet<String> {
        self.nodes
            .iter()
            .map(|n| n.record.source_title.to_uppercase())
            .filter(|s| !s.is_empty())
            .collect()
    }

    /// Stable JSON dump for downstream tools.
    pub fn to_json(&self) -> String {
        let dump = NetworkDump {
            node_count: self.nodes.len(),
            edge_count: self.edges.len(),
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeDump {
                    id: n.id,
                    year: n.record.pub_year,
                    authors: &n.record.authors,
                    title: &n.record.title,
                    source: &n.record.source_title,
                    volume: n.record.volume.as_deref(),
                    begin_page: n.record.begin_page.as_deref(),
                    record_id: &n.record.record_id,
                    key: n.key(),
                    gcs: n.gcs,
                    lcs: n.lcs,
                    cited_nodes: &n.cited_nodes,
                    citing_nodes: &n.citing_nodes,
                })
                .collect(),
            edges: self.edges.iter().copied().collect(),
            unresolved: self
                .unresolved
                .iter()
                .map(|u| UnresolvedDump {
                    citing: u.citing,
                    raw: &u.cited_ref.raw,
                    key: crate::ingest::ref_key(&u.cited_ref),
                })
                .collect(),
            dropped: &self.dropped,
        };
        let mut s = serde_json::to_string_pretty(&dump).expect("network dump serializes");
        s.push('\n');
        s
    }
}

#[derive(Serialize)]
struct NetworkDump<'a> {
    node_count: usize,
    edge_count: usize,
    nodes: Vec<NodeDump<'a>>,
    edges: Vec<(NodeId, NodeId)>,
    unresolved: Vec<UnresolvedDump<'a>>,
    dropped: &'a [DroppedRef],
}

#[derive(Serialize)]
struct NodeDump<'a> {
    id: NodeId,
    year: i32,
    authors: &'a [String],
    title: &'a str,
    source: &'a str,
    volume: Option<&'a str>,
    begin_page: Option<&'a str>,
    record_id: &'a str,
    key: RefKey,
    gcs: u32,
    lcs: u32,
    cited_nodes: &'a [NodeId],
    citing_nodes: &'a [NodeId],
}

#[derive(Serialize)]
struct UnresolvedDump<'a> {
    citing: NodeId,
    raw: &'a str,
    key: RefKey,
}

/// Printed author normalized for display comparison (`SURNAME INITIALS`).
pub fn display_author(node: &Node) -> String {
    normalize_author(node.first_author())
}
