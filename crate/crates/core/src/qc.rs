//! Collection audit: references outside the network and potentially missed
//! citations.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io;

use percent_encoding::{utf8_percent_encode, NON_ALPHANUMERIC};
use serde::Serialize;

use crate::ingest::{normalize_author, record_key, ref_key, BibRecord, CitedRef, RefFlag, RefKey};
use crate::network::{CitationNetwork, MatchKey, Node, NodeId};

/// Candidates reported per unresolved reference.
pub const MAX_CANDIDATES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OuterRef {
    pub key: RefKey,
    pub display: String,
    pub local_cites: u32,
    pub citing_nodes: Vec<NodeId>,
    /// The cited source looks like one of the corpus journals.
    pub in_corpus_source: bool,
    /// Raw strings of every occurrence.
    pub occurrences: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OuterReport {
    pub rows: Vec<OuterRef>,
    /// Distinct unresolved keys before truncation.
    pub total_groups: usize,
    /// Unresolved reference strings.
    pub total_occurrences: usize,
    /// Distinct (citing node, key) pairs; equals the untruncated sum of `local_cites`.
    pub total_incidences: usize,
}

fn tokens(s: &str) -> Vec<String> {
    s.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_ascii_uppercase)
        .collect()
}

/// True when `abbrev` reads as an abbreviation of `title`: same token count
/// and each token a prefix of its counterpart (`BIOL BULL` / `BIOLOGICAL BULLETIN`).
pub fn source_matches(abbrev: &str, title: &str) -> bool {
    let (a, t) = (tokens(abbrev), tokens(title));
    !a.is_empty() && a.len() == t.len() && a.iter().zip(&t).all(|(x, y)| y.starts_with(x.as_str()))
}

/// Journal names of the corpus, including the J9/JI abbreviations when present.
fn corpus_sources(net: &CitationNetwork) -> BTreeSet<String> {
    let mut out = net.journals();
    for node in &net.nodes {
        for tag in ["J9", "JI"] {
            if let Some(values) = node.record.extra_field(tag) {
                out.extend(values.iter().map(|v| v.to_uppercase()));
            }
        }
    }
    out
}

pub fn outer_references(net: &CitationNetwork, top_n: usize) -> OuterReport {
    struct Group<'a> {
        citing: BTreeSet<NodeId>,
        refs: Vec<&'a CitedRef>,
    }
    let mut groups: BTreeMap<RefKey, Group> = BTreeMap::new();
    for u in &net.unresolved {
        let g = groups
            .entry(ref_key(&u.cited_ref))
            .or_insert_with(|| Group {
                citing: BTreeSet::new(),
                refs: Vec::new(),
            });
        g.citing.insert(u.citing);
        g.refs.push(&u.cited_ref);
    }

    let journals = corpus_sources(net);
    let total_groups = groups.len();
    let total_incidences = groups.values().map(|g| g.citing.len()).sum();

    let mut rows: Vec<OuterRef> = groups
        .into_iter()
        .map(|(key, g)| {
            // Most frequent source spelling, ties to the smallest.
            let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
            for r in &g.refs {
                *counts.entry(r.source_abbrev.as_str()).or_default() += 1;
            }
            let best = counts
                .iter()
                .max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(x.0)))
                .map(|(s, _)| *s)
                .unwrap_or_default();
            let representative = g
                .refs
                .iter()
                .find(|r| r.source_abbrev == best)
                .expect("group has a reference with its chosen source");
            let in_corpus_source = g.refs.iter().any(|r| {
                journals
                    .iter()
                    .any(|j| *j == r.source_abbrev || source_matches(&r.source_abbrev, j))
            });
            OuterRef {
                display: representative.display(),
                local_cites: g.citing.len() as u32,
                citing_nodes: g.citing.into_iter().collect(),
                in_corpus_source,
                occurrences: g.refs.iter().map(|r| r.raw.clone()).collect(),
                key,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.local_cites
            .cmp(&a.local_cites)
            .then_with(|| a.key.cmp(&b.key))
    });
    rows.truncate(top_n.max(1));

    OuterReport {
        rows,
        total_groups,
        total_occurrences: net.unresolved.len(),
        total_incidences,
    }
}

/// Substitutes the URL-encoded key into a `{key}` template.
pub fn lookup_url(template: &str, key: &RefKey) -> String {
    template.replace(
        "{key}",
        &utf8_percent_encode(key.as_str(), NON_ALPHANUMERIC).to_string(),
    )
}

pub fn render_outer_text(report: &OuterReport) -> String {
    let mut s = String::from("Cited references outside of this network.\n");
    let _ = writeln!(
        s,
        "Total: {} references, {} occurrences (top {} shown).",
        report.total_groups,
        report.total_occurrences,
        report.rows.len()
    );
    s.push_str("Sorted by LCS.\n\n#\tLCS\tReference\n");
    for (i, row) in report.rows.iter().enumerate() {
        let mark = if row.in_corpus_source { "\t*" } else { "" };
        let _ = writeln!(s, "{}\t{}\t{}{}", i + 1, row.local_cites, row.display, mark);
    }
    s
}

pub fn write_outer_csv<W: io::Write>(
    report: &OuterReport,
    template: Option<&str>,
    out: W,
) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record([
        "rank",
        "lcs",
        "reference",
        "key",
        "in_corpus_source",
        "lookup_url",
    ])?;
    for (i, row) in report.rows.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            row.local_cites.to_string(),
            row.display.clone(),
            row.key.to_string(),
            row.in_corpus_source.to_string(),
            template
                .map(|t| lookup_url(t, &row.key))
                .unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LinkReason {
    PageOffByOne,
    PageAbsent,
    VolumeOnly,
    HyphenationVariant,
    UnpublishedForm,
    SourceVariant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MissingLink {
    pub cited_ref: CitedRef,
    pub citing_node: NodeId,
    pub candidate_node: NodeId,
    pub reasons: BTreeSet<LinkReason>,
    pub candidate_key: RefKey,
}

impl MissingLink {
    /// `RAW may refer to [ID] KEY`
    pub fn render(&self) -> String {
        format!(
            "{} may refer to [{}] {}",
            self.cited_ref.raw, self.candidate_node, self.candidate_key
        )
    }
}

fn page_number(p: &Option<String>) -> Option<i64> {
    p.as_deref().and_then(|s| s.parse().ok())
}

/// Tolerant comparison of an unresolved reference with a node that shares
/// its author key and year.
pub fn link_reasons(r: &CitedRef, node: &BibRecord) -> BTreeSet<LinkReason> {
    use LinkReason::*;
    let volume = node
        .volume
        .as_deref()
        .and_then(crate::ingest::normalize_number);
    let page = node
        .begin_page
        .as_deref()
        .and_then(crate::ingest::normalize_number);

    let both =
        |x: &Option<String>, y: &Option<String>| matches!((x, y), (Some(a), Some(b)) if a == b);
    let volume_eq = both(&r.volume, &volume);
    let page_eq = both(&r.page, &page);
    let compatible = |x: &Option<String>, y: &Option<String>| x.is_none() || y.is_none() || x == y;

    let mut reasons = BTreeSet::new();
    if volume_eq {
        if let (Some(a), Some(b)) = (page_number(&r.page), page_number(&page)) {
            if (a - b).abs() == 1 {
                reasons.insert(PageOffByOne);
            }
        }
        if r.has(RefFlag::NoPage) {
            reasons.insert(PageAbsent);
        }
        if r.has(RefFlag::Unpublished) || r.has(RefFlag::InPress) {
            reasons.insert(UnpublishedForm);
        }
    }
    if page_eq && (r.volume.is_none() != volume.is_none()) {
        reasons.insert(VolumeOnly);
    }
    let printed = node
        .first_author()
        .map(normalize_author)
        .unwrap_or_default();
    if printed != r.author && compatible(&r.volume, &volume) && compatible(&r.page, &page) {
        reasons.insert(HyphenationVariant);
    }
    if r.volume == volume
        && r.page == page
        && !r.source_abbrev.is_empty()
        && r.source_abbrev != node.source_title.to_uppercase()
    {
        reasons.insert(SourceVariant);
    }
    reasons
}

/// Unresolved references that tolerantly match a node with the same first
/// author and year, ordered by citing node.
pub fn missing_links(net: &CitationNetwork) -> Vec<MissingLink> {
    let mut by_author_year: HashMap<(&str, i32), Vec<&Node>> = HashMap::new();
    let keys: Vec<String> = net
        .nodes
        .iter()
        .map(|n| {
            n.record
                .first_author()
                .map(crate::ingest::normalize_key)
                .unwrap_or_default()
        })
        .collect();
    for (node, key) in net.nodes.iter().zip(&keys) {
        if !key.is_empty() {
            by_author_year
                .entry((key.as_str(), node.record.pub_year))
                .or_default()
                .push(node);
        }
    }

    let mut out = Vec::new();
    for u in &net.unresolved {
        let r = &u.cited_ref;
        let Some(year) = r.year else { continue };
        let Some(nodes) = by_author_year.get(&(r.author_key.as_str(), year)) else {
            continue;
        };
        let strict = MatchKey::of_ref(r);
        let mut found = 0;
        for node in nodes {
            if found == MAX_CANDIDATES {
                break;
            }
            if node.id == u.citing
                || (strict.is_some() && strict == MatchKey::of_record(&node.record))
            {
                continue;
            }
            let reasons = link_reasons(r, &node.record);
            if reasons.is_empty() {
                continue;
            }
            found += 1;
            out.push(MissingLink {
                cited_ref: r.clone(),
                citing_node: u.citing,
                candidate_node: node.id,
                reasons,
                candidate_key: record_key(&node.record),
            });
        }
    }
    out.sort_by_key(|m| m.citing_node);
    out
}

/// Number of citing nodes with at least one potential missed citation.
pub fn nodes_with_missing_links(links: &[MissingLink]) -> usize {
    links
        .iter()
        .map(|m| m.citing_node)
        .collect::<BTreeSet<_>>()
        .len()
}

/// `BIOLOGICAL BULLETIN 88(3):254-268`
pub fn source_line(r: &BibRecord) -> String {
    let mut s = r.source_title.clone();
    if let Some(v) = &r.volume {
        let _ = write!(s, " {v}");
    }
    if let Some(i) = &r.issue {
        let _ = write!(s, "({i})");
    }
    if let Some(bp) = &r.begin_page {
        let _ = write!(s, ":{bp}");
        if let Some(ep) = &r.end_page {
            let _ = write!(s, "-{ep}");
        }
    }
    s
}

/// Plain-text missing-links report grouped by citing node.
pub fn render_missing_text(net: &CitationNetwork, links: &[MissingLink]) -> String {
    let mut s = String::from("Potentially missed citations...\n\n");
    let _ = writeln!(
        s,
        "{} nodes have citations that may potentially refer to other nodes.",
        nodes_with_missing_links(links)
    );
    for (i, (node, group)) in group_by_citing(links).into_iter().enumerate() {
        let n = &net.nodes[node.index()];
        let _ = writeln!(
            s,
            "\n{} | {} {} {}",
            i + 1,
            n.id,
            n.record.pub_year,
            source_line(&n.record)
        );
        let _ = writeln!(s, "{}", n.record.authors.join("; "));
        let _ = writeln!(s, "{}", n.record.title);
        for m in group {
            let _ = writeln!(s, "{}", m.render());
        }
    }
    s
}

pub fn group_by_citing(links: &[MissingLink]) -> Vec<(NodeId, Vec<&MissingLink>)> {
    let mut out: Vec<(NodeId, Vec<&MissingLink>)> = Vec::new();
    for m in links {
        match out.last_mut() {
            Some((id, group)) if *id == m.citing_node => group.push(m),
            _ => out.push((m.citing_node, vec![m])),
        }
    }
    out
}
