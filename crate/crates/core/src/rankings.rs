//! Ranked all-author list and frequency tables.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::ingest::normalize_key;
use crate::network::{CitationNetwork, NodeId};

/// Key used for records without a value in the analysed field.
pub const UNKNOWN: &str = "UNKNOWN";

const DEFAULT_STOPWORDS: &str = include_str!("../config/stopwords.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AuthorSort {
    Pubs,
    Tlcs,
    Tgcs,
    Name,
}

impl AuthorSort {
    pub const ALL: [AuthorSort; 4] = [Self::Pubs, Self::Tlcs, Self::Tgcs, Self::Name];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pubs => "pubs",
            Self::Tlcs => "tlcs",
            Self::Tgcs => "tgcs",
            Self::Name => "name",
        }
    }
}

impl FromStr for AuthorSort {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown author sort {s:?} (pubs, tlcs, tgcs, name)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuthorRow {
    /// Printed form of the first occurrence in node order.
    pub name: String,
    /// Normalized key the row is grouped by.
    pub key: String,
    pub tgcs: u64,
    pub tlcs: u64,
    pub pubs: u32,
    pub node_ids: Vec<NodeId>,
}

/// One row per distinct author over every author position.
///
/// `Name` sorts ascending; the score sorts are descending with ties broken by
/// name, then key.
pub fn rank_authors(net: &CitationNetwork, sort: AuthorSort) -> Vec<AuthorRow> {
    let mut rows: Vec<AuthorRow> = Vec::new();
    let mut by_key: HashMap<String, usize> = HashMap::new();

    for node in &net.nodes {
        let mut seen = HashSet::new();
        for author in &node.record.authors {
            let key = normalize_key(author);
            if key.is_empty() || !seen.insert(key.clone()) {
                continue;
            }
            let idx = *by_key.entry(key.clone()).or_insert_with(|| {
                rows.push(AuthorRow {
                    name: author.trim().to_string(),
                    key,
                    tgcs: 0,
                    tlcs: 0,
                    pubs: 0,
                    node_ids: Vec::new(),
                });
                rows.len() - 1
            });
            let row = &mut rows[idx];
            row.tgcs += u64::from(node.gcs);
            row.tlcs += u64::from(node.lcs);
            row.pubs += 1;
            row.node_ids.push(node.id);
        }
    }

    sort_authors(&mut rows, sort);
    rows
}

pub fn sort_authors(rows: &mut [AuthorRow], sort: AuthorSort) {
    rows.sort_by(|a, b| {
        let score = match sort {
            AuthorSort::Pubs => b.pubs.cmp(&a.pubs),
            AuthorSort::Tlcs => b.tlcs.cmp(&a.tlcs),
            AuthorSort::Tgcs => b.tgcs.cmp(&a.tgcs),
            AuthorSort::Name => std::cmp::Ordering::Equal,
        };
        score
            .then_with(|| a.name.cmp(&b.name))
            .then_with(|| a.key.cmp(&b.key))
    });
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyField {
    Year,
    DocType,
    Country,
    Institution,
    Word,
}

impl FrequencyField {
    pub const ALL: [FrequencyField; 5] = [
        Self::Year,
        Self::DocType,
        Self::Country,
        Self::Institution,
        Self::Word,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Year => "year",
            Self::DocType => "doc_type",
            Self::Country => "country",
            Self::Institution => "institution",
            Self::Word => "word",
        }
    }
}

impl FromStr for FrequencyField {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown frequency field {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyRow {
    pub key: String,
    pub count: u32,
    /// Fraction of records carrying the key.
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyTable {
    pub field: FrequencyField,
    pub rows: Vec<FrequencyRow>,
    pub total_records: usize,
    /// Records that had at least one value for the field.
    pub covered_records: usize,
}

impl FrequencyTable {
    pub fn coverage(&self) -> f64 {
        if self.total_records == 0 {
            0.0
        } else {
            self.covered_records as f64 / self.total_records as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stopwords(BTreeSet<String>);

impl Default for Stopwords {
    fn default() -> Self {
        Self::from_text(DEFAULT_STOPWORDS)
    }
}

impl Stopwords {
    pub fn from_text(text: &str) -> Self {
        Stopwords(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn load(path: &Path) -> io::Result<Self> {
        Ok(Self::from_text(&std::fs::read_to_string(path)?))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }
}

/// Lower-cased title tokens, stopwords and single characters removed.
pub fn title_words(title: &str, stopwords: &Stopwords) -> Vec<String> {
    title
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() > 1)
        .map(str::to_lowercase)
        .filter(|t| !stopwords.contains(t) && !t.chars().all(|c| c.is_ascii_digit()))
        .collect()
}

fn strip_address(line: &str) -> &str {
    let line = line.trim();
    // Newer exports prefix the address with "[Author; Author]".
    let line = match (line.starts_with('['), line.find(']')) {
        (true, Some(end)) => &line[end + 1..],
        _ => line,
    };
    line.trim().trim_end_matches('.').trim()
}

/// Country of an address line: its last comma segment, with US zip/state
/// forms such as `WA 98195 USA` reduced to `USA`.
pub fn address_country(line: &str) -> Option<String> {
    let last = strip_address(line).rsplit(',').next()?.trim();
    if last.is_empty() {
        return None;
    }
    let upper = last.to_uppercase();
    if upper.split_whitespace().last() == Some("USA") {
        return Some("USA".to_string());
    }
    Some(upper.split_whitespace().collect::<Vec<_>>().join(" "))
}

/// Institution of an address line: its first comma segment.
pub fn address_institution(line: &str) -> Option<String> {
    let first = strip_address(line).split(',').next()?.trim();
    if first.is_empty() {
        return None;
    }
    Some(
        first
            .to_uppercase()
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" "),
    )
}

pub fn frequency_table(net: &CitationNetwork, field: FrequencyField) -> FrequencyTable {
    frequency_table_with(net, field, &Stopwords::default())
}

/// Counts each key at most once per record; records without a value count
/// under [`UNKNOWN`].
pub fn frequency_table_with(
    net: &CitationNetwork,
    field: FrequencyField,
    stopwords: &Stopwords,
) -> FrequencyTable {
    let mut counts: BTreeMap<String, u32> = BTreeMap::new();
    let mut covered = 0;
    for node in &net.nodes {
        let r = &node.record;
        let keys: BTreeSet<String> = match field {
            FrequencyField::Year => BTreeSet::from([r.pub_year.to_string()]),
            FrequencyField::DocType => {
                let dt = r.doc_type.trim();
                if dt.is_empty() {
                    BTreeSet::new()
                } else {
                    BTreeSet::from([dt.to_string()])
                }
            }
            FrequencyField::Country => r
                .addresses
                .iter()
                .filter_map(|a| address_country(a))
                .collect(),
            FrequencyField::Institution => r
                .addresses
                .iter()
                .filter_map(|a| address_institution(a))
                .collect(),
            FrequencyField::Word => title_words(&r.title, stopwords).into_iter().collect(),
        };
        if keys.is_empty() {
            *counts.entry(UNKNOWN.to_string()).or_default() += 1;
        } else {
            covered += 1;
            for k in keys {
                *counts.entry(k).or_default() += 1;
            }
        }
    }

    let total = net.nodes.len();
    let mut rows: Vec<FrequencyRow> = counts
        .into_iter()
        .map(|(key, count)| FrequencyRow {
            share: if total == 0 {
                0.0
            } else {
                f64::from(count) / total as f64
            },
            key,
            count,
        })
        .collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.key.cmp(&b.key)));
    FrequencyTable {
        field,
        rows,
        total_records: total,
        covered_records: covered,
    }
}

pub fn write_authors_csv<W: io::Write>(rows: &[AuthorRow], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["rank", "name", "tgcs", "tlcs", "pubs", "nodes"])?;
    for (i, row) in rows.iter().enumerate() {
        let nodes = row
            .node_ids
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        w.write_record([
            (i + 1).to_string(),
            row.name.clone(),
            row.tgcs.to_string(),
            row.tlcs.to_string(),
            row.pubs.to_string(),
            nodes,
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_frequency_csv<W: io::Write>(table: &FrequencyTable, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record([table.field.as_str(), "count", "share"])?;
    for row in &table.rows {
        w.write_record([
            row.key.clone(),
            row.count.to_string(),
            format!("{:.4}", row.share),
        ])?;
    }
    w.flush()?;
    Ok(())
}
