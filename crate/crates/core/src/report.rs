//! Run configuration and the static HTML report bundle.
//!
//! Bundle layout (relative to the output directory):
//!
//! ```text
//! index.html                 entry page, written last
//! index-{k}.html             node listing, page k, anchors #n{id}
//! index-cm-{k}.html          citation matrix, page k
//! hist-aus-{pubs,tlcs,tgcs}.html
//! freq-{field}.html
//! out-refs.html / .txt       references outside the collection
//! miss-links.html / .txt     potentially missed citations
//! graph/1.{svg,html,dot}     historiograph
//! network.json, linkage.json
//! csv/*.csv
//! warnings.txt
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::historiograph::{self, xml_escape as esc, GraphSpec, Metric, RenderOptions};
use crate::ingest::{parse_export_bytes, BibRecord, IngestError};
use crate::linkage::{
    self, ClusterMode, LinkPair, DEFAULT_CLUSTER_STRENGTH, DEFAULT_PAIR_STRENGTH,
};
use crate::network::{build_network, page_count, page_of, CitationNetwork, NodeId};
use crate::qc::{self, MissingLink, OuterReport};
use crate::rankings::{self, AuthorSort, FrequencyField, Stopwords};

pub const DEFAULT_MIN_THRESHOLD: u32 = 13;
pub const DEFAULT_PAGE_SIZE: usize = 500;
pub const DEFAULT_TOP_OUTER: usize = 300;
pub const DEFAULT_OUTPUT_DIR: &str = "histograph-report";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Ingest {
        path: PathBuf,
        #[source]
        source: IngestError,
    },
    #[error("config: {0}")]
    Config(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Svg,
    Dot,
    Html,
    Json,
    Csv,
}

impl OutputFormat {
    pub const ALL: [OutputFormat; 5] = [Self::Svg, Self::Dot, Self::Html, Self::Json, Self::Csv];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Svg => "svg",
            Self::Dot => "dot",
            Self::Html => "html",
            Self::Json => "json",
            Self::Csv => "csv",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|f| f.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| format!("unknown format {s:?} (svg, dot, html, json, csv)"))
    }
}

/// One source of settings. The CLI and the config file each produce one;
/// [`RunConfig::resolve`] layers them over the defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigLayer {
    pub inputs: Option<Vec<PathBuf>>,
    pub output_dir: Option<PathBuf>,
    pub min_lcs: Option<u32>,
    pub metric: Option<String>,
    pub page_size: Option<usize>,
    pub top_outer: Option<usize>,
    pub formats: Option<Vec<String>>,
    pub lookup_url: Option<String>,
    pub stopwords: Option<PathBuf>,
    pub arrowheads: Option<bool>,
}

impl ConfigLayer {
    pub fn from_toml(text: &str) -> Result<Self, ReportError> {
        toml::from_str(text).map_err(|e| ReportError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ReportError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_toml(&text).map_err(|e| match e {
            ReportError::Config(m) => ReportError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Fields set here win over `lower`.
    pub fn over(self, lower: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            inputs: self.inputs.filter(|v| !v.is_empty()).or(lower.inputs),
            output_dir: self.output_dir.or(lower.output_dir),
            min_lcs: self.min_lcs.or(lower.min_lcs),
            metric: self.metric.or(lower.metric),
            page_size: self.page_size.or(lower.page_size),
            top_outer: self.top_outer.or(lower.top_outer),
            formats: self.formats.filter(|v| !v.is_empty()).or(lower.formats),
            lookup_url: self.lookup_url.or(lower.lookup_url),
            stopwords: self.stopwords.or(lower.stopwords),
            arrowheads: self.arrowheads.or(lower.arrowheads),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub input_paths: Vec<PathBuf>,
    pub output_dir: PathBuf,
    pub min_metric_threshold: u32,
    pub metric: Metric,
    pub page_size: usize,
    pub top_outer: usize,
    pub formats: BTreeSet<OutputFormat>,
    pub lookup_url_template: Option<String>,
    pub stopword_path: Option<PathBuf>,
    pub arrowheads: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input_paths: Vec::new(),
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
            min_metric_threshold: DEFAULT_MIN_THRESHOLD,
            metric: Metric::Lcs,
            page_size: DEFAULT_PAGE_SIZE,
            top_outer: DEFAULT_TOP_OUTER,
            formats: OutputFormat::ALL.into_iter().collect(),
            lookup_url_template: None,
            stopword_path: None,
            arrowheads: false,
        }
    }
}

impl RunConfig {
    /// CLI flags over config file over defaults.
    pub fn resolve(cli: ConfigLayer, file: ConfigLayer) -> Result<Self, ReportError> {
        let merged = cli.over(file);
        let d = RunConfig::default();
        let metric = match merged.metric {
            Some(m) => m
                .parse()
                .map_err(|e: historiograph::RenderError| ReportError::Config(e.to_string()))?,
            None => d.metric,
        };
        let formats = match merged.formats {
            Some(list) => list
                .iter()
                .flat_map(|s| s.split(','))
                .filter(|s| !s.trim().is_empty())
                .map(OutputFormat::from_str)
                .collect::<Result<BTreeSet<_>, _>>()
                .map_err(ReportError::Config)?,
            None => d.formats,
        };
        let config = RunConfig {
            input_paths: merged.inputs.unwrap_or_default(),
            output_dir: merged.output_dir.unwrap_or(d.output_dir),
            min_metric_threshold: merged.min_lcs.unwrap_or(d.min_metric_threshold),
            metric,
            page_size: merged.page_size.unwrap_or(d.page_size),
            top_outer: merged.top_outer.unwrap_or(d.top_outer),
            formats,
            lookup_url_template: merged.lookup_url,
            stopword_path: merged.stopwords,
            arrowheads: merged.arrowheads.unwrap_or(false),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ReportError> {
        if self.page_size == 0 {
            return Err(ReportError::Config("page size must be at least 1".into()));
        }
        if self.top_outer == 0 {
            return Err(ReportError::Config("top-outer must be at least 1".into()));
        }
        if self.formats.is_empty() {
            return Err(ReportError::Config("no output format selected".into()));
        }
        Ok(())
    }

    pub fn wants(&self, f: OutputFormat) -> bool {
        self.formats.contains(&f)
    }

    pub fn stopwords(&self) -> Result<Stopwords, ReportError> {
        match &self.stopword_path {
            Some(p) => Stopwords::load(p).map_err(io_err(p)),
            None => Ok(Stopwords::default()),
        }
    }
}

/// Parsed records of every input plus non-fatal warnings.
#[derive(Debug, Default)]
pub struct LoadedInput {
    pub records: Vec<BibRecord>,
    pub warnings: Vec<String>,
}

/// Reads and parses every export. Records repeating an earlier UT are
/// dropped with a warning.
pub fn load_inputs(paths: &[PathBuf]) -> Result<LoadedInput, ReportError> {
    let mut out = LoadedInput::default();
    let mut seen_ids = BTreeSet::new();
    for path in paths {
        let bytes = fs::read(path).map_err(io_err(path))?;
        let parsed = parse_export_bytes(&bytes).map_err(|source| ReportError::Ingest {
            path: path.clone(),
            source,
        })?;
        for w in parsed.warnings {
            out.warnings.push(format!("{}: {w}", path.display()));
        }
        for r in parsed.records {
            if !r.record_id.is_empty() && !seen_ids.insert(r.record_id.clone()) {
                out.warnings.push(format!(
                    "{}: duplicate record {} ignored",
                    path.display(),
                    r.record_id
                ));
                continue;
            }
            out.records.push(r);
        }
    }
    if out.records.is_empty() {
        out.warnings.push("no records in input".to_string());
    }
    Ok(out)
}

/// Parses the inputs and builds the network; warnings from both stages.
pub fn load_network(config: &RunConfig) -> Result<(CitationNetwork, Vec<String>), ReportError> {
    let input = load_inputs(&config.input_paths)?;
    let mut warnings = input.warnings;
    let net = build_network(input.records);
    warnings.extend(net.warnings.iter().map(|w| format!("WARN {w}")));
    Ok((net, warnings))
}

/// Files written by a run, relative to the output directory, in write order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BundleSummary {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

struct BundleWriter<'a> {
    root: &'a Path,
    files: Vec<PathBuf>,
}

impl BundleWriter<'_> {
    fn write(&mut self, rel: &str, contents: impl AsRef<[u8]>) -> Result<(), ReportError> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        fs::write(&path, contents).map_err(io_err(&path))?;
        self.files.push(PathBuf::from(rel));
        Ok(())
    }

    fn csv(
        &mut self,
        rel: &str,
        f: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>,
    ) -> Result<(), ReportError> {
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.write(rel, buf)
    }
}

pub fn node_page_name(page: usize) -> String {
    format!("index-{page}.html")
}

pub fn matrix_page_name(page: usize) -> String {
    format!("index-cm-{page}.html")
}

/// Link to a node's row, as seen from a page `depth` directories below the root.
pub fn node_href(id: NodeId, page_size: usize, depth: usize) -> String {
    format!(
        "{}{}#n{id}",
        "../".repeat(depth),
        node_page_name(page_of(id, page_size))
    )
}

fn page(title: &str, body: &str) -> String {
    let mut s =
        String::from("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    let _ = writeln!(s, "<title>{}</title>", esc(title));
    s.push_str(concat!(
        "<style>body{font-family:sans-serif;margin:1em}table{border-collapse:collapse}",
        "td,th{border:1px solid #ccc;padding:2px 6px;vertical-align:top;font-size:90%}",
        "th{background:#eee}.num{text-align:right}nav a{margin-right:.5em}</style>\n"
    ));
    s.push_str("</head>\n<body>\n<nav><a href=\"index.html\">Index</a></nav>\n");
    let _ = writeln!(s, "<h1>{}</h1>", esc(title));
    s.push_str(body);
    s.push_str("</body>\n</html>\n");
    s
}

fn id_links(ids: &[NodeId], page_size: usize) -> String {
    ids.iter()
        .map(|&id| format!("<a href=\"{}\">{id}</a>", node_href(id, page_size, 0)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn pager(pages: usize, name: fn(usize) -> String, current: usize) -> String {
    let mut s = String::from("<p class=\"pager\">Pages:");
    for k in 1..=pages {
        if k == current {
            let _ = write!(s, " <b>{k}</b>");
        } else {
            let _ = write!(s, " <a href=\"{}\">{k}</a>", name(k));
        }
    }
    s.push_str("</p>\n");
    s
}

fn node_page(net: &CitationNetwork, k: usize, pages: usize, page_size: usize) -> String {
    let mut b = pager(pages, node_page_name, k);
    let _ = writeln!(
        b,
        "<p><a href=\"{}\">Citation matrix for this page</a></p>",
        matrix_page_name(k)
    );
    b.push_str("<table>\n<tr><th>#</th><th>Year</th><th>Authors</th><th>Title</th><th>Source</th><th>LCS</th><th>GCS</th><th>Cites</th><th>Cited by</th></tr>\n");
    let start = (k - 1) * page_size;
    for n in net.nodes.iter().skip(start).take(page_size) {
        let _ = writeln!(
            b,
            "<tr id=\"n{id}\"><td class=\"num\">{id}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td class=\"num\">{}</td><td class=\"num\">{}</td><td>{}</td><td>{}</td></tr>",
            n.record.pub_year,
            esc(&n.record.authors.join("; ")),
            esc(&n.record.title),
            esc(&qc::source_line(&n.record)),
            n.lcs,
            n.gcs,
            id_links(&n.cited_nodes, page_size),
            id_links(&n.citing_nodes, page_size),
            id = n.id,
        );
    }
    b.push_str("</table>\n");
    page(&format!("Nodes, page {k} of {pages}"), &b)
}

fn matrix_page(
    net: &CitationNetwork,
    k: usize,
    pages: usize,
    page_size: usize,
) -> Result<String, ReportError> {
    let rows = net
        .matrix_rows(k, page_size)
        .map_err(|e| ReportError::Config(e.to_string()))?;
    let mut b = pager(pages, matrix_page_name, k);
    b.push_str("<table>\n<tr><th>Cited nodes</th><th>#</th><th>Node</th><th>GCS</th><th>LCS</th><th>Citing nodes</th></tr>\n");
    for r in rows {
        let _ = writeln!(
            b,
            "<tr id=\"m{node}\"><td>{}</td><td class=\"num\">{}</td><td><a href=\"{}\">{node}</a> {} {}</td><td class=\"num\">{}</td><td class=\"num\">{}</td><td>{}</td></tr>",
            id_links(&r.cited_nodes, page_size),
            r.cited_count,
            node_href(r.node, page_size, 0),
            r.year,
            esc(&r.first_author),
            r.gcs,
            r.lcs,
            id_links(&r.citing_nodes, page_size),
            node = r.node,
        );
    }
    b.push_str("</table>\n");
    Ok(page(&format!("Citation matrix, page {k} of {pages}"), &b))
}

const AUTHOR_PAGES: [AuthorSort; 3] = [AuthorSort::Pubs, AuthorSort::Tlcs, AuthorSort::Tgcs];

fn author_page_name(sort: AuthorSort) -> String {
    format!("hist-aus-{}.html", sort.as_str())
}

fn author_page(net: &CitationNetwork, sort: AuthorSort, page_size: usize) -> String {
    let rows = rankings::rank_authors(net, sort);
    let mut b = String::from("<p>Sort by:");
    for s in AUTHOR_PAGES {
        let _ = write!(
            b,
            " <a href=\"{}\">{}</a>",
            author_page_name(s),
            s.as_str().to_uppercase()
        );
    }
    let _ = writeln!(b, "</p>\n<p>{} authors.</p>", rows.len());
    b.push_str("<table>\n<tr><th>#</th><th>Author</th><th>Recs</th><th>TLCS</th><th>TGCS</th><th>Nodes</th></tr>\n");
    for (i, r) in rows.iter().enumerate() {
        let _ = writeln!(
            b,
            "<tr><td class=\"num\">{}</td><td>{}</td><td class=\"num\">{}</td><td class=\"num\">{}</td><td class=\"num\">{}</td><td>{}</td></tr>",
            i + 1,
            esc(&r.name),
            r.pubs,
            r.tlcs,
            r.tgcs,
            id_links(&r.node_ids, page_size)
        );
    }
    b.push_str("</table>\n");
    page(&format!("Authors by {}", sort.as_str().to_uppercase()), &b)
}

fn freq_page_name(field: FrequencyField) -> String {
    format!("freq-{}.html", field.as_str().replace('_', "-"))
}

fn freq_page(table: &rankings::FrequencyTable) -> String {
    let mut b = String::new();
    let _ = writeln!(
        b,
        "<p>{} records, {} with a value ({:.1}%).</p>",
        table.total_records,
        table.covered_records,
        100.0 * table.coverage()
    );
    b.push_str("<table>\n<tr><th>#</th><th>Value</th><th>Records</th><th>%</th></tr>\n");
    for (i, r) in table.rows.iter().enumerate() {
        let _ = writeln!(
            b,
            "<tr><td class=\"num\">{}</td><td>{}</td><td class=\"num\">{}</td><td class=\"num\">{:.2}</td></tr>",
            i + 1,
            esc(&r.key),
            r.count,
            100.0 * r.share
        );
    }
    b.push_str("</table>\n");
    page(&format!("Frequency: {}", table.field.as_str()), &b)
}

fn outer_page(report: &OuterReport, template: Option<&str>, page_size: usize) -> String {
    let mut b = String::new();
    let _ = writeln!(
        b,
        "<p>Cited references outside of this network. Total: {} references, {} occurrences (top {} shown). Sorted by LCS. Entries marked * appear to come from a journal of the collection.</p>",
        report.total_groups,
        report.total_occurrences,
        report.rows.len()
    );
    b.push_str("<table>\n<tr><th>#</th><th>LCS</th><th>Reference</th><th>Citing nodes</th></tr>\n");
    for (i, r) in report.rows.iter().enumerate() {
        let text = esc(&r.display);
        let cell = match template {
            Some(t) => format!("<a href=\"{}\">{text}</a>", esc(&qc::lookup_url(t, &r.key))),
            None => text,
        };
        let mark = if r.in_corpus_source { " *" } else { "" };
        let _ = writeln!(
            b,
            "<tr><td class=\"num\">{}</td><td class=\"num\">{}</td><td>{cell}{mark}</td><td>{}</td></tr>",
            i + 1,
            r.local_cites,
            id_links(&r.citing_nodes, page_size)
        );
    }
    b.push_str("</table>\n");
    page("Outer references", &b)
}

fn missing_page(net: &CitationNetwork, links: &[MissingLink], page_size: usize) -> String {
    let mut b = String::new();
    let _ = writeln!(
        b,
        "<p>{} nodes have citations that may potentially refer to other nodes.</p>",
        qc::nodes_with_missing_links(links)
    );
    for (i, (id, group)) in qc::group_by_citing(links).into_iter().enumerate() {
        let n = &net.nodes[id.index()];
        let _ = writeln!(
            b,
            "<h3>{} | <a href=\"{}\">{id}</a> {} {}</h3>\n<p>{}<br>\n{}</p>\n<ul>",
            i + 1,
            node_href(id, page_size, 0),
            n.record.pub_year,
            esc(&qc::source_line(&n.record)),
            esc(&n.record.authors.join("; ")),
            esc(&n.record.title)
        );
        for m in group {
            let reasons = m
                .reasons
                .iter()
                .map(|r| format!("{r:?}"))
                .collect::<Vec<_>>()
                .join(", ");
            let _ = writeln!(
                b,
                "<li>{} may refer to [<a href=\"{}\">{}</a>] {} <small>({reasons})</small></li>",
                esc(&m.cited_ref.raw),
                node_href(m.candidate_node, page_size, 0),
                m.candidate_node,
                esc(m.candidate_key.as_str())
            );
        }
        b.push_str("</ul>\n");
    }
    page("Potentially missed citations", &b)
}

#[derive(Serialize)]
struct LinkageDump<'a> {
    pair_min_strength: u32,
    cluster_min_strength: u32,
    cocitations: &'a [LinkPair],
    couplings: &'a [LinkPair],
    cocitation_clusters: &'a [Vec<NodeId>],
    coupling_clusters: &'a [Vec<NodeId>],
}

fn graph_spec(net: &CitationNetwork, config: &RunConfig) -> GraphSpec {
    historiograph::layout(historiograph::select_nodes(
        net,
        config.min_metric_threshold,
        config.metric,
    ))
}

fn write_graph_files(
    w: &mut BundleWriter,
    spec: &GraphSpec,
    config: &RunConfig,
) -> Result<(), ReportError> {
    let page_size = config.page_size;
    let href = move |id: NodeId| node_href(id, page_size, 1);
    let opts = RenderOptions {
        arrowheads: config.arrowheads,
        node_link: if config.wants(OutputFormat::Html) {
            Some(&href)
        } else {
            None
        },
        title: "Historiograph".to_string(),
    };
    if config.wants(OutputFormat::Svg) {
        w.write("graph/1.svg", historiograph::render_svg(spec, &opts))?;
    }
    if config.wants(OutputFormat::Html) {
        w.write("graph/1.html", historiograph::render_html(spec, &opts))?;
    }
    if config.wants(OutputFormat::Dot) {
        w.write("graph/1.dot", historiograph::render_dot(spec, &opts))?;
    }
    Ok(())
}

/// Writes only the historiograph files for the selected formats.
pub fn write_graph(
    net: &CitationNetwork,
    config: &RunConfig,
) -> Result<BundleSummary, ReportError> {
    config.validate()?;
    let spec = graph_spec(net, config);
    let mut w = BundleWriter {
        root: &config.output_dir,
        files: Vec::new(),
    };
    write_graph_files(&mut w, &spec, config)?;
    if config.wants(OutputFormat::Json) {
        let mut s = serde_json::to_string_pretty(&spec).expect("graph spec serializes");
        s.push('\n');
        w.write("graph/1.json", s)?;
    }
    Ok(BundleSummary {
        files: w.files,
        warnings: spec.warnings,
    })
}

/// Writes the full report bundle; `index.html` comes last.
pub fn write_bundle(
    net: &CitationNetwork,
    config: &RunConfig,
    input_warnings: &[String],
) -> Result<BundleSummary, ReportError> {
    config.validate()?;
    let stopwords = config.stopwords()?;
    let page_size = config.page_size;
    let html = config.wants(OutputFormat::Html);
    let mut w = BundleWriter {
        root: &config.output_dir,
        files: Vec::new(),
    };
    fs::create_dir_all(&config.output_dir).map_err(io_err(&config.output_dir))?;

    let pages = page_count(net.len(), page_size);
    let outer = qc::outer_references(net, config.top_outer);
    let missing = qc::missing_links(net);
    let tables: Vec<_> = FrequencyField::ALL
        .into_iter()
        .map(|f| rankings::frequency_table_with(net, f, &stopwords))
        .collect();
    let spec = graph_spec(net, config);
    let mut warnings: Vec<String> = input_warnings.to_vec();
    warnings.extend(spec.warnings.iter().cloned());

    if html {
        for k in 1..=pages {
            w.write(&node_page_name(k), node_page(net, k, pages, page_size))?;
            w.write(&matrix_page_name(k), matrix_page(net, k, pages, page_size)?)?;
        }
        for sort in AUTHOR_PAGES {
            w.write(&author_page_name(sort), author_page(net, sort, page_size))?;
        }
        for t in &tables {
            w.write(&freq_page_name(t.field), freq_page(t))?;
        }
        w.write(
            "out-refs.html",
            outer_page(&outer, config.lookup_url_template.as_deref(), page_size),
        )?;
        w.write("out-refs.txt", qc::render_outer_text(&outer))?;
        w.write("miss-links.html", missing_page(net, &missing, page_size))?;
        w.write("miss-links.txt", qc::render_missing_text(net, &missing))?;
    }

    write_graph_files(&mut w, &spec, config)?;

    let need_linkage = config.wants(OutputFormat::Json) || config.wants(OutputFormat::Csv);
    let (cocit, coupl, cl_cited, cl_citing) = if need_linkage {
        (
            linkage::cocitations(net, DEFAULT_PAIR_STRENGTH),
            linkage::bibliographic_couplings(net, DEFAULT_PAIR_STRENGTH),
            linkage::cluster(net, ClusterMode::Cited, DEFAULT_CLUSTER_STRENGTH),
            linkage::cluster(net, ClusterMode::Citing, DEFAULT_CLUSTER_STRENGTH),
        )
    } else {
        Default::default()
    };

    if config.wants(OutputFormat::Json) {
        w.write("network.json", net.to_json())?;
        let dump = LinkageDump {
            pair_min_strength: DEFAULT_PAIR_STRENGTH,
            cluster_min_strength: DEFAULT_CLUSTER_STRENGTH,
            cocitations: &cocit,
            couplings: &coupl,
            cocitation_clusters: &cl_cited,
            coupling_clusters: &cl_citing,
        };
        let mut s = serde_json::to_string_pretty(&dump).expect("linkage dump serializes");
        s.push('\n');
        w.write("linkage.json", s)?;
    }

    if config.wants(OutputFormat::Csv) {
        w.csv("csv/matrix.csv", |buf| write_matrix_csv(net, buf))?;
        w.csv("csv/authors.csv", |buf| {
            rankings::write_authors_csv(&rankings::rank_authors(net, AuthorSort::Tlcs), buf)
        })?;
        for t in &tables {
            w.csv(
                &format!("csv/freq-{}.csv", t.field.as_str().replace('_', "-")),
                |buf| rankings::write_frequency_csv(t, buf),
            )?;
        }
        w.csv("csv/out-refs.csv", |buf| {
            qc::write_outer_csv(&outer, config.lookup_url_template.as_deref(), buf)
        })?;
        w.csv("csv/miss-links.csv", |buf| write_missing_csv(&missing, buf))?;
        w.csv("csv/cocitations.csv", |buf| {
            linkage::write_pairs_csv(&cocit, buf)
        })?;
        w.csv("csv/couplings.csv", |buf| {
            linkage::write_pairs_csv(&coupl, buf)
        })?;
        w.csv("csv/clusters-cited.csv", |buf| {
            linkage::write_clusters_csv(&cl_cited, buf)
        })?;
        w.csv("csv/clusters-citing.csv", |buf| {
            linkage::write_clusters_csv(&cl_citing, buf)
        })?;
    }

    let mut warn_text = warnings.join("\n");
    if !warn_text.is_empty() {
        warn_text.push('\n');
    }
    w.write("warnings.txt", warn_text)?;

    let index = index_page(
        net, config, pages, &outer, &missing, &spec, &warnings, &w.files,
    );
    w.write("index.html", index)?;
    Ok(BundleSummary {
        files: w.files,
        warnings,
    })
}

#[allow(clippy::too_many_arguments)]
fn index_page(
    net: &CitationNetwork,
    config: &RunConfig,
    pages: usize,
    outer: &OuterReport,
    missing: &[MissingLink],
    spec: &GraphSpec,
    warnings: &[String],
    files: &[PathBuf],
) -> String {
    let mut b = String::from("<table>\n");
    let stats: [(&str, String); 9] = [
        ("Nodes", net.len().to_string()),
        ("Local citations (edges)", net.edges.len().to_string()),
        ("Cited references", net.cited_ref_count().to_string()),
        (
            "Outer references (distinct)",
            outer.total_groups.to_string(),
        ),
        (
            "Outer references (occurrences)",
            outer.total_occurrences.to_string(),
        ),
        (
            "Nodes with potentially missed citations",
            qc::nodes_with_missing_links(missing).to_string(),
        ),
        (
            "Historiograph nodes",
            format!(
                "{} ({} >= {})",
                spec.nodes.len(),
                config.metric.as_str().to_uppercase(),
                config.min_metric_threshold
            ),
        ),
        (
            "Historiograph components",
            spec.components().len().to_string(),
        ),
        ("Warnings", warnings.len().to_string()),
    ];
    for (k, v) in stats {
        let _ = writeln!(b, "<tr><th>{k}</th><td class=\"num\">{}</td></tr>", esc(&v));
    }
    b.push_str("</table>\n<h2>Reports</h2>\n<ul>\n");
    let written: BTreeSet<&Path> = files.iter().map(PathBuf::as_path).collect();
    let mut link = |href: &str, text: &str| {
        if written.contains(Path::new(href)) {
            let _ = writeln!(b, "<li><a href=\"{href}\">{}</a></li>", esc(text));
        }
    };
    if pages > 0 {
        link(&node_page_name(1), &format!("Nodes ({pages} pages)"));
        link(&matrix_page_name(1), "Citation matrix");
    }
    for sort in AUTHOR_PAGES {
        link(
            &author_page_name(sort),
            &format!("Authors by {}", sort.as_str().to_uppercase()),
        );
    }
    for f in FrequencyField::ALL {
        link(&freq_page_name(f), &format!("Frequency: {}", f.as_str()));
    }
    link("out-refs.html", "Outer references");
    link("out-refs.txt", "Outer references (text)");
    link("miss-links.html", "Potentially missed citations");
    link("miss-links.txt", "Potentially missed citations (text)");
    link("graph/1.html", "Historiograph");
    link("graph/1.svg", "Historiograph (SVG)");
    link("graph/1.dot", "Historiograph (DOT)");
    link("network.json", "Network (JSON)");
    link("linkage.json", "Co-citation and coupling (JSON)");
    for f in files {
        if f.starts_with("csv") {
            let s = f.to_string_lossy().replace('\\', "/");
            link(&s, &s);
        }
    }
    link("warnings.txt", "Warnings");
    b.push_str("</ul>\n");
    page("Citation network report", &b)
}

fn join_ids(ids: &[NodeId]) -> String {
    ids.iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn write_matrix_csv<W: std::io::Write>(net: &CitationNetwork, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record([
        "node",
        "year",
        "first_author",
        "gcs",
        "lcs",
        "cited_nodes",
        "citing_nodes",
    ])?;
    for n in &net.nodes {
        w.write_record([
            n.id.to_string(),
            n.record.pub_year.to_string(),
            n.first_author().to_string(),
            n.gcs.to_string(),
            n.lcs.to_string(),
            join_ids(&n.cited_nodes),
            join_ids(&n.citing_nodes),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_missing_csv<W: std::io::Write>(links: &[MissingLink], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record([
        "citing_node",
        "reference",
        "candidate_node",
        "candidate_key",
        "reasons",
    ])?;
    for m in links {
        let reasons = m
            .reasons
            .iter()
            .map(|r| format!("{r:?}"))
            .collect::<Vec<_>>()
            .join(" ");
        w.write_record([
            m.citing_node.to_string(),
            m.cited_ref.raw.clone(),
            m.candidate_node.to_string(),
            m.candidate_key.to_string(),
            reasons,
        ])?;
    }
    w.flush()?;
    Ok(())
}
