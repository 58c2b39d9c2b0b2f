//! Threshold selection, chronological layout and rendering of the
//! historiograph.
//!
//! Circles are scaled so their area is proportional to the chosen metric:
//! `radius = R_MIN * sqrt(metric / smallest_metric)`, clamped to `R_MAX`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::network::{CitationNetwork, Node, NodeId};

pub const R_MIN: f64 = 8.0;
pub const R_MAX: f64 = 40.0;
/// Horizontal space between neighboring circles in a band.
pub const NODE_GAP: f64 = 12.0;
pub const BAND_GAP: f64 = 36.0;
pub const MARGIN: f64 = 20.0;
/// Room on each side for the year labels.
pub const LABEL_WIDTH: f64 = 50.0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RenderError {
    #[error("unknown format {0:?} (svg, dot, html)")]
    UnknownFormat(String),
    #[error("unknown metric {0:?} (lcs, gcs)")]
    UnknownMetric(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Lcs,
    Gcs,
}

impl Metric {
    pub fn of(self, node: &Node) -> u32 {
        match self {
            Metric::Lcs => node.lcs,
            Metric::Gcs => node.gcs,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Lcs => "lcs",
            Metric::Gcs => "gcs",
        }
    }
}

impl FromStr for Metric {
    type Err = RenderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lcs" => Ok(Metric::Lcs),
            "gcs" => Ok(Metric::Gcs),
            _ => Err(RenderError::UnknownMetric(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Svg,
    Dot,
    Html,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Svg => "svg",
            Format::Dot => "dot",
            Format::Html => "html",
        }
    }
}

impl FromStr for Format {
    type Err = RenderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "svg" => Ok(Format::Svg),
            "dot" => Ok(Format::Dot),
            "html" => Ok(Format::Html),
            _ => Err(RenderError::UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphNode {
    pub id: NodeId,
    pub year: i32,
    pub author: String,
    pub title: String,
    pub lcs: u32,
    pub gcs: u32,
    pub metric_value: u32,
    pub radius: f64,
    /// Radius was capped at `R_MAX`, or floored at `R_MIN` for a zero metric.
    pub clamped: bool,
    pub x: f64,
    pub y: f64,
}

impl GraphNode {
    pub fn tooltip(&self) -> String {
        format!(
            "{} ({}) {} [LCS {}, GCS {}]",
            self.author, self.year, self.title, self.lcs, self.gcs
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphSpec {
    pub threshold: u32,
    pub metric: Metric,
    /// Selected nodes, ascending by id.
    pub nodes: Vec<GraphNode>,
    /// `(citing, cited)` pairs with both ends selected.
    pub edges: Vec<(NodeId, NodeId)>,
    /// Nodes per publication year; left-to-right order once laid out.
    pub year_rows: BTreeMap<i32, Vec<NodeId>>,
    pub positioned: bool,
    pub width: f64,
    pub height: f64,
    pub warnings: Vec<String>,
}

/// Radius before clamping, for a metric relative to the smallest positive one.
pub fn unclamped_radius(metric: u32, smallest: u32) -> f64 {
    if metric == 0 || smallest == 0 {
        return R_MIN;
    }
    R_MIN * (f64::from(metric) / f64::from(smallest)).sqrt()
}

/// Keeps every node whose metric is at least `threshold`, plus the edges
/// between kept nodes.
pub fn select_nodes(net: &CitationNetwork, threshold: u32, metric: Metric) -> GraphSpec {
    let selected: Vec<&Node> = net
        .nodes
        .iter()
        .filter(|n| metric.of(n) >= threshold)
        .collect();
    let ids: BTreeSet<NodeId> = selected.iter().map(|n| n.id).collect();
    let smallest = selected
        .iter()
        .map(|n| metric.of(n))
        .filter(|&m| m > 0)
        .min()
        .unwrap_or(0);

    let nodes: Vec<GraphNode> = selected
        .iter()
        .map(|n| {
            let m = metric.of(n);
            let raw = unclamped_radius(m, smallest);
            GraphNode {
                id: n.id,
                year: n.record.pub_year,
                author: n.first_author().to_string(),
                title: n.record.title.clone(),
                lcs: n.lcs,
                gcs: n.gcs,
                metric_value: m,
                radius: raw.min(R_MAX),
                clamped: raw > R_MAX || m == 0,
                x: 0.0,
                y: 0.0,
            }
        })
        .collect();

    let edges = net
        .edges
        .iter()
        .filter(|(a, b)| ids.contains(a) && ids.contains(b))
        .copied()
        .collect();

    let mut year_rows: BTreeMap<i32, Vec<NodeId>> = BTreeMap::new();
    for n in &nodes {
        year_rows.entry(n.year).or_default().push(n.id);
    }

    let mut warnings = Vec::new();
    if nodes.is_empty() {
        warnings.push(format!(
            "no node has {} >= {threshold}; the historiograph is empty",
            metric.as_str().to_uppercase()
        ));
    }

    GraphSpec {
        threshold,
        metric,
        nodes,
        edges,
        year_rows,
        positioned: false,
        width: 0.0,
        height: 0.0,
        warnings,
    }
}

impl GraphSpec {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn selected(&self) -> Vec<NodeId> {
        self.nodes.iter().map(|n| n.id).collect()
    }

    pub fn node(&self, id: NodeId) -> Option<&GraphNode> {
        self.nodes
            .binary_search_by_key(&id, |n| n.id)
            .ok()
            .map(|i| &self.nodes[i])
    }

    pub fn radii(&self) -> BTreeMap<NodeId, f64> {
        self.nodes.iter().map(|n| (n.id, n.radius)).collect()
    }

    /// Connected components of the selected subgraph, singletons included.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut adj: BTreeMap<NodeId, Vec<NodeId>> =
            self.nodes.iter().map(|n| (n.id, Vec::new())).collect();
        for &(a, b) in &self.edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in adj.keys() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![start];
            while let Some(n) = stack.pop() {
                comp.push(n);
                for &m in &adj[&n] {
                    if seen.insert(m) {
                        stack.push(m);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Places one band per year, oldest at the top. Within a band nodes are
/// ordered by the mean x of their already placed cited nodes, then packed
/// left to right so circles never overlap.
pub fn layout(mut spec: GraphSpec) -> GraphSpec {
    if spec.nodes.is_empty() {
        spec.positioned = true;
        spec.width = 2.0 * (MARGIN + LABEL_WIDTH);
        spec.height = 2.0 * MARGIN + 2.0 * R_MIN;
        return spec;
    }

    let index: HashMap<NodeId, usize> = spec
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.id, i))
        .collect();
    let mut cited: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    for &(citing, c) in &spec.edges {
        cited.entry(citing).or_default().push(c);
    }

    let mut placed: HashMap<NodeId, f64> = HashMap::new();
    let mut y_cursor = MARGIN;
    let mut rows = BTreeMap::new();

    let radii = spec.radii();
    let radius = |id: &NodeId| radii[id];
    for (&year, ids) in &spec.year_rows {
        let band_r = ids.iter().map(radius).fold(0.0, f64::max);
        let y = y_cursor + band_r;

        let mut packed = 0.0;
        let mut desired: Vec<(f64, NodeId)> = ids
            .iter()
            .map(|id| {
                let r = radius(id);
                let default_x = packed + r;
                packed += 2.0 * r + NODE_GAP;
                let xs: Vec<f64> = cited
                    .get(id)
                    .into_iter()
                    .flatten()
                    .filter_map(|c| placed.get(c).copied())
                    .collect();
                let x = if xs.is_empty() {
                    default_x
                } else {
                    xs.iter().sum::<f64>() / xs.len() as f64
                };
                (x, *id)
            })
            .collect();
        desired.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let mut prev: Option<(f64, f64)> = None;
        let mut order = Vec::with_capacity(desired.len());
        for (want, id) in desired {
            let r = radius(&id);
            let x = match prev {
                Some((px, pr)) => want.max(px + pr + NODE_GAP + r),
                None => want,
            };
            let node = &mut spec.nodes[index[&id]];
            node.x = x;
            node.y = y;
            placed.insert(id, x);
            prev = Some((x, r));
            order.push(id);
        }
        rows.insert(year, order);
        y_cursor = y + band_r + BAND_GAP;
    }

    let left = spec
        .nodes
        .iter()
        .map(|n| n.x - n.radius)
        .fold(f64::INFINITY, f64::min);
    let shift = MARGIN + LABEL_WIDTH - left;
    for n in &mut spec.nodes {
        n.x += shift;
    }
    let right = spec
        .nodes
        .iter()
        .map(|n| n.x + n.radius)
        .fold(0.0, f64::max);
    spec.width = right + LABEL_WIDTH + MARGIN;
    spec.height = y_cursor - BAND_GAP + MARGIN;
    spec.year_rows = rows;
    spec.positioned = true;
    spec
}

pub struct RenderOptions<'a> {
    pub arrowheads: bool,
    /// Target of each node's link in HTML output.
    pub node_link: Option<&'a dyn Fn(NodeId) -> String>,
    pub title: String,
}

impl Default for RenderOptions<'_> {
    fn default() -> Self {
        RenderOptions {
            arrowheads: false,
            node_link: None,
            title: "Historiograph".to_string(),
        }
    }
}

pub fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c if (c as u32) < 0x20 && c != '\n' && c != '\t' => out.push(' '),
            c => out.push(c),
        }
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\")
        .replace('"', "\\\"")
        .replace('\n', "\\n")
}

fn caption(spec: &GraphSpec) -> String {
    format!(
        "{} nodes with {} >= {}",
        spec.nodes.len(),
        spec.metric.as_str().to_uppercase(),
        spec.threshold
    )
}

fn svg_body(spec: &GraphSpec, opts: &RenderOptions, links: bool) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif">"#,
        w = spec.width.ceil(),
        h = spec.height.ceil()
    );
    let _ = writeln!(
        s,
        "<title>{}</title>",
        xml_escape(&format!("{}: {}", opts.title, caption(spec)))
    );

    if spec.nodes.is_empty() {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">No nodes meet the selection threshold.</text>"#,
            spec.width / 2.0,
            spec.height / 2.0
        );
        s.push_str("</svg>\n");
        return s;
    }

    if opts.arrowheads {
        s.push_str(concat!(
            "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" ",
            "markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\">",
            "<path d=\"M0,0 L10,5 L0,10 z\" fill=\"#555\"/></marker></defs>\n"
        ));
    }

    s.push_str("<g id=\"years\" font-size=\"11\" fill=\"#666\">\n");
    for (year, ids) in &spec.year_rows {
        if let Some(n) = ids.first().and_then(|id| spec.node(*id)) {
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.2}" dominant-baseline="central">{}</text>"#,
                MARGIN, n.y, year
            );
        }
    }
    s.push_str("</g>\n");

    s.push_str("<g id=\"edges\" stroke=\"#555\" stroke-width=\"1\">\n");
    for &(citing, cited) in &spec.edges {
        let (Some(a), Some(b)) = (spec.node(citing), spec.node(cited)) else {
            continue;
        };
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let len = (dx * dx + dy * dy).sqrt();
        if len <= a.radius + b.radius {
            continue;
        }
        let (ux, uy) = (dx / len, dy / len);
        let marker = if opts.arrowheads {
            r#" marker-end="url(#arrow)""#
        } else {
            ""
        };
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"{marker}/>"#,
            a.x + ux * a.radius,
            a.y + uy * a.radius,
            b.x - ux * b.radius,
            b.y - uy * b.radius
        );
    }
    s.push_str("</g>\n");

    s.push_str("<g id=\"nodes\" font-size=\"9\">\n");
    for n in &spec.nodes {
        let href = if links {
            opts.node_link.map(|f| f(n.id))
        } else {
            None
        };
        if let Some(h) = &href {
            let _ = write!(s, r#"<a href="{}">"#, xml_escape(h));
        }
        let _ = write!(
            s,
            r##"<g id="n{id}"><title>{tip}</title><circle cx="{x:.3}" cy="{y:.3}" r="{r:.4}" fill="#fdf6d8" stroke="#333"/><text x="{x:.3}" y="{y:.3}" text-anchor="middle" dominant-baseline="central">{id}</text></g>"##,
            id = n.id,
            tip = xml_escape(&n.tooltip()),
            x = n.x,
            y = n.y,
            r = n.radius
        );
        if href.is_some() {
            s.push_str("</a>");
        }
        s.push('\n');
    }
    s.push_str("</g>\n</svg>\n");
    s
}

pub fn render_svg(spec: &GraphSpec, opts: &RenderOptions) -> String {
    let mut s = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str(&svg_body(&ensure_positioned(spec), opts, false));
    s
}

pub fn render_html(spec: &GraphSpec, opts: &RenderOptions) -> String {
    let spec = ensure_positioned(spec);
    let mut s =
        String::from("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    let _ = writeln!(s, "<title>{}</title>", xml_escape(&opts.title));
    s.push_str("<style>body{font-family:sans-serif;margin:1em}svg a:hover circle{fill:#f9d976}</style>\n</head>\n<body>\n");
    let _ = writeln!(s, "<h1>{}</h1>", xml_escape(&opts.title));
    let _ = writeln!(
        s,
        "<p>{}. Hover a circle for its record; circle area is proportional to {}.</p>",
        xml_escape(&caption(&spec)),
        spec.metric.as_str().to_uppercase()
    );
    if spec.nodes.is_empty() {
        s.push_str("<p class=\"empty\">No nodes meet the selection threshold.</p>\n");
    }
    s.push_str(&svg_body(&spec, opts, true));
    s.push_str("</body>\n</html>\n");
    s
}

pub fn render_dot(spec: &GraphSpec, opts: &RenderOptions) -> String {
    let mut s = String::from("digraph \"historiograph\" {\n");
    let _ = writeln!(
        s,
        "  graph [rankdir=\"TB\", label=\"{}\"];",
        dot_escape(&format!("{}: {}", opts.title, caption(spec)))
    );
    s.push_str("  node [shape=\"circle\", fixedsize=\"true\", fontsize=\"9\"];\n");
    if opts.arrowheads {
        s.push_str("  edge [dir=\"back\"];\n");
    } else {
        s.push_str("  edge [arrowhead=\"none\"];\n");
    }
    for (year, ids) in &spec.year_rows {
        let members = ids
            .iter()
            .map(|id| format!("\"{id}\";"))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            s,
            "  subgraph \"year_{year}\" {{ rank=\"same\"; {members} }}"
        );
    }
    for n in &spec.nodes {
        let _ = writeln!(
            s,
            "  \"{id}\" [label=\"{id}\", width=\"{w:.4}\", tooltip=\"{tip}\"];",
            id = n.id,
            w = 2.0 * n.radius / 72.0,
            tip = dot_escape(&n.tooltip())
        );
    }
    // Older (cited) node first so ranks flow downward in time.
    for &(citing, cited) in &spec.edges {
        let _ = writeln!(s, "  \"{cited}\" -> \"{citing}\";");
    }
    s.push_str("}\n");
    s
}

pub fn render(spec: &GraphSpec, format: Format, opts: &RenderOptions) -> String {
    match format {
        Format::Svg => render_svg(spec, opts),
        Format::Dot => render_dot(spec, opts),
        Format::Html => render_html(spec, opts),
    }
}

/// Parses the format name, then renders.
pub fn render_named(
    spec: &GraphSpec,
    format: &str,
    opts: &RenderOptions,
) -> Result<String, RenderError> {
    Ok(render(spec, format.parse()?, opts))
}

fn ensure_positioned(spec: &GraphSpec) -> GraphSpec {
    if spec.positioned {
        spec.clone()
    } else {
        layout(spec.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::BibRecord;
    use crate::network::build_network;

    fn net(edges: &[(i32, &[u32])]) -> CitationNetwork {
        let records = edges
            .iter()
            .enumerate()
            .map(|(i, (year, cites))| BibRecord {
                authors: vec![format!("N{} X", i + 1)],
                title: format!("Paper {}", i + 1),
                pub_year: *year,
                volume: Some("1".into()),
                begin_page: Some((i + 1).to_string()),
                cited_refs: cites
                    .iter()
                    .map(|&c| format!("N{c} X, {}, J, V1, P{c}", edges[c as usize - 1].0))
                    .collect(),
                ..Default::default()
            })
            .collect();
        build_network(records)
    }

    #[test]
    fn threshold_zero_keeps_everything() {
        let n = net(&[(1945, &[]), (1946, &[1]), (1947, &[1, 2])]);
        let spec = select_nodes(&n, 0, Metric::Lcs);
        assert_eq!(spec.nodes.len(), 3);
        assert_eq!(spec.edges.len(), n.edges.len());
    }

    #[test]
    fn threshold_filters_nodes_and_edges() {
        let n = net(&[(1945, &[]), (1946, &[1]), (1947, &[1, 2])]);
        let spec = select_nodes(&n, 1, Metric::Lcs);
        assert_eq!(spec.selected(), vec![NodeId(1), NodeId(2)]);
        assert_eq!(spec.edges, vec![(NodeId(2), NodeId(1))]);
        let empty = select_nodes(&n, 50, Metric::Lcs);
        assert!(empty.is_empty());
        assert_eq!(empty.warnings.len(), 1);
    }

    #[test]
    fn citer_sits_below_cited() {
        let n = net(&[(1945, &[]), (1946, &[1])]);
        let spec = layout(select_nodes(&n, 0, Metric::Lcs));
        let (a, b) = (spec.node(NodeId(1)).unwrap(), spec.node(NodeId(2)).unwrap());
        assert!(a.y < b.y);
        assert_eq!(a.x, b.x);
        let svg = render_svg(&spec, &RenderOptions::default());
        assert_eq!(svg.matches("<line ").count(), 1);
    }

    #[test]
    fn single_node_is_centered() {
        let n = net(&[(1950, &[])]);
        let spec = layout(select_nodes(&n, 0, Metric::Lcs));
        let node = &spec.nodes[0];
        assert!((node.x - spec.width / 2.0).abs() < 1e-9);
        assert!((node.y - spec.height / 2.0).abs() < 1e-9);
    }

    #[test]
    fn chain_bands_are_monotone() {
        let n = net(&[(1950, &[]), (1951, &[1]), (1952, &[2]), (1953, &[3])]);
        let spec = layout(select_nodes(&n, 0, Metric::Lcs));
        let ys: Vec<f64> = spec.nodes.iter().map(|n| n.y).collect();
        assert!(ys.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn same_band_circles_do_not_overlap() {
        let n = net(&[
            (1950, &[]),
            (1950, &[]),
            (1951, &[1, 2]),
            (1951, &[1, 2]),
            (1951, &[1]),
            (1951, &[2]),
        ]);
        let spec = layout(select_nodes(&n, 0, Metric::Lcs));
        for ids in spec.year_rows.values() {
            for w in ids.windows(2) {
                let (a, b) = (spec.node(w[0]).unwrap(), spec.node(w[1]).unwrap());
                assert!(b.x - a.x >= a.radius + b.radius + NODE_GAP - 1e-9);
            }
        }
    }

    #[test]
    fn radius_scaling_and_clamp() {
        assert_eq!(unclamped_radius(22, 22), R_MIN);
        let r = unclamped_radius(31, 22);
        assert!(((r / R_MIN).powi(2) - 31.0 / 22.0).abs() < 1e-12);
        assert_eq!(unclamped_radius(0, 5), R_MIN);
        // 1 citer vs 30 citers: 8*sqrt(30) > 40.
        let mut edges: Vec<(i32, Vec<u32>)> = vec![(1950, vec![]), (1950, vec![])];
        for i in 0..30 {
            edges.push((1960, if i == 0 { vec![1, 2] } else { vec![1] }));
        }
        let borrowed: Vec<(i32, &[u32])> = edges.iter().map(|(y, c)| (*y, c.as_slice())).collect();
        let spec = select_nodes(&net(&borrowed), 1, Metric::Lcs);
        let big = spec.node(NodeId(1)).unwrap();
        assert_eq!(big.radius, R_MAX);
        assert!(big.clamped);
        assert!(!spec.node(NodeId(2)).unwrap().clamped);
    }

    #[test]
    fn empty_spec_renders() {
        let n = net(&[(1950, &[])]);
        let spec = select_nodes(&n, 5, Metric::Lcs);
        for f in [Format::Svg, Format::Html, Format::Dot] {
            let doc = render(&spec, f, &RenderOptions::default());
            assert!(!doc.is_empty());
        }
        assert!(render_svg(&spec, &RenderOptions::default()).contains("No nodes meet"));
    }

    #[test]
    fn formats_parse() {
        assert_eq!("SVG".parse::<Format>(), Ok(Format::Svg));
        assert_eq!(
            "png".parse::<Format>(),
            Err(RenderError::UnknownFormat("png".into()))
        );
        let n = net(&[(1950, &[])]);
        let spec = select_nodes(&n, 0, Metric::Lcs);
        assert!(render_named(&spec, "pdf", &RenderOptions::default()).is_err());
        assert_eq!("gcs".parse::<Metric>(), Ok(Metric::Gcs));
    }

    #[test]
    fn html_links_and_arrowheads() {
        let n = net(&[(1945, &[]), (1946, &[1])]);
        let spec = layout(select_nodes(&n, 0, Metric::Lcs));
        let link = |id: NodeId| format!("../index-1.html#n{id}");
        let opts = RenderOptions {
            arrowheads: true,
            node_link: Some(&link),
            ..Default::default()
        };
        let html = render_html(&spec, &opts);
        assert!(html.contains(r#"<a href="../index-1.html#n2">"#));
        assert!(html.contains("marker-end"));
        let dot = render_dot(&spec, &opts);
        assert!(dot.contains("\"1\" -> \"2\";"));
        assert!(dot.contains("dir=\"back\""));
    }

    #[test]
    fn components_include_singletons() {
        let n = net(&[(1945, &[]), (1946, &[1]), (1947, &[])]);
        let spec = select_nodes(&n, 0, Metric::Lcs);
        assert_eq!(
            spec.components(),
            vec![vec![NodeId(1), NodeId(2)], vec![NodeId(3)]]
        );
    }
}
