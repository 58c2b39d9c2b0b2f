use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use histograph::linkage;
use histograph::network::{page_count, NodeId};
use histograph::qc;
use histograph::rankings::{self, AuthorSort};
use histograph::report::{self, ConfigLayer, RunConfig};

#[derive(Parser)]
#[command(
    name = "histograph",
    version,
    about = "Citation network analysis of tagged bibliographic exports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the full HTML/SVG/JSON/CSV report bundle.
    Analyze(Common),
    /// Write only the historiograph files.
    Graph(Common),
    /// Print the ranked author list as CSV.
    Authors {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "tlcs")]
        sort: AuthorSort,
    },
    /// Print references that match no node, most cited first.
    Outer(Common),
    /// Print references that may point at a node despite not matching it.
    Missing(Common),
    /// Print one page of the citation matrix.
    Matrix {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        page: usize,
    },
    /// Print the reference levels and citation chains of one node.
    Levels {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        node: u32,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
}

#[derive(Args)]
struct Common {
    /// Export files to read.
    #[arg(short, long = "input", num_args = 1.., value_name = "FILE")]
    inputs: Vec<PathBuf>,
    #[arg(short, long = "output", value_name = "DIR")]
    output_dir: Option<PathBuf>,
    /// Keep historiograph nodes whose metric is at least N.
    #[arg(long, value_name = "N")]
    min_lcs: Option<u32>,
    #[arg(long, value_name = "lcs|gcs")]
    metric: Option<String>,
    #[arg(long, value_name = "N")]
    page_size: Option<usize>,
    #[arg(long, value_name = "N")]
    top_outer: Option<usize>,
    /// Comma-separated subset of svg,dot,html,json,csv.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    format: Vec<String>,
    /// External lookup link for outer references; `{key}` is substituted.
    #[arg(long, value_name = "TMPL")]
    lookup_url: Option<String>,
    #[arg(long, value_name = "FILE")]
    stopwords: Option<PathBuf>,
    /// Draw arrowheads on historiograph edges.
    #[arg(long)]
    arrowheads: bool,
    /// TOML file with the same keys as the long flags.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

impl Common {
    fn resolve(self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(p) => ConfigLayer::load(p)?,
            None => ConfigLayer::default(),
        };
        let cli = ConfigLayer {
            inputs: Some(self.inputs),
            output_dir: self.output_dir,
            min_lcs: self.min_lcs,
            metric: self.metric,
            page_size: self.page_size,
            top_outer: self.top_outer,
            formats: Some(self.format),
            lookup_url: self.lookup_url,
            stopwords: self.stopwords,
            arrowheads: self.arrowheads.then_some(true),
        };
        let config = RunConfig::resolve(cli, file)?;
        if config.input_paths.is_empty() {
            bail!("no input files (use -i FILE or `inputs` in the config file)");
        }
        Ok(config)
    }
}

fn load(common: Common) -> Result<(RunConfig, histograph::network::CitationNetwork, Vec<String>)> {
    let config = common.resolve()?;
    let (net, warnings) = report::load_network(&config)?;
    Ok((config, net, warnings))
}

fn warn_all(warnings: &[String]) {
    let mut err = io::stderr().lock();
    for w in warnings {
        let _ = writeln!(err, "{w}");
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Analyze(common) => {
            let (config, net, warnings) = load(common)?;
            let summary = report::write_bundle(&net, &config, &warnings)?;
            warn_all(&summary.warnings);
            eprintln!(
                "wrote {} files to {} ({} nodes, {} warnings)",
                summary.files.len(),
                config.output_dir.display(),
                net.len(),
                summary.warnings.len()
            );
        }
        Command::Graph(common) => {
            let (config, net, warnings) = load(common)?;
            warn_all(&warnings);
            let summary = report::write_graph(&net, &config)?;
            warn_all(&summary.warnings);
            for f in &summary.files {
                writeln!(out, "{}", config.output_dir.join(f).display())?;
            }
        }
        Command::Authors { common, sort } => {
            let (_, net, warnings) = load(common)?;
            warn_all(&warnings);
            rankings::write_authors_csv(&rankings::rank_authors(&net, sort), &mut out)?;
        }
        Command::Outer(common) => {
            let (config, net, warnings) = load(common)?;
            warn_all(&warnings);
            write!(
                out,
                "{}",
                qc::render_outer_text(&qc::outer_references(&net, config.top_outer))
            )?;
        }
        Command::Missing(common) => {
            let (_, net, warnings) = load(common)?;
            warn_all(&warnings);
            write!(
                out,
                "{}",
                qc::render_missing_text(&net, &qc::missing_links(&net))
            )?;
        }
        Command::Matrix { common, page } => {
            let (config, net, warnings) = load(common)?;
            warn_all(&warnings);
            let rows = net.matrix_rows(page, config.page_size).with_context(|| {
                format!(
                    "{} pages available",
                    page_count(net.len(), config.page_size)
                )
            })?;
            writeln!(out, "cited_nodes\tcount\tnode\tgcs\tlcs\tciting_nodes")?;
            for r in rows {
                writeln!(out, "{}", r.to_text())?;
            }
        }
        Command::Levels {
            common,
            node,
            depth,
        } => {
            let (_, net, warnings) = load(common)?;
            warn_all(&warnings);
            let origin = NodeId(node);
            let levels = linkage::reference_levels(&net, origin, depth)?;
            for (k, level) in levels.levels.iter().enumerate() {
                let ids: Vec<String> = level.iter().map(|n| n.to_string()).collect();
                writeln!(out, "level {k}: {}", ids.join(" "))?;
            }
            writeln!(out)?;
            write!(
                out,
                "{}",
                linkage::render_paths(&linkage::citation_paths(&net, origin, depth + 1)?)
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
