//! Command-line front end. [`run`] takes the arguments and the two output
//! streams and returns the process exit code: 0 on success, 1 for input errors
//! (flags, files, syntax, schema, invalid graphs), 2 for internal failures.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;

use crate::config::{ConfigOverrides, LayoutConfig};
use crate::crossmin::{CrossMinStrategy, DummyRule, PortPolicy};
use crate::cycles::CycleBreakStrategy;
use crate::geometry::{emit_layout_json, emit_svg, SvgOptions};
use crate::graph::{Direction, Graph};
use crate::ingest::{dsl_to_graph, parse_dsl, parse_json_graph_with, InputKind, SchemaMode};
use crate::metrics::{shared_ids, stability_distance, MetricsReport};
use crate::pipeline::{layout, Layout, LayoutError};

fn enum_parser<T>(parse: fn(&str) -> Option<T>, allowed: &'static str) -> impl Fn(&str) -> Result<T, String> + Clone {
    move |s| parse(s).ok_or_else(|| format!("expected one of {allowed}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum MetricsFormat {
    Table,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "layout", version, about = "Layered graph layout steered by model order")]
pub struct Args {
    /// Input files: `.chart` statecharts or `.json` graphs (two with --stability).
    #[arg(required = true, num_args = 1..=2)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_parser = enum_parser(CycleBreakStrategy::parse, "greedy, depth-first-mo, strict-mo, scc-mo"))]
    pub cycle_breaking: Option<CycleBreakStrategy>,
    #[arg(long, value_parser = enum_parser(CrossMinStrategy::parse, "barycenter, barycenter-mo, strict-mo"))]
    pub crossing_min: Option<CrossMinStrategy>,
    #[arg(long = "port-order", value_parser = enum_parser(PortPolicy::parse, "derived, fixed"))]
    pub port_policy: Option<PortPolicy>,
    #[arg(long, value_parser = enum_parser(DummyRule::parse, "first, all"))]
    pub dummy_rule: Option<DummyRule>,
    #[arg(long, value_name = "true|false")]
    pub group_restricted: Option<bool>,
    #[arg(long, value_parser = enum_parser(Direction::parse, "right, down"))]
    pub direction: Option<Direction>,
    #[arg(long)]
    pub node_spacing: Option<f64>,
    #[arg(long)]
    pub layer_spacing: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// TOML file with any subset of the configuration; flags take precedence.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Print crossings, backward edges, inversions and layer count.
    #[arg(long)]
    pub metrics: bool,
    #[arg(long, value_enum, default_value = "table")]
    pub metrics_format: MetricsFormat,
    /// Compare the layouts of two inputs.
    #[arg(long)]
    pub stability: bool,
    /// Print every phase's intermediate result.
    #[arg(long)]
    pub explain: bool,
    /// Reject unknown JSON fields instead of warning.
    #[arg(long)]
    pub strict_schema: bool,
}

impl Args {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            cycle_breaking: self.cycle_breaking,
            crossing_min: self.crossing_min,
            group_restricted: self.group_restricted,
            port_policy: self.port_policy,
            dummy_rule: self.dummy_rule,
            direction: self.direction,
            node_spacing: self.node_spacing,
            layer_spacing: self.layer_spacing,
            seed: self.seed,
            classification: None,
        }
    }
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<LayoutError> for Failure {
    fn from(e: LayoutError) -> Self {
        match e {
            LayoutError::Invalid(_) => Failure::Input(e.to_string()),
            LayoutError::Internal(_) => Failure::Internal(e.to_string()),
        }
    }
}

/// Reads and converts one input file.
pub fn load_graph(path: &Path, strict: bool, warnings: &mut Vec<String>) -> Result<(Graph, InputKind), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let kind = InputKind::detect(path, &text);
    let graph = match kind {
        InputKind::Dsl => {
            let model = parse_dsl(&text).map_err(|e| format!("{}:{e}", path.display()))?;
            dsl_to_graph(&model).map_err(|e| format!("{}:{e}", path.display()))?
        }
        InputKind::Json => {
            let mode = if strict { SchemaMode::Strict } else { SchemaMode::Lenient };
            let parsed = parse_json_graph_with(&text, mode).map_err(|e| format!("{}:{e}", path.display()))?;
            warnings.extend(parsed.warnings.into_iter().map(|w| format!("{}: {w}", path.display())));
            parsed.graph
        }
    };
    Ok((graph, kind))
}

struct Outputs {
    files: Vec<(PathBuf, String)>,
    stdout: String,
}

fn execute(args: &Args, stderr: &mut dyn Write) -> Result<Outputs, Failure> {
    if args.inputs.len() == 2 && !args.stability {
        return Err(Failure::Input("two inputs are only accepted with --stability".into()));
    }
    if args.stability && args.inputs.len() != 2 {
        return Err(Failure::Input("--stability needs exactly two inputs".into()));
    }
    let file_overrides = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            Some(ConfigOverrides::from_toml(&text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?)
        }
        None => None,
    };
    let flags = args.overrides();

    let mut layouts: Vec<Layout> = Vec::new();
    for path in &args.inputs {
        let mut warnings = Vec::new();
        let (graph, kind) = load_graph(path, args.strict_schema, &mut warnings).map_err(Failure::Input)?;
        for w in warnings {
            let _ = writeln!(stderr, "warning: {w}");
        }
        let mut config = LayoutConfig::for_input(kind);
        if let Some(o) = &file_overrides {
            config.apply(o);
        }
        config.apply(&flags);
        layouts.push(layout(&graph, &config)?);
    }

    let first = &layouts[0];
    let mut out = Outputs { files: Vec::new(), stdout: String::new() };
    if let Some(p) = &args.svg {
        out.files.push((p.clone(), emit_svg(&first.result, &SvgOptions::default())));
    }
    if let Some(p) = &args.json {
        out.files.push((p.clone(), emit_layout_json(&first.graph, &first.result)));
    }
    if args.explain {
        for (path, l) in args.inputs.iter().zip(&layouts) {
            if layouts.len() > 1 {
                out.stdout.push_str(&format!("# {}\n", path.display()));
            }
            out.stdout.push_str(&l.trace().render());
        }
    }
    let format = |r: &MetricsReport| match args.metrics_format {
        MetricsFormat::Table => r.to_table(),
        MetricsFormat::Json => r.to_json() + "\n",
    };
    if args.stability {
        let (a, b) = (&layouts[0].result, &layouts[1].result);
        let mut report = layouts[1].metrics();
        report.stability_distance = stability_distance(a, b, &shared_ids(a, b));
        if report.stability_distance.is_none() {
            let _ = writeln!(stderr, "warning: the two inputs share no node ids; stability is undefined");
        }
        out.stdout.push_str(&format(&report));
    } else if args.metrics {
        out.stdout.push_str(&format(&first.metrics()));
    }
    Ok(out)
}

/// Parses `argv` (program name first), runs the pipeline and writes outputs.
/// Nothing is written unless every requested output could be computed.
pub fn run<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    1
                }
            };
        }
    };
    match execute(&args, stderr) {
        Ok(out) => {
            for (path, text) in &out.files {
                if let Err(e) = std::fs::write(path, text) {
                    let _ = writeln!(stderr, "error: {}: {e}", path.display());
                    return 1;
                }
            }
            let _ = stdout.write_all(out.stdout.as_bytes());
            0
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
        Err(Failure::Internal(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
    }
}
