//! Command-line surface: route, eval, search, combine, report, gen.
//!
//! Every verb loads and validates all of its inputs before computing, and
//! computes everything before writing any file.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::calibrate::{combine_with, grid_search_with, report, CombinationResult, SearchResult, WeightSchedule};
use crate::criteria::{CostModel, CriterionKind};
use crate::error::{Error, Result};
use crate::graph::IndoorGraph;
use crate::plot::{curve_csv, curve_svg};
use crate::router::plan_route_ids;
use crate::similarity::{CorpusEvaluator, RouteCorpus};
use crate::synth::{generate, SyntheticSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_UNREACHABLE: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub const COMBINATION_FILE: &str = "combination.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Parser)]
#[command(
    name = "prefroute",
    version,
    about = "Criterion-weighted indoor routing and weight calibration"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Graph JSON file.
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
    /// Route corpus JSON file.
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// Cost model JSON file.
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    /// Single criterion for an inline model (use with --weight).
    #[arg(long, global = true)]
    pub criterion: Option<String>,
    #[arg(long, global = true)]
    pub weight: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// fine_max,fine_step,coarse_max,coarse_step
    #[arg(long, global = true)]
    pub schedule: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan one route and print its penalty breakdown.
    Route { start: String, dest: String },
    /// Mean similarity and impacted fraction of a model on a corpus.
    Eval,
    /// Grid-search one criterion's weight, or all of them.
    Search {
        /// Criterion name or "all".
        target: String,
    },
    /// Combine search results found in --out and write the report.
    Combine,
    /// Print the report from search results and the combination in --out.
    Report,
    /// Generate a synthetic campus graph and corpus.
    Gen {
        /// Synthetic spec JSON; defaults are used for missing fields.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        records: Option<u32>,
        #[arg(long)]
        noise: Option<f64>,
    },
}

/// Parses `args` (including the program name), runs the command, and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => EXIT_IO,
        Error::Unreachable { .. } => EXIT_UNREACHABLE,
        _ => EXIT_VALIDATION,
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Route { start, dest } => cmd_route(cli, start, dest, out),
        Command::Eval => cmd_eval(cli, out),
        Command::Search { target } => cmd_search(cli, target, out),
        Command::Combine => cmd_combine(cli, out),
        Command::Report => cmd_report(cli, out),
        Command::Gen { spec, records, noise } => cmd_gen(cli, spec.as_deref(), *records, *noise, out),
    }
}

fn require<'a>(path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| Error::Validation(format!("missing required flag --{flag}")))
}

fn load_graph(cli: &Cli) -> Result<IndoorGraph> {
    IndoorGraph::load_path(require(&cli.graph, "graph")?)
}

fn load_corpus(cli: &Cli, g: &IndoorGraph) -> Result<RouteCorpus> {
    RouteCorpus::load_path(g, require(&cli.corpus, "corpus")?)
}

/// `--model`, or `--criterion` with `--weight`, or the empty model.
fn model_from_flags(cli: &Cli) -> Result<CostModel> {
    match (&cli.model, &cli.criterion, cli.weight) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => Err(Error::Validation(
            "--model cannot be combined with --criterion/--weight".into(),
        )),
        (Some(path), None, None) => CostModel::load_path(path),
        (None, Some(name), Some(w)) => CostModel::single(name.parse()?, w),
        (None, Some(_), None) => Err(Error::Validation("--criterion needs --weight".into())),
        (None, None, Some(_)) => Err(Error::Validation("--weight needs --criterion".into())),
        (None, None, None) => Ok(CostModel::empty()),
    }
}

fn schedule(cli: &Cli) -> Result<WeightSchedule> {
    match &cli.schedule {
        Some(s) => WeightSchedule::parse(s),
        None => Ok(WeightSchedule::default()),
    }
}

fn out_dir(cli: &Cli) -> &Path {
    cli.out.as_deref().unwrap_or(Path::new("."))
}

fn write_files(dir: &Path, files: &[(String, String)]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (name, contents) in files {
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn print(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

fn cmd_route(cli: &Cli, start: &str, dest: &str, out: &mut dyn Write) -> Result<()> {
    let g = load_graph(cli)?;
    let model = model_from_flags(cli)?;
    let route = plan_route_ids(&g, start, dest, &model)?.ok_or_else(|| Error::Unreachable {
        start: start.to_string(),
        dest: dest.to_string(),
    })?;
    let ids: Vec<&str> = route.ids(&g).into_iter().map(|id| id.as_str()).collect();
    let breakdown = route.penalty_breakdown(&g, &model);
    let text = if cli.format == Some(Format::Json) {
        let penalties: serde_json::Map<String, serde_json::Value> = breakdown
            .iter()
            .map(|(k, p)| (k.name().to_string(), json!(p)))
            .collect();
        let v = json!({
            "nodes": ids,
            "metric_length": route.metric_length,
            "weighted_cost": route.weighted_cost,
            "penalties": penalties,
        });
        format!("{}\n", serde_json::to_string_pretty(&v).expect("json value serializes"))
    } else {
        let mut s = format!(
            "route: {}\nmetric_length: {}\nweighted_cost: {}\n",
            ids.join(" -> "),
            route.metric_length,
            route.weighted_cost
        );
        if !breakdown.is_empty() {
            s.push_str("penalties:\n");
            for (k, p) in &breakdown {
                s.push_str(&format!("  {}: {}\n", k.name(), p));
            }
        }
        s
    };
    print(out, &text)
}

fn cmd_eval(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let g = load_graph(cli)?;
    let corpus = load_corpus(cli, &g)?;
    let model = model_from_flags(cli)?;
    let eval = CorpusEvaluator::new(&g, &corpus)?.evaluate(&model)?;
    let unreachable: Vec<usize> = eval.score.unreachable.clone();
    let text = if cli.format == Some(Format::Json) {
        let v = json!({
            "records": corpus.len(),
            "mean_similarity": eval.score.mean.value(),
            "impacted": eval.impacted,
            "unreachable": unreachable,
        });
        format!("{}\n", serde_json::to_string_pretty(&v).expect("json value serializes"))
    } else {
        format!(
            "records: {}\nmean_similarity: {}\nimpacted: {}\nunreachable: {}\n",
            corpus.len(),
            eval.score.mean.value(),
            eval.impacted,
            unreachable.len()
        )
    };
    print(out, &text)
}

fn search_targets(target: &str) -> Result<Vec<CriterionKind>> {
    if target == "all" {
        Ok(CriterionKind::ALL.to_vec())
    } else {
        Ok(vec![target.parse()?])
    }
}

fn cmd_search(cli: &Cli, target: &str, out: &mut dyn Write) -> Result<()> {
    let kinds = search_targets(target)?;
    let schedule = schedule(cli)?;
    schedule.validate()?;
    let g = load_graph(cli)?;
    let corpus = load_corpus(cli, &g)?;
    let eval = CorpusEvaluator::new(&g, &corpus)?;
    let results = kinds
        .iter()
        .map(|&k| grid_search_with(&eval, k, &schedule))
        .collect::<Result<Vec<_>>>()?;

    let mut files = Vec::new();
    let mut summary = String::new();
    for r in &results {
        let name = r.kind.name();
        files.push((format!("{name}.json"), format!("{}\n", r.to_json_string())));
        files.push((format!("{name}.csv"), curve_csv(r)));
        if cli.format == Some(Format::Svg) {
            files.push((format!("{name}.svg"), curve_svg(r)));
        }
        summary.push_str(&format!(
            "{name}: best_w={}{} best_sim={:.6} baseline={:.6} improved={} points={}\n",
            r.best_w,
            if r.unbounded { "+" } else { "" },
            r.best_sim.value(),
            r.baseline_sim.value(),
            r.improved,
            r.curve.len()
        ));
    }
    write_files(out_dir(cli), &files)?;
    print(out, &summary)
}

/// Reads every `<criterion>.json` present in `dir`.
pub fn load_results(dir: &Path) -> Result<Vec<SearchResult>> {
    let mut results = Vec::new();
    for kind in CriterionKind::ALL {
        let path = dir.join(format!("{}.json", kind.name()));
        if !path.exists() {
            continue;
        }
        let r = SearchResult::from_json_str(&read_file(&path)?)?;
        if r.kind != kind {
            return Err(Error::Validation(format!(
                "{} holds a result for {}",
                path.display(),
                r.kind
            )));
        }
        results.push(r);
    }
    if results.is_empty() {
        return Err(Error::Validation(format!("no search results in {}", dir.display())));
    }
    Ok(results)
}

fn cmd_combine(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let dir = out_dir(cli);
    let g = load_graph(cli)?;
    let corpus = load_corpus(cli, &g)?;
    let results = load_results(dir)?;
    let eval = CorpusEvaluator::new(&g, &corpus)?;
    let combo = combine_with(&eval, &results)?;
    let table = report(&results, &combo);
    let text = table.render_text();
    write_files(
        dir,
        &[
            (COMBINATION_FILE.to_string(), format!("{}\n", combo.to_json_string())),
            ("report.txt".to_string(), text.clone()),
            ("report.csv".to_string(), table.render_csv()),
        ],
    )?;
    print(out, &text)
}

fn cmd_report(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let dir = out_dir(cli);
    let results = load_results(dir)?;
    let combo = CombinationResult::from_json_str(&read_file(&dir.join(COMBINATION_FILE))?)?;
    let table = report(&results, &combo);
    let text = match cli.format {
        Some(Format::Csv) => table.render_csv(),
        _ => table.render_text(),
    };
    print(out, &text)
}

fn cmd_gen(
    cli: &Cli,
    spec_path: Option<&Path>,
    records: Option<u32>,
    noise: Option<f64>,
    out: &mut dyn Write,
) -> Result<()> {
    let mut spec = match spec_path {
        Some(p) => serde_json::from_str::<SyntheticSpec>(&read_file(p)?)?,
        None => SyntheticSpec::default(),
    };
    if cli.model.is_some() || cli.criterion.is_some() || cli.weight.is_some() {
        spec = spec.with_planted(&model_from_flags(cli)?);
    }
    if let Some(n) = records {
        spec.records = n;
    }
    if let Some(p) = noise {
        spec.noise = p;
    }
    let syn = generate(&spec, cli.seed)?;
    write_files(
        out_dir(cli),
        &[
            ("graph.json".to_string(), format!("{}\n", syn.graph.to_json_string())),
            (
                "corpus.json".to_string(),
                format!("{}\n", syn.corpus.to_json_string(&syn.graph)),
            ),
        ],
    )?;
    print(
        out,
        &format!(
            "generated {} nodes, {} edges, {} records\n",
            syn.graph.node_count(),
            syn.graph.edge_count(),
            syn.corpus.len()
        ),
    )
}
