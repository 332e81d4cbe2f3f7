use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dufs::config::{ConfigFile, GenerateSpec, GraphSection, LabelChoice, RunLayer, RunSpec};
use dufs::error::{CliError, Result};
use dufs::experiment::{
    analytic_rows, calibrate_durw_jump_weight, estimate_log, load_graph, run_experiment, run_grid, worker_pool,
    write_experiment, write_grid, GraphInfo, CALIBRATION_RUNS, VERSION,
};
use dufs::io::{graph_hash, load_snap_edgelist, save_edgelist};
use dufs::output::{estimates_table, nrmse_plotspec, opt, LabelFormat, OutputDir, Table};
use dufs::samplelog::read_log;
use dufs_core::estimate::EstimatorId;
use dufs_core::walk::Method;
use dufs_core::LabelKind;

#[derive(Parser)]
#[command(name = "dufs", version, about = "Random-walk sampling of directed graphs and label distribution estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load an edge list and print its size and content hash.
    Load {
        path: PathBuf,
        #[arg(long)]
        symmetrize: bool,
        #[arg(long)]
        attributes: Option<PathBuf>,
        /// Write the parsed graph back as a clean edge list.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract the largest strongly connected component.
    Lcc {
        path: PathBuf,
        #[arg(long)]
        symmetrize: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a directed configuration-model graph with power-law degrees.
    Gen {
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 2.0)]
        exponent: f64,
        #[arg(long)]
        max_degree: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        symmetrize: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run R replications of one configuration.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        run: RunFlags,
        #[command(flatten)]
        exec: ExecArgs,
        /// Keep every run's sample log under logs/.
        #[arg(long)]
        save_logs: bool,
    },
    /// Run every [[runs]] entry of a config and compare them.
    Grid {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        run: RunFlags,
        #[command(flatten)]
        exec: ExecArgs,
        /// Configuration the ratio column is relative to.
        #[arg(long)]
        baseline: Option<String>,
        /// Add a DURW configuration whose jump weight matches the named
        /// configuration's mean number of uniform draws.
        #[arg(long, value_name = "NAME")]
        match_durw: Option<String>,
        #[arg(long, default_value_t = CALIBRATION_RUNS)]
        calibration_runs: usize,
    },
    /// Closed-form NRMSE of uniform node and edge sampling on a graph.
    Analytic {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        run: RunFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-estimate from a stored sample log.
    Replay {
        log: PathBuf,
        #[arg(long, default_value = "hybrid")]
        estimator: String,
        #[arg(long, default_value = "out-degree")]
        label: String,
        /// Degree threshold for label = top-attribute.
        #[arg(long)]
        threshold: Option<u32>,
        /// Mean degree for the mvue estimator.
        #[arg(long)]
        mean_degree: Option<f64>,
        /// Output CSV (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Default)]
struct GraphArgs {
    /// SNAP edge list.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Synthetic graph, e.g. "nodes=1000,exponent=2,max_degree=100,seed=1".
    #[arg(long, value_name = "SPEC")]
    generate: Option<String>,
    #[arg(long)]
    symmetrize: bool,
    /// Restrict to the largest strongly connected component.
    #[arg(long)]
    lcc: bool,
    #[arg(long)]
    attributes: Option<PathBuf>,
}

impl GraphArgs {
    fn apply(&self, mut section: GraphSection) -> Result<GraphSection> {
        if let Some(p) = &self.graph {
            section.path = Some(p.clone());
            section.generate = None;
        }
        if let Some(spec) = &self.generate {
            section.generate = Some(parse_generate(spec)?);
            section.path = None;
        }
        section.symmetrize |= self.symmetrize;
        section.lcc |= self.lcc;
        if let Some(a) = &self.attributes {
            section.attributes = Some(a.clone());
        }
        Ok(section)
    }
}

fn parse_generate(spec: &str) -> Result<GenerateSpec> {
    let mut g = GenerateSpec { nodes: 0, exponent: 2.0, max_degree: 0, seed: 0 };
    for part in spec.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| CliError::Config(format!("--generate: '{part}' is not key=value")))?;
        let bad = || CliError::Config(format!("--generate: bad value for {k}"));
        match k.trim() {
            "nodes" => g.nodes = v.parse().map_err(|_| bad())?,
            "exponent" => g.exponent = v.parse().map_err(|_| bad())?,
            "max_degree" => g.max_degree = v.parse().map_err(|_| bad())?,
            "seed" => g.seed = v.parse().map_err(|_| bad())?,
            _ => return Err(CliError::Config(format!("--generate: unknown key '{k}'"))),
        }
    }
    Ok(g)
}

#[derive(Args, Default)]
struct RunFlags {
    #[arg(long)]
    name: Option<String>,
    /// Named parameter preset, e.g. table2-head-c1-visible.
    #[arg(long)]
    preset: Option<String>,
    /// dufs, fs, durw, single-rw, multi-rw or uniform-node.
    #[arg(long)]
    method: Option<String>,
    /// edge, hybrid, hybrid-norule, hybrid-mle, hybrid-em or mvue.
    #[arg(long)]
    estimator: Option<String>,
    /// visible or invisible.
    #[arg(long)]
    scenario: Option<String>,
    /// uniform, prop or inv.
    #[arg(long)]
    placement: Option<String>,
    /// out-degree, in-degree, degree, joint, attribute or top-attribute.
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    budget_fraction: Option<f64>,
    /// Absolute budget B; overrides --budget-fraction.
    #[arg(long)]
    budget: Option<u64>,
    /// Average budget per walker.
    #[arg(short = 'b', long = "per-walker-budget")]
    b: Option<u64>,
    /// Cost of one uniform node draw.
    #[arg(short = 'c', long = "cost")]
    c: Option<u64>,
    /// Random jump weight.
    #[arg(short = 'w', long = "jump-weight")]
    w: Option<f64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    step_limit: Option<u64>,
    #[arg(long)]
    top_fraction: Option<f64>,
}

impl RunFlags {
    fn layer(&self) -> RunLayer {
        RunLayer {
            name: self.name.clone(),
            preset: self.preset.clone(),
            method: self.method.clone(),
            estimator: self.estimator.clone(),
            scenario: self.scenario.clone(),
            placement: self.placement.clone(),
            label: self.label.clone(),
            budget_fraction: self.budget_fraction,
            budget: self.budget,
            b: self.b,
            c: self.c,
            w: self.w,
            runs: self.runs,
            seed: self.seed,
            step_limit: self.step_limit,
            top_fraction: self.top_fraction,
        }
    }
}

#[derive(Args)]
struct ExecArgs {
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: one per core). Does not affect results.
    #[arg(long)]
    workers: Option<usize>,
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile> {
    path.map(ConfigFile::load).transpose().map(Option::unwrap_or_default)
}

fn load(section: &GraphSection) -> Result<dufs_core::DirectedGraph> {
    let (g, skipped) = load_graph(section)?;
    if skipped > 0 {
        eprintln!("dufs: {skipped} attribute entries name nodes outside the graph and were skipped");
    }
    Ok(g)
}

fn out_dir(exec: &ExecArgs, file: &ConfigFile) -> PathBuf {
    exec.out.clone().or_else(|| file.output.clone()).unwrap_or_else(|| PathBuf::from("dufs-out"))
}

fn cmd_run(config: Option<PathBuf>, graph: GraphArgs, run: RunFlags, exec: ExecArgs, save_logs: bool) -> Result<()> {
    let file = load_config(config.as_deref())?;
    let spec = RunSpec::resolve(&[&file.run, &run.layer()])?;
    let section = graph.apply(file.graph.clone())?;
    section.validate()?;
    let g = load(&section)?;
    let pool = worker_pool(exec.workers.or(file.workers))?;
    let exp = run_experiment(&g, &spec, &pool, save_logs)?;
    let dir = out_dir(&exec, &file);
    let mut out = OutputDir::create(&dir)?;
    let written = write_experiment(&exp, &g, &section, &mut out);
    let failures = exp.failures();
    for f in &failures {
        eprintln!("dufs: run {} (seed {}) failed: {}", f.run, f.seed, f.error);
    }
    written?;
    let mean = exp.nrmse().ok().and_then(|(r, _)| r.mean());
    println!(
        "{} of {} runs completed; mean NRMSE {}; results in {}",
        spec.runs - failures.len(),
        spec.runs,
        opt(mean),
        dir.display()
    );
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Data(format!("{} runs failed; see manifest.json", failures.len())))
    }
}

fn cmd_grid(
    config: PathBuf,
    graph: GraphArgs,
    run: RunFlags,
    exec: ExecArgs,
    baseline: Option<String>,
    match_durw: Option<String>,
    calibration_runs: usize,
) -> Result<()> {
    let file = load_config(Some(&config))?;
    let flags = run.layer();
    let entries = if file.runs.is_empty() { vec![RunLayer::default()] } else { file.runs.clone() };
    let mut specs = entries
        .iter()
        .enumerate()
        .map(|(i, entry)| {
            let mut spec = RunSpec::resolve(&[&file.run, entry, &flags])?;
            if entry.name.is_none() && flags.name.is_none() && file.run.name.is_none() {
                spec.name = format!("config-{i}");
            }
            Ok(spec)
        })
        .collect::<Result<Vec<_>>>()?;
    let section = graph.apply(file.graph.clone())?;
    section.validate()?;
    let g = load(&section)?;
    let pool = worker_pool(exec.workers.or(file.workers))?;
    let calibration = match &match_durw {
        None => None,
        Some(name) => {
            let reference = specs
                .iter()
                .find(|s| &s.name == name)
                .ok_or_else(|| CliError::Config(format!("--match-durw: no configuration named '{name}'")))?;
            let c = calibrate_durw_jump_weight(&g, reference, calibration_runs.max(1), &pool)?;
            if !c.within_tolerance {
                eprintln!(
                    "dufs: DURW calibration ended at w' = {} with {} uniform draws against {}",
                    c.jump_weight, c.achieved_draws, c.target_draws
                );
            }
            let matched = RunSpec {
                name: format!("durw-matched-{name}"),
                method: Method::Durw,
                w: c.jump_weight,
                ..reference.clone()
            };
            specs.push(matched);
            Some(c)
        }
    };
    let mut grid = run_grid(&g, &specs, baseline.as_deref().or(file.baseline.as_deref()), &pool)?;
    grid.calibration = calibration;
    let dir = out_dir(&exec, &file);
    let mut out = OutputDir::create(&dir)?;
    write_grid(&grid, &g, &section, &mut out)?;
    let failed: usize = grid.experiments.iter().map(|e| e.failures().len()).sum();
    println!("{} configurations; results in {}", grid.experiments.len(), dir.display());
    if failed > 0 {
        return Err(CliError::Data(format!("{failed} runs failed; see manifest.json")));
    }
    Ok(())
}

fn cmd_analytic(config: Option<PathBuf>, graph: GraphArgs, run: RunFlags, out: Option<PathBuf>) -> Result<()> {
    let file = load_config(config.as_deref())?;
    let spec = RunSpec::resolve(&[&file.run, &run.layer()])?;
    let section = graph.apply(file.graph.clone())?;
    section.validate()?;
    let g = load(&section)?;
    spec.check_graph(&g)?;
    let kind = spec.label_kind(&g)?;
    let truth = g.ground_truth(kind)?;
    let budget = spec.budget_for(g.node_count()) as f64;
    let rows = analytic_rows(&truth, budget, spec.c as f64)?;
    let fmt = LabelFormat::for_graph(kind, &g);
    let mut headers: Vec<&str> = fmt.headers().to_vec();
    headers.extend_from_slice(&["truth", "node_sampling_nrmse", "edge_sampling_nrmse"]);
    let mut table = Table::new(&headers);
    for r in &rows {
        let mut row = fmt.fields(&r.label);
        row.extend([r.truth.to_string(), opt(r.node_sampling), opt(r.edge_sampling)]);
        table.row(&row);
    }
    let dir = out.or(file.output).unwrap_or_else(|| PathBuf::from("dufs-out"));
    let mut out = OutputDir::create(&dir)?;
    out.write("analytic.csv", &table.into_bytes())?;
    out.write_json(
        "plotspec.json",
        &nrmse_plotspec("analytic.csv", kind, &["node_sampling_nrmse", "edge_sampling_nrmse"], None),
    )?;
    #[derive(serde::Serialize)]
    struct AnalyticManifest<'a> {
        tool: &'static str,
        version: &'static str,
        command: &'static str,
        graph: GraphInfo,
        label: &'a str,
        budget: f64,
        uniform_cost: u64,
        powerlaw_exponent: Option<f64>,
        files: &'a std::collections::BTreeMap<String, String>,
    }
    let fit = dufs_core::analysis::fit_powerlaw(&truth);
    out.write_unlisted_json(
        "manifest.json",
        &AnalyticManifest {
            tool: "dufs",
            version: VERSION,
            command: "analytic",
            graph: GraphInfo::new(&section, &g),
            label: spec.label.as_str(),
            budget,
            uniform_cost: spec.c,
            powerlaw_exponent: fit.map(|f| f.exponent),
            files: &out.files,
        },
    )?;
    if let Some(f) = fit {
        println!("fitted power-law exponent {}", f.exponent);
    }
    println!("{} labels; results in {}", rows.len(), dir.display());
    Ok(())
}

fn cmd_replay(
    log: PathBuf,
    estimator: String,
    label: String,
    threshold: Option<u32>,
    mean_degree: Option<f64>,
    out: Option<PathBuf>,
) -> Result<()> {
    let estimator: EstimatorId = estimator.parse()?;
    let label: LabelChoice = label.parse()?;
    let kind = match label {
        LabelChoice::OutDegree => LabelKind::OutDegree,
        LabelChoice::InDegree => LabelKind::InDegree,
        LabelChoice::Degree => LabelKind::Degree,
        LabelChoice::Joint => LabelKind::Joint,
        LabelChoice::Attribute => LabelKind::Attribute,
        LabelChoice::TopAttribute => LabelKind::TopAttribute {
            threshold: threshold.ok_or_else(|| CliError::Config("top-attribute replay needs --threshold".into()))?,
        },
    };
    if estimator == EstimatorId::Mvue && mean_degree.is_none() {
        return Err(CliError::Config("mvue replay needs --mean-degree".into()));
    }
    let file = std::fs::File::open(&log).map_err(|e| CliError::io(&log, e))?;
    let (sample_log, names) = read_log(std::io::BufReader::new(file))?;
    sample_log.audit().map_err(|e| CliError::Data(format!("{}: {e}", log.display())))?;
    let est = estimate_log(&sample_log, kind, estimator, mean_degree)?;
    let bytes = estimates_table(&[(0, sample_log.seed, &est)], &LabelFormat::new(kind, &names)).into_bytes();
    match out {
        Some(path) => std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e)),
        None => std::io::stdout().write_all(&bytes).map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn print_graph(g: &dufs_core::DirectedGraph) {
    println!("nodes {}", g.node_count());
    println!("edges {}", g.edge_count());
    println!("symmetric {}", g.is_symmetric());
    println!("attributes {}", g.attribute_names().len());
    println!("sha256 {}", graph_hash(g));
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Load { path, symmetrize, attributes, out } => {
            let section = GraphSection { path: Some(path), symmetrize, attributes, ..Default::default() };
            let g = load(&section)?;
            print_graph(&g);
            if let Some(out) = out {
                save_edgelist(&g, &out)?;
            }
            Ok(())
        }
        Command::Lcc { path, symmetrize, out } => {
            let g = load_snap_edgelist(&path, symmetrize)?.largest_scc();
            print_graph(&g);
            save_edgelist(&g, &out)
        }
        Command::Gen { nodes, exponent, max_degree, seed, symmetrize, out } => {
            let section = GraphSection {
                generate: Some(GenerateSpec { nodes, exponent, max_degree, seed }),
                symmetrize,
                ..Default::default()
            };
            let g = load(&section)?;
            print_graph(&g);
            save_edgelist(&g, &out)
        }
        Command::Run { config, graph, run, exec, save_logs } => cmd_run(config, graph, run, exec, save_logs),
        Command::Grid { config, graph, run, exec, baseline, match_durw, calibration_runs } => {
            cmd_grid(config, graph, run, exec, baseline, match_durw, calibration_runs)
        }
        Command::Analytic { config, graph, run, out } => cmd_analytic(config, graph, run, out),
        Command::Replay { log, estimator, label, threshold, mean_degree, out } => {
            cmd_replay(log, estimator, label, threshold, mean_degree, out)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dufs: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
