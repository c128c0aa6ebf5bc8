use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mecplace::centrality::{
    select_sites_random, RankingMetric, SiteSelection, SiteSelector, DEFAULT_D_MAX_MS,
};
use mecplace::harness::{
    emit_fig2_table, run_experiment, write_coverage_csv, write_outputs, ExperimentPlan,
};
use mecplace::model::{
    check_feasibility, equal_mix, generate_requests, load_requests, save_requests, Config,
    Instance, Solution,
};
use mecplace::solvers::{solve, ExactLimits, SaParams, SolveReport, SolverKind};
use mecplace::survivability::single_failure_report;
use mecplace::topology::{all_pairs_delay, parse_sndlib, NodeId, Topology};

#[derive(Parser)]
#[command(
    name = "mecplace",
    version,
    about = "MEC site selection and survivable VNF placement"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Choose MEC sites by closeness centrality or at random.
    Select(SelectArgs),
    /// Draw a batch of service requests.
    Generate(GenerateArgs),
    /// Place a request batch with one solver.
    Solve(SolveArgs),
    /// Check a solution and replay every single failure against it.
    Verify(VerifyArgs),
    /// Run an experiment plan.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Cc,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Ranking {
    Hops,
    Delay,
}

impl From<Ranking> for RankingMetric {
    fn from(r: Ranking) -> Self {
        match r {
            Ranking::Hops => RankingMetric::Hops,
            Ranking::Delay => RankingMetric::Delay,
        }
    }
}

#[derive(Args)]
struct NetworkArgs {
    /// SNDlib native file (default: bundled germany50).
    #[arg(long)]
    topology: Option<PathBuf>,
}

impl NetworkArgs {
    fn load(&self) -> Result<Topology> {
        match &self.topology {
            None => Ok(Topology::germany50()),
            Some(p) => {
                let text =
                    fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                Ok(parse_sndlib(&text)?)
            }
        }
    }
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    net: NetworkArgs,
    #[arg(long, default_value_t = DEFAULT_D_MAX_MS)]
    dmax: f64,
    #[arg(long, value_enum, default_value = "cc")]
    method: Method,
    /// Number of random sites.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "hops")]
    ranking: Ranking,
    /// Write the selection JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-k coverage of CC and random selection.
    #[arg(long)]
    metrics_csv: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    k_max: usize,
    /// Random draws averaged per k in the metrics CSV.
    #[arg(long, default_value_t = 100)]
    seeds: u64,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    net: NetworkArgs,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InstanceArgs {
    #[command(flatten)]
    net: NetworkArgs,
    #[arg(long)]
    requests: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Site list: a `select` output or a JSON array of node ids.
    #[arg(long)]
    sites: Option<PathBuf>,
}

impl InstanceArgs {
    fn build(&self, fallback_sites: Option<Vec<NodeId>>) -> Result<Instance> {
        let topo = self.net.load()?;
        let config = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        let sites = match (&self.sites, fallback_sites) {
            (Some(p), _) => read_sites(p)?,
            (None, Some(s)) => s,
            (None, None) => bail!("--sites is required"),
        };
        let requests = load_requests(&self.requests)?;
        Ok(Instance::from_network(
            &all_pairs_delay(&topo),
            &sites,
            requests,
            config,
        )?)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value = "sa")]
    solver: SolverKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    sa_t0: Option<f64>,
    #[arg(long)]
    sa_tmin: Option<f64>,
    #[arg(long)]
    sa_alpha: Option<f64>,
    #[arg(long)]
    sa_iters: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// A `solve` report or a bare solution.
    #[arg(long)]
    solution: PathBuf,
    /// Scenario CSV destination (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    plan: Option<PathBuf>,
    #[arg(long)]
    paper_scale: bool,
    /// Output directory (overrides the plan).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_sites(path: &Path) -> Result<Vec<NodeId>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(sel) = serde_json::from_str::<SiteSelection>(&text) {
        return Ok(sel.sites);
    }
    serde_json::from_str(&text).context("sites file is neither a selection nor a list of node ids")
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn select(a: SelectArgs) -> Result<()> {
    let topo = a.net.load()?;
    let selector = SiteSelector::new(&topo, a.ranking.into())?;
    let sel = match a.method {
        Method::Cc => selector.select(a.dmax)?,
        Method::Random => {
            let k = a.k.context("--method random needs --k")?;
            select_sites_random(selector.delay(), k, a.seed)?
        }
    };
    write_json(a.out.as_deref(), &sel)?;
    if let Some(p) = &a.metrics_csv {
        let k_max = a.k_max.min(topo.node_count());
        let rows = emit_fig2_table(&selector, 1..=k_max, a.seeds, a.seed)?;
        write_coverage_csv(fs::File::create(p)?, &rows)?;
    }
    Ok(())
}

fn generate(a: GenerateArgs) -> Result<()> {
    let topo = a.net.load()?;
    let config = match &a.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let types = &config.service_types;
    let reqs = generate_requests(
        a.count,
        &equal_mix(types.len()),
        types,
        topo.node_count(),
        a.seed,
    )?;
    save_requests(&a.out, &reqs)?;
    Ok(())
}

fn solve_cmd(a: SolveArgs) -> Result<()> {
    let inst = a.instance.build(None)?;
    let d = SaParams::default();
    let sa = SaParams {
        t0: a.sa_t0.unwrap_or(d.t0),
        t_min: a.sa_tmin.unwrap_or(d.t_min),
        alpha: a.sa_alpha.unwrap_or(d.alpha),
        max_iterations: a.sa_iters.unwrap_or(d.max_iterations),
        seed: a.seed,
        ..d
    };
    let report = solve(a.solver, &inst, &sa, &ExactLimits::default())?;
    write_json(a.out.as_deref(), &report)
}

fn verify(a: VerifyArgs) -> Result<bool> {
    let text = fs::read_to_string(&a.solution)
        .with_context(|| format!("reading {}", a.solution.display()))?;
    let (solution, sites, rejected) = match serde_json::from_str::<SolveReport>(&text) {
        Ok(r) => {
            let rejected = r.rejected_set();
            (r.solution, Some(r.sites), Some(rejected))
        }
        Err(_) => (serde_json::from_str::<Solution>(&text)?, None, None),
    };
    let inst = a.instance.build(sites)?;
    let rejected = rejected.unwrap_or_else(|| {
        inst.requests()
            .iter()
            .map(|r| r.id)
            .filter(|id| !solution.assignments.contains_key(id))
            .collect::<BTreeSet<_>>()
    });
    let check = check_feasibility(&solution, &inst, &rejected)?;
    for v in &check.violations {
        eprintln!("violation: {}", serde_json::to_string(v)?);
    }
    let outcomes = single_failure_report(&solution, &inst)?;
    let mut w = csv::Writer::from_writer(sink(a.out.as_deref())?);
    w.write_record(["scenario", "kind", "target", "affected", "survived", "pass"])?;
    for o in &outcomes {
        w.write_record([
            o.scenario.to_string(),
            o.kind.to_string(),
            o.target.clone(),
            o.affected.to_string(),
            o.survived.to_string(),
            o.pass.to_string(),
        ])?;
    }
    w.flush()?;
    let ok = check.is_feasible() && outcomes.iter().all(|o| o.pass);
    eprintln!(
        "{}: {} violations, {} scenarios",
        if ok { "PASS" } else { "FAIL" },
        check.violations.len(),
        outcomes.len()
    );
    Ok(ok)
}

fn bench(a: BenchArgs) -> Result<()> {
    let mut plan = match &a.plan {
        Some(p) => ExperimentPlan::load(p)?,
        None if a.paper_scale => ExperimentPlan::paper(),
        None => ExperimentPlan::desk(),
    };
    if a.paper_scale && !plan.paper_scale {
        plan = ExperimentPlan {
            topology: plan.topology,
            ..ExperimentPlan::paper()
        };
    }
    let dir = a
        .out
        .or_else(|| plan.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("bench-out"));
    let result = run_experiment(&plan)?;
    write_outputs(&result, &dir)?;
    eprintln!("{} cells written to {}", result.raw.len(), dir.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Select(a) => select(a).map(|_| true),
        Command::Generate(a) => generate(a).map(|_| true),
        Command::Solve(a) => solve_cmd(a).map(|_| true),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
