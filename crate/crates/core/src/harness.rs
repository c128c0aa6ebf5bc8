//! Experiment sweeps: instance generation, solver runs, aggregation and
//! CSV/JSON output.
//!
//! Output files:
//! - `raw.csv`: one row per (requests, seed, solver) cell.
//! - `agg.csv`: per (requests, solver) means over seeds.
//! - `timing.csv`: wall time per cell, kept apart so the other two files
//!   are byte-identical across reruns.
//! - `manifest.json`: the plan, its hashes and the derived sites.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::centrality::{
    select_sites_random, CentralityError, RankingMetric, SiteSelector, DEFAULT_D_MAX_MS,
};
use crate::model::{
    check_feasibility, equal_mix, generate_requests, Config, Instance, ModelError, ServiceRequest,
};
use crate::solvers::{solve, ExactLimits, SaParams, SolveReport, SolverError, SolverKind};
use crate::topology::{parse_sndlib, NodeId, Topology, TopologyError, FIBER_KM_PER_MS};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("plan: {0}")]
    Plan(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Centrality(#[from] CentralityError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("cell (requests={requests}, seed={seed}, solver={solver}): {message}")]
    Cell {
        requests: usize,
        seed: u64,
        solver: SolverKind,
        message: String,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentPlan {
    /// SNDlib file; the bundled germany50 network when absent.
    pub topology: Option<PathBuf>,
    pub d_max: f64,
    pub ranking: RankingMetric,
    pub request_counts: Vec<usize>,
    pub seeds_per_point: u64,
    pub base_seed: u64,
    pub solvers: Vec<SolverKind>,
    /// Service-type probabilities; uniform when absent.
    pub mix: Option<Vec<f64>>,
    pub config: Config,
    pub sa: SaParams,
    pub exact_limits: ExactLimits,
    pub output_dir: Option<PathBuf>,
    pub paper_scale: bool,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan::desk()
    }
}

impl ExperimentPlan {
    /// Small sweep that finishes in seconds.
    pub fn desk() -> ExperimentPlan {
        let mut config = Config::default();
        config.resources.servers_per_site = 3;
        ExperimentPlan {
            topology: None,
            d_max: DEFAULT_D_MAX_MS,
            ranking: RankingMetric::default(),
            request_counts: vec![10, 20, 30, 40],
            seeds_per_point: 3,
            base_seed: 1,
            solvers: SolverKind::ALL.to_vec(),
            mix: None,
            config,
            sa: SaParams::default(),
            exact_limits: ExactLimits::default(),
            output_dir: None,
            paper_scale: false,
        }
    }

    /// The full evaluation scenario: 10 servers per site, 50..200 requests, 20 seeds.
    pub fn paper() -> ExperimentPlan {
        ExperimentPlan {
            request_counts: vec![50, 100, 150, 200],
            seeds_per_point: 20,
            config: Config::default(),
            paper_scale: true,
            ..ExperimentPlan::desk()
        }
    }

    /// Reads a plan; `paper_scale: true` fills unspecified sizes from [`ExperimentPlan::paper`].
    pub fn load(path: &Path) -> Result<ExperimentPlan, HarnessError> {
        let text = fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        let paper = value
            .get("paper_scale")
            .and_then(serde_json::Value::as_bool)
            .unwrap_or(false);
        let mut base = serde_json::to_value(if paper {
            ExperimentPlan::paper()
        } else {
            ExperimentPlan::desk()
        })?;
        merge(&mut base, value);
        let mut plan: ExperimentPlan = serde_json::from_value(base)?;
        if let Some(t) = &plan.topology {
            if t.is_relative() {
                if let Some(dir) = path.parent() {
                    plan.topology = Some(dir.join(t));
                }
            }
        }
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.request_counts.is_empty() {
            return Err(HarnessError::Plan("request_counts is empty".into()));
        }
        if self.solvers.is_empty() {
            return Err(HarnessError::Plan("solvers is empty".into()));
        }
        if self.seeds_per_point == 0 {
            return Err(HarnessError::Plan(
                "seeds_per_point must be at least 1".into(),
            ));
        }
        if !(self.d_max >= 0.0) {
            return Err(HarnessError::Plan("d_max must be non-negative".into()));
        }
        self.config.validate()?;
        self.sa
            .validate()
            .map_err(|e| HarnessError::Plan(e.to_string()))?;
        Ok(())
    }

    pub fn load_topology(&self) -> Result<Topology, HarnessError> {
        match &self.topology {
            None => Ok(Topology::germany50()),
            Some(p) => Ok(parse_sndlib(&fs::read_to_string(p)?)?),
        }
    }

    fn mix(&self) -> Vec<f64> {
        self.mix
            .clone()
            .unwrap_or_else(|| equal_mix(self.config.service_types.len()))
    }
}

fn merge(base: &mut serde_json::Value, patch: serde_json::Value) {
    match (base, patch) {
        (serde_json::Value::Object(b), serde_json::Value::Object(p)) => {
            for (k, v) in p {
                merge(b.entry(k).or_insert(serde_json::Value::Null), v);
            }
        }
        (b, p) => *b = p,
    }
}

/// Seed of one (requests, seed index) cell; shared by the request generator
/// and the annealer.
pub fn cell_seed(base_seed: u64, requests: usize, seed_index: u64) -> u64 {
    base_seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((requests as u64) << 24)
        .wrapping_add(seed_index)
}

/// Network, delays and CC-selected sites of a plan.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub topology: Topology,
    pub selector: SiteSelector,
    pub sites: Vec<NodeId>,
}

impl Scenario {
    pub fn from_plan(plan: &ExperimentPlan) -> Result<Scenario, HarnessError> {
        let topology = plan.load_topology()?;
        let selector = SiteSelector::new(&topology, plan.ranking)?;
        let sites = selector.select(plan.d_max)?.sites;
        Ok(Scenario {
            topology,
            selector,
            sites,
        })
    }

    pub fn instance(
        &self,
        plan: &ExperimentPlan,
        requests: usize,
        seed_index: u64,
    ) -> Result<Instance, HarnessError> {
        let seed = cell_seed(plan.base_seed, requests, seed_index);
        let reqs = generate_requests(
            requests,
            &plan.mix(),
            &plan.config.service_types,
            self.topology.node_count(),
            seed,
        )?;
        Ok(Instance::from_network(
            self.selector.delay(),
            &self.sites,
            reqs,
            plan.config.clone(),
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RawRow {
    pub requests: usize,
    pub seed: u64,
    pub solver: SolverKind,
    pub total_cost: f64,
    pub server_cost: f64,
    pub vnf_cost: f64,
    pub traffic_cost: f64,
    pub active_servers: usize,
    pub vnf_instances: u32,
    pub rejected: usize,
    pub iterations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggRow {
    pub requests: usize,
    pub solver: SolverKind,
    pub runs: usize,
    pub total_cost: f64,
    pub server_cost: f64,
    pub vnf_cost: f64,
    pub traffic_cost: f64,
    pub active_servers: f64,
    pub vnf_instances: f64,
    pub rejected: f64,
    pub iterations: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRow {
    pub requests: usize,
    pub seed: u64,
    pub solver: SolverKind,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub version: String,
    pub topology: String,
    pub sites: Vec<NodeId>,
    pub base_seed: u64,
    pub seeds_per_point: u64,
    pub config_sha256: String,
    pub plan_sha256: String,
    pub plan: ExperimentPlan,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub raw: Vec<RawRow>,
    pub agg: Vec<AggRow>,
    pub timing: Vec<TimingRow>,
    pub manifest: Manifest,
}

impl ExperimentResult {
    /// Mean wall time of `solver` at `requests`, if any cell ran.
    pub fn mean_wall_time(&self, requests: usize, solver: SolverKind) -> Option<f64> {
        let t: Vec<f64> = self
            .timing
            .iter()
            .filter(|r| r.requests == requests && r.solver == solver)
            .map(|r| r.wall_time_s)
            .collect();
        (!t.is_empty()).then(|| t.iter().sum::<f64>() / t.len() as f64)
    }

    pub fn agg_row(&self, requests: usize, solver: SolverKind) -> Option<&AggRow> {
        self.agg
            .iter()
            .find(|r| r.requests == requests && r.solver == solver)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn raw_row(requests: usize, seed: u64, r: &SolveReport) -> RawRow {
    RawRow {
        requests,
        seed,
        solver: r.solver,
        total_cost: r.cost.total,
        server_cost: r.cost.server,
        vnf_cost: r.cost.vnf,
        traffic_cost: r.cost.traffic,
        active_servers: r.solution.active_servers.len(),
        vnf_instances: r.solution.instance_count(),
        rejected: r.rejected_requests.len(),
        iterations: r.iterations_evaluated,
    }
}

/// Means of the raw rows per (requests, solver), in plan order.
pub fn aggregate(raw: &[RawRow]) -> Vec<AggRow> {
    let mut groups: BTreeMap<(usize, SolverKind), Vec<&RawRow>> = BTreeMap::new();
    for r in raw {
        groups.entry((r.requests, r.solver)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((requests, solver), rows)| {
            let n = rows.len() as f64;
            let mean = |f: &dyn Fn(&RawRow) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
            AggRow {
                requests,
                solver,
                runs: rows.len(),
                total_cost: mean(&|r| r.total_cost),
                server_cost: mean(&|r| r.server_cost),
                vnf_cost: mean(&|r| r.vnf_cost),
                traffic_cost: mean(&|r| r.traffic_cost),
                active_servers: mean(&|r| r.active_servers as f64),
                vnf_instances: mean(&|r| r.vnf_instances as f64),
                rejected: mean(&|r| r.rejected as f64),
                iterations: mean(&|r| r.iterations as f64),
            }
        })
        .collect()
}

/// Runs every (requests, seed, solver) cell of the plan.
///
/// The exact solver is skipped on cells beyond its size cap. Every emitted
/// solution is checked against all constraints; a violation aborts the run.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentResult, HarnessError> {
    plan.validate()?;
    let scenario = Scenario::from_plan(plan)?;
    let mut raw = Vec::new();
    let mut timing = Vec::new();
    for &count in &plan.request_counts {
        for s in 0..plan.seeds_per_point {
            let inst = scenario.instance(plan, count, s)?;
            let seed = cell_seed(plan.base_seed, count, s);
            let sa = SaParams {
                seed,
                ..plan.sa.clone()
            };
            for &solver in &plan.solvers {
                let cell = |message: String| HarnessError::Cell {
                    requests: count,
                    seed: s,
                    solver,
                    message,
                };
                let report = match solve(solver, &inst, &sa, &plan.exact_limits) {
                    Ok(r) => r,
                    Err(SolverError::ExactCapExceeded(_)) => continue,
                    Err(e) => return Err(cell(e.to_string())),
                };
                let check = check_feasibility(&report.solution, &inst, &report.rejected_set())
                    .map_err(|e| cell(e.to_string()))?;
                if !check.is_feasible() {
                    return Err(cell(format!("infeasible solution: {:?}", check.violations)));
                }
                log::debug!(
                    "{count} requests, seed {s}, {solver}: cost {:.3}",
                    report.cost.total
                );
                raw.push(raw_row(count, s, &report));
                timing.push(TimingRow {
                    requests: count,
                    seed: s,
                    solver,
                    wall_time_s: report.wall_time,
                });
            }
        }
    }
    let agg = aggregate(&raw);
    let config_json = serde_json::to_string(&plan.config)?;
    let plan_json = serde_json::to_string(plan)?;
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        topology: scenario.topology.name.clone(),
        sites: scenario.sites.clone(),
        base_seed: plan.base_seed,
        seeds_per_point: plan.seeds_per_point,
        config_sha256: sha256_hex(config_json.as_bytes()),
        plan_sha256: sha256_hex(plan_json.as_bytes()),
        plan: plan.clone(),
        notes: vec![
            format!(
                "cell seed = cell_seed({}, requests, seed index)",
                plan.base_seed
            ),
            "exact cells beyond the solver cap are absent".into(),
            "wall times are in timing.csv only".into(),
        ],
    };
    Ok(ExperimentResult {
        raw,
        agg,
        timing,
        manifest,
    })
}

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

pub const RAW_COLUMNS: [&str; 11] = [
    "requests",
    "seed",
    "solver",
    "total_cost",
    "server_cost",
    "vnf_cost",
    "traffic_cost",
    "active_servers",
    "vnf_instances",
    "rejected",
    "iterations",
];

pub const AGG_COLUMNS: [&str; 11] = [
    "requests",
    "solver",
    "runs",
    "total_cost",
    "server_cost",
    "vnf_cost",
    "traffic_cost",
    "active_servers",
    "vnf_instances",
    "rejected",
    "iterations",
];

pub fn write_raw_csv<W: Write>(out: W, rows: &[RawRow]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RAW_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.requests.to_string(),
            r.seed.to_string(),
            r.solver.to_string(),
            f6(r.total_cost),
            f6(r.server_cost),
            f6(r.vnf_cost),
            f6(r.traffic_cost),
            r.active_servers.to_string(),
            r.vnf_instances.to_string(),
            r.rejected.to_string(),
            r.iterations.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_agg_csv<W: Write>(out: W, rows: &[AggRow]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AGG_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.requests.to_string(),
            r.solver.to_string(),
            r.runs.to_string(),
            f6(r.total_cost),
            f6(r.server_cost),
            f6(r.vnf_cost),
            f6(r.traffic_cost),
            f6(r.active_servers),
            f6(r.vnf_instances),
            f6(r.rejected),
            f6(r.iterations),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_timing_csv<W: Write>(out: W, rows: &[TimingRow]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["requests", "seed", "solver", "wall_time_s"])?;
    for r in rows {
        w.write_record([
            r.requests.to_string(),
            r.seed.to_string(),
            r.solver.to_string(),
            f6(r.wall_time_s),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes raw.csv, agg.csv, timing.csv and manifest.json into `dir`.
pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir)?;
    write_raw_csv(fs::File::create(dir.join("raw.csv"))?, &result.raw)?;
    write_agg_csv(fs::File::create(dir.join("agg.csv"))?, &result.agg)?;
    write_timing_csv(fs::File::create(dir.join("timing.csv"))?, &result.timing)?;
    let mut m = serde_json::to_string_pretty(&result.manifest)?;
    m.push('\n');
    fs::write(dir.join("manifest.json"), m)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRow {
    pub k: usize,
    pub avg_delay_ms: f64,
    pub max_delay_ms: f64,
    pub method: String,
}

/// Coverage of the top-`k` CC sites and of `seeds` random `k`-subsets, for
/// each `k`. Random subsets are drawn independently per `k` and averaged.
pub fn emit_fig2_table(
    selector: &SiteSelector,
    ks: impl IntoIterator<Item = usize>,
    seeds: u64,
    base_seed: u64,
) -> Result<Vec<CoverageRow>, HarnessError> {
    if seeds == 0 {
        return Err(HarnessError::Plan("need at least one random seed".into()));
    }
    let mut rows = Vec::new();
    for k in ks {
        let cc = selector.top_k(k)?;
        rows.push(CoverageRow {
            k,
            avg_delay_ms: cc.avg_delay,
            max_delay_ms: cc.max_delay,
            method: "cc".into(),
        });
        let (mut avg, mut max) = (0.0, 0.0);
        for s in 0..seeds {
            let r = select_sites_random(selector.delay(), k, cell_seed(base_seed, k, s))?;
            avg += r.avg_delay;
            max += r.max_delay;
        }
        rows.push(CoverageRow {
            k,
            avg_delay_ms: avg / seeds as f64,
            max_delay_ms: max / seeds as f64,
            method: "random".into(),
        });
    }
    Ok(rows)
}

pub fn write_coverage_csv<W: Write>(out: W, rows: &[CoverageRow]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "avg_delay_ms", "max_delay_ms", "method"])?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            f6(r.avg_delay_ms),
            f6(r.max_delay_ms),
            r.method.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Shape of the small random instances used to compare solvers against
/// exhaustive search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TinySpec {
    pub nodes: usize,
    /// Square side, km.
    pub area_km: f64,
    /// Random sites besides the central hub.
    pub max_extra_sites: usize,
    pub servers_per_site: usize,
    pub max_requests: usize,
    /// Charge forwarding by rate times delay, so site choice matters.
    pub delay_weighted_traffic: bool,
}

impl Default for TinySpec {
    fn default() -> Self {
        TinySpec {
            nodes: 10,
            area_km: 400.0,
            max_extra_sites: 2,
            servers_per_site: 2,
            max_requests: 10,
            delay_weighted_traffic: true,
        }
    }
}

/// A random tiny instance. Node 0 is a hub at the center of the square
/// and always hosts site 0; with the default 400 km square every request
/// can reach it. Requests are drawn until the instances they need, both
/// roles together, would no longer fit on the hub's servers.
pub fn tiny_instance(spec: &TinySpec, seed: u64) -> Result<Instance, HarnessError> {
    if spec.nodes < 1 + spec.max_extra_sites || spec.max_requests == 0 {
        return Err(HarnessError::Plan("tiny spec too small".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = spec.area_km / 2.0;
    let mut coords = vec![(half, half)];
    for _ in 1..spec.nodes {
        coords.push((
            rng.random_range(0.0..spec.area_km),
            rng.random_range(0.0..spec.area_km),
        ));
    }
    let extra = rng.random_range(0..=spec.max_extra_sites);
    let mut sites = vec![0];
    sites.extend(
        rand::seq::index::sample(&mut rng, spec.nodes - 1, extra)
            .into_iter()
            .map(|i| i + 1),
    );
    let site_delay = sites
        .iter()
        .map(|&s| {
            coords
                .iter()
                .map(|&(x, y)| {
                    ((x - coords[s].0).powi(2) + (y - coords[s].1).powi(2)).sqrt() / FIBER_KM_PER_MS
                })
                .collect()
        })
        .collect();

    let mut config = Config::default();
    config.resources.servers_per_site = spec.servers_per_site;
    config.options.delay_weighted_traffic = spec.delay_weighted_traffic;
    let types = config.service_types.clone();
    let hub_capacity = config.resources.vnfs_per_server() * spec.servers_per_site as u32;
    let target = rng.random_range(1..=spec.max_requests);
    let mut requests: Vec<ServiceRequest> = Vec::new();
    let mut load = vec![0.0; types.len()];
    while requests.len() < target {
        let ty = &types[rng.random_range(0..types.len())];
        let node = rng.random_range(0..spec.nodes);
        load[ty.id] += ty.data_rate;
        let needed: u32 = load
            .iter()
            .map(|&l| 2 * config.resources.instances_for(l))
            .sum();
        if needed > hub_capacity {
            break;
        }
        requests.push(ServiceRequest::of_type(requests.len(), ty, node));
    }
    Ok(Instance::new(sites, site_delay, requests, config)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::{solve_baseline, solve_greedy, solve_sa};

    fn one_cell() -> ExperimentPlan {
        ExperimentPlan {
            request_counts: vec![8],
            seeds_per_point: 1,
            ..ExperimentPlan::desk()
        }
    }

    #[test]
    fn single_cell_aggregate_equals_raw() {
        let res = run_experiment(&one_cell()).unwrap();
        assert_eq!(res.raw.len(), 4);
        assert_eq!(res.agg.len(), 4);
        for a in &res.agg {
            let r = res.raw.iter().find(|r| r.solver == a.solver).unwrap();
            assert_eq!(a.runs, 1);
            assert_eq!(a.total_cost, r.total_cost);
            assert_eq!(a.vnf_instances, r.vnf_instances as f64);
        }
    }

    #[test]
    fn exact_cells_beyond_cap_are_absent() {
        let plan = ExperimentPlan {
            request_counts: vec![8, 20],
            seeds_per_point: 1,
            ..ExperimentPlan::desk()
        };
        let res = run_experiment(&plan).unwrap();
        assert!(res.agg_row(8, SolverKind::Exact).is_some());
        assert!(res.agg_row(20, SolverKind::Exact).is_none());
        assert!(res.agg_row(20, SolverKind::Sa).is_some());
    }

    #[test]
    fn plan_validation() {
        for bad in [
            ExperimentPlan {
                request_counts: vec![],
                ..ExperimentPlan::desk()
            },
            ExperimentPlan {
                seeds_per_point: 0,
                ..ExperimentPlan::desk()
            },
            ExperimentPlan {
                solvers: vec![],
                ..ExperimentPlan::desk()
            },
        ] {
            assert!(run_experiment(&bad).is_err());
        }
    }

    #[test]
    fn plan_file_overrides_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("plan.json");
        fs::write(&p, r#"{"paper_scale": true, "request_counts": [50], "config": {"costs": {"server_cost": 7}}}"#).unwrap();
        let plan = ExperimentPlan::load(&p).unwrap();
        assert_eq!(plan.request_counts, vec![50]);
        assert_eq!(plan.seeds_per_point, 20);
        assert_eq!(plan.config.resources.servers_per_site, 10);
        assert_eq!(plan.config.costs.server_cost, 7.0);
        assert_eq!(plan.config.costs.vnf_cost, 10.0);
    }

    #[test]
    fn fig2_all_nodes_gives_zero() {
        let t = Topology::from_coordinates(
            "line",
            &[("a", 0.0, 0.0), ("b", 1.0, 0.0), ("c", 2.0, 0.0)],
            &[(0, 1), (1, 2)],
        )
        .unwrap();
        let sel = SiteSelector::new(&t, RankingMetric::Delay).unwrap();
        let rows = emit_fig2_table(&sel, [3], 5, 0).unwrap();
        assert_eq!(rows.len(), 2);
        for r in rows {
            assert_eq!((r.avg_delay_ms, r.max_delay_ms), (0.0, 0.0));
        }
    }

    #[test]
    fn tiny_instances_are_fully_servable() {
        let spec = TinySpec::default();
        for seed in 0..50 {
            let inst = tiny_instance(&spec, seed).unwrap();
            assert!(!inst.requests().is_empty() && inst.requests().len() <= 10);
            assert!(inst.site_count() <= 3);
            for r in [
                solve_sa(&inst, &SaParams::with_seed(seed)).unwrap(),
                solve_greedy(&inst),
                solve_baseline(&inst),
            ] {
                assert!(r.rejected_requests.is_empty(), "seed {seed} {}", r.solver);
            }
        }
    }

    #[test]
    fn csv_columns_are_fixed() {
        let mut buf = Vec::new();
        write_raw_csv(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            RAW_COLUMNS.join(",") + "\n"
        );
    }
}
