// Place one request batch on germany50 with every heuristic and compare.
//
// cargo run --release --example solve_compare

use std::collections::BTreeSet;

use mecplace::centrality::{RankingMetric, SiteSelector};
use mecplace::model::{check_feasibility, equal_mix, generate_requests, Config, Instance};
use mecplace::solvers::{solve, ExactLimits, SaParams, SolverKind};
use mecplace::topology::Topology;

pub fn run_example() -> anyhow::Result<()> {
    let net = Topology::germany50();
    let selector = SiteSelector::new(&net, RankingMetric::Hops)?;
    let sites = selector.select(2.0)?.sites;

    let mut config = Config::default();
    config.resources.servers_per_site = 3;
    let types = config.service_types.clone();
    let requests = generate_requests(40, &equal_mix(types.len()), &types, net.node_count(), 11)?;
    let inst = Instance::from_network(selector.delay(), &sites, requests, config)?;

    println!(
        "{:<9} {:>10} {:>8} {:>6} {:>9} {:>9}",
        "solver", "total", "servers", "vnfs", "traffic", "rejected"
    );
    for kind in [SolverKind::Sa, SolverKind::Greedy, SolverKind::Baseline] {
        let r = solve(
            kind,
            &inst,
            &SaParams::with_seed(3),
            &ExactLimits::default(),
        )?;
        let rejected: BTreeSet<_> = r.rejected_set();
        anyhow::ensure!(check_feasibility(&r.solution, &inst, &rejected)?.is_feasible());
        println!(
            "{:<9} {:>10.1} {:>8} {:>6} {:>9.1} {:>9}",
            kind.name(),
            r.cost.total,
            r.solution.active_servers.len(),
            r.solution.instance_count(),
            r.cost.traffic,
            rejected.len()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
