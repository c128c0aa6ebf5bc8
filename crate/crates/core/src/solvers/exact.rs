//! Exact placement by depth-first branch and bound.
//!
//! Requests are branched in descending data-rate order. Each branch picks a
//! (primary server, backup server) pair or rejects the request; the
//! objective is lexicographic: fewest rejections, then lowest cost. Empty
//! servers of one site are interchangeable, so only the lowest-indexed
//! empty server of each site is branched on.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::heuristics::first_fit;
use super::placement::Placement;
use super::{finish, SolveReport, SolverError, SolverKind};
use crate::model::{Instance, Role, ServerRef, EPS};

/// Size guard; larger instances are refused rather than searched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExactLimits {
    pub max_requests: usize,
    pub max_sites: usize,
    pub max_servers_per_site: usize,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits {
            max_requests: 12,
            max_sites: 5,
            max_servers_per_site: 3,
        }
    }
}

impl ExactLimits {
    pub fn admits(&self, inst: &Instance) -> Result<(), SolverError> {
        let checks = [
            ("requests", inst.requests().len(), self.max_requests),
            ("sites", inst.site_count(), self.max_sites),
            (
                "servers per site",
                inst.servers_per_site(),
                self.max_servers_per_site,
            ),
        ];
        for (what, have, cap) in checks {
            if have > cap {
                return Err(SolverError::ExactCapExceeded(format!(
                    "{have} {what} > cap {cap}"
                )));
            }
        }
        Ok(())
    }
}

struct Search<'a> {
    inst: &'a Instance,
    order: Vec<usize>,
    /// Per depth: total rate of the requests still to branch on, by type.
    remaining_rate: Vec<Vec<f64>>,
    /// Per depth: forwarding-cost floor of the remaining requests.
    remaining_traffic: Vec<f64>,
    best: Placement<'a>,
    best_rejected: usize,
    best_cost: f64,
    nodes: u64,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance) -> Search<'a> {
        let reqs = inst.requests();
        let mut order: Vec<usize> = (0..reqs.len()).collect();
        order.sort_by(|&a, &b| {
            reqs[b]
                .data_rate
                .total_cmp(&reqs[a].data_rate)
                .then(reqs[a].id.cmp(&reqs[b].id))
        });

        let types = inst.service_types().len();
        let weighted = inst.options().delay_weighted_traffic;
        let mut remaining_rate = vec![vec![0.0; types]; order.len() + 1];
        let mut remaining_traffic = vec![0.0; order.len() + 1];
        for depth in (0..order.len()).rev() {
            let req = &reqs[order[depth]];
            remaining_rate[depth] = remaining_rate[depth + 1].clone();
            remaining_rate[depth][req.vnf_type] += req.data_rate;
            let factor = if weighted {
                (0..inst.site_count())
                    .filter(|&l| inst.reachable(l, req))
                    .map(|l| inst.path_delay(l, req.attach_node))
                    .fold(f64::INFINITY, f64::min)
            } else {
                1.0
            };
            let factor = if factor.is_finite() { factor } else { 0.0 };
            remaining_traffic[depth] = remaining_traffic[depth + 1] + 2.0 * req.data_rate * factor;
        }

        // Seed the incumbent with the first-fit placement.
        let seed = first_fit(inst);
        let best_rejected = reqs.len() - seed.served_positions().len();
        let best_cost = seed.cost().total;
        Search {
            inst,
            order,
            remaining_rate,
            remaining_traffic,
            best: seed,
            best_rejected,
            best_cost,
            nodes: 0,
        }
    }

    /// Cost floor for any completion of `p` that serves every remaining request.
    fn lower_bound(&self, p: &Placement<'a>, depth: usize) -> f64 {
        let inst = self.inst;
        let res = inst.resources();
        let costs = inst.costs();
        let types = inst.service_types().len();

        let mut current = vec![[0u32; 2]; types];
        let mut load = vec![[0.0f64; 2]; types];
        for (slot, &l) in p.slots() {
            let r = usize::from(slot.role == Role::Backup);
            current[slot.vnf_type][r] += res.instances_for(l);
            load[slot.vnf_type][r] += l;
        }
        let mut instances = 0u32;
        for v in 0..types {
            for r in 0..2 {
                let total = load[v][r] + self.remaining_rate[depth][v];
                instances += current[v][r].max(res.instances_for(total));
            }
        }
        let any = p.total_instances() > 0 || depth < self.order.len();
        let min_servers = if any { 2 } else { 0 };
        let servers = (p.active_server_count() as u32)
            .max(instances.div_ceil(res.vnfs_per_server()))
            .max(min_servers);

        let now = p.cost();
        let w = costs.weights;
        w[0] * costs.server_cost * servers as f64
            + w[1] * costs.vnf_cost * instances as f64
            + w[2] * (now.traffic + costs.traffic_cost * self.remaining_traffic[depth])
    }

    /// Servers worth branching on: every busy server plus the first idle one per site.
    fn branch_servers(&self, p: &Placement<'a>, pos: usize, role: Role) -> Vec<ServerRef> {
        let mut out = Vec::new();
        for site in 0..self.inst.site_count() {
            let mut idle_taken = false;
            for server in 0..self.inst.servers_per_site() {
                let s = ServerRef { site, server };
                if !p.is_active(s) {
                    if idle_taken {
                        continue;
                    }
                    idle_taken = true;
                }
                if p.can_place(pos, role, s) {
                    out.push(s);
                }
            }
        }
        out
    }

    fn dfs(&mut self, p: &mut Placement<'a>, depth: usize, rejected: usize) {
        self.nodes += 1;
        if rejected > self.best_rejected {
            return;
        }
        if depth == self.order.len() {
            let cost = p.cost().total;
            if rejected < self.best_rejected || cost < self.best_cost - EPS {
                self.best = p.clone();
                self.best_rejected = rejected;
                self.best_cost = cost;
            }
            return;
        }
        if rejected == self.best_rejected && self.lower_bound(p, depth) >= self.best_cost - EPS {
            return;
        }

        let pos = self.order[depth];
        let mut pairs = Vec::new();
        for primary in self.branch_servers(p, pos, Role::Primary) {
            p.place(pos, Role::Primary, primary);
            for backup in self.branch_servers(p, pos, Role::Backup) {
                p.place(pos, Role::Backup, backup);
                pairs.push((p.cost().total, primary, backup));
                p.unplace(pos, Role::Backup);
            }
            p.unplace(pos, Role::Primary);
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (_, primary, backup) in pairs {
            p.place(pos, Role::Primary, primary);
            p.place(pos, Role::Backup, backup);
            self.dfs(p, depth + 1, rejected);
            p.unplace(pos, Role::Backup);
            p.unplace(pos, Role::Primary);
        }
        self.dfs(p, depth + 1, rejected + 1);
    }
}

/// Minimum-cost placement among those serving the most requests.
pub fn solve_exact(instance: &Instance, limits: &ExactLimits) -> Result<SolveReport, SolverError> {
    limits.admits(instance)?;
    let started = Instant::now();
    let mut search = Search::new(instance);
    let mut p = Placement::new(instance);
    search.dfs(&mut p, 0, 0);
    Ok(finish(
        SolverKind::Exact,
        &search.best,
        search.nodes,
        started,
    ))
}
