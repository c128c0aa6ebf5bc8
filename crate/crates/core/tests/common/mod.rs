#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use mecplace::model::{
    check_feasibility, evaluate_cost, Assignment, Instance, Role, ServerRef, SlotKey, Solution,
};

/// Best (fewest rejections, then cheapest) placement found by trying every
/// combination of reject / (primary server, backup server) per request.
/// No pruning and no symmetry reduction.
pub struct Brute {
    pub rejected: usize,
    pub cost: f64,
    pub solution: Solution,
}

/// Per request: `None` (rejected) or (primary, backup) server indices.
type Choice = Vec<Option<(usize, usize)>>;

struct Ctx<'a> {
    inst: &'a Instance,
    servers: Vec<ServerRef>,
    types: usize,
    /// [server][type][role] load.
    load: Vec<Vec<[f64; 2]>>,
    choice: Choice,
    best: Option<(usize, f64, Choice)>,
}

fn instances(load: f64, cap: f64) -> u32 {
    if load <= 1e-9 {
        0
    } else {
        ((load - 1e-9) / cap).ceil() as u32
    }
}

impl Ctx<'_> {
    fn ok_delay(&self, req: usize, server: usize) -> bool {
        let r = &self.inst.requests()[req];
        let d = self
            .inst
            .path_delay(self.servers[server].site, r.attach_node)
            + self.inst.resources().vnf_processing_delay;
        d <= r.max_delay + 1e-9
    }

    fn leaf(&mut self) {
        let res = self.inst.resources();
        let costs = self.inst.costs();
        let mut servers = 0u32;
        let mut vnfs = 0u32;
        for s in 0..self.servers.len() {
            let mut here = 0;
            for t in 0..self.types {
                for r in 0..2 {
                    here += instances(self.load[s][t][r], res.vnf_throughput);
                }
            }
            if here * res.vnf_cores > res.server_cores {
                return;
            }
            if here > 0 {
                servers += 1;
            }
            vnfs += here;
        }
        let mut traffic = 0.0;
        let mut rejected = 0;
        for (i, c) in self.choice.iter().enumerate() {
            let r = &self.inst.requests()[i];
            match c {
                None => rejected += 1,
                Some((p, b)) => {
                    for s in [*p, *b] {
                        let f = if self.inst.options().delay_weighted_traffic {
                            self.inst.path_delay(self.servers[s].site, r.attach_node)
                        } else {
                            1.0
                        };
                        traffic += r.data_rate * f;
                    }
                }
            }
        }
        let w = costs.weights;
        let cost = w[0] * costs.server_cost * servers as f64
            + w[1] * costs.vnf_cost * vnfs as f64
            + w[2] * costs.traffic_cost * traffic;
        let better = match &self.best {
            None => true,
            Some((br, bc, _)) => rejected < *br || (rejected == *br && cost < *bc - 1e-9),
        };
        if better {
            self.best = Some((rejected, cost, self.choice.clone()));
        }
    }

    fn go(&mut self, i: usize) {
        if i == self.choice.len() {
            self.leaf();
            return;
        }
        let req = self.inst.requests()[i].clone();
        let n = self.servers.len();
        for p in 0..n {
            if !self.ok_delay(i, p) {
                continue;
            }
            for b in 0..n {
                if b == p || !self.ok_delay(i, b) {
                    continue;
                }
                if self.inst.options().site_anti_affinity
                    && self.servers[p].site == self.servers[b].site
                {
                    continue;
                }
                self.load[p][req.vnf_type][0] += req.data_rate;
                self.load[b][req.vnf_type][1] += req.data_rate;
                self.choice[i] = Some((p, b));
                self.go(i + 1);
                self.load[p][req.vnf_type][0] -= req.data_rate;
                self.load[b][req.vnf_type][1] -= req.data_rate;
            }
        }
        self.choice[i] = None;
        self.go(i + 1);
    }
}

pub fn brute_force(inst: &Instance) -> Brute {
    let servers: Vec<ServerRef> = (0..inst.site_count())
        .flat_map(|site| (0..inst.servers_per_site()).map(move |server| ServerRef { site, server }))
        .collect();
    let types = inst.service_types().len();
    let mut ctx = Ctx {
        inst,
        load: vec![vec![[0.0; 2]; types]; servers.len()],
        servers,
        types,
        choice: vec![None; inst.requests().len()],
        best: None,
    };
    ctx.go(0);
    let (rejected, cost, choice) = ctx.best.expect("rejecting everything is always feasible");

    let mut sol = Solution::default();
    let mut load: BTreeMap<SlotKey, f64> = BTreeMap::new();
    for (i, c) in choice.iter().enumerate() {
        let r = &inst.requests()[i];
        if let Some((p, b)) = c {
            let a = Assignment {
                primary: SlotKey::new(ctx.servers[*p], r.vnf_type, Role::Primary),
                backup: SlotKey::new(ctx.servers[*b], r.vnf_type, Role::Backup),
            };
            *load.entry(a.primary).or_default() += r.data_rate;
            *load.entry(a.backup).or_default() += r.data_rate;
            sol.assignments.insert(r.id, a);
        }
    }
    for (k, l) in load {
        sol.vnf_instances
            .insert(k, instances(l, inst.resources().vnf_throughput));
    }
    sol.canonicalize();
    Brute {
        rejected,
        cost,
        solution: sol,
    }
}

pub fn rejected_of(sol: &Solution, inst: &Instance) -> BTreeSet<usize> {
    inst.requests()
        .iter()
        .map(|r| r.id)
        .filter(|id| !sol.assignments.contains_key(id))
        .collect()
}

/// Asserts zero violations and returns the evaluated total.
pub fn assert_feasible(sol: &Solution, inst: &Instance, rejected: &BTreeSet<usize>) -> f64 {
    let rep = check_feasibility(sol, inst, rejected).expect("ids resolve");
    assert!(rep.is_feasible(), "violations: {:?}", rep.violations);
    evaluate_cost(sol, inst).unwrap().total
}
