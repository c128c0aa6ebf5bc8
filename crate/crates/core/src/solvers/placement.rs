//! Incremental placement state shared by every solver.
//!
//! Instance counts are never stored: a slot holds the fewest instances
//! whose pooled throughput carries its load, so the state is always
//! canonical.

use std::collections::BTreeMap;

use crate::model::{Assignment, CostBreakdown, Instance, Role, ServerRef, SlotKey, Solution, EPS};

#[inline]
fn role_index(role: Role) -> usize {
    match role {
        Role::Primary => 0,
        Role::Backup => 1,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum ScanPolicy {
    /// Existing instances with spare throughput, then other active servers,
    /// then idle servers.
    ReuseFirst,
    /// Servers strictly in the given order.
    InOrder,
}

#[derive(Clone, Debug)]
pub(crate) struct Placement<'a> {
    inst: &'a Instance,
    /// Per request position: serving server of primary and backup.
    assign: Vec<[Option<ServerRef>; 2]>,
    loads: BTreeMap<SlotKey, f64>,
    server_instances: Vec<u32>,
    active_servers: usize,
    total_instances: u32,
    traffic: f64,
}

impl<'a> Placement<'a> {
    pub fn new(inst: &'a Instance) -> Placement<'a> {
        Placement {
            inst,
            assign: vec![[None, None]; inst.requests().len()],
            loads: BTreeMap::new(),
            server_instances: vec![0; inst.server_count()],
            active_servers: 0,
            total_instances: 0,
            traffic: 0.0,
        }
    }

    /// Rebuilds the state from a solution's assignments.
    pub fn from_solution(inst: &'a Instance, solution: &Solution) -> Option<Placement<'a>> {
        let mut p = Placement::new(inst);
        for (rid, a) in &solution.assignments {
            let pos = inst.request_position(*rid)?;
            p.place(pos, Role::Primary, a.primary.server_ref());
            p.place(pos, Role::Backup, a.backup.server_ref());
        }
        Some(p)
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    #[inline]
    pub fn server_of(&self, pos: usize, role: Role) -> Option<ServerRef> {
        self.assign[pos][role_index(role)]
    }

    pub fn is_served(&self, pos: usize) -> bool {
        self.assign[pos].iter().all(Option::is_some)
    }

    pub fn served_positions(&self) -> Vec<usize> {
        (0..self.assign.len())
            .filter(|&p| self.is_served(p))
            .collect()
    }

    #[inline]
    pub fn slot(&self, pos: usize, role: Role, server: ServerRef) -> SlotKey {
        SlotKey::new(server, self.inst.requests()[pos].vnf_type, role)
    }

    pub fn load(&self, slot: &SlotKey) -> f64 {
        self.loads.get(slot).copied().unwrap_or(0.0)
    }

    /// Slots currently carrying traffic.
    pub fn slots(&self) -> impl Iterator<Item = (&SlotKey, &f64)> {
        self.loads.iter()
    }

    pub fn server_instances(&self, server: ServerRef) -> u32 {
        self.server_instances[self.inst.server_index(server)]
    }

    pub fn is_active(&self, server: ServerRef) -> bool {
        self.server_instances(server) > 0
    }

    /// Request positions whose `slot.role` assignment sits on `slot`.
    pub fn members(&self, slot: &SlotKey) -> Vec<usize> {
        let server = slot.server_ref();
        (0..self.assign.len())
            .filter(|&p| {
                self.server_of(p, slot.role) == Some(server)
                    && self.inst.requests()[p].vnf_type == slot.vnf_type
            })
            .collect()
    }

    /// Instances that adding request `pos` as `role` on `server` would add.
    pub fn extra_instances(&self, pos: usize, role: Role, server: ServerRef) -> u32 {
        let slot = self.slot(pos, role, server);
        let res = self.inst.resources();
        let load = self.load(&slot);
        res.instances_for(load + self.inst.requests()[pos].data_rate) - res.instances_for(load)
    }

    /// Whether request `pos` can take `role` on `server` without breaking
    /// delay, anti-affinity or core limits.
    pub fn can_place(&self, pos: usize, role: Role, server: ServerRef) -> bool {
        let req = &self.inst.requests()[pos];
        if !self.inst.contains_server(server) || !self.inst.reachable(server.site, req) {
            return false;
        }
        if let Some(other) = self.server_of(pos, role.other()) {
            if other == server
                || (self.inst.options().site_anti_affinity && other.site == server.site)
            {
                return false;
            }
        }
        let res = self.inst.resources();
        self.server_instances(server) + self.extra_instances(pos, role, server)
            <= res.vnfs_per_server()
    }

    fn traffic_of(&self, pos: usize, server: ServerRef) -> f64 {
        let req = &self.inst.requests()[pos];
        let factor = if self.inst.options().delay_weighted_traffic {
            self.inst.path_delay(server.site, req.attach_node)
        } else {
            1.0
        };
        req.data_rate * factor
    }

    /// Places without checks; callers go through `can_place` first.
    pub fn place(&mut self, pos: usize, role: Role, server: ServerRef) {
        debug_assert!(self.server_of(pos, role).is_none());
        let extra = self.extra_instances(pos, role, server);
        let slot = self.slot(pos, role, server);
        *self.loads.entry(slot).or_insert(0.0) += self.inst.requests()[pos].data_rate;
        let idx = self.inst.server_index(server);
        if self.server_instances[idx] == 0 && extra > 0 {
            self.active_servers += 1;
        }
        self.server_instances[idx] += extra;
        self.total_instances += extra;
        self.traffic += self.traffic_of(pos, server);
        self.assign[pos][role_index(role)] = Some(server);
    }

    pub fn unplace(&mut self, pos: usize, role: Role) -> Option<ServerRef> {
        let server = self.assign[pos][role_index(role)].take()?;
        let slot = self.slot(pos, role, server);
        let res = self.inst.resources();
        let before = self.load(&slot);
        let after = before - self.inst.requests()[pos].data_rate;
        let freed = res.instances_for(before) - res.instances_for(after);
        if after <= EPS {
            self.loads.remove(&slot);
        } else {
            self.loads.insert(slot, after);
        }
        let idx = self.inst.server_index(server);
        self.server_instances[idx] -= freed;
        self.total_instances -= freed;
        if freed > 0 && self.server_instances[idx] == 0 {
            self.active_servers -= 1;
        }
        self.traffic -= self.traffic_of(pos, server);
        Some(server)
    }

    pub fn active_server_count(&self) -> usize {
        self.active_servers
    }

    pub fn total_instances(&self) -> u32 {
        self.total_instances
    }

    pub fn cost(&self) -> CostBreakdown {
        let c = self.inst.costs();
        CostBreakdown::from_parts(
            self.inst,
            c.server_cost * self.active_servers as f64,
            c.vnf_cost * self.total_instances as f64,
            c.traffic_cost * self.traffic,
        )
    }

    /// Candidate servers for `(pos, role)` among `servers`, in scan order.
    pub fn candidates(
        &self,
        pos: usize,
        role: Role,
        servers: &[ServerRef],
        policy: ScanPolicy,
    ) -> Vec<ServerRef> {
        let feasible = servers
            .iter()
            .copied()
            .filter(|&s| self.can_place(pos, role, s));
        match policy {
            ScanPolicy::InOrder => feasible.collect(),
            ScanPolicy::ReuseFirst => {
                let mut reuse = Vec::new();
                let mut active = Vec::new();
                let mut idle = Vec::new();
                for s in feasible {
                    let slot = self.slot(pos, role, s);
                    if self.load(&slot) > 0.0 && self.extra_instances(pos, role, s) == 0 {
                        reuse.push(s);
                    } else if self.is_active(s) {
                        active.push(s);
                    } else {
                        idle.push(s);
                    }
                }
                reuse.extend(active);
                reuse.extend(idle);
                reuse
            }
        }
    }

    /// Canonical solution for the requests currently served by both roles.
    pub fn to_solution(&self) -> Solution {
        let mut s = Solution::default();
        for (pos, req) in self.inst.requests().iter().enumerate() {
            if let [Some(p), Some(b)] = self.assign[pos] {
                s.assignments.insert(
                    req.id,
                    Assignment {
                        primary: SlotKey::new(p, req.vnf_type, Role::Primary),
                        backup: SlotKey::new(b, req.vnf_type, Role::Backup),
                    },
                );
            }
        }
        let res = self.inst.resources();
        for (slot, &load) in &self.loads {
            let n = res.instances_for(load);
            if n > 0 {
                s.vnf_instances.insert(*slot, n);
            }
        }
        s.canonicalize();
        s
    }

    /// Exact cost of the emitted solution (no incremental rounding).
    #[cfg(test)]
    pub fn exact_cost(&self) -> CostBreakdown {
        crate::model::evaluate_cost(&self.to_solution(), self.inst)
            .expect("placement references valid ids")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{default_service_types, Config, ServiceRequest};

    fn inst(n: usize) -> Instance {
        let t = default_service_types();
        let reqs = (0..n)
            .map(|i| ServiceRequest::of_type(i, &t[1], 0))
            .collect();
        let mut cfg = Config::default();
        cfg.resources.servers_per_site = 2;
        Instance::new(vec![0], vec![vec![0.5]], reqs, cfg).unwrap()
    }

    #[test]
    fn place_and_unplace_round_trip() {
        let inst = inst(11);
        let mut p = Placement::new(&inst);
        let s0 = ServerRef { site: 0, server: 0 };
        let s1 = ServerRef { site: 0, server: 1 };
        for pos in 0..11 {
            assert!(p.can_place(pos, Role::Primary, s0));
            p.place(pos, Role::Primary, s0);
            assert!(!p.can_place(pos, Role::Backup, s0));
            p.place(pos, Role::Backup, s1);
        }
        // 1100 Mbps per role needs two pooled instances.
        assert_eq!(p.total_instances(), 4);
        assert_eq!(p.active_server_count(), 2);
        assert_eq!(p.cost().total, p.exact_cost().total);
        for pos in 0..11 {
            p.unplace(pos, Role::Primary);
            p.unplace(pos, Role::Backup);
        }
        assert_eq!(p.total_instances(), 0);
        assert_eq!(p.active_server_count(), 0);
        assert_eq!(p.cost().total, 0.0);
        assert!(p.to_solution().assignments.is_empty());
    }
}
