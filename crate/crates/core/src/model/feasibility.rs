use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{
    Instance, ModelError, RequestId, Role, ServerRef, ServiceTypeId, SiteId, SlotKey, Solution, EPS,
};

/// Constraint families of the placement model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    /// Cores used on a server.
    ServerCapacity,
    /// Pooled VNF throughput of a slot.
    Throughput,
    /// End-to-end delay of each role.
    Delay,
    /// Exactly one primary and one backup of the right type.
    Placement,
    /// Primary and backup on different servers.
    AntiAffinity,
    /// Sites, servers and instances exist exactly when used.
    Activation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    ServerCapacity {
        server: ServerRef,
        cores_used: u32,
        cores_available: u32,
    },
    Throughput {
        slot: SlotKey,
        load_mbps: f64,
        capacity_mbps: f64,
    },
    Delay {
        request: RequestId,
        role: Role,
        delay_ms: f64,
        max_delay_ms: f64,
    },
    Unassigned {
        request: RequestId,
    },
    AssignedButRejected {
        request: RequestId,
    },
    TypeMismatch {
        request: RequestId,
        role: Role,
        slot_type: ServiceTypeId,
    },
    RoleMismatch {
        request: RequestId,
        role: Role,
    },
    SharedServer {
        request: RequestId,
        server: ServerRef,
    },
    SharedSite {
        request: RequestId,
        site: SiteId,
    },
    MissingInstance {
        request: RequestId,
        slot: SlotKey,
    },
    OrphanInstance {
        slot: SlotKey,
    },
    ZeroCount {
        slot: SlotKey,
    },
    InactiveServerHosts {
        server: ServerRef,
    },
    IdleServerActive {
        server: ServerRef,
    },
    SiteFlag {
        site: SiteId,
        marked_used: bool,
    },
}

impl Violation {
    pub fn kind(&self) -> ConstraintKind {
        use Violation::*;
        match self {
            ServerCapacity { .. } => ConstraintKind::ServerCapacity,
            Throughput { .. } => ConstraintKind::Throughput,
            Delay { .. } => ConstraintKind::Delay,
            Unassigned { .. }
            | AssignedButRejected { .. }
            | TypeMismatch { .. }
            | RoleMismatch { .. } => ConstraintKind::Placement,
            SharedServer { .. } | SharedSite { .. } => ConstraintKind::AntiAffinity,
            MissingInstance { .. }
            | OrphanInstance { .. }
            | ZeroCount { .. }
            | InactiveServerHosts { .. }
            | IdleServerActive { .. }
            | SiteFlag { .. } => ConstraintKind::Activation,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn kinds(&self) -> BTreeSet<ConstraintKind> {
        self.violations.iter().map(Violation::kind).collect()
    }
}

fn resolve_slot(instance: &Instance, slot: &SlotKey) -> Result<(), ModelError> {
    if slot.site >= instance.site_count() {
        return Err(ModelError::UnknownSite(slot.site));
    }
    if slot.server >= instance.servers_per_site() {
        return Err(ModelError::UnknownServer {
            site: slot.site,
            server: slot.server,
        });
    }
    if slot.vnf_type >= instance.service_types().len() {
        return Err(ModelError::UnknownServiceType(slot.vnf_type));
    }
    Ok(())
}

/// Checks every placement constraint and lists each violation found.
///
/// Requests in `rejected` must carry no assignment; every other request
/// must carry exactly one primary and one backup.
pub fn check_feasibility(
    solution: &Solution,
    instance: &Instance,
    rejected: &BTreeSet<RequestId>,
) -> Result<FeasibilityReport, ModelError> {
    for slot in solution.vnf_instances.keys() {
        resolve_slot(instance, slot)?;
    }
    for s in &solution.active_servers {
        if !instance.contains_server(*s) {
            return Err(ModelError::UnknownServer {
                site: s.site,
                server: s.server,
            });
        }
    }
    if let Some(&site) = solution
        .sites_used
        .iter()
        .find(|&&l| l >= instance.site_count())
    {
        return Err(ModelError::UnknownSite(site));
    }
    for (&rid, a) in &solution.assignments {
        instance
            .request(rid)
            .ok_or(ModelError::UnknownRequest(rid))?;
        resolve_slot(instance, &a.primary)?;
        resolve_slot(instance, &a.backup)?;
    }
    if let Some(&rid) = rejected.iter().find(|&&r| instance.request(r).is_none()) {
        return Err(ModelError::UnknownRequest(rid));
    }

    let res = instance.resources();
    let mut out = Vec::new();

    // Placement, delay and anti-affinity, per request.
    let mut load: BTreeMap<SlotKey, f64> = BTreeMap::new();
    let mut used_slots: BTreeSet<SlotKey> = BTreeSet::new();
    for req in instance.requests() {
        let Some(a) = solution.assignments.get(&req.id) else {
            if !rejected.contains(&req.id) {
                out.push(Violation::Unassigned { request: req.id });
            }
            continue;
        };
        if rejected.contains(&req.id) {
            out.push(Violation::AssignedButRejected { request: req.id });
        }
        for role in [Role::Primary, Role::Backup] {
            let slot = a.slot(role);
            if slot.vnf_type != req.vnf_type {
                out.push(Violation::TypeMismatch {
                    request: req.id,
                    role,
                    slot_type: slot.vnf_type,
                });
            }
            if slot.role != role {
                out.push(Violation::RoleMismatch {
                    request: req.id,
                    role,
                });
            }
            let delay = instance.service_delay(slot.site, req.attach_node);
            if delay > req.max_delay + EPS {
                out.push(Violation::Delay {
                    request: req.id,
                    role,
                    delay_ms: delay,
                    max_delay_ms: req.max_delay,
                });
            }
            if solution.vnf_instances.get(&slot).copied().unwrap_or(0) == 0 {
                out.push(Violation::MissingInstance {
                    request: req.id,
                    slot,
                });
            }
            *load.entry(slot).or_default() += req.data_rate;
            used_slots.insert(slot);
        }
        if a.primary.server_ref() == a.backup.server_ref() {
            out.push(Violation::SharedServer {
                request: req.id,
                server: a.primary.server_ref(),
            });
        } else if instance.options().site_anti_affinity && a.primary.site == a.backup.site {
            out.push(Violation::SharedSite {
                request: req.id,
                site: a.primary.site,
            });
        }
    }

    // Throughput per slot.
    for (slot, &l) in &load {
        let count = solution.vnf_instances.get(slot).copied().unwrap_or(0);
        let capacity = res.vnf_throughput * count as f64;
        if count > 0 && l > capacity + EPS {
            out.push(Violation::Throughput {
                slot: *slot,
                load_mbps: l,
                capacity_mbps: capacity,
            });
        }
    }

    // Instances: positive counts, each serving someone.
    let mut per_server: BTreeMap<ServerRef, u32> = BTreeMap::new();
    for (slot, &count) in &solution.vnf_instances {
        if count == 0 {
            out.push(Violation::ZeroCount { slot: *slot });
            continue;
        }
        if !used_slots.contains(slot) {
            out.push(Violation::OrphanInstance { slot: *slot });
        }
        *per_server.entry(slot.server_ref()).or_default() += count;
    }

    // Server cores and activation.
    for (&server, &count) in &per_server {
        let cores_used = count * res.vnf_cores;
        if cores_used > res.server_cores {
            out.push(Violation::ServerCapacity {
                server,
                cores_used,
                cores_available: res.server_cores,
            });
        }
        if !solution.active_servers.contains(&server) {
            out.push(Violation::InactiveServerHosts { server });
        }
    }
    for server in &solution.active_servers {
        if !per_server.contains_key(server) {
            out.push(Violation::IdleServerActive { server: *server });
        }
    }

    let hosting: BTreeSet<SiteId> = solution.active_servers.iter().map(|s| s.site).collect();
    for site in hosting.symmetric_difference(&solution.sites_used) {
        out.push(Violation::SiteFlag {
            site: *site,
            marked_used: solution.sites_used.contains(site),
        });
    }

    Ok(FeasibilityReport { violations: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{default_service_types, Assignment, Config, ServiceRequest};

    fn instance(requests: Vec<ServiceRequest>) -> Instance {
        Instance::new(
            vec![0, 1],
            vec![vec![0.5, 1.0], vec![2.5, 0.2]],
            requests,
            Config::default(),
        )
        .unwrap()
    }

    fn slot(site: usize, server: usize, vnf_type: usize, role: Role) -> SlotKey {
        SlotKey {
            site,
            server,
            vnf_type,
            role,
        }
    }

    fn serve(s: &mut Solution, request: RequestId, primary: SlotKey, backup: SlotKey) {
        *s.vnf_instances.entry(primary).or_insert(0) = 1;
        *s.vnf_instances.entry(backup).or_insert(0) = 1;
        s.assignments
            .insert(request, Assignment { primary, backup });
        s.canonicalize();
    }

    #[test]
    fn empty_is_feasible() {
        let inst = instance(vec![]);
        let r = check_feasibility(&Solution::default(), &inst, &BTreeSet::new()).unwrap();
        assert!(r.is_feasible());
    }

    #[test]
    fn shared_server_is_only_anti_affinity() {
        let types = default_service_types();
        let inst = instance(vec![ServiceRequest::of_type(0, &types[1], 0)]);
        let mut s = Solution::default();
        serve(
            &mut s,
            0,
            slot(0, 0, 1, Role::Primary),
            slot(0, 0, 1, Role::Backup),
        );
        let r = check_feasibility(&s, &inst, &BTreeSet::new()).unwrap();
        assert_eq!(r.kinds(), BTreeSet::from([ConstraintKind::AntiAffinity]));
    }

    #[test]
    fn five_instances_overflow_a_server() {
        let types = default_service_types();
        let reqs: Vec<_> = (0..5)
            .map(|i| ServiceRequest::of_type(i, &types[3], 0))
            .collect();
        let inst = instance(reqs);
        let mut s = Solution::default();
        // Five primaries on server 0 (four types would do, so pile into one
        // type-slot with five instances), backups spread elsewhere.
        for i in 0..5 {
            let b = slot(0, 1 + (i % 2), 3, Role::Backup);
            s.assignments.insert(
                i,
                Assignment {
                    primary: slot(0, 0, 3, Role::Primary),
                    backup: b,
                },
            );
        }
        s.vnf_instances.insert(slot(0, 0, 3, Role::Primary), 5);
        s.vnf_instances.insert(slot(0, 1, 3, Role::Backup), 1);
        s.vnf_instances.insert(slot(0, 2, 3, Role::Backup), 1);
        s.canonicalize();
        let r = check_feasibility(&s, &inst, &BTreeSet::new()).unwrap();
        assert_eq!(r.kinds(), BTreeSet::from([ConstraintKind::ServerCapacity]));
    }

    #[test]
    fn delay_throughput_and_placement() {
        let types = default_service_types();
        // AR/VR at node 0: site 1 is 2.5 ms away.
        let reqs: Vec<_> = (0..6)
            .map(|i| ServiceRequest::of_type(i, &types[0], 0))
            .collect();
        let inst = instance(reqs);
        let mut s = Solution::default();
        for i in 0..6 {
            serve(
                &mut s,
                i,
                slot(0, 0, 0, Role::Primary),
                slot(1, 0, 0, Role::Backup),
            );
        }
        let r = check_feasibility(&s, &inst, &BTreeSet::new()).unwrap();
        // 6 x 200 Mbps > 1 Gbps on each single-instance slot.
        assert_eq!(
            r.kinds(),
            BTreeSet::from([ConstraintKind::Delay, ConstraintKind::Throughput])
        );

        let mut s = Solution::default();
        serve(
            &mut s,
            0,
            slot(0, 0, 1, Role::Primary),
            slot(0, 1, 0, Role::Backup),
        );
        let rejected: BTreeSet<_> = (1..6).collect();
        let r = check_feasibility(&s, &inst, &rejected).unwrap();
        assert_eq!(
            r.violations,
            vec![Violation::TypeMismatch {
                request: 0,
                role: Role::Primary,
                slot_type: 1
            }]
        );

        let r = check_feasibility(&Solution::default(), &inst, &BTreeSet::new()).unwrap();
        assert_eq!(r.violations.len(), 6);
        assert!(r
            .violations
            .iter()
            .all(|v| matches!(v, Violation::Unassigned { .. })));
    }

    #[test]
    fn activation_bookkeeping() {
        let types = default_service_types();
        let inst = instance(vec![ServiceRequest::of_type(0, &types[1], 0)]);
        let mut s = Solution::default();
        serve(
            &mut s,
            0,
            slot(0, 0, 1, Role::Primary),
            slot(0, 1, 1, Role::Backup),
        );
        let mut broken = s.clone();
        broken.sites_used.insert(1);
        broken
            .active_servers
            .insert(ServerRef { site: 0, server: 2 });
        broken.vnf_instances.insert(slot(0, 3, 2, Role::Primary), 1);
        let r = check_feasibility(&broken, &inst, &BTreeSet::new()).unwrap();
        assert_eq!(r.kinds(), BTreeSet::from([ConstraintKind::Activation]));
        assert_eq!(r.violations.len(), 4);
    }

    #[test]
    fn unresolvable_ids() {
        let inst = instance(vec![]);
        let mut s = Solution::default();
        s.vnf_instances.insert(slot(5, 0, 0, Role::Primary), 1);
        assert_eq!(
            check_feasibility(&s, &inst, &BTreeSet::new()),
            Err(ModelError::UnknownSite(5))
        );
        assert_eq!(
            check_feasibility(&Solution::default(), &inst, &BTreeSet::from([3])),
            Err(ModelError::UnknownRequest(3))
        );
    }
}
