//! Single-failure analysis of a placement.
//!
//! A failure takes out either one VNF slot (all pooled instances of one
//! type and role on one server) or a whole server. A request is affected
//! when its primary slot is hit; it survives when its backup slot is intact
//! and still meets the delay bound and the throughput reserved for it.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{Instance, RequestId, ServerRef, SlotKey, Solution, EPS};

#[derive(Debug, Error, PartialEq)]
pub enum SurvivabilityError {
    #[error("failure target {0} is not part of the solution")]
    UnknownTarget(FailureTarget),
    #[error("scenario has no targets")]
    EmptyScenario,
    #[error("request {0} in the solution is not in the instance")]
    UnknownRequest(RequestId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureTarget {
    VnfInstance { slot: SlotKey },
    Server { server: ServerRef },
}

impl FailureTarget {
    pub fn kind(&self) -> &'static str {
        match self {
            FailureTarget::VnfInstance { .. } => "vnf_instance",
            FailureTarget::Server { .. } => "server",
        }
    }

    pub fn hits(&self, slot: &SlotKey) -> bool {
        match self {
            FailureTarget::VnfInstance { slot: s } => s == slot,
            FailureTarget::Server { server } => slot.server_ref() == *server,
        }
    }

    fn exists_in(&self, s: &Solution) -> bool {
        match self {
            FailureTarget::VnfInstance { slot } => s.vnf_instances.contains_key(slot),
            FailureTarget::Server { server } => s.active_servers.contains(server),
        }
    }
}

impl fmt::Display for FailureTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureTarget::VnfInstance { slot } => write!(
                f,
                "site{}/server{}/type{}/{}",
                slot.site, slot.server, slot.vnf_type, slot.role
            ),
            FailureTarget::Server { server } => {
                write!(f, "site{}/server{}", server.site, server.server)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureScenario {
    pub targets: Vec<FailureTarget>,
    /// Requests whose primary slot is hit, ascending.
    pub affected_requests: Vec<RequestId>,
}

impl FailureScenario {
    pub fn single(
        solution: &Solution,
        target: FailureTarget,
    ) -> Result<FailureScenario, SurvivabilityError> {
        FailureScenario::combined(solution, vec![target])
    }

    /// Simultaneous failure of several targets.
    pub fn combined(
        solution: &Solution,
        targets: Vec<FailureTarget>,
    ) -> Result<FailureScenario, SurvivabilityError> {
        if targets.is_empty() {
            return Err(SurvivabilityError::EmptyScenario);
        }
        if let Some(t) = targets.iter().find(|t| !t.exists_in(solution)) {
            return Err(SurvivabilityError::UnknownTarget(*t));
        }
        let affected_requests = solution
            .assignments
            .iter()
            .filter(|(_, a)| targets.iter().any(|t| t.hits(&a.primary)))
            .map(|(&r, _)| r)
            .collect();
        Ok(FailureScenario {
            targets,
            affected_requests,
        })
    }

    pub fn hits(&self, slot: &SlotKey) -> bool {
        self.targets.iter().any(|t| t.hits(slot))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RequestVerdict {
    pub request: RequestId,
    pub survived: bool,
}

/// Verdict for every request the scenario affects.
pub fn survives(
    solution: &Solution,
    scenario: &FailureScenario,
    instance: &Instance,
) -> Result<Vec<RequestVerdict>, SurvivabilityError> {
    if let Some(t) = scenario.targets.iter().find(|t| !t.exists_in(solution)) {
        return Err(SurvivabilityError::UnknownTarget(*t));
    }
    let res = instance.resources();
    let mut out = Vec::with_capacity(scenario.affected_requests.len());
    for &rid in &scenario.affected_requests {
        let req = instance
            .request(rid)
            .ok_or(SurvivabilityError::UnknownRequest(rid))?;
        let Some(a) = solution.assignments.get(&rid) else {
            out.push(RequestVerdict {
                request: rid,
                survived: false,
            });
            continue;
        };
        let backup = a.backup;
        let intact = !scenario.hits(&backup);
        let delay_ok = backup.site < instance.site_count() && instance.reachable(backup.site, req);
        // Backups are hot: their capacity is reserved up front, so the slot
        // must already carry every request that may fail over onto it.
        let load: f64 = solution
            .requests_on(&backup)
            .filter_map(|r| instance.request(r))
            .map(|r| r.data_rate)
            .sum();
        let count = solution.vnf_instances.get(&backup).copied().unwrap_or(0);
        let capacity_ok = count > 0 && load <= count as f64 * res.vnf_throughput + EPS;
        out.push(RequestVerdict {
            request: rid,
            survived: intact && delay_ok && capacity_ok,
        });
    }
    Ok(out)
}

/// One scenario per active server and one per deployed slot.
pub fn enumerate_single_failures(solution: &Solution) -> Vec<FailureScenario> {
    let servers: BTreeSet<ServerRef> = solution
        .active_servers
        .iter()
        .copied()
        .chain(solution.vnf_instances.keys().map(SlotKey::server_ref))
        .collect();
    let targets = servers
        .into_iter()
        .map(|server| FailureTarget::Server { server })
        .chain(
            solution
                .vnf_instances
                .keys()
                .map(|&slot| FailureTarget::VnfInstance { slot }),
        );
    targets
        .filter_map(|t| FailureScenario::single(solution, t).ok())
        .collect()
}

/// One line of a survivability report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioOutcome {
    pub scenario: usize,
    pub kind: &'static str,
    pub target: String,
    pub affected: usize,
    pub survived: usize,
    pub pass: bool,
}

/// Runs every single-failure scenario of `solution`.
pub fn single_failure_report(
    solution: &Solution,
    instance: &Instance,
) -> Result<Vec<ScenarioOutcome>, SurvivabilityError> {
    enumerate_single_failures(solution)
        .into_iter()
        .enumerate()
        .map(|(i, sc)| {
            let verdicts = survives(solution, &sc, instance)?;
            let survived = verdicts.iter().filter(|v| v.survived).count();
            let t = sc.targets[0];
            Ok(ScenarioOutcome {
                scenario: i,
                kind: t.kind(),
                target: t.to_string(),
                affected: verdicts.len(),
                survived,
                pass: survived == verdicts.len(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{default_service_types, Assignment, Config, Role, ServiceRequest};

    fn setup() -> (Instance, Solution) {
        let t = default_service_types();
        let mut cfg = Config::default();
        cfg.resources.servers_per_site = 3;
        let reqs = vec![
            ServiceRequest::of_type(0, &t[1], 0),
            ServiceRequest::of_type(1, &t[2], 0),
        ];
        let inst = Instance::new(vec![0], vec![vec![0.5]], reqs, cfg).unwrap();
        let s0 = ServerRef { site: 0, server: 0 };
        let s1 = ServerRef { site: 0, server: 1 };
        let s2 = ServerRef { site: 0, server: 2 };
        let mut sol = Solution::default();
        let a0 = Assignment {
            primary: SlotKey::new(s0, 1, Role::Primary),
            backup: SlotKey::new(s1, 1, Role::Backup),
        };
        let a1 = Assignment {
            primary: SlotKey::new(s0, 2, Role::Primary),
            backup: SlotKey::new(s2, 2, Role::Backup),
        };
        for a in [a0, a1] {
            sol.vnf_instances.insert(a.primary, 1);
            sol.vnf_instances.insert(a.backup, 1);
        }
        sol.assignments.insert(0, a0);
        sol.assignments.insert(1, a1);
        sol.canonicalize();
        (inst, sol)
    }

    #[test]
    fn empty_solution_has_no_scenarios() {
        assert!(enumerate_single_failures(&Solution::default()).is_empty());
    }

    #[test]
    fn one_scenario_per_server_and_slot() {
        let (_, sol) = setup();
        assert_eq!(enumerate_single_failures(&sol).len(), 3 + 4);
    }

    #[test]
    fn single_failures_all_survive() {
        let (inst, sol) = setup();
        let report = single_failure_report(&sol, &inst).unwrap();
        assert!(report.iter().all(|r| r.pass));
        let server0 = &report[0];
        assert_eq!((server0.affected, server0.survived), (2, 2));
    }

    #[test]
    fn backup_only_server_affects_nobody() {
        let (inst, sol) = setup();
        let sc = FailureScenario::single(
            &sol,
            FailureTarget::Server {
                server: ServerRef { site: 0, server: 1 },
            },
        )
        .unwrap();
        assert!(sc.affected_requests.is_empty());
        assert!(survives(&sol, &sc, &inst).unwrap().is_empty());
    }

    #[test]
    fn double_failure_kills_the_request() {
        let (inst, sol) = setup();
        let sc = FailureScenario::combined(
            &sol,
            vec![
                FailureTarget::Server {
                    server: ServerRef { site: 0, server: 0 },
                },
                FailureTarget::Server {
                    server: ServerRef { site: 0, server: 1 },
                },
            ],
        )
        .unwrap();
        let v = survives(&sol, &sc, &inst).unwrap();
        assert_eq!(
            v,
            vec![
                RequestVerdict {
                    request: 0,
                    survived: false
                },
                RequestVerdict {
                    request: 1,
                    survived: true
                },
            ]
        );
    }

    #[test]
    fn unknown_target_is_an_error() {
        let (_, sol) = setup();
        let ghost = FailureTarget::Server {
            server: ServerRef { site: 0, server: 7 },
        };
        assert_eq!(
            FailureScenario::single(&sol, ghost),
            Err(SurvivabilityError::UnknownTarget(ghost))
        );
    }

    #[test]
    fn underprovisioned_backup_fails() {
        let (inst, mut sol) = setup();
        let backup = sol.assignments[&0].backup;
        sol.vnf_instances.insert(backup, 0);
        let sc = FailureScenario::single(
            &sol,
            FailureTarget::Server {
                server: ServerRef { site: 0, server: 0 },
            },
        )
        .unwrap();
        let v = survives(&sol, &sc, &inst).unwrap();
        assert!(!v[0].survived && v[1].survived);
    }
}
