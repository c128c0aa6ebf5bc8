use serde::{Deserialize, Serialize};

use super::{Instance, ModelError, Role, Solution};

/// Objective value with its three unweighted components.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub total: f64,
    /// Server activation cost.
    pub server: f64,
    /// VNF deployment cost (primary and backup instances).
    pub vnf: f64,
    /// Traffic forwarding cost (primary and backup assignments).
    pub traffic: f64,
}

impl CostBreakdown {
    pub fn from_parts(instance: &Instance, server: f64, vnf: f64, traffic: f64) -> CostBreakdown {
        let w = instance.costs().weights;
        CostBreakdown {
            total: w[0] * server + w[1] * vnf + w[2] * traffic,
            server,
            vnf,
            traffic,
        }
    }

    /// Components multiplied by their weights; they sum to `total`.
    pub fn weighted(&self, instance: &Instance) -> [f64; 3] {
        let w = instance.costs().weights;
        [w[0] * self.server, w[1] * self.vnf, w[2] * self.traffic]
    }
}

/// Weighted sum of server activation, VNF deployment and forwarding cost.
///
/// Forwarding cost counts each request's data rate once per served role.
/// With `delay_weighted_traffic` the rate is additionally multiplied by the
/// site-to-base-station delay of that role.
pub fn evaluate_cost(
    solution: &Solution,
    instance: &Instance,
) -> Result<CostBreakdown, ModelError> {
    let costs = instance.costs();
    for s in &solution.active_servers {
        if !instance.contains_server(*s) {
            return Err(ModelError::UnknownServer {
                site: s.site,
                server: s.server,
            });
        }
    }
    let instances: u32 = solution.vnf_instances.values().sum();

    let mut traffic = 0.0;
    for (&rid, a) in &solution.assignments {
        let req = instance
            .request(rid)
            .ok_or(ModelError::UnknownRequest(rid))?;
        for role in [Role::Primary, Role::Backup] {
            let slot = a.slot(role);
            if !instance.contains_server(slot.server_ref()) {
                return Err(ModelError::UnknownServer {
                    site: slot.site,
                    server: slot.server,
                });
            }
            let factor = if instance.options().delay_weighted_traffic {
                instance.path_delay(slot.site, req.attach_node)
            } else {
                1.0
            };
            traffic += req.data_rate * factor;
        }
    }

    Ok(CostBreakdown::from_parts(
        instance,
        costs.server_cost * solution.active_servers.len() as f64,
        costs.vnf_cost * instances as f64,
        costs.traffic_cost * traffic,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{default_service_types, Assignment, Config, ServiceRequest, SlotKey};

    fn one_request_solution() -> (Instance, Solution) {
        let types = default_service_types();
        let req = ServiceRequest::of_type(0, &types[1], 0);
        let inst = Instance::new(vec![0], vec![vec![0.5]], vec![req], Config::default()).unwrap();
        let p = SlotKey {
            site: 0,
            server: 0,
            vnf_type: 1,
            role: Role::Primary,
        };
        let b = SlotKey {
            server: 1,
            role: Role::Backup,
            ..p
        };
        let mut s = Solution::default();
        s.vnf_instances.insert(p, 1);
        s.vnf_instances.insert(b, 1);
        s.assignments.insert(
            0,
            Assignment {
                primary: p,
                backup: b,
            },
        );
        s.canonicalize();
        (inst, s)
    }

    #[test]
    fn empty_costs_nothing() {
        let inst = Instance::new(vec![], vec![], vec![], Config::default()).unwrap();
        let c = evaluate_cost(&Solution::default(), &inst).unwrap();
        assert_eq!(c, CostBreakdown::default());
    }

    #[test]
    fn one_protected_request() {
        let (inst, s) = one_request_solution();
        let c = evaluate_cost(&s, &inst).unwrap();
        assert_eq!((c.server, c.vnf, c.traffic), (200.0, 20.0, 200.0));
        assert_eq!(c.total, 420.0);
        assert_eq!(c.weighted(&inst).iter().sum::<f64>(), c.total);
    }

    #[test]
    fn delay_weighted_variant() {
        let (inst, s) = one_request_solution();
        let mut cfg = inst.config().clone();
        cfg.options.delay_weighted_traffic = true;
        let inst = Instance::new(
            inst.sites().to_vec(),
            vec![vec![0.5]],
            inst.requests().to_vec(),
            cfg,
        )
        .unwrap();
        let c = evaluate_cost(&s, &inst).unwrap();
        assert_eq!(c.traffic, 100.0);
    }

    #[test]
    fn unknown_request_is_an_error() {
        let (inst, mut s) = one_request_solution();
        let a = s.assignments.remove(&0).unwrap();
        s.assignments.insert(9, a);
        assert_eq!(evaluate_cost(&s, &inst), Err(ModelError::UnknownRequest(9)));
    }
}
