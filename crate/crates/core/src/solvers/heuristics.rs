//! Single-pass constructive placements.

use std::time::Instant;

use super::placement::{Placement, ScanPolicy};
use super::{finish, SolveReport, SolverKind};
use crate::model::{Instance, Role, ServerRef};

/// Request positions by ascending delay bound, then id.
pub(crate) fn latency_order(inst: &Instance) -> Vec<usize> {
    let reqs = inst.requests();
    let mut order: Vec<usize> = (0..reqs.len()).collect();
    order.sort_by(|&a, &b| {
        reqs[a]
            .max_delay
            .total_cmp(&reqs[b].max_delay)
            .then(reqs[a].id.cmp(&reqs[b].id))
    });
    order
}

/// Tries primary candidates in order; for each, takes the first backup
/// candidate. Leaves the request unplaced when no pair works.
fn place_pair<F>(
    p: &mut Placement<'_>,
    pos: usize,
    primaries: Vec<ServerRef>,
    mut backups: F,
) -> bool
where
    F: FnMut(&Placement<'_>, ServerRef) -> Vec<ServerRef>,
{
    for primary in primaries {
        p.place(pos, Role::Primary, primary);
        if let Some(&backup) = backups(p, primary).first() {
            p.place(pos, Role::Backup, backup);
            return true;
        }
        p.unplace(pos, Role::Primary);
    }
    false
}

/// First-fit over all servers in site/server order, most urgent requests
/// first, reusing deployed instances and active servers where possible.
pub(crate) fn first_fit(inst: &Instance) -> Placement<'_> {
    let servers: Vec<ServerRef> = inst.servers().collect();
    let mut p = Placement::new(inst);
    for pos in latency_order(inst) {
        let primaries = p.candidates(pos, Role::Primary, &servers, ScanPolicy::ReuseFirst);
        place_pair(&mut p, pos, primaries, |p, _| {
            p.candidates(pos, Role::Backup, &servers, ScanPolicy::ReuseFirst)
        });
    }
    p
}

fn site_servers(inst: &Instance, site: usize) -> Vec<ServerRef> {
    (0..inst.servers_per_site())
        .map(|server| ServerRef { site, server })
        .collect()
}

/// Nearest feasible site for each request; backup on the same site when a
/// second server fits, otherwise at the next-nearest site.
pub fn solve_greedy(inst: &Instance) -> SolveReport {
    let started = Instant::now();
    let mut p = Placement::new(inst);
    for pos in latency_order(inst) {
        let req = &inst.requests()[pos];
        let mut sites = inst.reachable_sites(req);
        sites.sort_by(|&a, &b| {
            inst.path_delay(a, req.attach_node)
                .total_cmp(&inst.path_delay(b, req.attach_node))
                .then(a.cmp(&b))
        });
        let primaries: Vec<ServerRef> = sites
            .iter()
            .flat_map(|&l| {
                p.candidates(
                    pos,
                    Role::Primary,
                    &site_servers(inst, l),
                    ScanPolicy::ReuseFirst,
                )
            })
            .collect();
        place_pair(&mut p, pos, primaries, |p, primary| {
            let same = p.candidates(
                pos,
                Role::Backup,
                &site_servers(inst, primary.site),
                ScanPolicy::ReuseFirst,
            );
            if !same.is_empty() {
                return same;
            }
            sites
                .iter()
                .filter(|&&l| l != primary.site)
                .flat_map(|&l| {
                    p.candidates(
                        pos,
                        Role::Backup,
                        &site_servers(inst, l),
                        ScanPolicy::ReuseFirst,
                    )
                })
                .collect()
        });
    }
    finish(SolverKind::Greedy, &p, 1, started)
}

/// Requests in input order; the first server in site/server order that
/// satisfies every constraint hosts the primary, and the scan continues
/// past it (wrapping around) for the backup.
pub fn solve_baseline(inst: &Instance) -> SolveReport {
    let started = Instant::now();
    let servers: Vec<ServerRef> = inst.servers().collect();
    let mut p = Placement::new(inst);
    for pos in 0..inst.requests().len() {
        let primaries = p.candidates(pos, Role::Primary, &servers, ScanPolicy::InOrder);
        place_pair(&mut p, pos, primaries, |p, primary| {
            let start = inst.server_index(primary) + 1;
            let rotated: Vec<ServerRef> = servers[start..]
                .iter()
                .chain(&servers[..start])
                .copied()
                .collect();
            p.candidates(pos, Role::Backup, &rotated, ScanPolicy::InOrder)
        });
    }
    finish(SolverKind::Baseline, &p, 1, started)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_feasibility, default_service_types, Config, ServiceRequest};

    fn config(servers: usize) -> Config {
        let mut c = Config::default();
        c.resources.servers_per_site = servers;
        c
    }

    #[test]
    fn greedy_picks_nearest_site() {
        let t = default_service_types();
        // e-health (5 ms) at node 0; site 0 is 3 ms away, site 1 is 1 ms away.
        let inst = Instance::new(
            vec![0, 1],
            vec![vec![3.0], vec![1.0]],
            vec![ServiceRequest::of_type(0, &t[2], 0)],
            config(2),
        )
        .unwrap();
        let r = solve_greedy(&inst);
        let a = r.solution.assignments[&0];
        assert_eq!(a.primary.site, 1);
        assert_eq!(a.backup.site, 1);
        // Baseline ignores distance.
        let b = solve_baseline(&inst);
        assert_eq!(b.solution.assignments[&0].primary.site, 0);
    }

    #[test]
    fn greedy_spills_to_next_site_when_full() {
        let t = default_service_types();
        // One server per site: backup cannot share the nearest site.
        let inst = Instance::new(
            vec![0, 1, 2],
            vec![vec![1.0], vec![2.0], vec![3.0]],
            vec![ServiceRequest::of_type(0, &t[2], 0)],
            config(1),
        )
        .unwrap();
        let a = solve_greedy(&inst).solution.assignments[&0];
        assert_eq!((a.primary.site, a.backup.site), (0, 1));

        // One VNF per server: the first request fills the nearest site, the
        // second (a different type) must move to the next-nearest one.
        let mut cfg = config(2);
        cfg.resources.server_cores = 4;
        let reqs = vec![
            ServiceRequest::of_type(0, &t[1], 0),
            ServiceRequest::of_type(1, &t[2], 0),
        ];
        let inst = Instance::new(
            vec![0, 1, 2],
            vec![vec![0.0], vec![0.5], vec![0.7]],
            reqs,
            cfg,
        )
        .unwrap();
        let r = solve_greedy(&inst);
        assert!(r.rejected_requests.is_empty());
        let report = check_feasibility(&r.solution, &inst, &r.rejected_set()).unwrap();
        assert!(report.is_feasible(), "{:?}", report.violations);
        let a0 = r.solution.assignments[&0];
        let a1 = r.solution.assignments[&1];
        assert_eq!((a0.primary.site, a0.backup.site), (0, 0));
        assert_eq!((a1.primary.site, a1.backup.site), (1, 1));
    }

    #[test]
    fn empty_requests() {
        let inst = Instance::new(vec![0], vec![vec![0.0]], vec![], config(2)).unwrap();
        for r in [solve_baseline(&inst), solve_greedy(&inst)] {
            assert!(r.solution.assignments.is_empty());
            assert_eq!(r.cost.total, 0.0);
        }
    }

    #[test]
    fn unreachable_request_is_rejected() {
        let t = default_service_types();
        let inst = Instance::new(
            vec![0],
            vec![vec![5.0]],
            vec![ServiceRequest::of_type(0, &t[0], 0)],
            config(2),
        )
        .unwrap();
        for r in [solve_baseline(&inst), solve_greedy(&inst)] {
            assert_eq!(r.rejected_requests, vec![0]);
        }
    }

    #[test]
    fn first_fit_sorts_by_urgency_and_shares() {
        let t = default_service_types();
        let reqs = vec![
            ServiceRequest::of_type(0, &t[3], 0),
            ServiceRequest::of_type(1, &t[0], 0),
            ServiceRequest::of_type(2, &t[1], 0),
            ServiceRequest::of_type(3, &t[1], 0),
        ];
        let inst = Instance::new(vec![0], vec![vec![0.5]], reqs, config(2)).unwrap();
        assert_eq!(latency_order(&inst), vec![1, 2, 3, 0]);
        let sol = first_fit(&inst).to_solution();
        assert_eq!(sol.assignments[&2], sol.assignments[&3]);
    }
}
