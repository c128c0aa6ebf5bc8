//! Edge-cloud planning: pick MEC sites on a network by closeness
//! centrality, then place primary and backup VNFs for a batch of service
//! requests so that delay, capacity and anti-affinity hold and a weighted
//! server/VNF/traffic cost is minimized.
//!
//! ```
//! use mecplace::centrality::{RankingMetric, SiteSelector};
//! use mecplace::topology::Topology;
//!
//! let net = Topology::germany50();
//! let sites = SiteSelector::new(&net, RankingMetric::Hops).unwrap().select(2.0).unwrap();
//! assert!(sites.max_delay <= 2.0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod centrality;
pub mod harness;
pub mod model;
pub mod solvers;
pub mod survivability;
pub mod topology;

pub use centrality::{
    select_sites_cc, select_sites_random, RankingMetric, SiteSelection, SiteSelector,
};
pub use model::{check_feasibility, evaluate_cost, Config, Instance, ServiceRequest, Solution};
pub use solvers::{
    solve, solve_baseline, solve_exact, solve_greedy, solve_sa, SolveReport, SolverKind,
};
pub use survivability::{enumerate_single_failures, survives, FailureScenario};
pub use topology::{parse_sndlib, Topology};
