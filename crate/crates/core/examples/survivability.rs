// Replay every single server and VNF failure against a placement, then
// show that a double failure can break a request.
//
// cargo run --example survivability

use mecplace::harness::{tiny_instance, TinySpec};
use mecplace::solvers::{solve_sa, SaParams};
use mecplace::survivability::{single_failure_report, survives, FailureScenario, FailureTarget};

pub fn run_example() -> anyhow::Result<()> {
    let inst = tiny_instance(&TinySpec::default(), 3)?;
    let report = solve_sa(&inst, &SaParams::with_seed(1))?;
    let sol = &report.solution;

    for o in single_failure_report(sol, &inst)? {
        println!(
            "{:<13} {:<28} affected {:>2} survived {:>2}",
            o.kind, o.target, o.affected, o.survived
        );
        anyhow::ensure!(o.pass, "single failure lost a request");
    }

    let (&rid, a) = sol.assignments.iter().next().expect("something was placed");
    let both = FailureScenario::combined(
        sol,
        vec![
            FailureTarget::Server {
                server: a.primary.server_ref(),
            },
            FailureTarget::Server {
                server: a.backup.server_ref(),
            },
        ],
    )?;
    let lost = survives(sol, &both, &inst)?
        .into_iter()
        .filter(|v| !v.survived)
        .count();
    println!("primary and backup servers of request {rid} down: {lost} requests lost");
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
