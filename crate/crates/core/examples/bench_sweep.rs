// A small request-count sweep written as CSV tables.
//
// cargo run --release --example bench_sweep [-- out_dir]

use mecplace::harness::{run_experiment, write_outputs, ExperimentPlan};
use mecplace::solvers::SolverKind;

pub fn run_example() -> anyhow::Result<()> {
    let plan = ExperimentPlan {
        request_counts: vec![10, 20],
        seeds_per_point: 2,
        ..ExperimentPlan::desk()
    };
    let result = run_experiment(&plan)?;
    for row in &result.agg {
        println!(
            "{:>3} requests {:<8} mean cost {:>9.1} over {} runs",
            row.requests,
            row.solver.name(),
            row.total_cost,
            row.runs
        );
    }
    if let Some(t) = result.mean_wall_time(20, SolverKind::Sa) {
        println!("sa at 20 requests: {:.3} s", t);
    }
    let dir = match std::env::args().nth(1) {
        Some(d) => d.into(),
        None => std::env::temp_dir().join("mecplace-bench"),
    };
    write_outputs(&result, &dir)?;
    println!("tables in {}", dir.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
