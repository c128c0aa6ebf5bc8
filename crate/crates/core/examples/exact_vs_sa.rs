// Optimality gap of annealing against branch and bound on tiny instances.
//
// cargo run --release --example exact_vs_sa

use mecplace::harness::{tiny_instance, TinySpec};
use mecplace::solvers::{solve_exact, solve_sa, ExactLimits, SaParams};

pub fn run_example() -> anyhow::Result<()> {
    let spec = TinySpec::default();
    for seed in 0..5 {
        let inst = tiny_instance(&spec, seed)?;
        let exact = solve_exact(&inst, &ExactLimits::default())?;
        let sa = solve_sa(&inst, &SaParams::with_seed(seed))?;
        let gap = (sa.cost.total - exact.cost.total) / exact.cost.total.max(f64::MIN_POSITIVE);
        println!(
            "instance {seed}: {} requests, {} sites, exact {:.1} ({} nodes), sa {:.1}, gap {:.2}%",
            inst.requests().len(),
            inst.site_count(),
            exact.cost.total,
            exact.iterations_evaluated,
            sa.cost.total,
            100.0 * gap
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
