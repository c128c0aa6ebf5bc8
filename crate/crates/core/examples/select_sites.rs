// Pick MEC sites by closeness centrality and compare with random picks.
//
// cargo run --example select_sites

use mecplace::centrality::{RankingMetric, SiteSelector};
use mecplace::harness::{emit_fig2_table, write_coverage_csv};
use mecplace::topology::Topology;

pub fn run_example() -> anyhow::Result<()> {
    let net = Topology::germany50();
    let selector = SiteSelector::new(&net, RankingMetric::Hops)?;

    for d_max in [1.5, 2.0, 3.0] {
        let sel = selector.select(d_max)?;
        let labels: Vec<&str> = sel
            .sites
            .iter()
            .map(|&s| net.nodes[s].label.as_str())
            .collect();
        println!(
            "d_max {d_max} ms -> {} sites {:?} (avg {:.3} ms, max {:.3} ms)",
            sel.sites.len(),
            labels,
            sel.avg_delay,
            sel.max_delay
        );
    }

    let rows = emit_fig2_table(&selector, 1..=10, 20, 7)?;
    write_coverage_csv(std::io::stdout().lock(), &rows)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
