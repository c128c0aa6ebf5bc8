// Load an SNDlib network and inspect its delay structure.
//
// cargo run --example parse_topology [-- path/to/network.txt]

use mecplace::topology::{all_pairs_delay, all_pairs_hops, parse_sndlib, Topology};

pub fn run_example() -> anyhow::Result<()> {
    let net = match std::env::args().nth(1) {
        Some(path) => parse_sndlib(&std::fs::read_to_string(path)?)?,
        None => Topology::germany50(),
    };
    println!(
        "{}: {} nodes, {} links",
        net.name,
        net.node_count(),
        net.links.len()
    );

    let longest = net
        .links
        .iter()
        .max_by(|a, b| a.length_km.total_cmp(&b.length_km))
        .expect("network has links");
    let (a, b) = longest.endpoints;
    println!(
        "longest link {} - {}: {:.1} km, {:.3} ms",
        net.nodes[a].label, net.nodes[b].label, longest.length_km, longest.delay_ms
    );

    let delay = all_pairs_delay(&net);
    let hops = all_pairs_hops(&net);
    println!(
        "delay diameter {:.3} ms, hop diameter {}",
        delay.diameter(),
        hops.diameter()
    );

    // Writing the network back out and reparsing it loses nothing.
    let again = parse_sndlib(&net.to_sndlib())?;
    anyhow::ensure!(again == net, "round trip changed the network");
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
