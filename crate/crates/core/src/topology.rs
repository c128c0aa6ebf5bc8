//! Network topology: SNDlib native-format ingestion, link delays and
//! all-pairs shortest-path matrices.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Node index into [`Topology::nodes`].
pub type NodeId = usize;

/// Mean Earth radius used for great-circle distances, in km.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Signal propagation speed in optical fiber, in km per millisecond (2e5 km/s).
pub const FIBER_KM_PER_MS: f64 = 200.0;

/// The germany50 reference network in SNDlib native format.
pub const GERMANY50: &str = include_str!("../data/germany50.txt");

#[derive(Debug, Error, PartialEq)]
pub enum TopologyError {
    #[error("line {line}: malformed section header `{text}`")]
    BadSectionHeader { line: usize, text: String },
    #[error("line {line}: malformed {section} entry `{text}`")]
    BadEntry {
        line: usize,
        section: &'static str,
        text: String,
    },
    #[error("line {line}: duplicate node id `{id}`")]
    DuplicateNode { line: usize, id: String },
    #[error("line {line}: link references unknown node `{id}`")]
    UnknownNode { line: usize, id: String },
    #[error("line {line}: self-loop on node `{id}`")]
    SelfLoop { line: usize, id: String },
    #[error("line {line}: coordinates out of range ({lon}, {lat})")]
    BadCoordinates { line: usize, lon: f64, lat: f64 },
    #[error("line {line}: link between `{a}` and `{b}` has zero length")]
    ZeroLengthLink { line: usize, a: String, b: String },
    #[error("line {line}: section `{section}` is not closed")]
    UnclosedSection { line: usize, section: String },
    #[error("link endpoint {0} is not a node of this topology")]
    InvalidEndpoint(NodeId),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub label: String,
    pub latitude: f64,
    pub longitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    /// Endpoints, stored with the smaller id first.
    pub endpoints: (NodeId, NodeId),
    pub length_km: f64,
    pub delay_ms: f64,
}

impl Link {
    fn between(a: &Node, b: &Node) -> Link {
        let length_km = haversine_km(a.latitude, a.longitude, b.latitude, b.longitude);
        Link {
            endpoints: (a.id.min(b.id), a.id.max(b.id)),
            length_km,
            delay_ms: length_km / FIBER_KM_PER_MS,
        }
    }
}

/// Undirected network of base stations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub name: String,
    pub nodes: Vec<Node>,
    pub links: Vec<Link>,
}

/// Great-circle distance between two coordinates given in degrees.
pub fn haversine_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dp = p2 - p1;
    let dl = (lon2 - lon1).to_radians();
    let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Nodes,
    Links,
    Skipped,
}

/// Parses the supported subset of the SNDlib native format.
///
/// `NODES` and `LINKS` are interpreted; any other parenthesised section
/// (`META`, `DEMANDS`, `ADMISSIBLE_PATHS`, ...) is skipped. Link lengths are
/// great-circle distances between the endpoint coordinates and delays assume
/// fiber propagation. Parallel links collapse onto the shortest one.
pub fn parse_sndlib(text: &str) -> Result<Topology, TopologyError> {
    let mut name = String::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut by_label: HashMap<String, NodeId> = HashMap::new();
    let mut links: Vec<Link> = Vec::new();
    let mut link_index: HashMap<(NodeId, NodeId), usize> = HashMap::new();
    let mut section: Option<(Section, String, usize)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') || line.starts_with('?') {
            if let Some(rest) = line.strip_prefix("# network ") {
                name = rest.trim().to_string();
            }
            continue;
        }

        match &section {
            None => {
                let mut parts = line.split_whitespace();
                let (Some(head), Some("("), None) = (parts.next(), parts.next(), parts.next())
                else {
                    return Err(TopologyError::BadSectionHeader {
                        line: line_no,
                        text: line.to_string(),
                    });
                };
                if !head.chars().all(|c| c.is_ascii_uppercase() || c == '_') {
                    return Err(TopologyError::BadSectionHeader {
                        line: line_no,
                        text: line.to_string(),
                    });
                }
                let kind = match head {
                    "NODES" => Section::Nodes,
                    "LINKS" => Section::Links,
                    _ => Section::Skipped,
                };
                section = Some((kind, head.to_string(), line_no));
            }
            Some(_) if line == ")" => section = None,
            Some((Section::Skipped, _, _)) => {}
            Some((Section::Nodes, _, _)) => {
                let (label, lon, lat) =
                    parse_node_line(line).ok_or_else(|| TopologyError::BadEntry {
                        line: line_no,
                        section: "NODES",
                        text: line.to_string(),
                    })?;
                if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
                    return Err(TopologyError::BadCoordinates {
                        line: line_no,
                        lon,
                        lat,
                    });
                }
                if by_label.contains_key(label) {
                    return Err(TopologyError::DuplicateNode {
                        line: line_no,
                        id: label.to_string(),
                    });
                }
                let id = nodes.len();
                by_label.insert(label.to_string(), id);
                nodes.push(Node {
                    id,
                    label: label.to_string(),
                    latitude: lat,
                    longitude: lon,
                });
            }
            Some((Section::Links, _, _)) => {
                let (a, b) = parse_link_line(line).ok_or_else(|| TopologyError::BadEntry {
                    line: line_no,
                    section: "LINKS",
                    text: line.to_string(),
                })?;
                let lookup = |id: &str| {
                    by_label
                        .get(id)
                        .copied()
                        .ok_or_else(|| TopologyError::UnknownNode {
                            line: line_no,
                            id: id.to_string(),
                        })
                };
                let (ia, ib) = (lookup(a)?, lookup(b)?);
                if ia == ib {
                    return Err(TopologyError::SelfLoop {
                        line: line_no,
                        id: a.to_string(),
                    });
                }
                let link = Link::between(&nodes[ia], &nodes[ib]);
                if link.delay_ms <= 0.0 {
                    return Err(TopologyError::ZeroLengthLink {
                        line: line_no,
                        a: a.to_string(),
                        b: b.to_string(),
                    });
                }
                match link_index.get(&link.endpoints) {
                    Some(&existing) => {
                        log::warn!(
                            "line {line_no}: parallel link {a}-{b} collapsed onto the shorter one"
                        );
                        if link.delay_ms < links[existing].delay_ms {
                            links[existing] = link;
                        }
                    }
                    None => {
                        link_index.insert(link.endpoints, links.len());
                        links.push(link);
                    }
                }
            }
        }
    }

    if let Some((_, head, line)) = section {
        return Err(TopologyError::UnclosedSection {
            line,
            section: head,
        });
    }
    Ok(Topology { name, nodes, links })
}

// `Label ( lon lat )`
fn parse_node_line(line: &str) -> Option<(&str, f64, f64)> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    match toks.as_slice() {
        [label, "(", lon, lat, ")", ..] => Some((label, lon.parse().ok()?, lat.parse().ok()?)),
        _ => None,
    }
}

// `LinkId ( src dst ) <capacity data...>`
fn parse_link_line(line: &str) -> Option<(&str, &str)> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    match toks.as_slice() {
        [_, "(", a, b, ")", ..] => Some((a, b)),
        _ => None,
    }
}

impl Topology {
    /// Builds a topology from explicit nodes and endpoint pairs, deriving
    /// link lengths and delays from coordinates.
    pub fn from_coordinates(
        name: &str,
        coords: &[(&str, f64, f64)],
        edges: &[(NodeId, NodeId)],
    ) -> Result<Topology, TopologyError> {
        let mut text = format!("# network {name}\nNODES (\n");
        for (label, lon, lat) in coords {
            let _ = writeln!(text, "  {label} ( {lon} {lat} )");
        }
        text.push_str(")\nLINKS (\n");
        for (i, &(a, b)) in edges.iter().enumerate() {
            let la = coords.get(a).ok_or(TopologyError::InvalidEndpoint(a))?.0;
            let lb = coords.get(b).ok_or(TopologyError::InvalidEndpoint(b))?.0;
            let _ = writeln!(text, "  L{} ( {la} {lb} )", i + 1);
        }
        text.push_str(")\n");
        parse_sndlib(&text)
    }

    pub fn germany50() -> Topology {
        parse_sndlib(GERMANY50).expect("bundled germany50 topology parses")
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_by_label(&self, label: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.label == label)
    }

    /// Adjacency lists of `(neighbor, delay_ms)`.
    pub fn adjacency(&self) -> Vec<Vec<(NodeId, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for link in &self.links {
            let (a, b) = link.endpoints;
            adj[a].push((b, link.delay_ms));
            adj[b].push((a, link.delay_ms));
        }
        adj
    }

    /// Adds a link between two existing nodes (or shortens an existing one).
    pub fn add_link(&mut self, a: NodeId, b: NodeId) -> Result<(), TopologyError> {
        let n = self.nodes.len();
        for id in [a, b] {
            if id >= n {
                return Err(TopologyError::InvalidEndpoint(id));
            }
        }
        if a == b {
            return Err(TopologyError::SelfLoop {
                line: 0,
                id: self.nodes[a].label.clone(),
            });
        }
        let link = Link::between(&self.nodes[a], &self.nodes[b]);
        match self
            .links
            .iter_mut()
            .find(|l| l.endpoints == link.endpoints)
        {
            Some(existing) if existing.delay_ms > link.delay_ms => *existing = link,
            Some(_) => {}
            None => self.links.push(link),
        }
        Ok(())
    }

    /// Serializes to SNDlib native format; `parse_sndlib` reads it back
    /// into an identical topology.
    pub fn to_sndlib(&self) -> String {
        let mut out = String::from("?SNDlib native format; type: network; version: 1.0\n");
        let _ = writeln!(out, "# network {}\n", self.name);
        out.push_str("NODES (\n");
        for n in &self.nodes {
            let _ = writeln!(out, "  {} ( {} {} )", n.label, n.longitude, n.latitude);
        }
        out.push_str(")\n\nLINKS (\n");
        for (i, l) in self.links.iter().enumerate() {
            let (a, b) = l.endpoints;
            let _ = writeln!(
                out,
                "  L{} ( {} {} ) 0.00 0.00 0.00 0.00 ( )",
                i + 1,
                self.nodes[a].label,
                self.nodes[b].label
            );
        }
        out.push_str(")\n");
        out
    }
}

/// Dense symmetric matrix of pairwise shortest-path distances.
///
/// Disconnected pairs hold `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

/// Shortest-path propagation delays in milliseconds.
pub type DelayMatrix = DistanceMatrix;

impl DistanceMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> DistanceMatrix {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "distance matrix must be square");
            data.extend(row);
        }
        DistanceMatrix { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: NodeId, j: NodeId) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: NodeId) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Every distance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> DistanceMatrix {
        DistanceMatrix {
            n: self.n,
            data: self.data.iter().map(|d| d * factor).collect(),
        }
    }

    /// First disconnected pair, if any.
    pub fn unreachable_pair(&self) -> Option<(NodeId, NodeId)> {
        (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .find(|&(i, j)| !self.get(i, j).is_finite())
    }

    /// Largest finite entry.
    pub fn diameter(&self) -> f64 {
        self.data
            .iter()
            .copied()
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max)
    }
}

impl Serialize for DistanceMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            n: usize,
            delay_ms: Vec<Vec<Option<f64>>>,
        }
        Repr {
            n: self.n,
            delay_ms: (0..self.n)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .map(|d| d.is_finite().then_some(*d))
                        .collect()
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: NodeId,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(adj: &[Vec<(NodeId, f64)>], source: NodeId) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapEntry {
        dist: 0.0,
        node: source,
    });
    while let Some(HeapEntry { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        for &(next, w) in &adj[node] {
            let nd = d + w;
            if nd < dist[next] {
                dist[next] = nd;
                heap.push(HeapEntry {
                    dist: nd,
                    node: next,
                });
            }
        }
    }
    dist
}

/// Delay-weighted shortest paths between every node pair (Dijkstra per source).
pub fn all_pairs_delay(topology: &Topology) -> DelayMatrix {
    let adj = topology.adjacency();
    let n = adj.len();
    let mut data = Vec::with_capacity(n * n);
    for s in 0..n {
        data.extend(dijkstra(&adj, s));
    }
    // Summation order differs between the two directions of a pair.
    for i in 0..n {
        for j in (i + 1)..n {
            let m = data[i * n + j].min(data[j * n + i]);
            data[i * n + j] = m;
            data[j * n + i] = m;
        }
    }
    DistanceMatrix { n, data }
}

/// Hop-count shortest paths between every node pair (BFS per source).
pub fn all_pairs_hops(topology: &Topology) -> DistanceMatrix {
    let adj = topology.adjacency();
    let n = adj.len();
    let mut data = vec![f64::INFINITY; n * n];
    let mut queue = std::collections::VecDeque::new();
    for s in 0..n {
        let row = &mut data[s * n..(s + 1) * n];
        row[s] = 0.0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &adj[u] {
                if row[v].is_infinite() {
                    row[v] = row[u] + 1.0;
                    queue.push_back(v);
                }
            }
        }
    }
    DistanceMatrix { n, data }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Points on the equator; 100 km apart is 100 / (R * pi / 180) degrees.
    fn deg_for_km(km: f64) -> f64 {
        km / (EARTH_RADIUS_KM * std::f64::consts::PI / 180.0)
    }

    #[test]
    fn single_node_file() {
        let t = parse_sndlib("NODES (\n  A ( 10.0 50.0 )\n)\n").unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert!(t.links.is_empty());
        let d = all_pairs_delay(&t);
        assert_eq!(d.len(), 1);
        assert_eq!(d.get(0, 0), 0.0);
    }

    #[test]
    fn germany50_counts() {
        let t = Topology::germany50();
        assert_eq!(t.nodes.len(), 50);
        assert_eq!(t.links.len(), 88);
        assert_eq!(t.name, "germany50");
    }

    #[test]
    fn triangle_of_100km_links_has_half_ms_delays() {
        let step = deg_for_km(100.0);
        // Apex latitude found by bisection so that |ac| = |bc| = 100 km.
        let (mut lo, mut hi) = (0.0, 2.0 * step);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if haversine_km(0.0, 0.0, mid, step / 2.0) < 100.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = Topology::from_coordinates(
            "tri",
            &[("a", 0.0, 0.0), ("b", step, 0.0), ("c", step / 2.0, lo)],
            &[(0, 1), (1, 2), (0, 2)],
        )
        .unwrap();
        assert_eq!(t.links.len(), 3);
        for l in &t.links {
            assert!((l.length_km - 100.0).abs() < 1e-9);
            assert!((l.delay_ms - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn path_delay_sums_links() {
        let step = deg_for_km(200.0);
        let t = Topology::from_coordinates(
            "path",
            &[("a", 0.0, 0.0), ("b", step, 0.0), ("c", 3.0 * step, 0.0)],
            &[(0, 1), (1, 2)],
        )
        .unwrap();
        let d = all_pairs_delay(&t);
        assert!((d.get(0, 1) - 1.0).abs() < 1e-9);
        assert!((d.get(1, 2) - 2.0).abs() < 1e-9);
        assert!((d.get(0, 2) - 3.0).abs() < 1e-9);
        assert_eq!(all_pairs_hops(&t).get(0, 2), 2.0);
    }

    #[test]
    fn disconnected_pairs_are_infinite() {
        let t =
            Topology::from_coordinates("two", &[("a", 0.0, 0.0), ("b", 1.0, 0.0)], &[]).unwrap();
        let d = all_pairs_delay(&t);
        assert!(d.get(0, 1).is_infinite());
        assert_eq!(d.unreachable_pair(), Some((0, 1)));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let dup = "NODES (\n  A ( 1 1 )\n  A ( 2 2 )\n)\n";
        assert_eq!(
            parse_sndlib(dup),
            Err(TopologyError::DuplicateNode {
                line: 3,
                id: "A".into()
            })
        );
        let unknown = "NODES (\n  A ( 1 1 )\n)\nLINKS (\n  L1 ( A B ) 0 0\n)\n";
        assert_eq!(
            parse_sndlib(unknown),
            Err(TopologyError::UnknownNode {
                line: 5,
                id: "B".into()
            })
        );
        let header = "NODES\n  A ( 1 1 )\n";
        assert!(matches!(
            parse_sndlib(header),
            Err(TopologyError::BadSectionHeader { line: 1, .. })
        ));
        let unclosed = "NODES (\n  A ( 1 1 )\n";
        assert!(matches!(
            parse_sndlib(unclosed),
            Err(TopologyError::UnclosedSection { line: 1, .. })
        ));
        let bad = "NODES (\n  A 1 1\n)\n";
        assert!(matches!(
            parse_sndlib(bad),
            Err(TopologyError::BadEntry { line: 2, .. })
        ));
    }

    #[test]
    fn parallel_links_collapse() {
        let text = "NODES (\n  A ( 1 1 )\n  B ( 2 1 )\n)\nLINKS (\n  L1 ( A B )\n  L2 ( B A )\n)\n";
        let t = parse_sndlib(text).unwrap();
        assert_eq!(t.links.len(), 1);
    }

    #[test]
    fn self_loop_rejected() {
        let text = "NODES (\n  A ( 1 1 )\n)\nLINKS (\n  L1 ( A A )\n)\n";
        assert!(matches!(
            parse_sndlib(text),
            Err(TopologyError::SelfLoop { line: 5, .. })
        ));
    }

    #[test]
    fn germany50_round_trips() {
        let t = Topology::germany50();
        let again = parse_sndlib(&t.to_sndlib()).unwrap();
        assert_eq!(t, again);
    }
}
