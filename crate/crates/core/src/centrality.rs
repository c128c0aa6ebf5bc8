//! Closeness-centrality ranking and MEC site selection.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{
    all_pairs_delay, all_pairs_hops, DelayMatrix, DistanceMatrix, NodeId, Topology,
};

/// Default bound on the delay from any base station to its nearest site, ms.
pub const DEFAULT_D_MAX_MS: f64 = 2.0;

#[derive(Debug, Error, PartialEq)]
pub enum CentralityError {
    #[error("graph is disconnected: node {0} cannot reach node {1}")]
    Disconnected(NodeId, NodeId),
    #[error("site count {k} out of range 1..={n}")]
    SiteCountOutOfRange { k: usize, n: usize },
    #[error("site list is empty")]
    NoSites,
    #[error("site {0} is not a node of the network")]
    UnknownSite(NodeId),
    #[error("delay bound must be non-negative, got {0}")]
    BadDelayBound(f64),
}

/// Which distances drive the centrality ranking. Coverage is always
/// measured in propagation delay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankingMetric {
    #[default]
    Hops,
    Delay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteSelection {
    /// Chosen MEC locations, in selection order.
    pub sites: Vec<NodeId>,
    /// Worst delay from any node to its nearest site, ms.
    pub max_delay: f64,
    /// Mean delay from a node to its nearest site, ms.
    pub avg_delay: f64,
}

/// `CC[i] = 1 / sum_j d(i, j)`.
pub fn closeness_centrality(d: &DistanceMatrix) -> Result<Vec<f64>, CentralityError> {
    if let Some((i, j)) = d.unreachable_pair() {
        return Err(CentralityError::Disconnected(i, j));
    }
    Ok((0..d.len())
        .map(|i| {
            let total: f64 = d.row(i).iter().sum();
            if total > 0.0 {
                1.0 / total
            } else {
                // A lone node is trivially central.
                f64::INFINITY
            }
        })
        .collect())
}

/// Node ids in descending centrality; ties go to the smaller id.
pub fn rank_by_centrality(cc: &[f64]) -> Vec<NodeId> {
    let mut order: Vec<NodeId> = (0..cc.len()).collect();
    order.sort_by(|&a, &b| cc[b].total_cmp(&cc[a]).then(a.cmp(&b)));
    order
}

/// Mean and worst nearest-site delay, in that order.
pub fn coverage_metrics(d: &DelayMatrix, sites: &[NodeId]) -> Result<(f64, f64), CentralityError> {
    if sites.is_empty() {
        return Err(CentralityError::NoSites);
    }
    if let Some(&bad) = sites.iter().find(|&&s| s >= d.len()) {
        return Err(CentralityError::UnknownSite(bad));
    }
    let n = d.len();
    let mut sum = 0.0;
    let mut worst = 0.0_f64;
    for node in 0..n {
        let nearest = sites
            .iter()
            .map(|&s| d.get(node, s))
            .fold(f64::INFINITY, f64::min);
        sum += nearest;
        worst = worst.max(nearest);
    }
    Ok((sum / n as f64, worst))
}

fn selection(d: &DelayMatrix, sites: Vec<NodeId>) -> SiteSelection {
    let (avg_delay, max_delay) = coverage_metrics(d, &sites).expect("non-empty, in-range sites");
    SiteSelection {
        sites,
        max_delay,
        avg_delay,
    }
}

/// Grows the prefix of `ranking` until every node is within `d_max` of a site.
fn grow_until_covered(delay: &DelayMatrix, ranking: &[NodeId], d_max: f64) -> SiteSelection {
    let n = delay.len();
    let mut nearest = vec![f64::INFINITY; n];
    let mut sites = Vec::new();
    for &site in ranking {
        sites.push(site);
        for (node, best) in nearest.iter_mut().enumerate() {
            *best = best.min(delay.get(node, site));
        }
        if nearest.iter().all(|&x| x <= d_max) {
            break;
        }
    }
    selection(delay, sites)
}

/// Ranking and coverage state for CC-based site selection on one network.
#[derive(Debug, Clone)]
pub struct SiteSelector {
    delay: DelayMatrix,
    centrality: Vec<f64>,
    ranking: Vec<NodeId>,
}

impl SiteSelector {
    pub fn new(
        topology: &Topology,
        metric: RankingMetric,
    ) -> Result<SiteSelector, CentralityError> {
        let delay = all_pairs_delay(topology);
        let ranking_distances = match metric {
            RankingMetric::Hops => all_pairs_hops(topology),
            RankingMetric::Delay => delay.clone(),
        };
        SiteSelector::from_matrices(&ranking_distances, delay)
    }

    /// `ranking_distances` orders candidates; `delay` measures coverage.
    pub fn from_matrices(
        ranking_distances: &DistanceMatrix,
        delay: DelayMatrix,
    ) -> Result<SiteSelector, CentralityError> {
        if let Some((i, j)) = delay.unreachable_pair() {
            return Err(CentralityError::Disconnected(i, j));
        }
        let centrality = closeness_centrality(ranking_distances)?;
        let ranking = rank_by_centrality(&centrality);
        Ok(SiteSelector {
            delay,
            centrality,
            ranking,
        })
    }

    pub fn delay(&self) -> &DelayMatrix {
        &self.delay
    }

    pub fn centrality(&self) -> &[f64] {
        &self.centrality
    }

    pub fn ranking(&self) -> &[NodeId] {
        &self.ranking
    }

    /// Smallest top-CC prefix whose worst nearest-site delay is within `d_max`.
    pub fn select(&self, d_max: f64) -> Result<SiteSelection, CentralityError> {
        if !(d_max >= 0.0) {
            return Err(CentralityError::BadDelayBound(d_max));
        }
        Ok(grow_until_covered(&self.delay, &self.ranking, d_max))
    }

    /// The `k` most central nodes.
    pub fn top_k(&self, k: usize) -> Result<SiteSelection, CentralityError> {
        let n = self.delay.len();
        if k == 0 || k > n {
            return Err(CentralityError::SiteCountOutOfRange { k, n });
        }
        Ok(selection(&self.delay, self.ranking[..k].to_vec()))
    }
}

/// Site selection with both ranking and coverage on the same delay matrix.
pub fn select_sites_cc(d: &DelayMatrix, d_max: f64) -> Result<SiteSelection, CentralityError> {
    SiteSelector::from_matrices(d, d.clone())?.select(d_max)
}

/// `k` distinct sites drawn uniformly at random.
pub fn select_sites_random(
    d: &DelayMatrix,
    k: usize,
    seed: u64,
) -> Result<SiteSelection, CentralityError> {
    let n = d.len();
    if k == 0 || k > n {
        return Err(CentralityError::SiteCountOutOfRange { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sites = index::sample(&mut rng, n, k).into_vec();
    Ok(selection(d, sites))
}
