use std::collections::{BTreeSet, HashMap};

use super::{
    Config, CostModel, ModelError, ModelOptions, RequestId, ResourceSpec, ServerRef,
    ServiceRequest, ServiceType, SiteId, EPS,
};
use crate::topology::{DelayMatrix, NodeId};

/// A placement problem: MEC sites with their delays to every base station,
/// the request batch, and the resource/cost configuration.
#[derive(Debug, Clone)]
pub struct Instance {
    sites: Vec<NodeId>,
    site_delay: Vec<Vec<f64>>,
    requests: Vec<ServiceRequest>,
    request_index: HashMap<RequestId, usize>,
    config: Config,
}

impl Instance {
    /// `site_delay[l][n]` is the propagation delay in ms from site `l`
    /// (located at node `sites[l]`) to base station `n`.
    pub fn new(
        sites: Vec<NodeId>,
        site_delay: Vec<Vec<f64>>,
        requests: Vec<ServiceRequest>,
        config: Config,
    ) -> Result<Instance, ModelError> {
        config.validate()?;
        if site_delay.len() != sites.len() {
            return Err(ModelError::InvalidConfig(format!(
                "{} sites but {} delay rows",
                sites.len(),
                site_delay.len()
            )));
        }
        let nodes = site_delay.first().map_or(0, Vec::len);
        if site_delay.iter().any(|row| row.len() != nodes) {
            return Err(ModelError::InvalidConfig(
                "delay rows differ in length".into(),
            ));
        }
        if site_delay.iter().flatten().any(|d| d.is_nan() || *d < 0.0) {
            return Err(ModelError::InvalidConfig(
                "delays must be non-negative".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for &s in &sites {
            if !seen.insert(s) {
                return Err(ModelError::InvalidConfig(format!(
                    "site node {s} listed twice"
                )));
            }
        }

        let mut request_index = HashMap::with_capacity(requests.len());
        for (i, r) in requests.iter().enumerate() {
            if request_index.insert(r.id, i).is_some() {
                return Err(ModelError::DuplicateRequest(r.id));
            }
            let ty = config
                .service_types
                .get(r.vnf_type)
                .ok_or(ModelError::UnknownServiceType(r.vnf_type))?;
            if (ty.data_rate - r.data_rate).abs() > EPS || (ty.max_delay - r.max_delay).abs() > EPS
            {
                return Err(ModelError::RequestTypeMismatch(r.id));
            }
            if !sites.is_empty() && r.attach_node >= nodes {
                return Err(ModelError::AttachOutOfRange {
                    request: r.id,
                    node: r.attach_node,
                    nodes,
                });
            }
        }

        Ok(Instance {
            sites,
            site_delay,
            requests,
            request_index,
            config,
        })
    }

    /// Builds the site-to-node delay rows from a full network delay matrix.
    pub fn from_network(
        delay: &DelayMatrix,
        sites: &[NodeId],
        requests: Vec<ServiceRequest>,
        config: Config,
    ) -> Result<Instance, ModelError> {
        let mut rows = Vec::with_capacity(sites.len());
        for &s in sites {
            if s >= delay.len() {
                return Err(ModelError::InvalidConfig(format!(
                    "site node {s} is not in the network"
                )));
            }
            rows.push(delay.row(s).to_vec());
        }
        let inst = Instance::new(sites.to_vec(), rows, requests, config)?;
        if let Some(r) = inst.requests.iter().find(|r| r.attach_node >= delay.len()) {
            return Err(ModelError::AttachOutOfRange {
                request: r.id,
                node: r.attach_node,
                nodes: delay.len(),
            });
        }
        Ok(inst)
    }

    /// Same sites and configuration with a different request batch.
    pub fn with_requests(&self, requests: Vec<ServiceRequest>) -> Result<Instance, ModelError> {
        Instance::new(
            self.sites.clone(),
            self.site_delay.clone(),
            requests,
            self.config.clone(),
        )
    }

    pub fn sites(&self) -> &[NodeId] {
        &self.sites
    }

    pub fn site_count(&self) -> usize {
        self.sites.len()
    }

    pub fn node_count(&self) -> usize {
        self.site_delay.first().map_or(0, Vec::len)
    }

    pub fn requests(&self) -> &[ServiceRequest] {
        &self.requests
    }

    pub fn request(&self, id: RequestId) -> Option<&ServiceRequest> {
        self.request_index.get(&id).map(|&i| &self.requests[i])
    }

    pub fn request_position(&self, id: RequestId) -> Option<usize> {
        self.request_index.get(&id).copied()
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn resources(&self) -> &ResourceSpec {
        &self.config.resources
    }

    pub fn costs(&self) -> &CostModel {
        &self.config.costs
    }

    pub fn options(&self) -> &ModelOptions {
        &self.config.options
    }

    pub fn service_types(&self) -> &[ServiceType] {
        &self.config.service_types
    }

    pub fn servers_per_site(&self) -> usize {
        self.config.resources.servers_per_site
    }

    pub fn server_count(&self) -> usize {
        self.sites.len() * self.servers_per_site()
    }

    /// Dense index of a server, sites major.
    #[inline]
    pub fn server_index(&self, s: ServerRef) -> usize {
        s.site * self.servers_per_site() + s.server
    }

    #[inline]
    pub fn server_at(&self, index: usize) -> ServerRef {
        ServerRef {
            site: index / self.servers_per_site(),
            server: index % self.servers_per_site(),
        }
    }

    /// All servers ordered by site, then server index.
    pub fn servers(&self) -> impl Iterator<Item = ServerRef> + '_ {
        (0..self.server_count()).map(|i| self.server_at(i))
    }

    pub fn contains_server(&self, s: ServerRef) -> bool {
        s.site < self.sites.len() && s.server < self.servers_per_site()
    }

    /// Propagation delay between a site and a base station, ms.
    #[inline]
    pub fn path_delay(&self, site: SiteId, node: NodeId) -> f64 {
        self.site_delay[site][node]
    }

    /// Delay a request sees when served from `site`: propagation plus one
    /// VNF processing delay.
    #[inline]
    pub fn service_delay(&self, site: SiteId, node: NodeId) -> f64 {
        self.site_delay[site][node] + self.config.resources.vnf_processing_delay
    }

    /// Whether `site` meets the delay bound of `request`.
    #[inline]
    pub fn reachable(&self, site: SiteId, request: &ServiceRequest) -> bool {
        self.service_delay(site, request.attach_node) <= request.max_delay + EPS
    }

    /// Sites meeting the request's delay bound, in id order.
    pub fn reachable_sites(&self, request: &ServiceRequest) -> Vec<SiteId> {
        (0..self.sites.len())
            .filter(|&l| self.reachable(l, request))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::default_service_types;

    #[test]
    fn rejects_bad_inputs() {
        let types = default_service_types();
        let cfg = Config::default();
        let r = ServiceRequest::of_type(0, &types[1], 0);
        assert!(matches!(
            Instance::new(
                vec![0],
                vec![vec![0.0, 1.0]],
                vec![r.clone(), r.clone()],
                cfg.clone()
            ),
            Err(ModelError::DuplicateRequest(0))
        ));
        let far = ServiceRequest::of_type(1, &types[1], 5);
        assert!(matches!(
            Instance::new(vec![0], vec![vec![0.0, 1.0]], vec![far], cfg.clone()),
            Err(ModelError::AttachOutOfRange { .. })
        ));
        let mut odd = r.clone();
        odd.data_rate = 7.0;
        assert!(matches!(
            Instance::new(vec![0], vec![vec![0.0, 1.0]], vec![odd], cfg),
            Err(ModelError::RequestTypeMismatch(0))
        ));
    }

    #[test]
    fn server_indexing() {
        let cfg = Config {
            resources: ResourceSpec {
                servers_per_site: 3,
                ..ResourceSpec::default()
            },
            ..Config::default()
        };
        let inst = Instance::new(
            vec![0, 1],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![],
            cfg,
        )
        .unwrap();
        let all: Vec<_> = inst.servers().collect();
        assert_eq!(all.len(), 6);
        for (i, s) in all.iter().enumerate() {
            assert_eq!(inst.server_index(*s), i);
        }
        assert_eq!(all[4], ServerRef { site: 1, server: 1 });
    }
}
