//! Requests, resources, costs and solutions for survivable VNF placement.

mod cost;
mod feasibility;
mod instance;
mod requests;
mod solution;

pub use cost::{evaluate_cost, CostBreakdown};
pub use feasibility::{check_feasibility, ConstraintKind, FeasibilityReport, Violation};
pub use instance::Instance;
pub use requests::{equal_mix, generate_requests, load_requests, save_requests};
pub use solution::{Assignment, Role, ServerRef, SlotKey, Solution};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::NodeId;

pub type RequestId = usize;
pub type ServiceTypeId = usize;
/// Index of a MEC site within an [`Instance`].
pub type SiteId = usize;

/// Slack for floating-point comparisons on rates and delays.
pub(crate) const EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown site {0}")]
    UnknownSite(SiteId),
    #[error("unknown server {server} at site {site}")]
    UnknownServer { site: SiteId, server: usize },
    #[error("unknown request {0}")]
    UnknownRequest(RequestId),
    #[error("duplicate request id {0}")]
    DuplicateRequest(RequestId),
    #[error("unknown service type {0}")]
    UnknownServiceType(ServiceTypeId),
    #[error("request {request} attaches to node {node}, outside the {nodes}-node network")]
    AttachOutOfRange {
        request: RequestId,
        node: NodeId,
        nodes: usize,
    },
    #[error("request {0} does not match the rate/delay of its service type")]
    RequestTypeMismatch(RequestId),
    #[error("bad service mix: {0}")]
    BadMix(String),
    #[error("io: {0}")]
    Io(String),
    #[error("json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceType {
    pub id: ServiceTypeId,
    pub name: String,
    #[serde(rename = "rate_mbps")]
    pub data_rate: f64,
    #[serde(rename = "max_delay_ms")]
    pub max_delay: f64,
}

/// The four service classes used throughout the evaluation scenario.
pub fn default_service_types() -> Vec<ServiceType> {
    [
        ("AR/VR", 200.0, 2.0),
        ("V2X", 100.0, 3.0),
        ("e-health", 100.0, 5.0),
        ("8K TV & Gaming", 200.0, 10.0),
    ]
    .into_iter()
    .enumerate()
    .map(|(id, (name, data_rate, max_delay))| ServiceType {
        id,
        name: name.to_string(),
        data_rate,
        max_delay,
    })
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceRequest {
    pub id: RequestId,
    #[serde(rename = "type")]
    pub vnf_type: ServiceTypeId,
    #[serde(rename = "node")]
    pub attach_node: NodeId,
    #[serde(rename = "rate_mbps")]
    pub data_rate: f64,
    #[serde(rename = "max_delay_ms")]
    pub max_delay: f64,
}

impl ServiceRequest {
    pub fn of_type(id: RequestId, service: &ServiceType, attach_node: NodeId) -> ServiceRequest {
        ServiceRequest {
            id,
            vnf_type: service.id,
            attach_node,
            data_rate: service.data_rate,
            max_delay: service.max_delay,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ResourceSpec {
    pub servers_per_site: usize,
    /// Cores per server.
    pub server_cores: u32,
    /// Cores per VNF instance.
    pub vnf_cores: u32,
    /// Processing capacity of one VNF instance, Mbps.
    pub vnf_throughput: f64,
    /// Processing and forwarding delay of a VNF, ms.
    pub vnf_processing_delay: f64,
}

impl Default for ResourceSpec {
    fn default() -> Self {
        ResourceSpec {
            servers_per_site: 10,
            server_cores: 16,
            vnf_cores: 4,
            vnf_throughput: 1000.0,
            vnf_processing_delay: 0.05,
        }
    }
}

impl ResourceSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: &str| Err(ModelError::InvalidConfig(msg.to_string()));
        if self.servers_per_site == 0 {
            return bad("servers_per_site must be positive");
        }
        if self.vnf_cores == 0 || self.server_cores == 0 {
            return bad("core counts must be positive");
        }
        if self.vnf_cores > self.server_cores {
            return bad("a VNF needs more cores than a server has");
        }
        if !(self.vnf_throughput > 0.0) {
            return bad("vnf_throughput must be positive");
        }
        if !(self.vnf_processing_delay >= 0.0) {
            return bad("vnf_processing_delay must be non-negative");
        }
        Ok(())
    }

    /// How many VNF instances fit on one server.
    pub fn vnfs_per_server(&self) -> u32 {
        self.server_cores / self.vnf_cores
    }

    /// Fewest instances whose pooled throughput carries `load` Mbps.
    pub fn instances_for(&self, load: f64) -> u32 {
        if load <= EPS {
            0
        } else {
            ((load - EPS) / self.vnf_throughput).ceil().max(1.0) as u32
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostModel {
    /// Activation cost of one server.
    pub server_cost: f64,
    /// Deployment cost of one VNF instance.
    pub vnf_cost: f64,
    /// Forwarding cost per Mbps.
    pub traffic_cost: f64,
    /// Weights on the server, VNF and traffic terms.
    pub weights: [f64; 3],
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            server_cost: 100.0,
            vnf_cost: 10.0,
            traffic_cost: 1.0,
            weights: [1.0, 1.0, 1.0],
        }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<(), ModelError> {
        let all = [self.server_cost, self.vnf_cost, self.traffic_cost]
            .into_iter()
            .chain(self.weights);
        for v in all {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(ModelError::InvalidConfig(format!(
                    "cost coefficients and weights must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> CostModel {
        CostModel {
            server_cost: self.server_cost * factor,
            vnf_cost: self.vnf_cost * factor,
            traffic_cost: self.traffic_cost * factor,
            weights: self.weights,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelOptions {
    /// Multiply forwarding cost by the base-station-to-site delay.
    pub delay_weighted_traffic: bool,
    /// Also forbid a request's primary and backup from sharing a site.
    pub site_anti_affinity: bool,
}

/// Everything about a scenario except the network and the requests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub costs: CostModel,
    pub resources: ResourceSpec,
    pub service_types: Vec<ServiceType>,
    pub options: ModelOptions,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            costs: CostModel::default(),
            resources: ResourceSpec::default(),
            service_types: default_service_types(),
            options: ModelOptions::default(),
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.costs.validate()?;
        self.resources.validate()?;
        for (i, t) in self.service_types.iter().enumerate() {
            if t.id != i {
                return Err(ModelError::InvalidConfig(format!(
                    "service type ids must be 0..n in order, found {} at position {i}",
                    t.id
                )));
            }
            if !(t.data_rate > 0.0) || !(t.max_delay > 0.0) {
                return Err(ModelError::InvalidConfig(format!(
                    "service type {} needs positive rate and delay",
                    t.name
                )));
            }
        }
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Config, ModelError> {
        let text = std::fs::read_to_string(path).map_err(|e| ModelError::Io(e.to_string()))?;
        let cfg: Config =
            serde_json::from_str(&text).map_err(|e| ModelError::Json(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
