use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{RequestId, ServiceTypeId, SiteId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Primary,
    Backup,
}

impl Role {
    pub fn other(self) -> Role {
        match self {
            Role::Primary => Role::Backup,
            Role::Backup => Role::Primary,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Primary => "primary",
            Role::Backup => "backup",
        })
    }
}

/// A physical server: `server` indexes the servers of `site`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ServerRef {
    pub site: SiteId,
    pub server: usize,
}

impl fmt::Display for ServerRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "site {} server {}", self.site, self.server)
    }
}

/// Pool of VNF instances of one type and role on one server.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SlotKey {
    pub site: SiteId,
    pub server: usize,
    pub vnf_type: ServiceTypeId,
    pub role: Role,
}

impl SlotKey {
    pub fn new(server: ServerRef, vnf_type: ServiceTypeId, role: Role) -> SlotKey {
        SlotKey {
            site: server.site,
            server: server.server,
            vnf_type,
            role,
        }
    }

    pub fn server_ref(&self) -> ServerRef {
        ServerRef {
            site: self.site,
            server: self.server,
        }
    }
}

impl fmt::Display for SlotKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} type {} {}",
            self.server_ref(),
            self.vnf_type,
            self.role
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub primary: SlotKey,
    pub backup: SlotKey,
}

impl Assignment {
    pub fn slot(&self, role: Role) -> SlotKey {
        match role {
            Role::Primary => self.primary,
            Role::Backup => self.backup,
        }
    }
}

/// Placement decision: which sites and servers are in use, how many
/// instances each slot holds, and which slots serve each request.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(into = "SolutionFile", try_from = "SolutionFile")]
pub struct Solution {
    pub sites_used: BTreeSet<SiteId>,
    pub active_servers: BTreeSet<ServerRef>,
    pub vnf_instances: BTreeMap<SlotKey, u32>,
    pub assignments: BTreeMap<RequestId, Assignment>,
}

impl Solution {
    pub fn instance_count(&self) -> u32 {
        self.vnf_instances.values().sum()
    }

    /// Requests assigned to `slot`.
    pub fn requests_on(&self, slot: &SlotKey) -> impl Iterator<Item = RequestId> + '_ {
        let slot = *slot;
        self.assignments
            .iter()
            .filter(move |(_, a)| a.primary == slot || a.backup == slot)
            .map(|(&r, _)| r)
    }

    /// Drops instances nobody uses, then servers without instances, and
    /// recomputes the used sites.
    pub fn canonicalize(&mut self) {
        let used: BTreeSet<SlotKey> = self
            .assignments
            .values()
            .flat_map(|a| [a.primary, a.backup])
            .collect();
        self.vnf_instances.retain(|k, c| *c > 0 && used.contains(k));
        self.active_servers = self.vnf_instances.keys().map(SlotKey::server_ref).collect();
        self.sites_used = self.active_servers.iter().map(|s| s.site).collect();
    }

    /// Removes a request and re-canonicalizes. Instance counts are left as
    /// they were; throughput only gets looser.
    pub fn remove_request(&mut self, request: RequestId) -> Option<Assignment> {
        let a = self.assignments.remove(&request);
        self.canonicalize();
        a
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceEntry {
    site: SiteId,
    server: usize,
    vnf_type: ServiceTypeId,
    role: Role,
    count: u32,
}

#[derive(Serialize, Deserialize)]
struct AssignmentEntry {
    request: RequestId,
    primary: SlotKey,
    backup: SlotKey,
}

#[derive(Serialize, Deserialize)]
struct SolutionFile {
    sites_used: Vec<SiteId>,
    active_servers: Vec<ServerRef>,
    vnf_instances: Vec<InstanceEntry>,
    assignments: Vec<AssignmentEntry>,
}

impl From<Solution> for SolutionFile {
    fn from(s: Solution) -> Self {
        SolutionFile {
            sites_used: s.sites_used.into_iter().collect(),
            active_servers: s.active_servers.into_iter().collect(),
            vnf_instances: s
                .vnf_instances
                .into_iter()
                .map(|(k, count)| InstanceEntry {
                    site: k.site,
                    server: k.server,
                    vnf_type: k.vnf_type,
                    role: k.role,
                    count,
                })
                .collect(),
            assignments: s
                .assignments
                .into_iter()
                .map(|(request, a)| AssignmentEntry {
                    request,
                    primary: a.primary,
                    backup: a.backup,
                })
                .collect(),
        }
    }
}

impl TryFrom<SolutionFile> for Solution {
    type Error = String;

    fn try_from(f: SolutionFile) -> Result<Self, Self::Error> {
        let mut vnf_instances = BTreeMap::new();
        for e in f.vnf_instances {
            let key = SlotKey {
                site: e.site,
                server: e.server,
                vnf_type: e.vnf_type,
                role: e.role,
            };
            if vnf_instances.insert(key, e.count).is_some() {
                return Err(format!("duplicate instance entry {key}"));
            }
        }
        let mut assignments = BTreeMap::new();
        for a in f.assignments {
            let value = Assignment {
                primary: a.primary,
                backup: a.backup,
            };
            if assignments.insert(a.request, value).is_some() {
                return Err(format!("request {} assigned twice", a.request));
            }
        }
        Ok(Solution {
            sites_used: f.sites_used.into_iter().collect(),
            active_servers: f.active_servers.into_iter().collect(),
            vnf_instances,
            assignments,
        })
    }
}
