//! On-disk scenario description.
//!
//! A scenario is a TOML document listing servers and the VNF types they host,
//! gateway routers, the latency rule, the player population, the game
//! parameters and an optional list of runtime events:
//!
//! ```toml
//! seed = 1
//! routers = ["r"]
//!
//! [latency]
//! router = 1.0
//! intra = 1.0
//! cross_lo = 2.0
//! cross_hi = 6.0
//!
//! [game]
//! alpha = 1.0
//! beta = 0.1
//! gamma_user = 0.9
//! gamma_vm = 0.9
//!
//! [[servers]]
//! name = "m1"
//! hosts = ["FW", "LB", "IDS"]
//!
//! [[players]]
//! rate = 5.0
//! chain = ["FW", "LB", "IDS"]
//! ingress = "r"
//! egress = "r"
//! failure_cost = 1000.0
//! count = 10
//!
//! [[events]]
//! time_s = 40.0
//! kind = "vm_failure"
//! server = "m1"
//! vnf = "FW"
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub seed: u64,
    /// Optional explicit VNF type order. When absent, types are numbered in
    /// order of first appearance in `servers`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vnf_types: Option<Vec<String>>,
    pub servers: Vec<ServerConfig>,
    pub routers: Vec<String>,
    #[serde(default)]
    pub latency: LatencyRule,
    pub game: GameConfig,
    pub players: Vec<PlayerConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<EventConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServerConfig {
    pub name: String,
    pub hosts: Vec<String>,
}

/// Latency rule: router-to-VM and intra-server VM-to-VM legs are fixed,
/// cross-server VM-to-VM legs are drawn uniformly from `[cross_lo, cross_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatencyRule {
    pub router: f64,
    pub intra: f64,
    pub cross_lo: f64,
    pub cross_hi: f64,
}

impl Default for LatencyRule {
    fn default() -> Self {
        Self {
            router: 1.0,
            intra: 1.0,
            cross_lo: 2.0,
            cross_hi: 6.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma_user: f64,
    pub gamma_vm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerConfig {
    pub rate: f64,
    pub chain: Vec<String>,
    pub ingress: String,
    pub egress: String,
    pub failure_cost: f64,
    /// Number of identical players described by this entry.
    #[serde(default = "one")]
    pub count: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventConfig {
    pub time_s: f64,
    #[serde(flatten)]
    pub kind: EventKindConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKindConfig {
    PlayerJoin {
        rate: f64,
        chain: Vec<String>,
        ingress: String,
        egress: String,
        failure_cost: f64,
    },
    VmFailure {
        server: String,
        vnf: String,
    },
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ModelError> {
        toml::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ModelError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario config always serializes")
    }

    /// Resolved VNF type names, in id order.
    pub fn type_names(&self) -> Vec<String> {
        if let Some(explicit) = &self.vnf_types {
            return explicit.clone();
        }
        let mut names: Vec<String> = Vec::new();
        for server in &self.servers {
            for host in &server.hosts {
                if !names.contains(host) {
                    names.push(host.clone());
                }
            }
        }
        names
    }
}
