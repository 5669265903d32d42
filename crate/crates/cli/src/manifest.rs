use std::fmt::Write as _;

use cline_core::{IntegratorConfig, Tolerances};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Provenance of one CLI run.
///
/// The copy embedded in JSON outputs leaves `wall_time_s` unset so that
/// repeated runs produce identical files; the `<command>.manifest.json`
/// sidecar carries it.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    pub config_path: Option<String>,
    pub config_digest: String,
    pub integrator: IntegratorConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunManifest {
    pub fn new(
        command: &str,
        config_path: Option<String>,
        config_bytes: &[u8],
        integrator: IntegratorConfig,
    ) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config_path,
            config_digest: sha256_hex(config_bytes),
            integrator,
            resolution: None,
            tolerances: None,
            r: None,
            outputs: Vec::new(),
            wall_time_s: None,
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}
