// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

/// First line of every manifest; also how a CSV file is recognised when it
/// is passed back through `--config`.
pub const MANIFEST_MARKER: &str = "# qbo run manifest";

/// Everything needed to rerun a command: written as `#` lines ahead of the
/// data.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    /// Every setting the command used, defaults included.
    pub config: BTreeMap<String, String>,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub seeds: Vec<u64>,
}

impl RunManifest {
    pub fn new(command: &str, config: BTreeMap<String, String>, seeds: Vec<u64>) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            command: command.to_string(),
            config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
            seeds,
        }
    }

    pub fn lines(&self) -> Vec<String> {
        let seeds = if self.seeds.is_empty() {
            "none".to_string()
        } else {
            self.seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
        };
        let mut out = vec![
            MANIFEST_MARKER.to_string(),
            format!("# command: {}", self.command),
            format!("# version: {}", self.version),
            format!("# timestamp: {}", self.timestamp),
            format!("# seed: {seeds}"),
        ];
        out.extend(self.config.iter().map(|(k, v)| format!("# config {k}={v}")));
        out
    }
}
