use std::collections::BTreeMap;

use serde::Serialize;

use crate::fock::DEFAULT_ZETA_CAP;

/// Everything needed to rerun a command and get the same bytes back.
///
/// The timestamp comes from `SOURCE_DATE_EPOCH` when set and is otherwise
/// null, so repeated runs stay byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// Arguments after the program name, verbatim.
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub tolerances: BTreeMap<String, f64>,
    pub truncation: String,
    pub timestamp: Option<u64>,
}

impl RunManifest {
    pub fn new(command: &str, args: &[String]) -> Self {
        Self {
            tool: "parity-bell",
            version: crate::VERSION,
            command: command.to_string(),
            args: args.to_vec(),
            seed: None,
            tolerances: BTreeMap::new(),
            truncation: String::new(),
            timestamp: std::env::var("SOURCE_DATE_EPOCH")
                .ok()
                .and_then(|s| s.trim().parse().ok()),
        }
    }

    pub fn seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn tol(mut self, name: &str, value: f64) -> Self {
        self.tolerances.insert(name.to_string(), value);
        self
    }

    pub fn truncation(mut self, dim: Option<usize>, tail_tol: f64) -> Self {
        self.truncation = match dim {
            Some(d) => format!("fixed dim={d} tail_tol={tail_tol:e}"),
            None => format!("adaptive tail_tol={tail_tol:e} cap={DEFAULT_ZETA_CAP}"),
        };
        self
    }
}
