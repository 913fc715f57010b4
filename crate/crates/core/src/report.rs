//! JSON reports written by the command-line tool.

use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use crate::config::Config;

pub const SCHEMA_VERSION: u32 = 1;

/// One command's output. Everything except `timing` is a function of the
/// inputs and the configuration.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub input: Value,
    pub params: Value,
    pub results: Value,
    pub config: Config,
    pub timing: Timing,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

impl Report {
    pub fn new(command: &str, input: Value, params: Value, results: Value, config: &Config, elapsed: Duration) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_owned(),
            input,
            params,
            results,
            config: config.clone(),
            timing: Timing { elapsed_ms: elapsed.as_secs_f64() * 1e3 },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only JSON-representable values")
    }

    /// The report with `timing` removed, for byte-level comparisons.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("serializable");
        if let Value::Object(map) = &mut v {
            map.remove("timing");
        }
        serde_json::to_string_pretty(&v).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn deterministic_part_ignores_timing() {
        let cfg = Config::default();
        let a = Report::new("analyze", json!({"matrix": "a.bm"}), json!({}), json!({"F": 3}), &cfg, Duration::from_millis(5));
        let b = Report::new("analyze", json!({"matrix": "a.bm"}), json!({}), json!({"F": 3}), &cfg, Duration::from_millis(9));
        assert_ne!(a.to_json(), b.to_json());
        assert_eq!(a.deterministic_json(), b.deterministic_json());
        assert!(a.to_json().contains("\"schema_version\": 1"));
    }
}
