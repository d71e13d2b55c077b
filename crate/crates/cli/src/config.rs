//! Layered configuration: built-in defaults, then an optional JSON file,
//! then command-line flags.
//!
//! Each subcommand has a flags struct (every field optional, parsed by clap)
//! and a config struct with the same field names and concrete defaults. The
//! resolved config is what goes into the run manifest, and a manifest can be
//! passed back through `--config` to repeat the run.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use fdnet::{AntennaConfig, LinkLevels, NetworkSpec};

use crate::Failure;

fn object(v: Value, what: &str) -> Result<Map<String, Value>, Failure> {
    match v {
        Value::Object(m) => Ok(m),
        _ => Err(Failure::Usage(format!("{what} must be a JSON object"))),
    }
}

fn read_file(command: &str, path: &Path) -> Result<Map<String, Value>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("config {} is not valid JSON: {e}", path.display())))?;
    let mut m = object(v, "config file")?;
    // a manifest carries the resolved config under "config"
    if let (Some(cmd), Some(cfg)) = (m.get("command").cloned(), m.remove("config")) {
        if cmd.as_str() != Some(command) {
            return Err(Failure::Usage(format!(
                "manifest {} was written by `{}`, not `{command}`",
                path.display(),
                cmd
            )));
        }
        return object(cfg, "manifest config");
    }
    Ok(m)
}

/// Defaults of `C`, overlaid by the file at `file`, overlaid by every flag
/// that was given.
pub fn resolve<F, C>(command: &str, flags: &F, file: Option<&Path>) -> Result<C, Failure>
where
    F: Serialize,
    C: Serialize + DeserializeOwned + Default,
{
    let defaults = serde_json::to_value(C::default()).map_err(|e| Failure::Compute(e.into()))?;
    let mut merged = object(defaults, "defaults")?;
    if let Some(path) = file {
        for (k, v) in read_file(command, path)? {
            if !merged.contains_key(&k) {
                let known: Vec<&str> = merged.keys().map(String::as_str).collect();
                return Err(Failure::Usage(format!(
                    "unknown key `{k}` in {} (accepted: {})",
                    path.display(),
                    known.join(", ")
                )));
            }
            merged.insert(k, v);
        }
    }
    let given = serde_json::to_value(flags).map_err(|e| Failure::Compute(e.into()))?;
    for (k, v) in object(given, "flags")? {
        if !v.is_null() {
            merged.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| Failure::Usage(format!("bad configuration: {e}")))
}

/// Network flags shared by most subcommands.
#[derive(Debug, Clone, Default, clap::Args, Serialize)]
pub struct NetFlags {
    /// Antenna counts M_dl,N_dl,M_ul,N_ul
    #[arg(long, value_delimiter = ',')]
    pub antennas: Option<Vec<usize>>,
    /// Downlink direct-link level
    #[arg(long)]
    pub alpha_dl: Option<f64>,
    /// Uplink direct-link level
    #[arg(long)]
    pub alpha_ul: Option<f64>,
    /// Uplink-to-downlink interference level
    #[arg(long)]
    pub alpha_i: Option<f64>,
    /// Side-channel level
    #[arg(long)]
    pub alpha_s: Option<f64>,
    /// Side-channel bandwidth relative to the main channel
    #[arg(long)]
    pub w: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetConfig {
    pub antennas: Vec<usize>,
    pub alpha_dl: f64,
    pub alpha_ul: f64,
    pub alpha_i: f64,
    pub alpha_s: f64,
    pub w: f64,
}

impl Default for NetConfig {
    fn default() -> Self {
        let l = LinkLevels::default();
        Self { antennas: Vec::new(), alpha_dl: l.alpha_dl, alpha_ul: l.alpha_ul, alpha_i: l.alpha_i, alpha_s: l.alpha_s, w: 0.0 }
    }
}

pub fn antennas(v: &[usize]) -> Result<AntennaConfig, Failure> {
    match v {
        [] => Err(Failure::Usage("missing --antennas M_dl,N_dl,M_ul,N_ul".into())),
        &[a, b, c, d] => Ok(AntennaConfig::new(a, b, c, d)?),
        _ => Err(Failure::Usage(format!("--antennas takes 4 counts, got {}", v.len()))),
    }
}

impl NetConfig {
    pub fn spec(&self) -> Result<NetworkSpec, Failure> {
        let levels = LinkLevels::new(self.alpha_dl, self.alpha_ul, self.alpha_i, self.alpha_s)?;
        Ok(NetworkSpec::new(antennas(&self.antennas)?, levels, self.w)?)
    }

    /// Closed forms assume unit direct and interference levels.
    pub fn unit_levels(&self) -> bool {
        self.alpha_dl == 1.0 && self.alpha_ul == 1.0 && self.alpha_i == 1.0
    }
}
