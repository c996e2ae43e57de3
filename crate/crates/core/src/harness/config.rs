use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::adversaries::{AdversaryName, AdversaryParams};
use crate::central::CentralParams;
use crate::net::{NodeId, TokenId, TokenState};
use crate::protocols::ProtocolName;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversarySpec {
    pub name: AdversaryName,
    /// Added to each run seed to get the schedule seed.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub params: AdversaryParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSpec {
    pub name: ProtocolName,
    /// Stage constants for the centralized schedulers; must be empty otherwise.
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
}

impl ProtocolSpec {
    pub fn central_params(&self) -> Result<CentralParams, HarnessError> {
        serde_json::from_value(serde_json::Value::Object(self.params.clone()))
            .map_err(|e| HarnessError::Config(format!("protocol params: {e}")))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialSpec {
    /// Every token at the schedule's source node (node 0 if it names none).
    #[default]
    SingleSource,
    /// Token `t` at node `t mod n`.
    OneTokenPerNode,
    /// An [`InitialDistribution`] JSON file.
    File(PathBuf),
}

/// Explicit initial holdings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialDistribution {
    /// Number of real tokens; ids `0..tokens`.
    pub tokens: usize,
    /// Tokens held by each node.
    pub holdings: Vec<Vec<u32>>,
}

impl InitialDistribution {
    pub fn to_state(&self) -> Result<TokenState, HarnessError> {
        let n = self.holdings.len();
        let mut state = TokenState::new(n, self.tokens, self.tokens);
        for (v, tokens) in self.holdings.iter().enumerate() {
            for &t in tokens {
                if t as usize >= self.tokens {
                    return Err(HarnessError::Config(format!("node {v} holds token {t} outside 0..{}", self.tokens)));
                }
                state.give(NodeId(v as u32), TokenId(t));
            }
        }
        Ok(state)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// Round in which every node holds every tracked token.
    #[default]
    Completion,
    /// First round a sentinel token reaches a target node.
    Sentinel,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// Per-run rows; defaults to `results.csv`.
    pub csv: Option<PathBuf>,
    /// Per-n sweep summary.
    pub summary: Option<PathBuf>,
    /// Two-column `log2 n, log2 median` data.
    pub plot: Option<PathBuf>,
    /// Directory for per-run GTR1 traces and metadata sidecars.
    pub trace_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub adversary: AdversarySpec,
    pub protocol: ProtocolSpec,
    #[serde(default)]
    pub initial: InitialSpec,
    /// Token count for generated initial states; defaults to `n`.
    #[serde(default)]
    pub k: Option<usize>,
    pub n: Vec<usize>,
    pub seeds: Vec<u64>,
    pub max_rounds: usize,
    #[serde(default)]
    pub metric: Metric,
    /// Re-check every round with an independent observer.
    #[serde(default)]
    pub check_invariants: bool,
    #[serde(default)]
    pub outputs: OutputSpec,
}

fn rebase(base: &Path, p: &mut Option<PathBuf>) {
    if let Some(path) = p {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file; relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        let mut config = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
        rebase(&base, &mut config.adversary.params.path);
        if let InitialSpec::File(p) = &mut config.initial {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        let out = &mut config.outputs;
        if out.csv.is_none() {
            out.csv = Some(PathBuf::from("results.csv"));
        }
        for p in [&mut out.csv, &mut out.summary, &mut out.plot, &mut out.trace_dir] {
            rebase(&base, p);
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n.is_empty() {
            return Err(HarnessError::Config("`n` must list at least one size".into()));
        }
        if self.seeds.is_empty() {
            return Err(HarnessError::Config("`seeds` must list at least one seed".into()));
        }
        if self.max_rounds == 0 {
            return Err(HarnessError::Config("`max_rounds` must be positive".into()));
        }
        if self.protocol.name.is_central() {
            self.protocol.central_params()?;
        } else if !self.protocol.params.is_empty() {
            return Err(HarnessError::Config(format!("protocol {} takes no params", self.protocol.name)));
        }
        if self.adversary.name == AdversaryName::File && self.adversary.params.path.is_none() {
            return Err(HarnessError::Config("the file adversary needs params.path".into()));
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn content_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"{
        "adversary": {"name": "static-line"},
        "protocol": {"name": "flood:0"},
        "n": [4], "seeds": [1], "max_rounds": 10
    }"#;

    #[test]
    fn minimal_config_parses() {
        let c = ExperimentConfig::from_json(BASIC).unwrap();
        assert_eq!(c.initial, InitialSpec::SingleSource);
        assert_eq!(c.protocol.name, ProtocolName::Flood(TokenId(0)));
        assert_eq!(c.content_hash().len(), 64);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_json(&BASIC.replace("static-line", "nope")).is_err());
        assert!(ExperimentConfig::from_json(&BASIC.replace("\"seeds\": [1]", "\"seeds\": []")).is_err());
        assert!(ExperimentConfig::from_json(&BASIC.replace("flood:0", "gossip")).is_err());
        let with_params = BASIC.replace(r#""name": "flood:0""#, r#""name": "rand-diff", "params": {"c_ex": 2}"#);
        assert!(ExperimentConfig::from_json(&with_params).is_err());
        let central = BASIC.replace(r#""name": "flood:0""#, r#""name": "central-kgossip", "params": {"c_ex": 2}"#);
        assert_eq!(ExperimentConfig::from_json(&central).unwrap().protocol.central_params().unwrap().c_ex, 2.0);
    }

    #[test]
    fn initial_variants() {
        let v: InitialSpec = serde_json::from_str(r#""one-token-per-node""#).unwrap();
        assert_eq!(v, InitialSpec::OneTokenPerNode);
        let v: InitialSpec = serde_json::from_str(r#"{"file": "x.json"}"#).unwrap();
        assert_eq!(v, InitialSpec::File("x.json".into()));
    }
}
