//! Scenario files: a network, valuations, and how to run the auction.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use dak_core::fixtures::Instance;
use dak_core::graph::{SocialNetwork, TrueProfile};
use dak_core::mechanism::{Mechanism, MECHANISM_NAMES};
use dak_core::Rational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Node ids may be written as strings or as non-negative integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeId {
    Name(String),
    Number(u64),
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Name(s) => f.write_str(s),
            NodeId::Number(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Mc,
}

fn one() -> usize {
    1
}

fn default_mechanism() -> String {
    "fpdm-bf".into()
}

fn default_samples() -> u64 {
    10_000
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub nodes: Vec<NodeId>,
    #[serde(default)]
    pub edges: Vec<(NodeId, NodeId)>,
    pub seller_neighbors: Vec<NodeId>,
    /// Decimal or fraction strings in `[0, 1]`.
    pub valuations: BTreeMap<String, String>,
    #[serde(default = "one")]
    pub items: usize,
    #[serde(default = "default_mechanism")]
    pub mechanism: String,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: u64,
}

/// A validated scenario.
pub struct Loaded {
    pub scenario: Scenario,
    pub instance: Instance,
    pub mechanism: Mechanism,
    pub hash: String,
}

impl Scenario {
    pub fn read(path: &Path) -> CliResult<Scenario> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Scenario::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Scenario> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("scenario: {e}")))
    }

    pub fn from_instance(inst: &Instance, items: usize, mechanism: &str, mode: Mode, seed: u64, samples: u64) -> Scenario {
        let net = &inst.network;
        let id = |v: usize| NodeId::Name(net.label(v).to_string());
        Scenario {
            nodes: net.nodes().map(id).collect(),
            edges: net.edges().map(|(u, v)| (id(u), id(v))).collect(),
            seller_neighbors: net.seller_neighbors().iter().map(|&v| id(v)).collect(),
            valuations: net
                .nodes()
                .map(|v| (net.label(v).to_string(), inst.values.value(v).to_exact_string()))
                .collect(),
            items,
            mechanism: mechanism.to_string(),
            mode,
            seed,
            samples,
        }
    }

    /// Stable digest of the effective scenario.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("scenario serializes");
        let digest = Sha256::digest(canon.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(self) -> CliResult<Loaded> {
        let labels: Vec<String> = self.nodes.iter().map(|n| n.to_string()).collect();
        let index: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        if index.len() != labels.len() {
            return Err(CliError::Validation("duplicate node id".into()));
        }
        let lookup = |n: &NodeId| -> CliResult<usize> {
            index
                .get(n.to_string().as_str())
                .copied()
                .ok_or_else(|| CliError::Validation(format!("unknown node `{n}`")))
        };
        let edges = self
            .edges
            .iter()
            .map(|(u, v)| Ok((lookup(u)?, lookup(v)?)))
            .collect::<CliResult<Vec<_>>>()?;
        let seller = self.seller_neighbors.iter().map(lookup).collect::<CliResult<Vec<_>>>()?;
        let network = SocialNetwork::with_labels(labels.clone(), edges, seller)?;
        if let Some(extra) = self.valuations.keys().find(|k| !index.contains_key(k.as_str())) {
            return Err(CliError::Validation(format!("valuation for unknown node `{extra}`")));
        }
        let values = labels
            .iter()
            .map(|l| {
                let s = self
                    .valuations
                    .get(l)
                    .ok_or_else(|| CliError::Validation(format!("missing valuation for `{l}`")))?;
                let v: Rational = s
                    .parse()
                    .map_err(|e| CliError::Validation(format!("valuation of `{l}` (`{s}`): {e}")))?;
                if !v.in_unit_interval() {
                    return Err(CliError::Validation(format!("valuation of `{l}` is {s}, outside [0, 1]")));
                }
                Ok(v)
            })
            .collect::<CliResult<Vec<_>>>()?;
        let values = TrueProfile::for_network(&network, values)?;
        if self.items == 0 {
            return Err(CliError::Validation("items must be at least 1".into()));
        }
        let mechanism = Mechanism::from_name(&self.mechanism, self.items).ok_or_else(|| {
            CliError::Validation(format!(
                "unknown mechanism `{}`; expected one of {}",
                self.mechanism,
                MECHANISM_NAMES.join(", ")
            ))
        })?;
        if self.mode == Mode::Mc && !mechanism.samples() {
            return Err(CliError::Validation(format!("{} is exact-only", self.mechanism)));
        }
        if self.mode == Mode::Mc && self.samples == 0 {
            return Err(CliError::Validation("samples must be positive".into()));
        }
        Ok(Loaded {
            hash: self.hash(),
            scenario: self,
            instance: Instance { network, values },
            mechanism,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2: &str = r#"{
        "nodes": ["a", "b", "c"],
        "edges": [["a", "b"], ["b", "a"], ["a", "c"]],
        "seller_neighbors": ["a", "b"],
        "valuations": {"a": "0.3", "b": "0", "c": "0.9"}
    }"#;

    #[test]
    fn defaults_fill_in() {
        let s = Scenario::parse(FIG2).unwrap();
        assert_eq!((s.items, s.mode, s.samples), (1, Mode::Exact, 10_000));
        let l = s.validate().unwrap();
        assert_eq!(l.instance.network.len(), 3);
        assert_eq!(l.hash.len(), 64);
    }

    #[test]
    fn numeric_ids_and_bad_inputs() {
        let s = Scenario::parse(r#"{"nodes":[1,2],"edges":[[1,2]],"seller_neighbors":[1],"valuations":{"1":"1/2","2":"1"}}"#).unwrap();
        assert!(s.validate().is_ok());
        for bad in [
            r#"{"nodes":["a"],"seller_neighbors":["a"],"valuations":{"a":"1.5"}}"#,
            r#"{"nodes":["a"],"seller_neighbors":["a"],"valuations":{}}"#,
            r#"{"nodes":["a"],"seller_neighbors":["z"],"valuations":{"a":"0"}}"#,
            r#"{"nodes":["a"],"seller_neighbors":["a"],"valuations":{"a":"0"},"mechanism":"vcg"}"#,
            r#"{"nodes":["a"],"seller_neighbors":["a"],"valuations":{"a":"0"},"mechanism":"idm-stub","mode":"mc"}"#,
            r#"{"nodes":["a"],"seller_neighbors":["a"],"valuations":{"a":"0"},"items":0}"#,
        ] {
            let r = Scenario::parse(bad).and_then(Scenario::validate);
            assert_eq!(r.err().map(|e| e.code()), Some(1), "{bad}");
        }
        // numbers are not accepted as valuations
        assert!(Scenario::parse(r#"{"nodes":["a"],"seller_neighbors":["a"],"valuations":{"a":0.5}}"#).is_err());
    }

    #[test]
    fn emit_then_load_is_identity() {
        let inst = dak_core::fixtures::two_items_sybil();
        let s = Scenario::from_instance(&inst, 2, "spmupdm", Mode::Mc, 9, 500);
        let text = serde_json::to_string_pretty(&s).unwrap();
        let back = Scenario::parse(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
        let l = back.validate().unwrap();
        assert_eq!(l.instance, inst);
    }
}
