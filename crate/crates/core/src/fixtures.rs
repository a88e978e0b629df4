//! The worked example instances used throughout the documentation and tests.
//!
//! Node ids follow label order: `a = 0`, `b = 1`, and so on.

use crate::graph::{SocialNetwork, TrueProfile};
use crate::rational::q;

/// A network together with the buyers' private valuations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub network: SocialNetwork,
    pub values: TrueProfile,
}

fn build(labels: &str, edges: &[(char, char)], seller: &str, values: &[&str]) -> Instance {
    let labels: Vec<String> = labels.chars().map(String::from).collect();
    let id = |c: char| labels.iter().position(|l| l.starts_with(c)).expect("known label");
    let network = SocialNetwork::with_labels(
        labels.clone(),
        edges.iter().map(|&(u, v)| (id(u), id(v))),
        seller.chars().map(id),
    )
    .expect("fixture network is valid");
    let values = TrueProfile::for_network(&network, values.iter().map(|v| q(v)).collect())
        .expect("fixture values are valid");
    Instance { network, values }
}

/// Four-buyer path `s → a → b → c → d`.
pub fn path_example() -> Instance {
    build(
        "abcd",
        &[('a', 'b'), ('b', 'c'), ('c', 'd')],
        "a",
        &["0.2", "0.1", "0.4", "1"],
    )
}

/// `s → {a, b}`, `a ↔ b`, `a → c`.
pub fn triangle() -> Instance {
    build(
        "abc",
        &[('a', 'b'), ('b', 'a'), ('a', 'c')],
        "ab",
        &["0.3", "0", "0.9"],
    )
}

/// Sybil example: `s → {a, b}`, `a → c`.
pub fn idm_sybil() -> Instance {
    build("abc", &[('a', 'c')], "ab", &["0", "0.1", "1"])
}

/// Two-buyer path where the first buyer values the item at zero.
pub fn inefficiency() -> Instance {
    build("ab", &[('a', 'b')], "a", &["0", "1"])
}

/// Collusion example: `s → {a, b}`, `a ↔ b`, `a → c`, `b → c`.
pub fn cartel_example() -> Instance {
    build(
        "abc",
        &[('a', 'b'), ('b', 'a'), ('a', 'c'), ('b', 'c')],
        "ab",
        &["0.1", "0.1", "1"],
    )
}

/// Multi-unit example; same graph as [`triangle`].
pub fn two_items() -> Instance {
    triangle()
}

/// `s → {a, b}`, `a → c → d → e`, `b → e`.
pub fn two_items_sybil() -> Instance {
    build(
        "abcde",
        &[('a', 'c'), ('c', 'd'), ('b', 'e'), ('d', 'e')],
        "ab",
        &["0.1", "0.3", "0.1", "0.2", "0.3"],
    )
}
