//! Maps from a reported network to a distribution over buyer orderings.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use thiserror::Error;

use crate::graph::{
    critical_descendants, layered_subgraph, participant_mask, participation_closure, NodeId, ReportProfile,
    SocialNetwork,
};
use crate::pdm::uniform_draw;
use crate::rational::Rational;

/// Participant count above which exact enumeration is refused.
pub const DEFAULT_EXACT_CAP: usize = 9;

/// The exact-mode cap, overridable through `DAK_EXACT_CAP`.
pub fn exact_cap() -> usize {
    std::env::var("DAK_EXACT_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_EXACT_CAP)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("no participants to order")]
    Empty,
    #[error("exact mode infeasible: {participants} participants exceed the cap of {cap}; use Monte Carlo mode")]
    CapExceeded { participants: usize, cap: usize },
    #[error("weight for node {0} must be positive")]
    BadWeight(NodeId),
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(Rational),
}

/// Frontier weights for the weighted generalized breadth-first map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Weights {
    /// `1 + |invited|` for each buyer.
    OutDegree,
    /// Explicit positive weight per node id.
    Custom(Vec<Rational>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapKind {
    BreadthFirst,
    GeneralizedBreadthFirst,
    WeightedGbf(Weights),
}

impl MapKind {
    pub fn weighted() -> Self {
        MapKind::WeightedGbf(Weights::OutDegree)
    }

    fn weight(&self, profile: &ReportProfile, v: NodeId) -> Result<Rational, MapError> {
        match self {
            MapKind::WeightedGbf(Weights::OutDegree) => Ok(Rational::from(1 + profile.invited(v).len())),
            MapKind::WeightedGbf(Weights::Custom(w)) => match w.get(v) {
                Some(x) if x.is_positive() => Ok(x.clone()),
                _ => Err(MapError::BadWeight(v)),
            },
            _ => Ok(Rational::one()),
        }
    }
}

/// A finite distribution over orderings, support sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationDistribution {
    support: Vec<(Vec<NodeId>, Rational)>,
}

impl PermutationDistribution {
    /// Builds a distribution, merging duplicate orderings and dropping zero mass.
    pub fn new(entries: Vec<(Vec<NodeId>, Rational)>) -> Result<Self, MapError> {
        let mut merged: BTreeMap<Vec<NodeId>, Rational> = BTreeMap::new();
        for (order, p) in entries {
            *merged.entry(order).or_insert_with(Rational::zero) += p;
        }
        let support: Vec<_> = merged.into_iter().filter(|(_, p)| p.is_positive()).collect();
        let total: Rational = support.iter().map(|(_, p)| p).sum();
        if total != Rational::one() {
            return Err(MapError::NotNormalized(total));
        }
        Ok(PermutationDistribution { support })
    }

    pub fn point(order: Vec<NodeId>) -> Self {
        PermutationDistribution {
            support: vec![(order, Rational::one())],
        }
    }

    pub fn support(&self) -> &[(Vec<NodeId>, Rational)] {
        &self.support
    }

    pub fn probability(&self, order: &[NodeId]) -> Rational {
        self.support
            .iter()
            .find(|(o, _)| o == order)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

/// Participants grouped by distance from the seller, each layer sorted by id.
fn layers(net: &SocialNetwork, profile: &ReportProfile) -> Vec<Vec<NodeId>> {
    let layered = layered_subgraph(net, profile);
    let mut out: Vec<Vec<NodeId>> = Vec::new();
    for v in layered.nodes_by_layer() {
        let d = layered.dist[v].expect("layered nodes have a distance");
        while out.len() < d {
            out.push(Vec::new());
        }
        out[d - 1].push(v);
    }
    out.retain(|l| !l.is_empty());
    out
}

/// Frontier of the generalized map after `selected` has been output:
/// seller neighbors plus everything invited by a selected buyer, minus `selected`.
fn frontier(net: &SocialNetwork, profile: &ReportProfile, mask: &[bool], selected: &[bool]) -> Vec<NodeId> {
    let mut set = BTreeSet::new();
    for &v in net.seller_neighbors() {
        if mask[v] && !selected[v] {
            set.insert(v);
        }
    }
    for u in net.nodes().filter(|&u| selected[u]) {
        for &v in profile.invited(u) {
            if mask[v] && !selected[v] {
                set.insert(v);
            }
        }
    }
    set.into_iter().collect()
}

fn pick_weighted<R: Rng + ?Sized>(weights: &[Rational], rng: &mut R) -> usize {
    let total: Rational = weights.iter().sum();
    let target = uniform_draw(rng) * &total;
    let mut acc = Rational::zero();
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if target < acc {
            return i;
        }
    }
    weights.len() - 1
}

/// Draws one ordering of the participants.
pub fn sample_order<R: Rng + ?Sized>(
    kind: &MapKind,
    net: &SocialNetwork,
    profile: &ReportProfile,
    rng: &mut R,
) -> Result<Vec<NodeId>, MapError> {
    let mask = participant_mask(net, profile);
    if !mask.iter().any(|&m| m) {
        return Err(MapError::Empty);
    }
    let mut order = Vec::new();
    match kind {
        MapKind::BreadthFirst => {
            for mut layer in layers(net, profile) {
                while !layer.is_empty() {
                    let k = rng.gen_range(0..layer.len());
                    order.push(layer.remove(k));
                }
            }
        }
        MapKind::GeneralizedBreadthFirst | MapKind::WeightedGbf(_) => {
            let mut selected = vec![false; net.len()];
            loop {
                let front = frontier(net, profile, &mask, &selected);
                if front.is_empty() {
                    break;
                }
                let k = if let MapKind::GeneralizedBreadthFirst = kind {
                    rng.gen_range(0..front.len())
                } else {
                    let w = front
                        .iter()
                        .map(|&v| kind.weight(profile, v))
                        .collect::<Result<Vec<_>, _>>()?;
                    pick_weighted(&w, rng)
                };
                selected[front[k]] = true;
                order.push(front[k]);
            }
        }
    }
    Ok(order)
}

pub fn enumerate_distribution(
    kind: &MapKind,
    net: &SocialNetwork,
    profile: &ReportProfile,
) -> Result<PermutationDistribution, MapError> {
    enumerate_distribution_capped(kind, net, profile, exact_cap())
}

pub fn enumerate_distribution_capped(
    kind: &MapKind,
    net: &SocialNetwork,
    profile: &ReportProfile,
    cap: usize,
) -> Result<PermutationDistribution, MapError> {
    let mask = participant_mask(net, profile);
    let participants = mask.iter().filter(|&&m| m).count();
    if participants == 0 {
        return Err(MapError::Empty);
    }
    if participants > cap {
        return Err(MapError::CapExceeded { participants, cap });
    }
    let mut entries = Vec::new();
    match kind {
        MapKind::BreadthFirst => {
            let layers = layers(net, profile);
            let mut count: i128 = 1;
            for l in &layers {
                count *= (1..=l.len() as i128).product::<i128>();
            }
            let p = Rational::new(1, count);
            let mut prefix = Vec::with_capacity(participants);
            bf_rec(&layers, 0, &mut layers[0].clone(), &mut prefix, &p, &mut entries);
        }
        _ => {
            let mut selected = vec![false; net.len()];
            let mut prefix = Vec::with_capacity(participants);
            gbf_rec(kind, net, profile, &mask, &mut selected, &mut prefix, Rational::one(), &mut entries)?;
        }
    }
    PermutationDistribution::new(entries)
}

fn bf_rec(
    layers: &[Vec<NodeId>],
    li: usize,
    remaining: &mut Vec<NodeId>,
    prefix: &mut Vec<NodeId>,
    p: &Rational,
    out: &mut Vec<(Vec<NodeId>, Rational)>,
) {
    if remaining.is_empty() {
        if li + 1 == layers.len() {
            out.push((prefix.clone(), p.clone()));
        } else {
            let mut next = layers[li + 1].clone();
            bf_rec(layers, li + 1, &mut next, prefix, p, out);
        }
        return;
    }
    for k in 0..remaining.len() {
        let v = remaining.remove(k);
        prefix.push(v);
        bf_rec(layers, li, remaining, prefix, p, out);
        prefix.pop();
        remaining.insert(k, v);
    }
}

#[allow(clippy::too_many_arguments)]
fn gbf_rec(
    kind: &MapKind,
    net: &SocialNetwork,
    profile: &ReportProfile,
    mask: &[bool],
    selected: &mut Vec<bool>,
    prefix: &mut Vec<NodeId>,
    p: Rational,
    out: &mut Vec<(Vec<NodeId>, Rational)>,
) -> Result<(), MapError> {
    let front = frontier(net, profile, mask, selected);
    if front.is_empty() {
        out.push((prefix.clone(), p));
        return Ok(());
    }
    let w = front
        .iter()
        .map(|&v| kind.weight(profile, v))
        .collect::<Result<Vec<_>, _>>()?;
    let total: Rational = w.iter().sum();
    for (k, &v) in front.iter().enumerate() {
        selected[v] = true;
        prefix.push(v);
        gbf_rec(kind, net, profile, mask, selected, prefix, &p * &w[k] / &total, out)?;
        prefix.pop();
        selected[v] = false;
    }
    Ok(())
}

/// Outcome of an order-preservation scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderCheck {
    pub preserving: bool,
    /// `(ordering, (ancestor, descendant))` where the descendant came first.
    pub violations: Vec<(Vec<NodeId>, (NodeId, NodeId))>,
}

pub fn verify_order_preserving(
    dist: &PermutationDistribution,
    net: &SocialNetwork,
    profile: &ReportProfile,
) -> OrderCheck {
    let participants = participation_closure(net, profile);
    let mut pairs = Vec::new();
    for &i in &participants {
        for j in critical_descendants(net, profile, i).expect("participant") {
            if j != i {
                pairs.push((i, j));
            }
        }
    }
    let mut violations = Vec::new();
    for (order, _) in dist.support() {
        let mut pos = vec![usize::MAX; net.len()];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        for &(i, j) in &pairs {
            if pos[i] > pos[j] {
                violations.push((order.clone(), (i, j)));
            }
        }
    }
    OrderCheck {
        preserving: violations.is_empty(),
        violations,
    }
}

/// `q_A`: probability that exactly the set `A` precedes `i`, keyed by sorted `A`.
/// Orderings without `i` contribute nothing.
pub fn prefix_masses(dist: &PermutationDistribution, i: NodeId) -> BTreeMap<Vec<NodeId>, Rational> {
    let mut q: BTreeMap<Vec<NodeId>, Rational> = BTreeMap::new();
    for (order, p) in dist.support() {
        if let Some(k) = order.iter().position(|&v| v == i) {
            let mut a = order[..k].to_vec();
            a.sort_unstable();
            *q.entry(a).or_insert_with(Rational::zero) += p;
        }
    }
    q
}

/// `q_A` straight from the map's selection process, without enumerating
/// orderings. Both maps only ever depend on the set already output, so a
/// dynamic program over selected sets suffices.
pub fn prefix_masses_direct(
    kind: &MapKind,
    net: &SocialNetwork,
    profile: &ReportProfile,
    i: NodeId,
) -> Result<BTreeMap<Vec<NodeId>, Rational>, MapError> {
    let mask = participant_mask(net, profile);
    let participants: Vec<NodeId> = net.nodes().filter(|&v| mask[v]).collect();
    if participants.is_empty() {
        return Err(MapError::Empty);
    }
    if participants.len() > 20 {
        return Err(MapError::CapExceeded {
            participants: participants.len(),
            cap: 20,
        });
    }
    let mut q = BTreeMap::new();
    if !mask[i] {
        return Ok(q);
    }
    let bit: BTreeMap<NodeId, usize> = participants.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let layer_of = match kind {
        MapKind::BreadthFirst => {
            let layered = layered_subgraph(net, profile);
            Some(layered.dist)
        }
        _ => None,
    };
    // states reached with positive probability, processed by popcount
    let mut reach: BTreeMap<u32, Rational> = BTreeMap::new();
    reach.insert(0, Rational::one());
    let full = participants.len() as u32;
    for size in 0..full {
        let current: Vec<(u32, Rational)> = reach
            .iter()
            .filter(|(s, _)| s.count_ones() == size)
            .map(|(s, p)| (*s, p.clone()))
            .collect();
        for (set, p) in current {
            let selected: Vec<bool> = net
                .nodes()
                .map(|v| bit.get(&v).is_some_and(|&b| set & (1 << b) != 0))
                .collect();
            let cands: Vec<NodeId> = match &layer_of {
                Some(dist) => {
                    let open: Vec<NodeId> = participants.iter().copied().filter(|&v| !selected[v]).collect();
                    let d = open.iter().map(|&v| dist[v]).min().flatten();
                    open.into_iter().filter(|&v| dist[v] == d).collect()
                }
                None => frontier(net, profile, &mask, &selected),
            };
            let w = cands
                .iter()
                .map(|&v| kind.weight(profile, v))
                .collect::<Result<Vec<_>, _>>()?;
            let total: Rational = w.iter().sum();
            for (k, &v) in cands.iter().enumerate() {
                let step = &p * &w[k] / &total;
                if v == i {
                    let a: Vec<NodeId> = participants.iter().copied().filter(|&u| selected[u]).collect();
                    *q.entry(a).or_insert_with(Rational::zero) += step;
                } else {
                    *reach.entry(set | (1 << bit[&v])).or_insert_with(Rational::zero) += step;
                }
            }
        }
    }
    Ok(q)
}

/// `mu1` stochastically dominates `mu2` for buyer `i`: for every
/// `A ⊆ universe \ {i}`, the mass of predecessor sets inside `A` is at least
/// as large under `mu1`.
pub fn stochastically_dominates(
    mu1: &PermutationDistribution,
    mu2: &PermutationDistribution,
    i: NodeId,
    universe: &[NodeId],
) -> Result<bool, MapError> {
    let others: Vec<NodeId> = universe.iter().copied().filter(|&v| v != i).collect();
    if others.len() > 20 {
        return Err(MapError::CapExceeded {
            participants: others.len(),
            cap: 20,
        });
    }
    let f1 = subset_sums(&prefix_masses(mu1, i), &others);
    let f2 = subset_sums(&prefix_masses(mu2, i), &others);
    Ok(f1.iter().zip(&f2).all(|(a, b)| a >= b))
}

/// `F(A) = Σ_{B ⊆ A} q_B` for every mask `A` over `others`.
fn subset_sums(q: &BTreeMap<Vec<NodeId>, Rational>, others: &[NodeId]) -> Vec<Rational> {
    let n = others.len();
    let mut f = vec![Rational::zero(); 1 << n];
    'sets: for (a, p) in q {
        let mut m = 0usize;
        for v in a {
            match others.iter().position(|u| u == v) {
                Some(k) => m |= 1 << k,
                None => continue 'sets,
            }
        }
        f[m] += p;
    }
    for k in 0..n {
        for m in 0..(1usize << n) {
            if m & (1 << k) != 0 {
                let lower = f[m ^ (1 << k)].clone();
                f[m] += lower;
            }
        }
    }
    f
}
