//! Social networks, reported profiles and the structural graph algorithms the
//! mechanisms are built on.
//!
//! Buyers are dense indices `0..n`. The seller is not a node; it is represented
//! only through [`SocialNetwork::seller_neighbors`]. Every algorithm here works
//! on the *reported* graph: the edges `(i, j)` with `j` in the invited set of a
//! non-absent buyer `i`.

use std::collections::VecDeque;

use thiserror::Error;

use crate::rational::Rational;

pub type NodeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node {0} is out of range")]
    InvalidNode(NodeId),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate node label `{0}`")]
    DuplicateLabel(String),
    #[error("nodes not reachable from the seller: {}", .0.join(", "))]
    Unreachable(Vec<String>),
    #[error("node {0} is not a participant")]
    NotParticipant(NodeId),
    #[error("invalid report for node {node}: {reason}")]
    InvalidReport { node: NodeId, reason: String },
    #[error("profile has {got} entries but the network has {expected} nodes")]
    ProfileSize { expected: usize, got: usize },
    #[error("node {0} has no shortest-path predecessor")]
    NoPredecessor(NodeId),
    #[error("the reported participant graph is not a path from the seller")]
    NotAPath,
}

/// Directed buyer graph plus the seller's neighbor set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialNetwork {
    labels: Vec<String>,
    out: Vec<Vec<NodeId>>,
    seller_neighbors: Vec<NodeId>,
}

impl SocialNetwork {
    /// Builds a network with labels `"0"`, `"1"`, ...
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
        seller_neighbors: impl IntoIterator<Item = NodeId>,
    ) -> Result<Self, GraphError> {
        Self::with_labels((0..n).map(|i| i.to_string()).collect(), edges, seller_neighbors)
    }

    pub fn with_labels(
        labels: Vec<String>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
        seller_neighbors: impl IntoIterator<Item = NodeId>,
    ) -> Result<Self, GraphError> {
        let n = labels.len();
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(GraphError::DuplicateLabel(l.clone()));
            }
        }
        let mut out = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n {
                return Err(GraphError::InvalidNode(u));
            }
            if v >= n {
                return Err(GraphError::InvalidNode(v));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            out[u].push(v);
        }
        for adj in &mut out {
            adj.sort_unstable();
            adj.dedup();
        }
        let mut rs: Vec<NodeId> = seller_neighbors.into_iter().collect();
        if let Some(&bad) = rs.iter().find(|&&v| v >= n) {
            return Err(GraphError::InvalidNode(bad));
        }
        rs.sort_unstable();
        rs.dedup();
        Ok(SocialNetwork {
            labels,
            out,
            seller_neighbors: rs,
        })
    }

    pub fn len(&self) -> usize {
        self.out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.len()
    }

    /// True out-neighbors `r_i`, sorted.
    pub fn out_neighbors(&self, i: NodeId) -> &[NodeId] {
        &self.out[i]
    }

    /// The seller's neighbors `r_s`, sorted.
    pub fn seller_neighbors(&self) -> &[NodeId] {
        &self.seller_neighbors
    }

    pub fn is_seller_neighbor(&self, i: NodeId) -> bool {
        self.seller_neighbors.binary_search(&i).is_ok()
    }

    pub fn label(&self, i: NodeId) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, adj)| adj.iter().map(move |&v| (u, v)))
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }

    /// Nodes the seller cannot reach when everybody invites every neighbor.
    pub fn unreachable_nodes(&self) -> Vec<NodeId> {
        let mut seen = vec![false; self.len()];
        let mut queue: VecDeque<NodeId> = VecDeque::new();
        for &v in &self.seller_neighbors {
            seen[v] = true;
            queue.push_back(v);
        }
        while let Some(u) = queue.pop_front() {
            for &v in &self.out[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        self.nodes().filter(|&v| !seen[v]).collect()
    }

    /// Connectivity assumption: every buyer is reachable from the seller.
    pub fn ensure_connected(&self) -> Result<(), GraphError> {
        let missing = self.unreachable_nodes();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(GraphError::Unreachable(
                missing.into_iter().map(|v| self.labels[v].clone()).collect(),
            ))
        }
    }

    /// Copy of this network with extra nodes appended and extra edges added.
    /// Used to wire Sybil identities and cartel side channels.
    pub fn extended(
        &self,
        extra_labels: impl IntoIterator<Item = String>,
        extra_edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<SocialNetwork, GraphError> {
        let mut labels = self.labels.clone();
        labels.extend(extra_labels);
        let edges: Vec<(NodeId, NodeId)> = self.edges().chain(extra_edges).collect();
        SocialNetwork::with_labels(labels, edges, self.seller_neighbors.iter().copied())
    }
}

/// A buyer's reported type: a bid and the neighbors she invites.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Report {
    pub bid: Rational,
    pub invited: Vec<NodeId>,
}

/// One entry per node: `None` is an absent buyer (she does not participate).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReportProfile {
    reports: Vec<Option<Report>>,
}

impl ReportProfile {
    pub fn new(net: &SocialNetwork, reports: Vec<Option<Report>>) -> Result<Self, GraphError> {
        if reports.len() != net.len() {
            return Err(GraphError::ProfileSize {
                expected: net.len(),
                got: reports.len(),
            });
        }
        let mut reports = reports;
        for (i, r) in reports.iter_mut().enumerate() {
            if let Some(r) = r {
                validate_report(net, i, r)?;
            }
        }
        Ok(ReportProfile { reports })
    }

    /// Every buyer bids `bids[i]` and invites all true neighbors.
    pub fn truthful(net: &SocialNetwork, bids: &[Rational]) -> Result<Self, GraphError> {
        let reports = net
            .nodes()
            .map(|i| {
                Some(Report {
                    bid: bids.get(i).cloned().unwrap_or_default(),
                    invited: net.out_neighbors(i).to_vec(),
                })
            })
            .collect::<Vec<_>>();
        if bids.len() != net.len() {
            return Err(GraphError::ProfileSize {
                expected: net.len(),
                got: bids.len(),
            });
        }
        Self::new(net, reports)
    }

    pub fn len(&self) -> usize {
        self.reports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reports.is_empty()
    }

    pub fn report(&self, i: NodeId) -> Option<&Report> {
        self.reports[i].as_ref()
    }

    pub fn is_absent(&self, i: NodeId) -> bool {
        self.reports[i].is_none()
    }

    /// Reported bid; absent buyers bid zero.
    pub fn bid(&self, i: NodeId) -> Rational {
        self.reports[i]
            .as_ref()
            .map(|r| r.bid.clone())
            .unwrap_or_default()
    }

    pub fn bids(&self) -> Vec<Rational> {
        (0..self.len()).map(|i| self.bid(i)).collect()
    }

    pub fn invited(&self, i: NodeId) -> &[NodeId] {
        self.reports[i]
            .as_ref()
            .map(|r| r.invited.as_slice())
            .unwrap_or(&[])
    }

    /// Copy with buyer `i`'s report replaced.
    pub fn with_report(
        &self,
        net: &SocialNetwork,
        i: NodeId,
        report: Option<Report>,
    ) -> Result<Self, GraphError> {
        let mut reports = self.reports.clone();
        let mut report = report;
        if let Some(r) = report.as_mut() {
            validate_report(net, i, r)?;
        }
        reports[i] = report;
        Ok(ReportProfile { reports })
    }

    /// Copy with only the bids replaced; invitations are untouched.
    pub fn with_bids(&self, bids: &[Rational]) -> Self {
        let reports = self
            .reports
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.as_ref().map(|r| Report {
                    bid: bids[i].clone(),
                    invited: r.invited.clone(),
                })
            })
            .collect();
        ReportProfile { reports }
    }

    pub fn reports(&self) -> &[Option<Report>] {
        &self.reports
    }
}

fn validate_report(net: &SocialNetwork, i: NodeId, r: &mut Report) -> Result<(), GraphError> {
    if !r.bid.in_unit_interval() {
        return Err(GraphError::InvalidReport {
            node: i,
            reason: format!("bid {} outside [0, 1]", r.bid),
        });
    }
    r.invited.sort_unstable();
    r.invited.dedup();
    if let Some(&bad) = r.invited.iter().find(|&&v| !net.has_edge(i, v)) {
        return Err(GraphError::InvalidReport {
            node: i,
            reason: format!("invites {bad}, which is not a neighbor"),
        });
    }
    Ok(())
}

/// Private valuations, one per node, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TrueProfile {
    values: Vec<Rational>,
}

impl TrueProfile {
    pub fn new(values: Vec<Rational>) -> Result<Self, GraphError> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.in_unit_interval()) {
            return Err(GraphError::InvalidReport {
                node: i,
                reason: format!("valuation {v} outside [0, 1]"),
            });
        }
        Ok(TrueProfile { values })
    }

    pub fn for_network(net: &SocialNetwork, values: Vec<Rational>) -> Result<Self, GraphError> {
        if values.len() != net.len() {
            return Err(GraphError::ProfileSize {
                expected: net.len(),
                got: values.len(),
            });
        }
        Self::new(values)
    }

    pub fn value(&self, i: NodeId) -> &Rational {
        &self.values[i]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Truthful report profile: bid the valuation, invite every neighbor.
    pub fn truthful_profile(&self, net: &SocialNetwork) -> Result<ReportProfile, GraphError> {
        ReportProfile::truthful(net, &self.values)
    }
}

/// BFS over invited edges from the seller. `blocked` is treated as absent.
fn closure_mask(net: &SocialNetwork, profile: &ReportProfile, blocked: Option<NodeId>) -> (Vec<bool>, Vec<NodeId>) {
    let n = net.len();
    let mut seen = vec![false; n];
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    let admissible = |v: NodeId| !profile.is_absent(v) && Some(v) != blocked;
    for &v in net.seller_neighbors() {
        if admissible(v) && !seen[v] {
            seen[v] = true;
            order.push(v);
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &v in profile.invited(u) {
            if admissible(v) && !seen[v] {
                seen[v] = true;
                order.push(v);
                queue.push_back(v);
            }
        }
    }
    (seen, order)
}

/// Buyers reachable from the seller through invitations, in BFS discovery order.
pub fn participation_closure(net: &SocialNetwork, profile: &ReportProfile) -> Vec<NodeId> {
    closure_mask(net, profile, None).1
}

pub fn participant_mask(net: &SocialNetwork, profile: &ReportProfile) -> Vec<bool> {
    closure_mask(net, profile, None).0
}

fn require_participant(mask: &[bool], i: NodeId) -> Result<(), GraphError> {
    if i < mask.len() && mask[i] {
        Ok(())
    } else {
        Err(GraphError::NotParticipant(i))
    }
}

/// `i ≼ j`: every invitation path from the seller to `j` passes through `i`.
pub fn is_diffusion_critical(
    net: &SocialNetwork,
    profile: &ReportProfile,
    i: NodeId,
    j: NodeId,
) -> Result<bool, GraphError> {
    let mask = participant_mask(net, profile);
    require_participant(&mask, i)?;
    require_participant(&mask, j)?;
    if i == j {
        return Ok(true);
    }
    Ok(!closure_mask(net, profile, Some(i)).0[j])
}

/// `N_{-i}`: participants that remain when `i` is not invited, sorted.
pub fn removed_without(
    net: &SocialNetwork,
    profile: &ReportProfile,
    i: NodeId,
) -> Result<Vec<NodeId>, GraphError> {
    let mask = participant_mask(net, profile);
    require_participant(&mask, i)?;
    let (without, _) = closure_mask(net, profile, Some(i));
    Ok(net.nodes().filter(|&v| without[v]).collect())
}

/// Participants `j` with `i ≼ j` (including `i`), sorted.
pub fn critical_descendants(
    net: &SocialNetwork,
    profile: &ReportProfile,
    i: NodeId,
) -> Result<Vec<NodeId>, GraphError> {
    let mask = participant_mask(net, profile);
    require_participant(&mask, i)?;
    let (without, _) = closure_mask(net, profile, Some(i));
    Ok(net.nodes().filter(|&v| mask[v] && !without[v]).collect())
}

/// Shortest-path layering of the reported participant graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layered {
    /// Distance from the seller; seller neighbors sit at 1, non-participants are `None`.
    pub dist: Vec<Option<usize>>,
    /// Reported edges joining consecutive layers, sorted.
    pub edges: Vec<(NodeId, NodeId)>,
    preds: Vec<Vec<NodeId>>,
    succs: Vec<Vec<NodeId>>,
}

impl Layered {
    pub fn predecessors(&self, i: NodeId) -> &[NodeId] {
        &self.preds[i]
    }

    pub fn successors(&self, i: NodeId) -> &[NodeId] {
        &self.succs[i]
    }

    /// Nodes reachable from `from` along layered edges, `from` included.
    pub fn reachable_from(&self, from: NodeId) -> Vec<bool> {
        let mut seen = vec![false; self.dist.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            for &v in &self.succs[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Participants sorted by (distance, id).
    pub fn nodes_by_layer(&self) -> Vec<NodeId> {
        let mut nodes: Vec<NodeId> = (0..self.dist.len()).filter(|&v| self.dist[v].is_some()).collect();
        nodes.sort_by_key(|&v| (self.dist[v], v));
        nodes
    }
}

pub fn layered_subgraph(net: &SocialNetwork, profile: &ReportProfile) -> Layered {
    let n = net.len();
    let mut dist: Vec<Option<usize>> = vec![None; n];
    let mut queue = VecDeque::new();
    for &v in net.seller_neighbors() {
        if !profile.is_absent(v) && dist[v].is_none() {
            dist[v] = Some(1);
            queue.push_back(v);
        }
    }
    let mut edges = Vec::new();
    while let Some(u) = queue.pop_front() {
        let du = dist[u].expect("queued nodes have a distance");
        for &v in profile.invited(u) {
            if profile.is_absent(v) {
                continue;
            }
            match dist[v] {
                None => {
                    dist[v] = Some(du + 1);
                    edges.push((u, v));
                    queue.push_back(v);
                }
                Some(dv) if dv == du + 1 => edges.push((u, v)),
                Some(_) => {}
            }
        }
    }
    edges.sort_unstable();
    let mut preds = vec![Vec::new(); n];
    let mut succs = vec![Vec::new(); n];
    for &(u, v) in &edges {
        preds[v].push(u);
        succs[u].push(v);
    }
    Layered {
        dist,
        edges,
        preds,
        succs,
    }
}

/// Parent of a node in the dominator tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dominator {
    Seller,
    Node(NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominatorTree {
    idom: Vec<Option<Dominator>>,
    depth: Vec<usize>,
}

impl DominatorTree {
    /// Immediate dominator, `None` for non-participants.
    pub fn idom(&self, i: NodeId) -> Option<Dominator> {
        self.idom[i]
    }

    /// `a` dominates `b` (reflexive).
    pub fn dominates(&self, a: NodeId, b: NodeId) -> bool {
        if self.idom[a].is_none() || self.idom[b].is_none() {
            return false;
        }
        let mut cur = b;
        loop {
            if cur == a {
                return true;
            }
            match self.idom[cur] {
                Some(Dominator::Node(p)) => cur = p,
                _ => return false,
            }
        }
    }

    pub fn depth(&self, i: NodeId) -> usize {
        self.depth[i]
    }
}

/// Dominator tree of `(participants ∪ {s}, E' ∪ r_s, s)`.
///
/// Nodes are processed by increasing distance; the layered graph is a DAG in
/// that order, so every predecessor is already placed when a node is reached
/// and its immediate dominator is the lowest common ancestor of all of them.
/// Ancestor queries use binary lifting.
pub fn dominator_tree(layered: &Layered, seller_neighbors: &[NodeId]) -> Result<DominatorTree, GraphError> {
    let n = layered.dist.len();
    let root = n;
    let levels = usize::BITS as usize - (n + 1).leading_zeros() as usize + 1;
    let mut up = vec![vec![root; n + 1]; levels];
    let mut depth = vec![0usize; n + 1];
    let mut idom = vec![None; n];

    let lca = |up: &Vec<Vec<usize>>, depth: &Vec<usize>, mut a: usize, mut b: usize| -> usize {
        if depth[a] < depth[b] {
            std::mem::swap(&mut a, &mut b);
        }
        let mut diff = depth[a] - depth[b];
        let mut k = 0;
        while diff > 0 {
            if diff & 1 == 1 {
                a = up[k][a];
            }
            diff >>= 1;
            k += 1;
        }
        if a == b {
            return a;
        }
        for k in (0..levels).rev() {
            if up[k][a] != up[k][b] {
                a = up[k][a];
                b = up[k][b];
            }
        }
        up[0][a]
    };

    for v in layered.nodes_by_layer() {
        let parent = if layered.dist[v] == Some(1) && seller_neighbors.binary_search(&v).is_ok() {
            root
        } else {
            let preds = layered.predecessors(v);
            let (&first, rest) = preds.split_first().ok_or(GraphError::NoPredecessor(v))?;
            rest.iter().fold(first, |acc, &p| lca(&up, &depth, acc, p))
        };
        up[0][v] = parent;
        for k in 1..levels {
            up[k][v] = up[k - 1][up[k - 1][v]];
        }
        depth[v] = depth[parent] + 1;
        idom[v] = Some(if parent == root {
            Dominator::Seller
        } else {
            Dominator::Node(parent)
        });
    }
    depth.truncate(n);
    Ok(DominatorTree { idom, depth })
}

/// `N_{-C_i}`: participants outside `i`'s weakly connected component of the
/// reported graph once the seller is removed, sorted.
pub fn components_without_seller(
    net: &SocialNetwork,
    profile: &ReportProfile,
    i: NodeId,
) -> Result<Vec<NodeId>, GraphError> {
    let mask = participant_mask(net, profile);
    require_participant(&mask, i)?;
    let n = net.len();
    let mut adj = vec![Vec::new(); n];
    for u in net.nodes().filter(|&u| mask[u]) {
        for &v in profile.invited(u) {
            if mask[v] {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
    }
    let mut in_component = vec![false; n];
    in_component[i] = true;
    let mut stack = vec![i];
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !in_component[v] {
                in_component[v] = true;
                stack.push(v);
            }
        }
    }
    Ok(net.nodes().filter(|&v| mask[v] && !in_component[v]).collect())
}

/// The participants in path order when the reported participant graph is a
/// simple path hanging off a single seller neighbor.
pub fn path_order(net: &SocialNetwork, profile: &ReportProfile) -> Result<Vec<NodeId>, GraphError> {
    let mask = participant_mask(net, profile);
    let heads: Vec<NodeId> = net.seller_neighbors().iter().copied().filter(|&v| mask[v]).collect();
    let [head] = heads.as_slice() else {
        return Err(GraphError::NotAPath);
    };
    let mut order = vec![*head];
    let mut cur = *head;
    loop {
        let next: Vec<NodeId> = profile.invited(cur).iter().copied().filter(|&v| mask[v]).collect();
        match next.as_slice() {
            [] => break,
            [v] if !order.contains(v) => {
                order.push(*v);
                cur = *v;
            }
            _ => return Err(GraphError::NotAPath),
        }
    }
    let participants = mask.iter().filter(|&&m| m).count();
    if order.len() != participants {
        return Err(GraphError::NotAPath);
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::q;

    fn truthful(net: &SocialNetwork) -> ReportProfile {
        ReportProfile::truthful(net, &vec![q("0.5"); net.len()]).unwrap()
    }

    #[test]
    fn rejects_malformed_networks() {
        assert_eq!(SocialNetwork::new(2, [(0, 0)], [0]), Err(GraphError::SelfLoop(0)));
        assert_eq!(SocialNetwork::new(2, [(0, 2)], [0]), Err(GraphError::InvalidNode(2)));
        assert_eq!(SocialNetwork::new(2, [(0, 1)], [5]), Err(GraphError::InvalidNode(5)));
        let net = SocialNetwork::new(3, [(0, 1)], [0]).unwrap();
        assert_eq!(net.ensure_connected(), Err(GraphError::Unreachable(vec!["2".into()])));
    }

    #[test]
    fn reports_must_stay_within_true_neighbors() {
        let net = fixtures::triangle().network;
        let bad = Report { bid: q("0.5"), invited: vec![2] }; // b does not know c
        assert!(ReportProfile::truthful(&net, &vec![q("0"); 3])
            .unwrap()
            .with_report(&net, 1, Some(bad))
            .is_err());
        let too_high = Report { bid: q("1.5"), invited: vec![] };
        assert!(ReportProfile::new(&net, vec![Some(too_high), None, None]).is_err());
    }

    #[test]
    fn closure_on_path_example_and_cut() {
        let net = fixtures::path_example().network;
        let p = truthful(&net);
        assert_eq!(participation_closure(&net, &p), vec![0, 1, 2, 3]);
        let cut = p
            .with_report(&net, 1, Some(Report { bid: q("0.1"), invited: vec![] }))
            .unwrap();
        assert_eq!(participation_closure(&net, &cut), vec![0, 1]);
    }

    #[test]
    fn closure_on_triangle_with_withholding() {
        let net = fixtures::triangle().network;
        let p = truthful(&net)
            .with_report(&net, 0, Some(Report { bid: q("0.3"), invited: vec![1] }))
            .unwrap();
        let mut got = participation_closure(&net, &p);
        got.sort();
        assert_eq!(got, vec![0, 1]);
    }

    #[test]
    fn absent_seller_neighbor_is_not_a_participant() {
        let net = fixtures::triangle().network;
        let p = truthful(&net).with_report(&net, 1, None).unwrap();
        assert_eq!(participation_closure(&net, &p), vec![0, 2]);
    }

    #[test]
    fn diffusion_critical_relation_on_triangle() {
        let net = fixtures::triangle().network;
        let p = truthful(&net);
        let (a, b, c) = (0, 1, 2);
        assert!(is_diffusion_critical(&net, &p, a, c).unwrap());
        assert!(!is_diffusion_critical(&net, &p, b, c).unwrap());
        for i in 0..3 {
            assert!(is_diffusion_critical(&net, &p, i, i).unwrap());
        }
        let cut = p.with_report(&net, a, Some(Report { bid: q("0.3"), invited: vec![b] })).unwrap();
        assert_eq!(is_diffusion_critical(&net, &cut, a, c), Err(GraphError::NotParticipant(c)));
    }

    #[test]
    fn removed_without_examples() {
        let net = fixtures::triangle().network;
        let p = truthful(&net);
        assert_eq!(removed_without(&net, &p, 1).unwrap(), vec![0, 2]);
        assert_eq!(removed_without(&net, &p, 0).unwrap(), vec![1]);
        let path = SocialNetwork::new(2, [(0, 1)], [0]).unwrap();
        assert_eq!(removed_without(&path, &truthful(&path), 0).unwrap(), Vec::<NodeId>::new());
    }

    #[test]
    fn layered_subgraph_on_two_items_sybil() {
        let net = fixtures::two_items_sybil().network;
        let l = layered_subgraph(&net, &truthful(&net));
        let (a, b, c, d, e) = (0, 1, 2, 3, 4);
        assert_eq!(l.dist, vec![Some(1), Some(1), Some(2), Some(3), Some(2)]);
        assert!(!l.edges.contains(&(d, e)));
        assert_eq!(l.edges, vec![(a, c), (b, e), (c, d)]);
    }

    #[test]
    fn layered_subgraph_on_triangle_drops_same_layer_edges() {
        let net = fixtures::triangle().network;
        let l = layered_subgraph(&net, &truthful(&net));
        assert_eq!(l.edges, vec![(0, 2)]);
        assert_eq!(l.dist, vec![Some(1), Some(1), Some(2)]);
    }

    #[test]
    fn layered_subgraph_on_path_is_identity() {
        let net = fixtures::path_example().network;
        let l = layered_subgraph(&net, &truthful(&net));
        assert_eq!(l.edges, net.edges().collect::<Vec<_>>());
        assert_eq!(l.dist, vec![Some(1), Some(2), Some(3), Some(4)]);
    }

    #[test]
    fn dominator_tree_examples() {
        let net = fixtures::two_items_sybil().network;
        let l = layered_subgraph(&net, &truthful(&net));
        let t = dominator_tree(&l, net.seller_neighbors()).unwrap();
        use Dominator::*;
        let got: Vec<_> = (0..5).map(|v| t.idom(v).unwrap()).collect();
        assert_eq!(got, vec![Seller, Seller, Node(0), Node(2), Node(1)]);

        let diamond = SocialNetwork::new(3, [(0, 2), (1, 2)], [0, 1]).unwrap();
        let l = layered_subgraph(&diamond, &truthful(&diamond));
        let t = dominator_tree(&l, diamond.seller_neighbors()).unwrap();
        assert_eq!(t.idom(2), Some(Seller));

        let idm_sybil = fixtures::idm_sybil().network;
        let l = layered_subgraph(&idm_sybil, &truthful(&idm_sybil));
        let t = dominator_tree(&l, idm_sybil.seller_neighbors()).unwrap();
        assert_eq!(t.idom(2), Some(Node(0)));
        assert!(t.dominates(0, 2));
        assert!(!t.dominates(1, 2));
    }

    #[test]
    fn dominator_tree_reports_orphans() {
        let mut l = layered_subgraph(&fixtures::path_example().network, &truthful(&fixtures::path_example().network));
        l.preds[2].clear();
        assert_eq!(dominator_tree(&l, &[0]), Err(GraphError::NoPredecessor(2)));
    }

    #[test]
    fn components_without_seller_examples() {
        let cartel_example = fixtures::cartel_example().network;
        assert!(components_without_seller(&cartel_example, &truthful(&cartel_example), 0).unwrap().is_empty());
        let star = SocialNetwork::new(3, [], [0, 1, 2]).unwrap();
        assert_eq!(components_without_seller(&star, &truthful(&star), 0).unwrap(), vec![1, 2]);
        let triangle = fixtures::triangle().network;
        assert!(components_without_seller(&triangle, &truthful(&triangle), 1).unwrap().is_empty());
    }

    #[test]
    fn path_order_detects_paths() {
        let path_example = fixtures::path_example().network;
        assert_eq!(path_order(&path_example, &truthful(&path_example)).unwrap(), vec![0, 1, 2, 3]);
        let triangle = fixtures::triangle().network;
        assert_eq!(path_order(&triangle, &truthful(&triangle)), Err(GraphError::NotAPath));
    }
}
