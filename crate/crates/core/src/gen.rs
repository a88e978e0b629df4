//! Random instances for suites and sweeps, plus exhaustive small-graph families.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::fixtures::Instance;
use crate::graph::{NodeId, SocialNetwork, TrueProfile};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Path,
    Tree,
    Gnp,
    Layered,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Path, Family::Tree, Family::Gnp, Family::Layered];

    pub fn name(self) -> &'static str {
        match self {
            Family::Path => "path",
            Family::Tree => "tree",
            Family::Gnp => "gnp",
            Family::Layered => "layered",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        let s = if s == "gnp-connected" { "gnp" } else { s };
        Family::ALL.into_iter().find(|f| f.name() == s)
    }
}

/// `a`, `b`, ... for up to 26 nodes, then `n26`, `n27`, ...
pub fn default_labels(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| if i < 26 { ((b'a' + i as u8) as char).to_string() } else { format!("n{i}") })
        .collect()
}

/// Values uniform on `{0, 1/denom, ..., 1}`.
pub fn random_values<R: Rng + ?Sized>(n: usize, denom: i128, rng: &mut R) -> Vec<Rational> {
    (0..n).map(|_| Rational::new(rng.gen_range(0..=denom), denom)).collect()
}

fn finish<R: Rng + ?Sized>(
    n: usize,
    edges: Vec<(NodeId, NodeId)>,
    seller: Vec<NodeId>,
    denom: i128,
    rng: &mut R,
) -> Result<Instance> {
    let network = SocialNetwork::with_labels(default_labels(n), edges, seller)?;
    let values = TrueProfile::for_network(&network, random_values(n, denom, rng))?;
    Ok(Instance { network, values })
}

/// `s → 0 → 1 → ... → n-1`.
pub fn path<R: Rng + ?Sized>(n: usize, denom: i128, rng: &mut R) -> Result<Instance> {
    let edges = (1..n).map(|v| (v - 1, v)).collect();
    finish(n, edges, vec![0], denom, rng)
}

/// Random recursive tree hanging off one or more seller neighbors.
pub fn tree<R: Rng + ?Sized>(n: usize, denom: i128, rng: &mut R) -> Result<Instance> {
    let mut seller = vec![0];
    let mut edges = Vec::new();
    for v in 1..n {
        // the seller is one more possible parent
        let p = rng.gen_range(0..=v);
        if p == v {
            seller.push(v);
        } else {
            edges.push((p, v));
        }
    }
    finish(n, edges, seller, denom, rng)
}

/// Directed G(n, p) with random seller neighbors, resampled until every
/// buyer is reachable from the seller.
pub fn gnp_connected<R: Rng + ?Sized>(n: usize, p: f64, denom: i128, rng: &mut R) -> Result<Instance> {
    loop {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let mut seller: Vec<NodeId> = (0..n).filter(|_| rng.gen_bool(p)).collect();
        if seller.is_empty() && n > 0 {
            seller.push(rng.gen_range(0..n));
        }
        let net = SocialNetwork::new(n, edges.iter().copied(), seller.iter().copied())?;
        if net.unreachable_nodes().is_empty() {
            return finish(n, edges, seller, denom, rng);
        }
    }
}

/// Layers of the given sizes; every node gets one random parent in the
/// previous layer and further forward, sideways and back edges with probability `p`.
pub fn layered<R: Rng + ?Sized>(sizes: &[usize], p: f64, denom: i128, rng: &mut R) -> Result<Instance> {
    let mut layers: Vec<Vec<NodeId>> = Vec::new();
    let mut next = 0;
    for &s in sizes.iter().filter(|&&s| s > 0) {
        layers.push((next..next + s).collect());
        next += s;
    }
    let n = next;
    let mut edges = Vec::new();
    for w in layers.windows(2) {
        for &v in &w[1] {
            edges.push((*w[0].choose(rng).expect("nonempty layer"), v));
        }
    }
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let seller = layers.first().cloned().unwrap_or_default();
    finish(n, edges, seller, denom, rng)
}

/// One instance of the family with `n` buyers.
pub fn generate<R: Rng + ?Sized>(family: Family, n: usize, denom: i128, rng: &mut R) -> Result<Instance> {
    match family {
        Family::Path => path(n, denom, rng),
        Family::Tree => tree(n, denom, rng),
        Family::Gnp => gnp_connected(n, 0.35, denom, rng),
        Family::Layered => {
            let mut sizes = Vec::new();
            let mut left = n;
            while left > 0 {
                let s = rng.gen_range(1..=left.min(3));
                sizes.push(s);
                left -= s;
            }
            layered(&sizes, 0.15, denom, rng)
        }
    }
}

/// Any family, chosen uniformly.
pub fn random_instance<R: Rng + ?Sized>(n: usize, denom: i128, rng: &mut R) -> Result<Instance> {
    let f = *Family::ALL.choose(rng).expect("families");
    generate(f, n, denom, rng)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

// A network on `n` buyers as a bit code: one bit per ordered pair `u → v`,
// then one bit per seller edge.
fn pair_bit(n: usize, u: usize, v: usize) -> usize {
    u * (n - 1) + if v < u { v } else { v - 1 }
}

/// Calls `f` once per isomorphism class of networks on `n` buyers where every
/// buyer is reachable from the seller. The class representative is the one
/// with the smallest bit code. Feasible up to `n = 5` (a few seconds).
pub fn for_each_connected_network(n: usize, mut f: impl FnMut(SocialNetwork)) {
    assert!(n <= 5, "exhaustive enumeration is limited to five buyers");
    let m = n * n.saturating_sub(1);
    let nbits = m + n;
    let chunks = nbits.div_ceil(8);
    // per non-identity permutation, 8-bit lookup tables mapping code bits to permuted bits
    let tables: Vec<Vec<[u32; 256]>> = permutations(n)
        .into_iter()
        .filter(|p| p.iter().enumerate().any(|(i, &x)| i != x))
        .map(|p| {
            let image = |b: usize| {
                if b < m {
                    let (u, r) = (b / (n - 1), b % (n - 1));
                    let v = if r < u { r } else { r + 1 };
                    pair_bit(n, p[u], p[v])
                } else {
                    m + p[b - m]
                }
            };
            (0..chunks)
                .map(|c| {
                    let mut t = [0u32; 256];
                    for (val, slot) in t.iter_mut().enumerate() {
                        for k in 0..8 {
                            let b = c * 8 + k;
                            if b < nbits && val & (1 << k) != 0 {
                                *slot |= 1 << image(b);
                            }
                        }
                    }
                    t
                })
                .collect()
        })
        .collect();
    let full = (1u32 << n) - 1;
    for code in 0u32..(1 << nbits) {
        let seller = code >> m;
        if seller == 0 {
            continue;
        }
        let mut out = [0u32; 5];
        for (u, o) in out.iter_mut().enumerate().take(n) {
            for v in (0..n).filter(|&v| v != u) {
                if code & (1 << pair_bit(n, u, v)) != 0 {
                    *o |= 1 << v;
                }
            }
        }
        let mut reach = seller;
        loop {
            let next = (0..n).filter(|&u| reach & (1 << u) != 0).fold(reach, |acc, u| acc | out[u]);
            if next == reach {
                break;
            }
            reach = next;
        }
        if reach != full {
            continue;
        }
        let smaller = tables.iter().any(|t| {
            let pc = t.iter().enumerate().fold(0u32, |acc, (c, tab)| acc | tab[((code >> (8 * c)) & 0xff) as usize]);
            pc < code
        });
        if smaller {
            continue;
        }
        let edges = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)));
        let edges = edges.filter(|&(u, v)| code & (1 << pair_bit(n, u, v)) != 0);
        let sellers = (0..n).filter(|&v| seller & (1 << v) != 0);
        f(SocialNetwork::new(n, edges, sellers).expect("valid"));
    }
}

/// [`for_each_connected_network`], collected.
pub fn all_connected_networks(n: usize) -> Vec<SocialNetwork> {
    let mut out = Vec::new();
    for_each_connected_network(n, |g| out.push(g));
    out
}
