//! Integer evaluation of a path lottery for oracle sweeps.
//!
//! With every bid and value a multiple of `1/D` and every branch probability a
//! multiple of `1/L`, a buyer's utility on a path is a multiple of
//! `1/(2 D^2)`: allocations are multiples of `1/D` and prices of `1/(2D)`. So
//! a group's expected utility is an integer over `2 D^2 L`, and a bid sweep
//! needs no rational arithmetic at all.

use num_integer::Integer;

use crate::graph::NodeId;
use crate::lottery::PathLottery;
use crate::rational::Rational;

/// Keeps every intermediate product well inside `i128`.
const MAX_SCALE: i128 = 1_000_000_000_000;
const MAX_DENOM: i128 = 1_000_000;

struct FastPath {
    order: Vec<NodeId>,
    base: Vec<NodeId>,
}

pub struct FastLottery {
    l: i128,
    weights: Vec<i128>,
    branches: Vec<Vec<FastPath>>,
}

impl FastLottery {
    /// `None` when the probability denominators are too large to scale.
    pub fn compile(lottery: &PathLottery) -> Option<Self> {
        let mut l: i128 = 1;
        for b in lottery.branches() {
            let (_, den) = b.probability.to_i128_parts()?;
            l = l.lcm(&den);
            if l > MAX_SCALE {
                return None;
            }
        }
        let mut weights = Vec::with_capacity(lottery.branches().len());
        let mut branches = Vec::with_capacity(lottery.branches().len());
        for b in lottery.branches() {
            let (num, den) = b.probability.to_i128_parts()?;
            weights.push(num * (l / den));
            branches.push(
                b.paths
                    .iter()
                    .map(|p| FastPath {
                        order: p.order.clone(),
                        base: p.surcharge_base.clone(),
                    })
                    .collect(),
            );
        }
        Some(FastLottery { l, weights, branches })
    }

    /// Expected total utility of `group` (a membership mask), with integer
    /// bids and values already multiplied by `d`.
    pub fn group_utility(&self, bids: &[i64], values: &[i64], d: i64, group: &[bool]) -> Rational {
        let d = d as i128;
        let mut total: i128 = 0;
        for (paths, &w) in self.branches.iter().zip(&self.weights) {
            let mut branch: i128 = 0;
            for p in paths {
                branch += path_utility(p, bids, values, d, group);
            }
            total += w * branch;
        }
        Rational::new(total, 2 * d * d * self.l)
    }
}

/// Group utility on one path, scaled by `2 d^2`.
#[inline]
fn path_utility(p: &FastPath, bids: &[i64], values: &[i64], d: i128, group: &[bool]) -> i128 {
    let head = p.order[0];
    let head_in = group[head];
    if !head_in && !p.order.iter().any(|&v| group[v]) {
        return 0;
    }
    let b = |v: NodeId| bids[v] as i128;
    let top = p.order.iter().map(|&v| b(v)).max().unwrap_or(0);
    let mut run = b(head);
    let mut u: i128 = 0;
    if head_in {
        let pi = d - top + run;
        u += 2 * pi * values[head] as i128;
        let sb = p.base.iter().map(|&v| b(v)).max().unwrap_or(0);
        u -= sb * sb;
    }
    for &v in &p.order[1..] {
        let bv = b(v);
        if bv > run {
            let pi = bv - run;
            let t = pi * (run + bv);
            if group[v] {
                u += 2 * pi * values[v] as i128 - t;
            }
            if head_in {
                u += t;
            }
            run = bv;
        }
    }
    u
}

/// Common denominator for a set of rationals, if small enough.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Option<i64> {
    let mut d: i128 = 1;
    for x in xs {
        let (_, den) = x.to_i128_parts()?;
        d = d.lcm(&den);
        if d > MAX_DENOM {
            return None;
        }
    }
    Some(d as i64)
}

/// `x * d` as an integer; `d` must be a multiple of `x`'s denominator.
pub fn scaled(x: &Rational, d: i64) -> i64 {
    let (num, den) = x.to_i128_parts().expect("small rational");
    (num * (d as i128 / den)) as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mechanism::{Mechanism, MechanismUnderTest};
    use crate::rational::q;

    #[test]
    fn agrees_with_rational_engine() {
        let grid: Vec<Rational> = (0..=4).map(|k| Rational::new(k, 4)).collect();
        for (inst, m) in [(fixtures::triangle(), 1), (fixtures::two_items(), 2), (fixtures::two_items_sybil(), 2), (fixtures::cartel_example(), 1)] {
            let prof = inst.values.truthful_profile(&inst.network).unwrap();
            for name in ["fpdm-bf", "fpdm-gbf", "fpdm-bf-cp", "mupdm", "spmupdm"] {
                let mech = Mechanism::from_name(name, m).unwrap();
                let lot = mech.lottery(&inst.network, &prof).unwrap().unwrap();
                let fast = FastLottery::compile(&lot).unwrap();
                let n = inst.network.len();
                let mut all: Vec<&Rational> = grid.iter().collect();
                all.extend(inst.values.values());
                let d = common_denominator(all).unwrap();
                let values: Vec<i64> = inst.values.values().iter().map(|v| scaled(v, d)).collect();
                for (k, b) in grid.iter().enumerate() {
                    let mut bids = inst.values.values().to_vec();
                    bids[k % n] = b.clone();
                    let dev = prof.with_bids(&bids);
                    let exact = lot.evaluate(&dev, &inst.values);
                    let ib: Vec<i64> = bids.iter().map(|x| scaled(x, d)).collect();
                    for v in 0..n {
                        let mut g = vec![false; n];
                        g[v] = true;
                        assert_eq!(fast.group_utility(&ib, &values, d, &g), exact.utilities[v], "{name} node {v}");
                    }
                    let g = vec![true; n];
                    let sum: Rational = exact.utilities.iter().sum();
                    assert_eq!(fast.group_utility(&ib, &values, d, &g), sum);
                }
            }
        }
        assert_eq!(scaled(&q("0.25"), 8), 2);
    }
}
