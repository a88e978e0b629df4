//! Bid-independent randomization over path assignments, and its evaluation.
//!
//! Every mechanism here first draws a set of disjoint paths without looking at
//! bids, runs PDM on each path, and charges each path's head half the square of
//! the best bid in a base set. A [`PathLottery`] records that first stage
//! exactly; evaluating it against a report profile gives the expected outcome.

use std::collections::BTreeMap;

use rand::Rng;

use crate::graph::{NodeId, ReportProfile, TrueProfile};
use crate::pdm::{allocation_and_prices, uniform_draw, winner_for_draw, Allocation};
use crate::rational::Rational;

/// One path: buyers in PDM order, plus the nodes whose best bid sets the head surcharge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LotteryPath {
    pub order: Vec<NodeId>,
    pub surcharge_base: Vec<NodeId>,
}

impl LotteryPath {
    pub fn head(&self) -> NodeId {
        self.order[0]
    }

    pub fn surcharge(&self, profile: &ReportProfile) -> Rational {
        let best = self
            .surcharge_base
            .iter()
            .map(|&v| profile.bid(v))
            .max()
            .unwrap_or_default();
        best.square() * Rational::half()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub probability: Rational,
    pub paths: Vec<LotteryPath>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathLottery {
    n: usize,
    branches: Vec<Branch>,
}

impl PathLottery {
    /// Merges branches with the same set of paths; `n` is the node count of the network.
    pub fn new(n: usize, branches: impl IntoIterator<Item = Branch>) -> Self {
        let mut merged: BTreeMap<Vec<LotteryPath>, Rational> = BTreeMap::new();
        for mut b in branches {
            b.paths.sort();
            *merged.entry(b.paths).or_insert_with(Rational::zero) += b.probability;
        }
        let branches = merged
            .into_iter()
            .filter(|(_, p)| p.is_positive())
            .map(|(paths, probability)| Branch { probability, paths })
            .collect();
        PathLottery { n, branches }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn total_probability(&self) -> Rational {
        self.branches.iter().map(|b| &b.probability).sum()
    }

    pub fn evaluate(&self, profile: &ReportProfile, truth: &TrueProfile) -> ExpectedOutcome {
        self.evaluate_with(profile, truth, PaymentRule::Standard)
    }

    pub fn evaluate_with(&self, profile: &ReportProfile, truth: &TrueProfile, rule: PaymentRule) -> ExpectedOutcome {
        let n = self.n;
        let mut out = ExpectedOutcome::zeros(n);
        for branch in &self.branches {
            let p = &branch.probability;
            let mut b = BranchOutcome {
                probability: p.clone(),
                paths: branch.paths.iter().map(|l| l.order.clone()).collect(),
                surcharges: Vec::with_capacity(branch.paths.len()),
                win_probabilities: Vec::with_capacity(branch.paths.len()),
                welfare: Rational::zero(),
                revenue: Rational::zero(),
            };
            for path in &branch.paths {
                let bids: Vec<Rational> = path.order.iter().map(|&v| profile.bid(v)).collect();
                let ap = allocation_and_prices(&bids);
                let head = path.head();
                let mut rewards = Rational::zero();
                for (k, &v) in path.order.iter().enumerate() {
                    let (pi, price) = &ap[k];
                    let welfare = pi * truth.value(v);
                    out.win_probabilities[v] += p * pi;
                    b.welfare += &welfare;
                    if k > 0 {
                        let paid = pi * price;
                        out.expected_payments[v] += p * &paid;
                        rewards += paid;
                    }
                }
                out.expected_payments[head] -= p * &rewards;
                out.gross_in += p * &rewards;
                out.gross_out += p * &rewards;
                let mut surcharge = path.surcharge(profile);
                if rule == PaymentRule::ExPost && surcharge.is_positive() {
                    // head's expected gain: her bid when she wins plus rewards
                    let gain = &ap[0].0 * &bids[0] + &rewards;
                    if !gain.is_positive() {
                        surcharge = Rational::zero();
                    }
                }
                out.expected_payments[head] += p * &surcharge;
                out.gross_in += p * &surcharge;
                b.revenue += &surcharge;
                b.surcharges.push(surcharge);
                b.win_probabilities.push(Allocation(ap.into_iter().map(|(pi, _)| pi).collect()));
            }
            out.welfare += p * &b.welfare;
            out.revenue += p * &b.revenue;
            out.breakdown.push(b);
        }
        for v in 0..n {
            out.utilities[v] = &out.win_probabilities[v] * truth.value(v) - &out.expected_payments[v];
        }
        out
    }

    /// Draws a branch with one uniform draw against cumulative branch probabilities.
    pub fn sample_branch<R: Rng + ?Sized>(&self, rng: &mut R) -> &Branch {
        let draw = uniform_draw(rng);
        let mut acc = Rational::zero();
        for b in &self.branches {
            acc += &b.probability;
            if draw < acc {
                return b;
            }
        }
        self.branches.last().expect("a lottery has at least one branch")
    }
}

/// How the head surcharge is collected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PaymentRule {
    /// Charged unconditionally.
    #[default]
    Standard,
    /// Spread over winning events in proportion to the head's gain, so she never
    /// pays out of pocket. Experimental.
    ExPost,
}

/// What happened on one branch of the lottery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchOutcome {
    pub probability: Rational,
    pub paths: Vec<Vec<NodeId>>,
    pub surcharges: Vec<Rational>,
    /// PDM allocation along each path.
    pub win_probabilities: Vec<Allocation>,
    pub welfare: Rational,
    pub revenue: Rational,
}

/// Exact expectations, indexed by node id. Non-participants have all zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedOutcome {
    pub win_probabilities: Vec<Rational>,
    /// Expected net payment per buyer; negative means a net reward.
    pub expected_payments: Vec<Rational>,
    pub utilities: Vec<Rational>,
    pub welfare: Rational,
    /// Net seller revenue.
    pub revenue: Rational,
    /// Everything the seller collects: winners' payments and surcharges.
    pub gross_in: Rational,
    /// Rewards the seller passes on to heads.
    pub gross_out: Rational,
    pub breakdown: Vec<BranchOutcome>,
}

/// The multi-unit mechanisms report the same quantities.
pub type MultiOutcome = ExpectedOutcome;

impl ExpectedOutcome {
    pub fn zeros(n: usize) -> Self {
        ExpectedOutcome {
            win_probabilities: vec![Rational::zero(); n],
            expected_payments: vec![Rational::zero(); n],
            utilities: vec![Rational::zero(); n],
            welfare: Rational::zero(),
            revenue: Rational::zero(),
            gross_in: Rational::zero(),
            gross_out: Rational::zero(),
            breakdown: Vec::new(),
        }
    }

    /// Expected number of items allocated.
    pub fn total_allocation(&self) -> Rational {
        self.win_probabilities.iter().sum()
    }

    /// Sum of utilities over a set of buyers.
    pub fn group_utility(&self, group: &[NodeId]) -> Rational {
        group.iter().map(|&v| &self.utilities[v]).sum()
    }
}

/// Paths with their surcharges fixed for a given report profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathAssignment {
    pub paths: Vec<Vec<NodeId>>,
    pub surcharges: Vec<Rational>,
}

impl PathAssignment {
    pub fn from_paths(paths: &[LotteryPath], profile: &ReportProfile) -> Self {
        PathAssignment {
            paths: paths.iter().map(|p| p.order.clone()).collect(),
            surcharges: paths.iter().map(|p| p.surcharge(profile)).collect(),
        }
    }

    pub fn heads(&self) -> Vec<NodeId> {
        self.paths.iter().map(|p| p[0]).collect()
    }
}

/// One realization of every path's PDM lottery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizedOutcome {
    pub paths: Vec<Vec<NodeId>>,
    pub winners: Vec<NodeId>,
    /// Net transfer per node id; negative for rewards.
    pub payments: Vec<Rational>,
    pub welfare: Rational,
    pub revenue: Rational,
}

impl RealizedOutcome {
    pub fn utility(&self, v: NodeId, truth: &TrueProfile) -> Rational {
        let value = if self.winners.contains(&v) {
            truth.value(v).clone()
        } else {
            Rational::zero()
        };
        value - &self.payments[v]
    }
}

/// Runs PDM independently on each path, one uniform draw per path in path order.
pub fn realize<R: Rng + ?Sized>(
    assignment: &PathAssignment,
    profile: &ReportProfile,
    truth: &TrueProfile,
    rule: PaymentRule,
    rng: &mut R,
) -> RealizedOutcome {
    let n = profile.len();
    let mut payments = vec![Rational::zero(); n];
    let mut winners = Vec::with_capacity(assignment.paths.len());
    let mut welfare = Rational::zero();
    for (path, surcharge) in assignment.paths.iter().zip(&assignment.surcharges) {
        let bids: Vec<Rational> = path.iter().map(|&v| profile.bid(v)).collect();
        let ap = allocation_and_prices(&bids);
        let alloc = Allocation(ap.iter().map(|(p, _)| p.clone()).collect());
        let k = winner_for_draw(&alloc, &uniform_draw(rng));
        let head = path[0];
        let w = path[k];
        winners.push(w);
        welfare += truth.value(w);
        if k > 0 {
            payments[w] += &ap[k].1;
            payments[head] -= &ap[k].1;
        }
        let extra = match rule {
            PaymentRule::Standard => surcharge.clone(),
            PaymentRule::ExPost => {
                let rewards: Rational = ap.iter().skip(1).map(|(p, price)| p * price).sum();
                let expected_gain = &ap[0].0 * &bids[0] + &rewards;
                if !expected_gain.is_positive() || surcharge.is_zero() {
                    Rational::zero()
                } else {
                    let gain = if k == 0 { bids[0].clone() } else { ap[k].1.clone() };
                    surcharge * &gain / &expected_gain
                }
            }
        };
        payments[head] += extra;
    }
    let revenue = payments.iter().sum();
    RealizedOutcome {
        paths: assignment.paths.clone(),
        winners,
        payments,
        welfare,
        revenue,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::q;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lp(order: &[NodeId], base: &[NodeId]) -> LotteryPath {
        LotteryPath {
            order: order.to_vec(),
            surcharge_base: base.to_vec(),
        }
    }

    #[test]
    fn triangle_breadth_first_by_hand() {
        let inst = fixtures::triangle();
        let prof = inst.values.truthful_profile(&inst.network).unwrap();
        let lot = PathLottery::new(
            3,
            [
                Branch {
                    probability: Rational::half(),
                    paths: vec![lp(&[0, 1, 2], &[1])],
                },
                Branch {
                    probability: Rational::half(),
                    paths: vec![lp(&[1, 0, 2], &[0, 2])],
                },
            ],
        );
        let out = lot.evaluate(&prof, &inst.values);
        assert_eq!(out.breakdown[0].welfare, q("0.66"));
        assert_eq!(out.breakdown[0].revenue, q("0"));
        assert_eq!(out.breakdown[1].welfare, q("0.63"));
        assert_eq!(out.breakdown[1].revenue, q("0.405"));
        assert_eq!(out.welfare, q("0.645"));
        assert_eq!(out.revenue, q("0.2025"));
        assert_eq!(out.total_allocation(), Rational::one());
        assert_eq!(out.gross_in - &out.gross_out, out.revenue);
        let paid: Rational = out.expected_payments.iter().sum();
        assert_eq!(paid, out.revenue);
    }

    #[test]
    fn duplicate_branches_merge() {
        let lot = PathLottery::new(
            2,
            [
                Branch {
                    probability: Rational::half(),
                    paths: vec![lp(&[0], &[]), lp(&[1], &[])],
                },
                Branch {
                    probability: Rational::half(),
                    paths: vec![lp(&[0], &[]), lp(&[1], &[])],
                },
            ],
        );
        assert_eq!(lot.branches().len(), 1);
        assert_eq!(lot.total_probability(), Rational::one());
    }

    #[test]
    fn realized_transfers_reconcile() {
        let inst = fixtures::triangle();
        let prof = inst.values.truthful_profile(&inst.network).unwrap();
        let asg = PathAssignment::from_paths(&[lp(&[1, 0, 2], &[0, 2])], &prof);
        assert_eq!(asg.surcharges, vec![q("0.405")]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for rule in [PaymentRule::Standard, PaymentRule::ExPost] {
            for _ in 0..200 {
                let r = realize(&asg, &prof, &inst.values, rule, &mut rng);
                let s: Rational = r.payments.iter().sum();
                assert_eq!(s, r.revenue);
                assert_eq!(r.winners.len(), 1);
            }
        }
    }

    #[test]
    fn expost_rule_keeps_expectation_when_head_can_gain() {
        let inst = fixtures::triangle();
        let prof = inst.values.truthful_profile(&inst.network).unwrap();
        let lot = PathLottery::new(
            3,
            [Branch {
                probability: Rational::one(),
                paths: vec![lp(&[1, 0, 2], &[0, 2])],
            }],
        );
        let a = lot.evaluate_with(&prof, &inst.values, PaymentRule::Standard);
        let b = lot.evaluate_with(&prof, &inst.values, PaymentRule::ExPost);
        assert_eq!(a, b);
    }
}
