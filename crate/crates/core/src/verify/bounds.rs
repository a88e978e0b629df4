//! Approximate efficiency and revenue bounds.

use crate::graph::{participant_mask, ReportProfile, SocialNetwork, TrueProfile};
use crate::lottery::ExpectedOutcome;
use crate::rational::Rational;

/// Rational upper bound on e. `e/(e-1)` falls as e grows, so plugging in an
/// upper bound can only shrink the multi-unit coefficient.
pub fn e_upper() -> Rational {
    Rational::new(2_718_282, 1_000_000)
}

/// δ ∈ {0.1, ..., 0.9}.
pub fn default_deltas() -> Vec<Rational> {
    (1..=9).map(|k| Rational::new(k, 10)).collect()
}

/// Expected welfare as the check sees it.
#[derive(Debug, Clone, PartialEq)]
pub enum WelfareEstimate {
    Exact(Rational),
    /// Monte Carlo mean with its lower confidence bound.
    Sampled { mean: f64, lower: f64 },
}

impl WelfareEstimate {
    /// The value the bound is checked against: the lower end for samples.
    fn conservative(&self) -> f64 {
        match self {
            WelfareEstimate::Exact(w) => w.to_f64(),
            WelfareEstimate::Sampled { lower, .. } => *lower,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub delta: Rational,
    pub epsilon: Rational,
    /// `ε·E + (m)δ`, exact when the estimate is exact.
    pub lhs: f64,
    pub exact_lhs: Option<Rational>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyCheck {
    pub items: usize,
    /// `v_max`, or the sum of the top `items` valuations.
    pub target: Rational,
    /// Single item, exact welfare: `E[W] ≥ v_max²/2`.
    pub floor: Option<bool>,
    pub rows: Vec<BoundRow>,
}

impl EfficiencyCheck {
    pub fn passed(&self) -> bool {
        self.floor != Some(false) && self.rows.iter().all(|r| r.pass)
    }
}

fn participating_values(net: &SocialNetwork, truth: &TrueProfile) -> Vec<Rational> {
    let prof: ReportProfile = match truth.truthful_profile(net) {
        Ok(p) => p,
        Err(_) => return Vec::new(),
    };
    let mask = participant_mask(net, &prof);
    let mut vals: Vec<Rational> = net.nodes().filter(|&v| mask[v]).map(|v| truth.value(v).clone()).collect();
    vals.sort_by(|a, b| b.cmp(a));
    vals
}

fn row(delta: &Rational, epsilon: Rational, offset: Rational, welfare: &WelfareEstimate, target: &Rational) -> BoundRow {
    match welfare {
        WelfareEstimate::Exact(w) => {
            let lhs = &epsilon * w + &offset;
            BoundRow {
                delta: delta.clone(),
                pass: lhs >= *target,
                lhs: lhs.to_f64(),
                exact_lhs: Some(lhs),
                epsilon,
            }
        }
        WelfareEstimate::Sampled { .. } => {
            let lhs = epsilon.to_f64() * welfare.conservative() + offset.to_f64();
            BoundRow {
                delta: delta.clone(),
                pass: lhs >= target.to_f64(),
                lhs,
                exact_lhs: None,
                epsilon,
            }
        }
    }
}

/// Single item: `(1/(2δ))·E[W] + δ ≥ v_max`. With `m` items:
/// `(e/(2(e-1)δ))·E[W] + mδ ≥` the top-`m` valuation sum.
pub fn efficiency_check(
    net: &SocialNetwork,
    truth: &TrueProfile,
    welfare: &WelfareEstimate,
    deltas: &[Rational],
    items: usize,
) -> EfficiencyCheck {
    let vals = participating_values(net, truth);
    let target: Rational = vals.iter().take(items.max(1)).sum();
    let mut rows = Vec::with_capacity(deltas.len());
    let floor = match (items <= 1, welfare) {
        (true, WelfareEstimate::Exact(w)) => Some(*w >= target.square() / Rational::from(2usize)),
        _ => None,
    };
    for d in deltas.iter().filter(|d| d.is_positive()) {
        if items <= 1 {
            let eps = Rational::one() / (Rational::from(2usize) * d);
            rows.push(row(d, eps, d.clone(), welfare, &target));
        } else {
            let e = e_upper();
            let eps = &e / (Rational::from(2usize) * (&e - Rational::one()) * d);
            rows.push(row(d, eps, Rational::from(items) * d, welfare, &target));
        }
    }
    EfficiencyCheck {
        items,
        target,
        floor,
        rows,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevenueCheck {
    /// Seller degree.
    pub k: usize,
    /// `v*_N`, the most any IC mechanism can extract.
    pub ceiling: Rational,
    pub revenue: Rational,
    /// Why the rows are empty, when they are.
    pub skipped: Option<String>,
    /// Probability that the head is not diffusion-critical for the top bidder.
    pub event_probability: Option<Rational>,
    pub rows: Vec<BoundRow>,
}

impl RevenueCheck {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// `(k/(2(k-1)δ))·E[u_s] + δ ≥ v*_N`, skipped when `k < 2`.
pub fn revenue_check(
    net: &SocialNetwork,
    truth: &TrueProfile,
    outcome: &ExpectedOutcome,
    deltas: &[Rational],
    event_probability: Option<Rational>,
) -> RevenueCheck {
    let k = net.seller_neighbors().len();
    let ceiling = participating_values(net, truth).into_iter().next().unwrap_or_default();
    let mut out = RevenueCheck {
        k,
        ceiling,
        revenue: outcome.revenue.clone(),
        skipped: None,
        event_probability,
        rows: Vec::new(),
    };
    if k < 2 {
        out.skipped = Some(format!("seller degree {k} < 2; bound not applicable"));
        return out;
    }
    let kr = Rational::from(k);
    let welfare = WelfareEstimate::Exact(outcome.revenue.clone());
    for d in deltas.iter().filter(|d| d.is_positive()) {
        let eps = &kr / (Rational::from(2usize) * (&kr - Rational::one()) * d);
        out.rows.push(row(d, eps, d.clone(), &welfare, &out.ceiling));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::q;

    #[test]
    fn path_example_and_inefficiency_single_item() {
        let inst = fixtures::path_example();
        let c = efficiency_check(&inst.network, &inst.values, &WelfareEstimate::Exact(q("0.72")), &default_deltas(), 1);
        assert_eq!(c.floor, Some(true));
        assert!(c.passed());
        let inst = fixtures::inefficiency();
        assert!(efficiency_check(&inst.network, &inst.values, &WelfareEstimate::Exact(q("1")), &default_deltas(), 1).passed());
        let zero = efficiency_check(&inst.network, &inst.values, &WelfareEstimate::Exact(q("0")), &default_deltas(), 1);
        assert_eq!(zero.floor, Some(false));
        assert!(zero.rows.iter().all(|r| !r.pass));
    }

    #[test]
    fn two_items_multi_unit() {
        let inst = fixtures::two_items();
        let c = efficiency_check(&inst.network, &inst.values, &WelfareEstimate::Exact(q("0.885")), &[q("0.3")], 2);
        assert_eq!(c.target, q("1.2"));
        assert!(c.passed());
    }

    #[test]
    fn triangle_revenue_at_boundary() {
        let inst = fixtures::triangle();
        let mut out = ExpectedOutcome::zeros(3);
        out.revenue = q("0.2025");
        let r = revenue_check(&inst.network, &inst.values, &out, &[q("0.45")], None);
        // 2/(2·1·0.45)·0.2025 + 0.45 = 0.9
        assert_eq!(r.rows[0].exact_lhs, Some(q("0.9")));
        assert!(r.passed());
        let inst = fixtures::path_example();
        let r = revenue_check(&inst.network, &inst.values, &ExpectedOutcome::zeros(4), &default_deltas(), None);
        assert!(r.skipped.is_some() && r.rows.is_empty());
    }
}
