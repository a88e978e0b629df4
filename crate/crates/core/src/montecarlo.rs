//! Seeded sampling of realized outcomes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::graph::{ReportProfile, SocialNetwork, TrueProfile};
use crate::lottery::PaymentRule;
use crate::mechanism::Mechanism;

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.576;

/// Sample mean with a 99% normal-approximation interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_dev: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn estimate(&self) -> Estimate {
        let sd = if self.n > 1 { (self.m2 / (self.n - 1) as f64).sqrt() } else { 0.0 };
        let half = if self.n > 0 { Z99 * sd / (self.n as f64).sqrt() } else { 0.0 };
        Estimate {
            mean: self.mean,
            std_dev: sd,
            lower: self.mean - half,
            upper: self.mean + half,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSummary {
    pub samples: u64,
    pub seed: u64,
    pub welfare: Estimate,
    pub revenue: Estimate,
    pub utilities: Vec<Estimate>,
    pub win_frequencies: Vec<Estimate>,
}

/// Runs `samples` independent realizations from one generator seeded with `seed`.
pub fn run(
    mech: &Mechanism,
    net: &SocialNetwork,
    profile: &ReportProfile,
    truth: &TrueProfile,
    rule: PaymentRule,
    samples: u64,
    seed: u64,
) -> Result<McSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = net.len();
    let mut welfare = Welford::default();
    let mut revenue = Welford::default();
    let mut util = vec![Welford::default(); n];
    let mut wins = vec![Welford::default(); n];
    for _ in 0..samples {
        let out = mech.sample(net, profile, truth, rule, &mut rng)?;
        welfare.push(out.welfare.to_f64());
        revenue.push(out.revenue.to_f64());
        for v in 0..n {
            util[v].push(out.utility(v, truth).to_f64());
            wins[v].push(if out.winners.contains(&v) { 1.0 } else { 0.0 });
        }
    }
    Ok(McSummary {
        samples,
        seed,
        welfare: welfare.estimate(),
        revenue: revenue.estimate(),
        utilities: util.iter().map(Welford::estimate).collect(),
        win_frequencies: wins.iter().map(Welford::estimate).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mechanism::MechanismUnderTest;

    #[test]
    fn same_seed_same_summary() {
        let inst = fixtures::triangle();
        let prof = inst.values.truthful_profile(&inst.network).unwrap();
        let m = Mechanism::from_name("fpdm-gbf", 1).unwrap();
        let a = run(&m, &inst.network, &prof, &inst.values, PaymentRule::Standard, 2000, 11).unwrap();
        let b = run(&m, &inst.network, &prof, &inst.values, PaymentRule::Standard, 2000, 11).unwrap();
        assert_eq!(a, b);
        let exact = m.evaluate(&inst.network, &prof, &inst.values).unwrap();
        let w = exact.welfare.to_f64();
        assert!(a.welfare.lower <= w && w <= a.welfare.upper);
    }

    #[test]
    fn exact_only_mechanisms_refuse() {
        let inst = fixtures::triangle();
        let prof = inst.values.truthful_profile(&inst.network).unwrap();
        let m = Mechanism::IdmStub;
        assert!(run(&m, &inst.network, &prof, &inst.values, PaymentRule::Standard, 10, 1).is_err());
    }
}
