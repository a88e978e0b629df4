//! The probabilistic diffusion mechanism on a path graph.
//!
//! Buyers are indexed by path position: index 0 is the buyer the seller knows
//! directly. A later buyer can only win by strictly raising the running maximum
//! bid, and wins with probability equal to the raise; the first buyer keeps the
//! remaining mass. A winner `j > 0` pays the midpoint of her bid and the best
//! earlier bid, and that amount is handed to the first buyer.

use rand::Rng;
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PdmError {
    #[error("a path needs at least one buyer")]
    Empty,
    #[error("entry {index} = {value} is outside [0, 1]")]
    OutOfRange { index: usize, value: Rational },
    #[error("{values} valuations given for {bids} bids")]
    LengthMismatch { bids: usize, values: usize },
    #[error("expected statistics need the buyers' true valuations")]
    MissingValues,
}

/// Ordered bids along a path, optionally with the true valuations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathInstance {
    bids: Vec<Rational>,
    values: Option<Vec<Rational>>,
}

fn check_unit(xs: &[Rational]) -> Result<(), PdmError> {
    match xs.iter().enumerate().find(|(_, x)| !x.in_unit_interval()) {
        Some((index, value)) => Err(PdmError::OutOfRange {
            index,
            value: value.clone(),
        }),
        None => Ok(()),
    }
}

impl PathInstance {
    pub fn new(bids: Vec<Rational>) -> Result<Self, PdmError> {
        if bids.is_empty() {
            return Err(PdmError::Empty);
        }
        check_unit(&bids)?;
        Ok(PathInstance { bids, values: None })
    }

    pub fn with_values(bids: Vec<Rational>, values: Vec<Rational>) -> Result<Self, PdmError> {
        if bids.len() != values.len() {
            return Err(PdmError::LengthMismatch {
                bids: bids.len(),
                values: values.len(),
            });
        }
        check_unit(&values)?;
        let mut inst = Self::new(bids)?;
        inst.values = Some(values);
        Ok(inst)
    }

    /// Everybody bids her valuation.
    pub fn truthful(values: Vec<Rational>) -> Result<Self, PdmError> {
        Self::with_values(values.clone(), values)
    }

    pub fn len(&self) -> usize {
        self.bids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bids.is_empty()
    }

    pub fn bids(&self) -> &[Rational] {
        &self.bids
    }

    pub fn values(&self) -> Option<&[Rational]> {
        self.values.as_deref()
    }
}

/// Win probabilities in path order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation(pub Vec<Rational>);

impl Allocation {
    pub fn probabilities(&self) -> &[Rational] {
        &self.0
    }

    pub fn total(&self) -> Rational {
        self.0.iter().sum()
    }
}

/// `entry(i, j)`: what buyer `i` pays when buyer `j` wins. Negative entries are rewards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaymentMatrix {
    n: usize,
    entries: Vec<Rational>,
}

impl PaymentMatrix {
    pub fn zeros(n: usize) -> Self {
        PaymentMatrix {
            n,
            entries: vec![Rational::zero(); n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, payer: usize, winner: usize) -> &Rational {
        &self.entries[payer * self.n + winner]
    }

    pub fn set(&mut self, payer: usize, winner: usize, value: Rational) {
        self.entries[payer * self.n + winner] = value;
    }

    /// Payments made by every buyer when `winner` wins.
    pub fn column(&self, winner: usize) -> Vec<Rational> {
        (0..self.n).map(|i| self.entry(i, winner).clone()).collect()
    }
}

/// Exact expectations under the PDM lottery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedStats {
    pub win_probabilities: Vec<Rational>,
    /// Expected net payment per buyer (negative when she is rewarded on balance).
    pub expected_payments: Vec<Rational>,
    pub utilities: Vec<Rational>,
    pub welfare: Rational,
    pub revenue: Rational,
}

/// Per-position win probability and the price the winner pays (zero for the head).
pub(crate) fn allocation_and_prices(bids: &[Rational]) -> Vec<(Rational, Rational)> {
    let Some(first) = bids.first() else {
        return Vec::new();
    };
    let top = Rational::max_of(bids);
    let mut out = Vec::with_capacity(bids.len());
    out.push((Rational::one() - &top + first, Rational::zero()));
    let mut running = first.clone();
    for b in &bids[1..] {
        if *b > running {
            let pi = b - &running;
            let price = (&running + b) * Rational::half();
            out.push((pi, price));
            running = b.clone();
        } else {
            out.push((Rational::zero(), Rational::zero()));
        }
    }
    out
}

pub fn pdm_allocation(inst: &PathInstance) -> Allocation {
    Allocation(allocation_and_prices(&inst.bids).into_iter().map(|(p, _)| p).collect())
}

pub fn pdm_payment_matrix(inst: &PathInstance) -> PaymentMatrix {
    let n = inst.len();
    let mut m = PaymentMatrix::zeros(n);
    for (j, (pi, price)) in allocation_and_prices(&inst.bids).into_iter().enumerate().skip(1) {
        if pi.is_positive() {
            m.set(0, j, -&price);
            m.set(j, j, price);
        }
    }
    m
}

pub fn pdm_expected_stats(inst: &PathInstance) -> Result<ExpectedStats, PdmError> {
    let values = inst.values.as_ref().ok_or(PdmError::MissingValues)?;
    let alloc = pdm_allocation(inst);
    let payments = pdm_payment_matrix(inst);
    Ok(stats_from(&alloc, &payments, values))
}

/// Combines any allocation and payment matrix into expected statistics.
pub fn stats_from(alloc: &Allocation, payments: &PaymentMatrix, values: &[Rational]) -> ExpectedStats {
    let n = alloc.0.len();
    let expected_payments: Vec<Rational> = (0..n)
        .map(|i| (0..n).map(|j| payments.entry(i, j) * &alloc.0[j]).sum())
        .collect();
    let utilities = (0..n)
        .map(|i| &alloc.0[i] * &values[i] - &expected_payments[i])
        .collect();
    let welfare = (0..n).map(|i| &alloc.0[i] * &values[i]).sum();
    let revenue = expected_payments.iter().sum();
    ExpectedStats {
        win_probabilities: alloc.0.clone(),
        expected_payments,
        utilities,
        welfare,
        revenue,
    }
}

/// A uniform draw from `[0, 1)` as an exact dyadic rational.
pub fn uniform_draw<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    let bits: u64 = rng.gen();
    Rational::new(bits as i128, 1i128 << 64)
}

/// First index whose cumulative probability exceeds `draw`.
pub fn winner_for_draw(alloc: &Allocation, draw: &Rational) -> usize {
    let mut cumulative = Rational::zero();
    let mut last_positive = 0;
    for (i, p) in alloc.0.iter().enumerate() {
        if p.is_positive() {
            last_positive = i;
        }
        cumulative += p;
        if *draw < cumulative {
            return i;
        }
    }
    last_positive
}

/// One realization of the lottery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizedPdm {
    pub winner: usize,
    /// What every buyer pays given the drawn winner.
    pub payments: Vec<Rational>,
}

pub fn pdm_sample<R: Rng + ?Sized>(inst: &PathInstance, rng: &mut R) -> RealizedPdm {
    let draw = uniform_draw(rng);
    realize(inst, &draw)
}

pub fn realize(inst: &PathInstance, draw: &Rational) -> RealizedPdm {
    let winner = winner_for_draw(&pdm_allocation(inst), draw);
    RealizedPdm {
        winner,
        payments: pdm_payment_matrix(inst).column(winner),
    }
}

/// Payment rules that are not part of the standard mechanism.
pub mod experimental {
    use super::*;

    /// Spreads the first buyer's surcharge `(max bid of the base set)^2 / 2`
    /// over winning events in proportion to what she gains in each event, so
    /// her expected extra payment equals the surcharge while every realized
    /// outcome leaves her with a nonnegative gain (when she bids truthfully).
    ///
    /// `surcharge_base` is the highest bid outside the first buyer's critical
    /// region; events with zero probability, or a zero expected gain, carry no
    /// extra payment.
    pub fn expost_payment_variant(inst: &PathInstance, surcharge_base: &Rational) -> PaymentMatrix {
        let mut m = pdm_payment_matrix(inst);
        let surcharge = surcharge_base.square() * Rational::half();
        if surcharge.is_zero() {
            return m;
        }
        let alloc = pdm_allocation(inst);
        let gains: Vec<Rational> = (0..inst.len())
            .map(|j| {
                if j == 0 {
                    inst.bids[0].clone()
                } else {
                    -m.entry(0, j).clone()
                }
            })
            .collect();
        let expected_gain: Rational = gains.iter().zip(&alloc.0).map(|(g, p)| g * p).sum();
        if !expected_gain.is_positive() {
            return m;
        }
        for j in 0..inst.len() {
            if alloc.0[j].is_zero() {
                continue;
            }
            let extra = &surcharge * &gains[j] / &expected_gain;
            let updated = m.entry(0, j) + &extra;
            m.set(0, j, updated);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn qs(xs: &[&str]) -> Vec<Rational> {
        xs.iter().map(|x| q(x)).collect()
    }

    #[test]
    fn path_example_allocation_and_payments() {
        let inst = PathInstance::truthful(qs(&["0.2", "0.1", "0.4", "1"])).unwrap();
        assert_eq!(pdm_allocation(&inst).0, qs(&["0.2", "0", "0.2", "0.6"]));
        let m = pdm_payment_matrix(&inst);
        assert_eq!(m.column(0), qs(&["0", "0", "0", "0"]));
        assert_eq!(m.column(2), qs(&["-0.3", "0", "0.3", "0"]));
        assert_eq!(m.column(3), qs(&["-0.7", "0", "0", "0.7"]));
        let stats = pdm_expected_stats(&inst).unwrap();
        assert_eq!(stats.welfare, q("0.72"));
        assert_eq!(stats.revenue, Rational::zero());
    }

    #[test]
    fn singleton_and_flat_paths() {
        let v = q("0.37");
        let inst = PathInstance::truthful(vec![v.clone()]).unwrap();
        assert_eq!(pdm_allocation(&inst).0, vec![Rational::one()]);
        let stats = pdm_expected_stats(&inst).unwrap();
        assert_eq!(stats.welfare, v);
        assert_eq!(stats.utilities, vec![v]);
        assert!(stats.revenue.is_zero());

        let flat = PathInstance::new(qs(&["0.5", "0.5", "0.5"])).unwrap();
        assert_eq!(pdm_allocation(&flat).0, qs(&["1", "0", "0"]));
    }

    #[test]
    fn two_buyer_path_charges_half() {
        let inst = PathInstance::truthful(qs(&["0", "1"])).unwrap();
        let m = pdm_payment_matrix(&inst);
        assert_eq!(m.column(1), qs(&["-0.5", "0.5"]));
        let stats = pdm_expected_stats(&inst).unwrap();
        assert_eq!(stats.utilities, qs(&["0.5", "0.5"]));
        assert_eq!(stats.welfare, Rational::one());
    }

    #[test]
    fn case_three_order_of_triangle() {
        let inst = PathInstance::truthful(qs(&["0", "0.3", "0.9"])).unwrap();
        assert_eq!(pdm_expected_stats(&inst).unwrap().welfare, q("0.63"));
    }

    #[test]
    fn missing_values_and_bad_input() {
        let inst = PathInstance::new(qs(&["0.1"])).unwrap();
        assert_eq!(pdm_expected_stats(&inst), Err(PdmError::MissingValues));
        assert_eq!(PathInstance::new(vec![]), Err(PdmError::Empty));
        assert!(matches!(PathInstance::new(qs(&["1.1"])), Err(PdmError::OutOfRange { index: 0, .. })));
        assert!(PathInstance::with_values(qs(&["0.1"]), qs(&["0.1", "0.2"])).is_err());
    }

    #[test]
    fn draw_selects_by_cumulative_thresholds() {
        let inst = PathInstance::new(qs(&["0.2", "0.1", "0.4", "1"])).unwrap();
        let alloc = pdm_allocation(&inst);
        assert_eq!(winner_for_draw(&alloc, &q("0.95")), 3);
        assert_eq!(winner_for_draw(&alloc, &q("0.1")), 0);
        assert_eq!(winner_for_draw(&alloc, &q("0.2")), 2);
        assert_eq!(winner_for_draw(&alloc, &q("0.39")), 2);
        assert_eq!(winner_for_draw(&alloc, &q("0.4")), 3);
        let single = PathInstance::new(qs(&["0.6"])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            assert_eq!(pdm_sample(&single, &mut rng).winner, 0);
        }
    }

    #[test]
    fn sampled_frequencies_track_allocation() {
        let inst = PathInstance::new(qs(&["0.2", "0.1", "0.4", "1"])).unwrap();
        let alloc = pdm_allocation(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let trials = 100_000usize;
        let mut counts = [0usize; 4];
        for _ in 0..trials {
            counts[pdm_sample(&inst, &mut rng).winner] += 1;
        }
        for (c, p) in counts.iter().zip(&alloc.0) {
            let p = p.to_f64();
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            let freq = *c as f64 / trials as f64;
            assert!((freq - p).abs() <= 3.0 * sigma + 1e-12, "freq {freq} vs {p}");
        }
    }

    #[test]
    fn expost_variant_with_zero_surcharge_is_standard() {
        let inst = PathInstance::new(qs(&["0.2", "0.1", "0.4", "1"])).unwrap();
        assert_eq!(experimental::expost_payment_variant(&inst, &Rational::zero()), pdm_payment_matrix(&inst));
    }

    /// Every bid vector on the 1/8 grid, lengths 1..=max_len.
    fn grid_paths(max_len: usize) -> Vec<Vec<Rational>> {
        let grid: Vec<Rational> = (0..=8).map(|k| Rational::new(k, 8)).collect();
        let mut all = vec![vec![]];
        let mut out = Vec::new();
        for _ in 0..max_len {
            all = all
                .into_iter()
                .flat_map(|p: Vec<Rational>| {
                    grid.iter().map(move |g| {
                        let mut p = p.clone();
                        p.push(g.clone());
                        p
                    })
                })
                .collect();
            out.extend(all.iter().cloned());
        }
        out
    }

    #[test]
    fn exhaustive_grid_properties() {
        // n <= 4 exhaustively here; the n = 5 grid runs in the integration suite.
        for vals in grid_paths(4) {
            let inst = PathInstance::truthful(vals.clone()).unwrap();
            let stats = pdm_expected_stats(&inst).unwrap();
            assert_eq!(pdm_allocation(&inst).total(), Rational::one());
            assert!(stats.revenue.is_zero());
            assert!(stats.utilities.iter().all(|u| !u.is_negative()));
            let top = Rational::max_of(&vals);
            assert!(stats.welfare >= top.square() * Rational::half());
            // closed forms
            let first = &vals[0];
            assert_eq!(stats.utilities[0], first + (&top - first).square() * Rational::half());
            for i in 1..vals.len() {
                let prior = Rational::max_of(&vals[..i]);
                let expect = if vals[i] > prior {
                    (&vals[i] - &prior).square() * Rational::half()
                } else {
                    Rational::zero()
                };
                assert_eq!(stats.utilities[i], expect);
            }
        }
    }

    #[test]
    fn exhaustive_bid_deviations_never_pay() {
        let grid: Vec<Rational> = (0..=8).map(|k| Rational::new(k, 8)).collect();
        for vals in grid_paths(3) {
            let truthful = pdm_expected_stats(&PathInstance::truthful(vals.clone()).unwrap()).unwrap();
            for i in 0..vals.len() {
                for b in &grid {
                    let mut bids = vals.clone();
                    bids[i] = b.clone();
                    let dev = pdm_expected_stats(&PathInstance::with_values(bids, vals.clone()).unwrap()).unwrap();
                    assert!(dev.utilities[i] <= truthful.utilities[i]);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn expost_head_never_loses_and_pays_surcharge_on_average(
            raw in proptest::collection::vec(0i128..=20, 1..6),
            base_idx in 0usize..6,
        ) {
            let bids: Vec<Rational> = raw.iter().map(|&k| Rational::new(k, 20)).collect();
            let inst = PathInstance::new(bids.clone()).unwrap();
            // base: any bid other than the head's own, as a critical-region maximum would be
            let base = if bids.len() > 1 { bids[1 + base_idx % (bids.len() - 1)].clone() } else { Rational::zero() };
            let m = experimental::expost_payment_variant(&inst, &base);
            let standard = pdm_payment_matrix(&inst);
            let alloc = pdm_allocation(&inst);
            let extra: Rational = (0..inst.len())
                .map(|j| (m.entry(0, j) - standard.entry(0, j)) * &alloc.0[j])
                .sum();
            let surcharge = base.square() * Rational::half();
            let expected_gain: Rational = (0..inst.len())
                .map(|j| if j == 0 { bids[0].clone() } else { -standard.entry(0, j).clone() } * &alloc.0[j])
                .sum();
            if expected_gain.is_positive() {
                prop_assert_eq!(extra, surcharge);
            }
            for j in 0..inst.len() {
                if alloc.0[j].is_positive() {
                    let value = if j == 0 { bids[0].clone() } else { Rational::zero() };
                    prop_assert!(!(value - m.entry(0, j)).is_negative());
                }
            }
        }
    }
}
