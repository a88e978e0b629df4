//! A single handle over every mechanism, used by the oracles and the CLI.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::baselines::{idm_stub_expected, repeated_fpdm_expected};
use crate::error::{Error, Result};
use crate::fpdm::{fpdm_assign, fpdm_lottery, SurchargeVariant};
use crate::graph::{path_order, ReportProfile, SocialNetwork, TrueProfile};
use crate::lottery::{realize, Branch, ExpectedOutcome, LotteryPath, PathAssignment, PathLottery, PaymentRule, RealizedOutcome};
use crate::maps::MapKind;
use crate::mupdm::{mupdm_assign, mupdm_lottery, spmupdm_lottery, spmupdm_map};
use crate::rational::Rational;

/// What the property oracles need from a mechanism.
pub trait MechanismUnderTest: Sync {
    fn label(&self) -> String;

    /// Exact expected outcome for a report profile.
    fn evaluate(&self, net: &SocialNetwork, profile: &ReportProfile, truth: &TrueProfile) -> Result<ExpectedOutcome>;

    /// The bid-independent first stage, when the mechanism has one. Oracles
    /// use it to evaluate many bid vectors against one invitation structure.
    fn lottery(&self, _net: &SocialNetwork, _profile: &ReportProfile) -> Option<Result<PathLottery>> {
        None
    }

    /// Number of items for sale.
    fn items(&self) -> usize {
        1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mechanism {
    /// PDM on a network whose participants form a single path.
    Pdm,
    Fpdm { map: MapKind, variant: SurchargeVariant },
    Mupdm { items: usize },
    SpMupdm { items: usize },
    /// Breadth-first f-PDM run once per item. Not IC.
    RepeatedFpdm { items: usize },
    /// Deterministic critical-path stand-in for IDM. Not SP or CP.
    IdmStub,
}

/// CLI names, in documentation order.
pub const MECHANISM_NAMES: [&str; 9] = [
    "pdm",
    "fpdm-bf",
    "fpdm-gbf",
    "fpdm-wgbf",
    "fpdm-bf-cp",
    "mupdm",
    "spmupdm",
    "repeated-fpdm-strawman",
    "idm-stub",
];

impl Mechanism {
    pub fn fpdm(map: MapKind) -> Self {
        Mechanism::Fpdm {
            map,
            variant: SurchargeVariant::Standard,
        }
    }

    /// Parses a CLI name; `items` only matters for the multi-unit mechanisms.
    pub fn from_name(name: &str, items: usize) -> Option<Self> {
        Some(match name {
            "pdm" => Mechanism::Pdm,
            "fpdm-bf" => Mechanism::fpdm(MapKind::BreadthFirst),
            "fpdm-gbf" => Mechanism::fpdm(MapKind::GeneralizedBreadthFirst),
            "fpdm-wgbf" => Mechanism::fpdm(MapKind::weighted()),
            "fpdm-bf-cp" => Mechanism::Fpdm {
                map: MapKind::BreadthFirst,
                variant: SurchargeVariant::CollusionProof,
            },
            "mupdm" => Mechanism::Mupdm { items },
            "spmupdm" => Mechanism::SpMupdm { items },
            "repeated-fpdm-strawman" => Mechanism::RepeatedFpdm { items },
            "idm-stub" => Mechanism::IdmStub,
            _ => return None,
        })
    }

    pub fn name(&self) -> String {
        match self {
            Mechanism::Pdm => "pdm".into(),
            Mechanism::Fpdm { map, variant } => {
                let m = match map {
                    MapKind::BreadthFirst => "bf",
                    MapKind::GeneralizedBreadthFirst => "gbf",
                    MapKind::WeightedGbf(_) => "wgbf",
                };
                match variant {
                    SurchargeVariant::Standard => format!("fpdm-{m}"),
                    SurchargeVariant::CollusionProof => format!("fpdm-{m}-cp"),
                }
            }
            Mechanism::Mupdm { .. } => "mupdm".into(),
            Mechanism::SpMupdm { .. } => "spmupdm".into(),
            Mechanism::RepeatedFpdm { .. } => "repeated-fpdm-strawman".into(),
            Mechanism::IdmStub => "idm-stub".into(),
        }
    }

    /// Whether Monte Carlo runs are available.
    pub fn samples(&self) -> bool {
        !matches!(self, Mechanism::RepeatedFpdm { .. } | Mechanism::IdmStub)
    }

    fn build_lottery(&self, net: &SocialNetwork, profile: &ReportProfile) -> Result<PathLottery> {
        match self {
            Mechanism::Pdm => {
                let order = path_order(net, profile)?;
                Ok(PathLottery::new(
                    net.len(),
                    [Branch {
                        probability: Rational::one(),
                        paths: vec![LotteryPath {
                            order,
                            surcharge_base: Vec::new(),
                        }],
                    }],
                ))
            }
            Mechanism::Fpdm { map, variant } => fpdm_lottery(net, profile, map, *variant),
            Mechanism::Mupdm { items } => mupdm_lottery(net, profile, *items),
            Mechanism::SpMupdm { items } => spmupdm_lottery(net, profile, *items),
            Mechanism::RepeatedFpdm { .. } | Mechanism::IdmStub => {
                Err(Error::Unsupported(format!("{} has no path lottery", self.name())))
            }
        }
    }

    /// Draws the paths of one run.
    pub fn assign<R: Rng + ?Sized>(&self, net: &SocialNetwork, profile: &ReportProfile, rng: &mut R) -> Result<PathAssignment> {
        match self {
            Mechanism::Pdm => {
                let order = path_order(net, profile)?;
                Ok(PathAssignment {
                    paths: vec![order],
                    surcharges: vec![Rational::zero()],
                })
            }
            Mechanism::Fpdm { map, variant } => fpdm_assign(net, profile, map, *variant, rng),
            Mechanism::Mupdm { items } => mupdm_assign(net, profile, *items, rng),
            Mechanism::SpMupdm { items } => spmupdm_map(net, profile, *items, rng),
            Mechanism::RepeatedFpdm { .. } => Err(Error::ExactOnly("repeated-fpdm-strawman")),
            Mechanism::IdmStub => Err(Error::ExactOnly("idm-stub")),
        }
    }

    /// One Monte Carlo run.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        net: &SocialNetwork,
        profile: &ReportProfile,
        truth: &TrueProfile,
        rule: PaymentRule,
        rng: &mut R,
    ) -> Result<RealizedOutcome> {
        let asg = self.assign(net, profile, rng)?;
        Ok(realize(&asg, profile, truth, rule, rng))
    }
}

impl MechanismUnderTest for Mechanism {
    fn label(&self) -> String {
        self.name()
    }

    fn evaluate(&self, net: &SocialNetwork, profile: &ReportProfile, truth: &TrueProfile) -> Result<ExpectedOutcome> {
        match self {
            Mechanism::RepeatedFpdm { items } => repeated_fpdm_expected(net, profile, truth, *items),
            Mechanism::IdmStub => idm_stub_expected(net, profile, truth),
            _ => Ok(self.build_lottery(net, profile)?.evaluate(profile, truth)),
        }
    }

    fn lottery(&self, net: &SocialNetwork, profile: &ReportProfile) -> Option<Result<PathLottery>> {
        match self {
            Mechanism::RepeatedFpdm { .. } | Mechanism::IdmStub => None,
            _ => Some(self.build_lottery(net, profile)),
        }
    }

    fn items(&self) -> usize {
        match self {
            Mechanism::Mupdm { items } | Mechanism::SpMupdm { items } | Mechanism::RepeatedFpdm { items } => *items,
            _ => 1,
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Mechanism {
    type Err = String;

    /// Single-item parse; use [`Mechanism::from_name`] to set an item count.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Mechanism::from_name(s, 1).ok_or_else(|| format!("unknown mechanism `{s}`; expected one of {}", MECHANISM_NAMES.join(", ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::q;

    #[test]
    fn names_round_trip() {
        for name in MECHANISM_NAMES {
            assert_eq!(Mechanism::from_name(name, 2).unwrap().name(), name);
        }
        assert!("vcg".parse::<Mechanism>().is_err());
    }

    #[test]
    fn pdm_needs_a_path() {
        let inst = fixtures::path_example();
        let prof = inst.values.truthful_profile(&inst.network).unwrap();
        let out = Mechanism::Pdm.evaluate(&inst.network, &prof, &inst.values).unwrap();
        assert_eq!(out.welfare, q("0.72"));
        let inst = fixtures::triangle();
        let prof = inst.values.truthful_profile(&inst.network).unwrap();
        assert!(Mechanism::Pdm.evaluate(&inst.network, &prof, &inst.values).is_err());
    }

    #[test]
    fn lottery_and_direct_evaluation_agree() {
        let inst = fixtures::two_items_sybil();
        let prof = inst.values.truthful_profile(&inst.network).unwrap();
        for name in ["fpdm-bf", "fpdm-gbf", "fpdm-wgbf", "fpdm-bf-cp", "mupdm", "spmupdm"] {
            let m = Mechanism::from_name(name, 2).unwrap();
            let lot = m.lottery(&inst.network, &prof).unwrap().unwrap();
            assert_eq!(lot.evaluate(&prof, &inst.values), m.evaluate(&inst.network, &prof, &inst.values).unwrap());
        }
    }
}
