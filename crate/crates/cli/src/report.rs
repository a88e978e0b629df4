//! JSON report shapes. Exact quantities are strings; only Monte Carlo
//! estimates are floats.

use std::collections::BTreeMap;

use dak_core::graph::{ReportProfile, SocialNetwork, TrueProfile};
use dak_core::lottery::ExpectedOutcome;
use dak_core::montecarlo::{Estimate, McSummary};
use dak_core::verify::bounds::{BoundRow, EfficiencyCheck, RevenueCheck};
use dak_core::verify::suites::SuiteReport;
use dak_core::verify::{BasicAudit, DeviationReport, Play, Verdict};
use dak_core::Rational;
use serde::Serialize;

use crate::scenario::Mode;

#[derive(Debug, Serialize)]
pub struct ExactBuyer {
    pub id: String,
    pub value: Rational,
    pub win_probability: Rational,
    pub expected_payment: Rational,
    pub expected_utility: Rational,
}

#[derive(Debug, Serialize)]
pub struct SampledBuyer {
    pub id: String,
    pub value: Rational,
    pub win_frequency: Estimate,
    pub utility: Estimate,
}

#[derive(Debug, Serialize)]
pub struct BranchRow {
    pub probability: Rational,
    pub paths: Vec<Vec<String>>,
    pub surcharges: Vec<Rational>,
    pub welfare: Rational,
    pub revenue: Rational,
}

#[derive(Debug, Serialize)]
pub struct AuditRow {
    pub feasible: bool,
    pub ir: bool,
    pub wbb: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub issues: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ir_failures: Vec<String>,
}

impl AuditRow {
    pub fn new(a: &BasicAudit, net: &SocialNetwork) -> Self {
        AuditRow {
            feasible: a.feasible,
            ir: a.ir(),
            wbb: a.wbb,
            issues: a.feasibility_issues.clone(),
            ir_failures: a.ir_failures.iter().map(|&v| net.label(v).to_string()).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ExactSection {
    pub buyers: Vec<ExactBuyer>,
    pub welfare: Rational,
    pub revenue: Rational,
    pub gross_in: Rational,
    pub gross_out: Rational,
    pub audit: AuditRow,
    pub breakdown: Vec<BranchRow>,
}

impl ExactSection {
    pub fn new(out: &ExpectedOutcome, net: &SocialNetwork, truth: &TrueProfile, audit: &BasicAudit) -> Self {
        let label = |v: usize| net.label(v).to_string();
        ExactSection {
            buyers: net
                .nodes()
                .map(|v| ExactBuyer {
                    id: label(v),
                    value: truth.value(v).clone(),
                    win_probability: out.win_probabilities[v].clone(),
                    expected_payment: out.expected_payments[v].clone(),
                    expected_utility: out.utilities[v].clone(),
                })
                .collect(),
            welfare: out.welfare.clone(),
            revenue: out.revenue.clone(),
            gross_in: out.gross_in.clone(),
            gross_out: out.gross_out.clone(),
            audit: AuditRow::new(audit, net),
            breakdown: out
                .breakdown
                .iter()
                .map(|b| BranchRow {
                    probability: b.probability.clone(),
                    paths: b.paths.iter().map(|p| p.iter().map(|&v| label(v)).collect()).collect(),
                    surcharges: b.surcharges.clone(),
                    welfare: b.welfare.clone(),
                    revenue: b.revenue.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SampledSection {
    pub samples: u64,
    pub seed: u64,
    pub confidence: &'static str,
    pub buyers: Vec<SampledBuyer>,
    pub welfare: Estimate,
    pub revenue: Estimate,
}

impl SampledSection {
    pub fn new(s: &McSummary, net: &SocialNetwork, truth: &TrueProfile) -> Self {
        SampledSection {
            samples: s.samples,
            seed: s.seed,
            confidence: "99% normal approximation",
            buyers: net
                .nodes()
                .map(|v| SampledBuyer {
                    id: net.label(v).to_string(),
                    value: truth.value(v).clone(),
                    win_frequency: s.win_frequencies[v],
                    utility: s.utilities[v],
                })
                .collect(),
            welfare: s.welfare,
            revenue: s.revenue,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub scenario_hash: String,
    pub mechanism: String,
    pub mode: Mode,
    pub items: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payment_rule: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<SampledSection>,
}

#[derive(Debug, Serialize)]
pub struct NetworkRow {
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub seller_neighbors: Vec<String>,
}

impl NetworkRow {
    pub fn new(net: &SocialNetwork) -> Self {
        let l = |v: usize| net.label(v).to_string();
        NetworkRow {
            nodes: net.nodes().map(l).collect(),
            edges: net.edges().map(|(u, v)| (l(u), l(v))).collect(),
            seller_neighbors: net.seller_neighbors().iter().map(|&v| l(v)).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ReportRow {
    pub id: String,
    pub value: Rational,
    /// `None` when the buyer stays away.
    pub bid: Option<Rational>,
    pub invited: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct PlayRow {
    pub network: NetworkRow,
    pub reports: Vec<ReportRow>,
    pub group: Vec<String>,
}

impl PlayRow {
    pub fn new(p: &Play) -> Self {
        let net = &p.network;
        let l = |v: usize| net.label(v).to_string();
        PlayRow {
            network: NetworkRow::new(net),
            reports: net.nodes().map(|v| report_row(net, &p.profile, &p.truth, v)).collect(),
            group: p.group.iter().map(|&v| l(v)).collect(),
        }
    }
}

fn report_row(net: &SocialNetwork, prof: &ReportProfile, truth: &TrueProfile, v: usize) -> ReportRow {
    ReportRow {
        id: net.label(v).to_string(),
        value: truth.value(v).clone(),
        bid: prof.report(v).map(|r| r.bid.clone()),
        invited: prof.invited(v).iter().map(|&u| net.label(u).to_string()).collect(),
    }
}

#[derive(Debug, Serialize)]
pub struct WitnessRow {
    pub gain: Rational,
    pub truthful: PlayRow,
    pub deviated: PlayRow,
}

#[derive(Debug, Serialize)]
pub struct DeviationRow {
    pub property: &'static str,
    pub verdict: &'static str,
    pub best_gain: Rational,
    pub structures: u64,
    pub profiles_evaluated: u64,
    pub skipped: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessRow>,
}

pub fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
    }
}

impl DeviationRow {
    pub fn new(r: &DeviationReport) -> Self {
        DeviationRow {
            property: r.property,
            verdict: verdict(r.verdict),
            best_gain: r.best_gain.clone(),
            structures: r.stats.structures,
            profiles_evaluated: r.stats.profiles,
            skipped: r.stats.skipped,
            witness: r.witness.as_ref().map(|w| WitnessRow {
                gain: w.gain.clone(),
                truthful: PlayRow::new(&w.truthful),
                deviated: PlayRow::new(&w.deviated),
            }),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BoundRowOut {
    pub delta: Rational,
    pub epsilon: Rational,
    /// Exact when the welfare is exact, otherwise a float rendered as a string.
    pub lhs: String,
    pub pass: bool,
}

impl BoundRowOut {
    pub fn new(r: &BoundRow) -> Self {
        BoundRowOut {
            delta: r.delta.clone(),
            epsilon: r.epsilon.clone(),
            lhs: r.exact_lhs.as_ref().map_or_else(|| format!("{:.6}", r.lhs), |x| x.to_exact_string()),
            pass: r.pass,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EfficiencyRow {
    pub items: usize,
    pub target: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub welfare_floor: Option<bool>,
    pub rows: Vec<BoundRowOut>,
    pub pass: bool,
}

impl EfficiencyRow {
    pub fn new(c: &EfficiencyCheck) -> Self {
        EfficiencyRow {
            items: c.items,
            target: c.target.clone(),
            welfare_floor: c.floor,
            rows: c.rows.iter().map(BoundRowOut::new).collect(),
            pass: c.passed(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RevenueRow {
    pub seller_degree: usize,
    pub ceiling: Rational,
    pub revenue: Rational,
    /// The bound is only claimed when the top bidder hangs below one seller neighbor.
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noncritical_head_probability: Option<Rational>,
    pub rows: Vec<BoundRowOut>,
    pub pass: bool,
}

impl RevenueRow {
    pub fn new(c: &RevenueCheck, applicable: bool) -> Self {
        RevenueRow {
            seller_degree: c.k,
            ceiling: c.ceiling.clone(),
            revenue: c.revenue.clone(),
            applicable,
            skipped: c.skipped.clone(),
            noncritical_head_probability: c.event_probability.clone(),
            rows: c.rows.iter().map(BoundRowOut::new).collect(),
            pass: c.passed(),
        }
    }
}

#[derive(Debug, Default, Serialize)]
pub struct VerifyReport {
    pub scenario_hash: String,
    pub mechanism: String,
    pub items: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ic: Option<DeviationRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sybil: Option<DeviationRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collusion: Option<DeviationRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub efficiency: Option<EfficiencyRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub revenue: Option<RevenueRow>,
    /// Per check: `pass`, `fail` for a known weakness, or `not claimed`.
    pub expected: BTreeMap<&'static str, &'static str>,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct CheckTally {
    pub check: &'static str,
    pub expected: &'static str,
    pub instances: usize,
    pub failures: usize,
    pub pass: bool,
}

/// `verify --random`: one tally per check plus the first few offending instances.
#[derive(Debug, Serialize)]
pub struct RandomVerifyReport {
    pub mechanism: String,
    pub max_buyers: usize,
    pub count: usize,
    pub seed: u64,
    /// Instances the mechanism cannot run on, e.g. non-paths under PDM.
    pub skipped: usize,
    pub checks: Vec<CheckTally>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failing: Vec<VerifyReport>,
}

#[derive(Debug, Serialize)]
pub struct SuiteRow {
    pub suite: String,
    pub passed: bool,
    pub instances: usize,
    pub checks: u64,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl SuiteRow {
    pub fn new(r: &SuiteReport) -> Self {
        SuiteRow {
            suite: r.name.clone(),
            passed: r.passed(),
            instances: r.instances,
            checks: r.checks,
            failures: r.failures.clone(),
            notes: r.notes.clone(),
        }
    }
}
