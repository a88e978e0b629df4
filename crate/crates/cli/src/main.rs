//! `dak`: run, verify, generate and sweep diffusion auction scenarios.

mod error;
mod report;
mod scenario;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dak_core::fpdm::{noncritical_head_probability, SurchargeVariant};
use dak_core::gen::{self, Family};
use dak_core::lottery::PaymentRule;
use dak_core::maps::MapKind;
use dak_core::mechanism::{Mechanism, MechanismUnderTest, MECHANISM_NAMES};
use dak_core::montecarlo;
use dak_core::verify::bounds::{default_deltas, efficiency_check, revenue_check, WelfareEstimate};
use dak_core::fixtures::Instance;
use dak_core::verify::suites::{random_instances, revenue_bound_applies, run_suite, suite_alias, SuiteConfig, SUITES};
use dak_core::verify::{audit_basic, collusion_oracle, ic_oracle, sybil_oracle_with, CommonValue, SybilOptions};
use dak_core::Rational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use error::{CliError, CliResult};
use report::{
    AuditRow, CheckTally, DeviationRow, EfficiencyRow, ExactSection, RandomVerifyReport, RevenueRow, RunReport, SampledSection,
    SuiteRow, VerifyReport,
};
use scenario::{Loaded, Mode, Scenario};

#[derive(Parser)]
#[command(name = "dak", version, about = "Probabilistic diffusion auctions: exact and sampled outcomes, property checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a mechanism on a scenario and report outcomes.
    Run(RunArgs),
    /// Check IR, IC, SP, CP and the approximation bounds on a scenario, or run a suite.
    Verify(VerifyArgs),
    /// Write a random scenario.
    Gen(GenArgs),
    /// Tabulate welfare and revenue over scenarios and mechanisms as CSV.
    Sweep(SweepArgs),
}

/// Overrides for scenario fields.
#[derive(Args, Clone, Default)]
struct Overrides {
    /// Mechanism name.
    #[arg(long)]
    mech: Option<String>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<u64>,
    /// Number of items.
    #[arg(long)]
    items: Option<usize>,
}

impl Overrides {
    fn apply(&self, mut s: Scenario) -> Scenario {
        if let Some(m) = &self.mech {
            s.mechanism = m.clone();
        }
        if let Some(m) = self.mode {
            s.mode = m;
        }
        if let Some(x) = self.seed {
            s.seed = x;
        }
        if let Some(x) = self.samples {
            s.samples = x;
        }
        if let Some(x) = self.items {
            s.items = x;
        }
        s
    }
}

#[derive(Args)]
struct RunArgs {
    scenario: PathBuf,
    #[command(flatten)]
    over: Overrides,
    /// Spread the head surcharge over winning events (experimental).
    #[arg(long)]
    expost: bool,
    /// Also write the per-branch breakdown as CSV.
    #[arg(long)]
    breakdown_csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Check {
    Audit,
    Ic,
    Sybil,
    Collusion,
    Efficiency,
    Revenue,
}

impl Check {
    const ALL: [Check; 6] = [Check::Audit, Check::Ic, Check::Sybil, Check::Collusion, Check::Efficiency, Check::Revenue];

    fn name(self) -> &'static str {
        match self {
            Check::Audit => "basic",
            Check::Ic => "ic",
            Check::Sybil => "sybil",
            Check::Collusion => "cp",
            Check::Efficiency => "eff",
            Check::Revenue => "rev",
        }
    }

    /// Per-scenario checks selected by a suite name.
    fn from_suite(name: &str) -> CliResult<Vec<Check>> {
        Ok(match suite_alias(name) {
            "all" => Check::ALL.to_vec(),
            "properties" => vec![Check::Audit],
            "ic" => vec![Check::Ic],
            "sybil" => vec![Check::Sybil],
            "collusion" => vec![Check::Collusion],
            "efficiency" => vec![Check::Efficiency],
            "revenue" => vec![Check::Revenue],
            "dominators" | "maps" => {
                return Err(CliError::Validation(format!("suite `{name}` does not take a scenario")));
            }
            _ => return Err(unknown_suite(name)),
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Expect {
    /// A property the mechanism guarantees.
    Pass,
    /// A known weakness: finding a deviation is the required outcome.
    Fail,
    /// Reported only.
    Info,
}

impl Expect {
    fn name(self) -> &'static str {
        match self {
            Expect::Pass => "pass",
            Expect::Fail => "fail",
            Expect::Info => "not claimed",
        }
    }

    fn met(self, passed: bool) -> bool {
        match self {
            Expect::Pass => passed,
            Expect::Fail => !passed,
            Expect::Info => true,
        }
    }

    /// What the mechanism promises for a check.
    fn of(mech: &Mechanism, check: Check) -> Expect {
        use Check::*;
        use MapKind::{BreadthFirst as Bf, GeneralizedBreadthFirst as Gbf};
        let bf_like = |m: &MapKind| matches!(m, Bf | Gbf);
        match (mech, check) {
            (Mechanism::RepeatedFpdm { .. }, Ic) => Expect::Fail,
            (Mechanism::IdmStub, Sybil | Collusion) => Expect::Fail,
            (Mechanism::RepeatedFpdm { .. } | Mechanism::IdmStub, _) => Expect::Info,
            (Mechanism::Mupdm { .. }, Sybil) => Expect::Fail,
            (_, Audit | Ic | Revenue) => Expect::Pass,
            (Mechanism::SpMupdm { .. }, Efficiency) => Expect::Info,
            (_, Efficiency) => Expect::Pass,
            (Mechanism::Pdm | Mechanism::SpMupdm { .. }, Sybil) => Expect::Pass,
            (Mechanism::Fpdm { map, variant: SurchargeVariant::Standard }, Sybil) if bf_like(map) => Expect::Pass,
            (Mechanism::Pdm, Collusion) => Expect::Pass,
            (Mechanism::Fpdm { variant: SurchargeVariant::CollusionProof, .. }, Collusion) => Expect::Pass,
            _ => Expect::Info,
        }
    }
}

fn unknown_suite(name: &str) -> CliError {
    CliError::Validation(format!(
        "unknown suite `{name}`; expected one of {} or basic, cp, eff, rev",
        SUITES.join(", ")
    ))
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CommonArg {
    Grid,
    Actual,
    Both,
}

#[derive(Args)]
struct VerifyArgs {
    /// Scenario to check.
    scenario: Option<PathBuf>,
    #[arg(long = "scenario", conflicts_with = "scenario", value_name = "SCENARIO")]
    scenario_flag: Option<PathBuf>,
    /// Check COUNT seeded random instances with up to N buyers.
    #[arg(long, num_args = 2, value_names = ["N", "COUNT"])]
    random: Option<Vec<usize>>,
    /// Comma-separated suites: basic, ic, sybil, cp, eff, rev, all; without a
    /// scenario also properties, efficiency, dominators and maps.
    #[arg(long, value_delimiter = ',')]
    suite: Vec<String>,
    /// Smaller built-in suite sizes.
    #[arg(long)]
    quick: bool,
    #[command(flatten)]
    over: Overrides,
    /// Bid grid step, e.g. 1/8.
    #[arg(long, default_value = "1/8")]
    grid_step: String,
    #[arg(long, default_value_t = 2)]
    max_sybils: usize,
    /// Only let these buyers mount Sybil attacks (repeatable).
    #[arg(long)]
    attacker: Vec<String>,
    #[arg(long, default_value_t = 3)]
    max_cartel: usize,
    /// Where a cartel's common valuation comes from.
    #[arg(long, value_enum, default_value = "both")]
    common_value: CommonArg,
    /// Comma-separated δ values.
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<String>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// path, tree, gnp-connected or layered.
    family: String,
    /// Number of buyers.
    n: usize,
    /// Edge probability for gnp-connected and layered.
    p: Option<f64>,
    /// Valuations are multiples of 1/denom.
    #[arg(long, default_value_t = 100)]
    denom: i64,
    #[command(flatten)]
    over: Overrides,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Scenario files; random instances are generated when none are given.
    scenarios: Vec<PathBuf>,
    /// Comma-separated mechanisms.
    #[arg(long, value_delimiter = ',', required = true)]
    mech: Vec<String>,
    /// Comma-separated metrics per mechanism.
    #[arg(long, value_delimiter = ',', value_enum, default_value = "welfare,revenue,floor-margin,bound-margin")]
    metrics: Vec<Metric>,
    #[arg(long, default_value = "gnp")]
    family: String,
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Deltas for the bound margin.
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long)]
    items: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Metric {
    /// Expected welfare.
    Welfare,
    /// Expected seller utility.
    Revenue,
    /// `E[W] - v_max²/2`, single item only.
    FloorMargin,
    /// Smallest slack of the approximation bound over the deltas.
    BoundMargin,
}

impl Metric {
    fn name(self) -> &'static str {
        match self {
            Metric::Welfare => "welfare",
            Metric::Revenue => "revenue",
            Metric::FloorMargin => "floor_margin",
            Metric::BoundMargin => "bound_margin",
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Run(a) => cmd_run(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Sweep(a) => cmd_sweep(a),
    };
    if let Err(e) = res {
        eprintln!("dak: {e}");
        std::process::exit(e.code());
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            so.flush()?;
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn load(path: &Path, over: &Overrides) -> CliResult<Loaded> {
    over.apply(Scenario::read(path)?).validate()
}

fn parse_rational(s: &str, what: &str) -> CliResult<Rational> {
    s.trim().parse().map_err(|e| CliError::Validation(format!("{what} `{s}`: {e}")))
}

fn cmd_run(a: RunArgs) -> CliResult<()> {
    let l = load(&a.scenario, &a.over)?;
    let net = &l.instance.network;
    let truth = &l.instance.values;
    let prof = truth.truthful_profile(net)?;
    let rule = if a.expost { PaymentRule::ExPost } else { PaymentRule::Standard };
    let mut rep = RunReport {
        scenario_hash: l.hash.clone(),
        mechanism: l.mechanism.name(),
        mode: l.scenario.mode,
        items: l.scenario.items,
        payment_rule: a.expost.then_some("ex-post (experimental)"),
        exact: None,
        monte_carlo: None,
    };
    match l.scenario.mode {
        Mode::Exact => {
            let out = match (rule, l.mechanism.lottery(net, &prof)) {
                (PaymentRule::ExPost, Some(lot)) => lot?.evaluate_with(&prof, truth, rule),
                (PaymentRule::ExPost, None) => {
                    return Err(CliError::Validation(format!("{} has no ex-post variant", l.mechanism)));
                }
                _ => l.mechanism.evaluate(net, &prof, truth)?,
            };
            let audit = audit_basic(&out, &prof, l.mechanism.items());
            if let Some(p) = &a.breakdown_csv {
                write_breakdown(p, &out, net)?;
            }
            rep.exact = Some(ExactSection::new(&out, net, truth, &audit));
        }
        Mode::Mc => {
            let s = montecarlo::run(&l.mechanism, net, &prof, truth, rule, l.scenario.samples, l.scenario.seed)?;
            rep.monte_carlo = Some(SampledSection::new(&s, net, truth));
        }
    }
    emit(a.out.as_deref(), &to_json(&rep))
}

fn write_breakdown(path: &Path, out: &dak_core::lottery::ExpectedOutcome, net: &dak_core::graph::SocialNetwork) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(e.to_string()))?;
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["branch", "probability", "paths", "surcharges", "welfare", "revenue"]).map_err(io)?;
    for (k, b) in out.breakdown.iter().enumerate() {
        let paths: Vec<String> = b
            .paths
            .iter()
            .map(|p| p.iter().map(|&v| net.label(v)).collect::<Vec<_>>().join(">"))
            .collect();
        let sur: Vec<String> = b.surcharges.iter().map(|s| s.to_exact_string()).collect();
        w.write_record([
            k.to_string(),
            b.probability.to_exact_string(),
            paths.join(" "),
            sur.join(" "),
            b.welfare.to_exact_string(),
            b.revenue.to_exact_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

struct CheckOpts {
    checks: Vec<Check>,
    step: Rational,
    deltas: Vec<Rational>,
    max_sybils: usize,
    attackers: Vec<String>,
    max_cartel: usize,
    common: CommonValue,
}

/// Runs the selected checks; returns the report and, per check, whether it passed.
fn verify_instance(l: &Loaded, o: &CheckOpts) -> CliResult<(VerifyReport, Vec<(Check, bool)>)> {
    let net = &l.instance.network;
    let truth = &l.instance.values;
    let prof = truth.truthful_profile(net)?;
    let mech = &l.mechanism;
    let mut rep = VerifyReport {
        scenario_hash: l.hash.clone(),
        mechanism: mech.name(),
        items: l.scenario.items,
        expected: o.checks.iter().map(|&c| (c.name(), Expect::of(mech, c).name())).collect(),
        ..Default::default()
    };
    let mut verdicts = Vec::new();
    let exact = if l.scenario.mode == Mode::Exact || o.checks.iter().any(|c| *c != Check::Efficiency) {
        Some(mech.evaluate(net, &prof, truth)?)
    } else {
        None
    };
    for &c in &o.checks {
        let ok = match c {
            Check::Audit => {
                let audit = audit_basic(exact.as_ref().expect("exact outcome"), &prof, mech.items());
                rep.audit = Some(AuditRow::new(&audit, net));
                audit.passed()
            }
            Check::Ic => {
                let r = ic_oracle(net, truth, mech, &o.step)?;
                rep.ic = Some(DeviationRow::new(&r));
                r.passed()
            }
            Check::Sybil => {
                let attackers = if o.attackers.is_empty() {
                    None
                } else {
                    let ids = o.attackers.iter().map(|x| {
                        net.labels()
                            .iter()
                            .position(|l| l == x)
                            .ok_or_else(|| CliError::Validation(format!("unknown attacker `{x}`")))
                    });
                    Some(ids.collect::<CliResult<Vec<_>>>()?)
                };
                let opts = SybilOptions {
                    max_sybils: o.max_sybils,
                    grid_step: o.step.clone(),
                    sybil_step: o.step.clone(),
                    attackers,
                };
                let r = sybil_oracle_with(net, truth, mech, &opts)?;
                rep.sybil = Some(DeviationRow::new(&r));
                r.passed()
            }
            Check::Collusion => {
                let r = collusion_oracle(net, truth, mech, o.max_cartel, &o.step, o.common)?;
                rep.collusion = Some(DeviationRow::new(&r));
                r.passed()
            }
            Check::Efficiency => {
                let est = match &exact {
                    Some(out) if l.scenario.mode == Mode::Exact => WelfareEstimate::Exact(out.welfare.clone()),
                    _ => {
                        let s = montecarlo::run(mech, net, &prof, truth, PaymentRule::Standard, l.scenario.samples, l.scenario.seed)?;
                        WelfareEstimate::Sampled {
                            mean: s.welfare.mean,
                            lower: s.welfare.lower,
                        }
                    }
                };
                let e = efficiency_check(net, truth, &est, &o.deltas, mech.items());
                rep.efficiency = Some(EfficiencyRow::new(&e));
                e.passed()
            }
            Check::Revenue => {
                if mech.items() != 1 {
                    continue;
                }
                let out = exact.as_ref().expect("exact outcome");
                // the bound rests on a uniformly drawn first head
                let uniform_head = matches!(
                    mech,
                    Mechanism::Fpdm {
                        map: MapKind::BreadthFirst | MapKind::GeneralizedBreadthFirst,
                        variant: SurchargeVariant::Standard,
                    }
                );
                let event = match mech.lottery(net, &prof) {
                    Some(lot) if uniform_head => Some(noncritical_head_probability(net, &prof, &lot?)),
                    _ => None,
                };
                let applicable = uniform_head && net.seller_neighbors().len() >= 2 && revenue_bound_applies(net, &prof)?;
                let r = revenue_check(net, truth, out, &o.deltas, event);
                rep.revenue = Some(RevenueRow::new(&r, applicable));
                !applicable || r.passed()
            }
        };
        verdicts.push((c, ok));
    }
    rep.passed = verdicts.iter().all(|&(c, ok)| Expect::of(mech, c).met(ok));
    Ok((rep, verdicts))
}

fn cmd_verify(a: VerifyArgs) -> CliResult<()> {
    let scenario = a.scenario.clone().or_else(|| a.scenario_flag.clone());
    if scenario.is_none() && a.random.is_none() {
        return run_builtin_suites(&a);
    }
    let suites = if a.suite.is_empty() { vec!["all".to_string()] } else { a.suite.clone() };
    let mut checks = Vec::new();
    for s in &suites {
        for c in Check::from_suite(s)? {
            if !checks.contains(&c) {
                checks.push(c);
            }
        }
    }
    let step = parse_rational(&a.grid_step, "grid step")?;
    if !step.is_positive() || step > Rational::one() {
        return Err(CliError::Validation("grid step must be in (0, 1]".into()));
    }
    let opts = CheckOpts {
        checks,
        step,
        deltas: parse_deltas(a.deltas.as_deref())?,
        max_sybils: a.max_sybils,
        attackers: a.attacker.clone(),
        max_cartel: a.max_cartel,
        common: match a.common_value {
            CommonArg::Grid => CommonValue::Grid,
            CommonArg::Actual => CommonValue::Actual,
            CommonArg::Both => CommonValue::GridAndActual,
        },
    };
    if let Some(path) = scenario {
        let l = load(&path, &a.over)?;
        let (rep, _) = verify_instance(&l, &opts)?;
        emit(a.out.as_deref(), &to_json(&rep))?;
        return if rep.passed {
            Ok(())
        } else {
            Err(CliError::Verification(format!("{} on {}", l.mechanism, path.display())))
        };
    }
    let r = a.random.as_deref().expect("random given");
    let (max_n, count) = (r[0], r[1]);
    if max_n == 0 {
        return Err(CliError::Validation("--random needs at least one buyer".into()));
    }
    let seed = a.over.seed.unwrap_or(0);
    let mech_name = a.over.mech.clone().unwrap_or_else(|| "fpdm-bf".into());
    check_mech(&mech_name)?;
    let mut tallies: Vec<(Check, usize, usize)> = opts.checks.iter().map(|&c| (c, 0, 0)).collect();
    let mut skipped = 0;
    let mut failing = Vec::new();
    let mut mech = None;
    for inst in random_instances(count, max_n, seed, 7)? {
        let s = Scenario::from_instance(
            &inst,
            a.over.items.unwrap_or(1),
            &mech_name,
            a.over.mode.unwrap_or_default(),
            seed,
            a.over.samples.unwrap_or(10_000),
        );
        let l = s.validate()?;
        mech.get_or_insert_with(|| l.mechanism.clone());
        let (rep, verdicts) = match verify_instance(&l, &opts) {
            Err(CliError::Validation(m)) if m.contains("path") && l.mechanism == Mechanism::Pdm => {
                skipped += 1;
                continue;
            }
            r => r?,
        };
        let mut unexpected = false;
        for (c, ok) in verdicts {
            let t = tallies.iter_mut().find(|t| t.0 == c).expect("tally");
            t.1 += 1;
            if !ok {
                t.2 += 1;
                unexpected |= Expect::of(&l.mechanism, c) == Expect::Pass;
            }
        }
        if unexpected && failing.len() < 3 {
            failing.push(rep);
        }
    }
    let mech = mech.unwrap_or(Mechanism::from_name(&mech_name, a.over.items.unwrap_or(1)).expect("checked"));
    let checks: Vec<CheckTally> = tallies
        .into_iter()
        .map(|(c, n, f)| {
            let exp = Expect::of(&mech, c);
            CheckTally {
                check: c.name(),
                expected: exp.name(),
                instances: n,
                failures: f,
                pass: exp.met(f == 0),
            }
        })
        .collect();
    let rep = RandomVerifyReport {
        mechanism: mech.name(),
        max_buyers: max_n,
        count,
        seed,
        skipped,
        passed: checks.iter().all(|c| c.pass),
        checks,
        failing,
    };
    emit(a.out.as_deref(), &to_json(&rep))?;
    if rep.passed {
        Ok(())
    } else {
        Err(CliError::Verification(format!("{mech} on random instances")))
    }
}

fn run_builtin_suites(a: &VerifyArgs) -> CliResult<()> {
    if a.suite.is_empty() {
        return Err(CliError::Validation("give a scenario, --random N COUNT or --suite".into()));
    }
    for name in &a.suite {
        if !SUITES.contains(&suite_alias(name)) {
            return Err(unknown_suite(name));
        }
    }
    let mut cfg = if a.quick { SuiteConfig::quick() } else { SuiteConfig::default() };
    if let Some(s) = a.over.seed {
        cfg.seed = s;
    }
    if let Some(n) = a.over.samples {
        cfg.mc_samples = n;
    }
    cfg.grid_step = parse_rational(&a.grid_step, "grid step")?;
    let mut reps = Vec::new();
    for name in &a.suite {
        reps.extend(run_suite(name, &cfg)?);
    }
    let rows: Vec<SuiteRow> = reps.iter().map(SuiteRow::new).collect();
    emit(a.out.as_deref(), &to_json(&rows))?;
    let failed: Vec<&str> = reps.iter().filter(|r| !r.passed()).map(|r| r.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("suites failed: {}", failed.join(", "))))
    }
}

fn parse_deltas(ds: Option<&[String]>) -> CliResult<Vec<Rational>> {
    let Some(ds) = ds else {
        return Ok(default_deltas());
    };
    let out = ds.iter().map(|d| parse_rational(d, "delta")).collect::<CliResult<Vec<_>>>()?;
    if out.is_empty() || out.iter().any(|d| !d.is_positive()) {
        return Err(CliError::Validation("deltas must be positive".into()));
    }
    Ok(out)
}

fn family(name: &str) -> CliResult<Family> {
    Family::parse(name).ok_or_else(|| CliError::Validation(format!("unknown family `{name}`; expected path, tree, gnp or layered")))
}

fn check_mech(name: &str) -> CliResult<()> {
    if MECHANISM_NAMES.contains(&name) {
        Ok(())
    } else {
        Err(CliError::Validation(format!("unknown mechanism `{name}`; expected one of {}", MECHANISM_NAMES.join(", "))))
    }
}

fn generate(f: Family, n: usize, p: Option<f64>, denom: i128, rng: &mut ChaCha8Rng) -> CliResult<Instance> {
    if n == 0 || denom <= 0 {
        return Err(CliError::Validation("n and denom must be positive".into()));
    }
    Ok(match (f, p) {
        (_, Some(p)) if !(p > 0.0 && p <= 1.0) => {
            return Err(CliError::Validation(format!("edge probability {p} is outside (0, 1]")));
        }
        (Family::Gnp, Some(p)) => gen::gnp_connected(n, p, denom, rng)?,
        (Family::Layered, Some(p)) => {
            let sizes: Vec<usize> = (0..n).step_by(3).map(|i| (n - i).min(3)).collect();
            gen::layered(&sizes, p, denom, rng)?
        }
        (Family::Path | Family::Tree, Some(_)) => {
            return Err(CliError::Validation(format!("{} takes no edge probability", f.name())));
        }
        (_, None) => gen::generate(f, n, denom, rng)?,
    })
}

fn cmd_gen(a: GenArgs) -> CliResult<()> {
    let f = family(&a.family)?;
    let seed = a.over.seed.unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = generate(f, a.n, a.p, a.denom as i128, &mut rng)?;
    let mech = a.over.mech.clone().unwrap_or_else(|| "fpdm-bf".into());
    check_mech(&mech)?;
    let s = Scenario::from_instance(
        &inst,
        a.over.items.unwrap_or(1),
        &mech,
        a.over.mode.unwrap_or_default(),
        seed,
        a.over.samples.unwrap_or(10_000),
    );
    // never write a file that `run` would reject
    s.clone().validate()?;
    emit(a.out.as_deref(), &to_json(&s))
}

fn cmd_sweep(a: SweepArgs) -> CliResult<()> {
    let mechs: Vec<&String> = a.mech.iter().filter(|m| !m.trim().is_empty()).collect();
    if mechs.is_empty() {
        return Err(CliError::Validation("empty mechanism list".into()));
    }
    for m in &mechs {
        check_mech(m)?;
    }
    let deltas = parse_deltas(a.deltas.as_deref())?;
    let mut scenarios: Vec<(String, Scenario)> = Vec::new();
    if a.scenarios.is_empty() {
        let f = family(&a.family)?;
        for k in 0..a.count {
            let seed = a.seed.wrapping_add(k as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = generate(f, a.n, a.p, 100, &mut rng)?;
            let s = Scenario::from_instance(&inst, a.items.unwrap_or(1), mechs[0], a.mode, seed, a.samples);
            scenarios.push((format!("{}-{}-{seed}", f.name(), a.n), s));
        }
    } else {
        for p in &a.scenarios {
            let mut s = Scenario::read(p)?;
            s.mode = a.mode;
            s.samples = a.samples;
            if let Some(m) = a.items {
                s.items = m;
            }
            scenarios.push((p.display().to_string(), s));
        }
    }
    let mut header: Vec<String> = ["instance", "hash", "buyers", "items", "v_max", "top_m"].map(String::from).to_vec();
    for m in &mechs {
        for x in &a.metrics {
            header.push(format!("{m}.{}", x.name()));
        }
        header.push(format!("{m}.status"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(&header).map_err(io)?;
    for (name, base) in &scenarios {
        let head = base.clone().validate()?;
        let net = &head.instance.network;
        let truth = &head.instance.values;
        let zero = WelfareEstimate::Exact(Rational::zero());
        let v_max = efficiency_check(net, truth, &zero, &[], 1).target;
        let top_m = efficiency_check(net, truth, &zero, &[], base.items).target;
        let mut rec = vec![
            name.clone(),
            head.hash.clone(),
            net.len().to_string(),
            base.items.to_string(),
            v_max.to_exact_string(),
            top_m.to_exact_string(),
        ];
        for m in &mechs {
            let mut s = base.clone();
            s.mechanism = m.to_string();
            rec.extend(sweep_cells(s, &a.metrics, &deltas, &v_max));
        }
        w.write_record(&rec).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    emit(a.out.as_deref(), &String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Metric cells followed by a status cell; a failing mechanism leaves its
/// cells empty instead of aborting the sweep.
fn sweep_cells(s: Scenario, metrics: &[Metric], deltas: &[Rational], v_max: &Rational) -> Vec<String> {
    match sweep_metrics(s, metrics, deltas, v_max) {
        Ok(mut cells) => {
            cells.push("ok".into());
            cells
        }
        Err(e) => {
            let mut cells = vec![String::new(); metrics.len()];
            cells.push(e.to_string());
            cells
        }
    }
}

fn sweep_metrics(s: Scenario, metrics: &[Metric], deltas: &[Rational], v_max: &Rational) -> CliResult<Vec<String>> {
    let l = s.validate()?;
    let net = &l.instance.network;
    let truth = &l.instance.values;
    let prof = truth.truthful_profile(net)?;
    let items = l.mechanism.items();
    let floor = v_max.square() / Rational::from(2usize);
    let mut cells = Vec::new();
    match l.scenario.mode {
        Mode::Exact => {
            let out = l.mechanism.evaluate(net, &prof, truth)?;
            let eff = efficiency_check(net, truth, &WelfareEstimate::Exact(out.welfare.clone()), deltas, items);
            for m in metrics {
                cells.push(match m {
                    Metric::Welfare => out.welfare.to_exact_string(),
                    Metric::Revenue => out.revenue.to_exact_string(),
                    Metric::FloorMargin if items == 1 => (&out.welfare - &floor).to_exact_string(),
                    Metric::FloorMargin => String::new(),
                    Metric::BoundMargin => eff
                        .rows
                        .iter()
                        .filter_map(|r| r.exact_lhs.as_ref())
                        .min()
                        .map(|lhs| (lhs - &eff.target).to_exact_string())
                        .unwrap_or_default(),
                });
            }
        }
        Mode::Mc => {
            let sm = montecarlo::run(&l.mechanism, net, &prof, truth, PaymentRule::Standard, l.scenario.samples, l.scenario.seed)?;
            let est = WelfareEstimate::Sampled {
                mean: sm.welfare.mean,
                lower: sm.welfare.lower,
            };
            let eff = efficiency_check(net, truth, &est, deltas, items);
            for m in metrics {
                cells.push(match m {
                    Metric::Welfare => format!("{:.6}", sm.welfare.mean),
                    Metric::Revenue => format!("{:.6}", sm.revenue.mean),
                    Metric::FloorMargin if items == 1 => format!("{:.6}", sm.welfare.lower - floor.to_f64()),
                    Metric::FloorMargin => String::new(),
                    Metric::BoundMargin => eff
                        .rows
                        .iter()
                        .map(|r| r.lhs - eff.target.to_f64())
                        .reduce(f64::min)
                        .map(|x| format!("{x:.6}"))
                        .unwrap_or_default(),
                });
            }
        }
    }
    Ok(cells)
}
