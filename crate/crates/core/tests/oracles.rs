use dak_core::fixtures;
use dak_core::graph::TrueProfile;
use dak_core::mechanism::{Mechanism, MechanismUnderTest};
use dak_core::rational::q;
use dak_core::verify::{collusion_oracle, ic_oracle, sybil_oracle, sybil_oracle_with, CommonValue, SybilOptions, DeviationReport, Verdict};

fn mech(name: &str, m: usize) -> Mechanism {
    Mechanism::from_name(name, m).unwrap()
}

fn assert_replays(r: &DeviationReport, m: &dyn MechanismUnderTest) {
    let w = r.witness.as_ref().expect("failing report carries a witness");
    assert!(w.gain.is_positive());
    assert_eq!(w.replay(m).unwrap(), w.gain);
    assert_eq!(w.gain, r.best_gain);
}

#[test]
fn strawman_fails_ic_where_fpdm_passes() {
    let net = fixtures::triangle().network;
    let truth = TrueProfile::new(vec![q("1"), q("0"), q("1")]).unwrap();
    let straw = mech("repeated-fpdm-strawman", 2);
    let r = ic_oracle(&net, &truth, &straw, &q("1/8")).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert_replays(&r, &straw);
    // the known underbid to 1/2 is worth 31/32 - 3/4
    assert!(r.best_gain >= q("7/32"));
    let w = r.witness.unwrap();
    assert_eq!(w.deviated.group, vec![0]);
    assert!(w.deviated.profile.bid(0) < q("1"));

    for name in ["fpdm-bf", "fpdm-gbf", "mupdm", "spmupdm"] {
        let r = ic_oracle(&net, &truth, &mech(name, 2), &q("1/8")).unwrap();
        assert!(r.passed(), "{name}: {:?}", r.witness);
        assert!(r.stats.profiles > 0);
    }
}

#[test]
fn single_buyer_is_trivially_ic() {
    let inst = dak_core::fixtures::inefficiency();
    let net = dak_core::graph::SocialNetwork::new(1, [], [0]).unwrap();
    let truth = TrueProfile::new(vec![q("0.6")]).unwrap();
    for name in ["pdm", "fpdm-bf", "mupdm", "spmupdm"] {
        assert!(ic_oracle(&net, &truth, &mech(name, 1), &q("1/8")).unwrap().passed());
    }
    assert!(ic_oracle(&inst.network, &inst.values, &mech("pdm", 1), &q("1/8")).unwrap().passed());
}

#[test]
fn example_instances_are_ic() {
    for (inst, m) in [(fixtures::triangle(), 1), (fixtures::cartel_example(), 1), (fixtures::two_items(), 2), (fixtures::two_items_sybil(), 2)] {
        for name in ["fpdm-bf", "fpdm-gbf", "fpdm-wgbf", "fpdm-bf-cp", "mupdm", "spmupdm"] {
            let r = ic_oracle(&inst.network, &inst.values, &mech(name, m), &q("1/8")).unwrap();
            assert!(r.passed(), "{name}: {:?}", r.witness);
        }
    }
}

#[test]
fn mupdm_falls_to_sybils_on_two_items_sybil() {
    let inst = fixtures::two_items_sybil();
    let m = mech("mupdm", 2);
    let r = sybil_oracle(&inst.network, &inst.values, &m, 2, &q("1/8")).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert_replays(&r, &m);
    let sp = sybil_oracle(&inst.network, &inst.values, &mech("spmupdm", 2), 2, &q("1/8")).unwrap();
    assert!(sp.passed(), "{:?}", sp.witness);
}

#[test]
fn mupdm_attack_by_e() {
    // e gains by spawning a Sybil that can pull her onto a's path
    let inst = fixtures::two_items_sybil();
    let e = inst.network.node_by_label("e").unwrap();
    let opts = SybilOptions {
        max_sybils: 1,
        grid_step: q("1/8"),
        sybil_step: q("1/8"),
        attackers: Some(vec![e]),
    };
    let m = mech("mupdm", 2);
    let r = sybil_oracle_with(&inst.network, &inst.values, &m, &opts).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert_replays(&r, &m);
    assert_eq!(r.witness.unwrap().deviated.group[0], e);
}

#[test]
fn pdm_paths_resist_sybils() {
    let inst = fixtures::path_example();
    let r = sybil_oracle(&inst.network, &inst.values, &mech("pdm", 1), 2, &q("1/4")).unwrap();
    assert!(r.passed(), "{:?}", r.witness);
    // Sybil wirings that are not paths are counted, not silently dropped
    assert!(r.stats.skipped > 0);
}

#[test]
fn idm_stub_idm_sybil_attack() {
    let inst = fixtures::idm_sybil();
    let stub = Mechanism::IdmStub;
    let r = sybil_oracle(&inst.network, &inst.values, &stub, 1, &q("1/10")).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert_replays(&r, &stub);
    assert!(r.best_gain >= q("0.8"));
}

#[test]
fn cartel_example_cartels() {
    let inst = fixtures::cartel_example();
    let cp = mech("fpdm-bf-cp", 1);
    for common in [CommonValue::Actual, CommonValue::Grid] {
        let r = collusion_oracle(&inst.network, &inst.values, &cp, 3, &q("1/8"), common).unwrap();
        assert!(r.passed(), "{common:?}: {:?}", r.witness);
    }
    let stub = Mechanism::IdmStub;
    let r = collusion_oracle(&inst.network, &inst.values, &stub, 3, &q("1/10"), CommonValue::Actual).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert_eq!(r.best_gain, q("0.1"));
    assert_replays(&r, &stub);
}

#[test]
fn singleton_cartels_match_ic() {
    let inst = fixtures::triangle();
    let straw = mech("repeated-fpdm-strawman", 2);
    let truth = TrueProfile::new(vec![q("1"), q("0"), q("1")]).unwrap();
    let ic = ic_oracle(&inst.network, &truth, &straw, &q("1/8")).unwrap();
    let cp = collusion_oracle(&inst.network, &truth, &straw, 1, &q("1/8"), CommonValue::Actual).unwrap();
    assert_eq!(ic.verdict, cp.verdict);
    assert_eq!(ic.best_gain, cp.best_gain);
}

#[test]
fn nobody_shows_up() {
    let inst = fixtures::cartel_example();
    let prof = inst.values.truthful_profile(&inst.network).unwrap();
    let mut empty = prof.clone();
    for v in inst.network.nodes() {
        empty = empty.with_report(&inst.network, v, None).unwrap();
    }
    for name in ["fpdm-bf", "fpdm-gbf", "fpdm-bf-cp", "mupdm", "spmupdm", "idm-stub", "repeated-fpdm-strawman"] {
        let out = mech(name, 2).evaluate(&inst.network, &empty, &inst.values).unwrap();
        assert!(out.total_allocation().is_zero() && out.revenue.is_zero(), "{name}");
    }
}
