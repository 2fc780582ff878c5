//! The consistency checks, run against the bundled corpus and its mutants:
//! witnesses must replay through the runtime semantics, and an independent
//! naive enumerator must agree with the invariant check on small systems.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use instikit::checks::{
    check_interaction, check_invariant, replay, run_all, RunSettings, Verdict,
};
use instikit::concrete::eval_guard;
use instikit::dsl::ast::Mode;
use instikit::dsl::resolve::{MsgPattern, ResolvedCheck, ResolvedSystem};
use instikit::dsl::{parse_model, resolve};
use instikit::system::{SysConfig, SystemRuntime};

fn load(name: &str) -> instikit::dsl::ResolvedModel {
    let path = format!("{}/models/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(path).expect("corpus file");
    resolve(&parse_model(&text).expect("parses")).expect("resolves")
}

fn first_system(model: &instikit::dsl::ResolvedModel) -> &ResolvedSystem {
    &model.systems[0]
}

#[test]
fn bundled_corpus_passes_every_check() {
    let model = load("atm.ikm");
    let sys = first_system(&model);
    let outcomes = run_all(sys, &RunSettings::default(), &[]).unwrap();
    assert_eq!(outcomes.len(), 7); // 2 static + 5 declared
    for o in &outcomes {
        assert_eq!(
            o.report.verdict,
            Verdict::Pass,
            "{} failed: {:?}",
            o.report.id,
            o.report.notes
        );
    }
    // The connector check spells out each property.
    let connector = outcomes.iter().find(|o| o.report.id == "connector[0]").unwrap();
    let notes = connector.report.notes.join("\n");
    assert!(notes.contains("protocol error state: not reachable"));
    assert!(notes.contains("deadlock: impossible"));
    assert!(notes.contains("pool overflow: none at capacity 4"));
}

#[test]
fn widened_mutant_fails_with_a_replayable_shortest_witness() {
    let model = load("atm_widened.ikm");
    let sys = first_system(&model);
    let settings = RunSettings::default();
    let outcomes = run_all(sys, &settings, &["invariant".to_string()]).unwrap();
    let inv = outcomes.last().unwrap();
    assert_eq!(inv.report.verdict, Verdict::Fail);
    let witness = inv.witness.as_ref().expect("witness");
    // The witness replays through the runtime and ends in a violating
    // configuration.
    let runtime = SystemRuntime::new(&sys.model, settings.capacity).unwrap();
    let last = replay(&runtime, witness).expect("replays");
    let ResolvedCheck::Invariant { expr, .. } = &sys.checks[0] else {
        panic!("expected invariant");
    };
    let mut store = instikit::concrete::Store::new();
    for (i, inst) in sys.model.instances.iter().enumerate() {
        for (name, value) in inst.env().unwrap().space.store_of(last.stores[i]) {
            store.insert(format!("{i}:{name}"), value);
        }
    }
    assert!(!eval_guard(expr, &store, &BTreeMap::new()).unwrap());
    // Shortest: rerunning produces the identical witness (byte-stable).
    let again = run_all(sys, &settings, &["invariant".to_string()]).unwrap();
    assert_eq!(again.last().unwrap().report, inv.report);
}

#[test]
fn double_verify_mutant_reaches_the_protocol_error() {
    let model = load("atm_double_verify.ikm");
    let sys = first_system(&model);
    let settings = RunSettings::default();
    let outcomes = run_all(sys, &settings, &["connector".to_string()]).unwrap();
    let conn = outcomes.last().unwrap();
    assert_eq!(conn.report.verdict, Verdict::Fail);
    assert!(conn
        .report
        .notes
        .iter()
        .any(|n| n.contains("protocol error state: reachable")));
    // The witness replays.
    let runtime = SystemRuntime::new(&sys.model, settings.capacity).unwrap();
    let witness = conn.witness.as_ref().expect("witness");
    let last = replay(&runtime, witness).expect("replays");
    assert!(last.monitors.iter().flatten().any(|s| s.is_empty()));
}

#[test]
fn interaction_modes_follow_the_figure() {
    let model = load("atm.ikm");
    let sys = first_system(&model);
    let settings = RunSettings::default();

    // The bundled loose check realizes [verify; reenterPIN; verify;
    // verified].
    let outcomes = run_all(sys, &settings, &["interaction".to_string()]).unwrap();
    assert_eq!(outcomes.last().unwrap().report.verdict, Verdict::Pass);

    // The reordered sequence fails in strict mode.
    let atm = sys.model.instance_index("atm").unwrap();
    let bank = sys.model.instance_index("bank").unwrap();
    let reordered = vec![
        MsgPattern {
            instance: bank,
            port: "atm".into(),
            name: "verified".into(),
            args: None,
        },
        MsgPattern {
            instance: atm,
            port: "bank".into(),
            name: "verify".into(),
            args: None,
        },
    ];
    let out = check_interaction(
        sys,
        "interaction[x]",
        "reordered",
        Mode::Strict,
        &reordered,
        &None,
        &settings,
    )
    .unwrap();
    assert_eq!(out.report.verdict, Verdict::Fail);

    // The empty sequence passes in both modes.
    for mode in [Mode::Strict, Mode::Loose] {
        let out = check_interaction(sys, "interaction[e]", "empty", mode, &[], &None, &settings)
            .unwrap();
        assert_eq!(out.report.verdict, Verdict::Pass);
    }
}

#[test]
fn trials_bound_of_one_fails_with_two_reentries() {
    // trialsNum <= 1 with stimuli forcing two re-entries: the shortest
    // witness exercises both.
    let model = load("atm.ikm");
    let sys = first_system(&model);
    let settings = RunSettings::default();
    let expr = instikit::concrete::GuardExpr::Cmp(
        instikit::concrete::CmpOp::Le,
        instikit::concrete::IntExpr::Ref("0:trialsNum".into()),
        instikit::concrete::IntExpr::Lit(1),
    );
    let out = check_invariant(sys, "invariant[x]", "trialsNum <= 1", &expr, &None, &settings)
        .unwrap();
    assert_eq!(out.report.verdict, Verdict::Fail);
    let witness = out.witness.as_ref().unwrap();
    let reentries = witness
        .steps
        .iter()
        .filter(|s| matches!(&s.kind, instikit::system::StepKind::Fire { item, .. }
            if item == &instikit::sm::PoolItem::Event("reenterPIN".into())))
        .count();
    assert_eq!(reentries, 2);
}

#[test]
fn false_invariant_fails_with_an_empty_trace() {
    let model = load("atm.ikm");
    let sys = first_system(&model);
    let out = check_invariant(
        sys,
        "invariant[x]",
        "false",
        &instikit::concrete::GuardExpr::Lit(false),
        &None,
        &RunSettings::default(),
    )
    .unwrap();
    assert_eq!(out.report.verdict, Verdict::Fail);
    assert!(out.witness.as_ref().unwrap().steps.is_empty());
}

/// A naive, independent reachability enumerator over the runtime: no parent
/// tracking, no ordering, just a worklist fixpoint.
fn naive_reachable(runtime: &SystemRuntime) -> BTreeSet<SysConfig> {
    let mut seen: BTreeSet<SysConfig> = runtime.initial_configs().into_iter().collect();
    let mut work: VecDeque<SysConfig> = seen.iter().cloned().collect();
    while let Some(cfg) = work.pop_front() {
        for step in runtime.successors(&cfg).unwrap() {
            if seen.insert(step.next.clone()) {
                work.push_back(step.next);
            }
        }
    }
    seen
}

#[test]
fn invariant_check_agrees_with_a_naive_enumerator() {
    let model = load("pingpong.ikm");
    let sys = first_system(&model);
    let settings = RunSettings::default();
    let runtime = SystemRuntime::new(&sys.model, settings.capacity).unwrap();
    let naive = naive_reachable(&runtime);
    assert!(naive.len() <= 200, "pingpong should stay tiny");
    let explored = instikit::system::explore(&runtime, settings.budget).unwrap();
    assert!(explored.complete);
    let bfs: BTreeSet<SysConfig> = explored.configs.iter().cloned().collect();
    assert_eq!(naive, bfs);
    // And the declared invariant passes over exactly that set.
    let outcomes = run_all(sys, &settings, &["invariant".to_string()]).unwrap();
    let inv = outcomes.last().unwrap();
    assert_eq!(inv.report.verdict, Verdict::Pass);
    assert_eq!(inv.report.stats.explored, naive.len());
}

#[test]
fn static_checks_fail_on_broken_wiring() {
    // Undeclared instance type.
    let text = "system Broken { inst x: Nope; }";
    let resolved = resolve(&parse_model(text).unwrap()).unwrap();
    let outcomes = run_all(&resolved.systems[0], &RunSettings::default(), &[]).unwrap();
    let instance = outcomes
        .iter()
        .find(|o| o.report.id == "static.instance")
        .unwrap();
    assert_eq!(instance.report.verdict, Verdict::Fail);

    // A port that is neither connected nor external.
    let text = r#"
env E {
  msg p.ping();
}

machine M over E {
  init A;
  state A;
  event go;
  on go from A to A do p.ping();
}

system S {
  inst m: M;
}
"#;
    let resolved = resolve(&parse_model(text).unwrap()).unwrap();
    let outcomes = run_all(&resolved.systems[0], &RunSettings::default(), &[]).unwrap();
    let interface = outcomes
        .iter()
        .find(|o| o.report.id == "static.interface")
        .unwrap();
    assert_eq!(interface.report.verdict, Verdict::Fail);
    assert!(interface.report.notes[0].contains("m.p"));

    // A connector whose messages have no matching events (arity mismatch).
    let text = r#"
env E {
  msg p.ping(0..1);
}

env F {
  msg q.pong();
}

machine M over E {
  init A;
  state A;
  event pong;
  on pong from A to A;
}

machine N over F {
  init B;
  state B;
  event ping;
  on ping from B to B;
}

system S {
  inst m: M;
  inst n: N;
  connect m.p -- n.q;
}
"#;
    let resolved = resolve(&parse_model(text).unwrap()).unwrap();
    let outcomes = run_all(&resolved.systems[0], &RunSettings::default(), &[]).unwrap();
    let interface = outcomes
        .iter()
        .find(|o| o.report.id == "static.interface")
        .unwrap();
    assert_eq!(interface.report.verdict, Verdict::Fail);
    assert!(interface
        .report
        .notes
        .iter()
        .any(|n| n.contains("no matching event")));
}

#[test]
fn hoare_chain_modes_differ_on_connected_guards() {
    // post1 and pre2 disjoint, but one action connects them: strict fails,
    // loose passes.
    let text = r#"
env E {
  var x: 0..2;
  guard at0 = x == 0;
  guard at1 = x == 1;
  action bump = x := x + 1;
}

system S {
  check chain strict in E {
    true -> [skip] |> at0;
    at1 -> [skip] |> true;
  };
  check chain loose in E {
    true -> [skip] |> at0;
    at1 -> [skip] |> true;
  };
}
"#;
    let resolved = resolve(&parse_model(text).unwrap()).unwrap();
    let outcomes = run_all(&resolved.systems[0], &RunSettings::default(), &["chain".to_string()]).unwrap();
    assert_eq!(outcomes[0].report.verdict, Verdict::Fail);
    assert_eq!(outcomes[1].report.verdict, Verdict::Pass);

    // With no connecting action both modes fail.
    let text = r#"
env E {
  var x: 0..2;
  guard at0 = x == 0;
  guard at1 = x == 1;
}

system S {
  check chain loose in E {
    true -> [skip] |> at0;
    at1 -> [skip] |> true;
  };
}
"#;
    let resolved = resolve(&parse_model(text).unwrap()).unwrap();
    let outcomes = run_all(&resolved.systems[0], &RunSettings::default(), &["chain".to_string()]).unwrap();
    assert_eq!(outcomes[0].report.verdict, Verdict::Fail);

    // Identical guards pass strict trivially.
    let text = r#"
env E {
  var x: 0..2;
  guard at0 = x == 0;
}

system S {
  check chain strict in E {
    true -> [skip] |> at0;
    at0 -> [skip] |> true;
  };
}
"#;
    let resolved = resolve(&parse_model(text).unwrap()).unwrap();
    let outcomes = run_all(&resolved.systems[0], &RunSettings::default(), &["chain".to_string()]).unwrap();
    assert_eq!(outcomes[0].report.verdict, Verdict::Pass);
}
