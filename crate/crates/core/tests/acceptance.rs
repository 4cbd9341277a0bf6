//! Acceptance suite: one test per criterion, each printing a pass line
//! (visible with `--nocapture`). Tolerances and counts are pinned here.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::string::String;


use common::*;
use pipg_core::behaviour::{
    a_section, behaviour_eq, m_map, residual_along_action, translate_config, z_config, ChanMap, MixedBehaviour, Translator,
};
use pipg_core::pi::{
    conf_transitions, parse_defs_and_config, recheck_transition, Configuration, DefinitionEnv,
    Name, RuleTag, SigmaLabel,
};
use pipg_core::presheaf::{iso_check_forced, ElemId, IsoResult, ObjC};
use pipg_core::testing::{
    accept_states, auto_battery, c_transition_exists, expansion_check, explore,
    fair_testing_compare, m_transitions, mixed_key, pole_membership, positioned_key,
    s_transitions, CompareOutcome, ConfSystem, ExplorationBudget, Pole, PoleVerdict,
};
use pipg_core::trace::{
    check_trace, closed_world_actions_from, compose_traces_with, sequentialize, TraceViolation,
};

fn big() -> ExplorationBudget {
    ExplorationBudget { max_states: 200_000, max_depth: 200_000 }
}

fn conf(text: &str) -> (DefinitionEnv, Configuration) {
    let (defs, c, _) = parse_defs_and_config(text).expect("parse");
    (defs, c)
}

/// Criterion 1: each of the six machine rules has a positive and a negative
/// case, and the frame rule is closed under 200 random frames.
#[test]
fn c1_rule_coverage_and_frame_closure() {
    // heat
    let (defs, c) = conf("[a] a<a>.0 | a(x).0");
    assert!(conf_transitions(&c, &defs).iter().any(|t| matches!(t.rule, RuleTag::Heat { .. })));
    let (defs_n, c_n) = conf("[a] a<a>.0 + a(x).0");
    assert!(conf_transitions(&c_n, &defs_n)
        .iter()
        .all(|t| !matches!(t.rule, RuleTag::Heat { .. })));
    // tau guard
    let (d2, c2) = conf("[a] tau.tick.0");
    let ts = conf_transitions(&c2, &d2);
    assert!(ts.iter().any(
        |t| matches!(t.rule, RuleTag::TauGuard { .. }) && t.label == SigmaLabel::Silent
    ));
    let (d3, c3) = conf("[a] tick.0");
    assert!(conf_transitions(&c3, &d3).iter().all(|t| !matches!(t.rule, RuleTag::TauGuard { .. })));
    // tick guard
    assert!(conf_transitions(&c3, &d3)
        .iter()
        .any(|t| matches!(t.rule, RuleTag::TickGuard { .. }) && t.label == SigmaLabel::Tick));
    assert!(conf_transitions(&c2, &d2).iter().all(|t| t.label != SigmaLabel::Tick));
    // nu
    let (d4, c4) = conf("[a] new b.b<b>.0");
    let nus: Vec<_> = conf_transitions(&c4, &d4);
    assert!(nus.iter().any(|t| matches!(t.rule, RuleTag::NuGuard { fresh: Name(1), .. })));
    assert!(conf_transitions(&c3, &d3).iter().all(|t| !matches!(t.rule, RuleTag::NuGuard { .. })));
    // sync: positive needs a shared channel, negative has none
    let (d5, c5) = conf("[a, b] a(x).0; a<b>.0");
    assert!(conf_transitions(&c5, &d5).iter().any(|t| matches!(t.rule, RuleTag::Sync { .. })));
    let (d6, c6) = conf("[a, b] a(x).0; b(x).0");
    assert!(conf_transitions(&c6, &d6).iter().all(|t| !matches!(t.rule, RuleTag::Sync { .. })));
    // frame: a transition of S1 persists under any disjoint frame S
    let (d7, c7) = conf("[a] 0");
    assert!(conf_transitions(&c7, &d7).is_empty(), "nil alone has no transitions");

    let defs = DefinitionEnv::new();
    let mut r = rng(101);
    let mut checked = 0usize;
    while checked < 200 {
        let base = random_configuration(&mut r, 3, 2);
        let moves = conf_transitions(&base, &defs);
        if moves.is_empty() {
            continue;
        }
        let frame = random_configuration(&mut r, base.gamma.len() as u32, 2);
        // frame over the same channel set
        let framed = Configuration::new(
            base.gamma.clone(),
            frame.procs.iter().chain(base.procs.iter()).cloned().collect(),
        );
        if framed.well_formed(&defs).is_err() {
            continue;
        }
        let framed_moves = conf_transitions(&framed, &defs);
        for mv in &moves {
            let expected = Configuration::new(
                mv.target.gamma.clone(),
                frame.procs.iter().chain(mv.target.procs.iter()).cloned().collect(),
            );
            assert!(
                framed_moves
                    .iter()
                    .any(|fm| fm.label == mv.label && fm.target.same_state(&expected)),
                "frame closure fails"
            );
        }
        // rule instances re-derive
        for mv in moves.iter().take(2) {
            assert!(recheck_transition(&base, &defs, mv));
        }
        checked += 1;
    }
    println!("ACCEPT C1 rule coverage + frame closure (200 frames): pass");
}

/// Criterion 2: the coffee machines.
#[test]
fn c2_coffee_machines() {
    let (defs, c) = conf("[a, b, c] a(x).b(y).0 + a(x).c(y).0; a(x).(b(y).0 + c(y).0)");
    let mut tr = Translator::new(&defs);
    let h = ChanMap::sorted(&c.gamma);
    let p = tr.translate(&c.procs[0], &h).expect("translate");
    let q = tr.translate(&c.procs[1], &h).expect("translate");
    assert_eq!(tr.sys.card(p, ObjC::Iota(3, 0)), 2, "two ways of inputting on a");
    assert_eq!(tr.sys.card(q, ObjC::Iota(3, 0)), 1, "one way of inputting on a");
    assert!(!behaviour_eq(&tr.sys, p, &tr.sys, q, 2));
    println!("ACCEPT C2 coffee machines: card 2 vs 1, depth-2 inequivalence: pass");
}

/// Criterion 3: must/fair separation on the divergent pair.
#[test]
fn c3_must_fair_separation() {
    let q1 = "X := tau.X\n[a] X | a(x).0";
    let q2 = "X := tau.X\n[a] a(x).0";
    let test = "X := tau.X\n[a] a<a>.tick.0";
    let (defs, c1) = conf(q1);
    let (_, c2) = conf(q2);
    let (_, t) = conf(test);
    let sys = ConfSystem { defs: &defs };
    use pipg_core::testing::TestingLts;
    let c1t = sys.par(&c1, &t).expect("coh");
    let c2t = sys.par(&c2, &t).expect("coh");
    let g1 = explore(&sys, &c1t, &big(), None);
    let g2 = explore(&sys, &c2t, &big(), None);

    assert!(pole_membership(&g2, g2.root, Pole::Must).holds(), "Q2 must pass the test");
    match pole_membership(&g1, g1.root, Pole::Must) {
        PoleVerdict::Fails(w) => {
            assert!(w.note.contains("cycle"), "divergence witness is a silent cycle")
        }
        other => panic!("Q1 must fail must-testing, got {other:?}"),
    }
    assert!(pole_membership(&g1, g1.root, Pole::Fair).holds());
    assert!(pole_membership(&g2, g2.root, Pole::Fair).holds());

    let gamma: BTreeSet<Name> = [Name(0)].into_iter().collect();
    let tests: Vec<Configuration> = auto_battery(&gamma, 2)
        .into_iter()
        .map(|p| Configuration::new(gamma.clone(), vec![p]))
        .collect();
    let outcome = fair_testing_compare(&sys, &c1, &c2, &tests, Pole::Fair, &big(), None);
    assert_eq!(outcome, CompareOutcome::Same, "fair testing equates them");
    let outcome = fair_testing_compare(&sys, &c1, &c2, &tests, Pole::Must, &big(), None);
    assert!(matches!(outcome, CompareOutcome::Differ { .. }), "must testing separates them");
    println!("ACCEPT C3 must/fair separation with cycle witness + auto:2 battery: pass");
}

/// Criterion 4: the two silent trees are fair testing equivalent over the
/// depth-3 battery on two channels.
#[test]
fn c4_silent_trees_fair_equivalent() {
    let p1 = "[a, b] tau.(tau.(tau.0 + b(x).0) + a(x).0) + tau.0";
    let p2 = "[a, b] tau.(tau.(tau.0 + a(x).0) + b(x).0) + tau.0";
    let (defs, c1) = conf(p1);
    let (_, c2) = conf(p2);
    let sys = ConfSystem { defs: &defs };
    let gamma: BTreeSet<Name> = [Name(0), Name(1)].into_iter().collect();
    let tests: Vec<Configuration> = auto_battery(&gamma, 3)
        .into_iter()
        .map(|p| Configuration::new(gamma.clone(), vec![p]))
        .collect();
    assert_eq!(tests.len(), 400);
    let outcome = fair_testing_compare(&sys, &c1, &c2, &tests, Pole::Fair, &big(), None);
    assert_eq!(outcome, CompareOutcome::Same);
    println!("ACCEPT C4 P1/P2 fair-equivalent over auto:3 ({} tests): pass", tests.len());
}

/// Criterion 5: 500 random composites round-trip through the criterion and
/// sequentialisation; each mutation class is rejected with its tag, 100
/// instances each.
#[test]
fn c5_trace_criterion_fuzz() {
    let mut r = rng(105);
    for i in 0..500 {
        let (actions, composite) = random_trace(&mut r, 4, 3, 4);
        let n = check_trace(&composite).unwrap_or_else(|v| panic!("composite {i}: {v}"));
        assert_eq!(n, actions.len(), "composite {i} has the right length");
        let acts = sequentialize(&composite).expect("sequentialize");
        let recomposed = pipg_core::trace::compose_action_sequence(&acts).expect("recompose");
        assert_eq!(check_trace(&recomposed), Ok(n));
        let mut forced: Vec<((ObjC, ElemId), ElemId)> = Vec::new();
        for e in composite.initial.all_elems() {
            forced.push((composite.t.apply(e), recomposed.t.apply(e).1));
        }
        assert!(
            matches!(
                iso_check_forced(&composite.mid, &recomposed.mid, &forced),
                IsoResult::Iso(_)
            ),
            "composite {i} recomposes isomorphically"
        );
    }
    let mut dropped = 0usize;
    while dropped < 100 {
        let (_, composite) = random_trace(&mut r, 3, 3, 4);
        let Some(bad) = mutate_drop_final_agent(&mut r, &composite) else { continue };
        assert!(matches!(check_trace(&bad), Err(TraceViolation::FinalBoundary { .. })));
        dropped += 1;
    }
    for _ in 0..100 {
        let bad = linearity_gadget(&mut r);
        assert!(matches!(
            check_trace(&bad),
            Err(TraceViolation::SourceLinearity { .. } | TraceViolation::TargetLinearity { .. })
        ));
    }
    for _ in 0..100 {
        let bad = cycle_gadget(&mut r);
        assert!(matches!(check_trace(&bad), Err(TraceViolation::CausalCycle { .. })));
    }
    println!("ACCEPT C5 trace fuzz: 500 round-trips, 3x100 rejections: pass");
}

fn corpus() -> Vec<&'static str> {
    vec![
        "[a] 0",
        "[a] tau.0",
        "[a] tick.0",
        "[a] tick.tick.0",
        "[a] a(x).0",
        "[a] a<a>.0",
        "[a] a<a>.a<a>.0",
        "[a] a(x).x<a>.0",
        "[a, b] a<b>.0; a(x).tick.0",
        "[a] new c.c<c>.0",
        "[a] tau.0 | tick.0",
        "[a] (a(x).0 | a<a>.0) | tick.0",
        "X := tau.X\n[a] tau.X | a<a>.0",
        "X := tau.X\n[a] X | a(x).0",
        "X := tau.X\n[a] a(x).0",
        "Y := a<a>.Y\n[a] Y; a(x).tick.0",
        "[a, b, c] a(x).b(y).0 + a(x).c(y).0",
        "[a, b, c] a(x).(b(y).0 + c(y).0)",
        "[a, b] tau.(tau.(tau.0 + b(x).0) + a(x).0) + tau.0",
        "[a, b] tau.(tau.(tau.0 + a(x).0) + b(x).0) + tau.0",
        "[a] new c.(c<a>.0 | c(x).tick.0)",
        "[a, b] a(x).(x<b>.0 | tick.0); a<b>.0",
        "[a] a(x).0 + tau.tick.0; a<a>.0",
        "[a] new b.(b<a>.0 | b(x).x<a>.0)",
    ]
}

/// Criterion 6: the expansion relation holds between every corpus
/// configuration and its translation, and between the back-translation and
/// the original mixed behaviour, to depth 6.
#[test]
fn c6_expansion_on_the_corpus() {
    let corpus = corpus();
    assert!(corpus.len() >= 20);
    for text in &corpus {
        let (defs, c) = conf(text);
        let mut tr = Translator::new(&defs);
        let m = translate_config(&c, &mut tr).expect("translate");
        expansion_check(&c, &defs, &m, &tr.sys, 6)
            .unwrap_or_else(|w| panic!("C ~ T(C) fails on {text}: {w:?}"));
        let (zc, zdefs) = z_config(&tr.sys, &m);
        expansion_check(&zc, &zdefs, &m, &tr.sys, 6)
            .unwrap_or_else(|w| panic!("Z(M) ~ M fails on {text}: {w:?}"));
    }
    println!("ACCEPT C6 expansion C~T(C) and Z(M)~M on {} processes: pass", corpus.len());
}

/// Criterion 7: the flattening is a section and a pointwise strong
/// bisimulation to depth 6.
#[test]
fn c7_flattening_correspondence() {
    let mut r = rng(107);
    for _ in 0..100 {
        let sys = random_system(&mut r, 5);
        let m = random_mixed(&mut r, &sys, 3, 3);
        assert_eq!(m_map(&a_section(&m)), m, "m . a = id, exactly");
    }
    let mut bisim_checked = 0;
    while bisim_checked < 50 {
        let sys = random_system(&mut r, 4);
        let pb = random_positioned(&mut r, &sys, 2, 2);
        let mut memo = BTreeMap::new();
        assert!(
            pointwise_bisim(&pb, &m_map(&pb), &sys, 6, &mut memo),
            "pb and its flattening are strongly bisimilar to depth 6"
        );
        bisim_checked += 1;
    }
    println!("ACCEPT C7 m(a(M))=M on 100 samples, depth-6 bisim on 50: pass");
}

fn pointwise_bisim(
    pb: &pipg_core::behaviour::PositionedBehaviour,
    m: &MixedBehaviour,
    sys: &pipg_core::behaviour::BehaviourSystem,
    depth: u32,
    memo: &mut BTreeMap<(String, String, u32), bool>,
) -> bool {
    let pk = positioned_key(pb);
    let mk = mixed_key(m);
    if pk != mk {
        return false;
    }
    if depth == 0 {
        return true;
    }
    if let Some(&hit) = memo.get(&(pk.clone(), mk.clone(), depth)) {
        return hit;
    }
    let mut s_succ: Vec<(SigmaLabel, String, pipg_core::behaviour::PositionedBehaviour)> =
        s_transitions(pb, sys).into_iter().map(|(l, x)| (l, positioned_key(&x), x)).collect();
    let mut m_succ: Vec<(SigmaLabel, String, MixedBehaviour)> =
        m_transitions(m, sys).into_iter().map(|(l, x)| (l, mixed_key(&x), x)).collect();
    s_succ.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    s_succ.dedup_by(|a, b| (a.0, &a.1) == (b.0, &b.1));
    m_succ.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    m_succ.dedup_by(|a, b| (a.0, &a.1) == (b.0, &b.1));
    let mut ok = s_succ.len() == m_succ.len();
    if ok {
        for ((l1, k1, pb2), (l2, k2, m2)) in s_succ.iter().zip(m_succ.iter()) {
            if l1 != l2 || k1 != k2 || !pointwise_bisim(pb2, m2, sys, depth - 1, memo) {
                ok = false;
                break;
            }
        }
    }
    memo.insert((pk, mk, depth), ok);
    ok
}

/// Criterion 8: the end-formula example: a silent step with two states
/// followed by a fork with singleton branches accepts exactly the diagonal.
#[test]
fn c8_end_formula_oracle() {
    let mut sys = pipg_core::behaviour::BehaviourSystem::new();
    let nil = sys.add_state(0, None);
    let branch = |sys: &mut pipg_core::behaviour::BehaviourSystem, tick: bool| {
        let s = sys.add_state(0, None);
        if tick {
            sys.push_row(s, ObjC::Tick(0), nil);
        }
        s
    };
    let l1 = branch(&mut sys, true);
    let r1 = branch(&mut sys, false);
    let l2 = branch(&mut sys, false);
    let r2 = branch(&mut sys, true);
    let d1 = sys.add_state(0, None);
    sys.push_row(d1, ObjC::PiL(0), l1);
    sys.push_row(d1, ObjC::PiR(0), r1);
    let d2 = sys.add_state(0, None);
    sys.push_row(d2, ObjC::PiL(0), l2);
    sys.push_row(d2, ObjC::PiR(0), r2);
    let d = sys.add_state(0, None);
    sys.push_row(d, ObjC::TauN(0), d1);
    sys.push_row(d, ObjC::TauN(0), d2);

    let m = MixedBehaviour { gamma: BTreeSet::new(), procs: vec![(0, d, Vec::new())] };
    let pb = a_section(&m);
    let tau = closed_world_actions_from(&pb.pos)
        .into_iter()
        .find(|a| matches!(a.label, ObjC::TauN(_)))
        .expect("tau action");
    let fork = closed_world_actions_from(&tau.cospan.final_)
        .into_iter()
        .find(|a| matches!(a.label, ObjC::Fork(_)))
        .expect("fork action");
    let w = pipg_core::trace::compose_traces(
        &tau.cospan,
        &fork.cospan,
        &pipg_core::presheaf::PshMap::identity(&tau.cospan.final_),
    )
    .expect("compose");
    let analysis = accept_states(&pb, &w, &sys).expect("oracle");
    assert_eq!(analysis.states.len(), 2);
    assert_eq!(analysis.psi_codomain_size(), 4);
    assert!(analysis.psi_injective());
    println!("ACCEPT C8 end-formula oracle: |accept|=2 of 4, psi injective: pass");
}

/// Criterion 9: S-paths and oracle transitions agree on random states and
/// closed-world paths of length <= 2, and the S/M successor sets biject.
#[test]
fn c9_s_c_m_coherence() {
    let mut r = rng(109);
    let mut checked = 0usize;
    while checked < 50 {
        let sys = random_system(&mut r, 4);
        let pb = random_positioned(&mut r, &sys, 2, 2);

        // S <-> M bijection after canonicalisation
        let m = m_map(&pb);
        let mut sk: Vec<(SigmaLabel, String)> =
            s_transitions(&pb, &sys).into_iter().map(|(l, x)| (l, positioned_key(&x))).collect();
        let mut mk: Vec<(SigmaLabel, String)> =
            m_transitions(&m, &sys).into_iter().map(|(l, x)| (l, mixed_key(&x))).collect();
        sk.sort();
        sk.dedup();
        mk.sort();
        mk.dedup();
        assert_eq!(sk, mk, "s_transitions and m_transitions biject");

        // sample closed-world paths of length 1..=2
        let first: Vec<_> = closed_world_actions_from(&pb.pos).into_iter().collect();
        for a1 in first.iter().take(3) {
            for len in [1usize, 2] {
                let (w, endpoints) = if len == 1 {
                    (a1.cospan.clone(), s_endpoints(&pb, &[a1.clone()], &sys))
                } else {
                    let second: Vec<_> =
                        closed_world_actions_from(&a1.cospan.final_).into_iter().take(3).collect();
                    let Some(a2) = second.first() else { continue };
                    let (w, rmap) = compose_traces_with(
                        &a1.cospan,
                        &a2.cospan,
                        &pipg_core::presheaf::PshMap::identity(&a1.cospan.final_),
                    )
                    .expect("compose");
                    let mut eps = Vec::new();
                    for e in s_endpoints(&pb, &[a1.clone(), a2.clone()], &sys) {
                        // transport the endpoint into the composite's final position
                        let pos = e.pos.relabel(&rmap);
                        let states = e
                            .states
                            .iter()
                            .map(|(&(n, id), &s)| {
                                let nid =
                                    rmap.get(&(ObjC::Agent(n), id)).copied().unwrap_or(id);
                                ((n, nid), s)
                            })
                            .collect();
                        eps.push(pipg_core::behaviour::PositionedBehaviour { pos, states });
                    }
                    (w, eps)
                };
                if check_trace(&w).is_err() {
                    continue;
                }
                // every reached endpoint is accepted by the oracle
                for e in &endpoints {
                    assert!(
                        c_transition_exists(&pb, &w, e, &sys).expect("oracle"),
                        "reached endpoint is accepted"
                    );
                }
                // endpoints with fresh (unreachable) states are rejected
                let unreachable =endpoint_variants(&endpoints, &sys);
                for e in unreachable {
                    let ok = c_transition_exists(&pb, &w, &e, &sys).expect("oracle");
                    let reached = endpoints.iter().any(|f| {
                        f.pos == e.pos
                            && f.states.iter().all(|(k, &s)| {
                                behaviour_eq(&sys, s, &sys, e.states[k], sys.len() as u32 + 1)
                            })
                    });
                    assert_eq!(ok, reached, "oracle agrees with S-path existence");
                }
            }
        }
        checked += 1;
    }
    println!("ACCEPT C9 S/C/M coherence on 50 random states: pass");
}

/// All endpoints reachable along the given action sequence via residuals.
fn s_endpoints(
    pb: &pipg_core::behaviour::PositionedBehaviour,
    actions: &[pipg_core::trace::Action],
    sys: &pipg_core::behaviour::BehaviourSystem,
) -> Vec<pipg_core::behaviour::PositionedBehaviour> {
    let mut frontier = vec![pb.clone()];
    for a in actions {
        let mut next = Vec::new();
        for cur in &frontier {
            // enumerate branch choices
            let mut combos: Vec<BTreeMap<(u32, ElemId), usize>> = vec![BTreeMap::new()];
            let mut dead = false;
            for &(slot, y) in &a.slots.after {
                let b = a.basic_label(slot);
                let o = a.origin_of(slot);
                let card = sys.card(cur.state_of(o), b);
                if card == 0 {
                    dead = true;
                    break;
                }
                let mut grown = Vec::new();
                for c in &combos {
                    for k in 0..card {
                        let mut c2 = c.clone();
                        c2.insert((y.arity, y.id), k);
                        grown.push(c2);
                    }
                }
                combos = grown;
            }
            if dead {
                continue;
            }
            for choice in combos {
                if let Ok(pb2) = residual_along_action(cur, a, sys, &choice) {
                    next.push(pb2);
                }
            }
        }
        frontier = next;
    }
    frontier
}

/// Variants of the reached endpoints with states replaced by arbitrary
/// same-arity states (used as candidate negatives).
fn endpoint_variants(
    endpoints: &[pipg_core::behaviour::PositionedBehaviour],
    sys: &pipg_core::behaviour::BehaviourSystem,
) -> Vec<pipg_core::behaviour::PositionedBehaviour> {
    let mut out = Vec::new();
    let Some(base) = endpoints.first() else { return out };
    for (id, _) in sys.states() {
        let mut e = base.clone();
        let keys: Vec<_> = e.states.keys().copied().collect();
        for k in keys {
            if sys.arity(id) == k.0 {
                e.states.insert(k, id);
            }
        }
        out.push(e);
    }
    out
}
