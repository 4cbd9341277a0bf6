//! Shared generators for the fuzz and acceptance suites. Deterministic:
//! seeded from `PIPG_SEED` when set, a fixed default otherwise.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use pipg_core::pi::{Configuration, DefinitionEnv, Guard, Name, Process};
use pipg_core::presheaf::{ElemId, GenC, ObjC, PositionBuilder, Presheaf};
use pipg_core::trace::{action_at, compose_action_sequence, Action, AgentRef, TraceCospan};

pub fn rng(salt: u64) -> ChaCha8Rng {
    let seed = std::env::var("PIPG_SEED")
        .ok()
        .and_then(|s| s.parse::<u64>().ok())
        .unwrap_or(0x9e3779b97f4a7c15);
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

/// A random position with the given caps (at least one agent).
pub fn random_position(r: &mut ChaCha8Rng, max_agents: usize, max_channels: usize) -> Presheaf {
    let n_channels = r.gen_range(1..=max_channels);
    let n_agents = r.gen_range(1..=max_agents);
    let mut b = PositionBuilder::new();
    for c in 0..n_channels {
        b.channel(ElemId(c as u32));
    }
    for a in 0..n_agents {
        let arity = r.gen_range(0..=3u32.min(n_channels as u32));
        let chans: Vec<ElemId> =
            (0..arity).map(|_| ElemId(r.gen_range(0..n_channels) as u32)).collect();
        b.agent(arity, ElemId(a as u32), &chans);
    }
    b.build()
}

/// Every action (closed-world and basic open shapes) available at `pos`.
pub fn all_actions_from(pos: &Presheaf) -> Vec<Action> {
    let mut out = pipg_core::trace::closed_world_actions_from(pos);
    for (n, id) in pos.agents() {
        let actor = AgentRef { arity: n, id };
        let mut shapes = vec![ObjC::PiL(n), ObjC::PiR(n)];
        for a in 0..n {
            shapes.push(ObjC::Iota(n, a));
            for b in 0..n {
                shapes.push(ObjC::Out(n, a, b));
            }
        }
        for shape in shapes {
            out.push(action_at(pos, shape, actor).expect("basic action attaches"));
        }
    }
    out
}

/// A random composable action sequence from a random position, returned
/// with its composite.
pub fn random_trace(
    r: &mut ChaCha8Rng,
    max_len: usize,
    max_agents: usize,
    max_channels: usize,
) -> (Vec<Action>, TraceCospan) {
    loop {
        let pos = random_position(r, max_agents, max_channels);
        let len = r.gen_range(1..=max_len);
        let mut actions: Vec<Action> = Vec::new();
        let mut cur = pos.clone();
        for _ in 0..len {
            let candidates = all_actions_from(&cur);
            if candidates.is_empty() {
                break;
            }
            let pick = candidates.into_iter().choose(r).expect("nonempty");
            cur = pick.cospan.final_.clone();
            actions.push(pick);
        }
        if actions.is_empty() {
            continue;
        }
        let composite = compose_action_sequence(&actions).expect("compose");
        return (actions, composite);
    }
}

/// Mutation (a): delete one final agent from the final position.
pub fn mutate_drop_final_agent(r: &mut ChaCha8Rng, t: &TraceCospan) -> Option<TraceCospan> {
    let agents = t.final_.agents();
    if agents.is_empty() {
        return None;
    }
    let &(n, id) = agents.iter().choose(r).expect("agent");
    let mut out = t.clone();
    out.final_.remove_elem(ObjC::Agent(n), id);
    let mut s = pipg_core::presheaf::PshMap::new();
    for e in out.final_.all_elems() {
        s.insert(e, t.s.get(e).expect("leg"));
    }
    out.s = s;
    out.actions = None;
    Some(out)
}

/// Mutation (b): a middle object in which two distinct cores share an
/// after-agent (source-linearity violation). Two agents each take a
/// one-agent step, but land on the same element.
pub fn linearity_gadget(r: &mut ChaCha8Rng) -> TraceCospan {
    let arity = r.gen_range(0..=2u32);
    let n_extra = r.gen_range(0..2usize);
    let shape = *[ObjC::TauN(arity), ObjC::Tick(arity), ObjC::PiL(arity)]
        .iter()
        .choose(r)
        .expect("shape");

    let mut mid = Presheaf::new();
    let chans: Vec<ElemId> = (0..arity).map(|i| { mid.add_elem(ObjC::Star, ElemId(i)); ElemId(i) }).collect();
    for k in 0..n_extra {
        mid.add_elem(ObjC::Star, ElemId(100 + k as u32));
    }
    let ag = ObjC::Agent(arity);
    for id in [0u32, 1, 2] {
        mid.add_elem(ag, ElemId(id));
        for (i, &c) in chans.iter().enumerate() {
            mid.set_act(ag, ElemId(id), GenC::Si(i as u32), c);
        }
    }
    // two action elements with a shared after-agent 2
    mid.add_elem(shape, ElemId(0));
    mid.add_elem(shape, ElemId(1));
    for m in [0u32, 1] {
        mid.set_act(shape, ElemId(m), GenC::T, ElemId(m));
        mid.set_act(shape, ElemId(m), GenC::S, ElemId(2));
    }
    assert!(mid.validate().is_ok());

    let mut initial = Presheaf::new();
    let mut final_ = Presheaf::new();
    for e in mid.all_elems() {
        match e.0 {
            ObjC::Star => {
                initial.add_elem(e.0, e.1);
                final_.add_elem(e.0, e.1);
            }
            ObjC::Agent(_) if e.1 != ElemId(2) => {
                initial.add_elem(e.0, e.1);
            }
            ObjC::Agent(_) => {
                final_.add_elem(e.0, e.1);
            }
            _ => {}
        }
    }
    for (n2, id) in initial.agents() {
        for (i, c) in mid.agent_channels(n2, id).into_iter().enumerate() {
            initial.set_act(ObjC::Agent(n2), id, GenC::Si(i as u32), c);
        }
    }
    for (n2, id) in final_.agents() {
        for (i, c) in mid.agent_channels(n2, id).into_iter().enumerate() {
            final_.set_act(ObjC::Agent(n2), id, GenC::Si(i as u32), c);
        }
    }
    let t = pipg_core::presheaf::PshMap::identity(&initial);
    let s = pipg_core::presheaf::PshMap::identity(&final_);
    TraceCospan { mid, initial, final_, t, s, actions: None }
}

/// Mutation (c): a causal cycle. Either the two-step loop in which each of
/// two one-agent actions consumes the other's output, or a hand-built
/// gadget of two synchronisations enabling each other.
pub fn cycle_gadget(r: &mut ChaCha8Rng) -> TraceCospan {
    if r.gen_bool(0.3) {
        return two_sync_cycle();
    }
    let arity = r.gen_range(0..=2u32);
    let shape = *[ObjC::TauN(arity), ObjC::Tick(arity)].iter().choose(r).expect("shape");
    let mut mid = Presheaf::new();
    let chans: Vec<ElemId> = (0..arity).map(|i| { mid.add_elem(ObjC::Star, ElemId(i)); ElemId(i) }).collect();
    let ag = ObjC::Agent(arity);
    for id in [0u32, 1] {
        mid.add_elem(ag, ElemId(id));
        for (i, &c) in chans.iter().enumerate() {
            mid.set_act(ag, ElemId(id), GenC::Si(i as u32), c);
        }
    }
    // p -> q -> p through two action elements
    mid.add_elem(shape, ElemId(0));
    mid.set_act(shape, ElemId(0), GenC::T, ElemId(0));
    mid.set_act(shape, ElemId(0), GenC::S, ElemId(1));
    mid.add_elem(shape, ElemId(1));
    mid.set_act(shape, ElemId(1), GenC::T, ElemId(1));
    mid.set_act(shape, ElemId(1), GenC::S, ElemId(0));
    assert!(mid.validate().is_ok());

    let mut boundary = Presheaf::new();
    for &c in &chans {
        boundary.add_elem(ObjC::Star, c);
    }
    let t = pipg_core::presheaf::PshMap::identity(&boundary);
    let s = t.clone();
    TraceCospan { mid, initial: boundary.clone(), final_: boundary, t, s, actions: None }
}

/// Two synchronisations on a single channel, each consuming an agent the
/// other produces.
fn two_sync_cycle() -> TraceCospan {
    let alpha = ElemId(0);
    let mut mid = Presheaf::new();
    mid.add_elem(ObjC::Star, alpha);

    let wire = |mid: &mut Presheaf, obj: ObjC, id: ElemId, arity: u32| {
        mid.add_elem(obj, id);
        for i in 0..arity {
            mid.set_act(obj, id, GenC::Si(i), alpha);
        }
    };
    // receiver chain: y (1) -> y' (2) -> y'' (3)
    wire(&mut mid, ObjC::Agent(1), ElemId(0), 1); // y
    wire(&mut mid, ObjC::Agent(2), ElemId(0), 2); // y'
    wire(&mut mid, ObjC::Agent(3), ElemId(0), 3); // y''
    // sender chain: z (2) -> z' (2) -> x' (2)
    wire(&mut mid, ObjC::Agent(2), ElemId(1), 2); // z
    wire(&mut mid, ObjC::Agent(2), ElemId(2), 2); // z'
    wire(&mut mid, ObjC::Agent(2), ElemId(3), 2); // x'

    // sync 1: receiver y -> y', sender z' -> x'
    let s1 = ObjC::Sync(1, 0, 2, 0, 1);
    let i1 = ObjC::Iota(1, 0);
    let o1 = ObjC::Out(2, 0, 1);
    mid.add_elem(s1, ElemId(0));
    mid.add_elem(i1, ElemId(0));
    mid.add_elem(o1, ElemId(0));
    mid.set_act(s1, ElemId(0), GenC::Rho, ElemId(0));
    mid.set_act(s1, ElemId(0), GenC::Eps, ElemId(0));
    mid.set_act(i1, ElemId(0), GenC::T, ElemId(0)); // y
    mid.set_act(i1, ElemId(0), GenC::S, ElemId(0)); // y'
    mid.set_act(o1, ElemId(0), GenC::T, ElemId(2)); // z'
    mid.set_act(o1, ElemId(0), GenC::S, ElemId(3)); // x'

    // sync 2: receiver y' -> y'', sender z -> z'
    let s2 = ObjC::Sync(2, 1, 2, 0, 1);
    let i2 = ObjC::Iota(2, 1);
    let o2 = ObjC::Out(2, 0, 1);
    mid.add_elem(s2, ElemId(0));
    mid.add_elem(i2, ElemId(0));
    if !mid.has_elem(o2, ElemId(1)) {
        mid.add_elem(o2, ElemId(1));
    }
    mid.set_act(s2, ElemId(0), GenC::Rho, ElemId(0));
    mid.set_act(s2, ElemId(0), GenC::Eps, ElemId(1));
    mid.set_act(i2, ElemId(0), GenC::T, ElemId(0)); // y'
    mid.set_act(i2, ElemId(0), GenC::S, ElemId(0)); // y''
    mid.set_act(o2, ElemId(1), GenC::T, ElemId(1)); // z
    mid.set_act(o2, ElemId(1), GenC::S, ElemId(2)); // z'

    assert!(mid.validate().is_ok(), "{:?}", mid.validate());

    let mut initial = Presheaf::new();
    initial.add_elem(ObjC::Star, alpha);
    wire(&mut initial, ObjC::Agent(1), ElemId(0), 1); // y
    wire(&mut initial, ObjC::Agent(2), ElemId(1), 2); // z
    let mut final_ = Presheaf::new();
    final_.add_elem(ObjC::Star, alpha);
    wire(&mut final_, ObjC::Agent(3), ElemId(0), 3); // y''
    wire(&mut final_, ObjC::Agent(2), ElemId(3), 2); // x'
    let t = pipg_core::presheaf::PshMap::identity(&initial);
    let s = pipg_core::presheaf::PshMap::identity(&final_);
    TraceCospan { mid, initial, final_, t, s, actions: None }
}

// --- random processes and configurations ---

pub fn random_process(r: &mut ChaCha8Rng, gamma: &[Name], depth: usize, next_bound: &mut u32) -> Process {
    if depth == 0 || gamma.is_empty() && r.gen_bool(0.3) {
        return Process::nil();
    }
    match r.gen_range(0..10) {
        0 | 1 => {
            // parallel
            let l = random_process(r, gamma, depth - 1, next_bound);
            let q = random_process(r, gamma, depth - 1, next_bound);
            Process::Par(Box::new(l), Box::new(q))
        }
        2 => Process::nil(),
        _ => {
            let n_sum = r.gen_range(1..=2);
            let mut sums = Vec::new();
            for _ in 0..n_sum {
                let g = random_guard(r, gamma, next_bound);
                let mut inner = gamma.to_vec();
                if let Guard::New(b) | Guard::In(_, b) = g {
                    inner.push(b);
                }
                let cont = random_process(r, &inner, depth - 1, next_bound);
                sums.push((g, cont));
            }
            Process::Sum(sums)
        }
    }
}

fn random_guard(r: &mut ChaCha8Rng, gamma: &[Name], next_bound: &mut u32) -> Guard {
    let mut fresh = || {
        let b = Name(*next_bound);
        *next_bound += 1;
        b
    };
    let pick = |r: &mut ChaCha8Rng| gamma[r.gen_range(0..gamma.len())];
    if gamma.is_empty() {
        return match r.gen_range(0..3) {
            0 => Guard::Tau,
            1 => Guard::Tick,
            _ => Guard::New(fresh()),
        };
    }
    match r.gen_range(0..5) {
        0 => Guard::Tau,
        1 => Guard::Tick,
        2 => Guard::New(fresh()),
        3 => Guard::In(pick(r), fresh()),
        _ => Guard::Out(pick(r), pick(r)),
    }
}

pub fn random_configuration(r: &mut ChaCha8Rng, max_chans: u32, max_procs: usize) -> Configuration {
    let n_chans = r.gen_range(1..=max_chans);
    let gamma: Vec<Name> = (0..n_chans).map(Name).collect();
    let mut next_bound = n_chans + 10;
    let n_procs = r.gen_range(1..=max_procs);
    let procs =
        (0..n_procs).map(|_| random_process(r, &gamma, 3, &mut next_bound)).collect();
    Configuration::new(gamma.into_iter().collect(), procs)
}

pub fn empty_defs() -> DefinitionEnv {
    DefinitionEnv::new()
}

// --- random behaviour systems and mixed behaviours ---

pub fn random_system(
    r: &mut ChaCha8Rng,
    max_states: usize,
) -> pipg_core::behaviour::BehaviourSystem {
    use pipg_core::behaviour::BehaviourSystem;
    let mut sys = BehaviourSystem::new();
    let n = r.gen_range(2..=max_states);
    // allocate states with arities first, then wire rows respecting arity
    let arities: Vec<u32> = (0..n).map(|_| r.gen_range(0..=2u32)).collect();
    let ids: Vec<pipg_core::behaviour::StateId> =
        arities.iter().map(|&a| sys.add_state(a, None)).collect();
    let mut by_arity: BTreeMap<u32, Vec<pipg_core::behaviour::StateId>> = BTreeMap::new();
    for (&a, &id) in arities.iter().zip(&ids) {
        by_arity.entry(a).or_default().push(id);
    }
    for (&arity, &id) in arities.iter().zip(&ids) {
        let mut labels: Vec<ObjC> = vec![
            ObjC::PiL(arity),
            ObjC::PiR(arity),
            ObjC::TauN(arity),
            ObjC::Tick(arity),
            ObjC::Nu(arity),
        ];
        for a in 0..arity {
            labels.push(ObjC::Iota(arity, a));
            for b in 0..arity {
                labels.push(ObjC::Out(arity, a, b));
            }
        }
        for label in labels {
            let target_arity = pipg_core::behaviour::label_target_arity(label);
            let Some(pool) = by_arity.get(&target_arity) else { continue };
            let k = r.gen_range(0..=2usize);
            for _ in 0..k {
                if r.gen_bool(0.5) {
                    let t = pool[r.gen_range(0..pool.len())];
                    sys.push_row(id, label, t);
                }
            }
        }
    }
    assert!(sys.validate().is_ok());
    sys
}

pub fn random_mixed(
    r: &mut ChaCha8Rng,
    sys: &pipg_core::behaviour::BehaviourSystem,
    max_procs: usize,
    max_chans: u32,
) -> pipg_core::behaviour::MixedBehaviour {
    let n_chans = r.gen_range(1..=max_chans);
    let gamma: std::collections::BTreeSet<Name> = (0..n_chans).map(Name).collect();
    let states: Vec<_> = sys.states().map(|(id, d)| (id, d.arity)).collect();
    let n_procs = r.gen_range(1..=max_procs);
    let procs = (0..n_procs)
        .map(|_| {
            let (id, arity) = states[r.gen_range(0..states.len())];
            let sigma: Vec<Name> =
                (0..arity).map(|_| Name(r.gen_range(0..n_chans))).collect();
            (arity, id, sigma)
        })
        .collect();
    pipg_core::behaviour::MixedBehaviour { gamma, procs }
}

pub fn random_positioned(
    r: &mut ChaCha8Rng,
    sys: &pipg_core::behaviour::BehaviourSystem,
    max_agents: usize,
    max_chans: u32,
) -> pipg_core::behaviour::PositionedBehaviour {
    let m = random_mixed(r, sys, max_agents, max_chans);
    pipg_core::behaviour::a_section(&m)
}
