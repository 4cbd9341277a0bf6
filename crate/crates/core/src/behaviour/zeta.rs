//! Back-translation of behaviour states into guarded process terms.
//!
//! Each state becomes a guarded sum: one `tau.(P | Q)` summand per pair of
//! fork-row entries (forking is not a guard, so it hides behind a silent
//! step), and one summand per entry of the other rows. States on a
//! recursion cycle become named constants.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use crate::pi::{ConstId, Definition, DefinitionEnv, Guard, Name, Process};
use crate::presheaf::ObjC;

use super::{BehaviourSystem, StateId};

/// Term over channels `0..arity-1`, plus the definitions it needs.
pub fn zeta(sys: &BehaviourSystem, d: StateId) -> (Process, DefinitionEnv) {
    let (mut terms, env) = zeta_all(sys, &[d]);
    (terms.pop().expect("one root"), env)
}

/// Back-translate several states against one shared definition
/// environment.
pub fn zeta_all(sys: &BehaviourSystem, roots: &[StateId]) -> (Vec<Process>, DefinitionEnv) {
    let mut reachable: BTreeSet<StateId> = BTreeSet::new();
    for &d in roots {
        reachable.extend(sys.reachable(d));
    }
    // states that can reach themselves again become constants
    let mut cyclic: BTreeSet<StateId> = BTreeSet::new();
    for &s in &reachable {
        let mut stack: Vec<StateId> = sys.state(s).rows.values().flatten().copied().collect();
        let mut seen = BTreeSet::new();
        while let Some(x) = stack.pop() {
            if x == s {
                cyclic.insert(s);
                break;
            }
            if seen.insert(x) {
                stack.extend(sys.state(x).rows.values().flatten().copied());
            }
        }
    }

    let mut env = DefinitionEnv::new();
    let mut const_of: BTreeMap<StateId, ConstId> = BTreeMap::new();
    for (k, &s) in cyclic.iter().enumerate() {
        let arity = sys.arity(s);
        let id = env.add(Definition {
            name: format!("Z{k}"),
            params: (0..arity).map(Name).collect(),
            param_names: (0..arity).map(|i| format!("c{i}")).collect(),
            body: Process::nil(),
        });
        const_of.insert(s, id);
    }
    let mut done: BTreeSet<StateId> = BTreeSet::new();
    for (&s, &id) in &const_of {
        let body = build(sys, s, &const_of, &mut done, true);
        env.set_body(id, body);
    }
    let terms = roots.iter().map(|&d| build(sys, d, &const_of, &mut done, false)).collect();
    (terms, env)
}

/// Back-translation of a whole mixed behaviour: one process per entry,
/// substituted along its wiring, over a shared definition environment.
pub fn z_config(
    sys: &BehaviourSystem,
    m: &super::MixedBehaviour,
) -> (crate::pi::Configuration, DefinitionEnv) {
    let roots: Vec<StateId> = m.procs.iter().map(|(_, d, _)| *d).collect();
    let (terms, env) = zeta_all(sys, &roots);
    let procs = terms
        .into_iter()
        .zip(m.procs.iter())
        .map(|(t, (_, _, sigma))| {
            let map: BTreeMap<Name, Name> =
                sigma.iter().enumerate().map(|(i, &nm)| (Name(i as u32), nm)).collect();
            crate::pi::substitute(&t, &map)
        })
        .collect();
    (crate::pi::Configuration::new(m.gamma.clone(), procs), env)
}

fn reference(s: StateId, arity: u32, const_of: &BTreeMap<StateId, ConstId>) -> Option<Process> {
    const_of.get(&s).map(|&id| Process::Const(id, (0..arity).map(Name).collect()))
}

/// The guarded sum for a state; `as_body` builds a definition body, so the
/// state's own constant is not substituted at the root.
fn build(
    sys: &BehaviourSystem,
    s: StateId,
    const_of: &BTreeMap<StateId, ConstId>,
    done: &mut BTreeSet<StateId>,
    as_body: bool,
) -> Process {
    if !as_body {
        if let Some(r) = reference(s, sys.arity(s), const_of) {
            return r;
        }
    }
    done.insert(s);
    let n = sys.arity(s);
    let sub = |sys: &BehaviourSystem,
               t: StateId,
               done: &mut BTreeSet<StateId>|
     -> Process {
        match reference(t, sys.arity(t), const_of) {
            Some(r) => r,
            None => build(sys, t, const_of, done, false),
        }
    };
    let mut summands: Vec<(Guard, Process)> = Vec::new();

    // fork rows: the full (i, j) product behind a silent guard
    let lrow = sys.row(s, ObjC::PiL(n)).to_vec();
    let rrow = sys.row(s, ObjC::PiR(n)).to_vec();
    for &li in &lrow {
        for &rj in &rrow {
            let l = sub(sys, li, done);
            let r = sub(sys, rj, done);
            summands.push((
                Guard::Tau,
                Process::Par(alloc::boxed::Box::new(l), alloc::boxed::Box::new(r)),
            ));
        }
    }
    for &t in sys.row(s, ObjC::TauN(n)) {
        summands.push((Guard::Tau, sub(sys, t, done)));
    }
    for &t in sys.row(s, ObjC::Tick(n)) {
        summands.push((Guard::Tick, sub(sys, t, done)));
    }
    for &t in sys.row(s, ObjC::Nu(n)) {
        summands.push((Guard::New(Name(n)), sub(sys, t, done)));
    }
    for a in 0..n {
        for &t in sys.row(s, ObjC::Iota(n, a)) {
            summands.push((Guard::In(Name(a), Name(n)), sub(sys, t, done)));
        }
    }
    for a in 0..n {
        for b in 0..n {
            for &t in sys.row(s, ObjC::Out(n, a, b)) {
                summands.push((Guard::Out(Name(a), Name(b)), sub(sys, t, done)));
            }
        }
    }
    Process::Sum(summands)
}
