//! Bisimulation checks: partition refinement on saturated graphs for weak
//! bisimilarity, and the depth-bounded expansion game between the chemical
//! machine and mixed behaviours.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::behaviour::{BehaviourSystem, MixedBehaviour};
use crate::pi::{canonical_key, conf_transitions, Configuration, DefinitionEnv, SigmaLabel};

use super::lts::{m_transitions, mixed_key};
use super::LtsGraph;

/// Weak edges: silent closure and tick-in-silent-closure, as relations.
fn saturate(g: &LtsGraph) -> (Vec<BTreeSet<u32>>, Vec<BTreeSet<u32>>) {
    let n = g.vertex_count();
    let mut weak_silent: Vec<BTreeSet<u32>> = (0..n as u32).map(|v| [v].into()).collect();
    loop {
        let mut grew = false;
        for &(v, l, w) in &g.edges {
            if l != SigmaLabel::Silent {
                continue;
            }
            let add: Vec<u32> = weak_silent[w as usize].iter().copied().collect();
            for x in add {
                if weak_silent[v as usize].insert(x) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    let mut weak_tick: Vec<BTreeSet<u32>> = alloc::vec![BTreeSet::new(); n];
    for v in 0..n as u32 {
        for &x in weak_silent[v as usize].clone().iter() {
            for (l, y) in g.succ(x) {
                if l == SigmaLabel::Tick {
                    weak_tick[v as usize].extend(weak_silent[y as usize].iter().copied());
                }
            }
        }
    }
    (weak_silent, weak_tick)
}

fn refine(rel: &[Vec<BTreeSet<u32>>; 2], verts: usize) -> Vec<u32> {
    // rel[0] = weak silent successors, rel[1] = weak tick successors
    let mut block: Vec<u32> = alloc::vec![0; verts];
    loop {
        // signature: set of successor blocks per relation
        let mut sigs: BTreeMap<(u32, Vec<BTreeSet<u32>>), u32> = BTreeMap::new();
        let mut next: Vec<u32> = alloc::vec![0; verts];
        for v in 0..verts {
            let sig: Vec<BTreeSet<u32>> = rel
                .iter()
                .map(|r| r[v].iter().map(|&w| block[w as usize]).collect())
                .collect();
            let id = sigs.len() as u32;
            let entry = sigs.entry((block[v], sig)).or_insert(id);
            next[v] = *entry;
        }
        if next == block {
            return block;
        }
        block = next;
    }
}

/// Weak bisimilarity of two rooted complete graphs, by partition
/// refinement on the disjoint union's saturated relations.
pub fn weak_bisim_check(g1: &LtsGraph, v1: u32, g2: &LtsGraph, v2: u32) -> bool {
    assert!(g1.complete && g2.complete, "weak bisimulation needs complete graphs");
    let off = g1.vertex_count() as u32;
    let (s1, t1) = saturate(g1);
    let (s2, t2) = saturate(g2);
    let shift = |sets: Vec<BTreeSet<u32>>| -> Vec<BTreeSet<u32>> {
        sets.into_iter().map(|s| s.into_iter().map(|x| x + off).collect()).collect()
    };
    let mut silent = s1;
    silent.extend(shift(s2));
    let mut tick = t1;
    tick.extend(shift(t2));
    let verts = silent.len();
    let block = refine(&[silent, tick], verts);
    block[v1 as usize] == block[(off + v2) as usize]
}

/// Strong bisimilarity (single-step signatures) of two rooted graphs.
pub fn strong_bisim_check(g1: &LtsGraph, v1: u32, g2: &LtsGraph, v2: u32) -> bool {
    assert!(g1.complete && g2.complete, "strong bisimulation needs complete graphs");
    let off = g1.vertex_count() as u32;
    let n = g1.vertex_count() + g2.vertex_count();
    let succ = |v: u32, l: SigmaLabel| -> BTreeSet<u32> {
        if v < off {
            g1.succ(v).filter(|(l2, _)| *l2 == l).map(|(_, w)| w).collect()
        } else {
            g2.succ(v - off).filter(|(l2, _)| *l2 == l).map(|(_, w)| w + off).collect()
        }
    };
    let silent: Vec<BTreeSet<u32>> = (0..n as u32).map(|v| succ(v, SigmaLabel::Silent)).collect();
    let tick: Vec<BTreeSet<u32>> = (0..n as u32).map(|v| succ(v, SigmaLabel::Tick)).collect();
    let block = refine(&[silent, tick], n);
    block[v1 as usize] == block[(off + v2) as usize]
}

/// A play distinguishing the two sides, innermost step last.
pub type ExpansionWitness = Vec<String>;

const WEAK_SEARCH_CAP: usize = 4096;

/// Depth-bounded expansion game between a configuration and a mixed
/// behaviour: every machine step is answered by exactly one behaviour step
/// (possibly the identity for silent steps), every behaviour step by a weak
/// machine sequence.
pub fn expansion_check(
    c0: &Configuration,
    defs: &DefinitionEnv,
    m0: &MixedBehaviour,
    sys: &BehaviourSystem,
    depth: u32,
) -> Result<(), ExpansionWitness> {
    let mut memo = Memo::default();
    let mut trail = Vec::new();
    if game(c0, defs, m0, sys, depth, &mut memo, &mut trail) {
        Ok(())
    } else {
        trail.reverse();
        Err(trail)
    }
}

#[derive(Default)]
struct Memo {
    proven: BTreeMap<(String, String), u32>,
    refuted: BTreeMap<(String, String), u32>,
}

fn silent_closure(c: &Configuration, defs: &DefinitionEnv) -> Vec<Configuration> {
    let mut out: Vec<Configuration> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut queue = VecDeque::new();
    queue.push_back(c.clone());
    seen.insert(canonical_key(c));
    while let Some(x) = queue.pop_front() {
        out.push(x.clone());
        if out.len() >= WEAK_SEARCH_CAP {
            break;
        }
        for t in conf_transitions(&x, defs) {
            if t.label == SigmaLabel::Silent && seen.insert(canonical_key(&t.target)) {
                queue.push_back(t.target);
            }
        }
    }
    out
}

fn weak_successors(
    c: &Configuration,
    defs: &DefinitionEnv,
    label: SigmaLabel,
) -> Vec<Configuration> {
    let pre = silent_closure(c, defs);
    match label {
        SigmaLabel::Silent => pre,
        SigmaLabel::Tick => {
            let mut out = Vec::new();
            let mut seen = BTreeSet::new();
            for x in pre {
                for t in conf_transitions(&x, defs) {
                    if t.label == SigmaLabel::Tick {
                        for z in silent_closure(&t.target, defs) {
                            if seen.insert(canonical_key(&z)) {
                                out.push(z);
                            }
                        }
                    }
                }
            }
            out
        }
    }
}

fn game(
    c: &Configuration,
    defs: &DefinitionEnv,
    m: &MixedBehaviour,
    sys: &BehaviourSystem,
    k: u32,
    memo: &mut Memo,
    trail: &mut ExpansionWitness,
) -> bool {
    if k == 0 {
        return true;
    }
    let ck = canonical_key(c);
    let mk = mixed_key(m);
    let key = (ck, mk);
    if memo.proven.get(&key).is_some_and(|&kk| kk >= k) {
        return true;
    }
    if memo.refuted.get(&key).is_some_and(|&kk| kk <= k) {
        return false;
    }

    // (LH): machine steps answered by exactly one behaviour step
    for t in conf_transitions(c, defs) {
        let mut answers: Vec<MixedBehaviour> = Vec::new();
        if t.label == SigmaLabel::Silent {
            answers.push(m.clone()); // the identity edge
        }
        for (l, m2) in m_transitions(m, sys) {
            if l == t.label {
                answers.push(m2);
            }
        }
        let mark = trail.len();
        let mut matched = false;
        for m2 in answers {
            trail.truncate(mark);
            if game(&t.target, defs, &m2, sys, k - 1, memo, trail) {
                matched = true;
                trail.truncate(mark);
                break;
            }
        }
        if !matched {
            trail.push(format!(
                "machine step {:?} ({}) has no single-step behaviour answer at depth {k}",
                t.rule, t.label
            ));
            memo.refuted.insert(key, k);
            return false;
        }
    }

    // (RH): behaviour steps answered by weak machine sequences
    for (l, m2) in m_transitions(m, sys) {
        let mark = trail.len();
        let mut matched = false;
        for c2 in weak_successors(c, defs, l) {
            trail.truncate(mark);
            if game(&c2, defs, &m2, sys, k - 1, memo, trail) {
                matched = true;
                trail.truncate(mark);
                break;
            }
        }
        if !matched {
            trail.push(format!(
                "behaviour step ({l}) to {} has no weak machine answer at depth {k}",
                mixed_key(&m2)
            ));
            memo.refuted.insert(key, k);
            return false;
        }
    }

    memo.proven.insert(key, k);
    true
}
