//! Brute-force realisation of the end formula on closed-world traces.
//!
//! A global state over a trace is a compatible family of local states: one
//! unfolding path of the behaviour per view occurrence, agreeing on shared
//! prefixes. Because views are words and threads form a forest (one
//! backward path per agent, by target-linearity), a family is determined by
//! its value at the final agents plus prefix agreement at meeting points.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::behaviour::{behaviour_eq, BehaviourSystem, PositionedBehaviour, StateId};
use crate::presheaf::{Elem, ElemId, ObjC};
use crate::trace::{sequentialize, AgentRef, TraceCospan, TraceViolation};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OracleError {
    /// Desk-scale cap: at most 3 actions and 3 initial agents.
    ScaleCap,
    NotClosedWorld,
    PositionMismatch,
    Trace(TraceViolation),
}

impl core::fmt::Display for OracleError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OracleError::ScaleCap => f.write_str("trace too large for the oracle"),
            OracleError::NotClosedWorld => f.write_str("trace is not closed-world"),
            OracleError::PositionMismatch => f.write_str("trace does not start at the position"),
            OracleError::Trace(v) => write!(f, "{v}"),
        }
    }
}

/// One accepted global state: the choice path of every final agent, plus
/// the reached state it induces.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AcceptState {
    /// psi of the state: per final agent, the choice at each letter of its
    /// view word.
    pub choices: BTreeMap<(u32, ElemId), Vec<usize>>,
    pub reached: BTreeMap<(u32, ElemId), StateId>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EndAnalysis {
    pub states: Vec<AcceptState>,
    /// Per-final-agent count of unfolding paths; the product is the size of
    /// the codomain of psi.
    pub path_counts: BTreeMap<(u32, ElemId), usize>,
}

impl EndAnalysis {
    pub fn psi_codomain_size(&self) -> usize {
        self.path_counts.values().product()
    }

    /// psi is injective iff no two accepted states project to the same
    /// choice family; with this representation that is a set-ness check.
    pub fn psi_injective(&self) -> bool {
        for i in 0..self.states.len() {
            for j in i + 1..self.states.len() {
                if self.states[i].choices == self.states[j].choices {
                    return false;
                }
            }
        }
        true
    }
}

struct Thread {
    agent: (u32, ElemId),
    /// Backward chain of middle-object agent elements, origin first.
    chain: Vec<Elem>,
    word: Vec<ObjC>,
    origin: AgentRef,
}

fn threads(w: &TraceCospan) -> Result<Vec<Thread>, OracleError> {
    let actions = sequentialize(w).map_err(OracleError::Trace)?;
    if actions.iter().any(|a| !a.label.is_closed_world()) {
        return Err(OracleError::NotClosedWorld);
    }
    let mut out = Vec::new();
    for (n, id) in w.final_.agents() {
        let mut cur = w.s.apply((ObjC::Agent(n), id));
        let mut chain = alloc::vec![cur];
        let mut word = Vec::new();
        for a in actions.iter().rev() {
            if let Some(&(slot, _)) = a.slots.after.iter().find(|(_, ag)| ag.elem() == cur) {
                word.push(a.basic_label(slot));
                cur = a.origin_of(slot).elem();
                chain.push(cur);
            }
        }
        chain.reverse();
        word.reverse();
        // identify the initial-position agent
        let mut origin = None;
        for e in w.initial.all_elems() {
            if w.t.apply(e) == cur {
                if let ObjC::Agent(m) = e.0 {
                    origin = Some(AgentRef { arity: m, id: e.1 });
                }
            }
        }
        out.push(Thread {
            agent: (n, id),
            chain,
            word,
            origin: origin.ok_or(OracleError::PositionMismatch)?,
        });
    }
    Ok(out)
}

/// All unfolding paths of `state` along `word`.
fn paths(sys: &BehaviourSystem, state: StateId, word: &[ObjC]) -> Vec<Vec<usize>> {
    match word.split_first() {
        None => alloc::vec![Vec::new()],
        Some((b, rest)) => {
            let mut out = Vec::new();
            for (k, &t) in sys.row(state, *b).iter().enumerate() {
                for mut p in paths(sys, t, rest) {
                    p.insert(0, k);
                    out.push(p);
                }
            }
            out
        }
    }
}

fn follow(sys: &BehaviourSystem, state: StateId, word: &[ObjC], path: &[usize]) -> StateId {
    let mut s = state;
    for (b, &k) in word.iter().zip(path.iter()) {
        s = sys.restrict(s, *b, k).expect("valid path");
    }
    s
}

/// Enumerate the accepted global states of `pb` over the closed-world
/// trace `w` (which must start at `pb.pos`, literally).
pub fn accept_states(
    pb: &PositionedBehaviour,
    w: &TraceCospan,
    sys: &BehaviourSystem,
) -> Result<EndAnalysis, OracleError> {
    let n_actions = crate::trace::check_trace(w).map_err(OracleError::Trace)?;
    if n_actions > 3 || pb.pos.agents().len() > 3 {
        return Err(OracleError::ScaleCap);
    }
    if w.initial != pb.pos {
        return Err(OracleError::PositionMismatch);
    }
    let threads = threads(w)?;
    let per_thread: Vec<Vec<Vec<usize>>> = threads
        .iter()
        .map(|th| paths(sys, pb.state_of(th.origin), &th.word))
        .collect();
    let path_counts: BTreeMap<(u32, ElemId), usize> =
        threads.iter().zip(per_thread.iter()).map(|(t, p)| (t.agent, p.len())).collect();

    // shared-prefix length of two threads: the longest common chain prefix
    let lca = |a: &Thread, b: &Thread| -> usize {
        let mut d = 0;
        while d < a.chain.len() && d < b.chain.len() && a.chain[d] == b.chain[d] {
            d += 1;
        }
        d.saturating_sub(1) // chain has word.len()+1 entries
    };

    let mut states = Vec::new();
    if per_thread.iter().any(Vec::is_empty) {
        return Ok(EndAnalysis { states, path_counts });
    }
    let mut pick = alloc::vec![0usize; threads.len()];
    'outer: loop {
        // compatibility: choices agree up to the meeting depth
        let mut ok = true;
        'pairs: for i in 0..threads.len() {
            for j in i + 1..threads.len() {
                if threads[i].origin != threads[j].origin {
                    continue;
                }
                let d = lca(&threads[i], &threads[j]);
                let pi = &per_thread[i][pick[i]];
                let pj = &per_thread[j][pick[j]];
                if pi[..d] != pj[..d] {
                    ok = false;
                    break 'pairs;
                }
            }
        }
        if ok {
            let choices: BTreeMap<(u32, ElemId), Vec<usize>> = threads
                .iter()
                .zip(pick.iter())
                .map(|(t, &k)| (t.agent, per_thread_path(&per_thread, &threads, t.agent, k)))
                .collect();
            let reached: BTreeMap<(u32, ElemId), StateId> = threads
                .iter()
                .zip(pick.iter())
                .map(|(t, &k)| {
                    let p = &per_thread[index_of(&threads, t.agent)][k];
                    (t.agent, follow(sys, pb.state_of(t.origin), &t.word, p))
                })
                .collect();
            states.push(AcceptState { choices, reached });
        }
        // next combination
        for i in 0..threads.len() {
            pick[i] += 1;
            if pick[i] < per_thread[i].len() {
                continue 'outer;
            }
            pick[i] = 0;
        }
        break;
    }
    Ok(EndAnalysis { states, path_counts })
}

fn index_of(threads: &[Thread], agent: (u32, ElemId)) -> usize {
    threads.iter().position(|t| t.agent == agent).expect("thread")
}

fn per_thread_path(
    per_thread: &[Vec<Vec<usize>>],
    threads: &[Thread],
    agent: (u32, ElemId),
    k: usize,
) -> Vec<usize> {
    per_thread[index_of(threads, agent)][k].clone()
}

/// Is there a global state over `w` whose restriction is `pb2`?
pub fn c_transition_exists(
    pb: &PositionedBehaviour,
    w: &TraceCospan,
    pb2: &PositionedBehaviour,
    sys: &BehaviourSystem,
) -> Result<bool, OracleError> {
    if pb2.pos != w.final_ {
        return Err(OracleError::PositionMismatch);
    }
    let analysis = accept_states(pb, w, sys)?;
    let depth = sys.len() as u32 + 1;
    for st in &analysis.states {
        let all = st
            .reached
            .iter()
            .all(|(agent, &s)| behaviour_eq(sys, s, sys, pb2.states[agent], depth));
        if all {
            return Ok(true);
        }
    }
    Ok(false)
}
