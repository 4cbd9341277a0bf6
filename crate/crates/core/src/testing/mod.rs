//! Graphs with testing: exploration, poles, fair-testing comparison,
//! bisimulation and expansion checks, the S and M transition systems, and
//! the brute-force end-formula oracle for closed-world traces.

mod bisim;
mod fairtest;
mod lts;
mod oracle;
mod pole;


pub use bisim::{expansion_check, strong_bisim_check, weak_bisim_check, ExpansionWitness};
pub use fairtest::{auto_battery, fair_testing_compare, CompareOutcome};
pub use lts::{
    canonicalize_mixed, m_transitions, mixed_key, positioned_key, positioned_ok, s_transitions,
    ConfSystem, MixedSystem, SSystem,
};
pub use oracle::{accept_states, c_transition_exists, EndAnalysis, OracleError};
pub use pole::{pole_membership, Pole, PoleVerdict, PoleWitness};

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::pi::SigmaLabel;

/// Exploration limits. The time cap needs a clock, which `no_std` code
/// cannot supply by itself; pass a [`Stopwatch`] for wall-clock caps.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ExplorationBudget {
    pub max_states: usize,
    pub max_depth: usize,
}

impl Default for ExplorationBudget {
    fn default() -> Self {
        ExplorationBudget { max_states: 10_000, max_depth: 10_000 }
    }
}

/// Polled during exploration; `true` aborts with a truncated graph.
pub trait Stopwatch {
    fn expired(&self) -> bool;
}

/// A transition system with canonical state keys.
pub trait LtsSystem {
    type State: Clone;
    fn successors(&self, s: &Self::State) -> Vec<(SigmaLabel, Self::State)>;
    fn key(&self, s: &Self::State) -> String;
    fn display(&self, s: &Self::State) -> String {
        self.key(s)
    }
}

/// A finite explored fragment of an LTS. Edges point along transitions;
/// identity self-loops stay implicit.
#[derive(Clone, Debug)]
pub struct LtsGraph {
    pub keys: Vec<String>,
    pub display: Vec<String>,
    pub edges: BTreeSet<(u32, SigmaLabel, u32)>,
    pub root: u32,
    /// Whether every vertex was expanded within budget.
    pub complete: bool,
    pub states_expanded: usize,
}

impl LtsGraph {
    pub fn vertex_count(&self) -> usize {
        self.keys.len()
    }

    pub fn succ(&self, v: u32) -> impl Iterator<Item = (SigmaLabel, u32)> + '_ {
        self.edges
            .range((v, SigmaLabel::Tick, 0)..(v + 1, SigmaLabel::Tick, 0))
            .map(|&(_, l, w)| (l, w))
    }

    pub fn has_out_edge(&self, v: u32) -> bool {
        self.succ(v).next().is_some()
    }
}

/// Breadth-first exploration with canonicalised dedup. Deterministic:
/// vertex numbering follows discovery order.
pub fn explore<S: LtsSystem>(
    sys: &S,
    root: &S::State,
    budget: &ExplorationBudget,
    watch: Option<&dyn Stopwatch>,
) -> LtsGraph {
    let mut keys: Vec<String> = Vec::new();
    let mut display: Vec<String> = Vec::new();
    let mut index: BTreeMap<String, u32> = BTreeMap::new();
    let mut edges: BTreeSet<(u32, SigmaLabel, u32)> = BTreeSet::new();
    let mut frontier: Vec<(u32, S::State)> = Vec::new();
    let mut complete = true;

    let root_key = sys.key(root);
    keys.push(root_key.clone());
    display.push(sys.display(root));
    index.insert(root_key, 0);
    frontier.push((0, root.clone()));

    let mut depth = 0usize;
    let mut expanded = 0usize;
    while !frontier.is_empty() {
        if depth >= budget.max_depth {
            complete = false;
            break;
        }
        let mut next = Vec::new();
        for (v, state) in core::mem::take(&mut frontier) {
            if watch.is_some_and(|w| w.expired()) {
                complete = false;
                frontier.clear();
                next.clear();
                break;
            }
            expanded += 1;
            for (label, succ) in sys.successors(&state) {
                let k = sys.key(&succ);
                let w = match index.get(&k) {
                    Some(&w) => w,
                    None => {
                        if keys.len() >= budget.max_states {
                            complete = false;
                            continue;
                        }
                        let w = keys.len() as u32;
                        keys.push(k.clone());
                        display.push(sys.display(&succ));
                        index.insert(k, w);
                        next.push((w, succ));
                        w
                    }
                };
                edges.insert((v, label, w));
            }
        }
        frontier = next;
        depth += 1;
    }
    if !frontier.is_empty() {
        complete = false;
    }
    LtsGraph { keys, display, edges, root: 0, complete, states_expanded: expanded }
}

/// Parallel-composition structure on a system's states; the domain of `par`
/// is the equivalence `coh`.
pub trait TestingLts: LtsSystem {
    fn coh(&self, a: &Self::State, b: &Self::State) -> bool;
    fn par(&self, a: &Self::State, b: &Self::State) -> Option<Self::State>;
}
