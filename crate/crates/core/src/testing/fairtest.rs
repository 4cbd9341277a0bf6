//! Battery-based testing comparison: explore both composites per test,
//! decide pole membership, report the first disagreement.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::pi::{Guard, Name, Process};

use super::{explore, pole_membership, ExplorationBudget, Pole, Stopwatch, TestingLts};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CompareOutcome {
    Same,
    /// Index of the separating test; `left_passes` tells which side
    /// satisfied the pole.
    Differ { test: usize, left_passes: bool },
    Inconclusive,
}

/// All guard sequences of length <= depth over the channel set, each capped
/// by one tick: the generated test battery. Guards range over the silent
/// step, inputs and outputs on the given channels.
pub fn auto_battery(gamma: &BTreeSet<Name>, depth: usize) -> Vec<Process> {
    let binder = Name(gamma.iter().next_back().map(|n| n.0 + 1).unwrap_or(0));
    let mut guards: Vec<Guard> = alloc::vec![Guard::Tau];
    for &a in gamma {
        guards.push(Guard::In(a, binder));
    }
    for &a in gamma {
        for &b in gamma {
            guards.push(Guard::Out(a, b));
        }
    }
    let tick_end = Process::Sum(alloc::vec![(Guard::Tick, Process::nil())]);
    let mut layer = alloc::vec![tick_end];
    let mut out = layer.clone();
    for _ in 0..depth {
        let mut next = Vec::new();
        for g in &guards {
            for t in &layer {
                next.push(Process::Sum(alloc::vec![(g.clone(), t.clone())]));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Compare two states against a battery of tests under a pole.
pub fn fair_testing_compare<S: TestingLts>(
    sys: &S,
    left: &S::State,
    right: &S::State,
    tests: &[S::State],
    pole: Pole,
    budget: &ExplorationBudget,
    watch: Option<&dyn Stopwatch>,
) -> CompareOutcome {
    let mut inconclusive = false;
    for (i, t) in tests.iter().enumerate() {
        let (Some(l), Some(r)) = (sys.par(left, t), sys.par(right, t)) else {
            inconclusive = true;
            continue;
        };
        let gl = explore(sys, &l, budget, watch);
        let gr = explore(sys, &r, budget, watch);
        let vl = pole_membership(&gl, gl.root, pole);
        let vr = pole_membership(&gr, gr.root, pole);
        match (vl.holds(), vr.holds()) {
            _ if matches!(vl, super::PoleVerdict::Inconclusive)
                || matches!(vr, super::PoleVerdict::Inconclusive) =>
            {
                inconclusive = true;
            }
            (true, false) => return CompareOutcome::Differ { test: i, left_passes: true },
            (false, true) => return CompareOutcome::Differ { test: i, left_passes: false },
            _ => {}
        }
    }
    if inconclusive {
        CompareOutcome::Inconclusive
    } else {
        CompareOutcome::Same
    }
}
