//! Poles: bisimilarity-stable success predicates on explored graphs.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::pi::SigmaLabel;

use super::LtsGraph;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Pole {
    /// Every silently reachable state can still silently reach a tick.
    Fair,
    /// Some silent path reaches a tick.
    May,
    /// No silent divergence and no tick-free dead end.
    Must,
    /// After any path whatsoever, a tick remains reachable.
    ForallReach,
}

impl core::fmt::Display for Pole {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Pole::Fair => f.write_str("fair"),
            Pole::May => f.write_str("may"),
            Pole::Must => f.write_str("must"),
            Pole::ForallReach => f.write_str("forallreach"),
        }
    }
}

impl core::str::FromStr for Pole {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "fair" => Ok(Pole::Fair),
            "may" => Ok(Pole::May),
            "must" => Ok(Pole::Must),
            "forallreach" => Ok(Pole::ForallReach),
            _ => Err(()),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PoleWitness {
    /// Labels along a path from the probed vertex to the offending vertex.
    pub path: Vec<SigmaLabel>,
    pub vertex: u32,
    pub note: String,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PoleVerdict {
    Holds,
    Fails(PoleWitness),
    /// The graph was truncated; no verdict on incomplete evidence.
    Inconclusive,
}

impl PoleVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, PoleVerdict::Holds)
    }
}

/// Vertices with a path of silent edges ending in one tick edge.
fn good_set(g: &LtsGraph) -> BTreeSet<u32> {
    let mut good: BTreeSet<u32> = g
        .edges
        .iter()
        .filter(|(_, l, _)| *l == SigmaLabel::Tick)
        .map(|&(v, _, _)| v)
        .collect();
    // backward closure over silent edges
    loop {
        let mut grew = false;
        for &(v, l, w) in &g.edges {
            if l == SigmaLabel::Silent && good.contains(&w) && good.insert(v) {
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    good
}

fn reachable(g: &LtsGraph, from: u32, silent_only: bool) -> BTreeSet<u32> {
    let mut seen = BTreeSet::new();
    let mut stack = alloc::vec![from];
    while let Some(v) = stack.pop() {
        if !seen.insert(v) {
            continue;
        }
        for (l, w) in g.succ(v) {
            if !silent_only || l == SigmaLabel::Silent {
                stack.push(w);
            }
        }
    }
    seen
}

/// Shortest label path from `from` to `to`, restricted to `allowed`.
fn path_to(g: &LtsGraph, from: u32, to: u32, silent_only: bool) -> Vec<SigmaLabel> {
    use alloc::collections::BTreeMap;
    let mut parent: BTreeMap<u32, (u32, SigmaLabel)> = BTreeMap::new();
    let mut queue = alloc::collections::VecDeque::new();
    queue.push_back(from);
    let mut seen = BTreeSet::new();
    seen.insert(from);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for (l, w) in g.succ(v) {
            if silent_only && l != SigmaLabel::Silent {
                continue;
            }
            if seen.insert(w) {
                parent.insert(w, (v, l));
                queue.push_back(w);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = to;
    while cur != from {
        match parent.get(&cur) {
            Some(&(p, l)) => {
                path.push(l);
                cur = p;
            }
            None => break,
        }
    }
    path.reverse();
    path
}

/// Membership of vertex `v` in the pole, on a complete graph; truncated
/// graphs yield `Inconclusive`.
pub fn pole_membership(g: &LtsGraph, v: u32, pole: Pole) -> PoleVerdict {
    if !g.complete {
        return PoleVerdict::Inconclusive;
    }
    let good = good_set(g);
    match pole {
        Pole::Fair => {
            for x in reachable(g, v, true) {
                if !good.contains(&x) {
                    return PoleVerdict::Fails(PoleWitness {
                        path: path_to(g, v, x, true),
                        vertex: x,
                        note: String::from("silently reachable state cannot tick any more"),
                    });
                }
            }
            PoleVerdict::Holds
        }
        Pole::May => {
            if good.contains(&v) {
                PoleVerdict::Holds
            } else {
                PoleVerdict::Fails(PoleWitness {
                    path: Vec::new(),
                    vertex: v,
                    note: String::from("no silent path reaches a tick"),
                })
            }
        }
        Pole::Must => {
            let region = reachable(g, v, true);
            // silent cycle inside the region
            if let Some(start) = find_silent_cycle(g, &region) {
                return PoleVerdict::Fails(PoleWitness {
                    path: path_to(g, v, start, true),
                    vertex: start,
                    note: String::from("silent cycle: a maximal run avoids ticking"),
                });
            }
            for &x in &region {
                if !g.has_out_edge(x) {
                    return PoleVerdict::Fails(PoleWitness {
                        path: path_to(g, v, x, true),
                        vertex: x,
                        note: String::from("tick-free dead end"),
                    });
                }
            }
            PoleVerdict::Holds
        }
        Pole::ForallReach => {
            for x in reachable(g, v, false) {
                if !good.contains(&x) {
                    return PoleVerdict::Fails(PoleWitness {
                        path: path_to(g, v, x, false),
                        vertex: x,
                        note: String::from("reachable state cannot tick any more"),
                    });
                }
            }
            PoleVerdict::Holds
        }
    }
}

/// Some vertex on a silent cycle within `region`, if any.
fn find_silent_cycle(g: &LtsGraph, region: &BTreeSet<u32>) -> Option<u32> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }
    use alloc::collections::BTreeMap;
    let mut mark: BTreeMap<u32, Mark> = region.iter().map(|&v| (v, Mark::White)).collect();
    for &start in region {
        if mark[&start] != Mark::White {
            continue;
        }
        let mut stack = alloc::vec![(start, false)];
        while let Some((v, done)) = stack.pop() {
            if done {
                mark.insert(v, Mark::Black);
                continue;
            }
            if mark[&v] == Mark::Black {
                continue;
            }
            mark.insert(v, Mark::Grey);
            stack.push((v, true));
            for (l, w) in g.succ(v) {
                if l != SigmaLabel::Silent || !region.contains(&w) {
                    continue;
                }
                match mark[&w] {
                    Mark::White => stack.push((w, false)),
                    Mark::Grey => return Some(w),
                    Mark::Black => {}
                }
            }
        }
    }
    None
}
