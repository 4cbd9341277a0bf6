//! Cores and the causal graph of a middle object.
//!
//! Edges run from each core's sources (its after-agents) and created
//! channels into the core, and from the core into its targets (the
//! before-agents); every agent also points at its channels. A path between
//! cores thus leads from an action to the earlier actions enabling it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::presheaf::{Elem, ElemId, GenC, ObjC, Presheaf};

/// A maximal higher-dimensional element: the event of one action.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Core {
    pub elem: Elem,
    pub sources: Vec<Elem>,
    pub targets: Vec<Elem>,
    pub created: Vec<ElemId>,
}

/// Elements of dimension > 1 that are not the image of anything higher.
pub fn cores_of(u: &Presheaf) -> Vec<Core> {
    let mut shadowed: BTreeSet<Elem> = BTreeSet::new();
    for c in u.objects().collect::<Vec<_>>() {
        match c {
            ObjC::Fork(n) => {
                for x in u.elems_of(c) {
                    shadowed.insert((ObjC::PiL(n), u.act(c, x, GenC::L).expect("fork l")));
                    shadowed.insert((ObjC::PiR(n), u.act(c, x, GenC::R).expect("fork r")));
                }
            }
            ObjC::Sync(n, a, m, cc, d) => {
                for x in u.elems_of(c) {
                    shadowed.insert((ObjC::Iota(n, a), u.act(c, x, GenC::Rho).expect("sync rho")));
                    shadowed.insert((ObjC::Out(m, cc, d), u.act(c, x, GenC::Eps).expect("sync eps")));
                }
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    for c in u.objects().collect::<Vec<_>>() {
        if c.dimension() <= 1 {
            continue;
        }
        for x in u.elems_of(c) {
            if shadowed.contains(&(c, x)) {
                continue;
            }
            out.push(anatomize(u, (c, x)));
        }
    }
    // deterministic order: least element id first
    out.sort_by_key(|core| (core.elem.1, core.elem.0));
    out
}

fn agent_at(u: &Presheaf, e: Elem, path: &[GenC]) -> Elem {
    u.act_path(e, path).expect("core path")
}

fn anatomize(u: &Presheaf, e: Elem) -> Core {
    let (sources, targets, created) = match e.0 {
        ObjC::PiL(_) | ObjC::PiR(_) | ObjC::TauN(_) | ObjC::Tick(_) | ObjC::Out(..) => (
            alloc::vec![agent_at(u, e, &[GenC::S])],
            alloc::vec![agent_at(u, e, &[GenC::T])],
            Vec::new(),
        ),
        ObjC::Nu(n) | ObjC::Iota(n, _) => (
            alloc::vec![agent_at(u, e, &[GenC::S])],
            alloc::vec![agent_at(u, e, &[GenC::T])],
            alloc::vec![agent_at(u, e, &[GenC::S, GenC::Si(n)]).1],
        ),
        ObjC::Fork(_) => (
            alloc::vec![agent_at(u, e, &[GenC::L, GenC::S]), agent_at(u, e, &[GenC::R, GenC::S])],
            alloc::vec![agent_at(u, e, &[GenC::L, GenC::T])],
            Vec::new(),
        ),
        ObjC::Sync(..) => (
            alloc::vec![agent_at(u, e, &[GenC::Rho, GenC::S]), agent_at(u, e, &[GenC::Eps, GenC::S])],
            alloc::vec![agent_at(u, e, &[GenC::Rho, GenC::T]), agent_at(u, e, &[GenC::Eps, GenC::T])],
            Vec::new(),
        ),
        _ => panic!("not an action element"),
    };
    Core { elem: e, sources, targets, created }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum CgKind {
    Channel,
    Agent,
    Core,
}

/// The causal graph: channels, agents and cores with the enabling edges.
#[derive(Clone, Debug)]
pub struct CausalGraph {
    pub verts: Vec<(CgKind, Elem)>,
    pub edges: BTreeSet<(usize, usize)>,
    index: BTreeMap<Elem, usize>,
    pub cores: Vec<Core>,
}

impl CausalGraph {
    pub fn vertex(&self, e: Elem) -> Option<usize> {
        self.index.get(&e).copied()
    }

    pub fn succs(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.range((v, 0)..(v + 1, 0)).map(|&(_, w)| w)
    }

    /// Directed cycle, if any, as a vertex list.
    pub fn find_cycle(&self) -> Option<Vec<Elem>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            White,
            Grey,
            Black,
        }
        let n = self.verts.len();
        let mut mark = alloc::vec![Mark::White; n];
        let mut parent = alloc::vec![usize::MAX; n];
        for start in 0..n {
            if mark[start] != Mark::White {
                continue;
            }
            // iterative DFS
            let mut stack = alloc::vec![(start, false)];
            while let Some((v, done)) = stack.pop() {
                if done {
                    mark[v] = Mark::Black;
                    continue;
                }
                if mark[v] == Mark::Black {
                    continue;
                }
                mark[v] = Mark::Grey;
                stack.push((v, true));
                for w in self.succs(v) {
                    match mark[w] {
                        Mark::White => {
                            parent[w] = v;
                            stack.push((w, false));
                        }
                        Mark::Grey => {
                            // back edge v -> w: reconstruct the cycle
                            let mut cyc = alloc::vec![self.verts[w].1];
                            let mut cur = v;
                            while cur != w && cur != usize::MAX {
                                cyc.push(self.verts[cur].1);
                                cur = parent[cur];
                            }
                            cyc.reverse();
                            return Some(cyc);
                        }
                        Mark::Black => {}
                    }
                }
            }
        }
        None
    }

    /// Is there a path from `from` to some other core?
    pub fn reaches_other_core(&self, from: usize) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<usize> = self.succs(from).collect();
        while let Some(v) = stack.pop() {
            if !seen.insert(v) {
                continue;
            }
            if self.verts[v].0 == CgKind::Core && v != from {
                return true;
            }
            stack.extend(self.succs(v));
        }
        false
    }
}

pub fn causal_graph(u: &Presheaf) -> CausalGraph {
    let cores = cores_of(u);
    let mut verts: Vec<(CgKind, Elem)> = Vec::new();
    for ch in u.star() {
        verts.push((CgKind::Channel, (ObjC::Star, ch)));
    }
    for (n, id) in u.agents() {
        verts.push((CgKind::Agent, (ObjC::Agent(n), id)));
    }
    for c in &cores {
        verts.push((CgKind::Core, c.elem));
    }
    let index: BTreeMap<Elem, usize> =
        verts.iter().enumerate().map(|(i, &(_, e))| (e, i)).collect();
    let mut edges = BTreeSet::new();
    for (n, id) in u.agents() {
        let a = index[&(ObjC::Agent(n), id)];
        for ch in u.agent_channels(n, id) {
            edges.insert((a, index[&(ObjC::Star, ch)]));
        }
    }
    for c in &cores {
        let k = index[&c.elem];
        for s in &c.sources {
            edges.insert((index[s], k));
        }
        for ch in &c.created {
            edges.insert((index[&(ObjC::Star, *ch)], k));
        }
        for t in &c.targets {
            edges.insert((k, index[t]));
        }
    }
    CausalGraph { verts, edges, index, cores }
}
