//! The three transition systems: configurations (the chemical machine),
//! mixed behaviours (the syntactic flattening), and positioned behaviours
//! (closed-world actions with residuals).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::behaviour::{m_map, BehaviourSystem, MixedBehaviour, PositionedBehaviour};
use crate::pi::{
    canonical_key, conf_transitions, Configuration, DefinitionEnv, Name, SigmaLabel,
};
use crate::presheaf::{ElemId, ObjC};
use crate::trace::closed_world_actions_from;

use super::{LtsSystem, TestingLts};

/// Transitions of a mixed behaviour, per the flattened rules: fork split,
/// silent step, tick, channel creation with a canonical fresh name, and
/// input/output synchronisation; the frame is implicit in the indexing and
/// the identity rule is never enumerated.
type MixedEntry = (u32, crate::behaviour::StateId, Vec<Name>);

pub fn m_transitions(
    m: &MixedBehaviour,
    sys: &BehaviourSystem,
) -> Vec<(SigmaLabel, MixedBehaviour)> {
    let mut out = Vec::new();
    let replace = |m: &MixedBehaviour,
                   gamma_add: Option<Name>,
                   subs: &[(usize, Vec<MixedEntry>)]|
     -> MixedBehaviour {
        let mut gamma = m.gamma.clone();
        if let Some(a) = gamma_add {
            gamma.insert(a);
        }
        let mut procs = Vec::new();
        for (i, p) in m.procs.iter().enumerate() {
            match subs.iter().find(|(j, _)| *j == i) {
                Some((_, with)) => procs.extend(with.iter().cloned()),
                None => procs.push(p.clone()),
            }
        }
        MixedBehaviour { gamma, procs }
    };

    for (i, (n, d, sigma)) in m.procs.iter().enumerate() {
        let n = *n;
        // fork: the full product of the two branch rows
        for (li, &l) in sys.row(*d, ObjC::PiL(n)).iter().enumerate() {
            let _ = li;
            for &r in sys.row(*d, ObjC::PiR(n)) {
                out.push((
                    SigmaLabel::Silent,
                    replace(m, None, &[(i, alloc::vec![
                        (n, l, sigma.clone()),
                        (n, r, sigma.clone()),
                    ])]),
                ));
            }
        }
        for &t in sys.row(*d, ObjC::TauN(n)) {
            out.push((SigmaLabel::Silent, replace(m, None, &[(i, alloc::vec![(n, t, sigma.clone())])])));
        }
        for &t in sys.row(*d, ObjC::Tick(n)) {
            out.push((SigmaLabel::Tick, replace(m, None, &[(i, alloc::vec![(n, t, sigma.clone())])])));
        }
        for &t in sys.row(*d, ObjC::Nu(n)) {
            let a = m.fresh_channel();
            let mut sigma2 = sigma.clone();
            sigma2.push(a);
            out.push((SigmaLabel::Silent, replace(m, Some(a), &[(i, alloc::vec![(n + 1, t, sigma2)])])));
        }
    }

    // synchronisation between distinct entries
    for (i, (n1, d1, sigma1)) in m.procs.iter().enumerate() {
        for (j, (n2, d2, sigma2)) in m.procs.iter().enumerate() {
            if i == j {
                continue;
            }
            for a1 in 0..*n1 {
                let recv_row = sys.row(*d1, ObjC::Iota(*n1, a1)).to_vec();
                if recv_row.is_empty() {
                    continue;
                }
                for a2 in 0..*n2 {
                    for b2 in 0..*n2 {
                        if sigma1[a1 as usize] != sigma2[a2 as usize] {
                            continue;
                        }
                        for &ti in &recv_row {
                            for &tj in sys.row(*d2, ObjC::Out(*n2, a2, b2)) {
                                let mut sigma1x = sigma1.clone();
                                sigma1x.push(sigma2[b2 as usize]);
                                out.push((
                                    SigmaLabel::Silent,
                                    replace(m, None, &[
                                        (i, alloc::vec![(*n1 + 1, ti, sigma1x.clone())]),
                                        (j, alloc::vec![(*n2, tj, sigma2.clone())]),
                                    ]),
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Transitions of a positioned behaviour: every closed-world action from
/// its position, with every family of branch choices whose residuals exist.
///
/// Residuals are read off the action's slot bookkeeping directly; this is
/// the same computation as [`residual_along_action`] without re-deriving
/// views per branch choice.
pub fn s_transitions(
    pb: &PositionedBehaviour,
    sys: &BehaviourSystem,
) -> Vec<(SigmaLabel, PositionedBehaviour)> {
    let mut out = Vec::new();
    for action in closed_world_actions_from(&pb.pos) {
        let label = if action.is_tick() { SigmaLabel::Tick } else { SigmaLabel::Silent };
        // active final agents with their residual rows
        type ActiveRow = ((u32, ElemId), alloc::vec::Vec<crate::behaviour::StateId>);
        let mut active: Vec<ActiveRow> = Vec::new();
        let mut refused = false;
        for &(slot, y) in &action.slots.after {
            let b = action.basic_label(slot);
            let origin = action.origin_of(slot);
            let row = sys.row(pb.state_of(origin), b);
            if row.is_empty() {
                refused = true;
                break;
            }
            active.push(((y.arity, y.id), row.to_vec()));
        }
        if refused {
            continue;
        }
        // passive final agents keep their states
        let mut base: BTreeMap<(u32, ElemId), crate::behaviour::StateId> = BTreeMap::new();
        for (n, id) in action.cospan.final_.agents() {
            if !active.iter().any(|(a, _)| *a == (n, id)) {
                base.insert((n, id), pb.states[&(n, id)]);
            }
        }
        // cartesian product of branch choices
        let mut combos: Vec<BTreeMap<(u32, ElemId), crate::behaviour::StateId>> =
            alloc::vec![base];
        for (agent, row) in &active {
            let mut next = Vec::new();
            for combo in &combos {
                for &t in row {
                    let mut c2 = combo.clone();
                    c2.insert(*agent, t);
                    next.push(c2);
                }
            }
            combos = next;
        }
        for states in combos {
            out.push((
                label,
                PositionedBehaviour { pos: action.cospan.final_.clone(), states },
            ));
        }
    }
    out
}

/// Canonical form of a mixed behaviour: channels renamed by first use over
/// an exact search of pattern-tied entry orders.
pub fn canonicalize_mixed(m: &MixedBehaviour) -> (MixedBehaviour, BTreeMap<Name, Name>) {
    // pattern: (arity, state, local first-use of sigma)
    let pattern = |(n, s, sigma): &(u32, crate::behaviour::StateId, Vec<Name>)| -> Vec<u32> {
        let mut local: BTreeMap<Name, u32> = BTreeMap::new();
        let mut out = alloc::vec![*n, s.0];
        for &x in sigma {
            let next = local.len() as u32;
            out.push(*local.entry(x).or_insert(next));
        }
        out
    };
    let mut tagged: Vec<(Vec<u32>, usize)> =
        m.procs.iter().enumerate().map(|(i, p)| (pattern(p), i)).collect();
    tagged.sort();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, (pat, idx)) in tagged.iter().enumerate() {
        if i > 0 && *pat == tagged[i - 1].0 {
            groups.last_mut().expect("nonempty").push(*idx);
        } else {
            groups.push(alloc::vec![*idx]);
        }
    }

    struct Dfs<'a> {
        groups: &'a [Vec<usize>],
        procs: &'a [(u32, crate::behaviour::StateId, Vec<Name>)],
        best: Option<(Vec<u32>, Vec<usize>, BTreeMap<Name, u32>)>,
    }
    impl<'a> Dfs<'a> {
        fn encode(
            p: &(u32, crate::behaviour::StateId, Vec<Name>),
            asg: &mut BTreeMap<Name, u32>,
            out: &mut Vec<u32>,
        ) {
            out.push(p.0);
            out.push(p.1 .0);
            for &x in &p.2 {
                let next = asg.len() as u32;
                out.push(*asg.entry(x).or_insert(next));
            }
        }
        fn run(
            &mut self,
            g: usize,
            remaining: Vec<usize>,
            order: Vec<usize>,
            asg: BTreeMap<Name, u32>,
            stream: Vec<u32>,
        ) {
            if let Some((best, _, _)) = &self.best {
                if stream.as_slice() > &best[..stream.len().min(best.len())] {
                    return;
                }
            }
            if remaining.is_empty() {
                if g + 1 < self.groups.len() {
                    self.run(g + 1, self.groups[g + 1].clone(), order, asg, stream);
                } else if self.best.as_ref().is_none_or(|(b, _, _)| stream < *b) {
                    self.best = Some((stream, order, asg));
                }
                return;
            }
            for (k, &idx) in remaining.iter().enumerate() {
                let mut asg2 = asg.clone();
                let mut stream2 = stream.clone();
                Self::encode(&self.procs[idx], &mut asg2, &mut stream2);
                let mut rem2 = remaining.clone();
                rem2.remove(k);
                let mut order2 = order.clone();
                order2.push(idx);
                self.run(g, rem2, order2, asg2, stream2);
            }
        }
    }

    let (order, mut asg) = if groups.is_empty() {
        (Vec::new(), BTreeMap::new())
    } else {
        let mut dfs = Dfs { groups: &groups, procs: &m.procs, best: None };
        dfs.run(0, groups[0].clone(), Vec::new(), BTreeMap::new(), Vec::new());
        let (_, order, asg) = dfs.best.expect("dfs result");
        (order, asg)
    };
    for &nm in &m.gamma {
        let next = asg.len() as u32;
        asg.entry(nm).or_insert(next);
    }
    let renaming: BTreeMap<Name, Name> = asg.iter().map(|(&k, &v)| (k, Name(v))).collect();
    let gamma = (0..m.gamma.len() as u32).map(Name).collect();
    let procs = order
        .iter()
        .map(|&i| {
            let (n, s, sigma) = &m.procs[i];
            (*n, *s, sigma.iter().map(|x| renaming[x]).collect())
        })
        .collect();
    (MixedBehaviour { gamma, procs }, renaming)
}

pub fn mixed_key(m: &MixedBehaviour) -> String {
    use core::fmt::Write;
    let (canon, _) = canonicalize_mixed(m);
    let mut s = String::new();
    let _ = write!(s, "g{}", canon.gamma.len());
    for (n, st, sigma) in &canon.procs {
        let _ = write!(s, "|{n}:{}:", st.0);
        for x in sigma {
            let _ = write!(s, "{},", x.0);
        }
    }
    s
}

/// Canonical key of a positioned behaviour: the key of its flattening
/// (positions are isomorphic respecting states iff the flattenings agree).
pub fn positioned_key(pb: &PositionedBehaviour) -> String {
    mixed_key(&m_map(pb))
}

/// The chemical machine as a graph with testing.
pub struct ConfSystem<'d> {
    pub defs: &'d DefinitionEnv,
}

impl<'d> LtsSystem for ConfSystem<'d> {
    type State = Configuration;

    fn successors(&self, s: &Configuration) -> Vec<(SigmaLabel, Configuration)> {
        conf_transitions(s, self.defs).into_iter().map(|t| (t.label, t.target)).collect()
    }

    fn key(&self, s: &Configuration) -> String {
        canonical_key(s)
    }

    fn display(&self, s: &Configuration) -> String {
        crate::pi::print_config(s, &crate::pi::NameTable::new(), self.defs)
    }
}

impl<'d> TestingLts for ConfSystem<'d> {
    fn coh(&self, a: &Configuration, b: &Configuration) -> bool {
        a.gamma == b.gamma
    }

    fn par(&self, a: &Configuration, b: &Configuration) -> Option<Configuration> {
        if a.gamma != b.gamma {
            return None;
        }
        let mut procs = a.procs.clone();
        procs.extend(b.procs.iter().cloned());
        Some(Configuration::new(a.gamma.clone(), procs))
    }
}

/// Mixed behaviours over a fixed behaviour system.
pub struct MixedSystem<'s> {
    pub sys: &'s BehaviourSystem,
}

impl<'s> LtsSystem for MixedSystem<'s> {
    type State = MixedBehaviour;

    fn successors(&self, s: &MixedBehaviour) -> Vec<(SigmaLabel, MixedBehaviour)> {
        m_transitions(s, self.sys)
    }

    fn key(&self, s: &MixedBehaviour) -> String {
        mixed_key(s)
    }
}

impl<'s> TestingLts for MixedSystem<'s> {
    fn coh(&self, a: &MixedBehaviour, b: &MixedBehaviour) -> bool {
        a.gamma == b.gamma
    }

    fn par(&self, a: &MixedBehaviour, b: &MixedBehaviour) -> Option<MixedBehaviour> {
        if a.gamma != b.gamma {
            return None;
        }
        let mut procs = a.procs.clone();
        procs.extend(b.procs.iter().cloned());
        Some(MixedBehaviour { gamma: a.gamma.clone(), procs })
    }
}

/// Positioned behaviours over a fixed behaviour system.
pub struct SSystem<'s> {
    pub sys: &'s BehaviourSystem,
}

impl<'s> LtsSystem for SSystem<'s> {
    type State = PositionedBehaviour;

    fn successors(&self, s: &PositionedBehaviour) -> Vec<(SigmaLabel, PositionedBehaviour)> {
        s_transitions(s, self.sys)
    }

    fn key(&self, s: &PositionedBehaviour) -> String {
        positioned_key(s)
    }
}

impl<'s> TestingLts for SSystem<'s> {
    fn coh(&self, a: &PositionedBehaviour, b: &PositionedBehaviour) -> bool {
        a.pos.star() == b.pos.star()
    }

    /// Pushout over the shared interface, keeping the left position's ids;
    /// the right agents are relabelled fresh.
    fn par(
        &self,
        a: &PositionedBehaviour,
        b: &PositionedBehaviour,
    ) -> Option<PositionedBehaviour> {
        if a.pos.star() != b.pos.star() {
            return None;
        }
        let mut pos = a.pos.clone();
        let mut states = a.states.clone();
        let mut next: BTreeMap<u32, u32> = BTreeMap::new();
        for (n, id) in b.pos.agents() {
            let base = next.entry(n).or_insert_with(|| {
                let am = a.pos.max_id(ObjC::Agent(n)).map(|m| m + 1).unwrap_or(0);
                let bm = b.pos.max_id(ObjC::Agent(n)).map(|m| m + 1).unwrap_or(0);
                am.max(bm)
            });
            let fresh = ElemId(*base);
            *base += 1;
            pos.add_elem(ObjC::Agent(n), fresh);
            for (i, ch) in b.pos.agent_channels(n, id).into_iter().enumerate() {
                pos.set_act(ObjC::Agent(n), fresh, crate::presheaf::GenC::Si(i as u32), ch);
            }
            states.insert((n, fresh), b.states[&(n, id)]);
        }
        let _ = &pos;
        Some(PositionedBehaviour { pos, states })
    }
}

/// Position sanity for S states: no dangling channels in agent tuples.
pub fn positioned_ok(pb: &PositionedBehaviour) -> bool {
    pb.pos.is_position()
        && pb.pos.validate().is_ok()
        && pb
            .pos
            .agents()
            .into_iter()
            .all(|(n, id)| pb.states.contains_key(&(n, id)))
}
