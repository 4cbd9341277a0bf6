//! Positioned and mixed behaviours, the flattening `m` and its section,
//! the configuration translation, and residuals along closed-world actions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::pi::{Configuration, Name};
use crate::presheaf::{ElemId, Presheaf, PositionBuilder};
use crate::trace::{view_of, Action, AgentRef};

use super::{BehaviourSystem, ChanMap, StateId, TranslateError, Translator};

/// A position together with a definite state per agent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PositionedBehaviour {
    pub pos: Presheaf,
    pub states: BTreeMap<(u32, ElemId), StateId>,
}

impl PositionedBehaviour {
    pub fn state_of(&self, a: AgentRef) -> StateId {
        self.states[&(a.arity, a.id)]
    }
}

/// A channel set plus a multiset of substitution-wired states. The entry
/// order of `procs` carries no meaning.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MixedBehaviour {
    pub gamma: BTreeSet<Name>,
    pub procs: Vec<(u32, StateId, Vec<Name>)>,
}

impl MixedBehaviour {
    pub fn same_state(&self, other: &MixedBehaviour) -> bool {
        if self.gamma != other.gamma || self.procs.len() != other.procs.len() {
            return false;
        }
        let mut a = self.procs.clone();
        let mut b = other.procs.clone();
        a.sort();
        b.sort();
        a == b
    }

    pub fn fresh_channel(&self) -> Name {
        let mut k = 0u32;
        while self.gamma.contains(&Name(k)) {
            k += 1;
        }
        Name(k)
    }
}

/// Flatten: channels become the names, each agent contributes its state
/// wired by its channel tuple.
pub fn m_map(pb: &PositionedBehaviour) -> MixedBehaviour {
    let gamma: BTreeSet<Name> = pb.pos.star().into_iter().map(|e| Name(e.0)).collect();
    let procs = pb
        .pos
        .agents()
        .into_iter()
        .map(|(n, id)| {
            let sigma: Vec<Name> =
                pb.pos.agent_channels(n, id).into_iter().map(|e| Name(e.0)).collect();
            (n, pb.states[&(n, id)], sigma)
        })
        .collect();
    MixedBehaviour { gamma, procs }
}

/// A section of `m_map`: channels become elements named by the names, one
/// agent per entry. `m_map(a_section(m)) == m` holds exactly.
pub fn a_section(m: &MixedBehaviour) -> PositionedBehaviour {
    let mut b = PositionBuilder::new();
    for &n in &m.gamma {
        b.channel(ElemId(n.0));
    }
    let mut states = BTreeMap::new();
    for (i, (n, s, sigma)) in m.procs.iter().enumerate() {
        let chans: Vec<ElemId> = sigma.iter().map(|nm| ElemId(nm.0)).collect();
        b.agent(*n, ElemId(i as u32), &chans);
        states.insert((*n, ElemId(i as u32)), *s);
    }
    PositionedBehaviour { pos: b.build(), states }
}

/// The interpretation of a configuration as a positioned behaviour: one
/// agent of arity `|gamma|` per process, all wired by the canonical
/// ordering of the channel set.
pub fn translate_config_positioned(
    c: &Configuration,
    tr: &mut Translator,
) -> Result<PositionedBehaviour, TranslateError> {
    let h = ChanMap::sorted(&c.gamma);
    let mut b = PositionBuilder::new();
    for &n in &c.gamma {
        b.channel(ElemId(n.0));
    }
    let chans: Vec<ElemId> = c.gamma.iter().map(|n| ElemId(n.0)).collect();
    let mut states = BTreeMap::new();
    for (i, p) in c.procs.iter().enumerate() {
        let s = tr.translate(p, &h)?;
        b.agent(h.arity(), ElemId(i as u32), &chans);
        states.insert((h.arity(), ElemId(i as u32)), s);
    }
    Ok(PositionedBehaviour { pos: b.build(), states })
}

/// The composite translation `T = m . [[-]]`, concretely
/// `<gamma>[ [[P_i]]_{h} [h^{-1}] ]`.
pub fn translate_config(
    c: &Configuration,
    tr: &mut Translator,
) -> Result<MixedBehaviour, TranslateError> {
    let h = ChanMap::sorted(&c.gamma);
    let sigma = h.inverse_vec();
    let mut procs = Vec::new();
    for p in &c.procs {
        let s = tr.translate(p, &h)?;
        procs.push((h.arity(), s, sigma.clone()));
    }
    Ok(MixedBehaviour { gamma: c.gamma.clone(), procs })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ResidualError {
    PositionMismatch,
    /// Some required branch has an empty residual: the action is refused.
    Refused { agent: AgentRef },
    BadChoice { agent: AgentRef },
    View,
}

impl core::fmt::Display for ResidualError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ResidualError::PositionMismatch => f.write_str("action does not start at the position"),
            ResidualError::Refused { agent } => {
                write!(f, "action refused at agent {}#{}", agent.arity, agent.id)
            }
            ResidualError::BadChoice { agent } => {
                write!(f, "branch choice out of range at agent {}#{}", agent.arity, agent.id)
            }
            ResidualError::View => f.write_str("view computation failed"),
        }
    }
}

/// Residual of a positioned behaviour along a closed-world action: each
/// final agent restricts its origin's residual along its view with the
/// supplied branch choice; passive agents keep their state.
pub fn residual_along_action(
    pb: &PositionedBehaviour,
    action: &Action,
    sys: &BehaviourSystem,
    choices: &BTreeMap<(u32, ElemId), usize>,
) -> Result<PositionedBehaviour, ResidualError> {
    if action.cospan.initial != pb.pos {
        return Err(ResidualError::PositionMismatch);
    }
    let mut states = BTreeMap::new();
    for (n, id) in action.cospan.final_.agents() {
        let y = AgentRef { arity: n, id };
        let (word, origin) =
            view_of(&action.cospan, y).map_err(|_| ResidualError::View)?;
        match word.as_slice() {
            [] => {
                states.insert((n, id), pb.state_of(origin));
            }
            [label] => {
                let d = pb.state_of(origin);
                let row = sys.row(d, *label);
                if row.is_empty() {
                    return Err(ResidualError::Refused { agent: y });
                }
                let k = choices.get(&(n, id)).copied().unwrap_or(0);
                let s = sys
                    .restrict(d, *label, k)
                    .ok_or(ResidualError::BadChoice { agent: y })?;
                states.insert((n, id), s);
            }
            _ => return Err(ResidualError::View),
        }
    }
    Ok(PositionedBehaviour { pos: action.cospan.final_.clone(), states })
}
