//! Enumeration of closed-world actions from a position, one representative
//! per isomorphism class: a silent/tick/fork/channel-creation action per
//! agent, and a synchronisation per ordered sender/receiver pair sharing
//! the subject channel. Each returned action has the given position,
//! literally, as its initial position.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::presheaf::{Elem, ElemId, ObjC, Presheaf};

use super::{instantiate_action, Action, AgentRef, Slot};

fn fresh_ids(mid: &Presheaf, pos: &Presheaf, obj: ObjC, k: usize) -> Vec<ElemId> {
    let base = mid
        .max_id(obj)
        .into_iter()
        .chain(pos.max_id(obj))
        .max()
        .map(|m| m + 1)
        .unwrap_or(0);
    (0..k as u32).map(|i| ElemId(base + i)).collect()
}

/// Relabel an instantiated action so its initial position is literally
/// `pos`: before-agents take the acting agents' original ids; after-agents
/// and created channels take deterministic fresh ids.
fn realign(action: Action, pos: &Presheaf, actors: &[(Slot, AgentRef)]) -> Action {
    let mut map: BTreeMap<Elem, ElemId> = BTreeMap::new();
    for (slot, actor) in actors {
        let cur = action
            .slots
            .before
            .iter()
            .find(|(s, _)| s == slot)
            .map(|(_, a)| *a)
            .expect("before slot");
        map.insert(cur.elem(), actor.id);
    }
    // group after-agents by arity so fresh ids never collide
    let mut by_arity: BTreeMap<u32, Vec<AgentRef>> = BTreeMap::new();
    for (_, a) in &action.slots.after {
        by_arity.entry(a.arity).or_default().push(*a);
    }
    for (arity, agents) in by_arity {
        let ids = fresh_ids(&action.cospan.mid, pos, ObjC::Agent(arity), agents.len());
        for (a, id) in agents.into_iter().zip(ids) {
            map.insert(a.elem(), id);
        }
    }
    let created_ids =
        fresh_ids(&action.cospan.mid, pos, ObjC::Star, action.slots.created.len());
    for (&ch, id) in action.slots.created.iter().zip(created_ids) {
        map.insert((ObjC::Star, ch), id);
    }
    let out = action.relabel(&map);
    debug_assert_eq!(out.cospan.initial, *pos, "realigned action starts at the position");
    out
}

/// A single-agent action shape performed by `actor`, with the rest of the
/// position passive and the result starting at `pos` literally.
pub fn action_at(pos: &Presheaf, shape: ObjC, actor: AgentRef) -> Result<Action, super::TraceError> {
    if shape.arity() != Some(actor.arity) || matches!(shape, ObjC::Sync(..)) {
        return Err(super::TraceError::BadAttachment);
    }
    let chans = pos.agent_channels(actor.arity, actor.id);
    let mut ambient = pos.clone();
    ambient.remove_elem(ObjC::Agent(actor.arity), actor.id);
    let action = instantiate_action(shape, &ambient, &chans)?;
    Ok(realign(action, pos, &[(Slot::Main, actor)]))
}

/// A synchronisation between two distinct agents of `pos`; the shape's
/// indices must match the agents' shared channel.
pub fn sync_action_at(
    pos: &Presheaf,
    shape: ObjC,
    sender: AgentRef,
    receiver: AgentRef,
) -> Result<Action, super::TraceError> {
    let ObjC::Sync(n, a, m, c, _) = shape else {
        return Err(super::TraceError::BadAttachment);
    };
    if sender.arity != m || receiver.arity != n || sender.elem() == receiver.elem() {
        return Err(super::TraceError::BadAttachment);
    }
    let sch = pos.agent_channels(m, sender.id);
    let rch = pos.agent_channels(n, receiver.id);
    if sch[c as usize] != rch[a as usize] {
        return Err(super::TraceError::BadAttachment);
    }
    let mut ambient = pos.clone();
    ambient.remove_elem(ObjC::Agent(m), sender.id);
    ambient.remove_elem(ObjC::Agent(n), receiver.id);
    // interface order: the sender's channels, then the receiver's in index
    // order minus the shared one
    let mut attach = sch.clone();
    for i in 0..n {
        if i != a {
            attach.push(rch[i as usize]);
        }
    }
    let action = instantiate_action(shape, &ambient, &attach)?;
    Ok(realign(action, pos, &[(Slot::Sender, sender), (Slot::Receiver, receiver)]))
}

/// All closed-world actions out of `pos`, up to isomorphism over it.
pub fn closed_world_actions_from(pos: &Presheaf) -> Vec<Action> {
    assert!(pos.is_position());
    let agents = pos.agents();
    let mut out = Vec::new();

    for &(n, id) in &agents {
        let actor = AgentRef { arity: n, id };
        for shape in [ObjC::TauN(n), ObjC::Tick(n), ObjC::Fork(n), ObjC::Nu(n)] {
            out.push(action_at(pos, shape, actor).expect("per-agent seed attaches"));
        }
    }

    for &(m, sid) in &agents {
        let sch = pos.agent_channels(m, sid);
        for &(n, rid) in &agents {
            if (m, sid) == (n, rid) {
                continue;
            }
            let rch = pos.agent_channels(n, rid);
            for c in 0..m {
                for d in 0..m {
                    for a in 0..n {
                        if sch[c as usize] != rch[a as usize] {
                            continue;
                        }
                        let shape = ObjC::Sync(n, a, m, c, d);
                        let sender = AgentRef { arity: m, id: sid };
                        let receiver = AgentRef { arity: n, id: rid };
                        out.push(
                            sync_action_at(pos, shape, sender, receiver)
                                .expect("sync seed attaches"),
                        );
                    }
                }
            }
        }
    }
    out
}
