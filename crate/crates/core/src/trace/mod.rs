//! Traces as cospans of presheaves: seeds, actions as pushouts of seeds,
//! composition by pushout, the correctness criterion, sequentialisation,
//! per-agent views, and enumeration of closed-world actions.
//!
//! Every cospan built by this module keeps its initial and final positions
//! as literal subpresheaves of the middle object, with identity-embedding
//! legs; [`check_trace`] does not rely on that invariant.

mod causal;
mod check;
mod enumerate;
mod seq;


pub use causal::{causal_graph, cores_of, CausalGraph, CgKind, Core};
pub use check::{check_trace, TraceViolation};
pub use enumerate::{action_at, closed_world_actions_from, sync_action_at};
pub use seq::{all_views, sequentialize, sequentialize_rev, view_of, ViewError};

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::presheaf::{
    pushout, representable, Elem, ElemId, GenC, ObjC, Presheaf, PshMap,
};

/// A trace presented as a cospan `final -> mid <- initial`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraceCospan {
    pub mid: Presheaf,
    pub initial: Presheaf,
    pub final_: Presheaf,
    /// Leg of the initial position.
    pub t: PshMap,
    /// Leg of the final position.
    pub s: PshMap,
    /// Cached decomposition, earliest action first.
    pub actions: Option<Vec<Action>>,
}

/// Identifies an agent by arity and id.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct AgentRef {
    pub arity: u32,
    pub id: ElemId,
}

impl AgentRef {
    pub fn elem(self) -> Elem {
        (ObjC::Agent(self.arity), self.id)
    }
}

/// Where an agent sits inside an action's seed.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Slot {
    Main,
    Left,
    Right,
    Sender,
    Receiver,
}

/// Concrete bookkeeping for one action inside its cospan's middle object.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Slots {
    pub core: Elem,
    pub before: Vec<(Slot, AgentRef)>,
    pub after: Vec<(Slot, AgentRef)>,
    pub created: Vec<ElemId>,
}

/// An action: a seed pushed along an attachment of its interface into an
/// ambient position.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Action {
    pub label: ObjC,
    /// The passive part of the initial position (construction record).
    pub ambient: Presheaf,
    /// Images of the seed's initial channels (ascending id order) in the
    /// ambient position (construction record).
    pub attach: Vec<ElemId>,
    pub cospan: TraceCospan,
    pub slots: Slots,
}

impl Action {
    /// Basic label seen by the agent in `slot`.
    pub fn basic_label(&self, slot: Slot) -> ObjC {
        match (self.label, slot) {
            (ObjC::Fork(n), Slot::Left) => ObjC::PiL(n),
            (ObjC::Fork(n), Slot::Right) => ObjC::PiR(n),
            (ObjC::Sync(n, a, _, _, _), Slot::Receiver) => ObjC::Iota(n, a),
            (ObjC::Sync(_, _, m, c, d), Slot::Sender) => ObjC::Out(m, c, d),
            (l, Slot::Main) => l,
            (l, s) => panic!("no {s:?} slot in {l}"),
        }
    }

    /// Before-agent feeding the given after-slot.
    pub fn origin_of(&self, slot: Slot) -> AgentRef {
        let want = match slot {
            Slot::Left | Slot::Right | Slot::Main => Slot::Main,
            Slot::Sender => Slot::Sender,
            Slot::Receiver => Slot::Receiver,
        };
        let key = if matches!(self.label, ObjC::Sync(..)) { want } else { Slot::Main };
        self.slots
            .before
            .iter()
            .find(|(s, _)| *s == key)
            .map(|(_, a)| *a)
            .expect("before slot")
    }

    pub fn is_tick(&self) -> bool {
        matches!(self.label, ObjC::Tick(_))
    }

    /// Relabel every element id through the given map.
    pub fn relabel(&self, map: &BTreeMap<Elem, ElemId>) -> Action {
        let tr = |e: Elem| -> ElemId { map.get(&e).copied().unwrap_or(e.1) };
        let slots = Slots {
            core: (self.slots.core.0, tr(self.slots.core)),
            before: self
                .slots
                .before
                .iter()
                .map(|&(s, a)| (s, AgentRef { arity: a.arity, id: tr(a.elem()) }))
                .collect(),
            after: self
                .slots
                .after
                .iter()
                .map(|&(s, a)| (s, AgentRef { arity: a.arity, id: tr(a.elem()) }))
                .collect(),
            created: self.slots.created.iter().map(|&c| tr((ObjC::Star, c))).collect(),
        };
        Action {
            label: self.label,
            ambient: self.ambient.relabel(map),
            attach: self.attach.iter().map(|&c| tr((ObjC::Star, c))).collect(),
            cospan: self.cospan.relabel(map),
            slots,
        }
    }
}

impl TraceCospan {
    /// The empty trace on a position.
    pub fn identity(pos: &Presheaf) -> TraceCospan {
        TraceCospan {
            mid: pos.clone(),
            initial: pos.clone(),
            final_: pos.clone(),
            t: PshMap::identity(pos),
            s: PshMap::identity(pos),
            actions: Some(Vec::new()),
        }
    }

    pub fn relabel(&self, map: &BTreeMap<Elem, ElemId>) -> TraceCospan {
        let tr_map = |m: &PshMap, dom: &Presheaf| {
            let mut out = PshMap::new();
            for e in dom.all_elems() {
                let v = m.get(e).expect("total leg");
                let newdom = map.get(&e).copied().unwrap_or(e.1);
                let newcod = map.get(&(e.0, v)).copied().unwrap_or(v);
                out.insert((e.0, newdom), newcod);
            }
            out
        };
        TraceCospan {
            mid: self.mid.relabel(map),
            initial: self.initial.relabel(map),
            final_: self.final_.relabel(map),
            t: tr_map(&self.t, &self.initial),
            s: tr_map(&self.s, &self.final_),
            actions: self
                .actions
                .as_ref()
                .map(|acts| acts.iter().map(|a| a.relabel(map)).collect()),
        }
    }
}

/// Elements of the representable over `shape`, split by role.
pub(crate) struct SeedAnatomy {
    pub rep: Presheaf,
    pub before: Vec<(Slot, AgentRef)>,
    pub after: Vec<(Slot, AgentRef)>,
    pub created: Vec<ElemId>,
}

pub(crate) fn seed_anatomy(shape: ObjC) -> SeedAnatomy {
    assert!(shape.is_seed_shape() && shape.is_well_indexed(), "not a seed shape: {shape}");
    let rep = representable(shape);
    let agent = |path: &[GenC]| -> AgentRef {
        let (c, id) = rep.act_path((shape, ElemId(0)), path).expect("seed path");
        match c {
            ObjC::Agent(n) => AgentRef { arity: n, id },
            _ => unreachable!(),
        }
    };
    let (before, after, created) = match shape {
        ObjC::PiL(_) | ObjC::PiR(_) | ObjC::TauN(_) | ObjC::Tick(_) | ObjC::Out(..) => (
            alloc::vec![(Slot::Main, agent(&[GenC::T]))],
            alloc::vec![(Slot::Main, agent(&[GenC::S]))],
            Vec::new(),
        ),
        ObjC::Nu(n) | ObjC::Iota(n, _) => (
            alloc::vec![(Slot::Main, agent(&[GenC::T]))],
            alloc::vec![(Slot::Main, agent(&[GenC::S]))],
            alloc::vec![rep
                .act_path((shape, ElemId(0)), &[GenC::S, GenC::Si(n)])
                .expect("created channel")
                .1],
        ),
        ObjC::Fork(_) => (
            alloc::vec![(Slot::Main, agent(&[GenC::L, GenC::T]))],
            alloc::vec![
                (Slot::Left, agent(&[GenC::L, GenC::S])),
                (Slot::Right, agent(&[GenC::R, GenC::S])),
            ],
            Vec::new(),
        ),
        ObjC::Sync(..) => (
            alloc::vec![
                (Slot::Receiver, agent(&[GenC::Rho, GenC::T])),
                (Slot::Sender, agent(&[GenC::Eps, GenC::T])),
            ],
            alloc::vec![
                (Slot::Receiver, agent(&[GenC::Rho, GenC::S])),
                (Slot::Sender, agent(&[GenC::Eps, GenC::S])),
            ],
            Vec::new(),
        ),
        _ => unreachable!(),
    };
    SeedAnatomy { rep, before, after, created }
}

fn boundary_positions(
    mid: &Presheaf,
    before: &[(Slot, AgentRef)],
    after: &[(Slot, AgentRef)],
    created: &[ElemId],
) -> (Presheaf, Presheaf) {
    use alloc::collections::BTreeSet;
    let mut init: BTreeSet<Elem> = BTreeSet::new();
    let mut fin: BTreeSet<Elem> = BTreeSet::new();
    for ch in mid.star() {
        if !created.contains(&ch) {
            init.insert((ObjC::Star, ch));
        }
        fin.insert((ObjC::Star, ch));
    }
    for (_, a) in before {
        init.insert(a.elem());
    }
    for (_, a) in after {
        fin.insert(a.elem());
    }
    (mid.restrict_to(&init), mid.restrict_to(&fin))
}

/// The seed cospan of a shape: the representable in the middle, its
/// boundary positions as legs.
pub fn seed_cospan(shape: ObjC) -> TraceCospan {
    seed_action(shape).cospan
}

/// The seed, packaged as an action over its own interface.
pub fn seed_action(shape: ObjC) -> Action {
    let SeedAnatomy { rep, before, after, created } = seed_anatomy(shape);
    let (initial, final_) = boundary_positions(&rep, &before, &after, &created);
    let (ambient, _) = initial.interface();
    let attach: Vec<ElemId> = ambient.star();
    let cospan = TraceCospan {
        t: PshMap::identity(&initial),
        s: PshMap::identity(&final_),
        mid: rep,
        initial,
        final_,
        actions: None,
    };
    let mut action = Action {
        label: shape,
        ambient,
        attach,
        cospan,
        slots: Slots { core: (shape, ElemId(0)), before, after, created },
    };
    action.cospan.actions = Some(alloc::vec![action.clone()]);
    action
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TraceError {
    BadAttachment,
    PositionMismatch,
    NotAPosition,
}

impl core::fmt::Display for TraceError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TraceError::BadAttachment => f.write_str("attachment does not match the seed interface"),
            TraceError::PositionMismatch => f.write_str("positions do not match for composition"),
            TraceError::NotAPosition => f.write_str("expected a position (dimension <= 1)"),
        }
    }
}

/// Push the seed of `shape` along `attach : interface -> ambient`.
///
/// `attach` lists, for each channel of the seed's initial position in
/// ascending id order, its image among the ambient's channels. The ambient's
/// ids survive into the result; the seed's elements are relabelled fresh.
pub fn instantiate_action(
    shape: ObjC,
    ambient: &Presheaf,
    attach: &[ElemId],
) -> Result<Action, TraceError> {
    if !ambient.is_position() {
        return Err(TraceError::NotAPosition);
    }
    let SeedAnatomy { rep, before, after, created } = seed_anatomy(shape);
    let (seed_initial, _) = boundary_positions(&rep, &before, &after, &created);
    let (iface, _) = seed_initial.interface();
    let iface_chans = iface.star();
    if attach.len() != iface_chans.len()
        || attach.iter().any(|c| !ambient.has_elem(ObjC::Star, *c))
    {
        return Err(TraceError::BadAttachment);
    }

    let mut f = PshMap::new(); // interface -> ambient
    let mut g = PshMap::new(); // interface -> rep
    for (&ch, &img) in iface_chans.iter().zip(attach.iter()) {
        f.insert((ObjC::Star, ch), img);
        g.insert((ObjC::Star, ch), ch);
    }
    let po = pushout(&iface, &f, ambient, &g, &rep);

    // boundary subpresheaves of the glued middle object
    let to_new = |a: &AgentRef, obj: ObjC| -> AgentRef {
        let id = po.right.get((obj, a.id)).expect("seed agent in pushout");
        AgentRef { arity: a.arity, id }
    };
    let before2: Vec<(Slot, AgentRef)> =
        before.iter().map(|&(s, a)| (s, to_new(&a, a.elem().0))).collect();
    let after2: Vec<(Slot, AgentRef)> =
        after.iter().map(|&(s, a)| (s, to_new(&a, a.elem().0))).collect();
    let created2: Vec<ElemId> =
        created.iter().map(|&c| po.right.get((ObjC::Star, c)).expect("created")).collect();
    let core2 = (shape, po.right.get((shape, ElemId(0))).expect("core"));

    use alloc::collections::BTreeSet;
    let mut init: BTreeSet<Elem> = BTreeSet::new();
    let mut fin: BTreeSet<Elem> = BTreeSet::new();
    for e in ambient.all_elems() {
        let v = (e.0, po.left.get(e).expect("ambient in pushout"));
        init.insert(v);
        fin.insert(v);
    }
    for ch in po.obj.star() {
        if !created2.contains(&ch) {
            init.insert((ObjC::Star, ch));
        }
        fin.insert((ObjC::Star, ch));
    }
    for (_, a) in &before2 {
        init.insert(a.elem());
    }
    for (_, a) in &after2 {
        fin.insert(a.elem());
    }
    let initial = po.obj.restrict_to(&init);
    let final_ = po.obj.restrict_to(&fin);
    let cospan = TraceCospan {
        t: PshMap::identity(&initial),
        s: PshMap::identity(&final_),
        mid: po.obj,
        initial,
        final_,
        actions: None,
    };
    let mut action = Action {
        label: shape,
        ambient: ambient.clone(),
        attach: attach.to_vec(),
        cospan,
        slots: Slots { core: core2, before: before2, after: after2, created: created2 },
    };
    action.cospan.actions = Some(alloc::vec![action.clone()]);
    Ok(action)
}

/// Compose `u` then `v`, gluing `v`'s initial position onto `u`'s final one
/// through `ident` (an isomorphism of positions). The middle objects are
/// pushed out over the shared position; `u`'s element ids survive.
pub fn compose_traces(
    u: &TraceCospan,
    v: &TraceCospan,
    ident: &PshMap,
) -> Result<TraceCospan, TraceError> {
    compose_traces_with(u, v, ident).map(|(t, _)| t)
}

/// Like [`compose_traces`], also returning how `v`'s elements were
/// relabelled into the composite.
pub fn compose_traces_with(
    u: &TraceCospan,
    v: &TraceCospan,
    ident: &PshMap,
) -> Result<(TraceCospan, BTreeMap<Elem, ElemId>), TraceError> {
    let objs: alloc::collections::BTreeSet<ObjC> =
        u.final_.objects().chain(v.initial.objects()).collect();
    if !ident.is_natural(&u.final_, &v.initial)
        || !objs.iter().all(|&c| ident.is_bijective_at(c, &u.final_, &v.initial))
    {
        return Err(TraceError::PositionMismatch);
    }
    // span: u.mid <-s- u.final -ident;t-> v.mid
    let f = u.s.clone();
    let g = ident.compose(&v.t);
    let po = pushout(&u.final_, &f, &u.mid, &g, &v.mid);

    let remap: BTreeMap<Elem, ElemId> = po.right.entries().collect();
    let v2 = v.relabel(&remap);

    let mut actions = None;
    if let (Some(au), Some(av)) = (&u.actions, &v2.actions) {
        let mut all = au.clone();
        all.extend(av.iter().cloned());
        actions = Some(all);
    }
    Ok((
        TraceCospan {
            mid: po.obj,
            initial: u.initial.clone(),
            final_: v2.final_.clone(),
            t: u.t.clone(),
            s: v2.s.clone(),
            actions,
        },
        remap,
    ))
}

/// Compose a contiguous action sequence (as produced by [`sequentialize`]
/// or chained enumeration, where each action's initial position literally
/// equals its predecessor's final one) back into a single trace.
pub fn compose_action_sequence(actions: &[Action]) -> Result<TraceCospan, TraceError> {
    let Some(first) = actions.first() else {
        return Err(TraceError::PositionMismatch);
    };
    let mut trace = TraceCospan::identity(&first.cospan.initial);
    // current composed id of each original element of the running final
    let mut fwd: BTreeMap<Elem, ElemId> =
        first.cospan.initial.all_elems().into_iter().map(|e| (e, e.1)).collect();
    for a in actions {
        let mut ident = PshMap::new();
        for e in a.cospan.initial.all_elems() {
            let cur = *fwd.get(&e).ok_or(TraceError::PositionMismatch)?;
            ident.insert((e.0, cur), e.1);
        }
        let (next, rmap) = compose_traces_with(&trace, &a.cospan, &ident)?;
        fwd = a
            .cospan
            .final_
            .all_elems()
            .into_iter()
            .map(|e| (e, rmap.get(&e).copied().unwrap_or(e.1)))
            .collect();
        trace = next;
    }
    Ok(trace)
}
