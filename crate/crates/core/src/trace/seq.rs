//! Sequentialisation: peel off a core with no causal path to any other
//! core (an action nothing depends on), split the middle object, recurse.
//! Views fold the decomposition backwards from a final agent.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::presheaf::{generator_source, generators_into, Elem, ElemId, ObjC, Presheaf, PshMap};

use super::causal::causal_graph;
use super::check::{check_trace, TraceViolation};
use super::{seed_anatomy, Action, AgentRef, Slots, TraceCospan};

/// Yoneda image of an element: every element of the representable mapped to
/// its image, walking generator paths from the top.
pub(crate) fn yoneda_image(u: &Presheaf, e: Elem) -> BTreeMap<Elem, Elem> {
    let rep = crate::presheaf::representable(e.0);
    let mut img: BTreeMap<Elem, Elem> = BTreeMap::new();
    img.insert((e.0, ElemId(0)), e);
    let mut queue = alloc::vec![(e.0, ElemId(0))];
    while let Some(x) = queue.pop() {
        let target = img[&x];
        for g in generators_into(x.0) {
            let src = generator_source(x.0, g).expect("typing");
            let sub = (src, rep.act(x.0, x.1, g).expect("representable total"));
            let tgt = (src, u.act(target.0, target.1, g).expect("total"));
            if img.insert(sub, tgt).is_none() {
                queue.push(sub);
            }
        }
    }
    img
}

/// Deterministic decomposition into actions, earliest first. The recomposed
/// pushout of the result is isomorphic to the input.
pub fn sequentialize(c: &TraceCospan) -> Result<Vec<Action>, TraceViolation> {
    sequentialize_with(c, false)
}

/// Same algorithm with the opposite tie-break among independent actions;
/// used to confirm order-irrelevance of remote actions.
pub fn sequentialize_rev(c: &TraceCospan) -> Result<Vec<Action>, TraceViolation> {
    sequentialize_with(c, true)
}

fn sequentialize_with(c: &TraceCospan, pick_greatest: bool) -> Result<Vec<Action>, TraceViolation> {
    let n = check_trace(c)?;
    let mut mid = c.mid.clone();
    let mut x_elems: BTreeSet<Elem> =
        c.initial.all_elems().into_iter().map(|e| c.t.apply(e)).collect();
    let mut actions = Vec::new();

    for _ in 0..n {
        let cg = causal_graph(&mid);
        let mut ready: Vec<Elem> = cg
            .cores
            .iter()
            .filter(|core| !cg.reaches_other_core(cg.vertex(core.elem).expect("core vertex")))
            .map(|core| core.elem)
            .collect();
        ready.sort_by_key(|e| (e.1, e.0));
        let pick = if pick_greatest { *ready.last().expect("ready core") } else { ready[0] };
        let core = cg.cores.iter().find(|c| c.elem == pick).expect("core").clone();

        let shape = core.elem.0;
        let anatomy = seed_anatomy(shape);
        let img = yoneda_image(&mid, core.elem);
        let to_mid = |a: &AgentRef| -> AgentRef {
            let e = img[&a.elem()];
            AgentRef { arity: a.arity, id: e.1 }
        };
        let slots = Slots {
            core: core.elem,
            before: anatomy.before.iter().map(|&(s, a)| (s, to_mid(&a))).collect(),
            after: anatomy.after.iter().map(|&(s, a)| (s, to_mid(&a))).collect(),
            created: anatomy.created.iter().map(|&ch| img[&(ObjC::Star, ch)].1).collect(),
        };

        let mut amb_elems = x_elems.clone();
        for (_, a) in &slots.before {
            amb_elems.remove(&a.elem());
        }
        let ambient = mid.restrict_to(&amb_elems);

        // attachment: the seed's initial channels, ascending, to their images
        let mut seed_init_channels: Vec<ElemId> = anatomy
            .rep
            .star()
            .into_iter()
            .filter(|ch| !anatomy.created.contains(ch))
            .collect();
        seed_init_channels.sort();
        let attach: Vec<ElemId> =
            seed_init_channels.iter().map(|&ch| img[&(ObjC::Star, ch)].1).collect();

        let mut y_elems = amb_elems.clone();
        for (_, a) in &slots.after {
            y_elems.insert(a.elem());
        }
        for &ch in &slots.created {
            y_elems.insert((ObjC::Star, ch));
        }

        let mut m_elems = amb_elems.clone();
        for tgt in img.values() {
            m_elems.insert(*tgt);
        }
        let act_mid = mid.restrict_to(&m_elems);
        let initial = mid.restrict_to(&x_elems);
        let final_ = mid.restrict_to(&y_elems);
        actions.push(Action {
            label: shape,
            ambient,
            attach,
            cospan: TraceCospan {
                t: PshMap::identity(&initial),
                s: PshMap::identity(&final_),
                mid: act_mid,
                initial,
                final_,
                actions: None,
            },
            slots: slots.clone(),
        });

        // drop the past: the before-agents and the action elements
        for (src, tgt) in &img {
            if src.0.dimension() >= 2 {
                mid.remove_elem(tgt.0, tgt.1);
            }
        }
        for (_, a) in &slots.before {
            mid.remove_elem(ObjC::Agent(a.arity), a.id);
        }
        x_elems = y_elems;
    }

    debug_assert_eq!(
        x_elems,
        c.final_.all_elems().into_iter().map(|e| c.s.apply(e)).collect::<BTreeSet<_>>()
    );
    Ok(actions)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ViewError {
    NotFinalAgent,
    Trace(TraceViolation),
}

impl core::fmt::Display for ViewError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ViewError::NotFinalAgent => f.write_str("agent is not in the final position"),
            ViewError::Trace(v) => write!(f, "{v}"),
        }
    }
}

/// The word of basic actions seen by final agent `y` along the trace, plus
/// the agent of the initial position it originates from. Passive steps
/// contribute nothing.
pub fn view_of(c: &TraceCospan, y: AgentRef) -> Result<(Vec<ObjC>, AgentRef), ViewError> {
    if !c.final_.has_elem(ObjC::Agent(y.arity), y.id) {
        return Err(ViewError::NotFinalAgent);
    }
    let actions = sequentialize(c).map_err(ViewError::Trace)?;
    view_through(&actions, &c.s.apply(y.elem()), c).map_err(|_| ViewError::NotFinalAgent)
}

fn view_through(
    actions: &[Action],
    start: &Elem,
    c: &TraceCospan,
) -> Result<(Vec<ObjC>, AgentRef), ()> {
    let mut cur = *start;
    let mut word = Vec::new();
    for a in actions.iter().rev() {
        if let Some(&(slot, _)) = a
            .slots
            .after
            .iter()
            .find(|(_, ag)| ag.elem() == cur)
        {
            word.push(a.basic_label(slot));
            cur = a.origin_of(slot).elem();
        }
    }
    word.reverse();
    // pull back through the initial leg
    for e in c.initial.all_elems() {
        if c.t.apply(e) == cur {
            if let ObjC::Agent(n) = e.0 {
                return Ok((word, AgentRef { arity: n, id: e.1 }));
            }
        }
    }
    Err(())
}

/// Views for every final agent, keyed by the agent.
pub fn all_views(c: &TraceCospan) -> Result<Vec<(AgentRef, Vec<ObjC>, AgentRef)>, ViewError> {
    let actions = sequentialize(c).map_err(ViewError::Trace)?;
    let mut out = Vec::new();
    for (n, id) in c.final_.agents() {
        let y = AgentRef { arity: n, id };
        let (word, origin) =
            view_through(&actions, &c.s.apply(y.elem()), c).map_err(|_| ViewError::NotFinalAgent)?;
        out.push((y, word, origin));
    }
    Ok(out)
}
