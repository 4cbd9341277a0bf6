//! The correctness criterion: a monic cospan of finite presheaves is a
//! trace iff its middle object is locally 1-injective, the legs carve out
//! exactly the initial and final elements, and the causal graph is linear
//! and acyclic.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::presheaf::{representable, Elem, ElemId, GenC, ObjC, Presheaf};

use super::causal::{causal_graph, CgKind};
use super::TraceCospan;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TraceViolation {
    /// A presheaf in the cospan fails validation.
    InvalidPresheaf,
    /// A boundary is not a position.
    BoundaryNotPosition,
    LegNotNatural { final_side: bool },
    LegNotMonic { final_side: bool },
    /// Condition (i): a core's Yoneda map merges higher-dimensional
    /// elements.
    LocalInjectivity { core: Elem, merged: Elem },
    /// Condition (i): a created channel coincides with one of its creator's
    /// prior channels.
    CreatedNotFresh { core: Elem, channel: ElemId },
    /// Condition (ii): initial elements and the image of `t` differ.
    InitialBoundary { witness: Elem },
    /// Condition (iii): final elements and the image of `s` differ.
    FinalBoundary { witness: Elem },
    /// Condition (iv): two cores share a source or created channel.
    SourceLinearity { vertex: Elem, cores: (Elem, Elem) },
    /// Condition (iv): two cores share a target agent.
    TargetLinearity { agent: Elem, cores: (Elem, Elem) },
    /// Condition (iv): the causal graph has a directed cycle.
    CausalCycle { cycle: Vec<Elem> },
}

impl core::fmt::Display for TraceViolation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TraceViolation::InvalidPresheaf => f.write_str("invalid presheaf"),
            TraceViolation::BoundaryNotPosition => f.write_str("boundary is not a position"),
            TraceViolation::LegNotNatural { final_side } => {
                write!(f, "{} leg not natural", if *final_side { "final" } else { "initial" })
            }
            TraceViolation::LegNotMonic { final_side } => {
                write!(f, "{} leg not monic", if *final_side { "final" } else { "initial" })
            }
            TraceViolation::LocalInjectivity { core, merged } => write!(
                f,
                "condition (i): core {}#{} merges {}#{}",
                core.0, core.1, merged.0, merged.1
            ),
            TraceViolation::CreatedNotFresh { core, channel } => write!(
                f,
                "condition (i): channel {channel} created by {}#{} is not fresh",
                core.0, core.1
            ),
            TraceViolation::InitialBoundary { witness } => {
                write!(f, "condition (ii): initial boundary differs at {}#{}", witness.0, witness.1)
            }
            TraceViolation::FinalBoundary { witness } => {
                write!(f, "condition (iii): final boundary differs at {}#{}", witness.0, witness.1)
            }
            TraceViolation::SourceLinearity { vertex, .. } => {
                write!(f, "condition (iv): source-linearity fails at {}#{}", vertex.0, vertex.1)
            }
            TraceViolation::TargetLinearity { agent, .. } => {
                write!(f, "condition (iv): target-linearity fails at {}#{}", agent.0, agent.1)
            }
            TraceViolation::CausalCycle { cycle } => {
                write!(f, "condition (iv): causal cycle of length {}", cycle.len())
            }
        }
    }
}

/// Agents consumed by some action element (i.e. equal to `m . s` for a
/// 2-dimensional `m`) are non-initial; agents produced (`m . t`) are
/// non-final. Channels are initial unless created by a core.
fn boundary_sets(u: &Presheaf) -> (BTreeSet<Elem>, BTreeSet<Elem>) {
    let mut non_initial: BTreeSet<Elem> = BTreeSet::new();
    let mut non_final: BTreeSet<Elem> = BTreeSet::new();
    for c in u.objects().collect::<Vec<_>>() {
        if c.dimension() != 2 {
            continue;
        }
        let src_s = crate::presheaf::generator_source(c, GenC::S).expect("typing");
        let src_t = crate::presheaf::generator_source(c, GenC::T).expect("typing");
        for x in u.elems_of(c) {
            non_initial.insert((src_s, u.act(c, x, GenC::S).expect("total")));
            non_final.insert((src_t, u.act(c, x, GenC::T).expect("total")));
        }
    }
    let mut initial: BTreeSet<Elem> = BTreeSet::new();
    let mut final_: BTreeSet<Elem> = BTreeSet::new();
    let mut created: BTreeSet<ElemId> = BTreeSet::new();
    for core in super::causal::cores_of(u) {
        created.extend(core.created.iter().copied());
    }
    for ch in u.star() {
        if !created.contains(&ch) {
            initial.insert((ObjC::Star, ch));
        }
        final_.insert((ObjC::Star, ch));
    }
    for (n, id) in u.agents() {
        let e = (ObjC::Agent(n), id);
        if !non_initial.contains(&e) {
            initial.insert(e);
        }
        if !non_final.contains(&e) {
            final_.insert(e);
        }
    }
    (initial, final_)
}

/// Check the full criterion; `Ok` carries the number of actions.
pub fn check_trace(c: &TraceCospan) -> Result<usize, TraceViolation> {
    if c.mid.validate().is_err()
        || c.initial.validate().is_err()
        || c.final_.validate().is_err()
    {
        return Err(TraceViolation::InvalidPresheaf);
    }
    if !c.initial.is_position() || !c.final_.is_position() {
        return Err(TraceViolation::BoundaryNotPosition);
    }
    if !c.t.is_natural(&c.initial, &c.mid) {
        return Err(TraceViolation::LegNotNatural { final_side: false });
    }
    if !c.s.is_natural(&c.final_, &c.mid) {
        return Err(TraceViolation::LegNotNatural { final_side: true });
    }
    if !c.t.is_mono(&c.initial) {
        return Err(TraceViolation::LegNotMonic { final_side: false });
    }
    if !c.s.is_mono(&c.final_) {
        return Err(TraceViolation::LegNotMonic { final_side: true });
    }

    let cores = super::causal::cores_of(&c.mid);

    // (i) local 1-injectivity
    for core in &cores {
        let rep = representable(core.elem.0);
        // Yoneda image, computed by walking generator paths from the top
        let mut img: alloc::collections::BTreeMap<Elem, Elem> = alloc::collections::BTreeMap::new();
        img.insert((core.elem.0, ElemId(0)), core.elem);
        let mut queue = alloc::vec![(core.elem.0, ElemId(0))];
        while let Some(e) = queue.pop() {
            let target = img[&e];
            for g in crate::presheaf::generators_into(e.0) {
                let src = crate::presheaf::generator_source(e.0, g).expect("typing");
                let sub = (src, rep.act(e.0, e.1, g).expect("representable total"));
                let tgt = (src, c.mid.act(target.0, target.1, g).expect("mid total"));
                if img.insert(sub, tgt).is_none() {
                    queue.push(sub);
                }
            }
        }
        // injectivity in dimensions >= 1
        let mut seen: alloc::collections::BTreeMap<Elem, Elem> = alloc::collections::BTreeMap::new();
        for (&src, &tgt) in &img {
            if src.0.dimension() == 0 {
                continue;
            }
            if let Some(&other) = seen.get(&tgt) {
                if other != src {
                    return Err(TraceViolation::LocalInjectivity { core: core.elem, merged: tgt });
                }
            }
            seen.insert(tgt, src);
        }
        // created channels are fresh for their creator
        if let ObjC::Nu(n) | ObjC::Iota(n, _) = core.elem.0 {
            let after = c.mid.act_path(core.elem, &[GenC::S]).expect("after agent");
            let created = c.mid.act(after.0, after.1, GenC::Si(n)).expect("created");
            for i in 0..n {
                if c.mid.act(after.0, after.1, GenC::Si(i)) == Some(created) {
                    return Err(TraceViolation::CreatedNotFresh {
                        core: core.elem,
                        channel: created,
                    });
                }
            }
        }
    }

    // (ii)/(iii) boundary exactness
    let (initial, final_) = boundary_sets(&c.mid);
    let t_img: BTreeSet<Elem> =
        c.initial.all_elems().into_iter().map(|e| c.t.apply(e)).collect();
    if let Some(&w) = t_img.symmetric_difference(&initial).next() {
        return Err(TraceViolation::InitialBoundary { witness: w });
    }
    let s_img: BTreeSet<Elem> =
        c.final_.all_elems().into_iter().map(|e| c.s.apply(e)).collect();
    if let Some(&w) = s_img.symmetric_difference(&final_).next() {
        return Err(TraceViolation::FinalBoundary { witness: w });
    }

    // (iv) linearity
    let mut source_of: alloc::collections::BTreeMap<Elem, Elem> = alloc::collections::BTreeMap::new();
    let mut target_of: alloc::collections::BTreeMap<Elem, Elem> = alloc::collections::BTreeMap::new();
    for core in &cores {
        for s in core.sources.iter().copied().chain(core.created.iter().map(|&ch| (ObjC::Star, ch))) {
            if let Some(&other) = source_of.get(&s) {
                if other != core.elem {
                    return Err(TraceViolation::SourceLinearity {
                        vertex: s,
                        cores: (other, core.elem),
                    });
                }
            }
            source_of.insert(s, core.elem);
        }
        for t in core.targets.iter().copied() {
            if let Some(&other) = target_of.get(&t) {
                if other != core.elem {
                    return Err(TraceViolation::TargetLinearity {
                        agent: t,
                        cores: (other, core.elem),
                    });
                }
            }
            target_of.insert(t, core.elem);
        }
    }

    // (iv) acyclicity
    let cg = causal_graph(&c.mid);
    if let Some(cycle) = cg.find_cycle() {
        return Err(TraceViolation::CausalCycle { cycle });
    }
    debug_assert!(cg.verts.iter().filter(|(k, _)| *k == CgKind::Core).count() == cores.len());
    Ok(cores.len())
}
