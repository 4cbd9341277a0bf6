//! Finite presheaves over the fixed base category of string-diagram shapes.
//!
//! Objects are the diagram shapes (channels, agents, and the action shapes),
//! morphisms are generated by the channel/source/target/branch edges modulo
//! four equation families.  A presheaf stores one finite id set per inhabited
//! object plus the contravariant action of every generator; composite
//! actions are evaluated as generator paths.
//!
//! All indices (channel positions, payload positions) are 0-based.

mod iso;
mod morphism;
mod pushout;
mod repr;


pub use iso::{iso_check, iso_check_forced, IsoResult};
pub use morphism::PshMap;
pub use pushout::{mediating, pushout, PushoutResult};
pub use repr::{representable, PositionBuilder};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Objects of the base category.
///
/// `Agent(n)` is an n-ary agent; the 2-dimensional shapes are the per-agent
/// actions (left/right fork branch, silent step, tick, channel creation,
/// input on channel `a`, output of channel `d` on channel `c`); `Fork` and
/// `Sync` are the wide action shapes gluing branches together.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum ObjC {
    Star,
    Agent(u32),
    PiL(u32),
    PiR(u32),
    TauN(u32),
    Tick(u32),
    Nu(u32),
    /// Input by an n-ary agent on its a-th channel (a < n).
    Iota(u32, u32),
    /// Output by an m-ary agent of its d-th channel on its c-th channel.
    Out(u32, u32, u32),
    Fork(u32),
    /// Synchronisation: receiver arity n inputs on channel a; sender arity m
    /// outputs channel d on channel c.
    Sync(u32, u32, u32, u32, u32),
}

impl ObjC {
    pub fn dimension(self) -> u32 {
        match self {
            ObjC::Star => 0,
            ObjC::Agent(_) => 1,
            ObjC::PiL(_) | ObjC::PiR(_) | ObjC::TauN(_) | ObjC::Tick(_) => 2,
            ObjC::Nu(_) | ObjC::Iota(..) | ObjC::Out(..) => 2,
            ObjC::Fork(_) => 3,
            ObjC::Sync(..) => 4,
        }
    }

    /// Index constraints: `a < n`, `c,d < m`.
    pub fn is_well_indexed(self) -> bool {
        match self {
            ObjC::Iota(n, a) => a < n,
            ObjC::Out(m, c, d) => c < m && d < m,
            ObjC::Sync(n, a, m, c, d) => a < n && c < m && d < m,
            _ => true,
        }
    }

    /// Arity of the (unique) initial agent slot of an action shape, or the
    /// arity of an agent object.
    pub fn arity(self) -> Option<u32> {
        match self {
            ObjC::Agent(n)
            | ObjC::PiL(n)
            | ObjC::PiR(n)
            | ObjC::TauN(n)
            | ObjC::Tick(n)
            | ObjC::Nu(n)
            | ObjC::Iota(n, _)
            | ObjC::Out(n, _, _)
            | ObjC::Fork(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_basic(self) -> bool {
        matches!(
            self,
            ObjC::TauN(_)
                | ObjC::PiL(_)
                | ObjC::PiR(_)
                | ObjC::Nu(_)
                | ObjC::Tick(_)
                | ObjC::Iota(..)
                | ObjC::Out(..)
        )
    }

    pub fn is_full(self) -> bool {
        matches!(
            self,
            ObjC::TauN(_)
                | ObjC::Fork(_)
                | ObjC::Nu(_)
                | ObjC::Tick(_)
                | ObjC::Iota(..)
                | ObjC::Out(..)
                | ObjC::Sync(..)
        )
    }

    pub fn is_closed_world(self) -> bool {
        matches!(
            self,
            ObjC::TauN(_) | ObjC::Fork(_) | ObjC::Nu(_) | ObjC::Tick(_) | ObjC::Sync(..)
        )
    }

    pub fn is_seed_shape(self) -> bool {
        self.dimension() >= 2
    }

    /// Stable textual tag, also used by the cospan file format.
    pub fn tag(self) -> String {
        match self {
            ObjC::Star => String::from("star"),
            ObjC::Agent(n) => format!("agent{n}"),
            ObjC::PiL(n) => format!("pil{n}"),
            ObjC::PiR(n) => format!("pir{n}"),
            ObjC::TauN(n) => format!("tau{n}"),
            ObjC::Tick(n) => format!("tick{n}"),
            ObjC::Nu(n) => format!("nu{n}"),
            ObjC::Iota(n, a) => format!("iota{n}.{a}"),
            ObjC::Out(m, c, d) => format!("out{m}.{c}.{d}"),
            ObjC::Fork(n) => format!("fork{n}"),
            ObjC::Sync(n, a, m, c, d) => format!("sync{n}.{a}.{m}.{c}.{d}"),
        }
    }
}

impl fmt::Display for ObjC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

/// Generating morphisms. `Si(i)` picks the i-th channel of an agent;
/// `S`/`T` are the final/initial agent of a 2-dimensional action;
/// `L`/`R` the fork branches; `Rho`/`Eps` the input/output halves of a sync.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum GenC {
    Si(u32),
    S,
    T,
    L,
    R,
    Rho,
    Eps,
}

impl fmt::Display for GenC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenC::Si(i) => write!(f, "s{i}"),
            GenC::S => f.write_str("s"),
            GenC::T => f.write_str("t"),
            GenC::L => f.write_str("l"),
            GenC::R => f.write_str("r"),
            GenC::Rho => f.write_str("rho"),
            GenC::Eps => f.write_str("eps"),
        }
    }
}

/// Generators whose target is `c`, in a fixed enumeration order.
pub fn generators_into(c: ObjC) -> Vec<GenC> {
    match c {
        ObjC::Star => Vec::new(),
        ObjC::Agent(n) => (0..n).map(GenC::Si).collect(),
        ObjC::PiL(_) | ObjC::PiR(_) | ObjC::TauN(_) | ObjC::Tick(_) | ObjC::Out(..) => {
            [GenC::S, GenC::T].into_iter().collect()
        }
        ObjC::Nu(_) | ObjC::Iota(..) => [GenC::S, GenC::T].into_iter().collect(),
        ObjC::Fork(_) => [GenC::L, GenC::R].into_iter().collect(),
        ObjC::Sync(..) => [GenC::Rho, GenC::Eps].into_iter().collect(),
    }
}

/// Source object of generator `g` with target `c`.
pub fn generator_source(c: ObjC, g: GenC) -> Option<ObjC> {
    match (c, g) {
        (ObjC::Agent(n), GenC::Si(i)) if i < n => Some(ObjC::Star),
        (ObjC::PiL(n), GenC::S) | (ObjC::PiL(n), GenC::T) => Some(ObjC::Agent(n)),
        (ObjC::PiR(n), GenC::S) | (ObjC::PiR(n), GenC::T) => Some(ObjC::Agent(n)),
        (ObjC::TauN(n), GenC::S) | (ObjC::TauN(n), GenC::T) => Some(ObjC::Agent(n)),
        (ObjC::Tick(n), GenC::S) | (ObjC::Tick(n), GenC::T) => Some(ObjC::Agent(n)),
        (ObjC::Out(m, _, _), GenC::S) | (ObjC::Out(m, _, _), GenC::T) => Some(ObjC::Agent(m)),
        (ObjC::Nu(n), GenC::S) => Some(ObjC::Agent(n + 1)),
        (ObjC::Nu(n), GenC::T) => Some(ObjC::Agent(n)),
        (ObjC::Iota(n, _), GenC::S) => Some(ObjC::Agent(n + 1)),
        (ObjC::Iota(n, _), GenC::T) => Some(ObjC::Agent(n)),
        (ObjC::Fork(n), GenC::L) => Some(ObjC::PiL(n)),
        (ObjC::Fork(n), GenC::R) => Some(ObjC::PiR(n)),
        (ObjC::Sync(n, a, _, _, _), GenC::Rho) => Some(ObjC::Iota(n, a)),
        (ObjC::Sync(_, _, m, c, d), GenC::Eps) => Some(ObjC::Out(m, c, d)),
        _ => None,
    }
}

/// Element id, unique per object.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Default)]
pub struct ElemId(pub u32);

impl fmt::Display for ElemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element addressed by its object and id.
pub type Elem = (ObjC, ElemId);

/// A violation reported by [`Presheaf::validate`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    /// Missing generator action entry.
    MissingAction { at: Elem, gen: GenC },
    /// Action target id is not an element of the source object.
    DanglingAction { at: Elem, gen: GenC, target: Elem },
    /// Object with an illegal index (e.g. input channel >= arity).
    BadIndex { object: ObjC },
    /// One of the four equation families fails at an element.
    Equation {
        equation: &'static str,
        at: Elem,
        lhs: Elem,
        rhs: Elem,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingAction { at, gen } => {
                write!(f, "missing action {gen} at {}#{}", at.0, at.1)
            }
            Violation::DanglingAction { at, gen, target } => write!(
                f,
                "action {gen} at {}#{} targets absent {}#{}",
                at.0, at.1, target.0, target.1
            ),
            Violation::BadIndex { object } => write!(f, "ill-indexed object {object}"),
            Violation::Equation { equation, at, lhs, rhs } => write!(
                f,
                "equation {equation} fails at {}#{}: {}#{} vs {}#{}",
                at.0, at.1, lhs.0, lhs.1, rhs.0, rhs.1
            ),
        }
    }
}

/// A finite presheaf: element sets per object plus generator actions.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Presheaf {
    elems: BTreeMap<ObjC, BTreeSet<ElemId>>,
    act: BTreeMap<(ObjC, ElemId, GenC), ElemId>,
}

impl Presheaf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_elem(&mut self, c: ObjC, id: ElemId) {
        self.elems.entry(c).or_default().insert(id);
    }

    pub fn remove_elem(&mut self, c: ObjC, id: ElemId) {
        if let Some(s) = self.elems.get_mut(&c) {
            s.remove(&id);
            if s.is_empty() {
                self.elems.remove(&c);
            }
        }
        let gens: Vec<GenC> = generators_into(c);
        for g in gens {
            self.act.remove(&(c, id, g));
        }
    }

    pub fn set_act(&mut self, c: ObjC, x: ElemId, g: GenC, y: ElemId) {
        self.act.insert((c, x, g), y);
    }

    pub fn act(&self, c: ObjC, x: ElemId, g: GenC) -> Option<ElemId> {
        self.act.get(&(c, x, g)).copied()
    }

    /// Apply a path of generators, innermost first: `x · g1 · g2 · ...`.
    pub fn act_path(&self, mut e: Elem, path: &[GenC]) -> Option<Elem> {
        for &g in path {
            let src = generator_source(e.0, g)?;
            let y = self.act(e.0, e.1, g)?;
            e = (src, y);
        }
        Some(e)
    }

    pub fn has_elem(&self, c: ObjC, id: ElemId) -> bool {
        self.elems.get(&c).is_some_and(|s| s.contains(&id))
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjC> + '_ {
        self.elems.keys().copied()
    }

    pub fn elems_of(&self, c: ObjC) -> Vec<ElemId> {
        self.elems.get(&c).map(|s| s.iter().copied().collect()).unwrap_or_default()
    }

    pub fn all_elems(&self) -> Vec<Elem> {
        let mut out = Vec::new();
        for (&c, s) in &self.elems {
            for &id in s {
                out.push((c, id));
            }
        }
        out
    }

    pub fn count(&self, c: ObjC) -> usize {
        self.elems.get(&c).map(|s| s.len()).unwrap_or(0)
    }

    pub fn total_count(&self) -> usize {
        self.elems.values().map(|s| s.len()).sum()
    }

    pub fn max_id(&self, c: ObjC) -> Option<u32> {
        self.elems.get(&c).and_then(|s| s.iter().next_back()).map(|e| e.0)
    }

    pub fn fresh_id(&self, c: ObjC) -> ElemId {
        ElemId(self.max_id(c).map(|m| m + 1).unwrap_or(0))
    }

    /// Least n such that every object of dimension > n is empty.
    pub fn dimension(&self) -> u32 {
        self.elems
            .iter()
            .filter(|(_, s)| !s.is_empty())
            .map(|(c, _)| c.dimension())
            .max()
            .unwrap_or(0)
    }

    /// Positions are the presheaves of dimension <= 1.
    pub fn is_position(&self) -> bool {
        self.dimension() <= 1
    }

    pub fn star(&self) -> Vec<ElemId> {
        self.elems_of(ObjC::Star)
    }

    /// All agents as (arity, id), ordered by id then arity.
    pub fn agents(&self) -> Vec<(u32, ElemId)> {
        let mut out = Vec::new();
        for (&c, s) in &self.elems {
            if let ObjC::Agent(n) = c {
                for &id in s {
                    out.push((n, id));
                }
            }
        }
        out.sort_by_key(|&(n, id)| (id, n));
        out
    }

    /// Channel tuple of an agent, in index order.
    pub fn agent_channels(&self, arity: u32, id: ElemId) -> Vec<ElemId> {
        (0..arity)
            .map(|i| self.act(ObjC::Agent(arity), id, GenC::Si(i)).expect("agent channel"))
            .collect()
    }

    /// Checks typing totality plus the four equation families, pointwise.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut errs = Vec::new();
        for (&c, ids) in &self.elems {
            if !c.is_well_indexed() {
                errs.push(Violation::BadIndex { object: c });
                continue;
            }
            for &x in ids {
                for g in generators_into(c) {
                    let src = generator_source(c, g).expect("generator typing");
                    match self.act(c, x, g) {
                        None => errs.push(Violation::MissingAction { at: (c, x), gen: g }),
                        Some(y) => {
                            if !self.has_elem(src, y) {
                                errs.push(Violation::DanglingAction {
                                    at: (c, x),
                                    gen: g,
                                    target: (src, y),
                                });
                            }
                        }
                    }
                }
            }
        }
        if !errs.is_empty() {
            return Err(errs);
        }

        let eq = |this: &Self,
                  errs: &mut Vec<Violation>,
                  name: &'static str,
                  at: Elem,
                  p1: &[GenC],
                  p2: &[GenC]| {
            let l = this.act_path(at, p1);
            let r = this.act_path(at, p2);
            match (l, r) {
                (Some(l), Some(r)) if l == r => {}
                (Some(l), Some(r)) => {
                    errs.push(Violation::Equation { equation: name, at, lhs: l, rhs: r })
                }
                // Missing actions were already reported above.
                _ => {}
            }
        };

        for (&c, ids) in &self.elems {
            match c {
                // s . s_i = t . s_i for all shared channel positions.
                ObjC::PiL(n) | ObjC::PiR(n) | ObjC::TauN(n) | ObjC::Tick(n) | ObjC::Nu(n) => {
                    for &x in ids {
                        for i in 0..n {
                            eq(self, &mut errs, "s.si = t.si", (c, x), &[GenC::S, GenC::Si(i)], &[GenC::T, GenC::Si(i)]);
                        }
                    }
                }
                ObjC::Iota(n, _) => {
                    for &x in ids {
                        for i in 0..n {
                            eq(self, &mut errs, "s.si = t.si", (c, x), &[GenC::S, GenC::Si(i)], &[GenC::T, GenC::Si(i)]);
                        }
                    }
                }
                ObjC::Out(m, _, _) => {
                    for &x in ids {
                        for i in 0..m {
                            eq(self, &mut errs, "s.si = t.si", (c, x), &[GenC::S, GenC::Si(i)], &[GenC::T, GenC::Si(i)]);
                        }
                    }
                }
                // l . t = r . t: both branches are performed by one agent.
                ObjC::Fork(_) => {
                    for &x in ids {
                        eq(self, &mut errs, "l.t = r.t", (c, x), &[GenC::L, GenC::T], &[GenC::R, GenC::T]);
                    }
                }
                // rho.t.s_a = eps.t.s_c (shared channel) and
                // rho.s.s_n = eps.s.s_d (the transmitted channel).
                ObjC::Sync(n, a, _, c_ix, d) => {
                    for &x in ids {
                        eq(self, &mut errs, "rho.t.sa = eps.t.sc", (c, x), &[GenC::Rho, GenC::T, GenC::Si(a)], &[GenC::Eps, GenC::T, GenC::Si(c_ix)]);
                        eq(self, &mut errs, "rho.s.s(n+1) = eps.s.sd", (c, x), &[GenC::Rho, GenC::S, GenC::Si(n)], &[GenC::Eps, GenC::S, GenC::Si(d)]);
                    }
                }
                _ => {}
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    /// The interface: the position consisting solely of this presheaf's
    /// channels, with its evident injection.
    pub fn interface(&self) -> (Presheaf, PshMap) {
        let mut p = Presheaf::new();
        let mut m = PshMap::new();
        for id in self.star() {
            p.add_elem(ObjC::Star, id);
            m.insert((ObjC::Star, id), id);
        }
        (p, m)
    }

    /// Relabel elements through a per-object id map; ids absent from the map
    /// are kept.
    pub fn relabel(&self, map: &BTreeMap<Elem, ElemId>) -> Presheaf {
        let tr = |c: ObjC, id: ElemId| map.get(&(c, id)).copied().unwrap_or(id);
        let mut out = Presheaf::new();
        for (&c, ids) in &self.elems {
            for &id in ids {
                out.add_elem(c, tr(c, id));
            }
        }
        for (&(c, x, g), &y) in &self.act {
            let src = generator_source(c, g).expect("generator typing");
            out.set_act(c, tr(c, x), g, tr(src, y));
        }
        out
    }

    /// Restrict to a subset of elements (caller must ensure closure under
    /// the generator actions).
    pub fn restrict_to(&self, keep: &BTreeSet<Elem>) -> Presheaf {
        let mut out = Presheaf::new();
        for &(c, id) in keep {
            if self.has_elem(c, id) {
                out.add_elem(c, id);
            }
        }
        for (&(c, x, g), &y) in &self.act {
            if keep.contains(&(c, x)) {
                out.set_act(c, x, g, y);
            }
        }
        out
    }

    /// Disjointness-checked union of two presheaves on disjoint id sets,
    /// except that shared elements must agree exactly.
    pub fn union(&self, other: &Presheaf) -> Presheaf {
        let mut out = self.clone();
        for (&c, ids) in &other.elems {
            for &id in ids {
                out.add_elem(c, id);
            }
        }
        for (&k, &v) in &other.act {
            out.act.insert(k, v);
        }
        out
    }
}
