//! Structural translation of process terms into behaviour states.
//!
//! Sums become definite sums (row concatenation), parallel composition
//! becomes a fork table, guards become singleton rows with the channel map
//! extended at binders. Constants memoise into named states, so rational
//! terms whose recursion does not cross a binder yield finite systems; a
//! state cap turns the remaining cases into a clean error.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::pi::{ConstId, DefinitionEnv, Guard, Name, Process};
use crate::presheaf::ObjC;

use super::{BehaviourSystem, StateId};

/// An injective channel map into `0..arity`; the translation only ever
/// evaluates it on free names of the term at hand.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChanMap {
    map: BTreeMap<Name, u32>,
    arity: u32,
}

impl ChanMap {
    /// Bijection from the given channel set, in ascending numeric order
    /// (the canonical `h`).
    pub fn sorted(gamma: &alloc::collections::BTreeSet<Name>) -> ChanMap {
        let map: BTreeMap<Name, u32> =
            gamma.iter().enumerate().map(|(i, &n)| (n, i as u32)).collect();
        ChanMap { map, arity: gamma.len() as u32 }
    }

    pub fn from_pairs(pairs: &[(Name, u32)], arity: u32) -> ChanMap {
        ChanMap { map: pairs.iter().copied().collect(), arity }
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn get(&self, n: Name) -> Option<u32> {
        self.map.get(&n).copied()
    }

    /// Extend at a binder: the bound channel becomes index `arity`.
    pub fn extend(&self, b: Name) -> ChanMap {
        let mut map = self.map.clone();
        map.insert(b, self.arity);
        ChanMap { map, arity: self.arity + 1 }
    }

    /// Inverse image as a substitution vector (index -> name); only
    /// meaningful for bijective maps.
    pub fn inverse_vec(&self) -> Vec<Name> {
        let mut v = alloc::vec![Name(0); self.arity as usize];
        for (&n, &i) in &self.map {
            v[i as usize] = n;
        }
        v
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TranslateError {
    UnboundChannel(Name),
    /// The system grew past the cap: the term's recursion crosses binders,
    /// which has no finite arity-indexed representation.
    StateCapExceeded { cap: usize },
}

impl core::fmt::Display for TranslateError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TranslateError::UnboundChannel(n) => write!(f, "channel #{} not in the map", n.0),
            TranslateError::StateCapExceeded { cap } => {
                write!(f, "behaviour system exceeded {cap} states")
            }
        }
    }
}

/// Accumulates one behaviour system across several translations, memoising
/// constants.
pub struct Translator<'d> {
    pub sys: BehaviourSystem,
    defs: &'d DefinitionEnv,
    memo: BTreeMap<(ConstId, u32, Vec<u32>), StateId>,
    cap: usize,
}

pub const DEFAULT_STATE_CAP: usize = 20_000;

impl<'d> Translator<'d> {
    pub fn new(defs: &'d DefinitionEnv) -> Self {
        Translator { sys: BehaviourSystem::new(), defs, memo: BTreeMap::new(), cap: DEFAULT_STATE_CAP }
    }

    pub fn with_cap(defs: &'d DefinitionEnv, cap: usize) -> Self {
        Translator { sys: BehaviourSystem::new(), defs, memo: BTreeMap::new(), cap }
    }

    pub fn defs(&self) -> &'d DefinitionEnv {
        self.defs
    }

    fn alloc(&mut self, arity: u32, name: Option<alloc::string::String>) -> Result<StateId, TranslateError> {
        if self.sys.len() >= self.cap {
            return Err(TranslateError::StateCapExceeded { cap: self.cap });
        }
        Ok(self.sys.add_state(arity, name))
    }

    /// Translate a term under a channel map.
    pub fn translate(&mut self, p: &Process, h: &ChanMap) -> Result<StateId, TranslateError> {
        match p {
            Process::Const(id, args) => {
                let mapped: Result<Vec<u32>, _> = args
                    .iter()
                    .map(|&a| h.get(a).ok_or(TranslateError::UnboundChannel(a)))
                    .collect();
                let mapped = mapped?;
                let key = (*id, h.arity(), mapped.clone());
                if let Some(&s) = self.memo.get(&key) {
                    return Ok(s);
                }
                let def = self.defs.get(*id);
                let s = self.alloc(h.arity(), Some(format!("{}@{}", def.name, h.arity())))?;
                self.memo.insert(key, s);
                let pairs: Vec<(Name, u32)> =
                    def.params.iter().copied().zip(mapped.iter().copied()).collect();
                let h_body = ChanMap::from_pairs(&pairs, h.arity());
                let body = def.body.clone();
                self.fill(s, &body, &h_body)?;
                Ok(s)
            }
            _ => {
                let s = self.alloc(h.arity(), None)?;
                self.fill(s, p, h)?;
                Ok(s)
            }
        }
    }

    /// Fill the rows of an already-allocated state from a term.
    fn fill(&mut self, target: StateId, p: &Process, h: &ChanMap) -> Result<(), TranslateError> {
        let n = h.arity();
        match p {
            Process::Sum(summands) => {
                for (g, cont) in summands {
                    match *g {
                        Guard::Tau => {
                            let t = self.translate(cont, h)?;
                            self.sys.push_row(target, ObjC::TauN(n), t);
                        }
                        Guard::Tick => {
                            let t = self.translate(cont, h)?;
                            self.sys.push_row(target, ObjC::Tick(n), t);
                        }
                        Guard::New(b) => {
                            let t = self.translate(cont, &h.extend(b))?;
                            self.sys.push_row(target, ObjC::Nu(n), t);
                        }
                        Guard::In(a, b) => {
                            let ai = h.get(a).ok_or(TranslateError::UnboundChannel(a))?;
                            let t = self.translate(cont, &h.extend(b))?;
                            self.sys.push_row(target, ObjC::Iota(n, ai), t);
                        }
                        Guard::Out(a, b) => {
                            let ai = h.get(a).ok_or(TranslateError::UnboundChannel(a))?;
                            let bi = h.get(b).ok_or(TranslateError::UnboundChannel(b))?;
                            let t = self.translate(cont, h)?;
                            self.sys.push_row(target, ObjC::Out(n, ai, bi), t);
                        }
                    }
                }
                Ok(())
            }
            Process::Par(l, r) => {
                let tl = self.translate(l, h)?;
                let tr = self.translate(r, h)?;
                self.sys.push_row(target, ObjC::PiL(n), tl);
                self.sys.push_row(target, ObjC::PiR(n), tr);
                Ok(())
            }
            Process::Const(..) => {
                // guarded environments never put a bare constant here; fall
                // back to unfolding once
                let q = match p {
                    Process::Const(id, args) => self.defs.unfold(*id, args),
                    _ => unreachable!(),
                };
                self.fill(target, &q, h)
            }
        }
    }
}
