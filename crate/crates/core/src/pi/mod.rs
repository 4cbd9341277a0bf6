//! A pi-calculus with a chemical-abstract-machine presentation.
//!
//! Channels are naturals; surface identifiers are resolved by the parser and
//! kept in a [`NameTable`] for display. Recursion is rational: guarded named
//! constants instead of replication or coinductive terms.

mod canon;
mod lts;
mod parse;
mod print;
mod subst;

#[cfg(test)]
mod tests;

pub use canon::{canonical_key, canonicalize};
pub use lts::{conf_transitions, recheck_transition, ConfTransition, RuleTag};
pub use parse::{parse_config, parse_defs_and_config, parse_process, parse_process_with_table, ParseError};
pub use print::{config_scope, print_config, print_defs, print_process, print_process_in_scope, NameTable};
pub use subst::{fresh_above, substitute};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// A channel, a natural number.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Name(pub u32);

/// Reference to a definition in a [`DefinitionEnv`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct ConstId(pub u32);

/// Guards of the calculus; channel creation is a guard here.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Guard {
    Tau,
    Tick,
    New(Name),
    /// `a(b)`: input on `a`, binding `b`.
    In(Name, Name),
    /// `a<b>`: output of `b` on `a`.
    Out(Name, Name),
}

/// Process terms. An empty `Sum` is the nil process.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Process {
    Sum(Vec<(Guard, Process)>),
    Par(alloc::boxed::Box<Process>, alloc::boxed::Box<Process>),
    /// A named constant instantiated at the given channels (one per
    /// parameter of its definition).
    Const(ConstId, Vec<Name>),
}

impl Process {
    pub fn nil() -> Process {
        Process::Sum(Vec::new())
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Process::Sum(s) if s.is_empty())
    }

    pub fn is_guarded_sum(&self) -> bool {
        matches!(self, Process::Sum(_))
    }
}

/// A single definition `name := body`; the parameters are the body's free
/// channels, in first-use order, with their surface spellings kept for
/// parsing and printing.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Definition {
    pub name: String,
    pub params: Vec<Name>,
    pub param_names: Vec<String>,
    pub body: Process,
}

/// Finite map from constants to guarded bodies.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DefinitionEnv {
    defs: Vec<Definition>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PiError {
    UnboundName(Name),
    UndefinedConstant(String),
    UnguardedConstant(String),
    ArityMismatch { constant: String, expected: usize, got: usize },
    NotGuarded,
}

impl fmt::Display for PiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PiError::UnboundName(n) => write!(f, "unbound channel #{}", n.0),
            PiError::UndefinedConstant(s) => write!(f, "undefined constant {s}"),
            PiError::UnguardedConstant(s) => write!(f, "unguarded occurrence of constant {s}"),
            PiError::ArityMismatch { constant, expected, got } => {
                write!(f, "constant {constant} expects {expected} channels, got {got}")
            }
            PiError::NotGuarded => f.write_str("operand of + is not a guarded sum"),
        }
    }
}

impl DefinitionEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, def: Definition) -> ConstId {
        self.defs.push(def);
        ConstId(self.defs.len() as u32 - 1)
    }

    pub fn get(&self, id: ConstId) -> &Definition {
        &self.defs[id.0 as usize]
    }

    pub fn set_body(&mut self, id: ConstId, body: Process) {
        self.defs[id.0 as usize].body = body;
    }

    pub fn lookup(&self, name: &str) -> Option<ConstId> {
        self.defs.iter().position(|d| d.name == name).map(|i| ConstId(i as u32))
    }

    pub fn iter(&self) -> impl Iterator<Item = (ConstId, &Definition)> {
        self.defs.iter().enumerate().map(|(i, d)| (ConstId(i as u32), d))
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    /// Unfold one constant occurrence: the body with parameters replaced by
    /// the instantiation channels.
    pub fn unfold(&self, id: ConstId, args: &[Name]) -> Process {
        let def = self.get(id);
        assert_eq!(def.params.len(), args.len());
        let sigma: BTreeMap<Name, Name> =
            def.params.iter().copied().zip(args.iter().copied()).collect();
        substitute(&def.body, &sigma)
    }

    /// Every body is guarded (each constant occurrence sits under a guard)
    /// and references only defined constants with matching arities.
    pub fn validate(&self) -> Result<(), PiError> {
        for d in &self.defs {
            check_guarded(&d.body, false, self)?;
        }
        Ok(())
    }
}

fn check_guarded(p: &Process, under_guard: bool, defs: &DefinitionEnv) -> Result<(), PiError> {
    match p {
        Process::Sum(sums) => {
            for (_, cont) in sums {
                check_guarded(cont, true, defs)?;
            }
            Ok(())
        }
        Process::Par(l, r) => {
            check_guarded(l, under_guard, defs)?;
            check_guarded(r, under_guard, defs)
        }
        Process::Const(id, args) => {
            if id.0 as usize >= defs.len() {
                return Err(PiError::UndefinedConstant(alloc::format!("#{}", id.0)));
            }
            let d = defs.get(*id);
            if d.params.len() != args.len() {
                return Err(PiError::ArityMismatch {
                    constant: d.name.clone(),
                    expected: d.params.len(),
                    got: args.len(),
                });
            }
            if under_guard {
                Ok(())
            } else {
                Err(PiError::UnguardedConstant(d.name.clone()))
            }
        }
    }
}

/// Free channels of a term.
pub fn free_names(p: &Process) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    collect_free(p, &mut out);
    out
}

fn collect_free(p: &Process, out: &mut BTreeSet<Name>) {
    match p {
        Process::Sum(sums) => {
            for (g, cont) in sums {
                match *g {
                    Guard::Tau | Guard::Tick => collect_free(cont, out),
                    Guard::New(b) => {
                        let mut inner = BTreeSet::new();
                        collect_free(cont, &mut inner);
                        inner.remove(&b);
                        out.extend(inner);
                    }
                    Guard::In(a, b) => {
                        out.insert(a);
                        let mut inner = BTreeSet::new();
                        collect_free(cont, &mut inner);
                        inner.remove(&b);
                        out.extend(inner);
                    }
                    Guard::Out(a, b) => {
                        out.insert(a);
                        out.insert(b);
                        collect_free(cont, out);
                    }
                }
            }
        }
        Process::Par(l, r) => {
            collect_free(l, out);
            collect_free(r, out);
        }
        Process::Const(_, args) => out.extend(args.iter().copied()),
    }
}

/// A configuration: a channel set plus a multiset of processes over it.
/// The `procs` vector order is not semantically meaningful; use
/// [`canonicalize`] or the multiset helpers for comparisons.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Configuration {
    pub gamma: BTreeSet<Name>,
    pub procs: Vec<Process>,
}

impl Configuration {
    pub fn new(gamma: BTreeSet<Name>, procs: Vec<Process>) -> Self {
        Configuration { gamma, procs }
    }

    pub fn well_formed(&self, defs: &DefinitionEnv) -> Result<(), PiError> {
        for p in &self.procs {
            check_guarded(p, true, defs)?;
            for n in free_names(p) {
                if !self.gamma.contains(&n) {
                    return Err(PiError::UnboundName(n));
                }
            }
        }
        Ok(())
    }

    /// Multiset equality of processes plus channel-set equality.
    pub fn same_state(&self, other: &Configuration) -> bool {
        if self.gamma != other.gamma || self.procs.len() != other.procs.len() {
            return false;
        }
        let mut a = self.procs.clone();
        let mut b = other.procs.clone();
        a.sort();
        b.sort();
        a == b
    }

    /// Smallest natural not in gamma.
    pub fn fresh_channel(&self) -> Name {
        let mut k = 0u32;
        while self.gamma.contains(&Name(k)) {
            k += 1;
        }
        Name(k)
    }
}

/// The two-letter alphabet of observations; `Silent` is the identity edge.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum SigmaLabel {
    Tick,
    Silent,
}

impl fmt::Display for SigmaLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaLabel::Tick => f.write_str("tick"),
            SigmaLabel::Silent => f.write_str("tau"),
        }
    }
}
