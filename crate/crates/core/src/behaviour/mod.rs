//! Rational behaviours: finite systems of definite states, each an
//! arity-indexed table from basic-action labels to formal sums of states.
//! Residuals, restriction and definite sums are table operations;
//! behaviour equality is depth-bounded bisimulation with summand matching.

mod mixed;
mod translate;
mod zeta;


pub use mixed::{
    a_section, m_map, residual_along_action, translate_config, translate_config_positioned,
    MixedBehaviour, PositionedBehaviour, ResidualError,
};
pub use translate::{ChanMap, TranslateError, Translator};
pub use zeta::{z_config, zeta, zeta_all};

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::presheaf::ObjC;

/// Labels usable in behaviour tables: the basic action shapes.
pub fn is_basic_label(l: ObjC) -> bool {
    l.is_basic()
}

/// Arity of the state a basic label leads to, given the source arity.
pub fn label_target_arity(l: ObjC) -> u32 {
    match l {
        ObjC::PiL(n) | ObjC::PiR(n) | ObjC::TauN(n) | ObjC::Tick(n) | ObjC::Out(n, _, _) => n,
        ObjC::Nu(n) | ObjC::Iota(n, _) => n + 1,
        _ => panic!("not a basic label: {l}"),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct StateId(pub u32);

impl core::fmt::Display for StateId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "D{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StateData {
    pub name: Option<String>,
    pub arity: u32,
    pub rows: BTreeMap<ObjC, Vec<StateId>>,
}

/// A reference-closed family of definite behaviour states.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BehaviourSystem {
    states: Vec<StateData>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BehaviourError {
    BadLabel { state: StateId, label: ObjC },
    BadReference { state: StateId, label: ObjC, target: StateId },
    ArityMismatch { state: StateId, label: ObjC, target: StateId },
}

impl core::fmt::Display for BehaviourError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            BehaviourError::BadLabel { state, label } => {
                write!(f, "{state}: {label} is not a basic label of matching arity")
            }
            BehaviourError::BadReference { state, label, target } => {
                write!(f, "{state}: row {label} references missing {target}")
            }
            BehaviourError::ArityMismatch { state, label, target } => {
                write!(f, "{state}: row {label} target {target} has the wrong arity")
            }
        }
    }
}

impl BehaviourSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_state(&mut self, arity: u32, name: Option<String>) -> StateId {
        self.states.push(StateData { name, arity, rows: BTreeMap::new() });
        StateId(self.states.len() as u32 - 1)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, s: StateId) -> &StateData {
        &self.states[s.0 as usize]
    }

    pub fn arity(&self, s: StateId) -> u32 {
        self.state(s).arity
    }

    pub fn states(&self) -> impl Iterator<Item = (StateId, &StateData)> {
        self.states.iter().enumerate().map(|(i, d)| (StateId(i as u32), d))
    }

    pub fn push_row(&mut self, s: StateId, label: ObjC, target: StateId) {
        self.states[s.0 as usize].rows.entry(label).or_default().push(target);
    }

    /// The residual formal sum `D . b`; absent labels denote the empty
    /// behaviour.
    pub fn row(&self, s: StateId, label: ObjC) -> &[StateId] {
        self.state(s).rows.get(&label).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Summand count of a residual.
    pub fn card(&self, s: StateId, label: ObjC) -> usize {
        self.row(s, label).len()
    }

    /// The k-th summand of a residual (construction order).
    pub fn restrict(&self, s: StateId, label: ObjC, k: usize) -> Option<StateId> {
        self.row(s, label).get(k).copied()
    }

    /// The definite sum: rows are concatenated in argument order.
    pub fn definite_sum(&mut self, parts: &[StateId]) -> StateId {
        let arity = self.arity(parts[0]);
        assert!(parts.iter().all(|&p| self.arity(p) == arity));
        let mut rows: BTreeMap<ObjC, Vec<StateId>> = BTreeMap::new();
        for &p in parts {
            for (label, targets) in &self.state(p).rows {
                rows.entry(*label).or_default().extend(targets.iter().copied());
            }
        }
        self.states.push(StateData { name: None, arity, rows });
        StateId(self.states.len() as u32 - 1)
    }

    pub fn validate(&self) -> Result<(), BehaviourError> {
        for (s, d) in self.states() {
            for (&label, targets) in &d.rows {
                if !is_basic_label(label) || label.arity() != Some(d.arity) {
                    return Err(BehaviourError::BadLabel { state: s, label });
                }
                for &t in targets {
                    if t.0 as usize >= self.states.len() {
                        return Err(BehaviourError::BadReference { state: s, label, target: t });
                    }
                    if self.arity(t) != label_target_arity(label) {
                        return Err(BehaviourError::ArityMismatch { state: s, label, target: t });
                    }
                }
            }
        }
        Ok(())
    }

    /// States reachable from `s` through rows.
    pub fn reachable(&self, s: StateId) -> alloc::collections::BTreeSet<StateId> {
        let mut seen = alloc::collections::BTreeSet::new();
        let mut stack = alloc::vec![s];
        while let Some(x) = stack.pop() {
            if !seen.insert(x) {
                continue;
            }
            for targets in self.state(x).rows.values() {
                stack.extend(targets.iter().copied());
            }
        }
        seen
    }
}

/// Depth-`k` bisimulation between states of two systems, matching row
/// summands up to bijection. Exact bisimilarity whenever both systems have
/// at most `k` states.
pub fn behaviour_eq(
    sys_a: &BehaviourSystem,
    a: StateId,
    sys_b: &BehaviourSystem,
    b: StateId,
    depth: u32,
) -> bool {
    let mut memo: BTreeMap<(StateId, StateId, u32), bool> = BTreeMap::new();
    beq(sys_a, a, sys_b, b, depth, &mut memo)
}

fn beq(
    sys_a: &BehaviourSystem,
    a: StateId,
    sys_b: &BehaviourSystem,
    b: StateId,
    k: u32,
    memo: &mut BTreeMap<(StateId, StateId, u32), bool>,
) -> bool {
    if sys_a.arity(a) != sys_b.arity(b) {
        return false;
    }
    if k == 0 {
        return true;
    }
    if let Some(&r) = memo.get(&(a, b, k)) {
        return r;
    }
    let mut labels: alloc::collections::BTreeSet<ObjC> =
        sys_a.state(a).rows.keys().copied().collect();
    labels.extend(sys_b.state(b).rows.keys().copied());
    let mut ok = true;
    'outer: for label in labels {
        let ra = sys_a.row(a, label);
        let rb = sys_b.row(b, label);
        if ra.len() != rb.len() {
            ok = false;
            break;
        }
        // perfect matching by backtracking; rows are small
        let n = ra.len();
        let mut used = alloc::vec![false; n];
        let mut assign: Vec<Option<usize>> = alloc::vec![None; n];
        let mut i = 0usize;
        let mut next_try: Vec<usize> = alloc::vec![0; n];
        loop {
            if i == n {
                break; // matched all
            }
            let mut advanced = false;
            while next_try[i] < n {
                let j = next_try[i];
                next_try[i] += 1;
                if !used[j] && beq(sys_a, ra[i], sys_b, rb[j], k - 1, memo) {
                    used[j] = true;
                    assign[i] = Some(j);
                    i += 1;
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                // backtrack
                next_try[i] = 0;
                if i == 0 {
                    ok = false;
                    break 'outer;
                }
                i -= 1;
                if let Some(j) = assign[i].take() {
                    used[j] = false;
                }
            }
        }
    }
    memo.insert((a, b, k), ok);
    ok
}
