//! Objectwise pushouts in finite sets, with the mediating-map witness.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{generator_source, Elem, ElemId, ObjC, Presheaf, PshMap};

#[derive(Clone, Debug)]
pub struct PushoutResult {
    pub obj: Presheaf,
    /// Injection of the left leg's codomain. Ids from the left object are
    /// retained wherever possible.
    pub left: PshMap,
    /// Injection of the right leg's codomain; its ids may be relabelled.
    pub right: PshMap,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[rb] = ra;
        }
    }
}

/// Pushout of the span `a <-f- i -g-> b`: the quotient of the disjoint union
/// by the equivalence generated by `f(x) ~ g(x)`.
///
/// Preconditions: `f` and `g` natural with common source `i`. Actions on the
/// quotient are computed from representatives; all members of a class are
/// checked to agree, which would only fail on non-natural input.
pub fn pushout(i: &Presheaf, f: &PshMap, a: &Presheaf, g: &PshMap, b: &Presheaf) -> PushoutResult {
    // Per object: indices 0..|A(c)| for A's elements, then B's.
    let mut obj = Presheaf::new();
    let mut left = PshMap::new();
    let mut right = PshMap::new();

    let mut objects: Vec<ObjC> = a.objects().chain(b.objects()).collect();
    objects.sort();
    objects.dedup();

    // class id (per object) of every element of A and B
    let mut class_of: BTreeMap<(bool, Elem), ElemId> = BTreeMap::new();

    for &c in &objects {
        let ea = a.elems_of(c);
        let eb = b.elems_of(c);
        let idx_a: BTreeMap<ElemId, usize> = ea.iter().enumerate().map(|(k, &x)| (x, k)).collect();
        let idx_b: BTreeMap<ElemId, usize> =
            eb.iter().enumerate().map(|(k, &x)| (x, k + ea.len())).collect();
        let mut uf = UnionFind::new(ea.len() + eb.len());
        for x in i.elems_of(c) {
            let fa = f.get((c, x)).expect("f total");
            let gb = g.get((c, x)).expect("g total");
            uf.union(idx_a[&fa], idx_b[&gb]);
        }
        // Name classes: classes containing an A element keep the least such
        // id; pure-B classes get fresh ids above A's maximum.
        let roots: Vec<usize> = (0..ea.len() + eb.len()).map(|k| uf.find(k)).collect();
        let mut names: BTreeMap<usize, ElemId> = BTreeMap::new();
        for (&x, &k) in &idx_a {
            let e = names.entry(roots[k]).or_insert(x);
            if x < *e {
                *e = x;
            }
        }
        let mut next = a.max_id(c).map(|m| m + 1).unwrap_or(0);
        for &x in &eb {
            names.entry(roots[idx_b[&x]]).or_insert_with(|| {
                let id = ElemId(next);
                next += 1;
                id
            });
        }
        for (&x, &k) in &idx_a {
            let nm = names[&roots[k]];
            class_of.insert((false, (c, x)), nm);
            left.insert((c, x), nm);
            obj.add_elem(c, nm);
        }
        for (&x, &k) in &idx_b {
            let nm = names[&roots[k]];
            class_of.insert((true, (c, x)), nm);
            right.insert((c, x), nm);
            obj.add_elem(c, nm);
        }
    }

    // Actions from representatives; every member must agree.
    let mut action_out: BTreeMap<(ObjC, ElemId, super::GenC), ElemId> = BTreeMap::new();
    let mut record = |key: (ObjC, ElemId, super::GenC), val: ElemId| {
        if let Some(prev) = action_out.insert(key, val) {
            assert_eq!(prev, val, "pushout: span not natural at {:?}", key);
        }
    };
    for (from_b, psh) in [(false, a), (true, b)] {
        for (c, x) in psh.all_elems() {
            for gch in super::generators_into(c) {
                let s = generator_source(c, gch).expect("generator typing");
                let y = psh.act(c, x, gch).expect("total presheaf");
                let cx = class_of[&(from_b, (c, x))];
                let cy = class_of[&(from_b, (s, y))];
                record((c, cx, gch), cy);
            }
        }
    }
    for ((c, x, gch), y) in action_out {
        obj.set_act(c, x, gch, y);
    }

    PushoutResult { obj, left, right }
}

/// Mediating morphism for a cocone `(p: A -> Z, q: B -> Z)` over the span;
/// `None` when the cocone does not commute. The mediating map is unique
/// because the injections are jointly surjective.
pub fn mediating(
    po: &PushoutResult,
    a: &Presheaf,
    b: &Presheaf,
    p: &PshMap,
    q: &PshMap,
    z: &Presheaf,
) -> Option<PshMap> {
    let mut med = PshMap::new();
    for (e, v) in po.left.entries() {
        let target = p.get(e)?;
        match med.get((e.0, v)) {
            None => med.insert((e.0, v), target),
            Some(prev) if prev == target => {}
            Some(_) => return None,
        }
    }
    for (e, v) in po.right.entries() {
        let target = q.get(e)?;
        match med.get((e.0, v)) {
            None => med.insert((e.0, v), target),
            Some(prev) if prev == target => {}
            Some(_) => return None,
        }
    }
    let _ = (a, b);
    if med.is_natural(&po.obj, z) {
        Some(med)
    } else {
        None
    }
}
