//! Backtracking isomorphism search between finite presheaves.
//!
//! Intended for desk-scale objects; anything past the size cap returns
//! `Inconclusive`, which callers must treat as distinct from `NotIso`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::{generator_source, generators_into, Elem, ElemId, ObjC, Presheaf, PshMap};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoResult {
    Iso(PshMap),
    NotIso,
    Inconclusive,
}

impl IsoResult {
    pub fn found(&self) -> bool {
        matches!(self, IsoResult::Iso(_))
    }
}

const PER_OBJECT_CAP: usize = 24;
const TOTAL_CAP: usize = 400;

type Sig = BTreeMap<(ObjC, super::GenC), usize>;

fn signatures(p: &Presheaf) -> BTreeMap<Elem, Sig> {
    let mut sigs: BTreeMap<Elem, Sig> = p.all_elems().into_iter().map(|e| (e, Sig::new())).collect();
    for (c, x) in p.all_elems() {
        for g in generators_into(c) {
            let src = generator_source(c, g).expect("generator typing");
            let y = p.act(c, x, g).expect("total presheaf");
            if let Some(s) = sigs.get_mut(&(src, y)) {
                *s.entry((c, g)).or_insert(0) += 1;
            }
        }
    }
    sigs
}

struct Search<'a> {
    u: &'a Presheaf,
    v: &'a Presheaf,
    sig_u: BTreeMap<Elem, Sig>,
    sig_v: BTreeMap<Elem, Sig>,
}

impl<'a> Search<'a> {
    /// Assign u-elem `e` to v-id `y`, propagating along generator actions.
    fn assign(
        &self,
        map: &mut BTreeMap<Elem, ElemId>,
        used: &mut BTreeSet<Elem>,
        e: Elem,
        y: ElemId,
    ) -> bool {
        if let Some(&prev) = map.get(&e) {
            return prev == y;
        }
        if self.sig_u[&e] != self.sig_v[&(e.0, y)] {
            return false;
        }
        if !used.insert((e.0, y)) {
            return false;
        }
        map.insert(e, y);
        for g in generators_into(e.0) {
            let src = generator_source(e.0, g).expect("generator typing");
            let xg = self.u.act(e.0, e.1, g).expect("total presheaf");
            let yg = self.v.act(e.0, y, g).expect("total presheaf");
            if !self.assign(map, used, (src, xg), yg) {
                return false;
            }
        }
        true
    }

    fn solve(
        &self,
        map: BTreeMap<Elem, ElemId>,
        used: BTreeSet<Elem>,
        todo: &[Elem],
    ) -> Option<BTreeMap<Elem, ElemId>> {
        let Some((&e, rest)) = todo.split_first() else {
            return Some(map);
        };
        if map.contains_key(&e) {
            return self.solve(map, used, rest);
        }
        for y in self.v.elems_of(e.0) {
            if used.contains(&(e.0, y)) {
                continue;
            }
            let mut m2 = map.clone();
            let mut u2 = used.clone();
            if self.assign(&mut m2, &mut u2, e, y) {
                if let Some(done) = self.solve(m2, u2, rest) {
                    return Some(done);
                }
            }
        }
        None
    }
}

/// Isomorphism search with pre-seeded assignments (`forced` pairs must hold
/// in any returned isomorphism). Sound and complete below the size caps.
pub fn iso_check_forced(u: &Presheaf, v: &Presheaf, forced: &[(Elem, ElemId)]) -> IsoResult {
    let mut objs: Vec<ObjC> = u.objects().chain(v.objects()).collect();
    objs.sort();
    objs.dedup();
    for &c in &objs {
        if u.count(c) != v.count(c) {
            return IsoResult::NotIso;
        }
        if u.count(c) > PER_OBJECT_CAP {
            return IsoResult::Inconclusive;
        }
    }
    if u.total_count() > TOTAL_CAP {
        return IsoResult::Inconclusive;
    }

    let search = Search { u, v, sig_u: signatures(u), sig_v: signatures(v) };

    // multiset of signatures must agree per object
    for &c in &objs {
        let mut su: Vec<&Sig> = u.elems_of(c).iter().map(|&x| &search.sig_u[&(c, x)]).collect();
        let mut sv: Vec<&Sig> = v.elems_of(c).iter().map(|&x| &search.sig_v[&(c, x)]).collect();
        su.sort();
        sv.sort();
        if su != sv {
            return IsoResult::NotIso;
        }
    }

    let mut map = BTreeMap::new();
    let mut used = BTreeSet::new();
    for &(e, y) in forced {
        if !search.assign(&mut map, &mut used, e, y) {
            return IsoResult::NotIso;
        }
    }

    // higher dimensions first: assigning them forces most of the rest
    let mut todo = u.all_elems();
    todo.sort_by_key(|&(c, id)| (core::cmp::Reverse(c.dimension()), c, id));

    match search.solve(map, used, &todo) {
        Some(m) => {
            let mut iso = PshMap::new();
            for (e, y) in m {
                iso.insert(e, y);
            }
            debug_assert!(iso.is_natural(u, v));
            IsoResult::Iso(iso)
        }
        None => IsoResult::NotIso,
    }
}

/// Plain isomorphism search.
pub fn iso_check(u: &Presheaf, v: &Presheaf) -> IsoResult {
    iso_check_forced(u, v, &[])
}
