//! Natural transformations between presheaves, stored as per-element maps.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{generator_source, generators_into, Elem, ElemId, ObjC, Presheaf};

/// An object-preserving map on elements. Naturality is a property checked
/// against concrete domain/codomain presheaves, not an invariant of the
/// container.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PshMap {
    at: BTreeMap<Elem, ElemId>,
}

impl PshMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn identity(of: &Presheaf) -> Self {
        let mut m = Self::new();
        for e in of.all_elems() {
            m.insert(e, e.1);
        }
        m
    }

    pub fn insert(&mut self, e: Elem, to: ElemId) {
        self.at.insert(e, to);
    }

    pub fn get(&self, e: Elem) -> Option<ElemId> {
        self.at.get(&e).copied()
    }

    pub fn apply(&self, e: Elem) -> Elem {
        (e.0, self.at[&e])
    }

    pub fn entries(&self) -> impl Iterator<Item = (Elem, ElemId)> + '_ {
        self.at.iter().map(|(&k, &v)| (k, v))
    }

    pub fn compose(&self, then: &PshMap) -> PshMap {
        let mut out = PshMap::new();
        for (e, v) in self.entries() {
            out.insert(e, then.at[&(e.0, v)]);
        }
        out
    }

    /// Total on the domain and lands in the codomain.
    pub fn is_total(&self, dom: &Presheaf, cod: &Presheaf) -> bool {
        dom.all_elems().into_iter().all(|e| match self.get(e) {
            Some(v) => cod.has_elem(e.0, v),
            None => false,
        })
    }

    /// Commutes with every generator action, pointwise.
    pub fn is_natural(&self, dom: &Presheaf, cod: &Presheaf) -> bool {
        if !self.is_total(dom, cod) {
            return false;
        }
        for (c, x) in dom.all_elems() {
            for g in generators_into(c) {
                let src = generator_source(c, g).expect("generator typing");
                let Some(xg) = dom.act(c, x, g) else { return false };
                let fx = self.at[&(c, x)];
                let Some(fxg) = cod.act(c, fx, g) else { return false };
                if self.at.get(&(src, xg)) != Some(&fxg) {
                    return false;
                }
            }
        }
        true
    }

    /// Injective at every object inhabited in `dom`.
    pub fn is_mono(&self, dom: &Presheaf) -> bool {
        for c in dom.objects().collect::<Vec<_>>() {
            let mut seen = BTreeMap::new();
            for x in dom.elems_of(c) {
                let v = self.at[&(c, x)];
                if let Some(prev) = seen.insert(v, x) {
                    if prev != x {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Injective in all strictly positive dimensions (channels may merge).
    pub fn is_one_injective(&self, dom: &Presheaf) -> bool {
        for c in dom.objects().collect::<Vec<_>>() {
            if c.dimension() == 0 {
                continue;
            }
            let mut seen = BTreeMap::new();
            for x in dom.elems_of(c) {
                let v = self.at[&(c, x)];
                if let Some(prev) = seen.insert(v, x) {
                    if prev != x {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Bijective on the elements over `c` between `dom` and `cod`.
    pub fn is_bijective_at(&self, c: ObjC, dom: &Presheaf, cod: &Presheaf) -> bool {
        let dome = dom.elems_of(c);
        let code = cod.elems_of(c);
        if dome.len() != code.len() {
            return false;
        }
        let mut image: Vec<ElemId> = dome.iter().map(|&x| self.at[&(c, x)]).collect();
        image.sort();
        image.dedup();
        image.len() == code.len() && image.iter().all(|v| cod.has_elem(c, *v))
    }
}
