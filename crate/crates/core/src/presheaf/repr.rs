//! Representable presheaves for every object, with fixed id conventions,
//! and a small builder for positions.
//!
//! Id conventions (used throughout the trace module):
//! - the top element of `representable(c)` has id 0 over `c`;
//! - channels of an n-ary one-agent shape are 0..n-1 in channel order, and
//!   the created channel of `Nu`/`Iota` is id n;
//! - for `Sync(n,a,m,c,d)` the sender's channels are 0..m-1, the receiver's
//!   non-shared pre-channels continue from m upwards, its a-th channel is
//!   the sender's c-th and its received channel is the sender's d-th.

use alloc::vec::Vec;

use super::{ElemId, GenC, ObjC, Presheaf};

/// Incrementally build a position (dimension <= 1 presheaf).
#[derive(Clone, Debug, Default)]
pub struct PositionBuilder {
    psh: Presheaf,
}

impl PositionBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn channel(&mut self, id: ElemId) -> &mut Self {
        self.psh.add_elem(ObjC::Star, id);
        self
    }

    pub fn agent(&mut self, arity: u32, id: ElemId, channels: &[ElemId]) -> &mut Self {
        assert_eq!(channels.len() as u32, arity);
        self.psh.add_elem(ObjC::Agent(arity), id);
        for (i, &ch) in channels.iter().enumerate() {
            self.psh.add_elem(ObjC::Star, ch);
            self.psh.set_act(ObjC::Agent(arity), id, GenC::Si(i as u32), ch);
        }
        self
    }

    pub fn build(&self) -> Presheaf {
        self.psh.clone()
    }
}

/// The representable presheaf of an object. The id conventions are fixed so
/// seed cospans and Yoneda images can be extracted by generator paths.
pub fn representable(c: ObjC) -> Presheaf {
    assert!(c.is_well_indexed(), "representable of ill-indexed object");
    let mut p = Presheaf::new();
    let top = ElemId(0);
    match c {
        ObjC::Star => {
            p.add_elem(ObjC::Star, top);
        }
        ObjC::Agent(n) => {
            p.add_elem(c, top);
            for i in 0..n {
                p.add_elem(ObjC::Star, ElemId(i));
                p.set_act(c, top, GenC::Si(i), ElemId(i));
            }
        }
        ObjC::PiL(n) | ObjC::PiR(n) | ObjC::TauN(n) | ObjC::Tick(n) | ObjC::Out(n, _, _) => {
            p.add_elem(c, top);
            let ag = ObjC::Agent(n);
            p.add_elem(ag, ElemId(0)); // before
            p.add_elem(ag, ElemId(1)); // after
            p.set_act(c, top, GenC::T, ElemId(0));
            p.set_act(c, top, GenC::S, ElemId(1));
            for i in 0..n {
                p.add_elem(ObjC::Star, ElemId(i));
                p.set_act(ag, ElemId(0), GenC::Si(i), ElemId(i));
                p.set_act(ag, ElemId(1), GenC::Si(i), ElemId(i));
            }
        }
        ObjC::Nu(n) | ObjC::Iota(n, _) => {
            p.add_elem(c, top);
            let before = ObjC::Agent(n);
            let after = ObjC::Agent(n + 1);
            p.add_elem(before, ElemId(0));
            p.add_elem(after, ElemId(0));
            p.set_act(c, top, GenC::T, ElemId(0));
            p.set_act(c, top, GenC::S, ElemId(0));
            for i in 0..=n {
                p.add_elem(ObjC::Star, ElemId(i));
                p.set_act(after, ElemId(0), GenC::Si(i), ElemId(i));
                if i < n {
                    p.set_act(before, ElemId(0), GenC::Si(i), ElemId(i));
                }
            }
        }
        ObjC::Fork(n) => {
            p.add_elem(c, top);
            let ag = ObjC::Agent(n);
            p.add_elem(ag, ElemId(0)); // forking agent, l.t = r.t
            p.add_elem(ag, ElemId(1)); // left child, l.s
            p.add_elem(ag, ElemId(2)); // right child, r.s
            p.add_elem(ObjC::PiL(n), ElemId(0));
            p.add_elem(ObjC::PiR(n), ElemId(0));
            p.set_act(c, top, GenC::L, ElemId(0));
            p.set_act(c, top, GenC::R, ElemId(0));
            p.set_act(ObjC::PiL(n), ElemId(0), GenC::T, ElemId(0));
            p.set_act(ObjC::PiL(n), ElemId(0), GenC::S, ElemId(1));
            p.set_act(ObjC::PiR(n), ElemId(0), GenC::T, ElemId(0));
            p.set_act(ObjC::PiR(n), ElemId(0), GenC::S, ElemId(2));
            for i in 0..n {
                p.add_elem(ObjC::Star, ElemId(i));
                for a in 0..3 {
                    p.set_act(ag, ElemId(a), GenC::Si(i), ElemId(i));
                }
            }
        }
        ObjC::Sync(n, a, m, cc, d) => {
            p.add_elem(c, top);
            let iota = ObjC::Iota(n, a);
            let out = ObjC::Out(m, cc, d);
            p.add_elem(iota, ElemId(0));
            p.add_elem(out, ElemId(0));
            p.set_act(c, top, GenC::Rho, ElemId(0));
            p.set_act(c, top, GenC::Eps, ElemId(0));

            // agents; ids assigned per arity object in order of creation
            let mut next = alloc::collections::BTreeMap::<u32, u32>::new();
            let mut new_agent = |p: &mut Presheaf, arity: u32| -> ElemId {
                let k = next.entry(arity).or_insert(0);
                let id = ElemId(*k);
                *k += 1;
                p.add_elem(ObjC::Agent(arity), id);
                id
            };
            let sender_before = new_agent(&mut p, m);
            let sender_after = new_agent(&mut p, m);
            let recv_before = new_agent(&mut p, n);
            let recv_after = new_agent(&mut p, n + 1);
            p.set_act(out, ElemId(0), GenC::T, sender_before);
            p.set_act(out, ElemId(0), GenC::S, sender_after);
            p.set_act(iota, ElemId(0), GenC::T, recv_before);
            p.set_act(iota, ElemId(0), GenC::S, recv_after);

            // channels: sender's first, then the receiver's own
            for j in 0..m {
                p.add_elem(ObjC::Star, ElemId(j));
                p.set_act(ObjC::Agent(m), sender_before, GenC::Si(j), ElemId(j));
                p.set_act(ObjC::Agent(m), sender_after, GenC::Si(j), ElemId(j));
            }
            let mut fresh = m;
            let mut recv_ch = Vec::with_capacity(n as usize + 1);
            for i in 0..n {
                if i == a {
                    recv_ch.push(ElemId(cc));
                } else {
                    p.add_elem(ObjC::Star, ElemId(fresh));
                    recv_ch.push(ElemId(fresh));
                    fresh += 1;
                }
            }
            recv_ch.push(ElemId(d)); // the transmitted channel
            for (i, &ch) in recv_ch.iter().enumerate() {
                if i < n as usize {
                    p.set_act(ObjC::Agent(n), recv_before, GenC::Si(i as u32), ch);
                }
                p.set_act(ObjC::Agent(n + 1), recv_after, GenC::Si(i as u32), ch);
            }
        }
    }
    debug_assert!(p.validate().is_ok());
    p
}
