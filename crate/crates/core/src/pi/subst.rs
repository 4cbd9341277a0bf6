//! Capture-avoiding substitution.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{free_names, Guard, Name, Process};

/// A name strictly above everything in the term and the substitution.
pub fn fresh_above(p: &Process, sigma: &BTreeMap<Name, Name>) -> u32 {
    let mut m = 0u32;
    fn scan(p: &Process, m: &mut u32) {
        let bump = |m: &mut u32, n: Name| {
            if n.0 + 1 > *m {
                *m = n.0 + 1;
            }
        };
        match p {
            Process::Sum(sums) => {
                for (g, cont) in sums {
                    match *g {
                        Guard::Tau | Guard::Tick => {}
                        Guard::New(b) => bump(m, b),
                        Guard::In(a, b) => {
                            bump(m, a);
                            bump(m, b);
                        }
                        Guard::Out(a, b) => {
                            bump(m, a);
                            bump(m, b);
                        }
                    }
                    scan(cont, m);
                }
            }
            Process::Par(l, r) => {
                scan(l, m);
                scan(r, m);
            }
            Process::Const(_, args) => {
                for &a in args {
                    bump(m, a);
                }
            }
        }
    }
    scan(p, &mut m);
    for (&k, &v) in sigma {
        m = m.max(k.0 + 1).max(v.0 + 1);
    }
    m
}

/// `P[sigma]`, total on free names; bound names are freshened whenever they
/// collide with the image of the substitution.
pub fn substitute(p: &Process, sigma: &BTreeMap<Name, Name>) -> Process {
    let mut fresh = fresh_above(p, sigma);
    subst_in(p, sigma, &mut fresh)
}

fn subst_in(p: &Process, sigma: &BTreeMap<Name, Name>, fresh: &mut u32) -> Process {
    let app = |n: Name| sigma.get(&n).copied().unwrap_or(n);
    match p {
        Process::Sum(sums) => Process::Sum(
            sums.iter()
                .map(|(g, cont)| match *g {
                    Guard::Tau => (Guard::Tau, subst_in(cont, sigma, fresh)),
                    Guard::Tick => (Guard::Tick, subst_in(cont, sigma, fresh)),
                    Guard::New(b) => {
                        let (b2, inner) = under_binder(b, cont, sigma, fresh);
                        (Guard::New(b2), inner)
                    }
                    Guard::In(a, b) => {
                        let (b2, inner) = under_binder(b, cont, sigma, fresh);
                        (Guard::In(app(a), b2), inner)
                    }
                    Guard::Out(a, b) => (Guard::Out(app(a), app(b)), subst_in(cont, sigma, fresh)),
                })
                .collect(),
        ),
        Process::Par(l, r) => Process::Par(
            alloc::boxed::Box::new(subst_in(l, sigma, fresh)),
            alloc::boxed::Box::new(subst_in(r, sigma, fresh)),
        ),
        Process::Const(id, args) => {
            Process::Const(*id, args.iter().map(|&a| app(a)).collect::<Vec<_>>())
        }
    }
}

fn under_binder(
    b: Name,
    cont: &Process,
    sigma: &BTreeMap<Name, Name>,
    fresh: &mut u32,
) -> (Name, Process) {
    let frees = free_names(cont);
    let mut inner: BTreeMap<Name, Name> = sigma
        .iter()
        .filter(|(k, _)| **k != b && frees.contains(k))
        .map(|(&k, &v)| (k, v))
        .collect();
    let captured = inner.values().any(|&v| v == b);
    if captured {
        let b2 = Name(*fresh);
        *fresh += 1;
        inner.insert(b, b2);
        (b2, subst_in(cont, &inner, fresh))
    } else {
        inner.remove(&b);
        (b, subst_in(cont, &inner, fresh))
    }
}
