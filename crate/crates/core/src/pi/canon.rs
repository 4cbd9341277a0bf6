//! Canonical forms: channels renamed to an initial segment of the naturals
//! by first use, the process multiset ordered by an exact search over
//! pattern-tied permutations. Two configurations get equal canonical forms
//! iff they differ by a channel bijection plus a multiset permutation.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Configuration, Guard, Name, Process};

const BOUND_FLAG: u32 = 0x8000_0000;

/// Structural encoding; free channels resolved through `free_code`.
fn enc(
    p: &Process,
    binders: &mut Vec<Name>,
    free_code: &mut dyn FnMut(Name) -> u32,
    out: &mut Vec<u32>,
) {
    let chan = |n: Name, binders: &[Name], free_code: &mut dyn FnMut(Name) -> u32| -> u32 {
        for (d, &b) in binders.iter().rev().enumerate() {
            if b == n {
                return BOUND_FLAG | d as u32;
            }
        }
        free_code(n)
    };
    match p {
        Process::Sum(sums) => {
            out.push(1);
            out.push(sums.len() as u32);
            for (g, cont) in sums {
                let bound = match g {
                    Guard::Tau => {
                        out.push(2);
                        None
                    }
                    Guard::Tick => {
                        out.push(3);
                        None
                    }
                    Guard::New(b) => {
                        out.push(4);
                        Some(*b)
                    }
                    Guard::In(a, b) => {
                        out.push(5);
                        out.push(chan(*a, binders, free_code));
                        Some(*b)
                    }
                    Guard::Out(a, b) => {
                        out.push(6);
                        out.push(chan(*a, binders, free_code));
                        out.push(chan(*b, binders, free_code));
                        None
                    }
                };
                if let Some(b) = bound {
                    binders.push(b);
                }
                enc(cont, binders, free_code, out);
                if bound.is_some() {
                    binders.pop();
                }
            }
        }
        Process::Par(l, r) => {
            out.push(7);
            enc(l, binders, free_code, out);
            enc(r, binders, free_code, out);
        }
        Process::Const(id, args) => {
            out.push(8);
            out.push(id.0);
            out.push(args.len() as u32);
            for &a in args {
                out.push(chan(a, binders, free_code));
            }
        }
    }
}

/// Renaming-invariant pattern of a single term.
fn pattern(p: &Process) -> Vec<u32> {
    let mut local: BTreeMap<Name, u32> = BTreeMap::new();
    let mut out = Vec::new();
    enc(
        p,
        &mut Vec::new(),
        &mut |n| {
            let next = local.len() as u32;
            *local.entry(n).or_insert(next)
        },
        &mut out,
    );
    out
}

type Candidate = (Vec<u32>, Vec<usize>, BTreeMap<Name, u32>);

struct Dfs<'a> {
    groups: &'a [Vec<usize>],
    procs: &'a [Process],
    best: Option<Candidate>,
}

impl<'a> Dfs<'a> {
    fn run(
        &mut self,
        g: usize,
        remaining: Vec<usize>,
        order: Vec<usize>,
        asg: BTreeMap<Name, u32>,
        stream: Vec<u32>,
    ) {
        if let Some((best, _, _)) = &self.best {
            // streams of equal-pattern prefixes have equal lengths
            if stream.as_slice() > &best[..stream.len().min(best.len())] {
                return;
            }
        }
        if remaining.is_empty() {
            if g + 1 < self.groups.len() {
                self.run(g + 1, self.groups[g + 1].clone(), order, asg, stream);
            } else {
                let better = match &self.best {
                    None => true,
                    Some((best, _, _)) => stream < *best,
                };
                if better {
                    self.best = Some((stream, order, asg));
                }
            }
            return;
        }
        for (k, &idx) in remaining.iter().enumerate() {
            let mut asg2 = asg.clone();
            let mut stream2 = stream.clone();
            enc(
                &self.procs[idx],
                &mut Vec::new(),
                &mut |n| {
                    let next = asg2.len() as u32;
                    *asg2.entry(n).or_insert(next)
                },
                &mut stream2,
            );
            let mut rem2 = remaining.clone();
            rem2.remove(k);
            let mut order2 = order.clone();
            order2.push(idx);
            self.run(g, rem2, order2, asg2, stream2);
        }
    }
}

/// Canonical form plus the channel renaming certificate (old -> new).
pub fn canonicalize(c: &Configuration) -> (Configuration, BTreeMap<Name, Name>) {
    let mut tagged: Vec<(Vec<u32>, usize)> =
        c.procs.iter().enumerate().map(|(i, p)| (pattern(p), i)).collect();
    tagged.sort();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, (pat, idx)) in tagged.iter().enumerate() {
        if i > 0 && *pat == tagged[i - 1].0 {
            groups.last_mut().expect("nonempty").push(*idx);
        } else {
            groups.push(alloc::vec![*idx]);
        }
    }

    let (order, mut asg) = if groups.is_empty() {
        (Vec::new(), BTreeMap::new())
    } else {
        let mut dfs = Dfs { groups: &groups, procs: &c.procs, best: None };
        dfs.run(0, groups[0].clone(), Vec::new(), BTreeMap::new(), Vec::new());
        let (_, order, asg) = dfs.best.expect("dfs finds an order");
        (order, asg)
    };

    // unused channels follow, in ascending numeric order
    for &n in &c.gamma {
        let next = asg.len() as u32;
        asg.entry(n).or_insert(next);
    }
    let renaming: BTreeMap<Name, Name> = asg.iter().map(|(&k, &v)| (k, Name(v))).collect();

    let gamma: alloc::collections::BTreeSet<Name> = (0..c.gamma.len() as u32).map(Name).collect();
    let base = gamma.len() as u32;
    let procs = order
        .iter()
        .map(|&i| {
            let mut next = base;
            rename_all(&c.procs[i], &renaming, &mut Vec::new(), &mut next)
        })
        .collect();
    (Configuration::new(gamma, procs), renaming)
}

/// Total renaming: free channels through `sigma`, binders to successive
/// fresh names in traversal order (alpha-normalisation).
fn rename_all(
    p: &Process,
    sigma: &BTreeMap<Name, Name>,
    bound: &mut Vec<(Name, Name)>,
    next: &mut u32,
) -> Process {
    let look = |n: Name, bound: &[(Name, Name)]| -> Name {
        for &(b, b2) in bound.iter().rev() {
            if b == n {
                return b2;
            }
        }
        sigma.get(&n).copied().unwrap_or(n)
    };
    match p {
        Process::Sum(sums) => Process::Sum(
            sums.iter()
                .map(|(g, cont)| match *g {
                    Guard::Tau => (Guard::Tau, rename_all(cont, sigma, bound, next)),
                    Guard::Tick => (Guard::Tick, rename_all(cont, sigma, bound, next)),
                    Guard::New(b) => {
                        let b2 = Name(*next);
                        *next += 1;
                        bound.push((b, b2));
                        let cont2 = rename_all(cont, sigma, bound, next);
                        bound.pop();
                        (Guard::New(b2), cont2)
                    }
                    Guard::In(a, b) => {
                        let a2 = look(a, bound);
                        let b2 = Name(*next);
                        *next += 1;
                        bound.push((b, b2));
                        let cont2 = rename_all(cont, sigma, bound, next);
                        bound.pop();
                        (Guard::In(a2, b2), cont2)
                    }
                    Guard::Out(a, b) => (
                        Guard::Out(look(a, bound), look(b, bound)),
                        rename_all(cont, sigma, bound, next),
                    ),
                })
                .collect(),
        ),
        Process::Par(l, r) => Process::Par(
            alloc::boxed::Box::new(rename_all(l, sigma, bound, next)),
            alloc::boxed::Box::new(rename_all(r, sigma, bound, next)),
        ),
        Process::Const(id, args) => {
            Process::Const(*id, args.iter().map(|&a| look(a, bound)).collect())
        }
    }
}

/// Stable exploration key: the canonical form, serialised.
pub fn canonical_key(c: &Configuration) -> String {
    use core::fmt::Write;
    let (canon, _) = canonicalize(c);
    let mut s = String::new();
    let _ = write!(s, "g{}", canon.gamma.len());
    for p in &canon.procs {
        s.push('|');
        let mut asg: BTreeMap<Name, u32> = BTreeMap::new();
        let mut out = Vec::new();
        enc(
            p,
            &mut Vec::new(),
            &mut |n| {
                debug_assert!(asg.contains_key(&n) || n.0 < canon.gamma.len() as u32);
                *asg.entry(n).or_insert(n.0)
            },
            &mut out,
        );
        for v in out {
            let _ = write!(s, "{v:x},");
        }
    }
    s
}
