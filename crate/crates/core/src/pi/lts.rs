//! One-step transitions of configurations: heating of `|`, the four guard
//! rules, synchronisation, with the frame rule built into the position
//! indexing. Identity edges are implicit and never enumerated.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{substitute, Configuration, DefinitionEnv, Guard, Name, Process, SigmaLabel};

/// Which rule instance produced a transition. Indices refer to positions in
/// the source configuration's `procs` and to summand positions.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RuleTag {
    Heat { proc: usize },
    TauGuard { proc: usize, summand: usize },
    TickGuard { proc: usize, summand: usize },
    NuGuard { proc: usize, summand: usize, fresh: Name },
    Sync { receiver: usize, recv_summand: usize, sender: usize, send_summand: usize },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConfTransition {
    pub rule: RuleTag,
    pub label: SigmaLabel,
    pub target: Configuration,
}

/// Unfold top-level constants until a sum or parallel surfaces. Bodies are
/// guarded, so this terminates after one step for valid environments.
fn surface(p: &Process, defs: &DefinitionEnv) -> Process {
    let mut q = p.clone();
    let mut fuel = defs.len() + 1;
    while let Process::Const(id, args) = &q {
        if fuel == 0 {
            break;
        }
        fuel -= 1;
        q = defs.unfold(*id, args);
    }
    q
}

fn replace(c: &Configuration, gamma_add: Option<Name>, subs: &[(usize, Vec<Process>)]) -> Configuration {
    let mut gamma = c.gamma.clone();
    if let Some(n) = gamma_add {
        gamma.insert(n);
    }
    let mut procs = Vec::with_capacity(c.procs.len() + 1);
    for (i, p) in c.procs.iter().enumerate() {
        match subs.iter().find(|(j, _)| *j == i) {
            Some((_, with)) => procs.extend(with.iter().cloned()),
            None => procs.push(p.clone()),
        }
    }
    Configuration::new(gamma, procs)
}

/// All one-step successors, one entry per derivable rule instance.
pub fn conf_transitions(c: &Configuration, defs: &DefinitionEnv) -> Vec<ConfTransition> {
    let mut out = Vec::new();
    let surfaced: Vec<Process> = c.procs.iter().map(|p| surface(p, defs)).collect();

    for (i, q) in surfaced.iter().enumerate() {
        match q {
            Process::Par(l, r) => out.push(ConfTransition {
                rule: RuleTag::Heat { proc: i },
                label: SigmaLabel::Silent,
                target: replace(c, None, &[(i, alloc::vec![(**l).clone(), (**r).clone()])]),
            }),
            Process::Sum(sums) => {
                for (k, (g, cont)) in sums.iter().enumerate() {
                    match g {
                        Guard::Tau => out.push(ConfTransition {
                            rule: RuleTag::TauGuard { proc: i, summand: k },
                            label: SigmaLabel::Silent,
                            target: replace(c, None, &[(i, alloc::vec![cont.clone()])]),
                        }),
                        Guard::Tick => out.push(ConfTransition {
                            rule: RuleTag::TickGuard { proc: i, summand: k },
                            label: SigmaLabel::Tick,
                            target: replace(c, None, &[(i, alloc::vec![cont.clone()])]),
                        }),
                        Guard::New(b) => {
                            let fresh = c.fresh_channel();
                            let sigma: BTreeMap<Name, Name> = [(*b, fresh)].into_iter().collect();
                            out.push(ConfTransition {
                                rule: RuleTag::NuGuard { proc: i, summand: k, fresh },
                                label: SigmaLabel::Silent,
                                target: replace(
                                    c,
                                    Some(fresh),
                                    &[(i, alloc::vec![substitute(cont, &sigma)])],
                                ),
                            });
                        }
                        Guard::In(..) | Guard::Out(..) => {}
                    }
                }
            }
            Process::Const(..) => {}
        }
    }

    // synchronisation between an input and an output on a shared channel
    for (i, qi) in surfaced.iter().enumerate() {
        let Process::Sum(sums_i) = qi else { continue };
        for (j, qj) in surfaced.iter().enumerate() {
            if i == j {
                continue;
            }
            let Process::Sum(sums_j) = qj else { continue };
            for (ki, (gi, conti)) in sums_i.iter().enumerate() {
                let Guard::In(a, b) = gi else { continue };
                for (kj, (gj, contj)) in sums_j.iter().enumerate() {
                    let Guard::Out(a2, payload) = gj else { continue };
                    if a != a2 {
                        continue;
                    }
                    let sigma: BTreeMap<Name, Name> = [(*b, *payload)].into_iter().collect();
                    out.push(ConfTransition {
                        rule: RuleTag::Sync {
                            receiver: i,
                            recv_summand: ki,
                            sender: j,
                            send_summand: kj,
                        },
                        label: SigmaLabel::Silent,
                        target: replace(
                            c,
                            None,
                            &[
                                (i, alloc::vec![substitute(conti, &sigma)]),
                                (j, alloc::vec![contj.clone()]),
                            ],
                        ),
                    });
                }
            }
        }
    }
    out
}

/// Re-derive a tagged transition from scratch and compare the result.
pub fn recheck_transition(c: &Configuration, defs: &DefinitionEnv, tr: &ConfTransition) -> bool {
    conf_transitions(c, defs)
        .into_iter()
        .any(|t| t.rule == tr.rule && t.label == tr.label && t.target == tr.target)
}
