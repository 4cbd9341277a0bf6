use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::*;

fn scope(names: &[&str]) -> Vec<(String, Name)> {
    names.iter().enumerate().map(|(i, s)| (s.to_string(), Name(i as u32))).collect()
}

fn conf(text: &str) -> (DefinitionEnv, Configuration, NameTable) {
    parse_defs_and_config(text).expect("parse")
}

#[test]
fn parse_sum_of_input_and_output() {
    let defs = DefinitionEnv::new();
    let p = parse_process("a(b).0 + a<a>.0", &scope(&["a"]), &defs).expect("parse");
    match &p {
        Process::Sum(sums) => {
            assert_eq!(sums.len(), 2);
            assert!(matches!(sums[0].0, Guard::In(Name(0), _)));
            assert!(matches!(sums[1].0, Guard::Out(Name(0), Name(0))));
            assert!(sums[0].1.is_nil() && sums[1].1.is_nil());
        }
        _ => panic!("expected a sum"),
    }
}

#[test]
fn unbound_names_are_rejected() {
    let err = parse_defs_and_config("X := tau.X\n[a] tau.X | a<b>.0").expect_err("unbound b");
    assert!(err.message.contains("unbound"));
}

#[test]
fn parse_constant_reference() {
    let (defs, c, _) = conf("X := tau.X\n[a] tau.X | a<a>.0");
    assert_eq!(c.procs.len(), 1);
    match &c.procs[0] {
        Process::Par(l, r) => {
            match &**l {
                Process::Sum(sums) => {
                    assert!(matches!(sums[0].1, Process::Const(ConstId(0), _)));
                }
                _ => panic!("expected guarded sum"),
            }
            assert!(matches!(&**r, Process::Sum(_)));
        }
        _ => panic!("expected par"),
    }
    assert!(defs.validate().is_ok());
    assert!(c.well_formed(&defs).is_ok());
}

#[test]
fn parse_error_carries_offset() {
    let defs = DefinitionEnv::new();
    let err = parse_process("a(b", &scope(&["a"]), &defs).expect_err("syntax error");
    assert_eq!(err.offset, 3);
}

#[test]
fn unguarded_constant_is_rejected() {
    let err = parse_defs_and_config("X := tau.X | X\n[a] 0").expect_err("unguarded");
    assert!(err.message.contains("unguarded"));
}

#[test]
fn plus_needs_guarded_operands() {
    let defs = DefinitionEnv::new();
    let err = parse_process("tau.0 + 0", &scope(&[]), &defs).expect_err("bad sum");
    assert!(err.message.contains("guarded"));
}

#[test]
fn print_parse_round_trip() {
    let samples = [
        "a(b).b<b>.0",
        "a(b).0 + a<a>.0",
        "tau.(a(x).0 + tick.0) | a<a>.0",
        "new c.c<c>.0",
        "0",
        "tau.0 | (tick.0 | a<a>.0)",
    ];
    let defs = DefinitionEnv::new();
    let sc = scope(&["a"]);
    for s in samples {
        let (p, table) = parse::parse_process_with_table(s, &sc, &defs).expect("parse");
        let printed = print::print_process_in_scope(&p, &table, &defs, &sc);
        let (p2, table2) =
            parse::parse_process_with_table(&printed, &sc, &defs).expect("reparse");
        let printed2 = print::print_process_in_scope(&p2, &table2, &defs, &sc);
        assert_eq!(p, p2, "round trip of {s} via {printed}");
        assert_eq!(printed, printed2);
    }
}

#[test]
fn substitution_examples() {
    let defs = DefinitionEnv::new();
    // (a(b).b|<b>.0)[a -> c] = c(b).b<b>.0
    let p = parse_process("a(b).b<b>.0", &scope(&["a", "c"]), &defs).expect("parse");
    let sigma: BTreeMap<Name, Name> = [(Name(0), Name(1))].into_iter().collect();
    let q = substitute(&p, &sigma);
    match &q {
        Process::Sum(sums) => match &sums[0].0 {
            Guard::In(a, _) => assert_eq!(*a, Name(1)),
            _ => panic!("expected input"),
        },
        _ => panic!("expected sum"),
    }

    // capture avoidance: (a(b).0)[a -> b] renames the binder
    let scope_ab = scope(&["a", "b"]);
    let p = parse_process("a(b').a<b'>.0", &scope_ab, &defs).expect("parse");
    let binder = match &p {
        Process::Sum(sums) => match sums[0].0 {
            Guard::In(_, b) => b,
            _ => panic!(),
        },
        _ => panic!(),
    };
    let sigma: BTreeMap<Name, Name> = [(Name(0), binder)].into_iter().collect();
    let q = substitute(&p, &sigma);
    match &q {
        Process::Sum(sums) => match sums[0].0 {
            Guard::In(a, b2) => {
                assert_eq!(a, binder);
                assert_ne!(b2, binder, "bound name must be freshened");
                match &sums[0].1 {
                    Process::Sum(inner) => match inner[0].0 {
                        Guard::Out(s, pay) => {
                            assert_eq!(s, binder);
                            assert_eq!(pay, b2);
                        }
                        _ => panic!(),
                    },
                    _ => panic!(),
                }
            }
            _ => panic!(),
        },
        _ => panic!(),
    }

    // identity substitution is structural identity
    let p = parse_process("a(b).b<b>.0 + tau.0", &scope(&["a"]), &defs).expect("parse");
    let sigma: BTreeMap<Name, Name> = [(Name(0), Name(0))].into_iter().collect();
    assert_eq!(substitute(&p, &sigma), p);
}

#[test]
fn heating_splits_parallel() {
    let (defs, c, _) = conf("[a] a<a>.0 | a(x).0");
    let ts = conf_transitions(&c, &defs);
    let heats: Vec<_> =
        ts.iter().filter(|t| matches!(t.rule, RuleTag::Heat { .. })).collect();
    assert_eq!(heats.len(), 1);
    assert_eq!(heats[0].label, SigmaLabel::Silent);
    assert_eq!(heats[0].target.procs.len(), 2);
    // no sync yet: the operands still sit under one |
    assert!(ts.iter().all(|t| !matches!(t.rule, RuleTag::Sync { .. })));
}

#[test]
fn synchronisation_substitutes_the_payload() {
    let (defs, c, _) = conf("[a, c] a(b).b<b>.0; a<c>.0");
    let ts = conf_transitions(&c, &defs);
    let syncs: Vec<_> =
        ts.iter().filter(|t| matches!(t.rule, RuleTag::Sync { .. })).collect();
    assert_eq!(syncs.len(), 1);
    let target = &syncs[0].target;
    assert_eq!(target.gamma, c.gamma);
    // receiver continues as c<c>.0
    let expect = parse_process("c<c>.0", &scope(&["a", "c"]), &defs).expect("parse");
    assert!(target.procs.contains(&expect));
}

#[test]
fn nu_extends_gamma_with_smallest_fresh() {
    let (defs, c, _) = conf("[a] new b.b<b>.0");
    let ts = conf_transitions(&c, &defs);
    assert_eq!(ts.len(), 1);
    match ts[0].rule {
        RuleTag::NuGuard { fresh, .. } => assert_eq!(fresh, Name(1)),
        _ => panic!("expected nu"),
    }
    assert!(ts[0].target.gamma.contains(&Name(1)));
    assert_eq!(ts[0].target.gamma.len(), 2);
}

#[test]
fn empty_multiset_has_no_transitions() {
    let defs = DefinitionEnv::new();
    let c = Configuration::new(BTreeSet::new(), Vec::new());
    assert!(conf_transitions(&c, &defs).is_empty());
}

#[test]
fn constants_unfold_at_redex_position() {
    let (defs, c, _) = conf("X := tau.X\n[a] X");
    let ts = conf_transitions(&c, &defs);
    assert_eq!(ts.len(), 1);
    // the continuation is the constant again: a self loop up to state equality
    assert!(ts[0].target.same_state(&c));
}

#[test]
fn transitions_are_recheckable() {
    let (defs, c, _) = conf("[a, c] a(b).b<b>.0 + tau.0; a<c>.0 | tick.0");
    for t in conf_transitions(&c, &defs) {
        assert!(recheck_transition(&c, &defs, &t));
    }
}

#[test]
fn canonicalize_renames_by_first_use() {
    // <{5,9}>[x9<x5>.0] -> <{0,1}>[x0<x1>.0]
    let gamma: BTreeSet<Name> = [Name(5), Name(9)].into_iter().collect();
    let p = Process::Sum(alloc::vec![(Guard::Out(Name(9), Name(5)), Process::nil())]);
    let c = Configuration::new(gamma, alloc::vec![p]);
    let (canon, cert) = canonicalize(&c);
    assert_eq!(canon.gamma, [Name(0), Name(1)].into_iter().collect::<BTreeSet<_>>());
    assert_eq!(cert[&Name(9)], Name(0), "subject channel is used first");
    assert_eq!(cert[&Name(5)], Name(1));
    match &canon.procs[0] {
        Process::Sum(sums) => assert!(matches!(sums[0].0, Guard::Out(Name(0), Name(1)))),
        _ => panic!(),
    }
}

#[test]
fn canonicalize_is_idempotent_and_permutation_invariant() {
    let (defs, c, _) = conf("[a, b] a(x).x<b>.0; b<a>.0; a(x).x<b>.0");
    let _ = defs;
    let (c1, _) = canonicalize(&c);
    let (c2, _) = canonicalize(&c1);
    assert_eq!(c1, c2);

    let mut shuffled = c.clone();
    shuffled.procs.rotate_left(1);
    let (c3, _) = canonicalize(&shuffled);
    assert_eq!(c1, c3);

    // relabel channels by a bijection and compare canonical forms
    let sigma: BTreeMap<Name, Name> = [(Name(0), Name(7)), (Name(1), Name(3))].into_iter().collect();
    let relabeled = Configuration::new(
        c.gamma.iter().map(|n| sigma[n]).collect(),
        c.procs.iter().map(|p| substitute(p, &sigma)).collect(),
    );
    let (c4, _) = canonicalize(&relabeled);
    assert_eq!(c1, c4);
}

#[test]
fn canonical_key_separates_distinct_states() {
    let (defs, a, _) = conf("[a] a(x).0");
    let (_, b, _) = conf("[a] a<a>.0");
    let _ = defs;
    assert_ne!(canonical_key(&a), canonical_key(&b));
    assert_eq!(canonical_key(&a), canonical_key(&a));
}
