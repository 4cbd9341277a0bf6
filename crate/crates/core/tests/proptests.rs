//! Property tests over generated process terms.

use std::collections::BTreeMap;

use proptest::prelude::*;

use pipg_core::pi::{
    parse_process, parse_process_with_table, print_process_in_scope, substitute, DefinitionEnv,
    Guard, Name, NameTable, Process,
};

const GAMMA: u32 = 3;

fn arb_guard() -> impl Strategy<Value = Guard> {
    prop_oneof![
        Just(Guard::Tau),
        Just(Guard::Tick),
        (10u32..20).prop_map(|b| Guard::New(Name(b))),
        (0..GAMMA, 10u32..20).prop_map(|(a, b)| Guard::In(Name(a), Name(b))),
        (0..GAMMA, 0..GAMMA).prop_map(|(a, b)| Guard::Out(Name(a), Name(b))),
    ]
}

fn arb_guard_name(g: u32) -> BoxedStrategy<Guard> {
    let _ = g;
    arb_guard().boxed()
}

fn arb_process() -> impl Strategy<Value = Process> {
    let leaf = Just(Process::nil());
    leaf.prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            (proptest::collection::vec((arb_guard_name(GAMMA), inner.clone()), 1..3))
                .prop_map(Process::Sum),
            (inner.clone(), inner).prop_map(|(l, r)| Process::Par(Box::new(l), Box::new(r))),
        ]
    })
}

fn fix_binders(p: &Process) -> Process {
    // make generated binder names unique so terms are well-scoped
    let mut next = 100u32;
    fn walk(p: &Process, next: &mut u32) -> Process {
        match p {
            Process::Sum(sums) => Process::Sum(
                sums.iter()
                    .map(|(g, c)| {
                        let (g2, c2) = match g {
                            Guard::New(b) => {
                                let nb = Name(*next);
                                *next += 1;
                                let sigma: BTreeMap<Name, Name> =
                                    [(*b, nb)].into_iter().collect();
                                (Guard::New(nb), substitute(c, &sigma))
                            }
                            Guard::In(a, b) => {
                                let nb = Name(*next);
                                *next += 1;
                                let sigma: BTreeMap<Name, Name> =
                                    [(*b, nb)].into_iter().collect();
                                (Guard::In(*a, nb), substitute(c, &sigma))
                            }
                            g => (g.clone(), c.clone()),
                        };
                        (g2, walk(&c2, next))
                    })
                    .collect(),
            ),
            Process::Par(l, r) => {
                Process::Par(Box::new(walk(l, next)), Box::new(walk(r, next)))
            }
            c => c.clone(),
        }
    }
    walk(p, &mut next)
}

proptest! {
    /// The identity substitution is a structural no-op.
    #[test]
    fn substitute_identity(p in arb_process()) {
        let p = fix_binders(&p);
        let sigma: BTreeMap<Name, Name> = (0..GAMMA).map(|i| (Name(i), Name(i))).collect();
        prop_assert_eq!(substitute(&p, &sigma), p);
    }

    /// Printing followed by parsing is the identity up to one reprint.
    #[test]
    fn print_parse_round_trip(p in arb_process()) {
        let p = fix_binders(&p);
        let defs = DefinitionEnv::new();
        let scope: Vec<(String, Name)> =
            (0..GAMMA).map(|i| (format!("c{i}"), Name(i))).collect();
        let printed = print_process_in_scope(&p, &NameTable::new(), &defs, &scope);
        let (reparsed, table) =
            parse_process_with_table(&printed, &scope, &defs).expect("reparse");
        let reprinted = print_process_in_scope(&reparsed, &table, &defs, &scope);
        prop_assert_eq!(&printed, &reprinted, "printing is stable on its own output");
        let reparsed2 = parse_process(&reprinted, &scope, &defs).expect("reparse");
        prop_assert_eq!(reparsed, reparsed2);
    }

    /// Substitution composes: P[s][t] = P[t . s] on free channels.
    #[test]
    fn substitution_composes(p in arb_process(), perm in proptest::sample::select(vec![
        vec![1u32, 2, 0], vec![2, 0, 1], vec![0, 2, 1],
    ])) {
        let p = fix_binders(&p);
        let s: BTreeMap<Name, Name> =
            (0..GAMMA).map(|i| (Name(i), Name(perm[i as usize]))).collect();
        let t: BTreeMap<Name, Name> =
            (0..GAMMA).map(|i| (Name(i), Name(perm[perm[i as usize] as usize]))).collect();
        let lhs = substitute(&substitute(&p, &s), &s);
        let rhs = substitute(&p, &t);
        prop_assert_eq!(lhs, rhs);
    }
}
