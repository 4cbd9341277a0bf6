//! Pretty-printer; its output reparses to a structurally equal term.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{Configuration, DefinitionEnv, Guard, Name, Process};

/// Display names for channels. Purely cosmetic; missing entries fall back
/// to `x<n>`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct NameTable {
    names: BTreeMap<Name, String>,
}

impl NameTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, n: Name, s: String) {
        self.names.insert(n, s);
    }

    pub fn get_cloned(&self, n: Name) -> Option<String> {
        self.names.get(&n).cloned()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Name, &String)> {
        self.names.iter().map(|(&n, s)| (n, s))
    }
}

struct Printer<'a> {
    table: &'a NameTable,
    defs: &'a DefinitionEnv,
    /// names currently in scope, innermost last
    scope: Vec<(Name, String)>,
}

impl<'a> Printer<'a> {
    fn render(&self, n: Name) -> String {
        for (m, s) in self.scope.iter().rev() {
            if *m == n {
                return s.clone();
            }
        }
        format!("x{}", n.0)
    }

    /// Pick a display string for a binder that no in-scope name uses.
    fn bind(&mut self, n: Name) -> String {
        let mut s = self.table.get_cloned(n).filter(|s| !s.is_empty()).unwrap_or(format!("x{}", n.0));
        while self.scope.iter().any(|(_, t)| *t == s) {
            s.push('\'');
        }
        self.scope.push((n, s.clone()));
        s
    }

    fn unbind(&mut self) {
        self.scope.pop();
    }

    fn process(&mut self, p: &Process, out: &mut String) {
        match p {
            Process::Par(l, r) => {
                // `|` parses left-associative: bare left chains, parenthesised
                // right-nested operands
                match &**l {
                    Process::Par(..) => self.process(l, out),
                    _ => self.sum_or_primary(l, out),
                }
                out.push_str(" | ");
                match &**r {
                    Process::Par(..) => {
                        out.push('(');
                        self.process(r, out);
                        out.push(')');
                    }
                    _ => self.sum_or_primary(r, out),
                }
            }
            _ => self.sum_or_primary(p, out),
        }
    }

    fn sum_or_primary(&mut self, p: &Process, out: &mut String) {
        match p {
            Process::Sum(sums) if sums.is_empty() => out.push('0'),
            Process::Sum(sums) => {
                for (i, (g, cont)) in sums.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" + ");
                    }
                    self.summand(g, cont, out);
                }
            }
            Process::Const(id, args) => {
                // Bare names resolve positionally via the definition's own
                // parameter spellings; anything else needs the explicit
                // instantiation form `Name(c1, ..., ck)`.
                let def = self.defs.get(*id);
                let implicit = args
                    .iter()
                    .zip(def.param_names.iter())
                    .all(|(a, pn)| self.render(*a) == *pn);
                out.push_str(&def.name);
                if !implicit {
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        out.push_str(&self.render(*a));
                    }
                    out.push(')');
                }
            }
            Process::Par(..) => {
                out.push('(');
                self.process(p, out);
                out.push(')');
            }
        }
    }

    fn summand(&mut self, g: &Guard, cont: &Process, out: &mut String) {
        let bound = match g {
            Guard::Tau => {
                out.push_str("tau");
                false
            }
            Guard::Tick => {
                out.push_str("tick");
                false
            }
            Guard::New(b) => {
                out.push_str("new ");
                let s = self.bind(*b);
                out.push_str(&s);
                true
            }
            Guard::In(a, b) => {
                out.push_str(&self.render(*a));
                out.push('(');
                let s = self.bind(*b);
                out.push_str(&s);
                out.push(')');
                true
            }
            Guard::Out(a, b) => {
                out.push_str(&self.render(*a));
                out.push('<');
                out.push_str(&self.render(*b));
                out.push('>');
                false
            }
        };
        out.push('.');
        self.dot_cont(cont, out);
        if bound {
            self.unbind();
        }
    }

    /// Continuations after a dot: single guard chains stay bare, anything
    /// else is parenthesised.
    fn dot_cont(&mut self, p: &Process, out: &mut String) {
        match p {
            Process::Sum(sums) if sums.len() == 1 => {
                let (g, cont) = &sums[0];
                self.summand(g, cont, out);
            }
            Process::Sum(sums) if sums.is_empty() => out.push('0'),
            Process::Const(..) => self.sum_or_primary(p, out),
            _ => {
                out.push('(');
                self.process(p, out);
                out.push(')');
            }
        }
    }
}

pub fn print_process(p: &Process, table: &NameTable, defs: &DefinitionEnv) -> String {
    print_process_in_scope(p, table, defs, &[])
}

/// Print with the given ambient channels in scope (name, channel) pairs.
pub fn print_process_in_scope(
    p: &Process,
    table: &NameTable,
    defs: &DefinitionEnv,
    scope: &[(String, Name)],
) -> String {
    let mut pr = Printer {
        table,
        defs,
        scope: scope.iter().map(|(s, n)| (*n, s.clone())).collect(),
    };
    let mut out = String::new();
    pr.process(p, &mut out);
    out
}

/// Scope for a configuration: distinct display names per channel.
pub fn config_scope(c: &Configuration, table: &NameTable) -> Vec<(String, Name)> {
    let mut used: Vec<String> = Vec::new();
    let mut scope = Vec::new();
    for &n in &c.gamma {
        let mut s = table.get_cloned(n).filter(|s| !s.is_empty()).unwrap_or(format!("x{}", n.0));
        while used.contains(&s) {
            s.push('\'');
        }
        used.push(s.clone());
        scope.push((s, n));
    }
    scope
}

pub fn print_config(c: &Configuration, table: &NameTable, defs: &DefinitionEnv) -> String {
    let scope = config_scope(c, table);
    let mut out = String::from("[");
    for (i, (s, _)) in scope.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(s);
    }
    out.push_str("] ");
    for (i, p) in c.procs.iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        out.push_str(&print_process_in_scope(p, table, defs, &scope));
    }
    if c.procs.is_empty() {
        out.push('0');
    }
    out
}

pub fn print_defs(defs: &DefinitionEnv) -> String {
    let mut out = String::new();
    for (_, d) in defs.iter() {
        let scope: Vec<(String, Name)> = d
            .param_names
            .iter()
            .zip(d.params.iter())
            .map(|(s, n)| (s.clone(), *n))
            .collect();
        let table = NameTable::new();
        out.push_str(&d.name);
        out.push_str(" := ");
        out.push_str(&print_process_in_scope(&d.body, &table, defs, &scope));
        out.push('\n');
    }
    out.to_string()
}
