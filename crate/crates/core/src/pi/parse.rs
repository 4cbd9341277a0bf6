//! Recursive-descent parser for the process/config grammar.
//!
//! ```text
//! defs:    NAME ":=" process
//! config:  "[" name ("," name)* "]" process (";" process)*
//! process: sum | par | "0" | "(" process ")" | NAME
//! par:     atom ("|" atom)+
//! sum:     guard "." atom ("+" guard "." atom)*
//! guard:   "tau" | "tick" | "new" name | name "(" name ")" | name "<" name ">"
//! ```
//!
//! Comments start with `#`. `.` binds tighter than `+`, which binds tighter
//! than `|`; a multi-summand sum directly under a `.` needs parentheses.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::print::NameTable;
use super::{Configuration, ConstId, Definition, DefinitionEnv, Guard, Name, Process};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParseError {
    pub message: String,
    pub offset: usize,
}

impl core::fmt::Display for ParseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{} at offset {}", self.message, self.offset)
    }
}

fn err<T>(message: impl Into<String>, offset: usize) -> Result<T, ParseError> {
    Err(ParseError { message: message.into(), offset })
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Ident(String),
    Zero,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Lt,
    Gt,
    Comma,
    Semi,
    Dot,
    Plus,
    Bar,
    Define,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let bytes: Vec<char> = text.chars().collect();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '#' => {
                while i < bytes.len() && bytes[i] != '\n' {
                    i += 1;
                }
            }
            '[' => {
                out.push((Tok::LBrack, i));
                i += 1;
            }
            ']' => {
                out.push((Tok::RBrack, i));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            '<' => {
                out.push((Tok::Lt, i));
                i += 1;
            }
            '>' => {
                out.push((Tok::Gt, i));
                i += 1;
            }
            ',' => {
                out.push((Tok::Comma, i));
                i += 1;
            }
            ';' => {
                out.push((Tok::Semi, i));
                i += 1;
            }
            '.' => {
                out.push((Tok::Dot, i));
                i += 1;
            }
            '+' => {
                out.push((Tok::Plus, i));
                i += 1;
            }
            '|' => {
                out.push((Tok::Bar, i));
                i += 1;
            }
            ':' => {
                if bytes.get(i + 1) == Some(&'=') {
                    out.push((Tok::Define, i));
                    i += 2;
                } else {
                    return err("expected ':='", i);
                }
            }
            '0' => {
                out.push((Tok::Zero, i));
                i += 1;
            }
            c if is_ident_start(c) => {
                let start = i;
                let mut s = String::new();
                while i < bytes.len() && is_ident_char(bytes[i]) {
                    s.push(bytes[i]);
                    i += 1;
                }
                out.push((Tok::Ident(s), start));
            }
            _ => return err(format!("unexpected character {c:?}"), i),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    defs: &'a DefinitionEnv,
    scope: Vec<(String, Name)>,
    next_name: u32,
    table: NameTable,
    /// When set, unknown channel names become new parameters instead of
    /// errors (used to discover a definition's free names).
    collected: Option<Vec<String>>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            err(format!("expected {what}"), self.offset())
        }
    }

    fn lookup(&self, s: &str) -> Option<Name> {
        self.scope.iter().rev().find(|(n, _)| n == s).map(|(_, v)| *v)
    }

    fn fresh(&mut self, hint: &str) -> Name {
        let n = Name(self.next_name);
        self.next_name += 1;
        self.table.set(n, hint.to_string());
        n
    }

    fn channel(&mut self, s: &str, at: usize) -> Result<Name, ParseError> {
        match self.lookup(s) {
            Some(n) => Ok(n),
            None => match &mut self.collected {
                Some(params) => {
                    if !params.iter().any(|p| p == s) {
                        params.push(s.to_string());
                    }
                    // dummy id; the collecting parse result is discarded
                    let n = self.fresh(s);
                    self.scope.insert(0, (s.to_string(), n));
                    Ok(n)
                }
                None => err(format!("unbound name {s}"), at),
            },
        }
    }

    // process := par-level
    fn process(&mut self) -> Result<Process, ParseError> {
        let mut p = self.sum_level()?;
        while self.peek() == Some(&Tok::Bar) {
            self.bump();
            let q = self.sum_level()?;
            p = Process::Par(alloc::boxed::Box::new(p), alloc::boxed::Box::new(q));
        }
        Ok(p)
    }

    // sum-level: guarded sum with + , or a primary
    fn sum_level(&mut self) -> Result<Process, ParseError> {
        if self.starts_guard() {
            let mut summands = Vec::new();
            loop {
                let g = self.guard()?;
                self.expect(Tok::Dot, "'.' after guard")?;
                let (g, cont) = self.continuation(g)?;
                summands.push((g, cont));
                if self.peek() == Some(&Tok::Plus) {
                    self.bump();
                    if !self.starts_guard() {
                        return err("operand of + must be a guarded term", self.offset());
                    }
                } else {
                    break;
                }
            }
            Ok(Process::Sum(summands))
        } else {
            self.primary()
        }
    }

    // after a dot: a guard chain or a primary (no bare + at this level)
    fn dot_cont(&mut self) -> Result<Process, ParseError> {
        if self.starts_guard() {
            let g = self.guard()?;
            self.expect(Tok::Dot, "'.' after guard")?;
            let (g, cont) = self.continuation(g)?;
            Ok(Process::Sum(alloc::vec![(g, cont)]))
        } else {
            self.primary()
        }
    }

    /// Parse the continuation of a guard, scoping its binder if any.
    fn continuation(&mut self, g: Guard) -> Result<(Guard, Process), ParseError> {
        match g {
            Guard::New(b) | Guard::In(_, b) => {
                let hint = self.table.get_cloned(b).unwrap_or_default();
                self.scope.push((hint, b));
                let cont = self.dot_cont()?;
                self.scope.pop();
                Ok((g, cont))
            }
            _ => Ok((g, self.dot_cont()?)),
        }
    }

    fn starts_guard(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(s)) => match s.as_str() {
                "tau" | "tick" | "new" => true,
                _ => {
                    // constants shadow nothing: channels in scope win
                    if self.lookup(s).is_none() && self.defs.lookup(s).is_some() {
                        return false;
                    }
                    matches!(
                        self.toks.get(self.pos + 1).map(|(t, _)| t),
                        Some(Tok::LParen) | Some(Tok::Lt)
                    )
                }
            },
            _ => false,
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize), ParseError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Ident(s)) => Ok((s, at)),
            _ => err(format!("expected {what}"), at),
        }
    }

    fn guard(&mut self) -> Result<Guard, ParseError> {
        let (s, at) = self.ident("a guard")?;
        match s.as_str() {
            "tau" => Ok(Guard::Tau),
            "tick" => Ok(Guard::Tick),
            "new" => {
                let (b, _) = self.ident("a channel binder")?;
                Ok(Guard::New(self.fresh(&b)))
            }
            _ => {
                let subject = self.channel(&s, at)?;
                match self.peek() {
                    Some(Tok::LParen) => {
                        self.bump();
                        let (b, _) = self.ident("a channel binder")?;
                        self.expect(Tok::RParen, "')'")?;
                        Ok(Guard::In(subject, self.fresh(&b)))
                    }
                    Some(Tok::Lt) => {
                        self.bump();
                        let (b, bat) = self.ident("a channel")?;
                        let payload = self.channel(&b, bat)?;
                        self.expect(Tok::Gt, "'>'")?;
                        Ok(Guard::Out(subject, payload))
                    }
                    _ => err("expected '(' or '<' after channel", self.offset()),
                }
            }
        }
    }

    fn primary(&mut self) -> Result<Process, ParseError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Zero) => Ok(Process::nil()),
            Some(Tok::LParen) => {
                let p = self.process()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(p)
            }
            Some(Tok::Ident(s)) => match self.defs.lookup(&s) {
                Some(id) => {
                    let def = self.defs.get(id);
                    let mut args = Vec::new();
                    if self.peek() == Some(&Tok::LParen) {
                        // explicit instantiation `Name(c1, ..., ck)`
                        self.bump();
                        if self.peek() != Some(&Tok::RParen) {
                            loop {
                                let (c, cat) = self.ident("a channel")?;
                                args.push(self.channel(&c, cat)?);
                                if self.peek() == Some(&Tok::Comma) {
                                    self.bump();
                                } else {
                                    break;
                                }
                            }
                        }
                        self.expect(Tok::RParen, "')'")?;
                        if args.len() != def.param_names.len() {
                            return err(
                                format!(
                                    "constant {s} expects {} channels",
                                    def.param_names.len()
                                ),
                                at,
                            );
                        }
                    } else {
                        for pname in def.param_names.clone() {
                            args.push(self.channel(&pname, at)?);
                        }
                    }
                    Ok(Process::Const(id, args))
                }
                None => err(format!("undefined constant {s}"), at),
            },
            _ => err("expected a process", at),
        }
    }
}

fn parser_for<'a>(
    text: &str,
    scope: &[(String, Name)],
    defs: &'a DefinitionEnv,
) -> Result<Parser<'a>, ParseError> {
    let toks = lex(text)?;
    let mut table = NameTable::new();
    for (s, n) in scope {
        table.set(*n, s.clone());
    }
    let next_name = scope.iter().map(|(_, n)| n.0 + 1).max().unwrap_or(0);
    Ok(Parser {
        toks,
        pos: 0,
        end: text.len(),
        defs,
        scope: scope.to_vec(),
        next_name,
        table,
        collected: None,
    })
}

/// Parse one process over the given channel scope.
pub fn parse_process(
    text: &str,
    scope: &[(String, Name)],
    defs: &DefinitionEnv,
) -> Result<Process, ParseError> {
    let (p, _) = parse_process_with_table(text, scope, defs)?;
    Ok(p)
}

pub fn parse_process_with_table(
    text: &str,
    scope: &[(String, Name)],
    defs: &DefinitionEnv,
) -> Result<(Process, NameTable), ParseError> {
    let mut p = parser_for(text, scope, defs)?;
    let proc = p.process()?;
    if p.pos != p.toks.len() {
        return err("trailing input", p.offset());
    }
    Ok((proc, p.table))
}

/// Parse a configuration line `[a,b] P; Q`. Channels get ids 0.. in header
/// order; an empty header `[]` is accepted.
pub fn parse_config(
    text: &str,
    defs: &DefinitionEnv,
) -> Result<(Configuration, NameTable), ParseError> {
    let mut p = parser_for(text, &[], defs)?;
    p.expect(Tok::LBrack, "'['")?;
    let mut scope: Vec<(String, Name)> = Vec::new();
    if p.peek() != Some(&Tok::RBrack) {
        loop {
            let (s, at) = p.ident("a channel name")?;
            if scope.iter().any(|(n, _)| *n == s) {
                return err(format!("duplicate channel {s}"), at);
            }
            let n = Name(scope.len() as u32);
            scope.push((s, n));
            if p.peek() == Some(&Tok::Comma) {
                p.bump();
            } else {
                break;
            }
        }
    }
    p.expect(Tok::RBrack, "']'")?;
    for (s, n) in &scope {
        p.table.set(*n, s.clone());
    }
    p.scope = scope.clone();
    p.next_name = scope.len() as u32;

    let mut procs = Vec::new();
    loop {
        procs.push(p.process()?);
        if p.peek() == Some(&Tok::Semi) {
            p.bump();
        } else {
            break;
        }
    }
    if p.pos != p.toks.len() {
        return err("trailing input", p.offset());
    }
    let gamma = scope.iter().map(|(_, n)| *n).collect();
    Ok((Configuration::new(gamma, procs), p.table))
}

/// Surface form of a definition before name resolution.
struct RawDef {
    name: String,
    body: String,
}

/// Parse a whole file: definition lines (`NAME := process`), then exactly
/// one configuration line. Definitions may be mutually recursive; each
/// definition's parameters are its free surface names in first-use order.
pub fn parse_defs_and_config(
    text: &str,
) -> Result<(DefinitionEnv, Configuration, NameTable), ParseError> {
    let mut raws: Vec<RawDef> = Vec::new();
    let mut config_line: Option<(usize, String)> = None;
    let mut offset = 0usize;
    for line in text.split('\n') {
        let stripped = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        let trimmed = stripped.trim();
        if !trimmed.is_empty() {
            if let Some(i) = stripped.find(":=") {
                let name = stripped[..i].trim().to_string();
                if name.is_empty() || !name.chars().next().is_some_and(is_ident_start) {
                    return err("bad definition name", offset);
                }
                raws.push(RawDef { name, body: stripped[i + 2..].to_string() });
            } else if config_line.is_none() {
                config_line = Some((offset, stripped.to_string()));
            } else {
                return err("multiple configuration lines", offset);
            }
        }
        offset += line.len() + 1;
    }

    let defs = resolve_defs(&raws)?;
    let Some((at, line)) = config_line else {
        return err("missing configuration line", offset.saturating_sub(1));
    };
    let (config, table) = parse_config(&line, &defs).map_err(|e| ParseError {
        message: e.message,
        offset: at + e.offset,
    })?;
    config
        .well_formed(&defs)
        .map_err(|e| ParseError { message: e.to_string(), offset: at })?;
    Ok((defs, config, table))
}

/// Compute each definition's free surface names (fixpoint over mutual
/// references, exact binder scoping via a collecting parse), then parse
/// bodies with parameters mapped to channels 0...
fn resolve_defs(raws: &[RawDef]) -> Result<DefinitionEnv, ParseError> {
    for (i, r) in raws.iter().enumerate() {
        if raws[..i].iter().any(|r2| r2.name == r.name) {
            return err(format!("duplicate definition {}", r.name), 0);
        }
    }
    let mut param_names: Vec<Vec<String>> = raws.iter().map(|_| Vec::new()).collect();
    loop {
        let env = skeleton_env(raws, &param_names);
        let mut changed = false;
        for (i, raw) in raws.iter().enumerate() {
            let collected = collect_params(&raw.body, &param_names[i], &env)?;
            if collected != param_names[i] {
                param_names[i] = collected;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut env = skeleton_env(raws, &param_names);
    for (i, raw) in raws.iter().enumerate() {
        let scope: Vec<(String, Name)> = param_names[i]
            .iter()
            .enumerate()
            .map(|(k, s)| (s.clone(), Name(k as u32)))
            .collect();
        let body = parse_process(&raw.body, &scope, &env)?;
        env.set_body(ConstId(i as u32), body);
    }
    env.validate().map_err(|e| ParseError { message: e.to_string(), offset: 0 })?;
    Ok(env)
}

fn skeleton_env(raws: &[RawDef], param_names: &[Vec<String>]) -> DefinitionEnv {
    let mut env = DefinitionEnv::new();
    for (i, raw) in raws.iter().enumerate() {
        let params: Vec<Name> = (0..param_names[i].len() as u32).map(Name).collect();
        env.add(Definition {
            name: raw.name.clone(),
            params,
            param_names: param_names[i].clone(),
            body: Process::nil(),
        });
    }
    env
}

/// Parse a body purely to discover its free surface names in first-use
/// order, starting from the already-known parameters.
fn collect_params(
    body: &str,
    known: &[String],
    env: &DefinitionEnv,
) -> Result<Vec<String>, ParseError> {
    let scope: Vec<(String, Name)> =
        known.iter().enumerate().map(|(k, s)| (s.clone(), Name(k as u32))).collect();
    let mut p = parser_for(body, &scope, env)?;
    p.collected = Some(known.to_vec());
    p.next_name = COLLECT_BASE.max(p.next_name);
    p.process()?;
    Ok(p.collected.take().expect("collect mode"))
}

const COLLECT_BASE: u32 = 1 << 20;
