//! Line-based file formats: presheaves/cospans and behaviour systems.
//!
//! Files written by this module are canonical (sorted, deterministic);
//! reading one back and re-writing it reproduces the bytes exactly.
//! Comments start with `#`, blank lines are ignored on input.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use pipg_core::behaviour::{BehaviourSystem, StateId};
use pipg_core::presheaf::{generator_source, generators_into, ElemId, GenC, ObjC, Presheaf, PshMap};
use pipg_core::trace::TraceCospan;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid content: {0}")]
    Invalid(String),
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Syntax { line, msg: msg.into() })
}

// --- object tags ---

pub fn parse_obj_tag(s: &str) -> Option<ObjC> {
    let split_nums = |rest: &str| -> Option<Vec<u32>> {
        rest.split('.').map(|p| p.parse::<u32>().ok()).collect()
    };
    if s == "star" {
        return Some(ObjC::Star);
    }
    if let Some(rest) = s.strip_prefix("agent") {
        return rest.parse().ok().map(ObjC::Agent);
    }
    if let Some(rest) = s.strip_prefix("pil") {
        return rest.parse().ok().map(ObjC::PiL);
    }
    if let Some(rest) = s.strip_prefix("pir") {
        return rest.parse().ok().map(ObjC::PiR);
    }
    if let Some(rest) = s.strip_prefix("tau") {
        return rest.parse().ok().map(ObjC::TauN);
    }
    if let Some(rest) = s.strip_prefix("tick") {
        return rest.parse().ok().map(ObjC::Tick);
    }
    if let Some(rest) = s.strip_prefix("nu") {
        return rest.parse().ok().map(ObjC::Nu);
    }
    if let Some(rest) = s.strip_prefix("fork") {
        return rest.parse().ok().map(ObjC::Fork);
    }
    if let Some(rest) = s.strip_prefix("iota") {
        if let Some(v) = split_nums(rest) {
            if let [n, a] = v[..] {
                return Some(ObjC::Iota(n, a));
            }
        }
    }
    if let Some(rest) = s.strip_prefix("out") {
        if let Some(v) = split_nums(rest) {
            if let [m, c, d] = v[..] {
                return Some(ObjC::Out(m, c, d));
            }
        }
    }
    if let Some(rest) = s.strip_prefix("sync") {
        if let Some(v) = split_nums(rest) {
            if let [n, a, m, c, d] = v[..] {
                return Some(ObjC::Sync(n, a, m, c, d));
            }
        }
    }
    None
}

fn parse_gen_tag(s: &str) -> Option<GenC> {
    match s {
        "s" => Some(GenC::S),
        "t" => Some(GenC::T),
        "l" => Some(GenC::L),
        "r" => Some(GenC::R),
        "rho" => Some(GenC::Rho),
        "eps" => Some(GenC::Eps),
        _ => s.strip_prefix('s').and_then(|i| i.parse().ok()).map(GenC::Si),
    }
}

// --- presheaves ---

/// Emit one presheaf as CHANNELS / AGENTS / ELEM lines.
pub fn print_presheaf(p: &Presheaf, out: &mut String) {
    let mut line = String::from("CHANNELS");
    for ch in p.star() {
        let _ = write!(line, " {ch}");
    }
    out.push_str(&line);
    out.push('\n');
    for (n, id) in p.agents() {
        let _ = write!(out, "AGENTS {id} {n}");
        for ch in p.agent_channels(n, id) {
            let _ = write!(out, " {ch}");
        }
        out.push('\n');
    }
    for c in p.objects().collect::<Vec<_>>() {
        if c.dimension() < 2 {
            continue;
        }
        for x in p.elems_of(c) {
            let _ = write!(out, "ELEM {} {x}", c.tag());
            for g in generators_into(c) {
                let y = p.act(c, x, g).expect("total presheaf");
                let _ = write!(out, " {g}={y}");
            }
            out.push('\n');
        }
    }
}

struct Lines<'a> {
    items: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let mut items = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let stripped = raw.split('#').next().unwrap_or("").trim();
            if stripped.is_empty() {
                continue;
            }
            items.push((i + 1, stripped.split_whitespace().collect()));
        }
        Lines { items, pos: 0 }
    }

    fn peek(&self) -> Option<&(usize, Vec<&'a str>)> {
        self.items.get(self.pos)
    }

    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        let it = self.items.get(self.pos).cloned();
        self.pos += 1;
        it
    }
}

fn parse_u32(lineno: usize, t: &str, what: &str) -> Result<u32, FormatError> {
    t.parse().map_err(|_| FormatError::Syntax { line: lineno, msg: format!("bad {what}: {t}") })
}

fn parse_presheaf_lines(lines: &mut Lines) -> Result<Presheaf, FormatError> {
    let mut p = Presheaf::new();
    while let Some((lineno, toks)) = lines.peek().cloned() {
        match toks[0] {
            "CHANNELS" => {
                lines.next();
                for t in &toks[1..] {
                    p.add_elem(ObjC::Star, ElemId(parse_u32(lineno, t, "channel id")?));
                }
            }
            "AGENTS" => {
                lines.next();
                if toks.len() < 3 {
                    return err(lineno, "AGENTS id arity ch...");
                }
                let id = parse_u32(lineno, toks[1], "agent id")?;
                let arity = parse_u32(lineno, toks[2], "arity")?;
                if toks.len() != 3 + arity as usize {
                    return err(lineno, format!("expected {arity} channels"));
                }
                let obj = ObjC::Agent(arity);
                p.add_elem(obj, ElemId(id));
                for (i, t) in toks[3..].iter().enumerate() {
                    let ch = parse_u32(lineno, t, "channel id")?;
                    p.add_elem(ObjC::Star, ElemId(ch));
                    p.set_act(obj, ElemId(id), GenC::Si(i as u32), ElemId(ch));
                }
            }
            "ELEM" => {
                lines.next();
                if toks.len() < 3 {
                    return err(lineno, "ELEM tag id gen=target...");
                }
                let obj = parse_obj_tag(toks[1]).ok_or(FormatError::Syntax {
                    line: lineno,
                    msg: format!("unknown object tag {}", toks[1]),
                })?;
                if obj.dimension() < 2 {
                    return err(lineno, "ELEM is for action shapes; use CHANNELS/AGENTS");
                }
                let id = parse_u32(lineno, toks[2], "element id")?;
                p.add_elem(obj, ElemId(id));
                for t in &toks[3..] {
                    let (gs, ys) = t.split_once('=').ok_or(FormatError::Syntax {
                        line: lineno,
                        msg: format!("expected gen=target, got {t}"),
                    })?;
                    let g = parse_gen_tag(gs).ok_or(FormatError::Syntax {
                        line: lineno,
                        msg: format!("unknown generator {gs}"),
                    })?;
                    if generator_source(obj, g).is_none() {
                        return err(lineno, format!("generator {gs} not valid at {}", obj.tag()));
                    }
                    p.set_act(obj, ElemId(id), g, ElemId(parse_u32(lineno, ys, "target id")?));
                }
            }
            _ => break,
        }
    }
    Ok(p)
}

// --- cospans ---

/// Emit a trace cospan: three presheaf sections plus leg lines.
pub fn print_cospan(c: &TraceCospan) -> String {
    let mut out = String::new();
    out.push_str("MID\n");
    print_presheaf(&c.mid, &mut out);
    out.push_str("INITIAL\n");
    print_presheaf(&c.initial, &mut out);
    out.push_str("FINAL\n");
    print_presheaf(&c.final_, &mut out);
    let mut legs: Vec<String> = Vec::new();
    for e in c.initial.all_elems() {
        legs.push(format!("LEG T: {} {}->{}", e.0.tag(), e.1, c.t.get(e).expect("leg")));
    }
    for e in c.final_.all_elems() {
        legs.push(format!("LEG S: {} {}->{}", e.0.tag(), e.1, c.s.get(e).expect("leg")));
    }
    legs.sort();
    for l in legs {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

pub fn parse_cospan(text: &str) -> Result<TraceCospan, FormatError> {
    let mut lines = Lines::new(text);
    let expect_header = |what: &str, lines: &mut Lines| -> Result<(), FormatError> {
        match lines.next() {
            Some((_, toks)) if toks.len() == 1 && toks[0] == what => Ok(()),
            Some((lineno, toks)) => err(lineno, format!("expected {what}, got {}", toks[0])),
            None => err(0, format!("expected {what}")),
        }
    };
    expect_header("MID", &mut lines)?;
    let mid = parse_presheaf_lines(&mut lines)?;
    expect_header("INITIAL", &mut lines)?;
    let initial = parse_presheaf_lines(&mut lines)?;
    expect_header("FINAL", &mut lines)?;
    let final_ = parse_presheaf_lines(&mut lines)?;
    let mut t = PshMap::new();
    let mut s = PshMap::new();
    while let Some((lineno, toks)) = lines.next() {
        if toks[0] != "LEG" || toks.len() != 4 {
            return err(lineno, "LEG S|T: tag src->dst");
        }
        let final_side = match toks[1] {
            "S:" => true,
            "T:" => false,
            other => return err(lineno, format!("expected S: or T:, got {other}")),
        };
        let obj = parse_obj_tag(toks[2]).ok_or(FormatError::Syntax {
            line: lineno,
            msg: format!("unknown object tag {}", toks[2]),
        })?;
        let (src, dst) = toks[3].split_once("->").ok_or(FormatError::Syntax {
            line: lineno,
            msg: "expected src->dst".into(),
        })?;
        let src = parse_u32(lineno, src, "src id")?;
        let dst = parse_u32(lineno, dst, "dst id")?;
        if final_side {
            s.insert((obj, ElemId(src)), ElemId(dst));
        } else {
            t.insert((obj, ElemId(src)), ElemId(dst));
        }
    }
    Ok(TraceCospan { mid, initial, final_, t, s, actions: None })
}

// --- behaviour systems ---

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

/// Unique display names for every state: the stored name where available
/// and unambiguous, `D<id>` or a disambiguating suffix otherwise.
pub fn state_names(sys: &BehaviourSystem) -> BTreeMap<StateId, String> {
    let mut used: std::collections::BTreeSet<String> = std::collections::BTreeSet::new();
    let mut out = BTreeMap::new();
    for (id, data) in sys.states() {
        let mut name = match &data.name {
            Some(n) if !n.is_empty() => sanitize(n),
            _ => format!("D{}", id.0),
        };
        if used.contains(&name) {
            name = format!("{name}_{}", id.0);
        }
        used.insert(name.clone());
        out.insert(id, name);
    }
    out
}

pub fn print_behaviour_system(sys: &BehaviourSystem) -> String {
    let names = state_names(sys);
    let mut out = String::new();
    for (id, data) in sys.states() {
        let _ = writeln!(out, "STATE {} {}", names[&id], data.arity);
        for (label, targets) in &data.rows {
            let row: Vec<&str> = targets.iter().map(|t| names[t].as_str()).collect();
            let _ = writeln!(out, "ROW {} -> {}", label.tag(), row.join(","));
        }
    }
    out
}

pub fn parse_behaviour_system(
    text: &str,
) -> Result<(BehaviourSystem, BTreeMap<String, StateId>), FormatError> {
    // first pass declares the states so rows can reference forwards
    let mut sys = BehaviourSystem::new();
    let mut names: BTreeMap<String, StateId> = BTreeMap::new();
    let mut lines = Lines::new(text);
    while let Some((lineno, toks)) = lines.next() {
        if toks[0] == "STATE" {
            if toks.len() != 3 {
                return err(lineno, "STATE name arity");
            }
            let arity = parse_u32(lineno, toks[2], "arity")?;
            if names.contains_key(toks[1]) {
                return err(lineno, format!("duplicate state {}", toks[1]));
            }
            let id = sys.add_state(arity, Some(toks[1].to_string()));
            names.insert(toks[1].to_string(), id);
        }
    }
    let mut lines = Lines::new(text);
    let mut cur: Option<StateId> = None;
    while let Some((lineno, toks)) = lines.next() {
        match toks[0] {
            "STATE" => cur = names.get(toks[1]).copied(),
            "ROW" => {
                let Some(state) = cur else {
                    return err(lineno, "ROW before any STATE");
                };
                if toks.len() != 4 || toks[2] != "->" {
                    return err(lineno, "ROW label -> name,name");
                }
                let label = parse_obj_tag(toks[1]).ok_or(FormatError::Syntax {
                    line: lineno,
                    msg: format!("unknown label {}", toks[1]),
                })?;
                for t in toks[3].split(',') {
                    let target = names.get(t).ok_or(FormatError::Syntax {
                        line: lineno,
                        msg: format!("unknown state {t}"),
                    })?;
                    sys.push_row(state, label, *target);
                }
            }
            other => return err(lineno, format!("unexpected {other}")),
        }
    }
    sys.validate().map_err(|e| FormatError::Invalid(e.to_string()))?;
    Ok((sys, names))
}
