//! Deterministic DOT emitters: the causal graph of a middle object, and a
//! layered rendering of a trace (time flows upwards).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use pipg_core::presheaf::{Elem, ObjC, Presheaf};
use pipg_core::trace::{causal_graph, sequentialize, CgKind, TraceCospan};

fn node_id(e: Elem) -> String {
    format!("\"{}_{}\"", e.0.tag(), e.1)
}

fn node_decl(kind: CgKind, e: Elem) -> String {
    let shape = match kind {
        CgKind::Channel => "ellipse",
        CgKind::Agent => "box",
        CgKind::Core => "diamond",
    };
    format!("  {} [shape={shape},label=\"{}#{}\"];\n", node_id(e), e.0.tag(), e.1)
}

/// The causal graph: channels as ellipses, agents as boxes, cores as
/// diamonds, enabling edges directed.
pub fn emit_dot_causal(u: &Presheaf) -> String {
    let cg = causal_graph(u);
    let mut out = String::from("digraph causal {\n  rankdir=BT;\n");
    for &(kind, e) in &cg.verts {
        out.push_str(&node_decl(kind, e));
    }
    for &(v, w) in &cg.edges {
        let _ = writeln!(out, "  {} -> {};", node_id(cg.verts[v].1), node_id(cg.verts[w].1));
    }
    out.push_str("}\n");
    out
}

/// A layered string-diagram sketch of a trace: initial elements at the
/// bottom, each action's core and outputs above everything it consumes.
pub fn emit_dot_diagram(c: &TraceCospan) -> Result<String, String> {
    let actions = sequentialize(c).map_err(|v| v.to_string())?;
    let cg = causal_graph(&c.mid);

    // stage of birth: initial elements at 0, action k's outputs at k
    let mut stage: BTreeMap<Elem, usize> = BTreeMap::new();
    for e in c.initial.all_elems() {
        stage.insert(c.t.apply(e), 0);
    }
    let mut core_stage: BTreeMap<Elem, usize> = BTreeMap::new();
    for (k, a) in actions.iter().enumerate() {
        core_stage.insert(a.slots.core, k + 1);
        for (_, ag) in &a.slots.after {
            stage.insert(ag.elem(), k + 1);
        }
        for &ch in &a.slots.created {
            stage.insert((ObjC::Star, ch), k + 1);
        }
    }

    let mut out = String::from("digraph diagram {\n  rankdir=BT;\n");
    for &(kind, e) in &cg.verts {
        out.push_str(&node_decl(kind, e));
    }
    // rank groups per stage
    let mut by_stage: BTreeMap<usize, Vec<Elem>> = BTreeMap::new();
    for (&e, &s) in &stage {
        by_stage.entry(2 * s).or_default().push(e);
    }
    for (&e, &s) in &core_stage {
        by_stage.entry(2 * s - 1).or_default().push(e);
    }
    for (_, elems) in by_stage {
        out.push_str("  { rank=same;");
        for e in elems {
            let _ = write!(out, " {};", node_id(e));
        }
        out.push_str(" }\n");
    }
    // wiring: agents to their channels, cores to the agents they touch
    for (n, id) in c.mid.agents() {
        for ch in c.mid.agent_channels(n, id) {
            let _ = writeln!(
                out,
                "  {} -> {} [dir=none,style=dotted];",
                node_id((ObjC::Agent(n), id)),
                node_id((ObjC::Star, ch))
            );
        }
    }
    for a in &actions {
        for (_, ag) in &a.slots.before {
            let _ = writeln!(out, "  {} -> {};", node_id(ag.elem()), node_id(a.slots.core));
        }
        for (_, ag) in &a.slots.after {
            let _ = writeln!(out, "  {} -> {};", node_id(a.slots.core), node_id(ag.elem()));
        }
        for &ch in &a.slots.created {
            let _ = writeln!(out, "  {} -> {};", node_id(a.slots.core), node_id((ObjC::Star, ch)));
        }
    }
    out.push_str("}\n");
    Ok(out)
}
