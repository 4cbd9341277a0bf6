//! Machine-readable verdicts for the CLI.

use serde::Serialize;

use pipg_core::testing::{LtsGraph, Pole, PoleVerdict};
use pipg_core::SigmaLabel;

#[derive(Serialize)]
pub struct Report {
    pub pole: String,
    pub complete: bool,
    pub verdict: String,
    #[serde(rename = "witness-path")]
    pub witness_path: Vec<String>,
    pub states: usize,
    pub edges: usize,
    #[serde(rename = "budget-used")]
    pub budget_used: usize,
}

fn label_str(l: SigmaLabel) -> String {
    l.to_string()
}

pub fn pole_report(pole: Pole, g: &LtsGraph, verdict: &PoleVerdict) -> Report {
    let (verdict_s, witness) = match verdict {
        PoleVerdict::Holds => ("pass".to_string(), Vec::new()),
        PoleVerdict::Fails(w) => {
            let mut path: Vec<String> = w.path.iter().copied().map(label_str).collect();
            path.push(format!("[{}]", w.note));
            ("fail".to_string(), path)
        }
        PoleVerdict::Inconclusive => ("inconclusive".to_string(), Vec::new()),
    };
    Report {
        pole: pole.to_string(),
        complete: g.complete,
        verdict: verdict_s,
        witness_path: witness,
        states: g.vertex_count(),
        edges: g.edges.len(),
        budget_used: g.states_expanded,
    }
}
