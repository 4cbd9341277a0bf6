//! Command-line front end for the workbench.
//!
//! Exit codes: 0 on success/Same/Ok, 1 on Differ/Violation (with a
//! machine-readable witness on stdout), 2 on usage or parse errors, 3 on
//! Inconclusive or exhausted budgets. `PIPG_SEED` fixes the fuzz-suite
//! seeds; the CLI itself is deterministic.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pipg::format;
use pipg::report::pole_report;
use pipg::WallClock;
use pipg_core::behaviour::{
    translate_config, translate_config_positioned, z_config, zeta, MixedBehaviour, Translator,
};
use pipg_core::pi::{
    canonicalize, parse_defs_and_config, parse_process, print_config, print_defs, Configuration,
    DefinitionEnv, NameTable, Process,
};
use pipg_core::presheaf::iso_check;
use pipg_core::testing::{
    auto_battery, expansion_check, explore, fair_testing_compare, pole_membership,
    strong_bisim_check, weak_bisim_check, CompareOutcome, ConfSystem, ExplorationBudget,
    MixedSystem, Pole, PoleVerdict, SSystem,
};
use pipg_core::trace::{all_views, check_trace, compose_traces, sequentialize, TraceCospan};

#[derive(Parser)]
#[command(name = "pipg", version, about = "pi-calculus playground: traces, behaviours, testing")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LtsKind {
    Conf,
    M,
    S,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BisimMode {
    Weak,
    Strong,
    Expansion,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a .pi file and print its canonical form.
    Parse { file: PathBuf },
    /// Explore transitions up to a depth and print them.
    Step {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = LtsKind::Conf)]
        lts: LtsKind,
        #[arg(short, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
    /// Translate a configuration into a behaviour system.
    Translate {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Back-translate behaviours into process syntax.
    Zeta {
        file: PathBuf,
        #[arg(long)]
        state: Option<String>,
    },
    /// Trace cospan operations.
    Trace {
        #[command(subcommand)]
        sub: TraceCmd,
    },
    /// DOT renderings.
    Dot {
        #[command(subcommand)]
        sub: DotCmd,
    },
    /// Compare two configurations against a battery of tests.
    Fairtest {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value = "fair")]
        pole: String,
        /// `auto:<d>` or a file with one test process per line.
        #[arg(long, default_value = "auto:2")]
        tests: String,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
        /// Wall-clock cap in milliseconds per exploration.
        #[arg(long)]
        time_cap_ms: Option<u64>,
        /// Parallelise independent battery items.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Bisimulation checks between configurations, or of a configuration
    /// against its own translation in expansion mode.
    Bisim {
        left: PathBuf,
        right: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = BisimMode::Weak)]
        mode: BisimMode,
        /// Shorthand for `--mode expansion`.
        #[arg(long, default_value_t = false)]
        expansion: bool,
        #[arg(long, default_value_t = 6)]
        depth: u32,
        #[arg(long)]
        against: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
    /// Pole membership of a single state.
    Bbot {
        file: PathBuf,
        #[arg(long, default_value = "fair")]
        pole: String,
        #[arg(long, value_enum, default_value_t = LtsKind::Conf)]
        lts: LtsKind,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
}

#[derive(Subcommand)]
enum TraceCmd {
    /// Run the correctness criterion.
    Check { file: PathBuf },
    /// Print the deterministic decomposition into actions.
    Seq { file: PathBuf },
    /// Print every final agent's view.
    Views { file: PathBuf },
    /// Compose two cospans (the second starts where the first ends).
    Compose {
        first: PathBuf,
        second: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DotCmd {
    /// Causal graph of the middle object.
    Causal { file: PathBuf },
    /// Layered diagram of the whole trace.
    Diagram { file: PathBuf },
}

const EXIT_OK: u8 = 0;
const EXIT_DIFFER: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(cli))
}

fn read(path: &Path) -> Result<String, u8> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_USAGE
    })
}

fn load_pi(path: &Path) -> Result<(DefinitionEnv, Configuration, NameTable), u8> {
    let text = read(path)?;
    parse_defs_and_config(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_USAGE
    })
}

fn load_cospan(path: &Path) -> Result<TraceCospan, u8> {
    let text = read(path)?;
    let c = format::parse_cospan(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_USAGE
    })?;
    // incoherent presheaf data is a malformed file, not a trace violation
    for (name, p) in [("MID", &c.mid), ("INITIAL", &c.initial), ("FINAL", &c.final_)] {
        if let Err(errs) = p.validate() {
            eprintln!("error: {}: {name}: {}", path.display(), errs[0]);
            return Err(EXIT_USAGE);
        }
    }
    Ok(c)
}

fn parse_pole(s: &str) -> Result<Pole, u8> {
    s.parse().map_err(|_| {
        eprintln!("error: unknown pole {s} (fair|may|must|forallreach)");
        EXIT_USAGE
    })
}

fn budget(cap: usize) -> ExplorationBudget {
    ExplorationBudget { max_states: cap, max_depth: cap }
}

fn write_or_print(path: &Option<PathBuf>, content: &str) -> u8 {
    match path {
        Some(p) => match std::fs::write(p, content) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("error: cannot write {}: {e}", p.display());
                EXIT_USAGE
            }
        },
        None => {
            print!("{content}");
            EXIT_OK
        }
    }
}

fn run(cli: Cli) -> u8 {
    match cli.cmd {
        Cmd::Parse { file } => cmd_parse(&file),
        Cmd::Step { file, lts, n, cap } => cmd_step(&file, lts, n, cap),
        Cmd::Translate { file, output } => cmd_translate(&file, &output),
        Cmd::Zeta { file, state } => cmd_zeta(&file, state.as_deref()),
        Cmd::Trace { sub } => match sub {
            TraceCmd::Check { file } => cmd_trace_check(&file),
            TraceCmd::Seq { file } => cmd_trace_seq(&file),
            TraceCmd::Views { file } => cmd_trace_views(&file),
            TraceCmd::Compose { first, second, output } => {
                cmd_trace_compose(&first, &second, &output)
            }
        },
        Cmd::Dot { sub } => match sub {
            DotCmd::Causal { file } => match load_cospan(&file) {
                Ok(c) => {
                    print!("{}", pipg::dot::emit_dot_causal(&c.mid));
                    EXIT_OK
                }
                Err(code) => code,
            },
            DotCmd::Diagram { file } => match load_cospan(&file) {
                Ok(c) => match pipg::dot::emit_dot_diagram(&c) {
                    Ok(s) => {
                        print!("{s}");
                        EXIT_OK
                    }
                    Err(e) => {
                        println!("Violation: {e}");
                        EXIT_DIFFER
                    }
                },
                Err(code) => code,
            },
        },
        Cmd::Fairtest { left, right, pole, tests, cap, time_cap_ms, jobs } => {
            cmd_fairtest(&left, &right, &pole, &tests, cap, time_cap_ms, jobs)
        }
        Cmd::Bisim { left, right, mode, expansion, depth, against, cap } => {
            let mode = if expansion { BisimMode::Expansion } else { mode };
            cmd_bisim(&left, right.as_deref(), mode, depth, against.as_deref(), cap)
        }
        Cmd::Bbot { file, pole, lts, cap } => cmd_bbot(&file, &pole, lts, cap),
    }
}

fn cmd_parse(file: &Path) -> u8 {
    let Ok((defs, config, _table)) = load_pi(file) else { return EXIT_USAGE };
    let (canon, _) = canonicalize(&config);
    print!("{}", print_defs(&defs));
    println!("{}", print_config(&canon, &NameTable::new(), &defs));
    EXIT_OK
}

fn cmd_step(file: &Path, lts: LtsKind, n: usize, cap: usize) -> u8 {
    let Ok((defs, config, _)) = load_pi(file) else { return EXIT_USAGE };
    let b = ExplorationBudget { max_states: cap, max_depth: n };
    let g = match lts {
        LtsKind::Conf => explore(&ConfSystem { defs: &defs }, &config, &b, None),
        LtsKind::M => {
            let mut tr = Translator::new(&defs);
            let m = match translate_config(&config, &mut tr) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INCONCLUSIVE;
                }
            };
            explore(&MixedSystem { sys: &tr.sys }, &m, &b, None)
        }
        LtsKind::S => {
            let mut tr = Translator::new(&defs);
            let pb = match translate_config_positioned(&config, &mut tr) {
                Ok(pb) => pb,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INCONCLUSIVE;
                }
            };
            explore(&SSystem { sys: &tr.sys }, &pb, &b, None)
        }
    };
    for (i, d) in g.display.iter().enumerate() {
        println!("state {i}: {d}");
    }
    for (v, l, w) in &g.edges {
        println!("{v} --{l}--> {w}");
    }
    println!("complete: {}", g.complete);
    // the requested depth is part of the command, not a failed budget
    EXIT_OK
}

fn mixed_display(m: &MixedBehaviour, sys: &pipg_core::behaviour::BehaviourSystem) -> String {
    let names = format::state_names(sys);
    let chans: Vec<String> = m.gamma.iter().map(|n| format!("x{}", n.0)).collect();
    let mut parts = Vec::new();
    for (_, d, sigma) in &m.procs {
        let wires: Vec<String> = sigma.iter().map(|n| format!("x{}", n.0)).collect();
        parts.push(format!("{}[{}]", names[d], wires.join(",")));
    }
    format!("MIXED [{}] {}", chans.join(","), parts.join("; "))
}

fn cmd_translate(file: &Path, output: &Option<PathBuf>) -> u8 {
    let Ok((defs, config, _)) = load_pi(file) else { return EXIT_USAGE };
    let mut tr = Translator::new(&defs);
    let m = match translate_config(&config, &mut tr) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INCONCLUSIVE;
        }
    };
    let mut out = format::print_behaviour_system(&tr.sys);
    out.push_str(&format!("# {}\n", mixed_display(&m, &tr.sys)));
    write_or_print(output, &out)
}

fn cmd_zeta(file: &Path, state: Option<&str>) -> u8 {
    let is_bsys = file.extension().is_some_and(|e| e == "bsys");
    if is_bsys {
        let Ok(text) = read(file) else { return EXIT_USAGE };
        let (sys, names) = match format::parse_behaviour_system(&text) {
            Ok(x) => x,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        };
        let id = match state {
            Some(s) => match names.get(s) {
                Some(&id) => id,
                None => {
                    eprintln!("error: no state named {s}");
                    return EXIT_USAGE;
                }
            },
            None => match sys.states().next() {
                Some((id, _)) => id,
                None => {
                    eprintln!("error: empty system");
                    return EXIT_USAGE;
                }
            },
        };
        let (term, env) = zeta(&sys, id);
        print!("{}", print_defs(&env));
        let arity = sys.arity(id);
        let scope: Vec<(String, pipg_core::pi::Name)> =
            (0..arity).map(|i| (format!("c{i}"), pipg_core::pi::Name(i))).collect();
        println!(
            "{}",
            pipg_core::pi::print_process_in_scope(&term, &NameTable::new(), &env, &scope)
        );
        EXIT_OK
    } else {
        let Ok((defs, config, _)) = load_pi(file) else { return EXIT_USAGE };
        let mut tr = Translator::new(&defs);
        let m = match translate_config(&config, &mut tr) {
            Ok(m) => m,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_INCONCLUSIVE;
            }
        };
        let (zc, zdefs) = z_config(&tr.sys, &m);
        print!("{}", print_defs(&zdefs));
        println!("{}", print_config(&zc, &NameTable::new(), &zdefs));
        EXIT_OK
    }
}

fn cmd_trace_check(file: &Path) -> u8 {
    let Ok(c) = load_cospan(file) else { return EXIT_USAGE };
    match check_trace(&c) {
        Ok(n) => {
            println!("Ok length={n}");
            EXIT_OK
        }
        Err(v) => {
            println!("Violation: {v}");
            EXIT_DIFFER
        }
    }
}

fn cmd_trace_seq(file: &Path) -> u8 {
    let Ok(c) = load_cospan(file) else { return EXIT_USAGE };
    match sequentialize(&c) {
        Ok(actions) => {
            for (i, a) in actions.iter().enumerate() {
                let attach: Vec<String> = a.attach.iter().map(|c| c.to_string()).collect();
                println!("{i}: {} attach=[{}]", a.label.tag(), attach.join(","));
            }
            EXIT_OK
        }
        Err(v) => {
            println!("Violation: {v}");
            EXIT_DIFFER
        }
    }
}

fn cmd_trace_views(file: &Path) -> u8 {
    let Ok(c) = load_cospan(file) else { return EXIT_USAGE };
    match all_views(&c) {
        Ok(views) => {
            for (y, word, origin) in views {
                let w: Vec<String> = word.iter().map(|l| l.tag()).collect();
                println!(
                    "agent{}#{}: [{}] from agent{}#{}",
                    y.arity,
                    y.id,
                    w.join(" "),
                    origin.arity,
                    origin.id
                );
            }
            EXIT_OK
        }
        Err(e) => {
            println!("Violation: {e}");
            EXIT_DIFFER
        }
    }
}

fn cmd_trace_compose(first: &Path, second: &Path, output: &Option<PathBuf>) -> u8 {
    let (Ok(a), Ok(b)) = (load_cospan(first), load_cospan(second)) else { return EXIT_USAGE };
    // identify the shared position: literal match first, isomorphism next
    let ident = if a.final_ == b.initial {
        pipg_core::presheaf::PshMap::identity(&a.final_)
    } else {
        match iso_check(&a.final_, &b.initial) {
            pipg_core::presheaf::IsoResult::Iso(i) => i,
            _ => {
                println!("Violation: positions do not match");
                return EXIT_DIFFER;
            }
        }
    };
    match compose_traces(&a, &b, &ident) {
        Ok(c) => write_or_print(output, &format::print_cospan(&c)),
        Err(e) => {
            println!("Violation: {e}");
            EXIT_DIFFER
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_fairtest(
    left: &Path,
    right: &Path,
    pole: &str,
    tests: &str,
    cap: usize,
    time_cap_ms: Option<u64>,
    jobs: usize,
) -> u8 {
    let pole = match parse_pole(pole) {
        Ok(p) => p,
        Err(c) => return c,
    };
    let Ok((defs_l, conf_l, table_l)) = load_pi(left) else { return EXIT_USAGE };
    let Ok((defs_r, conf_r, _)) = load_pi(right) else { return EXIT_USAGE };
    if conf_l.gamma != conf_r.gamma {
        eprintln!("error: configurations must share their channel set (same header length)");
        return EXIT_USAGE;
    }
    // one environment for both sides: shift the right constants
    let (defs, offset) = merge_defs(&defs_l, &defs_r);
    let conf_r = Configuration::new(
        conf_r.gamma.clone(),
        conf_r.procs.iter().map(|p| shift_consts(p, offset)).collect(),
    );

    let battery: Vec<Process> = if let Some(d) = tests.strip_prefix("auto:") {
        let Ok(depth) = d.parse::<usize>() else {
            eprintln!("error: bad battery spec {tests}");
            return EXIT_USAGE;
        };
        auto_battery(&conf_l.gamma, depth)
    } else {
        let Ok(text) = read(Path::new(tests)) else { return EXIT_USAGE };
        let scope: Vec<(String, pipg_core::pi::Name)> = conf_l
            .gamma
            .iter()
            .map(|&n| (table_l.get_cloned(n).unwrap_or(format!("x{}", n.0)), n))
            .collect();
        let empty = DefinitionEnv::new();
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let trimmed = line.split('#').next().unwrap_or("").trim();
            if trimmed.is_empty() {
                continue;
            }
            match parse_process(trimmed, &scope, &empty) {
                Ok(p) => out.push(p),
                Err(e) => {
                    eprintln!("error: test file line {}: {e}", i + 1);
                    return EXIT_USAGE;
                }
            }
        }
        out
    };
    let tests_c: Vec<Configuration> = battery
        .iter()
        .map(|p| Configuration::new(conf_l.gamma.clone(), vec![p.clone()]))
        .collect();

    let b = budget(cap);
    let outcome = if jobs <= 1 {
        let sys = ConfSystem { defs: &defs };
        let watch = time_cap_ms.map(WallClock::new);
        fair_testing_compare(
            &sys,
            &conf_l,
            &conf_r,
            &tests_c,
            pole,
            &b,
            watch.as_ref().map(|w| w as &dyn pipg_core::testing::Stopwatch),
        )
    } else {
        parallel_compare(&defs, &conf_l, &conf_r, &tests_c, pole, &b, jobs, time_cap_ms)
    };
    match outcome {
        CompareOutcome::Same => {
            println!(
                "{}",
                serde_json::json!({
                    "verdict": "same",
                    "pole": pole.to_string(),
                    "tests": tests_c.len(),
                })
            );
            EXIT_OK
        }
        CompareOutcome::Differ { test, left_passes } => {
            let shown = print_config(&tests_c[test], &table_l, &defs);
            println!(
                "{}",
                serde_json::json!({
                    "verdict": "differ",
                    "pole": pole.to_string(),
                    "test": shown,
                    "passes": if left_passes { "left" } else { "right" },
                })
            );
            EXIT_DIFFER
        }
        CompareOutcome::Inconclusive => {
            println!("{}", serde_json::json!({"verdict": "inconclusive"}));
            EXIT_INCONCLUSIVE
        }
    }
}

/// Split the battery across threads; the verdict is the earliest
/// disagreement by test index, independent of scheduling.
#[allow(clippy::too_many_arguments)]
fn parallel_compare(
    defs: &DefinitionEnv,
    l: &Configuration,
    r: &Configuration,
    tests: &[Configuration],
    pole: Pole,
    b: &ExplorationBudget,
    jobs: usize,
    time_cap_ms: Option<u64>,
) -> CompareOutcome {
    let chunk = tests.len().div_ceil(jobs.max(1)).max(1);
    let results: Vec<(usize, CompareOutcome)> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for (k, part) in tests.chunks(chunk).enumerate() {
            handles.push(scope.spawn(move || {
                let sys = ConfSystem { defs };
                let watch = time_cap_ms.map(WallClock::new);
                let out = fair_testing_compare(
                    &sys,
                    l,
                    r,
                    part,
                    pole,
                    b,
                    watch.as_ref().map(|w| w as &dyn pipg_core::testing::Stopwatch),
                );
                (k * chunk, out)
            }));
        }
        handles.into_iter().map(|h| h.join().expect("battery thread")).collect()
    });
    let mut best: Option<(usize, CompareOutcome)> = None;
    let mut inconclusive = false;
    for (base, out) in results {
        match out {
            CompareOutcome::Same => {}
            CompareOutcome::Inconclusive => inconclusive = true,
            CompareOutcome::Differ { test, left_passes } => {
                let abs = base + test;
                if best.as_ref().is_none_or(|(b2, _)| abs < *b2) {
                    best = Some((abs, CompareOutcome::Differ { test: abs, left_passes }));
                }
            }
        }
    }
    match best {
        Some((_, out)) => out,
        None if inconclusive => CompareOutcome::Inconclusive,
        None => CompareOutcome::Same,
    }
}

fn merge_defs(a: &DefinitionEnv, b: &DefinitionEnv) -> (DefinitionEnv, u32) {
    let mut out = a.clone();
    let offset = a.len() as u32;
    for (_, d) in b.iter() {
        let mut d2 = d.clone();
        d2.body = shift_consts(&d.body, offset);
        out.add(d2);
    }
    (out, offset)
}

fn shift_consts(p: &Process, offset: u32) -> Process {
    match p {
        Process::Sum(sums) => {
            Process::Sum(sums.iter().map(|(g, c)| (g.clone(), shift_consts(c, offset))).collect())
        }
        Process::Par(l, r) => {
            Process::Par(Box::new(shift_consts(l, offset)), Box::new(shift_consts(r, offset)))
        }
        Process::Const(id, args) => {
            Process::Const(pipg_core::pi::ConstId(id.0 + offset), args.clone())
        }
    }
}

fn cmd_bisim(
    left: &Path,
    right: Option<&Path>,
    mode: BisimMode,
    depth: u32,
    against: Option<&str>,
    cap: usize,
) -> u8 {
    match mode {
        BisimMode::Expansion => {
            if right.is_some() || !matches!(against, None | Some("auto")) {
                eprintln!(
                    "error: expansion mode compares a configuration against `auto` (its translation)"
                );
                return EXIT_USAGE;
            }
            let Ok((defs, config, _)) = load_pi(left) else { return EXIT_USAGE };
            let mut tr = Translator::new(&defs);
            let m = match translate_config(&config, &mut tr) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INCONCLUSIVE;
                }
            };
            match expansion_check(&config, &defs, &m, &tr.sys, depth) {
                Ok(()) => {
                    println!(
                        "{}",
                        serde_json::json!({"verdict": "expansion-holds", "depth": depth})
                    );
                    EXIT_OK
                }
                Err(w) => {
                    println!("{}", serde_json::json!({"verdict": "differ", "witness": w}));
                    EXIT_DIFFER
                }
            }
        }
        BisimMode::Weak | BisimMode::Strong => {
            let Some(right) = right else {
                eprintln!("error: this mode needs two files");
                return EXIT_USAGE;
            };
            let Ok((defs_l, conf_l, _)) = load_pi(left) else { return EXIT_USAGE };
            let Ok((defs_r, conf_r, _)) = load_pi(right) else { return EXIT_USAGE };
            let b = budget(cap);
            let gl = explore(&ConfSystem { defs: &defs_l }, &conf_l, &b, None);
            let gr = explore(&ConfSystem { defs: &defs_r }, &conf_r, &b, None);
            if !gl.complete || !gr.complete {
                println!("{}", serde_json::json!({"verdict": "inconclusive"}));
                return EXIT_INCONCLUSIVE;
            }
            let same = match mode {
                BisimMode::Weak => weak_bisim_check(&gl, gl.root, &gr, gr.root),
                _ => strong_bisim_check(&gl, gl.root, &gr, gr.root),
            };
            println!(
                "{}",
                serde_json::json!({"verdict": if same { "bisimilar" } else { "differ" }})
            );
            if same {
                EXIT_OK
            } else {
                EXIT_DIFFER
            }
        }
    }
}

fn cmd_bbot(file: &Path, pole: &str, lts: LtsKind, cap: usize) -> u8 {
    let pole = match parse_pole(pole) {
        Ok(p) => p,
        Err(c) => return c,
    };
    let Ok((defs, config, _)) = load_pi(file) else { return EXIT_USAGE };
    let b = budget(cap);
    let (g, verdict) = match lts {
        LtsKind::Conf => {
            let sys = ConfSystem { defs: &defs };
            let g = explore(&sys, &config, &b, None);
            let v = pole_membership(&g, g.root, pole);
            (g, v)
        }
        LtsKind::M => {
            let mut tr = Translator::new(&defs);
            let m = match translate_config(&config, &mut tr) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INCONCLUSIVE;
                }
            };
            let sys = MixedSystem { sys: &tr.sys };
            let g = explore(&sys, &m, &b, None);
            let v = pole_membership(&g, g.root, pole);
            (g, v)
        }
        LtsKind::S => {
            let mut tr = Translator::new(&defs);
            let pb = match translate_config_positioned(&config, &mut tr) {
                Ok(pb) => pb,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INCONCLUSIVE;
                }
            };
            let sys = SSystem { sys: &tr.sys };
            let g = explore(&sys, &pb, &b, None);
            let v = pole_membership(&g, g.root, pole);
            (g, v)
        }
    };
    let rep = pole_report(pole, &g, &verdict);
    println!("{}", serde_json::to_string(&rep).expect("report serialises"));
    match verdict {
        PoleVerdict::Holds => EXIT_OK,
        PoleVerdict::Fails(_) => EXIT_DIFFER,
        PoleVerdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}
