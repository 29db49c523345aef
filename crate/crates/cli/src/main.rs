//! Command-line front end.
//!
//! Subcommands:
//!   check PATHS…     check proof scripts against a library
//!   closure FILE     dump the diagrammatic closure of a state file
//!   decide FILE      run the exponential decision procedure (small states)
//!   explain FILE LIT print a derivation trace for a closure member
//!
//! Flags: --library DIR (repeatable; default from E_LIBRARY_PATH),
//! --trace, --json, --jobs N. Exit codes: 0 all passed, 1 a check failed,
//! 2 parse or I/O error.

use euclid_core::engine::ProofState;
use euclid_core::lang::Literal;
use euclid_core::parser;
use euclid_core::render;
use euclid_core::run::Session;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// stdout writes ignore broken pipes (e.g. `euclid check … | head`).
macro_rules! out {
    ($($arg:tt)*) => {{
        let mut stdout = std::io::stdout().lock();
        let _ = writeln!(stdout, $($arg)*);
    }};
}

struct Options {
    library: Vec<PathBuf>,
    trace: bool,
    json: bool,
    jobs: Option<usize>,
    args: Vec<String>,
}

fn usage() -> ! {
    eprintln!(
        "usage: euclid <check|closure|decide|explain> [args] \
         [--library DIR] [--trace] [--json] [--jobs N]"
    );
    std::process::exit(2);
}

fn parse_args() -> (String, Options) {
    let mut it = std::env::args().skip(1);
    let Some(cmd) = it.next() else { usage() };
    let mut opts = Options {
        library: Vec::new(),
        trace: false,
        json: false,
        jobs: None,
        args: Vec::new(),
    };
    while let Some(a) = it.next() {
        match a.as_str() {
            "--library" => match it.next() {
                Some(d) => opts.library.push(PathBuf::from(d)),
                None => usage(),
            },
            "--trace" => opts.trace = true,
            "--json" => opts.json = true,
            "--jobs" => match it.next().and_then(|n| n.parse().ok()) {
                Some(n) => opts.jobs = Some(n),
                None => usage(),
            },
            _ => opts.args.push(a),
        }
    }
    if opts.library.is_empty() {
        if let Ok(d) = std::env::var("E_LIBRARY_PATH") {
            opts.library.push(PathBuf::from(d));
        }
    }
    (cmd, opts)
}

fn main() -> ExitCode {
    let (cmd, opts) = parse_args();
    match cmd.as_str() {
        "check" => cmd_check(&opts),
        "closure" => cmd_closure(&opts),
        "decide" => cmd_decide(&opts),
        "explain" => cmd_explain(&opts),
        _ => usage(),
    }
}

#[derive(Serialize)]
struct JsonVerdict<'a> {
    file: &'a str,
    name: &'a str,
    verdict: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    millis: u128,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    trace: Vec<String>,
}

fn cmd_check(opts: &Options) -> ExitCode {
    #[cfg(feature = "parallel")]
    if let Some(n) = opts.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = opts.jobs; // sequential fallback ignores --jobs

    if opts.args.is_empty() {
        usage();
    }
    let mut session = Session::new();
    let targets: Vec<PathBuf> = opts.args.iter().map(PathBuf::from).collect();
    for dir in &opts.library {
        if let Err(e) = session.load_library_dir(dir, &targets) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let mut exit = ExitCode::SUCCESS;
    for path in &targets {
        if let Err(e) = session.load_file(path, &opts.library) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let mut any_fail = false;
    let mut any_parse_error = false;
    for outcome in &session.outcomes {
        let file = outcome.path.display().to_string();
        if let Some(err) = &outcome.error {
            any_parse_error = true;
            if opts.json {
                out!(
                    "{}",
                    serde_json::json!({ "file": file, "verdict": "error", "error": err })
                );
            } else {
                eprintln!("{err}");
            }
            continue;
        }
        let Some(report) = &outcome.report else {
            continue;
        };
        for v in &report.verdicts {
            let verdict = if v.assumed {
                "assumed"
            } else if v.passed {
                "pass"
            } else {
                any_fail = true;
                "fail"
            };
            if opts.json {
                let jv = JsonVerdict {
                    file: &file,
                    name: &v.name,
                    verdict,
                    error: v.error.as_ref().map(|e| e.to_string()),
                    millis: v.millis,
                    trace: if opts.trace {
                        v.trace
                            .iter()
                            .map(|t| format!("{}: {}", t.span, t.what))
                            .collect()
                    } else {
                        Vec::new()
                    },
                };
                out!("{}", serde_json::to_string(&jv).unwrap());
            } else {
                match &v.error {
                    None => out!("{file}: {} {}", v.name, verdict),
                    Some(e) => out!("{file}: {} {verdict}: {e}", v.name),
                }
                if opts.trace {
                    for t in &v.trace {
                        out!("    {}: {}", t.span, t.what);
                    }
                }
            }
        }
    }
    if any_parse_error {
        exit = ExitCode::from(2);
    } else if any_fail {
        exit = ExitCode::from(1);
    }
    exit
}

/// Parses a state file into a proof state with its literals assimilated.
fn load_state(path: &str) -> Result<ProofState, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    let (decls, lits) =
        parser::parse_state(&text).map_err(|e| parser::render_diagnostic(path, e.span, &e.msg))?;
    let mut st = ProofState::empty();
    let span = Default::default();
    for (n, s) in &decls {
        st.register(n, *s, span).map_err(|e| e.to_string())?;
    }
    let mut resolved = Vec::new();
    for l in &lits {
        resolved.push(st.resolve_lit(l, span).map_err(|e| e.to_string())?);
    }
    st.assimilate(&resolved);
    Ok(st)
}

fn cmd_closure(opts: &Options) -> ExitCode {
    let [file] = opts.args.as_slice() else {
        usage()
    };
    let mut st = match load_state(file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    st.diagram.saturate();
    if st.inconsistent {
        out!("inconsistent");
        return ExitCode::SUCCESS;
    }
    let mut lines: Vec<String> = st
        .diagram
        .facts()
        .map(|f| render::diagram_lit_str(f, &st.table))
        .collect();
    lines.sort();
    lines.dedup();
    for l in lines {
        out!("{l}");
    }
    ExitCode::SUCCESS
}

fn cmd_decide(opts: &Options) -> ExitCode {
    let [file] = opts.args.as_slice() else {
        usage()
    };
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {file}: {e}");
            return ExitCode::from(2);
        }
    };
    let (decls, lits) = match parser::parse_state(&text) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("{}", parser::render_diagnostic(file, e.span, &e.msg));
            return ExitCode::from(2);
        }
    };
    let mut st = ProofState::empty();
    let span = Default::default();
    let mut resolved: Vec<Literal> = Vec::new();
    for (n, s) in &decls {
        if let Err(e) = st.register(n, *s, span) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    for l in &lits {
        match st.resolve_lit(l, span) {
            Ok(r) => resolved.push(r),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    }
    let sorts: Vec<_> = (0..st.table.len())
        .map(|i| st.table.sort(euclid_core::lang::Obj(i as u32)))
        .collect();
    match euclid_core::oracle::full_decide(&sorts, &resolved) {
        Ok(euclid_core::oracle::Decision::Consistent) => {
            out!("consistent");
            ExitCode::SUCCESS
        }
        Ok(euclid_core::oracle::Decision::Inconsistent) => {
            out!("inconsistent");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn cmd_explain(opts: &Options) -> ExitCode {
    let [file, literal] = opts.args.as_slice() else {
        usage()
    };
    let mut st = match load_state(file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let decls: Vec<(String, euclid_core::lang::Sort)> = st
        .table
        .iter()
        .map(|(_, n, s)| (n.to_string(), s))
        .collect();
    let lit_ast = match parser::parse_literal(literal, &decls) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("{}", parser::render_diagnostic("<literal>", e.span, &e.msg));
            return ExitCode::from(2);
        }
    };
    let lit = match st.resolve_lit(&lit_ast, Default::default()) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match &lit {
        Literal::Diagram(d) => {
            if !st.diagram.is_direct_consequence(*d) {
                out!("not derivable: {}", render::diagram_lit_str(d, &st.table));
                return ExitCode::from(1);
            }
            match st.diagram.explain(*d) {
                Some(steps) if !steps.is_empty() => {
                    for s in steps {
                        let binding: Vec<String> = s
                            .binding
                            .iter()
                            .map(|(n, o)| format!("{n} -> {}", st.table.name(*o)))
                            .collect();
                        out!(
                            "{:<22} {{{}}}  |- {}",
                            s.rule,
                            binding.join(", "),
                            render::diagram_lit_str(&s.produced, &st.table)
                        );
                    }
                }
                _ => out!("given: {}", render::diagram_lit_str(d, &st.table)),
            }
            ExitCode::SUCCESS
        }
        Literal::Metric(m) => {
            if st.metric.entails(m) {
                out!("entailed by linear arithmetic over the metric context:");
                for f in st.metric.facts() {
                    out!("  {}", render::metric_lit_str(f, &st.table));
                }
                ExitCode::SUCCESS
            } else {
                out!("not entailed: {}", render::metric_lit_str(m, &st.table));
                ExitCode::from(1)
            }
        }
        Literal::Falsity => {
            if st.inconsistent {
                out!("the state is contradictory");
                ExitCode::SUCCESS
            } else {
                out!("the state is consistent");
                ExitCode::from(1)
            }
        }
    }
}
