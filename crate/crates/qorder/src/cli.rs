//! Command-line surface: `check`, `synthesize`, `simulate`, `demo-nogo`.
//!
//! Exit-code contract (total: every invocation ends in one of these):
//!
//! | code | meaning                                              |
//! |------|------------------------------------------------------|
//! | 0    | feasible / success                                   |
//! | 1    | infeasible (or synthesis refused: set not orthogonal)|
//! | 2    | necessary tests passed (sorter check, not a proof)   |
//! | 3    | decode failure during simulation (internal bug)      |
//! | 4    | demo expectations not met                            |
//! | 64   | usage error                                          |
//! | 65   | malformed input file                                 |
//! | 66   | unreadable input file                                |
//! | 73   | cannot write output file                             |
//!
//! `--tol` defaults to 1e-9 and can also be set through the `QORDER_TOL`
//! environment variable; `--json` switches reports to machine-readable
//! documents with a `schema` field.

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::feasibility::{
    cloning_demo_spec, comparator_feasible, sorter_feasible, unitary_extension_feasible,
    FeasibilityReport, Verdict, Violation,
};
use crate::io::{
    self, comparator_to_json, load_circuit, load_state_set, load_transform_spec, sorter_to_json,
    LoadedCircuit, SCHEMA_VERSION,
};
use crate::linalg::{Complex, StateVector};
use crate::ordering::{classify_set, OrderedStateSet};
use crate::simulator::{run_compare, run_sort};
use crate::synthesis::{build_comparator, build_sorter};
use crate::{Error, DEFAULT_TOL};

pub const EXIT_FEASIBLE: u8 = 0;
pub const EXIT_INFEASIBLE: u8 = 1;
pub const EXIT_NECESSARY_ONLY: u8 = 2;
pub const EXIT_DECODE_FAILURE: u8 = 3;
pub const EXIT_DEMO_MISMATCH: u8 = 4;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;
pub const EXIT_NOINPUT: u8 = 66;
pub const EXIT_CANTCREAT: u8 = 73;

#[derive(Parser)]
#[command(
    name = "qorder",
    version,
    about = "Decide, certify, and simulate comparator and sorter machines over finite quantum state sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckMode {
    /// Pairwise orthogonality test behind the comparator machine.
    Comparator,
    /// Triple overlap conditions behind the sorting machine.
    Sorter,
    /// General unitary-extension test on a transformation spec file.
    Spec,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SynthMode {
    Comparator,
    Sorter,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether a transformation is realizable by a unitary machine.
    Check {
        /// State-set file (modes comparator/sorter) or transform-spec file (mode spec).
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: CheckMode,
        /// Feasibility tolerance.
        #[arg(long, env = "QORDER_TOL", default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Emit a machine-readable JSON report.
        #[arg(long)]
        json: bool,
    },
    /// Build a comparator or sorting-network circuit for an orthogonal set.
    Synthesize {
        /// State-set file; the set must be mutually orthogonal.
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: SynthMode,
        /// Register count for sorter mode (2..=6).
        #[arg(long)]
        n: Option<usize>,
        /// Output path for the circuit JSON.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "QORDER_TOL", default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Run a synthesized circuit on alphabet indices and decode the result.
    Simulate {
        /// Circuit file produced by `synthesize`.
        circuit: PathBuf,
        /// Comma-separated 1-based alphabet indices, e.g. "3,2,1".
        #[arg(long)]
        input: String,
        #[arg(long)]
        json: bool,
    },
    /// Run the built-in impossibility demonstrations end to end.
    DemoNogo {
        #[arg(long, env = "QORDER_TOL", default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
}

/// Parse argv and run; returns the process exit code.
pub fn run() -> u8 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return EXIT_FEASIBLE;
        }
        Err(e) => {
            eprint!("{e}");
            return EXIT_USAGE;
        }
    };
    match cli.command {
        Command::Check {
            file,
            mode,
            tol,
            json,
        } => cmd_check(&file, mode, tol, json),
        Command::Synthesize {
            file,
            mode,
            n,
            out,
            tol,
            json,
        } => cmd_synthesize(&file, mode, n, &out, tol, json),
        Command::Simulate {
            circuit,
            input,
            json,
        } => cmd_simulate(&circuit, &input, json),
        Command::DemoNogo { tol, json } => cmd_demo_nogo(tol, json),
    }
}

fn exit_for_io(err: &io::IoError, path: &Path) -> u8 {
    eprintln!("qorder: {}: {err}", path.display());
    match err {
        io::IoError::Io(_) => EXIT_NOINPUT,
        _ => EXIT_DATA,
    }
}

fn print_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn fmt_complex(z: Complex) -> String {
    if z.im == 0.0 {
        format!("{:.9}", z.re)
    } else if z.im < 0.0 {
        format!("{:.9}-{:.9}i", z.re, -z.im)
    } else {
        format!("{:.9}+{:.9}i", z.re, z.im)
    }
}

#[derive(Serialize)]
struct JsonViolation {
    i: usize,
    j: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<usize>,
    lhs: [f64; 2],
    rhs: [f64; 2],
    residual: f64,
}

impl From<&Violation> for JsonViolation {
    fn from(v: &Violation) -> Self {
        JsonViolation {
            i: v.i,
            j: v.j,
            q: v.q,
            lhs: [v.lhs.re, v.lhs.im],
            rhs: [v.rhs.re, v.rhs.im],
            residual: v.residual,
        }
    }
}

#[derive(Serialize)]
struct JsonReport {
    schema: u32,
    command: &'static str,
    mode: &'static str,
    tolerance: f64,
    verdict: &'static str,
    max_residual: f64,
    violations: Vec<JsonViolation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    set: Option<JsonSetSummary>,
}

#[derive(Serialize)]
struct JsonSetSummary {
    n: usize,
    dim: usize,
    classification: &'static str,
}

fn report_to_json(
    report: &FeasibilityReport,
    mode: &'static str,
    set: Option<&OrderedStateSet>,
) -> JsonReport {
    JsonReport {
        schema: SCHEMA_VERSION,
        command: "check",
        mode,
        tolerance: report.tolerance,
        verdict: report.verdict.as_str(),
        max_residual: report.max_residual,
        violations: report.violations.iter().map(JsonViolation::from).collect(),
        set: set.map(|s| JsonSetSummary {
            n: s.len(),
            dim: s.dim(),
            classification: classify_set(s).as_str(),
        }),
    }
}

fn print_report_text(report: &FeasibilityReport, mode: &str, set: Option<&OrderedStateSet>) {
    if let Some(s) = set {
        println!(
            "set: N={} dim={} classification={}",
            s.len(),
            s.dim(),
            classify_set(s).as_str()
        );
    }
    println!("check: {mode} (tolerance {:e})", report.tolerance);
    println!("verdict: {}", report.verdict.as_str());
    println!("max residual: {:.12e}", report.max_residual);
    if !report.violations.is_empty() {
        println!("violations ({}):", report.violations.len());
        for v in &report.violations {
            match v.q {
                Some(q) => println!(
                    "  triple ({},{},{q}): lhs={} rhs={} residual={:.12e}",
                    v.i,
                    v.j,
                    fmt_complex(v.lhs),
                    fmt_complex(v.rhs),
                    v.residual
                ),
                None => println!(
                    "  pair ({},{}): lhs={} rhs={} residual={:.12e}",
                    v.i,
                    v.j,
                    fmt_complex(v.lhs),
                    fmt_complex(v.rhs),
                    v.residual
                ),
            }
        }
    }
}

fn verdict_exit(verdict: Verdict) -> u8 {
    match verdict {
        Verdict::Feasible => EXIT_FEASIBLE,
        Verdict::Infeasible => EXIT_INFEASIBLE,
        Verdict::NecessaryTestsPassed => EXIT_NECESSARY_ONLY,
    }
}

fn cmd_check(file: &Path, mode: CheckMode, tol: f64, json: bool) -> u8 {
    if !tol.is_finite() || tol < 0.0 {
        eprintln!("qorder: --tol must be a finite nonnegative real");
        return EXIT_USAGE;
    }
    let (report, mode_name, set) = match mode {
        CheckMode::Spec => {
            let loaded = match load_transform_spec(file) {
                Ok(l) => l,
                Err(e) => return exit_for_io(&e, file),
            };
            print_warnings(&loaded.warnings);
            (
                unitary_extension_feasible(&loaded.spec, tol),
                "spec",
                None,
            )
        }
        CheckMode::Comparator | CheckMode::Sorter => {
            let loaded = match load_state_set(file) {
                Ok(l) => l,
                Err(e) => return exit_for_io(&e, file),
            };
            print_warnings(&loaded.warnings);
            let result = if mode == CheckMode::Comparator {
                comparator_feasible(&loaded.set, tol)
            } else {
                sorter_feasible(&loaded.set, tol)
            };
            let name = if mode == CheckMode::Comparator {
                "comparator"
            } else {
                "sorter"
            };
            match result {
                Ok(report) => (report, name, Some(loaded.set)),
                Err(e) => {
                    eprintln!("qorder: {}: {e}", file.display());
                    return EXIT_DATA;
                }
            }
        }
    };
    if json {
        let doc = report_to_json(&report, mode_name, set.as_ref());
        println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
    } else {
        print_report_text(&report, mode_name, set.as_ref());
    }
    verdict_exit(report.verdict)
}

#[derive(Serialize)]
struct JsonSynthesisSummary {
    schema: u32,
    command: &'static str,
    mode: &'static str,
    dim: usize,
    total_dim: usize,
    stages: usize,
    out: String,
}

fn cmd_synthesize(
    file: &Path,
    mode: SynthMode,
    n: Option<usize>,
    out: &Path,
    tol: f64,
    json: bool,
) -> u8 {
    let loaded = match load_state_set(file) {
        Ok(l) => l,
        Err(e) => return exit_for_io(&e, file),
    };
    print_warnings(&loaded.warnings);
    let (payload, mode_name, total_dim, stages) = match mode {
        SynthMode::Comparator => match build_comparator(&loaded.set) {
            Ok(circuit) => {
                let total = circuit.total_dim();
                (comparator_to_json(&circuit), "comparator", total, 0)
            }
            Err(e @ Error::NotOrthogonal(_)) => {
                eprintln!(
                    "qorder: {e}\nhint: run `qorder check {} --mode comparator --tol {tol:e}` for the certificate",
                    file.display()
                );
                return EXIT_INFEASIBLE;
            }
            Err(e) => {
                eprintln!("qorder: {e}");
                return EXIT_DATA;
            }
        },
        SynthMode::Sorter => {
            let Some(n) = n else {
                eprintln!("qorder: sorter synthesis requires --n <registers>");
                return EXIT_USAGE;
            };
            match build_sorter(&loaded.set, n) {
                Ok(circuit) => {
                    let stages = circuit.stages().len();
                    let d = loaded.set.dim();
                    (sorter_to_json(&circuit), "sorter", 2 * d * d, stages)
                }
                Err(e @ Error::NotOrthogonal(_)) => {
                    eprintln!(
                        "qorder: {e}\nhint: run `qorder check {} --mode comparator --tol {tol:e}` for the certificate",
                        file.display()
                    );
                    return EXIT_INFEASIBLE;
                }
                Err(e @ Error::BadN(_)) => {
                    eprintln!("qorder: {e}");
                    return EXIT_USAGE;
                }
                Err(e) => {
                    eprintln!("qorder: {e}");
                    return EXIT_DATA;
                }
            }
        }
    };
    if let Err(e) = std::fs::write(out, &payload) {
        eprintln!("qorder: cannot write {}: {e}", out.display());
        return EXIT_CANTCREAT;
    }
    if json {
        let doc = JsonSynthesisSummary {
            schema: SCHEMA_VERSION,
            command: "synthesize",
            mode: mode_name,
            dim: loaded.set.dim(),
            total_dim,
            stages,
            out: out.display().to_string(),
        };
        println!("{}", serde_json::to_string_pretty(&doc).expect("summary serializes"));
    } else if stages > 0 {
        println!(
            "wrote {mode_name} circuit ({stages} stages, gate dim {total_dim}) to {}",
            out.display()
        );
    } else {
        println!(
            "wrote {mode_name} circuit (unitary dim {total_dim}) to {}",
            out.display()
        );
    }
    EXIT_FEASIBLE
}

#[derive(Serialize)]
struct JsonCompareOutcome {
    schema: u32,
    command: &'static str,
    kind: &'static str,
    input: Vec<usize>,
    flag: u8,
    distribution: Vec<f64>,
}

#[derive(Serialize)]
struct JsonSortOutcome {
    schema: u32,
    command: &'static str,
    kind: &'static str,
    input: Vec<usize>,
    output: Vec<usize>,
    flags: Vec<u8>,
    final_norm: f64,
}

fn parse_indices(input: &str) -> Option<Vec<usize>> {
    input
        .split(',')
        .map(|tok| tok.trim().parse::<usize>().ok().filter(|&k| k >= 1))
        .collect()
}

fn cmd_simulate(circuit_path: &Path, input: &str, json: bool) -> u8 {
    let circuit = match load_circuit(circuit_path) {
        Ok(c) => c,
        Err(e) => return exit_for_io(&e, circuit_path),
    };
    let Some(indices) = parse_indices(input) else {
        eprintln!("qorder: --input must be comma-separated 1-based indices, got '{input}'");
        return EXIT_USAGE;
    };
    match circuit {
        LoadedCircuit::Comparator(c) => {
            if indices.len() != 2 {
                eprintln!(
                    "qorder: comparator simulation takes exactly 2 indices, got {}",
                    indices.len()
                );
                return EXIT_USAGE;
            }
            match run_compare(&c, indices[0], indices[1]) {
                Ok(outcome) => {
                    if json {
                        let doc = JsonCompareOutcome {
                            schema: SCHEMA_VERSION,
                            command: "simulate",
                            kind: "comparator",
                            input: indices,
                            flag: outcome.flag,
                            distribution: outcome.distribution,
                        };
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&doc).expect("outcome serializes")
                        );
                    } else {
                        println!("kind: comparator");
                        println!("input: {}", fmt_indices(&indices));
                        println!("flag: {}", outcome.flag);
                        println!(
                            "flag distribution: [{}]",
                            outcome
                                .distribution
                                .iter()
                                .map(|p| format!("{p:.9}"))
                                .collect::<Vec<_>>()
                                .join(", ")
                        );
                    }
                    EXIT_FEASIBLE
                }
                Err(e @ Error::BadIndex(_)) => {
                    eprintln!("qorder: {e}");
                    EXIT_USAGE
                }
                Err(e @ Error::DecodeFailed(_)) => {
                    eprintln!("qorder: {e}");
                    EXIT_DECODE_FAILURE
                }
                Err(e) => {
                    eprintln!("qorder: {e}");
                    EXIT_DATA
                }
            }
        }
        LoadedCircuit::Sorter(c) => match run_sort(&c, &indices) {
            Ok(outcome) => {
                if json {
                    let doc = JsonSortOutcome {
                        schema: SCHEMA_VERSION,
                        command: "simulate",
                        kind: "sorter",
                        input: indices,
                        output: outcome.output_indices,
                        flags: outcome.flags,
                        final_norm: outcome.final_norm,
                    };
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&doc).expect("outcome serializes")
                    );
                } else {
                    println!("kind: sorter");
                    println!("input: {}", fmt_indices(&indices));
                    println!("output: {}", fmt_indices(&outcome.output_indices));
                    println!(
                        "flags: {}",
                        outcome
                            .flags
                            .iter()
                            .map(|f| f.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    );
                }
                EXIT_FEASIBLE
            }
            Err(e @ Error::BadIndex(_)) => {
                eprintln!("qorder: {e}");
                EXIT_USAGE
            }
            Err(e @ Error::DecodeFailed(_)) => {
                eprintln!("qorder: {e}");
                EXIT_DECODE_FAILURE
            }
            Err(e) => {
                eprintln!("qorder: {e}");
                EXIT_DATA
            }
        },
    }
}

fn fmt_indices(indices: &[usize]) -> String {
    indices
        .iter()
        .map(|k| k.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Serialize)]
struct JsonDemoCase {
    name: &'static str,
    expected: &'static str,
    verdict: &'static str,
    matches_expectation: bool,
    max_residual: f64,
    violations: Vec<JsonViolation>,
}

#[derive(Serialize)]
struct JsonDemoReport {
    schema: u32,
    command: &'static str,
    tolerance: f64,
    cases: Vec<JsonDemoCase>,
    all_match: bool,
}

/// The three built-in impossibility demonstrations: comparing {|0>, |+>},
/// sorting {|+>, |0>, |1>}, and cloning via the general checker.
pub fn demo_cases(tol: f64) -> Vec<(&'static str, FeasibilityReport)> {
    let zero = StateVector::basis(2, 0);
    let one = StateVector::basis(2, 1);
    let plus = StateVector::new(vec![
        Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
    ])
    .expect("|+> is normalized");

    let comparator_set = OrderedStateSet::new(vec![zero.clone(), plus.clone()])
        .expect("two qubit states");
    let sorter_set = OrderedStateSet::new(vec![plus, zero, one]).expect("three qubit states");

    vec![
        (
            "comparator on {|0>, |+>}",
            comparator_feasible(&comparator_set, tol).expect("N >= 2"),
        ),
        (
            "sorter on {|+>, |0>, |1>}",
            sorter_feasible(&sorter_set, tol).expect("N >= 3"),
        ),
        (
            "cloning {|0>|0> -> |0>|0>, |+>|0> -> |+>|+>}",
            unitary_extension_feasible(&cloning_demo_spec(), tol),
        ),
    ]
}

fn cmd_demo_nogo(tol: f64, json: bool) -> u8 {
    if !tol.is_finite() || tol < 0.0 {
        eprintln!("qorder: --tol must be a finite nonnegative real");
        return EXIT_USAGE;
    }
    let cases = demo_cases(tol);
    let mut all_match = true;
    let mut json_cases = Vec::new();
    for (idx, (name, report)) in cases.iter().enumerate() {
        let matches = report.verdict == Verdict::Infeasible;
        all_match &= matches;
        if json {
            json_cases.push(JsonDemoCase {
                name,
                expected: "infeasible",
                verdict: report.verdict.as_str(),
                matches_expectation: matches,
                max_residual: report.max_residual,
                violations: report.violations.iter().map(JsonViolation::from).collect(),
            });
        } else {
            println!(
                "[{}/{}] {name}: {} (expected infeasible) — max residual {:.12e}",
                idx + 1,
                cases.len(),
                report.verdict.as_str(),
                report.max_residual
            );
            for v in &report.violations {
                match v.q {
                    Some(q) => println!(
                        "      triple ({},{},{q}): lhs={} rhs={}",
                        v.i,
                        v.j,
                        fmt_complex(v.lhs),
                        fmt_complex(v.rhs)
                    ),
                    None => println!(
                        "      pair ({},{}): lhs={} rhs={}",
                        v.i,
                        v.j,
                        fmt_complex(v.lhs),
                        fmt_complex(v.rhs)
                    ),
                }
            }
        }
    }
    if json {
        let doc = JsonDemoReport {
            schema: SCHEMA_VERSION,
            command: "demo-nogo",
            tolerance: tol,
            cases: json_cases,
            all_match,
        };
        println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
    } else if all_match {
        println!("all no-go demonstrations hold");
    } else {
        println!("demo expectations not met (tolerance {tol:e} changed a verdict)");
    }
    if all_match {
        EXIT_FEASIBLE
    } else {
        EXIT_DEMO_MISMATCH
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_cases_all_infeasible_at_default_tol() {
        let cases = demo_cases(DEFAULT_TOL);
        assert_eq!(cases.len(), 3);
        for (name, report) in &cases {
            assert_eq!(report.verdict, Verdict::Infeasible, "case: {name}");
        }
    }

    #[test]
    fn demo_comparator_case_flips_at_loose_tolerance() {
        let cases = demo_cases(0.6);
        assert_eq!(cases[0].1.verdict, Verdict::Feasible);
    }

    #[test]
    fn index_parsing() {
        assert_eq!(parse_indices("3,2,1"), Some(vec![3, 2, 1]));
        assert_eq!(parse_indices(" 1 , 2 "), Some(vec![1, 2]));
        assert_eq!(parse_indices("0,1"), None);
        assert_eq!(parse_indices("a,b"), None);
        assert_eq!(parse_indices(""), None);
    }

    #[test]
    fn complex_formatting() {
        assert_eq!(fmt_complex(Complex::new(0.5, 0.0)), "0.500000000");
        assert!(fmt_complex(Complex::new(0.0, -1.0)).ends_with('i'));
    }
}
