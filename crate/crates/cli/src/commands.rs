use std::fmt::Write;
use std::path::Path;

use liquid_influence::fixtures;
use liquid_influence::graph::{AgentId, IssueId};
use liquid_influence::influence::{
    expected_weight, expected_weight_chain, expected_weight_chain_limit, expected_weight_star, expected_weights,
    potential_weight, stationary_analytic, stationary_iterative, SuspendibleProfile,
};
use liquid_influence::io::{
    parse_document, parse_probabilities, round3, text_table, GraphDocument, MonteCarloCell, ProbabilitySettings,
    ReportDocument, ReportMetadata, ReportRow,
};
use liquid_influence::lottery::{enumerate_expected_weight, monte_carlo_expected_weight};
use liquid_influence::Execution;
use serde::Serialize;

use crate::{Cli, CliError, Command, Format, GlobalArgs, Output, TableKind};

/// Largest `|psi - phi|` the oracle accepts.
pub const ORACLE_TOLERANCE: f64 = 1e-9;

const DEFAULT_SAMPLES: usize = 10_000;
const CHAIN_LIMIT_GRID: [f64; 7] = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 0.8];

pub fn dispatch(cli: &Cli) -> Result<Output, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Analyze { graph } => analyze(g, graph),
        Command::Oracle { graph, target } => oracle(g, graph, target.as_deref()),
        Command::Sample { graph, target } => sample(g, graph, target),
        Command::Table { kind, n, k } => table(g, *kind, n, k),
        Command::Stationary { graph } => stationary(g, graph),
    }
}

fn execution(g: &GlobalArgs) -> Execution {
    if g.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output always serializes");
    s.push('\n');
    s
}

/// Reads a graph file, falling back to the bundled graphs when no file of
/// that name exists.
fn load_graph(graph: &str) -> Result<GraphDocument, CliError> {
    let path = Path::new(graph);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
        return parse_document(&text).map_err(|e| CliError::document(format!("{graph}: "), e));
    }
    fixtures::builtin(graph).ok_or_else(|| CliError::UnknownGraph(graph.to_owned()))
}

struct Loaded {
    sp: SuspendibleProfile,
    model: String,
}

fn load(g: &GlobalArgs, graph: &str) -> Result<Loaded, CliError> {
    let doc = load_graph(graph)?;
    let issue = g.issue.as_deref().map(IssueId::new);
    let profile = doc.profile(issue.as_ref()).map_err(|e| CliError::document(format!("{graph}: "), e))?;
    let uniform = match g.p.as_slice() {
        [] => None,
        [p] => Some(*p),
        _ => return Err(CliError::Usage("--p takes a single value outside `table`".into())),
    };
    let overrides = match &g.prob_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.clone(), source })?;
            parse_probabilities(&text).map_err(|e| CliError::document(format!("{}: ", path.display()), e))?
        }
        None => Default::default(),
    };
    let settings = ProbabilitySettings { uniform, overrides };
    let (sp, model) = settings.resolve(&doc, profile).map_err(|e| CliError::document("", e))?;
    Ok(Loaded { sp, model })
}

fn require_agent(sp: &SuspendibleProfile, name: &str) -> Result<AgentId, CliError> {
    let agent = AgentId::from(name);
    match sp.profile().index_of(&agent) {
        Some(_) => Ok(agent),
        None => Err(liquid_influence::Error::UnknownAgent(agent).into()),
    }
}

fn analyze(g: &GlobalArgs, graph: &str) -> Result<Output, CliError> {
    let Loaded { sp, model } = load(g, graph)?;
    let exec = execution(g);
    let potential = potential_weight(sp.profile());
    let expected = expected_weights(&sp, exec);
    let stationary = stationary_analytic(&sp);
    let mut rows = Vec::with_capacity(sp.len());
    for (i, agent) in sp.profile().agents().iter().enumerate() {
        let monte_carlo = match g.samples {
            Some(samples) => {
                let r = monte_carlo_expected_weight(&sp, agent, samples, g.seed, exec)?;
                Some(MonteCarloCell { estimate: r.estimate, std_error: r.std_error })
            }
            None => None,
        };
        rows.push(ReportRow {
            agent: agent.clone(),
            potential: potential.values()[i],
            expected: expected.values()[i],
            stationary_scaled: stationary.scaled_weight[i],
            monte_carlo,
        });
    }
    let report = ReportDocument {
        metadata: ReportMetadata {
            n: sp.len(),
            probability_model: model,
            issue: g.issue.clone(),
            seed: g.samples.map(|_| g.seed),
            samples: g.samples,
            tolerance: g.tolerance,
        },
        rows,
    };
    Ok(Output::ok(match g.format.unwrap_or(Format::Table) {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
        Format::Table => report.to_table(),
    }))
}

#[derive(Serialize)]
struct Comparison {
    target: AgentId,
    psi: f64,
    phi_exact: f64,
    abs_diff: f64,
}

fn oracle(g: &GlobalArgs, graph: &str, target: Option<&str>) -> Result<Output, CliError> {
    let Loaded { sp, .. } = load(g, graph)?;
    let targets = match target {
        Some(name) => vec![require_agent(&sp, name)?],
        None => sp.profile().agents().to_vec(),
    };
    let mut rows = Vec::with_capacity(targets.len());
    for target in targets {
        let psi = expected_weight(&sp, &target)?;
        let phi_exact = enumerate_expected_weight(&sp, &target, execution(g))?;
        rows.push(Comparison { target, psi, phi_exact, abs_diff: (psi - phi_exact).abs() });
    }
    let mismatches = rows.iter().filter(|r| r.abs_diff.is_nan() || r.abs_diff > ORACLE_TOLERANCE).count();
    let stdout = match g.format.unwrap_or(Format::Table) {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut out = String::from("target,psi,phi_exact,abs_diff\n");
            for r in &rows {
                let _ = writeln!(out, "{},{},{},{}", r.target, r.psi, r.phi_exact, r.abs_diff);
            }
            out
        }
        Format::Table => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let verdict = if r.abs_diff <= ORACLE_TOLERANCE { "ok" } else { "MISMATCH" };
                    vec![
                        r.target.to_string(),
                        format!("{:.9}", r.psi),
                        format!("{:.9}", r.phi_exact),
                        format!("{:.1e}", r.abs_diff),
                        verdict.to_owned(),
                    ]
                })
                .collect();
            text_table(&["target", "psi", "phi_exact", "abs_diff", ""], &cells)
        }
    };
    Ok(Output { stdout, status: if mismatches > 0 { 2 } else { 0 } })
}

#[derive(Serialize)]
struct SampleReport {
    target: AgentId,
    estimate: f64,
    std_error: f64,
    samples: usize,
    seed: u64,
}

fn sample(g: &GlobalArgs, graph: &str, target: &str) -> Result<Output, CliError> {
    let Loaded { sp, .. } = load(g, graph)?;
    let target = require_agent(&sp, target)?;
    let samples = g.samples.unwrap_or(DEFAULT_SAMPLES);
    let r = monte_carlo_expected_weight(&sp, &target, samples, g.seed, execution(g))?;
    let report = SampleReport { target, estimate: r.estimate, std_error: r.std_error, samples, seed: r.seed };
    Ok(Output::ok(match g.format.unwrap_or(Format::Table) {
        Format::Json => json(&report),
        Format::Csv => format!(
            "target,estimate,std_error,samples,seed\n{},{},{},{},{}\n",
            report.target, report.estimate, report.std_error, report.samples, report.seed
        ),
        Format::Table => text_table(
            &["target", "estimate", "std_error", "samples", "seed"],
            &[vec![
                report.target.to_string(),
                round3(report.estimate),
                round3(report.std_error),
                report.samples.to_string(),
                report.seed.to_string(),
            ]],
        ),
    }))
}

fn table(g: &GlobalArgs, kind: TableKind, n: &[u64], k: &[u64]) -> Result<Output, CliError> {
    let grid = |default: &[f64]| if g.p.is_empty() { default.to_vec() } else { g.p.clone() };
    let (headers, rows): (Vec<&str>, Vec<Vec<f64>>) = match kind {
        TableKind::ChainLimit => {
            let rows = grid(&CHAIN_LIMIT_GRID)
                .into_iter()
                .map(|p| Ok(vec![p, expected_weight_chain_limit(p)?]))
                .collect::<Result<_, liquid_influence::Error>>()?;
            (vec!["p", "expected_votes"], rows)
        }
        TableKind::Chain => {
            let lengths = if n.is_empty() { &[10][..] } else { n };
            let mut rows = Vec::new();
            for &len in lengths {
                for p in grid(&[0.5]) {
                    rows.push(vec![len as f64, p, expected_weight_chain(len, p)?]);
                }
            }
            (vec!["n", "p", "expected_votes"], rows)
        }
        TableKind::Star => {
            let sizes = if k.is_empty() { &[10][..] } else { k };
            let mut rows = Vec::new();
            for &size in sizes {
                for p in grid(&[0.5]) {
                    rows.push(vec![size as f64, p, expected_weight_star(size, p)?]);
                }
            }
            (vec!["k", "p", "expected_votes"], rows)
        }
    };
    Ok(Output::ok(match g.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = headers.join(",");
            out.push('\n');
            for row in &rows {
                let cells: Vec<String> = row.iter().map(f64::to_string).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let records: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|row| headers.iter().zip(row).map(|(h, &v)| (h.to_string(), serde_json::json!(v))).collect())
                .collect();
            json(&records)
        }
        Format::Table => {
            let cells: Vec<Vec<String>> = rows.iter().map(|row| row.iter().map(|&v| round3(v)).collect()).collect();
            text_table(&headers, &cells)
        }
    }))
}

#[derive(Serialize)]
struct StationaryRow<'a> {
    agent: &'a AgentId,
    analytic_mass: f64,
    analytic_scaled: f64,
    iterative_mass: f64,
    iterative_scaled: f64,
}

fn stationary(g: &GlobalArgs, graph: &str) -> Result<Output, CliError> {
    let Loaded { sp, model } = load(g, graph)?;
    let analytic = stationary_analytic(&sp);
    let iterative = stationary_iterative(&sp, g.tolerance, g.max_iters)?;
    let rows: Vec<StationaryRow> = sp
        .profile()
        .agents()
        .iter()
        .enumerate()
        .map(|(i, agent)| StationaryRow {
            agent,
            analytic_mass: analytic.distribution[i],
            analytic_scaled: analytic.scaled_weight[i],
            iterative_mass: iterative.distribution[i],
            iterative_scaled: iterative.scaled_weight[i],
        })
        .collect();
    let iterations = iterative.iterations.unwrap_or(0);
    let difference = analytic.max_difference(&iterative);
    Ok(Output::ok(match g.format.unwrap_or(Format::Table) {
        Format::Json => json(&serde_json::json!({
            "n": sp.len(),
            "probability_model": model,
            "tolerance": g.tolerance,
            "iterations": iterations,
            "max_difference": difference,
            "rows": rows,
        })),
        Format::Csv => {
            let mut out = String::from("agent,analytic_mass,analytic_scaled,iterative_mass,iterative_scaled\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.agent, r.analytic_mass, r.analytic_scaled, r.iterative_mass, r.iterative_scaled
                );
            }
            out
        }
        Format::Table => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![r.agent.to_string(), round3(r.analytic_scaled), round3(r.iterative_scaled)])
                .collect();
            let mut out = format!(
                "# n={} probabilities: {} iterations={} max_difference={:.1e}\n",
                sp.len(),
                model,
                iterations,
                difference
            );
            out.push_str(&text_table(&["agent", "analytic", "iterative"], &cells));
            out
        }
    }))
}
