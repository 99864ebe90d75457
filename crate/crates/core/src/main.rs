use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use blendflow::eos::MomentumMode;
use blendflow::io::{load_document, profile_csv, sig6, ModelSpec, Problem, ResultDocument};
use blendflow::network::{validate, EdgeKind};
use blendflow::pipeflow::{pressure_profile, EdgeState};
use blendflow::solver::{prepare_cut, solve, solve_mixed_bc, MixedReport, SteadyState};
use blendflow::Error;

#[derive(Parser)]
#[command(name = "blendflow", version, about = "Steady-state flow of hydrogen blends on gas networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Momentum {
    Full,
    Semilinear,
}

impl From<Momentum> for MomentumMode {
    fn from(m: Momentum) -> Self {
        match m {
            Momentum::Full => MomentumMode::Full,
            Momentum::Semilinear => MomentumMode::Semilinear,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum InfoFormat {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a network and write nodal pressures and edge flows.
    Solve {
        network: PathBuf,
        /// constant, linear, papay or custom; defaults to the document's model.
        #[arg(long)]
        model: Option<String>,
        #[arg(long, value_enum)]
        momentum: Option<Momentum>,
        /// Output file, `-` for stdout.
        #[arg(long, default_value = "-")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Pressure along one pipe of the solved network.
    Profile {
        network: PathBuf,
        #[arg(long)]
        edge: String,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[arg(long)]
        model: Option<String>,
        #[arg(long, value_enum)]
        momentum: Option<Momentum>,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Solve with several compressibility models and tabulate supply pressures.
    CompareModels {
        network: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "constant,linear,papay")]
        models: Vec<String>,
        #[arg(long, value_enum)]
        momentum: Option<Momentum>,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Report the cycle decomposition used by the solver.
    CutInfo {
        network: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: InfoFormat,
    },
    /// Check a network document and list every violation.
    Validate { network: PathBuf },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 4,
        Error::Parse(_)
        | Error::Validation(_)
        | Error::InvalidInput(_)
        | Error::Unbalanced(_)
        | Error::UnknownNode(_)
        | Error::UnknownEdge(_)
        | Error::MultipleCycles(_) => 2,
        _ => 3,
    }
}

fn write_out(path: &Path, text: &str) -> blendflow::Result<()> {
    if path == Path::new("-") {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())?;
        if !text.ends_with('\n') {
            out.write_all(b"\n")?;
        }
        Ok(())
    } else {
        Ok(std::fs::write(path, text)?)
    }
}

fn load(path: &Path, model: Option<&str>, momentum: Option<Momentum>) -> blendflow::Result<(Problem, String)> {
    let (doc, hash) = load_document(path)?;
    let spec = model.map(ModelSpec::parse_name).transpose()?;
    let problem = doc.problem(spec, momentum.map(Into::into))?;
    Ok((problem, hash))
}

fn run_solve(problem: &Problem) -> blendflow::Result<(SteadyState, Option<MixedReport>)> {
    validate(&problem.network).into_result()?;
    if problem.network.is_mixed_bc() {
        let (state, report) = solve_mixed_bc(&problem.network, &problem.model)?;
        Ok((state, Some(report)))
    } else {
        Ok((solve(&problem.network, &problem.model)?, None))
    }
}

/// Residual table on stdout, or on stderr when stdout carries the result.
fn print_summary(doc: &ResultDocument, to_stderr: bool) {
    for line in summary_lines(doc) {
        if to_stderr {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    }
}

fn summary_lines(doc: &ResultDocument) -> Vec<String> {
    let r = &doc.residuals;
    let mut out = Vec::new();
    out.push(format!("model {} ({:?} momentum)", doc.provenance.model, doc.provenance.momentum_mode));
    out.push(format!("{:<22} {:>12}", "residual", "value"));
    let rows = [
        ("mass balance", Some(r.mass_balance)),
        ("mixing", Some(r.mixing)),
        ("pipe relative", Some(r.pipe_relative)),
        ("pipe absolute [Pa^2]", Some(r.pipe_absolute)),
        ("compressor", Some(r.compressor)),
        ("cut pressure [Pa]", r.cut_pressure),
        ("cut composition", r.cut_composition),
    ];
    for (name, v) in rows {
        if let Some(v) = v {
            out.push(format!("{name:<22} {v:>12.3e}"));
        }
    }
    out.push(format!("{:<22} {:>12}", "subsonic", r.subsonic_ok));
    out
}

fn cmd_solve(
    network: &Path,
    model: Option<&str>,
    momentum: Option<Momentum>,
    out: &Path,
    format: Format,
) -> blendflow::Result<()> {
    let (problem, hash) = load(network, model, momentum)?;
    let (state, mixed) = run_solve(&problem)?;
    let doc = ResultDocument::new(&problem, &state, mixed.as_ref(), &hash);
    print_summary(&doc, out == Path::new("-"));
    let text = match format {
        Format::Json => doc.to_json()?,
        Format::Csv => doc.to_csv()?,
    };
    write_out(out, &text)
}

fn cmd_profile(
    network: &Path,
    edge: &str,
    samples: usize,
    model: Option<&str>,
    momentum: Option<Momentum>,
    out: &Path,
) -> blendflow::Result<()> {
    let (problem, _) = load(network, model, momentum)?;
    let net = &problem.network;
    let e = net.edge_idx(edge)?;
    let EdgeKind::Pipe(pipe) = net.edge(e).kind else {
        return Err(Error::InvalidInput(format!("edge {edge} is not a pipe")));
    };
    let (state, _) = run_solve(&problem)?;
    let (foot, _) = net.ends(e);
    let points = pressure_profile(
        &problem.model,
        &pipe,
        EdgeState::new(state.q[e], state.eta_edge[e]),
        state.p[foot],
        samples,
    )
    .map_err(|err| Error::OnEdge { edge: edge.to_string(), source: Box::new(err) })?;
    write_out(out, &profile_csv(&points)?)
}

#[derive(Serialize)]
struct ModelRow {
    model: String,
    /// Outflow pressures in bar, by demand node.
    outflow_pressures: Vec<(String, f64)>,
    inflows: Vec<(String, f64)>,
    exit_compositions: Vec<(String, f64)>,
    result: Option<ResultDocument>,
    error: Option<String>,
}

fn compare_one(network: &Path, name: &str, momentum: Option<Momentum>) -> blendflow::Result<ModelRow> {
    let (problem, hash) = load(network, Some(name), momentum)?;
    let (state, mixed) = run_solve(&problem)?;
    let net = &problem.network;
    let (supplies, demands): (Vec<usize>, Vec<usize>) = (0..net.nodes().len())
        .filter(|&v| net.node(v).is_supply() || net.node(v).load > 0.0)
        .partition(|&v| net.node(v).is_supply());
    let id = |v: usize| net.node(v).id.clone();
    Ok(ModelRow {
        model: name.to_string(),
        outflow_pressures: demands.iter().map(|&v| (id(v), sig6(state.p[v] / 1e5))).collect(),
        inflows: supplies.iter().map(|&v| (id(v), -state.loads[v])).collect(),
        exit_compositions: demands.iter().map(|&v| (id(v), state.eta_node[v].get())).collect(),
        result: Some(ResultDocument::new(&problem, &state, mixed.as_ref(), &hash)),
        error: None,
    })
}

fn cmd_compare(network: &Path, models: &[String], momentum: Option<Momentum>, out: &Path) -> blendflow::Result<()> {
    // Fail fast on unreadable or invalid input, then report per model.
    load_document(network)?;
    let results: Vec<blendflow::Result<ModelRow>> = std::thread::scope(|s| {
        let handles: Vec<_> = models.iter().map(|m| s.spawn(move || compare_one(network, m, momentum))).collect();
        handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect()
    });
    let mut first_error = None;
    let mut rows = Vec::with_capacity(results.len());
    for (res, m) in results.into_iter().zip(models) {
        match res {
            Ok(row) => rows.push(row),
            Err(err) => {
                rows.push(ModelRow {
                    model: m.clone(),
                    outflow_pressures: Vec::new(),
                    inflows: Vec::new(),
                    exit_compositions: Vec::new(),
                    result: None,
                    error: Some(err.to_string()),
                });
                first_error.get_or_insert(err);
            }
        }
    }
    for row in &rows {
        eprint!("{:<10}", row.model);
        if let Some(err) = &row.error {
            eprintln!(" failed: {err}");
            continue;
        }
        for (id, p) in &row.outflow_pressures {
            eprint!(" p{id}={p:.2}");
        }
        for (id, q) in &row.inflows {
            eprint!(" q{id}={q:.2}");
        }
        for (id, eta) in &row.exit_compositions {
            eprint!(" eta{id}={eta:.4}");
        }
        eprintln!();
    }
    let text = serde_json::to_string_pretty(&rows).map_err(|e| Error::Parse(e.to_string()))?;
    write_out(out, &text)?;
    match first_error {
        Some(err) if rows.iter().all(|r| r.error.is_some()) => Err(err),
        _ => Ok(()),
    }
}

fn cmd_cut_info(network: &Path, format: InfoFormat) -> blendflow::Result<()> {
    let (problem, _) = load(network, None, None)?;
    validate(&problem.network).into_result()?;
    // Mixed documents only know their supply loads after a solve.
    let net = if problem.network.is_mixed_bc() {
        let (state, _) = run_solve(&problem)?;
        problem.network.with_loads(&state.loads)
    } else {
        problem.network.clone()
    };
    let Some(setup) = prepare_cut(&net)? else {
        return write_out(Path::new("-"), match format {
            InfoFormat::Json => "null",
            InfoFormat::Text => "no cycle",
        });
    };
    let cycle_nodes: Vec<String> = setup.renumbered.node_ids(&setup.oriented).iter().map(|s| s.to_string()).collect();
    let cycle_edges: Vec<String> = setup.renumbered.edge_ids(&setup.oriented).iter().map(|s| s.to_string()).collect();
    let cut_edge = net.edge(setup.choice.edge).id.clone();
    match format {
        InfoFormat::Json => {
            let info = serde_json::json!({
                "cut_edge": cut_edge,
                "flipped": setup.choice.flip,
                "k_star": setup.choice.k_star,
                "cycle_nodes": cycle_nodes,
                "cycle_edges": cycle_edges,
                "modified_loads": setup.modified_loads,
                "beta": setup.beta,
                "interval": [setup.interval.0, setup.interval.1],
            });
            let text = serde_json::to_string_pretty(&info).map_err(|e| Error::Parse(e.to_string()))?;
            write_out(Path::new("-"), &text)
        }
        InfoFormat::Text => {
            let mut text = String::new();
            text.push_str(&format!("cycle nodes:    {}\n", cycle_nodes.join(" ")));
            text.push_str(&format!("cycle edges:    {}\n", cycle_edges.join(" ")));
            text.push_str(&format!("cut edge:       {cut_edge}{}\n", if setup.choice.flip { " (reversed)" } else { "" }));
            text.push_str(&format!("modified loads: {:?}\n", setup.modified_loads));
            text.push_str(&format!("beta:           {:?}\n", setup.beta));
            text.push_str(&format!("interval:       [{}, {}]\n", setup.interval.0, setup.interval.1));
            write_out(Path::new("-"), &text)
        }
    }
}

fn cmd_validate(network: &Path) -> blendflow::Result<()> {
    let (problem, _) = load(network, None, None)?;
    let diag = validate(&problem.network);
    if diag.is_valid() {
        println!("ok: {:?}, {} nodes, {} edges", diag.topology, problem.network.nodes().len(), problem.network.edges().len());
        Ok(())
    } else {
        Err(Error::Validation(diag.violations))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { network, model, momentum, out, format } => {
            cmd_solve(network, model.as_deref(), *momentum, out, *format)
        }
        Command::Profile { network, edge, samples, model, momentum, out } => {
            cmd_profile(network, edge, *samples, model.as_deref(), *momentum, out)
        }
        Command::CompareModels { network, models, momentum, out } => cmd_compare(network, models, *momentum, out),
        Command::CutInfo { network, format } => cmd_cut_info(network, *format),
        Command::Validate { network } => cmd_validate(network),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            match &err {
                Error::Validation(list) => {
                    eprintln!("error: {} violation(s)", list.len());
                    for v in list {
                        eprintln!("  - {v}");
                    }
                }
                other => eprintln!("error: {other}"),
            }
            ExitCode::from(exit_code(&err))
        }
    }
}
