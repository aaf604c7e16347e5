//! Command-line front end. Exit codes: 0 success, 1 negative verdict or
//! failed construction, 2 input or usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use andreev::angles::{check_conditions, feasible, AngleAssignment, AngleJson};
use andreev::complex::{AbstractPolyhedron, ComplexJson};
use andreev::minkowski::{export, ExportFormat, Realization};
use andreev::realize::{realize_with_report, RealizeError, SolverConfig};
use andreev::whitehead::{reduce_to_dn, TraceFile};

#[derive(Parser)]
#[command(name = "andreev", version, about = "Compact hyperbolic polyhedra with non-obtuse dihedral angles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Complex JSON (realization JSON for `export`, trace JSON accepted by `reduce`).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Angle JSON, values in units of π.
    #[arg(long, global = true)]
    angles: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Realization output format.
    #[arg(long, global = true, default_value = "json", value_parser = ["off", "json", "ball_json"])]
    format: String,
    /// Largest accepted Gram residual.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Newton iterations per solve.
    #[arg(long, global = true)]
    max_steps: Option<usize>,
    /// Also write the pipeline report of `realize` here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Check the complex axioms.
    Validate,
    /// List prismatic 3- and 4-circuits.
    Circuits,
    /// Check conditions (1)-(5) exactly.
    CheckAngles,
    /// Decide whether the angle polytope is nonempty.
    Feasible,
    /// Reduce a simple complex to the split prism, or verify a trace.
    Reduce,
    /// Construct the polyhedron.
    Realize,
    /// Convert a realization JSON to another format.
    Export,
}

enum Failure {
    Verdict(String),
    Input(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

struct Output {
    body: String,
    ok: bool,
}

impl Output {
    fn json(v: &impl Serialize, ok: bool) -> Self {
        Output {
            body: serde_json::to_string_pretty(v).expect("serializable") + "\n",
            ok,
        }
    }
}

fn read(path: &Option<PathBuf>, what: &str) -> anyhow::Result<String> {
    let p = path.as_ref().ok_or_else(|| anyhow!("--{what} is required"))?;
    std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
}

fn load_complex(cli: &Cli) -> anyhow::Result<AbstractPolyhedron> {
    let j: ComplexJson = serde_json::from_str(&read(&cli.input, "input")?).context("parsing complex JSON")?;
    AbstractPolyhedron::from_json(j).map_err(|e| anyhow!("invalid complex: {e}"))
}

fn load_angles(cli: &Cli, c: &AbstractPolyhedron) -> anyhow::Result<AngleAssignment> {
    let j: AngleJson = serde_json::from_str(&read(&cli.angles, "angles")?).context("parsing angle JSON")?;
    AngleAssignment::from_json(&j, c.edge_count()).map_err(|e| anyhow!("bad angles: {e}"))
}

fn config(cli: &Cli) -> anyhow::Result<SolverConfig> {
    let mut cfg = SolverConfig {
        seed: cli.seed,
        ..SolverConfig::default()
    };
    if let Some(t) = cli.tolerance {
        anyhow::ensure!(t > 0.0 && t.is_finite(), "tolerance must be positive");
        cfg.residual_tol = t;
    }
    if let Some(m) = cli.max_steps {
        anyhow::ensure!(m > 0, "max-steps must be positive");
        cfg.max_newton_steps = m;
    }
    Ok(cfg)
}

fn validate(cli: &Cli) -> Result<Output, Failure> {
    let j: ComplexJson = serde_json::from_str(&read(&cli.input, "input")?)
        .context("parsing complex JSON")
        .map_err(Failure::Input)?;
    Ok(match AbstractPolyhedron::from_json(j) {
        Ok(c) => Output::json(
            &json!({
                "valid": true,
                "name": c.name(),
                "faces": c.face_count(),
                "edges": c.edge_count(),
                "vertices": c.vertex_count(),
                "simple": c.is_simple(),
            }),
            true,
        ),
        Err(e) => Output::json(&json!({"valid": false, "error": e.to_string()}), false),
    })
}

fn reduce(cli: &Cli) -> Result<Output, Failure> {
    let text = read(&cli.input, "input")?;
    let v: Value = serde_json::from_str(&text).context("parsing JSON")?;
    if v.get("moves").is_some() {
        let t: TraceFile = serde_json::from_value(v).context("parsing trace JSON")?;
        return Ok(match t.verify() {
            Ok(_) => Output::json(&json!({"verified": true, "moves": t.moves.len()}), true),
            Err(e) => Output::json(&json!({"verified": false, "error": e.to_string()}), false),
        });
    }
    let c = load_complex(cli)?;
    match reduce_to_dn(&c.dual()) {
        Ok(trace) => {
            let file = trace.to_file();
            let replayed: TraceFile =
                serde_json::from_str(&serde_json::to_string(&file).expect("serializable")).expect("round trip");
            replayed
                .verify()
                .map_err(|e| Failure::Verdict(format!("trace failed verification: {e}")))?;
            Ok(Output::json(&file, true))
        }
        Err(e) => Err(Failure::Verdict(e.to_string())),
    }
}

fn realize_cmd(cli: &Cli) -> Result<Output, Failure> {
    let c = load_complex(cli)?;
    let a = match cli.angles {
        Some(_) => load_angles(cli, &c)?,
        None => feasible(&c)
            .witness
            .ok_or_else(|| Failure::Verdict("angle polytope is empty".into()))?,
    };
    let cfg = config(cli)?;
    let fmt: ExportFormat = cli.format.parse().map_err(|e: String| Failure::Input(anyhow!(e)))?;
    match realize_with_report(&c, &a, &cfg) {
        Ok((r, report)) => {
            if let Some(p) = &cli.report {
                write(p, &(serde_json::to_string_pretty(&report).expect("serializable") + "\n"))?;
            }
            Ok(Output {
                body: export(&r, fmt),
                ok: true,
            })
        }
        Err(RealizeError::InfeasibleAngles(rep)) => Ok(Output::json(&json!({"verdict": "infeasible", "conditions": rep}), false)),
        Err(e) => Err(Failure::Verdict(e.to_string())),
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match cli.command {
        Command::Validate => validate(cli),
        Command::Circuits => {
            let c = load_complex(cli)?;
            let mut all = c.prismatic_circuits(3);
            all.extend(c.prismatic_circuits(4));
            Ok(Output::json(&all, true))
        }
        Command::CheckAngles => {
            let c = load_complex(cli)?;
            let a = load_angles(cli, &c)?;
            let r = check_conditions(&c, &a).map_err(|e| anyhow!("{e}"))?;
            let ok = r.member;
            Ok(Output::json(&r, ok))
        }
        Command::Feasible => {
            let f = feasible(&load_complex(cli)?);
            let ok = f.nonempty;
            Ok(Output::json(&f, ok))
        }
        Command::Reduce => reduce(cli),
        Command::Realize => realize_cmd(cli),
        Command::Export => {
            let r = Realization::from_json_str(&read(&cli.input, "input")?).map_err(|e| anyhow!("{e}"))?;
            let fmt: ExportFormat = cli.format.parse().map_err(|e: String| anyhow!(e))?;
            Ok(Output {
                body: export(&r, fmt),
                ok: true,
            })
        }
    }
}

fn write(p: &Path, body: &str) -> anyhow::Result<()> {
    std::fs::write(p, body).with_context(|| format!("writing {}", p.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.output {
                Some(p) => write(p, &out.body),
                None => {
                    print!("{}", out.body);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Verdict(m)) => {
            eprintln!("{m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
