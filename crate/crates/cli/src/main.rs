//! `morphosim`: run, check and benchmark growth scenarios.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use morphosim_core::benchmarks::{builtin_scenario, run_benchmark, BENCHMARKS};
use morphosim_core::elasticity::Method;
use morphosim_core::integrator::TimeGrid;
use morphosim_core::output::{termination_text, write_outputs};
use morphosim_core::scenario::{assess_scenario, load_scenario, Scenario};
use morphosim_core::sim::{run_coupled_with, RunOptions, Termination};
use morphosim_core::{build_rectangle_mesh, write_mesh, Error, Rect, TagRule, Triangulation};

#[derive(Parser)]
#[command(
    name = "morphosim",
    version,
    about = "Nutrient-driven morphoelastic growth on 2D meshes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print per-step progress to stderr.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or a built-in scenario name).
    Run {
        scenario: String,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        /// fixed_point, newton or hybrid.
        #[arg(long)]
        method: Option<Method>,
        /// Start every equilibrium solve from the lifting.
        #[arg(long)]
        cold_start: bool,
    },
    /// Check the modelling assumptions of a scenario.
    Check { scenario: String },
    /// Run a built-in benchmark, or `all`.
    Bench { name: String },
    /// Mesh utilities.
    Mesh {
        #[command(subcommand)]
        command: MeshCommand,
    },
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Generate a rectangle mesh from `NXxNY` (or `N`).
    Gen {
        size: String,
        #[arg(long, default_value = "crossed")]
        triangulation: Triangulation,
        /// Boundary tag preset.
        #[arg(long, default_value = "all_dirichlet")]
        tags: String,
        /// `x0,x1,y0,y1`.
        #[arg(long, default_value = "0,1,0,1")]
        extent: String,
        /// Output file; stdout when absent.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. }
            | Error::Validation(_)
            | Error::InvalidTagRule(_)
            | Error::InvalidMesh(_)
            | Error::Io(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn resolve_scenario(arg: &str) -> Result<Scenario, Failure> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok(load_scenario(path)?);
    }
    if !arg.contains(['/', '.']) {
        if let Ok(s) = builtin_scenario(arg) {
            return Ok(s);
        }
    }
    Err(usage(format!("scenario `{arg}` not found")))
}

fn run(
    cli_verbose: bool,
    scenario: &str,
    output_dir: Option<PathBuf>,
    dt: Option<f64>,
    t_end: Option<f64>,
    method: Option<Method>,
    cold_start: bool,
) -> Result<(), Failure> {
    let mut s = resolve_scenario(scenario)?;
    if dt.is_some() || t_end.is_some() {
        let g = s.time;
        s.time = TimeGrid::new(
            g.t0,
            t_end.unwrap_or(g.t_end),
            dt.unwrap_or(g.dt),
            g.adaptive,
        )?;
    }
    if let Some(m) = method {
        s.solver.method = m;
    }
    if cold_start {
        s.warm_start = false;
    }
    let report = assess_scenario(&s)?;
    if !report.passed() {
        eprint!("{report}");
        return Err(Error::Validation(report.failures()).into());
    }
    let mesh = Arc::new(s.build_mesh()?);
    let mut options = RunOptions::for_scenario(&s);
    options.verbose = cli_verbose;
    let traj = run_coupled_with(&s, mesh.clone(), &options)?;
    let dir = output_dir
        .or_else(|| {
            s.output.directory.as_ref().map(|d| match &s.base_dir {
                Some(base) if d.is_relative() => base.join(d),
                _ => d.clone(),
            })
        })
        .unwrap_or_else(|| PathBuf::from(format!("{}_out", s.name)));
    let written = write_outputs(&traj, &mesh, &dir, s.output.vtk)?;
    let last = traj
        .diagnostics
        .last()
        .expect("initial step is always recorded");
    println!(
        "{}: {} steps, t = {:.6}, min det G = {:.6e}, max |P| = {:.6e}, min N = {:.6e}",
        s.name,
        traj.diagnostics.len() - 1,
        last.t,
        last.min_det_g,
        last.max_stress,
        last.nutrient_min
    );
    for d in &traj.diagnostics {
        for w in &d.warnings {
            eprintln!("warning (t = {:.6}): {w}", d.t);
        }
    }
    println!("wrote {} files to {}", written.len(), dir.display());
    match traj.termination {
        Termination::Completed => Ok(()),
        _ => Err(Failure {
            code: 1,
            message: termination_text(&traj).trim_end().to_string(),
        }),
    }
}

fn check(scenario: &str) -> Result<(), Failure> {
    let s = resolve_scenario(scenario)?;
    let report = assess_scenario(&s)?;
    print!("{report}");
    if report.passed() {
        println!("all checks passed");
        Ok(())
    } else {
        Err(Failure {
            code: 1,
            message: format!("{} checks failed", report.failures().len()),
        })
    }
}

fn bench(name: &str) -> Result<(), Failure> {
    let names: Vec<&str> = if name == "all" {
        BENCHMARKS.to_vec()
    } else if BENCHMARKS.contains(&name) {
        vec![name]
    } else {
        return Err(usage(format!(
            "unknown benchmark `{name}`; available: {}",
            BENCHMARKS.join(", ")
        )));
    };
    let mut failed = Vec::new();
    for n in names {
        let report = run_benchmark(n)?;
        print!("{report}");
        println!("{}: {}", n, if report.passed() { "PASS" } else { "FAIL" });
        if !report.passed() {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure {
            code: 1,
            message: format!("failed: {}", failed.join(", ")),
        })
    }
}

fn mesh_gen(
    size: &str,
    triangulation: Triangulation,
    tags: &str,
    extent: &str,
    output: Option<PathBuf>,
) -> Result<(), Failure> {
    let (nx, ny) = match size.split_once('x') {
        Some((a, b)) => (a.parse(), b.parse()),
        None => (size.parse(), size.parse()),
    };
    let (Ok(nx), Ok(ny)) = (nx, ny) else {
        return Err(usage(format!("bad mesh size `{size}` (expected NXxNY)")));
    };
    let rule =
        TagRule::preset(tags).ok_or_else(|| usage(format!("unknown tag preset `{tags}`")))?;
    let e: Vec<f64> = extent
        .split(',')
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("bad extent `{extent}`")))?;
    let [x0, x1, y0, y1] = e[..] else {
        return Err(usage(format!(
            "bad extent `{extent}` (expected x0,x1,y0,y1)"
        )));
    };
    let mesh = build_rectangle_mesh(nx, ny, Rect { x0, x1, y0, y1 }, triangulation, &rule)?;
    match output {
        Some(path) => write_mesh(
            &mesh,
            std::io::BufWriter::new(std::fs::File::create(path).map_err(Error::from)?),
        )?,
        None => write_mesh(&mesh, std::io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run {
            scenario,
            output_dir,
            dt,
            t_end,
            method,
            cold_start,
        } => run(
            cli.verbose,
            &scenario,
            output_dir,
            dt,
            t_end,
            method,
            cold_start,
        ),
        Command::Check { scenario } => check(&scenario),
        Command::Bench { name } => bench(&name),
        Command::Mesh {
            command:
                MeshCommand::Gen {
                    size,
                    triangulation,
                    tags,
                    extent,
                    output,
                },
        } => mesh_gen(&size, triangulation, &tags, &extent, output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
