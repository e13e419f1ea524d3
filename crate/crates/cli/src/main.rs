//! `randattr`: pathwise simulations of the stochastic reaction-diffusion
//! equation, its extremal complete quasi-solutions and the Chafee-Infante
//! pitchfork, plus a bundled verification suite.

mod commands;
mod config;
mod exit;
mod model;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use config::{Common, Resolved, Seed};
use exit::Failure;
use output::{Manifest, OutDir, Report};

#[derive(Parser)]
#[command(name = "randattr", version, about = "Pullback attractors of stochastic parabolic equations, computed path by path")]
struct Cli {
    /// Flat JSON file of parameters; flags override its keys.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Noise path: a seed or `zero` for omega = 0.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<Seed>,
    /// Worker threads for sweeps and the verification suite.
    #[arg(long, global = true, value_name = "K")]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Tolerance override (quadrature for `xi`, ladder otherwise).
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one trajectory from given initial data.
    Simulate(commands::simulate::Flags),
    /// Evaluate the complete quasi-solution of the linear comparison problem.
    Xi(commands::xi::Flags),
    /// Compute an extremal complete quasi-solution u* or u_* by the pullback ladder.
    Extremal(commands::extremal::Flags),
    /// Chafee-Infante bifurcation diagram over nu and seeds.
    Bifurcate(commands::bifurcate::Flags),
    /// Random periodic solutions under a periodic cubic coefficient.
    Periodic(commands::periodic::Flags),
    /// Run the invariant and oracle checks of every module.
    Verify(verify::Flags),
}

type RunFn<P> = fn(&Resolved<P>, &OutDir, &mut Report) -> Result<(), Failure>;

fn execute<P, F>(name: &str, cli: &Cli, common: &Common, flags: &F, run: RunFn<P>) -> u8
where
    P: DeserializeOwned + Serialize,
    F: Serialize,
{
    let start = Instant::now();
    let file = cli.config.as_deref();
    let resolved = config::resolve::<P>(file, common, flags);
    let out_root = match &resolved {
        Ok(r) => r.common.out_dir(),
        Err(_) => common.out_dir(),
    };
    let out = match OutDir::create(&out_root) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return e.code();
        }
    };
    let mut report = Report::default();
    let (config_echo, result) = match resolved {
        Ok(cfg) => {
            if let Some(j) = cfg.common.jobs {
                if j > 0 {
                    // fails only if a pool already exists, which is harmless
                    let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
                }
            }
            let echo = serde_json::to_value(&cfg).unwrap_or_default();
            (echo, run(&cfg, &out, &mut report))
        }
        Err(e) => (config::raw_echo(file, common, flags), Err(e)),
    };
    let failed: Vec<String> = report
        .failed_checks()
        .iter()
        .map(|c| format!("{}/{}", c.module, c.check))
        .collect();
    let result = match result {
        Ok(()) if !failed.is_empty() => Err(Failure::check(format!("failed checks: {}", failed.join(", ")))),
        r => r,
    };
    let (status, code, error) = match &result {
        Ok(()) => ("ok", 0, None),
        Err(f) => (
            match f.code() {
                1 => "check_failure",
                2 => "config_error",
                _ => "numeric_guard",
            },
            f.code(),
            Some(f.message.clone()),
        ),
    };
    let manifest = Manifest {
        artifact: output::ARTIFACT,
        version: output::VERSION,
        command: name,
        status,
        exit_code: code,
        error: error.clone(),
        config: config_echo,
        wall_time_s: start.elapsed().as_secs_f64(),
        outputs: &report.outputs,
        checks: &report.checks,
        summary: &report.summary,
    };
    if let Err(e) = out.write_manifest(&manifest) {
        eprintln!("error: cannot write manifest: {e}");
    }
    if let Some(msg) = error {
        eprintln!("error: {msg}");
    }
    eprintln!("{name}: {status} ({:.1} s) -> {}", start.elapsed().as_secs_f64(), out_root.display());
    code
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = Common {
        seed: cli.seed,
        jobs: cli.jobs,
        out: cli.out.clone(),
        tol: cli.tol,
    };
    let code = match &cli.command {
        Command::Simulate(f) => execute("simulate", &cli, &common, f, commands::simulate::run),
        Command::Xi(f) => execute("xi", &cli, &common, f, commands::xi::run),
        Command::Extremal(f) => execute("extremal", &cli, &common, f, commands::extremal::run),
        Command::Bifurcate(f) => execute("bifurcate", &cli, &common, f, commands::bifurcate::run),
        Command::Periodic(f) => execute("periodic", &cli, &common, f, commands::periodic::run),
        Command::Verify(f) => execute("verify", &cli, &common, f, verify::run),
    };
    ExitCode::from(code)
}
