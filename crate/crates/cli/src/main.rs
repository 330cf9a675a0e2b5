use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hybrid_plane_cli::output::{pretty, sidecar_path, write_file};
use hybrid_plane_cli::{execute, parse_config, CliError, Format, RunConfig, RunOptions, Task};

#[derive(Parser)]
#[command(name = "hybrid-plane", version, about = "Green's functions, bound states and scattering for a spin-orbit plane attached to a lead")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the 2×2 plane kernel G(x, 0; z)
    GreenPlane(Common),
    /// Sample the renormalized plane value G_ren(z)
    GreenRenorm(Common),
    /// Find bound states and report the reality region
    BoundStates(Common),
    /// Reflection amplitude over a momentum grid
    ReflectSweep(Common),
    /// Sample the scattering eigenfunction on lead and plane points
    StateDump(Common),
    /// Run the invariant suites and emit a pass/fail report
    Diagnostics(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration (optional for diagnostics)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; a `<out>.meta.json` sidecar is written next to it. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json; overrides the config
    #[arg(long)]
    format: Option<Format>,
    /// Worker threads for grid evaluation
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=1024))]
    threads: u64,
    /// Seed for the random-parameter diagnostics
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Command {
    fn split(self) -> (Task, Common) {
        match self {
            Command::GreenPlane(c) => (Task::GreenPlane, c),
            Command::GreenRenorm(c) => (Task::GreenRenorm, c),
            Command::BoundStates(c) => (Task::BoundStates, c),
            Command::ReflectSweep(c) => (Task::ReflectSweep, c),
            Command::StateDump(c) => (Task::StateDump, c),
            Command::Diagnostics(c) => (Task::Diagnostics, c),
        }
    }
}

fn load(task: Task, args: &Common) -> Result<RunConfig, CliError> {
    let cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None if task == Task::Diagnostics => RunConfig::diagnostics_default(),
        None => return Err(CliError::Schema(format!("{task} needs --config"))),
    };
    if cfg.task != task {
        return Err(CliError::Schema(format!("config task is {} but the subcommand is {task}", cfg.task)));
    }
    Ok(cfg)
}

fn fail(task: Task, out: Option<&PathBuf>, format: Format, e: &CliError) -> ExitCode {
    eprintln!("error [{}]: {e}", e.code());
    let report = serde_json::json!({
        "task": task.name(),
        "status": "error",
        "error": { "code": e.code(), "exit_code": e.exit_code(), "message": e.to_string() },
    });
    if let (Some(out), Ok(bytes)) = (out, pretty(&report)) {
        let _ = write_file(&sidecar_path(out), &bytes);
        if format == Format::Json {
            let _ = write_file(out, &bytes);
        }
    }
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let (task, args) = Cli::parse().command.split();
    let cfg = match load(task, &args) {
        Ok(cfg) => cfg,
        Err(e) => return fail(task, args.out.as_ref(), args.format.unwrap_or(Format::Csv), &e),
    };
    let format = args.format.unwrap_or(cfg.format);
    let out = args.out.clone().or_else(|| cfg.output_path.clone());
    let opts = RunOptions {
        threads: args.threads as usize,
        seed: args.seed,
        format,
    };
    let artifacts = execute(&cfg, &opts);

    let written = match &out {
        Some(path) => {
            let data = artifacts.data.as_ref().map_or(Ok(()), |d| write_file(path, d));
            data.and_then(|_| write_file(&sidecar_path(path), &artifacts.meta))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            let bytes = artifacts.data.as_deref().unwrap_or(&artifacts.meta);
            stdout.write_all(bytes).map_err(CliError::from)
        }
    };
    if let Err(e) = written {
        return fail(task, None, format, &e);
    }
    if let Some(e) = &artifacts.error {
        eprintln!("error [{}]: {e}", e.code());
    }
    ExitCode::from(artifacts.exit_code as u8)
}
