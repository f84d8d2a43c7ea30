//! Batch front end: `verify`, `simulate` and `lifespan`.
//!
//! Exit codes: 0 success, 1 suite failure, 2 configuration or input error,
//! 3 numeric abort.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use paranls::lab::{
    energy_certificate, inequality_check, initial_state, lifespan_scan, preset, CertificateKind,
    ExperimentConfig, InitialData, LifespanGrid, RegistryOptions, REGISTRY,
};
use paranls::lab::output::{content_hash, unix_now, write_certificates, write_csv, write_reports, Manifest};
use paranls::solver::{integrate, Termination};
use paranls::Error;
use rayon::prelude::*;
use serde_json::json;

#[derive(Parser)]
#[command(name = "paranls", version, about = "Paradifferential NLS laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the inequality registry.
    Verify(Common),
    /// Integrate one trajectory and its energy certificates.
    Simulate(Common),
    /// Escape-time scan over an (eps, s1) grid.
    Lifespan(Common),
}

#[derive(Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named configuration: plane_wave, admissible_1d, admissible_2d.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Registry ids to evaluate, comma separated.
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
}

enum Failure {
    Suite(String),
    Abort(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

type Outcome = Result<(), Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonContractive { .. } | Error::NeumannNotConverged { .. } | Error::NonFiniteSymbol { .. } => 3,
        _ => 2,
    }
}

/// Input text, its origin, and the parsed experiment configuration.
struct Input {
    text: String,
    config_path: Option<String>,
    preset: Option<String>,
}

fn read_input(c: &Common, default_preset: Option<&str>) -> Result<Option<Input>, Error> {
    if let Some(path) = &c.config {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        return Ok(Some(Input {
            text,
            config_path: Some(path.display().to_string()),
            preset: None,
        }));
    }
    let Some(name) = c.preset.as_deref().or(default_preset) else {
        return Ok(None);
    };
    let cfg = preset(name)?;
    Ok(Some(Input {
        text: serde_json::to_string_pretty(&cfg)?,
        config_path: None,
        preset: Some(name.to_string()),
    }))
}

fn experiment(c: &Common) -> Result<(ExperimentConfig, Input), Error> {
    let input = read_input(c, Some("admissible_1d"))?.expect("default preset");
    let mut cfg = ExperimentConfig::from_json(&input.text)?;
    if let Some(seed) = c.seed {
        cfg.seed = seed;
        if let InitialData::Random(spec) = &mut cfg.data {
            spec.seed = None;
        }
    }
    Ok((cfg, input))
}

fn manifest(command: &str, input: &Input, config: serde_json::Value, seed: u64, started: u64) -> Manifest {
    Manifest {
        command: command.to_string(),
        config_path: input.config_path.clone(),
        preset: input.preset.clone(),
        config,
        seed,
        input_hash: content_hash(input.text.as_bytes()),
        started_unix: started,
        finished_unix: 0,
        outputs: Vec::new(),
        constants: serde_json::Value::Null,
        status: String::new(),
    }
}

fn finish(mut m: Manifest, out: &Path, status: &str) -> Result<(), Error> {
    let path = out.join("manifest.json");
    m.outputs.push(path.display().to_string());
    m.finished_unix = unix_now();
    m.status = status.to_string();
    m.write(&path)
}

fn verify(c: &Common) -> Outcome {
    let started = unix_now();
    let (cfg, input) = experiment(c)?;
    let ids: Vec<String> = if c.only.is_empty() {
        REGISTRY.iter().map(|s| s.to_string()).collect()
    } else {
        c.only.iter().map(|s| s.trim().to_string()).collect()
    };
    if let Some(bad) = ids.iter().find(|id| !REGISTRY.contains(&id.as_str())) {
        return Err(Error::UnknownId(bad.clone()).into());
    }
    let res = cfg.resolve()?;
    let opts = RegistryOptions {
        seed: cfg.seed,
        ..RegistryOptions::from_config(&cfg, &res)
    };
    let reports = ids
        .par_iter()
        .map(|id| inequality_check(id, &opts))
        .collect::<Result<Vec<_>, _>>()?;
    for r in &reports {
        println!(
            "{:<8} {}  max_normalized = {:.4e}  slope = {:+.3}",
            r.id,
            if r.pass { "PASS" } else { "FAIL" },
            r.max_normalized,
            r.slope
        );
    }
    fs::create_dir_all(&c.out).map_err(Error::from)?;
    let csv = c.out.join("reports.csv");
    write_reports(&csv, &reports)?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.id.as_str()).collect();
    let mut m = manifest("verify", &input, serde_json::to_value(&cfg).map_err(Error::from)?, cfg.seed, started);
    m.outputs.push(csv.display().to_string());
    m.constants = json!({ "resolved": res, "registry": opts });
    let status = if failed.is_empty() { "pass".to_string() } else { format!("fail: {}", failed.join(",")) };
    finish(m, &c.out, &status)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Suite(status))
    }
}

fn simulate(c: &Common) -> Outcome {
    let started = unix_now();
    let (mut cfg, input) = experiment(c)?;
    let res = cfg.resolve()?;
    let (u0, admissibility) = initial_state(&cfg, &res)?;
    if cfg.solver.t_end.is_none() {
        cfg.solver.t_end = Some(res.t_good);
    }
    let solver = cfg.solver_config(&res, admissibility.delta);
    let traj = integrate(&u0, &solver, &cfg.norm_set(&res)?)?;
    fs::create_dir_all(&c.out).map_err(Error::from)?;
    let traj_csv = c.out.join("trajectory.csv");
    write_csv(&traj_csv, &traj.telemetry)?;
    let certs = CertificateKind::ALL
        .iter()
        .map(|&k| energy_certificate(&traj.telemetry, &cfg, &res, k))
        .collect::<Result<Vec<_>, _>>()?;
    let cert_csv = c.out.join("certificates.csv");
    write_certificates(&cert_csv, &certs)?;
    for cert in &certs {
        println!(
            "{:<9} {}  inflation = {:.4}",
            cert.kind.name(),
            if cert.holds() { "holds" } else { "violated" },
            cert.inflation
        );
    }
    let mut m = manifest("simulate", &input, serde_json::to_value(&cfg).map_err(Error::from)?, cfg.seed, started);
    m.outputs.extend([traj_csv.display().to_string(), cert_csv.display().to_string()]);
    m.constants = json!({
        "resolved": res,
        "admissibility": admissibility,
        "termination": traj.termination,
        "dt": traj.dt,
        "inflation": certs.iter().map(|c| (c.kind.name(), c.inflation)).collect::<Vec<_>>(),
    });
    let aborted = matches!(traj.termination, Termination::NumericAbort { .. });
    println!("termination: {:?}", traj.termination);
    finish(m, &c.out, if aborted { "numeric_abort" } else { "ok" })?;
    if let Termination::NumericAbort { t } = traj.termination {
        return Err(Failure::Abort(format!("non-finite state at t = {t}")));
    }
    Ok(())
}

fn lifespan(c: &Common) -> Outcome {
    let started = unix_now();
    if c.preset.is_some() {
        return Err(Error::Config("lifespan takes --config, not --preset".into()).into());
    }
    let (mut grid, input) = match read_input(c, None)? {
        Some(input) => {
            let g: LifespanGrid = serde_json::from_str(&input.text).map_err(|e| Error::Config(e.to_string()))?;
            (g, input)
        }
        None => {
            let g = LifespanGrid::default();
            let text = serde_json::to_string_pretty(&g).map_err(Error::from)?;
            (g, Input { text, config_path: None, preset: None })
        }
    };
    if let Some(seed) = c.seed {
        grid.seed = seed;
    }
    let cells = lifespan_scan(&grid)?;
    fs::create_dir_all(&c.out).map_err(Error::from)?;
    let csv = c.out.join("lifespan.csv");
    write_csv(&csv, &cells)?;
    for cell in &cells {
        println!(
            "eps = {:<5} s1 = {:<3} {}  T_good = {:.4e}  observed = {:.4e}{}",
            cell.eps,
            cell.s1,
            if cell.pass { "PASS" } else { "FAIL" },
            cell.t_good,
            cell.observed,
            if cell.note.is_empty() { String::new() } else { format!("  ({})", cell.note) }
        );
    }
    let failed = cells.iter().filter(|c| !c.pass).count();
    let mut m = manifest("lifespan", &input, serde_json::to_value(&grid).map_err(Error::from)?, grid.seed, started);
    m.outputs.push(csv.display().to_string());
    m.constants = json!(cells
        .iter()
        .map(|c| json!({ "index": c.index, "M": c.m, "R": c.r, "t_good": c.t_good }))
        .collect::<Vec<_>>());
    let status = if failed == 0 { "pass".to_string() } else { format!("fail: {failed} cells") };
    finish(m, &c.out, &status)?;
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Suite(status))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Verify(c) | Command::Simulate(c) | Command::Lifespan(c) => c,
    };
    if let Some(n) = common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match &cli.command {
        Command::Verify(c) => verify(c),
        Command::Simulate(c) => simulate(c),
        Command::Lifespan(c) => lifespan(c),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Suite(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Abort(msg)) => {
            eprintln!("numeric abort: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
