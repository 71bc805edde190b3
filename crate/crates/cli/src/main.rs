use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use blockade::model::SystemConfig;
use blockade::solvers::{dressed_energies, fock_convergence, g2_zero, mean_photon, steady_state_for, ConvergenceObservable};
use blockade::sweep::{self, figure_preset, format_value, run_sweep, Format, RunOptions, SweepSpec, FIGURE_IDS};
use blockade::transmission::{t1, t2};
use blockade::Error;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

/// Photon-blockade simulations of a four-level emitter in a cavity.
///
/// Rates and detunings on the command line and in config files are linear
/// frequencies in GHz.
#[derive(Parser, Debug)]
#[command(name = "blockade", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON configuration layered over the built-in resonant system.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override one configuration key, e.g. `--set kappa=6` (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Output file, or directory for `sweep` and `figure`.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,

    /// Fock-space truncation (photon numbers 0..N-1).
    #[arg(long = "n-fock", global = true, value_name = "N")]
    n_fock: Option<usize>,

    /// Evaluate sweep points on one thread.
    #[arg(long = "no-parallel", global = true)]
    no_parallel: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Steady-state mean photon number and g2(0).
    Steady,
    /// Steady-state g2(0).
    G2,
    /// Dressed-state energies (in units of g_eg) and widths of one manifold.
    Dressed {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        manifold: u8,
    },
    /// First- and second-photon transmission estimates.
    Transmission,
    /// Run a sweep described by a JSON spec.
    Sweep {
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
    },
    /// Run a figure preset (or `all`) and write `<id>.csv` into the output directory.
    Figure { id: String },
    /// Smallest truncation at which an observable settles.
    Convergence {
        #[arg(long, value_enum, default_value_t = ObservableArg::G2)]
        observable: ObservableArg,
        /// Relative change accepted between successive truncations.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ObservableArg {
    G2,
    NPhoton,
}

fn load_config(cli: &Cli) -> blockade::Result<SystemConfig> {
    let mut config = SystemConfig::default();
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        config = config.merge_json_str(&text).map_err(|e| match e {
            Error::Json { source, .. } => Error::Json {
                context: path.display().to_string(),
                source,
            },
            other => other,
        })?;
    }
    for item in &cli.overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("--set expects KEY=VALUE, got `{item}`")))?;
        config.set_field(key.trim(), value)?;
    }
    if let Some(n) = cli.n_fock {
        config.n_fock = n;
    }
    config.validate()?;
    Ok(config)
}

/// A single-row table rendered as CSV or as a JSON object.
fn table(format: OutputFormat, header: &[&str], rows: &[Vec<f64>]) -> String {
    match format {
        OutputFormat::Csv => {
            let mut text = header.join(",");
            text.push('\n');
            for row in rows {
                let cells: Vec<String> = row.iter().map(|&x| format_value(x)).collect();
                text.push_str(&cells.join(","));
                text.push('\n');
            }
            text
        }
        OutputFormat::Json => {
            let records: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let map: Map<String, Value> =
                        header.iter().zip(row).map(|(k, &v)| (k.to_string(), json!(v))).collect();
                    Value::Object(map)
                })
                .collect();
            let value = if records.len() == 1 {
                records.into_iter().next().unwrap()
            } else {
                Value::Array(records)
            };
            let mut text = serde_json::to_string_pretty(&value).expect("table serializes");
            text.push('\n');
            text
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> blockade::Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|source| Error::Io {
                    path: dir.to_path_buf(),
                    source,
                })?;
            }
            fs::write(path, text).map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })
        }
    }
}

fn run_options(cli: &Cli) -> RunOptions {
    RunOptions {
        parallel: !cli.no_parallel,
        n_fock: cli.n_fock,
    }
}

fn write_sweep(result: &sweep::SweepResult, cli: &Cli, default_dir: Option<&Path>) -> blockade::Result<()> {
    let format = Format::from(cli.format);
    let target = cli.out.as_deref().or(default_dir);
    match target {
        None => emit(
            None,
            &match format {
                Format::Csv => sweep::csv_string(result)?,
                Format::Json => sweep::json_string(result) + "\n",
            },
        ),
        Some(path) => {
            let is_dir = path.is_dir()
                || path.as_os_str().to_string_lossy().ends_with('/')
                || default_dir.is_some()
                || path.extension().is_none();
            let written = if is_dir {
                sweep::write_result(result, format, path)?
            } else {
                sweep::write_file(result, format, path)?;
                path.to_path_buf()
            };
            eprintln!("wrote {}", written.display());
            Ok(())
        }
    }
}

fn report(result: &sweep::SweepResult, started: Instant) {
    let meta = &result.metadata;
    eprintln!(
        "{}: {} rows, {} failures, {} optimizer boundary hits, max residual {:.1e}, {:.1} s",
        meta.id,
        result.rows.len(),
        meta.failures.len(),
        meta.boundary_hits.len(),
        meta.max_residual,
        started.elapsed().as_secs_f64()
    );
}

fn run(cli: &Cli) -> blockade::Result<()> {
    match &cli.command {
        Command::Steady => {
            let config = load_config(cli)?;
            let rho = steady_state_for(&config)?.rho;
            let row = vec![mean_photon(&rho), g2_zero(&rho)?];
            emit(cli.out.as_deref(), &table(cli.format, &["n_photon", "g2"], &[row]))
        }
        Command::G2 => {
            let config = load_config(cli)?;
            let g2 = g2_zero(&steady_state_for(&config)?.rho)?;
            emit(cli.out.as_deref(), &table(cli.format, &["g2"], &[vec![g2]]))
        }
        Command::Dressed { manifold } => {
            let config = load_config(cli)?;
            let spectrum = dressed_energies(&config, *manifold as usize)?;
            let rows: Vec<Vec<f64>> = spectrum
                .energies_over_g
                .iter()
                .zip(&spectrum.widths)
                .map(|(&e, &w)| vec![e, w / config.g_eg])
                .collect();
            emit(
                cli.out.as_deref(),
                &table(cli.format, &["energy_over_g", "width_over_g"], &rows),
            )
        }
        Command::Transmission => {
            let config = load_config(cli)?;
            let row = vec![t1(&config)?, t2(&config)?];
            emit(cli.out.as_deref(), &table(cli.format, &["t1", "t2"], &[row]))
        }
        Command::Convergence { observable, tol } => {
            let config = load_config(cli)?;
            let observable = match observable {
                ObservableArg::G2 => ConvergenceObservable::G2,
                ObservableArg::NPhoton => ConvergenceObservable::NPhoton,
            };
            let c = fock_convergence(&config, observable, *tol)?;
            emit(
                cli.out.as_deref(),
                &table(cli.format, &["n_fock", "value"], &[vec![c.n_fock as f64, c.value]]),
            )
        }
        Command::Sweep { spec } => {
            if cli.config.is_some() || !cli.overrides.is_empty() {
                return Err(Error::InvalidConfig(
                    "sweep specs carry their own configurations; drop --config/--set".into(),
                ));
            }
            let text = fs::read_to_string(spec).map_err(|source| Error::Io {
                path: spec.clone(),
                source,
            })?;
            let spec = SweepSpec::from_json_str(&text)?;
            let started = Instant::now();
            let result = run_sweep(&spec, run_options(cli))?;
            report(&result, started);
            write_sweep(&result, cli, None)
        }
        Command::Figure { id } => {
            if cli.config.is_some() || !cli.overrides.is_empty() {
                return Err(Error::InvalidConfig(
                    "figure presets fix their own parameters; drop --config/--set".into(),
                ));
            }
            let ids: Vec<&str> = if id == "all" { FIGURE_IDS.to_vec() } else { vec![id.as_str()] };
            let specs = ids
                .iter()
                .map(|id| figure_preset(id))
                .collect::<blockade::Result<Vec<_>>>()?;
            let total = Instant::now();
            let default_dir = Path::new("results");
            for spec in specs.iter().flatten() {
                let started = Instant::now();
                let result = run_sweep(spec, run_options(cli))?;
                report(&result, started);
                write_sweep(&result, cli, Some(default_dir))?;
            }
            eprintln!("total {:.1} s", total.elapsed().as_secs_f64());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::UnknownParameter(_) = e {
                eprintln!("hint: valid keys are scheme, n_fock, g_eg, g_fs, omega_rabi, eps, kappa, gamma_sg, gamma_eg, gamma_es, gamma_fg, gamma_fs, delta_c, delta_sg, delta_eg, delta_fg, widths");
            }
            if let Error::UnknownFigure(_) = e {
                eprintln!("hint: figure ids are {} or all", FIGURE_IDS.join(", "));
            }
            ExitCode::from(if e.is_config_error() { 1 } else { 2 })
        }
    }
}
