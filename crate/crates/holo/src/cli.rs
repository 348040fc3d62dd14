//! Command-line front end.
//!
//! Exit codes: 0 when the report passed, 1 on runtime or input errors,
//! 2 on usage errors, and `10 + class` for the first failing residual.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{Config, Settings, TOL_ENV};
use crate::error::{HoloError, HoloResult};
use crate::experiments::{
    default_fixture_grid, default_phi_grid, linspace, run_4pi, run_fixtures, run_convergence,
    run_crosscheck_batch, run_holonomic, run_sequence, run_smooth, CrosscheckParams,
};
use crate::io::{read_json, PathFile, SequenceFile};
use crate::registry::named_path;
use crate::report::ExperimentReport;

#[derive(Debug, Parser)]
#[command(name = "holo", version, about = "Holonomies of quantum channel sequences and paths")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// key = value file with tol, steps, schrodinger_steps, reference_steps, chi_points, seed.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Residual threshold; overrides the config file and HOLO_TOL.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Grid intervals for potentials and Wilson lines.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Worker threads for independent seeds.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write the series as CSV.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Holonomy of a channel sequence file.
    Seq { file: PathBuf },
    /// Smooth holonomy of a path file or a registered path name.
    Smooth {
        path: String,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        params: Vec<f64>,
    },
    /// Direct, Uhlmann and interferometric holonomies of random sequences.
    Crosscheck {
        #[arg(short, default_value_t = 4)]
        n: usize,
        #[arg(short, default_value_t = 2)]
        d: usize,
        #[arg(short, default_value_t = 4)]
        k: usize,
        /// Number of consecutive seeds.
        #[arg(long, default_value_t = 1)]
        repeat: usize,
        #[arg(long)]
        constant: bool,
    },
    /// Spin-rotation interferometer over a grid of angles in [0, 8π].
    #[command(name = "4pi")]
    FourPi {
        #[arg(long, default_value_t = 512)]
        points: usize,
        /// Explicit angles; replaces the uniform grid.
        #[arg(long, value_delimiter = ',')]
        phi: Vec<f64>,
        #[arg(long)]
        phase_shift: bool,
    },
    /// Overlap matrices of the phase-flip, bit-flip and amplitude-damping fixtures.
    Fixtures {
        #[arg(long, value_delimiter = ',')]
        grid: Vec<f64>,
    },
    /// Holonomic channel of a named frame family.
    Holonomic {
        #[arg(default_value = "rotating-plane")]
        family: String,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        params: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [16usize, 64, 256])]
        n: Vec<usize>,
    },
    /// Convergence of discretized holonomies to the smooth one.
    Convergence {
        #[arg(default_value = "isometry")]
        path: String,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        params: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [250usize, 500, 1000, 2000])]
        sizes: Vec<usize>,
    },
}

pub fn settings_for(common: &Common) -> HoloResult<Settings> {
    let config = common.config.as_deref().map(Config::load).transpose()?;
    let env = std::env::var(TOL_ENV).ok();
    let mut s = Settings::resolve(config.as_ref(), env.as_deref(), common.tol)?;
    if let Some(seed) = common.seed {
        s.seed = seed;
    }
    if let Some(steps) = common.steps {
        if steps == 0 {
            return Err(HoloError::Usage("--steps must be positive".into()));
        }
        s.steps = steps;
    }
    s.jobs = common.jobs.max(1);
    Ok(s)
}

pub fn run(cli: &Cli) -> HoloResult<ExperimentReport> {
    let s = settings_for(&cli.common)?;
    match &cli.command {
        Command::Seq { file } => {
            let seq: SequenceFile = read_json(file)?;
            run_sequence(&seq.to_sequence()?, &file.display().to_string(), &s)
        }
        Command::Smooth { path, params } => {
            if Path::new(path).exists() {
                match read_json::<PathFile>(Path::new(path))? {
                    PathFile::Named { name, params } => run_smooth(&*named_path(&name, &params)?, &name, &s),
                    sampled => {
                        let p = sampled.to_sampled_path()?.expect("sampled variant");
                        run_smooth(&p, path, &s)
                    }
                }
            } else {
                run_smooth(&*named_path(path, params)?, path, &s)
            }
        }
        Command::Crosscheck { n, d, k, repeat, constant } => {
            let p = CrosscheckParams { seed: s.seed, n: *n, d: *d, k: *k, constant: *constant };
            run_crosscheck_batch(&p, *repeat, &s)
        }
        Command::FourPi { points, phi, phase_shift } => {
            let grid = if phi.is_empty() {
                if *points == 512 {
                    default_phi_grid()
                } else {
                    linspace(0.0, 8.0 * std::f64::consts::PI, *points)
                }
            } else {
                phi.clone()
            };
            run_4pi(&grid, *phase_shift, &s)
        }
        Command::Fixtures { grid } => {
            let grid = if grid.is_empty() { default_fixture_grid() } else { grid.clone() };
            run_fixtures(&grid, &s)
        }
        Command::Holonomic { family, params, n } => {
            let params = if params.is_empty() { default_family_params(family) } else { params.clone() };
            run_holonomic(family, &params, n, &s)
        }
        Command::Convergence { path, params, sizes } => {
            let params = if params.is_empty() && path == "isometry" { vec![2.0, 2.0, 1.0, 13.0] } else { params.clone() };
            run_convergence(path, &params, sizes, &s)
        }
    }
}

fn default_family_params(name: &str) -> Vec<f64> {
    match name {
        "rotating-plane" => vec![1.0, 0.0],
        "bloch-circle" => vec![1.0],
        "geodesic-triangle" => vec![1.0, 0.0, 0.3, 0.0, 1.0, 0.2, 0.1, 0.2, 1.0],
        _ => Vec::new(),
    }
}

fn emit(cli: &Cli, report: &ExperimentReport) -> HoloResult<()> {
    match &cli.common.out {
        Some(p) => report.write_json(p)?,
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{}", report.to_json()?)?;
        }
    }
    if let Some(p) = &cli.common.csv {
        report.write_csv(std::fs::File::create(p)?)?;
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = run(&cli).and_then(|r| emit(&cli, &r).map(|_| r));
    match result {
        Ok(report) => {
            if !report.passed {
                if let Some((key, r)) = report.residuals.iter().find(|(_, r)| !r.passed()) {
                    eprintln!("holo: {key} = {:e} exceeds {:e}", r.value, r.threshold);
                }
            }
            report.exit_code()
        }
        Err(HoloError::Usage(m)) => {
            eprintln!("holo: {m}");
            2
        }
        Err(e) => {
            eprintln!("holo: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_verbs() {
        let cli = Cli::try_parse_from(["holo", "crosscheck", "-n", "3", "--seed", "7", "--jobs", "2"]).unwrap();
        assert!(matches!(cli.command, Command::Crosscheck { n: 3, .. }));
        assert_eq!(cli.common.seed, Some(7));
        let cli = Cli::try_parse_from(["holo", "4pi", "--phase-shift", "--phi", "0,1.5"]).unwrap();
        assert!(matches!(&cli.command, Command::FourPi { phi, phase_shift: true, .. } if phi.len() == 2));
        let cli = Cli::try_parse_from(["holo", "holonomic", "bloch-circle", "--params", "0.5"]).unwrap();
        assert!(matches!(&cli.command, Command::Holonomic { n, .. } if n == &vec![16, 64, 256]));
        assert!(Cli::try_parse_from(["holo", "unknown"]).is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(main_with_args(["holo", "frobnicate"]), 2);
        assert_eq!(main_with_args(["holo", "fixtures", "--grid", "2"]), 2);
    }
}
