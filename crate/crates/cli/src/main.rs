//! `sphere-re`: scans, solves and verifies relative equilibria of three bodies
//! on the unit sphere.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{envelope, Output};
use config::{Format, Job, JobConfig, Mode};
use error::CliError;

const AFTER_HELP: &str = "\
Angles are in radians. CSV floats carry 17 significant digits.

CSV columns:
  ere-scan        a,x,det,class,theta1,theta2,theta3,s,omega2,fixed_point,degenerate,relative_residual
  ere-scan --raw  a,x,det
  lre-scan        sigma12,sigma,omega2,lambda,equilateral,residual,mirror_q
  verify          index,kind,pass,sigma_drift,theta_drift,phi_dot_drift,energy_drift,
                  cx_drift,cy_drift,cz_drift,frame_drift,steps,dt,T,aborted_at,abort_reason
With --verify, scans append verified,sigma_drift,energy_drift,momentum_drift,frame_drift,aborted_at.

Exit status: 0 success, 2 invalid input or configuration, 3 numerical failure.
SPHERE_RE_THREADS caps the number of worker threads.";

#[derive(Parser, Debug)]
#[command(name = "sphere-re", version, about = "Relative equilibria of three bodies on the sphere", after_help = AFTER_HELP)]
struct Cli {
    /// TOML job file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug)]
struct Common {
    /// Masses as m1,m2,m3.
    #[arg(long, value_parser = triple, global = true)]
    masses: Option<[f64; 3]>,
    /// Pair potential: cotangent or negated-cotangent.
    #[arg(long, global = true)]
    potential: Option<String>,
    /// Output path, or - for stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Attach a verification report to every solved candidate.
    #[arg(long, global = true)]
    verify: bool,
    /// Integration window.
    #[arg(long = "T", global = true)]
    t_end: Option<f64>,
    /// RK4 step.
    #[arg(long, global = true)]
    dt: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zero set of the collinear shape determinant over (a, x).
    EreScan {
        /// Rows in a; columns default to twice this.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        x_grid: Option<usize>,
        /// Write the determinant on every grid node instead of the zero set.
        #[arg(long)]
        raw: bool,
    },
    /// Solve one collinear shape.
    EreSolve {
        /// a,x
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        shape: Option<Vec<f64>>,
    },
    /// Equal-mass isosceles Lagrangian family over σ12.
    LreScan {
        #[arg(long)]
        sigma12_grid: Option<usize>,
        /// Samples per σ12 in the root search.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Reconstruct a Lagrangian relative equilibrium from its arc angles.
    LreSolve {
        /// s12,s23,s31
        #[arg(long, value_delimiter = ',')]
        shape: Option<Vec<f64>>,
    },
    /// Eigenpairs of the shape matrix.
    Axis {
        /// s12,s23,s31
        #[arg(long, value_delimiter = ',')]
        shape: Option<Vec<f64>>,
    },
    /// Integrate candidates and report drifts.
    Verify {
        /// JSON candidates, or - for stdin.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Small-scale limits: Euler quintic and planar momenta.
    EuclidLimit {
        #[arg(long)]
        epsilon: Option<f64>,
        /// r12,r23
        #[arg(long, value_parser = pair)]
        spacing: Option<[f64; 2]>,
        /// r1,r2,r3,phi1,phi2,phi3,rdot1,rdot2,rdot3,phidot1,phidot2,phidot3
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        planar_state: Option<Vec<f64>>,
    },
    /// Grid-and-polish search for scalene equal-mass Lagrangian solutions.
    ScaleneLreSearch {
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        margin: Option<f64>,
        #[arg(long)]
        max_polish: Option<usize>,
    },
}

fn numbers<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect::<Result<_, _>>()?;
    <[f64; N]>::try_from(v.as_slice()).map_err(|_| format!("expected {N} comma-separated numbers, got {}", v.len()))
}

fn triple(s: &str) -> Result<[f64; 3], String> {
    numbers::<3>(s)
}

fn pair(s: &str) -> Result<[f64; 2], String> {
    numbers::<2>(s)
}

impl Command {
    fn into_config(self) -> JobConfig {
        let mut c = JobConfig::default();
        match self {
            Command::EreScan { grid, x_grid, raw } => {
                c.mode = Some(Mode::EreScan);
                (c.grid, c.x_grid) = (grid, x_grid);
                c.raw = raw.then_some(true);
            }
            Command::EreSolve { shape } => (c.mode, c.shape) = (Some(Mode::EreSolve), shape),
            Command::LreScan { sigma12_grid, samples } => {
                c.mode = Some(Mode::LreScan);
                (c.sigma12_grid, c.samples) = (sigma12_grid, samples);
            }
            Command::LreSolve { shape } => (c.mode, c.shape) = (Some(Mode::LreSolve), shape),
            Command::Axis { shape } => (c.mode, c.shape) = (Some(Mode::Axis), shape),
            Command::Verify { input } => (c.mode, c.input) = (Some(Mode::Verify), input),
            Command::EuclidLimit { epsilon, spacing, planar_state } => {
                c.mode = Some(Mode::EuclidLimit);
                (c.epsilon, c.spacing, c.planar_state) = (epsilon, spacing, planar_state);
            }
            Command::ScaleneLreSearch { resolution, margin, max_polish } => {
                c.mode = Some(Mode::ScaleneLreSearch);
                (c.resolution, c.margin, c.max_polish) = (resolution, margin, max_polish);
            }
        }
        c
    }
}

impl Common {
    fn into_config(self) -> JobConfig {
        JobConfig {
            masses: self.masses,
            potential: self.potential,
            output: self.output,
            format: self.format,
            verify: self.verify.then_some(true),
            t_end: self.t_end,
            dt: self.dt,
            ..Default::default()
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SPHERE_RE_THREADS") else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::validation("bad_threads", format!("SPHERE_RE_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::numerical("internal", e.to_string()))
}

fn write_output(job: &Job, out: Output) -> Result<(), CliError> {
    let mut bytes = Vec::new();
    match (job.format, out.table) {
        (Format::Csv, Some(table)) => {
            let mut w = csv::Writer::from_writer(&mut bytes);
            w.write_record(&table.header)?;
            for row in &table.rows {
                w.write_record(row.iter().map(|c| c.csv()))?;
            }
            w.flush()?;
        }
        _ => {
            serde_json::to_writer_pretty(&mut bytes, &envelope(job, out.result))?;
            bytes.push(b'\n');
        }
    }
    if job.output.as_os_str() == "-" {
        match std::io::stdout().lock().write_all(&bytes) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            r => r?,
        }
    } else {
        std::fs::write(&job.output, bytes)?;
    }
    Ok(())
}

fn real_main() -> Result<(), CliError> {
    let cli = Cli::parse();
    configure_threads()?;
    let base = match &cli.config {
        Some(path) => JobConfig::from_toml(&std::fs::read_to_string(path)?)?,
        None => JobConfig::default(),
    };
    let cfg = match cli.command {
        Some(cmd) => base.overlay(cmd.into_config()),
        None => base,
    };
    let job = cfg.overlay(cli.common.into_config()).validate()?;
    let out = commands::run(&job)?;
    write_output(&job, out)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::json!({ "error": e }));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
