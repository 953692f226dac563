use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use netkin::experiments::{
    self, RunManifest, TableOptions, ENTROPY_HEADER, FIXPOINT_HEADER, SWEEP_HEADER,
};
use netkin::output::{self, fmt};
use netkin::scenario::{load_scenario, parse_coupling, parse_model, Overrides};
use netkin::{Error, Result};
use netkin_core::coupling::invariant_coefficient;
use netkin_core::halfspace::{extrapolation_length, AlbedoParams, ExtrapolationMethod, NumericParams};
use netkin_core::{VelocityModel, BOUNDED_WAVE_SPEED};

#[derive(Parser)]
#[command(name = "netkin", version, about = "Kinetic, half-moment and wave simulations on networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write snapshot and entropy CSVs.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Also dump the full distribution of kinetic runs.
        #[arg(long)]
        kinetic_dump: bool,
    },
    /// Distance of kinetic or half-moment runs to the wave reference for several epsilon.
    SweepEpsilon {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001")]
        epsilons: Vec<f64>,
    },
    /// Total entropy and entropy loss per model on a scenario (tripod by default).
    TableEntropy {
        #[arg(long, default_value = "tripod")]
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cells per edge for the wave model.
        #[arg(long, default_value_t = 3000)]
        cells: usize,
        /// Cells per edge for the kinetic and half-moment models.
        #[arg(long, default_value_t = 1000)]
        pde_cells: usize,
        #[arg(long, default_value_t = 400)]
        vcells: usize,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.1)]
        t_end: f64,
    },
    /// Invariant coefficient K of a macroscopic coupling.
    CouplingCoeff {
        #[arg(long)]
        coupling: String,
        #[arg(long, default_value_t = 3)]
        degree: usize,
        /// Wave speed; defaults to 1/sqrt(3).
        #[arg(long)]
        a: Option<f64>,
    },
    /// Extrapolation length of a layer approximation.
    Extrapolation {
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long, value_enum, default_value = "bounded")]
        velocity: Velocity,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long, default_value_t = 2000)]
        cells: usize,
        #[arg(long, default_value_t = 400)]
        vcells: usize,
    },
    /// Coupled half-space fixpoint at a uniform node.
    HalfspaceFixpoint {
        /// Incoming invariants q - a rho per edge; defaults to the tripod data.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        r1: Vec<f64>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        cells: usize,
        #[arg(long, default_value_t = 200)]
        vcells: usize,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file, or one of the bundled names tripod, diamond, single_edge.
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    coupling: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    vcells: Option<usize>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    snapshots: Vec<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Maxwell,
    HalfMoment,
    Numeric,
}

#[derive(Clone, Copy, ValueEnum)]
enum Velocity {
    Bounded,
    Unbounded,
}

impl From<Velocity> for VelocityModel {
    fn from(v: Velocity) -> Self {
        match v {
            Velocity::Bounded => VelocityModel::Bounded,
            Velocity::Unbounded => VelocityModel::Unbounded,
        }
    }
}

impl RunArgs {
    fn load(&self) -> Result<netkin::LoadedScenario> {
        let overrides = Overrides {
            model: self.model.as_deref().map(parse_model).transpose()?,
            coupling: self.coupling.as_deref().map(parse_coupling).transpose()?,
            epsilon: self.epsilon,
            cells: self.cells,
            velocity_cells: self.vcells,
            cfl: self.cfl,
            t_end: self.t_end,
        };
        load_scenario(&self.scenario)?.with_overrides(&overrides)
    }
}

fn emit(out: Option<&PathBuf>, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.clone(), source })?;
            output::write_table(&dir.join(name), header, rows)
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(output::table_string(header, rows).as_bytes())
                .map_err(|source| Error::Io { path: "<stdout>".into(), source })
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { run, kinetic_dump } => {
            let loaded = run.load()?;
            let manifest = RunManifest {
                out: run.out.clone().unwrap_or_else(|| PathBuf::from("out")),
                snapshots: run.snapshots.clone(),
                entropy_every: 1,
                kinetic_dump,
            };
            let out = experiments::simulate(&loaded, &manifest)?;
            eprintln!(
                "{} steps to t = {}, {} snapshots in {}",
                out.steps,
                loaded.scenario.t_end,
                out.snapshots.len(),
                manifest.out.display()
            );
            if out.warnings > 0 {
                eprintln!("warning: {} cell updates produced negative equilibrium values", out.warnings);
            }
            Ok(())
        }
        Command::SweepEpsilon { run, epsilons } => {
            let rows = experiments::sweep_epsilon(&run.load()?, &epsilons)?;
            let cells: Vec<_> = rows.iter().map(|r| r.cells()).collect();
            emit(run.out.as_ref(), "sweep_epsilon.csv", &SWEEP_HEADER, &cells)
        }
        Command::TableEntropy { scenario, out, cells, pde_cells, vcells, epsilon, t_end } => {
            let loaded = load_scenario(&scenario)?;
            let options = TableOptions {
                wave_cells: cells,
                pde_cells,
                velocity_cells: vcells,
                epsilon,
                t_end,
                ..TableOptions::default()
            };
            let rows = experiments::table_entropy(&loaded, &options)?;
            let cells: Vec<_> = rows.iter().map(|r| r.cells()).collect();
            emit(out.as_ref(), "table_entropy.csv", &ENTROPY_HEADER, &cells)
        }
        Command::CouplingCoeff { coupling, degree, a } => {
            let kind = parse_coupling(&coupling)?;
            let a = a.unwrap_or(BOUNDED_WAVE_SPEED);
            println!("{}", fmt(invariant_coefficient(kind, degree, a)?));
            Ok(())
        }
        Command::Extrapolation { method, velocity, a, cells, vcells } => {
            let velocity = VelocityModel::from(velocity);
            let a = a.unwrap_or(match velocity {
                VelocityModel::Bounded => BOUNDED_WAVE_SPEED,
                VelocityModel::Unbounded => 1.0,
            });
            let (name, method) = match method {
                Method::Maxwell => ("maxwell", ExtrapolationMethod::Maxwell),
                Method::HalfMoment => ("half_moment", ExtrapolationMethod::HalfMoment),
                Method::Numeric => ("numeric", ExtrapolationMethod::Numeric),
            };
            let params = NumericParams { cells, velocity_cells: vcells, ..NumericParams::default() };
            let lambda = extrapolation_length(method, velocity, a, &params)?;
            let rows = [vec![name.to_string(), fmt(a), fmt(lambda)]];
            emit(None, "", &["method", "a", "lambda"], &rows)
        }
        Command::HalfspaceFixpoint { r1, a, cells, vcells, tolerance } => {
            let a = a.unwrap_or(BOUNDED_WAVE_SPEED);
            let r1 = if r1.is_empty() { vec![-a, -2.0 * a / 3.0, 0.0] } else { r1 };
            let params = AlbedoParams {
                numeric: NumericParams { cells, velocity_cells: vcells, ..NumericParams::default() },
                tolerance,
                ..AlbedoParams::default()
            };
            let (fix, rows) = experiments::halfspace_fixpoint(&r1, a, &params)?;
            eprintln!("{} iterations, final change {:.3e}", fix.iterations, fix.change);
            emit(None, "", &FIXPOINT_HEADER, &rows)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
