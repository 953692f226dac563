//! Experiment drivers behind the command line: scenario runs with CSV output,
//! the ε sweep against the wave reference, and the tripod entropy table.

use std::fs;
use std::path::{Path, PathBuf};

use netkin_core::diagnostics::{entropy, l1_density_distance, l1_distance};
use netkin_core::halfspace::{albedo_fixpoint_node, AlbedoFixpoint, AlbedoParams};
use netkin_core::simulate::{run, EntropyRecording, RunOutput, SnapshotDetail};
use netkin_core::{Closure, CouplingKind, CouplingMatrix, Model, VelocityModel};

use crate::error::{Error, Result};
use crate::output::{self, fmt};
use crate::scenario::{LoadedScenario, Overrides};

/// Coupling of the reference solution used by the ε sweep.
pub const REFERENCE_COUPLING: CouplingKind =
    CouplingKind::Macroscopic { closure: Closure::HalfMoment, velocity: VelocityModel::Bounded };

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub out: PathBuf,
    /// Extra snapshot times; the final time is always written.
    pub snapshots: Vec<f64>,
    /// Entropy is recorded every this many steps.
    pub entropy_every: usize,
    /// Also write the full distribution for kinetic runs.
    pub kinetic_dump: bool,
}

impl RunManifest {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        Self { out: out.into(), snapshots: Vec::new(), entropy_every: 1, kinetic_dump: false }
    }
}

fn snapshot_name(prefix: &str, index: usize, t: f64) -> String {
    format!("{prefix}_{index:03}_t{t:.6}.csv")
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })
}

/// Runs the scenario and writes `snapshot_*.csv` (plus `kinetic_*.csv` when
/// requested) and `entropy.csv` into `manifest.out`.
pub fn simulate(loaded: &LoadedScenario, manifest: &RunManifest) -> Result<RunOutput> {
    let LoadedScenario { network, scenario } = loaded;
    if let Some(t) = manifest.snapshots.iter().find(|t| !(**t >= 0.0 && **t <= scenario.t_end)) {
        return Err(Error::Invalid(format!("snapshot time {t} lies outside [0, {}]", scenario.t_end)));
    }
    create_dir(&manifest.out)?;
    let out = run(network, scenario, &manifest.snapshots, EntropyRecording::Every(manifest.entropy_every.max(1)))?;
    for (k, snap) in out.snapshots.iter().enumerate() {
        let path = manifest.out.join(snapshot_name("snapshot", k, snap.t));
        match &snap.detail {
            SnapshotDetail::HalfMoment(field) => output::write_halfmoment_snapshot(&path, network, field)?,
            SnapshotDetail::Kinetic(field) => {
                output::write_macro_snapshot(&path, network, &snap.states)?;
                if manifest.kinetic_dump {
                    let dump = manifest.out.join(snapshot_name("kinetic", k, snap.t));
                    output::write_kinetic_dump(&dump, network, field)?;
                }
            }
            SnapshotDetail::Wave(_) => output::write_macro_snapshot(&path, network, &snap.states)?,
        }
    }
    output::write_entropy_series(&manifest.out.join("entropy.csv"), &out.entropy)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    /// `Σ (|Δρ| + |Δq|) Δx` to the reference at `t_end`.
    pub distance: f64,
    /// `Σ |Δρ| Δx`.
    pub density_distance: f64,
}

pub const SWEEP_HEADER: [&str; 3] = ["epsilon", "distance", "density_distance"];

impl SweepRow {
    pub fn cells(&self) -> Vec<String> {
        vec![fmt(self.epsilon), fmt(self.distance), fmt(self.density_distance)]
    }
}

/// Runs a kinetic or half-moment scenario for each ε and compares the final
/// state with the wave model under half-moment coupling on the same grid.
pub fn sweep_epsilon(loaded: &LoadedScenario, epsilons: &[f64]) -> Result<Vec<SweepRow>> {
    if loaded.scenario.model == Model::Wave {
        return Err(Error::Invalid("the epsilon sweep needs the kinetic or half_moment model".into()));
    }
    let reference = loaded.with_overrides(&Overrides {
        model: Some(Model::Wave),
        coupling: Some(REFERENCE_COUPLING),
        ..Overrides::default()
    })?;
    let reference = run(&reference.network, &reference.scenario, &[], EntropyRecording::Off)?;
    let reference = &reference.final_snapshot().states;
    let dx: Vec<f64> = loaded.network.edges.iter().map(|e| e.dx()).collect();
    epsilons
        .iter()
        .map(|&epsilon| {
            let case = loaded.with_overrides(&Overrides { epsilon: Some(epsilon), ..Overrides::default() })?;
            let out = run(&case.network, &case.scenario, &[], EntropyRecording::Off)?;
            let states = &out.final_snapshot().states;
            Ok(SweepRow {
                epsilon,
                distance: l1_distance(states, reference, &dx)?,
                density_distance: l1_density_distance(states, reference, &dx)?,
            })
        })
        .collect()
}

/// One row of the entropy table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TableEntry {
    Wave(CouplingKind),
    HalfMoment,
    Kinetic,
}

impl TableEntry {
    /// Wave model with the four node conditions, then the two kinetic-coupled PDEs.
    pub fn standard() -> Vec<TableEntry> {
        let bounded = |closure| CouplingKind::Macroscopic { closure, velocity: VelocityModel::Bounded };
        vec![
            TableEntry::Wave(CouplingKind::EqualDensity),
            TableEntry::Wave(bounded(Closure::FullMoment)),
            TableEntry::Wave(bounded(Closure::Maxwell)),
            TableEntry::Wave(bounded(Closure::HalfMoment)),
            TableEntry::HalfMoment,
            TableEntry::Kinetic,
        ]
    }

    pub fn label(&self) -> String {
        match self {
            TableEntry::Wave(CouplingKind::EqualDensity) => "wave equal density".into(),
            TableEntry::Wave(CouplingKind::Macroscopic { closure, velocity }) => {
                let name = match closure {
                    Closure::FullMoment => "full moment",
                    Closure::Maxwell => "Maxwell",
                    Closure::HalfMoment => "half moment",
                };
                match velocity {
                    VelocityModel::Bounded => format!("wave {name}"),
                    VelocityModel::Unbounded => format!("wave {name} (unbounded)"),
                }
            }
            TableEntry::Wave(CouplingKind::Kinetic) => "wave kinetic".into(),
            TableEntry::HalfMoment => "half moment".into(),
            TableEntry::Kinetic => "kinetic".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableOptions {
    pub entries: Vec<TableEntry>,
    pub t_end: f64,
    /// Cells per edge for the wave model.
    pub wave_cells: usize,
    /// Cells per edge for the kinetic and half-moment models.
    pub pde_cells: usize,
    pub velocity_cells: usize,
    pub epsilon: f64,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self {
            entries: TableEntry::standard(),
            t_end: 0.1,
            wave_cells: 3000,
            pde_cells: 1000,
            velocity_cells: 400,
            epsilon: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyRow {
    pub label: String,
    pub cells: usize,
    pub total_entropy: f64,
    /// Change against the entropy of the initial data.
    pub loss: f64,
}

pub const ENTROPY_HEADER: [&str; 4] = ["model", "cells", "total_entropy", "entropy_loss"];

impl EntropyRow {
    pub fn cells(&self) -> Vec<String> {
        vec![self.label.clone(), self.cells.to_string(), fmt(self.total_entropy), fmt(self.loss)]
    }
}

/// Total entropy at `t_end` for each entry, started from the scenario's
/// initial data and boundaries.
pub fn table_entropy(loaded: &LoadedScenario, options: &TableOptions) -> Result<Vec<EntropyRow>> {
    options
        .entries
        .iter()
        .map(|entry| {
            let (model, coupling, cells) = match *entry {
                TableEntry::Wave(kind) => (Model::Wave, kind, options.wave_cells),
                TableEntry::HalfMoment => (Model::HalfMoment, CouplingKind::Kinetic, options.pde_cells),
                TableEntry::Kinetic => (Model::Kinetic, CouplingKind::Kinetic, options.pde_cells),
            };
            let case = loaded.with_overrides(&Overrides {
                model: Some(model),
                coupling: Some(coupling),
                epsilon: Some(options.epsilon),
                cells: Some(cells),
                velocity_cells: Some(options.velocity_cells),
                cfl: Some(1.0),
                t_end: Some(options.t_end),
            })?;
            let out = run(&case.network, &case.scenario, &[], EntropyRecording::Off)?;
            let dx: Vec<f64> = case.network.edges.iter().map(|e| e.dx()).collect();
            let initial: Vec<Vec<_>> = case
                .network
                .edges
                .iter()
                .zip(&case.scenario.initial)
                .map(|(e, init)| vec![init.macro_state(); e.cells])
                .collect();
            let e0 = entropy(&initial, &dx, case.scenario.a);
            let e1 = entropy(&out.final_snapshot().states, &dx, case.scenario.a);
            Ok(EntropyRow { label: entry.label(), cells, total_entropy: e1, loss: e1 - e0 })
        })
        .collect()
}

pub const FIXPOINT_HEADER: [&str; 4] = ["edge", "rho_inf", "q_inf", "fitted_k"];

/// Albedo fixpoint at a uniform node of degree `r1.len()`. Row `i` reports
/// the coefficient fitted between edges `i` and `i + 1` (cyclically).
pub fn halfspace_fixpoint(r1: &[f64], a: f64, params: &AlbedoParams) -> Result<(AlbedoFixpoint, Vec<Vec<String>>)> {
    let n = r1.len();
    let matrix = CouplingMatrix::uniform(n)?;
    let fix = albedo_fixpoint_node(&matrix, r1, a, params)?;
    let rows = (0..n)
        .map(|i| {
            let e = &fix.edges[i];
            vec![(i + 1).to_string(), fmt(e.rho_inf), fmt(e.q_inf), fmt(fix.fitted_coefficient(i, (i + 1) % n))]
        })
        .collect();
    Ok((fix, rows))
}
