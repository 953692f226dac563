//! Time integration driver shared by the three network solvers.

use alloc::vec::Vec;

use crate::diagnostics::{entropy, mass, EntropyReport};
use crate::error::{Error, Result};
use crate::halfmoment::{HalfMomentField, HalfMomentSolver};
use crate::kinetic::{KineticField, KineticSolver};
use crate::state::MacroState;
use crate::topology::{Model, Network, Scenario};
use crate::wave::{WaveField, WaveSolver};

/// Relative slack when deciding that a target time has been reached.
const TIME_SLACK: f64 = 1e-12;

/// Model-independent view of a network solver.
pub trait NetworkSolver {
    fn time(&self) -> f64;
    /// Largest step allowed by the CFL condition.
    fn max_time_step(&self) -> f64;
    fn step(&mut self, dt: f64) -> Result<()>;
    fn macro_states(&self) -> Vec<Vec<MacroState>>;
    /// Node entropy fluxes of the last step, for models that compute node states.
    fn node_entropy_flux(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl NetworkSolver for KineticSolver {
    fn time(&self) -> f64 {
        KineticSolver::time(self)
    }
    fn max_time_step(&self) -> f64 {
        KineticSolver::max_time_step(self)
    }
    fn step(&mut self, dt: f64) -> Result<()> {
        KineticSolver::step(self, dt)
    }
    fn macro_states(&self) -> Vec<Vec<MacroState>> {
        self.field().macro_states()
    }
}

impl NetworkSolver for HalfMomentSolver {
    fn time(&self) -> f64 {
        HalfMomentSolver::time(self)
    }
    fn max_time_step(&self) -> f64 {
        HalfMomentSolver::max_time_step(self)
    }
    fn step(&mut self, dt: f64) -> Result<()> {
        HalfMomentSolver::step(self, dt)
    }
    fn macro_states(&self) -> Vec<Vec<MacroState>> {
        self.field().macro_states()
    }
}

impl NetworkSolver for WaveSolver {
    fn time(&self) -> f64 {
        WaveSolver::time(self)
    }
    fn max_time_step(&self) -> f64 {
        WaveSolver::max_time_step(self)
    }
    fn step(&mut self, dt: f64) -> Result<()> {
        WaveSolver::step(self, dt)
    }
    fn macro_states(&self) -> Vec<Vec<MacroState>> {
        self.field().cells.clone()
    }
    fn node_entropy_flux(&self) -> Vec<f64> {
        WaveSolver::node_entropy_flux(self).to_vec()
    }
}

/// Steps `solver` until `target`, clipping the last step to land on it.
/// `observe` runs after every step. Returns the number of steps taken.
pub fn advance_to<S, F>(solver: &mut S, target: f64, mut observe: F) -> Result<usize>
where
    S: NetworkSolver + ?Sized,
    F: FnMut(&S),
{
    let mut steps = 0;
    loop {
        let remaining = target - solver.time();
        if remaining <= TIME_SLACK * target.abs().max(1.0) {
            return Ok(steps);
        }
        let dt_max = solver.max_time_step();
        if !(dt_max > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("time step {dt_max} is not positive")));
        }
        let dt = if remaining <= dt_max * (1.0 + TIME_SLACK) { remaining } else { dt_max };
        solver.step(dt)?;
        steps += 1;
        observe(solver);
    }
}

/// Solver for any model.
#[derive(Debug, Clone)]
pub enum Solver {
    Kinetic(KineticSolver),
    HalfMoment(HalfMomentSolver),
    Wave(WaveSolver),
}

impl Solver {
    pub fn new(network: &Network, scenario: &Scenario) -> Result<Self> {
        Ok(match scenario.model {
            Model::Kinetic => Solver::Kinetic(KineticSolver::new(network, scenario)?),
            Model::HalfMoment => Solver::HalfMoment(HalfMomentSolver::new(network, scenario)?),
            Model::Wave => Solver::Wave(WaveSolver::new(network, scenario)?),
        })
    }

    fn inner(&self) -> &dyn NetworkSolver {
        match self {
            Solver::Kinetic(s) => s,
            Solver::HalfMoment(s) => s,
            Solver::Wave(s) => s,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn NetworkSolver {
        match self {
            Solver::Kinetic(s) => s,
            Solver::HalfMoment(s) => s,
            Solver::Wave(s) => s,
        }
    }

    pub fn detail(&self) -> SnapshotDetail {
        match self {
            Solver::Kinetic(s) => SnapshotDetail::Kinetic(s.field().clone()),
            Solver::HalfMoment(s) => SnapshotDetail::HalfMoment(s.field().clone()),
            Solver::Wave(s) => SnapshotDetail::Wave(s.field().clone()),
        }
    }

    /// Soft positivity/sign warnings accumulated by the kinetic and half-moment solvers.
    pub fn warnings(&self) -> usize {
        match self {
            Solver::Kinetic(s) => s.positivity_warnings(),
            Solver::HalfMoment(s) => s.sign_warnings(),
            Solver::Wave(_) => 0,
        }
    }
}

impl NetworkSolver for Solver {
    fn time(&self) -> f64 {
        self.inner().time()
    }
    fn max_time_step(&self) -> f64 {
        self.inner().max_time_step()
    }
    fn step(&mut self, dt: f64) -> Result<()> {
        self.inner_mut().step(dt)
    }
    fn macro_states(&self) -> Vec<Vec<MacroState>> {
        self.inner().macro_states()
    }
    fn node_entropy_flux(&self) -> Vec<f64> {
        self.inner().node_entropy_flux()
    }
}

/// Model-specific state kept with a snapshot.
#[derive(Debug, Clone, PartialEq)]
pub enum SnapshotDetail {
    Kinetic(KineticField),
    HalfMoment(HalfMomentField),
    Wave(WaveField),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub states: Vec<Vec<MacroState>>,
    pub detail: SnapshotDetail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyRecording {
    Off,
    /// One report every `n` steps (and at every snapshot).
    Every(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub snapshots: Vec<Snapshot>,
    pub entropy: Vec<EntropyReport>,
    pub steps: usize,
    pub warnings: usize,
}

impl RunOutput {
    /// The last snapshot, taken at `t_end`.
    pub fn final_snapshot(&self) -> &Snapshot {
        self.snapshots.last().expect("a run always records its final state")
    }
}

/// Runs a scenario to `t_end`, recording snapshots at the requested times
/// (and always at `t_end`).
pub fn run(network: &Network, scenario: &Scenario, snapshot_times: &[f64], recording: EntropyRecording) -> Result<RunOutput> {
    let mut times: Vec<f64> = snapshot_times.to_vec();
    if let Some(bad) = times.iter().find(|t| !(**t >= 0.0 && **t <= scenario.t_end)) {
        return Err(Error::InvalidParameter(alloc::format!(
            "snapshot time {bad} lies outside [0, {}]",
            scenario.t_end
        )));
    }
    times.push(scenario.t_end);
    times.sort_by(f64::total_cmp);
    times.dedup();

    let mut solver = Solver::new(network, scenario)?;
    let dx: Vec<f64> = network.edges.iter().map(|e| e.dx()).collect();
    let a = scenario.a;
    let report = |s: &Solver| {
        let states = s.macro_states();
        EntropyReport {
            t: s.time(),
            total_entropy: entropy(&states, &dx, a),
            node_flux: s.node_entropy_flux(),
            total_mass: mass(&states, &dx),
        }
    };

    let mut out = RunOutput { snapshots: Vec::new(), entropy: Vec::new(), steps: 0, warnings: 0 };
    if recording != EntropyRecording::Off {
        out.entropy.push(report(&solver));
    }
    for &t in &times {
        let mut local_steps = 0usize;
        let stride = match recording {
            EntropyRecording::Every(n) => n.max(1),
            EntropyRecording::Off => 0,
        };
        let mut pending = Vec::new();
        out.steps += advance_to(&mut solver, t, |s| {
            local_steps += 1;
            if stride > 0 && (out.steps + local_steps) % stride == 0 {
                pending.push(report(s));
            }
        })?;
        out.entropy.append(&mut pending);
        if recording != EntropyRecording::Off && out.entropy.last().map(|r| r.t) != Some(solver.time()) {
            out.entropy.push(report(&solver));
        }
        out.snapshots.push(Snapshot { t: solver.time(), states: solver.macro_states(), detail: solver.detail() });
    }
    out.warnings = solver.warnings();
    Ok(out)
}
