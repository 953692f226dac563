//! Finite-volume solver for the bounded-velocity BGK model
//! `∂t f + v ∂x f = -(f - E(ρ, q, v)) / ε` on a network.
//!
//! First-order splitting per step: ghost cells from nodes and exterior
//! boundaries, upwind advection, then the implicit relaxation in closed form.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::state::{HalfMoments, MacroState, VelocitySlice};
use crate::topology::{BoundaryCondition, EdgeEnd, InitialState, Network, Node, Scenario};
use crate::velocity::VelocityGrid;

/// Distribution per edge, cell-major: `f[i * N_v + k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticField {
    pub grid: VelocityGrid,
    pub dx: Vec<f64>,
    pub f: Vec<Vec<f64>>,
}

impl KineticField {
    /// Equilibrium (or constant) initial data per edge.
    pub fn from_initial(network: &Network, grid: VelocityGrid, initial: &[InitialState]) -> Result<Self> {
        if initial.len() != network.edges.len() {
            return Err(Error::GridMismatch(alloc::format!(
                "{} initial states for {} edges",
                initial.len(),
                network.edges.len()
            )));
        }
        let nv = grid.len();
        let f = network
            .edges
            .iter()
            .zip(initial)
            .map(|(edge, init)| {
                let slice: Vec<f64> = match *init {
                    InitialState::Macroscopic { rho, q } => (0..nv).map(|k| grid.equilibrium(rho, q, k)).collect(),
                    InitialState::Kinetic { f } => vec![f; nv],
                };
                let mut data = Vec::with_capacity(edge.cells * nv);
                for _ in 0..edge.cells {
                    data.extend_from_slice(&slice);
                }
                data
            })
            .collect();
        let dx = network.edges.iter().map(|e| e.dx()).collect();
        Ok(Self { grid, dx, f })
    }

    pub fn cells(&self, edge: usize) -> usize {
        self.f[edge].len() / self.grid.len()
    }

    pub fn cell(&self, edge: usize, i: usize) -> &[f64] {
        let nv = self.grid.len();
        &self.f[edge][i * nv..(i + 1) * nv]
    }

    /// Trace at the given end of an edge: the node-adjacent cell.
    pub fn trace(&self, edge: usize, end: EdgeEnd) -> VelocitySlice {
        let i = match end {
            EdgeEnd::Start => 0,
            EdgeEnd::End => self.cells(edge) - 1,
        };
        VelocitySlice(self.cell(edge, i).to_vec())
    }

    pub fn macro_states(&self) -> Vec<Vec<MacroState>> {
        (0..self.f.len())
            .map(|e| {
                (0..self.cells(e))
                    .map(|i| {
                        let (rho, q) = self.grid.moments(self.cell(e, i));
                        MacroState::new(rho, q)
                    })
                    .collect()
            })
            .collect()
    }

    pub fn half_moments(&self, edge: usize) -> Vec<HalfMoments> {
        (0..self.cells(edge)).map(|i| self.grid.half_moments(self.cell(edge, i))).collect()
    }

    /// `Σ f Δv Δx` over the network.
    pub fn total_mass(&self) -> f64 {
        self.f
            .iter()
            .zip(&self.dx)
            .map(|(f, dx)| f.iter().sum::<f64>() * self.grid.weight() * dx)
            .sum()
    }
}

/// Zeroth and first moments of a velocity slice.
pub fn moments(grid: &VelocityGrid, f: &[f64]) -> (f64, f64) {
    grid.moments(f)
}

/// One upwind step on one edge. `left` and `right` are the ghost slices at
/// `x = 0` and `x = b`; only their ingoing halves are read.
pub fn advect_step(grid: &VelocityGrid, f: &mut [f64], dx: f64, left: &[f64], right: &[f64], dt: f64) -> Result<()> {
    let limit = dx / grid.max_speed();
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::Cfl { dt, limit });
    }
    let nv = grid.len();
    let cells = f.len() / nv;
    let positive = grid.positive();
    let negative = grid.negative();
    // In place: v > 0 sweeps from the right so the left neighbour is still old,
    // v < 0 sweeps from the left.
    for i in (0..cells).rev() {
        for k in positive.clone() {
            let nu = dt * grid.velocity(k) / dx;
            let upwind = if i == 0 { left[k] } else { f[(i - 1) * nv + k] };
            let cur = f[i * nv + k];
            f[i * nv + k] = cur - nu * (cur - upwind);
        }
    }
    for i in 0..cells {
        for k in negative.clone() {
            let nu = -dt * grid.velocity(k) / dx;
            let upwind = if i + 1 == cells { right[k] } else { f[(i + 1) * nv + k] };
            let cur = f[i * nv + k];
            f[i * nv + k] = cur - nu * (cur - upwind);
        }
    }
    Ok(())
}

/// Implicit relaxation toward the local equilibrium, cell by cell.
///
/// Returns the number of cells whose equilibrium has a negative value, where
/// positivity of `f` is no longer guaranteed.
pub fn collide_step(grid: &VelocityGrid, f: &mut [f64], dt: f64, epsilon: f64) -> usize {
    let nv = grid.len();
    let r = dt / epsilon;
    let scale = 1.0 / (1.0 + r);
    let mut negative = 0;
    for cell in f.chunks_exact_mut(nv) {
        let (rho, q) = grid.moments(cell);
        let mut flagged = false;
        for (k, fk) in cell.iter_mut().enumerate() {
            let e = grid.equilibrium(rho, q, k);
            flagged |= e < 0.0;
            *fk = (*fk + r * e) * scale;
        }
        negative += usize::from(flagged);
    }
    negative
}

/// Ghost slices at a kinetic node: `f^i(v) = Σ_j c_ij f^j(-v)` for `v > 0` in
/// the local frame. Ghost entries for `v < 0` repeat the edge's own trace.
///
/// Traces and ghosts are in the edge frame, keyed by edge index.
pub fn node_ghost_kinetic(
    grid: &VelocityGrid,
    node: &Node,
    node_index: usize,
    traces: &[(usize, VelocitySlice)],
) -> Result<Vec<(usize, VelocitySlice)>> {
    let local = node.local_view(node_index, traces)?;
    let n = node.degree();
    let ghosts: Vec<VelocitySlice> = (0..n)
        .map(|i| {
            let mut g = local[i].0.clone();
            for k in grid.positive() {
                let m = grid.mirror(k);
                g[k] = (0..n).map(|j| node.matrix.get(i, j) * local[j].0[m]).sum();
            }
            VelocitySlice(g)
        })
        .collect();
    Ok(node.edge_frame(&ghosts))
}

/// Ghost slice at an exterior end.
pub fn boundary_ghost_kinetic(grid: &VelocityGrid, trace: &[f64], end: EdgeEnd, condition: BoundaryCondition) -> Vec<f64> {
    let mut g = trace.to_vec();
    if let BoundaryCondition::Inflow(value) = condition {
        let ingoing = match end {
            EdgeEnd::Start => grid.positive(),
            EdgeEnd::End => grid.negative(),
        };
        for k in ingoing {
            g[k] = value;
        }
    }
    g
}

/// Kinetic network solver.
#[derive(Debug, Clone)]
pub struct KineticSolver {
    network: Network,
    scenario: Scenario,
    field: KineticField,
    ghosts: Vec<(Vec<f64>, Vec<f64>)>,
    time: f64,
    positivity_warnings: usize,
}

impl KineticSolver {
    pub fn new(network: &Network, scenario: &Scenario) -> Result<Self> {
        scenario.validate(network)?;
        let grid = VelocityGrid::new(scenario.velocity_cells)?;
        let field = KineticField::from_initial(network, grid, &scenario.initial)?;
        let nv = field.grid.len();
        let ghosts = network.edges.iter().map(|_| (vec![0.0; nv], vec![0.0; nv])).collect();
        Ok(Self {
            network: network.clone(),
            scenario: scenario.clone(),
            field,
            ghosts,
            time: 0.0,
            positivity_warnings: 0,
        })
    }

    pub fn field(&self) -> &KineticField {
        &self.field
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Cells that relaxed toward a negative equilibrium so far.
    pub fn positivity_warnings(&self) -> usize {
        self.positivity_warnings
    }

    pub fn max_time_step(&self) -> f64 {
        let dx = self.field.dx.iter().copied().fold(f64::INFINITY, f64::min);
        self.scenario.cfl * dx
    }

    fn fill_ghosts(&mut self) -> Result<()> {
        let grid = &self.field.grid;
        for (idx, node) in self.network.nodes.iter().enumerate() {
            let traces: Vec<(usize, VelocitySlice)> =
                node.attached.iter().map(|att| (att.edge, self.field.trace(att.edge, att.end))).collect();
            let ghosts = node_ghost_kinetic(grid, node, idx, &traces)?;
            for ((edge, ghost), att) in ghosts.into_iter().zip(&node.attached) {
                match att.end {
                    EdgeEnd::Start => self.ghosts[edge].0 = ghost.0,
                    EdgeEnd::End => self.ghosts[edge].1 = ghost.0,
                }
            }
        }
        for (edge, end) in self.network.exterior_ends() {
            let trace = self.field.trace(edge, end);
            let ghost = boundary_ghost_kinetic(grid, &trace.0, end, self.scenario.boundary(edge, end));
            match end {
                EdgeEnd::Start => self.ghosts[edge].0 = ghost,
                EdgeEnd::End => self.ghosts[edge].1 = ghost,
            }
        }
        Ok(())
    }

    /// Advances by `dt`, which must respect the CFL limit.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        self.fill_ghosts()?;
        for e in 0..self.field.f.len() {
            let (left, right) = &self.ghosts[e];
            advect_step(&self.field.grid, &mut self.field.f[e], self.field.dx[e], left, right, dt)?;
            self.positivity_warnings += collide_step(&self.field.grid, &mut self.field.f[e], dt, self.scenario.epsilon);
        }
        self.time += dt;
        Ok(())
    }
}
