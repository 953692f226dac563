//! Upwind solver for the wave system `∂t ρ + ∂x q = 0`, `∂t q + a² ∂x ρ = 0`
//! in Riemann invariants: `r2 = q + aρ` moves right and `r1 = q - aρ` moves
//! left, both at speed `a`. At Courant number one the scheme is an exact shift.

use alloc::vec;
use alloc::vec::Vec;

use crate::coupling::NodeResponse;
use crate::error::{Error, Result};
use crate::halfspace::{closure_halfspace, FarField, HalfRange};
use crate::math::abs;
use crate::state::MacroState;
use crate::topology::{BoundaryCondition, Closure, CouplingKind, EdgeEnd, Network, Scenario, VelocityModel};

/// `(ρ, q)` per edge and cell.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub dx: Vec<f64>,
    pub cells: Vec<Vec<MacroState>>,
}

impl WaveField {
    pub fn trace(&self, edge: usize, end: EdgeEnd) -> MacroState {
        let cells = &self.cells[edge];
        match end {
            EdgeEnd::Start => cells[0],
            EdgeEnd::End => cells[cells.len() - 1],
        }
    }
}

/// Courant numbers this close to one use the exact shift.
const EXACT_SHIFT_TOLERANCE: f64 = 4.0 * f64::EPSILON;

/// One step on one edge. `left_r2` enters at `x = 0`, `right_r1` at `x = b`.
pub fn step_wave(cells: &mut [MacroState], dx: f64, a: f64, left_r2: f64, right_r1: f64, dt: f64) -> Result<()> {
    let nu = a * dt / dx;
    if nu > 1.0 + EXACT_SHIFT_TOLERANCE {
        return Err(Error::Cfl { dt, limit: dx / a });
    }
    let n = cells.len();
    let mut r1: Vec<f64> = cells.iter().map(|s| s.r1(a)).collect();
    let mut r2: Vec<f64> = cells.iter().map(|s| s.r2(a)).collect();
    if abs(nu - 1.0) <= EXACT_SHIFT_TOLERANCE {
        r2.rotate_right(1);
        r2[0] = left_r2;
        r1.rotate_left(1);
        r1[n - 1] = right_r1;
    } else {
        for i in (0..n).rev() {
            let up = if i == 0 { left_r2 } else { r2[i - 1] };
            r2[i] -= nu * (r2[i] - up);
        }
        for i in 0..n {
            let up = if i + 1 == n { right_r1 } else { r1[i + 1] };
            r1[i] -= nu * (r1[i] - up);
        }
    }
    for (s, (a1, a2)) in cells.iter_mut().zip(r1.into_iter().zip(r2)) {
        *s = MacroState::from_invariants(a1, a2, a);
    }
    Ok(())
}

/// Boundary state at an exterior end carrying a constant kinetic inflow.
///
/// Works in the local frame where the edge leaves the boundary: `r1_local`
/// is the invariant arriving from the interior and the result is the local
/// boundary state `(ρ, q)`. Layer closures solve their half-space problem
/// with the inflow's half moments. Equal density takes the ingoing invariant
/// from the resting equilibrium `(2c, 0)` whose ingoing half is the inflow.
pub fn boundary_close(kind: CouplingKind, inflow: f64, r1_local: f64, a: f64) -> Result<MacroState> {
    match kind {
        CouplingKind::EqualDensity => Ok(MacroState::from_invariants(r1_local, 2.0 * a * inflow, a)),
        CouplingKind::Macroscopic { closure, velocity } => {
            let half = match velocity {
                VelocityModel::Bounded => HalfRange::bounded_constant(inflow),
                VelocityModel::Unbounded => HalfRange::unbounded_constant(inflow, a),
            };
            let s = closure_halfspace(closure, velocity, half, FarField::Invariant(r1_local), a)?;
            Ok(MacroState::new(s.rho_inf, s.q_inf))
        }
        CouplingKind::Kinetic => Err(Error::Unsupported("the wave model needs a macroscopic coupling".into())),
    }
}

/// Condition used at exterior inflow ends: the nodes' condition when they all
/// agree, otherwise (or without nodes) the bounded half-moment closure.
pub fn exterior_kind(network: &Network) -> CouplingKind {
    let default = CouplingKind::Macroscopic { closure: Closure::HalfMoment, velocity: VelocityModel::Bounded };
    match network.nodes.first() {
        Some(first) if network.nodes.iter().all(|n| n.condition == first.condition) => first.condition,
        _ => default,
    }
}

#[derive(Debug, Clone)]
pub struct WaveSolver {
    network: Network,
    scenario: Scenario,
    field: WaveField,
    responses: Vec<NodeResponse>,
    boundary_kind: CouplingKind,
    time: f64,
    node_flux: Vec<f64>,
    boundary_flux: f64,
}

impl WaveSolver {
    pub fn new(network: &Network, scenario: &Scenario) -> Result<Self> {
        scenario.validate(network)?;
        let cells = network
            .edges
            .iter()
            .zip(&scenario.initial)
            .map(|(e, init)| vec![init.macro_state(); e.cells])
            .collect();
        let dx = network.edges.iter().map(|e| e.dx()).collect();
        let responses = network
            .nodes
            .iter()
            .map(|n| NodeResponse::new(n.condition, &n.matrix, scenario.a))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            network: network.clone(),
            scenario: scenario.clone(),
            field: WaveField { dx, cells },
            responses,
            boundary_kind: exterior_kind(network),
            time: 0.0,
            node_flux: vec![0.0; network.nodes.len()],
            boundary_flux: 0.0,
        })
    }

    pub fn field(&self) -> &WaveField {
        &self.field
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn max_time_step(&self) -> f64 {
        let dx = self.field.dx.iter().copied().fold(f64::INFINITY, f64::min);
        self.scenario.cfl * dx / self.scenario.a
    }

    /// `Σᵢ ρⁱ qⁱ` of each node state used in the last step (local frame).
    pub fn node_entropy_flux(&self) -> &[f64] {
        &self.node_flux
    }

    /// Entropy flux `Σ ρ q` into the network through exterior ends in the last step.
    pub fn boundary_entropy_flux(&self) -> f64 {
        self.boundary_flux
    }

    pub fn step(&mut self, dt: f64) -> Result<()> {
        let a = self.scenario.a;
        let n_edges = self.field.cells.len();
        let mut left_r2 = vec![0.0; n_edges];
        let mut right_r1 = vec![0.0; n_edges];

        for (idx, node) in self.network.nodes.iter().enumerate() {
            let r1: Vec<f64> = node
                .attached
                .iter()
                .map(|att| att.end.orient(&self.field.trace(att.edge, att.end)).r1(a))
                .collect();
            let n = r1.len();
            let (mut rho, mut q) = (vec![0.0; n], vec![0.0; n]);
            self.responses[idx].apply(&r1, &mut rho, &mut q);
            self.node_flux[idx] = rho.iter().zip(&q).map(|(r, q)| r * q).sum();
            for (i, att) in node.attached.iter().enumerate() {
                let state = att.end.orient(&MacroState::new(rho[i], q[i]));
                match att.end {
                    EdgeEnd::Start => left_r2[att.edge] = state.r2(a),
                    EdgeEnd::End => right_r1[att.edge] = state.r1(a),
                }
            }
        }

        self.boundary_flux = 0.0;
        for (edge, end) in self.network.exterior_ends() {
            let trace = self.field.trace(edge, end);
            let local = match self.scenario.boundary(edge, end) {
                BoundaryCondition::Free => end.orient(&trace),
                BoundaryCondition::Inflow(c) => boundary_close(self.boundary_kind, c, end.orient(&trace).r1(a), a)?,
            };
            self.boundary_flux += local.rho * local.q;
            let state = end.orient(&local);
            match end {
                EdgeEnd::Start => left_r2[edge] = state.r2(a),
                EdgeEnd::End => right_r1[edge] = state.r1(a),
            }
        }

        for (e, cells) in self.field.cells.iter_mut().enumerate() {
            step_wave(cells, self.field.dx[e], a, left_r2[e], right_r1[e], dt)?;
        }
        self.time += dt;
        Ok(())
    }
}
