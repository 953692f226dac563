//! Half-moment relaxation system for the bounded-velocity model.
//!
//! The distribution is reconstructed as `a± + v b±` separately on `v > 0` and
//! `v < 0`. The four half moments `(ρ⁺, q⁺, ρ⁻, q⁻)` then obey
//!
//! ```text
//! ∂t ρ± + ∂x q±              = -(ρ± - ρ/2 ∓ 3q/4) / ε
//! ∂t q± + ∂x (-ρ±/6 ± q±)    = -(q± ∓ ρ/4 - q/2) / ε
//! ```
//!
//! where `-ρ±/6 ± q±` is the closed second half moment `⟨v² f⟩±`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{sqrt, PI, SQRT_2PI};
use crate::state::{HalfMoments, MacroState};
use crate::topology::{BoundaryCondition, EdgeEnd, Network, Node, Scenario, VelocityModel};

/// Largest characteristic speed of the bounded half-moment system, `(3 + √3)/6`.
pub fn max_speed() -> f64 {
    (3.0 + sqrt(3.0)) / 6.0
}

/// Affine reconstruction on one half line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfClosure {
    /// Constant part: `f = constant + v · slope` (bounded) or `(constant + v · slope) M(v)` (unbounded).
    pub constant: f64,
    pub slope: f64,
    /// Closed second half moment `⟨v² f⟩±`.
    pub second: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureCoefficients {
    pub plus: HalfClosure,
    pub minus: HalfClosure,
}

/// Reconstruction matching the given half moments.
pub fn close(state: &HalfMoments, velocity: VelocityModel, a: f64) -> ClosureCoefficients {
    match velocity {
        VelocityModel::Bounded => {
            // On [0, 1]: ∫(α + βv) = α + β/2, ∫v(α + βv) = α/2 + β/3.
            let plus = HalfClosure {
                constant: 4.0 * state.rho_plus - 6.0 * state.q_plus,
                slope: 12.0 * state.q_plus - 6.0 * state.rho_plus,
                second: -state.rho_plus / 6.0 + state.q_plus,
            };
            // On [-1, 0]: ∫(α + βv) = α - β/2, ∫v(α + βv) = -α/2 + β/3.
            let minus = HalfClosure {
                constant: 4.0 * state.rho_minus + 6.0 * state.q_minus,
                slope: 12.0 * state.q_minus + 6.0 * state.rho_minus,
                second: -state.rho_minus / 6.0 - state.q_minus,
            };
            ClosureCoefficients { plus, minus }
        }
        VelocityModel::Unbounded => {
            // Half-range Gaussian moments: ⟨1⟩ = 1/2, ⟨v⟩ = ±a/√(2π), ⟨v²⟩ = a²/2, ⟨v³⟩ = ±2a³/√(2π).
            let m1 = a / SQRT_2PI;
            let m2 = 0.5 * a * a;
            let m3 = 2.0 * a * a * a / SQRT_2PI;
            let solve = |rho: f64, q: f64, sign: f64| {
                // [1/2, s m1; s m1, m2] (α, β) = (ρ, q)
                let det = 0.5 * m2 - m1 * m1;
                let alpha = (m2 * rho - sign * m1 * q) / det;
                let beta = (0.5 * q - sign * m1 * rho) / det;
                HalfClosure { constant: alpha, slope: beta, second: alpha * m2 + sign * beta * m3 }
            };
            ClosureCoefficients {
                plus: solve(state.rho_plus, state.q_plus, 1.0),
                minus: solve(state.rho_minus, state.q_minus, -1.0),
            }
        }
    }
}

/// The unbounded closed second half moment in the form
/// `((π-4) a² ρ± ± a√(2π) q±) / (π-2)`.
pub fn unbounded_second_moment(rho: f64, q: f64, sign: f64, a: f64) -> f64 {
    ((PI - 4.0) * a * a * rho + sign * a * SQRT_2PI * q) / (PI - 2.0)
}

#[inline]
fn plus_flux(s: &HalfMoments) -> (f64, f64) {
    (s.q_plus, -s.rho_plus / 6.0 + s.q_plus)
}

#[inline]
fn minus_flux(s: &HalfMoments) -> (f64, f64) {
    (s.q_minus, -s.rho_minus / 6.0 - s.q_minus)
}

/// Upwind transport step on one edge. Only the ingoing block of each ghost is read.
pub fn transport_step(cells: &mut [HalfMoments], dx: f64, left: &HalfMoments, right: &HalfMoments, dt: f64) -> Result<()> {
    let limit = dx / max_speed();
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::Cfl { dt, limit });
    }
    let nu = dt / dx;
    let n = cells.len();
    // Plus block moves right: sweep from the right to keep the left neighbour old.
    for i in (0..n).rev() {
        let up = if i == 0 { plus_flux(left) } else { plus_flux(&cells[i - 1]) };
        let here = plus_flux(&cells[i]);
        cells[i].rho_plus -= nu * (here.0 - up.0);
        cells[i].q_plus -= nu * (here.1 - up.1);
    }
    for i in 0..n {
        let up = if i + 1 == n { minus_flux(right) } else { minus_flux(&cells[i + 1]) };
        let here = minus_flux(&cells[i]);
        cells[i].rho_minus -= nu * (up.0 - here.0);
        cells[i].q_minus -= nu * (up.1 - here.1);
    }
    Ok(())
}

/// Implicit relaxation; `ρ`, `q` are conserved, `ρ̂ → 3q/2`, `q̂ → ρ/2`.
pub fn relax(state: &HalfMoments, dt: f64, epsilon: f64) -> HalfMoments {
    let r = dt / epsilon;
    let (rho, q) = (state.rho(), state.q());
    let rho_hat = (state.rho_hat() + r * 1.5 * q) / (1.0 + r);
    let q_hat = (state.q_hat() + r * 0.5 * rho) / (1.0 + r);
    HalfMoments::from_even_odd(rho, q, rho_hat, q_hat)
}

/// Transport then relaxation.
pub fn step(cells: &mut [HalfMoments], dx: f64, left: &HalfMoments, right: &HalfMoments, dt: f64, epsilon: f64) -> Result<()> {
    transport_step(cells, dx, left, right, dt)?;
    for c in cells.iter_mut() {
        *c = relax(c, dt, epsilon);
    }
    Ok(())
}

/// Ghost half moments at a node from the integrated kinetic condition:
/// `ρ⁺ᵢ = Σⱼ c_ij ρ⁻ⱼ`, `q⁺ᵢ = -Σⱼ c_ij q⁻ⱼ` in the local frame.
pub fn node_ghost_halfmoment(node: &Node, node_index: usize, traces: &[(usize, HalfMoments)]) -> Result<Vec<(usize, HalfMoments)>> {
    let local = node.local_view(node_index, traces)?;
    let n = node.degree();
    let ghosts: Vec<HalfMoments> = (0..n)
        .map(|i| {
            let mut g = local[i];
            g.rho_plus = (0..n).map(|j| node.matrix.get(i, j) * local[j].rho_minus).sum();
            g.q_plus = -(0..n).map(|j| node.matrix.get(i, j) * local[j].q_minus).sum::<f64>();
            g
        })
        .collect();
    Ok(node.edge_frame(&ghosts))
}

/// Ghost at an exterior end: zero gradient, or the half moments of a constant
/// kinetic inflow on the ingoing half range.
pub fn boundary_ghost_halfmoment(trace: &HalfMoments, end: EdgeEnd, condition: BoundaryCondition) -> HalfMoments {
    let mut g = *trace;
    if let BoundaryCondition::Inflow(c) = condition {
        match end {
            EdgeEnd::Start => {
                g.rho_plus = c;
                g.q_plus = 0.5 * c;
            }
            EdgeEnd::End => {
                g.rho_minus = c;
                g.q_minus = -0.5 * c;
            }
        }
    }
    g
}

/// Half moments per edge and cell.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfMomentField {
    pub dx: Vec<f64>,
    pub cells: Vec<Vec<HalfMoments>>,
}

impl HalfMomentField {
    pub fn macro_states(&self) -> Vec<Vec<MacroState>> {
        self.cells.iter().map(|e| e.iter().map(HalfMoments::macro_state).collect()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct HalfMomentSolver {
    network: Network,
    scenario: Scenario,
    field: HalfMomentField,
    time: f64,
    sign_warnings: usize,
}

impl HalfMomentSolver {
    pub fn new(network: &Network, scenario: &Scenario) -> Result<Self> {
        scenario.validate(network)?;
        let cells = network
            .edges
            .iter()
            .zip(&scenario.initial)
            .map(|(e, init)| {
                let s = init.macro_state();
                vec![HalfMoments::bounded_equilibrium(s.rho, s.q); e.cells]
            })
            .collect();
        let dx = network.edges.iter().map(|e| e.dx()).collect();
        Ok(Self {
            network: network.clone(),
            scenario: scenario.clone(),
            field: HalfMomentField { dx, cells },
            time: 0.0,
            sign_warnings: 0,
        })
    }

    pub fn field(&self) -> &HalfMomentField {
        &self.field
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Cells seen with `q⁺ < 0` or `q⁻ > 0` after a step.
    pub fn sign_warnings(&self) -> usize {
        self.sign_warnings
    }

    pub fn max_time_step(&self) -> f64 {
        let dx = self.field.dx.iter().copied().fold(f64::INFINITY, f64::min);
        self.scenario.cfl * dx / max_speed()
    }

    fn trace(&self, edge: usize, end: EdgeEnd) -> HalfMoments {
        let cells = &self.field.cells[edge];
        match end {
            EdgeEnd::Start => cells[0],
            EdgeEnd::End => cells[cells.len() - 1],
        }
    }

    pub fn step(&mut self, dt: f64) -> Result<()> {
        let mut ghosts: Vec<(HalfMoments, HalfMoments)> = (0..self.field.cells.len())
            .map(|e| (self.trace(e, EdgeEnd::Start), self.trace(e, EdgeEnd::End)))
            .collect();
        for (idx, node) in self.network.nodes.iter().enumerate() {
            let traces: Vec<(usize, HalfMoments)> =
                node.attached.iter().map(|att| (att.edge, self.trace(att.edge, att.end))).collect();
            for ((edge, g), att) in node_ghost_halfmoment(node, idx, &traces)?.into_iter().zip(&node.attached) {
                match att.end {
                    EdgeEnd::Start => ghosts[edge].0 = g,
                    EdgeEnd::End => ghosts[edge].1 = g,
                }
            }
        }
        for (edge, end) in self.network.exterior_ends() {
            let g = boundary_ghost_halfmoment(&self.trace(edge, end), end, self.scenario.boundary(edge, end));
            match end {
                EdgeEnd::Start => ghosts[edge].0 = g,
                EdgeEnd::End => ghosts[edge].1 = g,
            }
        }
        for (e, cells) in self.field.cells.iter_mut().enumerate() {
            step(cells, self.field.dx[e], &ghosts[e].0, &ghosts[e].1, dt, self.scenario.epsilon)?;
            self.sign_warnings += cells.iter().filter(|c| c.q_plus < -1e-14 || c.q_minus > 1e-14).count();
        }
        self.time += dt;
        Ok(())
    }
}
