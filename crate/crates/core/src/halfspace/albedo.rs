//! Coupled kinetic layers at a node: the ingoing data of each edge is the
//! redistributed outgoing trace of all edges, `kⁱ(v) = Σⱼ c_ij Aʲ[kʲ](-v)`.

use alloc::vec::Vec;

use super::numeric::{kinetic_halfspace_numeric, DiscreteHalfSpace, NumericParams};
use super::{FarField, HalfSpaceAsymptotics};
use crate::error::{Error, Result};
use crate::math::abs;
use crate::topology::CouplingMatrix;
use crate::velocity::VelocityGrid;

#[derive(Debug, Clone, PartialEq)]
pub struct AlbedoParams {
    pub numeric: NumericParams,
    /// L¹(v) change of the ingoing data that ends the iteration.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for AlbedoParams {
    fn default() -> Self {
        Self {
            numeric: NumericParams { cells: 1000, velocity_cells: 200, ..NumericParams::default() },
            tolerance: 1e-9,
            max_iterations: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlbedoFixpoint {
    pub edges: Vec<HalfSpaceAsymptotics>,
    /// Converged ingoing data per edge, positive velocities ascending.
    pub inflows: Vec<Vec<f64>>,
    pub iterations: usize,
    pub change: f64,
}

impl AlbedoFixpoint {
    /// Coefficient `K` of the invariant `ρ + K q` implied by edges `i` and `j`.
    pub fn fitted_coefficient(&self, i: usize, j: usize) -> f64 {
        let (ei, ej) = (&self.edges[i], &self.edges[j]);
        (ei.rho_inf - ej.rho_inf) / (ej.q_inf - ei.q_inf)
    }

    /// `Σᵢ q∞ⁱ`, zero for a mass-conserving node.
    pub fn mass_defect(&self) -> f64 {
        self.edges.iter().map(|e| e.q_inf).sum()
    }
}

/// Iterates the node fixpoint with far-field conditions `q∞ⁱ - a ρ∞ⁱ = r1[i]`.
pub fn albedo_fixpoint_node(
    matrix: &CouplingMatrix,
    r1: &[f64],
    a: f64,
    params: &AlbedoParams,
) -> Result<AlbedoFixpoint> {
    let n = matrix.degree();
    if r1.len() != n {
        return Err(Error::InvalidParameter(alloc::format!(
            "node of degree {n} needs {n} invariants, got {}",
            r1.len()
        )));
    }
    let grid = VelocityGrid::new(params.numeric.velocity_cells)?;
    let half = grid.len() / 2;
    let w = grid.weight();

    let rho0 = -r1.iter().sum::<f64>() / (n as f64 * a);
    let start: Vec<f64> = grid.positive().map(|k| grid.equilibrium(rho0, 0.0, k)).collect();
    let mut inflows: Vec<Vec<f64>> = (0..n).map(|_| start.clone()).collect();
    let mut fields: Vec<Option<DiscreteHalfSpace>> = (0..n).map(|_| None).collect();
    let mut change = f64::INFINITY;

    for iteration in 1..=params.max_iterations {
        let mut edges = Vec::with_capacity(n);
        let mut outgoing = Vec::with_capacity(n);
        for i in 0..n {
            let sol = kinetic_halfspace_numeric(
                &inflows[i],
                FarField::Invariant(r1[i]),
                a,
                &params.numeric,
                fields[i].as_ref(),
            )?;
            edges.push(sol.asymptotics);
            outgoing.push(sol.outgoing);
            fields[i] = Some(sol.field);
        }

        change = 0.0;
        let mut next = Vec::with_capacity(n);
        for (i, old) in inflows.iter().enumerate() {
            let k_new: Vec<f64> = (0..half)
                .map(|p| {
                    let reflected = grid.mirror(half + p);
                    (0..n).map(|j| matrix.get(i, j) * outgoing[j][reflected]).sum()
                })
                .collect();
            let diff: f64 = k_new.iter().zip(old).map(|(x, y)| abs(x - y)).sum::<f64>() * w;
            change = change.max(diff);
            next.push(k_new);
        }
        if change < params.tolerance {
            return Ok(AlbedoFixpoint { edges, inflows, iterations: iteration, change });
        }
        inflows = next;
    }
    Err(Error::NoConvergence { iterations: params.max_iterations, change })
}
