//! Discrete-ordinates solver for the stationary bounded-velocity layer
//! `v ∂x φ = -(φ - E(ρ, q, v))` on `[0, L]`.
//!
//! Each sweep integrates the transport equation exactly per velocity with the
//! source frozen cellwise (step characteristics). The moment update is a
//! source iteration accelerated by Anderson mixing.

use alloc::vec;
use alloc::vec::Vec;

use super::{FarField, HalfRange, HalfSpaceAsymptotics};
use crate::error::{Error, Result};
use crate::linalg::Anderson;
use crate::math::{abs, exp};
use crate::topology::{Closure, VelocityModel};
use crate::velocity::VelocityGrid;

#[derive(Debug, Clone, PartialEq)]
pub struct NumericParams {
    /// Domain length in mean free paths.
    pub length: f64,
    pub cells: usize,
    pub velocity_cells: usize,
    /// Max-norm change of the moment fields that ends the iteration.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub anderson_depth: usize,
    /// Largest acceptable `|dρ/dx|` over the last decile.
    pub slope_tolerance: f64,
}

impl Default for NumericParams {
    fn default() -> Self {
        Self {
            length: 20.0,
            cells: 2000,
            velocity_cells: 400,
            tolerance: 1e-11,
            max_iterations: 2000,
            anderson_depth: 10,
            slope_tolerance: 1e-5,
        }
    }
}

/// Converged discrete layer.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteHalfSpace {
    pub grid: VelocityGrid,
    pub length: f64,
    pub rho: Vec<f64>,
    pub q: Vec<f64>,
    /// `⟨vφ⟩` at the `cells + 1` cell faces.
    pub face_flux: Vec<f64>,
    /// Cell averages, velocity-major.
    phi: Vec<f64>,
}

impl DiscreteHalfSpace {
    pub fn cells(&self) -> usize {
        self.rho.len()
    }

    pub fn dx(&self) -> f64 {
        self.length / self.cells() as f64
    }

    /// Cell average of `φ` in cell `i` at velocity index `k`.
    pub fn phi(&self, i: usize, k: usize) -> f64 {
        self.phi[k * self.cells() + i]
    }

    /// Velocity slice of cell `i`.
    pub fn cell(&self, i: usize) -> Vec<f64> {
        (0..self.grid.len()).map(|k| self.phi(i, k)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericHalfSpace {
    pub asymptotics: HalfSpaceAsymptotics,
    /// `φ(0, v)` for `v < 0`, in grid order of [`VelocityGrid::negative`].
    pub outgoing: Vec<f64>,
    /// Ingoing half moments at `x = 0`.
    pub inflow: HalfRange,
    pub field: DiscreteHalfSpace,
    pub iterations: usize,
    /// `|dρ/dx|` over the last decile.
    pub far_slope: f64,
    /// Far-field inflow state `(ρ_L, q_L)` imposed at `x = L`.
    pub far_state: (f64, f64),
}

struct Sweeper<'a> {
    grid: &'a VelocityGrid,
    cells: usize,
    decay: Vec<f64>,
    average: Vec<f64>,
}

impl<'a> Sweeper<'a> {
    fn new(grid: &'a VelocityGrid, cells: usize, dx: f64) -> Self {
        let mut decay = Vec::with_capacity(grid.len());
        let mut average = Vec::with_capacity(grid.len());
        for &v in grid.velocities() {
            let tau = dx / abs(v);
            let e = exp(-tau);
            decay.push(e);
            average.push((1.0 - e) / tau);
        }
        Self { grid, cells, decay, average }
    }

    /// One transport sweep for frozen moments; writes the new moments and
    /// the outgoing trace, and optionally the cell averages and face fluxes.
    /// Returns the far-field inflow state.
    #[allow(clippy::too_many_arguments)]
    fn sweep(
        &self,
        rho: &[f64],
        q: &[f64],
        inflow: &[f64],
        far: FarField,
        a: f64,
        new_rho: &mut [f64],
        new_q: &mut [f64],
        outgoing: &mut [f64],
        mut record: Option<(&mut [f64], &mut [f64])>,
    ) -> (f64, f64) {
        let n = self.cells;
        let w = self.grid.weight();
        let inv_m2 = 1.0 / self.grid.second_moment();
        new_rho.fill(0.0);
        new_q.fill(0.0);

        let mut flux_plus = 0.0;
        for (j, k) in self.grid.positive().enumerate() {
            let v = self.grid.velocity(k);
            let (e, c) = (self.decay[k], self.average[k]);
            let sv = v * inv_m2;
            let mut psi = inflow[j];
            for i in 0..n {
                let s = 0.5 * rho[i] + sv * q[i];
                let d = psi - s;
                let avg = s + d * c;
                if let Some((phi, face)) = record.as_mut() {
                    phi[k * n + i] = avg;
                    face[i] += w * v * psi;
                }
                psi = s + d * e;
                new_rho[i] += w * avg;
                new_q[i] += w * v * avg;
            }
            if let Some((_, face)) = record.as_mut() {
                face[n] += w * v * psi;
            }
            flux_plus += w * v * psi;
        }

        // Equilibrium inflow at x = L. On the midpoint grid the negative half
        // of an equilibrium carries flux exactly -ρ/4 + q/2.
        let far_state = match far {
            FarField::Flux(qf) => (4.0 * (flux_plus - 0.5 * qf), qf),
            FarField::Invariant(c) => {
                let rho_l = (flux_plus - 0.5 * c) / (0.25 + 0.5 * a);
                (rho_l, c + a * rho_l)
            }
        };

        for k in self.grid.negative() {
            let v = self.grid.velocity(k);
            let (e, c) = (self.decay[k], self.average[k]);
            let sv = v * inv_m2;
            let mut psi = self.grid.equilibrium(far_state.0, far_state.1, k);
            for i in (0..n).rev() {
                let s = 0.5 * rho[i] + sv * q[i];
                let d = psi - s;
                let avg = s + d * c;
                if let Some((phi, face)) = record.as_mut() {
                    phi[k * n + i] = avg;
                    face[i + 1] += w * v * psi;
                }
                psi = s + d * e;
                new_rho[i] += w * avg;
                new_q[i] += w * v * avg;
            }
            if let Some((_, face)) = record.as_mut() {
                face[0] += w * v * psi;
            }
            outgoing[k] = psi;
        }
        far_state
    }
}

/// Solves the bounded-velocity layer with ingoing data `inflow` (one value per
/// positive grid velocity, ascending) and far-field condition `far`.
///
/// `warm` seeds the moment fields, typically from a previous solve on the same
/// grid; otherwise the constant Maxwell-closure state is used.
pub fn kinetic_halfspace_numeric(
    inflow: &[f64],
    far: FarField,
    a: f64,
    params: &NumericParams,
    warm: Option<&DiscreteHalfSpace>,
) -> Result<NumericHalfSpace> {
    let grid = VelocityGrid::new(params.velocity_cells)?;
    if inflow.len() != grid.len() / 2 {
        return Err(Error::GridMismatch(alloc::format!(
            "inflow has {} values, the velocity grid has {} positive velocities",
            inflow.len(),
            grid.len() / 2
        )));
    }
    if params.cells < 10 || !(params.length > 0.0) || !(a > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "half-space solve needs at least 10 cells, L > 0 and a > 0 (cells {}, L {}, a {a})",
            params.cells,
            params.length
        )));
    }
    let n = params.cells;
    let dx = params.length / n as f64;
    let sweeper = Sweeper::new(&grid, n, dx);

    let w = grid.weight();
    let mut half = HalfRange::default();
    for (j, k) in grid.positive().enumerate() {
        half.density += w * inflow[j];
        half.flux += w * grid.velocity(k) * inflow[j];
    }

    let mut u = match warm {
        Some(field) if field.cells() == n && field.grid == grid => {
            let mut u = field.rho.clone();
            u.extend_from_slice(&field.q);
            u
        }
        _ => {
            let guess = super::closure_halfspace(Closure::Maxwell, VelocityModel::Bounded, half, far, a)?;
            let mut u = vec![guess.rho_inf; n];
            u.extend(core::iter::repeat(guess.q_inf).take(n));
            u
        }
    };

    let mut g = vec![0.0; 2 * n];
    let mut outgoing = vec![0.0; grid.len()];
    let mut mixer = Anderson::new(params.anderson_depth);
    let mut iterations = 0;
    loop {
        iterations += 1;
        {
            let (gr, gq) = g.split_at_mut(n);
            sweeper.sweep(&u[..n], &u[n..], inflow, far, a, gr, gq, &mut outgoing, None);
        }
        let change = g.iter().zip(&u).map(|(x, y)| abs(x - y)).fold(0.0, f64::max);
        if change < params.tolerance {
            break;
        }
        if iterations >= params.max_iterations || !change.is_finite() {
            return Err(Error::NoConvergence { iterations, change });
        }
        u = mixer.next(&u, &g);
    }

    // Final sweep from the converged moments to record the distribution.
    let mut phi = vec![0.0; n * grid.len()];
    let mut face_flux = vec![0.0; n + 1];
    let (mut rho, mut q) = (vec![0.0; n], vec![0.0; n]);
    let far_state = sweeper.sweep(
        &g[..n],
        &g[n..],
        inflow,
        far,
        a,
        &mut rho,
        &mut q,
        &mut outgoing,
        Some((&mut phi, &mut face_flux)),
    );

    let decile = (n / 10).max(2);
    let tail = n - decile;
    let rho_inf = rho[tail..].iter().sum::<f64>() / decile as f64;
    let q_inf = q[tail..].iter().sum::<f64>() / decile as f64;
    let far_slope = abs(rho[n - 1] - rho[tail]) / ((decile - 1) as f64 * dx);
    if far_slope > params.slope_tolerance {
        return Err(Error::DomainTooShort { slope: far_slope });
    }

    let mut rho_out = 0.0;
    let mut q_out = 0.0;
    for k in grid.negative() {
        rho_out += w * outgoing[k];
        q_out += w * grid.velocity(k) * outgoing[k];
    }
    outgoing.truncate(grid.len() / 2);
    let residual = match far {
        FarField::Flux(qf) => abs(q_inf - qf),
        FarField::Invariant(c) => abs(q_inf - a * rho_inf - c),
    };

    Ok(NumericHalfSpace {
        asymptotics: HalfSpaceAsymptotics { rho_inf, q_inf, gamma: None, rho_out, q_out, residual },
        outgoing,
        inflow: half,
        field: DiscreteHalfSpace { grid, length: params.length, rho, q, face_flux, phi },
        iterations,
        far_slope,
        far_state,
    })
}
