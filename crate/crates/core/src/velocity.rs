//! Uniform midpoint velocity grid on `[-1, 1]` for the bounded kinetic model.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::state::HalfMoments;

/// Cell-centred velocity grid, symmetric about zero.
///
/// Negative velocities occupy indices `0..n/2`, positive ones `n/2..n`, and
/// index `k` mirrors to `n - 1 - k` with the exactly negated velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid {
    velocities: Vec<f64>,
    weight: f64,
    second_moment: f64,
}

impl VelocityGrid {
    pub fn new(cells: usize) -> Result<Self> {
        if cells < 2 || cells % 2 != 0 {
            return Err(Error::InvalidParameter(alloc::format!(
                "velocity cell count must be even and at least 2, got {cells}"
            )));
        }
        let half = cells / 2;
        let weight = 2.0 / cells as f64;
        let positive: Vec<f64> = (0..half).map(|k| (k as f64 + 0.5) * weight).collect();
        let mut velocities: Vec<f64> = positive.iter().rev().map(|v| -v).collect();
        velocities.extend_from_slice(&positive);
        let second_moment = velocities.iter().map(|v| v * v * weight).sum();
        Ok(Self { velocities, weight, second_moment })
    }

    pub fn len(&self) -> usize {
        self.velocities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.velocities.is_empty()
    }

    /// Quadrature weight `Δv = 2 / N_v`.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn velocities(&self) -> &[f64] {
        &self.velocities
    }

    pub fn velocity(&self, k: usize) -> f64 {
        self.velocities[k]
    }

    /// Index of the velocity `-v_k`.
    pub fn mirror(&self, k: usize) -> usize {
        self.len() - 1 - k
    }

    pub fn negative(&self) -> core::ops::Range<usize> {
        0..self.len() / 2
    }

    pub fn positive(&self) -> core::ops::Range<usize> {
        self.len() / 2..self.len()
    }

    pub fn max_speed(&self) -> f64 {
        self.velocities[self.len() - 1]
    }

    /// Discrete `Σ v_k² Δv`, equal to `2/3 - Δv²/6`.
    pub fn second_moment(&self) -> f64 {
        self.second_moment
    }

    /// Discrete equilibrium `ρ/2 + v q / Σ v² Δv`.
    ///
    /// The continuous model uses the factor 3/2 in place of `1 / Σ v² Δv`;
    /// using the discrete second moment makes the equilibrium reproduce `q`
    /// exactly under the midpoint quadrature, so collisions conserve it.
    #[inline]
    pub fn equilibrium(&self, rho: f64, q: f64, k: usize) -> f64 {
        0.5 * rho + self.velocities[k] * q / self.second_moment
    }

    /// Zeroth and first moments `(ρ, q)` of a velocity slice.
    pub fn moments(&self, f: &[f64]) -> (f64, f64) {
        debug_assert_eq!(f.len(), self.len());
        let (rho, q) = f
            .iter()
            .zip(&self.velocities)
            .fold((0.0, 0.0), |(r, q), (fk, v)| (r + fk, q + v * fk));
        (rho * self.weight, q * self.weight)
    }

    /// Half-range moments over `v < 0` and `v > 0`.
    pub fn half_moments(&self, f: &[f64]) -> HalfMoments {
        let w = self.weight;
        let mut hm = HalfMoments::default();
        for k in self.negative() {
            hm.rho_minus += f[k] * w;
            hm.q_minus += self.velocities[k] * f[k] * w;
        }
        for k in self.positive() {
            hm.rho_plus += f[k] * w;
            hm.q_plus += self.velocities[k] * f[k] * w;
        }
        hm
    }
}
