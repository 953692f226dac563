//! Entropy, mass and distances between network fields reduced to `(ρ, q)`.

use alloc::vec::Vec;

use crate::coupling::NodeSolve;
use crate::error::{Error, Result};
use crate::math::abs;
use crate::state::MacroState;

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    pub t: f64,
    pub total_entropy: f64,
    /// `Σᵢ ρⁱ qⁱ` per node in the local frame; empty when the model has no
    /// macroscopic node states.
    pub node_flux: Vec<f64>,
    pub total_mass: f64,
}

/// `Σ ½(ρ² + q²/a²) Δx` over all cells and edges.
pub fn entropy(states: &[Vec<MacroState>], dx: &[f64], a: f64) -> f64 {
    states
        .iter()
        .zip(dx)
        .map(|(edge, dx)| edge.iter().map(|s| s.entropy(a)).sum::<f64>() * dx)
        .sum()
}

/// `Σ ρ Δx` over all cells and edges.
pub fn mass(states: &[Vec<MacroState>], dx: &[f64]) -> f64 {
    states.iter().zip(dx).map(|(edge, dx)| edge.iter().map(|s| s.rho).sum::<f64>() * dx).sum()
}

/// `Σᵢ ρⁱ qⁱ` of a node solve; equals `-K Σ qⁱ²` for invariant couplings.
pub fn node_entropy_flux(solve: &NodeSolve) -> f64 {
    solve.entropy_flux()
}

fn check_grids(a: &[Vec<MacroState>], b: &[Vec<MacroState>], dx: &[f64]) -> Result<()> {
    if a.len() != b.len() || a.len() != dx.len() {
        return Err(Error::GridMismatch(alloc::format!(
            "fields have {} and {} edges, spacing given for {}",
            a.len(),
            b.len(),
            dx.len()
        )));
    }
    for (k, (ea, eb)) in a.iter().zip(b).enumerate() {
        if ea.len() != eb.len() {
            return Err(Error::GridMismatch(alloc::format!(
                "edge {k} has {} cells in one field and {} in the other",
                ea.len(),
                eb.len()
            )));
        }
    }
    Ok(())
}

/// `Σ (|ρ_A - ρ_B| + |q_A - q_B|) Δx`.
pub fn l1_distance(a: &[Vec<MacroState>], b: &[Vec<MacroState>], dx: &[f64]) -> Result<f64> {
    check_grids(a, b, dx)?;
    Ok(a.iter()
        .zip(b)
        .zip(dx)
        .map(|((ea, eb), dx)| {
            ea.iter().zip(eb).map(|(x, y)| abs(x.rho - y.rho) + abs(x.q - y.q)).sum::<f64>() * dx
        })
        .sum())
}

/// `Σ |ρ_A - ρ_B| Δx`.
pub fn l1_density_distance(a: &[Vec<MacroState>], b: &[Vec<MacroState>], dx: &[f64]) -> Result<f64> {
    check_grids(a, b, dx)?;
    Ok(a.iter()
        .zip(b)
        .zip(dx)
        .map(|((ea, eb), dx)| ea.iter().zip(eb).map(|(x, y)| abs(x.rho - y.rho)).sum::<f64>() * dx)
        .sum())
}

/// Largest `|ρ_A - ρ_B|` over all cells.
pub fn max_density_change(a: &[Vec<MacroState>], b: &[Vec<MacroState>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ea, eb)| ea.iter().zip(eb).map(|(x, y)| abs(x.rho - y.rho)))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::solve_node_invariant;
    use crate::BOUNDED_WAVE_SPEED as A;
    use alloc::vec;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn constant(cells: usize, rho: f64, q: f64) -> Vec<MacroState> {
        vec![MacroState::new(rho, q); cells]
    }

    #[test]
    fn tripod_initial_entropy() {
        let states = vec![constant(400, 1.0, 0.0), constant(400, 2.0 / 3.0, 0.0), constant(400, 0.0, 0.0)];
        let dx = [1.0 / 400.0; 3];
        assert_abs_diff_eq!(entropy(&states, &dx, A), 0.722222, epsilon = 5e-7);
        assert_abs_diff_eq!(mass(&states, &dx), 5.0 / 3.0, epsilon = 1e-13);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&[constant(5, 0.0, 0.0)], &[0.2], A), 0.0);
        let one = [vec![MacroState::new(1.0, A)]];
        assert_abs_diff_eq!(entropy(&one, &[0.01], A), 0.01, epsilon = 1e-15);
    }

    #[test]
    fn maxwell_tripod_dissipation() {
        let s = solve_node_invariant(2.0 / 3.0, A, &[-A, -2.0 * A / 3.0, 0.0]).unwrap();
        assert_abs_diff_eq!(node_entropy_flux(&s), -0.06008, epsilon = 1e-5);
        let eq = solve_node_invariant(0.0, A, &[-A, -2.0 * A / 3.0, 0.0]).unwrap();
        let sym = solve_node_invariant(0.7, A, &[0.2; 3]).unwrap();
        assert_abs_diff_eq!(node_entropy_flux(&sym), 0.0, epsilon = 1e-15);
        // Equal density: Σ ρ q = ρ Σ q = 0.
        assert_abs_diff_eq!(node_entropy_flux(&eq), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn distances() {
        let a = vec![constant(10, 1.0, 0.2)];
        assert_eq!(l1_distance(&a, &a, &[0.1]).unwrap(), 0.0);
        let b = vec![constant(10, 1.25, 0.2)];
        assert_abs_diff_eq!(l1_distance(&a, &b, &[0.1]).unwrap(), 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(l1_density_distance(&a, &b, &[0.1]).unwrap(), 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(max_density_change(&a, &b), 0.25, epsilon = 1e-15);
        let c = vec![constant(9, 1.0, 0.2)];
        assert!(matches!(l1_distance(&a, &c, &[0.1]), Err(Error::GridMismatch(_))));
    }

    proptest! {
        #[test]
        fn nonnegative_coefficients_dissipate(k in 0.0..3.0f64, r in proptest::collection::vec(-2.0..2.0f64, 2..7)) {
            let s = solve_node_invariant(k, A, &r).unwrap();
            let q2: f64 = s.q.iter().map(|q| q * q).sum();
            prop_assert!(node_entropy_flux(&s) <= 1e-13);
            prop_assert!((node_entropy_flux(&s) + k * q2).abs() < 1e-10);
        }
    }
}
