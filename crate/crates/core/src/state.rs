//! Per-cell state vectors and the orientation mirror `x → -x, v → -v`.

use alloc::vec::Vec;

/// Macroscopic density and flux.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MacroState {
    pub rho: f64,
    pub q: f64,
}

impl MacroState {
    pub const fn new(rho: f64, q: f64) -> Self {
        Self { rho, q }
    }

    /// Left-going Riemann invariant `r1 = q - a ρ`.
    #[inline]
    pub fn r1(&self, a: f64) -> f64 {
        self.q - a * self.rho
    }

    /// Right-going Riemann invariant `r2 = q + a ρ`.
    #[inline]
    pub fn r2(&self, a: f64) -> f64 {
        self.q + a * self.rho
    }

    #[inline]
    pub fn from_invariants(r1: f64, r2: f64, a: f64) -> Self {
        Self { rho: (r2 - r1) / (2.0 * a), q: 0.5 * (r1 + r2) }
    }

    /// Entropy density `½(ρ² + q²/a²)`.
    #[inline]
    pub fn entropy(&self, a: f64) -> f64 {
        0.5 * (self.rho * self.rho + self.q * self.q / (a * a))
    }
}

/// Half-range moments `(ρ⁺, q⁺, ρ⁻, q⁻)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HalfMoments {
    pub rho_plus: f64,
    pub q_plus: f64,
    pub rho_minus: f64,
    pub q_minus: f64,
}

impl HalfMoments {
    pub const fn new(rho_plus: f64, q_plus: f64, rho_minus: f64, q_minus: f64) -> Self {
        Self { rho_plus, q_plus, rho_minus, q_minus }
    }

    /// Builds the state from the even-odd variables `(ρ, q, ρ̂, q̂)`.
    pub fn from_even_odd(rho: f64, q: f64, rho_hat: f64, q_hat: f64) -> Self {
        Self {
            rho_plus: 0.5 * (rho + rho_hat),
            q_plus: 0.5 * (q + q_hat),
            rho_minus: 0.5 * (rho - rho_hat),
            q_minus: 0.5 * (q - q_hat),
        }
    }

    /// Half moments of the bounded-velocity equilibrium `ρ/2 + (3/2) v q`.
    pub fn bounded_equilibrium(rho: f64, q: f64) -> Self {
        Self {
            rho_plus: 0.5 * rho + 0.75 * q,
            q_plus: 0.25 * rho + 0.5 * q,
            rho_minus: 0.5 * rho - 0.75 * q,
            q_minus: -0.25 * rho + 0.5 * q,
        }
    }

    /// Half moments of a velocity-independent distribution `f ≡ value` on `[-1, 1]`.
    pub fn constant(value: f64) -> Self {
        Self::new(value, 0.5 * value, value, -0.5 * value)
    }

    pub fn rho(&self) -> f64 {
        self.rho_plus + self.rho_minus
    }

    pub fn q(&self) -> f64 {
        self.q_plus + self.q_minus
    }

    pub fn rho_hat(&self) -> f64 {
        self.rho_plus - self.rho_minus
    }

    pub fn q_hat(&self) -> f64 {
        self.q_plus - self.q_minus
    }

    pub fn macro_state(&self) -> MacroState {
        MacroState::new(self.rho(), self.q())
    }
}

/// Velocity slice of a distribution on a symmetric grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VelocitySlice(pub Vec<f64>);

/// Reversal of the spatial orientation of an edge.
///
/// Lets every node treat its attached edges as leaving the node. The map is
/// an involution.
pub trait Mirror {
    fn mirrored(&self) -> Self;
}

impl Mirror for MacroState {
    fn mirrored(&self) -> Self {
        Self { rho: self.rho, q: -self.q }
    }
}

impl Mirror for HalfMoments {
    fn mirrored(&self) -> Self {
        Self {
            rho_plus: self.rho_minus,
            q_plus: -self.q_minus,
            rho_minus: self.rho_plus,
            q_minus: -self.q_plus,
        }
    }
}

impl Mirror for VelocitySlice {
    /// `f(v) → f(-v)`; exact because the grid is symmetric.
    fn mirrored(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn invariant_round_trip() {
        let a = crate::BOUNDED_WAVE_SPEED;
        let s = MacroState::new(0.7, -0.13);
        let back = MacroState::from_invariants(s.r1(a), s.r2(a), a);
        assert!((back.rho - s.rho).abs() < 1e-15);
        assert!((back.q - s.q).abs() < 1e-15);
    }

    #[test]
    fn mirror_swaps_invariants() {
        let a = 0.5;
        let s = MacroState::new(1.0, 0.2);
        let m = s.mirrored();
        assert_eq!(m, MacroState::new(1.0, -0.2));
        assert_eq!(m.r1(a), -s.r2(a));
        assert_eq!(m.r2(a), -s.r1(a));
    }

    #[test]
    fn kinetic_mirror_reverses_velocity() {
        let s = VelocitySlice(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mirrored().0, vec![4.0, 3.0, 2.0, 1.0]);
    }

    proptest! {
        #[test]
        fn mirror_is_an_involution(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64, d in -5.0..5.0f64) {
            let h = HalfMoments::new(a, b, c, d);
            prop_assert_eq!(h.mirrored().mirrored(), h);
            let m = MacroState::new(a, b);
            prop_assert_eq!(m.mirrored().mirrored(), m);
            let s = VelocitySlice(vec![a, b, c, d]);
            prop_assert_eq!(s.mirrored().mirrored(), s);
        }

        #[test]
        fn even_odd_round_trip(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64, d in -5.0..5.0f64) {
            let h = HalfMoments::new(a, b, c, d);
            let back = HalfMoments::from_even_odd(h.rho(), h.q(), h.rho_hat(), h.q_hat());
            prop_assert!((back.rho_plus - a).abs() < 1e-14);
            prop_assert!((back.q_plus - b).abs() < 1e-14);
            prop_assert!((back.rho_minus - c).abs() < 1e-14);
            prop_assert!((back.q_minus - d).abs() < 1e-14);
        }
    }
}
