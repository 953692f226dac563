//! Half-space (Milne) layer analysis.
//!
//! A layer solution on `x ∈ [0, ∞)` is described by its far-field
//! equilibrium `(ρ∞, q∞)` and, for the half-moment closure, the amplitude `γ`
//! of the single decaying mode. Every closure expresses the ingoing and
//! outgoing half moments at `x = 0` as linear forms in `(ρ∞, q∞, γ)`; the
//! closed-form solvers here and the node systems in [`crate::coupling`] are
//! both assembled from those forms.

mod albedo;
mod numeric;

pub use albedo::{albedo_fixpoint_node, AlbedoFixpoint, AlbedoParams};
pub use numeric::{kinetic_halfspace_numeric, DiscreteHalfSpace, NumericHalfSpace, NumericParams};

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{solve_checked, Matrix};
use crate::math::{abs, PI, SQRT_2PI};
use crate::topology::{Closure, VelocityModel};

/// Linear form in `(ρ∞, q∞, γ)`.
pub type Form = [f64; 3];

#[inline]
pub fn eval(form: &Form, rho: f64, q: f64, gamma: f64) -> f64 {
    form[0] * rho + form[1] * q + form[2] * gamma
}

/// Half moments at `x = 0` of a layer solution as linear forms in `(ρ∞, q∞, γ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerForms {
    /// `ρ₊(0)`, ingoing half density.
    pub rho_in: Form,
    /// `q₊(0)`, ingoing half flux.
    pub q_in: Form,
    /// `ρ₋(0)`, outgoing half density.
    pub rho_out: Form,
    /// `q₋(0)`, outgoing half flux.
    pub q_out: Form,
}

/// Spatial decay rate of the unbounded half-moment layer mode, `λ = (π-2)/(a(π-4)) < 0`.
pub fn unbounded_layer_rate(a: f64) -> f64 {
    (PI - 2.0) / (a * (PI - 4.0))
}

/// Linear forms of the given closure.
///
/// Maxwell and full-moment closures have no layer mode: their half moments
/// are those of the far-field equilibrium and the `γ` coefficients vanish.
pub fn layer_forms(closure: Closure, velocity: VelocityModel, a: f64) -> LayerForms {
    match (closure, velocity) {
        (Closure::Maxwell | Closure::FullMoment, VelocityModel::Bounded) => LayerForms {
            rho_in: [0.5, 0.75, 0.0],
            q_in: [0.25, 0.5, 0.0],
            rho_out: [0.5, -0.75, 0.0],
            q_out: [-0.25, 0.5, 0.0],
        },
        (Closure::Maxwell | Closure::FullMoment, VelocityModel::Unbounded) => {
            let drift = 1.0 / (SQRT_2PI * a);
            let spread = a / SQRT_2PI;
            LayerForms {
                rho_in: [0.5, drift, 0.0],
                q_in: [spread, 0.5, 0.0],
                rho_out: [0.5, -drift, 0.0],
                q_out: [-spread, 0.5, 0.0],
            }
        }
        (Closure::HalfMoment, VelocityModel::Bounded) => LayerForms {
            rho_in: [0.5, 0.75, 0.5 * (3.0 * a + 1.0)],
            q_in: [0.25, 0.5, 0.25 * a],
            rho_out: [0.5, -0.75, 0.5 * (3.0 * a - 1.0)],
            q_out: [-0.25, 0.5, -0.25 * a],
        },
        (Closure::HalfMoment, VelocityModel::Unbounded) => {
            let lambda = unbounded_layer_rate(a);
            let shift = SQRT_2PI / (a * (PI - 4.0));
            let drift = 1.0 / (SQRT_2PI * a);
            let spread = a / SQRT_2PI;
            LayerForms {
                rho_in: [0.5, drift, 0.5 * (lambda + shift)],
                q_in: [spread, 0.5, -0.5],
                rho_out: [0.5, -drift, 0.5 * (shift - lambda)],
                q_out: [-spread, 0.5, 0.5],
            }
        }
    }
}

/// Which ingoing half moments a closure matches: `(density, flux)`.
pub fn matched_moments(closure: Closure) -> (bool, bool) {
    match closure {
        Closure::Maxwell => (false, true),
        Closure::FullMoment => (true, false),
        Closure::HalfMoment => (true, true),
    }
}

/// Number of unknowns per layer: `(ρ∞, q∞)` or `(ρ∞, q∞, γ)`.
pub fn unknowns(closure: Closure) -> usize {
    if closure == Closure::HalfMoment {
        3
    } else {
        2
    }
}

/// Condition fixing the far-field state of a layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FarField {
    /// `q∞ = value`.
    Flux(f64),
    /// `q∞ - a ρ∞ = value`, the incoming Riemann invariant `r1`.
    Invariant(f64),
}

impl FarField {
    /// Coefficients on `(ρ∞, q∞)` and right-hand side.
    pub fn row(self, a: f64) -> ([f64; 2], f64) {
        match self {
            FarField::Flux(q) => ([0.0, 1.0], q),
            FarField::Invariant(c) => ([-a, 1.0], c),
        }
    }
}

/// Ingoing half-range data `(ρ₊, q₊) = (⟨k⟩₊, ⟨v k⟩₊)` at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HalfRange {
    pub density: f64,
    pub flux: f64,
}

impl HalfRange {
    pub const fn new(density: f64, flux: f64) -> Self {
        Self { density, flux }
    }

    /// Half range of a constant kinetic value `k ≡ value` on `v ∈ [0, 1]`.
    pub fn bounded_constant(value: f64) -> Self {
        Self::new(value, 0.5 * value)
    }

    /// Half range of `2 value · M(v)`, the unbounded counterpart with the same density.
    pub fn unbounded_constant(value: f64, a: f64) -> Self {
        Self::new(value, 2.0 * value * a / SQRT_2PI)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpaceAsymptotics {
    pub rho_inf: f64,
    pub q_inf: f64,
    /// Layer amplitude; `None` for closures without a layer mode.
    pub gamma: Option<f64>,
    /// Outgoing `ρ₋(0)`.
    pub rho_out: f64,
    /// Outgoing `q₋(0)`.
    pub q_out: f64,
    /// Max-norm residual of the solved linear system.
    pub residual: f64,
}

impl HalfSpaceAsymptotics {
    pub fn r2(&self, a: f64) -> f64 {
        self.q_inf + a * self.rho_inf
    }
}

/// Solves the layer problem of `closure` for ingoing data and a far-field condition.
pub fn closure_halfspace(
    closure: Closure,
    velocity: VelocityModel,
    inflow: HalfRange,
    far: FarField,
    a: f64,
) -> Result<HalfSpaceAsymptotics> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("wave speed must be positive, got {a}")));
    }
    let forms = layer_forms(closure, velocity, a);
    let n = unknowns(closure);
    let (match_rho, match_q) = matched_moments(closure);
    let mut data = Vec::with_capacity(n * n);
    let mut rhs = Vec::with_capacity(n);
    if match_q {
        data.extend_from_slice(&forms.q_in[..n]);
        rhs.push(inflow.flux);
    }
    if match_rho {
        data.extend_from_slice(&forms.rho_in[..n]);
        rhs.push(inflow.density);
    }
    let (far_row, far_rhs) = far.row(a);
    data.extend_from_slice(&far_row);
    data.extend(core::iter::repeat(0.0).take(n - 2));
    rhs.push(far_rhs);

    let scale = rhs.iter().fold(1.0_f64, |m, v| m.max(abs(*v)));
    let matrix = Matrix::from_row_major(n, n, data)?;
    let x = solve_checked(&matrix, &rhs, 1e-13 * scale)
        .map_err(|_| Error::Singular("half-space closure system"))?;
    let (rho, q) = (x[0], x[1]);
    let gamma = if n == 3 { x[2] } else { 0.0 };
    let residual = {
        let ax = matrix.mul_vec(&x);
        ax.iter().zip(&rhs).map(|(l, r)| abs(l - r)).fold(0.0, f64::max)
    };
    Ok(HalfSpaceAsymptotics {
        rho_inf: rho,
        q_inf: q,
        gamma: (n == 3).then_some(gamma),
        rho_out: eval(&forms.rho_out, rho, q, gamma),
        q_out: eval(&forms.q_out, rho, q, gamma),
        residual,
    })
}

/// Equality of the ingoing half flux with that of the far-field equilibrium.
pub fn maxwell_halfspace(q_plus_in: f64, far: FarField, a: f64, velocity: VelocityModel) -> Result<HalfSpaceAsymptotics> {
    closure_halfspace(Closure::Maxwell, velocity, HalfRange::new(0.0, q_plus_in), far, a)
}

/// Equality of the ingoing half density with that of the far-field equilibrium.
pub fn fullmoment_halfspace(rho_plus_in: f64, far: FarField, a: f64, velocity: VelocityModel) -> Result<HalfSpaceAsymptotics> {
    closure_halfspace(Closure::FullMoment, velocity, HalfRange::new(rho_plus_in, 0.0), far, a)
}

/// Bounded-velocity half-moment layer; the mode decays like `exp(-2x/a)`.
pub fn halfmoment_halfspace_bounded(rho_plus_in: f64, q_plus_in: f64, far: FarField, a: f64) -> Result<HalfSpaceAsymptotics> {
    closure_halfspace(Closure::HalfMoment, VelocityModel::Bounded, HalfRange::new(rho_plus_in, q_plus_in), far, a)
}

/// Unbounded-velocity half-moment layer; the mode decays like `exp(λx)`, see [`unbounded_layer_rate`].
pub fn halfmoment_halfspace_unbounded(rho_plus_in: f64, q_plus_in: f64, far: FarField, a: f64) -> Result<HalfSpaceAsymptotics> {
    closure_halfspace(Closure::HalfMoment, VelocityModel::Unbounded, HalfRange::new(rho_plus_in, q_plus_in), far, a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtrapolationMethod {
    Maxwell,
    HalfMoment,
    /// Discrete-ordinates solve of the kinetic layer (bounded velocities only).
    Numeric,
}

/// Extrapolation length of the zero-flux layer driven by `k(v) = v` (bounded,
/// returns `ρ∞/2`) or `k(v) = v M(v)` (unbounded, returns `ρ∞`).
pub fn extrapolation_length(
    method: ExtrapolationMethod,
    velocity: VelocityModel,
    a: f64,
    numeric: &NumericParams,
) -> Result<f64> {
    let inflow = match velocity {
        VelocityModel::Bounded => HalfRange::new(0.5, 1.0 / 3.0),
        VelocityModel::Unbounded => HalfRange::new(a / SQRT_2PI, 0.5 * a * a),
    };
    let rho_inf = match method {
        ExtrapolationMethod::Maxwell => {
            closure_halfspace(Closure::Maxwell, velocity, inflow, FarField::Flux(0.0), a)?.rho_inf
        }
        ExtrapolationMethod::HalfMoment => {
            closure_halfspace(Closure::HalfMoment, velocity, inflow, FarField::Flux(0.0), a)?.rho_inf
        }
        ExtrapolationMethod::Numeric => {
            if velocity != VelocityModel::Bounded {
                return Err(Error::Unsupported("numeric half-space solves need bounded velocities".into()));
            }
            let grid = crate::VelocityGrid::new(numeric.velocity_cells)?;
            let inflow: Vec<f64> = grid.positive().map(|k| grid.velocity(k)).collect();
            kinetic_halfspace_numeric(&inflow, FarField::Flux(0.0), a, numeric, None)?.asymptotics.rho_inf
        }
    };
    Ok(match velocity {
        VelocityModel::Bounded => 0.5 * rho_inf,
        VelocityModel::Unbounded => rho_inf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::sqrt;
    use crate::BOUNDED_WAVE_SPEED as A;
    use approx::assert_abs_diff_eq;

    #[test]
    fn maxwell_bounded_extrapolation_is_two_thirds() {
        let s = maxwell_halfspace(1.0 / 3.0, FarField::Flux(0.0), A, VelocityModel::Bounded).unwrap();
        assert_abs_diff_eq!(s.rho_inf, 4.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.rho_inf / 2.0, 2.0 / 3.0, epsilon = 1e-14);
        assert!(s.gamma.is_none());
    }

    #[test]
    fn maxwell_unbounded_extrapolation() {
        let s = maxwell_halfspace(0.5, FarField::Flux(0.0), 1.0, VelocityModel::Unbounded).unwrap();
        assert_abs_diff_eq!(s.rho_inf, SQRT_2PI / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn maxwell_equilibrium_is_fixed_point() {
        let s = maxwell_halfspace(0.25, FarField::Invariant(-A), A, VelocityModel::Bounded).unwrap();
        assert_abs_diff_eq!(s.rho_inf, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.q_inf, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.q_out, -0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(s.rho_out, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn halfmoment_bounded_extrapolation_closed_form() {
        let s = halfmoment_halfspace_bounded(0.5, 1.0 / 3.0, FarField::Flux(0.0), A).unwrap();
        let formula = (9.0 * A + 4.0) / (6.0 * A + 3.0);
        assert_abs_diff_eq!(s.rho_inf, formula, epsilon = 1e-13);
        assert_abs_diff_eq!(s.rho_inf / 2.0, 0.7113, epsilon = 5e-5);
        assert_abs_diff_eq!(s.gamma.unwrap(), -0.154_70, epsilon = 1e-5);
        // Zero net flux: outgoing half flux cancels the ingoing one.
        assert_abs_diff_eq!(s.q_out, -1.0 / 3.0, epsilon = 1e-13);
        assert!(s.residual <= 1e-13);
    }

    #[test]
    fn halfmoment_bounded_equilibrium() {
        let s = halfmoment_halfspace_bounded(0.5, 0.25, FarField::Invariant(-A), A).unwrap();
        assert_abs_diff_eq!(s.rho_inf, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.q_inf, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.gamma.unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn halfmoment_unbounded_extrapolation_matches_printed_formula() {
        let a = 1.0;
        let s = halfmoment_halfspace_unbounded(1.0 / SQRT_2PI, 0.5, FarField::Flux(0.0), a).unwrap();
        let num = PI * SQRT_2PI + 2.0 * PI * (1.0 + a) - 2.0 * SQRT_2PI - 8.0 * a;
        let den = a * (SQRT_2PI * PI + 2.0 * PI - 2.0 * SQRT_2PI - 4.0);
        assert_abs_diff_eq!(s.rho_inf, num / den, epsilon = 1e-12);
        assert_abs_diff_eq!(s.rho_inf, 1.443, epsilon = 1e-3);
    }

    #[test]
    fn halfmoment_unbounded_equilibrium() {
        for a in [0.3, 1.0, 2.0] {
            let s = halfmoment_halfspace_unbounded(0.5, a / SQRT_2PI, FarField::Invariant(-a), a).unwrap();
            assert_abs_diff_eq!(s.rho_inf, 1.0, epsilon = 1e-13);
            assert_abs_diff_eq!(s.q_inf, 0.0, epsilon = 1e-13);
            assert_abs_diff_eq!(s.gamma.unwrap(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn unbounded_layer_decays() {
        for a in [0.1, 1.0, 3.0] {
            assert!(unbounded_layer_rate(a) < 0.0);
        }
    }

    #[test]
    fn maxwell_is_halfmoment_without_layer() {
        // Dropping the density row and forcing γ = 0 turns the half-moment
        // system into the Maxwell one.
        let hm = layer_forms(Closure::HalfMoment, VelocityModel::Bounded, A);
        let mx = layer_forms(Closure::Maxwell, VelocityModel::Bounded, A);
        for (h, m) in [(hm.q_in, mx.q_in), (hm.q_out, mx.q_out), (hm.rho_out, mx.rho_out)] {
            assert_eq!(h[..2], m[..2]);
        }
        let m = maxwell_halfspace(0.31, FarField::Invariant(-0.2), A, VelocityModel::Bounded).unwrap();
        let rho_plus = eval(&hm.rho_in, m.rho_inf, m.q_inf, 0.0);
        let h = halfmoment_halfspace_bounded(rho_plus, 0.31, FarField::Invariant(-0.2), A).unwrap();
        assert_abs_diff_eq!(h.gamma.unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(h.rho_inf, m.rho_inf, epsilon = 1e-14);
    }

    #[test]
    fn extrapolation_dispatch() {
        let p = NumericParams::default();
        let hm = extrapolation_length(ExtrapolationMethod::HalfMoment, VelocityModel::Bounded, A, &p).unwrap();
        assert_abs_diff_eq!(hm, 0.7113, epsilon = 5e-5);
        let mx = extrapolation_length(ExtrapolationMethod::Maxwell, VelocityModel::Bounded, A, &p).unwrap();
        assert_abs_diff_eq!(mx, 2.0 / 3.0, epsilon = 1e-15);
        let hu = extrapolation_length(ExtrapolationMethod::HalfMoment, VelocityModel::Unbounded, 1.0, &p).unwrap();
        assert_abs_diff_eq!(hu, 1.443, epsilon = 1e-3);
        assert!(extrapolation_length(ExtrapolationMethod::Numeric, VelocityModel::Unbounded, 1.0, &p).is_err());
        let _ = sqrt(1.0);
    }
}
