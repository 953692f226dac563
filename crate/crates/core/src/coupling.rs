//! Node algebra for the macroscopic coupling conditions.
//!
//! Given the incoming Riemann invariants `r1ⁱ = qⁱ - a ρⁱ` of all edges at a
//! node (in the local frame where every edge leaves the node), each condition
//! determines the node states `(ρⁱ, qⁱ)` and thereby the outgoing invariants
//! `r2ⁱ = qⁱ + a ρⁱ`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::halfspace::{eval, layer_forms, matched_moments, unknowns};
use crate::linalg::{least_squares, Matrix};
use crate::math::{abs, SQRT_2PI};
use crate::topology::{Closure, CouplingKind, CouplingMatrix, VelocityModel};

/// Largest acceptable max-norm residual of a general node solve.
pub const NODE_RESIDUAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSolve {
    pub rho: Vec<f64>,
    pub q: Vec<f64>,
    pub r2: Vec<f64>,
    /// Layer amplitudes, half-moment conditions only.
    pub gamma: Option<Vec<f64>>,
    pub residual: f64,
}

impl NodeSolve {
    fn from_states(rho: Vec<f64>, q: Vec<f64>, gamma: Option<Vec<f64>>, residual: f64, a: f64) -> Self {
        let r2 = rho.iter().zip(&q).map(|(r, q)| q + a * r).collect();
        Self { rho, q, r2, gamma, residual }
    }

    pub fn degree(&self) -> usize {
        self.rho.len()
    }

    /// `Σ ρⁱ qⁱ`, the entropy flux into the edges; negative when the node dissipates.
    pub fn entropy_flux(&self) -> f64 {
        self.rho.iter().zip(&self.q).map(|(r, q)| r * q).sum()
    }
}

/// Coefficient `K` of the invariant `ρ + K q` shared by all edges of a uniform node.
pub fn invariant_coefficient(kind: CouplingKind, n: usize, a: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(alloc::format!("node degree must be at least 2, got {n}")));
    }
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("wave speed must be positive, got {a}")));
    }
    let g = (n - 2) as f64 / n as f64;
    Ok(match kind {
        CouplingKind::EqualDensity => 0.0,
        CouplingKind::Kinetic => {
            return Err(Error::Unsupported("the kinetic condition has no invariant coefficient".into()))
        }
        CouplingKind::Macroscopic { closure, velocity } => match (closure, velocity) {
            (Closure::FullMoment, VelocityModel::Bounded) => 1.5 * g,
            (Closure::Maxwell, VelocityModel::Bounded) => 2.0 * g,
            (Closure::HalfMoment, VelocityModel::Bounded) => g * (9.0 * a + 4.0 * g) / (4.0 * a + 2.0 * g),
            (Closure::FullMoment, VelocityModel::Unbounded) => 2.0 / (a * SQRT_2PI) * g,
            (Closure::Maxwell, VelocityModel::Unbounded) => SQRT_2PI / (2.0 * a) * g,
            (Closure::HalfMoment, VelocityModel::Unbounded) => {
                g / a * (4.0 + g * SQRT_2PI) / (SQRT_2PI + 2.0 * g)
            }
        },
    })
}

/// Closed-form solve of `ρⁱ + K qⁱ = m`, `Σ qⁱ = 0`, `qⁱ - a ρⁱ = r1ⁱ`.
pub fn solve_node_invariant(k: f64, a: f64, r1: &[f64]) -> Result<NodeSolve> {
    let n = r1.len();
    if n == 0 || !(a > 0.0) {
        return Err(Error::InvalidParameter("node solve needs edges and a > 0".into()));
    }
    let denom = 1.0 + k * a;
    if abs(denom) < 1e-14 {
        return Err(Error::Singular("1 + K a vanishes"));
    }
    let m = -r1.iter().sum::<f64>() / (n as f64 * a);
    let q: Vec<f64> = r1.iter().map(|r| (m * a + r) / denom).collect();
    let rho: Vec<f64> = q.iter().zip(r1).map(|(q, r)| (q - r) / a).collect();
    Ok(NodeSolve::from_states(rho, q, None, 0.0, a))
}

/// Assembles and solves the node system of a layer closure for a general
/// coupling matrix: the matched half-moment rows
/// `ingoingⁱ = Σⱼ c_ij · mirrored outgoingʲ` plus `qⁱ - a ρⁱ = r1ⁱ`.
pub fn solve_node_general(
    closure: Closure,
    velocity: VelocityModel,
    matrix: &CouplingMatrix,
    a: f64,
    r1: &[f64],
) -> Result<NodeSolve> {
    let n = matrix.degree();
    if r1.len() != n {
        return Err(Error::InvalidParameter(alloc::format!(
            "node of degree {n} needs {n} invariants, got {}",
            r1.len()
        )));
    }
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("wave speed must be positive, got {a}")));
    }
    let forms = layer_forms(closure, velocity, a);
    let per = unknowns(closure);
    let (match_rho, match_q) = matched_moments(closure);
    let cols = per * n;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs = Vec::new();

    // Ingoing density of edge i is fed by outgoing densities; ingoing flux by
    // mirrored outgoing fluxes, hence the sign.
    let mut coupling_rows = |ingoing: &[f64; 3], outgoing: &[f64; 3], sign: f64| {
        for i in 0..n {
            let mut row = vec![0.0; cols];
            for t in 0..per {
                row[i * per + t] += ingoing[t];
            }
            for j in 0..n {
                let c = matrix.get(i, j);
                for t in 0..per {
                    row[j * per + t] -= sign * c * outgoing[t];
                }
            }
            rows.push(row);
            rhs.push(0.0);
        }
    };
    if match_q {
        coupling_rows(&forms.q_in, &forms.q_out, -1.0);
    }
    if match_rho {
        coupling_rows(&forms.rho_in, &forms.rho_out, 1.0);
    }
    for (i, r) in r1.iter().enumerate() {
        let mut row = vec![0.0; cols];
        row[i * per] = -a;
        row[i * per + 1] = 1.0;
        rows.push(row);
        rhs.push(*r);
    }

    let m = rows.len();
    let data: Vec<f64> = rows.into_iter().flatten().collect();
    let system = Matrix::from_row_major(m, cols, data)?;
    let sol = least_squares(&system, &rhs)?;
    let scale = r1.iter().fold(1.0_f64, |s, r| s.max(abs(*r)));
    if sol.residual > NODE_RESIDUAL_TOLERANCE * scale {
        return Err(Error::Residual { residual: sol.residual, tolerance: NODE_RESIDUAL_TOLERANCE * scale });
    }
    let rho = (0..n).map(|i| sol.x[i * per]).collect();
    let q = (0..n).map(|i| sol.x[i * per + 1]).collect();
    let gamma = (per == 3).then(|| (0..n).map(|i| sol.x[i * per + 2]).collect());
    Ok(NodeSolve::from_states(rho, q, gamma, sol.residual, a))
}

pub fn solve_node_maxwell_general(
    matrix: &CouplingMatrix,
    a: f64,
    r1: &[f64],
    velocity: VelocityModel,
) -> Result<NodeSolve> {
    solve_node_general(Closure::Maxwell, velocity, matrix, a, r1)
}

pub fn solve_node_fullmoment_general(
    matrix: &CouplingMatrix,
    a: f64,
    r1: &[f64],
    velocity: VelocityModel,
) -> Result<NodeSolve> {
    solve_node_general(Closure::FullMoment, velocity, matrix, a, r1)
}

pub fn solve_node_halfmoment_general(
    matrix: &CouplingMatrix,
    a: f64,
    r1: &[f64],
    velocity: VelocityModel,
) -> Result<NodeSolve> {
    solve_node_general(Closure::HalfMoment, velocity, matrix, a, r1)
}

/// Solves the node for any macroscopic coupling kind.
pub fn solve_node(kind: CouplingKind, matrix: &CouplingMatrix, a: f64, r1: &[f64]) -> Result<NodeSolve> {
    match kind {
        CouplingKind::EqualDensity => solve_node_invariant(0.0, a, r1),
        CouplingKind::Macroscopic { closure, velocity } => solve_node_general(closure, velocity, matrix, a, r1),
        CouplingKind::Kinetic => Err(Error::Unsupported("kinetic nodes need distribution traces".into())),
    }
}

/// The node solve as a precomputed linear map `r1 ↦ (ρ, q)`.
///
/// Every node system is linear and homogeneous in `r1`, so the map is built
/// once from unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeResponse {
    n: usize,
    rho: Vec<f64>,
    q: Vec<f64>,
}

impl NodeResponse {
    pub fn new(kind: CouplingKind, matrix: &CouplingMatrix, a: f64) -> Result<Self> {
        let n = matrix.degree();
        let mut rho = vec![0.0; n * n];
        let mut q = vec![0.0; n * n];
        for j in 0..n {
            let mut unit = vec![0.0; n];
            unit[j] = 1.0;
            let s = solve_node(kind, matrix, a, &unit)?;
            for i in 0..n {
                rho[i * n + j] = s.rho[i];
                q[i * n + j] = s.q[i];
            }
        }
        Ok(Self { n, rho, q })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// Node states `(ρⁱ, qⁱ)` for the incoming invariants.
    pub fn apply(&self, r1: &[f64], rho: &mut [f64], q: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = i * n..(i + 1) * n;
            rho[i] = self.rho[row.clone()].iter().zip(r1).map(|(c, r)| c * r).sum();
            q[i] = self.q[row].iter().zip(r1).map(|(c, r)| c * r).sum();
        }
    }
}

/// Maps a macroscopic half-moment node state back to ingoing half moments,
/// for diagnostics of the layer.
pub fn ingoing_half_moments(closure: Closure, velocity: VelocityModel, a: f64, rho: f64, q: f64, gamma: f64) -> (f64, f64) {
    let forms = layer_forms(closure, velocity, a);
    (eval(&forms.rho_in, rho, q, gamma), eval(&forms.q_in, rho, q, gamma))
}
