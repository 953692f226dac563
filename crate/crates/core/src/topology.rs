//! Network description: edges, nodes, coupling matrices and run parameters.
//!
//! Every edge is parametrized by `[0, b]`; its `x = 0` end sits at the `from`
//! node and its `x = b` end at the `to` node. Node algebra always works in a
//! local frame in which all attached edges leave the node. Edges attached at
//! their `x = b` end are brought into that frame by the [`Mirror`] map.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::abs;
use crate::state::Mirror;

/// Column sums of a coupling matrix must equal one to this tolerance.
pub const COLUMN_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeEnd {
    /// `x = 0`.
    Start,
    /// `x = b`.
    End,
}

impl EdgeEnd {
    /// Brings an edge-frame trace into the node-local frame (and back).
    pub fn orient<T: Mirror + Clone>(self, trace: &T) -> T {
        match self {
            EdgeEnd::Start => trace.clone(),
            EdgeEnd::End => trace.mirrored(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VelocityModel {
    /// `v ∈ [-1, 1]`, constant equilibrium weight 1/2.
    Bounded,
    /// `v ∈ ℝ` with a Gaussian Maxwellian of variance `a²`.
    Unbounded,
}

/// Layer approximation behind a macroscopic coupling condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Closure {
    /// Equality of half-fluxes with the far-field equilibrium.
    Maxwell,
    /// Equilibrium reconstruction inserted into the half-density balance.
    FullMoment,
    /// Affine-in-`v` half-range reconstruction with an exponential layer.
    HalfMoment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CouplingKind {
    /// `f^i(0, v) = Σ_j c_ij f^j(0, -v)`; used by the kinetic and half-moment solvers.
    Kinetic,
    /// `ρ^i = ρ^j`, `Σ q^i = 0`.
    EqualDensity,
    /// Wave-equation condition derived from a layer approximation.
    Macroscopic { closure: Closure, velocity: VelocityModel },
}

impl CouplingKind {
    pub fn is_macroscopic(self) -> bool {
        !matches!(self, CouplingKind::Kinetic)
    }
}

/// Column-stochastic redistribution matrix `C` of a node.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CouplingMatrix {
    /// Uniform node: `c_ij = 1/(n-1)` off the diagonal, zero on it.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Topology(format!("uniform coupling needs degree >= 2, got {n}")));
        }
        let off = 1.0 / (n - 1) as f64;
        let data = (0..n * n).map(|k| if k / n == k % n { 0.0 } else { off }).collect();
        Ok(Self { n, data })
    }

    /// Validates a row-major matrix: nonnegative entries, unit column sums.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Topology(format!(
                "coupling matrix of a degree-{n} node needs {} entries, got {}",
                n * n,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().position(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::Topology(format!(
                "coupling matrix entry ({}, {}) = {} is negative or not finite",
                bad / n,
                bad % n,
                data[bad]
            )));
        }
        let m = Self { n, data };
        for j in 0..n {
            let sum = m.column_sum(j);
            if abs(sum - 1.0) > COLUMN_SUM_TOLERANCE {
                return Err(Error::Topology(format!(
                    "coupling matrix column {j} sums to {sum}, expected 1 (mass conservation)"
                )));
            }
        }
        Ok(m)
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn column_sum(&self, j: usize) -> f64 {
        (0..self.n).map(|i| self.get(i, j)).sum()
    }

    /// `(C x)_i`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum()).collect()
    }

    pub fn is_uniform(&self) -> bool {
        Self::uniform(self.n).map(|u| u.data == self.data).unwrap_or(false)
    }
}

/// How a node's coupling matrix is specified before its degree is known.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum MatrixSpec {
    #[default]
    Uniform,
    RowMajor(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// User-facing identifier.
    pub id: i64,
    pub length: f64,
    pub cells: usize,
    /// Index of the node at `x = 0`, `None` for an exterior end.
    pub from: Option<usize>,
    /// Index of the node at `x = b`, `None` for an exterior end.
    pub to: Option<usize>,
}

impl Edge {
    pub fn dx(&self) -> f64 {
        self.length / self.cells as f64
    }

    /// Cell-centre coordinates.
    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        let dx = self.dx();
        (0..self.cells).map(move |i| (i as f64 + 0.5) * dx)
    }

    pub fn node_at(&self, end: EdgeEnd) -> Option<usize> {
        match end {
            EdgeEnd::Start => self.from,
            EdgeEnd::End => self.to,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Attachment {
    /// Edge index.
    pub edge: usize,
    pub end: EdgeEnd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: i64,
    /// Attached edge ends, in edge order; row/column `i` of `matrix` refers to `attached[i]`.
    pub attached: Vec<Attachment>,
    pub condition: CouplingKind,
    pub matrix: CouplingMatrix,
}

impl Node {
    pub fn degree(&self) -> usize {
        self.attached.len()
    }

    /// Orders per-edge traces by attachment and maps them into the local frame.
    pub fn local_view<T: Mirror + Clone>(&self, node: usize, traces: &[(usize, T)]) -> Result<Vec<T>> {
        if let Some((edge, _)) = traces.iter().find(|(e, _)| !self.attached.iter().any(|a| a.edge == *e)) {
            return Err(Error::NotAttached { edge: *edge, node });
        }
        self.attached
            .iter()
            .map(|att| {
                traces
                    .iter()
                    .find(|(e, _)| *e == att.edge)
                    .map(|(_, t)| att.end.orient(t))
                    .ok_or(Error::MissingTrace { edge: att.edge, node })
            })
            .collect()
    }

    /// Inverse of [`Node::local_view`].
    pub fn edge_frame<T: Mirror + Clone>(&self, local: &[T]) -> Vec<(usize, T)> {
        self.attached.iter().zip(local).map(|(att, t)| (att.edge, att.end.orient(t))).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub id: i64,
    pub condition: CouplingKind,
    pub matrix: MatrixSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSpec {
    pub id: i64,
    pub length: f64,
    pub cells: usize,
    /// Node id at `x = 0`; `None` for an exterior end.
    pub from: Option<i64>,
    pub to: Option<i64>,
}

/// Validated network; immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub edges: Vec<Edge>,
    pub nodes: Vec<Node>,
}

impl Network {
    pub fn new(edges: &[EdgeSpec], nodes: &[NodeSpec]) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::Topology("network has no edges".into()));
        }
        let node_index = |id: i64| -> Result<usize> {
            nodes
                .iter()
                .position(|n| n.id == id)
                .ok_or_else(|| Error::Topology(format!("edge references unknown node {id}")))
        };
        let mut built_edges = Vec::with_capacity(edges.len());
        for (k, e) in edges.iter().enumerate() {
            if edges[..k].iter().any(|o| o.id == e.id) {
                return Err(Error::Topology(format!("duplicate edge id {}", e.id)));
            }
            if !(e.length > 0.0 && e.length.is_finite()) {
                return Err(Error::Topology(format!("edge {} has non-positive length {}", e.id, e.length)));
            }
            if e.from.is_some() && e.from == e.to {
                return Err(Error::Topology(format!("edge {} starts and ends at the same node", e.id)));
            }
            if e.cells < 2 {
                return Err(Error::Topology(format!("edge {} needs at least 2 cells, got {}", e.id, e.cells)));
            }
            built_edges.push(Edge {
                id: e.id,
                length: e.length,
                cells: e.cells,
                from: e.from.map(node_index).transpose()?,
                to: e.to.map(node_index).transpose()?,
            });
        }

        let mut built_nodes = Vec::with_capacity(nodes.len());
        for (idx, spec) in nodes.iter().enumerate() {
            if nodes[..idx].iter().any(|o| o.id == spec.id) {
                return Err(Error::Topology(format!("duplicate node id {}", spec.id)));
            }
            let mut attached = Vec::new();
            for (edge, e) in built_edges.iter().enumerate() {
                if e.from == Some(idx) {
                    attached.push(Attachment { edge, end: EdgeEnd::Start });
                }
                if e.to == Some(idx) {
                    attached.push(Attachment { edge, end: EdgeEnd::End });
                }
            }
            if attached.len() < 2 {
                return Err(Error::Topology(format!(
                    "node {} has degree {}; interior nodes need degree >= 2 (declare exterior ends as boundaries)",
                    spec.id,
                    attached.len()
                )));
            }
            let n = attached.len();
            let matrix = match &spec.matrix {
                MatrixSpec::Uniform => CouplingMatrix::uniform(n)?,
                MatrixSpec::RowMajor(data) => CouplingMatrix::from_row_major(n, data.clone())
                    .map_err(|e| Error::Topology(format!("node {}: {}", spec.id, strip(e))))?,
            };
            built_nodes.push(Node { id: spec.id, attached, condition: spec.condition, matrix });
        }
        Ok(Self { edges: built_edges, nodes: built_nodes })
    }

    /// Edge ends not attached to any node.
    pub fn exterior_ends(&self) -> Vec<(usize, EdgeEnd)> {
        let mut ends = Vec::new();
        for (k, e) in self.edges.iter().enumerate() {
            if e.from.is_none() {
                ends.push((k, EdgeEnd::Start));
            }
            if e.to.is_none() {
                ends.push((k, EdgeEnd::End));
            }
        }
        ends
    }

    pub fn edge_index(&self, id: i64) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn node_index(&self, id: i64) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Returns a copy with every node's condition replaced.
    pub fn with_condition(&self, condition: CouplingKind) -> Self {
        let mut net = self.clone();
        for node in &mut net.nodes {
            node.condition = condition;
        }
        net
    }

    /// Returns a copy with every edge refined to `cells` cells.
    pub fn with_cells(&self, cells: usize) -> Result<Self> {
        if cells < 2 {
            return Err(Error::Topology(format!("edges need at least 2 cells, got {cells}")));
        }
        let mut net = self.clone();
        for e in &mut net.edges {
            e.cells = cells;
        }
        Ok(net)
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::Topology(s) => s,
        other => format!("{other}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Kinetic,
    HalfMoment,
    Wave,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// Equilibrium with the given macroscopic state.
    Macroscopic { rho: f64, q: f64 },
    /// Velocity-independent distribution `f ≡ value`.
    Kinetic { f: f64 },
}

impl InitialState {
    pub fn macro_state(&self) -> crate::MacroState {
        match *self {
            InitialState::Macroscopic { rho, q } => crate::MacroState::new(rho, q),
            InitialState::Kinetic { f } => crate::MacroState::new(2.0 * f, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    /// Zero-gradient ghost cell.
    Free,
    /// Prescribed constant kinetic inflow `f = value` on the ingoing half range.
    Inflow(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundary {
    pub edge: usize,
    pub end: EdgeEnd,
    pub condition: BoundaryCondition,
}

/// Run parameters. Per-edge vectors are indexed like [`Network::edges`].
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub model: Model,
    pub a: f64,
    pub epsilon: f64,
    pub cfl: f64,
    pub t_end: f64,
    pub velocity_cells: usize,
    pub initial: Vec<InitialState>,
    pub boundaries: Vec<Boundary>,
}

impl Scenario {
    /// Checks parameter ranges and that every exterior end has exactly one boundary.
    pub fn validate(&self, network: &Network) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.a > 0.0 && self.a.is_finite()) {
            return bad(format!("wave speed a must be positive, got {}", self.a));
        }
        if matches!(self.model, Model::Kinetic | Model::HalfMoment)
            && abs(self.a * self.a - 1.0 / 3.0) > 1e-9
        {
            return bad(format!(
                "the bounded-velocity {:?} model fixes a^2 = 1/3, got a = {}",
                self.model, self.a
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad(format!("cfl must lie in (0, 1], got {}", self.cfl));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be nonnegative, got {}", self.t_end));
        }
        if self.model == Model::Kinetic && (self.velocity_cells < 2 || self.velocity_cells % 2 != 0) {
            return bad(format!("velocity_cells must be even and >= 2, got {}", self.velocity_cells));
        }
        if self.initial.len() != network.edges.len() {
            return bad(format!(
                "initial data given for {} edges, network has {}",
                self.initial.len(),
                network.edges.len()
            ));
        }
        let exterior = network.exterior_ends();
        for b in &self.boundaries {
            if !exterior.contains(&(b.edge, b.end)) {
                let id = network.edges.get(b.edge).map(|e| e.id).unwrap_or(-1);
                return bad(format!("boundary on edge {id} {:?} is not an exterior end", b.end));
            }
            if let BoundaryCondition::Inflow(v) = b.condition {
                if !v.is_finite() {
                    return bad(format!("inflow value {v} is not finite"));
                }
            }
        }
        for (edge, end) in exterior {
            let count = self.boundaries.iter().filter(|b| b.edge == edge && b.end == end).count();
            if count != 1 {
                return bad(format!(
                    "exterior end {:?} of edge {} needs exactly one boundary condition, found {count}",
                    end, network.edges[edge].id
                ));
            }
        }
        for node in &network.nodes {
            match (self.model, node.condition) {
                (Model::Wave, CouplingKind::Kinetic) => {
                    return bad(format!(
                        "node {} uses the kinetic condition, which the wave model cannot apply; choose a macroscopic coupling",
                        node.id
                    ))
                }
                (Model::Kinetic | Model::HalfMoment, c) if c.is_macroscopic() => {
                    return bad(format!(
                        "node {}: the {:?} model couples through the kinetic matrix, not {:?}",
                        node.id, self.model, c
                    ))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn boundary(&self, edge: usize, end: EdgeEnd) -> BoundaryCondition {
        self.boundaries
            .iter()
            .find(|b| b.edge == edge && b.end == end)
            .map(|b| b.condition)
            .unwrap_or(BoundaryCondition::Free)
    }
}

/// The tripod of three unit edges leaving one uniform node, with free outer ends.
pub fn tripod(cells: usize, condition: CouplingKind) -> Result<Network> {
    let edges: Vec<EdgeSpec> = (1..=3)
        .map(|id| EdgeSpec { id, length: 1.0, cells, from: Some(0), to: None })
        .collect();
    Network::new(&edges, &[NodeSpec { id: 0, condition, matrix: MatrixSpec::Uniform }])
}

/// The seven-edge diamond: `E1: N0→N1`, `E2: N1→N2`, `E3: N1→N3`, `E4: N2→N3`,
/// `E5: N2→N4`, `E6: N3→N4`, `E7: N4→N5`, with `N0`, `N5` exterior.
pub fn diamond(cells: usize, condition: CouplingKind) -> Result<Network> {
    let links = [(None, Some(1)), (Some(1), Some(2)), (Some(1), Some(3)), (Some(2), Some(3)), (Some(2), Some(4)), (Some(3), Some(4)), (Some(4), None)];
    let edges: Vec<EdgeSpec> = links
        .iter()
        .enumerate()
        .map(|(k, &(from, to))| EdgeSpec { id: k as i64 + 1, length: 1.0, cells, from, to })
        .collect();
    let nodes: Vec<NodeSpec> =
        (1..=4).map(|id| NodeSpec { id, condition, matrix: MatrixSpec::Uniform }).collect();
    Network::new(&edges, &nodes)
}

/// Every exterior end with a zero-gradient condition.
pub fn free_boundaries(network: &Network) -> Vec<Boundary> {
    network
        .exterior_ends()
        .into_iter()
        .map(|(edge, end)| Boundary { edge, end, condition: BoundaryCondition::Free })
        .collect()
}

/// Convenience used by tests and examples: a degree-`n` star of unit edges.
pub fn star(n: usize, cells: usize, condition: CouplingKind) -> Result<Network> {
    let edges: Vec<EdgeSpec> = (0..n)
        .map(|k| EdgeSpec { id: k as i64 + 1, length: 1.0, cells, from: Some(0), to: None })
        .collect();
    Network::new(&edges, &[NodeSpec { id: 0, condition, matrix: MatrixSpec::Uniform }])
}
