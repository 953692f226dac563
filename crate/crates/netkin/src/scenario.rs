//! Scenario files (JSON) and the bundled example networks.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use netkin_core::topology::{Boundary, EdgeSpec, MatrixSpec, NodeSpec};
use netkin_core::{
    BoundaryCondition, Closure, CouplingKind, EdgeEnd, InitialState, Model, Network, Scenario, VelocityModel,
    BOUNDED_WAVE_SPEED,
};
use serde::Deserialize;

use crate::error::{Error, Result};

pub const TRIPOD: &str = include_str!("../scenarios/tripod.json");
pub const DIAMOND: &str = include_str!("../scenarios/diamond.json");
pub const SINGLE_EDGE: &str = include_str!("../scenarios/single_edge.json");

/// Names accepted in place of a scenario path.
pub const BUNDLED: [(&str, &str); 3] = [("tripod", TRIPOD), ("diamond", DIAMOND), ("single_edge", SINGLE_EDGE)];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    model: ModelName,
    a: Option<f64>,
    #[serde(default = "default_epsilon")]
    epsilon: f64,
    #[serde(default = "default_cfl")]
    cfl: f64,
    t_end: f64,
    #[serde(default = "default_cells")]
    cells_per_edge: usize,
    #[serde(default = "default_cells")]
    velocity_cells: usize,
    edges: Vec<EdgeFile>,
    #[serde(default)]
    nodes: Vec<NodeFile>,
    initial: Vec<InitialFile>,
    #[serde(default)]
    boundaries: Vec<BoundaryFile>,
}

fn default_epsilon() -> f64 {
    1e-3
}

fn default_cfl() -> f64 {
    1.0
}

fn default_cells() -> usize {
    400
}

fn default_length() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ModelName {
    Kinetic,
    #[serde(alias = "halfmoment")]
    HalfMoment,
    Wave,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeFile {
    id: i64,
    #[serde(default = "default_length")]
    length: f64,
    from: Option<i64>,
    to: Option<i64>,
    cells: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeFile {
    id: i64,
    condition: String,
    velocity_model: Option<VelocityName>,
    #[serde(default)]
    coupling: CouplingFile,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum VelocityName {
    Bounded,
    Unbounded,
}

#[derive(Debug, Default, Deserialize)]
#[serde(untagged)]
enum CouplingFile {
    #[default]
    #[serde(skip)]
    Default,
    Named(String),
    Flat(Vec<f64>),
    Rows(Vec<Vec<f64>>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialFile {
    edge: i64,
    rho: Option<f64>,
    q: Option<f64>,
    f: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum EndName {
    Start,
    End,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundaryFile {
    edge: i64,
    end: EndName,
    condition: BoundaryFileCondition,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum BoundaryFileCondition {
    Named(String),
    Inflow { inflow: f64 },
}

/// A validated network together with its run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedScenario {
    pub network: Network,
    pub scenario: Scenario,
}

/// Command-line style overrides applied after loading.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub model: Option<Model>,
    pub coupling: Option<CouplingKind>,
    pub epsilon: Option<f64>,
    pub cells: Option<usize>,
    pub velocity_cells: Option<usize>,
    pub cfl: Option<f64>,
    pub t_end: Option<f64>,
}

impl LoadedScenario {
    /// Applies `overrides` and revalidates. Switching to the kinetic or
    /// half-moment model without naming a coupling turns every node kinetic.
    pub fn with_overrides(&self, overrides: &Overrides) -> Result<Self> {
        let mut network = self.network.clone();
        let mut scenario = self.scenario.clone();
        if let Some(cells) = overrides.cells {
            network = network.with_cells(cells)?;
        }
        if let Some(model) = overrides.model {
            scenario.model = model;
            if overrides.coupling.is_none() && matches!(model, Model::Kinetic | Model::HalfMoment) {
                network = network.with_condition(CouplingKind::Kinetic);
            }
        }
        if let Some(kind) = overrides.coupling {
            network = network.with_condition(kind);
        }
        if let Some(eps) = overrides.epsilon {
            scenario.epsilon = eps;
        }
        if let Some(v) = overrides.velocity_cells {
            scenario.velocity_cells = v;
        }
        if let Some(cfl) = overrides.cfl {
            scenario.cfl = cfl;
        }
        if let Some(t) = overrides.t_end {
            scenario.t_end = t;
        }
        scenario.validate(&network)?;
        Ok(Self { network, scenario })
    }
}

/// Parses a coupling name: `kinetic`, `equal_density`, `full_moment`,
/// `maxwell` or `half_moment` (short forms `equal`, `full`, `half`), with an
/// optional `-unbounded` or `-bounded` suffix.
pub fn parse_coupling(text: &str) -> Result<CouplingKind> {
    let lower = text.trim().to_ascii_lowercase().replace('-', "_");
    let (name, velocity) = if let Some(base) = lower.strip_suffix("_unbounded") {
        (base, Some(VelocityModel::Unbounded))
    } else if let Some(base) = lower.strip_suffix("_bounded") {
        (base, Some(VelocityModel::Bounded))
    } else {
        (lower.as_str(), None)
    };
    coupling_from_parts(name, velocity).ok_or_else(|| {
        Error::Invalid(format!(
            "unknown coupling '{text}'; expected kinetic, equal_density, full_moment, maxwell or half_moment"
        ))
    })
}

fn coupling_from_parts(name: &str, velocity: Option<VelocityModel>) -> Option<CouplingKind> {
    let velocity_model = velocity.unwrap_or(VelocityModel::Bounded);
    let closure = match name {
        "kinetic" if velocity.is_none() => return Some(CouplingKind::Kinetic),
        "equal" | "equal_density" if velocity.is_none() => return Some(CouplingKind::EqualDensity),
        "full" | "full_moment" | "fullmoment" => Closure::FullMoment,
        "maxwell" => Closure::Maxwell,
        "half" | "half_moment" | "halfmoment" => Closure::HalfMoment,
        _ => return None,
    };
    Some(CouplingKind::Macroscopic { closure, velocity: velocity_model })
}

pub fn parse_model(text: &str) -> Result<Model> {
    match text.trim().to_ascii_lowercase().replace('-', "_").as_str() {
        "kinetic" => Ok(Model::Kinetic),
        "half_moment" | "halfmoment" => Ok(Model::HalfMoment),
        "wave" => Ok(Model::Wave),
        _ => Err(Error::Invalid(format!("unknown model '{text}'; expected kinetic, half_moment or wave"))),
    }
}

/// Loads a scenario file, or a bundled scenario when `path` names one and no
/// such file exists.
pub fn load_scenario(path: &Path) -> Result<LoadedScenario> {
    match fs::read_to_string(path) {
        Ok(text) => parse_scenario(&text, &path.display().to_string()),
        Err(err) => {
            let name = path.to_str().unwrap_or_default();
            match BUNDLED.iter().find(|(n, _)| *n == name) {
                Some((n, text)) => parse_scenario(text, &format!("bundled scenario {n}")),
                None => Err(Error::Io { path: path.to_path_buf(), source: err }),
            }
        }
    }
}

pub fn bundled(name: &str) -> Result<LoadedScenario> {
    let (n, text) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Invalid(format!("no bundled scenario named '{name}'")))?;
    parse_scenario(text, &format!("bundled scenario {n}"))
}

/// Parses scenario JSON. `origin` names the source in error messages.
pub fn parse_scenario(text: &str, origin: &str) -> Result<LoadedScenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|err| {
        let inner = err.inner();
        Error::Parse {
            origin: origin.to_string(),
            line: inner.line(),
            column: inner.column(),
            field: err.path().to_string(),
            message: inner.to_string(),
        }
    })?;
    build(file).map_err(|e| match e {
        Error::Field { field, message } => Error::Invalid(format!("{origin}: {field}: {message}")),
        Error::Core(core) => Error::Invalid(format!("{origin}: {core}")),
        other => other,
    })
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Field { field: field.into(), message: message.into() }
}

fn build(file: ScenarioFile) -> Result<LoadedScenario> {
    let model = match file.model {
        ModelName::Kinetic => Model::Kinetic,
        ModelName::HalfMoment => Model::HalfMoment,
        ModelName::Wave => Model::Wave,
    };

    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(file.edges.len());
    for (k, e) in file.edges.iter().enumerate() {
        if !seen.insert(e.id) {
            return Err(field_err(format!("edges[{k}].id"), format!("duplicate edge id {}", e.id)));
        }
        let cells = e.cells.unwrap_or(file.cells_per_edge);
        if cells < 2 {
            return Err(field_err(format!("edges[{k}].cells"), format!("edge {} needs at least 2 cells", e.id)));
        }
        edges.push(EdgeSpec { id: e.id, length: e.length, cells, from: e.from, to: e.to });
    }

    let mut nodes = Vec::with_capacity(file.nodes.len());
    for (k, n) in file.nodes.iter().enumerate() {
        let velocity = n.velocity_model.map(|v| match v {
            VelocityName::Bounded => VelocityModel::Bounded,
            VelocityName::Unbounded => VelocityModel::Unbounded,
        });
        let name = n.condition.trim().to_ascii_lowercase().replace('-', "_");
        let condition = coupling_from_parts(&name, velocity).ok_or_else(|| {
            field_err(
                format!("nodes[{k}].condition"),
                format!("unknown condition '{}' (velocity model {:?})", n.condition, n.velocity_model),
            )
        })?;
        let matrix = match &n.coupling {
            CouplingFile::Default => MatrixSpec::Uniform,
            CouplingFile::Named(s) if s == "uniform" => MatrixSpec::Uniform,
            CouplingFile::Named(s) => {
                return Err(field_err(format!("nodes[{k}].coupling"), format!("expected \"uniform\" or a matrix, got \"{s}\"")))
            }
            CouplingFile::Flat(v) => MatrixSpec::RowMajor(v.clone()),
            CouplingFile::Rows(rows) => {
                if rows.iter().any(|r| r.len() != rows.len()) {
                    return Err(field_err(format!("nodes[{k}].coupling"), "matrix rows must form a square matrix"));
                }
                MatrixSpec::RowMajor(rows.concat())
            }
        };
        nodes.push(NodeSpec { id: n.id, condition, matrix });
    }

    let network = Network::new(&edges, &nodes).map_err(|e| field_err("edges/nodes", e.to_string()))?;
    let edge_index = |id: i64, field: String| -> Result<usize> {
        network.edge_index(id).ok_or_else(|| field_err(field, format!("unknown edge id {id}")))
    };

    let mut initial: Vec<Option<InitialState>> = vec![None; network.edges.len()];
    for (k, init) in file.initial.iter().enumerate() {
        let field = format!("initial[{k}]");
        let idx = edge_index(init.edge, format!("{field}.edge"))?;
        let state = match (init.rho, init.q, init.f) {
            (Some(rho), q, None) => InitialState::Macroscopic { rho, q: q.unwrap_or(0.0) },
            (None, None, Some(f)) => InitialState::Kinetic { f },
            _ => return Err(field_err(field, "give either rho (and optionally q) or f")),
        };
        if initial[idx].replace(state).is_some() {
            return Err(field_err(field, format!("edge {} has initial data twice", init.edge)));
        }
    }
    let initial = initial
        .into_iter()
        .enumerate()
        .map(|(k, s)| s.ok_or_else(|| field_err("initial", format!("edge {} has no initial data", network.edges[k].id))))
        .collect::<Result<Vec<_>>>()?;

    let mut boundaries = Vec::with_capacity(file.boundaries.len());
    for (k, b) in file.boundaries.iter().enumerate() {
        let field = format!("boundaries[{k}]");
        let edge = edge_index(b.edge, format!("{field}.edge"))?;
        let end = match b.end {
            EndName::Start => EdgeEnd::Start,
            EndName::End => EdgeEnd::End,
        };
        let condition = match &b.condition {
            BoundaryFileCondition::Named(s) if s == "free" => BoundaryCondition::Free,
            BoundaryFileCondition::Named(s) => {
                return Err(field_err(format!("{field}.condition"), format!("expected \"free\" or {{\"inflow\": value}}, got \"{s}\"")))
            }
            BoundaryFileCondition::Inflow { inflow } => BoundaryCondition::Inflow(*inflow),
        };
        boundaries.push(Boundary { edge, end, condition });
    }

    let scenario = Scenario {
        model,
        a: file.a.unwrap_or(BOUNDED_WAVE_SPEED),
        epsilon: file.epsilon,
        cfl: file.cfl,
        t_end: file.t_end,
        velocity_cells: file.velocity_cells,
        initial,
        boundaries,
    };
    scenario.validate(&network)?;
    Ok(LoadedScenario { network, scenario })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenarios_load() {
        let tripod = bundled("tripod").unwrap();
        assert_eq!(tripod.network.edges.len(), 3);
        assert_eq!(tripod.network.nodes[0].degree(), 3);
        assert_eq!(tripod.scenario.initial[1].macro_state().rho, 2.0 / 3.0);

        let diamond = bundled("diamond").unwrap();
        assert_eq!(diamond.network.nodes.len(), 4);
        assert!(diamond.network.nodes.iter().all(|n| n.degree() == 3));
        let n1 = &diamond.network.nodes[diamond.network.node_index(1).unwrap()];
        let ends: Vec<(i64, EdgeEnd)> =
            n1.attached.iter().map(|a| (diamond.network.edges[a.edge].id, a.end)).collect();
        assert_eq!(ends, vec![(1, EdgeEnd::End), (2, EdgeEnd::Start), (3, EdgeEnd::Start)]);

        let single = bundled("single_edge").unwrap();
        assert!(single.network.nodes.is_empty());
        assert!(bundled("ring").is_err());
    }

    #[test]
    fn syntax_errors_carry_line_and_field() {
        let text = "{\n  \"model\": \"wave\",\n  \"t_end\": 1.0,\n  \"edges\": [{\"id\": 1, \"length\": \"long\"}],\n  \"initial\": []\n}";
        match parse_scenario(text, "inline").unwrap_err() {
            Error::Parse { line, field, .. } => {
                assert_eq!(line, 4);
                assert_eq!(field, "edges[0].length");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn invariant_violations_are_named() {
        let text = r#"{"model": "wave", "t_end": 1, "cells_per_edge": 10,
            "edges": [{"id": 1, "from": 0}, {"id": 2, "from": 0}],
            "nodes": [{"id": 0, "condition": "maxwell", "coupling": [[0, 0.9], [1, 0]]}],
            "initial": [{"edge": 1, "rho": 1}, {"edge": 2, "rho": 1}],
            "boundaries": [{"edge": 1, "end": "end", "condition": "free"}, {"edge": 2, "end": "end", "condition": "free"}]}"#;
        let msg = parse_scenario(text, "inline").unwrap_err().to_string();
        assert!(msg.contains("column"), "{msg}");

        let missing = text.replace(r#", {"edge": 2, "rho": 1}"#, "").replace("[[0, 0.9], [1, 0]]", "\"uniform\"");
        let msg = parse_scenario(&missing, "inline").unwrap_err().to_string();
        assert!(msg.contains("edge 2 has no initial data"), "{msg}");
    }

    #[test]
    fn couplings_parse() {
        assert_eq!(parse_coupling("equal").unwrap(), CouplingKind::EqualDensity);
        assert_eq!(
            parse_coupling("maxwell-unbounded").unwrap(),
            CouplingKind::Macroscopic { closure: Closure::Maxwell, velocity: VelocityModel::Unbounded }
        );
        assert_eq!(
            parse_coupling("half_moment").unwrap(),
            CouplingKind::Macroscopic { closure: Closure::HalfMoment, velocity: VelocityModel::Bounded }
        );
        assert!(parse_coupling("kinetic-unbounded").is_err());
        assert!(parse_coupling("lagrange").is_err());
        assert_eq!(parse_model("half-moment").unwrap(), Model::HalfMoment);
    }

    #[test]
    fn overrides_switch_node_conditions() {
        let tripod = bundled("tripod").unwrap();
        let kinetic = tripod
            .with_overrides(&Overrides { model: Some(Model::Kinetic), cells: Some(50), ..Overrides::default() })
            .unwrap();
        assert_eq!(kinetic.network.nodes[0].condition, CouplingKind::Kinetic);
        assert_eq!(kinetic.network.edges[0].cells, 50);
        let bad = Overrides { coupling: Some(CouplingKind::Kinetic), ..Overrides::default() };
        assert!(tripod.with_overrides(&bad).is_err());
    }
}
