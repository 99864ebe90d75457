//! JSON network documents, result documents and CSV export.
//!
//! Documents use bar, km, m, K and kg/(m² s); everything is converted to SI
//! when a [`Problem`] is built.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::eos::{CompressibilityModel, CriticalMixing, ModelKind, MomentumMode, PolynomialZ};
use crate::error::{Error, Result};
use crate::gasprops::{GasComponent, GasPair, MassFraction};
use crate::network::{Edge, EdgeKind, Network, Node, NodeKind};
use crate::pipeflow::PipeParams;
use crate::solver::{CutDecomposition, MixedReport, Residuals, SteadyState};

pub const SCHEMA_VERSION: u32 = 1;
const BAR: f64 = 1e5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDoc {
    pub name: String,
    /// kg/mol
    pub molar_mass: f64,
    /// bar
    pub p_crit: f64,
    /// K
    #[serde(rename = "T_crit")]
    pub t_crit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasDoc {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "T")]
    pub t: f64,
    /// Hydrogen first, natural gas second.
    pub components: [ComponentDoc; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: String,
    /// Omitted for supplies whose load is found from their pressure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    /// bar
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pressure: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: String,
    pub from: String,
    pub to: String,
    pub kind: String,
    /// km
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    /// m
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub diameter: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_fr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDocument {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    pub gas: GasDoc,
    pub model: ModelDoc,
    #[serde(default)]
    pub momentum_mode: MomentumMode,
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<EdgeDoc>,
    /// Free-form metadata, e.g. expected cycle nodes of a fixture.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Value>,
}

/// Everything needed for a solve.
#[derive(Debug, Clone)]
pub struct Problem {
    pub network: Network,
    pub model: CompressibilityModel,
    pub mode: MomentumMode,
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
}

impl NetworkDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text).map_err(parse_err)?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema_version {}", doc.schema_version)));
        }
        ModelSpec::from_doc(&doc.model)?;
        for e in &doc.edges {
            if !matches!(e.kind.as_str(), "pipe" | "compressor" | "valve") {
                return Err(Error::Parse(format!("edge {}: unknown kind {:?}", e.id, e.kind)));
            }
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn gas_pair(&self) -> Result<GasPair> {
        let comp = |c: &ComponentDoc| GasComponent::new(c.name.clone(), c.molar_mass, c.p_crit * BAR, c.t_crit);
        GasPair::new(comp(&self.gas.components[0])?, comp(&self.gas.components[1])?, self.gas.r, self.gas.t)
    }

    pub fn model_spec(&self) -> Result<ModelSpec> {
        ModelSpec::from_doc(&self.model)
    }

    /// Network with SI units and the given momentum mode on every pipe.
    pub fn network(&self, mode: MomentumMode) -> Result<Network> {
        let mut problems = Vec::new();
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let zeta = match n.zeta {
                Some(z) => match MassFraction::new(z) {
                    Ok(z) => Some(z),
                    Err(_) => {
                        problems.push(format!("node {}: zeta {z} outside [0, 1]", n.id));
                        None
                    }
                },
                None => None,
            };
            let load = n.load.unwrap_or(0.0);
            let kind = if n.zeta.is_some() || load < 0.0 { NodeKind::Supply } else { NodeKind::Demand };
            if n.load.is_none() && !(kind == NodeKind::Supply && n.pressure.is_some()) {
                problems.push(format!("node {}: load is required unless the node is a supply with a pressure", n.id));
            }
            nodes.push(Node { id: n.id.clone(), kind, load, zeta, pressure: n.pressure.map(|p| p * BAR) });
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let kind = match e.kind.as_str() {
                "pipe" => match (e.length, e.diameter, e.lambda_fr) {
                    (Some(l), Some(d), Some(f)) => match PipeParams::new(l * 1e3, d, f, mode) {
                        Ok(p) => EdgeKind::Pipe(p),
                        Err(err) => {
                            problems.push(format!("edge {}: {err}", e.id));
                            continue;
                        }
                    },
                    _ => {
                        problems.push(format!("pipe {} needs L, D and lambda_fr", e.id));
                        continue;
                    }
                },
                "compressor" => match e.gamma {
                    Some(g) => EdgeKind::Compressor { gamma: g },
                    None => {
                        problems.push(format!("compressor {} needs gamma", e.id));
                        continue;
                    }
                },
                "valve" => EdgeKind::Valve,
                other => return Err(Error::Parse(format!("edge {}: unknown kind {other:?}", e.id))),
            };
            edges.push(Edge::new(e.id.clone(), e.from.clone(), e.to.clone(), kind));
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Network::new(nodes, edges).map_err(|e| Error::Validation(vec![e.to_string()]))
    }

    /// Builds network and model; `None` keeps the document's choice.
    pub fn problem(&self, model: Option<ModelSpec>, mode: Option<MomentumMode>) -> Result<Problem> {
        let mode = mode.unwrap_or(self.momentum_mode);
        let network = self.network(mode)?;
        let spec = match model {
            Some(m) => m,
            None => self.model_spec()?,
        };
        let model = spec.build(self.gas_pair()?, self)?;
        Ok(Problem { network, model, mode })
    }
}

/// Compressibility model selection as written in a document or on the
/// command line.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Constant(f64),
    Linear,
    Papay(CriticalMixing),
    /// Polynomial coefficients per bar^k; `None` takes the document's, or the
    /// linear-model slopes if the document has none.
    Custom(Option<(Vec<f64>, Vec<f64>)>),
}

impl ModelSpec {
    pub fn from_doc(doc: &ModelDoc) -> Result<Self> {
        let params = doc.params.clone().unwrap_or(Value::Null);
        let get = |key: &str| params.get(key);
        match doc.kind.as_str() {
            "constant" => {
                let k = match get("k") {
                    Some(v) => v.as_f64().ok_or_else(|| Error::Parse("model.params.k must be a number".into()))?,
                    None => 1.0,
                };
                Ok(ModelSpec::Constant(k))
            }
            "linear" => Ok(ModelSpec::Linear),
            "papay" | "quadratic" => {
                let mixing = match get("mixing") {
                    Some(v) => serde_json::from_value(v.clone()).map_err(parse_err)?,
                    None => CriticalMixing::default(),
                };
                Ok(ModelSpec::Papay(mixing))
            }
            "custom" => {
                let coeffs = |key: &str| -> Result<Vec<f64>> {
                    match get(key) {
                        Some(v) => serde_json::from_value(v.clone()).map_err(parse_err),
                        None => Err(Error::Parse(format!("custom model needs params.{key}"))),
                    }
                };
                if params.is_null() {
                    Ok(ModelSpec::Custom(None))
                } else {
                    Ok(ModelSpec::Custom(Some((coeffs("h2")?, coeffs("ng")?))))
                }
            }
            other => Err(Error::Parse(format!("unknown model kind {other:?}"))),
        }
    }

    /// Model name as taken by the command line.
    pub fn parse_name(name: &str) -> Result<Self> {
        ModelSpec::from_doc(&ModelDoc { kind: name.to_string(), params: None })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Constant(_) => "constant",
            ModelSpec::Linear => "linear",
            ModelSpec::Papay(_) => "papay",
            ModelSpec::Custom(_) => "custom",
        }
    }

    pub fn build(&self, pair: GasPair, doc: &NetworkDocument) -> Result<CompressibilityModel> {
        let kind = match self {
            ModelSpec::Constant(k) => ModelKind::Constant(*k),
            ModelSpec::Linear => ModelKind::Linear,
            ModelSpec::Papay(m) => {
                // A document may pin the mixing rule even when the model is
                // picked on the command line.
                let mixing = match doc.model_spec() {
                    Ok(ModelSpec::Papay(dm)) if *m == CriticalMixing::default() => dm,
                    _ => *m,
                };
                ModelKind::Papay(mixing)
            }
            ModelSpec::Custom(coeffs) => {
                let coeffs = match (coeffs, doc.model_spec()) {
                    (Some(c), _) => c.clone(),
                    (None, Ok(ModelSpec::Custom(Some(c)))) => c,
                    _ => {
                        let t = pair.t;
                        let per_bar = |c: &GasComponent| crate::eos::alpha_coefficient(c, t) * BAR;
                        (vec![per_bar(&pair.h2)], vec![per_bar(&pair.ng)])
                    }
                };
                let to_pa = |v: &[f64]| v.iter().enumerate().map(|(k, c)| c / BAR.powi(k as i32 + 1)).collect();
                ModelKind::Custom(Arc::new(PolynomialZ { h2: to_pa(&coeffs.0), ng: to_pa(&coeffs.1) }))
            }
        };
        CompressibilityModel::new(kind, pair)
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

/// Reads and parses a document; also returns the SHA-256 of the file.
pub fn load_document(path: &Path) -> Result<(NetworkDocument, String)> {
    let text = read_text(path)?;
    let doc = NetworkDocument::from_json(&text)?;
    Ok((doc, hex::encode(Sha256::digest(text.as_bytes()))))
}

/// Loads and validates a network file.
pub fn load_network(path: &Path) -> Result<(Problem, String)> {
    let (doc, hash) = load_document(path)?;
    let problem = doc.problem(None, None)?;
    crate::network::validate(&problem.network).into_result()?;
    Ok((problem, hash))
}

/// Rounds to 6 significant figures.
pub fn sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let digits = 5 - x.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits);
    (x * scale).round() / scale
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeResult {
    pub id: String,
    pub pressure_bar: f64,
    pub eta: f64,
    pub load: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeResult {
    pub id: String,
    pub kind: String,
    pub q: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualsDoc {
    pub mass_balance: f64,
    pub mixing: f64,
    pub pipe_relative: f64,
    pub pipe_absolute: f64,
    pub compressor: f64,
    pub compressor_min_flow: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut_pressure: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut_composition: Option<f64>,
    pub subsonic_ok: bool,
}

impl From<&Residuals> for ResidualsDoc {
    fn from(r: &Residuals) -> Self {
        Self {
            mass_balance: r.mass_balance,
            mixing: r.mixing,
            pipe_relative: r.pipe_relative,
            pipe_absolute: r.pipe_absolute,
            compressor: r.compressor,
            compressor_min_flow: r.compressor_min_flow,
            cut_pressure: r.cut_pressure,
            cut_composition: r.cut_composition,
            subsonic_ok: r.subsonic_ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutDoc {
    pub cut_edge: String,
    pub flipped: bool,
    pub cycle_nodes: Vec<String>,
    pub modified_loads: Vec<f64>,
    pub beta: Vec<f64>,
    pub interval: [f64; 2],
    pub lambda: f64,
    pub mu: f64,
    pub iterations: usize,
}

impl From<&CutDecomposition> for CutDoc {
    fn from(c: &CutDecomposition) -> Self {
        Self {
            cut_edge: c.cut_edge.clone(),
            flipped: c.flipped,
            cycle_nodes: c.cycle_nodes.clone(),
            modified_loads: c.modified_loads.clone(),
            beta: c.beta.clone(),
            interval: [c.interval.0, c.interval.1],
            lambda: c.lambda,
            mu: c.mu,
            iterations: c.iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedDoc {
    pub reference: String,
    pub supplies: Vec<String>,
    pub inflows: Vec<f64>,
    pub iterations: usize,
    pub max_pressure_error_pa: f64,
}

impl From<&MixedReport> for MixedDoc {
    fn from(m: &MixedReport) -> Self {
        Self {
            reference: m.reference.clone(),
            supplies: m.supplies.clone(),
            inflows: m.inflows.clone(),
            iterations: m.iterations,
            max_pressure_error_pa: m.max_pressure_error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub model: String,
    pub momentum_mode: MomentumMode,
    pub fixture_sha256: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema_version: u32,
    pub nodes: Vec<NodeResult>,
    pub edges: Vec<EdgeResult>,
    pub residuals: ResidualsDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut: Option<CutDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixed: Option<MixedDoc>,
    pub provenance: Provenance,
}

impl ResultDocument {
    pub fn new(problem: &Problem, state: &SteadyState, mixed: Option<&MixedReport>, fixture_sha256: &str) -> Self {
        let net = &problem.network;
        let nodes = net
            .nodes()
            .iter()
            .enumerate()
            .map(|(v, n)| NodeResult {
                id: n.id.clone(),
                pressure_bar: sig6(state.p[v] / BAR),
                eta: state.eta_node[v].get(),
                load: state.loads[v],
            })
            .collect();
        let edges = net
            .edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| EdgeResult {
                id: edge.id.clone(),
                kind: edge.kind.label().to_string(),
                q: state.q[e],
                eta: state.eta_edge[e].get(),
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            nodes,
            edges,
            residuals: (&state.residuals).into(),
            cut: state.cut.as_ref().map(Into::into),
            mixed: mixed.map(Into::into),
            provenance: Provenance {
                model: problem.model.label().to_string(),
                momentum_mode: problem.mode,
                fixture_sha256: fixture_sha256.to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
        }
    }

    pub fn node(&self, id: &str) -> Option<&NodeResult> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_err)
    }

    /// Flat table: one row per node, then one per edge.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(["element", "id", "pressure_bar", "eta", "q"]).map_err(csv_err)?;
        for n in &self.nodes {
            w.write_record(["node", &n.id, &n.pressure_bar.to_string(), &n.eta.to_string(), ""]).map_err(csv_err)?;
        }
        for e in &self.edges {
            w.write_record(["edge", &e.id, "", &e.eta.to_string(), &e.q.to_string()]).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Profile CSV with header `x_m,p_bar`.
pub fn profile_csv(points: &[(f64, f64)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(["x_m", "p_bar"]).map_err(csv_err)?;
    for &(x, p) in points {
        w.write_record([x.to_string(), sig6(p / BAR).to_string()]).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}
