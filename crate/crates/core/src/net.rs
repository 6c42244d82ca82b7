//! Discrete Bayesian and credal networks with incompleteness-tagged
//! evidence.
//!
//! A network is a DAG over finite variables; each node carries, per parent
//! configuration, a credal set over its own states (singletons give a
//! Bayesian network). Inference enumerates the joint explicitly (desk scale
//! makes that exact and auditable) and delegates updating to the
//! conservative-inference engine: observed and CAR-coarsened variables form
//! the CAR event, unknown-tagged variables contribute completions, and
//! CAR-missing variables drop out entirely.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cir::{self, CirResult, ObservationSpec};
use crate::conditional::ConditionalTable;
use crate::config::Config;
use crate::credal::CredalSet;
use crate::error::{Error, Result};
use crate::gamble::Gamble;
use crate::prevision::LinearPrevision;
use crate::products;
use crate::space::{ProductSpace, VariableSpec};

/// One node: a variable, its parents, and one credal row per parent
/// configuration.
#[derive(Debug, Clone)]
pub struct NetNode {
    pub var: usize,
    pub parents: Vec<usize>,
    /// Rows indexed by the parent configuration in the node's listed parent
    /// order (row-major, last parent fastest).
    pub rows: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone)]
pub struct DiscreteNet {
    space: Arc<ProductSpace>,
    nodes: Vec<NetNode>,
}

/// Serialized network:
/// `{"variables": [{"name", "states"}], "nodes": [{"var", "parents", "rows"}]}`
/// where `rows` maps a comma-joined parent-state key (empty string for
/// roots) to a list of mass vectors (the credal vertices).
#[derive(Debug, Serialize, Deserialize)]
struct NetFile {
    variables: Vec<VariableSpec>,
    nodes: Vec<NetNodeFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NetNodeFile {
    var: String,
    #[serde(default)]
    parents: Vec<String>,
    rows: BTreeMap<String, Vec<Vec<f64>>>,
}

impl DiscreteNet {
    pub fn new(space: Arc<ProductSpace>, nodes: Vec<NetNode>) -> Result<Self> {
        let n = space.num_variables();
        let mut covered = vec![false; n];
        for node in &nodes {
            space.check_index_set(&[node.var])?;
            space.check_index_set(&node.parents)?;
            if node.parents.contains(&node.var) {
                return Err(Error::InvalidModel(format!(
                    "node {} lists itself as parent",
                    space.variables()[node.var].name
                )));
            }
            if covered[node.var] {
                return Err(Error::InvalidModel(format!(
                    "variable {} has two nodes",
                    space.variables()[node.var].name
                )));
            }
            covered[node.var] = true;
            let expect: usize = node.parents.iter().map(|&p| space.arity(p)).product();
            if node.rows.len() != expect {
                return Err(Error::InvalidModel(format!(
                    "node {} has {} rows for {} parent configurations",
                    space.variables()[node.var].name,
                    node.rows.len(),
                    expect
                )));
            }
            for row in &node.rows {
                if row.is_empty() {
                    return Err(Error::InvalidModel("row with no vertices".into()));
                }
                for mass in row {
                    if mass.len() != space.arity(node.var) {
                        return Err(Error::InvalidMass(format!(
                            "node {} mass vector has wrong length",
                            space.variables()[node.var].name
                        )));
                    }
                }
            }
        }
        if !covered.iter().all(|&c| c) {
            return Err(Error::InvalidModel("every variable needs a node".into()));
        }
        let net = DiscreteNet { space, nodes };
        net.check_acyclic()?;
        Ok(net)
    }

    fn check_acyclic(&self) -> Result<()> {
        let n = self.space.num_variables();
        let mut indeg = vec![0usize; n];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for node in &self.nodes {
            for &p in &node.parents {
                children[p].push(node.var);
                indeg[node.var] += 1;
            }
        }
        let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop() {
            seen += 1;
            for &c in &children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push(c);
                }
            }
        }
        if seen != n {
            return Err(Error::InvalidModel("network graph is cyclic".into()));
        }
        Ok(())
    }

    pub fn space(&self) -> &Arc<ProductSpace> {
        &self.space
    }

    pub fn nodes(&self) -> &[NetNode] {
        &self.nodes
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: NetFile = serde_json::from_str(text)?;
        for v in &file.variables {
            VariableSpec::new(v.name.clone(), v.states.clone())?;
        }
        let space = ProductSpace::new(file.variables)?;
        let mut nodes = Vec::with_capacity(file.nodes.len());
        for nf in &file.nodes {
            let var = space
                .var_index(&nf.var)
                .ok_or_else(|| Error::Parse(format!("unknown variable `{}`", nf.var)))?;
            let parents: Vec<usize> = nf
                .parents
                .iter()
                .map(|p| {
                    space
                        .var_index(p)
                        .ok_or_else(|| Error::Parse(format!("unknown parent `{p}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            // Parent configurations in listed order, last parent fastest.
            let arities: Vec<usize> = parents.iter().map(|&p| space.arity(p)).collect();
            let count: usize = arities.iter().product();
            let mut rows = Vec::with_capacity(count);
            for cfg_idx in 0..count {
                let mut rem = cfg_idx;
                let mut key_parts = Vec::with_capacity(parents.len());
                for (k, &p) in parents.iter().enumerate() {
                    let radix: usize = arities[k + 1..].iter().product();
                    let st = rem / radix;
                    rem %= radix;
                    key_parts.push(space.variables()[p].states[st].clone());
                }
                let key = key_parts.join(",");
                let row = nf.rows.get(&key).ok_or_else(|| {
                    Error::Parse(format!("node `{}` is missing row `{key}`", nf.var))
                })?;
                rows.push(row.clone());
            }
            nodes.push(NetNode { var, parents, rows });
        }
        DiscreteNet::new(space, nodes)
    }

    /// The node tables as conditional previsions on the network space.
    pub fn tables(&self) -> Result<Vec<ConditionalTable>> {
        self.nodes
            .iter()
            .map(|node| {
                let target_sub = self.space.subspace(&[node.var])?;
                let mut sorted_parents = node.parents.clone();
                sorted_parents.sort_unstable();
                let given_sub = self.space.subspace(&sorted_parents)?;
                // Re-index rows from listed parent order to sorted order.
                let arities: Vec<usize> =
                    node.parents.iter().map(|&p| self.space.arity(p)).collect();
                let mut rows = vec![None; given_sub.cell_count()];
                let count: usize = arities.iter().product();
                for cfg_idx in 0..count {
                    let mut rem = cfg_idx;
                    let mut states = vec![0usize; node.parents.len()];
                    for k in 0..node.parents.len() {
                        let radix: usize = arities[k + 1..].iter().product();
                        states[k] = rem / radix;
                        rem %= radix;
                    }
                    let coords: Vec<usize> = sorted_parents
                        .iter()
                        .map(|p| states[node.parents.iter().position(|q| q == p).unwrap()])
                        .collect();
                    let vertices = node.rows[cfg_idx]
                        .iter()
                        .map(|m| LinearPrevision::new(&target_sub, m.clone()))
                        .collect::<Result<Vec<_>>>()?;
                    rows[given_sub.index_of(&coords)?] = Some(CredalSet::new(vertices)?);
                }
                let rows: Vec<CredalSet> = rows.into_iter().map(|r| r.unwrap()).collect();
                ConditionalTable::new(&self.space, &[node.var], &sorted_parents, rows)
            })
            .collect()
    }

    /// The joint credal set by strong extension: one vertex choice per node
    /// row, combined by the chain rule.
    pub fn joint_enumerate(&self, cfg: &Config) -> Result<CredalSet> {
        products::strong_product(&self.tables()?, cfg)
    }
}

/// Incompleteness-tagged evidence for one query.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvidenceSpec {
    pub items: Vec<EvidenceItem>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EvidenceItem {
    /// The variable was observed precisely.
    Observed { var: String, value: String },
    /// The variable is missing through a CAR process: it is marginalized out.
    MissingCar { var: String },
    /// The variable is missing through an unknown process: all of its states
    /// are completions.
    MissingUnknown { var: String },
    /// A group of variables is known to lie in an explicit set of joint
    /// values, produced by an unknown coarsening process.
    CoarsenedUnknown {
        vars: Vec<String>,
        cells: Vec<Vec<String>>,
    },
    /// A group of variables is known to lie in an explicit set of joint
    /// values, produced by a CAR coarsening process.
    CoarsenedCar {
        vars: Vec<String>,
        cells: Vec<Vec<String>>,
    },
}

/// Per-variable-or-group completion material collected from the evidence.
struct Part {
    vars: Vec<usize>,
    tuples: Vec<Vec<usize>>,
}

/// Deterministic translation of tagged evidence into observation data:
/// unknown parts contribute the Cartesian product of their completion sets,
/// observed and CAR-coarsened variables form the CAR event, CAR-missing
/// variables are dropped.
pub fn evidence_to_observation(
    net: &DiscreteNet,
    evidence: &EvidenceSpec,
) -> Result<ObservationSpec> {
    let space = net.space();
    let mut tagged = vec![false; space.num_variables()];
    let mut tag = |v: usize| -> Result<()> {
        if tagged[v] {
            return Err(Error::InvalidEvidence(format!(
                "variable `{}` tagged twice",
                space.variables()[v].name
            )));
        }
        tagged[v] = true;
        Ok(())
    };
    let lookup = |name: &str| -> Result<usize> {
        space
            .var_index(name)
            .ok_or_else(|| Error::InvalidEvidence(format!("unknown variable `{name}`")))
    };
    let state = |v: usize, label: &str| -> Result<usize> {
        space.variables()[v]
            .state_index(label)
            .ok_or_else(|| {
                Error::InvalidEvidence(format!(
                    "variable `{}` has no state `{label}`",
                    space.variables()[v].name
                ))
            })
    };

    let mut unknown_parts: Vec<Part> = Vec::new();
    let mut car_parts: Vec<Part> = Vec::new();
    for item in &evidence.items {
        match item {
            EvidenceItem::Observed { var, value } => {
                let v = lookup(var)?;
                tag(v)?;
                car_parts.push(Part {
                    vars: vec![v],
                    tuples: vec![vec![state(v, value)?]],
                });
            }
            EvidenceItem::MissingCar { var } => {
                let v = lookup(var)?;
                tag(v)?;
                // Marginalized out: contributes nothing.
            }
            EvidenceItem::MissingUnknown { var } => {
                let v = lookup(var)?;
                tag(v)?;
                unknown_parts.push(Part {
                    vars: vec![v],
                    tuples: (0..space.arity(v)).map(|s| vec![s]).collect(),
                });
            }
            EvidenceItem::CoarsenedUnknown { vars, cells }
            | EvidenceItem::CoarsenedCar { vars, cells } => {
                if cells.is_empty() {
                    return Err(Error::InvalidEvidence("empty coarsening set".into()));
                }
                let vs: Vec<usize> = vars.iter().map(|n| lookup(n)).collect::<Result<_>>()?;
                for &v in &vs {
                    tag(v)?;
                }
                let tuples: Vec<Vec<usize>> = cells
                    .iter()
                    .map(|cell| {
                        if cell.len() != vs.len() {
                            return Err(Error::InvalidEvidence(
                                "coarsening cell arity mismatch".into(),
                            ));
                        }
                        vs.iter().zip(cell).map(|(&v, l)| state(v, l)).collect()
                    })
                    .collect::<Result<_>>()?;
                let part = Part { vars: vs, tuples };
                if matches!(item, EvidenceItem::CoarsenedUnknown { .. }) {
                    unknown_parts.push(part);
                } else {
                    car_parts.push(part);
                }
            }
        }
    }

    let (unknown_vars, unknown_cells) = combine_parts(space, &unknown_parts)?;
    let (car_vars, car_cells) = combine_parts(space, &car_parts)?;
    ObservationSpec::new(space, &unknown_vars, unknown_cells, &car_vars, car_cells)
}

/// Cartesian product of the parts, re-expressed over the ascending union of
/// their variables.
fn combine_parts(
    space: &Arc<ProductSpace>,
    parts: &[Part],
) -> Result<(Vec<usize>, Vec<Vec<usize>>)> {
    let mut vars: Vec<usize> = parts.iter().flat_map(|p| p.vars.clone()).collect();
    vars.sort_unstable();
    space.check_index_set(&vars)?;
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    let mut placed: Vec<usize> = Vec::new();
    for part in parts {
        let mut next = Vec::with_capacity(tuples.len() * part.tuples.len());
        for prefix in &tuples {
            for t in &part.tuples {
                let mut row = prefix.clone();
                row.extend_from_slice(t);
                next.push(row);
            }
        }
        tuples = next;
        placed.extend_from_slice(&part.vars);
    }
    // Reorder each tuple from placement order to ascending variable order.
    let order: Vec<usize> = vars
        .iter()
        .map(|v| placed.iter().position(|p| p == v).unwrap())
        .collect();
    let tuples = tuples
        .into_iter()
        .map(|row| order.iter().map(|&k| row[k]).collect())
        .collect();
    Ok((vars, tuples))
}

/// Posterior bounds for one target state.
#[derive(Debug, Clone, Serialize)]
pub struct StatePosterior {
    pub state: String,
    pub result: CirResult,
}

/// Conservative-inference query on a network: per-state posterior bounds for
/// the target, or bounds for a supplied gamble on the target.
pub fn query_cir(
    net: &DiscreteNet,
    target: &str,
    evidence: &EvidenceSpec,
    gamble: Option<&Gamble>,
    cfg: &Config,
) -> Result<Vec<StatePosterior>> {
    let space = net.space();
    let t = space
        .var_index(target)
        .ok_or_else(|| Error::InvalidEvidence(format!("unknown target `{target}`")))?;
    for item in &evidence.items {
        let names: Vec<&String> = match item {
            EvidenceItem::Observed { var, .. }
            | EvidenceItem::MissingCar { var }
            | EvidenceItem::MissingUnknown { var } => vec![var],
            EvidenceItem::CoarsenedUnknown { vars, .. }
            | EvidenceItem::CoarsenedCar { vars, .. } => vars.iter().collect(),
        };
        if names.iter().any(|n| n.as_str() == target) {
            return Err(Error::InvalidEvidence(format!(
                "target `{target}` must not carry evidence"
            )));
        }
    }
    let joint = net.joint_enumerate(cfg)?;
    let obs = evidence_to_observation(net, evidence)?;
    if let Some(g) = gamble {
        let r = cir::cir_lower(&joint, g, &obs, cfg)?;
        return Ok(vec![StatePosterior {
            state: "<gamble>".to_string(),
            result: r,
        }]);
    }
    let mut out = Vec::new();
    for s in 0..space.arity(t) {
        let g = Gamble::state_indicator(space, t, s)?;
        let r = cir::cir_lower(&joint, &g, &obs, cfg)?;
        out.push(StatePosterior {
            state: space.variables()[t].states[s].clone(),
            result: r,
        });
    }
    Ok(out)
}

/// The eight-node chest-clinic fixture used throughout the tests and the
/// command-line walkthrough.
pub fn asia_json() -> &'static str {
    include_str!("../fixtures/asia.json")
}

pub fn asia_net() -> DiscreteNet {
    DiscreteNet::from_json(asia_json()).expect("fixture parses")
}
