//! Coherence graphs over conditional-prevision signatures.
//!
//! A collection of conditional lower previsions `P_j(X_{O_j} | X_{I_j})` is
//! summarized structurally: one dummy node per prevision, arcs from its
//! conditioning variables and to its output variables. The graph's shape
//! alone decides whether separate coherence already implies joint coherence;
//! no numeric tables are involved.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Signatures `(O_j, I_j)` of a collection of conditional previsions over
/// variables `0..n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CollectionSpec {
    pub n: usize,
    pub entries: Vec<CollectionEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CollectionEntry {
    #[serde(rename = "O")]
    pub outputs: Vec<usize>,
    #[serde(rename = "I")]
    pub inputs: Vec<usize>,
}

impl CollectionSpec {
    pub fn new(n: usize, entries: Vec<(Vec<usize>, Vec<usize>)>) -> Result<Self> {
        let spec = CollectionSpec {
            n,
            entries: entries
                .into_iter()
                .map(|(outputs, inputs)| CollectionEntry { outputs, inputs })
                .collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (j, e) in self.entries.iter().enumerate() {
            if e.outputs.is_empty() {
                return Err(Error::InvalidCollection(format!("entry {j} has empty O")));
            }
            for &v in e.outputs.iter().chain(&e.inputs) {
                if v >= self.n {
                    return Err(Error::InvalidCollection(format!(
                        "entry {j} references variable {v} >= n = {}",
                        self.n
                    )));
                }
            }
            if e.outputs.iter().any(|v| e.inputs.contains(v)) {
                return Err(Error::InvalidCollection(format!(
                    "entry {j} has overlapping O and I"
                )));
            }
            let mut o = e.outputs.clone();
            o.sort_unstable();
            o.dedup();
            if o.len() != e.outputs.len() {
                return Err(Error::InvalidCollection(format!(
                    "entry {j} repeats a variable in O"
                )));
            }
            let mut i = e.inputs.clone();
            i.sort_unstable();
            i.dedup();
            if i.len() != e.inputs.len() {
                return Err(Error::InvalidCollection(format!(
                    "entry {j} repeats a variable in I"
                )));
            }
            for (k, other) in self.entries[..j].iter().enumerate() {
                let same_o = sorted(&e.outputs) == sorted(&other.outputs);
                let same_i = sorted(&e.inputs) == sorted(&other.inputs);
                if same_o && same_i {
                    return Err(Error::InvalidCollection(format!(
                        "entries {k} and {j} have identical (O, I)"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

/// A built coherence graph: actual nodes `0..n` plus one dummy node per
/// entry, with arcs `I_j -> dummy_j` and `dummy_j -> O_j`.
#[derive(Debug, Clone)]
pub struct CoherenceGraph {
    pub n: usize,
    /// Per actual node, the dummy nodes pointing at it.
    pub parents_of_actual: Vec<Vec<usize>>,
    /// Per dummy node, its actual-node parents (the entry's inputs).
    pub inputs_of_dummy: Vec<Vec<usize>>,
    /// Per dummy node, its actual-node children (the entry's outputs).
    pub outputs_of_dummy: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphClass {
    A1Plus,
    A1,
    Other,
}

impl std::fmt::Display for GraphClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GraphClass::A1Plus => write!(f, "A1+"),
            GraphClass::A1 => write!(f, "A1"),
            GraphClass::Other => write!(f, "Other"),
        }
    }
}

pub fn build_graph(spec: &CollectionSpec) -> Result<CoherenceGraph> {
    spec.validate()?;
    let mut parents_of_actual = vec![Vec::new(); spec.n];
    let mut inputs_of_dummy = Vec::with_capacity(spec.entries.len());
    let mut outputs_of_dummy = Vec::with_capacity(spec.entries.len());
    for (j, e) in spec.entries.iter().enumerate() {
        for &o in &e.outputs {
            parents_of_actual[o].push(j);
        }
        inputs_of_dummy.push(e.inputs.clone());
        outputs_of_dummy.push(e.outputs.clone());
    }
    Ok(CoherenceGraph {
        n: spec.n,
        parents_of_actual,
        inputs_of_dummy,
        outputs_of_dummy,
    })
}

/// Classifies the graph. `Other` when cyclic or when some actual node has
/// two or more dummy parents; `A1Plus` when acyclic with exactly one parent
/// each; `A1` when acyclic with at most one parent each.
pub fn classify(graph: &CoherenceGraph) -> GraphClass {
    if graph.parents_of_actual.iter().any(|p| p.len() > 1) {
        return GraphClass::Other;
    }
    if is_cyclic(graph) {
        return GraphClass::Other;
    }
    if graph.parents_of_actual.iter().all(|p| p.len() == 1) {
        GraphClass::A1Plus
    } else {
        GraphClass::A1
    }
}

fn is_cyclic(graph: &CoherenceGraph) -> bool {
    // Nodes: actual 0..n, dummy n..n+m. Kahn's algorithm.
    let n = graph.n;
    let m = graph.inputs_of_dummy.len();
    let total = n + m;
    let mut indeg = vec![0usize; total];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); total];
    for (j, (ins, outs)) in graph
        .inputs_of_dummy
        .iter()
        .zip(&graph.outputs_of_dummy)
        .enumerate()
    {
        let d = n + j;
        for &i in ins {
            adj[i].push(d);
            indeg[d] += 1;
        }
        for &o in outs {
            adj[d].push(o);
            indeg[o] += 1;
        }
    }
    let mut queue: Vec<usize> = (0..total).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop() {
        seen += 1;
        for &w in &adj[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push(w);
            }
        }
    }
    seen != total
}

/// An ordering of the entries with `O_k` disjoint from every earlier `I_i`.
///
/// Exists whenever the graph is A1; built by repeatedly extracting, for the
/// last remaining position, the smallest-index entry whose outputs feed no
/// remaining entry's inputs. The defining property is asserted before
/// returning.
pub fn compatible_order(spec: &CollectionSpec) -> Result<Vec<usize>> {
    let graph = build_graph(spec)?;
    if classify(&graph) == GraphClass::Other {
        return Err(Error::NoCompatibleOrder);
    }
    let m = spec.entries.len();
    let mut remaining: Vec<usize> = (0..m).collect();
    let mut order = vec![0usize; m];
    for pos in (0..m).rev() {
        let pick = remaining
            .iter()
            .copied()
            .find(|&k| {
                spec.entries[k].outputs.iter().all(|o| {
                    remaining
                        .iter()
                        .all(|&i| i == k || !spec.entries[i].inputs.contains(o))
                })
            })
            .ok_or(Error::NoCompatibleOrder)?;
        order[pos] = pick;
        remaining.retain(|&k| k != pick);
    }
    debug_assert!(order_is_compatible(spec, &order));
    if !order_is_compatible(spec, &order) {
        return Err(Error::NoCompatibleOrder);
    }
    Ok(order)
}

/// Checks the defining property `O_k` disjoint from the union of earlier `I_i`.
pub fn order_is_compatible(spec: &CollectionSpec, order: &[usize]) -> bool {
    let mut earlier_inputs: Vec<bool> = vec![false; spec.n];
    for &k in order {
        if spec.entries[k].outputs.iter().any(|&o| earlier_inputs[o]) {
            return false;
        }
        for &i in &spec.entries[k].inputs {
            earlier_inputs[i] = true;
        }
    }
    true
}

/// True when the output sets partition `{0, .., n-1}` (necessary for the
/// marginal-extension chain behind a joint).
pub fn a1plus_partition_check(spec: &CollectionSpec) -> bool {
    let mut covered = vec![0usize; spec.n];
    for e in &spec.entries {
        for &o in &e.outputs {
            covered[o] += 1;
        }
    }
    covered.iter().all(|&c| c == 1)
}

/// The Asia network's eight signatures (V, K, B, R, H, O, L, A in that
/// variable order).
pub fn asia_collection() -> CollectionSpec {
    // P1(V), P2(K), P3(B|V), P4(R|K), P5(H|K), P6(O|B,R), P7(L|O), P8(A|O,H)
    CollectionSpec::new(
        8,
        vec![
            (vec![0], vec![]),
            (vec![1], vec![]),
            (vec![2], vec![0]),
            (vec![3], vec![1]),
            (vec![4], vec![1]),
            (vec![5], vec![2, 3]),
            (vec![6], vec![5]),
            (vec![7], vec![5, 4]),
        ],
    )
    .expect("static collection is valid")
}
