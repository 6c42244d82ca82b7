//! Multi-valued maps modelling the incompleteness process, their validity
//! assumptions, and CAR-admissibility checking.
//!
//! A map takes each fact to the nonempty set of observations the process may
//! turn it into. For every observation `w`, `{w}*` collects the facts that
//! may originate it and `{w}_*` the facts of which `w` is the only possible
//! observation. An unknown-process map must additionally have `{w}_*` empty
//! for every `w`; a CAR map must admit strictly positive coefficients
//! `alpha_w` with `sum_{w in Gamma(y)} alpha_w = 1` for every fact `y`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::EPS_POS;
use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome};

#[derive(Debug, Clone)]
pub struct MultiValuedMap {
    facts: Vec<String>,
    observations: Vec<String>,
    /// Per fact, the sorted observation indices of `Gamma(fact)`.
    gamma: Vec<Vec<usize>>,
}

/// Serialized form: `{"facts": [...], "observations": [...], "gamma": {...}}`.
#[derive(Debug, Serialize, Deserialize)]
struct MapFile {
    facts: Vec<String>,
    observations: Vec<String>,
    gamma: BTreeMap<String, Vec<String>>,
}

impl MultiValuedMap {
    pub fn new(
        facts: Vec<String>,
        observations: Vec<String>,
        gamma: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if gamma.len() != facts.len() {
            return Err(Error::InvalidModel(format!(
                "{} gamma rows for {} facts",
                gamma.len(),
                facts.len()
            )));
        }
        for (i, f) in facts.iter().enumerate() {
            if facts[..i].contains(f) {
                return Err(Error::InvalidModel(format!("duplicate fact `{f}`")));
            }
        }
        for (i, w) in observations.iter().enumerate() {
            if observations[..i].contains(w) {
                return Err(Error::InvalidModel(format!("duplicate observation `{w}`")));
            }
        }
        let mut gamma = gamma;
        for (y, row) in gamma.iter_mut().enumerate() {
            if row.is_empty() {
                return Err(Error::InvalidModel(format!(
                    "Gamma({}) is empty",
                    facts[y]
                )));
            }
            row.sort_unstable();
            row.dedup();
            if row.iter().any(|&w| w >= observations.len()) {
                return Err(Error::InvalidModel(format!(
                    "Gamma({}) references an unknown observation",
                    facts[y]
                )));
            }
        }
        // Unreachable observations violate the reachability assumption; the
        // construction rejects them up front rather than carrying dead labels.
        for w in 0..observations.len() {
            if !gamma.iter().any(|row| row.contains(&w)) {
                return Err(Error::InvalidModel(format!(
                    "observation `{}` is unreachable",
                    observations[w]
                )));
            }
        }
        Ok(MultiValuedMap {
            facts,
            observations,
            gamma,
        })
    }

    /// The identity map: each fact observed as itself.
    pub fn identity(labels: &[String]) -> Result<Self> {
        MultiValuedMap::new(
            labels.to_vec(),
            labels.to_vec(),
            (0..labels.len()).map(|i| vec![i]).collect(),
        )
    }

    /// Pure missingness: each fact observed either as itself or as `?`.
    pub fn pure_missingness(labels: &[String]) -> Result<Self> {
        let n = labels.len();
        let mut observations = labels.to_vec();
        observations.push("?".to_string());
        MultiValuedMap::new(
            labels.to_vec(),
            observations,
            (0..n).map(|i| vec![i, n]).collect(),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MapFile = serde_json::from_str(text)?;
        let mut gamma = vec![Vec::new(); file.facts.len()];
        for (fact, obs) in &file.gamma {
            let y = file
                .facts
                .iter()
                .position(|f| f == fact)
                .ok_or_else(|| Error::Parse(format!("gamma references unknown fact `{fact}`")))?;
            gamma[y] = obs
                .iter()
                .map(|o| {
                    file.observations
                        .iter()
                        .position(|x| x == o)
                        .ok_or_else(|| Error::UnknownObservation(o.clone()))
                })
                .collect::<Result<Vec<_>>>()?;
        }
        MultiValuedMap::new(file.facts, file.observations, gamma)
    }

    pub fn to_json(&self) -> String {
        let file = MapFile {
            facts: self.facts.clone(),
            observations: self.observations.clone(),
            gamma: self
                .facts
                .iter()
                .enumerate()
                .map(|(y, f)| {
                    (
                        f.clone(),
                        self.gamma[y]
                            .iter()
                            .map(|&w| self.observations[w].clone())
                            .collect(),
                    )
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("map serializes")
    }

    pub fn facts(&self) -> &[String] {
        &self.facts
    }

    pub fn observations(&self) -> &[String] {
        &self.observations
    }

    pub fn gamma(&self, fact: usize) -> &[usize] {
        &self.gamma[fact]
    }

    pub fn fact_index(&self, label: &str) -> Option<usize> {
        self.facts.iter().position(|f| f == label)
    }

    pub fn observation_index(&self, label: &str) -> Result<usize> {
        self.observations
            .iter()
            .position(|w| w == label)
            .ok_or_else(|| Error::UnknownObservation(label.to_string()))
    }

    /// `{w}*`: the facts that may originate observation `w`.
    pub fn compatible_facts(&self, w: usize) -> Result<Vec<usize>> {
        if w >= self.observations.len() {
            return Err(Error::UnknownObservation(format!("#{w}")));
        }
        Ok((0..self.facts.len())
            .filter(|&y| self.gamma[y].contains(&w))
            .collect())
    }

    /// `{w}_*`: the facts whose only compatible observation is `w`.
    pub fn sole_observation_facts(&self, w: usize) -> Result<Vec<usize>> {
        if w >= self.observations.len() {
            return Err(Error::UnknownObservation(format!("#{w}")));
        }
        Ok((0..self.facts.len())
            .filter(|&y| self.gamma[y] == [w])
            .collect())
    }

    /// Checks the unknown-process assumptions: nonempty images, reachable
    /// observations, and no fact forced onto a single observation.
    pub fn validate_unknown_ip(&self) -> Vec<IpViolation> {
        let mut report = Vec::new();
        // Nonempty images and reachability hold by construction; scan anyway
        // so the report stands on its own.
        for (y, row) in self.gamma.iter().enumerate() {
            if row.is_empty() {
                report.push(IpViolation {
                    assumption: IpAssumption::NonemptyImage,
                    witness: self.facts[y].clone(),
                });
            }
        }
        for w in 0..self.observations.len() {
            if self.compatible_facts(w).map(|v| v.is_empty()).unwrap_or(true) {
                report.push(IpViolation {
                    assumption: IpAssumption::ReachableObservation,
                    witness: self.observations[w].clone(),
                });
            }
            for y in self.sole_observation_facts(w).unwrap_or_default() {
                report.push(IpViolation {
                    assumption: IpAssumption::NoForcedObservation,
                    witness: format!(
                        "fact `{}` can only be observed as `{}`",
                        self.facts[y], self.observations[w]
                    ),
                });
            }
        }
        report
    }

    /// Product of two maps acting on different parts of a composite fact:
    /// facts are pairs, images are Cartesian products of the component
    /// images.
    pub fn product_map(&self, other: &MultiValuedMap) -> Result<MultiValuedMap> {
        let mut facts = Vec::new();
        let mut gamma = Vec::new();
        let observations: Vec<String> = self
            .observations
            .iter()
            .flat_map(|a| {
                other
                    .observations
                    .iter()
                    .map(move |b| format!("({a}, {b})"))
            })
            .collect();
        let width = other.observations.len();
        for (ya, fa) in self.facts.iter().enumerate() {
            for (yb, fb) in other.facts.iter().enumerate() {
                facts.push(format!("({fa}, {fb})"));
                let mut image = Vec::new();
                for &wa in &self.gamma[ya] {
                    for &wb in &other.gamma[yb] {
                        image.push(wa * width + wb);
                    }
                }
                gamma.push(image);
            }
        }
        MultiValuedMap::new(facts, observations, gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IpAssumption {
    /// Every fact must have at least one possible observation.
    NonemptyImage,
    /// Every observation must be producible by some fact.
    ReachableObservation,
    /// No fact may have a single forced observation.
    NoForcedObservation,
}

#[derive(Debug, Clone, Serialize)]
pub struct IpViolation {
    pub assumption: IpAssumption,
    pub witness: String,
}

/// Strictly positive CAR coefficients, one per observation label.
#[derive(Debug, Clone, Serialize)]
pub struct CarCoefficients {
    pub alpha: Vec<f64>,
}

impl CarCoefficients {
    /// Checks the defining constraints against a map: positivity and row
    /// sums equal to one.
    pub fn check(&self, map: &MultiValuedMap, eps_pos: f64, sum_tol: f64) -> Result<()> {
        if self.alpha.len() != map.observations().len() {
            return Err(Error::InvalidParameter(
                "one coefficient per observation required".into(),
            ));
        }
        if let Some((w, &a)) = self
            .alpha
            .iter()
            .enumerate()
            .find(|&(_, &a)| !(a > eps_pos))
        {
            return Err(Error::InvalidParameter(format!(
                "alpha[{}] = {a} is not positive",
                map.observations()[w]
            )));
        }
        for (y, row) in (0..map.facts().len()).map(|y| (y, map.gamma(y))) {
            let s: f64 = row.iter().map(|&w| self.alpha[w]).sum();
            if (s - 1.0).abs() > sum_tol {
                return Err(Error::InvalidParameter(format!(
                    "alpha over Gamma({}) sums to {s}",
                    map.facts()[y]
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum CarAdmissibility {
    Feasible(CarCoefficients),
    Infeasible { explanation: String },
}

/// Decides whether the map admits a CAR process: solves
/// `max t  s.t.  sum_{w in Gamma(y)} alpha_w = 1 for all y, alpha >= t`
/// and requires the optimum to be strictly positive. The max-min vertex
/// reached by Bland's rule is the canonical coefficient assignment.
pub fn car_admissibility(map: &MultiValuedMap) -> Result<CarAdmissibility> {
    car_admissibility_with(map, EPS_POS)
}

pub fn car_admissibility_with(map: &MultiValuedMap, eps_pos: f64) -> Result<CarAdmissibility> {
    let n = map.observations().len();
    let m = map.facts().len();
    let mut a = Vec::with_capacity(m);
    for y in 0..m {
        let mut row = vec![0.0; n];
        for &w in map.gamma(y) {
            row[w] = 1.0;
        }
        a.push(row);
    }
    let b = vec![1.0; m];
    match lp::solve_maxmin(&a, &b)? {
        LpOutcome::Optimal {
            objective,
            solution,
        } => {
            if objective > eps_pos {
                Ok(CarAdmissibility::Feasible(CarCoefficients {
                    alpha: solution,
                }))
            } else {
                Ok(CarAdmissibility::Infeasible {
                    explanation: format!(
                        "equations are solvable only with min alpha = {objective:.3e}; \
                         CAR requires strictly positive coefficients"
                    ),
                })
            }
        }
        LpOutcome::Infeasible { phase1_residual } => Ok(CarAdmissibility::Infeasible {
            explanation: format!(
                "normalization equations have no nonnegative solution \
                 (phase-1 residual {phase1_residual:.3e})"
            ),
        }),
        LpOutcome::Unbounded => Err(Error::InvalidParameter(
            "CAR system cannot be unbounded".into(),
        )),
    }
}

/// The four-fact, three-observation map whose CAR system is inconsistent:
/// images {a,b}, {b,c}, {a,c}, {a,b,c}.
pub fn inconsistent_example_map() -> MultiValuedMap {
    MultiValuedMap::new(
        vec!["1".into(), "2".into(), "3".into(), "4".into()],
        vec!["a".into(), "b".into(), "c".into()],
        vec![vec![0, 1], vec![1, 2], vec![0, 2], vec![0, 1, 2]],
    )
    .expect("static map is valid")
}
