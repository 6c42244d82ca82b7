//! The conservative inference rule and its special cases.
//!
//! An incomplete observation splits into an unknown-process part (an explicit
//! set of completions over some variables) and a CAR part (an event over
//! other variables). Updating a joint credal set on a gamble proceeds by
//! conditioning, via regular extension, on each completion intersected with
//! the CAR event, keeping only completions of positive upper probability,
//! and taking the worst case:
//!
//! ```text
//! lower(g | w) = min over supported completions y of
//!                min over vertices P with P(y, car) > 0 of P(g | y, car)
//! ```
//!
//! The upper bound is the conjugate (the max of per-completion uppers). With
//! no unknown part this is ordinary regular-extension updating; with no CAR
//! part and all completions supported it reduces to the conservative
//! updating rule, which however refuses inputs containing zero-upper-
//! probability completions.
//!
//! The module also builds the explicit joint over facts and observations
//! from the incompleteness maps (one vertex per prior vertex and selection
//! function, with CAR weights on the observation coordinates), which turns
//! the defining minimization into an ordinary conditioning problem on the
//! bigger space and serves as the engine's independent correctness oracle.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::Config;
use crate::credal::CredalSet;
use crate::error::{Error, Result};
use crate::gamble::Gamble;
use crate::incompleteness::{CarCoefficients, MultiValuedMap};
use crate::prevision::LinearPrevision;
use crate::space::{Event, ProductSpace, VariableSpec};

/// An incomplete observation over a joint space: an explicit completion set
/// on the unknown-process variables and an event on the CAR-process
/// variables. Either part may be trivial (no variables, one empty tuple).
#[derive(Debug, Clone)]
pub struct ObservationSpec {
    space: Arc<ProductSpace>,
    unknown_vars: Vec<usize>,
    unknown_cells: Vec<Vec<usize>>,
    car_vars: Vec<usize>,
    car_cells: Vec<Vec<usize>>,
}

impl ObservationSpec {
    pub fn new(
        space: &Arc<ProductSpace>,
        unknown_vars: &[usize],
        unknown_cells: Vec<Vec<usize>>,
        car_vars: &[usize],
        car_cells: Vec<Vec<usize>>,
    ) -> Result<Self> {
        space.check_index_set(unknown_vars)?;
        space.check_index_set(car_vars)?;
        if unknown_vars.iter().any(|v| car_vars.contains(v)) {
            return Err(Error::InvalidModel(
                "unknown and CAR variable sets overlap".into(),
            ));
        }
        if unknown_cells.is_empty() || car_cells.is_empty() {
            return Err(Error::EmptyEvent);
        }
        let u_sub = space.subspace(unknown_vars)?;
        let c_sub = space.subspace(car_vars)?;
        let mut seen = std::collections::BTreeSet::new();
        for t in &unknown_cells {
            if !seen.insert(u_sub.index_of(t)?) {
                return Err(Error::InvalidModel("repeated completion".into()));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for t in &car_cells {
            if !seen.insert(c_sub.index_of(t)?) {
                return Err(Error::InvalidModel("repeated CAR cell".into()));
            }
        }
        Ok(ObservationSpec {
            space: Arc::clone(space),
            unknown_vars: unknown_vars.to_vec(),
            unknown_cells,
            car_vars: car_vars.to_vec(),
            car_cells,
        })
    }

    /// Observation with no unknown part: plain CAR conditioning data.
    pub fn car_only(
        space: &Arc<ProductSpace>,
        car_vars: &[usize],
        car_cells: Vec<Vec<usize>>,
    ) -> Result<Self> {
        ObservationSpec::new(space, &[], vec![vec![]], car_vars, car_cells)
    }

    /// Observation with no CAR part.
    pub fn unknown_only(
        space: &Arc<ProductSpace>,
        unknown_vars: &[usize],
        unknown_cells: Vec<Vec<usize>>,
    ) -> Result<Self> {
        ObservationSpec::new(space, unknown_vars, unknown_cells, &[], vec![vec![]])
    }

    pub fn space(&self) -> &Arc<ProductSpace> {
        &self.space
    }

    pub fn unknown_vars(&self) -> &[usize] {
        &self.unknown_vars
    }

    pub fn unknown_cells(&self) -> &[Vec<usize>] {
        &self.unknown_cells
    }

    pub fn car_vars(&self) -> &[usize] {
        &self.car_vars
    }

    pub fn car_cells(&self) -> &[Vec<usize>] {
        &self.car_cells
    }

    /// The CAR event on the full space.
    pub fn car_event(&self) -> Result<Event> {
        Event::from_tuples(&self.space, &self.car_vars, &self.car_cells)
    }

    /// The event "unknown part equals this completion and the CAR event
    /// holds".
    pub fn completion_event(&self, completion: &[usize]) -> Result<Event> {
        let fixed = Event::from_tuples(
            &self.space,
            &self.unknown_vars,
            &[completion.to_vec()],
        )?;
        fixed.intersect(&self.car_event()?)
    }

    /// The union of all completion events: everything compatible with the
    /// observation.
    pub fn observation_event(&self) -> Result<Event> {
        let all = Event::from_tuples(&self.space, &self.unknown_vars, &self.unknown_cells)?;
        all.intersect(&self.car_event()?)
    }

    /// Human-readable label for a completion tuple.
    pub fn completion_label(&self, completion: &[usize]) -> String {
        if self.unknown_vars.is_empty() {
            return "()".to_string();
        }
        let parts: Vec<String> = self
            .unknown_vars
            .iter()
            .zip(completion)
            .map(|(&v, &s)| self.space.variables()[v].states[s].clone())
            .collect();
        format!("({})", parts.join(", "))
    }
}

/// Lower and upper bounds under one completion of the unknown part.
#[derive(Debug, Clone, Serialize)]
pub struct CompletionDetail {
    pub completion: Vec<usize>,
    pub label: String,
    /// Whether the completion has positive upper probability and therefore
    /// enters the minimization.
    pub supported: bool,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

/// Result of a conservative-inference update.
#[derive(Debug, Clone, Serialize)]
pub struct CirResult {
    pub lower: f64,
    pub upper: f64,
    pub per_completion: Vec<CompletionDetail>,
    /// Completions attaining the lower bound, in input order.
    pub attaining_completions: Vec<Vec<usize>>,
}

/// The supported completions: members of the unknown part whose completion
/// event has positive upper probability.
pub fn completion_support(
    k1: &CredalSet,
    obs: &ObservationSpec,
    cfg: &Config,
) -> Result<Vec<Vec<usize>>> {
    check_space(k1, obs)?;
    let mut out = Vec::new();
    for c in &obs.unknown_cells {
        let ev = obs.completion_event(c)?;
        if k1.upper_probability(&ev)? > cfg.eps_zero {
            out.push(c.clone());
        }
    }
    Ok(out)
}

fn check_space(k1: &CredalSet, obs: &ObservationSpec) -> Result<()> {
    if k1.space() != &obs.space {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

/// The conservative inference rule: conditions on every supported completion
/// of the unknown part (jointly with the CAR event) by regular extension and
/// returns the envelope over completions.
pub fn cir_lower(
    k1: &CredalSet,
    g: &Gamble,
    obs: &ObservationSpec,
    cfg: &Config,
) -> Result<CirResult> {
    check_space(k1, obs)?;
    if g.space() != k1.space() {
        return Err(Error::SpaceMismatch);
    }
    // The observation must be possible at all.
    let whole = obs.observation_event()?;
    if k1.upper_probability(&whole)? <= cfg.eps_zero {
        return Err(Error::ObservationImpossible);
    }
    let evals = obs.unknown_cells.len() as u128 * k1.vertices().len() as u128;
    if evals > cfg.max_bayes_evals {
        return Err(Error::EnumerationCapExceeded {
            needed: evals,
            cap: cfg.max_bayes_evals,
        });
    }

    let details: Vec<CompletionDetail> = obs
        .unknown_cells
        .par_iter()
        .map(|c| -> Result<CompletionDetail> {
            let ev = obs.completion_event(c)?;
            let supported = k1.upper_probability(&ev)? > cfg.eps_zero;
            let (lower, upper) = if supported {
                (
                    Some(k1.regular_extension_with(&ev, g, cfg.eps_zero)?),
                    Some(k1.upper_regular_extension_with(&ev, g, cfg.eps_zero)?),
                )
            } else {
                (None, None)
            };
            Ok(CompletionDetail {
                completion: c.clone(),
                label: obs.completion_label(c),
                supported,
                lower,
                upper,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for d in &details {
        if let (Some(lo), Some(hi)) = (d.lower, d.upper) {
            lower = lower.min(lo);
            upper = upper.max(hi);
        }
    }
    // Guarded by the precondition: a possible observation has at least one
    // supported completion on a finite space.
    debug_assert!(lower.is_finite());
    if !lower.is_finite() {
        return Err(Error::ObservationImpossible);
    }
    let attaining_completions = details
        .iter()
        .filter(|d| d.lower == Some(lower))
        .map(|d| d.completion.clone())
        .collect();
    Ok(CirResult {
        lower,
        upper,
        per_completion: details,
        attaining_completions,
    })
}

/// The conservative updating rule: like the unknown-only case of the
/// inference rule, but every completion must individually have positive
/// upper probability; inputs with zero-upper-probability completions are
/// refused.
pub fn cur_lower(
    k1: &CredalSet,
    g: &Gamble,
    unknown_vars: &[usize],
    unknown_cells: Vec<Vec<usize>>,
    cfg: &Config,
) -> Result<CirResult> {
    let obs = ObservationSpec::unknown_only(k1.space(), unknown_vars, unknown_cells)?;
    for c in &obs.unknown_cells {
        let ev = obs.completion_event(c)?;
        if k1.upper_probability(&ev)? <= cfg.eps_zero {
            return Err(Error::CurPreconditionViolated {
                completion: obs
                    .unknown_vars
                    .iter()
                    .zip(c)
                    .map(|(&v, &s)| k1.space().variables()[v].states[s].clone())
                    .collect(),
            });
        }
    }
    cir_lower(k1, g, &obs, cfg)
}

/// CAR-only updating: plain regular extension on the compatible event, with
/// its conjugate upper bound.
pub fn car_update(
    k1: &CredalSet,
    g: &Gamble,
    car_vars: &[usize],
    car_cells: Vec<Vec<usize>>,
    cfg: &Config,
) -> Result<(f64, f64)> {
    let obs = ObservationSpec::car_only(k1.space(), car_vars, car_cells)?;
    let ev = obs.car_event()?;
    let lower = k1.regular_extension_with(&ev, g, cfg.eps_zero)?;
    let upper = k1.upper_regular_extension_with(&ev, g, cfg.eps_zero)?;
    Ok((lower, upper))
}

/// Where a joint-with-observations vertex came from.
#[derive(Debug, Clone)]
pub struct IpVertexOrigin {
    pub p1_vertex: usize,
    /// Per unknown-part fact, the selected observation index.
    pub selection: Vec<usize>,
}

/// The explicit joint over facts and observation labels.
#[derive(Debug, Clone)]
pub struct IpJoint {
    pub joint: CredalSet,
    pub origins: Vec<IpVertexOrigin>,
    /// Index of the appended unknown-observation variable.
    pub wbar_var: usize,
    /// Index of the appended CAR-observation variable.
    pub what_var: usize,
}

/// Builds the joint credal set over `(facts, observations)`: the original
/// space extended by one variable per observation label set. Each vertex
/// combines a prior vertex with a selection function mapping every
/// unknown-part fact to one of its possible observations; the CAR part is
/// weighted by the coefficients.
///
/// `gamma_bar`'s facts must be the cells of the unknown-variable subspace in
/// linear order, `gamma_hat`'s the cells of the CAR-variable subspace.
pub fn joint_with_ip(
    k1: &CredalSet,
    unknown_vars: &[usize],
    gamma_bar: &MultiValuedMap,
    car_vars: &[usize],
    gamma_hat: &MultiValuedMap,
    alpha: &CarCoefficients,
    cfg: &Config,
) -> Result<IpJoint> {
    let space = k1.space();
    space.check_index_set(unknown_vars)?;
    space.check_index_set(car_vars)?;
    if unknown_vars.iter().any(|v| car_vars.contains(v)) {
        return Err(Error::InvalidModel(
            "unknown and CAR variable sets overlap".into(),
        ));
    }
    let u_sub = space.subspace(unknown_vars)?;
    let c_sub = space.subspace(car_vars)?;
    if gamma_bar.facts().len() != u_sub.cell_count() {
        return Err(Error::InvalidModel(format!(
            "unknown map has {} facts for {} completions",
            gamma_bar.facts().len(),
            u_sub.cell_count()
        )));
    }
    if gamma_hat.facts().len() != c_sub.cell_count() {
        return Err(Error::InvalidModel(format!(
            "CAR map has {} facts for {} cells",
            gamma_hat.facts().len(),
            c_sub.cell_count()
        )));
    }
    alpha.check(gamma_hat, 0.0, 1e-9)?;

    // Extended space: original variables then W-bar and W-hat.
    let mut vars: Vec<VariableSpec> = space.variables().to_vec();
    let wbar_var = vars.len();
    vars.push(VariableSpec::new(
        "__wbar",
        gamma_bar.observations().to_vec(),
    )?);
    let what_var = vars.len();
    vars.push(VariableSpec::new(
        "__what",
        gamma_hat.observations().to_vec(),
    )?);
    let ext = ProductSpace::new(vars)?;
    if ext.cell_count() > cfg.max_cells {
        return Err(Error::EnumerationCapExceeded {
            needed: ext.cell_count() as u128,
            cap: cfg.max_cells as u128,
        });
    }

    let n_facts = gamma_bar.facts().len();
    let selections: u128 = (0..n_facts)
        .map(|y| gamma_bar.gamma(y).len() as u128)
        .product();
    let total = selections * k1.vertices().len() as u128;
    if total > cfg.max_vertices {
        return Err(Error::EnumerationCapExceeded {
            needed: total,
            cap: cfg.max_vertices,
        });
    }

    // Precompute per-extended-cell pieces.
    let base_cells = space.cell_count();
    let ucell: Vec<usize> = (0..base_cells)
        .map(|c| space.project_index(c, unknown_vars, &u_sub))
        .collect();
    let ccell: Vec<usize> = (0..base_cells)
        .map(|c| space.project_index(c, car_vars, &c_sub))
        .collect();
    // CAR factor per (fact cell, observation): alpha if compatible else 0.
    let n_what = gamma_hat.observations().len();
    let mut car_factor = vec![0.0; c_sub.cell_count() * n_what];
    for yh in 0..c_sub.cell_count() {
        for &wh in gamma_hat.gamma(yh) {
            car_factor[yh * n_what + wh] = alpha.alpha[wh];
        }
    }

    let n_wbar = gamma_bar.observations().len();
    let mut vertices = Vec::with_capacity(total as usize);
    let mut origins = Vec::with_capacity(total as usize);
    let mut selection = vec![0usize; n_facts];
    loop {
        let chosen: Vec<usize> = selection
            .iter()
            .enumerate()
            .map(|(y, &k)| gamma_bar.gamma(y)[k])
            .collect();
        for (pi, p1) in k1.vertices().iter().enumerate() {
            let mut mass = vec![0.0; ext.cell_count()];
            for c in 0..base_cells {
                let m = p1.mass()[c];
                if m == 0.0 {
                    continue;
                }
                let wbar = chosen[ucell[c]];
                for wh in 0..n_what {
                    let f = car_factor[ccell[c] * n_what + wh];
                    if f > 0.0 {
                        let idx = (c * n_wbar + wbar) * n_what + wh;
                        mass[idx] = m * f;
                    }
                }
            }
            vertices.push(LinearPrevision::new_renormalizing(&ext, mass)?);
            origins.push(IpVertexOrigin {
                p1_vertex: pi,
                selection: chosen.clone(),
            });
        }
        // Mixed-radix increment over selection functions.
        let mut k = n_facts;
        loop {
            if k == 0 {
                return Ok(IpJoint {
                    joint: CredalSet::new(vertices)?,
                    origins,
                    wbar_var,
                    what_var,
                });
            }
            k -= 1;
            selection[k] += 1;
            if selection[k] < gamma_bar.gamma(k).len() {
                break;
            }
            selection[k] = 0;
        }
    }
}

/// Both sides of the defining equivalence: the engine's value and the value
/// obtained by conditioning the explicit joint on the observation labels.
#[derive(Debug, Clone)]
pub struct OracleComparison {
    pub cir: CirResult,
    pub oracle_lower: f64,
    pub oracle_upper: f64,
}

/// Computes the update both ways: by the conservative inference rule on the
/// fact space, and by regular extension on the explicit joint conditioned on
/// the observation-label event `W = (wbar, what)`. The two agree whenever
/// the maps and coefficients satisfy the modelling assumptions.
pub fn theorem1_oracle(
    k1: &CredalSet,
    g: &Gamble,
    unknown_vars: &[usize],
    gamma_bar: &MultiValuedMap,
    wbar: usize,
    car_vars: &[usize],
    gamma_hat: &MultiValuedMap,
    what: usize,
    alpha: &CarCoefficients,
    cfg: &Config,
) -> Result<OracleComparison> {
    let space = k1.space();
    let u_sub = space.subspace(unknown_vars)?;
    let c_sub = space.subspace(car_vars)?;

    // Observation data induced by the maps.
    let unknown_cells: Vec<Vec<usize>> = gamma_bar
        .compatible_facts(wbar)?
        .into_iter()
        .map(|y| u_sub.coords_of(y))
        .collect();
    let car_cells: Vec<Vec<usize>> = gamma_hat
        .compatible_facts(what)?
        .into_iter()
        .map(|y| c_sub.coords_of(y))
        .collect();
    let obs = ObservationSpec::new(space, unknown_vars, unknown_cells, car_vars, car_cells)?;
    let cir = cir_lower(k1, g, &obs, cfg)?;

    let ip = joint_with_ip(k1, unknown_vars, gamma_bar, car_vars, gamma_hat, alpha, cfg)?;
    let ext = ip.joint.space();
    let w_event = Event::from_assignment(ext, &[(ip.wbar_var, wbar), (ip.what_var, what)])?;
    let g_ext = g.relift(ext)?;
    let oracle_lower = ip
        .joint
        .regular_extension_with(&w_event, &g_ext, cfg.eps_zero)?;
    let oracle_upper = ip
        .joint
        .upper_regular_extension_with(&w_event, &g_ext, cfg.eps_zero)?;
    Ok(OracleComparison {
        cir,
        oracle_lower,
        oracle_upper,
    })
}
