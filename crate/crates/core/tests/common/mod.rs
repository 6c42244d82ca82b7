//! Shared generators for the randomized equivalence suites.
#![allow(dead_code)]

use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use ipcir::credal::CredalSet;
use ipcir::gamble::Gamble;
use ipcir::incompleteness::{
    car_admissibility, CarAdmissibility, CarCoefficients, MultiValuedMap,
};
use ipcir::prevision::LinearPrevision;
use ipcir::space::{ProductSpace, VariableSpec};

pub struct Instance {
    pub k1: CredalSet,
    pub g: Gamble,
    pub unknown_vars: Vec<usize>,
    pub gamma_bar: MultiValuedMap,
    pub wbar: usize,
    pub car_vars: Vec<usize>,
    pub gamma_hat: MultiValuedMap,
    pub what: usize,
    pub alpha: CarCoefficients,
}

/// Z x Ybar x Yhat with one variable per block.
pub fn three_block_space(nz: usize, nb: usize, nh: usize) -> Arc<ProductSpace> {
    ProductSpace::new(vec![
        VariableSpec::new("Z", (0..nz).map(|i| format!("z{i}")).collect()).unwrap(),
        VariableSpec::new("Yb", (0..nb).map(|i| format!("u{i}")).collect()).unwrap(),
        VariableSpec::new("Yh", (0..nh).map(|i| format!("c{i}")).collect()).unwrap(),
    ])
    .unwrap()
}

/// An unknown-process map over `n` facts: singletons, adjacent pairs and the
/// full set as observations, thinned at random while keeping every fact with
/// two or more observations and every observation reachable.
pub fn random_unknown_map(rng: &mut ChaCha8Rng, n: usize) -> MultiValuedMap {
    loop {
        let labels: Vec<String> = (0..n).map(|i| format!("u{i}")).collect();
        let mut observations: Vec<(String, Vec<usize>)> = Vec::new();
        for (i, l) in labels.iter().enumerate() {
            observations.push((format!("[{l}]"), vec![i]));
        }
        for i in 0..n.saturating_sub(1) {
            observations.push((format!("[u{i} u{}]", i + 1), vec![i, i + 1]));
        }
        observations.push(("[all]".to_string(), (0..n).collect()));
        // Thin some observations at random, keeping the full set.
        let kept: Vec<(String, Vec<usize>)> = observations
            .iter()
            .enumerate()
            .filter(|(i, _)| *i + 1 == observations.len() || rng.gen_bool(0.7))
            .map(|(_, o)| o.clone())
            .collect();
        let mut gamma = vec![Vec::new(); n];
        for (w, (_, members)) in kept.iter().enumerate() {
            for &y in members {
                gamma[y].push(w);
            }
        }
        if gamma.iter().any(|g| g.len() < 2) {
            continue;
        }
        let map = MultiValuedMap::new(
            labels,
            kept.iter().map(|(l, _)| l.clone()).collect(),
            gamma,
        )
        .unwrap();
        if map.validate_unknown_ip().is_empty() {
            return map;
        }
    }
}

/// A CAR-admissible map over `n` facts together with its coefficients.
pub fn random_car_map(rng: &mut ChaCha8Rng, n: usize) -> (MultiValuedMap, CarCoefficients) {
    let labels: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
    let map = match rng.gen_range(0..3) {
        0 => MultiValuedMap::identity(&labels).unwrap(),
        1 => MultiValuedMap::pure_missingness(&labels).unwrap(),
        _ => {
            // Everything fully coarsened: one observation covering all facts.
            MultiValuedMap::new(
                labels.clone(),
                vec!["[all]".to_string()],
                (0..n).map(|_| vec![0]).collect(),
            )
            .unwrap()
        }
    };
    match car_admissibility(&map).unwrap() {
        CarAdmissibility::Feasible(alpha) => (map, alpha),
        CarAdmissibility::Infeasible { .. } => unreachable!("generated maps are admissible"),
    }
}

/// A credal set with 1-3 vertices; some entries may be exactly zero so that
/// zero-upper-probability completions appear.
pub fn random_credal(rng: &mut ChaCha8Rng, space: &Arc<ProductSpace>) -> CredalSet {
    let nv = rng.gen_range(1..=3);
    let cells = space.cell_count();
    let vertices = (0..nv)
        .map(|_| loop {
            let mut mass: Vec<f64> = (0..cells)
                .map(|_| {
                    if rng.gen_bool(0.15) {
                        0.0
                    } else {
                        rng.gen_range(0.05..1.0)
                    }
                })
                .collect();
            let total: f64 = mass.iter().sum();
            if total < 0.05 {
                continue;
            }
            for m in &mut mass {
                *m /= total;
            }
            break LinearPrevision::new_renormalizing(space, mass).unwrap();
        })
        .collect();
    CredalSet::new(vertices).unwrap()
}

pub fn random_gamble(rng: &mut ChaCha8Rng, space: &Arc<ProductSpace>, scope: &[usize]) -> Gamble {
    let sub = space.subspace(scope).unwrap();
    let values: Vec<f64> = (0..sub.cell_count())
        .map(|_| rng.gen_range(-5.0..5.0))
        .collect();
    Gamble::new(space, scope, values).unwrap()
}

/// A full random instance for the equivalence suite. The observation indices
/// are drawn uniformly; callers skip instances whose observation is
/// impossible under the drawn credal set.
pub fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let nz = rng.gen_range(2..=3);
    let nb = rng.gen_range(2..=3);
    let nh = rng.gen_range(1..=3);
    let space = three_block_space(nz, nb, nh);
    let k1 = random_credal(rng, &space);
    let g = random_gamble(rng, &space, &[0]);
    let gamma_bar = random_unknown_map(rng, nb);
    let (gamma_hat, alpha) = random_car_map(rng, nh);
    let wbar = rng.gen_range(0..gamma_bar.observations().len());
    let what = rng.gen_range(0..gamma_hat.observations().len());
    Instance {
        k1,
        g,
        unknown_vars: vec![1],
        gamma_bar,
        wbar,
        car_vars: vec![2],
        gamma_hat,
        what,
        alpha,
    }
}
