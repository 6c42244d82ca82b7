//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line (run with `--nocapture` to see them on success).

mod common;

use std::sync::Arc;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use ipcir::cir::{self, ObservationSpec};
use ipcir::classifier::{
    nb_train, ncc2_predict, smoking_complete_csv, smoking_incomplete_csv, xor_demo, FeatureCell,
    IpDriftScenario, LabeledSample,
};
use ipcir::cohgraph::{
    a1plus_partition_check, asia_collection, build_graph, classify, compatible_order,
    order_is_compatible, CollectionSpec, GraphClass,
};
use ipcir::conditional::{coherence_witness_sup, point_mass_table, ConditionalTable};
use ipcir::config::Config;
use ipcir::credal::CredalSet;
use ipcir::error::Error;
use ipcir::gamble::Gamble;
use ipcir::incompleteness::{
    car_admissibility, inconsistent_example_map, CarAdmissibility, MultiValuedMap,
};
use ipcir::net::{asia_net, query_cir, EvidenceItem, EvidenceSpec};
use ipcir::parametric::{
    beta_posterior_mean, cir_parametric, dataset3, imprecise_beta_interval, mar_baseline,
    PriorPolicy,
};
use ipcir::prevision::LinearPrevision;
use ipcir::products::strong_product;
use ipcir::space::{Event, ProductSpace, VariableSpec};

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {id:2} ({name}): {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

/// Criterion 1: the chest-clinic walkthrough reproduces every published
/// posterior within +/- 0.0015, in under a second.
#[test]
fn criterion_01_asia_golden_suite() {
    let started = Instant::now();
    let net = asia_net();
    let cfg = Config::default();
    let observed = |var: &str, value: &str| EvidenceItem::Observed {
        var: var.into(),
        value: value.into(),
    };
    let vk_cells = vec![
        vec!["v'".to_string(), "k''".to_string()],
        vec!["v''".to_string(), "k'".to_string()],
    ];
    let bounds = |items: Vec<EvidenceItem>, target: &str, state: &str| -> (f64, f64) {
        let out = query_cir(&net, target, &EvidenceSpec { items }, None, &cfg).unwrap();
        let post = out.iter().find(|p| p.state == state).unwrap();
        (post.result.lower, post.result.upper)
    };

    // Step 1: (V, K) coarsened by an unknown process.
    let unknown_vk = |extra: Vec<EvidenceItem>| {
        let mut items = vec![
            EvidenceItem::CoarsenedUnknown {
                vars: vec!["V".into(), "K".into()],
                cells: vk_cells.clone(),
            },
            observed("H", "h''"),
            observed("A", "a'"),
        ];
        items.extend(extra);
        items
    };
    let (r_lo, r_hi) = bounds(unknown_vk(vec![]), "R", "r'");
    let (b_lo, b_hi) = bounds(unknown_vk(vec![]), "B", "b'");
    // Step 2: the completion resolved by asking the patient.
    let resolved = |extra: Vec<EvidenceItem>| {
        let mut items = vec![
            observed("V", "v'"),
            observed("K", "k''"),
            observed("H", "h''"),
            observed("A", "a'"),
        ];
        items.extend(extra);
        items
    };
    let (r2, _) = bounds(resolved(vec![]), "R", "r'");
    let (b2, _) = bounds(resolved(vec![]), "B", "b'");
    let (r3, _) = bounds(resolved(vec![observed("L", "l'")]), "R", "r'");
    let (b3, _) = bounds(resolved(vec![observed("L", "l'")]), "B", "b'");
    // Step 3: the same coarsening treated as CAR, without and with X-rays.
    let car_vk = |extra: Vec<EvidenceItem>| {
        let mut items = vec![
            EvidenceItem::CoarsenedCar {
                vars: vec!["V".into(), "K".into()],
                cells: vk_cells.clone(),
            },
            observed("H", "h''"),
            observed("A", "a'"),
        ];
        items.extend(extra);
        items
    };
    let (r4, _) = bounds(car_vk(vec![]), "R", "r'");
    let (b4, _) = bounds(car_vk(vec![]), "B", "b'");
    let (r5, _) = bounds(car_vk(vec![observed("L", "l'")]), "R", "r'");

    let elapsed = started.elapsed();
    let checks = [
        (r_lo, 0.052),
        (r_hi, 0.423),
        (b_lo, 0.042),
        (b_hi, 0.258),
        (r2, 0.052),
        (b2, 0.258),
        (r3, 0.151),
        (b3, 0.754),
        (r4, 0.418),
        (b4, 0.045),
        (r5, 0.859),
    ];
    let worst = checks
        .iter()
        .map(|(got, want)| (got - want).abs())
        .fold(0.0f64, f64::max);
    let pass = worst <= 0.0015 && elapsed.as_secs_f64() < 1.0;
    report(
        1,
        "asia golden suite",
        pass,
        &format!("worst |err| {worst:.2e}, elapsed {:.0?}", elapsed),
    );
}

/// Criterion 2: conjugate-Beta arithmetic is exact.
#[test]
fn criterion_02_imprecise_beta() {
    let mean = beta_posterior_mean(1.0, 0.5, 1, 3).unwrap();
    let (lo, hi) = imprecise_beta_interval(1.0, 1, 3).unwrap();
    let pass = (mean - 0.375).abs() < 1e-12 && (lo - 0.25).abs() < 1e-12 && (hi - 0.5).abs() < 1e-12;
    report(
        2,
        "imprecise beta",
        pass,
        &format!("mean {mean}, interval [{lo}, {hi}]"),
    );
}

/// Criterion 3: the inconsistent four-fact map is rejected, the two-fact
/// missingness map admits coefficients satisfying its normalization.
#[test]
fn criterion_03_car_admissibility() {
    let bad = car_admissibility(&inconsistent_example_map()).unwrap();
    let bad_ok = matches!(bad, CarAdmissibility::Infeasible { .. });

    let labels = vec!["1".to_string(), "2".to_string()];
    let map = MultiValuedMap::pure_missingness(&labels).unwrap();
    let good = car_admissibility(&map).unwrap();
    let good_ok = match &good {
        CarAdmissibility::Feasible(alpha) => {
            let sums_ok = (0..2).all(|y| {
                let s: f64 = map.gamma(y).iter().map(|&w| alpha.alpha[w]).sum();
                (s - 1.0).abs() <= 1e-9
            });
            sums_ok && alpha.alpha.iter().all(|&a| a > 1e-9)
        }
        _ => false,
    };
    report(
        3,
        "car admissibility",
        bad_ok && good_ok,
        &format!("inconsistent map infeasible: {bad_ok}, missingness map feasible: {good_ok}"),
    );
}

/// Criterion 4: the engine and the explicit-joint conditioning agree on 100+
/// randomized instances within 1e-9, in under 30 seconds.
#[test]
fn criterion_04_joint_equivalence() {
    let started = Instant::now();
    let cfg = Config::default();
    let mut rng = ChaCha8Rng::seed_from_u64(20090211);
    let mut checked = 0;
    let mut attempts = 0;
    let mut worst = 0.0f64;
    while checked < 100 {
        attempts += 1;
        assert!(attempts < 3000, "random generator starved");
        let inst = common::random_instance(&mut rng);
        let cmp = match cir::theorem1_oracle(
            &inst.k1,
            &inst.g,
            &inst.unknown_vars,
            &inst.gamma_bar,
            inst.wbar,
            &inst.car_vars,
            &inst.gamma_hat,
            inst.what,
            &inst.alpha,
            &cfg,
        ) {
            Ok(cmp) => cmp,
            Err(Error::ObservationImpossible) | Err(Error::ZeroUpperProbability { .. }) => {
                continue
            }
            Err(e) => panic!("unexpected error {e}"),
        };
        worst = worst
            .max((cmp.cir.lower - cmp.oracle_lower).abs())
            .max((cmp.cir.upper - cmp.oracle_upper).abs());
        checked += 1;
    }
    let elapsed = started.elapsed();
    let pass = worst < 1e-9 && elapsed.as_secs_f64() < 30.0;
    report(
        4,
        "joint-conditioning equivalence",
        pass,
        &format!("{checked} instances, worst gap {worst:.2e}, elapsed {:.1?}", elapsed),
    );
}

/// Criterion 5: no sampled convex mixture beats vertex minimization in
/// conditioning, on 100+ credal sets with 10^4 samples each.
#[test]
fn criterion_05_vertex_exactness() {
    let cfg = Config::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let space = common::three_block_space(2, 2, 1);
    let mut done = 0;
    let mut worst_violation = 0.0f64;
    while done < 100 {
        let k = common::random_credal(&mut rng, &space);
        let f = common::random_gamble(&mut rng, &space, &[0, 1]);
        let cells: Vec<usize> = space.cells().filter(|_| rng.gen_bool(0.6)).collect();
        if cells.is_empty() {
            continue;
        }
        let b = Event::from_cells(&space, &cells).unwrap();
        let Ok(re) = k.regular_extension_with(&b, &f, cfg.eps_zero) else {
            continue;
        };
        let nv = k.vertices().len();
        let cellsn = space.cell_count();
        for _ in 0..10_000 {
            let mut weights: Vec<f64> = (0..nv).map(|_| rng.gen_range(0.0..1.0f64)).collect();
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            let mut pb = 0.0;
            let mut pfb = 0.0;
            for c in 0..cellsn {
                if b.contains(c) {
                    let m: f64 = weights
                        .iter()
                        .zip(k.vertices())
                        .map(|(w, v)| w * v.mass()[c])
                        .sum();
                    pb += m;
                    pfb += m * f.value(c);
                }
            }
            if pb > cfg.eps_zero {
                let gap = re - pfb / pb;
                worst_violation = worst_violation.max(gap);
            }
        }
        done += 1;
    }
    let pass = worst_violation <= 1e-9;
    report(
        5,
        "vertex exactness of conditioning",
        pass,
        &format!("{done} credal sets x 10^4 mixtures, worst violation {worst_violation:.2e}"),
    );
}

/// Criterion 6: the parametric walkthrough's envelope and its ignore-the-
/// incompleteness baseline.
#[test]
fn criterion_06_parametric_cir() {
    let cfg = Config::default();
    let sample = dataset3();
    let r = cir_parametric(&sample, 1.0, PriorPolicy::Perks, &cfg).unwrap();
    let mar = mar_baseline(&sample, 1.0, &cfg).unwrap();
    let lower_ok = (r.lower - 0.50).abs() <= 0.01;
    let upper_ok = (0.82..=0.92).contains(&r.upper);
    let mar_ok = (0.81..=0.91).contains(&mar);
    report(
        6,
        "parametric conservative inference",
        lower_ok && upper_ok && mar_ok,
        &format!("lower {:.4}, upper {:.4}, baseline {:.4}", r.lower, r.upper, mar),
    );
}

/// Criterion 7: the classification walkthrough; determinate where the data
/// is complete, posterior 0.9 and full indeterminacy where it is not.
#[test]
fn criterion_07_classifier_suite() {
    let cfg = Config::default();
    let complete = LabeledSample::from_csv(smoking_complete_csv(), None).unwrap();
    let incomplete =
        LabeledSample::from_csv(smoking_incomplete_csv(), Some(&complete)).unwrap();
    // State indices by first appearance: r' = 0, h'' = 0, h' = 1, k' = 0.
    let instances = [
        ([FeatureCell::Obs(0), FeatureCell::Obs(1)], 0), // (r', h') -> k'
        ([FeatureCell::Obs(0), FeatureCell::Obs(0)], 0), // (r', h'') -> k'
        ([FeatureCell::Obs(1), FeatureCell::Obs(1)], 1), // (r'', h') -> k''
        ([FeatureCell::Obs(1), FeatureCell::Obs(0)], 1), // (r'', h'') -> k''
    ];
    let model = nb_train(&complete, 1.0).unwrap();
    let mut ok = true;
    for (inst, want) in &instances {
        let (got, _) = model.predict(inst).unwrap();
        ok &= got == *want;
        let credal = ncc2_predict(&complete, inst, 1.0, &cfg).unwrap();
        ok &= credal.determinate && credal.class_set == vec![*want];
    }
    // Unknown-missing cancer column in both instances to classify.
    let q_h_prime = [FeatureCell::Unknown, FeatureCell::Obs(1)];
    let q_h_second = [FeatureCell::Unknown, FeatureCell::Obs(0)];
    let inc_model = nb_train(&incomplete, 1.0).unwrap();
    let (c1, p1) = inc_model
        .predict(&[FeatureCell::Car, FeatureCell::Obs(1)])
        .unwrap();
    let (c2, p2) = inc_model
        .predict(&[FeatureCell::Car, FeatureCell::Obs(0)])
        .unwrap();
    let nb_ok = c1 == 1 && c2 == 0 && (p1[c1] - 0.9).abs() <= 0.1 && (p2[c2] - 0.9).abs() <= 0.1;
    let full1 = ncc2_predict(&incomplete, &q_h_prime, 1.0, &cfg).unwrap();
    let full2 = ncc2_predict(&incomplete, &q_h_second, 1.0, &cfg).unwrap();
    let credal_ok = full1.class_set == vec![0, 1] && full2.class_set == vec![0, 1];
    report(
        7,
        "classifier qualitative suite",
        ok && nb_ok && credal_ok,
        &format!(
            "complete determinate: {ok}, point posteriors {:.3}/{:.3}, set-valued full: {credal_ok}",
            p1[c1], p2[c2]
        ),
    );
}

/// Criterion 8: the masking-drift demonstration flips the point classifier
/// from perfect to always-wrong while the set-valued one keeps the truth.
#[test]
fn criterion_08_xor_drift() {
    let cfg = Config::default();
    let scenario = IpDriftScenario::classic(cfg.seed, 1000, 1000);
    let r = xor_demo(&scenario, 1.0, &cfg).unwrap();
    let acc_ok = r.train_phase.nb_qm_accuracy == Some(1.0)
        && r.deploy_phase.nb_qm_accuracy == Some(0.0);
    let containment_ok = r.train_phase.cir_containment == Some(1.0)
        && r.deploy_phase.cir_containment == Some(1.0);
    report(
        8,
        "distribution-drift demo",
        acc_ok && containment_ok,
        &format!(
            "train acc {:?}, deploy acc {:?}, containment {:?}/{:?}",
            r.train_phase.nb_qm_accuracy,
            r.deploy_phase.nb_qm_accuracy,
            r.train_phase.cir_containment,
            r.deploy_phase.cir_containment
        ),
    );
}

/// Criterion 9: structural classification of the signature collections.
#[test]
fn criterion_09_coherence_graphs() {
    let asia = asia_collection();
    let asia_ok = classify(&build_graph(&asia).unwrap()) == GraphClass::A1Plus
        && a1plus_partition_check(&asia)
        && compatible_order(&asia)
            .map(|o| order_is_compatible(&asia, &o))
            .unwrap_or(false);

    // Parameter with per-unit data hanging off it.
    let parametric = CollectionSpec::new(
        4,
        vec![
            (vec![0], vec![]),
            (vec![1], vec![0]),
            (vec![2], vec![0]),
            (vec![3], vec![0]),
        ],
    )
    .unwrap();
    // The same with per-unit observation variables.
    let parametric_obs = CollectionSpec::new(
        5,
        vec![
            (vec![0], vec![]),
            (vec![1], vec![0]),
            (vec![2], vec![0]),
            (vec![3], vec![1]),
            (vec![4], vec![2]),
        ],
    )
    .unwrap();
    // Classification: parameter, per-unit class and features, observations,
    // and the unit to classify.
    let classification = CollectionSpec::new(
        6,
        vec![
            (vec![0], vec![]),
            (vec![1], vec![0]),
            (vec![2], vec![0, 1]),
            (vec![3], vec![2]),
            (vec![4], vec![0]),
            (vec![5], vec![4]),
        ],
    )
    .unwrap();
    let chains_ok = [&parametric, &parametric_obs, &classification]
        .iter()
        .all(|spec| classify(&build_graph(spec).unwrap()) == GraphClass::A1Plus);

    let two_parents = CollectionSpec::new(
        2,
        vec![(vec![1], vec![0]), (vec![1], vec![])],
    )
    .unwrap();
    let other_ok = classify(&build_graph(&two_parents).unwrap()) == GraphClass::Other;
    report(
        9,
        "coherence graphs",
        asia_ok && chains_ok && other_ok,
        &format!("asia A1+: {asia_ok}, chains A1+: {chains_ok}, counterexample Other: {other_ok}"),
    );
}

/// Criterion 10: the contradictory-assessment witness evaluates strictly
/// negative on every admissible set.
#[test]
fn criterion_10_witness_regression() {
    let space = ProductSpace::new(vec![
        VariableSpec::new("X1", vec!["1".into(), "2".into(), "3".into()]).unwrap(),
        VariableSpec::new("X2", vec!["1".into(), "2".into(), "3".into()]).unwrap(),
    ])
    .unwrap();
    let t_x1_given_x2 =
        point_mass_table(&space, &[0], &[1], &[vec![1], vec![0], vec![2]]).unwrap();
    let t_x2_given_x1 =
        point_mass_table(&space, &[1], &[0], &[vec![0], vec![1], vec![2]]).unwrap();
    let f1 = Gamble::indicator(
        &Event::from_tuples(&space, &[0, 1], &[vec![0, 1], vec![1, 0]]).unwrap(),
    );
    let f2 = Gamble::indicator(
        &Event::from_tuples(&space, &[0, 1], &[vec![0, 0], vec![1, 1]]).unwrap(),
    );
    let f3 = Gamble::constant(&space, 0.0).unwrap();
    let reportw = coherence_witness_sup(
        &[t_x1_given_x2, t_x2_given_x1],
        &[f1, f2],
        1,
        &f3,
        &[0],
    )
    .unwrap();
    let max_sup = reportw
        .candidates
        .iter()
        .map(|c| c.sup)
        .fold(f64::NEG_INFINITY, f64::max);
    report(
        10,
        "incoherence witness",
        reportw.incoherence_witnessed && max_sup < 0.0,
        &format!("{} candidate sets, max sup {max_sup}", reportw.candidates.len()),
    );
}

/// Criterion 11: the axiom suites at 1000 randomized cases each.
#[test]
fn criterion_11_axiom_suites() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cfg = Config::default();
    let tol = 1e-9;
    let cases = 1000;

    let mut failures: Vec<String> = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            failures.push(name.to_string());
        }
    };

    // Unconditional axioms, conjugacy, dominance.
    for _ in 0..cases {
        let space = common::three_block_space(
            rng.gen_range(2..=3),
            rng.gen_range(1..=3),
            rng.gen_range(1..=2),
        );
        let k = common::random_credal(&mut rng, &space);
        let all: Vec<usize> = (0..space.num_variables()).collect();
        let f = common::random_gamble(&mut rng, &space, &all);
        let g = common::random_gamble(&mut rng, &space, &all);
        let lambda = rng.gen_range(1e-3..10.0);
        let lf = k.lower_prevision(&f).unwrap();
        check("C1", lf >= f.min_value() - tol);
        check(
            "C2",
            (k.lower_prevision(&f.scale(lambda)).unwrap() - lambda * lf).abs()
                <= tol * (1.0 + lambda * lf.abs()),
        );
        check(
            "C3",
            k.lower_prevision(&f.add(&g).unwrap()).unwrap()
                >= lf + k.lower_prevision(&g).unwrap() - tol,
        );
        check(
            "conjugacy",
            k.upper_prevision(&f).unwrap() == -k.lower_prevision(&f.neg()).unwrap(),
        );
        check(
            "dominance",
            k.vertices()
                .iter()
                .all(|p| p.expectation(&f).unwrap() >= lf - tol),
        );
    }

    // Conditional axioms for regular extension.
    let mut done = 0;
    while done < cases {
        let space = common::three_block_space(2, 2, 2);
        let k = common::random_credal(&mut rng, &space);
        let all: Vec<usize> = (0..space.num_variables()).collect();
        let f = common::random_gamble(&mut rng, &space, &all);
        let g = common::random_gamble(&mut rng, &space, &all);
        let cells: Vec<usize> = space.cells().filter(|_| rng.gen_bool(0.5)).collect();
        if cells.is_empty() {
            continue;
        }
        let b = Event::from_cells(&space, &cells).unwrap();
        let Ok(re_f) = k.regular_extension_with(&b, &f, cfg.eps_zero) else {
            continue;
        };
        let inf_b = b.cells().map(|c| f.value(c)).fold(f64::INFINITY, f64::min);
        check("SC1", re_f >= inf_b - tol);
        let lambda = rng.gen_range(1e-3..10.0);
        check(
            "SC2",
            (k.regular_extension_with(&b, &f.scale(lambda), cfg.eps_zero).unwrap()
                - lambda * re_f)
                .abs()
                <= tol * (1.0 + lambda * re_f.abs()),
        );
        check(
            "SC3",
            k.regular_extension_with(&b, &f.add(&g).unwrap(), cfg.eps_zero)
                .unwrap()
                >= re_f + k.regular_extension_with(&b, &g, cfg.eps_zero).unwrap() - tol,
        );
        done += 1;
    }

    // Mediant inequality.
    for _ in 0..cases {
        let n = rng.gen_range(1..12);
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-50.0..50.0)).collect();
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(1e-3..50.0)).collect();
        let min_ratio = b
            .iter()
            .zip(&c)
            .map(|(bi, ci)| bi / ci)
            .fold(f64::INFINITY, f64::min);
        let total = b.iter().sum::<f64>() / c.iter().sum::<f64>();
        check("mediant", min_ratio <= total + tol);
    }

    // Strong product restricted to the first marginal's variables.
    for _ in 0..cases {
        let space = ProductSpace::new(vec![
            VariableSpec::new("X", vec!["0".into(), "1".into()]).unwrap(),
            VariableSpec::new("Y", vec!["0".into(), "1".into()]).unwrap(),
        ])
        .unwrap();
        let tx = random_marginal_table(&mut rng, &space, 0);
        let ty = random_marginal_table(&mut rng, &space, 1);
        let direct = tx.row(0).clone();
        let sp = strong_product(&[tx, ty], &cfg).unwrap();
        let f = common::random_gamble(&mut rng, &space, &[0]);
        let sub = space.subspace(&[0]).unwrap();
        let f_sub = Gamble::new(
            &sub,
            &[0],
            (0..sub.cell_count())
                .map(|c| f.value(c * space.stride(0)))
                .collect(),
        )
        .unwrap();
        check(
            "strong-product marginal",
            (sp.lower_prevision(&f).unwrap() - direct.lower_prevision(&f_sub).unwrap()).abs()
                <= tol,
        );
    }

    // Monotonicity in information.
    let mut done = 0;
    while done < cases {
        let space = common::three_block_space(2, 3, 1);
        let k = common::random_credal(&mut rng, &space);
        let f = common::random_gamble(&mut rng, &space, &[0]);
        let all: Vec<Vec<usize>> = (0..3).map(|s| vec![s]).collect();
        let kept: Vec<Vec<usize>> = all.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
        if kept.is_empty() {
            continue;
        }
        let big = ObservationSpec::unknown_only(&space, &[1], all).unwrap();
        let small = ObservationSpec::unknown_only(&space, &[1], kept).unwrap();
        let (Ok(rb), Ok(rs)) = (
            cir::cir_lower(&k, &f, &big, &cfg),
            cir::cir_lower(&k, &f, &small, &cfg),
        ) else {
            continue;
        };
        check("monotonicity", rs.lower >= rb.lower - tol && rs.upper <= rb.upper + tol);
        done += 1;
    }

    report(
        11,
        "axiom property suites",
        failures.is_empty(),
        &format!("violations: {failures:?}"),
    );
}

fn random_marginal_table(
    rng: &mut ChaCha8Rng,
    space: &Arc<ProductSpace>,
    var: usize,
) -> ConditionalTable {
    let sub = space.subspace(&[var]).unwrap();
    let nv = rng.gen_range(1..=3);
    let vertices = (0..nv)
        .map(|_| {
            let raw: Vec<f64> = (0..sub.cell_count())
                .map(|_| rng.gen_range(0.05..1.0))
                .collect();
            let total: f64 = raw.iter().sum();
            LinearPrevision::new_renormalizing(
                &sub,
                raw.iter().map(|x| x / total).collect(),
            )
            .unwrap()
        })
        .collect();
    ConditionalTable::unconditional(space, &[var], CredalSet::new(vertices).unwrap()).unwrap()
}
