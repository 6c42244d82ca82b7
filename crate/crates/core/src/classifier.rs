//! Pattern classification under incompleteness: naive Bayes with a
//! symmetric smoothing prior, a credal set-of-classifiers extension that
//! unions predictions over completions and prior extremes, and the
//! distribution-drift demonstration for non-identically-distributed
//! incompleteness processes.
//!
//! Smoothing convention (both classifiers): with prior strength `s` and
//! class weights `t(c)` summing to one, the class marginal is
//! `(n_c + s t(c)) / (N + s)` and a feature conditional is
//! `(n_{f,c} + s t(c) a) / (n_{obs f,c} + s t(c))`, where `a` is the share
//! of `t(c)` allocated to the observed feature state. The point classifier
//! uses uniform weights and shares; the credal classifier lets each weight
//! and share range over its interval and enumerates the extreme points.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::space::VariableSpec;

/// One feature cell of a unit or of an instance to classify.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureCell {
    Obs(usize),
    /// Missing through a CAR process: skipped in counts, dropped from
    /// instances.
    Car,
    /// Missing through an unknown process: enumerated.
    Unknown,
}

#[derive(Debug, Clone)]
pub struct Unit {
    pub cells: Vec<FeatureCell>,
    pub class: usize,
}

/// A labeled sample: finite-state features plus an always-observed class.
#[derive(Debug, Clone)]
pub struct LabeledSample {
    pub features: Vec<VariableSpec>,
    pub class: VariableSpec,
    pub units: Vec<Unit>,
}

impl LabeledSample {
    pub fn new(features: Vec<VariableSpec>, class: VariableSpec, units: Vec<Unit>) -> Result<Self> {
        if units.is_empty() {
            return Err(Error::InvalidSample("no units".into()));
        }
        if class.arity() < 2 {
            return Err(Error::InvalidSample("class needs at least two states".into()));
        }
        for u in &units {
            if u.cells.len() != features.len() {
                return Err(Error::InvalidSample("unit arity mismatch".into()));
            }
            if u.class >= class.arity() {
                return Err(Error::InvalidSample("class index out of range".into()));
            }
            for (f, c) in features.iter().zip(&u.cells) {
                if let FeatureCell::Obs(s) = c {
                    if *s >= f.arity() {
                        return Err(Error::InvalidSample(format!(
                            "state index {s} out of range for feature {}",
                            f.name
                        )));
                    }
                }
            }
        }
        Ok(LabeledSample {
            features,
            class,
            units,
        })
    }

    /// Parses CSV whose header names the features and, last, the class.
    /// Cells hold a state label, `?` (unknown-missing) or `*` (CAR-missing);
    /// the class must always be a label. State sets are inferred by first
    /// appearance unless `schema` repeats a previously parsed sample's.
    pub fn from_csv(text: &str, schema: Option<&LabeledSample>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader.headers()?.clone();
        if headers.len() < 2 {
            return Err(Error::Parse("need at least one feature and a class".into()));
        }
        let nf = headers.len() - 1;
        let mut feature_states: Vec<Vec<String>> = vec![Vec::new(); nf];
        let mut class_states: Vec<String> = Vec::new();
        if let Some(s) = schema {
            if s.features.len() != nf {
                return Err(Error::Parse("column count differs from schema".into()));
            }
            for (k, f) in s.features.iter().enumerate() {
                feature_states[k] = f.states.clone();
            }
            class_states = s.class.states.clone();
        }
        let locked = schema.is_some();
        let mut units = Vec::new();
        for record in reader.records() {
            let record = record?;
            if record.len() != headers.len() {
                return Err(Error::Parse("ragged row".into()));
            }
            let mut cells = Vec::with_capacity(nf);
            for k in 0..nf {
                let raw = record.get(k).unwrap_or("");
                let cell = match raw {
                    "?" => FeatureCell::Unknown,
                    "*" => FeatureCell::Car,
                    label => {
                        let states = &mut feature_states[k];
                        if let Some(i) = states.iter().position(|s| s == label) {
                            FeatureCell::Obs(i)
                        } else if locked {
                            return Err(Error::Parse(format!(
                                "unknown state `{label}` for feature `{}`",
                                headers.get(k).unwrap_or("")
                            )));
                        } else {
                            states.push(label.to_string());
                            FeatureCell::Obs(states.len() - 1)
                        }
                    }
                };
                cells.push(cell);
            }
            let raw_class = record.get(nf).unwrap_or("");
            if raw_class == "?" || raw_class == "*" {
                return Err(Error::InvalidSample("class cell is missing".into()));
            }
            let class = if let Some(i) = class_states.iter().position(|s| s == raw_class) {
                i
            } else if locked {
                return Err(Error::Parse(format!("unknown class `{raw_class}`")));
            } else {
                class_states.push(raw_class.to_string());
                class_states.len() - 1
            };
            units.push(Unit { cells, class });
        }
        // Degenerate columns still need two states to be a variable.
        for (k, states) in feature_states.iter_mut().enumerate() {
            while states.len() < 2 {
                states.push(format!("__{}{}", headers.get(k).unwrap_or("f"), states.len()));
            }
        }
        while class_states.len() < 2 {
            class_states.push(format!("__c{}", class_states.len()));
        }
        let features = headers
            .iter()
            .take(nf)
            .zip(feature_states)
            .map(|(name, states)| VariableSpec::new(name, states))
            .collect::<Result<Vec<_>>>()?;
        let class = VariableSpec::new(&headers[nf], class_states)?;
        LabeledSample::new(features, class, units)
    }

    fn unknown_positions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, u) in self.units.iter().enumerate() {
            for (k, c) in u.cells.iter().enumerate() {
                if *c == FeatureCell::Unknown {
                    out.push((i, k));
                }
            }
        }
        out
    }
}

/// Count tables of a trained classifier.
#[derive(Debug, Clone)]
pub struct NbModel {
    pub n_units: usize,
    pub class_counts: Vec<u64>,
    /// `feat_counts[feature][class][state]`, observed cells only.
    pub feat_counts: Vec<Vec<Vec<u64>>>,
    /// `feat_obs[feature][class]`: observed cells per feature and class.
    pub feat_obs: Vec<Vec<u64>>,
    pub s: f64,
    pub class_arity: usize,
    pub feature_arities: Vec<usize>,
    pub class_states: Vec<String>,
}

/// Trains the point classifier: counts skip missing cells per feature
/// conditional.
pub fn nb_train(sample: &LabeledSample, s: f64) -> Result<NbModel> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameter(format!("prior strength s = {s}")));
    }
    let nc = sample.class.arity();
    let nf = sample.features.len();
    let mut class_counts = vec![0u64; nc];
    let mut feat_counts: Vec<Vec<Vec<u64>>> = sample
        .features
        .iter()
        .map(|f| vec![vec![0u64; f.arity()]; nc])
        .collect();
    let mut feat_obs = vec![vec![0u64; nc]; nf];
    for u in &sample.units {
        class_counts[u.class] += 1;
        for (k, cell) in u.cells.iter().enumerate() {
            if let FeatureCell::Obs(st) = cell {
                feat_counts[k][u.class][*st] += 1;
                feat_obs[k][u.class] += 1;
            }
        }
    }
    Ok(NbModel {
        n_units: sample.units.len(),
        class_counts,
        feat_counts,
        feat_obs,
        s,
        class_arity: nc,
        feature_arities: sample.features.iter().map(|f| f.arity()).collect(),
        class_states: sample.class.states.clone(),
    })
}

impl NbModel {
    /// Joint score of one class for an instance under explicit prior weights
    /// and allocation shares: missing instance features are dropped.
    fn score(
        &self,
        instance: &[FeatureCell],
        class: usize,
        t_class: f64,
        alloc: impl Fn(usize, usize) -> f64,
    ) -> f64 {
        let st = self.s * t_class;
        let mut score = (self.class_counts[class] as f64 + st) / (self.n_units as f64 + self.s);
        for (k, cell) in instance.iter().enumerate() {
            if let FeatureCell::Obs(v) = cell {
                let num = self.feat_counts[k][class][*v] as f64 + st * alloc(k, class);
                let den = self.feat_obs[k][class] as f64 + st;
                score *= num / den;
            }
        }
        score
    }

    /// Point prediction with uniform class weights and uniform allocation;
    /// returns the winning class and the normalized posterior.
    pub fn predict(&self, instance: &[FeatureCell]) -> Result<(usize, Vec<f64>)> {
        if instance.len() != self.feature_arities.len() {
            return Err(Error::InvalidSample("instance arity mismatch".into()));
        }
        let nc = self.class_arity;
        let scores: Vec<f64> = (0..nc)
            .map(|c| {
                self.score(instance, c, 1.0 / nc as f64, |k, _| {
                    1.0 / self.feature_arities[k] as f64
                })
            })
            .collect();
        let total: f64 = scores.iter().sum();
        let posterior: Vec<f64> = scores.iter().map(|&x| x / total).collect();
        let best = (0..nc)
            .max_by(|&a, &b| {
                scores[a]
                    .partial_cmp(&scores[b])
                    .unwrap()
                    .then(b.cmp(&a)) // ties to the smaller index
            })
            .unwrap();
        Ok((best, posterior))
    }
}

/// A set-valued classification.
#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    /// Class indices in the prediction set.
    pub class_set: Vec<usize>,
    pub class_labels: Vec<String>,
    /// Envelope of the normalized posterior per class, over the enumeration.
    pub intervals: Vec<(f64, f64)>,
    pub determinate: bool,
}

/// The credal classifier: the union of point predictions over all
/// completions of unknown-missing training cells, all completions of
/// unknown-missing instance features, and all prior extreme points. CAR
/// cells are skipped or dropped exactly as in training and point prediction.
/// Restricted to binary classes, where the union of winners is the exact
/// set of undominated classes.
pub fn ncc2_predict(
    sample: &LabeledSample,
    instance: &[FeatureCell],
    s: f64,
    cfg: &Config,
) -> Result<Classification> {
    if sample.class.arity() != 2 {
        return Err(Error::UnsupportedClassArity(sample.class.arity()));
    }
    if instance.len() != sample.features.len() {
        return Err(Error::InvalidSample("instance arity mismatch".into()));
    }
    let train_unknowns = sample.unknown_positions();
    let inst_unknowns: Vec<usize> = instance
        .iter()
        .enumerate()
        .filter_map(|(k, c)| (*c == FeatureCell::Unknown).then_some(k))
        .collect();
    if train_unknowns.len() + inst_unknowns.len() > cfg.max_unknown_cells {
        return Err(Error::EnumerationCapExceeded {
            needed: (train_unknowns.len() + inst_unknowns.len()) as u128,
            cap: cfg.max_unknown_cells as u128,
        });
    }

    let eps = cfg.eps_t;
    let grid = [eps, 1.0 - eps];
    let mut class_set = [false; 2];
    let mut intervals = vec![(f64::INFINITY, f64::NEG_INFINITY); 2];

    let mut train_counter = MixedRadix::new(
        train_unknowns
            .iter()
            .map(|&(_, k)| sample.features[k].arity())
            .collect(),
    );
    loop {
        let assignment = train_counter.digits().to_vec();
        let mut completed = sample.clone();
        for (a, &(i, k)) in assignment.iter().zip(&train_unknowns) {
            completed.units[i].cells[k] = FeatureCell::Obs(*a);
        }
        let model = nb_train(&completed, s)?;

        let mut inst_counter = MixedRadix::new(
            inst_unknowns
                .iter()
                .map(|&k| sample.features[k].arity())
                .collect(),
        );
        loop {
            let mut filled = instance.to_vec();
            for (a, &k) in inst_counter.digits().iter().zip(&inst_unknowns) {
                filled[k] = FeatureCell::Obs(*a);
            }
            // Features entering the decision: observed cells of the filled
            // instance. One allocation share per (feature, class).
            let present: Vec<usize> = filled
                .iter()
                .enumerate()
                .filter_map(|(k, c)| matches!(c, FeatureCell::Obs(_)).then_some(k))
                .collect();
            let n_alloc = 2 * present.len();
            if 1 + n_alloc >= 26 {
                return Err(Error::EnumerationCapExceeded {
                    needed: 1u128 << (1 + n_alloc),
                    cap: 1u128 << 25,
                });
            }
            for prior_bits in 0..(1u32 << (1 + n_alloc)) {
                let t0 = grid[(prior_bits & 1) as usize];
                let t = [t0, 1.0 - t0];
                let alloc = |k: usize, c: usize| -> f64 {
                    let pos = present.iter().position(|&p| p == k).unwrap();
                    let bit = (prior_bits >> (1 + 2 * pos + c)) & 1;
                    grid[bit as usize]
                };
                let s0 = model.score(&filled, 0, t[0], alloc);
                let s1 = model.score(&filled, 1, t[1], alloc);
                let total = s0 + s1;
                let p = [s0 / total, s1 / total];
                for c in 0..2 {
                    intervals[c].0 = intervals[c].0.min(p[c]);
                    intervals[c].1 = intervals[c].1.max(p[c]);
                }
                if s0 >= s1 {
                    class_set[0] = true;
                }
                if s1 >= s0 {
                    class_set[1] = true;
                }
            }
            if !inst_counter.advance() {
                break;
            }
        }
        if !train_counter.advance() {
            break;
        }
    }

    let set: Vec<usize> = (0..2).filter(|&c| class_set[c]).collect();
    let labels = set
        .iter()
        .map(|&c| sample.class.states[c].clone())
        .collect();
    Ok(Classification {
        determinate: set.len() == 1,
        class_labels: labels,
        class_set: set,
        intervals,
    })
}

/// Mixed-radix counter; an empty radix list yields exactly one (empty)
/// assignment.
struct MixedRadix {
    radices: Vec<usize>,
    digits: Vec<usize>,
}

impl MixedRadix {
    fn new(radices: Vec<usize>) -> Self {
        let digits = vec![0; radices.len()];
        MixedRadix { radices, digits }
    }

    fn digits(&self) -> &[usize] {
        &self.digits
    }

    /// Increments; false when wrapped around.
    fn advance(&mut self) -> bool {
        for k in (0..self.digits.len()).rev() {
            self.digits[k] += 1;
            if self.digits[k] < self.radices[k] {
                return true;
            }
            self.digits[k] = 0;
        }
        false
    }
}

/// Per-cell masking probabilities for the second feature, conditional on the
/// true pair `(a, b)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaskKernel {
    /// `mask_prob[a][b]` = probability that `b` is reported as `?`.
    pub mask_prob: [[f64; 2]; 2],
}

impl MaskKernel {
    pub fn validate(&self) -> Result<()> {
        for row in &self.mask_prob {
            for &p in row {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidParameter(format!("mask probability {p}")));
                }
            }
        }
        Ok(())
    }
}

/// The exclusive-or drift scenario: class = a XOR b, only the second feature
/// can be masked, and the masking rule changes between the training phase
/// and the deployment phase.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IpDriftScenario {
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub train_kernel: MaskKernel,
    pub deploy_kernel: MaskKernel,
}

impl IpDriftScenario {
    /// The scenario of record: mask b exactly when (a, b) = (1, 0) while
    /// training, exactly when (a, b) = (1, 1) after deployment.
    pub fn classic(seed: u64, n_train: usize, n_test: usize) -> Self {
        IpDriftScenario {
            seed,
            n_train,
            n_test,
            train_kernel: MaskKernel {
                mask_prob: [[0.0, 0.0], [1.0, 0.0]],
            },
            deploy_kernel: MaskKernel {
                mask_prob: [[0.0, 0.0], [0.0, 1.0]],
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseStats {
    /// Units in the phase's test set showing the pattern (a = 1, b masked).
    pub pattern_count: usize,
    /// Accuracy of the question-mark-as-value point classifier on the
    /// pattern.
    pub nb_qm_accuracy: Option<f64>,
    /// Accuracy of the treat-as-CAR point classifier on the pattern.
    pub nb_mar_accuracy: Option<f64>,
    /// How often the credal classifier's set contains the true class on the
    /// pattern.
    pub cir_containment: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct XorReport {
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub train_phase: PhaseStats,
    pub deploy_phase: PhaseStats,
}

/// One generated record: the true pair, whether the second feature was
/// masked, and the class.
#[derive(Debug, Clone, Copy)]
struct XorRecord {
    a: usize,
    b: usize,
    masked: bool,
    class: usize,
}

fn draw_records(rng: &mut ChaCha8Rng, kernel: &MaskKernel, n: usize) -> Vec<XorRecord> {
    (0..n)
        .map(|_| {
            let a = usize::from(rng.gen_bool(0.5));
            let b = usize::from(rng.gen_bool(0.5));
            let masked = rng.gen_bool(kernel.mask_prob[a][b]);
            XorRecord {
                a,
                b,
                masked,
                class: a ^ b,
            }
        })
        .collect()
}

fn xor_variables(qm_as_value: bool) -> (Vec<VariableSpec>, VariableSpec) {
    let b_states: Vec<String> = if qm_as_value {
        vec!["0".into(), "1".into(), "?".into()]
    } else {
        vec!["0".into(), "1".into()]
    };
    (
        vec![
            VariableSpec::new("A", vec!["0".into(), "1".into()]).unwrap(),
            VariableSpec::new("B", b_states).unwrap(),
        ],
        VariableSpec::new("C", vec!["0".into(), "1".into()]).unwrap(),
    )
}

fn xor_sample(records: &[XorRecord], qm_as_value: bool) -> Result<LabeledSample> {
    let (features, class) = xor_variables(qm_as_value);
    let units = records
        .iter()
        .map(|r| {
            let b_cell = if r.masked {
                if qm_as_value {
                    FeatureCell::Obs(2)
                } else {
                    FeatureCell::Car
                }
            } else {
                FeatureCell::Obs(r.b)
            };
            Unit {
                cells: vec![FeatureCell::Obs(r.a), b_cell],
                class: r.class,
            }
        })
        .collect();
    LabeledSample::new(features, class, units)
}

fn phase_stats(
    qm_model: &NbModel,
    mar_model: &NbModel,
    train_mar: &LabeledSample,
    test: &[XorRecord],
    s: f64,
    cfg: &Config,
) -> Result<PhaseStats> {
    let pattern: Vec<&XorRecord> = test.iter().filter(|r| r.a == 1 && r.masked).collect();
    if pattern.is_empty() {
        return Ok(PhaseStats {
            pattern_count: 0,
            nb_qm_accuracy: None,
            nb_mar_accuracy: None,
            cir_containment: None,
        });
    }
    // The pattern instance is the same for every pattern unit; classify once.
    let (qm_class, _) = qm_model.predict(&[FeatureCell::Obs(1), FeatureCell::Obs(2)])?;
    let (mar_class, _) = mar_model.predict(&[FeatureCell::Obs(1), FeatureCell::Car])?;
    let credal = ncc2_predict(
        train_mar,
        &[FeatureCell::Obs(1), FeatureCell::Unknown],
        s,
        cfg,
    )?;
    let count = pattern.len() as f64;
    let qm_hits = pattern.iter().filter(|r| r.class == qm_class).count() as f64;
    let mar_hits = pattern.iter().filter(|r| r.class == mar_class).count() as f64;
    let contained = pattern
        .iter()
        .filter(|r| credal.class_set.contains(&r.class))
        .count() as f64;
    Ok(PhaseStats {
        pattern_count: pattern.len(),
        nb_qm_accuracy: Some(qm_hits / count),
        nb_mar_accuracy: Some(mar_hits / count),
        cir_containment: Some(contained / count),
    })
}

/// Runs the drift demonstration: trains on data masked by the training
/// kernel, then measures the masked pattern (a = 1, b hidden) on one test
/// set masked by the same kernel and one masked by the deployment kernel.
pub fn xor_demo(scenario: &IpDriftScenario, s: f64, cfg: &Config) -> Result<XorReport> {
    scenario.train_kernel.validate()?;
    scenario.deploy_kernel.validate()?;
    if scenario.n_train == 0 || scenario.n_test == 0 {
        return Err(Error::InvalidParameter("empty phase".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let train = draw_records(&mut rng, &scenario.train_kernel, scenario.n_train);
    let test_train_phase = draw_records(&mut rng, &scenario.train_kernel, scenario.n_test);
    let test_deploy_phase = draw_records(&mut rng, &scenario.deploy_kernel, scenario.n_test);

    let train_qm = xor_sample(&train, true)?;
    let train_mar = xor_sample(&train, false)?;
    let qm_model = nb_train(&train_qm, s)?;
    let mar_model = nb_train(&train_mar, s)?;

    Ok(XorReport {
        seed: scenario.seed,
        n_train: scenario.n_train,
        n_test: scenario.n_test,
        train_phase: phase_stats(
            &qm_model,
            &mar_model,
            &train_mar,
            &test_train_phase,
            s,
            cfg,
        )?,
        deploy_phase: phase_stats(
            &qm_model,
            &mar_model,
            &train_mar,
            &test_deploy_phase,
            s,
            cfg,
        )?,
    })
}

/// The ten-unit complete training sample over cancer, bronchitis and
/// smoking used by the classification walkthroughs (features r, h; class k).
pub fn smoking_complete_csv() -> &'static str {
    "r,h,k\nr',h'',k'\nr',h'',k'\nr',h',k'\nr',h',k'\nr'',h',k'\nr'',h',k''\nr'',h',k''\nr'',h'',k''\nr'',h'',k''\nr',h'',k''\n"
}

/// The same sample with six bronchitis cells hidden by an unknown process.
pub fn smoking_incomplete_csv() -> &'static str {
    "r,h,k\nr',h'',k'\nr',h'',k'\nr',?,k'\nr',?,k'\nr'',?,k'\nr'',h',k''\nr'',h',k''\nr'',?,k''\nr'',?,k''\nr',?,k''\n"
}
