//! Command-line front end: file-based wrappers around the inference
//! library. Every subcommand prints a JSON report (or a plain table with
//! `--format table`) and uses a uniform exit-code contract: 0 ok, 2 bad
//! input, 3 infeasible or impossible conditioning, 4 enumeration caps,
//! 5 non-convergence.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use ipcir::classifier::{
    nb_train, ncc2_predict, xor_demo, IpDriftScenario, LabeledSample,
};
use ipcir::cohgraph::{
    a1plus_partition_check, build_graph, classify, compatible_order, CollectionSpec,
};
use ipcir::config::Config;
use ipcir::error::Error;
use ipcir::gamble::Gamble;
use ipcir::incompleteness::{car_admissibility, CarAdmissibility, MultiValuedMap};
use ipcir::net::{query_cir, DiscreteNet, EvidenceItem, EvidenceSpec, StatePosterior};
use ipcir::parametric::{
    beta_posterior_mean, cir_parametric, imprecise_beta_interval, mar_baseline, PairedSample,
    PriorPolicy,
};

#[derive(Parser)]
#[command(
    name = "ipcir",
    version,
    about = "Imprecise-probability inference under incomplete observations"
)]
struct Cli {
    /// Optional JSON file overriding tolerances, caps and the seed.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Conservative-inference query on a network with tagged evidence.
    Update {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        evidence: PathBuf,
        #[arg(long)]
        target: String,
        /// Optional gamble on the target: JSON {"values": {"state": value}}.
        #[arg(long)]
        gamble: Option<PathBuf>,
    },
    /// Scripted chest-clinic walkthrough on the bundled fixture.
    Asia {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        scenario: u8,
    },
    /// CAR-admissibility check of a multi-valued map.
    CarCheck {
        #[arg(long)]
        map: PathBuf,
    },
    /// Beta posterior mean (with --t) or the imprecise posterior interval.
    Beta {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        n1: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        t: Option<f64>,
    },
    /// Conservative parametric inference on a paired-sample CSV.
    Infer {
        #[arg(long)]
        sample: PathBuf,
        #[arg(long)]
        s: f64,
        /// Treat every unknown tag as CAR and return the single estimate.
        #[arg(long)]
        mar: bool,
        /// Sweep the prior expectation over its near-vacuous extremes.
        #[arg(long)]
        sweep: bool,
    },
    /// Train on one CSV and classify the units of another.
    Classify {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
    },
    /// The masking-drift demonstration.
    XorDemo {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        train: usize,
        #[arg(long, default_value_t = 1000)]
        test: usize,
    },
    /// Classify a collection of conditional-prevision signatures.
    Cohgraph {
        #[arg(long)]
        collection: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Method {
    Nb,
    Ncc2,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("IPCIR_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ObservationImpossible
        | Error::ZeroUpperProbability { .. }
        | Error::ZeroMassEvent { .. }
        | Error::CurPreconditionViolated { .. } => 3,
        Error::EnumerationCapExceeded { .. } | Error::ProblemTooLarge { .. } => 4,
        Error::EmDidNotConverge { .. } => 5,
        _ => 2,
    }
}

fn read_file(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_config(cli_config: &Option<PathBuf>) -> Result<Config, Error> {
    match cli_config {
        None => Ok(Config::default()),
        Some(path) => {
            let text = read_file(path)?;
            let cfg: Config = serde_json::from_str(&text)?;
            Ok(cfg)
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = load_config(&cli.config)?;
    let format = cli.format;
    match cli.command {
        Command::Update {
            model,
            evidence,
            target,
            gamble,
        } => {
            let net = DiscreteNet::from_json(&read_file(&model)?)?;
            let ev: EvidenceSpec = serde_json::from_str(&read_file(&evidence)?)?;
            let g = match &gamble {
                None => None,
                Some(path) => Some(parse_gamble(&net, &target, &read_file(path)?)?),
            };
            let posteriors = query_cir(&net, &target, &ev, g.as_ref(), &cfg)?;
            emit(
                format,
                &json!({
                    "command": "update",
                    "seed": cfg.seed,
                    "target": target,
                    "posteriors": posteriors,
                }),
                |out| {
                    for p in &posteriors {
                        print_posterior(out, &target, p);
                    }
                },
            );
        }
        Command::Asia { scenario } => run_asia(scenario, format, &cfg)?,
        Command::CarCheck { map } => {
            let map = MultiValuedMap::from_json(&read_file(&map)?)?;
            match car_admissibility(&map)? {
                CarAdmissibility::Feasible(alpha) => {
                    let table: Vec<_> = map
                        .observations()
                        .iter()
                        .zip(&alpha.alpha)
                        .map(|(w, a)| json!({"observation": w, "alpha": a}))
                        .collect();
                    emit(
                        format,
                        &json!({
                            "command": "car-check",
                            "seed": cfg.seed,
                            "feasible": true,
                            "alpha": table,
                        }),
                        |out| {
                            out.push_str("feasible\n");
                            for (w, a) in map.observations().iter().zip(&alpha.alpha) {
                                out.push_str(&format!("alpha[{w}] = {a:.6}\n"));
                            }
                        },
                    );
                }
                CarAdmissibility::Infeasible { explanation } => {
                    emit(
                        format,
                        &json!({
                            "command": "car-check",
                            "seed": cfg.seed,
                            "feasible": false,
                            "explanation": explanation,
                        }),
                        |out| {
                            out.push_str(&format!("infeasible: {explanation}\n"));
                        },
                    );
                    return Err(Error::ZeroUpperProbability {
                        max_mass: 0.0,
                        eps: cfg.eps_pos,
                    });
                }
            }
        }
        Command::Beta { s, n1, n, t } => match t {
            Some(t) => {
                let mean = beta_posterior_mean(s, t, n1, n)?;
                emit(
                    format,
                    &json!({
                        "command": "beta",
                        "seed": cfg.seed,
                        "posterior_mean": mean,
                    }),
                    |out| out.push_str(&format!("posterior mean = {mean:.6}\n")),
                );
            }
            None => {
                let (lo, hi) = imprecise_beta_interval(s, n1, n)?;
                emit(
                    format,
                    &json!({
                        "command": "beta",
                        "seed": cfg.seed,
                        "lower": lo,
                        "upper": hi,
                    }),
                    |out| out.push_str(&format!("interval = [{lo:.6}, {hi:.6}]\n")),
                );
            }
        },
        Command::Infer {
            sample,
            s,
            mar,
            sweep,
        } => {
            let sample = PairedSample::from_csv(&read_file(&sample)?, None, None)?;
            let quantity = format!(
                "P(b = {} | v = {})",
                sample.b_states[0], sample.v_states[0]
            );
            if mar {
                let estimate = mar_baseline(&sample, s, &cfg)?;
                emit(
                    format,
                    &json!({
                        "command": "infer",
                        "seed": cfg.seed,
                        "quantity": quantity,
                        "mar_estimate": estimate,
                    }),
                    |out| {
                        out.push_str(&format!("{quantity} (everything CAR) = {estimate:.6}\n"))
                    },
                );
            } else {
                let policy = if sweep {
                    PriorPolicy::ImpreciseSweep
                } else {
                    PriorPolicy::Perks
                };
                let r = cir_parametric(&sample, s, policy, &cfg)?;
                emit(
                    format,
                    &json!({
                        "command": "infer",
                        "seed": cfg.seed,
                        "quantity": quantity,
                        "result": r,
                    }),
                    |out| {
                        out.push_str(&format!(
                            "{quantity} in [{:.6}, {:.6}] over {} completions\n",
                            r.lower,
                            r.upper,
                            r.per_completion.len()
                        ));
                        for c in &r.per_completion {
                            out.push_str(&format!(
                                "  completion {:?}: [{:.6}, {:.6}]\n",
                                c.assignment, c.lower, c.upper
                            ));
                        }
                    },
                );
            }
        }
        Command::Classify {
            train,
            test,
            method,
            s,
        } => {
            let train_sample = LabeledSample::from_csv(&read_file(&train)?, None)?;
            let test_sample = LabeledSample::from_csv(&read_file(&test)?, Some(&train_sample))?;
            let mut records = Vec::new();
            match method {
                Method::Nb => {
                    let model = nb_train(&train_sample, s)?;
                    for unit in &test_sample.units {
                        let (class, posterior) = model.predict(&unit.cells)?;
                        records.push(json!({
                            "prediction": train_sample.class.states[class],
                            "posterior": posterior,
                        }));
                    }
                }
                Method::Ncc2 => {
                    for unit in &test_sample.units {
                        let c = ncc2_predict(&train_sample, &unit.cells, s, &cfg)?;
                        records.push(json!({
                            "prediction_set": c.class_labels,
                            "determinate": c.determinate,
                            "intervals": c.intervals,
                        }));
                    }
                }
            }
            emit(
                format,
                &json!({
                    "command": "classify",
                    "seed": cfg.seed,
                    "records": records,
                }),
                |out| {
                    for (i, r) in records.iter().enumerate() {
                        out.push_str(&format!("unit {i}: {r}\n"));
                    }
                },
            );
        }
        Command::XorDemo { seed, train, test } => {
            let scenario = IpDriftScenario::classic(seed.unwrap_or(cfg.seed), train, test);
            let r = xor_demo(&scenario, 1.0, &cfg)?;
            emit(
                format,
                &json!({
                    "command": "xor-demo",
                    "seed": scenario.seed,
                    "report": r,
                }),
                |out| {
                    let phase = |name: &str, p: &ipcir::classifier::PhaseStats| {
                        format!(
                            "{name}: pattern units {}, accuracy {:?} (as-value) / {:?} (as-CAR), containment {:?}\n",
                            p.pattern_count,
                            p.nb_qm_accuracy,
                            p.nb_mar_accuracy,
                            p.cir_containment
                        )
                    };
                    out.push_str(&phase("train phase", &r.train_phase));
                    out.push_str(&phase("deploy phase", &r.deploy_phase));
                },
            );
        }
        Command::Cohgraph { collection } => {
            let spec: CollectionSpec = serde_json::from_str(&read_file(&collection)?)?;
            spec.validate()?;
            let class = classify(&build_graph(&spec)?);
            let order = compatible_order(&spec).ok();
            let partition = a1plus_partition_check(&spec);
            emit(
                format,
                &json!({
                    "command": "cohgraph",
                    "seed": cfg.seed,
                    "class": class.to_string(),
                    "outputs_partition_variables": partition,
                    "compatible_order": order,
                }),
                |out| {
                    out.push_str(&format!("class = {class}\n"));
                    if let Some(o) = &order {
                        out.push_str(&format!("compatible order = {o:?}\n"));
                    }
                },
            );
        }
    }
    Ok(())
}

/// Prints a JSON value or renders the table closure.
fn emit(format: Format, value: &serde_json::Value, table: impl FnOnce(&mut String)) {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(value).expect("serializes")
        ),
        Format::Table => {
            let mut out = String::new();
            table(&mut out);
            print!("{out}");
        }
    }
}

fn print_posterior(out: &mut String, target: &str, p: &StatePosterior) {
    out.push_str(&format!(
        "P({target} = {}) in [{:.6}, {:.6}]\n",
        p.state, p.result.lower, p.result.upper
    ));
    for d in &p.result.per_completion {
        let line = match (d.supported, d.lower, d.upper) {
            (true, Some(lo), Some(hi)) => {
                format!("  completion {}: [{lo:.6}, {hi:.6}]\n", d.label)
            }
            _ => format!(
                "  completion {}: zero upper probability, skipped\n",
                d.label
            ),
        };
        out.push_str(&line);
    }
}

fn parse_gamble(net: &DiscreteNet, target: &str, text: &str) -> Result<Gamble, Error> {
    #[derive(serde::Deserialize)]
    struct GambleFile {
        values: std::collections::BTreeMap<String, f64>,
    }
    let file: GambleFile = serde_json::from_str(text)?;
    let space = net.space();
    let var = space
        .var_index(target)
        .ok_or_else(|| Error::Parse(format!("unknown target `{target}`")))?;
    let spec = &space.variables()[var];
    let mut values = vec![0.0; spec.arity()];
    for (state, value) in &file.values {
        let idx = spec
            .state_index(state)
            .ok_or_else(|| Error::Parse(format!("unknown state `{state}`")))?;
        values[idx] = *value;
    }
    Gamble::new(space, &[var], values)
}

#[derive(Serialize)]
struct AsiaStep {
    description: String,
    posteriors: Vec<StatePosterior>,
}

fn run_asia(scenario: u8, format: Format, cfg: &Config) -> Result<(), Error> {
    let net = ipcir::net::asia_net();
    let observed = |var: &str, value: &str| EvidenceItem::Observed {
        var: var.into(),
        value: value.into(),
    };
    let vk_cells = vec![
        vec!["v'".to_string(), "k''".to_string()],
        vec!["v''".to_string(), "k'".to_string()],
    ];
    let base = vec![observed("H", "h''"), observed("A", "a'")];
    let mut steps: Vec<AsiaStep> = Vec::new();
    let mut push_step = |description: &str, items: Vec<EvidenceItem>| -> Result<(), Error> {
        let mut posteriors = Vec::new();
        for target in ["R", "B"] {
            let out = query_cir(
                &net,
                target,
                &EvidenceSpec {
                    items: items.clone(),
                },
                None,
                cfg,
            )?;
            posteriors.extend(
                out.into_iter()
                    .filter(|p| p.state == "r'" || p.state == "b'"),
            );
        }
        steps.push(AsiaStep {
            description: description.to_string(),
            posteriors,
        });
        Ok(())
    };
    match scenario {
        1 => {
            let mut items = vec![EvidenceItem::CoarsenedUnknown {
                vars: vec!["V".into(), "K".into()],
                cells: vk_cells,
            }];
            items.extend(base);
            push_step(
                "visit/smoking coarsened to {(v', k''), (v'', k')} by an unknown process; H = h'', A = a'",
                items,
            )?;
        }
        2 => {
            let mut items = vec![observed("V", "v'"), observed("K", "k''")];
            items.extend(base);
            push_step("the completion resolved: V = v', K = k''", items)?;
        }
        3 => {
            let mut items = vec![
                observed("V", "v'"),
                observed("K", "k''"),
                observed("L", "l'"),
            ];
            items.extend(base);
            push_step("abnormal X-rays added under the resolved completion", items)?;
        }
        4 => {
            let mut items = vec![EvidenceItem::CoarsenedCar {
                vars: vec!["V".into(), "K".into()],
                cells: vk_cells.clone(),
            }];
            items.extend(base.clone());
            push_step("the same coarsening treated as CAR (set conditioning)", items)?;
            let mut items = vec![
                EvidenceItem::CoarsenedCar {
                    vars: vec!["V".into(), "K".into()],
                    cells: vk_cells,
                },
                observed("L", "l'"),
            ];
            items.extend(base);
            push_step("CAR treatment with abnormal X-rays added", items)?;
        }
        _ => unreachable!("clap range"),
    }
    emit(
        format,
        &json!({
            "command": "asia",
            "seed": cfg.seed,
            "scenario": scenario,
            "steps": steps,
        }),
        |out| {
            for step in &steps {
                out.push_str(&format!("{}\n", step.description));
                for p in &step.posteriors {
                    let target = if p.state.starts_with('r') { "R" } else { "B" };
                    print_posterior(out, target, p);
                }
            }
        },
    );
    Ok(())
}
