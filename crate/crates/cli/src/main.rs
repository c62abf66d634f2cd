//! `twostage`: command-line driver for the two-stage matching toolkit.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 resource cap.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use twostage_core::crs::{build_star_crs_with, ActiveSetDistribution, MAX_MONOTONE_CHECK};
use twostage_core::instance::{
    make_edge_gap_family, make_eight_cycle, make_random_instance, read_instance, RandomInstanceSpec, TwoStageInstance,
    WeightMode,
};
use twostage_core::lp::{solution_to_json, solve_lp_off, solve_lp_on};
use twostage_core::numeric::{QuadSqrt2, C_EDGE};
use twostage_core::rng::{derive_seed, trial_rng, TrialRng};
use twostage_core::rounding::dependent_round;
use twostage_core::twostage::{
    brute_force_opt_online, default_scale, gap_edge_family, gap_eight_cycle, offline_match_frequencies,
    sample_based_round_augment, sample_size_vertex, GapRow, InstanceSampler, RoundAugmentPolicy, TwoStageError,
};
use twostage_core::verify::{
    estimate_mean, estimate_ratio, star_bound_reports, star_crs_battery, test_negative_dependence,
    vertex_bound_battery, vertex_weighted_battery, BoundReport, Tier, MAX_DEPENDENCE_ELEMENTS,
};

/// Versioned first line of every CSV output.
const CSV_VERSION: &str = "# twostage-csv v1";

#[derive(Parser)]
#[command(
    name = "twostage",
    version,
    about = "Two-stage stochastic bipartite matching experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads for Monte Carlo trials; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    parallel: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// Instance file.
    #[arg(long, conflicts_with = "generate", required_unless_present = "generate")]
    instance: Option<PathBuf>,
    /// Generator: `eight-cycle`, `edge-gap:n=N`, or
    /// `random:seed=S,offline=I,online=A,scenarios=K,mode=M,density=D`.
    #[arg(long)]
    generate: Option<String>,
    /// Weight mode override; `unweighted` drops all weights.
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Args)]
struct MonteCarloArgs {
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    /// First-stage scale; defaults to 1, or 2√2−2 for edge weights.
    #[arg(long)]
    c: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve LPon (and LPoff with `--offline`).
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        offline: bool,
    },
    /// Run an algorithm by Monte Carlo.
    Run {
        #[command(subcommand)]
        algorithm: RunCommand,
    },
    /// Integrality-gap tables.
    Gap {
        #[command(subcommand)]
        family: GapCommand,
    },
    /// Build a star contention resolution scheme for independent activations.
    CrsCheck {
        /// Comma-separated targets with sum at most 1.
        #[arg(long, value_delimiter = ',')]
        y: Vec<f64>,
        /// Comma-separated activation probabilities.
        #[arg(long, value_delimiter = ',')]
        p: Vec<f64>,
        #[arg(long, default_value_t = C_EDGE)]
        c: f64,
    },
    /// Verification batteries.
    Verify {
        #[command(subcommand)]
        battery: VerifyCommand,
    },
    /// Brute-force optimum online.
    Oracle {
        #[command(flatten)]
        instance: InstanceArgs,
    },
}

#[derive(Subcommand)]
enum RunCommand {
    /// Round-Augment: value, confidence bound and ratios.
    RoundAugment {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        mc: MonteCarloArgs,
        /// Fail with exit code 3 if optimum online is out of the oracle's reach.
        #[arg(long)]
        require_oracle: bool,
        /// Print one first-stage rounding transcript as JSON on standard error.
        #[arg(long)]
        trace: bool,
    },
    /// Offline rounding: per-node matched frequency against 3/4 of its LP mass.
    OfflineRound {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        mc: MonteCarloArgs,
    },
    /// Round-Augment trained on `k` sampled scenarios, repeated.
    Sample {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        mc: MonteCarloArgs,
        #[arg(long, default_value_t = 100)]
        k: u64,
        #[arg(long, default_value_t = 10)]
        repetitions: u64,
        /// With `--delta`, also print the sample size the theory asks for.
        #[arg(long, requires = "delta")]
        epsilon: Option<f64>,
        #[arg(long, requires = "epsilon")]
        delta: Option<f64>,
    },
}

#[derive(Subcommand)]
enum GapCommand {
    EightCycle,
    EdgeGap {
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Exhaustive lower-bound batteries on random small graphs.
    Bounds {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
    /// Negative dependence of stage-one availabilities.
    Na {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        mc: MonteCarloArgs,
    },
    /// Star bound table and built star schemes.
    Crs {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
    /// Every battery; `na` runs on the 8-cycle.
    All {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
}

enum Failure {
    Verify(String),
    Input(String),
    Cap(String),
}

impl From<TwoStageError> for Failure {
    fn from(e: TwoStageError) -> Self {
        match e {
            TwoStageError::CapExceeded { .. } => Failure::Cap(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.output.parallel.max(1))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => return report(Failure::Input(e.to_string())),
    };
    let parallel = cli.output.parallel > 1;
    match pool.install(|| dispatch(&cli.command, &cli.output, parallel)) {
        Ok(text) => match emit(&cli.output, &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(f) => report(f),
        },
        Err(Failure::Verify(text)) => {
            let _ = emit(&cli.output, &text);
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(f) => report(f),
    }
}

fn report(failure: Failure) -> ExitCode {
    match failure {
        Failure::Verify(m) => {
            eprintln!("{m}");
            ExitCode::from(1)
        }
        Failure::Input(m) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Failure::Cap(m) => {
            eprintln!("resource cap: {m}");
            ExitCode::from(3)
        }
    }
}

fn emit(output: &OutputArgs, text: &str) -> CliResult<()> {
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(input),
    }
}

fn dispatch(command: &Command, output: &OutputArgs, parallel: bool) -> CliResult<String> {
    let format = output.format;
    match command {
        Command::Solve { instance, offline } => cmd_solve(&load(instance)?, *offline, format),
        Command::Run { algorithm } => match algorithm {
            RunCommand::RoundAugment {
                instance,
                mc,
                require_oracle,
                trace,
            } => cmd_round_augment(&load(instance)?, mc, *require_oracle, *trace, format, parallel),
            RunCommand::OfflineRound { instance, mc } => cmd_offline_round(&load(instance)?, mc, format, parallel),
            RunCommand::Sample {
                instance,
                mc,
                k,
                repetitions,
                epsilon,
                delta,
            } => {
                let budget = epsilon.zip(*delta);
                cmd_sample(&load(instance)?, mc, *k, *repetitions, budget, format, parallel)
            }
        },
        Command::Gap { family } => cmd_gap(family, format),
        Command::CrsCheck { y, p, c } => cmd_crs_check(y, p, *c, format),
        Command::Verify { battery } => cmd_verify(battery, format, parallel),
        Command::Oracle { instance } => cmd_oracle(&load(instance)?, format),
    }
}

fn load(args: &InstanceArgs) -> CliResult<TwoStageInstance> {
    let instance = match (&args.instance, &args.generate) {
        (Some(path), None) => read_instance(path).map_err(input)?,
        (None, Some(spec)) => generate(spec)?,
        _ => return Err(Failure::Input("give exactly one of --instance and --generate".into())),
    };
    match args.mode.as_deref() {
        None => Ok(instance),
        Some(text) => {
            let mode: WeightMode = text.parse().map_err(input)?;
            if mode == WeightMode::Unweighted {
                Ok(instance.with_weight_mode_unweighted())
            } else if mode == instance.weight_mode() {
                Ok(instance)
            } else {
                Err(Failure::Input(format!(
                    "cannot convert a {} instance to {}",
                    instance.weight_mode().as_str(),
                    mode.as_str()
                )))
            }
        }
    }
}

fn generate(spec: &str) -> CliResult<TwoStageInstance> {
    let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
    let mut pairs = Vec::new();
    for item in params.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Failure::Input(format!("generator parameter `{item}` needs key=value")))?;
        pairs.push((k.trim(), v.trim()));
    }
    let get = |key: &str| pairs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
    let num = |key: &str, default: usize| -> CliResult<usize> {
        get(key).map_or(Ok(default), |v| {
            v.parse()
                .map_err(|_| Failure::Input(format!("{key} = `{v}` is not a count")))
        })
    };
    match name {
        "eight-cycle" => Ok(make_eight_cycle()),
        "edge-gap" => make_edge_gap_family(num("n", 0)?).map_err(input),
        "random" => {
            let seed = get("seed")
                .ok_or_else(|| Failure::Input("random generator needs seed=S".into()))?
                .parse()
                .map_err(|_| Failure::Input("seed must be an integer".into()))?;
            let mode = get("mode").unwrap_or("unweighted").parse().map_err(input)?;
            let mut s =
                RandomInstanceSpec::new(seed, num("offline", 5)?, num("online", 3)?, mode, num("scenarios", 3)?);
            s.second_stage = num("online2", s.first_stage)?;
            if let Some(d) = get("density") {
                s.edge_density = d
                    .parse()
                    .map_err(|_| Failure::Input(format!("density = `{d}` is not a number")))?;
            }
            make_random_instance(&s).map_err(input)
        }
        other => Err(Failure::Input(format!("unknown generator `{other}`"))),
    }
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut text = format!("{CSV_VERSION}\n{header}\n");
    for row in rows {
        text.push_str(&row);
        text.push('\n');
    }
    text
}

fn json_text(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("values serialize") + "\n"
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn scale(instance: &TwoStageInstance, c: Option<f64>) -> f64 {
    c.unwrap_or_else(|| default_scale(instance.weight_mode()))
}

fn cmd_solve(instance: &TwoStageInstance, offline: bool, format: Format) -> CliResult<String> {
    let mut solutions = vec![("online", solve_lp_on(instance))];
    if offline {
        solutions.push(("offline", solve_lp_off(instance)));
    }
    Ok(match format {
        Format::Json => json_text(&Value::Array(
            solutions.iter().map(|(_, s)| solution_to_json(instance, s)).collect(),
        )),
        Format::Csv => csv(
            "relaxation,backend,objective,objective_f64",
            solutions
                .iter()
                .map(|(name, s)| format!("{name},{},{},{}", s.backend.as_str(), s.objective, s.objective.to_f64())),
        ),
    })
}

fn cmd_round_augment(
    instance: &TwoStageInstance,
    mc: &MonteCarloArgs,
    require_oracle: bool,
    trace: bool,
    format: Format,
    parallel: bool,
) -> CliResult<String> {
    let c = scale(instance, mc.c);
    let solution = solve_lp_on(instance);
    let policy = RoundAugmentPolicy::new(instance, &solution, c)?;
    if trace {
        let graph = instance
            .first_stage_graph::<f64>()
            .ok_or_else(|| Failure::Input("malformed instance".into()))?;
        let x: Vec<f64> = solution.x_f64().iter().map(|v| c * v).collect();
        let (_, transcript) = dependent_round(&graph, &x, &mut trial_rng(mc.seed, 0), true).map_err(input)?;
        eprintln!("{}", serde_json::to_string(&transcript).expect("transcripts serialize"));
    }
    let r = estimate_ratio(instance, &policy, mc.trials, mc.seed, parallel).map_err(input)?;
    if require_oracle && r.opt_on.is_none() {
        return Err(Failure::Cap("optimum online is beyond the oracle's edge cap".into()));
    }
    Ok(match format {
        Format::Json => json_text(&json!({"algorithm": "round-augment", "c": c, "seed": mc.seed, "result": r})),
        Format::Csv => csv(
            "algorithm,trials,seed,c,mean,std_dev,ci_lower,lp_on,ratio_lp,ratio_lp_ci,opt_on,ratio_opt",
            [format!(
                "round-augment,{},{},{c},{},{},{},{},{},{},{},{}",
                mc.trials,
                mc.seed,
                r.estimate.mean,
                r.estimate.std_dev,
                r.estimate.ci_lower,
                r.lp_on,
                r.ratio_lp,
                r.ratio_lp_ci,
                opt(r.opt_on),
                opt(r.ratio_opt)
            )],
        ),
    })
}

fn cmd_offline_round(
    instance: &TwoStageInstance,
    mc: &MonteCarloArgs,
    format: Format,
    parallel: bool,
) -> CliResult<String> {
    let solution = solve_lp_off(instance);
    let freq = offline_match_frequencies(instance, &solution, mc.trials, mc.seed, parallel)?;
    let x = solution.x_offline(instance);
    let y = solution.expected_y_offline(instance);
    let rows: Vec<(String, f64, f64, f64, f64)> = instance
        .offline_nodes()
        .iter()
        .enumerate()
        .map(|(i, node)| (node.id.clone(), x[i], y[i], 0.75 * (x[i] + y[i]), freq[i]))
        .collect();
    Ok(match format {
        Format::Json => json_text(&json!({
            "algorithm": "offline-round", "trials": mc.trials, "seed": mc.seed, "lp_off": solution.objective.to_f64(),
            "nodes": rows.iter().map(|r| json!({"node": r.0, "x": r.1, "expected_y": r.2, "three_quarters": r.3, "matched": r.4}))
                .collect::<Vec<_>>(),
        })),
        Format::Csv => csv(
            "node,x,expected_y,three_quarters,matched,trials,seed",
            rows.iter()
                .map(|r| format!("{},{},{},{},{},{},{}", r.0, r.1, r.2, r.3, r.4, mc.trials, mc.seed)),
        ),
    })
}

fn cmd_sample(
    instance: &TwoStageInstance,
    mc: &MonteCarloArgs,
    k: u64,
    repetitions: u64,
    budget: Option<(f64, f64)>,
    format: Format,
    parallel: bool,
) -> CliResult<String> {
    let c = scale(instance, mc.c);
    let lp_on = solve_lp_on(instance).objective.to_f64();
    let required = match budget {
        Some((eps, delta)) => Some(sample_size_vertex(instance.num_offline(), eps, delta)?),
        None => None,
    };
    let mut rows = Vec::new();
    for rep in 0..repetitions {
        let train_seed = derive_seed(mc.seed, rep);
        let trained = sample_based_round_augment(instance, &mut InstanceSampler::new(instance), k, c, train_seed)?;
        let estimate = estimate_mean(&trained.policy, mc.trials, train_seed, parallel);
        rows.push((
            rep,
            estimate.mean,
            estimate.ci_lower,
            if lp_on > 0.0 { estimate.mean / lp_on } else { 1.0 },
        ));
    }
    let mean_ratio = rows.iter().map(|r| r.3).sum::<f64>() / rows.len().max(1) as f64;
    Ok(match format {
        Format::Json => json_text(&json!({
            "algorithm": "sample", "k": k, "c": c, "seed": mc.seed, "trials": mc.trials, "lp_on": lp_on,
            "mean_ratio": mean_ratio, "required_k": required,
            "repetitions": rows.iter().map(|r| json!({"repetition": r.0, "mean": r.1, "ci_lower": r.2, "ratio_lp": r.3}))
                .collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut text = csv(
                "repetition,k,seed,mean,ci_lower,ratio_lp",
                rows.iter()
                    .map(|r| format!("{},{k},{},{},{},{}", r.0, mc.seed, r.1, r.2, r.3)),
            );
            text.push_str(&format!("# mean_ratio {mean_ratio}\n"));
            if let Some(req) = required {
                text.push_str(&format!("# required_k {req}\n"));
            }
            text
        }
    })
}

fn gap_json(row: &GapRow) -> Value {
    json!({
        "n": row.n,
        "lp_on": row.lp_on.to_string(),
        "opt_on": row.opt_on.to_string(),
        "ratio": row.ratio.to_string(),
        "ratio_f64": row.ratio.to_f64(),
        "lp_on_exact": row.lp_on_exact.as_ref().map(ToString::to_string),
        "opt_on_exact": row.opt_on_exact.as_ref().map(ToString::to_string),
        "ratio_exact": row.ratio_exact.as_ref().map(ToString::to_string),
        "closed_form": row.closed_form.as_ref().map(ToString::to_string),
        "matches_closed_form": row.closed_form.is_none() || row.opt_on_exact == row.closed_form,
    })
}

fn gap_csv_row(row: &GapRow) -> String {
    let text = |v: &Option<_>| v.as_ref().map(|q: &QuadSqrt2| q.to_string()).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{}",
        row.n,
        row.lp_on,
        row.opt_on,
        row.ratio,
        row.ratio.to_f64(),
        text(&row.lp_on_exact),
        text(&row.opt_on_exact),
        text(&row.ratio_exact),
        text(&row.closed_form)
    )
}

const GAP_HEADER: &str = "n,lp_on,opt_on,ratio,ratio_f64,lp_on_exact,opt_on_exact,ratio_exact,closed_form";

fn cmd_gap(family: &GapCommand, format: Format) -> CliResult<String> {
    match family {
        GapCommand::EightCycle => {
            let row = gap_eight_cycle();
            Ok(match format {
                Format::Json => json_text(&json!({"family": "eight-cycle", "rows": [gap_json(&row)]})),
                Format::Csv => csv(GAP_HEADER, [gap_csv_row(&row)]),
            })
        }
        GapCommand::EdgeGap { n_min, n_max } => {
            if *n_min == 0 || n_min > n_max {
                return Err(Failure::Input(format!(
                    "need 1 <= n-min <= n-max, got {n_min}..{n_max}"
                )));
            }
            let rows = (*n_min..=*n_max).map(gap_edge_family).collect::<Result<Vec<_>, _>>()?;
            let non_increasing = rows.windows(2).all(|w| w[1].ratio_exact <= w[0].ratio_exact);
            let matches = rows.iter().all(|r| r.opt_on_exact == r.closed_form);
            Ok(match format {
                Format::Json => json_text(&json!({
                    "family": "edge-gap", "rows": rows.iter().map(gap_json).collect::<Vec<_>>(),
                    "non_increasing": non_increasing, "oracle_matches_closed_form": matches, "limit": C_EDGE,
                })),
                Format::Csv => {
                    let mut text = csv(GAP_HEADER, rows.iter().map(gap_csv_row));
                    text.push_str(&format!(
                        "# oracle_matches_closed_form {matches}\n# non_increasing {non_increasing}\n# limit 2*sqrt(2)-2 = {C_EDGE}\n"
                    ));
                    text
                }
            })
        }
    }
}

fn cmd_crs_check(y: &[f64], p: &[f64], c: f64, format: Format) -> CliResult<String> {
    let dist = ActiveSetDistribution::independent(p).map_err(input)?;
    let scheme = build_star_crs_with(y, &dist, c).map_err(input)?;
    let marginals = scheme.marginals(&dist);
    let monotone = if y.len() <= MAX_MONOTONE_CHECK {
        Some(scheme.is_monotone().map_err(input)?)
    } else {
        None
    };
    Ok(match format {
        Format::Json => json_text(&json!({
            "c": c, "y": y, "p": p, "marginals": marginals, "monotone": monotone,
            "rules": scheme.rules.iter().zip(&scheme.weights).map(|(r, w)| json!({"order": r.order, "weight": w})).collect::<Vec<_>>(),
            "thinning": scheme.thinning,
        })),
        Format::Csv => {
            let mut text = csv(
                "element,y,p,target,selected",
                (0..y.len()).map(|i| format!("{i},{},{},{},{}", y[i], p[i], c * y[i], marginals[i])),
            );
            if let Some(m) = monotone {
                text.push_str(&format!("# monotone {m}\n"));
            }
            text
        }
    })
}

fn na_reports(instance: &TwoStageInstance, mc: &MonteCarloArgs, parallel: bool) -> CliResult<Vec<BoundReport>> {
    let c = scale(instance, mc.c);
    let solution = solve_lp_on(instance);
    let policy = RoundAugmentPolicy::new(instance, &solution, c)?;
    let n = instance.num_offline().min(MAX_DEPENDENCE_ELEMENTS);
    let sampler = |rng: &mut TrialRng| {
        let m = policy.round_first_stage(rng).expect("validated at construction");
        (0..n).map(|i| !m.matches_right(i)).collect::<Vec<bool>>()
    };
    let r = test_negative_dependence(&sampler, n, mc.trials, mc.seed, parallel).map_err(input)?;
    let mut reports: Vec<BoundReport> = r
        .covariances
        .iter()
        .map(|&(i, j, cov)| BoundReport::exact(format!("cov-{i}-{j}"), "0 >= Cov(A_i, A_j) - margin", r.margin, cov))
        .collect();
    for check in &r.ncd {
        let name = check.subset.iter().map(usize::to_string).collect::<Vec<_>>().join("-");
        reports.push(BoundReport::exact(
            format!("ncd-{name}"),
            "prod E[A] + margin >= E[prod A]",
            check.product + r.margin,
            check.joint,
        ));
        reports.push(BoundReport::exact(
            format!("ncd-complement-{name}"),
            "prod E[1-A] + margin >= E[prod (1-A)]",
            check.product_complement + r.margin,
            check.joint_complement,
        ));
    }
    for report in &mut reports {
        report.tier = Tier::Statistical;
    }
    Ok(reports)
}

fn cmd_verify(battery: &VerifyCommand, format: Format, parallel: bool) -> CliResult<String> {
    let mut reports = Vec::new();
    let bounds = |seed: u64, count: usize, reports: &mut Vec<BoundReport>| -> CliResult<()> {
        reports.extend(vertex_bound_battery(seed, count).map_err(input)?);
        reports.extend(vertex_weighted_battery(seed, count).map_err(input)?);
        Ok(())
    };
    let crs = |seed: u64, count: usize, reports: &mut Vec<BoundReport>| -> CliResult<()> {
        reports.extend(star_bound_reports(200));
        reports.extend(star_crs_battery(seed, count).map_err(input)?);
        Ok(())
    };
    match battery {
        VerifyCommand::Bounds { seed, count } => bounds(*seed, *count, &mut reports)?,
        VerifyCommand::Na { instance, mc } => reports.extend(na_reports(&load(instance)?, mc, parallel)?),
        VerifyCommand::Crs { seed, count } => crs(*seed, *count, &mut reports)?,
        VerifyCommand::All { seed, trials } => {
            bounds(*seed, 200, &mut reports)?;
            let mc = MonteCarloArgs {
                trials: *trials,
                seed: *seed,
                c: None,
            };
            reports.extend(na_reports(&make_eight_cycle(), &mc, parallel)?);
            crs(*seed, 50, &mut reports)?;
        }
    }
    let text = match format {
        Format::Json => json_text(&serde_json::to_value(&reports).expect("reports serialize")),
        Format::Csv => csv(BoundReport::CSV_HEADER, reports.iter().map(BoundReport::csv_row)),
    };
    let failed: Vec<&BoundReport> = reports.iter().filter(|r| !r.passed()).collect();
    if failed.is_empty() {
        Ok(text)
    } else {
        for r in failed {
            eprintln!("FAIL {}", r.csv_row());
        }
        Err(Failure::Verify(text))
    }
}

fn cmd_oracle(instance: &TwoStageInstance, format: Format) -> CliResult<String> {
    let (value, matching) = brute_force_opt_online(instance)?;
    let first = instance.first_stage();
    let pairs: Vec<(String, String)> = matching
        .edges()
        .iter()
        .map(|&(a, i)| (first.nodes[a].clone(), instance.offline_nodes()[i].id.clone()))
        .collect();
    Ok(match format {
        Format::Json => json_text(&json!({
            "opt_on": value.to_string(), "opt_on_f64": value.to_f64(),
            "first_stage": pairs.iter().map(|(a, i)| json!({"from": a, "to": i})).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let matched = pairs
                .iter()
                .map(|(a, i)| format!("{a}-{i}"))
                .collect::<Vec<_>>()
                .join(" ");
            csv(
                "opt_on,opt_on_f64,first_stage",
                [format!("{value},{},{matched}", value.to_f64())],
            )
        }
    })
}
