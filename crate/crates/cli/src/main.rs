use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use hwave_core::analysis_lab::{
    blowup_sign_exponent, critical_exponent, gamma_tilde, global_existence_threshold,
    lifespan_exponent, lower_bound_fit, regularity_exponent, LowerBoundCheck,
};
use hwave_core::experiment_harness::{
    emit_report, run_selftest, run_sweep, small_data_experiment, summarize_lifespans, summary_json,
    write_atomic, write_csv, ExperimentKind, ExperimentRecord, LifespanPoint, LifespanSpec,
    SmallDataSpec, Status, SweepManifest, DEFAULT_EPS,
};
use hwave_core::group_fourier::snapshot;
use hwave_core::linear_propagator::CauchyData;
use hwave_core::nonlinear_solver::{
    blowup_data, run_with_observer, NonlinearGridSpec, Nonlinearity, RunConfig,
};
use hwave_core::spectral_field::DataProfileSpec;
use hwave_core::Error;

#[derive(Parser)]
#[command(name = "hwave", version, about = "Damped waves on the Heisenberg group")]
struct Cli {
    /// TOML or JSON sweep manifest.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "hwave-out")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quick consistency checks; exit code 3 if any fails.
    Selftest,
    /// Linear decay slopes of the Ḣ^s norm.
    LinearDecay {
        #[arg(long, default_value_t = 4)]
        q: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 1.0])]
        s: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0])]
        gamma: Vec<f64>,
    },
    /// One nonlinear run, or a small-data bisection with --bisect.
    Nonlinear(NonlinearArgs),
    /// Lifespans over an ε grid and their power-law fit.
    LifespanSweep {
        #[arg(long, default_value_t = 4)]
        q: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5])]
        gamma: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1.5])]
        p: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        /// Profile constant C₀.
        #[arg(long)]
        c0: Option<f64>,
        /// Skip the dt/2 repeat of each point.
        #[arg(long)]
        no_dt_check: bool,
    },
    /// Bounded-horizon classification of (γ, p) cells.
    PhaseDiagram {
        #[arg(long, default_value_t = 4)]
        q: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0])]
        gamma: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1.3, 1.6, 2.0, 2.5])]
        p: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
    },
    /// Gagliardo–Nirenberg and HLS ratio maxima over a random family.
    GnCheck {
        #[arg(long, default_value_t = 4)]
        q: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0])]
        s: Vec<f64>,
    },
    /// The test-function lower bound for the data at several radii.
    BlowupCheck {
        #[arg(long, default_value_t = 4)]
        q: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0])]
        gamma: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [10.0, 50.0, 200.0])]
        radii: Vec<f64>,
    },
    /// Closed-form exponents for (Q, γ, p).
    Exponents {
        #[arg(long, default_value_t = 4)]
        q: usize,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long)]
        p: Option<f64>,
    },
}

#[derive(Args)]
struct NonlinearArgs {
    #[arg(long, default_value_t = 4)]
    q: usize,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 1.5)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    c0: f64,
    #[arg(long, default_value_t = 100.0)]
    t_max: f64,
    #[arg(long, default_value_t = 20.0)]
    r_max: f64,
    #[arg(long, default_value_t = 200.0)]
    tau_max: f64,
    #[arg(long, default_value_t = 32)]
    k_max: usize,
    #[arg(long, default_value_t = 1.0)]
    lambda_max: f64,
    #[arg(long, default_value_t = 0.5)]
    dt0: f64,
    /// Write the final state as an HWF1 snapshot.
    #[arg(long)]
    snapshot: bool,
    /// Search for a bounded small-data amplitude instead of a single run.
    #[arg(long)]
    bisect: bool,
}

enum Failure {
    Validation(String),
    Runtime(String),
    Acceptance,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Acceptance) => ExitCode::from(3),
    }
}

fn run(cli: Cli) -> Outcome {
    // an unreadable or malformed --config file is a user input error
    let manifest = cli
        .config
        .as_deref()
        .map(SweepManifest::load)
        .transpose()
        .map_err(|e| Failure::Validation(e.to_string()))?;
    match &cli.command {
        Command::Selftest => selftest(&cli),
        Command::Exponents { q, gamma, p } => exponents(*q, *gamma, *p),
        Command::Nonlinear(a) => nonlinear(&cli, a),
        cmd => {
            let m = match manifest {
                Some(m) => m,
                None => manifest_from_flags(cmd),
            };
            sweep(&cli, m, cmd)
        }
    }
}

fn expected_kind(cmd: &Command) -> Option<ExperimentKind> {
    match cmd {
        Command::LinearDecay { .. } => Some(ExperimentKind::LinearDecay),
        Command::LifespanSweep { .. } => Some(ExperimentKind::Lifespan),
        Command::PhaseDiagram { .. } => Some(ExperimentKind::PhaseDiagram),
        Command::GnCheck { .. } => Some(ExperimentKind::Gn),
        Command::BlowupCheck { .. } => Some(ExperimentKind::BlowupFunctional),
        _ => None,
    }
}

fn manifest_from_flags(cmd: &Command) -> SweepManifest {
    let kind = expected_kind(cmd).expect("sweep subcommand");
    match cmd {
        Command::LinearDecay { q, s, gamma } => {
            let mut m = SweepManifest::new(kind, *q);
            m.s = s.clone();
            m.gamma = gamma.clone();
            m
        }
        Command::LifespanSweep { q, gamma, p, eps, c0, no_dt_check } => {
            let mut m = SweepManifest::new(kind, *q);
            m.gamma = gamma.clone();
            m.p = p.clone();
            m.eps = eps.clone().unwrap_or_else(|| DEFAULT_EPS.to_vec());
            if let Some(c) = c0 {
                m.resolution.c0 = *c;
            }
            m.resolution.certify_dt = !no_dt_check;
            m
        }
        Command::PhaseDiagram { q, gamma, p, eps } => {
            let mut m = SweepManifest::new(kind, *q);
            m.gamma = gamma.clone();
            m.p = p.clone();
            m.eps = vec![*eps];
            m
        }
        Command::GnCheck { q, s } => {
            let mut m = SweepManifest::new(kind, *q);
            m.s = s.clone();
            m
        }
        Command::BlowupCheck { q, gamma, radii } => {
            let mut m = SweepManifest::new(kind, *q);
            m.gamma = gamma.clone();
            m.radii = radii.clone();
            m
        }
        _ => unreachable!(),
    }
}

fn sweep(cli: &Cli, mut m: SweepManifest, cmd: &Command) -> Outcome {
    let kind = expected_kind(cmd).expect("sweep subcommand");
    if m.kind != kind {
        return Err(Failure::Validation(format!(
            "manifest kind {:?} does not match this subcommand",
            m.kind
        )));
    }
    if let Some(seed) = cli.seed {
        m.seed = seed;
    }
    m.out_dir = Some(cli.out.join("runs"));
    m.validate()?;
    let records = run_sweep(&m, cli.workers)?;
    let extra = match kind {
        ExperimentKind::Lifespan => lifespan_fits(&m, &records),
        ExperimentKind::BlowupFunctional => radius_fits(&m, &records),
        _ => Value::Null,
    };
    let files = emit_report(Some(kind), &records, &cli.out, extra)?;
    for r in &records {
        match &r.status {
            Status::Ok => println!("{}: ok", r.key),
            Status::Failed { message } => println!("{}: failed: {message}", r.key),
        }
    }
    println!("summary: {}", files.summary.display());
    for t in &files.tables {
        println!("table: {}", t.display());
    }
    if records.iter().any(|r| r.status != Status::Ok) {
        return Err(Failure::Runtime("some sweep points failed".into()));
    }
    Ok(())
}

fn lifespan_fits(m: &SweepManifest, records: &[ExperimentRecord]) -> Value {
    let mut fits = Vec::new();
    for &g in &m.gamma {
        for &p in &m.p {
            let points: Vec<LifespanPoint> = records
                .iter()
                .filter(|r| r.parameters["gamma"] == json!(g) && r.parameters["p"] == json!(p))
                .filter_map(|r| serde_json::from_value(r.outputs.clone()).ok())
                .collect();
            let spec = LifespanSpec {
                q: m.q,
                gamma: g,
                p,
                eps: m.eps.clone(),
                resolution: m.resolution,
                certify_dt: m.resolution.certify_dt,
            };
            let entry = match summarize_lifespans(&spec, points) {
                Ok(mut res) => {
                    res.points.clear();
                    serde_json::to_value(res).unwrap_or(Value::Null)
                }
                Err(e) => json!({"gamma": g, "p": p, "error": e.to_string()}),
            };
            fits.push(entry);
        }
    }
    json!({ "fits": fits })
}

fn radius_fits(m: &SweepManifest, records: &[ExperimentRecord]) -> Value {
    let mut fits = Vec::new();
    for &g in &m.gamma {
        let checks: Vec<LowerBoundCheck> = records
            .iter()
            .filter(|r| r.parameters["gamma"] == json!(g))
            .filter_map(|r| serde_json::from_value(r.outputs["check"].clone()).ok())
            .collect();
        let fit = lower_bound_fit(&checks).ok();
        fits.push(json!({
            "gamma": g,
            "target_slope": m.q as f64 / 2.0 - g,
            "fit": fit,
        }));
    }
    json!({ "fits": fits })
}

fn selftest(cli: &Cli) -> Outcome {
    let checks = run_selftest(cli.seed.unwrap_or(0));
    for c in &checks {
        println!(
            "{} {}: {:.3e} (tolerance {:.1e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance
        );
    }
    if checks.iter().all(|c| c.passed) {
        Ok(())
    } else {
        Err(Failure::Acceptance)
    }
}

fn exponents(q: usize, gamma: f64, p: Option<f64>) -> Outcome {
    if q < 4 || !q.is_multiple_of(2) {
        return Err(Failure::Validation("Q must be an even integer >= 4".into()));
    }
    let qf = q as f64;
    let mut v = json!({
        "q": q,
        "gamma": gamma,
        "p_crit": critical_exponent(qf, gamma),
        "p_regularity": regularity_exponent(qf, gamma),
        "p_global": global_existence_threshold(qf, gamma),
        "gamma_tilde": gamma_tilde(qf),
    });
    if let Some(p) = p {
        v["p"] = json!(p);
        v["blowup_sign_exponent"] = json!(blowup_sign_exponent(qf, gamma, p));
        v["lifespan_exponent"] = match lifespan_exponent(qf, gamma, p) {
            Ok(e) => json!(e),
            Err(_) => Value::Null,
        };
    }
    println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    Ok(())
}

fn single_record(key: &str, parameters: Value, outputs: Value) -> ExperimentRecord {
    ExperimentRecord {
        manifest_hash: String::new(),
        key: key.to_string(),
        parameters,
        outputs,
        refinement: Value::Null,
        runtime_seconds: 0.0,
        status: Status::Ok,
    }
}

fn write_summary(dir: &Path, record: ExperimentRecord) -> Outcome {
    let doc = summary_json(None, &[record], Value::Null);
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Runtime(e.to_string()))?;
    write_atomic(&dir.join("summary.json"), text.as_bytes())?;
    Ok(())
}

fn nonlinear(cli: &Cli, a: &NonlinearArgs) -> Outcome {
    if a.q < 4 || !a.q.is_multiple_of(2) {
        return Err(Failure::Validation("Q must be an even integer >= 4".into()));
    }
    fs::create_dir_all(&cli.out).map_err(|e| Failure::Runtime(format!("{}: {e}", cli.out.display())))?;
    if a.bisect {
        let mut spec = SmallDataSpec::new(a.q, a.gamma, a.p, a.s);
        spec.horizon = a.t_max;
        spec.k_max = a.k_max;
        spec.dt0 = a.dt0;
        let res = small_data_experiment(&spec)?;
        let mut rows = vec![vec!["eps".to_string(), "bounded".into(), "growth".into()]];
        for (e, b, g) in &res.history {
            rows.push(vec![e.to_string(), b.to_string(), g.to_string()]);
        }
        write_csv(&cli.out.join("bisection.csv"), &rows)?;
        if let Some(run) = &res.accepted {
            write_trajectory(&cli.out.join("trajectory.csv"), &run.times, &run.l2_norms, &run.hs_norms)?;
        }
        let out = serde_json::to_value(&res).map_err(|e| Failure::Runtime(e.to_string()))?;
        println!("{}", serde_json::to_string_pretty(&out).expect("json"));
        let params = json!({"q": a.q, "gamma": a.gamma, "p": a.p, "s": a.s, "horizon": a.t_max});
        return write_summary(&cli.out, single_record("bisect", params, out));
    }
    let profile = DataProfileSpec::new(a.c0, a.q, a.gamma)?;
    let grids = NonlinearGridSpec::for_box((a.q - 2) / 2, a.k_max, a.r_max, a.tau_max, a.lambda_max);
    let (plan, data): (_, CauchyData) = blowup_data(&profile, &grids, a.eps)?;
    let mut cfg = RunConfig::new(a.p, a.gamma, a.s, a.t_max);
    cfg.dt.dt0 = a.dt0;
    let mut last = None;
    let rec = run_with_observer(&data, Nonlinearity::new(plan.clone(), a.p)?, &cfg, |st| {
        if a.snapshot {
            last = Some(st.u.clone());
        }
    })?;
    write_trajectory(&cli.out.join("trajectory.csv"), &rec.times, &rec.l2_norms, &rec.hs_norms)?;
    if let Some(u) = last {
        let phys = plan.inverse(&u)?;
        let path = cli.out.join("final.hwf");
        let mut buf = Vec::new();
        snapshot::write(&mut buf, Some(&u), Some(&phys)).map_err(|e| Failure::Runtime(e.to_string()))?;
        write_atomic(&path, &buf)?;
        println!("snapshot: {}", path.display());
    }
    let out = json!({
        "stop": rec.stop,
        "blowup_flag": rec.blowup_flag,
        "lifespan_estimate": rec.lifespan_estimate,
        "lifespan_high_threshold": rec.lifespan_high_threshold,
        "steps": rec.dt_used.len(),
        "t_end": rec.times.last(),
        "xs_final": rec.xs_running.last(),
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    let params = json!({"q": a.q, "gamma": a.gamma, "p": a.p, "s": a.s, "eps": a.eps, "c0": a.c0,
                        "t_max": a.t_max, "r_max": a.r_max, "tau_max": a.tau_max});
    write_summary(&cli.out, single_record("run", params, out))
}

fn write_trajectory(path: &Path, t: &[f64], l2: &[f64], hs: &[f64]) -> Outcome {
    let mut rows = vec![vec!["t".to_string(), "l2".into(), "hs".into()]];
    for i in 0..t.len() {
        rows.push(vec![t[i].to_string(), l2[i].to_string(), hs[i].to_string()]);
    }
    write_csv(path, &rows)?;
    Ok(())
}
