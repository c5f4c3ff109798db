//! `g2kit`: verify identities, analyze left-invariant G2-structures, run the
//! Laplacian flow and write the builtin examples.
//!
//! Exit codes: 0 success, 1 failed verification or other error, 2 bad
//! arguments, 3 σ not definite, 4 Jacobi failure, 5 flow lost definiteness.

mod verify;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use g2kit::definite::metric_from;
use g2kit::exterior::json::{form_from_json, form_to_json};
use g2kit::flow::{self, FlowMode, FlowOptions, FlowStatus};
use g2kit::g2::{self, two_form_rank};
use g2kit::invariant::{builtins, G2Structure, LieAlgebra7};
use g2kit::{Error, Form, Rational, Scalar};
use serde_json::{json, Value};

const DEFAULT_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "g2kit", version, about = "Computations with G2-structures on seven-dimensional Lie algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and print a JSON report.
    Verify(VerifyArgs),
    /// Torsion, curvature and residuals of a structure.
    Analyze(InputArgs),
    /// Integrate the Laplacian flow with RK4 and write a CSV trace.
    Flow(FlowArgs),
    /// Write a builtin algebra and its structure as JSON files.
    Examples(ExampleArgs),
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_parser = verify::SUITES)]
    suite: String,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "source")]
struct Source {
    /// Algebra JSON file.
    #[arg(long)]
    algebra: Option<PathBuf>,
    /// Builtin algebra.
    #[arg(long, value_parser = builtins::NAMES)]
    example: Option<String>,
}

#[derive(Args)]
struct InputArgs {
    #[command(flatten)]
    source: Source,
    /// Form JSON file for σ; defaults to φ.
    #[arg(long)]
    form: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Closed,
    General,
}

#[derive(Args)]
struct FlowArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, value_enum, default_value = "closed")]
    mode: Mode,
    /// Write the summary JSON here; the CSV goes to --output or stdout.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct ExampleArgs {
    #[arg(long, value_parser = builtins::NAMES)]
    name: String,
    /// Directory for `<name>.algebra.json` and `<name>.form.json`.
    #[arg(long, default_value = ".")]
    output: PathBuf,
}

enum Failure {
    Usage(String),
    Verify(String),
    Core(Error),
    Io(String),
    LostDefiniteness,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Res<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = tolerance().and_then(|tol| match cli.command {
        Command::Verify(a) => cmd_verify(a, tol),
        Command::Analyze(a) => cmd_analyze(a, tol),
        Command::Flow(a) => cmd_flow(a, tol),
        Command::Examples(a) => cmd_examples(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (2, m),
                Failure::Verify(m) => (1, m),
                Failure::Io(m) => (1, m),
                Failure::LostDefiniteness => (5, "flow lost definiteness; partial trace written".into()),
                Failure::Core(e) => match e {
                    Error::NotDefinite { .. } => (3, e.to_string()),
                    Error::Jacobi(_) => (4, e.to_string()),
                    _ => (1, e.to_string()),
                },
            };
            eprintln!("g2kit: {msg}");
            ExitCode::from(code)
        }
    }
}

fn tolerance() -> Res<f64> {
    match std::env::var("G2KIT_TOL") {
        Err(_) => Ok(DEFAULT_TOL),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t >= 0.0 && t.is_finite() => Ok(t),
            _ => Err(Failure::Usage(format!("G2KIT_TOL must be a non-negative number, got {s:?}"))),
        },
    }
}

fn emit(v: &Value, path: Option<&Path>) -> Res<()> {
    let text = serde_json::to_string_pretty(v).expect("serializable") + "\n";
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_json(path: &Path) -> Res<Value> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_algebra<S: Scalar>(src: &Source) -> Res<LieAlgebra7<S>> {
    match (&src.algebra, &src.example) {
        (Some(p), _) => Ok(LieAlgebra7::from_json(&read_json(p)?)?),
        (None, Some(n)) => Ok(builtins::by_name(n).expect("validated by the parser")),
        (None, None) => unreachable!("clap requires a source"),
    }
}

fn load_form<S: Scalar>(path: Option<&PathBuf>) -> Res<Form<S>> {
    match path {
        Some(p) => {
            let f: Form<S> = form_from_json(&read_json(p)?)?;
            f.expect_degree(3)?;
            Ok(f)
        }
        None => Ok(g2::phi()),
    }
}

fn cmd_verify(a: VerifyArgs, tol: f64) -> Res<()> {
    let report = verify::run(&a.suite, a.trials as usize, a.seed, tol)?;
    emit(&report.to_json(), a.output.as_deref())?;
    if report.pass() {
        Ok(())
    } else {
        Err(Failure::Verify(format!("suite {} has failing checks", a.suite)))
    }
}

fn cmd_analyze(a: InputArgs, tol: f64) -> Res<()> {
    // Exact arithmetic when the inputs are rational and the metric has a
    // rational volume factor; floats otherwise.
    let exact = load_algebra::<Rational>(&a.source)
        .and_then(|l| Ok((l, load_form::<Rational>(a.form.as_ref())?)))
        .ok()
        .filter(|(_, s)| metric_from(s).is_ok());
    let report = match exact {
        Some((l, s)) => analyze(&l, &s, 0.0, "exact")?,
        None => {
            let l = load_algebra::<f64>(&a.source)?;
            let s = load_form::<f64>(a.form.as_ref())?;
            analyze(&l, &s, tol, "float")?
        }
    };
    emit(&report, a.output.as_deref())
}

fn analyze<S: Scalar>(l: &LieAlgebra7<S>, sigma: &Form<S>, tol: f64, arithmetic: &str) -> Res<Value> {
    l.check_jacobi(tol)?;
    let st = metric_from(sigma)?;
    let s = G2Structure::from_structure(l, st);
    let t = s.torsion(tol)?;
    let c = s.curvature(tol)?;
    let mut out = json!({
        "algebra": l.name(),
        "arithmetic": arithmetic,
        "tolerance": tol,
        "torsion": {
            "tau0": t.tau0.to_json(),
            "tau1": form_to_json(&t.tau1),
            "tau2": form_to_json(&t.tau2),
            "tau3": form_to_json(&t.tau3),
        },
        "torsion_free": t.is_zero(tol),
        "one_flat": {
            "d_sigma_max": s.d_sigma().max_abs(),
            "d_star_sigma_max": s.d_psi().max_abs(),
            "verdict": s.d_sigma().max_abs() <= tol && s.d_psi().max_abs() <= tol,
        },
        "scal": c.scal.to_json(),
        "ricci_spectrum": c.spectrum,
        "pinch_ratio": c.pinch_ratio.as_ref().map(Scalar::to_json),
        "einstein_residual": c.ric0.norm2_with(s.structure().metric()).to_f64().sqrt(),
    });
    let closed = match s.closed_report(tol) {
        Ok(r) => Some(r),
        Err(Error::NotClosed(_)) => None,
        Err(e) => return Err(e.into()),
    };
    out["closed"] = json!(closed.is_some());
    if let Some(r) = closed {
        let erp = s.erp_residual(tol)?;
        let grid: Vec<Value> = [(-1, 2), (-1, 3), (-1, 6), (0, 1), (1, 6), (1, 3), (1, 2)]
            .iter()
            .map(|&(n, d)| {
                let lam = S::ratio(n, d);
                s.natural_residual(&lam, tol).map(|nr| {
                    json!({"lambda": if n == 0 { "0".to_string() } else { format!("{n}/{d}") }, "residual": nr.residual.norm(), "zero": nr.residual.is_zero()})
                })
            })
            .collect::<g2kit::Result<_>>()?;
        out["tau2_norm2"] = r.tau2_norm2.to_json();
        out["tau2_rank"] = json!(two_form_rank(&r.tau2, tol)?);
        out["erp_residual"] = json!(erp.norm());
        out["erp"] = json!(erp.is_zero());
        out["natural"] = Value::Array(grid);
    }
    Ok(out)
}

fn cmd_flow(a: FlowArgs, tol: f64) -> Res<()> {
    if !a.dt.is_finite() || a.dt <= 0.0 {
        return Err(Failure::Usage("--dt must be positive".into()));
    }
    if !a.t_end.is_finite() || a.t_end < 0.0 {
        return Err(Failure::Usage("--t-end must be non-negative".into()));
    }
    let l = load_algebra::<f64>(&a.input.source)?;
    l.check_jacobi(tol)?;
    let sigma0 = load_form::<f64>(a.input.form.as_ref())?;
    metric_from(&sigma0)?;
    let mode = match a.mode {
        Mode::Closed => FlowMode::Closed,
        Mode::General => FlowMode::General,
    };
    let trace = flow::run_flow(&l, &sigma0, FlowOptions { t_end: a.t_end, dt: a.dt, mode })?;
    let csv = trace.to_csv();
    match &a.input.output {
        Some(p) => fs::write(p, &csv)?,
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }

    let status = match &trace.status {
        FlowStatus::ReachedEnd => "reached_end".to_string(),
        FlowStatus::LostDefiniteness => "lost_definiteness".to_string(),
        FlowStatus::StepFailure(m) => format!("step_failure: {m}"),
    };
    let rows = &trace.rows;
    let mut summary = json!({
        "algebra": l.name(),
        "mode": match a.mode { Mode::Closed => "closed", Mode::General => "general" },
        "dt": a.dt,
        "t_end": a.t_end,
        "status": status,
        "t_final": rows.last().map(|r| r.t),
        "steps": rows.len().saturating_sub(1),
        "max_closed_residual": rows.iter().map(|r| r.closed_residual).fold(0.0, f64::max),
        "min_margin": rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min),
        "volume_nondecreasing": rows.windows(2).all(|w| w[1].vol >= w[0].vol),
        "volume_strictly_increasing": rows.windows(2).all(|w| w[1].vol > w[0].vol),
    });
    if matches!(a.mode, Mode::Closed) && trace.reached_end() {
        let h = (a.dt * 0.1).min(1e-4);
        let mons = [("initial", &sigma0), ("final", &trace.sigma)]
            .into_iter()
            .map(|(k, s)| flow::monitor_residuals(&l, s, h).map(|m| (k, m)))
            .collect::<g2kit::Result<Vec<_>>>()?;
        let mut obj = serde_json::Map::new();
        for (k, m) in mons {
            obj.insert(
                k.into(),
                json!({
                    "vol_rate": [m.vol_rate.0, m.vol_rate.1],
                    "metric_residual_8_21": m.metric_residual.0,
                    "metric_residual_1_6": m.metric_residual.1,
                    "dual_residual": m.dual_residual,
                    "energy_rate": [m.energy_rate.0, m.energy_rate.1],
                    "second_vol_integrand": m.second_vol_integrand,
                }),
            );
        }
        summary["monitors"] = Value::Object(obj);
    }
    if a.input.source.example.as_deref() == Some("fernandez") && a.input.form.is_none() {
        if let Some(t) = rows.last().map(|r| r.t) {
            let g = metric_from(&trace.sigma)?.metric().matrix().clone();
            summary["reference"] = json!({
                "solution": "(1 + 10t/3)^{3/5} ω¹²³ + rest of φ",
                "sigma_error": (&trace.sigma - &flow::fernandez_reference(t)).max_abs(),
                "metric_error": g.sub(&flow::fernandez_metric(t)).max_abs(),
                "exponential_sigma_error": (&trace.sigma - &flow::fernandez_exponential(t)).max_abs(),
            });
        }
    }
    let text = serde_json::to_string_pretty(&summary).expect("serializable") + "\n";
    match (&a.summary, &a.input.output) {
        (Some(p), _) => fs::write(p, text)?,
        (None, Some(_)) => std::io::stdout().write_all(text.as_bytes())?,
        (None, None) => std::io::stderr().write_all(text.as_bytes())?,
    }
    match trace.status {
        FlowStatus::ReachedEnd => Ok(()),
        FlowStatus::LostDefiniteness => Err(Failure::LostDefiniteness),
        FlowStatus::StepFailure(m) => Err(Failure::Verify(format!("flow step failed: {m}"))),
    }
}

fn cmd_examples(a: ExampleArgs) -> Res<()> {
    let l: LieAlgebra7<Rational> = builtins::by_name(&a.name).expect("validated by the parser");
    fs::create_dir_all(&a.output)?;
    let alg = a.output.join(format!("{}.algebra.json", a.name));
    let form = a.output.join(format!("{}.form.json", a.name));
    emit(&l.to_json(), Some(&alg))?;
    emit(&form_to_json(&g2::phi::<Rational>()), Some(&form))?;
    println!("{}\n{}", alg.display(), form.display());
    Ok(())
}
