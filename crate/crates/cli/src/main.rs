//! `hardy-lab`: command-line front end for the verification suites.
//!
//! Usage: `hardy-lab <command> --config <path> [--out <dir>] [--jobs N]`.
//! Every command reads a single JSON config (unknown fields are errors),
//! prints a JSON report to stdout, and optionally writes report/CSV files
//! into `--out`. Exit codes: 0 all checks passed, 1 usage or config error,
//! 2 verification failure. Reports embed the config's SHA-256 and the tool
//! version so a report can always be traced back to its inputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use hardy_core::forms::{battery, hardy_verify, HardyReport, TestFunction};
use hardy_core::kernels::{Kernel, LevySymbol, TabulatedKernel};
use hardy_core::perturbation::{nonexplosion_check, PerturbationSeries, SpaceTimeGrid};
use hardy_core::quadrature::{integrate_radial, two_center_integral, QuadratureConfig};
use hardy_core::scaling::{check_wlsc, check_wusc, generalized_inverse, SampleGrid, ScalingReport};
use hardy_core::special::StableParams;
use hardy_core::supermedian::{
    power_supermedian_margin, AtomicMeasure, SupermedianPair, TimeWeight,
};

type Kernel64 = Kernel<f64>;

#[derive(Parser)]
#[command(name = "hardy-lab", version, about = "Hardy inequality verification laboratory")]
struct Cli {
    /// Print the available test-function batteries and exit.
    #[arg(long, global = true)]
    list_batteries: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Symmetry, positivity, mass and Chapman–Kolmogorov checks for a kernel.
    VerifyKernel(CommonArgs),
    /// Margins of ∫ p_t(y−x)|y|^{−r} dy ≤ |x|^{−r}.
    VerifySupermedian(CommonArgs),
    /// Hardy inequality/equality over a test-function battery.
    VerifyHardy(CommonArgs),
    /// Perturbation series oracles and the non-explosion margin.
    VerifyPerturbation(CommonArgs),
    /// WLSC/WUSC scaling reports for declared indices.
    ScalingReport(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Path to the JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Directory for report and CSV files (created if missing).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parallelism hint for independent battery items.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

/// Config/usage problems exit 1; failed verifications return `Ok(false)`
/// from the command body and exit 2.
enum Failure {
    Config(String),
}

impl From<hardy_core::Error> for Failure {
    fn from(e: hardy_core::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(format!("io: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version as "errors" with successful exit
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    if cli.list_batteries {
        print_batteries();
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: a command is required (see --help)");
        return ExitCode::from(1);
    };
    match run(command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn print_batteries() {
    println!("standard: the full d-dimensional battery");
    for u in battery::<f64>(3, 1.0) {
        println!("  {}", u.tag);
    }
    println!("quick: a two-function subset for smoke tests");
    for u in quick_battery(3, 1.0) {
        println!("  {}", u.tag);
    }
}

fn quick_battery(d: usize, alpha: f64) -> Vec<TestFunction<f64>> {
    vec![
        TestFunction::gaussian_bump(d, 1.0),
        TestFunction::smoothed_power(d, alpha, 0.3, 3.0).expect("valid battery parameters"),
    ]
}

fn run(command: Command) -> Result<bool, Failure> {
    match command {
        Command::VerifyKernel(a) => dispatch(a, "verify-kernel", cmd_verify_kernel),
        Command::VerifySupermedian(a) => dispatch(a, "verify-supermedian", cmd_verify_supermedian),
        Command::VerifyHardy(a) => dispatch(a, "verify-hardy", cmd_verify_hardy),
        Command::VerifyPerturbation(a) => dispatch(a, "verify-perturbation", cmd_verify_perturbation),
        Command::ScalingReport(a) => dispatch(a, "scaling-report", cmd_scaling_report),
    }
}

/// Loads the config, runs the command body, and emits the report envelope.
fn dispatch<C, R>(
    args: CommonArgs,
    name: &'static str,
    body: impl FnOnce(C, &CommonArgs) -> Result<(bool, R), Failure>,
) -> Result<bool, Failure>
where
    C: serde::de::DeserializeOwned,
    R: Serialize,
{
    let raw = fs::read(&args.config)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let sha = hex::encode(Sha256::digest(&raw));
    let config: C = serde_json::from_slice(&raw).map_err(|e| Failure::Config(e.to_string()))?;
    if let Some(out) = &args.out {
        fs::create_dir_all(out)?;
    }
    let (pass, results) = body(config, &args)?;
    let envelope = ReportEnvelope {
        tool_version: env!("CARGO_PKG_VERSION"),
        command: name,
        config_sha256: sha,
        pass,
        results,
    };
    let json = serde_json::to_string_pretty(&envelope).expect("reports serialize");
    println!("{json}");
    if let Some(out) = &args.out {
        fs::write(out.join(format!("{name}.json")), format!("{json}\n"))?;
    }
    Ok(pass)
}

#[derive(Serialize)]
struct ReportEnvelope<R: Serialize> {
    tool_version: &'static str,
    command: &'static str,
    config_sha256: String,
    pass: bool,
    results: R,
}

#[derive(Serialize)]
struct Check {
    name: String,
    metric: f64,
    tolerance: f64,
    pass: bool,
}

// ---------------------------------------------------------------------------
// Kernel construction from config
// ---------------------------------------------------------------------------

#[derive(Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct KernelSpec {
    /// "gaussian" | "stable" | "levy" | "tabulated"
    kind: String,
    d: usize,
    #[serde(default)]
    alpha: Option<f64>,
    /// Lévy symbol tag: "cauchy" (ψ = |ξ|) or "log" (ψ = |ξ|√log(1+|ξ|)).
    #[serde(default)]
    psi_tag: Option<String>,
    /// CSV path for tabulated kernels (columns t,r,value over a full grid).
    #[serde(default)]
    table_path: Option<String>,
}

fn quad_cfg() -> QuadratureConfig<f64> {
    QuadratureConfig::with_tols(1e-8, 1e-11)
}

fn build_kernel(spec: &KernelSpec) -> Result<Kernel64, Failure> {
    match spec.kind.as_str() {
        "gaussian" => Ok(Kernel::gaussian(spec.d)),
        "stable" => {
            let alpha = spec
                .alpha
                .ok_or_else(|| Failure::Config("stable kernel needs `alpha`".into()))?;
            Ok(Kernel::stable(alpha, spec.d, quad_cfg())?)
        }
        "levy" => {
            let tag = spec
                .psi_tag
                .clone()
                .ok_or_else(|| Failure::Config("levy kernel needs `psi_tag`".into()))?;
            let symbol = match tag.as_str() {
                "cauchy" => LevySymbol::new("cauchy", |r: f64| r),
                "log" => LevySymbol::new("log", |r: f64| r * (1.0 + r).ln().sqrt()),
                other => {
                    return Err(Failure::Config(format!(
                        "unknown psi_tag `{other}` (expected cauchy|log)"
                    )))
                }
            };
            Ok(Kernel::levy(symbol, spec.d, quad_cfg()))
        }
        "tabulated" => {
            let path = spec
                .table_path
                .clone()
                .ok_or_else(|| Failure::Config("tabulated kernel needs `table_path`".into()))?;
            let table = load_table(Path::new(&path))?;
            Ok(Kernel::tabulated(table, spec.d))
        }
        other => Err(Failure::Config(format!(
            "unknown kernel kind `{other}` (expected gaussian|stable|levy|tabulated)"
        ))),
    }
}

/// Reads a t,r,value CSV into a tabulated kernel; the (t, r) pairs must
/// tile a full grid.
fn load_table(path: &Path) -> Result<TabulatedKernel<f64>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 && line.trim() == "t,r,value" {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let parse = |s: &str| s.trim().parse::<f64>().ok();
        match (
            cols.first().and_then(|s| parse(s)),
            cols.get(1).and_then(|s| parse(s)),
            cols.get(2).and_then(|s| parse(s)),
            cols.len(),
        ) {
            (Some(t), Some(r), Some(v), 3) => rows.push((t, r, v)),
            _ => {
                return Err(Failure::Config(format!(
                    "corrupted table row {} in {}: `{line}`",
                    i + 1,
                    path.display()
                )))
            }
        }
    }
    let mut ts: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let mut rs: Vec<f64> = rows.iter().map(|r| r.1).collect();
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup();
    rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rs.dedup();
    let mut values = vec![f64::NAN; ts.len() * rs.len()];
    for (t, r, v) in &rows {
        let i = ts.iter().position(|x| x == t).unwrap();
        let j = rs.iter().position(|x| x == r).unwrap();
        values[i * rs.len() + j] = *v;
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Failure::Config("table does not tile a full (t, r) grid".into()));
    }
    TabulatedKernel::new(ts, rs, values).map_err(|e| Failure::Config(e.to_string()))
}

// ---------------------------------------------------------------------------
// verify-kernel
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelConfig {
    kernel: KernelSpec,
    #[serde(default = "default_t_values")]
    t_values: Vec<f64>,
    #[serde(default = "default_x_values")]
    x_values: Vec<f64>,
    #[serde(default = "default_tolerance")]
    tolerance: f64,
}

fn default_t_values() -> Vec<f64> {
    vec![0.5, 1.0]
}

fn default_x_values() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}

fn default_tolerance() -> f64 {
    1e-6
}

fn cmd_verify_kernel(cfg: KernelConfig, _args: &CommonArgs) -> Result<(bool, Vec<Check>), Failure> {
    // a corrupted table is a verification failure for this command, not a
    // config error: validating the kernel data is the command's job
    let k = match build_kernel(&cfg.kernel) {
        Ok(k) => k,
        Err(Failure::Config(msg)) if cfg.kernel.kind == "tabulated" => {
            return Ok((
                false,
                vec![Check {
                    name: format!("tabulated data valid ({msg})"),
                    metric: f64::NAN,
                    tolerance: 0.0,
                    pass: false,
                }],
            ));
        }
        Err(other) => return Err(other),
    };
    let qc = quad_cfg();
    let mut checks = Vec::new();
    for &t in &cfg.t_values {
        if !(t > 0.0) {
            return Err(Failure::Config("t_values must be positive".into()));
        }
        // positivity on a radial sample
        let mut worst = f64::INFINITY;
        for i in 0..40 {
            let r = 10f64.powf(-2.0 + 4.0 * i as f64 / 39.0);
            worst = worst.min(k.eval_radial(t, r)?);
        }
        checks.push(Check {
            name: format!("positivity t={t}"),
            metric: worst,
            tolerance: 0.0,
            pass: worst >= 0.0,
        });
        // total mass: 1 for exact kernels, <= 1 + tol for sub-Markov data
        let mass = integrate_radial(|r: f64| k.eval_radial(t, r).unwrap_or(f64::NAN), k.dim(), &qc)?
            .require_converged()?
            .value;
        let (metric, pass) = if k.has_closed_form() {
            ((mass - 1.0).abs(), (mass - 1.0).abs() <= cfg.tolerance)
        } else {
            (mass, mass <= 1.0 + cfg.tolerance)
        };
        checks.push(Check {
            name: format!("mass t={t}"),
            metric,
            tolerance: cfg.tolerance,
            pass,
        });
    }
    // Chapman–Kolmogorov p_s * p_t = p_{s+t} at sampled separations;
    // interpolated tables are not expected to satisfy it and skip this
    if cfg.kernel.kind != "tabulated" {
        let (s, t) = (cfg.t_values[0], *cfg.t_values.last().unwrap());
        for &x in &cfg.x_values {
            let conv = two_center_integral(
                &|u: f64| k.eval_radial(s, u).unwrap_or(f64::NAN),
                &|v: f64| k.eval_radial(t, v).unwrap_or(f64::NAN),
                x,
                k.dim(),
                &qc,
            )?
            .require_converged()?
            .value;
            let want = k.eval_radial(s + t, x)?;
            let rel = ((conv - want) / want).abs();
            checks.push(Check {
                name: format!("chapman-kolmogorov s={s} t={t} x={x}"),
                metric: rel,
                tolerance: 100.0 * cfg.tolerance,
                pass: rel <= 100.0 * cfg.tolerance,
            });
        }
    }
    Ok((checks.iter().all(|c| c.pass), checks))
}

// ---------------------------------------------------------------------------
// verify-supermedian
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SupermedianConfig {
    kernel: KernelSpec,
    r_exponent: f64,
    #[serde(default = "default_t_values")]
    t_values: Vec<f64>,
    #[serde(default = "default_x_values")]
    x_values: Vec<f64>,
    #[serde(default = "default_margin_tolerance")]
    tolerance: f64,
}

fn default_margin_tolerance() -> f64 {
    1e-8
}

fn cmd_verify_supermedian(
    cfg: SupermedianConfig,
    _args: &CommonArgs,
) -> Result<(bool, Vec<Check>), Failure> {
    let k = build_kernel(&cfg.kernel)?;
    let d = k.dim() as f64;
    // hypothesis of the power-supermedian bound: r <= d − α (stable),
    // r <= d − 2 (Gaussian); violations are config errors, not failures
    let r_max = match cfg.kernel.kind.as_str() {
        "gaussian" => d - 2.0,
        "stable" => d - cfg.kernel.alpha.unwrap_or(f64::NAN),
        other => {
            return Err(Failure::Config(format!(
                "supermedian power bound supports gaussian|stable kernels, got {other}"
            )))
        }
    };
    if !(cfg.r_exponent >= 0.0 && cfg.r_exponent <= r_max) {
        return Err(Failure::Config(format!(
            "hypothesis violated: need 0 <= r <= {r_max}, got r = {}",
            cfg.r_exponent
        )));
    }
    let qc = quad_cfg();
    let mut checks = Vec::new();
    for &t in &cfg.t_values {
        for &x in &cfg.x_values {
            let margin = power_supermedian_margin(&k, cfg.r_exponent, t, x, &qc)?;
            checks.push(Check {
                name: format!("margin r={} t={t} x={x}", cfg.r_exponent),
                metric: margin,
                tolerance: cfg.tolerance,
                pass: margin >= -cfg.tolerance,
            });
        }
    }
    Ok((checks.iter().all(|c| c.pass), checks))
}

// ---------------------------------------------------------------------------
// verify-hardy
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HardyConfig {
    kernel: KernelSpec,
    /// Time-weight exponent β (stable/levy pairs).
    #[serde(default)]
    beta: Option<f64>,
    /// Gaussian closed-form exponent γ: h = c·|x|^{γ+2−d}.
    #[serde(default)]
    gamma: Option<f64>,
    /// "standard" (6 functions) or "quick" (2 functions).
    #[serde(default = "default_battery")]
    battery: String,
    /// Check the equality residual, not just the inequality margin.
    #[serde(default = "default_true")]
    equality: bool,
}

fn default_battery() -> String {
    "standard".into()
}

fn default_true() -> bool {
    true
}

fn cmd_verify_hardy(
    cfg: HardyConfig,
    args: &CommonArgs,
) -> Result<(bool, Vec<HardyReport>), Failure> {
    let qc = QuadratureConfig::with_tols(1e-7, 1e-10);
    let (pair, alpha) = match cfg.kernel.kind.as_str() {
        "stable" => {
            let alpha = cfg
                .alpha()
                .ok_or_else(|| Failure::Config("stable kernel needs `alpha`".into()))?;
            let beta = cfg
                .beta
                .ok_or_else(|| Failure::Config("stable pair needs `beta`".into()))?;
            let p = StableParams::new(cfg.kernel.d, alpha, beta)?;
            (SupermedianPair::stable_closed(p, qc.clone())?, alpha)
        }
        "gaussian" => {
            let gamma = cfg
                .gamma
                .ok_or_else(|| Failure::Config("gaussian pair needs `gamma`".into()))?;
            (SupermedianPair::gaussian_closed(cfg.kernel.d, gamma)?, 2.0)
        }
        "levy" => {
            let beta = cfg
                .beta
                .ok_or_else(|| Failure::Config("levy pair needs `beta`".into()))?;
            let k = Arc::new(build_kernel(&cfg.kernel)?);
            let pair = SupermedianPair::numeric(
                k,
                TimeWeight::new(beta)?,
                AtomicMeasure::delta_origin(cfg.kernel.d),
            )?;
            (pair, 1.0)
        }
        other => {
            return Err(Failure::Config(format!(
                "verify-hardy supports gaussian|stable|levy kernels, got {other}"
            )))
        }
    };
    let functions = match cfg.battery.as_str() {
        "standard" => battery(cfg.kernel.d, alpha),
        "quick" => quick_battery(cfg.kernel.d, alpha),
        other => {
            return Err(Failure::Config(format!(
                "unknown battery `{other}` (expected standard|quick)"
            )))
        }
    };
    let jobs = args.jobs.max(1);
    let mut reports: Vec<Option<Result<HardyReport, hardy_core::Error>>> =
        (0..functions.len()).map(|_| None).collect();
    // battery items are independent; reports are re-assembled in order
    std::thread::scope(|scope| {
        for (chunk_funcs, chunk_out) in functions
            .chunks(functions.len().div_ceil(jobs))
            .zip(reports.chunks_mut(functions.len().div_ceil(jobs)))
        {
            let pair = &pair;
            let qc = &qc;
            scope.spawn(move || {
                for (u, out) in chunk_funcs.iter().zip(chunk_out.iter_mut()) {
                    *out = Some(hardy_verify(pair, u, qc));
                }
            });
        }
    });
    let mut results = Vec::with_capacity(functions.len());
    for r in reports {
        results.push(r.expect("all battery items ran")?);
    }
    let pass = results
        .iter()
        .all(|r| r.pass_inequality && (!cfg.equality || r.pass_equality));
    if let Some(out) = &args.out {
        let json = serde_json::to_string_pretty(&results).expect("reports serialize");
        fs::write(out.join("hardy-reports.json"), format!("{json}\n"))?;
    }
    Ok((pass, results))
}

impl HardyConfig {
    fn alpha(&self) -> Option<f64> {
        self.kernel.alpha
    }
}

// ---------------------------------------------------------------------------
// verify-perturbation
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PerturbationConfig {
    kernel: KernelSpec,
    grid: GridSpec,
    q: WeightSpec,
    /// Supermedian values h(x) = |x|^{−h_exponent} for the margin check.
    #[serde(default)]
    h_exponent: Option<f64>,
    #[serde(default = "default_n_terms")]
    n_terms: usize,
    /// Compare the partial sum against e^{ct}·p_t (constant q only).
    #[serde(default)]
    feynman_kac_oracle: bool,
}

fn default_n_terms() -> usize {
    4
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSpec {
    /// "line" (d = 1) or "radial" (d = 3).
    kind: String,
    #[serde(default)]
    half_width: Option<f64>,
    #[serde(default)]
    r_min: Option<f64>,
    #[serde(default)]
    r_max: Option<f64>,
    n: usize,
    t_max: f64,
    m: usize,
    #[serde(default)]
    grid_tol: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightSpec {
    /// "zero" | "constant" | "inverse_power" (q = value·|x|^{−exponent}).
    kind: String,
    #[serde(default)]
    value: Option<f64>,
    #[serde(default)]
    exponent: Option<f64>,
}

fn cmd_verify_perturbation(
    cfg: PerturbationConfig,
    args: &CommonArgs,
) -> Result<(bool, Vec<Check>), Failure> {
    let kernel = Arc::new(build_kernel(&cfg.kernel)?);
    let mut grid = match cfg.grid.kind.as_str() {
        "line" => SpaceTimeGrid::line(
            cfg.grid
                .half_width
                .ok_or_else(|| Failure::Config("line grid needs `half_width`".into()))?,
            cfg.grid.n,
            cfg.grid.t_max,
            cfg.grid.m,
        )?,
        "radial" => SpaceTimeGrid::radial(
            cfg.grid
                .r_min
                .ok_or_else(|| Failure::Config("radial grid needs `r_min`".into()))?,
            cfg.grid
                .r_max
                .ok_or_else(|| Failure::Config("radial grid needs `r_max`".into()))?,
            cfg.grid.n,
            cfg.grid.t_max,
            cfg.grid.m,
        )?,
        other => {
            return Err(Failure::Config(format!(
                "unknown grid kind `{other}` (expected line|radial)"
            )))
        }
    };
    if let Some(tol) = cfg.grid.grid_tol {
        if !(tol > 0.0) {
            return Err(Failure::Config("grid_tol must be positive".into()));
        }
        grid.grid_tol = tol;
    }
    let grid_tol = grid.grid_tol;
    let c = cfg.q.value.unwrap_or(1.0);
    let q: Box<dyn Fn(f64) -> f64> = match cfg.q.kind.as_str() {
        "zero" => Box::new(|_| 0.0),
        "constant" => Box::new(move |_| c),
        "inverse_power" => {
            let p = cfg
                .q
                .exponent
                .ok_or_else(|| Failure::Config("inverse_power q needs `exponent`".into()))?;
            Box::new(move |x: f64| c * x.abs().powf(-p))
        }
        other => {
            return Err(Failure::Config(format!(
                "unknown q kind `{other}` (expected zero|constant|inverse_power)"
            )))
        }
    };
    if cfg.feynman_kac_oracle && cfg.q.kind != "constant" {
        return Err(Failure::Config(
            "the Feynman–Kac oracle needs a constant q".into(),
        ));
    }
    let mut series = PerturbationSeries::discretize(kernel.clone(), q, grid, &quad_cfg())?;
    series.extend(cfg.n_terms)?;
    let mut checks = Vec::new();
    // entrywise nonnegativity of every term
    let mut min_entry = f64::INFINITY;
    for n in 0..series.n_terms() {
        for mat in series.term(n) {
            for &v in mat {
                min_entry = min_entry.min(v);
            }
        }
    }
    checks.push(Check {
        name: "terms nonnegative".into(),
        metric: min_entry,
        tolerance: 0.0,
        pass: min_entry >= 0.0,
    });
    let last = series.grid().times().len() - 1;
    if cfg.feynman_kac_oracle {
        let t = *series.grid().times().last().unwrap();
        let nodes = series.grid().nodes().to_vec();
        let nn = nodes.len();
        let sum = &series.partial_sum()[last];
        let mut worst = 0.0f64;
        for &(a, b) in &[(nn / 2, nn / 2), (nn / 2, nn / 2 + 2)] {
            let want = (c * t).exp() * kernel.eval_radial(t, (nodes[a] - nodes[b]).abs())?;
            worst = worst.max(((sum[a * nn + b] - want) / want).abs());
        }
        checks.push(Check {
            name: format!("feynman-kac oracle ct={}", c * t),
            metric: worst,
            tolerance: grid_tol,
            pass: worst <= grid_tol,
        });
    }
    if let Some(rexp) = cfg.h_exponent {
        let h: Vec<f64> = series
            .grid()
            .nodes()
            .iter()
            .map(|&x| x.abs().powf(-rexp))
            .collect();
        let rep = nonexplosion_check(&series, &h, last)?;
        checks.push(Check {
            name: format!("non-explosion margin h=|x|^-{rexp}"),
            metric: rep.min_margin,
            tolerance: 5.0 * grid_tol,
            pass: rep.min_margin >= -5.0 * grid_tol,
        });
        checks.push(Check {
            name: "margin settling".into(),
            metric: rep.decrements.last().copied().unwrap_or(0.0),
            tolerance: 0.0,
            pass: !rep.diverging,
        });
    }
    if let Some(out) = &args.out {
        for n in 0..series.n_terms() {
            let mut buf = Vec::new();
            series.write_csv(n, &mut buf)?;
            fs::write(out.join(format!("term_{n}.csv")), buf)?;
        }
    }
    Ok((checks.iter().all(|c| c.pass), checks))
}

// ---------------------------------------------------------------------------
// scaling-report
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScalingConfig {
    functions: Vec<FunctionSpec>,
    /// Also verify WLSC(1/ᾱ, c̄^{−1/ᾱ}) of the generalized inverse.
    #[serde(default)]
    check_inverse: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionSpec {
    tag: String,
    /// "power" (r^alpha) | "r_sqrt_log" (r√log(1+r)).
    kind: String,
    #[serde(default)]
    alpha: Option<f64>,
    /// Declared (index, constant) pairs.
    wlsc: (f64, f64),
    wusc: (f64, f64),
}

fn cmd_scaling_report(
    cfg: ScalingConfig,
    _args: &CommonArgs,
) -> Result<(bool, Vec<ScalingReport>), Failure> {
    let grid = SampleGrid::<f64>::standard();
    let mut reports = Vec::new();
    for spec in &cfg.functions {
        let f: Box<dyn Fn(f64) -> f64> = match spec.kind.as_str() {
            "power" => {
                let a = spec
                    .alpha
                    .ok_or_else(|| Failure::Config("power function needs `alpha`".into()))?;
                Box::new(move |r: f64| r.powf(a))
            }
            "r_sqrt_log" => Box::new(|r: f64| r * (1.0 + r).ln().sqrt()),
            other => {
                return Err(Failure::Config(format!(
                    "unknown function kind `{other}` (expected power|r_sqrt_log)"
                )))
            }
        };
        reports.push(check_wlsc(&f, &spec.tag, spec.wlsc.0, spec.wlsc.1, &grid)?);
        reports.push(check_wusc(&f, &spec.tag, spec.wusc.0, spec.wusc.1, &grid)?);
        if cfg.check_inverse {
            let (au, cu) = spec.wusc;
            let inv =
                |u: f64| generalized_inverse(&f, u).expect("declared profiles are unbounded");
            reports.push(check_wlsc(
                &inv,
                &format!("{}_inverse", spec.tag),
                1.0 / au,
                cu.powf(-1.0 / au),
                &grid,
            )?);
        }
    }
    Ok((reports.iter().all(|r| r.pass), reports))
}
