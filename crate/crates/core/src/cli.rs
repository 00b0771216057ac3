//! Command-line driver.
//!
//! Settings come from built-in defaults, then an optional TOML file given
//! with `--config`, then command-line flags. Later sources win.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::action::divergence_scan;
use crate::counterterm::{write_counterterm_csv, CountertermMethod, CountertermScheme};
use crate::dilaton::{dilaton_counterterm, write_dilaton_csv, DilatonModel};
use crate::dynamics::{solve_bvp, BoundarySpec, BvpTolerance};
use crate::error::Error;
use crate::potential::{check_half_binding, Potential, UserPotential};

/// Largest tolerance accepted anywhere in a run configuration.
pub const MAX_CONFIG_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Geometric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    InverseSquare {
        #[serde(default = "one")]
        strength: f64,
    },
    InversePower {
        strength: f64,
        exponent: f64,
    },
    /// A named entry of [`UserPotential::from_registry`].
    Registry {
        name: String,
        #[serde(default)]
        params: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

impl PotentialConfig {
    pub fn build(&self) -> crate::Result<Potential> {
        match self {
            Self::InverseSquare { strength } => Potential::inverse_square_with_strength(*strength),
            Self::InversePower { strength, exponent } => {
                Potential::inverse_power(*strength, *exponent)
            }
            Self::Registry { name, params } => {
                Ok(Potential::user(UserPotential::from_registry(name, params)?))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            start: 25.0,
            stop: 200.0,
            count: 4,
            spacing: Spacing::Geometric,
        }
    }
}

impl GridConfig {
    /// Grid points with both endpoints exact.
    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|k| {
                if k == n - 1 {
                    return self.stop;
                }
                let s = k as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.start + s * (self.stop - self.start),
                    Spacing::Geometric => self.start * (self.stop / self.start).powf(s),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CountertermConfig {
    pub method: CountertermMethod,
    pub c0: f64,
    /// Evaluation point for the `counterterm` subcommand.
    pub q: f64,
    pub t: f64,
}

impl Default for CountertermConfig {
    fn default() -> Self {
        Self {
            method: CountertermMethod::AnalyticInverseSquare,
            c0: 0.0,
            q: 2.0,
            t: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub integrator: f64,
    pub quadrature: f64,
    pub root: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            integrator: 1e-11,
            quadrature: 1e-10,
            root: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateConfig {
    pub q_lo: f64,
    pub q_hi: f64,
    pub points: usize,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self {
            q_lo: 1e-3,
            q_hi: 1e3,
            points: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DilatonConfig {
    /// Catalog name, see [`DilatonModel::from_catalog`].
    pub model: String,
    pub params: Vec<f64>,
    pub domain: [f64; 2],
    /// Both default to the lower domain edge.
    pub x_ref_u: Option<f64>,
    pub x_ref_v: Option<f64>,
    pub points: usize,
}

impl Default for DilatonConfig {
    fn default() -> Self {
        Self {
            model: "ab".into(),
            params: vec![0.0, 0.0, 1.0],
            domain: [0.0, 4.0],
            x_ref_u: None,
            x_ref_v: None,
            points: 50,
        }
    }
}

impl DilatonConfig {
    pub fn build(&self) -> crate::Result<DilatonModel> {
        let domain = (self.domain[0], self.domain[1]);
        let model = DilatonModel::from_catalog(&self.model, &self.params, domain)?;
        model.with_references(
            self.x_ref_u.unwrap_or(domain.0),
            self.x_ref_v.unwrap_or(domain.0),
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub hbar: f64,
    pub potential: PotentialConfig,
    pub boundary: BoundarySpec,
    pub scan: GridConfig,
    pub counterterm: CountertermConfig,
    pub tolerances: Tolerances,
    pub validate: ValidateConfig,
    pub dilaton: DilatonConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            potential: PotentialConfig::InverseSquare { strength: 1.0 },
            boundary: BoundarySpec::asymptotic_velocity(2.0, 100.0, std::f64::consts::SQRT_2),
            scan: GridConfig::default(),
            counterterm: CountertermConfig::default(),
            tolerances: Tolerances::default(),
            validate: ValidateConfig::default(),
            dilaton: DilatonConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text =
            fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::from_toml(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Checks the invariants that do not depend on the subcommand.
    pub fn check(&self) -> Result<(), String> {
        let t = &self.tolerances;
        for (name, x) in [
            ("integrator", t.integrator),
            ("quadrature", t.quadrature),
            ("root", t.root),
        ] {
            if !(x > 0.0 && x <= MAX_CONFIG_TOL) {
                return Err(format!(
                    "tolerances.{name} = {x} must lie in (0, {MAX_CONFIG_TOL}]"
                ));
            }
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(format!("hbar = {} must be positive", self.hbar));
        }
        let g = &self.scan;
        if g.count < 4 {
            return Err(format!("scan.count = {} must be at least 4", g.count));
        }
        if !(g.start > 0.0 && g.stop > g.start && g.stop.is_finite()) {
            return Err(format!(
                "scan grid [{}, {}] must satisfy 0 < start < stop",
                g.start, g.stop
            ));
        }
        if self.dilaton.points < 2 {
            return Err("dilaton.points must be at least 2".into());
        }
        Ok(())
    }

    fn bvp_tolerance(&self) -> BvpTolerance {
        BvpTolerance {
            root: self.tolerances.root,
            integrator: self.tolerances.integrator,
        }
    }

    fn scheme(&self) -> CountertermScheme {
        CountertermScheme::new(self.counterterm.method)
            .with_c0(self.counterterm.c0)
            .with_tol(self.tolerances.quadrature)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "halfbind",
    version,
    about = "Hamilton-Jacobi counterterms for half-binding potentials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Overrides every tolerance in the configuration
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Analytic,
    Numeric,
    Asymptotic,
}

impl From<MethodArg> for CountertermMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Analytic => Self::AnalyticInverseSquare,
            MethodArg::Numeric => Self::NumericEnvelope,
            MethodArg::Asymptotic => Self::AsymptoticLeading,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that the configured potential is half-binding
    Validate(Common),
    /// Solve the configured boundary problem
    Trajectory(Common),
    /// Evaluate the counterterm at one point
    Counterterm {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        #[arg(long, allow_hyphen_values = true)]
        c0: Option<f64>,
    },
    /// Bare and improved actions over a grid of final times
    Scan {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Dilaton-gravity counterterm on a grid
    Dilaton(Common),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Validate(_) => "validate",
            Self::Trajectory(_) => "trajectory",
            Self::Counterterm { .. } => "counterterm",
            Self::Scan { .. } => "scan",
            Self::Dilaton(_) => "dilaton",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Self::Validate(c) | Self::Trajectory(c) | Self::Dilaton(c) => c,
            Self::Counterterm { common, .. } | Self::Scan { common, .. } => common,
        }
    }
}

/// Process exit status with the message for standard error.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) => Failure::Usage(e.to_string()),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("i/o error: {e}"))
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit status: 0 on success, 1 on a numerical or domain failure,
/// 2 on a usage or configuration error.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = write!(sink, "{text}");
            return code;
        }
    };
    let outcome = resolve(&cli.command).and_then(|config| dispatch(&cli.command, &config, stdout));
    match outcome {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(Failure::Numerical(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
    }
}

fn resolve(command: &Command) -> Result<RunConfig, Failure> {
    let common = command.common();
    let mut config = match &common.config {
        Some(path) => RunConfig::load(path).map_err(Failure::Usage)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &common.out {
        config.output.path = Some(out.clone());
    }
    if let Some(format) = common.format {
        config.output.format = Some(format);
    }
    if let Some(tol) = common.tol {
        let derived = BvpTolerance::from(tol);
        config.tolerances = Tolerances {
            integrator: derived.integrator,
            quadrature: tol,
            root: tol,
        };
    }
    match command {
        Command::Counterterm {
            q, t, method, c0, ..
        } => {
            let ct = &mut config.counterterm;
            ct.q = q.unwrap_or(ct.q);
            ct.t = t.unwrap_or(ct.t);
            ct.c0 = c0.unwrap_or(ct.c0);
            if let Some(m) = method {
                ct.method = (*m).into();
            }
        }
        Command::Scan {
            method: Some(m), ..
        } => config.counterterm.method = (*m).into(),
        _ => {}
    }
    config.check().map_err(Failure::Usage)?;
    Ok(config)
}

fn dispatch(command: &Command, config: &RunConfig, stdout: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Validate(_) => cmd_validate(config, stdout),
        Command::Trajectory(_) => cmd_trajectory(config, stdout),
        Command::Counterterm { .. } => cmd_counterterm(config, stdout),
        Command::Scan { .. } => cmd_scan(config, stdout),
        Command::Dilaton(_) => cmd_dilaton(config, stdout),
    }
    .and_then(|code| {
        if let Some(path) = &config.output.path {
            write_sidecar(path, command.name(), config)?;
        }
        Ok(code)
    })
}

fn sidecar_path(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn write_sidecar(path: &Path, command: &str, config: &RunConfig) -> Result<(), Failure> {
    let doc = serde_json::json!({ "command": command, "config": config });
    write_json(&sidecar_path(path, ".config.json"), &doc)
}

fn write_json(path: &Path, doc: &serde_json::Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(doc).map_err(|e| Failure::Usage(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn json_text(doc: &serde_json::Value) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(doc).expect("json values serialize");
    text.push('\n');
    text.into_bytes()
}

fn emit(config: &RunConfig, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), Failure> {
    match &config.output.path {
        Some(path) => fs::write(path, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

fn cmd_validate(config: &RunConfig, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let pot = config.potential.build()?;
    let v = &config.validate;
    let report = check_half_binding(&pot, v.q_lo, v.q_hi, v.points)?;
    let doc = json_text(&serde_json::json!({ "potential": pot.label(), "report": report }));
    stdout.write_all(&doc)?;
    if let Some(path) = &config.output.path {
        fs::write(path, &doc)?;
    }
    Ok(if report.verdict { 0 } else { 1 })
}

fn cmd_trajectory(config: &RunConfig, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let pot = config.potential.build()?;
    let traj = solve_bvp(&pot, &config.boundary, config.bvp_tolerance())?;
    let bytes = match config.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            traj.write_csv(&mut buf)?;
            buf
        }
        Format::Json => {
            let mut doc = traj.to_json();
            doc["samples"] = serde_json::to_value(traj.samples()).expect("samples serialize");
            json_text(&doc)
        }
    };
    emit(config, &bytes, stdout)?;
    Ok(0)
}

fn cmd_counterterm(config: &RunConfig, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let pot = config.potential.build()?;
    let c = &config.counterterm;
    let ct = config.scheme().evaluate(&pot, c.q, c.t)?;
    let bytes = match config.output.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_counterterm_csv(&mut buf, &[ct])?;
            buf
        }
        Format::Json => json_text(&serde_json::to_value(ct).expect("counterterm serializes")),
    };
    emit(config, &bytes, stdout)?;
    Ok(0)
}

fn cmd_scan(config: &RunConfig, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let pot = config.potential.build()?;
    let grid = config.scan.points();
    let scan = divergence_scan(
        &pot,
        &config.boundary,
        &grid,
        &config.scheme(),
        config.bvp_tolerance(),
        config.hbar,
    )
    .map_err(|e| Failure::Numerical(e.to_string()))?;
    let mut summary = scan.summary_json();
    summary["counterterm_method"] = config.counterterm.method.as_str().into();
    summary["c0"] = config.counterterm.c0.into();
    summary["hbar"] = config.hbar.into();
    let bytes = match config.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            scan.write_csv(&mut buf)?;
            buf
        }
        Format::Json => {
            json_text(&serde_json::json!({ "summary": summary, "points": scan.reports }))
        }
    };
    emit(config, &bytes, stdout)?;
    if let Some(path) = &config.output.path {
        write_json(&sidecar_path(path, ".summary.json"), &summary)?;
    }
    Ok(0)
}

fn cmd_dilaton(config: &RunConfig, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let model = config.dilaton.build()?;
    let tol = config.tolerances.quadrature;
    let (lo, hi) = model.domain();
    let n = config.dilaton.points;
    let rows = (0..n)
        .map(|k| {
            let x = if k == n - 1 {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            };
            dilaton_counterterm(&model, x, tol)
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let bound = (100.0 * tol).max(1e-6);
    let worst = rows
        .iter()
        .filter_map(|r| r.identity_residual)
        .fold(0.0f64, |m, r| m.max(r.abs()));
    let bytes = match config.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_dilaton_csv(&mut buf, &rows)?;
            buf
        }
        Format::Json => json_text(&serde_json::json!({
            "model": model.name(),
            "x_ref_u": model.x_ref_u(),
            "x_ref_v": model.x_ref_v(),
            "max_identity_residual": worst,
            "points": rows,
        })),
    };
    emit(config, &bytes, stdout)?;
    Ok(if worst <= bound { 0 } else { 1 })
}
