//! Config-driven experiments: parse a TOML run description, solve, run
//! verification suites, sweep a parameter, and persist the results.
//!
//! A minimal config:
//!
//! ```toml
//! [domain]
//! dim = 1
//! n = 32
//!
//! [model]
//! gamma = 1.0
//! alpha = 1.0
//! beta = 1.0
//! f = "sinpi"
//! ```
//!
//! Absent keys take the defaults documented on each section struct.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::biconjugate::biconjugate_bruteforce;
use crate::error::{Error, Result};
use crate::functional::gl_dc_split;
use crate::io::{fmt_num, read_field_csv, write_field_csv};
use crate::linalg::loglog_slope;
use crate::mesh::{Field, Mesh};
use crate::penalty::{default_radius, solve_kkt, verify_penalty_kkt};
use crate::polar_dual::{default_k, verify_polar_duality};
use crate::primal::{eval_j, newton_solve, GLParams, RegParams, SolveReport};
use crate::report::CheckReport;
use crate::residual::verify_residual_minimum;
use crate::toland::{coupling_determinant, verify_toland, PROBE_DET_K};
use crate::triple_dual::verify_exactness;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: DomainConfig,
    pub model: ModelConfig,
    #[serde(default)]
    pub reg: RegConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub checks: ChecksConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub dim: usize,
    pub n: usize,
    /// Side length of the square domain, default 1.
    #[serde(default = "one")]
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `const:<real>`, `sinpi` or `file:<path>` (relative to the config).
    pub f: String,
}

/// Regularization constants. `K` defaults to
/// `max(100γ, 10(2αβ + 6α‖u₀‖∞²))` once `u₀` is known, `K1` to `100K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegConfig {
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(rename = "K1", default, skip_serializing_if = "Option::is_none")]
    pub k1: Option<f64>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_eps1")]
    pub eps1: f64,
    #[serde(rename = "K3", default = "default_k3")]
    pub k3: f64,
}

impl Default for RegConfig {
    fn default() -> Self {
        RegConfig {
            k: None,
            k1: None,
            eps: default_eps(),
            eps1: default_eps1(),
            k3: default_k3(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: default_tol(),
            max_iter: default_max_iter(),
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksConfig {
    /// Suites run by `verify` when no suite is named on the command line.
    #[serde(default = "default_suites")]
    pub suites: Vec<String>,
    /// Random samples per sampled inequality.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Tolerance on the finite-difference gradients of the exact dual.
    #[serde(default = "default_gradient_tol")]
    pub gradient_tol: f64,
    /// Nodes per axis of the brute-force biconjugate mesh (at most two
    /// unknowns in total).
    #[serde(default = "one_usize")]
    pub biconj_n: usize,
    /// Half-width of the biconjugate sampling box.
    #[serde(default = "two")]
    pub biconj_box: f64,
    #[serde(default = "default_biconj_points")]
    pub biconj_points: usize,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        ChecksConfig {
            suites: default_suites(),
            samples: default_samples(),
            gradient_tol: default_gradient_tol(),
            biconj_n: 1,
            biconj_box: 2.0,
            biconj_points: default_biconj_points(),
        }
    }
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn one_usize() -> usize {
    1
}
fn default_eps() -> f64 {
    1e-3
}
fn default_eps1() -> f64 {
    1e-2
}
fn default_k3() -> f64 {
    10.0
}
fn default_tol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    100
}
fn default_seed() -> u64 {
    42
}
fn default_suites() -> Vec<String> {
    vec!["all".into()]
}
fn default_samples() -> usize {
    100
}
fn default_gradient_tol() -> f64 {
    1e-6
}
fn default_biconj_points() -> usize {
    401
}

/// Source term specification.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceSpec {
    Const(f64),
    SinPi,
    File(PathBuf),
}

impl FromStr for SourceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "sinpi" {
            Ok(SourceSpec::SinPi)
        } else if let Some(v) = s.strip_prefix("const:") {
            v.trim()
                .parse()
                .map(SourceSpec::Const)
                .map_err(|_| Error::Config(format!("model.f: `{v}` is not a number")))
        } else if let Some(p) = s.strip_prefix("file:") {
            Ok(SourceSpec::File(PathBuf::from(p.trim())))
        } else {
            Err(Error::Config(format!(
                "model.f: expected `const:<real>`, `sinpi` or `file:<path>`, got `{s}`"
            )))
        }
    }
}

impl SourceSpec {
    /// Samples the source on `mesh`. `sinpi` is `sin(πx/L)·sin(πy/L)` in 2D.
    pub fn sample(&self, mesh: Mesh, base: &Path) -> Result<Field> {
        match self {
            SourceSpec::Const(c) => Ok(Field::constant(mesh, *c)),
            SourceSpec::SinPi => {
                let w = std::f64::consts::PI / mesh.length();
                let dim = mesh.dim();
                Ok(Field::from_fn(mesh, |x, y| {
                    let s = (w * x).sin();
                    if dim == 2 {
                        s * (w * y).sin()
                    } else {
                        s
                    }
                }))
            }
            SourceSpec::File(p) => read_field_csv(&base.join(p), &mesh),
        }
    }
}

/// Parses and validates a config. Relative `file:` paths are not read here.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let named = |section: &str, e: Error| match e {
            Error::InvalidParameter(m) | Error::InvalidMesh(m) => Error::Config(format!("[{section}] {m}")),
            other => other,
        };
        Mesh::new(self.domain.dim, self.domain.n, self.domain.length).map_err(|e| named("domain", e))?;
        let m = &self.model;
        let probe = Mesh::new(1, 1, 1.0)?;
        GLParams::new(m.gamma, m.alpha, m.beta, Field::zeros(probe)).map_err(|e| named("model", e))?;
        self.model.f.parse::<SourceSpec>()?;
        let k = self.reg.k.unwrap_or(100.0);
        RegParams::new(k, self.reg.k1.unwrap_or(100.0 * k), self.reg.eps, self.reg.eps1, self.reg.k3)
            .map_err(|e| named("reg", e))?;
        if !(self.solver.tol > 0.0) || self.solver.max_iter == 0 {
            return Err(Error::Config("[solver] tol must be > 0 and max_iter ≥ 1".into()));
        }
        for s in &self.checks.suites {
            s.parse::<Suite>()?;
        }
        if self.checks.samples == 0 || !(self.checks.gradient_tol > 0.0) {
            return Err(Error::Config("[checks] samples must be ≥ 1 and gradient_tol > 0".into()));
        }
        Ok(())
    }

    /// Copy with one parameter replaced; used by sweeps.
    pub fn with_param(&self, param: SweepParam, value: f64) -> Result<Self> {
        let mut c = self.clone();
        match param {
            SweepParam::K => c.reg.k = Some(value),
            SweepParam::K1 => c.reg.k1 = Some(value),
            SweepParam::Eps => c.reg.eps = value,
            SweepParam::Eps1 => c.reg.eps1 = value,
            SweepParam::Gamma => c.model.gamma = value,
            SweepParam::Alpha => c.model.alpha = value,
            SweepParam::Beta => c.model.beta = value,
            SweepParam::N => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(Error::Config(format!("n must be a positive integer, got {value}")));
                }
                c.domain.n = value as usize;
            }
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Thm1,
    Thm2,
    Thm3Penalty,
    Toland,
    ExactDual,
    Biconj,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Thm1,
        Suite::Thm2,
        Suite::Thm3Penalty,
        Suite::Toland,
        Suite::ExactDual,
        Suite::Biconj,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Thm1 => "thm1",
            Suite::Thm2 => "thm2",
            Suite::Thm3Penalty => "thm3-penalty",
            Suite::Toland => "toland",
            Suite::ExactDual => "exact-dual",
            Suite::Biconj => "biconj",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    K,
    K1,
    Eps,
    Eps1,
    Gamma,
    Alpha,
    Beta,
    N,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::K => "K",
            SweepParam::K1 => "K1",
            SweepParam::Eps => "eps",
            SweepParam::Eps1 => "eps1",
            SweepParam::Gamma => "gamma",
            SweepParam::Alpha => "alpha",
            SweepParam::Beta => "beta",
            SweepParam::N => "n",
        }
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use SweepParam::*;
        [K, K1, Eps, Eps1, Gamma, Alpha, Beta, N]
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown sweep parameter `{s}` (expected K, K1, eps, eps1, gamma, alpha, beta or n)"
                ))
            })
    }
}

/// A parsed config with its sampled source term, ready to run.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub params: GLParams,
    base_dir: PathBuf,
}

/// Primal critical point with its solver history.
#[derive(Debug, Clone)]
pub struct Solved {
    pub u0: Field,
    pub solve: SolveReport,
    pub reg: RegParams,
}

impl Experiment {
    /// `base_dir` resolves relative `file:` sources.
    pub fn new(config: ExperimentConfig, base_dir: impl Into<PathBuf>) -> Result<Self> {
        config.validate()?;
        let base_dir = base_dir.into();
        let d = &config.domain;
        let mesh = Mesh::new(d.dim, d.n, d.length)?;
        let spec: SourceSpec = config.model.f.parse()?;
        let f = spec.sample(mesh, &base_dir)?;
        let m = &config.model;
        let params = GLParams::new(m.gamma, m.alpha, m.beta, f)?;
        Ok(Experiment {
            config,
            params,
            base_dir,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg = parse_config(&text)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Experiment::new(cfg, base)
    }

    pub fn seed(&self) -> u64 {
        self.config.solver.seed
    }

    /// Newton from zero; the regularization constants are completed from
    /// the solution.
    pub fn solve(&self) -> Result<Solved> {
        let s = &self.config.solver;
        let (u0, solve) = newton_solve(&self.params, &Field::zeros(*self.params.mesh()), s.tol, s.max_iter)?;
        let rc = &self.config.reg;
        let k = rc.k.unwrap_or_else(|| default_k(&self.params, &u0));
        let reg = RegParams::new(k, rc.k1.unwrap_or(100.0 * k), rc.eps, rc.eps1, rc.k3)?;
        Ok(Solved { u0, solve, reg })
    }

    fn config_echo(&self, reg: Option<&RegParams>) -> serde_json::Value {
        let mut v = serde_json::to_value(&self.config).unwrap_or_default();
        if let (Some(r), Some(obj)) = (reg, v.get_mut("reg").and_then(|x| x.as_object_mut())) {
            obj.insert("K".into(), r.k_big.into());
            obj.insert("K1".into(), r.k1.into());
        }
        v
    }

    /// Runs one suite, or every suite under `all` with check names prefixed
    /// by the suite. Solver non-convergence yields a report whose
    /// `newton_converged` premise fails.
    pub fn run_suite(&self, suite: Suite) -> Result<CheckReport> {
        if suite == Suite::Biconj {
            let mut rep = self.biconj_report()?;
            rep.config_echo = self.config_echo(None);
            return Ok(rep);
        }
        let solved = self.solve()?;
        let mut rep = CheckReport::new(suite.name());
        rep.config_echo = self.config_echo(Some(&solved.reg));
        if !solved.solve.converged {
            rep.premise("newton_converged", solved.solve.final_residual, self.config.solver.tol);
            return Ok(rep);
        }
        let suites: Vec<Suite> = if suite == Suite::All {
            Suite::EACH.to_vec()
        } else {
            vec![suite]
        };
        for s in suites {
            let sub = match s {
                Suite::Biconj => self.biconj_report(),
                other => self.run_solved(other, &solved),
            };
            let sub = match sub {
                Ok(r) => r,
                Err(e @ (Error::NoConvergence { .. } | Error::NotPositiveDefinite { .. })) => {
                    let mut r = CheckReport::new(s.name());
                    r.premise("solver", f64::INFINITY, 0.0);
                    eprintln!("{}: {e}", s.name());
                    r
                }
                Err(e) => return Err(e),
            };
            if suite == Suite::All {
                rep.absorb(s.name(), sub);
            } else {
                rep.checks = sub.checks;
                rep.values = sub.values;
            }
        }
        Ok(rep)
    }

    fn run_solved(&self, suite: Suite, solved: &Solved) -> Result<CheckReport> {
        let p = &self.params;
        let (u0, r) = (&solved.u0, &solved.reg);
        let (samples, seed) = (self.config.checks.samples, self.seed());
        let s = &self.config.solver;
        match suite {
            Suite::Thm1 => verify_polar_duality(p, r.k_big, u0, samples, seed),
            Suite::Thm2 => verify_residual_minimum(p, r, u0, samples, seed),
            Suite::Thm3Penalty => {
                let (state, rep) = solve_kkt(p, r, u0, s.tol, s.max_iter)?;
                let mut out = verify_penalty_kkt(p, r, &state, default_radius(&state.u), samples, seed)?;
                out.premise("kkt_converged", rep.final_residual, s.tol.max(1e-10));
                Ok(out)
            }
            Suite::Toland => verify_toland(p, r, u0, samples, seed),
            Suite::ExactDual => verify_exactness(p, r, u0, self.config.checks.gradient_tol, seed),
            Suite::Biconj | Suite::All => unreachable!("dispatched by run_suite"),
        }
    }

    /// Mesh and source used by the brute-force biconjugate.
    pub fn biconj_params(&self) -> Result<GLParams> {
        let c = &self.config;
        let mesh = Mesh::new(c.domain.dim, c.checks.biconj_n, c.domain.length)?;
        let spec: SourceSpec = c.model.f.parse()?;
        let f = spec.sample(mesh, &self.base_dir)?;
        let p = &self.params;
        GLParams::new(p.gamma, p.alpha, p.beta, f)
    }

    pub fn biconj_report(&self) -> Result<CheckReport> {
        let c = &self.config.checks;
        let p = self.biconj_params()?;
        let b = biconjugate_bruteforce(&gl_dc_split(&p), -c.biconj_box, c.biconj_box, c.biconj_points)?;
        Ok(b.report())
    }

    /// Writes `u0.csv` and `solve.json` under `out`.
    pub fn write_solution(&self, solved: &Solved, out: &Path) -> Result<()> {
        create_dir(out)?;
        write_field_csv(&out.join("u0.csv"), &solved.u0)?;
        let summary = serde_json::json!({
            "solve": solved.solve,
            "J": eval_j(&self.params, &solved.u0)?,
            "reg": solved.reg,
            "config_echo": self.config_echo(Some(&solved.reg)),
        });
        write_text(&out.join("solve.json"), &(serde_json::to_string_pretty(&summary)? + "\n"))
    }
}

/// Process exit status for a finished report: 0 when every check passes,
/// 3 when a premise fails, 1 otherwise.
pub fn exit_code(rep: &CheckReport) -> u8 {
    if !rep.premises_hold() {
        3
    } else if rep.passed() {
        0
    } else {
        1
    }
}

/// Exit status for an error: 2 for usage, config and file problems, 3 for
/// numerical failures.
pub fn error_exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::UnknownSuite(_)
        | Error::Io { .. }
        | Error::Csv { .. }
        | Error::InvalidMesh(_)
        | Error::InvalidParameter(_)
        | Error::MinimizerOnBoundary { .. } => 2,
        _ => 3,
    }
}

pub fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// One sweep row: the parameter value and the suite summary, or the error
/// that stopped the row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: std::result::Result<SweepSummary, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub passed: bool,
    pub premises_hold: bool,
    pub worst_ratio: f64,
    pub k_big: f64,
    pub j: f64,
    /// Determinant of the coupled Toland Hessian on the single-node probe
    /// with `K` fixed at the probe value and `ε` from the row.
    pub det_coupling: f64,
    pub min_eig: f64,
    pub max_eig: f64,
    pub report: CheckReport,
}

const SWEEP_COLUMNS: [&str; 8] = [
    "passed",
    "premises_hold",
    "worst_ratio",
    "K",
    "J",
    "det_coupling",
    "min_eig",
    "max_eig",
];

/// Runs `suite` once per value. Rows run in parallel and fail
/// independently.
pub fn sweep(exp: &Experiment, suite: Suite, param: SweepParam, values: &[f64]) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    Ok(values
        .par_iter()
        .map(|&v| SweepRow {
            value: v,
            outcome: sweep_row(exp, suite, param, v).map_err(|e| e.to_string()),
        })
        .collect())
}

fn sweep_row(exp: &Experiment, suite: Suite, param: SweepParam, v: f64) -> Result<SweepSummary> {
    let cfg = exp.config.with_param(param, v)?;
    let e = Experiment::new(cfg, exp.base_dir.clone())?;
    let report = e.run_suite(suite)?;
    let solved = e.solve()?;
    let det = coupling_determinant(&e.params, PROBE_DET_K, e.config.reg.eps)?.det;
    let eig = |pred: fn(&str) -> bool| report.values.iter().filter(move |(k, _)| pred(k)).map(|(_, v)| *v);
    let min_eig = eig(|k| k.contains("min_eig") && !k.contains("slope")).fold(f64::NAN, f64::min);
    let max_eig = eig(|k| k.contains("max_eig")).fold(f64::NAN, f64::max);
    Ok(SweepSummary {
        passed: report.passed(),
        premises_hold: report.premises_hold(),
        worst_ratio: report.worst_ratio(),
        k_big: solved.reg.k_big,
        j: eval_j(&e.params, &solved.u0)?,
        det_coupling: det,
        min_eig,
        max_eig,
        report,
    })
}

impl SweepSummary {
    fn columns(&self) -> [f64; 8] {
        [
            self.passed as u8 as f64,
            self.premises_hold as u8 as f64,
            self.worst_ratio,
            self.k_big,
            self.j,
            self.det_coupling,
            self.min_eig,
            self.max_eig,
        ]
    }
}

/// CSV with one row per value, then `# slope <column> <value>` lines with
/// the log-log slope of every column that is positive on all rows.
pub fn sweep_csv(param: SweepParam, rows: &[SweepRow]) -> String {
    let mut s = format!("{},{},error\n", param.name(), SWEEP_COLUMNS.join(","));
    for row in rows {
        s += &fmt_num(row.value);
        match &row.outcome {
            Ok(sum) => {
                for c in sum.columns() {
                    s.push(',');
                    s += &fmt_num(c);
                }
                s += ",\n";
            }
            Err(msg) => {
                s += &",".repeat(SWEEP_COLUMNS.len());
                let _ = writeln!(s, ",\"{}\"", msg.replace('"', "'"));
            }
        }
    }
    let ok: Vec<(f64, &SweepSummary)> = rows
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok().map(|o| (r.value, o)))
        .collect();
    if ok.len() >= 2 && ok.iter().all(|(v, _)| *v > 0.0) {
        let xs: Vec<f64> = ok.iter().map(|(v, _)| *v).collect();
        for (i, name) in SWEEP_COLUMNS.iter().enumerate().skip(2) {
            let ys: Vec<f64> = ok.iter().map(|(_, o)| o.columns()[i]).collect();
            if ys.iter().all(|y| *y > 0.0 && y.is_finite()) {
                let _ = writeln!(s, "# slope {name} {}", fmt_num(loglog_slope(&xs, &ys)));
            }
        }
    }
    s
}

/// Parses a comma-separated list of reals.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let vals = text
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| Error::Config(format!("`{t}` is not a number"))))
        .collect::<Result<Vec<f64>>>()?;
    if vals.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    Ok(vals)
}

/// Sizes the global rayon pool from `GLDUALITY_THREADS` when set.
pub fn init_threads() -> Result<()> {
    let Ok(text) = std::env::var("GLDUALITY_THREADS") else {
        return Ok(());
    };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("GLDUALITY_THREADS must be a positive integer, got `{text}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}
