use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::PathBuf;

use super::config::Format;
use super::output::{Cell, Report, Table};
use super::CliError;
use crate::dynamics::{classify_blowup, evolve, EvolveOptions, Nonlinearity, WaveField};
use crate::linear::{
    bound_state, dispersive_check, eigenfunction_bounds_check, eigenstate_field, gaussian_field, lemma1_bound_check,
    DispersiveOptions, ModelParams,
};
use crate::stationary::{
    default_p_grid, figure1_dataset, find_all_bifurcations, solve_branch, stability_slope, BranchOptions,
    Figure1Options, LabelledBranch, Regime, SearchBox, SlopeEntry, StationaryState, SLOPE_CAVEAT,
};

/// Outcome of a subcommand: the rendered text and whether a blow-up halt occurred.
pub struct Outcome {
    pub body: String,
    pub output: Option<PathBuf>,
    pub blowup_halt: bool,
}

fn params(a: f64, alpha: f64) -> Result<ModelParams, CliError> {
    ModelParams::new(a, alpha).map_err(CliError::from)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub a: f64,
    pub alpha: f64,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { a: 1.0, alpha: -4.0, format: Format::Json, output: None }
    }
}

pub fn spectrum(cfg: &SpectrumConfig) -> Result<Outcome, CliError> {
    let p = params(cfg.a, cfg.alpha)?;
    let spec = bound_state(&p);
    let bounds = if spec.has_bound_state() { Some(eigenfunction_bounds_check(&p)?) } else { None };
    let b = spec.bound;
    let result = json!({
        "has_bound_state": spec.has_bound_state(),
        "E": b.map(|b| b.energy),
        "h": b.map(|b| b.h),
        "b": b.map(|b| b.b),
        "eigenfunction_bounds": bounds,
    });
    let opt = |x: Option<f64>| x.map(Cell::Real).unwrap_or(Cell::Empty);
    let table = Table {
        notes: vec![],
        columns: vec!["a", "alpha", "has_bound_state", "E", "h", "b"],
        rows: vec![vec![
            Cell::Real(cfg.a),
            Cell::Real(cfg.alpha),
            Cell::Text(spec.has_bound_state().to_string()),
            opt(b.map(|b| b.energy)),
            opt(b.map(|b| b.h)),
            opt(b.map(|b| b.b)),
        ]],
    };
    let body = Report { subcommand: "spectrum", config: cfg, json: result, table }.render(cfg.format)?;
    Ok(Outcome { body, output: cfg.output.clone(), blowup_halt: false })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StationaryConfig {
    pub regime: Regime,
    pub a: f64,
    pub alpha: f64,
    /// Focusing: lower end and spacing of the `eta` grid of the labelled branches.
    pub eta_min: f64,
    pub eta_step: f64,
    /// Defocusing: modulus grid of the root scan.
    pub n_linear: usize,
    pub n_log: usize,
    pub pc_min: f64,
    /// `|slope|` below this value is classified as marginal.
    pub slope_tol: f64,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Default for StationaryConfig {
    fn default() -> Self {
        Self {
            regime: Regime::Focusing,
            a: 1.0,
            alpha: -4.0,
            eta_min: -110.0,
            eta_step: 0.5,
            n_linear: 80,
            n_log: 60,
            pc_min: 1e-14,
            slope_tol: 1e-8,
            format: Format::Csv,
            output: None,
        }
    }
}

fn branches_for(cfg: &StationaryConfig, p: &ModelParams) -> Result<Vec<LabelledBranch>, CliError> {
    match cfg.regime {
        Regime::Focusing => {
            let opts = Figure1Options {
                a: cfg.a,
                alpha: cfg.alpha,
                eta_min: cfg.eta_min,
                eta_step: cfg.eta_step,
                ..Default::default()
            };
            Ok(figure1_dataset(&opts)?.branches)
        }
        Regime::Defocusing => {
            let grid = default_p_grid(Regime::Defocusing, cfg.n_linear, cfg.n_log, cfg.pc_min);
            let mut states = solve_branch(Regime::Defocusing, 2, p, &grid, &BranchOptions::default())?;
            states.dedup_by(|x, y| (x.omega - y.omega).abs() <= 1e-12 * y.omega.abs().max(1.0));
            Ok(vec![LabelledBranch { label: "Omega_0".into(), states }])
        }
    }
}

pub fn stationary(cfg: &StationaryConfig) -> Result<Outcome, CliError> {
    let p = params(cfg.a, cfg.alpha)?;
    if !(cfg.slope_tol >= 0.0) {
        return Err(CliError::Config("slope_tol must be non-negative".into()));
    }
    let branches = branches_for(cfg, &p)?;
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for b in &branches {
        let slopes: Vec<Option<SlopeEntry>> = {
            let mut v: Vec<Option<SlopeEntry>> = vec![None; b.states.len()];
            if b.states.len() >= 3 {
                for e in stability_slope(&b.states, cfg.slope_tol)? {
                    let i = e.index;
                    v[i] = Some(e);
                }
            }
            v
        };
        for (s, sl) in b.states.iter().zip(&slopes) {
            rows.push(state_row(&b.label, s, sl.as_ref()));
            items.push(json!({
                "branch_label": b.label,
                "regime": s.regime,
                "ell": s.ell,
                "p": s.p.p(),
                "lambda_prime": s.lambda_prime,
                "Omega": s.omega,
                "mu_sq": s.mu_sq,
                "eta": s.eta,
                "slope": sl.as_ref().map(|e| e.slope),
                "classification": sl.as_ref().map(|e| e.classification.as_str()),
            }));
        }
    }
    let table = Table {
        notes: vec![("slope_caveat".into(), Value::String(SLOPE_CAVEAT.into()))],
        columns: vec![
            "branch_label",
            "regime",
            "ell",
            "p",
            "lambda_prime",
            "Omega",
            "mu_sq",
            "eta",
            "slope",
            "classification",
        ],
        rows,
    };
    let result = json!({ "slope_caveat": SLOPE_CAVEAT, "states": items });
    let body = Report { subcommand: "stationary", config: cfg, json: result, table }.render(cfg.format)?;
    Ok(Outcome { body, output: cfg.output.clone(), blowup_halt: false })
}

fn state_row(label: &str, s: &StationaryState, sl: Option<&SlopeEntry>) -> Vec<Cell> {
    vec![
        Cell::Text(label.to_string()),
        Cell::Text(s.regime.as_str().to_string()),
        Cell::Int(s.ell as i64),
        Cell::Real(s.p.p()),
        Cell::Real(s.lambda_prime),
        Cell::Real(s.omega),
        Cell::Real(s.mu_sq),
        Cell::Real(s.eta),
        sl.map(|e| Cell::Real(e.slope)).unwrap_or(Cell::Empty),
        sl.map(|e| Cell::Text(e.classification.as_str().to_string())).unwrap_or(Cell::Empty),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BifurcationConfig {
    pub a: f64,
    pub alpha: f64,
    /// Report only the first `n` points (ordered by decreasing `eta`).
    pub n: Option<usize>,
    pub p_min: Option<f64>,
    pub p_max: Option<f64>,
    pub lambda_prime_min: Option<f64>,
    pub lambda_prime_max: Option<f64>,
    pub n_p: Option<usize>,
    pub n_lambda_prime: Option<usize>,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Default for BifurcationConfig {
    fn default() -> Self {
        Self {
            a: 1.0,
            alpha: -4.0,
            n: None,
            p_min: None,
            p_max: None,
            lambda_prime_min: None,
            lambda_prime_max: None,
            n_p: None,
            n_lambda_prime: None,
            format: Format::Json,
            output: None,
        }
    }
}

pub fn bifurcation(cfg: &BifurcationConfig) -> Result<Outcome, CliError> {
    let p = params(cfg.a, cfg.alpha)?;
    let mut bx = SearchBox::default_for(&p);
    bx.p_min = cfg.p_min.unwrap_or(bx.p_min);
    bx.p_max = cfg.p_max.unwrap_or(bx.p_max);
    bx.lambda_prime_min = cfg.lambda_prime_min.unwrap_or(bx.lambda_prime_min);
    bx.lambda_prime_max = cfg.lambda_prime_max.unwrap_or(bx.lambda_prime_max);
    bx.n_p = cfg.n_p.unwrap_or(bx.n_p);
    bx.n_lambda_prime = cfg.n_lambda_prime.unwrap_or(bx.n_lambda_prime);
    let mut points = find_all_bifurcations(Regime::Focusing, &p, &bx)?;
    if let Some(n) = cfg.n {
        points.truncate(n);
    }
    let items: Vec<Value> = points
        .iter()
        .map(|b| {
            json!({
                "n": b.n,
                "eta_n": b.eta_n,
                "Omega_n": b.omega_n,
                "ell": b.ell,
                "p": b.p.p(),
                "lambda_prime": b.lambda_prime,
                "residual_H": b.residual_h,
                "residual_H_p": b.residual_hp,
                "mu_sq": b.state.mu_sq,
            })
        })
        .collect();
    let table = Table {
        notes: vec![],
        columns: vec!["n", "eta_n", "Omega_n", "ell", "p", "lambda_prime", "residual_H", "residual_H_p"],
        rows: points
            .iter()
            .map(|b| {
                vec![
                    Cell::Int(b.n as i64),
                    Cell::Real(b.eta_n),
                    Cell::Real(b.omega_n),
                    Cell::Int(b.ell as i64),
                    Cell::Real(b.p.p()),
                    Cell::Real(b.lambda_prime),
                    Cell::Real(b.residual_h),
                    Cell::Real(b.residual_hp),
                ]
            })
            .collect(),
    };
    let body =
        Report { subcommand: "bifurcation", config: cfg, json: json!({ "bifurcations": items }), table }.render(cfg.format)?;
    Ok(Outcome { body, output: cfg.output.clone(), blowup_halt: false })
}

/// Initial data of an evolution run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Initial {
    /// Unit-norm Gaussian of width `width` centred at `center`.
    Gaussian,
    /// The linear bound state.
    Eigenstate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    pub a: f64,
    pub alpha: f64,
    pub eta: f64,
    pub sigma: f64,
    pub l: f64,
    pub dx: f64,
    pub dt: f64,
    pub t_final: f64,
    /// Reference point of the moment of inertia (defaults to `a`).
    pub q: Option<f64>,
    pub observer_stride: usize,
    pub renormalize: bool,
    pub adaptive: bool,
    pub growth_limit: f64,
    pub dt_min: f64,
    pub h1_max: f64,
    pub resolution_fraction: f64,
    pub initial: Initial,
    pub center: f64,
    pub width: f64,
    /// Attach the blow-up verdict (from the initial data) to the output.
    pub classify: bool,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        let e = EvolveOptions::default();
        Self {
            a: 1.0,
            alpha: -4.0,
            eta: 0.0,
            sigma: 1.0,
            l: 40.0,
            dx: 0.01,
            dt: e.dt,
            t_final: e.t_final,
            q: None,
            observer_stride: e.observer_stride,
            renormalize: true,
            adaptive: e.adaptive,
            growth_limit: e.growth_limit,
            dt_min: e.dt_min,
            h1_max: e.h1_max,
            resolution_fraction: e.resolution_fraction,
            initial: Initial::Gaussian,
            center: 2.0,
            width: 0.5,
            classify: true,
            format: Format::Csv,
            output: None,
        }
    }
}

fn initial_field(cfg: &EvolveConfig, p: &ModelParams) -> Result<WaveField, CliError> {
    match cfg.initial {
        Initial::Gaussian => Ok(gaussian_field(p, cfg.l, cfg.dx, cfg.center, cfg.width)?),
        Initial::Eigenstate => {
            let like = WaveField::zeros(p, cfg.l, cfg.dx)?;
            eigenstate_field(p, &like)?
                .ok_or_else(|| CliError::Config(format!("a*alpha = {} >= -1: there is no bound state", cfg.a * cfg.alpha)))
        }
    }
}

pub fn evolve_cmd(cfg: &EvolveConfig) -> Result<Outcome, CliError> {
    let p = params(cfg.a, cfg.alpha)?;
    let nl = Nonlinearity { eta: cfg.eta, sigma: cfg.sigma };
    if !(cfg.sigma > 0.0) {
        return Err(CliError::Config(format!("sigma must be positive, got {}", cfg.sigma)));
    }
    let psi0 = initial_field(cfg, &p)?;
    let opts = EvolveOptions {
        t_final: cfg.t_final,
        dt: cfg.dt,
        q: cfg.q.unwrap_or(cfg.a),
        observer_stride: cfg.observer_stride,
        snapshot_stride: None,
        renormalize: cfg.renormalize,
        adaptive: cfg.adaptive,
        growth_limit: cfg.growth_limit,
        dt_min: cfg.dt_min,
        h1_max: cfg.h1_max,
        resolution_fraction: cfg.resolution_fraction,
    };
    let traj = evolve(&psi0, &p, &nl, &opts)?;
    let verdict = if cfg.classify { Some(classify_blowup(&p, &nl, &psi0, None)?) } else { None };
    let mut verdict_json = serde_json::to_value(&verdict).map_err(|e| CliError::Config(e.to_string()))?;
    if let (Value::Object(m), Some(halt)) = (&mut verdict_json, &traj.blowup) {
        m.insert("numerical_blowup_detected".into(), Value::Bool(true));
        m.insert("T_max_estimate".into(), json!(halt.t_max_estimate));
    }
    let summary = json!({
        "t_end": traj.t_end,
        "steps": traj.steps,
        "min_dt": traj.min_dt,
        "reflection_ratio": traj.reflection_ratio,
        "reflection_warning": traj.reflection_warning(),
        "blowup": traj.blowup,
    });
    let table = Table {
        notes: vec![("run".into(), summary.clone()), ("verdict".into(), verdict_json.clone())],
        columns: crate::dynamics::DiagnosticsRecord::COLUMNS.to_vec(),
        rows: traj.records.iter().map(|r| r.values().iter().map(|&v| Cell::Real(v)).collect()).collect(),
    };
    let result = json!({ "run": summary, "verdict": verdict_json, "records": traj.records });
    let body = Report { subcommand: "evolve", config: cfg, json: result, table }.render(cfg.format)?;
    Ok(Outcome { body, output: cfg.output.clone(), blowup_halt: traj.blowup.is_some() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispersiveConfig {
    pub a: f64,
    pub alpha: f64,
    pub l: f64,
    pub dx: f64,
    pub dt: f64,
    pub times: Vec<f64>,
    /// Centre and width of the Gaussian initial data.
    pub center: f64,
    pub width: f64,
    /// Run even at `a*alpha = -1` (flagged in the output).
    pub allow_threshold: bool,
    /// Sampling box of the `|I_a(z)| sqrt(t)` bound: `z` grid and times.
    pub ia_z_min: f64,
    pub ia_z_max: f64,
    pub ia_nz: usize,
    pub ia_times: Vec<f64>,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Default for DispersiveConfig {
    fn default() -> Self {
        let d = DispersiveOptions::default();
        Self {
            a: 1.0,
            alpha: 2.0,
            l: d.l,
            dx: d.dx,
            dt: d.dt,
            times: d.times.clone(),
            center: 1.0,
            width: 0.5,
            allow_threshold: false,
            ia_z_min: -10.0,
            ia_z_max: 10.0,
            ia_nz: 401,
            ia_times: d.times,
            format: Format::Csv,
            output: None,
        }
    }
}

pub fn dispersive(cfg: &DispersiveConfig) -> Result<Outcome, CliError> {
    let p = params(cfg.a, cfg.alpha)?;
    if p.is_threshold() && !cfg.allow_threshold {
        return Err(CliError::Config(
            "a*alpha = -1 is the threshold resonance case; pass allow_threshold=true to run it".into(),
        ));
    }
    if cfg.ia_nz < 2 || !(cfg.ia_z_max > cfg.ia_z_min) {
        return Err(CliError::Config("ia_nz must be >= 2 and ia_z_max > ia_z_min".into()));
    }
    let psi0 = gaussian_field(&p, cfg.l, cfg.dx, cfg.center, cfg.width)?;
    let report = dispersive_check(&psi0, &p, &DispersiveOptions { l: cfg.l, dx: cfg.dx, dt: cfg.dt, times: cfg.times.clone() })?;
    let zs: Vec<f64> = (0..cfg.ia_nz)
        .map(|i| cfg.ia_z_min + (cfg.ia_z_max - cfg.ia_z_min) * i as f64 / (cfg.ia_nz - 1) as f64)
        .collect();
    let ia = lemma1_bound_check(cfg.a, &zs, &cfg.ia_times)?;
    let summary = json!({
        "loglog_slope": report.loglog_slope,
        "l1_norm": report.l1_norm,
        "empirical_constant": report.empirical_constant,
        "reflection_ratio": report.reflection_ratio,
        "threshold_case": report.threshold_case,
    });
    let ia_json = serde_json::to_value(ia).map_err(|e| CliError::Config(e.to_string()))?;
    let table = Table {
        notes: vec![("summary".into(), summary.clone()), ("ia_bound".into(), ia_json.clone())],
        columns: vec!["t", "sup_norm", "sqrt_t_times_sup"],
        rows: report
            .rows
            .iter()
            .map(|r| vec![Cell::Real(r.t), Cell::Real(r.sup_norm), Cell::Real(r.sqrt_t_times_sup)])
            .collect(),
    };
    let result = json!({ "summary": summary, "ia_bound": ia_json, "rows": report.rows });
    let body = Report { subcommand: "dispersive-check", config: cfg, json: result, table }.render(cfg.format)?;
    Ok(Outcome { body, output: cfg.output.clone(), blowup_halt: false })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Figure1Config {
    pub a: f64,
    pub alpha: f64,
    pub eta_min: f64,
    pub eta_step: f64,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Default for Figure1Config {
    fn default() -> Self {
        let d = Figure1Options::default();
        Self { a: d.a, alpha: d.alpha, eta_min: d.eta_min, eta_step: d.eta_step, format: Format::Csv, output: None }
    }
}

pub fn figure1(cfg: &Figure1Config) -> Result<Outcome, CliError> {
    params(cfg.a, cfg.alpha)?;
    let opts = Figure1Options { a: cfg.a, alpha: cfg.alpha, eta_min: cfg.eta_min, eta_step: cfg.eta_step, ..Default::default() };
    let data = figure1_dataset(&opts)?;
    let rows = data.rows();
    let table = Table {
        notes: vec![],
        columns: vec!["branch_label", "eta", "Omega"],
        rows: rows
            .iter()
            .map(|r| vec![Cell::Text(r.branch_label.clone()), Cell::Real(r.eta), Cell::Real(r.omega)])
            .collect(),
    };
    let items: Vec<Value> =
        rows.iter().map(|r| json!({ "branch_label": r.branch_label, "eta": r.eta, "Omega": r.omega })).collect();
    let body = Report { subcommand: "figure1", config: cfg, json: json!({ "rows": items }), table }.render(cfg.format)?;
    Ok(Outcome { body, output: cfg.output.clone(), blowup_halt: false })
}
