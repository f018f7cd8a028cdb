use super::diagnostics::DiagnosticsRecord;
use super::field::WaveField;
use super::Nonlinearity;
use crate::error::{Error, Result};
use crate::linear::ModelParams;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Crank-Nicolson step `(1 + i tau H / 2) psi_new = (1 - i tau H / 2) psi` for the discrete
/// Hamiltonian `(H psi)_j = -(psi_{j+1} - 2 psi_j + psi_{j-1}) / dx^2 + (alpha / dx) delta_{j, j_a} psi_j`
/// with Dirichlet ends. The tridiagonal factorisation is computed once per step size.
#[derive(Clone, Debug)]
pub struct CrankNicolson {
    tau: f64,
    dx: f64,
    shell: f64,
    j_a: usize,
    off: Complex64,
    c_prime: Vec<Complex64>,
    inv_denominator: Vec<Complex64>,
}

impl CrankNicolson {
    /// Factorises the implicit operator for a grid like `field` and step `tau`.
    pub fn new(field: &WaveField, params: &ModelParams, tau: f64) -> Self {
        let n = field.len();
        let dx = field.dx;
        let shell = params.alpha / dx;
        let half = Complex64::new(0.0, 0.5 * tau);
        let off = half * (-1.0 / (dx * dx));
        let mut c_prime = vec![Complex64::new(0.0, 0.0); n];
        let mut inv_denominator = vec![Complex64::new(0.0, 0.0); n];
        let mut prev_c = Complex64::new(0.0, 0.0);
        for j in 1..n - 1 {
            let h = 2.0 / (dx * dx) + if j == field.j_a { shell } else { 0.0 };
            let d = Complex64::new(1.0, 0.0) + half * h;
            let den = d - off * prev_c;
            let inv = 1.0 / den;
            inv_denominator[j] = inv;
            c_prime[j] = off * inv;
            prev_c = c_prime[j];
        }
        Self { tau, dx, shell, j_a: field.j_a, off, c_prime, inv_denominator }
    }

    /// Step size of this factorisation.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Advances `values` in place by one step.
    pub fn step(&self, values: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let n = values.len();
        let dx2 = self.dx * self.dx;
        let half = Complex64::new(0.0, 0.5 * self.tau);
        scratch.clear();
        scratch.resize(n, Complex64::new(0.0, 0.0));
        // Right-hand side (1 - i tau H / 2) psi, then forward elimination.
        let mut prev = Complex64::new(0.0, 0.0);
        for j in 1..n - 1 {
            let mut h_psi = (2.0 * values[j] - values[j + 1] - values[j - 1]) / dx2;
            if j == self.j_a {
                h_psi += values[j] * self.shell;
            }
            let rhs = values[j] - half * h_psi;
            let y = (rhs - self.off * prev) * self.inv_denominator[j];
            scratch[j] = y;
            prev = y;
        }
        // Back substitution.
        let mut next = Complex64::new(0.0, 0.0);
        for j in (1..n - 1).rev() {
            let x = scratch[j] - self.c_prime[j] * next;
            values[j] = x;
            next = x;
        }
        values[0] = Complex64::new(0.0, 0.0);
        values[n - 1] = Complex64::new(0.0, 0.0);
    }
}

fn nonlinear_rotation(values: &mut [Complex64], nl: &Nonlinearity, tau: f64) {
    if nl.eta == 0.0 {
        return;
    }
    for v in values.iter_mut() {
        let r2 = v.norm_sqr();
        if r2 > 0.0 {
            let phase = -nl.eta * r2.powf(nl.sigma) * tau;
            *v *= Complex64::new(0.0, phase).exp();
        }
    }
}

/// Options of a time integration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    /// Final time.
    pub t_final: f64,
    /// Base time step; it is adjusted down so that a whole number of steps reaches `t_final`.
    pub dt: f64,
    /// Reference point of the moment of inertia.
    pub q: f64,
    /// Diagnostics are recorded every `observer_stride` base steps (and at the final time).
    pub observer_stride: usize,
    /// Field snapshots are kept every `snapshot_stride` base steps when set.
    pub snapshot_stride: Option<usize>,
    /// Rescale the initial field to unit norm.
    pub renormalize: bool,
    /// Enable step rejection and blow-up detection.
    pub adaptive: bool,
    /// A step is rejected and the step size halved when the sup norm grows by more than this
    /// fraction in one step.
    pub growth_limit: f64,
    /// Smallest admissible step size.
    pub dt_min: f64,
    /// Divergence threshold of the H1 norm.
    pub h1_max: f64,
    /// The divergence threshold is additionally capped at `resolution_fraction * 2 / dx`, the
    /// given fraction of the largest H1 norm a unit-norm grid function can have.
    pub resolution_fraction: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            t_final: 1.0,
            dt: 1e-3,
            q: 0.0,
            observer_stride: 10,
            snapshot_stride: None,
            renormalize: false,
            adaptive: true,
            growth_limit: 0.10,
            dt_min: 1e-12,
            h1_max: 1e6,
            resolution_fraction: 0.25,
        }
    }
}

/// Why an integration stopped early.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupHalt {
    /// Last time reached by an accepted step.
    pub t_max_estimate: f64,
    /// Step size in use when the run halted.
    pub dt_at_halt: f64,
    /// H1 norm at the last accepted step.
    pub h1_norm: f64,
    /// Divergence threshold that applied.
    pub h1_threshold: f64,
    /// Human-readable cause.
    pub reason: String,
}

/// Result of a time integration.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<(f64, WaveField)>,
    /// Field at the last accepted time.
    pub field: WaveField,
    /// Last accepted time.
    pub t_end: f64,
    /// Set when the run halted on the blow-up rule.
    pub blowup: Option<BlowupHalt>,
    /// Largest observed ratio `|psi(0.9 L)| / sup |psi|`.
    pub reflection_ratio: f64,
    /// Number of accepted steps.
    pub steps: usize,
    /// Smallest step size used.
    pub min_dt: f64,
}

impl Trajectory {
    /// Whether the field reached the far end of the domain (ratio above `1e-6`).
    pub fn reflection_warning(&self) -> bool {
        self.reflection_ratio > 1e-6
    }
}

/// Integrates `i psi_t = H psi + eta |psi|^{2 sigma} psi` by Strang splitting: a half step of
/// the exact nonlinear phase rotation, a Crank-Nicolson step of the linear part and another
/// half rotation.
pub fn evolve(psi0: &WaveField, params: &ModelParams, nl: &Nonlinearity, opts: &EvolveOptions) -> Result<Trajectory> {
    evolve_with_observer(psi0, params, nl, opts, |_, _| {})
}

/// Like [`evolve`], calling `observer` with every recorded field and its diagnostics.
pub fn evolve_with_observer(
    psi0: &WaveField,
    params: &ModelParams,
    nl: &Nonlinearity,
    opts: &EvolveOptions,
    mut observer: impl FnMut(&WaveField, &DiagnosticsRecord),
) -> Result<Trajectory> {
    psi0.validate()?;
    params.validate()?;
    if (psi0.a() - params.a).abs() > 1e-9 * params.a {
        return Err(Error::InvalidParameter("wave field grid does not match the shell position".into()));
    }
    if !(opts.t_final >= 0.0 && opts.dt > 0.0 && opts.observer_stride > 0) {
        return Err(Error::InvalidParameter("t_final >= 0, dt > 0 and observer stride > 0 required".into()));
    }
    if !(nl.sigma > 0.0) || !nl.eta.is_finite() {
        return Err(Error::InvalidParameter("sigma must be positive and eta finite".into()));
    }
    let mut psi = psi0.clone();
    if opts.renormalize {
        psi.normalize()?;
    }
    let n_steps = ((opts.t_final / opts.dt) - 1e-9).ceil().max(0.0) as usize;
    let dt0 = if n_steps == 0 { opts.dt } else { opts.t_final / n_steps as f64 };
    let h1_threshold = opts.h1_max.min(opts.resolution_fraction * 2.0 / psi.dx * psi.norm_sq().sqrt().max(1e-300));
    let monitor_index = ((0.9 * psi.l) / psi.dx).round() as usize;

    let mut steppers: HashMap<u32, CrankNicolson> = HashMap::new();
    let mut scratch = Vec::with_capacity(psi.len());
    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let mut reflection_ratio: f64 = 0.0;
    let mut level: u32 = 0;
    let mut t = 0.0;
    let mut steps = 0;
    let mut min_dt = dt0;

    let mut record = |psi: &WaveField, t: f64, records: &mut Vec<DiagnosticsRecord>, refl: &mut f64| {
        let rec = DiagnosticsRecord::compute(t, psi, params, nl, opts.q);
        if rec.sup_norm > 0.0 {
            *refl = refl.max(psi.values[monitor_index.min(psi.len() - 1)].norm() / rec.sup_norm);
        }
        observer(psi, &rec);
        records.push(rec);
    };
    record(&psi, 0.0, &mut records, &mut reflection_ratio);
    if let Some(s) = opts.snapshot_stride {
        if s > 0 {
            snapshots.push((0.0, psi.clone()));
        }
    }

    let mut blowup = None;
    let mut candidate = psi.values.clone();
    'macro_steps: for k in 0..n_steps {
        let t_start = k as f64 * dt0;
        let t_stop = (k + 1) as f64 * dt0;
        let mut done = 0u64;
        loop {
            let subdivisions = 1u64 << level;
            if done >= subdivisions {
                break;
            }
            let tau = dt0 / subdivisions as f64;
            let stepper = steppers.entry(level).or_insert_with(|| CrankNicolson::new(&psi, params, tau));
            candidate.clear();
            candidate.extend_from_slice(&psi.values);
            nonlinear_rotation(&mut candidate, nl, 0.5 * tau);
            stepper.step(&mut candidate, &mut scratch);
            nonlinear_rotation(&mut candidate, nl, 0.5 * tau);
            let sup_old = psi.sup_norm();
            let sup_new = candidate.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if !sup_new.is_finite() {
                if opts.adaptive {
                    blowup = Some(BlowupHalt {
                        t_max_estimate: t,
                        dt_at_halt: tau,
                        h1_norm: psi.h1_norm(),
                        h1_threshold,
                        reason: "non-finite field after a step".into(),
                    });
                    break 'macro_steps;
                }
                return Err(Error::Numerical(format!("non-finite field at t = {t}")));
            }
            if opts.adaptive && sup_new > (1.0 + opts.growth_limit) * sup_old {
                if 0.5 * tau < opts.dt_min {
                    blowup = Some(BlowupHalt {
                        t_max_estimate: t,
                        dt_at_halt: tau,
                        h1_norm: psi.h1_norm(),
                        h1_threshold,
                        reason: format!("step size fell below dt_min = {:e}", opts.dt_min),
                    });
                    break 'macro_steps;
                }
                // Keep the position within the macro step when refining.
                level += 1;
                done *= 2;
                continue;
            }
            std::mem::swap(&mut psi.values, &mut candidate);
            done += 1;
            steps += 1;
            min_dt = min_dt.min(tau);
            t = if done == 1u64 << level { t_stop } else { t_start + done as f64 * dt0 / (1u64 << level) as f64 };
            if opts.adaptive {
                let h1 = psi.h1_norm();
                if h1 > h1_threshold {
                    blowup = Some(BlowupHalt {
                        t_max_estimate: t,
                        dt_at_halt: tau,
                        h1_norm: h1,
                        h1_threshold,
                        reason: format!("H1 norm {h1:.6e} exceeded the divergence threshold {h1_threshold:.6e}"),
                    });
                    break 'macro_steps;
                }
            }
        }
        if (k + 1) % opts.observer_stride == 0 || k + 1 == n_steps {
            record(&psi, t, &mut records, &mut reflection_ratio);
        }
        if let Some(s) = opts.snapshot_stride {
            if s > 0 && ((k + 1) % s == 0 || k + 1 == n_steps) {
                snapshots.push((t, psi.clone()));
            }
        }
    }
    if blowup.is_some() && records.last().map(|r| r.t) != Some(t) {
        record(&psi, t, &mut records, &mut reflection_ratio);
    }
    Ok(Trajectory { records, snapshots, field: psi, t_end: t, blowup, reflection_ratio, steps, min_dt })
}

/// Evolves under the linear Hamiltonian only (`eta = 0`) with a fixed step and returns the final field.
pub fn evolve_linear(psi0: &WaveField, params: &ModelParams, t: f64, dt: f64) -> Result<WaveField> {
    psi0.validate()?;
    let n_steps = ((t / dt) - 1e-9).ceil().max(1.0) as usize;
    let tau = t / n_steps as f64;
    let stepper = CrankNicolson::new(psi0, params, tau);
    let mut psi = psi0.clone();
    let mut scratch = Vec::with_capacity(psi.len());
    for _ in 0..n_steps {
        stepper.step(&mut psi.values, &mut scratch);
    }
    Ok(psi)
}
