use super::bifurcation::{find_all_bifurcations, BifurcationPoint, SearchBox};
use super::continuation::{coords_of, distance_to_curve, state_at_eta, trace_curve, CurvePoint, TraceOptions};
use super::effective::Regime;
use super::solve::{default_p_grid, solve_branch, BranchOptions};
use super::state::StationaryState;
use crate::error::{Error, Result};
use crate::linear::ModelParams;
use serde::{Deserialize, Serialize};

/// Settings of the `(eta, Omega)` branch diagram.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Figure1Options {
    pub a: f64,
    pub alpha: f64,
    /// Lower end of the `eta` range (the upper end is `0`).
    pub eta_min: f64,
    /// Spacing of the uniform `eta` grid.
    pub eta_step: f64,
    /// Additional `eta` values close to zero, used for the linear limit of the ground branch.
    pub extra_eta: Vec<f64>,
    /// Seed scan: equispaced `p` values and log-spaced `pc` values.
    pub seed_linear: usize,
    pub seed_log: usize,
    pub seed_pc_min: f64,
    pub seed_lambda_prime_max: f64,
}

impl Default for Figure1Options {
    fn default() -> Self {
        Self {
            a: 1.0,
            alpha: -4.0,
            eta_min: -110.0,
            eta_step: 0.5,
            extra_eta: vec![-1e-3, -1e-2, -1e-1],
            seed_linear: 80,
            seed_log: 60,
            seed_pc_min: 1e-14,
            seed_lambda_prime_max: 40.0,
        }
    }
}

/// One labelled state on the `eta` grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Figure1Row {
    pub branch_label: String,
    pub eta: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    /// The state behind the row (absent for bifurcation annotations).
    pub state: Option<StationaryState>,
}

/// A labelled branch sampled on the `eta` grid, ordered by decreasing `eta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelledBranch {
    pub label: String,
    pub states: Vec<StationaryState>,
}

/// The branch diagram: labelled branches and the saddle-node points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Figure1Dataset {
    pub branches: Vec<LabelledBranch>,
    pub bifurcations: Vec<BifurcationPoint>,
}

impl Figure1Dataset {
    /// Rows `(branch_label, eta, Omega)`: each branch in order of decreasing `eta`, then one
    /// `bifurcation-n` row per saddle-node point.
    pub fn rows(&self) -> Vec<Figure1Row> {
        let mut rows = Vec::new();
        for b in &self.branches {
            for s in &b.states {
                rows.push(Figure1Row { branch_label: b.label.clone(), eta: s.eta, omega: s.omega, state: Some(s.clone()) });
            }
        }
        for p in &self.bifurcations {
            rows.push(Figure1Row { branch_label: format!("bifurcation-{}", p.n), eta: p.eta_n, omega: p.omega_n, state: None });
        }
        rows
    }

    pub fn branch(&self, label: &str) -> Option<&LabelledBranch> {
        self.branches.iter().find(|b| b.label == label)
    }
}

/// Leading part of `arm` along which `eta` decreases, dropping points that repeat `eta` to
/// rounding (near the linear limit `eta` is of the order of the square of the modulus gap).
fn monotone_prefix(arm: Vec<CurvePoint>) -> Vec<CurvePoint> {
    let mut out: Vec<CurvePoint> = Vec::with_capacity(arm.len());
    for p in arm {
        if let Some(last) = out.last() {
            if p.state.eta >= last.state.eta {
                if p.state.eta - last.state.eta <= 1e-12 * (1e-12 + last.state.eta.abs()) {
                    continue;
                }
                break;
            }
        }
        out.push(p);
    }
    out
}

/// Samples an arm (strictly decreasing `eta`) at the grid values inside its range.
fn sample_arm(params: &ModelParams, arm: &[CurvePoint], grid: &[f64]) -> Vec<StationaryState> {
    let mut out = Vec::new();
    if arm.len() < 2 {
        return out;
    }
    let mut i = 0;
    for &target in grid {
        while i + 1 < arm.len() && arm[i + 1].state.eta > target {
            i += 1;
        }
        if i + 1 >= arm.len() {
            break;
        }
        let (a, b) = (&arm[i], &arm[i + 1]);
        if !(a.state.eta >= target && b.state.eta <= target) {
            continue;
        }
        if let Some(s) = state_at_eta(Regime::Focusing, params, a, b, target) {
            out.push(s);
        }
    }
    out
}

/// `Omega` of an arm at `eta` by linear interpolation between curve points.
fn omega_at(arm: &[CurvePoint], eta: f64) -> Option<f64> {
    arm.windows(2).find(|w| w[0].state.eta >= eta && w[1].state.eta <= eta).map(|w| {
        let (e0, e1) = (w[0].state.eta, w[1].state.eta);
        let t = if e0 == e1 { 0.0 } else { (e0 - eta) / (e0 - e1) };
        w[0].state.omega + t * (w[1].state.omega - w[0].state.omega)
    })
}

/// Computes the focusing branch diagram in `(eta, Omega)`.
///
/// Roots of the effective equation on a modulus grid seed pseudo-arclength continuation of the
/// solution curves in `(-ln pc, lambda', tau)`. The curve reaching the linear limit is `Omega_0`.
/// Each saddle-node point `n` selects its curve, which is split at the local maximum of `eta`
/// nearest to the point into two arms running towards more negative `eta`; the arm with the
/// larger `Omega` at equal `eta` is `Omega_n+`, the other `Omega_n-`. The maximum of `eta` is
/// close to, but not identical with, the point where `H` and its `p`-derivative vanish.
/// Every branch is then sampled exactly on the `eta` grid.
pub fn figure1_dataset(opts: &Figure1Options) -> Result<Figure1Dataset> {
    let params = ModelParams::new(opts.a, opts.alpha)?;
    if !(opts.eta_min < 0.0) || !(opts.eta_step > 0.0) {
        return Err(Error::InvalidParameter("figure-1 grid needs eta_min < 0 and eta_step > 0".into()));
    }
    let regime = Regime::Focusing;
    let mut bx = SearchBox::default_for(&params);
    bx.lambda_prime_max = bx.lambda_prime_max.max(opts.seed_lambda_prime_max);
    let mut bifurcations = find_all_bifurcations(regime, &params, &bx)?;
    bifurcations.retain(|b| b.eta_n >= opts.eta_min);

    let grid_p = default_p_grid(regime, opts.seed_linear, opts.seed_log, opts.seed_pc_min);
    let bopts = BranchOptions { lambda_prime_max: Some(opts.seed_lambda_prime_max), max_doublings: 0, ..Default::default() };
    let mut seeds = solve_branch(regime, 1, &params, &grid_p, &bopts)?;
    seeds.extend(solve_branch(regime, 2, &params, &grid_p, &bopts)?);
    let eta_floor = 1.25 * opts.eta_min;
    seeds.retain(|s| s.eta >= eta_floor);
    seeds.sort_by(|x, y| y.eta.total_cmp(&x.eta));

    let topts = TraceOptions { eta_abs_max: 1.5 * opts.eta_min.abs(), ..Default::default() };
    let mut curves: Vec<Vec<CurvePoint>> = Vec::new();
    for s in &seeds {
        let c = coords_of(s);
        if curves.iter().any(|cv| distance_to_curve(cv, c) < 0.02) {
            continue;
        }
        match trace_curve(regime, &params, c, &topts) {
            Ok(cv) if cv.len() >= 3 => curves.push(cv),
            Ok(_) | Err(Error::NoConvergence(_)) | Err(Error::Numerical(_)) => {}
            Err(e) => return Err(e),
        }
    }

    let mut grid: Vec<f64> = opts.extra_eta.iter().copied().filter(|&e| e < 0.0 && e >= opts.eta_min).collect();
    let n = (opts.eta_min.abs() / opts.eta_step).round() as usize;
    grid.extend((1..=n).map(|i| -(i as f64) * opts.eta_step).filter(|&e| e >= opts.eta_min - 1e-9));
    grid.sort_by(|x, y| y.total_cmp(x));
    grid.dedup();

    let mut branches = Vec::new();
    // Ground branch: the curve with the eta closest to zero.
    let ground = curves
        .iter()
        .enumerate()
        .max_by(|x, y| {
            let ex = x.1.iter().map(|p| p.state.eta).fold(f64::NEG_INFINITY, f64::max);
            let ey = y.1.iter().map(|p| p.state.eta).fold(f64::NEG_INFINITY, f64::max);
            ex.total_cmp(&ey)
        })
        .map(|(i, _)| i)
        .ok_or_else(|| Error::NoConvergence("no solution curve found".into()))?;
    {
        let cv = &curves[ground];
        let top = cv.iter().enumerate().max_by(|x, y| x.1.state.eta.total_cmp(&y.1.state.eta)).map(|(i, _)| i).unwrap();
        let forward: Vec<CurvePoint> = cv[top..].to_vec();
        let backward: Vec<CurvePoint> = cv[..=top].iter().rev().cloned().collect();
        let arm = if forward.len() >= backward.len() { forward } else { backward };
        let arm = monotone_prefix(arm);
        branches.push(LabelledBranch { label: "Omega_0".into(), states: sample_arm(&params, &arm, &grid) });
    }
    for b in &bifurcations {
        let c = coords_of(&b.state);
        let Some((ci, _)) = curves
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != ground)
            .map(|(i, cv)| (i, distance_to_curve(cv, c)))
            .filter(|(_, d)| *d < 0.05)
            .min_by(|x, y| x.1.total_cmp(&y.1))
        else {
            continue;
        };
        let cv = &curves[ci];
        let k = cv
            .iter()
            .enumerate()
            .min_by(|x, y| {
                let dx = (x.1.coords.lambda_prime - b.lambda_prime).abs() + (x.1.coords.theta - c.theta).abs();
                let dy = (y.1.coords.lambda_prime - b.lambda_prime).abs() + (y.1.coords.theta - c.theta).abs();
                dx.total_cmp(&dy)
            })
            .map(|(i, _)| i)
            .unwrap();
        let mut top = k;
        loop {
            let up = top + 1 < cv.len() && cv[top + 1].state.eta > cv[top].state.eta;
            let down = top > 0 && cv[top - 1].state.eta > cv[top].state.eta;
            match (up, down) {
                (true, false) => top += 1,
                (false, true) => top -= 1,
                (true, true) if cv[top + 1].state.eta >= cv[top - 1].state.eta => top += 1,
                (true, true) => top -= 1,
                (false, false) => break,
            }
        }
        let arm_a: Vec<CurvePoint> = cv[top..].to_vec();
        let arm_b: Vec<CurvePoint> = cv[..=top].iter().rev().cloned().collect();
        let arm_a = monotone_prefix(arm_a);
        let arm_b = monotone_prefix(arm_b);
        // Compare the two arms at a common eta just below the fold.
        let eta_top = cv[top].state.eta;
        let lowest = arm_a.last().map(|p| p.state.eta).unwrap_or(eta_top).max(arm_b.last().map(|p| p.state.eta).unwrap_or(eta_top));
        let probe = eta_top - 0.1 * (eta_top - lowest);
        let (plus, minus) = match (omega_at(&arm_a, probe), omega_at(&arm_b, probe)) {
            (Some(oa), Some(ob)) if oa < ob => (arm_b, arm_a),
            _ => (arm_a, arm_b),
        };
        branches.push(LabelledBranch { label: format!("Omega_{}+", b.n), states: sample_arm(&params, &plus, &grid) });
        branches.push(LabelledBranch { label: format!("Omega_{}-", b.n), states: sample_arm(&params, &minus, &grid) });
    }
    Ok(Figure1Dataset { branches, bifurcations })
}
