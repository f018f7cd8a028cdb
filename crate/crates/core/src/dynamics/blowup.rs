use super::diagnostics::{energy, virial_bound_at_shell};
use super::evolve::{evolve, EvolveOptions};
use super::field::WaveField;
use super::Nonlinearity;
use crate::error::Result;
use crate::linear::ModelParams;
use serde::{Deserialize, Serialize};

/// Coarse outcome of the blow-up analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    GlobalExistence,
    BlowupPredicted,
    Indeterminate,
}

/// Rule that produced a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    /// Defocusing nonlinearity, `eta >= 0`.
    #[serde(rename = "Thm2-i")]
    Thm2I,
    /// Focusing, mass-subcritical nonlinearity, `eta < 0` and `sigma < 2`.
    #[serde(rename = "Thm2-ii")]
    Thm2Ii,
    /// Critical power `sigma = 2`: the answer depends on a constant that is not known explicitly.
    #[serde(rename = "Thm2-iii-indeterminate")]
    Thm2IiiIndeterminate,
    /// Supercritical power with non-negative initial energy: undecided without explicit constants.
    #[serde(rename = "Thm2-iv-indeterminate")]
    Thm2IvIndeterminate,
    /// Supercritical power with negative energy: blow-up predicted provided `eta` lies below an
    /// unknown threshold.
    #[serde(rename = "Thm3-conditional")]
    Thm3Conditional,
    /// A simulation halted on the divergence rule.
    #[serde(rename = "numerical-blowup-detected")]
    NumericalBlowupDetected,
}

/// Result of a probe simulation attached to a verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    /// Time horizon of the probe.
    pub t_final: f64,
    /// `Some(Rule::NumericalBlowupDetected)` when the probe halted on the divergence rule.
    pub rule: Option<Rule>,
    pub blowup_detected: bool,
    /// Last stable time of a halted probe.
    #[serde(rename = "T_max_estimate")]
    pub t_max_estimate: Option<f64>,
    /// Largest H1 norm seen.
    pub max_h1_norm: f64,
    /// Sign trend of the virial bound `8 E - 4 alpha |psi(a)|^2 + 4 eta (sigma-2)/(sigma+1) ||psi||^{2 sigma+2}`
    /// over the probe: its largest recorded value.
    pub max_virial_bound: f64,
    /// Reason string of the halt, if any.
    pub halt_reason: Option<String>,
}

/// Blow-up verdict for given initial data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupVerdict {
    pub classification: Classification,
    pub rule: Rule,
    /// Finite only when a probe run detected blow-up.
    #[serde(rename = "T_max_estimate")]
    pub t_max_estimate: Option<f64>,
    /// Energy of the initial data.
    pub initial_energy: f64,
    /// Virial bound for `d^2 I_a / dt^2` at `t = 0`.
    pub initial_virial_bound: f64,
    /// Lower threshold of the critical-power regime; not available in closed form.
    pub c1: Option<f64>,
    /// Upper threshold of the critical-power regime; not available in closed form.
    pub c2: Option<f64>,
    /// Coupling threshold of the negative-energy blow-up statement; not available in closed form.
    pub eta_c: Option<f64>,
    pub note: String,
    pub probe: Option<ProbeOutcome>,
}

/// Applies the decidable existence and blow-up rules to `psi0`, optionally attaching a probe
/// simulation run with `probe` options.
pub fn classify_blowup(
    params: &ModelParams,
    nl: &Nonlinearity,
    psi0: &WaveField,
    probe: Option<&EvolveOptions>,
) -> Result<BlowupVerdict> {
    let e0 = energy(psi0, params, nl);
    let bound0 = virial_bound_at_shell(psi0, params, nl);
    let (classification, rule, note) = if nl.eta >= 0.0 {
        (Classification::GlobalExistence, Rule::Thm2I, "repulsive or vanishing nonlinearity: global solution".to_string())
    } else if nl.sigma < 2.0 {
        (Classification::GlobalExistence, Rule::Thm2Ii, "attractive subcritical power: global solution".to_string())
    } else if nl.sigma == 2.0 {
        (
            Classification::Indeterminate,
            Rule::Thm2IiiIndeterminate,
            "critical power: depends on constants c1, c2 that are not known in closed form".to_string(),
        )
    } else if e0 < 0.0 {
        (
            Classification::BlowupPredicted,
            Rule::Thm3Conditional,
            "supercritical power with negative energy: blow-up predicted subject to eta < eta_c (eta_c unknown)"
                .to_string(),
        )
    } else {
        (
            Classification::Indeterminate,
            Rule::Thm2IvIndeterminate,
            "supercritical power with non-negative energy: depends on constants that are not known in closed form"
                .to_string(),
        )
    };
    let probe = match probe {
        Some(opts) => {
            let mut o = opts.clone();
            o.q = params.a;
            o.adaptive = true;
            let traj = evolve(psi0, params, nl, &o)?;
            let max_h1 = traj.records.iter().map(|r| r.h1_norm).fold(0.0, f64::max);
            let max_bound = traj
                .records
                .iter()
                .map(|r| r.i_q_ddot + 4.0 * r.boundary_term_t)
                .fold(f64::NEG_INFINITY, f64::max);
            let detected = traj.blowup.is_some();
            Some(ProbeOutcome {
                t_final: o.t_final,
                rule: detected.then_some(Rule::NumericalBlowupDetected),
                blowup_detected: detected,
                t_max_estimate: traj.blowup.as_ref().map(|b| b.t_max_estimate),
                max_h1_norm: max_h1,
                max_virial_bound: max_bound,
                halt_reason: traj.blowup.map(|b| b.reason),
            })
        }
        None => None,
    };
    Ok(BlowupVerdict {
        classification,
        rule,
        t_max_estimate: probe.as_ref().and_then(|p| p.t_max_estimate),
        initial_energy: e0,
        initial_virial_bound: bound0,
        c1: None,
        c2: None,
        eta_c: None,
        note,
        probe,
    })
}
