//! Grid sweeps over independent points.
//!
//! Each point is evaluated on its own with shared, immutable inputs and the
//! results are collated by grid index, so output is identical for every
//! [`Exec`] mode and worker count.

use crate::error::Result;
use crate::exec::Exec;
use crate::fidelity::{chi_frequency_domain, fidelity_from, gate_fidelity, theta_single, FidelityReport};
use crate::noise::{DiscreteSpectrum, NoiseModel, SpectralDensity};
use crate::oracle::{converge_cutoff, CutoffStudy};
use crate::pulse::{Protocol, SwitchingFunction};
use crate::quad::Tol;
use serde::Serialize;

/// Fidelity report for every `(protocol, model)` pair.
pub fn fidelity_sweep(points: &[(Protocol, NoiseModel)], tol: Tol, exec: Exec) -> Vec<Result<FidelityReport>> {
    exec.map(points, |(p, m)| gate_fidelity(p, m, tol))
}

/// Cutoff-converged oracle fidelity for every protocol.
pub fn oracle_sweep(
    protocols: &[Protocol],
    modes: &DiscreteSpectrum,
    beta: f64,
    n_start: usize,
    tol: f64,
    exec: Exec,
) -> Vec<Result<CutoffStudy>> {
    exec.map(protocols, |p| converge_cutoff(p, modes, beta, n_start, tol))
}

/// One point of a high-frequency resonance scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonancePoint {
    pub omega_bar1: f64,
    pub theta: f64,
    /// Gate infidelity after the history and one reset.
    pub infidelity: f64,
    /// Gate infidelity with no history.
    pub infidelity_t0: f64,
}

/// Scan of the HF peak centre with the index of the largest `|θ|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceScan {
    pub points: Vec<ResonancePoint>,
    pub argmax: usize,
}

/// Moves the HF peak of `base` over `omegas` and records the single-reset
/// phase of `history` followed by `gate`.
pub fn resonance_scan(
    history: &SwitchingFunction,
    gate: &SwitchingFunction,
    base: SpectralDensity,
    beta: f64,
    classical: bool,
    omegas: &[f64],
    tol: Tol,
    exec: Exec,
) -> Result<ResonanceScan> {
    let points: Vec<ResonancePoint> = exec
        .map(omegas, |&w| {
            let mut model = NoiseModel::continuous(SpectralDensity { omega_bar1: w, ..base }, beta)?;
            model.classical = classical;
            let chi = chi_frequency_domain(gate, &model, tol)?;
            let theta = theta_single(gate, history, &model, tol)?;
            Ok(ResonancePoint {
                omega_bar1: w,
                theta,
                infidelity: 1.0 - fidelity_from(chi, &[theta]),
                infidelity_t0: 1.0 - fidelity_from(chi, &[]),
            })
        })
        .into_iter()
        .collect::<Result<_>>()?;
    // first index wins on ties, which keeps a flat curve anchored at 0
    let argmax = points
        .iter()
        .enumerate()
        .fold(0, |best, (i, p)| if p.theta.abs() > points[best].theta.abs() { i } else { best });
    Ok(ResonanceScan { points, argmax })
}

/// `θ^(M)` of a single reset after `M` gate cycles, for each `M`.
pub fn theta_periodic_sweep(ms: &[usize], gate: &SwitchingFunction, model: &NoiseModel, tol: Tol, exec: Exec) -> Result<Vec<f64>> {
    exec.map(ms, |&m| crate::asymptotics::theta_periodic(m, gate, model, tol)).into_iter().collect()
}
