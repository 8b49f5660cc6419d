//! Classical decay factor, quantum phases and gate fidelity.
//!
//! Every quantity is available through a frequency-domain route (filter
//! functions against spectra) and a time-domain route (double integrals of
//! switching functions against correlators, reduced to one-dimensional lag
//! integrals).

use crate::error::{Error, Result};
use crate::noise::{CorrelationFunction, NoiseModel, Weight};
use crate::pulse::{filter_function, Piece, Protocol, SwitchingFunction};
use crate::quad::{gl20, Tol};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Outcome of a fidelity evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityReport {
    pub chi_c: f64,
    pub thetas: Vec<f64>,
    pub fidelity: f64,
    /// Relative quantum error and its leading-order approximation (K = 1 only).
    pub rqe: Option<Rqe>,
}

/// Relative quantum error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rqe {
    pub exact: f64,
    pub approx: f64,
}

/// `½(1 + e^{−χ} Π cos θ_k)`.
pub fn fidelity_from(chi: f64, thetas: &[f64]) -> f64 {
    0.5 * (1.0 + (-chi).exp() * thetas.iter().map(|t| t.cos()).product::<f64>())
}

/// Average gate fidelity from the worst-case fidelity.
pub fn average_fidelity(f: f64) -> f64 {
    (1.0 + 2.0 * f) / 3.0
}

/// Relative quantum error `(1 − e^{−χ} cos θ)/(1 − e^{−χ})` and `1 + θ²/(2χ)`.
pub fn rqe(chi: f64, theta: f64) -> Result<Rqe> {
    if !(chi > 0.0) {
        return Err(Error::DegenerateInput("rqe needs chi > 0".into()));
    }
    let e = (-chi).exp();
    Ok(Rqe { exact: (1.0 - e * theta.cos()) / -(-chi).exp_m1(), approx: 1.0 + theta * theta / (2.0 * chi) })
}

fn resonance_marks(tau: f64, wmax: f64) -> Vec<f64> {
    if !(tau > 0.0) {
        return vec![];
    }
    let step = 2.0 * PI / tau;
    let n = (wmax / step).floor().min(1e5) as usize;
    (1..=n).map(|l| l as f64 * step).collect()
}

/// `χ_c = (1/2π) ∫ |F_G|² S⁺ dω`.
pub fn chi_frequency_domain(gate: &SwitchingFunction, model: &NoiseModel, tol: Tol) -> Result<f64> {
    let pieces = gate.pieces();
    if pieces.is_empty() {
        return Ok(0.0);
    }
    let tau = gate.duration();
    let marks = resonance_marks(tau, model.bandwidth());
    let v = model.integrate_positive(
        Weight::Plus,
        1,
        |w, o| o[0] = filter_function(&pieces, w).norm_sqr(),
        tau,
        &marks,
        tol,
    )?;
    Ok(v[0] / PI)
}

/// Quantum phases `θ_[k]`, k = 1..K, by the frequency-domain route.
pub fn thetas_multi(protocol: &Protocol, model: &NoiseModel, tol: Tol) -> Result<Vec<f64>> {
    let k = protocol.k();
    if k == 0 {
        return Ok(vec![]);
    }
    let gate = protocol.gate_pieces_abs();
    let hist: Vec<Vec<Piece>> = (1..=k).map(|i| protocol.interval_pieces(i)).collect();
    let lag = protocol.t_k() + protocol.gate().duration();
    let marks = resonance_marks(protocol.gate().duration(), model.bandwidth());
    let v = model.integrate_positive(
        Weight::Minus,
        k,
        |w, o| {
            let fg = filter_function(&gate, w);
            for (oi, h) in o.iter_mut().zip(&hist) {
                *oi = (fg * filter_function(h, w).conj()).im;
            }
        },
        lag,
        &marks,
        tol,
    )?;
    Ok(v.into_iter().map(|x| 2.0 * x / PI).collect())
}

/// Single-reset phase with `history` on `[0, t_s)` and the gate at `t_s`.
pub fn theta_single(gate: &SwitchingFunction, history: &SwitchingFunction, model: &NoiseModel, tol: Tol) -> Result<f64> {
    let p = Protocol::single(history.clone(), gate.clone())?;
    Ok(thetas_multi(&p, model, tol)?.first().copied().unwrap_or(0.0))
}

/// Gate fidelity with decay factor and phases.
pub fn gate_fidelity(protocol: &Protocol, model: &NoiseModel, tol: Tol) -> Result<FidelityReport> {
    let chi_c = chi_frequency_domain(protocol.gate(), model, tol)?;
    let thetas = thetas_multi(protocol, model, tol)?;
    Ok(assemble(chi_c, thetas))
}

/// Builds a report from a decay factor and phases.
pub fn assemble(chi_c: f64, thetas: Vec<f64>) -> FidelityReport {
    let fidelity = fidelity_from(chi_c, &thetas);
    let rqe = if thetas.len() == 1 && chi_c > 0.0 { rqe(chi_c, thetas[0]).ok() } else { None };
    FidelityReport { chi_c, thetas, fidelity, rqe }
}

/// `∫∫ a(τ) b(t) f(τ − t + c) dτ dt` for piecewise-constant `a`, `b`, reduced
/// to lag integrals against the trapezoidal overlap kernel of each pair of
/// pieces. `bandwidth` bounds the frequency content of `f`.
pub fn lag_double_integral<F: Fn(f64) -> f64>(a: &[Piece], b: &[Piece], c: f64, f: F, bandwidth: f64) -> f64 {
    let (gx, gw) = gl20();
    let seg = |u0: f64, u1: f64, h0: f64, h1: f64| -> f64 {
        let len = u1 - u0;
        if len <= 0.0 {
            return 0.0;
        }
        let n = ((len * bandwidth / 6.0).ceil() as usize).max(1);
        let step = len / n as f64;
        let mut s = 0.0;
        for p in 0..n {
            let lo = u0 + step * p as f64;
            let mid = lo + 0.5 * step;
            let mut acc = 0.0;
            for (x, w) in gx.iter().zip(gw) {
                let u = mid + 0.5 * step * x;
                let h = h0 + (h1 - h0) * (u - u0) / len;
                acc += w * h * f(u + c);
            }
            s += 0.5 * step * acc;
        }
        s
    };
    let mut total = 0.0;
    for pa in a {
        for pb in b {
            let (p, q, r, s) = (pa.a, pa.b, pb.a, pb.b);
            let u1 = p - s;
            let u2 = (p - r).min(q - s);
            let u3 = (p - r).max(q - s);
            let u4 = q - r;
            let h = (q - p).min(s - r);
            let v = seg(u1, u2, 0.0, h) + seg(u2, u3, h, h) + seg(u3, u4, h, 0.0);
            total += pa.sign * pb.sign * v;
        }
    }
    total
}

/// `χ_c = ∫∫ y(τ₁) y(τ₂) C⁺(τ₂ − τ₁)` over the gate, time-domain route.
pub fn chi_time_domain<C: CorrelationFunction + ?Sized>(gate: &SwitchingFunction, corr: &C) -> f64 {
    let p = gate.pieces();
    lag_double_integral(&p, &p, 0.0, |u| corr.c_plus(u), corr.bandwidth())
}

/// Phases `θ_[k] = −2i ∫∫ y_G(τ) y_h(t) C⁻(t_K + τ − t)`, time-domain route.
pub fn thetas_time_domain<C: CorrelationFunction + ?Sized>(protocol: &Protocol, corr: &C) -> Vec<f64> {
    let g = protocol.gate().pieces();
    let t_k = protocol.t_k();
    (1..=protocol.k())
        .map(|k| {
            let h = protocol.interval_pieces(k);
            2.0 * lag_double_integral(&g, &h, t_k, |u| corr.c_minus_im(u), corr.bandwidth())
        })
        .collect()
}

/// Gate fidelity assembled from the time-domain route.
pub fn gate_fidelity_time_domain<C: CorrelationFunction + ?Sized>(protocol: &Protocol, corr: &C) -> FidelityReport {
    assemble(chi_time_domain(protocol.gate(), corr), thetas_time_domain(protocol, corr))
}

/// `e^{iωt_K} F_G(ω) F_h*(ω)` helper exposed for kernels and diagnostics.
pub fn phase_overlap(gate_abs: &[Piece], hist: &[Piece], w: f64) -> Complex64 {
    filter_function(gate_abs, w) * filter_function(hist, w).conj()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rqe_examples() {
        assert!((rqe(0.3, 0.0).unwrap().exact - 1.0).abs() < 1e-15);
        let r = rqe(0.01, 0.2).unwrap();
        assert!((r.exact / r.approx - 1.0).abs() < 0.02);
        assert!(rqe(0.0, 0.1).is_err());
    }

    #[test]
    fn fidelity_formula() {
        assert_eq!(fidelity_from(0.0, &[]), 1.0);
        assert!((fidelity_from(0.2, &[0.1, 0.3]) - 0.5 * (1.0 + (-0.2f64).exp() * 0.1f64.cos() * 0.3f64.cos())).abs() < 1e-16);
        assert!((average_fidelity(1.0) - 1.0).abs() < 1e-16);
    }
}
