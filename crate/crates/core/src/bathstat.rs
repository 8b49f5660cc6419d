//! Post-reset bath statistics: conditional means, updated correlators,
//! mean-route phases, dressed means under periodic control and
//! re-equilibration under idling.
//!
//! After `K` resets the bath is a uniform mixture of `2^K` Gaussian
//! components whose means are `Σ_k z_k μ_[k]`. The mixture is never
//! enumerated; every statistic is expressed through the `μ_[k]`.

use crate::asymptotics::{dirichlet, kernel_xi, pv_cot};
use crate::cheb::Cheb;
use crate::error::{Error, Result};
use crate::fidelity::fidelity_from;
use crate::noise::{CorrelationFunction, NoiseModel, Weight};
use crate::pulse::{filter_function, filtering_order, Piece, Protocol, SwitchingFunction};
use crate::quad::{gl20, Tol};
use crate::special::loglog_slope;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Default number of Chebyshev nodes for mean handles on `[0, τG]`.
pub const MEAN_NODES: usize = 32;

/// Conditional mean `μ_[k](t_K; τ)` of reset interval `k`, for `τ ∈ [0, τG]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalMean {
    pub k: usize,
    pub interp: Cheb,
}

impl ConditionalMean {
    pub fn eval(&self, tau: f64) -> f64 {
        self.interp.eval(tau)
    }
    pub fn is_zero(&self) -> bool {
        self.interp.coeffs.iter().all(|c| *c == 0.0)
    }
}

/// `∫_{pieces} y(t) (−iC⁻)(t_ref − t) dt`.
fn mean_at<C: CorrelationFunction + ?Sized>(pieces: &[Piece], t_ref: f64, corr: &C) -> f64 {
    let (gx, gw) = gl20();
    let bw = corr.bandwidth();
    let mut total = 0.0;
    for p in pieces {
        let len = p.b - p.a;
        let n = ((len * bw / 6.0).ceil() as usize).max(1);
        let h = len / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let mid = p.a + h * (i as f64 + 0.5);
            for (x, w) in gx.iter().zip(gw) {
                acc += w * corr.c_minus_im(t_ref - (mid + 0.5 * h * x));
            }
        }
        total += p.sign * 0.5 * h * acc;
    }
    total
}

/// Conditional means of every reset interval, by time-domain quadrature
/// against the correlator.
pub fn conditional_means<C: CorrelationFunction + ?Sized>(protocol: &Protocol, corr: &C) -> Vec<ConditionalMean> {
    conditional_means_with(protocol, corr, MEAN_NODES)
}

/// As [`conditional_means`] with a chosen number of Chebyshev nodes.
pub fn conditional_means_with<C: CorrelationFunction + ?Sized>(protocol: &Protocol, corr: &C, nodes: usize) -> Vec<ConditionalMean> {
    let tau_g = protocol.gate().duration();
    let t_k = protocol.t_k();
    (1..=protocol.k())
        .map(|k| {
            let pieces = protocol.interval_pieces(k);
            let interp = Cheb::build(0.0, tau_g, nodes, |tau| mean_at(&pieces, t_k + tau, corr));
            ConditionalMean { k, interp }
        })
        .collect()
}

/// `θ_[k] = 2 ∫₀^{τG} y_G(τ) μ_[k](τ) dτ`.
pub fn theta_from_means(gate: &SwitchingFunction, means: &[ConditionalMean]) -> Vec<f64> {
    means.iter().map(|m| 2.0 * gate_moment(gate, |t| m.eval(t))).collect()
}

fn gate_moment<F: Fn(f64) -> f64>(gate: &SwitchingFunction, f: F) -> f64 {
    let (gx, gw) = gl20();
    gate.pieces()
        .iter()
        .map(|p| {
            let c = 0.5 * (p.a + p.b);
            let h = 0.5 * (p.b - p.a);
            p.sign * h * gx.iter().zip(gw).map(|(x, w)| w * f(c + h * x)).sum::<f64>()
        })
        .sum()
}

/// Updated two-time statistics of the post-reset bath.
pub struct UpdatedBathStats<'a, C: CorrelationFunction + ?Sized> {
    pub means: &'a [ConditionalMean],
    pub base: &'a C,
}

impl<'a, C: CorrelationFunction + ?Sized> UpdatedBathStats<'a, C> {
    pub fn new(means: &'a [ConditionalMean], base: &'a C) -> Self {
        UpdatedBathStats { means, base }
    }

    /// Total mean of the mixture; the ± components cancel pairwise.
    pub fn mean_total(&self, _tau: f64) -> f64 {
        0.0
    }

    /// `C⁺(τ₂ − τ₁) + 2 Σ_k μ_[k](τ₂) μ_[k](τ₁)`.
    pub fn c_plus(&self, tau2: f64, tau1: f64) -> f64 {
        self.base.c_plus(tau2 - tau1) + 2.0 * self.means.iter().map(|m| m.eval(tau2) * m.eval(tau1)).sum::<f64>()
    }

    /// Quantum correlator, unchanged by the resets.
    pub fn c_minus_im(&self, tau2: f64, tau1: f64) -> f64 {
        self.base.c_minus_im(tau2 - tau1)
    }

    /// True when some conditional mean is nonzero.
    pub fn non_gaussian(&self) -> bool {
        self.means.iter().any(|m| !m.is_zero())
    }
}

/// Convenience constructor mirroring the updated classical correlator.
pub fn updated_classical_correlator<'a, C: CorrelationFunction + ?Sized>(
    means: &'a [ConditionalMean],
    base: &'a C,
) -> impl Fn(f64, f64) -> f64 + 'a {
    move |t2, t1| base.c_plus(t2 - t1) + 2.0 * means.iter().map(|m| m.eval(t2) * m.eval(t1)).sum::<f64>()
}

/// Decay factor from the component-centralised second moment: the double
/// integral of the updated `C⁺` minus `2 Σ_k (∫ y_G μ_[k])²`.
pub fn chi_from_centralized<C: CorrelationFunction + ?Sized>(gate: &SwitchingFunction, means: &[ConditionalMean], base: &C) -> f64 {
    let pieces = gate.pieces();
    if pieces.is_empty() {
        return 0.0;
    }
    let stats = UpdatedBathStats::new(means, base);
    let (gx, gw) = gl20();
    let bw = base.bandwidth();
    let mut total = 0.0;
    for p2 in &pieces {
        for p1 in &pieces {
            // tensor Gauss–Legendre over the rectangle, split for bandwidth
            let n2 = (((p2.b - p2.a) * bw / 6.0).ceil() as usize).max(1);
            let n1 = (((p1.b - p1.a) * bw / 6.0).ceil() as usize).max(1);
            let h2 = (p2.b - p2.a) / n2 as f64;
            let h1 = (p1.b - p1.a) / n1 as f64;
            let mut acc = 0.0;
            for i2 in 0..n2 {
                let c2 = p2.a + h2 * (i2 as f64 + 0.5);
                for i1 in 0..n1 {
                    let c1 = p1.a + h1 * (i1 as f64 + 0.5);
                    let mut s = 0.0;
                    for (x2, w2) in gx.iter().zip(gw) {
                        for (x1, w1) in gx.iter().zip(gw) {
                            s += w2 * w1 * stats.c_plus(c2 + 0.5 * h2 * x2, c1 + 0.5 * h1 * x1);
                        }
                    }
                    acc += s * 0.25 * h2 * h1;
                }
            }
            total += p2.sign * p1.sign * acc;
        }
    }
    let shift: f64 = means.iter().map(|m| gate_moment(gate, |t| m.eval(t)).powi(2)).sum();
    total - 2.0 * shift
}

/// Dressed mean after `M` periodic gate cycles and one reset:
/// `μ^(M)(τ) = (1/π) ∫₀^∞ J Im[e^{iωτ} ((D_M − 1) + iξ^(M))/2 · F_G*(ω)] dω`.
pub fn dressed_mean_periodic(m: usize, gate: &SwitchingFunction, model: &NoiseModel, tau: f64, tol: Tol) -> Result<f64> {
    if m == 0 {
        return Ok(0.0);
    }
    let pieces = gate.pieces();
    let tg = gate.duration();
    let marks: Vec<f64> = (1..=(model.bandwidth() * tg / (2.0 * PI)).floor() as usize)
        .map(|l| 2.0 * PI * l as f64 / tg)
        .collect();
    let v = model.integrate_positive(
        Weight::Minus,
        1,
        |w, o| {
            let x = w * tg;
            let kern = Complex64::new(0.5 * (dirichlet(m, x) - 1.0), 0.5 * kernel_xi(m, x));
            o[0] = (Complex64::from_polar(1.0, w * tau) * kern * filter_function(&pieces, w).conj()).im;
        },
        tau + (m as f64 + 1.0) * tg,
        &marks,
        tol,
    )?;
    Ok(v[0] / PI)
}

/// `M → ∞` dressed mean: integer-resonance comb plus a principal value.
pub fn asymptotic_mean(gate: &SwitchingFunction, model: &NoiseModel, tau: f64, tol: Tol) -> Result<f64> {
    let j = *model
        .density()
        .ok_or_else(|| Error::Invalid("asymptotic mean needs a continuous density".into()))?;
    let s = model.effective_s().unwrap_or(0.0);
    let fo = filtering_order(gate)?;
    if s + fo.alpha_p as f64 <= 0.0 {
        return Err(Error::NotConvergent(format!(
            "s + α_p = {} ≤ 0: dressed mean has no limit",
            s + fo.alpha_p as f64
        )));
    }
    if model.classical {
        return Ok(0.0);
    }
    let pieces = gate.pieces();
    let tg = gate.duration();
    let h = |w: f64| Complex64::from_polar(j.j(w), w * tau) * filter_function(&pieces, w).conj();
    let mut comb = 0.0;
    let lmax = (j.bandwidth() * tg / (2.0 * PI)).floor() as usize;
    for l in 1..=lmax {
        comb += h(2.0 * PI * l as f64 / tg).im;
    }
    let pv = pv_cot(|w| h(w).re, tg, &j.support(), tol)?;
    let reg = model.integrate_positive(
        Weight::Minus,
        1,
        |w, o| o[0] = (Complex64::from_polar(1.0, w * tau) * filter_function(&pieces, w).conj()).im,
        tau + tg,
        &[],
        tol,
    )?[0];
    Ok(comb / tg + (pv - reg) / (2.0 * PI))
}

/// Decay branch of the control-history means under idling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DecayBranch {
    PowerLaw,
    Superpolynomial,
}

/// One row of a re-equilibration table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayRow {
    pub m_idle: usize,
    pub t_idle: f64,
    /// `sqrt(Σ_k μ_ctrl,k(τ = 0)²)` over the control intervals.
    pub mu_ctrl: f64,
    /// `|μ|` of the idle interval at `τ = 0`.
    pub mu_idle: f64,
    pub fidelity: f64,
}

/// Re-equilibration table with the power-law fit over the last decade.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayTable {
    pub rows: Vec<DecayRow>,
    pub branch: DecayBranch,
    pub theory_exponent: Option<f64>,
    pub fitted_exponent: Option<f64>,
    /// Fidelity of the gate applied at `t = 0`.
    pub fidelity_t0: f64,
}

/// Predicted decay exponent `1 + s + α` of control-history means, from the
/// leading local filter-function orders whose coefficients survive.
pub fn decay_exponent(ctrl: &SwitchingFunction, s: f64) -> Result<Option<f64>> {
    let fo = filtering_order(ctrl)?;
    let mut best: Option<f64> = None;
    if let Some(a) = fo.alpha_re {
        if (0.5 * PI * (s + a as f64)).cos().abs() > 1e-9 {
            best = Some(1.0 + s + a as f64);
        }
    }
    if let Some(a) = fo.alpha_im {
        if (0.5 * PI * (s + a as f64)).sin().abs() > 1e-9 {
            let e = 1.0 + s + a as f64;
            best = Some(best.map_or(e, |b: f64| b.min(e)));
        }
    }
    Ok(best)
}

/// Means at `τ = 0` of each reset interval, frequency-domain route.
pub fn means_frequency_domain(protocol: &Protocol, model: &NoiseModel, tau: f64, tol: Tol) -> Result<Vec<f64>> {
    let k = protocol.k();
    if k == 0 {
        return Ok(vec![]);
    }
    let hist: Vec<Vec<Piece>> = (1..=k).map(|i| protocol.interval_pieces(i)).collect();
    let t_ref = protocol.t_k() + tau;
    let v = model.integrate_positive(
        Weight::Minus,
        k,
        |w, o| {
            let ph = Complex64::from_polar(1.0, w * t_ref);
            for (oi, h) in o.iter_mut().zip(&hist) {
                *oi = (ph * filter_function(h, w).conj()).im;
            }
        },
        t_ref,
        &[],
        tol,
    )?;
    Ok(v.into_iter().map(|x| x / PI).collect())
}

/// Re-equilibration of control-history means during idling with `idle`
/// cycles, for each `m_idle` in the grid (scenario c3 protocols).
pub fn reequilibration_decay(
    ctrl: &SwitchingFunction,
    n_ctrl: usize,
    idle: &SwitchingFunction,
    m_idle_grid: &[usize],
    gate: &SwitchingFunction,
    model: &NoiseModel,
    tol: Tol,
) -> Result<DecayTable> {
    let mut rows = Vec::with_capacity(m_idle_grid.len());
    for &mi in m_idle_grid {
        let p = Protocol::idle_restore(ctrl, n_ctrl, idle, mi, gate)?;
        let mu = means_frequency_domain(&p, model, 0.0, tol)?;
        let (ctrl_mu, idle_mu) = if mi > 0 { mu.split_at(n_ctrl) } else { (&mu[..], &[][..]) };
        let thetas = crate::fidelity::thetas_multi(&p, model, tol)?;
        let chi = crate::fidelity::chi_frequency_domain(gate, model, tol)?;
        rows.push(DecayRow {
            m_idle: mi,
            t_idle: mi as f64 * idle.duration(),
            mu_ctrl: ctrl_mu.iter().map(|x| x * x).sum::<f64>().sqrt(),
            mu_idle: idle_mu.first().map_or(0.0, |x| x.abs()),
            fidelity: fidelity_from(chi, &thetas),
        });
    }
    let chi0 = crate::fidelity::chi_frequency_domain(gate, model, tol)?;
    let s = model.effective_s().unwrap_or(0.0);
    let theory = decay_exponent(ctrl, s)?;
    let branch = if theory.is_some() { DecayBranch::PowerLaw } else { DecayBranch::Superpolynomial };
    let tail: Vec<&DecayRow> = match rows.iter().map(|r| r.t_idle).fold(None, |m: Option<f64>, t| Some(m.map_or(t, |m| m.max(t)))) {
        Some(tmax) if tmax > 0.0 => rows.iter().filter(|r| r.t_idle >= 0.1 * tmax && r.mu_ctrl > 0.0).collect(),
        _ => vec![],
    };
    let fitted = (branch == DecayBranch::PowerLaw && tail.len() >= 3).then(|| {
        let x: Vec<f64> = tail.iter().map(|r| r.t_idle).collect();
        let y: Vec<f64> = tail.iter().map(|r| r.mu_ctrl).collect();
        -loglog_slope(&x, &y)
    });
    Ok(DecayTable { rows, branch, theory_exponent: theory, fitted_exponent: fitted, fidelity_t0: fidelity_from(chi0, &[]) })
}
