//! Repetition kernels, elementary phases, plateau limits, convergence
//! bounds and order-of-magnitude regime formulas.

use crate::error::{Error, Result};
use crate::noise::{NoiseModel, Weight};
use crate::pulse::{filter_function, filtering_order, SwitchingFunction};
use crate::quad::{self, Tol};
use crate::special::{gamma, zeta_tail};
use serde::Serialize;
use std::f64::consts::PI;

/// Poles closer than this (in `|sin(x/2)|`) switch kernels to their sum form.
const POLE_GUARD: f64 = 1e-3;

/// Repetition kernel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KernelKind {
    Xi(usize),
    XiHf(usize),
    Eta(usize, usize),
    Dirichlet(usize),
    PvCot,
}

/// A kernel evaluated at `x = ωτG`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelSample {
    pub kind: KernelKind,
    pub x: f64,
    pub value: f64,
}

/// Evaluates a kernel.
pub fn sample(kind: KernelKind, x: f64) -> KernelSample {
    let value = match kind {
        KernelKind::Xi(m) => kernel_xi(m, x),
        KernelKind::XiHf(m) => kernel_xi_hf(m, x),
        KernelKind::Eta(k, m) => kernel_eta(k, m, x),
        KernelKind::Dirichlet(m) => dirichlet(m, x),
        KernelKind::PvCot => 1.0 / (0.5 * x).tan(),
    };
    KernelSample { kind, x, value }
}

/// `ξ^(M)(x) = cot(x/2)(1 − cos Mx) + sin Mx`.
pub fn kernel_xi(m: usize, x: f64) -> f64 {
    let (sh, ch) = (0.5 * x).sin_cos();
    if sh.abs() < POLE_GUARD {
        return kernel_xi_sum(m, x);
    }
    let mx = m as f64 * x;
    2.0 * (0.5 * mx).sin().powi(2) * ch / sh + mx.sin()
}

/// `ξ^(M)(x) = 2 Σ_{n=1}^{M} sin(nx)`.
pub fn kernel_xi_sum(m: usize, x: f64) -> f64 {
    2.0 * (1..=m).map(|n| (n as f64 * x).sin()).sum::<f64>()
}

/// Near-resonance kernel `2(1 − cos My)/y + sin My`.
pub fn kernel_xi_hf(m: usize, y: f64) -> f64 {
    let my = m as f64 * y;
    if y.abs() < 1e-8 {
        return m as f64 * my + my.sin();
    }
    4.0 * (0.5 * my).sin().powi(2) / y + my.sin()
}

/// Dirichlet kernel `sin((2M+1)x/2)/sin(x/2) = 1 + 2 Σ cos(nx)`.
pub fn dirichlet(m: usize, x: f64) -> f64 {
    let sh = (0.5 * x).sin();
    if sh.abs() < POLE_GUARD {
        return 1.0 + 2.0 * (1..=m).map(|n| (n as f64 * x).cos()).sum::<f64>();
    }
    ((m as f64 + 0.5) * x).sin() / sh
}

/// `η_k̃^(M)(x) = cos((k̃−1)Mx) ξ^(M)(x) + sin((k̃−1)Mx)(D_M(x) − 1)`.
pub fn kernel_eta(k: usize, m: usize, x: f64) -> f64 {
    let a = (k.saturating_sub(1) * m) as f64 * x;
    let (s, c) = a.sin_cos();
    c * kernel_xi(m, x) + s * (dirichlet(m, x) - 1.0)
}

/// `2 Σ_{m=1}^{M} sin((m + (k̃−1)M) x)`.
pub fn kernel_eta_sum(k: usize, m: usize, x: f64) -> f64 {
    let off = k.saturating_sub(1) * m;
    2.0 * (1..=m).map(|j| ((j + off) as f64 * x).sin()).sum::<f64>()
}

fn gate_marks(tau: f64, wmax: f64) -> Vec<f64> {
    let step = 2.0 * PI / tau;
    (1..=(wmax / step).floor().min(1e5) as usize).map(|l| l as f64 * step).collect()
}

/// `∫₀^∞ J(ω) |F_G(ω)|² g(ω) dω` for a vector of kernels `g`.
fn gate_weighted<G>(gate: &SwitchingFunction, model: &NoiseModel, dim: usize, lag: f64, tol: Tol, mut g: G) -> Result<Vec<f64>>
where
    G: FnMut(f64, &mut [f64]),
{
    let pieces = gate.pieces();
    let tau = gate.duration();
    let marks = gate_marks(tau, model.bandwidth());
    model.integrate_positive(
        Weight::Minus,
        dim,
        |w, o| {
            let f2 = filter_function(&pieces, w).norm_sqr();
            g(w, o);
            for v in o.iter_mut() {
                *v *= f2;
            }
        },
        lag,
        &marks,
        tol,
    )
}

/// Elementary phase `θ_n = −(i/π) ∫ e^{inτGω} |F_G|² S⁻ dω`.
pub fn theta_elementary(n: usize, gate: &SwitchingFunction, model: &NoiseModel, tol: Tol) -> Result<f64> {
    let tau = gate.duration();
    let v = gate_weighted(gate, model, 1, (n as f64 + 1.0) * tau, tol, |w, o| o[0] = (n as f64 * w * tau).sin())?;
    Ok(2.0 * v[0] / PI)
}

/// `θ_1..θ_N` in one vector-valued pass.
pub fn theta_elementary_all(n_max: usize, gate: &SwitchingFunction, model: &NoiseModel, tol: Tol) -> Result<Vec<f64>> {
    if n_max == 0 {
        return Ok(vec![]);
    }
    let tau = gate.duration();
    let v = gate_weighted(gate, model, n_max, (n_max as f64 + 1.0) * tau, tol, |w, o| {
        for (n, v) in o.iter_mut().enumerate() {
            *v = ((n + 1) as f64 * w * tau).sin();
        }
    })?;
    Ok(v.into_iter().map(|x| 2.0 * x / PI).collect())
}

/// Single-reset periodic phase `θ^(M) = (1/2π) ∫ ξ^(M)(ωτG) |F_G|² S⁻ dω`.
pub fn theta_periodic(m: usize, gate: &SwitchingFunction, model: &NoiseModel, tol: Tol) -> Result<f64> {
    if m == 0 {
        return Ok(0.0);
    }
    let tau = gate.duration();
    let v = gate_weighted(gate, model, 1, (m as f64 + 1.0) * tau, tol, |w, o| o[0] = kernel_xi(m, w * tau))?;
    Ok(v[0] / PI)
}

/// Multi-reset periodic phase `θ_k̃^(M)` via the η kernel.
pub fn theta_multi_periodic(k: usize, m: usize, gate: &SwitchingFunction, model: &NoiseModel, tol: Tol) -> Result<f64> {
    if k == 0 {
        return Err(Error::Invalid("k̃ must be ≥ 1".into()));
    }
    if m == 0 {
        return Ok(0.0);
    }
    let tau = gate.duration();
    let v = gate_weighted(gate, model, 1, ((k * m) as f64 + 1.0) * tau, tol, |w, o| o[0] = kernel_eta(k, m, w * tau))?;
    Ok(v[0] / PI)
}

/// `s_p = s + 2α_p` of a gate under a continuous model.
pub fn s_p(gate: &SwitchingFunction, model: &NoiseModel) -> Result<f64> {
    let s = model
        .effective_s()
        .ok_or_else(|| Error::Invalid("plateau exponent needs a continuous spectral density".into()))?;
    Ok(s + 2.0 * filtering_order(gate)?.alpha_p as f64)
}

/// True when `s_p` is an odd integer, where the power-law tail is absent.
pub fn is_superpolynomial(s_p: f64) -> bool {
    let h = 0.5 * (s_p - 1.0);
    s_p >= 1.0 && (h - h.round()).abs() < 1e-12
}

/// Principal value `PV ∫₀^∞ cot(ωτ/2) g(ω) dω` over the given support windows.
///
/// Each pole `ω_ℓ = 2ℓπ/τ` is handled by pairing `ω_ℓ ± x` inside a symmetric
/// exclusion radius `ε`, and the result is Richardson-extrapolated over
/// `ε ∈ {10⁻², 10⁻³, 10⁻⁴}·2π/τ`.
pub fn pv_cot<G: Fn(f64) -> f64>(g: G, tau: f64, support: &[(f64, f64)], tol: Tol) -> Result<f64> {
    let half = PI / tau;
    let wmax = support.iter().fold(0.0f64, |m, w| m.max(w.1));
    let touches = |lo: f64, hi: f64| support.iter().any(|&(a, b)| a < hi && b > lo);
    let mut total = 0.0;
    let cot = |w: f64| 1.0 / (0.5 * w * tau).tan();
    // cell around ω = 0 holds no interior pole
    if touches(0.0, half) {
        let parts = quad::partition(&[(0.0, half)], half / 4.0, &support_marks(support));
        let r = quad::integrate_windows_vec(|w, o| o[0] = cot(w) * g(w), 1, &parts, tol);
        if !r.converged {
            return Err(Error::NotConvergent("PV cell at zero frequency".into()));
        }
        total += r.value[0];
    }
    let lmax = ((wmax + half) / (2.0 * half)).ceil() as usize;
    for l in 1..=lmax {
        let wl = 2.0 * PI * l as f64 / tau;
        if !touches(wl - half, wl + half) {
            continue;
        }
        let folded = |x: f64| cot(x) * (g(wl + x) - g(wl - x));
        let marks: Vec<f64> = support_marks(support).iter().map(|m| (m - wl).abs()).filter(|&m| m < half).collect();
        // ε ladder 10⁻²,10⁻³,… ·2π/τ; extend until successive Richardson
        // estimates agree (narrow features near a pole need small ε)
        let mut prev_i: Option<f64> = None;
        let mut prev_r: Option<f64> = None;
        let mut accepted = None;
        let mut last_gap = f64::NAN;
        for p in 2..=8 {
            let eps = 10f64.powi(-p) * 2.0 * PI / tau;
            let parts = quad::partition(&[(eps, half)], half / 8.0, &marks);
            let r = quad::integrate_windows_vec(|x, o| o[0] = folded(x), 1, &parts, tol);
            if !r.converged {
                return Err(Error::NotConvergent(format!("PV cell at IRF ℓ = {l}")));
            }
            let i = r.value[0];
            if let Some(ip) = prev_i {
                let rich = (10.0 * i - ip) / 9.0;
                if let Some(rp) = prev_r {
                    last_gap = (rich - rp).abs();
                    if last_gap < 1e-8_f64.max(tol.rel * rich.abs()) {
                        // cubic correction from the last pair of linear estimates
                        accepted = Some((1000.0 * rich - rp) / 999.0);
                        break;
                    }
                }
                prev_r = Some(rich);
            }
            prev_i = Some(i);
        }
        let r2 = accepted.ok_or_else(|| {
            Error::NotConvergent(format!("PV extrapolation at IRF ℓ = {l} unstable (gap {last_gap:e})"))
        })?;
        total += r2;
    }
    Ok(total)
}

fn support_marks(support: &[(f64, f64)]) -> Vec<f64> {
    support.iter().flat_map(|&(a, b)| [a, 0.5 * (a + b), b]).collect()
}

/// Asymptotic single-reset phase `θ^(∞) = (1/2π) PV ∫ cot(ωτG/2) |F_G|² S⁻ dω`.
pub fn theta_asymptotic_pv(gate: &SwitchingFunction, model: &NoiseModel, tol: Tol) -> Result<f64> {
    let sp = s_p(gate, model)?;
    if sp <= 0.0 {
        return Err(Error::NotConvergent(format!("s_p = {sp} ≤ 0: no finite asymptotic phase")));
    }
    if model.classical {
        return Ok(0.0);
    }
    let j = *model.density().expect("continuous");
    let pieces = gate.pieces();
    let v = pv_cot(|w| filter_function(&pieces, w).norm_sqr() * j.j(w), gate.duration(), &j.support(), tol)?;
    Ok(v / PI)
}

/// Coefficient `A` of the elementary-phase tail `θ_n ≈ A n^{−(1+s_p)}`.
pub fn tail_coefficient(gate: &SwitchingFunction, model: &NoiseModel) -> Result<f64> {
    let sp = s_p(gate, model)?;
    if model.classical {
        return Ok(0.0);
    }
    let j = model.density().expect("continuous");
    let fo = filtering_order(gate)?;
    let tau = gate.duration();
    let c = if j.delta0 > 0.0 {
        fo.coeff_sq * tau.powi(2 + 2 * fo.alpha_p as i32) * j.lf_coefficient()
    } else {
        fo.coeff_sq * tau.powi(2 + 2 * fo.alpha_p as i32) * j.j_hf(0.0)
    };
    Ok(2.0 * c / PI * gamma(sp + 1.0) * (0.5 * PI * sp).cos() / tau.powf(1.0 + sp))
}

/// Plateau and product-convergence summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub s_p: f64,
    pub superpolynomial: bool,
    /// Single-reset asymptotic phase, when `s_p > 0`.
    pub theta_inf: Option<f64>,
    /// Tail coefficient `A` of `θ_n ≈ A n^{−(1+s_p)}`.
    pub tail_coefficient: f64,
    pub m: usize,
    /// Phases `θ_k̃^(M)` for `k̃ = 1..K_max`.
    pub thetas: Vec<f64>,
    /// Partial products `Π_{k̃ ≤ K} cos θ_k̃^(M)` for `K = 0..K_max`.
    pub partial_products: Vec<f64>,
    pub converged: bool,
    pub converged_at: Option<usize>,
}

impl AsymptoticReport {
    /// Bound on `Σ_{k̃ > K} θ_k̃²`:
    /// `A² M^{−2s_p} (ζ(2 + 2s_p) − Σ_{j<K} j^{−(2+2s_p)})`.
    pub fn tail_bound(&self, k: usize) -> f64 {
        if self.tail_coefficient == 0.0 {
            return 0.0;
        }
        let a = self.tail_coefficient;
        a * a * (self.m as f64).powf(-2.0 * self.s_p) * zeta_tail(2.0 + 2.0 * self.s_p, k.max(1) as u64)
    }

    /// Single-reset tail `Σ_{n > M} θ_n ≈ A (ζ(1+s_p) − Σ_{n ≤ M} n^{−(1+s_p)})`.
    pub fn single_reset_tail(&self, m: usize) -> Option<f64> {
        (self.s_p > 0.0).then(|| self.tail_coefficient * zeta_tail(1.0 + self.s_p, m as u64 + 1))
    }
}

/// Partial products over `K_max` resets, the ζ tail bound and a converged flag
/// (first `K` with bound below `threshold`).
pub fn product_convergence_report(
    m: usize,
    gate: &SwitchingFunction,
    model: &NoiseModel,
    k_max: usize,
    threshold: f64,
    tol: Tol,
) -> Result<AsymptoticReport> {
    let sp = s_p(gate, model)?;
    if sp <= -0.5 {
        return Err(Error::NotConvergent(format!("s_p = {sp} ≤ −1/2: product does not converge")));
    }
    if m == 0 {
        return Err(Error::Invalid("M must be ≥ 1".into()));
    }
    let elem = theta_elementary_all(k_max * m, gate, model, tol)?;
    let thetas: Vec<f64> = (0..k_max).map(|k| elem[k * m..(k + 1) * m].iter().sum()).collect();
    let mut partial_products = vec![1.0];
    for t in &thetas {
        let last = *partial_products.last().unwrap();
        partial_products.push(last * t.cos());
    }
    let theta_inf = if sp > 0.0 { Some(theta_asymptotic_pv(gate, model, tol)?) } else { None };
    let mut rep = AsymptoticReport {
        s_p: sp,
        superpolynomial: is_superpolynomial(sp),
        theta_inf,
        tail_coefficient: tail_coefficient(gate, model)?,
        m,
        thetas,
        partial_products,
        converged: false,
        converged_at: None,
    };
    rep.converged_at = (0..=k_max).find(|&k| rep.tail_bound(k) < threshold);
    rep.converged = rep.converged_at.is_some();
    Ok(rep)
}

/// Regime selected by `Mγ0τG ≶ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Short,
    Long,
}

/// Low-frequency order-of-magnitude estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OomLf {
    pub d_c: f64,
    pub d_q_sh: f64,
    pub d_q_as: f64,
    pub chi_hat: f64,
    pub theta_short: f64,
    pub theta_long: f64,
    pub branch: Branch,
    /// `Δ0τG² (γ0τG)^{2(α_p−1)}`; values ≫ 1 signal a large relative quantum error.
    pub rqe_indicator: f64,
    /// False outside the short-gate limit (`γ0τG ≥ 0.1`).
    pub sgl: bool,
}

impl OomLf {
    pub fn theta_hat(&self) -> f64 {
        match self.branch {
            Branch::Short => self.theta_short,
            Branch::Long => self.theta_long,
        }
    }
}

/// LF regime formulas from the filtering order `alpha`, the leading FF
/// coefficient `coeff_sq`, and dimensionless `Δ0τG²`, `γ0τG`.
pub fn oom_lf(alpha: usize, coeff_sq: f64, s: f64, delta0_t2: f64, gamma0_t: f64, m: usize) -> OomLf {
    let a = alpha as f64;
    let g = gamma(0.5 * (1.0 + s));
    let d_c = gamma(0.5 * (s + 2.0 * a + 1.0)) / (2.0 * PI * g) * coeff_sq;
    let d_q_sh = gamma(0.5 * (s + 2.0 * a + 2.0)) / (2.0 * PI * g) * coeff_sq;
    let d_q_as = gamma(0.5 * (s + 2.0 * a)) / (PI * g) * coeff_sq;
    let mf = m as f64;
    OomLf {
        d_c,
        d_q_sh,
        d_q_as,
        chi_hat: d_c * delta0_t2 * gamma0_t.powf(2.0 * a),
        theta_short: mf * (mf + 1.0) * d_q_sh * delta0_t2 * gamma0_t.powf(2.0 * a + 1.0),
        theta_long: d_q_as * delta0_t2 * gamma0_t.powf(2.0 * a - 1.0),
        branch: if mf * gamma0_t < 1.0 { Branch::Short } else { Branch::Long },
        rqe_indicator: delta0_t2 * gamma0_t.powf(2.0 * (a - 1.0)),
        sgl: gamma0_t < 0.1,
    }
}

/// High-frequency order-of-magnitude estimates near an integer resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OomHf {
    pub d_hf: f64,
    pub chi_hat: f64,
    pub theta_transient: f64,
    pub theta_asymptotic: f64,
    /// Oscillation period in `M` of the transient, `2π/(δω̄1τG)`.
    pub period_m: f64,
    /// True when `γ1τG ≪ δω̄1τG ≪ 1` holds (factor 3 margins).
    pub transient_valid: bool,
}

/// HF regime formulas from `|F̃_G(2ℓπ)|²` and dimensionless `Δ1τG²`,
/// `δω̄1τG`, `γ1τG`. The peak area on `ω > 0` is `Δ1`.
pub fn oom_hf(ff_sq_at_irf: f64, delta1_t2: f64, detuning_t: f64, gamma1_t: f64, m: usize) -> OomHf {
    let d_hf = ff_sq_at_irf / PI;
    let md = m as f64 * detuning_t;
    OomHf {
        d_hf,
        chi_hat: d_hf * delta1_t2,
        theta_transient: 2.0 * d_hf * delta1_t2 / detuning_t * (1.0 - md.cos()),
        theta_asymptotic: 2.0 * d_hf * delta1_t2 / detuning_t,
        period_m: 2.0 * PI / detuning_t.abs(),
        transient_valid: 3.0 * gamma1_t < detuning_t.abs() && 3.0 * detuning_t.abs() < 1.0,
    }
}

/// `|F̃_G(2ℓπ)|² = |F_G(2ℓπ/τG)|² / τG²`.
pub fn ff_sq_at_irf(gate: &SwitchingFunction, l: usize) -> f64 {
    let tau = gate.duration();
    gate.filter_function(2.0 * PI * l as f64 / tau).norm_sqr() / (tau * tau)
}
