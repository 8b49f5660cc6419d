//! Spectral densities, classical and quantum spectra, correlators and
//! discrete-mode baths.
//!
//! Conventions: `S±(ω) = ∫ e^{−iωτ} C±(τ) dτ`, `S⁺ = coth(β|ω|/2) J`,
//! `S⁻ = sgn(ω) J`. A discrete bath with weights `w_k` represents
//! `J(ω) = (1/2π) Σ_k w_k [δ(ω − Ω_k) + δ(ω + Ω_k)]`, so that
//! `Σ_k w_k = π (Δ0 + 2Δ1)` for a discretised continuum.

use crate::cheb::Cheb;
use crate::error::{Error, Result};
use crate::quad::{self, Tol};
use crate::special::{coth, gamma};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

/// Gaussian tails are truncated this many widths from each peak.
pub const SUPPORT_WIDTHS: f64 = 8.0;

/// Two-peak spectral density: an Ohmic-type low-frequency peak and a
/// Gaussian high-frequency pair at `±ω̄1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    pub s: f64,
    pub delta0: f64,
    pub gamma0: f64,
    pub delta1: f64,
    pub omega_bar1: f64,
    pub gamma1: f64,
}

impl SpectralDensity {
    /// Low-frequency peak only.
    pub fn lf(s: f64, delta0: f64, gamma0: f64) -> Self {
        SpectralDensity { s, delta0, gamma0, delta1: 0.0, omega_bar1: 0.0, gamma1: 1.0 }
    }

    /// High-frequency peak only.
    pub fn hf(delta1: f64, omega_bar1: f64, gamma1: f64) -> Self {
        SpectralDensity { s: 1.0, delta0: 0.0, gamma0: 1.0, delta1, omega_bar1, gamma1 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.delta0 >= 0.0
            && self.delta1 >= 0.0
            && (self.delta0 == 0.0 || (self.s > 0.0 && self.gamma0 > 0.0))
            && (self.delta1 == 0.0 || (self.gamma1 > 0.0 && self.omega_bar1 >= 0.0))
            && [self.s, self.delta0, self.gamma0, self.delta1, self.omega_bar1, self.gamma1]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!("invalid spectral density {self:?}")))
        }
    }

    /// Coefficient `c` of `J(ω) ≈ c |ω|^s` near zero.
    pub fn lf_coefficient(&self) -> f64 {
        if self.delta0 == 0.0 {
            return 0.0;
        }
        self.delta0 / (self.gamma0.powf(1.0 + self.s) * gamma(0.5 * (1.0 + self.s)))
    }

    /// Low-frequency part of `J`.
    pub fn j_lf(&self, w: f64) -> f64 {
        if self.delta0 == 0.0 {
            return 0.0;
        }
        let x = w.abs() / self.gamma0;
        self.delta0 / (gamma(0.5 * (1.0 + self.s)) * self.gamma0) * x.powf(self.s) * (-x * x).exp()
    }

    /// High-frequency part of `J`.
    pub fn j_hf(&self, w: f64) -> f64 {
        if self.delta1 == 0.0 {
            return 0.0;
        }
        let a = (w - self.omega_bar1) / self.gamma1;
        let b = (w + self.omega_bar1) / self.gamma1;
        self.delta1 / (PI.sqrt() * self.gamma1) * ((-a * a).exp() + (-b * b).exp())
    }

    /// Spectral density `J(ω)`.
    pub fn j(&self, w: f64) -> f64 {
        self.j_lf(w) + self.j_hf(w)
    }

    /// Disjoint windows on `ω ≥ 0` outside of which `J` is negligible.
    pub fn support(&self) -> Vec<(f64, f64)> {
        let mut w = Vec::new();
        if self.delta0 > 0.0 {
            w.push((0.0, SUPPORT_WIDTHS * self.gamma0));
        }
        if self.delta1 > 0.0 {
            let lo = (self.omega_bar1 - SUPPORT_WIDTHS * self.gamma1).max(0.0);
            w.push((lo, self.omega_bar1 + SUPPORT_WIDTHS * self.gamma1));
        }
        merge_windows(w)
    }

    /// Largest frequency in the support.
    pub fn bandwidth(&self) -> f64 {
        self.support().last().map_or(0.0, |w| w.1)
    }
}

fn merge_windows(mut w: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    w.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in w {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// One bosonic mode: frequency `omega` and spectral weight `g2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub omega: f64,
    pub g2: f64,
}

impl Mode {
    /// Physical coupling `|g|²` of `B = Σ (g b + g* b†)`.
    pub fn coupling_sq(&self) -> f64 {
        self.g2 / (4.0 * PI * PI)
    }
}

/// Finite set of bath modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSpectrum {
    pub modes: Vec<Mode>,
}

impl DiscreteSpectrum {
    pub fn new(modes: Vec<Mode>) -> Result<Self> {
        for (i, m) in modes.iter().enumerate() {
            if !(m.omega > 0.0) || !(m.g2 >= 0.0) {
                return Err(Error::Invalid(format!("mode {i}: frequency must be > 0 and weight ≥ 0")));
            }
            if modes[..i].iter().any(|o| o.omega == m.omega) {
                return Err(Error::Invalid(format!("mode {i}: duplicate frequency {}", m.omega)));
            }
        }
        Ok(DiscreteSpectrum { modes })
    }

    pub fn total_weight(&self) -> f64 {
        self.modes.iter().map(|m| m.g2).sum()
    }
}

/// Continuous or discrete spectral density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Density {
    Continuous(SpectralDensity),
    Discrete(DiscreteSpectrum),
}

/// Which spectrum weights a frequency integral on `ω > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    /// `S⁺(ω) = coth(βω/2) J(ω)`.
    Plus,
    /// `S⁻(ω) = J(ω)` for `ω > 0` (zero for classical models).
    Minus,
}

/// Noise model: density, inverse temperature and a classical switch that
/// forces `S⁻ ≡ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub density: Density,
    pub beta: f64,
    pub classical: bool,
}

impl NoiseModel {
    pub fn continuous(j: SpectralDensity, beta: f64) -> Result<Self> {
        j.validate()?;
        if !(beta > 0.0) {
            return Err(Error::Invalid("beta must be positive (inf allowed)".into()));
        }
        Ok(NoiseModel { density: Density::Continuous(j), beta, classical: false })
    }

    pub fn discrete(d: DiscreteSpectrum, beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::Invalid("beta must be positive (inf allowed)".into()));
        }
        Ok(NoiseModel { density: Density::Discrete(d), beta, classical: false })
    }

    /// Same classical spectrum with the quantum spectrum forced to zero.
    pub fn classical(&self) -> Self {
        NoiseModel { classical: true, ..self.clone() }
    }

    pub fn density(&self) -> Option<&SpectralDensity> {
        match &self.density {
            Density::Continuous(j) => Some(j),
            Density::Discrete(_) => None,
        }
    }

    /// Low-frequency exponent governing filtering: `s` with an LF peak, 0 without.
    pub fn effective_s(&self) -> Option<f64> {
        self.density().map(|j| if j.delta0 > 0.0 { j.s } else { 0.0 })
    }

    fn thermal(&self, w: f64) -> f64 {
        if self.beta.is_infinite() {
            1.0
        } else {
            coth(0.5 * self.beta * w.abs())
        }
    }

    fn check_integrable(&self) -> Result<()> {
        if let Density::Continuous(j) = &self.density {
            if self.beta.is_finite() && j.delta0 > 0.0 && j.s < 1.0 {
                return Err(Error::NonIntegrable(format!(
                    "s = {} < 1 with finite beta = {}",
                    j.s, self.beta
                )));
            }
            if self.beta.is_finite() && j.delta1 > 0.0 && j.omega_bar1 - SUPPORT_WIDTHS * j.gamma1 <= 0.0 {
                return Err(Error::NonIntegrable(format!(
                    "HF peak reaches zero frequency with finite beta = {}",
                    self.beta
                )));
            }
        }
        Ok(())
    }

    /// Classical spectrum `S⁺(ω)`.
    pub fn spectrum_plus(&self, w: f64) -> Result<f64> {
        let j = match &self.density {
            Density::Continuous(j) => j,
            Density::Discrete(_) => {
                return Err(Error::Invalid("discrete spectra have no pointwise value".into()))
            }
        };
        self.check_integrable()?;
        if w == 0.0 {
            if self.beta.is_infinite() || j.delta0 == 0.0 {
                return Ok(j.j(0.0));
            }
            // s ≥ 1 here: coth(βω/2) J → 2 J'(0⁺)/β for s = 1, 0 for s > 1
            // the HF window excludes 0 here, so only the LF peak contributes
            return Ok(if j.s == 1.0 { 2.0 * j.lf_coefficient() / self.beta } else { 0.0 });
        }
        Ok(self.thermal(w) * j.j(w))
    }

    /// Quantum spectrum `S⁻(ω) = sgn(ω) J(ω)`.
    pub fn spectrum_minus(&self, w: f64) -> f64 {
        if self.classical || w == 0.0 {
            return 0.0;
        }
        match &self.density {
            Density::Continuous(j) => w.signum() * j.j(w),
            Density::Discrete(_) => 0.0,
        }
    }

    /// Largest relevant frequency.
    pub fn bandwidth(&self) -> f64 {
        match &self.density {
            Density::Continuous(j) => j.bandwidth(),
            Density::Discrete(d) => d.modes.iter().fold(0.0, |m, x| m.max(x.omega)),
        }
    }

    /// `∫₀^∞ W(ω) f(ω) dω` for a vector-valued `f`, where `W` is `S⁺` or `S⁻`
    /// restricted to positive frequencies. `max_lag` is the largest time
    /// scale oscillating in `f`, used to size quadrature panels; `marks`
    /// are extra breakpoints.
    pub fn integrate_positive<F>(
        &self,
        weight: Weight,
        dim: usize,
        mut f: F,
        max_lag: f64,
        marks: &[f64],
        tol: Tol,
    ) -> Result<Vec<f64>>
    where
        F: FnMut(f64, &mut [f64]),
    {
        if weight == Weight::Minus && self.classical {
            return Ok(vec![0.0; dim]);
        }
        match &self.density {
            Density::Discrete(d) => {
                let mut out = vec![0.0; dim];
                let mut buf = vec![0.0; dim];
                for m in &d.modes {
                    let wgt = m.g2 / (2.0 * PI)
                        * match weight {
                            Weight::Plus => self.thermal(m.omega),
                            Weight::Minus => 1.0,
                        };
                    f(m.omega, &mut buf);
                    for (o, b) in out.iter_mut().zip(&buf) {
                        *o += wgt * b;
                    }
                }
                Ok(out)
            }
            Density::Continuous(j) => {
                if weight == Weight::Plus {
                    self.check_integrable()?;
                }
                let width = if max_lag > 0.0 { PI / max_lag } else { f64::INFINITY };
                let parts = quad::partition(&j.support(), width, marks);
                let beta_inf = self.beta.is_infinite();
                let beta = self.beta;
                let r = quad::integrate_windows_vec(
                    |w, out: &mut [f64]| {
                        let mut jw = j.j(w);
                        if weight == Weight::Plus && !beta_inf {
                            jw *= coth(0.5 * beta * w);
                        }
                        f(w, out);
                        for o in out.iter_mut() {
                            *o *= jw;
                        }
                    },
                    dim,
                    &parts,
                    tol,
                );
                if !r.converged {
                    return Err(Error::NotConvergent(format!(
                        "frequency quadrature error {:.3e} after {} panels",
                        r.error, r.intervals
                    )));
                }
                Ok(r.value)
            }
        }
    }

    /// Correlator handle for this model.
    pub fn correlator(&self) -> Result<Correlator> {
        Correlator::new(self.clone())
    }
}

/// Time-domain correlation functions: `C⁺(u)` (real, even) and the real
/// amplitude `−iC⁻(u)` (odd).
pub trait CorrelationFunction: Sync {
    fn c_plus(&self, u: f64) -> f64;
    fn c_minus_im(&self, u: f64) -> f64;
    /// Highest angular frequency present, used to size time-domain panels.
    fn bandwidth(&self) -> f64;
}

/// Correlator backed by closures; handy for tests and synthetic kernels.
pub struct FnCorrelator<P, M> {
    pub plus: P,
    pub minus: M,
    pub bandwidth: f64,
}

impl<P, M> CorrelationFunction for FnCorrelator<P, M>
where
    P: Fn(f64) -> f64 + Sync,
    M: Fn(f64) -> f64 + Sync,
{
    fn c_plus(&self, u: f64) -> f64 {
        (self.plus)(u)
    }
    fn c_minus_im(&self, u: f64) -> f64 {
        (self.minus)(u)
    }
    fn bandwidth(&self) -> f64 {
        self.bandwidth
    }
}

const CHEB_NODES: usize = 40;
const WINDOW_SPAN: f64 = 16.0;

/// Correlator of a [`NoiseModel`]. Continuous models are evaluated through
/// lazily built Chebyshev interpolants over windows of the lag, with node
/// values from adaptive quadrature; discrete models use closed forms.
pub struct Correlator {
    model: NoiseModel,
    width: f64,
    cache: RwLock<HashMap<i64, Arc<[Cheb; 2]>>>,
}

impl std::fmt::Debug for Correlator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Correlator").field("model", &self.model).field("width", &self.width).finish()
    }
}

impl Correlator {
    pub fn new(model: NoiseModel) -> Result<Self> {
        model.check_integrable()?;
        let b = model.bandwidth().max(1e-300);
        let mut width = WINDOW_SPAN / b;
        if let Some(j) = model.density() {
            if j.delta0 > 0.0 {
                width = width.min(4.0 / j.gamma0);
            }
        }
        Ok(Correlator { model, width, cache: RwLock::new(HashMap::new()) })
    }

    pub fn model(&self) -> &NoiseModel {
        &self.model
    }

    /// Direct quadrature of `(C⁺(u), −iC⁻(u))`, bypassing the cache.
    pub fn direct(&self, u: f64) -> (f64, f64) {
        match &self.model.density {
            Density::Discrete(d) => {
                let mut p = 0.0;
                let mut m = 0.0;
                for md in &d.modes {
                    let (s, c) = (md.omega * u).sin_cos();
                    p += md.g2 * self.model.thermal(md.omega) * c;
                    m += md.g2 * s;
                }
                let k = 1.0 / (2.0 * PI * PI);
                (p * k, if self.model.classical { 0.0 } else { m * k })
            }
            Density::Continuous(j) => {
                let scale = (j.delta0 + 2.0 * j.delta1).max(1e-300);
                let tol = Tol::new(1e-16 * scale, 1e-13);
                let closed_hf = self.model.beta.is_infinite();
                let ua = u.abs();
                let lf_only = SpectralDensity { delta1: if closed_hf { 0.0 } else { j.delta1 }, ..*j };
                let plus_model = NoiseModel { density: Density::Continuous(lf_only), ..self.model.clone() };
                let mut p = if lf_only.delta0 > 0.0 || lf_only.delta1 > 0.0 {
                    plus_model
                        .integrate_positive(Weight::Plus, 1, |w, o| o[0] = (w * ua).cos(), ua, &[], tol)
                        .map(|v| v[0] / PI)
                        .unwrap_or(f64::NAN)
                } else {
                    0.0
                };
                if closed_hf && j.delta1 > 0.0 {
                    p += j.delta1 / PI * (-0.25 * j.gamma1 * j.gamma1 * u * u).exp() * (j.omega_bar1 * u).cos();
                }
                let m = self
                    .model
                    .integrate_positive(Weight::Minus, 1, |w, o| o[0] = (w * u).sin(), ua, &[], tol)
                    .map(|v| v[0] / PI)
                    .unwrap_or(f64::NAN);
                (p, m)
            }
        }
    }

    fn window(&self, idx: i64) -> Arc<[Cheb; 2]> {
        if let Some(w) = self.cache.read().unwrap().get(&idx) {
            return w.clone();
        }
        let a = idx as f64 * self.width;
        let b = a + self.width;
        let nodes = Cheb::nodes(a, b, CHEB_NODES);
        let vals: Vec<(f64, f64)> = nodes.iter().map(|&u| self.direct(u)).collect();
        let p: Vec<f64> = vals.iter().map(|v| v.0).collect();
        let m: Vec<f64> = vals.iter().map(|v| v.1).collect();
        let w = Arc::new([Cheb::from_values(a, b, &p), Cheb::from_values(a, b, &m)]);
        self.cache.write().unwrap().entry(idx).or_insert(w).clone()
    }

    fn eval(&self, u: f64) -> (f64, f64) {
        if matches!(self.model.density, Density::Discrete(_)) {
            return self.direct(u);
        }
        let ua = u.abs();
        let idx = (ua / self.width).floor() as i64;
        let w = self.window(idx);
        let p = w[0].eval(ua);
        let m = w[1].eval(ua);
        (p, if u < 0.0 { -m } else { m })
    }

    /// Number of interpolation windows built so far.
    pub fn cached_windows(&self) -> usize {
        self.cache.read().unwrap().len()
    }
}

impl CorrelationFunction for Correlator {
    fn c_plus(&self, u: f64) -> f64 {
        self.eval(u).0
    }
    fn c_minus_im(&self, u: f64) -> f64 {
        if self.model.classical {
            0.0
        } else {
            self.eval(u).1
        }
    }
    fn bandwidth(&self) -> f64 {
        self.model.bandwidth()
    }
}

/// Gauss quadrature discretisation of `J` on `[0, ω_max]`:
/// `Σ_k w_k f(Ω_k) ≈ 2π ∫₀^{ω_max} J(ω) f(ω) dω`, exact for polynomials of
/// degree `< 2 n_modes` up to the accuracy of the underlying fine rule.
pub fn discretize(j: &SpectralDensity, n_modes: usize, omega_max: f64) -> Result<DiscreteSpectrum> {
    if n_modes == 0 {
        return Err(Error::Invalid("n_modes must be ≥ 1".into()));
    }
    j.validate()?;
    // fine discretisation of the measure 2π J dω
    let windows: Vec<(f64, f64)> = j
        .support()
        .into_iter()
        .filter_map(|(a, b)| (a < omega_max).then_some((a, b.min(omega_max))))
        .collect();
    let (gx, gw) = quad::gauss_legendre(40);
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for (a, b) in windows {
        let panels = 64usize;
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            let c = a + h * (p as f64 + 0.5);
            for (x, w) in gx.iter().zip(&gw) {
                let t = c + 0.5 * h * x;
                let v = 2.0 * PI * j.j(t) * 0.5 * h * w;
                if v > 0.0 {
                    xs.push(t);
                    ws.push(v);
                }
            }
        }
    }
    if xs.len() < n_modes {
        return Err(Error::Invalid("spectral support too small for requested modes".into()));
    }
    // Stieltjes procedure on the discrete measure
    let mut alpha = Vec::with_capacity(n_modes);
    let mut beta = Vec::with_capacity(n_modes);
    let mut p_prev = vec![0.0; xs.len()];
    let mut p_cur = vec![1.0; xs.len()];
    let mut norm_prev = 1.0;
    let mu0: f64 = ws.iter().sum();
    for k in 0..n_modes {
        let norm: f64 = ws.iter().zip(&p_cur).map(|(w, p)| w * p * p).sum();
        let a: f64 = ws.iter().zip(&p_cur).zip(&xs).map(|((w, p), x)| w * x * p * p).sum::<f64>() / norm;
        let b = if k == 0 { mu0 } else { norm / norm_prev };
        alpha.push(a);
        beta.push(b);
        let next: Vec<f64> = xs
            .iter()
            .zip(p_cur.iter().zip(&p_prev))
            .map(|(x, (pc, pp))| (x - a) * pc - if k == 0 { 0.0 } else { b * pp })
            .collect();
        p_prev = std::mem::replace(&mut p_cur, next);
        norm_prev = norm;
        // rescale to avoid overflow
        let s = p_cur.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        for v in p_cur.iter_mut() {
            *v /= s;
        }
        for v in p_prev.iter_mut() {
            *v /= s;
        }
        norm_prev /= s * s;
    }
    let mut jac = nalgebra::DMatrix::<f64>::zeros(n_modes, n_modes);
    for i in 0..n_modes {
        jac[(i, i)] = alpha[i];
        if i + 1 < n_modes {
            let off = beta[i + 1].sqrt();
            jac[(i, i + 1)] = off;
            jac[(i + 1, i)] = off;
        }
    }
    let eig = jac.symmetric_eigen();
    let mut modes: Vec<Mode> = (0..n_modes)
        .map(|i| Mode { omega: eig.eigenvalues[i], g2: mu0 * eig.eigenvectors[(0, i)].powi(2) })
        .collect();
    modes.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    DiscreteSpectrum::new(modes)
}
