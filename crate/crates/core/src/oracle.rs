//! Brute-force reference: a qubit coupled to a truncated multimode bosonic
//! bath, evolved exactly in the lab frame with instantaneous π pulses and
//! perfect resets.
//!
//! The joint density operator is kept as an ensemble `ρ = Σ_j |v_j⟩⟨v_j|`
//! of unnormalised joint vectors. Unitaries and pulses act on each vector,
//! and a reset replaces `(a, b)` blocks by `(a, a)/√2` and `(b, b)/√2`, so
//! memory grows with the number of resets rather than with the square of
//! the Hilbert dimension.

use crate::error::{Error, Result};
use crate::noise::{DiscreteSpectrum, Mode};
use crate::pulse::Protocol;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;

/// Default cap on the joint Hilbert-space dimension.
pub const DIM_CAP: usize = 20_000;

type C = Complex64;

/// Bath of independent truncated oscillators.
#[derive(Debug, Clone, PartialEq)]
pub struct FockBath {
    pub modes: DiscreteSpectrum,
    pub n_max: usize,
    pub beta: f64,
    dims: Vec<usize>,
}

impl FockBath {
    pub fn new(modes: DiscreteSpectrum, n_max: usize, beta: f64) -> Result<Self> {
        Self::with_cap(modes, n_max, beta, DIM_CAP)
    }

    pub fn with_cap(modes: DiscreteSpectrum, n_max: usize, beta: f64, cap: usize) -> Result<Self> {
        let dims = vec![n_max + 1; modes.modes.len()];
        let mut dim: usize = 2;
        for d in &dims {
            dim = dim.saturating_mul(*d);
            if dim > cap {
                return Err(Error::DimensionCap { dim, cap });
            }
        }
        if !(beta > 0.0) {
            return Err(Error::Invalid("beta must be positive".into()));
        }
        if beta.is_finite() {
            for m in &modes.modes {
                let q = (-beta * m.omega).exp();
                let top = (1.0 - q) * q.powi(n_max as i32);
                if top >= 1e-8 {
                    return Err(Error::Invalid(format!(
                        "thermal occupancy {top:e} of Fock level {n_max} for mode at {} too large",
                        m.omega
                    )));
                }
            }
        }
        Ok(FockBath { modes, n_max, beta, dims })
    }

    /// Bath Hilbert-space dimension.
    pub fn bath_dim(&self) -> usize {
        self.dims.iter().product()
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.dims[k + 1];
        }
        s
    }

    fn coupling(m: &Mode) -> f64 {
        m.coupling_sq().sqrt()
    }

    /// Fock occupation numbers of basis index `i`.
    fn occupations(&self, i: usize) -> Vec<usize> {
        let st = self.strides();
        st.iter().zip(&self.dims).map(|(s, d)| (i / s) % d).collect()
    }

    /// `H_B` eigenvalue of basis index `i`.
    fn energy(&self, i: usize) -> f64 {
        self.occupations(i).iter().zip(&self.modes.modes).map(|(n, m)| *n as f64 * m.omega).sum()
    }

    /// Applies a single-mode operator to a bath vector.
    fn apply_mode(&self, v: &[C], k: usize, op: &DMatrix<C>) -> Vec<C> {
        let st = self.strides()[k];
        let d = self.dims[k];
        let mut out = vec![C::new(0.0, 0.0); v.len()];
        let block = st * d;
        let mut tmp = vec![C::new(0.0, 0.0); d];
        for base in (0..v.len()).step_by(block) {
            for inner in 0..st {
                for (n, t) in tmp.iter_mut().enumerate() {
                    *t = v[base + inner + n * st];
                }
                for r in 0..d {
                    let mut acc = C::new(0.0, 0.0);
                    for (c, t) in tmp.iter().enumerate() {
                        acc += op[(r, c)] * t;
                    }
                    out[base + inner + r * st] = acc;
                }
            }
        }
        out
    }

    /// `B v` with `B = Σ_k g_k (b_k + b_k†)`.
    pub fn apply_b(&self, v: &[C]) -> Vec<C> {
        let mut out = vec![C::new(0.0, 0.0); v.len()];
        for (k, m) in self.modes.modes.iter().enumerate() {
            let x = position(self.dims[k]) * C::new(Self::coupling(m), 0.0);
            let w = self.apply_mode(v, k, &x);
            for (o, wi) in out.iter_mut().zip(w) {
                *o += wi;
            }
        }
        out
    }

    /// `e^{∓iH_B t} v` (sign −1 gives the Schrödinger propagator).
    pub fn free(&self, v: &[C], t: f64, sign: f64) -> Vec<C> {
        v.iter().enumerate().map(|(i, x)| x * C::from_polar(1.0, sign * self.energy(i) * t)).collect()
    }

    /// Heisenberg-picture `B(t) v = e^{iH_B t} B e^{−iH_B t} v`.
    pub fn b_at(&self, v: &[C], t: f64) -> Vec<C> {
        self.free(&self.apply_b(&self.free(v, t, -1.0)), t, 1.0)
    }

    /// Initial bath ensemble: vacuum, or the truncated thermal mixture.
    fn initial_bath(&self) -> Vec<Vec<C>> {
        let d = self.bath_dim();
        if self.beta.is_infinite() {
            let mut v = vec![C::new(0.0, 0.0); d];
            v[0] = C::new(1.0, 0.0);
            return vec![v];
        }
        let mut out = Vec::new();
        let mut z = 0.0;
        let weights: Vec<f64> = (0..d).map(|i| (-self.beta * self.energy(i)).exp()).collect();
        for w in &weights {
            z += w;
        }
        for (i, w) in weights.iter().enumerate() {
            let p = w / z;
            if p > 1e-16 {
                let mut v = vec![C::new(0.0, 0.0); d];
                v[i] = C::new(p.sqrt(), 0.0);
                out.push(v);
            }
        }
        out
    }
}

/// `b + b†` truncated to dimension `d`.
fn position(d: usize) -> DMatrix<C> {
    let mut x = DMatrix::zeros(d, d);
    for n in 1..d {
        let s = (n as f64).sqrt();
        x[(n - 1, n)] = C::new(s, 0.0);
        x[(n, n - 1)] = C::new(s, 0.0);
    }
    x
}

/// Matrix exponential by scaling and squaring with a [13/13] Padé approximant.
pub fn expm(a: &DMatrix<C>) -> DMatrix<C> {
    const B: [f64; 14] = [
        64_764_752_532_480_000.0,
        32_382_376_266_240_000.0,
        7_771_770_303_897_600.0,
        1_187_353_796_428_800.0,
        129_060_195_264_000.0,
        10_559_470_521_600.0,
        670_442_572_800.0,
        33_522_128_640.0,
        1_323_241_920.0,
        40_840_800.0,
        960_960.0,
        16_380.0,
        182.0,
        1.0,
    ];
    const THETA13: f64 = 5.371_920_351_148_152;
    let n = a.nrows();
    let norm1 = (0..n).map(|c| (0..n).map(|r| a[(r, c)].norm()).sum::<f64>()).fold(0.0, f64::max);
    let s = if norm1 > THETA13 { (norm1 / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a * C::new(2f64.powi(-s), 0.0);
    let id = DMatrix::<C>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let c = |x: f64| C::new(x, 0.0);
    let u_in = &a6 * (&a6 * c(B[13]) + &a4 * c(B[11]) + &a2 * c(B[9])) + &a6 * c(B[7]) + &a4 * c(B[5]) + &a2 * c(B[3]) + &id * c(B[1]);
    let u = &a * u_in;
    let v = &a6 * (&a6 * c(B[12]) + &a4 * c(B[10]) + &a2 * c(B[8])) + &a6 * c(B[6]) + &a4 * c(B[4]) + &a2 * c(B[2]) + &id * c(B[0]);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator is nonsingular");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Joint qubit–bath state as an ensemble of unnormalised vectors. Each
/// vector holds the `z = +1` block followed by the `z = −1` block.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub components: Vec<Vec<C>>,
    /// Toggling-frame `z` values recorded at each reset, per component.
    pub labels: Vec<Vec<i8>>,
    pub time: f64,
    bath_dim: usize,
}

impl JointState {
    /// `|+⟩ ⊗ ρ_B` with the bath's initial ensemble.
    pub fn initial(bath: &FockBath) -> Self {
        let d = bath.bath_dim();
        let components: Vec<Vec<C>> = bath
            .initial_bath()
            .into_iter()
            .map(|b| b.iter().chain(b.iter()).map(|x| x * FRAC_1_SQRT_2).collect())
            .collect();
        let labels = vec![vec![]; components.len()];
        JointState { components, labels, time: 0.0, bath_dim: d }
    }

    /// From explicit joint vectors (for tests).
    pub fn from_vectors(components: Vec<Vec<C>>, bath_dim: usize) -> Self {
        let labels = vec![vec![]; components.len()];
        JointState { components, labels, time: 0.0, bath_dim }
    }

    pub fn bath_dim(&self) -> usize {
        self.bath_dim
    }

    fn blocks(v: &[C]) -> (&[C], &[C]) {
        v.split_at(v.len() / 2)
    }

    /// `Tr ρ`.
    pub fn trace(&self) -> f64 {
        self.components.iter().map(|v| v.iter().map(|x| x.norm_sqr()).sum::<f64>()).sum()
    }

    /// Qubit populations `(⟨0|ρ_S|0⟩, ⟨1|ρ_S|1⟩)`.
    pub fn populations(&self) -> (f64, f64) {
        let mut p = (0.0, 0.0);
        for v in &self.components {
            let (a, b) = Self::blocks(v);
            p.0 += a.iter().map(|x| x.norm_sqr()).sum::<f64>();
            p.1 += b.iter().map(|x| x.norm_sqr()).sum::<f64>();
        }
        p
    }

    /// Reduced qubit density matrix.
    pub fn qubit(&self) -> [[C; 2]; 2] {
        let (p0, p1) = self.populations();
        let mut c01 = C::new(0.0, 0.0);
        for v in &self.components {
            let (a, b) = Self::blocks(v);
            for (x, y) in a.iter().zip(b) {
                c01 += x * y.conj();
            }
        }
        [[C::new(p0, 0.0), c01], [c01.conj(), C::new(p1, 0.0)]]
    }

    /// `⟨+|ρ_S|+⟩`.
    pub fn plus_fidelity(&self) -> f64 {
        let q = self.qubit();
        0.5 * (q[0][0].re + q[1][1].re) + q[0][1].re
    }

    /// Dense density matrix (small dimensions only).
    pub fn to_dense(&self) -> DMatrix<C> {
        let n = 2 * self.bath_dim;
        let mut m = DMatrix::zeros(n, n);
        for v in &self.components {
            for r in 0..n {
                for c in 0..n {
                    m[(r, c)] += v[r] * v[c].conj();
                }
            }
        }
        m
    }
}

/// Lab-frame evolution for `duration` under `y σ_z ⊗ B + H_B` with `y = sign`.
pub struct Evolver<'a> {
    bath: &'a FockBath,
    cache: HashMap<(usize, i8, u64), DMatrix<C>>,
}

impl<'a> Evolver<'a> {
    pub fn new(bath: &'a FockBath) -> Self {
        Evolver { bath, cache: HashMap::new() }
    }

    fn propagator(&mut self, k: usize, sigma: i8, t: f64) -> &DMatrix<C> {
        let bath = self.bath;
        self.cache.entry((k, sigma, t.to_bits())).or_insert_with(|| {
            let m = &bath.modes.modes[k];
            let d = bath.dims[k];
            let mut h = position(d) * C::new(sigma as f64 * FockBath::coupling(m), 0.0);
            for n in 0..d {
                h[(n, n)] += C::new(n as f64 * m.omega, 0.0);
            }
            expm(&(h * C::new(0.0, -t)))
        })
    }

    /// Applies `e^{−i(sign·z·B + H_B) t}` on each qubit-`z` block.
    pub fn evolve_segment(&mut self, state: &mut JointState, sign: i8, duration: f64) -> Result<()> {
        if duration < 0.0 {
            return Err(Error::Invalid("negative duration".into()));
        }
        if duration == 0.0 {
            return Ok(());
        }
        let d = self.bath.bath_dim();
        for v in state.components.iter_mut() {
            for (zi, z) in [1i8, -1].iter().enumerate() {
                let mut blk = v[zi * d..(zi + 1) * d].to_vec();
                for k in 0..self.bath.modes.modes.len() {
                    let u = self.propagator(k, sign * z, duration).clone();
                    blk = self.bath.apply_mode(&blk, k, &u);
                }
                v[zi * d..(zi + 1) * d].copy_from_slice(&blk);
            }
        }
        state.time += duration;
        Ok(())
    }
}

/// Conjugation by `σ_x ⊗ 1`.
pub fn apply_pi_pulse(state: &mut JointState) {
    let d = state.bath_dim;
    for v in state.components.iter_mut() {
        let (a, b) = v.split_at_mut(d);
        a.swap_with_slice(b);
    }
}

/// `ρ → |+⟩⟨+| ⊗ Tr_S ρ`. `z_frame` maps the lab `z` of each branch to the
/// recorded label (toggling-frame sign just before the reset).
pub fn apply_reset(state: &mut JointState, z_frame: i8) {
    let d = state.bath_dim;
    let mut comps = Vec::with_capacity(2 * state.components.len());
    let mut labels = Vec::with_capacity(2 * state.components.len());
    for (v, lab) in state.components.iter().zip(&state.labels) {
        for (zi, z) in [1i8, -1].iter().enumerate() {
            let blk = &v[zi * d..(zi + 1) * d];
            if blk.iter().all(|x| x.norm_sqr() == 0.0) {
                continue;
            }
            comps.push(blk.iter().chain(blk.iter()).map(|x| x * FRAC_1_SQRT_2).collect());
            let mut l = lab.clone();
            l.push(z * z_frame);
            labels.push(l);
        }
    }
    state.components = comps;
    state.labels = labels;
}

/// Reset applied to a dense joint density matrix by partial trace.
pub fn reset_dense_partial_trace(rho: &DMatrix<C>) -> DMatrix<C> {
    let d = rho.nrows() / 2;
    let tr = rho.view((0, 0), (d, d)) + rho.view((d, d), (d, d));
    let mut out = DMatrix::zeros(2 * d, 2 * d);
    for (bi, bj) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        out.view_mut((bi * d, bj * d), (d, d)).copy_from(&(&tr * C::new(0.5, 0.0)));
    }
    out
}

/// Reset applied through the two Kraus operators `|+⟩⟨z| ⊗ 1`.
pub fn reset_dense_kraus(rho: &DMatrix<C>) -> DMatrix<C> {
    let d = rho.nrows() / 2;
    let mut out = DMatrix::zeros(2 * d, 2 * d);
    for z in 0..2 {
        let mut k = DMatrix::<C>::zeros(2 * d, 2 * d);
        for i in 0..d {
            k[(i, z * d + i)] = C::new(FRAC_1_SQRT_2, 0.0);
            k[(d + i, z * d + i)] = C::new(FRAC_1_SQRT_2, 0.0);
        }
        out += &k * rho * k.adjoint();
    }
    out
}

/// Result of an oracle run, with the post-reset bath ensemble retained for
/// moment queries.
#[derive(Debug, Clone)]
pub struct OracleRun {
    pub fidelity: f64,
    /// Largest deviation of the trace from 1 over the run.
    pub trace_error: f64,
    /// Largest deviation of either qubit population from 1/2 over the run.
    pub population_error: f64,
    /// Bath vectors `a_j` of the post-reset state `|+⟩⟨+| ⊗ Σ_j |a_j⟩⟨a_j|`.
    pub bath_components: Vec<Vec<C>>,
    /// Toggling-frame `z_1..z_K` label of each bath component.
    pub labels: Vec<Vec<i8>>,
    bath: FockBath,
}

impl OracleRun {
    fn weight(v: &[C]) -> f64 {
        v.iter().map(|x| x.norm_sqr()).sum()
    }

    fn mean_of(&self, v: &[C], tau: f64) -> f64 {
        let bv = self.bath.b_at(v, tau);
        v.iter().zip(&bv).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// `⟨B(t_K + τ)⟩` of the full post-reset bath state.
    pub fn mean_total(&self, tau: f64) -> f64 {
        self.bath_components.iter().map(|v| self.mean_of(v, tau)).sum()
    }

    /// Mean of the bath block conditioned on the last reset's toggling `z_K`.
    pub fn conditional_mean(&self, z_k: i8, tau: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (v, l) in self.bath_components.iter().zip(&self.labels) {
            if l.last() == Some(&z_k) {
                num += self.mean_of(v, tau);
                den += Self::weight(v);
            }
        }
        num / den
    }

    /// Per-interval means `m_k(τ) = Σ_j z_{j,k} w_j ⟨B(τ)⟩_j / Σ_j w_j` extracted
    /// from the labelled components.
    pub fn interval_means(&self, tau: f64) -> Vec<f64> {
        let k = self.labels.first().map_or(0, |l| l.len());
        let total: f64 = self.bath_components.iter().map(|v| Self::weight(v)).sum();
        (0..k)
            .map(|i| {
                self.bath_components
                    .iter()
                    .zip(&self.labels)
                    .map(|(v, l)| l[i] as f64 * self.mean_of(v, tau))
                    .sum::<f64>()
                    / total
            })
            .collect()
    }

    /// `⟨{B(t_K+τ₂), B(t_K+τ₁)}⟩` of the post-reset bath state.
    pub fn c_plus_updated(&self, tau2: f64, tau1: f64) -> f64 {
        self.bath_components
            .iter()
            .map(|v| {
                let b2 = self.bath.b_at(v, tau2);
                let b1 = self.bath.b_at(v, tau1);
                2.0 * b2.iter().zip(&b1).map(|(x, y)| (x.conj() * y).re).sum::<f64>()
            })
            .sum()
    }
}

/// Runs a protocol: history pieces with π pulses at sign changes, resets,
/// then the gate; returns `⟨+|ρ_S|+⟩` at the end.
pub fn run_protocol(protocol: &Protocol, bath: &FockBath) -> Result<OracleRun> {
    let mut state = JointState::initial(bath);
    let mut ev = Evolver::new(bath);
    let mut trace_error: f64 = 0.0;
    let mut population_error: f64 = 0.0;
    let mut track = |s: &JointState| {
        trace_error = trace_error.max((s.trace() - 1.0).abs());
        let (p0, p1) = s.populations();
        population_error = population_error.max((p0 - 0.5).abs()).max((p1 - 0.5).abs());
    };
    let mut post_reset: Option<(Vec<Vec<C>>, Vec<Vec<i8>>)> = None;
    for k in 1..=protocol.k() {
        let pieces = protocol.interval_pieces(k);
        // the state |+⟩⊗ρ_B is σx-invariant, so the frame aligns with the first piece
        let mut frame = pieces.first().map_or(1.0, |p| p.sign);
        for p in &pieces {
            if p.sign != frame {
                apply_pi_pulse(&mut state);
                frame = p.sign;
            }
            ev.evolve_segment(&mut state, 1, p.b - p.a)?;
            track(&state);
        }
        // lab z of a block equals toggling z times the current frame sign
        apply_reset(&mut state, frame as i8);
        track(&state);
        if k == protocol.k() {
            let d = bath.bath_dim();
            post_reset = Some((
                state.components.iter().map(|v| v[..d].iter().map(|x| x * std::f64::consts::SQRT_2).collect()).collect(),
                state.labels.clone(),
            ));
        }
    }
    let gate = protocol.gate().pieces();
    let mut frame = gate.first().map_or(1.0, |p| p.sign);
    for p in &gate {
        if p.sign != frame {
            apply_pi_pulse(&mut state);
            frame = p.sign;
        }
        ev.evolve_segment(&mut state, 1, p.b - p.a)?;
        track(&state);
    }
    let (bath_components, labels) = post_reset.unwrap_or_default();
    Ok(OracleRun {
        fidelity: state.plus_fidelity(),
        trace_error,
        population_error,
        bath_components,
        labels,
        bath: bath.clone(),
    })
}

/// Outcome of a cutoff-doubling study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffStudy {
    pub fidelity: f64,
    pub n_max: usize,
    /// `|F(n_max) − F(previous cutoff)|`.
    pub delta: f64,
    pub converged: bool,
}

/// Increases the cutoff (`n → 2n + 1`) until the fidelity changes by less than `tol`.
pub fn converge_cutoff(protocol: &Protocol, modes: &DiscreteSpectrum, beta: f64, n_start: usize, tol: f64) -> Result<CutoffStudy> {
    let mut n = n_start.max(1);
    let mut prev = run_protocol(protocol, &FockBath::new(modes.clone(), n, beta)?)?.fidelity;
    loop {
        let next_n = 2 * n + 1;
        let bath = match FockBath::new(modes.clone(), next_n, beta) {
            Ok(b) => b,
            Err(Error::DimensionCap { .. }) => {
                // cap reached: try the largest admissible cutoff
                let per = ((DIM_CAP / 2) as f64).powf(1.0 / modes.modes.len().max(1) as f64).floor() as usize;
                let cand = per.saturating_sub(1);
                if cand <= n {
                    return Ok(CutoffStudy { fidelity: prev, n_max: n, delta: f64::NAN, converged: false });
                }
                FockBath::new(modes.clone(), cand, beta)?
            }
            Err(e) => return Err(e),
        };
        let f = run_protocol(protocol, &bath)?.fidelity;
        let delta = (f - prev).abs();
        if delta < tol {
            return Ok(CutoffStudy { fidelity: f, n_max: bath.n_max, delta, converged: true });
        }
        if bath.n_max != next_n {
            return Ok(CutoffStudy { fidelity: f, n_max: bath.n_max, delta, converged: false });
        }
        prev = f;
        n = next_n;
    }
}
