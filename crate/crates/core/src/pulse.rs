//! Switching functions, DD sequences, protocols with resets, filter functions
//! and filtering orders.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Relative slack used when comparing times against the minimum switching time.
const TIME_SLACK: f64 = 1e-12;

/// Below this value of `|ω·duration|` the filter function is evaluated from
/// time moments instead of exponentials. The exponential form cancels to
/// relative accuracy `ε/(ωT)^α`, which is poor for high filtering orders
/// well above `ωT ~ 10⁻⁴`.
pub const TAYLOR_THRESHOLD: f64 = 8.0;

/// Series terms kept beyond the moment cap; `4^k/k!` is negligible by then.
const TAYLOR_EXTRA: usize = 40;

/// Default cap on the moment order probed by [`filtering_order`].
pub const MOMENT_CAP: usize = 16;

/// Integer tick representation of a digital switching function.
#[derive(Debug, Clone, PartialEq)]
pub struct Ticks {
    pub unit: f64,
    pub start: i64,
    pub end: i64,
    pub flips: Vec<i64>,
}

/// A constant piece `[a, b)` of a switching function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub a: f64,
    pub b: f64,
    pub sign: f64,
}

/// Piecewise ±1 control record `y(t)` on `[start, end)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingFunction {
    start: f64,
    end: f64,
    flips: Vec<f64>,
    initial_sign: i8,
    min_switch: Option<f64>,
    ticks: Option<Ticks>,
}

impl SwitchingFunction {
    /// Analog switching function; flips must be strictly increasing and inside `(start, end)`.
    pub fn new(start: f64, end: f64, flips: Vec<f64>, initial_sign: i8) -> Result<Self> {
        if !(end >= start) || !start.is_finite() || !end.is_finite() {
            return Err(Error::Invalid(format!("bad interval [{start}, {end})")));
        }
        if initial_sign != 1 && initial_sign != -1 {
            return Err(Error::Invalid("initial sign must be ±1".into()));
        }
        let mut prev = start;
        for &f in &flips {
            if !(f > prev) || !(f < end) {
                return Err(Error::Invalid(format!("flip time {f} out of order or range")));
            }
            prev = f;
        }
        Ok(SwitchingFunction { start, end, flips, initial_sign, min_switch: None, ticks: None })
    }

    /// Digital switching function; all times are integer multiples of `unit`.
    pub fn digital(unit: f64, start: i64, end: i64, flips: Vec<i64>, initial_sign: i8) -> Result<Self> {
        if unit <= 0.0 {
            return Err(Error::Invalid("tick unit must be positive".into()));
        }
        let times = flips.iter().map(|&n| n as f64 * unit).collect();
        let mut s = Self::new(start as f64 * unit, end as f64 * unit, times, initial_sign)?;
        s.ticks = Some(Ticks { unit, start, end, flips });
        Ok(s)
    }

    /// Empty record located at `t`.
    pub fn empty(t: f64) -> Self {
        SwitchingFunction { start: t, end: t, flips: vec![], initial_sign: 1, min_switch: None, ticks: None }
    }

    /// Attaches and checks a minimum switching time constraint.
    pub fn with_min_switch(mut self, tau0: f64) -> Result<Self> {
        self.min_switch = Some(tau0);
        self.check_gaps(tau0)?;
        Ok(self)
    }

    fn check_gaps(&self, tau0: f64) -> Result<()> {
        if self.duration() == 0.0 {
            return Ok(());
        }
        let mut prev = self.start;
        for &t in self.flips.iter().chain(std::iter::once(&self.end)) {
            if t - prev < tau0 * (1.0 - TIME_SLACK) {
                return Err(Error::ConstraintViolation(format!(
                    "gap {} between {} and {} is shorter than tau_0 = {}",
                    t - prev,
                    prev,
                    t,
                    tau0
                )));
            }
            prev = t;
        }
        Ok(())
    }

    pub fn start(&self) -> f64 {
        self.start
    }
    pub fn end(&self) -> f64 {
        self.end
    }
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
    pub fn flips(&self) -> &[f64] {
        &self.flips
    }
    pub fn initial_sign(&self) -> i8 {
        self.initial_sign
    }
    pub fn min_switch(&self) -> Option<f64> {
        self.min_switch
    }
    pub fn ticks(&self) -> Option<&Ticks> {
        self.ticks.as_ref()
    }
    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// Sign on the last piece.
    pub fn final_sign(&self) -> i8 {
        if self.flips.len() % 2 == 0 {
            self.initial_sign
        } else {
            -self.initial_sign
        }
    }

    /// Number of π pulses needed to realise the record as an identity
    /// operation, counting a terminal pulse when the final sign is −1.
    pub fn pulse_count(&self) -> usize {
        let base = self.flips.len() + usize::from(self.initial_sign < 0);
        base + usize::from(self.final_sign() < 0)
    }

    /// Value of `y(t)`; zero outside `[start, end)`.
    pub fn value(&self, t: f64) -> f64 {
        if t < self.start || t >= self.end {
            return 0.0;
        }
        let n = self.flips.partition_point(|&f| f <= t);
        let s = if n % 2 == 0 { self.initial_sign } else { -self.initial_sign };
        s as f64
    }

    /// Constant pieces in time order.
    pub fn pieces(&self) -> Vec<Piece> {
        if self.is_empty() {
            return vec![];
        }
        let mut out = Vec::with_capacity(self.flips.len() + 1);
        let mut a = self.start;
        let mut sign = self.initial_sign as f64;
        for &f in &self.flips {
            out.push(Piece { a, b: f, sign });
            a = f;
            sign = -sign;
        }
        out.push(Piece { a, b: self.end, sign });
        out
    }

    /// Pieces clipped to `[lo, hi)`.
    pub fn pieces_in(&self, lo: f64, hi: f64) -> Vec<Piece> {
        self.pieces()
            .into_iter()
            .filter_map(|p| {
                let a = p.a.max(lo);
                let b = p.b.min(hi);
                (b > a).then_some(Piece { a, b, sign: p.sign })
            })
            .collect()
    }

    /// Sign-reversed copy.
    pub fn negated(&self) -> Self {
        let mut s = self.clone();
        s.initial_sign = -s.initial_sign;
        s
    }

    /// Concatenates `next` after `self`, inserting a flip at the junction
    /// when the signs differ.
    pub fn concat(&self, next: &SwitchingFunction) -> Result<Self> {
        if self.is_empty() {
            return Ok(next.shifted_to(self.start));
        }
        if next.is_empty() {
            return Ok(self.clone());
        }
        let offset = self.end - next.start;
        let mut flips = self.flips.clone();
        if self.final_sign() != next.initial_sign {
            flips.push(self.end);
        }
        flips.extend(next.flips.iter().map(|f| f + offset));
        let mut out = SwitchingFunction::new(self.start, next.end + offset, flips, self.initial_sign)?;
        if let (Some(a), Some(b)) = (&self.ticks, &next.ticks) {
            if a.unit == b.unit {
                let off = a.end - b.start;
                let mut tf = a.flips.clone();
                if self.final_sign() != next.initial_sign {
                    tf.push(a.end);
                }
                tf.extend(b.flips.iter().map(|f| f + off));
                out = SwitchingFunction::digital(a.unit, a.start, b.end + off, tf, self.initial_sign)?;
            }
        }
        out.min_switch = match (self.min_switch, next.min_switch) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        if let Some(t0) = out.min_switch {
            out.check_gaps(t0)?;
        }
        Ok(out)
    }

    /// Copy translated so that it starts at `t`.
    pub fn shifted_to(&self, t: f64) -> Self {
        let off = t - self.start;
        let mut s = self.clone();
        s.start = t;
        s.end = self.end + off;
        s.flips = self.flips.iter().map(|f| f + off).collect();
        if let Some(tk) = &self.ticks {
            let q = t / tk.unit;
            if q.fract() == 0.0 {
                let d = q as i64 - tk.start;
                let flips: Vec<i64> = tk.flips.iter().map(|f| f + d).collect();
                s.start = (tk.start + d) as f64 * tk.unit;
                s.end = (tk.end + d) as f64 * tk.unit;
                s.flips = flips.iter().map(|&n| n as f64 * tk.unit).collect();
                s.ticks = Some(Ticks { unit: tk.unit, start: tk.start + d, end: tk.end + d, flips });
            } else {
                s.ticks = None;
            }
        }
        s
    }

    /// Time moments `m_k = ∫ y(t) (t − start)^k dt` for `k = 0..=kmax`.
    pub fn moments(&self, kmax: usize) -> Vec<f64> {
        let mut m = vec![0.0; kmax + 1];
        for p in self.pieces() {
            let u0 = p.a - self.start;
            let u1 = p.b - self.start;
            let mut q0 = u0;
            let mut q1 = u1;
            for (k, mk) in m.iter_mut().enumerate() {
                *mk += p.sign * (q1 - q0) / (k as f64 + 1.0);
                q0 *= u0;
                q1 *= u1;
            }
        }
        m
    }

    /// Filter function `F(ω) = ∫ y(s) e^{iωs} ds` over absolute time.
    pub fn filter_function(&self, w: f64) -> Complex64 {
        filter_function(&self.pieces(), w)
    }
}

/// Filter function of an arbitrary list of pieces (absolute times).
pub fn filter_function(pieces: &[Piece], w: f64) -> Complex64 {
    if pieces.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    let t0 = pieces[0].a;
    let dur = pieces[pieces.len() - 1].b - t0;
    if (w * dur).abs() < TAYLOR_THRESHOLD {
        return taylor_ff(pieces, t0, dur, w);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for p in pieces {
        let h = 0.5 * (p.b - p.a);
        let c = 0.5 * (p.a + p.b);
        let amp = 2.0 * h * crate::special::sinc(w * h) * p.sign;
        acc += Complex64::from_polar(amp, w * c);
    }
    acc
}

/// Normalised moments `∫ y u^k du` with `u = (t − tc)/h`, together with a
/// bound on their rounding error. Differences `u1^{k+1} − u0^{k+1}` are
/// formed as `(u1 − u0) Σ_j u1^j u0^{k−j}` so that each piece contributes
/// with relative accuracy.
fn centred_moments(pieces: &[Piece], tc: f64, h: f64, kmax: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = vec![0.0; kmax + 1];
    let mut err = vec![0.0; kmax + 1];
    for p in pieces {
        let (u0, u1) = ((p.a - tc) / h, (p.b - tc) / h);
        let du = (p.b - p.a) / h;
        let (mut s, mut sa) = (1.0, 1.0);
        let (mut p0, mut p0a) = (1.0, 1.0);
        for k in 0..=kmax {
            if k > 0 {
                p0 *= u0;
                p0a *= u0.abs();
                s = u1 * s + p0;
                sa = u1.abs() * sa + p0a;
            }
            let kk = k as f64 + 1.0;
            m[k] += p.sign * du * s / kk;
            err[k] += du * sa / kk;
        }
    }
    for e in err.iter_mut() {
        *e *= 64.0 * f64::EPSILON;
    }
    (m, err)
}

fn taylor_ff(pieces: &[Piece], t0: f64, dur: f64, w: f64) -> Complex64 {
    let h = 0.5 * dur;
    let tc = t0 + h;
    let (m, err) = centred_moments(pieces, tc, h, MOMENT_CAP + TAYLOR_EXTRA);
    let lead = (0..=MOMENT_CAP).find(|&k| m[k].abs() > err[k]).unwrap_or(MOMENT_CAP);
    let x = w * h;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0); // (ix)^k / k!
    for (k, mk) in m.iter().enumerate() {
        if k > 0 {
            term *= Complex64::new(0.0, x) / k as f64;
        }
        if k >= lead {
            acc += term * mk;
            if k > lead + 4 && term.norm() < 1e-18 {
                break;
            }
        }
    }
    acc * h * Complex64::from_polar(1.0, w * tc)
}

fn moment_vanishes(mk: f64, k: usize, dur: f64) -> bool {
    mk.abs() <= 1e-10 * dur.powi(k as i32 + 1) / (k as f64 + 1.0)
}

/// DD sequence families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DDKind {
    Free,
    Hahn,
    Cpmg,
    Cdd(u32),
}

impl DDKind {
    /// Number of equal elementary intervals the cycle is divided into.
    pub fn pieces(self) -> u64 {
        match self {
            DDKind::Free => 1,
            DDKind::Hahn => 2,
            DDKind::Cpmg => 4,
            DDKind::Cdd(n) => 1u64 << n,
        }
    }
}

/// DD sequence specification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DDSequence {
    pub kind: DDKind,
    pub cycle_time: f64,
    pub min_switch_time: f64,
}

impl DDSequence {
    pub fn build(&self) -> Result<SwitchingFunction> {
        make_sequence(self.kind, self.cycle_time, self.min_switch_time)
    }
}

/// Thue–Morse sign of elementary interval `j`: `(−1)^{popcount j}`.
fn thue_morse(j: u64) -> i8 {
    if j.count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Canonical switching function of a DD sequence on `[0, τG)`.
///
/// CDD(n) follows `C_n = C_{n−1} X C_{n−1} X` with adjacent pulses collapsed,
/// giving a Thue–Morse sign pattern over `2^n` intervals of `τG/2^n`. A
/// terminal pulse at `τG` is implied whenever the final sign is −1.
pub fn make_sequence(kind: DDKind, tau_g: f64, tau0: f64) -> Result<SwitchingFunction> {
    if !(tau_g > 0.0) || !(tau0 >= 0.0) {
        return Err(Error::Invalid("cycle time must be positive".into()));
    }
    if let DDKind::Cdd(n) = kind {
        if n == 0 || n > 20 {
            return Err(Error::Invalid(format!("unsupported CDD order {n}")));
        }
    }
    let np = kind.pieces();
    let unit = tau_g / np as f64;
    let flips: Vec<i64> = match kind {
        DDKind::Free => vec![],
        DDKind::Hahn => vec![1],
        DDKind::Cpmg => vec![1, 3],
        DDKind::Cdd(_) => (1..np).filter(|&j| thue_morse(j) != thue_morse(j - 1)).map(|j| j as i64).collect(),
    };
    let s = SwitchingFunction::digital(unit, 0, np as i64, flips, 1)?;
    s.with_min_switch(tau0)
}

/// `M` back-to-back copies of `seq`; the result has duration `M·τG`.
pub fn repeat_periodic(seq: &SwitchingFunction, m: usize) -> Result<SwitchingFunction> {
    if m == 0 {
        let mut e = SwitchingFunction::empty(seq.start);
        e.min_switch = seq.min_switch;
        return Ok(e);
    }
    let boundary_flip = seq.final_sign() != seq.initial_sign;
    let mut out = if let Some(tk) = &seq.ticks {
        let len = tk.end - tk.start;
        let mut flips = Vec::with_capacity(m * (tk.flips.len() + 1));
        for c in 0..m as i64 {
            if c > 0 && boundary_flip {
                flips.push(tk.start + c * len);
            }
            flips.extend(tk.flips.iter().map(|f| f + c * len));
        }
        SwitchingFunction::digital(tk.unit, tk.start, tk.start + m as i64 * len, flips, seq.initial_sign)?
    } else {
        let len = seq.duration();
        let mut flips = Vec::new();
        for c in 0..m {
            let off = c as f64 * len;
            if c > 0 && boundary_flip {
                flips.push(seq.start + off);
            }
            flips.extend(seq.flips.iter().map(|f| f + off));
        }
        SwitchingFunction::new(seq.start, seq.start + m as f64 * len, flips, seq.initial_sign)?
    };
    out.min_switch = seq.min_switch;
    if let Some(t0) = out.min_switch {
        out.check_gaps(t0)?;
    }
    Ok(out)
}

/// Filtering-order data of a switching function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FilterOrder {
    /// Fundamental filtering order.
    pub alpha_p: usize,
    /// Dimensionless leading coefficient of `|F(ω)|² ≈ F̃₀² (ωτ)^{2α} τ²`.
    pub coeff_sq: f64,
    /// Leading even order of the local filter function (real part).
    pub alpha_re: Option<usize>,
    /// Signed dimensionless coefficient of the real leading term.
    pub f_re: f64,
    /// Leading odd order of the local filter function (imaginary part).
    pub alpha_im: Option<usize>,
    /// Signed dimensionless coefficient of the imaginary leading term.
    pub f_im: f64,
}

/// Filtering order with the default moment cap.
pub fn filtering_order(y: &SwitchingFunction) -> Result<FilterOrder> {
    filtering_order_capped(y, MOMENT_CAP)
}

/// Filtering order: smallest `k` with a nonzero moment `∫ y t^k dt`.
pub fn filtering_order_capped(y: &SwitchingFunction, cap: usize) -> Result<FilterOrder> {
    let dur = y.duration();
    if dur <= 0.0 {
        return Err(Error::DegenerateSequence(cap));
    }
    let m = y.moments(cap);
    let nz = |k: usize| !moment_vanishes(m[k], k, dur);
    let alpha = (0..=cap).find(|&k| nz(k)).ok_or(Error::DegenerateSequence(cap))?;
    let fact = |k: usize| (1..=k).fold(1.0, |a, b| a * b as f64);
    // local F(ω) = Σ (iω)^k m_k / k!, dimensionless coefficient m_k / (k! τ^{k+1})
    let coef = |k: usize| m[k] / (fact(k) * dur.powi(k as i32 + 1));
    let alpha_re = (0..=cap).step_by(2).find(|&k| nz(k));
    let alpha_im = (1..=cap).step_by(2).find(|&k| nz(k));
    let f_re = alpha_re.map_or(0.0, |k| if (k / 2) % 2 == 0 { coef(k) } else { -coef(k) });
    let f_im = alpha_im.map_or(0.0, |k| if ((k - 1) / 2) % 2 == 0 { coef(k) } else { -coef(k) });
    Ok(FilterOrder { alpha_p: alpha, coeff_sq: coef(alpha).powi(2), alpha_re, f_re, alpha_im, f_im })
}

/// Control protocol: history on `[0, t_K)` with resets at `t_1..t_K`,
/// followed by a gate on `[t_K, t_K + τG)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Protocol {
    history: SwitchingFunction,
    reset_times: Vec<f64>,
    gate: SwitchingFunction,
}

impl Protocol {
    /// General constructor. `gate` is given on `[0, τG)`; `history` must
    /// start at 0 and end at the last reset time.
    pub fn new(history: SwitchingFunction, reset_times: Vec<f64>, gate: SwitchingFunction, min_sep: Option<f64>) -> Result<Self> {
        if history.start() != 0.0 {
            return Err(Error::Invalid("history must start at t = 0".into()));
        }
        if gate.start() != 0.0 || gate.duration() <= 0.0 {
            return Err(Error::Invalid("gate must start at 0 and have positive duration".into()));
        }
        let t_k = reset_times.last().copied().unwrap_or(0.0);
        if (history.end() - t_k).abs() > TIME_SLACK * t_k.max(1.0) {
            return Err(Error::Invalid(format!(
                "history ends at {} but last reset is at {}",
                history.end(),
                t_k
            )));
        }
        let mut prev = 0.0;
        for &t in &reset_times {
            let gap = t - prev;
            if gap <= 0.0 {
                return Err(Error::Invalid("reset times must be strictly increasing and positive".into()));
            }
            if let Some(t0) = min_sep {
                if gap < t0 * (1.0 - TIME_SLACK) {
                    return Err(Error::ConstraintViolation(format!(
                        "reset separation {gap} below tau_0 = {t0}"
                    )));
                }
            }
            prev = t;
        }
        Ok(Protocol { history, reset_times, gate })
    }

    /// Gate applied at `t = 0` with no history.
    pub fn gate_only(gate: SwitchingFunction) -> Result<Self> {
        Self::new(SwitchingFunction::empty(0.0), vec![], gate, None)
    }

    /// One reset at the end of `history` (no reset for an empty history).
    pub fn single(history: SwitchingFunction, gate: SwitchingFunction) -> Result<Self> {
        if history.is_empty() {
            return Self::gate_only(gate);
        }
        let t = history.end();
        Self::new(history, vec![t], gate, None)
    }

    /// Scenario c2: `K` resets, each after `M` repetitions of the gate sequence.
    pub fn periodic(gate: &SwitchingFunction, m: usize, k: usize) -> Result<Self> {
        if m == 0 || k == 0 {
            return Self::gate_only(gate.clone());
        }
        let history = repeat_periodic(gate, m * k)?;
        let resets = reset_grid(gate, m, k);
        Self::new(history, resets, gate.clone(), None)
    }

    /// Scenario c3: `n_ctrl` control cycles each followed by a reset, then
    /// `m_idle` idle cycles and a reset, then the gate.
    pub fn idle_restore(
        ctrl: &SwitchingFunction,
        n_ctrl: usize,
        idle: &SwitchingFunction,
        m_idle: usize,
        gate: &SwitchingFunction,
    ) -> Result<Self> {
        let ctrl_hist = repeat_periodic(ctrl, n_ctrl)?;
        let mut resets = reset_grid(ctrl, 1, n_ctrl);
        let history = if m_idle > 0 {
            let idle_hist = repeat_periodic(idle, m_idle)?;
            let h = ctrl_hist.concat(&idle_hist)?;
            resets.push(h.end());
            h
        } else {
            ctrl_hist
        };
        if resets.is_empty() {
            return Self::gate_only(gate.clone());
        }
        Self::new(history, resets, gate.clone(), None)
    }

    pub fn history(&self) -> &SwitchingFunction {
        &self.history
    }
    pub fn gate(&self) -> &SwitchingFunction {
        &self.gate
    }
    pub fn reset_times(&self) -> &[f64] {
        &self.reset_times
    }
    /// Number of resets `K`.
    pub fn k(&self) -> usize {
        self.reset_times.len()
    }
    /// Time of the last reset, `t_K` (0 without resets).
    pub fn t_k(&self) -> f64 {
        self.reset_times.last().copied().unwrap_or(0.0)
    }
    /// Interval `[t_{k−1}, t_k)` for `k = 1..=K`.
    pub fn interval(&self, k: usize) -> (f64, f64) {
        let lo = if k <= 1 { 0.0 } else { self.reset_times[k - 2] };
        (lo, self.reset_times[k - 1])
    }
    /// History pieces restricted to reset interval `k` (1-based).
    pub fn interval_pieces(&self, k: usize) -> Vec<Piece> {
        let (lo, hi) = self.interval(k);
        self.history.pieces_in(lo, hi)
    }
    /// Gate pieces in absolute time, starting at `t_K`.
    pub fn gate_pieces_abs(&self) -> Vec<Piece> {
        let t = self.t_k();
        self.gate.pieces().into_iter().map(|p| Piece { a: p.a + t, b: p.b + t, sign: p.sign }).collect()
    }
}

fn reset_grid(seq: &SwitchingFunction, m: usize, k: usize) -> Vec<f64> {
    match seq.ticks() {
        Some(tk) => {
            let len = tk.end - tk.start;
            (1..=k).map(|j| (j as i64 * m as i64 * len) as f64 * tk.unit).collect()
        }
        None => (1..=k).map(|j| (j * m) as f64 * seq.duration()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_sequences() {
        let h = make_sequence(DDKind::Hahn, 2.0, 1.0).unwrap();
        assert_eq!(h.flips(), &[1.0]);
        let f = make_sequence(DDKind::Free, 2.0, 1.0).unwrap();
        assert!(f.flips().is_empty());
        let c = make_sequence(DDKind::Cpmg, 4.0, 1.0).unwrap();
        assert_eq!(c.flips(), &[1.0, 3.0]);
        assert!(make_sequence(DDKind::Cdd(2), 4.0, 1.5).is_err());
    }

    #[test]
    fn repetition_examples() {
        let h = make_sequence(DDKind::Hahn, 2.0, 1.0).unwrap();
        let r0 = repeat_periodic(&h, 0).unwrap();
        assert_eq!(r0.duration(), 0.0);
        let r3 = repeat_periodic(&h, 3).unwrap();
        // y_G(t mod τG) also changes sign at each copy boundary
        assert_eq!(r3.flips(), &[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(r3.pulse_count(), 6);
        assert_eq!(r3.duration(), 6.0);
        let c = make_sequence(DDKind::Cpmg, 4.0, 1.0).unwrap();
        let r2 = repeat_periodic(&c, 2).unwrap();
        assert_eq!(r2.flips(), &[1.0, 3.0, 5.0, 7.0]);
    }

    #[test]
    fn value_lookup() {
        let h = make_sequence(DDKind::Hahn, 2.0, 1.0).unwrap();
        assert_eq!(h.value(0.5), 1.0);
        assert_eq!(h.value(1.0), -1.0);
        assert_eq!(h.value(2.0), 0.0);
    }
}
