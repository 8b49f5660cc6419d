//! Experiment configuration: TOML schema, validation and protocol builders.
//!
//! All times in a file are expressed in the single declared `time_unit`;
//! rates (`gamma0`, `omega_bar1`, ...) are in its inverse and spectral
//! weights (`delta0`, `delta1`) in its inverse square.

use crate::CliError;
use dephasing::noise::{DiscreteSpectrum, Mode, NoiseModel, SpectralDensity};
use dephasing::pulse::{make_sequence, repeat_periodic, DDKind, Protocol, SwitchingFunction};
use dephasing::quad::Tol;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// One reset after `M` repetitions of a history sequence.
    C1,
    /// `K` resets, each after `M` repetitions.
    C2,
    /// Control cycles with resets, idling, then the gate.
    C3,
    /// Explicit switching function and reset times.
    Custom,
}

/// Sequence fragment `{kind, tau_g, tau_0, repetitions}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeqSpec {
    /// `free`, `hahn`, `cpmg` or `cddN`.
    pub kind: String,
    pub tau_g: f64,
    pub tau_0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repetitions: Option<usize>,
}

impl SeqSpec {
    pub fn dd_kind(&self) -> Option<DDKind> {
        match self.kind.to_ascii_lowercase().as_str() {
            "free" => Some(DDKind::Free),
            "hahn" | "cdd1" => Some(DDKind::Hahn),
            "cpmg" => Some(DDKind::Cpmg),
            k => k.strip_prefix("cdd").and_then(|n| n.parse().ok()).filter(|n| (1..=12).contains(n)).map(DDKind::Cdd),
        }
    }

    pub fn build(&self) -> dephasing::Result<SwitchingFunction> {
        let kind = self.dd_kind().ok_or_else(|| dephasing::Error::Invalid(format!("unknown sequence kind {:?}", self.kind)))?;
        make_sequence(kind, self.tau_g, self.tau_0)
    }

    fn validate(&self, path: &str) -> Result<(), CliError> {
        if self.dd_kind().is_none() {
            return Err(field(path, "kind", "expected free, hahn, cpmg or cddN (N = 1..12)"));
        }
        positive(self.tau_g, &format!("{path}.tau_g"))?;
        positive(self.tau_0, &format!("{path}.tau_0"))?;
        self.build().map_err(|e| CliError::Validation(format!("{path}: {e}")))?;
        Ok(())
    }
}

/// Explicit protocol for the `custom` scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomBlock {
    pub flips: Vec<f64>,
    pub end: f64,
    #[serde(default = "one_i8")]
    pub initial_sign: i8,
    pub resets: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_sep: Option<f64>,
}

fn one_i8() -> i8 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseBlock {
    pub gate: SeqSpec,
    /// Repeated before each reset (c1, c2); `repetitions` is `M`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub history: Option<SeqSpec>,
    /// Number of resets `K` (c2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resets: Option<usize>,
    /// Control sequence of c3; `repetitions` is the number of control cycles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<SeqSpec>,
    /// Idle sequence of c3; `repetitions` is `M_idle`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idle: Option<SeqSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<CustomBlock>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub omega: f64,
    pub g2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default)]
    pub delta0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma0: Option<f64>,
    #[serde(default)]
    pub delta1: f64,
    #[serde(default)]
    pub omega_bar1: f64,
    #[serde(default)]
    pub gamma1: f64,
    /// Inverse temperature; `inf` for zero temperature.
    #[serde(default = "infinity", deserialize_with = "num_or_inf")]
    pub beta: f64,
    #[serde(default)]
    pub classical: bool,
    /// Discrete bath; replaces the continuous density when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<ModeSpec>>,
}

fn infinity() -> f64 {
    f64::INFINITY
}

/// Accepts TOML floats (including `inf`) and the strings `"inf"`/`"infinity"`.
fn num_or_inf<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        F(f64),
        I(i64),
        S(String),
    }
    match Raw::deserialize(d)? {
        Raw::F(x) => Ok(x),
        Raw::I(i) => Ok(i as f64),
        Raw::S(s) => match s.trim().to_ascii_lowercase().trim_start_matches('+') {
            "inf" | "infinity" => Ok(f64::INFINITY),
            t => t.parse().map_err(|_| serde::de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    M,
    K,
    MIdle,
    S,
    Delta0,
    Gamma0,
    Delta1,
    OmegaBar1,
    Gamma1,
    Beta,
    /// Kernel argument `ωτG` (asymptote kernel tables).
    X,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::M => "m",
            Axis::K => "k",
            Axis::MIdle => "m_idle",
            Axis::S => "s",
            Axis::Delta0 => "delta0",
            Axis::Gamma0 => "gamma0",
            Axis::Delta1 => "delta1",
            Axis::OmegaBar1 => "omega_bar1",
            Axis::Gamma1 => "gamma1",
            Axis::Beta => "beta",
            Axis::X => "x",
        }
    }

    pub fn is_integer(self) -> bool {
        matches!(self, Axis::M | Axis::K | Axis::MIdle)
    }
}

/// Inclusive arithmetic range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub axis: Axis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<Range>,
}

impl SweepBlock {
    /// Grid values in order. Range points are computed as `start + i·step`
    /// so that they do not accumulate rounding.
    pub fn values(&self) -> Vec<f64> {
        if let Some(g) = &self.grid {
            return g.clone();
        }
        match self.range {
            Some(r) if r.step > 0.0 && r.stop >= r.start => {
                let n = ((r.stop - r.start) / r.step + 1e-9).floor() as usize;
                (0..=n).map(|i| r.start + i as f64 * r.step).collect()
            }
            _ => vec![],
        }
    }
}

/// Named parameter override applied on top of the base blocks.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Series {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_bar1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolBlock {
    #[serde(default = "default_abs")]
    pub abs: f64,
    #[serde(default = "default_rel")]
    pub rel: f64,
    /// Pass threshold on `|F_analytic − F_oracle|`.
    #[serde(default = "default_oracle")]
    pub oracle: f64,
    /// Fock-cutoff convergence threshold on the oracle fidelity.
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
    /// Starting Fock cutoff per mode.
    #[serde(default = "default_n_start")]
    pub n_start: usize,
}

fn default_abs() -> f64 {
    1e-14
}
fn default_rel() -> f64 {
    1e-10
}
fn default_oracle() -> f64 {
    1e-6
}
fn default_cutoff() -> f64 {
    1e-9
}
fn default_n_start() -> usize {
    3
}

impl Default for TolBlock {
    fn default() -> Self {
        TolBlock { abs: default_abs(), rel: default_rel(), oracle: default_oracle(), cutoff: default_cutoff(), n_start: default_n_start() }
    }
}

impl TolBlock {
    pub fn quad(&self) -> Tol {
        Tol::new(self.abs, self.rel)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub time_unit: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub pulse: PulseBlock,
    pub noise: NoiseBlock,
    pub sweep: SweepBlock,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<Series>,
    #[serde(default)]
    pub tolerance: TolBlock,
}

fn field(path: &str, name: &str, msg: &str) -> CliError {
    CliError::Validation(format!("{path}.{name}: {msg}"))
}

fn positive(x: f64, path: &str) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{path}: must be positive and finite, got {x}")))
    }
}

fn nonneg(x: f64, path: &str) -> Result<(), CliError> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{path}: must be nonnegative and finite, got {x}")))
    }
}

/// Parses and validates a configuration. Deserialisation errors carry the
/// dotted path of the offending field.
pub fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
    let de = toml::Deserializer::new(text);
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let msg = inner.message().to_string();
        if path == "." || path.is_empty() {
            CliError::Validation(msg)
        } else {
            CliError::Validation(format!("{path}: {msg}"))
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Canonical TOML form.
pub fn to_toml(cfg: &ExperimentConfig) -> String {
    toml::to_string(cfg).expect("configuration serialises")
}

/// One evaluation point: series label, axis value and the resolved inputs.
#[derive(Debug, Clone)]
pub struct Point {
    pub series: String,
    pub index: usize,
    pub value: f64,
    pub pulse: PulseBlock,
    pub noise: NoiseBlock,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.time_unit.trim().is_empty() {
            return Err(CliError::Validation("time_unit: must be declared".into()));
        }
        let p = &self.pulse;
        p.gate.validate("pulse.gate")?;
        for (name, s) in [("history", &p.history), ("control", &p.control), ("idle", &p.idle)] {
            if let Some(s) = s {
                s.validate(&format!("pulse.{name}"))?;
            }
        }
        let swept = |a: Axis| self.sweep.axis == a;
        let series_m = !self.series.is_empty() && self.series.iter().all(|s| s.m.is_some());
        let series_k = !self.series.is_empty() && self.series.iter().all(|s| s.k.is_some());
        match self.scenario {
            Scenario::C1 | Scenario::C2 => {
                let h = p.history.as_ref().ok_or_else(|| field("pulse", "history", "required for this scenario"))?;
                if h.repetitions.is_none() && !swept(Axis::M) && !series_m {
                    return Err(field("pulse.history", "repetitions", "M is required (or sweep/series over m)"));
                }
                if self.scenario == Scenario::C2 && p.resets.is_none() && !swept(Axis::K) && !series_k {
                    return Err(field("pulse", "resets", "K is required for scenario c2 (or sweep/series over k)"));
                }
            }
            Scenario::C3 => {
                let c = p.control.as_ref().ok_or_else(|| field("pulse", "control", "required for scenario c3"))?;
                if c.repetitions.is_none() {
                    return Err(field("pulse.control", "repetitions", "number of control cycles is required"));
                }
                let i = p.idle.as_ref().ok_or_else(|| field("pulse", "idle", "idle sequence required for scenario c3"))?;
                if !swept(Axis::MIdle) && i.repetitions.is_none() {
                    return Err(field("sweep", "axis", "scenario c3 needs an m_idle grid"));
                }
            }
            Scenario::Custom => {
                let c = p.custom.as_ref().ok_or_else(|| field("pulse", "custom", "required for scenario custom"))?;
                if c.initial_sign != 1 && c.initial_sign != -1 {
                    return Err(field("pulse.custom", "initial_sign", "must be 1 or -1"));
                }
                if matches!(self.sweep.axis, Axis::M | Axis::K | Axis::MIdle) {
                    return Err(field("sweep", "axis", "custom protocols cannot sweep repetition counts"));
                }
            }
        }
        if swept(Axis::MIdle) && self.scenario != Scenario::C3 {
            return Err(field("sweep", "axis", "m_idle applies to scenario c3 only"));
        }
        if swept(Axis::K) && self.scenario != Scenario::C2 {
            return Err(field("sweep", "axis", "k applies to scenario c2 only"));
        }
        self.validate_noise(&self.noise, "noise")?;
        match (&self.sweep.grid, &self.sweep.range) {
            (Some(_), Some(_)) => return Err(field("sweep", "grid", "give either grid or range, not both")),
            (None, None) => return Err(field("sweep", "grid", "a grid or range is required")),
            _ => {}
        }
        let vals = self.sweep.values();
        if vals.is_empty() {
            return Err(field("sweep", "grid", "must be nonempty"));
        }
        for (i, v) in vals.iter().enumerate() {
            if !v.is_finite() && self.sweep.axis != Axis::Beta {
                return Err(CliError::Validation(format!("sweep.grid[{i}]: must be finite")));
            }
            if self.sweep.axis.is_integer() && (*v < 0.0 || v.fract() != 0.0) {
                return Err(CliError::Validation(format!("sweep.grid[{i}]: {} expects nonnegative integers, got {v}", self.sweep.axis.name())));
            }
        }
        let mut labels = std::collections::BTreeSet::new();
        for (i, s) in self.series.iter().enumerate() {
            if s.label.is_empty() || !labels.insert(s.label.as_str()) {
                return Err(CliError::Validation(format!("series[{i}].label: must be nonempty and unique")));
            }
        }
        let t = &self.tolerance;
        positive(t.abs, "tolerance.abs")?;
        positive(t.rel, "tolerance.rel")?;
        positive(t.oracle, "tolerance.oracle")?;
        positive(t.cutoff, "tolerance.cutoff")?;
        // every resolved point must also be a valid model
        for pt in self.points() {
            self.validate_noise(&pt.noise, &format!("series[{}]", pt.series)).map_err(|e| match e {
                CliError::Validation(m) => CliError::Validation(format!("{m} (at {}={})", self.sweep.axis.name(), pt.value)),
                other => other,
            })?;
        }
        Ok(())
    }

    fn validate_noise(&self, n: &NoiseBlock, path: &str) -> Result<(), CliError> {
        if !(n.beta > 0.0) {
            return Err(field(path, "beta", "must be positive (inf allowed)"));
        }
        if let Some(modes) = &n.modes {
            if modes.is_empty() {
                return Err(field(path, "modes", "must be nonempty"));
            }
            for (i, m) in modes.iter().enumerate() {
                positive(m.omega, &format!("{path}.modes[{i}].omega"))?;
                nonneg(m.g2, &format!("{path}.modes[{i}].g2"))?;
            }
            return Ok(());
        }
        nonneg(n.delta0, &format!("{path}.delta0"))?;
        nonneg(n.delta1, &format!("{path}.delta1"))?;
        if n.delta0 > 0.0 {
            let s = n.s.ok_or_else(|| field(path, "s", "required when delta0 > 0"))?;
            positive(s, &format!("{path}.s"))?;
            positive(n.gamma0.unwrap_or(-1.0), &format!("{path}.gamma0"))?;
        }
        if n.delta1 > 0.0 {
            positive(n.gamma1, &format!("{path}.gamma1"))?;
            nonneg(n.omega_bar1, &format!("{path}.omega_bar1"))?;
        }
        if n.delta0 == 0.0 && n.delta1 == 0.0 {
            return Err(field(path, "delta0", "the density is identically zero"));
        }
        Ok(())
    }

    /// Series in order; a single unnamed series when none are given.
    pub fn series_or_default(&self) -> Vec<Series> {
        if self.series.is_empty() {
            vec![Series { label: "default".into(), ..Default::default() }]
        } else {
            self.series.clone()
        }
    }

    /// All sweep points, series-major, each with overrides applied.
    pub fn points(&self) -> Vec<Point> {
        let vals = self.sweep.values();
        let mut out = Vec::new();
        for s in self.series_or_default() {
            for (index, &v) in vals.iter().enumerate() {
                let mut pulse = self.pulse.clone();
                let mut noise = self.noise.clone();
                let set = |x: &mut f64, o: Option<f64>| {
                    if let Some(o) = o {
                        *x = o;
                    }
                };
                if s.s.is_some() {
                    noise.s = s.s;
                }
                if s.gamma0.is_some() {
                    noise.gamma0 = s.gamma0;
                }
                set(&mut noise.delta0, s.delta0);
                set(&mut noise.delta1, s.delta1);
                set(&mut noise.omega_bar1, s.omega_bar1);
                set(&mut noise.gamma1, s.gamma1);
                if let (Some(m), Some(h)) = (s.m, pulse.history.as_mut()) {
                    h.repetitions = Some(m);
                }
                if s.k.is_some() {
                    pulse.resets = s.k;
                }
                match self.sweep.axis {
                    Axis::M => {
                        if let Some(h) = pulse.history.as_mut() {
                            h.repetitions = Some(v as usize);
                        }
                    }
                    Axis::K => pulse.resets = Some(v as usize),
                    Axis::MIdle => {
                        if let Some(i) = pulse.idle.as_mut() {
                            i.repetitions = Some(v as usize);
                        }
                    }
                    Axis::S => noise.s = Some(v),
                    Axis::Delta0 => noise.delta0 = v,
                    Axis::Gamma0 => noise.gamma0 = Some(v),
                    Axis::Delta1 => noise.delta1 = v,
                    Axis::OmegaBar1 => noise.omega_bar1 = v,
                    Axis::Gamma1 => noise.gamma1 = v,
                    Axis::Beta => noise.beta = v,
                    Axis::X => {}
                }
                out.push(Point { series: s.label.clone(), index, value: v, pulse, noise });
            }
        }
        out
    }
}

impl NoiseBlock {
    pub fn density(&self) -> SpectralDensity {
        SpectralDensity {
            s: self.s.unwrap_or(1.0),
            delta0: self.delta0,
            gamma0: self.gamma0.unwrap_or(1.0),
            delta1: self.delta1,
            omega_bar1: self.omega_bar1,
            gamma1: self.gamma1,
        }
    }

    pub fn discrete(&self) -> Option<dephasing::Result<DiscreteSpectrum>> {
        self.modes
            .as_ref()
            .map(|m| DiscreteSpectrum::new(m.iter().map(|x| Mode { omega: x.omega, g2: x.g2 }).collect()))
    }

    pub fn model(&self) -> dephasing::Result<NoiseModel> {
        let mut m = match self.discrete() {
            Some(d) => NoiseModel::discrete(d?, self.beta)?,
            None => NoiseModel::continuous(self.density(), self.beta)?,
        };
        m.classical = self.classical;
        Ok(m)
    }
}

impl Point {
    pub fn gate(&self) -> dephasing::Result<SwitchingFunction> {
        self.pulse.gate.build()
    }

    pub fn m(&self) -> usize {
        self.pulse.history.as_ref().and_then(|h| h.repetitions).unwrap_or(0)
    }

    pub fn k(&self) -> usize {
        self.pulse.resets.unwrap_or(1)
    }

    pub fn protocol(&self, scenario: Scenario) -> dephasing::Result<Protocol> {
        let gate = self.gate()?;
        match scenario {
            Scenario::C1 | Scenario::C2 => {
                let spec = self.pulse.history.as_ref().expect("validated");
                let (m, k) = (self.m(), if scenario == Scenario::C1 { 1 } else { self.k() });
                if m == 0 || k == 0 {
                    return Protocol::gate_only(gate);
                }
                if spec.kind == self.pulse.gate.kind && spec.tau_g == self.pulse.gate.tau_g && spec.tau_0 == self.pulse.gate.tau_0 {
                    return Protocol::periodic(&gate, m, k);
                }
                let cycle = spec.build()?;
                let block = repeat_periodic(&cycle, m)?;
                let mut hist = SwitchingFunction::empty(0.0);
                let mut resets = Vec::with_capacity(k);
                for _ in 0..k {
                    hist = hist.concat(&block)?;
                    resets.push(hist.end());
                }
                Protocol::new(hist, resets, gate, None)
            }
            Scenario::C3 => {
                let c = self.pulse.control.as_ref().expect("validated");
                let i = self.pulse.idle.as_ref().expect("validated");
                Protocol::idle_restore(&c.build()?, c.repetitions.unwrap_or(0), &i.build()?, i.repetitions.unwrap_or(0), &gate)
            }
            Scenario::Custom => {
                let c = self.pulse.custom.as_ref().expect("validated");
                let hist = SwitchingFunction::new(0.0, c.end, c.flips.clone(), c.initial_sign)?;
                Protocol::new(hist, c.resets.clone(), gate, c.min_sep)
            }
        }
    }
}
