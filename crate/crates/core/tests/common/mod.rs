#![allow(dead_code)]

use dephasing::noise::{DiscreteSpectrum, Mode, NoiseModel, SpectralDensity};
use dephasing::pulse::{make_sequence, repeat_periodic, DDKind, Protocol, SwitchingFunction};
use rand::Rng;

pub const TAU0: f64 = 0.5;

pub fn random_kind<R: Rng>(rng: &mut R) -> DDKind {
    match rng.gen_range(0..3) {
        0 => DDKind::Hahn,
        1 => DDKind::Cpmg,
        _ => DDKind::Cdd(2),
    }
}

pub fn cycle(kind: DDKind) -> SwitchingFunction {
    make_sequence(kind, kind.pieces() as f64 * TAU0, TAU0).unwrap()
}

/// `1..=k_max` reset intervals, each holding `1..=m_max` repetitions of a
/// random sequence, followed by a random one-cycle gate.
pub fn random_protocol<R: Rng>(rng: &mut R, k_max: usize, m_max: usize) -> Protocol {
    let k = rng.gen_range(1..=k_max);
    let mut history = SwitchingFunction::empty(0.0);
    let mut resets = Vec::with_capacity(k);
    for _ in 0..k {
        let seg = repeat_periodic(&cycle(random_kind(rng)), rng.gen_range(1..=m_max)).unwrap();
        let seg = if rng.gen_bool(0.3) { seg.negated() } else { seg };
        history = history.concat(&seg).unwrap();
        resets.push(history.end());
    }
    Protocol::new(history, resets, cycle(random_kind(rng)), Some(TAU0)).unwrap()
}

pub fn random_density<R: Rng>(rng: &mut R) -> SpectralDensity {
    SpectralDensity {
        s: [1.0, 1.5, 2.0, 3.0][rng.gen_range(0..4)],
        delta0: rng.gen_range(0.5..5.0),
        gamma0: rng.gen_range(0.05..1.0),
        delta1: if rng.gen_bool(0.5) { rng.gen_range(0.05..0.5) } else { 0.0 },
        omega_bar1: rng.gen_range(2.0..8.0),
        gamma1: rng.gen_range(0.05..0.5),
    }
}

pub fn random_model<R: Rng>(rng: &mut R) -> NoiseModel {
    NoiseModel::continuous(random_density(rng), f64::INFINITY).unwrap()
}

/// A few well-separated modes with couplings small enough for a modest
/// Fock cutoff to converge.
pub fn random_modes<R: Rng>(rng: &mut R, n: usize) -> DiscreteSpectrum {
    let modes = (0..n)
        .map(|i| Mode { omega: 0.6 + 1.3 * i as f64 + rng.gen_range(0.0..1.0), g2: rng.gen_range(0.3..2.0) })
        .collect();
    DiscreteSpectrum::new(modes).unwrap()
}
