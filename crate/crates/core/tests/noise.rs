use dephasing::fidelity::chi_frequency_domain;
use dephasing::noise::*;
use dephasing::pulse::{make_sequence, DDKind};
use dephasing::quad::{integrate, Tol};
use dephasing::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn two_peak(s: f64) -> SpectralDensity {
    SpectralDensity { s, delta0: 1.3, gamma0: 1.0, delta1: 0.4, omega_bar1: 4.0, gamma1: 0.5 }
}

#[test]
fn zero_temperature_spectra() {
    let j = two_peak(1.0);
    let m = NoiseModel::continuous(j, f64::INFINITY).unwrap();
    for w in [0.0, 0.3, 1.0, 4.2, 9.0] {
        assert_eq!(m.spectrum_plus(w).unwrap(), j.j(w));
        assert_eq!(m.spectrum_plus(-w).unwrap(), m.spectrum_plus(w).unwrap());
    }
    assert_eq!(m.spectrum_minus(0.0), 0.0);
    assert_eq!(m.spectrum_minus(1.5), j.j(1.5));
    assert_eq!(m.spectrum_minus(-1.5), -j.j(1.5));
}

#[test]
fn finite_temperature_point_value() {
    let m = NoiseModel::continuous(SpectralDensity::lf(1.0, 1.0, 1.0), 2.0).unwrap();
    // J(1) = Δ0/(Γ(1)γ0) · 1 · e^{−1}, coth(1) = (e² + 1)/(e² − 1)
    let e2 = (2.0f64).exp();
    let expect = (e2 + 1.0) / (e2 - 1.0) * (-1.0f64).exp();
    assert!((m.spectrum_plus(1.0).unwrap() - expect).abs() < 1e-14);
}

#[test]
fn finite_temperature_refusals() {
    let sub = NoiseModel::continuous(SpectralDensity::lf(0.6, 1.0, 1.0), 3.0).unwrap();
    assert!(matches!(sub.spectrum_plus(0.5), Err(Error::NonIntegrable(_))));
    assert!(matches!(sub.correlator(), Err(Error::NonIntegrable(_))));
    let hf_low = NoiseModel::continuous(SpectralDensity::hf(0.2, 1.0, 0.5), 3.0).unwrap();
    assert!(matches!(hf_low.correlator(), Err(Error::NonIntegrable(_))));
    // zero temperature is always fine
    assert!(NoiseModel::continuous(SpectralDensity::lf(0.6, 1.0, 1.0), f64::INFINITY).unwrap().correlator().is_ok());
}

#[test]
fn area_normalisation() {
    let j = two_peak(1.7);
    let b = j.bandwidth();
    let (v, _) = integrate(|w| j.j(w), &[-b, -j.omega_bar1, 0.0, j.omega_bar1, b], Tol::new(1e-13, 1e-13));
    assert!((v - (j.delta0 + 2.0 * j.delta1)).abs() < 1e-10);
}

#[test]
fn correlator_closed_forms() {
    let tol = 1e-9;
    // s = 1: C⁺(0) = Δ0/2π and −iC⁻(u) = Δ0 √π b e^{−b²/4}/(4π), b = γ0 u
    let (d0, g0) = (2.5, 0.7);
    let c1 = NoiseModel::continuous(SpectralDensity::lf(1.0, d0, g0), f64::INFINITY).unwrap().correlator().unwrap();
    assert!((c1.c_plus(0.0) - d0 / (2.0 * PI)).abs() < tol);
    assert!(c1.c_minus_im(0.0).abs() < tol);
    for u in [0.1, 1.0, 3.7, 12.0, -2.0] {
        let b = g0 * u;
        let expect = d0 * PI.sqrt() * b / (4.0 * PI) * (-0.25 * b * b).exp();
        assert!((c1.c_minus_im(u) - expect).abs() < tol, "u={u}");
        assert_eq!(c1.c_plus(-u), c1.c_plus(u));
    }
    // s = 2: C⁺(u) = (Δ0/2π) e^{−b²/4} (1 − b²/2)
    let c2 = NoiseModel::continuous(SpectralDensity::lf(2.0, d0, g0), f64::INFINITY).unwrap().correlator().unwrap();
    for u in [0.0, 0.4, 2.0, 5.5, 20.0] {
        let b = g0 * u;
        let expect = d0 / (2.0 * PI) * (-0.25 * b * b).exp() * (1.0 - 0.5 * b * b);
        assert!((c2.c_plus(u) - expect).abs() < tol, "u={u}");
    }
    // HF only: −iC⁻(u) = (Δ1/π) e^{−γ1²u²/4} sin(ω̄1 u) up to the far tail
    let (d1, wb, g1) = (0.3, 2.0 * PI, 0.2);
    let ch = NoiseModel::continuous(SpectralDensity::hf(d1, wb, g1), f64::INFINITY).unwrap().correlator().unwrap();
    for u in [0.0, 0.3, 1.1, 7.0, 25.0] {
        let env = d1 / PI * (-0.25 * g1 * g1 * u * u).exp();
        assert!((ch.c_minus_im(u) - env * (wb * u).sin()).abs() < tol, "u={u}: {} vs {}", ch.c_minus_im(u), env * (wb * u).sin());
        assert!((ch.c_plus(u) - env * (wb * u).cos()).abs() < tol, "u={u}: {} vs {}", ch.c_plus(u), env * (wb * u).cos());
    }
}

#[test]
fn interpolant_matches_direct_quadrature() {
    let m = NoiseModel::continuous(two_peak(1.5), f64::INFINITY).unwrap();
    let c = m.correlator().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..60 {
        let u = rng.gen_range(-30.0..30.0);
        let (p, q) = c.direct(u);
        assert!((c.c_plus(u) - p).abs() < 1e-9);
        assert!((c.c_minus_im(u) - q).abs() < 1e-9);
    }
    assert!(c.cached_windows() > 0);
}

#[test]
fn fourier_round_trip() {
    // S⁺(ω) = 2 ∫₀^∞ C⁺(u) cos(ωu) du; s = 2 keeps C⁺ Gaussian-decaying
    let j = two_peak(2.0);
    let m = NoiseModel::continuous(j, f64::INFINITY).unwrap();
    let c = m.correlator().unwrap();
    let u_max = 12.0 / j.gamma1;
    let breaks: Vec<f64> = (0..=240).map(|i| u_max * i as f64 / 240.0).collect();
    for w in [0.2, 0.6, 1.0, 1.5, 2.0, 3.0, 3.5, 4.0, 4.5, 5.0] {
        let (v, _) = integrate(|u| c.c_plus(u) * (w * u).cos(), &breaks, Tol::new(1e-12, 1e-10));
        let s = m.spectrum_plus(w).unwrap();
        assert!(((2.0 * v) - s).abs() < 1e-5 * s, "ω={w}: {} vs {s}", 2.0 * v);
    }
}

#[test]
fn discretisation_moments() {
    let j = two_peak(1.0);
    let w_max = j.bandwidth();
    let d = discretize(&j, 12, w_max).unwrap();
    let tol = Tol::new(1e-14, 1e-13);
    let (z0, _) = integrate(|w| 2.0 * PI * j.j(w), &[0.0, 2.0, j.omega_bar1, w_max], tol);
    let (z1, _) = integrate(|w| 2.0 * PI * j.j(w) * w, &[0.0, 2.0, j.omega_bar1, w_max], tol);
    assert!((d.total_weight() - z0).abs() < 1e-8 * z0);
    let m1: f64 = d.modes.iter().map(|m| m.g2 * m.omega).sum();
    assert!((m1 - z1).abs() < 1e-8 * z1);
    // weights reproduce the stated normalisation π(Δ0 + 2Δ1) on the full support
    assert!((d.total_weight() - PI * (j.delta0 + 2.0 * j.delta1)).abs() < 1e-8);
}

#[test]
fn narrow_peak_single_mode() {
    let j = SpectralDensity::hf(0.25, 5.0, 1e-3);
    let d = discretize(&j, 1, 10.0).unwrap();
    assert_eq!(d.modes.len(), 1);
    assert!((d.modes[0].omega - 5.0).abs() < 1e-9);
    assert!((d.modes[0].g2 - 2.0 * PI * 0.25).abs() < 1e-9);
}

#[test]
fn discrete_chi_converges_to_continuum() {
    let j = SpectralDensity::lf(1.0, 3.5, 1.0);
    // a long gate makes |F|² oscillate across the support so the error decays visibly
    let gate = make_sequence(DDKind::Cpmg, 16.0, 1.0).unwrap();
    let tol = Tol::new(1e-14, 1e-12);
    let exact = chi_frequency_domain(&gate, &NoiseModel::continuous(j, f64::INFINITY).unwrap(), tol).unwrap();
    let mut prev = f64::INFINITY;
    for n in [8, 16, 32, 64] {
        let d = discretize(&j, n, j.bandwidth()).unwrap();
        let chi = chi_frequency_domain(&gate, &NoiseModel::discrete(d, f64::INFINITY).unwrap(), tol).unwrap();
        let err = (chi - exact).abs();
        assert!(err < prev, "n={n}: error {err:e} not below {prev:e}");
        prev = err;
    }
}

#[test]
fn discrete_correlator_normalisation() {
    let d = DiscreteSpectrum::new(vec![Mode { omega: 1.0, g2: 2.0 }, Mode { omega: 3.0, g2: 0.5 }]).unwrap();
    let c = NoiseModel::discrete(d.clone(), f64::INFINITY).unwrap().correlator().unwrap();
    // C⁺(0) = ⟨{B, B}⟩ = 2 Σ |g|² with |g|² = w/4π²
    let phys: f64 = d.modes.iter().map(|m| 2.0 * m.coupling_sq()).sum();
    assert!((c.c_plus(0.0) - phys).abs() < 1e-15);
    assert!(DiscreteSpectrum::new(vec![Mode { omega: 1.0, g2: 1.0 }, Mode { omega: 1.0, g2: 1.0 }]).is_err());
    assert!(DiscreteSpectrum::new(vec![Mode { omega: -1.0, g2: 1.0 }]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn spectra_parity(w in 0.0f64..12.0, s in 0.3f64..3.0) {
        let m = NoiseModel::continuous(two_peak(s), f64::INFINITY).unwrap();
        prop_assert!((m.spectrum_plus(w).unwrap() - m.spectrum_plus(-w).unwrap()).abs() <= 1e-12);
        prop_assert!((m.spectrum_minus(w) + m.spectrum_minus(-w)).abs() <= 1e-12);
    }

    #[test]
    fn fluctuation_dissipation(w in 0.01f64..12.0, beta in 0.1f64..20.0, s in 1.0f64..3.0) {
        let j = SpectralDensity { omega_bar1: 8.0, gamma1: 0.5, ..two_peak(s) };
        let m = NoiseModel::continuous(j, beta).unwrap();
        let plus = m.spectrum_plus(w).unwrap();
        let minus = m.spectrum_minus(w);
        prop_assert!((plus - (0.5 * beta * w).tanh().recip() * minus).abs() <= 1e-12 * plus.max(1e-300));
        prop_assert!(plus >= minus.abs());
    }
}
