//! Special functions: gamma (via `statrs`), Riemann zeta tails, hyperbolic helpers.

/// Gamma function for real arguments.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Natural log of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Bernoulli numbers B_2, B_4, ..., B_16.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Tail sum `Σ_{n ≥ a} n^{-s}` for `s > 1`, `a ≥ 1`, by Euler–Maclaurin.
pub fn zeta_tail(s: f64, a: u64) -> f64 {
    assert!(s > 1.0, "zeta_tail requires s > 1");
    assert!(a >= 1);
    let shift = 12u64;
    let mut head = 0.0;
    for n in a..a + shift {
        head += (n as f64).powf(-s);
    }
    let n = (a + shift) as f64;
    let mut tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // rising factorial s(s+1)...(s+2k-2) / (2k)!
    let mut fact = s; // k = 1: s / 2!
    let mut denom = 2.0;
    let mut npow = n.powf(-s - 1.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        tail += b * fact / denom * npow;
        let k2 = 2.0 * (k as f64 + 1.0);
        fact *= (s + k2 - 1.0) * (s + k2);
        denom *= (k2 + 1.0) * (k2 + 2.0);
        npow /= n * n;
    }
    head + tail
}

/// Riemann zeta function for real `s > 1`.
pub fn zeta(s: f64) -> f64 {
    zeta_tail(s, 1)
}

/// `coth(x)` for `x > 0`, accurate near zero.
pub fn coth(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 / x + x / 3.0 - x * x * x / 45.0
    } else {
        1.0 / x.tanh()
    }
}

/// `sin(x)/x` with a series near zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sin() / x
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in lx.iter().zip(&ly) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_known_values() {
        let pi = std::f64::consts::PI;
        assert!((zeta(2.0) - pi * pi / 6.0).abs() < 1e-14);
        assert!((zeta(4.0) - pi.powi(4) / 90.0).abs() < 1e-14);
        assert!((zeta(1.5) - 2.612_375_348_685_488).abs() < 1e-12);
    }

    #[test]
    fn zeta_tail_matches_direct_sum() {
        let s = 3.3;
        let direct: f64 = (1..=20).map(|n| (n as f64).powf(-s)).sum();
        assert!((zeta(s) - zeta_tail(s, 21) - direct).abs() < 1e-14);
    }

    #[test]
    fn gamma_values() {
        let sp = std::f64::consts::PI.sqrt();
        assert!((gamma(0.5) - sp).abs() < 1e-13);
        assert!((gamma(1.5) - sp / 2.0).abs() < 1e-13);
        assert!((gamma(5.0) - 24.0).abs() < 1e-11);
    }

    #[test]
    fn coth_branches_agree() {
        let x = 1e-4;
        assert!((coth(x * 0.999) - 1.0 / (x * 0.999).tanh()).abs() < 1e-6);
        assert!((coth(1.0) - 1.0 / 1f64.tanh()).abs() < 1e-15);
    }
}
