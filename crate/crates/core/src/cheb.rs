//! Chebyshev interpolants on a finite interval.

/// Chebyshev series `Σ c_k T_k(x)` on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cheb {
    pub a: f64,
    pub b: f64,
    pub coeffs: Vec<f64>,
}

impl Cheb {
    /// Chebyshev points of the first kind on `[a,b]`.
    pub fn nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|j| {
                let t = (std::f64::consts::PI * (j as f64 + 0.5) / n as f64).cos();
                0.5 * (a + b) + 0.5 * (b - a) * t
            })
            .collect()
    }

    /// Builds the interpolant from values at [`Cheb::nodes`].
    pub fn from_values(a: f64, b: f64, vals: &[f64]) -> Self {
        let n = vals.len();
        let mut coeffs = vec![0.0; n];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let mut s = 0.0;
            for (j, v) in vals.iter().enumerate() {
                s += v * (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / n as f64).cos();
            }
            *c = 2.0 * s / n as f64;
        }
        coeffs[0] *= 0.5;
        Cheb { a, b, coeffs }
    }

    /// Interpolates `f` with `n` nodes.
    pub fn build<F: FnMut(f64) -> f64>(a: f64, b: f64, n: usize, mut f: F) -> Self {
        let vals: Vec<f64> = Self::nodes(a, b, n).into_iter().map(&mut f).collect();
        Self::from_values(a, b, &vals)
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let t = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.coeffs[0]
    }

    /// Magnitude of the last two coefficients, a cheap truncation indicator.
    pub fn tail(&self) -> f64 {
        let n = self.coeffs.len();
        self.coeffs[n.saturating_sub(2)..].iter().map(|c| c.abs()).sum()
    }
}
