//! Adaptive Gauss–Kronrod (G10/K21) quadrature with global error control,
//! vector-valued integrands, and fixed Gauss–Legendre rules.

use std::collections::BinaryHeap;
use std::sync::OnceLock;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_478_020,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tol {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tol {
    fn default() -> Self {
        Tol { abs: 1e-9, rel: 1e-7, max_intervals: 200_000 }
    }
}

impl Tol {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tol { abs, rel, ..Default::default() }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadResult {
    pub value: Vec<f64>,
    pub error: f64,
    pub converged: bool,
    pub intervals: usize,
}

struct Panel {
    a: f64,
    b: f64,
    val: Vec<f64>,
    err: f64,
    /// Largest component of `∫|f|`, which sets the rounding floor.
    absval: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

fn gk21<F: FnMut(f64, &mut [f64])>(f: &mut F, a: f64, b: f64, dim: usize, buf: &mut [f64]) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    let mut ab = vec![0.0; dim];
    f(c, buf);
    for d in 0..dim {
        k[d] = WGK[10] * buf[d];
        ab[d] = WGK[10] * buf[d].abs();
    }
    for j in 0..10 {
        let x = h * XGK[j];
        for sgn in [-1.0, 1.0] {
            f(c + sgn * x, buf);
            for d in 0..dim {
                k[d] += WGK[j] * buf[d];
                ab[d] += WGK[j] * buf[d].abs();
                if j % 2 == 1 {
                    g[d] += WG[j / 2] * buf[d];
                }
            }
        }
    }
    let mut err: f64 = 0.0;
    let mut absval: f64 = 0.0;
    for d in 0..dim {
        k[d] *= h;
        g[d] *= h;
        err = err.max((k[d] - g[d]).abs());
        absval = absval.max(ab[d] * h.abs());
    }
    Panel { a, b, val: k, err, absval }
}

/// Integrates a `dim`-valued function over `[breaks[0], breaks.last()]`, with
/// the given interior breakpoints as the initial partition. The error norm is
/// the maximum over components.
pub fn integrate_vec<F>(mut f: F, dim: usize, breaks: &[f64], tol: Tol) -> QuadResult
where
    F: FnMut(f64, &mut [f64]),
{
    let mut heap = BinaryHeap::new();
    let mut buf = vec![0.0; dim];
    let mut total = vec![0.0; dim];
    let mut err_sum = 0.0;
    let mut abs_sum = 0.0;
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let p = gk21(&mut f, w[0], w[1], dim, &mut buf);
        for d in 0..dim {
            total[d] += p.val[d];
        }
        err_sum += p.err;
        abs_sum += p.absval;
        heap.push(p);
    }
    let mut n = heap.len();
    // below 50ε∫|f| the Kronrod–Gauss difference is rounding noise
    let target = |total: &[f64], abs_sum: f64| {
        let mag = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        tol.abs.max(tol.rel * mag).max(50.0 * f64::EPSILON * abs_sum)
    };
    let mut converged = err_sum <= target(&total, abs_sum);
    while !converged && n < tol.max_intervals {
        let Some(p) = heap.pop() else { break };
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            heap.push(p);
            break;
        }
        let l = gk21(&mut f, p.a, m, dim, &mut buf);
        let r = gk21(&mut f, m, p.b, dim, &mut buf);
        for d in 0..dim {
            total[d] += l.val[d] + r.val[d] - p.val[d];
        }
        err_sum += l.err + r.err - p.err;
        abs_sum += l.absval + r.absval - p.absval;
        heap.push(l);
        heap.push(r);
        n += 1;
        if n % 64 == 0 {
            // resum to shed accumulated rounding
            err_sum = heap.iter().map(|p| p.err).sum();
            abs_sum = heap.iter().map(|p| p.absval).sum();
            total = vec![0.0; dim];
            for p in heap.iter() {
                for d in 0..dim {
                    total[d] += p.val[d];
                }
            }
        }
        converged = err_sum <= target(&total, abs_sum);
    }
    // final exact resummation
    let mut value = vec![0.0; dim];
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut error = 0.0;
    for p in &panels {
        for d in 0..dim {
            value[d] += p.val[d];
        }
        error += p.err;
    }
    QuadResult { value, error, converged, intervals: panels.len() }
}

/// Scalar adaptive integration; returns `(value, error_estimate)`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], tol: Tol) -> (f64, f64) {
    let r = integrate_vec(|x, out| out[0] = f(x), 1, breaks, tol);
    (r.value[0], r.error)
}

/// Builds a sorted partition of each window `[a,b]` with panel width at most
/// `max_width`, inserting the extra points in `marks` that fall inside.
pub fn partition(windows: &[(f64, f64)], max_width: f64, marks: &[f64]) -> Vec<Vec<f64>> {
    windows
        .iter()
        .map(|&(a, b)| {
            let mut pts = vec![a, b];
            pts.extend(marks.iter().copied().filter(|&m| m > a && m < b));
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            let mut out = vec![pts[0]];
            for w in pts.windows(2) {
                let len = w[1] - w[0];
                let k = if max_width.is_finite() && max_width > 0.0 {
                    (len / max_width).ceil().max(1.0) as usize
                } else {
                    1
                };
                for i in 1..=k {
                    out.push(if i == k { w[1] } else { w[0] + len * i as f64 / k as f64 });
                }
            }
            out
        })
        .collect()
}

/// Integrates over several disjoint windows, each pre-partitioned.
pub fn integrate_windows_vec<F>(mut f: F, dim: usize, parts: &[Vec<f64>], tol: Tol) -> QuadResult
where
    F: FnMut(f64, &mut [f64]),
{
    let mut value = vec![0.0; dim];
    let mut error = 0.0;
    let mut converged = true;
    let mut intervals = 0;
    for p in parts {
        let r = integrate_vec(&mut f, dim, p, tol);
        for d in 0..dim {
            value[d] += r.value[d];
        }
        error += r.error;
        converged &= r.converged;
        intervals += r.intervals;
    }
    QuadResult { value, error, converged, intervals }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Cached 20-point Gauss–Legendre rule.
pub fn gl20() -> &'static (Vec<f64>, Vec<f64>) {
    static R: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    R.get_or_init(|| gauss_legendre(20))
}

/// Fixed-order composite Gauss–Legendre integral of `f` over `[a,b]` split
/// into `pieces` equal panels.
pub fn gl_composite<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, pieces: usize) -> f64 {
    let (x, w) = gl20();
    let h = (b - a) / pieces as f64;
    let mut s = 0.0;
    for p in 0..pieces {
        let lo = a + h * p as f64;
        let c = lo + 0.5 * h;
        let mut acc = 0.0;
        for (xi, wi) in x.iter().zip(w) {
            acc += wi * f(c + 0.5 * h * xi);
        }
        s += 0.5 * h * acc;
    }
    s
}
