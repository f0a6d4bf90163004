//! Adaptive Gauss–Kronrod quadrature, improper integrals with an exponential
//! tail bound, limit extrapolation along a radius ladder, and bracketing root
//! finders.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod abscissae of the 21-point rule; odd indices are the 10-point Gauss nodes.
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
    0.123_491_976_262_065_851_077_208_980_324_650,
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

/// Absolute and relative accuracy targets plus a subdivision budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadTolerance {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-8,
            max_subdivisions: 4000,
        }
    }
}

impl QuadTolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            ..Self::default()
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadEstimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Single 21-point Gauss–Kronrod panel. Returns (kronrod value, error estimate).
pub fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod integration over a finite interval.
///
/// The panel with the largest error estimate is bisected until the summed
/// error drops below `max(abs, rel·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: QuadTolerance) -> Result<QuadEstimate> {
    if a == b {
        return Ok(QuadEstimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite interval [{a}, {b}]")));
    }
    let (value, error) = gk21(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut evaluations = 21;

    while total_err > tol.target(total) {
        if heap.len() >= tol.max_subdivisions {
            return Err(Error::NonConvergence(format!(
                "[{a}, {b}]: error {total_err:e} after {} panels",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // panel cannot be split further in floating point
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk21(&f, worst.a, mid);
        let (v2, e2) = gk21(&f, mid, worst.b);
        evaluations += 42;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
        if !total.is_finite() {
            return Err(Error::NonConvergence(format!("non-finite integrand on [{a}, {b}]")));
        }
    }

    // Re-sum in a fixed order so the result does not depend on heap layout.
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).sum();
    let error = panels.iter().map(|p| p.error).sum();
    Ok(QuadEstimate {
        value,
        error,
        evaluations,
    })
}

/// Integrates over consecutive intervals split at `breaks` (sorted, inside `[a, b]`).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: QuadTolerance,
) -> Result<QuadEstimate> {
    let mut points = vec![a];
    points.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    points.push(b);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let pieces = (points.len() - 1).max(1) as f64;
    let piece_tol = QuadTolerance {
        abs: tol.abs / pieces,
        ..tol
    };
    let mut out = QuadEstimate {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
    for w in points.windows(2) {
        let est = integrate(&f, w[0], w[1], piece_tol)?;
        out.value += est.value;
        out.error += est.error;
        out.evaluations += est.evaluations;
    }
    Ok(out)
}

/// Integral of `g` over `[a, ∞)` for an integrand decaying like `e^{-c r}` with
/// `c = decay_hint`.
///
/// The finite part `[a, R]` is integrated adaptively; `R` doubles until the
/// analytic tail bound `|g(R)| / c` is below the absolute tolerance.
pub fn quad_improper<F: Fn(f64) -> f64>(g: F, a: f64, decay_hint: f64, tol: QuadTolerance) -> Result<QuadEstimate> {
    if !(decay_hint > 0.0) {
        return Err(Error::InvalidParameter(format!("decay hint must be positive, got {decay_hint}")));
    }
    const MAX_DOUBLINGS: usize = 16;
    let mut window = 10.0 / decay_hint;
    let mut left = a;
    let mut right = a + window;
    let mut out = QuadEstimate {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
    for _ in 0..MAX_DOUBLINGS {
        let piece = integrate(&g, left, right, QuadTolerance { abs: tol.abs * 0.25, ..tol })?;
        out.value += piece.value;
        out.error += piece.error;
        out.evaluations += piece.evaluations;
        let edge = g(right).abs();
        if !edge.is_finite() {
            return Err(Error::NonConvergence(format!("integrand not finite at r = {right}")));
        }
        let tail = edge / decay_hint;
        if tail <= tol.target(out.value) {
            out.error += tail;
            return Ok(out);
        }
        left = right;
        window *= 2.0;
        right = left + window;
    }
    Err(Error::NonConvergence(format!(
        "tail bound on [{a}, ∞) not met with decay hint {decay_hint}"
    )))
}

/// Result of extrapolating a sequence of rung values to its limit.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    pub value: f64,
    pub error: f64,
    pub rungs: Vec<(f64, f64)>,
}

/// Geometric radius ladder `r_k = start·2^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ladder {
    pub start: f64,
    pub rungs: usize,
}

impl Default for Ladder {
    fn default() -> Self {
        Self { start: 5.0, rungs: 6 }
    }
}

impl Ladder {
    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.rungs).map(move |k| self.start * 2f64.powi(k as i32))
    }
}

fn aitken(a0: f64, a1: f64, a2: f64) -> Option<f64> {
    let d1 = a1 - a0;
    let d2 = a2 - a1;
    let denom = d2 - d1;
    if denom == 0.0 || d1 == 0.0 || d2 == 0.0 {
        return None;
    }
    let ratio = d2 / d1;
    // Only trust the extrapolant when the differences shrink geometrically.
    if !(0.0..0.9).contains(&ratio) {
        return None;
    }
    let value = a2 - d2 * d2 / denom;
    value.is_finite().then_some(value)
}

/// Evaluates `value_at` along the ladder, extrapolating with Aitken's Δ² and
/// stopping once consecutive extrapolants agree to `max(abs, rel·|value|)`.
///
/// Rungs whose value is not finite terminate the ladder; the estimate then
/// rests on the rungs already computed.
pub fn ladder_limit<F: FnMut(f64) -> f64>(mut value_at: F, ladder: Ladder, abs: f64, rel: f64) -> Result<LimitEstimate> {
    let mut rungs: Vec<(f64, f64)> = Vec::with_capacity(ladder.rungs);
    let mut extrapolants: Vec<f64> = Vec::new();
    for r in ladder.radii() {
        let v = value_at(r);
        if !v.is_finite() {
            break;
        }
        rungs.push((r, v));
        let k = rungs.len();
        let current = if k >= 3 {
            aitken(rungs[k - 3].1, rungs[k - 2].1, rungs[k - 1].1).unwrap_or(v)
        } else {
            v
        };
        extrapolants.push(current);
        if extrapolants.len() >= 2 {
            let prev = extrapolants[extrapolants.len() - 2];
            let diff = (current - prev).abs();
            if diff <= abs.max(rel * current.abs()) {
                return Ok(LimitEstimate {
                    value: current,
                    error: diff,
                    rungs,
                });
            }
        }
    }
    match extrapolants.as_slice() {
        [.., prev, last] => Err(Error::LimitNotConverged {
            last: *last,
            previous: *prev,
            tol: abs.max(rel * last.abs()),
        }),
        _ => Err(Error::NonConvergence("fewer than two finite ladder rungs".into())),
    }
}

/// Bisection for a sign change of `g` on `[lo, hi]`, to absolute width `xtol`.
pub fn bisect<F: Fn(f64) -> f64>(g: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64> {
    let mut glo = g(lo);
    let ghi = g(hi);
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo.signum() == ghi.signum() || glo.is_nan() || ghi.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "no sign change on [{lo}, {hi}]: g = {glo}, {ghi}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact_on_one_panel() {
        let (v, _) = gk21(&|x: f64| x.powi(8) - 3.0 * x.powi(3), 0.0, 2.0);
        let exact = 2f64.powi(9) / 9.0 - 3.0 * 16.0 / 4.0;
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_kink() {
        let est = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, QuadTolerance::new(1e-12, 1e-12)).unwrap();
        let exact = 0.5 * 0.09 + 0.5 * 0.49;
        assert!((est.value - exact).abs() < 1e-11);
    }

    #[test]
    fn improper_exponential() {
        let est = quad_improper(|r: f64| (-r).exp(), 0.0, 1.0, QuadTolerance::new(1e-12, 1e-12)).unwrap();
        assert!((est.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn improper_sinh_weight() {
        // ∫₀^∞ e^{-2r} sinh r dr = ½(1 - 1/3) = 1/3
        let est = quad_improper(|r: f64| (-2.0 * r).exp() * r.sinh(), 0.0, 1.0, QuadTolerance::new(1e-12, 1e-12))
            .unwrap();
        assert!((est.value - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn improper_gamma_two() {
        let est = quad_improper(|r: f64| r * (-r).exp(), 0.0, 0.5, QuadTolerance::new(1e-12, 1e-12)).unwrap();
        assert!((est.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn improper_rejects_bad_hint() {
        assert!(quad_improper(|r: f64| (-r).exp(), 0.0, 0.0, QuadTolerance::default()).is_err());
    }

    #[test]
    fn improper_reports_slow_decay() {
        // 1/(1+r) is not integrable; the tail bound never closes.
        let res = quad_improper(|r: f64| 1.0 / (1.0 + r), 0.0, 1.0, QuadTolerance::new(1e-10, 0.0));
        assert!(matches!(res, Err(Error::NonConvergence(_))));
    }

    #[test]
    fn ladder_extrapolates_geometric_sequence() {
        let est = ladder_limit(|r| 2.0 + (-r).exp(), Ladder { start: 1.0, rungs: 8 }, 1e-12, 1e-12).unwrap();
        assert!((est.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ladder_reports_divergence() {
        let res = ladder_limit(|r| r, Ladder::default(), 1e-10, 1e-10);
        assert!(matches!(res, Err(Error::LimitNotConverged { .. })));
    }

    #[test]
    fn bisect_finds_root() {
        let x = bisect(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((x - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(|x: f64| x * x + 1.0, 0.0, 2.0, 1e-14).is_err());
    }
}
