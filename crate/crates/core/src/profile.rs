//! Radial graphing functions f(r) over ℍⁿ.
//!
//! Every family implements [`Profile`]; callers share them as
//! [`RadialProfile`] trait objects. The rescaling map f ↦ κ⁻¹(f(κ·) − h₀) is
//! itself a profile wrapping another one.

use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{radial_calculus_from, Dimension, RadialCalculus, ScaleKappa};
use crate::quadrature::bisect;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryKind {
    Entire,
    /// f is constant on the sphere r = r0 and |f′| → ∞ there.
    MinimalBoundary { r0: f64 },
}

/// A rotationally symmetric graphing function with derivative access.
pub trait Profile: Send + Sync + Debug {
    fn family(&self) -> &'static str;
    fn dimension(&self) -> Dimension;
    fn value(&self, r: f64) -> f64;
    fn d1(&self, r: f64) -> f64;
    fn d2(&self, r: f64) -> f64;
    fn boundary_kind(&self) -> BoundaryKind;
    /// Exponential decay rate of V²f′² at infinity.
    fn decay_rate(&self) -> f64;
    /// lim_{r→∞} f(r).
    fn h_max(&self) -> f64;

    fn domain_start(&self) -> f64 {
        match self.boundary_kind() {
            BoundaryKind::Entire => 0.0,
            BoundaryKind::MinimalBoundary { r0 } => r0,
        }
    }
}

pub type RadialProfile = Arc<dyn Profile>;

/// Fails unless r lies strictly inside the open domain (domain_start, ∞).
pub fn check_inside(f: &dyn Profile, r: f64) -> Result<()> {
    let start = f.domain_start();
    if r > start && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { r, start })
    }
}

/// Radial calculus of f at r with respect to b_κ.
pub fn radial_calculus(f: &dyn Profile, r: f64, kappa: ScaleKappa) -> Result<RadialCalculus> {
    check_inside(f, r)?;
    Ok(radial_calculus_from(f.d1(r), f.d2(r), r, kappa, f.dimension()))
}

/// Value of f on the boundary of its domain (the constant it takes on Ω).
pub fn boundary_value(f: &dyn Profile) -> f64 {
    f.value(f.domain_start())
}

/// The extension f̄: f outside Ω, its boundary constant inside.
pub fn extended_value(f: &dyn Profile, r: f64) -> f64 {
    if r <= f.domain_start() {
        boundary_value(f)
    } else {
        f.value(r)
    }
}

/// Whether f approaches its asymptotic height from below.
pub fn is_increasing(f: &dyn Profile) -> bool {
    f.h_max() > boundary_value(f)
}

/// Largest radius at which profiles are ever evaluated.
const MAX_RADIUS: f64 = 600.0;

/// Solves f(r) = h for a strictly monotone profile by bisection (width 1e−12).
pub fn invert(f: &dyn Profile, h: f64) -> Result<f64> {
    let start = f.domain_start();
    let f0 = boundary_value(f);
    let h_max = f.h_max();
    if h_max == f0 {
        // a constant profile has no regular values
        return Err(Error::Regularity { value: h, r: start, slope: f.d1(start) });
    }
    let increasing = h_max > f0;
    let inside = if increasing { h > f0 && h < h_max } else { h < f0 && h > h_max };
    if !inside {
        if (increasing && h >= h_max) || (!increasing && h <= h_max) {
            return Err(Error::AboveMaximum { h, h_max });
        }
        return Err(Error::InvalidParameter(format!(
            "height {h} lies outside the range ({f0}, {h_max}) of the profile"
        )));
    }
    let passed = |r: f64| if increasing { f.value(r) >= h } else { f.value(r) <= h };
    let mut hi = start + 1.0;
    while !passed(hi) {
        hi = start + 2.0 * (hi - start);
        if hi > MAX_RADIUS {
            return Err(Error::AboveMaximum { h, h_max });
        }
    }
    bisect(|r| f.value(r) - h, start, hi, 1e-12)
}

/// Checks that f′ keeps one sign on a grid of `[r_from, r_from + span]`.
pub fn check_monotone_from(f: &dyn Profile, r_from: f64, span: f64) -> Result<()> {
    let sign = f.d1(r_from).signum();
    for i in 1..=200 {
        let r = r_from + span * i as f64 / 200.0;
        let s = f.d1(r);
        if s != 0.0 && s.signum() != sign {
            return Err(Error::NonMonotone { r });
        }
    }
    Ok(())
}

/// f ≡ c.
#[derive(Debug, Clone)]
pub struct ConstantProfile {
    n: Dimension,
    c: f64,
}

impl ConstantProfile {
    pub fn new(n: Dimension, c: f64) -> Self {
        Self { n, c }
    }

    pub fn shared(n: Dimension, c: f64) -> RadialProfile {
        Arc::new(Self::new(n, c))
    }
}

impl Profile for ConstantProfile {
    fn family(&self) -> &'static str {
        "constant"
    }
    fn dimension(&self) -> Dimension {
        self.n
    }
    fn value(&self, _r: f64) -> f64 {
        self.c
    }
    fn d1(&self, _r: f64) -> f64 {
        0.0
    }
    fn d2(&self, _r: f64) -> f64 {
        0.0
    }
    fn boundary_kind(&self) -> BoundaryKind {
        BoundaryKind::Entire
    }
    fn decay_rate(&self) -> f64 {
        f64::INFINITY
    }
    fn h_max(&self) -> f64 {
        self.c
    }
}

/// f(r) = a·e^{−λr}·(1 + b·e^{−νr}·sin ωr).
///
/// With ν = 0 and λ > (n+2)/2 the mass vanishes; with λ = (n+2)/2 and ν > 0 the
/// mass is a²λ²/2^{n+3}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialProfile {
    pub n: Dimension,
    pub amplitude: f64,
    pub rate: f64,
    pub wiggle: f64,
    pub damping: f64,
    pub frequency: f64,
}

impl ExponentialProfile {
    pub fn new(n: Dimension, amplitude: f64, rate: f64) -> Self {
        Self {
            n,
            amplitude,
            rate,
            wiggle: 0.0,
            damping: 0.0,
            frequency: 0.0,
        }
    }

    pub fn with_wiggle(mut self, wiggle: f64, damping: f64, frequency: f64) -> Self {
        self.wiggle = wiggle;
        self.damping = damping;
        self.frequency = frequency;
        self
    }

    /// Rate λ = (n+2)/2 at which V⁴ sinh^{n−2} f′² tends to a nonzero constant.
    pub fn critical_rate(n: Dimension) -> f64 {
        (n.as_f64() + 2.0) / 2.0
    }

    /// Closed-form mass, when the limit exists.
    pub fn closed_form_mass(&self) -> Option<f64> {
        let lc = Self::critical_rate(self.n);
        if self.rate > lc {
            Some(0.0)
        } else if self.rate == lc && (self.wiggle == 0.0 || self.damping > 0.0) {
            let a = self.amplitude * self.rate;
            Some(0.5 * a * a / 2f64.powi(self.n.get() as i32 + 2))
        } else {
            None
        }
    }

    pub fn shared(self) -> RadialProfile {
        Arc::new(self)
    }

    fn modulation(&self, r: f64) -> (f64, f64, f64) {
        let (b, nu, w) = (self.wiggle, self.damping, self.frequency);
        if b == 0.0 {
            return (1.0, 0.0, 0.0);
        }
        let e = b * (-nu * r).exp();
        let (s, c) = (w * r).sin_cos();
        (1.0 + e * s, e * (w * c - nu * s), e * ((nu * nu - w * w) * s - 2.0 * nu * w * c))
    }
}

impl Profile for ExponentialProfile {
    fn family(&self) -> &'static str {
        "exponential"
    }
    fn dimension(&self) -> Dimension {
        self.n
    }
    fn value(&self, r: f64) -> f64 {
        let (s, _, _) = self.modulation(r);
        self.amplitude * (-self.rate * r).exp() * s
    }
    fn d1(&self, r: f64) -> f64 {
        let (s, s1, _) = self.modulation(r);
        self.amplitude * (-self.rate * r).exp() * (s1 - self.rate * s)
    }
    fn d2(&self, r: f64) -> f64 {
        let (s, s1, s2) = self.modulation(r);
        let l = self.rate;
        self.amplitude * (-l * r).exp() * (s2 - 2.0 * l * s1 + l * l * s)
    }
    fn boundary_kind(&self) -> BoundaryKind {
        BoundaryKind::Entire
    }
    fn decay_rate(&self) -> f64 {
        2.0 * self.rate - 2.0
    }
    fn h_max(&self) -> f64 {
        0.0
    }
}

/// f̃(r) = κ⁻¹(f(κr) − h₀).
#[derive(Debug, Clone)]
pub struct RescaledProfile {
    inner: RadialProfile,
    kappa: f64,
    h0: f64,
}

impl RescaledProfile {
    pub fn inner(&self) -> &RadialProfile {
        &self.inner
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn h0(&self) -> f64 {
        self.h0
    }
}

impl Profile for RescaledProfile {
    fn family(&self) -> &'static str {
        "rescaled"
    }
    fn dimension(&self) -> Dimension {
        self.inner.dimension()
    }
    fn value(&self, r: f64) -> f64 {
        (self.inner.value(self.kappa * r) - self.h0) / self.kappa
    }
    fn d1(&self, r: f64) -> f64 {
        self.inner.d1(self.kappa * r)
    }
    fn d2(&self, r: f64) -> f64 {
        self.kappa * self.inner.d2(self.kappa * r)
    }
    fn boundary_kind(&self) -> BoundaryKind {
        match self.inner.boundary_kind() {
            BoundaryKind::Entire => BoundaryKind::Entire,
            BoundaryKind::MinimalBoundary { r0 } => BoundaryKind::MinimalBoundary { r0: r0 / self.kappa },
        }
    }
    fn decay_rate(&self) -> f64 {
        self.inner.decay_rate() * self.kappa
    }
    fn h_max(&self) -> f64 {
        (self.inner.h_max() - self.h0) / self.kappa
    }
}

/// The rescaled profile f̃(r) = κ⁻¹(f(κr) − h₀).
pub fn rescale(f: &RadialProfile, h0: f64, kappa: ScaleKappa) -> RadialProfile {
    Arc::new(RescaledProfile {
        inner: Arc::clone(f),
        kappa: kappa.get(),
        h0,
    })
}

/// f − h, keeping the rest of the geometry.
pub fn shift(f: &RadialProfile, h: f64) -> RadialProfile {
    rescale(f, h, ScaleKappa::ONE)
}

/// One interpolation node of a sampled profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub r: f64,
    pub f: f64,
    pub f1: f64,
    pub f2: f64,
}

/// Piecewise quintic Hermite interpolant through (f, f′, f″) samples, which is
/// C² across nodes, continued past the last node by an exponential tail with
/// f′ ∝ e^{−(d/2+1)r}.
#[derive(Debug, Clone)]
pub struct SampledProfile {
    n: Dimension,
    boundary: BoundaryKind,
    samples: Vec<Sample>,
    decay_rate: f64,
}

impl SampledProfile {
    pub fn new(n: Dimension, samples: Vec<Sample>, boundary: BoundaryKind, decay_rate: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Document("at least two samples are required".into()));
        }
        if samples.windows(2).any(|w| !(w[1].r > w[0].r)) {
            return Err(Error::Document("sample radii must be strictly increasing".into()));
        }
        if samples.iter().any(|s| !(s.r.is_finite() && s.f.is_finite() && s.f1.is_finite() && s.f2.is_finite())) {
            return Err(Error::Document("samples must be finite".into()));
        }
        if !(decay_rate > 0.0) {
            return Err(Error::Document(format!("decay rate must be positive, got {decay_rate}")));
        }
        if let BoundaryKind::MinimalBoundary { r0 } = boundary {
            if r0 > samples[0].r {
                return Err(Error::Document("minimal boundary lies beyond the first sample".into()));
            }
        }
        Ok(Self {
            n,
            boundary,
            samples,
            decay_rate,
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    fn tail_rate(&self) -> f64 {
        self.decay_rate / 2.0 + 1.0
    }

    /// Polynomial coefficients in t ∈ [0, 1] for the panel starting at node i.
    fn panel(&self, i: usize) -> ([f64; 6], f64) {
        let (s0, s1) = (self.samples[i], self.samples[i + 1]);
        let h = s1.r - s0.r;
        let c0 = s0.f;
        let c1 = h * s0.f1;
        let c2 = 0.5 * h * h * s0.f2;
        let big_f = s1.f - (c0 + c1 + c2);
        let big_d = h * s1.f1 - (c1 + 2.0 * c2);
        let big_s = h * h * s1.f2 - 2.0 * c2;
        let c3 = 10.0 * big_f - 4.0 * big_d + 0.5 * big_s;
        let c4 = -15.0 * big_f + 7.0 * big_d - big_s;
        let c5 = 6.0 * big_f - 3.0 * big_d + 0.5 * big_s;
        ([c0, c1, c2, c3, c4, c5], h)
    }

    fn locate(&self, r: f64) -> Option<(usize, f64)> {
        let last = self.samples.len() - 1;
        if r >= self.samples[last].r {
            return None;
        }
        let i = match self.samples.binary_search_by(|s| s.r.total_cmp(&r)) {
            Ok(i) => i.min(last - 1),
            Err(0) => 0,
            Err(i) => i - 1,
        };
        let t = (r - self.samples[i].r) / (self.samples[i + 1].r - self.samples[i].r);
        Some((i, t))
    }

    fn eval(&self, r: f64, order: usize) -> f64 {
        match self.locate(r) {
            Some((i, t)) => {
                let (c, h) = self.panel(i);
                match order {
                    0 => c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5])))),
                    1 => (c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * (4.0 * c[4] + t * 5.0 * c[5])))) / h,
                    _ => (2.0 * c[2] + t * (6.0 * c[3] + t * (12.0 * c[4] + t * 20.0 * c[5]))) / (h * h),
                }
            }
            None => {
                let last = self.samples[self.samples.len() - 1];
                let mu = self.tail_rate();
                let e = (-mu * (r - last.r)).exp();
                match order {
                    0 => last.f + last.f1 * (1.0 - e) / mu,
                    1 => last.f1 * e,
                    _ => -mu * last.f1 * e,
                }
            }
        }
    }
}

impl Profile for SampledProfile {
    fn family(&self) -> &'static str {
        "sampled"
    }
    fn dimension(&self) -> Dimension {
        self.n
    }
    fn value(&self, r: f64) -> f64 {
        self.eval(r, 0)
    }
    fn d1(&self, r: f64) -> f64 {
        self.eval(r, 1)
    }
    fn d2(&self, r: f64) -> f64 {
        self.eval(r, 2)
    }
    fn boundary_kind(&self) -> BoundaryKind {
        self.boundary
    }
    fn domain_start(&self) -> f64 {
        match self.boundary {
            BoundaryKind::Entire => self.samples[0].r,
            BoundaryKind::MinimalBoundary { r0 } => r0,
        }
    }
    fn decay_rate(&self) -> f64 {
        self.decay_rate
    }
    fn h_max(&self) -> f64 {
        let last = self.samples[self.samples.len() - 1];
        last.f + last.f1 / self.tail_rate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n3() -> Dimension {
        Dimension::new(3).unwrap()
    }

    fn fd(f: impl Fn(f64) -> f64, r: f64) -> f64 {
        let h = 1e-5;
        (f(r + h) - f(r - h)) / (2.0 * h)
    }

    #[test]
    fn exponential_derivatives_match_differences() {
        let p = ExponentialProfile::new(n3(), 0.3, 2.7).with_wiggle(0.4, 0.6, 1.9);
        for &r in &[0.2, 1.0, 3.3] {
            assert!((fd(|x| p.value(x), r) - p.d1(r)).abs() < 1e-9);
            assert!((fd(|x| p.d1(x), r) - p.d2(r)).abs() < 1e-9);
        }
    }

    #[test]
    fn rescale_identity_and_chain_rule() {
        let base = ExponentialProfile::new(n3(), 0.3, 2.7).with_wiggle(0.4, 0.0, 1.9).shared();
        let same = rescale(&base, 0.0, ScaleKappa::ONE);
        for &r in &[0.3, 1.1, 2.0] {
            assert_eq!(same.value(r), base.value(r));
            assert_eq!(same.d1(r), base.d1(r));
            assert_eq!(same.d2(r), base.d2(r));
        }
        let k = 2.0;
        let scaled = rescale(&base, 0.1, ScaleKappa::new(k).unwrap());
        for &r in &[0.3, 1.1] {
            assert_eq!(scaled.d1(r), base.d1(k * r));
            assert!((scaled.value(r) - (base.value(k * r) - 0.1) / k).abs() < 1e-16);
            assert!((fd(|x| scaled.d1(x), r) - scaled.d2(r)).abs() < 1e-8);
        }
    }

    #[test]
    fn invert_both_directions() {
        let dec = ExponentialProfile::new(n3(), 0.01, 3.0).shared();
        let r = invert(dec.as_ref(), dec.value(2.0)).unwrap();
        assert!((r - 2.0).abs() < 1e-10);
        let inc = ExponentialProfile::new(n3(), -0.5, 2.5).shared();
        let r = invert(inc.as_ref(), inc.value(0.75)).unwrap();
        assert!((r - 0.75).abs() < 1e-10);
        assert!(matches!(invert(inc.as_ref(), 0.0), Err(Error::AboveMaximum { .. })));
    }

    #[test]
    fn quintic_hermite_reproduces_quintic() {
        let q = |x: f64| 1.0 + x - 0.5 * x * x + 0.2 * x.powi(3) - 0.03 * x.powi(4) + 0.004 * x.powi(5);
        let q1 = |x: f64| 1.0 - x + 0.6 * x * x - 0.12 * x.powi(3) + 0.02 * x.powi(4);
        let q2 = |x: f64| -1.0 + 1.2 * x - 0.36 * x * x + 0.08 * x.powi(3);
        let samples: Vec<Sample> = [0.0, 0.7, 1.5, 3.0]
            .iter()
            .map(|&r| Sample { r, f: q(r), f1: q1(r), f2: q2(r) })
            .collect();
        let p = SampledProfile::new(n3(), samples, BoundaryKind::Entire, 3.0).unwrap();
        for &r in &[0.1, 0.69, 1.2, 2.9] {
            assert!((p.value(r) - q(r)).abs() < 1e-12);
            assert!((p.d1(r) - q1(r)).abs() < 1e-11);
            assert!((p.d2(r) - q2(r)).abs() < 1e-10);
        }
    }

    #[test]
    fn sampled_rejects_bad_input() {
        let s = Sample { r: 1.0, f: 0.0, f1: 0.0, f2: 0.0 };
        assert!(SampledProfile::new(n3(), vec![s], BoundaryKind::Entire, 3.0).is_err());
        assert!(SampledProfile::new(n3(), vec![s, s], BoundaryKind::Entire, 3.0).is_err());
    }

    #[test]
    fn domain_checks() {
        let c = ConstantProfile::shared(n3(), 1.0);
        assert!(check_inside(c.as_ref(), 0.0).is_err());
        assert!(radial_calculus(c.as_ref(), 0.5, ScaleKappa::ONE).is_ok());
    }
}
