//! The AdS-Schwarzschild family realized as graphs over ℍⁿ.
//!
//! In ρ = sinh r the graphing function is
//! f_m(ρ) = ∫_{ρ₀}^{ρ} (1+s²)^{-1/2} (1/P(s) − 1/(1+s²))^{1/2} ds with
//! P(s) = 1 + s² − 2m s^{2−n}, whose largest root is the horizon ρ₀.
//! Near ρ₀ the integrand has a square-root singularity, removed by the
//! substitution u = √(ρ − ρ₀).

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperbolic::Dimension;
use crate::profile::{BoundaryKind, Profile, RadialProfile};
use crate::quadrature::{gk21, integrate, quad_improper, QuadTolerance};

/// Parameters (n, m) of the family together with the horizon ρ₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdsSchwarzschild {
    pub n: Dimension,
    pub m: f64,
    pub rho0: f64,
}

impl AdsSchwarzschild {
    pub fn new(n: Dimension, m: f64) -> Result<Self> {
        let rho0 = ads_horizon_radius(n, m)?;
        Ok(Self { n, m, rho0 })
    }

    /// 1 + ρ² − 2mρ^{2−n}.
    pub fn horizon_polynomial(&self, rho: f64) -> f64 {
        horizon_polynomial(self.n, self.m, rho)
    }

    pub fn r0(&self) -> f64 {
        self.rho0.asinh()
    }
}

fn horizon_polynomial(n: Dimension, m: f64, rho: f64) -> f64 {
    1.0 + rho * rho - 2.0 * m * rho.powi(2 - n.get() as i32)
}

/// Largest positive root of 1 + ρ² − 2m/ρ^{n−2} = 0.
///
/// The polynomial is strictly increasing on (0, ∞), so the root is unique; it is
/// bracketed, bisected, then polished with Newton steps.
pub fn ads_horizon_radius(n: Dimension, m: f64) -> Result<f64> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParameter(format!("mass must be positive, got {m}")));
    }
    let p = |rho: f64| horizon_polynomial(n, m, rho);
    let dp = |rho: f64| 2.0 * rho + 2.0 * m * (n.as_f64() - 2.0) * rho.powi(1 - n.get() as i32);
    // P((2m)^{1/(n−2)}) = ρ² > 0 and P → −∞ at 0⁺.
    let hi = (2.0 * m).powf(1.0 / (n.as_f64() - 2.0)).max(1e-300);
    let mut rho = crate::quadrature::bisect(p, 0.0f64.max(hi * 1e-12), hi, hi * 1e-15)?;
    for _ in 0..4 {
        let step = p(rho) / dp(rho);
        if !step.is_finite() {
            break;
        }
        rho -= step;
    }
    Ok(rho)
}

/// Precomputed cumulative integrals for f_m.
#[derive(Debug, Clone)]
pub struct AdsProfile {
    params: AdsSchwarzschild,
    r0: f64,
    u_step: f64,
    u_split: f64,
    inner_cumulative: Vec<f64>,
    r_split: f64,
    r_step: f64,
    r_far: f64,
    outer_cumulative: Vec<f64>,
    h_max: f64,
}

const INNER_PANELS: usize = 64;
const OUTER_STEP: f64 = 0.25;
const FAR_LIMIT: f64 = 300.0;

impl AdsProfile {
    pub fn new(params: AdsSchwarzschild) -> Result<Self> {
        let r0 = params.r0();
        let u_split = (params.rho0 + 1.0).sqrt();
        let u_step = u_split / INNER_PANELS as f64;
        let mut me = Self {
            params,
            r0,
            u_step,
            u_split,
            inner_cumulative: Vec::with_capacity(INNER_PANELS + 1),
            r_split: (params.rho0 + u_split * u_split).asinh(),
            r_step: OUTER_STEP,
            r_far: 0.0,
            outer_cumulative: Vec::new(),
            h_max: 0.0,
        };
        let tol = QuadTolerance::new(1e-16, 1e-15);
        let mut acc = 0.0;
        me.inner_cumulative.push(0.0);
        for k in 0..INNER_PANELS {
            let a = k as f64 * u_step;
            acc += integrate(|u| me.u_integrand(u), a, a + u_step, tol)?.value;
            me.inner_cumulative.push(acc);
        }
        // f′ decays like e^{−(1+n/2)r}; stop the table once it is negligible.
        let mu = 1.0 + params.n.as_f64() / 2.0;
        let far = me.r_split + (40.0 + (2.0 * params.m).ln().max(0.0)) / mu;
        let panels = ((far - me.r_split) / OUTER_STEP).ceil() as usize;
        me.r_far = me.r_split + panels as f64 * OUTER_STEP;
        me.outer_cumulative.push(acc);
        for j in 0..panels {
            let a = me.r_split + j as f64 * OUTER_STEP;
            acc += integrate(|r| me.slope(r), a, a + OUTER_STEP, tol)?.value;
            me.outer_cumulative.push(acc);
        }
        let tail = quad_improper(|r| me.slope(r), me.r_far, mu, QuadTolerance::new(1e-18, 1e-16))?;
        me.h_max = acc + tail.value;
        Ok(me)
    }

    pub fn shared(n: Dimension, m: f64) -> Result<RadialProfile> {
        Ok(Arc::new(Self::new(AdsSchwarzschild::new(n, m)?)?))
    }

    pub fn params(&self) -> AdsSchwarzschild {
        self.params
    }

    /// P(ρ₀ + δ)/δ without cancellation.
    fn reduced_polynomial(&self, delta: f64) -> f64 {
        let AdsSchwarzschild { n, m, rho0 } = self.params;
        let k = n.as_f64() - 2.0;
        let q = if delta == 0.0 {
            k / rho0
        } else {
            -(-k * (delta / rho0).ln_1p()).exp_m1() / delta
        };
        2.0 * rho0 + delta + 2.0 * m * rho0.powf(-k) * q
    }

    /// ρ − ρ₀ from r, accurate when r is close to r₀.
    fn delta_rho(&self, r: f64) -> f64 {
        2.0 * (0.5 * (r + self.r0)).cosh() * (0.5 * (r - self.r0)).sinh()
    }

    /// Integrand of f_m in the variable u = √(ρ − ρ₀).
    fn u_integrand(&self, u: f64) -> f64 {
        let AdsSchwarzschild { n, m, rho0 } = self.params;
        let delta = u * u;
        let rho = rho0 + delta;
        let eps = 2.0 * m * rho.powi(2 - n.get() as i32);
        let a = 1.0 + rho * rho;
        2.0 * eps.sqrt() / (a * self.reduced_polynomial(delta).sqrt())
    }

    /// df/dr, with ρ = sinh r.
    fn slope(&self, r: f64) -> f64 {
        if r <= self.r0 {
            return f64::INFINITY;
        }
        if r > FAR_LIMIT {
            return 0.0;
        }
        let AdsSchwarzschild { n, m, .. } = self.params;
        let delta = self.delta_rho(r);
        let rho = self.params.rho0 + delta;
        let eps = 2.0 * m * rho.powi(2 - n.get() as i32);
        let a = 1.0 + rho * rho;
        let p = delta * self.reduced_polynomial(delta);
        (eps / (a * p)).sqrt()
    }

    fn curvature(&self, r: f64) -> f64 {
        if r > FAR_LIMIT {
            return 0.0;
        }
        let AdsSchwarzschild { n, m, .. } = self.params;
        let delta = self.delta_rho(r);
        let rho = self.params.rho0 + delta;
        let a = 1.0 + rho * rho;
        let nf = n.as_f64();
        let p = delta * self.reduced_polynomial(delta);
        let dp = 2.0 * rho + 2.0 * m * (nf - 2.0) * rho.powi(1 - n.get() as i32);
        let dlog = 0.5 * ((2.0 - nf) / rho - 2.0 * rho / a - dp / p);
        self.slope(r) * a.sqrt() * dlog
    }
}

impl Profile for AdsProfile {
    fn family(&self) -> &'static str {
        "ads"
    }
    fn dimension(&self) -> Dimension {
        self.params.n
    }
    fn value(&self, r: f64) -> f64 {
        if r <= self.r0 {
            return 0.0;
        }
        if r >= self.r_far {
            let mu = 1.0 + self.params.n.as_f64() / 2.0;
            return self.h_max - self.slope(r) / mu;
        }
        let delta = self.delta_rho(r);
        let u = delta.sqrt();
        if u < self.u_split {
            let k = ((u / self.u_step) as usize).min(INNER_PANELS - 1);
            let a = k as f64 * self.u_step;
            self.inner_cumulative[k] + gk21(&|x| self.u_integrand(x), a, u).0
        } else {
            let j = (((r - self.r_split) / self.r_step) as usize).min(self.outer_cumulative.len() - 2);
            let a = self.r_split + j as f64 * self.r_step;
            self.outer_cumulative[j] + gk21(&|x| self.slope(x), a, r).0
        }
    }
    fn d1(&self, r: f64) -> f64 {
        self.slope(r)
    }
    fn d2(&self, r: f64) -> f64 {
        self.curvature(r)
    }
    fn boundary_kind(&self) -> BoundaryKind {
        BoundaryKind::MinimalBoundary { r0: self.r0 }
    }
    fn decay_rate(&self) -> f64 {
        self.params.n.as_f64()
    }
    fn h_max(&self) -> f64 {
        self.h_max
    }
}
