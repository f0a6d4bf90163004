//! Axisymmetric star-shaped hypersurfaces r = φ(θ₁) in ℍⁿ_κ.
//!
//! The induced metric is (φ′² + ψ(φ)²)dθ₁² + ψ(φ)² sin²θ₁ σ_{n−2}, ψ(r) = sinh(κr)/κ.
//! Mean curvature enters only through the first variation of area: moving the
//! surface with normal speed u changes the area at rate ∫ H u dΣ.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperbolic::{lapse, lapse_derivative, unit_sphere_volume, warp, Dimension, ScaleKappa};
use crate::quadrature::{integrate, QuadTolerance};

type Support = dyn Fn(f64) -> [f64; 3] + Send + Sync;

/// r = φ(θ₁); the support closure returns (φ, φ′, φ″).
#[derive(Clone)]
pub struct StarSurface {
    n: Dimension,
    phi: Arc<Support>,
    label: String,
}

impl fmt::Debug for StarSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StarSurface").field("n", &self.n).field("label", &self.label).finish()
    }
}

impl StarSurface {
    pub fn new(n: Dimension, label: impl Into<String>, phi: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static) -> Self {
        Self {
            n,
            phi: Arc::new(phi),
            label: label.into(),
        }
    }

    /// Coordinate sphere of radius r.
    pub fn sphere(n: Dimension, r: f64) -> Self {
        Self::new(n, format!("sphere(r={r})"), move |_| [r, 0.0, 0.0])
    }

    /// φ = r(1 + ε Σ_k c_k cos(kθ₁)).
    pub fn perturbed_sphere(n: Dimension, r: f64, eps: f64, coefficients: Vec<f64>) -> Self {
        let label = format!("perturbed(r={r}, eps={eps}, c={coefficients:?})");
        Self::new(n, label, move |t| {
            let mut a = [0.0; 3];
            for (i, c) in coefficients.iter().enumerate() {
                let k = (i + 1) as f64;
                a[0] += c * (k * t).cos();
                a[1] -= c * k * (k * t).sin();
                a[2] -= c * k * k * (k * t).cos();
            }
            [r * (1.0 + eps * a[0]), r * eps * a[1], r * eps * a[2]]
        })
    }

    pub fn dimension(&self) -> Dimension {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn support(&self, theta: f64) -> [f64; 3] {
        (self.phi)(theta)
    }
}

/// Area, ∫HV dΣ and sampled mean curvature of a star-shaped surface.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarGeometry {
    pub area: f64,
    pub integral_hv: f64,
    /// (θ₁, H) pairs.
    pub mean_curvature: Vec<(f64, f64)>,
}

const AREA_TOL: QuadTolerance = QuadTolerance {
    abs: 1e-15,
    rel: 1e-13,
    max_subdivisions: 4000,
};

/// Area density in θ₁ for support values (φ, φ′).
fn area_density(n: Dimension, kappa: ScaleKappa, theta: f64, phi: f64, dphi: f64) -> f64 {
    let psi = warp(phi, kappa);
    (psi * theta.sin()).powi(n.get() as i32 - 2) * (dphi * dphi + psi * psi).sqrt()
}

impl StarSurface {
    fn check_positive(&self) -> Result<()> {
        for i in 0..=64 {
            let t = PI * i as f64 / 64.0;
            let p = self.support(t)[0];
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::InvalidParameter(format!("support function {p} at θ = {t} is not positive")));
            }
        }
        Ok(())
    }

    pub fn area(&self, kappa: ScaleKappa) -> Result<f64> {
        self.check_positive()?;
        let n = self.n;
        let e = integrate(
            |t| {
                let [p, dp, _] = self.support(t);
                area_density(n, kappa, t, p, dp)
            },
            0.0,
            PI,
            AREA_TOL,
        )?;
        Ok(unit_sphere_volume(n.get() - 1) * e.value)
    }

    /// Rate of change of area when the surface moves with normal speed u(θ, φ),
    /// realised as the radial graph variation δφ = u·√(ψ² + φ′²)/ψ.
    ///
    /// `speed` returns (u, ∂θ u) given θ, φ, φ′, φ″.
    fn area_variation(&self, kappa: ScaleKappa, speed: &dyn Fn(f64, [f64; 3]) -> (f64, f64), lo: f64, hi: f64) -> Result<f64> {
        let n = self.n;
        let k = kappa.get();
        let density_rate = |t: f64| {
            let s = self.support(t);
            let [p, dp, ddp] = s;
            let (u, du) = speed(t, s);
            let psi = warp(p, kappa);
            let dpsi = (k * p).cosh();
            let root = (psi * psi + dp * dp).sqrt();
            let q = root / psi;
            let dq = ((psi * dpsi * dp + dp * ddp) / root * psi - root * dpsi * dp) / (psi * psi);
            let delta = u * q;
            let ddelta = du * q + u * dq;
            // displacement of φ and φ′ both limited to 1e−4·φ
            let step = 1e-4 * p / delta.abs().max(ddelta.abs()).max(1.0);
            let central = |s: f64| {
                let plus = area_density(n, kappa, t, p + s * delta, dp + s * ddelta);
                let minus = area_density(n, kappa, t, p - s * delta, dp - s * ddelta);
                (plus - minus) / (2.0 * s)
            };
            // one Richardson step removes the O(step²) error
            (4.0 * central(0.5 * step) - central(step)) / 3.0
        };
        // central differences leave a rounding floor of about 1e−12 of the density
        let mid = 0.5 * (lo + hi);
        let [p, dp, _] = self.support(mid);
        let scale = area_density(n, kappa, mid.max(0.1).min(PI - 0.1), p, dp) * (hi - lo);
        let tol = QuadTolerance::new(1e-10 * scale, 1e-10);
        let e = integrate(density_rate, lo, hi, tol)?;
        Ok(unit_sphere_volume(n.get() - 1) * e.value)
    }

    /// ∫_Σ H V_κ dΣ from the first variation of area under normal speed V_κ.
    pub fn integral_hv(&self, kappa: ScaleKappa) -> Result<f64> {
        self.check_positive()?;
        let speed = |_t: f64, s: [f64; 3]| (lapse(s[0], kappa), lapse_derivative(s[0], kappa) * s[1]);
        self.area_variation(kappa, &speed, 0.0, PI)
    }

    /// Mean curvature at θ from a narrow Gaussian bump of normal speed.
    pub fn mean_curvature_at(&self, kappa: ScaleKappa, theta: f64) -> Result<f64> {
        const WIDTH: f64 = 0.02;
        let bump = move |t: f64| {
            let z = (t - theta) / WIDTH;
            let b = (-z * z).exp();
            (b, -2.0 * z / WIDTH * b)
        };
        let lo = (theta - 8.0 * WIDTH).max(0.0);
        let hi = (theta + 8.0 * WIDTH).min(PI);
        let speed = |t: f64, _s: [f64; 3]| bump(t);
        let rate = self.area_variation(kappa, &speed, lo, hi)?;
        let n = self.n;
        let weight = integrate(
            |t| {
                let [p, dp, _] = self.support(t);
                bump(t).0 * area_density(n, kappa, t, p, dp)
            },
            lo,
            hi,
            AREA_TOL,
        )?;
        Ok(rate / (unit_sphere_volume(n.get() - 1) * weight.value))
    }
}

/// Area, ∫HV dΣ, and H sampled at `samples` interior angles.
pub fn star_surface_geometry(s: &StarSurface, kappa: ScaleKappa, samples: usize) -> Result<StarGeometry> {
    let area = s.area(kappa)?;
    let integral_hv = s.integral_hv(kappa)?;
    let mean_curvature = (0..samples)
        .map(|i| {
            let t = 0.1 + (PI - 0.2) * (i as f64 + 0.5) / samples as f64;
            s.mean_curvature_at(kappa, t).map(|h| (t, h))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StarGeometry {
        area,
        integral_hv,
        mean_curvature,
    })
}
