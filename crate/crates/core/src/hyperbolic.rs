//! The model space ℍⁿ_κ = (ℝⁿ, dr² + κ⁻² sinh²(κr) σ) in geodesic polar
//! coordinates, its lapse `cosh(κr)`, and calculus of radial functions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimension `n ≥ 3` of the base hyperbolic space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("dimension must be at least 3, got {n}")));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// ω_{n−1}, the area of the unit round sphere 𝕊^{n−1}.
    pub fn omega(self) -> f64 {
        unit_sphere_volume(self.0)
    }

    /// c_n = 2(n−1)ω_{n−1}.
    pub fn c_n(self) -> f64 {
        2.0 * (self.as_f64() - 1.0) * self.omega()
    }
}

impl TryFrom<usize> for Dimension {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<Dimension> for usize {
    fn from(d: Dimension) -> usize {
        d.0
    }
}

/// Inverse radius κ > 0 of ℍⁿ_κ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ScaleKappa(f64);

impl ScaleKappa {
    pub const ONE: ScaleKappa = ScaleKappa(1.0);

    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!("kappa must be positive and finite, got {kappa}")));
        }
        Ok(Self(kappa))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for ScaleKappa {
    type Error = Error;
    fn try_from(k: f64) -> Result<Self> {
        Self::new(k)
    }
}

impl From<ScaleKappa> for f64 {
    fn from(k: ScaleKappa) -> f64 {
        k.0
    }
}

/// One element of the basis {cosh r, xⁱ sinh r} of static potentials, with its
/// Lorentzian sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LapseBasis {
    index: usize,
}

impl LapseBasis {
    pub fn new(index: usize, n: Dimension) -> Result<Self> {
        if index > n.get() {
            return Err(Error::InvalidParameter(format!(
                "lapse index {index} exceeds dimension {}",
                n.get()
            )));
        }
        Ok(Self { index })
    }

    pub fn time_like() -> Self {
        Self { index: 0 }
    }

    pub fn index(self) -> usize {
        self.index
    }

    /// η(V, V): +1 for V_(0), −1 for the spatial V_(i).
    pub fn signature(self) -> i8 {
        if self.index == 0 {
            1
        } else {
            -1
        }
    }
}

/// First and second derivatives of a radial function, expressed in ℍⁿ_κ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialCalculus {
    pub grad_norm: f64,
    pub laplacian: f64,
    pub hess_rr: f64,
    /// Eigenvalue of the Hessian on each of the n−1 tangential directions.
    pub hess_tan: f64,
}

/// κ·coth(κr), switching to its Laurent series where the direct form cancels.
pub fn kappa_coth(kappa: f64, r: f64) -> f64 {
    let x = kappa * r;
    if x.abs() < 1e-4 {
        kappa * (1.0 / x + x / 3.0)
    } else {
        kappa / x.tanh()
    }
}

/// V_κ(r) = cosh(κr).
pub fn lapse(r: f64, kappa: ScaleKappa) -> f64 {
    (kappa.get() * r).cosh()
}

/// dV_κ/dr = κ sinh(κr).
pub fn lapse_derivative(r: f64, kappa: ScaleKappa) -> f64 {
    kappa.get() * (kappa.get() * r).sinh()
}

/// Warping factor ψ(r) = sinh(κr)/κ.
pub fn warp(r: f64, kappa: ScaleKappa) -> f64 {
    let k = kappa.get();
    (k * r).sinh() / k
}

/// ω_{n−1} = 2π^{n/2}/Γ(n/2), area of the unit sphere in ℝⁿ.
pub fn unit_sphere_volume(n: usize) -> f64 {
    // Γ(n/2) via the half-integer recurrence; exact up to rounding for all n.
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => unit_sphere_volume(n - 2) * 2.0 * PI / (n as f64 - 2.0),
    }
}

/// Area of the coordinate sphere of radius r: ω_{n−1}(sinh(κr)/κ)^{n−1}.
pub fn sphere_area(r: f64, kappa: ScaleKappa, n: Dimension) -> f64 {
    n.omega() * warp(r, kappa).powi(n.get() as i32 - 1)
}

/// ℍⁿ_κ-volume of the geodesic ball of radius r.
pub fn ball_volume(r: f64, kappa: ScaleKappa, n: Dimension) -> Result<f64> {
    if r <= 0.0 {
        return Ok(0.0);
    }
    crate::quadrature::integrate(
        |t| sphere_area(t, kappa, n),
        0.0,
        r,
        crate::quadrature::QuadTolerance::new(1e-14, 1e-13),
    )
    .map(|e| e.value)
}

/// Log of cosh, stable for large arguments.
pub fn ln_cosh(x: f64) -> f64 {
    let x = x.abs();
    x + (-2.0 * x).exp().ln_1p() - std::f64::consts::LN_2
}

/// Log of sinh for x > 0, stable for large arguments.
pub fn ln_sinh(x: f64) -> f64 {
    if x < 1.0 {
        x.sinh().ln()
    } else {
        x + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2
    }
}

/// Gradient, Laplacian and Hessian of a radial function given f′(r) and f″(r).
///
/// Δf = f″ + (n−1) κ coth(κr) f′, computed from the Hessian components.
pub fn radial_calculus_from(f1: f64, f2: f64, r: f64, kappa: ScaleKappa, n: Dimension) -> RadialCalculus {
    let hess_tan = kappa_coth(kappa.get(), r) * f1;
    RadialCalculus {
        grad_norm: f1.abs(),
        laplacian: f2 + (n.as_f64() - 1.0) * hess_tan,
        hess_rr: f2,
        hess_tan,
    }
}
