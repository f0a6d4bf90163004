//! Level-set volumes and the growth estimates leading to the height bound.
//!
//! For a monotone radial profile the level set {f = h} is the coordinate sphere
//! of radius f⁻¹(h), so 𝒱_κ(h) = ω_{n−1}ψ(f⁻¹(h))^{n−1}.

use serde::Serialize;

use crate::curvature::level_set_mean_curvature;
use crate::error::{Error, Result};
use crate::hyperbolic::{kappa_coth, lapse, sphere_area, Dimension, ScaleKappa};
use crate::mass::{hypothesis_grid, mass_boundary_limit, regular_radius};
use crate::ode::{default_cap, ode_comparison};
use crate::profile::{boundary_value, check_monotone_from, invert, is_increasing, rescale, Profile, RadialProfile};
use crate::quadrature::{ladder_limit, Ladder};
use crate::star::{star_surface_geometry, StarSurface};

/// Masses below this are treated as zero.
pub const ZERO_MASS: f64 = 1e-12;

/// h ↦ 𝒱_κ(h) for a monotone radial profile.
#[derive(Debug, Clone)]
pub struct LevelSetVolumeFn {
    pub f: RadialProfile,
    pub kappa: ScaleKappa,
}

impl LevelSetVolumeFn {
    pub fn new(f: RadialProfile, kappa: ScaleKappa) -> Self {
        Self { f, kappa }
    }

    pub fn eval(&self, h: f64) -> Result<f64> {
        volume_function(self.f.as_ref(), self.kappa, h)
    }
}

/// 𝒱_κ(h) = |{f = h}|; below the boundary value it is |∂Ω| (empty for entire profiles).
pub fn volume_function(f: &dyn Profile, kappa: ScaleKappa, h: f64) -> Result<f64> {
    let n = f.dimension();
    let f0 = boundary_value(f);
    let below = if is_increasing(f) { h <= f0 } else { h >= f0 };
    if below {
        let r0 = f.domain_start();
        return Ok(if r0 > 0.0 { sphere_area(r0, kappa, n) } else { 0.0 });
    }
    let r = invert(f, h)?;
    check_monotone_from(f, f.domain_start().max(r * 0.5), (r * 0.5).max(1e-6) + r * 0.5)?;
    Ok(sphere_area(r, kappa, n))
}

/// h₀ from the mass threshold, with the radius r* where 𝒱₁ reaches it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct H0Report {
    pub h0: f64,
    pub r_star: f64,
    pub threshold: f64,
    pub mass: f64,
    /// Set when 𝒱₁ already exceeds the threshold on ∂Ω, so h₀ is the boundary value.
    pub below_boundary: bool,
}

/// max(2βm^{(n−1)/(n−2)}ω_{n−1}, 2βω_{n−1}m).
pub fn h0_threshold(n: Dimension, beta: f64, m: f64) -> f64 {
    let nf = n.as_f64();
    let omega = n.omega();
    (2.0 * beta * m.powf((nf - 1.0) / (nf - 2.0)) * omega).max(2.0 * beta * omega * m)
}

pub fn compute_h0(f: &dyn Profile, beta: f64) -> Result<H0Report> {
    if !(beta > 1.0) {
        return Err(Error::InvalidParameter(format!("beta must exceed 1, got {beta}")));
    }
    let n = f.dimension();
    let mass = mass_boundary_limit(f, ScaleKappa::ONE)?.value;
    if !(mass > ZERO_MASS) {
        return Err(Error::ZeroMass(format!("h0 needs positive mass, got {mass:e}")));
    }
    let threshold = h0_threshold(n, beta, mass);
    // 𝒱₁ is increasing in r: invert ω sinh^{n−1}r = threshold
    let r_star = ((threshold / n.omega()).powf(1.0 / (n.as_f64() - 1.0))).asinh();
    let start = f.domain_start();
    if r_star <= start {
        return Ok(H0Report {
            h0: boundary_value(f),
            r_star,
            threshold,
            mass,
            below_boundary: true,
        });
    }
    Ok(H0Report {
        h0: f.value(r_star),
        r_star,
        threshold,
        mass,
        below_boundary: false,
    })
}

/// lim f along the r-ladder, each rung corrected by the exponential tail f′/μ.
pub fn sup_f(f: &dyn Profile, kappa: ScaleKappa) -> Result<f64> {
    let mu = f.decay_rate() / 2.0 + 1.0;
    let ladder = Ladder {
        start: 5.0 / kappa.get(),
        rungs: 6,
    };
    let est = ladder_limit(|r| f.value(r) + f.d1(r) / mu, ladder, 1e-14, 1e-12)?;
    Ok(est.value)
}

/// Coordinate sphere or star-shaped surface in the Minkowski-like inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinkowskiReport {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub min_mean_curvature: f64,
}

/// (1/c_n)∫HV dΣ against 𝒱/(2ω_{n−1}).
pub fn minkowski_check(s: &StarSurface, kappa: ScaleKappa) -> Result<MinkowskiReport> {
    let n = s.dimension();
    let geom = star_surface_geometry(s, kappa, 16)?;
    let min_h = geom.mean_curvature.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    if min_h < 0.0 {
        return Err(Error::Hypothesis(format!(
            "surface {} is not mean-convex: H = {min_h:e}",
            s.label()
        )));
    }
    let lhs = geom.integral_hv / n.c_n();
    let rhs = geom.area / (2.0 * n.omega());
    Ok(MinkowskiReport {
        lhs,
        rhs,
        margin: lhs - rhs,
        min_mean_curvature: min_h,
    })
}

/// Closed-form (lhs, rhs) for the coordinate sphere of radius r, κ = 1.
pub fn minkowski_sphere_closed_form(n: Dimension, r: f64) -> (f64, f64) {
    let k = n.get() as i32;
    (0.5 * r.cosh().powi(2) * r.sinh().powi(k - 2), 0.5 * r.sinh().powi(k - 1))
}

/// Mass, hypothesis check and derivative data for the growth inequalities.
#[derive(Debug, Clone)]
pub struct VolumeGrowth {
    f: RadialProfile,
    kappa: ScaleKappa,
    mass: f64,
}

/// Both sides of a growth inequality at one height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthResidual {
    pub h: f64,
    pub r: f64,
    pub volume: f64,
    pub dvolume: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl VolumeGrowth {
    /// Computes m_κ and checks ℛ ≥ −tol on the hypothesis grid.
    pub fn new(f: RadialProfile, kappa: ScaleKappa, tol: f64) -> Result<Self> {
        for r in hypothesis_grid(f.as_ref(), kappa, 200) {
            let c = crate::curvature::scalar_curvature(f.as_ref(), kappa, r)?.curly_r;
            if c < -tol {
                return Err(Error::Hypothesis(format!("curly R = {c:e} < 0 at r = {r}")));
            }
        }
        let mass = mass_boundary_limit(f.as_ref(), kappa)?.value;
        Ok(Self { f, kappa, mass })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// (r_h, 𝒱, d𝒱/dh, ∫HV dΣ) with d𝒱/dh = (n−1)κ coth(κr)|S_r|/f′(r).
    fn level(&self, h: f64) -> Result<(f64, f64, f64, f64)> {
        let f = self.f.as_ref();
        let n = f.dimension();
        let r = regular_radius(f, h)?;
        let area = sphere_area(r, self.kappa, n);
        let dv = (n.as_f64() - 1.0) * kappa_coth(self.kappa.get(), r) * area / f.d1(r);
        let hv = level_set_mean_curvature(r, self.kappa, n) * lapse(r, self.kappa) * area;
        Ok((r, area, dv, hv))
    }

    /// d𝒱/dh − (1/α)[∫HV dΣ − (1 + α⁻²)c_n m_κ].
    pub fn residual(&self, h: f64, alpha: f64) -> Result<GrowthResidual> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        let n = self.f.dimension();
        let (r, volume, dvolume, hv) = self.level(h)?;
        let rhs = (hv - (1.0 + alpha.powi(-2)) * n.c_n() * self.mass) / alpha;
        Ok(GrowthResidual {
            h,
            r,
            volume,
            dvolume,
            rhs,
            residual: dvolume - rhs,
        })
    }

    /// The α maximizing the bound after the Minkowski-like step: √3(𝓑/m − 1)^{−1/2}.
    pub fn optimal_alpha(&self, h: f64) -> Result<f64> {
        let n = self.f.dimension();
        let (_, volume, _, _) = self.level(h)?;
        let b = volume / (2.0 * n.omega());
        Ok(3f64.sqrt() / (b / self.mass - 1.0).sqrt())
    }

    /// d𝒱/dh − c_n(2m/(3√3))(𝒱/(2ω m) − 1)^{3/2}, requiring 𝒱 > c_n m/(n−1).
    pub fn sharpened_residual(&self, h: f64) -> Result<GrowthResidual> {
        let n = self.f.dimension();
        if !(self.mass > ZERO_MASS) {
            return Err(Error::Hypothesis(format!("mass {:e} is not positive", self.mass)));
        }
        let (r, volume, dvolume, _) = self.level(h)?;
        let threshold = n.c_n() / (n.as_f64() - 1.0) * self.mass;
        if !(volume > threshold) {
            return Err(Error::Hypothesis(format!(
                "level-set volume {volume} does not exceed c_n m/(n−1) = {threshold}"
            )));
        }
        let rhs = n.c_n() * 2.0 * self.mass / (3.0 * 3f64.sqrt())
            * (volume / (2.0 * n.omega() * self.mass) - 1.0).powf(1.5);
        Ok(GrowthResidual {
            h,
            r,
            volume,
            dvolume,
            rhs,
            residual: dvolume - rhs,
        })
    }
}

pub fn volume_growth_check(f: &RadialProfile, kappa: ScaleKappa, h: f64, alpha: f64) -> Result<GrowthResidual> {
    VolumeGrowth::new(f.clone(), kappa, 1e-8)?.residual(h, alpha)
}

pub fn sharpened_growth_check(f: &RadialProfile, kappa: ScaleKappa, h: f64) -> Result<GrowthResidual> {
    VolumeGrowth::new(f.clone(), kappa, 1e-8)?.sharpened_residual(h)
}

/// Y against 𝒱̃ on a shared grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub holds: bool,
    pub kappa: f64,
    pub h0: f64,
    pub sup_rescaled: f64,
    pub blowup: f64,
    /// (h, Y(h), 𝒱̃(h)).
    pub grid: Vec<(f64, f64, f64)>,
    pub worst_relative_gap: f64,
}

/// Rescales f with κ (default m^{1/(n−2)}) around h₀ and compares Y ≤ 𝒱̃ pointwise.
pub fn comparison_property(f: &RadialProfile, beta: f64, kappa: Option<ScaleKappa>, points: usize) -> Result<ComparisonReport> {
    let n = f.dimension();
    let h0 = compute_h0(f.as_ref(), beta)?;
    if h0.below_boundary {
        return Err(Error::Hypothesis("volume threshold is below the horizon area".into()));
    }
    let kappa = match kappa {
        Some(k) => k,
        None => ScaleKappa::new(h0.mass.powf(1.0 / (n.as_f64() - 2.0)))?,
    };
    let ft = rescale(f, h0.h0, kappa);
    let sup_rescaled = sup_f(ft.as_ref(), kappa)?;
    let ode = ode_comparison(n, beta, default_cap(n))?;
    let end = ode.last_height().min(sup_rescaled);
    let mut grid = Vec::with_capacity(points);
    let mut holds = true;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..points {
        let h = end * 0.999 * i as f64 / (points - 1) as f64;
        let y = if i == 0 { ode.samples[0].1 } else { ode.value_at(h).unwrap_or(f64::INFINITY) };
        let v = if i == 0 {
            // 𝒱̃(0) as the limit from above
            volume_function(ft.as_ref(), kappa, h + 1e-12)?
        } else {
            volume_function(ft.as_ref(), kappa, h)?
        };
        let gap = (y - v) / v;
        worst = worst.max(gap);
        if y > v + 1e-6 * v {
            holds = false;
        }
        grid.push((h, y, v));
    }
    Ok(ComparisonReport {
        holds,
        kappa: kappa.get(),
        h0: h0.h0,
        sup_rescaled,
        blowup: ode.blowup_height,
        grid,
        worst_relative_gap: worst,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OdeSummary {
    pub blowup_numeric: f64,
    pub blowup_closed: f64,
}

/// sup f − h₀ against C·m^{1/(n−2)} with C the ODE blow-up height.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub n: Dimension,
    pub beta: f64,
    pub m: f64,
    pub h0: f64,
    pub sup_f: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub bound: f64,
    pub sup_minus_h0: f64,
    /// (sup f − h₀)/m^{1/(n−2)}.
    pub ratio: f64,
    pub verdict: bool,
    /// Zero-mass profile: the left inequality degenerates to 0 < 0.
    pub degenerate: bool,
    pub ode: OdeSummary,
}

pub fn height_bound_check(f: &dyn Profile, beta: f64) -> Result<StabilityReport> {
    let n = f.dimension();
    let ode = ode_comparison(n, beta, default_cap(n))?;
    let c = ode.blowup_height;
    let summary = OdeSummary {
        blowup_numeric: ode.blowup_height,
        blowup_closed: ode.closed_form_blowup,
    };
    let sup = sup_f(f, ScaleKappa::ONE)?;
    match compute_h0(f, beta) {
        Ok(h0) => {
            let scale = h0.mass.powf(1.0 / (n.as_f64() - 2.0));
            let gap = sup - h0.h0;
            Ok(StabilityReport {
                n,
                beta,
                m: h0.mass,
                h0: h0.h0,
                sup_f: sup,
                c,
                bound: c * scale,
                sup_minus_h0: gap,
                ratio: gap / scale,
                verdict: 0.0 < gap && gap < c * scale,
                degenerate: false,
                ode: summary,
            })
        }
        Err(Error::ZeroMass(_)) => Ok(StabilityReport {
            n,
            beta,
            m: 0.0,
            h0: boundary_value(f),
            sup_f: sup,
            c,
            bound: 0.0,
            sup_minus_h0: sup - boundary_value(f),
            ratio: f64::NAN,
            verdict: false,
            degenerate: true,
            ode: summary,
        }),
        Err(e) => Err(e),
    }
}

/// Regular heights strictly between the boundary value and sup f.
pub fn height_ladder(f: &dyn Profile, points: usize) -> Vec<f64> {
    let lo = boundary_value(f);
    let hi = f.h_max();
    (1..=points).map(|i| lo + (hi - lo) * i as f64 / (points + 1) as f64).collect()
}
