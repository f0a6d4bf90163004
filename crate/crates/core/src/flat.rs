//! Flat-distance upper bound between graph[f] and a horizontal slice.
//!
//! Inside an ℍ-ball U, graph[f] − {s = h₀} = A + ∂B with A the filled horizon
//! disk and B = B₊ + B₋ the regions between the graph and the slice. Region
//! volumes reduce to one-dimensional integrals in r because the s-extent of U
//! at radius r is |s| ≤ √(ρ² − sinh²r)/cosh r.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperbolic::{ball_volume, sphere_area, Dimension, ScaleKappa};
use crate::mass::mass_boundary_limit;
use crate::profile::{boundary_value, extended_value, shift, BoundaryKind, Profile, RadialProfile};
use crate::quadrature::{bisect, integrate_with_breaks, QuadTolerance};
use crate::stability::{compute_h0, ZERO_MASS};

/// The set cosh²(r)s² + sinh²(r) ≤ ρ² in ℍⁿ⁺¹ = ℝ × ℍⁿ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HBall {
    pub rho: f64,
}

impl HBall {
    pub fn new(rho: f64) -> Result<Self> {
        if rho > 0.0 && rho.is_finite() {
            Ok(Self { rho })
        } else {
            Err(Error::InvalidParameter(format!("ball radius must be positive, got {rho}")))
        }
    }

    /// Largest r present in U: sinh r = ρ.
    pub fn radius(&self) -> f64 {
        self.rho.asinh()
    }

    /// Half-height √(ρ² − sinh²r)/cosh r of U over radius r, if r lies under U.
    pub fn half_height(&self, r: f64) -> Option<f64> {
        let d = self.rho * self.rho - r.sinh().powi(2);
        (d >= 0.0).then(|| d.sqrt() / r.cosh())
    }

    /// Largest r with (s, r) ∈ U: cosh²r = (ρ² + 1)/(1 + s²).
    pub fn slice_radius(&self, s: f64) -> Option<f64> {
        let c2 = (self.rho * self.rho + 1.0) / (1.0 + s * s);
        (c2 >= 1.0).then(|| c2.sqrt().acosh())
    }
}

pub fn hball_contains(s: f64, r: f64, ball: HBall) -> bool {
    let lhs = r.cosh().powi(2) * s * s + r.sinh().powi(2);
    let rho2 = ball.rho * ball.rho;
    // a few ulps of slack so boundary points built from asinh count as inside
    lhs <= rho2 * (1.0 + 4.0 * f64::EPSILON)
}

/// Masses of A, B₊ and B₋, with the two terms of (ρ+1)m + ρⁿm^{1/(n−2)}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurrentMassReport {
    pub mass_a: f64,
    pub mass_b_plus: f64,
    pub mass_b_minus: f64,
    pub flat_upper: f64,
    pub mass: f64,
    pub bound_mass_term: f64,
    pub bound_height_term: f64,
}

/// c̃[(ρ+1)m + ρⁿm^{1/(n−2)}].
pub fn flat_bound_shape(m: f64, rho: f64, n: Dimension, c_tilde: f64) -> f64 {
    let (a, b) = bound_terms(m, rho, n);
    c_tilde * (a + b)
}

fn bound_terms(m: f64, rho: f64, n: Dimension) -> (f64, f64) {
    if m <= 0.0 {
        return (0.0, 0.0);
    }
    ((rho + 1.0) * m, rho.powi(n.get() as i32) * m.powf(1.0 / (n.as_f64() - 2.0)))
}

const REGION_TOL: QuadTolerance = QuadTolerance {
    abs: 1e-13,
    rel: 1e-10,
    max_subdivisions: 4000,
};

/// Radii where the integrands of B± change formula.
fn region_breaks(f: &dyn Profile, h0: f64, ball: HBall) -> Result<Vec<f64>> {
    let big_r = ball.radius();
    let mut breaks = vec![f.domain_start()];
    if let Some(r) = ball.slice_radius(h0) {
        breaks.push(r);
    }
    let probes: [&dyn Fn(f64) -> f64; 3] = [
        &|r| extended_value(f, r) - h0,
        &|r| extended_value(f, r) - ball.half_height(r).unwrap_or(0.0),
        &|r| extended_value(f, r) + ball.half_height(r).unwrap_or(0.0),
    ];
    const GRID: usize = 400;
    for g in probes {
        let mut prev = g(0.0);
        for i in 1..=GRID {
            let b = big_r * i as f64 / GRID as f64;
            let cur = g(b);
            if prev * cur < 0.0 {
                let a = big_r * (i - 1) as f64 / GRID as f64;
                breaks.push(bisect(g, a, b, 1e-13)?);
            }
            prev = cur;
        }
    }
    breaks.retain(|&r| r > 0.0 && r < big_r);
    breaks.sort_by(f64::total_cmp);
    Ok(breaks)
}

/// Volume of {(s, r) ∈ U : lo(r) < s < hi(r)} with volume element V ds dμ_b.
fn region_volume(n: Dimension, ball: HBall, breaks: &[f64], band: impl Fn(f64, f64) -> f64) -> Result<f64> {
    let omega = n.omega();
    let k = n.get() as i32;
    let est = integrate_with_breaks(
        |r| match ball.half_height(r) {
            Some(e) => band(r, e).max(0.0) * r.cosh() * omega * r.sinh().powi(k - 1),
            None => 0.0,
        },
        0.0,
        ball.radius(),
        breaks,
        REGION_TOL,
    )?;
    Ok(est.value)
}

/// Volume of the filled horizon disk A inside U (0 for entire profiles).
pub fn filled_boundary_volume(f: &dyn Profile, ball: HBall) -> Result<f64> {
    let r0 = match f.boundary_kind() {
        BoundaryKind::Entire => return Ok(0.0),
        BoundaryKind::MinimalBoundary { r0 } => r0,
    };
    match ball.slice_radius(boundary_value(f)) {
        Some(r_u) => ball_volume(r0.min(r_u), ScaleKappa::ONE, f.dimension()),
        None => Ok(0.0),
    }
}

pub fn current_masses(f: &dyn Profile, h0: f64, ball: HBall) -> Result<CurrentMassReport> {
    if !h0.is_finite() {
        return Err(Error::InvalidParameter(format!("h0 must be finite, got {h0}")));
    }
    let n = f.dimension();
    let breaks = region_breaks(f, h0, ball)?;
    let mass_a = filled_boundary_volume(f, ball)?;
    let mass_b_plus = region_volume(n, ball, &breaks, |r, e| extended_value(f, r).min(e) - h0.max(-e))?;
    let mass_b_minus = region_volume(n, ball, &breaks, |r, e| h0.min(e) - extended_value(f, r).max(-e))?;
    let mass = mass_boundary_limit(f, ScaleKappa::ONE)?.value.max(0.0);
    let (bound_mass_term, bound_height_term) = bound_terms(mass, ball.rho, n);
    Ok(CurrentMassReport {
        mass_a,
        mass_b_plus,
        mass_b_minus,
        flat_upper: mass_a + mass_b_plus + mass_b_minus,
        mass,
        bound_mass_term,
        bound_height_term,
    })
}

/// One row of the convergence sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub m: f64,
    #[serde(rename = "M_A")]
    pub mass_a: f64,
    #[serde(rename = "M_Bplus")]
    pub mass_b_plus: f64,
    #[serde(rename = "M_Bminus")]
    pub mass_b_minus: f64,
    pub flat_upper: f64,
    /// flat_upper/m^{1/(n−2)}.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub n: Dimension,
    pub rho: f64,
    pub beta: f64,
    pub rows: Vec<SweepRow>,
    /// max over rows of flat_upper/((ρ+1)m + ρⁿm^{1/(n−2)}).
    pub empirical_c_tilde: f64,
    pub strictly_decreasing: bool,
}

/// Normalizes f so that h₀ = 0 and measures the decomposition against {s = 0}.
/// Zero-mass profiles are compared with the slice at their own height.
pub fn sweep_row(f: &RadialProfile, ball: HBall, beta: f64) -> Result<SweepRow> {
    let n = f.dimension();
    let h0 = match compute_h0(f.as_ref(), beta) {
        Ok(rep) => rep.h0,
        Err(Error::ZeroMass(_)) => boundary_value(f.as_ref()),
        Err(e) => return Err(e),
    };
    let g = shift(f, h0);
    let rep = current_masses(g.as_ref(), 0.0, ball)?;
    let m = if rep.mass > ZERO_MASS { rep.mass } else { 0.0 };
    let ratio = if m > 0.0 {
        rep.flat_upper / m.powf(1.0 / (n.as_f64() - 2.0))
    } else {
        0.0
    };
    Ok(SweepRow {
        m,
        mass_a: rep.mass_a,
        mass_b_plus: rep.mass_b_plus,
        mass_b_minus: rep.mass_b_minus,
        flat_upper: rep.flat_upper,
        ratio,
    })
}

/// Rows for AdS-Schwarzschild profiles of the given masses, computed in parallel.
pub fn convergence_sweep(masses: &[f64], rho: f64, n: Dimension, beta: f64) -> Result<SweepTable> {
    let ball = HBall::new(rho)?;
    let rows = masses
        .par_iter()
        .map(|&m| {
            let f = crate::ads::AdsProfile::shared(n, m)?;
            sweep_row(&f, ball, beta)
        })
        .collect::<Result<Vec<_>>>()?;
    let empirical_c_tilde = rows
        .iter()
        .filter(|row| row.m > 0.0)
        .map(|row| row.flat_upper / flat_bound_shape(row.m, rho, n, 1.0))
        .fold(0.0, f64::max);
    let strictly_decreasing = rows.windows(2).all(|w| w[1].flat_upper < w[0].flat_upper);
    Ok(SweepTable {
        n,
        rho,
        beta,
        rows,
        empirical_c_tilde,
        strictly_decreasing,
    })
}

/// vol(B_r)/|S_r| in ℍⁿ; increasing in r with limit 1/(n−1).
pub fn isoperimetric_ratio(r: f64, n: Dimension) -> Result<f64> {
    Ok(ball_volume(r, ScaleKappa::ONE, n)? / sphere_area(r, ScaleKappa::ONE, n))
}

/// Largest slice volume of B₋ ∩ U for s ≤ h₀ against ratio·𝒱₁(h₀).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SliceReport {
    pub max_slice_volume: f64,
    pub bound: f64,
    pub isoperimetric_ratio: f64,
    pub holds: bool,
}

/// Slices {s = h} for h on a grid from the lowest point of the graph up to h₀.
/// Requires an increasing profile with h₀ above its boundary value.
pub fn slice_bound_check(f: &dyn Profile, h0: f64, ball: HBall, samples: usize) -> Result<SliceReport> {
    let n = f.dimension();
    let f0 = boundary_value(f);
    if !(h0 > f0 && h0 < f.h_max()) {
        return Err(Error::InvalidParameter(format!("h0 = {h0} must lie in ({f0}, {})", f.h_max())));
    }
    let r_h0 = crate::profile::invert(f, h0)?;
    let ratio = isoperimetric_ratio(r_h0, n)?;
    let bound = ratio * sphere_area(r_h0, ScaleKappa::ONE, n);
    let mut max_slice: f64 = 0.0;
    for i in 1..=samples {
        let h = f0 + (h0 - f0) * i as f64 / samples as f64;
        let r_h = if i == samples { r_h0 } else { crate::profile::invert(f, h)? };
        // B₋ ∩ {s = h} is {r < r_h} minus the filled disk, cut by U
        let outer = match ball.slice_radius(h) {
            Some(r_u) => r_h.min(r_u),
            None => continue,
        };
        let inner = f.domain_start().min(outer);
        let v = ball_volume(outer, ScaleKappa::ONE, n)? - ball_volume(inner, ScaleKappa::ONE, n)?;
        max_slice = max_slice.max(v);
    }
    Ok(SliceReport {
        max_slice_volume: max_slice,
        bound,
        isoperimetric_ratio: ratio,
        holds: max_slice <= bound * (1.0 + 1e-12),
    })
}

/// Filled-disk mass against the isoperimetric and Penrose estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FilledDiskReport {
    pub mass_a: f64,
    /// vol(B_{r₀})/|S_{r₀}|·|∂Ω|.
    pub isoperimetric_bound: f64,
    /// 2ω_{n−1}m/V(r₀) ≥ |∂Ω|.
    pub penrose_area_bound: f64,
    pub horizon_area: f64,
}

pub fn filled_disk_check(f: &dyn Profile, ball: HBall) -> Result<FilledDiskReport> {
    let r0 = match f.boundary_kind() {
        BoundaryKind::Entire => return Err(Error::EntireProfile),
        BoundaryKind::MinimalBoundary { r0 } => r0,
    };
    let n = f.dimension();
    let area = sphere_area(r0, ScaleKappa::ONE, n);
    let m = mass_boundary_limit(f, ScaleKappa::ONE)?.value;
    Ok(FilledDiskReport {
        mass_a: filled_boundary_volume(f, ball)?,
        isoperimetric_bound: isoperimetric_ratio(r0, n)? * area,
        penrose_area_bound: 2.0 * n.omega() * m / r0.cosh(),
        horizon_area: area,
    })
}
