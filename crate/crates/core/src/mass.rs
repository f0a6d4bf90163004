//! The κ-mass of a radial graph and the quantities built from it.
//!
//! With e_κ = V_κ²df⊗df the boundary integrand of the κ-mass reduces along ∂r
//! to (n−1)κ coth(κr)V_κ³f′², so that
//! m_κ = ½ lim_{r→∞} κ coth(κr) V_κ³ f′² ψ^{n−1}, ψ = sinh(κr)/κ.

use serde::Serialize;

use crate::curvature::{level_set_mean_curvature, scalar_curvature, EPS_REG};
use crate::error::{Error, Result};
use crate::hyperbolic::{
    kappa_coth, lapse, lapse_derivative, ln_cosh, ln_sinh, sphere_area, unit_sphere_volume, warp, Dimension,
    LapseBasis, ScaleKappa,
};
use crate::profile::{check_monotone_from, invert, BoundaryKind, Profile, RadialProfile};
use crate::quadrature::{integrate, ladder_limit, quad_improper, Ladder, LimitEstimate, QuadTolerance};

/// Tolerances shared by the mass evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassTolerances {
    /// Stopping rule of the r-ladder: successive extrapolants within max(abs, rel·|m|).
    pub ladder_abs: f64,
    pub ladder_rel: f64,
    pub ladder_start: f64,
    pub ladder_rungs: usize,
    pub quad_abs: f64,
    pub quad_rel: f64,
    /// Acceptance threshold for |m_boundary − m_levelset_total| / max(1, m).
    pub identity: f64,
}

impl Default for MassTolerances {
    fn default() -> Self {
        Self {
            ladder_abs: 1e-14,
            ladder_rel: 1e-11,
            ladder_start: 5.0,
            ladder_rungs: 6,
            quad_abs: 1e-12,
            quad_rel: 1e-10,
            identity: 1e-6,
        }
    }
}

impl MassTolerances {
    fn ladder(&self, kappa: ScaleKappa) -> Ladder {
        Ladder {
            start: self.ladder_start / kappa.get(),
            rungs: self.ladder_rungs,
        }
    }
}

/// Surface density (1/c_n)·(n−1)κ coth(κr)V³f′²·|S_r| on the coordinate sphere of radius r.
pub fn mass_rung(f: &dyn Profile, kappa: ScaleKappa, r: f64) -> f64 {
    let g = f.d1(r);
    if g == 0.0 {
        return 0.0;
    }
    let k = kappa.get();
    let n = f.dimension().as_f64();
    let ln = 0.5f64.ln() + kappa_coth(k, r).ln() + 3.0 * ln_cosh(k * r) + 2.0 * g.abs().ln()
        + (n - 1.0) * (ln_sinh(k * r) - k.ln());
    ln.exp()
}

/// m_κ(f) by extrapolating the reduced boundary integral along the r-ladder.
pub fn mass_boundary_limit(f: &dyn Profile, kappa: ScaleKappa) -> Result<LimitEstimate> {
    mass_boundary_limit_with(f, kappa, &MassTolerances::default())
}

pub fn mass_boundary_limit_with(f: &dyn Profile, kappa: ScaleKappa, tol: &MassTolerances) -> Result<LimitEstimate> {
    ladder_limit(
        |r| mass_rung(f, kappa, r),
        tol.ladder(kappa),
        tol.ladder_abs,
        tol.ladder_rel,
    )
}

/// The four terms (V div e − V d tr e + (tr e) dV − e(∇V, ·))(∂r) with e = V²df⊗df.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourTermIntegrand {
    pub v_div_e: f64,
    pub v_d_tr_e: f64,
    pub tr_e_dv: f64,
    pub e_grad_v: f64,
}

impl FourTermIntegrand {
    pub fn total(&self) -> f64 {
        self.v_div_e - self.v_d_tr_e + self.tr_e_dv - self.e_grad_v
    }
}

/// Term-by-term mass integrand from the components of e in polar coordinates,
/// with radial derivatives of e_rr taken by central differences.
pub fn four_term_integrand(f: &dyn Profile, kappa: ScaleKappa, r: f64) -> FourTermIntegrand {
    let n = f.dimension().as_f64();
    let e_rr = |t: f64| {
        let g = f.d1(t);
        if g == 0.0 {
            return 0.0;
        }
        (lapse(t, kappa) * g).powi(2)
    };
    let h = 1e-4 * (1.0 / kappa.get()).min(r - f.domain_start());
    let de_rr = (e_rr(r - 2.0 * h) - 8.0 * e_rr(r - h) + 8.0 * e_rr(r + h) - e_rr(r + 2.0 * h)) / (12.0 * h);
    let phi = e_rr(r);
    let psi = warp(r, kappa);
    let dpsi = lapse(r, kappa);
    let v = lapse(r, kappa);
    let dv = lapse_derivative(r, kappa);
    // (div e)_r = ∂r e_rr + Σ_θ ψ⁻²(−Γ^r_θθ e_rr) with Γ^r_θθ = −ψψ′
    let div_e = de_rr + (n - 1.0) * dpsi / psi * phi;
    FourTermIntegrand {
        v_div_e: v * div_e,
        v_d_tr_e: v * de_rr,
        tr_e_dv: phi * dv,
        e_grad_v: phi * dv,
    }
}

/// Mass from the unreduced four-term integrand, evaluated on the same ladder.
pub fn mass_four_term(f: &dyn Profile, kappa: ScaleKappa, tol: &MassTolerances) -> Result<LimitEstimate> {
    let n = f.dimension();
    ladder_limit(
        |r| match four_term_integrand(f, kappa, r).total() {
            0.0 => 0.0,
            t => t * sphere_area(r, kappa, n) / n.c_n(),
        },
        tol.ladder(kappa),
        tol.ladder_abs,
        tol.ladder_rel.max(1e-9),
    )
}

/// H_Φ(V) for a basis lapse V.
///
/// For V_(i) = xⁱ sinh r every term of the integrand is xⁱ times a radial
/// factor, so H_Φ(V_(i)) is the radial limit times ∫_{𝕊^{n−1}} xⁱ dσ.
pub fn mass_functional_lapse(f: &dyn Profile, basis: LapseBasis) -> Result<f64> {
    let n = f.dimension();
    let radial = n.c_n() * mass_boundary_limit(f, ScaleKappa::ONE)?.value;
    if basis.index() == 0 {
        return Ok(radial);
    }
    Ok(radial * coordinate_moment(n)?)
}

/// ∫_{𝕊^{n−1}} x¹ dσ with x¹ = cos θ₁ and dσ = ω_{n−2} sin^{n−2}θ₁ dθ₁.
fn coordinate_moment(n: Dimension) -> Result<f64> {
    let e = integrate(
        |t: f64| t.cos() * t.sin().powi(n.get() as i32 - 2),
        0.0,
        std::f64::consts::PI,
        QuadTolerance::new(1e-15, 1e-13),
    )?;
    Ok(unit_sphere_volume(n.get() - 1) * e.value)
}

/// Both sides of the level-set identity at a regular height, with the boundary limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassReport {
    pub m_boundary: f64,
    pub m_boundary_error: f64,
    /// Mass from the unreduced four-term integrand.
    pub m_oracle: f64,
    pub m_levelset_bulk: f64,
    pub m_levelset_boundary: f64,
    pub m_levelset_total: f64,
    pub h_used: f64,
    pub r_used: f64,
    pub residual_identity: f64,
    pub kappa: ScaleKappa,
    pub tolerances: MassTolerances,
}

impl MassReport {
    /// True when the identity residual is below the configured tolerance.
    pub fn identity_holds(&self) -> bool {
        self.residual_identity < self.tolerances.identity * self.m_boundary.abs().max(1.0)
    }
}

/// Regular-value check at height h; returns the radius r_h = f⁻¹(h).
pub fn regular_radius(f: &dyn Profile, h: f64) -> Result<f64> {
    let r = invert(f, h)?;
    let r = match f.boundary_kind() {
        BoundaryKind::MinimalBoundary { r0 } if r <= r0 => {
            return Err(Error::Regularity { value: h, r, slope: f64::INFINITY });
        }
        _ => r,
    };
    let slope = f.d1(r);
    if !(slope.abs() > EPS_REG) {
        return Err(Error::Regularity { value: h, r, slope });
    }
    Ok(r)
}

/// Exponential decay rate used as tail hint for ℛ·V·|S_r|.
fn bulk_decay_hint(f: &dyn Profile) -> f64 {
    let d = f.decay_rate();
    let n = f.dimension().as_f64();
    if d > n {
        (d - n).min(1.0)
    } else {
        1.0
    }
}

/// (1/c_n)∫_{r_h}^∞ ℛ V |S_r| dr.
pub fn level_set_bulk(f: &dyn Profile, kappa: ScaleKappa, r_h: f64, tol: &MassTolerances) -> Result<f64> {
    level_set_bulk_scaled(f, kappa, r_h, tol, 0.0)
}

/// As `level_set_bulk`, with the absolute target raised to quad_rel·|scale|.
/// The identity compares bulk + boundary against the mass, so accuracy is
/// measured against the boundary term rather than against the bulk alone.
fn level_set_bulk_scaled(f: &dyn Profile, kappa: ScaleKappa, r_h: f64, tol: &MassTolerances, scale: f64) -> Result<f64> {
    let n = f.dimension();
    let integrand = |r: f64| match scalar_curvature(f, kappa, r) {
        Ok(s) => s.curly_r * lapse(r, kappa) * sphere_area(r, kappa, n),
        Err(_) => f64::NAN,
    };
    let est = quad_improper(
        integrand,
        r_h,
        bulk_decay_hint(f) * kappa.get(),
        QuadTolerance::new(tol.quad_abs.max(tol.quad_rel * (scale * n.c_n()).abs()), tol.quad_rel),
    )?;
    Ok(est.value / n.c_n())
}

/// (1/c_n) V H_κ (V²f′²/(1+V²f′²)) |Σ_h| on the level set at radius r.
pub fn level_set_boundary(f: &dyn Profile, kappa: ScaleKappa, r: f64) -> f64 {
    let n = f.dimension();
    let v = lapse(r, kappa);
    let g = f.d1(r);
    let e = v * v * g * g;
    let ratio = if e.is_infinite() { 1.0 } else { e / (1.0 + e) };
    v * level_set_mean_curvature(r, kappa, n) * ratio * sphere_area(r, kappa, n) / n.c_n()
}

pub fn mass_level_set(f: &dyn Profile, kappa: ScaleKappa, h: f64) -> Result<MassReport> {
    mass_level_set_with(f, kappa, h, &MassTolerances::default())
}

pub fn mass_level_set_with(f: &dyn Profile, kappa: ScaleKappa, h: f64, tol: &MassTolerances) -> Result<MassReport> {
    let r_h = regular_radius(f, h)?;
    check_monotone_from(f, r_h, 40.0 / kappa.get())?;
    let limit = mass_boundary_limit_with(f, kappa, tol)?;
    let oracle = mass_four_term(f, kappa, tol)?;
    let boundary = level_set_boundary(f, kappa, r_h);
    let bulk = level_set_bulk_scaled(f, kappa, r_h, tol, boundary)?;
    let total = bulk + boundary;
    Ok(MassReport {
        m_boundary: limit.value,
        m_boundary_error: limit.error,
        m_oracle: oracle.value,
        m_levelset_bulk: bulk,
        m_levelset_boundary: boundary,
        m_levelset_total: total,
        h_used: h,
        r_used: r_h,
        residual_identity: (limit.value - total).abs(),
        kappa,
        tolerances: *tol,
    })
}

/// Radii (domain_start, domain_start + span] on which hypotheses are sampled.
pub fn hypothesis_grid(f: &dyn Profile, kappa: ScaleKappa, points: usize) -> Vec<f64> {
    let start = f.domain_start();
    let span = 30.0 / kappa.get();
    let first = 1e-3 / kappa.get();
    (0..points)
        .map(|i| start + first * (span / first).powf(i as f64 / (points - 1) as f64))
        .collect()
}

/// Outcome of the non-negativity check m_κ ≥ boundary term ≥ 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PmtReport {
    pub holds: bool,
    pub mass: f64,
    /// Level-set boundary term at h, absent when h is not a regular value.
    pub boundary_term: Option<f64>,
    pub min_curly_r: f64,
    pub tol: f64,
}

pub fn pmt_check(f: &dyn Profile, kappa: ScaleKappa, h: f64, tol: f64) -> Result<PmtReport> {
    let mut min_curly_r = f64::INFINITY;
    for r in hypothesis_grid(f, kappa, 200) {
        let c = scalar_curvature(f, kappa, r)?.curly_r;
        if c < -tol {
            return Err(Error::Hypothesis(format!(
                "scalar curvature bound fails: curly R = {c:e} at r = {r}"
            )));
        }
        min_curly_r = min_curly_r.min(c);
    }
    let mass = mass_boundary_limit(f, kappa)?.value;
    let boundary_term = match regular_radius(f, h) {
        Ok(r) => Some(level_set_boundary(f, kappa, r)),
        Err(Error::Regularity { .. }) => None,
        Err(e) => return Err(e),
    };
    let holds = mass >= -tol && boundary_term.map_or(true, |b| mass >= b - tol);
    Ok(PmtReport {
        holds,
        mass,
        boundary_term,
        min_curly_r,
        tol,
    })
}

/// Mass against the horizon bound (1/(2ω_{n−1}))·V(r₀)·|∂Ω|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PenroseReport {
    pub mass: f64,
    pub bound: f64,
    pub ratio: f64,
    pub r0: f64,
}

pub fn penrose_bound(f: &dyn Profile) -> Result<PenroseReport> {
    let r0 = match f.boundary_kind() {
        BoundaryKind::MinimalBoundary { r0 } => r0,
        BoundaryKind::Entire => return Err(Error::EntireProfile),
    };
    let n = f.dimension();
    let mass = mass_boundary_limit(f, ScaleKappa::ONE)?.value;
    let area = sphere_area(r0, ScaleKappa::ONE, n);
    let bound = lapse(r0, ScaleKappa::ONE) * area / (2.0 * n.omega());
    Ok(PenroseReport {
        mass,
        bound,
        ratio: mass / bound,
        r0,
    })
}

/// m_κ of the rescaled profile against m₁(f)/κ^{n−2}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingReport {
    pub m_rescaled: f64,
    pub predicted: f64,
    pub relative_error: f64,
}

pub fn mass_scaling_check(f: &RadialProfile, h0: f64, kappa: ScaleKappa) -> Result<ScalingReport> {
    let n = f.dimension();
    let base = mass_boundary_limit(f.as_ref(), ScaleKappa::ONE)?.value;
    let ft = crate::profile::rescale(f, h0, kappa);
    let m_rescaled = mass_boundary_limit(ft.as_ref(), kappa)?.value;
    let predicted = base / kappa.get().powi(n.get() as i32 - 2);
    Ok(ScalingReport {
        m_rescaled,
        predicted,
        relative_error: (m_rescaled - predicted).abs() / predicted.abs().max(f64::MIN_POSITIVE),
    })
}

/// An interchangeable mass evaluation.
pub trait MassMethod: Send + Sync {
    fn name(&self) -> &'static str;
    fn mass(&self, f: &dyn Profile, kappa: ScaleKappa, tol: &MassTolerances) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BoundaryLimit;

impl MassMethod for BoundaryLimit {
    fn name(&self) -> &'static str {
        "boundary-limit"
    }
    fn mass(&self, f: &dyn Profile, kappa: ScaleKappa, tol: &MassTolerances) -> Result<f64> {
        mass_boundary_limit_with(f, kappa, tol).map(|l| l.value)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FourTerm;

impl MassMethod for FourTerm {
    fn name(&self) -> &'static str {
        "four-term"
    }
    fn mass(&self, f: &dyn Profile, kappa: ScaleKappa, tol: &MassTolerances) -> Result<f64> {
        mass_four_term(f, kappa, tol).map(|l| l.value)
    }
}

/// Level-set representation at the height where |f − boundary value| is half
/// of |h_max − boundary value|.
#[derive(Debug, Clone, Copy, Default)]
pub struct LevelSet;

impl MassMethod for LevelSet {
    fn name(&self) -> &'static str {
        "level-set"
    }
    fn mass(&self, f: &dyn Profile, kappa: ScaleKappa, tol: &MassTolerances) -> Result<f64> {
        let low = crate::profile::boundary_value(f);
        let h = 0.5 * (low + f.h_max());
        mass_level_set_with(f, kappa, h, tol).map(|r| r.m_levelset_total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ads::AdsProfile;
    use crate::profile::{ConstantProfile, ExponentialProfile};

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn constant_profile_has_zero_mass() {
        let f = ConstantProfile::new(dim(3), 2.0);
        let m = mass_boundary_limit(&f, ScaleKappa::ONE).unwrap();
        assert_eq!(m.value, 0.0);
        assert_eq!(mass_functional_lapse(&f, LapseBasis::time_like()).unwrap(), 0.0);
        assert!(matches!(
            mass_level_set(&f, ScaleKappa::ONE, 2.0),
            Err(Error::Regularity { .. }) | Err(Error::NonMonotone { .. }) | Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn ads_mass_is_m() {
        for n in 3..=5 {
            for &m in &[0.1, 1.0, 10.0] {
                let f = AdsProfile::shared(dim(n), m).unwrap();
                let est = mass_boundary_limit(f.as_ref(), ScaleKappa::ONE).unwrap();
                assert!((est.value / m - 1.0).abs() < 1e-9, "n={n} m={m} {}", est.value);
            }
        }
    }

    #[test]
    fn reduced_integrand_matches_four_terms() {
        let f = ExponentialProfile::new(dim(3), 0.2, 2.5);
        for &r in &[1.0, 5.0, 20.0] {
            let four = four_term_integrand(&f, ScaleKappa::ONE, r);
            let n = 3.0;
            let v = lapse(r, ScaleKappa::ONE);
            let reduced = (n - 1.0) * kappa_coth(1.0, r) * v.powi(3) * f.d1(r).powi(2);
            assert!((four.total() / reduced - 1.0).abs() < 1e-8, "r={r}");
            let dim3 = dim(3);
            let via_rung = four.total() * sphere_area(r, ScaleKappa::ONE, dim3) / dim3.c_n();
            assert!((via_rung / mass_rung(&f, ScaleKappa::ONE, r) - 1.0).abs() < 1e-8);
        }
        let m = mass_boundary_limit(&f, ScaleKappa::ONE).unwrap().value;
        let expected = f.closed_form_mass().unwrap();
        assert!((m - expected).abs() < 1e-12, "{m} vs {expected}");
        let at20 = four_term_integrand(&f, ScaleKappa::ONE, 20.0).total() * sphere_area(20.0, ScaleKappa::ONE, dim(3))
            / dim(3).c_n();
        assert!((at20 - m).abs() < 1e-8);
    }

    #[test]
    fn balance_and_time_like_functional() {
        let f = AdsProfile::shared(dim(3), 1.0).unwrap();
        let h0 = mass_functional_lapse(f.as_ref(), LapseBasis::time_like()).unwrap();
        assert!((h0 - 16.0 * std::f64::consts::PI).abs() < 1e-7);
        for i in 1..=3 {
            let hi = mass_functional_lapse(f.as_ref(), LapseBasis::new(i, dim(3)).unwrap()).unwrap();
            assert!(hi.abs() < 1e-10);
        }
    }

    #[test]
    fn ads_level_set_identity() {
        let f = AdsProfile::shared(dim(3), 1.0).unwrap();
        let hmax = f.h_max();
        for &frac in &[0.05, 0.3, 0.7, 0.95] {
            let rep = mass_level_set(f.as_ref(), ScaleKappa::ONE, frac * hmax).unwrap();
            assert!(rep.m_levelset_bulk.abs() < 1e-8, "{rep:?}");
            assert!((rep.m_levelset_boundary - 1.0).abs() < 1e-6, "{rep:?}");
            assert!(rep.identity_holds());
            assert!((rep.m_oracle - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn generic_profile_level_set_identity() {
        let f = ExponentialProfile::new(dim(3), 0.01, 3.0);
        let rep = mass_level_set(&f, ScaleKappa::ONE, f.value(2.0)).unwrap();
        assert!(rep.residual_identity < 1e-7, "{rep:?}");
        assert!(rep.m_levelset_bulk.abs() > 1e-9);
    }

    #[test]
    fn pmt_cases() {
        let f = AdsProfile::shared(dim(3), 1.0).unwrap();
        let rep = pmt_check(f.as_ref(), ScaleKappa::ONE, 0.5 * f.h_max(), 1e-8).unwrap();
        assert!(rep.holds);
        assert!((rep.mass - rep.boundary_term.unwrap()).abs() < 1e-6);
        let c = ConstantProfile::new(dim(3), 0.0);
        let rep = pmt_check(&c, ScaleKappa::ONE, 0.0, 1e-8).unwrap();
        assert!(rep.holds && rep.mass == 0.0 && rep.boundary_term.is_none());
        let bad = ExponentialProfile::new(dim(3), 1.0, 4.0);
        assert!(matches!(pmt_check(&bad, ScaleKappa::ONE, bad.value(1.0), 1e-8), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn penrose_examples() {
        let f = AdsProfile::shared(dim(3), 1.0).unwrap();
        let p = penrose_bound(f.as_ref()).unwrap();
        assert!((p.bound - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((p.ratio - 2f64.sqrt()).abs() < 1e-8);
        let mut last = f64::INFINITY;
        for &m in &[10.0, 1e3, 1e5] {
            let f = AdsProfile::shared(dim(3), m).unwrap();
            let p = penrose_bound(f.as_ref()).unwrap();
            assert!(p.ratio > 1.0 && p.ratio < last);
            last = p.ratio;
        }
        assert!(last < 1.001);
        assert!(matches!(penrose_bound(&ConstantProfile::new(dim(3), 0.0)), Err(Error::EntireProfile)));
    }

    #[test]
    fn scaling_examples() {
        let f = AdsProfile::shared(dim(3), 1.0).unwrap();
        let s = mass_scaling_check(&f, 0.0, ScaleKappa::new(2.0).unwrap()).unwrap();
        assert!((s.m_rescaled - 0.5).abs() < 1e-8 && (s.predicted - 0.5).abs() < 1e-8);
        let f4 = AdsProfile::shared(dim(4), 1.0).unwrap();
        let s = mass_scaling_check(&f4, 0.3, ScaleKappa::ONE).unwrap();
        assert!((s.m_rescaled - 1.0).abs() < 1e-8);
    }

    #[test]
    fn mass_methods_agree() {
        let f = AdsProfile::shared(dim(4), 0.7).unwrap();
        let tol = MassTolerances::default();
        let methods: [&dyn MassMethod; 3] = [&BoundaryLimit, &FourTerm, &LevelSet];
        for m in methods {
            let v = m.mass(f.as_ref(), ScaleKappa::ONE, &tol).unwrap();
            assert!((v - 0.7).abs() < 1e-6, "{} {v}", m.name());
        }
    }
}
