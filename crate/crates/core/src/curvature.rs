//! Scalar and mean curvature of radial graphs {s = f(r)} in (ℝ × ℍⁿ_κ, V_κ²ds² + b_κ).
//!
//! Writing W = 1 + V²f′², the induced metric is W dr² + ψ²σ with
//! ψ = sinh(κr)/κ. The scalar curvature is available three ways, selected
//! through [`ScalarCurvatureMethod`]: the closed graph formula, the warped
//! product formula applied to finite differences, and the divergence form
//! ℛVψ^{n−1} = d/dr[(n−1)κ coth(κr) V³f′²ψ^{n−1}/W].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperbolic::{kappa_coth, lapse, lapse_derivative, warp, Dimension, ScaleKappa};
use crate::profile::{check_inside, radial_calculus, Profile};

/// Threshold on |f′| below which a height is not treated as a regular value.
pub const EPS_REG: f64 = 1e-8;

/// R_κ(f) together with ℛ_{f,κ} = R_κ(f) + κ²n(n−1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarCurvature {
    pub r_kappa: f64,
    pub curly_r: f64,
}

fn model_curvature(kappa: ScaleKappa, n: Dimension) -> f64 {
    let nf = n.as_f64();
    kappa.get() * kappa.get() * nf * (nf - 1.0)
}

/// Pointwise ingredients of the graph formula for radial f.
#[derive(Debug, Clone, Copy)]
struct Terms {
    v: f64,
    w: f64,
    lap: f64,
    hess2: f64,
    grad2: f64,
    df_dv: f64,
    dv2: f64,
    hess_ff: f64,
    hess_f_sq: f64,
    hess_fv: f64,
}

fn terms(f: &dyn Profile, kappa: ScaleKappa, r: f64) -> Result<Terms> {
    let calc = radial_calculus(f, r, kappa)?;
    let n1 = f.dimension().as_f64() - 1.0;
    let g = f.d1(r);
    let v = lapse(r, kappa);
    let vp = lapse_derivative(r, kappa);
    let ff = calc.hess_rr;
    Ok(Terms {
        v,
        w: 1.0 + v * v * g * g,
        lap: calc.laplacian,
        hess2: ff * ff + n1 * calc.hess_tan * calc.hess_tan,
        grad2: g * g,
        df_dv: g * vp,
        dv2: vp * vp,
        hess_ff: ff * g * g,
        hess_f_sq: ff * ff * g * g,
        hess_fv: ff * g * vp,
    })
}

/// ℛ assembled from the graph formula; `flip` negates the ⟨df, dV⟩Δf term.
fn curly_r_formula(t: &Terms, flip: f64) -> f64 {
    let Terms {
        v,
        w,
        lap,
        hess2,
        grad2,
        df_dv,
        dv2,
        hess_ff,
        hess_f_sq,
        hess_fv,
    } = *t;
    let v2 = v * v;
    let bracket = lap * lap - hess2 + 2.0 * v2 / w * (hess_f_sq - lap * hess_ff)
        + 2.0 * df_dv / (v * w) * (lap - v2 * hess_ff + df_dv / v)
        + flip * 2.0 * df_dv / v * lap
        - 2.0 / w * grad2 * dv2 / v2
        - 4.0 / (w * v) * hess_fv;
    v2 / w * bracket
}

/// Scalar curvature of the graph of f by the closed graph formula.
pub fn scalar_curvature(f: &dyn Profile, kappa: ScaleKappa, r: f64) -> Result<ScalarCurvature> {
    let curly_r = curly_r_formula(&terms(f, kappa, r)?, 1.0);
    Ok(ScalarCurvature {
        r_kappa: curly_r - model_curvature(kappa, f.dimension()),
        curly_r,
    })
}

fn fd_step(f: &dyn Profile, kappa: ScaleKappa, r: f64) -> f64 {
    1e-3 * (1.0 / kappa.get()).min(r - f.domain_start())
}

/// Five-point first and second central differences.
fn five_point(g: impl Fn(f64) -> f64, r: f64, h: f64) -> (f64, f64, f64) {
    let (m2, m1, c, p1, p2) = (g(r - 2.0 * h), g(r - h), g(r), g(r + h), g(r + 2.0 * h));
    let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    let d2 = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
    (c, d1, d2)
}

/// R_κ of A dr² + ψ²σ, with A = 1 + V²f′² and ψ = sinh(κr)/κ differentiated numerically.
pub fn warped_scalar_oracle(f: &dyn Profile, kappa: ScaleKappa, r: f64) -> Result<f64> {
    check_inside(f, r)?;
    let nf = f.dimension().as_f64();
    let metric_a = |t: f64| {
        let v = lapse(t, kappa);
        let g = f.d1(t);
        1.0 + v * v * g * g
    };
    let (a, da, _) = five_point(metric_a, r, fd_step(f, kappa, r));
    let h_psi = 2e-3 / kappa.get();
    let (psi, dpsi, ddpsi) = five_point(|t| warp(t, kappa), r, h_psi);
    // derivatives in arclength t, dt = √A dr
    let psi_t = dpsi / a.sqrt();
    let psi_tt = ddpsi / a - dpsi * da / (2.0 * a * a);
    Ok(-2.0 * (nf - 1.0) * psi_tt / psi + (nf - 1.0) * (nf - 2.0) * (1.0 - psi_t * psi_t) / (psi * psi))
}

/// (n−1)κ coth(κr) V³f′²ψ^{n−1}/W, the radial flux whose derivative is ℛVψ^{n−1}.
pub fn curvature_flux(f: &dyn Profile, kappa: ScaleKappa, r: f64) -> f64 {
    let n = f.dimension();
    let v = lapse(r, kappa);
    let g = f.d1(r);
    let w = 1.0 + v * v * g * g;
    (n.as_f64() - 1.0) * kappa_coth(kappa.get(), r) * v.powi(3) * g * g * warp(r, kappa).powi(n.get() as i32 - 1)
        / w
}

/// R_κ recovered from the divergence form by differentiating the flux.
pub fn divergence_scalar_curvature(f: &dyn Profile, kappa: ScaleKappa, r: f64) -> Result<f64> {
    check_inside(f, r)?;
    let n = f.dimension();
    let (_, dflux, _) = five_point(|t| curvature_flux(f, kappa, t), r, fd_step(f, kappa, r));
    let weight = lapse(r, kappa) * warp(r, kappa).powi(n.get() as i32 - 1);
    Ok(dflux / weight - model_curvature(kappa, n))
}

/// An interchangeable way of computing R_κ(f)(r).
pub trait ScalarCurvatureMethod: Send + Sync {
    fn name(&self) -> &'static str;
    fn r_kappa(&self, f: &dyn Profile, kappa: ScaleKappa, r: f64) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GraphFormula;

impl ScalarCurvatureMethod for GraphFormula {
    fn name(&self) -> &'static str {
        "formula"
    }
    fn r_kappa(&self, f: &dyn Profile, kappa: ScaleKappa, r: f64) -> Result<f64> {
        scalar_curvature(f, kappa, r).map(|s| s.r_kappa)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct WarpedOracle;

impl ScalarCurvatureMethod for WarpedOracle {
    fn name(&self) -> &'static str {
        "warped-oracle"
    }
    fn r_kappa(&self, f: &dyn Profile, kappa: ScaleKappa, r: f64) -> Result<f64> {
        warped_scalar_oracle(f, kappa, r)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DivergenceForm;

impl ScalarCurvatureMethod for DivergenceForm {
    fn name(&self) -> &'static str {
        "divergence"
    }
    fn r_kappa(&self, f: &dyn Profile, kappa: ScaleKappa, r: f64) -> Result<f64> {
        divergence_scalar_curvature(f, kappa, r)
    }
}

/// The graph formula with one term's sign flipped; used to exercise the verifier.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FaultyFormula;

impl ScalarCurvatureMethod for FaultyFormula {
    fn name(&self) -> &'static str {
        "faulty-formula"
    }
    fn r_kappa(&self, f: &dyn Profile, kappa: ScaleKappa, r: f64) -> Result<f64> {
        let curly = curly_r_formula(&terms(f, kappa, r)?, -1.0);
        Ok(curly - model_curvature(kappa, f.dimension()))
    }
}

/// Mean curvature H_κ = (n−1)κ coth(κr) of the coordinate sphere of radius r.
pub fn level_set_mean_curvature(r: f64, kappa: ScaleKappa, n: Dimension) -> f64 {
    (n.as_f64() - 1.0) * kappa_coth(kappa.get(), r)
}

/// Second fundamental form bracket T(∂r,∂r)/W + (n−1)κ coth(κr)f′.
fn mean_curvature_bracket(f: &dyn Profile, kappa: ScaleKappa, r: f64) -> Result<(f64, f64, f64)> {
    let calc = radial_calculus(f, r, kappa)?;
    let g = f.d1(r);
    let v = lapse(r, kappa);
    let vp = lapse_derivative(r, kappa);
    let w = 1.0 + v * v * g * g;
    let t_rr = calc.hess_rr + 2.0 * g * vp / v + v * vp * g * g * g;
    Ok((t_rr / w + (f.dimension().as_f64() - 1.0) * calc.hess_tan, v, w))
}

/// Mean curvature of the graph with respect to the upward unit normal.
///
/// Coordinate spheres of ℝⁿ have H = n−1 in this convention.
pub fn graph_mean_curvature(f: &dyn Profile, kappa: ScaleKappa, r: f64) -> Result<f64> {
    let (bracket, v, w) = mean_curvature_bracket(f, kappa, r)?;
    Ok(v / w.sqrt() * bracket)
}

/// The weighted expression (V²/W)[…] equal to (V/√W)·H̄; same sign as H̄.
pub fn graph_mean_curvature_weighted(f: &dyn Profile, kappa: ScaleKappa, r: f64) -> Result<f64> {
    let (bracket, v, w) = mean_curvature_bracket(f, kappa, r)?;
    Ok(v * v / w * bracket)
}

/// Outcome of scanning a grid for a downward-pointing mean curvature vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpwardReport {
    pub upward: bool,
    /// (r, H̄) at the first grid point with H̄ < −tol.
    pub first_violation: Option<(f64, f64)>,
}

pub fn upward_check(f: &dyn Profile, kappa: ScaleKappa, grid: &[f64], tol: f64) -> Result<UpwardReport> {
    for &r in grid {
        let h = graph_mean_curvature(f, kappa, r)?;
        if !(h >= -tol) {
            return Ok(UpwardReport {
                upward: false,
                first_violation: Some((r, h)),
            });
        }
    }
    Ok(UpwardReport {
        upward: true,
        first_violation: None,
    })
}

/// b̄(ν, η)·H̄·H − [ℛ/2 + n/(2(n−1))·b̄(ν, η)²·H²] on the level set through r.
///
/// b̄(ν, η) = sign(f′)·V|f′|/√W, the cosine between the graph normal and the
/// level-set normal pointing towards increasing f.
pub fn mean_curvature_comparison_check(f: &dyn Profile, kappa: ScaleKappa, r: f64) -> Result<f64> {
    check_inside(f, r)?;
    let g = f.d1(r);
    if !(g.abs() > EPS_REG) {
        return Err(Error::Regularity {
            value: f.value(r),
            r,
            slope: g,
        });
    }
    let n = f.dimension();
    let nf = n.as_f64();
    let v = lapse(r, kappa);
    let cos = g.signum() * v * g.abs() / (1.0 + v * v * g * g).sqrt();
    let h_bar = graph_mean_curvature(f, kappa, r)?;
    let h_level = level_set_mean_curvature(r, kappa, n);
    let curly_r = scalar_curvature(f, kappa, r)?.curly_r;
    Ok(cos * h_bar * h_level - (0.5 * curly_r + nf / (2.0 * (nf - 1.0)) * cos * cos * h_level * h_level))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ads::AdsProfile;
    use crate::profile::{rescale, ConstantProfile, ExponentialProfile, RadialProfile};

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn horizon_grid(f: &dyn Profile, points: usize, span: f64) -> Vec<f64> {
        let r0 = f.domain_start();
        (0..points)
            .map(|i| r0 + 10f64.powf(-3.0 + (3.0 + span.log10()) * i as f64 / (points - 1) as f64))
            .collect()
    }

    #[test]
    fn constant_graph_is_hyperbolic_space() {
        for n in 3..=6 {
            let f = ConstantProfile::new(dim(n), 0.3);
            let nf = n as f64;
            for &r in &[0.05, 1.0, 4.0] {
                let s = scalar_curvature(&f, ScaleKappa::ONE, r).unwrap();
                assert_eq!(s.curly_r, 0.0);
                assert!((s.r_kappa + nf * (nf - 1.0)).abs() < 1e-14);
                let o = warped_scalar_oracle(&f, ScaleKappa::ONE, r).unwrap();
                assert!((o + nf * (nf - 1.0)).abs() < 1e-6, "n={n} r={r} {o}");
                assert_eq!(graph_mean_curvature(&f, ScaleKappa::ONE, r).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn ads_scalar_curvature_vanishes() {
        for n in 3..=5 {
            let f = AdsProfile::shared(dim(n), 1.0).unwrap();
            for r in horizon_grid(f.as_ref(), 40, 20.0) {
                let s = scalar_curvature(f.as_ref(), ScaleKappa::ONE, r).unwrap();
                assert!(s.curly_r.abs() < 1e-8, "n={n} r={r} {}", s.curly_r);
                let o = warped_scalar_oracle(f.as_ref(), ScaleKappa::ONE, r).unwrap();
                assert!((o - s.r_kappa).abs() < 1e-6, "n={n} r={r} {o}");
            }
        }
    }

    #[test]
    fn three_methods_agree_on_exponential_profiles() {
        let f = ExponentialProfile::new(dim(4), 0.3, 2.2).with_wiggle(0.4, 0.5, 3.0);
        let methods: [&dyn ScalarCurvatureMethod; 3] = [&GraphFormula, &WarpedOracle, &DivergenceForm];
        for &r in &[0.2, 0.9, 2.5, 7.0] {
            let vals: Vec<f64> = methods.iter().map(|m| m.r_kappa(&f, ScaleKappa::ONE, r).unwrap()).collect();
            assert!((vals[0] - vals[1]).abs() < 1e-6, "r={r} {vals:?}");
            assert!((vals[0] - vals[2]).abs() < 1e-6, "r={r} {vals:?}");
        }
        let bad = FaultyFormula.r_kappa(&f, ScaleKappa::ONE, 0.9).unwrap();
        assert!((bad - GraphFormula.r_kappa(&f, ScaleKappa::ONE, 0.9).unwrap()).abs() > 1e-3);
    }

    #[test]
    fn scalar_curvature_scales_with_kappa() {
        let f: RadialProfile = ExponentialProfile::new(dim(3), 0.5, 2.0).with_wiggle(0.3, 0.2, 2.0).shared();
        for &k in &[0.5, 2.0, 3.7] {
            let kappa = ScaleKappa::new(k).unwrap();
            let ft = rescale(&f, 0.1, kappa);
            for &r in &[0.3, 1.1, 2.9] {
                let scaled = scalar_curvature(ft.as_ref(), kappa, r).unwrap().curly_r;
                let base = scalar_curvature(f.as_ref(), ScaleKappa::ONE, k * r).unwrap().curly_r;
                assert!((scaled - k * k * base).abs() <= 1e-10 * (k * k * base).abs().max(1e-300), "k={k} r={r}");
            }
        }
    }

    #[test]
    fn brute_force_riemann_tensor_in_dimension_three() {
        // Christoffel symbols of the induced metric in Cartesian-like coordinates
        // (r, θ, φ) with g = diag(W, ψ², ψ² sin²θ), Ricci scalar by finite differences.
        let f = ExponentialProfile::new(dim(3), 0.4, 2.0).with_wiggle(0.5, 0.3, 2.5);
        let kappa = ScaleKappa::ONE;
        let metric = |x: [f64; 3]| -> [f64; 3] {
            let v = lapse(x[0], kappa);
            let g = f.d1(x[0]);
            let psi = warp(x[0], kappa);
            [1.0 + v * v * g * g, psi * psi, psi * psi * x[1].sin().powi(2)]
        };
        let h = 1e-4;
        let christoffel = |x: [f64; 3]| -> [[[f64; 3]; 3]; 3] {
            let gx = metric(x);
            let mut dg = [[0.0; 3]; 3]; // dg[k][i] = ∂_k g_ii
            for k in 0..3 {
                let mut p = x;
                let mut m = x;
                p[k] += h;
                m[k] -= h;
                let (gp, gm) = (metric(p), metric(m));
                for i in 0..3 {
                    dg[k][i] = (gp[i] - gm[i]) / (2.0 * h);
                }
            }
            let mut gam = [[[0.0; 3]; 3]; 3];
            for a in 0..3 {
                for b in 0..3 {
                    for c in 0..3 {
                        // Γ^a_{bc} = ½ g^{aa}(∂_b g_{ac} + ∂_c g_{ab} − ∂_a g_{bc}), diagonal metric
                        let mut s = 0.0;
                        if a == c {
                            s += dg[b][a];
                        }
                        if a == b {
                            s += dg[c][a];
                        }
                        if b == c {
                            s -= dg[a][b];
                        }
                        gam[a][b][c] = 0.5 * s / gx[a];
                    }
                }
            }
            gam
        };
        let x = [1.3, 0.9, 0.4];
        let gam = christoffel(x);
        let mut dgam = [[[[0.0; 3]; 3]; 3]; 3]; // dgam[d][a][b][c] = ∂_d Γ^a_{bc}
        for d in 0..3 {
            let mut p = x;
            let mut m = x;
            p[d] += h;
            m[d] -= h;
            let (gp, gm) = (christoffel(p), christoffel(m));
            for a in 0..3 {
                for b in 0..3 {
                    for c in 0..3 {
                        dgam[d][a][b][c] = (gp[a][b][c] - gm[a][b][c]) / (2.0 * h);
                    }
                }
            }
        }
        let gx = metric(x);
        let mut scalar = 0.0;
        for b in 0..3 {
            // Ric_bb = ∂_a Γ^a_bb − ∂_b Γ^a_ab + Γ^a_ad Γ^d_bb − Γ^a_bd Γ^d_ab
            let mut ric = 0.0;
            for a in 0..3 {
                ric += dgam[a][a][b][b] - dgam[b][a][a][b];
                for d in 0..3 {
                    ric += gam[a][a][d] * gam[d][b][b] - gam[a][b][d] * gam[d][a][b];
                }
            }
            scalar += ric / gx[b];
        }
        let formula = scalar_curvature(&f, kappa, x[0]).unwrap().r_kappa;
        assert!((scalar - formula).abs() < 1e-5, "{scalar} vs {formula}");
    }

    #[test]
    fn level_set_mean_curvature_examples() {
        let h = level_set_mean_curvature(1f64.asinh(), ScaleKappa::ONE, dim(3));
        assert!((h - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        let tiny = ScaleKappa::new(1e-7).unwrap();
        assert!((level_set_mean_curvature(2.0, tiny, dim(4)) - 1.5).abs() < 1e-9);
        for &r in &[0.01, 1.0, 10.0] {
            assert!(level_set_mean_curvature(r, ScaleKappa::ONE, dim(5)) > 4.0);
        }
    }

    #[test]
    fn ads_graph_is_upward_and_counterexample_is_not() {
        let f = AdsProfile::shared(dim(3), 1.0).unwrap();
        let grid = horizon_grid(f.as_ref(), 60, 20.0);
        let report = upward_check(f.as_ref(), ScaleKappa::ONE, &grid, 0.0).unwrap();
        assert!(report.upward, "{report:?}");
        let down = ExponentialProfile::new(dim(3), 1.0, 3.0);
        let grid: Vec<f64> = (1..50).map(|i| 0.1 * i as f64).collect();
        let report = upward_check(&down, ScaleKappa::ONE, &grid, 0.0).unwrap();
        assert!(!report.upward);
        assert!(report.first_violation.unwrap().1 < 0.0);
        let up = ExponentialProfile::new(dim(3), -1.0, 3.0);
        assert!(upward_check(&up, ScaleKappa::ONE, &grid, 0.0).unwrap().upward);
    }

    #[test]
    fn weighted_mean_curvature_is_positive_multiple() {
        let f = ExponentialProfile::new(dim(4), -0.7, 2.5);
        for &r in &[0.3, 1.0, 3.0] {
            let h = graph_mean_curvature(&f, ScaleKappa::ONE, r).unwrap();
            let hw = graph_mean_curvature_weighted(&f, ScaleKappa::ONE, r).unwrap();
            let v = lapse(r, ScaleKappa::ONE);
            let w = 1.0 + v * v * f.d1(r).powi(2);
            assert!((hw - v / w.sqrt() * h).abs() < 1e-14 * hw.abs().max(1.0));
        }
    }

    #[test]
    fn mean_curvature_of_graph_matches_divergence_of_normal() {
        // H̄ = −div ν with ν = (V/√W)(V⁻²∂s − f′∂r) and √det G = Vψ^{n−1}
        let f = ExponentialProfile::new(dim(3), -0.6, 2.4);
        let kappa = ScaleKappa::ONE;
        let r = 0.8;
        let h = 1e-5;
        let flux = |t: f64| {
            let vt = lapse(t, kappa);
            let gt = f.d1(t);
            let wt = 1.0 + vt * vt * gt * gt;
            vt * warp(t, kappa).powi(2) * (-vt * gt / wt.sqrt())
        };
        let div = (flux(r + h) - flux(r - h)) / (2.0 * h) / (lapse(r, kappa) * warp(r, kappa).powi(2));
        let hbar = graph_mean_curvature(&f, kappa, r).unwrap();
        assert!((hbar + div).abs() < 1e-7, "{hbar} vs {}", -div);
    }

    #[test]
    fn comparison_residual_nonnegative() {
        let f = AdsProfile::shared(dim(3), 1.0).unwrap();
        for r in horizon_grid(f.as_ref(), 30, 6.0) {
            let res = mean_curvature_comparison_check(f.as_ref(), ScaleKappa::ONE, r).unwrap();
            assert!(res >= -1e-8, "r={r} {res}");
        }
        let g = ExponentialProfile::new(dim(3), 0.01, 2.0);
        for &r in &[0.3, 1.0, 2.0, 5.0] {
            assert!(mean_curvature_comparison_check(&g, ScaleKappa::ONE, r).unwrap() >= -1e-8);
        }
        let c = ConstantProfile::new(dim(3), 1.0);
        assert!(matches!(
            mean_curvature_comparison_check(&c, ScaleKappa::ONE, 1.0),
            Err(Error::Regularity { .. })
        ));
    }
}
