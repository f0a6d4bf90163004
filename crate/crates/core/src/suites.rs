//! The verification corpus: numbered criteria grouped into named suites.
//!
//! Each criterion runs a family of checks and reports every one of them, so a
//! failure carries its first counterexample.

use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::ads::AdsProfile;
use crate::corpus::{smooth_profiles, star_surfaces, DEFAULT_SEED};
use crate::curvature::{mean_curvature_comparison_check, warped_scalar_oracle, ScalarCurvatureMethod};
use crate::error::{Error, Result};
use crate::flat::{convergence_sweep, flat_bound_shape};
use crate::hyperbolic::{Dimension, LapseBasis, ScaleKappa};
use crate::mass::{mass_boundary_limit, mass_functional_lapse, mass_level_set, mass_scaling_check, penrose_bound};
use crate::ode::{closed_form_blowup, default_cap, ode_comparison};
use crate::profile::{ConstantProfile, Profile, RadialProfile};
use crate::registry::{curvature_methods, Registry};
use crate::stability::{
    comparison_property, height_bound_check, height_ladder, minkowski_check, minkowski_sphere_closed_form,
    volume_function, VolumeGrowth,
};
use crate::star::StarSurface;

/// One evaluated check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

/// Outcome of one numbered criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub failures: usize,
    pub first_failure: Option<Check>,
    pub seconds: f64,
}

/// Runtime choices shared by all criteria.
#[derive(Clone)]
pub struct SuiteContext {
    /// Method standing in for the explicit scalar-curvature formula.
    pub curvature: Arc<dyn ScalarCurvatureMethod>,
    pub seed: u64,
}

impl Default for SuiteContext {
    fn default() -> Self {
        Self {
            curvature: curvature_methods().get("formula").expect("formula is registered"),
            seed: DEFAULT_SEED,
        }
    }
}

pub trait Criterion: Send + Sync {
    fn id(&self) -> u8;
    fn title(&self) -> &'static str;
    fn run(&self, ctx: &SuiteContext) -> Vec<Check>;
}

/// Collects checks for one criterion.
struct Recorder {
    id: u8,
    checks: Vec<Check>,
}

impl Recorder {
    fn new(id: u8) -> Self {
        Self { id, checks: Vec::new() }
    }

    /// Passes when `value ≤ tolerance`.
    fn at_most(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        self.push(name.into(), value <= tolerance, value, tolerance, String::new());
    }

    fn holds(&mut self, name: impl Into<String>, passed: bool, value: f64, detail: impl Into<String>) {
        self.push(name.into(), passed, value, 0.0, detail.into());
    }

    fn error(&mut self, name: impl Into<String>, e: Error) {
        self.push(name.into(), false, f64::NAN, 0.0, e.to_string());
    }

    fn push(&mut self, name: String, passed: bool, value: f64, tolerance: f64, detail: String) {
        let passed = passed && !value.is_nan();
        self.checks.push(Check {
            criterion: self.id,
            name,
            passed,
            value,
            tolerance,
            detail,
        });
    }

    fn attempt<T>(&mut self, name: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.error(name, e);
                None
            }
        }
    }
}

fn dim(n: usize) -> Dimension {
    Dimension::new(n).expect("corpus dimensions are ≥ 3")
}

fn ads(n: usize, m: f64) -> Result<RadialProfile> {
    AdsProfile::shared(dim(n), m)
}

const DIMENSIONS: [usize; 5] = [3, 4, 5, 6, 7];
const MASSES: [f64; 3] = [0.1, 1.0, 10.0];

/// r₀ + 10^t for t evenly spaced in [−3, log₁₀ span].
fn horizon_grid(f: &dyn Profile, points: usize, span: f64) -> Vec<f64> {
    let r0 = f.domain_start();
    (0..points)
        .map(|i| r0 + 10f64.powf(-3.0 + (3.0 + span.log10()) * i as f64 / (points - 1) as f64))
        .collect()
}

struct AdsMass;
struct CurvatureConstancy;
struct LevelSetIdentity;
struct MassScaling;
struct PenroseRatio;
struct OdeBlowup;
struct ComparisonProperty;
struct HeightBound;
struct ConvergenceSweep;
struct InequalitySuites;
struct BalanceRigidity;

impl Criterion for AdsMass {
    fn id(&self) -> u8 {
        1
    }
    fn title(&self) -> &'static str {
        "AdS mass reproduction"
    }
    fn run(&self, _ctx: &SuiteContext) -> Vec<Check> {
        let mut rec = Recorder::new(self.id());
        for n in DIMENSIONS {
            for m in MASSES {
                let name = format!("n={n} m={m}");
                let got = ads(n, m).and_then(|f| mass_boundary_limit(f.as_ref(), ScaleKappa::ONE));
                if let Some(est) = rec.attempt(&name, got) {
                    rec.at_most(name, (est.value / m - 1.0).abs(), 1e-6);
                }
            }
        }
        rec.checks
    }
}

impl Criterion for CurvatureConstancy {
    fn id(&self) -> u8 {
        2
    }
    fn title(&self) -> &'static str {
        "scalar-curvature constancy"
    }
    fn run(&self, ctx: &SuiteContext) -> Vec<Check> {
        let mut rec = Recorder::new(self.id());
        for n in DIMENSIONS {
            let shift = (n * (n - 1)) as f64;
            for m in MASSES {
                let Some(f) = rec.attempt(&format!("n={n} m={m}"), ads(n, m)) else { continue };
                let (mut worst_r, mut worst_o, mut at) = (0.0f64, 0.0f64, (0.0, 0.0));
                for r in horizon_grid(f.as_ref(), 100, 20.0) {
                    let formula = ctx.curvature.r_kappa(f.as_ref(), ScaleKappa::ONE, r);
                    let oracle = warped_scalar_oracle(f.as_ref(), ScaleKappa::ONE, r);
                    match (formula, oracle) {
                        (Ok(a), Ok(b)) => {
                            if (a + shift).abs() > worst_r {
                                at.0 = r;
                            }
                            if (a - b).abs() > worst_o {
                                at.1 = r;
                            }
                            worst_r = worst_r.max((a + shift).abs());
                            worst_o = worst_o.max((a - b).abs());
                        }
                        (Err(e), _) | (_, Err(e)) => rec.error(format!("n={n} m={m} r={r}"), e),
                    }
                }
                rec.at_most(format!("n={n} m={m} |curly R| (worst at r={})", at.0), worst_r, 1e-8);
                rec.at_most(format!("n={n} m={m} |formula − oracle| (worst at r={})", at.1), worst_o, 1e-6);
            }
        }
        rec.checks
    }
}

impl Criterion for LevelSetIdentity {
    fn id(&self) -> u8 {
        3
    }
    fn title(&self) -> &'static str {
        "level-set mass identity"
    }
    fn run(&self, ctx: &SuiteContext) -> Vec<Check> {
        let mut rec = Recorder::new(self.id());
        let mut profiles: Vec<(String, RadialProfile)> = Vec::new();
        for (n, m) in [(3, 1.0), (4, 0.5)] {
            if let Some(f) = rec.attempt("ads", ads(n, m)) {
                profiles.push((format!("ads n={n} m={m}"), f));
            }
        }
        for (i, f) in smooth_profiles(ctx.seed, 10).into_iter().enumerate() {
            profiles.push((format!("seeded #{i} n={}", f.dimension().get()), f));
        }
        for (label, f) in profiles {
            for h in height_ladder(f.as_ref(), 10) {
                let name = format!("{label} h={h:.6}");
                if let Some(rep) = rec.attempt(&name, mass_level_set(f.as_ref(), ScaleKappa::ONE, h)) {
                    let tol = 1e-6 * rep.m_boundary.abs().max(1.0);
                    rec.at_most(name, (rep.m_levelset_total - rep.m_boundary).abs(), tol);
                }
            }
        }
        rec.checks
    }
}

impl Criterion for MassScaling {
    fn id(&self) -> u8 {
        4
    }
    fn title(&self) -> &'static str {
        "mass scaling law"
    }
    fn run(&self, _ctx: &SuiteContext) -> Vec<Check> {
        let mut rec = Recorder::new(self.id());
        for n in [3, 4, 5] {
            for m in MASSES {
                let Some(f) = rec.attempt("ads", ads(n, m)) else { continue };
                let natural = m.powf(1.0 / (n as f64 - 2.0));
                for k in [0.5, 2.0, natural] {
                    let name = format!("n={n} m={m} κ={k}");
                    let rep = ScaleKappa::new(k).and_then(|kappa| mass_scaling_check(&f, 0.1, kappa));
                    if let Some(rep) = rec.attempt(&name, rep) {
                        let back = rep.m_rescaled * k.powi(n as i32 - 2);
                        rec.at_most(name, (back - m).abs() / m.max(1.0), 1e-6);
                    }
                }
            }
        }
        rec.checks
    }
}

impl Criterion for PenroseRatio {
    fn id(&self) -> u8 {
        5
    }
    fn title(&self) -> &'static str {
        "Penrose-like bound"
    }
    fn run(&self, _ctx: &SuiteContext) -> Vec<Check> {
        let mut rec = Recorder::new(self.id());
        for n in DIMENSIONS {
            for m in MASSES {
                let name = format!("n={n} m={m}");
                let Some(rep) = rec.attempt(&name, ads(n, m).and_then(|f| penrose_bound(f.as_ref()))) else { continue };
                let rho0 = rep.r0.sinh();
                let expected = (1.0 + rho0 * rho0).sqrt() / rho0;
                rec.at_most(format!("{name} ratio vs √(1+ρ₀²)/ρ₀"), (rep.ratio - expected).abs(), 1e-8);
                rec.holds(format!("{name} ratio ≥ 1"), rep.ratio >= 1.0, rep.ratio, "");
            }
        }
        if let Some(rep) = rec.attempt("n=3 m=1", ads(3, 1.0).and_then(|f| penrose_bound(f.as_ref()))) {
            rec.at_most("n=3 m=1 ratio = √2", (rep.ratio - 2f64.sqrt()).abs(), 1e-8);
        }
        rec.checks
    }
}

impl Criterion for OdeBlowup {
    fn id(&self) -> u8 {
        6
    }
    fn title(&self) -> &'static str {
        "ODE blow-up height"
    }
    fn run(&self, _ctx: &SuiteContext) -> Vec<Check> {
        let mut rec = Recorder::new(self.id());
        for n in DIMENSIONS {
            for beta in [1.5, 2.0, 4.0] {
                let name = format!("n={n} β={beta}");
                if let Some(sol) = rec.attempt(&name, ode_comparison(dim(n), beta, default_cap(dim(n)))) {
                    rec.at_most(name, (sol.blowup_height - sol.closed_form_blowup).abs(), 1e-4);
                }
            }
        }
        rec.at_most("n=3 β=2 ≈ 2.59808", (closed_form_blowup(dim(3), 2.0) - 2.59808).abs(), 5e-6);
        rec.checks
    }
}

impl Criterion for ComparisonProperty {
    fn id(&self) -> u8 {
        7
    }
    fn title(&self) -> &'static str {
        "comparison property Y ≤ rescaled volume"
    }
    fn run(&self, _ctx: &SuiteContext) -> Vec<Check> {
        let mut rec = Recorder::new(self.id());
        for m in [0.25, 0.05, 0.01] {
            let name = format!("n=3 m={m}");
            let rep = ads(3, m).and_then(|f| comparison_property(&f, 2.0, None, 200));
            if let Some(rep) = rec.attempt(&name, rep) {
                let worst = rep
                    .grid
                    .iter()
                    .find(|(_, y, v)| *y > v + 1e-6 * v)
                    .map(|(h, y, v)| format!("first violation at h={h}: Y={y} > V={v}"))
                    .unwrap_or_default();
                rec.holds(name, rep.holds, rep.worst_relative_gap, worst);
            }
        }
        rec.checks
    }
}

impl Criterion for HeightBound {
    fn id(&self) -> u8 {
        8
    }
    fn title(&self) -> &'static str {
        "height bound"
    }
    fn run(&self, _ctx: &SuiteContext) -> Vec<Check> {
        let mut rec = Recorder::new(self.id());
        for n in [3, 4] {
            for m in [0.5, 0.1, 0.02, 0.004] {
                let name = format!("n={n} m={m}");
                let Some(rep) = rec.attempt(&name, ads(n, m).and_then(|f| height_bound_check(f.as_ref(), 2.0))) else {
                    continue;
                };
                let detail = format!("sup f − h0 = {} vs C·m^(1/(n−2)) = {}", rep.sup_minus_h0, rep.bound);
                rec.holds(format!("{name} 0 < sup f − h0 < C·m^(1/(n−2))"), rep.verdict, rep.sup_minus_h0, detail);
                rec.at_most(format!("{name} ratio ≤ C"), rep.ratio, rep.c);
            }
        }
        rec.checks
    }
}

impl Criterion for ConvergenceSweep {
    fn id(&self) -> u8 {
        9
    }
    fn title(&self) -> &'static str {
        "convergence sweep"
    }
    fn run(&self, _ctx: &SuiteContext) -> Vec<Check> {
        let mut rec = Recorder::new(self.id());
        let masses = [0.5, 0.1, 0.02, 0.004, 0.0008];
        let (n, rho) = (dim(3), 5.0);
        let Some(table) = rec.attempt("sweep", convergence_sweep(&masses, rho, n, 2.0)) else { return rec.checks };
        let uppers: Vec<String> = table.rows.iter().map(|r| format!("{:.6}", r.flat_upper)).collect();
        rec.holds("flat_upper strictly decreasing", table.strictly_decreasing, 0.0, uppers.join(", "));
        let first = table.rows[0].flat_upper;
        let last = table.rows[table.rows.len() - 1].flat_upper;
        rec.at_most("flat_upper(last)/flat_upper(first)", last / first, 0.1);
        // bounded shape ratio: the smallest-mass ratio may not exceed the largest ratio seen on the first half
        let shape: Vec<f64> = table.rows.iter().map(|r| r.flat_upper / flat_bound_shape(r.m, rho, n, 1.0)).collect();
        let head = shape[..shape.len() / 2 + 1].iter().copied().fold(0.0, f64::max);
        rec.at_most("shape ratio at smallest mass vs head maximum", shape[shape.len() - 1], head);
        rec.checks
    }
}

impl Criterion for InequalitySuites {
    fn id(&self) -> u8 {
        10
    }
    fn title(&self) -> &'static str {
        "inequality suites"
    }
    fn run(&self, ctx: &SuiteContext) -> Vec<Check> {
        let mut rec = Recorder::new(self.id());
        for n in [3, 4, 5] {
            for r in [0.3, 1.0, 2.0, 3.5] {
                let name = format!("sphere n={n} r={r}");
                let (lhs, rhs) = minkowski_sphere_closed_form(dim(n), r);
                rec.holds(format!("{name} closed-form margin"), lhs - rhs >= -1e-6, lhs - rhs, "");
                if let Some(rep) = rec.attempt(&name, minkowski_check(&StarSurface::sphere(dim(n), r), ScaleKappa::ONE)) {
                    rec.at_most(format!("{name} quadrature vs closed form"), (rep.lhs / lhs - 1.0).abs(), 1e-6);
                }
            }
        }
        for s in star_surfaces(ctx.seed, 20) {
            let name = format!("star {}", s.label());
            if let Some(rep) = rec.attempt(&name, minkowski_check(&s, ScaleKappa::ONE)) {
                rec.holds(name, rep.margin >= -1e-6, rep.margin, "");
            }
        }
        for (n, m) in [(3, 0.1), (3, 1.0), (4, 1.0), (5, 10.0)] {
            let Some(f) = rec.attempt("ads", ads(n, m)) else { continue };
            let Some(g) = rec.attempt("growth", VolumeGrowth::new(f.clone(), ScaleKappa::ONE, 1e-8)) else { continue };
            let mut worst_alpha = f64::INFINITY;
            let mut worst_sharp = f64::INFINITY;
            for h in height_ladder(f.as_ref(), 12) {
                for alpha in [0.25, 1.0, 4.0] {
                    if let Some(r) = rec.attempt("growth α", g.residual(h, alpha)) {
                        worst_alpha = worst_alpha.min(r.residual);
                    }
                }
                let v = volume_function(f.as_ref(), ScaleKappa::ONE, h).unwrap_or(0.0);
                if v > 2.0 * dim(n).omega() * g.mass() {
                    if let Some(r) = rec.attempt("growth sharpened", g.sharpened_residual(h)) {
                        worst_sharp = worst_sharp.min(r.residual);
                    }
                }
            }
            rec.holds(format!("ads n={n} m={m} volume growth (α family)"), worst_alpha >= -1e-8, worst_alpha, "");
            rec.holds(format!("ads n={n} m={m} sharpened volume growth"), worst_sharp >= -1e-8, worst_sharp, "");
            let mut worst = f64::INFINITY;
            // only regular heights: the check divides by f′
            for r in horizon_grid(f.as_ref(), 60, 6.0).into_iter().filter(|&r| f.d1(r) > 1e-7) {
                if let Some(v) = rec.attempt("mean-curvature comparison", mean_curvature_comparison_check(f.as_ref(), ScaleKappa::ONE, r)) {
                    worst = worst.min(v);
                }
            }
            rec.holds(format!("ads n={n} m={m} mean-curvature comparison"), worst >= -1e-8, worst, "");
        }
        rec.checks
    }
}

impl Criterion for BalanceRigidity {
    fn id(&self) -> u8 {
        11
    }
    fn title(&self) -> &'static str {
        "balance and rigidity"
    }
    fn run(&self, ctx: &SuiteContext) -> Vec<Check> {
        let mut rec = Recorder::new(self.id());
        let mut profiles: Vec<RadialProfile> = Vec::new();
        if let Some(f) = rec.attempt("ads", ads(3, 1.0)) {
            profiles.push(f);
        }
        if let Some(f) = rec.attempt("ads", ads(5, 2.0)) {
            profiles.push(f);
        }
        profiles.extend(smooth_profiles(ctx.seed, 3).into_iter().step_by(2));
        for f in &profiles {
            let n = f.dimension();
            for i in 1..=n.get() {
                let name = format!("{} n={} V_({i})", f.family(), n.get());
                let got = LapseBasis::new(i, n).and_then(|b| mass_functional_lapse(f.as_ref(), b));
                if let Some(v) = rec.attempt(&name, got) {
                    rec.at_most(name, v.abs(), 1e-10);
                }
            }
        }
        for n in [3, 4, 7] {
            let f = ConstantProfile::new(dim(n), 0.7);
            let name = format!("constant n={n}");
            if let Some(est) = rec.attempt(&name, mass_boundary_limit(&f, ScaleKappa::ONE)) {
                rec.at_most(format!("{name} mass"), est.value.abs(), 1e-10);
            }
            let target = -((n * (n - 1)) as f64);
            let mut worst = 0.0f64;
            for r in [0.01, 0.5, 2.0, 10.0] {
                if let Some(v) = rec.attempt(&name, ctx.curvature.r_kappa(&f, ScaleKappa::ONE, r)) {
                    worst = worst.max((v - target).abs());
                }
            }
            rec.at_most(format!("{name} R = −n(n−1)"), worst, 1e-10);
        }
        rec.checks
    }
}

pub fn criteria() -> Vec<Arc<dyn Criterion>> {
    vec![
        Arc::new(AdsMass),
        Arc::new(CurvatureConstancy),
        Arc::new(LevelSetIdentity),
        Arc::new(MassScaling),
        Arc::new(PenroseRatio),
        Arc::new(OdeBlowup),
        Arc::new(ComparisonProperty),
        Arc::new(HeightBound),
        Arc::new(ConvergenceSweep),
        Arc::new(InequalitySuites),
        Arc::new(BalanceRigidity),
    ]
}

pub fn run_criterion(c: &dyn Criterion, ctx: &SuiteContext) -> (CriterionOutcome, Vec<Check>) {
    let start = Instant::now();
    let checks = c.run(ctx);
    let failures = checks.iter().filter(|k| !k.passed).count();
    let outcome = CriterionOutcome {
        id: c.id(),
        title: c.title(),
        passed: failures == 0 && !checks.is_empty(),
        checks: checks.len(),
        failures,
        first_failure: checks.iter().find(|k| !k.passed).cloned(),
        seconds: start.elapsed().as_secs_f64(),
    };
    (outcome, checks)
}

/// A named group of criteria selectable from the verify command.
pub struct Suite {
    pub description: &'static str,
    pub criteria: Vec<u8>,
}

impl Suite {
    fn new(description: &'static str, criteria: &[u8]) -> Arc<Self> {
        Arc::new(Self {
            description,
            criteria: criteria.to_vec(),
        })
    }
}

pub fn suites() -> Registry<Suite> {
    let mut r: Registry<Suite> = Registry::new("verify suite");
    r.register("oracle", Suite::new("scalar curvature against the warped-product oracle", &[2]))
        .register("mass", Suite::new("mass reproduction, level-set identity, Penrose ratio, balance", &[1, 3, 5, 11]))
        .register("scaling", Suite::new("mass scaling under rescaling", &[4]))
        .register("ode", Suite::new("comparison ODE blow-up and comparison property", &[6, 7]))
        .register("height", Suite::new("height bound over the AdS sweep", &[8]))
        .register("sweep", Suite::new("flat-norm convergence sweep", &[9]))
        .register("inequalities", Suite::new("Minkowski, volume-growth and mean-curvature inequalities", &[10]));
    r
}
