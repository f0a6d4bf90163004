//! Subcommand implementations. Each returns a report and whether its check passed.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use hypermass::corpus::{star_surfaces, DEFAULT_SEED};
use hypermass::curvature::warped_scalar_oracle;
use hypermass::error::Error;
use hypermass::flat::convergence_sweep;
use hypermass::hyperbolic::{Dimension, ScaleKappa};
use hypermass::mass::{mass_level_set_with, penrose_bound, MassReport};
use hypermass::ode::{default_cap, ode_comparison};
use hypermass::profile::{boundary_value, RadialProfile};
use hypermass::registry::{build_profile, curvature_methods, mass_methods, ProfileDocument};
use hypermass::stability::{height_bound_check, minkowski_check, minkowski_sphere_closed_form};
use hypermass::star::StarSurface;
use hypermass::suites::{criteria, run_criterion, suites, SuiteContext};

use crate::config::{config_error, RunConfig};
use crate::output::{json_line, Report};

pub struct Outcome {
    pub report: Report,
    pub passed: bool,
    /// Printed to stderr when the command fails its check.
    pub failure: Option<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn config_err(e: Error) -> anyhow::Error {
    config_error(e.to_string())
}

fn dimension(cfg: &RunConfig) -> anyhow::Result<Dimension> {
    Dimension::new(cfg.n.unwrap_or(3)).map_err(config_err)
}

fn kappa(cfg: &RunConfig) -> anyhow::Result<ScaleKappa> {
    ScaleKappa::new(cfg.kappa.unwrap_or(1.0)).map_err(config_err)
}

/// The profile named by `family` (default ads) or read from a document file.
pub fn profile(cfg: &RunConfig) -> anyhow::Result<(ProfileDocument, RadialProfile)> {
    let doc = match &cfg.profile {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
            ProfileDocument::from_json(&text).map_err(config_err)?
        }
        None => {
            let family = cfg.family.clone().unwrap_or_else(|| "ads".to_string());
            let mut doc = ProfileDocument::new(&family, cfg.n.unwrap_or(3));
            doc.m = Some(cfg.m.unwrap_or(1.0));
            doc.c = cfg.c;
            doc.amplitude = Some(cfg.amplitude.unwrap_or(-1.0));
            doc.rate = cfg.rate.or(Some(hypermass::profile::ExponentialProfile::critical_rate(dimension(cfg)?)));
            doc
        }
    };
    let f = build_profile(&doc).map_err(config_err)?;
    Ok((doc, f))
}

fn label(doc: &ProfileDocument) -> Value {
    json!({"family": doc.kind, "n": doc.n})
}

pub fn mass(cfg: &RunConfig, method: &str) -> anyhow::Result<Outcome> {
    let (doc, f) = profile(cfg)?;
    let kappa = kappa(cfg)?;
    let tol = cfg.mass_tolerances();
    let strategy = mass_methods().get(method).map_err(config_err)?;
    let m_method = strategy.mass(f.as_ref(), kappa, &tol)?;
    let report = if f.h_max() == boundary_value(f.as_ref()) {
        // no regular values: both sides of the identity vanish
        MassReport {
            m_boundary: m_method,
            m_boundary_error: 0.0,
            m_oracle: 0.0,
            m_levelset_bulk: 0.0,
            m_levelset_boundary: 0.0,
            m_levelset_total: 0.0,
            h_used: f.h_max(),
            r_used: f64::NAN,
            residual_identity: m_method.abs(),
            kappa,
            tolerances: tol,
        }
    } else {
        let h = cfg.h.unwrap_or(0.5 * (boundary_value(f.as_ref()) + f.h_max()));
        mass_level_set_with(f.as_ref(), kappa, h, &tol)?
    };
    let passed = report.identity_holds();
    let failure = (!passed).then(|| format!("level-set identity residual {:e} exceeds tolerance", report.residual_identity));
    let document = json!({"profile": label(&doc), "method": method, "m_method": m_method, "report": to_value(&report)});
    Ok(Outcome {
        report: Report::single(document),
        passed,
        failure,
    })
}

pub fn scalar(cfg: &RunConfig, method: &str, points: usize, span: f64) -> anyhow::Result<Outcome> {
    if points < 2 || !(span > 0.0) {
        return Err(config_error("need at least 2 points and a positive span"));
    }
    let (doc, f) = profile(cfg)?;
    let kappa = kappa(cfg)?;
    let strategy = curvature_methods().get(method).map_err(config_err)?;
    let n = f.dimension().as_f64();
    let k = kappa.get();
    let r0 = f.domain_start();
    let mut rows = Vec::with_capacity(points);
    let mut worst = 0.0f64;
    let mut min_curly = f64::INFINITY;
    for i in 0..points {
        let r = r0 + 10f64.powf(-3.0 + (3.0 + span.log10()) * i as f64 / (points - 1) as f64) / k;
        let r_kappa = strategy.r_kappa(f.as_ref(), kappa, r)?;
        let oracle = warped_scalar_oracle(f.as_ref(), kappa, r)?;
        worst = worst.max((r_kappa - oracle).abs() / oracle.abs().max(1.0));
        min_curly = min_curly.min(r_kappa + k * k * n * (n - 1.0));
        rows.push(json!({
            "r": r,
            "R_kappa": r_kappa,
            "curly_R": r_kappa + k * k * n * (n - 1.0),
            "oracle": oracle,
            "difference": r_kappa - oracle,
        }));
    }
    let passed = worst <= 1e-6;
    let failure = (!passed).then(|| format!("method '{method}' differs from the warped-product oracle by {worst:e} (relative)"));
    let document = json!({"profile": label(&doc), "method": method, "kappa": k, "max_relative_difference": worst, "min_curly_R": min_curly,
        "nonnegative_within_reg": min_curly >= -cfg.reg(), "rows": rows});
    Ok(Outcome {
        report: Report::table(document, rows),
        passed,
        failure,
    })
}

pub fn penrose(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let (doc, f) = profile(cfg)?;
    let rep = match penrose_bound(f.as_ref()) {
        Err(Error::EntireProfile) => return Err(config_error("the Penrose-like bound needs a profile with a minimal boundary")),
        other => other?,
    };
    let passed = rep.ratio >= 1.0;
    let document = json!({"profile": label(&doc), "report": to_value(&rep)});
    Ok(Outcome {
        report: Report::single(document),
        passed,
        failure: (!passed).then(|| format!("mass/bound ratio {} is below 1", rep.ratio)),
    })
}

pub fn minkowski(cfg: &RunConfig, radius: Option<f64>, count: usize) -> anyhow::Result<Outcome> {
    let kappa = kappa(cfg)?;
    let surfaces = match radius {
        Some(r) if r > 0.0 => vec![StarSurface::sphere(dimension(cfg)?, r)],
        Some(r) => return Err(config_error(format!("sphere radius must be positive, got {r}"))),
        None => star_surfaces(cfg.seed.unwrap_or(DEFAULT_SEED), count),
    };
    let results: Vec<_> = surfaces.par_iter().map(|s| (s, minkowski_check(s, kappa))).collect();
    let mut rows = Vec::new();
    let mut failure = None;
    for (s, res) in results {
        let rep = match res {
            Ok(rep) => rep,
            Err(e) => {
                failure.get_or_insert(format!("{}: {e}", s.label()));
                continue;
            }
        };
        if rep.margin < -1e-6 {
            failure.get_or_insert(format!("{}: margin {:e}", s.label(), rep.margin));
        }
        rows.push(json!({
            "surface": s.label(),
            "n": s.dimension().get(),
            "lhs": rep.lhs,
            "rhs": rep.rhs,
            "margin": rep.margin,
            "min_mean_curvature": rep.min_mean_curvature,
        }));
    }
    let mut document = json!({"kappa": kappa.get(), "rows": rows});
    if let (Some(r), 1.0) = (radius, kappa.get()) {
        let (lhs, rhs) = minkowski_sphere_closed_form(dimension(cfg)?, r);
        document["closed_form"] = json!({"lhs": lhs, "rhs": rhs, "margin": lhs - rhs});
    }
    Ok(Outcome {
        report: Report::table(document, rows),
        passed: failure.is_none(),
        failure,
    })
}

pub fn height(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let (doc, f) = profile(cfg)?;
    let beta = cfg.beta.unwrap_or(2.0);
    let rep = height_bound_check(f.as_ref(), beta)?;
    let failure = (!rep.verdict).then(|| {
        format!(
            "0 < sup f − h0 < C·m^(1/(n−2)) fails: sup f − h0 = {}, bound = {}",
            rep.sup_minus_h0, rep.bound
        )
    });
    let document = json!({"profile": label(&doc), "report": to_value(&rep)});
    Ok(Outcome {
        report: Report::single(document),
        passed: rep.verdict,
        failure,
    })
}

pub fn ode(cfg: &RunConfig, cap: Option<f64>) -> anyhow::Result<Outcome> {
    let n = dimension(cfg)?;
    let beta = cfg.beta.unwrap_or(2.0);
    let sol = ode_comparison(n, beta, cap.unwrap_or_else(|| default_cap(n))).map_err(config_err)?;
    let gap = (sol.blowup_height - sol.closed_form_blowup).abs();
    let rows: Vec<Value> = sol.samples.iter().map(|&(h, y, dy)| json!({"h": h, "Y": y, "dY": dy})).collect();
    let document = json!({
        "n": n.get(),
        "beta": beta,
        "cap": sol.cap,
        "blowup_numeric": sol.blowup_height,
        "blowup_closed": sol.closed_form_blowup,
        "difference": gap,
        "samples": rows,
    });
    Ok(Outcome {
        report: Report::table(document, rows),
        passed: gap < 1e-4,
        failure: (gap >= 1e-4).then(|| format!("numeric blow-up differs from the closed form by {gap:e}")),
    })
}

pub fn sweep(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let masses = cfg.masses.clone().unwrap_or_else(|| vec![0.5, 0.1, 0.02, 0.004]);
    if masses.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(config_error("masses must be strictly decreasing"));
    }
    let table = convergence_sweep(&masses, cfg.rho.unwrap_or(5.0), dimension(cfg)?, cfg.beta.unwrap_or(2.0))?;
    let rows: Vec<Value> = table.rows.iter().map(to_value).collect();
    let failure = (!table.strictly_decreasing).then(|| {
        let uppers: Vec<String> = table.rows.iter().map(|r| format!("{}", r.flat_upper)).collect();
        format!("flat_upper is not strictly decreasing: {}", uppers.join(", "))
    });
    Ok(Outcome {
        report: Report::table(to_value(&table), rows),
        passed: table.strictly_decreasing,
        failure,
    })
}

pub fn verify(cfg: &RunConfig, selection: Option<&[String]>, inject_fault: bool) -> anyhow::Result<Outcome> {
    let registry = suites();
    let names: Vec<String> = match selection {
        None => registry.names().iter().map(|s| s.to_string()).collect(),
        Some(sel) => sel.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
    };
    if names.is_empty() {
        return Err(config_error("no verify suite selected"));
    }
    let mut ids: Vec<u8> = Vec::new();
    for name in &names {
        ids.extend(registry.get(name).map_err(config_err)?.criteria.iter().copied());
    }
    ids.sort_unstable();
    ids.dedup();
    let methods = curvature_methods();
    let ctx = SuiteContext {
        curvature: methods.get(if inject_fault { "faulty-formula" } else { "formula" }).map_err(config_err)?,
        seed: cfg.seed.unwrap_or(DEFAULT_SEED),
    };
    let selected: Vec<_> = criteria().into_iter().filter(|c| ids.contains(&c.id())).collect();
    let results: Vec<_> = selected.par_iter().map(|c| run_criterion(c.as_ref(), &ctx)).collect();
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut failure = None;
    for (outcome, checks) in &results {
        for check in checks {
            rows.push(to_value(check));
        }
        if let (Some(first), None) = (&outcome.first_failure, &failure) {
            failure = Some(format!("criterion {} ({}) failed; first counterexample: {}", outcome.id, outcome.title, json_line(&to_value(first))));
        }
        summary.push(json!({
            "criterion": outcome.id,
            "title": outcome.title,
            "passed": outcome.passed,
            "checks": outcome.checks,
            "failures": outcome.failures,
        }));
    }
    let passed = results.iter().all(|(o, _)| o.passed);
    let document = json!({"suites": names, "passed": passed, "criteria": summary, "checks": rows});
    Ok(Outcome {
        report: Report::table(document, rows),
        passed,
        failure,
    })
}

/// JSON lines for verify: one per check, then one per criterion.
pub fn verify_lines(doc: &Value) -> String {
    let mut out = String::new();
    for key in ["checks", "criteria"] {
        if let Some(items) = doc[key].as_array() {
            for item in items {
                out.push_str(&json_line(item));
                out.push('\n');
            }
        }
    }
    out
}
