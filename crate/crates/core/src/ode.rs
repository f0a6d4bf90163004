//! The comparison ODE Y′ = c_n(2/(3√3))(Y/(2ω_{n−1}) − 1)^{3/2}, Y(0) = 2βω_{n−1}.
//!
//! With u = Y/(2ω_{n−1}) − 1 it becomes u′ = k u^{3/2}, k = 2(n−1)/(3√3), so
//! u(h)^{−1/2} = u₀^{−1/2} − kh/2 and Y blows up at h* = 3√3/((n−1)√(β−1)).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperbolic::Dimension;

/// Closed-form blow-up height 3√3/((n−1)√(β−1)).
pub fn closed_form_blowup(n: Dimension, beta: f64) -> f64 {
    3.0 * 3f64.sqrt() / ((n.as_f64() - 1.0) * (beta - 1.0).sqrt())
}

fn growth_constant(n: Dimension) -> f64 {
    2.0 * (n.as_f64() - 1.0) / (3.0 * 3f64.sqrt())
}

/// Right-hand side of the comparison ODE.
pub fn comparison_rhs(n: Dimension, y: f64) -> f64 {
    let omega = n.omega();
    let u = (y / (2.0 * omega) - 1.0).max(0.0);
    n.c_n() * (2.0 / (3.0 * 3f64.sqrt())) * u.powf(1.5)
}

/// Exact solution of the comparison ODE for h below the blow-up height.
pub fn closed_form_y(n: Dimension, beta: f64, h: f64) -> f64 {
    let omega = n.omega();
    let s = (beta - 1.0).powf(-0.5) - 0.5 * growth_constant(n) * h;
    2.0 * omega * (1.0 + s.powi(-2))
}

/// Numerical solution with blow-up detection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeSolution {
    pub beta: f64,
    pub n: Dimension,
    /// Accepted steps (h, Y, Y′).
    pub samples: Vec<(f64, f64, f64)>,
    /// Height at which Y crossed the cap plus the closed-form remaining distance.
    pub blowup_height: f64,
    pub closed_form_blowup: f64,
    pub cap: f64,
}

impl OdeSolution {
    /// Y(h) by cubic Hermite interpolation between accepted steps.
    pub fn value_at(&self, h: f64) -> Option<f64> {
        let idx = self.samples.partition_point(|s| s.0 <= h);
        if idx == 0 || idx >= self.samples.len() {
            return None;
        }
        let (h0, y0, d0) = self.samples[idx - 1];
        let (h1, y1, d1) = self.samples[idx];
        let dh = h1 - h0;
        let t = (h - h0) / dh;
        let (t2, t3) = (t * t, t * t * t);
        Some(
            (2.0 * t3 - 3.0 * t2 + 1.0) * y0
                + (t3 - 2.0 * t2 + t) * dh * d0
                + (-2.0 * t3 + 3.0 * t2) * y1
                + (t3 - t2) * dh * d1,
        )
    }

    pub fn last_height(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.0)
    }
}

// Dormand–Prince 5(4) tableau; the ODE is autonomous so the nodes c_i are not needed
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step; returns (y_new, error estimate).
fn dp_step(rhs: &dyn Fn(f64) -> f64, y: f64, dh: f64) -> (f64, f64) {
    let mut k = [0.0; 7];
    for i in 0..7 {
        let mut yi = y;
        for j in 0..i {
            yi += dh * A[i][j] * k[j];
        }
        k[i] = rhs(yi);
    }
    let y5: f64 = y + dh * (0..7).map(|i| B5[i] * k[i]).sum::<f64>();
    let y4: f64 = y + dh * (0..7).map(|i| B4[i] * k[i]).sum::<f64>();
    (y5, (y5 - y4).abs())
}

const RTOL: f64 = 1e-12;
const MAX_STEPS: usize = 200_000;

/// Integrates the comparison ODE until Y exceeds `cap`, then adds the closed-form
/// remaining distance 2u^{−1/2}/k of the tail.
pub fn ode_comparison(n: Dimension, beta: f64, cap: f64) -> Result<OdeSolution> {
    if !(beta > 1.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta must exceed 1 for blow-up, got {beta}")));
    }
    let omega = n.omega();
    if !(cap > 2.0 * beta * omega) {
        return Err(Error::InvalidParameter(format!("cap {cap} must exceed Y(0) = {}", 2.0 * beta * omega)));
    }
    let rhs = |y: f64| comparison_rhs(n, y);
    let mut h = 0.0;
    let mut y = 2.0 * beta * omega;
    let mut dh = 1e-3 * closed_form_blowup(n, beta);
    let mut samples = vec![(h, y, rhs(y))];
    for _ in 0..MAX_STEPS {
        let (y_new, err) = dp_step(&rhs, y, dh);
        if !y_new.is_finite() || y_new < y {
            dh *= 0.5;
            continue;
        }
        let scale = RTOL * y_new.abs().max(y.abs());
        if err > scale {
            dh *= (0.9 * (scale / err).powf(0.2)).clamp(0.1, 0.5);
            continue;
        }
        h += dh;
        y = y_new;
        samples.push((h, y, rhs(y)));
        if y > cap {
            let u = y / (2.0 * omega) - 1.0;
            let tail = 2.0 * u.powf(-0.5) / growth_constant(n);
            return Ok(OdeSolution {
                beta,
                n,
                samples,
                blowup_height: h + tail,
                closed_form_blowup: closed_form_blowup(n, beta),
                cap,
            });
        }
        let grow = if err == 0.0 { 5.0 } else { (0.9 * (scale / err).powf(0.2)).clamp(1.0, 5.0) };
        dh *= grow;
    }
    Err(Error::NonConvergence(format!("comparison ODE did not reach cap {cap} in {MAX_STEPS} steps")))
}

/// Default blow-up cap 1e9·ω_{n−1}.
pub fn default_cap(n: Dimension) -> f64 {
    1e9 * n.omega()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn blowup_examples() {
        assert!((closed_form_blowup(dim(3), 2.0) - 2.598_076_211_353_316).abs() < 1e-12);
        assert!((closed_form_blowup(dim(4), 2.0) - 3f64.sqrt()).abs() < 1e-12);
        assert!(closed_form_blowup(dim(3), 1.0 + 1e-10) > 1e5);
    }

    #[test]
    fn numeric_blowup_matches_closed_form() {
        for n in 3..=7 {
            for &beta in &[1.5, 2.0, 4.0] {
                let sol = ode_comparison(dim(n), beta, default_cap(dim(n))).unwrap();
                assert!((sol.blowup_height - sol.closed_form_blowup).abs() < 1e-4, "n={n} β={beta}");
                assert!(sol.samples.windows(2).all(|w| w[1].1 > w[0].1));
                assert_eq!(sol.samples[0].1, 2.0 * beta * dim(n).omega());
            }
        }
    }

    #[test]
    fn dense_output_tracks_exact_solution() {
        let n = dim(3);
        let sol = ode_comparison(n, 2.0, default_cap(n)).unwrap();
        for i in 1..50 {
            let h = sol.closed_form_blowup * 0.9 * i as f64 / 50.0;
            let exact = closed_form_y(n, 2.0, h);
            let y = sol.value_at(h).unwrap();
            assert!((y / exact - 1.0).abs() < 1e-9, "h={h}");
        }
    }

    #[test]
    fn rejects_beta_at_most_one() {
        assert!(ode_comparison(dim(3), 1.0, 1e12).is_err());
        assert!(ode_comparison(dim(3), 0.5, 1e12).is_err());
    }
}
