//! Composite Gauss–Legendre quadrature with panel doubling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper limit on the panel count reached by doubling.
pub const MAX_PANELS: usize = 1 << 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub panels: usize,
    pub nodes_per_panel: usize,
    /// Relative change between successive doublings accepted as converged.
    pub rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            panels: 16,
            nodes_per_panel: 8,
            rel_tol: 1e-9,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.panels < 1 {
            return Err(Error::invalid("panels", "must be at least 1"));
        }
        if self.nodes_per_panel < 2 {
            return Err(Error::invalid("nodes_per_panel", "must be at least 2"));
        }
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return Err(Error::invalid(
                "rel_tol",
                format!("must be positive, got {}", self.rel_tol),
            ));
        }
        Ok(())
    }
}

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess for the i-th largest root.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule on `panels` equal subintervals of `[lo, hi]`.
    pub fn composite<F: Fn(f64) -> f64>(&self, f: &F, lo: f64, hi: f64, panels: usize) -> f64 {
        self.composite_with_magnitude(f, lo, hi, panels).0
    }

    /// Like [`composite`](Self::composite), also returning the same rule
    /// applied to `|f|`.
    fn composite_with_magnitude<F: Fn(f64) -> f64>(&self, f: &F, lo: f64, hi: f64, panels: usize) -> (f64, f64) {
        let width = (hi - lo) / panels as f64;
        let half = 0.5 * width;
        let mut total = 0.0;
        let mut magnitude = 0.0;
        for k in 0..panels {
            let mid = lo + (k as f64 + 0.5) * width;
            let mut panel = 0.0;
            let mut panel_abs = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                let v = f(mid + half * x);
                panel += w * v;
                panel_abs += w * v.abs();
            }
            total += half * panel;
            magnitude += half * panel_abs;
        }
        (total, magnitude)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}

/// Integrates `f` over `[lo, hi]`, doubling the panel count from
/// `cfg.panels` until two successive estimates agree to `cfg.rel_tol`.
///
/// The change is measured against `∫|f|`, so integrals that cancel to
/// (nearly) zero still converge. Nodes are interior, so `f` is never
/// evaluated at the endpoints.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    let rule = GaussLegendre::new(cfg.nodes_per_panel);
    let mut panels = cfg.panels;
    let mut prev = rule.composite(&f, lo, hi, panels);
    let mut last_change = f64::INFINITY;
    let cap = MAX_PANELS.max(2 * cfg.panels);
    while panels < cap {
        panels = (panels * 2).min(cap);
        let (next, scale) = rule.composite_with_magnitude(&f, lo, hi, panels);
        let change = (next - prev).abs();
        if change <= cfg.rel_tol * scale || (change == 0.0 && scale == 0.0) {
            return Ok(next);
        }
        last_change = if scale > 0.0 { change / scale } else { f64::INFINITY };
        prev = next;
    }
    Err(Error::QuadratureNonConvergence {
        rel_tol: cfg.rel_tol,
        panels,
        last_change,
    })
}
