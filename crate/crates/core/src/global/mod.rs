//! Grid-based checks: Kähler and Gauduchon tests, Schwarz-type estimates,
//! rigidity witnesses and the torus integral inequality.

mod grid;
mod integral;
mod schwarz;

use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::MetricField;
use crate::wirtinger::{field_jet, ChartPoint, FdConfig};
use crate::{Error, Result};

pub use grid::{GridKind, GridSpec};
pub use integral::{integral_densities, integral_inequality_check, IntegralReport};
pub use schwarz::{
    check_estimate_a, check_estimate_b, check_estimate_c, rigidity_witness, EstimateReport, HypothesisProbe,
    PointValue, ProbeOptions, RigidityReport, RigidityWitness,
};

/// Kähler residuals below this count as closed.
pub const KAHLER_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub pass: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub worst_point: Option<ChartPoint>,
    pub points_checked: usize,
}

fn worst(values: Vec<(ChartPoint, f64)>, tolerance: f64) -> PropertyReport {
    let points_checked = values.len();
    let mut best: Option<(ChartPoint, f64)> = None;
    for (p, r) in values {
        if best.as_ref().is_none_or(|(_, b)| r > *b) {
            best = Some((p, r));
        }
    }
    let (worst_point, residual) = match best {
        Some((p, r)) => (Some(p), r),
        None => (None, 0.0),
    };
    PropertyReport {
        pass: residual <= tolerance,
        residual,
        tolerance,
        worst_point,
        points_checked,
    }
}

/// `max |g_{αβ̄,γ} − g_{γβ̄,α}|` over the points; Kähler when ≤ 1e-7.
pub fn kahler_check(g: &MetricField, points: &[ChartPoint], cfg: &FdConfig) -> Result<PropertyReport> {
    let values = points
        .par_iter()
        .map(|p| {
            let jet = g.jet(p, cfg)?;
            let m = g.dim();
            let mut r: f64 = 0.0;
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        r = r.max((jet.d.get(a, b, c) - jet.d.get(c, b, a)).norm());
                    }
                }
            }
            Ok((p.clone(), r))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(worst(values, KAHLER_TOL))
}

/// Tests `∂∂̄(ω^{m−1}) = 0` through its only independent coefficient,
/// `Σ_{a,b} ∂_a ∂_b̄ (det g · g^{a b̄})`. Always true for `m = 1`.
pub fn gauduchon_check(g: &MetricField, points: &[ChartPoint], cfg: &FdConfig) -> Result<PropertyReport> {
    let m = g.dim();
    if m == 1 {
        return Ok(worst(points.iter().map(|p| (p.clone(), 0.0)).collect(), 0.0));
    }
    let values = points
        .par_iter()
        .map(|p| {
            g.at(p.coords())?;
            // adjugate entries det(G)·(G⁻¹)[(b, a)] = det g · g^{a b̄}, flattened at a·m + b
            let field = |z: &[crate::C64]| -> Vec<crate::C64> {
                let gz = g.eval(z);
                let det = gz.determinant();
                match gz.try_inverse() {
                    Some(inv) => (0..m * m).map(|c| det * inv[(c % m, c / m)]).collect(),
                    None => vec![crate::C64::new(f64::NAN, 0.0); m * m],
                }
            };
            let jet = field_jet(field, &g.domain_fn(), p, cfg, g.label())?;
            let mut s = crate::C64::new(0.0, 0.0);
            for a in 0..m {
                for b in 0..m {
                    s += jet.ddbar[a][b][a * m + b];
                }
            }
            Ok((p.clone(), s.norm(), jet.error_estimate))
        })
        .collect::<Result<Vec<_>>>()?;
    let est = values.iter().map(|v| v.2).fold(0.0, f64::max);
    let tol = cfg.residual_tolerance(est).min(1e-5).max(1e-7);
    Ok(worst(values.into_iter().map(|(p, r, _)| (p, r)).collect(), tol))
}

pub(crate) fn require_points(points: &[ChartPoint]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::invalid("at least one point is required"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::registry::{build_metric, Params};

    fn metric(id: &str, json: &str) -> MetricField {
        build_metric(id, &serde_json::from_str::<Params>(json).unwrap()).unwrap()
    }

    fn pts2() -> Vec<ChartPoint> {
        vec![
            ChartPoint::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap(),
            ChartPoint::new(vec![c(0.3, -0.5), c(0.4, 0.2)]).unwrap(),
        ]
    }

    #[test]
    fn kahler_discrimination() {
        let fs = kahler_check(&metric("fubini_study_m", r#"{"m": 2}"#), &pts2(), &FdConfig::default()).unwrap();
        assert!(fs.pass, "{}", fs.residual);
        let hopf = kahler_check(&metric("hopf_m", r#"{"m": 2}"#), &pts2()[..1], &FdConfig::default()).unwrap();
        assert!(!hopf.pass);
        // ∂_2 g_{11̄} − ∂_1 g_{21̄} = −z̄₂/|z|⁴ vanishes at (1, 0); ∂_1 g_{22̄} − ∂_2 g_{12̄} = −z̄₁ = −1
        assert!((hopf.residual - 1.0).abs() < 1e-8);
    }

    #[test]
    fn gauduchon_examples() {
        let cfg = FdConfig::default();
        assert!(gauduchon_check(&metric("flat_m", r#"{"m": 3}"#), &pts2().iter().map(|p| {
            let mut v = p.coords().to_vec();
            v.push(c(0.1, 0.1));
            ChartPoint::new(v).unwrap()
        }).collect::<Vec<_>>(), &cfg).unwrap().pass);
        assert!(gauduchon_check(&metric("poincare_disk", "{}"), &[ChartPoint::scalar(0.3, 0.1)], &cfg).unwrap().pass);
        let hopf = gauduchon_check(&metric("hopf_m", r#"{"m": 2}"#), &pts2(), &cfg).unwrap();
        assert!(hopf.pass, "{}", hopf.residual);
        let conf = metric("conformal_flat_m", r#"{"m": 2}"#);
        let p = ChartPoint::new(vec![c(0.5, 0.2), c(-0.1, 0.3)]).unwrap();
        let r = gauduchon_check(&conf, &[p], &cfg).unwrap();
        assert!(!r.pass);
        let expected = 0.25 * (2.0 + 4.0 * 0.25) * (0.25f64).exp();
        assert!((r.residual - expected).abs() < 1e-7, "{} vs {expected}", r.residual);
    }
}
