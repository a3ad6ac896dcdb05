//! The integral inequality on compact tori:
//!
//! ```text
//! ∫_M S_g e^{(m−1)ψ} ω^m  ≤  ∫_M tr_g f*Ric⁽¹⁾_m(h)|_Σ e^{(m−1)ψ} ω^m
//! ```
//!
//! where `Σ = ∂f(T_pM)` at nondegenerate points. The pulled-back form is
//! evaluated in normalized frames as `Σ_γ λ_γ² Σ_{i<m} R^N(Q_γ, Q̄_γ, Q_i, Q̄_i)`,
//! with `Q_1..Q_m` the leading target frame vectors (they span the image of
//! `∂f` wherever it has rank `m`, and the `λ_γ² = 0` weights kill the rest).
//!
//! The domain is a product of one-dimensional tori sampled on a cell-centred
//! grid, so the rule is the periodic trapezoid rule. The volume form `ω^m/m!`
//! is `det g` times the Lebesgue measure in the chart coordinates; the common
//! factor `m!` is dropped.

use rayon::prelude::*;
use serde::Serialize;

use super::{GridKind, GridSpec};
use crate::geometry::{point_curvature, MetricField};
use crate::linalg::{max_abs, CompensatedSum};
use crate::maps::{self, normalized_frame_from, pullback_matrix, rank_of, HolomorphicMapField};
use crate::wirtinger::{fmt_coords, holomorphic_jets, ChartPoint, FdConfig};
use crate::{CMatrix, Error, Result, C64};

/// Relative mismatch allowed between the fields at `x` and `x + ω`.
const PERIODIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `|I_N − I_{N/2}|` for each side.
    pub lhs_error: f64,
    pub rhs_error: f64,
    /// `lhs_error + rhs_error`.
    pub quadrature_error_estimate: f64,
    /// `rhs − lhs`.
    pub margin: f64,
    pub pass: bool,
    pub points: usize,
    /// Whether `∂f` has rank `m` at some grid point.
    pub nondegenerate: bool,
    pub max_periodicity_mismatch: f64,
    pub notes: Vec<String>,
}

/// Integrand values `(S_g w, tr_g f*Ric w)` with `w = e^{(m−1)ψ} det g`.
fn densities(
    g: &MetricField,
    h: &MetricField,
    f: &HolomorphicMapField,
    psi: &(dyn Fn(&[C64]) -> f64 + Sync),
    p: &ChartPoint,
    cfg: &FdConfig,
) -> Result<(f64, f64, usize)> {
    let m = g.dim();
    let gv = g.at(p.coords())?;
    let fp = f.value_at(p.coords())?;
    let hv = h.at(&fp)?;
    let jets = holomorphic_jets(f, p, cfg)?;
    let frame = normalized_frame_from(&gv, &hv, &jets.jac)?;
    let s_g = point_curvature(g, p, cfg)?.scalar();
    let target = point_curvature(h, &ChartPoint::new(fp)?, cfg)?;
    let sigma = frame.q.columns(0, m).into_owned();
    let rf = target.r.in_frame(&sigma)?;
    let mut tr = 0.0;
    for (gam, lam) in frame.lambdas.iter().enumerate() {
        let ric: f64 = (0..m).map(|i| rf.get(gam, gam, i, i).re).sum();
        tr += lam * lam * ric;
    }
    let weight = ((m as f64 - 1.0) * psi(p.coords())).exp() * gv.determinant().re;
    let (a, b) = (s_g * weight, tr * weight);
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite {
            label: "integrand".into(),
            point: p.to_string(),
        });
    }
    Ok((a, b, rank_of(&frame.lambdas)))
}

fn quadrature(
    g: &MetricField,
    h: &MetricField,
    f: &HolomorphicMapField,
    psi: &(dyn Fn(&[C64]) -> f64 + Sync),
    grid: &GridSpec,
    cfg: &FdConfig,
) -> Result<(f64, f64, usize, bool)> {
    let points = grid.points()?;
    let values = points
        .par_iter()
        .map(|p| densities(g, h, f, psi, p, cfg))
        .collect::<Result<Vec<_>>>()?;
    let (mut lhs, mut rhs) = (CompensatedSum::default(), CompensatedSum::default());
    let mut full_rank = false;
    for (a, b, r) in &values {
        lhs.add(*a);
        rhs.add(*b);
        full_rank |= *r == g.dim();
    }
    let vol = grid.torus_cell_volume();
    Ok((lhs.total() * vol, rhs.total() * vol, points.len(), full_rank))
}

/// The two integrands `(S_g, tr_g f*Ric⁽¹⁾_m(h)|_Σ)·e^{(m−1)ψ}·det g` at
/// every grid point, in grid order.
pub fn integral_densities(
    g: &MetricField,
    h: &MetricField,
    f: &HolomorphicMapField,
    grid: &GridSpec,
    psi: &(dyn Fn(&[C64]) -> f64 + Sync),
    cfg: &FdConfig,
) -> Result<Vec<(ChartPoint, f64, f64)>> {
    maps::check_dims(g, h, f)?;
    let points = grid.points()?;
    points
        .par_iter()
        .map(|p| densities(g, h, f, psi, p, cfg).map(|(a, b, _)| (p.clone(), a, b)))
        .collect()
}

/// Compares the exact fields behind the integrands (`g`, `ψ` and the
/// pullback `f*h`) at `x` and at `x` shifted by each generator. The
/// densities themselves carry finite-difference noise well above the
/// tolerance, so they are not compared directly.
fn periodicity_mismatch(
    g: &MetricField,
    h: &MetricField,
    f: &HolomorphicMapField,
    psi: &(dyn Fn(&[C64]) -> f64 + Sync),
    grid: &GridSpec,
    cfg: &FdConfig,
) -> Result<f64> {
    let m = g.dim();
    let fields = |p: &ChartPoint| -> Result<(CMatrix, f64, CMatrix)> {
        let gv = g.at(p.coords())?;
        let hv = h.at(&f.value_at(p.coords())?)?;
        let jets = holomorphic_jets(f, p, cfg)?;
        Ok((gv, psi(p.coords()), pullback_matrix(&jets.jac, &hv)))
    };
    let rel = |a: &CMatrix, b: &CMatrix| max_abs(&(a - b)) / max_abs(a).max(1.0);
    let mut worst: f64 = 0.0;
    for a in 0..m {
        let [w1, w2] = grid.lattice[a];
        for t in [0.2, 0.45, 0.7] {
            for (x_dir, shift) in [(w2, w1), (w1, w2)] {
                // a point off the lattice lines, generic in the other axes
                let mut base: Vec<C64> = (0..m)
                    .map(|b| {
                        let [u1, u2] = grid.lattice[b];
                        u1 * 0.31 + u2 * 0.17
                    })
                    .collect();
                base[a] = x_dir * t + shift * 0.13;
                let mut moved = base.clone();
                moved[a] += shift;
                let p = ChartPoint::new(base)?;
                let (g0, psi0, a0) = fields(&p)?;
                let (g1, psi1, a1) = fields(&ChartPoint::new(moved)?)?;
                let mismatch = rel(&g0, &g1)
                    .max((psi0 - psi1).abs() / psi0.abs().max(1.0))
                    .max(rel(&a0, &a1));
                if !(mismatch <= PERIODIC_TOL) {
                    return Err(Error::NotPeriodic {
                        point: fmt_coords(p.coords()),
                        mismatch,
                    });
                }
                worst = worst.max(mismatch);
            }
        }
    }
    Ok(worst)
}

/// Evaluates both sides with error estimates from a grid of half the
/// resolution; passes when `lhs ≤ rhs + lhs_error + rhs_error + 1e-9`.
pub fn integral_inequality_check(
    g: &MetricField,
    h: &MetricField,
    f: &HolomorphicMapField,
    grid: &GridSpec,
    psi: &(dyn Fn(&[C64]) -> f64 + Sync),
    cfg: &FdConfig,
) -> Result<IntegralReport> {
    maps::check_dims(g, h, f)?;
    if grid.kind != GridKind::Torus {
        return Err(Error::invalid("the integral check needs a torus grid"));
    }
    grid.validate()?;
    if grid.resolution.iter().any(|&r| r < 8) {
        return Err(Error::invalid("torus resolution must be at least 8 so the halved grid has 4 points per axis"));
    }
    if grid.dim() != g.dim() {
        return Err(Error::invalid(format!(
            "grid has {} torus factors, domain dimension is {}",
            grid.dim(),
            g.dim()
        )));
    }
    let max_periodicity_mismatch = periodicity_mismatch(g, h, f, psi, grid, cfg)?;
    let (lhs, rhs, points, nondegenerate) = quadrature(g, h, f, psi, grid, cfg)?;
    let (lhs_half, rhs_half, _, _) = quadrature(g, h, f, psi, &grid.torus_coarsened(), cfg)?;
    let (lhs_error, rhs_error) = ((lhs - lhs_half).abs(), (rhs - rhs_half).abs());
    let mut notes = Vec::new();
    if !nondegenerate {
        notes.push("∂f has rank < m at every grid point; the map is degenerate on the grid".to_string());
    }
    Ok(IntegralReport {
        lhs,
        rhs,
        lhs_error,
        rhs_error,
        quadrature_error_estimate: lhs_error + rhs_error,
        margin: rhs - lhs,
        pass: lhs <= rhs + lhs_error + rhs_error + 1e-9,
        points,
        nondegenerate,
        max_periodicity_mismatch,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::linalg::c;
    use crate::registry::{build_map, build_metric, Params};

    fn params(json: &str) -> Params {
        serde_json::from_str(json).unwrap()
    }

    fn zero(_: &[C64]) -> f64 {
        0.0
    }

    #[test]
    fn affine_torus_is_equality_case() {
        let g = build_metric("flat_torus", &params("{}")).unwrap();
        let f = build_map("affine_torus", &params(r#"{"a": 2}"#)).unwrap();
        let grid = GridSpec::torus([c(1.0, 0.0), c(0.0, 1.0)], 8, 8);
        let r = integral_inequality_check(&g, &g, &f, &grid, &zero, &FdConfig::default()).unwrap();
        assert!(r.lhs.abs() <= 1e-9 && r.rhs.abs() <= 1e-9, "{r:?}");
        assert!(r.pass && r.nondegenerate);
    }

    #[test]
    fn weierstrass_to_sphere_gives_degree_times_area() {
        let g = build_metric("flat_torus", &params("{}")).unwrap();
        let h = build_metric("fubini_study_m", &params(r#"{"m": 1}"#)).unwrap();
        let f = build_map("weierstrass_p", &params("{}")).unwrap();
        let grid = GridSpec::torus([c(1.0, 0.0), c(0.0, 1.0)], 32, 32);
        let r = integral_inequality_check(&g, &h, &f, &grid, &zero, &FdConfig::default()).unwrap();
        assert!(r.lhs.abs() <= 1e-9);
        // degree 2 onto a sphere of area π with Ricci curvature 2
        assert!((r.rhs - 4.0 * PI).abs() < 0.01 * 4.0 * PI, "{}", r.rhs);
        assert!(r.pass);
    }

    #[test]
    fn rejects_non_periodic_integrands() {
        let g = build_metric("conformal_flat_m", &params(r#"{"m": 1}"#)).unwrap();
        let f = build_map("identity", &params(r#"{"m": 1}"#)).unwrap();
        let grid = GridSpec::torus([c(1.0, 0.0), c(0.0, 1.0)], 8, 8);
        let err = integral_inequality_check(&g, &g, &f, &grid, &zero, &FdConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NotPeriodic { .. }), "{err}");
    }

    #[test]
    fn rejects_non_torus_grids() {
        let g = build_metric("flat_torus", &params("{}")).unwrap();
        let f = build_map("identity", &params(r#"{"m": 1}"#)).unwrap();
        let grid = GridSpec::disk_polar(4, 8, 0.0, 0.5);
        assert!(integral_inequality_check(&g, &g, &f, &grid, &zero, &FdConfig::default()).is_err());
    }
}
