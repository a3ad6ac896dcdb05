//! Schwarz-type estimates on grids and rigidity witnesses at grid maxima.
//!
//! Each estimate probes the curvature hypotheses empirically (`K` from the
//! domain, `κ` from the target at image points), evaluates the map quantity
//! at every grid point and compares its maximum with the bound:
//!
//! | part | domain `≥ −K`        | target `≤ −κ`             | quantity        | bound          |
//! |------|----------------------|---------------------------|-----------------|----------------|
//! | a    | `S`                  | `Ric⁽¹⁾_m` on unit vectors | `W_m`           | `(K/(mκ))^m`   |
//! | b    | `S_ℓ` (g Kähler)     | `Ric⁽¹⁾_ℓ` on unit vectors | `Π_{α≤ℓ} λ_α²`  | `(K/(ℓκ))^ℓ`   |
//! | c    | `Ric⁽²⁾_ℓ` on unit vectors | `B̃`                 | `σ_ℓ`           | `ℓK/κ`         |
//!
//! Only the pointwise conclusion is checked; the grid need not cover a compact
//! manifold.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{kahler_check, require_points, GridSpec};
use crate::bochner::{normalize_scene, psi_trace, verify_eq1_scene, verify_eq2_scene};
use crate::geometry::{point_curvatures, probe_curvatures, MetricField, ProbeKind, ProbeSettings, ProbeWitness};
use crate::maps::{self, normalized_frame_from, pullback_matrix, scalars_from, HolomorphicMapField, MapScalars};
use crate::wirtinger::{holomorphic_jets, ChartPoint, FdConfig};
use crate::{Error, Result};

const NOTE: &str = "pointwise conclusion checked on a grid; compactness of the domain is not assumed";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeOptions {
    pub n_samples: usize,
    pub seed: u64,
    pub refine_steps: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            n_samples: 8,
            seed: 0,
            refine_steps: 50,
        }
    }
}

impl ProbeOptions {
    fn settings(&self, ell: usize) -> ProbeSettings {
        ProbeSettings {
            ell,
            n_samples: self.n_samples,
            seed: self.seed,
            refine_steps: self.refine_steps,
        }
    }
}

/// Probed curvature constants with the frames that attain them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisProbe {
    pub k: f64,
    pub kappa: f64,
    pub k_source: String,
    pub kappa_source: String,
    /// Domain point attaining the most negative domain curvature.
    pub k_point: ChartPoint,
    pub k_witness: Option<ProbeWitness>,
    /// Witness frame at the image point attaining the least negative target curvature.
    pub kappa_witness: ProbeWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointValue {
    pub point: ChartPoint,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub part: String,
    pub ell: usize,
    pub hypothesis_probe: HypothesisProbe,
    pub bound: f64,
    pub observed_max: f64,
    pub argmax: ChartPoint,
    /// `bound − observed_max`.
    pub margin: f64,
    pub points_checked: usize,
    pub pass: bool,
    pub values: Vec<PointValue>,
    pub note: String,
}

/// Map scalars and normalized frame data at one grid point.
struct GridSample {
    point: ChartPoint,
    image: ChartPoint,
    lambdas: Vec<f64>,
    scalars: MapScalars,
}

fn sample_grid(
    g: &MetricField,
    h: &MetricField,
    f: &HolomorphicMapField,
    points: &[ChartPoint],
    cfg: &FdConfig,
) -> Result<Vec<GridSample>> {
    maps::check_dims(g, h, f)?;
    require_points(points)?;
    points
        .par_iter()
        .map(|p| {
            let gv = g.at(p.coords())?;
            let fp = f.value_at(p.coords())?;
            let hv = h.at(&fp)?;
            let jets = holomorphic_jets(f, p, cfg)?;
            let frame = normalized_frame_from(&gv, &hv, &jets.jac)?;
            let scalars = scalars_from(&gv, &pullback_matrix(&jets.jac, &hv), &frame.lambdas)?;
            Ok(GridSample {
                point: p.clone(),
                image: ChartPoint::new(fp)?,
                lambdas: frame.lambdas,
                scalars,
            })
        })
        .collect()
}

fn target_probe(
    h: &MetricField,
    samples: &[GridSample],
    kind: ProbeKind,
    ell: usize,
    opts: &ProbeOptions,
    cfg: &FdConfig,
) -> Result<(f64, ProbeWitness)> {
    let images: Vec<ChartPoint> = samples.iter().map(|s| s.image.clone()).collect();
    let curv = point_curvatures(h, &images, cfg)?;
    let r = probe_curvatures(&curv, kind, &opts.settings(ell))?;
    Ok((-r.max, r.max_witness))
}

fn domain_probe(
    g: &MetricField,
    points: &[ChartPoint],
    kind: ProbeKind,
    ell: usize,
    opts: &ProbeOptions,
    cfg: &FdConfig,
) -> Result<(f64, ChartPoint, ProbeWitness)> {
    let curv = point_curvatures(g, points, cfg)?;
    let r = probe_curvatures(&curv, kind, &opts.settings(ell))?;
    Ok(((-r.min).max(0.0), r.min_witness.point.clone(), r.min_witness))
}

fn require_kappa(kappa: f64, what: &str) -> Result<()> {
    if !(kappa > 0.0) {
        return Err(Error::HypothesisFail(format!(
            "target {what} is not bounded above by a negative constant on the probed points (κ = {kappa:e})"
        )));
    }
    Ok(())
}

fn finish(
    part: &str,
    ell: usize,
    hypothesis_probe: HypothesisProbe,
    bound: f64,
    samples: &[GridSample],
    quantity: impl Fn(&GridSample) -> f64,
) -> EstimateReport {
    let values: Vec<PointValue> = samples
        .iter()
        .map(|s| PointValue {
            point: s.point.clone(),
            value: quantity(s),
        })
        .collect();
    let (mut observed_max, mut argmax) = (f64::NEG_INFINITY, values[0].point.clone());
    for v in &values {
        if v.value > observed_max {
            observed_max = v.value;
            argmax = v.point.clone();
        }
    }
    EstimateReport {
        part: part.to_string(),
        ell,
        hypothesis_probe,
        bound,
        observed_max,
        argmax,
        margin: bound - observed_max,
        points_checked: values.len(),
        pass: values.iter().all(|v| v.value <= bound * (1.0 + 1e-9)),
        values,
        note: NOTE.to_string(),
    }
}

/// `W_m ≤ (K/(mκ))^m` with `S ≥ −K` on the domain and `Ric⁽¹⁾_m ≤ −κ` on the target.
pub fn check_estimate_a(
    g: &MetricField,
    h: &MetricField,
    f: &HolomorphicMapField,
    grid: &GridSpec,
    opts: &ProbeOptions,
    cfg: &FdConfig,
) -> Result<EstimateReport> {
    let m = g.dim();
    if m > h.dim() {
        return Err(Error::invalid("the estimate needs dim M ≤ dim N"));
    }
    let points = grid.points()?;
    let samples = sample_grid(g, h, f, &points, cfg)?;
    let curv = point_curvatures(g, &points, cfg)?;
    let (mut s_min, mut k_point) = (f64::INFINITY, points[0].clone());
    for (p, pc) in &curv {
        let s = pc.scalar();
        if s < s_min {
            s_min = s;
            k_point = p.clone();
        }
    }
    let k = (-s_min).max(0.0);
    let (kappa, kappa_witness) = target_probe(h, &samples, ProbeKind::RicciFirst, m, opts, cfg)?;
    require_kappa(kappa, "first ℓ-Ricci curvature (ℓ = m)")?;
    let probe = HypothesisProbe {
        k,
        kappa,
        k_source: "Chern scalar curvature of the domain".into(),
        kappa_source: format!("Ric^(1)_{m} of the target at image points"),
        k_point,
        k_witness: None,
        kappa_witness,
    };
    let bound = (k / (m as f64 * kappa)).powi(m as i32);
    Ok(finish("a", m, probe, bound, &samples, |s| s.scalars.w[m - 1]))
}

/// `Π_{α≤ℓ} λ_α² ≤ (K/(ℓκ))^ℓ` for Kähler domains, `S_ℓ ≥ −K`, `Ric⁽¹⁾_ℓ ≤ −κ`.
pub fn check_estimate_b(
    g: &MetricField,
    h: &MetricField,
    f: &HolomorphicMapField,
    grid: &GridSpec,
    ell: usize,
    opts: &ProbeOptions,
    cfg: &FdConfig,
) -> Result<EstimateReport> {
    let m = g.dim();
    if ell == 0 || ell >= m {
        return Err(Error::invalid(format!("estimate (b) needs 1 ≤ ℓ < m = {m}, got {ell}")));
    }
    let points = grid.points()?;
    let kahler = kahler_check(g, &points, cfg)?;
    if !kahler.pass {
        return Err(Error::KahlerRequired {
            residual: kahler.residual,
        });
    }
    let samples = sample_grid(g, h, f, &points, cfg)?;
    let (k, k_point, k_witness) = domain_probe(g, &points, ProbeKind::ScalarL, ell, opts, cfg)?;
    let (kappa, kappa_witness) = target_probe(h, &samples, ProbeKind::RicciFirst, ell, opts, cfg)?;
    require_kappa(kappa, "first ℓ-Ricci curvature")?;
    let probe = HypothesisProbe {
        k,
        kappa,
        k_source: format!("S_{ell} of the domain over ℓ-subspaces"),
        kappa_source: format!("Ric^(1)_{ell} of the target at image points"),
        k_point,
        k_witness: Some(k_witness),
        kappa_witness,
    };
    let bound = (k / (ell as f64 * kappa)).powi(ell as i32);
    Ok(finish("b", ell, probe, bound, &samples, |s| s.scalars.wedge0[ell - 1].powi(2)))
}

/// `σ_ℓ ≤ ℓK/κ` with `Ric⁽²⁾_ℓ ≥ −K` on the domain and `B̃ ≤ −κ` on the target.
pub fn check_estimate_c(
    g: &MetricField,
    h: &MetricField,
    f: &HolomorphicMapField,
    grid: &GridSpec,
    ell: usize,
    opts: &ProbeOptions,
    cfg: &FdConfig,
) -> Result<EstimateReport> {
    let m = g.dim();
    if ell == 0 || ell > m {
        return Err(Error::invalid(format!("estimate (c) needs 1 ≤ ℓ ≤ m = {m}, got {ell}")));
    }
    let points = grid.points()?;
    let samples = sample_grid(g, h, f, &points, cfg)?;
    let (k, k_point, k_witness) = domain_probe(g, &points, ProbeKind::RicciSecond, ell, opts, cfg)?;
    let (kappa, kappa_witness) = target_probe(h, &samples, ProbeKind::RealBisectional, 1, opts, cfg)?;
    require_kappa(kappa, "real bisectional curvature")?;
    let probe = HypothesisProbe {
        k,
        kappa,
        k_source: format!("Ric^(2)_{ell} of the domain on unit vectors"),
        kappa_source: "real bisectional curvature of the target at image points".into(),
        k_point,
        k_witness: Some(k_witness),
        kappa_witness,
    };
    let bound = ell as f64 * k / kappa;
    Ok(finish("c", ell, probe, bound, &samples, |s| s.scalars.sigma[ell - 1]))
}

/// Bochner data at a grid maximum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityWitness {
    pub point: ChartPoint,
    pub ell: usize,
    /// `W_m` (part a) or `σ_ℓ` (part c) at the point.
    pub value: f64,
    /// For part a: `Σ_γ λ_γ⁻² (·)_{γγ̄}` of each side of the `log W_m`
    /// identity. For part c: the plain trace `Σ_γ (·)_{γγ̄}` of the `U_ℓ` identity.
    pub lhs_trace: f64,
    pub rhs_trace: f64,
    pub curvature_trace: f64,
    pub gram_trace: f64,
    pub residual: f64,
    /// Domain curvature at the point: `S` (part a) or min `Ric⁽²⁾_ℓ` over sampled unit vectors (part c).
    pub domain_curvature: f64,
    /// Target curvature at the image: max `Ric⁽¹⁾_m` (part a) or max `B̃` (part c) over sampled frames.
    pub target_curvature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityReport {
    pub part_a: Option<RigidityWitness>,
    pub part_c: Option<RigidityWitness>,
    pub notes: Vec<String>,
}

/// Locates the grid maxima of `W_m` and `σ_ℓ` and evaluates the Bochner
/// identities there. At an interior maximum the left-hand traces are `≤ 0`,
/// so a positive curvature trace exhibits the contradiction that rules the
/// map out.
pub fn rigidity_witness(
    g: &MetricField,
    h: &MetricField,
    f: &HolomorphicMapField,
    grid: &GridSpec,
    ell: usize,
    opts: &ProbeOptions,
    cfg: &FdConfig,
) -> Result<RigidityReport> {
    let m = g.dim();
    if ell == 0 || ell > m {
        return Err(Error::invalid(format!("ℓ = {ell} must satisfy 1 ≤ ℓ ≤ m = {m}")));
    }
    let points = grid.points()?;
    let samples = sample_grid(g, h, f, &points, cfg)?;
    let mut notes = Vec::new();

    let argmax = |q: &dyn Fn(&GridSample) -> f64| -> &GridSample {
        samples
            .iter()
            .fold(&samples[0], |best, s| if q(s) > q(best) { s } else { best })
    };

    let a = argmax(&|s| s.scalars.w[m - 1]);
    let part_a = if maps::rank_of(&a.lambdas) < m || a.scalars.w[m - 1] <= 0.0 {
        notes.push("part a: ∂f has rank < m at every grid point, no witness".into());
        None
    } else {
        let scene = normalize_scene(g, h, f, &a.point, cfg)?;
        let rep = verify_eq1_scene(&scene, m, cfg)?;
        let curvature = &rep.breakdown.curvature_m + &rep.breakdown.curvature_n;
        let pc = crate::geometry::point_curvature(g, &a.point, cfg)?;
        let tc = point_curvatures(h, std::slice::from_ref(&a.image), cfg)?;
        let target = probe_curvatures(&tc, ProbeKind::RicciFirst, &opts.settings(m))?;
        Some(RigidityWitness {
            point: a.point.clone(),
            ell: m,
            value: a.scalars.w[m - 1],
            lhs_trace: psi_trace(&scene, &rep.lhs)?,
            rhs_trace: psi_trace(&scene, &rep.rhs)?,
            curvature_trace: psi_trace(&scene, &curvature)?,
            gram_trace: psi_trace(&scene, &(&rep.breakdown.metric_derivative + &rep.breakdown.gram))?,
            residual: rep.residual,
            domain_curvature: pc.scalar(),
            target_curvature: target.max,
        })
    };

    let c = argmax(&|s| s.scalars.sigma[ell - 1]);
    let part_c = if c.lambdas[0] <= 0.0 {
        notes.push("part c: ∂f vanishes at every grid point, no witness".into());
        None
    } else {
        let scene = normalize_scene(g, h, f, &c.point, cfg)?;
        let rep = verify_eq2_scene(&scene, ell, cfg)?;
        let tr = |x: &crate::CMatrix| (0..m).map(|k| x[(k, k)].re).sum::<f64>();
        let curvature = &rep.breakdown.curvature_m + &rep.breakdown.curvature_n;
        let dc = point_curvatures(g, std::slice::from_ref(&c.point), cfg)?;
        let domain = probe_curvatures(&dc, ProbeKind::RicciSecond, &opts.settings(ell))?;
        let tc = point_curvatures(h, std::slice::from_ref(&c.image), cfg)?;
        let target = probe_curvatures(&tc, ProbeKind::RealBisectional, &opts.settings(1))?;
        Some(RigidityWitness {
            point: c.point.clone(),
            ell,
            value: c.scalars.sigma[ell - 1],
            lhs_trace: tr(&rep.lhs),
            rhs_trace: tr(&rep.rhs),
            curvature_trace: tr(&curvature),
            gram_trace: tr(&rep.breakdown.gram),
            residual: rep.residual,
            domain_curvature: domain.min,
            target_curvature: target.max,
        })
    };
    Ok(RigidityReport { part_a, part_c, notes })
}
