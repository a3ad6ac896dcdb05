//! Empirical min/max of curvature functionals over random frames.
//!
//! Every sample is a complex Gaussian `m × m` matrix (plus Gaussian-modulus
//! weights for the real bisectional curvature), orthonormalized against
//! `g(p)`. Each sample is then refined by coordinate perturbation of its raw
//! entries: a move is kept only when it improves the objective, and the step
//! is halved after a sweep without improvement. Reported values are always
//! attained at a concrete frame, so `min` over-estimates the true minimum and
//! `max` under-estimates the true maximum.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{real_bisectional_in_frame, MetricField, PointCurvature};
use crate::linalg::{self, g_orthonormalize, hermitian_eigen};
use crate::wirtinger::{ChartPoint, FdConfig};
use crate::{CMatrix, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    /// `H(X)` over directions `X`.
    HolomorphicSectional,
    /// `B̃(e, a)` over unitary frames and weights.
    RealBisectional,
    /// `Ric⁽¹⁾_ℓ(Σ)(v, v̄)` over ℓ-subspaces and g-unit `v ∈ Σ`.
    RicciFirst,
    /// `Ric⁽²⁾_ℓ(Σ)(v, v̄)`.
    RicciSecond,
    /// `S_ℓ(Σ)` over ℓ-subspaces.
    ScalarL,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSettings {
    pub ell: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub refine_steps: usize,
}

impl ProbeSettings {
    pub fn new(ell: usize, n_samples: usize, seed: u64) -> Self {
        Self {
            ell,
            n_samples,
            seed,
            refine_steps: 50,
        }
    }
}

/// Frame at which a probe value is attained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeWitness {
    pub point_index: usize,
    pub point: ChartPoint,
    /// g-unitary frame; for subspace kinds the first `ℓ` columns span `Σ`.
    pub frame: CMatrix,
    /// Weights of the real bisectional curvature.
    pub weights: Option<Vec<f64>>,
    /// The g-unit vector `v ∈ Σ` for the ℓ-Ricci kinds.
    pub vector: Option<Vec<C64>>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeResult {
    pub kind: ProbeKind,
    pub ell: usize,
    pub min: f64,
    pub max: f64,
    pub min_witness: ProbeWitness,
    pub max_witness: ProbeWitness,
}

#[derive(Clone)]
struct Params {
    raw: CMatrix,
    weights: Vec<f64>,
}

impl Params {
    fn len(&self) -> usize {
        2 * self.raw.len() + self.weights.len()
    }

    fn get(&self, k: usize) -> f64 {
        let n = self.raw.len();
        if k < 2 * n {
            let z = self.raw[k / 2];
            if k % 2 == 0 {
                z.re
            } else {
                z.im
            }
        } else {
            self.weights[k - 2 * n]
        }
    }

    fn set(&mut self, k: usize, v: f64) {
        let n = self.raw.len();
        if k < 2 * n {
            let z = &mut self.raw[k / 2];
            if k % 2 == 0 {
                z.re = v;
            } else {
                z.im = v;
            }
        } else {
            self.weights[k - 2 * n] = v;
        }
    }
}

/// An evaluated sample: value plus the data needed for a witness.
#[derive(Clone)]
struct Eval {
    value: f64,
    frame: CMatrix,
    weights: Option<Vec<f64>>,
    vector: Option<Vec<C64>>,
}

#[derive(Clone, Copy, PartialEq)]
enum Goal {
    Min,
    Max,
}

impl Goal {
    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Goal::Min => a < b,
            Goal::Max => a > b,
        }
    }
}

fn evaluate(pc: &PointCurvature, kind: ProbeKind, ell: usize, params: &Params, goal: Goal) -> Option<Eval> {
    let frame = g_orthonormalize(&pc.g, &params.raw).ok()?;
    match kind {
        ProbeKind::HolomorphicSectional => {
            let x = linalg::column(&frame, 0);
            let value = pc.holomorphic_sectional(&x).ok()?;
            Some(Eval {
                value,
                frame,
                weights: None,
                vector: None,
            })
        }
        ProbeKind::RealBisectional => {
            let weights: Vec<f64> = params.weights.iter().map(|w| w.abs()).collect();
            if weights.iter().all(|&w| w == 0.0) {
                return None;
            }
            let rf = pc.r.in_frame(&frame).ok()?;
            let value = real_bisectional_in_frame(&rf, &weights);
            Some(Eval {
                value,
                frame,
                weights: Some(weights),
                vector: None,
            })
        }
        ProbeKind::ScalarL => {
            let e = frame.columns(0, ell).into_owned();
            let rf = pc.r.in_frame(&e).ok()?;
            let mut value = 0.0;
            for i in 0..ell {
                for j in 0..ell {
                    value += rf.get(i, i, j, j).re;
                }
            }
            Some(Eval {
                value,
                frame,
                weights: None,
                vector: None,
            })
        }
        ProbeKind::RicciFirst | ProbeKind::RicciSecond => {
            // the quadratic form v ↦ Ric_ℓ(v, v̄) on Σ in the basis E, whose
            // extreme values over unit v are its extreme eigenvalues
            let e = frame.columns(0, ell).into_owned();
            let rf = pc.r.in_frame(&e).ok()?;
            let form = CMatrix::from_fn(ell, ell, |a, b| {
                (0..ell)
                    .map(|i| {
                        if kind == ProbeKind::RicciFirst {
                            rf.get(a, b, i, i)
                        } else {
                            rf.get(i, i, a, b)
                        }
                    })
                    .sum()
            });
            // v = Σ c_a E_a gives Ric = cᵀ F c̄; an eigenvector u of F gives c = ū
            let (vals, vecs) = hermitian_eigen(&form);
            let pick = if goal == Goal::Min { 0 } else { ell - 1 };
            let c: Vec<C64> = (0..ell).map(|a| vecs[(a, pick)].conj()).collect();
            let v: Vec<C64> = (0..pc.dim())
                .map(|r| (0..ell).map(|a| c[a] * e[(r, a)]).sum())
                .collect();
            Some(Eval {
                value: vals[pick],
                frame,
                weights: None,
                vector: Some(v),
            })
        }
    }
}

fn sample_seed(seed: u64, point: usize, sample: usize) -> u64 {
    // splitmix64 finalizer over the counter triple
    let mut x = seed
        ^ (point as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (sample as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F).rotate_left(31);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn draw(m: usize, seed: u64) -> Params {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let raw = CMatrix::from_fn(m, m, |_, _| C64::new(normal(), normal()));
    let weights = (0..m).map(|_| normal().abs()).collect();
    Params { raw, weights }
}

fn refine(pc: &PointCurvature, kind: ProbeKind, ell: usize, start: Params, goal: Goal, sweeps: usize) -> Option<Eval> {
    let mut params = start;
    let mut best = evaluate(pc, kind, ell, &params, goal)?;
    let mut step = 0.1;
    for _ in 0..sweeps {
        let mut improved = false;
        for k in 0..params.len() {
            let base = params.get(k);
            for delta in [step, -step] {
                params.set(k, base + delta);
                match evaluate(pc, kind, ell, &params, goal) {
                    Some(e) if goal.better(e.value, best.value) => {
                        best = e;
                        improved = true;
                        break;
                    }
                    _ => params.set(k, base),
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-8 {
                break;
            }
        }
    }
    Some(best)
}

fn witness(point_index: usize, point: &ChartPoint, e: Eval) -> ProbeWitness {
    ProbeWitness {
        point_index,
        point: point.clone(),
        frame: e.frame,
        weights: e.weights,
        vector: e.vector,
        value: e.value,
    }
}

/// Probes a curvature functional over frames at points where the curvature
/// has already been computed.
pub fn probe_curvatures(
    curvatures: &[(ChartPoint, PointCurvature)],
    kind: ProbeKind,
    settings: &ProbeSettings,
) -> Result<ProbeResult> {
    if settings.n_samples == 0 {
        return Err(Error::invalid("probe needs at least one sample"));
    }
    let Some((_, first)) = curvatures.first() else {
        return Err(Error::invalid("probe needs at least one point"));
    };
    let m = first.dim();
    let ell = settings.ell;
    if ell == 0 || ell > m {
        return Err(Error::invalid(format!("ℓ = {ell} must satisfy 1 ≤ ℓ ≤ m = {m}")));
    }
    if curvatures.iter().any(|(_, pc)| pc.dim() != m) {
        return Err(Error::invalid("probe points have mixed dimensions"));
    }

    let per_point: Vec<Option<(ProbeWitness, ProbeWitness)>> = curvatures
        .par_iter()
        .enumerate()
        .map(|(pi, (point, pc))| {
            let mut lo: Option<Eval> = None;
            let mut hi: Option<Eval> = None;
            for s in 0..settings.n_samples {
                let start = draw(m, sample_seed(settings.seed, pi, s));
                if let Some(e) = refine(pc, kind, ell, start.clone(), Goal::Min, settings.refine_steps) {
                    if lo.as_ref().is_none_or(|b| e.value < b.value) {
                        lo = Some(e);
                    }
                }
                if let Some(e) = refine(pc, kind, ell, start, Goal::Max, settings.refine_steps) {
                    if hi.as_ref().is_none_or(|b| e.value > b.value) {
                        hi = Some(e);
                    }
                }
            }
            Some((witness(pi, point, lo?), witness(pi, point, hi?)))
        })
        .collect();

    let mut min_w: Option<ProbeWitness> = None;
    let mut max_w: Option<ProbeWitness> = None;
    for (lo, hi) in per_point.into_iter().flatten() {
        if min_w.as_ref().is_none_or(|b| lo.value < b.value) {
            min_w = Some(lo);
        }
        if max_w.as_ref().is_none_or(|b| hi.value > b.value) {
            max_w = Some(hi);
        }
    }
    let (Some(min_witness), Some(max_witness)) = (min_w, max_w) else {
        return Err(Error::invalid("no probe sample produced a valid frame"));
    };
    Ok(ProbeResult {
        kind,
        ell,
        min: min_witness.value,
        max: max_witness.value,
        min_witness,
        max_witness,
    })
}

/// Computes the curvature at every point (in parallel) and probes it.
pub fn curvature_sign_probe(
    g: &MetricField,
    points: &[ChartPoint],
    kind: ProbeKind,
    settings: &ProbeSettings,
    cfg: &FdConfig,
) -> Result<ProbeResult> {
    let m = g.dim();
    if settings.ell == 0 || settings.ell > m {
        return Err(Error::invalid(format!(
            "ℓ = {} must satisfy 1 ≤ ℓ ≤ m = {m}",
            settings.ell
        )));
    }
    let curvatures = point_curvatures(g, points, cfg)?;
    probe_curvatures(&curvatures, kind, settings)
}

/// Metric and curvature at each point, computed in parallel, in input order.
pub fn point_curvatures(
    g: &MetricField,
    points: &[ChartPoint],
    cfg: &FdConfig,
) -> Result<Vec<(ChartPoint, PointCurvature)>> {
    points
        .par_iter()
        .map(|p| Ok((p.clone(), super::point_curvature(g, p, cfg)?)))
        .collect()
}
