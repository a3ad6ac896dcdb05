//! Hermitian metrics and their Chern curvature.
//!
//! Index conventions: a metric matrix `G` stores `G[(a, b)] = g_{a b̄}`, the
//! inverse metric is `g^{a b̄} = (G⁻¹)[(b, a)]`, and the curvature tensor is
//!
//! ```text
//! R_{i j̄ k l̄} = −∂_i ∂_j̄ g_{k l̄} + g^{p q̄} ∂_i g_{k q̄} ∂_j̄ g_{p l̄}
//! ```
//!
//! so that `R(X, Ȳ, Z, W̄) = Σ R_{i j̄ k l̄} Xⁱ conj(Yʲ) Zᵏ conj(Wˡ)`.
//! Frames are matrices whose columns are tangent vectors; a frame `E` is
//! g-unitary when `Eᵀ G Ē = I`.

mod probe;

use std::sync::Arc;

use serde::Serialize;

use crate::linalg::{self, check_positive_definite, g_inner, g_orthonormalize};
use crate::tensor::{Tensor3, Tensor4};
use crate::wirtinger::{field_jet, fmt_coords, ChartPoint, FdConfig};
use crate::{CMatrix, Error, Result, C64};

pub use probe::{
    curvature_sign_probe, point_curvatures, probe_curvatures, ProbeKind, ProbeResult, ProbeSettings, ProbeWitness,
};

pub(crate) type MatrixFn = dyn Fn(&[C64]) -> CMatrix + Send + Sync;
pub(crate) type DomainFn = dyn Fn(&[C64]) -> bool + Send + Sync;

/// A Hermitian metric on a chart, given by its component evaluator.
#[derive(Clone)]
pub struct MetricField {
    dim: usize,
    label: String,
    components: Arc<MatrixFn>,
    domain: Arc<DomainFn>,
}

impl std::fmt::Debug for MetricField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricField")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

impl MetricField {
    pub fn new<F, D>(dim: usize, label: impl Into<String>, components: F, domain: D) -> Self
    where
        F: Fn(&[C64]) -> CMatrix + Send + Sync + 'static,
        D: Fn(&[C64]) -> bool + Send + Sync + 'static,
    {
        Self {
            dim,
            label: label.into(),
            components: Arc::new(components),
            domain: Arc::new(domain),
        }
    }

    /// Constant metric `G` on all of `C^m`.
    pub fn constant(g: CMatrix, label: impl Into<String>) -> Self {
        let dim = g.nrows();
        Self::new(dim, label, move |_| g.clone(), |_| true)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, z: &[C64]) -> CMatrix {
        (self.components)(z)
    }

    pub fn contains(&self, z: &[C64]) -> bool {
        z.len() == self.dim && (self.domain)(z)
    }

    pub fn domain_fn(&self) -> impl Fn(&[C64]) -> bool + '_ {
        move |z: &[C64]| self.contains(z)
    }

    fn check_dim(&self, z: &[C64]) -> Result<()> {
        if z.len() != self.dim {
            return Err(Error::invalid(format!(
                "{}: point has dimension {}, metric has dimension {}",
                self.label,
                z.len(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Metric matrix at `z`, checked for domain membership and positive
    /// definiteness.
    pub fn at(&self, z: &[C64]) -> Result<CMatrix> {
        self.check_dim(z)?;
        if !self.contains(z) {
            return Err(Error::DomainViolation {
                label: self.label.clone(),
                point: fmt_coords(z),
            });
        }
        let g = self.eval(z);
        check_positive_definite(&g, &self.label, &fmt_coords(z))?;
        Ok(g)
    }

    /// The metric in affine coordinates `z = base + P z'`:
    /// `g'(z') = Pᵀ g(base + P z') P̄`.
    pub fn pullback_linear(&self, base: &[C64], frame: &CMatrix) -> MetricField {
        let base = base.to_vec();
        let p = frame.clone();
        let p_conj = frame.map(|z| z.conj());
        let inner = self.clone();
        let to_orig = {
            let base = base.clone();
            let p = p.clone();
            move |zp: &[C64]| -> Vec<C64> {
                (0..base.len())
                    .map(|a| base[a] + (0..zp.len()).map(|b| p[(a, b)] * zp[b]).sum::<C64>())
                    .collect()
            }
        };
        let to_orig_dom = to_orig.clone();
        let inner_dom = self.clone();
        MetricField::new(
            frame.ncols(),
            format!("{} (normalized)", self.label),
            move |zp| p.transpose() * inner.eval(&to_orig(zp)) * &p_conj,
            move |zp| inner_dom.contains(&to_orig_dom(zp)),
        )
    }

    /// Value, derivatives and inverse of the metric at `p`.
    pub fn jet(&self, p: &ChartPoint, cfg: &FdConfig) -> Result<MetricJet> {
        self.check_dim(p.coords())?;
        let g = self.at(p.coords())?;
        let m = self.dim;
        let jet = field_jet(
            |z| {
                let g = self.eval(z);
                (0..m * m).map(|c| g[(c / m, c % m)]).collect()
            },
            &self.domain_fn(),
            p,
            cfg,
            &self.label,
        )?;
        let inverse = linalg::inverse(&g).ok_or_else(|| Error::SingularMetric {
            label: self.label.clone(),
            point: p.to_string(),
            min_eig: 0.0,
            max_eig: 0.0,
        })?;
        Ok(MetricJet {
            d: Tensor3::from_fn(m, m, m, |a, b, gm| jet.d[gm][a * m + b]),
            dbar: Tensor3::from_fn(m, m, m, |a, b, dl| jet.dbar[dl][a * m + b]),
            ddbar: Tensor4::from_fn(m, |a, b, gm, dl| jet.ddbar[gm][dl][a * m + b]),
            g,
            inverse,
            error_estimate: jet.error_estimate,
        })
    }
}

/// Metric value with first and mixed second Wirtinger derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricJet {
    pub g: CMatrix,
    /// `d.get(α, β, γ) = ∂_γ g_{α β̄}`
    pub d: Tensor3,
    /// `dbar.get(α, β, δ) = ∂_δ̄ g_{α β̄}`
    pub dbar: Tensor3,
    /// `ddbar.get(α, β, γ, δ) = ∂_γ ∂_δ̄ g_{α β̄}`
    pub ddbar: Tensor4,
    pub inverse: CMatrix,
    pub error_estimate: f64,
}

impl MetricJet {
    /// `g^{a b̄}`.
    #[inline]
    pub fn inv(&self, a: usize, b: usize) -> C64 {
        self.inverse[(b, a)]
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn curvature(&self) -> CurvatureTensor {
        let m = self.dim();
        let r = Tensor4::from_fn(m, |i, j, k, l| {
            let mut acc = -self.ddbar.get(k, l, i, j);
            for p in 0..m {
                for q in 0..m {
                    acc += self.inv(p, q) * self.d.get(k, q, i) * self.dbar.get(p, l, j);
                }
            }
            acc
        });
        CurvatureTensor { r }
    }
}

/// Chern curvature `R_{i j̄ k l̄}` at a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureTensor {
    pub r: Tensor4,
}

impl CurvatureTensor {
    pub fn dim(&self) -> usize {
        self.r.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        self.r.get(i, j, k, l)
    }

    /// `max |R_{i j̄ k l̄} − conj(R_{j ī l k̄})|`.
    pub fn symmetry_residual(&self) -> f64 {
        let m = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        worst = worst.max((self.get(i, j, k, l) - self.get(j, i, l, k).conj()).norm());
                    }
                }
            }
        }
        worst
    }

    /// Residual of the two extra Kähler symmetries
    /// `R_{i j̄ k l̄} = R_{k j̄ i l̄}` and `R_{i j̄ k l̄} = R_{i l̄ k j̄}`.
    pub fn kahler_symmetry_residual(&self) -> f64 {
        let m = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let v = self.get(i, j, k, l);
                        worst = worst
                            .max((v - self.get(k, j, i, l)).norm())
                            .max((v - self.get(i, l, k, j)).norm());
                    }
                }
            }
        }
        worst
    }

    /// `R(X, Ȳ, Z, W̄)`.
    pub fn eval(&self, x: &[C64], y: &[C64], z: &[C64], w: &[C64]) -> C64 {
        let m = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..m {
            if x[i] == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..m {
                let xy = x[i] * y[j].conj();
                for k in 0..m {
                    let xyz = xy * z[k];
                    for l in 0..m {
                        acc += self.get(i, j, k, l) * xyz * w[l].conj();
                    }
                }
            }
        }
        acc
    }

    /// Components in the frame whose columns are `e_a`:
    /// `R'_{a b̄ c d̄} = Σ R_{i j̄ k l̄} e_aⁱ conj(e_bʲ) e_cᵏ conj(e_dˡ)`.
    /// The frame may be rectangular (`m × k`), giving a `k`-dimensional tensor.
    pub fn in_frame(&self, frame: &CMatrix) -> Result<CurvatureTensor> {
        let m = self.dim();
        if frame.nrows() != m {
            return Err(Error::invalid(format!(
                "frame has {} rows, curvature dimension is {m}",
                frame.nrows()
            )));
        }
        let k = frame.ncols();
        let e = |i: usize, a: usize| frame[(i, a)];
        // contract one slot at a time: O(m⁴ k) per step
        let mut t1 = vec![C64::new(0.0, 0.0); k * m * m * m];
        for a in 0..k {
            for i in 0..m {
                let ei = e(i, a);
                for j in 0..m {
                    for kk in 0..m {
                        for l in 0..m {
                            t1[((a * m + j) * m + kk) * m + l] += self.get(i, j, kk, l) * ei;
                        }
                    }
                }
            }
        }
        let mut t2 = vec![C64::new(0.0, 0.0); k * k * m * m];
        for a in 0..k {
            for b in 0..k {
                for j in 0..m {
                    let ej = e(j, b).conj();
                    for kk in 0..m {
                        for l in 0..m {
                            t2[((a * k + b) * m + kk) * m + l] += t1[((a * m + j) * m + kk) * m + l] * ej;
                        }
                    }
                }
            }
        }
        let mut t3 = vec![C64::new(0.0, 0.0); k * k * k * m];
        for ab in 0..k * k {
            for c in 0..k {
                for kk in 0..m {
                    let ek = e(kk, c);
                    for l in 0..m {
                        t3[(ab * k + c) * m + l] += t2[(ab * m + kk) * m + l] * ek;
                    }
                }
            }
        }
        let r = Tensor4::from_fn(k, |a, b, c, d| {
            let abc = (a * k + b) * k + c;
            (0..m).map(|l| t3[abc * m + l] * e(l, d).conj()).sum()
        });
        Ok(CurvatureTensor { r })
    }
}

/// A g-unitary frame together with nonnegative weights, the input of the
/// real bisectional curvature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameSample {
    pub frame: CMatrix,
    pub weights: Vec<f64>,
}

impl FrameSample {
    pub fn new(frame: CMatrix, weights: Vec<f64>) -> Result<Self> {
        if frame.ncols() != weights.len() || frame.nrows() != frame.ncols() {
            return Err(Error::invalid("frame must be square with one weight per column"));
        }
        if weights.iter().any(|&a| !(a >= 0.0)) || weights.iter().all(|&a| a == 0.0) {
            return Err(Error::invalid("weights must be nonnegative and not all zero"));
        }
        Ok(Self { frame, weights })
    }

    fn check_unitary(&self, g: &CMatrix) -> Result<()> {
        let gram = linalg::frame_gram(g, &self.frame);
        let dev = linalg::max_abs(&(gram - linalg::identity(g.nrows())));
        if dev > 1e-9 {
            return Err(Error::invalid(format!("frame is not g-unitary (deviation {dev:e})")));
        }
        Ok(())
    }
}

/// Metric and curvature at a single point; the curvature functionals are
/// methods on this so that probes can reuse one finite-difference pass.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCurvature {
    pub g: CMatrix,
    pub g_inv: CMatrix,
    pub r: CurvatureTensor,
}

fn g_norm_sq(g: &CMatrix, x: &[C64]) -> f64 {
    g_inner(g, x, x).re
}

impl PointCurvature {
    pub fn from_jet(jet: &MetricJet) -> Self {
        Self {
            g: jet.g.clone(),
            g_inv: jet.inverse.clone(),
            r: jet.curvature(),
        }
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `g^{a b̄}`
    fn inv(&self, a: usize, b: usize) -> C64 {
        self.g_inv[(b, a)]
    }

    /// First Chern Ricci `R_{i j̄} = g^{k l̄} R_{i j̄ k l̄}`.
    pub fn ricci_first(&self) -> CMatrix {
        let m = self.dim();
        CMatrix::from_fn(m, m, |i, j| {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..m {
                for l in 0..m {
                    acc += self.inv(k, l) * self.r.get(i, j, k, l);
                }
            }
            acc
        })
    }

    /// Second Chern Ricci `Ric⁽²⁾_{k l̄} = g^{i j̄} R_{i j̄ k l̄}`.
    pub fn ricci_second(&self) -> CMatrix {
        let m = self.dim();
        CMatrix::from_fn(m, m, |k, l| {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..m {
                for j in 0..m {
                    acc += self.inv(i, j) * self.r.get(i, j, k, l);
                }
            }
            acc
        })
    }

    /// Chern scalar curvature, returned with its imaginary residue.
    pub fn scalar_with_residue(&self) -> (f64, f64) {
        let ric = self.ricci_first();
        let m = self.dim();
        let mut s = C64::new(0.0, 0.0);
        for i in 0..m {
            for j in 0..m {
                s += self.inv(i, j) * ric[(i, j)];
            }
        }
        (s.re, s.im)
    }

    pub fn scalar(&self) -> f64 {
        self.scalar_with_residue().0
    }

    pub fn holomorphic_sectional(&self, x: &[C64]) -> Result<f64> {
        let n = g_norm_sq(&self.g, x);
        if !(n > 0.0) {
            return Err(Error::invalid("holomorphic sectional curvature needs X ≠ 0"));
        }
        Ok(self.r.eval(x, x, x, x).re / (n * n))
    }

    pub fn bisectional(&self, x: &[C64], y: &[C64]) -> Result<f64> {
        let (nx, ny) = (g_norm_sq(&self.g, x), g_norm_sq(&self.g, y));
        if !(nx > 0.0 && ny > 0.0) {
            return Err(Error::invalid("bisectional curvature needs X ≠ 0 and Y ≠ 0"));
        }
        Ok(self.r.eval(x, x, y, y).re / (nx * ny))
    }

    /// g-unitary basis of `span(sigma)` and the g-unit direction of `v` inside it.
    fn subspace_and_vector(&self, sigma: &CMatrix, v: Option<&[C64]>) -> Result<(CMatrix, Option<Vec<C64>>)> {
        let m = self.dim();
        if sigma.nrows() != m || sigma.ncols() == 0 || sigma.ncols() > m {
            return Err(Error::invalid(format!(
                "subspace basis must be {m} × ℓ with 1 ≤ ℓ ≤ {m}, got {} × {}",
                sigma.nrows(),
                sigma.ncols()
            )));
        }
        let e = g_orthonormalize(&self.g, sigma)?;
        let Some(v) = v else { return Ok((e, None)) };
        let norm = g_norm_sq(&self.g, v).sqrt();
        if !(norm > 0.0) {
            return Err(Error::invalid("vector must be nonzero"));
        }
        let unit: Vec<C64> = v.iter().map(|z| z / norm).collect();
        let mut resid = unit.clone();
        for a in 0..e.ncols() {
            let ea = linalg::column(&e, a);
            let coef = g_inner(&self.g, &unit, &ea);
            for (r, er) in resid.iter_mut().zip(&ea) {
                *r -= coef * er;
            }
        }
        if g_norm_sq(&self.g, &resid).sqrt() > 1e-8 {
            return Err(Error::invalid("vector does not lie in the subspace"));
        }
        Ok((e, Some(unit)))
    }

    /// `Ric⁽¹⁾_ℓ(Σ)(v, v̄) = Σ_i R(v, v̄, E_i, Ē_i)` for g-unit `v ∈ Σ`.
    pub fn ricci_l_first(&self, sigma: &CMatrix, v: &[C64]) -> Result<f64> {
        let (e, unit) = self.subspace_and_vector(sigma, Some(v))?;
        let v = unit.expect("vector requested");
        Ok((0..e.ncols())
            .map(|i| {
                let ei = linalg::column(&e, i);
                self.r.eval(&v, &v, &ei, &ei).re
            })
            .sum())
    }

    /// `Ric⁽²⁾_ℓ(Σ)(v, v̄) = Σ_i R(E_i, Ē_i, v, v̄)` for g-unit `v ∈ Σ`.
    pub fn ricci_l_second(&self, sigma: &CMatrix, v: &[C64]) -> Result<f64> {
        let (e, unit) = self.subspace_and_vector(sigma, Some(v))?;
        let v = unit.expect("vector requested");
        Ok((0..e.ncols())
            .map(|i| {
                let ei = linalg::column(&e, i);
                self.r.eval(&ei, &ei, &v, &v).re
            })
            .sum())
    }

    /// `S_ℓ(Σ) = Σ_{i,j} R(E_i, Ē_i, E_j, Ē_j)`.
    pub fn scalar_l(&self, sigma: &CMatrix) -> Result<f64> {
        let (e, _) = self.subspace_and_vector(sigma, None)?;
        let rf = self.r.in_frame(&e)?;
        let l = e.ncols();
        let mut s = 0.0;
        for i in 0..l {
            for j in 0..l {
                s += rf.get(i, i, j, j).re;
            }
        }
        Ok(s)
    }

    /// Real bisectional curvature `(1/|a|²) Σ R_{i ī j j̄} a_i a_j` in the frame.
    pub fn real_bisectional(&self, sample: &FrameSample) -> Result<f64> {
        sample.check_unitary(&self.g)?;
        let rf = self.r.in_frame(&sample.frame)?;
        Ok(real_bisectional_in_frame(&rf, &sample.weights))
    }
}

pub(crate) fn real_bisectional_in_frame(rf: &CurvatureTensor, a: &[f64]) -> f64 {
    let norm: f64 = a.iter().map(|x| x * x).sum();
    let mut s = 0.0;
    for i in 0..a.len() {
        for j in 0..a.len() {
            s += rf.get(i, i, j, j).re * a[i] * a[j];
        }
    }
    s / norm
}

pub fn point_curvature(g: &MetricField, p: &ChartPoint, cfg: &FdConfig) -> Result<PointCurvature> {
    Ok(PointCurvature::from_jet(&g.jet(p, cfg)?))
}

pub fn chern_curvature(g: &MetricField, p: &ChartPoint, cfg: &FdConfig) -> Result<CurvatureTensor> {
    Ok(g.jet(p, cfg)?.curvature())
}

pub fn chern_ricci_first(g: &MetricField, p: &ChartPoint, cfg: &FdConfig) -> Result<CMatrix> {
    Ok(point_curvature(g, p, cfg)?.ricci_first())
}

/// First Chern Ricci by the second route, `−∂∂̄ log det g`.
pub fn chern_ricci_logdet(g: &MetricField, p: &ChartPoint, cfg: &FdConfig) -> Result<CMatrix> {
    g.at(p.coords())?;
    let jet = crate::wirtinger::wirtinger_jet2(
        |z| C64::new(g.eval(z).determinant().re.ln(), 0.0),
        &g.domain_fn(),
        p,
        cfg,
    )?;
    Ok(-jet.ddbar)
}

pub fn chern_ricci_second(g: &MetricField, p: &ChartPoint, cfg: &FdConfig) -> Result<CMatrix> {
    Ok(point_curvature(g, p, cfg)?.ricci_second())
}

pub fn chern_scalar(g: &MetricField, p: &ChartPoint, cfg: &FdConfig) -> Result<f64> {
    Ok(point_curvature(g, p, cfg)?.scalar())
}

pub fn curvature_in_frame(r: &CurvatureTensor, frame: &CMatrix) -> Result<CurvatureTensor> {
    r.in_frame(frame)
}

pub fn holomorphic_sectional(g: &MetricField, p: &ChartPoint, x: &[C64], cfg: &FdConfig) -> Result<f64> {
    point_curvature(g, p, cfg)?.holomorphic_sectional(x)
}

pub fn bisectional(g: &MetricField, p: &ChartPoint, x: &[C64], y: &[C64], cfg: &FdConfig) -> Result<f64> {
    point_curvature(g, p, cfg)?.bisectional(x, y)
}

pub fn ricci_l_first(g: &MetricField, p: &ChartPoint, sigma: &CMatrix, v: &[C64], cfg: &FdConfig) -> Result<f64> {
    point_curvature(g, p, cfg)?.ricci_l_first(sigma, v)
}

pub fn ricci_l_second(g: &MetricField, p: &ChartPoint, sigma: &CMatrix, v: &[C64], cfg: &FdConfig) -> Result<f64> {
    point_curvature(g, p, cfg)?.ricci_l_second(sigma, v)
}

pub fn scalar_l(g: &MetricField, p: &ChartPoint, sigma: &CMatrix, cfg: &FdConfig) -> Result<f64> {
    point_curvature(g, p, cfg)?.scalar_l(sigma)
}

pub fn real_bisectional(g: &MetricField, p: &ChartPoint, sample: &FrameSample, cfg: &FdConfig) -> Result<f64> {
    point_curvature(g, p, cfg)?.real_bisectional(sample)
}

#[cfg(test)]
mod tests;
