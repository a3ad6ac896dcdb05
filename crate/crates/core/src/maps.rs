//! Holomorphic maps between Hermitian manifolds and their pointwise
//! invariants.
//!
//! For `f: (M, g) → (N, h)` with Jacobian `J[(i, α)] = f^i_α` the pullback
//! metric is `A = Jᵀ H J̄`, i.e. `A_{α β̄} = f^i_α h_{i j̄} conj(f^j_β)`. The
//! singular values `λ_α` of `∂f` are those of `Q₀⁻¹ J P₀` where `P₀`, `Q₀`
//! are g- and h-unitary bases.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::geometry::{DomainFn, MetricField};
use crate::linalg::{self, leading_block, normalizing_basis, svd_full};
use crate::wirtinger::{fmt_coords, holomorphic_jets, ChartPoint, FdConfig, MapJets};
use crate::{CMatrix, Error, Result, C64};

/// Singular values at or below `RANK_TOL · λ₁` count as zero.
pub const RANK_TOL: f64 = 1e-8;

type EvalFn = dyn Fn(&[C64]) -> Vec<C64> + Send + Sync;
type JetFn = dyn Fn(&[C64]) -> MapJets + Send + Sync;

#[derive(Clone)]
pub struct HolomorphicMapField {
    dim_in: usize,
    dim_out: usize,
    label: String,
    eval: Arc<EvalFn>,
    jets: Option<Arc<JetFn>>,
    domain: Arc<DomainFn>,
}

impl std::fmt::Debug for HolomorphicMapField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HolomorphicMapField")
            .field("dim_in", &self.dim_in)
            .field("dim_out", &self.dim_out)
            .field("label", &self.label)
            .field("closed_form_jets", &self.jets.is_some())
            .finish_non_exhaustive()
    }
}

impl HolomorphicMapField {
    pub fn new<F, D>(dim_in: usize, dim_out: usize, label: impl Into<String>, eval: F, domain: D) -> Self
    where
        F: Fn(&[C64]) -> Vec<C64> + Send + Sync + 'static,
        D: Fn(&[C64]) -> bool + Send + Sync + 'static,
    {
        Self {
            dim_in,
            dim_out,
            label: label.into(),
            eval: Arc::new(eval),
            jets: None,
            domain: Arc::new(domain),
        }
    }

    /// Attaches closed-form value/Jacobian/second-derivative evaluators.
    pub fn with_jets<J>(mut self, jets: J) -> Self
    where
        J: Fn(&[C64]) -> MapJets + Send + Sync + 'static,
    {
        self.jets = Some(Arc::new(jets));
        self
    }

    /// Drops closed-form jets so that derivatives come from finite differences.
    pub fn without_jets(mut self) -> Self {
        self.jets = None;
        self
    }

    /// The linear map `z ↦ M z` on all of `C^m`.
    pub fn linear(matrix: CMatrix, label: impl Into<String>) -> Self {
        let (n, m) = matrix.shape();
        let mat = matrix.clone();
        Self::new(
            m,
            n,
            label,
            move |z| (0..n).map(|i| (0..m).map(|a| mat[(i, a)] * z[a]).sum()).collect(),
            |_| true,
        )
        .with_jets(move |z| MapJets {
            value: (0..n).map(|i| (0..m).map(|a| matrix[(i, a)] * z[a]).sum()).collect(),
            jac: matrix.clone(),
            hess: vec![CMatrix::zeros(m, m); n],
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn has_closed_form_jets(&self) -> bool {
        self.jets.is_some()
    }

    pub fn eval(&self, z: &[C64]) -> Vec<C64> {
        (self.eval)(z)
    }

    pub fn contains(&self, z: &[C64]) -> bool {
        z.len() == self.dim_in && (self.domain)(z)
    }

    pub fn closed_form_jets(&self, z: &[C64]) -> Option<MapJets> {
        self.jets.as_ref().map(|j| j(z))
    }

    /// Value at `p`, checked for domain membership and finiteness.
    pub fn value_at(&self, p: &[C64]) -> Result<Vec<C64>> {
        if p.len() != self.dim_in {
            return Err(Error::invalid(format!(
                "{}: point has dimension {}, map expects {}",
                self.label,
                p.len(),
                self.dim_in
            )));
        }
        if !self.contains(p) {
            return Err(Error::DomainViolation {
                label: self.label.clone(),
                point: fmt_coords(p),
            });
        }
        let v = self.eval(p);
        if v.len() != self.dim_out || v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                label: self.label.clone(),
                point: fmt_coords(p),
            });
        }
        Ok(v)
    }

    /// The map in affine charts `z = base + P z'`, `w = f(base) + Q w'`:
    /// `f'(z') = Q⁻¹ (f(base + P z') − f(base))`. Closed-form jets, when
    /// present, are transformed along.
    pub fn in_affine_charts(&self, base: &[C64], p: &CMatrix, q_inv: &CMatrix) -> Result<HolomorphicMapField> {
        let f0 = self.value_at(base)?;
        let (m, n) = (p.ncols(), q_inv.nrows());
        let to_orig = {
            let base = base.to_vec();
            let p = p.clone();
            move |zp: &[C64]| -> Vec<C64> {
                (0..base.len())
                    .map(|a| base[a] + (0..zp.len()).map(|b| p[(a, b)] * zp[b]).sum::<C64>())
                    .collect()
            }
        };
        let pull_value = {
            let q_inv = q_inv.clone();
            let f0 = f0.clone();
            move |w: &[C64]| -> Vec<C64> {
                (0..n)
                    .map(|i| (0..w.len()).map(|k| q_inv[(i, k)] * (w[k] - f0[k])).sum())
                    .collect()
            }
        };
        let inner = self.clone();
        let eval = {
            let to_orig = to_orig.clone();
            let pull_value = pull_value.clone();
            move |zp: &[C64]| pull_value(&inner.eval(&to_orig(zp)))
        };
        let inner = self.clone();
        let domain = {
            let to_orig = to_orig.clone();
            move |zp: &[C64]| inner.contains(&to_orig(zp))
        };
        let mut out = HolomorphicMapField::new(m, n, format!("{} (normalized)", self.label), eval, domain);
        if self.jets.is_some() {
            let inner = self.clone();
            let p = p.clone();
            let q_inv = q_inv.clone();
            out = out.with_jets(move |zp| {
                let j = inner.closed_form_jets(&to_orig(zp)).expect("jets present");
                let pt = p.transpose();
                let hess_orig = &j.hess;
                MapJets {
                    value: pull_value(&j.value),
                    jac: &q_inv * &j.jac * &p,
                    hess: (0..n)
                        .map(|i| {
                            let mut acc = CMatrix::zeros(m, m);
                            for (k, hk) in hess_orig.iter().enumerate() {
                                acc += (&pt * hk * &p) * q_inv[(i, k)];
                            }
                            acc
                        })
                        .collect(),
                }
            });
        }
        Ok(out)
    }
}

/// The linear changes realizing `g(p) = I`, `h(f(p)) = I` and a diagonal
/// differential with real nonnegative descending entries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedFrame {
    /// Domain basis: `Pᵀ G P̄ = I`.
    pub p: CMatrix,
    /// Target basis: `Qᵀ H Q̄ = I`.
    pub q: CMatrix,
    pub q_inv: CMatrix,
    /// Singular values of `∂f`, descending, length `m`.
    pub lambdas: Vec<f64>,
    pub rank: usize,
}

/// `W_ℓ`, `U_ℓ`, `σ_ℓ` and `‖∧^ℓ∂f‖₀` for `ℓ = 1..=m` (index `ℓ − 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapScalars {
    pub w: Vec<f64>,
    pub u: Vec<f64>,
    pub sigma: Vec<f64>,
    pub wedge0: Vec<f64>,
}

/// Pullback `A = Jᵀ H J̄` of a target metric value along a Jacobian.
pub fn pullback_matrix(jac: &CMatrix, h: &CMatrix) -> CMatrix {
    jac.transpose() * h * jac.map(|z| z.conj())
}

pub fn rank_of(lambdas: &[f64]) -> usize {
    let top = lambdas.first().copied().unwrap_or(0.0);
    if !(top > 0.0) {
        return 0;
    }
    lambdas.iter().filter(|&&l| l > RANK_TOL * top).count()
}

/// Normalized frame from the metric values and Jacobian at a point.
pub fn normalized_frame_from(g: &CMatrix, h: &CMatrix, jac: &CMatrix) -> Result<NormalizedFrame> {
    let (m, n) = (g.nrows(), h.nrows());
    if jac.shape() != (n, m) {
        return Err(Error::invalid(format!(
            "Jacobian is {:?}, expected {n} × {m}",
            jac.shape()
        )));
    }
    let singular = |label: &str, mat: &CMatrix| {
        let ev = linalg::hermitian_eigenvalues(mat);
        Error::SingularMetric {
            label: label.to_string(),
            point: "normalization".to_string(),
            min_eig: ev[0],
            max_eig: ev[ev.len() - 1],
        }
    };
    let p0 = normalizing_basis(g).ok_or_else(|| singular("domain metric", g))?;
    let q0 = normalizing_basis(h).ok_or_else(|| singular("target metric", h))?;
    let q0_inv = linalg::inverse(&q0).ok_or_else(|| singular("target metric", h))?;
    let j0 = &q0_inv * jac * &p0;
    let (u, s, v) = svd_full(&j0);
    let mut lambdas = s;
    lambdas.resize(m, 0.0);
    let q = &q0 * &u;
    // Q⁻¹ = Uᴴ Q₀⁻¹ since U is unitary
    let q_inv = u.adjoint() * &q0_inv;
    Ok(NormalizedFrame {
        p: &p0 * v,
        q,
        q_inv,
        rank: rank_of(&lambdas),
        lambdas,
    })
}

/// Scalars in the coordinates in which `g`, `a` are given.
pub fn scalars_from(g: &CMatrix, a: &CMatrix, lambdas: &[f64]) -> Result<MapScalars> {
    let m = g.nrows();
    let g_inv = linalg::inverse(g).ok_or_else(|| Error::SingularMetric {
        label: "domain metric".into(),
        point: "scalars".into(),
        min_eig: 0.0,
        max_eig: 0.0,
    })?;
    let mut out = MapScalars {
        w: Vec::with_capacity(m),
        u: Vec::with_capacity(m),
        sigma: Vec::with_capacity(m),
        wedge0: Vec::with_capacity(m),
    };
    let (mut sig, mut prod) = (0.0, 1.0);
    for ell in 1..=m {
        out.w.push(w_ell(g, a, ell));
        out.u.push(u_ell(&g_inv, a, ell));
        sig += lambdas[ell - 1].powi(2);
        prod *= lambdas[ell - 1];
        out.sigma.push(sig);
        out.wedge0.push(prod);
    }
    Ok(out)
}

/// `W_ℓ = det A_ℓ / det G_ℓ` on the upper-left blocks.
pub fn w_ell(g: &CMatrix, a: &CMatrix, ell: usize) -> f64 {
    (leading_block(a, ell).determinant() / leading_block(g, ell).determinant()).re
}

/// `U_ℓ = Σ_{α,β ≤ ℓ} g^{α β̄} A_{α β̄}` using the block of the full inverse.
pub fn u_ell(g_inv: &CMatrix, a: &CMatrix, ell: usize) -> f64 {
    let mut s = C64::new(0.0, 0.0);
    for al in 0..ell {
        for be in 0..ell {
            s += g_inv[(be, al)] * a[(al, be)];
        }
    }
    s.re
}

struct PointData {
    g: CMatrix,
    h: CMatrix,
    jets: MapJets,
}

fn point_data(g: &MetricField, h: &MetricField, f: &HolomorphicMapField, p: &ChartPoint, cfg: &FdConfig) -> Result<PointData> {
    check_dims(g, h, f)?;
    let gv = g.at(p.coords())?;
    let fp = f.value_at(p.coords())?;
    let hv = h.at(&fp)?;
    let jets = holomorphic_jets(f, p, cfg)?;
    Ok(PointData { g: gv, h: hv, jets })
}

pub(crate) fn check_dims(g: &MetricField, h: &MetricField, f: &HolomorphicMapField) -> Result<()> {
    if g.dim() != f.dim_in() || h.dim() != f.dim_out() {
        return Err(Error::invalid(format!(
            "dimension mismatch: metric {} on domain, map {} → {}, metric {} on target",
            g.dim(),
            f.dim_in(),
            f.dim_out(),
            h.dim()
        )));
    }
    Ok(())
}

pub fn pullback_metric(f: &HolomorphicMapField, h: &MetricField, p: &ChartPoint, cfg: &FdConfig) -> Result<CMatrix> {
    if h.dim() != f.dim_out() {
        return Err(Error::invalid("target metric dimension differs from map codimension"));
    }
    let fp = f.value_at(p.coords())?;
    let hv = h.at(&fp)?;
    let jets = holomorphic_jets(f, p, cfg)?;
    Ok(pullback_matrix(&jets.jac, &hv))
}

pub fn normalize_frames(
    g: &MetricField,
    h: &MetricField,
    f: &HolomorphicMapField,
    p: &ChartPoint,
    cfg: &FdConfig,
) -> Result<NormalizedFrame> {
    let d = point_data(g, h, f, p, cfg)?;
    normalized_frame_from(&d.g, &d.h, &d.jets.jac)
}

pub fn map_scalars(
    g: &MetricField,
    h: &MetricField,
    f: &HolomorphicMapField,
    p: &ChartPoint,
    cfg: &FdConfig,
) -> Result<MapScalars> {
    let d = point_data(g, h, f, p, cfg)?;
    let frame = normalized_frame_from(&d.g, &d.h, &d.jets.jac)?;
    scalars_from(&d.g, &pullback_matrix(&d.jets.jac, &d.h), &frame.lambdas)
}

pub fn map_rank(g: &MetricField, h: &MetricField, f: &HolomorphicMapField, p: &ChartPoint, cfg: &FdConfig) -> Result<usize> {
    Ok(normalize_frames(g, h, f, p, cfg)?.rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, frame_gram, identity, max_abs, real_matrix};
    use proptest::prelude::*;

    fn poincare() -> MetricField {
        MetricField::new(
            1,
            "poincare",
            |z| CMatrix::from_element(1, 1, c((1.0 - z[0].norm_sqr()).powi(-2), 0.0)),
            |z| z[0].norm() < 1.0,
        )
    }

    fn square() -> HolomorphicMapField {
        HolomorphicMapField::new(1, 1, "square", |z| vec![z[0] * z[0]], |z| z[0].norm() < 1.0)
    }

    fn cfg() -> FdConfig {
        FdConfig::default()
    }

    #[test]
    fn pullback_of_linear_map() {
        let f = HolomorphicMapField::linear(real_matrix(3, 2, &[2.0, 0.0, 0.0, 1.0, 0.0, 0.0]), "lin");
        let a = pullback_metric(&f, &MetricField::constant(identity(3), "flat"), &ChartPoint::origin(2), &cfg()).unwrap();
        assert!(max_abs(&(a - real_matrix(2, 2, &[4.0, 0.0, 0.0, 1.0]))) < 1e-15);
    }

    #[test]
    fn square_map_on_poincare_disk() {
        let p = ChartPoint::scalar(0.5, 0.0);
        let a = pullback_metric(&square(), &poincare(), &p, &cfg()).unwrap();
        assert!((a[(0, 0)].re - 1.0 / (1.0f64 - 0.0625).powi(2)).abs() < 1e-9);
        let fr = normalize_frames(&poincare(), &poincare(), &square(), &p, &cfg()).unwrap();
        assert!((fr.lambdas[0] - 0.8).abs() < 1e-9);
        let s = map_scalars(&poincare(), &poincare(), &square(), &p, &cfg()).unwrap();
        assert!((s.w[0] - 0.64).abs() < 1e-9 && (s.u[0] - 0.64).abs() < 1e-9 && (s.sigma[0] - 0.64).abs() < 1e-9);
    }

    #[test]
    fn rescaled_domain_metric_scales_lambda() {
        let g = MetricField::constant(identity(1).scale(4.0), "4I");
        let h = MetricField::constant(identity(1), "I");
        let f = HolomorphicMapField::linear(identity(1), "id");
        let fr = normalize_frames(&g, &h, &f, &ChartPoint::origin(1), &cfg()).unwrap();
        assert!((fr.lambdas[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn diagonal_linear_scalars() {
        let f = HolomorphicMapField::linear(real_matrix(2, 2, &[2.0, 0.0, 0.0, 1.0]), "diag");
        let flat = MetricField::constant(identity(2), "flat");
        let s = map_scalars(&flat, &flat, &f, &ChartPoint::origin(2), &cfg()).unwrap();
        assert_eq!(s.w, vec![4.0, 4.0]);
        assert_eq!(s.u, vec![4.0, 5.0]);
        assert_eq!(s.sigma, vec![4.0, 5.0]);
        assert_eq!(s.wedge0, vec![2.0, 2.0]);
    }

    #[test]
    fn rank_counts() {
        let flat = MetricField::constant(identity(2), "flat");
        let o = ChartPoint::origin(2);
        let id = HolomorphicMapField::linear(identity(2), "id");
        assert_eq!(map_rank(&flat, &flat, &id, &o, &cfg()).unwrap(), 2);
        let zero = HolomorphicMapField::linear(CMatrix::zeros(2, 2), "zero");
        assert_eq!(map_rank(&flat, &flat, &zero, &o, &cfg()).unwrap(), 0);
        let diag = HolomorphicMapField::linear(real_matrix(2, 2, &[1.0, 0.0, 1.0, 0.0]), "z1,z1");
        assert_eq!(map_rank(&flat, &flat, &diag, &o, &cfg()).unwrap(), 1);
    }

    #[test]
    fn affine_chart_jets_match_finite_differences() {
        let f = HolomorphicMapField::new(
            2,
            2,
            "poly",
            |z| vec![z[0] * z[1] + z[0], z[1] * z[1] * z[0]],
            |_| true,
        )
        .with_jets(|z| MapJets {
            value: vec![z[0] * z[1] + z[0], z[1] * z[1] * z[0]],
            jac: CMatrix::from_row_slice(2, 2, &[z[1] + 1.0, z[0], z[1] * z[1], 2.0 * z[0] * z[1]]),
            hess: vec![
                CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
                CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), 2.0 * z[1], 2.0 * z[1], 2.0 * z[0]]),
            ],
        });
        let base = [c(0.3, -0.2), c(0.5, 0.4)];
        let p = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.5), c(0.2, 0.0), c(0.0, -0.3), c(0.8, 0.1)]);
        let q_inv = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.2), c(-0.3, 0.0), c(1.2, 0.0)]);
        let closed = f.in_affine_charts(&base, &p, &q_inv).unwrap();
        let fd = closed.clone().without_jets();
        let zp = ChartPoint::new(vec![c(0.05, 0.02), c(-0.03, 0.01)]).unwrap();
        let a = holomorphic_jets(&closed, &zp, &cfg()).unwrap();
        let b = holomorphic_jets(&fd, &zp, &cfg()).unwrap();
        assert!(max_abs(&(a.jac - b.jac)) < 1e-9);
        for i in 0..2 {
            assert!(max_abs(&(&a.hess[i] - &b.hess[i])) < 1e-8);
        }
        let v0 = closed.eval(&[c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(v0.iter().all(|z| z.norm() < 1e-15));
    }

    fn arb_c() -> impl Strategy<Value = C64> {
        (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| c(a, b))
    }

    fn arb_pd(n: usize) -> impl Strategy<Value = CMatrix> {
        prop::collection::vec(arb_c(), n * n).prop_map(move |v| {
            let b = CMatrix::from_vec(n, n, v);
            &b * b.adjoint() + identity(n).scale(0.2)
        })
    }

    fn arb_instance() -> impl Strategy<Value = (CMatrix, CMatrix, CMatrix)> {
        (1usize..=4, 0usize..=2).prop_flat_map(|(m, extra)| {
            let n = m + extra;
            (arb_pd(m), arb_pd(n), prop::collection::vec(arb_c(), n * m).prop_map(move |v| CMatrix::from_vec(n, m, v)))
        })
    }

    proptest! {
        #[test]
        fn frame_invariants((g, h, jac) in arb_instance()) {
            let fr = normalized_frame_from(&g, &h, &jac).unwrap();
            let (m, n) = (g.nrows(), h.nrows());
            prop_assert!(max_abs(&(frame_gram(&g, &fr.p) - identity(m))) < 1e-9);
            prop_assert!(max_abs(&(frame_gram(&h, &fr.q) - identity(n))) < 1e-9);
            let d = &fr.q_inv * &jac * &fr.p;
            let mut expected = CMatrix::zeros(n, m);
            for a in 0..m {
                expected[(a, a)] = c(fr.lambdas[a], 0.0);
            }
            prop_assert!(max_abs(&(d - expected)) < 1e-9);
            prop_assert!(fr.lambdas.windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn scalars_in_normalized_coordinates((g, h, jac) in arb_instance()) {
            let fr = normalized_frame_from(&g, &h, &jac).unwrap();
            let m = g.nrows();
            let gp = frame_gram(&g, &fr.p);
            let jp = &fr.q_inv * &jac * &fr.p;
            let ap = pullback_matrix(&jp, &frame_gram(&h, &fr.q));
            let s = scalars_from(&gp, &ap, &fr.lambdas).unwrap();
            let mut prod = 1.0;
            for ell in 0..m {
                prod *= fr.lambdas[ell].powi(2);
                prop_assert!((s.w[ell] - prod).abs() <= 1e-9 * (1.0 + prod));
                prop_assert!((s.u[ell] - s.sigma[ell]).abs() <= 1e-9 * (1.0 + s.sigma[ell]));
            }
        }

        #[test]
        fn wedge_bounds_w_in_any_coordinates((g, h, jac) in arb_instance()) {
            let fr = normalized_frame_from(&g, &h, &jac).unwrap();
            let s = scalars_from(&g, &pullback_matrix(&jac, &h), &fr.lambdas).unwrap();
            for ell in 0..g.nrows() {
                let w0 = s.wedge0[ell].powi(2);
                prop_assert!(w0 - s.w[ell] >= -1e-9 * (1.0 + w0));
                if ell + 1 < g.nrows() {
                    prop_assert!(s.sigma[ell + 1] >= s.sigma[ell]);
                    prop_assert!(s.wedge0[ell + 1] <= s.wedge0[ell] * fr.lambdas[0] + 1e-12);
                }
            }
        }

        #[test]
        fn lambdas_unitary_invariant((g, h, jac) in arb_instance(), theta in 0.0..6.28f64) {
            let m = g.nrows();
            // unitary change z = U z̃ pulls g back to Uᵀ G Ū and J to J U
            let u = CMatrix::from_fn(m, m, |a, b| {
                if a == b { C64::from_polar(1.0, theta * (a + 1) as f64) } else { c(0.0, 0.0) }
            });
            let rot = linalg::unitary_completion(&CMatrix::from_fn(m, 1, |a, _| c(1.0, 0.3 * a as f64)).normalize());
            let u = u * rot;
            let g2 = u.transpose() * &g * u.map(|z| z.conj());
            let j2 = &jac * &u;
            let a = normalized_frame_from(&g, &h, &jac).unwrap();
            let b = normalized_frame_from(&g2, &h, &j2).unwrap();
            for (x, y) in a.lambdas.iter().zip(&b.lambdas) {
                prop_assert!((x - y).abs() < 1e-10 * (1.0 + x));
            }
        }
    }

    #[test]
    fn sigma_dominates_u_only_in_orthonormal_coordinates() {
        // with g(p) ≠ I the partial trace U_1 may exceed σ_1
        let g = real_matrix(2, 2, &[1.0, 0.9, 0.9, 1.0]);
        let h = g.clone();
        let jac = identity(2);
        let fr = normalized_frame_from(&g, &h, &jac).unwrap();
        let s = scalars_from(&g, &pullback_matrix(&jac, &h), &fr.lambdas).unwrap();
        assert!((s.sigma[0] - 1.0).abs() < 1e-12);
        assert!(s.u[0] > 5.0);
        // after a g-unitary change of coordinates the inequality holds
        let gp = frame_gram(&g, &fr.p);
        let jp = &fr.q_inv * &jac * &fr.p;
        let ap = pullback_matrix(&jp, &frame_gram(&h, &fr.q));
        let s = scalars_from(&gp, &ap, &fr.lambdas).unwrap();
        assert!(s.sigma[0] >= s.u[0] - 1e-12);
    }
}
