//! The ∂∂̄-Bochner identities for `log W_ℓ` and `U_ℓ`, checked at a point.
//!
//! Both sides are computed in normalized affine charts `z = p + P z'`,
//! `w = f(p) + Q w'` in which `g'(0) = I`, `h'(0) = I` and `∂f'(0)` is
//! `[diag(λ); 0]`. The left-hand side is a pure finite-difference Wirtinger
//! Hessian of the scalar `log W_ℓ(z')` (resp. `U_ℓ(z')`); the right-hand side
//! is assembled from the Chern curvatures, metric jets and map jets at the
//! origin. The two paths share no formulas.
//!
//! With `X^i_{αγ} = f^i_{αγ} + λ_α λ_γ ∂_{w^γ} h_{α ī}` and `α < ℓ`:
//!
//! ```text
//! ∂_γ∂_δ̄ log W_ℓ = Σ_α R^M_{γδ̄αᾱ} − Σ_α R^N_{γδ̄αᾱ} λ_γ λ_δ
//!                 − Σ_α Σ_{t ≥ ℓ} g_{αt̄,γ} g_{tᾱ,δ̄}
//!                 + Σ_α Σ_{i ≥ ℓ} λ_α⁻² X^i_{αγ} conj(X^i_{αδ})
//!
//! ∂_γ∂_δ̄ U_ℓ = Σ_a R^M_{γδ̄aā} λ_a² − Σ_a R^N_{γδ̄aā} λ_a² λ_γ λ_δ
//!             + Σ_{α, i} (∇_γ V)^i_α conj((∇_δ V)^i_α)
//! ```
//!
//! where `V_ℓ = Σ_{α<ℓ} f^i_α dz^α ⊗ e_i` and the induced connection acts as
//!
//! ```text
//! (∇_γ V)^i_α = [α<ℓ] f^i_{αγ} − Σ_{δ<ℓ} f^i_δ Γ^δ_{γα}(g) + [α<ℓ] Σ_{j,k} f^k_α f^j_γ Γ^i_{jk}(h),
//! Γ^δ_{γα}(g) = g^{δε̄} g_{αε̄,γ},   Γ^i_{jk}(h) = h^{is̄} h_{ks̄,j}.
//! ```
//!
//! Terms involving `λ_γ` are evaluated with the Jacobian entries `f^i_γ`
//! themselves, which coincide with `λ_γ δ^i_γ` in the normalized chart.

use serde::Serialize;

use crate::geometry::{MetricField, MetricJet};
use crate::linalg::{self, hermitian_eigenvalues, hermitian_residual, max_abs};
use crate::maps::{self, normalize_frames, pullback_matrix, HolomorphicMapField, NormalizedFrame};
use crate::tensor::Tensor3;
use crate::wirtinger::{check_margin, holomorphic_jets, wirtinger_jet2, ChartPoint, FdConfig, MapJets};
use crate::{CMatrix, Error, Result, C64};

/// Metrics and map expressed in normalized affine charts around `base`.
#[derive(Debug, Clone)]
pub struct NormalizedScene {
    pub g: MetricField,
    pub h: MetricField,
    pub f: HolomorphicMapField,
    pub frame: NormalizedFrame,
    /// The point `p` in the original domain chart.
    pub base: ChartPoint,
    /// `f(p)` in the original target chart.
    pub target_base: Vec<C64>,
}

impl NormalizedScene {
    pub fn dim_in(&self) -> usize {
        self.g.dim()
    }

    pub fn dim_out(&self) -> usize {
        self.h.dim()
    }

    pub fn origin(&self) -> ChartPoint {
        ChartPoint::origin(self.dim_in())
    }

    pub fn target_origin(&self) -> ChartPoint {
        ChartPoint::origin(self.dim_out())
    }

    /// `max` deviation of `g'(0)`, `h'(0)` from `I` and of `∂f'(0)` from
    /// `[diag(λ); 0]`.
    pub fn normalization_residual(&self, cfg: &FdConfig) -> Result<f64> {
        let (m, n) = (self.dim_in(), self.dim_out());
        let g0 = self.g.eval(self.origin().coords());
        let h0 = self.h.eval(self.target_origin().coords());
        let jac = holomorphic_jets(&self.f, &self.origin(), cfg)?.jac;
        let mut diag = CMatrix::zeros(n, m);
        for a in 0..m.min(n) {
            diag[(a, a)] = C64::new(self.frame.lambdas[a], 0.0);
        }
        Ok(max_abs(&(g0 - linalg::identity(m)))
            .max(max_abs(&(h0 - linalg::identity(n))))
            .max(max_abs(&(jac - diag))))
    }
}

pub fn normalize_scene(
    g: &MetricField,
    h: &MetricField,
    f: &HolomorphicMapField,
    p: &ChartPoint,
    cfg: &FdConfig,
) -> Result<NormalizedScene> {
    cfg.validate()?;
    let frame = normalize_frames(g, h, f, p, cfg)?;
    let fp = f.value_at(p.coords())?;
    let g2 = g.pullback_linear(p.coords(), &frame.p);
    let h2 = h.pullback_linear(&fp, &frame.q);
    let f2 = f.in_affine_charts(p.coords(), &frame.p, &frame.q_inv)?;
    // the new coordinates rescale distances, so the stencil margin is rechecked
    let o_m = ChartPoint::origin(g.dim());
    let o_n = ChartPoint::origin(h.dim());
    check_margin(&|z| g2.contains(z), o_m.coords(), cfg, g2.label())?;
    check_margin(&|z| h2.contains(z), o_n.coords(), cfg, h2.label())?;
    check_margin(&|z| f2.contains(z), o_m.coords(), cfg, f2.label())?;
    Ok(NormalizedScene {
        g: g2,
        h: h2,
        f: f2,
        frame,
        base: p.clone(),
        target_base: fp,
    })
}

/// Right-hand-side parts; for `U_ℓ` the metric-derivative part is zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BochnerBreakdown {
    pub curvature_m: CMatrix,
    pub curvature_n: CMatrix,
    pub metric_derivative: CMatrix,
    pub gram: CMatrix,
}

impl BochnerBreakdown {
    pub fn total(&self) -> CMatrix {
        &self.curvature_m + &self.curvature_n + &self.metric_derivative + &self.gram
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BochnerReport {
    pub ell: usize,
    pub lambdas: Vec<f64>,
    pub lhs: CMatrix,
    pub rhs: CMatrix,
    pub breakdown: BochnerBreakdown,
    /// `max |lhs − rhs|`.
    pub residual: f64,
    pub error_estimate: f64,
    /// Default pass threshold, `max(1e-5, 100 · error_estimate)`.
    pub tolerance: f64,
    /// Smallest eigenvalue of the Gram form: part 4 of the `log W_ℓ`
    /// identity, or `lhs − curvature` for `U_ℓ`.
    pub gram_min_eigenvalue: f64,
    pub hermitian_residual: f64,
}

impl BochnerReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.residual <= tolerance
    }

    pub fn pass(&self) -> bool {
        self.passes(self.tolerance)
    }
}

/// Chern connection coefficients of both metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectionCoeffs {
    /// `gamma_m.get(δ, γ, α) = Γ^δ_{γα}(g)`.
    pub gamma_m: Tensor3,
    /// `gamma_n.get(i, j, k) = Γ^i_{jk}(h)` at `f(p)`.
    pub gamma_n: Tensor3,
}

impl ConnectionCoeffs {
    pub fn from_jets(gj: &MetricJet, hj: &MetricJet) -> Self {
        Self {
            gamma_m: christoffel(gj),
            gamma_n: christoffel(hj),
        }
    }

    /// `max |Σ_δ Γ^δ_{γα} g_{δβ̄} − g_{αβ̄,γ}|`.
    pub fn contraction_residual(gamma: &Tensor3, jet: &MetricJet) -> f64 {
        let m = jet.dim();
        let mut worst: f64 = 0.0;
        for gm in 0..m {
            for al in 0..m {
                for be in 0..m {
                    let s: C64 = (0..m).map(|dl| gamma.get(dl, gm, al) * jet.g[(dl, be)]).sum();
                    worst = worst.max((s - jet.d.get(al, be, gm)).norm());
                }
            }
        }
        worst
    }
}

/// `Γ^δ_{γα} = Σ_ε g_{αε̄,γ} g^{δε̄}`, stored at `(δ, γ, α)`.
fn christoffel(jet: &MetricJet) -> Tensor3 {
    let m = jet.dim();
    Tensor3::from_fn(m, m, m, |dl, gm, al| (0..m).map(|e| jet.d.get(al, e, gm) * jet.inv(dl, e)).sum())
}

pub fn connection_coeffs(
    g: &MetricField,
    h: &MetricField,
    f: &HolomorphicMapField,
    p: &ChartPoint,
    cfg: &FdConfig,
) -> Result<ConnectionCoeffs> {
    maps::check_dims(g, h, f)?;
    let gj = g.jet(p, cfg)?;
    let fp = ChartPoint::new(f.value_at(p.coords())?)?;
    let hj = h.jet(&fp, cfg)?;
    Ok(ConnectionCoeffs::from_jets(&gj, &hj))
}

/// Jets at the origin of a normalized scene.
struct SceneJets {
    gj: MetricJet,
    hj: MetricJet,
    fj: MapJets,
}

impl SceneJets {
    fn new(scene: &NormalizedScene, cfg: &FdConfig) -> Result<Self> {
        Ok(Self {
            gj: scene.g.jet(&scene.origin(), cfg)?,
            hj: scene.h.jet(&scene.target_origin(), cfg)?,
            fj: holomorphic_jets(&scene.f, &scene.origin(), cfg)?,
        })
    }

    fn error_estimate(&self) -> f64 {
        self.gj.error_estimate + self.hj.error_estimate
    }
}

fn require_rank(frame: &NormalizedFrame, needed: usize) -> Result<()> {
    if needed == 0 || needed > frame.lambdas.len() {
        return Err(Error::invalid(format!(
            "ℓ = {needed} must satisfy 1 ≤ ℓ ≤ m = {}",
            frame.lambdas.len()
        )));
    }
    if frame.rank < needed {
        return Err(Error::RankDeficient {
            needed,
            rank: frame.rank,
        });
    }
    Ok(())
}

/// `A'(z') = J'ᵀ H'(f'(z')) conj(J')` and `G'(z')` at a point of the
/// normalized chart.
fn metrics_at(scene: &NormalizedScene, z: &[C64], cfg: &FdConfig) -> Option<(CMatrix, CMatrix)> {
    let zp = ChartPoint::new(z.to_vec()).ok()?;
    let jets = holomorphic_jets(&scene.f, &zp, cfg).ok()?;
    if !scene.h.contains(&jets.value) {
        return None;
    }
    let h = scene.h.eval(&jets.value);
    Some((pullback_matrix(&jets.jac, &h), scene.g.eval(z)))
}

fn nan() -> C64 {
    C64::new(f64::NAN, 0.0)
}

/// Wirtinger Hessian of `z' ↦ log W_ℓ(z')` at the origin, by finite differences.
pub fn lhs_eq1(scene: &NormalizedScene, ell: usize, cfg: &FdConfig) -> Result<(CMatrix, f64)> {
    require_rank(&scene.frame, ell)?;
    let field = |z: &[C64]| match metrics_at(scene, z, cfg) {
        Some((a, g)) => {
            let w = maps::w_ell(&g, &a, ell);
            if w > 0.0 {
                C64::new(w.ln(), 0.0)
            } else {
                nan()
            }
        }
        None => nan(),
    };
    let jet = wirtinger_jet2(field, &|z| scene.f.contains(z) && scene.g.contains(z), &scene.origin(), cfg)?;
    Ok((jet.ddbar, jet.error_estimate))
}

/// Wirtinger Hessian of `z' ↦ U_ℓ(z')` at the origin, by finite differences.
pub fn lhs_eq2(scene: &NormalizedScene, ell: usize, cfg: &FdConfig) -> Result<(CMatrix, f64)> {
    require_rank(&scene.frame, 1)?;
    if ell == 0 || ell > scene.dim_in() {
        return Err(Error::invalid(format!("ℓ = {ell} must satisfy 1 ≤ ℓ ≤ m = {}", scene.dim_in())));
    }
    let field = |z: &[C64]| match metrics_at(scene, z, cfg) {
        Some((a, g)) => match linalg::inverse(&g) {
            Some(g_inv) => C64::new(maps::u_ell(&g_inv, &a, ell), 0.0),
            None => nan(),
        },
        None => nan(),
    };
    let jet = wirtinger_jet2(field, &|z| scene.f.contains(z) && scene.g.contains(z), &scene.origin(), cfg)?;
    Ok((jet.ddbar, jet.error_estimate))
}

/// `R^N(f_γ, f̄_δ, e_a, ē_a)` summed with weights `w_a` over `a < ℓ`.
fn target_curvature_pulled(rn: &crate::CurvatureTensor, jac: &CMatrix, weights: &[f64]) -> CMatrix {
    let (n, m) = jac.shape();
    CMatrix::from_fn(m, m, |gm, dl| {
        let mut acc = C64::new(0.0, 0.0);
        for (a, &w) in weights.iter().enumerate() {
            for i in 0..n {
                if jac[(i, gm)] == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    acc += rn.get(i, j, a, a) * jac[(i, gm)] * jac[(j, dl)].conj() * w;
                }
            }
        }
        acc
    })
}

fn domain_curvature_sum(rm: &crate::CurvatureTensor, weights: &[f64]) -> CMatrix {
    let m = rm.dim();
    CMatrix::from_fn(m, m, |gm, dl| {
        weights
            .iter()
            .enumerate()
            .map(|(a, &w)| rm.get(gm, dl, a, a) * w)
            .sum()
    })
}

fn rhs_eq1_from(scene: &NormalizedScene, ell: usize, jets: &SceneJets) -> BochnerBreakdown {
    let (m, n) = (scene.dim_in(), scene.dim_out());
    let lam = &scene.frame.lambdas;
    let rm = jets.gj.curvature();
    let rn = jets.hj.curvature();
    let jac = &jets.fj.jac;
    let ones = vec![1.0; ell];

    let curvature_m = domain_curvature_sum(&rm, &ones);
    let curvature_n = -target_curvature_pulled(&rn, jac, &ones);
    let metric_derivative = CMatrix::from_fn(m, m, |gm, dl| {
        let mut acc = C64::new(0.0, 0.0);
        for al in 0..ell {
            for t in ell..m {
                acc += jets.gj.d.get(al, t, gm) * jets.gj.dbar.get(t, al, dl);
            }
        }
        -acc
    });
    // X^i_{αγ} = f^i_{αγ} + λ_α Σ_k ∂_{w^k} h_{α ī} f^k_γ
    let x = |i: usize, al: usize, gm: usize| -> C64 {
        let mut v = jets.fj.hess[i][(al, gm)];
        for k in 0..n {
            v += lam[al] * jets.hj.d.get(al, i, k) * jac[(k, gm)];
        }
        v
    };
    let gram = CMatrix::from_fn(m, m, |gm, dl| {
        let mut acc = C64::new(0.0, 0.0);
        for al in 0..ell {
            let w = lam[al].powi(-2);
            for i in ell..n {
                acc += x(i, al, gm) * x(i, al, dl).conj() * w;
            }
        }
        acc
    });
    BochnerBreakdown {
        curvature_m,
        curvature_n,
        metric_derivative,
        gram,
    }
}

/// Curvature and jet side of the `log W_ℓ` identity at the origin.
pub fn rhs_eq1(scene: &NormalizedScene, ell: usize, cfg: &FdConfig) -> Result<BochnerBreakdown> {
    require_rank(&scene.frame, ell)?;
    let jets = SceneJets::new(scene, cfg)?;
    Ok(rhs_eq1_from(scene, ell, &jets))
}

fn nabla_v_from(scene: &NormalizedScene, ell: usize, jets: &SceneJets) -> Tensor3 {
    let (m, n) = (scene.dim_in(), scene.dim_out());
    let cc = ConnectionCoeffs::from_jets(&jets.gj, &jets.hj);
    let jac = &jets.fj.jac;
    Tensor3::from_fn(m, m, n, |gm, al, i| {
        let mut v = C64::new(0.0, 0.0);
        if al < ell {
            v += jets.fj.hess[i][(al, gm)];
            for j in 0..n {
                for k in 0..n {
                    v += jac[(k, al)] * jac[(j, gm)] * cc.gamma_n.get(i, j, k);
                }
            }
        }
        for dl in 0..ell {
            v -= jac[(i, dl)] * cc.gamma_m.get(dl, gm, al);
        }
        v
    })
}

/// `(∇_γ V_ℓ)^i_α` at the origin, stored at `(γ, α, i)`.
pub fn nabla_v(scene: &NormalizedScene, ell: usize, cfg: &FdConfig) -> Result<Tensor3> {
    if ell == 0 || ell > scene.dim_in() {
        return Err(Error::invalid(format!("ℓ = {ell} must satisfy 1 ≤ ℓ ≤ m = {}", scene.dim_in())));
    }
    let jets = SceneJets::new(scene, cfg)?;
    Ok(nabla_v_from(scene, ell, &jets))
}

fn rhs_eq2_from(scene: &NormalizedScene, ell: usize, jets: &SceneJets) -> BochnerBreakdown {
    let (m, n) = (scene.dim_in(), scene.dim_out());
    let lam2: Vec<f64> = scene.frame.lambdas[..ell].iter().map(|l| l * l).collect();
    let rm = jets.gj.curvature();
    let rn = jets.hj.curvature();
    let nv = nabla_v_from(scene, ell, jets);
    let gram = CMatrix::from_fn(m, m, |gm, dl| {
        let mut acc = C64::new(0.0, 0.0);
        for al in 0..m {
            for i in 0..n {
                acc += nv.get(gm, al, i) * nv.get(dl, al, i).conj();
            }
        }
        acc
    });
    BochnerBreakdown {
        curvature_m: domain_curvature_sum(&rm, &lam2),
        curvature_n: -target_curvature_pulled(&rn, &jets.fj.jac, &lam2),
        metric_derivative: CMatrix::zeros(m, m),
        gram,
    }
}

pub fn rhs_eq2(scene: &NormalizedScene, ell: usize, cfg: &FdConfig) -> Result<BochnerBreakdown> {
    require_rank(&scene.frame, 1)?;
    if ell == 0 || ell > scene.dim_in() {
        return Err(Error::invalid(format!("ℓ = {ell} must satisfy 1 ≤ ℓ ≤ m = {}", scene.dim_in())));
    }
    let jets = SceneJets::new(scene, cfg)?;
    Ok(rhs_eq2_from(scene, ell, &jets))
}

fn report(ell: usize, scene: &NormalizedScene, lhs: CMatrix, breakdown: BochnerBreakdown, est: f64, gram_form: &CMatrix, cfg: &FdConfig) -> BochnerReport {
    let rhs = breakdown.total();
    let residual = max_abs(&(&lhs - &rhs));
    let herm = hermitian_residual(&lhs).max(hermitian_residual(&rhs));
    BochnerReport {
        ell,
        lambdas: scene.frame.lambdas.clone(),
        residual,
        error_estimate: est,
        tolerance: cfg.residual_tolerance(est),
        gram_min_eigenvalue: hermitian_eigenvalues(gram_form)[0],
        hermitian_residual: herm,
        lhs,
        rhs,
        breakdown,
    }
}

pub fn verify_eq1_scene(scene: &NormalizedScene, ell: usize, cfg: &FdConfig) -> Result<BochnerReport> {
    require_rank(&scene.frame, ell)?;
    let (lhs, lhs_err) = lhs_eq1(scene, ell, cfg)?;
    let jets = SceneJets::new(scene, cfg)?;
    let breakdown = rhs_eq1_from(scene, ell, &jets);
    let gram = breakdown.gram.clone();
    Ok(report(ell, scene, lhs, breakdown, lhs_err + jets.error_estimate(), &gram, cfg))
}

pub fn verify_eq2_scene(scene: &NormalizedScene, ell: usize, cfg: &FdConfig) -> Result<BochnerReport> {
    let (lhs, lhs_err) = lhs_eq2(scene, ell, cfg)?;
    let jets = SceneJets::new(scene, cfg)?;
    let breakdown = rhs_eq2_from(scene, ell, &jets);
    let gram_form = &lhs - &breakdown.curvature_m - &breakdown.curvature_n;
    Ok(report(ell, scene, lhs, breakdown, lhs_err + jets.error_estimate(), &gram_form, cfg))
}

pub fn verify_eq1(
    g: &MetricField,
    h: &MetricField,
    f: &HolomorphicMapField,
    p: &ChartPoint,
    ell: usize,
    cfg: &FdConfig,
) -> Result<BochnerReport> {
    verify_eq1_scene(&normalize_scene(g, h, f, p, cfg)?, ell, cfg)
}

pub fn verify_eq2(
    g: &MetricField,
    h: &MetricField,
    f: &HolomorphicMapField,
    p: &ChartPoint,
    ell: usize,
    cfg: &FdConfig,
) -> Result<BochnerReport> {
    verify_eq2_scene(&normalize_scene(g, h, f, p, cfg)?, ell, cfg)
}

/// `Σ_γ Re(hess_{γγ̄}) / λ_γ²`, the symmetrized trace of a Hessian against
/// the pulled-back metric at a point where `∂f` has full rank.
pub fn psi_trace(scene: &NormalizedScene, hess: &CMatrix) -> Result<f64> {
    let m = scene.dim_in();
    require_rank(&scene.frame, m)?;
    if hess.shape() != (m, m) {
        return Err(Error::invalid(format!("Hessian must be {m} × {m}")));
    }
    Ok((0..m).map(|g| hess[(g, g)].re / scene.frame.lambdas[g].powi(2)).sum())
}
