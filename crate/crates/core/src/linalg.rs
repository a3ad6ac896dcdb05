//! Small dense linear-algebra helpers on top of nalgebra.
//!
//! Hermitian forms follow the coordinate convention used everywhere in the
//! crate: a metric matrix `G` has entries `G[(a, b)] = g_{a b̄}`, and the
//! inner product of coordinate vectors is `⟨u, v⟩ = Σ u_a g_{a b̄} conj(v_b) = uᵀ G v̄`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::{CMatrix, Error, Result, C64};

pub type CVector = DVector<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_residual(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Eigen-decomposition of the Hermitian part of `m`, ascending, with
/// eigenvectors as columns in matching order.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMatrix::from_fn(m.nrows(), order.len(), |r, k| eig.eigenvectors[(r, order[k])]);
    (vals, vecs)
}

/// Verifies a metric matrix is Hermitian (to 1e-12 relative) and positive
/// definite in the scale-aware sense `min eig > 1e-12 · max eig`.
pub fn check_positive_definite(g: &CMatrix, label: &str, point: &str) -> Result<()> {
    if g.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite {
            label: label.to_string(),
            point: point.to_string(),
        });
    }
    let scale = max_abs(g).max(f64::MIN_POSITIVE);
    let ev = hermitian_eigenvalues(g);
    let (min_eig, max_eig) = (ev[0], ev[ev.len() - 1]);
    if hermitian_residual(g) > 1e-12 * scale.max(1.0) || max_eig <= 0.0 || min_eig <= 1e-12 * max_eig
    {
        return Err(Error::SingularMetric {
            label: label.to_string(),
            point: point.to_string(),
            min_eig,
            max_eig,
        });
    }
    Ok(())
}

pub fn inverse(m: &CMatrix) -> Option<CMatrix> {
    m.clone().try_inverse()
}

/// `uᵀ G v̄` — the metric pairing of two coordinate vectors.
pub fn g_inner(g: &CMatrix, u: &[C64], v: &[C64]) -> C64 {
    let n = g.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            acc += u[a] * g[(a, b)] * v[b].conj();
        }
    }
    acc
}

pub fn column(m: &CMatrix, j: usize) -> Vec<C64> {
    m.column(j).iter().copied().collect()
}

/// Gram-Schmidt (applied twice) of the columns of `basis` against the form
/// `⟨u, v⟩ = uᵀ G v̄`. Fails when the columns are numerically dependent.
pub fn g_orthonormalize(g: &CMatrix, basis: &CMatrix) -> Result<CMatrix> {
    let k = basis.ncols();
    let mut out = basis.clone();
    for j in 0..k {
        let original = column(basis, j);
        let scale = g_inner(g, &original, &original).re.sqrt();
        for _pass in 0..2 {
            let mut v = column(&out, j);
            for i in 0..j {
                let e = column(&out, i);
                let coef = g_inner(g, &v, &e);
                for (vr, er) in v.iter_mut().zip(&e) {
                    *vr -= coef * er;
                }
            }
            for (r, vr) in v.iter().enumerate() {
                out[(r, j)] = *vr;
            }
        }
        let v = column(&out, j);
        let norm = g_inner(g, &v, &v).re.max(0.0).sqrt();
        if !(norm > 1e-10 * scale.max(f64::MIN_POSITIVE)) {
            return Err(Error::invalid("frame columns are linearly dependent"));
        }
        for r in 0..out.nrows() {
            out[(r, j)] /= norm;
        }
    }
    Ok(out)
}

/// Gram matrix `Eᵀ G Ē` of the frame columns.
pub fn frame_gram(g: &CMatrix, frame: &CMatrix) -> CMatrix {
    frame.transpose() * g * frame.map(|z| z.conj())
}

/// A basis `P` with `Pᵀ G P̄ = I`, i.e. `conj(G) = L Lᴴ`, `P = L^{-H}`.
pub fn normalizing_basis(g: &CMatrix) -> Option<CMatrix> {
    let conj_g = g.map(|z| z.conj());
    let chol = nalgebra::Cholesky::new(conj_g)?;
    let l = chol.l();
    l.adjoint().try_inverse()
}

/// Extends orthonormal columns (standard inner product) to a full unitary
/// matrix by Gram-Schmidt against the standard basis.
pub fn unitary_completion(cols: &CMatrix) -> CMatrix {
    let n = cols.nrows();
    let mut basis: Vec<Vec<C64>> = (0..cols.ncols()).map(|j| column(cols, j)).collect();
    let mut cand = 0;
    while basis.len() < n && cand < n {
        let mut v = vec![C64::new(0.0, 0.0); n];
        v[cand] = C64::new(1.0, 0.0);
        cand += 1;
        for _pass in 0..2 {
            for e in &basis {
                let coef: C64 = v.iter().zip(e).map(|(a, b)| a * b.conj()).sum();
                for (vr, er) in v.iter_mut().zip(e) {
                    *vr -= coef * er;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    CMatrix::from_fn(n, n, |r, j| basis[j][r])
}

/// Full singular value decomposition `M = U Σ Vᴴ` with descending singular
/// values; `U` is `rows × rows` and `V` is `cols × cols`. Only the leading
/// `min(rows, cols)` singular values are returned.
pub fn svd_full(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u_thin = CMatrix::from_fn(rows, k, |r, j| u[(r, order[j])]);
    let v_thin = CMatrix::from_fn(cols, k, |r, j| v_t[(order[j], r)].conj());
    (unitary_completion(&u_thin), sigma, unitary_completion(&v_thin))
}

/// Upper-left `l × l` block.
pub fn leading_block(m: &CMatrix, l: usize) -> CMatrix {
    m.view((0, 0), (l, l)).into_owned()
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    DMatrix::from_row_slice(rows, cols, data).map(|x| C64::new(x, 0.0))
}

/// Neumaier-compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}
