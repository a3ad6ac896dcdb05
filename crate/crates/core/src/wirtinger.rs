//! Finite-difference Wirtinger jets.
//!
//! Every field is sampled on a centred stencil in the underlying real
//! coordinates `(x_a, y_a)` of each complex coordinate `z^a = x_a + i y_a`;
//! the real gradient and Hessian are then recombined into
//!
//! ```text
//! ∂/∂z^a        = ½ (∂x_a − i ∂y_a)
//! ∂/∂z̄^b        = ½ (∂x_a + i ∂y_a)
//! ∂²/∂z^a∂z̄^b   = ¼ (H[xa,xb] + H[ya,yb] + i (H[xa,yb] − H[ya,xb]))
//! ∂²/∂z^a∂z^b   = ¼ (H[xa,xb] − H[ya,yb] − i (H[xa,yb] + H[ya,xb]))
//! ```
//!
//! Diagonal Hessian entries use the 3-point rule, off-diagonal ones the
//! 4-point cross stencil; both (and the central first derivative) have an
//! `O(h²)` error, so one Richardson level `D(h/2) + (D(h/2) − D(h))/3`
//! raises the order to `O(h⁴)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::maps::HolomorphicMapField;
use crate::{CMatrix, Error, Result, C64};

/// A point of a complex chart, `m ≥ 1` finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint(Vec<C64>);

impl ChartPoint {
    pub fn new(coords: Vec<C64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("chart point needs at least one coordinate"));
        }
        if coords.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("chart point has a non-finite coordinate"));
        }
        Ok(Self(coords))
    }

    pub fn origin(m: usize) -> Self {
        Self(vec![C64::new(0.0, 0.0); m.max(1)])
    }

    /// One-dimensional point `re + i im`.
    pub fn scalar(re: f64, im: f64) -> Self {
        Self(vec![C64::new(re, im)])
    }

    pub fn coords(&self) -> &[C64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for ChartPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, z) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:.6}{:+.6}i", z.re, z.im)?;
        }
        write!(f, ")")
    }
}

pub(crate) fn fmt_coords(z: &[C64]) -> String {
    ChartPoint(z.to_vec()).to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    /// Relative step; the step on coordinate `a` is `step · max(1, |z^a|)`.
    pub step: f64,
    pub richardson: bool,
    /// Distance the domain must extend past the point along every real axis
    /// (scaled like the step).
    pub min_domain_margin: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            richardson: true,
            min_domain_margin: 4e-3,
        }
    }
}

impl FdConfig {
    pub fn with_step(step: f64, richardson: bool) -> Self {
        Self {
            step,
            richardson,
            min_domain_margin: 4.0 * step,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step < 1.0) {
            return Err(Error::invalid(format!("fd step {} must lie in (0, 1)", self.step)));
        }
        if !(self.min_domain_margin >= 4.0 * self.step) {
            return Err(Error::invalid(format!(
                "min_domain_margin {} must be at least 4·step = {}",
                self.min_domain_margin,
                4.0 * self.step
            )));
        }
        Ok(())
    }

    /// Heuristic pass tolerance for identities whose two sides carry
    /// second-order finite-difference error.
    pub fn residual_tolerance(&self, error_estimate: f64) -> f64 {
        (100.0 * error_estimate).max(1e-5)
    }
}

/// Second-order Wirtinger jet of a vector-valued field with `k` complex
/// components on an `m`-dimensional chart.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldJet {
    pub value: Vec<C64>,
    /// `d[γ][c] = ∂ F_c / ∂z^γ`
    pub d: Vec<Vec<C64>>,
    /// `dbar[δ][c] = ∂ F_c / ∂z̄^δ`
    pub dbar: Vec<Vec<C64>>,
    /// `ddbar[γ][δ][c] = ∂² F_c / ∂z^γ ∂z̄^δ`
    pub ddbar: Vec<Vec<Vec<C64>>>,
    /// `dd[α][γ][c] = ∂² F_c / ∂z^α ∂z^γ`
    pub dd: Vec<Vec<Vec<C64>>>,
    /// Rough bound on the error of the returned second derivatives.
    pub error_estimate: f64,
}

/// Scalar jet: value, `∂/∂z^γ`, `∂/∂z̄^δ` and the mixed Hessian `∂²/∂z^γ∂z̄^δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarJet2 {
    pub value: C64,
    pub d: Vec<C64>,
    pub dbar: Vec<C64>,
    pub ddbar: CMatrix,
    pub error_estimate: f64,
}

/// Jets of a holomorphic map `f: C^m → C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MapJets {
    pub value: Vec<C64>,
    /// `jac[(i, α)] = f^i_α`
    pub jac: CMatrix,
    /// `hess[i][(α, γ)] = f^i_{αγ}`
    pub hess: Vec<CMatrix>,
}

struct RealDerivs {
    value: Vec<C64>,
    grad: Vec<Vec<C64>>,
    hess: Vec<Vec<Vec<C64>>>,
    scale: f64,
}

fn shifted(p: &[C64], moves: &[(usize, f64)]) -> Vec<C64> {
    let mut q = p.to_vec();
    for &(r, s) in moves {
        if r % 2 == 0 {
            q[r / 2].re += s;
        } else {
            q[r / 2].im += s;
        }
    }
    q
}

fn lincomb(terms: &[(f64, &[C64])]) -> Vec<C64> {
    let k = terms[0].1.len();
    (0..k)
        .map(|c| terms.iter().map(|(w, v)| v[c] * *w).sum())
        .collect()
}

fn real_derivs<F>(eval: &F, p: &[C64], h: &[f64]) -> Result<RealDerivs>
where
    F: Fn(&[C64]) -> Result<Vec<C64>>,
{
    let nr = 2 * p.len();
    let f0 = eval(p)?;
    let mut scale = f0.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut track = |v: &Vec<C64>| {
        scale = v.iter().map(|z| z.norm()).fold(scale, f64::max);
    };
    let mut grad = Vec::with_capacity(nr);
    let mut hess = vec![vec![Vec::new(); nr]; nr];
    for r in 0..nr {
        let hr = h[r / 2];
        let fp = eval(&shifted(p, &[(r, hr)]))?;
        let fm = eval(&shifted(p, &[(r, -hr)]))?;
        track(&fp);
        track(&fm);
        grad.push(lincomb(&[(0.5 / hr, &fp), (-0.5 / hr, &fm)]));
        hess[r][r] = lincomb(&[(1.0 / (hr * hr), &fp), (-2.0 / (hr * hr), &f0), (1.0 / (hr * hr), &fm)]);
    }
    for r in 0..nr {
        for s in (r + 1)..nr {
            let (hr, hs) = (h[r / 2], h[s / 2]);
            let fpp = eval(&shifted(p, &[(r, hr), (s, hs)]))?;
            let fpm = eval(&shifted(p, &[(r, hr), (s, -hs)]))?;
            let fmp = eval(&shifted(p, &[(r, -hr), (s, hs)]))?;
            let fmm = eval(&shifted(p, &[(r, -hr), (s, -hs)]))?;
            for v in [&fpp, &fpm, &fmp, &fmm] {
                track(v);
            }
            let w = 0.25 / (hr * hs);
            let mixed = lincomb(&[(w, &fpp), (-w, &fpm), (-w, &fmp), (w, &fmm)]);
            hess[s][r] = mixed.clone();
            hess[r][s] = mixed;
        }
    }
    Ok(RealDerivs {
        value: f0,
        grad,
        hess,
        scale,
    })
}

fn extrapolate(coarse: &[C64], fine: &[C64]) -> Vec<C64> {
    coarse
        .iter()
        .zip(fine)
        .map(|(c, f)| f + (f - c) / 3.0)
        .collect()
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Checks the stencil margin: `p ± margin` along every real axis must lie
/// in the domain.
pub(crate) fn check_margin(domain: &dyn Fn(&[C64]) -> bool, p: &[C64], cfg: &FdConfig, label: &str) -> Result<()> {
    for r in 0..2 * p.len() {
        let margin = cfg.min_domain_margin * p[r / 2].norm().max(1.0);
        for s in [margin, -margin] {
            if !domain(&shifted(p, &[(r, s)])) {
                return Err(Error::DomainViolation {
                    label: label.to_string(),
                    point: fmt_coords(p),
                });
            }
        }
    }
    Ok(())
}

/// Full second-order jet of a vector-valued field.
pub fn field_jet<F>(
    field: F,
    domain: &dyn Fn(&[C64]) -> bool,
    p: &ChartPoint,
    cfg: &FdConfig,
    label: &str,
) -> Result<FieldJet>
where
    F: Fn(&[C64]) -> Vec<C64>,
{
    cfg.validate()?;
    let z = p.coords();
    let m = z.len();
    check_margin(domain, z, cfg, label)?;
    let eval = |q: &[C64]| -> Result<Vec<C64>> {
        if !domain(q) {
            return Err(Error::DomainViolation {
                label: label.to_string(),
                point: fmt_coords(z),
            });
        }
        let v = field(q);
        if v.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite {
                label: label.to_string(),
                point: fmt_coords(q),
            });
        }
        Ok(v)
    };
    let h: Vec<f64> = z.iter().map(|zi| cfg.step * zi.norm().max(1.0)).collect();
    let coarse = real_derivs(&eval, z, &h)?;
    let h_min = h.iter().copied().fold(f64::INFINITY, f64::min);
    let roundoff = 16.0 * f64::EPSILON * coarse.scale.max(1e-300) / (h_min * h_min);
    let (grad, hess, error_estimate) = if cfg.richardson {
        let half: Vec<f64> = h.iter().map(|x| 0.5 * x).collect();
        let fine = real_derivs(&eval, z, &half)?;
        let grad: Vec<Vec<C64>> = coarse
            .grad
            .iter()
            .zip(&fine.grad)
            .map(|(c, f)| extrapolate(c, f))
            .collect();
        let mut trunc: f64 = 0.0;
        let hess: Vec<Vec<Vec<C64>>> = coarse
            .hess
            .iter()
            .zip(&fine.hess)
            .map(|(crow, frow)| {
                crow.iter()
                    .zip(frow)
                    .map(|(c, f)| {
                        trunc = trunc.max(max_diff(c, f) / 3.0);
                        extrapolate(c, f)
                    })
                    .collect()
            })
            .collect();
        // the extrapolated value is O(h⁴); scale the O(h²) correction by h²
        (grad, hess, 4.0 * roundoff + trunc * (0.5 * h_min).powi(2))
    } else {
        (coarse.grad, coarse.hess, roundoff)
    };

    let k = coarse.value.len();
    let zero = C64::new(0.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let mut d = vec![vec![zero; k]; m];
    let mut dbar = vec![vec![zero; k]; m];
    let mut ddbar = vec![vec![vec![zero; k]; m]; m];
    let mut dd = vec![vec![vec![zero; k]; m]; m];
    for a in 0..m {
        let (xa, ya) = (2 * a, 2 * a + 1);
        for c in 0..k {
            d[a][c] = 0.5 * (grad[xa][c] - i * grad[ya][c]);
            dbar[a][c] = 0.5 * (grad[xa][c] + i * grad[ya][c]);
        }
        for b in 0..m {
            let (xb, yb) = (2 * b, 2 * b + 1);
            for c in 0..k {
                ddbar[a][b][c] =
                    0.25 * (hess[xa][xb][c] + hess[ya][yb][c] + i * (hess[xa][yb][c] - hess[ya][xb][c]));
                dd[a][b][c] =
                    0.25 * (hess[xa][xb][c] - hess[ya][yb][c] - i * (hess[xa][yb][c] + hess[ya][xb][c]));
            }
        }
    }
    Ok(FieldJet {
        value: coarse.value,
        d,
        dbar,
        ddbar,
        dd,
        error_estimate,
    })
}

/// Value, first Wirtinger derivatives and mixed second derivatives of a
/// scalar field.
pub fn wirtinger_jet2<F>(
    field: F,
    domain: &dyn Fn(&[C64]) -> bool,
    p: &ChartPoint,
    cfg: &FdConfig,
) -> Result<ScalarJet2>
where
    F: Fn(&[C64]) -> C64,
{
    let jet = field_jet(|z| vec![field(z)], domain, p, cfg, "scalar field")?;
    let m = p.dim();
    Ok(ScalarJet2 {
        value: jet.value[0],
        d: jet.d.iter().map(|v| v[0]).collect(),
        dbar: jet.dbar.iter().map(|v| v[0]).collect(),
        ddbar: CMatrix::from_fn(m, m, |a, b| jet.ddbar[a][b][0]),
        error_estimate: jet.error_estimate,
    })
}

/// Values, Jacobian `f^i_α` and second derivatives `f^i_{αγ}` of a
/// holomorphic map. Closed-form jets are returned verbatim when the map
/// supplies them; otherwise they are computed by finite differences and the
/// Cauchy-Riemann residual `max |∂f/∂z̄|` is checked.
pub fn holomorphic_jets(map: &HolomorphicMapField, p: &ChartPoint, cfg: &FdConfig) -> Result<MapJets> {
    if p.dim() != map.dim_in() {
        return Err(Error::invalid(format!(
            "{}: point has dimension {}, map expects {}",
            map.label(),
            p.dim(),
            map.dim_in()
        )));
    }
    if let Some(jets) = map.closed_form_jets(p.coords()) {
        if !map.contains(p.coords()) {
            return Err(Error::DomainViolation {
                label: map.label().to_string(),
                point: p.to_string(),
            });
        }
        return Ok(jets);
    }
    let jet = field_jet(|z| map.eval(z), &|z| map.contains(z), p, cfg, map.label())?;
    let (m, n) = (map.dim_in(), map.dim_out());
    let scale = 1.0
        + jet
            .d
            .iter()
            .flat_map(|v| v.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max);
    let tolerance = 1e-6 * scale;
    let residual = jet
        .dbar
        .iter()
        .flat_map(|v| v.iter())
        .chain(jet.ddbar.iter().flat_map(|r| r.iter().flat_map(|v| v.iter())))
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if residual > tolerance {
        return Err(Error::HolomorphyViolation {
            label: map.label().to_string(),
            point: p.to_string(),
            residual,
            tolerance,
        });
    }
    Ok(MapJets {
        value: jet.value,
        jac: CMatrix::from_fn(n, m, |i, a| jet.d[a][i]),
        hess: (0..n)
            .map(|i| CMatrix::from_fn(m, m, |a, g| jet.dd[a][g][i]))
            .collect(),
    })
}
