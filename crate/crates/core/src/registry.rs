//! Built-in metrics and maps, constructed by id from named parameters.
//!
//! Parameters are JSON values: integers and reals as numbers, complex numbers
//! as a number or a `[re, im]` pair, matrices as arrays of rows.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::geometry::MetricField;
use crate::linalg::identity;
use crate::maps::HolomorphicMapField;
use crate::weierstrass::Lattice;
use crate::wirtinger::{holomorphic_jets, ChartPoint, FdConfig, MapJets};
use crate::{CMatrix, Error, Result, C64};

pub type Params = BTreeMap<String, Value>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    Metric,
    Map,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamInfo {
    pub name: &'static str,
    pub kind: &'static str,
    pub default: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryInfo {
    pub id: &'static str,
    pub kind: EntryKind,
    pub description: &'static str,
    pub params: Vec<ParamInfo>,
}

const fn param(name: &'static str, kind: &'static str, default: Option<&'static str>) -> ParamInfo {
    ParamInfo { name, kind, default }
}

pub fn list() -> Vec<EntryInfo> {
    use EntryKind::*;
    let m = || param("m", "integer", Some("2"));
    vec![
        EntryInfo {
            id: "flat_m",
            kind: Metric,
            description: "constant metric scale·I on C^m",
            params: vec![m(), param("scale", "real", Some("1"))],
        },
        EntryInfo {
            id: "constant",
            kind: Metric,
            description: "constant Hermitian positive definite matrix G on C^m",
            params: vec![param("matrix", "complex matrix (m × m)", None)],
        },
        EntryInfo {
            id: "poincare_disk",
            kind: Metric,
            description: "(1 − |z|²)⁻² on the unit disk, curvature −2",
            params: vec![],
        },
        EntryInfo {
            id: "poincare_ball_m",
            kind: Metric,
            description: "∂∂̄(−log(1 − |z|²)) on the unit ball of C^m",
            params: vec![m()],
        },
        EntryInfo {
            id: "poincare_polydisk_m",
            kind: Metric,
            description: "product of Poincaré disk metrics on the unit polydisk",
            params: vec![m()],
        },
        EntryInfo {
            id: "fubini_study_m",
            kind: Metric,
            description: "∂∂̄ log(1 + |z|²) in the affine chart of CP^m",
            params: vec![m()],
        },
        EntryInfo {
            id: "hopf_m",
            kind: Metric,
            description: "δ_ij/|z|² on C^m minus the ball of radius r0 (non-Kähler for m ≥ 2)",
            params: vec![m(), param("r0", "real", Some("0.1"))],
        },
        EntryInfo {
            id: "flat_torus",
            kind: Metric,
            description: "flat metric on C/(ω₁Z + ω₂Z)",
            params: vec![param("lattice", "complex[2]", Some("[1, [0, 1]]"))],
        },
        EntryInfo {
            id: "conformal_flat_m",
            kind: Metric,
            description: "e^{a (Re z¹)²}·I on C^m (not Gauduchon for m ≥ 2, a ≠ 0)",
            params: vec![m(), param("a", "real", Some("1"))],
        },
        EntryInfo {
            id: "identity",
            kind: Map,
            description: "z ↦ z on C^m",
            params: vec![m()],
        },
        EntryInfo {
            id: "linear",
            kind: Map,
            description: "z ↦ M z for an n × m complex matrix",
            params: vec![param("matrix", "complex matrix", None)],
        },
        EntryInfo {
            id: "power",
            kind: Map,
            description: "z ↦ z^k on C",
            params: vec![param("k", "integer", Some("2"))],
        },
        EntryInfo {
            id: "blaschke",
            kind: Map,
            description: "z ↦ (z − a)/(1 − ā z), |a| < 1",
            params: vec![param("a", "complex", Some("0"))],
        },
        EntryInfo {
            id: "mobius",
            kind: Map,
            description: "z ↦ e^{iθ}(z − a)/(1 − ā z), a disk automorphism",
            params: vec![param("a", "complex", Some("0")), param("theta", "real", Some("0"))],
        },
        EntryInfo {
            id: "weierstrass_p",
            kind: Map,
            description: "Weierstrass ℘ of the lattice ω₁Z + ω₂Z, a degree-2 map to CP¹",
            params: vec![param("lattice", "complex[2]", Some("[1, [0, 1]]"))],
        },
        EntryInfo {
            id: "affine_torus",
            kind: Map,
            description: "z ↦ a z + b",
            params: vec![param("a", "complex", Some("1")), param("b", "complex", Some("0"))],
        },
        EntryInfo {
            id: "quadratic",
            kind: Map,
            description: "f^i(z) = c^i + L^i_α z^α + ½ Q^i_{αβ} z^α z^β",
            params: vec![
                param("linear", "complex matrix (n × m)", None),
                param("quad", "list of n complex m × m matrices", Some("zeros")),
                param("offset", "complex[n]", Some("zeros")),
            ],
        },
        EntryInfo {
            id: "polynomial",
            kind: Map,
            description: "z ↦ Σ c_k z^k on C",
            params: vec![param("coeffs", "complex[]", None)],
        },
        EntryInfo {
            id: "product_power",
            kind: Map,
            description: "(z¹, …, z^m) ↦ ((z¹)^k, z², …, z^m)",
            params: vec![m(), param("k", "integer", Some("2"))],
        },
    ]
}

pub fn lookup(id: &str) -> Option<EntryInfo> {
    list().into_iter().find(|e| e.id == id)
}

// ---------------------------------------------------------------- parameters

struct Reader<'a> {
    id: &'a str,
    params: &'a Params,
}

impl<'a> Reader<'a> {
    fn new(id: &'a str, params: &'a Params) -> Result<Self> {
        let info = lookup(id).ok_or_else(|| Error::invalid(format!("unknown registry id '{id}'")))?;
        for key in params.keys() {
            if !info.params.iter().any(|p| p.name == key) {
                return Err(Error::invalid(format!("'{id}' has no parameter '{key}'")));
            }
        }
        Ok(Self { id, params })
    }

    fn bad(&self, name: &str, what: &str) -> Error {
        Error::invalid(format!("'{}': parameter '{name}' must be {what}", self.id))
    }

    fn int(&self, name: &str, default: i64, min: i64, max: i64) -> Result<i64> {
        let v = match self.params.get(name) {
            None => default,
            Some(v) => v.as_i64().ok_or_else(|| self.bad(name, "an integer"))?,
        };
        if v < min || v > max {
            return Err(self.bad(name, &format!("in {min}..={max}")));
        }
        Ok(v)
    }

    fn dim(&self) -> Result<usize> {
        Ok(self.int("m", 2, 1, 16)? as usize)
    }

    fn real(&self, name: &str, default: f64) -> Result<f64> {
        match self.params.get(name) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| self.bad(name, "a finite number")),
        }
    }

    fn complex(&self, name: &str, default: C64) -> Result<C64> {
        match self.params.get(name) {
            None => Ok(default),
            Some(v) => parse_complex(v).ok_or_else(|| self.bad(name, "a number or [re, im]")),
        }
    }

    fn required(&self, name: &str) -> Result<&Value> {
        self.params
            .get(name)
            .ok_or_else(|| Error::invalid(format!("'{}': missing parameter '{name}'", self.id)))
    }

    fn matrix(&self, name: &str) -> Result<CMatrix> {
        parse_matrix(self.required(name)?).ok_or_else(|| self.bad(name, "a rectangular array of complex rows"))
    }

    fn vector(&self, value: &Value, name: &str) -> Result<Vec<C64>> {
        value
            .as_array()
            .and_then(|a| a.iter().map(parse_complex).collect::<Option<Vec<_>>>())
            .ok_or_else(|| self.bad(name, "an array of complex numbers"))
    }

    fn lattice(&self) -> Result<Lattice> {
        match self.params.get("lattice") {
            None => Ok(Lattice::square()),
            Some(v) => {
                let g = self.vector(v, "lattice")?;
                if g.len() != 2 {
                    return Err(self.bad("lattice", "two complex generators"));
                }
                Lattice::new(g[0], g[1])
            }
        }
    }
}

pub fn parse_complex(v: &Value) -> Option<C64> {
    let z = if let Some(x) = v.as_f64() {
        C64::new(x, 0.0)
    } else {
        let a = v.as_array()?;
        if a.len() != 2 {
            return None;
        }
        C64::new(a[0].as_f64()?, a[1].as_f64()?)
    };
    (z.re.is_finite() && z.im.is_finite()).then_some(z)
}

pub fn parse_matrix(v: &Value) -> Option<CMatrix> {
    let rows = v.as_array()?;
    let parsed: Vec<Vec<C64>> = rows
        .iter()
        .map(|r| r.as_array()?.iter().map(parse_complex).collect())
        .collect::<Option<_>>()?;
    let cols = parsed.first()?.len();
    if cols == 0 || parsed.iter().any(|r| r.len() != cols) {
        return None;
    }
    Some(CMatrix::from_fn(parsed.len(), cols, |i, j| parsed[i][j]))
}

fn norm_sq(z: &[C64]) -> f64 {
    z.iter().map(|w| w.norm_sqr()).sum()
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

// ------------------------------------------------------------------- metrics

pub fn build_metric(id: &str, params: &Params) -> Result<MetricField> {
    let r = Reader::new(id, params)?;
    if r.lookup_kind()? != EntryKind::Metric {
        return Err(Error::invalid(format!("'{id}' is a map, not a metric")));
    }
    Ok(match id {
        "flat_m" => {
            let m = r.dim()?;
            let s = r.real("scale", 1.0)?;
            if s <= 0.0 {
                return Err(r.bad("scale", "positive"));
            }
            MetricField::constant(identity(m).scale(s), format!("flat_{m}"))
        }
        "constant" => {
            let g = r.matrix("matrix")?;
            if g.nrows() != g.ncols() || crate::linalg::hermitian_residual(&g) > 1e-12 * (1.0 + crate::linalg::max_abs(&g)) {
                return Err(r.bad("matrix", "square and Hermitian"));
            }
            let ev = crate::linalg::hermitian_eigenvalues(&g);
            if !(ev[0] > 0.0) {
                return Err(r.bad("matrix", "positive definite"));
            }
            MetricField::constant(g, "constant")
        }
        "poincare_disk" => MetricField::new(
            1,
            "poincare_disk",
            |z| CMatrix::from_element(1, 1, C64::new((1.0 - z[0].norm_sqr()).powi(-2), 0.0)),
            |z| z[0].norm_sqr() < 1.0,
        ),
        "poincare_ball_m" => {
            let m = r.dim()?;
            MetricField::new(
                m,
                format!("poincare_ball_{m}"),
                move |z| {
                    let s = 1.0 - norm_sq(z);
                    CMatrix::from_fn(m, m, |a, b| {
                        let d = if a == b { 1.0 / s } else { 0.0 };
                        C64::new(d, 0.0) + z[a].conj() * z[b] / (s * s)
                    })
                },
                |z| norm_sq(z) < 1.0,
            )
        }
        "poincare_polydisk_m" => {
            let m = r.dim()?;
            MetricField::new(
                m,
                format!("poincare_polydisk_{m}"),
                move |z| {
                    CMatrix::from_fn(m, m, |a, b| {
                        if a == b {
                            C64::new((1.0 - z[a].norm_sqr()).powi(-2), 0.0)
                        } else {
                            zero()
                        }
                    })
                },
                |z| z.iter().all(|w| w.norm_sqr() < 1.0),
            )
        }
        "fubini_study_m" => {
            let m = r.dim()?;
            MetricField::new(
                m,
                format!("fubini_study_{m}"),
                move |z| {
                    let s = 1.0 + norm_sq(z);
                    // ((1 + |z|²)δ_ab − z̄_a z_b)/(1 + |z|²)², with the diagonal
                    // numerator summed directly as 1 + Σ_{c≠a} |z_c|² so it does
                    // not cancel for large |z|
                    CMatrix::from_fn(m, m, |a, b| {
                        let num = if a == b {
                            let rest: f64 = (0..m).filter(|&c| c != a).map(|c| z[c].norm_sqr()).sum();
                            C64::new(1.0 + rest, 0.0)
                        } else {
                            -z[a].conj() * z[b]
                        };
                        num / (s * s)
                    })
                },
                |_| true,
            )
        }
        "hopf_m" => {
            let m = r.dim()?;
            let r0 = r.real("r0", 0.1)?;
            if r0 <= 0.0 {
                return Err(r.bad("r0", "positive"));
            }
            MetricField::new(
                m,
                format!("hopf_{m}"),
                move |z| identity(m).scale(1.0 / norm_sq(z)),
                move |z| norm_sq(z) > r0 * r0,
            )
        }
        "flat_torus" => {
            r.lattice()?;
            MetricField::constant(identity(1), "flat_torus")
        }
        "conformal_flat_m" => {
            let m = r.dim()?;
            let a = r.real("a", 1.0)?;
            MetricField::new(
                m,
                format!("conformal_flat_{m}"),
                move |z| identity(m).scale((a * z[0].re * z[0].re).exp()),
                |_| true,
            )
        }
        _ => unreachable!("kind checked above"),
    })
}

impl Reader<'_> {
    fn lookup_kind(&self) -> Result<EntryKind> {
        Ok(lookup(self.id).expect("checked in new").kind)
    }
}

/// Lattice of a `flat_torus` metric or `weierstrass_p` map entry.
pub fn lattice_param(id: &str, params: &Params) -> Result<Lattice> {
    Reader::new(id, params)?.lattice()
}

// ---------------------------------------------------------------------- maps

fn scalar_jets(v: C64, d: C64, dd: C64) -> MapJets {
    MapJets {
        value: vec![v],
        jac: CMatrix::from_element(1, 1, d),
        hess: vec![CMatrix::from_element(1, 1, dd)],
    }
}

fn scalar_map<F>(label: String, domain: impl Fn(C64) -> bool + Send + Sync + 'static, jets: F) -> HolomorphicMapField
where
    F: Fn(C64) -> (C64, C64, C64) + Send + Sync + Clone + 'static,
{
    let j2 = jets.clone();
    HolomorphicMapField::new(1, 1, label, move |z| vec![jets(z[0]).0], move |z| domain(z[0])).with_jets(move |z| {
        let (v, d, dd) = j2(z[0]);
        scalar_jets(v, d, dd)
    })
}

/// `e^{iθ}(z − a)/(1 − ā z)` with derivatives.
fn mobius_jets(a: C64, rot: C64, z: C64) -> (C64, C64, C64) {
    let den = C64::new(1.0, 0.0) - a.conj() * z;
    let k = C64::new(1.0 - a.norm_sqr(), 0.0);
    let v = rot * (z - a) / den;
    let d = rot * k / (den * den);
    let dd = rot * 2.0 * k * a.conj() / (den * den * den);
    (v, d, dd)
}

pub fn build_map(id: &str, params: &Params) -> Result<HolomorphicMapField> {
    let r = Reader::new(id, params)?;
    if r.lookup_kind()? != EntryKind::Map {
        return Err(Error::invalid(format!("'{id}' is a metric, not a map")));
    }
    Ok(match id {
        "identity" => {
            let m = r.dim()?;
            HolomorphicMapField::linear(identity(m), format!("identity_{m}"))
        }
        "linear" => HolomorphicMapField::linear(r.matrix("matrix")?, "linear"),
        "power" => {
            let k = r.int("k", 2, 1, 64)? as i32;
            scalar_map(format!("power_{k}"), |_| true, move |z| {
                let kf = f64::from(k);
                let dd = if k >= 2 { z.powi(k - 2) * kf * (kf - 1.0) } else { zero() };
                (z.powi(k), z.powi(k - 1) * kf, dd)
            })
        }
        "blaschke" | "mobius" => {
            let a = r.complex("a", zero())?;
            if a.norm() >= 1.0 {
                return Err(r.bad("a", "inside the unit disk"));
            }
            let theta = if id == "mobius" { r.real("theta", 0.0)? } else { 0.0 };
            let rot = C64::from_polar(1.0, theta);
            scalar_map(
                id.to_string(),
                move |z| (C64::new(1.0, 0.0) - a.conj() * z).norm() > 1e-9,
                move |z| mobius_jets(a, rot, z),
            )
        }
        "weierstrass_p" => {
            let lat = r.lattice()?;
            let (w1, w2) = lat.generators();
            let min_period = w1.norm().min(w2.norm());
            let near_lattice = move |z: C64| {
                let red = lat.reduce(z);
                [C64::new(0.0, 0.0), w1, w2, w1 + w2]
                    .iter()
                    .map(|c| (red - c).norm())
                    .fold(f64::INFINITY, f64::min)
                    < 1e-3 * min_period
            };
            scalar_map(
                "weierstrass_p".into(),
                move |z| !near_lattice(z),
                move |z| {
                    let w = lat.wp(z);
                    (w.p, w.dp, w.ddp)
                },
            )
        }
        "affine_torus" => {
            let a = r.complex("a", C64::new(1.0, 0.0))?;
            let b = r.complex("b", zero())?;
            scalar_map("affine_torus".into(), |_| true, move |z| (a * z + b, a, zero()))
        }
        "quadratic" => {
            let lin = r.matrix("linear")?;
            let (n, m) = lin.shape();
            let quad: Vec<CMatrix> = match params.get("quad") {
                None => vec![CMatrix::zeros(m, m); n],
                Some(v) => {
                    let list = v.as_array().ok_or_else(|| r.bad("quad", "a list of matrices"))?;
                    let mats: Vec<CMatrix> = list
                        .iter()
                        .map(parse_matrix)
                        .collect::<Option<_>>()
                        .ok_or_else(|| r.bad("quad", "a list of complex matrices"))?;
                    if mats.len() != n || mats.iter().any(|q| q.shape() != (m, m)) {
                        return Err(r.bad("quad", &format!("{n} matrices of size {m} × {m}")));
                    }
                    // only the symmetric part contributes to z^α z^β
                    mats.into_iter().map(|q| (&q + q.transpose()).scale(0.5)).collect()
                }
            };
            let offset = match params.get("offset") {
                None => vec![zero(); n],
                Some(v) => {
                    let o = r.vector(v, "offset")?;
                    if o.len() != n {
                        return Err(r.bad("offset", &format!("{n} complex numbers")));
                    }
                    o
                }
            };
            quadratic_map(lin, quad, offset)
        }
        "polynomial" => {
            let coeffs = r.vector(r.required("coeffs")?, "coeffs")?;
            if coeffs.is_empty() {
                return Err(r.bad("coeffs", "nonempty"));
            }
            scalar_map("polynomial".into(), |_| true, move |z| {
                let (mut v, mut d, mut dd) = (zero(), zero(), zero());
                for c in coeffs.iter().rev() {
                    dd = dd * z + 2.0 * d;
                    d = d * z + v;
                    v = v * z + c;
                }
                (v, d, dd)
            })
        }
        "product_power" => {
            let m = r.dim()?;
            let k = r.int("k", 2, 1, 64)? as i32;
            let kf = f64::from(k);
            let value = move |z: &[C64]| -> Vec<C64> {
                let mut w = z.to_vec();
                w[0] = z[0].powi(k);
                w
            };
            HolomorphicMapField::new(m, m, format!("product_power_{m}_{k}"), value, |_| true).with_jets(move |z| {
                let mut jac = identity(m);
                jac[(0, 0)] = z[0].powi(k - 1) * kf;
                let mut hess = vec![CMatrix::zeros(m, m); m];
                if k >= 2 {
                    hess[0][(0, 0)] = z[0].powi(k - 2) * kf * (kf - 1.0);
                }
                MapJets {
                    value: value(z),
                    jac,
                    hess,
                }
            })
        }
        _ => unreachable!("kind checked above"),
    })
}

fn quadratic_map(lin: CMatrix, quad: Vec<CMatrix>, offset: Vec<C64>) -> HolomorphicMapField {
    let (n, m) = lin.shape();
    let value = {
        let (lin, quad, offset) = (lin.clone(), quad.clone(), offset.clone());
        move |z: &[C64]| -> Vec<C64> {
            (0..n)
                .map(|i| {
                    let mut v = offset[i];
                    for a in 0..m {
                        v += lin[(i, a)] * z[a];
                        for b in 0..m {
                            v += 0.5 * quad[i][(a, b)] * z[a] * z[b];
                        }
                    }
                    v
                })
                .collect()
        }
    };
    let v2 = value.clone();
    HolomorphicMapField::new(m, n, "quadratic", value, |_| true).with_jets(move |z| MapJets {
        value: v2(z),
        jac: CMatrix::from_fn(n, m, |i, a| lin[(i, a)] + (0..m).map(|b| quad[i][(a, b)] * z[b]).sum::<C64>()),
        hess: quad.clone(),
    })
}

// ------------------------------------------------------------------ self-test

/// Points inside the chart domain of an entry with the given dimension.
pub fn self_test_points(id: &str, dim: usize) -> Vec<ChartPoint> {
    let base: [[f64; 2]; 3] = match id {
        "hopf_m" => [[0.8, 0.1], [-0.3, 0.6], [0.5, -0.5]],
        "weierstrass_p" | "flat_torus" => [[0.3, 0.2], [0.7, 0.55], [0.15, 0.85]],
        _ => [[0.1, 0.05], [-0.2, 0.15], [0.25, -0.1]],
    };
    base.iter()
        .enumerate()
        .map(|(k, &[re, im])| {
            let coords = (0..dim)
                .map(|a| {
                    let s = 1.0 / (1.0 + a as f64);
                    C64::new(re * s + 0.01 * k as f64, im * s)
                })
                .collect();
            ChartPoint::new(coords).expect("finite")
        })
        .collect()
}

/// Checks a metric is Hermitian positive definite at its self-test points.
pub fn self_test_metric(id: &str, params: &Params) -> Result<()> {
    let g = build_metric(id, params)?;
    for p in self_test_points(id, g.dim()) {
        g.at(p.coords())?;
    }
    Ok(())
}

/// Checks closed-form map jets against finite differences at the self-test
/// points, with tolerance `10⁻⁶ · (1 + |jet|)`.
pub fn self_test_map(id: &str, params: &Params) -> Result<()> {
    let f = build_map(id, params)?;
    let fd = f.clone().without_jets();
    let cfg = FdConfig::default();
    for p in self_test_points(id, f.dim_in()) {
        let a = holomorphic_jets(&f, &p, &cfg)?;
        let b = holomorphic_jets(&fd, &p, &cfg)?;
        let scale = 1.0 + crate::linalg::max_abs(&a.jac);
        let mut dev = crate::linalg::max_abs(&(&a.jac - &b.jac));
        for (x, y) in a.hess.iter().zip(&b.hess) {
            dev = dev.max(crate::linalg::max_abs(&(x - y)) / (1.0 + crate::linalg::max_abs(x)));
        }
        if dev > 1e-6 * scale {
            return Err(Error::invalid(format!(
                "'{id}': closed-form jets deviate from finite differences by {dev:e} at {p}"
            )));
        }
    }
    Ok(())
}

/// Example parameters for every entry, used for self-tests.
pub fn example_params(id: &str) -> Params {
    let json = match id {
        "linear" => r#"{"matrix": [[2, 0], [0, [0, 1]], [1, 1]]}"#,
        "constant" => r#"{"matrix": [[2, [0.5, 0.5]], [[0.5, -0.5], 1]]}"#,
        "blaschke" => r#"{"a": [0.3, 0.1]}"#,
        "mobius" => r#"{"a": [0.2, -0.4], "theta": 0.7}"#,
        "affine_torus" => r#"{"a": 2, "b": [0.1, 0.2]}"#,
        "quadratic" => r#"{"linear": [[1, 0], [0, 1], [0.2, 0.1]], "quad": [[[0, 0.5], [0.5, 0]], [[0.3, 0], [0, 0]], [[0, 0], [0, [0, 1]]]]}"#,
        "polynomial" => r#"{"coeffs": [0.1, 0.3, [0.2, 0.1], -0.05]}"#,
        "power" => r#"{"k": 3}"#,
        _ => "{}",
    };
    serde_json::from_str(json).expect("valid example parameters")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn ids_are_unique_and_cover_required_entries() {
        let ids: Vec<&str> = list().iter().map(|e| e.id).collect();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), ids.len());
        for id in [
            "flat_m",
            "poincare_disk",
            "poincare_ball_m",
            "fubini_study_m",
            "hopf_m",
            "flat_torus",
            "identity",
            "linear",
            "power",
            "blaschke",
            "mobius",
            "weierstrass_p",
            "affine_torus",
        ] {
            assert!(ids.contains(&id), "{id}");
        }
    }

    #[test]
    fn every_entry_passes_self_test() {
        for e in list() {
            let params = example_params(e.id);
            match e.kind {
                EntryKind::Metric => self_test_metric(e.id, &params).unwrap(),
                EntryKind::Map => self_test_map(e.id, &params).unwrap(),
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let p: Params = serde_json::from_str(r#"{"bogus": 1}"#).unwrap();
        assert!(build_metric("flat_m", &p).is_err());
        let p: Params = serde_json::from_str(r#"{"a": [1.5, 0]}"#).unwrap();
        assert!(build_map("mobius", &p).is_err());
        assert!(build_map("nope", &Params::new()).is_err());
        assert!(build_map("poincare_disk", &Params::new()).is_err());
        assert!(build_map("linear", &Params::new()).is_err());
        let p: Params = serde_json::from_str(r#"{"matrix": [[1, 2], [3]]}"#).unwrap();
        assert!(build_map("linear", &p).is_err());
    }

    #[test]
    fn mobius_preserves_disk_and_values() {
        let p: Params = serde_json::from_str(r#"{"a": 0.3}"#).unwrap();
        let f = build_map("blaschke", &p).unwrap();
        let j = f.closed_form_jets(&[c(0.0, 0.0)]).unwrap();
        assert!((j.value[0] - c(-0.3, 0.0)).norm() < 1e-15);
        assert!((j.jac[(0, 0)] - c(0.91, 0.0)).norm() < 1e-15);
        let g = build_map("mobius", &example_params("mobius")).unwrap();
        for z in [c(0.5, 0.3), c(-0.9, 0.1)] {
            assert!(g.eval(&[z])[0].norm() < 1.0);
        }
    }

    #[test]
    fn power_and_polynomial_jets() {
        let p: Params = serde_json::from_str(r#"{"k": 2}"#).unwrap();
        let j = build_map("power", &p).unwrap().closed_form_jets(&[c(1.0, 0.0)]).unwrap();
        assert_eq!((j.value[0], j.jac[(0, 0)], j.hess[0][(0, 0)]), (c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0)));
        let p: Params = serde_json::from_str(r#"{"coeffs": [1, 2, 3]}"#).unwrap();
        let j = build_map("polynomial", &p).unwrap().closed_form_jets(&[c(2.0, 0.0)]).unwrap();
        assert_eq!((j.value[0], j.jac[(0, 0)], j.hess[0][(0, 0)]), (c(17.0, 0.0), c(14.0, 0.0), c(6.0, 0.0)));
    }

    #[test]
    fn permutation_map_jets() {
        let p: Params = serde_json::from_str(r#"{"matrix": [[0, 1], [1, 0]]}"#).unwrap();
        let f = build_map("linear", &p).unwrap();
        let j = holomorphic_jets(&f.without_jets(), &ChartPoint::origin(2), &FdConfig::default()).unwrap();
        assert!((j.jac[(0, 1)] - c(1.0, 0.0)).norm() < 1e-10 && j.jac[(0, 0)].norm() < 1e-10);
        assert!(j.hess.iter().all(|h| crate::linalg::max_abs(h) < 1e-6));
    }
}
