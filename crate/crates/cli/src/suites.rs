//! Suite execution. Each suite returns JSON results, an overall verdict,
//! the worst residual and an optional per-point table.

use chernlab_core::bochner::{verify_eq1, verify_eq2, BochnerReport};
use chernlab_core::geometry::{
    chern_ricci_logdet, probe_curvatures, PointCurvature, ProbeKind, ProbeResult, ProbeSettings,
};
use chernlab_core::global::{
    check_estimate_a, check_estimate_b, check_estimate_c, gauduchon_check, integral_densities,
    integral_inequality_check, kahler_check, rigidity_witness, EstimateReport, ProbeOptions, PropertyReport,
};
use chernlab_core::linalg::{hermitian_eigenvalues, max_abs};
use chernlab_core::{ChartPoint, FdConfig, GridKind, GridSpec, C64};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{parse_points, resolve_scene, Resolved, RunConfig};
use crate::output::Table;
use crate::report::{matrix_json, point_json};
use crate::{ErrorKind, RunError, Suite};

/// Gram forms may dip this far below zero from FD noise.
const GRAM_TOL: f64 = 1e-7;
/// Default pass threshold for the trace identity at rigidity witnesses.
const RIGIDITY_TOL: f64 = 1e-5;

pub struct Context {
    pub cfg: RunConfig,
    pub scene: Resolved,
    pub fd: FdConfig,
    pub probe: ProbeOptions,
    pub want_table: bool,
}

pub struct SuiteOutput {
    pub results: Vec<Value>,
    pub pass: bool,
    pub max_residual: f64,
    pub table: Option<Table>,
}

impl Context {
    pub fn new(cfg: RunConfig) -> Result<Self, RunError> {
        let scene = resolve_scene(&cfg.scene)?;
        if let Some(grid) = &cfg.grid {
            grid.validate()?;
            if grid.dim() != scene.g.dim() {
                return Err(RunError::invalid(format!(
                    "grid has complex dimension {}, domain has {}",
                    grid.dim(),
                    scene.g.dim()
                )));
            }
        }
        let fd = cfg.fd.resolve();
        let probe = cfg.probe_options();
        Ok(Self {
            cfg,
            scene,
            fd,
            probe,
            want_table: true,
        })
    }

    /// Explicit points, else the scene's points, else the grid points.
    pub fn points(&self) -> Result<Vec<ChartPoint>, RunError> {
        let dim = self.scene.g.dim();
        if let Some(raw) = &self.cfg.points {
            if raw.is_empty() {
                return Err(RunError::invalid("points list is empty"));
            }
            return parse_points(raw, dim);
        }
        if !self.scene.default_points.is_empty() {
            return Ok(self.scene.default_points.clone());
        }
        match &self.cfg.grid {
            Some(grid) => Ok(grid.points()?),
            None => Err(RunError::invalid("this suite needs 'points' or a 'grid'")),
        }
    }

    pub fn grid(&self) -> Result<&GridSpec, RunError> {
        self.cfg
            .grid
            .as_ref()
            .ok_or_else(|| RunError::invalid("this suite needs a 'grid'"))
    }

    pub fn ells(&self) -> Vec<usize> {
        match self.cfg.ell {
            Some(l) => vec![l],
            None if !self.scene.default_ells.is_empty() => self.scene.default_ells.clone(),
            None => vec![1],
        }
    }

    pub fn ell(&self) -> usize {
        self.cfg.ell.unwrap_or(1)
    }

    fn table(&self, t: Table) -> Option<Table> {
        self.want_table.then_some(t)
    }
}

pub fn run_suite(suite: Suite, ctx: &Context) -> Result<SuiteOutput, RunError> {
    match suite {
        Suite::Curvature => curvature(ctx),
        Suite::Bochner1 => bochner(ctx, 1),
        Suite::Bochner2 => bochner(ctx, 2),
        Suite::SchwarzA => schwarz(ctx, 'a', None),
        Suite::SchwarzB => schwarz(ctx, 'b', Some(ctx.ell())),
        Suite::SchwarzC => schwarz(ctx, 'c', Some(ctx.ell())),
        Suite::Rigidity => rigidity(ctx),
        Suite::Integral => integral(ctx),
        Suite::Kahler => property(ctx, true),
        Suite::Gauduchon => property(ctx, false),
        Suite::All => all(ctx),
    }
}

fn curvature(ctx: &Context) -> Result<SuiteOutput, RunError> {
    let g = &ctx.scene.g;
    let points = ctx.points()?;
    let per_point: Vec<(PointCurvature, Value, Vec<f64>, f64, bool)> = points
        .par_iter()
        .map(|p| {
            let jet = g.jet(p, &ctx.fd)?;
            let pc = PointCurvature::from_jet(&jet);
            let (scalar, residue) = pc.scalar_with_residue();
            let ric1 = pc.ricci_first();
            let ric2 = pc.ricci_second();
            let route = max_abs(&(&ric1 - chern_ricci_logdet(g, p, &ctx.fd)?));
            let sym = pc.r.symmetry_residual();
            let kahler_sym = pc.r.kahler_symmetry_residual();
            let m = pc.dim();
            let mut max_r: f64 = 0.0;
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        for l in 0..m {
                            max_r = max_r.max(pc.r.get(i, j, k, l).norm());
                        }
                    }
                }
            }
            let tol = ctx.cfg.tolerance.residual.unwrap_or(ctx.fd.residual_tolerance(jet.error_estimate));
            let pass = route <= tol && sym <= tol && residue.abs() <= tol;
            let v = json!({
                "kind": "point",
                "point": point_json(p),
                "scalar": scalar,
                "scalar_imaginary_residue": residue,
                "ricci_first": matrix_json(&ric1),
                "ricci_first_eigenvalues": hermitian_eigenvalues(&ric1),
                "ricci_second_eigenvalues": hermitian_eigenvalues(&ric2),
                "ricci_route_residual": route,
                "symmetry_residual": sym,
                "kahler_symmetry_residual": kahler_sym,
                "max_abs_curvature": max_r,
                "error_estimate": jet.error_estimate,
                "tolerance": tol,
                "pass": pass,
            });
            let row = vec![scalar, route, sym, kahler_sym, max_r];
            Ok::<_, RunError>((pc, v, row, route.max(sym), pass))
        })
        .collect::<Result<_, _>>()?;

    let mut table = Table::new(
        g.dim(),
        &["scalar", "ricci_route_residual", "symmetry_residual", "kahler_symmetry_residual", "max_abs_curvature"],
    );
    let mut results = Vec::new();
    let mut curvatures = Vec::new();
    let (mut pass, mut max_residual) = (true, 0.0f64);
    for (p, (pc, v, row, resid, ok)) in points.iter().zip(per_point) {
        table.push(p, row);
        results.push(v);
        curvatures.push((p.clone(), pc));
        pass &= ok;
        max_residual = max_residual.max(resid);
    }
    let settings = ProbeSettings {
        ell: 1,
        n_samples: ctx.probe.n_samples,
        seed: ctx.probe.seed,
        refine_steps: ctx.probe.refine_steps,
    };
    let hsec = probe_curvatures(&curvatures, ProbeKind::HolomorphicSectional, &settings)?;
    let rbis = probe_curvatures(&curvatures, ProbeKind::RealBisectional, &settings)?;
    results.push(json!({
        "kind": "probe",
        "holomorphic_sectional": probe_json(&hsec),
        "real_bisectional": probe_json(&rbis),
    }));
    Ok(SuiteOutput {
        results,
        pass,
        max_residual,
        table: ctx.table(table),
    })
}

fn probe_json(r: &ProbeResult) -> Value {
    json!({
        "min": r.min,
        "max": r.max,
        "argmin": point_json(&r.min_witness.point),
        "argmax": point_json(&r.max_witness.point),
    })
}

fn bochner_json(r: &BochnerReport, p: &ChartPoint, tol: f64, pass: bool) -> Value {
    json!({
        "point": point_json(p),
        "ell": r.ell,
        "lambdas": r.lambdas,
        "residual": r.residual,
        "error_estimate": r.error_estimate,
        "tolerance": tol,
        "gram_min_eigenvalue": r.gram_min_eigenvalue,
        "hermitian_residual": r.hermitian_residual,
        "pass": pass,
        "lhs": matrix_json(&r.lhs),
        "rhs": matrix_json(&r.rhs),
        "breakdown": {
            "curvature_domain": matrix_json(&r.breakdown.curvature_m),
            "curvature_target": matrix_json(&r.breakdown.curvature_n),
            "metric_derivative": matrix_json(&r.breakdown.metric_derivative),
            "gram": matrix_json(&r.breakdown.gram),
        },
    })
}

fn bochner(ctx: &Context, which: u8) -> Result<SuiteOutput, RunError> {
    let (h, f) = ctx.scene.pair()?;
    let g = &ctx.scene.g;
    let points = ctx.points()?;
    let ells = ctx.ells();
    let jobs: Vec<(ChartPoint, usize)> = points
        .iter()
        .flat_map(|p| ells.iter().map(move |&l| (p.clone(), l)))
        .collect();
    let reports: Vec<BochnerReport> = jobs
        .par_iter()
        .map(|(p, l)| {
            if which == 1 {
                verify_eq1(g, h, f, p, *l, &ctx.fd)
            } else {
                verify_eq2(g, h, f, p, *l, &ctx.fd)
            }
        })
        .collect::<Result<_, _>>()?;

    let gram_tol = ctx.cfg.tolerance.gram.unwrap_or(GRAM_TOL);
    let mut table = Table::new(
        g.dim(),
        &["ell", "residual", "tolerance", "gram_min_eigenvalue", "pass"],
    );
    let mut results = Vec::new();
    let (mut pass, mut max_residual) = (true, 0.0f64);
    for ((p, _), r) in jobs.iter().zip(&reports) {
        let tol = ctx.cfg.tolerance.residual.unwrap_or(r.tolerance);
        let ok = r.passes(tol) && r.gram_min_eigenvalue >= -gram_tol;
        results.push(bochner_json(r, p, tol, ok));
        table.push(
            p,
            vec![r.ell as f64, r.residual, tol, r.gram_min_eigenvalue, if ok { 1.0 } else { 0.0 }],
        );
        pass &= ok;
        max_residual = max_residual.max(r.residual);
    }
    Ok(SuiteOutput {
        results,
        pass,
        max_residual,
        table: ctx.table(table),
    })
}

fn schwarz(ctx: &Context, part: char, ell: Option<usize>) -> Result<SuiteOutput, RunError> {
    let (h, f) = ctx.scene.pair()?;
    let g = &ctx.scene.g;
    let grid = ctx.grid()?;
    let report: EstimateReport = match part {
        'a' => check_estimate_a(g, h, f, grid, &ctx.probe, &ctx.fd)?,
        'b' => check_estimate_b(g, h, f, grid, ell.unwrap_or(1), &ctx.probe, &ctx.fd)?,
        _ => check_estimate_c(g, h, f, grid, ell.unwrap_or(1), &ctx.probe, &ctx.fd)?,
    };
    let column = match part {
        'a' => "w_m",
        'b' => "w_ell",
        _ => "sigma_ell",
    };
    let mut table = Table::new(g.dim(), &[column, "bound"]);
    for pv in &report.values {
        table.push(&pv.point, vec![pv.value, report.bound]);
    }
    let mut v = serde_json::to_value(&report).expect("report serializes");
    if let Value::Object(map) = &mut v {
        map.remove("values");
    }
    Ok(SuiteOutput {
        results: vec![v],
        pass: report.pass,
        max_residual: (-report.margin).max(0.0),
        table: ctx.table(table),
    })
}

fn rigidity(ctx: &Context) -> Result<SuiteOutput, RunError> {
    let (h, f) = ctx.scene.pair()?;
    let g = &ctx.scene.g;
    let grid = ctx.grid()?;
    let report = rigidity_witness(g, h, f, grid, ctx.ell(), &ctx.probe, &ctx.fd)?;
    let tol = ctx.cfg.tolerance.residual.unwrap_or(RIGIDITY_TOL);
    let mut table = Table::new(
        g.dim(),
        &["part", "value", "lhs_trace", "rhs_trace", "curvature_trace", "gram_trace", "residual"],
    );
    let (mut pass, mut max_residual) = (true, 0.0f64);
    for (code, w) in [(1.0, &report.part_a), (3.0, &report.part_c)] {
        if let Some(w) = w {
            pass &= w.residual <= tol;
            max_residual = max_residual.max(w.residual);
            table.push(
                &w.point,
                vec![code, w.value, w.lhs_trace, w.rhs_trace, w.curvature_trace, w.gram_trace, w.residual],
            );
        }
    }
    let mut v = serde_json::to_value(&report).expect("report serializes");
    if let Value::Object(map) = &mut v {
        map.insert("tolerance".into(), json!(tol));
        map.insert("pass".into(), json!(pass));
    }
    Ok(SuiteOutput {
        results: vec![v],
        pass,
        max_residual,
        table: ctx.table(table),
    })
}

fn zero_psi(_: &[C64]) -> f64 {
    0.0
}

fn integral(ctx: &Context) -> Result<SuiteOutput, RunError> {
    let (h, f) = ctx.scene.pair()?;
    let g = &ctx.scene.g;
    let grid = ctx.grid()?;
    let report = integral_inequality_check(g, h, f, grid, &zero_psi, &ctx.fd)?;
    let table = if ctx.want_table {
        let mut t = Table::new(g.dim(), &["lhs_density", "rhs_density"]);
        for (p, l, r) in integral_densities(g, h, f, grid, &zero_psi, &ctx.fd)? {
            t.push(&p, vec![l, r]);
        }
        Some(t)
    } else {
        None
    };
    Ok(SuiteOutput {
        results: vec![serde_json::to_value(&report).expect("report serializes")],
        pass: report.pass,
        max_residual: (report.lhs - report.rhs).max(0.0),
        table,
    })
}

fn property(ctx: &Context, kahler: bool) -> Result<SuiteOutput, RunError> {
    let points = ctx.points()?;
    let report: PropertyReport = if kahler {
        kahler_check(&ctx.scene.g, &points, &ctx.fd)?
    } else {
        gauduchon_check(&ctx.scene.g, &points, &ctx.fd)?
    };
    let pass = match ctx.cfg.tolerance.residual {
        Some(t) => report.residual <= t,
        None => report.pass,
    };
    let mut v = serde_json::to_value(&report).expect("report serializes");
    if let Value::Object(map) = &mut v {
        map.insert("pass".into(), json!(pass));
    }
    Ok(SuiteOutput {
        results: vec![v],
        pass,
        max_residual: report.residual,
        table: ctx.table(Table::new(ctx.scene.g.dim(), &[])),
    })
}

/// The suites that apply to the scene, in a fixed order.
fn applicable(ctx: &Context) -> Vec<Suite> {
    let m = ctx.scene.g.dim();
    let mut out = vec![Suite::Curvature, Suite::Kahler, Suite::Gauduchon];
    let Some(h) = &ctx.scene.h else { return out };
    out.extend([Suite::Bochner1, Suite::Bochner2]);
    if let Some(grid) = &ctx.cfg.grid {
        if m <= h.dim() {
            out.push(Suite::SchwarzA);
        }
        if ctx.ell() < m {
            out.push(Suite::SchwarzB);
        }
        out.extend([Suite::SchwarzC, Suite::Rigidity]);
        if grid.kind == GridKind::Torus {
            out.push(Suite::Integral);
        }
    }
    out
}

/// Runs every applicable suite. Unmet hypotheses are recorded per suite
/// and fail the run; invalid input and numerical breakdown abort it.
fn all(ctx: &Context) -> Result<SuiteOutput, RunError> {
    let mut results = Vec::new();
    let mut table = Table::new(ctx.scene.g.dim(), &[]);
    let (mut pass, mut max_residual) = (true, 0.0f64);
    for suite in applicable(ctx) {
        match run_suite(suite, ctx) {
            Ok(out) => {
                results.push(json!({"suite": suite.name(), "pass": out.pass, "max_residual": out.max_residual, "results": out.results}));
                pass &= out.pass;
                max_residual = max_residual.max(out.max_residual);
                if let Some(t) = out.table {
                    table.merge(suite.name(), t);
                }
            }
            Err(e) if e.kind == ErrorKind::Hypothesis => {
                results.push(json!({"suite": suite.name(), "pass": false, "error": {"kind": e.kind.name(), "message": e.message}}));
                pass = false;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(SuiteOutput {
        results,
        pass,
        max_residual,
        table: ctx.table(table),
    })
}
