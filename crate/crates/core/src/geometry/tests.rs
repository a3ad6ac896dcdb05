use super::*;
use crate::linalg::{c, identity, max_abs, real_matrix};

fn cfg() -> FdConfig {
    FdConfig::default()
}

fn flat(m: usize) -> MetricField {
    MetricField::constant(identity(m), "flat")
}

fn poincare() -> MetricField {
    MetricField::new(
        1,
        "poincare",
        |z| CMatrix::from_element(1, 1, c((1.0 - z[0].norm_sqr()).powi(-2), 0.0)),
        |z| z[0].norm() < 1.0,
    )
}

/// `g = ∂∂̄ log(1 + |z|²)`.
fn fubini_study(m: usize) -> MetricField {
    MetricField::new(
        m,
        "fs",
        move |z| {
            let r: f64 = z.iter().map(|w| w.norm_sqr()).sum();
            CMatrix::from_fn(m, m, |a, b| {
                let delta = if a == b { 1.0 / (1.0 + r) } else { 0.0 };
                c(delta, 0.0) - z[a].conj() * z[b] / (1.0 + r).powi(2)
            })
        },
        |_| true,
    )
}

fn hopf(m: usize) -> MetricField {
    MetricField::new(
        m,
        "hopf",
        move |z| {
            let r: f64 = z.iter().map(|w| w.norm_sqr()).sum();
            identity(m).scale(1.0 / r)
        },
        |z| z.iter().map(|w| w.norm_sqr()).sum::<f64>() > 0.01,
    )
}

fn pt(coords: &[(f64, f64)]) -> ChartPoint {
    ChartPoint::new(coords.iter().map(|&(a, b)| c(a, b)).collect()).unwrap()
}

#[test]
fn flat_curvature_vanishes() {
    let r = chern_curvature(&flat(3), &pt(&[(0.1, 0.2), (-0.3, 0.0), (0.5, 0.5)]), &cfg()).unwrap();
    assert!(r.r.max_abs() < 1e-12);
}

#[test]
fn poincare_and_fubini_study_at_origin() {
    let o = ChartPoint::origin(1);
    let r = chern_curvature(&poincare(), &o, &cfg()).unwrap();
    assert!((r.get(0, 0, 0, 0) - c(-2.0, 0.0)).norm() < 1e-8);
    let r = chern_curvature(&fubini_study(1), &o, &cfg()).unwrap();
    assert!((r.get(0, 0, 0, 0) - c(2.0, 0.0)).norm() < 1e-8);
    assert!((chern_scalar(&poincare(), &o, &cfg()).unwrap() + 2.0).abs() < 1e-8);
    let ric = chern_ricci_first(&fubini_study(1), &o, &cfg()).unwrap();
    assert!((ric[(0, 0)] - c(2.0, 0.0)).norm() < 1e-8);
}

#[test]
fn poincare_sectional_is_constant() {
    let p = pt(&[(0.4, -0.3)]);
    let h = holomorphic_sectional(&poincare(), &p, &[c(0.7, 0.2)], &cfg()).unwrap();
    assert!((h + 2.0).abs() < 1e-7, "{h}");
}

#[test]
fn conjugate_symmetry_on_hopf_and_fs() {
    for (g, p) in [
        (hopf(2), pt(&[(0.7, 0.2), (-0.4, 0.5)])),
        (fubini_study(3), pt(&[(0.3, 0.1), (0.2, -0.6), (-0.5, 0.0)])),
    ] {
        let r = chern_curvature(&g, &p, &cfg()).unwrap();
        assert!(r.symmetry_residual() < 1e-9);
    }
}

#[test]
fn fubini_study_two_dimensional_fixtures() {
    let pc = point_curvature(&fubini_study(2), &ChartPoint::origin(2), &cfg()).unwrap();
    // R_{ij̄kl̄} = δ_ij δ_kl + δ_il δ_kj at the origin
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let expected = f64::from(u8::from(i == j && k == l)) + f64::from(u8::from(i == l && k == j));
                    assert!((pc.r.get(i, j, k, l) - c(expected, 0.0)).norm() < 1e-8);
                }
            }
        }
    }
    let e1 = [c(1.0, 0.0), c(0.0, 0.0)];
    let e2 = [c(0.0, 0.0), c(1.0, 0.0)];
    assert!((pc.bisectional(&e1, &e2).unwrap() - 1.0).abs() < 1e-8);
    assert!((pc.scalar() - 6.0).abs() < 1e-8);
    let uniform = FrameSample::new(identity(2), vec![1.0, 1.0]).unwrap();
    assert!((pc.real_bisectional(&uniform).unwrap() - 3.0).abs() < 1e-8);
    assert!(pc.r.kahler_symmetry_residual() < 1e-7);
    assert!(max_abs(&(pc.ricci_first() - pc.ricci_second())) < 1e-7);
    // S_m over the whole space is the scalar curvature
    assert!((pc.scalar_l(&identity(2)).unwrap() - 6.0).abs() < 1e-8);
}

#[test]
fn hopf_ricci_curvatures_differ() {
    let pc = point_curvature(&hopf(2), &pt(&[(1.0, 0.0), (0.0, 0.0)]), &cfg()).unwrap();
    let ric1 = pc.ricci_first();
    let ric2 = pc.ricci_second();
    assert!(max_abs(&(ric1 - real_matrix(2, 2, &[0.0, 0.0, 0.0, 2.0]))) < 1e-7);
    assert!(max_abs(&(ric2 - identity(2))) < 1e-7);
    assert!((pc.scalar() - 2.0).abs() < 1e-7);
    assert!(pc.r.kahler_symmetry_residual() > 0.1);
    let h = pc.holomorphic_sectional(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    assert!((h - 1.0).abs() < 1e-7);
}

#[test]
fn ricci_routes_agree() {
    let p = pt(&[(0.6, -0.2), (0.1, 0.3)]);
    for g in [hopf(2), fubini_study(2)] {
        let a = chern_ricci_first(&g, &p, &cfg()).unwrap();
        let b = chern_ricci_logdet(&g, &p, &cfg()).unwrap();
        assert!(max_abs(&(a - b)) < 1e-6);
    }
}

#[test]
fn frame_change_rules() {
    let pc = point_curvature(&hopf(2), &pt(&[(0.8, 0.1), (0.3, -0.2)]), &cfg()).unwrap();
    let same = pc.r.in_frame(&identity(2)).unwrap();
    assert!(same.r.max_abs_diff(&pc.r.r) < 1e-15);
    let t = c(0.5, 1.5);
    let mut d = identity(2);
    d[(0, 0)] = t;
    let scaled = pc.r.in_frame(&d).unwrap();
    let expected = pc.r.get(0, 0, 0, 0) * t.norm_sqr().powi(2);
    assert!((scaled.get(0, 0, 0, 0) - expected).norm() < 1e-12);
}

#[test]
fn scalar_is_invariant_under_unitary_frames() {
    let g = fubini_study(2);
    let pc = point_curvature(&g, &pt(&[(0.3, 0.4), (-0.2, 0.1)]), &cfg()).unwrap();
    let raw = CMatrix::from_fn(2, 2, |a, b| c(0.3 + a as f64, 0.7 * b as f64 - 0.2));
    let e = g_orthonormalize(&pc.g, &raw).unwrap();
    let rf = pc.r.in_frame(&e).unwrap();
    let s: f64 = (0..2)
        .flat_map(|i| (0..2).map(move |k| (i, k)))
        .map(|(i, k)| rf.get(i, i, k, k).re)
        .sum();
    assert!((s - pc.scalar()).abs() < 1e-9);
}

#[test]
fn ell_functionals_interpolate() {
    let pc = point_curvature(&hopf(3), &pt(&[(0.8, 0.1), (0.3, -0.2), (-0.1, 0.4)]), &cfg()).unwrap();
    let v = [c(0.4, 0.2), c(-0.1, 0.9), c(0.3, 0.0)];
    let sigma = CMatrix::from_column_slice(3, 1, &v);
    let h = pc.holomorphic_sectional(&v).unwrap();
    assert!((pc.ricci_l_first(&sigma, &v).unwrap() - h).abs() < 1e-9);
    assert!((pc.ricci_l_second(&sigma, &v).unwrap() - h).abs() < 1e-9);
    assert!((pc.scalar_l(&sigma).unwrap() - h).abs() < 1e-9);

    // ℓ = m: full Ricci contractions on the g-unit vector
    let full = identity(3);
    let n = g_inner(&pc.g, &v, &v).re;
    let quad = |ric: &CMatrix| -> f64 {
        let mut s = C64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                s += ric[(i, j)] * v[i] * v[j].conj();
            }
        }
        s.re / n
    };
    assert!((pc.ricci_l_first(&full, &v).unwrap() - quad(&pc.ricci_first())).abs() < 1e-7);
    assert!((pc.ricci_l_second(&full, &v).unwrap() - quad(&pc.ricci_second())).abs() < 1e-7);
}

#[test]
fn ell_ricci_is_basis_independent() {
    let pc = point_curvature(&hopf(3), &pt(&[(0.8, 0.1), (0.3, -0.2), (-0.1, 0.4)]), &cfg()).unwrap();
    let sigma = CMatrix::from_fn(3, 2, |a, b| c(1.0 + a as f64 * b as f64, 0.3 * a as f64 - 0.5 * b as f64));
    let mix = CMatrix::from_fn(2, 2, |a, b| c(if a == b { 1.0 } else { 0.4 }, 0.2 * a as f64));
    let rebased = &sigma * mix;
    let v = linalg::column(&(&sigma * CMatrix::from_column_slice(2, 1, &[c(0.3, 0.1), c(-0.7, 0.5)])), 0);
    let a = pc.ricci_l_first(&sigma, &v).unwrap();
    let b = pc.ricci_l_first(&rebased, &v).unwrap();
    assert!((a - b).abs() < 1e-9);
    let a = pc.scalar_l(&sigma).unwrap();
    let b = pc.scalar_l(&rebased).unwrap();
    assert!((a - b).abs() < 1e-9);
}

#[test]
fn vector_outside_subspace_rejected() {
    let pc = point_curvature(&flat(2), &ChartPoint::origin(2), &cfg()).unwrap();
    let sigma = CMatrix::from_column_slice(2, 1, &[c(1.0, 0.0), c(0.0, 0.0)]);
    assert!(pc.ricci_l_first(&sigma, &[c(0.0, 0.0), c(1.0, 0.0)]).is_err());
}

#[test]
fn real_bisectional_reduces_to_sectional() {
    let pc = point_curvature(&hopf(2), &pt(&[(0.6, 0.3), (0.2, -0.5)]), &cfg()).unwrap();
    let e = g_orthonormalize(&pc.g, &CMatrix::from_fn(2, 2, |a, b| c(1.0 + a as f64, b as f64 - 0.3))).unwrap();
    let indicator = FrameSample::new(e.clone(), vec![2.5, 0.0]).unwrap();
    let h = pc.holomorphic_sectional(&linalg::column(&e, 0)).unwrap();
    assert!((pc.real_bisectional(&indicator).unwrap() - h).abs() < 1e-10);
    let a = FrameSample::new(e.clone(), vec![0.3, 0.8]).unwrap();
    let b = FrameSample::new(e, vec![3.0, 8.0]).unwrap();
    assert!((pc.real_bisectional(&a).unwrap() - pc.real_bisectional(&b).unwrap()).abs() < 1e-12);
}

#[test]
fn non_unitary_frame_rejected() {
    let pc = point_curvature(&flat(2), &ChartPoint::origin(2), &cfg()).unwrap();
    let s = FrameSample::new(identity(2).scale(2.0), vec![1.0, 1.0]).unwrap();
    assert!(pc.real_bisectional(&s).is_err());
    assert!(FrameSample::new(identity(2), vec![0.0, 0.0]).is_err());
    assert!(FrameSample::new(identity(2), vec![-1.0, 1.0]).is_err());
}

#[test]
fn singular_metric_reported() {
    let g = MetricField::constant(real_matrix(2, 2, &[1.0, 1.0, 1.0, 1.0]), "degenerate");
    assert!(matches!(
        chern_curvature(&g, &ChartPoint::origin(2), &cfg()),
        Err(Error::SingularMetric { .. })
    ));
}

#[test]
fn pullback_linear_normalizes() {
    let g = fubini_study(2);
    let base = [c(0.3, 0.2), c(-0.4, 0.1)];
    let gp = g.at(&base).unwrap();
    let p = linalg::normalizing_basis(&gp).unwrap();
    let pulled = g.pullback_linear(&base, &p);
    assert!(max_abs(&(pulled.eval(&[c(0.0, 0.0), c(0.0, 0.0)]) - identity(2))) < 1e-12);
}

mod probes {
    use super::*;

    fn settings(ell: usize) -> ProbeSettings {
        ProbeSettings {
            ell,
            n_samples: 4,
            seed: 7,
            refine_steps: 20,
        }
    }

    #[test]
    fn flat_probe_is_zero() {
        let pts = [ChartPoint::origin(2), pt(&[(0.5, 0.0), (0.0, 1.0)])];
        for kind in [
            ProbeKind::HolomorphicSectional,
            ProbeKind::RealBisectional,
            ProbeKind::RicciFirst,
            ProbeKind::RicciSecond,
            ProbeKind::ScalarL,
        ] {
            let r = curvature_sign_probe(&flat(2), &pts, kind, &settings(2), &cfg()).unwrap();
            assert!(r.min.abs() < 1e-12 && r.max.abs() < 1e-12);
        }
    }

    #[test]
    fn constant_curvature_disks() {
        let pts = [ChartPoint::origin(1), pt(&[(0.3, 0.2)])];
        let r = curvature_sign_probe(&poincare(), &pts, ProbeKind::HolomorphicSectional, &settings(1), &cfg()).unwrap();
        assert!((r.min + 2.0).abs() < 1e-7 && (r.max + 2.0).abs() < 1e-7);
        let r = curvature_sign_probe(&fubini_study(1), &pts, ProbeKind::HolomorphicSectional, &settings(1), &cfg())
            .unwrap();
        assert!((r.min - 2.0).abs() < 1e-7 && (r.max - 2.0).abs() < 1e-7);
    }

    #[test]
    fn fubini_study_sectional_range() {
        // H ≡ 2 at the origin of FS_2; with R_{iījj̄} = 1 + δ_ij real bisectional
        // ranges over [2, 3] (one weight, equal weights)
        let pts = [ChartPoint::origin(2)];
        let r = curvature_sign_probe(&fubini_study(2), &pts, ProbeKind::HolomorphicSectional, &settings(1), &cfg())
            .unwrap();
        assert!((r.min - 2.0).abs() < 1e-7 && (r.max - 2.0).abs() < 1e-7);
        let r = curvature_sign_probe(&fubini_study(2), &pts, ProbeKind::RealBisectional, &settings(1), &cfg()).unwrap();
        assert!(r.min >= 2.0 - 1e-7 && r.max <= 3.0 + 1e-7, "{} {}", r.min, r.max);
        assert!(r.min < 2.01 && r.max > 2.99, "{} {}", r.min, r.max);
    }

    #[test]
    fn hopf_sectional_range() {
        // H(X) = |X₂|²/|X|² at (1, 0)
        let pts = [pt(&[(1.0, 0.0), (0.0, 0.0)])];
        let r = curvature_sign_probe(&hopf(2), &pts, ProbeKind::HolomorphicSectional, &settings(1), &cfg()).unwrap();
        assert!(r.min >= -1e-9 && r.min < 1e-3, "{}", r.min);
        assert!(r.max <= 1.0 + 1e-7 && r.max > 1.0 - 1e-3, "{}", r.max);
        let w = &r.max_witness;
        let x = linalg::column(&w.frame, 0);
        let pc = point_curvature(&hopf(2), &pts[0], &cfg()).unwrap();
        assert!((pc.holomorphic_sectional(&x).unwrap() - w.value).abs() < 1e-12);
    }

    #[test]
    fn ricci_witness_reproduces_value() {
        let pts = [pt(&[(0.8, 0.1), (0.3, -0.2), (-0.1, 0.4)])];
        let r = curvature_sign_probe(&hopf(3), &pts, ProbeKind::RicciFirst, &settings(2), &cfg()).unwrap();
        let pc = point_curvature(&hopf(3), &pts[0], &cfg()).unwrap();
        for w in [&r.min_witness, &r.max_witness] {
            let sigma = w.frame.columns(0, 2).into_owned();
            let v = w.vector.clone().unwrap();
            assert!((pc.ricci_l_first(&sigma, &v).unwrap() - w.value).abs() < 1e-9);
        }
        assert!(r.min <= r.max);
    }

    #[test]
    fn deterministic_and_refinement_helps() {
        let pts = [pt(&[(0.8, 0.1), (0.3, -0.2)])];
        let mut s = settings(1);
        let a = curvature_sign_probe(&hopf(2), &pts, ProbeKind::RealBisectional, &s, &cfg()).unwrap();
        let b = curvature_sign_probe(&hopf(2), &pts, ProbeKind::RealBisectional, &s, &cfg()).unwrap();
        assert_eq!(a, b);
        s.refine_steps = 0;
        let raw = curvature_sign_probe(&hopf(2), &pts, ProbeKind::RealBisectional, &s, &cfg()).unwrap();
        assert!(a.min <= raw.min && a.max >= raw.max);
    }

    #[test]
    fn ell_out_of_range_rejected() {
        let pts = [ChartPoint::origin(2)];
        for ell in [0, 3] {
            assert!(matches!(
                curvature_sign_probe(&flat(2), &pts, ProbeKind::ScalarL, &settings(ell), &cfg()),
                Err(Error::InvalidArgument(_))
            ));
        }
    }
}
