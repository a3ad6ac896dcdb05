use chernlab_core::bochner::{verify_eq1, verify_eq2};
use chernlab_core::geometry::{chern_ricci_first, chern_ricci_logdet, point_curvature, FrameSample};
use chernlab_core::linalg::{c, g_orthonormalize, identity, max_abs};
use chernlab_core::registry::{build_map, build_metric, Params};
use chernlab_core::weierstrass::Lattice;
use chernlab_core::{CMatrix, ChartPoint, FdConfig, HolomorphicMapField, MetricField, C64};
use proptest::prelude::*;

fn metric(id: &str, json: &str) -> MetricField {
    build_metric(id, &serde_json::from_str::<Params>(json).unwrap()).unwrap()
}

fn arb_c(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| c(a, b))
}

fn arb_point(m: usize, r: f64) -> impl Strategy<Value = ChartPoint> {
    prop::collection::vec(arb_c(r), m).prop_map(|v| ChartPoint::new(v).unwrap())
}

fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(arb_c(1.0), rows * cols).prop_map(move |v| CMatrix::from_vec(rows, cols, v))
}

/// Quadratic map C² → C³ with well-conditioned linear part.
fn arb_quadratic() -> impl Strategy<Value = HolomorphicMapField> {
    (arb_matrix(3, 2), prop::collection::vec(arb_matrix(2, 2), 3)).prop_map(|(lin, quad)| {
        let mut lin = lin;
        lin[(0, 0)] += c(1.5, 0.0);
        lin[(1, 1)] += c(1.5, 0.0);
        let quad: Vec<serde_json::Value> = quad
            .iter()
            .map(|q| {
                let sym = (q + q.transpose()).scale(0.25);
                matrix_json(&sym)
            })
            .collect();
        let params = serde_json::json!({"linear": matrix_json(&lin), "quad": quad});
        build_map("quadratic", &serde_json::from_value(params).unwrap()).unwrap()
    })
}

fn matrix_json(m: &CMatrix) -> serde_json::Value {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| serde_json::json!([m[(i, j)].re, m[(i, j)].im])).collect())
        .collect::<Vec<Vec<_>>>()
        .into()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bochner_identities_hold_for_random_quadratic_maps(f in arb_quadratic(), p in arb_point(2, 0.3)) {
        let g = metric("fubini_study_m", r#"{"m": 2}"#);
        let h = metric("fubini_study_m", r#"{"m": 3}"#);
        let cfg = FdConfig::default();
        for ell in 1..=2 {
            let r = verify_eq1(&g, &h, &f, &p, ell, &cfg).unwrap();
            prop_assert!(r.residual <= 1e-5, "eq1 ℓ={} residual {:e}", ell, r.residual);
            prop_assert!(r.gram_min_eigenvalue >= -1e-7);
            let r = verify_eq2(&g, &h, &f, &p, ell, &cfg).unwrap();
            prop_assert!(r.residual <= 1e-5, "eq2 ℓ={} residual {:e}", ell, r.residual);
            prop_assert!(r.gram_min_eigenvalue >= -1e-7);
        }
    }

    #[test]
    fn ricci_routes_agree_on_hopf(p in arb_point(3, 1.0)) {
        let g = metric("hopf_m", r#"{"m": 3}"#);
        prop_assume!(p.coords().iter().map(|z| z.norm_sqr()).sum::<f64>() > 0.1);
        let cfg = FdConfig::default();
        let a = chern_ricci_first(&g, &p, &cfg).unwrap();
        let b = chern_ricci_logdet(&g, &p, &cfg).unwrap();
        prop_assert!(max_abs(&(a - b)) < 1e-6);
    }

    #[test]
    fn curvature_is_frame_independent(p in arb_point(2, 0.45), basis in arb_matrix(2, 2), w in prop::collection::vec(0.05..1.0f64, 2)) {
        // permuting frame vectors together with their weights leaves the real
        // bisectional curvature unchanged
        let g = metric("poincare_ball_m", r#"{"m": 2}"#);
        let cfg = FdConfig::default();
        let pc = point_curvature(&g, &p, &cfg).unwrap();
        prop_assume!(basis.determinant().norm() > 0.05);
        let e = g_orthonormalize(&pc.g, &basis).unwrap();
        let mut swapped = e.clone();
        swapped.swap_columns(0, 1);
        let a = pc.real_bisectional(&FrameSample::new(e, w.clone()).unwrap()).unwrap();
        let b = pc.real_bisectional(&FrameSample::new(swapped, vec![w[1], w[0]]).unwrap()).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
        // the ball has constant holomorphic sectional curvature −2
        let v: Vec<C64> = basis.column(0).iter().copied().collect();
        let hsec = pc.holomorphic_sectional(&v).unwrap();
        prop_assert!((hsec + 2.0).abs() < 1e-6, "{}", hsec);
    }

    #[test]
    fn weierstrass_is_doubly_periodic(z in arb_c(0.5), k1 in -3i32..3, k2 in -3i32..3, tau_re in -0.5..0.5f64, tau_im in 0.6..1.6f64) {
        let lat = Lattice::new(c(1.0, 0.0), c(tau_re, tau_im)).unwrap();
        let (w1, w2) = lat.generators();
        let z = z + c(0.05, 0.03);
        let a = lat.wp(z);
        let b = lat.wp(z + w1 * f64::from(k1) + w2 * f64::from(k2));
        prop_assert!((a.p - b.p).norm() <= 1e-9 * (1.0 + a.p.norm()));
        prop_assert!((a.dp - b.dp).norm() <= 1e-9 * (1.0 + a.dp.norm()));
    }
}

#[test]
fn identity_scene_is_trivially_exact() {
    let g = MetricField::constant(identity(2), "flat");
    let f = HolomorphicMapField::linear(identity(2), "id");
    let r = verify_eq1(&g, &g, &f, &ChartPoint::origin(2), 2, &FdConfig::default()).unwrap();
    assert_eq!(r.residual, 0.0);
}
