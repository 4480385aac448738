use stepprop::classical::*;
use stepprop::specfun::C64;
use stepprop::{Error, StepModel};

fn ws(alpha: f64) -> StepModel {
    StepModel::woods_saxon(1.0, 1.0, alpha, 1.0)
}

fn bvp(x0: f64, x1: f64, t: f64) -> BoundarySpec {
    BoundarySpec::new(x0, x1, t).unwrap()
}

#[test]
fn turning_point_closed_form() {
    let x = turning_point(&ws(1.0), C64::new(0.75, 0.0)).unwrap();
    assert!((x - C64::new(0.5f64.atanh(), 0.0)).norm() < 1e-15);
    let m = ws(1.0);
    let e = C64::new(0.6, 0.2);
    let xt = turning_point(&m, e).unwrap();
    assert!((stepprop::potential::potential_value(&m, xt).unwrap() - e).norm() < 1e-12);
}

#[test]
fn time_and_action_derivatives_follow_the_momentum() {
    let m = ws(1.0);
    let e = C64::new(0.6, 0.0);
    let h = 1e-5;
    for x in [-3.0, -1.0, -0.5] {
        let p = (2.0 * m.m * (e.re - m.v(x))).sqrt();
        let dt = (time_of_flight(&m, e, C64::new(x + h, 0.0)).unwrap() - time_of_flight(&m, e, C64::new(x - h, 0.0)).unwrap()) / (2.0 * h);
        let ds = (reduced_action(&m, e, C64::new(x + h, 0.0)).unwrap() - reduced_action(&m, e, C64::new(x - h, 0.0)).unwrap()) / (2.0 * h);
        assert!((dt.re - m.m / p).abs() < 1e-7, "dt/dx at {x}");
        assert!((ds.re - p).abs() < 1e-7, "ds/dx at {x}");
    }
}

#[test]
fn far_left_flight_time_is_free() {
    let m = ws(1.0);
    let e = C64::new(0.5, 0.0);
    let t0 = time_of_flight(&m, e, C64::new(-40.0, 0.0)).unwrap();
    let t1 = time_of_flight(&m, e, C64::new(-35.0, 0.0)).unwrap();
    assert!(((t1 - t0).re - 5.0).abs() < 1e-10);
}

#[test]
fn alpha5_reference_configuration_saddles() {
    let m = ws(5.0);
    let b = bvp(-5.0, -9.25, 10.0);
    let reals = solve_real_paths(&m, &b).unwrap();
    assert_eq!(reals.len(), 1);
    assert_eq!(reals[0].kind, SaddleKind::Direct);
    assert!((reals[0].s.re - 0.903125).abs() < 1e-10);
    assert!((reals[0].vv.re + 0.1).abs() < 1e-10);

    let c = find_caustic_saddle(&m, &b).unwrap();
    assert!((c.e - C64::new(1.08752866693852, 0.19060641176737522)).norm() < 1e-9);
    assert!((c.s - C64::new(10.384461303637603, 0.25623106688857971)).norm() < 1e-9);
    assert!(c.relevant);

    assert!(matches!(topological_saddle(&m, &b), Err(Error::NoSolution(_))));
    let top = topological_saddle_or_threshold(&m, &b).unwrap();
    assert!((top.s.re - 10.544646521204).abs() < 1e-8);
    assert_eq!(top.s.im, 0.0);
}

#[test]
fn caustic_saddle_is_a_stationary_point_of_the_bounce_relation() {
    let m = ws(5.0);
    let b = bvp(-5.0, -9.25, 10.0);
    let c = find_caustic_saddle(&m, &b).unwrap();
    let (t, s) = bounce_relation(&m, &b, c.e).unwrap();
    assert!((t - C64::new(10.0, 0.0)).norm() < 1e-10);
    assert!((s - c.s).norm() < 1e-10);
    let again = caustic_saddle(&m, &b, c.e + C64::new(1e-3, -1e-3)).unwrap();
    assert!((again.e - c.e).norm() < 1e-10);
}

#[test]
fn three_real_paths_inside_the_caustic() {
    let m = ws(5.0);
    let b = bvp(-3.0, -4.0, 10.0);
    let reals = solve_real_paths(&m, &b).unwrap();
    let kinds: Vec<_> = reals.iter().map(|s| s.kind).collect();
    assert_eq!(kinds, vec![SaddleKind::Direct, SaddleKind::LowBounce, SaddleKind::HighBounce]);
    assert!(matches!(find_caustic_saddle(&m, &b), Err(Error::InsideCaustic)));
    for s in &reals {
        let (t, ss) = if s.reflected { bounce_relation(&m, &b, s.e).unwrap() } else { direct_relation(&m, &b, s.e).unwrap() };
        assert!((t.re - 10.0).abs() < 1e-9 && (ss - s.s).norm() < 1e-9);
    }
}

#[test]
fn heaviside_closed_forms() {
    let m = StepModel::heaviside(1.0, 1.0, 1.0);
    let p = heaviside_paths(&m, &bvp(-3.0, -4.0, 10.0)).unwrap();
    assert_eq!(p.len(), 3);
    assert!((p[0].s.re - 0.05).abs() < 1e-15);
    assert!((p[1].s.re - 2.45).abs() < 1e-14);
    assert!((p[2].s.re - (2f64.sqrt() * 7.0 - 10.0)).abs() < 1e-14);
    let outside = heaviside_paths(&m, &bvp(-5.0, -9.25, 10.0)).unwrap();
    assert_eq!(outside.len(), 1);
    let right = heaviside_paths(&m, &bvp(5.0, 4.0, 10.0)).unwrap();
    assert!((right[0].s.re - (0.05 - 10.0)).abs() < 1e-14);
    // crossing: T(E) = |x0|√(m/2E) + |x1|√(m/2(E−V0))
    let cross = heaviside_paths(&m, &bvp(-2.0, 3.0, 4.0)).unwrap();
    assert_eq!(cross.len(), 1);
    let e = cross[0].e.re;
    assert!((2.0 / (2.0 * e).sqrt() + 3.0 / (2.0 * (e - 1.0)).sqrt() - 4.0).abs() < 1e-10);
}

#[test]
fn sharp_woods_saxon_paths_approach_heaviside() {
    let hs = heaviside_paths(&StepModel::heaviside(1.0, 1.0, 1.0), &bvp(-3.0, -4.0, 10.0)).unwrap();
    let w = solve_real_paths(&ws(200.0), &bvp(-3.0, -4.0, 10.0)).unwrap();
    assert_eq!(w.len(), 3);
    for (a, b) in w.iter().zip(&hs) {
        assert!((a.s.re - b.s.re).abs() < 0.05, "{:?}: {} vs {}", a.kind, a.s, b.s);
    }
}

#[test]
fn hamilton_jacobi_relations() {
    let m = ws(1.0);
    let (x0, x1, t) = (-3.0, 2.0, 5.0);
    let s_at = |x0: f64, x1: f64, t: f64| {
        let r = solve_real_paths(&m, &bvp(x0, x1, t)).unwrap();
        assert_eq!(r.len(), 1);
        r[0]
    };
    let base = s_at(x0, x1, t);
    let h = 1e-4;
    let ds_dt = (s_at(x0, x1, t + h).s.re - s_at(x0, x1, t - h).s.re) / (2.0 * h);
    assert!((ds_dt + base.e.re).abs() < 1e-7);
    let ds_dx1 = (s_at(x0, x1 + h, t).s.re - s_at(x0, x1 - h, t).s.re) / (2.0 * h);
    assert!((ds_dx1 - (2.0 * (base.e.re - m.v(x1))).sqrt()).abs() < 1e-7);
    let ds_dx0 = (s_at(x0 + h, x1, t).s.re - s_at(x0 - h, x1, t).s.re) / (2.0 * h);
    assert!((ds_dx0 + (2.0 * (base.e.re - m.v(x0))).sqrt()).abs() < 1e-7);
    let mixed = (s_at(x0 + h, x1 + h, t).s.re - s_at(x0 + h, x1 - h, t).s.re - s_at(x0 - h, x1 + h, t).s.re
        + s_at(x0 - h, x1 - h, t).s.re)
        / (4.0 * h * h);
    let vv = van_vleck(&m, &base, &bvp(x0, x1, t)).unwrap();
    assert!((vv.re - mixed).abs() < 1e-5 * mixed.abs(), "{vv} vs {mixed}");
}

#[test]
fn abbreviated_action_derivative_is_the_time() {
    let m = ws(2.0);
    let b = bvp(-3.0, -4.0, 10.0);
    for route in [bounce_relation, direct_relation] {
        let e = C64::new(0.7, 0.05);
        let h = 1e-6;
        let w = |e: C64| {
            let s = route(&m, &b, e).unwrap().1;
            s + e * b.t
        };
        let dw = (w(e + h) - w(e - h)) / (2.0 * h);
        assert!((dw - route(&m, &b, e).unwrap().0).norm() < 1e-6);
    }
}

#[test]
fn relations_are_conjugate_symmetric() {
    let m = ws(5.0);
    let b = bvp(-5.0, -9.25, 10.0);
    let e = C64::new(1.08, 0.19);
    let (t, s) = bounce_relation(&m, &b, e).unwrap();
    let (tc, sc) = bounce_relation(&m, &b, e.conj()).unwrap();
    assert!((t.conj() - tc).norm() < 1e-12 && (s.conj() - sc).norm() < 1e-12);
}

#[test]
fn free_van_vleck() {
    let free = StepModel::woods_saxon(1.0, 0.0, 1.0, 1.0);
    let b = bvp(-1.0, 2.0, 3.0);
    let s = solve_real_paths(&free, &b).unwrap();
    assert!((s[0].vv.re + 1.0 / 3.0).abs() < 1e-14);
    assert!((s[0].s.re - 1.5).abs() < 1e-14);
}

#[test]
fn van_vleck_grows_near_the_fold() {
    let m = ws(5.0);
    let far = solve_real_paths(&m, &bvp(-3.0, -4.0, 10.0)).unwrap()[1].vv.norm();
    // approach the outer edge of the three-path region along x1
    let mut last = None;
    for x1 in [-4.0, -5.0, -5.5] {
        let r = solve_real_paths(&m, &bvp(-3.0, x1, 10.0)).unwrap();
        if r.len() == 3 {
            last = Some(r[1].vv.norm());
        }
    }
    assert!(last.unwrap() > far);
}

#[test]
fn real_paths_shoot_to_the_endpoint() {
    let m = ws(5.0);
    let b = bvp(-3.0, -4.0, 10.0);
    for s in solve_real_paths(&m, &b).unwrap() {
        let speed = (2.0 * (s.e.re - m.v(b.x0)) / m.m).max(0.0).sqrt();
        let v0 = if s.reflected { speed } else { -speed };
        if s.kind == SaddleKind::HighBounce {
            // lingering near the plateau is too sensitive to shoot
            continue;
        }
        let r = stepprop::caustics::integrate_ivp(&m, b.x0, v0, b.t).unwrap();
        assert!((r.x - b.x1).abs() < 1e-6, "{:?}: {}", s.kind, r.x);
    }
}

#[test]
fn matching_point_regression() {
    let a = matching_point(&ws(1.0), 2.0).unwrap();
    assert!((a + 0.2690131100507205).abs() < 1e-10);
}

#[test]
fn invalid_boundary_data_is_rejected() {
    assert!(BoundarySpec::new(0.0, 1.0, 0.0).is_err());
    assert!(BoundarySpec::new(f64::NAN, 1.0, 1.0).is_err());
}
