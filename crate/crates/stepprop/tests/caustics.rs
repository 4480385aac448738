use stepprop::caustics::*;
use stepprop::classical::{solve_real_paths, BoundarySpec};
use stepprop::StepModel;

fn ws(alpha: f64) -> StepModel {
    StepModel::woods_saxon(1.0, 1.0, alpha, 1.0)
}

#[test]
fn ivp_far_from_the_step_is_free_motion() {
    let r = integrate_ivp(&ws(1.0), -40.0, 0.3, 10.0).unwrap();
    assert!((r.x - (-37.0)).abs() < 1e-9);
    assert!((r.j - 10.0).abs() < 1e-9);
}

#[test]
fn ivp_conserves_energy_and_jacobian_matches_differences() {
    let m = ws(5.0);
    let (x0, v0, t) = (-3.0, 1.2, 10.0);
    let r = integrate_ivp(&m, x0, v0, t).unwrap();
    let e0 = 0.5 * v0 * v0 + m.v(x0);
    let e1 = 0.5 * r.v * r.v + m.v(r.x);
    assert!((e0 - e1).abs() < 1e-8);
    let h = 1e-5;
    let fd = (integrate_ivp(&m, x0, v0 + h, t).unwrap().x - integrate_ivp(&m, x0, v0 - h, t).unwrap().x) / (2.0 * h);
    assert!((fd - r.j).abs() < 1e-4 * r.j.abs().max(1.0), "{fd} vs {}", r.j);
}

#[test]
fn heaviside_ivp_is_unsupported() {
    assert!(integrate_ivp(&StepModel::heaviside(1.0, 1.0, 1.0), 0.0, 1.0, 1.0).is_err());
}

#[test]
fn caustic_points_separate_one_and_three_path_regions() {
    let m = ws(5.0);
    let t = 10.0;
    let pts = caustic_curve(&m, t, &[-3.0]).unwrap();
    assert!(!pts.is_empty());
    for p in pts {
        assert!(p.jacobian.abs() < 1e-6);
        let count = |x1: f64| solve_real_paths(&m, &BoundarySpec::new(-3.0, x1, t).unwrap()).unwrap().len();
        let (a, b) = (count(p.x1 - 0.02), count(p.x1 + 0.02));
        assert_ne!(a, b, "at x1 = {}", p.x1);
    }
}

#[test]
fn heaviside_triangle_and_cusps() {
    let h = StepModel::heaviside(1.0, 1.0, 1.0);
    let leg = 2f64.sqrt() * 10.0;
    let grid: Vec<f64> = (0..=20).map(|i| -16.0 + 0.8 * i as f64).collect();
    for p in caustic_curve(&h, 10.0, &grid).unwrap() {
        let on_edge = p.x0.abs() < 1e-12 || p.x1.abs() < 1e-12 || (p.x0 + p.x1 + leg).abs() < 1e-12;
        assert!(on_edge, "{p:?}");
    }
    let c = cusps(&h, 10.0, &grid).unwrap();
    assert_eq!(c, vec![(-leg, 0.0), (0.0, -leg)]);
}

#[test]
fn woods_saxon_cusps_are_mirror_pairs_near_the_triangle_corners() {
    let m = ws(5.0);
    let grid: Vec<f64> = (0..=40).map(|i| -16.0 + 0.4 * i as f64).collect();
    let c = cusps(&m, 10.0, &grid).unwrap();
    assert!(!c.is_empty());
    let leg = 2f64.sqrt() * 10.0;
    // finite steepness pulls the cusp inwards along the leg
    let near_corner = c.iter().any(|&(x0, x1)| x0 > -leg && x0 < -leg / 2.0 && x1.abs() < 1.0);
    assert!(near_corner, "{c:?}");
    for &(a, b) in &c {
        assert!(c.iter().any(|&(x, y)| (x - b).abs() < 1e-9 && (y - a).abs() < 1e-9));
    }
}

#[test]
fn relevance_follows_the_quadrant_rule_in_the_sharp_limit() {
    let h = StepModel::heaviside(1.0, 1.0, 1.0);
    let f = |x0: f64, x1: f64| relevance_flag(&h, &BoundarySpec::new(x0, x1, 10.0).unwrap());
    assert!(f(-5.0, -9.25).unwrap());
    assert!(!f(-5.0, 3.0).unwrap());
    assert!(f(5.0, 4.0).unwrap());
    assert!(f(-3.0, -4.0).is_err());
}

#[test]
fn woods_saxon_relevance_at_the_alpha5_reference_configuration() {
    let m = ws(5.0);
    assert!(relevance_flag(&m, &BoundarySpec::new(-5.0, -9.25, 10.0).unwrap()).unwrap());
    assert!(relevance_flag(&m, &BoundarySpec::new(-3.0, -4.0, 10.0).unwrap()).is_err());
}

#[test]
fn heaviside_stokes_lines_are_the_axes() {
    let h = StepModel::heaviside(1.0, 1.0, 1.0);
    let g: Vec<f64> = (0..=10).map(|i| -20.0 + 2.5 * i as f64).collect();
    let pts = stokes_lines(&h, 10.0, &g, &g).unwrap();
    assert!(!pts.is_empty());
    assert!(pts.iter().all(|&(a, b)| a == 0.0 || b == 0.0));
}

#[test]
fn woods_saxon_stokes_points_are_zeros_of_the_discriminant() {
    let m = ws(5.0);
    let x0s: Vec<f64> = (0..=3).map(|i| -18.0 + 1.0 * i as f64).collect();
    let x1s: Vec<f64> = (0..=8).map(|i| 0.02 * i as f64).collect();
    let pts = stokes_lines(&m, 10.0, &x0s, &x1s).unwrap();
    assert!(!pts.is_empty());
    for &(x0, x1) in &pts {
        let d = stokes_discriminant(&m, &BoundarySpec::new(x0, x1, 10.0).unwrap()).unwrap();
        assert!(d.abs() < 0.02, "({x0}, {x1}): {d}");
    }
}
