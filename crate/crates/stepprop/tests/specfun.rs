use stepprop::specfun::{gamma, hyp2f1, log_gamma, C64};
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn log_gamma_trivial_values() {
    assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
    assert!((log_gamma(c(0.5, 0.0)).unwrap() - c(PI.sqrt().ln(), 0.0)).norm() < 1e-14);
    assert!((log_gamma(c(11.0, 0.0)).unwrap().re - 3628800f64.ln()).abs() < 1e-13);
}

// mpmath loggamma at 40 digits
#[test]
fn log_gamma_matches_high_precision_values() {
    let v = log_gamma(c(3.0, 4.0)).unwrap();
    assert!((v - c(-1.756626784603784110530604181623275785157, 4.742664438034657928194889407550022740888)).norm() < 1e-13);
    let v = log_gamma(c(1.0, 300.0)).unwrap();
    assert!((v - c(-467.4680682679362124979005636823741879298, 1411.919862782377107376162126333471875106)).norm() < 1e-10);
    // reflection region: compare exponentials, branch of Im is free there
    let v = log_gamma(c(-2.5, 0.3)).unwrap().exp();
    let want = c(-0.4320888926132019205150333963667770251012, -9.09334542128974150730952146377721837679).exp();
    assert!(rel(v, want) < 1e-12);
}

#[test]
fn gamma_poles_are_errors() {
    assert!(log_gamma(c(0.0, 0.0)).is_err());
    assert!(log_gamma(c(-3.0, 0.0)).is_err());
    assert!(log_gamma(c(-3.0, 1e-300)).is_ok());
}

#[test]
fn reflection_formula() {
    for &z in &[c(0.3, 0.2), c(-1.7, 0.4), c(2.2, -1.1), c(0.1, 3.0)] {
        let lhs = gamma(z).unwrap() * gamma(c(1.0, 0.0) - z).unwrap();
        let rhs = c(PI, 0.0) / (z * PI).sin();
        assert!(rel(lhs, rhs) < 1e-10, "{z}");
    }
}

#[test]
fn gamma_recurrence_up_to_fifty() {
    for &z in &[c(0.7, 0.0), c(12.3, 20.0), c(-3.3, 7.0), c(30.0, -35.0)] {
        let lhs = gamma(z + 1.0).unwrap();
        let rhs = z * gamma(z).unwrap();
        assert!(rel(lhs, rhs) < 1e-12, "{z}");
    }
}

#[test]
fn hyp2f1_trivial_values() {
    assert_eq!(hyp2f1(c(3.0, 1.0), c(-2.0, 5.0), c(0.5, 0.5), 0.0).unwrap(), c(1.0, 0.0));
    let z: f64 = 0.5;
    let v = hyp2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), z).unwrap();
    assert!((v - c(-(1.0 - z).ln() / z, 0.0)).norm() < 1e-14);
    // degenerate c − a − b = 0 beyond z = 1/2
    let z: f64 = 0.97;
    let v = hyp2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), z).unwrap();
    assert!((v - c(-(1.0 - z).ln() / z, 0.0)).norm() < 1e-11);
}

// mpmath hyp2f1 at 40 digits
#[test]
fn hyp2f1_matches_high_precision_values() {
    let cases: [(C64, C64, C64, f64, C64); 8] = [
        (c(1.0, 0.3), c(0.0, 0.3), c(1.0, 0.6), 0.999, c(1.0350909034666380082, 1.8356376523910552693)),
        (c(1.0, 0.3), c(0.0, 0.3), c(1.0, 0.6), 0.3, c(1.0212065153799345524, 0.093401690052822806757)),
        (c(2.5, 0.0), c(1.5, 0.0), c(4.0, 0.0), 0.7, c(2.7215794739763329124, 0.0)),
        (c(1.0, 2.0), c(0.0, 2.0), c(1.0, -1.0), 0.9, c(0.096681567558824686459, -0.43428788581762673364)),
        (c(1.0, -1.5), c(0.0, -1.5), c(1.0, 3.0), 0.2, c(0.88460391227607864438, 0.099926853163975463498)),
        (c(1.0, 0.01), c(0.0, 0.01), c(1.0, 0.02), 0.95, c(1.0001439700256597175, 0.029952301465227785755)),
        (c(1.0, 5.0), c(0.0, 5.0), c(1.0, 8.0), 0.6, c(-1.1125445723963734353, 0.51758327099716720638)),
        (c(1.7, 0.0), c(0.7, 0.0), c(2.0, -3.0), 0.999999, c(0.94829634000598686814, 0.91939667211765832026)),
    ];
    for (a, b, cc, z, want) in cases {
        let v = hyp2f1(a, b, cc, z).unwrap();
        assert!(rel(v, want) < 1e-10, "({a},{b},{cc},{z}): {v} vs {want}");
    }
}

#[test]
fn gauss_summation_near_one() {
    let (a, b, cc) = (c(0.3, 0.2), c(-0.4, 0.1), c(1.5, -0.3));
    let want = gamma(cc).unwrap() * gamma(cc - a - b).unwrap() / (gamma(cc - a).unwrap() * gamma(cc - b).unwrap());
    let v = hyp2f1(a, b, cc, 1.0 - 1e-8).unwrap();
    assert!(rel(v, want) < 1e-6);
}

#[test]
fn out_of_range_argument_is_rejected() {
    assert!(hyp2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), 1.0).is_err());
    assert!(hyp2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), -0.1).is_err());
    assert!(hyp2f1(c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0), 0.3).is_err());
}
