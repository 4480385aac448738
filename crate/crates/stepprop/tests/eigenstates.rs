use stepprop::eigenstates::*;
use stepprop::specfun::C64;
use stepprop::StepModel;

fn ws() -> StepModel {
    StepModel::woods_saxon(1.0, 1.0, 1.0, 1.0)
}

// −ℏ²/2m φ'' + V φ − E φ, with a 6th-order central difference for φ''
fn residual(model: &StepModel, branch: Branch, k: f64, x: f64) -> (f64, f64) {
    let h = 2e-3;
    let f = |y: f64| eigenstate_ws(model, branch, k, y).unwrap();
    let d2 = (f(x - 3.0 * h) * 2.0 - f(x - 2.0 * h) * 27.0 + f(x - h) * 270.0 - f(x) * 490.0 + f(x + h) * 270.0
        - f(x + 2.0 * h) * 27.0
        + f(x + 3.0 * h) * 2.0)
        / (180.0 * h * h);
    let e = k * k / (2.0 * model.m);
    let r = d2 * (-model.hbar * model.hbar / (2.0 * model.m)) + f(x) * (model.v(x) - e);
    (r.norm(), f(x).norm().max(d2.norm() * model.hbar * model.hbar / model.m))
}

#[test]
fn eigenstates_solve_the_schroedinger_equation() {
    let cases = [(Branch::C, 0.7), (Branch::Plus, 2.0), (Branch::Minus, 2.0), (Branch::Plus, 1.42), (Branch::Minus, 5.0)];
    for (branch, k) in cases {
        for &x in &[-6.0, -1.3, -0.2, 0.0, 0.4, 1.7, 5.0] {
            let (r, scale) = residual(&ws(), branch, k, x);
            assert!(r < 1e-7 * scale.max(1e-3), "{branch:?} k={k} x={x}: residual {r:e}");
        }
    }
}

#[test]
fn eigenstates_solve_the_schroedinger_equation_sharp_and_soft() {
    for (alpha, hbar) in [(5.0, 1.0), (0.5, 1.0), (1.0, 0.2)] {
        let m = StepModel::woods_saxon(1.0, 1.0, alpha, hbar);
        for (branch, k) in [(Branch::C, 0.9), (Branch::Plus, 1.8), (Branch::Minus, 1.8)] {
            for &x in &[-1.0, -0.1, 0.3, 1.0] {
                let (r, scale) = residual(&m, branch, k, x);
                assert!(r < 1e-6 * scale.max(1e-3), "α={alpha} ℏ={hbar} {branch:?} x={x}: {r:e}");
            }
        }
    }
}

#[test]
fn closed_form_matches_asymptotics_far_from_the_step() {
    let m = ws();
    for (branch, k) in [(Branch::C, 0.8), (Branch::Plus, 2.0), (Branch::Minus, 1.6)] {
        for (x, side) in [(-20.0, Side::Left), (20.0, Side::Right)] {
            let exact = eigenstate_ws(&m, branch, k, x).unwrap();
            let asym = eigenstate_ws_asymptotic(&m, branch, k, x, side).unwrap();
            assert!((exact - asym).norm() < 1e-9 * asym.norm().max(1.0), "{branch:?} {x}: {exact} vs {asym}");
        }
        // beyond the switch-over the asymptotic form is returned
        let far = eigenstate_ws(&m, branch, k, -35.0).unwrap();
        let asym = eigenstate_ws_asymptotic(&m, branch, k, -35.0, Side::Left).unwrap();
        assert!((far - asym).norm() < 1e-12 * asym.norm().max(1.0));
    }
}

#[test]
fn continuity_across_the_asymptotic_switch() {
    let m = ws();
    let x = -X_ASYM;
    for (branch, k) in [(Branch::C, 0.8), (Branch::Plus, 2.0)] {
        let a = eigenstate_ws(&m, branch, k, x + 1e-9).unwrap();
        let b = eigenstate_ws(&m, branch, k, x - 1e-9).unwrap();
        assert!((a - b).norm() < 1e-8 * a.norm().max(1.0));
    }
}

#[test]
fn rates_are_unitary_and_agree_with_amplitudes() {
    for (alpha, hbar) in [(1.0, 1.0), (0.3, 1.0), (10.0, 1.0), (1.0, 0.05), (100.0, 1.0)] {
        let m = StepModel::woods_saxon(1.0, 1.0, alpha, hbar);
        for &k in &[1.4143, 1.5, 2.0, 3.0, 8.0] {
            let (r2, t2) = rates(&m, k).unwrap();
            assert!((r2 + t2 - 1.0).abs() < 1e-13, "α={alpha} k={k}");
            let amp = scatter_amplitudes(&m, k).unwrap();
            assert!((amp.r.norm_sqr() - r2).abs() < 1e-11 * r2.max(1e-300) + 1e-300, "|R|² α={alpha} k={k}");
            assert!((amp.t.norm_sqr() - t2).abs() < 1e-11, "|T|² α={alpha} k={k}");
        }
    }
}

#[test]
fn sharp_limit_approaches_heaviside() {
    let h = StepModel::heaviside(1.0, 1.0, 1.0);
    let (rh, _) = rates(&h, 1.5).unwrap();
    let mut last = f64::INFINITY;
    for alpha in [10.0, 100.0, 1000.0, 10000.0] {
        let (r, _) = rates(&StepModel::woods_saxon(1.0, 1.0, alpha, 1.0), 1.5).unwrap();
        let d = (r - rh).abs();
        assert!(d < last);
        last = d;
    }
    assert!(last < 1e-8);
}

#[test]
fn small_hbar_rate_follows_its_asymptote() {
    let k = 2.0;
    for hbar in [0.05, 0.02] {
        let m = StepModel::woods_saxon(1.0, 1.0, 1.0, hbar);
        let (r2, _) = rates(&m, k).unwrap();
        let (asym, s_i) = reflection_rate_smallhbar_asymptote(&m, k).unwrap();
        assert!(((r2 / asym).ln()).abs() < 1e-10 + 4.0 * (-2.0 * std::f64::consts::PI * k / hbar).exp().sqrt());
        assert!(s_i.re == 0.0 && s_i.im > 0.0);
    }
}

#[test]
fn free_model_does_not_reflect() {
    let m = StepModel::woods_saxon(1.0, 0.0, 1.0, 1.0);
    let (r2, t2) = rates(&m, 0.8).unwrap();
    assert_eq!(r2, 0.0);
    assert!((t2 - 1.0).abs() < 1e-15);
}

#[test]
fn below_threshold_rates_are_rejected() {
    assert!(rates(&ws(), 1.0).is_err());
    assert!(scatter_amplitudes(&ws(), 0.5).is_err());
}

#[test]
fn normalization_sums_match_display_forms() {
    for (alpha, k) in [(1.0, 1.6), (1.0, 2.5), (2.0, 1.8), (0.5, 3.0)] {
        let m = StepModel::woods_saxon(1.0, 1.0, alpha, 1.0);
        let n = normalization_coeffs(&m, k).unwrap();
        let npp = npp_display(&m, k).unwrap();
        let npm = npm_display(&m, k).unwrap();
        assert!((n.npp.unwrap() - npp).abs() < 1e-10 * npp, "Npp α={alpha} k={k}");
        assert!((n.npm.unwrap() - npm).norm() < 1e-10 * npp, "Npm α={alpha} k={k}");
        assert!((n.sum_plus.unwrap() - (npp + npm.norm())).abs() < 1e-10 * npp);
        assert!((n.sum_minus.unwrap() - (npp - npm.norm())).abs() < 1e-9 * npp);
    }
}

#[test]
fn heaviside_orthonormal_states_are_continuous_at_the_step() {
    let h = StepModel::heaviside(1.0, 1.0, 1.0);
    for (branch, k) in [(Branch::C, 0.9), (Branch::Plus, 2.0), (Branch::Minus, 2.0)] {
        let a = orthonormal_state(&h, branch, k, -1e-12).unwrap();
        let b = orthonormal_state(&h, branch, k, 1e-12).unwrap();
        assert!((a - b).norm() < 1e-10, "{branch:?}");
    }
}

// ∫ φ_k(x) φ_k'(x)* dx → δ(k − k'): the delta weight is read from the
// large-L behaviour of the left plane waves
#[test]
fn orthonormal_states_carry_unit_flux_weight() {
    let m = ws();
    for (branch, k) in [(Branch::C, 0.9), (Branch::Plus, 2.0), (Branch::Minus, 2.0)] {
        let ms = MomentumSpec::new(&m, k);
        // left asymptote a e^{ikx} + b e^{−ikx}, right asymptote c e^{ipx}+d e^{−ipx}
        let fit = |x1: f64, kk: f64| {
            let f1 = orthonormal_state(&m, branch, k, x1).unwrap();
            let f2 = orthonormal_state(&m, branch, k, x1 + 0.37).unwrap();
            let e1p = C64::new(0.0, kk * x1).exp();
            let e2p = C64::new(0.0, kk * (x1 + 0.37)).exp();
            let det = e1p / e2p - e2p / e1p;
            let a = (f1 / e2p - f2 / e1p) / det;
            let b = (f2 * e1p - f1 * e2p) / det;
            (a, b)
        };
        let (a, b) = fit(-40.0, k);
        let mut weight = std::f64::consts::PI * (a.norm_sqr() + b.norm_sqr());
        if branch != Branch::C {
            let (c, d) = fit(40.0, ms.p.re);
            weight += std::f64::consts::PI * (c.norm_sqr() + d.norm_sqr()) * ms.p.re / k;
        }
        assert!((weight * m.hbar - 1.0).abs() < 1e-9, "{branch:?}: {weight}");
    }
}
