use stepprop::classical::{BoundarySpec, SaddleKind};
use stepprop::propagator::{free_propagator, propagate, QuadratureConfig};
use stepprop::specfun::C64;
use stepprop::wkb::*;
use stepprop::{Error, StepModel};

fn bvp(x0: f64, x1: f64, t: f64) -> BoundarySpec {
    BoundarySpec::new(x0, x1, t).unwrap()
}

#[test]
fn free_particle_is_exact() {
    let free = StepModel::woods_saxon(1.0, 0.0, 1.0, 0.7);
    for (x0, x1, t) in [(-1.0, 2.0, 3.0), (0.5, 0.5, 1.0), (4.0, -6.0, 0.2)] {
        let w = wkb_at(&free, &bvp(x0, x1, t), SaddleSet::Real).unwrap();
        let g = free_propagator(1.0, 0.7, x0, x1, t);
        assert!((w - g).norm() < 1e-13 * g.norm(), "{w} vs {g}");
    }
}

#[test]
fn complex_contribution_scales_with_the_imaginary_action() {
    let m = StepModel::woods_saxon(1.0, 1.0, 5.0, 1.0);
    let b = bvp(-5.0, -9.25, 10.0);
    let s = collect_saddles(&m, &b, SaddleSet::RealCaustic).unwrap();
    let c = s.iter().find(|s| s.kind == SaddleKind::CausticSaddle).unwrap();
    let pts: Vec<(f64, f64)> = [1.0, 0.5, 0.25]
        .iter()
        .map(|&h| {
            let a = wkb_term(c, h).unwrap().amplitude.norm();
            // remove the √(1/ℏ) prefactor
            (1.0 / h, (a * h.sqrt()).ln())
        })
        .collect();
    let slope = (pts[2].1 - pts[0].1) / (pts[2].0 - pts[0].0);
    assert!((slope + c.s.im).abs() < 1e-12);
    let mid = pts[0].1 + slope * (pts[1].0 - pts[0].0);
    assert!((mid - pts[1].1).abs() < 1e-12);
}

#[test]
fn saddle_sets_grow_outside_the_caustic() {
    let m = StepModel::woods_saxon(1.0, 1.0, 5.0, 1.0);
    let b = bvp(-5.0, -9.25, 10.0);
    let n = |set| collect_saddles(&m, &b, set).unwrap().len();
    assert_eq!((n(SaddleSet::Real), n(SaddleSet::RealCaustic), n(SaddleSet::RealCausticTopological)), (1, 2, 3));
    let inside = bvp(-3.0, -4.0, 10.0);
    assert_eq!(collect_saddles(&m, &inside, SaddleSet::RealCausticTopological).unwrap().len(), 3);
}

#[test]
fn saddle_set_names_round_trip() {
    for set in [SaddleSet::Real, SaddleSet::RealCaustic, SaddleSet::RealCausticTopological] {
        assert_eq!(set.name().parse::<SaddleSet>().unwrap(), set);
    }
    assert!("caustic".parse::<SaddleSet>().is_err());
}

#[test]
fn caustic_proximity_is_an_error() {
    let m = StepModel::woods_saxon(1.0, 1.0, 5.0, 1.0);
    let mut s = collect_saddles(&m, &bvp(-5.0, -9.25, 10.0), SaddleSet::Real).unwrap()[0];
    s.vv = C64::new(2e6, 0.0);
    assert!(matches!(wkb_term(&s, 1.0), Err(Error::CausticProximity(_))));
}

#[test]
fn non_positive_hbar_is_rejected() {
    let m = StepModel::woods_saxon(1.0, 1.0, 5.0, 1.0);
    let s = collect_saddles(&m, &bvp(-5.0, -9.25, 10.0), SaddleSet::Real).unwrap()[0];
    assert!(wkb_term(&s, 0.0).is_err());
}

// the caustic term accounts for G − WKB_real with an O(ℏ) relative error
#[test]
fn caustic_term_converges_as_hbar_shrinks() {
    let mut last = f64::INFINITY;
    for hbar in [0.5, 0.25, 0.125] {
        let m = StepModel::woods_saxon(1.0, 1.0, 5.0, hbar);
        let b = bvp(-5.0, -9.25, 10.0);
        let g = propagate(&m, b.x0, b.x1, b.t, &QuadratureConfig::default()).unwrap().g;
        let s = collect_saddles(&m, &b, SaddleSet::RealCaustic).unwrap();
        let real = wkb_term(&s[0], hbar).unwrap().amplitude;
        let caustic = wkb_term(&s[1], hbar).unwrap().amplitude;
        let miss = ((g - real) / caustic - 1.0).norm();
        assert!(miss < 0.75 * last, "ℏ = {hbar}: {miss}");
        last = miss;
    }
    assert!(last < 0.3);
}

#[test]
fn heaviside_wkb_far_left_of_the_triangle() {
    // the reflected saddle carries the sharp-step reflection, which is not
    // semiclassical, so only the free part is compared
    let h = StepModel::heaviside(1.0, 1.0, 1.0);
    let b = bvp(-5.0, 3.0, 10.0);
    let s = collect_saddles(&h, &b, SaddleSet::RealCaustic).unwrap();
    assert!(s.iter().all(|s| !s.relevant || s.kind == SaddleKind::Direct));
}
