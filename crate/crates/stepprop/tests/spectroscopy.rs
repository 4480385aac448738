use stepprop::classical::{heaviside_paths, BoundarySpec, ClassicalSaddle, SaddleKind};
use stepprop::propagator::QuadratureConfig;
use stepprop::spectroscopy::*;
use stepprop::specfun::C64;
use stepprop::StepModel;

fn synthetic(window: OmegaWindow, terms: &[(C64, C64)]) -> OmegaSamples {
    OmegaSamples::from_fn(window, |om| terms.iter().map(|&(c, s)| c * (C64::i() * om * s).exp()).sum::<C64>() * om.sqrt()).unwrap()
}

fn fine(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let n = ((hi - lo) / h).round() as usize;
    (0..=n).map(|j| lo + h * j as f64).collect()
}

#[test]
fn window_validation() {
    assert!(OmegaWindow::new(0.0, 12.0, 2048).is_err());
    assert!(OmegaWindow::new(2.0, 1.0, 2048).is_err());
    assert!(OmegaWindow::new(1.0, 12.0, 10).is_err());
    let w = OmegaWindow::default();
    let om = w.omegas();
    assert_eq!((om[0], om[om.len() - 1], om.len()), (1.0, 12.0, 2048));
}

#[test]
fn free_particle_has_one_peak_at_its_action() {
    let free = StepModel::woods_saxon(1.0, 0.0, 1.0, 1.0);
    let b = BoundarySpec::new(-2.0, 3.0, 5.0).unwrap();
    let w = OmegaWindow::new(1.0, 12.0, 512).unwrap();
    let tau = w.grid(-10.0, 10.0);
    let f = fourier_spectrum(&free, &b, w, &tau, &QuadratureConfig::default()).unwrap();
    assert_eq!(f.peaks.len(), 1, "{:?}", f.peaks);
    let action = 25.0 / 10.0;
    assert!((f.peak_actions()[0] - action).abs() < 0.5 * w.tau_step(), "{:?}", f.peaks);
}

#[test]
fn synthetic_calibration_recovers_both_actions() {
    let w = OmegaWindow::default();
    let (s1, s2) = (C64::new(3.0, 0.5), C64::new(8.0, 1.2));
    let samples = synthetic(w, &[(C64::new(0.7, 0.2), s1), (C64::new(-0.3, 0.9), s2)]);
    let tau = w.grid(-20.0, 20.0);
    let f = fourier_transform(&samples, &tau).unwrap();
    assert_eq!(f.peaks.len(), 2);
    let s_grid = fine(0.0, 2.0, 0.01);
    let l = laplace_transform(&samples, &s_grid).unwrap();
    let fit = fit_laplace(&l, w, &f.peak_actions(), &[0.1, 0.1]).unwrap();
    let mut got = fit.actions.clone();
    got.sort_by(|a, b| a.re.total_cmp(&b.re));
    for (g, want) in got.iter().zip([s1, s2]) {
        assert!((g.re - want.re).abs() < w.tau_step());
        assert!((g.im - want.im).abs() < 0.1 * want.im);
    }
}

#[test]
fn single_real_saddle_peak_is_exact_and_its_width_follows_the_window() {
    let mut widths = Vec::new();
    for b in [12.0, 23.0] {
        let w = OmegaWindow::new(1.0, b, 4096).unwrap();
        let samples = synthetic(w, &[(C64::new(1.0, 0.0), C64::new(4.0, 0.0))]);
        let f = fourier_transform(&samples, &fine(-8.0, 0.0, 0.002)).unwrap();
        assert_eq!(f.peaks.len(), 1);
        assert!((f.peaks[0].location + 4.0).abs() < 1e-6);
        widths.push(f.peaks[0].width * (b - 1.0));
    }
    // FWHM·(B − A) is the same constant for both windows
    assert!((widths[0] / widths[1] - 1.0).abs() < 0.2, "{widths:?}");
    assert!((widths[0] - 5.566).abs() < 0.05);
}

#[test]
fn parseval_power_is_grid_independent() {
    let w = OmegaWindow::default();
    let samples = synthetic(w, &[(C64::new(1.0, 0.0), C64::new(4.0, 0.3)), (C64::new(0.5, 0.5), C64::new(-2.0, 0.0))]);
    let power = |h: f64| {
        fourier_transform(&samples, &fine(-200.0, 200.0, h)).unwrap().total_power()
    };
    let (a, b) = (power(0.1), power(0.05));
    assert!((a - b).abs() < 1e-6 * b, "{a} {b}");
}

#[test]
fn laplace_of_a_real_saddle_has_a_decreasing_envelope() {
    let w = OmegaWindow::default();
    let samples = synthetic(w, &[(C64::new(1.0, 0.0), C64::new(4.0, 0.0))]);
    let l = laplace_transform(&samples, &fine(0.0, 3.0, 0.01)).unwrap();
    // bounded by the decreasing envelope 2π(e^{−sA} + e^{−sB})²/|z|²
    let env: Vec<f64> = l.grid.iter().map(|&s| 2.0 * std::f64::consts::PI * ((-s).exp() + (-12.0 * s).exp()).powi(2) / (s * s + 16.0)).collect();
    assert!(env.windows(2).all(|p| p[1] < p[0]));
    assert!(l.values.iter().zip(&env).all(|(v, e)| *v <= e * (1.0 + 1e-9)));
    // closed form of the windowed integral, |(e^{Bz} − e^{Az})/z|² at z = iS − s
    for (&s, &v) in l.grid.iter().zip(&l.values).step_by(50) {
        let z = C64::new(-s, 4.0);
        let want = ((z * 12.0).exp() - z.exp()) / z * (2.0 * std::f64::consts::PI).sqrt();
        assert!((v.sqrt() - want.norm()).abs() < 1e-4 * want.norm());
    }
}

#[test]
fn residue_of_empty_and_exact_models() {
    let w = OmegaWindow::new(1.0, 12.0, 256).unwrap();
    let free = StepModel::woods_saxon(1.0, 0.0, 1.0, 1.0);
    let b = BoundarySpec::new(-2.0, 3.0, 5.0).unwrap();
    let exact = sample_propagator(&free, &b, w, &QuadratureConfig::default()).unwrap();
    let s_grid = fine(0.0, 2.0, 0.02);
    let saddles = heaviside_paths(&free, &b).unwrap();
    let r = residue_from_samples(&exact, &b, &s_grid, &[Vec::new(), saddles]).unwrap();
    let l = laplace_transform(&exact, &s_grid).unwrap();
    let norm = {
        let mut acc = 0.0;
        for i in 1..s_grid.len() {
            acc += 0.5 * (s_grid[i] - s_grid[i - 1]) * (l.values[i - 1] + l.values[i]);
        }
        acc.sqrt()
    };
    assert!((r[0] - norm).abs() < 1e-12 * norm);
    // the WKB sum is exact for the free particle
    assert!(r[1] < 1e-6 * norm + residue_error_bound(&exact, &s_grid).unwrap());
}

fn saddle(kind: SaddleKind, s: f64) -> ClassicalSaddle {
    ClassicalSaddle {
        kind,
        e: C64::new(1.0, 0.0),
        s: C64::new(s, 0.0),
        vv: C64::new(-0.1, 0.0),
        relevant: true,
        reflected: false,
        sqrt_sign: C64::new(1.0, 0.0),
    }
}

#[test]
fn peaks_are_matched_greedily() {
    let w = OmegaWindow::default();
    let samples = synthetic(w, &[(C64::new(1.0, 0.0), C64::new(2.0, 0.0)), (C64::new(1.0, 0.0), C64::new(7.0, 0.0))]);
    let f = fourier_transform(&samples, &w.grid(-15.0, 15.0)).unwrap();
    let saddles = [saddle(SaddleKind::Direct, 2.0), saddle(SaddleKind::CausticSaddle, 7.0), saddle(SaddleKind::TopologicalSaddle, -4.0)];
    let m = match_peaks(&f, &saddles, 0.3);
    assert!(m[0].peak.is_some() && m[1].peak.is_some() && m[0].peak != m[1].peak);
    assert!(m[2].peak.is_none());
    // near-degenerate pair below the resolution shares one peak
    let pair = [saddle(SaddleKind::CausticSaddle, 7.0), saddle(SaddleKind::TopologicalSaddle, 7.15)];
    let m = match_peaks(&f, &pair, 0.3);
    assert_eq!(m[0].peak, m[1].peak);
    assert!(m[0].degenerate && m[1].degenerate);
}

#[test]
fn heaviside_right_of_the_step_shows_two_actions() {
    let h = StepModel::heaviside(1.0, 1.0, 1.0);
    let b = BoundarySpec::new(5.0, 4.0, 10.0).unwrap();
    let w = OmegaWindow::default();
    let f = fourier_spectrum(&h, &b, w, &w.grid(-20.0, 20.0), &QuadratureConfig::default()).unwrap();
    let mut a = f.peak_actions();
    a.sort_by(|x, y| x.total_cmp(y));
    assert_eq!(a.len(), 2, "{a:?}");
    assert!((a[0] + 9.95).abs() < w.tau_step() && (a[1] + 5.95).abs() < w.tau_step(), "{a:?}");
}
