mod common;

use common::{exact_energies, rel};
use exactwkb::bohr_sommerfeld::Parity;
use exactwkb::spectral::{
    cross_validate, dvr_eigenvalues, dvr_eigenvalues_with, exact_levels, exact_spectrum, solve_level_numerov,
    solve_spectrum_dvr, Engine, ParityScope, SpectralConfig,
};
use exactwkb::{Error, PotentialSpecF64};

fn spec(m: f64) -> PotentialSpecF64 {
    PotentialSpecF64::new(m).unwrap()
}

#[test]
fn harmonic_spectrum_on_both_engines() {
    let s = spec(2.0);
    let dvr = exact_spectrum(&s, 20).unwrap();
    let levels: Vec<usize> = (0..=20).collect();
    let shot = exact_levels(&s, Engine::Numerov, &levels, None).unwrap();
    for r in &shot {
        let want = (2 * r.n + 1) as f64;
        assert!((dvr.energy(r.n).unwrap() - want).abs() <= 1e-9, "dvr N={}", r.n);
        assert!((r.energy - want).abs() <= 1e-9, "numerov N={}", r.n);
    }
}

#[test]
fn low_levels_match_reference() {
    let reference = exact_energies();
    for m in [1u32, 4, 6] {
        let got = exact_spectrum(&spec(m as f64), 20).unwrap();
        for n in 0..=20 {
            let want = reference[&(m, n)];
            let e = got.energy(n).unwrap();
            assert!((e - want).abs() <= 1e-9, "m={m} N={n}: {e} vs {want}");
        }
    }
}

#[test]
fn numerov_matches_reference() {
    let reference = exact_energies();
    for m in [1u32, 4, 6] {
        let s = spec(m as f64);
        let cfg = SpectralConfig::auto(Engine::Numerov, &s, 10).unwrap();
        for n in [0, 3, 10] {
            let e = solve_level_numerov(&s, n, cfg).unwrap().energy;
            assert!(rel(e, reference[&(m, n)]) <= 1e-9, "m={m} N={n}");
        }
    }
}

#[test]
fn engines_agree() {
    for m in [1.0, 4.0, 6.0] {
        let worst = cross_validate(&spec(m), 10).unwrap();
        assert!(worst <= 1e-8, "m={m}: {worst:e}");
    }
}

#[test]
fn parity_blocks_interlace() {
    for m in [1.0, 4.0] {
        let s = spec(m);
        let full = exact_spectrum(&s, 11).unwrap();
        for (scope, parity) in [(ParityScope::Even, Parity::Even), (ParityScope::Odd, Parity::Odd)] {
            let cfg = SpectralConfig::auto(Engine::Dvr, &s, 11).unwrap().with_parity(scope);
            let half = solve_spectrum_dvr(&s, cfg, 12).unwrap();
            for (&n, &e) in half.levels.iter().zip(&half.energies) {
                assert_eq!(Parity::of(n), parity);
                assert!((e - full.energy(n).unwrap()).abs() <= 1e-9, "m={m} N={n}");
            }
        }
    }
}

// The sinc DVR evaluates the potential by quadrature, so it is not a
// Galerkin projection and its eigenvalues may cross the exact value. What
// refinement does guarantee is that the error never grows.
#[test]
fn grid_refinement_never_increases_error() {
    let reference = exact_energies();
    let s = spec(4.0);
    let l = 6.0;
    for (parity, first) in [(Parity::Even, 0), (Parity::Odd, 1)] {
        let mut previous: Option<Vec<f64>> = None;
        for n_points in [16, 24, 32] {
            let e = dvr_eigenvalues(&s, parity, l / n_points as f64, n_points, 3).unwrap();
            let err: Vec<f64> = e
                .iter()
                .enumerate()
                .map(|(k, v)| (v - reference[&(4, first + 2 * k)]).abs())
                .collect();
            if let Some(p) = &previous {
                for (a, b) in err.iter().zip(p) {
                    assert!(*a <= b + 1e-11, "{parity:?}: error {a:e} after {b:e}");
                }
            }
            previous = Some(err);
        }
    }
}

#[test]
fn coupling_scales_energies() {
    // E(λ x^4) = λ^{1/3} E(x^4)
    let s = spec(4.0);
    let (l, n_points) = (7.0, 400);
    let h = l / n_points as f64;
    for parity in [Parity::Even, Parity::Odd] {
        let plain = dvr_eigenvalues(&s, parity, h, n_points, 3).unwrap();
        let scaled = dvr_eigenvalues_with(|x: f64| 16.0 * x.powi(4), parity, h, n_points, 3).unwrap();
        for (a, b) in scaled.iter().zip(&plain) {
            assert!(rel(*a, 16f64.cbrt() * b) <= 1e-8, "{a} vs {b}");
        }
    }
}

#[test]
fn very_steep_walls_are_refused() {
    let s = spec(150.0);
    assert!(matches!(exact_spectrum(&s, 3), Err(Error::Domain { .. })));
    assert!(SpectralConfig::auto(Engine::Numerov, &s, 3).is_err());
}

#[test]
fn configuration_checks() {
    let s = spec(4.0);
    let mut cfg = SpectralConfig::auto(Engine::Dvr, &s, 5).unwrap();
    cfg.n_points = 4;
    assert!(matches!(solve_spectrum_dvr(&s, cfg, 3), Err(Error::Precondition(_))));
    let dvr_cfg = SpectralConfig::auto(Engine::Dvr, &s, 5).unwrap();
    assert!(solve_level_numerov(&s, 0, dvr_cfg).is_err());
}
