use std::f64::consts::TAU;

use num_complex::Complex64;
use orbitsum::exact::{exact_char_poly, exact_traces};
use orbitsum::model::quantize_window;
use orbitsum::roots::{find_roots, match_roots, poly_from_roots, random_self_inversive, reciprocal_closure, RootSet, TARGET_RESIDUAL};
use orbitsum::scenario::fraction_zero_traces;
use orbitsum::specdet::{newton_coeffs, relative_coeff_error, self_inversive_residual, symmetrize_bottom_up, symmetrize_top_down, CharPolynomial, PolyMode};
use orbitsum::RingConfig;
use proptest::prelude::*;

fn root_strategy() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((0.6f64..1.4, 0.0f64..TAU), 1..=50)
        .prop_map(|v| v.into_iter().map(|(r, t)| Complex64::from_polar(r, t)).collect())
}

fn poly_strategy() -> impl Strategy<Value = CharPolynomial> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 2..=40).prop_map(|v| {
        let mut c: Vec<Complex64> = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
        c[0] = Complex64::new(1.0, 0.0);
        CharPolynomial::new(c, PolyMode::Raw)
    })
}

fn max_coeff_gap(a: &CharPolynomial, b: &CharPolynomial) -> f64 {
    a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn case_i_ring() -> impl Strategy<Value = RingConfig> {
    (0.05f64..1.0, 2.0f64..30.0, 0.1f64..0.9).prop_map(|(hbar, script_i, w)| {
        let e_plus = 0.5 * (w * script_i).powi(2);
        RingConfig::from_energies(hbar, script_i, 0.0, e_plus, None, None).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn known_roots_are_recovered(roots in root_strategy()) {
        let rs = find_roots(&poly_from_roots(&roots), TARGET_RESIDUAL).unwrap();
        prop_assert_eq!(rs.len(), roots.len());
        let d = match_roots(&rs, &RootSet::from_exact(roots)).max_distance();
        prop_assert!(d < 1e-8, "max root error {d:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn symmetrization_is_idempotent(p in poly_strategy(), phase in 0.0f64..TAU) {
        let det = Complex64::from_polar(1.0, phase);
        let scale = p.max_abs_coeff();
        let once = symmetrize_bottom_up(&p, det).unwrap();
        prop_assert!(max_coeff_gap(&symmetrize_bottom_up(&once, det).unwrap(), &once) <= 1e-14 * scale);
        prop_assert!(self_inversive_residual(&once, det) <= 1e-14);
        let once = symmetrize_top_down(&p, det).unwrap();
        prop_assert!(max_coeff_gap(&symmetrize_top_down(&once, det).unwrap(), &once) <= 1e-14 * scale);
        prop_assert!(self_inversive_residual(&once, det) <= 1e-14);
    }

    #[test]
    fn self_inversive_roots_close_under_reflection(n in 2usize..=64, seed in any::<u64>()) {
        let p = random_self_inversive(n, seed).unwrap();
        let rs = find_roots(&p, TARGET_RESIDUAL).unwrap();
        prop_assert!(reciprocal_closure(&rs) < 1e-8);
    }

    #[test]
    fn phases_are_reduced(cfg in case_i_ring()) {
        if cfg.dimension() == 0 {
            prop_assert!(quantize_window(&cfg).is_err());
            return Ok(());
        }
        let spec = quantize_window(&cfg).unwrap();
        prop_assert_eq!(spec.len(), cfg.dimension());
        prop_assert!(spec.phases().iter().all(|p| (0.0..TAU).contains(p)));
        prop_assert!(cfg.phase_span() <= TAU * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn newton_identities_rebuild_exact_polynomial(cfg in case_i_ring().prop_filter("1 <= N <= 64", |c| (1..=64).contains(&c.dimension()))) {
        let spec = quantize_window(&cfg).unwrap();
        let n = spec.len();
        let newton = newton_coeffs(&exact_traces(&spec, &cfg, n), n).unwrap();
        prop_assert!(relative_coeff_error(&newton, &exact_char_poly(&spec, &cfg)) < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    /// With `a, b` the edge distances from the band centre, the count is the
    /// number of periods below the onset `(b^2 - a^2) / (2 hbar b)`, and
    /// `f (b - a) / hbar = (a + b) / (2 hbar)` exceeds the onset by
    /// `a (a + b) / (2 hbar b)`. `N` differs from `(b - a) / hbar` by less than one.
    #[test]
    fn fraction_formula_tracks_counting_onset(
        hbar in 0.5f64..2.0,
        script_i in 0.5f64..5.0,
        x in 0.01f64..1.0,
        e_plus in 50.0f64..2000.0,
    ) {
        let e_minus = 0.5 * (x * hbar / 2.0).powi(2);
        let cfg = RingConfig::from_energies(hbar, script_i, e_minus, e_plus, None, None).unwrap();
        let f = fraction_zero_traces(&cfg, e_minus, e_plus).unwrap();
        let expected = ((f.onset.ceil() as usize).saturating_sub(1)).min(f.n);
        prop_assert_eq!(f.count, expected, "onset {}", f.onset);
        let (lo, hi) = cfg.window();
        let (a, b) = (lo - script_i, hi - script_i);
        let bound = a * (a + b) / (2.0 * hbar * b) + f.formula * (f.n as f64 - (b - a) / hbar).abs();
        let gap = (f.formula * f.n as f64 - f.onset).abs();
        prop_assert!(gap <= bound + 1e-9, "f N - onset = {gap}, bound {bound}");
        prop_assert!(a / (2.0 * hbar) <= 0.25);
    }
}
