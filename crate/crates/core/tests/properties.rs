use micz_core::coherent::{energy_of_parameter, psi_closed_form, psi_fock_synthesis};
use micz_core::model::{energy, HalfInt};
use micz_core::oracle::laguerre_series;
use micz_core::special::{laguerre, laguerre_complex};
use micz_core::su11::{displace_number_state, expectation_generators};
use micz_core::{BargmannIndex, CoherentParams};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::TAU;

proptest! {
    #[test]
    fn expectations_are_conjugate_and_on_the_hyperboloid(
        k in 0.51f64..6.0, n in 0usize..20, tau in 0.0f64..3.0, phi in 0.0f64..TAU,
    ) {
        let e = expectation_generators(&CoherentParams::new(tau, phi).unwrap(), BargmannIndex::new(k).unwrap(), n);
        prop_assert!((e.t_plus - e.t_minus.conj()).norm() <= 1e-14 * e.t0);
        let w = k + n as f64;
        let lhs = e.t0 * e.t0 - e.t_plus.norm_sqr();
        prop_assert!((lhs - w * w).abs() <= 1e-12 * e.t0 * e.t0);
    }

    #[test]
    fn half_int_display_parses_back(twice in -400i64..400) {
        let h = HalfInt::from_twice(twice);
        let back: HalfInt = h.to_string().parse().unwrap();
        prop_assert_eq!(back, h);
        prop_assert_eq!(h.value() * 2.0, twice as f64);
    }

    #[test]
    fn decimal_half_ints_parse(twice in -40i64..40) {
        let text = format!("{}", twice as f64 / 2.0);
        prop_assert_eq!(text.parse::<HalfInt>().unwrap(), HalfInt::from_twice(twice));
    }

    #[test]
    fn energy_rises_with_tau_and_stays_bound(j in 0.0f64..5.0, n in 0usize..10, a in 0.0f64..4.0, d in 1e-3f64..1.0) {
        let lo = energy_of_parameter(j, n, a);
        let hi = energy_of_parameter(j, n, a + d);
        prop_assert!(hi > lo);
        prop_assert!(lo >= energy(n, j) && hi < 0.0);
    }

    #[test]
    fn laguerre_recurrence_matches_explicit_sum(n in 0usize..14, alpha in 0.0f64..6.0, x in 0.0f64..8.0) {
        let rec = laguerre(n, alpha, x).unwrap();
        let sum = laguerre_series(n, alpha, Complex64::new(x, 0.0)).re;
        // the explicit sum cancels, so compare on the scale of its largest term
        let scale = laguerre_series(n, alpha, Complex64::new(-x, 0.0)).re.abs().max(1.0);
        prop_assert!((rec - sum).abs() <= 1e-12 * scale, "{rec} vs {sum}");
    }

    #[test]
    fn complex_laguerre_matches_explicit_sum(n in 0usize..12, alpha in 0.0f64..5.0, re in -4.0f64..4.0, im in -4.0f64..4.0) {
        let z = Complex64::new(re, im);
        let rec = laguerre_complex(n, alpha, z).unwrap();
        let sum = laguerre_series(n, alpha, z);
        let scale = laguerre_series(n, alpha, Complex64::new(-z.norm(), 0.0)).re.abs().max(1.0);
        prop_assert!((rec - sum).norm() <= 1e-12 * scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn displaced_state_is_normalised_and_evolution_keeps_it(
        k in 1.0f64..4.0, n in 0usize..6, tau in 0.05f64..1.0, phi in 0.0f64..TAU, t in 0.0f64..50.0,
    ) {
        let p = CoherentParams::new(tau, phi).unwrap();
        let v = displace_number_state(&p, BargmannIndex::new(k).unwrap(), n, 200).unwrap();
        prop_assert!((v.norm_sqr() - 1.0).abs() <= 1e-12 + v.tail());
        let w = v.evolve_diagonal(0.3, t);
        prop_assert!((w.norm_sqr() - v.norm_sqr()).abs() <= 1e-13);
    }

    #[test]
    fn closed_form_matches_fock_synthesis(
        j in 0.0f64..2.5, n in 0usize..4, tau in 0.1f64..0.9, phi in 0.0f64..TAU, r in 0.1f64..30.0,
    ) {
        let p = CoherentParams::new(tau, phi).unwrap();
        let v = displace_number_state(&p, BargmannIndex::new(j + 1.0).unwrap(), n, 300).unwrap();
        let a = psi_closed_form(r, j, n, &p).unwrap();
        let b = psi_fock_synthesis(r, j, &v);
        prop_assert!((a - b).norm() <= 1e-9, "{a} vs {b}");
    }
}
