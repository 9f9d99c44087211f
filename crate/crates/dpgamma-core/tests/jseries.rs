use dpgamma_core::gamma::{gamma_hypersurface_ambient, gamma_surface};
use dpgamma_core::jseries::*;
use dpgamma_core::linalg::{int, rat, Rat};
use dpgamma_core::mirror::wps_closed_form;
use dpgamma_core::operator::{diagonal_table, operator_for};
use dpgamma_core::real::Real;
use dpgamma_core::spectra::spectrum;
use dpgamma_core::gw::GwTable;
use dpgamma_core::SurfaceId;
use num_traits::{One, Zero};
use proptest::prelude::*;

const MODELS: [u8; 7] = [1, 2, 3, 5, 6, 7, 8];

fn model(r: u8) -> CIModel {
    CIModel::for_surface(SurfaceId::X(r)).unwrap()
}

fn rho(r: u8) -> f64 {
    let table = GwTable::bundled();
    let (m, _) = operator_for(SurfaceId::X(r), Some(&table)).unwrap();
    spectrum(&m, 1e-12).unwrap().rho
}

fn fact(n: u64) -> Rat {
    (1..=n).fold(Rat::one(), |a, k| a * int(k as i64))
}

// a + b h + c h^2, exact
type Tp = [Rat; 3];

fn tp_mul(a: &Tp, b: &Tp) -> Tp {
    [
        &a[0] * &b[0],
        &a[0] * &b[1] + &a[1] * &b[0],
        &a[0] * &b[2] + &a[1] * &b[1] + &a[2] * &b[0],
    ]
}

fn tp_inv(a: &Tp) -> Tp {
    let i0 = Rat::one() / &a[0];
    let i1 = -(&a[1] * &i0 * &i0);
    let i2 = -((&a[1] * &i1 + &a[2] * &i0) * &i0);
    [i0, i1, i2]
}

/// Hypersurface of degree `a` in `P(w)`: coefficient of degree `d`, written
/// out factor by factor.
fn hypersurface_coefficient(w: &[u32], a: u32, d: u64) -> Tp {
    let mut c: Tp = [Rat::one(), Rat::zero(), Rat::zero()];
    for k in 1..=a as u64 * d {
        c = tp_mul(&c, &[int(k as i64), int(a as i64), Rat::zero()]);
    }
    for &wi in w {
        for k in 1..=wi as u64 * d {
            c = tp_mul(&c, &tp_inv(&[int(k as i64), int(wi as i64), Rat::zero()]));
        }
    }
    c
}

#[test]
fn c0_from_factorials() {
    let want = [(5u8, fact(2) * fact(2)), (6, fact(3)), (7, fact(4) / fact(2)), (8, fact(6) / (fact(2) * fact(3)))];
    for (r, c) in want {
        assert_eq!(model(r).c0(), c, "X{r}");
    }
    // one contribution per factor on which c_1 restricts to 1
    assert_eq!(model(1).c0(), int(1));
    assert_eq!(model(2).c0(), int(3));
    assert_eq!(model(3).c0(), int(2));
}

#[test]
fn c0_matches_diagonal_block() {
    for r in 5..=8u8 {
        assert_eq!(model(r).c0(), int(-diagonal_table(r).unwrap()), "X{r}");
    }
}

#[test]
fn c0_is_scalar_part_of_first_coefficient() {
    for r in MODELS {
        let s = lefschetz_series(&model(r), 2);
        assert_eq!(s.coefficients[1][0], s.c0, "X{r}");
    }
}

#[test]
fn zeroth_coefficient_is_unit() {
    for r in MODELS {
        let s = lefschetz_series(&model(r), 3);
        assert!(s.coefficients[0][0].is_one());
        assert!(s.coefficients[0][1..].iter().all(Zero::is_zero));
    }
    let s = lefschetz_series(&CIModel::weighted_ambient(&[1, 1, 2, 3]).unwrap(), 8);
    assert!(s.coefficients[0][0].is_one());
}

#[test]
fn hypersurface_coefficients_match_direct_products() {
    let cases: [(u8, &[u32], u32); 3] = [(6, &[1, 1, 1, 1], 3), (7, &[1, 1, 1, 2], 4), (8, &[1, 1, 2, 3], 6)];
    for (r, w, a) in cases {
        let s = lefschetz_series(&model(r), 6);
        for d in 0..=6u64 {
            assert_eq!(s.coefficients[d as usize], hypersurface_coefficient(w, a, d).to_vec(), "X{r} d={d}");
        }
    }
    // two quadrics: both rows contribute the same factor
    let s = lefschetz_series(&model(5), 5);
    for d in 0..=5u64 {
        let mut c = hypersurface_coefficient(&[1, 1, 1, 1, 1], 2, d);
        for k in 1..=2 * d {
            c = tp_mul(&c, &[int(k as i64), int(2), Rat::zero()]);
        }
        assert_eq!(s.coefficients[d as usize], c.to_vec(), "X5 d={d}");
    }
}

#[test]
fn weighted_ambient_skips_fractional_degrees() {
    let s = lefschetz_series(&CIModel::weighted_ambient(&[1, 1, 1, 2]).unwrap(), 10);
    for n in [1, 2, 3, 4, 6, 7, 8, 9] {
        assert!(s.coefficients[n].iter().all(Zero::is_zero), "n={n}");
    }
    // t^5: 1 / (1 * 1 * 1 * 2!) at h = 0
    assert_eq!(s.coefficients[5][0], rat(1, 2));
    assert!(Zero::is_zero(&s.c0));
}

#[test]
fn single_term_evaluation() {
    let m = model(6);
    let s = lefschetz_series(&m, 0);
    let v = s.evaluate(1.0, 40);
    let want = (-Real::from_i64(6, v[0].precision())).exp();
    assert!((&v[0] - &want).abs().log10_abs() < -35.0);
    assert!(v[1..].iter().all(|x| x.is_zero()));
}

#[test]
fn stored_series_agrees_with_direct_evaluation() {
    for r in [1u8, 2, 6] {
        let m = model(r);
        let s = lefschetz_series(&m, 30);
        let a = s.evaluate(0.1, 50);
        let b = evaluate(&m, 0.1, &EvalOptions { digits: 50, guard_digits: 40, max_terms: 600 }).unwrap();
        for (x, y) in a.iter().zip(&b.j) {
            let d = (x - y).abs();
            assert!(d.is_zero() || d.log10_abs() < -14.0, "X{r}");
        }
    }
}

#[test]
fn scalar_component_positive() {
    let ev = evaluate(&model(6), 20.0, &EvalOptions { max_terms: 5000, ..Default::default() }).unwrap();
    assert!(ev.j[0].is_positive());
}

#[test]
fn gamma_class_matches_hypersurface_formula() {
    let g = model(7).gamma_class(50);
    let h = gamma_hypersurface_ambient(&[1, 1, 1, 2], 4, 50).unwrap();
    for k in 0..3 {
        assert!((&g[k] - h.coeff(k)).abs().log10_abs() < -45.0);
    }
    let g = CIModel::weighted_ambient(&[1, 1, 2, 3]).unwrap().gamma_class(50);
    let h = gamma_hypersurface_ambient(&[1, 1, 2, 3], 0, 50).unwrap();
    for k in 0..3 {
        assert!((&g[k] - h.coeff(k)).abs().log10_abs() < -45.0);
    }
}

#[test]
fn test_functionals_pair_against_y() {
    // cubic surface: int h^2 [Y] = 3
    let f = model(6).test_functionals();
    assert_eq!(f.len(), 3);
    assert_eq!(f[2].0, "h^2");
    assert_eq!(f[2].1[0], int(3));
    // quartic in P(1,1,1,2): 4 / 2
    assert_eq!(model(7).test_functionals()[2].1[0], int(2));
    // X1 in P1 x P2: h2^2 . (h1 + h2) = 1, h1 h2 . (h1 + h2) = 1
    let f = model(1).test_functionals();
    let labels: Vec<&str> = f.iter().map(|x| x.0.as_str()).collect();
    assert_eq!(labels, ["1", "h1", "h2", "h1*h2", "h2^2"]);
    assert!(f[3..].iter().all(|x| x.1[0] == int(1)));
}

#[test]
fn dispersion_matches_reference_values() {
    // values from an independent arbitrary-precision implementation
    let want = [(1u8, 1.15183e-3), (2, 2.13811e-4), (3, 3.83489e-6)];
    for (r, d) in want {
        let rep = gamma_limit_report(&model(r), rho(r), &[2.0], &EvalOptions::default()).unwrap();
        let got = rep.points[0].dispersion;
        assert!((got / d - 1.0).abs() < 1e-4, "X{r}: {got}");
    }
}

#[test]
fn single_point_grid_is_monotone() {
    let rep = gamma_limit_report(&model(6), 21.0, &[10.0], &EvalOptions { max_terms: 2000, ..Default::default() }).unwrap();
    assert!(rep.monotone);
    assert_eq!(rep.points.len(), 1);
}

#[test]
fn cubic_dispersion_decreases() {
    let opts = EvalOptions { max_terms: 4000, ..Default::default() };
    let rep = gamma_limit_report(&model(6), rho(6), &[2.0, 3.0, 4.0, 6.0], &opts).unwrap();
    for w in rep.points.windows(2) {
        assert!(w[1].dispersion < w[0].dispersion);
    }
    let rep = gamma_limit_report(&model(6), rho(6), &DEFAULT_GRID, &opts).unwrap();
    assert!(rep.passes());
    assert!(rep.points[0].dispersion < rep.floor);
}

#[test]
fn weighted_ambient_limit() {
    let c = wps_closed_form(&[1, 1, 1, 2], 60).unwrap().c.to_f64();
    assert!((c - 5.0 * 4f64.powf(-0.2)).abs() < 1e-12);
    let rep = gamma_limit_report(&CIModel::weighted_ambient(&[1, 1, 1, 2]).unwrap(), c, &DEFAULT_GRID, &EvalOptions::default())
        .unwrap();
    assert!(rep.failures.is_empty());
    assert!(rep.final_dispersion < DISPERSION_THRESHOLD);
    assert!(rep.monotone);
}

#[test]
fn toric_surfaces_without_equations() {
    for (s, rho, per_h) in [(SurfaceId::P2, 3.0, 3), (SurfaceId::P1xP1, 4.0, 2)] {
        let m = CIModel::for_surface(s).unwrap();
        assert!(m.rows.is_empty());
        assert!(Zero::is_zero(&m.c0()));
        let g = m.gamma_class(50);
        let surf = gamma_surface(s, 50);
        let p = surf.c1.precision();
        let n = g.len();
        for k in 1..n - 1 {
            assert!((&g[k] - &(&surf.c1 * &Real::from_i64(per_h, p))).abs().log10_abs() < -45.0);
        }
        assert!((&g[n - 1] - &surf.pt).abs().log10_abs() < -45.0);
        let rep = gamma_limit_report(&m, rho, &DEFAULT_GRID, &EvalOptions::default()).unwrap();
        assert!(rep.passes(), "{s}: {:?}", rep.failures);
    }
}

#[test]
fn growth_rate_matches_spectral_radius() {
    let opts = EvalOptions { max_terms: 5000, guard_digits: 30, ..Default::default() };
    let ts = [20.0, 22.5, 25.0, 27.5, 30.0];
    let fit = growth_rate_fit(&model(6), &ts, &opts).unwrap();
    assert!((fit - rho(6)).abs() < 1e-2, "{fit}");
    let fit = growth_rate_fit(&model(1), &ts, &opts).unwrap();
    assert!((fit - rho(1)).abs() < 1e-2, "{fit}");
    let c = wps_closed_form(&[1, 1, 2, 3], 60).unwrap().c.to_f64();
    let fit = growth_rate_fit(&CIModel::weighted_ambient(&[1, 1, 2, 3]).unwrap(), &ts, &opts).unwrap();
    assert!((fit - c).abs() < 1e-2, "{fit}");
}

#[test]
fn budget_and_argument_errors() {
    assert!(matches!(CIModel::for_surface(SurfaceId::X(4)), Err(JError::UnsupportedModel(_))));
    let opts = EvalOptions { max_terms: 50, ..Default::default() };
    assert!(matches!(evaluate(&model(8), 5.0, &opts), Err(JError::TermBudgetExceeded { budget: 50, .. })));
    assert!(matches!(evaluate(&model(8), -1.0, &opts), Err(JError::BadGrid)));
    let opts = EvalOptions { guard_digits: 80, digits: 40, max_terms: 600 };
    assert!(matches!(evaluate(&model(6), 1.0, &opts), Err(JError::PrecisionExhausted { .. })));
    assert!(matches!(gamma_limit_report(&model(6), 21.0, &[2.0, 1.0], &EvalOptions::default()), Err(JError::BadGrid)));
    assert!(matches!(gamma_limit_report(&model(6), 21.0, &[], &EvalOptions::default()), Err(JError::BadGrid)));
}

#[test]
fn over_budget_points_are_reported() {
    let rep = gamma_limit_report(&model(8), rho(8), &[0.1, 30.0], &EvalOptions::default()).unwrap();
    assert_eq!(rep.failures.len(), 1);
    assert_eq!(rep.failures[0].0, 30.0);
    assert!(!rep.passes());
}

#[test]
fn c1_restricts_correctly() {
    assert_eq!(model(1).c1(), [1, 2]);
    assert_eq!(model(2).c1(), [1, 1, 1]);
    assert_eq!(model(3).c1(), [1, 1]);
    for r in [5u8, 6, 7, 8] {
        assert_eq!(model(r).c1(), [1]);
        assert_eq!(model(r).dim(), 2);
    }
    assert_eq!(CIModel::weighted_ambient(&[1, 1, 2, 3]).unwrap().c1(), [7]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dispersion_does_not_depend_on_normalisation(r in prop::sample::select(vec![1u8, 5, 6]), shift in -3.0f64..3.0, t in 1.0f64..4.0) {
        let opts = EvalOptions { digits: 40, guard_digits: 30, max_terms: 2000 };
        let a = gamma_limit_report(&model(r), 10.0, &[t], &opts).unwrap();
        let b = gamma_limit_report(&model(r), 10.0 + shift, &[t], &opts).unwrap();
        let (da, db) = (a.points[0].dispersion, b.points[0].dispersion);
        prop_assert!((da - db).abs() <= 1e-25 + 1e-20 * da.abs());
    }

    #[test]
    fn ring_division_undoes_multiplication(ns in prop::collection::vec(1u32..4, 1..4), k in 1i64..50, seed in prop::collection::vec(-20i64..20, 12)) {
        let ring = Ring::new(&ns);
        let x: Vec<Rat> = (0..ring.dim()).map(|i| int(seed[i % seed.len()])).collect();
        let l: Vec<i64> = (0..ns.len()).map(|i| seed[i] % 5).collect();
        let y = ring.mul_linear(&x, k, &l);
        prop_assert_eq!(ring.div_linear(&y, k, &l), x);
    }

    #[test]
    fn series_coefficients_are_positive_in_scalar_part(r in prop::sample::select(MODELS.to_vec()), n in 0usize..6) {
        let s = lefschetz_series(&model(r), 6);
        prop_assert!(s.coefficients[n][0] > Rat::zero());
    }
}
