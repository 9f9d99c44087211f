use dpgamma_core::gamma::*;
use dpgamma_core::real::{bits_for_digits, Real};
use dpgamma_core::SurfaceId;
use proptest::prelude::*;

fn close(a: &Real, b: &Real, digits: f64) -> bool {
    let d = (a - b).abs();
    d.is_zero() || d.log10_abs() < -digits
}

// Euler's constant and pi to 50 places, typed in for comparison
const EULER: &str = "0.57721566490153286060651209008240243104215933593992";
const PI: &str = "3.14159265358979323846264338327950288419716939937510";

#[test]
fn constants() {
    let p = bits_for_digits(50);
    assert!(close(&Real::euler_gamma(p), &Real::parse_decimal(EULER, p), 48.0));
    let pi = Real::parse_decimal(PI, p);
    let z2 = &pi * &pi / Real::from_i64(6, p);
    assert!(close(&Real::zeta2(p), &z2, 48.0));
}

#[test]
fn quartic_double_plane_consistency() {
    let amb = gamma_hypersurface_ambient(&[1, 1, 1, 2], 4, 60).unwrap();
    let surf = gamma_surface(SurfaceId::X(7), 60);
    // c_1 restricts to h and h^2 integrates to 2 on the surface
    assert!(close(&surf.c1, amb.coeff(1), 30.0));
    let two = Real::from_i64(2, amb.precision());
    assert!(close(&surf.pt, &(amb.coeff(2) * &two), 30.0));
    // 2 a_2 = C^2 - 9 zeta(2)
    let p = amb.precision();
    let c = Real::euler_gamma(p);
    let want = &c * &c - Real::zeta2(p) * Real::from_i64(9, p);
    assert!(close(&(amb.coeff(2) * &two), &want, 50.0));
}

#[test]
fn sextic_consistency() {
    let amb = gamma_hypersurface_ambient(&[1, 1, 2, 3], 6, 60).unwrap();
    let surf = gamma_surface(SurfaceId::X(8), 60);
    // h^2 on the sextic integrates to 6 / 6 = 1
    assert!(close(&surf.pt, amb.coeff(2), 30.0));
}

#[test]
fn c1_coefficient_is_minus_euler() {
    for s in SurfaceId::ALL {
        let g = gamma_surface(s, 60);
        assert!(close(&g.c1, &-Real::euler_gamma(g.c1.precision()), 30.0), "{s}");
        assert!(g.unit == Real::one(g.c1.precision()));
    }
    for (w, d) in [(&[1u32, 1, 1, 2][..], 0u32), (&[1, 1, 2, 3][..], 0), (&[1, 1, 1, 2][..], 4), (&[1, 1, 2, 3][..], 6)] {
        let g = gamma_hypersurface_ambient(w, d, 60).unwrap();
        let index: u32 = w.iter().sum::<u32>() - d;
        let per_c1 = g.coeff(1) / &Real::from_i64(index as i64, g.precision());
        assert!(close(&per_c1, &-Real::euler_gamma(g.precision()), 30.0));
    }
}

#[test]
fn projective_plane_gamma() {
    // Gamma(1 + h)^3: pt coefficient C^2 * 9/2 + zeta(2) * 3/2
    let g = gamma_surface(SurfaceId::P2, 60);
    let p = g.pt.precision();
    let c = Real::euler_gamma(p);
    let want = &c * &c * Real::parse_decimal("4.5", p) + Real::zeta2(p) * Real::parse_decimal("1.5", p);
    assert!(close(&g.pt, &want, 50.0));
    let amb = gamma_wps_untwisted(&[1, 1, 1], 60).unwrap();
    // h^2 integrates to 1 on the plane
    assert!(close(&g.pt, amb.coeff(2), 50.0));
}

#[test]
fn surface_coefficient_labels() {
    let g = gamma_surface(SurfaceId::X(2), 30);
    let labels: Vec<String> = g.coefficients().into_iter().map(|(l, _)| l).collect();
    assert_eq!(labels, ["1", "H", "E1", "E2", "pt"]);
    assert_eq!(gamma_surface(SurfaceId::P1xP1, 30).coefficients().len(), 4);
}

proptest! {
    #[test]
    fn hypersurface_of_degree_zero_is_the_ambient(ws in prop::collection::vec(1u32..5, 1..5)) {
        let a = gamma_hypersurface_ambient(&ws, 0, 40).unwrap();
        let b = gamma_wps_untwisted(&ws, 40).unwrap();
        for k in 0..3 {
            prop_assert!(close(a.coeff(k), b.coeff(k), 38.0));
        }
    }

    #[test]
    fn gamma_is_multiplicative(a in prop::collection::vec(1u32..5, 1..4), b in prop::collection::vec(1u32..5, 1..4)) {
        let ab: Vec<u32> = a.iter().chain(&b).copied().collect();
        let lhs = gamma_wps_untwisted(&a, 40).unwrap().mul(&gamma_wps_untwisted(&b, 40).unwrap());
        let rhs = gamma_wps_untwisted(&ab, 40).unwrap();
        for k in 0..3 {
            prop_assert!(close(lhs.coeff(k), rhs.coeff(k), 36.0));
        }
    }

    #[test]
    fn inverse_round_trip(x in -50i64..50, y in -50i64..50) {
        let p = bits_for_digits(40);
        let a = TruncPoly::new(Real::from_i64(3, p), Real::from_i64(x, p), Real::from_i64(y, p));
        let one = a.mul(&a.inv());
        prop_assert!(close(one.coeff(0), &Real::one(p), 35.0));
        prop_assert!(close(one.coeff(1), &Real::zero(p), 35.0));
        prop_assert!(close(one.coeff(2), &Real::zero(p), 35.0));
    }
}
