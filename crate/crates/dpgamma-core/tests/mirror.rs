use dpgamma_core::mirror::*;
use dpgamma_core::operator::builtin_operator;
use dpgamma_core::spectra::sorted_eigenvalues;
use dpgamma_core::SurfaceId;
use num_complex::Complex64;

const TORIC: [SurfaceId; 5] = [SurfaceId::P2, SurfaceId::P1xP1, SurfaceId::X(1), SurfaceId::X(2), SurfaceId::X(3)];

#[test]
fn critical_values_match_spectrum() {
    for s in TORIC {
        let m = mirror_spectrum_match(s, DEFAULT_SEED, 1e-8).unwrap();
        assert!(m.matched, "{s}: {}", m.max_deviation);
        assert!(m.max_deviation <= 1e-8);
        assert_eq!(m.critical_values.len(), s.cohomology_rank());
    }
}

#[test]
fn bmodel_property_o() {
    for s in TORIC {
        let f = builtin_potential(s).unwrap();
        let r = bmodel_o_check(&f, DEFAULT_SEED, 1e-9).unwrap();
        assert!(r.holds(), "{s}: {r:?}");
        assert!(r.complete);
        // T_con is the spectral radius
        let eig = sorted_eigenvalues(&builtin_operator(s).unwrap(), 1e-12).unwrap();
        let rho = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!((r.t_con - rho).abs() < 1e-9, "{s}");
    }
}

#[test]
fn projective_plane_conifold() {
    let f = builtin_potential(SurfaceId::P2).unwrap();
    let c = conifold_point(&f, 1e-12, 40).unwrap();
    assert!(c.certified);
    assert!((c.t_con.to_f64() - 3.0).abs() < 1e-12);
    // critical values 3, 3 omega, 3 omega^2
    let pts = critical_points(&f, DEFAULT_SEED, 1e-12).unwrap();
    let want: Vec<Complex64> = (0..3).map(|k| Complex64::from_polar(3.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0)).collect();
    let got: Vec<Complex64> = pts.iter().map(|p| p.value).collect();
    let (_, d) = bottleneck_matching(&got, &want).unwrap();
    assert!(d < 1e-12);
}

#[test]
fn weighted_closed_form_matches_newton() {
    for (w, c_want) in [(&[1u32, 1, 1, 2][..], 3.789291), (&[1, 1, 2, 3][..], 3.5859)] {
        let cf = wps_closed_form(w, 40).unwrap();
        let c = cf.c.to_f64();
        assert!((c - c_want).abs() < 1e-4, "{c}");
        // p_0 really is critical with value c
        assert!((cf.value_at_p0().to_f64() - c).abs() < 1e-30_f64.max(1e-15));
        let f = weighted_potential(w).unwrap();
        let pts = critical_points(&f, DEFAULT_SEED, 1e-12).unwrap();
        assert_eq!(pts.len(), cf.index as usize);
        let closed: Vec<Complex64> = cf.values.iter().map(|z| Complex64::new(z.re.to_f64(), z.im.to_f64())).collect();
        let found: Vec<Complex64> = pts.iter().map(|p| p.value).collect();
        let (perm, d) = bottleneck_matching(&found, &closed).unwrap();
        assert!(d < 1e-10, "{w:?}: {d}");
        for (i, p) in pts.iter().enumerate() {
            let q = &cf.points[perm[i]];
            for (a, b) in p.z.iter().zip(q) {
                assert!((a - Complex64::new(b.re.to_f64(), b.im.to_f64())).norm() < 1e-10);
            }
        }
        let b = bmodel_o_check(&f, DEFAULT_SEED, 1e-9).unwrap();
        assert!(b.holds());
        assert!((b.t_con - c).abs() < 1e-10);
    }
}

#[test]
fn closed_form_c_formula() {
    // c = r (prod w^-w)^(1/r)
    let c = wps_closed_form(&[1, 1, 2, 3], 60).unwrap().c.to_f64();
    let want = 7.0 * (4.0f64 * 27.0).powf(-1.0 / 7.0);
    assert!((c - want).abs() < 1e-14);
    let c = wps_closed_form(&[1, 1, 1], 60).unwrap().c.to_f64();
    assert!((c - 3.0).abs() < 1e-14);
}

#[test]
fn no_mirror_for_non_toric() {
    for r in 4..=8 {
        assert!(matches!(builtin_potential(SurfaceId::X(r)), Err(MirrorError::NoMirrorAvailable(_))));
        assert!(matches!(mirror_spectrum_match(SurfaceId::X(r), 1, 1e-8), Err(MirrorError::NoMirrorAvailable(_))));
    }
}

#[test]
fn seeds_do_not_change_the_answer() {
    let f = builtin_potential(SurfaceId::X(2)).unwrap();
    let a = critical_points(&f, 1, 1e-10).unwrap();
    let b = critical_points(&f, 99, 1e-10).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x.value - y.value).norm() < 1e-9);
    }
}
