use dpgamma_core::gw::{GwKind, GwTable};
use dpgamma_core::lattice::{exceptional_classes, DivClass, EffectiveClasses};
use dpgamma_core::linalg::{char_poly, int, rat, Poly, QMatrix, Rat};
use dpgamma_core::operator::*;
use dpgamma_core::pf::{check_template, conjugate_search};
use dpgamma_core::spectra::spectrum;
use dpgamma_core::SurfaceId;
use std::sync::OnceLock;

fn table() -> &'static GwTable {
    static T: OnceLock<GwTable> = OnceLock::new();
    T.get_or_init(GwTable::bundled)
}

// rows 1 and 2 of the assembled operator, computed by a separate script:
// (m11, m12, m1E, m1pt) and (m21, m22, m2E, m2pt)
const ROWS: [(u8, [i64; 4], [i64; 4]); 5] = [
    (4, [0, 20, 4, 15], [1, 2, 1, 4]),
    (5, [0, 40, 10, 48], [1, 4, 2, 10]),
    (6, [0, 108, 36, 252], [1, 9, 5, 36]),
    (7, [0, 552, 276, 3744], [1, 28, 20, 276]),
    (8, [0, 20520, 20520, 1339200], [1, 252, 312, 20520]),
];

#[test]
fn assembled_rows_match_oracle() {
    for (r, row1, row2) in ROWS {
        let m = assemble(r, table()).unwrap();
        let n = r as usize + 3;
        check_template(&m, r as usize).unwrap();
        for (row, want) in [(0, row1), (1, row2)] {
            assert_eq!(m[(row, 0)], int(want[0]), "r={r}");
            assert_eq!(m[(row, 1)], int(want[1]), "r={r}");
            for j in 2..n - 1 {
                assert_eq!(m[(row, j)], int(want[2]), "r={r}");
            }
            assert_eq!(m[(row, n - 1)], int(want[3]), "r={r}");
        }
        let d = int(diagonal_table(r).unwrap());
        for i in 2..n - 1 {
            for j in 2..n - 1 {
                assert_eq!(m[(i, j)], if i == j { d.clone() } else { int(0) });
            }
        }
        assert_eq!(m[(n - 1, 1)], int(9 - r as i64));
    }
}

#[test]
fn assemble_three_reproduces_builtin() {
    assert_eq!(assemble(3, table()).unwrap(), builtin_operator(SurfaceId::X(3)).unwrap());
}

#[test]
fn m22_is_exceptional_fold() {
    for r in 4..=7u8 {
        let fold: Rat = exceptional_classes(r).iter().map(|a| rat(a.d0() as i64, 3)).sum();
        assert_eq!(assemble(r, table()).unwrap()[(1, 1)], fold);
    }
}

#[test]
fn off_diagonal_full_loop() {
    for r in 4..=8u8 {
        for i in 1..=r as usize {
            for j in 1..=r as usize {
                if i != j {
                    assert_eq!(off_diagonal_entry(r, i, j).unwrap(), int(0));
                }
            }
        }
    }
}

#[test]
fn similarity_preserves_char_poly() {
    for r in 1..=3 {
        let t = quantum_table(SurfaceId::X(r)).unwrap();
        assert_eq!(char_poly(&t.standard), char_poly(&t.preferred()));
    }
}

#[test]
fn printed_char_polys() {
    let want = [
        Poly::from_i64(&[-11, -36, -8, 1, 1]),
        Poly::from_i64(&[-43, -104, -78, -15, 3, 1]),
        Poly::from_i64(&[-432, -864, -648, -208, -15, 6, 1]),
    ];
    for (r, p) in (1..=3).zip(want) {
        assert_eq!(char_poly(&builtin_operator(SurfaceId::X(r)).unwrap()), p);
    }
}

#[test]
fn printed_powers() {
    use dpgamma_core::linalg::mat_pow;
    let m1 = builtin_operator(SurfaceId::X(1)).unwrap();
    let want = QMatrix::from_i64(&[&[26, 1, 7, 28], &[28, 26, 1, 8], &[7, 21, 5, 1], &[1, 7, 21, 26]]).unwrap();
    assert_eq!(mat_pow(&m1, 3), want);
    let m2 = builtin_operator(SurfaceId::X(2)).unwrap();
    let want = QMatrix::from_fracs(&[
        &[(8, 1), (16, 1), (1, 1), (1, 1), (8, 1)],
        &[(1, 2), (15, 1), (4, 1), (4, 1), (9, 2)],
        &[(1, 2), (0, 1), (4, 1), (3, 1), (7, 2)],
        &[(1, 2), (0, 1), (3, 1), (4, 1), (7, 2)],
        &[(7, 1), (2, 1), (0, 1), (0, 1), (8, 1)],
    ])
    .unwrap();
    assert_eq!(mat_pow(&m2, 2), want);
    let m3 = builtin_operator(SurfaceId::X(3)).unwrap();
    let sq = mat_pow(&m3, 2);
    assert_eq!(sq[(0, 1)], int(48));
    assert_eq!(sq[(2, 2)], rat(17, 3));
    assert_eq!(sq[(5, 5)], int(12));
}

#[test]
fn m3_conjugation_witness() {
    let m3 = builtin_operator(SurfaceId::X(3)).unwrap();
    let w = conjugate_search(&m3, 3).unwrap().expect("witness on the grid");
    assert_eq!((w.a.clone(), w.b.clone()), (int(2), rat(1, 2)));
    assert_eq!(char_poly(&w.conjugated), char_poly(&m3));
}

#[test]
fn structural_checks_on_assembled() {
    for r in 4..=8u8 {
        let m = assemble(r, table()).unwrap();
        let rep = structural_checks(&m, r);
        assert!(rep.all(), "r = {r}");
        assert_eq!(rep.row_offsets_positive, Some(true));
    }
    let m3 = builtin_operator(SurfaceId::X(3)).unwrap();
    assert_eq!(structural_checks(&m3, 3).row_offsets_positive, None);
}

#[test]
fn every_surface_satisfies_property_o() {
    for s in SurfaceId::ALL {
        let rep = verify_conjecture_o(s, Some(table()), 1e-9).unwrap();
        assert!(rep.holds(), "{s}: {rep:?}");
    }
}

#[test]
fn spectral_radii() {
    let want = [(3u8, 6.0), (4, 8.090169943749474), (5, 12.0), (6, 21.0), (7, 52.0), (8, 372.0)];
    for (r, rho) in want {
        let rep = verify_conjecture_o(SurfaceId::X(r), Some(table()), 1e-9).unwrap();
        assert!((rep.certificate.rho - rho).abs() < 1e-8, "r = {r}: {}", rep.certificate.rho);
    }
}

#[test]
fn small_cases() {
    let rep = verify_conjecture_o(SurfaceId::X(2), None, 1e-9).unwrap();
    assert!(matches!(rep.evidence, PfEvidence::Direct(ref w) if w.k == Some(2)));
    let rep = verify_conjecture_o(SurfaceId::P1xP1, None, 1e-9).unwrap();
    let mut on = rep.certificate.modulus_rho_eigenvalues.iter().map(|z| z.re.round() as i64).collect::<Vec<_>>();
    on.sort();
    assert_eq!(on, [-4, 4]);
    let s = spectrum(&rep.matrix, 1e-9).unwrap();
    assert_eq!(s.dimension(), 4);
    assert!(matches!(verify_conjecture_o(SurfaceId::X(6), None, 1e-9), Err(OperatorError::TableRequired(_))));
}

#[test]
fn table_queries() {
    let t = table();
    assert_eq!(t.invariant(&DivClass::new(1, &[1, 0, 0, 0, 0]), GwKind::Pt).unwrap(), int(1));
    assert_eq!(t.invariant(&DivClass::e(5, 1), GwKind::Pt).unwrap(), int(0));
    assert_eq!(t.invariant(&DivClass::new(2, &[1, 1, 1, 1, 0, 0]), GwKind::Pt).unwrap(), int(1));
    assert_eq!(t.invariant(&DivClass::h(6), GwKind::PtPt).unwrap(), int(1));
    assert_eq!(t.invariant(&DivClass::new(1, &[1, 1, 0, 0]), GwKind::N0).unwrap(), int(1));
    for a in exceptional_classes(7) {
        assert_eq!(t.invariant(&a, GwKind::N0).unwrap(), int(1));
    }
    assert_eq!(t.invariant(&DivClass::c1(8), GwKind::N0).unwrap(), int(12));
}

#[test]
fn table_is_total_and_invariant() {
    use dpgamma_core::lattice::neighbours;
    let t = table();
    for r in 3..=8u8 {
        let eff = EffectiveClasses::new(r).unwrap();
        for (k, kind) in [(1, GwKind::N0), (2, GwKind::Pt), (3, GwKind::PtPt)] {
            for a in eff.of_degree(k).unwrap() {
                let v = t.invariant(a, kind).unwrap();
                assert!(v >= int(0));
                for b in neighbours(a) {
                    assert_eq!(t.invariant(&b, kind).unwrap(), v);
                }
            }
        }
    }
}
