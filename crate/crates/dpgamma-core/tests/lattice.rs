use dpgamma_core::lattice::*;
use proptest::prelude::*;

/// Integral solutions of `A.A = -1`, `c_1.A = 1` in a box large enough for
/// every exceptional class on eight points.
fn brute_force(r: u8) -> Vec<DivClass> {
    let n = r as usize;
    let mut out = Vec::new();
    let mut ds = vec![-1i32; n];
    loop {
        for d0 in 0..=6 {
            let a = DivClass::new(d0, &ds);
            if a.self_intersection() == -1 && a.degree() == 1 {
                out.push(a);
            }
        }
        let mut i = 0;
        while i < n && ds[i] == 3 {
            ds[i] = -1;
            i += 1;
        }
        if i == n {
            break;
        }
        ds[i] += 1;
    }
    out.sort();
    out
}

#[test]
fn exceptional_counts() {
    let counts: Vec<usize> = (1..=8).map(|r| exceptional_classes(r).len()).collect();
    assert_eq!(counts, [1, 3, 6, 10, 16, 27, 56, 240]);
}

#[test]
fn exceptional_classes_match_brute_force() {
    for r in 1..=7u8 {
        assert_eq!(exceptional_classes(r), brute_force(r), "r = {r}");
    }
}

#[test]
fn exceptional_classes_form_one_orbit() {
    for r in 3..=8u8 {
        let e = DivClass::e(r, 1);
        assert_eq!(orbit(&e), exceptional_classes(r), "r = {r}");
    }
}

#[test]
fn effective_degree_one_are_the_generators() {
    for r in 3..=8u8 {
        let eff = EffectiveClasses::new(r).unwrap();
        assert_eq!(eff.of_degree(1).unwrap(), &generators(r)[..]);
    }
    assert!(matches!(EffectiveClasses::new(2), Err(LatticeError::RankOutOfRange(2))));
}

#[test]
fn effectivity_edge_cases() {
    let r = 5;
    assert!(is_effective(&DivClass::h(r)).unwrap());
    assert!(is_effective(&DivClass::zero(r)).unwrap());
    assert!(!is_effective(&-DivClass::e(r, 1)).unwrap());
    // 2H - 2E1 has degree 4
    assert!(is_effective(&(2 * (DivClass::h(r) - DivClass::e(r, 1)))).unwrap());
    assert!(matches!(is_effective(&(2 * DivClass::c1(r))), Err(LatticeError::DegreeTooLarge(8))));
}

#[test]
fn lattice_errors() {
    assert_eq!(intersect(&DivClass::h(3), &DivClass::h(4)), Err(LatticeError::MixedSurfaces(3, 4)));
    assert_eq!(cremona(&DivClass::h(2)), Err(LatticeError::NeedsThreePoints(2)));
    assert_eq!(swap(&DivClass::h(3), 3), Err(LatticeError::IndexOutOfRange { j: 3, r: 3 }));
}

#[test]
fn display() {
    let a = DivClass::new(2, &[1, 1, -1]);
    assert_eq!(a.to_string(), "2H - E1 - E2 + E3");
}

fn class() -> impl Strategy<Value = DivClass> {
    (3u8..=8).prop_flat_map(|r| (-6i32..=6, prop::collection::vec(-4i32..=4, r as usize)))
        .prop_map(|(d0, ds)| DivClass::new(d0, &ds))
}

proptest! {
    #[test]
    fn cremona_is_an_isometric_involution(a in class(), b in class()) {
        let s = cremona(&a).unwrap();
        prop_assert_eq!(cremona(&s).unwrap(), a);
        prop_assert_eq!(s.degree(), a.degree());
        prop_assert_eq!(s.self_intersection(), a.self_intersection());
        if a.r() == b.r() {
            prop_assert_eq!(cremona(&b).unwrap().dot(&s), a.dot(&b));
        }
    }

    #[test]
    fn swaps_preserve_form(a in class(), j in 1usize..8) {
        prop_assume!(j < a.r() as usize);
        let s = swap(&a, j).unwrap();
        prop_assert_eq!(s.self_intersection(), a.self_intersection());
        prop_assert_eq!(s.degree(), a.degree());
        prop_assert_eq!(swap(&s, j).unwrap(), a);
    }

    #[test]
    fn orbits_are_closed(k in 0usize..240) {
        let e = exceptional_classes(8);
        let a = e[k];
        let o = orbit(&a);
        for x in &o {
            for y in neighbours(x) {
                prop_assert!(o.binary_search(&y).is_ok());
            }
        }
    }
}
