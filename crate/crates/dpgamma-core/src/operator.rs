//! The operator `c_1 *` of quantum multiplication at `q = 1` and the
//! verification of Property O for every del Pezzo surface.
//!
//! For `X_r` with `r >= 3` the basis is `[1, c_1, E_1, .., E_r, pt]`, with
//! dual basis `[pt, H/3, H/3 - E_1, .., H/3 - E_r, 1]`. Entries are
//! three-point invariants `<c_1, beta, gamma^v>` summed over curve classes
//! of anticanonical degree 1, 2 and 3.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::gw::{GwError, GwKind, GwTable};
use crate::lattice::{generators, DivClass, EffectiveClasses, LatticeError};
use crate::linalg::{int, mat_pow, rat, QMatrix, Rat};
use crate::pf::{conjugate_search, gpf_check, primitivity_row_check, ConjugationWitness, GpfWitness, PfError, DEFAULT_K_MAX};
use crate::spectra::{property_o_certificate, PropertyOCertificate, SpectraError};
use crate::surface::SurfaceId;

/// Number of rational nodal curves in the anticanonical pencil of `X_8`,
/// used by [`diagonal_entry`] and [`off_diagonal_entry`] for the class
/// `c_1`. Its terms vanish there, so the value only matters in `assemble`,
/// which reads it from the table instead.
pub const N0_C1_X8: i64 = 12;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum OperatorError {
    #[error("{0} has no hard-coded operator")]
    NotBuiltin(SurfaceId),
    #[error("r = {0} outside the supported range")]
    RankOutOfRange(u8),
    #[error("a Gromov-Witten table is required for {0}")]
    TableRequired(SurfaceId),
    #[error("row {row} is not constant across the E columns")]
    RowNotConstant { row: usize },
    #[error(transparent)]
    Gw(#[from] GwError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Pf(#[from] PfError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

fn m(rows: &[&[i64]]) -> QMatrix {
    QMatrix::from_i64(rows).expect("square literal")
}

fn mq(rows: &[&[(i64, i64)]]) -> QMatrix {
    QMatrix::from_fracs(rows).expect("square literal")
}

/// Quantum multiplication by `c_1` for `X_1`, `X_2`, `X_3` on the basis
/// `[1, H, E_1, .., E_r, pt]`, together with the change of basis to the
/// preferred one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantumTable {
    pub surface: SurfaceId,
    pub standard_basis: Vec<String>,
    pub standard: QMatrix,
    pub preferred_basis: Vec<String>,
    /// Columns are the preferred basis vectors written in the standard basis.
    pub change_of_basis: QMatrix,
}

impl QuantumTable {
    /// `B^{-1} M B`.
    pub fn preferred(&self) -> QMatrix {
        let inv = self.change_of_basis.inverse().expect("invertible change of basis");
        inv.mul(&self.standard).mul(&self.change_of_basis)
    }
}

fn labels(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

pub fn quantum_table(s: SurfaceId) -> Option<QuantumTable> {
    let t = match s {
        SurfaceId::X(1) => QuantumTable {
            surface: s,
            standard_basis: labels(&["1", "H", "E1", "pt"]),
            standard: m(&[&[0, 2, 2, 3], &[3, 0, 0, 2], &[-1, 0, -1, -2], &[0, 3, 1, 0]]),
            preferred_basis: labels(&["1", "H-E1", "E1", "pt"]),
            change_of_basis: m(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, -1, 1, 0], &[0, 0, 0, 1]]),
        },
        SurfaceId::X(2) => QuantumTable {
            surface: s,
            standard_basis: labels(&["1", "H", "E1", "E2", "pt"]),
            standard: m(&[
                &[0, 4, 2, 2, 3],
                &[3, 1, 1, 1, 4],
                &[-1, -1, -2, -1, -2],
                &[-1, -1, -1, -2, -2],
                &[0, 3, 1, 1, 0],
            ]),
            preferred_basis: labels(&["1", "2H-E1-E2", "E1", "E2", "pt"]),
            change_of_basis: m(&[
                &[1, 0, 0, 0, 0],
                &[0, 2, 0, 0, 0],
                &[0, -1, 1, 0, 0],
                &[0, -1, 0, 1, 0],
                &[0, 0, 0, 0, 1],
            ]),
        },
        SurfaceId::X(3) => QuantumTable {
            surface: s,
            standard_basis: labels(&["1", "H", "E1", "E2", "E3", "pt"]),
            standard: m(&[
                &[0, 6, 2, 2, 2, 6],
                &[3, 3, 2, 2, 2, 6],
                &[-1, -2, -3, -1, -1, -2],
                &[-1, -2, -1, -3, -1, -2],
                &[-1, -2, -1, -1, -3, -2],
                &[0, 3, 1, 1, 1, 0],
            ]),
            preferred_basis: labels(&["1", "c1", "E1", "E2", "E3", "pt"]),
            change_of_basis: m(&[
                &[1, 0, 0, 0, 0, 0],
                &[0, 3, 0, 0, 0, 0],
                &[0, -1, 1, 0, 0, 0],
                &[0, -1, 0, 1, 0, 0],
                &[0, -1, 0, 0, 1, 0],
                &[0, 0, 0, 0, 0, 1],
            ]),
        },
        _ => return None,
    };
    Some(t)
}

/// Hard-coded operators: `P2` on `[1, h, h^2]`, `P1xP1` on
/// `[1, h1, h2, pt]`, and `X_1..X_3` in their preferred bases.
pub fn builtin_operator(s: SurfaceId) -> Result<QMatrix, OperatorError> {
    Ok(match s {
        SurfaceId::P2 => m(&[&[0, 0, 3], &[3, 0, 0], &[0, 3, 0]]),
        SurfaceId::P1xP1 => m(&[&[0, 2, 2, 0], &[2, 0, 0, 2], &[2, 0, 0, 2], &[0, 2, 2, 0]]),
        SurfaceId::X(1) => m(&[&[0, 0, 2, 3], &[3, 0, 0, 2], &[2, 1, -1, 0], &[0, 2, 1, 0]]),
        SurfaceId::X(2) => mq(&[
            &[(0, 1), (4, 1), (2, 1), (2, 1), (3, 1)],
            &[(3, 2), (0, 1), (1, 2), (1, 2), (2, 1)],
            &[(1, 2), (1, 1), (-3, 2), (-1, 2), (0, 1)],
            &[(1, 2), (1, 1), (-1, 2), (-3, 2), (0, 1)],
            &[(0, 1), (4, 1), (1, 1), (1, 1), (0, 1)],
        ]),
        SurfaceId::X(3) => mq(&[
            &[(0, 1), (12, 1), (2, 1), (2, 1), (2, 1), (6, 1)],
            &[(1, 1), (1, 1), (2, 3), (2, 3), (2, 3), (2, 1)],
            &[(0, 1), (0, 1), (-7, 3), (-1, 3), (-1, 3), (0, 1)],
            &[(0, 1), (0, 1), (-1, 3), (-7, 3), (-1, 3), (0, 1)],
            &[(0, 1), (0, 1), (-1, 3), (-1, 3), (-7, 3), (0, 1)],
            &[(0, 1), (6, 1), (1, 1), (1, 1), (1, 1), (0, 1)],
        ]),
        other => return Err(OperatorError::NotBuiltin(other)),
    })
}

/// Basis the operator of `s` is written in.
pub fn basis_labels(s: SurfaceId) -> Vec<String> {
    match s {
        SurfaceId::P2 => labels(&["1", "h", "h^2"]),
        SurfaceId::P1xP1 => labels(&["1", "h1", "h2", "pt"]),
        SurfaceId::X(r) if r <= 2 => quantum_table(s).map(|t| t.preferred_basis).unwrap_or_default(),
        SurfaceId::X(r) => {
            let mut v = labels(&["1", "c1"]);
            v.extend((1..=r).map(|i| format!("E{i}")));
            v.push("pt".into());
            v
        }
    }
}

/// `(H/3) . A`
fn h_third(a: &DivClass) -> Rat {
    rat(a.d0() as i64, 3)
}

/// `(H/3 - E_j) . A`, `j` 1-based.
fn h_third_minus_e(a: &DivClass, j: usize) -> Rat {
    h_third(a) - int(a.d(j) as i64)
}

fn check_rank(r: u8, lo: u8) -> Result<(), OperatorError> {
    if (lo..=8).contains(&r) {
        Ok(())
    } else {
        Err(OperatorError::RankOutOfRange(r))
    }
}

fn unit_weight(a: &DivClass) -> Rat {
    if a.self_intersection() == -1 {
        int(1)
    } else {
        int(N0_C1_X8)
    }
}

/// `sum_{c_1.A = 1} (E_j . A)((H/3 - E_j) . A) N0(A)` with the classes taken
/// from the lattice enumeration.
pub fn diagonal_entry(r: u8) -> Result<Rat, OperatorError> {
    check_rank(r, 4)?;
    let j = r as usize;
    Ok(generators(r)
        .iter()
        .map(|a| int(a.d(j) as i64) * h_third_minus_e(a, j) * unit_weight(a))
        .sum())
}

/// `sum_{c_1.A = 1} (E_i . A)((H/3 - E_j) . A) N0(A)` for `i != j`
/// (1-based point indices).
pub fn off_diagonal_entry(r: u8, i: usize, j: usize) -> Result<Rat, OperatorError> {
    check_rank(r, 4)?;
    let n = r as usize;
    if !(1..=n).contains(&i) || !(1..=n).contains(&j) || i == j {
        return Err(OperatorError::Lattice(LatticeError::IndexOutOfRange { j: i.max(j), r }));
    }
    Ok(generators(r)
        .iter()
        .map(|a| int(a.d(i) as i64) * h_third_minus_e(a, j) * unit_weight(a))
        .sum())
}

/// The operator of `X_r` on `[1, c_1, E_1..E_r, pt]` from the invariants in
/// `table`, `3 <= r <= 8`.
pub fn assemble(r: u8, table: &GwTable) -> Result<QMatrix, OperatorError> {
    check_rank(r, 3)?;
    let eff = EffectiveClasses::new(r)?;
    assemble_with(r, table, &eff)
}

pub fn assemble_with(r: u8, table: &GwTable, eff: &EffectiveClasses) -> Result<QMatrix, OperatorError> {
    let n = r as usize + 3;
    let last = n - 1;
    let c1 = DivClass::c1(r);
    // (class, weight) lists per degree, zero weights dropped
    let mut weighted: [Vec<(DivClass, Rat)>; 3] = Default::default();
    for (k, kind) in [(1, GwKind::N0), (2, GwKind::Pt), (3, GwKind::PtPt)] {
        for a in eff.of_degree(k)? {
            let w = table.invariant(a, kind)?;
            if !w.is_zero() {
                weighted[k as usize - 1].push((*a, w));
            }
        }
    }
    // column divisors: index 1 is c_1, index 2 + i is E_{i+1}
    let col_div = |col: usize| -> DivClass {
        if col == 1 {
            c1
        } else {
            DivClass::e(r, col - 1)
        }
    };
    // pairing of the dual of basis row `row` (a divisor row) with A
    let dual = |row: usize, a: &DivClass| -> Rat {
        if row == 1 {
            h_third(a)
        } else {
            h_third_minus_e(a, row - 1)
        }
    };
    let mut mat = QMatrix::zeros(n);
    mat[(1, 0)] = int(1);
    for col in 1..last {
        let beta = col_div(col);
        mat[(0, col)] = weighted[1].iter().map(|(a, w)| int(2 * beta.dot(a)) * w).sum();
        for row in 1..last {
            mat[(row, col)] = weighted[0].iter().map(|(a, w)| int(beta.dot(a)) * dual(row, a) * w).sum();
        }
        mat[(last, col)] = int(c1.dot(&beta));
    }
    mat[(0, last)] = weighted[2].iter().map(|(_, w)| int(3) * w).sum();
    for row in 1..last {
        mat[(row, last)] = weighted[1].iter().map(|(a, w)| int(2) * dual(row, a) * w).sum();
    }
    for row in [0, 1] {
        if (3..last).any(|c| mat[(row, c)] != mat[(row, 2)]) {
            return Err(OperatorError::RowNotConstant { row: row + 1 });
        }
    }
    Ok(mat)
}

/// Exact evaluation of the structural inequalities on `M` and `M^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuralReport {
    pub column_sums_positive: bool,
    pub row2_nonnegative: bool,
    pub square_nonnegative: bool,
    /// Rows 1, 2 and `r+3` of `M^2` are entrywise positive.
    pub square_rows_positive: bool,
    /// `m22^(2) > sum_{k=3}^{r+2} m_ik^(2)` for every `3 <= i <= r+2`.
    pub square_dominance: bool,
    /// `m22^(2) > d^2` with `d = m33`.
    pub square_exceeds_diagonal: bool,
    /// `m_{1,j} + d > 0` and `(9 - r) m_{2,j} + d > 0` over the `E_j` columns;
    /// only asked of `r >= 4`.
    pub row_offsets_positive: Option<bool>,
}

impl StructuralReport {
    pub fn all(&self) -> bool {
        self.column_sums_positive
            && self.row2_nonnegative
            && self.square_nonnegative
            && self.square_rows_positive
            && self.square_dominance
            && self.square_exceeds_diagonal
            && self.row_offsets_positive.unwrap_or(true)
    }
}

pub fn structural_checks(mat: &QMatrix, r: u8) -> StructuralReport {
    let n = mat.dim();
    let r = r as usize;
    let sq = mat_pow(mat, 2);
    let last = n - 1;
    let row_pos = |i: usize| i < n && sq.row(i).iter().all(|x| x.is_positive());
    let m22 = &sq[(1, 1)];
    let dominance =
        n == r + 3 && (2..r + 2).all(|i| (2..r + 2).map(|k| sq[(i, k)].clone()).sum::<Rat>() < *m22);
    let d = if n > 2 { mat[(2, 2)].clone() } else { Rat::zero() };
    let offsets = (r >= 4 && n == r + 3).then(|| {
        let k = int(9 - r as i64);
        (2..r + 2).all(|j| (&mat[(0, j)] + &d).is_positive() && (&k * &mat[(1, j)] + &d).is_positive())
    });
    StructuralReport {
        column_sums_positive: (0..n).all(|j| mat.column_sum(j).is_positive()),
        row2_nonnegative: n > 1 && mat.row(1).iter().all(|x| !x.is_negative()),
        square_nonnegative: sq.is_nonnegative(),
        square_rows_positive: row_pos(0) && row_pos(1) && row_pos(last),
        square_dominance: dominance,
        square_exceeds_diagonal: *m22 > &d * &d,
        row_offsets_positive: offsets,
    }
}

/// Generalized Perron-Frobenius evidence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PfEvidence {
    /// Hypotheses checked on the operator itself.
    Direct(GpfWitness),
    /// Checked on a conjugate `P M P^{-1}`; `None` when the grid had no hit.
    Conjugated(Option<ConjugationWitness>),
}

impl PfEvidence {
    pub fn holds(&self) -> bool {
        match self {
            PfEvidence::Direct(w) => w.hypotheses_hold(),
            PfEvidence::Conjugated(Some(w)) => {
                w.checks.column_sums_positive && w.checks.square_positive && w.checks.gpf.hypotheses_hold()
            }
            PfEvidence::Conjugated(None) => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorReport {
    pub surface: SurfaceId,
    pub basis: Vec<String>,
    pub matrix: QMatrix,
    pub evidence: PfEvidence,
    /// Row of the certifying nonnegative power with all entries positive.
    pub primitive_row: Option<usize>,
    pub structural: Option<StructuralReport>,
    pub certificate: PropertyOCertificate,
    /// The weight given to the class `c_1` in degree-1 sums on `X_8`.
    pub c1_multiplicity: Option<Rat>,
    pub source: &'static str,
}

impl OperatorReport {
    pub fn holds(&self) -> bool {
        self.certificate.holds && self.evidence.holds() && self.structural.as_ref().map_or(true, |s| s.all())
    }
}

/// The operator of `s` and where it came from.
pub fn operator_for(s: SurfaceId, table: Option<&GwTable>) -> Result<(QMatrix, &'static str), OperatorError> {
    match s {
        SurfaceId::X(r) if r >= 4 => {
            let t = table.ok_or(OperatorError::TableRequired(s))?;
            Ok((assemble(r, t)?, "assembled from Gromov-Witten table"))
        }
        _ => Ok((builtin_operator(s)?, "hard-coded quantum product")),
    }
}

/// Operator construction, Perron-Frobenius evidence, exact spectrum and the
/// Property O certificate for one surface.
pub fn verify_conjecture_o(s: SurfaceId, table: Option<&GwTable>, tol: f64) -> Result<OperatorReport, OperatorError> {
    let (mat, source) = operator_for(s, table)?;
    let r = s.blowup_rank().unwrap_or(0);
    let (evidence, primitive_row, structural) = if r >= 3 {
        let w = conjugate_search(&mat, r as usize)?;
        let prim = match &w {
            Some(w) => {
                let k = w.checks.gpf.k.unwrap_or(2);
                primitivity_row_check(&mat_pow(&w.conjugated, k)).ok().flatten()
            }
            None => None,
        };
        (PfEvidence::Conjugated(w), prim, Some(structural_checks(&mat, r)))
    } else {
        let w = gpf_check(&mat, DEFAULT_K_MAX);
        let prim = w.primitive_row;
        (PfEvidence::Direct(w), prim, None)
    };
    let certificate = property_o_certificate(&mat, s.fano_index(), tol)?;
    let c1_multiplicity = match (r, table) {
        (8, Some(t)) => Some(t.invariant(&DivClass::c1(8), GwKind::N0)?),
        _ => None,
    };
    Ok(OperatorReport {
        surface: s,
        basis: basis_labels(s),
        matrix: mat,
        evidence,
        primitive_row,
        structural,
        certificate,
        c1_multiplicity,
        source,
    })
}

/// Expected shape `d_r` of the diagonal block, `4 <= r <= 8`.
pub fn diagonal_table(r: u8) -> Option<i64> {
    match r {
        4 => Some(-3),
        5 => Some(-4),
        6 => Some(-6),
        7 => Some(-12),
        8 => Some(-60),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_preferred_bases() {
        for r in 1..=3 {
            let s = SurfaceId::X(r);
            assert_eq!(quantum_table(s).unwrap().preferred(), builtin_operator(s).unwrap(), "{s}");
        }
        assert!(matches!(builtin_operator(SurfaceId::X(5)), Err(OperatorError::NotBuiltin(_))));
    }

    #[test]
    fn diagonal_values() {
        for r in 4..=8 {
            assert_eq!(diagonal_entry(r).unwrap(), int(diagonal_table(r).unwrap()), "r = {r}");
        }
        assert!(diagonal_entry(3).is_err());
    }

    #[test]
    fn off_diagonal_vanishes() {
        assert_eq!(off_diagonal_entry(8, 1, 2).unwrap(), int(0));
        assert_eq!(off_diagonal_entry(5, 2, 1).unwrap(), int(0));
        assert!(off_diagonal_entry(5, 2, 2).is_err());
    }

    #[test]
    fn structural_on_m3() {
        let m3 = builtin_operator(SurfaceId::X(3)).unwrap();
        assert!(structural_checks(&m3, 3).all());
        assert!(!structural_checks(&m3.neg(), 3).column_sums_positive);
    }

    #[test]
    fn labels_match_dimension() {
        for s in SurfaceId::ALL {
            assert_eq!(basis_labels(s).len(), s.cohomology_rank(), "{s}");
        }
    }
}
