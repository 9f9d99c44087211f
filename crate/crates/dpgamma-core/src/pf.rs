//! Generalized Perron-Frobenius checks.
//!
//! A real matrix `T` with positive column sums whose power `T^k` is
//! nonnegative and irreducible has its spectral radius as a simple
//! eigenvalue. The helpers here collect that evidence exactly; the spectrum
//! itself is confirmed separately in [`crate::spectra`].

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::linalg::{int, mat_pow, rat, similarity, QMatrix, Rat};

pub const DEFAULT_K_MAX: u32 = 8;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PfError {
    #[error("matrix has a negative entry")]
    NotNonnegative,
    #[error("matrix is reducible")]
    NotIrreducible,
    #[error("matrix does not have the expected operator shape: {0}")]
    TemplateMismatch(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GpfWitness {
    pub column_sums_positive: bool,
    /// Smallest `k <= k_max` with `T^k` nonnegative and irreducible.
    pub k: Option<u32>,
    /// Row of `T^k` with all entries positive (0-based).
    pub primitive_row: Option<usize>,
}

impl GpfWitness {
    pub fn hypotheses_hold(&self) -> bool {
        self.column_sums_positive && self.k.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugationChecks {
    pub column_sums_positive: bool,
    pub square_positive: bool,
    pub gpf: GpfWitness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugationWitness {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
    pub conjugated: QMatrix,
    pub checks: ConjugationChecks,
}

fn reach(m: &QMatrix, start: usize, transpose: bool) -> Vec<bool> {
    let n = m.dim();
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            let e = if transpose { &m[(j, i)] } else { &m[(i, j)] };
            if !e.is_zero() && !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen
}

/// Strong connectivity of the support digraph (`i -> j` when `m_ij != 0`).
pub fn is_irreducible(m: &QMatrix) -> bool {
    reach(m, 0, false).iter().all(|&x| x) && reach(m, 0, true).iter().all(|&x| x)
}

pub fn column_sums_positive(m: &QMatrix) -> bool {
    (0..m.dim()).all(|j| m.column_sum(j).is_positive())
}

fn positive_row(m: &QMatrix) -> Option<usize> {
    (0..m.dim()).find(|&i| m.row(i).iter().all(|x| x.is_positive()))
}

pub fn gpf_check(t: &QMatrix, k_max: u32) -> GpfWitness {
    let cs = column_sums_positive(t);
    let mut power = t.clone();
    for k in 1..=k_max.max(1) {
        if k > 1 {
            power = power.mul(t);
        }
        if power.is_nonnegative() && is_irreducible(&power) {
            return GpfWitness { column_sums_positive: cs, k: Some(k), primitive_row: positive_row(&power) };
        }
    }
    GpfWitness { column_sums_positive: cs, k: None, primitive_row: None }
}

/// For a nonnegative irreducible matrix, an all-positive row (0-based) forces
/// period one.
pub fn primitivity_row_check(m: &QMatrix) -> Result<Option<usize>, PfError> {
    if !m.is_nonnegative() {
        return Err(PfError::NotNonnegative);
    }
    if !is_irreducible(m) {
        return Err(PfError::NotIrreducible);
    }
    Ok(positive_row(m))
}

/// Shape of the `c_1` operator on `[1, c_1, E_1..E_r, pt]`: first column
/// `e_2`, last row `(0, 9-r, 1, .., 1, 0)`, and the `E` rows vanish in the
/// columns of `1`, `c_1` and `pt`.
pub fn check_template(m: &QMatrix, r: usize) -> Result<(), PfError> {
    let n = r + 3;
    if m.dim() != n {
        return Err(PfError::TemplateMismatch("dimension is not r + 3"));
    }
    for i in 0..n {
        let want = if i == 1 { Rat::one() } else { Rat::zero() };
        if m[(i, 0)] != want {
            return Err(PfError::TemplateMismatch("first column is not e_2"));
        }
    }
    let last = n - 1;
    for j in 0..n {
        let want = match j {
            0 => int(0),
            1 => int(9 - r as i64),
            _ if j == last => int(0),
            _ => int(1),
        };
        if m[(last, j)] != want {
            return Err(PfError::TemplateMismatch("last row is not (0, 9-r, 1, .., 1, 0)"));
        }
    }
    for i in 2..n - 1 {
        if !m[(i, 1)].is_zero() || !m[(i, last)].is_zero() {
            return Err(PfError::TemplateMismatch("E rows meet the c_1 or pt columns"));
        }
    }
    Ok(())
}

/// `P = (a-1) E_22 + I + b sum_{k=3}^{r+2} E_k2` (1-based indices).
pub fn conjugation_matrix(r: usize, a: &Rat, b: &Rat) -> QMatrix {
    let mut p = QMatrix::identity(r + 3);
    p[(1, 1)] = a.clone();
    for k in 2..r + 2 {
        p[(k, 1)] = b.clone();
    }
    p
}

/// Search `a in {2,4,8,16}`, `b in {2^-1, .., 2^-20}` in that order for a
/// conjugate `P M P^{-1}` with positive column sums and entrywise positive
/// square. `Ok(None)` means the grid was exhausted.
pub fn conjugate_search(m: &QMatrix, r: usize) -> Result<Option<ConjugationWitness>, PfError> {
    check_template(m, r)?;
    for a in [2, 4, 8, 16] {
        let a = int(a);
        for e in 1..=20u32 {
            let b = rat(1, 1i64 << e);
            let p = conjugation_matrix(r, &a, &b);
            let pinv = p.inverse().expect("P is unipotent up to scaling");
            let t = similarity(m, &pinv).expect("same dimension");
            if !column_sums_positive(&t) {
                continue;
            }
            let sq = mat_pow(&t, 2);
            if !sq.is_positive() {
                continue;
            }
            let gpf = gpf_check(&t, DEFAULT_K_MAX);
            return Ok(Some(ConjugationWitness {
                c: a.recip(),
                a,
                b,
                conjugated: t,
                checks: ConjugationChecks { column_sums_positive: true, square_positive: true, gpf },
            }));
        }
    }
    Ok(None)
}

/// Random matrices meeting the hypotheses above, for property suites.
pub mod sample {
    use super::*;
    use rand::Rng;

    /// A matrix with at least one negative entry, positive column sums and a
    /// nonnegative irreducible power `T^k`, `k <= k_max`.
    pub fn gpf_matrix<R: Rng>(rng: &mut R, n: usize, k_max: u32) -> (QMatrix, GpfWitness) {
        loop {
            let mut t = QMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    if rng.random_bool(0.7) {
                        t[(i, j)] = int(rng.random_range(1..=9));
                    }
                }
            }
            for _ in 0..rng.random_range(1..=2) {
                let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
                t[(i, j)] = int(-rng.random_range(1..=3));
            }
            if !t.entries().iter().any(|x| x.is_negative()) {
                continue;
            }
            let w = gpf_check(&t, k_max);
            if w.hypotheses_hold() {
                return (t, w);
            }
        }
    }

    /// A nonnegative irreducible matrix with one all-positive row.
    pub fn primitive_matrix<R: Rng>(rng: &mut R, n: usize) -> QMatrix {
        let mut t = QMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if rng.random_bool(0.3) {
                    t[(i, j)] = int(rng.random_range(1..=9));
                }
            }
        }
        // a random n-cycle keeps the support strongly connected
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        for k in 0..n {
            let (i, j) = (perm[k], perm[(k + 1) % n]);
            if t[(i, j)].is_zero() {
                t[(i, j)] = int(rng.random_range(1..=9));
            }
        }
        let row = rng.random_range(0..n);
        for j in 0..n {
            if t[(row, j)].is_zero() {
                t[(row, j)] = int(rng.random_range(1..=9));
            }
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_irreducibility_cases() {
        assert!(is_irreducible(&QMatrix::from_i64(&[&[0, 1], &[1, 0]]).unwrap()));
        assert!(!is_irreducible(&QMatrix::from_i64(&[&[1, 1], &[0, 1]]).unwrap()));
    }

    #[test]
    fn negative_identity_has_no_witness() {
        let w = gpf_check(&QMatrix::identity(3).neg(), 8);
        assert!(!w.column_sums_positive);
        assert_eq!(w.k, None);
    }

    #[test]
    fn cyclic_permutation_is_imprimitive() {
        let m = QMatrix::from_i64(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]).unwrap();
        assert_eq!(primitivity_row_check(&m), Ok(None));
        let neg = QMatrix::from_i64(&[&[0, -1], &[1, 0]]).unwrap();
        assert_eq!(primitivity_row_check(&neg), Err(PfError::NotNonnegative));
        let red = QMatrix::from_i64(&[&[1, 1], &[0, 1]]).unwrap();
        assert_eq!(primitivity_row_check(&red), Err(PfError::NotIrreducible));
    }

    #[test]
    fn identity_is_not_an_operator() {
        assert!(matches!(conjugate_search(&QMatrix::identity(7), 4), Err(PfError::TemplateMismatch(_))));
    }

    #[test]
    fn conjugation_matrix_inverse_form() {
        // P^{-1} = (c-1) E_22 + I - (b/a) sum E_k2
        let a = int(4);
        let b = rat(1, 8);
        let p = conjugation_matrix(3, &a, &b);
        let inv = p.inverse().unwrap();
        assert_eq!(inv[(1, 1)], rat(1, 4));
        assert_eq!(inv[(2, 1)], rat(-1, 32));
        assert_eq!(inv[(0, 0)], int(1));
    }
}
