//! Eigenvalues of rational matrices and Property O certificates.
//!
//! Real eigenvalues and all multiplicities come from exact polynomial
//! arithmetic. Non-real eigenvalues are found in `f64` by Aberth iteration on
//! each squarefree factor and then certified: for a point `z`, the disc of
//! radius `deg(q) |q(z)/q'(z)|` contains a root of `q`, and `q(z)`, `q'(z)`
//! are evaluated exactly at the rational value of `z`.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{Signed, Zero};

use crate::linalg::{char_poly, from_f64, squarefree_decompose, to_f64, Poly, QMatrix, RootInterval, SturmChain};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SpectraError {
    #[error("tolerance must be positive and finite")]
    BadTolerance,
    #[error("could not certify the non-real roots of a degree-{degree} factor to {tol:e}")]
    ConvergenceFailure { degree: usize, tol: f64 },
    #[error("eigenvalue {re}+{im}i has modulus within {tol:e} of rho but lambda^s != rho^s; shrink the tolerance")]
    Inconclusive { re: f64, im: f64, tol: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    /// Certified distance bound to the true eigenvalue.
    pub error_bound: f64,
    /// Exact isolating interval for real eigenvalues.
    pub interval: Option<RootInterval>,
}

impl Eigenvalue {
    pub fn modulus(&self) -> f64 {
        libm::hypot(self.re, self.im)
    }

    pub fn is_real(&self) -> bool {
        self.interval.is_some()
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    pub char_poly: Poly,
    /// Distinct eigenvalues, largest modulus first.
    pub eigenvalues: Vec<Eigenvalue>,
    pub rho: f64,
    pub rho_is_eigenvalue: bool,
    pub rho_multiplicity: usize,
    pub rho_interval: Option<RootInterval>,
}

impl SpectrumReport {
    /// Eigenvalues repeated according to multiplicity.
    pub fn with_multiplicity(&self) -> Vec<Complex64> {
        self.eigenvalues
            .iter()
            .flat_map(|e| core::iter::repeat_n(e.as_complex(), e.multiplicity))
            .collect()
    }

    pub fn dimension(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.multiplicity).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyOCertificate {
    pub holds: bool,
    pub rho: f64,
    pub rho_is_eigenvalue: bool,
    pub rho_simple: bool,
    pub modulus_rho_eigenvalues: Vec<Complex64>,
    pub fano_index: u32,
    pub part2_holds: bool,
    pub tol: f64,
}

fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All complex roots of a polynomial with `f64` coefficients (lowest degree
/// first, nonzero leading coefficient) by Aberth-Ehrlich iteration followed
/// by a few Newton polishing steps.
pub fn aberth_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n];
    let c: Vec<f64> = coeffs.iter().map(|a| a / lead).collect();
    // Fujiwara bound
    let mut bound: f64 = 0.0;
    for (k, a) in c.iter().enumerate().take(n) {
        let e = 1.0 / (n - k) as f64;
        let term = if k == 0 { libm::pow(a.abs() / 2.0, e) } else { libm::pow(a.abs(), e) };
        bound = bound.max(term);
    }
    let radius = (2.0 * bound).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let th = 2.0 * core::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius * (0.5 + 0.5 * (k + 1) as f64 / n as f64), th)
        })
        .collect();
    for _ in 0..800 {
        let mut biggest: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = horner(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 0.0 {
                        s += d.inv();
                    }
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                biggest = biggest.max(w.norm() / z[i].norm().max(1e-300));
            }
        }
        if biggest < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(&c, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() {
                break;
            }
            *zi -= step;
        }
    }
    z
}

/// Certified radius `deg |q(z)| / |q'(z)|`, computed exactly and rounded up
/// to `f64`. Returns `None` when `q'(z) = 0`.
fn certified_radius(q: &Poly, z: Complex64) -> Option<f64> {
    let re = from_f64(z.re);
    let im = from_f64(z.im);
    let (pr, pi) = q.eval_complex(&re, &im);
    let (dr, di) = q.derivative().eval_complex(&re, &im);
    let den = &dr * &dr + &di * &di;
    if den.is_zero() {
        return None;
    }
    let num = &pr * &pr + &pi * &pi;
    let ratio2 = to_f64(&(num / den));
    let n = q.degree() as f64;
    Some(n * libm::sqrt(ratio2) * (1.0 + 1e-12) + f64::MIN_POSITIVE)
}

/// Roots of one squarefree factor: exact real roots, certified complex ones.
fn factor_roots(q: &Poly, tol: f64) -> Result<Vec<(Complex64, f64, Option<RootInterval>)>, SpectraError> {
    let chain = SturmChain::new(q);
    let width = from_f64(tol / 4.0);
    let reals: Vec<RootInterval> = chain.isolate().iter().map(|iv| chain.refine(iv, &width)).collect();
    let deg = q.degree();
    let mut out: Vec<(Complex64, f64, Option<RootInterval>)> = reals
        .iter()
        .map(|iv| {
            let half = to_f64(&iv.width()) / 2.0;
            (Complex64::new(iv.mid_f64(), 0.0), half, Some(iv.clone()))
        })
        .collect();
    let n_complex = deg - reals.len();
    if n_complex == 0 {
        return Ok(out);
    }
    let fail = SpectraError::ConvergenceFailure { degree: deg, tol };
    let coeffs: Vec<f64> = q.coeffs().iter().map(to_f64).collect();
    let mut roots = aberth_roots(&coeffs);
    roots.sort_by(|a, b| b.im.partial_cmp(&a.im).unwrap_or(core::cmp::Ordering::Equal));
    let upper: Vec<Complex64> = roots.into_iter().take(n_complex / 2).collect();
    let mut discs = Vec::new();
    for z in upper {
        let rad = certified_radius(q, z).ok_or(fail.clone())?;
        if !(rad <= tol) || z.im <= rad {
            return Err(fail);
        }
        discs.push((z, rad));
    }
    for i in 0..discs.len() {
        for j in i + 1..discs.len() {
            if (discs[i].0 - discs[j].0).norm() <= discs[i].1 + discs[j].1 {
                return Err(fail);
            }
        }
    }
    for (z, rad) in discs {
        out.push((z, rad, None));
        out.push((z.conj(), rad, None));
    }
    Ok(out)
}

/// Spectrum of `m` with exact multiplicities.
pub fn spectrum(m: &QMatrix, tol: f64) -> Result<SpectrumReport, SpectraError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(SpectraError::BadTolerance);
    }
    let p = char_poly(m);
    let mut eigenvalues = Vec::new();
    for (q, mult) in squarefree_decompose(&p) {
        for (z, err, iv) in factor_roots(&q, tol)? {
            eigenvalues.push(Eigenvalue { re: z.re, im: z.im, multiplicity: mult, error_bound: err, interval: iv });
        }
    }
    eigenvalues.sort_by(|a, b| {
        b.modulus()
            .partial_cmp(&a.modulus())
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(b.re.partial_cmp(&a.re).unwrap_or(core::cmp::Ordering::Equal))
            .then(b.im.partial_cmp(&a.im).unwrap_or(core::cmp::Ordering::Equal))
    });
    let max_mod = eigenvalues.iter().map(|e| e.modulus()).fold(0.0, f64::max);
    // largest real eigenvalue, compared exactly through its interval
    let top_real = eigenvalues
        .iter()
        .filter_map(|e| e.interval.as_ref().map(|iv| (e, iv)))
        .max_by(|a, b| a.1.lo.cmp(&b.1.lo));
    let (rho, is_eig, mult, interval) = match top_real {
        Some((e, iv)) if iv.hi.is_positive() && max_mod <= e.re + tol => (e.re, true, e.multiplicity, Some(iv.clone())),
        _ => (max_mod, false, 0, None),
    };
    Ok(SpectrumReport {
        char_poly: p,
        eigenvalues,
        rho,
        rho_is_eigenvalue: is_eig,
        rho_multiplicity: mult,
        rho_interval: interval,
    })
}

fn cpow(z: Complex64, s: u32) -> Complex64 {
    (0..s).fold(Complex64::new(1.0, 0.0), |acc, _| acc * z)
}

/// Property O for an operator of a Fano surface with index `fano_index`.
pub fn property_o_certificate(m: &QMatrix, fano_index: u32, tol: f64) -> Result<PropertyOCertificate, SpectraError> {
    let spec = spectrum(m, tol)?;
    certificate_from_spectrum(&spec, fano_index, tol)
}

pub fn certificate_from_spectrum(
    spec: &SpectrumReport,
    fano_index: u32,
    tol: f64,
) -> Result<PropertyOCertificate, SpectraError> {
    let rho = spec.rho;
    let rho_s = cpow(Complex64::new(rho, 0.0), fano_index);
    let mut on_circle = Vec::new();
    let mut part2 = true;
    for e in &spec.eigenvalues {
        if (e.modulus() - rho).abs() > tol {
            continue;
        }
        let z = e.as_complex();
        let ok = (cpow(z, fano_index) - rho_s).norm() <= tol * rho_s.norm().max(1.0);
        if !ok {
            if spec.rho_is_eigenvalue {
                return Err(SpectraError::Inconclusive { re: e.re, im: e.im, tol });
            }
            part2 = false;
        }
        on_circle.extend(core::iter::repeat_n(z, e.multiplicity));
    }
    let rho_simple = spec.rho_multiplicity == 1;
    Ok(PropertyOCertificate {
        holds: spec.rho_is_eigenvalue && rho_simple && part2,
        rho,
        rho_is_eigenvalue: spec.rho_is_eigenvalue,
        rho_simple,
        modulus_rho_eigenvalues: on_circle,
        fano_index,
        part2_holds: part2,
        tol,
    })
}

/// Eigenvalues of `m` as a flat list (with multiplicity), sorted by real then
/// imaginary part. Convenience for comparisons.
pub fn sorted_eigenvalues(m: &QMatrix, tol: f64) -> Result<Vec<Complex64>, SpectraError> {
    let mut v = spectrum(m, tol)?.with_multiplicity();
    v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projective_line() {
        let m = QMatrix::from_i64(&[&[0, 2], &[2, 0]]).unwrap();
        let s = spectrum(&m, 1e-9).unwrap();
        assert_eq!(s.rho_multiplicity, 1);
        assert!((s.rho - 2.0).abs() < 1e-9);
        assert_eq!(s.eigenvalues.len(), 2);
        let c = property_o_certificate(&m, 2, 1e-9).unwrap();
        assert!(c.holds);
        assert_eq!(c.modulus_rho_eigenvalues.len(), 2);
        // with s = 1 the eigenvalue -2 is a genuine obstruction
        assert!(matches!(property_o_certificate(&m, 1, 1e-9), Err(SpectraError::Inconclusive { .. })));
    }

    #[test]
    fn diagonal_spectrum() {
        let m = QMatrix::from_i64(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 3]]).unwrap();
        let s = spectrum(&m, 1e-9).unwrap();
        assert!((s.rho - 3.0).abs() < 1e-9);
        assert_eq!(s.eigenvalues.len(), 3);
        assert!(s.eigenvalues.iter().all(|e| e.is_real() && e.multiplicity == 1));
    }

    #[test]
    fn jordan_block_fails() {
        let m = QMatrix::from_i64(&[&[1, 1], &[0, 1]]).unwrap();
        let c = property_o_certificate(&m, 1, 1e-9).unwrap();
        assert!(!c.holds);
        assert!(!c.rho_simple);
        assert!(c.part2_holds);
    }

    #[test]
    fn rotation_has_no_real_rho() {
        let m = QMatrix::from_i64(&[&[0, -1], &[1, 0]]).unwrap();
        let s = spectrum(&m, 1e-9).unwrap();
        assert!(!s.rho_is_eigenvalue);
        assert!((s.rho - 1.0).abs() < 1e-12);
        let c = certificate_from_spectrum(&s, 1, 1e-9).unwrap();
        assert!(!c.holds);
    }

    #[test]
    fn cyclic_permutation() {
        let m = QMatrix::from_i64(&[&[0, 0, 3], &[3, 0, 0], &[0, 3, 0]]).unwrap();
        let c = property_o_certificate(&m, 3, 1e-9).unwrap();
        assert!(c.holds);
        assert_eq!(c.modulus_rho_eigenvalues.len(), 3);
    }

    #[test]
    fn bad_tolerance() {
        let m = QMatrix::identity(2);
        assert_eq!(spectrum(&m, 0.0), Err(SpectraError::BadTolerance));
    }

    #[test]
    fn aberth_quartic() {
        // (x^2 + 1)(x - 2)(x + 3)
        let r = aberth_roots(&[-6.0, 1.0, -5.0, 1.0, 1.0]);
        let mut re: Vec<_> = r.iter().map(|z| (z.re * 1e6).round() / 1e6).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(re, [-3.0, 0.0, 0.0, 2.0]);
    }
}
