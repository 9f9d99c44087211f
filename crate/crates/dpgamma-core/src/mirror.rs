//! Landau-Ginzburg mirrors of the toric del Pezzo surfaces and of weighted
//! projective spaces: conifold points, critical values, and their comparison
//! with the spectrum of `c_1 *`.
//!
//! All Newton iterations run in logarithmic coordinates `z = e^u`, where a
//! monomial `z^b` becomes `e^{<b, u>}`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operator::{builtin_operator, OperatorError};
use crate::real::{bits_for_digits, CReal, Real};
use crate::spectra::{sorted_eigenvalues, SpectraError};
use crate::surface::SurfaceId;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_STARTS: usize = 200;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum MirrorError {
    #[error("{0} is not toric; no mirror potential is available")]
    NoMirrorAvailable(SurfaceId),
    #[error("weights must start with 1 and have at least two entries, all positive")]
    BadWeights,
    #[error("the potential is not proper on the positive orthant")]
    NotProper,
    #[error("found {found} of {expected} critical points")]
    IncompleteEnumeration { found: usize, expected: usize },
    #[error("multistart Newton supports at most 3 variables, got {0}")]
    TooManyVariables(usize),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// Laurent polynomial `sum c_b z^b` in `n` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly {
    n: usize,
    terms: Vec<(Vec<i32>, f64)>,
    /// Number of critical points, when known.
    expected_critical_points: Option<usize>,
}

impl LaurentPoly {
    pub fn new(n: usize) -> Self {
        LaurentPoly { n, terms: Vec::new(), expected_critical_points: None }
    }

    /// Add `c z^b`, merging with an existing monomial.
    pub fn add_term(&mut self, b: &[i32], c: f64) {
        assert_eq!(b.len(), self.n, "exponent length");
        if let Some(t) = self.terms.iter_mut().find(|t| t.0 == b) {
            t.1 += c;
        } else {
            self.terms.push((b.to_vec(), c));
        }
        self.terms.retain(|t| t.1 != 0.0);
        self.terms.sort_by(|a, b| a.0.cmp(&b.0));
    }

    pub fn from_terms(n: usize, terms: &[(&[i32], f64)]) -> Self {
        let mut f = Self::new(n);
        for (b, c) in terms {
            f.add_term(b, *c);
        }
        f
    }

    pub fn with_expected_count(mut self, k: usize) -> Self {
        self.expected_critical_points = Some(k);
        self
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(Vec<i32>, f64)] {
        &self.terms
    }

    pub fn expected_critical_points(&self) -> Option<usize> {
        self.expected_critical_points
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|(b, c)| monomial(b, z) * c).sum()
    }

    /// Value, log-gradient and log-Hessian at `u`.
    fn log_jet(&self, u: &[Complex64]) -> (Complex64, Vec<Complex64>, Vec<Complex64>) {
        let n = self.n;
        let mut v = Complex64::new(0.0, 0.0);
        let mut g = vec![Complex64::new(0.0, 0.0); n];
        let mut h = vec![Complex64::new(0.0, 0.0); n * n];
        for (b, c) in &self.terms {
            let e: Complex64 = b.iter().zip(u).map(|(&bi, ui)| ui * bi as f64).sum();
            let t = e.exp() * c;
            v += t;
            for i in 0..n {
                g[i] += t * b[i] as f64;
                for j in 0..n {
                    h[i * n + j] += t * (b[i] * b[j]) as f64;
                }
            }
        }
        (v, g, h)
    }
}

fn monomial(b: &[i32], z: &[Complex64]) -> Complex64 {
    b.iter().zip(z).fold(Complex64::new(1.0, 0.0), |acc, (&e, zi)| acc * zi.powi(e))
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (b, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if *c != 1.0 {
                write!(f, "{c}*")?;
            }
            let mut num = Vec::new();
            let mut den = Vec::new();
            for (i, &e) in b.iter().enumerate() {
                let name = alloc::format!("z{}", i + 1);
                let s = if e.abs() == 1 { name } else { alloc::format!("{name}^{}", e.abs()) };
                match e {
                    0 => {}
                    e if e > 0 => num.push(s),
                    _ => den.push(s),
                }
            }
            let num = if num.is_empty() { String::from("1") } else { num.join("*") };
            if den.is_empty() {
                f.write_str(&num)?;
            } else if den.len() == 1 {
                write!(f, "{num}/{}", den[0])?;
            } else {
                write!(f, "{num}/({})", den.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Mirror potential of a toric surface.
pub fn builtin_potential(s: SurfaceId) -> Result<LaurentPoly, MirrorError> {
    let f1: [(&[i32], f64); 4] = [(&[1, 0], 1.0), (&[0, 1], 1.0), (&[-1, 0], 1.0), (&[-1, -1], 1.0)];
    let f = match s {
        SurfaceId::P2 => LaurentPoly::from_terms(2, &[(&[1, 0], 1.0), (&[0, 1], 1.0), (&[-1, -1], 1.0)]),
        SurfaceId::P1xP1 => {
            LaurentPoly::from_terms(2, &[(&[1, 0], 1.0), (&[-1, 0], 1.0), (&[0, 1], 1.0), (&[0, -1], 1.0)])
        }
        SurfaceId::X(1) => LaurentPoly::from_terms(2, &f1),
        SurfaceId::X(2) => {
            let mut f = LaurentPoly::from_terms(2, &f1);
            f.add_term(&[0, -1], 1.0);
            f
        }
        SurfaceId::X(3) => {
            let mut f = LaurentPoly::from_terms(2, &f1);
            f.add_term(&[0, -1], 1.0);
            f.add_term(&[1, 1], 1.0);
            f
        }
        other => return Err(MirrorError::NoMirrorAvailable(other)),
    };
    Ok(f.with_expected_count(s.cohomology_rank()))
}

fn check_weights(weights: &[u32]) -> Result<(), MirrorError> {
    if weights.len() < 2 || weights[0] != 1 || weights.contains(&0) {
        Err(MirrorError::BadWeights)
    } else {
        Ok(())
    }
}

/// `x_1 + .. + x_N + 1 / prod x_i^{w_i}` for `P(1, w_1, .., w_N)`; the
/// argument is the full weight vector `(1, w_1, .., w_N)`.
pub fn weighted_potential(weights: &[u32]) -> Result<LaurentPoly, MirrorError> {
    check_weights(weights)?;
    let n = weights.len() - 1;
    let mut f = LaurentPoly::new(n);
    for i in 0..n {
        let mut b = vec![0; n];
        b[i] = 1;
        f.add_term(&b, 1.0);
    }
    let b: Vec<i32> = weights[1..].iter().map(|&w| -(w as i32)).collect();
    f.add_term(&b, 1.0);
    let index: u32 = weights.iter().sum();
    Ok(f.with_expected_count(index as usize))
}

fn solve_complex(a: &mut [Complex64], b: &mut [Complex64], n: usize) -> Option<()> {
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].norm().partial_cmp(&a[j * n + col].norm()).unwrap())?;
        if a[piv * n + col].norm() < 1e-300 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            b.swap(piv, col);
        }
        for i in col + 1..n {
            let f = a[i * n + col] / a[col * n + col];
            for k in col..n {
                let t = a[col * n + k];
                a[i * n + k] -= f * t;
            }
            let t = b[col];
            b[i] -= f * t;
        }
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= a[i * n + k] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    Some(())
}

fn solve_real(a: &mut [Real], b: &mut [Real], n: usize) -> Option<()> {
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().partial_cmp(&a[j * n + col].abs()).unwrap())?;
        if a[piv * n + col].is_zero() {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            b.swap(piv, col);
        }
        for i in col + 1..n {
            let f = &a[i * n + col] / &a[col * n + col];
            for k in col..n {
                let t = &f * &a[col * n + k];
                a[i * n + k] = &a[i * n + k] - &t;
            }
            let t = &f * &b[col];
            b[i] = &b[i] - &t;
        }
    }
    for i in (0..n).rev() {
        let mut s = b[i].clone();
        for k in i + 1..n {
            s = s - &a[i * n + k] * &b[k];
        }
        b[i] = &s / &a[i * n + i];
    }
    Some(())
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConifoldReport {
    pub z_con: Vec<Real>,
    pub t_con: Real,
    /// Max-norm of the log-gradient at `z_con`.
    pub gradient_norm: f64,
    pub hessian_positive: bool,
    pub certified: bool,
}

fn det3(a: [i64; 3], b: [i64; 3], c: [i64; 3]) -> i64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// Whether the origin lies in the interior of the Newton polytope, which is
/// what makes `u -> f(e^u)` proper. Every hyperplane through `n` exponent
/// vectors with all of them on one side must have the origin strictly on
/// that side, and at least one such hyperplane must exist per direction
/// (full dimension).
fn origin_interior(f: &LaurentPoly) -> bool {
    let n = f.nvars();
    if n == 0 || n > 3 {
        return n == 0;
    }
    let pts: Vec<[i64; 3]> = f
        .terms
        .iter()
        .map(|(b, _)| {
            let mut v = [0i64; 3];
            for (i, &x) in b.iter().enumerate() {
                v[i] = x as i64;
            }
            v
        })
        .collect();
    // lift to 3 dimensions: unused coordinates are spanned by unit vectors
    let mut pts3 = pts.clone();
    let mut extra: Vec<[i64; 3]> = Vec::new();
    for k in n..3 {
        let mut e = [0i64; 3];
        e[k] = 1;
        extra.push(e);
        let mut e2 = [0i64; 3];
        e2[k] = -1;
        extra.push(e2);
    }
    pts3.extend(extra);
    let m = pts3.len();
    let mut facets = 0;
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let (a, b, c) = (pts3[i], pts3[j], pts3[k]);
                let ab = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                let ac = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
                let nrm = [ab[1] * ac[2] - ab[2] * ac[1], ab[2] * ac[0] - ab[0] * ac[2], ab[0] * ac[1] - ab[1] * ac[0]];
                if nrm == [0, 0, 0] {
                    continue;
                }
                let side = |p: &[i64; 3]| nrm[0] * (p[0] - a[0]) + nrm[1] * (p[1] - a[1]) + nrm[2] * (p[2] - a[2]);
                let all_le = pts3.iter().all(|p| side(p) <= 0);
                let all_ge = pts3.iter().all(|p| side(p) >= 0);
                if !(all_le || all_ge) {
                    continue;
                }
                facets += 1;
                let o = side(&[0, 0, 0]);
                if o == 0 || (all_le && o > 0) || (all_ge && o < 0) {
                    return false;
                }
            }
        }
    }
    facets > 0 && full_rank(&pts3)
}

fn full_rank(pts: &[[i64; 3]]) -> bool {
    let m = pts.len();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                if det3(pts[i], pts[j], pts[k]) != 0 {
                    return true;
                }
            }
        }
    }
    false
}

/// Cholesky test of a symmetric matrix.
fn positive_definite(h: &[f64], n: usize) -> bool {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
            if i == j {
                let d = h[i * n + i] - s;
                if d <= 0.0 {
                    return false;
                }
                l[i * n + i] = libm::sqrt(d);
            } else {
                l[i * n + j] = (h[i * n + j] - s) / l[j * n + j];
            }
        }
    }
    true
}

/// Minimum of `f` on the positive orthant, by Newton on the strictly convex
/// function `u -> f(e^u)` started at `u = 0` and polished at `digits`
/// decimal digits.
pub fn conifold_point(f: &LaurentPoly, tol: f64, digits: u32) -> Result<ConifoldReport, MirrorError> {
    let n = f.nvars();
    if f.terms.iter().any(|t| t.1 <= 0.0) || !origin_interior(f) {
        return Err(MirrorError::NotProper);
    }
    let mut u = vec![Complex64::new(0.0, 0.0); n];
    let mut converged = false;
    for _ in 0..200 {
        let (v, mut g, mut h) = f.log_jet(&u);
        if max_norm(&g) <= 1e-14 * v.norm().max(1.0) {
            converged = true;
            break;
        }
        let gn = max_norm(&g);
        if solve_complex(&mut h, &mut g, n).is_none() {
            return Err(MirrorError::NotProper);
        }
        // damped step keeps the iterate bounded on the convex function
        let step = max_norm(&g);
        let scale = if step > 1.0 { 1.0 / step } else { 1.0 };
        for i in 0..n {
            u[i] -= g[i] * scale;
        }
        if u.iter().any(|x| x.re.abs() > 60.0) || !gn.is_finite() {
            return Err(MirrorError::NotProper);
        }
    }
    if !converged {
        return Err(MirrorError::NotProper);
    }
    // high-precision polish
    let p = bits_for_digits(digits);
    let mut ur: Vec<Real> = u.iter().map(|x| Real::from_f64(x.re, p)).collect();
    let coeffs: Vec<Real> = f.terms.iter().map(|t| Real::from_f64(t.1, p)).collect();
    let jet = |ur: &[Real]| {
        let mut v = Real::zero(p);
        let mut g = vec![Real::zero(p); n];
        let mut h = vec![Real::zero(p); n * n];
        for ((b, _), c) in f.terms.iter().zip(&coeffs) {
            let mut e = Real::zero(p);
            for (bi, ui) in b.iter().zip(ur) {
                e = e + Real::from_i64(*bi as i64, p) * ui;
            }
            let t = e.exp() * c;
            v = v + &t;
            for i in 0..n {
                g[i] = &g[i] + &(&t * &Real::from_i64(b[i] as i64, p));
                for j in 0..n {
                    h[i * n + j] = &h[i * n + j] + &(&t * &Real::from_i64((b[i] * b[j]) as i64, p));
                }
            }
        }
        (v, g, h)
    };
    let iterations = 3 + (digits as f64 / 15.0).log2().ceil().max(0.0) as usize;
    for _ in 0..iterations {
        let (_, mut g, mut h) = jet(&ur);
        if solve_real(&mut h, &mut g, n).is_none() {
            return Err(MirrorError::NotProper);
        }
        for i in 0..n {
            ur[i] = &ur[i] - &g[i];
        }
    }
    let (t_con, g, h) = jet(&ur);
    let gradient_norm = g.iter().map(|x| x.abs().to_f64()).fold(0.0, f64::max);
    let hf: Vec<f64> = h.iter().map(|x| x.to_f64()).collect();
    let hessian_positive = positive_definite(&hf, n);
    let z_con = ur.iter().map(|x| x.exp()).collect();
    Ok(ConifoldReport {
        z_con,
        certified: gradient_norm <= tol && hessian_positive && t_con.is_positive(),
        t_con,
        gradient_norm,
        hessian_positive,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPoint {
    pub z: Vec<Complex64>,
    pub value: Complex64,
    /// Max-norm of the log-gradient after polishing.
    pub residual: f64,
}

fn newton_critical(f: &LaurentPoly, mut u: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = f.nvars();
    for _ in 0..120 {
        let (v, mut g, mut h) = f.log_jet(&u);
        let gn = max_norm(&g);
        if !gn.is_finite() {
            return None;
        }
        if gn <= 1e-15 * v.norm().max(1.0) {
            return Some(u);
        }
        solve_complex(&mut h, &mut g, n)?;
        let step = max_norm(&g);
        let scale = if step > 1.0 { 1.0 / step } else { 1.0 };
        for i in 0..n {
            u[i] -= g[i] * scale;
        }
        if u.iter().any(|x| x.re.abs() > 40.0) {
            return None;
        }
    }
    let (v, g, _) = f.log_jet(&u);
    (max_norm(&g) <= 1e-10 * v.norm().max(1.0)).then_some(u)
}

/// Critical points of `f` by multistart Newton from `DEFAULT_STARTS` seeded
/// random starts, deduplicated to `10 tol` in the max-norm on points and
/// sorted by value. Errors when fewer than the expected number are found.
pub fn critical_points(f: &LaurentPoly, seed: u64, tol: f64) -> Result<Vec<CriticalPoint>, MirrorError> {
    let n = f.nvars();
    if n > 3 {
        return Err(MirrorError::TooManyVariables(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<CriticalPoint> = Vec::new();
    let expected = f.expected_critical_points();
    let mut starts = 0;
    while starts < DEFAULT_STARTS || (expected.is_some_and(|e| found.len() < e) && starts < 20 * DEFAULT_STARTS) {
        starts += 1;
        let u0: Vec<Complex64> = (0..n)
            .map(|_| {
                Complex64::new(
                    rng.random_range(-1.5..1.5),
                    rng.random_range(-core::f64::consts::PI..core::f64::consts::PI),
                )
            })
            .collect();
        let Some(u) = newton_critical(f, u0) else { continue };
        let z: Vec<Complex64> = u.iter().map(|x| x.exp()).collect();
        if found.iter().any(|c| c.z.iter().zip(&z).all(|(a, b)| (a - b).norm() <= 10.0 * tol)) {
            continue;
        }
        let (v, g, _) = f.log_jet(&u);
        found.push(CriticalPoint { value: v, residual: max_norm(&g), z });
    }
    found.sort_by(|a, b| {
        a.value
            .re
            .partial_cmp(&b.value.re)
            .unwrap()
            .then(a.value.im.partial_cmp(&b.value.im).unwrap())
            .then_with(|| {
                let ka: Vec<(f64, f64)> = a.z.iter().map(|x| (x.re, x.im)).collect();
                let kb: Vec<(f64, f64)> = b.z.iter().map(|x| (x.re, x.im)).collect();
                ka.partial_cmp(&kb).unwrap()
            })
    });
    if let Some(e) = expected {
        if found.len() < e {
            return Err(MirrorError::IncompleteEnumeration { found: found.len(), expected: e });
        }
    }
    Ok(found)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WpsClosedForm {
    pub weights: Vec<u32>,
    /// Fano index `r_X = sum w_i`.
    pub index: u32,
    pub c: Real,
    /// `p_k`, `k = 0 .. r_X - 1`, one coordinate per `w_1..w_N`.
    pub points: Vec<Vec<CReal>>,
    /// `f(p_k) = c xi^k`.
    pub values: Vec<CReal>,
}

/// Critical points of the weighted potential in closed form:
/// `p_k = (w_1 q xi^k, .., w_N q xi^k)` with `q = (prod w_i^{-w_i})^{1/r_X}`
/// and `xi = e^{2 pi i / r_X}`, so that `c = f(p_0) = r_X q`.
pub fn wps_closed_form(weights: &[u32], digits: u32) -> Result<WpsClosedForm, MirrorError> {
    check_weights(weights)?;
    let p = bits_for_digits(digits);
    let index: u32 = weights.iter().sum();
    let rx = Real::from_i64(index as i64, p);
    let mut log_prod = Real::zero(p);
    for &w in weights {
        if w > 1 {
            let wr = Real::from_i64(w as i64, p);
            log_prod = log_prod + &wr * &wr.ln();
        }
    }
    let q = (-(&log_prod / &rx)).exp();
    let c = &rx * &q;
    let two_pi = Real::pi(p) * Real::from_i64(2, p);
    let mut points = Vec::new();
    let mut values = Vec::new();
    for k in 0..index {
        let xi = CReal::cis(&(&two_pi * &Real::from_i64(k as i64, p) / &rx));
        let qk = xi.scale(&q);
        points.push(weights[1..].iter().map(|&w| qk.scale(&Real::from_i64(w as i64, p))).collect());
        values.push(xi.scale(&c));
    }
    Ok(WpsClosedForm { weights: weights.to_vec(), index, c, points, values })
}

impl WpsClosedForm {
    /// `f(p_0)` evaluated term by term at full precision.
    pub fn value_at_p0(&self) -> Real {
        let p0: Vec<Real> = self.points[0].iter().map(|z| z.re.clone()).collect();
        let mut sum = p0.iter().fold(Real::zero(self.c.precision()), |acc, x| acc + x);
        let mut prod = Real::one(self.c.precision());
        for (x, &w) in p0.iter().zip(&self.weights[1..]) {
            prod = prod * x.powi(w);
        }
        sum = sum + &(Real::one(self.c.precision()) / prod);
        sum
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BModelOReport {
    pub critical_values: Vec<Complex64>,
    pub t_con: f64,
    /// Every critical value has `|u| <= T_con + tol`.
    pub cond1: bool,
    /// Exactly one critical point has value within `tol` of `T_con`, and it
    /// is the conifold point.
    pub cond2: bool,
    pub conifold: ConifoldReport,
    pub complete: bool,
}

impl BModelOReport {
    pub fn holds(&self) -> bool {
        self.cond1 && self.cond2 && self.conifold.certified
    }
}

pub fn bmodel_o_check(f: &LaurentPoly, seed: u64, tol: f64) -> Result<BModelOReport, MirrorError> {
    let con = conifold_point(f, tol, 40)?;
    let pts = critical_points(f, seed, tol)?;
    let t = con.t_con.to_f64();
    let cond1 = pts.iter().all(|c| c.value.norm() <= t + tol);
    let zc: Vec<f64> = con.z_con.iter().map(|x| x.to_f64()).collect();
    let at_t: Vec<&CriticalPoint> = pts.iter().filter(|c| (c.value - t).norm() <= tol).collect();
    let cond2 = at_t.len() == 1 && at_t[0].z.iter().zip(&zc).all(|(a, b)| (a - b).norm() <= 10.0 * tol.max(1e-12));
    let complete = f.expected_critical_points().map_or(true, |e| e == pts.len());
    Ok(BModelOReport {
        critical_values: pts.iter().map(|c| c.value).collect(),
        t_con: t,
        cond1,
        cond2,
        conifold: con,
        complete,
    })
}

/// Matching of two equally long lists of complex numbers minimising the
/// largest distance. Returns the permutation (`a[i]` goes with
/// `b[perm[i]]`) and that distance.
pub fn bottleneck_matching(a: &[Complex64], b: &[Complex64]) -> Option<(Vec<usize>, f64)> {
    let n = a.len();
    if n != b.len() || n > 16 {
        return None;
    }
    let full = 1usize << n;
    // best[mask] = smallest max-distance matching a[0..popcount(mask)] into mask
    let mut best = vec![f64::INFINITY; full];
    let mut choice = vec![usize::MAX; full];
    best[0] = 0.0;
    for mask in 0..full {
        if best[mask].is_infinite() {
            continue;
        }
        let i = mask.count_ones() as usize;
        if i == n {
            continue;
        }
        for j in 0..n {
            if mask & (1 << j) == 0 {
                let next = mask | (1 << j);
                let cost = best[mask].max((a[i] - b[j]).norm());
                if cost < best[next] {
                    best[next] = cost;
                    choice[next] = j;
                }
            }
        }
    }
    let mut perm = vec![0; n];
    let mut mask = full - 1;
    for i in (0..n).rev() {
        let j = choice[mask];
        perm[i] = j;
        mask &= !(1 << j);
    }
    Some((perm, best[full - 1]))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumMatch {
    pub eigenvalues: Vec<Complex64>,
    pub critical_values: Vec<Complex64>,
    /// `critical_values[permutation[i]]` is matched with `eigenvalues[i]`.
    pub permutation: Vec<usize>,
    pub max_deviation: f64,
    pub matched: bool,
}

/// Compare the spectrum of `c_1 *` with the critical values of the mirror.
pub fn mirror_spectrum_match(s: SurfaceId, seed: u64, tol: f64) -> Result<SpectrumMatch, MirrorError> {
    let f = builtin_potential(s)?;
    let m = builtin_operator(s)?;
    let eig = sorted_eigenvalues(&m, (tol * 1e-3).max(1e-14))?;
    let cv: Vec<Complex64> = critical_points(&f, seed, tol * 1e-3)?.iter().map(|c| c.value).collect();
    let (perm, dev) = match bottleneck_matching(&eig, &cv) {
        Some(x) => x,
        None => {
            return Ok(SpectrumMatch {
                eigenvalues: eig,
                critical_values: cv,
                permutation: Vec::new(),
                max_deviation: f64::INFINITY,
                matched: false,
            })
        }
    };
    Ok(SpectrumMatch { eigenvalues: eig, critical_values: cv, permutation: perm, matched: dev <= tol, max_deviation: dev })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn display_potentials() {
        assert_eq!(builtin_potential(SurfaceId::X(1)).unwrap().to_string(), "1/(z1*z2) + 1/z1 + z2 + z1");
        assert_eq!(weighted_potential(&[1, 1, 1]).unwrap().to_string(), "1/(z1*z2) + z2 + z1");
    }

    #[test]
    fn bad_weights() {
        assert_eq!(weighted_potential(&[2, 1]), Err(MirrorError::BadWeights));
        assert_eq!(weighted_potential(&[1]), Err(MirrorError::BadWeights));
    }

    #[test]
    fn one_variable() {
        let f = LaurentPoly::from_terms(1, &[(&[1], 1.0), (&[-1], 1.0)]).with_expected_count(2);
        let c = conifold_point(&f, 1e-12, 30).unwrap();
        assert!(c.certified);
        assert!((c.t_con.to_f64() - 2.0).abs() < 1e-25);
        let r = bmodel_o_check(&f, 7, 1e-9).unwrap();
        assert!(r.holds());
        let mut v: Vec<f64> = r.critical_values.iter().map(|z| z.re).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((v[0] + 2.0).abs() < 1e-12 && (v[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn not_proper() {
        let f = LaurentPoly::from_terms(1, &[(&[1], 1.0)]);
        assert_eq!(conifold_point(&f, 1e-9, 30), Err(MirrorError::NotProper));
    }

    #[test]
    fn bottleneck() {
        let a = [Complex64::new(0.0, 0.0), Complex64::new(5.0, 0.0)];
        let b = [Complex64::new(5.1, 0.0), Complex64::new(0.2, 0.0)];
        let (perm, d) = bottleneck_matching(&a, &b).unwrap();
        assert_eq!(perm, [1, 0]);
        assert!((d - 0.2).abs() < 1e-12);
    }
}
