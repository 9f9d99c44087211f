//! Dense linear algebra over the rationals, plus univariate polynomials.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub const MAX_DIM: usize = 16;

/// Shorthand for `n/d`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Nearest `f64`. Huge numerators and denominators are scaled first so the
/// conversion does not overflow to `inf/inf`.
pub fn to_f64(q: &Rat) -> f64 {
    let n = q.numer();
    let d = q.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    if nb < 1000 && db < 1000 {
        return big_to_f64(n) / big_to_f64(d);
    }
    let shift = nb - db - 60;
    let (num, den) = if shift > 0 {
        (n.clone(), d << (shift as usize))
    } else {
        (n << ((-shift) as usize), d.clone())
    };
    let (quo, _) = num.div_rem(&den);
    big_to_f64(&quo) * libm::exp2(shift as f64)
}

fn big_to_f64(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite `f64`.
pub fn from_f64(x: f64) -> Rat {
    Rat::from_float(x).expect("finite float")
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix dimension {0} outside 1..=16")]
    BadDimension(usize),
    #[error("rows have inconsistent lengths")]
    Ragged,
    #[error("transform is singular")]
    SingularTransform,
    #[error("dimension mismatch ({0} vs {1})")]
    Mismatch(usize, usize),
}

/// Square matrix of rationals, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    n: usize,
    a: Vec<Rat>,
}

impl QMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "dimension {n} out of range");
        QMatrix { n, a: vec![Rat::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self, LinalgError> {
        let n = rows.len();
        if !(1..=MAX_DIM).contains(&n) {
            return Err(LinalgError::BadDimension(n));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(LinalgError::Ragged);
        }
        Ok(QMatrix { n, a: rows.into_iter().flatten().collect() })
    }

    /// Integer rows, mostly for tests and golden data.
    pub fn from_i64(rows: &[&[i64]]) -> Result<Self, LinalgError> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
    }

    /// Rows of `(numerator, denominator)` pairs.
    pub fn from_fracs(rows: &[&[(i64, i64)]]) -> Result<Self, LinalgError> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&(p, q)| rat(p, q)).collect()).collect())
    }

    pub fn diagonal(d: &[Rat]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<Rat>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column_sum(&self, j: usize) -> Rat {
        (0..self.n).map(|i| &self[(i, j)]).sum()
    }

    pub fn trace(&self) -> Rat {
        (0..self.n).map(|i| &self[(i, i)]).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let x = &self[(i, k)];
                if x.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let y = &other[(k, j)];
                    if !y.is_zero() {
                        out[(i, j)] += x * y;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let a = self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect();
        QMatrix { n: self.n, a }
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let a = self.a.iter().zip(&other.a).map(|(x, y)| x - y).collect();
        QMatrix { n: self.n, a }
    }

    pub fn scale(&self, c: &Rat) -> QMatrix {
        QMatrix { n: self.n, a: self.a.iter().map(|x| x * c).collect() }
    }

    pub fn neg(&self) -> QMatrix {
        QMatrix { n: self.n, a: self.a.iter().map(|x| -x).collect() }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.a.iter().all(|x| !x.is_negative())
    }

    pub fn is_positive(&self) -> bool {
        self.a.iter().all(|x| x.is_positive())
    }

    pub fn entries(&self) -> &[Rat] {
        &self.a
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<QMatrix, LinalgError> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[(r, col)].is_zero()).ok_or(LinalgError::SingularTransform)?;
            if piv != col {
                a.swap_rows(piv, col);
                inv.swap_rows(piv, col);
            }
            let p = a[(col, col)].recip();
            for j in 0..n {
                a[(col, j)] *= &p;
                inv[(col, j)] *= &p;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..n {
                    let t = &a[(col, j)] * &f;
                    a[(r, j)] -= t;
                    let t = &inv[(col, j)] * &f;
                    inv[(r, j)] -= t;
                }
            }
        }
        Ok(inv)
    }

    /// Determinant by exact Gaussian elimination.
    pub fn det(&self) -> Rat {
        let n = self.n;
        let mut a = self.clone();
        let mut det = Rat::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[(r, col)].is_zero()) else {
                return Rat::zero();
            };
            if piv != col {
                a.swap_rows(piv, col);
                det = -det;
            }
            let p = a[(col, col)].clone();
            det *= &p;
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let f = &a[(r, col)] / &p;
                for j in col..n {
                    let t = &a[(col, j)] * &f;
                    a[(r, j)] -= t;
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for k in 0..self.n {
            self.a.swap(i * self.n + k, j * self.n + k);
        }
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).iter().map(to_f64).collect()).collect()
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.a[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.a[i * self.n + j]
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.n {
            if i > 0 {
                f.write_str("; ")?;
            }
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
        }
        f.write_str("]")
    }
}

/// `P^{-1} M P`.
pub fn similarity(m: &QMatrix, p: &QMatrix) -> Result<QMatrix, LinalgError> {
    if m.dim() != p.dim() {
        return Err(LinalgError::Mismatch(m.dim(), p.dim()));
    }
    Ok(p.inverse()?.mul(m).mul(p))
}

/// Exact `k`-th power by repeated squaring. `k = 0` gives the identity.
pub fn mat_pow(m: &QMatrix, k: u32) -> QMatrix {
    let mut base = m.clone();
    let mut acc = QMatrix::identity(m.dim());
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base);
        }
        e >>= 1;
        if e > 0 {
            base = base.mul(&base);
        }
    }
    acc
}

/// `det(xI - M)` via Faddeev-LeVerrier. Exact over the rationals, so the
/// division by `k` at each step costs nothing in accuracy.
pub fn char_poly(m: &QMatrix) -> Poly {
    let n = m.dim();
    let mut c = vec![Rat::zero(); n + 1];
    c[n] = Rat::one();
    let mut mk = QMatrix::zeros(n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = m.mul(&mk);
        for i in 0..n {
            next[(i, i)] += &c[n - k + 1];
        }
        let am = m.mul(&next);
        c[n - k] = -am.trace() / int(k as i64);
        mk = next;
    }
    Poly::new(c)
}

/// Dense univariate polynomial with rational coefficients, lowest degree
/// first. The zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    c: Vec<Rat>,
}

impl Poly {
    pub fn new(mut c: Vec<Rat>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| int(x)).collect())
    }

    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { c: vec![Rat::one()] }
    }

    /// `x - a`.
    pub fn linear_root(a: &Rat) -> Self {
        Poly { c: vec![-a.clone(), Rat::one()] }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.c.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn leading(&self) -> Rat {
        self.c.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.leading();
        Poly { c: self.c.iter().map(|x| x / &l).collect() }
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for a in self.c.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    /// Sign of `p(x)` as -1, 0 or 1.
    pub fn sign_at(&self, x: &Rat) -> i32 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    /// Exact evaluation at the Gaussian rational `re + i im`.
    pub fn eval_complex(&self, re: &Rat, im: &Rat) -> (Rat, Rat) {
        let mut ar = Rat::zero();
        let mut ai = Rat::zero();
        for a in self.c.iter().rev() {
            let nr = &ar * re - &ai * im + a;
            let ni = &ar * im + &ai * re;
            ar = nr;
            ai = ni;
        }
        (ar, ai)
    }

    pub fn derivative(&self) -> Poly {
        if self.c.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(self.c.iter().enumerate().skip(1).map(|(k, a)| a * int(k as i64)).collect())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly { c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Rat::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.c.clone();
        let dl = d.leading();
        let dd = d.degree();
        if self.c.len() < d.c.len() {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rat::zero(); self.c.len() - d.c.len() + 1];
        for k in (0..q.len()).rev() {
            let coef = &r[k + dd] / &dl;
            if coef.is_zero() {
                continue;
            }
            for (j, b) in d.c.iter().enumerate() {
                r[k + j] -= &coef * b;
            }
            q[k] = coef;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Squarefree part (monic).
    pub fn squarefree_part(&self) -> Poly {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, a| acc * x + to_f64(a))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let neg = a.is_negative();
            let mag = a.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let unit = mag.is_one();
            match k {
                0 => write!(f, "{mag}")?,
                _ if unit => {}
                _ => write!(f, "{mag}*")?,
            }
            match k {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

/// Yun's squarefree decomposition: pairs `(factor, multiplicity)` with monic,
/// pairwise coprime, squarefree factors whose product (with multiplicities) is
/// the monic version of `p`.
pub fn squarefree_decompose(p: &Poly) -> Vec<(Poly, usize)> {
    assert!(!p.is_zero(), "zero polynomial has no decomposition");
    let f = p.monic();
    let mut out = Vec::new();
    if f.degree() == 0 {
        return out;
    }
    let df = f.derivative();
    let a0 = f.gcd(&df);
    let mut b = f.div_rem(&a0).0;
    let c = df.div_rem(&a0).0;
    let mut d = c.sub(&b.derivative());
    let mut i = 1;
    while b.degree() > 0 {
        let a = b.gcd(&d);
        let nb = b.div_rem(&a).0;
        let nc = d.div_rem(&a).0;
        if a.degree() > 0 {
            out.push((a.monic(), i));
        }
        d = nc.sub(&nb.derivative());
        b = nb;
        i += 1;
    }
    out
}

/// Half-open rational interval `(lo, hi]` holding exactly one real root of a
/// squarefree polynomial. `lo == hi` marks an exactly known rational root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Rat,
    pub hi: Rat,
}

impl RootInterval {
    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn mid_f64(&self) -> f64 {
        to_f64(&self.midpoint())
    }
}

/// Sturm chain of a squarefree polynomial.
#[derive(Clone, Debug)]
pub struct SturmChain {
    seq: Vec<Poly>,
}

impl SturmChain {
    pub fn new(p: &Poly) -> Self {
        let p0 = p.squarefree_part();
        let mut seq = vec![p0.clone()];
        let mut a = p0.clone();
        let mut b = p0.derivative();
        while !b.is_zero() {
            seq.push(b.clone());
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.neg();
        }
        SturmChain { seq }
    }

    pub fn base(&self) -> &Poly {
        &self.seq[0]
    }

    fn variations(&self, x: &Rat) -> usize {
        let mut count = 0;
        let mut last = 0;
        for p in &self.seq {
            let s = p.sign_at(x);
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count(&self, a: &Rat, b: &Rat) -> usize {
        self.variations(a) - self.variations(b)
    }

    /// Cauchy bound: every root satisfies `|x| < bound`.
    pub fn root_bound(&self) -> Rat {
        let p = self.base();
        let l = p.leading().abs();
        let m = p.coeffs().iter().map(|a| a.abs() / &l).max().unwrap_or_else(Rat::zero);
        m + int(1)
    }

    pub fn isolate(&self) -> Vec<RootInterval> {
        if self.base().degree() == 0 {
            return Vec::new();
        }
        let b = self.root_bound();
        let mut out = Vec::new();
        let mut stack = vec![(-b.clone(), b)];
        while let Some((lo, hi)) = stack.pop() {
            match self.count(&lo, &hi) {
                0 => {}
                1 => out.push(RootInterval { lo, hi }),
                _ => {
                    let mid = (&lo + &hi) / int(2);
                    stack.push((mid.clone(), hi));
                    stack.push((lo, mid));
                }
            }
        }
        out.sort_by(|x, y| x.lo.cmp(&y.lo));
        out
    }

    /// Bisect until the width is at most `width` or the root is hit exactly.
    pub fn refine(&self, iv: &RootInterval, width: &Rat) -> RootInterval {
        let mut lo = iv.lo.clone();
        let mut hi = iv.hi.clone();
        let p = self.base();
        while &hi - &lo > *width {
            let mid = (&lo + &hi) / int(2);
            if p.sign_at(&mid) == 0 {
                return RootInterval { lo: mid.clone(), hi: mid };
            }
            if self.count(&lo, &mid) == 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if p.sign_at(&hi) == 0 {
            lo = hi.clone();
        }
        RootInterval { lo, hi }
    }
}

/// Disjoint isolating intervals for the distinct real roots of `p`, sorted
/// increasingly.
pub fn isolate_real_roots(p: &Poly) -> Vec<RootInterval> {
    assert!(!p.is_zero(), "zero polynomial");
    SturmChain::new(p).isolate()
}

/// `isolate_real_roots` followed by refinement to the given width.
pub fn real_roots_to_width(p: &Poly, width: &Rat) -> Vec<RootInterval> {
    let chain = SturmChain::new(p);
    chain.isolate().iter().map(|iv| chain.refine(iv, width)).collect()
}

/// `10^{-digits}` as a rational.
pub fn ten_pow_neg(digits: u32) -> Rat {
    Rat::new(BigInt::one(), num_traits::pow(BigInt::from(10), digits as usize))
}
