//! Hypergeometric J-series of complete intersections in products of
//! (weighted) projective spaces, and the numerical Gamma-limit test.
//!
//! For a complete intersection `Y` cut out by divisors `D_j = sum_i a_ji h_i`
//! the ambient expression of the J-function along `c_1(Y) log t` is
//!
//! ```text
//! J(t) = e^{c_1 log t - C_0 t} sum_d t^{c_1 . d}
//!        prod_j prod_{k=1}^{D_j.d} (D_j + k) / prod_i prod_{w} prod_{k=1}^{w d_i} (w h_i + k)
//! ```
//!
//! where `C_0` is the scalar part of the `t^1` coefficient (zero unless the
//! Fano index is one). Only integral degrees enter, so for weighted factors
//! this is the untwisted part. The primitive part of `J` is assumed to vanish:
//! all arithmetic happens in the ambient ring truncated above degree two,
//! which is all a surface (or the `h^{<=2}` part of a weighted 3-fold) sees.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::gamma::log_gamma_coefficients;
use crate::linalg::{int, Rat};
use crate::real::{bits_for_digits, Real};
use crate::surface::SurfaceId;

pub const DEFAULT_DIGITS: u32 = 60;
pub const DEFAULT_TERMS: usize = 600;
pub const DEFAULT_GRID: [f64; 5] = [10.0, 15.0, 20.0, 25.0, 30.0];
pub const DISPERSION_THRESHOLD: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum JError {
    #[error("no Lefschetz model for {0}")]
    UnsupportedModel(String),
    #[error("t must be positive and the grid increasing")]
    BadGrid,
    #[error("at t = {t} the series has not converged within {budget} terms")]
    TermBudgetExceeded { t: f64, budget: usize },
    #[error("at t = {t} the requested accuracy is out of reach at {digits} digits")]
    PrecisionExhausted { t: f64, digits: u32 },
}

/// Field operations needed by the truncated ring, for exact and
/// high-precision coefficients.
pub trait Coef: Clone {
    fn zero_like(&self) -> Self;
    fn unit(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn mul_int(&self, k: i64) -> Self;
    fn div_int(&self, k: i64) -> Self;
    fn is_zero(&self) -> bool;
}

impl Coef for Rat {
    fn zero_like(&self) -> Self {
        Rat::zero()
    }
    fn unit(&self) -> Self {
        Rat::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn mul_int(&self, k: i64) -> Self {
        self * int(k)
    }
    fn div_int(&self, k: i64) -> Self {
        self / int(k)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Coef for Real {
    fn zero_like(&self) -> Self {
        Real::zero(self.precision())
    }
    fn unit(&self) -> Self {
        Real::one(self.precision())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn mul_int(&self, k: i64) -> Self {
        self * &Real::from_i64(k, self.precision())
    }
    fn div_int(&self, k: i64) -> Self {
        self / &Real::from_i64(k, self.precision())
    }
    fn is_zero(&self) -> bool {
        Real::is_zero(self)
    }
}

/// `Q[h_1..h_m] / (h_i^{n_i + 1}, deg > 2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ring {
    ns: Vec<u32>,
    monos: Vec<Vec<u32>>,
    /// For each monomial `g`, the pairs `(b, i)` with `b * h_i = g`.
    preds: Vec<Vec<(usize, usize)>>,
    /// `prod[a][b]`, the index of `a * b` if it survives.
    prod: Vec<Vec<Option<usize>>>,
}

impl Ring {
    pub fn new(ns: &[u32]) -> Self {
        let m = ns.len();
        let mut monos = vec![vec![0; m]];
        for i in 0..m {
            let mut e = vec![0; m];
            e[i] = 1;
            monos.push(e);
        }
        for i in 0..m {
            for j in i..m {
                let mut e = vec![0; m];
                e[i] += 1;
                e[j] += 1;
                if (0..m).all(|k| e[k] <= ns[k]) {
                    monos.push(e);
                }
            }
        }
        let find = |e: &[u32]| monos.iter().position(|x| x == e);
        let mut preds = vec![Vec::new(); monos.len()];
        for (b, eb) in monos.iter().enumerate() {
            for i in 0..m {
                let mut e = eb.clone();
                e[i] += 1;
                if let Some(g) = find(&e) {
                    preds[g].push((b, i));
                }
            }
        }
        let prod = monos
            .iter()
            .map(|a| {
                monos
                    .iter()
                    .map(|b| {
                        let e: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                        find(&e)
                    })
                    .collect()
            })
            .collect();
        Ring { ns: ns.to_vec(), monos, preds, prod }
    }

    pub fn dim(&self) -> usize {
        self.monos.len()
    }

    pub fn monomials(&self) -> &[Vec<u32>] {
        &self.monos
    }

    pub fn label(&self, k: usize) -> String {
        monomial_label(&self.monos[k])
    }

    pub fn one<C: Coef>(&self, proto: &C) -> Vec<C> {
        let mut v = vec![proto.zero_like(); self.dim()];
        v[0] = proto.unit();
        v
    }

    pub fn mul<C: Coef>(&self, a: &[C], b: &[C]) -> Vec<C> {
        let mut out = vec![a[0].zero_like(); self.dim()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if let Some(k) = self.prod[i][j] {
                    if !y.is_zero() {
                        out[k] = out[k].add(&x.mul(y));
                    }
                }
            }
        }
        out
    }

    /// `x (k + L)` with `L = sum l_i h_i`.
    pub fn mul_linear<C: Coef>(&self, x: &[C], k: i64, l: &[i64]) -> Vec<C> {
        (0..self.dim())
            .map(|g| {
                let mut acc = x[g].mul_int(k);
                for &(b, i) in &self.preds[g] {
                    if l[i] != 0 {
                        acc = acc.add(&x[b].mul_int(l[i]));
                    }
                }
                acc
            })
            .collect()
    }

    /// `x / (k + L)`, `k != 0`. Monomials are stored by degree, so one
    /// forward pass solves `y (k + L) = x`.
    pub fn div_linear<C: Coef>(&self, x: &[C], k: i64, l: &[i64]) -> Vec<C> {
        let mut y: Vec<C> = Vec::with_capacity(self.dim());
        for g in 0..self.dim() {
            let mut acc = x[g].clone();
            for &(b, i) in &self.preds[g] {
                if l[i] != 0 {
                    acc = acc.sub(&y[b].mul_int(l[i]));
                }
            }
            y.push(acc.div_int(k));
        }
        y
    }

    /// `exp(x)` for `x` without constant term.
    pub fn exp_nilpotent<C: Coef>(&self, x: &[C]) -> Vec<C> {
        let x2 = self.mul(x, x);
        let mut out: Vec<C> = x.iter().zip(&x2).map(|(a, b)| a.add(&b.div_int(2))).collect();
        out[0] = out[0].add(&out[0].unit());
        out
    }
}

fn monomial_label(e: &[u32]) -> String {
    let single = e.len() == 1;
    let mut parts = Vec::new();
    for (i, &k) in e.iter().enumerate() {
        let name = if single { String::from("h") } else { format!("h{}", i + 1) };
        match k {
            0 => {}
            1 => parts.push(name),
            k => parts.push(format!("{name}^{k}")),
        }
    }
    if parts.is_empty() {
        String::from("1")
    } else {
        parts.join("*")
    }
}

/// A complete intersection in a product of weighted projective spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CIModel {
    pub name: String,
    /// Weight vector of each factor (`[1, 1, 1]` is `P^2`).
    pub factors: Vec<Vec<u32>>,
    /// Multidegrees `a_j` of the cutting divisors.
    pub rows: Vec<Vec<u32>>,
    pub surface: Option<SurfaceId>,
}

impl CIModel {
    pub fn new(name: &str, factors: Vec<Vec<u32>>, rows: Vec<Vec<u32>>, surface: Option<SurfaceId>) -> Result<Self, JError> {
        let m = factors.len();
        let bad = || JError::UnsupportedModel(String::from(name));
        if m == 0 || m > 3 || factors.iter().any(|w| w.len() < 2 || w.contains(&0)) {
            return Err(bad());
        }
        if rows.iter().any(|a| a.len() != m) {
            return Err(bad());
        }
        let model = CIModel { name: String::from(name), factors, rows, surface };
        if model.c1().iter().any(|&c| c < 1) {
            return Err(bad());
        }
        Ok(model)
    }

    /// Lefschetz model of a del Pezzo surface.
    pub fn for_surface(s: SurfaceId) -> Result<Self, JError> {
        let p = |n: usize| vec![1u32; n + 1];
        let (factors, rows) = match s {
            SurfaceId::P2 => (vec![p(2)], vec![]),
            SurfaceId::P1xP1 => (vec![p(1), p(1)], vec![]),
            SurfaceId::X(1) => (vec![p(1), p(2)], vec![vec![1, 1]]),
            SurfaceId::X(2) => (vec![p(1), p(1), p(2)], vec![vec![1, 0, 1], vec![0, 1, 1]]),
            SurfaceId::X(3) => (vec![p(2), p(2)], vec![vec![1, 1], vec![1, 1]]),
            SurfaceId::X(5) => (vec![p(4)], vec![vec![2], vec![2]]),
            SurfaceId::X(6) => (vec![p(3)], vec![vec![3]]),
            SurfaceId::X(7) => (vec![vec![1, 1, 1, 2]], vec![vec![4]]),
            SurfaceId::X(8) => (vec![vec![1, 1, 2, 3]], vec![vec![6]]),
            other => {
                return Err(JError::UnsupportedModel(format!(
                    "{other} (a linear section of Gr(2,5), outside the toric and weighted projective ambients)"
                )))
            }
        };
        Self::new(&format!("{s}"), factors, rows, Some(s))
    }

    /// The weighted projective space `P(w)` itself (full weight vector).
    pub fn weighted_ambient(weights: &[u32]) -> Result<Self, JError> {
        let name = format!("P({})", weights.iter().map(|w| format!("{w}")).collect::<Vec<_>>().join(","));
        if weights.first() != Some(&1) {
            return Err(JError::UnsupportedModel(name));
        }
        Self::new(&name, vec![weights.to_vec()], Vec::new(), None)
    }

    pub fn nvars(&self) -> usize {
        self.factors.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.factors.iter().map(|w| w.len() - 1).sum()
    }

    pub fn dim(&self) -> usize {
        self.ambient_dim() - self.rows.len()
    }

    /// `c_1(Y)` as a linear form in `h_1..h_m`.
    pub fn c1(&self) -> Vec<i64> {
        (0..self.nvars())
            .map(|i| {
                self.factors[i].iter().map(|&w| w as i64).sum::<i64>()
                    - self.rows.iter().map(|a| a[i] as i64).sum::<i64>()
            })
            .collect()
    }

    /// Exponent of `t` attached to `t^{c_1 . d}` is at least this.
    pub fn fano_index(&self) -> i64 {
        self.c1().into_iter().min().unwrap_or(1)
    }

    pub fn ring(&self) -> Ring {
        Ring::new(&self.factors.iter().map(|w| w.len() as u32 - 1).collect::<Vec<_>>())
    }

    fn row_form(&self, j: usize) -> Vec<i64> {
        self.rows[j].iter().map(|&a| a as i64).collect()
    }

    /// `C_0`: the scalar part of the `t^1` coefficient, exactly.
    pub fn c0(&self) -> Rat {
        let c1 = self.c1();
        let mut total = Rat::zero();
        for i in 0..self.nvars() {
            if c1[i] != 1 {
                continue;
            }
            // d = e_i
            let mut q = Rat::one();
            for a in &self.rows {
                q *= factorial(a[i] as u64);
            }
            for &w in &self.factors[i] {
                q /= factorial(w as u64);
            }
            total += q;
        }
        total
    }

    /// Degree-one factor applied when `d_i` goes up by one, given the row
    /// degrees `dj` and the current `d_i`.
    fn step<C: Coef>(&self, ring: &Ring, x: &[C], i: usize, di: u64, dj: &[u64]) -> Vec<C> {
        let m = self.nvars();
        let mut y = x.to_vec();
        for (j, a) in self.rows.iter().enumerate() {
            let form = self.row_form(j);
            for k in dj[j] + 1..=dj[j] + a[i] as u64 {
                y = ring.mul_linear(&y, k as i64, &form);
            }
        }
        for &w in &self.factors[i] {
            let mut l = vec![0i64; m];
            l[i] = w as i64;
            for k in w as u64 * di + 1..=w as u64 * (di + 1) {
                y = ring.div_linear(&y, k as i64, &l);
            }
        }
        y
    }

    /// Ambient expression of the Gamma class of `Y`:
    /// `prod_i prod_w Gamma(1 + w h_i) / prod_j Gamma(1 + D_j)`.
    pub fn gamma_class(&self, digits: u32) -> Vec<Real> {
        let p = bits_for_digits(digits);
        let ring = self.ring();
        let (g1, g2) = log_gamma_coefficients(p);
        let m = self.nvars();
        let zero = Real::zero(p);
        let c1 = self.c1();
        let mut l = vec![zero.clone(); ring.dim()];
        for i in 0..m {
            l[1 + i] = &g1 * &Real::from_i64(c1[i], p);
        }
        // quadratic part: sum_i sum_w w^2 h_i^2 - sum_j D_j^2
        let mut quad: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
        for i in 0..m {
            let s: i64 = self.factors[i].iter().map(|&w| (w * w) as i64).sum();
            let mut e = vec![0; m];
            e[i] = 2;
            *quad.entry(e).or_default() += s;
        }
        for a in &self.rows {
            for i in 0..m {
                for j in 0..m {
                    let mut e = vec![0; m];
                    e[i] += 1;
                    e[j] += 1;
                    *quad.entry(e).or_default() -= (a[i] * a[j]) as i64;
                }
            }
        }
        for (e, c) in quad {
            if let Some(k) = ring.monos.iter().position(|x| *x == e) {
                l[k] = &l[k] + &(&g2 * &Real::from_i64(c, p));
            }
        }
        ring.exp_nilpotent(&l)
    }

    /// `int_ambient mu [Y]` for a monomial `mu` of degree `dim Y`.
    fn integral_on_y(&self, mu: &[u32]) -> Rat {
        let m = self.nvars();
        let top: Vec<u32> = self.factors.iter().map(|w| w.len() as u32 - 1).collect();
        let mut poly: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
        poly.insert(mu.to_vec(), 1);
        for a in &self.rows {
            let mut next: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
            for (e, c) in &poly {
                for i in 0..m {
                    if a[i] == 0 {
                        continue;
                    }
                    let mut f = e.clone();
                    f[i] += 1;
                    if f[i] <= top[i] {
                        *next.entry(f).or_default() += c * a[i] as i64;
                    }
                }
            }
            poly = next;
        }
        let c = poly.get(&top).copied().unwrap_or(0);
        let vol: u64 = self.factors.iter().flat_map(|w| w.iter()).map(|&w| w as u64).product();
        Rat::new(c.into(), (vol as i64).into())
    }

    /// Test classes `alpha` (ambient monomials) and, for each, the weights of
    /// the functional `m -> int alpha m [Y]` on the truncated ring.
    pub fn test_functionals(&self) -> Vec<(String, Vec<Rat>)> {
        let ring = self.ring();
        let m = self.nvars();
        let top: Vec<u32> = self.factors.iter().map(|w| w.len() as u32 - 1).collect();
        let dy = self.dim() as u32;
        let mut out = Vec::new();
        let mut alphas: Vec<Vec<u32>> = Vec::new();
        let mut stack = vec![vec![0u32; m]];
        while let Some(e) = stack.pop() {
            let deg: u32 = e.iter().sum();
            if deg + 2 >= dy && deg <= dy {
                alphas.push(e.clone());
            }
            for i in 0..m {
                let mut f = e.clone();
                f[i] += 1;
                if f[i] <= top[i] && f.iter().sum::<u32>() <= dy && !stack.contains(&f) && !alphas.contains(&f) {
                    stack.push(f);
                }
            }
        }
        alphas.sort_by(|a, b| a.iter().sum::<u32>().cmp(&b.iter().sum::<u32>()).then(b.cmp(a)));
        alphas.dedup();
        for a in alphas {
            let w: Vec<Rat> = ring
                .monos
                .iter()
                .map(|b| {
                    let deg: u32 = a.iter().chain(b.iter()).sum();
                    if deg != dy {
                        return Rat::zero();
                    }
                    let e: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                    if (0..m).any(|i| e[i] > top[i]) {
                        return Rat::zero();
                    }
                    self.integral_on_y(&e)
                })
                .collect();
            if w.iter().any(|x| !Zero::is_zero(x)) {
                out.push((monomial_label(&a), w));
            }
        }
        out
    }

    /// Variables summed innermost with prefix sums: each appears in at most
    /// one row, and no row carries two of them. At most two are used.
    fn plan(&self) -> (Vec<usize>, Vec<(usize, Option<usize>)>) {
        let mut fibres: Vec<(usize, Option<usize>)> = Vec::new();
        let mut base = Vec::new();
        for i in 0..self.nvars() {
            let rows: Vec<usize> = (0..self.rows.len()).filter(|&j| self.rows[j][i] != 0).collect();
            let ok = rows.len() <= 1 && fibres.len() < 2 && !fibres.iter().any(|f| f.1.is_some() && f.1 == rows.first().copied());
            if ok {
                fibres.push((i, rows.first().copied()));
            } else {
                base.push(i);
            }
        }
        (base, fibres)
    }
}

fn factorial(n: u64) -> Rat {
    (1..=n).fold(Rat::one(), |acc, k| acc * int(k as i64))
}

/// The series truncated at `t^{n_max}`, with exact coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct JSeries {
    pub model: CIModel,
    pub ring: Ring,
    /// `coefficients[n]` is the ambient class multiplying `t^n`.
    pub coefficients: Vec<Vec<Rat>>,
    pub c0: Rat,
}

/// Exact coefficients up to `t^{n_max}` by direct enumeration of degrees.
pub fn lefschetz_series(model: &CIModel, n_max: usize) -> JSeries {
    let ring = model.ring();
    let c1 = model.c1();
    let m = model.nvars();
    let mut coefficients = vec![vec![Rat::zero(); ring.dim()]; n_max + 1];
    let unit = ring.one(&Rat::zero());
    // depth-first over d with c_1 . d <= n_max
    fn rec(
        model: &CIModel,
        ring: &Ring,
        c1: &[i64],
        i: usize,
        d: &mut Vec<u64>,
        x: Vec<Rat>,
        n: usize,
        n_max: usize,
        out: &mut Vec<Vec<Rat>>,
    ) {
        if i == c1.len() {
            for (o, v) in out[n].iter_mut().zip(&x) {
                *o += v;
            }
            return;
        }
        let mut x = x;
        let mut n = n;
        loop {
            rec(model, ring, c1, i + 1, d, x.clone(), n, n_max, out);
            n += c1[i] as usize;
            if n > n_max {
                break;
            }
            let dj: Vec<u64> = model.rows.iter().map(|a| a.iter().zip(d.iter()).map(|(&ai, &di)| ai as u64 * di).sum()).collect();
            x = model.step(ring, &x, i, d[i], &dj);
            d[i] += 1;
        }
        d[i] = 0;
    }
    let mut d = vec![0u64; m];
    rec(model, &ring, &c1, 0, &mut d, unit, 0, n_max, &mut coefficients);
    JSeries { model: model.clone(), ring, coefficients, c0: model.c0() }
}

impl JSeries {
    /// `e^{c_1 log t - C_0 t} sum_n coefficients[n] t^n` over the stored terms.
    pub fn evaluate(&self, t: f64, digits: u32) -> Vec<Real> {
        let p = bits_for_digits(digits);
        let tr = Real::from_f64(t, p);
        let mut s = vec![Real::zero(p); self.ring.dim()];
        let mut tn = Real::one(p);
        for c in &self.coefficients {
            for (o, q) in s.iter_mut().zip(c) {
                *o = &*o + &(&tn * &Real::from_rat(q, p));
            }
            tn = &tn * &tr;
        }
        prefactor(&self.model, &self.ring, &tr, &s)
    }
}

fn prefactor(model: &CIModel, ring: &Ring, t: &Real, s: &[Real]) -> Vec<Real> {
    let p = t.precision();
    let lt = t.ln();
    let c1 = model.c1();
    let mut l = vec![Real::zero(p); ring.dim()];
    for i in 0..model.nvars() {
        l[1 + i] = &lt * &Real::from_i64(c1[i], p);
    }
    let e = ring.exp_nilpotent(&l);
    let shift = (-(&Real::from_rat(&model.c0(), p) * t)).exp();
    ring.mul(&e, s).iter().map(|x| x * &shift).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalOptions {
    pub digits: u32,
    /// Relative size below which the last shells count as negligible.
    pub guard_digits: u32,
    /// Largest `c_1 . d` allowed.
    pub max_terms: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { digits: DEFAULT_DIGITS, guard_digits: DEFAULT_DIGITS, max_terms: DEFAULT_TERMS }
    }
}

/// `J(t)` on the monomial basis of the ambient ring, with the number of
/// terms used.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub t: f64,
    pub terms: usize,
    pub j: Vec<Real>,
}

/// Precomputed increments for the sum over degrees.
struct Summer<'a> {
    model: &'a CIModel,
    ring: Ring,
    c1: Vec<i64>,
    base: Vec<usize>,
    fibres: Vec<(usize, Option<usize>)>,
    t: Real,
}

impl Summer<'_> {
    fn row_degrees(&self, d: &[u64]) -> Vec<u64> {
        self.model
            .rows
            .iter()
            .map(|a| a.iter().zip(d).map(|(&ai, &di)| ai as u64 * di).sum())
            .collect()
    }

    /// `t^{c_1 x} F(x)` for the fibre variable `i`, `x = 0..=xmax`.
    fn fibre_terms(&self, i: usize, d: &[u64], xmax: u64) -> Vec<Vec<Real>> {
        let p = self.t.precision();
        let tc = self.t.powi(self.c1[i] as u32);
        let mut d = d.to_vec();
        let mut x = self.ring.one(&Real::zero(p));
        let mut out = Vec::with_capacity(xmax as usize + 1);
        out.push(x.clone());
        for _ in 0..xmax {
            let dj = self.row_degrees(&d);
            x = self.model.step(&self.ring, &x, i, d[i], &dj);
            x = x.iter().map(|v| v * &tc).collect();
            d[i] += 1;
            out.push(x.clone());
        }
        out
    }

    fn prefix(terms: &[Vec<Real>]) -> Vec<Vec<Real>> {
        let mut out: Vec<Vec<Real>> = Vec::with_capacity(terms.len());
        for t in terms {
            let next = match out.last() {
                Some(prev) => prev.iter().zip(t).map(|(a, b)| a + b).collect(),
                None => t.clone(),
            };
            out.push(next);
        }
        out
    }

    /// Sums over the fibres at base point `d`, one per remaining budget;
    /// `None` budgets contribute nothing.
    fn fibre_sums(&self, d: &[u64], rs: &[Option<u64>]) -> Vec<Option<Vec<Real>>> {
        let p = self.t.precision();
        let r = rs.iter().flatten().copied().max().unwrap_or(0);
        match self.fibres.len() {
            0 => rs.iter().map(|b| b.map(|_| self.ring.one(&Real::zero(p)))).collect(),
            1 => {
                let (i, _) = self.fibres[0];
                let ci = self.c1[i] as u64;
                let xs = Self::prefix(&self.fibre_terms(i, d, r / ci));
                rs.iter().map(|b| b.map(|b| xs[(b / ci) as usize].clone())).collect()
            }
            _ => {
                let (i, _) = self.fibres[0];
                let (k, _) = self.fibres[1];
                let ci = self.c1[i] as u64;
                let ck = self.c1[k] as u64;
                let xs = self.fibre_terms(i, d, r / ci);
                let ys = Self::prefix(&self.fibre_terms(k, d, r / ck));
                rs.iter()
                    .map(|b| {
                        b.map(|b| {
                            let mut acc = vec![Real::zero(p); self.ring.dim()];
                            for (x, fx) in xs.iter().enumerate().take((b / ci) as usize + 1) {
                                let rest = (b - ci * x as u64) / ck;
                                let prod = self.ring.mul(fx, &ys[rest as usize]);
                                acc = acc.iter().zip(&prod).map(|(a, b)| a + b).collect();
                            }
                            acc
                        })
                    })
                    .collect()
            }
        }
    }

    /// `sum_{c_1 . d <= n} coef(d) t^{c_1 . d}` for each `n` in `ns`.
    fn sums(&self, ns: &[u64]) -> Vec<Vec<Real>> {
        let p = self.t.precision();
        let m = self.model.nvars();
        let mut acc = vec![vec![Real::zero(p); self.ring.dim()]; ns.len()];
        let mut d = vec![0u64; m];
        self.base_rec(0, &mut d, self.ring.one(&Real::zero(p)), 0, ns, &mut acc);
        acc
    }

    fn base_rec(&self, level: usize, d: &mut Vec<u64>, a: Vec<Real>, used: u64, ns: &[u64], acc: &mut [Vec<Real>]) {
        if level == self.base.len() {
            let rs: Vec<Option<u64>> = ns.iter().map(|&n| n.checked_sub(used)).collect();
            if self.fibres.is_empty() {
                for (o, r) in acc.iter_mut().zip(&rs) {
                    if r.is_some() {
                        for (x, v) in o.iter_mut().zip(&a) {
                            *x = &*x + v;
                        }
                    }
                }
                return;
            }
            for (o, f) in acc.iter_mut().zip(self.fibre_sums(d, &rs)) {
                if let Some(f) = f {
                    let prod = self.ring.mul(&a, &f);
                    for (x, v) in o.iter_mut().zip(&prod) {
                        *x = &*x + v;
                    }
                }
            }
            return;
        }
        let n = ns.iter().copied().max().unwrap_or(0);
        let i = self.base[level];
        let tc = self.t.powi(self.c1[i] as u32);
        let mut a = a;
        let mut used = used;
        let start = d[i];
        loop {
            self.base_rec(level + 1, d, a.clone(), used, ns, acc);
            used += self.c1[i] as u64;
            if used > n {
                break;
            }
            let dj = self.row_degrees(d);
            a = self.model.step(&self.ring, &a, i, d[i], &dj);
            a = a.iter().map(|v| v * &tc).collect();
            d[i] += 1;
        }
        d[i] = start;
    }
}

fn max_abs(v: &[Real]) -> Real {
    v.iter().fold(Real::zero(v[0].precision()), |m, x| m.max(&x.abs()))
}

/// `J(t)` with the number of terms chosen adaptively: the budget grows
/// until the shells dropped by a smaller budget are below
/// `10^{-guard_digits}` relative, or `max_terms` is reached.
pub fn evaluate(model: &CIModel, t: f64, opts: &EvalOptions) -> Result<Evaluation, JError> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(JError::BadGrid);
    }
    if opts.guard_digits > opts.digits {
        return Err(JError::PrecisionExhausted { t, digits: opts.digits });
    }
    let p = bits_for_digits(opts.digits);
    let tr = Real::from_f64(t, p);
    let (base, fibres) = model.plan();
    let summer = Summer { model, ring: model.ring(), c1: model.c1(), base, fibres, t: tr.clone() };
    let guard = Real::from_f64(10f64.powi(-(opts.guard_digits as i32)), p);
    let cap = opts.max_terms.max(2) as u64;
    let mut n = 32u64.min(cap);
    // Shells (n - 2w, n - w] and (n - w, n] bound the tail geometrically once
    // the terms are past their peak.
    let w = model.c1().into_iter().max().unwrap_or(1).max(1) as u64;
    let one = Real::one(p);
    let (s, used) = loop {
        let mut sums = summer.sums(&[n, n.saturating_sub(w), n.saturating_sub(2 * w)]);
        let s2 = sums.pop().expect("three sums");
        let s1 = sums.pop().expect("three sums");
        let full = sums.pop().expect("three sums");
        let last = max_abs(&full.iter().zip(&s1).map(|(a, b)| a - b).collect::<Vec<_>>());
        let prev = max_abs(&s1.iter().zip(&s2).map(|(a, b)| a - b).collect::<Vec<_>>());
        let scale = max_abs(&full);
        if scale.is_zero() {
            return Err(JError::PrecisionExhausted { t, digits: opts.digits });
        }
        let done = if last.is_zero() {
            n >= 2 * w
        } else if last < prev {
            let q = &last / &prev;
            &last / &(&one - &q) <= &scale * &guard
        } else {
            false
        };
        if done {
            break (full, n);
        }
        if n >= cap {
            return Err(JError::TermBudgetExceeded { t, budget: cap as usize });
        }
        n = ((n * 3).div_ceil(2)).min(cap);
    };
    let j = prefactor(model, &summer.ring, &tr, &s);
    Ok(Evaluation { t, terms: used as usize, j })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitPoint {
    pub t: f64,
    pub terms: usize,
    /// `r_alpha(t)` for each retained test class.
    pub ratios: Vec<f64>,
    pub dispersion: f64,
    /// `log |<alpha, J(t)>|` for the class pairing with the scalar part.
    pub log_scalar: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaLimitReport {
    pub target: String,
    pub rho: f64,
    pub components: Vec<String>,
    pub gamma: Vec<f64>,
    pub points: Vec<LimitPoint>,
    /// `D(t_{k+1}) <= D(t_k) + floor` along the grid.
    pub monotone: bool,
    pub floor: f64,
    pub final_dispersion: f64,
    pub threshold: f64,
    /// Grid points where the series could not be evaluated.
    pub failures: Vec<(f64, String)>,
    pub options: EvalOptions,
}

impl GammaLimitReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty() && self.monotone && self.final_dispersion <= self.threshold
    }
}

/// Pair `v` with every test functional.
fn pairings(funcs: &[(String, Vec<Rat>)], v: &[Real], p: usize) -> Vec<Real> {
    funcs
        .iter()
        .map(|(_, w)| {
            w.iter()
                .zip(v)
                .filter(|(q, _)| !Zero::is_zero(*q))
                .fold(Real::zero(p), |acc, (q, x)| acc + x * &Real::from_rat(q, p))
        })
        .collect()
}

/// Dispersion `max_{a,b} |r_a / r_b - 1|` of `t^{dim/2} e^{-rho t} J(t)`
/// against the Gamma class, over the grid.
pub fn gamma_limit_report(model: &CIModel, rho: f64, grid: &[f64], opts: &EvalOptions) -> Result<GammaLimitReport, JError> {
    if grid.is_empty() || grid.iter().any(|&t| !(t > 0.0)) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(JError::BadGrid);
    }
    let p = bits_for_digits(opts.digits);
    let gamma = model.gamma_class(opts.digits);
    let funcs_all = model.test_functionals();
    let gp_all = pairings(&funcs_all, &gamma, p);
    let gmax = gp_all.iter().fold(Real::zero(p), |m, x| m.max(&x.abs()));
    let floor_g = &gmax * &Real::from_f64(1e-20, p);
    let keep: Vec<usize> = (0..funcs_all.len()).filter(|&k| gp_all[k].abs() > floor_g).collect();
    let funcs: Vec<(String, Vec<Rat>)> = keep.iter().map(|&k| funcs_all[k].clone()).collect();
    let gp: Vec<Real> = keep.iter().map(|&k| gp_all[k].clone()).collect();
    let floor = 10f64.powi(-(opts.digits as i32 - 10));
    let half_dim = Real::from_f64(model.dim() as f64 / 2.0, p);
    let rho_r = Real::from_f64(rho, p);
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for &t in grid {
        let ev = match evaluate(model, t, opts) {
            Ok(ev) => ev,
            Err(e) => {
                failures.push((t, format!("{e}")));
                continue;
            }
        };
        let tr = Real::from_f64(t, p);
        let scale = (&half_dim * &tr.ln() - &rho_r * &tr).exp();
        let v: Vec<Real> = ev.j.iter().map(|x| x * &scale).collect();
        let vp = pairings(&funcs, &v, p);
        let ratios: Vec<Real> = vp.iter().zip(&gp).map(|(a, b)| a / b).collect();
        let mut disp = Real::zero(p);
        let one = Real::one(p);
        for a in &ratios {
            for b in &ratios {
                let d = (a / b - &one).abs();
                disp = disp.max(&d);
            }
        }
        let scalar = pairings(&funcs_all[funcs_all.len() - 1..], &ev.j, p).remove(0);
        points.push(LimitPoint {
            t,
            terms: ev.terms,
            log_scalar: scalar.log10_abs() * core::f64::consts::LN_10,
            ratios: ratios.iter().map(|x| x.to_f64()).collect(),
            dispersion: disp.to_f64(),
        });
    }
    let monotone = points.windows(2).all(|w| w[1].dispersion <= w[0].dispersion + floor);
    let final_dispersion = match (points.last(), failures.is_empty()) {
        (Some(pt), true) => pt.dispersion,
        _ => f64::INFINITY,
    };
    Ok(GammaLimitReport {
        target: model.name.clone(),
        rho,
        components: funcs.iter().map(|f| f.0.clone()).collect(),
        gamma: gp.iter().map(|x| x.to_f64()).collect(),
        points,
        monotone,
        floor,
        final_dispersion,
        threshold: DISPERSION_THRESHOLD,
        failures,
        options: *opts,
    })
}

/// Least-squares fit of `log |<alpha, J(t)>| = rho t + a log t + b` over the
/// given points, using the test class that pairs with the scalar part.
pub fn growth_rate_fit(model: &CIModel, ts: &[f64], opts: &EvalOptions) -> Result<f64, JError> {
    if ts.len() < 3 {
        return Err(JError::BadGrid);
    }
    let p = bits_for_digits(opts.digits);
    let funcs = model.test_functionals();
    let (_, w) = funcs.last().ok_or_else(|| JError::UnsupportedModel(model.name.clone()))?;
    let mut samples = Vec::new();
    for &t in ts {
        let ev = evaluate(model, t, opts)?;
        let val = pairings(&[(String::new(), w.clone())], &ev.j, p).remove(0);
        if val.is_zero() {
            return Err(JError::PrecisionExhausted { t, digits: opts.digits });
        }
        // log|x| from the decimal exponent, valid at any magnitude
        samples.push((t, val.log10_abs() * core::f64::consts::LN_10));
    }
    fit_growth(&samples).ok_or(JError::BadGrid)
}

/// Least-squares `rho` in `y = rho t + a log t + b` over samples `(t, y)`.
pub fn fit_growth(samples: &[(f64, f64)]) -> Option<f64> {
    if samples.len() < 3 {
        return None;
    }
    let mut a = [[0.0f64; 3]; 3];
    let mut b = [0.0f64; 3];
    for &(t, y) in samples {
        let x = [t, libm::log(t), 1.0];
        for i in 0..3 {
            b[i] += x[i] * y;
            for j in 0..3 {
                a[i][j] += x[i] * x[j];
            }
        }
    }
    solve3(a, b).map(|s| s[0])
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for c in 0..3 {
        let piv = (c..3).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())?;
        if a[piv][c].abs() < 1e-300 {
            return None;
        }
        a.swap(piv, c);
        b.swap(piv, c);
        for i in c + 1..3 {
            let f = a[i][c] / a[c][c];
            for k in c..3 {
                a[i][k] -= f * a[c][k];
            }
            b[i] -= f * b[c];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = (i + 1..3).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}
