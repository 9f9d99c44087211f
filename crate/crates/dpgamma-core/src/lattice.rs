//! Picard lattice of `X_r`, the blowup of the plane in `r` general points.
//!
//! A class is stored as `(d0; d1..dr)` meaning `d0 H - sum d_i E_i`, so `E_i`
//! itself has `d_i = -1` and `c_1 = (3; 1, .., 1)`.

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use hashbrown::HashSet;

pub const MAX_POINTS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("classes live on different surfaces (r = {0} vs r = {1})")]
    MixedSurfaces(u8, u8),
    #[error("the Cremona involution needs r >= 3, got r = {0}")]
    NeedsThreePoints(u8),
    #[error("swap index {j} out of range for r = {r}")]
    IndexOutOfRange { j: usize, r: u8 },
    #[error("anticanonical degree {0} exceeds the supported bound")]
    DegreeTooLarge(i64),
    #[error("r = {0} outside the supported range")]
    RankOutOfRange(u8),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivClass {
    r: u8,
    c: [i32; MAX_POINTS + 1],
}

impl DivClass {
    /// `d0 H - sum d[i] E_{i+1}`.
    pub fn new(d0: i32, d: &[i32]) -> Self {
        assert!(d.len() <= MAX_POINTS, "at most eight points");
        let mut c = [0; MAX_POINTS + 1];
        c[0] = d0;
        c[1..=d.len()].copy_from_slice(d);
        DivClass { r: d.len() as u8, c }
    }

    pub fn zero(r: u8) -> Self {
        DivClass { r, c: [0; MAX_POINTS + 1] }
    }

    pub fn h(r: u8) -> Self {
        let mut a = Self::zero(r);
        a.c[0] = 1;
        a
    }

    /// Exceptional divisor `E_i`, `1 <= i <= r`.
    pub fn e(r: u8, i: usize) -> Self {
        assert!((1..=r as usize).contains(&i), "E_{i} does not exist for r = {r}");
        let mut a = Self::zero(r);
        a.c[i] = -1;
        a
    }

    /// Anticanonical class `3H - sum E_i`.
    pub fn c1(r: u8) -> Self {
        let mut a = Self::zero(r);
        a.c[0] = 3;
        for i in 1..=r as usize {
            a.c[i] = 1;
        }
        a
    }

    pub fn r(&self) -> u8 {
        self.r
    }

    pub fn d0(&self) -> i32 {
        self.c[0]
    }

    /// `d_i` for `1 <= i <= r`.
    pub fn d(&self, i: usize) -> i32 {
        assert!((1..=self.r as usize).contains(&i));
        self.c[i]
    }

    pub fn ds(&self) -> &[i32] {
        &self.c[1..=self.r as usize]
    }

    /// Coefficients `(d0, d1, .., dr)`.
    pub fn coeffs(&self) -> &[i32] {
        &self.c[..=self.r as usize]
    }

    /// Unchecked pairing; panics on mixed surfaces.
    pub fn dot(&self, o: &DivClass) -> i64 {
        intersect(self, o).expect("classes on the same surface")
    }

    /// Anticanonical degree `c_1 . A`.
    pub fn degree(&self) -> i64 {
        3 * self.c[0] as i64 - self.ds().iter().map(|&x| x as i64).sum::<i64>()
    }

    pub fn self_intersection(&self) -> i64 {
        self.dot(self)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }
}

impl fmt::Debug for DivClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.c[0])?;
        for (i, x) in self.ds().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// Renders `2H - E1 - E2 + E3`.
impl fmt::Display for DivClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut term = |f: &mut fmt::Formatter<'_>, k: i32, name: &dyn fmt::Display| -> fmt::Result {
            if k == 0 {
                return Ok(());
            }
            let mag = k.unsigned_abs();
            match (first, k < 0) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            if mag != 1 {
                write!(f, "{mag}")?;
            }
            write!(f, "{name}")
        };
        term(f, self.c[0], &"H")?;
        for i in 1..=self.r as usize {
            term(f, -self.c[i], &format_args!("E{i}"))?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Add for DivClass {
    type Output = DivClass;
    fn add(self, o: DivClass) -> DivClass {
        assert_eq!(self.r, o.r, "mixed surfaces");
        let mut c = self.c;
        for (x, y) in c.iter_mut().zip(o.c) {
            *x += y;
        }
        DivClass { r: self.r, c }
    }
}

impl Sub for DivClass {
    type Output = DivClass;
    fn sub(self, o: DivClass) -> DivClass {
        self + (-o)
    }
}

impl Neg for DivClass {
    type Output = DivClass;
    fn neg(self) -> DivClass {
        let mut c = self.c;
        for x in c.iter_mut() {
            *x = -*x;
        }
        DivClass { r: self.r, c }
    }
}

impl Mul<DivClass> for i32 {
    type Output = DivClass;
    fn mul(self, a: DivClass) -> DivClass {
        let mut c = a.c;
        for x in c.iter_mut() {
            *x *= self;
        }
        DivClass { r: a.r, c }
    }
}

/// `a0 b0 - sum a_i b_i`.
pub fn intersect(a: &DivClass, b: &DivClass) -> Result<i64, LatticeError> {
    if a.r != b.r {
        return Err(LatticeError::MixedSurfaces(a.r, b.r));
    }
    let mut s = a.c[0] as i64 * b.c[0] as i64;
    for i in 1..=a.r as usize {
        s -= a.c[i] as i64 * b.c[i] as i64;
    }
    Ok(s)
}

/// All `k`-element subsets of `0..n`, lexicographic.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `d0 H - mult * sum_{i in pts} E_i - base * sum_{rest} E_i` style builder.
fn class_with(r: u8, d0: i32, base: i32, special: &[(usize, i32)]) -> DivClass {
    let mut a = DivClass::zero(r);
    a.c[0] = d0;
    for i in 1..=r as usize {
        a.c[i] = base;
    }
    for &(i, m) in special {
        a.c[i + 1] = m;
    }
    a
}

/// The classes of exceptional curves on `X_r`, `1 <= r <= 8`, sorted.
pub fn exceptional_classes(r: u8) -> Vec<DivClass> {
    assert!((1..=8).contains(&r), "r = {r} outside 1..=8");
    let n = r as usize;
    let mut out = Vec::new();
    for i in 1..=n {
        out.push(DivClass::e(r, i));
    }
    // lines through two points
    for s in subsets(n, 2) {
        out.push(class_with(r, 1, 0, &[(s[0], 1), (s[1], 1)]));
    }
    // conics through five points
    for s in subsets(n, 5) {
        let sp: Vec<_> = s.iter().map(|&i| (i, 1)).collect();
        out.push(class_with(r, 2, 0, &sp));
    }
    // cubics through seven points, double at one of them
    for s in subsets(n, 7) {
        for &dbl in &s {
            let sp: Vec<_> = s.iter().map(|&i| (i, if i == dbl { 2 } else { 1 })).collect();
            out.push(class_with(r, 3, 0, &sp));
        }
    }
    if r == 8 {
        for s in subsets(8, 3) {
            let sp: Vec<_> = s.iter().map(|&i| (i, 2)).collect();
            out.push(class_with(r, 4, 1, &sp));
        }
        for s in subsets(8, 6) {
            let sp: Vec<_> = s.iter().map(|&i| (i, 2)).collect();
            out.push(class_with(r, 5, 1, &sp));
        }
        for i in 0..8 {
            out.push(class_with(r, 6, 2, &[(i, 3)]));
        }
    }
    out.sort();
    out
}

/// Plane Cremona involution centred at the first three points.
pub fn cremona(a: &DivClass) -> Result<DivClass, LatticeError> {
    if a.r < 3 {
        return Err(LatticeError::NeedsThreePoints(a.r));
    }
    let d = a.c[0];
    let s = a.c[1] + a.c[2] + a.c[3];
    let mut b = *a;
    b.c[0] = 2 * d - s;
    for k in 1..=3 {
        b.c[k] = d - s + a.c[k];
    }
    Ok(b)
}

/// Exchange the coefficients of `E_j` and `E_{j+1}`, `1 <= j <= r - 1`.
pub fn swap(a: &DivClass, j: usize) -> Result<DivClass, LatticeError> {
    if j == 0 || j >= a.r as usize {
        return Err(LatticeError::IndexOutOfRange { j, r: a.r });
    }
    let mut b = *a;
    b.c.swap(j, j + 1);
    Ok(b)
}

/// Images of `a` under one generator of the symmetry group.
pub fn neighbours(a: &DivClass) -> Vec<DivClass> {
    let mut out = Vec::new();
    if let Ok(b) = cremona(a) {
        out.push(b);
    }
    for j in 1..a.r as usize {
        out.push(swap(a, j).expect("index in range"));
    }
    out
}

/// Orbit of `a` under the group generated by `cremona` and the swaps, sorted.
pub fn orbit(a: &DivClass) -> Vec<DivClass> {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(*a);
    queue.push_back(*a);
    while let Some(x) = queue.pop_front() {
        for y in neighbours(&x) {
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    let mut v: Vec<_> = seen.into_iter().collect();
    v.sort();
    v
}

/// Generators of the effective cone: exceptional classes, plus `c_1` on `X_8`.
pub fn generators(r: u8) -> Vec<DivClass> {
    let mut g = exceptional_classes(r);
    if r == 8 {
        g.push(DivClass::c1(8));
        g.sort();
    }
    g
}

const MAX_EFFECTIVE_DEGREE: i64 = 4;

/// Effective classes of anticanonical degree 1, 2 and 3 on `X_r`, built once
/// and then only read.
#[derive(Clone, Debug)]
pub struct EffectiveClasses {
    r: u8,
    by_degree: [Vec<DivClass>; 3],
    sets: [HashSet<DivClass>; 3],
}

impl EffectiveClasses {
    pub fn new(r: u8) -> Result<Self, LatticeError> {
        if !(3..=8).contains(&r) {
            return Err(LatticeError::RankOutOfRange(r));
        }
        let gens = generators(r);
        let mut sets: [HashSet<DivClass>; 3] = Default::default();
        sets[0].extend(gens.iter().copied());
        for i in 0..gens.len() {
            for j in i..gens.len() {
                let ab = gens[i] + gens[j];
                sets[1].insert(ab);
                for g in &gens[j..] {
                    sets[2].insert(ab + *g);
                }
            }
        }
        let by_degree = sets.clone().map(|s| {
            let mut v: Vec<_> = s.into_iter().collect();
            v.sort();
            v
        });
        Ok(EffectiveClasses { r, by_degree, sets })
    }

    pub fn r(&self) -> u8 {
        self.r
    }

    /// Effective classes of degree `k`, `1 <= k <= 3`, sorted.
    pub fn of_degree(&self, k: i64) -> Result<&[DivClass], LatticeError> {
        match k {
            1..=3 => Ok(&self.by_degree[k as usize - 1]),
            _ => Err(LatticeError::DegreeTooLarge(k)),
        }
    }

    /// Whether `a` is a sum of generators. Degrees up to 4 are supported.
    pub fn contains(&self, a: &DivClass) -> Result<bool, LatticeError> {
        if a.r != self.r {
            return Err(LatticeError::MixedSurfaces(a.r, self.r));
        }
        let k = a.degree();
        match k {
            _ if k > MAX_EFFECTIVE_DEGREE => Err(LatticeError::DegreeTooLarge(k)),
            _ if k < 0 => Ok(false),
            0 => Ok(a.is_zero()),
            1..=3 => Ok(self.sets[k as usize - 1].contains(a)),
            _ => Ok(self.by_degree[1].iter().any(|s| self.sets[1].contains(&(*a - *s)))),
        }
    }
}

/// Effective classes of degree `k` on `X_r` (`3 <= r <= 8`, `1 <= k <= 3`).
pub fn classes_of_degree(r: u8, k: i64) -> Result<Vec<DivClass>, LatticeError> {
    if !(1..=3).contains(&k) {
        return Err(LatticeError::DegreeTooLarge(k));
    }
    Ok(EffectiveClasses::new(r)?.of_degree(k)?.to_vec())
}

/// Whether `a` is a nonnegative combination of generators; `c_1 . a <= 4`.
pub fn is_effective(a: &DivClass) -> Result<bool, LatticeError> {
    let k = a.degree();
    if k > MAX_EFFECTIVE_DEGREE {
        return Err(LatticeError::DegreeTooLarge(k));
    }
    EffectiveClasses::new(a.r)?.contains(a)
}
