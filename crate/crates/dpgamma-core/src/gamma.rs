//! Gamma classes of del Pezzo surfaces and of weighted projective spaces.
//!
//! Everything lives in degree at most two, so only the first two terms of
//! `log Gamma(1 + x) = -C_eu x + zeta(2) x^2 / 2 - ...` ever matter.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{rat, Rat};
use crate::real::{bits_for_digits, Real};
use crate::surface::SurfaceId;

pub const DEFAULT_DIGITS: u32 = 60;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GammaError {
    #[error("Fano index {0} is not positive")]
    IndexNotPositive(i64),
    #[error("degree {d} is not divisible by weight {w}")]
    DegreeNotDivisible { d: u32, w: u32 },
    #[error("weights must be positive")]
    ZeroWeight,
}

/// `a_0 + a_1 h + a_2 h^2` modulo `h^3`.
#[derive(Clone, PartialEq)]
pub struct TruncPoly {
    pub c: [Real; 3],
}

impl fmt::Debug for TruncPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + {:?} h + {:?} h^2", self.c[0], self.c[1], self.c[2])
    }
}

impl TruncPoly {
    pub fn new(a0: Real, a1: Real, a2: Real) -> Self {
        TruncPoly { c: [a0, a1, a2] }
    }

    pub fn one(p: usize) -> Self {
        Self::new(Real::one(p), Real::zero(p), Real::zero(p))
    }

    pub fn precision(&self) -> usize {
        self.c[0].precision()
    }

    pub fn coeff(&self, k: usize) -> &Real {
        &self.c[k]
    }

    pub fn mul(&self, o: &TruncPoly) -> TruncPoly {
        let [a0, a1, a2] = &self.c;
        let [b0, b1, b2] = &o.c;
        TruncPoly::new(a0 * b0, a0 * b1 + a1 * b0, a0 * b2 + a1 * b1 + a2 * b0)
    }

    /// Multiplicative inverse; `a_0` must be nonzero.
    pub fn inv(&self) -> TruncPoly {
        let [a0, a1, a2] = &self.c;
        let i0 = &Real::one(self.precision()) / a0;
        let i1 = -(a1 * &i0 * &i0);
        let i2 = -((a1 * &i1 + a2 * &i0) * &i0);
        TruncPoly::new(i0, i1, i2)
    }

    /// `exp(l_1 h + l_2 h^2)` modulo `h^3`.
    pub fn exp_nilpotent(l1: &Real, l2: &Real) -> TruncPoly {
        let p = l1.precision();
        let half = Real::parse_decimal("0.5", p);
        TruncPoly::new(Real::one(p), l1.clone(), l2 + &(l1 * l1 * half))
    }
}

/// The two constants of the degree-two expansion of `log Gamma(1 + x)`:
/// `(-C_eu, zeta(2) / 2)`.
pub fn log_gamma_coefficients(p: usize) -> (Real, Real) {
    let half = Real::parse_decimal("0.5", p);
    (-Real::euler_gamma(p), Real::zeta2(p) * half)
}

fn check_weights(weights: &[u32]) -> Result<(), GammaError> {
    if weights.contains(&0) {
        Err(GammaError::ZeroWeight)
    } else {
        Ok(())
    }
}

/// Log-coefficients of `prod Gamma(1 + w_i h)`: sums of `w` and `w^2`.
fn weight_moments(weights: &[u32]) -> (i64, i64) {
    weights.iter().fold((0, 0), |(s1, s2), &w| (s1 + w as i64, s2 + (w as i64) * (w as i64)))
}

/// `prod_i Gamma(1 + w_i h)` modulo `h^3` for the full weight vector of
/// `P(w_0, .., w_N)`.
pub fn gamma_wps_untwisted(weights: &[u32], digits: u32) -> Result<TruncPoly, GammaError> {
    check_weights(weights)?;
    let p = bits_for_digits(digits);
    let (s1, s2) = weight_moments(weights);
    let (g1, g2) = log_gamma_coefficients(p);
    Ok(TruncPoly::exp_nilpotent(&(g1 * Real::from_i64(s1, p)), &(g2 * Real::from_i64(s2, p))))
}

/// Gamma class contributions of the twisted sectors of an orbifold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwistedSectors {
    /// The space is a manifold.
    Absent,
    /// The space has twisted sectors whose contributions are not computed.
    NotComputed { sectors: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmbientGamma {
    pub untwisted: TruncPoly,
    pub twisted: TwistedSectors,
}

/// Number of nontrivial twisted sectors of `P(w)`: one for each `f in (0,1)`
/// with `f w_i` integral for at least one `i`.
fn twisted_sector_count(weights: &[u32]) -> usize {
    let mut fs: Vec<Rat> = Vec::new();
    for &w in weights {
        for k in 1..w {
            let f = rat(k as i64, w as i64);
            if !fs.contains(&f) {
                fs.push(f);
            }
        }
    }
    fs.len()
}

pub fn gamma_wps(weights: &[u32], digits: u32) -> Result<AmbientGamma, GammaError> {
    let untwisted = gamma_wps_untwisted(weights, digits)?;
    let n = twisted_sector_count(weights);
    let twisted = if n == 0 { TwistedSectors::Absent } else { TwistedSectors::NotComputed { sectors: n } };
    Ok(AmbientGamma { untwisted, twisted })
}

/// Ambient expression of the Gamma class of a degree-`d` hypersurface in
/// `P(w)`: `prod Gamma(1 + w_i h) / Gamma(1 + d h)`. `d = 0` gives the
/// ambient class itself.
pub fn gamma_hypersurface_ambient(weights: &[u32], d: u32, digits: u32) -> Result<TruncPoly, GammaError> {
    check_weights(weights)?;
    let (s1, s2) = weight_moments(weights);
    let index = s1 - d as i64;
    if index < 1 {
        return Err(GammaError::IndexNotPositive(index));
    }
    if d > 0 {
        if let Some(&w) = weights.iter().find(|&&w| d % w != 0) {
            return Err(GammaError::DegreeNotDivisible { d, w });
        }
    }
    let p = bits_for_digits(digits);
    let (g1, g2) = log_gamma_coefficients(p);
    let d = d as i64;
    Ok(TruncPoly::exp_nilpotent(&(g1 * Real::from_i64(s1 - d, p)), &(g2 * Real::from_i64(s2 - d * d, p))))
}

/// `c_1^2` and `c_2` as multiples of the point class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChernData {
    pub c1_squared: i64,
    pub c2: i64,
}

impl ChernData {
    /// `ch_2 = (c_1^2 - 2 c_2) / 2`.
    pub fn ch2(&self) -> Rat {
        rat(self.c1_squared - 2 * self.c2, 2)
    }
}

pub fn chern_data(s: SurfaceId) -> ChernData {
    ChernData { c1_squared: s.degree(), c2: s.euler_characteristic() }
}

/// Gamma class of a surface, `1 + a c_1 + b [pt]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceGamma {
    pub surface: SurfaceId,
    pub unit: Real,
    pub c1: Real,
    pub pt: Real,
}

impl SurfaceGamma {
    /// Coefficients over `{1, H, E_1, .., E_r, pt}` (`{1, h, pt}` for `P2`,
    /// `{1, h1, h2, pt}` for `P1xP1`).
    pub fn coefficients(&self) -> Vec<(String, Real)> {
        let p = self.c1.precision();
        let mut out = Vec::new();
        out.push((String::from("1"), self.unit.clone()));
        match self.surface {
            SurfaceId::P2 => out.push((String::from("h"), &self.c1 * &Real::from_i64(3, p))),
            SurfaceId::P1xP1 => {
                let two = &self.c1 * &Real::from_i64(2, p);
                out.push((String::from("h1"), two.clone()));
                out.push((String::from("h2"), two));
            }
            SurfaceId::X(r) => {
                out.push((String::from("H"), &self.c1 * &Real::from_i64(3, p)));
                for i in 1..=r {
                    out.push((format!("E{i}"), -&self.c1));
                }
            }
        }
        out.push((String::from("pt"), self.pt.clone()));
        out
    }
}

/// `exp(-C_eu c_1 + zeta(2) ch_2)` truncated to degree two.
pub fn gamma_surface(s: SurfaceId, digits: u32) -> SurfaceGamma {
    let p = bits_for_digits(digits);
    let ch = chern_data(s);
    let ce = Real::euler_gamma(p);
    let half = Real::parse_decimal("0.5", p);
    let pt = &ce * &ce * &half * Real::from_i64(ch.c1_squared, p) + Real::zeta2(p) * Real::from_rat(&ch.ch2(), p);
    SurfaceGamma { surface: s, unit: Real::one(p), c1: -ce, pt }
}
