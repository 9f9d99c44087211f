use core::fmt;
use core::str::FromStr;

/// The ten del Pezzo surfaces: `P2`, `P1xP1` and the blowups `X1..X8`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SurfaceId {
    P2,
    P1xP1,
    X(u8),
}

impl SurfaceId {
    /// Canonical order used by every batch report.
    pub const ALL: [SurfaceId; 10] = [
        SurfaceId::P2,
        SurfaceId::P1xP1,
        SurfaceId::X(1),
        SurfaceId::X(2),
        SurfaceId::X(3),
        SurfaceId::X(4),
        SurfaceId::X(5),
        SurfaceId::X(6),
        SurfaceId::X(7),
        SurfaceId::X(8),
    ];

    pub fn blowup(r: u8) -> Option<SurfaceId> {
        (1..=8).contains(&r).then_some(SurfaceId::X(r))
    }

    /// Number of blown-up points, `None` for `P1xP1`.
    pub fn blowup_rank(self) -> Option<u8> {
        match self {
            SurfaceId::P2 => Some(0),
            SurfaceId::P1xP1 => None,
            SurfaceId::X(r) => Some(r),
        }
    }

    pub fn fano_index(self) -> u32 {
        match self {
            SurfaceId::P2 => 3,
            SurfaceId::P1xP1 => 2,
            SurfaceId::X(_) => 1,
        }
    }

    /// `c_1 . c_1`.
    pub fn degree(self) -> i64 {
        match self {
            SurfaceId::P2 => 9,
            SurfaceId::P1xP1 => 8,
            SurfaceId::X(r) => 9 - r as i64,
        }
    }

    /// Topological Euler characteristic, i.e. `c_2`.
    pub fn euler_characteristic(self) -> i64 {
        match self {
            SurfaceId::P2 => 3,
            SurfaceId::P1xP1 => 4,
            SurfaceId::X(r) => 3 + r as i64,
        }
    }

    /// Rank of the even cohomology.
    pub fn cohomology_rank(self) -> usize {
        self.euler_characteristic() as usize
    }

    pub fn is_toric(self) -> bool {
        matches!(self, SurfaceId::P2 | SurfaceId::P1xP1 | SurfaceId::X(1..=3))
    }
}

impl fmt::Display for SurfaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceId::P2 => f.write_str("P2"),
            SurfaceId::P1xP1 => f.write_str("P1xP1"),
            SurfaceId::X(r) => write!(f, "X{r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown surface `{0}` (expected P2, P1xP1 or X1..X8)")]
pub struct UnknownSurface(pub alloc::string::String);

impl FromStr for SurfaceId {
    type Err = UnknownSurface;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t.to_ascii_uppercase().as_str() {
            "P2" => return Ok(SurfaceId::P2),
            "P1XP1" | "P1P1" => return Ok(SurfaceId::P1xP1),
            _ => {}
        }
        let rest = t.strip_prefix('X').or_else(|| t.strip_prefix('x'));
        rest.and_then(|d| d.parse::<u8>().ok())
            .and_then(SurfaceId::blowup)
            .ok_or_else(|| UnknownSurface(t.into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn round_trip_names() {
        for s in SurfaceId::ALL {
            assert_eq!(s.to_string().parse::<SurfaceId>().unwrap(), s);
        }
        assert!("X9".parse::<SurfaceId>().is_err());
        assert!("bogus".parse::<SurfaceId>().is_err());
    }

    #[test]
    fn numerical_data() {
        assert_eq!(SurfaceId::X(6).degree(), 3);
        assert_eq!(SurfaceId::X(8).cohomology_rank(), 11);
        assert_eq!(SurfaceId::P1xP1.fano_index(), 2);
    }
}
