//! Low-degree genus-zero Gromov-Witten invariants of `X_r`.
//!
//! Three kinds are stored: the unpointed count of a degree-1 class, the
//! one-point invariant `<[pt]>_A` of a degree-2 class and the two-point
//! invariant `<[pt],[pt]>_A` of a degree-3 class. The table is keyed by
//! orbit representative and filled out over the whole orbit of the Cremona
//! involution and the point swaps on load.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use hashbrown::HashMap;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::lattice::{orbit, DivClass, EffectiveClasses, LatticeError};
use crate::linalg::{int, Rat};

pub const BUNDLED_TABLE: &str = include_str!("../data/gw_invariants.tbl");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GwKind {
    N0,
    Pt,
    PtPt,
}

impl GwKind {
    /// Anticanonical degree of the classes this kind applies to.
    pub fn degree(self) -> i64 {
        match self {
            GwKind::N0 => 1,
            GwKind::Pt => 2,
            GwKind::PtPt => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GwKind::N0 => "N0",
            GwKind::Pt => "PT",
            GwKind::PtPt => "PTPT",
        }
    }
}

impl fmt::Display for GwKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GwKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_uppercase().as_str() {
            "N0" => Ok(GwKind::N0),
            "PT" => Ok(GwKind::Pt),
            "PTPT" => Ok(GwKind::PtPt),
            other => Err(format!("unknown kind {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GwEntry {
    pub class: DivClass,
    pub kind: GwKind,
    pub value: Rat,
    pub provenance: String,
}

impl GwEntry {
    pub fn r(&self) -> u8 {
        self.class.r()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GwError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{kind} values {first} and {second} meet on the orbit of {class}")]
    SymmetryViolation { class: DivClass, kind: GwKind, first: Rat, second: Rat },
    #[error("seed value check failed: {0}")]
    SeedMismatch(String),
    #[error("no {kind} value for {class} on X_{r}", r = class.r())]
    MissingEntry { class: DivClass, kind: GwKind },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// The values every table must carry for each `r` it covers.
pub fn seeds(r: u8) -> [(DivClass, GwKind, i64); 3] {
    let h = DivClass::h(r);
    let e1 = DivClass::e(r, 1);
    let e2 = DivClass::e(r, 2);
    [(h - e1 - e2, GwKind::N0, 1), (h - e1, GwKind::Pt, 1), (h, GwKind::PtPt, 1)]
}

#[derive(Clone, Debug, Default)]
pub struct GwTable {
    listed: Vec<GwEntry>,
    values: HashMap<(DivClass, GwKind), (Rat, usize)>,
    ranks: BTreeSet<u8>,
}

fn parse_rat(s: &str) -> Option<Rat> {
    let (n, d) = s.trim().split_once('/')?;
    let n: BigInt = n.trim().parse().ok()?;
    let d: BigInt = d.trim().parse().ok()?;
    if d.is_zero() || d.is_negative() {
        return None;
    }
    Some(Rat::new(n, d))
}

fn parse_line(line: &str, no: usize) -> Result<GwEntry, GwError> {
    let err = |msg: String| GwError::Parse { line: no, msg };
    let fields: Vec<&str> = line.splitn(5, '|').collect();
    if fields.len() != 5 {
        return Err(err(format!("expected 5 fields, found {}", fields.len())));
    }
    let r: u8 = fields[0].trim().parse().map_err(|_| err(format!("bad r {:?}", fields[0])))?;
    if !(3..=8).contains(&r) {
        return Err(err(format!("r = {r} outside 3..=8")));
    }
    let ds = fields[1]
        .split(',')
        .map(|x| x.trim().parse::<i32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| err(format!("bad class {:?}", fields[1])))?;
    if ds.len() != r as usize + 1 {
        return Err(err(format!("class has {} coefficients, r = {r} needs {}", ds.len(), r + 1)));
    }
    let class = DivClass::new(ds[0], &ds[1..]);
    let kind: GwKind = fields[2].parse().map_err(err)?;
    let value = parse_rat(fields[3]).ok_or_else(|| err(format!("bad rational {:?}", fields[3])))?;
    if class.degree() != kind.degree() {
        return Err(err(format!("{kind} needs degree {}, class has degree {}", kind.degree(), class.degree())));
    }
    if value.is_negative() {
        return Err(err(format!("negative value {value}")));
    }
    Ok(GwEntry { class, kind, value, provenance: fields[4].trim().to_owned() })
}

impl GwTable {
    /// Parse, validate and orbit-fill a table in the line format
    /// `r|d0,d1,..,dr|kind|num/den|provenance`.
    pub fn parse(text: &str) -> Result<Self, GwError> {
        let mut listed = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            listed.push(parse_line(line, i + 1)?);
        }
        Self::from_entries(listed)
    }

    pub fn from_entries(listed: Vec<GwEntry>) -> Result<Self, GwError> {
        let mut ranks = BTreeSet::new();
        for e in &listed {
            ranks.insert(e.r());
        }
        let mut effective: HashMap<u8, EffectiveClasses> = HashMap::new();
        for &r in &ranks {
            effective.insert(r, EffectiveClasses::new(r)?);
        }
        for (i, e) in listed.iter().enumerate() {
            if !effective[&e.r()].contains(&e.class)? {
                return Err(GwError::Parse { line: i + 1, msg: format!("{} is not effective", e.class) });
            }
        }
        let mut values: HashMap<(DivClass, GwKind), (Rat, usize)> = HashMap::new();
        for (idx, e) in listed.iter().enumerate() {
            if let Some((v, _)) = values.get(&(e.class, e.kind)) {
                if *v != e.value {
                    return Err(GwError::SymmetryViolation {
                        class: e.class,
                        kind: e.kind,
                        first: v.clone(),
                        second: e.value.clone(),
                    });
                }
                continue;
            }
            for a in orbit(&e.class) {
                match values.get(&(a, e.kind)) {
                    Some((v, _)) if *v != e.value => {
                        return Err(GwError::SymmetryViolation {
                            class: e.class,
                            kind: e.kind,
                            first: v.clone(),
                            second: e.value.clone(),
                        })
                    }
                    Some(_) => {}
                    None => {
                        values.insert((a, e.kind), (e.value.clone(), idx));
                    }
                }
            }
        }
        let table = GwTable { listed, values, ranks };
        table.check_seeds()?;
        Ok(table)
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_TABLE).expect("bundled table validates")
    }

    fn check_seeds(&self) -> Result<(), GwError> {
        for &r in &self.ranks {
            for (class, kind, want) in seeds(r) {
                match self.values.get(&(class, kind)) {
                    None => return Err(GwError::SeedMismatch(format!("{kind}({class}) missing for r = {r}"))),
                    Some((v, _)) if *v != int(want) => {
                        return Err(GwError::SeedMismatch(format!("{kind}({class}) = {v} on X_{r}, expected {want}")))
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }

    /// Surfaces covered by the table.
    pub fn ranks(&self) -> impl Iterator<Item = u8> + '_ {
        self.ranks.iter().copied()
    }

    pub fn covers(&self, r: u8) -> bool {
        self.ranks.contains(&r)
    }

    /// Lines as written in the source, one per orbit.
    pub fn listed(&self) -> &[GwEntry] {
        &self.listed
    }

    /// Number of (class, kind) pairs after orbit filling.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Provenance of the line that supplied the value of `class`.
    pub fn provenance(&self, class: &DivClass, kind: GwKind) -> Option<&str> {
        self.values.get(&(*class, kind)).map(|(_, i)| self.listed[*i].provenance.as_str())
    }

    /// Value of the invariant. A class whose degree does not match the kind
    /// has negative virtual dimension and gets 0; an exceptional class with
    /// no N0 line gets 1.
    pub fn invariant(&self, class: &DivClass, kind: GwKind) -> Result<Rat, GwError> {
        if class.degree() != kind.degree() {
            return Ok(Rat::zero());
        }
        if let Some((v, _)) = self.values.get(&(*class, kind)) {
            return Ok(v.clone());
        }
        if kind == GwKind::N0 && class.self_intersection() == -1 {
            return Ok(int(1));
        }
        Err(GwError::MissingEntry { class: *class, kind })
    }

    /// Every (class, kind) pair with its value, in no particular order.
    pub fn iter(&self) -> impl Iterator<Item = (&DivClass, GwKind, &Rat)> {
        self.values.iter().map(|((c, k), (v, _))| (c, *k, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_only_table_is_empty() {
        let t = GwTable::parse("# nothing here\n\n").unwrap();
        assert!(t.is_empty());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = GwTable::parse("# c\n3|1,0,0|PTPT|1/1|x\n").unwrap_err();
        assert!(matches!(e, GwError::Parse { line: 2, .. }));
        let e = GwTable::parse("3|1,0,0,0|PTPT|1.5|x\n").unwrap_err();
        assert!(matches!(e, GwError::Parse { line: 1, .. }));
        let e = GwTable::parse("3|1,0,0,0|PT|1/1|x\n").unwrap_err();
        assert!(matches!(e, GwError::Parse { .. }));
        let e = GwTable::parse("3|1,0,0,0|PTPT|-1/1|x\n").unwrap_err();
        assert!(matches!(e, GwError::Parse { .. }));
    }

    #[test]
    fn missing_seed_is_reported() {
        let e = GwTable::parse("3|1,0,0,0|PTPT|1/1|x\n").unwrap_err();
        assert!(matches!(e, GwError::SeedMismatch(_)));
    }

    #[test]
    fn wrong_seed_is_reported() {
        let t = "3|1,1,1,0|N0|1/1|s\n3|1,1,0,0|PT|2/1|s\n3|1,0,0,0|PTPT|1/1|s\n";
        assert!(matches!(GwTable::parse(t), Err(GwError::SeedMismatch(_))));
    }

    #[test]
    fn conflicting_orbit_values() {
        // H - E1 and H - E2 are swapped by a transposition
        let t = "3|1,1,0,0|PT|1/1|s\n3|1,0,1,0|PT|3/1|s\n";
        assert!(matches!(GwTable::parse(t), Err(GwError::SymmetryViolation { .. })));
    }
}
