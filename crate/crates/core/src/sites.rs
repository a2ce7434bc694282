//! Site labelling for the 13-site network register.
//!
//! Memory qubit `(row, col)` with `row, col ∈ {1,2,3}` occupies site
//! `3*(row-1) + (col-1)`; relays `R1..R4` occupy sites 9..12.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MEMORY_SITES: usize = 9;
pub const RELAY_SITES: usize = 4;
pub const TOTAL_SITES: usize = MEMORY_SITES + RELAY_SITES;

/// A global site index in `0..13`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site(u8);

impl Site {
    pub fn new(index: usize) -> Result<Self> {
        if index < TOTAL_SITES {
            Ok(Site(index as u8))
        } else {
            Err(Error::InvalidSite(format!("site index {index} out of range")))
        }
    }

    /// Memory qubit in `row`, `col` (both 1-based).
    ///
    /// Panics if either coordinate is outside `1..=3`.
    pub fn memory(row: usize, col: usize) -> Self {
        assert!((1..=3).contains(&row) && (1..=3).contains(&col), "memory qubit ({row},{col})");
        Site((3 * (row - 1) + (col - 1)) as u8)
    }

    /// Relay `R{index}` (1-based). Panics outside `1..=4`.
    pub fn relay(index: usize) -> Self {
        assert!((1..=4).contains(&index), "relay R{index}");
        Site((MEMORY_SITES + index - 1) as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_memory(self) -> bool {
        self.index() < MEMORY_SITES
    }

    pub fn is_relay(self) -> bool {
        !self.is_memory()
    }

    /// `(row, col)` for memory qubits.
    pub fn row_col(self) -> Option<(usize, usize)> {
        self.is_memory().then(|| (self.index() / 3 + 1, self.index() % 3 + 1))
    }

    /// Relay number `1..=4` for relay sites.
    pub fn relay_index(self) -> Option<usize> {
        self.is_relay().then(|| self.index() - MEMORY_SITES + 1)
    }

    pub fn all() -> impl Iterator<Item = Site> {
        (0..TOTAL_SITES).map(|i| Site(i as u8))
    }

    pub fn all_memory() -> impl Iterator<Item = Site> {
        (0..MEMORY_SITES).map(|i| Site(i as u8))
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.row_col(), self.relay_index()) {
            (Some((r, c)), _) => write!(f, "Q({r},{c})"),
            (_, Some(i)) => write!(f, "R{i}"),
            _ => unreachable!(),
        }
    }
}

impl FromStr for Site {
    type Err = Error;

    /// Accepts `Q(1,2)`, `Q12`, `R3`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSite(format!("cannot parse site label {s:?}"));
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('R') {
            let i: usize = rest.parse().map_err(|_| bad())?;
            return if (1..=4).contains(&i) { Ok(Site::relay(i)) } else { Err(bad()) };
        }
        let rest = s.strip_prefix('Q').ok_or_else(bad)?;
        let digits: Vec<usize> =
            rest.chars().filter(|c| c.is_ascii_digit()).map(|c| c.to_digit(10).unwrap() as usize).collect();
        match digits.as_slice() {
            [r, c] if (1..=3).contains(r) && (1..=3).contains(c) => Ok(Site::memory(*r, *c)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Site {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Site {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An ordered set of sites defining a tensor-product Hilbert space.
///
/// Sites are kept in ascending global order; the first site is the most
/// significant bit of a basis index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SiteSpace {
    sites: Vec<Site>,
    positions: [Option<u8>; TOTAL_SITES],
}

impl SiteSpace {
    pub fn new(sites: impl IntoIterator<Item = Site>) -> Self {
        let mut sites: Vec<Site> = sites.into_iter().collect();
        sites.sort();
        sites.dedup();
        let mut positions = [None; TOTAL_SITES];
        for (p, s) in sites.iter().enumerate() {
            positions[s.index()] = Some(p as u8);
        }
        SiteSpace { sites, positions }
    }

    /// All 9 memory qubits and 4 relays.
    pub fn full() -> Self {
        Self::new(Site::all())
    }

    pub fn memory() -> Self {
        Self::new(Site::all_memory())
    }

    pub fn empty() -> Self {
        Self::new(std::iter::empty())
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn dim(&self) -> usize {
        1usize << self.sites.len()
    }

    pub fn contains(&self, site: Site) -> bool {
        self.positions[site.index()].is_some()
    }

    pub fn position(&self, site: Site) -> Option<usize> {
        self.positions[site.index()].map(usize::from)
    }

    /// Bit shift of `site` inside a basis index of this space.
    pub fn shift(&self, site: Site) -> Option<usize> {
        self.position(site).map(|p| self.sites.len() - 1 - p)
    }

    pub fn union(&self, other: &SiteSpace) -> SiteSpace {
        SiteSpace::new(self.sites.iter().chain(other.sites.iter()).copied())
    }
}
