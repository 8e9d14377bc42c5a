//! Dominance relations and Pareto archives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dist;

/// Points closer than this in decision space are treated as duplicates by
/// filtered archives.
pub const DUPLICATE_RADIUS: f64 = 1e-10;

/// `a` dominates `b`: `a <= b` componentwise and `a != b`.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::ContractViolation(format!(
            "dominance between vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(dominates_unchecked(a, b))
}

#[inline]
pub(crate) fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

/// `a < b` in every component.
#[inline]
pub fn strictly_better(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x < y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArchiveMode {
    /// Every inserted point is kept (a weak front).
    Raw,
    /// Entries are kept mutually nondominated.
    Filtered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub z: Vec<f64>,
    pub f: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoArchive {
    mode: ArchiveMode,
    entries: Vec<ArchiveEntry>,
}

impl ParetoArchive {
    pub fn new(mode: ArchiveMode) -> Self {
        Self {
            mode,
            entries: Vec::new(),
        }
    }

    pub fn raw() -> Self {
        Self::new(ArchiveMode::Raw)
    }

    pub fn filtered() -> Self {
        Self::new(ArchiveMode::Filtered)
    }

    pub fn mode(&self) -> ArchiveMode {
        self.mode
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn objectives(&self) -> Vec<Vec<f64>> {
        self.entries.iter().map(|e| e.f.clone()).collect()
    }

    /// Inserts `(z, fz)`; returns whether the archive changed.
    ///
    /// Raw archives append. Filtered archives reject a newcomer that is
    /// dominated by (or duplicates) an existing entry and evict every entry
    /// the newcomer dominates.
    pub fn insert(&mut self, z: Vec<f64>, fz: Vec<f64>) -> bool {
        match self.mode {
            ArchiveMode::Raw => {
                self.entries.push(ArchiveEntry { z, f: fz });
                true
            }
            ArchiveMode::Filtered => {
                let rejected = self
                    .entries
                    .iter()
                    .any(|e| dominates_unchecked(&e.f, &fz) || dist(&e.z, &z) < DUPLICATE_RADIUS);
                if rejected {
                    return false;
                }
                self.entries.retain(|e| !dominates_unchecked(&fz, &e.f));
                self.entries.push(ArchiveEntry { z, f: fz });
                true
            }
        }
    }

    /// Filtered copy of this archive.
    pub fn filter(&self) -> ParetoArchive {
        let mut out = ParetoArchive::filtered();
        for e in &self.entries {
            out.insert(e.z.clone(), e.f.clone());
        }
        out
    }

    /// Appends all entries of `other` through [`ParetoArchive::insert`].
    pub fn merge(&mut self, other: &ParetoArchive) {
        for e in &other.entries {
            self.insert(e.z.clone(), e.f.clone());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fs(a: &ParetoArchive) -> Vec<Vec<f64>> {
        let mut v = a.objectives();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&[0.0, 1.0], &[1.0, 1.0]).unwrap());
        assert!(!dominates(&[0.0, 1.0], &[1.0, 0.0]).unwrap());
        assert!(!dominates(&[1.0, 1.0], &[1.0, 1.0]).unwrap());
        assert!(matches!(
            dominates(&[1.0], &[1.0, 2.0]),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn filtered_insert_examples() {
        let mut a = ParetoArchive::filtered();
        a.insert(vec![0.0], vec![0.0, 1.0]);
        a.insert(vec![1.0], vec![1.0, 0.0]);
        assert_eq!(fs(&a), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);

        assert!(!a.insert(vec![2.0], vec![2.0, 2.0]));
        assert_eq!(a.len(), 2);

        assert!(a.insert(vec![3.0], vec![0.0, 0.0]));
        assert_eq!(fs(&a), vec![vec![0.0, 0.0]]);
    }

    #[test]
    fn filtered_archive_drops_decision_space_duplicates() {
        let mut a = ParetoArchive::filtered();
        assert!(a.insert(vec![0.5, 0.5], vec![1.0, 2.0]));
        assert!(!a.insert(vec![0.5, 0.5 + 1e-12], vec![1.0, 2.0]));
        // equal objectives at a distinct point are kept
        assert!(a.insert(vec![0.7, 0.5], vec![1.0, 2.0]));
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn raw_archive_keeps_everything() {
        let mut a = ParetoArchive::raw();
        a.insert(vec![0.0], vec![1.0, 1.0]);
        a.insert(vec![0.0], vec![1.0, 1.0]);
        a.insert(vec![0.0], vec![2.0, 2.0]);
        assert_eq!(a.len(), 3);
        assert_eq!(a.filter().len(), 1);
    }

    #[test]
    fn strictly_better_is_componentwise() {
        assert!(strictly_better(&[0.0, 0.0], &[1.0, 1.0]));
        assert!(!strictly_better(&[0.0, 1.0], &[1.0, 1.0]));
    }
}
