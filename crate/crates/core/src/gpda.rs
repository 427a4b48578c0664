//! Generalized placement delivery arrays for shared-cache networks.
//!
//! A generalized PDA is an `F x K` grid whose integer entries carry a
//! superscript: `s^(i)` marks the i-th user of some cache that still needs
//! subfile `j` served under multicast index `s`. [`expand`] builds one from a
//! base PDA and an association profile by replicating each cache column once
//! per attached user; [`recover_association`] inverts that grouping.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::pda::{Cell, PdaArray, PdaEntry};

/// A superscripted integer entry `s^(i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    /// The multicast index `s` in `[0, S)`.
    pub value: u32,
    /// The copy index `i >= 1` (which user of the cache the cell belongs to).
    pub superscript: u32,
}

impl Label {
    pub fn new(value: u32, superscript: u32) -> Self {
        Self { value, superscript }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^({})", self.value, self.superscript)
    }
}

/// One entry of a generalized PDA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GpdaEntry {
    Star,
    Labeled(Label),
}

impl GpdaEntry {
    pub fn is_star(self) -> bool {
        matches!(self, GpdaEntry::Star)
    }

    pub fn label(self) -> Option<Label> {
        match self {
            GpdaEntry::Star => None,
            GpdaEntry::Labeled(l) => Some(l),
        }
    }

    /// The integer value, ignoring the superscript.
    pub fn value(self) -> Option<u32> {
        self.label().map(|l| l.value)
    }
}

impl fmt::Display for GpdaEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GpdaEntry::Star => f.write_str("*"),
            GpdaEntry::Labeled(l) => write!(f, "{}^{}", l.value, l.superscript),
        }
    }
}

/// Errors raised while assembling or deriving generalized arrays.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GpdaError {
    #[error("array needs at least one row and one column (got {rows}x{cols})")]
    EmptyArray { rows: usize, cols: usize },
    #[error("grid has {found} entries, expected {rows}x{cols} = {expected}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        expected: usize,
        found: usize,
    },
    #[error("declared stars per column Z = {stars} exceeds row count F = {rows}")]
    StarsExceedRows { stars: usize, rows: usize },
    #[error("profile has {found} caches, array has {expected} columns")]
    ProfileLengthMismatch { expected: usize, found: usize },
    #[error("profile assigns no users to any cache")]
    EmptyNetwork,
    #[error(
        "grouping by shared integers is inconsistent: columns {col_a} and {col_b} \
         fall in overlapping but unequal groups"
    )]
    InconsistentGrouping { col_a: usize, col_b: usize },
    #[error(
        "columns {col_a} and {col_b} share integer {value} in row {row} but their \
         star patterns differ"
    )]
    GroupStarMismatch {
        value: u32,
        row: usize,
        col_a: usize,
        col_b: usize,
    },
}

/// Users-per-cache counts: entry λ is how many users share cache λ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociationProfile {
    counts: Vec<usize>,
}

impl AssociationProfile {
    pub fn new(counts: Vec<usize>) -> Self {
        Self { counts }
    }

    /// The same count for every cache.
    pub fn uniform(num_caches: usize, users_per_cache: usize) -> Self {
        Self {
            counts: vec![users_per_cache; num_caches],
        }
    }

    pub fn num_caches(&self) -> usize {
        self.counts.len()
    }

    /// Total number of users, the K of the expanded array.
    pub fn total_users(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Largest per-cache count (0 for an empty profile).
    pub fn max_count(&self) -> usize {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }
}

impl fmt::Display for AssociationProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The user partition: which users attach to which cache.
///
/// Blocks are ordered by cache; a zero-occupancy cache keeps an empty block
/// so block lengths always match the profile that produced the assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserAssignment {
    blocks: Vec<Vec<usize>>,
}

impl UserAssignment {
    pub fn new(blocks: Vec<Vec<usize>>) -> Self {
        Self { blocks }
    }

    /// Consecutive user indices per cache, in profile order.
    pub fn from_profile(profile: &AssociationProfile) -> Self {
        let mut blocks = Vec::with_capacity(profile.num_caches());
        let mut next = 0;
        for &count in profile.counts() {
            blocks.push((next..next + count).collect());
            next += count;
        }
        Self { blocks }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// The partition with empty blocks dropped.
    pub fn nonempty_blocks(&self) -> Vec<&[usize]> {
        self.blocks
            .iter()
            .filter(|b| !b.is_empty())
            .map(|b| b.as_slice())
            .collect()
    }

    /// Index of the block containing the given user.
    pub fn cache_of(&self, user: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&user))
    }

    /// Two assignments describe the same grouping if their nonempty blocks
    /// agree in order.
    pub fn same_partition(&self, other: &UserAssignment) -> bool {
        self.nonempty_blocks() == other.nonempty_blocks()
    }
}

impl fmt::Display for UserAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (cache, block) in self.blocks.iter().enumerate() {
            if cache > 0 {
                writeln!(f)?;
            }
            let users: Vec<String> = block.iter().map(|u| u.to_string()).collect();
            write!(f, "cache {cache}: users {{{}}}", users.join(","))?;
        }
        Ok(())
    }
}

/// An `F x K` generalized placement delivery array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedPdaArray {
    num_users: usize,
    num_rows: usize,
    stars_per_column: usize,
    num_integers: u32,
    max_superscript: u32,
    grid: Vec<GpdaEntry>,
}

impl GeneralizedPdaArray {
    pub fn new(
        num_users: usize,
        num_rows: usize,
        stars_per_column: usize,
        num_integers: u32,
        max_superscript: u32,
        grid: Vec<GpdaEntry>,
    ) -> Result<Self, GpdaError> {
        if num_users == 0 || num_rows == 0 {
            return Err(GpdaError::EmptyArray {
                rows: num_rows,
                cols: num_users,
            });
        }
        if stars_per_column > num_rows {
            return Err(GpdaError::StarsExceedRows {
                stars: stars_per_column,
                rows: num_rows,
            });
        }
        let expected = num_rows * num_users;
        if grid.len() != expected {
            return Err(GpdaError::DimensionMismatch {
                rows: num_rows,
                cols: num_users,
                expected,
                found: grid.len(),
            });
        }
        Ok(Self {
            num_users,
            num_rows,
            stars_per_column,
            num_integers,
            max_superscript,
            grid,
        })
    }

    /// Number of columns, one per user (K).
    pub fn num_users(&self) -> usize {
        self.num_users
    }

    /// Number of rows (the sub-packetization F).
    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn stars_per_column(&self) -> usize {
        self.stars_per_column
    }

    pub fn num_integers(&self) -> u32 {
        self.num_integers
    }

    /// Largest declared superscript (I).
    pub fn max_superscript(&self) -> u32 {
        self.max_superscript
    }

    pub fn entry(&self, row: usize, col: usize) -> GpdaEntry {
        self.grid[row * self.num_users + col]
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = GpdaEntry> + '_ {
        (0..self.num_rows).map(move |j| self.entry(j, col))
    }

    pub fn star_rows(&self, col: usize) -> Vec<usize> {
        (0..self.num_rows)
            .filter(|&j| self.entry(j, col).is_star())
            .collect()
    }

    pub fn cells(&self) -> impl Iterator<Item = (Cell, GpdaEntry)> + '_ {
        self.grid
            .iter()
            .enumerate()
            .map(|(idx, &e)| ((idx / self.num_users, idx % self.num_users), e))
    }

    /// Distinct labels present in the grid, sorted by value then superscript.
    pub fn labels(&self) -> Vec<Label> {
        let mut labels: Vec<Label> = Vec::new();
        for (_, entry) in self.cells() {
            if let Some(label) = entry.label() {
                labels.push(label);
            }
        }
        labels.sort();
        labels.dedup();
        labels
    }

    /// Check conditions C1-C4 plus label ranges, collecting every violation.
    pub fn validate(&self) -> GpdaValidationReport {
        let mut violations = Vec::new();

        // Label ranges: value in [0, S), superscript in [1, I].
        for ((row, col), entry) in self.cells() {
            if let Some(label) = entry.label() {
                if label.value >= self.num_integers {
                    violations.push(GpdaViolation::IntegerOutOfRange {
                        row,
                        col,
                        value: label.value,
                        num_integers: self.num_integers,
                    });
                }
                if label.superscript == 0 || label.superscript > self.max_superscript {
                    violations.push(GpdaViolation::SuperscriptOutOfRange {
                        row,
                        col,
                        superscript: label.superscript,
                        max_superscript: self.max_superscript,
                    });
                }
            }
        }

        // C1: exactly Z stars in each column.
        for col in 0..self.num_users {
            let found = self.column(col).filter(|e| e.is_star()).count();
            if found != self.stars_per_column {
                violations.push(GpdaViolation::ColumnStars {
                    col,
                    found,
                    expected: self.stars_per_column,
                });
            }
        }

        // C2: every integer and every superscript occurs at least once.
        let mut value_seen = vec![false; self.num_integers as usize];
        let mut superscript_seen = vec![false; self.max_superscript as usize];
        for (_, entry) in self.cells() {
            if let Some(label) = entry.label() {
                if let Some(slot) = value_seen.get_mut(label.value as usize) {
                    *slot = true;
                }
                if label.superscript >= 1 {
                    if let Some(slot) = superscript_seen.get_mut(label.superscript as usize - 1) {
                        *slot = true;
                    }
                }
            }
        }
        for (value, present) in value_seen.iter().enumerate() {
            if !present {
                violations.push(GpdaViolation::MissingInteger {
                    value: value as u32,
                });
            }
        }
        for (idx, present) in superscript_seen.iter().enumerate() {
            if !present {
                violations.push(GpdaViolation::MissingSuperscript {
                    superscript: idx as u32 + 1,
                });
            }
        }

        // C3: equal labels (same value and superscript) sit in distinct rows
        // and columns with stars at the cross cells.
        let mut by_label: BTreeMap<Label, Vec<Cell>> = BTreeMap::new();
        for ((row, col), entry) in self.cells() {
            if let Some(label) = entry.label() {
                by_label.entry(label).or_default().push((row, col));
            }
        }
        for (&label, cells) in &by_label {
            for (a, &(j1, k1)) in cells.iter().enumerate() {
                for &(j2, k2) in &cells[a + 1..] {
                    if j1 == j2 {
                        violations.push(GpdaViolation::SameRow {
                            label,
                            row: j1,
                            col_a: k1,
                            col_b: k2,
                        });
                        continue;
                    }
                    if k1 == k2 {
                        violations.push(GpdaViolation::SameColumn {
                            label,
                            col: k1,
                            row_a: j1,
                            row_b: j2,
                        });
                        continue;
                    }
                    let cross_a = self.entry(j1, k2);
                    let cross_b = self.entry(j2, k1);
                    if !cross_a.is_star() || !cross_b.is_star() {
                        violations.push(GpdaViolation::CrossNotStar {
                            label,
                            first: (j1, k1),
                            second: (j2, k2),
                        });
                    }
                }
            }
        }

        // C4: columns sharing an integer value in some row must agree on
        // stars everywhere else. For each row, group columns by value and
        // compare star patterns pairwise.
        for j1 in 0..self.num_rows {
            let mut by_value: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
            for k in 0..self.num_users {
                if let Some(value) = self.entry(j1, k).value() {
                    by_value.entry(value).or_default().push(k);
                }
            }
            for cols in by_value.values() {
                for (a, &k1) in cols.iter().enumerate() {
                    for &k2 in &cols[a + 1..] {
                        for j2 in 0..self.num_rows {
                            if j2 == j1 {
                                continue;
                            }
                            let star_a = self.entry(j2, k1).is_star();
                            let star_b = self.entry(j2, k2).is_star();
                            if star_a && !star_b {
                                violations.push(GpdaViolation::StarPatternMismatch {
                                    anchor_row: j1,
                                    col_a: k1,
                                    row: j2,
                                    col_b: k2,
                                });
                            } else if star_b && !star_a {
                                violations.push(GpdaViolation::StarPatternMismatch {
                                    anchor_row: j1,
                                    col_a: k2,
                                    row: j2,
                                    col_b: k1,
                                });
                            }
                        }
                    }
                }
            }
        }

        GpdaValidationReport { violations }
    }
}

/// One failed condition of the generalized definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GpdaViolation {
    IntegerOutOfRange {
        row: usize,
        col: usize,
        value: u32,
        num_integers: u32,
    },
    SuperscriptOutOfRange {
        row: usize,
        col: usize,
        superscript: u32,
        max_superscript: u32,
    },
    /// C1: star count differs from Z.
    ColumnStars {
        col: usize,
        found: usize,
        expected: usize,
    },
    /// C2: an integer value never appears.
    MissingInteger { value: u32 },
    /// C2: a superscript in `[1, I]` never appears.
    MissingSuperscript { superscript: u32 },
    /// C3(a): equal labels share a row.
    SameRow {
        label: Label,
        row: usize,
        col_a: usize,
        col_b: usize,
    },
    /// C3(a): equal labels share a column.
    SameColumn {
        label: Label,
        col: usize,
        row_a: usize,
        row_b: usize,
    },
    /// C3(b): a cross cell is not a star.
    CrossNotStar {
        label: Label,
        first: Cell,
        second: Cell,
    },
    /// C4: `g[anchor_row, col_a]` and `g[anchor_row, col_b]` share an integer
    /// value, `g[row, col_a]` is a star, but `g[row, col_b]` is not.
    StarPatternMismatch {
        anchor_row: usize,
        col_a: usize,
        row: usize,
        col_b: usize,
    },
}

impl GpdaViolation {
    pub fn condition(&self) -> &'static str {
        match self {
            GpdaViolation::IntegerOutOfRange { .. }
            | GpdaViolation::SuperscriptOutOfRange { .. } => "range",
            GpdaViolation::ColumnStars { .. } => "C1",
            GpdaViolation::MissingInteger { .. } | GpdaViolation::MissingSuperscript { .. } => "C2",
            GpdaViolation::SameRow { .. } | GpdaViolation::SameColumn { .. } => "C3a",
            GpdaViolation::CrossNotStar { .. } => "C3b",
            GpdaViolation::StarPatternMismatch { .. } => "C4",
        }
    }
}

impl fmt::Display for GpdaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GpdaViolation::IntegerOutOfRange {
                row,
                col,
                value,
                num_integers,
            } => write!(
                f,
                "range: value {value} at ({row},{col}) is outside [0,{num_integers})"
            ),
            GpdaViolation::SuperscriptOutOfRange {
                row,
                col,
                superscript,
                max_superscript,
            } => write!(
                f,
                "range: superscript {superscript} at ({row},{col}) is outside [1,{max_superscript}]"
            ),
            GpdaViolation::ColumnStars {
                col,
                found,
                expected,
            } => write!(f, "C1: column {col} has {found} stars, expected {expected}"),
            GpdaViolation::MissingInteger { value } => {
                write!(f, "C2: integer {value} never appears")
            }
            GpdaViolation::MissingSuperscript { superscript } => {
                write!(f, "C2: superscript {superscript} never appears")
            }
            GpdaViolation::SameRow {
                label,
                row,
                col_a,
                col_b,
            } => write!(
                f,
                "C3: label {label} repeats in row {row} (columns {col_a} and {col_b})"
            ),
            GpdaViolation::SameColumn {
                label,
                col,
                row_a,
                row_b,
            } => write!(
                f,
                "C3: label {label} repeats in column {col} (rows {row_a} and {row_b})"
            ),
            GpdaViolation::CrossNotStar {
                label,
                first,
                second,
            } => write!(
                f,
                "C3: label {label} at ({},{}) and ({},{}) has non-star cross cells",
                first.0, first.1, second.0, second.1
            ),
            GpdaViolation::StarPatternMismatch {
                anchor_row,
                col_a,
                row,
                col_b,
            } => write!(
                f,
                "C4: columns {col_a} and {col_b} share an integer in row {anchor_row} \
                 but only ({row},{col_a}) is a star; quadruple (j1,k1,j2,k2) = \
                 ({anchor_row},{col_a},{row},{col_b})"
            ),
        }
    }
}

/// Outcome of a generalized-PDA validity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GpdaValidationReport {
    violations: Vec<GpdaViolation>,
}

impl GpdaValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[GpdaViolation] {
        &self.violations
    }

    pub fn has_condition(&self, condition: &str) -> bool {
        self.violations.iter().any(|v| v.condition() == condition)
    }
}

impl fmt::Display for GpdaValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("OK");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Expand a PDA into a generalized PDA for the given association profile.
///
/// Each cache column is replicated once per attached user; the r-th replica
/// carries superscript `r` on every integer entry. Users are numbered in
/// column order, so the returned assignment attaches consecutive user indices
/// to each cache. Zero-occupancy caches contribute no columns; if such a
/// cache was the only one carrying some integer, that integer is absent from
/// the result and its declared presence will be flagged by
/// [`GeneralizedPdaArray::validate`] as a C2 violation.
pub fn expand(
    pda: &PdaArray,
    profile: &AssociationProfile,
) -> Result<(GeneralizedPdaArray, UserAssignment), GpdaError> {
    if profile.num_caches() != pda.num_caches() {
        return Err(GpdaError::ProfileLengthMismatch {
            expected: pda.num_caches(),
            found: profile.num_caches(),
        });
    }
    let num_users = profile.total_users();
    if num_users == 0 {
        return Err(GpdaError::EmptyNetwork);
    }

    let num_rows = pda.num_rows();
    let has_integers = (0..pda.num_caches()).any(|col| pda.column(col).any(|e| !e.is_star()));
    let max_superscript = if has_integers {
        profile.max_count() as u32
    } else {
        0
    };

    let mut grid = vec![GpdaEntry::Star; num_rows * num_users];
    let mut user = 0;
    for (cache, &count) in profile.counts().iter().enumerate() {
        for copy in 1..=count {
            for row in 0..num_rows {
                grid[row * num_users + user] = match pda.entry(row, cache) {
                    PdaEntry::Star => GpdaEntry::Star,
                    PdaEntry::Int(value) => GpdaEntry::Labeled(Label::new(value, copy as u32)),
                };
            }
            user += 1;
        }
    }

    let g = GeneralizedPdaArray::new(
        num_users,
        num_rows,
        pda.stars_per_column(),
        pda.num_integers(),
        max_superscript,
        grid,
    )?;
    Ok((g, UserAssignment::from_profile(profile)))
}

/// Recover the user-to-cache grouping from a generalized PDA.
///
/// For every row and integer value, the columns carrying that value form one
/// group. Groups must be pairwise equal or disjoint and columns within a
/// group must share a star pattern. Columns that never carry an integer
/// (possible only in an all-star array) fall back to grouping by identical
/// star pattern, which cannot tell replicated all-star caches apart.
pub fn recover_association(g: &GeneralizedPdaArray) -> Result<UserAssignment, GpdaError> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of: Vec<Option<usize>> = vec![None; g.num_users()];

    for row in 0..g.num_rows() {
        let mut by_value: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for col in 0..g.num_users() {
            if let Some(value) = g.entry(row, col).value() {
                by_value.entry(value).or_default().push(col);
            }
        }
        for (&value, cols) in &by_value {
            // Star patterns must agree across the group.
            for pair in cols.windows(2) {
                if g.star_rows(pair[0]) != g.star_rows(pair[1]) {
                    return Err(GpdaError::GroupStarMismatch {
                        value,
                        row,
                        col_a: pair[0],
                        col_b: pair[1],
                    });
                }
            }
            let existing = cols.iter().filter_map(|&c| group_of[c]).next();
            match existing {
                Some(idx) => {
                    if groups[idx] != *cols {
                        let col_b = cols
                            .iter()
                            .copied()
                            .find(|&c| group_of[c] != Some(idx))
                            .unwrap_or(cols[0]);
                        return Err(GpdaError::InconsistentGrouping {
                            col_a: groups[idx][0],
                            col_b,
                        });
                    }
                }
                None => {
                    let idx = groups.len();
                    for &c in cols {
                        group_of[c] = Some(idx);
                    }
                    groups.push(cols.clone());
                }
            }
        }
    }

    // Columns with no integer at all: group by identical star pattern.
    let mut leftover: Vec<usize> = (0..g.num_users())
        .filter(|&c| group_of[c].is_none())
        .collect();
    while let Some(first) = leftover.first().copied() {
        let pattern = g.star_rows(first);
        let (matched, rest): (Vec<usize>, Vec<usize>) =
            leftover.iter().partition(|&&c| g.star_rows(c) == pattern);
        groups.push(matched);
        leftover = rest;
    }

    groups.sort_by_key(|block| block.first().copied().unwrap_or(usize::MAX));
    Ok(UserAssignment::new(groups))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::exemplar;

    fn entry(token: &str) -> GpdaEntry {
        if token == "*" {
            GpdaEntry::Star
        } else {
            let (v, i) = token.split_once('^').unwrap();
            GpdaEntry::Labeled(Label::new(v.parse().unwrap(), i.parse().unwrap()))
        }
    }

    fn gpda(
        users: usize,
        rows: usize,
        stars: usize,
        ints: u32,
        max_sup: u32,
        tokens: &[&str],
    ) -> GeneralizedPdaArray {
        let grid = tokens.iter().map(|t| entry(t)).collect();
        GeneralizedPdaArray::new(users, rows, stars, ints, max_sup, grid).unwrap()
    }

    /// The 2x8 expansion of the (4,2,1,2) array under profile (3,2,2,1).
    pub(crate) fn example_expansion() -> GeneralizedPdaArray {
        gpda(
            8,
            2,
            1,
            2,
            3,
            &[
                "*", "*", "*", "1^1", "1^2", "*", "*", "0^1", //
                "0^1", "0^2", "0^3", "*", "*", "1^1", "1^2", "*",
            ],
        )
    }

    #[test]
    fn expand_reproduces_the_two_row_example() {
        let pda = exemplar("ex1").unwrap();
        let profile = AssociationProfile::new(vec![3, 2, 2, 1]);
        let (g, assignment) = expand(&pda, &profile).unwrap();
        assert_eq!(g, example_expansion());
        assert_eq!(
            assignment.blocks(),
            &[vec![0, 1, 2], vec![3, 4], vec![5, 6], vec![7]]
        );
        assert!(g.validate().is_ok());
    }

    #[test]
    fn expand_with_one_user_per_cache_adds_superscript_one() {
        let pda = exemplar("ex1").unwrap();
        let (g, _) = expand(&pda, &AssociationProfile::uniform(4, 1)).unwrap();
        assert_eq!(g.num_users(), 4);
        assert_eq!(g.max_superscript(), 1);
        for ((row, col), e) in g.cells() {
            match pda.entry(row, col) {
                PdaEntry::Star => assert!(e.is_star()),
                PdaEntry::Int(v) => assert_eq!(e.label(), Some(Label::new(v, 1))),
            }
        }
    }

    #[test]
    fn expand_rejects_wrong_profile_length() {
        let pda = exemplar("ex1").unwrap();
        let err = expand(&pda, &AssociationProfile::new(vec![1, 1])).unwrap_err();
        assert_eq!(
            err,
            GpdaError::ProfileLengthMismatch {
                expected: 4,
                found: 2
            }
        );
    }

    #[test]
    fn expand_rejects_empty_network() {
        let pda = exemplar("ex1").unwrap();
        let err = expand(&pda, &AssociationProfile::new(vec![0, 0, 0, 0])).unwrap_err();
        assert_eq!(err, GpdaError::EmptyNetwork);
    }

    #[test]
    fn expand_drops_zero_occupancy_caches() {
        let pda = exemplar("ex1").unwrap();
        let profile = AssociationProfile::new(vec![2, 0, 1, 1]);
        let (g, assignment) = expand(&pda, &profile).unwrap();
        assert_eq!(g.num_users(), 4);
        assert_eq!(assignment.blocks(), &[vec![0, 1], vec![], vec![2], vec![3]]);
        // Both integers survive in the remaining columns.
        assert!(g.validate().is_ok(), "{}", g.validate());
    }

    #[test]
    fn validate_flags_mutated_example() {
        // Turning the star at (1,7) into 0^1 breaks C1, C3 and C4 at once.
        let mut tokens = vec![
            "*", "*", "*", "1^1", "1^2", "*", "*", "0^1", //
            "0^1", "0^2", "0^3", "*", "*", "1^1", "1^2", "*",
        ];
        tokens[15] = "0^1";
        let g = gpda(8, 2, 1, 2, 3, &tokens);
        let report = g.validate();
        assert!(report.has_condition("C4"));
        assert!(report.violations().iter().any(|v| matches!(
            v,
            GpdaViolation::StarPatternMismatch {
                anchor_row: 1,
                col_a: 0,
                row: 0,
                col_b: 7,
            }
        )));
        assert!(report.has_condition("C1"));
        assert!(report.has_condition("C3a"));
    }

    #[test]
    fn validate_checks_superscript_range() {
        let g = gpda(2, 2, 1, 1, 1, &["*", "0^2", "0^1", "*"]);
        let report = g.validate();
        assert!(report.violations().iter().any(|v| matches!(
            v,
            GpdaViolation::SuperscriptOutOfRange { superscript: 2, .. }
        )));
        // Declared I = 1 is present, so only the range violation fires for C2.
        assert!(!report.has_condition("C1"));
    }

    #[test]
    fn recover_groups_the_example_partition() {
        let g = example_expansion();
        let assignment = recover_association(&g).unwrap();
        assert_eq!(
            assignment.blocks(),
            &[vec![0, 1, 2], vec![3, 4], vec![5, 6], vec![7]]
        );
    }

    #[test]
    fn recover_yields_singletons_for_distinct_caches() {
        let pda = exemplar("ex1").unwrap();
        let (g, expected) = expand(&pda, &AssociationProfile::uniform(4, 1)).unwrap();
        let recovered = recover_association(&g).unwrap();
        assert!(recovered.same_partition(&expected));
        assert_eq!(recovered.blocks().len(), 4);
    }

    #[test]
    fn recover_detects_inconsistent_grouping() {
        // Valid under C1-C4, yet the (row, value) groups {0,1} and {1,2}
        // overlap without being equal; no expansion produces this array.
        let g = gpda(
            3,
            3,
            1,
            4,
            2,
            &[
                "0^1", "0^2", "2^1", //
                "*", "*", "*", //
                "3^1", "1^1", "1^2",
            ],
        );
        assert!(g.validate().is_ok(), "{}", g.validate());
        let err = recover_association(&g).unwrap_err();
        assert!(matches!(err, GpdaError::InconsistentGrouping { .. }));
    }

    #[test]
    fn recover_flags_star_mismatch_on_unvalidated_input() {
        // Columns 0 and 1 share value 0 in row 0 but disagree on stars.
        let g = gpda(2, 2, 1, 1, 2, &["0^1", "0^2", "*", "1^1"]);
        let err = recover_association(&g).unwrap_err();
        assert!(matches!(err, GpdaError::GroupStarMismatch { .. }));
    }

    #[test]
    fn recover_groups_all_star_columns_by_pattern() {
        let g = gpda(3, 2, 2, 0, 0, &["*", "*", "*", "*", "*", "*"]);
        let assignment = recover_association(&g).unwrap();
        assert_eq!(assignment.blocks(), &[vec![0, 1, 2]]);
    }
}
