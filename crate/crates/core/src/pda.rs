//! Placement delivery arrays: the base array type, its validity conditions,
//! and structural statistics.
//!
//! A PDA is an `F x Λ` grid of stars and integers. Columns are caches, rows
//! are subfile indices. A star at `(j, λ)` means cache `λ` stores subfile `j`
//! of every file; an integer marks a subfile served by a multicast message.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// A cell coordinate, `(row, column)`.
pub type Cell = (usize, usize);

/// One entry of a placement delivery array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PdaEntry {
    /// The placement symbol: the column's cache stores this row's subfile.
    Star,
    /// A multicast index in `[0, S)`.
    Int(u32),
}

impl PdaEntry {
    pub fn is_star(self) -> bool {
        matches!(self, PdaEntry::Star)
    }

    pub fn as_int(self) -> Option<u32> {
        match self {
            PdaEntry::Star => None,
            PdaEntry::Int(s) => Some(s),
        }
    }
}

impl fmt::Display for PdaEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PdaEntry::Star => f.write_str("*"),
            PdaEntry::Int(s) => write!(f, "{s}"),
        }
    }
}

/// Structural errors detected when assembling an array.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PdaError {
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
}

/// An `F x Λ` placement delivery array with its declared parameters.
///
/// Construction checks only that the grid matches the declared shape; whether
/// the declared `(Λ, F, Z, S)` actually satisfy conditions C1-C3 is the job
/// of [`PdaArray::validate`], which reports every violation it finds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdaArray {
    num_caches: usize,
    num_rows: usize,
    stars_per_column: usize,
    num_integers: u32,
    grid: Vec<PdaEntry>,
}

impl PdaArray {
    /// Assemble an array from a row-major grid.
    pub fn new(
        num_caches: usize,
        num_rows: usize,
        stars_per_column: usize,
        num_integers: u32,
        grid: Vec<PdaEntry>,
    ) -> Result<Self, PdaError> {
        if num_caches == 0 || num_rows == 0 {
            return Err(PdaError::EmptyArray {
                rows: num_rows,
                cols: num_caches,
            });
        }
        if stars_per_column > num_rows {
            return Err(PdaError::StarsExceedRows {
                stars: stars_per_column,
                rows: num_rows,
            });
        }
        let expected = num_rows * num_caches;
        if grid.len() != expected {
            return Err(PdaError::DimensionMismatch {
                rows: num_rows,
                cols: num_caches,
                expected,
                found: grid.len(),
            });
        }
        Ok(Self {
            num_caches,
            num_rows,
            stars_per_column,
            num_integers,
            grid,
        })
    }

    /// Number of columns, one per cache.
    pub fn num_caches(&self) -> usize {
        self.num_caches
    }

    /// Number of rows, one per subfile (the sub-packetization F).
    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    /// Declared stars per column (Z).
    pub fn stars_per_column(&self) -> usize {
        self.stars_per_column
    }

    /// Declared number of distinct multicast indices (S).
    pub fn num_integers(&self) -> u32 {
        self.num_integers
    }

    pub fn entry(&self, row: usize, col: usize) -> PdaEntry {
        self.grid[row * self.num_caches + col]
    }

    /// Entries of one column, top to bottom.
    pub fn column(&self, col: usize) -> impl Iterator<Item = PdaEntry> + '_ {
        (0..self.num_rows).map(move |j| self.entry(j, col))
    }

    /// Rows holding a star in the given column, ascending.
    pub fn star_rows(&self, col: usize) -> Vec<usize> {
        (0..self.num_rows)
            .filter(|&j| self.entry(j, col).is_star())
            .collect()
    }

    /// All cells with their coordinates, row-major.
    pub fn cells(&self) -> impl Iterator<Item = (Cell, PdaEntry)> + '_ {
        self.grid
            .iter()
            .enumerate()
            .map(|(idx, &e)| ((idx / self.num_caches, idx % self.num_caches), e))
    }

    /// Check conditions C1-C3 plus integer range, collecting every violation.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        // Integer range: entries must index into [0, S).
        for ((row, col), entry) in self.cells() {
            if let Some(value) = entry.as_int() {
                if value >= self.num_integers {
                    violations.push(Violation::IntegerOutOfRange {
                        row,
                        col,
                        value,
                        num_integers: self.num_integers,
                    });
                }
            }
        }

        // C1: exactly Z stars in each column.
        for col in 0..self.num_caches {
            let found = self.column(col).filter(|e| e.is_star()).count();
            if found != self.stars_per_column {
                violations.push(Violation::ColumnStars {
                    col,
                    found,
                    expected: self.stars_per_column,
                });
            }
        }

        // C2: every integer in [0, S) appears at least once.
        let mut seen = vec![false; self.num_integers as usize];
        for (_, entry) in self.cells() {
            if let Some(value) = entry.as_int() {
                if let Some(slot) = seen.get_mut(value as usize) {
                    *slot = true;
                }
            }
        }
        for (value, present) in seen.iter().enumerate() {
            if !present {
                violations.push(Violation::MissingInteger {
                    value: value as u32,
                });
            }
        }

        // C3: equal integers sit in distinct rows and columns, with stars at
        // the two cross cells of their 2x2 sub-array. Pairwise over the
        // occurrences of each value; quadratic, fine at desk scale.
        let mut by_value: BTreeMap<u32, Vec<Cell>> = BTreeMap::new();
        for ((row, col), entry) in self.cells() {
            if let Some(value) = entry.as_int() {
                by_value.entry(value).or_default().push((row, col));
            }
        }
        for (&value, cells) in &by_value {
            for (a, &(j1, k1)) in cells.iter().enumerate() {
                for &(j2, k2) in &cells[a + 1..] {
                    if j1 == j2 {
                        violations.push(Violation::SameRow {
                            value,
                            row: j1,
                            col_a: k1,
                            col_b: k2,
                        });
                        continue;
                    }
                    if k1 == k2 {
                        violations.push(Violation::SameColumn {
                            value,
                            col: k1,
                            row_a: j1,
                            row_b: j2,
                        });
                        continue;
                    }
                    let cross_a = self.entry(j1, k2);
                    let cross_b = self.entry(j2, k1);
                    if !cross_a.is_star() || !cross_b.is_star() {
                        violations.push(Violation::CrossNotStar {
                            value,
                            first: (j1, k1),
                            second: (j2, k2),
                            sub_array: [
                                [self.entry(j1, k1), cross_a],
                                [cross_b, self.entry(j2, k2)],
                            ],
                        });
                    }
                }
            }
        }

        ValidationReport { violations }
    }

    /// Per-integer occurrence counts and the regularity check.
    pub fn stats(&self) -> PdaStats {
        let mut occurrences: BTreeMap<u32, usize> = BTreeMap::new();
        for (_, entry) in self.cells() {
            if let Some(value) = entry.as_int() {
                *occurrences.entry(value).or_insert(0) += 1;
            }
        }
        let mut counts = occurrences.values().copied();
        let regularity = match counts.next() {
            Some(first) if counts.all(|c| c == first) => Some(first),
            Some(_) => None,
            None => None,
        };
        let is_regular = occurrences.is_empty() || regularity.is_some();
        PdaStats {
            occurrences,
            is_regular,
            regularity,
        }
    }
}

/// Occurrence statistics of an array's integer entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdaStats {
    /// Multiplicity of each integer value present in the grid.
    pub occurrences: BTreeMap<u32, usize>,
    /// True when every integer occurs the same number of times.
    pub is_regular: bool,
    /// The common multiplicity g when regular (None for an integer-free grid).
    pub regularity: Option<usize>,
}

impl PdaStats {
    /// Total number of integer cells.
    pub fn total_occurrences(&self) -> usize {
        self.occurrences.values().sum()
    }
}

/// One failed validity condition, with the cells that witness it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// An entry's value is not in `[0, S)`.
    IntegerOutOfRange {
        row: usize,
        col: usize,
        value: u32,
        num_integers: u32,
    },
    /// C1: a column's star count differs from Z.
    ColumnStars {
        col: usize,
        found: usize,
        expected: usize,
    },
    /// C2: an integer in `[0, S)` never appears.
    MissingInteger { value: u32 },
    /// C3(a): two equal integers share a row.
    SameRow {
        value: u32,
        row: usize,
        col_a: usize,
        col_b: usize,
    },
    /// C3(a): two equal integers share a column.
    SameColumn {
        value: u32,
        col: usize,
        row_a: usize,
        row_b: usize,
    },
    /// C3(b): a cross cell of the 2x2 sub-array is not a star.
    CrossNotStar {
        value: u32,
        first: Cell,
        second: Cell,
        /// The 2x2 sub-array formed by the two rows and columns involved.
        sub_array: [[PdaEntry; 2]; 2],
    },
}

impl Violation {
    /// The definition condition this violation falls under.
    pub fn condition(&self) -> &'static str {
        match self {
            Violation::IntegerOutOfRange { .. } => "range",
            Violation::ColumnStars { .. } => "C1",
            Violation::MissingInteger { .. } => "C2",
            Violation::SameRow { .. } | Violation::SameColumn { .. } => "C3a",
            Violation::CrossNotStar { .. } => "C3b",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IntegerOutOfRange {
                row,
                col,
                value,
                num_integers,
            } => write!(
                f,
                "range: entry {value} at ({row},{col}) is outside [0,{num_integers})"
            ),
            Violation::ColumnStars {
                col,
                found,
                expected,
            } => write!(f, "C1: column {col} has {found} stars, expected {expected}"),
            Violation::MissingInteger { value } => {
                write!(f, "C2: integer {value} never appears")
            }
            Violation::SameRow {
                value,
                row,
                col_a,
                col_b,
            } => write!(
                f,
                "C3: integer {value} repeats in row {row} (columns {col_a} and {col_b})"
            ),
            Violation::SameColumn {
                value,
                col,
                row_a,
                row_b,
            } => write!(
                f,
                "C3: integer {value} repeats in column {col} (rows {row_a} and {row_b})"
            ),
            Violation::CrossNotStar {
                value,
                first,
                second,
                sub_array,
            } => write!(
                f,
                "C3: integer {value} at ({},{}) and ({},{}) has non-star cross cells; \
                 sub-array [[{} {}] [{} {}]]",
                first.0,
                first.1,
                second.0,
                second.1,
                sub_array[0][0],
                sub_array[0][1],
                sub_array[1][0],
                sub_array[1][1],
            ),
        }
    }
}

/// Outcome of a validity check: empty means the array is a PDA.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    /// True if some violation falls under the given condition tag
    /// (`"C1"`, `"C2"`, `"C3a"`, `"C3b"`, `"range"`).
    pub fn has_condition(&self, condition: &str) -> bool {
        self.violations.iter().any(|v| v.condition() == condition)
    }
}

impl fmt::Display for ValidationReport {
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
