//! Array constructions, family parameter calculators, and a small
//! exhaustive searcher.
//!
//! [`build_mn_pda`] produces the classic subset-indexed arrays that realize
//! every integral per-user memory point; [`exemplar`] returns the small
//! worked arrays used throughout the tests; [`family_parameters`] computes
//! the headline parameters of well-known constructions without building
//! their arrays; [`brute_force_search`] enumerates every valid array of a
//! tiny shape, serving as an independent oracle.

use num_rational::Ratio;
use thiserror::Error;

use crate::pda::{PdaArray, PdaEntry};

/// Errors raised by the constructions in this module.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("t = {t} must satisfy 0 <= t <= K = {num_users}")]
    InvalidT { num_users: usize, t: usize },
    #[error("unknown exemplar `{name}` (available: ex1, pue_example)")]
    UnknownExemplar { name: String },
    #[error("invalid parameter: {message}")]
    InvalidParameter { message: String },
    #[error("search space of {cells} cells exceeds the {cap}-cell cap")]
    SearchSpaceTooLarge { cells: usize, cap: usize },
    #[error("array would need {cells} cells, above the {cap}-cell builder cap")]
    ArrayTooLarge { cells: u128, cap: u128 },
}

fn invalid(message: impl Into<String>) -> ConstructError {
    ConstructError::InvalidParameter {
        message: message.into(),
    }
}

/// Exact binomial coefficient; panics if the result overflows `u64`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial coefficient overflows u64")
}

/// All m-element subsets of `[0, n)` in lexicographic order.
pub fn k_subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    if m > n {
        return Vec::new();
    }
    let mut current: Vec<usize> = (0..m).collect();
    let mut all = vec![current.clone()];
    while next_subset(&mut current, n) {
        all.push(current.clone());
    }
    all
}

/// Advance to the lexicographic successor; false once the last subset passed.
fn next_subset(subset: &mut [usize], n: usize) -> bool {
    let m = subset.len();
    for i in (0..m).rev() {
        if subset[i] < n - m + i {
            subset[i] += 1;
            for j in i + 1..m {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// 0-based position of a sorted subset of `[0, n)` in lexicographic order.
pub fn subset_rank(subset: &[usize], n: usize) -> u64 {
    let m = subset.len();
    let mut rank = 0u64;
    let mut previous: Option<usize> = None;
    for (i, &a) in subset.iter().enumerate() {
        let start = previous.map_or(0, |p| p + 1);
        for j in start..a {
            rank += binomial((n - 1 - j) as u64, (m - 1 - i) as u64);
        }
        previous = Some(a);
    }
    rank
}

/// Inputs of the subset-indexed construction: K caches, each storing a
/// fraction t/K of every file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MnParameters {
    pub num_users: usize,
    pub t: usize,
}

impl MnParameters {
    pub fn new(num_users: usize, t: usize) -> Self {
        Self { num_users, t }
    }

    /// Row count F = C(K, t).
    pub fn num_rows(&self) -> u64 {
        binomial(self.num_users as u64, self.t as u64)
    }

    /// Stars per column Z = C(K-1, t-1).
    pub fn stars_per_column(&self) -> u64 {
        if self.t == 0 {
            0
        } else {
            binomial(self.num_users as u64 - 1, self.t as u64 - 1)
        }
    }

    /// Integer count S = C(K, t+1).
    pub fn num_integers(&self) -> u64 {
        binomial(self.num_users as u64, self.t as u64 + 1)
    }
}

/// Largest grid the MN builder will materialize.
const BUILD_CELL_CAP: u128 = 100_000_000;

/// Build the subset-indexed array with K columns and C(K,t) rows.
///
/// Rows correspond to the t-subsets of `[0, K)` in lexicographic order. The
/// entry at (row 𝒯, column k) is a star when k ∈ 𝒯, and otherwise the
/// lexicographic rank of 𝒯 ∪ {k} among all (t+1)-subsets. The result has
/// Z = C(K-1, t-1) stars per column, S = C(K, t+1) distinct integers, and
/// every integer occurs exactly t+1 times.
pub fn build_mn_pda(params: &MnParameters) -> Result<PdaArray, ConstructError> {
    let MnParameters { num_users, t } = *params;
    if num_users == 0 {
        return Err(invalid("the network needs at least one cache (K >= 1)"));
    }
    if t > num_users {
        return Err(ConstructError::InvalidT { num_users, t });
    }
    let num_rows = params.num_rows() as u128;
    let cells = num_rows * num_users as u128;
    if cells > BUILD_CELL_CAP {
        return Err(ConstructError::ArrayTooLarge {
            cells,
            cap: BUILD_CELL_CAP,
        });
    }
    let num_integers = params.num_integers();
    if num_integers > u32::MAX as u64 {
        return Err(ConstructError::ArrayTooLarge {
            cells,
            cap: BUILD_CELL_CAP,
        });
    }

    let mut grid = Vec::with_capacity(cells as usize);
    let mut extended = Vec::with_capacity(t + 1);
    for row_subset in k_subsets(num_users, t) {
        for k in 0..num_users {
            if row_subset.binary_search(&k).is_ok() {
                grid.push(PdaEntry::Star);
            } else {
                extended.clear();
                extended.extend_from_slice(&row_subset);
                let pos = extended.partition_point(|&x| x < k);
                extended.insert(pos, k);
                grid.push(PdaEntry::Int(subset_rank(&extended, num_users) as u32));
            }
        }
    }
    Ok(PdaArray::new(
        num_users,
        num_rows as usize,
        params.stars_per_column() as usize,
        num_integers as u32,
        grid,
    )
    .expect("construction yields a well-shaped array"))
}

fn pda_from_tokens(
    num_caches: usize,
    num_rows: usize,
    stars: usize,
    num_integers: u32,
    tokens: &[&str],
) -> PdaArray {
    let grid = tokens
        .iter()
        .map(|&t| {
            if t == "*" {
                PdaEntry::Star
            } else {
                PdaEntry::Int(t.parse().expect("exemplar token"))
            }
        })
        .collect();
    PdaArray::new(num_caches, num_rows, stars, num_integers, grid).expect("exemplar is well-shaped")
}

/// Return one of the built-in worked arrays, verbatim.
///
/// `ex1` is the (4,2,1,2) array behind the two-row running example;
/// `pue_example` is the 6x4 subset-indexed array used by the baseline
/// comparisons (equal to `build_mn_pda(K=4, t=2)`).
pub fn exemplar(name: &str) -> Result<PdaArray, ConstructError> {
    match name {
        "ex1" => Ok(pda_from_tokens(
            4,
            2,
            1,
            2,
            &["*", "1", "*", "0", "0", "*", "1", "*"],
        )),
        "pue_example" => Ok(pda_from_tokens(
            4,
            6,
            3,
            4,
            &[
                "*", "*", "0", "1", //
                "*", "0", "*", "2", //
                "*", "1", "2", "*", //
                "0", "*", "*", "3", //
                "1", "*", "3", "*", //
                "2", "3", "*", "*",
            ],
        )),
        other => Err(ConstructError::UnknownExemplar {
            name: other.to_string(),
        }),
    }
}

/// Identifier of a known array family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyId {
    Mn,
    YctA,
    YctB,
    Pda2,
}

impl FamilyId {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyId::Mn => "MN",
            FamilyId::YctA => "YCT-A",
            FamilyId::YctB => "YCT-B",
            FamilyId::Pda2 => "PDA2",
        }
    }
}

/// Free parameters selecting one member of a known family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilySpec {
    Mn { num_users: usize, t: usize },
    YctA { q: u64, m: u32 },
    YctB { q: u64, m: u32 },
    Pda2 { q: u64, z: u64, m: u32 },
}

/// Headline parameters of one family member.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyParameters {
    pub family: FamilyId,
    pub num_users: u64,
    pub memory_ratio: Ratio<u64>,
    /// Sub-packetization F.
    pub num_rows: u64,
    /// Distinct integer count S.
    pub num_integers: u64,
}

fn checked_pow(q: u64, m: u32) -> Result<u64, ConstructError> {
    q.checked_pow(m)
        .ok_or_else(|| invalid(format!("q^m = {q}^{m} overflows")))
}

/// Compute K, M/N, F and S for a member of a known family without building
/// its array. Only the MN family has a builder here; the others are
/// parameter calculators whose arrays arrive via file import.
pub fn family_parameters(spec: &FamilySpec) -> Result<FamilyParameters, ConstructError> {
    match *spec {
        FamilySpec::Mn { num_users, t } => {
            if num_users == 0 {
                return Err(invalid("the network needs at least one cache (K >= 1)"));
            }
            if t > num_users {
                return Err(ConstructError::InvalidT { num_users, t });
            }
            let params = MnParameters::new(num_users, t);
            Ok(FamilyParameters {
                family: FamilyId::Mn,
                num_users: num_users as u64,
                memory_ratio: Ratio::new(t as u64, num_users as u64),
                num_rows: params.num_rows(),
                num_integers: params.num_integers(),
            })
        }
        FamilySpec::YctA { q, m } => {
            require_q_m(q, m)?;
            let q_m = checked_pow(q, m)?;
            Ok(FamilyParameters {
                family: FamilyId::YctA,
                num_users: q * (m as u64 + 1),
                memory_ratio: Ratio::new(1, q),
                num_rows: q_m,
                num_integers: q_m
                    .checked_mul(q - 1)
                    .ok_or_else(|| invalid("S overflows"))?,
            })
        }
        FamilySpec::YctB { q, m } => {
            require_q_m(q, m)?;
            let q_m = checked_pow(q, m)?;
            Ok(FamilyParameters {
                family: FamilyId::YctB,
                num_users: q * (m as u64 + 1),
                memory_ratio: Ratio::new(q - 1, q),
                num_rows: q_m
                    .checked_mul(q - 1)
                    .ok_or_else(|| invalid("F overflows"))?,
                num_integers: q_m,
            })
        }
        FamilySpec::Pda2 { q, z, m } => {
            require_q_m(q, m)?;
            if z == 0 || z >= q {
                return Err(invalid(format!("z = {z} must satisfy 1 <= z < q = {q}")));
            }
            let q_m = checked_pow(q, m)?;
            Ok(FamilyParameters {
                family: FamilyId::Pda2,
                num_users: q * (m as u64 + 1),
                memory_ratio: Ratio::new(z, q),
                num_rows: ((q - 1) / (q - z))
                    .checked_mul(q_m)
                    .ok_or_else(|| invalid("F overflows"))?,
                num_integers: (q - z)
                    .checked_mul(q_m)
                    .ok_or_else(|| invalid("S overflows"))?,
            })
        }
    }
}

fn require_q_m(q: u64, m: u32) -> Result<(), ConstructError> {
    if q < 2 {
        return Err(invalid(format!("q = {q} must be at least 2")));
    }
    if m < 1 {
        return Err(invalid("m must be at least 1"));
    }
    Ok(())
}

/// Largest grid the exhaustive searcher accepts.
const SEARCH_CELL_CAP: usize = 16;

/// Enumerate every valid array with the given parameters, up to `limit`
/// results, by exhaustive assignment with pruning.
///
/// Integer values are canonicalized to ascending first-use order, so each
/// result stands for its whole relabeling class; column permutations are
/// still enumerated separately. Results are deterministic (depth-first,
/// stars before integers). An empty list means no such array exists.
pub fn brute_force_search(
    num_caches: usize,
    num_rows: usize,
    stars_per_column: usize,
    num_integers: u32,
    limit: usize,
) -> Result<Vec<PdaArray>, ConstructError> {
    let cells = num_caches * num_rows;
    if cells > SEARCH_CELL_CAP {
        return Err(ConstructError::SearchSpaceTooLarge {
            cells,
            cap: SEARCH_CELL_CAP,
        });
    }
    if num_caches == 0 || num_rows == 0 || stars_per_column > num_rows || limit == 0 {
        return Ok(Vec::new());
    }

    let mut search = Search {
        num_caches,
        num_rows,
        stars_per_column,
        num_integers,
        limit,
        grid: vec![PdaEntry::Star; cells],
        stars_used: vec![0; num_caches],
        occurrences: vec![Vec::new(); num_integers as usize],
        used: 0,
        results: Vec::new(),
    };
    search.assign(0);
    Ok(search.results)
}

struct Search {
    num_caches: usize,
    num_rows: usize,
    stars_per_column: usize,
    num_integers: u32,
    limit: usize,
    grid: Vec<PdaEntry>,
    stars_used: Vec<usize>,
    occurrences: Vec<Vec<(usize, usize)>>,
    used: u32,
    results: Vec<PdaArray>,
}

impl Search {
    fn assign(&mut self, idx: usize) {
        if self.results.len() >= self.limit {
            return;
        }
        let cells = self.num_caches * self.num_rows;
        if idx == cells {
            self.finish();
            return;
        }
        let row = idx / self.num_caches;
        let col = idx % self.num_caches;

        // Prune: the undecided cells must be able to introduce the missing
        // integer values.
        let undecided = cells - idx;
        if (self.used as usize) + undecided < self.num_integers as usize {
            return;
        }

        // Option 1: a star, if the column can still take one.
        if self.stars_used[col] < self.stars_per_column {
            self.grid[idx] = PdaEntry::Star;
            self.stars_used[col] += 1;
            self.assign(idx + 1);
            self.stars_used[col] -= 1;
        }

        // Option 2: an integer, if the column can still reach its star quota
        // with the rows below this one.
        let remaining_rows = self.num_rows - row - 1;
        if self.stars_per_column - self.stars_used[col] > remaining_rows {
            return;
        }
        // Reuse any earlier value, or introduce the next fresh one (which is
        // `used` itself under ascending first-use labeling).
        let value_end = if self.used < self.num_integers {
            self.used + 1
        } else {
            self.used
        };
        for value in 0..value_end {
            if !self.placement_allowed(value, row, col) {
                continue;
            }
            let introduced = value == self.used;
            self.grid[idx] = PdaEntry::Int(value);
            self.occurrences[value as usize].push((row, col));
            if introduced {
                self.used += 1;
            }
            self.assign(idx + 1);
            if introduced {
                self.used -= 1;
            }
            self.occurrences[value as usize].pop();
        }
    }

    /// Check the pair conditions of `value` at (row, col) against its
    /// earlier occurrences, as far as already-decided cells allow. Cross
    /// cells to the right of `col` in the current row are still undecided;
    /// the final full validation catches those.
    fn placement_allowed(&self, value: u32, row: usize, col: usize) -> bool {
        for &(r, c) in &self.occurrences[value as usize] {
            if r == row || c == col {
                return false;
            }
            if !self.grid[r * self.num_caches + col].is_star() {
                return false;
            }
            if c < col && !self.grid[row * self.num_caches + c].is_star() {
                return false;
            }
        }
        true
    }

    fn finish(&mut self) {
        if self.used != self.num_integers {
            return;
        }
        let candidate = PdaArray::new(
            self.num_caches,
            self.num_rows,
            self.stars_per_column,
            self.num_integers,
            self.grid.clone(),
        )
        .expect("search grid is well-shaped");
        if candidate.validate().is_ok() {
            self.results.push(candidate);
        }
    }
}
