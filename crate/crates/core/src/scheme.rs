//! The caching scheme itself: placement, coded transmissions, decoding.
//!
//! Placement stores, in each cache, the subfile rows its column marks with
//! stars. Delivery walks the distinct labels of a generalized array in order
//! and, for each label, XORs together the demanded subfiles of its cells.
//! Every user can peel a payload down to its own missing subfile because the
//! cross cells of its column are stars — the slices of all other terms sit in
//! its cache.

use std::collections::BTreeMap;
use std::fmt;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gpda::{recover_association, GeneralizedPdaArray, GpdaError, Label, UserAssignment};
use crate::pda::PdaArray;

/// Errors raised across placement, encoding and decoding.
#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("demand vector has {found} entries, the array serves {expected} users")]
    DemandLengthMismatch { expected: usize, found: usize },
    #[error("demand vector must name at least one file")]
    EmptyDemand,
    #[error("user {user} demands file {file}, library holds only {num_files}")]
    DemandOutOfRange {
        user: usize,
        file: usize,
        num_files: usize,
    },
    #[error("library must hold at least one file")]
    EmptyLibrary,
    #[error("library files must not be empty")]
    ZeroLengthFile,
    #[error("file {index} is {found} bytes, expected {expected} like the first file")]
    FileLengthMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("files must split into at least one subfile (F >= 1)")]
    InvalidSubfileCount,
    #[error("subfile slices are {found} bytes, expected {expected}")]
    SubfileLengthMismatch { expected: usize, found: usize },
    #[error("plan has {expected} transmissions but {found} payloads were supplied")]
    PayloadCountMismatch { expected: usize, found: usize },
    #[error("no transmission serves subfile row {row} to user {user}")]
    MissingTransmission { user: usize, row: usize },
    #[error(
        "user {user} cannot peel the payload for row {row}: peer slice \
         (user {peer_user}, row {peer_row}) is not in its cache"
    )]
    UndecipherableTerm {
        user: usize,
        row: usize,
        peer_user: usize,
        peer_row: usize,
    },
    #[error("cache snapshot lacks the slice (file {file}, row {row})")]
    CacheMissesSlice { file: usize, row: usize },
    #[error("decoded bytes for user {user} differ from its demanded file")]
    ReconstructionMismatch { user: usize },
    #[error(transparent)]
    Association(#[from] GpdaError),
}

/// Which subfile rows each cache stores.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementMap {
    stored_rows: Vec<Vec<usize>>,
}

impl PlacementMap {
    pub fn num_caches(&self) -> usize {
        self.stored_rows.len()
    }

    /// Sorted row indices stored by the given cache.
    pub fn stored_rows(&self, cache: usize) -> &[usize] {
        &self.stored_rows[cache]
    }

    pub fn per_cache(&self) -> &[Vec<usize>] {
        &self.stored_rows
    }
}

/// Cache λ stores row j of every file exactly when column λ has a star in
/// row j; every cache therefore stores the same fraction Z/F of the library.
pub fn build_placement(pda: &PdaArray) -> PlacementMap {
    PlacementMap {
        stored_rows: (0..pda.num_caches()).map(|c| pda.star_rows(c)).collect(),
    }
}

/// The file index each user asks for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandVector {
    demands: Vec<usize>,
}

impl DemandVector {
    pub fn new(demands: Vec<usize>) -> Result<Self, SchemeError> {
        if demands.is_empty() {
            return Err(SchemeError::EmptyDemand);
        }
        Ok(Self { demands })
    }

    pub fn num_users(&self) -> usize {
        self.demands.len()
    }

    pub fn file_for(&self, user: usize) -> usize {
        self.demands[user]
    }

    pub fn demands(&self) -> &[usize] {
        &self.demands
    }
}

impl fmt::Display for DemandVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.demands.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// One XOR term: user k contributes subfile row j of its demanded file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Term {
    pub user: usize,
    pub row: usize,
}

/// One coded message: the XOR over `terms` of slice (demand of user, row).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transmission {
    pub label: Label,
    pub terms: Vec<Term>,
}

impl Transmission {
    /// Number of users served at once (the coding gain of this message).
    pub fn gain(&self) -> usize {
        self.terms.len()
    }
}

impl fmt::Display for Transmission {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.label)?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " +")?;
            }
            write!(f, " (user {}, row {})", t.user, t.row)?;
        }
        Ok(())
    }
}

/// The full delivery schedule: one transmission per distinct label, ordered
/// by value, then superscript.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransmissionPlan {
    transmissions: Vec<Transmission>,
    num_rows: usize,
    num_users: usize,
}

impl TransmissionPlan {
    pub fn new(transmissions: Vec<Transmission>, num_rows: usize, num_users: usize) -> Self {
        Self {
            transmissions,
            num_rows,
            num_users,
        }
    }

    /// Number of transmissions; over F, this is the delivery load.
    pub fn len(&self) -> usize {
        self.transmissions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transmissions.is_empty()
    }

    pub fn transmissions(&self) -> &[Transmission] {
        &self.transmissions
    }

    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    /// Term counts in transmission order.
    pub fn gain_histogram(&self) -> Vec<usize> {
        self.transmissions.iter().map(Transmission::gain).collect()
    }

    /// The unique transmission carrying the term (user, row), if any.
    pub fn serving(&self, user: usize, row: usize) -> Option<(usize, &Transmission)> {
        self.transmissions
            .iter()
            .enumerate()
            .find(|(_, tx)| tx.terms.iter().any(|t| t.user == user && t.row == row))
    }
}

/// Collect one transmission per distinct label of `g`, in label order.
///
/// The demand vector fixes which file each term refers to at encode time;
/// here it only pins the expected user count.
pub fn build_transmission_plan(
    g: &GeneralizedPdaArray,
    d: &DemandVector,
) -> Result<TransmissionPlan, SchemeError> {
    if d.num_users() != g.num_users() {
        return Err(SchemeError::DemandLengthMismatch {
            expected: g.num_users(),
            found: d.num_users(),
        });
    }
    let mut by_label: BTreeMap<Label, Vec<Term>> = BTreeMap::new();
    for ((row, col), entry) in g.cells() {
        if let Some(label) = entry.label() {
            by_label
                .entry(label)
                .or_default()
                .push(Term { user: col, row });
        }
    }
    let transmissions = by_label
        .into_iter()
        .map(|(label, mut terms)| {
            terms.sort_by_key(|t| t.user);
            Transmission { label, terms }
        })
        .collect();
    Ok(TransmissionPlan::new(
        transmissions,
        g.num_rows(),
        g.num_users(),
    ))
}

/// N equal-length files, each split into F equal subfiles.
///
/// Files are zero-padded up to the next multiple of F; the original length
/// is kept so decoded bytes can be trimmed back exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileLibrary {
    num_rows: usize,
    original_len: usize,
    padded: Vec<Vec<u8>>,
}

impl FileLibrary {
    pub fn new(files: Vec<Vec<u8>>, num_rows: usize) -> Result<Self, SchemeError> {
        if num_rows == 0 {
            return Err(SchemeError::InvalidSubfileCount);
        }
        if files.is_empty() {
            return Err(SchemeError::EmptyLibrary);
        }
        let original_len = files[0].len();
        if original_len == 0 {
            return Err(SchemeError::ZeroLengthFile);
        }
        for (index, file) in files.iter().enumerate() {
            if file.len() != original_len {
                return Err(SchemeError::FileLengthMismatch {
                    index,
                    expected: original_len,
                    found: file.len(),
                });
            }
        }
        let padded_len = original_len.div_ceil(num_rows) * num_rows;
        let padded = files
            .into_iter()
            .map(|mut f| {
                f.resize(padded_len, 0);
                f
            })
            .collect();
        Ok(Self {
            num_rows,
            original_len,
            padded,
        })
    }

    /// A reproducible library of pseudorandom bytes.
    pub fn random(
        num_files: usize,
        file_len: usize,
        num_rows: usize,
        seed: u64,
    ) -> Result<Self, SchemeError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let files = (0..num_files)
            .map(|_| {
                let mut bytes = vec![0u8; file_len];
                rng.fill_bytes(&mut bytes);
                bytes
            })
            .collect();
        Self::new(files, num_rows)
    }

    pub fn num_files(&self) -> usize {
        self.padded.len()
    }

    /// Subfile count F.
    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    /// File length before padding.
    pub fn original_len(&self) -> usize {
        self.original_len
    }

    pub fn subfile_len(&self) -> usize {
        self.padded[0].len() / self.num_rows
    }

    /// Slice j of file n (of the padded bytes).
    pub fn subfile(&self, file: usize, row: usize) -> &[u8] {
        let len = self.subfile_len();
        &self.padded[file][row * len..(row + 1) * len]
    }

    /// The file's original bytes, without padding.
    pub fn original(&self, file: usize) -> &[u8] {
        &self.padded[file][..self.original_len]
    }
}

/// What one cache physically holds: for each stored row, that slice of
/// every file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheContents {
    stored_rows: Vec<usize>,
    slices: BTreeMap<(usize, usize), Vec<u8>>,
}

impl CacheContents {
    pub fn new(stored_rows: Vec<usize>) -> Self {
        Self {
            stored_rows,
            slices: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, file: usize, row: usize, bytes: Vec<u8>) {
        self.slices.insert((file, row), bytes);
    }

    /// Fill a cache with the given rows of every library file.
    pub fn snapshot(lib: &FileLibrary, stored_rows: &[usize]) -> Self {
        let mut cache = Self::new(stored_rows.to_vec());
        for file in 0..lib.num_files() {
            for &row in stored_rows {
                cache.insert(file, row, lib.subfile(file, row).to_vec());
            }
        }
        cache
    }

    pub fn stored_rows(&self) -> &[usize] {
        &self.stored_rows
    }

    pub fn slice(&self, file: usize, row: usize) -> Option<&[u8]> {
        self.slices.get(&(file, row)).map(Vec::as_slice)
    }
}

fn xor_into(acc: &mut [u8], other: &[u8]) -> Result<(), SchemeError> {
    if acc.len() != other.len() {
        return Err(SchemeError::SubfileLengthMismatch {
            expected: acc.len(),
            found: other.len(),
        });
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a ^= b;
    }
    Ok(())
}

/// Produce the payload bytes of every transmission in plan order.
///
/// The payload of a transmission is the bytewise XOR, over its terms
/// (user k, row j), of slice j of the file user k demands. Every payload is
/// one subfile long regardless of how many users it serves.
pub fn encode(
    plan: &TransmissionPlan,
    lib: &FileLibrary,
    d: &DemandVector,
) -> Result<Vec<Vec<u8>>, SchemeError> {
    if d.num_users() != plan.num_users() {
        return Err(SchemeError::DemandLengthMismatch {
            expected: plan.num_users(),
            found: d.num_users(),
        });
    }
    if lib.num_rows() != plan.num_rows() {
        return Err(SchemeError::SubfileLengthMismatch {
            expected: plan.num_rows(),
            found: lib.num_rows(),
        });
    }
    for (user, &file) in d.demands().iter().enumerate() {
        if file >= lib.num_files() {
            return Err(SchemeError::DemandOutOfRange {
                user,
                file,
                num_files: lib.num_files(),
            });
        }
    }
    let mut payloads = Vec::with_capacity(plan.len());
    for tx in plan.transmissions() {
        let mut payload = vec![0u8; lib.subfile_len()];
        for term in &tx.terms {
            xor_into(&mut payload, lib.subfile(d.file_for(term.user), term.row))?;
        }
        payloads.push(payload);
    }
    Ok(payloads)
}

/// Reconstruct the file demanded by `user` from its cache and the payloads.
///
/// Star rows of the user's column come straight from the cache. For every
/// other row j, the unique transmission with term (user, j) is peeled: the
/// slices of all other terms are cached (their rows are stars in this user's
/// column), so XORing them out leaves slice j of the demanded file. The
/// slices are concatenated in row order and trimmed to `original_len`.
pub fn decode(
    user: usize,
    cache: &CacheContents,
    payloads: &[Vec<u8>],
    plan: &TransmissionPlan,
    g: &GeneralizedPdaArray,
    d: &DemandVector,
    original_len: usize,
) -> Result<Vec<u8>, SchemeError> {
    if d.num_users() != g.num_users() {
        return Err(SchemeError::DemandLengthMismatch {
            expected: g.num_users(),
            found: d.num_users(),
        });
    }
    if payloads.len() != plan.len() {
        return Err(SchemeError::PayloadCountMismatch {
            expected: plan.len(),
            found: payloads.len(),
        });
    }
    let file = d.file_for(user);
    let mut slices: Vec<Vec<u8>> = Vec::with_capacity(g.num_rows());
    for row in 0..g.num_rows() {
        if g.entry(row, user).is_star() {
            let slice = cache
                .slice(file, row)
                .ok_or(SchemeError::CacheMissesSlice { file, row })?;
            slices.push(slice.to_vec());
            continue;
        }
        let (index, tx) = plan
            .serving(user, row)
            .ok_or(SchemeError::MissingTransmission { user, row })?;
        let mut slice = payloads[index].clone();
        for term in &tx.terms {
            if term.user == user {
                continue;
            }
            let peer = cache.slice(d.file_for(term.user), term.row).ok_or(
                SchemeError::UndecipherableTerm {
                    user,
                    row,
                    peer_user: term.user,
                    peer_row: term.row,
                },
            )?;
            xor_into(&mut slice, peer)?;
        }
        slices.push(slice);
    }
    let mut bytes = slices.concat();
    bytes.truncate(original_len);
    Ok(bytes)
}

/// Everything produced by one simulated delivery round.
#[derive(Debug, Clone)]
pub struct DeliveryOutcome {
    pub association: UserAssignment,
    pub plan: TransmissionPlan,
    pub payloads: Vec<Vec<u8>>,
}

/// Run a full delivery round and verify every user bit-exactly.
///
/// The association is recovered from `g` itself, caches are snapshotted per
/// user column, payloads are encoded, and each user's decode output is
/// compared against its demanded file.
pub fn simulate_delivery(
    g: &GeneralizedPdaArray,
    lib: &FileLibrary,
    d: &DemandVector,
) -> Result<DeliveryOutcome, SchemeError> {
    let association = recover_association(g)?;
    let plan = build_transmission_plan(g, d)?;
    let payloads = encode(&plan, lib, d)?;
    for user in 0..g.num_users() {
        let cache = CacheContents::snapshot(lib, &g.star_rows(user));
        let decoded = decode(user, &cache, &payloads, &plan, g, d, lib.original_len())?;
        if decoded != lib.original(d.file_for(user)) {
            return Err(SchemeError::ReconstructionMismatch { user });
        }
    }
    Ok(DeliveryOutcome {
        association,
        plan,
        payloads,
    })
}
