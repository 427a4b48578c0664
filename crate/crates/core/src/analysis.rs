//! Exact delivery-load accounting and scheme comparisons.
//!
//! The delivery load of a generalized array is the transmission count over
//! the sub-packetization F: Σ_s max{i : s^(i) present}, divided by F. All
//! loads are kept as unreduced integer fractions whose denominator is F, so
//! a report always reads off the actual number of transmissions; decimals
//! appear only in rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Ratio;
use thiserror::Error;

use crate::construct::{build_mn_pda, ConstructError, MnParameters};
use crate::gpda::{AssociationProfile, GeneralizedPdaArray};
use crate::pda::{PdaArray, PdaEntry};

/// Errors raised while computing loads and comparisons.
#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("profile has {found} caches, the array has {expected} columns")]
    ProfileLengthMismatch { expected: usize, found: usize },
    #[error(
        "baseline needs an integral t = Λ·M/N; Λ = {num_caches} and M/N = {ratio} \
         give a fraction"
    )]
    NonIntegralT {
        num_caches: usize,
        ratio: Ratio<u64>,
    },
    #[error("memory ratio M/N = {ratio} must lie in [0, 1]")]
    RatioOutOfRange { ratio: Ratio<u64> },
    #[error("array stores Z/F = {actual} of the library, but M/N = {declared} was declared")]
    RatioMismatch {
        declared: Ratio<u64>,
        actual: Ratio<u64>,
    },
    #[error(transparent)]
    Construct(#[from] ConstructError),
}

/// The delivery load of one scheme, exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadReport {
    /// Short row label for rendering ("ours", "PUE", ...).
    pub scheme: String,
    /// Sub-packetization F.
    pub sub_packetization: u64,
    /// Distinct integer count S of the underlying array.
    pub num_integers: u64,
    /// Transmission count: Σ_s max{i : s^(i) present}.
    pub load_numerator: u64,
    /// Always F, kept unreduced so numerator stays the transmission count.
    pub load_denominator: u64,
    /// Term count of each transmission, in transmission order.
    pub gain_histogram: Vec<usize>,
}

impl LoadReport {
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.scheme = label.into();
        self
    }

    /// The load in lowest terms.
    pub fn load_ratio(&self) -> Ratio<u64> {
        Ratio::new(self.load_numerator, self.load_denominator)
    }

    /// The unreduced fraction, e.g. `897/84`.
    pub fn load_fraction(&self) -> String {
        format!("{}/{}", self.load_numerator, self.load_denominator)
    }

    /// Decimal value to four significant digits.
    pub fn load_decimal(&self) -> String {
        format_significant(self.load_numerator as f64 / self.load_denominator as f64)
    }
}

/// Format to four significant digits, e.g. 10.68, 1.833, 2.500.
fn format_significant(value: f64) -> String {
    if value == 0.0 {
        return "0.000".to_string();
    }
    let digits_before = value.abs().log10().floor() as i32 + 1;
    let precision = (4 - digits_before).max(0) as usize;
    format!("{value:.precision$}")
}

/// Compute the exact load of a generalized array by scanning its labels.
///
/// The numerator sums, over each integer value s, the largest superscript
/// with which s appears; the denominator is the row count F. The histogram
/// counts the cells of each present label in label order.
pub fn load_from_gpda(g: &GeneralizedPdaArray) -> LoadReport {
    let mut max_superscript: BTreeMap<u32, u32> = BTreeMap::new();
    let mut cells_per_label: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for (_, entry) in g.cells() {
        if let Some(label) = entry.label() {
            let max = max_superscript.entry(label.value).or_insert(0);
            *max = (*max).max(label.superscript);
            *cells_per_label
                .entry((label.value, label.superscript))
                .or_insert(0) += 1;
        }
    }
    LoadReport {
        scheme: "gpda".to_string(),
        sub_packetization: g.num_rows() as u64,
        num_integers: g.num_integers() as u64,
        load_numerator: max_superscript.values().map(|&m| m as u64).sum(),
        load_denominator: g.num_rows() as u64,
        gain_histogram: cells_per_label.into_values().collect(),
    }
}

/// Compute the load of `expand(pda, profile)` without building the
/// expansion.
///
/// Each integer s is served max{𝓛_λ : column λ carries s} times, once per
/// superscript up to the best-occupied cache carrying it; the transmission
/// for s^(i) reaches every cache that carries s and holds at least i users.
pub fn load_shortcut(
    pda: &PdaArray,
    profile: &AssociationProfile,
) -> Result<LoadReport, AnalysisError> {
    if profile.num_caches() != pda.num_caches() {
        return Err(AnalysisError::ProfileLengthMismatch {
            expected: pda.num_caches(),
            found: profile.num_caches(),
        });
    }
    // Occupancies of the caches carrying each integer value.
    let mut carriers: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for ((_, col), entry) in pda.cells() {
        if let PdaEntry::Int(value) = entry {
            carriers
                .entry(value)
                .or_default()
                .push(profile.counts()[col]);
        }
    }
    let mut numerator = 0u64;
    let mut histogram = Vec::new();
    for occupancies in carriers.values() {
        let max = occupancies.iter().copied().max().unwrap_or(0);
        numerator += max as u64;
        for i in 1..=max {
            histogram.push(occupancies.iter().filter(|&&l| l >= i).count());
        }
    }
    Ok(LoadReport {
        scheme: "expanded".to_string(),
        sub_packetization: pda.num_rows() as u64,
        num_integers: pda.num_integers() as u64,
        load_numerator: numerator,
        load_denominator: pda.num_rows() as u64,
        gain_histogram: histogram,
    })
}

/// The closed-form load for a uniform profile: K·S/(Λ·F), i.e. u·S/F when
/// every cache serves u users.
pub fn uniform_load(pda: &PdaArray, users_per_cache: usize) -> LoadReport {
    let stats = pda.stats();
    let mut histogram = Vec::new();
    for &count in stats.occurrences.values() {
        for _ in 0..users_per_cache {
            histogram.push(count);
        }
    }
    LoadReport {
        scheme: "uniform".to_string(),
        sub_packetization: pda.num_rows() as u64,
        num_integers: pda.num_integers() as u64,
        load_numerator: users_per_cache as u64 * pda.num_integers() as u64,
        load_denominator: pda.num_rows() as u64,
        gain_histogram: histogram,
    }
}

/// The baseline that reuses the equal-occupancy scheme as-is: build the
/// subset-indexed array for Λ caches at memory point t = Λ·M/N and serve
/// the given profile with it.
///
/// The baseline exists only when t is an integer — its memory grid has no
/// intermediate points here.
pub fn pue_baseline(
    num_caches: usize,
    memory_ratio: Ratio<u64>,
    profile: &AssociationProfile,
) -> Result<LoadReport, AnalysisError> {
    if memory_ratio > Ratio::from_integer(1) {
        return Err(AnalysisError::RatioOutOfRange {
            ratio: memory_ratio,
        });
    }
    let t_ratio = Ratio::from_integer(num_caches as u64) * memory_ratio;
    if !t_ratio.is_integer() {
        return Err(AnalysisError::NonIntegralT {
            num_caches,
            ratio: memory_ratio,
        });
    }
    let t = t_ratio.to_integer() as usize;
    let pda = build_mn_pda(&MnParameters::new(num_caches, t))?;
    Ok(load_shortcut(&pda, profile)?.with_label("PUE"))
}

/// Two-row comparison: the load of the given array versus the baseline, on
/// the same profile and memory point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonReport {
    pub rows: Vec<LoadReport>,
}

impl ComparisonReport {
    pub fn to_table(&self) -> String {
        render_table(&self.rows)
    }

    pub fn to_csv(&self) -> String {
        render_csv(&self.rows)
    }
}

/// Compare the array's scheme against the baseline at memory ratio M/N.
///
/// The array must actually store that fraction: Z/F = M/N.
pub fn compare(
    pda: &PdaArray,
    profile: &AssociationProfile,
    memory_ratio: Ratio<u64>,
) -> Result<ComparisonReport, AnalysisError> {
    let actual = Ratio::new(pda.stars_per_column() as u64, pda.num_rows() as u64);
    if actual != memory_ratio {
        return Err(AnalysisError::RatioMismatch {
            declared: memory_ratio,
            actual,
        });
    }
    let ours = load_shortcut(pda, profile)?.with_label("ours");
    let baseline = pue_baseline(pda.num_caches(), memory_ratio, profile)?;
    Ok(ComparisonReport {
        rows: vec![ours, baseline],
    })
}

/// Render rows as an aligned plain-text table.
pub fn render_table(rows: &[LoadReport]) -> String {
    let header = ["scheme", "F", "S", "load", "decimal"];
    let mut cells: Vec<[String; 5]> = vec![header.map(String::from)];
    for row in rows {
        cells.push([
            row.scheme.clone(),
            row.sub_packetization.to_string(),
            row.num_integers.to_string(),
            row.load_fraction(),
            row.load_decimal(),
        ]);
    }
    let widths: Vec<usize> = (0..5)
        .map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &cells {
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                out.push_str("  ");
            }
            let _ = write!(out, "{cell:<width$}", width = widths[c]);
        }
        while out.ends_with(' ') {
            out.pop();
        }
        out.push('\n');
    }
    out
}

/// Render rows as CSV with a fixed header.
pub fn render_csv(rows: &[LoadReport]) -> String {
    let mut out = String::from("scheme,F,S,load_num,load_den,load_decimal\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            row.scheme,
            row.sub_packetization,
            row.num_integers,
            row.load_numerator,
            row.load_denominator,
            row.load_decimal()
        );
    }
    out
}
