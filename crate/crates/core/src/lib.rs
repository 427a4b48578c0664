//! Placement delivery arrays for coded caching with shared caches.
//!
//! This crate models placement delivery arrays (PDAs), their generalized
//! form in which several users share each cache, and the full delivery
//! pipeline built on them:
//!
//! - [`pda`]: the base array type and its validity conditions.
//! - [`gpda`]: the generalized array, the user-association expansion, and
//!   the reverse grouping process.
//! - [`construct`]: subset-indexed constructions, worked exemplars, family
//!   parameter calculators, and an exhaustive search oracle.
//! - [`scheme`]: placement maps, transmission plans, XOR encoding and
//!   decoding, and a byte-exact delivery simulation.
//! - [`analysis`]: exact rational loads, the equal-occupancy baseline, and
//!   comparison reports.
//! - [`format`]: plain-text reading and writing of both array kinds.

pub mod analysis;
pub mod construct;
pub mod format;
pub mod gpda;
pub mod pda;
pub mod scheme;

pub use analysis::{
    compare, load_from_gpda, load_shortcut, pue_baseline, render_csv, render_table, uniform_load,
    AnalysisError, ComparisonReport, LoadReport,
};
pub use construct::{
    brute_force_search, build_mn_pda, exemplar, family_parameters, ConstructError, FamilyId,
    FamilyParameters, FamilySpec, MnParameters,
};
pub use format::{read_gpda, read_pda, write_gpda, write_pda, FormatError};
pub use gpda::{
    expand, recover_association, AssociationProfile, GeneralizedPdaArray, GpdaEntry, GpdaError,
    GpdaValidationReport, GpdaViolation, Label, UserAssignment,
};
pub use pda::{Cell, PdaArray, PdaEntry, PdaError, PdaStats, ValidationReport, Violation};
pub use scheme::{
    build_placement, build_transmission_plan, decode, encode, simulate_delivery, CacheContents,
    DeliveryOutcome, DemandVector, FileLibrary, PlacementMap, SchemeError, Term, Transmission,
    TransmissionPlan,
};
