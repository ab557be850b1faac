//! Searching instance space for integrality gaps and certifying the result.

pub mod certificate;
pub mod config;
pub mod enumerate;
pub mod search;

pub use certificate::{
    build_certificate, verify_certificate, verify_certificate_json, GapCertificate, VerificationReport, VerifyOptions,
    SCHEMA_VERSION,
};
pub use config::{validate_thresholds, SearchConfig, SearchMode};
pub use enumerate::{constraint_types, enumerate_instances, InstanceStream};
pub use search::{evaluate_instance, search_gap, search_gap_with_progress, SearchOutcome, SearchStats};
