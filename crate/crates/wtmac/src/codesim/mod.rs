//! Desk-scale random wiretap codes: codebook sampling, joint-typicality
//! decoding, exact error and leakage, and the concentration bounds of the
//! secrecy analysis.
//!
//! Codewords live on the auxiliary alphabets `U`, `V1`, `V2`; the channel
//! they are sent over is the prefixed channel of the input law.

mod bounds;
mod code;
mod eval;
mod family;

pub use bounds::{
    chernoff_bound, chernoff_check, concentration_report, secrecy_from_variation, ChernoffCheck,
    ConcentrationConfig, ConcentrationReport, LemmaCheck,
};
pub use code::{
    build_wiretap_code, joint_typicality_decode, window_rates, BuildConfig, CodePart, Decision,
    PartDecision, WiretapCode,
};
pub use eval::{
    average_error, eve_analysis, eve_map_error, exact_errors, exact_leakage, mac_code_error,
    mc_leakage, simulate, wilson_interval, ErrorEstimate, ErrorMode, EveAnalysis, LeakageEstimate,
    MacError, SimConfig, SimReport,
};
pub use family::{sample_codebook_family, CodeSizes, CodebookFamily, MAX_CODEBOOK_SYMBOLS};
