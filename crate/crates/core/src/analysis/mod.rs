//! Exact subgraph detectors, small-scale factor and regularity checks, and
//! the engine-independent transcript verifier.

mod detect;
mod factor;
mod regularity;
mod verify;

pub use detect::{codegree_at, k4_witness_at, max_codegree, triangle_witness};
pub use factor::{kr_factor_search, kr_factor_search_with_limit, FACTOR_LIMIT};
pub use regularity::{regular_pair_check, RegularityVerdict, REGULARITY_LIMIT};
pub use verify::{
    verify_box_transcript, verify_real_transcript, verify_transcript_json, CheckResult,
    CheckStatus, Failure, InvariantReport,
};
