//! Event-ordering bug detection for `.fsol` contracts.

pub mod lang;

/// Name of the oracle reply entry point.
pub const CALLBACK_FN: &str = "__callback";
/// Name of the default entry point.
pub const FALLBACK_FN: &str = "fallback";
pub mod vm;
pub mod effects;
pub mod events;
pub mod hb;
pub mod fuzzer;
pub mod linearizer;
pub mod report;
