//! File formats and command implementations behind the `exdes` binary,
//! exposed as a library so integration tests can drive them directly.

pub mod commands;
pub mod format;
