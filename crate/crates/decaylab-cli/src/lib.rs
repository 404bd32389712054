//! Campaign orchestration, persistence, and report/plot emission for the
//! decaylab numerical laboratory.
//!
//! The binary front-end (`decaylab`) wraps these modules; they are exposed as
//! a library so integration tests can drive campaigns in-process.

pub mod campaign;
pub mod config;
pub mod plot;
