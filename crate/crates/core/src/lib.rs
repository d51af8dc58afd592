//! Recovers architectural design decisions from a system's version history.
//!
//! The pipeline matches recovered architecture snapshots of consecutive
//! versions ([`changes`]), maps resolved issues onto the entities their
//! commits touched ([`ingestion`]), and groups linked issues and changes into
//! classified decisions ([`decisions`]). [`pipeline`] drives a whole history
//! and [`report`] holds the output documents.

pub mod assignment;
pub mod changes;
pub mod decisions;
pub mod error;
pub mod ingestion;
pub mod model;
pub mod par;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};
