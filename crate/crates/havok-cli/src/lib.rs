//! Library surface behind the `havok` binary: configuration handling,
//! file formats, the record pipeline, pooled reports, and SVG output.

pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod report;
pub mod svg;
