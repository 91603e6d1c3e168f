//! Command-line front end for informativeness-based text compression:
//! document ingestion, JSON reports, HTML rendering, and the subcommands
//! that tie them to the core library.

pub mod commands;
pub mod html;
pub mod ingest;
pub mod report;
