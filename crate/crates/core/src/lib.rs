//! Natural language questions about a valid-time database, answered through
//! the TOP temporal operator logic.
//!
//! The pipeline is `lexgram` (English to TOP), then either `topeval`
//! (direct denotational evaluation) or `tralg` (compilation to a temporal
//! relational algebra with TSQL2-style text output). The two paths must
//! agree on every answer.

pub mod cli;
pub mod lexgram;
pub mod tdb;
pub mod timecore;
pub mod topast;
pub mod topeval;
pub mod tralg;
