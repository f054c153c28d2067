//! Partitionable binding contexts and the type systems built on them.

pub mod ctx;
pub mod ctxspec;
pub mod gen;
pub mod parse;
pub mod report;
pub mod syntax;
pub mod translation;
pub mod typing;
