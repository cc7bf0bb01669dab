//! Parser, static checker and finite-set model checker for the IFF
//! ontology metalanguage.

pub mod checks;
pub mod diagnostic;
pub mod finset;
pub mod metastack;
pub mod modelcheck;
pub mod names;
pub mod syntax;

pub use diagnostic::{Diagnostic, Severity};
