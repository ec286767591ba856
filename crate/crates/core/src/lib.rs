//! Equality engine for the simply typed lambda calculus.
//!
//! Decides type-directed algorithmic equivalence of terms, produces
//! certificate trees that an independent checker can replay, and translates
//! declarative equality derivations into algorithmic ones by running a
//! logical-relations argument as a program.

pub mod algo;
pub mod cert;
pub mod decl;
pub mod logrel;
pub mod reduction;
pub mod subst;
pub mod syntax;
pub mod text;

pub use syntax::{Ctx, EqStatement, Tm, Tp};
