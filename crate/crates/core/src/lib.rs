//! Reasoning and planning over finite interpretations evolving under
//! conditional insert/delete actions.
//!
//! The crate is organised bottom-up: [`syntax`] defines concepts, roles,
//! formulae and actions; [`interp`] evaluates them on finite
//! interpretations; [`action`] executes actions; [`regression`] rewrites
//! knowledge bases backwards through actions; [`sat`] decides finite
//! satisfiability. On top of these, [`verify`] checks that an action
//! preserves constraints, [`planning`] searches for and certifies plans,
//! and [`reductions`] builds hard instances with brute-force oracles.

pub mod action;
pub mod budget;
pub mod error;
pub mod interp;
pub mod planning;
pub mod reductions;
pub mod regression;
pub mod sat;
pub mod syntax;
#[cfg(any(test, feature = "testgen"))]
pub mod testgen;
pub mod verify;

pub use budget::Budget;
pub use error::{Error, Result};
