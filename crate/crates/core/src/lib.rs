//! A small functional smart-contract language, embedded as data.
//!
//! The pipeline: source text is parsed ([`syntax`]) into a named AST
//! ([`ast`]) and resolved to de Bruijn form; [`interp`] runs it with a
//! fuel-bounded environment-passing interpreter; [`translate`] maps it into a
//! nameless kernel calculus ([`kernel`]) with its own call-by-value
//! evaluator; [`soundness`] compares the two evaluators; [`chain`] runs
//! contracts written in the language on a simulated blockchain.

pub mod ast;
pub mod chain;
pub mod interp;
pub mod kernel;
pub mod prim;
pub mod programs;
pub mod soundness;
pub mod syntax;
pub mod translate;

#[cfg(test)]
mod oracle;
mod stack;

pub use stack::with_stack;
