//! Concrete syntax: lexer, parser, printer, and loading of parsed or JSON
//! modules into a global environment.

mod lexer;
mod parser;
mod pretty;

use std::fmt;

use thiserror::Error;

pub use parser::{parse_expr, parse_module, parse_ty};
pub use pretty::{pretty_expr, pretty_ty};

use crate::ast::{indexify, ConstDef, Definition, Expr, GlobalEnv, IndexifyError, Module, WfDiagnostic};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("in {name}: {err}")]
    Indexify { name: String, err: IndexifyError },
    #[error("ill-formed environment: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Wf(Vec<WfDiagnostic>),
    #[error("bad JSON module: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{name} has an unbound variable: it is not closed")]
    Open { name: String },
}

/// A module merged into an environment, with its test programs resolved.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub env: GlobalEnv,
    pub programs: Vec<Definition>,
}

impl Loaded {
    pub fn program(&self, name: &str) -> Option<&Expr> {
        self.programs.iter().find(|d| d.name == name).map(|d| &d.expr)
    }
}

/// Extends `base` with the module's inductives, builtins and definitions.
/// Definitions may refer to each other in any order.
pub fn load_module(base: &GlobalEnv, m: &Module) -> Result<Loaded, LoadError> {
    let mut env = base.clone();
    for d in &m.inductives {
        env.add_inductive(d.clone());
    }
    for b in &m.builtins {
        env.add_constant(b.name.clone(), ConstDef::Builtin { op: b.op });
    }
    for d in &m.definitions {
        env.add_constant(d.name.clone(), ConstDef::Expr { expr: Expr::constant(d.name.clone()) });
    }
    let resolve = |env: &GlobalEnv, d: &Definition| -> Result<Expr, LoadError> {
        let e = if m.nameless {
            d.expr.clone()
        } else {
            indexify(env, &[], &d.expr).map_err(|err| LoadError::Indexify { name: d.name.clone(), err })?
        };
        if !e.closed_under(0) {
            return Err(LoadError::Open { name: d.name.clone() });
        }
        Ok(e)
    };
    let mut defs = Vec::with_capacity(m.definitions.len());
    for d in &m.definitions {
        defs.push((d.name.clone(), resolve(&env, d)?));
    }
    for (name, expr) in defs {
        env.add_constant(name, ConstDef::Expr { expr });
    }
    let programs = m
        .programs
        .iter()
        .map(|d| Ok(Definition { name: d.name.clone(), expr: resolve(&env, d)? }))
        .collect::<Result<Vec<_>, LoadError>>()?;
    env.check().map_err(LoadError::Wf)?;
    Ok(Loaded { env, programs })
}

pub fn load_source(base: &GlobalEnv, src: &str) -> Result<Loaded, LoadError> {
    load_module(base, &parse_module(src)?)
}

pub fn load_json(base: &GlobalEnv, json: &str) -> Result<Loaded, LoadError> {
    load_module(base, &serde_json::from_str(json)?)
}
