//! The shipped program corpus: the prelude (base library plus blockchain
//! types), the counter and crowdfunding contracts, and conversions between
//! object-language values and native data for oracle tests.

use std::sync::OnceLock;

use num_bigint::BigInt;
use thiserror::Error;

use crate::ast::{Expr, GlobalEnv, Ty};
use crate::interp::{eval_closed, EvalEnv, EvalFailure, Val};
use crate::prim::PrimVal;
use crate::syntax::{load_source, Loaded};

pub const STDLIB_SRC: &str = include_str!("../../../corpus/prelude/stdlib.acorn");
pub const BLOCKCHAIN_SRC: &str = include_str!("../../../corpus/prelude/blockchain.acorn");
pub const COUNTER_SRC: &str = include_str!("../../../corpus/counter.acorn");
pub const CROWDFUNDING_SRC: &str = include_str!("../../../corpus/crowdfunding.acorn");

/// The base library and blockchain declarations every program is loaded on.
pub fn prelude() -> &'static GlobalEnv {
    static ENV: OnceLock<GlobalEnv> = OnceLock::new();
    ENV.get_or_init(|| {
        let std = load_source(&GlobalEnv::new(), STDLIB_SRC).expect("stdlib loads");
        load_source(&std.env, BLOCKCHAIN_SRC).expect("blockchain prelude loads").env
    })
}

/// Loads a source text on top of the prelude.
pub fn load_with_prelude(src: &str) -> Result<Loaded, crate::syntax::LoadError> {
    load_source(prelude(), src)
}

pub fn counter() -> &'static Loaded {
    static L: OnceLock<Loaded> = OnceLock::new();
    L.get_or_init(|| load_with_prelude(COUNTER_SRC).expect("counter loads"))
}

pub fn crowdfunding() -> &'static Loaded {
    static L: OnceLock<Loaded> = OnceLock::new();
    L.get_or_init(|| load_with_prelude(CROWDFUNDING_SRC).expect("crowdfunding loads"))
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConversionError {
    #[error("expected {expected}, found {found}")]
    Shape { expected: &'static str, found: String },
}

fn shape<T>(expected: &'static str, v: &Val) -> Result<T, ConversionError> {
    Err(ConversionError::Shape { expected, found: v.to_string() })
}

/// Builds an object-language list with element type `elem`.
pub fn to_acorn_list(elem: &Ty, items: impl IntoIterator<Item = Val, IntoIter: DoubleEndedIterator>) -> Val {
    let ty = Val::Ty(elem.clone());
    items.into_iter().rev().fold(Val::constr("List", "Nil", vec![ty.clone()]), |acc, x| {
        Val::constr("List", "Cons", vec![ty.clone(), x, acc])
    })
}

pub fn from_acorn_list(v: &Val) -> Result<Vec<Val>, ConversionError> {
    let mut out = Vec::new();
    let mut cur = v;
    loop {
        match cur {
            Val::Constr { ind, ctor, args } if ind == "List" => match (ctor.as_str(), args.as_slice()) {
                ("Nil", [_]) => return Ok(out),
                ("Cons", [_, x, rest]) => {
                    out.push(x.clone());
                    cur = rest;
                }
                _ => return shape("a saturated list constructor", cur),
            },
            _ => return shape("a list", cur),
        }
    }
}

pub fn int_list(xs: &[i64]) -> Val {
    to_acorn_list(&Ty::ind("Int"), xs.iter().map(|&x| Val::int(x)).collect::<Vec<_>>())
}

pub fn int_of(v: &Val) -> Result<BigInt, ConversionError> {
    match v {
        Val::Prim(PrimVal::Int(i)) => Ok(i.clone()),
        _ => shape("an integer", v),
    }
}

/// Builds a map from bindings listed outermost first.
pub fn to_acorn_map(entries: &[(u64, i64)]) -> Val {
    let (k, v) = (Val::Ty(Ty::ind("Nat")), Val::Ty(Ty::ind("Int")));
    entries.iter().rev().fold(Val::constr("AcornMap", "MNil", vec![k.clone(), v.clone()]), |acc, &(key, val)| {
        Val::constr("AcornMap", "MCons", vec![k.clone(), v.clone(), Val::nat(key), Val::int(val), acc])
    })
}

/// The bindings of a map value, outermost first, shadowed ones included.
pub fn map_bindings(m: &Val) -> Result<Vec<(PrimVal, BigInt)>, ConversionError> {
    let mut out = Vec::new();
    let mut cur = m;
    loop {
        match cur {
            Val::Constr { ind, ctor, args } if ind == "AcornMap" => match (ctor.as_str(), args.as_slice()) {
                ("MNil", [_, _]) => return Ok(out),
                ("MCons", [_, _, Val::Prim(k), v, rest]) => {
                    out.push((k.clone(), int_of(v)?));
                    cur = rest;
                }
                _ => return shape("a saturated map constructor", cur),
            },
            _ => return shape("a map", cur),
        }
    }
}

/// The first binding of `key`, as the object-language `mfind` sees it.
pub fn map_lookup(m: &Val, key: &PrimVal) -> Result<Option<BigInt>, ConversionError> {
    Ok(map_bindings(m)?.into_iter().find(|(k, _)| k == key).map(|(_, v)| v))
}

/// Native sum of a map: each key counts once, with its first binding.
pub fn sum_map(m: &Val) -> Result<BigInt, ConversionError> {
    let mut seen = Vec::new();
    let mut total = BigInt::from(0);
    for (k, v) in map_bindings(m)? {
        if !seen.contains(&k) {
            total += v;
            seen.push(k);
        }
    }
    Ok(total)
}

/// The binary operations used for fold experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FoldOp {
    Add,
    Max,
}

impl FoldOp {
    pub fn constant(self) -> &'static str {
        match self {
            FoldOp::Add => "addInt",
            FoldOp::Max => "maxInt",
        }
    }

    pub fn native(self, a: i64, b: i64) -> i64 {
        match self {
            FoldOp::Add => a + b,
            FoldOp::Max => a.max(b),
        }
    }
}

fn int_list_expr(xs: &[i64]) -> Expr {
    let int = Ty::ind("Int");
    xs.iter().rev().fold(Expr::app(Expr::constr("List", "Nil"), Expr::ty(int.clone())), |acc, &x| {
        Expr::apps(Expr::constr("List", "Cons"), [Expr::ty(int.clone()), Expr::lit(PrimVal::int(x)), acc])
    })
}

/// `foldr [Int] [Int] f i l` as a closed expression.
pub fn foldr_expr(f: FoldOp, i: i64, l: &[i64]) -> Expr {
    foldr_over(f, Expr::lit(PrimVal::int(i)), int_list_expr(l))
}

fn foldr_over(f: FoldOp, init: Expr, list: Expr) -> Expr {
    let int = Ty::ind("Int");
    Expr::apps(
        Expr::constant("foldr"),
        [Expr::ty(int.clone()), Expr::ty(int), Expr::constant(f.constant()), init, list],
    )
}

fn concat_expr(l: &[i64], l2: &[i64]) -> Expr {
    Expr::apps(Expr::constant("concat"), [Expr::ty(Ty::ind("Int")), int_list_expr(l), int_list_expr(l2)])
}

/// Native right fold, the oracle for the object-language `foldr`.
pub fn native_foldr(f: FoldOp, i: i64, l: &[i64]) -> i64 {
    l.iter().rev().fold(i, |acc, &x| f.native(x, acc))
}

/// Fuel sufficient for folds over lists of a few dozen elements.
pub const FOLD_FUEL: usize = 10_000;

/// Evaluates both sides of `foldr f i (concat l l2) = foldr f (foldr f i l2) l`
/// and returns them.
pub fn foldr_concat_sides(f: FoldOp, i: i64, l: &[i64], l2: &[i64]) -> Result<(Val, Val), EvalFailure> {
    let genv = prelude();
    let lhs = foldr_over(f, Expr::lit(PrimVal::int(i)), concat_expr(l, l2));
    let rhs = foldr_over(f, foldr_expr(f, i, l2), int_list_expr(l));
    Ok((eval_closed(genv, FOLD_FUEL, &lhs)?, eval_closed(genv, FOLD_FUEL, &rhs)?))
}

/// True iff both sides of the fold/concat identity evaluate to the same value.
pub fn foldr_concat_check(f: FoldOp, i: i64, l: &[i64], l2: &[i64]) -> Result<bool, EvalFailure> {
    let (a, b) = foldr_concat_sides(f, i, l, l2)?;
    Ok(a == b)
}

/// The deep-embedded fold compared with [`native_foldr`].
pub fn foldr_matches_native(f: FoldOp, i: i64, l: &[i64]) -> Result<bool, EvalFailure> {
    let v = eval_closed(prelude(), FOLD_FUEL, &foldr_expr(f, i, l))?;
    Ok(v == Val::int(native_foldr(f, i, l)))
}

/// Applies a global constant to argument values.
pub fn call(genv: &GlobalEnv, fuel: usize, name: &str, args: Vec<Val>) -> Result<Val, EvalFailure> {
    let n = args.len();
    let env = EvalEnv::from_vals(args);
    // the arguments sit in the environment, the first one at index 0
    let e = Expr::apps(Expr::constant(name), (0..n).map(Expr::var));
    crate::interp::eval(genv, fuel, &env, &e)
}
