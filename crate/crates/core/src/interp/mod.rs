//! Fuel-bounded environment-passing interpreter over nameless expressions.
//!
//! Every clause evaluated at fuel `n + 1` makes its recursive calls at fuel
//! `n`, so fuel bounds the recursion depth rather than the step count.
//! Applications evaluate the argument before the function.

mod subst;
mod value;

use std::sync::Arc;

use thiserror::Error;

pub use subst::{subst_env_expr, subst_env_ty};
pub use value::{from_val, wf_val, EvalEnv, Val};

use crate::ast::{Branch, ConstDef, Expr, GlobalEnv, Ty, VarRef};
use crate::prim::{PrimOutcome, PrimVal};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalFailure {
    #[error("not enough fuel")]
    NotEnoughFuel,
    #[error("evaluation error: {0}")]
    EvalError(String),
}

pub type EvalResult<T> = Result<T, EvalFailure>;

fn stuck<T>(msg: impl Into<String>) -> EvalResult<T> {
    Err(EvalFailure::EvalError(msg.into()))
}

/// Evaluates `e` in `env`.
pub fn eval(genv: &GlobalEnv, fuel: usize, env: &EvalEnv, e: &Expr) -> EvalResult<Val> {
    Machine { genv, observer: &mut |_, _| {} }.eval(fuel, env, e)
}

/// Evaluates a closed expression in the empty environment.
pub fn eval_closed(genv: &GlobalEnv, fuel: usize, e: &Expr) -> EvalResult<Val> {
    eval(genv, fuel, &EvalEnv::new(), e)
}

/// Like [`eval`], calling `observer` with the environment and expression of
/// every evaluation step (before the fuel check passes it on).
pub fn eval_observed(
    genv: &GlobalEnv,
    fuel: usize,
    env: &EvalEnv,
    e: &Expr,
    observer: &mut dyn FnMut(&EvalEnv, &Expr),
) -> EvalResult<Val> {
    Machine { genv, observer }.eval(fuel, env, e)
}

/// Substitutes the type values of `env` into `ty`. Fails when a free type
/// variable points at a non-type value or past the end of `env`.
pub fn eval_type(env: &EvalEnv, ty: &Ty) -> Option<Ty> {
    fn go(env: &EvalEnv, depth: usize, ty: &Ty) -> Option<Ty> {
        Some(match ty {
            Ty::Var { index } if *index < depth => ty.clone(),
            Ty::Var { index } => match env.get(index - depth)? {
                Val::Ty(t) => t.clone(),
                _ => return None,
            },
            Ty::Ind { .. } => ty.clone(),
            Ty::Forall { hint, body } => Ty::forall(hint.clone(), go(env, depth + 1, body)?),
            Ty::App { fun, arg } => Ty::app(go(env, depth, fun)?, go(env, depth, arg)?),
            Ty::Arr { dom, cod } => Ty::arr(go(env, depth, dom)?, go(env, depth, cod)?),
        })
    }
    go(env, 0, ty)
}

/// Selects the branch for constructor `ctor`. `args` holds the full
/// argument list of the constructor value, `n_params` type parameters
/// first; the pattern must bind exactly the remaining arguments.
pub fn match_pat<'b>(
    ctor: &str,
    n_params: usize,
    arg_tys: &[Ty],
    args: &[Val],
    branches: &'b [Branch],
) -> Option<&'b Expr> {
    let b = branches.iter().find(|b| b.pat.ctor == ctor)?;
    let arity = b.pat.binders.len();
    (arity == arg_tys.len() && args.len() == n_params + arity).then_some(&b.body)
}

/// True iff `e` is closed under `|env| + extra` and every type variable of
/// `e` that reaches into `env` finds a type value.
pub fn validate(env: &EvalEnv, extra: usize, e: &Expr) -> bool {
    e.closed_under(env.len() + extra) && value::env_wf_for(env, extra, e)
}

pub fn validate_branches(env: &EvalEnv, branches: &[Branch]) -> bool {
    branches.iter().all(|b| validate(env, b.pat.binders.len(), &b.body))
}

struct Machine<'a> {
    genv: &'a GlobalEnv,
    observer: &'a mut dyn FnMut(&EvalEnv, &Expr),
}

impl Machine<'_> {
    fn ty(&self, env: &EvalEnv, ty: &Ty) -> EvalResult<Ty> {
        match eval_type(env, ty) {
            Some(t) => Ok(t),
            None => stuck(format!("cannot evaluate type {}", crate::syntax::pretty_ty(ty))),
        }
    }

    fn eval(&mut self, fuel: usize, env: &EvalEnv, e: &Expr) -> EvalResult<Val> {
        if fuel == 0 {
            return Err(EvalFailure::NotEnoughFuel);
        }
        (self.observer)(env, e);
        let n = fuel - 1;
        match e {
            Expr::Var { var: VarRef::Index(i) } => match env.get(*i) {
                Some(v) => Ok(v.clone()),
                None => stuck(format!("unbound index {i} in environment of size {}", env.len())),
            },
            Expr::Var { var: VarRef::Name(x) } => stuck(format!("named variable `{x}` in nameless evaluation")),
            Expr::Lam { hint, dom, body } => {
                let dom = self.ty(env, dom)?;
                if !validate(env, 1, body) {
                    return stuck(format!("body of \\{hint} does not validate"));
                }
                Ok(Val::ClosLam { env: env.clone(), hint: hint.clone(), dom, body: Arc::new((**body).clone()) })
            }
            Expr::TyLam { hint, body } => {
                if !validate(env, 1, body) {
                    return stuck(format!("body of /\\{hint} does not validate"));
                }
                Ok(Val::TyClos { env: env.clone(), hint: hint.clone(), body: Arc::new((**body).clone()) })
            }
            Expr::Let { ty, bound, body, .. } => {
                self.ty(env, ty)?;
                let v = self.eval(n, env, bound)?;
                self.eval(n, &env.push(v), body)
            }
            Expr::App { fun, arg } => {
                let v2 = self.eval(n, env, arg)?;
                let v1 = self.eval(n, env, fun)?;
                self.apply(n, v1, v2)
            }
            Expr::Case { scrut, ind, ty_params, ret_ty, branches } => {
                if !validate_branches(env, branches) {
                    return stuck(format!("branches of case on {ind} do not validate"));
                }
                self.ty(env, ret_ty)?;
                for p in ty_params {
                    self.ty(env, p)?;
                }
                match self.eval(n, env, scrut)? {
                    Val::Constr { ind: ind2, ctor, args } => {
                        let Some((_, decl)) = self.genv.resolve_constr(&ind2, &ctor) else {
                            return stuck(format!("unknown constructor {ind2}.{ctor}"));
                        };
                        if *ind != ind2 {
                            return stuck(format!("case on {ind} given a value of {ind2}"));
                        }
                        let n_params = self.genv.inductive(&ind2).map_or(0, |d| d.num_params);
                        let Some(body) = match_pat(&ctor, n_params, &decl.args, &args, branches) else {
                            return stuck(format!(
                                "no branch of arity {} for {ctor}",
                                args.len().saturating_sub(n_params)
                            ));
                        };
                        let mut env2 = env.clone();
                        for a in args.into_iter().skip(n_params) {
                            env2 = env2.push(a);
                        }
                        self.eval(n, &env2, body)
                    }
                    other => stuck(format!("case on {ind} given a non-constructor value {other}")),
                }
            }
            Expr::Constr { ind, ctor } => {
                if self.genv.resolve_constr(ind, ctor).is_none() {
                    return stuck(format!("unknown constructor {ind}.{ctor}"));
                }
                Ok(Val::constr(ind.clone(), ctor.clone(), vec![]))
            }
            Expr::Fix { f_hint, x_hint, dom, cod, body } => {
                let dom = self.ty(env, dom)?;
                let cod = self.ty(env, cod)?;
                if !validate(env, 2, body) {
                    return stuck(format!("body of fixpoint {f_hint} does not validate"));
                }
                Ok(Val::ClosFix {
                    env: env.clone(),
                    f_hint: f_hint.clone(),
                    x_hint: x_hint.clone(),
                    dom,
                    cod,
                    body: Arc::new((**body).clone()),
                })
            }
            Expr::Ty { ty } => Ok(Val::Ty(self.ty(env, ty)?)),
            Expr::Const { name } => match self.genv.constant(name) {
                None => stuck(format!("unknown constant {name}")),
                Some(ConstDef::Builtin { op }) => Ok(Val::Builtin { name: name.clone(), op: *op, args: vec![] }),
                Some(ConstDef::Expr { expr }) => self.eval(n, &EvalEnv::new(), expr),
            },
            Expr::Lit { value } => Ok(Val::Prim(value.clone())),
        }
    }

    fn apply(&mut self, n: usize, v1: Val, v2: Val) -> EvalResult<Val> {
        match v1 {
            Val::ClosLam { env, body, .. } => self.eval(n, &env.push(v2), &body),
            Val::ClosFix { ref env, ref body, .. } => {
                if !v2.is_constr() {
                    return stuck(format!("fixpoint applied to a non-constructor value {v2}"));
                }
                let env = env.push(v1.clone()).push(v2);
                let body = body.clone();
                self.eval(n, &env, &body)
            }
            Val::TyClos { env, body, .. } => match v2 {
                Val::Ty(_) => self.eval(n, &env.push(v2), &body),
                other => stuck(format!("type abstraction applied to a non-type {other}")),
            },
            Val::Constr { ind, ctor, mut args } => {
                let Some((_, decl)) = self.genv.resolve_constr(&ind, &ctor) else {
                    return stuck(format!("unknown constructor {ind}.{ctor}"));
                };
                let n_params = self.genv.inductive(&ind).map_or(0, |d| d.num_params);
                if args.len() >= n_params + decl.args.len() {
                    return stuck(format!("constructor {ind}.{ctor} applied to too many arguments"));
                }
                let is_ty = matches!(v2, Val::Ty(_));
                if (args.len() < n_params) != is_ty {
                    return stuck(format!("ill-kinded argument {v2} to constructor {ind}.{ctor}"));
                }
                args.push(v2);
                Ok(Val::Constr { ind, ctor, args })
            }
            Val::Builtin { name, op, mut args } => {
                let Val::Prim(p) = v2 else {
                    return stuck(format!("builtin {name} applied to a non-literal {v2}"));
                };
                args.push(p);
                if args.len() < op.arity() {
                    return Ok(Val::Builtin { name, op, args });
                }
                let refs: Vec<&PrimVal> = args.iter().collect();
                match op.apply(&refs) {
                    Some(PrimOutcome::Lit(p)) => Ok(Val::Prim(p)),
                    Some(PrimOutcome::Bool(b)) => Ok(Val::boolean(b)),
                    None => stuck(format!("builtin {name} applied to ill-typed literals")),
                }
            }
            other => stuck(format!("cannot apply {other}")),
        }
    }
}
