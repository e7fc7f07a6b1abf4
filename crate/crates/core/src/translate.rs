//! Translation of surface types, expressions and inductive declarations
//! into kernel terms.

use thiserror::Error;

use crate::ast::{Branch, ConstDef, ConstrDecl, Expr, GlobalEnv, InductiveDecl, Ty, VarRef};
use crate::kernel::{lift, parallel_subst, KernelConst, KernelCtor, KernelEnv, KernelInductive, MatchBranch, Term};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("unknown inductive {0}")]
    MissingInductive(String),
    #[error("unknown constructor {ind}.{ctor}")]
    MissingConstructor { ind: String, ctor: String },
    #[error("case on {ind} has no branch for {ctor}")]
    MissingBranch { ind: String, ctor: String },
    #[error("pattern {ind}.{ctor} binds {found} variable(s), constructor takes {expected}")]
    PatternArity { ind: String, ctor: String, expected: usize, found: usize },
    #[error("named variable `{0}` left in expression")]
    NamedVariable(String),
    #[error("in definition {name}: {source}")]
    InDefinition { name: String, source: Box<TranslateError> },
}

pub fn ty_to_term(ty: &Ty) -> Term {
    match ty {
        Ty::Var { index } => Term::rel(*index),
        Ty::Ind { name } => Term::ind(name.clone()),
        Ty::Forall { hint, body } => Term::prod(hint.clone(), Term::Sort, ty_to_term(body)),
        Ty::App { fun, arg } => Term::app(ty_to_term(fun), ty_to_term(arg)),
        Ty::Arr { dom, cod } => Term::prod("_", ty_to_term(dom), lift(1, 0, &ty_to_term(cod))),
    }
}

pub fn expr_to_term(genv: &GlobalEnv, e: &Expr) -> Result<Term, TranslateError> {
    Ok(match e {
        Expr::Var { var: VarRef::Index(i) } => Term::rel(*i),
        Expr::Var { var: VarRef::Name(x) } => return Err(TranslateError::NamedVariable(x.clone())),
        Expr::Lam { hint, dom, body } => Term::lambda(hint.clone(), ty_to_term(dom), expr_to_term(genv, body)?),
        Expr::TyLam { hint, body } => Term::lambda(hint.clone(), Term::Sort, expr_to_term(genv, body)?),
        Expr::Let { hint, ty, bound, body } => {
            Term::let_in(hint.clone(), ty_to_term(ty), expr_to_term(genv, bound)?, expr_to_term(genv, body)?)
        }
        Expr::App { fun, arg } => Term::app(expr_to_term(genv, fun)?, expr_to_term(genv, arg)?),
        Expr::Constr { ind, ctor } => match genv.resolve_constr(ind, ctor) {
            Some((idx, _)) => Term::construct(ind.clone(), idx),
            None if genv.inductive(ind).is_none() => return Err(TranslateError::MissingInductive(ind.clone())),
            None => return Err(TranslateError::MissingConstructor { ind: ind.clone(), ctor: ctor.clone() }),
        },
        Expr::Fix { f_hint, x_hint, dom, cod, body } => {
            let t1 = ty_to_term(dom);
            let fty = Term::prod("_", t1.clone(), lift(1, 0, &ty_to_term(cod)));
            Term::fix(f_hint.clone(), fty, Term::lambda(x_hint.clone(), lift(1, 0, &t1), expr_to_term(genv, body)?))
        }
        Expr::Case { scrut, ind, ty_params, ret_ty, branches } => {
            let decl = genv.inductive(ind).ok_or_else(|| TranslateError::MissingInductive(ind.clone()))?;
            if let Some(b) = branches.iter().find(|b| !decl.constrs.iter().any(|c| c.name == b.pat.ctor)) {
                return Err(TranslateError::MissingConstructor { ind: ind.clone(), ctor: b.pat.ctor.clone() });
            }
            let kbranches = decl
                .constrs
                .iter()
                .map(|c| branch(genv, ind, ty_params, branches, c))
                .collect::<Result<Vec<_>, _>>()?;
            Term::Match {
                ind: ind.clone(),
                n_params: decl.num_params,
                ty_params: ty_params.iter().map(ty_to_term).collect(),
                ret_ty: Box::new(lift(1, 0, &ty_to_term(ret_ty))),
                scrut: Box::new(expr_to_term(genv, scrut)?),
                branches: kbranches,
            }
        }
        Expr::Ty { ty } => ty_to_term(ty),
        Expr::Const { name } => Term::constant(name.clone()),
        Expr::Lit { value } => Term::lit(value.clone()),
    })
}

/// Translates the branch for constructor `c` into an iterated lambda. The
/// j-th binder's domain is the constructor's j-th argument type with the
/// case's type parameters substituted in, lifted over the j binders before
/// it.
pub fn branch(
    genv: &GlobalEnv,
    ind: &str,
    ty_params: &[Ty],
    branches: &[Branch],
    c: &ConstrDecl,
) -> Result<MatchBranch, TranslateError> {
    let b = branches
        .iter()
        .find(|b| b.pat.ctor == c.name)
        .ok_or_else(|| TranslateError::MissingBranch { ind: ind.into(), ctor: c.name.clone() })?;
    if b.pat.binders.len() != c.args.len() {
        return Err(TranslateError::PatternArity {
            ind: ind.into(),
            ctor: c.name.clone(),
            expected: c.args.len(),
            found: b.pat.binders.len(),
        });
    }
    // The last parameter is type variable 0.
    let params: Vec<Term> = ty_params.iter().rev().map(ty_to_term).collect();
    let doms: Vec<Term> = c
        .args
        .iter()
        .enumerate()
        .map(|(j, sigma)| {
            let lifted: Vec<Term> = params.iter().map(|p| lift(j, 0, p)).collect();
            parallel_subst(&lifted, &ty_to_term(sigma))
        })
        .collect();
    let body = expr_to_term(genv, &b.body)?;
    let term = doms.into_iter().zip(&b.pat.binders).rev().fold(body, |acc, (dom, x)| Term::lambda(x.clone(), dom, acc));
    Ok(MatchBranch { arity: c.args.len(), body: term })
}

/// Replaces `Ind name` by the variable `idx` (adjusted under binders).
fn abstract_ind(name: &str, idx: usize, t: &Term) -> Term {
    fn go(name: &str, idx: usize, depth: usize, t: &Term) -> Term {
        let rec = |t: &Term, d: usize| Box::new(go(name, idx, d, t));
        match t {
            Term::Ind { name: n } if n == name => Term::rel(idx + depth),
            Term::App { fun, arg } => Term::App { fun: rec(fun, depth), arg: rec(arg, depth) },
            Term::Prod { hint, dom, cod } => {
                Term::Prod { hint: hint.clone(), dom: rec(dom, depth), cod: rec(cod, depth + 1) }
            }
            _ => t.clone(),
        }
    }
    go(name, idx, 0, t)
}

/// Translates an inductive declaration. Inside the j-th argument type of a
/// constructor the binders are, outermost first: the inductive itself, its
/// `p` parameters, then the j preceding arguments.
pub fn decl_to_kernel(d: &InductiveDecl) -> KernelInductive {
    let p = d.num_params;
    let ctors = d
        .constrs
        .iter()
        .map(|c| {
            let k = c.args.len();
            let arg_tys = c
                .args
                .iter()
                .enumerate()
                .map(|(j, sigma)| lift(j, 0, &abstract_ind(&d.name, p, &ty_to_term(sigma))))
                .collect();
            let result_ty = Term::apps(Term::rel(p + k), (0..p).map(|i| Term::rel(k + p - 1 - i)));
            KernelCtor { name: c.name.clone(), arity: k, arg_tys, result_ty }
        })
        .collect();
    KernelInductive { name: d.name.clone(), num_params: p, ctors }
}

pub fn translate_env(genv: &GlobalEnv) -> Result<KernelEnv, TranslateError> {
    let mut out = KernelEnv { inductives: genv.inductives.iter().map(decl_to_kernel).collect(), ..Default::default() };
    for (name, def) in &genv.constants {
        let k = match def {
            ConstDef::Builtin { op } => KernelConst::Builtin { op: *op },
            ConstDef::Expr { expr } => KernelConst::Term {
                body: expr_to_term(genv, expr)
                    .map_err(|e| TranslateError::InDefinition { name: name.clone(), source: Box::new(e) })?,
            },
        };
        out.constants.insert(name.clone(), k);
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
