//! Conversion from named to nameless variables, and merging of separate
//! type/term index spaces into the single shared one.

use thiserror::Error;

use super::{Branch, Expr, GlobalEnv, Ty, VarRef};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexifyError {
    #[error("unbound variable `{0}`")]
    UnboundName(String),
    #[error("constructor `{ctor}` is ambiguous between {candidates:?}; qualify it as Ind.{ctor}")]
    AmbiguousConstructor { ctor: String, candidates: Vec<String> },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Kind {
    Term,
    Type,
}

/// Binder stack, innermost last.
struct Scope<'a> {
    binders: Vec<(&'a str, Kind)>,
}

impl<'a> Scope<'a> {
    fn lookup(&self, name: &str, kind: Kind) -> Option<usize> {
        self.binders.iter().rev().position(|(n, k)| *n == name && *k == kind)
    }

    fn with<R>(&mut self, names: impl IntoIterator<Item = (&'a str, Kind)>, f: impl FnOnce(&mut Self) -> R) -> R {
        let before = self.binders.len();
        self.binders.extend(names);
        let r = f(self);
        self.binders.truncate(before);
        r
    }
}

/// Converts a named-mode expression to nameless mode.
///
/// `vars` is the naming context for free term variables, innermost first.
/// Names not bound locally resolve to a global constant, then to a
/// constructor whose name is unique across `env`.
pub fn indexify(env: &GlobalEnv, vars: &[String], e: &Expr) -> Result<Expr, IndexifyError> {
    let mut scope = Scope { binders: vars.iter().rev().map(|v| (v.as_str(), Kind::Term)).collect() };
    go_expr(env, &mut scope, e)
}

/// Resolves named type variables (written as `TInd` in named mode) against
/// `type_vars`, innermost first.
pub fn indexify_ty(type_vars: &[String], ty: &Ty) -> Ty {
    let scope = Scope { binders: type_vars.iter().rev().map(|v| (v.as_str(), Kind::Type)).collect() };
    go_ty(&scope, ty)
}

fn go_ty(scope: &Scope<'_>, ty: &Ty) -> Ty {
    match ty {
        Ty::Ind { name } => match scope.lookup(name, Kind::Type) {
            Some(i) => Ty::var(i),
            None => ty.clone(),
        },
        Ty::Var { .. } => ty.clone(),
        Ty::Forall { hint, body } => {
            let mut inner = Scope { binders: scope.binders.clone() };
            inner.binders.push((hint.as_str(), Kind::Type));
            Ty::forall(hint.clone(), go_ty(&inner, body))
        }
        Ty::App { fun, arg } => Ty::app(go_ty(scope, fun), go_ty(scope, arg)),
        Ty::Arr { dom, cod } => Ty::arr(go_ty(scope, dom), go_ty(scope, cod)),
    }
}

fn go_expr<'a>(env: &GlobalEnv, scope: &mut Scope<'a>, e: &'a Expr) -> Result<Expr, IndexifyError> {
    Ok(match e {
        Expr::Var { var: VarRef::Name(name) } => resolve_name(env, scope, name)?,
        Expr::Var { var: VarRef::Index(_) } => e.clone(),
        Expr::Lam { hint, dom, body } => {
            let dom = go_ty(scope, dom);
            let body = scope.with([(hint.as_str(), Kind::Term)], |s| go_expr(env, s, body))?;
            Expr::lam(hint.clone(), dom, body)
        }
        Expr::TyLam { hint, body } => {
            let body = scope.with([(hint.as_str(), Kind::Type)], |s| go_expr(env, s, body))?;
            Expr::ty_lam(hint.clone(), body)
        }
        Expr::Let { hint, ty, bound, body } => {
            let ty = go_ty(scope, ty);
            let bound = go_expr(env, scope, bound)?;
            let body = scope.with([(hint.as_str(), Kind::Term)], |s| go_expr(env, s, body))?;
            Expr::let_in(hint.clone(), ty, bound, body)
        }
        Expr::App { fun, arg } => Expr::app(go_expr(env, scope, fun)?, go_expr(env, scope, arg)?),
        Expr::Case { scrut, ind, ty_params, ret_ty, branches } => {
            let scrut = go_expr(env, scope, scrut)?;
            let ty_params = ty_params.iter().map(|t| go_ty(scope, t)).collect();
            let ret_ty = go_ty(scope, ret_ty);
            let branches = branches
                .iter()
                .map(|b| {
                    let binders = b.pat.binders.iter().map(|x| (x.as_str(), Kind::Term));
                    let body = scope.with(binders, |s| go_expr(env, s, &b.body))?;
                    Ok(Branch { pat: b.pat.clone(), body })
                })
                .collect::<Result<_, _>>()?;
            Expr::Case { scrut: Box::new(scrut), ind: ind.clone(), ty_params, ret_ty, branches }
        }
        Expr::Fix { f_hint, x_hint, dom, cod, body } => {
            let dom = go_ty(scope, dom);
            let cod = go_ty(scope, cod);
            let binders = [(f_hint.as_str(), Kind::Term), (x_hint.as_str(), Kind::Term)];
            let body = scope.with(binders, |s| go_expr(env, s, body))?;
            Expr::fix(f_hint.clone(), x_hint.clone(), dom, cod, body)
        }
        Expr::Ty { ty } => Expr::ty(go_ty(scope, ty)),
        Expr::Constr { .. } | Expr::Const { .. } | Expr::Lit { .. } => e.clone(),
    })
}

fn resolve_name(env: &GlobalEnv, scope: &Scope<'_>, name: &str) -> Result<Expr, IndexifyError> {
    if let Some(i) = scope.lookup(name, Kind::Term) {
        return Ok(Expr::var(i));
    }
    if env.constant(name).is_some() {
        return Ok(Expr::constant(name));
    }
    let candidates: Vec<&str> = env.inductives_with_constr(name).map(|d| d.name.as_str()).collect();
    match candidates.as_slice() {
        [] => Err(IndexifyError::UnboundName(name.to_string())),
        [ind] => Ok(Expr::constr(*ind, name)),
        _ => Err(IndexifyError::AmbiguousConstructor {
            ctor: name.to_string(),
            candidates: candidates.iter().map(|s| s.to_string()).collect(),
        }),
    }
}

/// Merges separate type-variable and term-variable index spaces into one.
///
/// In the input, a term index counts only enclosing term binders and a type
/// index counts only enclosing type binders (`TyLam`, `TForall`). In the
/// output both count every enclosing binder. Variables free in `e` are
/// additionally shifted by `shift`.
pub fn reindexify(shift: usize, e: &Expr) -> Expr {
    let mut stack = Vec::new();
    re_expr(shift, &mut stack, e)
}

fn merged_index(shift: usize, stack: &[Kind], kind: Kind, i: usize) -> usize {
    let mut seen = 0;
    for (pos, k) in stack.iter().rev().enumerate() {
        if *k == kind {
            if seen == i {
                return pos;
            }
            seen += 1;
        }
    }
    stack.len() + (i - seen) + shift
}

fn re_ty(shift: usize, stack: &mut Vec<Kind>, ty: &Ty) -> Ty {
    match ty {
        Ty::Var { index } => Ty::var(merged_index(shift, stack, Kind::Type, *index)),
        Ty::Ind { .. } => ty.clone(),
        Ty::Forall { hint, body } => {
            stack.push(Kind::Type);
            let body = re_ty(shift, stack, body);
            stack.pop();
            Ty::forall(hint.clone(), body)
        }
        Ty::App { fun, arg } => Ty::app(re_ty(shift, stack, fun), re_ty(shift, stack, arg)),
        Ty::Arr { dom, cod } => Ty::arr(re_ty(shift, stack, dom), re_ty(shift, stack, cod)),
    }
}

fn re_under(shift: usize, stack: &mut Vec<Kind>, kinds: &[Kind], e: &Expr) -> Expr {
    stack.extend_from_slice(kinds);
    let r = re_expr(shift, stack, e);
    stack.truncate(stack.len() - kinds.len());
    r
}

fn re_expr(shift: usize, stack: &mut Vec<Kind>, e: &Expr) -> Expr {
    match e {
        Expr::Var { var: VarRef::Index(i) } => Expr::var(merged_index(shift, stack, Kind::Term, *i)),
        Expr::Var { .. } | Expr::Constr { .. } | Expr::Const { .. } | Expr::Lit { .. } => e.clone(),
        Expr::Lam { hint, dom, body } => {
            let dom = re_ty(shift, stack, dom);
            Expr::lam(hint.clone(), dom, re_under(shift, stack, &[Kind::Term], body))
        }
        Expr::TyLam { hint, body } => Expr::ty_lam(hint.clone(), re_under(shift, stack, &[Kind::Type], body)),
        Expr::Let { hint, ty, bound, body } => Expr::let_in(
            hint.clone(),
            re_ty(shift, stack, ty),
            re_expr(shift, stack, bound),
            re_under(shift, stack, &[Kind::Term], body),
        ),
        Expr::App { fun, arg } => Expr::app(re_expr(shift, stack, fun), re_expr(shift, stack, arg)),
        Expr::Case { scrut, ind, ty_params, ret_ty, branches } => Expr::Case {
            scrut: Box::new(re_expr(shift, stack, scrut)),
            ind: ind.clone(),
            ty_params: ty_params.iter().map(|t| re_ty(shift, stack, t)).collect(),
            ret_ty: re_ty(shift, stack, ret_ty),
            branches: branches
                .iter()
                .map(|b| {
                    let kinds = vec![Kind::Term; b.pat.binders.len()];
                    Branch { pat: b.pat.clone(), body: re_under(shift, stack, &kinds, &b.body) }
                })
                .collect(),
        },
        Expr::Fix { f_hint, x_hint, dom, cod, body } => Expr::fix(
            f_hint.clone(),
            x_hint.clone(),
            re_ty(shift, stack, dom),
            re_ty(shift, stack, cod),
            re_under(shift, stack, &[Kind::Term, Kind::Term], body),
        ),
        Expr::Ty { ty } => Expr::ty(re_ty(shift, stack, ty)),
    }
}
