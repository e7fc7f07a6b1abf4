//! Parallel substitution of an environment of closed expressions.
//!
//! Index `i` free at the root maps to `rho[i]`; indices past the end of
//! `rho` drop by `rho.len()`. Because `rho` is closed nothing needs lifting
//! under binders. A type variable that lands on an entry which is not a type
//! makes the substitution undefined.

use crate::ast::{Branch, Expr, Ty, VarRef};

pub fn subst_env_ty(rho: &[Expr], ty: &Ty) -> Option<Ty> {
    go_ty(rho, 0, ty)
}

pub fn subst_env_expr(rho: &[Expr], e: &Expr) -> Option<Expr> {
    if rho.is_empty() {
        return Some(e.clone());
    }
    go(rho, 0, e)
}

fn go_ty(rho: &[Expr], depth: usize, ty: &Ty) -> Option<Ty> {
    Some(match ty {
        Ty::Var { index } if *index < depth => ty.clone(),
        Ty::Var { index } => match rho.get(index - depth) {
            Some(Expr::Ty { ty }) => ty.clone(),
            Some(_) => return None,
            None => Ty::var(index - rho.len()),
        },
        Ty::Ind { .. } => ty.clone(),
        Ty::Forall { hint, body } => Ty::forall(hint.clone(), go_ty(rho, depth + 1, body)?),
        Ty::App { fun, arg } => Ty::app(go_ty(rho, depth, fun)?, go_ty(rho, depth, arg)?),
        Ty::Arr { dom, cod } => Ty::arr(go_ty(rho, depth, dom)?, go_ty(rho, depth, cod)?),
    })
}

fn go(rho: &[Expr], depth: usize, e: &Expr) -> Option<Expr> {
    Some(match e {
        Expr::Var { var: VarRef::Index(i) } if *i < depth => e.clone(),
        Expr::Var { var: VarRef::Index(i) } => match rho.get(i - depth) {
            Some(s) => s.clone(),
            None => Expr::var(i - rho.len()),
        },
        Expr::Var { .. } | Expr::Constr { .. } | Expr::Const { .. } | Expr::Lit { .. } => e.clone(),
        Expr::Lam { hint, dom, body } => Expr::lam(hint.clone(), go_ty(rho, depth, dom)?, go(rho, depth + 1, body)?),
        Expr::TyLam { hint, body } => Expr::ty_lam(hint.clone(), go(rho, depth + 1, body)?),
        Expr::Let { hint, ty, bound, body } => {
            Expr::let_in(hint.clone(), go_ty(rho, depth, ty)?, go(rho, depth, bound)?, go(rho, depth + 1, body)?)
        }
        Expr::App { fun, arg } => Expr::app(go(rho, depth, fun)?, go(rho, depth, arg)?),
        Expr::Case { scrut, ind, ty_params, ret_ty, branches } => Expr::Case {
            scrut: Box::new(go(rho, depth, scrut)?),
            ind: ind.clone(),
            ty_params: ty_params.iter().map(|t| go_ty(rho, depth, t)).collect::<Option<_>>()?,
            ret_ty: go_ty(rho, depth, ret_ty)?,
            branches: branches
                .iter()
                .map(|b| Some(Branch { pat: b.pat.clone(), body: go(rho, depth + b.pat.binders.len(), &b.body)? }))
                .collect::<Option<_>>()?,
        },
        Expr::Fix { f_hint, x_hint, dom, cod, body } => Expr::fix(
            f_hint.clone(),
            x_hint.clone(),
            go_ty(rho, depth, dom)?,
            go_ty(rho, depth, cod)?,
            go(rho, depth + 2, body)?,
        ),
        Expr::Ty { ty } => Expr::ty(go_ty(rho, depth, ty)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prim::PrimVal;

    #[test]
    fn empty_env_is_identity() {
        let e = Expr::lam("x", Ty::var(3), Expr::var(7));
        assert_eq!(subst_env_expr(&[], &e), Some(e));
    }

    #[test]
    fn type_entry_fills_type_slot() {
        let e = Expr::lam("x", Ty::var(0), Expr::var(0));
        let rho = [Expr::ty(Ty::ind("Nat"))];
        assert_eq!(subst_env_expr(&rho, &e), Some(Expr::lam("x", Ty::ind("Nat"), Expr::var(0))));
    }

    #[test]
    fn term_entry_in_type_slot_is_undefined() {
        let rho = [Expr::lit(PrimVal::int(5))];
        assert_eq!(subst_env_ty(&rho, &Ty::var(0)), None);
        assert_eq!(subst_env_expr(&rho, &Expr::lam("x", Ty::var(0), Expr::var(0))), None);
    }

    #[test]
    fn indices_past_env_drop() {
        let rho = [Expr::lit(PrimVal::int(5))];
        let e = Expr::lam("x", Ty::ind("Int"), Expr::apps(Expr::var(1), [Expr::var(2), Expr::var(0)]));
        let out = subst_env_expr(&rho, &e).unwrap();
        assert_eq!(
            out,
            Expr::lam("x", Ty::ind("Int"), Expr::apps(Expr::lit(PrimVal::int(5)), [Expr::var(1), Expr::var(0)]))
        );
    }
}
