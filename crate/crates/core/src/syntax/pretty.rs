use std::collections::HashSet;
use std::fmt::Write;

use super::parser::is_keyword;
use crate::ast::{Expr, Ty, VarRef};
use crate::prim::{PrimVal, BOOL, FALSE, TRUE};

/// Prints an expression in the concrete syntax accepted by the parser.
/// Binder hints become names, renamed where they would shadow a binder in
/// scope or capture a global name the expression mentions.
pub fn pretty_expr(e: &Expr) -> String {
    let mut p = Printer::new();
    p.reserve_expr(e);
    p.expr(e, 0);
    p.out
}

pub fn pretty_ty(t: &Ty) -> String {
    let mut p = Printer::new();
    p.reserve_ty(t);
    p.ty(t, 0);
    p.out
}

struct Printer {
    names: Vec<String>,
    reserved: HashSet<String>,
    out: String,
}

fn valid_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !is_keyword(s)
}

impl Printer {
    fn new() -> Self {
        Printer { names: Vec::new(), reserved: HashSet::new(), out: String::new() }
    }

    fn reserve_ty(&mut self, t: &Ty) {
        match t {
            Ty::Ind { name } => {
                self.reserved.insert(name.clone());
            }
            Ty::Var { .. } => {}
            Ty::Forall { body, .. } => self.reserve_ty(body),
            Ty::App { fun: a, arg: b } | Ty::Arr { dom: a, cod: b } => {
                self.reserve_ty(a);
                self.reserve_ty(b);
            }
        }
    }

    fn reserve_expr(&mut self, e: &Expr) {
        match e {
            Expr::Var { var: VarRef::Name(x) } | Expr::Const { name: x } => {
                self.reserved.insert(x.clone());
            }
            Expr::Var { .. } | Expr::Constr { .. } | Expr::Lit { .. } => {}
            Expr::Lam { dom, body, .. } => {
                self.reserve_ty(dom);
                self.reserve_expr(body);
            }
            Expr::TyLam { body, .. } => self.reserve_expr(body),
            Expr::Let { ty, bound, body, .. } => {
                self.reserve_ty(ty);
                self.reserve_expr(bound);
                self.reserve_expr(body);
            }
            Expr::App { fun, arg } => {
                self.reserve_expr(fun);
                self.reserve_expr(arg);
            }
            Expr::Case { scrut, ty_params, ret_ty, branches, .. } => {
                self.reserve_expr(scrut);
                ty_params.iter().for_each(|t| self.reserve_ty(t));
                self.reserve_ty(ret_ty);
                branches.iter().for_each(|b| self.reserve_expr(&b.body));
            }
            Expr::Fix { dom, cod, body, .. } => {
                self.reserve_ty(dom);
                self.reserve_ty(cod);
                self.reserve_expr(body);
            }
            Expr::Ty { ty } => self.reserve_ty(ty),
        }
    }

    fn fresh(&self, hint: &str, fallback: &str) -> String {
        let base = if valid_ident(hint) { hint } else { fallback };
        let taken = |c: &str| self.names.iter().any(|n| n == c) || self.reserved.contains(c);
        if !taken(base) {
            return base.to_string();
        }
        (0..).map(|i| format!("{base}{i}")).find(|c| !taken(c)).unwrap()
    }

    fn var(&mut self, index: usize) {
        match self.names.len().checked_sub(index + 1) {
            Some(i) => self.out.push_str(&self.names[i]),
            None => {
                let _ = write!(self.out, "#{}", index - self.names.len());
            }
        }
    }

    fn paren(&mut self, yes: bool, f: impl FnOnce(&mut Self)) {
        if yes {
            self.out.push('(');
        }
        f(self);
        if yes {
            self.out.push(')');
        }
    }

    /// Levels: 0 anything, 1 application, 2 atom.
    fn ty(&mut self, t: &Ty, level: u8) {
        match t {
            Ty::Var { index } => match self.names.len().checked_sub(index + 1) {
                Some(i) => self.out.push_str(&self.names[i].clone()),
                None => {
                    let _ = write!(self.out, "^{}", index - self.names.len());
                }
            },
            Ty::Ind { name } => self.out.push_str(name),
            Ty::Forall { hint, body } => self.paren(level > 0, |p| {
                let a = p.fresh(hint, "A");
                let _ = write!(p.out, "forall {a}. ");
                p.names.push(a);
                p.ty(body, 0);
                p.names.pop();
            }),
            Ty::Arr { dom, cod } => self.paren(level > 0, |p| {
                p.ty(dom, 1);
                p.out.push_str(" -> ");
                p.ty(cod, 0);
            }),
            Ty::App { fun, arg } => self.paren(level > 1, |p| {
                p.ty(fun, 1);
                p.out.push(' ');
                p.ty(arg, 2);
            }),
        }
    }

    fn bind<R>(&mut self, name: String, f: impl FnOnce(&mut Self) -> R) -> R {
        self.names.push(name);
        let r = f(self);
        self.names.pop();
        r
    }

    fn expr(&mut self, e: &Expr, level: u8) {
        match e {
            Expr::Var { var: VarRef::Index(i) } => self.var(*i),
            Expr::Var { var: VarRef::Name(x) } => self.out.push_str(x),
            Expr::Const { name } => self.out.push_str(name),
            Expr::Constr { ind, ctor } => {
                let _ = write!(self.out, "{ind}.{ctor}");
            }
            Expr::Lit { value } => match value {
                PrimVal::Int(i) => {
                    let _ = write!(self.out, "{i}z");
                }
                PrimVal::Nat(n) => {
                    let _ = write!(self.out, "{n}");
                }
            },
            Expr::Ty { ty } => {
                self.out.push('[');
                self.ty(ty, 0);
                self.out.push(']');
            }
            Expr::App { fun, arg } => self.paren(level > 1, |p| {
                p.expr(fun, 1);
                p.out.push(' ');
                p.expr(arg, 2);
            }),
            Expr::Lam { hint, dom, body } => self.paren(level > 0, |p| {
                let x = p.fresh(hint, "x");
                let _ = write!(p.out, "\\{x} : ");
                p.ty(dom, 1);
                p.out.push_str(" -> ");
                p.bind(x, |p| p.expr(body, 0));
            }),
            Expr::TyLam { hint, body } => self.paren(level > 0, |p| {
                let a = p.fresh(hint, "A");
                let _ = write!(p.out, "/\\{a} -> ");
                p.bind(a, |p| p.expr(body, 0));
            }),
            Expr::Let { hint, ty, bound, body } => self.paren(level > 0, |p| {
                let x = p.fresh(hint, "x");
                let _ = write!(p.out, "let {x} : ");
                p.ty(ty, 0);
                p.out.push_str(" = ");
                p.expr(bound, 0);
                p.out.push_str(" in ");
                p.bind(x, |p| p.expr(body, 0));
            }),
            Expr::Fix { f_hint, x_hint, dom, cod, body } => self.paren(level > 0, |p| {
                let f = p.fresh(f_hint, "f");
                let x = p.bind(f.clone(), |p| p.fresh(x_hint, "x"));
                let _ = write!(p.out, "fix {f} ({x} : ");
                p.ty(dom, 0);
                p.out.push_str(") : ");
                p.ty(cod, 0);
                p.out.push_str(" = ");
                p.bind(f, |p| p.bind(x, |p| p.expr(body, 0)));
            }),
            Expr::Case { scrut, ind, ty_params, ret_ty, branches } => self.paren(level > 0, |p| {
                let is_if = ind == BOOL
                    && ty_params.is_empty()
                    && branches.len() == 2
                    && branches[0].pat.ctor == TRUE
                    && branches[1].pat.ctor == FALSE
                    && branches.iter().all(|b| b.pat.binders.is_empty());
                if is_if {
                    p.out.push_str("if ");
                    p.expr(scrut, 0);
                    p.out.push_str(" return ");
                    p.ty(ret_ty, 0);
                    p.out.push_str(" then ");
                    p.expr(&branches[0].body, 0);
                    p.out.push_str(" else ");
                    p.expr(&branches[1].body, 0);
                    return;
                }
                p.out.push_str("case ");
                p.expr(scrut, 1);
                let _ = write!(p.out, " : {ind}");
                for t in ty_params {
                    p.out.push(' ');
                    p.ty(t, 2);
                }
                p.out.push_str(" return ");
                p.ty(ret_ty, 0);
                p.out.push_str(" of");
                for b in branches {
                    let _ = write!(p.out, " | {}", b.pat.ctor);
                    let before = p.names.len();
                    for x in &b.pat.binders {
                        let x = p.fresh(x, "x");
                        let _ = write!(p.out, " {x}");
                        p.names.push(x);
                    }
                    p.out.push_str(" -> ");
                    p.expr(&b.body, 1);
                    p.names.truncate(before);
                }
            }),
        }
    }
}
