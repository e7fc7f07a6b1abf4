//! Deep embedding of the surface language: types, patterns, expressions,
//! inductive declarations and the global environment.
//!
//! Variables are de Bruijn indices in a single index space shared by type and
//! term binders ("nameless mode"). The parser produces "named mode" terms
//! where variables carry names; [`indexify`] converts them.

mod env;
mod names;

pub use env::{ConstDef, ConstrDecl, GlobalEnv, InductiveDecl, WfDiagnostic};
pub use names::{indexify, indexify_ty, reindexify, IndexifyError};

use serde::{Deserialize, Serialize};

use crate::prim::PrimVal;

/// A variable occurrence: an index in nameless mode, a name in named mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VarRef {
    Index(usize),
    Name(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum Ty {
    #[serde(rename = "TVar")]
    Var { index: usize },
    #[serde(rename = "TInd")]
    Ind { name: String },
    #[serde(rename = "TForall")]
    Forall { hint: String, body: Box<Ty> },
    #[serde(rename = "TApp")]
    App { fun: Box<Ty>, arg: Box<Ty> },
    #[serde(rename = "TArr")]
    Arr { dom: Box<Ty>, cod: Box<Ty> },
}

impl Ty {
    pub fn var(index: usize) -> Ty {
        Ty::Var { index }
    }

    pub fn ind(name: impl Into<String>) -> Ty {
        Ty::Ind { name: name.into() }
    }

    pub fn forall(hint: impl Into<String>, body: Ty) -> Ty {
        Ty::Forall { hint: hint.into(), body: Box::new(body) }
    }

    pub fn app(fun: Ty, arg: Ty) -> Ty {
        Ty::App { fun: Box::new(fun), arg: Box::new(arg) }
    }

    pub fn arr(dom: Ty, cod: Ty) -> Ty {
        Ty::Arr { dom: Box::new(dom), cod: Box::new(cod) }
    }

    /// `I T1 .. Tn`
    pub fn apps(head: Ty, args: impl IntoIterator<Item = Ty>) -> Ty {
        args.into_iter().fold(head, Ty::app)
    }

    /// True iff every free type variable index is below `n`.
    pub fn closed_under(&self, n: usize) -> bool {
        let mut ok = true;
        self.visit_free_vars(0, &mut |i| ok &= i < n);
        ok
    }

    /// Calls `f` with `index - depth` for every variable free at `depth`.
    pub(crate) fn visit_free_vars(&self, depth: usize, f: &mut impl FnMut(usize)) {
        match self {
            Ty::Var { index } => {
                if *index >= depth {
                    f(index - depth)
                }
            }
            Ty::Ind { .. } => {}
            Ty::Forall { body, .. } => body.visit_free_vars(depth + 1, f),
            Ty::App { fun: a, arg: b } | Ty::Arr { dom: a, cod: b } => {
                a.visit_free_vars(depth, f);
                b.visit_free_vars(depth, f);
            }
        }
    }
}

/// Free function form of [`Ty::closed_under`].
pub fn ty_closed_under(n: usize, ty: &Ty) -> bool {
    ty.closed_under(n)
}

/// `C x1 .. xn`; the binder names are decoration only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pat {
    pub ctor: String,
    pub binders: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Branch {
    pub pat: Pat,
    pub body: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum Expr {
    Var {
        var: VarRef,
    },
    Lam {
        hint: String,
        dom: Ty,
        body: Box<Expr>,
    },
    TyLam {
        hint: String,
        body: Box<Expr>,
    },
    Let {
        hint: String,
        ty: Ty,
        bound: Box<Expr>,
        body: Box<Expr>,
    },
    App {
        fun: Box<Expr>,
        arg: Box<Expr>,
    },
    #[serde(rename_all = "camelCase")]
    Case {
        scrut: Box<Expr>,
        ind: String,
        ty_params: Vec<Ty>,
        ret_ty: Ty,
        branches: Vec<Branch>,
    },
    Constr {
        ind: String,
        ctor: String,
    },
    #[serde(rename_all = "camelCase")]
    Fix {
        f_hint: String,
        x_hint: String,
        dom: Ty,
        cod: Ty,
        body: Box<Expr>,
    },
    #[serde(rename = "TyAsExpr")]
    Ty {
        ty: Ty,
    },
    Const {
        name: String,
    },
    Lit {
        value: PrimVal,
    },
}

impl Expr {
    pub fn var(index: usize) -> Expr {
        Expr::Var { var: VarRef::Index(index) }
    }

    pub fn named(name: impl Into<String>) -> Expr {
        Expr::Var { var: VarRef::Name(name.into()) }
    }

    pub fn lam(hint: impl Into<String>, dom: Ty, body: Expr) -> Expr {
        Expr::Lam { hint: hint.into(), dom, body: Box::new(body) }
    }

    pub fn ty_lam(hint: impl Into<String>, body: Expr) -> Expr {
        Expr::TyLam { hint: hint.into(), body: Box::new(body) }
    }

    pub fn let_in(hint: impl Into<String>, ty: Ty, bound: Expr, body: Expr) -> Expr {
        Expr::Let { hint: hint.into(), ty, bound: Box::new(bound), body: Box::new(body) }
    }

    pub fn app(fun: Expr, arg: Expr) -> Expr {
        Expr::App { fun: Box::new(fun), arg: Box::new(arg) }
    }

    /// Left-nested application `f a1 .. an`.
    pub fn apps(fun: Expr, args: impl IntoIterator<Item = Expr>) -> Expr {
        args.into_iter().fold(fun, Expr::app)
    }

    pub fn case(scrut: Expr, ind: impl Into<String>, ty_params: Vec<Ty>, ret_ty: Ty, branches: Vec<Branch>) -> Expr {
        Expr::Case { scrut: Box::new(scrut), ind: ind.into(), ty_params, ret_ty, branches }
    }

    pub fn constr(ind: impl Into<String>, ctor: impl Into<String>) -> Expr {
        Expr::Constr { ind: ind.into(), ctor: ctor.into() }
    }

    pub fn fix(f_hint: impl Into<String>, x_hint: impl Into<String>, dom: Ty, cod: Ty, body: Expr) -> Expr {
        Expr::Fix { f_hint: f_hint.into(), x_hint: x_hint.into(), dom, cod, body: Box::new(body) }
    }

    pub fn ty(ty: Ty) -> Expr {
        Expr::Ty { ty }
    }

    pub fn constant(name: impl Into<String>) -> Expr {
        Expr::Const { name: name.into() }
    }

    pub fn lit(value: PrimVal) -> Expr {
        Expr::Lit { value }
    }

    /// Walks every free variable occurrence of the expression. `f` receives
    /// whether the occurrence is in a type and its index relative to the
    /// expression's own root (binders crossed are subtracted). Named
    /// variables are reported as [`VarKind::Named`].
    pub(crate) fn visit_free_vars(&self, depth: usize, f: &mut impl FnMut(VarKind, usize)) {
        fn ty(t: &Ty, d: usize, f: &mut impl FnMut(VarKind, usize)) {
            t.visit_free_vars(d, &mut |i| f(VarKind::Type, i));
        }
        match self {
            Expr::Var { var: VarRef::Index(i) } => {
                if *i >= depth {
                    f(VarKind::Term, i - depth)
                }
            }
            Expr::Var { var: VarRef::Name(_) } => f(VarKind::Named, 0),
            Expr::Lam { dom, body, .. } => {
                ty(dom, depth, f);
                body.visit_free_vars(depth + 1, f);
            }
            Expr::TyLam { body, .. } => body.visit_free_vars(depth + 1, f),
            Expr::Let { ty: t, bound, body, .. } => {
                ty(t, depth, f);
                bound.visit_free_vars(depth, f);
                body.visit_free_vars(depth + 1, f);
            }
            Expr::App { fun, arg } => {
                fun.visit_free_vars(depth, f);
                arg.visit_free_vars(depth, f);
            }
            Expr::Case { scrut, ty_params, ret_ty, branches, .. } => {
                scrut.visit_free_vars(depth, f);
                for p in ty_params {
                    ty(p, depth, f);
                }
                ty(ret_ty, depth, f);
                for b in branches {
                    b.body.visit_free_vars(depth + b.pat.binders.len(), f);
                }
            }
            Expr::Fix { dom, cod, body, .. } => {
                ty(dom, depth, f);
                ty(cod, depth, f);
                body.visit_free_vars(depth + 2, f);
            }
            Expr::Ty { ty: t } => ty(t, depth, f),
            Expr::Constr { .. } | Expr::Const { .. } | Expr::Lit { .. } => {}
        }
    }

    /// True iff the expression is nameless and every free index is below `n`.
    pub fn closed_under(&self, n: usize) -> bool {
        let mut ok = true;
        self.visit_free_vars(0, &mut |kind, i| ok &= kind != VarKind::Named && i < n);
        ok
    }

    /// The same expression with every binder hint blanked, for comparing
    /// nameless terms up to renaming.
    pub fn erase_hints(&self) -> Expr {
        fn ty(t: &Ty) -> Ty {
            match t {
                Ty::Forall { body, .. } => Ty::forall("", ty(body)),
                Ty::App { fun, arg } => Ty::app(ty(fun), ty(arg)),
                Ty::Arr { dom, cod } => Ty::arr(ty(dom), ty(cod)),
                Ty::Var { .. } | Ty::Ind { .. } => t.clone(),
            }
        }
        match self {
            Expr::Var { .. } | Expr::Constr { .. } | Expr::Const { .. } | Expr::Lit { .. } => self.clone(),
            Expr::Lam { dom, body, .. } => Expr::lam("", ty(dom), body.erase_hints()),
            Expr::TyLam { body, .. } => Expr::ty_lam("", body.erase_hints()),
            Expr::Let { ty: t, bound, body, .. } => Expr::let_in("", ty(t), bound.erase_hints(), body.erase_hints()),
            Expr::App { fun, arg } => Expr::app(fun.erase_hints(), arg.erase_hints()),
            Expr::Case { scrut, ind, ty_params, ret_ty, branches } => Expr::case(
                scrut.erase_hints(),
                ind.clone(),
                ty_params.iter().map(ty).collect(),
                ty(ret_ty),
                branches
                    .iter()
                    .map(|b| Branch {
                        pat: Pat { ctor: b.pat.ctor.clone(), binders: vec![String::new(); b.pat.binders.len()] },
                        body: b.body.erase_hints(),
                    })
                    .collect(),
            ),
            Expr::Fix { dom, cod, body, .. } => Expr::fix("", "", ty(dom), ty(cod), body.erase_hints()),
            Expr::Ty { ty: t } => Expr::ty(ty(t)),
        }
    }

    /// True iff no variable carries a name.
    pub fn is_nameless(&self) -> bool {
        let mut ok = true;
        self.visit_free_vars(0, &mut |kind, _| ok &= kind != VarKind::Named);
        ok
    }

    /// Number of AST nodes, types included.
    pub fn size(&self) -> usize {
        fn ty_size(t: &Ty) -> usize {
            match t {
                Ty::Var { .. } | Ty::Ind { .. } => 1,
                Ty::Forall { body, .. } => 1 + ty_size(body),
                Ty::App { fun: a, arg: b } | Ty::Arr { dom: a, cod: b } => 1 + ty_size(a) + ty_size(b),
            }
        }
        match self {
            Expr::Var { .. } | Expr::Constr { .. } | Expr::Const { .. } | Expr::Lit { .. } => 1,
            Expr::Lam { dom, body, .. } => 1 + ty_size(dom) + body.size(),
            Expr::TyLam { body, .. } => 1 + body.size(),
            Expr::Let { ty, bound, body, .. } => 1 + ty_size(ty) + bound.size() + body.size(),
            Expr::App { fun, arg } => 1 + fun.size() + arg.size(),
            Expr::Case { scrut, ty_params, ret_ty, branches, .. } => {
                1 + scrut.size()
                    + ty_params.iter().map(ty_size).sum::<usize>()
                    + ty_size(ret_ty)
                    + branches.iter().map(|b| b.body.size()).sum::<usize>()
            }
            Expr::Fix { dom, cod, body, .. } => 1 + ty_size(dom) + ty_size(cod) + body.size(),
            Expr::Ty { ty } => ty_size(ty),
        }
    }
}

/// Free function form of [`Expr::closed_under`].
pub fn expr_closed_under(n: usize, e: &Expr) -> bool {
    e.closed_under(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum VarKind {
    Term,
    Type,
    Named,
}

/// A parsed or loaded source unit: declarations, definitions and closed
/// test programs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Module {
    pub inductives: Vec<InductiveDecl>,
    #[serde(default)]
    pub builtins: Vec<BuiltinDecl>,
    pub definitions: Vec<Definition>,
    #[serde(default)]
    pub programs: Vec<Definition>,
    /// Set when the expressions are already in nameless form.
    #[serde(default)]
    pub nameless: bool,
}

/// A constant bound to a builtin operation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuiltinDecl {
    pub name: String,
    pub op: crate::prim::PrimOp,
}

/// A named top-level expression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Definition {
    pub name: String,
    pub expr: Expr,
}
