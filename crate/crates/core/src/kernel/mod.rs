//! A nameless kernel calculus with inductive types, in the style of a proof
//! assistant's core term language, plus lifting, parallel substitution and a
//! call-by-value evaluator.

mod eval;
mod pretty;

pub use eval::cbv_eval;
pub use pretty::{pretty_inductive, pretty_term};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::prim::{PrimOp, PrimVal};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatchBranch {
    pub arity: usize,
    /// `arity` nested lambdas around the branch body.
    pub body: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum Term {
    Rel {
        index: usize,
    },
    Lambda {
        hint: String,
        dom: Box<Term>,
        body: Box<Term>,
    },
    App {
        fun: Box<Term>,
        arg: Box<Term>,
    },
    LetIn {
        hint: String,
        ty: Box<Term>,
        bound: Box<Term>,
        body: Box<Term>,
    },
    Const {
        name: String,
    },
    Ind {
        name: String,
    },
    Construct {
        ind: String,
        idx: usize,
    },
    /// `ret_ty` lives under one binder (the matched value).
    #[serde(rename_all = "camelCase")]
    Match {
        ind: String,
        n_params: usize,
        ty_params: Vec<Term>,
        ret_ty: Box<Term>,
        scrut: Box<Term>,
        branches: Vec<MatchBranch>,
    },
    /// `body` lives under one binder, the fixpoint itself.
    Fix {
        hint: String,
        ty: Box<Term>,
        body: Box<Term>,
    },
    Prod {
        hint: String,
        dom: Box<Term>,
        cod: Box<Term>,
    },
    #[serde(rename = "SortSet")]
    Sort,
    #[serde(rename = "PrimLit")]
    Lit {
        value: PrimVal,
    },
}

impl Term {
    pub fn rel(index: usize) -> Term {
        Term::Rel { index }
    }

    pub fn lambda(hint: impl Into<String>, dom: Term, body: Term) -> Term {
        Term::Lambda { hint: hint.into(), dom: Box::new(dom), body: Box::new(body) }
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App { fun: Box::new(fun), arg: Box::new(arg) }
    }

    pub fn apps(fun: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(fun, Term::app)
    }

    pub fn let_in(hint: impl Into<String>, ty: Term, bound: Term, body: Term) -> Term {
        Term::LetIn { hint: hint.into(), ty: Box::new(ty), bound: Box::new(bound), body: Box::new(body) }
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::Const { name: name.into() }
    }

    pub fn ind(name: impl Into<String>) -> Term {
        Term::Ind { name: name.into() }
    }

    pub fn construct(ind: impl Into<String>, idx: usize) -> Term {
        Term::Construct { ind: ind.into(), idx }
    }

    pub fn fix(hint: impl Into<String>, ty: Term, body: Term) -> Term {
        Term::Fix { hint: hint.into(), ty: Box::new(ty), body: Box::new(body) }
    }

    pub fn prod(hint: impl Into<String>, dom: Term, cod: Term) -> Term {
        Term::Prod { hint: hint.into(), dom: Box::new(dom), cod: Box::new(cod) }
    }

    pub fn lit(value: PrimVal) -> Term {
        Term::Lit { value }
    }

    /// Head and arguments of an application spine.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let Term::App { fun, arg } = t {
            args.push(&**arg);
            t = fun;
        }
        args.reverse();
        (t, args)
    }

    /// True iff every free `Rel` is below `n`.
    pub fn closed_under(&self, n: usize) -> bool {
        let mut ok = true;
        self.visit_free(0, &mut |i| ok &= i < n);
        ok
    }

    fn visit_free(&self, depth: usize, f: &mut impl FnMut(usize)) {
        match self {
            Term::Rel { index } => {
                if *index >= depth {
                    f(index - depth)
                }
            }
            Term::Lambda { dom: a, body: b, .. } | Term::Prod { dom: a, cod: b, .. } => {
                a.visit_free(depth, f);
                b.visit_free(depth + 1, f);
            }
            Term::App { fun, arg } => {
                fun.visit_free(depth, f);
                arg.visit_free(depth, f);
            }
            Term::LetIn { ty, bound, body, .. } => {
                ty.visit_free(depth, f);
                bound.visit_free(depth, f);
                body.visit_free(depth + 1, f);
            }
            Term::Match { ty_params, ret_ty, scrut, branches, .. } => {
                for p in ty_params {
                    p.visit_free(depth, f);
                }
                ret_ty.visit_free(depth + 1, f);
                scrut.visit_free(depth, f);
                for b in branches {
                    b.body.visit_free(depth, f);
                }
            }
            Term::Fix { ty, body, .. } => {
                ty.visit_free(depth, f);
                body.visit_free(depth + 1, f);
            }
            Term::Const { .. } | Term::Ind { .. } | Term::Construct { .. } | Term::Sort | Term::Lit { .. } => {}
        }
    }

    /// Rebuilds the term, mapping each free `Rel` through `f(depth, index)`
    /// where `depth` is the number of binders crossed.
    fn map_rels(&self, depth: usize, f: &impl Fn(usize, usize) -> Term) -> Term {
        let go = |t: &Term, d: usize| Box::new(t.map_rels(d, f));
        match self {
            Term::Rel { index } if *index >= depth => f(depth, *index),
            Term::Rel { .. }
            | Term::Const { .. }
            | Term::Ind { .. }
            | Term::Construct { .. }
            | Term::Sort
            | Term::Lit { .. } => self.clone(),
            Term::Lambda { hint, dom, body } => {
                Term::Lambda { hint: hint.clone(), dom: go(dom, depth), body: go(body, depth + 1) }
            }
            Term::Prod { hint, dom, cod } => {
                Term::Prod { hint: hint.clone(), dom: go(dom, depth), cod: go(cod, depth + 1) }
            }
            Term::App { fun, arg } => Term::App { fun: go(fun, depth), arg: go(arg, depth) },
            Term::LetIn { hint, ty, bound, body } => Term::LetIn {
                hint: hint.clone(),
                ty: go(ty, depth),
                bound: go(bound, depth),
                body: go(body, depth + 1),
            },
            Term::Match { ind, n_params, ty_params, ret_ty, scrut, branches } => Term::Match {
                ind: ind.clone(),
                n_params: *n_params,
                ty_params: ty_params.iter().map(|p| p.map_rels(depth, f)).collect(),
                ret_ty: go(ret_ty, depth + 1),
                scrut: go(scrut, depth),
                branches: branches
                    .iter()
                    .map(|b| MatchBranch { arity: b.arity, body: b.body.map_rels(depth, f) })
                    .collect(),
            },
            Term::Fix { hint, ty, body } => {
                Term::Fix { hint: hint.clone(), ty: go(ty, depth), body: go(body, depth + 1) }
            }
        }
    }
}

/// Adds `n` to every `Rel` at or above cutoff `k` (counting binders).
pub fn lift(n: usize, k: usize, t: &Term) -> Term {
    if n == 0 {
        return t.clone();
    }
    t.map_rels(k, &|_, i| Term::rel(i + n))
}

/// Simultaneously replaces `Rel i` by `ts[i]` for `i < ts.len()` and
/// renumbers the remaining free indices down by `ts.len()`. Substituted
/// terms are lifted over the binders they end up under.
pub fn parallel_subst(ts: &[Term], t: &Term) -> Term {
    if ts.is_empty() {
        return t.clone();
    }
    let closed: Vec<bool> = ts.iter().map(|s| s.closed_under(0)).collect();
    t.map_rels(0, &|depth, i| {
        let j = i - depth;
        match ts.get(j) {
            Some(s) if closed[j] => s.clone(),
            Some(s) => lift(depth, 0, s),
            None => Term::rel(i - ts.len()),
        }
    })
}

/// Substitutes a single term for `Rel 0`.
pub fn subst1(s: &Term, t: &Term) -> Term {
    parallel_subst(std::slice::from_ref(s), t)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct KernelCtor {
    pub name: String,
    pub arity: usize,
    /// The j-th argument type lives under the inductive itself, the
    /// parameters and the j preceding arguments.
    pub arg_tys: Vec<Term>,
    pub result_ty: Term,
}

impl KernelCtor {
    /// The constructor type as a product over its arguments.
    pub fn full_type(&self) -> Term {
        self.arg_tys.iter().rev().fold(self.result_ty.clone(), |acc, a| Term::prod("_", a.clone(), acc))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct KernelInductive {
    pub name: String,
    pub num_params: usize,
    pub ctors: Vec<KernelCtor>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum KernelConst {
    Term { body: Term },
    Builtin { op: PrimOp },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelEnv {
    pub inductives: Vec<KernelInductive>,
    pub constants: IndexMap<String, KernelConst>,
}

impl KernelEnv {
    pub fn inductive(&self, name: &str) -> Option<&KernelInductive> {
        self.inductives.iter().find(|d| d.name == name)
    }

    pub fn constant(&self, name: &str) -> Option<&KernelConst> {
        self.constants.get(name)
    }

    pub fn is_empty(&self) -> bool {
        self.inductives.is_empty() && self.constants.is_empty()
    }
}
