//! Reference implementations over named terms, used as test oracles for
//! the index arithmetic of the kernel and the translation.
//!
//! A named term gives every binder a globally fresh id, so renaming free
//! variables and substituting are plain tree maps with no shifting at all.

use proptest::prelude::*;

use crate::kernel::{MatchBranch, Term};
use crate::prim::PrimVal;

#[derive(Clone, Debug)]
pub enum N {
    /// Free variable, counted from the root.
    Free(usize),
    Bound(u32),
    Leaf(Term),
    Lambda(u32, String, Box<N>, Box<N>),
    Prod(u32, String, Box<N>, Box<N>),
    App(Box<N>, Box<N>),
    Let(u32, String, Box<N>, Box<N>, Box<N>),
    Fix(u32, String, Box<N>, Box<N>),
    Match {
        ind: String,
        n_params: usize,
        ty_params: Vec<N>,
        ret: (u32, Box<N>),
        scrut: Box<N>,
        branches: Vec<(usize, N)>,
    },
}

#[derive(Default)]
pub struct Namer(u32);

impl Namer {
    pub fn fresh(&mut self) -> u32 {
        self.0 += 1;
        self.0
    }
}

pub fn to_named(t: &Term, namer: &mut Namer) -> N {
    named(t, &mut Vec::new(), namer)
}

fn under(t: &Term, stack: &mut Vec<u32>, namer: &mut Namer) -> (u32, Box<N>) {
    let id = namer.fresh();
    stack.push(id);
    let n = named(t, stack, namer);
    stack.pop();
    (id, Box::new(n))
}

fn named(t: &Term, stack: &mut Vec<u32>, namer: &mut Namer) -> N {
    match t {
        Term::Rel { index } if *index < stack.len() => N::Bound(stack[stack.len() - 1 - index]),
        Term::Rel { index } => N::Free(index - stack.len()),
        Term::Lambda { hint, dom, body } => {
            let d = Box::new(named(dom, stack, namer));
            let (id, b) = under(body, stack, namer);
            N::Lambda(id, hint.clone(), d, b)
        }
        Term::Prod { hint, dom, cod } => {
            let d = Box::new(named(dom, stack, namer));
            let (id, c) = under(cod, stack, namer);
            N::Prod(id, hint.clone(), d, c)
        }
        Term::App { fun, arg } => N::App(Box::new(named(fun, stack, namer)), Box::new(named(arg, stack, namer))),
        Term::LetIn { hint, ty, bound, body } => {
            let ty = Box::new(named(ty, stack, namer));
            let bound = Box::new(named(bound, stack, namer));
            let (id, b) = under(body, stack, namer);
            N::Let(id, hint.clone(), ty, bound, b)
        }
        Term::Fix { hint, ty, body } => {
            let ty = Box::new(named(ty, stack, namer));
            let (id, b) = under(body, stack, namer);
            N::Fix(id, hint.clone(), ty, b)
        }
        Term::Match { ind, n_params, ty_params, ret_ty, scrut, branches } => N::Match {
            ind: ind.clone(),
            n_params: *n_params,
            ty_params: ty_params.iter().map(|p| named(p, stack, namer)).collect(),
            ret: under(ret_ty, stack, namer),
            scrut: Box::new(named(scrut, stack, namer)),
            branches: branches.iter().map(|b| (b.arity, named(&b.body, stack, namer))).collect(),
        },
        Term::Const { .. } | Term::Ind { .. } | Term::Construct { .. } | Term::Sort | Term::Lit { .. } => {
            N::Leaf(t.clone())
        }
    }
}

pub fn from_named(n: &N) -> Term {
    unnamed(n, &mut Vec::new())
}

fn unnamed_under(id: u32, n: &N, stack: &mut Vec<u32>) -> Term {
    stack.push(id);
    let t = unnamed(n, stack);
    stack.pop();
    t
}

fn unnamed(n: &N, stack: &mut Vec<u32>) -> Term {
    match n {
        N::Free(i) => Term::rel(stack.len() + i),
        N::Bound(id) => {
            let pos = stack.iter().rposition(|x| x == id).expect("bound id in scope");
            Term::rel(stack.len() - 1 - pos)
        }
        N::Leaf(t) => t.clone(),
        N::Lambda(id, h, d, b) => Term::lambda(h.clone(), unnamed(d, stack), unnamed_under(*id, b, stack)),
        N::Prod(id, h, d, c) => Term::prod(h.clone(), unnamed(d, stack), unnamed_under(*id, c, stack)),
        N::App(f, a) => Term::app(unnamed(f, stack), unnamed(a, stack)),
        N::Let(id, h, ty, bound, b) => {
            Term::let_in(h.clone(), unnamed(ty, stack), unnamed(bound, stack), unnamed_under(*id, b, stack))
        }
        N::Fix(id, h, ty, b) => Term::fix(h.clone(), unnamed(ty, stack), unnamed_under(*id, b, stack)),
        N::Match { ind, n_params, ty_params, ret, scrut, branches } => Term::Match {
            ind: ind.clone(),
            n_params: *n_params,
            ty_params: ty_params.iter().map(|p| unnamed(p, stack)).collect(),
            ret_ty: Box::new(unnamed_under(ret.0, &ret.1, stack)),
            scrut: Box::new(unnamed(scrut, stack)),
            branches: branches.iter().map(|(a, b)| MatchBranch { arity: *a, body: unnamed(b, stack) }).collect(),
        },
    }
}

/// Replaces every free variable `i` by `f(i)`.
pub fn map_free(n: &N, f: &mut dyn FnMut(usize) -> N) -> N {
    let mut go = |m: &N| Box::new(map_free(m, f));
    match n {
        N::Free(i) => f(*i),
        N::Bound(_) | N::Leaf(_) => n.clone(),
        N::Lambda(id, h, d, b) => {
            let d = go(d);
            N::Lambda(*id, h.clone(), d, go(b))
        }
        N::Prod(id, h, d, c) => {
            let d = go(d);
            N::Prod(*id, h.clone(), d, go(c))
        }
        N::App(a, b) => {
            let a = go(a);
            N::App(a, go(b))
        }
        N::Let(id, h, ty, bound, b) => {
            let ty = go(ty);
            let bound = go(bound);
            N::Let(*id, h.clone(), ty, bound, go(b))
        }
        N::Fix(id, h, ty, b) => {
            let ty = go(ty);
            N::Fix(*id, h.clone(), ty, go(b))
        }
        N::Match { ind, n_params, ty_params, ret, scrut, branches } => N::Match {
            ind: ind.clone(),
            n_params: *n_params,
            ty_params: ty_params.iter().map(|p| map_free(p, f)).collect(),
            ret: (ret.0, Box::new(map_free(&ret.1, f))),
            scrut: Box::new(map_free(scrut, f)),
            branches: branches.iter().map(|(a, b)| (*a, map_free(b, f))).collect(),
        },
    }
}

/// Lifting by renaming: free variable `i >= k` becomes `i + n`.
pub fn named_lift(n: usize, k: usize, t: &Term) -> Term {
    let mut namer = Namer::default();
    let named = to_named(t, &mut namer);
    from_named(&map_free(&named, &mut |i| N::Free(if i >= k { i + n } else { i })))
}

/// Substitution by grafting: each free variable `i < ts.len()` is replaced
/// by a freshly named copy of `ts[i]`; the rest drop by `ts.len()`.
pub fn named_subst(ts: &[Term], t: &Term) -> Term {
    let mut namer = Namer::default();
    let named = to_named(t, &mut namer);
    from_named(&map_free(&named, &mut |i| match ts.get(i) {
        Some(s) => to_named(s, &mut namer),
        None => N::Free(i - ts.len()),
    }))
}

fn hint() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["x", "y", "_"]).prop_map(String::from)
}

/// Random kernel terms with free variables below `max_rel` at the root.
pub fn arb_term(max_rel: usize) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        4 => (0..max_rel).prop_map(Term::rel),
        1 => Just(Term::Sort),
        1 => (0i64..5).prop_map(|i| Term::lit(PrimVal::int(i))),
        1 => Just(Term::constant("c")),
        1 => (0usize..2).prop_map(|i| Term::construct("Bool", i)),
        1 => Just(Term::ind("Nat")),
    ];
    leaf.prop_recursive(5, 48, 3, |inner| {
        prop_oneof![
            (hint(), inner.clone(), inner.clone()).prop_map(|(h, d, b)| Term::lambda(h, d, b)),
            (hint(), inner.clone(), inner.clone()).prop_map(|(h, d, b)| Term::prod(h, d, b)),
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::app(f, a)),
            (hint(), inner.clone(), inner.clone(), inner.clone()).prop_map(|(h, t, v, b)| Term::let_in(h, t, v, b)),
            (hint(), inner.clone(), inner.clone()).prop_map(|(h, t, b)| Term::fix(h, t, b)),
            (
                prop::collection::vec(inner.clone(), 0..2),
                inner.clone(),
                inner.clone(),
                prop::collection::vec((0usize..3, inner.clone()), 0..3)
            )
                .prop_map(|(ty_params, ret, scrut, bs)| Term::Match {
                    ind: "Bool".into(),
                    n_params: 0,
                    ty_params,
                    ret_ty: Box::new(ret),
                    scrut: Box::new(scrut),
                    branches: bs.into_iter().map(|(arity, body)| MatchBranch { arity, body }).collect(),
                }),
        ]
    })
}

#[test]
fn named_form_round_trips() {
    let t = Term::lambda("x", Term::Sort, Term::app(Term::rel(0), Term::rel(3)));
    let mut namer = Namer::default();
    assert_eq!(from_named(&to_named(&t, &mut namer)), t);
}
