use super::*;

use proptest::prelude::*;

use crate::ast::Pat;
use crate::kernel::pretty_inductive;
use crate::oracle::{from_named, Namer, N};
use crate::prim::PrimVal;
use crate::programs::{self, prelude};
use crate::soundness::gen_expr;

fn arr(a: Ty, b: Ty) -> Ty {
    Ty::arr(a, b)
}

fn app2(h: Term, a: Term, b: Term) -> Term {
    Term::apps(h, [a, b])
}

#[test]
fn type_examples() {
    assert_eq!(ty_to_term(&arr(Ty::ind("Nat"), Ty::ind("Bool"))), Term::prod("_", Term::ind("Nat"), Term::ind("Bool")));
    let t = Ty::forall("A", arr(Ty::var(0), Ty::var(0)));
    assert_eq!(ty_to_term(&t), Term::prod("A", Term::Sort, Term::prod("_", Term::rel(0), Term::rel(1))));
}

#[test]
fn expression_examples() {
    let genv = &programs::crowdfunding().env;
    let id = Expr::lam("x", Ty::ind("Nat"), Expr::var(0));
    assert_eq!(expr_to_term(genv, &id), Ok(Term::lambda("x", Term::ind("Nat"), Term::rel(0))));
    assert_eq!(expr_to_term(genv, &Expr::constr("Msg", "Claim")), Ok(Term::construct("Msg", 2)));
    assert_eq!(expr_to_term(genv, &Expr::constr("Msg", "Donate")), Ok(Term::construct("Msg", 0)));
    assert_eq!(expr_to_term(genv, &Expr::ty_lam("A", Expr::var(0))), Ok(Term::lambda("A", Term::Sort, Term::rel(0))));
    assert_eq!(
        expr_to_term(genv, &Expr::constr("Msg", "Refund")),
        Err(TranslateError::MissingConstructor { ind: "Msg".into(), ctor: "Refund".into() })
    );
    assert_eq!(expr_to_term(genv, &Expr::constr("Nope", "C")), Err(TranslateError::MissingInductive("Nope".into())));
    assert_eq!(expr_to_term(genv, &Expr::named("x")), Err(TranslateError::NamedVariable("x".into())));
}

#[test]
fn fixpoint_shape() {
    // fix f (x : Nat) : Bool = f x
    let e = Expr::fix("f", "x", Ty::ind("Nat"), Ty::ind("Bool"), Expr::app(Expr::var(1), Expr::var(0)));
    let expected = Term::fix(
        "f",
        Term::prod("_", Term::ind("Nat"), Term::ind("Bool")),
        Term::lambda("x", Term::ind("Nat"), Term::app(Term::rel(1), Term::rel(0))),
    );
    assert_eq!(expr_to_term(prelude(), &e), Ok(expected));
    // inside a type abstraction the domain refers past the fixpoint binder
    let poly = Expr::ty_lam("A", Expr::fix("f", "x", Ty::var(0), Ty::var(0), Expr::var(0)));
    let Term::Lambda { body, .. } = expr_to_term(prelude(), &poly).unwrap() else { panic!() };
    assert_eq!(
        *body,
        Term::fix("f", Term::prod("_", Term::rel(0), Term::rel(1)), Term::lambda("x", Term::rel(1), Term::rel(0)))
    );
}

#[test]
fn foldr_prints_as_a_fixpoint_over_lists() {
    let crate::ast::ConstDef::Expr { expr } = prelude().constant("foldr").unwrap() else { panic!() };
    let t = expr_to_term(prelude(), expr).unwrap();
    let kenv = translate_env(prelude()).unwrap();
    let s = crate::kernel::pretty_term(Some(&kenv), &t);
    assert!(s.contains("fix "), "{s}");
    assert!(s.contains(": List A"), "{s}");
}

fn acorn_case(branches: Vec<Branch>) -> Expr {
    Expr::case(Expr::var(0), "AcornMap", vec![Ty::ind("Nat"), Ty::ind("Bool")], Ty::ind("Nat"), branches)
}

fn br(ctor: &str, binders: &[&str], body: Expr) -> Branch {
    Branch { pat: Pat { ctor: ctor.into(), binders: binders.iter().map(|s| s.to_string()).collect() }, body }
}

#[test]
fn acorn_map_branches() {
    let genv = prelude();
    let lit = || Expr::lit(PrimVal::nat(0u8));
    let bs = vec![br("MCons", &["k", "v", "m"], Expr::var(2)), br("MNil", &[], lit())];
    let Term::Match { branches, n_params, ret_ty, .. } = expr_to_term(genv, &acorn_case(bs)).unwrap() else { panic!() };
    assert_eq!(n_params, 2);
    assert_eq!(*ret_ty, Term::ind("Nat"));
    assert_eq!(branches[0], MatchBranch { arity: 0, body: Term::lit(PrimVal::nat(0u8)) });
    let map_ty = app2(Term::ind("AcornMap"), Term::ind("Nat"), Term::ind("Bool"));
    let expected = Term::lambda(
        "k",
        Term::ind("Nat"),
        Term::lambda("v", Term::ind("Bool"), Term::lambda("m", map_ty, Term::rel(2))),
    );
    assert_eq!(branches[1], MatchBranch { arity: 3, body: expected });
}

#[test]
fn branch_errors() {
    let genv = prelude();
    let lit = || Expr::lit(PrimVal::nat(0u8));
    assert_eq!(
        expr_to_term(genv, &acorn_case(vec![br("MNil", &[], lit())])),
        Err(TranslateError::MissingBranch { ind: "AcornMap".into(), ctor: "MCons".into() })
    );
    assert_eq!(
        expr_to_term(genv, &acorn_case(vec![br("MNil", &[], lit()), br("MCons", &["k"], lit())])),
        Err(TranslateError::PatternArity { ind: "AcornMap".into(), ctor: "MCons".into(), expected: 3, found: 1 })
    );
    let e = Expr::case(Expr::var(0), "Ghost", vec![], Ty::ind("Nat"), vec![]);
    assert_eq!(expr_to_term(genv, &e), Err(TranslateError::MissingInductive("Ghost".into())));
}

#[test]
fn branches_follow_declaration_order() {
    let e = Expr::case(
        Expr::constr("Bool", "True"),
        "Bool",
        vec![],
        Ty::ind("Nat"),
        vec![br("False", &[], Expr::lit(PrimVal::nat(0u8))), br("True", &[], Expr::lit(PrimVal::nat(1u8)))],
    );
    let Term::Match { branches, .. } = expr_to_term(prelude(), &e).unwrap() else { panic!() };
    assert_eq!(branches[0].body, Term::lit(PrimVal::nat(1u8)));
    assert_eq!(branches[1].body, Term::lit(PrimVal::nat(0u8)));
}

#[test]
fn acorn_map_declaration() {
    let d = decl_to_kernel(prelude().inductive("AcornMap").unwrap());
    assert_eq!(d.num_params, 2);
    let [mnil, mcons] = d.ctors.as_slice() else { panic!() };
    assert_eq!(mnil.arity, 0);
    assert_eq!(mnil.result_ty, app2(Term::rel(2), Term::rel(1), Term::rel(0)));
    assert_eq!(mcons.arity, 3);
    assert_eq!(mcons.arg_tys, vec![Term::rel(1), Term::rel(1), app2(Term::rel(4), Term::rel(3), Term::rel(2))]);
    assert_eq!(mcons.result_ty, app2(Term::rel(5), Term::rel(4), Term::rel(3)));
    assert_eq!(
        pretty_inductive(&d),
        "Inductive AcornMap (A1 A2 : Set) :=\n| MNil : 2 1 0\n| MCons : forall (_ : 1) (_ : 1) (_ : 4 3 2), 5 4 3."
    );
}

#[test]
fn enum_declaration() {
    let d = decl_to_kernel(programs::crowdfunding().env.inductive("Msg").unwrap());
    let names: Vec<&str> = d.ctors.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["Donate", "GetFunds", "Claim"]);
    for c in &d.ctors {
        assert_eq!((c.arity, &c.result_ty), (0, &Term::rel(0)));
    }
    // a recursive one-parameter type: Cons's tail is List A
    let list = decl_to_kernel(prelude().inductive("List").unwrap());
    assert_eq!(list.ctors[1].arg_tys, vec![Term::rel(0), Term::app(Term::rel(2), Term::rel(1))]);
}

#[test]
fn environments() {
    assert!(translate_env(&GlobalEnv::new()).unwrap().is_empty());
    let k = translate_env(&programs::crowdfunding().env).unwrap();
    assert!(k.inductive("State").is_some() && k.constant("receive").is_some());
    let mut bad = prelude().clone();
    bad.add_constant(
        "broken",
        ConstDef::Expr { expr: Expr::case(Expr::lit(PrimVal::nat(0u8)), "Ghost", vec![], Ty::ind("Nat"), vec![]) },
    );
    assert_eq!(
        translate_env(&bad),
        Err(TranslateError::InDefinition {
            name: "broken".into(),
            source: Box::new(TranslateError::MissingInductive("Ghost".into()))
        })
    );
}

/// Named types: the oracle's input language.
#[derive(Clone, Debug)]
enum NTy {
    Var(String),
    Ind(String),
    Forall(String, Box<NTy>),
    App(Box<NTy>, Box<NTy>),
    Arr(Box<NTy>, Box<NTy>),
}

fn arb_nty(free: &'static [&'static str], bound: &'static [&'static str]) -> impl Strategy<Value = NTy> {
    let names: Vec<&str> = free.iter().chain(bound).copied().collect();
    let leaf = prop_oneof![
        prop::sample::select(names).prop_map(|s| NTy::Var(s.into())),
        prop::sample::select(vec!["Nat", "Bool"]).prop_map(|s| NTy::Ind(s.into())),
    ];
    leaf.prop_recursive(4, 24, 2, move |inner| {
        prop_oneof![
            (prop::sample::select(bound.to_vec()), inner.clone()).prop_map(|(a, b)| NTy::Forall(a.into(), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(f, a)| NTy::App(Box::new(f), Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(d, c)| NTy::Arr(Box::new(d), Box::new(c))),
        ]
    })
    .prop_filter("well scoped", move |t| scoped(t, &mut free.iter().map(|s| s.to_string()).collect()))
}

fn scoped(t: &NTy, names: &mut Vec<String>) -> bool {
    match t {
        NTy::Var(a) => names.contains(a),
        NTy::Ind(_) => true,
        NTy::Forall(a, b) => {
            names.push(a.clone());
            let ok = scoped(b, names);
            names.pop();
            ok
        }
        NTy::App(x, y) | NTy::Arr(x, y) => scoped(x, names) && scoped(y, names),
    }
}

/// Named to nameless; `ctx` lists names innermost first.
fn to_db(ctx: &mut Vec<String>, t: &NTy) -> Ty {
    match t {
        NTy::Var(a) => Ty::var(ctx.iter().position(|x| x == a).expect("scoped")),
        NTy::Ind(i) => Ty::ind(i.clone()),
        NTy::Forall(a, b) => {
            ctx.insert(0, a.clone());
            let b = to_db(ctx, b);
            ctx.remove(0);
            Ty::forall(a.clone(), b)
        }
        NTy::App(f, a) => Ty::app(to_db(ctx, f), to_db(ctx, a)),
        NTy::Arr(d, c) => Ty::arr(to_db(ctx, d), to_db(ctx, c)),
    }
}

/// The translation on named types: no index arithmetic, the arrow's
/// anonymous binder is simply never referred to.
fn named_ty(outer: &[String], scope: &mut Vec<(String, u32)>, namer: &mut Namer, t: &NTy) -> N {
    match t {
        NTy::Var(a) => match scope.iter().rev().find(|(n, _)| n == a) {
            Some((_, id)) => N::Bound(*id),
            None => N::Free(outer.iter().position(|x| x == a).expect("scoped")),
        },
        NTy::Ind(i) => N::Leaf(Term::ind(i.clone())),
        NTy::Forall(a, b) => {
            let id = namer.fresh();
            scope.push((a.clone(), id));
            let b = named_ty(outer, scope, namer, b);
            scope.pop();
            N::Prod(id, a.clone(), Box::new(N::Leaf(Term::Sort)), Box::new(b))
        }
        NTy::App(f, a) => {
            N::App(Box::new(named_ty(outer, scope, namer, f)), Box::new(named_ty(outer, scope, namer, a)))
        }
        NTy::Arr(d, c) => {
            let id = namer.fresh();
            let d = named_ty(outer, scope, namer, d);
            let c = named_ty(outer, scope, namer, c);
            N::Prod(id, "_".into(), Box::new(d), Box::new(c))
        }
    }
}

fn subst_named(t: &NTy, by: &dyn Fn(&str) -> Option<NTy>) -> NTy {
    match t {
        NTy::Var(a) => by(a).unwrap_or_else(|| t.clone()),
        NTy::Ind(_) => t.clone(),
        NTy::Forall(a, b) => NTy::Forall(a.clone(), Box::new(subst_named(b, by))),
        NTy::App(f, a) => NTy::App(Box::new(subst_named(f, by)), Box::new(subst_named(a, by))),
        NTy::Arr(d, c) => NTy::Arr(Box::new(subst_named(d, by)), Box::new(subst_named(c, by))),
    }
}

const OUTER: &[&str] = &["A", "B", "C"];
const PARAMS: &[&str] = &["P", "Q"];

fn outer() -> Vec<String> {
    OUTER.iter().map(|s| s.to_string()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn types_translate_like_the_named_oracle(t in arb_nty(OUTER, &["X", "Y", "A"])) {
        let nameless = to_db(&mut outer(), &t);
        let expected = from_named(&named_ty(&outer(), &mut Vec::new(), &mut Namer::default(), &t));
        prop_assert_eq!(ty_to_term(&nameless), expected);
    }

    /// Branch domains with open type parameters: each domain is the
    /// parameter-substituted argument type, moved under the binders of the
    /// earlier pattern variables.
    #[test]
    fn branches_translate_like_the_named_oracle(
        args in prop::collection::vec(arb_nty(PARAMS, &["X", "Y"]), 0..4),
        params in prop::collection::vec(arb_nty(OUTER, &["Z"]), 2),
    ) {
        // P is parameter 0 (type variable 1), Q parameter 1 (type variable 0)
        let mut param_ctx = vec!["Q".to_string(), "P".to_string()];
        let decl = ConstrDecl { name: "K".into(), args: args.iter().map(|a| to_db(&mut param_ctx, a)).collect() };
        let mut genv = prelude().clone();
        genv.add_inductive(InductiveDecl { name: "T".into(), num_params: 2, constrs: vec![decl.clone()] });
        let ty_params: Vec<Ty> = params.iter().map(|p| to_db(&mut outer(), p)).collect();
        let binders: Vec<String> = (0..args.len()).map(|i| format!("x{i}")).collect();
        let b = Branch { pat: Pat { ctor: "K".into(), binders: binders.clone() }, body: Expr::lit(PrimVal::nat(0u8)) };
        let got = branch(&genv, "T", &ty_params, &[b], &decl).unwrap();

        let by = |a: &str| match a { "P" => Some(params[0].clone()), "Q" => Some(params[1].clone()), _ => None };
        let mut namer = Namer::default();
        let mut expected = N::Leaf(Term::lit(PrimVal::nat(0u8)));
        for (a, x) in args.iter().zip(&binders).rev() {
            let dom = named_ty(&outer(), &mut Vec::new(), &mut namer, &subst_named(a, &by));
            expected = N::Lambda(namer.fresh(), x.clone(), Box::new(dom), Box::new(expected));
        }
        prop_assert_eq!(got, MatchBranch { arity: args.len(), body: from_named(&expected) });
    }

    #[test]
    fn translation_preserves_closedness(seed in any::<u64>(), size in 0usize..=12) {
        let e = gen_expr(seed, size);
        let t = expr_to_term(prelude(), &e).unwrap();
        prop_assert!(t.closed_under(0));
        let open = Expr::lam("x", Ty::ind("Nat"), Expr::app(Expr::var(3), e));
        prop_assert!(expr_to_term(prelude(), &open).unwrap().closed_under(3));
        prop_assert!(!expr_to_term(prelude(), &open).unwrap().closed_under(2));
    }
}
