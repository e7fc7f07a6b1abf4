use std::fmt;
use std::sync::Arc;

use crate::ast::{Expr, GlobalEnv, Ty};
use crate::prim::{PrimOp, PrimVal};

/// Evaluation environment: a persistent list with index 0 the most recently
/// bound value.
#[derive(Clone, Default)]
pub struct EvalEnv(Option<Arc<EnvNode>>);

struct EnvNode {
    head: Val,
    tail: EvalEnv,
    len: usize,
}

impl EvalEnv {
    pub fn new() -> Self {
        EvalEnv(None)
    }

    pub fn from_vals(vals: impl IntoIterator<Item = Val>) -> Self {
        let vals: Vec<Val> = vals.into_iter().collect();
        let mut env = EvalEnv::new();
        for v in vals.into_iter().rev() {
            env = env.push(v);
        }
        env
    }

    pub fn push(&self, v: Val) -> EvalEnv {
        EvalEnv(Some(Arc::new(EnvNode { head: v, tail: self.clone(), len: self.len() + 1 })))
    }

    pub fn len(&self) -> usize {
        self.0.as_ref().map_or(0, |n| n.len)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    pub fn get(&self, mut i: usize) -> Option<&Val> {
        let mut cur = self;
        loop {
            let node = cur.0.as_deref()?;
            if i == 0 {
                return Some(&node.head);
            }
            i -= 1;
            cur = &node.tail;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Val> {
        let mut cur = self;
        std::iter::from_fn(move || {
            let node = cur.0.as_deref()?;
            cur = &node.tail;
            Some(&node.head)
        })
    }
}

impl PartialEq for EvalEnv {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().zip(other.iter()).all(|(a, b)| a == b)
    }
}

impl fmt::Debug for EvalEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

/// Interpreter values.
#[derive(Clone, Debug, PartialEq)]
pub enum Val {
    /// A constructor applied to its arguments so far. Type parameters of a
    /// polymorphic inductive come first, as `Ty` values.
    Constr {
        ind: String,
        ctor: String,
        args: Vec<Val>,
    },
    ClosLam {
        env: EvalEnv,
        hint: String,
        dom: Ty,
        body: Arc<Expr>,
    },
    ClosFix {
        env: EvalEnv,
        f_hint: String,
        x_hint: String,
        dom: Ty,
        cod: Ty,
        body: Arc<Expr>,
    },
    TyClos {
        env: EvalEnv,
        hint: String,
        body: Arc<Expr>,
    },
    Ty(Ty),
    Prim(PrimVal),
    /// A builtin constant, possibly partially applied. `name` is the
    /// constant it was looked up under.
    Builtin {
        name: String,
        op: PrimOp,
        args: Vec<PrimVal>,
    },
}

impl Val {
    pub fn constr(ind: impl Into<String>, ctor: impl Into<String>, args: Vec<Val>) -> Val {
        Val::Constr { ind: ind.into(), ctor: ctor.into(), args }
    }

    pub fn int(v: impl Into<num_bigint::BigInt>) -> Val {
        Val::Prim(PrimVal::int(v))
    }

    pub fn nat(v: impl Into<num_bigint::BigUint>) -> Val {
        Val::Prim(PrimVal::nat(v))
    }

    pub fn boolean(b: bool) -> Val {
        use crate::prim::{BOOL, FALSE, TRUE};
        Val::constr(BOOL, if b { TRUE } else { FALSE }, vec![])
    }

    pub fn is_constr(&self) -> bool {
        matches!(self, Val::Constr { .. })
    }

    pub fn as_prim(&self) -> Option<&PrimVal> {
        match self {
            Val::Prim(p) => Some(p),
            _ => None,
        }
    }
}

/// Is the environment well-formed with respect to `e` under `extra` fresh
/// binders: every type-variable occurrence that reaches into `env` must find
/// a type value there.
pub(crate) fn env_wf_for(env: &EvalEnv, extra: usize, e: &Expr) -> bool {
    use crate::ast::VarKind;
    let mut ok = true;
    e.visit_free_vars(0, &mut |kind, i| {
        if kind == VarKind::Type && i >= extra {
            ok &= matches!(env.get(i - extra), Some(Val::Ty(_)) | None);
        }
    });
    ok
}

fn closure_ok(env: &EvalEnv, extra: usize, body: &Expr) -> bool {
    body.closed_under(env.len() + extra) && env_wf_for(env, extra, body)
}

/// Value well-formedness: closure bodies are closed under their captured
/// environment plus their own binders, captured types are closed, the
/// captured environment is well-formed for the body and constructors
/// resolve.
pub fn wf_val(genv: &GlobalEnv, v: &Val) -> bool {
    let env_ok = |env: &EvalEnv| env.iter().all(|w| wf_val(genv, w));
    match v {
        Val::Constr { ind, ctor, args } => {
            genv.resolve_constr(ind, ctor).is_some() && args.iter().all(|a| wf_val(genv, a))
        }
        Val::ClosLam { env, dom, body, .. } => dom.closed_under(0) && env_ok(env) && closure_ok(env, 1, body),
        Val::ClosFix { env, dom, cod, body, .. } => {
            dom.closed_under(0) && cod.closed_under(0) && env_ok(env) && closure_ok(env, 2, body)
        }
        Val::TyClos { env, body, .. } => env_ok(env) && closure_ok(env, 1, body),
        Val::Ty(t) => t.closed_under(0),
        Val::Prim(_) => true,
        Val::Builtin { op, args, .. } => args.len() < op.arity(),
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match from_val(self) {
            Some(e) => write!(f, "{}", crate::syntax::pretty_expr(&e)),
            None => write!(f, "<ill-formed value>"),
        }
    }
}

/// Reads a value back as a closed expression. Closures become their
/// syntactic form with the captured environment substituted in.
pub fn from_val(v: &Val) -> Option<Expr> {
    use super::subst::subst_env_expr;
    let env_exprs = |env: &EvalEnv| env.iter().map(from_val).collect::<Option<Vec<_>>>();
    Some(match v {
        Val::Constr { ind, ctor, args } => {
            let args = args.iter().map(from_val).collect::<Option<Vec<_>>>()?;
            Expr::apps(Expr::constr(ind.clone(), ctor.clone()), args)
        }
        Val::ClosLam { env, hint, dom, body } => {
            let lam = Expr::lam(hint.clone(), dom.clone(), (**body).clone());
            subst_env_expr(&env_exprs(env)?, &lam)?
        }
        Val::ClosFix { env, f_hint, x_hint, dom, cod, body } => {
            let fix = Expr::fix(f_hint.clone(), x_hint.clone(), dom.clone(), cod.clone(), (**body).clone());
            subst_env_expr(&env_exprs(env)?, &fix)?
        }
        Val::TyClos { env, hint, body } => {
            let tl = Expr::ty_lam(hint.clone(), (**body).clone());
            subst_env_expr(&env_exprs(env)?, &tl)?
        }
        Val::Ty(t) => Expr::ty(t.clone()),
        Val::Prim(p) => Expr::lit(p.clone()),
        Val::Builtin { name, args, .. } => {
            Expr::apps(Expr::constant(name.clone()), args.iter().cloned().map(Expr::lit))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat_ty() -> Ty {
        Ty::ind("Nat")
    }

    #[test]
    fn env_indexing() {
        let env = EvalEnv::new().push(Val::int(1)).push(Val::int(2));
        assert_eq!(env.len(), 2);
        assert_eq!(env.get(0), Some(&Val::int(2)));
        assert_eq!(env.get(1), Some(&Val::int(1)));
        assert_eq!(env.get(2), None);
        assert_eq!(EvalEnv::from_vals([Val::int(2), Val::int(1)]), env);
    }

    #[test]
    fn wf_val_closure_bound() {
        let genv = GlobalEnv::new();
        let ok = Val::ClosLam { env: EvalEnv::new(), hint: "x".into(), dom: nat_ty(), body: Arc::new(Expr::var(0)) };
        assert!(wf_val(&genv, &ok));
        let bad = Val::ClosLam { env: EvalEnv::new(), hint: "x".into(), dom: nat_ty(), body: Arc::new(Expr::var(1)) };
        assert!(!wf_val(&genv, &bad));
        // a captured term value in a type position
        let bad = Val::ClosLam {
            env: EvalEnv::new().push(Val::int(1)),
            hint: "x".into(),
            dom: nat_ty(),
            body: Arc::new(Expr::lam("y", Ty::var(1), Expr::var(0))),
        };
        assert!(!wf_val(&genv, &bad));
        assert!(!wf_val(&genv, &Val::constr("Nope", "C", vec![])));
    }

    #[test]
    fn from_val_substitutes_captured_env() {
        let v = Val::ClosLam {
            env: EvalEnv::new().push(Val::int(1)),
            hint: "x".into(),
            dom: Ty::ind("Int"),
            body: Arc::new(Expr::apps(Expr::constant("addInt"), [Expr::var(1), Expr::var(0)])),
        };
        let expected = Expr::lam(
            "x",
            Ty::ind("Int"),
            Expr::apps(Expr::constant("addInt"), [Expr::lit(PrimVal::int(1)), Expr::var(0)]),
        );
        assert_eq!(from_val(&v), Some(expected));
        assert_eq!(from_val(&Val::boolean(true)), Some(Expr::constr("Bool", "True")));
    }
}
