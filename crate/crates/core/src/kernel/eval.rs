use super::{parallel_subst, subst1, KernelConst, KernelEnv, Term};
use crate::interp::{EvalFailure, EvalResult};
use crate::prim::{PrimOutcome, PrimVal, BOOL, FALSE, TRUE};

fn stuck<T>(msg: impl Into<String>) -> EvalResult<T> {
    Err(EvalFailure::EvalError(msg.into()))
}

/// Weak-head call-by-value evaluation of a closed term.
///
/// Application evaluates the argument, then the function. A fixpoint only
/// unfolds when its argument is a constructor application. Type
/// annotations are never evaluated.
pub fn cbv_eval(env: &KernelEnv, fuel: usize, t: &Term) -> EvalResult<Term> {
    Evaluator { env }.eval(fuel, t)
}

struct Evaluator<'a> {
    env: &'a KernelEnv,
}

impl Evaluator<'_> {
    fn eval(&self, fuel: usize, t: &Term) -> EvalResult<Term> {
        if fuel == 0 {
            return Err(EvalFailure::NotEnoughFuel);
        }
        let n = fuel - 1;
        match t {
            Term::Rel { index } => stuck(format!("free variable #{index}")),
            Term::Lambda { .. }
            | Term::Prod { .. }
            | Term::Sort
            | Term::Lit { .. }
            | Term::Fix { .. }
            | Term::Ind { .. }
            | Term::Construct { .. } => Ok(t.clone()),
            Term::Const { name } => match self.env.constant(name) {
                Some(KernelConst::Builtin { .. }) => Ok(t.clone()),
                Some(KernelConst::Term { body }) => self.eval(n, body),
                None => stuck(format!("unknown constant {name}")),
            },
            Term::App { fun, arg } => {
                let va = self.eval(n, arg)?;
                let vf = self.eval(n, fun)?;
                self.apply(n, vf, va)
            }
            Term::LetIn { bound, body, .. } => {
                let v = self.eval(n, bound)?;
                self.eval(n, &subst1(&v, body))
            }
            Term::Match { ind, n_params, scrut, branches, .. } => {
                let v = self.eval(n, scrut)?;
                let (head, args) = v.spine();
                let Term::Construct { ind: ind2, idx } = head else {
                    return stuck(format!("match on {ind} of a non-constructor"));
                };
                if ind != ind2 {
                    return stuck(format!("match on {ind} of a constructor of {ind2}"));
                }
                let Some(br) = branches.get(*idx) else {
                    return stuck(format!("no branch {idx} in match on {ind}"));
                };
                if args.len() != n_params + br.arity {
                    return stuck(format!("constructor {idx} of {ind} is not fully applied"));
                }
                let mut body = &br.body;
                for _ in 0..br.arity {
                    match body {
                        Term::Lambda { body: b, .. } => body = b,
                        _ => return stuck(format!("branch {idx} of match on {ind} is not a {}-ary lambda", br.arity)),
                    }
                }
                let sub: Vec<Term> = args[*n_params..].iter().rev().map(|a| (*a).clone()).collect();
                self.eval(n, &parallel_subst(&sub, body))
            }
        }
    }

    fn apply(&self, n: usize, vf: Term, va: Term) -> EvalResult<Term> {
        match vf {
            Term::Lambda { body, .. } => self.eval(n, &subst1(&va, &body)),
            Term::Fix { ref body, .. } => {
                if !matches!(va.spine().0, Term::Construct { .. }) {
                    return stuck("fixpoint applied to a non-constructor");
                }
                match subst1(&vf, body) {
                    Term::Lambda { body, .. } => self.eval(n, &subst1(&va, &body)),
                    other => self.apply(n, other, va),
                }
            }
            _ => {
                let (head, args) = vf.spine();
                match head {
                    Term::Construct { ind, idx } => {
                        let Some(decl) = self.env.inductive(ind) else {
                            return stuck(format!("unknown inductive {ind}"));
                        };
                        let Some(ctor) = decl.ctors.get(*idx) else {
                            return stuck(format!("unknown constructor {idx} of {ind}"));
                        };
                        if args.len() >= decl.num_params + ctor.arity {
                            return stuck(format!("constructor {} applied to too many arguments", ctor.name));
                        }
                        Ok(Term::app(vf, va))
                    }
                    Term::Ind { .. } => Ok(Term::app(vf, va)),
                    Term::Const { name } => {
                        let Some(KernelConst::Builtin { op }) = self.env.constant(name) else {
                            return stuck(format!("cannot apply constant {name}"));
                        };
                        let op = *op;
                        if args.len() + 1 < op.arity() {
                            return Ok(Term::app(vf, va));
                        }
                        let mut lits: Vec<&PrimVal> = Vec::with_capacity(op.arity());
                        for a in args.iter().copied().chain(std::iter::once(&va)) {
                            match a {
                                Term::Lit { value } => lits.push(value),
                                _ => return stuck(format!("builtin {name} applied to a non-literal")),
                            }
                        }
                        match op.apply(&lits) {
                            Some(PrimOutcome::Lit(p)) => Ok(Term::lit(p)),
                            Some(PrimOutcome::Bool(b)) => Ok(self.boolean(b)),
                            None => stuck(format!("builtin {name} applied to ill-typed literals")),
                        }
                    }
                    _ => stuck("cannot apply a non-function"),
                }
            }
        }
    }

    fn boolean(&self, b: bool) -> Term {
        let name = if b { TRUE } else { FALSE };
        let idx = self.env.inductive(BOOL).and_then(|d| d.ctors.iter().position(|c| c.name == name)).unwrap_or(if b {
            0
        } else {
            1
        });
        Term::construct(BOOL, idx)
    }
}
