//! Coq-flavoured printing of kernel terms and inductives.

use std::fmt::Write;

use super::{KernelEnv, KernelInductive, Term};

/// Prints `t` with binder hints as names, freshened where they would
/// shadow. Constructor names are looked up in `env` when given.
pub fn pretty_term(env: Option<&KernelEnv>, t: &Term) -> String {
    let mut p = Printer { env, names: Vec::new(), out: String::new() };
    p.term(t, 0);
    p.out
}

/// Prints an inductive with raw indices in constructor types, e.g.
/// `| MNil : 2 1 0`.
pub fn pretty_inductive(d: &KernelInductive) -> String {
    let params: Vec<String> = (1..=d.num_params).map(|i| format!("A{i}")).collect();
    let mut out = format!("Inductive {}", d.name);
    if !params.is_empty() {
        let _ = write!(out, " ({} : Set)", params.join(" "));
    }
    out.push_str(" :=");
    for c in &d.ctors {
        let _ = write!(out, "\n| {} : ", c.name);
        if !c.arg_tys.is_empty() {
            out.push_str("forall");
            for a in &c.arg_tys {
                let _ = write!(out, " (_ : {})", raw(a, 0));
            }
            out.push_str(", ");
        }
        out.push_str(&raw(&c.result_ty, 0));
    }
    out.push('.');
    out
}

fn raw(t: &Term, level: u8) -> String {
    match t {
        Term::Rel { index } => index.to_string(),
        Term::Ind { name } => name.clone(),
        Term::App { .. } => {
            let (h, args) = t.spine();
            let mut s = raw(h, 3);
            for a in args {
                s.push(' ');
                s.push_str(&raw(a, 3));
            }
            if level > 2 {
                format!("({s})")
            } else {
                s
            }
        }
        Term::Prod { dom, cod, .. } => {
            let s = format!("forall (_ : {}), {}", raw(dom, 0), raw(cod, 0));
            if level > 0 {
                format!("({s})")
            } else {
                s
            }
        }
        Term::Sort => "Set".into(),
        other => pretty_term(None, other),
    }
}

struct Printer<'a> {
    env: Option<&'a KernelEnv>,
    names: Vec<String>,
    out: String,
}

impl Printer<'_> {
    fn fresh(&self, hint: &str) -> String {
        let base = if hint.is_empty() || hint == "_" { "x" } else { hint };
        if !self.names.iter().any(|n| n == base) {
            return base.to_string();
        }
        (0..).map(|i| format!("{base}{i}")).find(|c| !self.names.iter().any(|n| n == c)).unwrap()
    }

    fn with<R>(&mut self, name: String, f: impl FnOnce(&mut Self) -> R) -> R {
        self.names.push(name);
        let r = f(self);
        self.names.pop();
        r
    }

    fn ctor_name(&self, ind: &str, idx: usize) -> String {
        self.env
            .and_then(|e| e.inductive(ind))
            .and_then(|d| d.ctors.get(idx))
            .map_or_else(|| format!("{ind}#{idx}"), |c| c.name.clone())
    }

    fn open(&mut self, level: u8, min: u8) -> bool {
        let paren = level > min;
        if paren {
            self.out.push('(');
        }
        paren
    }

    fn close(&mut self, paren: bool) {
        if paren {
            self.out.push(')');
        }
    }

    fn term(&mut self, t: &Term, level: u8) {
        match t {
            Term::Rel { index } => {
                let s = match self.names.len().checked_sub(index + 1) {
                    Some(i) => self.names[i].clone(),
                    None => format!("#{index}"),
                };
                self.out.push_str(&s);
            }
            Term::Const { name } | Term::Ind { name } => self.out.push_str(name),
            Term::Construct { ind, idx } => {
                let s = self.ctor_name(ind, *idx);
                self.out.push_str(&s);
            }
            Term::Sort => self.out.push_str("Set"),
            Term::Lit { value } => {
                let _ = write!(self.out, "{value}");
            }
            Term::App { .. } => {
                let p = self.open(level, 2);
                let (h, args) = t.spine();
                self.term(h, 3);
                for a in args {
                    self.out.push(' ');
                    self.term(a, 3);
                }
                self.close(p);
            }
            Term::Lambda { .. } => {
                let p = self.open(level, 0);
                self.out.push_str("fun");
                self.lambdas(t, 0);
                self.close(p);
            }
            Term::Prod { hint, dom, cod } => {
                if hint == "_" && !cod.mentions_rel0() {
                    let p = self.open(level, 1);
                    self.term(dom, 2);
                    self.out.push_str(" -> ");
                    self.with("_".into(), |s| s.term(cod, 1));
                    self.close(p);
                } else {
                    let p = self.open(level, 0);
                    let x = self.fresh(hint);
                    let _ = write!(self.out, "forall ({x} : ");
                    self.term(dom, 0);
                    self.out.push_str("), ");
                    self.with(x, |s| s.term(cod, 0));
                    self.close(p);
                }
            }
            Term::LetIn { hint, ty, bound, body } => {
                let p = self.open(level, 0);
                let x = self.fresh(hint);
                let _ = write!(self.out, "let {x} : ");
                self.term(ty, 0);
                self.out.push_str(" := ");
                self.term(bound, 0);
                self.out.push_str(" in ");
                self.with(x, |s| s.term(body, 0));
                self.close(p);
            }
            Term::Fix { hint, ty, body } => {
                let p = self.open(level, 0);
                let f = self.fresh(hint);
                match (&**ty, &**body) {
                    (Term::Prod { cod, .. }, Term::Lambda { hint: xh, dom, body: inner }) => {
                        let x = self.with(f.clone(), |s| s.fresh(xh));
                        let _ = write!(self.out, "fix {f} ({x} : ");
                        self.with(f.clone(), |s| s.term(dom, 0));
                        self.out.push_str(") : ");
                        self.with(x.clone(), |s| s.term(cod, 0));
                        self.out.push_str(" := ");
                        self.with(f, |s| s.with(x, |s| s.term(inner, 0)));
                    }
                    _ => {
                        let _ = write!(self.out, "fix {f} : ");
                        self.term(ty, 0);
                        self.out.push_str(" := ");
                        self.with(f, |s| s.term(body, 0));
                    }
                }
                self.close(p);
            }
            Term::Match { ind, scrut, branches, .. } => {
                let p = self.open(level, 0);
                self.out.push_str("match ");
                self.term(scrut, 0);
                self.out.push_str(" with");
                for (idx, b) in branches.iter().enumerate() {
                    let c = self.ctor_name(ind, idx);
                    let _ = write!(self.out, " | {c}");
                    let mut body = &b.body;
                    let mut bound = 0;
                    while bound < b.arity {
                        let Term::Lambda { hint, body: inner, .. } = body else { break };
                        let x = self.fresh(hint);
                        let _ = write!(self.out, " {x}");
                        self.names.push(x);
                        body = inner;
                        bound += 1;
                    }
                    self.out.push_str(" => ");
                    self.term(body, 0);
                    self.names.truncate(self.names.len() - bound);
                }
                self.out.push_str(" end");
                self.close(p);
            }
        }
    }

    fn lambdas(&mut self, t: &Term, pushed: usize) {
        match t {
            Term::Lambda { hint, dom, body } => {
                let x = self.fresh(hint);
                let _ = write!(self.out, " ({x} : ");
                self.term(dom, 0);
                self.out.push(')');
                self.names.push(x);
                self.lambdas(body, pushed + 1);
            }
            _ => {
                self.out.push_str(" => ");
                self.term(t, 0);
                self.names.truncate(self.names.len() - pushed);
            }
        }
    }
}

impl Term {
    fn mentions_rel0(&self) -> bool {
        let mut hit = false;
        self.visit_free(0, &mut |i| hit |= i == 0);
        hit
    }
}
