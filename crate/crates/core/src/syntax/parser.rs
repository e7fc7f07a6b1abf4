use std::collections::HashMap;

use super::lexer::{lex, Tok, Token};
use super::ParseError;
use crate::ast::{indexify_ty, Branch, BuiltinDecl, ConstrDecl, Definition, Expr, InductiveDecl, Module, Pat, Ty};
use crate::prim::{PrimOp, PrimVal, BOOL, FALSE, TRUE};

const KEYWORDS: &[&str] = &[
    "data", "record", "type", "builtin", "def", "test", "let", "in", "case", "return", "of", "fix", "if", "then",
    "else", "forall",
];

pub(crate) fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// Parses a source file into a named-mode module.
pub fn parse_module(src: &str) -> Result<Module, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0, aliases: HashMap::new() };
    let mut m = Module::default();
    while !p.at(&Tok::Eof) {
        p.item(&mut m)?;
    }
    Ok(m)
}

/// Parses a single expression (named mode).
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0, aliases: HashMap::new() };
    let e = p.expr()?;
    p.expect(&Tok::Eof, "end of input")?;
    Ok(e)
}

/// Parses a single type (named mode: type variables appear as names).
pub fn parse_ty(src: &str) -> Result<Ty, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0, aliases: HashMap::new() };
    let t = p.ty()?;
    p.expect(&Tok::Eof, "end of input")?;
    Ok(t)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    aliases: HashMap<String, Ty>,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Qualified(a, b) => format!("`{a}.{b}`"),
        Tok::Int(i) => format!("`{i}z`"),
        Tok::Nat(n) => format!("`{n}`"),
        Tok::TyIdx(i) => format!("`^{i}`"),
        Tok::Count(i) => format!("`#{i}`"),
        Tok::Eof => "end of input".into(),
        other => format!("{other:?}"),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let t = &self.toks[self.pos];
        Err(ParseError { line: t.line, col: t.col, msg: msg.into() })
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), ParseError> {
        if self.at(t) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.at_kw(kw) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected `{kw}`, found {}", describe(self.peek())))
        }
    }

    fn name(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) if !is_keyword(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            other => self.error(format!("expected {what}, found {}", describe(other))),
        }
    }

    fn item(&mut self, m: &mut Module) -> Result<(), ParseError> {
        let Tok::Ident(kw) = self.peek().clone() else {
            return self.error(format!("expected a declaration, found {}", describe(self.peek())));
        };
        self.bump();
        match kw.as_str() {
            "data" => m.inductives.push(self.data()?),
            "record" => self.record(m)?,
            "type" => {
                let name = self.name("alias name")?;
                self.expect(&Tok::Eq, "`=`")?;
                let ty = self.ty()?;
                self.aliases.insert(name, ty);
            }
            "builtin" => {
                let name = self.name("constant name")?;
                self.expect(&Tok::Eq, "`=`")?;
                let opname = self.name("builtin operation")?;
                let Some(op) = PrimOp::ALL.into_iter().find(|o| o.name() == opname) else {
                    return self.error(format!("unknown builtin operation `{opname}`"));
                };
                m.builtins.push(BuiltinDecl { name, op });
            }
            "def" | "test" => {
                let name = self.name("definition name")?;
                let mut binders = Vec::new();
                loop {
                    match self.peek() {
                        Tok::LBrack => {
                            self.bump();
                            while !self.at(&Tok::RBrack) {
                                binders.push((self.name("type parameter")?, None));
                            }
                            self.bump();
                        }
                        Tok::LParen => {
                            self.bump();
                            let x = self.name("parameter")?;
                            self.expect(&Tok::Colon, "`:`")?;
                            let t = self.ty()?;
                            self.expect(&Tok::RParen, "`)`")?;
                            binders.push((x, Some(t)));
                        }
                        _ => break,
                    }
                }
                self.expect(&Tok::Eq, "`=`")?;
                let body = self.expr()?;
                let expr = binders.into_iter().rev().fold(body, |acc, (x, t)| match t {
                    Some(t) => Expr::lam(x, t, acc),
                    None => Expr::ty_lam(x, acc),
                });
                let def = Definition { name, expr };
                if kw == "def" {
                    m.definitions.push(def);
                } else {
                    m.programs.push(def);
                }
            }
            other => return self.error(format!("expected a declaration, found `{other}`")),
        }
        Ok(())
    }

    /// `data I #n = C [T, ..] | ..` or `data I a b = ..`
    fn data(&mut self) -> Result<InductiveDecl, ParseError> {
        let name = self.name("inductive name")?;
        let mut params = Vec::new();
        let num_params = if let Tok::Count(n) = *self.peek() {
            self.bump();
            n
        } else {
            while !self.at(&Tok::Eq) {
                params.push(self.name("type parameter")?);
            }
            params.len()
        };
        self.expect(&Tok::Eq, "`=`")?;
        if self.at(&Tok::Bar) {
            self.bump();
        }
        let scope: Vec<String> = params.iter().rev().cloned().collect();
        let mut constrs = Vec::new();
        loop {
            let cname = self.name("constructor name")?;
            let mut args = Vec::new();
            if self.at(&Tok::LBrack) {
                self.bump();
                while !self.at(&Tok::RBrack) {
                    args.push(indexify_ty(&scope, &self.ty()?));
                    if !self.at(&Tok::RBrack) {
                        self.expect(&Tok::Comma, "`,` or `]`")?;
                    }
                }
                self.bump();
            }
            constrs.push(ConstrDecl { name: cname, args });
            if !self.at(&Tok::Bar) {
                break;
            }
            self.bump();
        }
        Ok(InductiveDecl { name, num_params, constrs })
    }

    /// `record R = mk { f : T, .. }`: a one-constructor inductive plus an
    /// accessor definition per field.
    fn record(&mut self, m: &mut Module) -> Result<(), ParseError> {
        let name = self.name("record name")?;
        self.expect(&Tok::Eq, "`=`")?;
        let ctor = self.name("constructor name")?;
        self.expect(&Tok::LBrace, "`{`")?;
        let mut fields = Vec::new();
        while !self.at(&Tok::RBrace) {
            let f = self.name("field name")?;
            self.expect(&Tok::Colon, "`:`")?;
            fields.push((f, self.ty()?));
            if !self.at(&Tok::RBrace) {
                self.expect(&Tok::Comma, "`,` or `}`")?;
            }
        }
        self.bump();
        let binders: Vec<String> = fields.iter().map(|(f, _)| f.clone()).collect();
        for (f, t) in &fields {
            let body = Expr::case(
                Expr::named("r"),
                name.clone(),
                vec![],
                t.clone(),
                vec![Branch {
                    pat: Pat { ctor: ctor.clone(), binders: binders.clone() },
                    body: Expr::named(f.clone()),
                }],
            );
            m.definitions.push(Definition { name: f.clone(), expr: Expr::lam("r", Ty::ind(name.clone()), body) });
        }
        m.inductives.push(InductiveDecl {
            name,
            num_params: 0,
            constrs: vec![ConstrDecl { name: ctor, args: fields.into_iter().map(|(_, t)| t).collect() }],
        });
        Ok(())
    }

    fn ty(&mut self) -> Result<Ty, ParseError> {
        if self.at_kw("forall") {
            self.bump();
            let mut names = vec![self.name("type variable")?];
            while !self.at(&Tok::Dot) {
                names.push(self.name("type variable or `.`")?);
            }
            self.bump();
            let body = self.ty()?;
            return Ok(names.into_iter().rev().fold(body, |acc, a| Ty::forall(a, acc)));
        }
        let lhs = self.app_ty()?;
        if self.at(&Tok::Arrow) {
            self.bump();
            Ok(Ty::arr(lhs, self.ty()?))
        } else {
            Ok(lhs)
        }
    }

    fn app_ty(&mut self) -> Result<Ty, ParseError> {
        let head = self.atom_ty()?;
        let mut args = Vec::new();
        while self.starts_atom_ty() {
            args.push(self.atom_ty()?);
        }
        Ok(Ty::apps(head, args))
    }

    fn starts_atom_ty(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !is_keyword(s),
            Tok::TyIdx(_) | Tok::LParen => true,
            _ => false,
        }
    }

    fn atom_ty(&mut self) -> Result<Ty, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(self.aliases.get(&s).cloned().unwrap_or_else(|| Ty::ind(s)))
            }
            Tok::TyIdx(i) => {
                self.bump();
                Ok(Ty::var(i))
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            other => self.error(format!("expected a type, found {}", describe(&other))),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Backslash => {
                self.bump();
                let x = self.name("variable")?;
                self.expect(&Tok::Colon, "`:`")?;
                let dom = self.app_ty()?;
                self.expect(&Tok::Arrow, "`->`")?;
                Ok(Expr::lam(x, dom, self.expr()?))
            }
            Tok::TyLambda => {
                self.bump();
                let a = self.name("type variable")?;
                self.expect(&Tok::Arrow, "`->`")?;
                Ok(Expr::ty_lam(a, self.expr()?))
            }
            Tok::Ident(kw) if kw == "let" => {
                self.bump();
                let x = self.name("variable")?;
                self.expect(&Tok::Colon, "`:`")?;
                let ty = self.ty()?;
                self.expect(&Tok::Eq, "`=`")?;
                let bound = self.expr()?;
                self.expect_kw("in")?;
                Ok(Expr::let_in(x, ty, bound, self.expr()?))
            }
            Tok::Ident(kw) if kw == "case" => {
                self.bump();
                let scrut = self.expr()?;
                self.expect(&Tok::Colon, "`:`")?;
                let ind = self.name("inductive name")?;
                let mut params = Vec::new();
                while self.starts_atom_ty() {
                    params.push(self.atom_ty()?);
                }
                self.expect_kw("return")?;
                let ret = self.ty()?;
                self.expect_kw("of")?;
                let mut branches = Vec::new();
                while self.at(&Tok::Bar) {
                    self.bump();
                    let ctor = self.name("constructor")?;
                    let mut binders = Vec::new();
                    while !self.at(&Tok::Arrow) {
                        binders.push(self.name("pattern variable")?);
                    }
                    self.bump();
                    branches.push(Branch { pat: Pat { ctor, binders }, body: self.expr()? });
                }
                if branches.is_empty() {
                    return self.error("expected at least one `| C x.. -> e` branch");
                }
                Ok(Expr::case(scrut, ind, params, ret, branches))
            }
            Tok::Ident(kw) if kw == "if" => {
                self.bump();
                let cond = self.expr()?;
                self.expect_kw("return")?;
                let ret = self.ty()?;
                self.expect_kw("then")?;
                let yes = self.expr()?;
                self.expect_kw("else")?;
                let no = self.expr()?;
                let br = |c: &str, body| Branch { pat: Pat { ctor: c.into(), binders: vec![] }, body };
                Ok(Expr::case(cond, BOOL, vec![], ret, vec![br(TRUE, yes), br(FALSE, no)]))
            }
            Tok::Ident(kw) if kw == "fix" => {
                self.bump();
                let f = self.name("fixpoint name")?;
                self.expect(&Tok::LParen, "`(`")?;
                let x = self.name("fixpoint argument")?;
                self.expect(&Tok::Colon, "`:`")?;
                let dom = self.ty()?;
                self.expect(&Tok::RParen, "`)`")?;
                self.expect(&Tok::Colon, "`:`")?;
                let cod = self.ty()?;
                self.expect(&Tok::Eq, "`=`")?;
                Ok(Expr::fix(f, x, dom, cod, self.expr()?))
            }
            _ => self.app(),
        }
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !is_keyword(s),
            Tok::Qualified(..) | Tok::Int(_) | Tok::Nat(_) | Tok::LParen | Tok::LBrack => true,
            _ => false,
        }
    }

    fn app(&mut self) -> Result<Expr, ParseError> {
        if !self.starts_atom() {
            return self.error(format!("expected an expression, found {}", describe(self.peek())));
        }
        let head = self.atom()?;
        let mut args = Vec::new();
        while self.starts_atom() {
            args.push(self.atom()?);
        }
        Ok(Expr::apps(head, args))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.bump() {
            Tok::Ident(x) => Ok(Expr::named(x)),
            Tok::Qualified(i, c) => Ok(Expr::constr(i, c)),
            Tok::Int(v) => Ok(Expr::lit(PrimVal::Int(v))),
            Tok::Nat(v) => Ok(Expr::lit(PrimVal::Nat(v))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::LBrack => {
                let t = self.ty()?;
                self.expect(&Tok::RBrack, "`]`")?;
                Ok(Expr::ty(t))
            }
            _ => {
                self.pos -= 1;
                self.error(format!("expected an expression, found {}", describe(self.peek())))
            }
        }
    }
}
