//! Random closed programs over the base library.
//!
//! Programs are generated against a small set of monomorphic types so that
//! every program is well typed and terminates: fixpoints only recurse on the
//! tail of the list or the predecessor they matched on.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ast::{Branch, Definition, Expr, Pat, Ty};
use crate::prim::PrimVal;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub count: usize,
    /// Upper bound on the size budget of each program.
    pub size: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { seed: 7, count: 1000, size: 12 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum G {
    Int,
    Nat,
    Bool,
    ListInt,
    MaybeInt,
    PairIntBool,
    Peano,
    IntToInt,
}

/// A constructor name and the generator types of its arguments.
type Arm = (&'static str, Vec<G>);

const ALL: [G; 8] = [G::Int, G::Nat, G::Bool, G::ListInt, G::MaybeInt, G::PairIntBool, G::Peano, G::IntToInt];
const FIRST_ORDER: [G; 7] = [G::Int, G::Nat, G::Bool, G::ListInt, G::MaybeInt, G::PairIntBool, G::Peano];

fn int() -> Ty {
    Ty::ind("Int")
}

impl G {
    fn ty(self) -> Ty {
        match self {
            G::Int => int(),
            G::Nat => Ty::ind("Nat"),
            G::Bool => Ty::ind("Bool"),
            G::ListInt => Ty::app(Ty::ind("List"), int()),
            G::MaybeInt => Ty::app(Ty::ind("Maybe"), int()),
            G::PairIntBool => Ty::apps(Ty::ind("Prod"), [int(), Ty::ind("Bool")]),
            G::Peano => Ty::ind("Peano"),
            G::IntToInt => Ty::arr(int(), int()),
        }
    }
}

fn c(ind: &str, ctor: &str) -> Expr {
    Expr::constr(ind, ctor)
}

fn k(name: &str) -> Expr {
    Expr::constant(name)
}

fn tyarg(t: Ty) -> Expr {
    Expr::ty(t)
}

fn branch(ctor: &str, binders: &[&str], body: Expr) -> Branch {
    Branch { pat: Pat { ctor: ctor.into(), binders: binders.iter().map(|s| s.to_string()).collect() }, body }
}

struct Gen {
    rng: ChaCha8Rng,
    /// Types of the term variables in scope, innermost last; `None` for
    /// binders that must not be referenced directly.
    ctx: Vec<Option<G>>,
    fresh: usize,
}

impl Gen {
    fn name(&mut self, base: &str) -> String {
        self.fresh += 1;
        format!("{base}{}", self.fresh)
    }

    fn under<R>(&mut self, binders: &[Option<G>], f: impl FnOnce(&mut Self) -> R) -> R {
        let before = self.ctx.len();
        self.ctx.extend_from_slice(binders);
        let r = f(self);
        self.ctx.truncate(before);
        r
    }

    fn var_of(&mut self, g: G) -> Option<Expr> {
        let hits: Vec<usize> = (0..self.ctx.len()).filter(|&i| self.ctx[i] == Some(g)).collect();
        let pos = *hits.choose(&mut self.rng)?;
        Some(Expr::var(self.ctx.len() - 1 - pos))
    }

    fn int_lit(&mut self) -> Expr {
        Expr::lit(PrimVal::int(self.rng.gen_range(-20i64..=20)))
    }

    fn nat_lit(&mut self) -> Expr {
        Expr::lit(PrimVal::nat(self.rng.gen_range(0u64..=20)))
    }

    /// Splits `total` into `parts` non-negative sizes.
    fn split(&mut self, total: usize, parts: usize) -> Vec<usize> {
        let mut out = vec![0; parts];
        for _ in 0..total {
            let i = self.rng.gen_range(0..parts);
            out[i] += 1;
        }
        out
    }

    fn leaf(&mut self, g: G) -> Expr {
        if self.rng.gen_bool(0.3) {
            if let Some(v) = self.var_of(g) {
                return v;
            }
        }
        match g {
            G::Int => self.int_lit(),
            G::Nat => self.nat_lit(),
            G::Bool => c("Bool", if self.rng.gen_bool(0.5) { "True" } else { "False" }),
            G::ListInt => {
                let nil = Expr::app(c("List", "Nil"), tyarg(int()));
                if self.rng.gen_bool(0.5) {
                    nil
                } else {
                    let x = self.int_lit();
                    Expr::apps(c("List", "Cons"), [tyarg(int()), x, nil])
                }
            }
            G::MaybeInt => Expr::app(c("Maybe", "Nothing"), tyarg(int())),
            G::PairIntBool => {
                let (a, b) = (self.leaf(G::Int), self.leaf(G::Bool));
                Expr::apps(c("Prod", "Pair"), [tyarg(int()), tyarg(Ty::ind("Bool")), a, b])
            }
            G::Peano => c("Peano", "Z"),
            G::IntToInt => {
                let x = self.name("x");
                Expr::lam(x, int(), Expr::var(0))
            }
        }
    }

    fn expr(&mut self, g: G, size: usize) -> Expr {
        if size == 0 {
            return self.leaf(g);
        }
        let n = size - 1;
        if self.rng.gen_bool(0.45) {
            return self.generic(g, n);
        }
        self.specific(g, n)
    }

    fn generic(&mut self, g: G, n: usize) -> Expr {
        match self.rng.gen_range(0..7) {
            0 => {
                let t = *ALL.choose(&mut self.rng).unwrap();
                let s = self.split(n, 2);
                let bound = self.expr(t, s[0]);
                let body = self.under(&[Some(t)], |me| me.expr(g, s[1]));
                let x = self.name("v");
                Expr::let_in(x, t.ty(), bound, body)
            }
            1 => {
                let t = *ALL.choose(&mut self.rng).unwrap();
                let s = self.split(n, 2);
                let arg = self.expr(t, s[0]);
                let body = self.under(&[Some(t)], |me| me.expr(g, s[1]));
                let x = self.name("a");
                Expr::app(Expr::lam(x, t.ty(), body), arg)
            }
            2 => {
                let s = self.split(n, 3);
                let cond = self.expr(G::Bool, s[0]);
                let yes = self.expr(g, s[1]);
                let no = self.expr(g, s[2]);
                let mut bs = vec![branch("True", &[], yes), branch("False", &[], no)];
                bs.shuffle(&mut self.rng);
                Expr::case(cond, "Bool", vec![], g.ty(), bs)
            }
            3 => self.case(g, n),
            4 => self.fix(g, n),
            5 => {
                // (/\A -> \x : A -> body) [T] arg
                let s = self.split(n, 2);
                let arg = self.expr(g, s[0]);
                let body = self.under(&[None, Some(g)], |me| me.expr(g, s[1]));
                let (a, x) = (self.name("A"), self.name("x"));
                Expr::apps(Expr::ty_lam(a, Expr::lam(x, Ty::var(0), body)), [tyarg(g.ty()), arg])
            }
            _ => self.specific(g, n),
        }
    }

    fn case(&mut self, g: G, n: usize) -> Expr {
        let scrut_ty = *[G::Bool, G::MaybeInt, G::ListInt, G::PairIntBool, G::Peano].choose(&mut self.rng).unwrap();
        let s = self.split(n, 3);
        let scrut = self.expr(scrut_ty, s[0]);
        let (ind, params, arms): (&str, Vec<Ty>, Vec<Arm>) = match scrut_ty {
            G::Bool => ("Bool", vec![], vec![("True", vec![]), ("False", vec![])]),
            G::MaybeInt => ("Maybe", vec![int()], vec![("Nothing", vec![]), ("Just", vec![G::Int])]),
            G::ListInt => ("List", vec![int()], vec![("Nil", vec![]), ("Cons", vec![G::Int, G::ListInt])]),
            G::PairIntBool => ("Prod", vec![int(), Ty::ind("Bool")], vec![("Pair", vec![G::Int, G::Bool])]),
            _ => ("Peano", vec![], vec![("Z", vec![]), ("S", vec![G::Peano])]),
        };
        let mut bs = Vec::new();
        for (i, (ctor, args)) in arms.iter().enumerate() {
            let binders: Vec<Option<G>> = args.iter().map(|a| Some(*a)).collect();
            let size = s[1 + i.min(1)];
            let body = self.under(&binders, |me| me.expr(g, size));
            let names: Vec<String> = args.iter().map(|_| self.name("p")).collect();
            let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            bs.push(branch(ctor, &refs, body));
        }
        bs.shuffle(&mut self.rng);
        Expr::case(scrut, ind, params, g.ty(), bs)
    }

    /// A structurally recursive fixpoint applied to a list or a Peano
    /// number. The recursive result is bound by a let in the step case.
    fn fix(&mut self, g: G, n: usize) -> Expr {
        let s = self.split(n, 3);
        let over_list = self.rng.gen_bool(0.6);
        let (arg_g, ind, params, step_ctor, step_args): (G, &str, Vec<Ty>, &str, Vec<G>) = if over_list {
            (G::ListInt, "List", vec![int()], "Cons", vec![G::Int, G::ListInt])
        } else {
            (G::Peano, "Peano", vec![], "S", vec![G::Peano])
        };
        let base_ctor = if over_list { "Nil" } else { "Z" };
        let arg = self.expr(arg_g, s[0]);
        let (base, step) = self.under(&[None, Some(arg_g)], |me| {
            let base = me.expr(g, s[1]);
            let binders: Vec<Option<G>> = step_args.iter().map(|a| Some(*a)).collect();
            let step = me.under(&binders, |me| {
                // f sits just outside x and the pattern binders; the last
                // pattern binder is the recursive argument
                let f = Expr::var(step_args.len() + 1);
                let rec = Expr::app(f, Expr::var(0));
                let body = me.under(&[Some(g)], |me| me.expr(g, s[2]));
                let r = me.name("r");
                Expr::let_in(r, g.ty(), rec, body)
            });
            (base, step)
        });
        let names: Vec<String> = step_args.iter().map(|_| self.name("p")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let mut bs = vec![branch(base_ctor, &[], base), branch(step_ctor, &refs, step)];
        bs.shuffle(&mut self.rng);
        let body = Expr::case(Expr::var(0), ind, params, g.ty(), bs);
        let (f, x) = (self.name("f"), self.name("x"));
        Expr::app(Expr::fix(f, x, arg_g.ty(), g.ty(), body), arg)
    }

    fn specific(&mut self, g: G, n: usize) -> Expr {
        let s = self.split(n, 2);
        match g {
            G::Int => match self.rng.gen_range(0..7) {
                0..=3 => {
                    let op = *["addInt", "subInt", "mulInt", "maxInt"].choose(&mut self.rng).unwrap();
                    let (a, b) = (self.expr(G::Int, s[0]), self.expr(G::Int, s[1]));
                    Expr::apps(k(op), [a, b])
                }
                4 => {
                    let op = *["addInt", "maxInt"].choose(&mut self.rng).unwrap();
                    let (i, l) = (self.expr(G::Int, s[0]), self.expr(G::ListInt, s[1]));
                    Expr::apps(k("foldr"), [tyarg(int()), tyarg(int()), k(op), i, l])
                }
                5 => {
                    let (f, a) = (self.expr(G::IntToInt, s[0]), self.expr(G::Int, s[1]));
                    Expr::app(f, a)
                }
                _ => {
                    let (key, v) = (self.nat_lit(), self.expr(G::Int, s[0]));
                    let m = Expr::apps(
                        k("madd"),
                        [key, v, Expr::apps(c("AcornMap", "MNil"), [tyarg(Ty::ind("Nat")), tyarg(int())])],
                    );
                    Expr::app(k("sum_map"), m)
                }
            },
            G::Nat => {
                let (a, b) = (self.expr(G::Nat, s[0]), self.expr(G::Nat, s[1]));
                Expr::apps(k("addNat"), [a, b])
            }
            G::Bool => match self.rng.gen_range(0..4) {
                0 => {
                    let op = *["ltInt", "leInt", "eqInt"].choose(&mut self.rng).unwrap();
                    let (a, b) = (self.expr(G::Int, s[0]), self.expr(G::Int, s[1]));
                    Expr::apps(k(op), [a, b])
                }
                1 => {
                    let op = *["lebNat", "ltbNat", "eqbNat"].choose(&mut self.rng).unwrap();
                    let (a, b) = (self.expr(G::Nat, s[0]), self.expr(G::Nat, s[1]));
                    Expr::apps(k(op), [a, b])
                }
                2 => {
                    let op = *["andb", "orb"].choose(&mut self.rng).unwrap();
                    let (a, b) = (self.expr(G::Bool, s[0]), self.expr(G::Bool, s[1]));
                    Expr::apps(k(op), [a, b])
                }
                _ => {
                    let a = self.expr(G::Bool, n);
                    Expr::app(k("notb"), a)
                }
            },
            G::ListInt => {
                let (a, b) = (self.expr(G::Int, s[0]), self.expr(G::ListInt, s[1]));
                if self.rng.gen_bool(0.6) {
                    Expr::apps(c("List", "Cons"), [tyarg(int()), a, b])
                } else {
                    let a = self.expr(G::ListInt, s[0]);
                    Expr::apps(k("concat"), [tyarg(int()), a, b])
                }
            }
            G::MaybeInt => {
                if self.rng.gen_bool(0.5) {
                    let a = self.expr(G::Int, n);
                    Expr::apps(c("Maybe", "Just"), [tyarg(int()), a])
                } else {
                    let (key, probe) = (self.nat_lit(), self.expr(G::Nat, s[1]));
                    let v = self.expr(G::Int, s[0]);
                    let m = Expr::apps(
                        k("madd"),
                        [key, v, Expr::apps(c("AcornMap", "MNil"), [tyarg(Ty::ind("Nat")), tyarg(int())])],
                    );
                    Expr::apps(k("mfind"), [m, probe])
                }
            }
            G::PairIntBool => {
                let (a, b) = (self.expr(G::Int, s[0]), self.expr(G::Bool, s[1]));
                Expr::apps(c("Prod", "Pair"), [tyarg(int()), tyarg(Ty::ind("Bool")), a, b])
            }
            G::Peano => {
                let a = self.expr(G::Peano, n);
                Expr::app(c("Peano", "S"), a)
            }
            G::IntToInt => {
                if self.rng.gen_bool(0.3) {
                    let op = *["addInt", "subInt", "mulInt", "maxInt"].choose(&mut self.rng).unwrap();
                    let a = self.expr(G::Int, n);
                    Expr::app(k(op), a)
                } else {
                    let body = self.under(&[Some(G::Int)], |me| me.expr(G::Int, n));
                    let x = self.name("x");
                    Expr::lam(x, int(), body)
                }
            }
        }
    }
}

/// One closed program from `seed` with size budget `size`.
pub fn gen_expr(seed: u64, size: usize) -> Expr {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed), ctx: Vec::new(), fresh: 0 };
    let ty = if g.rng.gen_bool(0.9) { *FIRST_ORDER.choose(&mut g.rng).unwrap() } else { G::IntToInt };
    g.expr(ty, size)
}

/// `cfg.count` programs named `gen::0000`, `gen::0001`, ... Sizes cycle
/// through `0..=cfg.size` so small and large programs are both covered.
pub fn gen_programs(cfg: &GenConfig) -> Vec<Definition> {
    let mut seeds = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.count)
        .map(|i| {
            let size = i % (cfg.size + 1);
            Definition { name: format!("gen::{i:04}"), expr: gen_expr(seeds.gen(), size) }
        })
        .collect()
}
