use std::collections::HashSet;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{Expr, Ty};
use crate::prim::PrimOp;

/// A constructor: its name and argument types. Argument types may mention
/// the inductive's parameters as type variables bound at top level, the
/// last parameter being index 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstrDecl {
    pub name: String,
    pub args: Vec<Ty>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InductiveDecl {
    pub name: String,
    pub num_params: usize,
    pub constrs: Vec<ConstrDecl>,
}

impl InductiveDecl {
    /// Total number of arguments a saturated constructor value carries,
    /// parameters included.
    pub fn full_arity(&self, ctor: &ConstrDecl) -> usize {
        self.num_params + ctor.args.len()
    }
}

/// A global constant: either a closed expression or a builtin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum ConstDef {
    Expr { expr: Expr },
    Builtin { op: PrimOp },
}

/// Inductive declarations plus named constants.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GlobalEnv {
    pub inductives: Vec<InductiveDecl>,
    pub constants: IndexMap<String, ConstDef>,
}

/// Why an environment fails the well-formedness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WfDiagnostic {
    DuplicateInductive(String),
    DuplicateConstructor { ind: String, ctor: String },
    OpenConstructorArg { ind: String, ctor: String, arg: usize, num_params: usize },
}

impl fmt::Display for WfDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WfDiagnostic::DuplicateInductive(i) => write!(f, "inductive {i} is declared more than once"),
            WfDiagnostic::DuplicateConstructor { ind, ctor } => {
                write!(f, "constructor {ctor} appears more than once in {ind}")
            }
            WfDiagnostic::OpenConstructorArg { ind, ctor, arg, num_params } => write!(
                f,
                "argument {arg} of {ind}.{ctor} mentions a type variable beyond the {num_params} parameter(s)"
            ),
        }
    }
}

impl GlobalEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn inductive(&self, name: &str) -> Option<&InductiveDecl> {
        self.inductives.iter().find(|d| d.name == name)
    }

    /// Constructors of `ind` in declaration order.
    pub fn resolve_inductive(&self, ind: &str) -> Option<&[ConstrDecl]> {
        self.inductive(ind).map(|d| d.constrs.as_slice())
    }

    /// Zero-based position of `ctor` within `ind`, with its declaration.
    pub fn resolve_constr(&self, ind: &str, ctor: &str) -> Option<(usize, &ConstrDecl)> {
        self.resolve_inductive(ind)?.iter().enumerate().find(|(_, c)| c.name == ctor)
    }

    /// All inductives declaring a constructor called `ctor`.
    pub fn inductives_with_constr<'a>(&'a self, ctor: &'a str) -> impl Iterator<Item = &'a InductiveDecl> + 'a {
        self.inductives.iter().filter(move |d| d.constrs.iter().any(|c| c.name == ctor))
    }

    pub fn constant(&self, name: &str) -> Option<&ConstDef> {
        self.constants.get(name)
    }

    pub fn add_inductive(&mut self, decl: InductiveDecl) {
        self.inductives.push(decl);
    }

    pub fn add_constant(&mut self, name: impl Into<String>, def: ConstDef) {
        self.constants.insert(name.into(), def);
    }

    /// Appends another environment; later constants shadow earlier ones.
    pub fn extend(&mut self, other: GlobalEnv) {
        self.inductives.extend(other.inductives);
        self.constants.extend(other.constants);
    }

    /// Checks that inductive and constructor names are unique and that every
    /// constructor argument type is closed under the parameter count.
    pub fn check(&self) -> Result<(), Vec<WfDiagnostic>> {
        let mut diags = Vec::new();
        let mut seen = HashSet::new();
        for d in &self.inductives {
            if !seen.insert(d.name.as_str()) {
                diags.push(WfDiagnostic::DuplicateInductive(d.name.clone()));
            }
            let mut ctors = HashSet::new();
            for c in &d.constrs {
                if !ctors.insert(c.name.as_str()) {
                    diags.push(WfDiagnostic::DuplicateConstructor { ind: d.name.clone(), ctor: c.name.clone() });
                }
                for (arg, ty) in c.args.iter().enumerate() {
                    if !ty.closed_under(d.num_params) {
                        diags.push(WfDiagnostic::OpenConstructorArg {
                            ind: d.name.clone(),
                            ctor: c.name.clone(),
                            arg,
                            num_params: d.num_params,
                        });
                    }
                }
            }
        }
        if diags.is_empty() {
            Ok(())
        } else {
            Err(diags)
        }
    }

    pub fn is_wf(&self) -> bool {
        self.check().is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acorn_map() -> InductiveDecl {
        InductiveDecl {
            name: "AcornMap".into(),
            num_params: 2,
            constrs: vec![
                ConstrDecl { name: "MNil".into(), args: vec![] },
                ConstrDecl {
                    name: "MCons".into(),
                    args: vec![Ty::var(1), Ty::var(0), Ty::apps(Ty::ind("AcornMap"), [Ty::var(1), Ty::var(0)])],
                },
            ],
        }
    }

    fn msg() -> InductiveDecl {
        InductiveDecl {
            name: "Msg".into(),
            num_params: 0,
            constrs: ["Donate", "GetFunds", "Claim"]
                .into_iter()
                .map(|n| ConstrDecl { name: n.into(), args: vec![] })
                .collect(),
        }
    }

    #[test]
    fn resolves_in_declaration_order() {
        let mut env = GlobalEnv::new();
        env.add_inductive(acorn_map());
        env.add_inductive(msg());
        let names: Vec<_> = env.resolve_inductive("AcornMap").unwrap().iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["MNil", "MCons"]);
        assert!(env.resolve_inductive("Foo").is_none());
        let (pos, decl) = env.resolve_constr("AcornMap", "MCons").unwrap();
        assert_eq!((pos, decl.args.len()), (1, 3));
        let (pos, decl) = env.resolve_constr("AcornMap", "MNil").unwrap();
        assert_eq!((pos, decl.args.len()), (0, 0));
        assert_eq!(env.resolve_constr("Msg", "Claim").unwrap().0, 2);
        assert!(env.resolve_constr("Msg", "Nope").is_none());
        assert!(env.resolve_constr("Nope", "Claim").is_none());
    }

    #[test]
    fn wf_accepts_acorn_map() {
        let mut env = GlobalEnv::new();
        env.add_inductive(acorn_map());
        assert!(env.is_wf());
    }

    #[test]
    fn wf_rejects_out_of_range_parameter() {
        let mut env = GlobalEnv::new();
        env.add_inductive(InductiveDecl {
            name: "Bad".into(),
            num_params: 1,
            constrs: vec![ConstrDecl { name: "B".into(), args: vec![Ty::var(1)] }],
        });
        let diags = env.check().unwrap_err();
        assert_eq!(
            diags,
            vec![WfDiagnostic::OpenConstructorArg { ind: "Bad".into(), ctor: "B".into(), arg: 0, num_params: 1 }]
        );
        assert!(diags[0].to_string().contains("Bad.B"));
    }

    #[test]
    fn wf_rejects_duplicates() {
        let mut env = GlobalEnv::new();
        env.add_inductive(msg());
        env.add_inductive(msg());
        let mut dup = msg();
        dup.name = "Msg2".into();
        dup.constrs.push(ConstrDecl { name: "Claim".into(), args: vec![] });
        env.add_inductive(dup);
        let diags = env.check().unwrap_err();
        assert!(diags.contains(&WfDiagnostic::DuplicateInductive("Msg".into())));
        assert!(diags.contains(&WfDiagnostic::DuplicateConstructor { ind: "Msg2".into(), ctor: "Claim".into() }));
    }

    #[test]
    fn inductive_json_schema() {
        let v = serde_json::to_value(acorn_map()).unwrap();
        assert_eq!(v["numParams"], 2);
        assert_eq!(v["constrs"][1]["name"], "MCons");
        assert_eq!(v["constrs"][1]["args"][0], serde_json::json!({"tag": "TVar", "index": 1}));
    }
}
