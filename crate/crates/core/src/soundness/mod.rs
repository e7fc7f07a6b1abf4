//! Differential testing of the translation: every closed program is run
//! through the interpreter (then read back and translated) and through the
//! kernel evaluator (after translation), and the two results compared.

mod gen;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub use gen::{gen_expr, gen_programs, GenConfig};

use crate::ast::{Definition, Expr, GlobalEnv};
use crate::interp::{
    eval, eval_closed, eval_observed, from_val, subst_env_expr, validate, wf_val, EvalEnv, EvalFailure, Val,
};
use crate::kernel::{cbv_eval, parallel_subst, KernelEnv, Term};
use crate::syntax::{load_json, load_source, LoadError};
use crate::translate::{expr_to_term, translate_env, TranslateError};

pub const DEFAULT_FUEL: usize = 10_000;

/// Which evaluator ran out of fuel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FuelSide {
    Interp,
    Kernel,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome")]
pub enum DiffOutcome {
    Agree {
        term: Term,
    },
    /// The sides differ. Each side is a result term or an error message.
    Disagree {
        lhs: Result<Term, String>,
        rhs: Result<Term, String>,
        program: Box<Expr>,
    },
    Inconclusive {
        side: FuelSide,
    },
    /// Both evaluators got stuck; nothing to compare.
    BothStuck {
        interp: String,
        kernel: String,
    },
}

impl DiffOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            DiffOutcome::Agree { .. } => "agree",
            DiffOutcome::Disagree { .. } => "DISAGREE",
            DiffOutcome::Inconclusive { .. } => "inconclusive",
            DiffOutcome::BothStuck { .. } => "both-stuck",
        }
    }
}

/// A global environment together with its translation.
pub struct Harness {
    pub genv: GlobalEnv,
    pub kenv: KernelEnv,
}

impl Harness {
    pub fn new(genv: GlobalEnv) -> Result<Self, TranslateError> {
        let kenv = translate_env(&genv)?;
        Ok(Harness { genv, kenv })
    }

    fn kernel_side(&self, fuel: usize, e: &Expr) -> Result<Result<Term, EvalFailure>, String> {
        let t = expr_to_term(&self.genv, e).map_err(|err| format!("translation failed: {err}"))?;
        Ok(cbv_eval(&self.kenv, fuel, &t))
    }

    /// Runs one closed program through both pipelines.
    pub fn diff_check(&self, fuel: usize, e: &Expr) -> Checked {
        let interp = eval_closed(&self.genv, fuel, e);
        let value =
            interp.as_ref().ok().map(|v| ValueCheck { wf_val: wf_val(&self.genv, v), from_val: from_val(v).is_some() });
        let kernel = match self.kernel_side(fuel, e) {
            Ok(k) => k,
            Err(msg) => {
                let rhs = interp_term(self, &interp);
                return Checked { outcome: disagree(Err(msg), rhs, e), value, deterministic: true };
            }
        };
        let deterministic = self.kernel_side(fuel, e).ok() == Some(kernel.clone());
        let outcome = match (&kernel, &interp) {
            (Err(EvalFailure::NotEnoughFuel), Err(EvalFailure::NotEnoughFuel)) => {
                DiffOutcome::Inconclusive { side: FuelSide::Both }
            }
            (Err(EvalFailure::NotEnoughFuel), _) => DiffOutcome::Inconclusive { side: FuelSide::Kernel },
            (_, Err(EvalFailure::NotEnoughFuel)) => DiffOutcome::Inconclusive { side: FuelSide::Interp },
            (Err(EvalFailure::EvalError(k)), Err(EvalFailure::EvalError(i))) => {
                DiffOutcome::BothStuck { interp: i.clone(), kernel: k.clone() }
            }
            _ => {
                let lhs = kernel.map_err(|err| err.to_string());
                let rhs = interp_term(self, &interp);
                match (&lhs, &rhs) {
                    (Ok(a), Ok(b)) if a == b => DiffOutcome::Agree { term: a.clone() },
                    _ => disagree(lhs, rhs, e),
                }
            }
        };
        Checked { outcome, value, deterministic }
    }
}

fn disagree(lhs: Result<Term, String>, rhs: Result<Term, String>, e: &Expr) -> DiffOutcome {
    DiffOutcome::Disagree { lhs, rhs, program: Box::new(e.clone()) }
}

/// The interpreter's result read back and translated.
fn interp_term(h: &Harness, r: &Result<Val, EvalFailure>) -> Result<Term, String> {
    let v = r.as_ref().map_err(|e| e.to_string())?;
    let e = from_val(v).ok_or_else(|| "value cannot be read back".to_string())?;
    expr_to_term(&h.genv, &e).map_err(|err| format!("read-back translation failed: {err}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ValueCheck {
    pub wf_val: bool,
    pub from_val: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Checked {
    pub outcome: DiffOutcome,
    /// Present when the interpreter returned a value.
    pub value: Option<ValueCheck>,
    /// Two kernel runs gave identical results.
    pub deterministic: bool,
}

/// Environment-substitution/translation commutation on one pair:
/// translating `e` with `rho` substituted in equals substituting the
/// translated entries into the translated `e`. `None` when the pair does
/// not meet the preconditions.
pub fn subst_commutes(genv: &GlobalEnv, rho: &EvalEnv, e: &Expr) -> Option<bool> {
    if !validate(rho, 0, e) {
        return None;
    }
    let entries: Vec<Expr> = rho.iter().map(from_val).collect::<Option<_>>()?;
    if !entries.iter().all(|x| x.closed_under(0)) {
        return None;
    }
    let substituted = subst_env_expr(&entries, e)?;
    let lhs = expr_to_term(genv, &substituted).ok()?;
    let terms: Vec<Term> = entries.iter().map(|x| expr_to_term(genv, x)).collect::<Result<_, _>>().ok()?;
    let rhs = parallel_subst(&terms, &expr_to_term(genv, e).ok()?);
    Some(lhs == rhs)
}

/// Up to `cap` (environment, expression) pairs met while evaluating `e`,
/// taking every `stride`-th step that has a non-empty environment.
pub fn harvest_pairs(genv: &GlobalEnv, fuel: usize, e: &Expr, stride: usize, cap: usize) -> Vec<(EvalEnv, Expr)> {
    let mut out = Vec::new();
    let mut seen = 0usize;
    let _ = eval_observed(genv, fuel, &EvalEnv::new(), e, &mut |rho, sub| {
        if rho.is_empty() || out.len() >= cap {
            return;
        }
        if seen.is_multiple_of(stride.max(1)) {
            out.push((rho.clone(), sub.clone()));
        }
        seen += 1;
    });
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SubstTally {
    pub checked: usize,
    pub failed: usize,
}

pub fn subst_over(genv: &GlobalEnv, pairs: &[(EvalEnv, Expr)]) -> SubstTally {
    let mut t = SubstTally::default();
    for (rho, e) in pairs {
        if let Some(ok) = subst_commutes(genv, rho, e) {
            t.checked += 1;
            t.failed += usize::from(!ok);
        }
    }
    t
}

/// Outcome of a fuel-monotonicity probe at fuel `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Monotone {
    /// `n` did not suffice; nothing to check.
    Skipped,
    Holds,
    Violated,
}

/// A result at fuel `n` other than running out of fuel must be reproduced
/// exactly at fuel `n + 1`.
pub fn fuel_monotone(genv: &GlobalEnv, n: usize, e: &Expr) -> Monotone {
    match eval(genv, n, &EvalEnv::new(), e) {
        Err(EvalFailure::NotEnoughFuel) => Monotone::Skipped,
        r => {
            if eval(genv, n + 1, &EvalEnv::new(), e) == r {
                Monotone::Holds
            } else {
                Monotone::Violated
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProgramReport {
    pub name: String,
    #[serde(flatten)]
    pub checked: Checked,
    pub subst: SubstTally,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub programs: Vec<ProgramReport>,
    /// Files that failed to load, with the reason.
    pub errors: Vec<(String, String)>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub programs: usize,
    pub agree: usize,
    pub disagree: usize,
    pub inconclusive: usize,
    pub both_stuck: usize,
    pub subst_checked: usize,
    pub subst_failed: usize,
    pub values_checked: usize,
    pub values_failed: usize,
    pub nondeterministic: usize,
    pub load_errors: usize,
}

impl Summary {
    /// No disagreement, no broken property and no load error.
    pub fn clean(&self) -> bool {
        self.disagree == 0
            && self.subst_failed == 0
            && self.values_failed == 0
            && self.nondeterministic == 0
            && self.load_errors == 0
    }
}

impl Report {
    pub fn summary(&self) -> Summary {
        let mut s = Summary { programs: self.programs.len(), load_errors: self.errors.len(), ..Default::default() };
        for p in &self.programs {
            match p.checked.outcome {
                DiffOutcome::Agree { .. } => s.agree += 1,
                DiffOutcome::Disagree { .. } => s.disagree += 1,
                DiffOutcome::Inconclusive { .. } => s.inconclusive += 1,
                DiffOutcome::BothStuck { .. } => s.both_stuck += 1,
            }
            if let Some(l) = p.checked.value {
                s.values_checked += 1;
                s.values_failed += usize::from(!(l.wf_val && l.from_val));
            }
            s.nondeterministic += usize::from(!p.checked.deterministic);
            s.subst_checked += p.subst.checked;
            s.subst_failed += p.subst.failed;
        }
        s
    }

    pub fn merge(&mut self, other: Report) {
        self.programs.extend(other.programs);
        self.errors.extend(other.errors);
        self.sort();
    }

    fn sort(&mut self) {
        self.programs.sort_by(|a, b| a.name.cmp(&b.name));
        self.errors.sort();
    }

    /// One line per program, then the error lines and a summary line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for p in &self.programs {
            let _ = write!(out, "{} {}", p.checked.outcome.label(), p.name);
            match &p.checked.outcome {
                DiffOutcome::Inconclusive { side } => {
                    let _ = write!(out, " (out of fuel: {side:?})");
                }
                DiffOutcome::BothStuck { interp, .. } => {
                    let _ = write!(out, " ({interp})");
                }
                DiffOutcome::Disagree { lhs, rhs, .. } => {
                    let show = |r: &Result<Term, String>| match r {
                        Ok(t) => crate::kernel::pretty_term(None, t),
                        Err(e) => format!("error: {e}"),
                    };
                    let _ = write!(out, "\n    kernel: {}\n    interp: {}", show(lhs), show(rhs));
                }
                DiffOutcome::Agree { .. } => {}
            }
            if let Some(l) = p.checked.value {
                if !(l.wf_val && l.from_val) {
                    let _ = write!(out, " [value not well-formed]");
                }
            }
            if p.subst.failed > 0 {
                let _ = write!(out, " [subst failed on {} of {} pairs]", p.subst.failed, p.subst.checked);
            }
            out.push('\n');
        }
        for (file, err) in &self.errors {
            let _ = writeln!(out, "error {file}: {err}");
        }
        let s = self.summary();
        let _ = writeln!(
            out,
            "summary: {} programs, {} agree, {} disagree, {} inconclusive, {} both-stuck; \
             subst {}/{} pairs hold; value {}/{} values well-formed; {} load errors",
            s.programs,
            s.agree,
            s.disagree,
            s.inconclusive,
            s.both_stuck,
            s.subst_checked - s.subst_failed,
            s.subst_checked,
            s.values_checked - s.values_failed,
            s.values_checked,
            s.load_errors
        );
        out
    }
}

/// Pairs harvested per program for the substitution check.
const HARVEST_STRIDE: usize = 5;
const HARVEST_CAP: usize = 12;

/// Checks a batch of named closed programs over one environment.
pub fn check_programs(h: &Harness, fuel: usize, programs: &[Definition]) -> Vec<ProgramReport> {
    programs
        .iter()
        .map(|d| {
            let checked = h.diff_check(fuel, &d.expr);
            let pairs = harvest_pairs(&h.genv, fuel, &d.expr, HARVEST_STRIDE, HARVEST_CAP);
            ProgramReport { name: d.name.clone(), checked, subst: subst_over(&h.genv, &pairs) }
        })
        .collect()
}

fn load_file(base: &GlobalEnv, path: &Path) -> Result<crate::syntax::Loaded, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let r: Result<_, LoadError> =
        if path.extension().is_some_and(|x| x == "json") { load_json(base, &text) } else { load_source(base, &text) };
    r.map_err(|e| e.to_string())
}

/// Corpus files at `path`: the file itself, or the `.acorn` and `.json`
/// files directly inside the directory, sorted by name.
pub fn corpus_files(path: &Path) -> std::io::Result<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "acorn" || x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

/// Loads every corpus file on top of `base` and checks all of its test
/// programs. Program names are `<file stem>::<test name>`.
pub fn run_corpus(base: &GlobalEnv, path: &Path, fuel: usize) -> Report {
    let mut report = Report::default();
    let files = match corpus_files(path) {
        Ok(f) => f,
        Err(e) => {
            report.errors.push((path.display().to_string(), e.to_string()));
            return report;
        }
    };
    for file in files {
        let stem = file.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        let loaded = match load_file(base, &file) {
            Ok(l) => l,
            Err(e) => {
                report.errors.push((file.display().to_string(), e));
                continue;
            }
        };
        let programs: Vec<Definition> = loaded
            .programs
            .iter()
            .map(|d| Definition { name: format!("{stem}::{}", d.name), expr: d.expr.clone() })
            .collect();
        match Harness::new(loaded.env) {
            Ok(h) => report.programs.extend(check_programs(&h, fuel, &programs)),
            Err(e) => report.errors.push((file.display().to_string(), e.to_string())),
        }
    }
    report.sort();
    report
}

/// Generates and checks `cfg.count` programs over `base`.
pub fn run_generated(base: &GlobalEnv, cfg: &GenConfig, fuel: usize) -> Report {
    let mut report = Report::default();
    match Harness::new(base.clone()) {
        Ok(h) => report.programs = check_programs(&h, fuel, &gen_programs(cfg)),
        Err(e) => report.errors.push(("<generated>".into(), e.to_string())),
    }
    report.sort();
    report
}
