//! Scenario files: accounts, a scripted sequence of blocks, and optionally
//! a batch of generated traces, all checked against the campaign
//! invariants.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    all_backed, all_consistent, contract, gen_trace, trace_holds, Action, Address, BlockHeader, ChainConfig,
    ChainState, TraceConfig,
};
use crate::ast::indexify;
use crate::interp::{eval_closed, EvalFailure, Val};
use crate::syntax::{parse_expr, ParseError};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub accounts: Vec<Account>,
    #[serde(default)]
    pub blocks: Vec<ScriptBlock>,
    #[serde(default)]
    pub generate: Option<Generate>,
    /// Balances required at the end of the script.
    #[serde(default)]
    pub expect_balances: BTreeMap<Address, i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Account {
    pub address: Address,
    pub balance: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScriptBlock {
    pub slot: u64,
    #[serde(default)]
    pub actions: Vec<ScriptAction>,
    #[serde(default)]
    pub expect: Option<Expect>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Accepted,
    Rejected,
}

/// A contract is named either by address or by the name given at deployment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Target {
    Address(Address),
    Name(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScriptAction {
    Transfer {
        from: Address,
        to: Target,
        amount: i64,
    },
    /// `setup` holds source expressions evaluated in the contract's
    /// environment, e.g. `"10"` or `"50z"`.
    Deploy {
        name: Option<String>,
        contract: String,
        from: Address,
        #[serde(default)]
        amount: i64,
        #[serde(default)]
        setup: Vec<String>,
    },
    Call {
        from: Address,
        to: Target,
        msg: Option<String>,
        #[serde(default)]
        amount: i64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Generate {
    pub traces: usize,
    #[serde(flatten)]
    pub config: TraceConfig,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unknown contract {0}")]
    UnknownContract(String),
    #[error("unknown deployment name {0}")]
    UnknownName(String),
    #[error("in {src:?}: {err}")]
    Parse { src: String, err: ParseError },
    #[error("in {src:?}: {msg}")]
    Value { src: String, msg: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockOutcome {
    pub slot: u64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct GenOutcome {
    pub traces: usize,
    pub blocks: usize,
    pub failed_blocks: usize,
    pub atomicity_violations: usize,
    pub invalid_traces: usize,
    pub funded: usize,
    pub unfunded: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioOutcome {
    pub blocks: Vec<BlockOutcome>,
    /// One line per broken invariant, naming the block after which it broke.
    pub violations: Vec<String>,
    pub balances: BTreeMap<Address, String>,
    pub generated: Option<GenOutcome>,
}

impl ScenarioOutcome {
    pub fn clean(&self) -> bool {
        self.violations.is_empty()
            && self.generated.as_ref().is_none_or(|g| g.atomicity_violations == 0 && g.invalid_traces == 0)
    }
}

fn value(genv: &crate::ast::GlobalEnv, src: &str) -> Result<Val, ScenarioError> {
    let err = |msg: String| ScenarioError::Value { src: src.into(), msg };
    let e = parse_expr(src).map_err(|err| ScenarioError::Parse { src: src.into(), err })?;
    let e = indexify(genv, &[], &e).map_err(|e| err(e.to_string()))?;
    eval_closed(genv, 10_000, &e).map_err(|e: EvalFailure| err(e.to_string()))
}

fn resolve(names: &BTreeMap<String, Address>, t: &Target) -> Result<Address, ScenarioError> {
    match t {
        Target::Address(a) => Ok(*a),
        Target::Name(n) => names.get(n).copied().ok_or_else(|| ScenarioError::UnknownName(n.clone())),
    }
}

/// Runs the scripted blocks (a rejected block is reported and skipped),
/// checking the invariants after each, then the generated traces.
pub fn run_scenario(sc: &Scenario, cfg: &ChainConfig) -> Result<ScenarioOutcome, ScenarioError> {
    let mut state = ChainState::genesis(sc.accounts.iter().map(|a| (a.address, BigInt::from(a.balance))));
    let total = state.total_money();
    let mut names: BTreeMap<String, Address> = BTreeMap::new();
    let mut blocks = Vec::new();
    let mut violations = Vec::new();
    for b in &sc.blocks {
        let mut local = names.clone();
        let mut next = state.peek_next_address();
        let mut fresh = BTreeMap::new();
        let mut acts = Vec::new();
        for a in &b.actions {
            acts.push(match a {
                ScriptAction::Transfer { from, to, amount } => {
                    Action::Transfer { from: *from, to: resolve(&local, to)?, amount: BigInt::from(*amount) }
                }
                ScriptAction::Deploy { name, contract: c, from, amount, setup } => {
                    let spec = contract(c).ok_or_else(|| ScenarioError::UnknownContract(c.clone()))?;
                    let setup = setup.iter().map(|s| value(&spec.env, s)).collect::<Result<_, _>>()?;
                    if let Some(n) = name {
                        local.insert(n.clone(), next);
                    }
                    fresh.insert(next, spec.clone());
                    next += 1;
                    Action::Deploy { from: *from, contract: spec, setup, amount: BigInt::from(*amount) }
                }
                ScriptAction::Call { from, to, msg, amount } => {
                    let to = resolve(&local, to)?;
                    let spec = state.contracts.get(&to).map(|c| c.spec.clone()).or_else(|| fresh.get(&to).cloned());
                    let msg = match (msg, spec) {
                        (Some(m), Some(spec)) => Some(value(&spec.env, m)?),
                        // no contract there; the block will be rejected anyway
                        _ => None,
                    };
                    Action::Call { from: *from, to, msg, amount: BigInt::from(*amount) }
                }
            });
        }
        let got = match state.add_block(cfg, &BlockHeader::at(b.slot), &acts) {
            Ok(()) => {
                names = local;
                blocks.push(BlockOutcome { slot: b.slot, error: None });
                Expect::Accepted
            }
            Err(e) => {
                blocks.push(BlockOutcome { slot: b.slot, error: Some(e.to_string()) });
                Expect::Rejected
            }
        };
        if b.expect.is_some_and(|e| e != got) {
            violations.push(format!("block at slot {} was {got:?}, expected otherwise", b.slot));
        }
        if !all_consistent(&state) {
            violations.push(format!("consistent_balance broken after slot {}", b.slot));
        }
        if !all_backed(&state) {
            violations.push(format!("cf_backed broken after slot {}", b.slot));
        }
        if state.total_money() != total {
            violations.push(format!("money not conserved after slot {}", b.slot));
        }
    }
    for (a, want) in &sc.expect_balances {
        if state.balance(*a) != BigInt::from(*want) {
            violations.push(format!("balance of {a} is {}, expected {want}", state.balance(*a)));
        }
    }
    let generated = sc.generate.as_ref().map(|g| {
        let mut out = GenOutcome::default();
        for i in 0..g.traces {
            let tc = TraceConfig { seed: g.config.seed.wrapping_add(i as u64), ..g.config.clone() };
            let (tr, st) = gen_trace(&tc, cfg);
            out.traces += 1;
            out.blocks += tr.blocks.len();
            out.failed_blocks += st.failed_blocks;
            out.atomicity_violations += st.atomicity_violations;
            if !trace_holds(&tr, cfg) {
                out.invalid_traces += 1;
            }
            match st.funded {
                Some(true) => out.funded += 1,
                Some(false) => out.unfunded += 1,
                None => {}
            }
        }
        out
    });
    Ok(ScenarioOutcome {
        blocks,
        violations,
        balances: state.balances.iter().map(|(a, b)| (*a, b.to_string())).collect(),
        generated,
    })
}
