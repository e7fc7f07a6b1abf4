//! Blockchain execution: accounts, deployed contracts run through the
//! interpreter, blocks of actions applied atomically, traces and invariant
//! checks over every reachable state.

mod gen;
mod scenario;

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Signed;
use thiserror::Error;

pub use gen::{gen_trace, trace_holds, TraceConfig, TraceStats};
pub use scenario::{run_scenario, Expect, Scenario, ScenarioError, ScenarioOutcome};

use crate::ast::{Expr, GlobalEnv};
use crate::interp::{eval, EvalEnv, EvalFailure, Val};
use crate::programs::{self, from_acorn_list, int_of, ConversionError};
use crate::syntax::pretty_expr;

pub type Address = u64;

/// Contract addresses are allocated upwards from here; user accounts must
/// stay below it.
pub const CONTRACT_BASE: Address = 1_000;

/// A contract as deployed: its environment and entry points. `init` takes
/// the call context then the setup values; `receive` takes the chain view,
/// the call context, the message and the current state.
pub struct ContractSpec {
    pub name: String,
    pub env: Arc<GlobalEnv>,
    pub init: Expr,
    pub receive: Expr,
}

impl fmt::Debug for ContractSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ContractSpec({})", self.name)
    }
}

impl PartialEq for ContractSpec {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && Arc::ptr_eq(&self.env, &other.env)
    }
}

fn spec(name: &str, loaded: &crate::syntax::Loaded, receive: &str) -> Arc<ContractSpec> {
    Arc::new(ContractSpec {
        name: name.into(),
        env: Arc::new(loaded.env.clone()),
        init: Expr::constant("init"),
        receive: Expr::constant(receive),
    })
}

/// The shipped contracts: `crowdfunding`, `crowdfunding_double` (the
/// faulty variant) and `counter`.
pub fn contract(name: &str) -> Option<Arc<ContractSpec>> {
    use std::sync::OnceLock;
    static CF: OnceLock<Arc<ContractSpec>> = OnceLock::new();
    static CF2: OnceLock<Arc<ContractSpec>> = OnceLock::new();
    static CT: OnceLock<Arc<ContractSpec>> = OnceLock::new();
    Some(match name {
        "crowdfunding" => CF.get_or_init(|| spec(name, programs::crowdfunding(), "receive")).clone(),
        "crowdfunding_double" => CF2.get_or_init(|| spec(name, programs::crowdfunding(), "receive_double")).clone(),
        "counter" => CT.get_or_init(|| spec(name, programs::counter(), "receive")).clone(),
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeployedContract {
    pub spec: Arc<ContractSpec>,
    pub state: Val,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Transfer { from: Address, to: Address, amount: BigInt },
    Deploy { from: Address, contract: Arc<ContractSpec>, setup: Vec<Val>, amount: BigInt },
    Call { from: Address, to: Address, msg: Option<Val>, amount: BigInt },
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Transfer { from, to, amount } => write!(f, "transfer {amount} from {from} to {to}"),
            Action::Deploy { from, contract, setup, amount } => {
                write!(f, "deploy {} by {from} with {amount}", contract.name)?;
                for v in setup {
                    write!(f, " ({v})")?;
                }
                Ok(())
            }
            Action::Call { from, to, msg, amount } => {
                write!(f, "call {to} from {from} with {amount}")?;
                match msg {
                    Some(m) => write!(f, ": {m}"),
                    None => write!(f, " (no message)"),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockHeader {
    pub slot: u64,
    /// Receives the configured block reward, if any.
    pub reward_to: Option<Address>,
}

impl BlockHeader {
    pub fn at(slot: u64) -> Self {
        BlockHeader { slot, reward_to: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainConfig {
    pub fuel: usize,
    pub depth_limit: usize,
    pub block_reward: BigInt,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig { fuel: 100_000, depth_limit: 10, block_reward: BigInt::from(0) }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FailReason {
    #[error("slot {got} does not follow slot {prev}")]
    SlotNotIncreasing { prev: u64, got: u64 },
    #[error("negative amount {0}")]
    NegativeAmount(BigInt),
    #[error("account {addr} holds {has}, needs {needed}")]
    InsufficientBalance { addr: Address, has: BigInt, needed: BigInt },
    #[error("no contract at {0}")]
    UnknownContract(Address),
    #[error("contract at {0} needs a message")]
    MessageRequired(Address),
    #[error("contract at {0} rejected the call")]
    Rejected(Address),
    #[error("contract at {addr} failed: {err}")]
    Eval { addr: Address, err: EvalFailure },
    #[error("contract at {addr} returned a malformed result: {msg}")]
    BadResult { addr: Address, msg: String },
    #[error("actions nested deeper than {0}")]
    DepthExceeded(usize),
    #[error("contract address space exhausted")]
    AddressSpace,
}

/// Why a block was rejected: the reason and the top-level action (by
/// position in the block) during which it happened.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("action {action} ({description}): {reason}")]
pub struct BlockFailure {
    pub action: usize,
    pub description: String,
    pub reason: FailReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub slot: u64,
    pub balances: BTreeMap<Address, BigInt>,
    pub contracts: BTreeMap<Address, DeployedContract>,
    pub next_address: Address,
}

impl Default for ChainState {
    fn default() -> Self {
        ChainState { slot: 0, balances: BTreeMap::new(), contracts: BTreeMap::new(), next_address: CONTRACT_BASE }
    }
}

fn nat(a: Address) -> Val {
    Val::nat(a)
}

impl ChainState {
    /// A genesis state with the given user balances.
    pub fn genesis(accounts: impl IntoIterator<Item = (Address, BigInt)>) -> Self {
        ChainState { balances: accounts.into_iter().collect(), ..Default::default() }
    }

    pub fn balance(&self, a: Address) -> BigInt {
        self.balances.get(&a).cloned().unwrap_or_default()
    }

    pub fn total_money(&self) -> BigInt {
        self.balances.values().sum()
    }

    pub fn local_state(&self, a: Address) -> Option<&Val> {
        self.contracts.get(&a).map(|c| &c.state)
    }

    /// The address the next deployment will get.
    pub fn peek_next_address(&self) -> Address {
        self.next_address
    }

    /// Applies a block. On failure the state is left exactly as it was.
    pub fn add_block(&mut self, cfg: &ChainConfig, hd: &BlockHeader, acts: &[Action]) -> Result<(), BlockFailure> {
        let mut work = self.clone();
        work.apply_block(cfg, hd, acts)?;
        *self = work;
        Ok(())
    }

    /// Functional form of [`ChainState::add_block`].
    pub fn with_block(&self, cfg: &ChainConfig, hd: &BlockHeader, acts: &[Action]) -> Result<ChainState, BlockFailure> {
        let mut work = self.clone();
        work.apply_block(cfg, hd, acts)?;
        Ok(work)
    }

    fn apply_block(&mut self, cfg: &ChainConfig, hd: &BlockHeader, acts: &[Action]) -> Result<(), BlockFailure> {
        if hd.slot <= self.slot {
            return Err(BlockFailure {
                action: 0,
                description: "block header".into(),
                reason: FailReason::SlotNotIncreasing { prev: self.slot, got: hd.slot },
            });
        }
        self.slot = hd.slot;
        if let Some(r) = hd.reward_to {
            *self.balances.entry(r).or_default() += &cfg.block_reward;
        }
        for (i, act) in acts.iter().enumerate() {
            self.execute(cfg, act).map_err(|reason| BlockFailure {
                action: i,
                description: act.to_string(),
                reason,
            })?;
        }
        Ok(())
    }

    /// Runs one action and, depth first, everything it emits.
    fn execute(&mut self, cfg: &ChainConfig, act: &Action) -> Result<(), FailReason> {
        let mut queue: VecDeque<(Action, usize)> = VecDeque::from([(act.clone(), 0)]);
        while let Some((a, depth)) = queue.pop_front() {
            if depth > cfg.depth_limit {
                return Err(FailReason::DepthExceeded(cfg.depth_limit));
            }
            let emitted = self.step(cfg, a)?;
            for e in emitted.into_iter().rev() {
                queue.push_front((e, depth + 1));
            }
        }
        Ok(())
    }

    fn move_money(&mut self, from: Address, to: Address, amount: &BigInt) -> Result<(), FailReason> {
        if amount.is_negative() {
            return Err(FailReason::NegativeAmount(amount.clone()));
        }
        let has = self.balance(from);
        if &has < amount {
            return Err(FailReason::InsufficientBalance { addr: from, has, needed: amount.clone() });
        }
        *self.balances.entry(from).or_default() -= amount;
        *self.balances.entry(to).or_default() += amount;
        Ok(())
    }

    fn step(&mut self, cfg: &ChainConfig, a: Action) -> Result<Vec<Action>, FailReason> {
        match a {
            Action::Transfer { from, to, amount } => {
                if self.contracts.contains_key(&to) {
                    return Err(FailReason::MessageRequired(to));
                }
                self.move_money(from, to, &amount)?;
                Ok(vec![])
            }
            Action::Deploy { from, contract, setup, amount } => {
                let addr = self.next_address;
                self.next_address = addr.checked_add(1).ok_or(FailReason::AddressSpace)?;
                // the endowment is credited before init runs
                self.move_money(from, addr, &amount)?;
                let ctx = call_context(from, &amount, addr);
                let mut args = vec![ctx];
                args.extend(setup);
                let state = apply(&contract.env, cfg.fuel, &contract.init, args)
                    .map_err(|err| FailReason::Eval { addr, err })?;
                self.contracts.insert(addr, DeployedContract { spec: contract, state });
                Ok(vec![])
            }
            Action::Call { from, to, msg, amount } => {
                let Some(c) = self.contracts.get(&to) else {
                    return Err(FailReason::UnknownContract(to));
                };
                let Some(msg) = msg else {
                    return Err(FailReason::MessageRequired(to));
                };
                let (spec, state) = (c.spec.clone(), c.state.clone());
                self.move_money(from, to, &amount)?;
                let (new_state, emitted) = call_contract(cfg, &spec, self.slot, from, to, msg, &amount, state)?;
                self.contracts.get_mut(&to).expect("contract present").state = new_state;
                Ok(emitted)
            }
        }
    }
}

fn call_context(from: Address, amount: &BigInt, contract: Address) -> Val {
    Val::constr("SimpleContractCallContext", "MkCtx", vec![nat(from), Val::int(amount.clone()), nat(contract)])
}

fn chain_view(slot: u64) -> Val {
    Val::constr("SimpleChain", "MkChain", vec![nat(slot)])
}

/// Applies the closed expression `f` to `args` in `genv`.
pub fn apply(genv: &GlobalEnv, fuel: usize, f: &Expr, args: Vec<Val>) -> Result<Val, EvalFailure> {
    let n = args.len();
    let env = EvalEnv::from_vals(args);
    let e = Expr::apps(f.clone(), (0..n).map(Expr::var));
    eval(genv, fuel, &env, &e)
}

/// Runs a contract's receive function. A `Just (Pair state actions)`
/// result gives the new local state and the transfers it asks for;
/// `Nothing` is a rejection.
#[allow(clippy::too_many_arguments)]
pub fn call_contract(
    cfg: &ChainConfig,
    spec: &ContractSpec,
    slot: u64,
    caller: Address,
    to: Address,
    msg: Val,
    amount: &BigInt,
    state: Val,
) -> Result<(Val, Vec<Action>), FailReason> {
    let args = vec![chain_view(slot), call_context(caller, amount, to), msg, state];
    let r = apply(&spec.env, cfg.fuel, &spec.receive, args).map_err(|err| FailReason::Eval { addr: to, err })?;
    let bad = |msg: String| FailReason::BadResult { addr: to, msg };
    let Val::Constr { ind, ctor, args } = &r else { return Err(bad(format!("not a constructor: {r}"))) };
    match (ind.as_str(), ctor.as_str(), args.as_slice()) {
        ("Maybe", "Nothing", _) => Err(FailReason::Rejected(to)),
        ("Maybe", "Just", [_, Val::Constr { ind, ctor, args: pair }]) if ind == "Prod" && ctor == "Pair" => {
            let [_, _, new_state, acts] = pair.as_slice() else { return Err(bad("unsaturated pair".into())) };
            let acts = from_acorn_list(acts).map_err(|e| bad(e.to_string()))?;
            let emitted = acts
                .iter()
                .map(|a| transfer_of(to, a))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| bad(e.to_string()))?;
            Ok((new_state.clone(), emitted))
        }
        _ => Err(bad(format!("expected Maybe (Prod state actions), got {r}"))),
    }
}

fn transfer_of(from: Address, a: &Val) -> Result<Action, ConversionError> {
    match a {
        Val::Constr { ind, ctor, args } if ind == "SimpleActionBody" && ctor == "Transfer" => match args.as_slice() {
            [amount, Val::Prim(crate::prim::PrimVal::Nat(to))] => {
                let to = u64::try_from(to)
                    .map_err(|_| ConversionError::Shape { expected: "an address", found: to.to_string() })?;
                Ok(Action::Transfer { from, to, amount: int_of(amount)? })
            }
            _ => Err(ConversionError::Shape { expected: "Transfer amount address", found: a.to_string() }),
        },
        _ => Err(ConversionError::Shape { expected: "an action body", found: a.to_string() }),
    }
}

/// Fields of a crowdfunding `State` value, in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct CfState {
    pub balance: BigInt,
    pub donations: Val,
    pub owner: Address,
    pub deadline: u64,
    pub done: bool,
    pub goal: BigInt,
}

impl CfState {
    pub fn from_val(v: &Val) -> Result<CfState, ConversionError> {
        let shape = || ConversionError::Shape { expected: "a crowdfunding State", found: v.to_string() };
        let Val::Constr { ind, args, .. } = v else { return Err(shape()) };
        let [bal, don, own, dl, done, goal] = args.as_slice() else { return Err(shape()) };
        if ind != "State" {
            return Err(shape());
        }
        let nat_of = |x: &Val| match x {
            Val::Prim(crate::prim::PrimVal::Nat(n)) => u64::try_from(n).map_err(|_| shape()),
            _ => Err(shape()),
        };
        let done = match done {
            Val::Constr { ind, ctor, .. } if ind == "Bool" => ctor == "True",
            _ => return Err(shape()),
        };
        Ok(CfState {
            balance: int_of(bal)?,
            donations: don.clone(),
            owner: nat_of(own)?,
            deadline: nat_of(dl)?,
            done,
            goal: int_of(goal)?,
        })
    }

    pub fn donation_of(&self, a: Address) -> Result<Option<BigInt>, ConversionError> {
        programs::map_lookup(&self.donations, &crate::prim::PrimVal::nat(a))
    }
}

/// Unless the campaign is done, the recorded donations sum to the recorded
/// balance.
pub fn consistent_balance(lstate: &Val) -> Result<bool, ConversionError> {
    let s = CfState::from_val(lstate)?;
    Ok(s.done || programs::sum_map(&s.donations)? == s.balance)
}

/// The contract's account holds at least the balance its state records.
pub fn cf_backed(st: &ChainState, cf: Address) -> Result<bool, ConversionError> {
    let Some(v) = st.local_state(cf) else { return Ok(true) };
    Ok(st.balance(cf) >= CfState::from_val(v)?.balance)
}

/// Addresses of deployed crowdfunding-shaped contracts.
pub fn crowdfunding_addresses(st: &ChainState) -> Vec<Address> {
    st.contracts.iter().filter(|(_, c)| c.spec.name.starts_with("crowdfunding")).map(|(a, _)| *a).collect()
}

/// `consistent_balance` for every crowdfunding contract of the state.
pub fn all_consistent(st: &ChainState) -> bool {
    crowdfunding_addresses(st)
        .iter()
        .all(|a| st.local_state(*a).is_some_and(|v| consistent_balance(v).unwrap_or(false)))
}

/// `cf_backed` for every crowdfunding contract of the state.
pub fn all_backed(st: &ChainState) -> bool {
    crowdfunding_addresses(st).iter().all(|a| cf_backed(st, *a).unwrap_or(false))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub header: BlockHeader,
    pub actions: Vec<Action>,
}

/// A genesis state and the blocks applied to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub initial: ChainState,
    pub blocks: Vec<Block>,
}

impl Trace {
    pub fn new(initial: ChainState) -> Self {
        Trace { initial, blocks: Vec::new() }
    }

    /// Every state along the trace, the genesis state first.
    pub fn replay(&self, cfg: &ChainConfig) -> Result<Vec<ChainState>, (usize, BlockFailure)> {
        let mut states = vec![self.initial.clone()];
        let mut cur = self.initial.clone();
        for (i, b) in self.blocks.iter().enumerate() {
            cur.add_block(cfg, &b.header, &b.actions).map_err(|e| (i, e))?;
            states.push(cur.clone());
        }
        Ok(states)
    }

    pub fn final_state(&self, cfg: &ChainConfig) -> Result<ChainState, (usize, BlockFailure)> {
        Ok(self.replay(cfg)?.pop().expect("genesis state"))
    }

    /// Trace dump: per block, the header, the actions, and the resulting
    /// balances and local states.
    pub fn to_json(&self, cfg: &ChainConfig) -> serde_json::Value {
        use serde_json::json;
        let dump_state = |st: &ChainState| {
            json!({
                "slot": st.slot,
                "balances": st.balances.iter().map(|(a, b)| (a.to_string(), json!(b.to_string()))).collect::<serde_json::Map<_, _>>(),
                "contracts": st.contracts.iter().map(|(a, c)| (a.to_string(), json!({
                    "contract": c.spec.name,
                    "state": crate::interp::from_val(&c.state).map(|e| pretty_expr(&e)),
                }))).collect::<serde_json::Map<_, _>>(),
            })
        };
        let states = self.replay(cfg).unwrap_or_default();
        json!({
            "genesis": dump_state(&self.initial),
            "blocks": self.blocks.iter().enumerate().map(|(i, b)| json!({
                "slot": b.header.slot,
                "actions": b.actions.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                "after": states.get(i + 1).map(dump_state),
            })).collect::<Vec<_>>(),
        })
    }
}

/// The first state along the trace violating `inv`: its position (0 is
/// genesis) and the state itself.
pub fn check_invariant(
    tr: &Trace,
    cfg: &ChainConfig,
    inv: impl Fn(&ChainState) -> bool,
) -> Result<Option<(usize, ChainState)>, (usize, BlockFailure)> {
    Ok(tr.replay(cfg)?.into_iter().enumerate().find(|(_, st)| !inv(st)))
}

#[cfg(test)]
mod tests;
