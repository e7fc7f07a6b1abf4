//! Random traces around a crowdfunding campaign.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    all_backed, all_consistent, contract, Action, Address, Block, BlockHeader, CfState, ChainConfig, ChainState, Trace,
    CONTRACT_BASE,
};
use crate::interp::Val;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TraceConfig {
    pub seed: u64,
    /// Upper bound on the number of blocks, deployment block included.
    pub max_blocks: usize,
    pub actors: u64,
    /// Which crowdfunding variant to deploy.
    pub contract: String,
    /// Also deploy a counter and poke it now and then.
    pub with_counter: bool,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig { seed: 0, max_blocks: 20, actors: 5, contract: "crowdfunding".into(), with_counter: true }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TraceStats {
    /// Blocks that were rejected and retried without their failing actions.
    pub failed_blocks: usize,
    pub dropped_actions: usize,
    /// Rejected blocks that nevertheless changed the state.
    pub atomicity_violations: usize,
    /// Index in `Trace::blocks` of the first block with a positive
    /// donation to the campaign.
    pub first_donating_block: Option<usize>,
    pub successful_donations: usize,
    /// Whether the campaign met its goal, once its deadline has passed.
    pub funded: Option<bool>,
}

fn msg(ind: &str, ctor: &str, args: Vec<Val>) -> Option<Val> {
    Some(Val::constr(ind, ctor, args))
}

/// A trace of at most `cfg.max_blocks` blocks. The first block deploys
/// the campaign (and the counter); later blocks mix donations, withdrawals,
/// refunds, plain transfers and some actions that must fail. A rejected
/// block is replaced by the same block minus the actions that fail.
pub fn gen_trace(cfg: &TraceConfig, chain: &ChainConfig) -> (Trace, TraceStats) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let actors: Vec<Address> = (1..=cfg.actors.clamp(1, CONTRACT_BASE - 1)).collect();
    let genesis = ChainState::genesis(actors.iter().map(|a| (*a, BigInt::from(rng.gen_range(50..=200)))));
    let mut trace = Trace::new(genesis.clone());
    let mut state = genesis;
    let mut stats = TraceStats::default();

    let cf_spec = contract(&cfg.contract).unwrap_or_else(|| panic!("unknown contract {}", cfg.contract));
    let owner = actors[0];
    let deadline: u64 = rng.gen_range(4..=15);
    let goal = BigInt::from(rng.gen_range(40..=250));
    let cf = state.peek_next_address();
    let counter = cfg.with_counter.then_some(cf + 1);
    let mut first = vec![Action::Deploy {
        from: owner,
        contract: cf_spec,
        setup: vec![Val::nat(deadline), Val::int(goal.clone())],
        amount: BigInt::from(0),
    }];
    if cfg.with_counter {
        first.push(Action::Deploy {
            from: *actors.last().unwrap(),
            contract: contract("counter").expect("counter"),
            setup: vec![Val::int(0)],
            amount: BigInt::from(0),
        });
    }
    let blocks = if cfg.max_blocks == 0 { 0 } else { rng.gen_range(1..=cfg.max_blocks) };
    let mut slot = 1;
    let mut pending = Some(first);
    for _ in 0..blocks {
        let acts = pending.take().unwrap_or_else(|| {
            let n = rng.gen_range(0..=3);
            (0..n).map(|_| random_action(&mut rng, &state, &actors, owner, cf, counter)).collect()
        });
        let hd = BlockHeader::at(slot);
        let snapshot = state.clone();
        let kept = match state.add_block(chain, &hd, &acts) {
            Ok(()) => acts,
            Err(_) => {
                stats.failed_blocks += 1;
                if state != snapshot {
                    stats.atomicity_violations += 1;
                    state = snapshot;
                }
                let mut kept: Vec<Action> = Vec::new();
                for a in &acts {
                    kept.push(a.clone());
                    if state.with_block(chain, &hd, &kept).is_err() {
                        kept.pop();
                    }
                }
                stats.dropped_actions += acts.len() - kept.len();
                state.add_block(chain, &hd, &kept).expect("block of individually checked actions");
                kept
            }
        };
        let donations = kept
            .iter()
            .filter(|a| {
                matches!(a, Action::Call { to, msg: Some(Val::Constr { ctor, .. }), amount, .. }
                if *to == cf && ctor == "Donate" && *amount > BigInt::from(0))
            })
            .count();
        if donations > 0 && stats.first_donating_block.is_none() {
            stats.first_donating_block = Some(trace.blocks.len());
        }
        stats.successful_donations += donations;
        trace.blocks.push(Block { header: hd, actions: kept });
        slot += rng.gen_range(1..=3);
    }
    if let Some(s) = state.local_state(cf).and_then(|v| CfState::from_val(v).ok()) {
        if state.slot > s.deadline {
            stats.funded = Some(s.done || s.balance >= s.goal);
        }
    }
    (trace, stats)
}

fn random_action(
    rng: &mut ChaCha8Rng,
    state: &ChainState,
    actors: &[Address],
    owner: Address,
    cf: Address,
    counter: Option<Address>,
) -> Action {
    let who = |rng: &mut ChaCha8Rng| actors[rng.gen_range(0..actors.len())];
    let zero = BigInt::from(0);
    let call = |from, to, m, amount| Action::Call { from, to, msg: m, amount };
    match rng.gen_range(0..100) {
        0..=39 => call(who(rng), cf, msg("Msg", "Donate", vec![]), BigInt::from(rng.gen_range(1..=40))),
        40..=49 => {
            let from = if rng.gen_bool(0.7) { owner } else { who(rng) };
            call(from, cf, msg("Msg", "GetFunds", vec![]), zero)
        }
        50..=64 => call(who(rng), cf, msg("Msg", "Claim", vec![]), zero),
        65..=79 => Action::Transfer { from: who(rng), to: who(rng), amount: BigInt::from(rng.gen_range(0..=30)) },
        80..=89 if counter.is_some() => {
            let ctor = if rng.gen_bool(0.5) { "Inc" } else { "Dec" };
            let n = Val::int(rng.gen_range(0..=9));
            call(who(rng), counter.unwrap(), msg("Msg", ctor, vec![n]), zero)
        }
        _ => {
            // something that has to be rejected
            let from = who(rng);
            match rng.gen_range(0..4) {
                0 => Action::Transfer { from, to: who(rng), amount: state.balance(from) + 1 },
                1 => call(from, cf, msg("Msg", "Donate", vec![]), BigInt::from(-5)),
                2 => call(from, CONTRACT_BASE + 500, msg("Msg", "Donate", vec![]), zero),
                _ => Action::Transfer { from, to: cf, amount: BigInt::from(1) },
            }
        }
    }
}

/// Checks a generated trace: the campaign invariants after every block,
/// conservation of money, and replay determinism.
pub fn trace_holds(trace: &Trace, chain: &ChainConfig) -> bool {
    let Ok(states) = trace.replay(chain) else { return false };
    let total = trace.initial.total_money();
    states.iter().all(|s| all_consistent(s) && all_backed(s) && s.total_money() == total)
        && trace.replay(chain).is_ok_and(|again| again == states)
}
