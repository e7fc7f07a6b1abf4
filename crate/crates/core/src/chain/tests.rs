use super::*;

use proptest::prelude::*;

fn cfg() -> ChainConfig {
    ChainConfig::default()
}

fn money(n: i64) -> BigInt {
    BigInt::from(n)
}

fn cf_msg(ctor: &str) -> Option<Val> {
    Some(Val::constr("Msg", ctor, vec![]))
}

fn call(from: Address, to: Address, ctor: &str, amount: i64) -> Action {
    Action::Call { from, to, msg: cf_msg(ctor), amount: money(amount) }
}

/// Accounts 1..=4 with 100 each, and a campaign owned by 1 deployed at slot 1.
fn campaign(deadline: u64, goal: i64) -> (ChainState, Address) {
    let mut st = ChainState::genesis((1..=4).map(|a| (a, money(100))));
    let addr = st.peek_next_address();
    let deploy = Action::Deploy {
        from: 1,
        contract: contract("crowdfunding").unwrap(),
        setup: vec![Val::nat(deadline), Val::int(goal)],
        amount: money(0),
    };
    st.add_block(&cfg(), &BlockHeader::at(1), &[deploy]).unwrap();
    (st, addr)
}

fn cf(st: &ChainState, a: Address) -> CfState {
    CfState::from_val(st.local_state(a).unwrap()).unwrap()
}

#[test]
fn deployment_records_setup() {
    let (st, a) = campaign(10, 50);
    assert_eq!(a, CONTRACT_BASE);
    let s = cf(&st, a);
    assert_eq!((s.owner, s.deadline, s.done), (1, 10, false));
    assert_eq!((s.balance, s.goal), (money(0), money(50)));
    assert!(programs::map_bindings(&s.donations).unwrap().is_empty());
}

#[test]
fn refund_after_deadline_when_unfunded() {
    let (mut st, a) = campaign(5, 100);
    st.add_block(&cfg(), &BlockHeader::at(2), &[call(2, a, "Donate", 30)]).unwrap();
    assert_eq!(st.balance(2), money(70));
    // too early
    assert!(st.with_block(&cfg(), &BlockHeader::at(4), &[call(2, a, "Claim", 0)]).is_err());
    st.add_block(&cfg(), &BlockHeader::at(7), &[call(2, a, "Claim", 0)]).unwrap();
    assert_eq!(st.balance(2), money(100));
    assert_eq!(st.balance(a), money(0));
    let s = cf(&st, a);
    assert_eq!(s.balance, money(0));
    assert_eq!(s.donation_of(2).unwrap(), Some(money(0)));
    assert!(consistent_balance(st.local_state(a).unwrap()).unwrap());
    // the owner cannot collect an unfunded campaign
    assert!(st.with_block(&cfg(), &BlockHeader::at(8), &[call(1, a, "GetFunds", 0)]).is_err());
}

#[test]
fn donations_are_recorded_exactly() {
    let (mut st, a) = campaign(10, 100);
    st.add_block(&cfg(), &BlockHeader::at(2), &[call(3, a, "Donate", 17)]).unwrap();
    assert_eq!(cf(&st, a).donation_of(3).unwrap(), Some(money(17)));
    st.add_block(&cfg(), &BlockHeader::at(3), &[call(3, a, "Donate", 8), call(4, a, "Donate", 1)]).unwrap();
    let s = cf(&st, a);
    assert_eq!(s.donation_of(3).unwrap(), Some(money(25)));
    assert_eq!(s.donation_of(4).unwrap(), Some(money(1)));
    assert_eq!(s.donation_of(2).unwrap(), None);
    assert_eq!(s.balance, money(26));
    assert_eq!(st.balance(a), money(26));
}

#[test]
fn late_donation_is_rejected() {
    let (st, a) = campaign(3, 100);
    let err = st.with_block(&cfg(), &BlockHeader::at(4), &[call(2, a, "Donate", 5)]).unwrap_err();
    assert_eq!(err.reason, FailReason::Rejected(a));
}

#[test]
fn no_claims_after_funds_are_collected() {
    let (mut st, a) = campaign(5, 50);
    st.add_block(&cfg(), &BlockHeader::at(2), &[call(2, a, "Donate", 30), call(3, a, "Donate", 25)]).unwrap();
    // only the owner may collect
    assert!(st.with_block(&cfg(), &BlockHeader::at(6), &[call(2, a, "GetFunds", 0)]).is_err());
    st.add_block(&cfg(), &BlockHeader::at(6), &[call(1, a, "GetFunds", 0)]).unwrap();
    assert_eq!(st.balance(1), money(155));
    assert_eq!(st.balance(a), money(0));
    assert!(cf(&st, a).done);
    for donor in [2, 3] {
        let err = st.with_block(&cfg(), &BlockHeader::at(7), &[call(donor, a, "Claim", 0)]).unwrap_err();
        assert_eq!(err.reason, FailReason::Rejected(a));
    }
}

#[test]
fn failing_block_changes_nothing() {
    let (mut st, a) = campaign(10, 50);
    let before = st.clone();
    let acts = [call(2, a, "Donate", 10), Action::Transfer { from: 3, to: 4, amount: money(1_000) }];
    let err = st.add_block(&cfg(), &BlockHeader::at(2), &acts).unwrap_err();
    assert_eq!(err.action, 1);
    assert!(matches!(err.reason, FailReason::InsufficientBalance { addr: 3, .. }));
    assert_eq!(st, before);
}

#[test]
fn block_errors() {
    let (st, a) = campaign(10, 50);
    let reason = |slot, acts: &[Action]| st.with_block(&cfg(), &BlockHeader::at(slot), acts).unwrap_err().reason;
    assert_eq!(reason(1, &[]), FailReason::SlotNotIncreasing { prev: 1, got: 1 });
    assert_eq!(reason(2, &[call(2, a, "Donate", -1)]), FailReason::NegativeAmount(money(-1)));
    assert_eq!(reason(2, &[call(2, 77_777, "Donate", 1)]), FailReason::UnknownContract(77_777));
    assert_eq!(reason(2, &[Action::Transfer { from: 2, to: a, amount: money(1) }]), FailReason::MessageRequired(a));
    assert_eq!(
        reason(2, &[Action::Call { from: 2, to: a, msg: None, amount: money(1) }]),
        FailReason::MessageRequired(a)
    );
    let wrong = Action::Call { from: 2, to: a, msg: Some(Val::int(3)), amount: money(0) };
    assert!(matches!(reason(2, &[wrong]), FailReason::Eval { .. }));
    assert!(st.with_block(&cfg(), &BlockHeader::at(2), &[]).is_ok());
}

#[test]
fn emitted_actions_count_against_the_depth_limit() {
    let (mut st, a) = campaign(2, 100);
    st.add_block(&cfg(), &BlockHeader::at(2), &[call(2, a, "Donate", 30)]).unwrap();
    let shallow = ChainConfig { depth_limit: 0, ..cfg() };
    let err = st.with_block(&shallow, &BlockHeader::at(5), &[call(2, a, "Claim", 0)]).unwrap_err();
    assert_eq!(err.reason, FailReason::DepthExceeded(0));
    assert!(st.with_block(&cfg(), &BlockHeader::at(5), &[call(2, a, "Claim", 0)]).is_ok());
}

#[test]
fn fuel_bounds_contract_calls() {
    let (st, a) = campaign(10, 50);
    let starved = ChainConfig { fuel: 3, ..cfg() };
    let err = st.with_block(&starved, &BlockHeader::at(2), &[call(2, a, "Donate", 1)]).unwrap_err();
    assert_eq!(err.reason, FailReason::Eval { addr: a, err: EvalFailure::NotEnoughFuel });
}

#[test]
fn counter_on_chain() {
    let mut st = ChainState::genesis([(1, money(10))]);
    let c = st.peek_next_address();
    let deploy =
        Action::Deploy { from: 1, contract: contract("counter").unwrap(), setup: vec![Val::int(5)], amount: money(0) };
    st.add_block(&cfg(), &BlockHeader::at(1), &[deploy]).unwrap();
    let poke = |ctor: &str, n: i64| Action::Call {
        from: 1,
        to: c,
        msg: Some(Val::constr("Msg", ctor, vec![Val::int(n)])),
        amount: money(0),
    };
    st.add_block(&cfg(), &BlockHeader::at(2), &[poke("Inc", 7), poke("Dec", 3)]).unwrap();
    assert_eq!(st.local_state(c), Some(&Val::constr("CState", "CState", vec![Val::int(9), Val::nat(1u8)])));
}

#[test]
fn consistent_balance_on_sample_states() {
    let env = &programs::crowdfunding().env;
    let sample = crate::interp::eval_closed(env, 1_000, &Expr::constant("sample")).unwrap();
    assert!(consistent_balance(&sample).unwrap());
    let r = super::apply(
        env,
        10_000,
        &Expr::constant("receive_double"),
        vec![chain_view(3), call_context(4, &money(20), 100), cf_msg("Donate").unwrap(), sample.clone()],
    )
    .unwrap();
    let Val::Constr { args, .. } = &r else { panic!() };
    let Val::Constr { args: pair, .. } = &args[1] else { panic!() };
    assert!(!consistent_balance(&pair[2]).unwrap());
    assert!(consistent_balance(&Val::int(1)).is_err());
}

fn cf_state(balance: i64, donations: &[(u64, i64)], done: bool) -> Val {
    Val::constr(
        "State",
        "mkState",
        vec![
            Val::int(balance),
            programs::to_acorn_map(donations),
            Val::nat(1u8),
            Val::nat(10u8),
            Val::boolean(done),
            Val::int(50),
        ],
    )
}

#[test]
fn consistent_balance_examples() {
    assert!(consistent_balance(&cf_state(20, &[(2, 20)], false)).unwrap());
    assert!(!consistent_balance(&cf_state(20, &[(2, 10)], false)).unwrap());
    // once the owner has collected, the map no longer has to add up
    assert!(consistent_balance(&cf_state(20, &[(2, 10)], true)).unwrap());
    assert!(consistent_balance(&cf_state(0, &[], false)).unwrap());
}

#[test]
fn deploy_and_donate_in_one_block() {
    let mut st = ChainState::genesis((1..=2).map(|a| (a, money(100))));
    let a = st.peek_next_address();
    let deploy = Action::Deploy {
        from: 1,
        contract: contract("crowdfunding").unwrap(),
        setup: vec![Val::nat(5u8), Val::int(50)],
        amount: money(0),
    };
    st.add_block(&cfg(), &BlockHeader::at(1), &[deploy, call(2, a, "Donate", 20)]).unwrap();
    assert_eq!(cf(&st, a).donation_of(2).unwrap(), Some(money(20)));
    assert_eq!(st.balance(a), money(20));
    assert!(cf_backed(&st, a).unwrap());
}

#[test]
fn only_the_owner_collects() {
    let (mut st, a) = campaign(3, 20);
    st.add_block(&cfg(), &BlockHeader::at(2), &[call(2, a, "Donate", 30)]).unwrap();
    let before = st.clone();
    let err = st.add_block(&cfg(), &BlockHeader::at(5), &[call(3, a, "GetFunds", 0)]).unwrap_err();
    assert_eq!(err.reason, FailReason::Rejected(a));
    assert_eq!(st, before);
    st.add_block(&cfg(), &BlockHeader::at(5), &[call(1, a, "GetFunds", 0)]).unwrap();
    assert_eq!(st.balance(1), money(130));
    assert!(cf(&st, a).done);
}

#[test]
fn zero_blocks_is_genesis_only() {
    let (tr, st) = gen_trace(&TraceConfig { seed: 9, max_blocks: 0, ..Default::default() }, &cfg());
    assert!(tr.blocks.is_empty());
    assert_eq!(tr.replay(&cfg()).unwrap(), vec![tr.initial.clone()]);
    assert_eq!(st, TraceStats::default());
    assert!(trace_holds(&tr, &cfg()));
}

#[test]
fn generated_traces_keep_the_invariants() {
    let (mut funded, mut unfunded) = (0, 0);
    for seed in 0..100 {
        let (tr, st) = gen_trace(&TraceConfig { seed, ..Default::default() }, &cfg());
        assert!(tr.blocks.len() <= 20);
        assert_eq!(st.atomicity_violations, 0);
        assert!(trace_holds(&tr, &cfg()), "seed {seed}");
        match st.funded {
            Some(true) => funded += 1,
            Some(false) => unfunded += 1,
            None => {}
        }
    }
    assert!(funded > 0 && unfunded > 0, "{funded} funded, {unfunded} unfunded");
}

#[test]
fn traces_exercise_failures() {
    let failed: usize =
        (0..50).map(|seed| gen_trace(&TraceConfig { seed, ..Default::default() }, &cfg()).1.failed_blocks).sum();
    assert!(failed > 0);
}

#[test]
fn trace_generation_is_seeded() {
    let c = TraceConfig { seed: 42, ..Default::default() };
    assert_eq!(gen_trace(&c, &cfg()), gen_trace(&c, &cfg()));
    let (tr, _) = gen_trace(&c, &cfg());
    assert_eq!(tr.to_json(&cfg()), tr.to_json(&cfg()));
    assert_ne!(gen_trace(&TraceConfig { seed: 43, ..c.clone() }, &cfg()).0, tr);
}

#[test]
fn mutant_is_caught_in_its_first_donating_block() {
    let mut caught = 0;
    for seed in 0..100 {
        let c = TraceConfig { seed, contract: "crowdfunding_double".into(), ..Default::default() };
        let (tr, st) = gen_trace(&c, &cfg());
        let first = check_invariant(&tr, &cfg(), all_consistent).unwrap().map(|(i, _)| i);
        // state i + 1 is the one after block i
        assert_eq!(first, st.first_donating_block.map(|b| b + 1), "seed {seed}");
        caught += first.is_some() as usize;
    }
    assert!(caught > 50);
}

#[test]
fn trace_json_lists_states() {
    let (tr, _) = gen_trace(&TraceConfig { seed: 1, ..Default::default() }, &cfg());
    let j = tr.to_json(&cfg());
    let blocks = j["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), tr.blocks.len());
    assert!(blocks[0]["after"]["contracts"][CONTRACT_BASE.to_string()]["state"]
        .as_str()
        .unwrap()
        .contains("State.mkState"));
}

#[test]
fn scenario_file() {
    let src = r#"{
        "accounts": [{"address": 1, "balance": 100}, {"address": 2, "balance": 50}],
        "blocks": [
            {"slot": 1, "actions": [{"deploy": {"name": "cf", "contract": "crowdfunding", "from": 1, "setup": ["5", "40z"]}},
                                    {"call": {"from": 2, "to": "cf", "msg": "Donate", "amount": 10}}]},
            {"slot": 2, "actions": [{"transfer": {"from": 2, "to": 1, "amount": 500}}]},
            {"slot": 3, "actions": [{"call": {"from": 2, "to": "cf", "msg": "Donate", "amount": 30}}]},
            {"slot": 9, "actions": [{"call": {"from": 1, "to": "cf", "msg": "GetFunds"}}]}
        ],
        "generate": {"traces": 5, "seed": 3}
    }"#;
    let sc: Scenario = serde_json::from_str(src).unwrap();
    let out = run_scenario(&sc, &cfg()).unwrap();
    assert!(out.clean(), "{out:?}");
    let errs: Vec<bool> = out.blocks.iter().map(|b| b.error.is_some()).collect();
    assert_eq!(errs, [false, true, false, false]);
    assert_eq!(out.balances[&1], "140");
    assert_eq!(out.balances[&2], "10");
    assert_eq!(out.generated.as_ref().unwrap().traces, 5);

    let bad: Scenario =
        serde_json::from_str(r#"{"blocks": [{"slot": 1, "actions": [{"call": {"from": 1, "to": "nope"}}]}]}"#).unwrap();
    assert!(matches!(run_scenario(&bad, &cfg()), Err(ScenarioError::UnknownName(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transfers_conserve_money(moves in prop::collection::vec((1u64..5, 1u64..5, -5i64..80), 0..30)) {
        let mut st = ChainState::genesis((1..5).map(|a| (a, money(50))));
        for (i, (from, to, amount)) in moves.into_iter().enumerate() {
            let before = st.clone();
            let r = st.add_block(&cfg(), &BlockHeader::at(i as u64 + 1), &[Action::Transfer { from, to, amount: money(amount) }]);
            if r.is_err() {
                prop_assert_eq!(&st, &before);
            }
            prop_assert_eq!(st.total_money(), money(200));
            prop_assert!(st.balances.values().all(|b| *b >= money(0)));
        }
    }
}
