use std::collections::BTreeMap;

use proptest::prelude::*;
use xc_core::*;

fn d(i: u64) -> DeviceId {
    DeviceId(i)
}

fn int(i: i64) -> LocalValue {
    LocalValue::Int(i)
}

fn nv(default: i64, over: &[(u64, i64)]) -> NValue {
    NValue::new(int(default), over.iter().map(|(k, v)| (d(*k), int(*v))))
}

fn call(f: &str, args: Vec<Expr>) -> Expr {
    Expr::call(f, args)
}

fn run(dev: u64, env: &TreeEnv, e: &Expr) -> (NValue, ValueTree) {
    evaluate(d(dev), env, &SensorState::default(), &annotate(e)).unwrap()
}

fn env_of(trees: &[(u64, &ValueTree)]) -> TreeEnv {
    trees.iter().map(|(k, t)| (d(*k), (*t).clone())).collect()
}

/// `exchange(init, (n) => pair(ret, send))` with `ret` and `send` in terms of `n`.
fn exchange(init: Expr, ret: Expr, send: Expr) -> Expr {
    call(
        "exchange",
        vec![init, Expr::fun("f", &["n"], call("pair", vec![ret, send]))],
    )
}

#[test]
fn literals_evaluate_to_themselves() {
    let (w, t) = run(1, &TreeEnv::new(), &Expr::lit(5i64));
    assert_eq!(w, lift_local(int(5)));
    assert!(t.is_empty());
    let lit = nv(3, &[(1, 4)]);
    let (w, t) = run(1, &TreeEnv::new(), &Expr::NLit(lit.clone()));
    assert_eq!(w, lit);
    assert!(t.is_empty());
}

#[test]
fn val_tree_has_two_children() {
    let e = Expr::val("x", Expr::lit(1i64), Expr::var("x"));
    let (w, t) = run(1, &TreeEnv::new(), &e);
    assert_eq!(w, lift_local(int(1)));
    assert_eq!(
        t,
        ValueTree::plain(vec![ValueTree::empty(), ValueTree::empty()])
    );
}

#[test]
fn project_child_drops_missing_children() {
    let a = ValueTree::tagged(lift_local(int(1)), vec![]);
    let b = ValueTree::tagged(lift_local(int(2)), vec![]);
    let env = env_of(&[(1, &ValueTree::plain(vec![a, b.clone()]))]);
    assert_eq!(project_child(&env, 2), env_of(&[(1, &b)]));
    let short = env_of(&[(1, &ValueTree::plain(vec![]))]);
    assert!(project_child(&short, 1).is_empty());
    assert!(project_child(&TreeEnv::new(), 3).is_empty());
}

#[test]
fn project_fun_filters_by_name() {
    let g = LocalValue::Builtin(Builtin::Add);
    let f = LocalValue::Builtin(Builtin::Mul);
    let tg = ValueTree::tagged(lift_local(g), vec![]);
    let tf = ValueTree::tagged(lift_local(f.clone()), vec![]);
    let env = env_of(&[(1, &tg), (2, &tf)]);
    assert_eq!(project_fun(&env, d(9), &f), env_of(&[(2, &tf)]));
    assert!(project_fun(&TreeEnv::new(), d(9), &f).is_empty());
}

#[test]
fn closures_with_equal_annotation_align() {
    // Two closures from the same `fun` under different captured values.
    let prog = annotate(&Expr::fun("g", &[], Expr::var("y")));
    let close = |v: i64| {
        let e = Expr::val("y", Expr::lit(v), prog.clone());
        evaluate(d(1), &TreeEnv::new(), &SensorState::default(), &e)
            .unwrap()
            .0
            .default_value()
            .clone()
    };
    let (c1, c2) = (close(1), close(2));
    let env = env_of(&[
        (1, &ValueTree::tagged(lift_local(c1.clone()), vec![])),
        (2, &ValueTree::tagged(lift_local(c2), vec![])),
    ]);
    assert_eq!(project_fun(&env, d(3), &c1).len(), 2);
}

/// Tree a neighbour exports for `exchange(0, f)` after sending `send`.
fn exchange_tree(send: NValue) -> ValueTree {
    let aux = ValueTree::tagged(send, vec![]);
    ValueTree::tagged(
        lift_local(LocalValue::Builtin(Builtin::Exchange)),
        vec![
            ValueTree::empty(),
            ValueTree::empty(),
            ValueTree::empty(),
            aux,
        ],
    )
}

#[test]
fn exchange_collects_messages_addressed_to_self() {
    let e = exchange(Expr::lit(0i64), Expr::var("n"), Expr::var("n"));
    let t4 = exchange_tree(nv(9, &[(3, 1)]));
    let t3 = exchange_tree(nv(2, &[]));
    let t2 = exchange_tree(nv(0, &[(3, 3), (1, 7)]));
    let env = env_of(&[(4, &t4), (3, &t3), (2, &t2)]);
    let (w, _) = run(3, &env, &e);
    assert!(w.lookup_eq(&nv(0, &[(4, 1), (3, 2), (2, 3)])));
}

#[test]
fn exchange_alone_sees_defaults() {
    let e = exchange(Expr::lit(7i64), Expr::var("n"), Expr::var("n"));
    let (w, t) = run(1, &TreeEnv::new(), &e);
    assert_eq!(w, nv(7, &[]));
    assert_eq!(t.children().last().unwrap().tag(), Some(&nv(7, &[])));
}

#[test]
fn exchange_with_own_message_counts_rounds() {
    let e = exchange(
        Expr::lit(0i64),
        Expr::var("n"),
        call("add", vec![Expr::var("n"), Expr::lit(1i64)]),
    );
    let mut prev: Option<ValueTree> = None;
    for round in 0..5 {
        let env = prev.iter().map(|t| (d(1), t.clone())).collect();
        let (w, t) = run(1, &env, &e);
        assert_eq!(w.get(d(1)), &int(round));
        prev = Some(t);
    }
}

fn nfold_program(w: NValue, init: i64) -> Expr {
    call(
        "nfold",
        vec![Expr::var("mul"), Expr::NLit(w), Expr::lit(init)],
    )
}

#[test]
fn nfold_folds_over_aligned_neighbours() {
    let w = nv(1, &[(1, 2), (3, 5), (4, 7)]);
    let e = nfold_program(w.clone(), 1);
    let alone: Vec<ValueTree> = [1, 3, 4]
        .iter()
        .map(|i| run(*i, &TreeEnv::new(), &e).1)
        .collect();
    let env = env_of(&[(1, &alone[0]), (3, &alone[1]), (4, &alone[2])]);
    assert_eq!(run(2, &env, &e).0, nv(2 * 5 * 7, &[]));
    assert_eq!(run(2, &TreeEnv::new(), &e).0, nv(1, &[]));

    let w = nv(2, &[(1, 3)]);
    let e = nfold_program(w, 1);
    let t1 = run(1, &TreeEnv::new(), &e).1;
    let t3 = run(3, &TreeEnv::new(), &e).1;
    assert_eq!(run(2, &env_of(&[(1, &t1), (3, &t3)]), &e).0, nv(6, &[]));
}

#[test]
fn local_builtins() {
    let env = TreeEnv::new();
    let e = call("self", vec![Expr::NLit(nv(0, &[(1, 7)]))]);
    assert_eq!(run(1, &env, &e).0, nv(7, &[]));
    let e = call("updateSelf", vec![Expr::NLit(nv(0, &[])), Expr::lit(5i64)]);
    assert!(run(1, &env, &e).0.lookup_eq(&nv(0, &[(1, 5)])));
    let e = call("uid", vec![]);
    assert_eq!(run(4, &env, &e).0, lift_local(LocalValue::Device(d(4))));
    let cond = NValue::new(true.into(), [(d(1), false.into())]);
    let e = call(
        "mux",
        vec![Expr::NLit(cond), Expr::lit(1i64), Expr::lit(2i64)],
    );
    assert!(run(3, &env, &e).0.lookup_eq(&nv(1, &[(1, 2)])));
}

#[test]
fn mux_rejects_non_boolean_condition() {
    let e = call(
        "mux",
        vec![Expr::lit(1i64), Expr::lit(1i64), Expr::lit(2i64)],
    );
    let err = evaluate(
        d(1),
        &TreeEnv::new(),
        &SensorState::default(),
        &annotate(&e),
    );
    assert!(matches!(err, Err(EvalError::Type { .. })));
}

#[test]
fn applying_data_is_an_error() {
    let e = Expr::app(Expr::lit(3i64), vec![]);
    let err = evaluate(d(1), &TreeEnv::new(), &SensorState::default(), &e);
    assert_eq!(err, Err(EvalError::NotAFunction("int")));
    let err = evaluate(
        d(1),
        &TreeEnv::new(),
        &SensorState::default(),
        &Expr::var("nope"),
    );
    assert_eq!(err, Err(EvalError::Unbound("nope".into())));
}

fn spawn_program(keys: Expr, status: Expr) -> Expr {
    call(
        "spawn",
        vec![
            Expr::fun("p", &["k"], call("pair", vec![Expr::var("k"), status])),
            keys,
        ],
    )
}

#[test]
fn spawn_without_keys_is_empty() {
    let e = spawn_program(call("set", vec![]), Expr::lit(true));
    let (w, t) = run(1, &TreeEnv::new(), &e);
    assert_eq!(w, lift_local(LocalValue::map([])));
    let aux = t.children().last().unwrap();
    assert_eq!(aux.entries(), Some(&BTreeMap::new()));
}

#[test]
fn spawn_propagates_along_true_statuses() {
    let gen = |on: bool| {
        spawn_program(
            call(
                "mux",
                vec![
                    Expr::lit(on),
                    call("set", vec![Expr::lit("a")]),
                    call("set", vec![]),
                ],
            ),
            Expr::NLit(NValue::new(true.into(), [(d(3), false.into())])),
        )
    };
    let (w1, t1) = run(1, &TreeEnv::new(), &gen(true));
    assert_eq!(w1.get(d(1)).as_map().unwrap().len(), 1);
    let env = env_of(&[(1, &t1)]);
    let (w2, _) = run(2, &env, &gen(false));
    let m = w2.get(d(2)).as_map().unwrap().clone();
    assert_eq!(m.get(&LocalValue::text("a")), Some(&LocalValue::text("a")));
    let (w3, _) = run(3, &env, &gen(false));
    assert!(w3.get(d(3)).as_map().unwrap().is_empty());
}

#[test]
fn counter_restarts_per_spawn_instance() {
    let counter = exchange(
        Expr::lit(0i64),
        call(
            "add",
            vec![call("self", vec![Expr::var("n")]), Expr::lit(1i64)],
        ),
        call(
            "add",
            vec![call("self", vec![Expr::var("n")]), Expr::lit(1i64)],
        ),
    );
    let e = call(
        "spawn",
        vec![
            Expr::fun("p", &["k"], call("pair", vec![counter, Expr::lit(true)])),
            call("set", vec![Expr::NLit(NValue::local(LocalValue::Unit))]),
        ],
    );
    let e = Expr::val("e", Expr::lit(0i64), e);
    let prog = annotate(&e);
    let mut prev = TreeEnv::new();
    let keyed = |key: i64, prev: &TreeEnv| {
        let p = match &prog {
            Expr::Val(x, a, b) => {
                let b = match &**b {
                    Expr::App(f, args) => Expr::App(
                        f.clone(),
                        vec![args[0].clone(), call("set", vec![Expr::lit(key)])],
                    ),
                    _ => unreachable!(),
                };
                Expr::Val(x.clone(), a.clone(), Box::new(b))
            }
            _ => unreachable!(),
        };
        evaluate(d(1), prev, &SensorState::default(), &p).unwrap()
    };
    let (w, t) = keyed(1, &prev);
    assert_eq!(w.get(d(1)).as_map().unwrap()[&int(1)], int(1));
    prev.insert(d(1), t);
    let (w, _) = keyed(2, &prev);
    let m = w.get(d(1)).as_map().unwrap().clone();
    assert_eq!(m[&int(1)], int(2));
    assert_eq!(m[&int(2)], int(1));
}

/// `if (uid() == 1) { exchange } else { exchange }`, desugared.
fn branching_program() -> Expr {
    let branch = |tag: i64| {
        Expr::fun(
            "b",
            &[],
            exchange(
                Expr::lit(0i64),
                call(
                    "nfold",
                    vec![Expr::var("add"), Expr::var("n"), Expr::lit(0i64)],
                ),
                Expr::lit(tag),
            ),
        )
    };
    Expr::app(
        call(
            "mux",
            vec![
                call(
                    "eq",
                    vec![call("uid", vec![]), Expr::NLit(NValue::local(d(1).into()))],
                ),
                branch(10),
                branch(20),
            ],
        ),
        vec![],
    )
}

#[test]
fn branches_do_not_exchange_with_each_other() {
    let e = branching_program();
    let t1 = run(1, &TreeEnv::new(), &e).1;
    let t2 = run(2, &TreeEnv::new(), &e).1;
    let t3 = run(3, &TreeEnv::new(), &e).1;
    let env = env_of(&[(1, &t1), (2, &t2), (3, &t3)]);
    // Device 2 takes the else branch and only hears device 3.
    assert_eq!(run(2, &env, &e).0, nv(20, &[]));
    // Device 1 is alone in the then branch.
    assert_eq!(run(1, &env, &e).0, nv(0, &[]));
}

#[test]
fn annotation_is_deterministic() {
    let e = branching_program();
    assert_eq!(annotate(&e), annotate(&e.clone()));
}

fn small_local() -> impl Strategy<Value = LocalValue> {
    prop_oneof![
        (-1000i64..1000).prop_map(LocalValue::Int),
        (-1e6f64..1e6).prop_map(LocalValue::Real),
    ]
}

proptest! {
    #[test]
    fn promotion_coherence(a in small_local(), b in small_local(), op in 0usize..7) {
        let b_op = [Builtin::Add, Builtin::Sub, Builtin::Mul, Builtin::Min, Builtin::Max,
                    Builtin::Lt, Builtin::Le][op];
        let e = call(b_op.name(), vec![Expr::Lit(a.clone()), Expr::Lit(b.clone())]);
        let (w, _) = evaluate(d(1), &TreeEnv::new(), &SensorState::default(), &e).unwrap();
        prop_assert_eq!(w, lift_local(b_op.apply_local(&[&a, &b]).unwrap()));
    }

    #[test]
    fn nfold_ignores_self(vals in proptest::collection::vec(-50i64..50, 4), own in -50i64..50) {
        let base = nv(0, &[(1, vals[0]), (3, vals[1]), (4, vals[2])]);
        let with_self = base.clone().with(d(2), int(own));
        let e = |w: NValue| nfold_program(w, vals[3]);
        let t = run(1, &TreeEnv::new(), &e(base.clone())).1;
        let env = env_of(&[(1, &t), (2, &t), (3, &t), (4, &t)]);
        prop_assert_eq!(run(2, &env, &e(base)).0, run(2, &env, &e(with_self)).0);
    }

    #[test]
    fn evaluation_is_deterministic(init in -10i64..10, sends in proptest::collection::vec(-10i64..10, 3)) {
        let e = exchange(Expr::lit(init), Expr::var("n"), Expr::var("n"));
        let trees: Vec<ValueTree> = sends.iter().map(|s| exchange_tree(nv(*s, &[]))).collect();
        let env = env_of(&[(1, &trees[0]), (2, &trees[1]), (3, &trees[2])]);
        prop_assert_eq!(run(2, &env, &e), run(2, &env, &e));
    }
}
