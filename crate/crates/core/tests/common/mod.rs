//! Random Imp syntax for property tests.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use proptest::prelude::*;

use imp_slice_core::{ArithExpr, ArithOp, BoolExpr, CmpOp, Command, PartialArithExpr, PartialBoolExpr, PartialCommand};

pub const NAMES: [&str; 5] = ["x", "y", "z", "w", "acc1"];

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Every `foo.imp` in the corpus with the text of its `foo.state`.
pub fn corpus() -> Vec<(String, String, String)> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "imp"))
        .collect();
    entries.sort();
    entries
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let program = std::fs::read_to_string(&p).unwrap();
            let state = std::fs::read_to_string(p.with_extension("state")).unwrap();
            (name, program, state)
        })
        .collect()
}

fn name() -> impl Strategy<Value = String> {
    prop::sample::select(&NAMES[..]).prop_map(str::to_owned)
}

fn arith_op() -> impl Strategy<Value = ArithOp> {
    prop_oneof![Just(ArithOp::Add), Just(ArithOp::Sub), Just(ArithOp::Mul)]
}

fn cmp_op() -> impl Strategy<Value = CmpOp> {
    prop_oneof![Just(CmpOp::Eq), Just(CmpOp::Leq)]
}

pub fn arith(depth: u32) -> impl Strategy<Value = ArithExpr> {
    let leaf = prop_oneof![(0u64..20).prop_map(ArithExpr::Nat), name().prop_map(ArithExpr::Var)];
    leaf.prop_recursive(depth, 16, 2, |inner| {
        (arith_op(), inner.clone(), inner).prop_map(|(op, l, r)| ArithExpr::Bin {
            op,
            lhs: Box::new(l),
            rhs: Box::new(r),
        })
    })
}

pub fn boolean(depth: u32) -> impl Strategy<Value = BoolExpr> {
    let a = depth.saturating_sub(1);
    let leaf = prop_oneof![
        Just(BoolExpr::True),
        Just(BoolExpr::False),
        (cmp_op(), arith(a), arith(a)).prop_map(|(op, l, r)| BoolExpr::Cmp {
            op,
            lhs: Box::new(l),
            rhs: Box::new(r),
        }),
    ];
    leaf.prop_recursive(depth, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|b| BoolExpr::Not(Box::new(b))),
            (inner.clone(), inner).prop_map(|(l, r)| BoolExpr::And(Box::new(l), Box::new(r))),
        ]
    })
}

/// Commands whose syntax tree (including expressions) is at most `depth`
/// constructors deep.
pub fn command(depth: u32) -> BoxedStrategy<Command> {
    let e = depth.saturating_sub(1);
    let leaf = prop_oneof![
        Just(Command::Skip),
        (name(), arith(e)).prop_map(|(var, expr)| Command::Assign { var, expr }),
    ]
    .boxed();
    if depth <= 1 {
        return prop_oneof![
            Just(Command::Skip),
            name().prop_map(|var| Command::Assign {
                var,
                expr: ArithExpr::Nat(0)
            })
        ]
        .boxed();
    }
    let inner = command(depth - 1);
    prop_oneof![
        2 => leaf,
        1 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Command::Seq(Box::new(a), Box::new(b))),
        1 => (boolean(e), inner.clone(), inner.clone()).prop_map(|(cond, t, f)| Command::If {
            cond,
            then_branch: Box::new(t),
            else_branch: Box::new(f),
        }),
        1 => (boolean(e), inner).prop_map(|(cond, body)| Command::While { cond, body: Box::new(body) }),
    ]
    .boxed()
}

pub fn partial_arith(depth: u32) -> impl Strategy<Value = PartialArithExpr> {
    let leaf = prop_oneof![
        Just(PartialArithExpr::Hole),
        (0u64..20).prop_map(PartialArithExpr::Nat),
        name().prop_map(PartialArithExpr::Var),
    ];
    leaf.prop_recursive(depth, 16, 2, |inner| {
        (arith_op(), inner.clone(), inner).prop_map(|(op, l, r)| PartialArithExpr::bin(op, l, r))
    })
}

pub fn partial_bool(depth: u32) -> impl Strategy<Value = PartialBoolExpr> {
    let a = depth.saturating_sub(1);
    let leaf = prop_oneof![
        Just(PartialBoolExpr::Hole),
        Just(PartialBoolExpr::True),
        Just(PartialBoolExpr::False),
        (cmp_op(), partial_arith(a), partial_arith(a)).prop_map(|(op, l, r)| PartialBoolExpr::cmp(op, l, r)),
    ];
    leaf.prop_recursive(depth, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|b| PartialBoolExpr::Not(Box::new(b))),
            (inner.clone(), inner).prop_map(|(l, r)| PartialBoolExpr::And(Box::new(l), Box::new(r))),
        ]
    })
}

pub fn partial_command(depth: u32) -> BoxedStrategy<PartialCommand> {
    let e = depth.saturating_sub(1);
    let leaf = prop_oneof![
        Just(PartialCommand::Hole),
        Just(PartialCommand::Skip),
        (name(), partial_arith(e)).prop_map(|(var, expr)| PartialCommand::assign(var, expr)),
    ]
    .boxed();
    if depth <= 1 {
        return prop_oneof![Just(PartialCommand::Hole), Just(PartialCommand::Skip)].boxed();
    }
    let inner = partial_command(depth - 1);
    prop_oneof![
        2 => leaf,
        1 => (inner.clone(), inner.clone()).prop_map(|(a, b)| PartialCommand::seq(a, b)),
        1 => (partial_bool(e), inner.clone(), inner.clone())
            .prop_map(|(cond, t, f)| PartialCommand::if_then_else(cond, t, f)),
        1 => (partial_bool(e), inner).prop_map(|(cond, body)| PartialCommand::while_do(cond, body)),
    ]
    .boxed()
}
