//! Forward and backward slicing along a recorded trace.
//!
//! Forward slicing re-evaluates a partial program on a partial input state,
//! following the branch and loop decisions recorded in the trace; holes
//! propagate. Backward slicing takes a partial output state (the criterion)
//! and reconstructs the least partial program and input state whose forward
//! slice still produces it.

use serde::Serialize;
use thiserror::Error;

use crate::lattice::{JoinError, Lattice, LatticeMismatch, Position};
use crate::state::{Domain, PartialState};
use crate::syntax::{PartialArithExpr, PartialBoolExpr, PartialCommand, Value};
use crate::tracer::{ArithTrace, ArithTraceNode, BoolTrace, BoolTraceNode, CmdTrace, CmdTraceNode};

/// A backward slice: what part of the program and input explains the criterion.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SliceOutcome {
    pub input_slice: PartialState,
    pub program_slice: PartialCommand,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SliceError {
    /// The criterion asks for a value the run did not compute.
    #[error("criterion demands `{subject}` = {demanded}, but the run computed {actual}")]
    CriterionMismatch {
        subject: String,
        demanded: Value,
        actual: Value,
    },
    /// A partial term or state is not a prefix of what the trace records.
    #[error(transparent)]
    Lattice(#[from] LatticeMismatch),
    /// A forward slice was given a state inconsistent with the trace and
    /// recomputed a value that does not fit in 64 bits.
    #[error("arithmetic overflow at {position}")]
    Overflow { position: Position },
}

impl From<JoinError> for SliceError {
    fn from(e: JoinError) -> Self {
        SliceError::Lattice(e.0)
    }
}

fn mismatch(path: &[usize], partial: impl std::fmt::Display, traced: impl std::fmt::Display) -> SliceError {
    SliceError::Lattice(LatticeMismatch::new(
        path,
        format!("`{partial}` is not a prefix of the traced `{traced}`"),
    ))
}

fn with_child<T>(path: &mut Vec<usize>, i: usize, f: impl FnOnce(&mut Vec<usize>) -> T) -> T {
    path.push(i);
    let r = f(path);
    path.pop();
    r
}

// ---------------------------------------------------------------------------
// Forward slicing

/// Value of `a` under `mu` along `t`, or `None` (a hole).
pub fn fwd_aexp(t: &ArithTrace, mu: &PartialState, a: &PartialArithExpr) -> Result<Option<u64>, SliceError> {
    fwd_a(t, mu, a, &mut Vec::new())
}

fn fwd_a(
    t: &ArithTrace,
    mu: &PartialState,
    a: &PartialArithExpr,
    path: &mut Vec<usize>,
) -> Result<Option<u64>, SliceError> {
    match (a, &t.node) {
        (PartialArithExpr::Hole, _) => Ok(None),
        (PartialArithExpr::Nat(n), ArithTraceNode::Nat(m)) if n == m => Ok(Some(*n)),
        // the value comes from the partial state, not from the trace
        (PartialArithExpr::Var(x), ArithTraceNode::Var { name, .. }) if x == name => Ok(mu.lookup(x)),
        (
            PartialArithExpr::Bin { op, lhs, rhs },
            ArithTraceNode::Bin {
                op: o,
                lhs: tl,
                rhs: tr,
            },
        ) if op == o => {
            let l = with_child(path, 0, |p| fwd_a(tl, mu, lhs, p))?;
            let r = with_child(path, 1, |p| fwd_a(tr, mu, rhs, p))?;
            match (l, r) {
                (Some(l), Some(r)) => op.apply(l, r).map(Some).ok_or_else(|| SliceError::Overflow {
                    position: Position::new(path.clone()),
                }),
                _ => Ok(None),
            }
        }
        _ => Err(mismatch(path, a, t)),
    }
}

/// Truth value of `b` under `mu` along `t`, or `None` (a hole).
pub fn fwd_bexp(t: &BoolTrace, mu: &PartialState, b: &PartialBoolExpr) -> Result<Option<bool>, SliceError> {
    fwd_b(t, mu, b, &mut Vec::new())
}

fn fwd_b(
    t: &BoolTrace,
    mu: &PartialState,
    b: &PartialBoolExpr,
    path: &mut Vec<usize>,
) -> Result<Option<bool>, SliceError> {
    match (b, &t.node) {
        (PartialBoolExpr::Hole, _) => Ok(None),
        (PartialBoolExpr::True, BoolTraceNode::True) => Ok(Some(true)),
        (PartialBoolExpr::False, BoolTraceNode::False) => Ok(Some(false)),
        (
            PartialBoolExpr::Cmp { op, lhs, rhs },
            BoolTraceNode::Cmp {
                op: o,
                lhs: tl,
                rhs: tr,
            },
        ) if op == o => {
            let l = with_child(path, 0, |p| fwd_a(tl, mu, lhs, p))?;
            let r = with_child(path, 1, |p| fwd_a(tr, mu, rhs, p))?;
            Ok(l.zip(r).map(|(l, r)| op.apply(l, r)))
        }
        (PartialBoolExpr::Not(inner), BoolTraceNode::Not(t)) => {
            Ok(with_child(path, 0, |p| fwd_b(t, mu, inner, p))?.map(|v| !v))
        }
        (PartialBoolExpr::And(l, r), BoolTraceNode::And(tl, tr)) => {
            let l = with_child(path, 0, |p| fwd_b(tl, mu, l, p))?;
            let r = with_child(path, 1, |p| fwd_b(tr, mu, r, p))?;
            Ok(l.zip(r).map(|(l, r)| l && r))
        }
        _ => Err(mismatch(path, b, t)),
    }
}

/// Forward slice of the partial command `c` from the partial state `mu`
/// along the command trace `t`.
pub fn fwd_cmd(t: &CmdTrace, mu: &PartialState, c: &PartialCommand) -> Result<PartialState, SliceError> {
    if mu.domain() != t.state_in.domain() {
        return Err(SliceError::Lattice(LatticeMismatch::new(
            &[],
            format!(
                "partial state has domain [{}], the trace runs over [{}]",
                mu.domain().names().join(", "),
                t.state_in.domain().names().join(", ")
            ),
        )));
    }
    let mut out = mu.clone();
    fwd_c(t, &mut out, c, &mut Vec::new())?;
    Ok(out)
}

/// Maps every variable assigned anywhere in `t` to a hole.
fn erase_writes(t: &CmdTrace, mu: &mut PartialState) {
    match &t.node {
        CmdTraceNode::Skip | CmdTraceNode::WhileFalse { .. } => {}
        CmdTraceNode::Assign { var, .. } => mu.update_in_place(var, None),
        CmdTraceNode::Seq(t1, t2) => {
            erase_writes(t1, mu);
            erase_writes(t2, mu);
        }
        CmdTraceNode::IfTrue { branch, .. } | CmdTraceNode::IfFalse { branch, .. } => erase_writes(branch, mu),
        CmdTraceNode::WhileTrue { .. } => {
            let (unrollings, exit) = t.loop_chain();
            for u in unrollings {
                if let CmdTraceNode::WhileTrue { body, .. } = &u.node {
                    erase_writes(body, mu);
                }
            }
            erase_writes(exit, mu);
        }
    }
}

fn describe_trace(t: &CmdTrace) -> String {
    match &t.node {
        CmdTraceNode::Skip => "skip".to_owned(),
        CmdTraceNode::Assign { var, expr } => format!("{var} := {expr}"),
        CmdTraceNode::Seq(..) => "sequence".to_owned(),
        CmdTraceNode::IfTrue { cond, .. } => format!("if_true ({cond})"),
        CmdTraceNode::IfFalse { cond, .. } => format!("if_false ({cond})"),
        CmdTraceNode::WhileFalse { cond } => format!("while_false ({cond})"),
        CmdTraceNode::WhileTrue { cond, .. } => format!("while_true ({cond})"),
    }
}

fn fwd_c(t: &CmdTrace, mu: &mut PartialState, c: &PartialCommand, path: &mut Vec<usize>) -> Result<(), SliceError> {
    let mut t = t;
    loop {
        match (c, &t.node) {
            (PartialCommand::Hole, _) => erase_writes(t, mu),
            (PartialCommand::Skip, CmdTraceNode::Skip) => {}
            (PartialCommand::Assign { var, expr }, CmdTraceNode::Assign { var: x, expr: ta }) if var == x => {
                let v = with_child(path, 0, |p| fwd_a(ta, mu, expr, p))?;
                mu.update_in_place(var, v);
            }
            (PartialCommand::Seq(c1, c2), CmdTraceNode::Seq(t1, t2)) => {
                with_child(path, 0, |p| fwd_c(t1, mu, c1, p))?;
                with_child(path, 1, |p| fwd_c(t2, mu, c2, p))?;
            }
            (
                PartialCommand::If {
                    cond,
                    then_branch,
                    else_branch,
                },
                CmdTraceNode::IfTrue { cond: tb, branch } | CmdTraceNode::IfFalse { cond: tb, branch },
            ) => {
                let taken = matches!(t.node, CmdTraceNode::IfTrue { .. });
                let (index, c_branch) = if taken { (1, then_branch) } else { (2, else_branch) };
                match with_child(path, 0, |p| fwd_b(tb, mu, cond, p))? {
                    None => {
                        // still check that the branch fits the trace
                        with_child(path, index, |p| check_cmd(branch, c_branch, p))?;
                        erase_writes(branch, mu);
                    }
                    Some(v) if v == taken => with_child(path, index, |p| fwd_c(branch, mu, c_branch, p))?,
                    Some(v) => return Err(guard_disagrees(path, cond, v, taken)),
                }
            }
            (PartialCommand::While { cond, .. }, CmdTraceNode::WhileFalse { cond: tb }) => {
                // the guard cannot change anything here; it is only checked
                with_child(path, 0, |p| fwd_b(tb, mu, cond, p))?;
            }
            (
                PartialCommand::While { cond, body },
                CmdTraceNode::WhileTrue {
                    cond: tb,
                    body: tc,
                    rest,
                },
            ) => {
                match with_child(path, 0, |p| fwd_b(tb, mu, cond, p))? {
                    None => {
                        with_child(path, 1, |p| check_cmd(tc, body, p))?;
                        erase_writes(tc, mu);
                        check_cmd(rest, c, path)?;
                        erase_writes(rest, mu);
                    }
                    Some(true) => {
                        with_child(path, 1, |p| fwd_c(tc, mu, body, p))?;
                        // the rest of the loop is sliced against the same loop
                        t = rest;
                        continue;
                    }
                    Some(false) => return Err(guard_disagrees(path, cond, false, true)),
                }
            }
            _ => {
                return Err(SliceError::Lattice(LatticeMismatch::new(
                    path,
                    format!("`{c}` does not match the traced `{}`", describe_trace(t)),
                )))
            }
        }
        return Ok(());
    }
}

fn guard_disagrees(path: &[usize], cond: &PartialBoolExpr, computed: bool, recorded: bool) -> SliceError {
    let mut at = path.to_vec();
    at.push(0);
    SliceError::Lattice(LatticeMismatch::new(
        &at,
        format!("guard `{cond}` recomputes to {computed} but the trace took the {recorded} branch; the partial state is not below the traced one"),
    ))
}

/// Checks that `c` is a prefix of the command that produced `t`, as far as
/// the trace records it (untaken branches leave no trace).
fn check_cmd(t: &CmdTrace, c: &PartialCommand, path: &mut Vec<usize>) -> Result<(), SliceError> {
    // expressions are checked by slicing them against a blank state, which
    // visits every node without short-circuiting
    let blank = PartialState::blank(t.state_in.domain());
    let mut t = t;
    loop {
        match (c, &t.node) {
            (PartialCommand::Hole, _) | (PartialCommand::Skip, CmdTraceNode::Skip) => {}
            (PartialCommand::Assign { var, expr }, CmdTraceNode::Assign { var: x, expr: ta }) if var == x => {
                with_child(path, 0, |p| fwd_a(ta, &blank, expr, p))?;
            }
            (PartialCommand::Seq(c1, c2), CmdTraceNode::Seq(t1, t2)) => {
                with_child(path, 0, |p| check_cmd(t1, c1, p))?;
                with_child(path, 1, |p| check_cmd(t2, c2, p))?;
            }
            (
                PartialCommand::If {
                    cond,
                    then_branch,
                    else_branch,
                },
                CmdTraceNode::IfTrue { cond: tb, branch } | CmdTraceNode::IfFalse { cond: tb, branch },
            ) => {
                with_child(path, 0, |p| fwd_b(tb, &blank, cond, p))?;
                if matches!(t.node, CmdTraceNode::IfTrue { .. }) {
                    with_child(path, 1, |p| check_cmd(branch, then_branch, p))?;
                } else {
                    with_child(path, 2, |p| check_cmd(branch, else_branch, p))?;
                }
            }
            (PartialCommand::While { cond, .. }, CmdTraceNode::WhileFalse { cond: tb }) => {
                with_child(path, 0, |p| fwd_b(tb, &blank, cond, p))?;
            }
            (
                PartialCommand::While { cond, body },
                CmdTraceNode::WhileTrue {
                    cond: tb,
                    body: tc,
                    rest,
                },
            ) => {
                with_child(path, 0, |p| fwd_b(tb, &blank, cond, p))?;
                with_child(path, 1, |p| check_cmd(tc, body, p))?;
                t = rest;
                continue;
            }
            _ => {
                return Err(SliceError::Lattice(LatticeMismatch::new(
                    path,
                    format!("`{c}` does not match the traced `{}`", describe_trace(t)),
                )))
            }
        }
        return Ok(());
    }
}

// ---------------------------------------------------------------------------
// Backward slicing

fn criterion_check<T: PartialEq + Copy>(
    demanded: Option<T>,
    actual: T,
    subject: impl FnOnce() -> String,
    wrap: impl Fn(T) -> Value,
) -> Result<bool, SliceError> {
    match demanded {
        None => Ok(false),
        Some(v) if v == actual => Ok(true),
        Some(v) => Err(SliceError::CriterionMismatch {
            subject: subject(),
            demanded: wrap(v),
            actual: wrap(actual),
        }),
    }
}

/// Demand on the input state and expression slice needed to recompute
/// `crit` along `t`.
pub fn bwd_aexp(
    t: &ArithTrace,
    domain: &Domain,
    crit: Option<u64>,
) -> Result<(PartialState, PartialArithExpr), SliceError> {
    if !criterion_check(crit, t.result, || t.to_string(), Value::Arith)? {
        return Ok((PartialState::blank(domain), PartialArithExpr::Hole));
    }
    Ok(match &t.node {
        ArithTraceNode::Nat(n) => (PartialState::blank(domain), PartialArithExpr::Nat(*n)),
        ArithTraceNode::Var { name, value } => (
            PartialState::blank(domain).update(name, Some(*value)),
            PartialArithExpr::Var(name.clone()),
        ),
        ArithTraceNode::Bin { op, lhs, rhs } => {
            let (mu1, a1) = bwd_aexp(lhs, domain, Some(lhs.result))?;
            let (mu2, a2) = bwd_aexp(rhs, domain, Some(rhs.result))?;
            (mu1.join(&mu2)?, PartialArithExpr::bin(*op, a1, a2))
        }
    })
}

pub fn bwd_bexp(
    t: &BoolTrace,
    domain: &Domain,
    crit: Option<bool>,
) -> Result<(PartialState, PartialBoolExpr), SliceError> {
    if !criterion_check(crit, t.result, || t.to_string(), Value::Bool)? {
        return Ok((PartialState::blank(domain), PartialBoolExpr::Hole));
    }
    Ok(match &t.node {
        BoolTraceNode::True => (PartialState::blank(domain), PartialBoolExpr::True),
        BoolTraceNode::False => (PartialState::blank(domain), PartialBoolExpr::False),
        BoolTraceNode::Cmp { op, lhs, rhs } => {
            let (mu1, a1) = bwd_aexp(lhs, domain, Some(lhs.result))?;
            let (mu2, a2) = bwd_aexp(rhs, domain, Some(rhs.result))?;
            (mu1.join(&mu2)?, PartialBoolExpr::cmp(*op, a1, a2))
        }
        BoolTraceNode::Not(inner) => {
            let (mu, b) = bwd_bexp(inner, domain, Some(inner.result))?;
            (mu, PartialBoolExpr::Not(Box::new(b)))
        }
        BoolTraceNode::And(l, r) => {
            let (mu1, b1) = bwd_bexp(l, domain, Some(l.result))?;
            let (mu2, b2) = bwd_bexp(r, domain, Some(r.result))?;
            (mu1.join(&mu2)?, PartialBoolExpr::And(Box::new(b1), Box::new(b2)))
        }
    })
}

/// Least partial program and input state whose forward slice along `t`
/// covers the criterion `crit`.
pub fn bwd_cmd(t: &CmdTrace, crit: &PartialState) -> Result<SliceOutcome, SliceError> {
    let output = t.state_out.partialize();
    if let Some(m) = crit.not_below(&output) {
        return Err(if crit.domain() != output.domain() {
            SliceError::Lattice(m)
        } else {
            let i = m.position.path()[0];
            let name = &crit.domain().names()[i];
            SliceError::CriterionMismatch {
                subject: name.clone(),
                demanded: Value::Arith(crit.values()[i].expect("only values can fail to be below")),
                actual: Value::Arith(t.state_out.values()[i]),
            }
        });
    }
    let (input_slice, program_slice) = bwd_c(t, crit.clone())?;
    Ok(SliceOutcome {
        input_slice,
        program_slice,
    })
}

fn bwd_c(t: &CmdTrace, mu: PartialState) -> Result<(PartialState, PartialCommand), SliceError> {
    if mu.domain().is_empty() {
        return Ok((mu, PartialCommand::Hole));
    }
    let domain = t.state_in.domain();
    Ok(match &t.node {
        CmdTraceNode::Skip | CmdTraceNode::WhileFalse { .. } => (mu, PartialCommand::Hole),
        CmdTraceNode::Assign { var, expr } => match mu.lookup(var) {
            None => (mu, PartialCommand::Hole),
            Some(v) => {
                let (mu_a, a) = bwd_aexp(expr, domain, Some(v))?;
                // the old value of x is not needed unless the expression reads it
                let rest = mu.update(var, None);
                (mu_a.join(&rest)?, PartialCommand::assign(var.clone(), a))
            }
        },
        CmdTraceNode::Seq(t1, t2) => {
            let (mu2, c2) = bwd_c(t2, mu)?;
            let (mu1, c1) = bwd_c(t1, mu2)?;
            let c = match (c1.is_hole(), c2.is_hole()) {
                (true, true) => PartialCommand::Hole,
                _ => PartialCommand::seq(c1, c2),
            };
            (mu1, c)
        }
        CmdTraceNode::IfTrue { cond, branch } | CmdTraceNode::IfFalse { cond, branch } => {
            let (mu_branch, c) = bwd_c(branch, mu)?;
            if c.is_hole() {
                (mu_branch, PartialCommand::Hole)
            } else {
                let taken = matches!(t.node, CmdTraceNode::IfTrue { .. });
                let (mu_b, b) = bwd_bexp(cond, domain, Some(taken))?;
                let program = if taken {
                    PartialCommand::if_then_else(b, c, PartialCommand::Hole)
                } else {
                    PartialCommand::if_then_else(b, PartialCommand::Hole, c)
                };
                (mu_branch.join(&mu_b)?, program)
            }
        }
        CmdTraceNode::WhileTrue { .. } => {
            // process the unrollings last to first, as the rule for T_w
            // precedes the one for the body
            let (unrollings, exit) = t.loop_chain();
            let (mut mu_w, mut c_w) = bwd_c(exit, mu)?;
            for u in unrollings.into_iter().rev() {
                let CmdTraceNode::WhileTrue { cond, body, .. } = &u.node else {
                    unreachable!("loop_chain yields while_true nodes")
                };
                let (mu_c, c) = bwd_c(body, mu_w)?;
                if c_w.is_hole() && c.is_hole() {
                    mu_w = mu_c;
                    continue;
                }
                let (mu_b, b) = bwd_bexp(cond, domain, Some(true))?;
                mu_w = mu_c.join(&mu_b)?;
                c_w = c_w.join(&PartialCommand::while_do(b, c))?;
            }
            (mu_w, c_w)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{
        parse_arith, parse_bool, parse_command, parse_partial_command, parse_partial_state, parse_state,
    };
    use crate::tracer::{eval_aexp, eval_bexp, eval_cmd, Derivation, DEFAULT_FUEL};

    const INTRO: &str = "if (y = 1) then { y := x + 1 } else { y := y + 1 } ; z := z + 1";
    const DIVISION: &str = "r := a ; while (b <= r) do { q := q + 1 ; r := r - b } ; \
                            if (!(r = 0)) then { res := 0 } else { res := 1 }";

    fn run(program: &str, state: &str) -> Derivation {
        eval_cmd(
            &parse_state(state).unwrap(),
            &parse_command(program).unwrap(),
            DEFAULT_FUEL,
        )
        .unwrap()
    }

    fn ps(s: &str) -> PartialState {
        parse_partial_state(s).unwrap()
    }

    #[test]
    fn fwd_arith_examples() {
        let mu = parse_state("x = 1, y = 2").unwrap();
        let a = parse_arith("x + y").unwrap();
        let t = eval_aexp(&mu, &a).unwrap();
        let pa = crate::parse::parse_partial_arith("x + y").unwrap();
        assert_eq!(fwd_aexp(&t, &mu.partialize(), &pa).unwrap(), Some(3));
        assert_eq!(fwd_aexp(&t, &ps("x = 1, y = _"), &pa).unwrap(), None);
        assert_eq!(
            fwd_aexp(&t, &ps("x = 1, y = 2"), &PartialArithExpr::Hole).unwrap(),
            None
        );
    }

    #[test]
    fn fwd_bool_examples() {
        let t = eval_bexp(&parse_state("y = 0").unwrap(), &parse_bool("y = 1").unwrap()).unwrap();
        let b = crate::parse::parse_partial_bool("y = 1").unwrap();
        assert_eq!(fwd_bexp(&t, &ps("y = 0"), &b).unwrap(), Some(false));
        assert_eq!(fwd_bexp(&t, &ps("y = _"), &b).unwrap(), None);
    }

    #[test]
    fn fwd_reads_state_not_trace() {
        // lower bound of reads comes from mu; with a consistent mu they agree
        let d = run("x := y", "x = 0, y = 5");
        let out = fwd_cmd(&d.trace, &ps("x = 0, y = 5"), &parse_partial_command("x := y").unwrap()).unwrap();
        assert_eq!(out.to_string(), "x = 5, y = 5");
    }

    #[test]
    fn fwd_intro_slice() {
        let d = run(INTRO, "x = 1, y = 0, z = 2");
        let slice = parse_partial_command("if (y = 1) then { _ } else { y := y + 1 } ; _").unwrap();
        let out = d.forward(&slice, &ps("x = _, y = 0, z = _")).unwrap();
        assert_eq!(out.to_string(), "x = _, y = 1, z = _");
    }

    #[test]
    fn fwd_hole_erases_writes() {
        let d = run("x := 1", "x = 5");
        assert_eq!(
            d.forward(&PartialCommand::Hole, &ps("x = 5")).unwrap().to_string(),
            "x = _"
        );
        let d = run(DIVISION, "q = 0, r = 0, res = 0, a = 4, b = 2");
        let out = d.forward(&PartialCommand::Hole, &d.input.partialize()).unwrap();
        assert_eq!(out.to_string(), "q = _, r = _, res = _, a = 4, b = 2");
    }

    #[test]
    fn fwd_full_is_evaluation() {
        let d = run(DIVISION, "q = 0, r = 0, res = 0, a = 4, b = 2");
        use crate::syntax::Partialize;
        let out = d.forward(&d.program.partialize(), &d.input.partialize()).unwrap();
        assert_eq!(out, d.output.partialize());
    }

    #[test]
    fn fwd_hole_guard_erases_loop() {
        let d = run(DIVISION, "q = 0, r = 0, res = 0, a = 4, b = 2");
        let c = parse_partial_command(
            "r := a ; while (_) do { q := q + 1 ; r := r - b } ; if (!(r = 0)) then { res := 0 } else { res := 1 }",
        )
        .unwrap();
        let out = d.forward(&c, &d.input.partialize()).unwrap();
        assert_eq!(out.to_string(), "q = _, r = _, res = _, a = 4, b = 2");
    }

    #[test]
    fn fwd_rejects_non_prefix() {
        let d = run(INTRO, "x = 1, y = 0, z = 2");
        let err = d
            .forward(&parse_partial_command("skip ; _").unwrap(), &ps("x = _, y = _, z = _"))
            .unwrap_err();
        assert!(matches!(err, SliceError::Lattice(_)));
        let err = d
            .forward(&PartialCommand::Hole, &ps("x = 7, y = _, z = _"))
            .unwrap_err();
        assert!(matches!(err, SliceError::Lattice(_)));
        let err = fwd_cmd(&d.trace, &ps("x = _"), &PartialCommand::Hole).unwrap_err();
        assert!(matches!(err, SliceError::Lattice(_)));
    }

    #[test]
    fn bwd_arith_examples() {
        let mu = parse_state("x = 1, y = 2").unwrap();
        let t = eval_aexp(&mu, &parse_arith("x + y").unwrap()).unwrap();
        let (demand, a) = bwd_aexp(&t, mu.domain(), Some(3)).unwrap();
        assert_eq!(demand.to_string(), "x = 1, y = 2");
        assert_eq!(a.to_string(), "x + y");
        let (demand, a) = bwd_aexp(&t, mu.domain(), None).unwrap();
        assert!(demand.is_blank() && a.is_hole());
        let err = bwd_aexp(&t, mu.domain(), Some(4)).unwrap_err();
        assert!(matches!(err, SliceError::CriterionMismatch { .. }));
    }

    #[test]
    fn bwd_bool_examples() {
        let mu = parse_state("q = 2, r = 0").unwrap();
        let t = eval_bexp(&mu, &parse_bool("!(r = 0)").unwrap()).unwrap();
        let (demand, b) = bwd_bexp(&t, mu.domain(), Some(false)).unwrap();
        assert_eq!(demand.to_string(), "q = _, r = 0");
        assert_eq!(b.to_string(), "!(r = 0)");
        let t = eval_bexp(&mu, &parse_bool("true").unwrap()).unwrap();
        let (demand, b) = bwd_bexp(&t, mu.domain(), Some(true)).unwrap();
        assert!(demand.is_blank());
        assert_eq!(b, PartialBoolExpr::True);
    }

    #[test]
    fn bwd_intro_slices() {
        let d = run(INTRO, "x = 1, y = 0, z = 2");
        let s = d.backward(&ps("x = _, y = 1, z = _")).unwrap();
        assert_eq!(
            s.program_slice.to_string(),
            "if (y = 1) then { _ } else { y := y + 1 } ; _"
        );
        assert_eq!(s.input_slice.to_string(), "x = _, y = 0, z = _");
        let s = d.backward(&ps("x = _, y = _, z = 3")).unwrap();
        assert_eq!(s.program_slice.to_string(), "_ ; z := z + 1");
        assert_eq!(s.input_slice.to_string(), "x = _, y = _, z = 2");
    }

    #[test]
    fn bwd_division_slice() {
        let d = run(DIVISION, "q = 0, r = 0, res = 0, a = 4, b = 2");
        let s = d.backward(&ps("q = _, r = _, res = 1, a = _, b = _")).unwrap();
        assert_eq!(
            s.program_slice.to_string(),
            "r := a ; while (b <= r) do { _ ; r := r - b } ; if (!(r = 0)) then { _ } else { res := 1 }"
        );
        assert_eq!(s.input_slice.to_string(), "q = _, r = _, res = _, a = 4, b = 2");
    }

    #[test]
    fn bwd_bottom_to_bottom() {
        let d = run(DIVISION, "q = 0, r = 0, res = 0, a = 4, b = 2");
        let s = d.backward(&d.output.blank()).unwrap();
        assert!(s.program_slice.is_hole());
        assert!(s.input_slice.is_blank());
    }

    #[test]
    fn bwd_criterion_errors() {
        let d = run(INTRO, "x = 1, y = 0, z = 2");
        let err = d.backward(&ps("x = _, y = 5, z = _")).unwrap_err();
        assert_eq!(
            err,
            SliceError::CriterionMismatch {
                subject: "y".into(),
                demanded: Value::Arith(5),
                actual: Value::Arith(1),
            }
        );
        assert!(matches!(d.backward(&ps("y = 1")).unwrap_err(), SliceError::Lattice(_)));
    }

    #[test]
    fn bwd_keeps_seq_with_hole_tail() {
        let d = run("x := 1 ; y := 2", "x = 0, y = 0");
        let s = d.backward(&ps("x = 1, y = _")).unwrap();
        assert_eq!(s.program_slice.to_string(), "x := 1 ; _");
        assert!(s.input_slice.is_blank());
    }

    #[test]
    fn bwd_empty_domain() {
        let d = run("skip ; skip", "");
        let s = d.backward(&PartialState::blank(&Domain::empty())).unwrap();
        assert!(s.program_slice.is_hole());
    }
}
