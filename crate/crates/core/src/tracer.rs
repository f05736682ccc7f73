//! Big-step tracing evaluation.
//!
//! Evaluation of a total program produces a [`Derivation`]: the output state
//! plus a trace tree recording the value of every subexpression, every
//! variable read, which branch each conditional took and every loop
//! unrolling. Command nodes also carry the states before and after them.
//!
//! Loops are unrolled into nested `while_true` nodes ending in a
//! `while_false` node. Long loops therefore produce deep traces; evaluation,
//! slicing and dropping all walk loop chains iteratively, but deriving
//! `Clone`, `PartialEq` or serialising a very deep trace still recurses.

use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::lattice::{check_prefix, Lattice, LatticeMismatch};
use crate::slicer::{self, SliceError, SliceOutcome};
use crate::state::{PartialState, State};
use crate::syntax::{ArithExpr, ArithOp, BoolExpr, CmpOp, Command, PartialCommand};

/// Command-rule applications allowed by default before evaluation gives up.
pub const DEFAULT_FUEL: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum EvalError {
    #[error("variable `{name}` is read but not bound in the state")]
    UnboundVariable { name: String },
    #[error("evaluation ran out of fuel after {fuel} command steps")]
    FuelExhausted { fuel: u64 },
    #[error("`{lhs} {op} {rhs}` overflows 64-bit naturals")]
    Overflow { op: &'static str, lhs: u64, rhs: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArithTrace {
    pub result: u64,
    pub node: ArithTraceNode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArithTraceNode {
    Nat(u64),
    /// A variable read together with the value it had.
    Var {
        name: String,
        value: u64,
    },
    Bin {
        op: ArithOp,
        lhs: Box<ArithTrace>,
        rhs: Box<ArithTrace>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoolTrace {
    pub result: bool,
    pub node: BoolTraceNode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoolTraceNode {
    True,
    False,
    Cmp {
        op: CmpOp,
        lhs: ArithTrace,
        rhs: ArithTrace,
    },
    Not(Box<BoolTrace>),
    /// Both operands are always evaluated.
    And(Box<BoolTrace>, Box<BoolTrace>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CmdTrace {
    pub state_in: State,
    pub state_out: State,
    pub node: CmdTraceNode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CmdTraceNode {
    Skip,
    Assign {
        var: String,
        expr: ArithTrace,
    },
    Seq(Box<CmdTrace>, Box<CmdTrace>),
    IfTrue {
        cond: BoolTrace,
        branch: Box<CmdTrace>,
    },
    IfFalse {
        cond: BoolTrace,
        branch: Box<CmdTrace>,
    },
    WhileFalse {
        cond: BoolTrace,
    },
    /// One unrolling: the guard, the body, then the rest of the loop.
    WhileTrue {
        cond: BoolTrace,
        body: Box<CmdTrace>,
        rest: Box<CmdTrace>,
    },
}

impl Drop for CmdTrace {
    // Unlinks `while_true` chains one node at a time so that dropping the
    // trace of a long loop does not recurse once per iteration.
    fn drop(&mut self) {
        let mut next = match std::mem::replace(&mut self.node, CmdTraceNode::Skip) {
            CmdTraceNode::WhileTrue { rest, .. } => rest,
            _ => return,
        };
        while let CmdTraceNode::WhileTrue { rest, .. } = std::mem::replace(&mut next.node, CmdTraceNode::Skip) {
            next = rest;
        }
    }
}

impl CmdTrace {
    /// Iterates a `while_true` chain: every unrolling, then the node that
    /// ends the chain (normally `while_false`).
    pub fn loop_chain(&self) -> (Vec<&CmdTrace>, &CmdTrace) {
        let mut unrollings = Vec::new();
        let mut t = self;
        while let CmdTraceNode::WhileTrue { rest, .. } = &t.node {
            unrollings.push(t);
            t = rest;
        }
        (unrollings, t)
    }
}

pub fn eval_aexp(mu: &State, a: &ArithExpr) -> Result<ArithTrace, EvalError> {
    Ok(match a {
        ArithExpr::Nat(n) => ArithTrace {
            result: *n,
            node: ArithTraceNode::Nat(*n),
        },
        ArithExpr::Var(x) => {
            let value = mu
                .get(x)
                .ok_or_else(|| EvalError::UnboundVariable { name: x.clone() })?;
            ArithTrace {
                result: value,
                node: ArithTraceNode::Var { name: x.clone(), value },
            }
        }
        ArithExpr::Bin { op, lhs, rhs } => {
            let l = eval_aexp(mu, lhs)?;
            let r = eval_aexp(mu, rhs)?;
            let result = op.apply(l.result, r.result).ok_or(EvalError::Overflow {
                op: op.symbol(),
                lhs: l.result,
                rhs: r.result,
            })?;
            ArithTrace {
                result,
                node: ArithTraceNode::Bin {
                    op: *op,
                    lhs: Box::new(l),
                    rhs: Box::new(r),
                },
            }
        }
    })
}

pub fn eval_bexp(mu: &State, b: &BoolExpr) -> Result<BoolTrace, EvalError> {
    Ok(match b {
        BoolExpr::True => BoolTrace {
            result: true,
            node: BoolTraceNode::True,
        },
        BoolExpr::False => BoolTrace {
            result: false,
            node: BoolTraceNode::False,
        },
        BoolExpr::Cmp { op, lhs, rhs } => {
            let l = eval_aexp(mu, lhs)?;
            let r = eval_aexp(mu, rhs)?;
            BoolTrace {
                result: op.apply(l.result, r.result),
                node: BoolTraceNode::Cmp {
                    op: *op,
                    lhs: l,
                    rhs: r,
                },
            }
        }
        BoolExpr::Not(inner) => {
            let t = eval_bexp(mu, inner)?;
            BoolTrace {
                result: !t.result,
                node: BoolTraceNode::Not(Box::new(t)),
            }
        }
        BoolExpr::And(l, r) => {
            let l = eval_bexp(mu, l)?;
            let r = eval_bexp(mu, r)?;
            BoolTrace {
                result: l.result && r.result,
                node: BoolTraceNode::And(Box::new(l), Box::new(r)),
            }
        }
    })
}

struct Evaluator {
    fuel: u64,
    remaining: u64,
}

impl Evaluator {
    fn tick(&mut self) -> Result<(), EvalError> {
        if self.remaining == 0 {
            return Err(EvalError::FuelExhausted { fuel: self.fuel });
        }
        self.remaining -= 1;
        Ok(())
    }

    fn cmd(&mut self, mu: State, c: &Command) -> Result<CmdTrace, EvalError> {
        self.tick()?;
        let (state_out, node) = match c {
            Command::Skip => (mu.clone(), CmdTraceNode::Skip),
            Command::Assign { var, expr } => {
                let t = eval_aexp(&mu, expr)?;
                (
                    mu.update(var, t.result),
                    CmdTraceNode::Assign {
                        var: var.clone(),
                        expr: t,
                    },
                )
            }
            Command::Seq(c1, c2) => {
                let t1 = self.cmd(mu.clone(), c1)?;
                let t2 = self.cmd(t1.state_out.clone(), c2)?;
                (t2.state_out.clone(), CmdTraceNode::Seq(Box::new(t1), Box::new(t2)))
            }
            Command::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let tb = eval_bexp(&mu, cond)?;
                if tb.result {
                    let t = self.cmd(mu.clone(), then_branch)?;
                    (
                        t.state_out.clone(),
                        CmdTraceNode::IfTrue {
                            cond: tb,
                            branch: Box::new(t),
                        },
                    )
                } else {
                    let t = self.cmd(mu.clone(), else_branch)?;
                    (
                        t.state_out.clone(),
                        CmdTraceNode::IfFalse {
                            cond: tb,
                            branch: Box::new(t),
                        },
                    )
                }
            }
            Command::While { cond, body } => return self.while_loop(mu, cond, body),
        };
        Ok(CmdTrace {
            state_in: mu,
            state_out,
            node,
        })
    }

    /// Runs the loop iteratively, then links the unrollings back to front.
    fn while_loop(&mut self, mu: State, cond: &BoolExpr, body: &Command) -> Result<CmdTrace, EvalError> {
        let mut unrollings = Vec::new();
        let mut current = mu;
        let exit = loop {
            let tb = eval_bexp(&current, cond)?;
            if !tb.result {
                break CmdTrace {
                    state_in: current.clone(),
                    state_out: current,
                    node: CmdTraceNode::WhileFalse { cond: tb },
                };
            }
            let tc = self.cmd(current.clone(), body)?;
            let next = tc.state_out.clone();
            unrollings.push((current, tb, tc));
            current = next;
            // every further test of the guard is another while-rule application
            self.tick()?;
        };
        let state_out = exit.state_out.clone();
        let mut acc = exit;
        for (state_in, cond, body) in unrollings.into_iter().rev() {
            acc = CmdTrace {
                state_in,
                state_out: state_out.clone(),
                node: CmdTraceNode::WhileTrue {
                    cond,
                    body: Box::new(body),
                    rest: Box::new(acc),
                },
            };
        }
        Ok(acc)
    }
}

/// Evaluates `c` from `mu`, allowing at most `fuel` command-rule applications.
pub fn eval_cmd(mu: &State, c: &Command, fuel: u64) -> Result<Derivation, EvalError> {
    let mut ev = Evaluator { fuel, remaining: fuel };
    let trace = ev.cmd(mu.clone(), c)?;
    Ok(Derivation {
        program: c.clone(),
        input: mu.clone(),
        output: trace.state_out.clone(),
        trace,
    })
}

/// A terminated execution: program, input, output and the trace linking them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub program: Command,
    pub input: State,
    pub output: State,
    pub trace: CmdTrace,
}

/// The trace does not re-derive from its own annotations.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("incoherent trace: {0}")]
pub struct ReplayError(pub String);

impl Derivation {
    /// Forward slice of a partial program and input along this run.
    ///
    /// The program must be a prefix of the traced program and the state a
    /// prefix of the input state.
    pub fn forward(&self, program: &PartialCommand, input: &PartialState) -> Result<PartialState, SliceError> {
        check_prefix(program.clone(), self.program.clone())?;
        if let Some(m) = input.not_below(&self.input.partialize()) {
            return Err(SliceError::Lattice(m));
        }
        slicer::fwd_cmd(&self.trace, input, program)
    }

    /// Backward slice of a partial output state along this run.
    pub fn backward(&self, criterion: &PartialState) -> Result<SliceOutcome, SliceError> {
        slicer::bwd_cmd(&self.trace, criterion)
    }

    pub fn stats(&self) -> TraceStats {
        trace_stats(self)
    }

    /// Re-derives every cached value and state from the trace and checks it
    /// against the program, the input and the output.
    pub fn replay(&self) -> Result<(), ReplayError> {
        if self.trace.state_in != self.input {
            return Err(ReplayError("trace does not start in the input state".into()));
        }
        let out = replay_cmd(&self.trace, &self.program)?;
        if out != self.output {
            return Err(ReplayError(format!(
                "replay ends in `{out}` but the derivation claims `{}`",
                self.output
            )));
        }
        Ok(())
    }
}

fn incoherent(msg: impl Into<String>) -> ReplayError {
    ReplayError(msg.into())
}

fn replay_aexp(t: &ArithTrace, a: &ArithExpr, mu: &State) -> Result<(), ReplayError> {
    let expected = match (&t.node, a) {
        (ArithTraceNode::Nat(n), ArithExpr::Nat(m)) if n == m => *n,
        (ArithTraceNode::Var { name, value }, ArithExpr::Var(x)) if name == x => {
            if mu.get(x) != Some(*value) {
                return Err(incoherent(format!(
                    "read of `{x}` records {value}, state has {:?}",
                    mu.get(x)
                )));
            }
            *value
        }
        (ArithTraceNode::Bin { op, lhs, rhs }, ArithExpr::Bin { op: o, lhs: l, rhs: r }) if op == o => {
            replay_aexp(lhs, l, mu)?;
            replay_aexp(rhs, r, mu)?;
            op.apply(lhs.result, rhs.result)
                .ok_or_else(|| incoherent(format!("`{a}` overflows")))?
        }
        _ => return Err(incoherent(format!("trace does not follow `{a}`"))),
    };
    if expected != t.result {
        return Err(incoherent(format!("`{a}` caches {} but computes {expected}", t.result)));
    }
    Ok(())
}

fn replay_bexp(t: &BoolTrace, b: &BoolExpr, mu: &State) -> Result<(), ReplayError> {
    let expected = match (&t.node, b) {
        (BoolTraceNode::True, BoolExpr::True) => true,
        (BoolTraceNode::False, BoolExpr::False) => false,
        (BoolTraceNode::Cmp { op, lhs, rhs }, BoolExpr::Cmp { op: o, lhs: l, rhs: r }) if op == o => {
            replay_aexp(lhs, l, mu)?;
            replay_aexp(rhs, r, mu)?;
            op.apply(lhs.result, rhs.result)
        }
        (BoolTraceNode::Not(inner), BoolExpr::Not(b)) => {
            replay_bexp(inner, b, mu)?;
            !inner.result
        }
        (BoolTraceNode::And(l, r), BoolExpr::And(bl, br)) => {
            replay_bexp(l, bl, mu)?;
            replay_bexp(r, br, mu)?;
            l.result && r.result
        }
        _ => return Err(incoherent(format!("trace does not follow `{b}`"))),
    };
    if expected != t.result {
        return Err(incoherent(format!("`{b}` caches {} but computes {expected}", t.result)));
    }
    Ok(())
}

fn replay_cmd(t: &CmdTrace, c: &Command) -> Result<State, ReplayError> {
    let mu = &t.state_in;
    let out = match (&t.node, c) {
        (CmdTraceNode::Skip, Command::Skip) => mu.clone(),
        (CmdTraceNode::Assign { var, expr }, Command::Assign { var: x, expr: a }) if var == x => {
            replay_aexp(expr, a, mu)?;
            mu.update(x, expr.result)
        }
        (CmdTraceNode::Seq(t1, t2), Command::Seq(c1, c2)) => {
            if &t1.state_in != mu {
                return Err(incoherent("sequence does not start in its input state"));
            }
            let mid = replay_cmd(t1, c1)?;
            if t2.state_in != mid {
                return Err(incoherent("sequence halves do not chain"));
            }
            replay_cmd(t2, c2)?
        }
        (
            CmdTraceNode::IfTrue { cond, branch } | CmdTraceNode::IfFalse { cond, branch },
            Command::If {
                cond: b,
                then_branch,
                else_branch,
            },
        ) => {
            replay_bexp(cond, b, mu)?;
            let taken = matches!(t.node, CmdTraceNode::IfTrue { .. });
            if cond.result != taken {
                return Err(incoherent(format!(
                    "guard `{b}` evaluated to {} on the other branch",
                    cond.result
                )));
            }
            if &branch.state_in != mu {
                return Err(incoherent("branch does not start in the conditional's state"));
            }
            replay_cmd(branch, if taken { then_branch } else { else_branch })?
        }
        (CmdTraceNode::WhileFalse { .. } | CmdTraceNode::WhileTrue { .. }, Command::While { cond: b, body }) => {
            let (unrollings, exit) = t.loop_chain();
            let mut current = mu.clone();
            for u in unrollings {
                let CmdTraceNode::WhileTrue { cond, body: tc, .. } = &u.node else {
                    unreachable!("loop_chain yields while_true nodes")
                };
                if u.state_in != current || tc.state_in != current {
                    return Err(incoherent("loop unrollings do not chain"));
                }
                replay_bexp(cond, b, &current)?;
                if !cond.result {
                    return Err(incoherent(format!("while_true recorded with guard `{b}` false")));
                }
                current = replay_cmd(tc, body)?;
                if u.state_out != exit.state_out {
                    return Err(incoherent("loop unrolling does not end in the loop's output"));
                }
            }
            if exit.state_in != current {
                return Err(incoherent("loop exit does not follow the last unrolling"));
            }
            match &exit.node {
                CmdTraceNode::WhileFalse { cond } => {
                    replay_bexp(cond, b, &current)?;
                    if cond.result {
                        return Err(incoherent(format!("while_false recorded with guard `{b}` true")));
                    }
                }
                _ => return Err(incoherent("loop chain does not end in while_false")),
            }
            if exit.state_out != current {
                return Err(incoherent("while_false changes the state"));
            }
            current
        }
        _ => return Err(incoherent(format!("trace does not follow `{c}`"))),
    };
    if out != t.state_out {
        return Err(incoherent(format!(
            "`{c}` caches output `{}` but computes `{out}`",
            t.state_out
        )));
    }
    Ok(out)
}

/// Counts gathered in one pass over a trace.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TraceStats {
    /// Assignments executed.
    pub assignments: u64,
    /// Loop bodies executed (`while_true` nodes).
    pub loop_iterations: u64,
    /// Loop guards evaluated (`while_true` plus `while_false` nodes).
    pub loop_condition_evaluations: u64,
    /// Outcome of every conditional, in execution order.
    pub branch_decisions: Vec<bool>,
}

pub fn trace_stats(d: &Derivation) -> TraceStats {
    fn walk(t: &CmdTrace, s: &mut TraceStats) {
        match &t.node {
            CmdTraceNode::Skip => {}
            CmdTraceNode::Assign { .. } => s.assignments += 1,
            CmdTraceNode::Seq(t1, t2) => {
                walk(t1, s);
                walk(t2, s);
            }
            CmdTraceNode::IfTrue { branch, .. } => {
                s.branch_decisions.push(true);
                walk(branch, s);
            }
            CmdTraceNode::IfFalse { branch, .. } => {
                s.branch_decisions.push(false);
                walk(branch, s);
            }
            CmdTraceNode::WhileFalse { .. } | CmdTraceNode::WhileTrue { .. } => {
                let (unrollings, exit) = t.loop_chain();
                for u in unrollings {
                    s.loop_iterations += 1;
                    s.loop_condition_evaluations += 1;
                    if let CmdTraceNode::WhileTrue { body, .. } = &u.node {
                        walk(body, s);
                    }
                }
                if let CmdTraceNode::WhileFalse { .. } = exit.node {
                    s.loop_condition_evaluations += 1;
                } else {
                    walk(exit, s);
                }
            }
        }
    }
    let mut stats = TraceStats::default();
    walk(&d.trace, &mut stats);
    stats
}

// Listing: one statement per line, variable reads annotated with their values.

fn write_aexp(out: &mut String, t: &ArithTrace, min_prec: u8) {
    match &t.node {
        ArithTraceNode::Nat(n) => {
            let _ = write!(out, "{n}");
        }
        ArithTraceNode::Var { name, value } => {
            let _ = write!(out, "{name}({value})");
        }
        ArithTraceNode::Bin { op, lhs, rhs } => {
            let prec = op.precedence();
            if prec < min_prec {
                out.push('(');
            }
            write_aexp(out, lhs, prec);
            let _ = write!(out, " {} ", op.symbol());
            write_aexp(out, rhs, prec + 1);
            if prec < min_prec {
                out.push(')');
            }
        }
    }
}

fn write_bexp(out: &mut String, t: &BoolTrace, min_prec: u8) {
    let prec = match t.node {
        BoolTraceNode::And(..) => 1,
        BoolTraceNode::Not(_) | BoolTraceNode::Cmp { .. } => 2,
        _ => 3,
    };
    if prec < min_prec {
        out.push('(');
    }
    match &t.node {
        BoolTraceNode::True => out.push_str("true"),
        BoolTraceNode::False => out.push_str("false"),
        BoolTraceNode::Cmp { op, lhs, rhs } => {
            write_aexp(out, lhs, 0);
            let _ = write!(out, " {} ", op.symbol());
            write_aexp(out, rhs, 0);
        }
        BoolTraceNode::Not(inner) => {
            out.push('!');
            write_bexp(out, inner, 3);
        }
        BoolTraceNode::And(l, r) => {
            write_bexp(out, l, 1);
            out.push_str(" && ");
            write_bexp(out, r, 2);
        }
    }
    if prec < min_prec {
        out.push(')');
    }
}

fn bexp_text(t: &BoolTrace) -> String {
    let mut s = String::new();
    write_bexp(&mut s, t, 0);
    s
}

fn list_cmd(t: &CmdTrace, indent: usize, lines: &mut Vec<String>) {
    let pad = "  ".repeat(indent);
    match &t.node {
        CmdTraceNode::Skip => lines.push(format!("{pad}skip")),
        CmdTraceNode::Assign { var, expr } => {
            let mut s = format!("{pad}{var} := ");
            write_aexp(&mut s, expr, 0);
            lines.push(s);
        }
        CmdTraceNode::Seq(t1, t2) => {
            list_cmd(t1, indent, lines);
            if let Some(last) = lines.last_mut() {
                last.push(';');
            }
            list_cmd(t2, indent, lines);
        }
        CmdTraceNode::IfTrue { cond, branch } => {
            lines.push(format!("{pad}if_true ({}) then {{", bexp_text(cond)));
            list_cmd(branch, indent + 1, lines);
            lines.push(format!("{pad}}}"));
        }
        CmdTraceNode::IfFalse { cond, branch } => {
            lines.push(format!("{pad}if_false ({}) else {{", bexp_text(cond)));
            list_cmd(branch, indent + 1, lines);
            lines.push(format!("{pad}}}"));
        }
        CmdTraceNode::WhileFalse { cond } => {
            lines.push(format!("{pad}while_false ({})", bexp_text(cond)));
        }
        CmdTraceNode::WhileTrue { .. } => {
            let (unrollings, exit) = t.loop_chain();
            for u in unrollings {
                if let CmdTraceNode::WhileTrue { cond, body, .. } = &u.node {
                    lines.push(format!("{pad}while_true ({}) do {{", bexp_text(cond)));
                    list_cmd(body, indent + 1, lines);
                    lines.push(format!("{pad}}};"));
                }
            }
            list_cmd(exit, indent, lines);
        }
    }
}

/// Multi-line listing of a trace in the style
/// `while_true (b(2) <= r(4)) do { ... };`.
pub fn render_trace(t: &CmdTrace) -> String {
    let mut lines = Vec::new();
    list_cmd(t, 0, &mut lines);
    lines.join("\n")
}

impl fmt::Display for CmdTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_trace(self))
    }
}

impl fmt::Display for ArithTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_aexp(&mut s, self, 0);
        f.write_str(&s)
    }
}

impl fmt::Display for BoolTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bexp_text(self))
    }
}

impl From<LatticeMismatch> for ReplayError {
    fn from(m: LatticeMismatch) -> Self {
        ReplayError(m.to_string())
    }
}
