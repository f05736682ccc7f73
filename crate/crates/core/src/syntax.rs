//! Abstract syntax of total and partial Imp.
//!
//! Partial terms mirror the total ones constructor for constructor and add a
//! single `Hole` variant. [`Partialize`] embeds a total term as a hole-free
//! partial term; [`PartialCommand::to_total`] and friends go the other way
//! when no hole is left.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Binary arithmetic operators. Subtraction is truncated at zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl ArithOp {
    /// Applies the operator on naturals. `None` on overflow.
    pub fn apply(self, lhs: u64, rhs: u64) -> Option<u64> {
        match self {
            ArithOp::Add => lhs.checked_add(rhs),
            ArithOp::Sub => Some(lhs.saturating_sub(rhs)),
            ArithOp::Mul => lhs.checked_mul(rhs),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            ArithOp::Add | ArithOp::Sub => 1,
            ArithOp::Mul => 2,
        }
    }
}

/// Comparison operators between arithmetic expressions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CmpOp {
    Eq,
    Leq,
}

impl CmpOp {
    pub fn apply(self, lhs: u64, rhs: u64) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Leq => lhs <= rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Leq => "<=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArithExpr {
    Nat(u64),
    Var(String),
    Bin {
        op: ArithOp,
        lhs: Box<ArithExpr>,
        rhs: Box<ArithExpr>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoolExpr {
    True,
    False,
    Cmp {
        op: CmpOp,
        lhs: Box<ArithExpr>,
        rhs: Box<ArithExpr>,
    },
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Skip,
    Assign {
        var: String,
        expr: ArithExpr,
    },
    Seq(Box<Command>, Box<Command>),
    If {
        cond: BoolExpr,
        then_branch: Box<Command>,
        else_branch: Box<Command>,
    },
    While {
        cond: BoolExpr,
        body: Box<Command>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartialArithExpr {
    #[serde(rename = "_")]
    Hole,
    Nat(u64),
    Var(String),
    Bin {
        op: ArithOp,
        lhs: Box<PartialArithExpr>,
        rhs: Box<PartialArithExpr>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartialBoolExpr {
    #[serde(rename = "_")]
    Hole,
    True,
    False,
    Cmp {
        op: CmpOp,
        lhs: Box<PartialArithExpr>,
        rhs: Box<PartialArithExpr>,
    },
    Not(Box<PartialBoolExpr>),
    And(Box<PartialBoolExpr>, Box<PartialBoolExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartialCommand {
    #[serde(rename = "_")]
    Hole,
    Skip,
    Assign {
        var: String,
        expr: PartialArithExpr,
    },
    Seq(Box<PartialCommand>, Box<PartialCommand>),
    If {
        cond: PartialBoolExpr,
        then_branch: Box<PartialCommand>,
        else_branch: Box<PartialCommand>,
    },
    While {
        cond: PartialBoolExpr,
        body: Box<PartialCommand>,
    },
}

/// Result of evaluating an expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Arith(u64),
    Bool(bool),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Arith(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// Hole-free embedding of a total term into its partial counterpart.
pub trait Partialize {
    type Partial;
    fn partialize(&self) -> Self::Partial;
}

impl Partialize for ArithExpr {
    type Partial = PartialArithExpr;

    fn partialize(&self) -> PartialArithExpr {
        match self {
            ArithExpr::Nat(n) => PartialArithExpr::Nat(*n),
            ArithExpr::Var(x) => PartialArithExpr::Var(x.clone()),
            ArithExpr::Bin { op, lhs, rhs } => PartialArithExpr::Bin {
                op: *op,
                lhs: Box::new(lhs.partialize()),
                rhs: Box::new(rhs.partialize()),
            },
        }
    }
}

impl Partialize for BoolExpr {
    type Partial = PartialBoolExpr;

    fn partialize(&self) -> PartialBoolExpr {
        match self {
            BoolExpr::True => PartialBoolExpr::True,
            BoolExpr::False => PartialBoolExpr::False,
            BoolExpr::Cmp { op, lhs, rhs } => PartialBoolExpr::Cmp {
                op: *op,
                lhs: Box::new(lhs.partialize()),
                rhs: Box::new(rhs.partialize()),
            },
            BoolExpr::Not(b) => PartialBoolExpr::Not(Box::new(b.partialize())),
            BoolExpr::And(l, r) => PartialBoolExpr::And(Box::new(l.partialize()), Box::new(r.partialize())),
        }
    }
}

impl Partialize for Command {
    type Partial = PartialCommand;

    fn partialize(&self) -> PartialCommand {
        match self {
            Command::Skip => PartialCommand::Skip,
            Command::Assign { var, expr } => PartialCommand::Assign {
                var: var.clone(),
                expr: expr.partialize(),
            },
            Command::Seq(c1, c2) => PartialCommand::Seq(Box::new(c1.partialize()), Box::new(c2.partialize())),
            Command::If {
                cond,
                then_branch,
                else_branch,
            } => PartialCommand::If {
                cond: cond.partialize(),
                then_branch: Box::new(then_branch.partialize()),
                else_branch: Box::new(else_branch.partialize()),
            },
            Command::While { cond, body } => PartialCommand::While {
                cond: cond.partialize(),
                body: Box::new(body.partialize()),
            },
        }
    }
}

impl PartialArithExpr {
    pub fn is_hole(&self) -> bool {
        matches!(self, PartialArithExpr::Hole)
    }

    pub fn bin(op: ArithOp, lhs: PartialArithExpr, rhs: PartialArithExpr) -> Self {
        PartialArithExpr::Bin {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn var(name: impl Into<String>) -> Self {
        PartialArithExpr::Var(name.into())
    }

    /// The total term, if no hole is left.
    pub fn to_total(&self) -> Option<ArithExpr> {
        Some(match self {
            PartialArithExpr::Hole => return None,
            PartialArithExpr::Nat(n) => ArithExpr::Nat(*n),
            PartialArithExpr::Var(x) => ArithExpr::Var(x.clone()),
            PartialArithExpr::Bin { op, lhs, rhs } => ArithExpr::Bin {
                op: *op,
                lhs: Box::new(lhs.to_total()?),
                rhs: Box::new(rhs.to_total()?),
            },
        })
    }

    pub fn count_holes(&self) -> usize {
        match self {
            PartialArithExpr::Hole => 1,
            PartialArithExpr::Nat(_) | PartialArithExpr::Var(_) => 0,
            PartialArithExpr::Bin { lhs, rhs, .. } => lhs.count_holes() + rhs.count_holes(),
        }
    }
}

impl PartialBoolExpr {
    pub fn is_hole(&self) -> bool {
        matches!(self, PartialBoolExpr::Hole)
    }

    pub fn cmp(op: CmpOp, lhs: PartialArithExpr, rhs: PartialArithExpr) -> Self {
        PartialBoolExpr::Cmp {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn to_total(&self) -> Option<BoolExpr> {
        Some(match self {
            PartialBoolExpr::Hole => return None,
            PartialBoolExpr::True => BoolExpr::True,
            PartialBoolExpr::False => BoolExpr::False,
            PartialBoolExpr::Cmp { op, lhs, rhs } => BoolExpr::Cmp {
                op: *op,
                lhs: Box::new(lhs.to_total()?),
                rhs: Box::new(rhs.to_total()?),
            },
            PartialBoolExpr::Not(b) => BoolExpr::Not(Box::new(b.to_total()?)),
            PartialBoolExpr::And(l, r) => BoolExpr::And(Box::new(l.to_total()?), Box::new(r.to_total()?)),
        })
    }

    pub fn count_holes(&self) -> usize {
        match self {
            PartialBoolExpr::Hole => 1,
            PartialBoolExpr::True | PartialBoolExpr::False => 0,
            PartialBoolExpr::Cmp { lhs, rhs, .. } => lhs.count_holes() + rhs.count_holes(),
            PartialBoolExpr::Not(b) => b.count_holes(),
            PartialBoolExpr::And(l, r) => l.count_holes() + r.count_holes(),
        }
    }
}

impl PartialCommand {
    pub fn is_hole(&self) -> bool {
        matches!(self, PartialCommand::Hole)
    }

    pub fn seq(c1: PartialCommand, c2: PartialCommand) -> Self {
        PartialCommand::Seq(Box::new(c1), Box::new(c2))
    }

    pub fn assign(var: impl Into<String>, expr: PartialArithExpr) -> Self {
        PartialCommand::Assign { var: var.into(), expr }
    }

    pub fn if_then_else(cond: PartialBoolExpr, c1: PartialCommand, c2: PartialCommand) -> Self {
        PartialCommand::If {
            cond,
            then_branch: Box::new(c1),
            else_branch: Box::new(c2),
        }
    }

    pub fn while_do(cond: PartialBoolExpr, body: PartialCommand) -> Self {
        PartialCommand::While {
            cond,
            body: Box::new(body),
        }
    }

    pub fn to_total(&self) -> Option<Command> {
        Some(match self {
            PartialCommand::Hole => return None,
            PartialCommand::Skip => Command::Skip,
            PartialCommand::Assign { var, expr } => Command::Assign {
                var: var.clone(),
                expr: expr.to_total()?,
            },
            PartialCommand::Seq(c1, c2) => Command::Seq(Box::new(c1.to_total()?), Box::new(c2.to_total()?)),
            PartialCommand::If {
                cond,
                then_branch,
                else_branch,
            } => Command::If {
                cond: cond.to_total()?,
                then_branch: Box::new(then_branch.to_total()?),
                else_branch: Box::new(else_branch.to_total()?),
            },
            PartialCommand::While { cond, body } => Command::While {
                cond: cond.to_total()?,
                body: Box::new(body.to_total()?),
            },
        })
    }

    pub fn count_holes(&self) -> usize {
        match self {
            PartialCommand::Hole => 1,
            PartialCommand::Skip => 0,
            PartialCommand::Assign { expr, .. } => expr.count_holes(),
            PartialCommand::Seq(c1, c2) => c1.count_holes() + c2.count_holes(),
            PartialCommand::If {
                cond,
                then_branch,
                else_branch,
            } => cond.count_holes() + then_branch.count_holes() + else_branch.count_holes(),
            PartialCommand::While { cond, body } => cond.count_holes() + body.count_holes(),
        }
    }
}
