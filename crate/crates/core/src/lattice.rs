//! Prefix lattices of partial terms and states.
//!
//! Every total term `t` induces the finite lattice `↓t` of partial terms
//! obtained by replacing subterms with holes. Holes are the bottom element,
//! the hole-free embedding of `t` is the top. Partial states are ordered
//! pointwise and only over identical domains; pairs are ordered
//! componentwise.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::state::{PartialState, State};
use crate::syntax::{ArithExpr, BoolExpr, Command, PartialArithExpr, PartialBoolExpr, PartialCommand, Partialize};

/// Path of child indices from the root of a term.
///
/// Children are numbered left to right as they appear in the concrete
/// syntax: the guard of `if`/`while` is child 0, branches and bodies follow.
/// For states the single index is the variable's slot in the domain.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn new(path: Vec<usize>) -> Self {
        Position(path)
    }

    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn path(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("root")?;
        for i in &self.0 {
            write!(f, ".{i}")?;
        }
        Ok(())
    }
}

/// Two terms that do not live in the same prefix lattice, or do so but are
/// not ordered as required.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("at {position}: {reason}")]
pub struct LatticeMismatch {
    pub position: Position,
    pub reason: String,
}

impl LatticeMismatch {
    pub fn new(path: &[usize], reason: impl Into<String>) -> Self {
        LatticeMismatch {
            position: Position(path.to_vec()),
            reason: reason.into(),
        }
    }
}

/// Join of two terms that have no common upper bound.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("no join: {0}")]
pub struct JoinError(pub LatticeMismatch);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("lattice has {cardinality} elements, more than the bound of {bound}")]
pub struct SizeExceeded {
    pub cardinality: Cardinality,
    pub bound: u64,
}

pub const DEFAULT_DOWNSET_BOUND: u64 = 65_536;

/// Saturating lattice cardinality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cardinality(pub u128);

impl Cardinality {
    pub const ONE: Cardinality = Cardinality(1);

    pub fn times(self, other: Cardinality) -> Cardinality {
        Cardinality(self.0.saturating_mul(other.0))
    }

    pub fn plus_one(self) -> Cardinality {
        Cardinality(self.0.saturating_add(1))
    }

    pub fn exceeds(self, bound: u64) -> bool {
        self.0 > bound as u128
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == u128::MAX {
            write!(f, ">= {}", u128::MAX)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Uniform read-only view of the nodes of partial terms.
#[derive(Clone, Copy, Debug)]
pub(crate) enum NodeRef<'a> {
    Arith(&'a PartialArithExpr),
    Bool(&'a PartialBoolExpr),
    Cmd(&'a PartialCommand),
}

impl<'a> NodeRef<'a> {
    pub(crate) fn is_hole(self) -> bool {
        match self {
            NodeRef::Arith(a) => a.is_hole(),
            NodeRef::Bool(b) => b.is_hole(),
            NodeRef::Cmd(c) => c.is_hole(),
        }
    }

    /// Same constructor and same non-child payload.
    fn same_label(self, other: NodeRef<'_>) -> bool {
        use PartialArithExpr as A;
        use PartialBoolExpr as B;
        use PartialCommand as C;
        match (self, other) {
            (NodeRef::Arith(x), NodeRef::Arith(y)) => match (x, y) {
                (A::Hole, A::Hole) => true,
                (A::Nat(n), A::Nat(m)) => n == m,
                (A::Var(v), A::Var(w)) => v == w,
                (A::Bin { op: o1, .. }, A::Bin { op: o2, .. }) => o1 == o2,
                _ => false,
            },
            (NodeRef::Bool(x), NodeRef::Bool(y)) => match (x, y) {
                (B::Hole, B::Hole) | (B::True, B::True) | (B::False, B::False) => true,
                (B::Cmp { op: o1, .. }, B::Cmp { op: o2, .. }) => o1 == o2,
                (B::Not(_), B::Not(_)) | (B::And(..), B::And(..)) => true,
                _ => false,
            },
            (NodeRef::Cmd(x), NodeRef::Cmd(y)) => match (x, y) {
                (C::Hole, C::Hole) | (C::Skip, C::Skip) => true,
                (C::Assign { var: v, .. }, C::Assign { var: w, .. }) => v == w,
                (C::Seq(..), C::Seq(..)) | (C::If { .. }, C::If { .. }) => true,
                (C::While { .. }, C::While { .. }) => true,
                _ => false,
            },
            _ => false,
        }
    }

    pub(crate) fn children(self) -> Vec<NodeRef<'a>> {
        use PartialArithExpr as A;
        use PartialBoolExpr as B;
        use PartialCommand as C;
        match self {
            NodeRef::Arith(A::Bin { lhs, rhs, .. }) => vec![NodeRef::Arith(lhs), NodeRef::Arith(rhs)],
            NodeRef::Arith(_) => vec![],
            NodeRef::Bool(B::Cmp { lhs, rhs, .. }) => vec![NodeRef::Arith(lhs), NodeRef::Arith(rhs)],
            NodeRef::Bool(B::Not(b)) => vec![NodeRef::Bool(b)],
            NodeRef::Bool(B::And(l, r)) => vec![NodeRef::Bool(l), NodeRef::Bool(r)],
            NodeRef::Bool(_) => vec![],
            NodeRef::Cmd(C::Assign { expr, .. }) => vec![NodeRef::Arith(expr)],
            NodeRef::Cmd(C::Seq(c1, c2)) => vec![NodeRef::Cmd(c1), NodeRef::Cmd(c2)],
            NodeRef::Cmd(C::If {
                cond,
                then_branch,
                else_branch,
            }) => vec![
                NodeRef::Bool(cond),
                NodeRef::Cmd(then_branch),
                NodeRef::Cmd(else_branch),
            ],
            NodeRef::Cmd(C::While { cond, body }) => vec![NodeRef::Bool(cond), NodeRef::Cmd(body)],
            NodeRef::Cmd(_) => vec![],
        }
    }

    fn describe(self) -> String {
        match self {
            NodeRef::Arith(a) => format!("`{a}`"),
            NodeRef::Bool(b) => format!("`{b}`"),
            NodeRef::Cmd(c) => format!("`{c}`"),
        }
    }

    fn node_count(self) -> usize {
        1 + self.children().into_iter().map(NodeRef::node_count).sum::<usize>()
    }
}

fn first_not_below(lower: NodeRef<'_>, upper: NodeRef<'_>, path: &mut Vec<usize>) -> Option<LatticeMismatch> {
    if lower.is_hole() {
        return None;
    }
    if !lower.same_label(upper) {
        let reason = if upper.is_hole() {
            format!("{} is above a hole", lower.describe())
        } else {
            format!("{} does not match {}", lower.describe(), upper.describe())
        };
        return Some(LatticeMismatch::new(path, reason));
    }
    for (i, (l, u)) in lower.children().into_iter().zip(upper.children()).enumerate() {
        path.push(i);
        let found = first_not_below(l, u, path);
        path.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

fn collect_holes(node: NodeRef<'_>, path: &mut Vec<usize>, out: &mut Vec<Position>) {
    if node.is_hole() {
        out.push(Position(path.clone()));
        return;
    }
    for (i, child) in node.children().into_iter().enumerate() {
        path.push(i);
        collect_holes(child, path, out);
        path.pop();
    }
}

/// Positions of all holes in `c`, in preorder.
pub fn hole_positions(c: &PartialCommand) -> Vec<Position> {
    let mut out = Vec::new();
    collect_holes(NodeRef::Cmd(c), &mut Vec::new(), &mut out);
    out
}

/// Partial order with joins on one kind of partial term.
pub trait Lattice: Clone + PartialEq {
    /// The first position at which `self ⊑ other` fails, if any.
    fn not_below(&self, other: &Self) -> Option<LatticeMismatch>;

    fn leq(&self, other: &Self) -> bool {
        self.not_below(other).is_none()
    }

    /// Least upper bound.
    fn join(&self, other: &Self) -> Result<Self, JoinError>;
}

macro_rules! node_lattice {
    ($ty:ty, $variant:ident, $join:ident) => {
        impl Lattice for $ty {
            fn not_below(&self, other: &Self) -> Option<LatticeMismatch> {
                first_not_below(NodeRef::$variant(self), NodeRef::$variant(other), &mut Vec::new())
            }

            fn join(&self, other: &Self) -> Result<Self, JoinError> {
                $join(self, other, &mut Vec::new()).map_err(JoinError)
            }
        }
    };
}

node_lattice!(PartialArithExpr, Arith, join_arith);
node_lattice!(PartialBoolExpr, Bool, join_bool);
node_lattice!(PartialCommand, Cmd, join_cmd);

type JoinResult<T> = Result<T, LatticeMismatch>;

fn join_child<T>(
    path: &mut Vec<usize>,
    index: usize,
    f: impl FnOnce(&mut Vec<usize>) -> JoinResult<T>,
) -> JoinResult<T> {
    path.push(index);
    let r = f(path);
    path.pop();
    r
}

fn incompatible(path: &[usize], l: impl fmt::Display, r: impl fmt::Display) -> LatticeMismatch {
    LatticeMismatch::new(path, format!("`{l}` and `{r}` have no common upper bound"))
}

fn join_arith(l: &PartialArithExpr, r: &PartialArithExpr, path: &mut Vec<usize>) -> JoinResult<PartialArithExpr> {
    use PartialArithExpr as A;
    Ok(match (l, r) {
        (A::Hole, x) | (x, A::Hole) => x.clone(),
        (A::Nat(n), A::Nat(m)) if n == m => A::Nat(*n),
        (A::Var(x), A::Var(y)) if x == y => A::Var(x.clone()),
        (
            A::Bin {
                op: o1,
                lhs: l1,
                rhs: r1,
            },
            A::Bin {
                op: o2,
                lhs: l2,
                rhs: r2,
            },
        ) if o1 == o2 => A::bin(
            *o1,
            join_child(path, 0, |p| join_arith(l1, l2, p))?,
            join_child(path, 1, |p| join_arith(r1, r2, p))?,
        ),
        _ => return Err(incompatible(path, l, r)),
    })
}

fn join_bool(l: &PartialBoolExpr, r: &PartialBoolExpr, path: &mut Vec<usize>) -> JoinResult<PartialBoolExpr> {
    use PartialBoolExpr as B;
    Ok(match (l, r) {
        (B::Hole, x) | (x, B::Hole) => x.clone(),
        (B::True, B::True) => B::True,
        (B::False, B::False) => B::False,
        (
            B::Cmp {
                op: o1,
                lhs: l1,
                rhs: r1,
            },
            B::Cmp {
                op: o2,
                lhs: l2,
                rhs: r2,
            },
        ) if o1 == o2 => B::cmp(
            *o1,
            join_child(path, 0, |p| join_arith(l1, l2, p))?,
            join_child(path, 1, |p| join_arith(r1, r2, p))?,
        ),
        (B::Not(x), B::Not(y)) => B::Not(Box::new(join_child(path, 0, |p| join_bool(x, y, p))?)),
        (B::And(l1, r1), B::And(l2, r2)) => B::And(
            Box::new(join_child(path, 0, |p| join_bool(l1, l2, p))?),
            Box::new(join_child(path, 1, |p| join_bool(r1, r2, p))?),
        ),
        _ => return Err(incompatible(path, l, r)),
    })
}

fn join_cmd(l: &PartialCommand, r: &PartialCommand, path: &mut Vec<usize>) -> JoinResult<PartialCommand> {
    use PartialCommand as C;
    Ok(match (l, r) {
        (C::Hole, x) | (x, C::Hole) => x.clone(),
        (C::Skip, C::Skip) => C::Skip,
        (C::Assign { var: x, expr: a1 }, C::Assign { var: y, expr: a2 }) if x == y => C::Assign {
            var: x.clone(),
            expr: join_child(path, 0, |p| join_arith(a1, a2, p))?,
        },
        (C::Seq(a1, b1), C::Seq(a2, b2)) => C::seq(
            join_child(path, 0, |p| join_cmd(a1, a2, p))?,
            join_child(path, 1, |p| join_cmd(b1, b2, p))?,
        ),
        (
            C::If {
                cond: b1,
                then_branch: t1,
                else_branch: e1,
            },
            C::If {
                cond: b2,
                then_branch: t2,
                else_branch: e2,
            },
        ) => C::if_then_else(
            join_child(path, 0, |p| join_bool(b1, b2, p))?,
            join_child(path, 1, |p| join_cmd(t1, t2, p))?,
            join_child(path, 2, |p| join_cmd(e1, e2, p))?,
        ),
        (C::While { cond: b1, body: c1 }, C::While { cond: b2, body: c2 }) => C::while_do(
            join_child(path, 0, |p| join_bool(b1, b2, p))?,
            join_child(path, 1, |p| join_cmd(c1, c2, p))?,
        ),
        _ => return Err(incompatible(path, l, r)),
    })
}

fn domain_mismatch(l: &PartialState, r: &PartialState) -> LatticeMismatch {
    LatticeMismatch::new(
        &[],
        format!(
            "state domains differ: [{}] vs [{}]",
            l.domain().names().join(", "),
            r.domain().names().join(", ")
        ),
    )
}

impl Lattice for PartialState {
    fn not_below(&self, other: &Self) -> Option<LatticeMismatch> {
        if self.domain() != other.domain() {
            return Some(domain_mismatch(self, other));
        }
        self.values()
            .iter()
            .zip(other.values())
            .enumerate()
            .find_map(|(i, (l, u))| match (l, u) {
                (None, _) => None,
                (Some(a), Some(b)) if a == b => None,
                (Some(a), _) => Some(LatticeMismatch::new(
                    &[i],
                    format!(
                        "`{} = {a}` is not below `{} = {}`",
                        self.domain().names()[i],
                        self.domain().names()[i],
                        u.map_or("_".to_owned(), |v| v.to_string())
                    ),
                )),
            })
    }

    fn join(&self, other: &Self) -> Result<Self, JoinError> {
        if self.domain() != other.domain() {
            return Err(JoinError(domain_mismatch(self, other)));
        }
        let values = self
            .values()
            .iter()
            .zip(other.values())
            .enumerate()
            .map(|(i, (l, r))| match (l, r) {
                (None, x) | (x, None) => Ok(*x),
                (Some(a), Some(b)) if a == b => Ok(Some(*a)),
                (Some(a), Some(b)) => Err(JoinError(LatticeMismatch::new(
                    &[i],
                    format!("`{}` is both {a} and {b}", self.domain().names()[i]),
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PartialState::from_parts(self.domain().clone(), values))
    }
}

impl<A: Lattice, B: Lattice> Lattice for (A, B) {
    fn not_below(&self, other: &Self) -> Option<LatticeMismatch> {
        let prefix = |index: usize, m: LatticeMismatch| {
            let mut path = vec![index];
            path.extend_from_slice(m.position.path());
            LatticeMismatch::new(&path, m.reason)
        };
        self.0
            .not_below(&other.0)
            .map(|m| prefix(0, m))
            .or_else(|| self.1.not_below(&other.1).map(|m| prefix(1, m)))
    }

    fn join(&self, other: &Self) -> Result<Self, JoinError> {
        Ok((self.0.join(&other.0)?, self.1.join(&other.1)?))
    }
}

/// Total terms whose prefix lattice can be sized and enumerated.
pub trait Downset: Partialize {
    /// Number of prefixes, computed by the product recurrence.
    fn downset_size(&self) -> Cardinality;

    /// Every prefix exactly once, holes first, left to right.
    fn enumerate_unbounded(&self) -> Vec<Self::Partial>;

    fn enumerate_downset(&self, bound: u64) -> Result<Vec<Self::Partial>, SizeExceeded> {
        let cardinality = self.downset_size();
        if cardinality.exceeds(bound) {
            return Err(SizeExceeded { cardinality, bound });
        }
        Ok(self.enumerate_unbounded())
    }
}

fn product<L: Clone, R: Clone, T>(left: &[L], right: &[R], build: impl Fn(L, R) -> T) -> Vec<T> {
    let mut out = Vec::with_capacity(left.len() * right.len());
    for l in left {
        for r in right {
            out.push(build(l.clone(), r.clone()));
        }
    }
    out
}

impl Downset for ArithExpr {
    fn downset_size(&self) -> Cardinality {
        match self {
            ArithExpr::Nat(_) | ArithExpr::Var(_) => Cardinality(2),
            ArithExpr::Bin { lhs, rhs, .. } => lhs.downset_size().times(rhs.downset_size()).plus_one(),
        }
    }

    fn enumerate_unbounded(&self) -> Vec<PartialArithExpr> {
        let mut out = vec![PartialArithExpr::Hole];
        match self {
            ArithExpr::Nat(_) | ArithExpr::Var(_) => out.push(self.partialize()),
            ArithExpr::Bin { op, lhs, rhs } => out.extend(product(
                &lhs.enumerate_unbounded(),
                &rhs.enumerate_unbounded(),
                |l, r| PartialArithExpr::bin(*op, l, r),
            )),
        }
        out
    }
}

impl Downset for BoolExpr {
    fn downset_size(&self) -> Cardinality {
        match self {
            BoolExpr::True | BoolExpr::False => Cardinality(2),
            BoolExpr::Cmp { lhs, rhs, .. } => lhs.downset_size().times(rhs.downset_size()).plus_one(),
            BoolExpr::Not(b) => b.downset_size().plus_one(),
            BoolExpr::And(l, r) => l.downset_size().times(r.downset_size()).plus_one(),
        }
    }

    fn enumerate_unbounded(&self) -> Vec<PartialBoolExpr> {
        let mut out = vec![PartialBoolExpr::Hole];
        match self {
            BoolExpr::True | BoolExpr::False => out.push(self.partialize()),
            BoolExpr::Cmp { op, lhs, rhs } => out.extend(product(
                &lhs.enumerate_unbounded(),
                &rhs.enumerate_unbounded(),
                |l, r| PartialBoolExpr::cmp(*op, l, r),
            )),
            BoolExpr::Not(b) => out.extend(
                b.enumerate_unbounded()
                    .into_iter()
                    .map(|x| PartialBoolExpr::Not(Box::new(x))),
            ),
            BoolExpr::And(l, r) => out.extend(product(&l.enumerate_unbounded(), &r.enumerate_unbounded(), |l, r| {
                PartialBoolExpr::And(Box::new(l), Box::new(r))
            })),
        }
        out
    }
}

impl Downset for Command {
    fn downset_size(&self) -> Cardinality {
        match self {
            Command::Skip => Cardinality(2),
            Command::Assign { expr, .. } => expr.downset_size().plus_one(),
            Command::Seq(c1, c2) => c1.downset_size().times(c2.downset_size()).plus_one(),
            Command::If {
                cond,
                then_branch,
                else_branch,
            } => cond
                .downset_size()
                .times(then_branch.downset_size())
                .times(else_branch.downset_size())
                .plus_one(),
            Command::While { cond, body } => cond.downset_size().times(body.downset_size()).plus_one(),
        }
    }

    fn enumerate_unbounded(&self) -> Vec<PartialCommand> {
        let mut out = vec![PartialCommand::Hole];
        match self {
            Command::Skip => out.push(PartialCommand::Skip),
            Command::Assign { var, expr } => out.extend(
                expr.enumerate_unbounded()
                    .into_iter()
                    .map(|a| PartialCommand::assign(var.clone(), a)),
            ),
            Command::Seq(c1, c2) => out.extend(product(
                &c1.enumerate_unbounded(),
                &c2.enumerate_unbounded(),
                PartialCommand::seq,
            )),
            Command::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let conds = cond.enumerate_unbounded();
                let branches = product(
                    &then_branch.enumerate_unbounded(),
                    &else_branch.enumerate_unbounded(),
                    |t, e| (t, e),
                );
                out.extend(product(&conds, &branches, |b, (t, e)| {
                    PartialCommand::if_then_else(b, t, e)
                }));
            }
            Command::While { cond, body } => out.extend(product(
                &cond.enumerate_unbounded(),
                &body.enumerate_unbounded(),
                PartialCommand::while_do,
            )),
        }
        out
    }
}

impl Partialize for State {
    type Partial = PartialState;

    fn partialize(&self) -> PartialState {
        State::partialize(self)
    }
}

impl Downset for State {
    fn downset_size(&self) -> Cardinality {
        (0..self.len()).fold(Cardinality::ONE, |acc, _| acc.times(Cardinality(2)))
    }

    fn enumerate_unbounded(&self) -> Vec<PartialState> {
        let mut rows: Vec<Vec<Option<u64>>> = vec![Vec::with_capacity(self.len())];
        for &v in self.values() {
            rows = rows
                .into_iter()
                .flat_map(|row| {
                    [None, Some(v)].into_iter().map(move |x| {
                        let mut next = row.clone();
                        next.push(x);
                        next
                    })
                })
                .collect();
        }
        rows.into_iter()
            .map(|values| PartialState::from_parts(self.domain().clone(), values))
            .collect()
    }
}

impl<A: Partialize, B: Partialize> Partialize for (A, B) {
    type Partial = (A::Partial, B::Partial);

    fn partialize(&self) -> Self::Partial {
        (self.0.partialize(), self.1.partialize())
    }
}

impl<A, B> Downset for (A, B)
where
    A: Downset,
    B: Downset,
    A::Partial: Clone,
    B::Partial: Clone,
{
    fn downset_size(&self) -> Cardinality {
        self.0.downset_size().times(self.1.downset_size())
    }

    fn enumerate_unbounded(&self) -> Vec<Self::Partial> {
        product(&self.0.enumerate_unbounded(), &self.1.enumerate_unbounded(), |a, b| {
            (a, b)
        })
    }
}

pub fn downset_size<T: Downset>(top: &T) -> Cardinality {
    top.downset_size()
}

pub fn enumerate_downset<T: Downset>(top: &T, bound: u64) -> Result<Vec<T::Partial>, SizeExceeded> {
    top.enumerate_downset(bound)
}

/// A partial term together with the total term it is a prefix of.
///
/// Only [`check_prefix`] constructs one, so holding a witness means the
/// ordering has been checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixWitness<T: Partialize> {
    element: T::Partial,
    top: T,
}

impl<T: Partialize> PrefixWitness<T> {
    pub fn element(&self) -> &T::Partial {
        &self.element
    }

    pub fn top(&self) -> &T {
        &self.top
    }

    pub fn into_parts(self) -> (T::Partial, T) {
        (self.element, self.top)
    }
}

pub fn check_prefix<T>(element: T::Partial, top: T) -> Result<PrefixWitness<T>, LatticeMismatch>
where
    T: Partialize,
    T::Partial: Lattice,
{
    match element.not_below(&top.partialize()) {
        Some(mismatch) => Err(mismatch),
        None => Ok(PrefixWitness { element, top }),
    }
}

/// Fixed-width bitset used to encode prefixes as sets of present nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mask(Box<[u64]>);

impl Mask {
    pub fn empty(bits: usize) -> Self {
        Mask(vec![0; bits.div_ceil(64).max(1)].into_boxed_slice())
    }

    pub fn insert(&mut self, bit: usize) {
        self.0[bit / 64] |= 1 << (bit % 64);
    }

    pub fn contains(&self, bit: usize) -> bool {
        self.0[bit / 64] & (1 << (bit % 64)) != 0
    }

    pub fn is_subset(&self, other: &Mask) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a & !b == 0)
    }

    pub fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    pub fn with(&self, bit: usize) -> Mask {
        let mut m = self.clone();
        m.insert(bit);
        m
    }
}

/// Preorder numbering of the nodes of a top command.
///
/// A prefix of the top is determined by the set of top nodes it keeps, so
/// it can be encoded as a [`Mask`]; on prefixes of the same top, `⊑` is
/// mask inclusion.
#[derive(Clone, Debug)]
pub struct PrefixIndex {
    top: PartialCommand,
    parents: Vec<Option<usize>>,
}

impl PrefixIndex {
    pub fn new(top: &Command) -> Self {
        let top = top.partialize();
        let mut parents = Vec::new();
        fn walk(node: NodeRef<'_>, parent: Option<usize>, parents: &mut Vec<Option<usize>>) {
            let me = parents.len();
            parents.push(parent);
            for child in node.children() {
                walk(child, Some(me), parents);
            }
        }
        walk(NodeRef::Cmd(&top), None, &mut parents);
        PrefixIndex { top, parents }
    }

    pub fn node_count(&self) -> usize {
        self.parents.len()
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parents[node]
    }

    /// The mask of `element`, or `None` if it is not a prefix of the top.
    pub fn mask_of(&self, element: &PartialCommand) -> Option<Mask> {
        fn walk(elem: NodeRef<'_>, top: NodeRef<'_>, next: &mut usize, mask: &mut Mask) -> bool {
            if elem.is_hole() {
                *next += top.node_count();
                return true;
            }
            if !elem.same_label(top) {
                return false;
            }
            mask.insert(*next);
            *next += 1;
            elem.children()
                .into_iter()
                .zip(top.children())
                .all(|(e, t)| walk(e, t, next, mask))
        }
        let mut mask = Mask::empty(self.node_count());
        let mut next = 0;
        walk(NodeRef::Cmd(element), NodeRef::Cmd(&self.top), &mut next, &mut mask).then_some(mask)
    }
}

/// Mask of a partial state: bit `i` set when slot `i` is not a hole.
pub fn state_mask(state: &PartialState) -> u64 {
    assert!(state.len() <= 64, "state masks cover at most 64 variables");
    state
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_some())
        .fold(0u64, |m, (i, _)| m | (1 << i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_arith, parse_command, parse_partial_arith, parse_partial_command, parse_state};

    fn pa(s: &str) -> PartialArithExpr {
        parse_partial_arith(s).unwrap()
    }

    #[test]
    fn ordering_examples() {
        assert!(PartialArithExpr::Hole.leq(&pa("x + y")));
        assert!(pa("x + _").leq(&pa("x + y")));
        assert!(!pa("x + y").leq(&pa("x + _")));
        assert!(!pa("1").leq(&pa("2")));
        let x = parse_state("x = 1").unwrap().partialize();
        let y = parse_state("y = 1").unwrap().partialize();
        assert!(!x.leq(&y));
        assert!(x.leq(&x));
    }

    #[test]
    fn join_examples() {
        assert_eq!(pa("x + _").join(&pa("_ + y")).unwrap(), pa("x + y"));
        let w = parse_partial_command("while (b <= r) do { r := r - b }").unwrap();
        assert_eq!(PartialCommand::Hole.join(&w).unwrap(), w);
        let err = pa("1").join(&pa("2")).unwrap_err();
        assert_eq!(err.0.position, Position::root());
        let err = pa("x + 1").join(&pa("x + 2")).unwrap_err();
        assert_eq!(err.0.position, Position::new(vec![1]));
    }

    #[test]
    fn state_join_requires_same_domain() {
        let a = parse_state("x = 1, y = 2").unwrap();
        let b = parse_state("y = 2, x = 1").unwrap();
        assert!(a.partialize().join(&b.partialize()).is_err());
        let l = a.partialize().update("y", None);
        let r = a.partialize().update("x", None);
        assert_eq!(l.join(&r).unwrap(), a.partialize());
    }

    #[test]
    fn check_prefix_examples() {
        let top = parse_command("if (y = 1) then { y := x + 1 } else { y := y + 1 } ; z := z + 1").unwrap();
        assert!(check_prefix(PartialCommand::Hole, top.clone()).is_ok());
        let slice = parse_partial_command("if (y = 1) then { _ } else { y := y + 1 } ; _").unwrap();
        let w = check_prefix(slice.clone(), top).unwrap();
        assert_eq!(w.element(), &slice);
        let err = check_prefix(parse_partial_command("x := 1").unwrap(), Command::Skip).unwrap_err();
        assert_eq!(err.position, Position::root());
        let err = check_prefix(
            parse_partial_command("skip ; y := 2").unwrap(),
            parse_command("skip ; y := 3").unwrap(),
        )
        .unwrap_err();
        assert_eq!(err.position, Position::new(vec![1, 0]));
    }

    #[test]
    fn enumerate_sum() {
        let top = parse_arith("x + y").unwrap();
        assert_eq!(top.downset_size(), Cardinality(5));
        let all: Vec<String> = top
            .enumerate_downset(100)
            .unwrap()
            .iter()
            .map(|a| a.to_string())
            .collect();
        assert_eq!(all, ["_", "_ + _", "_ + y", "x + _", "x + y"]);
        assert_eq!(ArithExpr::Nat(5).enumerate_downset(10).unwrap().len(), 2);
        assert_eq!(Command::Skip.downset_size(), Cardinality(2));
    }

    #[test]
    fn enumerate_states_and_pairs() {
        let mu = parse_state("x = 1, y = 2").unwrap();
        let all: Vec<String> = mu
            .enumerate_downset(10)
            .unwrap()
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(all, ["x = _, y = _", "x = _, y = 2", "x = 1, y = _", "x = 1, y = 2"]);
        let pair = (Command::Skip, mu);
        assert_eq!(pair.downset_size(), Cardinality(8));
        assert_eq!(pair.enumerate_downset(8).unwrap().len(), 8);
        assert_eq!(State::empty().downset_size(), Cardinality(1));
    }

    #[test]
    fn size_guard() {
        let top = parse_arith("x + y").unwrap();
        let err = top.enumerate_downset(4).unwrap_err();
        assert_eq!(err.cardinality, Cardinality(5));
    }

    #[test]
    fn masks_agree_with_order() {
        let top = parse_command("if (x = 1) then { y := x + 1 } else { skip } ; z := 2").unwrap();
        let index = PrefixIndex::new(&top);
        let all = top.enumerate_unbounded();
        let masks: Vec<Mask> = all.iter().map(|p| index.mask_of(p).unwrap()).collect();
        for (a, ma) in all.iter().zip(&masks) {
            for (b, mb) in all.iter().zip(&masks) {
                assert_eq!(a.leq(b), ma.is_subset(mb), "{a} vs {b}");
            }
        }
        assert!(index.mask_of(&parse_partial_command("skip").unwrap()).is_none());
    }

    #[test]
    fn holes_listed_in_preorder() {
        let c = parse_partial_command("if (_) then { _ } else { x := _ + 1 } ; _").unwrap();
        let holes: Vec<String> = hole_positions(&c).iter().map(|p| p.to_string()).collect();
        assert_eq!(holes, ["root.0.0", "root.0.1", "root.0.2.0.0", "root.1"]);
    }
}
