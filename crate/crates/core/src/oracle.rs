//! Exhaustive certification of the forward/backward Galois connection.
//!
//! For one derivation, the input lattice `P = ↓program × ↓input` and the
//! output lattice `Q = ↓output` are enumerated in full. Elements are encoded
//! as bitsets over the nodes of the top term (see [`PrefixIndex`]) so that
//! `⊑` becomes mask inclusion, which keeps the quadratic law checks cheap.
//!
//! [`GaloisOracle`] also answers backward-slicing queries without using the
//! backward rules at all: the least `p` with `q ⊑ fwd(p)` is found by
//! scanning the forward table.

use std::collections::HashMap;
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{Cardinality, Downset, Lattice, Mask, PrefixIndex, SizeExceeded};
use crate::slicer::{fwd_cmd, SliceError, SliceOutcome};
use crate::state::PartialState;
use crate::syntax::{PartialCommand, Partialize};
use crate::tracer::{eval_cmd, Derivation, DEFAULT_FUEL};

/// Hard ceilings that protect against instances whose component lattices
/// are individually small but whose product is not.
pub const MAX_INPUT_ELEMENTS: u128 = 1 << 26;
pub const MAX_PAIR_CHECKS: u128 = 1 << 34;
/// Up to this many pairs monotonicity is checked on every ordered pair;
/// beyond it only on covering pairs, which is equivalent by transitivity.
pub const ALL_PAIRS_LIMIT: u128 = 1 << 26;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    SizeExceeded(#[from] SizeExceeded),
    #[error("criterion `{0}` is not below the output of the run")]
    NotBelowOutput(String),
    #[error("no least explanation for `{criterion}`: `{a}` and `{b}` are incomparable")]
    NoLeastElement { criterion: String, a: String, b: String },
    #[error(transparent)]
    Slice(#[from] SliceError),
    #[error("law violated: {0}")]
    LawViolation(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    /// fwd and bwd land inside their lattices and never fail.
    Closure,
    FwdMonotone,
    BwdMonotone,
    /// bwd(fwd(p)) ⊑ p
    Deflation,
    /// q ⊑ fwd(bwd(q))
    Inflation,
    /// bwd(q) ⊑ p ⟺ q ⊑ fwd(p)
    GaloisEquivalence,
    /// bwd(q) is the least p with q ⊑ fwd(p)
    Minimality,
}

impl Law {
    pub fn name(self) -> &'static str {
        match self {
            Law::Closure => "closure",
            Law::FwdMonotone => "fwd_monotone",
            Law::BwdMonotone => "bwd_monotone",
            Law::Deflation => "deflation",
            Law::Inflation => "inflation",
            Law::GaloisEquivalence => "galois_equivalence",
            Law::Minimality => "minimality",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub left: String,
    pub right: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails { counterexample: Counterexample },
    Skipped { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub law: Law,
    /// Elements or pairs examined.
    pub checked: u64,
    /// How the quantifier was discharged.
    pub strategy: &'static str,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeSizes {
    pub program: Cardinality,
    pub input_state: Cardinality,
    pub output_state: Cardinality,
    /// `program × input_state`
    pub input_pairs: Cardinality,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub program: String,
    pub input: String,
    pub output: String,
    pub sizes: LatticeSizes,
    pub laws: Vec<LawReport>,
    pub holds: bool,
    pub elapsed_ms: u64,
}

impl CheckReport {
    pub fn law(&self, law: Law) -> Option<&LawReport> {
        self.laws.iter().find(|l| l.law == law)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "program: {}", self.program)?;
        writeln!(f, "input:   {}", self.input)?;
        writeln!(f, "output:  {}", self.output)?;
        writeln!(
            f,
            "lattices: program {} x input {} = {} elements; output {} elements",
            self.sizes.program, self.sizes.input_state, self.sizes.input_pairs, self.sizes.output_state
        )?;
        for l in &self.laws {
            match &l.verdict {
                Verdict::Holds => writeln!(
                    f,
                    "  {:<20} holds    ({} checked, {})",
                    l.law.name(),
                    l.checked,
                    l.strategy
                )?,
                Verdict::Fails { counterexample: c } => {
                    writeln!(f, "  {:<20} FAILS    {}", l.law.name(), c.detail)?;
                    writeln!(f, "  {:<20}   left:  {}", "", c.left)?;
                    writeln!(f, "  {:<20}   right: {}", "", c.right)?;
                }
                Verdict::Skipped { reason } => writeln!(f, "  {:<20} skipped  ({reason})", l.law.name())?,
            }
        }
        write!(
            f,
            "verdict: {} in {} ms",
            if self.holds { "all laws hold" } else { "VIOLATED" },
            self.elapsed_ms
        )
    }
}

/// Sum of the three component lattice sizes, the quantity compared against
/// the user-facing size bound.
pub fn combined_size(d: &Derivation) -> Cardinality {
    let p = d.program.downset_size().0;
    let i = d.input.downset_size().0;
    let o = d.output.downset_size().0;
    Cardinality(p.saturating_add(i).saturating_add(o))
}

/// Element of the input lattice as (program index, input-state mask).
type InputElem = (u32, u64);

/// Enumerated lattices of one derivation plus its forward table.
pub struct GaloisOracle<'d> {
    derivation: &'d Derivation,
    index: PrefixIndex,
    programs: Vec<PartialCommand>,
    program_masks: Vec<Mask>,
    program_lookup: HashMap<Mask, u32>,
    in_vars: usize,
    out_vars: usize,
    /// Output mask of fwd(p), `None` where fwd failed or left the lattice,
    /// indexed by `program index << in_vars | input-state enumeration index`.
    fwd: Vec<Result<u64, String>>,
}

/// Bit `i` of an enumeration index addresses the variable enumerated at
/// depth `n - 1 - i`; masks address variable `i` by bit `i`. The conversion
/// is its own inverse.
fn reverse_bits(k: u64, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        k.reverse_bits() >> (64 - n)
    }
}

fn state_from_mask(top: &crate::state::State, mask: u64) -> PartialState {
    PartialState::from_parts(
        top.domain().clone(),
        top.values()
            .iter()
            .enumerate()
            .map(|(i, v)| (mask >> i & 1 == 1).then_some(*v))
            .collect(),
    )
}

fn mask_of_state(s: &PartialState) -> u64 {
    crate::lattice::state_mask(s)
}

fn subset(a: u64, b: u64) -> bool {
    a & !b == 0
}

impl<'d> GaloisOracle<'d> {
    /// Enumerates the lattices of `d` and tabulates the forward slice of
    /// every input element. `bound` limits the combined lattice size.
    pub fn new(d: &'d Derivation, bound: u64) -> Result<Self, SizeExceeded> {
        let combined = combined_size(d);
        if combined.exceeds(bound) {
            return Err(SizeExceeded {
                cardinality: combined,
                bound,
            });
        }
        let sizes = sizes_of(d);
        if sizes.input_pairs.0 > MAX_INPUT_ELEMENTS {
            return Err(SizeExceeded {
                cardinality: sizes.input_pairs,
                bound: MAX_INPUT_ELEMENTS as u64,
            });
        }
        let pair_checks = sizes.input_pairs.times(sizes.output_state);
        if pair_checks.0 > MAX_PAIR_CHECKS {
            return Err(SizeExceeded {
                cardinality: pair_checks,
                bound: MAX_PAIR_CHECKS as u64,
            });
        }
        let index = PrefixIndex::new(&d.program);
        let programs = d.program.enumerate_unbounded();
        let program_masks: Vec<Mask> = programs
            .par_iter()
            .map(|p| index.mask_of(p).expect("enumerated programs are prefixes of the top"))
            .collect();
        let program_lookup = program_masks
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i as u32))
            .collect();
        let in_vars = d.input.len();
        let out_vars = d.output.len();
        let output_top = d.output.partialize();
        let per_program = 1usize << in_vars;
        let fwd = (0..programs.len() * per_program)
            .into_par_iter()
            .map(|p| {
                let c = &programs[p / per_program];
                let mu = state_from_mask(&d.input, reverse_bits((p % per_program) as u64, in_vars));
                match fwd_cmd(&d.trace, &mu, c) {
                    Ok(out) if out.leq(&output_top) => Ok(mask_of_state(&out)),
                    Ok(out) => Err(format!("fwd({c}, {mu}) = {out} is not below the output")),
                    Err(e) => Err(format!("fwd({c}, {mu}) failed: {e}")),
                }
            })
            .collect();
        Ok(GaloisOracle {
            derivation: d,
            index,
            programs,
            program_masks,
            program_lookup,
            in_vars,
            out_vars,
            fwd,
        })
    }

    pub fn derivation(&self) -> &Derivation {
        self.derivation
    }

    pub fn input_len(&self) -> usize {
        self.fwd.len()
    }

    pub fn output_len(&self) -> usize {
        1 << self.out_vars
    }

    fn elem(&self, p: usize) -> InputElem {
        let per = 1usize << self.in_vars;
        ((p / per) as u32, reverse_bits((p % per) as u64, self.in_vars))
    }

    fn elem_index(&self, (pi, mask): InputElem) -> usize {
        ((pi as usize) << self.in_vars) | reverse_bits(mask, self.in_vars) as usize
    }

    fn out_mask(&self, q: usize) -> u64 {
        reverse_bits(q as u64, self.out_vars)
    }

    fn out_index(&self, mask: u64) -> usize {
        reverse_bits(mask, self.out_vars) as usize
    }

    fn elem_leq(&self, a: InputElem, b: InputElem) -> bool {
        subset(a.1, b.1) && self.program_masks[a.0 as usize].is_subset(&self.program_masks[b.0 as usize])
    }

    fn elem_bits(&self, e: InputElem) -> u32 {
        self.program_masks[e.0 as usize].count() + e.1.count_ones()
    }

    /// The input element at enumeration position `p`.
    pub fn input_element(&self, p: usize) -> SliceOutcome {
        self.outcome(self.elem(p))
    }

    /// The output element at enumeration position `q`.
    pub fn output_element(&self, q: usize) -> PartialState {
        state_from_mask(&self.derivation.output, self.out_mask(q))
    }

    fn outcome(&self, (pi, mask): InputElem) -> SliceOutcome {
        SliceOutcome {
            program_slice: self.programs[pi as usize].clone(),
            input_slice: state_from_mask(&self.derivation.input, mask),
        }
    }

    fn render_elem(&self, e: InputElem) -> String {
        let o = self.outcome(e);
        format!("({}, [{}])", o.program_slice, o.input_slice)
    }

    fn render_out(&self, mask: u64) -> String {
        format!("[{}]", state_from_mask(&self.derivation.output, mask))
    }

    fn encode(&self, s: &SliceOutcome) -> Option<InputElem> {
        if s.input_slice.not_below(&self.derivation.input.partialize()).is_some() {
            return None;
        }
        let m = self.index.mask_of(&s.program_slice)?;
        Some((*self.program_lookup.get(&m)?, mask_of_state(&s.input_slice)))
    }

    /// The least input element whose forward slice covers `criterion`,
    /// found by scanning the forward table.
    pub fn least_explanation(&self, criterion: &PartialState) -> Result<SliceOutcome, OracleError> {
        if criterion.not_below(&self.derivation.output.partialize()).is_some() {
            return Err(OracleError::NotBelowOutput(criterion.to_string()));
        }
        let q = mask_of_state(criterion);
        self.least_for_mask(q).map(|e| self.outcome(e))
    }

    fn least_for_mask(&self, q: u64) -> Result<InputElem, OracleError> {
        let covering = || {
            self.fwd
                .par_iter()
                .enumerate()
                .filter(move |(_, f)| matches!(f, Ok(m) if subset(q, *m)))
                .map(|(p, _)| self.elem(p))
        };
        // the least element, if any, has the fewest present nodes
        let candidate = covering()
            .min_by_key(|e| (self.elem_bits(*e), self.elem_index(*e)))
            .ok_or_else(|| OracleError::NotBelowOutput(self.render_out(q)))?;
        if let Some(other) = covering().find_first(|e| !self.elem_leq(candidate, *e)) {
            return Err(OracleError::NoLeastElement {
                criterion: self.render_out(q),
                a: self.render_elem(candidate),
                b: self.render_elem(other),
            });
        }
        Ok(candidate)
    }

    /// Exhaustively checks every law. `bwd` is the backward slicer under test.
    pub fn check_with<F>(&self, bwd: F) -> Vec<LawReport>
    where
        F: Fn(&PartialState) -> Result<SliceOutcome, SliceError> + Sync,
    {
        let np = self.fwd.len();
        let nq = self.output_len();
        let mut reports = Vec::new();

        // closure: tabulate bwd and make sure both tables are well formed
        let bwd_table: Vec<Result<InputElem, String>> = (0..nq)
            .into_par_iter()
            .map(|q| {
                let crit = self.output_element(q);
                match bwd(&crit) {
                    Ok(s) => self.encode(&s).ok_or_else(|| {
                        format!(
                            "bwd([{crit}]) = ({}, [{}]) is outside the input lattice",
                            s.program_slice, s.input_slice
                        )
                    }),
                    Err(e) => Err(format!("bwd([{crit}]) failed: {e}")),
                }
            })
            .collect();
        let closure_failure = self
            .fwd
            .iter()
            .find_map(|f| f.as_ref().err())
            .or_else(|| bwd_table.iter().find_map(|b| b.as_ref().err()));
        reports.push(LawReport {
            law: Law::Closure,
            checked: (np + nq) as u64,
            strategy: "every element",
            verdict: match closure_failure {
                None => Verdict::Holds,
                Some(msg) => Verdict::Fails {
                    counterexample: Counterexample {
                        left: String::new(),
                        right: String::new(),
                        detail: msg.clone(),
                    },
                },
            },
        });
        if closure_failure.is_some() {
            for law in [
                Law::FwdMonotone,
                Law::BwdMonotone,
                Law::Deflation,
                Law::Inflation,
                Law::GaloisEquivalence,
                Law::Minimality,
            ] {
                reports.push(LawReport {
                    law,
                    checked: 0,
                    strategy: "none",
                    verdict: Verdict::Skipped {
                        reason: "fwd or bwd left its lattice".into(),
                    },
                });
            }
            return reports;
        }
        let fwd: Vec<u64> = self.fwd.iter().map(|f| *f.as_ref().unwrap()).collect();
        let bwd: Vec<InputElem> = bwd_table.into_iter().map(Result::unwrap).collect();

        reports.push(self.check_fwd_monotone(&fwd));
        reports.push(self.check_bwd_monotone(&bwd));

        // deflation: bwd(fwd(p)) ⊑ p
        let first = (0..np)
            .into_par_iter()
            .filter(|&p| !self.elem_leq(bwd[self.out_index(fwd[p])], self.elem(p)))
            .min();
        reports.push(LawReport {
            law: Law::Deflation,
            checked: np as u64,
            strategy: "every input element",
            verdict: verdict(first.map(|p| Counterexample {
                left: format!("p = {}", self.render_elem(self.elem(p))),
                right: format!("bwd(fwd(p)) = {}", self.render_elem(bwd[self.out_index(fwd[p])])),
                detail: "bwd(fwd(p)) is not below p".into(),
            })),
        });

        // inflation: q ⊑ fwd(bwd(q))
        let first = (0..nq)
            .into_par_iter()
            .filter(|&q| !subset(self.out_mask(q), fwd[self.elem_index(bwd[q])]))
            .min();
        reports.push(LawReport {
            law: Law::Inflation,
            checked: nq as u64,
            strategy: "every output element",
            verdict: verdict(first.map(|q| Counterexample {
                left: format!("q = {}", self.render_out(self.out_mask(q))),
                right: format!("fwd(bwd(q)) = {}", self.render_out(fwd[self.elem_index(bwd[q])])),
                detail: "q is not below fwd(bwd(q))".into(),
            })),
        });

        // Galois equivalence and the lower-bound half of minimality share
        // one pass over P × Q
        let (galois, minimal) = (0..np)
            .into_par_iter()
            .map(|p| {
                let e = self.elem(p);
                let f = fwd[p];
                let mut g = None;
                let mut m = None;
                for (q, &b) in bwd.iter().enumerate().take(nq) {
                    let below_fwd = subset(self.out_mask(q), f);
                    let bwd_below = self.elem_leq(b, e);
                    if g.is_none() && below_fwd != bwd_below {
                        g = Some((q, p));
                    }
                    if m.is_none() && below_fwd && !bwd_below {
                        m = Some((q, p));
                    }
                }
                (g, m)
            })
            .reduce(|| (None, None), |a, b| (min_opt(a.0, b.0), min_opt(a.1, b.1)));
        let pairs = (np as u64) * (nq as u64);
        reports.push(LawReport {
            law: Law::GaloisEquivalence,
            checked: pairs,
            strategy: "every pair in P x Q",
            verdict: verdict(galois.map(|(q, p)| {
                let e = self.elem(p);
                Counterexample {
                    left: format!("p = {}, bwd(q) = {}", self.render_elem(e), self.render_elem(bwd[q])),
                    right: format!(
                        "q = {}, fwd(p) = {}",
                        self.render_out(self.out_mask(q)),
                        self.render_out(fwd[p])
                    ),
                    detail: format!(
                        "bwd(q) ⊑ p is {} but q ⊑ fwd(p) is {}",
                        self.elem_leq(bwd[q], e),
                        subset(self.out_mask(q), fwd[p])
                    ),
                }
            })),
        });
        // minimality also needs bwd(q) itself to cover q, i.e. inflation
        let minimal = minimal.or_else(|| {
            (0..nq)
                .find(|&q| !subset(self.out_mask(q), fwd[self.elem_index(bwd[q])]))
                .map(|q| (q, self.elem_index(bwd[q])))
        });
        reports.push(LawReport {
            law: Law::Minimality,
            checked: pairs,
            strategy: "every pair in P x Q",
            verdict: verdict(minimal.map(|(q, p)| Counterexample {
                left: format!("bwd(q) = {}", self.render_elem(bwd[q])),
                right: format!(
                    "p = {} with q = {} ⊑ fwd(p)",
                    self.render_elem(self.elem(p)),
                    self.render_out(self.out_mask(q))
                ),
                detail: "bwd(q) is not the least input covering q".into(),
            })),
        });
        reports
    }

    fn check_fwd_monotone(&self, fwd: &[u64]) -> LawReport {
        let np = fwd.len();
        let all_pairs = (np as u128) * (np as u128) <= ALL_PAIRS_LIMIT;
        let render = |a: usize, b: usize| Counterexample {
            left: format!(
                "p1 = {} ⊑ p2 = {}",
                self.render_elem(self.elem(a)),
                self.render_elem(self.elem(b))
            ),
            right: format!(
                "fwd(p1) = {}, fwd(p2) = {}",
                self.render_out(fwd[a]),
                self.render_out(fwd[b])
            ),
            detail: "fwd(p1) is not below fwd(p2)".into(),
        };
        if all_pairs {
            let first = (0..np)
                .into_par_iter()
                .filter_map(|a| {
                    let ea = self.elem(a);
                    (0..np)
                        .find(|&b| self.elem_leq(ea, self.elem(b)) && !subset(fwd[a], fwd[b]))
                        .map(|b| (a, b))
                })
                .min();
            return LawReport {
                law: Law::FwdMonotone,
                checked: (np * np) as u64,
                strategy: "every ordered pair",
                verdict: verdict(first.map(|(a, b)| render(a, b))),
            };
        }
        let nodes = self.index.node_count();
        let (checked, first) = (0..np)
            .into_par_iter()
            .map(|a| {
                let (pi, mask) = self.elem(a);
                let pm = &self.program_masks[pi as usize];
                let mut covers = Vec::new();
                for n in 0..nodes {
                    let addable = !pm.contains(n) && self.index.parent(n).is_none_or(|par| pm.contains(par));
                    if addable {
                        let bigger = self.program_lookup[&pm.with(n)];
                        covers.push(self.elem_index((bigger, mask)));
                    }
                }
                for v in 0..self.in_vars {
                    if mask >> v & 1 == 0 {
                        covers.push(self.elem_index((pi, mask | 1 << v)));
                    }
                }
                let bad = covers.iter().copied().filter(|&b| !subset(fwd[a], fwd[b])).min();
                (covers.len() as u64, bad.map(|b| (a, b)))
            })
            .reduce(|| (0, None), |x, y| (x.0 + y.0, min_opt(x.1, y.1)));
        LawReport {
            law: Law::FwdMonotone,
            checked,
            strategy: "every covering pair",
            verdict: verdict(first.map(|(a, b)| render(a, b))),
        }
    }

    fn check_bwd_monotone(&self, bwd: &[InputElem]) -> LawReport {
        let nq = bwd.len();
        let all_pairs = (nq as u128) * (nq as u128) <= ALL_PAIRS_LIMIT;
        let pairs: Vec<(usize, usize)> = if all_pairs {
            (0..nq).flat_map(|a| (0..nq).map(move |b| (a, b))).collect()
        } else {
            (0..nq)
                .flat_map(|a| {
                    let m = self.out_mask(a);
                    (0..self.out_vars)
                        .filter(move |v| m >> v & 1 == 0)
                        .map(move |v| (a, self.out_index(m | 1 << v)))
                })
                .collect()
        };
        let first = pairs
            .par_iter()
            .copied()
            .filter(|&(a, b)| subset(self.out_mask(a), self.out_mask(b)) && !self.elem_leq(bwd[a], bwd[b]))
            .min();
        LawReport {
            law: Law::BwdMonotone,
            checked: pairs.len() as u64,
            strategy: if all_pairs {
                "every ordered pair"
            } else {
                "every covering pair"
            },
            verdict: verdict(first.map(|(a, b)| Counterexample {
                left: format!(
                    "q1 = {} ⊑ q2 = {}",
                    self.render_out(self.out_mask(a)),
                    self.render_out(self.out_mask(b))
                ),
                right: format!(
                    "bwd(q1) = {}, bwd(q2) = {}",
                    self.render_elem(bwd[a]),
                    self.render_elem(bwd[b])
                ),
                detail: "bwd(q1) is not below bwd(q2)".into(),
            })),
        }
    }
}

fn min_opt<T: Ord>(a: Option<T>, b: Option<T>) -> Option<T> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

fn verdict(c: Option<Counterexample>) -> Verdict {
    match c {
        None => Verdict::Holds,
        Some(counterexample) => Verdict::Fails { counterexample },
    }
}

fn sizes_of(d: &Derivation) -> LatticeSizes {
    let program = d.program.downset_size();
    let input_state = d.input.downset_size();
    LatticeSizes {
        program,
        input_state,
        output_state: d.output.downset_size(),
        input_pairs: program.times(input_state),
    }
}

/// Certifies that the backward and forward slicers of `d` form a Galois
/// connection, by exhaustive enumeration.
///
/// `size_bound` limits the combined size of the program, input-state and
/// output-state lattices.
pub fn check_connection(d: &Derivation, size_bound: u64) -> Result<CheckReport, SizeExceeded> {
    let started = Instant::now();
    let oracle = GaloisOracle::new(d, size_bound)?;
    let laws = oracle.check_with(|q| d.backward(q));
    Ok(CheckReport {
        program: d.program.to_string(),
        input: d.input.to_string(),
        output: d.output.to_string(),
        sizes: sizes_of(d),
        holds: laws.iter().all(|l| l.verdict == Verdict::Holds),
        laws,
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
}

/// Backward slice computed by the oracle instead of the backward rules.
pub fn oracle_bwd(d: &Derivation, q: &PartialState, size_bound: u64) -> Result<SliceOutcome, OracleError> {
    GaloisOracle::new(d, size_bound)?.least_explanation(q)
}

/// The isomorphic sublattices of minimal inputs and maximal outputs, with
/// the program held at its top element.
///
/// Each pair is `(bwd(q), q)` for a maximal output `q`, that is one with
/// `fwd(program, bwd(q).input_slice) = q`. Pairs come in the enumeration
/// order of the output lattice.
pub fn minimal_pairs(d: &Derivation, size_bound: u64) -> Result<Vec<(SliceOutcome, PartialState)>, OracleError> {
    let combined = combined_size(d);
    if combined.exceeds(size_bound) {
        return Err(SizeExceeded {
            cardinality: combined,
            bound: size_bound,
        }
        .into());
    }
    let program = d.program.partialize();
    let fwd_top = |mu: &PartialState| fwd_cmd(&d.trace, mu, &program);
    let mut pairs: Vec<(SliceOutcome, PartialState)> = Vec::new();
    for q in d.output.enumerate_unbounded() {
        let minimal_input = d.backward(&q)?.input_slice;
        let maximal_output = fwd_top(&minimal_input)?;
        let outcome = d.backward(&maximal_output)?;
        // the two closures are idempotent on the induced sublattice
        if outcome.input_slice != minimal_input {
            return Err(OracleError::LawViolation(format!(
                "bwd(fwd(bwd([{q}]))) = [{}] differs from bwd([{q}]) = [{minimal_input}]",
                outcome.input_slice
            )));
        }
        if fwd_top(&outcome.input_slice)? != maximal_output {
            return Err(OracleError::LawViolation(format!(
                "fwd(bwd(fwd([{minimal_input}]))) differs from fwd([{minimal_input}])"
            )));
        }
        if !pairs.iter().any(|(_, out)| *out == maximal_output) {
            pairs.push((outcome, maximal_output));
        }
    }
    Ok(pairs)
}

/// Evaluates `program` on `input` with the default fuel. Convenience for
/// examples and tests.
pub fn derive(program: &str, input: &str) -> Result<Derivation, String> {
    let c = crate::parse::parse_command(program).map_err(|e| e.to_string())?;
    let mu = crate::parse::parse_state(input).map_err(|e| e.to_string())?;
    eval_cmd(&mu, &c, DEFAULT_FUEL).map_err(|e| e.to_string())
}
