//! Canonical single-line rendering of Imp terms.
//!
//! Output always re-parses to the same tree: parentheses are inserted only
//! where precedence or associativity demands them, and a left-nested
//! sequence is wrapped in `{ }`. Holes print as `_`.

use std::fmt;
use std::ops::Range;

use crate::lattice::Position;
use crate::syntax::{ArithExpr, BoolExpr, Command, PartialArithExpr, PartialBoolExpr, PartialCommand, Partialize};

/// Rendered text plus the character span of every node, keyed by position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rendered {
    pub text: String,
    pub spans: Vec<(Position, Range<usize>)>,
}

impl Rendered {
    pub fn span_of(&self, position: &Position) -> Option<Range<usize>> {
        self.spans.iter().find(|(p, _)| p == position).map(|(_, r)| r.clone())
    }
}

struct Printer {
    out: String,
    path: Vec<usize>,
    spans: Option<Vec<(Position, Range<usize>)>>,
}

const PREC_ATOM: u8 = 3;

impl Printer {
    fn new(track: bool) -> Self {
        Printer {
            out: String::new(),
            path: Vec::new(),
            spans: track.then(Vec::new),
        }
    }

    fn node(&mut self, f: impl FnOnce(&mut Self)) {
        let start = self.out.len();
        // reserve the preorder slot before the children record theirs
        let slot = self.spans.as_mut().map(|spans| {
            spans.push((Position::new(self.path.clone()), 0..0));
            spans.len() - 1
        });
        f(self);
        if let (Some(spans), Some(slot)) = (self.spans.as_mut(), slot) {
            spans[slot].1 = start..self.out.len();
        }
    }

    fn child(&mut self, index: usize, f: impl FnOnce(&mut Self)) {
        self.path.push(index);
        f(self);
        self.path.pop();
    }

    fn text(&mut self, s: &str) {
        self.out.push_str(s);
    }

    fn arith(&mut self, a: &PartialArithExpr, min_prec: u8) {
        let prec = match a {
            PartialArithExpr::Bin { op, .. } => op.precedence(),
            _ => PREC_ATOM,
        };
        let parens = prec < min_prec;
        if parens {
            self.text("(");
        }
        self.node(|p| match a {
            PartialArithExpr::Hole => p.text("_"),
            PartialArithExpr::Nat(n) => p.text(&n.to_string()),
            PartialArithExpr::Var(x) => p.text(x),
            PartialArithExpr::Bin { op, lhs, rhs } => {
                p.child(0, |p| p.arith(lhs, prec));
                p.text(" ");
                p.text(op.symbol());
                p.text(" ");
                p.child(1, |p| p.arith(rhs, prec + 1));
            }
        });
        if parens {
            self.text(")");
        }
    }

    fn boolean(&mut self, b: &PartialBoolExpr, min_prec: u8) {
        let prec = match b {
            PartialBoolExpr::And(..) => 1,
            PartialBoolExpr::Not(_) | PartialBoolExpr::Cmp { .. } => 2,
            _ => PREC_ATOM,
        };
        let parens = prec < min_prec;
        if parens {
            self.text("(");
        }
        self.node(|p| match b {
            PartialBoolExpr::Hole => p.text("_"),
            PartialBoolExpr::True => p.text("true"),
            PartialBoolExpr::False => p.text("false"),
            PartialBoolExpr::Cmp { op, lhs, rhs } => {
                p.child(0, |p| p.arith(lhs, 0));
                p.text(" ");
                p.text(op.symbol());
                p.text(" ");
                p.child(1, |p| p.arith(rhs, 0));
            }
            PartialBoolExpr::Not(inner) => {
                p.text("!");
                p.child(0, |p| p.boolean(inner, PREC_ATOM));
            }
            PartialBoolExpr::And(lhs, rhs) => {
                p.child(0, |p| p.boolean(lhs, 1));
                p.text(" && ");
                p.child(1, |p| p.boolean(rhs, 2));
            }
        });
        if parens {
            self.text(")");
        }
    }

    fn command(&mut self, c: &PartialCommand) {
        self.node(|p| match c {
            PartialCommand::Hole => p.text("_"),
            PartialCommand::Skip => p.text("skip"),
            PartialCommand::Assign { var, expr } => {
                p.text(var);
                p.text(" := ");
                p.child(0, |p| p.arith(expr, 0));
            }
            PartialCommand::Seq(c1, c2) => {
                let grouped = matches!(**c1, PartialCommand::Seq(..));
                if grouped {
                    p.text("{ ");
                }
                p.child(0, |p| p.command(c1));
                if grouped {
                    p.text(" }");
                }
                p.text(" ; ");
                p.child(1, |p| p.command(c2));
            }
            PartialCommand::If {
                cond,
                then_branch,
                else_branch,
            } => {
                p.text("if (");
                p.child(0, |p| p.boolean(cond, 0));
                p.text(") then { ");
                p.child(1, |p| p.command(then_branch));
                p.text(" } else { ");
                p.child(2, |p| p.command(else_branch));
                p.text(" }");
            }
            PartialCommand::While { cond, body } => {
                p.text("while (");
                p.child(0, |p| p.boolean(cond, 0));
                p.text(") do { ");
                p.child(1, |p| p.command(body));
                p.text(" }");
            }
        });
    }
}

/// Renders `c` and records where each node landed in the text.
pub fn render_with_spans(c: &PartialCommand) -> Rendered {
    let mut p = Printer::new(true);
    p.command(c);
    Rendered {
        text: p.out,
        spans: p.spans.unwrap_or_default(),
    }
}

impl fmt::Display for PartialArithExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut p = Printer::new(false);
        p.arith(self, 0);
        f.write_str(&p.out)
    }
}

impl fmt::Display for PartialBoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut p = Printer::new(false);
        p.boolean(self, 0);
        f.write_str(&p.out)
    }
}

impl fmt::Display for PartialCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut p = Printer::new(false);
        p.command(self);
        f.write_str(&p.out)
    }
}

impl fmt::Display for ArithExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.partialize().fmt(f)
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.partialize().fmt(f)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.partialize().fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_command, parse_partial_command, parse_partial_state};

    #[test]
    fn hole_renders_as_underscore() {
        assert_eq!(PartialCommand::Hole.to_string(), "_");
        assert_eq!(PartialArithExpr::Hole.to_string(), "_");
    }

    #[test]
    fn slice_renders_canonically() {
        let src = "if (y = 1)\n  then { _ }\n  else { y := y + 1 } ;\n_";
        assert_eq!(
            parse_partial_command(src).unwrap().to_string(),
            "if (y = 1) then { _ } else { y := y + 1 } ; _"
        );
        assert_eq!(
            parse_partial_state("x=_,y=0,z=_").unwrap().to_string(),
            "x = _, y = 0, z = _"
        );
    }

    #[test]
    fn parens_only_where_needed() {
        for src in [
            "x := a - (b - c)",
            "x := (a + b) * c",
            "x := a * (b * c)",
            "x := a - b - c",
            "while (!(r = 0) && (true && false)) do { skip }",
            "if (!(!true)) then { skip } else { skip }",
            "{ skip ; skip } ; skip",
        ] {
            let c = parse_command(src).unwrap();
            assert_eq!(c.to_string(), src);
        }
    }

    #[test]
    fn spans_cover_nodes() {
        let c = parse_command("if (y = 1) then { y := x + 1 } else { y := y + 1 } ; z := z + 1")
            .unwrap()
            .partialize();
        let r = render_with_spans(&c);
        let then_branch = r.span_of(&Position::new(vec![0, 1])).unwrap();
        assert_eq!(&r.text[then_branch], "y := x + 1");
        let tail = r.span_of(&Position::new(vec![1])).unwrap();
        assert_eq!(&r.text[tail], "z := z + 1");
        let whole = r.span_of(&Position::root()).unwrap();
        assert_eq!(whole, 0..r.text.len());
        let lit = r.span_of(&Position::new(vec![0, 0, 1])).unwrap();
        assert_eq!(&r.text[lit], "1");
    }
}
