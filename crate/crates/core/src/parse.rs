//! Lexer and recursive-descent parser for Imp programs and states.
//!
//! ```text
//! cmd  ::= "skip" | ident ":=" aexp | cmd ";" cmd | "{" cmd "}" | "_"
//!        | "if" "(" bexp ")" "then" "{" cmd "}" "else" "{" cmd "}"
//!        | "while" "(" bexp ")" "do" "{" cmd "}"
//! aexp ::= nat | ident | aexp ("+"|"-") aexp | aexp "*" aexp | "(" aexp ")" | "_"
//! bexp ::= "true" | "false" | aexp "=" aexp | aexp "<=" aexp
//!        | "!" bexp | bexp "&&" bexp | "(" bexp ")" | "_"
//! state ::= ident "=" (nat | "_") ("," ident "=" (nat | "_"))*
//! ```
//!
//! `;` is right-associative, `*` binds tighter than `+`/`-`, both left
//! associative; `!` binds tighter than `&&`. `#` starts a line comment. The
//! hole token `_` is only accepted by the `parse_partial_*` entry points.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::state::{PartialState, State};
use crate::syntax::{ArithExpr, ArithOp, BoolExpr, CmpOp, Command, PartialArithExpr, PartialBoolExpr, PartialCommand};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: expected {}, found {found}", expected_list(.expected))]
    Syntax {
        line: usize,
        column: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("{line}:{column}: variable `{name}` occurs more than once in the state")]
    DuplicateVariable { name: String, line: usize, column: usize },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::Syntax { line, .. } | ParseError::DuplicateVariable { line, .. } => *line,
        }
    }

    pub fn column(&self) -> usize {
        match self {
            ParseError::Syntax { column, .. } | ParseError::DuplicateVariable { column, .. } => *column,
        }
    }
}

fn expected_list(expected: &[String]) -> String {
    match expected {
        [] => "nothing".to_owned(),
        [one] => one.clone(),
        _ => format!("one of {}", expected.join(", ")),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u64),
    Skip,
    If,
    Then,
    Else,
    While,
    Do,
    True,
    False,
    Hole,
    Assign,
    Semi,
    Comma,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Plus,
    Minus,
    Star,
    Eq,
    Leq,
    Bang,
    AndAnd,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(x) => return write!(f, "identifier `{x}`"),
            Tok::Nat(n) => return write!(f, "number `{n}`"),
            Tok::Skip => "`skip`",
            Tok::If => "`if`",
            Tok::Then => "`then`",
            Tok::Else => "`else`",
            Tok::While => "`while`",
            Tok::Do => "`do`",
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::Hole => "`_`",
            Tok::Assign => "`:=`",
            Tok::Semi => "`;`",
            Tok::Comma => "`,`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Star => "`*`",
            Tok::Eq => "`=`",
            Tok::Leq => "`<=`",
            Tok::Bang => "`!`",
            Tok::AndAnd => "`&&`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump!();
            }
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(c);
                    bump!();
                } else {
                    break;
                }
            }
            match word.as_str() {
                "_" => Tok::Hole,
                "skip" => Tok::Skip,
                "if" => Tok::If,
                "then" => Tok::Then,
                "else" => Tok::Else,
                "while" => Tok::While,
                "do" => Tok::Do,
                "true" => Tok::True,
                "false" => Tok::False,
                _ if word.starts_with('_') => {
                    return Err(ParseError::Syntax {
                        line: pos.line,
                        column: pos.column,
                        expected: vec!["identifier".into()],
                        found: format!("`{word}`"),
                    })
                }
                _ => Tok::Ident(word),
            }
        } else if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    digits.push(c);
                    bump!();
                } else {
                    break;
                }
            }
            match digits.parse() {
                Ok(n) => Tok::Nat(n),
                Err(_) => {
                    return Err(ParseError::Syntax {
                        line: pos.line,
                        column: pos.column,
                        expected: vec![format!("number at most {}", u64::MAX)],
                        found: format!("`{digits}`"),
                    })
                }
            }
        } else {
            bump!();
            let two = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>, next: char| chars.peek() == Some(&next);
            match c {
                ':' if two(&mut chars, '=') => {
                    bump!();
                    Tok::Assign
                }
                '<' if two(&mut chars, '=') => {
                    bump!();
                    Tok::Leq
                }
                '&' if two(&mut chars, '&') => {
                    bump!();
                    Tok::AndAnd
                }
                ';' => Tok::Semi,
                ',' => Tok::Comma,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '=' => Tok::Eq,
                '!' => Tok::Bang,
                other => {
                    return Err(ParseError::Syntax {
                        line: pos.line,
                        column: pos.column,
                        expected: vec!["a token".into()],
                        found: format!("`{other}`"),
                    })
                }
            }
        };
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, column }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    holes: bool,
    // furthest token index at which something failed to match, and what was
    // expected there; alternatives that backtrack still contribute
    furthest: usize,
    expected: BTreeSet<&'static str>,
}

type PResult<T> = Result<T, ()>;

impl Parser {
    fn new(text: &str, holes: bool) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            at: 0,
            holes,
            furthest: 0,
            expected: BTreeSet::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.at + offset).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn advance(&mut self) -> Tok {
        let tok = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        tok
    }

    fn fail<T>(&mut self, what: &'static str) -> PResult<T> {
        if self.at > self.furthest {
            self.furthest = self.at;
            self.expected.clear();
        }
        if self.at == self.furthest {
            self.expected.insert(what);
        }
        Err(())
    }

    fn eat(&mut self, tok: Tok, what: &'static str) -> PResult<()> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            self.fail(what)
        }
    }

    fn hole(&mut self) -> bool {
        if self.holes && *self.peek() == Tok::Hole {
            self.advance();
            true
        } else {
            if self.holes {
                let _ = self.fail::<()>("`_`");
            }
            false
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.advance();
                Ok(x)
            }
            _ => self.fail("identifier"),
        }
    }

    fn error(&self) -> ParseError {
        let (tok, pos) = &self.toks[self.furthest];
        ParseError::Syntax {
            line: pos.line,
            column: pos.column,
            expected: self.expected.iter().map(|s| s.to_string()).collect(),
            found: tok.to_string(),
        }
    }

    fn finish<T>(&mut self, result: PResult<T>) -> Result<T, ParseError> {
        let value = result.and_then(|v| self.eat(Tok::Eof, "end of input").map(|_| v));
        value.map_err(|_| self.error())
    }

    fn command(&mut self) -> PResult<PartialCommand> {
        let first = self.command_atom()?;
        if *self.peek() == Tok::Semi {
            self.advance();
            let rest = self.command()?;
            Ok(PartialCommand::seq(first, rest))
        } else {
            let _ = self.fail::<()>("`;`");
            Ok(first)
        }
    }

    fn block(&mut self) -> PResult<PartialCommand> {
        self.eat(Tok::LBrace, "`{`")?;
        let body = self.command()?;
        self.eat(Tok::RBrace, "`}`")?;
        Ok(body)
    }

    fn guard(&mut self) -> PResult<PartialBoolExpr> {
        self.eat(Tok::LParen, "`(`")?;
        let cond = self.bool_expr()?;
        self.eat(Tok::RParen, "`)`")?;
        Ok(cond)
    }

    fn command_atom(&mut self) -> PResult<PartialCommand> {
        if self.hole() {
            return Ok(PartialCommand::Hole);
        }
        match self.peek().clone() {
            Tok::Skip => {
                self.advance();
                Ok(PartialCommand::Skip)
            }
            Tok::Ident(var) => {
                self.advance();
                self.eat(Tok::Assign, "`:=`")?;
                let expr = self.arith_expr()?;
                Ok(PartialCommand::Assign { var, expr })
            }
            Tok::If => {
                self.advance();
                let cond = self.guard()?;
                self.eat(Tok::Then, "`then`")?;
                let c1 = self.block()?;
                self.eat(Tok::Else, "`else`")?;
                let c2 = self.block()?;
                Ok(PartialCommand::if_then_else(cond, c1, c2))
            }
            Tok::While => {
                self.advance();
                let cond = self.guard()?;
                self.eat(Tok::Do, "`do`")?;
                let body = self.block()?;
                Ok(PartialCommand::while_do(cond, body))
            }
            Tok::LBrace => self.block(),
            _ => {
                for what in ["`skip`", "identifier", "`if`", "`while`", "`{`"] {
                    let _ = self.fail::<()>(what);
                }
                Err(())
            }
        }
    }

    fn arith_expr(&mut self) -> PResult<PartialArithExpr> {
        let mut lhs = self.arith_term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => {
                    let _ = self.fail::<()>("`+`");
                    let _ = self.fail::<()>("`-`");
                    return Ok(lhs);
                }
            };
            self.advance();
            let rhs = self.arith_term()?;
            lhs = PartialArithExpr::bin(op, lhs, rhs);
        }
    }

    fn arith_term(&mut self) -> PResult<PartialArithExpr> {
        let mut lhs = self.arith_factor()?;
        while *self.peek() == Tok::Star {
            self.advance();
            let rhs = self.arith_factor()?;
            lhs = PartialArithExpr::bin(ArithOp::Mul, lhs, rhs);
        }
        let _ = self.fail::<()>("`*`");
        Ok(lhs)
    }

    fn arith_factor(&mut self) -> PResult<PartialArithExpr> {
        if self.hole() {
            return Ok(PartialArithExpr::Hole);
        }
        match self.peek().clone() {
            Tok::Nat(n) => {
                self.advance();
                Ok(PartialArithExpr::Nat(n))
            }
            Tok::Ident(x) => {
                self.advance();
                Ok(PartialArithExpr::Var(x))
            }
            Tok::LParen => {
                self.advance();
                let inner = self.arith_expr()?;
                self.eat(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => {
                let _ = self.fail::<()>("number");
                let _ = self.fail::<()>("identifier");
                self.fail("`(`")
            }
        }
    }

    fn bool_expr(&mut self) -> PResult<PartialBoolExpr> {
        let mut lhs = self.bool_unary()?;
        while *self.peek() == Tok::AndAnd {
            self.advance();
            let rhs = self.bool_unary()?;
            lhs = PartialBoolExpr::And(Box::new(lhs), Box::new(rhs));
        }
        let _ = self.fail::<()>("`&&`");
        Ok(lhs)
    }

    fn bool_unary(&mut self) -> PResult<PartialBoolExpr> {
        if *self.peek() == Tok::Bang {
            self.advance();
            let inner = self.bool_unary()?;
            return Ok(PartialBoolExpr::Not(Box::new(inner)));
        }
        self.bool_atom()
    }

    fn comparison(&mut self) -> PResult<PartialBoolExpr> {
        let lhs = self.arith_expr()?;
        let op = match self.peek() {
            Tok::Eq => CmpOp::Eq,
            Tok::Leq => CmpOp::Leq,
            _ => {
                let _ = self.fail::<()>("`=`");
                return self.fail("`<=`");
            }
        };
        self.advance();
        let rhs = self.arith_expr()?;
        Ok(PartialBoolExpr::cmp(op, lhs, rhs))
    }

    fn bool_atom(&mut self) -> PResult<PartialBoolExpr> {
        match self.peek() {
            Tok::True => {
                self.advance();
                return Ok(PartialBoolExpr::True);
            }
            Tok::False => {
                self.advance();
                return Ok(PartialBoolExpr::False);
            }
            _ => {}
        }
        let start = self.at;
        if *self.peek() == Tok::LParen {
            self.advance();
            if let Ok(inner) = self.bool_expr() {
                if *self.peek() == Tok::RParen {
                    self.advance();
                    // `(a) = b` is a comparison whose left operand happens to
                    // parse as a boolean too; only accept when nothing binds
                    if !matches!(self.peek(), Tok::Eq | Tok::Leq | Tok::Plus | Tok::Minus | Tok::Star) {
                        return Ok(inner);
                    }
                }
            }
            self.at = start;
        }
        if self.holes && *self.peek() == Tok::Hole {
            let is_operand = matches!(self.peek_at(1), Tok::Eq | Tok::Leq | Tok::Plus | Tok::Minus | Tok::Star);
            if !is_operand {
                self.advance();
                return Ok(PartialBoolExpr::Hole);
            }
        }
        let _ = self.fail::<()>("`true`");
        let _ = self.fail::<()>("`false`");
        let _ = self.fail::<()>("`!`");
        self.comparison()
    }

    fn state_entries(&mut self) -> Result<Vec<(String, Option<u64>, Pos)>, ()> {
        let mut entries = Vec::new();
        if *self.peek() == Tok::Eof {
            return Ok(entries);
        }
        loop {
            let pos = self.toks[self.at].1;
            let name = self.ident()?;
            self.eat(Tok::Eq, "`=`")?;
            let value = match self.peek().clone() {
                Tok::Nat(n) => {
                    self.advance();
                    Some(n)
                }
                _ if self.hole() => None,
                _ => return self.fail("number"),
            };
            entries.push((name, value, pos));
            if *self.peek() == Tok::Comma {
                self.advance();
            } else {
                let _ = self.fail::<()>("`,`");
                return Ok(entries);
            }
        }
    }
}

fn parse_with<T>(text: &str, holes: bool, f: impl FnOnce(&mut Parser) -> PResult<T>) -> Result<T, ParseError> {
    let mut parser = Parser::new(text, holes)?;
    let result = f(&mut parser);
    parser.finish(result)
}

pub fn parse_partial_command(text: &str) -> Result<PartialCommand, ParseError> {
    parse_with(text, true, Parser::command)
}

pub fn parse_command(text: &str) -> Result<Command, ParseError> {
    parse_with(text, false, Parser::command).map(|c| c.to_total().expect("hole-free parse"))
}

pub fn parse_partial_arith(text: &str) -> Result<PartialArithExpr, ParseError> {
    parse_with(text, true, Parser::arith_expr)
}

pub fn parse_arith(text: &str) -> Result<ArithExpr, ParseError> {
    parse_with(text, false, Parser::arith_expr).map(|a| a.to_total().expect("hole-free parse"))
}

pub fn parse_partial_bool(text: &str) -> Result<PartialBoolExpr, ParseError> {
    parse_with(text, true, Parser::bool_expr)
}

pub fn parse_bool(text: &str) -> Result<BoolExpr, ParseError> {
    parse_with(text, false, Parser::bool_expr).map(|b| b.to_total().expect("hole-free parse"))
}

fn checked_entries(text: &str, holes: bool) -> Result<Vec<(String, Option<u64>)>, ParseError> {
    let entries = parse_with(text, holes, Parser::state_entries)?;
    let mut seen = BTreeSet::new();
    for (name, _, pos) in &entries {
        if !seen.insert(name.as_str()) {
            return Err(ParseError::DuplicateVariable {
                name: name.clone(),
                line: pos.line,
                column: pos.column,
            });
        }
    }
    Ok(entries.into_iter().map(|(n, v, _)| (n, v)).collect())
}

pub fn parse_partial_state(text: &str) -> Result<PartialState, ParseError> {
    let entries = checked_entries(text, true)?;
    Ok(PartialState::new(entries).expect("duplicates already rejected"))
}

pub fn parse_state(text: &str) -> Result<State, ParseError> {
    let entries = checked_entries(text, false)?;
    Ok(
        State::new(entries.into_iter().map(|(n, v)| (n, v.expect("hole-free parse"))))
            .expect("duplicates already rejected"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Partialize;

    fn var(x: &str) -> ArithExpr {
        ArithExpr::Var(x.into())
    }

    fn add(l: ArithExpr, r: ArithExpr) -> ArithExpr {
        ArithExpr::Bin {
            op: ArithOp::Add,
            lhs: Box::new(l),
            rhs: Box::new(r),
        }
    }

    fn assign(x: &str, a: ArithExpr) -> Command {
        Command::Assign { var: x.into(), expr: a }
    }

    #[test]
    fn skip() {
        assert_eq!(parse_command("skip"), Ok(Command::Skip));
    }

    #[test]
    fn conditional_example() {
        let c = parse_command("if (y = 1) then { y := x + 1 } else { y := y + 1 } ; z := z + 1").unwrap();
        let expected = Command::Seq(
            Box::new(Command::If {
                cond: BoolExpr::Cmp {
                    op: CmpOp::Eq,
                    lhs: Box::new(var("y")),
                    rhs: Box::new(ArithExpr::Nat(1)),
                },
                then_branch: Box::new(assign("y", add(var("x"), ArithExpr::Nat(1)))),
                else_branch: Box::new(assign("y", add(var("y"), ArithExpr::Nat(1)))),
            }),
            Box::new(assign("z", add(var("z"), ArithExpr::Nat(1)))),
        );
        assert_eq!(c, expected);
    }

    #[test]
    fn truncated_assignment_is_an_error() {
        let err = parse_command("x := ").unwrap_err();
        match &err {
            ParseError::Syntax {
                line,
                column,
                expected,
                found,
            } => {
                assert_eq!((*line, *column), (1, 6));
                assert!(expected.contains(&"number".to_string()), "{expected:?}");
                assert!(expected.contains(&"identifier".to_string()));
                assert!(!expected.contains(&"`_`".to_string()));
                assert_eq!(found, "end of input");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn holes_only_in_partial_mode() {
        assert_eq!(parse_partial_command("_"), Ok(PartialCommand::Hole));
        assert!(parse_command("_").is_err());
        assert!(parse_state("x = _").is_err());
    }

    #[test]
    fn hole_in_guard() {
        assert_eq!(
            parse_partial_command("while (_) do { skip }"),
            Ok(PartialCommand::while_do(PartialBoolExpr::Hole, PartialCommand::Skip))
        );
        assert_eq!(
            parse_partial_bool("_ = 1"),
            Ok(PartialBoolExpr::cmp(
                CmpOp::Eq,
                PartialArithExpr::Hole,
                PartialArithExpr::Nat(1)
            ))
        );
        assert_eq!(
            parse_partial_bool("(_) = 1"),
            Ok(PartialBoolExpr::cmp(
                CmpOp::Eq,
                PartialArithExpr::Hole,
                PartialArithExpr::Nat(1)
            ))
        );
        assert_eq!(parse_partial_bool("(_)"), Ok(PartialBoolExpr::Hole));
    }

    #[test]
    fn slice_with_holes() {
        let c = parse_partial_command("if (y = 1) then { _ } else { y := y + 1 } ; _").unwrap();
        let else_branch = assign("y", add(var("y"), ArithExpr::Nat(1))).partialize();
        let expected = PartialCommand::seq(
            PartialCommand::if_then_else(
                PartialBoolExpr::cmp(CmpOp::Eq, PartialArithExpr::var("y"), PartialArithExpr::Nat(1)),
                PartialCommand::Hole,
                else_branch,
            ),
            PartialCommand::Hole,
        );
        assert_eq!(c, expected);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse_arith("1 - 2 - 3 * 4 + 5").unwrap().partialize().to_string(),
            "1 - 2 - 3 * 4 + 5"
        );
        let a = parse_arith("a - b - c").unwrap();
        let ArithExpr::Bin { op, lhs, .. } = &a else { panic!() };
        assert_eq!(*op, ArithOp::Sub);
        assert!(matches!(**lhs, ArithExpr::Bin { op: ArithOp::Sub, .. }));
        let m = parse_arith("a + b * c").unwrap();
        let ArithExpr::Bin { op, rhs, .. } = &m else { panic!() };
        assert_eq!(*op, ArithOp::Add);
        assert!(matches!(**rhs, ArithExpr::Bin { op: ArithOp::Mul, .. }));
        let s = parse_command("skip ; skip ; x := 1").unwrap();
        let Command::Seq(first, rest) = &s else { panic!() };
        assert_eq!(**first, Command::Skip);
        assert!(matches!(**rest, Command::Seq(..)));
    }

    #[test]
    fn boolean_forms() {
        let b = parse_bool("!(r = 0) && (x + 1) <= 3 && true").unwrap();
        let BoolExpr::And(lhs, rhs) = &b else { panic!() };
        assert!(matches!(**rhs, BoolExpr::True));
        assert!(matches!(**lhs, BoolExpr::And(..)));
        assert_eq!(
            parse_bool("((x + 1)) = 2").unwrap().partialize().to_string(),
            "x + 1 = 2"
        );
        assert_eq!(parse_bool("! x = 1").unwrap(), parse_bool("!(x = 1)").unwrap());
    }

    #[test]
    fn comments_and_lines() {
        let src = "# divides\nr := a ;\n  while (b <= r) do { r := r - b }\n";
        assert!(parse_command(src).is_ok());
        let err = parse_command("skip ;\n  x := := 1").unwrap_err();
        assert_eq!((err.line(), err.column()), (2, 8));
    }

    #[test]
    fn states() {
        assert_eq!(
            parse_state("x = 1, y = 0, z = 2").unwrap().to_string(),
            "x = 1, y = 0, z = 2"
        );
        let p = parse_partial_state("x = _, y = 1, z = _").unwrap();
        assert_eq!(p.values(), &[None, Some(1), None]);
        assert!(matches!(
            parse_state("x = 1, x = 2"),
            Err(ParseError::DuplicateVariable { ref name, line: 1, column: 8 }) if name == "x"
        ));
        assert_eq!(parse_state("").unwrap(), State::empty());
        assert!(parse_state("x = 1,").is_err());
    }

    #[test]
    fn case_sensitive_identifiers() {
        let s = parse_state("x = 1, X = 2").unwrap();
        assert_eq!(s.get("X"), Some(2));
    }

    #[test]
    fn literal_overflow_rejected() {
        assert!(parse_arith("99999999999999999999999").is_err());
    }
}
