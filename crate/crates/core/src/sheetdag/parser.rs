//! Recursive-descent formula parser.
//!
//! Precedence, tightest first: `^`, unary `-`/`+`, `*` `/`, `+` `-`.
//! Binary operators of equal precedence associate to the left. Function
//! names are case-insensitive; cell names are case-sensitive.

use super::ast::{BinaryOp, FormulaAst, Function};
use super::{CellId, SheetError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn syntax(position: usize, message: impl Into<String>) -> SheetError {
    SheetError::Syntax {
        position,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>, SheetError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, pos: start });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let value: f64 = lit
                .parse()
                .map_err(|_| syntax(start, format!("malformed number `{lit}`")))?;
            out.push(Token {
                tok: Tok::Num(value),
                pos: start,
            });
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(text[start..i].to_string()),
                pos: start,
            });
            continue;
        }
        let ch = text[start..].chars().next().unwrap_or('?');
        return Err(syntax(start, format!("unexpected character `{ch}`")));
    }
    out.push(Token {
        tok: Tok::End,
        pos: text.len(),
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<FormulaAst, SheetError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = FormulaAst::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<FormulaAst, SheetError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = FormulaAst::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<FormulaAst, SheetError> {
        match self.peek().tok {
            Tok::Minus => {
                self.bump();
                Ok(negate(self.unary()?))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<FormulaAst, SheetError> {
        let mut lhs = self.primary()?;
        while self.peek().tok == Tok::Caret {
            self.bump();
            let rhs = self.exponent()?;
            lhs = FormulaAst::binary(BinaryOp::Pow, lhs, rhs);
        }
        Ok(lhs)
    }

    // Allows `2^-1`; the sign binds only to the exponent's primary.
    fn exponent(&mut self) -> Result<FormulaAst, SheetError> {
        match self.peek().tok {
            Tok::Minus => {
                self.bump();
                Ok(negate(self.exponent()?))
            }
            Tok::Plus => {
                self.bump();
                self.exponent()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<FormulaAst, SheetError> {
        let token = self.bump();
        match token.tok {
            Tok::Num(v) => Ok(FormulaAst::Constant(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect_rparen(token.pos)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if self.peek().tok == Tok::LParen {
                    self.bump();
                    self.call(name, token.pos)
                } else {
                    Ok(FormulaAst::Ref(CellId(name)))
                }
            }
            Tok::End => Err(syntax(token.pos, "unexpected end of formula")),
            other => Err(syntax(token.pos, format!("unexpected token {other:?}"))),
        }
    }

    fn expect_rparen(&mut self, open: usize) -> Result<(), SheetError> {
        let t = self.bump();
        match t.tok {
            Tok::RParen => Ok(()),
            Tok::End => Err(syntax(t.pos, format!("unclosed parenthesis opened at {open}"))),
            _ => Err(syntax(t.pos, "expected `)`")),
        }
    }

    fn call(&mut self, name: String, pos: usize) -> Result<FormulaAst, SheetError> {
        enum Kind {
            Binary(BinaryOp),
            Call(Function),
        }
        let kind = match name.to_ascii_uppercase().as_str() {
            "SUM" => Kind::Call(Function::Sum),
            "IF" => Kind::Call(Function::If),
            "CLAMP" => Kind::Call(Function::Clamp),
            "MIN" => Kind::Binary(BinaryOp::Min),
            "MAX" => Kind::Binary(BinaryOp::Max),
            "POW" => Kind::Binary(BinaryOp::Pow),
            _ => return Err(SheetError::UnknownFunction { name, position: pos }),
        };

        let mut args = Vec::new();
        if self.peek().tok == Tok::RParen {
            self.bump();
        } else {
            loop {
                args.push(self.expr()?);
                let t = self.bump();
                match t.tok {
                    Tok::Comma => {
                        if matches!(self.peek().tok, Tok::RParen | Tok::End) {
                            return Err(syntax(t.pos, "trailing comma in argument list"));
                        }
                    }
                    Tok::RParen => break,
                    Tok::End => {
                        return Err(syntax(t.pos, format!("unclosed argument list of `{name}`")))
                    }
                    _ => return Err(syntax(t.pos, "expected `,` or `)`")),
                }
            }
        }

        let arity_ok = match &kind {
            Kind::Binary(_) => args.len() == 2,
            Kind::Call(Function::Sum) => !args.is_empty(),
            Kind::Call(_) => args.len() == 3,
        };
        if !arity_ok {
            let wanted = match &kind {
                Kind::Binary(_) => "exactly 2",
                Kind::Call(Function::Sum) => "at least 1",
                Kind::Call(_) => "exactly 3",
            };
            return Err(syntax(
                pos,
                format!("`{name}` takes {wanted} arguments, got {}", args.len()),
            ));
        }

        Ok(match kind {
            Kind::Binary(op) => {
                let right = args.pop().expect("arity checked");
                let left = args.pop().expect("arity checked");
                FormulaAst::binary(op, left, right)
            }
            Kind::Call(func) => FormulaAst::Call { func, args },
        })
    }
}

/// Parses a formula such as `capex_wind * a_wind + 2` into an AST.
/// A signed literal stays a literal, so `-2.5` is an input cell.
fn negate(ast: FormulaAst) -> FormulaAst {
    match ast {
        FormulaAst::Constant(v) => FormulaAst::Constant(-v),
        other => FormulaAst::Neg(Box::new(other)),
    }
}

pub fn parse_formula(text: &str) -> Result<FormulaAst, SheetError> {
    if text.trim().is_empty() {
        return Err(syntax(0, "empty formula"));
    }
    let mut parser = Parser {
        tokens: tokenize(text)?,
        at: 0,
    };
    let ast = parser.expr()?;
    let rest = parser.peek();
    if rest.tok != Tok::End {
        return Err(syntax(rest.pos, "unexpected trailing input"));
    }
    Ok(ast)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(name: &str) -> FormulaAst {
        FormulaAst::Ref(CellId::new(name).unwrap())
    }

    fn c(v: f64) -> FormulaAst {
        FormulaAst::Constant(v)
    }

    #[test]
    fn constant() {
        assert_eq!(parse_formula("3").unwrap(), c(3.0));
        assert_eq!(parse_formula(" 1.5e3 ").unwrap(), c(1500.0));
        assert_eq!(parse_formula(".25").unwrap(), c(0.25));
    }

    #[test]
    fn precedence() {
        let ast = parse_formula("capex_wind * a_wind + 2").unwrap();
        let expected = FormulaAst::binary(
            BinaryOp::Add,
            FormulaAst::binary(BinaryOp::Mul, r("capex_wind"), r("a_wind")),
            c(2.0),
        );
        assert_eq!(ast, expected);
    }

    #[test]
    fn left_associative() {
        let ast = parse_formula("a - b - c").unwrap();
        let expected = FormulaAst::binary(
            BinaryOp::Sub,
            FormulaAst::binary(BinaryOp::Sub, r("a"), r("b")),
            r("c"),
        );
        assert_eq!(ast, expected);

        let ast = parse_formula("a / b * c").unwrap();
        let expected = FormulaAst::binary(
            BinaryOp::Mul,
            FormulaAst::binary(BinaryOp::Div, r("a"), r("b")),
            r("c"),
        );
        assert_eq!(ast, expected);
    }

    #[test]
    fn pow_binds_tighter_than_negation() {
        let ast = parse_formula("-2^2").unwrap();
        let expected = FormulaAst::Neg(Box::new(FormulaAst::binary(BinaryOp::Pow, c(2.0), c(2.0))));
        assert_eq!(ast, expected);

        let ast = parse_formula("2^-1").unwrap();
        let expected = FormulaAst::binary(BinaryOp::Pow, c(2.0), c(-1.0));
        assert_eq!(ast, expected);
        assert_eq!(parse_formula("-2.5").unwrap(), c(-2.5));
        assert_eq!(parse_formula("- -3").unwrap(), c(3.0));

        // negation binds tighter than multiplication
        let ast = parse_formula("-a*b").unwrap();
        let expected = FormulaAst::binary(BinaryOp::Mul, FormulaAst::Neg(Box::new(r("a"))), r("b"));
        assert_eq!(ast, expected);
    }

    #[test]
    fn functions_case_insensitive() {
        let ast = parse_formula("sum(a, 1)").unwrap();
        assert_eq!(
            ast,
            FormulaAst::Call {
                func: Function::Sum,
                args: vec![r("a"), c(1.0)]
            }
        );
        assert_eq!(
            parse_formula("Max(a, b)").unwrap(),
            FormulaAst::binary(BinaryOp::Max, r("a"), r("b"))
        );
        assert!(matches!(
            parse_formula("clamp(x, 0, 27)").unwrap(),
            FormulaAst::Call { func: Function::Clamp, .. }
        ));
        assert!(matches!(
            parse_formula("If(x, 1, 0)").unwrap(),
            FormulaAst::Call { func: Function::If, .. }
        ));
    }

    #[test]
    fn parentheses() {
        let ast = parse_formula("(a + b) * c").unwrap();
        let expected = FormulaAst::binary(
            BinaryOp::Mul,
            FormulaAst::binary(BinaryOp::Add, r("a"), r("b")),
            r("c"),
        );
        assert_eq!(ast, expected);
    }

    #[test]
    fn trailing_comma() {
        match parse_formula("SUM(a, b,") {
            Err(SheetError::Syntax { position, message }) => {
                assert_eq!(position, 8);
                assert!(message.contains("trailing comma"));
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn malformed() {
        for text in ["", "  ", "a +", "(a", "a b", "1 + * 2", "SUM()", "IF(a, b)", "MIN(a)", "a $ b", ")"] {
            assert!(
                matches!(parse_formula(text), Err(SheetError::Syntax { .. })),
                "{text:?} should fail"
            );
        }
    }

    #[test]
    fn unknown_function() {
        assert_eq!(
            parse_formula("1 + VLOOKUP(a)"),
            Err(SheetError::UnknownFunction {
                name: "VLOOKUP".into(),
                position: 4
            })
        );
    }

    #[test]
    fn display_reparses() {
        for text in ["a*b+c", "-x^2", "SUM(a, b, 3)", "MIN(a, MAX(b, c)) / 2", "IF(a - 1, b, -c)"] {
            let ast = parse_formula(text).unwrap();
            assert_eq!(parse_formula(&ast.to_string()).unwrap(), ast, "{text}");
        }
    }
}
