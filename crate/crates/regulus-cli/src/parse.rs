//! Recursive-descent parser for expressions and command lines.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := '-' factor | primary ('^' INT)?
//! primary := INT | 'i' | 'true' | 'false' | IDENT | IDENT '(' args ')'
//!          | '(' expr ')' | bundle | matlit | derlit | idemlit
//! bundle  := '[' expr (';' expr)* ']'
//! matlit  := 'mat' '[' row (',' row)* ']';  row := '[' expr (',' expr)* ']'
//! derlit  := 'der' '{' (IDENT ':' expr (',' IDENT ':' expr)*)? '}'
//! idemlit := '{' (INT (',' INT)*)? '}'
//! ```
//!
//! `/` binds like `*` and unary minus sits above addition. Two adjacent
//! integer literals joined by `/` fold into a single rational literal, so
//! `t + 1/2` parses as `Add(t, Num(1, 2))`. An unclosed delimiter is
//! reported at the offset where it was opened.

use crate::ast::{BinOp, Command, Expr};
use crate::error::{CliError, CliResult};
use crate::lex::{lex, Tok, Token};

/// Parses a complete expression; trailing input is an error.
pub fn parse_expr(src: &str) -> CliResult<Expr> {
    let mut p = Parser::new(lex(src, 0)?);
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parses one session line: a command keyword followed by its arguments, or
/// a bare expression to evaluate.
pub fn parse_command(line: &str) -> CliResult<Command> {
    let rest = line.trim_start();
    let word = match rest.split_whitespace().next() {
        Some(w) if !w.starts_with('#') => w,
        _ => return Ok(Command::Nop),
    };
    let base = line.len() - rest.len() + word.len();
    let tail = &line[base..];

    // The file path argument is raw text, not tokens.
    if word == "load-algebra" {
        let path = tail.split('#').next().unwrap_or("").trim();
        if path.is_empty() {
            return Err(CliError::bad("load-algebra needs a file path"));
        }
        return Ok(Command::LoadAlgebra(path.to_string()));
    }

    let keyword = matches!(
        word,
        "let"
            | "decompose"
            | "counterexample"
            | "certify"
            | "linearize"
            | "check-additivity"
            | "selftest"
            | "help"
            | "quit"
            | "exit"
    );
    if !keyword {
        let mut p = Parser::new(lex(line, 0)?);
        let e = p.expr()?;
        p.expect_eof()?;
        return Ok(Command::Eval(e));
    }

    let mut p = Parser::new(lex(tail, base)?);
    let cmd = match word {
        "let" => {
            let name = p.ident("a binding name")?;
            p.expect(Tok::Eq)?;
            Command::Let(name, p.expr()?)
        }
        "decompose" => Command::Decompose(p.ident("a binding name")?),
        "counterexample" => {
            let a = p.ident("a variable name")?;
            let b = p.ident("a variable name")?;
            Command::Counterexample(a, b)
        }
        "certify" => {
            let name = p.ident("a binding name")?;
            let x = p.expr()?;
            let y = p.expr()?;
            Command::Certify(name, x, y)
        }
        "linearize" => Command::Linearize(p.ident("a binding name")?, p.opt_seed()?),
        "check-additivity" => Command::CheckAdditivity(p.ident("a binding name")?, p.opt_seed()?),
        "selftest" => Command::Selftest(p.opt_seed()?),
        "help" => Command::Help,
        _ => Command::Quit,
    };
    p.expect_eof()?;
    Ok(cmd)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(toks: Vec<Token>) -> Self {
        Parser { toks, pos: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].offset
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> CliResult<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(CliError::syntax(
                self.offset(),
                format!("expected {}, found {}", want.describe(), self.peek().describe()),
            ))
        }
    }

    fn expect_eof(&mut self) -> CliResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(CliError::syntax(
                self.offset(),
                format!("expected end of input, found {}", self.peek().describe()),
            ))
        }
    }

    /// Consumes the closing delimiter of a group. At end of input the error
    /// points back at the unmatched opener.
    fn close(&mut self, want: Tok, open_offset: usize, open: char) -> CliResult<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else if *self.peek() == Tok::Eof {
            Err(CliError::syntax(
                open_offset,
                format!("unmatched {:?}", open),
            ))
        } else {
            Err(CliError::syntax(
                self.offset(),
                format!("expected {}, found {}", want.describe(), self.peek().describe()),
            ))
        }
    }

    fn ident(&mut self, what: &str) -> CliResult<String> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            other => Err(CliError::syntax(
                self.offset(),
                format!("expected {}, found {}", what, other.describe()),
            )),
        }
    }

    fn uint(&mut self, what: &str) -> CliResult<i64> {
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            ref other => Err(CliError::syntax(
                self.offset(),
                format!("expected {}, found {}", what, other.describe()),
            )),
        }
    }

    fn opt_seed(&mut self) -> CliResult<Option<u64>> {
        if let Tok::Int(n) = *self.peek() {
            self.bump();
            Ok(Some(n as u64))
        } else {
            Ok(None)
        }
    }

    fn expr(&mut self) -> CliResult<Expr> {
        let mut acc = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            acc = Expr::Binary(op, Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn term(&mut self) -> CliResult<Expr> {
        let mut acc = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.factor()?;
            acc = fold_rational(op, acc, rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> CliResult<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            let caret = self.offset();
            self.bump();
            let n = self.uint("an integer exponent")?;
            let k = u32::try_from(n)
                .map_err(|_| CliError::syntax(caret, "exponent too large"))?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn primary(&mut self) -> CliResult<Expr> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Num(n, 1))
            }
            Tok::Ident(name) => match name.as_str() {
                "i" => {
                    self.bump();
                    Ok(Expr::Imag)
                }
                "true" => {
                    self.bump();
                    Ok(Expr::Bool(true))
                }
                "false" => {
                    self.bump();
                    Ok(Expr::Bool(false))
                }
                "der" => self.derlit(),
                "mat" => self.matlit(),
                _ => {
                    self.bump();
                    if *self.peek() == Tok::LParen {
                        let open = self.offset();
                        self.bump();
                        let mut args = Vec::new();
                        if *self.peek() != Tok::RParen {
                            loop {
                                args.push(self.expr()?);
                                if *self.peek() == Tok::Comma {
                                    self.bump();
                                } else {
                                    break;
                                }
                            }
                        }
                        self.close(Tok::RParen, open, '(')?;
                        Ok(Expr::Call(name, args))
                    } else {
                        Ok(Expr::Ident(name))
                    }
                }
            },
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.close(Tok::RParen, offset, '(')?;
                Ok(e)
            }
            Tok::LBracket => {
                self.bump();
                let mut entries = vec![self.expr()?];
                while *self.peek() == Tok::Semi {
                    self.bump();
                    entries.push(self.expr()?);
                }
                self.close(Tok::RBracket, offset, '[')?;
                Ok(Expr::Bundle(entries))
            }
            Tok::LBrace => {
                self.bump();
                let mut atoms = Vec::new();
                if *self.peek() != Tok::RBrace {
                    loop {
                        atoms.push(self.uint("an atom index")? as usize);
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.close(Tok::RBrace, offset, '{')?;
                Ok(Expr::IdemLit(atoms))
            }
            other => Err(CliError::syntax(
                offset,
                format!("expected an expression, found {}", other.describe()),
            )),
        }
    }

    fn derlit(&mut self) -> CliResult<Expr> {
        self.bump();
        let open = self.offset();
        self.expect(Tok::LBrace)?;
        let mut pairs = Vec::new();
        if *self.peek() != Tok::RBrace {
            loop {
                let name = self.ident("a variable name")?;
                self.expect(Tok::Colon)?;
                pairs.push((name, self.expr()?));
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.close(Tok::RBrace, open, '{')?;
        Ok(Expr::DerLit(pairs))
    }

    fn matlit(&mut self) -> CliResult<Expr> {
        self.bump();
        let open = self.offset();
        self.expect(Tok::LBracket)?;
        let mut rows = Vec::new();
        loop {
            let row_open = self.offset();
            self.expect(Tok::LBracket)?;
            let mut row = vec![self.expr()?];
            while *self.peek() == Tok::Comma {
                self.bump();
                row.push(self.expr()?);
            }
            self.close(Tok::RBracket, row_open, '[')?;
            rows.push(row);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.close(Tok::RBracket, open, '[')?;
        Ok(Expr::MatLit(rows))
    }
}

/// `INT / INT` becomes a rational literal; everything else stays a division
/// node. Folding repeatedly keeps `1/2/3` exact as `Num(1, 6)`.
fn fold_rational(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
    if op == BinOp::Div {
        if let (Expr::Num(a, d), Expr::Num(b, 1)) = (&lhs, &rhs) {
            if *b != 0 {
                if let Some(den) = d.checked_mul(*b) {
                    return Expr::Num(*a, den);
                }
            }
        }
    }
    Expr::Binary(op, Box::new(lhs), Box::new(rhs))
}
