//! Syntax trees for expressions and session commands.

pub type Offset = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Expression tree. Rational literals are folded at parse time, so `1/2`
/// arrives as a single `Num` node; every other `/` is ordinary division.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// Rational literal `num/den` with `den >= 1`.
    Num(i64, i64),
    /// The imaginary unit `i`.
    Imag,
    Bool(bool),
    Ident(String),
    Call(String, Vec<Expr>),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Integer power of a base expression.
    Pow(Box<Expr>, u32),
    /// Per-atom stalks: `[e1; e2; e3]`.
    Bundle(Vec<Expr>),
    /// Row-major matrix literal: `mat[[a, b], [c, d]]`.
    MatLit(Vec<Vec<Expr>>),
    /// Derivation literal: `der{t: e, s: f}`.
    DerLit(Vec<(String, Expr)>),
    /// Idempotent literal with 1-based atom indices: `{1, 3}`.
    IdemLit(Vec<usize>),
}

/// One line of session input.
#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    /// Blank line or comment.
    Nop,
    Eval(Expr),
    LoadAlgebra(String),
    Let(String, Expr),
    Decompose(String),
    Counterexample(String, String),
    Certify(String, Expr, Expr),
    Linearize(String, Option<u64>),
    CheckAdditivity(String, Option<u64>),
    Selftest(Option<u64>),
    Help,
    Quit,
}
