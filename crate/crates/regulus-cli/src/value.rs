//! Session values: everything an expression can evaluate to.

use std::fmt;

use regulus::{
    AbelianDerivation, AbelianTwoLocal, Idempotent, MatrixDerivation, MatrixElement,
    MatrixTwoLocal, RegularElement,
};

#[derive(Clone)]
pub enum Value {
    Element(RegularElement),
    Idem(Idempotent),
    Deriv(AbelianDerivation),
    Matrix(MatrixElement),
    MatDeriv(MatrixDerivation),
    TwoLocalAb(AbelianTwoLocal),
    TwoLocalMat(MatrixTwoLocal),
    Bool(bool),
}

impl Value {
    /// Short machine-readable kind tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Element(_) => "element",
            Value::Idem(_) => "idempotent",
            Value::Deriv(_) => "derivation",
            Value::Matrix(_) => "matrix",
            Value::MatDeriv(_) => "matrix-derivation",
            Value::TwoLocalAb(_) => "two-local",
            Value::TwoLocalMat(_) => "two-local-matrix",
            Value::Bool(_) => "boolean",
        }
    }

    /// Kind with its article, for error messages.
    pub fn article(&self) -> &'static str {
        match self {
            Value::Element(_) => "an element",
            Value::Idem(_) => "an idempotent",
            Value::Deriv(_) => "a derivation",
            Value::Matrix(_) => "a matrix",
            Value::MatDeriv(_) => "a matrix derivation",
            Value::TwoLocalAb(_) => "a 2-local map",
            Value::TwoLocalMat(_) => "a 2-local matrix map",
            Value::Bool(_) => "a boolean",
        }
    }
}

/// Concrete values print in the expression syntax and re-parse to the same
/// value; the function-backed 2-local maps print as short descriptions.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Element(x) => write!(f, "{}", x),
            Value::Idem(e) => write!(f, "{}", e),
            Value::Deriv(d) => write!(f, "{}", d),
            Value::Matrix(m) => write!(f, "{}", m),
            Value::MatDeriv(d) => write!(f, "{}", d),
            Value::TwoLocalAb(m) => {
                write!(f, "2-local map on {} atom(s)", m.algebra().atom_count())
            }
            Value::TwoLocalMat(m) => write!(f, "2-local map on {0}x{0} matrices", m.dim()),
            Value::Bool(b) => write!(f, "{}", b),
        }
    }
}

/// The 2-local variants wrap closures, so Debug falls back to the display form.
impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind(), self)
    }
}
