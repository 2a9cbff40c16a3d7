//! The function registry backing call expressions.
//!
//! Each builtin owns its argument handling: most evaluate every argument,
//! but a few (`memb`, `depends`, `extend`) read trailing arguments as bare
//! variable names, and the integer arguments of the matrix constructors are
//! literal so no algebra value is involved. Dispatch, `help` output, and
//! arity errors all come from the one table below.

use std::collections::BTreeSet;

use regulus::{
    commutator, extend_with_value, AbelianDerivation, AbelianTwoLocal, Idempotent,
    MatrixDerivation, MatrixElement, MatrixTwoLocal, RegularElement, Scalar, VarId,
};

use crate::ast::Expr;
use crate::error::{CliError, CliResult};
use crate::session::Session;
use crate::value::Value;

pub struct Builtin {
    pub name: &'static str,
    pub signature: &'static str,
    pub summary: &'static str,
    eval: fn(&Session, &[Expr]) -> CliResult<Value>,
}

impl Builtin {
    pub fn eval(&self, s: &Session, args: &[Expr]) -> CliResult<Value> {
        (self.eval)(s, args)
    }
}

pub fn find(name: &str) -> Option<&'static Builtin> {
    REGISTRY.iter().find(|b| b.name == name)
}

pub fn registry() -> &'static [Builtin] {
    REGISTRY
}

static REGISTRY: &[Builtin] = &[
    Builtin {
        name: "support",
        signature: "support(x)",
        summary: "least idempotent e with e*x = x",
        eval: b_support,
    },
    Builtin {
        name: "pinv",
        signature: "pinv(x)",
        summary: "pseudo-inverse: x * pinv(x) = support(x)",
        eval: b_pinv,
    },
    Builtin {
        name: "mask",
        signature: "mask(v, e)",
        summary: "cut an element, derivation or matrix down to the atoms of e",
        eval: b_mask,
    },
    Builtin {
        name: "measure",
        signature: "measure(e)",
        summary: "total weight of the atoms of e",
        eval: b_measure,
    },
    Builtin {
        name: "rho",
        signature: "rho(x, y)",
        summary: "distance: the measure of support(x - y)",
        eval: b_rho,
    },
    Builtin {
        name: "meet",
        signature: "meet(e, f)",
        summary: "lattice meet of two idempotents",
        eval: b_meet,
    },
    Builtin {
        name: "join",
        signature: "join(e, f)",
        summary: "lattice join of two idempotents",
        eval: b_join,
    },
    Builtin {
        name: "complement",
        signature: "complement(e)",
        summary: "complementary idempotent 1 - e",
        eval: b_complement,
    },
    Builtin {
        name: "leq",
        signature: "leq(e, f)",
        summary: "whether e <= f in the idempotent order",
        eval: b_leq,
    },
    Builtin {
        name: "sup",
        signature: "sup(e1, ..., ek)",
        summary: "supremum of one or more idempotents",
        eval: b_sup,
    },
    Builtin {
        name: "isfv",
        signature: "isfv(x)",
        summary: "whether x is finitely valued (locally constant)",
        eval: b_isfv,
    },
    Builtin {
        name: "memb",
        signature: "memb(x, v1, ..., vk)",
        summary: "atoms where x lies in the subfield the named variables generate",
        eval: b_memb,
    },
    Builtin {
        name: "depends",
        signature: "depends(x, v, atom)",
        summary: "whether the stalk of x on the 1-based atom involves v",
        eval: b_depends,
    },
    Builtin {
        name: "jac",
        signature: "jac(x1, ..., xk)",
        summary: "atoms where the family is algebraically independent",
        eval: b_jac,
    },
    Builtin {
        name: "extend",
        signature: "extend(D, y, c, v1, ..., vk)",
        summary: "extend D from the named generators to take the value c at y",
        eval: b_extend,
    },
    Builtin {
        name: "apply",
        signature: "apply(D, x)",
        summary: "apply a derivation or 2-local map to a point",
        eval: b_apply,
    },
    Builtin {
        name: "unit",
        signature: "unit(n, i, j)",
        summary: "n x n matrix unit with a one in row i, column j (1-based)",
        eval: b_unit,
    },
    Builtin {
        name: "identity",
        signature: "identity(n)",
        summary: "n x n identity matrix",
        eval: b_identity,
    },
    Builtin {
        name: "central",
        signature: "central(n, f)",
        summary: "n x n diagonal matrix with f in every slot",
        eval: b_central,
    },
    Builtin {
        name: "halving",
        signature: "halving(n)",
        summary: "diagonal matrix diag(1, 1/2, ..., 1/2^(n-1))",
        eval: b_halving,
    },
    Builtin {
        name: "shift",
        signature: "shift(n)",
        summary: "superdiagonal shift matrix",
        eval: b_shift,
    },
    Builtin {
        name: "commutator",
        signature: "commutator(a, x)",
        summary: "matrix commutator a*x - x*a",
        eval: b_commutator,
    },
    Builtin {
        name: "entry",
        signature: "entry(m, i, j)",
        summary: "matrix entry in row i, column j (1-based)",
        eval: b_entry,
    },
    Builtin {
        name: "matder",
        signature: "matder(a[, D])",
        summary: "matrix derivation x -> [a, x] + D applied entrywise",
        eval: b_matder,
    },
    Builtin {
        name: "inner",
        signature: "inner(M)",
        summary: "inner part of a matrix derivation, normalized",
        eval: b_inner,
    },
    Builtin {
        name: "center",
        signature: "center(M)",
        summary: "center derivation of a matrix derivation",
        eval: b_center,
    },
    Builtin {
        name: "twolocal",
        signature: "twolocal(D)",
        summary: "wrap a derivation as an honest 2-local map",
        eval: b_twolocal,
    },
];

fn arity(name: &str, args: &[Expr], n: usize) -> CliResult<()> {
    if args.len() == n {
        Ok(())
    } else {
        Err(CliError::bad(format!(
            "{} takes {} argument(s), got {}",
            name,
            n,
            args.len()
        )))
    }
}

fn at_least(name: &str, args: &[Expr], n: usize) -> CliResult<()> {
    if args.len() >= n {
        Ok(())
    } else {
        Err(CliError::bad(format!(
            "{} takes at least {} argument(s), got {}",
            name,
            n,
            args.len()
        )))
    }
}

fn wrong_kind(name: &str, k: usize, want: &str, got: &Value) -> CliError {
    CliError::bad(format!(
        "argument {} of {} must be {}, got {}",
        k + 1,
        name,
        want,
        got.article()
    ))
}

/// Elements are accepted directly; idempotents embed as their indicator
/// element.
fn elem(s: &Session, name: &str, args: &[Expr], k: usize) -> CliResult<RegularElement> {
    match s.eval(&args[k])? {
        Value::Element(x) => Ok(x),
        Value::Idem(e) => Ok(RegularElement::from_idempotent(s.algebra()?, &e)?),
        other => Err(wrong_kind(name, k, "an element", &other)),
    }
}

fn idem(s: &Session, name: &str, args: &[Expr], k: usize) -> CliResult<Idempotent> {
    match s.eval(&args[k])? {
        Value::Idem(e) => Ok(e),
        other => Err(wrong_kind(name, k, "an idempotent", &other)),
    }
}

fn deriv(s: &Session, name: &str, args: &[Expr], k: usize) -> CliResult<AbelianDerivation> {
    match s.eval(&args[k])? {
        Value::Deriv(d) => Ok(d),
        other => Err(wrong_kind(name, k, "a derivation", &other)),
    }
}

fn matx(s: &Session, name: &str, args: &[Expr], k: usize) -> CliResult<MatrixElement> {
    match s.eval(&args[k])? {
        Value::Matrix(m) => Ok(m),
        other => Err(wrong_kind(name, k, "a matrix", &other)),
    }
}

fn matderiv(s: &Session, name: &str, args: &[Expr], k: usize) -> CliResult<MatrixDerivation> {
    match s.eval(&args[k])? {
        Value::MatDeriv(d) => Ok(d),
        other => Err(wrong_kind(name, k, "a matrix derivation", &other)),
    }
}

/// Literal nonnegative integer argument, read off the syntax tree.
fn uint(name: &str, args: &[Expr], k: usize) -> CliResult<usize> {
    match args[k] {
        Expr::Num(n, 1) if n >= 0 => Ok(n as usize),
        _ => Err(CliError::bad(format!(
            "argument {} of {} must be a literal nonnegative integer",
            k + 1,
            name
        ))),
    }
}

/// Bare identifier argument naming an algebra variable.
fn var(s: &Session, name: &str, args: &[Expr], k: usize) -> CliResult<VarId> {
    match &args[k] {
        Expr::Ident(v) => s
            .algebra()?
            .vars()
            .index(v)
            .ok_or_else(|| CliError::bad(format!("{:?} is not an algebra variable", v))),
        _ => Err(CliError::bad(format!(
            "argument {} of {} must be a variable name",
            k + 1,
            name
        ))),
    }
}

/// 1-based index argument, checked against an exclusive upper bound.
fn index(name: &str, args: &[Expr], k: usize, what: &str, count: usize) -> CliResult<usize> {
    let i = uint(name, args, k)?;
    if i >= 1 && i <= count {
        Ok(i - 1)
    } else {
        Err(CliError::bad(format!(
            "{} {} out of range for {}: valid values are 1..={}",
            what, i, name, count
        )))
    }
}

fn b_support(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("support", args, 1)?;
    Ok(Value::Idem(elem(s, "support", args, 0)?.support()))
}

fn b_pinv(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("pinv", args, 1)?;
    Ok(Value::Element(elem(s, "pinv", args, 0)?.pinv()))
}

fn b_mask(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("mask", args, 2)?;
    let e = idem(s, "mask", args, 1)?;
    match s.eval(&args[0])? {
        Value::Element(x) => Ok(Value::Element(x.mask(&e)?)),
        Value::Deriv(d) => Ok(Value::Deriv(d.mask(&e)?)),
        Value::Matrix(m) => Ok(Value::Matrix(m.mask(&e)?)),
        Value::Idem(f) => Ok(Value::Idem(f.meet(&e)?)),
        other => Err(wrong_kind(
            "mask",
            0,
            "an element, derivation, matrix or idempotent",
            &other,
        )),
    }
}

fn b_measure(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("measure", args, 1)?;
    let e = idem(s, "measure", args, 0)?;
    Ok(Value::Element(RegularElement::from_scalar(
        s.algebra()?,
        Scalar::from_rational(e.measure()),
    )))
}

fn b_rho(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("rho", args, 2)?;
    let x = elem(s, "rho", args, 0)?;
    let y = elem(s, "rho", args, 1)?;
    Ok(Value::Element(RegularElement::from_scalar(
        s.algebra()?,
        Scalar::from_rational(x.rho(&y)?),
    )))
}

fn b_meet(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("meet", args, 2)?;
    let e = idem(s, "meet", args, 0)?;
    Ok(Value::Idem(e.meet(&idem(s, "meet", args, 1)?)?))
}

fn b_join(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("join", args, 2)?;
    let e = idem(s, "join", args, 0)?;
    Ok(Value::Idem(e.join(&idem(s, "join", args, 1)?)?))
}

fn b_complement(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("complement", args, 1)?;
    Ok(Value::Idem(idem(s, "complement", args, 0)?.complement()))
}

fn b_leq(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("leq", args, 2)?;
    let e = idem(s, "leq", args, 0)?;
    Ok(Value::Bool(e.leq(&idem(s, "leq", args, 1)?)?))
}

fn b_sup(s: &Session, args: &[Expr]) -> CliResult<Value> {
    at_least("sup", args, 1)?;
    let mut items = Vec::with_capacity(args.len());
    for k in 0..args.len() {
        items.push(idem(s, "sup", args, k)?);
    }
    let space = s.algebra()?.space().clone();
    Ok(Value::Idem(Idempotent::sup_family(&space, &items)?))
}

fn b_isfv(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("isfv", args, 1)?;
    Ok(Value::Bool(elem(s, "isfv", args, 0)?.is_finitely_valued()))
}

fn b_memb(s: &Session, args: &[Expr]) -> CliResult<Value> {
    at_least("memb", args, 1)?;
    let x = elem(s, "memb", args, 0)?;
    let mut gens = BTreeSet::new();
    for k in 1..args.len() {
        gens.insert(var(s, "memb", args, k)?);
    }
    Ok(Value::Idem(x.membership_idempotent(&gens)?))
}

fn b_depends(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("depends", args, 3)?;
    let x = elem(s, "depends", args, 0)?;
    let v = var(s, "depends", args, 1)?;
    let atom = index("depends", args, 2, "atom", s.algebra()?.atom_count())?;
    Ok(Value::Bool(x.depends_on(v, atom)?))
}

fn b_jac(s: &Session, args: &[Expr]) -> CliResult<Value> {
    at_least("jac", args, 1)?;
    let mut elems = Vec::with_capacity(args.len());
    for k in 0..args.len() {
        elems.push(elem(s, "jac", args, k)?);
    }
    Ok(Value::Idem(regulus::jacobian_independent(&elems)?))
}

fn b_extend(s: &Session, args: &[Expr]) -> CliResult<Value> {
    at_least("extend", args, 3)?;
    let base = deriv(s, "extend", args, 0)?;
    let y = elem(s, "extend", args, 1)?;
    let c = elem(s, "extend", args, 2)?;
    let mut gens = BTreeSet::new();
    for k in 3..args.len() {
        gens.insert(var(s, "extend", args, k)?);
    }
    Ok(Value::Deriv(extend_with_value(&gens, &base, &y, &c)?))
}

fn b_apply(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("apply", args, 2)?;
    match s.eval(&args[0])? {
        Value::Deriv(d) => Ok(Value::Element(d.apply(&elem(s, "apply", args, 1)?)?)),
        Value::MatDeriv(d) => Ok(Value::Matrix(d.apply(&matx(s, "apply", args, 1)?)?)),
        Value::TwoLocalAb(m) => Ok(Value::Element(m.value(&elem(s, "apply", args, 1)?)?)),
        Value::TwoLocalMat(m) => Ok(Value::Matrix(m.value(&matx(s, "apply", args, 1)?)?)),
        other => Err(wrong_kind(
            "apply",
            0,
            "a derivation or 2-local map",
            &other,
        )),
    }
}

fn b_unit(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("unit", args, 3)?;
    let n = uint("unit", args, 0)?;
    let i = index("unit", args, 1, "row", n)?;
    let j = index("unit", args, 2, "column", n)?;
    Ok(Value::Matrix(MatrixElement::unit(s.algebra()?, n, i, j)?))
}

fn b_identity(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("identity", args, 1)?;
    let n = uint("identity", args, 0)?;
    Ok(Value::Matrix(MatrixElement::identity(s.algebra()?, n)?))
}

fn b_central(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("central", args, 2)?;
    let n = uint("central", args, 0)?;
    let f = elem(s, "central", args, 1)?;
    Ok(Value::Matrix(MatrixElement::central(s.algebra()?, n, &f)?))
}

fn b_halving(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("halving", args, 1)?;
    let n = uint("halving", args, 0)?;
    Ok(Value::Matrix(MatrixElement::halving_diagonal(
        s.algebra()?,
        n,
    )?))
}

fn b_shift(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("shift", args, 1)?;
    let n = uint("shift", args, 0)?;
    Ok(Value::Matrix(MatrixElement::superdiagonal_shift(
        s.algebra()?,
        n,
    )?))
}

fn b_commutator(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("commutator", args, 2)?;
    let a = matx(s, "commutator", args, 0)?;
    let x = matx(s, "commutator", args, 1)?;
    Ok(Value::Matrix(commutator(&a, &x)?))
}

fn b_entry(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("entry", args, 3)?;
    let m = matx(s, "entry", args, 0)?;
    let i = index("entry", args, 1, "row", m.dim())?;
    let j = index("entry", args, 2, "column", m.dim())?;
    Ok(Value::Element(m.entry(i, j).clone()))
}

fn b_matder(s: &Session, args: &[Expr]) -> CliResult<Value> {
    if args.is_empty() || args.len() > 2 {
        return Err(CliError::bad(format!(
            "matder takes 1 or 2 argument(s), got {}",
            args.len()
        )));
    }
    let inner = matx(s, "matder", args, 0)?;
    let center = if args.len() == 2 {
        deriv(s, "matder", args, 1)?
    } else {
        AbelianDerivation::zero(s.algebra()?)
    };
    Ok(Value::MatDeriv(MatrixDerivation::new(inner, center)?))
}

fn b_inner(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("inner", args, 1)?;
    Ok(Value::Matrix(matderiv(s, "inner", args, 0)?.inner().clone()))
}

fn b_center(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("center", args, 1)?;
    Ok(Value::Deriv(
        matderiv(s, "center", args, 0)?.center().clone(),
    ))
}

fn b_twolocal(s: &Session, args: &[Expr]) -> CliResult<Value> {
    arity("twolocal", args, 1)?;
    match s.eval(&args[0])? {
        Value::Deriv(d) => Ok(Value::TwoLocalAb(AbelianTwoLocal::from_derivation(&d))),
        Value::MatDeriv(d) => Ok(Value::TwoLocalMat(MatrixTwoLocal::from_derivation(&d))),
        other => Err(wrong_kind(
            "twolocal",
            0,
            "a derivation or matrix derivation",
            &other,
        )),
    }
}
