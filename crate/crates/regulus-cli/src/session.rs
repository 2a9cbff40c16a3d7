//! The interactive session: an algebra, named bindings, and the command
//! executors producing report lines.
//!
//! Reports are deterministic: bindings live in ordered maps, every
//! randomized command takes an explicit seed with a fixed default, and no
//! line carries wall-clock data except the selftest timings. Machine mode
//! renders the same facts as `event key="value"` lines with Rust string
//! escaping, one event per line.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::Path;

use regulus::{
    build_counterexample, decompose, selftest, AbelianDerivation, AdditivityReport, Algebra,
    EvaluationTable, LinearizeConfig, MatrixElement, Rational, RegularElement,
    Scalar,
};

use crate::ast::{BinOp, Command, Expr};
use crate::builtins;
use crate::error::{CliError, CliResult};
use crate::parse;
use crate::value::Value;

/// Default seed for every randomized command.
pub const DEFAULT_SEED: u64 = 0xD1CE;

/// Sample count used by `check-additivity`.
pub const ADDITIVITY_SAMPLES: usize = 64;

/// Name bound by the `counterexample` command.
pub const COUNTEREXAMPLE_NAME: &str = "cex";

/// Result of one session line.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub lines: Vec<String>,
    pub quit: bool,
    /// Set when a selftest ran and at least one check failed.
    pub failed: bool,
}

fn ok(lines: Vec<String>) -> CliResult<Outcome> {
    Ok(Outcome {
        lines,
        ..Outcome::default()
    })
}

/// Renders a machine-mode line: the event name followed by quoted fields.
fn mline(event: &str, fields: &[(&str, &str)]) -> String {
    let mut s = String::from(event);
    for (k, v) in fields {
        s.push(' ');
        s.push_str(k);
        s.push('=');
        s.push_str(&format!("{:?}", v));
    }
    s
}

pub struct Session {
    algebra: Option<Algebra>,
    bindings: BTreeMap<String, Value>,
    seed: u64,
    machine: bool,
}

impl Default for Session {
    fn default() -> Self {
        Session::new()
    }
}

impl Session {
    pub fn new() -> Self {
        Session {
            algebra: None,
            bindings: BTreeMap::new(),
            seed: DEFAULT_SEED,
            machine: false,
        }
    }

    pub fn set_machine(&mut self, machine: bool) {
        self.machine = machine;
    }

    pub fn algebra(&self) -> CliResult<&Algebra> {
        self.algebra.as_ref().ok_or(CliError::NoAlgebra)
    }

    fn bound(&self, name: &str) -> CliResult<&Value> {
        self.bindings
            .get(name)
            .ok_or_else(|| CliError::Unbound(name.to_string()))
    }

    /// Parses and runs one line of input.
    pub fn run_line(&mut self, line: &str) -> CliResult<Outcome> {
        let cmd = parse::parse_command(line)?;
        self.run_command(cmd)
    }

    /// Parses and evaluates a bare expression; test and tooling entry point.
    pub fn eval_str(&self, src: &str) -> CliResult<Value> {
        self.eval(&parse::parse_expr(src)?)
    }

    pub fn eval(&self, e: &Expr) -> CliResult<Value> {
        match e {
            Expr::Num(n, d) => Ok(Value::Element(RegularElement::from_scalar(
                self.algebra()?,
                Scalar::from_ratio(*n, *d),
            ))),
            Expr::Imag => Ok(Value::Element(RegularElement::from_scalar(
                self.algebra()?,
                Scalar::i(),
            ))),
            Expr::Bool(b) => Ok(Value::Bool(*b)),
            Expr::Ident(name) => {
                if let Some(v) = self.bindings.get(name) {
                    return Ok(v.clone());
                }
                let alg = self.algebra()?;
                match alg.vars().index(name) {
                    Some(v) => Ok(Value::Element(RegularElement::variable(alg, v)?)),
                    None => Err(CliError::Unbound(name.clone())),
                }
            }
            Expr::Call(name, args) => match builtins::find(name) {
                Some(b) => b.eval(self, args),
                None => Err(CliError::bad(format!(
                    "unknown function {:?}; `help` lists the available ones",
                    name
                ))),
            },
            Expr::Neg(inner) => match self.eval(inner)? {
                Value::Element(x) => Ok(Value::Element(x.neg())),
                Value::Matrix(m) => Ok(Value::Matrix(m.neg())),
                Value::Deriv(d) => Ok(Value::Deriv(d.neg())),
                Value::MatDeriv(d) => Ok(Value::MatDeriv(d.neg())),
                other => Err(CliError::bad(format!("cannot negate {}", other.article()))),
            },
            Expr::Binary(op, a, b) => self.binop(*op, self.eval(a)?, self.eval(b)?),
            Expr::Pow(base, k) => self.pow(self.eval(base)?, *k),
            Expr::Bundle(entries) => {
                let alg = self.algebra()?;
                if entries.len() != alg.atom_count() {
                    return Err(CliError::bad(format!(
                        "bundle has {} entries but the algebra has {} atom(s)",
                        entries.len(),
                        alg.atom_count()
                    )));
                }
                let mut stalks = Vec::with_capacity(entries.len());
                for (atom, entry) in entries.iter().enumerate() {
                    match self.eval(entry)? {
                        Value::Element(x) => stalks.push(x.stalk(atom).clone()),
                        other => {
                            return Err(CliError::bad(format!(
                                "bundle entry {} must be an element, got {}",
                                atom + 1,
                                other.article()
                            )))
                        }
                    }
                }
                Ok(Value::Element(RegularElement::from_stalks(alg, stalks)?))
            }
            Expr::MatLit(rows) => {
                let alg = self.algebra()?;
                let n = rows.len();
                let mut entries = Vec::with_capacity(n * n);
                for (r, row) in rows.iter().enumerate() {
                    if row.len() != n {
                        return Err(CliError::bad(format!(
                            "matrix literal must be square: row {} has {} entries, expected {}",
                            r + 1,
                            row.len(),
                            n
                        )));
                    }
                    for entry in row {
                        match self.eval(entry)? {
                            Value::Element(x) => entries.push(x),
                            other => {
                                return Err(CliError::bad(format!(
                                    "matrix entries must be elements, got {}",
                                    other.article()
                                )))
                            }
                        }
                    }
                }
                Ok(Value::Matrix(MatrixElement::from_entries(alg, n, entries)?))
            }
            Expr::DerLit(pairs) => {
                let alg = self.algebra()?;
                let mut values = Vec::with_capacity(pairs.len());
                for (name, expr) in pairs {
                    let v = alg.vars().index(name).ok_or_else(|| {
                        CliError::bad(format!(
                            "unknown variable {:?} in derivation literal",
                            name
                        ))
                    })?;
                    match self.eval(expr)? {
                        Value::Element(x) => values.push((v, x)),
                        other => {
                            return Err(CliError::bad(format!(
                                "derivation values must be elements, got {}",
                                other.article()
                            )))
                        }
                    }
                }
                Ok(Value::Deriv(AbelianDerivation::with_values(alg, &values)?))
            }
            Expr::IdemLit(atoms) => {
                let alg = self.algebra()?;
                let mut indices = Vec::with_capacity(atoms.len());
                for &a in atoms {
                    if a < 1 || a > alg.atom_count() {
                        return Err(CliError::bad(format!(
                            "atom index {} out of range: the algebra has {} atom(s), indexed from 1",
                            a,
                            alg.atom_count()
                        )));
                    }
                    indices.push(a - 1);
                }
                Ok(Value::Idem(regulus::Idempotent::from_atoms(
                    alg.space(),
                    &indices,
                )?))
            }
        }
    }

    /// Binary operators dispatch on the operand kinds. Idempotents embed as
    /// their indicator elements when mixed with elements, so `e * x` masks.
    fn binop(&self, op: BinOp, a: Value, b: Value) -> CliResult<Value> {
        use Value::*;
        let promote = |v: Value| -> CliResult<Value> {
            match v {
                Idem(e) => Ok(Element(RegularElement::from_idempotent(
                    self.algebra()?,
                    &e,
                )?)),
                other => Ok(other),
            }
        };
        match (op, a, b) {
            (op, Element(x), Element(y)) => Ok(Element(match op {
                BinOp::Add => x.add(&y)?,
                BinOp::Sub => x.sub(&y)?,
                BinOp::Mul => x.mul(&y)?,
                BinOp::Div => x.div(&y)?,
            })),
            (BinOp::Mul, Idem(e), Idem(f)) => Ok(Idem(e.meet(&f)?)),
            (op, a @ Idem(_), b) | (op, a, b @ Idem(_)) => {
                let (a, b) = (promote(a)?, promote(b)?);
                self.binop(op, a, b)
            }
            (BinOp::Add, Matrix(x), Matrix(y)) => Ok(Matrix(x.add(&y)?)),
            (BinOp::Sub, Matrix(x), Matrix(y)) => Ok(Matrix(x.sub(&y)?)),
            (BinOp::Mul, Matrix(x), Matrix(y)) => Ok(Matrix(x.mul(&y)?)),
            (BinOp::Mul, Matrix(m), Element(f)) | (BinOp::Mul, Element(f), Matrix(m)) => {
                Ok(Matrix(m.element_mul(&f)?))
            }
            (BinOp::Add, Deriv(x), Deriv(y)) => Ok(Deriv(x.add(&y)?)),
            (BinOp::Sub, Deriv(x), Deriv(y)) => Ok(Deriv(x.sub(&y)?)),
            (BinOp::Mul, Deriv(d), Element(f)) | (BinOp::Mul, Element(f), Deriv(d)) => {
                Ok(Deriv(d.element_mul(&f)?))
            }
            (BinOp::Add, MatDeriv(x), MatDeriv(y)) => Ok(MatDeriv(x.add(&y)?)),
            (BinOp::Sub, MatDeriv(x), MatDeriv(y)) => Ok(MatDeriv(x.sub(&y)?)),
            (op, a, b) => Err(CliError::bad(format!(
                "operator {} is not defined between {} and {}",
                match op {
                    BinOp::Add => "'+'",
                    BinOp::Sub => "'-'",
                    BinOp::Mul => "'*'",
                    BinOp::Div => "'/'",
                },
                a.article(),
                b.article()
            ))),
        }
    }

    fn pow(&self, base: Value, k: u32) -> CliResult<Value> {
        match base {
            Value::Element(x) => {
                let mut acc = RegularElement::one(self.algebra()?);
                for _ in 0..k {
                    acc = acc.mul(&x)?;
                }
                Ok(Value::Element(acc))
            }
            Value::Matrix(m) => {
                let mut acc = MatrixElement::identity(self.algebra()?, m.dim())?;
                for _ in 0..k {
                    acc = acc.mul(&m)?;
                }
                Ok(Value::Matrix(acc))
            }
            other => Err(CliError::bad(format!(
                "'^' needs an element or matrix base, got {}",
                other.article()
            ))),
        }
    }

    pub fn run_command(&mut self, cmd: Command) -> CliResult<Outcome> {
        match cmd {
            Command::Nop => ok(vec![]),
            Command::Quit => Ok(Outcome {
                quit: true,
                ..Outcome::default()
            }),
            Command::Help => ok(self.help_lines()),
            Command::Eval(e) => {
                let v = self.eval(&e)?;
                if self.machine {
                    ok(vec![mline(
                        "value",
                        &[("kind", v.kind()), ("value", &v.to_string())],
                    )])
                } else {
                    ok(vec![v.to_string()])
                }
            }
            Command::Let(name, e) => self.cmd_let(name, e),
            Command::LoadAlgebra(path) => self.cmd_load(&path),
            Command::Decompose(name) => self.cmd_decompose(&name),
            Command::Counterexample(a, b) => self.cmd_counterexample(&a, &b),
            Command::Certify(name, x, y) => self.cmd_certify(&name, &x, &y),
            Command::Linearize(name, seed) => self.cmd_linearize(&name, seed),
            Command::CheckAdditivity(name, seed) => self.cmd_additivity(&name, seed),
            Command::Selftest(seed) => self.cmd_selftest(seed),
        }
    }

    fn cmd_let(&mut self, name: String, e: Expr) -> CliResult<Outcome> {
        if matches!(name.as_str(), "i" | "der" | "mat" | "true" | "false") {
            return Err(CliError::bad(format!(
                "{:?} is a reserved word and cannot be bound",
                name
            )));
        }
        if let Some(alg) = &self.algebra {
            if alg.vars().index(&name).is_some() {
                return Err(CliError::bad(format!(
                    "cannot rebind the algebra variable {:?}",
                    name
                )));
            }
        }
        let v = self.eval(&e)?;
        let line = if self.machine {
            mline(
                "bind",
                &[
                    ("name", &name),
                    ("kind", v.kind()),
                    ("value", &v.to_string()),
                ],
            )
        } else {
            format!("{} = {}", name, v)
        };
        self.bindings.insert(name, v);
        ok(vec![line])
    }

    fn cmd_load(&mut self, path: &str) -> CliResult<Outcome> {
        let text = fs::read_to_string(Path::new(path))
            .map_err(|e| CliError::bad(format!("cannot read {}: {}", path, e)))?;
        let algebra = parse_algebra_file(&text)?;
        let cleared = self.bindings.len();
        self.bindings.clear();
        let weights: Vec<String> = algebra
            .space()
            .weights()
            .iter()
            .map(Rational::to_string)
            .collect();
        let vars = algebra.vars().names().join(" ");
        let mut lines = if self.machine {
            vec![mline(
                "algebra",
                &[
                    ("atoms", &algebra.atom_count().to_string()),
                    ("weights", &weights.join(" ")),
                    ("vars", &vars),
                ],
            )]
        } else {
            vec![format!(
                "algebra: {} atom(s), weights {}, variables {}",
                algebra.atom_count(),
                weights.join(" "),
                vars
            )]
        };
        if cleared > 0 {
            lines.push(if self.machine {
                mline("cleared", &[("bindings", &cleared.to_string())])
            } else {
                format!("cleared {} binding(s)", cleared)
            });
        }
        self.algebra = Some(algebra);
        ok(lines)
    }

    fn cmd_decompose(&mut self, name: &str) -> CliResult<Outcome> {
        let d = match self.bound(name)? {
            Value::MatDeriv(d) => d.clone(),
            other => {
                return Err(CliError::bad(format!(
                    "decompose needs a matrix derivation, {} is {}",
                    name,
                    other.article()
                )))
            }
        };
        let table = EvaluationTable::tabulate(&d)?;
        let got = decompose(&table)?;
        if got != d {
            return Err(CliError::bad(
                "decomposition did not reproduce the derivation",
            ));
        }
        if self.machine {
            ok(vec![
                mline(
                    "decompose",
                    &[("part", "inner"), ("value", &got.inner().to_string())],
                ),
                mline(
                    "decompose",
                    &[("part", "center"), ("value", &got.center().to_string())],
                ),
                mline("decompose", &[("roundtrip", "exact")]),
            ])
        } else {
            ok(vec![
                format!("inner = {}", got.inner()),
                format!("center = {}", got.center()),
                "round-trip: exact".to_string(),
            ])
        }
    }

    fn cmd_counterexample(&mut self, a: &str, b: &str) -> CliResult<Outcome> {
        let alg = self.algebra()?.clone();
        let va = alg
            .vars()
            .index(a)
            .ok_or_else(|| CliError::bad(format!("{:?} is not an algebra variable", a)))?;
        let vb = alg
            .vars()
            .index(b)
            .ok_or_else(|| CliError::bad(format!("{:?} is not an algebra variable", b)))?;
        let map = build_counterexample(&alg, va, vb)?;
        let ea = RegularElement::variable(&alg, va)?;
        let eb = RegularElement::variable(&alg, vb)?;
        let points = [
            (a.to_string(), map.value(&ea)?),
            (b.to_string(), map.value(&eb)?),
            (format!("{} + {}", a, b), map.value(&ea.add(&eb)?)?),
        ];
        let mut lines = Vec::new();
        if self.machine {
            lines.push(mline(
                "counterexample",
                &[
                    ("bound", COUNTEREXAMPLE_NAME),
                    ("pair", &format!("({}, {})", a, b)),
                ],
            ));
            for (point, value) in &points {
                lines.push(mline(
                    "counterexample",
                    &[("point", point), ("value", &value.to_string())],
                ));
            }
        } else {
            lines.push(format!(
                "{} = 2-local map built from the pair ({}, {})",
                COUNTEREXAMPLE_NAME, a, b
            ));
            for (point, value) in &points {
                lines.push(format!("{}({}) = {}", COUNTEREXAMPLE_NAME, point, value));
            }
        }
        self.bindings
            .insert(COUNTEREXAMPLE_NAME.to_string(), Value::TwoLocalAb(map));
        ok(lines)
    }

    fn cmd_certify(&mut self, name: &str, x: &Expr, y: &Expr) -> CliResult<Outcome> {
        let witness = match self.bound(name)? {
            Value::TwoLocalAb(map) => {
                let map = map.clone();
                let x = self.expect_element(x, "certify")?;
                let y = self.expect_element(y, "certify")?;
                map.certify_pair(&x, &y)?.to_string()
            }
            Value::TwoLocalMat(map) => {
                let map = map.clone();
                let x = self.expect_matrix(x, "certify")?;
                let y = self.expect_matrix(y, "certify")?;
                map.certify_pair(&x, &y)?.to_string()
            }
            other => {
                return Err(CliError::bad(format!(
                    "certify needs a 2-local map, {} is {}",
                    name,
                    other.article()
                )))
            }
        };
        if self.machine {
            ok(vec![mline(
                "certify",
                &[("status", "ok"), ("witness", &witness)],
            )])
        } else {
            ok(vec![
                "certified: the witness agrees with the map at both points".to_string(),
                format!("witness = {}", witness),
            ])
        }
    }

    fn cmd_linearize(&mut self, name: &str, seed: Option<u64>) -> CliResult<Outcome> {
        let map = match self.bound(name)? {
            Value::TwoLocalMat(map) => map.clone(),
            other => {
                return Err(CliError::bad(format!(
                    "linearize needs a 2-local matrix map, {} is {}",
                    name,
                    other.article()
                )))
            }
        };
        let cfg = LinearizeConfig {
            seed: seed.unwrap_or(self.seed),
            ..LinearizeConfig::default()
        };
        let d = map.linearize(&cfg)?;
        if self.machine {
            ok(vec![mline(
                "linearize",
                &[
                    ("status", "ok"),
                    ("inner", &d.inner().to_string()),
                    ("center", &d.center().to_string()),
                ],
            )])
        } else {
            ok(vec![
                "derivation recovered".to_string(),
                format!("inner = {}", d.inner()),
                format!("center = {}", d.center()),
            ])
        }
    }

    fn cmd_additivity(&mut self, name: &str, seed: Option<u64>) -> CliResult<Outcome> {
        let seed = seed.unwrap_or(self.seed);
        let lines = match self.bound(name)? {
            Value::TwoLocalAb(map) => {
                additivity_lines(&map.additivity_check(ADDITIVITY_SAMPLES, seed)?, seed, self.machine)
            }
            Value::TwoLocalMat(map) => {
                additivity_lines(&map.additivity_check(ADDITIVITY_SAMPLES, seed)?, seed, self.machine)
            }
            other => {
                return Err(CliError::bad(format!(
                    "check-additivity needs a 2-local map, {} is {}",
                    name,
                    other.article()
                )))
            }
        };
        ok(lines)
    }

    fn cmd_selftest(&mut self, seed: Option<u64>) -> CliResult<Outcome> {
        let outcomes = selftest::run_all(seed.unwrap_or(self.seed));
        let mut lines: Vec<String> = outcomes
            .iter()
            .map(|o| selftest::render_line(o, self.machine))
            .collect();
        let passed = outcomes.iter().filter(|o| o.passed).count();
        let failed = outcomes.len() - passed;
        lines.push(if self.machine {
            mline(
                "selftest",
                &[
                    ("passed", &passed.to_string()),
                    ("failed", &failed.to_string()),
                ],
            )
        } else if failed == 0 {
            format!("selftest: {}/{} checks passed", passed, outcomes.len())
        } else {
            format!(
                "selftest: FAILED, {}/{} checks passed",
                passed,
                outcomes.len()
            )
        });
        Ok(Outcome {
            lines,
            quit: false,
            failed: failed > 0,
        })
    }

    fn expect_element(&self, e: &Expr, what: &str) -> CliResult<RegularElement> {
        match self.eval(e)? {
            Value::Element(x) => Ok(x),
            other => Err(CliError::bad(format!(
                "{} needs element arguments here, got {}",
                what,
                other.article()
            ))),
        }
    }

    fn expect_matrix(&self, e: &Expr, what: &str) -> CliResult<MatrixElement> {
        match self.eval(e)? {
            Value::Matrix(m) => Ok(m),
            other => Err(CliError::bad(format!(
                "{} needs matrix arguments here, got {}",
                what,
                other.article()
            ))),
        }
    }

    fn help_lines(&self) -> Vec<String> {
        let mut lines = vec![
            "commands:".to_string(),
            "  load-algebra FILE            load an algebra description, clearing bindings".to_string(),
            "  let NAME = EXPR              evaluate and bind".to_string(),
            "  EXPR                         evaluate and print".to_string(),
            "  decompose NAME               split a matrix derivation into (inner, center)".to_string(),
            "  counterexample VAR VAR       build the non-additive 2-local map, bound as cex".to_string(),
            "  certify NAME EXPR EXPR       request and re-verify a witness at two points".to_string(),
            "  linearize NAME [SEED]        certify a 2-local matrix map as a derivation".to_string(),
            "  check-additivity NAME [SEED] sample the additivity law".to_string(),
            "  selftest [SEED]              run the full acceptance suite".to_string(),
            "  help                         this text".to_string(),
            "  quit                         leave the session".to_string(),
            "functions:".to_string(),
        ];
        for b in builtins::registry() {
            lines.push(format!("  {:<28} {}", b.signature, b.summary));
        }
        lines
    }
}

fn additivity_lines<T: Display>(
    report: &AdditivityReport<T>,
    seed: u64,
    machine: bool,
) -> Vec<String> {
    match report {
        AdditivityReport::Additive { samples } => {
            if machine {
                vec![mline(
                    "additivity",
                    &[
                        ("status", "additive"),
                        ("samples", &samples.to_string()),
                        ("seed", &seed.to_string()),
                    ],
                )]
            } else {
                vec![format!(
                    "additive on {} sampled pairs (seed {})",
                    samples, seed
                )]
            }
        }
        AdditivityReport::Counterexample {
            x,
            y,
            sum_of_values,
            value_of_sum,
        } => {
            if machine {
                vec![mline(
                    "additivity",
                    &[
                        ("status", "counterexample"),
                        ("x", &x.to_string()),
                        ("y", &y.to_string()),
                        ("sum_of_values", &sum_of_values.to_string()),
                        ("value_of_sum", &value_of_sum.to_string()),
                    ],
                )]
            } else {
                vec![
                    "not additive".to_string(),
                    format!("x = {}", x),
                    format!("y = {}", y),
                    format!("value(x) + value(y) = {}", sum_of_values),
                    format!("value(x + y) = {}", value_of_sum),
                ]
            }
        }
    }
}

/// Parses an algebra description:
///
/// ```text
/// atoms 3
/// 1/2 1/3 1/6
/// vars t s
/// ```
///
/// Blank lines and `#` comments are skipped. Weights are positive rationals,
/// one per atom; the variables are shared by every stalk.
pub fn parse_algebra_file(text: &str) -> CliResult<Algebra> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let head = lines
        .next()
        .ok_or_else(|| CliError::bad("algebra file is empty"))?;
    let mut head_words = head.split_whitespace();
    let atom_count: usize = match (head_words.next(), head_words.next(), head_words.next()) {
        (Some("atoms"), Some(k), None) => k
            .parse()
            .map_err(|_| CliError::bad(format!("bad atom count {:?}", k)))?,
        _ => {
            return Err(CliError::bad(
                "algebra file must start with a line `atoms K`",
            ))
        }
    };
    let weight_line = lines
        .next()
        .ok_or_else(|| CliError::bad("algebra file is missing the weight line"))?;
    let mut weights = Vec::with_capacity(atom_count);
    for tok in weight_line.split_whitespace() {
        let w: Rational = tok
            .parse()
            .map_err(|_| CliError::bad(format!("bad weight {:?}: expected a rational p/q", tok)))?;
        weights.push(w);
    }
    if weights.len() != atom_count {
        return Err(CliError::bad(format!(
            "expected {} weight(s), got {}",
            atom_count,
            weights.len()
        )));
    }
    let var_line = lines
        .next()
        .ok_or_else(|| CliError::bad("algebra file is missing the `vars` line"))?;
    let mut var_words = var_line.split_whitespace();
    if var_words.next() != Some("vars") {
        return Err(CliError::bad(
            "the third line of an algebra file must be `vars NAME ...`",
        ));
    }
    let names: Vec<&str> = var_words.collect();
    if let Some(extra) = lines.next() {
        return Err(CliError::bad(format!(
            "unexpected extra line in algebra file: {:?}",
            extra
        )));
    }
    Ok(Algebra::build(weights, &names)?)
}
