//! Sparse multivariate polynomials over Gaussian rationals.
//!
//! Terms are kept in a map ordered by graded lexicographic monomial order,
//! so the maximal key is the leading term. Greatest common divisors use a
//! primitive polynomial remainder sequence, recursing on the number of
//! variables; results are normalized monic with respect to the order.

use crate::error::{EngineError, Result};
use crate::scalar::Scalar;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

pub type VarId = usize;

pub const MAX_VARS: usize = 64;

/// Shared table of variable names. Every polynomial in one algebra refers to
/// the same table; indices are positions in `names`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VarSet {
    names: Vec<String>,
}

fn valid_var_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return false;
    }
    // Reserved words of the expression syntax.
    !matches!(name, "i" | "der" | "mat" | "true" | "false")
}

impl VarSet {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.len() > MAX_VARS {
            return Err(EngineError::TooManyVariables(names.len()));
        }
        for (k, name) in names.iter().enumerate() {
            if !valid_var_name(name) {
                return Err(EngineError::BadVariableName(name.clone()));
            }
            if names[..k].contains(name) {
                return Err(EngineError::DuplicateVariableName(name.clone()));
            }
        }
        Ok(VarSet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v]
    }

    pub fn index(&self, name: &str) -> Option<VarId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Exponent vector of fixed length. Ordered graded lexicographically:
/// total degree first, then exponents from the first variable on.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Monomial {
    exps: Box<[u32]>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial {
            exps: vec![0; nvars].into_boxed_slice(),
        }
    }

    pub fn variable(nvars: usize, v: VarId) -> Self {
        let mut exps = vec![0; nvars];
        exps[v] = 1;
        Monomial {
            exps: exps.into_boxed_slice(),
        }
    }

    pub fn from_exps(exps: Vec<u32>) -> Self {
        Monomial {
            exps: exps.into_boxed_slice(),
        }
    }

    pub fn exp(&self, v: VarId) -> u32 {
        self.exps[v]
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let exps: Vec<u32> = self
            .exps
            .iter()
            .zip(other.exps.iter())
            .map(|(a, b)| a + b)
            .collect();
        Monomial::from_exps(exps)
    }

    /// Exact quotient when `other` divides this monomial.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut exps = Vec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(other.exps.iter()) {
            if a < b {
                return None;
            }
            exps.push(a - b);
        }
        Some(Monomial::from_exps(exps))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(nvars), c);
        }
        Poly { nvars, terms }
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Scalar::one())
    }

    pub fn variable(nvars: usize, v: VarId) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::variable(nvars, v), Scalar::one());
        Poly { nvars, terms }
    }

    pub fn from_terms(nvars: usize, entries: Vec<(Monomial, Scalar)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (m, c) in entries {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    /// Constant value when the polynomial has degree zero.
    pub fn as_constant(&self) -> Option<Scalar> {
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_one() {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn leading(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.leading().map(|(m, _)| m.total_degree()).unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.neg();
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        Poly {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.nvars);
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        if let Some(c) = self.as_constant() {
            return other.scalar_mul(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scalar_mul(&c);
        }
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scalar_mul(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, coeff)| (m.clone(), coeff * c))
            .collect();
        Poly {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        let terms = self
            .terms
            .iter()
            .map(|(mm, coeff)| (mm.mul(m), coeff * c))
            .collect();
        Poly {
            nvars: self.nvars,
            terms,
        }
    }

    /// Formal partial derivative with respect to variable `v`.
    pub fn partial(&self, v: VarId) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e == 0 {
                continue;
            }
            let mut exps: Vec<u32> = (0..self.nvars).map(|k| m.exp(k)).collect();
            exps[v] = e - 1;
            out.add_term(
                Monomial::from_exps(exps),
                c * &Scalar::from_integer(e as i64),
            );
        }
        out
    }

    pub fn degree_in(&self, v: VarId) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    /// Bitmask of variables that occur with positive exponent.
    pub fn vars_mask(&self) -> u64 {
        let mut mask = 0u64;
        for m in self.terms.keys() {
            for v in 0..self.nvars {
                if m.exp(v) > 0 {
                    mask |= 1 << v;
                }
            }
        }
        mask
    }

    pub fn depends_on(&self, v: VarId) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    /// Scales so the leading coefficient is 1. Zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => {
                if c.is_one() {
                    self.clone()
                } else {
                    self.scalar_mul(&c.inv().expect("leading coefficient is nonzero"))
                }
            }
        }
    }

    /// Coefficient of `x_v^k` viewed as a polynomial in `x_v`; the result
    /// lives in the same variable table with exponent zero at `v`.
    fn coeff_in(&self, v: VarId, k: u32) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.exp(v) == k {
                let mut exps: Vec<u32> = (0..self.nvars).map(|j| m.exp(j)).collect();
                exps[v] = 0;
                out.add_term(Monomial::from_exps(exps), c.clone());
            }
        }
        out
    }

    fn shift_in(&self, v: VarId, k: u32) -> Poly {
        let m = {
            let mut exps = vec![0; self.nvars];
            exps[v] = k;
            Monomial::from_exps(exps)
        };
        self.mul_monomial(&m, &Scalar::one())
    }
}

/// Exact division: `Some(q)` with `a = q * b` when `b` divides `a`.
pub fn divexact(a: &Poly, b: &Poly) -> Option<Poly> {
    debug_assert_eq!(a.nvars(), b.nvars());
    if b.is_zero() {
        return None;
    }
    let mut rem = a.clone();
    let mut quot = Poly::zero(a.nvars());
    let (lead_m, lead_c) = {
        let (m, c) = b.leading().unwrap();
        (m.clone(), c.clone())
    };
    while let Some((m, c)) = rem.leading() {
        let qm = m.div(&lead_m)?;
        let qc = c.div(&lead_c).expect("leading coefficient is nonzero");
        let piece = b.mul_monomial(&qm, &qc);
        quot.add_term(qm, qc);
        rem = rem.sub(&piece);
    }
    Some(quot)
}

/// Pseudo-remainder of `a` by `b` in the variable `v`: multiplies `a` by a
/// power of the leading coefficient of `b` so every division step is exact.
fn pseudo_rem(a: &Poly, b: &Poly, v: VarId) -> Poly {
    let db = b.degree_in(v);
    let lb = b.coeff_in(v, db);
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.coeff_in(v, dr);
        // lb*r - lr*x^(dr-db)*b cancels the leading term in v.
        r = r.mul(&lb).sub(&b.mul(&lr.shift_in(v, dr - db)));
        debug_assert!(r.is_zero() || r.degree_in(v) < dr);
    }
    r
}

/// Content of `a` with respect to `v`: gcd of its coefficients in `v`.
fn content_in(a: &Poly, v: VarId) -> Poly {
    let mut g = Poly::zero(a.nvars());
    for k in 0..=a.degree_in(v) {
        let c = a.coeff_in(v, k);
        if !c.is_zero() {
            g = gcd(&g, &c);
            if g.is_one() {
                break;
            }
        }
    }
    g
}

/// Monic greatest common divisor. `gcd(0, b)` is the monic multiple of `b`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    debug_assert_eq!(a.nvars(), b.nvars());
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(a.nvars());
    }
    // Main variable: the highest-indexed variable occurring in either.
    let mask = a.vars_mask() | b.vars_mask();
    let v = (63 - mask.leading_zeros()) as usize;

    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let cont = gcd(&ca, &cb);
    let pa = divexact(a, &ca).expect("content divides");
    let pb = divexact(b, &cb).expect("content divides");

    let (mut p, mut q) = if pa.degree_in(v) >= pb.degree_in(v) {
        (pa, pb)
    } else {
        (pb, pa)
    };
    loop {
        let r = pseudo_rem(&p, &q, v);
        if r.is_zero() {
            break;
        }
        if r.degree_in(v) == 0 {
            // Coprime in the main variable.
            return cont.monic();
        }
        let rc = content_in(&r, v);
        p = q;
        q = divexact(&r, &rc).expect("content divides");
    }
    cont.mul(&q).monic()
}

pub struct PolyDisplay<'a> {
    pub poly: &'a Poly,
    pub vars: &'a VarSet,
}

fn fmt_monomial(m: &Monomial, vars: &VarSet, out: &mut String) {
    let mut first = true;
    for v in 0..vars.len() {
        let e = m.exp(v);
        if e == 0 {
            continue;
        }
        if !first {
            out.push('*');
        }
        first = false;
        out.push_str(vars.name(v));
        if e > 1 {
            out.push_str(&format!("^{}", e));
        }
    }
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (k, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let (neg, mag) = c.sign_split();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            if m.is_one() {
                if mag.needs_parens() {
                    out.push_str(&format!("({})", mag));
                } else {
                    out.push_str(&mag.to_string());
                }
            } else {
                if !mag.is_one() {
                    if mag.needs_parens() {
                        out.push_str(&format!("({})", mag));
                    } else {
                        out.push_str(&mag.to_string());
                    }
                    out.push('*');
                }
                fmt_monomial(m, self.vars, &mut out);
            }
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn vars2() -> VarSet {
        VarSet::new(vec!["t".into(), "s".into()]).unwrap()
    }

    fn t() -> Poly {
        Poly::variable(2, 0)
    }

    fn s() -> Poly {
        Poly::variable(2, 1)
    }

    fn int(n: i64) -> Poly {
        Poly::constant(2, Scalar::from_integer(n))
    }

    #[test]
    fn graded_lex_order() {
        let one = Monomial::one(2);
        let mt = Monomial::variable(2, 0);
        let ms = Monomial::variable(2, 1);
        let mt2 = mt.mul(&mt);
        let mts = mt.mul(&ms);
        assert!(one < ms);
        assert!(ms < mt);
        assert!(mt < mts);
        assert!(mts < mt2);
    }

    #[test]
    fn ring_identities() {
        let a = t().mul(&t()).sub(&s());
        let b = s().mul(&s()).add(&int(3));
        let c = t().add(&s()).add(&int(-1));
        assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        assert_eq!(a.sub(&a), Poly::zero(2));
        assert_eq!(a.mul(&Poly::one(2)), a);
    }

    #[test]
    fn partial_derivatives() {
        // d/dt (t^2*s + 3t) = 2ts + 3
        let p = t().mul(&t()).mul(&s()).add(&int(3).mul(&t()));
        let expected = int(2).mul(&t()).mul(&s()).add(&int(3));
        assert_eq!(p.partial(0), expected);
        assert_eq!(p.partial(1), t().mul(&t()));
    }

    #[test]
    fn exact_division() {
        let a = t().mul(&t()).sub(&s().mul(&s()));
        let b = t().sub(&s());
        let q = divexact(&a, &b).unwrap();
        assert_eq!(q, t().add(&s()));
        assert!(divexact(&t(), &s()).is_none());
    }

    #[test]
    fn gcd_difference_of_squares() {
        // gcd(t^2 - s^2, t^2 + 2ts + s^2) = t + s
        let a = t().mul(&t()).sub(&s().mul(&s()));
        let b = t().add(&s()).mul(&t().add(&s()));
        assert_eq!(gcd(&a, &b), t().add(&s()));
    }

    #[test]
    fn gcd_coprime_and_zero() {
        assert_eq!(gcd(&t(), &s()), Poly::one(2));
        assert_eq!(gcd(&Poly::zero(2), &int(2).mul(&t())), t());
        let p = t().mul(&s()).add(&int(1));
        assert_eq!(gcd(&p, &Poly::zero(2)), p.monic());
    }

    #[test]
    fn gcd_divides_both() {
        let f = t().add(&s());
        let g = t().sub(&int(1));
        let h = s().mul(&s()).add(&int(2));
        let a = f.mul(&g);
        let b = f.mul(&h);
        let d = gcd(&a, &b);
        assert_eq!(d, f.monic());
        assert!(divexact(&a, &d).is_some());
        assert!(divexact(&b, &d).is_some());
    }

    #[test]
    fn monic_normalization() {
        let p = int(2).mul(&t()).add(&int(4));
        let m = p.monic();
        assert_eq!(m, t().add(&int(2)));
    }

    #[test]
    fn display_with_names() {
        let vars = vars2();
        let p = int(2).mul(&t()).mul(&t()).mul(&s()).add(&t()).sub(&Poly::constant(
            2,
            Scalar::from_ratio(1, 2),
        ));
        let shown = PolyDisplay { poly: &p, vars: &vars }.to_string();
        assert_eq!(shown, "2*t^2*s + t - 1/2");
        let q = Poly::constant(2, Scalar::new(rational(1, 1), rational(2, 1)));
        let q = q.mul(&t());
        assert_eq!(
            PolyDisplay { poly: &q, vars: &vars }.to_string(),
            "(1 + 2*i)*t"
        );
    }

    #[test]
    fn varset_validation() {
        assert!(VarSet::new(vec!["i".into()]).is_err());
        assert!(VarSet::new(vec!["t".into(), "t".into()]).is_err());
        assert!(VarSet::new(vec!["2x".into()]).is_err());
        assert!(VarSet::new(vec!["t".into(), "s".into(), "x_1".into()]).is_ok());
    }
}
