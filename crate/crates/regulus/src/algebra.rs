//! Commutative von Neumann regular algebra realized as a finite product of
//! rational function fields.
//!
//! An element carries one rational function stalk per atom of the underlying
//! atom space; all stalks share one list of variables. Because each stalk
//! lives in a field, every element `a` is regular: `a * pinv(a) * a = a`,
//! where `pinv` inverts the stalk on the support and is zero off it.

use crate::error::{EngineError, Result};
use crate::lattice::{AtomSpace, Idempotent};
use crate::linalg;
use crate::poly::{VarId, VarSet};
use crate::ratfunc::{RatFuncDisplay, RationalFunction};
use crate::scalar::{Rational, Scalar};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Handle pairing an atom space with a variable table. Cloning is cheap.
#[derive(Clone, Debug)]
pub struct Algebra {
    space: Arc<AtomSpace>,
    vars: Arc<VarSet>,
}

impl PartialEq for Algebra {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.space, &other.space) || self.space == other.space)
            && (Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars)
    }
}

impl Eq for Algebra {}

impl Algebra {
    pub fn new(space: Arc<AtomSpace>, vars: VarSet) -> Self {
        Algebra {
            space,
            vars: Arc::new(vars),
        }
    }

    /// Convenience constructor from weights and variable names.
    pub fn build(weights: Vec<Rational>, var_names: &[&str]) -> Result<Self> {
        let space = AtomSpace::new(weights)?;
        let vars = VarSet::new(var_names.iter().map(|s| s.to_string()).collect())?;
        Ok(Algebra::new(space, vars))
    }

    pub fn space(&self) -> &Arc<AtomSpace> {
        &self.space
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn atom_count(&self) -> usize {
        self.space.atom_count()
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn check_same(&self, other: &Algebra) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(EngineError::SpaceMismatch)
        }
    }

    pub fn check_var(&self, v: VarId) -> Result<()> {
        if v < self.vars.len() {
            Ok(())
        } else {
            Err(EngineError::VariableOutOfRange(v))
        }
    }

    pub fn check_atom(&self, atom: usize) -> Result<()> {
        if atom < self.atom_count() {
            Ok(())
        } else {
            Err(EngineError::AtomOutOfRange(atom))
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RegularElement {
    algebra: Algebra,
    stalks: Vec<RationalFunction>,
}

impl RegularElement {
    pub fn from_stalks(algebra: &Algebra, stalks: Vec<RationalFunction>) -> Result<Self> {
        if stalks.len() != algebra.atom_count() {
            return Err(EngineError::Invalid(format!(
                "expected {} stalks, got {}",
                algebra.atom_count(),
                stalks.len()
            )));
        }
        if stalks.iter().any(|s| s.nvars() != algebra.nvars()) {
            return Err(EngineError::Invalid(
                "stalk uses a different variable table".into(),
            ));
        }
        Ok(RegularElement {
            algebra: algebra.clone(),
            stalks,
        })
    }

    /// Same rational function on every atom.
    pub fn broadcast(algebra: &Algebra, stalk: RationalFunction) -> Self {
        RegularElement {
            algebra: algebra.clone(),
            stalks: vec![stalk; algebra.atom_count()],
        }
    }

    pub fn zero(algebra: &Algebra) -> Self {
        Self::broadcast(algebra, RationalFunction::zero(algebra.nvars()))
    }

    pub fn one(algebra: &Algebra) -> Self {
        Self::broadcast(algebra, RationalFunction::one(algebra.nvars()))
    }

    pub fn from_scalar(algebra: &Algebra, c: Scalar) -> Self {
        Self::broadcast(algebra, RationalFunction::constant(algebra.nvars(), c))
    }

    pub fn from_integer(algebra: &Algebra, n: i64) -> Self {
        Self::from_scalar(algebra, Scalar::from_integer(n))
    }

    pub fn variable(algebra: &Algebra, v: VarId) -> Result<Self> {
        algebra.check_var(v)?;
        Ok(Self::broadcast(
            algebra,
            RationalFunction::variable(algebra.nvars(), v),
        ))
    }

    /// The idempotent `e` as an element: stalk 1 on atoms of `e`, 0 off it.
    pub fn from_idempotent(algebra: &Algebra, e: &Idempotent) -> Result<Self> {
        if e.space() != algebra.space() && !Arc::ptr_eq(e.space(), algebra.space()) {
            return Err(EngineError::SpaceMismatch);
        }
        let one = RationalFunction::one(algebra.nvars());
        let zero = RationalFunction::zero(algebra.nvars());
        let stalks = (0..algebra.atom_count())
            .map(|a| if e.contains(a) { one.clone() } else { zero.clone() })
            .collect();
        Ok(RegularElement {
            algebra: algebra.clone(),
            stalks,
        })
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn stalk(&self, atom: usize) -> &RationalFunction {
        &self.stalks[atom]
    }

    pub fn stalks(&self) -> &[RationalFunction] {
        &self.stalks
    }

    pub fn is_zero(&self) -> bool {
        self.stalks.iter().all(|s| s.is_zero())
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&RationalFunction, &RationalFunction) -> RationalFunction,
    ) -> Result<Self> {
        self.algebra.check_same(&other.algebra)?;
        let stalks = self
            .stalks
            .iter()
            .zip(other.stalks.iter())
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(RegularElement {
            algebra: self.algebra.clone(),
            stalks,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, RationalFunction::add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, RationalFunction::sub)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, RationalFunction::mul)
    }

    pub fn neg(&self) -> Self {
        RegularElement {
            algebra: self.algebra.clone(),
            stalks: self.stalks.iter().map(RationalFunction::neg).collect(),
        }
    }

    pub fn scalar_mul(&self, c: &Scalar) -> Self {
        RegularElement {
            algebra: self.algebra.clone(),
            stalks: self.stalks.iter().map(|s| s.scalar_mul(c)).collect(),
        }
    }

    /// Stalk-wise division; errors on the first atom where `other` vanishes.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.algebra.check_same(&other.algebra)?;
        let mut stalks = Vec::with_capacity(self.stalks.len());
        for (atom, (a, b)) in self.stalks.iter().zip(other.stalks.iter()).enumerate() {
            match a.div(b) {
                Some(q) => stalks.push(q),
                None => return Err(EngineError::StalkDivisionByZero(atom)),
            }
        }
        Ok(RegularElement {
            algebra: self.algebra.clone(),
            stalks,
        })
    }

    /// Least idempotent `e` with `e*a = a`: the set of atoms with nonzero
    /// stalk.
    pub fn support(&self) -> Idempotent {
        Idempotent::from_fn(self.algebra.space(), |a| !self.stalks[a].is_zero())
    }

    /// Pseudo-inverse: inverts each nonzero stalk, zero elsewhere. Satisfies
    /// `a * pinv(a) = support(a)` and `a * pinv(a) * a = a`.
    pub fn pinv(&self) -> Self {
        let stalks = self
            .stalks
            .iter()
            .map(|s| s.inv().unwrap_or_else(|| RationalFunction::zero(s.nvars())))
            .collect();
        RegularElement {
            algebra: self.algebra.clone(),
            stalks,
        }
    }

    /// Multiplication by the idempotent: keeps stalks on `e`, zeroes the
    /// rest.
    pub fn mask(&self, e: &Idempotent) -> Result<Self> {
        if e.space() != self.algebra.space() && !Arc::ptr_eq(e.space(), self.algebra.space()) {
            return Err(EngineError::SpaceMismatch);
        }
        let stalks = self
            .stalks
            .iter()
            .enumerate()
            .map(|(a, s)| {
                if e.contains(a) {
                    s.clone()
                } else {
                    RationalFunction::zero(s.nvars())
                }
            })
            .collect();
        Ok(RegularElement {
            algebra: self.algebra.clone(),
            stalks,
        })
    }

    /// True when every stalk is a constant, i.e. the element lies in the
    /// linear span of the idempotents.
    pub fn is_finitely_valued(&self) -> bool {
        self.stalks.iter().all(|s| s.is_constant())
    }

    /// Whether the stalk at `atom` formally depends on variable `v`.
    pub fn depends_on(&self, v: VarId, atom: usize) -> Result<bool> {
        self.algebra.check_var(v)?;
        self.algebra.check_atom(atom)?;
        Ok(self.stalks[atom].depends_on(v))
    }

    /// Largest idempotent `e` such that `e*x` lies in the subalgebra
    /// generated by the idempotents and the listed variables: atom by atom,
    /// the stalk must involve no variable outside `gens`.
    pub fn membership_idempotent(&self, gens: &BTreeSet<VarId>) -> Result<Idempotent> {
        let mut allowed = 0u64;
        for &v in gens {
            self.algebra.check_var(v)?;
            allowed |= 1 << v;
        }
        Ok(Idempotent::from_fn(self.algebra.space(), |a| {
            self.stalks[a].vars_mask() & !allowed == 0
        }))
    }

    /// Metric `rho(a, b) = measure(support(a - b))`.
    pub fn rho(&self, other: &Self) -> Result<Rational> {
        Ok(self.sub(other)?.support().measure())
    }
}

/// Idempotent of atoms where the listed elements are independent in the
/// Jacobian sense: the matrix of formal partials (one row per element, one
/// column per variable) has full row rank over the stalk field. A list
/// longer than the variable count is dependent everywhere; the empty list
/// is an error.
pub fn jacobian_independent(elems: &[RegularElement]) -> Result<Idempotent> {
    let first = elems.first().ok_or(EngineError::EmptyList)?;
    let algebra = first.algebra().clone();
    for e in elems {
        algebra.check_same(e.algebra())?;
    }
    if elems.len() > algebra.nvars() {
        return Ok(Idempotent::bottom(algebra.space()));
    }
    let mut bits = Vec::with_capacity(algebra.atom_count());
    for atom in 0..algebra.atom_count() {
        let rows: Vec<Vec<RationalFunction>> = elems
            .iter()
            .map(|e| {
                (0..algebra.nvars())
                    .map(|v| e.stalk(atom).partial(v))
                    .collect()
            })
            .collect();
        bits.push(linalg::rank(rows) == elems.len());
    }
    Ok(Idempotent::from_fn(algebra.space(), |a| bits[a]))
}

/// Prints a bundle `[s1; s2; ...]` in the calculator's expression syntax.
/// When every stalk is the same function the brackets are dropped and the
/// common stalk prints bare; evaluation broadcasts it back to every atom, so
/// the compressed form re-parses to the same element.
impl fmt::Display for RegularElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = self.algebra.vars();
        if self.stalks.iter().all(|s| *s == self.stalks[0]) {
            return write!(
                f,
                "{}",
                RatFuncDisplay {
                    value: &self.stalks[0],
                    vars,
                }
            );
        }
        write!(f, "[")?;
        for (k, s) in self.stalks.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{}", RatFuncDisplay { value: s, vars })?;
        }
        write!(f, "]")
    }
}
