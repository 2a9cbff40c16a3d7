//! Finite atomic Boolean algebra of idempotents with an exact measure.
//!
//! An atom space fixes finitely many atoms, each carrying a strictly positive
//! rational weight. Idempotents are subsets of atoms represented as bitsets:
//!
//! - `meet(e, f) = e AND f`, realizing `e*f`
//! - `join(e, f) = e OR f`, realizing `e + f - e*f`
//! - `complement(e)`, realizing `1 - e`
//! - `leq(e, f)` iff `e*f = e`, i.e. subset inclusion
//!
//! The measure of an idempotent is the sum of its atom weights; it induces
//! the metric `rho(a, b) = measure(support(a - b))` used one level up.

use crate::error::{EngineError, Result};
use crate::scalar::Rational;
use num::{Signed, Zero};
use std::fmt;
use std::sync::Arc;

pub const MAX_ATOMS: usize = 64;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AtomSpace {
    weights: Vec<Rational>,
}

impl AtomSpace {
    pub fn new(weights: Vec<Rational>) -> Result<Arc<Self>> {
        if weights.is_empty() || weights.len() > MAX_ATOMS {
            return Err(EngineError::BadAtomCount(weights.len()));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(EngineError::NonPositiveWeight);
        }
        Ok(Arc::new(AtomSpace { weights }))
    }

    /// `count` atoms of equal weight `1/count`.
    pub fn uniform(count: usize) -> Result<Arc<Self>> {
        let w = Rational::new(1.into(), (count.max(1) as i64).into());
        AtomSpace::new(vec![w; count])
    }

    pub fn atom_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, atom: usize) -> &Rational {
        &self.weights[atom]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    fn full_mask(&self) -> u64 {
        if self.weights.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.weights.len()) - 1
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Idempotent {
    space: Arc<AtomSpace>,
    bits: u64,
}

fn check_same(a: &Arc<AtomSpace>, b: &Arc<AtomSpace>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(EngineError::SpaceMismatch)
    }
}

impl Idempotent {
    pub fn bottom(space: &Arc<AtomSpace>) -> Self {
        Idempotent {
            space: space.clone(),
            bits: 0,
        }
    }

    pub fn top(space: &Arc<AtomSpace>) -> Self {
        Idempotent {
            space: space.clone(),
            bits: space.full_mask(),
        }
    }

    pub fn atom(space: &Arc<AtomSpace>, atom: usize) -> Result<Self> {
        if atom >= space.atom_count() {
            return Err(EngineError::AtomOutOfRange(atom));
        }
        Ok(Idempotent {
            space: space.clone(),
            bits: 1 << atom,
        })
    }

    /// Builds from a membership predicate over atom indices.
    pub fn from_fn(space: &Arc<AtomSpace>, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut bits = 0u64;
        for atom in 0..space.atom_count() {
            if f(atom) {
                bits |= 1 << atom;
            }
        }
        Idempotent {
            space: space.clone(),
            bits,
        }
    }

    pub fn from_atoms(space: &Arc<AtomSpace>, atoms: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        for &atom in atoms {
            if atom >= space.atom_count() {
                return Err(EngineError::AtomOutOfRange(atom));
            }
            bits |= 1 << atom;
        }
        Ok(Idempotent {
            space: space.clone(),
            bits,
        })
    }

    pub fn space(&self) -> &Arc<AtomSpace> {
        &self.space
    }

    pub fn contains(&self, atom: usize) -> bool {
        atom < self.space.atom_count() && self.bits & (1 << atom) != 0
    }

    pub fn atoms(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.space.atom_count()).filter(|&a| self.bits & (1 << a) != 0)
    }

    pub fn is_bottom(&self) -> bool {
        self.bits == 0
    }

    pub fn is_top(&self) -> bool {
        self.bits == self.space.full_mask()
    }

    pub fn meet(&self, other: &Idempotent) -> Result<Idempotent> {
        check_same(&self.space, &other.space)?;
        Ok(Idempotent {
            space: self.space.clone(),
            bits: self.bits & other.bits,
        })
    }

    pub fn join(&self, other: &Idempotent) -> Result<Idempotent> {
        check_same(&self.space, &other.space)?;
        Ok(Idempotent {
            space: self.space.clone(),
            bits: self.bits | other.bits,
        })
    }

    pub fn complement(&self) -> Idempotent {
        Idempotent {
            space: self.space.clone(),
            bits: !self.bits & self.space.full_mask(),
        }
    }

    /// The order `e <= f`, equivalently `e*f = e`.
    pub fn leq(&self, other: &Idempotent) -> Result<bool> {
        check_same(&self.space, &other.space)?;
        Ok(self.bits & other.bits == self.bits)
    }

    /// Supremum of a family; the empty family has supremum bottom.
    pub fn sup_family(space: &Arc<AtomSpace>, items: &[Idempotent]) -> Result<Idempotent> {
        let mut out = Idempotent::bottom(space);
        for e in items {
            out = out.join(e)?;
        }
        Ok(out)
    }

    /// Sum of the weights of the atoms below this idempotent.
    pub fn measure(&self) -> Rational {
        let mut total = Rational::zero();
        for atom in self.atoms() {
            total += self.space.weight(atom);
        }
        total
    }
}

/// Atoms are shown 1-based: `{1, 3}`; bottom is `{}`.
impl fmt::Display for Idempotent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for atom in self.atoms() {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{}", atom + 1)?;
        }
        write!(f, "}}")
    }
}
