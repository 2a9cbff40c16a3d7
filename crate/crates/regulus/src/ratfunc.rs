//! Rational functions over Gaussian rationals in canonical form.
//!
//! Invariants held by every value: the fraction is reduced, the denominator
//! is monic in graded lexicographic order, and zero is represented as 0/1.
//! Equality of values is therefore plain structural equality.

use crate::error::{EngineError, Result};
use crate::poly::{divexact, gcd, Poly, PolyDisplay, VarId, VarSet};
use crate::scalar::Scalar;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(EngineError::ZeroDenominator);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return RationalFunction {
                den: Poly::one(num.nvars()),
                num,
            };
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (
                    divexact(&num, &g).expect("gcd divides numerator"),
                    divexact(&den, &g).expect("gcd divides denominator"),
                )
            }
        };
        let lead = den
            .leading()
            .expect("denominator is nonzero")
            .1
            .inv()
            .expect("leading coefficient is nonzero");
        RationalFunction {
            num: num.scalar_mul(&lead),
            den: den.scalar_mul(&lead),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFunction {
            den: Poly::one(p.nvars()),
            num: p,
        }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::from_poly(Poly::zero(nvars))
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_poly(Poly::one(nvars))
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        Self::from_poly(Poly::constant(nvars, c))
    }

    pub fn variable(nvars: usize, v: VarId) -> Self {
        Self::from_poly(Poly::variable(nvars, v))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<Scalar> {
        if !self.is_constant() {
            return None;
        }
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        n.div(&d)
    }

    fn dens_trivial(&self, other: &Self) -> bool {
        self.den.is_one() && other.den.is_one()
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.dens_trivial(other) {
            return Self::from_poly(self.num.add(&other.num));
        }
        Self::reduce(
            self.num
                .mul(&other.den)
                .add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.neg();
        }
        if self.dens_trivial(other) {
            return Self::from_poly(self.num.sub(&other.num));
        }
        Self::reduce(
            self.num
                .mul(&other.den)
                .sub(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.nvars());
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        if self.dens_trivial(other) {
            return Self::from_poly(self.num.mul(&other.num));
        }
        Self::reduce(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn scalar_mul(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars());
        }
        RationalFunction {
            num: self.num.scalar_mul(c),
            den: self.den.clone(),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Self::reduce(self.den.clone(), self.num.clone()))
    }

    /// `None` when `other` is zero.
    pub fn div(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        Some(Self::reduce(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    /// Formal partial derivative, by the quotient rule.
    pub fn partial(&self, v: VarId) -> Self {
        if self.den.is_one() {
            return Self::from_poly(self.num.partial(v));
        }
        let n = self
            .num
            .partial(v)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.partial(v)));
        Self::reduce(n, self.den.mul(&self.den))
    }

    /// Bitmask of variables occurring in the canonical form. A reduced
    /// fraction depends on exactly the variables that appear in it.
    pub fn vars_mask(&self) -> u64 {
        self.num.vars_mask() | self.den.vars_mask()
    }

    pub fn depends_on(&self, v: VarId) -> bool {
        self.num.depends_on(v) || self.den.depends_on(v)
    }
}

pub struct RatFuncDisplay<'a> {
    pub value: &'a RationalFunction,
    pub vars: &'a VarSet,
}

impl fmt::Display for RatFuncDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = PolyDisplay {
            poly: &self.value.num,
            vars: self.vars,
        };
        if self.value.den.is_one() {
            write!(f, "{}", num)
        } else {
            let den = PolyDisplay {
                poly: &self.value.den,
                vars: self.vars,
            };
            write!(f, "({})/({})", num, den)
        }
    }
}
