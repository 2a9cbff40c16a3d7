//! Gaussian rational scalars: exact complex numbers with rational real and
//! imaginary parts. These are the coefficients of every polynomial in the
//! engine; all arithmetic is exact.
//!
//! Coefficients overwhelmingly stay tiny, so the rational parts live in a
//! reduced machine-word form and promote to arbitrary precision only when a
//! result does not fit. Promotion and demotion are value-canonical: a number
//! is stored big if and only if it cannot be stored small, which keeps
//! structural equality equal to numeric equality.

use num::integer::gcd;
use num::{BigInt, BigRational, Signed, ToPrimitive};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Reduced fraction with a positive denominator. `Small` when numerator and
/// denominator fit in 64 bits, `Big` otherwise; never both for one value.
#[derive(Clone, Debug, Hash)]
enum Rat {
    Small(i64, i64),
    Big(Box<BigRational>),
}

impl PartialEq for Rat {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => a == c && b == d,
            (Rat::Big(x), Rat::Big(y)) => x == y,
            // Canonical storage: equal values share a variant.
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl Rat {
    const ZERO: Rat = Rat::Small(0, 1);
    const ONE: Rat = Rat::Small(1, 1);

    /// Canonical form from a reduced-or-not `i128` fraction, `den > 0`.
    fn from_i128(num: i128, den: i128) -> Rat {
        debug_assert!(den > 0);
        if num == 0 {
            return Rat::ZERO;
        }
        let g = gcd(num, den);
        let (n, d) = (num / g, den / g);
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n64), Ok(d64)) => Rat::Small(n64, d64),
            _ => Rat::Big(Box::new(BigRational::new(BigInt::from(n), BigInt::from(d)))),
        }
    }

    fn from_big(r: BigRational) -> Rat {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rat::Small(n, d),
            _ => Rat::Big(Box::new(r)),
        }
    }

    fn to_big(&self) -> BigRational {
        match self {
            Rat::Small(n, d) => rational(*n, *d),
            Rat::Big(r) => (**r).clone(),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Rat::Small(0, _))
    }

    fn is_one(&self) -> bool {
        matches!(self, Rat::Small(1, 1))
    }

    fn is_negative(&self) -> bool {
        match self {
            Rat::Small(n, _) => *n < 0,
            Rat::Big(r) => r.is_negative(),
        }
    }

    fn is_integer(&self) -> bool {
        match self {
            Rat::Small(_, d) => *d == 1,
            Rat::Big(r) => r.is_integer(),
        }
    }

    fn add(&self, other: &Rat) -> Rat {
        if let (Rat::Small(a, b), Rat::Small(c, d)) = (self, other) {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            if let Some(num) = a
                .checked_mul(d)
                .and_then(|x| c.checked_mul(b).map(|y| (x, y)))
                .and_then(|(x, y)| x.checked_add(y))
            {
                return Rat::from_i128(num, b * d);
            }
        }
        Rat::from_big(self.to_big() + other.to_big())
    }

    fn sub(&self, other: &Rat) -> Rat {
        if let (Rat::Small(a, b), Rat::Small(c, d)) = (self, other) {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            if let Some(num) = a
                .checked_mul(d)
                .and_then(|x| c.checked_mul(b).map(|y| (x, y)))
                .and_then(|(x, y)| x.checked_sub(y))
            {
                return Rat::from_i128(num, b * d);
            }
        }
        Rat::from_big(self.to_big() - other.to_big())
    }

    fn mul(&self, other: &Rat) -> Rat {
        if self.is_zero() || other.is_zero() {
            return Rat::ZERO;
        }
        if let (Rat::Small(a, b), Rat::Small(c, d)) = (self, other) {
            // |i64| * |i64| always fits i128.
            return Rat::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128);
        }
        Rat::from_big(self.to_big() * other.to_big())
    }

    fn neg(&self) -> Rat {
        match self {
            Rat::Small(n, d) => Rat::from_i128(-(*n as i128), *d as i128),
            Rat::Big(r) => Rat::from_big(-(**r).clone()),
        }
    }

    /// Reciprocal; the caller excludes zero.
    fn recip(&self) -> Rat {
        match self {
            Rat::Small(n, d) => {
                debug_assert!(*n != 0);
                let (n, d) = (*n as i128, *d as i128);
                if n < 0 {
                    Rat::from_i128(-d, -n)
                } else {
                    Rat::from_i128(d, n)
                }
            }
            Rat::Big(r) => Rat::from_big(r.recip()),
        }
    }

    fn div(&self, other: &Rat) -> Rat {
        self.mul(&other.recip())
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Small(n, 1) => write!(f, "{}", n),
            Rat::Small(n, d) => write!(f, "{}/{}", n, d),
            Rat::Big(r) => write!(f, "{}", r),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Scalar {
    re: Rat,
    im: Rat,
}

impl Scalar {
    pub fn new(re: Rational, im: Rational) -> Self {
        Scalar {
            re: Rat::from_big(re),
            im: Rat::from_big(im),
        }
    }

    pub fn zero() -> Self {
        Scalar {
            re: Rat::ZERO,
            im: Rat::ZERO,
        }
    }

    pub fn one() -> Self {
        Scalar {
            re: Rat::ONE,
            im: Rat::ZERO,
        }
    }

    pub fn i() -> Self {
        Scalar {
            re: Rat::ZERO,
            im: Rat::ONE,
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Scalar {
            re: Rat::Small(n, 1),
            im: Rat::ZERO,
        }
    }

    pub fn from_rational(re: Rational) -> Self {
        Scalar {
            re: Rat::from_big(re),
            im: Rat::ZERO,
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let (num, den) = if den < 0 {
            (-(num as i128), -(den as i128))
        } else {
            (num as i128, den as i128)
        };
        Scalar {
            re: Rat::from_i128(num, den),
            im: Rat::ZERO,
        }
    }

    pub fn re(&self) -> Rational {
        self.re.to_big()
    }

    pub fn im(&self) -> Rational {
        self.im.to_big()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Exact rational value when the scalar is real, `None` otherwise.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.im.is_zero() {
            Some(self.re.to_big())
        } else {
            None
        }
    }

    /// Exact integer value when the scalar is a rational integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        if !self.im.is_zero() || !self.re.is_integer() {
            return None;
        }
        match &self.re {
            Rat::Small(n, _) => Some(BigInt::from(*n)),
            Rat::Big(r) => Some(r.to_integer()),
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(Scalar {
                re: self.re.recip(),
                im: Rat::ZERO,
            });
        }
        let norm = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        Some(Scalar {
            re: self.re.div(&norm),
            im: self.im.neg().div(&norm),
        })
    }

    pub fn div(&self, other: &Scalar) -> Option<Scalar> {
        Some(self * &other.inv()?)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, other: &Scalar) -> Scalar {
        Scalar {
            re: self.re.add(&other.re),
            im: self.im.add(&other.im),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, other: &Scalar) -> Scalar {
        Scalar {
            re: self.re.sub(&other.re),
            im: self.im.sub(&other.im),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, other: &Scalar) -> Scalar {
        if self.im.is_zero() && other.im.is_zero() {
            return Scalar {
                re: self.re.mul(&other.re),
                im: Rat::ZERO,
            };
        }
        Scalar {
            re: self.re.mul(&other.re).sub(&self.im.mul(&other.im)),
            im: self.re.mul(&other.im).add(&self.im.mul(&other.re)),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }
}

fn fmt_imaginary(im: &Rat, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if im.is_one() {
        write!(f, "i")
    } else if im.neg().is_one() {
        write!(f, "-i")
    } else {
        write!(f, "{}*i", im)
    }
}

/// Prints in the calculator's expression syntax: `3/2`, `i`, `-2*i`, `1 - i`.
/// Mixed values are not parenthesized here; callers that embed a scalar in a
/// product must consult [`Scalar::needs_parens`].
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return fmt_imaginary(&self.im, f);
        }
        write!(f, "{}", self.re)?;
        if self.im.is_negative() {
            write!(f, " - ")?;
            fmt_imaginary(&self.im.neg(), f)
        } else {
            write!(f, " + ")?;
            fmt_imaginary(&self.im, f)
        }
    }
}

impl Scalar {
    /// True when the printed form is a sum and needs parentheses inside a
    /// product.
    pub fn needs_parens(&self) -> bool {
        !self.re.is_zero() && !self.im.is_zero()
    }

    /// Splits into a printable sign and magnitude so polynomial printing can
    /// join terms with ` + ` and ` - `. Mixed complex values count as
    /// positive and print parenthesized.
    pub fn sign_split(&self) -> (bool, Scalar) {
        if self.im.is_zero() {
            if self.re.is_negative() {
                return (true, -self);
            }
        } else if self.re.is_zero() && self.im.is_negative() {
            return (true, -self);
        }
        (false, self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_identities() {
        let a = Scalar::new(rational(1, 2), rational(-3, 1));
        let b = Scalar::new(rational(2, 3), rational(1, 5));
        assert_eq!(&(&a + &b) - &b, a);
        assert_eq!(&a * &Scalar::one(), a);
        assert!((&a + &(-&a)).is_zero());
        let prod = &a * &b;
        assert_eq!(prod.div(&b).unwrap(), a);
    }

    #[test]
    fn inverse_of_i() {
        let i = Scalar::i();
        assert_eq!(i.inv().unwrap(), -&i);
        assert!((&i * &i).re().is_negative());
    }

    #[test]
    fn zero_has_no_inverse() {
        assert!(Scalar::zero().inv().is_none());
    }

    #[test]
    fn display_forms() {
        assert_eq!(Scalar::from_ratio(3, 2).to_string(), "3/2");
        assert_eq!(Scalar::i().to_string(), "i");
        assert_eq!((-&Scalar::i()).to_string(), "-i");
        assert_eq!(Scalar::new(rational(1, 1), rational(-1, 1)).to_string(), "1 - i");
        assert_eq!(Scalar::new(rational(0, 1), rational(2, 1)).to_string(), "2*i");
    }

    #[test]
    fn integer_extraction() {
        assert_eq!(Scalar::from_integer(7).as_integer().unwrap(), BigInt::from(7));
        assert!(Scalar::from_ratio(1, 2).as_integer().is_none());
        assert!(Scalar::i().as_integer().is_none());
    }

    #[test]
    fn negative_denominators_normalize() {
        assert_eq!(Scalar::from_ratio(1, -2), Scalar::from_ratio(-1, 2));
        assert_eq!(Scalar::from_ratio(-4, -6), Scalar::from_ratio(2, 3));
        assert_eq!(Scalar::from_ratio(0, -5), Scalar::zero());
    }

    #[test]
    fn word_overflow_promotes_and_stays_exact() {
        // (2^62 / 1) * (2^62 / 3) does not fit a machine word.
        let a = Scalar::from_integer(1 << 62);
        let b = Scalar::new(rational(1 << 62, 3), rational(0, 1));
        let prod = &a * &b;
        let expected = BigRational::new(
            BigInt::from(1i64 << 62) * BigInt::from(1i64 << 62),
            BigInt::from(3),
        );
        assert_eq!(prod.as_rational().unwrap(), expected);
        // Dividing back demotes to the small form and compares equal.
        assert_eq!(prod.div(&b).unwrap(), a);
        let diff = &prod - &prod;
        assert!(diff.is_zero());
    }

    #[test]
    fn extreme_magnitudes_round_trip() {
        let m = Scalar::from_integer(i64::MIN);
        assert_eq!(-&(-&m), m);
        let r = m.inv().unwrap();
        assert_eq!(r.inv().unwrap(), m);
        let sum = &m + &m;
        assert_eq!(
            sum.as_rational().unwrap(),
            rational(i64::MIN, 1) * BigRational::from(BigInt::from(2))
        );
        assert_eq!(&sum - &m, m);
    }

    #[test]
    fn small_arithmetic_matches_reference() {
        // Cross-check the machine-word path against the arbitrary-precision
        // arithmetic on a grid of awkward fractions.
        let values: Vec<(i64, i64)> = vec![
            (0, 1),
            (1, 1),
            (-1, 3),
            (7, 2),
            (-5, 4),
            (9, 7),
            (i64::MAX / 3, 5),
            (i64::MIN / 7, 11),
        ];
        for &(an, ad) in &values {
            for &(bn, bd) in &values {
                let a = Scalar::from_ratio(an, ad);
                let b = Scalar::from_ratio(bn, bd);
                let (ra, rb) = (rational(an, ad), rational(bn, bd));
                assert_eq!((&a + &b).as_rational().unwrap(), &ra + &rb);
                assert_eq!((&a - &b).as_rational().unwrap(), &ra - &rb);
                assert_eq!((&a * &b).as_rational().unwrap(), &ra * &rb);
                if bn != 0 {
                    assert_eq!(a.div(&b).unwrap().as_rational().unwrap(), &ra / &rb);
                }
            }
        }
    }
}
