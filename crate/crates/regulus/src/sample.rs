//! Seeded random generation of algebra values. All suites draw from
//! ChaCha-based generators so runs are reproducible from a single seed.

use crate::algebra::{Algebra, RegularElement};
use crate::derivation::AbelianDerivation;
use crate::lattice::Idempotent;
use crate::matrix::{MatrixDerivation, MatrixElement};
use crate::poly::{Monomial, Poly, VarId};
use crate::ratfunc::RationalFunction;
use crate::scalar::Scalar;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small nonzero rational, occasionally with an imaginary part.
pub fn scalar(r: &mut impl Rng) -> Scalar {
    let re = r.gen_range(-3i64..=3);
    if r.gen_bool(0.15) {
        let im = r.gen_range(-2i64..=2);
        let c = Scalar::new(
            crate::scalar::rational(re, 1),
            crate::scalar::rational(im, 1),
        );
        if c.is_zero() {
            Scalar::i()
        } else {
            c
        }
    } else if re == 0 {
        Scalar::from_ratio(1, r.gen_range(1i64..=3))
    } else if r.gen_bool(0.3) {
        Scalar::from_ratio(re, r.gen_range(2i64..=3))
    } else {
        Scalar::from_integer(re)
    }
}

pub fn nonzero_scalar(r: &mut impl Rng) -> Scalar {
    loop {
        let c = scalar(r);
        if !c.is_zero() {
            return c;
        }
    }
}

/// Sparse polynomial with a few low-degree terms.
pub fn poly(r: &mut impl Rng, nvars: usize, max_terms: usize, max_deg: u32) -> Poly {
    let terms = r.gen_range(0..=max_terms);
    let mut p = Poly::zero(nvars);
    for _ in 0..terms {
        let exps: Vec<u32> = (0..nvars)
            .map(|_| {
                if r.gen_bool(0.5) {
                    r.gen_range(0..=max_deg)
                } else {
                    0
                }
            })
            .collect();
        p = p.add(&Poly::from_terms(
            nvars,
            vec![(Monomial::from_exps(exps), scalar(r))],
        ));
    }
    p
}

pub fn nonzero_poly(r: &mut impl Rng, nvars: usize, max_terms: usize, max_deg: u32) -> Poly {
    loop {
        let p = poly(r, nvars, max_terms, max_deg);
        if !p.is_zero() {
            return p;
        }
    }
}

/// Rational function stalk; denominators show up in about a quarter of
/// draws and stay low-degree.
pub fn ratfunc(r: &mut impl Rng, nvars: usize) -> RationalFunction {
    let num = poly(r, nvars, 3, 2);
    if r.gen_bool(0.25) {
        let den = nonzero_poly(r, nvars, 2, 1);
        RationalFunction::new(num, den).expect("denominator is nonzero")
    } else {
        RationalFunction::from_poly(num)
    }
}

pub fn element(r: &mut impl Rng, algebra: &Algebra) -> RegularElement {
    let stalks = (0..algebra.atom_count())
        .map(|_| ratfunc(r, algebra.nvars()))
        .collect();
    RegularElement::from_stalks(algebra, stalks).expect("stalk count matches")
}

/// Per-atom stalk kind used by flavored sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StalkKind {
    Zero,
    Constant,
    /// Depends on exactly this variable.
    Single(VarId),
    /// Depends on at least two variables.
    Mixed,
}

fn single_var_stalk(r: &mut impl Rng, nvars: usize, v: VarId) -> RationalFunction {
    let x = RationalFunction::variable(nvars, v);
    loop {
        let mut f = x.scalar_mul(&nonzero_scalar(r));
        if r.gen_bool(0.5) {
            f = f.add(&RationalFunction::constant(nvars, scalar(r)));
        }
        if r.gen_bool(0.4) {
            f = f.mul(&x);
        }
        if r.gen_bool(0.25) {
            let den = x.add(&RationalFunction::constant(nvars, scalar(r)));
            if !den.is_zero() {
                f = f.div(&den).expect("nonzero denominator");
            }
        }
        if f.depends_on(v) {
            return f;
        }
    }
}

fn mixed_stalk(r: &mut impl Rng, nvars: usize, a: VarId, b: VarId) -> RationalFunction {
    loop {
        let fa = single_var_stalk(r, nvars, a);
        let fb = single_var_stalk(r, nvars, b);
        let f = if r.gen_bool(0.5) {
            fa.add(&fb)
        } else {
            fa.mul(&fb).add(&RationalFunction::constant(nvars, scalar(r)))
        };
        if f.depends_on(a) && f.depends_on(b) {
            return f;
        }
    }
}

pub fn stalk_of_kind(r: &mut impl Rng, nvars: usize, kind: StalkKind) -> RationalFunction {
    match kind {
        StalkKind::Zero => RationalFunction::zero(nvars),
        StalkKind::Constant => RationalFunction::constant(nvars, nonzero_scalar(r)),
        StalkKind::Single(v) => single_var_stalk(r, nvars, v),
        StalkKind::Mixed => {
            assert!(nvars >= 2);
            mixed_stalk(r, nvars, 0, 1)
        }
    }
}

/// Element whose stalks draw uniformly from zero, constant, each single
/// variable, and genuinely mixed shapes. Exercises every membership case of
/// the two-variable constructions.
pub fn flavored_element(r: &mut impl Rng, algebra: &Algebra) -> RegularElement {
    let nvars = algebra.nvars();
    let stalks = (0..algebra.atom_count())
        .map(|_| {
            let kind = match r.gen_range(0..5) {
                0 => StalkKind::Zero,
                1 => StalkKind::Constant,
                2 => StalkKind::Single(0),
                3 => StalkKind::Single(1 % nvars.max(1)),
                _ => {
                    if nvars >= 2 {
                        StalkKind::Mixed
                    } else {
                        StalkKind::Single(0)
                    }
                }
            };
            stalk_of_kind(r, nvars, kind)
        })
        .collect();
    RegularElement::from_stalks(algebra, stalks).expect("stalk count matches")
}

pub fn idempotent(r: &mut impl Rng, algebra: &Algebra) -> Idempotent {
    Idempotent::from_fn(algebra.space(), |_| r.gen_bool(0.5))
}

/// Derivation with polynomial coefficients on a random subset of variables.
pub fn abelian_derivation(r: &mut impl Rng, algebra: &Algebra) -> AbelianDerivation {
    let nvars = algebra.nvars();
    let mut coeffs = Vec::with_capacity(algebra.atom_count());
    for _ in 0..algebra.atom_count() {
        let mut per_atom = std::collections::BTreeMap::new();
        for v in 0..nvars {
            if r.gen_bool(0.6) {
                let c = ratfunc(r, nvars);
                if !c.is_zero() {
                    per_atom.insert(v, c);
                }
            }
        }
        coeffs.push(per_atom);
    }
    AbelianDerivation::from_coeffs(algebra, coeffs).expect("coefficients are well formed")
}

/// Entry shape tuned for fast exact arithmetic: mostly constants, a blend
/// of linear and quadratic variable terms so central derivations act
/// nontrivially.
fn light_stalk(r: &mut impl Rng, nvars: usize) -> RationalFunction {
    let choice = r.gen_range(0..10);
    if choice < 4 {
        RationalFunction::constant(nvars, scalar(r))
    } else if choice < 8 || nvars == 0 {
        let v = r.gen_range(0..nvars.max(1));
        RationalFunction::variable(nvars, v)
            .scalar_mul(&nonzero_scalar(r))
            .add(&RationalFunction::constant(nvars, scalar(r)))
    } else {
        let v = r.gen_range(0..nvars);
        let x = RationalFunction::variable(nvars, v);
        x.mul(&x).scalar_mul(&nonzero_scalar(r))
    }
}

pub fn light_element(r: &mut impl Rng, algebra: &Algebra) -> RegularElement {
    let stalks = (0..algebra.atom_count())
        .map(|_| light_stalk(r, algebra.nvars()))
        .collect();
    RegularElement::from_stalks(algebra, stalks).expect("stalk count matches")
}

pub fn matrix(r: &mut impl Rng, algebra: &Algebra, n: usize) -> MatrixElement {
    let entries = (0..n * n).map(|_| light_element(r, algebra)).collect();
    MatrixElement::from_entries(algebra, n, entries).expect("entry count matches")
}

/// Derivation on the matrix algebra: commutator with a random matrix plus a
/// random central part, normalized by the constructor.
pub fn matrix_derivation(r: &mut impl Rng, algebra: &Algebra, n: usize) -> MatrixDerivation {
    let inner = matrix(r, algebra, n);
    let mut per_atom = Vec::with_capacity(algebra.atom_count());
    for _ in 0..algebra.atom_count() {
        let mut m = std::collections::BTreeMap::new();
        for v in 0..algebra.nvars() {
            if r.gen_bool(0.7) {
                let c = light_stalk(r, algebra.nvars());
                if !c.is_zero() {
                    m.insert(v, c);
                }
            }
        }
        per_atom.push(m);
    }
    let center = AbelianDerivation::from_coeffs(algebra, per_atom).expect("well formed");
    MatrixDerivation::new(inner, center).expect("matching algebras")
}
