//! Derivations on the commutative regular algebra.
//!
//! Every derivation here acts stalk-wise as a finite sum of weighted formal
//! partials: on each atom, `delta = sum_v c_v * d/dv`. This representation
//! makes the defining laws hold by construction:
//!
//! - additivity and the Leibniz rule `delta(x*y) = delta(x)*y + x*delta(y)`
//! - `delta` kills every finitely valued element (constants per atom)
//! - `support(delta(x)) <= support(x)`, since every partial of a zero stalk
//!   vanishes

use crate::algebra::{Algebra, RegularElement};
use crate::error::{EngineError, Result};
use crate::lattice::Idempotent;
use crate::poly::VarId;
use crate::ratfunc::{RatFuncDisplay, RationalFunction};
use crate::scalar::Scalar;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Per-atom coefficient map: variable index to the stalk multiplying that
/// partial derivative.
pub type CoeffMap = BTreeMap<VarId, RationalFunction>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AbelianDerivation {
    algebra: Algebra,
    coeffs: Vec<CoeffMap>,
}

impl AbelianDerivation {
    pub fn zero(algebra: &Algebra) -> Self {
        AbelianDerivation {
            algebra: algebra.clone(),
            coeffs: vec![CoeffMap::new(); algebra.atom_count()],
        }
    }

    pub fn from_coeffs(algebra: &Algebra, coeffs: Vec<CoeffMap>) -> Result<Self> {
        if coeffs.len() != algebra.atom_count() {
            return Err(EngineError::Invalid(format!(
                "expected {} coefficient maps, got {}",
                algebra.atom_count(),
                coeffs.len()
            )));
        }
        let mut cleaned = Vec::with_capacity(coeffs.len());
        for per_atom in coeffs {
            let mut m = CoeffMap::new();
            for (v, c) in per_atom {
                algebra.check_var(v)?;
                if c.nvars() != algebra.nvars() {
                    return Err(EngineError::Invalid(
                        "coefficient uses a different variable table".into(),
                    ));
                }
                if !c.is_zero() {
                    m.insert(v, c);
                }
            }
            cleaned.push(m);
        }
        Ok(AbelianDerivation {
            algebra: algebra.clone(),
            coeffs: cleaned,
        })
    }

    /// The derivation with `delta(v_k) = c_k` for the listed variables and
    /// zero on all others. Duplicate variables are rejected.
    pub fn with_values(algebra: &Algebra, values: &[(VarId, RegularElement)]) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut coeffs = vec![CoeffMap::new(); algebra.atom_count()];
        for (v, value) in values {
            algebra.check_var(*v)?;
            algebra.check_same(value.algebra())?;
            if !seen.insert(*v) {
                return Err(EngineError::DuplicatePrescription);
            }
            for atom in 0..algebra.atom_count() {
                let c = value.stalk(atom).clone();
                if !c.is_zero() {
                    coeffs[atom].insert(*v, c);
                }
            }
        }
        Ok(AbelianDerivation {
            algebra: algebra.clone(),
            coeffs,
        })
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn coeff(&self, atom: usize, v: VarId) -> Option<&RationalFunction> {
        self.coeffs[atom].get(&v)
    }

    pub fn coeffs(&self, atom: usize) -> &CoeffMap {
        &self.coeffs[atom]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|m| m.is_empty())
    }

    pub fn apply(&self, x: &RegularElement) -> Result<RegularElement> {
        self.algebra.check_same(x.algebra())?;
        let nvars = self.algebra.nvars();
        let stalks = (0..self.algebra.atom_count())
            .map(|atom| {
                let mut acc = RationalFunction::zero(nvars);
                for (v, c) in &self.coeffs[atom] {
                    let d = x.stalk(atom).partial(*v);
                    if !d.is_zero() {
                        acc = acc.add(&c.mul(&d));
                    }
                }
                acc
            })
            .collect();
        RegularElement::from_stalks(&self.algebra, stalks)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.algebra.check_same(&other.algebra)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| {
                let mut m = a.clone();
                for (v, c) in b {
                    let merged = match m.get(v) {
                        Some(existing) => existing.add(c),
                        None => c.clone(),
                    };
                    if merged.is_zero() {
                        m.remove(v);
                    } else {
                        m.insert(*v, merged);
                    }
                }
                m
            })
            .collect();
        Ok(AbelianDerivation {
            algebra: self.algebra.clone(),
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|m| m.iter().map(|(v, c)| (*v, c.neg())).collect())
            .collect();
        AbelianDerivation {
            algebra: self.algebra.clone(),
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return AbelianDerivation::zero(&self.algebra);
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|m| m.iter().map(|(v, f)| (*v, f.scalar_mul(c))).collect())
            .collect();
        AbelianDerivation {
            algebra: self.algebra.clone(),
            coeffs,
        }
    }

    /// Module action `f * delta`: still a derivation since the algebra is
    /// commutative.
    pub fn element_mul(&self, f: &RegularElement) -> Result<Self> {
        self.algebra.check_same(f.algebra())?;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(atom, m)| {
                m.iter()
                    .filter_map(|(v, c)| {
                        let prod = c.mul(f.stalk(atom));
                        if prod.is_zero() {
                            None
                        } else {
                            Some((*v, prod))
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(AbelianDerivation {
            algebra: self.algebra.clone(),
            coeffs,
        })
    }

    /// `e * delta`: keeps the coefficients on atoms of `e`, zeroes the rest.
    pub fn mask(&self, e: &Idempotent) -> Result<Self> {
        if e.space() != self.algebra.space() && !Arc::ptr_eq(e.space(), self.algebra.space()) {
            return Err(EngineError::SpaceMismatch);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(atom, m)| {
                if e.contains(atom) {
                    m.clone()
                } else {
                    CoeffMap::new()
                }
            })
            .collect();
        Ok(AbelianDerivation {
            algebra: self.algebra.clone(),
            coeffs,
        })
    }

    pub fn linear_combine(scalars: &[Scalar], deltas: &[AbelianDerivation]) -> Result<Self> {
        if scalars.len() != deltas.len() {
            return Err(EngineError::Invalid(
                "scalar and derivation lists differ in length".into(),
            ));
        }
        let first = deltas.first().ok_or(EngineError::EmptyList)?;
        let mut acc = AbelianDerivation::zero(&first.algebra);
        for (c, d) in scalars.iter().zip(deltas.iter()) {
            acc = acc.add(&d.scalar_mul(c))?;
        }
        Ok(acc)
    }
}

/// Extends `base` to a derivation taking the value `c` at `y`.
///
/// On atoms where `y` involves a variable outside `base_gens` (so the stalk
/// is weakly transcendental over the subalgebra the generators produce), one
/// such variable `w` is chosen, lexicographically first, and its coefficient
/// solves `sum_{v in gens} base_v * dy/dv + c_w * dy/dw = c`. On the
/// remaining atoms the result keeps only the base coefficients; `c` must
/// vanish there. Coefficients of `base` outside `base_gens` are dropped, so
/// the result agrees with `base` exactly on elements generated by
/// `base_gens`.
pub fn extend_with_value(
    base_gens: &BTreeSet<VarId>,
    base: &AbelianDerivation,
    y: &RegularElement,
    c: &RegularElement,
) -> Result<AbelianDerivation> {
    let algebra = base.algebra().clone();
    algebra.check_same(y.algebra())?;
    algebra.check_same(c.algebra())?;
    for &v in base_gens {
        algebra.check_var(v)?;
    }
    let member = y.membership_idempotent(base_gens)?;
    // Values may only be prescribed where y is weakly transcendental.
    if let Some(atom) = c.support().meet(&member)?.atoms().next() {
        return Err(EngineError::NotWeaklyTranscendental { atom });
    }

    let mut coeffs = Vec::with_capacity(algebra.atom_count());
    for atom in 0..algebra.atom_count() {
        let mut m = CoeffMap::new();
        let mut base_part = RationalFunction::zero(algebra.nvars());
        for (&v, coeff) in base.coeffs(atom) {
            if base_gens.contains(&v) {
                m.insert(v, coeff.clone());
                let d = y.stalk(atom).partial(v);
                if !d.is_zero() {
                    base_part = base_part.add(&coeff.mul(&d));
                }
            }
        }
        if !member.contains(atom) {
            let w = (0..algebra.nvars())
                .find(|v| !base_gens.contains(v) && y.stalk(atom).depends_on(*v))
                .ok_or(EngineError::NoFreeVariable { atom })?;
            let dw = y.stalk(atom).partial(w);
            if dw.is_zero() {
                return Err(EngineError::NoFreeVariable { atom });
            }
            let cw = c
                .stalk(atom)
                .sub(&base_part)
                .div(&dw)
                .expect("partial is nonzero");
            if !cw.is_zero() {
                m.insert(w, cw);
            }
        }
        coeffs.push(m);
    }
    AbelianDerivation::from_coeffs(&algebra, coeffs)
}

/// Prints as `der{t: c_t, s: c_s}` with per-atom coefficients shown as
/// element bundles, compressed to the bare stalk when every atom agrees.
impl fmt::Display for AbelianDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = self.algebra.vars();
        let zero = RationalFunction::zero(self.algebra.nvars());
        let mut used: BTreeSet<VarId> = BTreeSet::new();
        for m in &self.coeffs {
            used.extend(m.keys().copied());
        }
        write!(f, "der{{")?;
        for (k, v) in used.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: ", vars.name(*v))?;
            let per_atom: Vec<&RationalFunction> = (0..self.algebra.atom_count())
                .map(|atom| self.coeffs[atom].get(v).unwrap_or(&zero))
                .collect();
            if per_atom.iter().all(|c| **c == *per_atom[0]) {
                write!(f, "{}", RatFuncDisplay { value: per_atom[0], vars })?;
            } else {
                write!(f, "[")?;
                for (atom, c) in per_atom.iter().enumerate() {
                    if atom > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{}", RatFuncDisplay { value: c, vars })?;
                }
                write!(f, "]")?;
            }
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use crate::scalar::rational;

    fn one_atom() -> Algebra {
        Algebra::build(vec![rational(1, 1)], &["t", "s"]).unwrap()
    }

    fn two_atoms() -> Algebra {
        Algebra::build(vec![rational(1, 2), rational(1, 2)], &["t", "s"]).unwrap()
    }

    fn t(a: &Algebra) -> RegularElement {
        RegularElement::variable(a, 0).unwrap()
    }

    fn s(a: &Algebra) -> RegularElement {
        RegularElement::variable(a, 1).unwrap()
    }

    fn ddt(a: &Algebra) -> AbelianDerivation {
        AbelianDerivation::with_values(a, &[(0, RegularElement::one(a))]).unwrap()
    }

    fn dds(a: &Algebra) -> AbelianDerivation {
        AbelianDerivation::with_values(a, &[(1, RegularElement::one(a))]).unwrap()
    }

    #[test]
    fn basic_applications() {
        let alg = one_atom();
        let d = ddt(&alg);
        let t2 = t(&alg).mul(&t(&alg)).unwrap();
        assert_eq!(d.apply(&t2).unwrap(), t(&alg).scalar_mul(&Scalar::from_integer(2)));
        assert!(d.apply(&RegularElement::one(&alg)).unwrap().is_zero());
        // (d/dt + d/ds)(t*s) = t + s
        let both = d.add(&dds(&alg)).unwrap();
        let ts = t(&alg).mul(&s(&alg)).unwrap();
        assert_eq!(both.apply(&ts).unwrap(), t(&alg).add(&s(&alg)).unwrap());
        // t*d/dt applied to 1/t gives -1/t
        let td = d.element_mul(&t(&alg)).unwrap();
        let inv_t = t(&alg).pinv();
        assert_eq!(td.apply(&inv_t).unwrap(), inv_t.neg());
    }

    #[test]
    fn zero_and_linear_combinations() {
        let alg = one_atom();
        let z = AbelianDerivation::zero(&alg);
        let x = t(&alg).mul(&s(&alg)).unwrap();
        assert!(z.apply(&x).unwrap().is_zero());
        let combo = AbelianDerivation::linear_combine(
            &[Scalar::from_integer(2), Scalar::from_integer(-1)],
            &[ddt(&alg), dds(&alg)],
        )
        .unwrap();
        // (2 d/dt - d/ds)(t*s) = 2s - t
        let expected = s(&alg)
            .scalar_mul(&Scalar::from_integer(2))
            .sub(&t(&alg))
            .unwrap();
        assert_eq!(combo.apply(&x).unwrap(), expected);
        assert!(AbelianDerivation::linear_combine(&[], &[]).is_err());
    }

    #[test]
    fn leibniz_rule_sampled() {
        let alg = two_atoms();
        let mut rng = sample::rng(5);
        for _ in 0..150 {
            let d = sample::abelian_derivation(&mut rng, &alg);
            let x = sample::element(&mut rng, &alg);
            let y = sample::element(&mut rng, &alg);
            let lhs = d.apply(&x.mul(&y).unwrap()).unwrap();
            let rhs = d
                .apply(&x)
                .unwrap()
                .mul(&y)
                .unwrap()
                .add(&x.mul(&d.apply(&y).unwrap()).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
            // additivity
            let add_lhs = d.apply(&x.add(&y).unwrap()).unwrap();
            let add_rhs = d.apply(&x).unwrap().add(&d.apply(&y).unwrap()).unwrap();
            assert_eq!(add_lhs, add_rhs);
        }
    }

    #[test]
    fn kills_finitely_valued() {
        let alg = two_atoms();
        let mut rng = sample::rng(7);
        for _ in 0..100 {
            let d = sample::abelian_derivation(&mut rng, &alg);
            let e = sample::idempotent(&mut rng, &alg);
            let c = RegularElement::from_idempotent(&alg, &e)
                .unwrap()
                .scalar_mul(&sample::scalar(&mut rng));
            assert!(c.is_finitely_valued());
            assert!(d.apply(&c).unwrap().is_zero());
        }
    }

    #[test]
    fn support_shrinks() {
        let alg = two_atoms();
        let mut rng = sample::rng(9);
        for _ in 0..200 {
            let d = sample::abelian_derivation(&mut rng, &alg);
            let x = sample::flavored_element(&mut rng, &alg);
            let dx = d.apply(&x).unwrap();
            assert!(dx.support().leq(&x.support()).unwrap());
        }
    }

    #[test]
    fn with_values_prescribes() {
        let alg = one_atom();
        let target = s(&alg);
        let d = AbelianDerivation::with_values(&alg, &[(0, target.clone())]).unwrap();
        assert_eq!(d.apply(&t(&alg)).unwrap(), target);
        // delta(t^2) = 2*t*s
        let t2 = t(&alg).mul(&t(&alg)).unwrap();
        let expected = t(&alg)
            .mul(&s(&alg))
            .unwrap()
            .scalar_mul(&Scalar::from_integer(2));
        assert_eq!(d.apply(&t2).unwrap(), expected);
        assert!(AbelianDerivation::with_values(
            &alg,
            &[(0, target.clone()), (0, target.clone())]
        )
        .is_err());
    }

    #[test]
    fn agreement_determined_by_generator_values() {
        // Two derivations with all coefficients inside {t} that agree at t
        // agree on every element of the t-subalgebra.
        let alg = two_atoms();
        let mut rng = sample::rng(13);
        for _ in 0..100 {
            let c = sample::element(&mut rng, &alg);
            let d1 = AbelianDerivation::with_values(&alg, &[(0, c.clone())]).unwrap();
            let d2 = AbelianDerivation::with_values(&alg, &[(0, c.clone())]).unwrap();
            let x = {
                // random element of the t-subalgebra
                let stalks = (0..alg.atom_count())
                    .map(|_| sample::stalk_of_kind(&mut rng, alg.nvars(), sample::StalkKind::Single(0)))
                    .collect();
                RegularElement::from_stalks(&alg, stalks).unwrap()
            };
            assert_eq!(d1.apply(&x).unwrap(), d2.apply(&x).unwrap());
        }
    }

    #[test]
    fn extension_with_free_variable() {
        let alg = one_atom();
        let gens: BTreeSet<VarId> = [0].into_iter().collect();
        // Extending d/dt by a value at the free variable s.
        let d = extend_with_value(&gens, &ddt(&alg), &s(&alg), &RegularElement::zero(&alg)).unwrap();
        assert_eq!(d.apply(&s(&alg)).unwrap(), RegularElement::zero(&alg));
        assert_eq!(d.apply(&t(&alg)).unwrap(), RegularElement::one(&alg));

        // Killing the mixed element t*s forces coefficient -s/t at s.
        let ts = t(&alg).mul(&s(&alg)).unwrap();
        let d2 = extend_with_value(&gens, &ddt(&alg), &ts, &RegularElement::zero(&alg)).unwrap();
        assert!(d2.apply(&ts).unwrap().is_zero());
        assert_eq!(d2.apply(&t(&alg)).unwrap(), RegularElement::one(&alg));
        let expected = s(&alg).neg().div(&t(&alg)).unwrap();
        assert_eq!(d2.coeff(0, 1).unwrap(), expected.stalk(0));
    }

    #[test]
    fn extension_rejects_algebraic_targets() {
        let alg = one_atom();
        let gens: BTreeSet<VarId> = [0].into_iter().collect();
        // t^2 lies in the t-subalgebra; prescribing a nonzero value there is
        // rejected.
        let t2 = t(&alg).mul(&t(&alg)).unwrap();
        let err = extend_with_value(&gens, &ddt(&alg), &t2, &RegularElement::one(&alg));
        assert_eq!(err, Err(EngineError::NotWeaklyTranscendental { atom: 0 }));
    }

    #[test]
    fn extension_prescribes_per_atom() {
        // y is weakly transcendental on atom 0 only; the value must vanish
        // on atom 1 and is hit exactly on atom 0.
        let alg = two_atoms();
        let gens: BTreeSet<VarId> = [0].into_iter().collect();
        let nv = alg.nvars();
        let y = RegularElement::from_stalks(
            &alg,
            vec![
                RationalFunction::variable(nv, 1),
                RationalFunction::variable(nv, 0),
            ],
        )
        .unwrap();
        let atom0 = Idempotent::from_atoms(alg.space(), &[0]).unwrap();
        let c = RegularElement::one(&alg).mask(&atom0).unwrap();
        let base = ddt(&alg);
        let d = extend_with_value(&gens, &base, &y, &c).unwrap();
        let dy = d.apply(&y).unwrap();
        assert_eq!(dy.stalk(0), c.stalk(0));
        // On atom 1 the derivation is just the base: dy/dt = 1 there.
        assert!(dy.stalk(1).is_one());

        // Prescribing a value on atom 1 fails.
        let bad = RegularElement::one(&alg);
        assert_eq!(
            extend_with_value(&gens, &base, &y, &bad),
            Err(EngineError::NotWeaklyTranscendental { atom: 1 })
        );
    }

    #[test]
    fn extension_agrees_with_base_on_subalgebra() {
        let alg = two_atoms();
        let mut rng = sample::rng(17);
        let gens: BTreeSet<VarId> = [0].into_iter().collect();
        for _ in 0..50 {
            let base = {
                let c = sample::element(&mut rng, &alg);
                AbelianDerivation::with_values(&alg, &[(0, c)]).unwrap()
            };
            // y mixed on every atom so the value can be prescribed globally.
            let y = {
                let stalks = (0..alg.atom_count())
                    .map(|_| sample::stalk_of_kind(&mut rng, alg.nvars(), sample::StalkKind::Mixed))
                    .collect();
                RegularElement::from_stalks(&alg, stalks).unwrap()
            };
            let c = sample::element(&mut rng, &alg);
            let d = extend_with_value(&gens, &base, &y, &c).unwrap();
            assert_eq!(d.apply(&y).unwrap(), c, "prescribed value is attained");
            for _ in 0..5 {
                let x = {
                    let stalks = (0..alg.atom_count())
                        .map(|_| {
                            sample::stalk_of_kind(
                                &mut rng,
                                alg.nvars(),
                                sample::StalkKind::Single(0),
                            )
                        })
                        .collect();
                    RegularElement::from_stalks(&alg, stalks).unwrap()
                };
                assert_eq!(
                    d.apply(&x).unwrap(),
                    base.apply(&x).unwrap(),
                    "extension agrees with the base on the generated subalgebra"
                );
            }
        }
    }

    #[test]
    fn masked_derivation() {
        let alg = two_atoms();
        let d = ddt(&alg);
        let atom0 = Idempotent::from_atoms(alg.space(), &[0]).unwrap();
        let masked = d.mask(&atom0).unwrap();
        let dx = masked.apply(&t(&alg)).unwrap();
        assert!(dx.stalk(0).is_one());
        assert!(dx.stalk(1).is_zero());
    }

    #[test]
    fn display_round_shape() {
        let alg = one_atom();
        let d = AbelianDerivation::with_values(
            &alg,
            &[(0, RegularElement::one(&alg)), (1, s(&alg).neg())],
        )
        .unwrap();
        assert_eq!(d.to_string(), "der{t: 1, s: -s}");
        assert_eq!(AbelianDerivation::zero(&alg).to_string(), "der{}");
    }
}
