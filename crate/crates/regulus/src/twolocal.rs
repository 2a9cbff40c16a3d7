//! 2-local maps: value assignments together with a witness oracle.
//!
//! A 2-local derivation hands out, for every pair of points, a genuine
//! derivation agreeing with the map at both points. Witnesses here are
//! intensional derivation values, so the Leibniz rule holds for them by
//! construction; all certification reduces to checking the agreement
//! equations and structural facts forced by them.
//!
//! The module provides the two executable directions:
//!
//! - `build_counterexample` produces a 2-local derivation on a two-variable
//!   commutative algebra that is homogeneous but not additive, with a
//!   working witness oracle assembled atom by atom.
//! - `MatrixTwoLocal::linearize` certifies that a 2-local derivation on a
//!   matrix algebra of dimension at least two is an honest derivation,
//!   recovering it in split form; any failed verification names the stage.

use crate::algebra::{Algebra, RegularElement};
use crate::derivation::{extend_with_value, AbelianDerivation};
use crate::error::{EngineError, PipelineStage, Result};
use crate::lattice::Idempotent;
use crate::matrix::{MatrixDerivation, MatrixElement};
use crate::poly::VarId;
use crate::sample;
use rand::Rng;
use std::collections::BTreeSet;
use std::sync::Arc;

type ValueFn<T> = Arc<dyn Fn(&T) -> Result<T> + Send + Sync>;
type WitnessFn<T, D> = Arc<dyn Fn(&T, &T) -> Result<D> + Send + Sync>;

/// Outcome of sampling the additivity law.
#[derive(Clone, Debug, PartialEq)]
pub enum AdditivityReport<T> {
    Additive { samples: usize },
    Counterexample { x: T, y: T, sum_of_values: T, value_of_sum: T },
}

fn mismatch<T: std::fmt::Display>(point: &T, expected: &T, got: &T) -> EngineError {
    EngineError::WitnessMismatch {
        point: point.to_string(),
        expected: expected.to_string(),
        got: got.to_string(),
    }
}

/// 2-local map on the commutative algebra.
#[derive(Clone)]
pub struct AbelianTwoLocal {
    algebra: Algebra,
    value: ValueFn<RegularElement>,
    witness: WitnessFn<RegularElement, AbelianDerivation>,
    /// Pair checked first by `additivity_check`; set by constructions that
    /// know where additivity breaks.
    distinguished: Option<(RegularElement, RegularElement)>,
}

impl AbelianTwoLocal {
    pub fn from_fns(
        algebra: &Algebra,
        value: impl Fn(&RegularElement) -> Result<RegularElement> + Send + Sync + 'static,
        witness: impl Fn(&RegularElement, &RegularElement) -> Result<AbelianDerivation>
            + Send
            + Sync
            + 'static,
    ) -> Self {
        AbelianTwoLocal {
            algebra: algebra.clone(),
            value: Arc::new(value),
            witness: Arc::new(witness),
            distinguished: None,
        }
    }

    /// Every derivation is 2-local with itself as the constant witness.
    pub fn from_derivation(d: &AbelianDerivation) -> Self {
        let value_d = d.clone();
        let witness_d = d.clone();
        AbelianTwoLocal {
            algebra: d.algebra().clone(),
            value: Arc::new(move |x| value_d.apply(x)),
            witness: Arc::new(move |_, _| Ok(witness_d.clone())),
            distinguished: None,
        }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn distinguished_pair(&self) -> Option<&(RegularElement, RegularElement)> {
        self.distinguished.as_ref()
    }

    pub fn value(&self, x: &RegularElement) -> Result<RegularElement> {
        self.algebra.check_same(x.algebra())?;
        (self.value)(x)
    }

    pub fn witness(&self, x: &RegularElement, y: &RegularElement) -> Result<AbelianDerivation> {
        self.algebra.check_same(x.algebra())?;
        self.algebra.check_same(y.algebra())?;
        (self.witness)(x, y)
    }

    /// Requests the witness at `(x, y)` and re-verifies both defining
    /// equalities by direct evaluation.
    pub fn certify_pair(
        &self,
        x: &RegularElement,
        y: &RegularElement,
    ) -> Result<AbelianDerivation> {
        let w = self.witness(x, y)?;
        let vx = self.value(x)?;
        let wx = w.apply(x)?;
        if vx != wx {
            return Err(mismatch(x, &vx, &wx));
        }
        let vy = self.value(y)?;
        let wy = w.apply(y)?;
        if vy != wy {
            return Err(mismatch(y, &vy, &wy));
        }
        Ok(w)
    }

    /// Samples the additivity law, checking the distinguished pair first.
    pub fn additivity_check(
        &self,
        samples: usize,
        seed: u64,
    ) -> Result<AdditivityReport<RegularElement>> {
        let mut pairs: Vec<(RegularElement, RegularElement)> = Vec::new();
        if let Some((a, b)) = &self.distinguished {
            pairs.push((a.clone(), b.clone()));
        }
        let mut rng = sample::rng(seed);
        while pairs.len() < samples.max(1) {
            pairs.push((
                sample::flavored_element(&mut rng, &self.algebra),
                sample::flavored_element(&mut rng, &self.algebra),
            ));
        }
        for (x, y) in pairs {
            let sum_of_values = self.value(&x)?.add(&self.value(&y)?)?;
            let value_of_sum = self.value(&x.add(&y)?)?;
            if sum_of_values != value_of_sum {
                return Ok(AdditivityReport::Counterexample {
                    x,
                    y,
                    sum_of_values,
                    value_of_sum,
                });
            }
        }
        Ok(AdditivityReport::Additive {
            samples: samples.max(1),
        })
    }

    /// Whether the map commutes with masking by the central idempotent `e`
    /// at the point `x`.
    pub fn mask_equivariant(&self, e: &Idempotent, x: &RegularElement) -> Result<bool> {
        let lhs = self.value(&x.mask(e)?)?;
        let rhs = self.value(x)?.mask(e)?;
        Ok(lhs == rhs)
    }
}

/// The 2-local derivation that is not a derivation.
///
/// With two fixed independent variables `a` and `b`, let `D` be the
/// derivation with `D(a) = D(b) = 1` and let `e(x)` be the join of the
/// membership idempotents of `x` in the `a`- and `b`-subalgebras. The map
/// is `x -> e(x) * D(x)`. It is homogeneous and sends both `a` and `b` to
/// `1` but `a + b` to `0`, so it is not additive; the witness oracle
/// assembles, per atom, a genuine derivation from `D` and single-variable
/// extensions killing the masked partner element.
pub fn build_counterexample(
    algebra: &Algebra,
    a_var: VarId,
    b_var: VarId,
) -> Result<AbelianTwoLocal> {
    algebra.check_var(a_var)?;
    algebra.check_var(b_var)?;
    if a_var == b_var {
        return Err(EngineError::Invalid(
            "the two generator variables must differ".into(),
        ));
    }
    let one = RegularElement::one(algebra);
    let d = AbelianDerivation::with_values(algebra, &[(a_var, one.clone()), (b_var, one)])?;
    let gens_a: BTreeSet<VarId> = [a_var].into_iter().collect();
    let gens_b: BTreeSet<VarId> = [b_var].into_iter().collect();

    let reach = {
        let gens_a = gens_a.clone();
        let gens_b = gens_b.clone();
        move |x: &RegularElement| -> Result<Idempotent> {
            x.membership_idempotent(&gens_a)?
                .join(&x.membership_idempotent(&gens_b)?)
        }
    };

    let value = {
        let d = d.clone();
        let reach = reach.clone();
        move |x: &RegularElement| d.apply(x)?.mask(&reach(x)?)
    };

    // Witness on the complement side of the partition: a derivation that
    // matches the single-variable base on the pure side and kills the
    // masked partner element.
    let single_side = {
        let algebra = algebra.clone();
        let gens_a = gens_a.clone();
        let gens_b = gens_b.clone();
        move |pure: &RegularElement,
              partner: &RegularElement,
              region: &Idempotent|
              -> Result<AbelianDerivation> {
            let zero = RegularElement::zero(&algebra);
            let masked = partner.mask(region)?;
            let base_a = AbelianDerivation::with_values(
                &algebra,
                &[(a_var, RegularElement::one(&algebra))],
            )?;
            let base_b = AbelianDerivation::with_values(
                &algebra,
                &[(b_var, RegularElement::one(&algebra))],
            )?;
            let d1 = extend_with_value(&gens_a, &base_a, &masked, &zero)?;
            let d2 = extend_with_value(&gens_b, &base_b, &masked, &zero)?;
            let in_a = pure.membership_idempotent(&gens_a)?;
            d1.mask(&region.meet(&in_a)?)?
                .add(&d2.mask(&region.meet(&in_a.complement())?)?)
        }
    };

    let witness = {
        let d = d.clone();
        let reach = reach.clone();
        move |x: &RegularElement, y: &RegularElement| -> Result<AbelianDerivation> {
            let e1 = reach(x)?;
            let e2 = reach(y)?;
            let both = e1.meet(&e2)?;
            let only_x = e1.meet(&e2.complement())?;
            let only_y = e1.complement().meet(&e2)?;
            let mut w = d.mask(&both)?;
            if !only_x.is_bottom() {
                w = w.add(&single_side(x, y, &only_x)?)?;
            }
            if !only_y.is_bottom() {
                w = w.add(&single_side(y, x, &only_y)?)?;
            }
            Ok(w)
        }
    };

    Ok(AbelianTwoLocal {
        algebra: algebra.clone(),
        value: Arc::new(value),
        witness: Arc::new(witness),
        distinguished: Some((
            RegularElement::variable(algebra, a_var)?,
            RegularElement::variable(algebra, b_var)?,
        )),
    })
}

/// 2-local map on the matrix algebra.
#[derive(Clone)]
pub struct MatrixTwoLocal {
    algebra: Algebra,
    n: usize,
    value: ValueFn<MatrixElement>,
    witness: WitnessFn<MatrixElement, MatrixDerivation>,
}

/// Tuning knobs for `linearize`. Probe counts trade certification breadth
/// for runtime; the seed fixes the sampled probes.
#[derive(Clone, Debug)]
pub struct LinearizeConfig {
    pub seed: u64,
    pub center_samples: usize,
    pub probe_samples: usize,
}

impl Default for LinearizeConfig {
    fn default() -> Self {
        LinearizeConfig {
            seed: 0x2C0DE,
            center_samples: 3,
            probe_samples: 3,
        }
    }
}

fn stage_err(stage: PipelineStage, detail: impl Into<String>) -> EngineError {
    EngineError::Linearize {
        stage,
        detail: detail.into(),
    }
}

impl MatrixTwoLocal {
    pub fn from_fns(
        algebra: &Algebra,
        n: usize,
        value: impl Fn(&MatrixElement) -> Result<MatrixElement> + Send + Sync + 'static,
        witness: impl Fn(&MatrixElement, &MatrixElement) -> Result<MatrixDerivation>
            + Send
            + Sync
            + 'static,
    ) -> Self {
        MatrixTwoLocal {
            algebra: algebra.clone(),
            n,
            value: Arc::new(value),
            witness: Arc::new(witness),
        }
    }

    pub fn from_derivation(d: &MatrixDerivation) -> Self {
        let value_d = d.clone();
        let witness_d = d.clone();
        MatrixTwoLocal {
            algebra: d.algebra().clone(),
            n: d.dim(),
            value: Arc::new(move |x| value_d.apply(x)),
            witness: Arc::new(move |_, _| Ok(witness_d.clone())),
        }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn check_point(&self, x: &MatrixElement) -> Result<()> {
        self.algebra.check_same(x.algebra())?;
        if x.dim() != self.n {
            return Err(EngineError::DimensionMismatch(x.dim(), self.n));
        }
        Ok(())
    }

    pub fn value(&self, x: &MatrixElement) -> Result<MatrixElement> {
        self.check_point(x)?;
        (self.value)(x)
    }

    pub fn witness(&self, x: &MatrixElement, y: &MatrixElement) -> Result<MatrixDerivation> {
        self.check_point(x)?;
        self.check_point(y)?;
        (self.witness)(x, y)
    }

    pub fn certify_pair(&self, x: &MatrixElement, y: &MatrixElement) -> Result<MatrixDerivation> {
        let w = self.witness(x, y)?;
        let vx = self.value(x)?;
        let wx = w.apply(x)?;
        if vx != wx {
            return Err(mismatch(x, &vx, &wx));
        }
        let vy = self.value(y)?;
        let wy = w.apply(y)?;
        if vy != wy {
            return Err(mismatch(y, &vy, &wy));
        }
        Ok(w)
    }

    /// The map `x -> value(x) - d(x)`, with witnesses shifted accordingly.
    /// Agreement of a witness with the original map transfers to the shift.
    pub fn shifted(&self, d: &MatrixDerivation) -> Result<MatrixTwoLocal> {
        self.algebra.check_same(d.algebra())?;
        if d.dim() != self.n {
            return Err(EngineError::DimensionMismatch(d.dim(), self.n));
        }
        let value = self.value.clone();
        let witness = self.witness.clone();
        let dv = d.clone();
        let dw = d.clone();
        Ok(MatrixTwoLocal {
            algebra: self.algebra.clone(),
            n: self.n,
            value: Arc::new(move |x| value(x)?.sub(&dv.apply(x)?)),
            witness: Arc::new(move |x, y| witness(x, y)?.sub(&dw)),
        })
    }

    pub fn additivity_check(
        &self,
        samples: usize,
        seed: u64,
    ) -> Result<AdditivityReport<MatrixElement>> {
        let mut rng = sample::rng(seed);
        for _ in 0..samples.max(1) {
            let x = sample::matrix(&mut rng, &self.algebra, self.n);
            let y = sample::matrix(&mut rng, &self.algebra, self.n);
            let sum_of_values = self.value(&x)?.add(&self.value(&y)?)?;
            let value_of_sum = self.value(&x.add(&y)?)?;
            if sum_of_values != value_of_sum {
                return Ok(AdditivityReport::Counterexample {
                    x,
                    y,
                    sum_of_values,
                    value_of_sum,
                });
            }
        }
        Ok(AdditivityReport::Additive {
            samples: samples.max(1),
        })
    }

    pub fn mask_equivariant(&self, e: &Idempotent, x: &MatrixElement) -> Result<bool> {
        let lhs = self.value(&x.mask(e)?)?;
        let rhs = self.value(x)?.mask(e)?;
        Ok(lhs == rhs)
    }

    /// Certifies that the map is a derivation and returns it in split form.
    ///
    /// The pipeline follows the proof it executes. Each stage requests
    /// witnesses at the pairs the argument dictates, re-verifies every
    /// agreement equation, checks the structural facts those agreements
    /// force, and finally asserts the stage's conclusion. The first failure
    /// aborts with the stage name.
    pub fn linearize(&self, cfg: &LinearizeConfig) -> Result<MatrixDerivation> {
        let n = self.n;
        if n < 2 {
            return Err(EngineError::DimensionTooSmall(n));
        }
        let algebra = &self.algebra;
        let diag = MatrixElement::halving_diagonal(algebra, n)?;
        let shift = MatrixElement::superdiagonal_shift(algebra, n)?;

        // Base pair: the witness at (diag, shift) is the candidate main
        // part; after subtracting it the map kills both base points.
        let w0 = self
            .witness(&diag, &shift)
            .map_err(|e| stage_err(PipelineStage::BasePair, e.to_string()))?;
        {
            let vd = self.value(&diag)?;
            let wd = w0.apply(&diag)?;
            if vd != wd {
                return Err(stage_err(
                    PipelineStage::BasePair,
                    "witness disagrees at the halving diagonal",
                ));
            }
            let vq = self.value(&shift)?;
            let wq = w0.apply(&shift)?;
            if vq != wq {
                return Err(stage_err(
                    PipelineStage::BasePair,
                    "witness disagrees at the superdiagonal shift",
                ));
            }
        }
        let corrected = self.shifted(&w0)?;

        corrected.annihilate_units(&diag, &shift)?;
        let mut rng = sample::rng(cfg.seed);
        corrected.entrywise_structure(&mut rng, cfg.probe_samples)?;
        let center = corrected.extract_center()?;
        corrected.center_additivity(&mut rng, cfg.center_samples, &center)?;

        let center_part = MatrixDerivation::from_center(algebra, n, center)?;
        let residual = corrected.shifted(&center_part)?;
        residual.residual_vanishes(&mut rng, cfg.probe_samples)?;

        w0.add(&center_part)
    }

    /// The corrected map kills every matrix unit: witnessed against the
    /// halving diagonal (forcing a diagonal inner part, which concentrates
    /// the value at one entry) and against the superdiagonal shift (whose
    /// Toeplitz commutant kills that entry).
    fn annihilate_units(&self, diag: &MatrixElement, shift: &MatrixElement) -> Result<()> {
        let stage = PipelineStage::MatrixUnits;
        let n = self.n;
        let vdiag = self.value(diag)?;
        if !vdiag.is_zero() {
            return Err(stage_err(stage, "map does not kill the halving diagonal"));
        }
        let vshift = self.value(shift)?;
        if !vshift.is_zero() {
            return Err(stage_err(stage, "map does not kill the superdiagonal shift"));
        }
        for i in 0..n {
            for j in 0..n {
                let unit = MatrixElement::unit(&self.algebra, n, i, j)?;
                let vu = self.value(&unit)?;
                let wd = self
                    .witness(&unit, diag)
                    .map_err(|e| stage_err(stage, e.to_string()))?;
                if wd.apply(&unit)? != vu {
                    return Err(stage_err(
                        stage,
                        format!("witness at (e_{}{}, diag) disagrees at the unit", i + 1, j + 1),
                    ));
                }
                if !wd.apply(diag)?.is_zero() {
                    return Err(stage_err(
                        stage,
                        format!(
                            "witness at (e_{}{}, diag) disagrees at the halving diagonal",
                            i + 1,
                            j + 1
                        ),
                    ));
                }
                // [h, diag] = 0 with distinct diagonal weights forces h
                // diagonal.
                if !wd.inner().is_diagonal() {
                    return Err(stage_err(
                        stage,
                        "inner part commuting with the halving diagonal is not diagonal",
                    ));
                }
                let wq = self
                    .witness(&unit, shift)
                    .map_err(|e| stage_err(stage, e.to_string()))?;
                if wq.apply(&unit)? != vu {
                    return Err(stage_err(
                        stage,
                        format!("witness at (e_{}{}, shift) disagrees at the unit", i + 1, j + 1),
                    ));
                }
                if !wq.apply(shift)?.is_zero() {
                    return Err(stage_err(
                        stage,
                        format!(
                            "witness at (e_{}{}, shift) disagrees at the superdiagonal shift",
                            i + 1,
                            j + 1
                        ),
                    ));
                }
                if !vu.is_zero() {
                    return Err(stage_err(
                        stage,
                        format!("map does not vanish at the unit e_{}{}", i + 1, j + 1),
                    ));
                }
            }
        }
        Ok(())
    }

    /// On sampled matrices, each entry of the value is produced from the
    /// matching entry of the argument by the witness's central part:
    /// sandwiching between units reduces to the central action because the
    /// map kills the units.
    fn entrywise_structure(&self, rng: &mut impl Rng, probes: usize) -> Result<()> {
        let stage = PipelineStage::EntrywiseStructure;
        let n = self.n;
        for _ in 0..probes.max(1) {
            let x = sample::matrix(rng, &self.algebra, n);
            let vx = self.value(&x)?;
            for i in 0..n {
                for j in 0..n {
                    let unit = MatrixElement::unit(&self.algebra, n, i, j)?;
                    let w = self
                        .witness(&x, &unit)
                        .map_err(|e| stage_err(stage, e.to_string()))?;
                    if w.apply(&x)? != vx {
                        return Err(stage_err(stage, "witness disagrees at the probe"));
                    }
                    let vu = self.value(&unit)?;
                    if w.apply(&unit)? != vu {
                        return Err(stage_err(stage, "witness disagrees at the unit"));
                    }
                    if !vu.is_zero() {
                        return Err(stage_err(stage, "map does not vanish at a unit"));
                    }
                    // e_ij value(x) e_ij = delta_w(x_ji) e_ij
                    let lhs = unit.mul(&vx)?.mul(&unit)?;
                    let rhs = unit.element_mul(&w.center().apply(x.entry(j, i))?)?;
                    if lhs != rhs {
                        return Err(stage_err(
                            stage,
                            format!(
                                "entry ({}, {}) of the value is not the central action on the matching entry",
                                j + 1,
                                i + 1
                            ),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// The value on each central variable generator must be central; its
    /// corner entries define the center restriction.
    fn extract_center(&self) -> Result<AbelianDerivation> {
        let stage = PipelineStage::CenterExtraction;
        let n = self.n;
        let mut values = Vec::with_capacity(self.algebra.nvars());
        for v in 0..self.algebra.nvars() {
            let gen = MatrixElement::central(
                &self.algebra,
                n,
                &RegularElement::variable(&self.algebra, v)?,
            )?;
            let val = self.value(&gen)?;
            let corner = val.entry(0, 0).clone();
            let central = MatrixElement::central(&self.algebra, n, &corner)?;
            if val != central {
                return Err(stage_err(
                    stage,
                    format!(
                        "value at the central generator {} is not central",
                        self.algebra.vars().name(v)
                    ),
                ));
            }
            values.push((v, corner));
        }
        AbelianDerivation::with_values(&self.algebra, &values)
            .map_err(|e| stage_err(stage, e.to_string()))
    }

    /// Additivity of the center restriction by the split-diagonal trick:
    /// witnesses at (f*1, w), (g*1, w) and ((f+g)*1, w) against the mixed
    /// diagonal w = f e_11 + sum_{i>1} g e_ii tie all three values to one
    /// derivation each, forcing value((f+g)*1) = value(f*1) + value(g*1).
    /// The extracted center must also reproduce the sampled values.
    fn center_additivity(
        &self,
        rng: &mut impl Rng,
        samples: usize,
        center: &AbelianDerivation,
    ) -> Result<()> {
        let stage = PipelineStage::CenterAdditivity;
        let n = self.n;
        let algebra = &self.algebra;
        for _ in 0..samples.max(1) {
            let f = sample::light_element(rng, algebra);
            let g = sample::light_element(rng, algebra);
            let x = MatrixElement::central(algebra, n, &f)?;
            let y = MatrixElement::central(algebra, n, &g)?;
            let z = MatrixElement::central(algebra, n, &f.add(&g)?)?;
            let mut mixed = MatrixElement::zero(algebra, n)?;
            mixed.set(0, 0, f.clone());
            for i in 1..n {
                mixed.set(i, i, g.clone());
            }

            let vx = self.value(&x)?;
            let vy = self.value(&y)?;
            let vz = self.value(&z)?;
            let vmixed = self.value(&mixed)?;
            for (name, v) in [("f*1", &vx), ("g*1", &vy), ("(f+g)*1", &vz), ("split", &vmixed)] {
                if !v.is_diagonal() {
                    return Err(stage_err(
                        stage,
                        format!("value at the {} probe is not diagonal", name),
                    ));
                }
            }
            for (point, v) in [(&x, &vx), (&y, &vy), (&z, &vz)] {
                let w = self
                    .witness(point, &mixed)
                    .map_err(|e| stage_err(stage, e.to_string()))?;
                if w.apply(point)? != *v {
                    return Err(stage_err(stage, "witness disagrees at the central probe"));
                }
                if w.apply(&mixed)? != vmixed {
                    return Err(stage_err(stage, "witness disagrees at the split diagonal"));
                }
            }
            // The first witness identifies value(f*1)_11 with value(w)_11,
            // the second value(g*1)_22 with value(w)_22, and the third adds
            // them; together:
            if vz != vx.add(&vy)? {
                return Err(stage_err(stage, "center restriction is not additive"));
            }
            // The extracted derivation reproduces the center restriction.
            for (h, vh) in [(&f, &vx), (&g, &vy)] {
                let expected = MatrixElement::central(algebra, n, &center.apply(h)?)?;
                if *vh != expected {
                    return Err(stage_err(
                        stage,
                        "extracted center does not reproduce the value on a sampled central element",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Diagonal matrix with full-support pairwise differences built from a
    /// corner value: entry 1 is the value, entry i is
    /// `i * (value + 1 - support(value))`.
    fn full_support_probe(&self, corner: &RegularElement) -> Result<MatrixElement> {
        let n = self.n;
        let algebra = &self.algebra;
        let supp = RegularElement::from_idempotent(algebra, &corner.support())?;
        let filler = corner.add(&RegularElement::one(algebra))?.sub(&supp)?;
        let mut probe = MatrixElement::zero(algebra, n)?;
        probe.set(0, 0, corner.clone());
        for i in 1..n {
            probe.set(
                i,
                i,
                filler.scalar_mul(&crate::scalar::Scalar::from_integer((i + 1) as i64)),
            );
        }
        // Construction sanity: all pairwise differences of the diagonal
        // entries have full support.
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let diff = probe.entry(i, i).sub(probe.entry(j, j))?;
                    if !diff.support().is_top() {
                        return Err(EngineError::Invalid(
                            "full-support probe construction failed".into(),
                        ));
                    }
                }
            }
        }
        Ok(probe)
    }

    /// After both corrections the map must vanish identically; verified
    /// entry by entry on sampled matrices through the probe families the
    /// argument prescribes.
    fn residual_vanishes(&self, rng: &mut impl Rng, probes: usize) -> Result<()> {
        let n = self.n;
        let algebra = &self.algebra;
        for _ in 0..probes.max(1) {
            let x = sample::matrix(rng, algebra, n);
            let vx = self.value(&x)?;

            // Diagonal entries, witnessed against full-support diagonals.
            for k in 0..n {
                let stage = PipelineStage::DiagonalResidual;
                let probe = self.full_support_probe(x.entry(k, k))?;
                let vp = self.value(&probe)?;
                if !vp.is_zero() {
                    return Err(stage_err(
                        stage,
                        "map does not vanish on a full-support diagonal probe",
                    ));
                }
                let w = self
                    .witness(&x, &probe)
                    .map_err(|e| stage_err(stage, e.to_string()))?;
                if w.apply(&x)? != vx {
                    return Err(stage_err(stage, "witness disagrees at the probe matrix"));
                }
                if !w.apply(&probe)?.is_zero() {
                    return Err(stage_err(stage, "witness disagrees at the diagonal probe"));
                }
                // Vanishing on the probe forces a diagonal inner part and
                // kills the corner entry under the central part.
                if !w.inner().is_diagonal() {
                    return Err(stage_err(
                        stage,
                        "inner part is not diagonal despite full-support differences",
                    ));
                }
                if !w.center().apply(x.entry(k, k))?.is_zero() {
                    return Err(stage_err(
                        stage,
                        "central part does not kill the probed diagonal entry",
                    ));
                }
                if !vx.entry(k, k).is_zero() {
                    return Err(stage_err(
                        stage,
                        format!("residual diagonal entry ({k}, {k}) is nonzero", k = k + 1),
                    ));
                }
            }

            // Off-diagonal entries: first with the mirror entry pinned to
            // one, then transferred to the sampled matrix.
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let stage = PipelineStage::UnitEntryResidual;
                    let mut pinned = x.clone();
                    pinned.set(j, i, RegularElement::one(algebra));
                    let vpinned = self.value(&pinned)?;
                    let probe = self.full_support_probe(pinned.entry(i, j))?;
                    if !self.value(&probe)?.is_zero() {
                        return Err(stage_err(
                            stage,
                            "map does not vanish on a full-support diagonal probe",
                        ));
                    }
                    let w = self
                        .witness(&pinned, &probe)
                        .map_err(|e| stage_err(stage, e.to_string()))?;
                    if w.apply(&pinned)? != vpinned {
                        return Err(stage_err(stage, "witness disagrees at the pinned matrix"));
                    }
                    if !w.apply(&probe)?.is_zero() {
                        return Err(stage_err(stage, "witness disagrees at the diagonal probe"));
                    }
                    if !w.inner().is_diagonal() {
                        return Err(stage_err(
                            stage,
                            "inner part is not diagonal despite full-support differences",
                        ));
                    }
                    // The (j,i) entry of the value equals the difference of
                    // inner diagonal entries; the entrywise structure says
                    // it is a derivation value at 1, hence zero.
                    let unit = MatrixElement::unit(algebra, n, i, j)?;
                    let w2 = self
                        .witness(&pinned, &unit)
                        .map_err(|e| stage_err(stage, e.to_string()))?;
                    if w2.apply(&pinned)? != vpinned {
                        return Err(stage_err(stage, "witness disagrees at the pinned matrix"));
                    }
                    let vunit = self.value(&unit)?;
                    if w2.apply(&unit)? != vunit {
                        return Err(stage_err(stage, "witness disagrees at the unit"));
                    }
                    if !vunit.is_zero() {
                        return Err(stage_err(stage, "map does not vanish at a unit"));
                    }
                    if !unit.mul(&vpinned)?.mul(&unit)?.is_zero() {
                        return Err(stage_err(
                            stage,
                            "pinned mirror entry does not annihilate the sandwiched value",
                        ));
                    }
                    if !vpinned.entry(i, j).is_zero() {
                        return Err(stage_err(
                            stage,
                            format!(
                                "residual entry ({}, {}) with pinned mirror is nonzero",
                                i + 1,
                                j + 1
                            ),
                        ));
                    }

                    // Transfer to x: a derivation's (i,j) output entry never
                    // reads the (j,i) input entry, and x and the pinned
                    // matrix differ only there.
                    let stage = PipelineStage::OffDiagonalResidual;
                    let w3 = self
                        .witness(&x, &pinned)
                        .map_err(|e| stage_err(stage, e.to_string()))?;
                    let w3x = w3.apply(&x)?;
                    let w3p = w3.apply(&pinned)?;
                    if w3x != vx {
                        return Err(stage_err(stage, "witness disagrees at the probe matrix"));
                    }
                    if w3p != vpinned {
                        return Err(stage_err(stage, "witness disagrees at the pinned matrix"));
                    }
                    if w3x.entry(i, j) != w3p.entry(i, j) {
                        return Err(stage_err(
                            stage,
                            "witness output entry depends on the mirrored input entry",
                        ));
                    }
                    if !vx.entry(i, j).is_zero() {
                        return Err(stage_err(
                            stage,
                            format!("residual entry ({}, {}) is nonzero", i + 1, j + 1),
                        ));
                    }
                }
            }

            if !vx.is_zero() {
                return Err(stage_err(
                    PipelineStage::FinalResidual,
                    "corrected map does not vanish on a sampled matrix",
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfunc::RationalFunction;
    use crate::scalar::{rational, Scalar};

    fn one_atom() -> Algebra {
        Algebra::build(vec![rational(1, 1)], &["t", "s"]).unwrap()
    }

    fn three_atoms() -> Algebra {
        Algebra::build(
            vec![rational(1, 6), rational(2, 6), rational(3, 6)],
            &["t", "s"],
        )
        .unwrap()
    }

    fn stage_of(err: EngineError) -> PipelineStage {
        match err {
            EngineError::Linearize { stage, .. } => stage,
            other => panic!("expected a pipeline failure, got {other}"),
        }
    }

    #[test]
    fn counterexample_distinguished_values() {
        let alg = one_atom();
        let tl = build_counterexample(&alg, 0, 1).unwrap();
        let t = RegularElement::variable(&alg, 0).unwrap();
        let s = RegularElement::variable(&alg, 1).unwrap();
        let one = RegularElement::one(&alg);
        assert_eq!(tl.value(&t).unwrap(), one);
        assert_eq!(tl.value(&s).unwrap(), one);
        assert!(tl.value(&t.add(&s).unwrap()).unwrap().is_zero());
        let (a, b) = tl.distinguished_pair().unwrap().clone();
        assert_eq!(a, t);
        assert_eq!(b, s);
    }

    #[test]
    fn counterexample_not_additive() {
        let alg = one_atom();
        let tl = build_counterexample(&alg, 0, 1).unwrap();
        match tl.additivity_check(50, 11).unwrap() {
            AdditivityReport::Counterexample {
                x,
                y,
                sum_of_values,
                value_of_sum,
            } => {
                assert_eq!(x, RegularElement::variable(&alg, 0).unwrap());
                assert_eq!(y, RegularElement::variable(&alg, 1).unwrap());
                assert_eq!(sum_of_values, RegularElement::from_integer(&alg, 2));
                assert!(value_of_sum.is_zero());
            }
            AdditivityReport::Additive { .. } => panic!("additivity should fail"),
        }
    }

    #[test]
    fn counterexample_is_homogeneous() {
        let alg = three_atoms();
        let tl = build_counterexample(&alg, 0, 1).unwrap();
        let mut rng = sample::rng(23);
        let lambdas = [
            Scalar::zero(),
            Scalar::from_integer(2),
            Scalar::from_ratio(-1, 2),
            Scalar::i(),
        ];
        for _ in 0..40 {
            let x = sample::flavored_element(&mut rng, &alg);
            let vx = tl.value(&x).unwrap();
            for lambda in &lambdas {
                let lhs = tl.value(&x.scalar_mul(lambda)).unwrap();
                assert_eq!(lhs, vx.scalar_mul(lambda));
            }
        }
    }

    #[test]
    fn counterexample_witnesses_certify() {
        for alg in [one_atom(), three_atoms()] {
            let tl = build_counterexample(&alg, 0, 1).unwrap();
            let (a, b) = tl.distinguished_pair().unwrap().clone();
            tl.certify_pair(&a, &b).unwrap();
            tl.certify_pair(&a, &a.add(&b).unwrap()).unwrap();
            let mut rng = sample::rng(57);
            for _ in 0..60 {
                let x = sample::flavored_element(&mut rng, &alg);
                let y = sample::flavored_element(&mut rng, &alg);
                tl.certify_pair(&x, &y).unwrap();
            }
        }
    }

    #[test]
    fn counterexample_witness_spans_all_regions() {
        // Atom 1: x lives on the first-variable side, y on the second.
        // Atom 2: x is in neither subalgebra, y is pure. Atom 3: x is
        // constant (both sides), y is in neither.
        let alg = three_atoms();
        let t = RationalFunction::variable(2, 0);
        let s = RationalFunction::variable(2, 1);
        let x = RegularElement::from_stalks(
            &alg,
            vec![
                t.clone(),
                t.mul(&s),
                RationalFunction::constant(2, Scalar::from_integer(3)),
            ],
        )
        .unwrap();
        let y = RegularElement::from_stalks(&alg, vec![s.clone(), s.clone(), t.add(&s)]).unwrap();
        let tl = build_counterexample(&alg, 0, 1).unwrap();
        let vx = tl.value(&x).unwrap();
        assert!(vx.stalk(0).is_one());
        assert!(vx.stalk(1).is_zero());
        assert!(vx.stalk(2).is_zero());
        tl.certify_pair(&x, &y).unwrap();
        tl.certify_pair(&y, &x).unwrap();
    }

    #[test]
    fn counterexample_mask_equivariant() {
        let alg = three_atoms();
        let tl = build_counterexample(&alg, 0, 1).unwrap();
        let mut rng = sample::rng(91);
        for _ in 0..30 {
            let x = sample::flavored_element(&mut rng, &alg);
            let e = sample::idempotent(&mut rng, &alg);
            assert!(tl.mask_equivariant(&e, &x).unwrap());
        }
    }

    #[test]
    fn counterexample_needs_distinct_variables() {
        let alg = one_atom();
        assert!(build_counterexample(&alg, 0, 0).is_err());
        assert!(matches!(
            build_counterexample(&alg, 0, 5),
            Err(EngineError::VariableOutOfRange(5))
        ));
    }

    #[test]
    fn abelian_derivation_is_two_local() {
        let alg = three_atoms();
        let mut rng = sample::rng(3);
        let d = sample::abelian_derivation(&mut rng, &alg);
        let tl = AbelianTwoLocal::from_derivation(&d);
        for _ in 0..20 {
            let x = sample::flavored_element(&mut rng, &alg);
            let y = sample::flavored_element(&mut rng, &alg);
            tl.certify_pair(&x, &y).unwrap();
        }
        assert_eq!(
            tl.additivity_check(30, 5).unwrap(),
            AdditivityReport::Additive { samples: 30 }
        );
    }

    #[test]
    fn lying_witness_is_rejected() {
        let alg = one_atom();
        let honest = AbelianDerivation::with_values(
            &alg,
            &[(0, RegularElement::one(&alg))],
        )
        .unwrap();
        let value_d = honest.clone();
        let zero_w = AbelianDerivation::zero(&alg);
        let tl = AbelianTwoLocal::from_fns(
            &alg,
            move |x| value_d.apply(x),
            move |_, _| Ok(zero_w.clone()),
        );
        let t = RegularElement::variable(&alg, 0).unwrap();
        let s = RegularElement::variable(&alg, 1).unwrap();
        assert!(matches!(
            tl.certify_pair(&t, &s),
            Err(EngineError::WitnessMismatch { .. })
        ));
        // The witness happens to agree wherever the value vanishes.
        tl.certify_pair(&s, &s).unwrap();
    }

    #[test]
    fn matrix_derivation_linearize_roundtrip() {
        for (n, atoms) in [(2usize, 2usize), (3, 1)] {
            let alg = Algebra::build(vec![rational(1, 1); atoms], &["t", "s"]).unwrap();
            let mut rng = sample::rng(100 + n as u64);
            for _ in 0..2 {
                let d = sample::matrix_derivation(&mut rng, &alg, n);
                let tl = MatrixTwoLocal::from_derivation(&d);
                let cfg = LinearizeConfig {
                    seed: 7,
                    center_samples: 2,
                    probe_samples: 2,
                };
                let got = tl.linearize(&cfg).unwrap();
                for _ in 0..6 {
                    let x = sample::matrix(&mut rng, &alg, n);
                    assert_eq!(got.apply(&x).unwrap(), d.apply(&x).unwrap());
                }
            }
        }
    }

    #[test]
    fn linearize_recovers_split_parts_exactly() {
        let alg = one_atom();
        let n = 2;
        let inner = {
            let mut m = MatrixElement::zero(&alg, n).unwrap();
            m.set(0, 1, RegularElement::variable(&alg, 0).unwrap());
            m.set(1, 1, RegularElement::from_integer(&alg, 5));
            m
        };
        let center = AbelianDerivation::with_values(
            &alg,
            &[(1, RegularElement::variable(&alg, 1).unwrap())],
        )
        .unwrap();
        let d = MatrixDerivation::new(inner, center).unwrap();
        let tl = MatrixTwoLocal::from_derivation(&d);
        let got = tl.linearize(&LinearizeConfig::default()).unwrap();
        assert_eq!(got.inner(), d.inner());
        let mut rng = sample::rng(41);
        for _ in 0..8 {
            let x = sample::matrix(&mut rng, &alg, n);
            assert_eq!(got.apply(&x).unwrap(), d.apply(&x).unwrap());
        }
    }

    #[test]
    fn linearize_rejects_dimension_one() {
        let alg = one_atom();
        let d = MatrixDerivation::zero(&alg, 1).unwrap();
        let tl = MatrixTwoLocal::from_derivation(&d);
        assert!(matches!(
            tl.linearize(&LinearizeConfig::default()),
            Err(EngineError::DimensionTooSmall(1))
        ));
    }

    #[test]
    fn adversarial_square_map_fails_base_pair() {
        // value(x) = x_12^2 e_12 with the zero derivation as witness: the
        // witness agrees at the halving diagonal but not at the shift.
        let alg = one_atom();
        let n = 2;
        let value_alg = alg.clone();
        let zero_w = MatrixDerivation::zero(&alg, n).unwrap();
        let tl = MatrixTwoLocal::from_fns(
            &alg,
            n,
            move |x| {
                let sq = x.entry(0, 1).mul(x.entry(0, 1))?;
                MatrixElement::unit(&value_alg, 2, 0, 1)?.element_mul(&sq)
            },
            move |_, _| Ok(zero_w.clone()),
        );
        let err = tl.linearize(&LinearizeConfig::default()).unwrap_err();
        assert_eq!(stage_of(err), PipelineStage::BasePair);
    }

    #[test]
    fn adversarial_product_map_fails_entrywise_structure() {
        // value(x) = x_12 x_21 e_12 vanishes on the base pair and on every
        // matrix unit; only a generic probe exposes it.
        let alg = one_atom();
        let n = 2;
        let value_alg = alg.clone();
        let zero_w = MatrixDerivation::zero(&alg, n).unwrap();
        let tl = MatrixTwoLocal::from_fns(
            &alg,
            n,
            move |x| {
                let prod = x.entry(0, 1).mul(x.entry(1, 0))?;
                MatrixElement::unit(&value_alg, 2, 0, 1)?.element_mul(&prod)
            },
            move |_, _| Ok(zero_w.clone()),
        );
        let err = tl.linearize(&LinearizeConfig::default()).unwrap_err();
        assert_eq!(stage_of(err), PipelineStage::EntrywiseStructure);
    }

    #[test]
    fn shifting_by_the_map_itself_kills_it() {
        let alg = three_atoms();
        let mut rng = sample::rng(77);
        let d = sample::matrix_derivation(&mut rng, &alg, 2);
        let tl = MatrixTwoLocal::from_derivation(&d);
        let shifted = tl.shifted(&d).unwrap();
        for _ in 0..10 {
            let x = sample::matrix(&mut rng, &alg, 2);
            assert!(shifted.value(&x).unwrap().is_zero());
            shifted.certify_pair(&x, &x).unwrap();
        }
    }

    #[test]
    fn matrix_map_mask_equivariance() {
        let alg = three_atoms();
        let mut rng = sample::rng(13);
        let d = sample::matrix_derivation(&mut rng, &alg, 2);
        let tl = MatrixTwoLocal::from_derivation(&d);
        for _ in 0..20 {
            let x = sample::matrix(&mut rng, &alg, 2);
            let e = sample::idempotent(&mut rng, &alg);
            assert!(tl.mask_equivariant(&e, &x).unwrap());
        }
    }
}
