//! Square matrices over the regular algebra and their derivations.
//!
//! A matrix derivation is stored in split form `D(x) = [a, x] + delta(x)`
//! where `a` is a matrix, `delta` is a derivation of the base algebra acting
//! entrywise, and the commutator part is normalized so the (1,1) entry of
//! `a` vanishes on every atom. Under that normalization the split is unique,
//! which is what `decompose` recovers from a finite evaluation table.

use crate::algebra::{Algebra, RegularElement};
use crate::derivation::AbelianDerivation;
use crate::error::{EngineError, Result};
use crate::lattice::Idempotent;
use crate::linalg;
use crate::poly::VarId;
use crate::scalar::Scalar;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatrixElement {
    algebra: Algebra,
    n: usize,
    entries: Vec<RegularElement>,
}

impl MatrixElement {
    pub fn from_entries(algebra: &Algebra, n: usize, entries: Vec<RegularElement>) -> Result<Self> {
        if n == 0 {
            return Err(EngineError::BadDimension(n));
        }
        if entries.len() != n * n {
            return Err(EngineError::DimensionMismatch(entries.len(), n * n));
        }
        for e in &entries {
            algebra.check_same(e.algebra())?;
        }
        Ok(MatrixElement {
            algebra: algebra.clone(),
            n,
            entries,
        })
    }

    pub fn zero(algebra: &Algebra, n: usize) -> Result<Self> {
        Self::from_entries(algebra, n, vec![RegularElement::zero(algebra); n * n])
    }

    pub fn identity(algebra: &Algebra, n: usize) -> Result<Self> {
        let mut m = Self::zero(algebra, n)?;
        for i in 0..n {
            m.set(i, i, RegularElement::one(algebra));
        }
        Ok(m)
    }

    /// Matrix unit with 1 in row `i`, column `j` (0-based).
    pub fn unit(algebra: &Algebra, n: usize, i: usize, j: usize) -> Result<Self> {
        if i >= n || j >= n {
            return Err(EngineError::Invalid(format!(
                "unit index ({}, {}) out of range for dimension {}",
                i + 1,
                j + 1,
                n
            )));
        }
        let mut m = Self::zero(algebra, n)?;
        m.set(i, j, RegularElement::one(algebra));
        Ok(m)
    }

    /// Central embedding `f * identity`.
    pub fn central(algebra: &Algebra, n: usize, f: &RegularElement) -> Result<Self> {
        algebra.check_same(f.algebra())?;
        let mut m = Self::zero(algebra, n)?;
        for i in 0..n {
            m.set(i, i, f.clone());
        }
        Ok(m)
    }

    /// Diagonal of successive halvings `sum_i 2^-i e_ii`; its commutant is
    /// exactly the diagonal matrices.
    pub fn halving_diagonal(algebra: &Algebra, n: usize) -> Result<Self> {
        let mut m = Self::zero(algebra, n)?;
        for i in 0..n {
            m.set(
                i,
                i,
                RegularElement::from_scalar(algebra, Scalar::from_ratio(1, 1 << i)),
            );
        }
        Ok(m)
    }

    /// Sum of the superdiagonal units `sum_i e_{i,i+1}`; its commutant is
    /// the upper triangular matrices with constant diagonals.
    pub fn superdiagonal_shift(algebra: &Algebra, n: usize) -> Result<Self> {
        let mut m = Self::zero(algebra, n)?;
        for i in 0..n.saturating_sub(1) {
            m.set(i, i + 1, RegularElement::one(algebra));
        }
        Ok(m)
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &RegularElement {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RegularElement) {
        self.entries[i * self.n + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(RegularElement::is_zero)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        self.algebra.check_same(&other.algebra)?;
        if self.n != other.n {
            return Err(EngineError::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let entries = self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(MatrixElement {
            algebra: self.algebra.clone(),
            n: self.n,
            entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let entries = self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_>>()?;
        Ok(MatrixElement {
            algebra: self.algebra.clone(),
            n: self.n,
            entries,
        })
    }

    pub fn neg(&self) -> Self {
        MatrixElement {
            algebra: self.algebra.clone(),
            n: self.n,
            entries: self.entries.iter().map(RegularElement::neg).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = RegularElement::zero(&self.algebra);
                for k in 0..n {
                    let a = self.entry(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    let b = other.entry(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b)?)?;
                }
                entries.push(acc);
            }
        }
        Ok(MatrixElement {
            algebra: self.algebra.clone(),
            n,
            entries,
        })
    }

    pub fn scalar_mul(&self, c: &Scalar) -> Self {
        MatrixElement {
            algebra: self.algebra.clone(),
            n: self.n,
            entries: self.entries.iter().map(|e| e.scalar_mul(c)).collect(),
        }
    }

    /// Central scaling by an element of the base algebra.
    pub fn element_mul(&self, f: &RegularElement) -> Result<Self> {
        self.algebra.check_same(f.algebra())?;
        let entries = self
            .entries
            .iter()
            .map(|e| e.mul(f))
            .collect::<Result<_>>()?;
        Ok(MatrixElement {
            algebra: self.algebra.clone(),
            n: self.n,
            entries,
        })
    }

    /// Entrywise mask by a central idempotent.
    pub fn mask(&self, e: &Idempotent) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|x| x.mask(e))
            .collect::<Result<_>>()?;
        Ok(MatrixElement {
            algebra: self.algebra.clone(),
            n: self.n,
            entries,
        })
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.entry(i, j).is_zero()))
    }

    /// Constant entries as scalars; `None` when some entry is not a
    /// constant shared by every atom.
    pub fn constant_entries(&self) -> Option<Vec<Vec<Scalar>>> {
        let mut rows = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut row = Vec::with_capacity(self.n);
            for j in 0..self.n {
                let e = self.entry(i, j);
                let first = e.stalk(0).as_constant()?;
                for atom in 1..self.algebra.atom_count() {
                    if e.stalk(atom).as_constant()? != first {
                        return None;
                    }
                }
                row.push(first);
            }
            rows.push(row);
        }
        Some(rows)
    }
}

pub fn commutator(a: &MatrixElement, x: &MatrixElement) -> Result<MatrixElement> {
    a.mul(x)?.sub(&x.mul(a)?)
}

/// Derivation `x -> [inner, x] + center(x)` applied entrywise, with `inner`
/// normalized so its (1,1) entry vanishes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatrixDerivation {
    inner: MatrixElement,
    center: AbelianDerivation,
}

impl MatrixDerivation {
    pub fn new(inner: MatrixElement, center: AbelianDerivation) -> Result<Self> {
        inner.algebra().check_same(center.algebra())?;
        let corner = inner.entry(0, 0).clone();
        let inner = if corner.is_zero() {
            inner
        } else {
            // Subtracting a central matrix leaves the commutator action
            // unchanged and pins the normal form.
            let shift = MatrixElement::central(inner.algebra(), inner.dim(), &corner)?;
            inner.sub(&shift)?
        };
        Ok(MatrixDerivation { inner, center })
    }

    pub fn zero(algebra: &Algebra, n: usize) -> Result<Self> {
        Ok(MatrixDerivation {
            inner: MatrixElement::zero(algebra, n)?,
            center: AbelianDerivation::zero(algebra),
        })
    }

    pub fn from_center(algebra: &Algebra, n: usize, center: AbelianDerivation) -> Result<Self> {
        algebra.check_same(center.algebra())?;
        Ok(MatrixDerivation {
            inner: MatrixElement::zero(algebra, n)?,
            center,
        })
    }

    pub fn inner(&self) -> &MatrixElement {
        &self.inner
    }

    pub fn center(&self) -> &AbelianDerivation {
        &self.center
    }

    pub fn algebra(&self) -> &Algebra {
        self.inner.algebra()
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_zero() && self.center.is_zero()
    }

    pub fn apply(&self, x: &MatrixElement) -> Result<MatrixElement> {
        self.inner.check_compatible(x)?;
        let mut out = commutator(&self.inner, x)?;
        if !self.center.is_zero() {
            let n = x.dim();
            for i in 0..n {
                for j in 0..n {
                    let d = self.center.apply(x.entry(i, j))?;
                    if !d.is_zero() {
                        out.set(i, j, out.entry(i, j).add(&d)?);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        // Sums of normalized parts stay normalized.
        Ok(MatrixDerivation {
            inner: self.inner.add(&other.inner)?,
            center: self.center.add(&other.center)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(MatrixDerivation {
            inner: self.inner.sub(&other.inner)?,
            center: self.center.sub(&other.center)?,
        })
    }

    pub fn neg(&self) -> Self {
        MatrixDerivation {
            inner: self.inner.neg(),
            center: self.center.neg(),
        }
    }
}

impl fmt::Display for MatrixElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mat[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for MatrixDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "matder({}, {})", self.inner, self.center)
    }
}

/// Values of a matrix derivation on the canonical generators: every matrix
/// unit and every central variable generator.
#[derive(Clone, Debug)]
pub struct EvaluationTable {
    algebra: Algebra,
    n: usize,
    /// Row-major: value at the unit `e_ij`.
    unit_values: Vec<MatrixElement>,
    /// Value at `v * identity` per variable.
    center_values: Vec<MatrixElement>,
}

impl EvaluationTable {
    pub fn new(
        algebra: &Algebra,
        n: usize,
        unit_values: Vec<MatrixElement>,
        center_values: Vec<MatrixElement>,
    ) -> Result<Self> {
        if unit_values.len() != n * n {
            return Err(EngineError::DimensionMismatch(unit_values.len(), n * n));
        }
        if center_values.len() != algebra.nvars() {
            return Err(EngineError::DimensionMismatch(
                center_values.len(),
                algebra.nvars(),
            ));
        }
        for m in unit_values.iter().chain(center_values.iter()) {
            algebra.check_same(m.algebra())?;
            if m.dim() != n {
                return Err(EngineError::DimensionMismatch(m.dim(), n));
            }
        }
        Ok(EvaluationTable {
            algebra: algebra.clone(),
            n,
            unit_values,
            center_values,
        })
    }

    /// Tabulates a derivation on all generators.
    pub fn tabulate(d: &MatrixDerivation) -> Result<Self> {
        let algebra = d.algebra().clone();
        let n = d.dim();
        let mut unit_values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                unit_values.push(d.apply(&MatrixElement::unit(&algebra, n, i, j)?)?);
            }
        }
        let mut center_values = Vec::with_capacity(algebra.nvars());
        for v in 0..algebra.nvars() {
            let gen = MatrixElement::central(&algebra, n, &RegularElement::variable(&algebra, v)?)?;
            center_values.push(d.apply(&gen)?);
        }
        EvaluationTable::new(&algebra, n, unit_values, center_values)
    }

    pub fn unit_value(&self, i: usize, j: usize) -> &MatrixElement {
        &self.unit_values[i * self.n + j]
    }

    pub fn center_value(&self, v: VarId) -> &MatrixElement {
        &self.center_values[v]
    }
}

/// Recovers the unique normalized split from an evaluation table.
///
/// The commutator part comes from the first column of the values on the
/// units in the first column: `a_kl = D(e_l1)_k1`, which lands directly on
/// the representative with vanishing (1,1) entry. The central part reads
/// off `delta(v) = D(v*1)_11`. Every table entry is then re-evaluated
/// against the candidate; the first discrepancy is reported.
pub fn decompose(table: &EvaluationTable) -> Result<MatrixDerivation> {
    let algebra = &table.algebra;
    let n = table.n;
    let mut a = MatrixElement::zero(algebra, n)?;
    for l in 0..n {
        let col = table.unit_value(l, 0);
        for k in 0..n {
            a.set(k, l, col.entry(k, 0).clone());
        }
    }
    let mut values = Vec::with_capacity(algebra.nvars());
    for v in 0..algebra.nvars() {
        values.push((v, table.center_value(v).entry(0, 0).clone()));
    }
    let center = AbelianDerivation::with_values(algebra, &values)?;
    let candidate = MatrixDerivation::new(a, center)?;

    for i in 0..n {
        for j in 0..n {
            let unit = MatrixElement::unit(algebra, n, i, j)?;
            if &candidate.apply(&unit)? != table.unit_value(i, j) {
                return Err(EngineError::DecompositionResidual {
                    basis: format!("e_{}{}", i + 1, j + 1),
                });
            }
        }
    }
    for v in 0..algebra.nvars() {
        let gen = MatrixElement::central(algebra, n, &RegularElement::variable(algebra, v)?)?;
        if &candidate.apply(&gen)? != table.center_value(v) {
            return Err(EngineError::DecompositionResidual {
                basis: format!("{}*1", algebra.vars().name(v)),
            });
        }
    }
    Ok(candidate)
}

/// Kernel of `x -> [m, x]` for a matrix with constant scalar entries,
/// solved exactly over the scalars. Basis vectors come back as scalar
/// matrices. Because the matrix algebra is a free module over the base,
/// the same basis spans the commutant over the full algebra.
pub fn commutant_basis(m: &MatrixElement) -> Result<Vec<Vec<Vec<Scalar>>>> {
    let consts = m.constant_entries().ok_or(EngineError::NonConstantMatrix)?;
    let n = m.dim();
    // Row (r,s): entry (r,s) of [m, x] as a linear form in the unknowns
    // x_(u,v); the coefficient of x_(u,v) is m_ru [v=s] - m_vs [u=r].
    let mut rows = Vec::with_capacity(n * n);
    for r in 0..n {
        for s in 0..n {
            let mut row = vec![Scalar::zero(); n * n];
            for u in 0..n {
                for v in 0..n {
                    let mut c = Scalar::zero();
                    if v == s {
                        c = &c + &consts[r][u];
                    }
                    if u == r {
                        c = &c - &consts[v][s];
                    }
                    row[u * n + v] = c;
                }
            }
            rows.push(row);
        }
    }
    let basis = linalg::kernel_basis(rows, Scalar::zero(), Scalar::one());
    Ok(basis
        .into_iter()
        .map(|flat| {
            (0..n)
                .map(|u| (0..n).map(|v| flat[u * n + v].clone()).collect())
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use crate::scalar::rational;

    fn alg() -> Algebra {
        Algebra::build(vec![rational(1, 1)], &["t", "s"]).unwrap()
    }

    fn alg2() -> Algebra {
        Algebra::build(vec![rational(1, 2), rational(1, 2)], &["t", "s"]).unwrap()
    }

    fn unit(a: &Algebra, n: usize, i: usize, j: usize) -> MatrixElement {
        MatrixElement::unit(a, n, i, j).unwrap()
    }

    #[test]
    fn unit_calculus() {
        let a = alg();
        let e11 = unit(&a, 2, 0, 0);
        let e12 = unit(&a, 2, 0, 1);
        let e21 = unit(&a, 2, 1, 0);
        let e22 = unit(&a, 2, 1, 1);
        assert_eq!(e11.mul(&e12).unwrap(), e12);
        assert!(e12.mul(&e11).unwrap().is_zero());
        assert_eq!(e12.mul(&e21).unwrap(), e11);
        assert_eq!(e11.add(&e22).unwrap(), MatrixElement::identity(&a, 2).unwrap());
        assert_eq!(commutator(&e12, &e11).unwrap(), e12.neg());
    }

    #[test]
    fn inner_derivation_on_units() {
        // D = [e_12, .] sends e_21 to e_11 - e_22.
        let a = alg();
        let d = MatrixDerivation::new(unit(&a, 2, 0, 1), AbelianDerivation::zero(&a)).unwrap();
        let expected = unit(&a, 2, 0, 0).sub(&unit(&a, 2, 1, 1)).unwrap();
        assert_eq!(d.apply(&unit(&a, 2, 1, 0)).unwrap(), expected);
    }

    #[test]
    fn entrywise_center_action() {
        let a = alg();
        let ddt = AbelianDerivation::with_values(&a, &[(0, RegularElement::one(&a))]).unwrap();
        let d = MatrixDerivation::from_center(&a, 2, ddt).unwrap();
        let t = RegularElement::variable(&a, 0).unwrap();
        let x = unit(&a, 2, 0, 1).element_mul(&t).unwrap();
        assert_eq!(d.apply(&x).unwrap(), unit(&a, 2, 0, 1));
        // central parts kill the units themselves
        assert!(d.apply(&unit(&a, 2, 1, 0)).unwrap().is_zero());
    }

    #[test]
    fn normalization_pins_corner() {
        let a = alg();
        let mut m = unit(&a, 2, 0, 1);
        let t = RegularElement::variable(&a, 0).unwrap();
        m.set(0, 0, t.clone());
        m.set(1, 1, t.mul(&t).unwrap());
        let d = MatrixDerivation::new(m, AbelianDerivation::zero(&a)).unwrap();
        assert!(d.inner().entry(0, 0).is_zero());
        // the normalized representative acts identically
        let x = unit(&a, 2, 1, 0);
        let mut raw = unit(&a, 2, 0, 1);
        raw.set(0, 0, t.clone());
        raw.set(1, 1, t.mul(&t).unwrap());
        assert_eq!(d.apply(&x).unwrap(), commutator(&raw, &x).unwrap());
    }

    #[test]
    fn leibniz_on_matrices() {
        let a = alg2();
        let mut rng = sample::rng(31);
        for n in [2usize, 3] {
            for _ in 0..60 {
                let d = sample::matrix_derivation(&mut rng, &a, n);
                let x = sample::matrix(&mut rng, &a, n);
                let y = sample::matrix(&mut rng, &a, n);
                let lhs = d.apply(&x.mul(&y).unwrap()).unwrap();
                let rhs = d
                    .apply(&x)
                    .unwrap()
                    .mul(&y)
                    .unwrap()
                    .add(&x.mul(&d.apply(&y).unwrap()).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
                let add_lhs = d.apply(&x.add(&y).unwrap()).unwrap();
                let add_rhs = d.apply(&x).unwrap().add(&d.apply(&y).unwrap()).unwrap();
                assert_eq!(add_lhs, add_rhs);
            }
        }
    }

    #[test]
    fn decompose_round_trip() {
        let a = alg2();
        let mut rng = sample::rng(41);
        for n in [2usize, 3] {
            for _ in 0..30 {
                let d = sample::matrix_derivation(&mut rng, &a, n);
                let table = EvaluationTable::tabulate(&d).unwrap();
                let rec = decompose(&table).unwrap();
                assert_eq!(rec, d);
            }
        }
    }

    #[test]
    fn decompose_zero_and_central_shift() {
        let a = alg();
        let z = MatrixDerivation::zero(&a, 2).unwrap();
        let rec = decompose(&EvaluationTable::tabulate(&z).unwrap()).unwrap();
        assert!(rec.is_zero());
        // Adding a central matrix to the inner part does not change the
        // derivation; decompose recovers the normalized representative.
        let t = RegularElement::variable(&a, 0).unwrap();
        let mut m = unit(&a, 2, 0, 1);
        m.set(0, 0, t.clone());
        m.set(1, 1, t.clone());
        let d = MatrixDerivation::new(m, AbelianDerivation::zero(&a)).unwrap();
        let rec = decompose(&EvaluationTable::tabulate(&d).unwrap()).unwrap();
        assert_eq!(rec, d);
        assert!(rec.inner().entry(0, 0).is_zero());
        assert_eq!(rec.inner(), &unit(&a, 2, 0, 1));
    }

    #[test]
    fn decompose_rejects_non_derivation_table() {
        let a = alg();
        let d = MatrixDerivation::zero(&a, 2).unwrap();
        let mut table = EvaluationTable::tabulate(&d).unwrap();
        // Corrupt the value at e_12 with something no derivation produces
        // alongside the other zeros.
        table.unit_values[1] = unit(&a, 2, 0, 0);
        let err = decompose(&table);
        assert_eq!(
            err,
            Err(EngineError::DecompositionResidual {
                basis: "e_12".into()
            })
        );
    }

    #[test]
    fn masked_matrix() {
        let a = alg2();
        let atom0 = Idempotent::from_atoms(a.space(), &[0]).unwrap();
        let mut rng = sample::rng(43);
        let x = sample::matrix(&mut rng, &a, 2);
        let y = sample::matrix(&mut rng, &a, 2);
        let masked = x.mul(&y).unwrap().mask(&atom0).unwrap();
        let other = x.mask(&atom0).unwrap().mul(&y.mask(&atom0).unwrap()).unwrap();
        assert_eq!(masked, other, "masking by a central idempotent is multiplicative");
        assert!(x.mask(&Idempotent::bottom(a.space())).unwrap().is_zero());
    }

    #[test]
    fn halving_diagonal_commutant() {
        let a = alg();
        for n in 2..=4usize {
            let d = MatrixElement::halving_diagonal(&a, n).unwrap();
            let basis = commutant_basis(&d).unwrap();
            assert_eq!(basis.len(), n, "kernel dimension is n");
            for b in &basis {
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            assert!(b[i][j].is_zero(), "commutant of the halving diagonal is diagonal");
                        }
                    }
                }
            }
            // Spot check both directions over the algebra.
            let mut rng = sample::rng(59);
            let mut diag = MatrixElement::zero(&a, n).unwrap();
            for i in 0..n {
                diag.set(i, i, sample::element(&mut rng, &a));
            }
            assert!(commutator(&d, &diag).unwrap().is_zero());
            let nd = MatrixElement::unit(&a, n, 0, 1).unwrap();
            assert!(!commutator(&d, &nd).unwrap().is_zero());
        }
    }

    #[test]
    fn superdiagonal_shift_commutant() {
        let a = alg();
        for n in 2..=4usize {
            let q = MatrixElement::superdiagonal_shift(&a, n).unwrap();
            let basis = commutant_basis(&q).unwrap();
            assert_eq!(basis.len(), n, "kernel dimension is n");
            for b in &basis {
                // upper triangular with constant diagonals
                for i in 0..n {
                    for j in 0..n {
                        if j < i {
                            assert!(b[i][j].is_zero());
                        }
                        if i + 1 < n && j + 1 < n {
                            assert_eq!(b[i][j], b[i + 1][j + 1]);
                        }
                    }
                }
            }
            // Toeplitz upper-triangular matrices over the algebra commute.
            let mut rng = sample::rng(61);
            let mut toeplitz = MatrixElement::zero(&a, n).unwrap();
            let coeffs: Vec<RegularElement> =
                (0..n).map(|_| sample::element(&mut rng, &a)).collect();
            for i in 0..n {
                for j in i..n {
                    toeplitz.set(i, j, coeffs[j - i].clone());
                }
            }
            assert!(commutator(&q, &toeplitz).unwrap().is_zero());
            assert!(!commutator(&q, &MatrixElement::unit(&a, n, 0, 0).unwrap())
                .unwrap()
                .is_zero());
        }
    }

    #[test]
    fn derivation_sums() {
        let a = alg2();
        let mut rng = sample::rng(67);
        let d1 = sample::matrix_derivation(&mut rng, &a, 3);
        let d2 = sample::matrix_derivation(&mut rng, &a, 3);
        let x = sample::matrix(&mut rng, &a, 3);
        let lhs = d1.add(&d2).unwrap().apply(&x).unwrap();
        let rhs = d1.apply(&x).unwrap().add(&d2.apply(&x).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        let diff = d1.sub(&d1).unwrap();
        assert!(diff.is_zero());
    }

    #[test]
    fn dimension_checks() {
        let a = alg();
        let x2 = MatrixElement::identity(&a, 2).unwrap();
        let x3 = MatrixElement::identity(&a, 3).unwrap();
        assert_eq!(x2.add(&x3), Err(EngineError::DimensionMismatch(2, 3)));
        assert!(MatrixElement::unit(&a, 2, 2, 0).is_err());
        assert!(MatrixElement::zero(&a, 0).is_err());
    }
}
