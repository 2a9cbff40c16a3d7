//! Named acceptance checks covering the whole engine.
//!
//! Each check is one strategy behind a common trait, so every runner (the
//! integration test and the command line tool) iterates the same registry,
//! times each entry, and renders outcomes uniformly. Checks are exact: a
//! single failed comparison fails the check, and the two timed checks also
//! fail when they overrun their wall-clock budget.

use crate::algebra::{jacobian_independent, Algebra, RegularElement};
use crate::error::{EngineError, PipelineStage, Result};
use crate::lattice::Idempotent;
use crate::matrix::{commutant_basis, commutator, decompose, EvaluationTable, MatrixDerivation, MatrixElement};
use crate::sample;
use crate::scalar::{rational, Rational};
use crate::twolocal::{
    build_counterexample, AbelianTwoLocal, AdditivityReport, LinearizeConfig, MatrixTwoLocal,
};
use num::Zero;
use rand::Rng;
use std::time::{Duration, Instant};

/// One named acceptance criterion.
pub trait AcceptanceCheck: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    /// Wall-clock budget, when the criterion carries one.
    fn budget(&self) -> Option<Duration> {
        None
    }
    /// Runs the check; `Ok` carries a short result description.
    fn run(&self, seed: u64) -> Result<String>;
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

/// All checks, in reporting order.
pub fn registry() -> Vec<Box<dyn AcceptanceCheck>> {
    vec![
        Box::new(CounterexampleReproduction),
        Box::new(MatrixLinearization),
        Box::new(DecompositionRoundtrip),
        Box::new(CommutantForms),
        Box::new(IndependenceCriteria),
        Box::new(StructuralAxioms),
        Box::new(NegativePaths),
    ]
}

pub fn run_one(check: &dyn AcceptanceCheck, seed: u64) -> CheckOutcome {
    let start = Instant::now();
    let result = check.run(seed);
    let elapsed = start.elapsed();
    let (passed, detail) = match result {
        Ok(detail) => match check.budget() {
            Some(budget) if elapsed > budget => (
                false,
                format!(
                    "passed but overran the {:.0} s budget at {:.2} s",
                    budget.as_secs_f64(),
                    elapsed.as_secs_f64()
                ),
            ),
            _ => (true, detail),
        },
        Err(e) => (false, e.to_string()),
    };
    CheckOutcome {
        name: check.name(),
        passed,
        detail,
        elapsed,
    }
}

pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    registry()
        .iter()
        .map(|c| run_one(c.as_ref(), seed))
        .collect()
}

pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}

pub fn render_line(o: &CheckOutcome, machine: bool) -> String {
    if machine {
        format!(
            "check={} status={} elapsed_ms={} detail={}",
            o.name,
            if o.passed { "ok" } else { "fail" },
            o.elapsed.as_millis(),
            o.detail
        )
    } else {
        format!(
            "{} {:<28} ({:>6.2} s) {}",
            if o.passed { "ok  " } else { "FAIL" },
            o.name,
            o.elapsed.as_secs_f64(),
            o.detail
        )
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(EngineError::Invalid(msg.into()))
    }
}

fn uniform_algebra(atoms: usize) -> Result<Algebra> {
    Algebra::build(vec![rational(1, atoms as i64); atoms], &["t", "s"])
}

struct CounterexampleReproduction;

impl AcceptanceCheck for CounterexampleReproduction {
    fn name(&self) -> &'static str {
        "counterexample-reproduction"
    }
    fn summary(&self) -> &'static str {
        "homogeneous non-additive 2-local derivation on the two-variable algebra"
    }
    fn budget(&self) -> Option<Duration> {
        Some(Duration::from_secs(5))
    }
    fn run(&self, seed: u64) -> Result<String> {
        let alg = uniform_algebra(1)?;
        let tl = build_counterexample(&alg, 0, 1)?;
        let t = RegularElement::variable(&alg, 0)?;
        let s = RegularElement::variable(&alg, 1)?;
        let one = RegularElement::one(&alg);
        ensure(tl.value(&t)? == one, "value at t is not 1")?;
        ensure(tl.value(&s)? == one, "value at s is not 1")?;
        ensure(tl.value(&t.add(&s)?)?.is_zero(), "value at t + s is not 0")?;

        let t2 = t.mul(&t)?;
        let s3 = s.mul(&s)?.mul(&s)?;
        for (x, y) in [(&t, &s), (&t, &t.add(&s)?), (&t2, &s3)] {
            tl.certify_pair(x, y)?;
        }
        let mut rng = sample::rng(seed);
        for _ in 0..200 {
            let x = sample::flavored_element(&mut rng, &alg);
            let y = sample::flavored_element(&mut rng, &alg);
            tl.certify_pair(&x, &y)?;
        }

        let mut rng = sample::rng(seed ^ 0x51D);
        for _ in 0..100 {
            let x = sample::flavored_element(&mut rng, &alg);
            let lambda = sample::scalar(&mut rng);
            ensure(
                tl.value(&x.scalar_mul(&lambda))? == tl.value(&x)?.scalar_mul(&lambda),
                "homogeneity fails",
            )?;
        }

        match tl.additivity_check(50, seed)? {
            AdditivityReport::Counterexample {
                x,
                y,
                sum_of_values,
                value_of_sum,
            } => {
                ensure(x == t && y == s, "unexpected counter-pair")?;
                ensure(
                    sum_of_values == RegularElement::from_integer(&alg, 2)
                        && value_of_sum.is_zero(),
                    "counter-pair values are not 2 and 0",
                )?;
            }
            AdditivityReport::Additive { .. } => {
                return Err(EngineError::Invalid(
                    "additivity check failed to find the counter-pair".into(),
                ))
            }
        }
        Ok("values (1, 1, 0) exact; 203 witnessed pairs certified; counter-pair (t, s) reported".into())
    }
}

struct MatrixLinearization;

impl AcceptanceCheck for MatrixLinearization {
    fn name(&self) -> &'static str {
        "matrix-linearization"
    }
    fn summary(&self) -> &'static str {
        "2-local derivations on matrix algebras linearize to exact derivations"
    }
    fn budget(&self) -> Option<Duration> {
        Some(Duration::from_secs(60))
    }
    fn run(&self, seed: u64) -> Result<String> {
        // 500 derivations total, every (dimension, atom count) combination
        // covered, each recovery verified on 200 fresh matrices.
        let plan: [(usize, usize, usize); 6] = [
            (2, 1, 100),
            (2, 2, 100),
            (3, 1, 100),
            (3, 2, 100),
            (4, 1, 50),
            (4, 2, 50),
        ];
        let mut rng = sample::rng(seed);
        let mut total = 0usize;
        for (n, atoms, cases) in plan {
            let alg = uniform_algebra(atoms)?;
            for _ in 0..cases {
                let d = sample::matrix_derivation(&mut rng, &alg, n);
                let tl = MatrixTwoLocal::from_derivation(&d);
                let cfg = LinearizeConfig {
                    seed: rng.gen(),
                    center_samples: 1,
                    probe_samples: 1,
                };
                let got = tl.linearize(&cfg)?;
                for _ in 0..200 {
                    let x = sample::matrix(&mut rng, &alg, n);
                    ensure(
                        got.apply(&x)? == d.apply(&x)?,
                        format!("recovered derivation disagrees (n = {n}, atoms = {atoms})"),
                    )?;
                }
                total += 1;
            }
        }
        Ok(format!(
            "{total} linearizations across n in {{2, 3, 4}} and 1..2 atoms, 200 fresh matrices each, exact"
        ))
    }
}

struct DecompositionRoundtrip;

impl AcceptanceCheck for DecompositionRoundtrip {
    fn name(&self) -> &'static str {
        "decomposition-roundtrip"
    }
    fn summary(&self) -> &'static str {
        "inner plus entrywise-central split recovered from an evaluation table"
    }
    fn run(&self, seed: u64) -> Result<String> {
        let mut rng = sample::rng(seed);
        let mut total = 0usize;
        for atoms in [1usize, 2] {
            let alg = uniform_algebra(atoms)?;
            for n in [2usize, 3] {
                for _ in 0..25 {
                    let d = sample::matrix_derivation(&mut rng, &alg, n);
                    let table = EvaluationTable::tabulate(&d)?;
                    let got = decompose(&table)?;
                    ensure(got == d, "decomposition does not reproduce the split")?;
                    total += 1;
                }
            }
        }
        Ok(format!("{total} normalized splits reconstructed exactly"))
    }
}

struct CommutantForms;

impl AcceptanceCheck for CommutantForms {
    fn name(&self) -> &'static str {
        "commutant-forms"
    }
    fn summary(&self) -> &'static str {
        "diagonal and shift commutants computed by exact elimination"
    }
    fn run(&self, seed: u64) -> Result<String> {
        let alg = uniform_algebra(2)?;
        let mut rng = sample::rng(seed);
        for n in 2..=4usize {
            let d = MatrixElement::halving_diagonal(&alg, n)?;
            let q = MatrixElement::superdiagonal_shift(&alg, n)?;

            // The commutant of the halving diagonal is exactly the diagonal
            // matrices: dimension n and every kernel vector diagonal.
            let basis = commutant_basis(&d)?;
            ensure(basis.len() == n, format!("diagonal commutant of size {n} has wrong dimension"))?;
            for m in &basis {
                for i in 0..n {
                    for j in 0..n {
                        ensure(
                            i == j || m[i][j].is_zero(),
                            "diagonal commutant contains a non-diagonal matrix",
                        )?;
                    }
                }
            }
            // Both directions over the algebra itself: any diagonal matrix
            // commutes, and any matrix with a nonzero off-diagonal entry
            // does not.
            for _ in 0..10 {
                let mut x = MatrixElement::zero(&alg, n)?;
                for i in 0..n {
                    x.set(i, i, sample::flavored_element(&mut rng, &alg));
                }
                ensure(
                    commutator(&d, &x)?.is_zero(),
                    "a diagonal matrix fails to commute with the halving diagonal",
                )?;
                let mut y = x.clone();
                y.set(0, 1, RegularElement::one(&alg));
                ensure(
                    !commutator(&d, &y)?.is_zero(),
                    "a non-diagonal matrix commutes with the halving diagonal",
                )?;
            }

            // The commutant of the shift is the upper triangular Toeplitz
            // matrices: dimension n, constant along superdiagonals, zero
            // below the diagonal.
            let basis = commutant_basis(&q)?;
            ensure(basis.len() == n, format!("shift commutant of size {n} has wrong dimension"))?;
            for m in &basis {
                for i in 0..n {
                    for j in 0..n {
                        if j < i {
                            ensure(
                                m[i][j].is_zero(),
                                "shift commutant contains a strictly lower entry",
                            )?;
                        }
                        if i + 1 < n && j + 1 < n {
                            ensure(
                                m[i][j] == m[i + 1][j + 1],
                                "shift commutant matrix is not Toeplitz",
                            )?;
                        }
                    }
                }
            }
            for _ in 0..10 {
                // c_0 I + c_1 S + ... + c_{n-1} S^{n-1} over the algebra.
                let coeffs: Vec<RegularElement> =
                    (0..n).map(|_| sample::flavored_element(&mut rng, &alg)).collect();
                let mut u = MatrixElement::zero(&alg, n)?;
                for i in 0..n {
                    for j in i..n {
                        u.set(i, j, coeffs[j - i].clone());
                    }
                }
                ensure(
                    commutator(&q, &u)?.is_zero(),
                    "an upper Toeplitz matrix fails to commute with the shift",
                )?;
            }
            let e11 = MatrixElement::unit(&alg, n, 0, 0)?;
            ensure(
                !commutator(&q, &e11)?.is_zero(),
                "e_11 commutes with the shift",
            )?;
        }
        Ok("kernel dimensions and shapes exact for n = 2, 3, 4".into())
    }
}

struct IndependenceCriteria;

impl AcceptanceCheck for IndependenceCriteria {
    fn name(&self) -> &'static str {
        "independence-criteria"
    }
    fn summary(&self) -> &'static str {
        "Jacobian independence idempotents on generators and random pairs"
    }
    fn run(&self, seed: u64) -> Result<String> {
        let alg = uniform_algebra(2)?;
        let t = RegularElement::variable(&alg, 0)?;
        let s = RegularElement::variable(&alg, 1)?;
        ensure(
            jacobian_independent(&[t.clone(), s.clone()])?.is_top(),
            "t, s must be independent everywhere",
        )?;
        ensure(
            jacobian_independent(&[t.clone(), t.mul(&t)?])?.is_bottom(),
            "t, t^2 must be dependent everywhere",
        )?;
        let mut rng = sample::rng(seed);
        for _ in 0..100 {
            let a = sample::flavored_element(&mut rng, &alg);
            let b = sample::flavored_element(&mut rng, &alg);
            let lhs = jacobian_independent(&[a.clone(), a.add(&b)?])?;
            let rhs = jacobian_independent(&[a, b])?;
            ensure(lhs == rhs, "independence is not invariant under the row operation")?;
        }
        Ok("generator instances exact; row-operation law on 100 pairs".into())
    }
}

struct StructuralAxioms;

impl AcceptanceCheck for StructuralAxioms {
    fn name(&self) -> &'static str {
        "structural-axioms"
    }
    fn summary(&self) -> &'static str {
        "regularity, Leibniz, support shrinking, metric axioms, mask equivariance"
    }
    fn run(&self, seed: u64) -> Result<String> {
        let algebras: Vec<Algebra> = (1..=3).map(uniform_algebra).collect::<Result<_>>()?;
        let mut rng = sample::rng(seed);

        // Regularity: a * pinv(a) * a = a.
        for k in 0..500 {
            let alg = &algebras[k % algebras.len()];
            let a = sample::flavored_element(&mut rng, alg);
            let p = a.pinv();
            ensure(a.mul(&p)?.mul(&a)? == a, "regularity identity fails")?;
        }

        // Leibniz and additivity for derivations on the algebra.
        for k in 0..500 {
            let alg = &algebras[k % algebras.len()];
            let d = sample::abelian_derivation(&mut rng, alg);
            let x = sample::flavored_element(&mut rng, alg);
            let y = sample::flavored_element(&mut rng, alg);
            let lhs = d.apply(&x.mul(&y)?)?;
            let rhs = d.apply(&x)?.mul(&y)?.add(&x.mul(&d.apply(&y)?)?)?;
            ensure(lhs == rhs, "Leibniz fails for an algebra derivation")?;
            ensure(
                d.apply(&x.add(&y)?)? == d.apply(&x)?.add(&d.apply(&y)?)?,
                "additivity fails for an algebra derivation",
            )?;
        }

        // Leibniz for matrix derivations.
        for k in 0..300 {
            let alg = &algebras[k % 2];
            let d = sample::matrix_derivation(&mut rng, alg, 2);
            let x = sample::matrix(&mut rng, alg, 2);
            let y = sample::matrix(&mut rng, alg, 2);
            let lhs = d.apply(&x.mul(&y)?)?;
            let rhs = d.apply(&x)?.mul(&y)?.add(&x.mul(&d.apply(&y)?)?)?;
            ensure(lhs == rhs, "Leibniz fails for a matrix derivation")?;
        }

        // Support shrinking: s(dx) <= s(x).
        for k in 0..500 {
            let alg = &algebras[k % algebras.len()];
            let d = sample::abelian_derivation(&mut rng, alg);
            let x = sample::flavored_element(&mut rng, alg);
            ensure(
                d.apply(&x)?.support().leq(&x.support())?,
                "derivation enlarges support",
            )?;
        }

        // Metric axioms for rho on 200 triples.
        for k in 0..200 {
            let alg = &algebras[k % algebras.len()];
            let x = sample::flavored_element(&mut rng, alg);
            let y = sample::flavored_element(&mut rng, alg);
            let z = sample::flavored_element(&mut rng, alg);
            let dxy = x.rho(&y)?;
            ensure(dxy >= Rational::zero(), "rho is negative")?;
            ensure((dxy == Rational::zero()) == (x == y), "rho separation fails")?;
            ensure(dxy == y.rho(&x)?, "rho is not symmetric")?;
            ensure(
                x.rho(&z)? <= dxy.clone() + y.rho(&z)?,
                "rho violates the triangle inequality",
            )?;
        }

        // Mask equivariance, exhaustive over all idempotents for small atom
        // counts, for each kind of constructed 2-local map.
        for atoms in 1..=3usize {
            let alg = uniform_algebra(atoms)?;
            let cex = build_counterexample(&alg, 0, 1)?;
            let ab = AbelianTwoLocal::from_derivation(&sample::abelian_derivation(&mut rng, &alg));
            let mat =
                MatrixTwoLocal::from_derivation(&sample::matrix_derivation(&mut rng, &alg, 2));
            for bits in 0..(1u64 << atoms) {
                let e = Idempotent::from_fn(alg.space(), |i| bits >> i & 1 == 1);
                for _ in 0..4 {
                    let x = sample::flavored_element(&mut rng, &alg);
                    ensure(
                        cex.mask_equivariant(&e, &x)?,
                        "counterexample map is not mask equivariant",
                    )?;
                    ensure(
                        ab.mask_equivariant(&e, &x)?,
                        "derivation map is not mask equivariant",
                    )?;
                    let m = sample::matrix(&mut rng, &alg, 2);
                    ensure(
                        mat.mask_equivariant(&e, &m)?,
                        "matrix map is not mask equivariant",
                    )?;
                }
            }
        }

        Ok("regularity 500, Leibniz 500 + 300, support 500, metric 200, masks exhaustive to 3 atoms".into())
    }
}

struct NegativePaths;

impl AcceptanceCheck for NegativePaths {
    fn name(&self) -> &'static str {
        "negative-paths"
    }
    fn summary(&self) -> &'static str {
        "adversarial maps and lying witnesses are rejected with named steps"
    }
    fn run(&self, _seed: u64) -> Result<String> {
        let alg = uniform_algebra(1)?;

        // A value map perturbed by the square of an entry: the constant
        // zero witness passes at the halving diagonal but not at the shift.
        let value_alg = alg.clone();
        let zero_w = MatrixDerivation::zero(&alg, 2)?;
        let w = zero_w.clone();
        let square = MatrixTwoLocal::from_fns(
            &alg,
            2,
            move |x| {
                let sq = x.entry(0, 1).mul(x.entry(0, 1))?;
                MatrixElement::unit(&value_alg, 2, 0, 1)?.element_mul(&sq)
            },
            move |_, _| Ok(w.clone()),
        );
        match square.linearize(&LinearizeConfig::default()) {
            Err(EngineError::Linearize { stage, .. }) => ensure(
                stage == PipelineStage::BasePair,
                format!("square adversary rejected at {stage}, expected the base pair stage"),
            )?,
            other => {
                return Err(EngineError::Invalid(format!(
                    "square adversary was not rejected with a named step: {other:?}"
                )))
            }
        }

        // A perturbation by the product of mirrored entries vanishes on the
        // base pair and all units; a generic probe exposes it.
        let value_alg = alg.clone();
        let w = zero_w.clone();
        let product = MatrixTwoLocal::from_fns(
            &alg,
            2,
            move |x| {
                let p = x.entry(0, 1).mul(x.entry(1, 0))?;
                MatrixElement::unit(&value_alg, 2, 0, 1)?.element_mul(&p)
            },
            move |_, _| Ok(w.clone()),
        );
        let product_stage = match product.linearize(&LinearizeConfig::default()) {
            Err(EngineError::Linearize { stage, .. }) => stage,
            other => {
                return Err(EngineError::Invalid(format!(
                    "product adversary was not rejected with a named step: {other:?}"
                )))
            }
        };
        ensure(
            product_stage == PipelineStage::EntrywiseStructure,
            format!("product adversary rejected at {product_stage}, expected the entrywise stage"),
        )?;

        // A lying witness is caught by direct re-evaluation.
        let honest = crate::derivation::AbelianDerivation::with_values(
            &alg,
            &[(0, RegularElement::one(&alg))],
        )?;
        let value_d = honest.clone();
        let zero_d = crate::derivation::AbelianDerivation::zero(&alg);
        let lying = AbelianTwoLocal::from_fns(
            &alg,
            move |x| value_d.apply(x),
            move |_, _| Ok(zero_d.clone()),
        );
        let t = RegularElement::variable(&alg, 0)?;
        let s = RegularElement::variable(&alg, 1)?;
        match lying.certify_pair(&t, &s) {
            Err(EngineError::WitnessMismatch { .. }) => {}
            other => {
                return Err(EngineError::Invalid(format!(
                    "lying witness was not rejected: {other:?}"
                )))
            }
        }

        Ok(format!(
            "square adversary fails at {}, product adversary at {}, lying witness rejected",
            PipelineStage::BasePair,
            product_stage
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_are_unique_and_ordered() {
        let checks = registry();
        assert_eq!(checks.len(), 7);
        let names: Vec<_> = checks.iter().map(|c| c.name()).collect();
        let mut sorted = names.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 7);
        assert_eq!(names[0], "counterexample-reproduction");
        assert!(names.contains(&"negative-paths"));
        for c in &checks {
            assert!(!c.summary().is_empty());
        }
    }

    #[test]
    fn render_lines_carry_status_and_timing() {
        let outcome = CheckOutcome {
            name: "independence-criteria",
            passed: true,
            detail: "all good".into(),
            elapsed: Duration::from_millis(1234),
        };
        let plain = render_line(&outcome, false);
        assert!(plain.starts_with("ok  "));
        assert!(plain.contains("independence-criteria"));
        assert!(plain.contains("1.23 s"));
        let machine = render_line(&outcome, true);
        assert_eq!(
            machine,
            "check=independence-criteria status=ok elapsed_ms=1234 detail=all good"
        );
        let failed = CheckOutcome {
            passed: false,
            ..outcome
        };
        assert!(render_line(&failed, false).starts_with("FAIL"));
        assert!(render_line(&failed, true).contains("status=fail"));
    }

    #[test]
    fn quick_checks_pass() {
        for check in registry() {
            if matches!(check.name(), "independence-criteria" | "commutant-forms") {
                let outcome = run_one(check.as_ref(), 5);
                assert!(outcome.passed, "{}: {}", outcome.name, outcome.detail);
            }
        }
    }

    #[test]
    fn budget_overrun_fails_the_check() {
        struct Sleepy;
        impl AcceptanceCheck for Sleepy {
            fn name(&self) -> &'static str {
                "sleepy"
            }
            fn summary(&self) -> &'static str {
                "sleeps past its budget"
            }
            fn budget(&self) -> Option<Duration> {
                Some(Duration::from_millis(1))
            }
            fn run(&self, _seed: u64) -> Result<String> {
                std::thread::sleep(Duration::from_millis(10));
                Ok("done".into())
            }
        }
        let outcome = run_one(&Sleepy, 0);
        assert!(!outcome.passed);
        assert!(outcome.detail.contains("budget"));
    }
}
