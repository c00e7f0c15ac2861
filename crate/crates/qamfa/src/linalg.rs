//! Dense complex vectors, matrices and projective measurements for the small
//! Hilbert spaces the verifier protocols use (dimension 2, 3 and 8).
//!
//! Everything is immutable after construction and safe to share across
//! concurrent analyses. Amplitudes are double-precision complex numbers; the
//! default comparison tolerance is 1e-9 and the validation tolerance 1e-12.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance used when validating unitarity and measurement structure.
pub const VALIDATION_TOL: f64 = 1e-12;
/// Default tolerance for normalization and probability checks.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Measurement branches below this probability are dropped.
pub const BRANCH_PRUNE: f64 = 1e-12;

/// A complex state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CVec {
    amps: Vec<Complex64>,
}

impl CVec {
    pub fn new(amps: Vec<Complex64>) -> Self {
        CVec { amps }
    }

    pub fn from_real(values: &[f64]) -> Self {
        CVec {
            amps: values.iter().map(|&re| Complex64::new(re, 0.0)).collect(),
        }
    }

    /// Computational basis state |index⟩ in the given dimension.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        CVec { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, i: usize) -> Complex64 {
        self.amps[i]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn scaled(&self, factor: f64) -> CVec {
        CVec {
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn normalized(&self) -> CVec {
        self.scaled(1.0 / self.norm())
    }

    /// Largest componentwise absolute difference to another vector.
    pub fn max_abs_diff(&self, other: &CVec) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &CVec, tol: f64) -> bool {
        self.dim() == other.dim() && self.max_abs_diff(other) <= tol
    }
}

/// A square complex matrix in row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    dim: usize,
    entries: Vec<Complex64>,
}

impl CMat {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Self {
        assert_eq!(entries.len(), dim * dim, "entry count must be dim^2");
        CMat { dim, entries }
    }

    /// Build from real row-major entries.
    pub fn from_real(dim: usize, rows: &[f64]) -> Self {
        assert_eq!(rows.len(), dim * dim);
        CMat {
            dim,
            entries: rows.iter().map(|&re| Complex64::new(re, 0.0)).collect(),
        }
    }

    /// Build from real row-major entries, multiplied by a global factor.
    pub fn from_real_scaled(dim: usize, factor: f64, rows: &[f64]) -> Self {
        assert_eq!(rows.len(), dim * dim);
        CMat {
            dim,
            entries: rows
                .iter()
                .map(|&re| Complex64::new(re * factor, 0.0))
                .collect(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        CMat { dim, entries }
    }

    /// Plane rotation by `theta` acting on basis directions (i, j), identity
    /// elsewhere: |i⟩ → cosθ|i⟩ + sinθ|j⟩, |j⟩ → −sinθ|i⟩ + cosθ|j⟩.
    pub fn plane_rotation(dim: usize, i: usize, j: usize, theta: f64) -> Self {
        let mut m = CMat::identity(dim);
        let (s, c) = theta.sin_cos();
        m.set(i, i, Complex64::new(c, 0.0));
        m.set(i, j, Complex64::new(-s, 0.0));
        m.set(j, i, Complex64::new(s, 0.0));
        m.set(j, j, Complex64::new(c, 0.0));
        m
    }

    /// Permutation swapping basis directions i and j.
    pub fn basis_swap(dim: usize, i: usize, j: usize) -> Self {
        let mut m = CMat::identity(dim);
        if i != j {
            m.set(i, i, Complex64::new(0.0, 0.0));
            m.set(j, j, Complex64::new(0.0, 0.0));
            m.set(i, j, Complex64::new(1.0, 0.0));
            m.set(j, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn dagger(&self) -> CMat {
        let d = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for c in 0..d {
                entries[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        CMat { dim: d, entries }
    }

    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim);
        let d = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..d {
                    entries[r * d + c] += a * rhs.entries[k * d + c];
                }
            }
        }
        CMat { dim: d, entries }
    }

    /// Largest |entry| of `self − other`.
    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Apply a matrix to a vector: returns U·v.
pub fn mat_apply(u: &CMat, v: &CVec) -> Result<CVec> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    let d = u.dim();
    let mut amps = vec![Complex64::new(0.0, 0.0); d];
    for r in 0..d {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in 0..d {
            acc += u.get(r, c) * v.amp(c);
        }
        amps[r] = acc;
    }
    Ok(CVec::new(amps))
}

/// True iff ‖U†U − I‖_max ≤ tol.
pub fn is_unitary(u: &CMat, tol: f64) -> bool {
    let product = u.dagger().mul(u);
    product.max_abs_diff(&CMat::identity(u.dim())) <= tol
}

/// One branch of a projective measurement: outcome index, Born probability and
/// the renormalized post-measurement state.
#[derive(Debug, Clone)]
pub struct Branch {
    pub outcome: usize,
    pub probability: f64,
    pub post_state: CVec,
}

/// A projective measurement: a labelled, complete, mutually orthogonal family
/// of projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement {
    outcomes: Vec<(String, CMat)>,
}

impl ProjectiveMeasurement {
    pub fn new(outcomes: Vec<(String, CMat)>) -> Self {
        assert!(!outcomes.is_empty(), "measurement needs at least one outcome");
        let dim = outcomes[0].1.dim();
        assert!(
            outcomes.iter().all(|(_, p)| p.dim() == dim),
            "projector dimensions must agree"
        );
        ProjectiveMeasurement { outcomes }
    }

    /// Projector onto the span of the given basis directions.
    pub fn basis_projector(dim: usize, directions: &[usize]) -> CMat {
        let mut m = CMat::identity(dim);
        for i in 0..dim {
            if !directions.contains(&i) {
                m.set(i, i, Complex64::new(0.0, 0.0));
            }
        }
        m
    }

    /// Full computational-basis measurement with labels `prefix0..prefixN`.
    pub fn computational(dim: usize, prefix: &str) -> Self {
        let outcomes = (0..dim)
            .map(|i| {
                (
                    format!("{prefix}{i}"),
                    Self::basis_projector(dim, &[i]),
                )
            })
            .collect();
        ProjectiveMeasurement::new(outcomes)
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].1.dim()
    }

    pub fn outcomes(&self) -> &[(String, CMat)] {
        &self.outcomes
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.outcomes.iter().map(|(l, _)| l.as_str())
    }

    /// Structural checks: each projector idempotent and Hermitian, the family
    /// complete and mutually orthogonal. Returns one message per violation.
    pub fn validate(&self, tol: f64) -> Vec<String> {
        let mut violations = Vec::new();
        let dim = self.dim();
        for (label, p) in &self.outcomes {
            if p.mul(p).max_abs_diff(p) > tol {
                violations.push(format!("projector {label} is not idempotent"));
            }
            if p.dagger().max_abs_diff(p) > tol {
                violations.push(format!("projector {label} is not Hermitian"));
            }
        }
        let mut sum = CMat::new(dim, vec![Complex64::new(0.0, 0.0); dim * dim]);
        for (_, p) in &self.outcomes {
            for (acc, e) in sum.entries.iter_mut().zip(p.entries().iter()) {
                *acc += e;
            }
        }
        if sum.max_abs_diff(&CMat::identity(dim)) > tol {
            violations.push("projectors do not sum to the identity".to_string());
        }
        let zero = CMat::new(dim, vec![Complex64::new(0.0, 0.0); dim * dim]);
        for i in 0..self.outcomes.len() {
            for j in (i + 1)..self.outcomes.len() {
                let prod = self.outcomes[i].1.mul(&self.outcomes[j].1);
                if prod.max_abs_diff(&zero) > tol {
                    violations.push(format!(
                        "projectors {} and {} are not orthogonal",
                        self.outcomes[i].0, self.outcomes[j].0
                    ));
                }
            }
        }
        violations
    }
}

/// Measure `v`, returning every branch with probability ≥ [`BRANCH_PRUNE`].
/// Branch probabilities follow the Born rule ‖P_i v‖² and post-states are
/// P_i v / ‖P_i v‖.
pub fn measure_branches(m: &ProjectiveMeasurement, v: &CVec) -> Result<Vec<Branch>> {
    if m.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: v.dim(),
        });
    }
    let mut branches = Vec::with_capacity(m.outcomes.len());
    for (idx, (_, projector)) in m.outcomes.iter().enumerate() {
        let projected = mat_apply(projector, v)?;
        let probability = projected.norm_sqr();
        if probability < BRANCH_PRUNE {
            continue;
        }
        branches.push(Branch {
            outcome: idx,
            probability,
            post_state: projected.scaled(1.0 / probability.sqrt()),
        });
    }
    Ok(branches)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u_a() -> CMat {
        CMat::from_real_scaled(3, 0.2, &[4.0, 3.0, 0.0, -3.0, 4.0, 0.0, 0.0, 0.0, 5.0])
    }

    fn u_b() -> CMat {
        CMat::from_real_scaled(3, 0.2, &[4.0, 0.0, 3.0, 0.0, 5.0, 0.0, -3.0, 0.0, 4.0])
    }

    #[test]
    fn mat_apply_rotates_basis_states() {
        let v = mat_apply(&u_a(), &CVec::basis(3, 0)).unwrap();
        assert!(v.approx_eq(&CVec::from_real(&[0.8, -0.6, 0.0]), 1e-15));

        let id = CMat::identity(3);
        let w = CVec::from_real(&[0.6, 0.0, 0.8]);
        assert!(mat_apply(&id, &w).unwrap().approx_eq(&w, 0.0));
    }

    #[test]
    fn mat_apply_dimension_mismatch() {
        let err = mat_apply(&CMat::identity(2), &CVec::basis(3, 0)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn unitarity_checks() {
        assert!(is_unitary(&u_a(), VALIDATION_TOL));
        assert!(is_unitary(&u_b(), VALIDATION_TOL));
        let p_f = ProjectiveMeasurement::basis_projector(8, &[0, 1, 2]);
        assert!(!is_unitary(&p_f, VALIDATION_TOL));
    }

    #[test]
    fn measurement_on_subspace_state_is_single_branch() {
        let m = ProjectiveMeasurement::new(vec![
            ("f".into(), ProjectiveMeasurement::basis_projector(8, &[0, 1, 2])),
            ("r".into(), ProjectiveMeasurement::basis_projector(8, &[3, 4, 5, 6, 7])),
        ]);
        let norm = 26.0f64.sqrt();
        let v = CVec::from_real(&[1.0 / norm, 5.0 / norm, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let branches = measure_branches(&m, &v).unwrap();
        assert_eq!(branches.len(), 1);
        assert_eq!(branches[0].outcome, 0);
        assert!((branches[0].probability - 1.0).abs() < 1e-12);
        assert!(branches[0].post_state.approx_eq(&v, 1e-12));
    }

    #[test]
    fn born_rule_on_basis_measurement() {
        let theta = 0.73f64;
        let m = ProjectiveMeasurement::computational(2, "q");
        let v = CVec::from_real(&[theta.cos(), theta.sin()]);
        let branches = measure_branches(&m, &v).unwrap();
        assert_eq!(branches.len(), 2);
        assert!((branches[0].probability - theta.cos().powi(2)).abs() < 1e-12);
        assert!((branches[1].probability - theta.sin().powi(2)).abs() < 1e-12);
        assert!(branches[0].post_state.approx_eq(&CVec::basis(2, 0), 1e-12));
        assert!(branches[1].post_state.approx_eq(&CVec::basis(2, 1), 1e-12));
    }

    #[test]
    fn forward_measurement_splits_encoded_state() {
        // State (1,1,0,2,0,0,0,0)/√6 splits into a 1/3 branch on span{0,1,2}
        // and a 2/3 branch collapsing onto basis direction 3.
        let m = ProjectiveMeasurement::new(vec![
            ("f".into(), ProjectiveMeasurement::basis_projector(8, &[0, 1, 2])),
            ("r".into(), ProjectiveMeasurement::basis_projector(8, &[3, 4, 5, 6, 7])),
        ]);
        let s6 = 6.0f64.sqrt();
        let v = CVec::from_real(&[1.0 / s6, 1.0 / s6, 0.0, 2.0 / s6, 0.0, 0.0, 0.0, 0.0]);
        let branches = measure_branches(&m, &v).unwrap();
        assert_eq!(branches.len(), 2);
        assert!((branches[0].probability - 1.0 / 3.0).abs() < 1e-12);
        let s2 = 2.0f64.sqrt();
        let f_post = CVec::from_real(&[1.0 / s2, 1.0 / s2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(branches[0].post_state.approx_eq(&f_post, 1e-12));
        assert!((branches[1].probability - 2.0 / 3.0).abs() < 1e-12);
        assert!(branches[1].post_state.approx_eq(&CVec::basis(8, 3), 1e-12));
    }

    #[test]
    fn projector_idempotence_on_post_states() {
        let m = ProjectiveMeasurement::new(vec![
            ("f".into(), ProjectiveMeasurement::basis_projector(8, &[0, 1, 2])),
            ("r".into(), ProjectiveMeasurement::basis_projector(8, &[3, 4, 5, 6, 7])),
        ]);
        let s6 = 6.0f64.sqrt();
        let v = CVec::from_real(&[1.0 / s6, 1.0 / s6, 0.0, 2.0 / s6, 0.0, 0.0, 0.0, 0.0]);
        for branch in measure_branches(&m, &v).unwrap() {
            let (_, projector) = &m.outcomes()[branch.outcome];
            let again = mat_apply(projector, &branch.post_state).unwrap();
            assert!(again.approx_eq(&branch.post_state, 1e-9));
        }
    }

    #[test]
    fn measurement_validation_catches_bad_families() {
        let p0 = ProjectiveMeasurement::basis_projector(2, &[0]);
        let incomplete = ProjectiveMeasurement::new(vec![("only".into(), p0.clone())]);
        assert!(!incomplete.validate(VALIDATION_TOL).is_empty());

        let overlapping = ProjectiveMeasurement::new(vec![
            ("a".into(), CMat::identity(2)),
            ("b".into(), p0),
        ]);
        let violations = overlapping.validate(VALIDATION_TOL);
        assert!(violations.iter().any(|v| v.contains("orthogonal")));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_unitary(dim: usize) -> impl Strategy<Value = CMat> {
            // Products of random plane rotations are unitary.
            proptest::collection::vec((0..dim, 0..dim, -3.2f64..3.2), 1..6).prop_map(
                move |rots| {
                    let mut m = CMat::identity(dim);
                    for (i, j, theta) in rots {
                        if i != j {
                            m = CMat::plane_rotation(dim, i.min(j), i.max(j), theta).mul(&m);
                        }
                    }
                    m
                },
            )
        }

        fn arb_state(dim: usize) -> impl Strategy<Value = CVec> {
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim..=dim).prop_filter_map(
                "nonzero state",
                |parts| {
                    let v = CVec::new(
                        parts
                            .into_iter()
                            .map(|(re, im)| Complex64::new(re, im))
                            .collect(),
                    );
                    if v.norm() > 1e-3 {
                        Some(v.normalized())
                    } else {
                        None
                    }
                },
            )
        }

        proptest! {
            #[test]
            fn unitaries_preserve_norm(u in arb_unitary(3), v in arb_state(3)) {
                let w = mat_apply(&u, &v).unwrap();
                prop_assert!((w.norm() - 1.0).abs() <= DEFAULT_TOL);
            }

            #[test]
            fn branch_probabilities_sum_to_one(v in arb_state(8)) {
                let m = ProjectiveMeasurement::new(vec![
                    ("f".into(), ProjectiveMeasurement::basis_projector(8, &[0, 1, 2])),
                    ("r".into(), ProjectiveMeasurement::basis_projector(8, &[3, 4, 5, 6, 7])),
                ]);
                let branches = measure_branches(&m, &v).unwrap();
                let total: f64 = branches.iter().map(|b| b.probability).sum();
                prop_assert!((total - 1.0).abs() <= DEFAULT_TOL);
                for b in &branches {
                    prop_assert!(b.post_state.is_normalized(DEFAULT_TOL));
                }
            }
        }
    }
}
