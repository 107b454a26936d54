//! Finite spectral triples: validation, graded products and perturbations.
//!
//! A triple is stored concretely: the algebra is a list of matrices spanning
//! it, the Dirac operator and grading are matrices on the same space, and the
//! real structure is `J = J₀ ∘ (entrywise conjugation)`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::matrix::{
    c, commutator, ensure_square, hermiticity_residual, identity, kron, op_norm, CMatrix,
};
use crate::report::CheckResult;
use crate::sample::{random_complex, random_hermitian};

pub const SELF_ADJOINT_TOL: f64 = 1e-10;
pub const GRADING_TOL: f64 = 1e-12;
pub const ALGEBRA_TOL: f64 = 1e-10;

/// Real structure `J = J₀ ∘ K` with `K` entrywise complex conjugation.
#[derive(Clone, Debug, PartialEq)]
pub struct RealStructure {
    pub j0: CMatrix,
}

impl RealStructure {
    pub fn apply(&self, v: &CMatrix) -> CMatrix {
        &self.j0 * v.map(|z| z.conj())
    }

    /// `J² = J₀ J̄₀`.
    pub fn square(&self) -> CMatrix {
        &self.j0 * self.j0.map(|z| z.conj())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSpectralTriple {
    hilbert_dim: usize,
    algebra_basis: Vec<CMatrix>,
    dirac: CMatrix,
    grading: Option<CMatrix>,
    real_structure: Option<RealStructure>,
    base_indices: Option<Vec<usize>>,
}

impl FiniteSpectralTriple {
    /// Assemble a triple. Only shapes are checked here; the analytic
    /// conditions are reported by [`validate`].
    pub fn new(algebra_basis: Vec<CMatrix>, dirac: CMatrix) -> Result<Self> {
        let n = ensure_square(&dirac)?;
        if algebra_basis.is_empty() {
            return Err(Error::InvalidArgument("algebra basis is empty".into()));
        }
        for a in &algebra_basis {
            check_dim(a, n, "algebra element")?;
        }
        Ok(Self {
            hilbert_dim: n,
            algebra_basis,
            dirac,
            grading: None,
            real_structure: None,
            base_indices: None,
        })
    }

    pub fn with_grading(mut self, grading: CMatrix) -> Result<Self> {
        check_dim(&grading, self.hilbert_dim, "grading")?;
        self.grading = Some(grading);
        Ok(self)
    }

    pub fn with_real_structure(mut self, j0: CMatrix) -> Result<Self> {
        check_dim(&j0, self.hilbert_dim, "real structure")?;
        self.real_structure = Some(RealStructure { j0 });
        Ok(self)
    }

    /// Mark a sub-list of the algebra basis as the base subalgebra used by the
    /// first-order condition.
    pub fn with_base(mut self, indices: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.algebra_basis.len()) {
            return Err(Error::InvalidArgument(format!(
                "base index {bad} out of range for {} basis elements",
                self.algebra_basis.len()
            )));
        }
        self.base_indices = Some(indices);
        Ok(self)
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    pub fn algebra_basis(&self) -> &[CMatrix] {
        &self.algebra_basis
    }

    pub fn dirac(&self) -> &CMatrix {
        &self.dirac
    }

    pub fn grading(&self) -> Option<&CMatrix> {
        self.grading.as_ref()
    }

    pub fn real_structure(&self) -> Option<&RealStructure> {
        self.real_structure.as_ref()
    }

    pub fn base_indices(&self) -> Option<&[usize]> {
        self.base_indices.as_deref()
    }

    pub fn is_even(&self) -> bool {
        self.grading.is_some()
    }

    pub fn dirac_squared(&self) -> CMatrix {
        &self.dirac * &self.dirac
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&TripleDocument::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TripleDocument = serde_json::from_str(text)?;
        doc.try_into()
    }

    /// Random even triple on `ℂ^{2·half_dim}`: γ = diag(1, …, −1, …), an odd
    /// Hermitian Dirac operator, and the diagonal algebra.
    pub fn random_even<R: Rng + ?Sized>(half_dim: usize, r: &mut R) -> Result<Self> {
        let n = 2 * half_dim;
        let b = random_complex(half_dim, r);
        let mut d = CMatrix::zeros(n, n);
        d.view_mut((0, half_dim), (half_dim, half_dim)).copy_from(&b);
        d.view_mut((half_dim, 0), (half_dim, half_dim))
            .copy_from(&b.adjoint());
        let gamma = CMatrix::from_fn(n, n, |i, j| match (i == j, i < half_dim) {
            (true, true) => c(1.0, 0.0),
            (true, false) => c(-1.0, 0.0),
            _ => c(0.0, 0.0),
        });
        Self::new(diagonal_units(n), d)?.with_grading(gamma)
    }

    /// Random ungraded triple on `ℂ^dim` with the diagonal algebra.
    pub fn random_odd<R: Rng + ?Sized>(dim: usize, r: &mut R) -> Result<Self> {
        Self::new(diagonal_units(dim), random_hermitian(dim, r))
    }
}

fn diagonal_units(n: usize) -> Vec<CMatrix> {
    (0..n).map(|i| crate::matrix::unit(n, i, i)).collect()
}

fn check_dim(m: &CMatrix, n: usize, what: &str) -> Result<()> {
    if m.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "{what} has shape {:?}, Hilbert space has dimension {n}",
            m.shape()
        )));
    }
    Ok(())
}

/// Orthogonal projection onto the span of a list of matrices.
struct SpanProjector {
    orthonormal: Vec<CMatrix>,
}

impl SpanProjector {
    fn new(basis: &[CMatrix]) -> Self {
        let mut orthonormal: Vec<CMatrix> = Vec::new();
        for b in basis {
            let mut v = b.clone();
            // Two passes of Gram–Schmidt for stability.
            for _ in 0..2 {
                for q in &orthonormal {
                    let coeff: num_complex::Complex64 =
                        q.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
                    v -= q * coeff;
                }
            }
            let norm = v.norm();
            if norm > 1e-12 * b.norm().max(1.0) {
                orthonormal.push(v / c(norm, 0.0));
            }
        }
        Self { orthonormal }
    }

    /// `‖x − P x‖` in the Frobenius norm.
    fn residual(&self, x: &CMatrix) -> f64 {
        let mut v = x.clone();
        for q in &self.orthonormal {
            let coeff: num_complex::Complex64 =
                q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            v -= q * coeff;
        }
        v.norm()
    }
}

/// Run every structural check on a triple. Failures are report entries, never
/// errors. The `commutator_square_in_algebra` row is informational and does not
/// count towards [`ValidationReport::passed`].
pub fn validate(t: &FiniteSpectralTriple) -> ValidationReport {
    let mut rows = Vec::new();
    let mut optional = Vec::new();
    let d = &t.dirac;
    let n = t.hilbert_dim;
    let span = SpanProjector::new(&t.algebra_basis);

    rows.push(CheckResult::at_most(
        "dirac_self_adjoint",
        op_norm(&(d - d.adjoint())),
        SELF_ADJOINT_TOL,
    ));
    rows.push(CheckResult::at_most(
        "algebra_contains_identity",
        span.residual(&identity(n)),
        ALGEBRA_TOL,
    ));
    let adjoint_closed = t
        .algebra_basis
        .iter()
        .map(|a| span.residual(&a.adjoint()))
        .fold(0.0, f64::max);
    rows.push(CheckResult::at_most(
        "algebra_adjoint_closed",
        adjoint_closed,
        ALGEBRA_TOL,
    ));

    if let Some(g) = &t.grading {
        let involution = op_norm(&(g * g - identity(n))).max(op_norm(&(g - g.adjoint())));
        rows.push(CheckResult::at_most(
            "grading_involution",
            involution,
            GRADING_TOL,
        ));
        rows.push(CheckResult::at_most(
            "grading_anticommutes_dirac",
            op_norm(&(g * d + d * g)),
            SELF_ADJOINT_TOL,
        ));
        let even_algebra = t
            .algebra_basis
            .iter()
            .map(|a| op_norm(&commutator(g, a)))
            .fold(0.0, f64::max);
        rows.push(CheckResult::at_most(
            "grading_commutes_algebra",
            even_algebra,
            SELF_ADJOINT_TOL,
        ));
    }

    if let Some(base) = &t.base_indices {
        let mut worst = 0.0f64;
        for &bi in base {
            let db = commutator(d, &t.algebra_basis[bi]);
            for a in &t.algebra_basis {
                worst = worst.max(op_norm(&commutator(&db, a)));
            }
        }
        rows.push(CheckResult::at_most("first_order", worst, ALGEBRA_TOL));
    }

    if let Some(j) = &t.real_structure {
        let unitary = op_norm(&(j.j0.adjoint() * &j.j0 - identity(n)));
        rows.push(CheckResult::at_most(
            "real_structure_antiunitary",
            unitary,
            SELF_ADJOINT_TOL,
        ));
        let sq = j.square();
        let sign = op_norm(&(&sq - identity(n))).min(op_norm(&(&sq + identity(n))));
        rows.push(CheckResult::at_most(
            "real_structure_square_sign",
            sign,
            SELF_ADJOINT_TOL,
        ));
    }

    let closure = t
        .algebra_basis
        .iter()
        .map(|a| {
            let da = commutator(d, a);
            span.residual(&(&da * &da))
        })
        .fold(0.0, f64::max);
    optional.push(CheckResult::at_most(
        "commutator_square_in_algebra",
        closure,
        ALGEBRA_TOL,
    ));

    ValidationReport { rows, optional }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    /// Contract-bearing checks.
    pub rows: Vec<CheckResult>,
    /// Informational checks.
    pub optional: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.rows
            .iter()
            .chain(self.optional.iter())
            .find(|r| r.check_name == name)
    }
}

/// Graded product of an even triple with an arbitrary one:
/// `D = D_M ⊗ 1 + γ_M ⊗ D_F`.
pub fn product(
    tm: &FiniteSpectralTriple,
    tf: &FiniteSpectralTriple,
) -> Result<FiniteSpectralTriple> {
    let gm = tm.grading.as_ref().ok_or(Error::MissingGrading)?;
    let id_f = identity(tf.hilbert_dim);
    let dirac = kron(&tm.dirac, &id_f) + kron(gm, &tf.dirac);
    let algebra = tm
        .algebra_basis
        .iter()
        .flat_map(|a| tf.algebra_basis.iter().map(move |b| kron(a, b)))
        .collect();
    let mut out = FiniteSpectralTriple::new(algebra, dirac)?;
    if let Some(gf) = &tf.grading {
        out = out.with_grading(kron(gm, gf))?;
    }
    if let (Some(jm), Some(jf)) = (&tm.real_structure, &tf.real_structure) {
        out = out.with_real_structure(kron(&jm.j0, &jf.j0))?;
    }
    if let (Some(bm), Some(bf)) = (&tm.base_indices, &tf.base_indices) {
        let nf = tf.algebra_basis.len();
        let idx = bm
            .iter()
            .flat_map(|&i| bf.iter().map(move |&j| i * nf + j))
            .collect();
        out = out.with_base(idx)?;
    }
    Ok(out)
}

/// `‖D² − D_M² ⊗ 1 − 1 ⊗ D_F²‖` for the product triple.
pub fn product_square_residual(
    tm: &FiniteSpectralTriple,
    tf: &FiniteSpectralTriple,
) -> Result<f64> {
    let p = product(tm, tf)?;
    let expected = kron(&tm.dirac_squared(), &identity(tf.hilbert_dim))
        + kron(&identity(tm.hilbert_dim), &tf.dirac_squared());
    Ok(op_norm(&(p.dirac_squared() - expected)))
}

/// Replace `D` by `D + A`. `A` must be Hermitian, and odd when the triple is
/// graded. Returns the perturbed triple with its validation report.
pub fn perturb(
    t: &FiniteSpectralTriple,
    a: &CMatrix,
) -> Result<(FiniteSpectralTriple, ValidationReport)> {
    check_dim(a, t.hilbert_dim, "perturbation")?;
    let r = hermiticity_residual(a);
    if r > SELF_ADJOINT_TOL {
        return Err(Error::NotHermitian(r));
    }
    if let Some(g) = &t.grading {
        if op_norm(&(g * a + a * g)) > SELF_ADJOINT_TOL {
            return Err(Error::InvalidArgument(
                "perturbation must be odd with respect to the grading".into(),
            ));
        }
    }
    let mut out = t.clone();
    out.dirac += a;
    let report = validate(&out);
    Ok((out, report))
}

/// Row-major nested arrays of `[re, im]`.
pub type MatrixDoc = Vec<Vec<[f64; 2]>>;

pub fn to_doc(m: &CMatrix) -> MatrixDoc {
    m.row_iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn from_doc(doc: &MatrixDoc) -> Result<CMatrix> {
    let rows = doc.len();
    let cols = doc.first().map_or(0, Vec::len);
    if doc.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidArgument("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_row_iterator(
        rows,
        cols,
        doc.iter().flatten().map(|&[re, im]| c(re, im)),
    ))
}

/// JSON form of a triple. Matrices are row-major nested arrays of `[re, im]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleDocument {
    pub hilbert_dim: usize,
    pub algebra_basis: Vec<MatrixDoc>,
    #[serde(rename = "D")]
    pub dirac: MatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<MatrixDoc>,
    #[serde(rename = "J0", default, skip_serializing_if = "Option::is_none")]
    pub j0: Option<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_indices: Option<Vec<usize>>,
}

impl From<&FiniteSpectralTriple> for TripleDocument {
    fn from(t: &FiniteSpectralTriple) -> Self {
        Self {
            hilbert_dim: t.hilbert_dim,
            algebra_basis: t.algebra_basis.iter().map(to_doc).collect(),
            dirac: to_doc(&t.dirac),
            gamma: t.grading.as_ref().map(to_doc),
            j0: t.real_structure.as_ref().map(|j| to_doc(&j.j0)),
            base_indices: t.base_indices.clone(),
        }
    }
}

impl TryFrom<TripleDocument> for FiniteSpectralTriple {
    type Error = Error;

    fn try_from(doc: TripleDocument) -> Result<Self> {
        let basis = doc
            .algebra_basis
            .iter()
            .map(from_doc)
            .collect::<Result<Vec<_>>>()?;
        let mut t = FiniteSpectralTriple::new(basis, from_doc(&doc.dirac)?)?;
        if t.hilbert_dim != doc.hilbert_dim {
            return Err(Error::DimensionMismatch(format!(
                "hilbert_dim {} but D is {}x{}",
                doc.hilbert_dim, t.hilbert_dim, t.hilbert_dim
            )));
        }
        if let Some(g) = &doc.gamma {
            t = t.with_grading(from_doc(g)?)?;
        }
        if let Some(j) = &doc.j0 {
            t = t.with_real_structure(from_doc(j)?)?;
        }
        if let Some(b) = doc.base_indices {
            t = t.with_base(b)?;
        }
        Ok(t)
    }
}

/// Product-decomposition study over seeded random pairs, for the CLI and the
/// acceptance suite. Returns the largest residual.
pub fn product_square_study(seed: u64, pairs: usize, max_dim: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 0..pairs {
        let mut r = crate::sample::stream(seed, k as u64);
        let half = r.random_range(1..=(max_dim / 2).max(1));
        let tm = FiniteSpectralTriple::random_even(half, &mut r)?;
        let tf = if r.random_bool(0.5) && max_dim >= 2 {
            FiniteSpectralTriple::random_even(r.random_range(1..=max_dim / 2), &mut r)?
        } else {
            FiniteSpectralTriple::random_odd(r.random_range(1..=max_dim), &mut r)?
        };
        worst = worst.max(product_square_residual(&tm, &tf)?);
    }
    Ok(worst)
}

/// Parameters echoed in report rows.
pub fn describe(t: &FiniteSpectralTriple) -> serde_json::Value {
    json!({
        "hilbert_dim": t.hilbert_dim,
        "algebra_dim": t.algebra_basis.len(),
        "even": t.is_even(),
        "real_structure": t.real_structure.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{diag, hermitian_eig, sigma_x, sigma_y, sigma_z, unit};
    use crate::sample::rng;
    use approx::assert_abs_diff_eq;

    fn two_point() -> FiniteSpectralTriple {
        FiniteSpectralTriple::new(vec![identity(2), sigma_z()], sigma_x())
            .unwrap()
            .with_grading(sigma_z())
            .unwrap()
    }

    #[test]
    fn two_point_triple_validates() {
        let report = validate(&two_point());
        assert!(report.passed(), "{report:#?}");
    }

    #[test]
    fn commuting_grading_fails_with_residual_two() {
        let t = FiniteSpectralTriple::new(vec![identity(2), sigma_z()], sigma_z())
            .unwrap()
            .with_grading(sigma_z())
            .unwrap();
        let report = validate(&t);
        let row = report.get("grading_anticommutes_dirac").unwrap();
        assert!(!row.passed);
        assert_abs_diff_eq!(row.residual, 2.0, epsilon = 1e-12);
        // The report is total: other checks are still present.
        assert!(report.get("algebra_adjoint_closed").unwrap().passed);
    }

    #[test]
    fn non_hermitian_dirac_residual_one() {
        let t = FiniteSpectralTriple::new(vec![identity(2)], unit(2, 0, 1)).unwrap();
        let row = validate(&t).get("dirac_self_adjoint").cloned().unwrap();
        assert!(!row.passed);
        assert_abs_diff_eq!(row.residual, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn algebra_closure_detected() {
        // Span of {1, E_12} is not closed under adjoints.
        let t = FiniteSpectralTriple::new(vec![identity(2), unit(2, 0, 1)], sigma_x()).unwrap();
        assert!(!validate(&t).get("algebra_adjoint_closed").unwrap().passed);
    }

    #[test]
    fn first_order_and_real_structure() {
        let t = two_point()
            .with_base(vec![0])
            .unwrap()
            .with_real_structure(identity(2))
            .unwrap();
        let report = validate(&t);
        assert!(report.get("first_order").unwrap().passed);
        assert!(report.get("real_structure_antiunitary").unwrap().passed);
        assert!(report.get("real_structure_square_sign").unwrap().passed);
        // With σ₃ in the base, [[D, σ₃], σ₃] ≠ 0.
        let t = two_point().with_base(vec![1]).unwrap();
        assert!(!validate(&t).get("first_order").unwrap().passed);
    }

    #[test]
    fn product_square_decomposes() {
        let mut r = rng(21);
        let tm = FiniteSpectralTriple::random_even(2, &mut r).unwrap();
        let tf = FiniteSpectralTriple::random_odd(3, &mut r).unwrap();
        assert!(product_square_residual(&tm, &tf).unwrap() <= 1e-12);
        let p = product(&tm, &tf).unwrap();
        assert!(validate(&p).passed());
    }

    #[test]
    fn product_with_zero_finite_dirac() {
        let mut r = rng(2);
        let tm = FiniteSpectralTriple::random_even(2, &mut r).unwrap();
        let tf = FiniteSpectralTriple::new(vec![identity(3)], crate::matrix::zeros(3)).unwrap();
        let p = product(&tm, &tf).unwrap();
        assert_eq!(p.dirac(), &kron(tm.dirac(), &identity(3)));
        let sm = hermitian_eig(tm.dirac()).unwrap().spectrum();
        let sp = hermitian_eig(p.dirac()).unwrap().spectrum();
        assert_eq!(sm.entries.len(), sp.entries.len());
        for (a, b) in sm.entries.iter().zip(&sp.entries) {
            assert_abs_diff_eq!(a.0, b.0, epsilon = 1e-10);
            assert_eq!(a.1 * 3, b.1);
        }
    }

    #[test]
    fn product_order_gives_equivalent_square_spectra() {
        let mut r = rng(8);
        let a = FiniteSpectralTriple::random_even(2, &mut r).unwrap();
        let b = FiniteSpectralTriple::random_even(1, &mut r).unwrap();
        let ab = hermitian_eig(&product(&a, &b).unwrap().dirac_squared()).unwrap();
        let ba = hermitian_eig(&product(&b, &a).unwrap().dirac_squared()).unwrap();
        for (x, y) in ab.values.iter().zip(&ba.values) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-10);
        }
    }

    #[test]
    fn product_requires_grading() {
        let mut r = rng(4);
        let odd = FiniteSpectralTriple::random_odd(2, &mut r).unwrap();
        assert!(matches!(product(&odd, &odd), Err(Error::MissingGrading)));
    }

    #[test]
    fn embedding_is_isometric() {
        let mut r = rng(6);
        let a = random_complex(3, &mut r);
        assert_abs_diff_eq!(op_norm(&kron(&identity(4), &a)), op_norm(&a), epsilon = 1e-12);
    }

    #[test]
    fn perturbation_examples() {
        let t = two_point();
        let (same, _) = perturb(&t, &crate::matrix::zeros(2)).unwrap();
        assert_eq!(same, t);
        let (p, report) = perturb(&t, &sigma_y()).unwrap();
        assert!(report.passed());
        assert_eq!(p.dirac(), &(sigma_x() + sigma_y()));
        assert!(perturb(&t, &sigma_z()).is_err());
        assert!(matches!(
            perturb(&t, &unit(2, 0, 1)),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let t = two_point()
            .with_base(vec![0, 1])
            .unwrap()
            .with_real_structure(diag(&[1.0, 1.0]))
            .unwrap();
        let text = t.to_json().unwrap();
        assert!(text.contains("\"D\""));
        let back = FiniteSpectralTriple::from_json(&text).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn json_rejects_inconsistent_dimension() {
        let text = r#"{"hilbert_dim": 3, "algebra_basis": [[[[1,0],[0,0]],[[0,0],[1,0]]]],
                       "D": [[[0,0],[1,0]],[[1,0],[0,0]]]}"#;
        assert!(FiniteSpectralTriple::from_json(text).is_err());
    }

    #[test]
    fn product_study_is_tight() {
        assert!(product_square_study(1, 20, 8).unwrap() <= 1e-12);
    }
}
