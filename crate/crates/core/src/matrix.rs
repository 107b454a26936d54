//! Dense complex linear algebra with optional ℤ₂-gradings.
//!
//! Everything in the crate is built on [`CMatrix`], a dense complex matrix.
//! [`GradedMatrix`] attaches a grading involution to a matrix when parity
//! matters (graded tensor products, even spectral triples).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest ‖scale·A‖₁ accepted by [`expm`] on the general path. Beyond this the
/// result can overflow `f64`.
pub const EXPM_NORM_CAP: f64 = 700.0;

/// Residual below which a grading counts as an involution.
pub const GRADING_TOL: f64 = 1e-12;

/// Hermiticity tolerance used by the preconditions of the spectral routines.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Relative tolerance for merging eigenvalues into a [`Spectrum`].
pub const SPECTRUM_MERGE_RTOL: f64 = 1e-8;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(n: usize) -> CMatrix {
    CMatrix::zeros(n, n)
}

/// Matrix from real row-major entries.
pub fn real(rows: usize, cols: usize, entries: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(rows, cols, entries.iter().map(|&x| c(x, 0.0)))
}

pub fn diag(entries: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        entries.len(),
        entries.iter().map(|&x| c(x, 0.0)),
    ))
}

/// Matrix unit `E_ij` in `Mat_n`.
pub fn unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = zeros(n);
    m[(i, j)] = ONE;
    m
}

pub fn sigma_x() -> CMatrix {
    real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn sigma_z() -> CMatrix {
    real(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

/// Lowering operator `|0⟩⟨1|`.
pub fn sigma_minus() -> CMatrix {
    real(2, 2, &[0.0, 1.0, 0.0, 0.0])
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

/// Operator (spectral) norm: the largest singular value.
pub fn op_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.singular_values().max()
}

/// Maximum absolute column sum.
pub fn norm_one(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// ‖A − A*‖ in the Frobenius norm.
pub fn hermiticity_residual(a: &CMatrix) -> f64 {
    (a - a.adjoint()).norm()
}

/// ‖U*U − 1‖ in the Frobenius norm.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    (u.adjoint() * u - identity(u.ncols())).norm()
}

pub fn ensure_square(a: &CMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

pub fn ensure_same_shape(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(())
}

pub fn ensure_hermitian(a: &CMatrix) -> Result<()> {
    ensure_square(a)?;
    let r = hermiticity_residual(a);
    if r > HERMITIAN_TOL * a.norm().max(1.0) {
        return Err(Error::NotHermitian(r));
    }
    Ok(())
}

/// Parity of an operator relative to a grading γ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    /// Classify `a` as even (γAγ = A), odd (γAγ = −A) or mixed.
    pub fn classify(a: &CMatrix, grading: &CMatrix, tol: f64) -> Parity {
        let conj = grading * a * grading;
        let scale = a.norm().max(1.0);
        if (&conj - a).norm() <= tol * scale {
            Parity::Even
        } else if (&conj + a).norm() <= tol * scale {
            Parity::Odd
        } else {
            Parity::Mixed
        }
    }

    /// ℤ₂ degree: 0 for even, 1 for odd.
    pub fn degree(self) -> Option<u8> {
        match self {
            Parity::Even => Some(0),
            Parity::Odd => Some(1),
            Parity::Mixed => None,
        }
    }
}

/// A square complex matrix together with an optional grading on its space.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedMatrix {
    data: CMatrix,
    grading: Option<CMatrix>,
    parity: Option<Parity>,
}

impl GradedMatrix {
    pub fn new(data: CMatrix) -> Result<Self> {
        ensure_square(&data)?;
        Ok(Self {
            data,
            grading: None,
            parity: None,
        })
    }

    /// Attach a grading. The grading must be a self-adjoint involution; the
    /// parity of `data` is classified against it.
    pub fn with_grading(data: CMatrix, grading: CMatrix) -> Result<Self> {
        let n = ensure_square(&data)?;
        if grading.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "grading {:?} on a {n}x{n} operator",
                grading.shape()
            )));
        }
        check_grading(&grading)?;
        let parity = Parity::classify(&data, &grading, GRADING_TOL);
        Ok(Self {
            data,
            grading: Some(grading),
            parity: Some(parity),
        })
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_data(self) -> CMatrix {
        self.data
    }

    pub fn grading(&self) -> Option<&CMatrix> {
        self.grading.as_ref()
    }

    pub fn parity(&self) -> Option<Parity> {
        self.parity
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }
}

/// Verify `γ² = 1` and `γ = γ*` to [`GRADING_TOL`].
pub fn check_grading(grading: &CMatrix) -> Result<()> {
    let n = ensure_square(grading)?;
    let inv = (grading * grading - identity(n)).norm();
    let sa = hermiticity_residual(grading);
    let r = inv.max(sa);
    if r > GRADING_TOL {
        return Err(Error::InvalidGrading(r));
    }
    Ok(())
}

/// Eigenvalues with multiplicities, ascending.
#[derive(Clone, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Spectrum {
    pub entries: Vec<(f64, usize)>,
}

impl Spectrum {
    /// Merge raw eigenvalues into a spectrum. Values within `rtol` (relative to
    /// the larger magnitude, floored at 1) of the running cluster are merged.
    pub fn from_values(values: &[f64], rtol: f64) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut entries: Vec<(f64, usize, f64)> = Vec::new();
        for v in sorted {
            match entries.last_mut() {
                Some((mean, mult, first)) if (v - *first).abs() <= rtol * v.abs().max(first.abs()).max(1.0) => {
                    *mean = (*mean * *mult as f64 + v) / (*mult as f64 + 1.0);
                    *mult += 1;
                }
                _ => entries.push((v, 1, v)),
            }
        }
        Spectrum {
            entries: entries.into_iter().map(|(m, k, _)| (m, k)).collect(),
        }
    }

    /// Build from `(eigenvalue, multiplicity)` pairs, merging coincident values.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, usize)>) -> Self {
        let mut pairs: Vec<_> = pairs.into_iter().filter(|&(_, m)| m > 0).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut entries: Vec<(f64, usize)> = Vec::new();
        for (v, m) in pairs {
            match entries.last_mut() {
                Some((last, mult)) if (v - *last).abs() <= SPECTRUM_MERGE_RTOL * v.abs().max(1.0) => {
                    *mult += m
                }
                _ => entries.push((v, m)),
            }
        }
        Spectrum { entries }
    }

    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn min(&self) -> Option<f64> {
        self.entries.first().map(|e| e.0)
    }

    /// All eigenvalues repeated by multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|&(v, m)| std::iter::repeat_n(v, m))
            .collect()
    }

    /// CSV with header `eigenvalue,multiplicity`, 15 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eigenvalue,multiplicity\n");
        for &(v, m) in &self.entries {
            out.push_str(&format!("{},{}\n", fmt_significant(v, 15), m));
        }
        out
    }
}

/// Format with `digits` significant digits, trimming trailing zeros.
pub fn fmt_significant(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    // Any decimal with at most 15 significant digits round-trips through f64,
    // so the shortest representation of the rounded value is exact.
    let rounded: f64 = format!("{:.*e}", digits - 1, v).parse().unwrap_or(v);
    format!("{rounded}")
}

/// Eigendecomposition `A = U Λ U*` of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn spectrum(&self) -> Spectrum {
        Spectrum::from_values(&self.values, SPECTRUM_MERGE_RTOL)
    }

    /// `U f(Λ) U*`.
    pub fn apply(&self, mut f: impl FnMut(f64) -> Complex64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.values[k]);
        }
        scaled * self.vectors.adjoint()
    }
}

pub fn hermitian_eig(a: &CMatrix) -> Result<HermitianEigen> {
    ensure_hermitian(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(HermitianEigen {
            values: vec![],
            vectors: zeros(0),
        });
    }
    // Symmetrize so tiny anti-Hermitian noise does not leak into the solver.
    let sym = (a + a.adjoint()) * c(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    Ok(HermitianEigen { values, vectors })
}

/// Positive semidefiniteness test. Always returns the smallest eigenvalue.
pub fn is_psd(a: &CMatrix, tol: f64) -> Result<(bool, f64)> {
    let eig = hermitian_eig(a)?;
    let min = eig.values.first().copied().unwrap_or(0.0);
    Ok((min >= -tol, min))
}

/// Spectral functional calculus `f(A) = U f(Λ) U*` for Hermitian `A`.
pub fn funcalc(a: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    let eig = hermitian_eig(a)?;
    let mut images = Vec::with_capacity(eig.values.len());
    for &v in &eig.values {
        let fv = f(v);
        if !fv.is_finite() {
            return Err(Error::FunctionUndefined(v));
        }
        images.push(fv);
    }
    let mut k = 0;
    let out = eig.apply(|_| {
        let z = c(images[k], 0.0);
        k += 1;
        z
    });
    Ok(out)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// ℤ₂-graded tensor product `(A·γ₁^{|B|}) ⊗ B`.
///
/// With this embedding, `(a ⊗̂ b)(c ⊗̂ d) = (−1)^{|b||c|} (ac) ⊗̂ (bd)` holds for
/// homogeneous `c` as an ordinary matrix identity.
pub fn kron_graded(a: &CMatrix, b: &GradedMatrix, gamma1: &CMatrix) -> Result<CMatrix> {
    if gamma1.shape() != a.shape() {
        return Err(Error::DimensionMismatch(format!(
            "grading {:?} for left factor {:?}",
            gamma1.shape(),
            a.shape()
        )));
    }
    let parity = b.parity().ok_or(Error::MissingGrading)?;
    match parity.degree() {
        Some(0) => Ok(kron(a, b.data())),
        Some(_) => Ok(kron(&(a * gamma1), b.data())),
        None => Err(Error::MixedParity),
    }
}

/// Hilbert–Schmidt inner product `Tr(A* B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
    ensure_same_shape(a, b)?;
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

pub fn trace(a: &CMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

/// Matrix exponential `e^{scale·A}`.
///
/// Hermitian and skew-Hermitian inputs go through the eigendecomposition;
/// everything else uses degree-13 Padé scaling and squaring.
pub fn expm(a: &CMatrix, scale: f64) -> Result<CMatrix> {
    let n = ensure_square(a)?;
    if n == 0 {
        return Ok(zeros(0));
    }
    let scaled = a * c(scale, 0.0);
    let norm = scaled.norm().max(f64::MIN_POSITIVE);
    if hermiticity_residual(&scaled) <= 1e-13 * norm {
        let eig = hermitian_eig(&scaled)?;
        let top = eig.values.last().copied().unwrap_or(0.0);
        if top > EXPM_NORM_CAP {
            return Err(Error::ExpOverflow {
                norm: top,
                cap: EXPM_NORM_CAP,
            });
        }
        return Ok(eig.apply(|v| c(v.exp(), 0.0)));
    }
    if (&scaled + scaled.adjoint()).norm() <= 1e-13 * norm {
        // A = −iH with H Hermitian.
        let h = &scaled * I;
        let eig = hermitian_eig(&h)?;
        return Ok(eig.apply(|v| Complex64::from_polar(1.0, -v)));
    }
    let n1 = norm_one(&scaled);
    if n1 > EXPM_NORM_CAP {
        return Err(Error::ExpOverflow {
            norm: n1,
            cap: EXPM_NORM_CAP,
        });
    }
    Ok(pade13(&scaled, n1))
}

fn pade13(a: &CMatrix, norm1: f64) -> CMatrix {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA13: f64 = 5.371920351148152;
    let n = a.nrows();
    let squarings = if norm1 > THETA13 {
        (norm1 / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a * c(0.5f64.powi(squarings), 0.0);
    let id = identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let r = |x: f64| c(x, 0.0);
    let u_inner = &a6 * (&a6 * r(B[13]) + &a4 * r(B[11]) + &a2 * r(B[9]))
        + &a6 * r(B[7])
        + &a4 * r(B[5])
        + &a2 * r(B[3])
        + &id * r(B[1]);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * r(B[12]) + &a4 * r(B[10]) + &a2 * r(B[8]))
        + &a6 * r(B[6])
        + &a4 * r(B[4])
        + &a2 * r(B[2])
        + &id * r(B[0]);
    let p = &v + &u;
    let q = &v - &u;
    let mut result = q
        .lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular within the norm cap");
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}
