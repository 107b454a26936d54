//! SU(2)/U(1) homogeneous bundles and matrix models of connection laplacians.
//!
//! Sections of the line bundle of U(1) weight `w` over the round 2-sphere
//! decompose into the SU(2) irreducibles `V_j` containing the weight `w/2`,
//! each exactly once. On such a sector the canonical connection laplacian is
//! `C₂(SU(2)) − C₂(U(1)) = j(j+1) − w²/4`. The Casimir is normalized to
//! `j(j+1)` on `V_j`, which fixes the unit sphere with scalar curvature
//! [`KAPPA_S2`].
//!
//! The second half of the module checks operator identities for arbitrary
//! lists of covariant derivatives `∇_i` given as matrices, with curvature
//! `R(i, j) = [∇_i, ∇_j]`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    c, commutator, ensure_square, identity, is_psd, kron, op_norm, CMatrix, Spectrum, I,
};
use crate::qds::{endomorphism_laplacian_generator, hermitian_from_skew, Superoperator};
use crate::sample::{random_complex, stream};

/// Scalar curvature of the unit round sphere.
pub const KAPPA_S2: f64 = 2.0;

/// Largest Sobolev order accepted by [`sobolev_norm`].
pub const SOBOLEV_MAX_ORDER: usize = 4;

/// A nonnegative half-integer, stored as `2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Spin {
    two_j: u32,
}

impl Spin {
    pub const ZERO: Spin = Spin { two_j: 0 };
    pub const HALF: Spin = Spin { two_j: 1 };
    pub const ONE: Spin = Spin { two_j: 2 };

    pub const fn from_two_j(two_j: u32) -> Self {
        Self { two_j }
    }

    /// Parse a float spin, rejecting negatives and non-half-integers.
    pub fn from_f64(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if twice < 0.0 || twice.fract() != 0.0 || twice > u32::MAX as f64 {
            return Err(Error::InvalidArgument(format!(
                "spin must be a nonnegative half-integer, got {j}"
            )));
        }
        Ok(Self {
            two_j: twice as u32,
        })
    }

    pub fn two_j(self) -> u32 {
        self.two_j
    }

    pub fn value(self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn dim(self) -> usize {
        self.two_j as usize + 1
    }

    /// `j(j+1)`.
    pub fn casimir(self) -> f64 {
        let j = self.value();
        j * (j + 1.0)
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two_j.is_multiple_of(2) {
            write!(f, "{}", self.two_j / 2)
        } else {
            write!(f, "{}/2", self.two_j)
        }
    }
}

/// Spin-`j` representation with skew-Hermitian generators `X_k = −i J_k`,
/// so that `[X₁, X₂] = X₃` cyclically and `−ΣX_k² = j(j+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Su2Irrep {
    pub spin: Spin,
    pub generators: [CMatrix; 3],
}

impl Su2Irrep {
    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    pub fn casimir_eigenvalue(&self) -> f64 {
        self.spin.casimir()
    }

    /// `−(X₁² + X₂² + X₃²)`.
    pub fn casimir_matrix(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for x in &self.generators {
            out -= x * x;
        }
        out
    }

    pub fn commutation_residual(&self) -> f64 {
        let [x1, x2, x3] = &self.generators;
        [
            commutator(x1, x2) - x3,
            commutator(x2, x3) - x1,
            commutator(x3, x1) - x2,
        ]
        .iter()
        .map(CMatrix::norm)
        .fold(0.0, f64::max)
    }

    pub fn casimir_residual(&self) -> f64 {
        (self.casimir_matrix() - identity(self.dim()) * c(self.spin.casimir(), 0.0)).norm()
    }
}

/// Ladder-operator construction in the basis `m = j, j−1, …, −j`.
pub fn su2_irrep(spin: Spin) -> Su2Irrep {
    let n = spin.dim();
    let j = spin.value();
    let mut jz = CMatrix::zeros(n, n);
    let mut jplus = CMatrix::zeros(n, n);
    for k in 0..n {
        let m = j - k as f64;
        jz[(k, k)] = c(m, 0.0);
        if k + 1 < n {
            // J₊ |m−1⟩ = √(j(j+1) − (m−1)m) |m⟩
            let lower = m - 1.0;
            jplus[(k, k + 1)] = c((j * (j + 1.0) - lower * (lower + 1.0)).sqrt(), 0.0);
        }
    }
    let jminus = jplus.adjoint();
    let jx = (&jplus + &jminus) * c(0.5, 0.0);
    let jy = (&jplus - &jminus) * c(0.0, -0.5);
    let generators = [jx * -I, jy * -I, jz * -I];
    Su2Irrep { spin, generators }
}

/// Sections of a homogeneous line bundle over SU(2)/U(1), split into SU(2)
/// sectors below a truncation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousBundle {
    pub h_weight: i32,
    pub j_max: Spin,
    pub sectors: Vec<(Spin, usize)>,
    pub kappa: f64,
}

/// Frobenius reciprocity: `V_j` occurs (once) iff it contains the weight
/// `h_weight/2`.
pub fn decompose_induced_bundle(h_weight: i32, j_max: Spin) -> Result<HomogeneousBundle> {
    let lowest = h_weight.unsigned_abs();
    if j_max.two_j < lowest {
        return Err(Error::InvalidArgument(format!(
            "truncation j_max = {j_max} lies below the lowest sector {}",
            Spin::from_two_j(lowest)
        )));
    }
    let sectors = (lowest..=j_max.two_j)
        .step_by(2)
        .map(|t| (Spin::from_two_j(t), 1))
        .collect();
    Ok(HomogeneousBundle {
        h_weight,
        j_max,
        sectors,
        kappa: KAPPA_S2,
    })
}

impl HomogeneousBundle {
    /// U(1) Casimir of the fiber weight, `w²/4`.
    pub fn fiber_casimir(&self) -> f64 {
        (self.h_weight as f64).powi(2) / 4.0
    }
}

/// `Δ = −C₂(K, Γ(E)) + C₂(H, E)`: eigenvalue `j(j+1) − w²/4` with
/// multiplicity `2j+1` on each sector.
pub fn connection_laplacian_spectrum(bundle: &HomogeneousBundle) -> Spectrum {
    let fiber = bundle.fiber_casimir();
    Spectrum::from_pairs(
        bundle
            .sectors
            .iter()
            .map(|&(j, mult)| (j.casimir() - fiber, j.dim() * mult)),
    )
}

/// Spectrum of the square of the Dirac operator on the full spinor bundle
/// `S⁺ ⊕ S⁻` of the round 2-sphere, from `D² = Ω + κ/8` on each sector of
/// the two half-spinor bundles (weights ±1).
pub fn dirac_square_spectrum_symmetric(j_max: Spin) -> Result<Spectrum> {
    if j_max.two_j < 1 {
        return Err(Error::InvalidArgument(
            "the spinor bundle needs j_max ≥ 1/2".into(),
        ));
    }
    let mut pairs = Vec::new();
    for w in [1, -1] {
        let bundle = decompose_induced_bundle(w, j_max)?;
        for &(j, mult) in &bundle.sectors {
            pairs.push((j.casimir() + bundle.kappa / 8.0, j.dim() * mult));
        }
    }
    Ok(Spectrum::from_pairs(pairs))
}

/// Largest sectorwise residual of `D² − Δ − κ/4` on the spinor bundle, with
/// `D²` the Casimir matrix shifted by `κ/8` and `Δ` the Casimir matrix minus
/// the fiber Casimir.
pub fn spinor_lichnerowicz_residual(j_max: Spin) -> Result<f64> {
    let mut worst = 0.0f64;
    for w in [1, -1] {
        let bundle = decompose_induced_bundle(w, j_max)?;
        for &(j, _) in &bundle.sectors {
            let irrep = su2_irrep(j);
            let n = irrep.dim();
            let dsq = cubic_dirac_square(&irrep, bundle.kappa / 8.0)?.matrix;
            let lap = irrep.casimir_matrix() - identity(n) * c(bundle.fiber_casimir(), 0.0);
            let curvature = identity(n) * c(bundle.kappa / 4.0, 0.0);
            worst = worst.max(op_norm(&(dsq - lap - curvature)));
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CubicDiracSquare {
    pub matrix: CMatrix,
    pub psd: bool,
    pub min_eigenvalue: f64,
}

/// `−ΣX_i² + shift·1`: a quadratic Casimir plus a scalar.
pub fn cubic_dirac_square(rep: &Su2Irrep, shift: f64) -> Result<CubicDiracSquare> {
    if !shift.is_finite() {
        return Err(Error::InvalidArgument(format!("shift must be finite, got {shift}")));
    }
    let matrix = rep.casimir_matrix() + identity(rep.dim()) * c(shift, 0.0);
    let (psd, min_eigenvalue) = is_psd(&matrix, 1e-12)?;
    Ok(CubicDiracSquare {
        matrix,
        psd,
        min_eigenvalue,
    })
}

fn common_dim(mats: &[CMatrix], what: &str) -> Result<usize> {
    let first = mats
        .first()
        .ok_or_else(|| Error::InvalidArgument(format!("{what}: empty list")))?;
    let n = ensure_square(first)?;
    for m in mats {
        if m.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "{what}: {:?} vs {:?}",
                m.shape(),
                (n, n)
            )));
        }
    }
    Ok(n)
}

/// `Δ = −Σ∇_i∇_i`.
pub fn connection_laplacian(nablas: &[CMatrix]) -> Result<CMatrix> {
    let n = common_dim(nablas, "connection laplacian")?;
    let mut out = CMatrix::zeros(n, n);
    for x in nablas {
        out -= x * x;
    }
    Ok(out)
}

/// `R(i, j) = [∇_i, ∇_j]`.
pub fn curvature(nablas: &[CMatrix]) -> Vec<Vec<CMatrix>> {
    nablas
        .iter()
        .map(|a| nablas.iter().map(|b| commutator(a, b)).collect())
        .collect()
}

/// `‖[−Δ, Σ_j∇_j] − Σ_ij (R(i,j)∇_i + ∇_i R(i,j))‖`.
pub fn verify_commutator_lemma(nablas: &[CMatrix]) -> Result<f64> {
    let n = common_dim(nablas, "commutator lemma")?;
    let minus_lap = -connection_laplacian(nablas)?;
    let sum: CMatrix = nablas.iter().fold(CMatrix::zeros(n, n), |acc, x| acc + x);
    let lhs = commutator(&minus_lap, &sum);
    let r = curvature(nablas);
    let mut rhs = CMatrix::zeros(n, n);
    for (i, row) in r.iter().enumerate() {
        for rij in row {
            rhs += rij * &nablas[i] + &nablas[i] * rij;
        }
    }
    Ok(op_norm(&(lhs - rhs)))
}

/// Residual of `Δ^{S⊗E} = Δ^S ⊗ 1 − 2Σ∇_i^S ⊗ ∇_i^E + 1 ⊗ Δ^E`, where the
/// left side is built from `∇_i^{S⊗E} = ∇_i^S ⊗ 1 + 1 ⊗ ∇_i^E`.
pub fn tensor_laplacian_check(nabla_s: &[CMatrix], nabla_e: &[CMatrix]) -> Result<f64> {
    if nabla_s.len() != nabla_e.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} spinor derivatives vs {} bundle derivatives",
            nabla_s.len(),
            nabla_e.len()
        )));
    }
    let ns = common_dim(nabla_s, "tensor laplacian (S)")?;
    let ne = common_dim(nabla_e, "tensor laplacian (E)")?;
    let (is, ie) = (identity(ns), identity(ne));
    let joint: Vec<CMatrix> = nabla_s
        .iter()
        .zip(nabla_e)
        .map(|(s, e)| kron(s, &ie) + kron(&is, e))
        .collect();
    let lhs = connection_laplacian(&joint)?;
    let mut rhs = kron(&connection_laplacian(nabla_s)?, &ie) + kron(&is, &connection_laplacian(nabla_e)?);
    for (s, e) in nabla_s.iter().zip(nabla_e) {
        rhs -= kron(s, e) * c(2.0, 0.0);
    }
    Ok(op_norm(&(lhs - rhs)))
}

/// Tensor-product connection laplacian `−Σ(∇_i^S ⊗ 1 + 1 ⊗ ∇_i^E)²`.
pub fn tensor_laplacian(nabla_s: &[CMatrix], nabla_e: &[CMatrix]) -> Result<CMatrix> {
    let ns = common_dim(nabla_s, "tensor laplacian (S)")?;
    let ne = common_dim(nabla_e, "tensor laplacian (E)")?;
    let joint: Vec<CMatrix> = nabla_s
        .iter()
        .zip(nabla_e)
        .map(|(s, e)| kron(s, &identity(ne)) + kron(&identity(ns), e))
        .collect();
    connection_laplacian(&joint)
}

/// Curvature endomorphism `𝔕 = ½ Σ_jk c(e_j) c(e_k) R(j, k)`.
///
/// When the derivatives act on the same space as the Clifford generators the
/// product is taken directly. When they act on a twisting factor `W` and the
/// generators on the spinor factor `S`, the result is
/// `½ Σ_jk R(j, k) ⊗ e_j e_k` on `W ⊗ S`.
pub fn bochner_curvature_term(nablas: &[CMatrix], gammas: &[CMatrix]) -> Result<CMatrix> {
    if nablas.len() != gammas.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} derivatives vs {} Clifford generators",
            nablas.len(),
            gammas.len()
        )));
    }
    let nd = common_dim(nablas, "curvature term")?;
    let gd = common_dim(gammas, "curvature term (Clifford)")?;
    let r = curvature(nablas);
    let half = c(0.5, 0.0);
    if nd == gd {
        let mut out = CMatrix::zeros(nd, nd);
        for (j, gj) in gammas.iter().enumerate() {
            for (k, gk) in gammas.iter().enumerate() {
                out += gj * gk * &r[j][k] * half;
            }
        }
        Ok(out)
    } else {
        let mut out = CMatrix::zeros(nd * gd, nd * gd);
        for (j, gj) in gammas.iter().enumerate() {
            for (k, gk) in gammas.iter().enumerate() {
                out += kron(&r[j][k], &(gj * gk)) * half;
            }
        }
        Ok(out)
    }
}

/// `‖a‖_n = Σ_{words of length ≤ n} ‖∂_{i₁}⋯∂_{i_k}(a)‖` with
/// `∂_i(a) = [X_i, a]` and operator norms.
pub fn sobolev_norm(a: &CMatrix, n: usize, derivations: &[CMatrix]) -> Result<f64> {
    if n > SOBOLEV_MAX_ORDER {
        return Err(Error::SizeCap(format!(
            "Sobolev order {n} exceeds the cap of {SOBOLEV_MAX_ORDER}"
        )));
    }
    let d = ensure_square(a)?;
    for x in derivations {
        if x.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "derivation {:?} on a {d}x{d} operator",
                x.shape()
            )));
        }
    }
    let mut total = op_norm(a);
    let mut level = vec![a.clone()];
    for _ in 0..n {
        level = level
            .iter()
            .flat_map(|y| derivations.iter().map(move |x| commutator(x, y)))
            .collect();
        total += level.iter().map(op_norm).sum::<f64>();
    }
    Ok(total)
}

/// Empirical `max_ξ ‖L(ξ)‖_n / ‖ξ‖_{n+p}` over seeded complex Gaussian samples.
pub fn smoothness_constant(
    l: &Superoperator,
    n: usize,
    p: usize,
    derivations: &[CMatrix],
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if n + p > SOBOLEV_MAX_ORDER {
        return Err(Error::SizeCap(format!(
            "order n + p = {} exceeds the cap of {SOBOLEV_MAX_ORDER}",
            n + p
        )));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is needed".into()));
    }
    let d = l.dim();
    let ratios: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut r = stream(seed, k);
            loop {
                let xi = random_complex(d, &mut r);
                let denom = sobolev_norm(&xi, n + p, derivations)?;
                if denom > 0.0 {
                    return Ok(sobolev_norm(&l.apply(&xi), n, derivations)? / denom);
                }
            }
        })
        .collect::<Result<_>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// Casimir action `x ↦ Σ_k [X_k, [X_k, x]]` of an irrep on its endomorphisms.
pub fn casimir_generator(irrep: &Su2Irrep) -> Result<Superoperator> {
    endomorphism_laplacian_generator(irrep.dim(), &hermitian_from_skew(&irrep.generators))
}
