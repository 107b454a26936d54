//! Superoperators on `Mat_n` and quantum dynamical semigroups.
//!
//! A superoperator is stored as its `n² × n²` matrix in the column-stacking
//! basis, where `x ↦ A x B` has matrix `Bᵀ ⊗ A`. Composition is then matrix
//! multiplication, evolution is one matrix exponential, and the Choi matrix is
//! a reshuffle.
//!
//! All maps are in the Heisenberg picture: a semigroup is conservative when
//! `T_t(1) = 1`.

use std::collections::BTreeSet;
use std::ops::{Add, Mul, Sub};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{
    c, commutator, ensure_hermitian, ensure_square, expm, funcalc, hermitian_eig, identity,
    is_psd, kron, op_norm, unit, unitarity_residual, CMatrix,
};
use crate::sample::{random_hermitian, stream};

/// Default tolerance on the smallest Choi eigenvalue.
pub const CP_TOL: f64 = 1e-9;

/// Tolerance for declared properties such as hermiticity preservation.
pub const STRUCTURE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    HermiticityPreserving,
    Unital,
    CpExpected,
}

/// Linear map on `Mat_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    dim: usize,
    rep: CMatrix,
    tags: BTreeSet<Tag>,
}

impl Superoperator {
    pub fn from_rep(dim: usize, rep: CMatrix) -> Result<Self> {
        if rep.shape() != (dim * dim, dim * dim) {
            return Err(Error::DimensionMismatch(format!(
                "superoperator on Mat_{dim} needs a {0}x{0} matrix, got {1:?}",
                dim * dim,
                rep.shape()
            )));
        }
        Ok(Self {
            dim,
            rep,
            tags: BTreeSet::new(),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            rep: identity(dim * dim),
            tags: [Tag::HermiticityPreserving, Tag::Unital, Tag::CpExpected].into(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            rep: CMatrix::zeros(dim * dim, dim * dim),
            tags: [Tag::HermiticityPreserving].into(),
        }
    }

    /// `x ↦ A x B`.
    pub fn sandwich(a: &CMatrix, b: &CMatrix) -> Result<Self> {
        let n = ensure_square(a)?;
        if b.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "sandwich factors {:?} and {:?}",
                a.shape(),
                b.shape()
            )));
        }
        Self::from_rep(n, kron(&b.transpose(), a))
    }

    /// `x ↦ A x A*`, completely positive by construction.
    pub fn conjugation(a: &CMatrix) -> Result<Self> {
        Ok(Self::sandwich(a, &a.adjoint())?
            .with_tag(Tag::HermiticityPreserving)
            .with_tag(Tag::CpExpected))
    }

    /// Build from the action on matrix units.
    pub fn from_fn(dim: usize, f: impl Fn(&CMatrix) -> CMatrix) -> Result<Self> {
        let mut rep = CMatrix::zeros(dim * dim, dim * dim);
        for j in 0..dim {
            for i in 0..dim {
                let image = f(&unit(dim, i, j));
                if image.shape() != (dim, dim) {
                    return Err(Error::DimensionMismatch(format!(
                        "map returned {:?} on Mat_{dim}",
                        image.shape()
                    )));
                }
                rep.column_mut(i + j * dim)
                    .copy_from_slice(image.as_slice());
            }
        }
        Self::from_rep(dim, rep)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rep(&self) -> &CMatrix {
        &self.rep
    }

    pub fn tags(&self) -> &BTreeSet<Tag> {
        &self.tags
    }

    pub fn with_tag(mut self, tag: Tag) -> Self {
        self.tags.insert(tag);
        self
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        assert_eq!(x.shape(), (self.dim, self.dim), "operand dimension");
        // nalgebra storage is column-major, i.e. already column-stacked.
        let v = &self.rep * crate::matrix::CVector::from_column_slice(x.as_slice());
        CMatrix::from_column_slice(self.dim, self.dim, v.as_slice())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "composition dimension");
        Self {
            dim: self.dim,
            rep: &self.rep * &other.rep,
            tags: self.tags.intersection(&other.tags).copied().collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            rep: &self.rep * c(s, 0.0),
            tags: BTreeSet::new(),
        }
    }

    /// `Φ ⊗ Ψ` on `Mat_n ⊗ Mat_m = Mat_{nm}`.
    pub fn tensor(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let images_a: Vec<CMatrix> = (0..n * n)
            .map(|k| self.apply(&unit(n, k % n, k / n)))
            .collect();
        let images_b: Vec<CMatrix> = (0..m * m)
            .map(|k| other.apply(&unit(m, k % m, k / m)))
            .collect();
        let d = n * m;
        let mut rep = CMatrix::zeros(d * d, d * d);
        for (ka, image_a) in images_a.iter().enumerate() {
            let (i, j) = (ka % n, ka / n);
            for (kb, image_b) in images_b.iter().enumerate() {
                let (k, l) = (kb % m, kb / m);
                let image = kron(image_a, image_b);
                let col = (i * m + k) + (j * m + l) * d;
                rep.column_mut(col).copy_from_slice(image.as_slice());
            }
        }
        Self {
            dim: d,
            rep,
            tags: self.tags.intersection(&other.tags).copied().collect(),
        }
    }

    /// `max ‖Φ(E_ij*) − Φ(E_ij)*‖` over matrix units.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let e = unit(n, i, j);
                let lhs = self.apply(&e.adjoint());
                let rhs = self.apply(&e).adjoint();
                worst = worst.max((lhs - rhs).norm());
            }
        }
        worst
    }

    pub fn is_hermiticity_preserving(&self) -> bool {
        self.hermiticity_residual() <= STRUCTURE_TOL * self.rep.norm().max(1.0)
    }

    /// `‖Φ(1) − 1‖` (operator norm).
    pub fn unitality_residual(&self) -> f64 {
        op_norm(&(self.apply(&identity(self.dim)) - identity(self.dim)))
    }

    /// Distance from symmetry in the Hilbert–Schmidt inner product.
    pub fn hs_symmetry_residual(&self) -> f64 {
        (&self.rep - self.rep.adjoint()).norm()
    }

    /// Superoperator norm of `self − other` (spectral norm of the matrices).
    pub fn distance(&self, other: &Self) -> f64 {
        op_norm(&(&self.rep - &other.rep))
    }
}

impl Add for &Superoperator {
    type Output = Superoperator;

    fn add(self, rhs: Self) -> Superoperator {
        assert_eq!(self.dim, rhs.dim, "sum dimension");
        Superoperator {
            dim: self.dim,
            rep: &self.rep + &rhs.rep,
            tags: BTreeSet::new(),
        }
    }
}

impl Sub for &Superoperator {
    type Output = Superoperator;

    fn sub(self, rhs: Self) -> Superoperator {
        assert_eq!(self.dim, rhs.dim, "difference dimension");
        Superoperator {
            dim: self.dim,
            rep: &self.rep - &rhs.rep,
            tags: BTreeSet::new(),
        }
    }
}

impl Mul for &Superoperator {
    type Output = Superoperator;

    fn mul(self, rhs: Self) -> Superoperator {
        self.compose(rhs)
    }
}

/// Choi matrix `J(Φ) = Σ_ij E_ij ⊗ Φ(E_ij)`.
pub fn choi(phi: &Superoperator) -> CMatrix {
    let n = phi.dim;
    let mut j = CMatrix::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            let image = phi.apply(&unit(n, a, b));
            j.view_mut((a * n, b * n), (n, n)).copy_from(&image);
        }
    }
    j
}

/// Complete positivity via the Choi matrix. Returns the smallest Choi
/// eigenvalue alongside the verdict.
pub fn is_cp(phi: &Superoperator, tol: f64) -> Result<(bool, f64)> {
    let r = phi.hermiticity_residual();
    if r > STRUCTURE_TOL * phi.rep.norm().max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "complete positivity needs a hermiticity-preserving map (residual {r:.3e})"
        )));
    }
    let j = choi(phi);
    let herm = (&j + j.adjoint()) * c(0.5, 0.0);
    is_psd(&herm, tol)
}

fn ensure_psd(dsq: &CMatrix) -> Result<()> {
    ensure_hermitian(dsq)?;
    let (_, min) = is_psd(dsq, 0.0)?;
    if min < -1e-10 * dsq.norm().max(1.0) {
        return Err(Error::NotPositive(min));
    }
    Ok(())
}

fn ensure_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time must be finite and nonnegative, got {t}"
        )));
    }
    Ok(())
}

/// `T_t(x) = e^{−tD²/2} x e^{−tD²/2}`.
pub fn kraus_heat_semigroup(dsq: &CMatrix, t: f64) -> Result<Superoperator> {
    ensure_psd(dsq)?;
    ensure_time(t)?;
    let k = expm(dsq, -0.5 * t)?;
    Superoperator::conjugation(&k)
}

/// Generator `x ↦ −(D²x + xD²)/2` of [`kraus_heat_semigroup`].
pub fn kraus_heat_generator(dsq: &CMatrix) -> Result<Superoperator> {
    ensure_psd(dsq)?;
    let n = dsq.nrows();
    let half = dsq * c(-0.5, 0.0);
    Ok((&Superoperator::sandwich(&half, &identity(n))?
        + &Superoperator::sandwich(&identity(n), &half)?)
        .with_tag(Tag::HermiticityPreserving))
}

/// `T_t(x) = e^{−tD²} x`. Not hermiticity preserving unless `D²` and `x`
/// commute; kept for studying the quadratic form.
pub fn left_composition_semigroup(dsq: &CMatrix, t: f64) -> Result<Superoperator> {
    ensure_psd(dsq)?;
    ensure_time(t)?;
    let e = expm(dsq, -t)?;
    Superoperator::sandwich(&e, &identity(dsq.nrows()))
}

/// Generator `x ↦ −D²x` of [`left_composition_semigroup`].
pub fn left_composition_generator(dsq: &CMatrix) -> Result<Superoperator> {
    ensure_psd(dsq)?;
    Superoperator::sandwich(&(-dsq), &identity(dsq.nrows()))
}

/// GKSL generator `ℒ(x) = i[H, x] + Σ_k (L_k* x L_k − ½{L_k* L_k, x})`.
pub fn lindblad_generator(hm: &CMatrix, ls: &[CMatrix]) -> Result<Superoperator> {
    ensure_hermitian(hm)?;
    let n = hm.nrows();
    for l in ls {
        if l.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "jump operator {:?} on a {n}-dimensional system",
                l.shape()
            )));
        }
    }
    let id = identity(n);
    let ih = hm * crate::matrix::I;
    let mut gen = &Superoperator::sandwich(&ih, &id)? - &Superoperator::sandwich(&id, &ih)?;
    for l in ls {
        let ldl = l.adjoint() * l * c(-0.5, 0.0);
        gen = &gen + &Superoperator::sandwich(&l.adjoint(), l)?;
        gen = &gen + &Superoperator::sandwich(&ldl, &id)?;
        gen = &gen + &Superoperator::sandwich(&id, &ldl)?;
    }
    Ok(gen.with_tag(Tag::HermiticityPreserving))
}

/// `ℒ(x) = −Σ_i [B_i, [B_i, x]]` for Hermitian `B_i`: the endomorphism
/// connection laplacian, a GKSL generator with self-adjoint jumps `√2 B_i`.
pub fn endomorphism_laplacian_generator(dim: usize, bs: &[CMatrix]) -> Result<Superoperator> {
    let id = identity(dim);
    let mut gen = Superoperator::zero(dim);
    for b in bs {
        ensure_hermitian(b)?;
        if b.nrows() != dim {
            return Err(Error::DimensionMismatch(format!(
                "B has dimension {} on Mat_{dim}",
                b.nrows()
            )));
        }
        // vec([B, x]) = (1 ⊗ B − Bᵀ ⊗ 1) vec(x)
        let ad = kron(&id, b) - kron(&b.transpose(), &id);
        let ad = Superoperator::from_rep(dim, ad)?;
        gen = &gen - &ad.compose(&ad);
    }
    Ok(gen.with_tag(Tag::HermiticityPreserving))
}

/// `e^{tℒ}`.
pub fn evolve(l: &Superoperator, t: f64) -> Result<Superoperator> {
    ensure_time(t)?;
    let mut out = Superoperator::from_rep(l.dim, expm(&l.rep, t)?)?;
    if l.tags.contains(&Tag::HermiticityPreserving) {
        out = out.with_tag(Tag::HermiticityPreserving);
    }
    Ok(out)
}

/// `max_g max_ij ‖ℒ(U E_ij U*) − U ℒ(E_ij) U*‖` over the supplied unitaries.
pub fn check_covariance(l: &Superoperator, unitaries: &[CMatrix]) -> Result<f64> {
    let mut worst = 0.0f64;
    for u in unitaries {
        if u.shape() != (l.dim, l.dim) {
            return Err(Error::DimensionMismatch(format!(
                "unitary {:?} on Mat_{}",
                u.shape(),
                l.dim
            )));
        }
        let r = unitarity_residual(u);
        if r > STRUCTURE_TOL {
            return Err(Error::NotUnitary(r));
        }
        let alpha = Superoperator::conjugation(u)?;
        let lhs = l.compose(&alpha);
        let rhs = alpha.compose(l);
        for i in 0..l.dim {
            for j in 0..l.dim {
                let e = unit(l.dim, i, j);
                worst = worst.max(op_norm(&(lhs.apply(&e) - rhs.apply(&e))));
            }
        }
    }
    Ok(worst)
}

/// Largest violation of `0 ≤ Φ(x) ≤ 1` over `0 ≤ x ≤ 1`.
///
/// The samples are `x = 0`, `x = 1`, then random Hermitian matrices clamped to
/// `[0, 1]` by functional calculus.
pub fn check_markov(phi: &Superoperator, samples: usize, seed: u64) -> Result<f64> {
    let n = phi.dim;
    let violation = |x: &CMatrix| -> Result<f64> {
        let y = phi.apply(x);
        let y = (&y + y.adjoint()) * c(0.5, 0.0);
        let eig = hermitian_eig(&y)?;
        let lo = eig.values.first().copied().unwrap_or(0.0);
        let hi = eig.values.last().copied().unwrap_or(0.0);
        Ok(0.0f64.max(-lo).max(hi - 1.0))
    };
    let mut worst = violation(&crate::matrix::zeros(n))?.max(violation(&identity(n))?);
    let sampled: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut r = stream(seed, k);
            let h = random_hermitian(n, &mut r) + identity(n) * c(0.5, 0.0);
            let x = funcalc(&h, |v| v.clamp(0.0, 1.0))?;
            violation(&x)
        })
        .collect::<Result<_>>()?;
    for v in sampled {
        worst = worst.max(v);
    }
    Ok(worst)
}

/// Hermitian jump operators `i X_k` for skew-Hermitian Lie algebra generators.
pub fn hermitian_from_skew(generators: &[CMatrix]) -> Vec<CMatrix> {
    generators.iter().map(|x| x * crate::matrix::I).collect()
}

/// Group samples `exp(Σ_k θ_k X_k)` with seeded angles in `[−π, π)`.
pub fn group_samples(generators: &[CMatrix], count: usize, seed: u64) -> Result<Vec<CMatrix>> {
    use rand::Rng;
    let n = generators.first().map_or(1, |g| g.nrows());
    (0..count as u64)
        .map(|k| {
            let mut r = stream(seed, k);
            let mut x = CMatrix::zeros(n, n);
            for g in generators {
                let theta: f64 = r.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                x += g * c(theta, 0.0);
            }
            expm(&x, 1.0)
        })
        .collect()
}

/// Commutator with a fixed operator as a superoperator, `x ↦ [A, x]`.
pub fn commutator_map(a: &CMatrix) -> Result<Superoperator> {
    let n = ensure_square(a)?;
    Superoperator::from_fn(n, |x| commutator(a, x))
}
