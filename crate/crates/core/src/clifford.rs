//! Complex Clifford algebra representations and commutants.
//!
//! Generators come from the iterated Pauli construction
//!
//! ```text
//! e_{2k−1} = σ₃ ⊗ … ⊗ σ₃ ⊗ σ₁ ⊗ 1 ⊗ … ⊗ 1
//! e_{2k}   = σ₃ ⊗ … ⊗ σ₃ ⊗ σ₂ ⊗ 1 ⊗ … ⊗ 1
//! ```
//!
//! with `k − 1` leading σ₃ factors, multiplied by `i` in the minus signature.
//! Only even generator counts are supported. The chirality is
//! `(−i)^m e₁⋯e_n` with `n = 2m`; it is diagonal in this basis.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::{
    c, commutator, hermitian_eig, identity, kron, sigma_x, sigma_y, sigma_z, CMatrix, I, ONE,
};

/// Largest supported generator count.
pub const MAX_GENERATORS: usize = 12;

/// Relative singular-value threshold below which a direction counts as null.
pub const COMMUTANT_RANK_RTOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    /// `e_i² = +1`, Hermitian generators.
    Plus,
    /// `e_i² = −1`, skew-Hermitian generators.
    #[default]
    Minus,
}

impl Signature {
    pub fn square(self) -> f64 {
        match self {
            Signature::Plus => 1.0,
            Signature::Minus => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CliffordRep {
    pub n: usize,
    pub signature: Signature,
    pub gammas: Vec<CMatrix>,
    pub chirality: CMatrix,
}

impl CliffordRep {
    /// Dimension of the spinor module, `2^{n/2}`.
    pub fn dim(&self) -> usize {
        1 << (self.n / 2)
    }

    /// Largest residual of `e_i e_j + e_j e_i = ±2δ_ij`.
    pub fn relation_residual(&self) -> f64 {
        relation_residual(&self.gammas, self.signature)
    }
}

/// Largest residual of the Clifford relations for a list of generators.
pub fn relation_residual(gammas: &[CMatrix], signature: Signature) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in gammas.iter().enumerate() {
        for (j, b) in gammas.iter().enumerate().skip(i) {
            let mut r = a * b + b * a;
            if i == j {
                r -= identity(a.nrows()) * c(2.0 * signature.square(), 0.0);
            }
            worst = worst.max(r.norm());
        }
    }
    worst
}

pub fn build_clifford(n: usize, signature: Signature) -> Result<CliffordRep> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "Clifford generator count must be even and positive, got {n}"
        )));
    }
    if n > MAX_GENERATORS {
        return Err(Error::SizeCap(format!(
            "{n} Clifford generators exceeds the cap of {MAX_GENERATORS}"
        )));
    }
    let m = n / 2;
    let phase = match signature {
        Signature::Plus => ONE,
        Signature::Minus => I,
    };
    let mut gammas = Vec::with_capacity(n);
    for k in 0..m {
        for pauli in [sigma_x(), sigma_y()] {
            let mut g = identity(1);
            for slot in 0..m {
                let factor = match slot.cmp(&k) {
                    std::cmp::Ordering::Less => sigma_z(),
                    std::cmp::Ordering::Equal => pauli.clone(),
                    std::cmp::Ordering::Greater => identity(2),
                };
                g = kron(&g, &factor);
            }
            gammas.push(g * phase);
        }
    }
    let mut chirality = identity(1 << m);
    for g in &gammas {
        chirality *= g;
    }
    chirality *= (-I).powu(m as u32);
    Ok(CliffordRep {
        n,
        signature,
        gammas,
        chirality,
    })
}

/// Clifford action on `W ⊗ S`, trivial on the twisting factor `W`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedAction {
    pub rep: CliffordRep,
    pub dim_w: usize,
    pub action_matrices: Vec<CMatrix>,
}

impl TwistedAction {
    pub fn dim(&self) -> usize {
        self.dim_w * self.rep.dim()
    }

    /// Chirality `1_W ⊗ γ`.
    pub fn chirality(&self) -> CMatrix {
        kron(&identity(self.dim_w), &self.rep.chirality)
    }
}

pub fn twist(rep: &CliffordRep, dim_w: usize) -> Result<TwistedAction> {
    if dim_w == 0 {
        return Err(Error::InvalidArgument(
            "twisting dimension must be at least 1".into(),
        ));
    }
    let id = identity(dim_w);
    let action_matrices = rep.gammas.iter().map(|e| kron(&id, e)).collect();
    Ok(TwistedAction {
        rep: rep.clone(),
        dim_w,
        action_matrices,
    })
}

/// Hilbert–Schmidt orthonormal basis of `{X : X M_i = M_i X for all i}`.
///
/// The commutant is the joint null space of the maps `X ↦ M_i X − X M_i`;
/// a direction counts as null when its singular value falls below
/// [`COMMUTANT_RANK_RTOL`] times the largest.
///
/// When every `M_i` is normal the commutant also commutes with a random
/// Hermitian element `H` of the generated `*`-algebra, so the search is
/// restricted to matrices that are block diagonal in the eigenspaces of `H`.
/// Candidate null directions come from the Gram matrix of the restricted
/// maps and the rank decision from an SVD on those candidates.
pub fn commutant(matrices: &[CMatrix]) -> Result<Vec<CMatrix>> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::InvalidArgument("commutant of an empty list".into()))?;
    let d = crate::matrix::ensure_square(first)?;
    for m in matrices {
        if m.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "commutant inputs {:?} vs {:?}",
                m.shape(),
                (d, d)
            )));
        }
    }
    let (u, blocks) = invariant_frame(matrices, d)?;
    let coords: Vec<(usize, usize)> = blocks
        .iter()
        .flat_map(|&(off, size)| {
            (0..size).flat_map(move |b| (0..size).map(move |a| (off + a, off + b)))
        })
        .collect();
    let p = coords.len();
    let rotated: Vec<CMatrix> = matrices.iter().map(|m| u.adjoint() * m * &u).collect();
    // Gram entries ⟨E_ab, Σ_i [M̃_i*, [M̃_i, E_a'b']]⟩, expanded entrywise.
    let mut gram = CMatrix::zeros(p, p);
    for m in &rotated {
        let ma = m.adjoint();
        let pm = &ma * m;
        let qm = m * &ma;
        for (col, &(a2, b2)) in coords.iter().enumerate() {
            for (row, &(a, b)) in coords.iter().enumerate() {
                let mut z = -ma[(a, a2)] * m[(b2, b)] - m[(a, a2)] * ma[(b2, b)];
                if b == b2 {
                    z += pm[(a, a2)];
                }
                if a == a2 {
                    z += qm[(b2, b)];
                }
                gram[(row, col)] += z;
            }
        }
    }
    let eig = hermitian_eig(&gram)?;
    let top = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    let candidates: Vec<usize> = (0..p)
        .filter(|&i| eig.values[i] <= 1e-6 * top)
        .collect();
    if candidates.is_empty() {
        return Ok(Vec::new());
    }
    let to_matrix = |params: &[Complex64]| {
        let mut xt = CMatrix::zeros(d, d);
        for (&(a, b), &z) in coords.iter().zip(params.iter()) {
            xt[(a, b)] = z;
        }
        xt
    };
    let vc = CMatrix::from_fn(p, candidates.len(), |r, j| eig.vectors[(r, candidates[j])]);
    let mut stacked = CMatrix::zeros(rotated.len() * d * d, candidates.len());
    for j in 0..candidates.len() {
        let xt = to_matrix(vc.column(j).clone_owned().as_slice());
        for (i, m) in rotated.iter().enumerate() {
            let k = commutator(m, &xt);
            stacked
                .view_mut((i * d * d, j), (d * d, 1))
                .copy_from_slice(k.as_slice());
        }
    }
    let svd = stacked.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let cutoff = COMMUTANT_RANK_RTOL * top.sqrt();
    let basis = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &sv)| sv <= cutoff)
        .map(|(j, _)| &u * to_matrix((&vc * v_t.row(j).adjoint()).as_slice()) * u.adjoint())
        .collect();
    Ok(basis)
}

/// Fixed seed for the random algebra element, so results are reproducible.
const FRAME_SEED: u64 = 0x636f_6d6d;

/// Unitary `U` and blocks `(offset, size)` such that the commutant is block
/// diagonal in the columns of `U`. Falls back to a single block when some
/// input is not normal.
fn invariant_frame(ms: &[CMatrix], d: usize) -> Result<(CMatrix, Vec<(usize, usize)>)> {
    let normal = ms.iter().all(|m| {
        let a = m.adjoint();
        (m * &a - &a * m).norm() <= 1e-12 * m.norm_squared().max(1.0)
    });
    if !normal {
        return Ok((identity(d), vec![(0, d)]));
    }
    let mut r = crate::sample::rng(FRAME_SEED);
    let mut h = CMatrix::zeros(d, d);
    let mut add = |p: &CMatrix| {
        let (x, y): (f64, f64) = (r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        let pa = p.adjoint();
        h += (p + &pa) * c(x, 0.0) + (p - &pa) * c(0.0, y);
    };
    for (i, a) in ms.iter().enumerate() {
        add(a);
        for b in &ms[i..] {
            add(&(a * b));
        }
    }
    let eig = hermitian_eig(&h)?;
    let scale = eig.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut blocks = Vec::new();
    let mut start = 0;
    for k in 1..=d {
        if k == d || eig.values[k] - eig.values[k - 1] > 1e-8 * scale {
            blocks.push((start, k - start));
            start = k;
        }
    }
    Ok((eig.vectors, blocks))
}

/// `max_i ‖[X, M_i]‖` for a candidate commutant element.
pub fn commutes_with_all(x: &CMatrix, matrices: &[CMatrix]) -> f64 {
    matrices
        .iter()
        .map(|m| commutator(x, m).norm())
        .fold(0.0, f64::max)
}
