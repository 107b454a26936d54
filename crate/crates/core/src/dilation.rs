//! Repeated-interaction dilation of a GKSL semigroup.
//!
//! Each time step couples the system `ℂⁿ` to a fresh slot `ℂ^{1+d}` (vacuum
//! plus one direction per jump operator) through the unitary
//! `V = exp(−iG)`, `G = dt·H⊗1 + √dt·Σ_k (i L_k⊗|k⟩⟨0| − i L_k*⊗|0⟩⟨k|)`.
//! Compressing to the slot vacuum gives a unital CP map `Φ_dt` with
//! `Φ_{t/N}^N → e^{tℒ}`; the full flow `j_k(x) = U_k*(x⊗1)U_k` lives on the toy
//! Fock space `ℂⁿ ⊗ (ℂ^{1+d})^{⊗N}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{c, commutator, ensure_hermitian, expm, identity, kron, op_norm, CMatrix, CVector, I};
use crate::qds::{evolve, lindblad_generator, Superoperator};

/// Largest toy Fock space dimension `n(1+d)^N` for which the full flow is built.
pub const FULL_FLOW_CAP: usize = 4096;

/// `⟨E(u), E(v)⟩ = exp⟨u, v⟩` for exponential vectors.
pub fn exp_vector_inner(u: &CVector, v: &CVector) -> Result<Complex64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "exponential vectors of lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    Ok(u.dotc(v).exp())
}

fn check_jumps(hm: &CMatrix, ls: &[CMatrix]) -> Result<usize> {
    ensure_hermitian(hm)?;
    let n = hm.nrows();
    if let Some(l) = ls.iter().find(|l| l.shape() != (n, n)) {
        return Err(Error::DimensionMismatch(format!(
            "jump operator {:?} on a {n}-dimensional system",
            l.shape()
        )));
    }
    Ok(n)
}

/// The interaction unitary on `ℂⁿ ⊗ ℂ^{1+d}`.
pub fn slot_unitary(hm: &CMatrix, ls: &[CMatrix], dt: f64) -> Result<CMatrix> {
    check_jumps(hm, ls)?;
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("time step {dt}")));
    }
    let s = ls.len() + 1;
    let mut g = kron(hm, &identity(s)) * c(dt, 0.0);
    let root = c(dt.sqrt(), 0.0);
    for (k, l) in ls.iter().enumerate() {
        let up = kron(l, &crate::matrix::unit(s, k + 1, 0)) * I;
        g += (&up + up.adjoint()) * root;
    }
    expm(&(g * -I), 1.0)
}

/// Kraus operators `K_α = ⟨α|V|0⟩` of the vacuum compression.
fn slot_kraus(v: &CMatrix, n: usize, s: usize) -> Vec<CMatrix> {
    (0..s)
        .map(|alpha| CMatrix::from_fn(n, n, |a, b| v[(a * s + alpha, b * s)]))
        .collect()
}

/// `Φ_dt(x) = ⟨0| V*(x⊗1)V |0⟩`.
pub fn one_slot_map(hm: &CMatrix, ls: &[CMatrix], dt: f64) -> Result<Superoperator> {
    let n = check_jumps(hm, ls)?;
    let v = slot_unitary(hm, ls, dt)?;
    let mut phi = Superoperator::zero(n);
    for k in slot_kraus(&v, n, ls.len() + 1) {
        phi = &phi + &Superoperator::sandwich(&k.adjoint(), &k)?;
    }
    Ok(phi)
}

fn power(phi: &Superoperator, mut exp: usize) -> Superoperator {
    let mut result = Superoperator::identity(phi.dim());
    let mut base = phi.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            result = result.compose(&base);
        }
        base = base.compose(&base);
        exp >>= 1;
    }
    result
}

/// `‖Φ_{t/N}^N − e^{tℒ}‖` in the superoperator norm.
pub fn vacuum_dilation_error(hm: &CMatrix, ls: &[CMatrix], t: f64, slots: usize) -> Result<f64> {
    if slots == 0 {
        return Err(Error::InvalidArgument("at least one slot".into()));
    }
    let exact = evolve(&lindblad_generator(hm, ls)?, t)?;
    let phi = one_slot_map(hm, ls, t / slots as f64)?;
    Ok(power(&phi, slots).distance(&exact))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(rename = "N")]
    pub slots: usize,
    pub dt: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    /// Empirical order: minus the least-squares slope of `log error` against `log N`.
    pub order: f64,
}

impl ConvergenceStudy {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,dt,error\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:e},{:e}\n", r.slots, r.dt, r.error));
        }
        out
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub fn convergence_study(
    hm: &CMatrix,
    ls: &[CMatrix],
    t: f64,
    slot_counts: &[usize],
) -> Result<ConvergenceStudy> {
    if slot_counts.len() < 2 {
        return Err(Error::InvalidArgument(
            "a convergence study needs at least two slot counts".into(),
        ));
    }
    let rows = slot_counts
        .iter()
        .map(|&slots| {
            Ok(ConvergenceRow {
                slots,
                dt: t / slots as f64,
                error: vacuum_dilation_error(hm, ls, t, slots)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| (r.slots as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.error.ln()).collect();
    let order = -fit_slope(&xs, &ys);
    Ok(ConvergenceStudy { rows, order })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ToyFockModel {
    sys_dim: usize,
    noise_dim: usize,
    slots: usize,
    dt: f64,
}

impl ToyFockModel {
    /// Model for evolution up to time `t` in `slots` steps.
    pub fn new(sys_dim: usize, noise_dim: usize, slots: usize, t: f64) -> Result<Self> {
        if sys_dim == 0 || slots == 0 || !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "toy Fock model needs n ≥ 1, N ≥ 1, t > 0 (got n={sys_dim}, N={slots}, t={t})"
            )));
        }
        Ok(Self {
            sys_dim,
            noise_dim,
            slots,
            dt: t / slots as f64,
        })
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn noise_dim(&self) -> usize {
        self.noise_dim
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn slot_dim(&self) -> usize {
        self.noise_dim + 1
    }

    /// `n(1+d)^N`, or `None` on overflow.
    pub fn total_dim(&self) -> Option<usize> {
        (0..self.slots).try_fold(self.sys_dim, |acc, _| acc.checked_mul(self.slot_dim()))
    }

    fn ensure_cap(&self) -> Result<usize> {
        match self.total_dim() {
            Some(d) if d <= FULL_FLOW_CAP => Ok(d),
            other => Err(Error::SizeCap(format!(
                "toy Fock space dimension {} exceeds {FULL_FLOW_CAP}",
                other.map_or("overflow".to_string(), |d| d.to_string())
            ))),
        }
    }

    /// Distance between consecutive indices of slot `k` (1-based).
    fn stride(&self, k: usize) -> usize {
        self.slot_dim().pow((self.slots - k) as u32)
    }

    /// `W·M`, where `W` acts on system ⊗ slot `k` as the `ns × ns` matrix `op`.
    fn left_local(&self, op: &CMatrix, m: &CMatrix, k: usize) -> CMatrix {
        let (n, s) = (self.sys_dim, self.slot_dim());
        let stride = self.stride(k);
        let sys_stride = self.stride(0);
        let offsets: Vec<usize> = (0..n * s)
            .map(|loc| (loc / s) * sys_stride + (loc % s) * stride)
            .collect();
        let mut out = CMatrix::zeros(m.nrows(), m.ncols());
        let mut buf = vec![Complex64::default(); n * s];
        for hi in 0..self.slot_dim().pow((k - 1) as u32) {
            for lo in 0..stride {
                let base = hi * s * stride + lo;
                for col in 0..m.ncols() {
                    for (b, off) in buf.iter_mut().zip(&offsets) {
                        *b = m[(base + off, col)];
                    }
                    for (i, off) in offsets.iter().enumerate() {
                        let mut acc = Complex64::default();
                        for (j, b) in buf.iter().enumerate() {
                            acc += op[(i, j)] * b;
                        }
                        out[(base + off, col)] = acc;
                    }
                }
            }
        }
        out
    }

    /// `W* M W` for the local operator `W`.
    fn conjugate_local(&self, op: &CMatrix, m: &CMatrix, k: usize) -> CMatrix {
        let opd = op.adjoint();
        let mw = self.left_local(&opd, &m.adjoint(), k).adjoint();
        self.left_local(&opd, &mw, k)
    }

    /// `x ⊗ 1` on the whole toy Fock space.
    pub fn embed(&self, x: &CMatrix) -> Result<CMatrix> {
        let total = self.ensure_cap()?;
        if x.shape() != (self.sys_dim, self.sys_dim) {
            return Err(Error::DimensionMismatch(format!(
                "system operator {:?} for n = {}",
                x.shape(),
                self.sys_dim
            )));
        }
        Ok(kron(x, &identity(total / self.sys_dim)))
    }

    /// `[j_0(x), …, j_N(x)]` with `j_k(x) = U_k*(x⊗1)U_k`, `U_k = V_k⋯V_1`.
    pub fn full_flow(&self, hm: &CMatrix, ls: &[CMatrix], x: &CMatrix) -> Result<Vec<CMatrix>> {
        let n = check_jumps(hm, ls)?;
        if n != self.sys_dim || ls.len() != self.noise_dim {
            return Err(Error::DimensionMismatch(format!(
                "model (n={}, d={}) given n={n}, d={}",
                self.sys_dim,
                self.noise_dim,
                ls.len()
            )));
        }
        let v = slot_unitary(hm, ls, self.dt)?;
        let start = self.embed(x)?;
        Ok((0..=self.slots)
            .map(|k| {
                // U_k*(x⊗1)U_k = V_1*⋯V_k* (x⊗1) V_k⋯V_1
                (1..=k)
                    .rev()
                    .fold(start.clone(), |m, slot| self.conjugate_local(&v, &m, slot))
            })
            .collect())
    }

    /// Distance of `m` from `Y ⊗ 1` on slots `k+1..N`, where `Y` is read off
    /// the block with those slots in the vacuum.
    pub fn adaptedness_residual(&self, m: &CMatrix, k: usize) -> Result<f64> {
        let total = self.ensure_cap()?;
        if m.shape() != (total, total) || k > self.slots {
            return Err(Error::DimensionMismatch(format!(
                "operator {:?} at step {k} on a {total}-dimensional space",
                m.shape()
            )));
        }
        let tail = self.stride(k);
        let head = total / tail;
        let y = CMatrix::from_fn(head, head, |i, j| m[(i * tail, j * tail)]);
        Ok(op_norm(&(m - kron(&y, &identity(tail)))))
    }

    /// Compression of a full-space operator to the joint vacuum of all slots.
    pub fn vacuum_block(&self, m: &CMatrix) -> Result<CMatrix> {
        let total = self.ensure_cap()?;
        let stride = total / self.sys_dim;
        Ok(CMatrix::from_fn(self.sys_dim, self.sys_dim, |a, b| {
            m[(a * stride, b * stride)]
        }))
    }
}

/// Worst `*`-homomorphism residuals of the flow over `(x, y)`:
/// `max_k ‖j_k(xy) − j_k(x)j_k(y)‖` and `max_k ‖j_k(x*) − j_k(x)*‖`.
pub fn homomorphism_residual(
    model: &ToyFockModel,
    hm: &CMatrix,
    ls: &[CMatrix],
    x: &CMatrix,
    y: &CMatrix,
) -> Result<(f64, f64)> {
    let jx = model.full_flow(hm, ls, x)?;
    let jy = model.full_flow(hm, ls, y)?;
    let jxy = model.full_flow(hm, ls, &(x * y))?;
    let jxs = model.full_flow(hm, ls, &x.adjoint())?;
    let mut mult = 0.0f64;
    let mut star = 0.0f64;
    for k in 0..jx.len() {
        mult = mult.max(op_norm(&(&jxy[k] - &jx[k] * &jy[k])));
        star = star.max(op_norm(&(&jxs[k] - jx[k].adjoint())));
    }
    Ok((mult, star))
}

/// The maps `θ^μ_ν`, `μ, ν ∈ {0, …, d}`, of the flow in the gauge-free
/// convention: `θ⁰₀ = ℒ`, `θ⁰_k = [L_k*, ·]`, `θ^k_0 = [·, L_k]`, `θ^k_l = 0`.
#[derive(Clone, Debug)]
pub struct StructureMaps {
    noise_dim: usize,
    maps: Vec<Superoperator>,
}

impl StructureMaps {
    pub fn noise_dim(&self) -> usize {
        self.noise_dim
    }

    pub fn get(&self, mu: usize, nu: usize) -> &Superoperator {
        &self.maps[mu * (self.noise_dim + 1) + nu]
    }

    /// `max_{μν} ‖θ^μ_ν(xy) − θ^μ_ν(x)y − xθ^μ_ν(y) − Σ_k θ^μ_k(x)θ^k_ν(y)‖`.
    pub fn relation_residual(&self, x: &CMatrix, y: &CMatrix) -> f64 {
        let d = self.noise_dim;
        let xy = x * y;
        let tx: Vec<CMatrix> = self.maps.iter().map(|m| m.apply(x)).collect();
        let ty: Vec<CMatrix> = self.maps.iter().map(|m| m.apply(y)).collect();
        let at = |t: &[CMatrix], mu: usize, nu: usize| t[mu * (d + 1) + nu].clone();
        let mut worst = 0.0f64;
        for mu in 0..=d {
            for nu in 0..=d {
                let mut r = self.get(mu, nu).apply(&xy) - at(&tx, mu, nu) * y - x * at(&ty, mu, nu);
                for k in 1..=d {
                    r -= at(&tx, mu, k) * at(&ty, k, nu);
                }
                worst = worst.max(op_norm(&r));
            }
        }
        worst
    }

    /// `max_{μν} ‖θ^μ_ν(x)* − θ^ν_μ(x*)‖`.
    pub fn adjoint_residual(&self, x: &CMatrix) -> f64 {
        let d = self.noise_dim;
        let xs = x.adjoint();
        let mut worst = 0.0f64;
        for mu in 0..=d {
            for nu in 0..=d {
                let r = self.get(mu, nu).apply(x).adjoint() - self.get(nu, mu).apply(&xs);
                worst = worst.max(op_norm(&r));
            }
        }
        worst
    }
}

pub fn structure_maps(hm: &CMatrix, ls: &[CMatrix]) -> Result<StructureMaps> {
    let n = check_jumps(hm, ls)?;
    let d = ls.len();
    let mut maps = vec![Superoperator::zero(n); (d + 1) * (d + 1)];
    maps[0] = lindblad_generator(hm, ls)?;
    for (k, l) in ls.iter().enumerate() {
        let ld = l.adjoint();
        maps[k + 1] = Superoperator::from_fn(n, |x| commutator(&ld, x))?;
        maps[(k + 1) * (d + 1)] = Superoperator::from_fn(n, |x| commutator(x, l))?;
    }
    Ok(StructureMaps { noise_dim: d, maps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{sigma_minus, sigma_x, sigma_z, unitarity_residual, zeros};
    use crate::qds::is_cp;
    use crate::sample::{random_complex, random_hermitian, random_vector, rng};
    use approx::assert_abs_diff_eq;

    #[test]
    fn exponential_vectors() {
        let z = CVector::zeros(3);
        assert_eq!(exp_vector_inner(&z, &z).unwrap(), c(1.0, 0.0));
        let u = CVector::from_vec(vec![c(std::f64::consts::PI.sqrt(), 0.0)]);
        let v = &u * I;
        let e = exp_vector_inner(&u, &v).unwrap();
        assert!((e - c(-1.0, 0.0)).norm() < 1e-12);
        assert!(exp_vector_inner(&u, &z).is_err());
        let u = random_vector(4, &mut rng(1));
        let g = CMatrix::from_fn(2, 2, |i, j| {
            let a = if i == 0 { &z4() } else { &u };
            let b = if j == 0 { &z4() } else { &u };
            exp_vector_inner(a, b).unwrap()
        });
        assert!(crate::matrix::is_psd(&g, 1e-12).unwrap().0);
    }

    fn z4() -> CVector {
        CVector::zeros(4)
    }

    #[test]
    fn slot_unitary_cases() {
        let v = slot_unitary(&zeros(2), &[], 0.3).unwrap();
        assert!((v - identity(2)).norm() < 1e-14);
        let h = sigma_x();
        let v = slot_unitary(&h, &[], 0.3).unwrap();
        let expected = expm(&(&h * -I), 0.3).unwrap();
        assert!((v - expected).norm() < 1e-12);
        let mut r = rng(2);
        for dt in [1e-1, 1e-2, 1e-3] {
            let h = random_hermitian(3, &mut r);
            let ls = [random_complex(3, &mut r), random_complex(3, &mut r)];
            let v = slot_unitary(&h, &ls, dt).unwrap();
            assert_eq!(v.nrows(), 9);
            assert!(unitarity_residual(&v) <= 1e-10);
        }
        assert!(slot_unitary(&random_complex(2, &mut r), &[], 0.1).is_err());
    }

    #[test]
    fn one_slot_map_is_unital_cp_and_first_order() {
        let h = sigma_z();
        let ls = [sigma_minus()];
        let gen = lindblad_generator(&h, &ls).unwrap();
        let mut errs = Vec::new();
        for dt in [1e-2, 1e-3, 1e-4] {
            let phi = one_slot_map(&h, &ls, dt).unwrap();
            assert!(phi.unitality_residual() <= 1e-12);
            let diff = (&phi - &Superoperator::identity(2)).scale(1.0 / dt);
            errs.push(diff.distance(&gen));
        }
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
        assert!(errs[2] < 1e-3);
        let phi = one_slot_map(&zeros(2), &ls, 1.0).unwrap();
        assert!(is_cp(&phi, 1e-9).unwrap().1 >= -1e-9);
        assert!(phi.unitality_residual() <= 1e-12);
    }

    #[test]
    fn vacuum_error_cases() {
        let h = sigma_x();
        for n in [1, 3, 17] {
            assert!(vacuum_dilation_error(&h, &[], 0.7, n).unwrap() <= 1e-10);
        }
        let ls = [sigma_minus()];
        assert_eq!(vacuum_dilation_error(&sigma_z(), &ls, 0.0, 5).unwrap(), 0.0);
        let e1 = vacuum_dilation_error(&sigma_z(), &ls, 1.0, 1024).unwrap();
        let e2 = vacuum_dilation_error(&sigma_z(), &ls, 1.0, 2048).unwrap();
        assert!(e2 <= 0.5 * e1 + 1e-6, "{e1} {e2}");
        assert!(vacuum_dilation_error(&h, &[], 1.0, 0).is_err());
    }

    #[test]
    fn convergence_order() {
        let counts: Vec<usize> = (7..=12).map(|p| 1 << p).collect();
        let study = convergence_study(&sigma_z(), &[sigma_minus()], 1.0, &counts).unwrap();
        assert!(study.order >= 0.9, "{}", study.order);
        let csv = study.to_csv();
        assert!(csv.starts_with("N,dt,error\n128,"));
        assert_eq!(csv.lines().count(), 7);
    }

    #[test]
    fn full_flow_basics() {
        let (h, ls) = (sigma_z(), [sigma_minus()]);
        let model = ToyFockModel::new(2, 1, 6, 1.0).unwrap();
        assert_eq!(model.total_dim(), Some(128));
        let mut r = rng(3);
        let x = random_complex(2, &mut r);
        let y = random_complex(2, &mut r);
        let flow = model.full_flow(&h, &ls, &x).unwrap();
        assert_eq!(flow.len(), 7);
        assert!((&flow[0] - model.embed(&x).unwrap()).norm() == 0.0);
        let (mult, star) = homomorphism_residual(&model, &h, &ls, &x, &y).unwrap();
        assert!(mult <= 1e-9 && star <= 1e-9, "{mult} {star}");
        for (k, jk) in flow.iter().enumerate() {
            assert!(model.adaptedness_residual(jk, k).unwrap() <= 1e-12);
        }
        // j_1 genuinely acts on slot 1.
        assert!(model.adaptedness_residual(&flow[1], 0).unwrap() > 1e-3);
        let phi = one_slot_map(&h, &ls, model.dt()).unwrap();
        let expected = power(&phi, 6).apply(&x);
        let got = model.vacuum_block(&flow[6]).unwrap();
        assert!((got - expected).norm() <= 1e-10);
    }

    #[test]
    fn full_flow_cap() {
        let model = ToyFockModel::new(2, 1, 12, 1.0).unwrap();
        assert!(model.full_flow(&sigma_z(), &[sigma_minus()], &sigma_x()).is_err());
        assert!(ToyFockModel::new(2, 1, 0, 1.0).is_err());
        let model = ToyFockModel::new(2, 2, 3, 1.0).unwrap();
        assert!(model.full_flow(&sigma_z(), &[sigma_minus()], &sigma_x()).is_err());
    }

    #[test]
    fn local_action_matches_dense_embedding() {
        let model = ToyFockModel::new(2, 1, 3, 1.0).unwrap();
        let op = random_complex(4, &mut rng(4));
        let m = random_complex(16, &mut rng(5));
        let s = 2;
        // system ⊗ slot1 ⊗ slot2 ⊗ slot3; move slot k next to the system.
        let swap = |k: usize| -> CMatrix {
            let mut p = zeros(16);
            for idx in 0..16 {
                let mut digits = [idx / 8, (idx / 4) % 2, (idx / 2) % 2, idx % 2];
                digits.swap(1, k);
                let j = digits[0] * 8 + digits[1] * 4 + digits[2] * 2 + digits[3];
                p[(j, idx)] = c(1.0, 0.0);
            }
            p
        };
        for k in 1..=3 {
            let p = swap(k);
            let dense = p.transpose() * kron(&op, &identity(s * s)) * &p;
            let got = model.left_local(&op, &m, k);
            assert!((got - &dense * &m).norm() < 1e-12);
        }
    }

    #[test]
    fn structure_relations() {
        let mut r = rng(6);
        for n in 1..=4 {
            let h = random_hermitian(n, &mut r);
            let ls = [random_complex(n, &mut r), random_complex(n, &mut r)];
            let maps = structure_maps(&h, &ls).unwrap();
            let (x, y) = (random_complex(n, &mut r), random_complex(n, &mut r));
            assert!(maps.relation_residual(&x, &y) <= 1e-10);
            assert!(maps.adjoint_residual(&x) <= 1e-12);
            assert_eq!(maps.get(1, 2).rep().norm(), 0.0);
        }
    }

    #[test]
    fn structure_corner_is_generator() {
        let (h, ls) = (sigma_z(), [sigma_minus()]);
        let maps = structure_maps(&h, &ls).unwrap();
        let gen = lindblad_generator(&h, &ls).unwrap();
        assert!(maps.get(0, 0).distance(&gen) <= 1e-12);
        let x = sigma_x();
        let y = random_complex(2, &mut rng(7));
        let lhs = gen.apply(&(&x * &y)) - gen.apply(&x) * &y - &x * gen.apply(&y);
        let l = &ls[0];
        let rhs = commutator(&l.adjoint(), &x) * commutator(&y, l);
        assert!((lhs - rhs).norm() <= 1e-12);
    }

    #[test]
    fn hamiltonian_only_structure() {
        let maps = structure_maps(&sigma_x(), &[]).unwrap();
        assert_eq!(maps.noise_dim(), 0);
        let x = random_complex(2, &mut rng(8));
        let expected = commutator(&sigma_x(), &x) * I;
        assert_abs_diff_eq!((maps.get(0, 0).apply(&x) - expected).norm(), 0.0, epsilon = 1e-12);
    }
}
