//! Quadratic forms `ℰ(x) = Tr(x* L x)` and the Dirichlet contraction property
//! `ℰ(f(x)) ≤ ‖f‖²_lip ℰ(x)` for Lipschitz `f` fixing zero.
//!
//! In finite dimensions every such form is closed, so only the contraction
//! inequality and its matrix amplifications are checked.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{c, ensure_hermitian, funcalc, identity, is_psd, kron, trace, CMatrix};
use crate::sample::{random_hermitian, stream};

/// Largest amplification accepted by [`complete_dirichlet_check`].
pub const MAX_AMPLIFICATION: usize = 3;

#[derive(Clone, Debug, PartialEq)]
enum Generator {
    Operator(CMatrix),
    Factor(CMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm {
    generator: Generator,
    dim: usize,
}

impl QuadraticForm {
    /// Form with a positive semidefinite generator `L`.
    pub fn from_generator(l: CMatrix) -> Result<Self> {
        ensure_hermitian(&l)?;
        let (_, min) = is_psd(&l, 0.0)?;
        if min < -1e-10 * l.norm().max(1.0) {
            return Err(Error::NotPositive(min));
        }
        let dim = l.nrows();
        Ok(Self {
            generator: Generator::Operator(l),
            dim,
        })
    }

    /// Form `‖S x‖²_HS`, i.e. generator `S*S`.
    pub fn from_factor(s: CMatrix) -> Result<Self> {
        let dim = crate::matrix::ensure_square(&s)?;
        Ok(Self {
            generator: Generator::Factor(s),
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generator(&self) -> CMatrix {
        match &self.generator {
            Generator::Operator(l) => l.clone(),
            Generator::Factor(s) => s.adjoint() * s,
        }
    }

    /// The form on `Mat_{dim·n}` with generator `L ⊗ 1_n`.
    pub fn amplify(&self, n: usize) -> Self {
        let id = identity(n);
        let generator = match &self.generator {
            Generator::Operator(l) => Generator::Operator(kron(l, &id)),
            Generator::Factor(s) => Generator::Factor(kron(s, &id)),
        };
        Self {
            generator,
            dim: self.dim * n,
        }
    }
}

/// `ℰ(x) = Tr(x* L x)`. Real and nonnegative for any `x` since `x* L x ⪰ 0`;
/// the factored form evaluates `‖S x‖²_HS`.
pub fn form_value(form: &QuadraticForm, x: &CMatrix) -> Result<f64> {
    if x.shape() != (form.dim, form.dim) {
        return Err(Error::DimensionMismatch(format!(
            "operand {:?} for a form on Mat_{}",
            x.shape(),
            form.dim
        )));
    }
    Ok(match &form.generator {
        Generator::Operator(l) => trace(&(x.adjoint() * l * x)).re,
        Generator::Factor(s) => (s * x).norm_squared(),
    })
}

/// Continuous piecewise-linear function with `f(0) = 0`.
///
/// `slopes[i]` applies on the `i`-th interval cut out by the sorted
/// `breakpoints`, so there is one more slope than breakpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzFn {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    label: String,
}

impl LipschitzFn {
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if slopes.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "{} breakpoints need {} slopes, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                slopes.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1])
            || breakpoints.iter().chain(&slopes).any(|v| !v.is_finite())
        {
            return Err(Error::InvalidArgument(
                "breakpoints must be finite and strictly increasing".into(),
            ));
        }
        Ok(Self {
            breakpoints,
            slopes,
            label: label.into(),
        })
    }

    pub fn identity() -> Self {
        Self::new(vec![], vec![1.0], "identity").unwrap()
    }

    pub fn scaled_identity(s: f64) -> Self {
        Self::new(vec![], vec![s], format!("{s}·r")).unwrap()
    }

    pub fn abs() -> Self {
        Self::new(vec![0.0], vec![-1.0, 1.0], "abs").unwrap()
    }

    /// `clamp(r, lo, hi)` with `lo ≤ 0 ≤ hi`.
    pub fn clamp(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < 0.0 && 0.0 < hi) {
            return Err(Error::InvalidArgument(format!(
                "clamp interval [{lo}, {hi}] must contain 0 in its interior"
            )));
        }
        Self::new(vec![lo, hi], vec![0.0, 1.0, 0.0], format!("clamp[{lo},{hi}]"))
    }

    pub fn positive_part() -> Self {
        Self::new(vec![0.0], vec![0.0, 1.0], "positive_part").unwrap()
    }

    /// Three linear pieces with random breakpoints in `[−2, 2]` and slopes in
    /// `[−1.5, 1.5]`.
    pub fn random_three_piece<R: Rng + ?Sized>(r: &mut R) -> Self {
        let mut b = [r.random_range(-2.0..2.0), r.random_range(-2.0..2.0)];
        b.sort_by(f64::total_cmp);
        if b[1] - b[0] < 1e-3 {
            b[1] = b[0] + 1e-3;
        }
        let slopes = (0..3).map(|_| r.random_range(-1.5..1.5)).collect();
        Self::new(b.to_vec(), slopes, "random_three_piece").unwrap()
    }

    /// The standard family: `|r|`, `clamp(r, −1, 1)`, `r₊`, and `extra` random
    /// three-piece functions drawn from `seed`.
    pub fn standard_family(extra: usize, seed: u64) -> Vec<Self> {
        let mut r = crate::sample::rng(seed);
        let mut fns = vec![
            Self::abs(),
            Self::clamp(-1.0, 1.0).unwrap(),
            Self::positive_part(),
        ];
        fns.extend((0..extra).map(|_| Self::random_three_piece(&mut r)));
        fns
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn lip_norm(&self) -> f64 {
        self.slopes.iter().fold(0.0, |m, s| m.max(s.abs()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        // ∫₀ˣ slope(u) du, accumulated interval by interval.
        let (lo, hi, sign) = if x >= 0.0 { (0.0, x, 1.0) } else { (x, 0.0, -1.0) };
        let mut total = 0.0;
        let mut left = f64::NEG_INFINITY;
        for (i, &slope) in self.slopes.iter().enumerate() {
            let right = self.breakpoints.get(i).copied().unwrap_or(f64::INFINITY);
            let a = lo.max(left);
            let b = hi.min(right);
            if b > a {
                total += slope * (b - a);
            }
            left = right;
        }
        sign * total
    }
}

fn check_samples(
    form: &QuadraticForm,
    fns: &[LipschitzFn],
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if fns.is_empty() {
        return Err(Error::InvalidArgument("no Lipschitz functions given".into()));
    }
    let n = form.dim;
    let per_sample: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut r = stream(seed, k);
            // Spread magnitudes over [1/4, 4] so clamps bind on some samples.
            let scale = 2f64.powf(r.random_range(-2.0..2.0));
            let x = random_hermitian(n, &mut r) * c(scale, 0.0);
            let base = form_value(form, &x)?;
            let mut worst = f64::NEG_INFINITY;
            for f in fns {
                let fx = funcalc(&x, |v| f.eval(v))?;
                let v = form_value(form, &fx)? - f.lip_norm().powi(2) * base;
                worst = worst.max(v);
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    Ok(per_sample.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Largest signed violation `ℰ(f(x)) − ‖f‖²_lip ℰ(x)` over seeded
/// self-adjoint samples and the given functions. Nonpositive values mean the
/// inequality held everywhere.
pub fn dirichlet_check(
    form: &QuadraticForm,
    fns: &[LipschitzFn],
    samples: usize,
    seed: u64,
) -> Result<f64> {
    check_samples(form, fns, samples, seed)
}

/// [`dirichlet_check`] for the amplified form on `Mat_{dim·n_amp}`.
pub fn complete_dirichlet_check(
    form: &QuadraticForm,
    n_amp: usize,
    fns: &[LipschitzFn],
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if n_amp == 0 || n_amp > MAX_AMPLIFICATION {
        return Err(Error::SizeCap(format!(
            "amplification {n_amp} outside 1..={MAX_AMPLIFICATION}"
        )));
    }
    check_samples(&form.amplify(n_amp), fns, samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{diag, zeros};
    use crate::sample::{random_complex, random_psd, rng};
    use approx::assert_abs_diff_eq;

    #[test]
    fn diagonal_form_value() {
        let f = QuadraticForm::from_generator(diag(&[2.0, 5.0])).unwrap();
        assert_abs_diff_eq!(form_value(&f, &diag(&[1.0, -1.0])).unwrap(), 7.0);
        assert_eq!(form_value(&f, &zeros(2)).unwrap(), 0.0);
        assert!(form_value(&f, &zeros(3)).is_err());
    }

    #[test]
    fn form_is_quadratic() {
        let mut r = rng(1);
        let f = QuadraticForm::from_generator(random_psd(4, &mut r)).unwrap();
        let x = random_hermitian(4, &mut r);
        let base = form_value(&f, &x).unwrap();
        let scaled = form_value(&f, &(&x * c(-2.5, 0.0))).unwrap();
        assert_abs_diff_eq!(scaled, 6.25 * base, epsilon = 1e-10 * base.max(1.0));
    }

    #[test]
    fn factor_route_matches_trace_route() {
        let mut r = rng(2);
        for _ in 0..20 {
            let s = random_complex(4, &mut r);
            let x = random_complex(4, &mut r);
            let a = QuadraticForm::from_factor(s.clone()).unwrap();
            let b = QuadraticForm::from_generator(s.adjoint() * &s).unwrap();
            let (va, vb) = (form_value(&a, &x).unwrap(), form_value(&b, &x).unwrap());
            assert_abs_diff_eq!(va, vb, epsilon = 1e-10 * va.max(1.0));
        }
    }

    #[test]
    fn rejects_non_positive_generator() {
        assert!(QuadraticForm::from_generator(diag(&[1.0, -1.0])).is_err());
    }

    #[test]
    fn lipschitz_functions() {
        let abs = LipschitzFn::abs();
        assert_eq!(abs.eval(-3.0), 3.0);
        assert_eq!(abs.eval(2.0), 2.0);
        let cl = LipschitzFn::clamp(-1.0, 1.0).unwrap();
        assert_eq!(cl.eval(-3.0), -1.0);
        assert_eq!(cl.eval(0.5), 0.5);
        assert_eq!(cl.eval(7.0), 1.0);
        assert_eq!(cl.lip_norm(), 1.0);
        let pos = LipschitzFn::positive_part();
        assert_eq!(pos.eval(-2.0), 0.0);
        assert_eq!(pos.eval(2.0), 2.0);
        let mut r = rng(3);
        for _ in 0..50 {
            let f = LipschitzFn::random_three_piece(&mut r);
            assert_eq!(f.eval(0.0), 0.0);
            // Lipschitz bound holds pointwise.
            for (a, b) in [(-3.0, 2.5), (-0.1, 0.2), (1.0, 1.7)] {
                assert!((f.eval(a) - f.eval(b)).abs() <= f.lip_norm() * (a - b).abs() + 1e-12);
            }
        }
        assert!(LipschitzFn::new(vec![1.0, 0.0], vec![1.0, 1.0, 1.0], "bad").is_err());
        assert!(LipschitzFn::new(vec![0.0], vec![1.0], "bad").is_err());
        assert!(LipschitzFn::clamp(0.5, 1.0).is_err());
    }

    #[test]
    fn identity_is_equality() {
        let f = QuadraticForm::from_generator(random_psd(3, &mut rng(4))).unwrap();
        let v = dirichlet_check(&f, &[LipschitzFn::identity()], 50, 1).unwrap();
        assert!(v.abs() <= 1e-12, "{v}");
    }

    #[test]
    fn half_scaling_is_equality() {
        let f = QuadraticForm::from_generator(random_psd(3, &mut rng(5))).unwrap();
        let v = dirichlet_check(&f, &[LipschitzFn::scaled_identity(0.5)], 50, 1).unwrap();
        assert!(v.abs() <= 1e-12, "{v}");
    }

    #[test]
    fn random_forms_satisfy_contraction() {
        let fns = LipschitzFn::standard_family(3, 9);
        for (seed, n) in [(1u64, 2usize), (2, 4), (3, 6)] {
            let f = QuadraticForm::from_generator(random_psd(n, &mut rng(seed))).unwrap();
            assert!(dirichlet_check(&f, &fns, 200, seed).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn amplification() {
        let fns = LipschitzFn::standard_family(1, 3);
        let f = QuadraticForm::from_generator(random_psd(3, &mut rng(7))).unwrap();
        assert_eq!(
            complete_dirichlet_check(&f, 1, &fns, 30, 5).unwrap(),
            dirichlet_check(&f, &fns, 30, 5).unwrap()
        );
        let zero = QuadraticForm::from_generator(zeros(2)).unwrap();
        assert_eq!(complete_dirichlet_check(&zero, 3, &fns, 30, 5).unwrap(), 0.0);
        assert!(complete_dirichlet_check(&f, 2, &fns, 100, 6).unwrap() <= 1e-9);
        assert!(complete_dirichlet_check(&f, 4, &fns, 1, 1).is_err());
        assert!(dirichlet_check(&f, &[], 1, 1).is_err());
    }
}
