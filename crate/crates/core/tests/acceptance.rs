//! Acceptance suite: one PASS/FAIL line per criterion, each with its tolerance
//! and a wall-clock budget. Exits nonzero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ncg_core::clifford::{build_clifford, commutant, twist, Signature};
use ncg_core::dilation::{convergence_study, homomorphism_residual, structure_maps, ToyFockModel};
use ncg_core::dirichlet::{complete_dirichlet_check, dirichlet_check, LipschitzFn, QuadraticForm};
use ncg_core::homogeneous::{
    casimir_generator, cubic_dirac_square, dirac_square_spectrum_symmetric, smoothness_constant,
    su2_irrep, tensor_laplacian_check, verify_commutator_lemma, Spin, KAPPA_S2,
};
use ncg_core::matrix::{hermitian_eig, sigma_minus, sigma_z, CMatrix};
use ncg_core::qds::{
    check_covariance, endomorphism_laplacian_generator, evolve, group_samples,
    hermitian_from_skew, is_cp, kraus_heat_semigroup, Superoperator,
};
use ncg_core::sample::{random_complex, random_hermitian, random_psd, rng, stream};
use ncg_core::triple::product_square_study;
use ncg_core::Result;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn s2_spectrum() -> Result<Outcome> {
    let spectrum = dirac_square_spectrum_symmetric(Spin::from_two_j(21))?;
    let mut worst = 0.0f64;
    let mut counts_ok = spectrum.entries.len() == 11;
    for (k, &(value, mult)) in spectrum.entries.iter().enumerate() {
        let expected = ((k + 1) * (k + 1)) as f64;
        worst = worst.max((value - expected).abs());
        counts_ok &= mult == 4 * (k + 1);
    }
    // Diagonalize the sector matrices themselves, not just the closed form.
    for two_j in (1..=21).step_by(2) {
        let irrep = su2_irrep(Spin::from_two_j(two_j));
        let dsq = cubic_dirac_square(&irrep, KAPPA_S2 / 8.0)?;
        let k = (two_j as usize - 1) / 2;
        let expected = ((k + 1) * (k + 1)) as f64;
        for v in hermitian_eig(&dsq.matrix)?.values {
            worst = worst.max((v - expected).abs());
        }
    }
    outcome(
        counts_ok && worst <= 1e-10,
        format!("max |λ − (k+1)²| = {worst:.3e} (tol 1e-10), multiplicities 4(k+1): {counts_ok}"),
    )
}

fn product_decomposition() -> Result<Outcome> {
    let worst = product_square_study(2024, 100, 8)?;
    outcome(
        worst <= 1e-12,
        format!("max ‖D² − D_M²⊗1 − 1⊗D_F²‖ = {worst:.3e} over 100 pairs (tol 1e-12)"),
    )
}

fn commutant_dimension() -> Result<Outcome> {
    let mut bad = Vec::new();
    for n in [2, 4] {
        for sig in [Signature::Plus, Signature::Minus] {
            let rep = build_clifford(n, sig)?;
            for dim_w in 1..=3 {
                let action = twist(&rep, dim_w)?;
                let dim = commutant(&action.action_matrices)?.len();
                if dim != dim_w * dim_w {
                    bad.push(format!("n={n} {sig:?} dim_W={dim_w}: {dim}"));
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("commutant dimension = dim_W² for 12 cases; mismatches: {bad:?}"),
    )
}

fn cp_battery() -> Result<Outcome> {
    let mut worst = f64::INFINITY;
    for k in 0..50u64 {
        let mut r = stream(404, k);
        let dim = 1 + (k as usize % 6);
        let dsq = random_psd(dim, &mut r);
        for t in [0.1, 1.0, 10.0] {
            let (_, min) = is_cp(&kraus_heat_semigroup(&dsq, t)?, 1e-9)?;
            worst = worst.min(min);
        }
    }
    let transpose = Superoperator::from_fn(3, |x| x.transpose())?;
    let (_, control) = is_cp(&transpose, 1e-9)?;
    outcome(
        worst >= -1e-9 && (control + 1.0).abs() <= 1e-9,
        format!("min Choi eigenvalue {worst:.3e} (≥ −1e-9); transpose control {control:.12}"),
    )
}

fn conservativity() -> Result<Outcome> {
    let (mut unit_res, mut cp_min) = (0.0f64, f64::INFINITY);
    for two_j in 1..=3 {
        let irrep = su2_irrep(Spin::from_two_j(two_j));
        let gen = endomorphism_laplacian_generator(irrep.dim(), &hermitian_from_skew(&irrep.generators))?;
        for t in [0.1, 1.0, 5.0, 10.0] {
            let tt = evolve(&gen, t)?;
            unit_res = unit_res.max(tt.unitality_residual());
            cp_min = cp_min.min(is_cp(&tt, 1e-9)?.1);
        }
    }
    outcome(
        unit_res <= 1e-9 && cp_min >= -1e-9,
        format!("max ‖T_t(1) − 1‖ = {unit_res:.3e}, min Choi eigenvalue {cp_min:.3e}"),
    )
}

fn dirichlet() -> Result<Outcome> {
    let fns = LipschitzFn::standard_family(3, 77);
    let mut worst = f64::NEG_INFINITY;
    for n in 1..=6 {
        let form = QuadraticForm::from_generator(random_psd(n, &mut rng(500 + n as u64)))?;
        worst = worst.max(dirichlet_check(&form, &fns, 1000, 600 + n as u64)?);
    }
    let mut amp = f64::NEG_INFINITY;
    for n in [2, 4, 6] {
        let form = QuadraticForm::from_generator(random_psd(n, &mut rng(700 + n as u64)))?;
        for n_amp in 1..=3 {
            amp = amp.max(complete_dirichlet_check(&form, n_amp, &fns, 1000, 800 + n as u64)?);
        }
    }
    outcome(
        worst <= 1e-9 && amp <= 1e-9,
        format!("max violation {worst:.3e}; amplified (n_amp ≤ 3) {amp:.3e} (tol 1e-9)"),
    )
}

fn covariance() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for two_j in 0..=3 {
        let irrep = su2_irrep(Spin::from_two_j(two_j));
        let gen = casimir_generator(&irrep)?;
        let us = group_samples(&irrep.generators, 20, 900 + two_j as u64)?;
        worst = worst.max(check_covariance(&gen, &us)?);
    }
    outcome(
        worst <= 1e-9,
        format!("max covariance residual {worst:.3e} over j ≤ 3/2, 20 unitaries each"),
    )
}

fn operator_identities() -> Result<Outcome> {
    let irreps: Vec<_> = (1..=4).map(|t| su2_irrep(Spin::from_two_j(t))).collect();
    let mut lemma = 0.0f64;
    for irrep in &irreps {
        lemma = lemma.max(verify_commutator_lemma(&irrep.generators)?);
    }
    for n in [2, 4] {
        let rep = build_clifford(n, Signature::Minus)?;
        lemma = lemma.max(verify_commutator_lemma(&twist(&rep, 2)?.action_matrices)?);
    }
    let mut r = rng(1000);
    for dim in 2..=5 {
        let nablas: Vec<CMatrix> = (0..3).map(|_| random_complex(dim, &mut r)).collect();
        lemma = lemma.max(verify_commutator_lemma(&nablas)?);
    }
    let mut tensor = 0.0f64;
    for a in &irreps {
        for b in &irreps {
            tensor = tensor.max(tensor_laplacian_check(&a.generators, &b.generators)?);
        }
    }
    let ns: Vec<CMatrix> = (0..2).map(|_| random_hermitian(3, &mut r)).collect();
    let ne: Vec<CMatrix> = (0..2).map(|_| random_hermitian(2, &mut r)).collect();
    tensor = tensor.max(tensor_laplacian_check(&ns, &ne)?);
    outcome(
        lemma <= 1e-10 && tensor <= 1e-10,
        format!("commutator lemma {lemma:.3e}, tensor laplacian {tensor:.3e} (tol 1e-10)"),
    )
}

fn dilation() -> Result<Outcome> {
    let (h, ls) = (sigma_z(), [sigma_minus()]);
    let counts: Vec<usize> = (7..=12).map(|p| 1 << p).collect();
    let study = convergence_study(&h, &ls, 1.0, &counts)?;
    let model = ToyFockModel::new(2, 1, 6, 1.0)?;
    let mut r = rng(1100);
    let mut hom = 0.0f64;
    for _ in 0..5 {
        let (x, y) = (random_complex(2, &mut r), random_complex(2, &mut r));
        let (mult, star) = homomorphism_residual(&model, &h, &ls, &x, &y)?;
        hom = hom.max(mult).max(star);
    }
    outcome(
        study.order >= 0.9 && hom <= 1e-9,
        format!("log-log order {:.4} (≥ 0.9); full-flow homomorphism {hom:.3e} (≤ 1e-9)", study.order),
    )
}

fn structure_relations() -> Result<Outcome> {
    let (mut rel, mut adj) = (0.0f64, 0.0f64);
    for k in 0..100u64 {
        let mut r = stream(1200, k);
        let n = 1 + (k as usize % 4);
        let d = 1 + (k as usize / 4) % 2;
        let h = random_hermitian(n, &mut r);
        let ls: Vec<CMatrix> = (0..d).map(|_| random_complex(n, &mut r)).collect();
        let maps = structure_maps(&h, &ls)?;
        let (x, y) = (random_complex(n, &mut r), random_complex(n, &mut r));
        rel = rel.max(maps.relation_residual(&x, &y));
        adj = adj.max(maps.adjoint_residual(&x));
    }
    outcome(
        rel <= 1e-10 && adj <= 1e-10,
        format!("relation {rel:.3e}, adjoint symmetry {adj:.3e} over 100 draws (tol 1e-10)"),
    )
}

fn smoothness() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut all_finite = true;
    let mut values = Vec::new();
    for two_j in 1..=3 {
        let irrep = su2_irrep(Spin::from_two_j(two_j));
        let gen = casimir_generator(&irrep)?;
        let a = smoothness_constant(&gen, 1, 2, &irrep.generators, 500, 1300)?;
        let b = smoothness_constant(&gen, 1, 2, &irrep.generators, 1000, 1300)?;
        all_finite &= a.is_finite() && b.is_finite() && a > 0.0;
        worst = worst.max((b - a).abs() / a);
        values.push(format!("{b:.4}"));
    }
    outcome(
        all_finite && worst < 0.05,
        format!("constants {values:?}; max relative change 500→1000 samples {:.2}% (< 5%)", 100.0 * worst),
    )
}

type Criterion = (&'static str, Duration, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("S² Dirac-squared spectrum", Duration::from_secs(1), s2_spectrum),
        ("product-triple decomposition", Duration::from_secs(5), product_decomposition),
        ("twisted Clifford commutant", Duration::from_secs(10), commutant_dimension),
        ("CP battery", Duration::from_secs(30), cp_battery),
        ("conservativity", Duration::from_secs(10), conservativity),
        ("Dirichlet inequality", Duration::from_secs(60), dirichlet),
        ("covariance", Duration::from_secs(5), covariance),
        ("exact operator identities", Duration::from_secs(5), operator_identities),
        ("dilation convergence", Duration::from_secs(120), dilation),
        ("structure relations", Duration::from_secs(10), structure_relations),
        ("smoothness constants", Duration::from_secs(30), smoothness),
    ];
    let mut failures = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && elapsed <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "{} [{:>2}] {name}: {detail} [{:.2?} of {:?}]",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            elapsed,
            budget
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
