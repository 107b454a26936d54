use std::time::Instant;

use ncg_core::clifford::{build_clifford, commutant, commutes_with_all, twist, Signature};
use ncg_core::dilation::{
    homomorphism_residual, one_slot_map, structure_maps, ToyFockModel,
};
use ncg_core::dirichlet::{
    complete_dirichlet_check, dirichlet_check, form_value, LipschitzFn, QuadraticForm,
};
use ncg_core::homogeneous::{
    casimir_generator, connection_laplacian_spectrum, decompose_induced_bundle,
    spinor_lichnerowicz_residual, su2_irrep, Spin,
};
use ncg_core::matrix::{
    c, expm, hs_inner, identity, kron, op_norm, CMatrix,
};
use ncg_core::qds::{
    evolve, is_cp, kraus_heat_semigroup, lindblad_generator, Superoperator, CP_TOL,
};
use ncg_core::sample::{random_complex, random_hermitian, random_psd, rng};
use ncg_core::triple::{product, product_square_residual, validate, FiniteSpectralTriple};
use proptest::prelude::*;

fn lindblad_data(seed: u64, n: usize, d: usize) -> (CMatrix, Vec<CMatrix>) {
    let mut r = rng(seed);
    let hm = random_hermitian(n, &mut r);
    let ls = (0..d).map(|_| random_complex(n, &mut r) * c(0.5, 0.0)).collect();
    (hm, ls)
}

#[test]
fn commutant_dimension_up_to_cl8() {
    let start = Instant::now();
    for n in [2, 4, 6, 8] {
        for signature in [Signature::Minus, Signature::Plus] {
            let rep = build_clifford(n, signature).unwrap();
            for dim_w in 1..=4 {
                let action = twist(&rep, dim_w).unwrap();
                let basis = commutant(&action.action_matrices).unwrap();
                assert_eq!(basis.len(), dim_w * dim_w, "n={n} {signature:?} dim_w={dim_w}");
                for x in &basis {
                    assert!(commutes_with_all(x, &action.action_matrices) < 1e-9);
                }
            }
        }
    }
    assert!(start.elapsed().as_secs() < 120, "took {:?}", start.elapsed());
}

#[test]
fn chirality_anticommutes_with_generators() {
    for n in [2, 4, 6, 8] {
        for signature in [Signature::Minus, Signature::Plus] {
            let rep = build_clifford(n, signature).unwrap();
            let g = &rep.chirality;
            assert!(op_norm(&(g * g - identity(rep.dim()))) < 1e-12);
            for e in &rep.gammas {
                assert!(op_norm(&(g * e + e * g)) < 1e-12);
            }
            assert_eq!(build_clifford(n, signature).unwrap(), rep);
        }
    }
}

#[test]
fn zero_weight_spectrum_is_spherical_harmonics() {
    let bundle = decompose_induced_bundle(0, Spin::from_two_j(12)).unwrap();
    let spectrum = connection_laplacian_spectrum(&bundle);
    let expected: Vec<(f64, usize)> = (0..=6).map(|l| ((l * (l + 1)) as f64, 2 * l + 1)).collect();
    assert_eq!(spectrum.entries.len(), expected.len());
    for (&(v, m), (ev, em)) in spectrum.entries.iter().zip(expected) {
        assert!((v - ev).abs() < 1e-12);
        assert_eq!(m, em);
    }
}

#[test]
fn lichnerowicz_identity_on_sectors() {
    for two_j in 1..=15 {
        assert!(spinor_lichnerowicz_residual(Spin::from_two_j(two_j)).unwrap() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn expm_is_a_semigroup(seed in any::<u64>(), n in 1usize..6, s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let a = random_hermitian(n, &mut rng(seed));
        let lhs = expm(&a, s + t).unwrap();
        let rhs = expm(&a, s).unwrap() * expm(&a, t).unwrap();
        prop_assert!(op_norm(&(lhs - &rhs)) <= 1e-10 * op_norm(&rhs).max(1.0));
    }

    #[test]
    fn expm_matches_nalgebra(seed in any::<u64>(), n in 1usize..6) {
        let a = random_complex(n, &mut rng(seed));
        let ours = expm(&a, 1.0).unwrap();
        let theirs = a.clone().exp();
        prop_assert!(op_norm(&(ours - &theirs)) <= 1e-9 * op_norm(&theirs).max(1.0));
    }

    #[test]
    fn kron_with_identity_is_isometric(seed in any::<u64>(), n in 1usize..5, m in 1usize..4) {
        let a = random_complex(n, &mut rng(seed));
        let big = kron(&identity(m), &a);
        prop_assert!((op_norm(&big) - op_norm(&a)).abs() <= 1e-10 * op_norm(&a).max(1.0));
    }

    #[test]
    fn product_square_and_validity(seed in any::<u64>(), hm in 1usize..4, df in 1usize..4) {
        let mut r = rng(seed);
        let tm = FiniteSpectralTriple::random_even(hm, &mut r).unwrap();
        let tf = FiniteSpectralTriple::random_odd(df, &mut r).unwrap();
        prop_assert!(validate(&tm).passed());
        let p = product(&tm, &tf).unwrap();
        prop_assert!(validate(&p).passed());
        let scale = op_norm(tm.dirac()).powi(2) + op_norm(tf.dirac()).powi(2);
        prop_assert!(product_square_residual(&tm, &tf).unwrap() <= 1e-10 * scale.max(1.0));
    }

    #[test]
    fn casimir_is_central(two_j in 0u32..10) {
        let irrep = su2_irrep(Spin::from_two_j(two_j));
        prop_assert!(irrep.casimir_residual() < 1e-10);
        prop_assert!(irrep.commutation_residual() < 1e-10);
        let gen = casimir_generator(&irrep).unwrap();
        prop_assert!(op_norm(&gen.apply(&identity(irrep.dim()))) < 1e-10);
    }

    #[test]
    fn kraus_heat_is_cp_and_contractive(seed in any::<u64>(), n in 1usize..6, t in 0.01f64..10.0) {
        let dsq = random_psd(n, &mut rng(seed));
        let phi = kraus_heat_semigroup(&dsq, t).unwrap();
        prop_assert!(is_cp(&phi, CP_TOL).unwrap().0);
        let one = phi.apply(&identity(n));
        let (psd, _) = ncg_core::matrix::is_psd(&(identity(n) - one), 1e-10).unwrap();
        prop_assert!(psd);
    }

    #[test]
    fn composite_of_cp_maps_is_cp(seed in any::<u64>(), n in 1usize..4, t in 0.01f64..3.0) {
        let (hm, ls) = lindblad_data(seed, n, 2);
        let a = evolve(&lindblad_generator(&hm, &ls).unwrap(), t).unwrap();
        let b = kraus_heat_semigroup(&random_psd(n, &mut rng(seed ^ 1)), t).unwrap();
        prop_assert!(is_cp(&a.compose(&b), CP_TOL).unwrap().0);
        prop_assert!(is_cp(&a.tensor(&Superoperator::identity(2)), CP_TOL).unwrap().0);
    }

    #[test]
    fn dirichlet_inequality_holds(seed in any::<u64>(), n in 1usize..5, n_amp in 1usize..3) {
        let form = QuadraticForm::from_generator(random_psd(n, &mut rng(seed))).unwrap();
        let fns = LipschitzFn::standard_family(2, seed);
        let scale = op_norm(&form.generator()).max(1.0);
        prop_assert!(dirichlet_check(&form, &fns, 40, seed).unwrap() <= 1e-9 * scale);
        prop_assert!(complete_dirichlet_check(&form, n_amp, &fns, 20, seed).unwrap() <= 1e-9 * scale);
    }

    #[test]
    fn factored_form_matches_generator(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let s = random_complex(n, &mut r);
        let x = random_complex(n, &mut r);
        let factored = QuadraticForm::from_factor(s.clone()).unwrap();
        let direct = QuadraticForm::from_generator(s.adjoint() * &s).unwrap();
        let a = form_value(&factored, &x).unwrap();
        let b = form_value(&direct, &x).unwrap();
        let expected = hs_inner(&(&s * &x), &(&s * &x)).unwrap().re;
        prop_assert!((a - b).abs() <= 1e-9 * expected.max(1.0));
        prop_assert!((a - expected).abs() <= 1e-9 * expected.max(1.0));
    }

    #[test]
    fn lipschitz_functions_are_lipschitz(seed in any::<u64>(), x in -5.0f64..5.0, y in -5.0f64..5.0) {
        for f in LipschitzFn::standard_family(3, seed) {
            prop_assert!(f.eval(0.0).abs() < 1e-15);
            prop_assert!((f.eval(x) - f.eval(y)).abs() <= f.lip_norm() * (x - y).abs() + 1e-12);
        }
    }

    #[test]
    fn one_slot_map_is_unital_cp(seed in any::<u64>(), n in 1usize..4, d in 1usize..3, dt in 0.001f64..0.5) {
        let (hm, ls) = lindblad_data(seed, n, d);
        let phi = one_slot_map(&hm, &ls, dt).unwrap();
        prop_assert!(phi.unitality_residual() < 1e-10);
        prop_assert!(is_cp(&phi, CP_TOL).unwrap().0);
    }

    #[test]
    fn flow_is_an_adapted_homomorphism(seed in any::<u64>(), n in 1usize..3, slots in 1usize..4) {
        let (hm, ls) = lindblad_data(seed, n, 1);
        let model = ToyFockModel::new(n, 1, slots, 1.0).unwrap();
        let mut r = rng(seed ^ 7);
        let x = random_complex(n, &mut r);
        let y = random_complex(n, &mut r);
        let (mult, star) = homomorphism_residual(&model, &hm, &ls, &x, &y).unwrap();
        prop_assert!(mult < 1e-9 && star < 1e-9);
        let flow = model.full_flow(&hm, &ls, &x).unwrap();
        for (k, m) in flow.iter().enumerate() {
            prop_assert!(model.adaptedness_residual(m, k).unwrap() < 1e-9);
        }
    }

    #[test]
    fn structure_maps_satisfy_relations(seed in any::<u64>(), n in 1usize..4, d in 1usize..3) {
        let (hm, ls) = lindblad_data(seed, n, d);
        let maps = structure_maps(&hm, &ls).unwrap();
        let mut r = rng(seed ^ 3);
        let x = random_complex(n, &mut r);
        let y = random_complex(n, &mut r);
        let scale = (op_norm(&x) * op_norm(&y)).max(1.0);
        prop_assert!(maps.relation_residual(&x, &y) <= 1e-9 * scale);
        prop_assert!(maps.adjoint_residual(&x) <= 1e-9 * op_norm(&x).max(1.0));
    }
}
