//! Executes parsed scenarios into report rows and artifacts.

use std::time::Instant;

use ncg_core::clifford::{build_clifford, commutant, twist};
use ncg_core::dilation::{
    convergence_study, homomorphism_residual, one_slot_map, structure_maps, ToyFockModel,
};
use ncg_core::dirichlet::{complete_dirichlet_check, dirichlet_check, LipschitzFn, QuadraticForm};
use ncg_core::homogeneous::{
    casimir_generator, cubic_dirac_square, decompose_induced_bundle,
    connection_laplacian_spectrum, dirac_square_spectrum_symmetric, smoothness_constant,
    spinor_lichnerowicz_residual, su2_irrep, Spin,
};
use ncg_core::matrix::{
    anticommutator, hermitian_eig, identity, op_norm, sigma_minus, sigma_z, CMatrix, Spectrum,
    SPECTRUM_MERGE_RTOL,
};
use ncg_core::qds::{
    check_covariance, evolve, group_samples, is_cp, kraus_heat_semigroup, Superoperator,
};
use ncg_core::report::CheckResult;
use ncg_core::sample::{random_complex, random_psd, rng};
use ncg_core::triple::{from_doc, product_square_study, validate, FiniteSpectralTriple};
use ncg_core::Result;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::scenario::{irrep_spin, GeneratorKind, Params, Scenario, SpectrumOperator};

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Multiplies every upper-bound tolerance.
    pub tol_scale: f64,
    /// Replaces the seed of every sampling scenario.
    pub seed_override: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            tol_scale: 1.0,
            seed_override: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub check_name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub params: Value,
    pub seed: Option<u64>,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

#[derive(Clone, Debug, Default)]
pub struct ScenarioOutcome {
    pub rows: Vec<ReportRow>,
    pub artifacts: Vec<Artifact>,
}

struct Checks<'a> {
    scenario: &'a Scenario,
    scale: f64,
    rows: Vec<CheckResult>,
    artifacts: Vec<Artifact>,
}

impl Checks<'_> {
    fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.scenario.tolerances.get(name).copied().unwrap_or(default)
    }

    fn at_most(&mut self, name: &str, residual: f64, default_tol: f64, params: Value) {
        let tol = self.tolerance(name, default_tol) * self.scale;
        self.rows
            .push(CheckResult::at_most(name, residual, tol).with_parameters(params));
    }

    fn at_least(&mut self, name: &str, value: f64, default_threshold: f64, params: Value) {
        let threshold = self.tolerance(name, default_threshold);
        self.rows
            .push(CheckResult::at_least(name, value, threshold).with_parameters(params));
    }

    fn artifact(&mut self, file_name: String, contents: String) {
        self.artifacts.push(Artifact {
            file_name,
            contents,
        });
    }
}

/// Seed used for a scenario: the override for sampling kinds, else its own.
pub fn effective_seed(scenario: &Scenario, opts: &RunOptions) -> Option<u64> {
    scenario.seed.map(|s| opts.seed_override.unwrap_or(s))
}

pub fn run_scenario(index: usize, scenario: &Scenario, opts: &RunOptions) -> Result<ScenarioOutcome> {
    let start = Instant::now();
    let seed = effective_seed(scenario, opts);
    let mut checks = Checks {
        scenario,
        scale: opts.tol_scale,
        rows: Vec::new(),
        artifacts: Vec::new(),
    };
    let s = seed.unwrap_or(0);
    match &scenario.params {
        Params::TripleValidate(p) => {
            let t = FiniteSpectralTriple::try_from(p.triple.clone())?;
            for row in validate(&t).rows {
                checks.at_most(&row.check_name, row.residual, row.tolerance, row.parameters);
            }
        }
        Params::ProductCheck(p) => {
            let worst = product_square_study(s, p.pairs, p.max_dim)?;
            checks.at_most("product_square", worst, 1e-12, json!({"pairs": p.pairs}));
        }
        Params::Commutant(p) => {
            let rep = build_clifford(p.n, p.signature)?;
            checks.at_most("clifford_relations", rep.relation_residual(), 1e-12, Value::Null);
            let g = &rep.chirality;
            let mut chi = op_norm(&(g * g - identity(rep.dim())));
            for e in &rep.gammas {
                chi = chi.max(op_norm(&anticommutator(g, e)));
            }
            checks.at_most("chirality", chi, 1e-12, Value::Null);
            let action = twist(&rep, p.dim_w)?;
            let dim = commutant(&action.action_matrices)?.len();
            let expected = p.dim_w * p.dim_w;
            checks.at_most(
                "commutant_dimension",
                dim.abs_diff(expected) as f64,
                0.0,
                json!({"dimension": dim, "expected": expected}),
            );
        }
        Params::Spectrum(p) => spectrum(index, p.h_weight, p.spin().map_err(invalid)?, p.operator(), &mut checks)?,
        Params::QdsBattery(p) => {
            let irrep = su2_irrep(irrep_spin(p.two_j, &p.irrep_j, u32::MAX).map_err(invalid)?);
            qds_battery(&irrep, p.generator, &p.times, &mut checks)?;
        }
        Params::Dirichlet(p) => {
            let form = QuadraticForm::from_generator(random_psd(p.dim, &mut rng(s)))?;
            let fns = LipschitzFn::standard_family(p.random_pieces, s.wrapping_add(1));
            let worst = if p.n_amp == 1 {
                dirichlet_check(&form, &fns, p.samples, s)?
            } else {
                complete_dirichlet_check(&form, p.n_amp, &fns, p.samples, s)?
            };
            checks.at_most(
                "dirichlet_violation",
                worst,
                1e-9,
                json!({"functions": fns.len(), "n_amp": p.n_amp}),
            );
        }
        Params::Covariance(p) => {
            let irrep = su2_irrep(irrep_spin(p.two_j, &p.irrep_j, u32::MAX).map_err(invalid)?);
            let gen = casimir_generator(&irrep)?;
            let us = group_samples(&irrep.generators, p.unitaries, s)?;
            checks.at_most("covariance", check_covariance(&gen, &us)?, 1e-9, Value::Null);
        }
        Params::Smoothness(p) => {
            let irrep = su2_irrep(irrep_spin(p.two_j, &p.irrep_j, u32::MAX).map_err(invalid)?);
            let gen = casimir_generator(&irrep)?;
            let gens = &irrep.generators;
            let base = smoothness_constant(&gen, p.n, p.p, gens, p.samples, s)?;
            let doubled = smoothness_constant(&gen, p.n, p.p, gens, 2 * p.samples, s)?;
            // Finite means below a generous fixed ceiling.
            checks.at_most("smoothness_finite", doubled, 1e12, json!({"samples": 2 * p.samples}));
            checks.at_most(
                "smoothness_stability",
                (doubled - base).abs() / base,
                0.05,
                json!({"constant": base, "constant_doubled": doubled}),
            );
        }
        Params::Dilation(p) => dilation(index, p, s, &mut checks)?,
    }
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let kind = scenario.kind();
    let rows = checks
        .rows
        .into_iter()
        .map(|r| {
            let mut params = json!({"kind": kind, "scenario": index});
            if let Value::Object(extra) = r.parameters {
                params.as_object_mut().unwrap().extend(extra);
            }
            ReportRow {
                check_name: r.check_name,
                passed: r.passed,
                residual: r.residual,
                tolerance: r.tolerance,
                params,
                seed,
                wall_ms,
            }
        })
        .collect();
    Ok(ScenarioOutcome {
        rows,
        artifacts: checks.artifacts,
    })
}

fn invalid(e: crate::scenario::ParseError) -> ncg_core::Error {
    ncg_core::Error::InvalidArgument(e.0)
}

/// Largest entrywise gap between two spectra; infinite when the eigenvalue
/// counts or multiplicities differ.
fn spectrum_gap(a: &Spectrum, b: &Spectrum) -> f64 {
    if a.entries.len() != b.entries.len() {
        return f64::INFINITY;
    }
    a.entries
        .iter()
        .zip(&b.entries)
        .map(|(&(x, m), &(y, k))| if m == k { (x - y).abs() } else { f64::INFINITY })
        .fold(0.0, f64::max)
}

fn spectrum(
    index: usize,
    h_weight: i32,
    j_max: Spin,
    operator: SpectrumOperator,
    checks: &mut Checks,
) -> Result<()> {
    let bundle = decompose_induced_bundle(h_weight, j_max)?;
    let (closed, weights, shift): (Spectrum, Vec<i32>, f64) = match operator {
        SpectrumOperator::DiracSquare => (
            dirac_square_spectrum_symmetric(j_max)?,
            vec![1, -1],
            bundle.kappa / 8.0,
        ),
        SpectrumOperator::ConnectionLaplacian => (
            connection_laplacian_spectrum(&bundle),
            vec![h_weight],
            -bundle.fiber_casimir(),
        ),
    };
    // Diagonalize every sector matrix and compare with the closed form.
    let mut numeric = Vec::new();
    for w in weights {
        for &(j, mult) in &decompose_induced_bundle(w, j_max)?.sectors {
            let m = cubic_dirac_square(&su2_irrep(j), shift)?.matrix;
            for v in hermitian_eig(&m)?.values {
                numeric.extend(std::iter::repeat_n(v, mult));
            }
        }
    }
    let numeric = Spectrum::from_values(&numeric, SPECTRUM_MERGE_RTOL);
    let params = json!({
        "operator": operator,
        "h_weight": h_weight,
        "j_max": j_max.to_string(),
        "distinct_eigenvalues": closed.entries.len(),
    });
    checks.at_most("spectrum_numeric_agreement", spectrum_gap(&closed, &numeric), 1e-10, params);
    if operator == SpectrumOperator::DiracSquare {
        checks.at_most("lichnerowicz", spinor_lichnerowicz_residual(j_max)?, 1e-10, Value::Null);
    }
    checks.artifact(format!("spectrum-{index}.csv"), closed.to_csv());
    Ok(())
}

fn qds_battery(
    irrep: &ncg_core::homogeneous::Su2Irrep,
    generator: GeneratorKind,
    times: &[f64],
    checks: &mut Checks,
) -> Result<()> {
    let n = irrep.dim();
    let casimir = irrep.casimir_matrix();
    let gen = casimir_generator(irrep)?;
    if generator == GeneratorKind::Endomorphism {
        checks.at_most("hermiticity_preserving", gen.hermiticity_residual(), 1e-10, Value::Null);
    }
    for &t in times {
        let tt: Superoperator = match generator {
            GeneratorKind::Endomorphism => evolve(&gen, t)?,
            GeneratorKind::KrausHeat => kraus_heat_semigroup(&casimir, t)?,
        };
        let params = json!({"t": t});
        match generator {
            GeneratorKind::Endomorphism => {
                checks.at_most("conservativity", tt.unitality_residual(), 1e-9, params.clone());
            }
            GeneratorKind::KrausHeat => {
                checks.at_most("hermiticity_preserving", tt.hermiticity_residual(), 1e-10, params.clone());
                let excess = op_norm(&tt.apply(&identity(n))) - 1.0;
                checks.at_most("contractivity", excess.max(0.0), 1e-12, params.clone());
            }
        }
        let (_, min) = is_cp(&tt, 1e-9)?;
        checks.at_most(
            "complete_positivity",
            (-min).max(0.0),
            1e-9,
            json!({"t": t, "min_choi_eigenvalue": min}),
        );
    }
    Ok(())
}

fn dilation(index: usize, p: &crate::scenario::DilationParams, seed: u64, checks: &mut Checks) -> Result<()> {
    let hm = p.hamiltonian.as_ref().map_or_else(|| Ok(sigma_z()), from_doc)?;
    let ls: Vec<CMatrix> = match &p.jumps {
        Some(docs) => docs.iter().map(from_doc).collect::<Result<_>>()?,
        None => vec![sigma_minus()],
    };
    let n = hm.nrows();
    let study = convergence_study(&hm, &ls, p.t, &p.slot_counts)?;
    checks.at_least("dilation_order", study.order, 0.9, json!({"t": p.t}));
    checks.artifact(format!("convergence-{index}.csv"), study.to_csv());
    checks.artifact(
        format!("convergence-{index}.json"),
        serde_json::to_string_pretty(&study).expect("study serializes") + "\n",
    );

    let model = ToyFockModel::new(n, ls.len(), p.flow_slots, p.t)?;
    let mut r = rng(seed);
    let x = random_complex(n, &mut r);
    let y = random_complex(n, &mut r);
    let (mult, star) = homomorphism_residual(&model, &hm, &ls, &x, &y)?;
    let flow_params = json!({"slots": p.flow_slots});
    checks.at_most("flow_homomorphism", mult.max(star), 1e-9, flow_params.clone());
    let flow = model.full_flow(&hm, &ls, &x)?;
    let adapted = flow
        .par_iter()
        .enumerate()
        .map(|(k, jk)| model.adaptedness_residual(jk, k))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.at_most("flow_adaptedness", adapted, 1e-9, flow_params.clone());
    let phi = one_slot_map(&hm, &ls, model.dt())?;
    let mut iterated = x.clone();
    for _ in 0..p.flow_slots {
        iterated = phi.apply(&iterated);
    }
    let compressed = model.vacuum_block(flow.last().expect("flow includes j_0"))?;
    checks.at_most("vacuum_consistency", op_norm(&(compressed - iterated)), 1e-10, flow_params);

    let maps = structure_maps(&hm, &ls)?;
    checks.at_most("structure_relation", maps.relation_residual(&x, &y), 1e-10, Value::Null);
    checks.at_most("structure_adjoint", maps.adjoint_residual(&x), 1e-10, Value::Null);
    Ok(())
}

/// Runs every scenario, at most `jobs` at a time, keeping input order.
/// On failure returns the index of the first scenario that errored.
pub fn run_all(
    scenarios: &[Scenario],
    opts: &RunOptions,
    jobs: usize,
) -> std::result::Result<Vec<ScenarioOutcome>, (usize, ncg_core::Error)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| (0, ncg_core::Error::InvalidArgument(e.to_string())))?;
    let results: Vec<Result<ScenarioOutcome>> = pool.install(|| {
        scenarios
            .par_iter()
            .enumerate()
            .map(|(i, s)| run_scenario(i, s, opts))
            .collect()
    });
    results
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| (i, e)))
        .collect()
}
