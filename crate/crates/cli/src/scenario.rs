//! Scenario files: a JSON object or an array of them, each
//! `{kind, params, seed, tolerances}`.

use std::collections::BTreeMap;

use ncg_core::clifford::Signature;
use ncg_core::dilation::{ToyFockModel, FULL_FLOW_CAP};
use ncg_core::homogeneous::{Spin, SOBOLEV_MAX_ORDER};
use ncg_core::matrix::ensure_hermitian;
use ncg_core::triple::{from_doc, FiniteSpectralTriple, MatrixDoc, TripleDocument};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ParseError(pub String);

fn bad(msg: impl Into<String>) -> ParseError {
    ParseError(msg.into())
}

/// A spin given as a number (`0.5`) or a string (`"21/2"`, `"3"`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpinValue {
    Number(f64),
    Text(String),
}

impl SpinValue {
    pub fn resolve(&self) -> Result<Spin, ParseError> {
        match self {
            SpinValue::Number(j) => Spin::from_f64(*j).map_err(|e| bad(e.to_string())),
            SpinValue::Text(s) => {
                let s = s.trim();
                if let Some((num, den)) = s.split_once('/') {
                    let num: u32 = num.trim().parse().map_err(|_| bad(format!("spin {s:?}")))?;
                    if den.trim() != "2" {
                        return Err(bad(format!("spin {s:?} must have denominator 2")));
                    }
                    Ok(Spin::from_two_j(num))
                } else {
                    let j: f64 = s.parse().map_err(|_| bad(format!("spin {s:?}")))?;
                    Spin::from_f64(j).map_err(|e| bad(e.to_string()))
                }
            }
        }
    }
}

/// Either the doubled integer `two_j` or a spin value, not both.
fn pick_spin(
    two_j: Option<u32>,
    value: &Option<SpinValue>,
    names: (&str, &str),
) -> Result<Spin, ParseError> {
    match (two_j, value) {
        (Some(t), None) => Ok(Spin::from_two_j(t)),
        (None, Some(v)) => v.resolve(),
        (Some(_), Some(_)) => Err(bad(format!("give only one of {} and {}", names.0, names.1))),
        (None, None) => Err(bad(format!("one of {} or {} is required", names.0, names.1))),
    }
}

const MAX_TWO_J: u32 = 200;

fn cap_spin(spin: Spin, what: &str) -> Result<Spin, ParseError> {
    if spin.two_j() > MAX_TWO_J {
        return Err(bad(format!("{what} = {spin} exceeds the cap of {}", MAX_TWO_J / 2)));
    }
    Ok(spin)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleValidateParams {
    pub triple: TripleDocument,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductCheckParams {
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
}

fn default_pairs() -> usize {
    100
}

fn default_max_dim() -> usize {
    8
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommutantParams {
    pub n: usize,
    #[serde(default)]
    pub signature: Signature,
    #[serde(default = "one")]
    pub dim_w: usize,
}

fn one() -> usize {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumOperator {
    DiracSquare,
    ConnectionLaplacian,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    pub h_weight: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_max: Option<SpinValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_j_max: Option<u32>,
    /// Defaults to `dirac_square` for `|h_weight| = 1`, else `connection_laplacian`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<SpectrumOperator>,
}

impl SpectrumParams {
    pub fn spin(&self) -> Result<Spin, ParseError> {
        cap_spin(pick_spin(self.two_j_max, &self.j_max, ("two_j_max", "j_max"))?, "j_max")
    }

    pub fn operator(&self) -> SpectrumOperator {
        self.operator.unwrap_or(if self.h_weight.abs() == 1 {
            SpectrumOperator::DiracSquare
        } else {
            SpectrumOperator::ConnectionLaplacian
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// `x ↦ −Σ[B_i,[B_i,x]]` with `B_i = iX_i`.
    Endomorphism,
    /// `x ↦ e^{−tD²/2} x e^{−tD²/2}` with `D²` the Casimir.
    KrausHeat,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QdsBatteryParams {
    pub generator: GeneratorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_j: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub irrep_j: Option<SpinValue>,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
}

fn default_times() -> Vec<f64> {
    vec![0.1, 1.0, 10.0]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovarianceParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_j: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub irrep_j: Option<SpinValue>,
    #[serde(default = "default_unitaries")]
    pub unitaries: usize,
}

fn default_unitaries() -> usize {
    20
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirichletParams {
    #[serde(default = "default_dirichlet_dim")]
    pub dim: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "one")]
    pub n_amp: usize,
    #[serde(default = "default_pieces")]
    pub random_pieces: usize,
}

fn default_dirichlet_dim() -> usize {
    4
}

fn default_samples() -> usize {
    1000
}

fn default_pieces() -> usize {
    3
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothnessParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_j: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub irrep_j: Option<SpinValue>,
    #[serde(default = "one")]
    pub n: usize,
    #[serde(default = "two")]
    pub p: usize,
    #[serde(default = "default_smooth_samples")]
    pub samples: usize,
}

fn two() -> usize {
    2
}

fn default_smooth_samples() -> usize {
    500
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DilationParams {
    #[serde(default = "default_t")]
    pub t: f64,
    #[serde(default = "default_slot_counts")]
    pub slot_counts: Vec<usize>,
    #[serde(default = "default_flow_slots")]
    pub flow_slots: usize,
    /// Defaults to σ₃.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<MatrixDoc>,
    /// Defaults to `[σ₋]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jumps: Option<Vec<MatrixDoc>>,
}

fn default_t() -> f64 {
    1.0
}

fn default_slot_counts() -> Vec<usize> {
    (7..=12).map(|p| 1 << p).collect()
}

fn default_flow_slots() -> usize {
    6
}

#[derive(Clone, Debug)]
pub enum Params {
    TripleValidate(TripleValidateParams),
    ProductCheck(ProductCheckParams),
    Commutant(CommutantParams),
    Spectrum(SpectrumParams),
    QdsBattery(QdsBatteryParams),
    Dirichlet(DirichletParams),
    Covariance(CovarianceParams),
    Smoothness(SmoothnessParams),
    Dilation(DilationParams),
}

pub struct KindInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub sampling: bool,
    pub checks: &'static [&'static str],
}

pub const KINDS: [KindInfo; 9] = [
    KindInfo {
        name: "triple_validate",
        summary: "axioms of a finite spectral triple given inline",
        sampling: false,
        checks: &[
            "dirac_self_adjoint",
            "algebra_contains_identity",
            "algebra_adjoint_closed",
            "grading_involution",
            "grading_anticommutes_dirac",
            "grading_commutes_algebra",
            "first_order",
            "real_structure_antiunitary",
            "real_structure_square_sign",
        ],
    },
    KindInfo {
        name: "product_check",
        summary: "D² = D_M²⊗1 + 1⊗D_F² over random even × finite pairs",
        sampling: true,
        checks: &["product_square"],
    },
    KindInfo {
        name: "commutant",
        summary: "Clifford relations and commutant dimension of the twisted action on W⊗S",
        sampling: false,
        checks: &["clifford_relations", "chirality", "commutant_dimension"],
    },
    KindInfo {
        name: "spectrum",
        summary: "Dirac-square or connection-laplacian spectrum on a homogeneous bundle over S²; writes a CSV",
        sampling: false,
        checks: &["spectrum_numeric_agreement", "lichnerowicz"],
    },
    KindInfo {
        name: "qds_battery",
        summary: "conservativity, complete positivity and hermiticity of a Casimir-built semigroup",
        sampling: false,
        checks: &["hermiticity_preserving", "conservativity", "contractivity", "complete_positivity"],
    },
    KindInfo {
        name: "dirichlet",
        summary: "Dirichlet contraction inequality for a random form, optionally amplified",
        sampling: true,
        checks: &["dirichlet_violation"],
    },
    KindInfo {
        name: "covariance",
        summary: "covariance of the Casimir generator under sampled group unitaries",
        sampling: true,
        checks: &["covariance"],
    },
    KindInfo {
        name: "smoothness",
        summary: "empirical smoothness constant and its stability when the sample count doubles",
        sampling: true,
        checks: &["smoothness_finite", "smoothness_stability"],
    },
    KindInfo {
        name: "dilation",
        summary: "vacuum dilation convergence, full-flow homomorphism and structure relations; writes CSV and JSON",
        sampling: true,
        checks: &[
            "dilation_order",
            "flow_homomorphism",
            "flow_adaptedness",
            "vacuum_consistency",
            "structure_relation",
            "structure_adjoint",
        ],
    },
];

pub fn kind_info(name: &str) -> Option<&'static KindInfo> {
    KINDS.iter().find(|k| k.name == name)
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub params: Params,
    pub seed: Option<u64>,
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    kind: String,
    #[serde(default)]
    params: Option<Value>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
}

fn typed<T: DeserializeOwned>(kind: &str, params: Option<Value>) -> Result<T, ParseError> {
    let value = params.unwrap_or_else(|| json!({}));
    serde_json::from_value(value).map_err(|e| bad(format!("{kind} params: {e}")))
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match &self.params {
            Params::TripleValidate(_) => "triple_validate",
            Params::ProductCheck(_) => "product_check",
            Params::Commutant(_) => "commutant",
            Params::Spectrum(_) => "spectrum",
            Params::QdsBattery(_) => "qds_battery",
            Params::Dirichlet(_) => "dirichlet",
            Params::Covariance(_) => "covariance",
            Params::Smoothness(_) => "smoothness",
            Params::Dilation(_) => "dilation",
        }
    }

    pub fn params_value(&self) -> Value {
        let v = match &self.params {
            Params::TripleValidate(p) => serde_json::to_value(p),
            Params::ProductCheck(p) => serde_json::to_value(p),
            Params::Commutant(p) => serde_json::to_value(p),
            Params::Spectrum(p) => serde_json::to_value(p),
            Params::QdsBattery(p) => serde_json::to_value(p),
            Params::Dirichlet(p) => serde_json::to_value(p),
            Params::Covariance(p) => serde_json::to_value(p),
            Params::Smoothness(p) => serde_json::to_value(p),
            Params::Dilation(p) => serde_json::to_value(p),
        };
        v.expect("parameter structs serialize")
    }

    pub fn to_value(&self) -> Value {
        let mut v = json!({ "kind": self.kind(), "params": self.params_value() });
        if let Some(seed) = self.seed {
            v["seed"] = json!(seed);
        }
        if !self.tolerances.is_empty() {
            v["tolerances"] = json!(self.tolerances);
        }
        v
    }

    fn from_raw(raw: RawScenario) -> Result<Self, ParseError> {
        let info = kind_info(&raw.kind).ok_or_else(|| {
            let names: Vec<_> = KINDS.iter().map(|k| k.name).collect();
            bad(format!("unknown kind {:?}; expected one of {}", raw.kind, names.join(", ")))
        })?;
        if info.sampling && raw.seed.is_none() {
            return Err(bad(format!("{} samples randomly and needs a seed", info.name)));
        }
        for (name, tol) in &raw.tolerances {
            if !info.checks.contains(&name.as_str()) {
                return Err(bad(format!("{}: no check named {name:?}", info.name)));
            }
            if !(tol.is_finite() && *tol >= 0.0) {
                return Err(bad(format!("tolerance for {name} must be finite and nonnegative")));
            }
        }
        let p = raw.params;
        let params = match info.name {
            "triple_validate" => Params::TripleValidate(typed(info.name, p)?),
            "product_check" => Params::ProductCheck(typed(info.name, p)?),
            "commutant" => Params::Commutant(typed(info.name, p)?),
            "spectrum" => Params::Spectrum(typed(info.name, p)?),
            "qds_battery" => Params::QdsBattery(typed(info.name, p)?),
            "dirichlet" => Params::Dirichlet(typed(info.name, p)?),
            "covariance" => Params::Covariance(typed(info.name, p)?),
            "smoothness" => Params::Smoothness(typed(info.name, p)?),
            "dilation" => Params::Dilation(typed(info.name, p)?),
            _ => unreachable!("kind table and parser disagree"),
        };
        let scenario = Self {
            params,
            seed: raw.seed,
            tolerances: raw.tolerances,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Parameter ranges, checked before anything runs.
    fn validate(&self) -> Result<(), ParseError> {
        match &self.params {
            Params::TripleValidate(p) => {
                FiniteSpectralTriple::try_from(p.triple.clone())
                    .map_err(|e| bad(format!("triple_validate: {e}")))?;
            }
            Params::ProductCheck(p) => {
                if p.pairs == 0 || p.pairs > 100_000 || !(1..=16).contains(&p.max_dim) {
                    return Err(bad("product_check: need 1 ≤ pairs ≤ 100000 and 1 ≤ max_dim ≤ 16"));
                }
            }
            Params::Commutant(p) => {
                if p.n == 0 || p.n % 2 == 1 || p.n > 8 || p.dim_w == 0 {
                    return Err(bad("commutant: n must be even in 2..=8 and dim_w ≥ 1"));
                }
                if p.dim_w << (p.n / 2) > 32 {
                    return Err(bad("commutant: dim_w · 2^(n/2) must not exceed 32"));
                }
            }
            Params::Spectrum(p) => {
                let spin = p.spin()?;
                if spin.two_j() < p.h_weight.unsigned_abs() {
                    return Err(bad("spectrum: j_max lies below the lowest sector |h_weight|/2"));
                }
                if p.operator() == SpectrumOperator::DiracSquare && p.h_weight.abs() != 1 {
                    return Err(bad("spectrum: dirac_square lives on the spinor bundle, |h_weight| = 1"));
                }
            }
            Params::QdsBattery(p) => {
                irrep_spin(p.two_j, &p.irrep_j, 20)?;
                if p.times.is_empty() || p.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                    return Err(bad("qds_battery: times must be a nonempty list of finite t ≥ 0"));
                }
            }
            Params::Dirichlet(p) => {
                if !(1..=16).contains(&p.dim) || !(1..=3).contains(&p.n_amp) || p.samples == 0 {
                    return Err(bad("dirichlet: need 1 ≤ dim ≤ 16, 1 ≤ n_amp ≤ 3, samples ≥ 1"));
                }
            }
            Params::Covariance(p) => {
                irrep_spin(p.two_j, &p.irrep_j, 20)?;
                if p.unitaries == 0 {
                    return Err(bad("covariance: unitaries ≥ 1"));
                }
            }
            Params::Smoothness(p) => {
                irrep_spin(p.two_j, &p.irrep_j, 8)?;
                if p.n + p.p > SOBOLEV_MAX_ORDER || p.samples == 0 {
                    return Err(bad(format!(
                        "smoothness: need n + p ≤ {SOBOLEV_MAX_ORDER} and samples ≥ 1"
                    )));
                }
            }
            Params::Dilation(p) => {
                if !(p.t > 0.0 && p.t.is_finite()) {
                    return Err(bad("dilation: t must be positive"));
                }
                if p.slot_counts.len() < 2 || p.slot_counts.contains(&0) {
                    return Err(bad("dilation: at least two positive slot counts"));
                }
                let (n, d) = dilation_shape(p)?;
                if let Some(h) = &p.hamiltonian {
                    from_doc(h)
                        .and_then(|h| ensure_hermitian(&h))
                        .map_err(|e| bad(format!("dilation: hamiltonian: {e}")))?;
                }
                let model = ToyFockModel::new(n, d, p.flow_slots.max(1), p.t)
                    .map_err(|e| bad(e.to_string()))?;
                if p.flow_slots == 0 || model.total_dim().is_none_or(|dim| dim > FULL_FLOW_CAP) {
                    return Err(bad(format!(
                        "dilation: flow_slots must be ≥ 1 with n(1+d)^N ≤ {FULL_FLOW_CAP}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Spin for the irrep-based kinds, capped at `max_two_j`.
pub fn irrep_spin(
    two_j: Option<u32>,
    irrep_j: &Option<SpinValue>,
    max_two_j: u32,
) -> Result<Spin, ParseError> {
    let spin = pick_spin(two_j, irrep_j, ("two_j", "irrep_j"))?;
    if spin.two_j() > max_two_j {
        return Err(bad(format!("spin {spin} exceeds the cap of {}", Spin::from_two_j(max_two_j))));
    }
    Ok(spin)
}

/// `(n, d)` of a dilation scenario, checking matrix shapes.
pub fn dilation_shape(p: &DilationParams) -> Result<(usize, usize), ParseError> {
    let n = p.hamiltonian.as_ref().map_or(2, Vec::len);
    let square = |m: &MatrixDoc| m.len() == n && m.iter().all(|r| r.len() == n);
    if n == 0 || !p.hamiltonian.as_ref().is_none_or(square) {
        return Err(bad("dilation: hamiltonian must be a nonempty square matrix"));
    }
    match &p.jumps {
        None if n == 2 => Ok((2, 1)),
        None => Err(bad("dilation: give jumps explicitly for a custom system dimension")),
        Some(ls) if ls.iter().all(square) => Ok((n, ls.len())),
        Some(_) => Err(bad("dilation: jump operators must match the hamiltonian's shape")),
    }
}

/// Parses a single scenario object or an array of them.
pub fn parse(text: &str) -> Result<Vec<Scenario>, ParseError> {
    let value: Value = serde_json::from_str(text).map_err(|e| bad(format!("invalid JSON: {e}")))?;
    let items = match value {
        Value::Array(items) => items,
        obj @ Value::Object(_) => vec![obj],
        _ => return Err(bad("a scenario file holds an object or an array of objects")),
    };
    items
        .into_iter()
        .enumerate()
        .map(|(i, item)| {
            let raw: RawScenario = serde_json::from_value(item)
                .map_err(|e| bad(format!("scenario {i}: {e}")))?;
            Scenario::from_raw(raw).map_err(|e| bad(format!("scenario {i}: {e}")))
        })
        .collect()
}

/// One runnable example per kind, with every defaulted parameter spelled out.
pub fn examples() -> Vec<Scenario> {
    use ncg_core::matrix::{identity, sigma_x, sigma_z};
    let two_point = FiniteSpectralTriple::new(vec![identity(2), sigma_z()], sigma_x())
        .and_then(|t| t.with_grading(sigma_z()))
        .expect("two-point triple");
    let j = |s: &str| Some(SpinValue::Text(s.into()));
    let params = [
        Params::TripleValidate(TripleValidateParams {
            triple: TripleDocument::from(&two_point),
        }),
        Params::ProductCheck(ProductCheckParams {
            pairs: default_pairs(),
            max_dim: default_max_dim(),
        }),
        Params::Commutant(CommutantParams {
            n: 4,
            signature: Signature::Minus,
            dim_w: 2,
        }),
        Params::Spectrum(SpectrumParams {
            h_weight: 1,
            j_max: j("21/2"),
            two_j_max: None,
            operator: Some(SpectrumOperator::DiracSquare),
        }),
        Params::QdsBattery(QdsBatteryParams {
            generator: GeneratorKind::Endomorphism,
            two_j: None,
            irrep_j: Some(SpinValue::Number(0.5)),
            times: default_times(),
        }),
        Params::Dirichlet(DirichletParams {
            dim: default_dirichlet_dim(),
            samples: default_samples(),
            n_amp: 2,
            random_pieces: default_pieces(),
        }),
        Params::Covariance(CovarianceParams {
            two_j: Some(3),
            irrep_j: None,
            unitaries: default_unitaries(),
        }),
        Params::Smoothness(SmoothnessParams {
            two_j: None,
            irrep_j: j("1/2"),
            n: 1,
            p: 2,
            samples: default_smooth_samples(),
        }),
        Params::Dilation(DilationParams {
            t: default_t(),
            slot_counts: default_slot_counts(),
            flow_slots: default_flow_slots(),
            hamiltonian: None,
            jumps: None,
        }),
    ];
    params
        .into_iter()
        .map(|params| {
            let mut s = Scenario {
                params,
                seed: None,
                tolerances: BTreeMap::new(),
            };
            if kind_info(s.kind()).is_some_and(|k| k.sampling) {
                s.seed = Some(1);
            }
            s
        })
        .collect()
}

/// Text for `ncg list-checks`: every kind, its checks, and an example
/// scenario line that parses back to itself.
pub fn list_checks() -> String {
    let mut out = String::new();
    for (info, example) in KINDS.iter().zip(examples()) {
        out.push_str(&format!("{}\n", info.name));
        out.push_str(&format!("  {}\n", info.summary));
        out.push_str(&format!(
            "  seed: {}\n",
            if info.sampling { "required" } else { "unused" }
        ));
        out.push_str(&format!("  checks: {}\n", info.checks.join(", ")));
        out.push_str(&format!("  scenario: {}\n", example.to_value()));
    }
    out
}
