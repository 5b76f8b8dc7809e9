//! Experiment configuration, read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use orbitlim::boundary::PsMode;
use orbitlim::orbits::{ExponentMethod, Generator, GroupKind, GroupSpec};
use orbitlim::trig::DftMethod;
use orbitlim::{kak_compose, CartanCoords, IntMat2, Mat2};

use crate::Failure;

/// Environment variable overriding `output_dir`.
pub const OUTPUT_DIR_VAR: &str = "ORBITLIM_OUTPUT_DIR";

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group: Option<GroupConfig>,
    #[serde(default)]
    pub rep: RepConfig,
    #[serde(rename = "T_ladder", default)]
    pub t_ladder: Vec<f64>,
    pub delta_override: Option<f64>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub enumerate: EnumerateConfig,
    #[serde(default)]
    pub exponent: ExponentConfig,
    #[serde(default)]
    pub ps: PsConfig,
    #[serde(default)]
    pub compare: CompareConfig,
    #[serde(default)]
    pub marginal: MarginalConfig,
    #[serde(default)]
    pub sectors: SectorsConfig,
    #[serde(default)]
    pub fejer: FejerConfig,
    #[serde(default)]
    pub annuli: AnnuliConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    /// `reference-schottky` selects the built-in test instance.
    pub preset: Option<String>,
    pub kind: Option<GroupKind>,
    pub level: Option<u64>,
    #[serde(default)]
    pub generators: Vec<GeneratorConfig>,
    #[serde(default = "yes")]
    pub include_minus_one: bool,
}

fn yes() -> bool {
    true
}

/// A generator as `matrix = [a, b, c, d]` (numbers or `"p/q"` strings) or
/// in Cartan form `cartan = [θ₁, t, θ₂]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub matrix: Option<[Entry; 4]>,
    pub cartan: Option<[f64; 3]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Entry {
    fn exact(&self) -> Option<i64> {
        match self {
            Entry::Int(v) => Some(*v),
            Entry::Text(s) => s.trim().parse().ok(),
            Entry::Real(_) => None,
        }
    }

    fn value(&self) -> Result<f64, Failure> {
        match self {
            Entry::Int(v) => Ok(*v as f64),
            Entry::Real(v) => Ok(*v),
            Entry::Text(s) => parse_rational(s),
        }
    }
}

fn parse_rational(s: &str) -> Result<f64, Failure> {
    let bad = || Failure::config(format!("cannot read matrix entry {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0.0 {
                return Err(bad());
            }
            Ok(p / q)
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepConfig {
    pub weights: Vec<usize>,
}

impl Default for RepConfig {
    fn default() -> Self {
        Self { weights: vec![1] }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub radial_nodes: usize,
    /// Bins used to compress an estimated boundary measure before the limit
    /// integral.
    pub boundary_bins: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            radial_nodes: 256,
            boundary_bins: 64,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnumerateConfig {
    pub closure_samples: usize,
}

impl Default for EnumerateConfig {
    fn default() -> Self {
        Self { closure_samples: 1000 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExponentConfig {
    pub method: ExponentMethod,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
}

impl Default for ExponentConfig {
    fn default() -> Self {
        Self {
            method: ExponentMethod::PoincareAbscissa,
            t_min: None,
            t_max: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PsConfig {
    pub mode: PsMode,
    /// Explicit exponent `s`; otherwise `δ + s_offset`.
    pub s: Option<f64>,
    pub s_offset: f64,
    pub fourier_max: i64,
}

impl Default for PsConfig {
    fn default() -> Self {
        Self {
            mode: PsMode::PattersonLimit,
            s: None,
            s_offset: 0.05,
            fourier_max: 8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureChoice {
    Lebesgue,
    PattersonLimit,
    EmpiricalAngular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainChoice {
    Normalized,
    Compact,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareConfig {
    pub test_function: String,
    pub self_normalized: bool,
    pub radial_domain: DomainChoice,
    /// Defaults to Lebesgue for lattices and the Patterson estimate otherwise.
    pub measure: Option<MeasureChoice>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            test_function: "x11_sq".into(),
            self_normalized: true,
            radial_domain: DomainChoice::Normalized,
            measure: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MarginalConfig {
    /// `f(r) = r^power`.
    pub power: i32,
}

impl Default for MarginalConfig {
    fn default() -> Self {
        Self { power: 2 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SectorsConfig {
    pub n_max: i64,
    pub m_max: i64,
}

impl Default for SectorsConfig {
    fn default() -> Self {
        Self { n_max: 3, m_max: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Psi {
    /// `|sin θ₁|`, Lipschitz.
    AbsSin,
    /// `|sin θ₁|^{1/2}`, Hölder-1/2.
    AbsSinSqrt,
    /// `cos 2θ₁ + sin 4θ₂ / 2`, a trigonometric polynomial.
    Smooth,
}

impl Psi {
    pub fn eval(self, a: f64, b: f64) -> f64 {
        match self {
            Psi::AbsSin => a.sin().abs(),
            Psi::AbsSinSqrt => a.sin().abs().sqrt(),
            Psi::Smooth => (2.0 * a).cos() + 0.5 * (4.0 * b).sin(),
        }
    }

    pub fn alpha(self) -> f64 {
        match self {
            Psi::AbsSinSqrt => 0.5,
            _ => 1.0,
        }
    }

    pub fn holder_constant(self) -> f64 {
        match self {
            Psi::Smooth => 2.0,
            _ => 1.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FejerConfig {
    pub psi: Psi,
    pub alpha: Option<f64>,
    pub holder_constant: Option<f64>,
    pub r_ladder: Vec<usize>,
    pub base_grid: usize,
    pub refine: usize,
    pub method: DftMethod,
}

impl Default for FejerConfig {
    fn default() -> Self {
        Self {
            psi: Psi::AbsSin,
            alpha: None,
            holder_constant: None,
            r_ladder: vec![8, 16, 32, 64, 128, 256],
            base_grid: 512,
            refine: 4,
            method: DftMethod::Dense,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnnuliConfig {
    pub n: usize,
    /// Defaults to the `compare` test function.
    pub test_function: Option<String>,
}

impl Default for AnnuliConfig {
    fn default() -> Self {
        Self { n: 16, test_function: None }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        let cfg: Self = toml::from_str(text).map_err(|e| Failure::config(format!("malformed config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        if self.rep.weights.is_empty() {
            return Err(Failure::config("rep.weights must be nonempty"));
        }
        if self.t_ladder.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Failure::config("T_ladder entries must be positive"));
        }
        if self.t_ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Failure::config("T_ladder must be strictly increasing"));
        }
        if let Some(d) = self.delta_override {
            if !(d > 0.5 && d <= 1.0) {
                return Err(Failure::config(format!("delta_override {d} is outside (1/2, 1]")));
            }
        }
        Ok(())
    }

    /// `--out`, then the environment override, then `output_dir`.
    pub fn resolve_output_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(p) = flag {
            return p.to_path_buf();
        }
        if let Some(p) = std::env::var_os(OUTPUT_DIR_VAR).filter(|v| !v.is_empty()) {
            return PathBuf::from(p);
        }
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("orbitlim-out"))
    }

    pub fn ladder(&self) -> Result<&[f64], Failure> {
        if self.t_ladder.is_empty() {
            return Err(Failure::config("this subcommand needs a nonempty T_ladder"));
        }
        Ok(&self.t_ladder)
    }

    pub fn group_spec(&self) -> Result<GroupSpec, Failure> {
        let g = self
            .group
            .as_ref()
            .ok_or_else(|| Failure::config("this subcommand needs a [group] table"))?;
        if let Some(p) = &g.preset {
            return match p.as_str() {
                "sl2z" => Ok(GroupSpec::sl2z()),
                "reference-schottky" => Ok(GroupSpec::reference_schottky()),
                other => Err(Failure::config(format!("unknown group preset {other:?}"))),
            };
        }
        let kind = g.kind.ok_or_else(|| Failure::config("group.kind or group.preset is required"))?;
        match kind {
            GroupKind::ArithmeticLattice => {
                if !g.generators.is_empty() {
                    return Err(Failure::config("lattice generators are fixed; give group.level instead"));
                }
                Ok(GroupSpec::congruence(g.level.unwrap_or(1))?)
            }
            GroupKind::FreeGroup | GroupKind::Schottky => {
                let gens = g.generators.iter().map(generator).collect::<Result<Vec<_>, _>>()?;
                Ok(GroupSpec::free(kind, gens, g.include_minus_one)?)
            }
        }
    }
}

fn generator(g: &GeneratorConfig) -> Result<Generator, Failure> {
    match (&g.matrix, &g.cartan) {
        (Some(m), None) => {
            let exact: Option<Vec<i64>> = m.iter().map(Entry::exact).collect();
            if let Some(e) = exact {
                return Ok(Generator::integer(IntMat2::new(e[0], e[1], e[2], e[3])));
            }
            let v = m.iter().map(Entry::value).collect::<Result<Vec<_>, _>>()?;
            Ok(Generator::real(Mat2::new(v[0], v[1], v[2], v[3])))
        }
        (None, Some([a, t, b])) => Ok(Generator::real(kak_compose(&CartanCoords::new(*a, *t, *b)))),
        _ => Err(Failure::config("each generator needs exactly one of matrix or cartan")),
    }
}
