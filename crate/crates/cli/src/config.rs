//! Run configuration: a TOML document, validated into [`RunConfig`].
//!
//! ```toml
//! task = "reflect-sweep"
//!
//! [spin_orbit]
//! kind = "rashba"          # or "dresselhaus"
//! kappa = 1.0              # or: scales = { alpha = .., m_star = .., hbar = .. }
//!
//! [coupling]
//! form = "scalars"         # "scalars" | "matrices" | "natural"
//! a = 1.0
//! c = 1.0                  # complex values are a number or [re, im]
//! d = 0.0
//!
//! [grids]
//! k = { start = 0.1, stop = 10.0, count = 100 }
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use hybrid_plane::junction::{
    reduce_units, tilde_transform, validate_coupling, CouplingMatrices, PhysicalScales, SpinIndependentCoupling, Spinor,
};
use hybrid_plane::plane_green::{SpinMatrix2, SpinOrbitKind, SpinOrbitParams};
use hybrid_plane::spectrum::SearchInterval;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    GreenPlane,
    GreenRenorm,
    BoundStates,
    ReflectSweep,
    StateDump,
    Diagnostics,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::GreenPlane => "green-plane",
            Task::GreenRenorm => "green-renorm",
            Task::BoundStates => "bound-states",
            Task::ReflectSweep => "reflect-sweep",
            Task::StateDump => "state-dump",
            Task::Diagnostics => "diagnostics",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

/// A complex number written either as a real number or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn value(&self) -> Complex64 {
        match *self {
            ComplexValue::Real(x) => Complex64::new(x, 0.0),
            ComplexValue::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Rashba,
    Dresselhaus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalesSection {
    pub alpha: f64,
    pub m_star: f64,
    pub hbar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinOrbitSection {
    pub kind: Kind,
    pub kappa: Option<f64>,
    pub scales: Option<ScalesSection>,
}

pub type MatrixValue = [[ComplexValue; 2]; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CouplingSection {
    Scalars { a: f64, c: ComplexValue, d: f64 },
    Matrices { a: MatrixValue, c: MatrixValue, d: MatrixValue },
    Natural { rho: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// Either an explicit list or `count` points from `start` to `stop`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: Option<usize>,
    pub spacing: Option<Spacing>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridsSection {
    pub k: Option<GridSection>,
    pub energy: Option<GridSection>,
    /// Imaginary part added to every energy; 0 means the limit from above.
    pub energy_imag: Option<f64>,
    pub lead: Option<GridSection>,
    pub plane_x1: Option<GridSection>,
    pub plane_x2: Option<GridSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSection {
    pub kappa_b_min: Option<f64>,
    pub kappa_b_max: Option<f64>,
    pub reality_samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    pub k: f64,
    pub spin: [ComplexValue; 2],
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub task: Task,
    pub spin_orbit: Option<SpinOrbitSection>,
    pub coupling: Option<CouplingSection>,
    #[serde(default)]
    pub grids: GridsSection,
    pub search: Option<SearchSection>,
    pub state: Option<StateSection>,
    #[serde(default)]
    pub output: OutputSection,
}

/// A validated coupling: the matrices, plus the scalar view when all three
/// blocks are multiples of the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub matrices: CouplingMatrices,
    pub scalars: Option<SpinIndependentCoupling>,
}

impl Coupling {
    pub fn spin_independent(&self, task: Task) -> CliResult<SpinIndependentCoupling> {
        self.scalars.ok_or_else(|| {
            CliError::Schema(format!(
                "task {task} needs a spin-independent coupling (A, C, D multiples of the identity)"
            ))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grids {
    pub k: Option<Vec<f64>>,
    pub energy: Option<Vec<f64>>,
    pub energy_imag: f64,
    pub lead: Option<Vec<f64>>,
    pub plane_x1: Option<Vec<f64>>,
    pub plane_x2: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSpec {
    pub k: f64,
    pub spin: Spinor,
}

pub const DEFAULT_REALITY_SAMPLES: usize = 200;

/// Validated configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub spin_orbit: SpinOrbitParams,
    pub coupling: Option<Coupling>,
    pub grids: Grids,
    pub search: SearchInterval,
    pub reality_samples: usize,
    pub state: Option<StateSpec>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    /// The document as parsed, echoed into the metadata sidecar.
    pub document: ConfigDocument,
}

impl RunConfig {
    /// Configuration of a diagnostics run when no file is given.
    pub fn diagnostics_default() -> Self {
        let doc = ConfigDocument {
            task: Task::Diagnostics,
            spin_orbit: None,
            coupling: None,
            grids: GridsSection::default(),
            search: None,
            state: None,
            output: OutputSection::default(),
        };
        validate(doc).expect("the default diagnostics document is valid")
    }

    pub fn grid(&self, name: &str) -> CliResult<&[f64]> {
        let g = match name {
            "k" => &self.grids.k,
            "energy" => &self.grids.energy,
            "lead" => &self.grids.lead,
            "plane_x1" => &self.grids.plane_x1,
            "plane_x2" => &self.grids.plane_x2,
            _ => unreachable!("unknown grid name"),
        };
        g.as_deref()
            .ok_or_else(|| CliError::Schema(format!("task {} needs grids.{name}", self.task)))
    }

    pub fn coupling(&self) -> CliResult<&Coupling> {
        self.coupling
            .as_ref()
            .ok_or_else(|| CliError::Schema(format!("task {} needs a [coupling] section", self.task)))
    }
}

pub fn parse_config(text: &str) -> CliResult<RunConfig> {
    let doc: ConfigDocument = toml::from_str(text).map_err(|e| classify_toml_error(text, e))?;
    validate(doc)
}

fn classify_toml_error(text: &str, e: toml::de::Error) -> CliError {
    // a document that parses as plain TOML but not into the schema is a
    // schema violation; anything else is a syntax error
    match text.parse::<toml::Table>() {
        Ok(_) => CliError::Schema(e.message().to_string()),
        Err(_) => CliError::Syntax(e.message().to_string()),
    }
}

fn validate(doc: ConfigDocument) -> CliResult<RunConfig> {
    let spin_orbit = match &doc.spin_orbit {
        Some(s) => spin_orbit_params(s)?,
        None if doc.task == Task::Diagnostics => SpinOrbitParams::free(),
        None => return Err(CliError::Schema(format!("task {} needs a [spin_orbit] section", doc.task))),
    };
    let coupling = doc.coupling.as_ref().map(coupling).transpose()?;
    let g = &doc.grids;
    let grids = Grids {
        k: g.k.as_ref().map(|s| build_grid("k", s)).transpose()?,
        energy: g.energy.as_ref().map(|s| build_grid("energy", s)).transpose()?,
        energy_imag: finite("grids.energy_imag", g.energy_imag.unwrap_or(0.0))?,
        lead: g.lead.as_ref().map(|s| build_grid("lead", s)).transpose()?,
        plane_x1: g.plane_x1.as_ref().map(|s| build_grid("plane_x1", s)).transpose()?,
        plane_x2: g.plane_x2.as_ref().map(|s| build_grid("plane_x2", s)).transpose()?,
    };
    let search_doc = doc.search.unwrap_or_default();
    let default_search = SearchInterval::below_essential_spectrum(&spin_orbit);
    let search = SearchInterval::new(
        search_doc.kappa_b_min.unwrap_or(default_search.lo),
        search_doc.kappa_b_max.unwrap_or(default_search.hi),
    )
    .map_err(|e| CliError::Schema(format!("[search]: {e}")))?;
    let state = doc
        .state
        .map(|s| {
            Ok::<_, CliError>(StateSpec {
                k: finite("state.k", s.k)?,
                spin: Spinor::new(s.spin[0].value(), s.spin[1].value()),
            })
        })
        .transpose()?;

    let cfg = RunConfig {
        task: doc.task,
        spin_orbit,
        coupling,
        grids,
        search,
        reality_samples: search_doc.reality_samples.unwrap_or(DEFAULT_REALITY_SAMPLES),
        state,
        output_path: doc.output.path.clone(),
        format: doc.output.format.unwrap_or(Format::Csv),
        document: doc,
    };
    check_task_requirements(&cfg)?;
    Ok(cfg)
}

fn check_task_requirements(cfg: &RunConfig) -> CliResult<()> {
    match cfg.task {
        Task::GreenPlane => {
            cfg.grid("energy")?;
            cfg.grid("plane_x1")?;
            cfg.grid("plane_x2")?;
        }
        Task::GreenRenorm => {
            cfg.grid("energy")?;
        }
        Task::BoundStates => {
            cfg.coupling()?.spin_independent(cfg.task)?;
            if cfg.reality_samples == 0 {
                return Err(CliError::Schema("search.reality_samples must be positive".into()));
            }
        }
        Task::ReflectSweep => {
            cfg.coupling()?.spin_independent(cfg.task)?;
            cfg.grid("k")?;
        }
        Task::StateDump => {
            let c = cfg.coupling()?;
            c.spin_independent(cfg.task)?;
            // the scattering state is built from the tilde form, which needs A⁻¹
            if let Err(e) = tilde_transform(&c.matrices) {
                return Err(match e {
                    hybrid_plane::Error::SingularNeumannBlock { condition } => CliError::SingularNeumannBlock { condition },
                    other => CliError::Compute(other),
                });
            }
            if cfg.state.is_none() {
                return Err(CliError::Schema("task state-dump needs a [state] section".into()));
            }
            if cfg.grids.lead.is_none() && cfg.grids.plane_x1.is_none() {
                return Err(CliError::Schema("task state-dump needs grids.lead and/or grids.plane_x1 + plane_x2".into()));
            }
            if cfg.grids.plane_x1.is_some() != cfg.grids.plane_x2.is_some() {
                return Err(CliError::Schema("grids.plane_x1 and grids.plane_x2 must be given together".into()));
            }
        }
        Task::Diagnostics => {}
    }
    Ok(())
}

fn finite(name: &str, x: f64) -> CliResult<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Schema(format!("{name} must be finite")))
    }
}

fn spin_orbit_params(s: &SpinOrbitSection) -> CliResult<SpinOrbitParams> {
    let kind = match s.kind {
        Kind::Rashba => SpinOrbitKind::Rashba,
        Kind::Dresselhaus => SpinOrbitKind::Dresselhaus,
    };
    let kappa = match (s.kappa, s.scales) {
        (Some(k), None) => finite("spin_orbit.kappa", k)?,
        (None, Some(sc)) => {
            let scales = PhysicalScales::new(sc.alpha, sc.m_star, sc.hbar)
                .map_err(|e| CliError::Schema(format!("spin_orbit.scales: {e}")))?;
            reduce_units(&scales)
        }
        _ => return Err(CliError::Schema("spin_orbit needs exactly one of `kappa` or `scales`".into())),
    };
    SpinOrbitParams::new(kind, kappa).map_err(|e| CliError::Schema(format!("spin_orbit: {e}")))
}

fn matrix(m: &MatrixValue) -> SpinMatrix2 {
    SpinMatrix2::new(m[0][0].value(), m[0][1].value(), m[1][0].value(), m[1][1].value())
}

fn coupling(s: &CouplingSection) -> CliResult<Coupling> {
    let map = |e: hybrid_plane::Error| match e {
        hybrid_plane::Error::NotHermitian { name, deviation } => CliError::NotHermitian {
            name: name.to_string(),
            deviation,
        },
        other => CliError::Schema(format!("coupling: {other}")),
    };
    let matrices = match s {
        CouplingSection::Scalars { a, c, d } => {
            let c = c.value();
            if !a.is_finite() || !d.is_finite() || !c.re.is_finite() || !c.im.is_finite() {
                return Err(CliError::Schema("coupling scalars must be finite".into()));
            }
            SpinIndependentCoupling::new(*a, c, *d).map_err(map)?.to_matrices()
        }
        CouplingSection::Matrices { a, c, d } => validate_coupling(matrix(a), matrix(c), matrix(d)).map_err(map)?,
        CouplingSection::Natural { rho } => {
            if !(*rho > 0.0) || !rho.is_finite() {
                return Err(CliError::NonPositiveRho(*rho));
            }
            SpinIndependentCoupling::natural(*rho).map_err(map)?.to_matrices()
        }
    };
    Ok(Coupling {
        scalars: SpinIndependentCoupling::from_matrices(&matrices),
        matrices,
    })
}

fn build_grid(name: &str, s: &GridSection) -> CliResult<Vec<f64>> {
    let values = match (&s.values, s.start, s.stop, s.count) {
        (Some(v), None, None, None) if s.spacing.is_none() => v.clone(),
        (None, Some(start), Some(stop), Some(count)) => {
            if count == 0 {
                return Err(CliError::EmptyGrid(name.into()));
            }
            if count == 1 {
                vec![start]
            } else {
                let t = |i: usize| i as f64 / (count - 1) as f64;
                match s.spacing.unwrap_or(Spacing::Linear) {
                    Spacing::Linear => (0..count).map(|i| start + (stop - start) * t(i)).collect(),
                    Spacing::Log => {
                        if !(start > 0.0 && stop > 0.0) {
                            return Err(CliError::Schema(format!("grids.{name}: log spacing needs positive bounds")));
                        }
                        let (l0, l1) = (start.ln(), stop.ln());
                        (0..count)
                            .map(|i| match i {
                                0 => start,
                                _ if i == count - 1 => stop,
                                _ => (l0 + (l1 - l0) * t(i)).exp(),
                            })
                            .collect()
                    }
                }
            }
        }
        _ => {
            return Err(CliError::Schema(format!(
                "grids.{name} needs either `values` or all of `start`, `stop`, `count`"
            )))
        }
    };
    if values.is_empty() {
        return Err(CliError::EmptyGrid(name.into()));
    }
    let finite = values.iter().all(|x| x.is_finite());
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    if !finite || !(increasing || decreasing) {
        return Err(CliError::NonMonotoneGrid(name.into()));
    }
    Ok(values)
}
