use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{hash_json, log_spaced};
use crate::error::{Error, Result};
use crate::models::{Decay, Embedding, MagneticField, ModelKind, ModelSpec, Potential};
use crate::operators::Grid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub model: ModelBlock,
    pub field: FieldBlock,
    #[serde(default)]
    pub sweep: Option<SweepBlock>,
    #[serde(default)]
    pub certify: Option<CertifyBlock>,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub kind: ModelKind,
    pub dim: usize,
    #[serde(rename = "L")]
    pub extent: f64,
    #[serde(rename = "h", default = "one")]
    pub spacing: f64,
    #[serde(rename = "J", default = "minus_one")]
    pub hopping: f64,
    #[serde(default = "default_decay")]
    pub decay: Decay,
    #[serde(default)]
    pub potential: Potential,
    #[serde(default)]
    pub embedding: Option<Embedding>,
    #[serde(default)]
    pub a_shift: Option<f64>,
}

fn one() -> f64 {
    1.0
}

fn minus_one() -> f64 {
    -1.0
}

fn default_decay() -> Decay {
    Decay::Exponential { rate: 1.0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldShape {
    Uniform,
    /// `strength · cos(wavenumber · x₁)`
    Cosine,
}

/// B_b = B₀ + b𝔟 with B₀ of strength `b0` and 𝔟 of strength `db`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldBlock {
    #[serde(rename = "type")]
    pub shape: FieldShape,
    #[serde(default)]
    pub b0: f64,
    pub db: f64,
    #[serde(default)]
    pub wavenumber: f64,
}

impl FieldBlock {
    fn field(&self, strength: f64) -> MagneticField {
        if strength == 0.0 {
            return MagneticField::zero();
        }
        match self.shape {
            FieldShape::Uniform => MagneticField::uniform(strength),
            FieldShape::Cosine => MagneticField::cosine(strength, self.wavenumber),
        }
    }

    pub fn base(&self) -> MagneticField {
        self.field(self.b0)
    }

    pub fn variation(&self) -> MagneticField {
        self.field(self.db)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepQuantity {
    Hausdorff,
    Defect,
    Theorem2,
    Alpha0,
}

/// Either an explicit list or a log-spaced range, optionally preceded by b = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum BGrid {
    Values {
        values: Vec<f64>,
    },
    LogRange {
        lo: f64,
        hi: f64,
        count: usize,
        #[serde(default)]
        include_zero: bool,
    },
}

impl BGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            BGrid::Values { values } => Ok(values.clone()),
            BGrid::LogRange {
                lo,
                hi,
                count,
                include_zero,
            } => {
                let mut v = if *include_zero { vec![0.0] } else { Vec::new() };
                v.extend(log_spaced(*lo, *hi, *count)?);
                Ok(v)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub quantity: SweepQuantity,
    pub b_grid: BGrid,
    /// Spectral parameters as [re, im]; the defect sweep uses the first.
    #[serde(default)]
    pub z: Vec<[f64; 2]>,
    /// Truncation radii of the heavy-tail pipeline.
    #[serde(default, rename = "M")]
    pub radii: Vec<f64>,
    #[serde(default)]
    pub beta_ref: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyBlock {
    #[serde(default)]
    pub b: Vec<f64>,
    #[serde(default)]
    pub z: Vec<[f64; 2]>,
    /// Extra spectral parameters drawn uniformly from a box around σ(H),
    /// seeded by the run seed.
    #[serde(default)]
    pub z_random: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<String> {
    vec!["csv".into(), "json".into()]
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            directory: default_directory(),
            formats: default_formats(),
        }
    }
}

impl RunConfig {
    /// Reads TOML, or JSON when the file name ends in `.json`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidArgument(format!("cannot read config {}: {e}", path.display()))
        })?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let cfg: RunConfig = if is_json {
            serde_json::from_str(&text)
                .map_err(|e| Error::InvalidArgument(format!("config: {e}")))?
        } else {
            toml::from_str(&text).map_err(|e| Error::InvalidArgument(format!("config: {e}")))?
        };
        cfg.model_spec()?;
        Ok(cfg)
    }

    pub fn hash(&self) -> Result<String> {
        hash_json(self)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.model.dim, self.model.extent, self.model.spacing)
    }

    pub fn model_spec(&self) -> Result<ModelSpec> {
        let m = &self.model;
        let grid = self.grid()?;
        let mut spec = match m.kind {
            ModelKind::MagSchrodinger => ModelSpec::mag_schrodinger(grid),
            _ => ModelSpec::harper(grid, m.hopping, 1.0),
        };
        spec.kind = m.kind;
        spec.hopping = m.hopping;
        spec.decay = m.decay;
        spec.potential = m.potential;
        if let Some(e) = m.embedding {
            spec.embedding = e;
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Shift added to the magnetic Schrödinger operator.
    pub fn a_shift(&self) -> Result<f64> {
        match self.model.a_shift {
            Some(a) if a.is_finite() => Ok(a),
            Some(a) => Err(Error::InvalidArgument(format!(
                "a_shift = {a} is not finite"
            ))),
            None => Err(Error::InvalidArgument(
                "mag_schrodinger needs model.a_shift".into(),
            )),
        }
    }

    pub fn sweep(&self) -> Result<&SweepBlock> {
        self.sweep
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("config has no [sweep] block".into()))
    }
}
