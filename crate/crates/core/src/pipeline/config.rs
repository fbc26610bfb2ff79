use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::expr::Expr;
use crate::fieldcalc::Grid;
use crate::pointrot::step_count;
use crate::pressure::BodyForce;
use crate::{Error, Result};

/// Generator for the solenoidal initial velocity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum UwGenerator {
    Zero,
    /// `(A sin z + C cos y, B sin x + A cos z, C sin y + B cos x)`.
    Abc {
        #[serde(rename = "A")]
        a: f64,
        #[serde(rename = "B")]
        b: f64,
        #[serde(rename = "C")]
        c: f64,
    },
    /// `(cos x sin y, −sin x cos y, 0)`.
    TaylorGreen,
    /// Random modes with `|k| <= kmax`, Leray-projected.
    RandomBandlimited {
        kmax: u32,
        seed: u64,
    },
}

/// Generator for the irrotational initial velocity.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum UpGenerator {
    #[default]
    Zero,
    /// `u_p0 = ∇ phi_vel` for a closed-form potential.
    GradientOf { phi_vel: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaMode {
    /// `γ(x) = |u_p0(x)|`.
    #[default]
    FromInitial,
    /// `u_p0` normalised to unit length wherever it is nonzero, `γ = 1` there.
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointSolver {
    /// Variation of parameters over the homogeneous fundamental system.
    #[default]
    Vop,
    /// RK4 on the forced system.
    Direct,
}

fn default_length() -> f64 {
    TAU
}

fn default_stride() -> usize {
    1
}

fn default_rho() -> f64 {
    1.0
}

fn default_phi_body() -> String {
    "0".into()
}

fn default_output_dir() -> String {
    "out".into()
}

/// A complete scenario. Field names are the JSON keys; unknown keys are
/// rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n: usize,
    #[serde(rename = "L", default = "default_length")]
    pub length: f64,
    pub nu: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub dt: f64,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    pub initial_uw: UwGenerator,
    #[serde(default)]
    pub initial_up: UpGenerator,
    #[serde(default)]
    pub gamma_mode: GammaMode,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_phi_body")]
    pub phi_body: String,
    #[serde(default)]
    pub solver: PointSolver,
    /// Where a run writes its files. Not part of the scenario identity: it is
    /// never serialized and does not enter the hash.
    #[serde(default = "default_output_dir", skip_serializing)]
    pub output_dir: String,
}

impl ScenarioConfig {
    /// Parses and validates a JSON config.
    pub fn from_json(src: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(src).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.nu.is_finite() && self.nu >= 0.0) {
            return bad(format!("nu must be >= 0, got {}", self.nu));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return bad(format!("T must be positive, got {}", self.horizon));
        }
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return bad(format!("rho must be positive, got {}", self.rho));
        }
        let steps = self.steps()?;
        if self.snapshot_stride == 0 || steps % self.snapshot_stride != 0 {
            return bad(format!(
                "snapshot_stride {} must divide the {steps} time steps",
                self.snapshot_stride
            ));
        }
        Expr::parse(&self.phi_body).map_err(|e| Error::Config(format!("phi_body: {e}")))?;
        if let UpGenerator::GradientOf { phi_vel } = &self.initial_up {
            Expr::parse(phi_vel).map_err(|e| Error::Config(format!("phi_vel: {e}")))?;
        }
        match &self.initial_uw {
            UwGenerator::Abc { a, b, c } if !(a.is_finite() && b.is_finite() && c.is_finite()) => {
                bad("abc coefficients must be finite".into())
            }
            UwGenerator::RandomBandlimited { kmax, .. }
                if *kmax == 0 || i64::from(*kmax) > grid.dealias_cutoff() =>
            {
                bad(format!(
                    "kmax must lie in [1, {}] for n = {}",
                    grid.dealias_cutoff(),
                    self.n
                ))
            }
            _ => Ok(()),
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.length).map_err(|e| Error::Config(e.to_string()))
    }

    /// Number of time steps `T / dt`.
    pub fn steps(&self) -> Result<usize> {
        match step_count(self.dt, self.horizon) {
            Ok(0) => Err(Error::Config("T / dt must be at least one step".into())),
            Ok(s) => Ok(s),
            Err(e) => Err(Error::Config(e.to_string())),
        }
    }

    pub fn body_force(&self) -> Result<BodyForce> {
        let phi = Expr::parse(&self.phi_body)?;
        BodyForce::from_expr(self.grid()?, &phi, self.rho)
    }

    /// Replaces the seed of a random generator; other generators are unchanged.
    pub fn with_seed(mut self, seed: u64) -> Self {
        if let UwGenerator::RandomBandlimited { seed: s, .. } = &mut self.initial_uw {
            *s = seed;
        }
        self
    }

    /// SHA-256 of the canonical (compact) JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
