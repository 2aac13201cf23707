//! Run configuration: a TOML file, overridden field by field from flags.

use std::path::{Path, PathBuf};

use affine_hls::functions::{QuadConfig, TestFunction};
use affine_hls::geometry::StarBody;
use affine_hls::linalg::{Matrix, Point, ORIGIN};
use serde::{Deserialize, Serialize};

use crate::error::{config_err, CliError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Which body `body-export` writes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExportBody {
    #[default]
    SAlpha,
    RadialMean,
}

/// A test function by family name and parameters. Unset parameters take
/// the defaults listed in the README.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    BoxIndicator {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lo: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hi: Option<Vec<f64>>,
    },
    BallIndicator {
        #[serde(default = "one")]
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    Gaussian {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        variance: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    HlsExtremal {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        b: f64,
        #[serde(default = "one")]
        scale: f64,
        /// Defaults to the run's alpha.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    SimplexExp {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    SconcavePeak {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        s: f64,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
}

/// A star body for the gauge K or the dual mixed volume pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "body", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        #[serde(default = "one")]
        radius: f64,
    },
    Ellipsoid {
        axes: Vec<f64>,
    },
    CrossPolytope {
        #[serde(default = "one")]
        scale: f64,
    },
    Cube {
        #[serde(default = "one")]
        half_width: f64,
    },
    Simplex,
}

fn one() -> f64 {
    1.0
}

fn center(n: usize, c: &Option<Vec<f64>>) -> Result<Point> {
    match c {
        None => Ok(ORIGIN),
        Some(v) if v.len() == n => Ok(affine_hls::linalg::point(v)?),
        Some(v) => config_err(format!("center has {} coordinates, expected {n}", v.len())),
    }
}

impl FamilySpec {
    pub fn parse(text: &str) -> Result<Self> {
        parse_tagged("family", text)
    }

    pub fn build(&self, n: usize, run_alpha: Option<f64>) -> Result<TestFunction> {
        let f = match self {
            FamilySpec::BoxIndicator { lo, hi } => {
                let lo = lo.clone().unwrap_or_else(|| vec![0.0; n]);
                let hi = hi.clone().unwrap_or_else(|| vec![1.0; n]);
                if lo.len() != n || hi.len() != n {
                    return config_err(format!("box corners need {n} coordinates"));
                }
                TestFunction::box_indicator(&lo, &hi)?
            }
            FamilySpec::BallIndicator { radius, center: c } => TestFunction::ball_indicator(n, *radius, center(n, c)?)?,
            FamilySpec::Gaussian { amplitude, variance, center: c } => {
                TestFunction::gaussian(n, *amplitude, Matrix::scalar(n, *variance), center(n, c)?)?
            }
            FamilySpec::HlsExtremal { amplitude, b, scale, alpha, center: c } => {
                let Some(alpha) = alpha.or(run_alpha) else {
                    return config_err("hls-extremal needs an alpha");
                };
                TestFunction::hls_extremal(n, *amplitude, *b, Matrix::scalar(n, *scale), center(n, c)?, alpha)?
            }
            FamilySpec::SimplexExp { amplitude, scale, center: c } => {
                TestFunction::simplex_exponential(*amplitude, scaled_simplex(n, *scale)?, center(n, c)?)?
            }
            FamilySpec::SconcavePeak { amplitude, s, scale, center: c } => {
                TestFunction::sconcave_peak(*amplitude, *s, scaled_simplex(n, *scale)?, center(n, c)?)?
            }
        };
        Ok(f)
    }
}

fn scaled_simplex(n: usize, scale: f64) -> Result<StarBody> {
    let base = StarBody::standard_simplex(n)?;
    if scale == 1.0 {
        return Ok(base);
    }
    Ok(StarBody::linear_image(Matrix::scalar(n, scale), base)?)
}

impl BodySpec {
    pub fn parse(text: &str) -> Result<Self> {
        parse_tagged("body", text)
    }

    pub fn build(&self, n: usize) -> Result<StarBody> {
        let b = match self {
            BodySpec::Ball { radius } => StarBody::ball(n, *radius)?,
            BodySpec::Ellipsoid { axes } => {
                if axes.len() != n {
                    return config_err(format!("ellipsoid needs {n} semi-axes"));
                }
                let sq: Vec<f64> = axes.iter().map(|a| a * a).collect();
                StarBody::ellipsoid(n, Matrix::diagonal(&sq))?
            }
            BodySpec::CrossPolytope { scale } => StarBody::cross_polytope(n, *scale)?,
            BodySpec::Cube { half_width } => StarBody::cube(n, *half_width)?,
            BodySpec::Simplex => StarBody::standard_simplex(n)?,
        };
        Ok(b)
    }
}

/// `name` or `name:key=value,key=value`; values are TOML literals, so
/// `center=[0.5, 0]` works.
fn parse_tagged<T: serde::de::DeserializeOwned>(tag: &str, text: &str) -> Result<T> {
    let (name, rest) = text.split_once(':').unwrap_or((text, ""));
    let mut doc = format!("{tag} = {:?}\n", name.trim());
    let mut depth = 0i32;
    let mut item = String::new();
    let mut items = Vec::new();
    for ch in rest.chars() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                items.push(std::mem::take(&mut item));
                continue;
            }
            _ => {}
        }
        item.push(ch);
    }
    items.push(item);
    for it in items.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        let Some((k, v)) = it.split_once('=') else {
            return config_err(format!("expected key=value in {text:?}, found {it:?}"));
        };
        doc.push_str(&format!("{} = {}\n", k.trim(), v.trim()));
    }
    toml::from_str(&doc).map_err(|e| CliError::Config(format!("bad {tag} spec {text:?}: {}", e.message())))
}

/// Parameter grid of `sweep`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub alphas: Vec<f64>,
    /// Dotted path of a numeric config field, e.g. `f.variance`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param: Option<String>,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Alpha list of the inclusion chain.
    pub alphas: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Concavity parameter of the s-concave chains.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    pub f: FamilySpec,
    pub h: FamilySpec,
    /// Third set of the rearrangement check.
    pub c: FamilySpec,
    pub k: BodySpec,
    pub l: BodySpec,
    /// Sphere grid resolution; 0 picks a default for n.
    pub grid: usize,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub export_body: ExportBody,
    pub quad: QuadConfig,
    pub sweep: SweepSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 1,
            alpha: None,
            alphas: vec![0.5, 1.0, 2.0, 4.0],
            p: None,
            r: None,
            s: None,
            f: FamilySpec::BoxIndicator { lo: None, hi: None },
            h: FamilySpec::BoxIndicator { lo: None, hi: None },
            c: FamilySpec::BallIndicator { radius: 1.0, center: None },
            k: BodySpec::Ball { radius: 1.0 },
            l: BodySpec::Cube { half_width: 1.0 },
            grid: 0,
            format: Format::Json,
            output: None,
            export_body: ExportBody::SAlpha,
            quad: QuadConfig::default(),
            sweep: SweepSpec::default(),
        }
    }
}

/// Grid resolutions small enough for a one-minute run.
pub fn default_grid(n: usize) -> usize {
    match n {
        1 => 2,
        2 => 128,
        _ => 12,
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("bad config: {}", e.message())))
    }

    /// Fills defaults that depend on other fields and checks ranges.
    pub fn resolve(mut self) -> Result<Self> {
        if !(1..=3).contains(&self.n) {
            return config_err(format!("n must be 1, 2 or 3, got {}", self.n));
        }
        if self.grid == 0 {
            self.grid = default_grid(self.n);
        }
        self.quad.validate()?;
        Ok(self)
    }

    pub fn alpha(&self) -> Result<f64> {
        match self.alpha {
            Some(a) if a.is_finite() => Ok(a),
            Some(a) => config_err(format!("alpha must be finite, got {a}")),
            None => config_err("this chain needs --alpha"),
        }
    }

    /// Copy with the numeric field at a dotted path replaced.
    pub fn with_param(&self, path: &str, value: f64) -> Result<Self> {
        let mut table = toml::Table::try_from(self).map_err(|e| CliError::Config(e.to_string()))?;
        let keys: Vec<&str> = path.split('.').collect();
        let (last, parents) = keys.split_last().ok_or_else(|| CliError::Config("empty parameter path".into()))?;
        let mut node = &mut table;
        for k in parents {
            node = match node.get_mut(*k) {
                Some(toml::Value::Table(t)) => t,
                _ => return config_err(format!("no table {k:?} in parameter path {path:?}")),
            };
        }
        let v = match node.get(*last) {
            Some(toml::Value::Integer(_)) if value.fract() == 0.0 => toml::Value::Integer(value as i64),
            _ => toml::Value::Float(value),
        };
        node.insert(last.to_string(), v);
        let text = toml::to_string(&table).map_err(|e| CliError::Config(e.to_string()))?;
        Self::from_toml(&text)
    }
}

/// Flag values layered over the file.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct Overrides {
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Comma-separated alpha list.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub alphas: Option<Vec<f64>>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Family of f, as `name` or `name:key=value,...`.
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub h: Option<String>,
    #[arg(long)]
    pub c: Option<String>,
    /// Body K, as `name` or `name:key=value,...`.
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub l: Option<String>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub mc_samples: Option<usize>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Dotted config path swept by `sweep`, e.g. `f.variance`.
    #[arg(long)]
    pub param: Option<String>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub values: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub body: Option<ExportBody>,
}

impl Overrides {
    pub fn apply(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = &self.$field { $target = v.clone().into(); })*
            };
        }
        set!(n => c.n, alpha => c.alpha, p => c.p, r => c.r, s => c.s, grid => c.grid,
             seed => c.quad.seed, mc_samples => c.quad.mc_samples, rel_tol => c.quad.rel_tol,
             format => c.format, output => c.output, body => c.export_body, param => c.sweep.param);
        if let Some(a) = &self.alphas {
            c.alphas = a.clone();
            c.sweep.alphas = a.clone();
        }
        if let Some(v) = &self.values {
            c.sweep.values = v.clone();
        }
        for (flag, slot) in [(&self.f, &mut c.f), (&self.h, &mut c.h), (&self.c, &mut c.c)] {
            if let Some(t) = flag {
                *slot = FamilySpec::parse(t)?;
            }
        }
        for (flag, slot) in [(&self.k, &mut c.k), (&self.l, &mut c.l)] {
            if let Some(t) = flag {
                *slot = BodySpec::parse(t)?;
            }
        }
        c.resolve()
    }
}
