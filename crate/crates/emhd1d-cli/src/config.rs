//! Run configuration: flat `key = value` text with an explicit schema version.
//!
//! Silent typos must not change physics, so the parser is strict: the
//! `schema` key is mandatory, unknown keys and duplicates are errors, and
//! every optional key has an explicit default that the emitted manifest
//! spells out. The resolved configuration round-trips through the same
//! parser, which is what makes manifests replayable.
//!
//! Example:
//!
//! ```text
//! schema = 1
//! n = 512
//! half_period = pi
//! model = e1d3
//! alpha = 1.5
//! mu = 1.0
//! init = rough:2.5,7
//! amplitude = 0.1
//! cfl = 0.4
//! t_end = 1.0
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use emhd1d::blowup::blowup_profile;
use emhd1d::dynamics::{DealiasMode, ModelParams, SolverConfig, StepPolicy};
use emhd1d::{init, Field, Grid};

/// Configuration schema version this build reads and writes.
pub const SCHEMA_VERSION: u64 = 1;

/// Initial-datum selector.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    /// `cosine`: the fundamental mode with unit peak (before `amplitude`).
    Cosine,
    /// `rough:<decay>,<seed>`: random-phase spectrum `|k|^{-decay}` filling
    /// the dealiased band, drawn deterministically from the seed.
    Rough {
        /// Algebraic spectral decay exponent.
        decay: f64,
        /// Generator seed; the run's only source of randomness.
        seed: u64,
    },
    /// `blowup_profile`: the compactly supported odd collapse profile.
    BlowupProfile,
    /// `coeff_list:<path>`: explicit `k re im` coefficient lines.
    CoeffList(PathBuf),
}

impl InitSpec {
    /// Parses the `init` value of a config file.
    pub fn parse(value: &str) -> Result<Self> {
        if value == "cosine" {
            return Ok(InitSpec::Cosine);
        }
        if value == "blowup_profile" {
            return Ok(InitSpec::BlowupProfile);
        }
        if let Some(rest) = value.strip_prefix("rough:") {
            let (decay, seed) = rest
                .split_once(',')
                .ok_or_else(|| anyhow!("init 'rough:' needs '<decay>,<seed>', got '{rest}'"))?;
            return Ok(InitSpec::Rough {
                decay: parse_float("init decay", decay.trim())?,
                seed: seed
                    .trim()
                    .parse()
                    .with_context(|| format!("init seed '{seed}' is not a u64"))?,
            });
        }
        if let Some(path) = value.strip_prefix("coeff_list:") {
            if path.is_empty() {
                bail!("init 'coeff_list:' needs a file path");
            }
            return Ok(InitSpec::CoeffList(PathBuf::from(path)));
        }
        bail!(
            "unknown init '{value}' (expected cosine | rough:<decay>,<seed> | \
             blowup_profile | coeff_list:<path>)"
        );
    }

    /// The seed governing this datum; zero for the deterministic presets.
    pub fn seed(&self) -> u64 {
        match self {
            InitSpec::Rough { seed, .. } => *seed,
            _ => 0,
        }
    }

    /// Constructs the datum on `grid`, scaled by `amplitude`.
    pub fn build(&self, grid: Grid, amplitude: f64) -> Result<Field> {
        let field = match self {
            InitSpec::Cosine => init::cosine(grid, 1.0),
            InitSpec::Rough { decay, seed } => {
                init::rough_field(grid, *decay, grid.dealias_cutoff(), *seed)?
            }
            InitSpec::BlowupProfile => blowup_profile(grid)?,
            InitSpec::CoeffList(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading coefficient list {}", path.display()))?;
                init::from_coefficient_list(grid, &parse_coefficient_lines(&text)?)?
            }
        };
        Ok(field.scaled(amplitude))
    }
}

impl fmt::Display for InitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitSpec::Cosine => write!(f, "cosine"),
            InitSpec::Rough { decay, seed } => write!(f, "rough:{decay:?},{seed}"),
            InitSpec::BlowupProfile => write!(f, "blowup_profile"),
            InitSpec::CoeffList(path) => write!(f, "coeff_list:{}", path.display()),
        }
    }
}

/// Parses `k re im` lines (blank lines and `#` comments allowed).
fn parse_coefficient_lines(text: &str) -> Result<Vec<(i64, f64, f64)>> {
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            bail!("coefficient line {}: expected 'k re im', got '{line}'", idx + 1);
        }
        entries.push((
            parts[0]
                .parse()
                .with_context(|| format!("coefficient line {}: bad wavenumber", idx + 1))?,
            parse_float("coefficient re", parts[1])?,
            parse_float("coefficient im", parts[2])?,
        ));
    }
    Ok(entries)
}

/// A fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Number of collocation nodes (power of two).
    pub n: usize,
    /// Half-period `L`; the domain is `[-L, L]`.
    pub half_period: f64,
    /// Model selector: `full` | `e1d2` | `e1d3` | `e1d4`.
    pub model: String,
    /// Interaction coefficient (meaningful only for `model = full`).
    pub a: f64,
    /// Transport coefficient (meaningful only for `model = full`).
    pub b: f64,
    /// Dissipation order.
    pub alpha: f64,
    /// Dissipation strength.
    pub mu: f64,
    /// Initial-datum selector.
    pub init: InitSpec,
    /// Scale factor applied to the initial datum.
    pub amplitude: f64,
    /// Step policy from the `dt` or `cfl` key.
    pub policy: StepPolicy,
    /// Product band control.
    pub dealias: DealiasMode,
    /// Final time.
    pub t_end: f64,
    /// Diagnostics stride in steps.
    pub stride: usize,
    /// Extra Sobolev exponents per diagnostics row.
    pub sobolev: Vec<f64>,
    /// Optional stop threshold on `||B_x||_inf`.
    pub stop_lip: Option<f64>,
    /// Optional stop threshold on the analyticity radius.
    pub stop_radius: Option<f64>,
    /// Checkpoint stride in steps (0 = initial and final only).
    pub checkpoint_stride: usize,
}

impl RunConfig {
    /// Parses a config file, resolving a relative `coeff_list` path against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg = Self::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        if let InitSpec::CoeffList(ref list) = cfg.init {
            if list.is_relative() {
                if let Some(dir) = path.parent() {
                    cfg.init = InitSpec::CoeffList(dir.join(list));
                }
            }
        }
        Ok(cfg)
    }

    /// Parses config text.
    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> Result<Self> {
        Self::from_map(parse_kv(text)?)
    }

    /// Consumes a key-value map; unknown leftovers are errors.
    pub fn from_map(mut map: BTreeMap<String, String>) -> Result<Self> {
        let schema = required(&mut map, "schema")?;
        if schema.trim() != SCHEMA_VERSION.to_string() {
            bail!("unsupported schema '{schema}' (this build reads schema {SCHEMA_VERSION})");
        }

        let n: usize = required(&mut map, "n")?
            .trim()
            .parse()
            .context("key 'n' is not an integer")?;
        let half_period = parse_half_period(&optional(&mut map, "half_period", "pi"))?;
        let model = required(&mut map, "model")?.trim().to_string();
        let a_key = map.remove("a");
        let b_key = map.remove("b");
        let (a, b) = match model.as_str() {
            "full" => (
                parse_float("a", a_key.as_deref().ok_or_else(|| anyhow!("model = full needs 'a'"))?)?,
                parse_float("b", b_key.as_deref().ok_or_else(|| anyhow!("model = full needs 'b'"))?)?,
            ),
            _ => {
                if a_key.is_some() || b_key.is_some() {
                    bail!("'a'/'b' are only valid with model = full; '{model}' fixes them");
                }
                (0.0, 0.0)
            }
        };
        let alpha = parse_float("alpha", &required(&mut map, "alpha")?)?;
        let mu = parse_float("mu", &required(&mut map, "mu")?)?;
        let init = InitSpec::parse(required(&mut map, "init")?.trim())?;
        let amplitude = parse_float("amplitude", &optional(&mut map, "amplitude", "1.0"))?;

        let dt = map.remove("dt");
        let cfl = map.remove("cfl");
        let policy = match (dt, cfl) {
            (Some(dt), None) => StepPolicy::Fixed(parse_float("dt", &dt)?),
            (None, Some(c)) => StepPolicy::Cfl {
                c: parse_float("cfl", &c)?,
            },
            (Some(_), Some(_)) => bail!("'dt' and 'cfl' are mutually exclusive"),
            (None, None) => bail!("exactly one of 'dt' or 'cfl' is required"),
        };
        let t_end = parse_float("t_end", &required(&mut map, "t_end")?)?;
        let dealias = parse_dealias(&optional(&mut map, "dealias", "on"))?;
        let stride: usize = optional(&mut map, "stride", "1")
            .trim()
            .parse()
            .context("key 'stride' is not an integer")?;
        let sobolev = parse_float_list(&optional(&mut map, "sobolev", ""))?;
        let stop_lip = parse_optional_float("stop_lip", &optional(&mut map, "stop_lip", "none"))?;
        let stop_radius =
            parse_optional_float("stop_radius", &optional(&mut map, "stop_radius", "none"))?;
        let checkpoint_stride: usize = optional(&mut map, "checkpoint_stride", "0")
            .trim()
            .parse()
            .context("key 'checkpoint_stride' is not an integer")?;

        if !map.is_empty() {
            let unknown: Vec<&str> = map.keys().map(String::as_str).collect();
            bail!("unknown config keys: {}", unknown.join(", "));
        }

        let cfg = RunConfig {
            n,
            half_period,
            model,
            a,
            b,
            alpha,
            mu,
            init,
            amplitude,
            policy,
            dealias,
            t_end,
            stride,
            sobolev,
            stop_lip,
            stop_radius,
            checkpoint_stride,
        };
        // Fail fast on values the library would reject anyway.
        cfg.grid()?;
        cfg.model_params()?;
        Ok(cfg)
    }

    /// The collocation grid.
    pub fn grid(&self) -> Result<Grid> {
        Ok(Grid::new(self.n, self.half_period)?)
    }

    /// The resolved model coefficients.
    pub fn model_params(&self) -> Result<ModelParams> {
        Ok(ModelParams::preset(
            &self.model,
            self.a,
            self.b,
            self.alpha,
            self.mu,
        )?)
    }

    /// The initial datum.
    pub fn initial_field(&self) -> Result<Field> {
        self.init.build(self.grid()?, self.amplitude)
    }

    /// The solver configuration.
    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            policy: self.policy,
            dealias: self.dealias,
            stride: self.stride,
            t_end: self.t_end,
            sobolev: self.sobolev.clone(),
            stop_lip: self.stop_lip,
            stop_radius: self.stop_radius,
            checkpoint_stride: self.checkpoint_stride,
        }
    }

    /// The seed governing the run (zero when the datum is deterministic).
    pub fn seed(&self) -> u64 {
        self.init.seed()
    }

    /// Every key resolved, defaults included, in the file syntax. Feeding
    /// this map back through [`RunConfig::from_map`] reproduces `self`.
    pub fn resolved_map(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        let mut put = |k: &str, v: String| map.insert(k.to_string(), v);
        put("schema", SCHEMA_VERSION.to_string());
        put("n", self.n.to_string());
        put("half_period", format!("{:?}", self.half_period));
        put("model", self.model.clone());
        if self.model == "full" {
            put("a", format!("{:?}", self.a));
            put("b", format!("{:?}", self.b));
        }
        put("alpha", format!("{:?}", self.alpha));
        put("mu", format!("{:?}", self.mu));
        put("init", self.init.to_string());
        put("amplitude", format!("{:?}", self.amplitude));
        match self.policy {
            StepPolicy::Fixed(dt) => put("dt", format!("{dt:?}")),
            StepPolicy::Cfl { c } => put("cfl", format!("{c:?}")),
        };
        put("t_end", format!("{:?}", self.t_end));
        put(
            "dealias",
            match self.dealias {
                DealiasMode::TwoThirds => "on".to_string(),
                DealiasMode::Off => "off".to_string(),
                DealiasMode::SharpCutoff(k) => format!("truncate:{k}"),
            },
        );
        put("stride", self.stride.to_string());
        put(
            "sobolev",
            self.sobolev
                .iter()
                .map(|s| format!("{s:?}"))
                .collect::<Vec<_>>()
                .join(","),
        );
        put(
            "stop_lip",
            self.stop_lip.map_or("none".into(), |v| format!("{v:?}")),
        );
        put(
            "stop_radius",
            self.stop_radius.map_or("none".into(), |v| format!("{v:?}")),
        );
        put("checkpoint_stride", self.checkpoint_stride.to_string());
        map
    }
}

/// Splits flat `key = value` text into a map; duplicates are errors.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected 'key = value', got '{line}'", idx + 1))?;
        let key = key.trim().to_string();
        if key.is_empty() {
            bail!("line {}: empty key", idx + 1);
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            bail!("line {}: duplicate key '{key}'", idx + 1);
        }
    }
    Ok(map)
}

fn required(map: &mut BTreeMap<String, String>, key: &str) -> Result<String> {
    map.remove(key)
        .ok_or_else(|| anyhow!("missing required key '{key}'"))
}

fn optional(map: &mut BTreeMap<String, String>, key: &str, default: &str) -> String {
    map.remove(key).unwrap_or_else(|| default.to_string())
}

fn parse_float(what: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .trim()
        .parse()
        .with_context(|| format!("key '{what}': '{value}' is not a number"))?;
    if !v.is_finite() {
        bail!("key '{what}': {v} is not finite");
    }
    Ok(v)
}

fn parse_optional_float(what: &str, value: &str) -> Result<Option<f64>> {
    if value.trim() == "none" {
        return Ok(None);
    }
    parse_float(what, value).map(Some)
}

fn parse_float_list(value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_float("sobolev", s))
        .collect()
}

/// Accepts a plain float, `pi`, or `<factor>pi` (e.g. `2pi`).
fn parse_half_period(value: &str) -> Result<f64> {
    let value = value.trim();
    if let Some(prefix) = value.strip_suffix("pi") {
        let factor = if prefix.is_empty() {
            1.0
        } else {
            parse_float("half_period", prefix)?
        };
        return Ok(factor * std::f64::consts::PI);
    }
    parse_float("half_period", value)
}

fn parse_dealias(value: &str) -> Result<DealiasMode> {
    match value.trim() {
        "on" => Ok(DealiasMode::TwoThirds),
        "off" => Ok(DealiasMode::Off),
        other => {
            if let Some(k) = other.strip_prefix("truncate:") {
                return Ok(DealiasMode::SharpCutoff(
                    k.parse().context("dealias truncate band is not an integer")?,
                ));
            }
            bail!("unknown dealias mode '{other}' (expected on | off | truncate:<N>)");
        }
    }
}
