//! Run execution: evolve a configuration and persist the artifact set.
//!
//! A run directory holds `series.csv` (the diagnostics schema of the
//! dynamics module), binary coefficient checkpoints, a human-readable
//! `final_state.csv`, a `verdict.json` singularity assessment, and last a
//! `manifest.json` naming every file with its size. Everything except the
//! two wall-time fields of the manifest is a pure function of the resolved
//! configuration, so repeated runs are byte-identical and a manifest can be
//! replayed by feeding it back to `run`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use emhd1d::blowup::{blowup_report, BlowupReport, Verdict};
use emhd1d::dynamics::{evolve, Termination, Trajectory};
use emhd1d::EmhdError;
use serde_json::{json, Value};

use crate::config::{RunConfig, SCHEMA_VERSION};
use crate::{EXIT_FINDING, EXIT_NAN, EXIT_OK};

/// What a run left behind.
#[derive(Debug)]
pub struct RunOutcome {
    /// Process exit code under the documented contract.
    pub exit_code: i32,
    /// Termination reason (`completed`, `blowup-threshold`,
    /// `resolution-loss`, `nan-abort`).
    pub termination: String,
    /// Largest resolved sample time, when a trajectory exists.
    pub resolved_until: Option<f64>,
    /// `max ||B_x||_inf / ||B_x(0)||_inf` over the resolved window.
    pub lip_growth_factor: Option<f64>,
    /// Verdict name from the singularity assessment.
    pub verdict: Option<String>,
    /// The trajectory itself (absent after a NaN abort).
    pub trajectory: Option<Trajectory>,
}

/// Stable name for a termination reason.
pub fn termination_name(t: Termination) -> &'static str {
    match t {
        Termination::Completed => "completed",
        Termination::BlowupThreshold => "blowup-threshold",
        Termination::ResolutionLoss => "resolution-loss",
    }
}

/// Stable name for a verdict.
pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::BlowupIndicated => "blowup-indicated",
        Verdict::NoBlowupIndicators => "no-blowup-indicators",
        Verdict::Inconclusive => "inconclusive",
    }
}

/// Loads a run configuration from a config file or, when the file is a run
/// manifest (`.json`), from its embedded resolved configuration.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    if path.extension().is_some_and(|e| e == "json") {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading manifest {}", path.display()))?;
        let value: Value = serde_json::from_str(&text)
            .with_context(|| format!("parsing manifest {}", path.display()))?;
        let config = value
            .get("config")
            .and_then(Value::as_object)
            .context("manifest has no 'config' object")?;
        let mut map = BTreeMap::new();
        for (k, v) in config {
            let s = v
                .as_str()
                .with_context(|| format!("manifest config key '{k}' is not a string"))?;
            map.insert(k.clone(), s.to_string());
        }
        return RunConfig::from_map(map)
            .with_context(|| format!("replaying manifest {}", path.display()));
    }
    RunConfig::load(path)
}

/// JSON form of the singularity assessment.
pub fn verdict_json(report: &BlowupReport, termination: &str) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "termination": termination,
        "verdict": verdict_name(report.verdict),
        "lip_growth_factor": report.lip_growth_factor,
        "x_monotone": report.x_monotone,
        "max_value_drift": report.max_drift,
        "c_fit": report.c_fit,
        "t_star_riccati": report.t_star_riccati,
        "t_star_lip": report.t_star_lip,
        "resolved_until": report.resolved_until,
    })
}

fn unix_seconds() -> f64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Tracks written artifacts for the manifest inventory.
struct Artifacts {
    dir: PathBuf,
    inventory: Vec<(String, u64)>,
}

impl Artifacts {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            inventory: Vec::new(),
        })
    }

    fn write_with<F>(&mut self, name: &str, f: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>,
    {
        let path = self.dir.join(name);
        let mut w = BufWriter::new(
            fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?,
        );
        f(&mut w).with_context(|| format!("writing {}", path.display()))?;
        w.flush()?;
        let bytes = fs::metadata(&path)?.len();
        self.inventory.push((name.to_string(), bytes));
        Ok(())
    }

    fn write_json(&mut self, name: &str, value: &Value) -> Result<()> {
        self.write_with(name, |w| {
            writeln!(w, "{}", serde_json::to_string_pretty(value).expect("valid JSON"))
        })
    }

    fn inventory_json(&self) -> Value {
        Value::Array(
            self.inventory
                .iter()
                .map(|(name, bytes)| json!({ "name": name, "bytes": bytes }))
                .collect(),
        )
    }
}

fn config_json(cfg: &RunConfig) -> Value {
    Value::Object(
        cfg.resolved_map()
            .into_iter()
            .map(|(k, v)| (k, Value::String(v)))
            .collect(),
    )
}

fn write_trajectory(arts: &mut Artifacts, traj: &Trajectory) -> Result<()> {
    arts.write_with("series.csv", |w| traj.write_series_csv(w))?;
    for (i, (_, field)) in traj.checkpoints.iter().enumerate() {
        arts.write_with(&format!("checkpoint_{i:04}.bin"), |w| {
            field.write_coeffs_binary(w)
        })?;
    }
    arts.write_with("final_state.csv", |w| traj.final_field().write_samples_csv(w))?;
    Ok(())
}

/// Executes a resolved configuration into `out_dir`.
///
/// Exit code 0 means the horizon was reached; the blow-up / resolution-loss
/// stop is a scientific finding with its own code, and a NaN abort a numeric
/// failure. Config errors surface as `Err` for the caller's usage code.
pub fn execute_run(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    let b0 = cfg.initial_field()?;
    let params = cfg.model_params()?;
    let solver = cfg.solver_config();

    let mut arts = Artifacts::new(out_dir)?;
    let started = unix_seconds();

    let mut manifest = serde_json::Map::new();
    manifest.insert("schema".into(), json!(SCHEMA_VERSION));
    manifest.insert("code_version".into(), json!(env!("CARGO_PKG_VERSION")));
    manifest.insert("config".into(), config_json(cfg));
    manifest.insert(
        "model".into(),
        json!({ "a": params.a, "b": params.b, "alpha": params.alpha, "mu": params.mu }),
    );
    manifest.insert("seed".into(), json!(cfg.seed()));
    manifest.insert("started_unix".into(), json!(started));

    let outcome = match evolve(&b0, &params, &solver) {
        Ok(traj) => {
            write_trajectory(&mut arts, &traj)?;
            let report = blowup_report(&traj);
            let termination = termination_name(traj.termination);
            arts.write_json("verdict.json", &verdict_json(&report, termination))?;
            manifest.insert("termination".into(), json!(termination));
            manifest.insert("resolved_until".into(), json!(traj.resolved_until));
            manifest.insert("final_time".into(), json!(traj.final_time()));
            manifest.insert("rows".into(), json!(traj.rows.len()));
            RunOutcome {
                exit_code: if traj.termination == Termination::Completed {
                    EXIT_OK
                } else {
                    EXIT_FINDING
                },
                termination: termination.to_string(),
                resolved_until: Some(traj.resolved_until),
                lip_growth_factor: Some(report.lip_growth_factor),
                verdict: Some(verdict_name(report.verdict).to_string()),
                trajectory: Some(traj),
            }
        }
        Err(EmhdError::NonFinite { t }) => {
            manifest.insert("termination".into(), json!("nan-abort"));
            manifest.insert("nan_time".into(), json!(t));
            RunOutcome {
                exit_code: EXIT_NAN,
                termination: "nan-abort".to_string(),
                resolved_until: None,
                lip_growth_factor: None,
                verdict: None,
                trajectory: None,
            }
        }
        Err(other) => return Err(other.into()),
    };

    manifest.insert("finished_unix".into(), json!(unix_seconds()));
    manifest.insert("outputs".into(), arts.inventory_json());
    arts.write_json("manifest.json", &Value::Object(manifest))?;
    Ok(outcome)
}
