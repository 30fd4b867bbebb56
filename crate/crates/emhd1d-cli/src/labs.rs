//! Focused experiment backends for the `picard`, `galerkin` and `blowup`
//! subcommands.
//!
//! Each lab runs one self-contained experiment with criterion-scale
//! defaults and reports a machine-readable JSON summary; the Galerkin lab
//! optionally writes the inequality-term series as CSV and the collapse lab
//! writes a full run directory plus `collapse.csv`.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use emhd1d::dynamics::{DealiasMode, ModelParams, StepPolicy};
use emhd1d::galerkin::{galerkin_vs_pseudospectral, riccati_probe, GalerkinState};
use emhd1d::picard::picard_vs_direct;
use emhd1d::{init, Field, Grid};
use serde_json::{json, Value};

use crate::config::{InitSpec, RunConfig, SCHEMA_VERSION};
use crate::runner::execute_run;

/// Parameters of the iteration-contraction experiment.
#[derive(Debug, Clone)]
pub struct PicardArgs {
    /// Grid size.
    pub n: usize,
    /// Spectral decay of the random datum.
    pub decay: f64,
    /// Seed of the random datum.
    pub seed: u64,
    /// Interaction coefficient.
    pub a: f64,
    /// Transport coefficient.
    pub b: f64,
    /// Dissipation order.
    pub alpha: f64,
    /// Dissipation strength.
    pub mu: f64,
    /// Horizon.
    pub t_end: f64,
    /// Mesh steps.
    pub steps: usize,
    /// Number of iterates past the semigroup seed.
    pub iterates: usize,
}

/// Runs the iteration lab: datum normalised to unit critical norm, then
/// `iterates` sweeps with successive-distance and ratio diagnostics.
pub fn picard_lab(args: &PicardArgs) -> Result<Value> {
    let grid = Grid::with_default_length(args.n)?;
    let raw = init::rough_field(grid, args.decay, grid.dealias_cutoff(), args.seed)?;
    let critical = 2.5 - args.alpha;
    let norm = raw.sobolev_norm(critical);
    let b0 = raw.scaled(1.0 / norm);
    let p = ModelParams::new(args.a, args.b, args.alpha, args.mu)?;

    let (result, discrepancy) = picard_vs_direct(&b0, &p, args.t_end, args.iterates, args.steps)?;
    Ok(json!({
        "schema": SCHEMA_VERSION,
        "n": args.n,
        "init": InitSpec::Rough { decay: args.decay, seed: args.seed }.to_string(),
        "critical_exponent": critical,
        "a": p.a,
        "b": p.b,
        "alpha": p.alpha,
        "mu": p.mu,
        "t_end": args.t_end,
        "steps": args.steps,
        "iterates": args.iterates,
        "d": result.d,
        "r": result.r,
        "discrepancy": discrepancy,
    }))
}

/// Parameters of the truncated coefficient-ODE experiment.
#[derive(Debug, Clone)]
pub struct GalerkinArgs {
    /// Truncation order.
    pub n_max: i64,
    /// Dissipation order.
    pub alpha: f64,
    /// Dissipation strength.
    pub mu: f64,
    /// Horizon.
    pub t_end: f64,
    /// Fixed step.
    pub dt: f64,
    /// Weight exponent of the diagnostic functional.
    pub weight: i32,
    /// Also integrate the sharply truncated solver and report the
    /// coefficientwise discrepancy.
    pub cross_check: bool,
    /// Optional CSV destination for the fitted-term series.
    pub csv: Option<PathBuf>,
}

/// `sin x + 0.5 cos 2x`: the default two-mode datum of the ODE experiments.
fn two_mode_datum(n: usize) -> Result<Field> {
    Ok(init::from_coefficient_list(
        Grid::with_default_length(n)?,
        &[(1, 0.0, -0.5), (2, 0.25, 0.0)],
    )?)
}

/// Runs the coefficient-ODE lab on the transport model and fits the cubic
/// differential inequality of the weighted functional.
pub fn galerkin_lab(args: &GalerkinArgs) -> Result<Value> {
    let p = ModelParams::new(0.0, 1.0, args.alpha, args.mu)?;
    let carrier_n = (4 * args.n_max.max(1) as usize).next_power_of_two().max(8);
    let datum = two_mode_datum(carrier_n)?;
    let state = GalerkinState::from_field(&datum, args.n_max)?;
    let steps = ((args.t_end / args.dt).round() as usize).max(3);
    let probe = riccati_probe(&state, &p, args.t_end, steps, args.weight)?;

    if let Some(path) = &args.csv {
        let mut w = BufWriter::new(
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        );
        writeln!(w, "t,y,dydt,cubic_term,dissipative_term")?;
        for i in 0..probe.times.len() {
            writeln!(
                w,
                "{:?},{:?},{:?},{:?},{:?}",
                probe.times[i],
                probe.y[i],
                probe.dydt[i],
                probe.cubic_term[i],
                probe.dissipative_term[i]
            )?;
        }
        w.flush()?;
    }

    let cross = if args.cross_check {
        Some(galerkin_vs_pseudospectral(
            &datum, args.n_max, &p, args.t_end, steps,
        )?)
    } else {
        None
    };

    Ok(json!({
        "schema": SCHEMA_VERSION,
        "n_max": args.n_max,
        "weight": probe.weight,
        "alpha": p.alpha,
        "mu": p.mu,
        "t_end": args.t_end,
        "dt": args.dt,
        "steps": steps,
        "c1": probe.c1,
        "c2": probe.c2,
        "in_theorem_range": probe.in_theorem_range,
        "max_tail_fraction": probe.max_tail_fraction,
        "cross_check_discrepancy": cross,
        "csv": args.csv.as_ref().map(|p| p.display().to_string()),
    }))
}

/// Adds a late-written file to the run manifest's output inventory, keeping
/// the completeness invariant: every artifact in the directory is listed.
fn register_artifact(dir: &Path, name: &str) -> Result<()> {
    let manifest_path = dir.join("manifest.json");
    let mut manifest: Value = serde_json::from_str(&fs::read_to_string(&manifest_path)?)?;
    let bytes = fs::metadata(dir.join(name))?.len();
    manifest["outputs"]
        .as_array_mut()
        .context("manifest outputs is an array")?
        .push(json!({ "name": name, "bytes": bytes }));
    fs::write(
        &manifest_path,
        format!("{}\n", serde_json::to_string_pretty(&manifest)?),
    )?;
    Ok(())
}

/// Parameters of the collapse experiment.
#[derive(Debug, Clone)]
pub struct BlowupArgs {
    /// Grid size.
    pub n: usize,
    /// Dissipation order.
    pub alpha: f64,
    /// Dissipation strength (0 = the collapse regime).
    pub mu: f64,
    /// Courant constant.
    pub cfl: f64,
    /// Horizon (resolution loss usually ends the run first).
    pub t_end: f64,
}

/// Runs the collapse experiment on the odd profile into `out`: a full run
/// directory plus `collapse.csv` with the tracked singularity quantities.
/// Returns the verdict JSON and the process exit code.
pub fn blowup_lab(args: &BlowupArgs, out: &Path) -> Result<(Value, i32)> {
    let cfg = RunConfig {
        n: args.n,
        half_period: std::f64::consts::PI,
        model: "e1d3".to_string(),
        a: 0.0,
        b: 0.0,
        alpha: args.alpha,
        mu: args.mu,
        init: InitSpec::BlowupProfile,
        amplitude: 1.0,
        policy: StepPolicy::Cfl { c: args.cfl },
        dealias: DealiasMode::TwoThirds,
        t_end: args.t_end,
        stride: 1,
        sobolev: Vec::new(),
        stop_lip: None,
        stop_radius: None,
        checkpoint_stride: 0,
    };
    let outcome = execute_run(&cfg, out)?;

    if let Some(traj) = &outcome.trajectory {
        let path = out.join("collapse.csv");
        let mut w = BufWriter::new(
            fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?,
        );
        writeln!(w, "t,x,inv_x,bmax,lip,radius")?;
        for r in &traj.rows {
            write!(
                w,
                "{:?},{:?},{:?},{:?},{:?},",
                r.t,
                r.xmax,
                1.0 / r.xmax,
                r.bmax,
                r.lip
            )?;
            if let Some(radius) = r.radius {
                write!(w, "{radius:?}")?;
            }
            writeln!(w)?;
        }
        w.flush()?;
        drop(w);
        register_artifact(out, "collapse.csv")?;
    }

    let verdict_path = out.join("verdict.json");
    let verdict: Value = if verdict_path.exists() {
        serde_json::from_str(&fs::read_to_string(&verdict_path)?)?
    } else {
        json!({ "termination": outcome.termination })
    };
    Ok((verdict, outcome.exit_code))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picard_lab_reports_contraction_shape() {
        let args = PicardArgs {
            n: 64,
            decay: 2.2,
            seed: 12,
            a: 1.0,
            b: 1.0,
            alpha: 2.2,
            mu: 1.0,
            t_end: 0.02,
            steps: 40,
            iterates: 3,
        };
        let v = picard_lab(&args).unwrap();
        assert_eq!(v["d"].as_array().unwrap().len(), 3);
        assert_eq!(v["r"].as_array().unwrap().len(), 2);
        assert!(v["discrepancy"].as_f64().unwrap().is_finite());
        assert!((v["critical_exponent"].as_f64().unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn galerkin_lab_writes_series_and_fit() {
        let tmp = tempfile::tempdir().unwrap();
        let csv = tmp.path().join("terms.csv");
        let args = GalerkinArgs {
            n_max: 8,
            alpha: 1.0,
            mu: 0.0,
            t_end: 0.05,
            dt: 1e-3,
            weight: 8,
            cross_check: true,
            csv: Some(csv.clone()),
        };
        let v = galerkin_lab(&args).unwrap();
        assert!(v["c1"].as_f64().unwrap() > 0.0);
        assert!(v["in_theorem_range"].as_bool().unwrap());
        assert!(v["cross_check_discrepancy"].as_f64().unwrap() < 1e-10);
        let text = fs::read_to_string(&csv).unwrap();
        assert!(text.starts_with("t,y,dydt,cubic_term,dissipative_term"));
        assert_eq!(text.lines().count(), 52, "header + 51 samples");
    }

    #[test]
    fn blowup_lab_small_control_completes() {
        let tmp = tempfile::tempdir().unwrap();
        // Horizon matches the inviscid collapse window; past ~0.03 even the
        // dissipative run steepens beyond what n = 1024 resolves.
        let args = BlowupArgs {
            n: 1024,
            alpha: 1.5,
            mu: 1.0,
            cfl: 0.4,
            t_end: 0.01,
        };
        let (verdict, code) = blowup_lab(&args, tmp.path()).unwrap();
        assert_eq!(code, 0, "dissipative control completes");
        assert_eq!(verdict["termination"], "completed");
        let collapse = fs::read_to_string(tmp.path().join("collapse.csv")).unwrap();
        assert!(collapse.starts_with("t,x,inv_x,bmax,lip,radius"));
        assert!(tmp.path().join("manifest.json").exists());
    }
}
