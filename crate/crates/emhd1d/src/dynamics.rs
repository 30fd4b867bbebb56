//! Time integration of the model family and its runtime diagnostics.
//!
//! The evolution equation is
//!
//! ```text
//!     B_t = -a B J_x - b J B_x - mu Lambda^alpha B,      J = -Lambda B.
//! ```
//!
//! The stiff dissipative part is handled exactly: one step of length `dt`
//! applies the integrating-factor Runge-Kutta scheme
//!
//! ```text
//!     D  = exp(-mu Lambda^alpha dt/2),          D2 = D^2,
//!     k1 = N(u)
//!     k2 = N(D (u + dt/2 k1))
//!     k3 = N(D u + dt/2 k2)
//!     k4 = N(D2 u + dt D k3)
//!     u' = D2 u + dt/6 (D2 k1 + 2 D (k2 + k3) + k4),
//! ```
//!
//! where `N` is the quadratic transport part. Purely linear problems
//! (`a = b = 0`) are therefore advanced exactly to rounding, and `dt` is
//! limited only by transport: the CFL policy uses `dt = c dx / max(||J||_inf,
//! eps)` since `J` is the effective transport velocity.
//!
//! Every evolution records a [`Trajectory`]: scalar diagnostics on a stride
//! (norms, Lipschitz seminorm, argmax tracking, analyticity radius) plus
//! optional field checkpoints. A trajectory is flagged unresolved from the
//! first sample where the measured analyticity radius falls below `2 dx` or
//! the tail-energy fraction of the retained band exceeds `1e-6`; evolution
//! stops there — continuing past resolution loss would report mesh artifacts
//! as physics, so it is deliberately unsupported.

use num_complex::Complex64;

use crate::blowup::{analyticity_radius, tail_energy_fraction};
use crate::spectral::{derivative, lambda_alpha, pointwise_product, truncate, truncated_product};
use crate::{EmhdError, Field, Grid, Result};

/// Coefficients selecting a member of the model family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Coefficient of the `B J_x` interaction term.
    pub a: f64,
    /// Coefficient of the `J B_x` transport term.
    pub b: f64,
    /// Dissipation order in `Lambda^alpha`, in `[0, 4]`.
    pub alpha: f64,
    /// Dissipation strength, `>= 0`.
    pub mu: f64,
}

impl ModelParams {
    /// Validated constructor.
    pub fn new(a: f64, b: f64, alpha: f64, mu: f64) -> Result<Self> {
        if !(0.0..=4.0).contains(&alpha) {
            return Err(EmhdError::InvalidParameter(format!(
                "alpha = {alpha} outside [0, 4]"
            )));
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(EmhdError::InvalidParameter(format!("mu = {mu} must be >= 0")));
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(EmhdError::InvalidParameter(format!(
                "coefficients a = {a}, b = {b} must be finite"
            )));
        }
        Ok(Self { a, b, alpha, mu })
    }

    /// Named preset: `full` takes both coefficients as given; `e1d2`, `e1d3`
    /// and `e1d4` fix `(a, b)` to `(1, 0)`, `(0, 1)` and `(0, -1)`.
    pub fn preset(name: &str, a: f64, b: f64, alpha: f64, mu: f64) -> Result<Self> {
        match name {
            "full" => Self::new(a, b, alpha, mu),
            "e1d2" => Self::new(1.0, 0.0, alpha, mu),
            "e1d3" => Self::new(0.0, 1.0, alpha, mu),
            "e1d4" => Self::new(0.0, -1.0, alpha, mu),
            other => Err(EmhdError::InvalidParameter(format!(
                "unknown preset '{other}' (expected full|e1d2|e1d3|e1d4)"
            ))),
        }
    }
}

/// Step-size policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepPolicy {
    /// Constant step.
    Fixed(f64),
    /// Transport CFL: `dt = c dx / max(||J||_inf, 1e-12)`.
    Cfl {
        /// Courant constant, in `(0, 1]`.
        c: f64,
    },
}

/// How quadratic products control their band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DealiasMode {
    /// Standard rule: truncate factors and result to `|k| <= floor(n/3)`.
    TwoThirds,
    /// No band control (aliased); exists for fault-injection tests.
    Off,
    /// Sharp spectral truncation to `|k| <= N`: with `n >= 4N` this makes the
    /// solver exactly the `N`-mode Galerkin system.
    SharpCutoff(i64),
}

/// Evolution configuration.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Step-size policy.
    pub policy: StepPolicy,
    /// Product band control.
    pub dealias: DealiasMode,
    /// Record diagnostics every this many steps (>= 1).
    pub stride: usize,
    /// Final time.
    pub t_end: f64,
    /// Additional Sobolev exponents recorded per diagnostics row.
    pub sobolev: Vec<f64>,
    /// Stop once `||B_x||_inf` reaches this value (a blow-up finding).
    pub stop_lip: Option<f64>,
    /// Stop once the measured analyticity radius falls to this value.
    pub stop_radius: Option<f64>,
    /// Checkpoint every this many steps (0 = initial and final only).
    pub checkpoint_stride: usize,
}

impl SolverConfig {
    /// Plain fixed-step configuration with defaults elsewhere.
    pub fn fixed(dt: f64, t_end: f64) -> Self {
        Self {
            policy: StepPolicy::Fixed(dt),
            dealias: DealiasMode::TwoThirds,
            stride: 1,
            t_end,
            sobolev: Vec::new(),
            stop_lip: None,
            stop_radius: None,
            checkpoint_stride: 0,
        }
    }

    /// CFL configuration with the default Courant constant 0.4.
    pub fn cfl(t_end: f64) -> Self {
        Self {
            policy: StepPolicy::Cfl { c: 0.4 },
            ..Self::fixed(1.0, t_end)
        }
    }

    fn validate(&self) -> Result<()> {
        match self.policy {
            StepPolicy::Fixed(dt) if !(dt > 0.0 && dt.is_finite()) => Err(
                EmhdError::InvalidParameter(format!("fixed dt = {dt} must be positive")),
            ),
            StepPolicy::Cfl { c } if !(c > 0.0 && c <= 1.0) => Err(EmhdError::InvalidParameter(
                format!("CFL constant c = {c} outside (0, 1]"),
            )),
            _ if self.stride == 0 => Err(EmhdError::InvalidParameter(
                "diagnostics stride must be >= 1".into(),
            )),
            _ if !(self.t_end >= 0.0) => Err(EmhdError::InvalidParameter(format!(
                "t_end = {} must be >= 0",
                self.t_end
            ))),
            _ => Ok(()),
        }
    }
}

/// One diagnostics sample.
#[derive(Debug, Clone)]
pub struct DiagRow {
    /// Sample time.
    pub t: f64,
    /// Mean value (conserved by the dynamics).
    pub mean: f64,
    /// `L^1` norm.
    pub l1: f64,
    /// `L^2` norm.
    pub l2: f64,
    /// `L^infty` norm.
    pub linf: f64,
    /// Lipschitz seminorm `||B_x||_inf`.
    pub lip: f64,
    /// Requested Sobolev norms, in the order of `SolverConfig::sobolev`.
    pub hs: Vec<f64>,
    /// Parabolically refined argmax location of `B`.
    pub xmax: f64,
    /// Parabolically refined maximum value of `B`.
    pub bmax: f64,
    /// Fitted analyticity radius (`None` when the spectrum supports no fit).
    pub radius: Option<f64>,
    /// Top-octave energy fraction of the retained band.
    pub tail: f64,
    /// False from the first sample that fails the resolution criteria.
    pub resolved: bool,
}

/// Why an evolution ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Reached `t_end`.
    Completed,
    /// A configured blow-up threshold fired.
    BlowupThreshold,
    /// The resolution criteria failed; diagnostics past `resolved_until` are
    /// untrusted and evolution does not continue.
    ResolutionLoss,
}

/// Output of [`evolve`]: diagnostics series plus checkpointed fields.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Diagnostics rows at strictly increasing times.
    pub rows: Vec<DiagRow>,
    /// `(t, field)` checkpoints; always contains the final state last.
    pub checkpoints: Vec<(f64, Field)>,
    /// Why the run ended.
    pub termination: Termination,
    /// Sobolev exponents matching `DiagRow::hs` columns.
    pub sobolev: Vec<f64>,
    /// Largest sample time with all resolution criteria satisfied.
    pub resolved_until: f64,
}

impl Trajectory {
    /// Final field state.
    pub fn final_field(&self) -> &Field {
        &self.checkpoints.last().expect("always checkpointed").1
    }

    /// Final sample time.
    pub fn final_time(&self) -> f64 {
        self.rows.last().expect("always sampled").t
    }

    /// Writes the diagnostics series as CSV with header
    /// `t,mean,l1,l2,linf,lip,hs_<s>...,xmax,bmax,radius,resolved`.
    /// The radius cell is empty when no fit was possible.
    pub fn write_series_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        write!(w, "t,mean,l1,l2,linf,lip")?;
        for s in &self.sobolev {
            write!(w, ",hs_{s}")?;
        }
        writeln!(w, ",xmax,bmax,radius,resolved")?;
        for r in &self.rows {
            write!(
                w,
                "{:?},{:?},{:?},{:?},{:?},{:?}",
                r.t, r.mean, r.l1, r.l2, r.linf, r.lip
            )?;
            for h in &r.hs {
                write!(w, ",{h:?}")?;
            }
            write!(w, ",{:?},{:?},", r.xmax, r.bmax)?;
            if let Some(radius) = r.radius {
                write!(w, "{radius:?}")?;
            }
            writeln!(w, ",{}", if r.resolved { 1 } else { 0 })?;
        }
        Ok(())
    }
}

/// Induced current `J = -Lambda B` via the multiplier.
///
/// Unlike [`crate::spectral::current`] this does not reject a nonzero mean:
/// the multiplier annihilates constants, so `J` depends only on the
/// oscillatory part, and sign-definite data (used by the `L^1` conservation
/// law) carries its mean harmlessly through the evolution.
fn induced_current(b: &Field) -> Field {
    let grid = b.grid();
    let coeffs = b
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            if grid.k_int(j) == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                c * (-grid.kappa(j).abs())
            }
        })
        .collect();
    Field::from_coeffs_unchecked(grid, coeffs)
}

fn banded_product(f: &Field, g: &Field, mode: DealiasMode) -> Result<Field> {
    match mode {
        DealiasMode::TwoThirds => truncated_product(f, g, f.grid().dealias_cutoff()),
        DealiasMode::Off => pointwise_product(f, g),
        DealiasMode::SharpCutoff(kmax) => truncated_product(f, g, kmax),
    }
}

/// Quadratic part `N(B) = -a B J_x - b J B_x` under the configured band rule.
pub fn nonlinear_rhs(b: &Field, p: &ModelParams, mode: DealiasMode) -> Result<Field> {
    let j = induced_current(b);
    let mut out = Field::zeros(b.grid());
    if p.a != 0.0 {
        let jx = derivative(&j);
        out.axpy(-p.a, &banded_product(b, &jx, mode)?)?;
    }
    if p.b != 0.0 {
        let bx = derivative(b);
        out.axpy(-p.b, &banded_product(&j, &bx, mode)?)?;
    }
    Ok(out)
}

/// Full right-hand side `-a B J_x - b J B_x - mu Lambda^alpha B`.
pub fn rhs(b: &Field, p: &ModelParams, mode: DealiasMode) -> Result<Field> {
    let mut out = nonlinear_rhs(b, p, mode)?;
    if p.mu > 0.0 {
        out.axpy(-p.mu, &lambda_alpha(b, p.alpha)?)?;
    }
    Ok(out)
}

/// Half-step dissipation factors `exp(-mu |kappa|^alpha dt/2)` per bin.
fn half_factors(grid: Grid, p: &ModelParams, dt: f64) -> Vec<f64> {
    (0..grid.n())
        .map(|j| {
            if grid.k_int(j) == 0 {
                if p.alpha == 0.0 {
                    (-p.mu * dt / 2.0).exp()
                } else {
                    1.0
                }
            } else {
                (-p.mu * dt / 2.0 * grid.kappa(j).abs().powf(p.alpha)).exp()
            }
        })
        .collect()
}

fn apply_factors(f: &Field, factors: &[f64], square: bool) -> Field {
    let coeffs = f
        .coeffs()
        .iter()
        .zip(factors)
        .map(|(&c, &d)| if square { c * (d * d) } else { c * d })
        .collect();
    Field::from_coeffs_unchecked(f.grid(), coeffs)
}

/// One integrating-factor RK4 step of length `dt`.
pub fn step(u: &Field, p: &ModelParams, dt: f64, mode: DealiasMode) -> Result<Field> {
    let d = half_factors(u.grid(), p, dt);
    let n = |f: &Field| nonlinear_rhs(f, p, mode);

    let k1 = n(u)?;
    let mut u1 = u.clone();
    u1.axpy(dt / 2.0, &k1)?;
    let k2 = n(&apply_factors(&u1, &d, false))?;

    let du = apply_factors(u, &d, false);
    let mut u2 = du.clone();
    u2.axpy(dt / 2.0, &k2)?;
    let k3 = n(&u2)?;

    let mut u3 = apply_factors(u, &d, true);
    u3.axpy(dt, &apply_factors(&k3, &d, false))?;
    let k4 = n(&u3)?;

    let mut out = apply_factors(u, &d, true);
    out.axpy(dt / 6.0, &apply_factors(&k1, &d, true))?;
    let mut mid = k2;
    mid.axpy(1.0, &k3)?;
    out.axpy(dt / 3.0, &apply_factors(&mid, &d, false))?;
    out.axpy(dt / 6.0, &k4)?;
    Ok(out)
}

fn diag_row(u: &Field, t: f64, cfg: &SolverConfig, was_resolved: bool) -> DiagRow {
    let grid = u.grid();
    let samples = u.samples();
    let n = grid.n();
    let (mut jmax, mut vmax) = (0usize, f64::NEG_INFINITY);
    let mut linf = 0.0_f64;
    let mut l1 = 0.0;
    for (j, &v) in samples.iter().enumerate() {
        if v > vmax {
            vmax = v;
            jmax = j;
        }
        linf = linf.max(v.abs());
        l1 += v.abs();
    }
    l1 *= grid.dx();
    let (offset, peak) = crate::fit::parabolic_peak(
        samples[(jmax + n - 1) % n],
        samples[jmax],
        samples[(jmax + 1) % n],
        grid.dx(),
    );
    let fit = analyticity_radius(u);
    let tail = tail_energy_fraction(u);
    let resolved = was_resolved
        && tail <= 1e-6
        && fit.radius.map_or(true, |r| r >= 2.0 * grid.dx());
    DiagRow {
        t,
        mean: u.mean(),
        l1,
        l2: u.l2_norm(),
        linf,
        lip: derivative(u).linf_norm(),
        hs: cfg.sobolev.iter().map(|&s| u.sobolev_norm(s)).collect(),
        xmax: grid.x(jmax) + offset,
        bmax: peak,
        radius: fit.radius,
        tail,
        resolved,
    }
}

/// Evolves `b0` under `p` until `t_end` or a stop condition.
///
/// Deterministic for a given configuration. Resolution loss and blow-up
/// thresholds end the run with the corresponding [`Termination`] (reported,
/// not an error); a non-finite state aborts with [`EmhdError::NonFinite`].
pub fn evolve(b0: &Field, p: &ModelParams, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let grid = b0.grid();
    let mut u = b0.clone();
    let mut t = 0.0_f64;
    let mut step_idx = 0usize;

    let first = diag_row(&u, t, cfg, true);
    let mut resolved_until = if first.resolved { 0.0 } else { f64::NAN };
    let mut still_resolved = first.resolved;
    let mut rows = vec![first];
    let mut checkpoints = vec![(0.0, u.clone())];
    let mut termination = Termination::Completed;

    if !still_resolved {
        termination = Termination::ResolutionLoss;
    } else {
        while t < cfg.t_end * (1.0 - 1e-12) {
            let mut dt = match cfg.policy {
                StepPolicy::Fixed(dt) => dt,
                StepPolicy::Cfl { c } => {
                    let speed = induced_current(&u).linf_norm();
                    c * grid.dx() / speed.max(1e-12)
                }
            };
            if t + dt >= cfg.t_end {
                dt = cfg.t_end - t;
            }
            u = step(&u, p, dt, cfg.dealias)?;
            t += dt;
            step_idx += 1;
            if !u.is_finite() {
                return Err(EmhdError::NonFinite { t });
            }
            if cfg.checkpoint_stride > 0 && step_idx % cfg.checkpoint_stride == 0 {
                checkpoints.push((t, u.clone()));
            }
            let at_end = t >= cfg.t_end * (1.0 - 1e-12);
            if step_idx % cfg.stride == 0 || at_end {
                let row = diag_row(&u, t, cfg, still_resolved);
                if row.resolved {
                    resolved_until = t;
                } else if still_resolved {
                    still_resolved = false;
                    termination = Termination::ResolutionLoss;
                }
                let lip_stop = cfg.stop_lip.is_some_and(|thresh| row.lip >= thresh);
                let radius_stop = cfg
                    .stop_radius
                    .is_some_and(|thresh| row.radius.is_some_and(|r| r <= thresh));
                rows.push(row);
                if termination == Termination::ResolutionLoss {
                    break;
                }
                if lip_stop || radius_stop {
                    termination = Termination::BlowupThreshold;
                    break;
                }
            }
        }
    }

    if checkpoints.last().map(|(tc, _)| *tc) != Some(t) {
        checkpoints.push((t, u.clone()));
    }
    Ok(Trajectory {
        rows,
        checkpoints,
        termination,
        sobolev: cfg.sobolev.clone(),
        resolved_until,
    })
}

/// Spectral stretch: maps mode `k` to mode `lambda k` and scales amplitudes,
/// realising `amplitude * f(lambda x)` exactly for integer `lambda`.
pub fn stretch_field(f: &Field, lambda: i64, amplitude: f64) -> Result<Field> {
    if lambda < 1 {
        return Err(EmhdError::InvalidParameter(format!(
            "stretch factor {lambda} must be a positive integer"
        )));
    }
    if lambda == 1 && amplitude == 1.0 {
        return Ok(f.clone());
    }
    let grid = f.grid();
    let half = grid.n() as i64 / 2;
    // Bandwidth above the rounding floor: bins the transform leaves at
    // ~1e-17 relative are noise, not content to be relocated.
    let peak = (1..half)
        .map(|k| f.coefficient(k).norm())
        .fold(0.0, f64::max);
    let band = (1..half)
        .filter(|&k| f.coefficient(k).norm() > 1e-13 * peak)
        .max()
        .unwrap_or(0);
    if lambda * band >= half {
        return Err(EmhdError::InvalidParameter(format!(
            "stretch by {lambda} pushes bandwidth {band} past Nyquist {half}"
        )));
    }
    let mut out = Field::zeros(grid);
    out.set_coefficient(0, f.coefficient(0) * amplitude);
    for k in 1..=band {
        out.set_coefficient(lambda * k, f.coefficient(k) * amplitude);
    }
    Ok(out)
}

/// Two-run check of the rescaling law: if `B` solves the equation then so
/// does `lambda^{alpha-2} B(lambda x, lambda^alpha t)`.
///
/// Runs `b0` to time `lambda^alpha * t_end` and the stretched datum to
/// `t_end`, both with `steps` fixed steps (the step ratio matches the time
/// rescaling, so discretisation errors map onto each other and the
/// discrepancy isolates covariance violations). Returns the sup-norm
/// discrepancy at matched times.
pub fn scaling_covariance_check(
    b0: &Field,
    p: &ModelParams,
    lambda: i64,
    t_end: f64,
    steps: usize,
    mode: DealiasMode,
) -> Result<f64> {
    if steps == 0 || t_end <= 0.0 {
        return Err(EmhdError::InvalidParameter(
            "scaling check needs steps >= 1 and t_end > 0".into(),
        ));
    }
    let factor = (lambda as f64).powf(p.alpha - 2.0);
    let time_scale = (lambda as f64).powf(p.alpha);

    let mut reference = b0.clone();
    let dt_ref = time_scale * t_end / steps as f64;
    for _ in 0..steps {
        reference = step(&reference, p, dt_ref, mode)?;
    }

    let mut rescaled = stretch_field(b0, lambda, factor)?;
    let dt = t_end / steps as f64;
    for _ in 0..steps {
        rescaled = step(&rescaled, p, dt, mode)?;
    }

    if !(reference.is_finite() && rescaled.is_finite()) {
        return Err(EmhdError::NonFinite { t: t_end });
    }
    let mapped = stretch_field(&reference, lambda, factor)?;
    Ok(rescaled.difference(&mapped)?.linf_norm())
}

/// Result table of the dissipative smoothing probe.
#[derive(Debug, Clone)]
pub struct SmoothingReport {
    /// Probed regularity offsets.
    pub betas: Vec<f64>,
    /// Sample times (logarithmically spaced).
    pub times: Vec<f64>,
    /// `weighted[i][j] = t_j^{beta_i/alpha} ||B(t_j)||_{H^{5/2 - alpha + beta_i}}`.
    pub weighted: Vec<Vec<f64>>,
    /// Per-beta suprema of the weighted values.
    pub suprema: Vec<f64>,
}

impl SmoothingReport {
    /// True when the first three weighted samples decrease monotonically —
    /// the sampled version of the weighted norm vanishing as `t -> 0`.
    pub fn head_decreasing(&self, beta_index: usize) -> bool {
        let w = &self.weighted[beta_index];
        w.len() >= 3 && w[0] > w[1] && w[1] > w[2]
    }
}

/// Measures `sup_{t <= t_end} t^{beta/alpha} ||B(t)||_{H^{5/2 - alpha + beta}}`
/// on a logarithmic time grid from `t_min` to `t_end`.
///
/// Integration proceeds segment by segment with a fixed target step so every
/// sample lands on an exact segment boundary.
pub fn smoothing_rate_probe(
    b0: &Field,
    p: &ModelParams,
    betas: &[f64],
    t_min: f64,
    t_end: f64,
    samples: usize,
    dt_target: f64,
) -> Result<SmoothingReport> {
    if !(t_min > 0.0 && t_end > t_min && samples >= 2 && dt_target > 0.0) {
        return Err(EmhdError::InvalidParameter(
            "smoothing probe needs 0 < t_min < t_end, samples >= 2, dt_target > 0".into(),
        ));
    }
    let times: Vec<f64> = (0..samples)
        .map(|i| t_min * (t_end / t_min).powf(i as f64 / (samples - 1) as f64))
        .collect();
    let mut u = b0.clone();
    let mut t = 0.0;
    let mut weighted = vec![Vec::with_capacity(samples); betas.len()];
    for &target in &times {
        let span = target - t;
        let substeps = (span / dt_target).ceil().max(1.0) as usize;
        let dt = span / substeps as f64;
        for _ in 0..substeps {
            u = step(&u, p, dt, DealiasMode::TwoThirds)?;
        }
        t = target;
        if !u.is_finite() {
            return Err(EmhdError::NonFinite { t });
        }
        for (i, &beta) in betas.iter().enumerate() {
            let s = 2.5 - p.alpha + beta;
            weighted[i].push(t.powf(beta / p.alpha) * u.sobolev_norm(s));
        }
    }
    let suprema = weighted
        .iter()
        .map(|w| w.iter().fold(0.0_f64, |m, &v| m.max(v)))
        .collect();
    Ok(SmoothingReport {
        betas: betas.to_vec(),
        times,
        weighted,
        suprema,
    })
}

/// Evolves under both the sharp `N`-mode truncation and nothing else changed,
/// using `steps` fixed steps; returns the largest coefficient discrepancy
/// against the supplied reference coefficients (indexed `k + N`).
///
/// Used by the spectral-Galerkin cross-check: with `n >= 4N` the truncated
/// pseudo-spectral product is exactly the Galerkin convolution.
pub fn truncated_final_state(
    b0: &Field,
    p: &ModelParams,
    cutoff: i64,
    dt: f64,
    steps: usize,
) -> Result<Field> {
    let mut u = truncate(b0, cutoff);
    for _ in 0..steps {
        u = step(&u, p, dt, DealiasMode::SharpCutoff(cutoff))?;
        if !u.is_finite() {
            return Err(EmhdError::NonFinite {
                t: dt * steps as f64,
            });
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::convolution_oracle;
    use crate::{init, Grid};

    fn grid(n: usize) -> Grid {
        Grid::with_default_length(n).unwrap()
    }

    fn params(a: f64, b: f64, alpha: f64, mu: f64) -> ModelParams {
        ModelParams::new(a, b, alpha, mu).unwrap()
    }

    #[test]
    fn rhs_closed_form_transport() {
        // B = cos x, (a,b) = (0,1), mu = 0: J = -cos x, B_x = -sin x,
        // rhs = -J B_x = -(1/2) sin 2x.
        let g = grid(64);
        let b = Field::from_fn(g, |x| x.cos());
        let r = rhs(&b, &params(0.0, 1.0, 1.0, 0.0), DealiasMode::TwoThirds).unwrap();
        let expect = Field::from_fn(g, |x| -0.5 * (2.0 * x).sin());
        let err = r.difference(&expect).unwrap().linf_norm();
        assert!(err < 1e-14, "transport closed form error {err}");
    }

    #[test]
    fn rhs_closed_form_stretching() {
        // B = cos x, (a,b) = (1,0), mu = 0: J_x = sin x, rhs = -B J_x.
        let g = grid(64);
        let b = Field::from_fn(g, |x| x.cos());
        let r = rhs(&b, &params(1.0, 0.0, 1.0, 0.0), DealiasMode::TwoThirds).unwrap();
        let expect = Field::from_fn(g, |x| -0.5 * (2.0 * x).sin());
        let err = r.difference(&expect).unwrap().linf_norm();
        assert!(err < 1e-13, "stretching closed form error {err}");
    }

    #[test]
    fn rhs_linear_case_is_eigen_decay() {
        let g = grid(64);
        let b = init::rough_field(g, 1.5, 20, 3).unwrap();
        let r = rhs(&b, &params(0.0, 0.0, 1.3, 0.7), DealiasMode::TwoThirds).unwrap();
        for k in 1..=20 {
            let expect = b.coefficient(k) * (-0.7 * (k as f64).powf(1.3));
            let got = r.coefficient(k);
            assert!((got - expect).norm() < 1e-14, "k = {k}");
        }
    }

    #[test]
    fn rhs_matches_convolution_oracle() {
        // Assemble a B J_x + b J B_x in coefficient space by brute force.
        let g = grid(64);
        let b = init::rough_field(g, 1.0, 20, 17).unwrap();
        let p = params(1.3, -0.8, 1.0, 0.0);
        let fast = rhs(&b, &p, DealiasMode::TwoThirds).unwrap();

        let cutoff = g.dealias_cutoff();
        let bt = truncate(&b, cutoff);
        let jt = induced_current(&bt);
        let jx = derivative(&jt);
        let bx = derivative(&bt);
        let c1 = convolution_oracle(&bt, &jx).unwrap();
        let c2 = convolution_oracle(&jt, &bx).unwrap();
        let mut worst = 0.0_f64;
        for j in 0..g.n() {
            if g.k_int(j).abs() > cutoff {
                continue;
            }
            let expect = -p.a * c1[j] - p.b * c2[j];
            worst = worst.max((fast.coeffs()[j] - expect).norm());
        }
        assert!(worst < 1e-12, "oracle mismatch {worst}");
    }

    #[test]
    fn rhs_mean_is_zero() {
        let g = grid(128);
        let b = init::rough_field(g, 1.0, 40, 23).unwrap();
        for &(a, bb) in &[(1.0, 0.0), (0.0, 1.0), (2.0, -3.0)] {
            let r = rhs(&b, &params(a, bb, 1.5, 1.0), DealiasMode::TwoThirds).unwrap();
            let mean = r.mean().abs();
            assert!(mean < 1e-13, "(a,b) = ({a},{bb}): mean {mean:.3e}");
        }
    }

    #[test]
    fn linear_step_is_exact_semigroup() {
        let g = grid(64);
        let b = Field::from_fn(g, |x| x.cos());
        let p = params(0.0, 0.0, 1.5, 1.0);
        let mut u = b.clone();
        for _ in 0..5 {
            u = step(&u, &p, 0.1, DealiasMode::TwoThirds).unwrap();
        }
        let expect = (-0.5_f64).exp();
        let got = u.coefficient(1).re * 2.0;
        assert!(
            (got - expect).abs() < 1e-15,
            "amplitude {got} vs {expect}"
        );
    }

    #[test]
    fn zero_field_stays_zero() {
        let g = grid(32);
        let z = Field::zeros(g);
        let p = params(1.0, 1.0, 2.0, 1.0);
        let u = step(&z, &p, 0.05, DealiasMode::TwoThirds).unwrap();
        assert_eq!(u.l2_norm(), 0.0);
    }

    #[test]
    fn integrator_is_fourth_order() {
        let g = grid(128);
        let b0 = Field::from_fn(g, |x| x.cos() + 0.5 * (2.0 * x).sin());
        let p = params(0.0, 1.0, 0.0, 0.0);
        let run = |steps: usize| {
            let dt = 0.1 / steps as f64;
            let mut u = b0.clone();
            for _ in 0..steps {
                u = step(&u, &p, dt, DealiasMode::TwoThirds).unwrap();
            }
            u
        };
        let coarse = run(25);
        let medium = run(50);
        let fine = run(100);
        let e1 = coarse.difference(&fine).unwrap().l2_norm();
        let e2 = medium.difference(&fine).unwrap().l2_norm();
        // Richardson against the fine run: ratio (16 e2) approximates e1 for
        // a 4th-order scheme; accept [12, 20].
        let ratio = e1 / e2;
        assert!(
            (12.0..20.0).contains(&ratio),
            "self-convergence ratio {ratio}"
        );
    }

    #[test]
    fn evolve_records_monotone_times_and_conserves_mean() {
        // Resolution matters: with a != 0 the J_x spectrum is two powers
        // flatter than B, so the data must be steep enough that the
        // dissipative equilibrium tail stays below the pile-up threshold.
        let g = grid(256);
        let b0 = init::rough_field(g, 3.5, 8, 7).unwrap().scaled(0.1);
        let p = params(1.0, 1.0, 1.5, 1.0);
        let mut cfg = SolverConfig::cfl(0.3);
        cfg.stride = 5;
        cfg.sobolev = vec![0.5];
        let traj = evolve(&b0, &p, &cfg).unwrap();
        assert_eq!(traj.termination, Termination::Completed);
        assert!((traj.final_time() - 0.3).abs() < 1e-12);
        for pair in traj.rows.windows(2) {
            assert!(pair[1].t > pair[0].t);
        }
        for row in &traj.rows {
            assert!(row.mean.abs() < 1e-12, "t = {}: mean {}", row.t, row.mean);
            assert!(row.resolved);
        }
    }

    #[test]
    fn evolve_is_deterministic() {
        let g = grid(64);
        let b0 = init::rough_field(g, 1.5, 15, 99).unwrap().scaled(0.3);
        let p = params(0.0, 1.0, 1.2, 0.5);
        let cfg = SolverConfig::cfl(0.2);
        let t1 = evolve(&b0, &p, &cfg).unwrap();
        let t2 = evolve(&b0, &p, &cfg).unwrap();
        assert_eq!(t1.final_field(), t2.final_field());
        assert_eq!(t1.rows.len(), t2.rows.len());
    }

    #[test]
    fn odd_symmetry_is_preserved() {
        let g = grid(256);
        let b0 = Field::from_fn(g, |x| x.sin() + 0.3 * (3.0 * x).sin());
        let p = params(0.0, 1.0, 1.5, 0.5);
        let cfg = SolverConfig::cfl(0.2);
        let traj = evolve(&b0, &p, &cfg).unwrap();
        let samples = traj.final_field().samples();
        let n = g.n();
        let mut asym = 0.0_f64;
        for j in 1..n {
            asym = asym.max((samples[j] + samples[n - j]).abs());
        }
        assert!(asym < 1e-10, "odd-symmetry defect {asym}");
    }

    #[test]
    fn mirror_coefficient_flip_negates_trajectory() {
        // -B0 evolved under (a,b) = (0,-1) is exactly the negation of B0
        // evolved under (0,1): every arithmetic operation commutes with the
        // sign flip bitwise.
        let g = grid(128);
        let b0 = init::rough_field(g, 1.5, 20, 5).unwrap();
        let cfg = SolverConfig::cfl(0.05);
        let plus = evolve(&b0, &params(0.0, 1.0, 0.0, 0.0), &cfg).unwrap();
        let minus = evolve(&b0.scaled(-1.0), &params(0.0, -1.0, 0.0, 0.0), &cfg).unwrap();
        let diff = plus
            .final_field()
            .difference(&minus.final_field().scaled(-1.0))
            .unwrap()
            .linf_norm();
        assert_eq!(diff, 0.0, "mirror trajectories diverged");
    }

    #[test]
    fn scaling_identity_and_linear_cases() {
        let g = grid(256);
        let b0 = Field::from_fn(g, |x| x.sin());
        let p = params(1.0, 1.0, 2.2, 1.0);
        // lambda = 1 is the identity comparison: bitwise zero.
        let d1 = scaling_covariance_check(&b0, &p, 1, 0.1, 50, DealiasMode::TwoThirds).unwrap();
        assert_eq!(d1, 0.0);
        // Linear case: exact semigroup scaling for any lambda, rounding only.
        let lin = params(0.0, 0.0, 2.2, 1.0);
        let d2 = scaling_covariance_check(&b0, &lin, 3, 0.1, 50, DealiasMode::TwoThirds).unwrap();
        assert!(d2 < 1e-12, "linear-case discrepancy {d2}");
    }

    #[test]
    fn stretch_rejects_unresolvable_factors() {
        let g = grid(64);
        let b0 = init::rough_field(g, 1.0, 20, 1).unwrap();
        assert!(stretch_field(&b0, 2, 1.0).is_err()); // 40 >= 32
        assert!(stretch_field(&b0, 0, 1.0).is_err());
        assert!(stretch_field(&b0, 1, 1.0).is_ok());
    }

    #[test]
    fn config_validation() {
        let g = grid(32);
        let b0 = Field::zeros(g);
        let p = params(0.0, 1.0, 1.0, 0.0);
        let mut cfg = SolverConfig::fixed(0.0, 1.0);
        assert!(evolve(&b0, &p, &cfg).is_err());
        cfg = SolverConfig::cfl(1.0);
        cfg.policy = StepPolicy::Cfl { c: 1.5 };
        assert!(evolve(&b0, &p, &cfg).is_err());
        cfg = SolverConfig::cfl(1.0);
        cfg.stride = 0;
        assert!(evolve(&b0, &p, &cfg).is_err());
    }
}
