//! Self-steepening laboratory: the compactly supported odd profile, tracking
//! of the maximum point, analyticity-radius measurement and finite-time
//! blow-up extrapolation.
//!
//! The experiment of interest evolves, under `(a, b) = (0, 1)` with `mu = 0`,
//! the odd profile
//!
//! ```text
//!     B0(x) = x (1 - x^2)^4 / M   for |x| <= 1,      B0 = 0 otherwise,
//! ```
//!
//! normalised by `M = (1/3)(8/9)^4` so `max B0 = 1`, attained at `x0 = 1/3`.
//! The maximum location `X(t)` is transported by the induced current toward
//! the origin; oddness pins `B(0, t) = 0`, so the gradient between `X(t)` and
//! the origin must steepen as `X` collapses. The quantitative signature is a
//! Riccati-type collapse: `1/X(t)` grows at least linearly, `X(t)^2` decays
//! roughly linearly, and the fitted lines extrapolate to a finite blow-up
//! time.
//!
//! Everything here post-processes trajectories or single fields; nothing
//! feeds back into time stepping except the two resolution measurements
//! ([`analyticity_radius`] and [`tail_energy_fraction`]) that the integrator
//! uses to flag and stop unresolved runs.

use crate::dynamics::Trajectory;
use crate::fit::{line_root, linear_fit};
use crate::{EmhdError, Field, Grid, Result};

/// Normalisation constant `M = max x(1-x^2)^4 = (1/3)(8/9)^4`.
pub const PROFILE_NORMALISER: f64 = (1.0 / 3.0) * (8.0 / 9.0) * (8.0 / 9.0) * (8.0 / 9.0) * (8.0 / 9.0);

/// Location of the profile maximum.
pub const PROFILE_PEAK_X: f64 = 1.0 / 3.0;

/// Closed-form value of the profile (before grid sampling).
pub fn profile_value(x: f64) -> f64 {
    if x.abs() <= 1.0 {
        let w = 1.0 - x * x;
        x * w * w * w * w / PROFILE_NORMALISER
    } else {
        0.0
    }
}

/// Samples the odd, compactly supported blow-up profile on `grid`.
///
/// Requires `L >= pi` so the support `[-1, 1]` sits well inside the box, and
/// enough resolution that the sampled profile's tail-energy fraction stays
/// below `1e-8` (the profile is `C^3` at the support edge, so its spectrum
/// decays fast enough for modest grids to qualify).
pub fn blowup_profile(grid: Grid) -> Result<Field> {
    if grid.half_period() < std::f64::consts::PI {
        return Err(EmhdError::InvalidInitialData(format!(
            "half-period {} too small; the profile needs L >= pi for support margin",
            grid.half_period()
        )));
    }
    let field = Field::from_fn(grid, profile_value);
    let tail = tail_energy_fraction(&field);
    if tail > 1e-8 {
        return Err(EmhdError::InvalidInitialData(format!(
            "grid too coarse for the profile: tail-energy fraction {tail:.3e} > 1e-8"
        )));
    }
    Ok(field)
}

/// Fraction of band energy in the top octave: energy in `(K/2, K]` over
/// energy in `(0, K]` with `K` the de-aliasing cutoff. Zero for zero fields.
///
/// A resolved field keeps this below `1e-6`; content piling up against the
/// cutoff means the retained band no longer represents the solution.
pub fn tail_energy_fraction(f: &Field) -> f64 {
    let cutoff = f.grid().dealias_cutoff();
    let mut total = 0.0;
    let mut top = 0.0;
    for k in 1..=cutoff {
        let e = f.coefficient(k).norm_sqr();
        total += e;
        if 2 * k > cutoff {
            top += e;
        }
    }
    if total > 0.0 {
        top / total
    } else {
        0.0
    }
}

/// Result of an analyticity-strip fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusFit {
    /// Fitted strip half-width, `None` when the spectrum supports no fit
    /// (band-limited data, noise-floor-dominated tail, or nondecaying tail).
    pub radius: Option<f64>,
    /// First wavenumber of the fitting band (0 when unresolved).
    pub k_lo: i64,
    /// Last wavenumber of the fitting band (0 when unresolved).
    pub k_hi: i64,
}

/// Analyticity-strip estimate: least-squares slope of `log |B^(k)|` against
/// `kappa_k` over an automatically selected band.
///
/// For a function analytic in a strip of half-width `delta` the coefficients
/// decay like `e^{-delta kappa}`, so `-slope` estimates `delta`. The fitting
/// band starts at the spectral peak (skipping the large-scale shape) and ends
/// where the envelope stops decaying or falls to the relative noise floor
/// `1e-13`; the endpoint is located on a 5-point smoothed log-envelope so a
/// single rounding-level bin cannot truncate the band. Fits spanning less
/// than two octaves are reported unresolved rather than guessed.
pub fn analyticity_radius(f: &Field) -> RadiusFit {
    let unresolved = RadiusFit {
        radius: None,
        k_lo: 0,
        k_hi: 0,
    };
    let grid = f.grid();
    let cutoff = grid.dealias_cutoff() as usize;
    if cutoff < 8 {
        return unresolved;
    }
    let env: Vec<f64> = (1..=cutoff as i64).map(|k| f.coefficient(k).norm()).collect();
    let (mut peak_idx, mut peak) = (0usize, 0.0_f64);
    for (i, &e) in env.iter().enumerate() {
        if e > peak {
            peak = e;
            peak_idx = i;
        }
    }
    if peak <= 0.0 {
        return unresolved;
    }
    let k_lo = (peak_idx + 1).max(2);
    let floor = 1e-13 * peak;
    let k_hi_floor = match (1..=cutoff).rev().find(|&k| env[k - 1] >= floor) {
        Some(k) if k > k_lo => k,
        _ => return unresolved,
    };
    let log_env: Vec<f64> = env.iter().map(|&e| e.max(1e-300).ln()).collect();
    let smoothed = |k: usize| -> f64 {
        let lo = k.saturating_sub(3).max(1);
        let hi = (k + 2).min(cutoff);
        let mut acc = 0.0;
        for kk in lo..=hi {
            acc += log_env[kk - 1];
        }
        acc / (hi - lo + 1) as f64
    };
    let mut k_hi = k_lo + 1;
    let mut best = f64::INFINITY;
    for k in (k_lo + 1)..=k_hi_floor {
        let s = smoothed(k);
        if s < best {
            best = s;
            k_hi = k;
        }
    }
    if k_hi < 4 * k_lo {
        return unresolved;
    }
    let xs: Vec<f64> = (k_lo..=k_hi).map(|k| grid.kappa(k)).collect();
    let ys: Vec<f64> = (k_lo..=k_hi).map(|k| log_env[k - 1]).collect();
    let (_, slope) = linear_fit(&xs, &ys);
    if slope >= 0.0 {
        return unresolved;
    }
    RadiusFit {
        radius: Some(-slope),
        k_lo: k_lo as i64,
        k_hi: k_hi as i64,
    }
}

/// Fraction of the `L^1` mass lying outside `[-extent, extent]`.
pub fn mass_fraction_outside(f: &Field, extent: f64) -> f64 {
    let grid = f.grid();
    let samples = f.samples();
    let mut total = 0.0;
    let mut outside = 0.0;
    for (j, &v) in samples.iter().enumerate() {
        total += v.abs();
        if grid.x(j).abs() > extent {
            outside += v.abs();
        }
    }
    if total > 0.0 {
        outside / total
    } else {
        0.0
    }
}

/// Time series of the tracked maximum.
#[derive(Debug, Clone)]
pub struct MaxTrack {
    /// Sample times (resolved samples only).
    pub times: Vec<f64>,
    /// Sub-grid argmax location `X(t)`.
    pub x: Vec<f64>,
    /// Interpolated maximum value `B(X(t), t)`.
    pub bmax: Vec<f64>,
    /// Grid spacing of the source run (the location tolerance).
    pub dx: f64,
}

impl MaxTrack {
    /// `1/X(t)` series.
    pub fn inv_x(&self) -> Vec<f64> {
        self.x.iter().map(|&x| 1.0 / x).collect()
    }

    /// True when `X` never increases by more than `dx` between samples.
    pub fn monotone_within_dx(&self) -> bool {
        self.x.windows(2).all(|w| w[1] <= w[0] + self.dx)
    }

    /// Largest relative drift of the maximum value from its initial value.
    pub fn max_value_drift(&self) -> f64 {
        let b0 = self.bmax.first().copied().unwrap_or(0.0);
        if b0 == 0.0 {
            return 0.0;
        }
        self.bmax
            .iter()
            .map(|&b| (b / b0 - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Extracts the maximum track from a trajectory's resolved samples.
pub fn track_max(traj: &Trajectory) -> MaxTrack {
    let dx = traj
        .checkpoints
        .first()
        .map(|(_, f)| f.grid().dx())
        .unwrap_or(0.0);
    let resolved = traj.rows.iter().filter(|r| r.resolved);
    let mut times = Vec::new();
    let mut x = Vec::new();
    let mut bmax = Vec::new();
    for row in resolved {
        times.push(row.t);
        x.push(row.xmax);
        bmax.push(row.bmax);
    }
    MaxTrack { times, x, bmax, dx }
}

/// Riccati-collapse fit of a maximum track.
#[derive(Debug, Clone, Copy)]
pub struct RiccatiFit {
    /// Least-squares growth rate of `1/X(t)`; positive means collapse.
    pub c_fit: f64,
    /// Blow-up time extrapolated from the `X(t)^2` least-squares line
    /// (`X' <= -c/X` integrates to a linearly decaying `X^2`).
    pub t_star: Option<f64>,
    /// False when the track is too short or `X` is not collapsing.
    pub conclusive: bool,
}

/// Fits the Riccati collapse: slope of `1/X` against `t`, blow-up time from
/// the root of the `X^2` line. Needs at least 10 samples with decreasing `X`
/// to claim a conclusive fit.
pub fn riccati_fit(track: &MaxTrack) -> RiccatiFit {
    if track.times.len() < 10 {
        return RiccatiFit {
            c_fit: 0.0,
            t_star: None,
            conclusive: false,
        };
    }
    let inv_x = track.inv_x();
    let (_, c_fit) = linear_fit(&track.times, &inv_x);
    let xsq: Vec<f64> = track.x.iter().map(|&x| x * x).collect();
    let t_star =
        line_root(&track.times, &xsq).filter(|&t| t > *track.times.last().unwrap());
    let collapsing = c_fit > 0.0 && track.x.last().unwrap() < track.x.first().unwrap();
    RiccatiFit {
        c_fit,
        t_star,
        conclusive: collapsing && t_star.is_some(),
    }
}

/// Overall verdict of a blow-up experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Gradient growth plus Riccati collapse over the resolved window.
    BlowupIndicated,
    /// Bounded gradient and no collapse (dissipative or linear control runs).
    NoBlowupIndicators,
    /// Mixed or insufficient evidence.
    Inconclusive,
}

/// Summary of one blow-up experiment.
#[derive(Debug, Clone)]
pub struct BlowupReport {
    /// `max ||B_x||_inf / ||B0_x||_inf` over the resolved window.
    pub lip_growth_factor: f64,
    /// `X(t)` nonincreasing within `dx`.
    pub x_monotone: bool,
    /// Largest relative drift of the tracked maximum value.
    pub max_drift: f64,
    /// Fitted `1/X` growth rate.
    pub c_fit: f64,
    /// Blow-up time from the `X^2` line.
    pub t_star_riccati: Option<f64>,
    /// Blow-up time from linear extrapolation of `1/||B_x||_inf`.
    pub t_star_lip: Option<f64>,
    /// Largest trusted sample time.
    pub resolved_until: f64,
    /// Overall reading of the indicators.
    pub verdict: Verdict,
}

/// Post-processes a completed trajectory into a [`BlowupReport`].
///
/// The verdict is `BlowupIndicated` when the gradient at least doubles while
/// `1/X` grows (`c_fit > 0`); `NoBlowupIndicators` when the gradient stays
/// within 50% of its initial size and no collapse is fitted; anything mixed
/// is `Inconclusive`.
pub fn blowup_report(traj: &Trajectory) -> BlowupReport {
    let track = track_max(traj);
    let fit = riccati_fit(&track);
    let resolved: Vec<_> = traj.rows.iter().filter(|r| r.resolved).collect();
    let lip0 = resolved.first().map(|r| r.lip).unwrap_or(0.0);
    let lip_max = resolved.iter().map(|r| r.lip).fold(0.0, f64::max);
    let lip_growth_factor = if lip0 > 0.0 { lip_max / lip0 } else { 0.0 };

    let times: Vec<f64> = resolved.iter().map(|r| r.t).collect();
    let inv_lip: Vec<f64> = resolved.iter().map(|r| 1.0 / r.lip.max(1e-300)).collect();
    let t_star_lip = if times.len() >= 10 && lip_growth_factor > 1.0 {
        line_root(&times, &inv_lip).filter(|&t| t > *times.last().unwrap())
    } else {
        None
    };

    let verdict = if fit.c_fit > 0.0 && lip_growth_factor >= 2.0 {
        Verdict::BlowupIndicated
    } else if lip_growth_factor <= 1.5 && fit.c_fit <= 1e-6 {
        Verdict::NoBlowupIndicators
    } else {
        Verdict::Inconclusive
    };

    BlowupReport {
        lip_growth_factor,
        x_monotone: track.monotone_within_dx(),
        max_drift: track.max_value_drift(),
        c_fit: fit.c_fit,
        t_star_riccati: fit.t_star,
        t_star_lip,
        resolved_until: traj.resolved_until,
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::derivative;
    use crate::{init, Grid};
    use num_complex::Complex64;

    fn grid(n: usize) -> Grid {
        Grid::with_default_length(n).unwrap()
    }

    #[test]
    fn profile_shape() {
        let g = grid(1024);
        let b0 = blowup_profile(g).unwrap();
        // Odd, zero-mean, supported in [-1, 1], max 1 near x = 1/3.
        let samples = b0.samples();
        let n = g.n();
        let mut asym = 0.0_f64;
        for j in 1..n {
            asym = asym.max((samples[j] + samples[n - j]).abs());
        }
        assert!(asym < 1e-14, "oddness defect {asym}");
        assert!(b0.mean().abs() < 1e-15);
        for (j, &v) in samples.iter().enumerate() {
            if g.x(j).abs() > 1.0 {
                assert!(v.abs() < 1e-14, "support leak at x = {}", g.x(j));
            }
        }
        let (jmax, _) = samples
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert!((g.x(jmax) - PROFILE_PEAK_X).abs() <= g.dx());
        assert!((samples[jmax] - 1.0).abs() < 1e-4);
        assert!((profile_value(PROFILE_PEAK_X) - 1.0).abs() < 1e-12);
        // Initial Lipschitz seminorm: B0'(0) = 1/M exactly, and it dominates.
        let lip = derivative(&b0).linf_norm();
        assert!(
            (lip - 1.0 / PROFILE_NORMALISER).abs() < 1e-3,
            "lip {lip} vs {}",
            1.0 / PROFILE_NORMALISER
        );
    }

    #[test]
    fn profile_rejects_bad_grids() {
        assert!(blowup_profile(Grid::new(1024, 1.5).unwrap()).is_err());
        assert!(blowup_profile(grid(32)).is_err()); // too coarse: C^3 tail
    }

    #[test]
    fn radius_of_manufactured_spectrum() {
        let g = grid(512);
        let mut f = Field::zeros(g);
        for k in 1..g.dealias_cutoff() {
            let phase = (k as f64 * 0.7).sin();
            f.set_coefficient(
                k,
                Complex64::from_polar((-0.5 * k as f64).exp(), phase),
            );
        }
        let fit = analyticity_radius(&f);
        let r = fit.radius.expect("fit should resolve");
        assert!((r - 0.5).abs() < 0.005, "radius {r} vs 0.5");
        assert!(fit.k_hi >= 4 * fit.k_lo);
    }

    #[test]
    fn radius_unresolved_for_band_limited_field() {
        let g = grid(256);
        let f = Field::from_fn(g, |x| x.cos() + 0.25 * (3.0 * x).cos());
        assert_eq!(analyticity_radius(&f).radius, None);
        assert_eq!(analyticity_radius(&Field::zeros(g)).radius, None);
    }

    #[test]
    fn tail_fraction_detects_pileup() {
        let g = grid(256);
        let smooth = Field::from_fn(g, |x| x.cos());
        // Transform rounding leaves ~1e-17 residue in the empty bins, so the
        // fraction is tiny rather than exactly zero.
        assert!(tail_energy_fraction(&smooth) < 1e-12);
        let mut piled = smooth.clone();
        piled.set_coefficient(g.dealias_cutoff(), Complex64::new(0.1, 0.0));
        assert!(tail_energy_fraction(&piled) > 1e-3);
        assert_eq!(tail_energy_fraction(&Field::zeros(g)), 0.0);
    }

    #[test]
    fn riccati_fit_recovers_manufactured_collapse() {
        // X(t) = sqrt(x0^2 - 2 kappa t): X^2 is an exact line with root
        // T* = x0^2 / (2 kappa).
        let x0 = 1.0 / 3.0;
        let kappa = 0.05;
        let t_star = x0 * x0 / (2.0 * kappa);
        let times: Vec<f64> = (0..40).map(|i| 0.8 * t_star * i as f64 / 39.0).collect();
        let track = MaxTrack {
            x: times
                .iter()
                .map(|&t| (x0 * x0 - 2.0 * kappa * t).sqrt())
                .collect(),
            bmax: vec![1.0; times.len()],
            times,
            dx: 1e-3,
        };
        let fit = riccati_fit(&track);
        assert!(fit.conclusive);
        assert!(fit.c_fit > 0.0);
        let got = fit.t_star.unwrap();
        assert!(
            (got - t_star).abs() < 0.02 * t_star,
            "T* {got} vs {t_star}"
        );
    }

    #[test]
    fn riccati_fit_degenerate_inputs() {
        let constant = MaxTrack {
            times: (0..20).map(|i| i as f64 * 0.01).collect(),
            x: vec![0.3; 20],
            bmax: vec![1.0; 20],
            dx: 1e-3,
        };
        let fit = riccati_fit(&constant);
        assert!(!fit.conclusive);
        let short = MaxTrack {
            times: vec![0.0, 0.1],
            x: vec![0.3, 0.2],
            bmax: vec![1.0, 1.0],
            dx: 1e-3,
        };
        assert!(!riccati_fit(&short).conclusive);
    }

    #[test]
    fn linear_control_run_reports_no_indicators() {
        use crate::dynamics::{evolve, ModelParams, SolverConfig};
        let g = grid(256);
        let b0 = init::rough_field(g, 2.5, 20, 11).unwrap();
        let p = ModelParams::new(0.0, 0.0, 1.5, 1.0).unwrap();
        let mut cfg = SolverConfig::fixed(1e-3, 0.5);
        cfg.stride = 25;
        let traj = evolve(&b0, &p, &cfg).unwrap();
        let report = blowup_report(&traj);
        assert_eq!(report.verdict, Verdict::NoBlowupIndicators);
        assert!(report.lip_growth_factor <= 1.0 + 1e-12);
    }

    #[test]
    fn mass_fraction_outside_support() {
        let g = grid(1024);
        let b0 = blowup_profile(g).unwrap();
        assert!(mass_fraction_outside(&b0, 1.05) < 1e-12);
        assert!(mass_fraction_outside(&b0, 0.0) > 0.99);
    }
}
