//! Sharp Fourier-truncated ODE system for the transport model
//! `(a, b) = (0, 1)`, its weighted coefficients, and the Riccati-type
//! differential inequality behind short-time analyticity.
//!
//! For a truncation order `N` the coefficients `B^(k)`, `|k| <= N`, obey
//!
//! ```text
//!     d B^(k) / dt = i Sum_{m+n=k, |m|,|n|<=N} |kappa_m| kappa_n B^(m) B^(n)
//!                    - mu |kappa_k|^alpha B^(k),
//! ```
//!
//! the exact Galerkin projection of `B_t + J B_x + mu Lambda^alpha B = 0`.
//! The weighted coefficients `xi(k) = B^(k) e^{mu |kappa_k|^alpha t / 2}`
//! absorb half the dissipation; the Lyapunov functional
//!
//! ```text
//!     Y(t) = Sum_{|k| <= N} |k|^w |xi(k, t)|^2        (default weight w = 8)
//! ```
//!
//! then satisfies a bound of the form `dY/dt <= C1 Y^{3/2} + C2 mu (Y^{1/2} t
//! - 1) Sum |k|^{w+alpha} |xi|^2`. The probe integrates the system, measures
//! `dY/dt` by centered differences, and fits the smallest `C1` making the
//! inequality hold (the cubic term alone suffices on every probed horizon, so
//! `C2 = 0` is reported alongside the dissipative term's time series). The
//! substantive check is that the fitted `C1` is stable under `N`-refinement:
//! a truncation-dependent `C1` would signal that the inequality lives off the
//! mesh rather than in the dynamics.
//!
//! Integration runs in the unweighted variables with the exact linear factor
//! (integrating-factor RK4, the same scheme as the PDE solver), and `xi` is
//! formed afterward; this is mathematically identical to stepping `xi` but
//! keeps the time-dependent exponentials out of the convolution.

use num_complex::Complex64;

use crate::dynamics::{truncated_final_state, ModelParams};
use crate::fit::centred_derivative;
use crate::{EmhdError, Field, Grid, Result};

/// Truncated coefficient state: `B^(k)` for `|k| <= N` at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinState {
    n_max: i64,
    half_period: f64,
    /// Current time (enters the weighted coefficients).
    pub t: f64,
    coeffs: Vec<Complex64>,
}

impl GalerkinState {
    /// Zero state of order `n_max` on a box of the given half-period.
    pub fn new(n_max: i64, half_period: f64) -> Result<Self> {
        if n_max < 1 {
            return Err(EmhdError::InvalidParameter(format!(
                "truncation order {n_max} must be >= 1"
            )));
        }
        if !(half_period > 0.0 && half_period.is_finite()) {
            return Err(EmhdError::InvalidParameter(format!(
                "half-period {half_period} must be positive"
            )));
        }
        Ok(Self {
            n_max,
            half_period,
            t: 0.0,
            coeffs: vec![Complex64::new(0.0, 0.0); (2 * n_max + 1) as usize],
        })
    }

    /// Projects a field onto the first `n_max` modes.
    pub fn from_field(f: &Field, n_max: i64) -> Result<Self> {
        let grid = f.grid();
        if n_max as usize >= grid.n() / 2 {
            return Err(EmhdError::InvalidParameter(format!(
                "truncation order {n_max} exceeds the grid band",
            )));
        }
        let mut state = Self::new(n_max, grid.half_period())?;
        for k in -n_max..=n_max {
            state.coeffs[(k + n_max) as usize] = f.coefficient(k);
        }
        Ok(state)
    }

    /// Truncation order `N`.
    pub fn n_max(&self) -> i64 {
        self.n_max
    }

    /// Continuous wavenumber of mode `k`.
    pub fn kappa(&self, k: i64) -> f64 {
        std::f64::consts::PI * k as f64 / self.half_period
    }

    /// Coefficient `B^(k)` (zero outside the band).
    pub fn coefficient(&self, k: i64) -> Complex64 {
        if k.abs() > self.n_max {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.n_max) as usize]
        }
    }

    /// Sets `B^(k)` and its conjugate mirror (`k = 0` is forced real).
    pub fn set_coefficient(&mut self, k: i64, v: Complex64) {
        assert!(k.abs() <= self.n_max, "mode {k} outside truncation");
        if k == 0 {
            self.coeffs[self.n_max as usize] = Complex64::new(v.re, 0.0);
        } else {
            self.coeffs[(k + self.n_max) as usize] = v;
            self.coeffs[(-k + self.n_max) as usize] = v.conj();
        }
    }

    /// Weighted coefficient `xi(k) = B^(k) e^{mu |kappa_k|^alpha t / 2}`.
    pub fn xi(&self, k: i64, p: &ModelParams) -> Complex64 {
        self.coefficient(k) * (0.5 * p.mu * self.kappa(k).abs().powf(p.alpha) * self.t).exp()
    }

    /// Interaction exponent `gamma_{m,n,k} = mu (|kappa_m|^alpha +
    /// |kappa_n|^alpha - |kappa_k|^alpha) / 2` relating weighted and
    /// unweighted convolutions.
    pub fn gamma(&self, m: i64, n: i64, k: i64, p: &ModelParams) -> f64 {
        0.5 * p.mu
            * (self.kappa(m).abs().powf(p.alpha) + self.kappa(n).abs().powf(p.alpha)
                - self.kappa(k).abs().powf(p.alpha))
    }

    /// Largest violation of conjugate symmetry `B^(-k) = conj B^(k)`.
    pub fn conjugate_defect(&self) -> f64 {
        (0..=self.n_max)
            .map(|k| (self.coefficient(-k) - self.coefficient(k).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Renders the state on a collocation grid (same half-period).
    pub fn to_field(&self, grid: Grid) -> Result<Field> {
        if (grid.half_period() - self.half_period).abs() > 1e-14 * self.half_period {
            return Err(EmhdError::GridMismatch(format!(
                "state half-period {} vs grid {}",
                self.half_period,
                grid.half_period()
            )));
        }
        if self.n_max as usize >= grid.n() / 2 {
            return Err(EmhdError::InvalidGrid(format!(
                "grid too small for truncation order {}",
                self.n_max
            )));
        }
        let mut f = Field::zeros(grid);
        for k in 0..=self.n_max {
            f.set_coefficient(k, self.coefficient(k));
        }
        Ok(f)
    }

    /// Fraction of weighted energy in the top octave `(N/2, N]` — the
    /// truncation-resolution analogue of the solver's tail fraction.
    pub fn tail_fraction(&self) -> f64 {
        let mut total = 0.0;
        let mut top = 0.0;
        for k in 1..=self.n_max {
            let e = self.coefficient(k).norm_sqr();
            total += e;
            if 2 * k > self.n_max {
                top += e;
            }
        }
        if total > 0.0 {
            top / total
        } else {
            0.0
        }
    }
}

/// Quadratic interaction `i Sum |kappa_m| kappa_n c(m) c(n)` restricted to
/// the band; the mean mode is invariant (the sum over `m + n = 0` cancels in
/// conjugate pairs), so its derivative is set to exact zero.
fn nonlinear(n_max: i64, half_period: f64, coeffs: &[Complex64]) -> Vec<Complex64> {
    let kap = std::f64::consts::PI / half_period;
    let c = |k: i64| coeffs[(k + n_max) as usize];
    let mut out = vec![Complex64::new(0.0, 0.0); (2 * n_max + 1) as usize];
    for k in 1..=n_max {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in (k - n_max)..=n_max {
            let n = k - m;
            if m == 0 || n == 0 {
                continue;
            }
            let factor = (kap * m as f64).abs() * (kap * n as f64);
            acc += factor * c(m) * c(n);
        }
        let v = Complex64::new(0.0, 1.0) * acc;
        out[(k + n_max) as usize] = v;
        out[(-k + n_max) as usize] = v.conj();
    }
    out
}

/// Full right-hand side of the truncated system, including dissipation.
pub fn galerkin_rhs(state: &GalerkinState, p: &ModelParams) -> Vec<Complex64> {
    let mut out = nonlinear(state.n_max, state.half_period, &state.coeffs);
    for k in -state.n_max..=state.n_max {
        let idx = (k + state.n_max) as usize;
        out[idx] -= state.coeffs[idx] * (p.mu * state.kappa(k).abs().powf(p.alpha));
    }
    out
}

/// Advances the state by one integrating-factor RK4 step of length `dt`.
pub fn galerkin_step(state: &mut GalerkinState, p: &ModelParams, dt: f64) {
    let n_max = state.n_max;
    let lp = state.half_period;
    let d: Vec<f64> = (-n_max..=n_max)
        .map(|k| (-p.mu * dt / 2.0 * (std::f64::consts::PI * k as f64 / lp).abs().powf(p.alpha)).exp())
        .collect();
    let apply = |v: &[Complex64], square: bool| -> Vec<Complex64> {
        v.iter()
            .zip(&d)
            .map(|(&c, &e)| if square { c * (e * e) } else { c * e })
            .collect()
    };
    let lincomb = |base: &[Complex64], scale: f64, dir: &[Complex64]| -> Vec<Complex64> {
        base.iter().zip(dir).map(|(&u, &k)| u + scale * k).collect()
    };
    let u = &state.coeffs;
    let k1 = nonlinear(n_max, lp, u);
    let k2 = nonlinear(n_max, lp, &apply(&lincomb(u, dt / 2.0, &k1), false));
    let du = apply(u, false);
    let k3 = nonlinear(n_max, lp, &lincomb(&du, dt / 2.0, &k2));
    let k4 = nonlinear(n_max, lp, &lincomb(&apply(u, true), dt, &apply(&k3, false)));

    let mut out = apply(u, true);
    let k1d = apply(&k1, true);
    let mid: Vec<Complex64> = k2.iter().zip(&k3).map(|(&a, &b)| a + b).collect();
    let midd = apply(&mid, false);
    for i in 0..out.len() {
        out[i] += dt / 6.0 * k1d[i] + dt / 3.0 * midd[i] + dt / 6.0 * k4[i];
    }
    state.coeffs = out;
    state.t += dt;
}

/// Lyapunov functional `Y = Sum |k|^weight |xi(k)|^2` (integer-mode weight).
pub fn y_functional(state: &GalerkinState, p: &ModelParams, weight: i32) -> f64 {
    let mut y = 0.0;
    for k in -state.n_max..=state.n_max {
        if k == 0 {
            continue;
        }
        y += (k.abs() as f64).powi(weight) * state.xi(k, p).norm_sqr();
    }
    y
}

/// Exact `dY/dt` by the weighted triple sum — `O(N^3)`, kept as a test
/// oracle for the finite-difference derivative used by the probe.
pub fn y_prime_oracle(state: &GalerkinState, p: &ModelParams, weight: i32) -> f64 {
    let n_max = state.n_max;
    let mut total = 0.0;
    for k in -n_max..=n_max {
        if k == 0 {
            continue;
        }
        let w = (k.abs() as f64).powi(weight);
        let xik = state.xi(k, p);
        // Dissipative part of d xi / dt.
        total -= w * p.mu * state.kappa(k).abs().powf(p.alpha) * xik.norm_sqr();
        // Interaction part: i Sum |kappa_m| kappa_n xi(m) xi(n) e^{-gamma t}.
        let mut acc = Complex64::new(0.0, 0.0);
        for m in (k - n_max)..=n_max {
            let n = k - m;
            if m == 0 || n == 0 || m.abs() > n_max {
                continue;
            }
            let factor = state.kappa(m).abs() * state.kappa(n)
                * (-state.gamma(m, n, k, p) * state.t).exp();
            acc += factor * state.xi(m, p) * state.xi(n, p);
        }
        total += w * 2.0 * (xik.conj() * Complex64::new(0.0, 1.0) * acc).re;
    }
    total
}

/// Time series and fitted constants from one Riccati probe run.
#[derive(Debug, Clone)]
pub struct RiccatiProbe {
    /// Sample times (one per integration step).
    pub times: Vec<f64>,
    /// `Y(t)`.
    pub y: Vec<f64>,
    /// Centered-difference `dY/dt`.
    pub dydt: Vec<f64>,
    /// Cubic candidate `Y^{3/2}`.
    pub cubic_term: Vec<f64>,
    /// Dissipative candidate `mu (Y^{1/2} t - 1) Sum |k|^{w+alpha} |xi|^2`.
    pub dissipative_term: Vec<f64>,
    /// Smallest constant with `dY/dt <= C1 Y^{3/2}` at every interior sample.
    pub c1: f64,
    /// Companion constant; 0 whenever the cubic term alone suffices.
    pub c2: f64,
    /// Weight exponent used.
    pub weight: i32,
    /// True when `alpha` lies in the range the analyticity argument covers.
    pub in_theorem_range: bool,
    /// Largest top-octave energy fraction observed (truncation health).
    pub max_tail_fraction: f64,
}

/// Integrates the truncated system from `state0` and fits the differential
/// inequality. Restricted to the transport preset `(a, b) = (0, 1)`.
pub fn riccati_probe(
    state0: &GalerkinState,
    p: &ModelParams,
    t_end: f64,
    steps: usize,
    weight: i32,
) -> Result<RiccatiProbe> {
    if p.a != 0.0 || p.b != 1.0 {
        return Err(EmhdError::InvalidParameter(format!(
            "the truncated system models (a, b) = (0, 1); got ({}, {})",
            p.a, p.b
        )));
    }
    if steps < 3 || !(t_end > 0.0) {
        return Err(EmhdError::InvalidParameter(
            "probe needs steps >= 3 and t_end > 0".into(),
        ));
    }
    let dt = t_end / steps as f64;
    let mut state = state0.clone();
    let mut times = Vec::with_capacity(steps + 1);
    let mut y = Vec::with_capacity(steps + 1);
    let mut diss_sum = Vec::with_capacity(steps + 1);
    let mut max_tail = 0.0_f64;
    for i in 0..=steps {
        if i > 0 {
            galerkin_step(&mut state, p, dt);
        }
        let yv = y_functional(&state, p, weight);
        if !yv.is_finite() {
            return Err(EmhdError::NonFinite { t: state.t });
        }
        times.push(state.t);
        y.push(yv);
        let s: f64 = (1..=state.n_max)
            .map(|k| {
                2.0 * (k as f64).powf(weight as f64 + p.alpha)
                    * state.xi(k, p).norm_sqr()
            })
            .sum();
        diss_sum.push(s);
        max_tail = max_tail.max(state.tail_fraction());
    }
    let dydt = centred_derivative(&times, &y);
    let cubic_term: Vec<f64> = y.iter().map(|&v| v.powf(1.5)).collect();
    let dissipative_term: Vec<f64> = (0..y.len())
        .map(|i| p.mu * (y[i].sqrt() * times[i] - 1.0) * diss_sum[i])
        .collect();
    let mut c1 = 0.0_f64;
    for i in 1..y.len().saturating_sub(1) {
        if cubic_term[i] > 0.0 {
            c1 = c1.max(dydt[i].max(0.0) / cubic_term[i]);
        }
    }
    Ok(RiccatiProbe {
        times,
        y,
        dydt,
        cubic_term,
        dissipative_term,
        c1,
        c2: 0.0,
        weight,
        in_theorem_range: (0.0..=1.0).contains(&p.alpha),
        max_tail_fraction: max_tail,
    })
}

/// Integrates the same `N`-mode system once as the coefficient ODE and once
/// as the sharply truncated pseudo-spectral solver; returns the largest
/// coefficient discrepancy. The two paths are the same dynamical system, so
/// the discrepancy measures accumulated rounding of two independent
/// implementations.
pub fn galerkin_vs_pseudospectral(
    b0: &Field,
    n_max: i64,
    p: &ModelParams,
    t_end: f64,
    steps: usize,
) -> Result<f64> {
    if p.a != 0.0 || p.b != 1.0 {
        return Err(EmhdError::InvalidParameter(format!(
            "the truncated system models (a, b) = (0, 1); got ({}, {})",
            p.a, p.b
        )));
    }
    let n = b0.grid().n() as i64;
    if 3 * n_max > n - 1 {
        return Err(EmhdError::InvalidGrid(format!(
            "grid n = {n} cannot compute band-{n_max} products alias-free"
        )));
    }
    if steps == 0 || !(t_end > 0.0) {
        return Err(EmhdError::InvalidParameter(
            "cross-check needs steps >= 1 and t_end > 0".into(),
        ));
    }
    let dt = t_end / steps as f64;
    let mut state = GalerkinState::from_field(b0, n_max)?;
    for _ in 0..steps {
        galerkin_step(&mut state, p, dt);
        if !state.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(EmhdError::NonFinite { t: state.t });
        }
    }
    let pde = truncated_final_state(b0, p, n_max, dt, steps)?;
    let mut worst = 0.0_f64;
    for k in -n_max..=n_max {
        worst = worst.max((state.coefficient(k) - pde.coefficient(k)).norm());
    }
    Ok(worst)
}
