//! Discrete Fourier transforms and multiplier operators.
//!
//! Coefficients follow the analytic normalisation
//!
//! ```text
//!     u(x) = sum_k  u_hat(k) e^{i pi k x / L},
//!     u_hat(k) = (2L)^{-1} integral_{-L}^{L} u(x) e^{-i pi k x / L} dx,
//! ```
//!
//! discretised by the (spectrally accurate) trapezoid rule on the nodes
//! `x_j = -L + j dx`. Because the leftmost node is `-L` rather than `0`, the
//! raw FFT picks up the modulation `e^{i pi k} = (-1)^k`; both transform
//! directions apply that sign so stored coefficients are the analytic ones.
//!
//! Every forward transform ends by enforcing Hermitian symmetry
//! `u_hat(-k) = conj(u_hat(k))`, which keeps round-off from leaking into
//! imaginary parts over long multiplier chains. Odd multipliers (`H`, `d/dx`)
//! zero the unpaired Nyquist bin; even non-negative multipliers keep it.
//!
//! The de-aliased product truncates both factors to `|k| <= K = floor(n/3)`,
//! multiplies pointwise on the grid, and truncates the result to the same
//! band. For power-of-two `n` the rule `2K <= n - K - 1` holds, so within the
//! retained band the result equals the exact convolution of the truncated
//! inputs; there is no taper and no other modification inside the band.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{EmhdError, Field, Grid, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan_forward(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

fn plan_inverse(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// Forward transform: physical samples to normalised spectral coefficients.
pub(crate) fn forward(grid: Grid, samples: &[f64]) -> Vec<Complex64> {
    let n = grid.n();
    debug_assert_eq!(samples.len(), n);
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plan_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    for (j, c) in buf.iter_mut().enumerate() {
        let sign = if j % 2 == 0 { scale } else { -scale };
        *c *= sign;
    }
    hermitian_symmetrize(&mut buf);
    buf
}

/// Inverse transform: spectral coefficients to physical samples.
pub(crate) fn inverse(grid: Grid, coeffs: &[Complex64]) -> Vec<f64> {
    let n = grid.n();
    debug_assert_eq!(coeffs.len(), n);
    let mut buf: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(j, &c)| if j % 2 == 0 { c } else { -c })
        .collect();
    plan_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re).collect()
}

/// Projects coefficient storage onto the Hermitian subspace in place.
///
/// Pairs `(k, -k)` are averaged against each other's conjugate and the mean
/// and Nyquist bins are made real, so the represented field is exactly real.
pub(crate) fn hermitian_symmetrize(coeffs: &mut [Complex64]) {
    let n = coeffs.len();
    coeffs[0].im = 0.0;
    let ny = n / 2;
    coeffs[ny].im = 0.0;
    for k in 1..ny {
        let avg = 0.5 * (coeffs[k] + coeffs[n - k].conj());
        coeffs[k] = avg;
        coeffs[n - k] = avg.conj();
    }
}

fn unary_multiplier(f: &Field, m: impl Fn(i64, f64) -> f64) -> Field {
    let grid = f.grid();
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, &c)| c * m(grid.k_int(j), grid.kappa(j)))
        .collect();
    Field::from_coeffs_unchecked(grid, coeffs)
}

/// Periodic Hilbert transform `H`: multiplier `-i sgn(k)`.
///
/// The mean and the Nyquist bin are annihilated (the multiplier is odd), so
/// `H` maps real fields to real zero-mean fields and `H(Hf) = -f` holds
/// exactly on zero-mean, Nyquist-free input.
pub fn hilbert(f: &Field) -> Field {
    let grid = f.grid();
    let ny = grid.nyquist_bin();
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            let k = grid.k_int(j);
            if k == 0 || j == ny {
                Complex64::new(0.0, 0.0)
            } else if k > 0 {
                Complex64::new(c.im, -c.re) // -i * c
            } else {
                Complex64::new(-c.im, c.re) // +i * c
            }
        })
        .collect();
    Field::from_coeffs_unchecked(grid, coeffs)
}

/// Zygmund operator power `Lambda^alpha`: multiplier `|kappa|^alpha`.
///
/// `alpha` must lie in `[0, 4]`. For `alpha = 0` this is the identity
/// (including the mean: the multiplier at `k = 0` is `0^0 = 1`); for
/// `alpha > 0` the mean is annihilated.
pub fn lambda_alpha(f: &Field, alpha: f64) -> Result<Field> {
    if !(0.0..=4.0).contains(&alpha) {
        return Err(EmhdError::InvalidParameter(format!(
            "alpha = {alpha} outside [0, 4]"
        )));
    }
    if alpha == 0.0 {
        return Ok(f.clone());
    }
    Ok(unary_multiplier(f, |k, kappa| {
        if k == 0 {
            0.0
        } else {
            kappa.abs().powf(alpha)
        }
    }))
}

/// Spectral derivative `d/dx`: multiplier `i kappa`, Nyquist bin zeroed.
pub fn derivative(f: &Field) -> Field {
    let grid = f.grid();
    let ny = grid.nyquist_bin();
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            if j == ny {
                Complex64::new(0.0, 0.0)
            } else {
                c * Complex64::new(0.0, grid.kappa(j))
            }
        })
        .collect();
    Field::from_coeffs_unchecked(grid, coeffs)
}

/// Nonlocal current `J = -Lambda B` (mean of `J` is zero by construction).
///
/// The constraint this encodes is `B_x = H J`: differentiating and applying
/// the Hilbert transform, `H(d/dx) = Lambda`, so `J = -Lambda B`. The input
/// must be zero-mean — the constraint only determines `J` from the
/// oscillatory part, and a silent projection here could mask an upstream
/// gauge error, so a nonzero mean is rejected instead.
pub fn current(f: &Field) -> Result<Field> {
    let mean = f.mean().abs();
    if mean > 1e-12 * (1.0 + f.l2_norm()) {
        return Err(EmhdError::NonZeroMean(mean));
    }
    Ok(unary_multiplier(f, |k, kappa| {
        if k == 0 {
            0.0
        } else {
            -kappa.abs()
        }
    }))
}

/// Dissipation semigroup `exp(-mu t Lambda^alpha)` applied to `f`.
pub fn semigroup(f: &Field, mu: f64, alpha: f64, t: f64) -> Result<Field> {
    if !(0.0..=4.0).contains(&alpha) {
        return Err(EmhdError::InvalidParameter(format!(
            "alpha = {alpha} outside [0, 4]"
        )));
    }
    if mu < 0.0 || t < 0.0 {
        return Err(EmhdError::InvalidParameter(format!(
            "semigroup needs mu >= 0 and t >= 0, got mu = {mu}, t = {t}"
        )));
    }
    Ok(unary_multiplier(f, |k, kappa| {
        if k == 0 {
            // exp(-mu t 0^alpha): the mean decays only when alpha = 0.
            if alpha == 0.0 {
                (-mu * t).exp()
            } else {
                1.0
            }
        } else {
            (-mu * t * kappa.abs().powf(alpha)).exp()
        }
    }))
}

/// Zeroes every coefficient with `|k| > kmax` (the Nyquist bin counts as
/// `|k| = n/2`). Returns a new field.
pub fn truncate(f: &Field, kmax: i64) -> Field {
    let grid = f.grid();
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            if grid.k_int(j).abs() <= kmax {
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Field::from_coeffs_unchecked(grid, coeffs)
}

/// Pointwise product on the collocation grid with no band control.
///
/// This aliases whenever the combined bandwidth exceeds the grid; it exists
/// for contexts that control bandwidth themselves (padded-grid exact products)
/// and as the deliberately faulty path in the de-aliasing negative control.
pub fn pointwise_product(f: &Field, g: &Field) -> Result<Field> {
    let grid = check_same_grid(f, g)?;
    let a = f.samples();
    let b = g.samples();
    let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    Ok(Field::from_samples(grid, &prod).expect("sample count matches grid"))
}

/// Product truncated to `|k| <= kmax` on input and output.
///
/// When `2 * kmax <= n - kmax - 1` the result equals the exact convolution of
/// the truncated factors restricted to the band (no aliased image can land
/// inside it); `kmax = floor(n/3)` on a power-of-two grid always qualifies.
pub fn truncated_product(f: &Field, g: &Field, kmax: i64) -> Result<Field> {
    let grid = check_same_grid(f, g)?;
    if kmax < 0 || kmax as usize >= grid.n() / 2 {
        return Err(EmhdError::InvalidParameter(format!(
            "truncation wavenumber {kmax} outside [0, n/2)"
        )));
    }
    let ft = truncate(f, kmax);
    let gt = truncate(g, kmax);
    let prod = pointwise_product(&ft, &gt)?;
    Ok(truncate(&prod, kmax))
}

/// Alias-free product: both factors and the result restricted to the band
/// `|k| <= floor(n/3)`.
pub fn dealiased_product(f: &Field, g: &Field) -> Result<Field> {
    let grid = check_same_grid(f, g)?;
    truncated_product(f, g, grid.dealias_cutoff())
}

/// Exact (periodic) convolution of two coefficient vectors, `O(n^2)`.
///
/// Independent oracle for the de-aliased product: it works directly on
/// integer wavenumbers with no FFT, so agreement is evidence the fast path
/// has no aliasing inside the retained band.
pub fn convolution_oracle(f: &Field, g: &Field) -> Result<Vec<Complex64>> {
    let grid = check_same_grid(f, g)?;
    let n = grid.n() as i64;
    let half = n / 2;
    let coeff = |field: &Field, k: i64| -> Complex64 {
        if k.abs() > half {
            Complex64::new(0.0, 0.0)
        } else {
            field.coefficient(k)
        }
    };
    let mut out = vec![Complex64::new(0.0, 0.0); grid.n()];
    for j in 0..grid.n() {
        let k = grid.k_int(j);
        let mut acc = Complex64::new(0.0, 0.0);
        for m in -half..=half {
            acc += coeff(f, m) * coeff(g, k - m);
        }
        out[j] = acc;
    }
    Ok(out)
}

/// Re-expresses `f` on a grid with a different node count (same `[-L, L]`).
///
/// Coefficients are copied by integer wavenumber: refining zero-pads the
/// spectrum, coarsening truncates it. The source Nyquist bin is dropped.
pub fn resample(f: &Field, target: Grid) -> Result<Field> {
    let src = f.grid();
    if (src.half_period() - target.half_period()).abs() > 1e-15 {
        return Err(EmhdError::GridMismatch(format!(
            "resample keeps the domain: L = {} vs {}",
            src.half_period(),
            target.half_period()
        )));
    }
    let keep = (src.n().min(target.n()) / 2 - 1) as i64;
    let mut out = Field::zeros(target);
    for k in 0..=keep {
        out.set_coefficient(k, f.coefficient(k));
    }
    Ok(out)
}

fn check_same_grid(f: &Field, g: &Field) -> Result<Grid> {
    if f.grid() != g.grid() {
        return Err(EmhdError::GridMismatch(format!(
            "n = {} / {}, L = {} / {}",
            f.grid().n(),
            g.grid().n(),
            f.grid().half_period(),
            g.grid().half_period()
        )));
    }
    Ok(f.grid())
}
