//! Uniform collocation grid on the periodic interval `[-L, L]`.
//!
//! Physical nodes are `x_j = -L + j * dx` for `j = 0..n` with `dx = 2L / n`,
//! so the left endpoint is a node and `x = +L` is identified with `x = -L`.
//! Spectral storage follows FFT bin order: bin `j` holds the coefficient of
//! the integer wavenumber `k(j) = j` for `j < n/2` and `k(j) = j - n`
//! otherwise (bin `n/2` is the unpaired Nyquist mode). The physical
//! wavenumber of bin `j` is `kappa(j) = pi * k(j) / L`, so for the default
//! half-period `L = pi` the integer label and the physical wavenumber agree.

use crate::{EmhdError, Result};

/// Parameters of a periodic collocation grid.
///
/// `Grid` is a small value type: methods compute nodes and wavenumbers on the
/// fly instead of caching vectors, which keeps fields cheap to clone and grids
/// trivially comparable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    l: f64,
}

impl Grid {
    /// Creates a grid with `n` nodes on `[-L, L]`.
    ///
    /// `n` must be a power of two with `n >= 8` (the de-aliasing rule and the
    /// shell decompositions assume this), and `l` must be positive and finite.
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(EmhdError::InvalidGrid(format!(
                "n = {n} must be a power of two with n >= 8"
            )));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(EmhdError::InvalidGrid(format!("L = {l} must be positive")));
        }
        Ok(Self { n, l })
    }

    /// Grid with the default half-period `L = pi`.
    pub fn with_default_length(n: usize) -> Result<Self> {
        Self::new(n, std::f64::consts::PI)
    }

    /// Number of collocation nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Half-period `L`; the domain is `[-L, L]` with length `2L`.
    pub fn half_period(&self) -> f64 {
        self.l
    }

    /// Node spacing `dx = 2L / n`.
    pub fn dx(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    /// Physical coordinate of node `j`.
    pub fn x(&self, j: usize) -> f64 {
        -self.l + self.dx() * j as f64
    }

    /// Integer wavenumber stored in FFT bin `j` (Nyquist bin maps to `+n/2`).
    pub fn k_int(&self, j: usize) -> i64 {
        debug_assert!(j < self.n);
        if j <= self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Physical wavenumber `kappa = pi * k / L` of FFT bin `j`.
    pub fn kappa(&self, j: usize) -> f64 {
        std::f64::consts::PI * self.k_int(j) as f64 / self.l
    }

    /// Index of the unpaired Nyquist bin, `n / 2`.
    pub fn nyquist_bin(&self) -> usize {
        self.n / 2
    }

    /// Largest wavenumber kept by the alias-free product rule, `floor(n/3)`.
    ///
    /// For power-of-two `n` this satisfies `2K <= n - K - 1`, so the product
    /// of two fields supported in `|k| <= K` is represented exactly on the
    /// grid with no aliased images inside the retained band.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(0, 1.0).is_err());
        assert!(Grid::new(6, 1.0).is_err());
        assert!(Grid::new(100, 1.0).is_err());
        assert!(Grid::new(4, 1.0).is_err());
        assert!(Grid::new(8, 0.0).is_err());
        assert!(Grid::new(8, -1.0).is_err());
        assert!(Grid::new(8, f64::NAN).is_err());
        assert!(Grid::new(8, 1.0).is_ok());
    }

    #[test]
    fn nodes_cover_half_open_interval() {
        let g = Grid::with_default_length(16).unwrap();
        assert_eq!(g.x(0), -std::f64::consts::PI);
        let last = g.x(15);
        assert!(last < std::f64::consts::PI);
        assert!((g.x(8)).abs() < 1e-15); // midpoint node sits at the origin
    }

    #[test]
    fn wavenumbers_follow_fft_order() {
        let g = Grid::new(8, std::f64::consts::PI).unwrap();
        let ks: Vec<i64> = (0..8).map(|j| g.k_int(j)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        // L = pi means kappa equals the integer label.
        assert!((g.kappa(3) - 3.0).abs() < 1e-15);
        assert!((g.kappa(5) + 3.0).abs() < 1e-15);
    }

    #[test]
    fn dealias_cutoff_is_alias_free() {
        for &n in &[8usize, 16, 64, 256, 1024, 4096] {
            let g = Grid::new(n, 1.0).unwrap();
            let k = g.dealias_cutoff();
            // Aliased image of the largest product mode 2K is 2K - n, which
            // must land strictly outside the retained band.
            assert!(2 * k <= n as i64 - k - 1, "n = {n} violates the rule");
        }
    }
}
