//! Real periodic fields stored by their Fourier coefficients.
//!
//! A [`Field`] owns a full-length coefficient vector in FFT bin order under
//! the normalisation documented in [`crate::spectral`]. The spectral side is
//! primary — multiplier operators act directly on it — and physical samples
//! are produced on demand by the inverse transform. Constructors and the
//! forward transform keep the vector exactly Hermitian, so `samples()` always
//! returns a genuinely real signal.
//!
//! Norms: `L^2` uses Parseval (`||u||^2 = 2L sum_k |u_hat(k)|^2`), `L^1` and
//! `L^infty` use the collocation samples, and the inhomogeneous Sobolev norm
//! `H^s` uses the multiplier `(1 + kappa^2)^{s/2}`.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::spectral;
use crate::{EmhdError, Grid, Result};

/// Magic tag at the head of the binary coefficient format.
const COEFF_MAGIC: &[u8; 8] = b"EMHD1DC\0";

/// A real field on a periodic grid, stored spectrally.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Field {
    /// The zero field.
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.n()],
        }
    }

    /// Builds a field from physical samples at the grid nodes.
    pub fn from_samples(grid: Grid, samples: &[f64]) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(EmhdError::GridMismatch(format!(
                "{} samples for an n = {} grid",
                samples.len(),
                grid.n()
            )));
        }
        Ok(Self {
            grid,
            coeffs: spectral::forward(grid, samples),
        })
    }

    /// Samples a closure at the grid nodes and transforms.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let samples: Vec<f64> = (0..grid.n()).map(|j| f(grid.x(j))).collect();
        Self::from_samples(grid, &samples).expect("sample count matches grid by construction")
    }

    /// Builds a field from a full coefficient vector in FFT bin order.
    ///
    /// The vector is projected onto the Hermitian subspace so the field is
    /// exactly real; callers that need to detect asymmetry should compare
    /// against the input themselves.
    pub fn from_coeffs(grid: Grid, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n() {
            return Err(EmhdError::GridMismatch(format!(
                "{} coefficients for an n = {} grid",
                coeffs.len(),
                grid.n()
            )));
        }
        spectral::hermitian_symmetrize(&mut coeffs);
        Ok(Self { grid, coeffs })
    }

    /// Internal constructor for coefficient vectors already known Hermitian
    /// (multiplier outputs, linear combinations of Hermitian vectors).
    pub(crate) fn from_coeffs_unchecked(grid: Grid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.n());
        Self { grid, coeffs }
    }

    /// The grid this field lives on.
    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Coefficient vector in FFT bin order.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Physical samples at the grid nodes (inverse transform).
    pub fn samples(&self) -> Vec<f64> {
        spectral::inverse(self.grid, &self.coeffs)
    }

    /// Coefficient of integer wavenumber `k` (`0` outside storage range).
    pub fn coefficient(&self, k: i64) -> Complex64 {
        let n = self.grid.n() as i64;
        if k > n / 2 || k < -(n / 2) + 1 {
            return Complex64::new(0.0, 0.0);
        }
        let j = if k >= 0 { k } else { k + n } as usize;
        self.coeffs[j]
    }

    /// Sets the coefficient pair `(k, -k)` to `(v, conj(v))`.
    ///
    /// `k = 0` forces a real value; the Nyquist wavenumber is rejected since
    /// it has no partner bin.
    pub fn set_coefficient(&mut self, k: i64, v: Complex64) {
        let n = self.grid.n() as i64;
        assert!(
            k.abs() < n / 2,
            "set_coefficient: |k| = {} must be below Nyquist {}",
            k.abs(),
            n / 2
        );
        if k == 0 {
            self.coeffs[0] = Complex64::new(v.re, 0.0);
            return;
        }
        let (kp, vp) = if k > 0 { (k, v) } else { (-k, v.conj()) };
        self.coeffs[kp as usize] = vp;
        self.coeffs[(n - kp) as usize] = vp.conj();
    }

    /// Mean value `u_hat(0)`.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// `L^2` norm via Parseval: `sqrt(2L sum |u_hat|^2)`.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        (2.0 * self.grid.half_period() * sum).sqrt()
    }

    /// `L^1` norm by the trapezoid rule on the samples.
    pub fn l1_norm(&self) -> f64 {
        self.grid.dx() * self.samples().iter().map(|v| v.abs()).sum::<f64>()
    }

    /// `L^infty` norm over the collocation samples.
    pub fn linf_norm(&self) -> f64 {
        self.samples().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Inhomogeneous Sobolev norm `||u||_{H^s}` via `(1 + kappa^2)^{s/2}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let sum: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let kappa = self.grid.kappa(j);
                (1.0 + kappa * kappa).powf(s) * c.norm_sqr()
            })
            .sum();
        (2.0 * self.grid.half_period() * sum).sqrt()
    }

    /// Largest `|u_hat(k)|` over `1 <= k <= kmax` together with its argmax.
    pub fn spectral_peak(&self, kmax: i64) -> (i64, f64) {
        let mut best = (1_i64, 0.0_f64);
        for k in 1..=kmax {
            let a = self.coefficient(k).norm();
            if a > best.1 {
                best = (k, a);
            }
        }
        best
    }

    /// In-place linear update `self += scale * other` (grids must match).
    pub fn axpy(&mut self, scale: f64, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(EmhdError::GridMismatch(
                "axpy operands on different grids".into(),
            ));
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += scale * b;
        }
        Ok(())
    }

    /// Returns `self` scaled by a real factor.
    pub fn scaled(&self, factor: f64) -> Field {
        let coeffs = self.coeffs.iter().map(|c| c * factor).collect();
        Field::from_coeffs_unchecked(self.grid, coeffs)
    }

    /// Returns the difference `self - other`.
    pub fn difference(&self, other: &Field) -> Result<Field> {
        if self.grid != other.grid {
            return Err(EmhdError::GridMismatch(
                "difference operands on different grids".into(),
            ));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Field::from_coeffs_unchecked(self.grid, coeffs))
    }

    /// True when every coefficient is finite.
    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Writes physical samples as CSV with header `x,B`.
    ///
    /// Floats use the shortest round-trip decimal representation, so the
    /// output is bitwise reproducible for identical fields.
    pub fn write_samples_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "x,B")?;
        for (j, v) in self.samples().iter().enumerate() {
            writeln!(w, "{:?},{:?}", self.grid.x(j), v)?;
        }
        Ok(())
    }

    /// Writes the coefficient vector in a little-endian binary layout:
    /// magic, `n` (u64), `L` (f64), then `n` interleaved `(re, im)` pairs.
    pub fn write_coeffs_binary<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(COEFF_MAGIC)?;
        w.write_all(&(self.grid.n() as u64).to_le_bytes())?;
        w.write_all(&self.grid.half_period().to_le_bytes())?;
        for c in &self.coeffs {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a field written by [`Field::write_coeffs_binary`].
    pub fn read_coeffs_binary<R: Read>(r: &mut R) -> Result<Field> {
        let bad = |msg: &str| EmhdError::InvalidInitialData(format!("coefficient file: {msg}"));
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(|_| bad("truncated header"))?;
        if &magic != COEFF_MAGIC {
            return Err(bad("wrong magic tag"));
        }
        let mut u64buf = [0u8; 8];
        r.read_exact(&mut u64buf).map_err(|_| bad("truncated header"))?;
        let n = u64::from_le_bytes(u64buf) as usize;
        r.read_exact(&mut u64buf).map_err(|_| bad("truncated header"))?;
        let l = f64::from_le_bytes(u64buf);
        let grid = Grid::new(n, l)?;
        let mut coeffs = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut u64buf).map_err(|_| bad("truncated payload"))?;
            let re = f64::from_le_bytes(u64buf);
            r.read_exact(&mut u64buf).map_err(|_| bad("truncated payload"))?;
            let im = f64::from_le_bytes(u64buf);
            coeffs.push(Complex64::new(re, im));
        }
        Field::from_coeffs(grid, coeffs)
    }
}
