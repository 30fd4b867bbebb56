//! Pseudo-spectral simulator and verification laboratory for the family of
//! one-dimensional nonlocal transport equations
//!
//! ```text
//!     B_t + a B J_x + b J B_x + mu * Lambda^alpha B = 0,      J = -Lambda B,
//! ```
//!
//! posed on the periodic interval `[-L, L]`. Here `Lambda = (-d^2/dx^2)^{1/2}`
//! is the Zygmund operator (Fourier multiplier `|k|`), `H` the periodic Hilbert
//! transform (`Lambda = H d/dx`), and `mu >= 0`, `alpha in [0, 4]` control the
//! fractional dissipation. The coefficient pairs `(a, b)` select the model:
//! `(1, 0)`, `(0, 1)` and `(0, -1)` are the quadratic interaction models studied
//! as 1D reductions of electron magnetohydrodynamics, and general `(a, b)`
//! interpolates between them.
//!
//! The crate is organised as a ladder of independently testable layers:
//!
//! * [`grid`] / [`field`] — collocation grid and band-limited fields with a
//!   fixed Fourier normalisation (coefficients of `e^{i pi k x / L}`).
//! * [`spectral`] — transforms, Fourier multipliers (`H`, `Lambda^alpha`,
//!   `d/dx`, dissipation semigroup) and the exactly de-aliased product.
//! * [`quadrature`] — slow, independent real-space discretisations of the two
//!   singular operators (principal-value cotangent kernel for `H`, periodised
//!   hypersingular kernel for `Lambda^alpha`); these act as oracles for the
//!   multiplier implementations and never feed back into the solver.
//! * [`special`] — the small set of special functions the quadrature oracles
//!   need (`Gamma`, Riemann/Hurwitz zeta), hand-rolled so the kernels have no
//!   opaque dependencies.
//! * [`lp`] — a Littlewood-Paley toolbox: smooth dyadic shells, block
//!   projections, Sobolev norms both by direct multiplier and by shell sums,
//!   commutator blocks, and empirical estimation of the constants in the
//!   product/commutator inequalities the well-posedness theory rests on.
//! * [`dynamics`] — the time integrator (integrating-factor RK4 with either a
//!   fixed step or a transport CFL step), runtime diagnostics, resolution
//!   monitoring, a rescaling-invariance check and a smoothing-rate probe.
//! * [`picard`] — the mild-solution iteration scheme whose contraction the
//!   fixed-point argument predicts, with a direct comparison to the solver.
//! * [`galerkin`] — the sharp Fourier-truncated ODE system, a weighted
//!   Lyapunov functional and its Riccati-type differential inequality.
//! * [`blowup`] — the self-steepening experiment: a compactly supported
//!   profile, max/argmax tracking, analyticity-radius fits and a finite-time
//!   singularity extrapolation, all guarded by resolution flags.
//! * [`fit`] — tiny least-squares helpers shared by the labs.
//! * [`init`] — seeded initial-data generators (deterministic per seed).
//!
//! Everything downstream of a seed is deterministic: repeated runs with the
//! same configuration produce bitwise-identical data.

pub mod blowup;
pub mod dynamics;
pub mod field;
pub mod fit;
pub mod galerkin;
pub mod grid;
pub mod init;
pub mod lp;
pub mod picard;
pub mod quadrature;
pub mod special;
pub mod spectral;

mod error;

pub use error::EmhdError;
pub use field::Field;
pub use grid::Grid;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, EmhdError>;
