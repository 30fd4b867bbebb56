//! Special functions needed by the real-space singular-kernel oracles.
//!
//! Only three are required — the Gamma function, the Riemann zeta function
//! and the Hurwitz zeta function — so they are implemented here directly:
//! Gamma by the Lanczos approximation (g = 7, 9 coefficients, ~15 correct
//! digits over the arguments we use) and both zetas by Euler-Maclaurin
//! summation with 24 explicit terms and 8 Bernoulli-number corrections,
//! which is accurate to machine precision for the real arguments the
//! kernels need (`s` of order unity, away from the pole at `s = 1`).

/// Lanczos coefficients for g = 7.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Bernoulli numbers `B_2, B_4, ..., B_16` for the Euler-Maclaurin tail.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Gamma function for real arguments (poles at non-positive integers).
pub fn gamma(z: f64) -> f64 {
    if z < 0.5 {
        // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
        std::f64::consts::PI / ((std::f64::consts::PI * z).sin() * gamma(1.0 - z))
    } else {
        let z = z - 1.0;
        let mut x = LANCZOS[0];
        for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
            x += c / (z + i as f64);
        }
        let t = z + 7.5;
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * x
    }
}

/// Hurwitz zeta `zeta(s, a) = sum_{k >= 0} (k + a)^{-s}` for `a > 0`,
/// continued in `s` past the abscissa of convergence (valid for `s > -15`,
/// `s != 1`).
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(a > 0.0, "hurwitz_zeta needs a > 0");
    debug_assert!(s != 1.0, "hurwitz_zeta pole at s = 1");
    const TERMS: usize = 24;
    let mut total = 0.0;
    for k in 0..TERMS {
        total += (k as f64 + a).powf(-s);
    }
    let edge = TERMS as f64 + a;
    total += edge.powf(1.0 - s) / (s - 1.0);
    total += 0.5 * edge.powf(-s);
    // Euler-Maclaurin corrections: B_{2j}/(2j)! * (s)_{2j-1} * edge^{-s-2j+1}.
    let mut rising = s; // (s)_1
    let mut factorial = 2.0; // (2j)! for j = 1
    let mut power = edge.powf(-s - 1.0);
    let inv_edge_sq = 1.0 / (edge * edge);
    for (j, &b) in BERNOULLI.iter().enumerate() {
        total += b / factorial * rising * power;
        let two_j = 2.0 * (j + 1) as f64;
        rising *= (s + two_j - 1.0) * (s + two_j);
        factorial *= (two_j + 1.0) * (two_j + 2.0);
        power *= inv_edge_sq;
    }
    total
}

/// Riemann zeta, `zeta(s) = hurwitz_zeta(s, 1)`.
pub fn riemann_zeta(s: f64) -> f64 {
    hurwitz_zeta(s, 1.0)
}
