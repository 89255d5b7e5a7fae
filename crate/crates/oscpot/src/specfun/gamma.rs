//! Complex gamma and digamma.
//!
//! Both functions use the same three-step scheme:
//!
//! 1. reflection `z ↦ 1 - z` for `Re z < 1/2`,
//! 2. upward recurrence until `|z|` is large enough,
//! 3. Stirling's asymptotic series with Bernoulli-number coefficients.
//!
//! With the shift threshold at `|z| ≥ 12` and ten Bernoulli terms the series
//! truncation error sits below 1e-15 relative throughout the validated strip
//! `|Re z| ≤ 20`, `|Im z| ≤ 50`; cross-checks against the integral definition
//! live in the tests.

use crate::{Complex64, Error, Result};
use std::f64::consts::PI;

/// `B_{2k} / (2k (2k-1))` for the Stirling series of `ln Γ`.
const LANCZOS_FREE_LNGAMMA: [f64; 10] = [
    8.333333333333333e-2,    // 1/12
    -2.777777777777778e-3,   // -1/360
    7.936507936507937e-4,    // 1/1260
    -5.952380952380952e-4,   // -1/1680
    8.417508417508418e-4,    // 1/1188
    -1.917526917526918e-3,   // -691/360360
    6.410256410256410e-3,    // 1/156
    -2.955065359477124e-2,   // -3617/122400
    1.796443723688306e-1,    // 43867/244188
    -1.392432216905901e0,    // -174611/125400
];

/// `B_{2k} / (2k)` for the Stirling series of `ψ`.
const DIGAMMA_TAIL: [f64; 8] = [
    8.333333333333333e-2,  // 1/12
    -8.333333333333333e-3, // -1/120
    3.968253968253968e-3,  // 1/252
    -4.166666666666667e-3, // -1/240
    7.575757575757576e-3,  // 1/132
    -2.109279609279609e-2, // -691/32760
    8.333333333333333e-2,  // 1/12
    -4.432598039215686e-1, // -3617/8160
];

const SHIFT_RADIUS: f64 = 12.0;

/// True when `z` sits (to rounding) on a pole of `Γ`: a non-positive integer.
pub fn is_gamma_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.5 && (z.re - z.re.round()).abs() < 1e-14 && z.re.round() <= 0.0
}

/// `ln Γ(z)` by Stirling's series, valid for `|z| ≥ SHIFT_RADIUS`, `Re z > 0`.
fn ln_gamma_stirling(z: Complex64) -> Complex64 {
    let ln_z = z.ln();
    let mut s = (z - 0.5) * ln_z - z + 0.5 * (2.0 * PI).ln();
    let z2 = (z * z).inv();
    let mut zp = z.inv();
    for &coeff in LANCZOS_FREE_LNGAMMA.iter() {
        s += coeff * zp;
        zp *= z2;
    }
    s
}

/// Complex gamma function.
///
/// Errors with [`Error::GammaPole`] at non-positive integers.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if is_gamma_pole(z) {
        return Err(Error::GammaPole { z });
    }
    Ok(gamma_unchecked(z))
}

fn gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Reflection: Γ(z) Γ(1-z) = π / sin(πz).
        let s = (PI * z).sin();
        return PI / (s * gamma_unchecked(Complex64::new(1.0, 0.0) - z));
    }
    let mut w = z;
    let mut denom = Complex64::new(1.0, 0.0);
    while w.norm() < SHIFT_RADIUS {
        denom *= w;
        w += 1.0;
    }
    ln_gamma_stirling(w).exp() / denom
}

/// Reciprocal gamma `1/Γ(z)` — entire; returns exactly 0 at poles of `Γ`.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    if is_gamma_pole(z) {
        return Complex64::new(0.0, 0.0);
    }
    gamma_unchecked(z).inv()
}

/// Real-argument gamma, for convenience in radial formulas.
pub fn gamma_real(x: f64) -> Result<f64> {
    gamma(Complex64::new(x, 0.0)).map(|v| v.re)
}

/// Complex digamma `ψ(z) = Γ'(z)/Γ(z)`.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    if is_gamma_pole(z) {
        return Err(Error::GammaPole { z });
    }
    Ok(digamma_unchecked(z))
}

fn digamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // ψ(z) = ψ(1-z) - π cot(πz)
        let piz = PI * z;
        return digamma_unchecked(Complex64::new(1.0, 0.0) - z) - PI * piz.cos() / piz.sin();
    }
    let mut w = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while w.norm() < SHIFT_RADIUS {
        acc -= w.inv();
        w += 1.0;
    }
    let mut s = w.ln() - 0.5 * w.inv();
    let z2 = (w * w).inv();
    let mut zp = z2;
    for &coeff in DIGAMMA_TAIL.iter() {
        s -= coeff * zp;
        zp *= z2;
    }
    acc + s
}

/// Rising factorial `(x)_k = x (x+1) ⋯ (x+k-1)`.
pub fn pochhammer(x: Complex64, k: usize) -> Complex64 {
    let mut p = Complex64::new(1.0, 0.0);
    for j in 0..k {
        p *= x + j as f64;
    }
    p
}
