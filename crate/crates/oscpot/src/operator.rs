//! Apply the oscillatory potential and its relatives to grid functions.
//!
//! Two independent application routes:
//!
//! * [`apply_spectral`] — discrete Fourier transform, multiply by the radial
//!   symbol, transform back.  Fast; used for norm campaigns.
//! * [`apply_direct`] — literal O(N²) summation of the convolution against
//!   cell-weighted kernel samples.  Slow; it is the oracle the spectral
//!   route is validated against, and it exposes the near/far kernel split
//!   (`|y| < 1` versus `1 ≤ |y| ≤ R`).
//!
//! [`apply_g_lambda`] convolves with the oscillatory compactly supported
//! kernel `e^{iλ|y|} ψ(|y|)` used by the rescaled single-scale estimates.
//!
//! Fourier convention: forward transform `∫ f(x) e^{+i x·ξ} dx` (no
//! prefactor), inversion carries `(2π)^{-n}`.  On the lattice this reduces
//! to an unnormalized inverse DFT followed by a forward DFT scaled by the
//! node count; origin phases cancel in the round trip, so radial-multiplier
//! application never needs them.

use crate::grid::GridFunction;
use crate::symbol::{symbol_closed_form, PotentialParams, RING_EXCLUSION};
use crate::{Complex64, Error, Result};
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Hard cap on direct-path cell count (the oracle is O(N²) in cells).
pub const DIRECT_CELL_CAP: usize = 64 * 64 * 64;

/// Tolerance for the far-truncation budget of [`apply_direct`].
pub const TRUNCATION_TOL: f64 = 1e-6;

/// Which part of the kernel the direct path sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelPart {
    /// `|y| < 1` — the locally singular, absolutely integrable piece.
    Near,
    /// `1 ≤ |y| ≤ R_trunc` — the oscillatory tail piece.
    Far,
    /// Near + Far (computed literally as their sum).
    Full,
}

/// A discrete Lebesgue norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpNorm {
    pub p: f64,
    pub value: f64,
}

/// Riemann-sum norm: `(h^n Σ |f|^p)^{1/p}` for finite `p ≥ 1`, `max |f|`
/// for `p = ∞` (pass `f64::INFINITY`).
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<LpNorm> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain {
            context: "lp_norm",
            message: format!("exponent p = {p} must satisfy p >= 1 (or be infinite)"),
        });
    }
    let value = if p.is_infinite() {
        f.values().iter().map(|v| v.norm()).fold(0.0, f64::max)
    } else {
        let cell = f.spacing().powi(f.dim() as i32);
        let sum: f64 = if (p - 2.0).abs() < 1e-15 {
            f.values().iter().map(|v| v.norm_sqr()).sum()
        } else if (p - 1.0).abs() < 1e-15 {
            f.values().iter().map(|v| v.norm()).sum()
        } else {
            f.values().iter().map(|v| v.norm().powf(p)).sum()
        };
        (cell * sum).powf(1.0 / p)
    };
    Ok(LpNorm { p, value })
}

// ---------------------------------------------------------------------------
// FFT plumbing.

fn fft_axis(values: &mut [Complex64], shape: &[usize], axis: usize, direction: FftDirection) {
    let len = shape[axis];
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft(len, direction);
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let block = stride * len;
    let mut scratch = vec![Complex64::new(0.0, 0.0); len];
    for o in 0..outer {
        for s in 0..stride {
            let base = o * block + s;
            for k in 0..len {
                scratch[k] = values[base + k * stride];
            }
            fft.process(&mut scratch);
            for k in 0..len {
                values[base + k * stride] = scratch[k];
            }
        }
    }
}

fn fft_nd(values: &mut [Complex64], shape: &[usize], direction: FftDirection) {
    for axis in 0..shape.len() {
        fft_axis(values, shape, axis, direction);
    }
}

/// Signed frequency index of node `k` on an axis of `m` samples.
fn signed_freq(k: usize, m: usize) -> i64 {
    if k < m.div_ceil(2) {
        k as i64
    } else {
        k as i64 - m as i64
    }
}

/// Apply a radial Fourier multiplier: pad the grid by a factor 2 per axis
/// (suppressing wrap-around of slowly decaying kernels), transform, multiply
/// every frequency node by `mult(|ξ|)`, transform back, crop.
///
/// The multiplier is evaluated once per distinct radius (nodes share radii
/// heavily) and the evaluations run in parallel.
pub fn apply_radial_multiplier<M>(f: &GridFunction, mult: M) -> Result<GridFunction>
where
    M: Fn(f64) -> Result<Complex64> + Sync,
{
    let dim = f.dim();
    let shape = f.shape().to_vec();
    let padded: Vec<usize> = shape.iter().map(|&s| 2 * s).collect();
    let total: usize = padded.iter().product();
    let h = f.spacing();

    // Embed at the index origin of the padded array.
    let mut buf = vec![Complex64::new(0.0, 0.0); total];
    let mut idx = vec![0usize; dim];
    for flat in 0..f.len() {
        f.unravel(flat, &mut idx);
        let mut pf = 0usize;
        for d in 0..dim {
            pf = pf * padded[d] + idx[d];
        }
        buf[pf] = f.values()[flat];
    }
    fft_nd(&mut buf, &padded, FftDirection::Inverse);

    // Radii of all padded nodes, deduplicated exactly by bit pattern.
    let radii: Vec<f64> = {
        let mut r = Vec::with_capacity(total);
        let mut pidx = vec![0usize; dim];
        for flat in 0..total {
            let mut rem = flat;
            for d in (0..dim).rev() {
                pidx[d] = rem % padded[d];
                rem /= padded[d];
            }
            let mut sq = 0.0;
            for d in 0..dim {
                let xi = 2.0 * PI * signed_freq(pidx[d], padded[d]) as f64
                    / (padded[d] as f64 * h);
                sq += xi * xi;
            }
            r.push(sq.sqrt());
        }
        r
    };
    let mut unique: BTreeMap<u64, Complex64> = BTreeMap::new();
    for &r in &radii {
        unique.entry(r.to_bits()).or_insert(Complex64::new(0.0, 0.0));
    }
    let keys: Vec<u64> = unique.keys().copied().collect();
    let evals: Vec<Result<Complex64>> =
        keys.par_iter().map(|&bits| mult(f64::from_bits(bits))).collect();
    for (k, e) in keys.into_iter().zip(evals) {
        *unique.get_mut(&k).unwrap() = e?;
    }
    for (v, r) in buf.iter_mut().zip(&radii) {
        *v *= unique[&r.to_bits()];
    }

    fft_nd(&mut buf, &padded, FftDirection::Forward);
    let scale = 1.0 / total as f64;
    let mut out = GridFunction::zeros(shape.clone(), h, f.origin().to_vec())?;
    let mut oidx = vec![0usize; dim];
    for flat in 0..out.len() {
        out.unravel(flat, &mut oidx);
        let mut pf = 0usize;
        for d in 0..dim {
            pf = pf * padded[d] + oidx[d];
        }
        out.values_mut()[flat] = buf[pf] * scale;
    }
    if out.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::Quadrature {
            context: "apply_radial_multiplier",
            message: "non-finite output values".into(),
        });
    }
    Ok(out)
}

/// Apply the potential operator through the symbol: transform, multiply by
/// `m_a(|ξ|)`, transform back.
///
/// Frequency nodes landing within half a radial frequency cell of the
/// singular ring `|ξ| = 1` are evaluated at the radially offset point
/// `1 ± half-cell` (side chosen away from 1): the symbol is integrable
/// across the ring but pointwise sampling on it is undefined, and the offset
/// keeps the quadrature consistent at the grid's resolution.
pub fn apply_spectral(p: &PotentialParams, f: &GridFunction) -> Result<GridFunction> {
    if f.dim() as u32 != p.n() {
        return Err(Error::Domain {
            context: "apply_spectral",
            message: format!("grid dimension {} does not match n = {}", f.dim(), p.n()),
        });
    }
    if p.alpha().re >= (p.nf() + 1.0) / 2.0 {
        return Err(Error::Domain {
            context: "apply_spectral",
            message: format!(
                "Re alpha = {} outside the symbol domain (0, (n+1)/2)",
                p.alpha().re
            ),
        });
    }
    let nyquist = PI / f.spacing();
    if nyquist <= 2.0 {
        return Err(Error::Resolution {
            message: format!(
                "Nyquist frequency {nyquist:.3} must exceed 2 to resolve the unit ring; \
                 refine the grid spacing {}",
                f.spacing()
            ),
        });
    }
    let half_cell = f
        .shape()
        .iter()
        .map(|&s| PI / (2.0 * s as f64 * f.spacing()))
        .fold(0.0, f64::max);
    let offset = half_cell.max(RING_EXCLUSION * 1.0001);
    apply_radial_multiplier(f, |r| {
        let r_eval = if (r - 1.0).abs() < half_cell {
            if r >= 1.0 {
                1.0 + offset
            } else {
                1.0 - offset
            }
        } else {
            r
        };
        Ok(symbol_closed_form(p, r_eval)?.value)
    })
}

// ---------------------------------------------------------------------------
// Direct path.

/// `∫_0^R r^{a-1} e^{ir} dr` by the absolutely convergent power series
/// (used for the singular-cell weight; requires `R < 2` or so for fast
/// convergence, which cell sizes guarantee).
fn oscillatory_power_primitive(alpha: Complex64, upper: f64) -> Complex64 {
    let mut term = (alpha * upper.ln()).exp(); // i^k R^{a+k} / k!
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..200 {
        let kc = Complex64::new(k as f64, 0.0);
        let contrib = term / (alpha + kc);
        sum += contrib;
        if contrib.norm() < 1e-18 * sum.norm() + 1e-300 {
            break;
        }
        term *= Complex64::new(0.0, upper) / (k as f64 + 1.0);
    }
    sum
}

/// Exact-volume weight of the cell containing `y = 0`, where the kernel
/// `|y|^{a-n}` is singular but integrable: in 2-D the square cell is
/// integrated in polar coordinates using its 8-fold symmetry; in 3-D the
/// cell is replaced by the equal-volume ball (radius `h·(3/(4π))^{1/3}`).
fn zero_cell_weight(p: &PotentialParams, h: f64) -> Result<Complex64> {
    let a = p.alpha();
    match p.n() {
        2 => {
            let inner = |theta: f64| oscillatory_power_primitive(a, h / (2.0 * theta.cos()));
            let integral = crate::quad::integrate(inner, 0.0, PI / 4.0, 1e-13, 1e-13, 200)?;
            Ok(8.0 * integral)
        }
        3 => {
            let r_eq = h * (3.0 / (4.0 * PI)).powf(1.0 / 3.0);
            Ok(4.0 * PI * oscillatory_power_primitive(a, r_eq))
        }
        n => Err(Error::Domain {
            context: "apply_direct",
            message: format!("direct path supports n = 2 or 3, got {n}"),
        }),
    }
}

/// Kernel value `e^{ir} r^{a-n}` at radius `r > 0`.
fn kernel_value(a: Complex64, n: f64, r: f64) -> Complex64 {
    ((a - n) * r.ln() + Complex64::new(0.0, r)).exp()
}

/// Adaptive tensor quadrature of a radial integrand over the cube cell
/// centered at `c` with side `h` (first `dim` axes).
fn cell_integral<G>(g: &G, c: &[f64; 3], dim: usize, h: f64) -> Result<Complex64>
where
    G: Fn(f64) -> Complex64,
{
    let lo = |d: usize| c[d] - h / 2.0;
    let hi = |d: usize| c[d] + h / 2.0;
    let radius = |y: &[f64; 3]| (y[..dim].iter().map(|v| v * v).sum::<f64>()).sqrt();
    let tol = 1e-11;
    match dim {
        1 => crate::quad::integrate(|y0| g(radius(&[y0, 0.0, 0.0])), lo(0), hi(0), tol, tol, 64),
        2 => {
            let failed = std::cell::Cell::new(false);
            let outer = crate::quad::integrate(
                |y0| {
                    crate::quad::integrate(
                        |y1| g(radius(&[y0, y1, 0.0])),
                        lo(1),
                        hi(1),
                        tol,
                        tol,
                        64,
                    )
                    .unwrap_or_else(|_| {
                        failed.set(true);
                        Complex64::new(0.0, 0.0)
                    })
                },
                lo(0),
                hi(0),
                tol,
                tol,
                64,
            )?;
            if failed.get() {
                Err(Error::Quadrature {
                    context: "cell_integral",
                    message: "inner cell quadrature did not converge".into(),
                })
            } else {
                Ok(outer)
            }
        }
        _ => {
            let failed = std::cell::Cell::new(false);
            let outer = crate::quad::integrate(
                |y0| {
                    crate::quad::integrate(
                        |y1| {
                            crate::quad::integrate(
                                |y2| g(radius(&[y0, y1, y2])),
                                lo(2),
                                hi(2),
                                tol,
                                tol,
                                32,
                            )
                            .unwrap_or_else(|_| {
                                failed.set(true);
                                Complex64::new(0.0, 0.0)
                            })
                        },
                        lo(1),
                        hi(1),
                        tol,
                        tol,
                        32,
                    )
                    .unwrap_or_else(|_| {
                        failed.set(true);
                        Complex64::new(0.0, 0.0)
                    })
                },
                lo(0),
                hi(0),
                tol,
                tol,
                32,
            )?;
            if failed.get() {
                Err(Error::Quadrature {
                    context: "cell_integral",
                    message: "inner cell quadrature did not converge".into(),
                })
            } else {
                Ok(outer)
            }
        }
    }
}

/// Exact kernel integral over the cell centered at `c` (a nonzero offset).
fn offcenter_cell_weight(p: &PotentialParams, c: &[f64; 3], dim: usize, h: f64) -> Result<Complex64> {
    cell_integral(&|r| kernel_value(p.alpha(), p.nf(), r), c, dim, h)
}

/// Offset-indexed kernel weight table for one part of the kernel split.
struct WeightTable {
    dims: [usize; 3],
    weights: Vec<Complex64>,
}

/// Build the offset weight table for one kernel part.
///
/// Each cell's raw weight is the exact integral of the kernel over the
/// cell (the singular cell by its polar scheme).  Cell averaging is a
/// convolution with the cell box, which multiplies the implied symbol by
/// `∏ sinc(ξ_d h/2) ≈ 1 − |ξ|²h²/24`; the five-point discrete Laplacian
/// correction `w = a − (h²/24)Δ_h a` multiplies it back by
/// `1 + Σ sin²(ξ_d h/2)/6`, cancelling the deficit to fourth order in `ξh`.
/// The correction's symbol is lattice-periodic, so unlike a continuum
/// Laplacian correction it does not amplify alias images.
fn build_weight_table(
    p: &PotentialParams,
    f: &GridFunction,
    part: KernelPart,
    r_trunc: f64,
) -> Result<WeightTable> {
    let dim = f.dim();
    let h = f.spacing();
    // Raw cell integrals on a table with one margin ring for the stencil.
    let mut adims = [1usize; 3];
    for d in 0..dim {
        adims[d] = 2 * f.shape()[d] + 1;
    }
    let atotal = adims[0] * adims[1] * adims[2];
    let acenters: Vec<i64> = (0..dim).map(|d| f.shape()[d] as i64).collect();
    let offset_of = |flat: usize, dims: &[usize; 3], centers: &[i64]| -> [i64; 3] {
        let mut rem = flat;
        let mut k = [0i64; 3];
        for d in (0..dim).rev() {
            k[d] = (rem % dims[d]) as i64 - centers[d];
            rem /= dims[d];
        }
        k
    };
    // The kernel is radial and cells are cubes, so the raw weight depends
    // only on the multiset of |offset| components: one representative per
    // class, computed in parallel.  Descending order keeps the padding
    // zeros of unused axes at the end, so the representative center stays
    // within the active dimensions.
    let class_of = |k: &[i64; 3]| -> [i64; 3] {
        let mut s = [k[0].abs(), k[1].abs(), k[2].abs()];
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    };
    let mut classes: BTreeMap<[i64; 3], Complex64> = BTreeMap::new();
    for flat in 0..atotal {
        let k = offset_of(flat, &adims, &acenters);
        if k.iter().any(|&v| v != 0) {
            classes.entry(class_of(&k)).or_insert(Complex64::new(0.0, 0.0));
        }
    }
    let keys: Vec<[i64; 3]> = classes.keys().copied().collect();
    let evals: Vec<Result<Complex64>> = keys
        .par_iter()
        .map(|k| {
            let c = [k[0] as f64 * h, k[1] as f64 * h, k[2] as f64 * h];
            offcenter_cell_weight(p, &c, dim, h)
        })
        .collect();
    for (k, e) in keys.into_iter().zip(evals) {
        *classes.get_mut(&k).unwrap() = e?;
    }
    let zero_raw = zero_cell_weight(p, h)?;
    let raw = |k: &[i64; 3]| -> Complex64 {
        if k.iter().all(|&v| v == 0) {
            zero_raw
        } else {
            classes[&class_of(k)]
        }
    };

    // Corrected table on the grid's own offset range, masked by part.
    let mut dims = [1usize; 3];
    for d in 0..dim {
        dims[d] = 2 * f.shape()[d] - 1;
    }
    let total = dims[0] * dims[1] * dims[2];
    let centers: Vec<i64> = (0..dim).map(|d| f.shape()[d] as i64 - 1).collect();
    let mut weights = vec![Complex64::new(0.0, 0.0); total];
    for (flat, w) in weights.iter_mut().enumerate() {
        let k = offset_of(flat, &dims, &centers);
        let sq: i64 = k.iter().map(|v| v * v).sum();
        let r = (sq as f64).sqrt() * h;
        let near = r < 1.0;
        let keep = match part {
            KernelPart::Near => near,
            KernelPart::Far => !near && r <= r_trunc,
            KernelPart::Full => unreachable!("Full is assembled from Near + Far"),
        };
        if !keep {
            continue;
        }
        let center = raw(&k);
        let mut stencil = Complex64::new(0.0, 0.0);
        for d in 0..dim {
            let mut up = k;
            up[d] += 1;
            let mut dn = k;
            dn[d] -= 1;
            stencil += raw(&up) + raw(&dn) - 2.0 * center;
        }
        // (h²/24)·Δ_h with Δ_h = stencil/h²: the h² factors cancel.
        *w = center - stencil / 24.0;
    }
    Ok(WeightTable { dims, weights })
}

fn convolve_table(f: &GridFunction, table: &WeightTable) -> GridFunction {
    let dim = f.dim();
    let mut s = [1usize; 3];
    for d in 0..dim {
        s[d] = f.shape()[d];
    }
    let (t1, t2) = (table.dims[1], table.dims[2]);
    let values = f.values();
    let out: Vec<Complex64> = (0..f.len())
        .into_par_iter()
        .map(|flat_i| {
            let i2 = flat_i % s[2];
            let i1 = (flat_i / s[2]) % s[1];
            let i0 = flat_i / (s[1] * s[2]);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut flat_j = 0usize;
            for j0 in 0..s[0] {
                let o0 = (i0 + s[0] - 1 - j0) * t1;
                for j1 in 0..s[1] {
                    let o1 = (o0 + i1 + s[1] - 1 - j1) * t2;
                    for j2 in 0..s[2] {
                        let w = table.weights[o1 + i2 + s[2] - 1 - j2];
                        acc += w * values[flat_j];
                        flat_j += 1;
                    }
                }
            }
            acc
        })
        .collect();
    let mut g = GridFunction::zeros(f.shape().to_vec(), f.spacing(), f.origin().to_vec())
        .expect("same-shape grid");
    g.values_mut().copy_from_slice(&out);
    g
}

/// Direct summation of the convolution with `e^{i|y|} |y|^{a-n}`, restricted
/// to the requested kernel part.  `Full` is assembled literally as
/// `Near + Far`, so the splitting identity holds bitwise.
///
/// `R_trunc` must reach the grid extent for `Far`/`Full`; offsets beyond
/// `R_trunc` that the grid could still represent are charged against a
/// truncation budget (`max|f|` times the omitted kernel mass), and exceeding
/// [`TRUNCATION_TOL`] is an error.
pub fn apply_direct(
    p: &PotentialParams,
    f: &GridFunction,
    part: KernelPart,
    r_trunc: f64,
) -> Result<GridFunction> {
    if f.dim() as u32 != p.n() {
        return Err(Error::Domain {
            context: "apply_direct",
            message: format!("grid dimension {} does not match n = {}", f.dim(), p.n()),
        });
    }
    if f.len() > DIRECT_CELL_CAP {
        return Err(Error::Resolution {
            message: format!(
                "direct path capped at {DIRECT_CELL_CAP} cells, grid has {}",
                f.len()
            ),
        });
    }
    if part != KernelPart::Near {
        if !(r_trunc >= f.max_extent()) {
            return Err(Error::Domain {
                context: "apply_direct",
                message: format!(
                    "R_trunc = {r_trunc} must reach the grid extent {}",
                    f.max_extent()
                ),
            });
        }
        let diag = f.diagonal_extent();
        if diag > r_trunc {
            // Kernel mass on representable offsets beyond the truncation
            // radius, bounded by the cell count in the omitted shell times
            // the kernel's largest modulus there.
            let h = f.spacing();
            let cell = h.powi(f.dim() as i32);
            let shell_cells = ((diag - r_trunc) / h).ceil()
                * (2.0 * diag / h).powi(f.dim() as i32 - 1);
            let max_f = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
            let budget =
                max_f * r_trunc.powf(p.alpha().re - p.nf()) * shell_cells * cell;
            if budget > TRUNCATION_TOL {
                return Err(Error::TruncationBudget {
                    message: format!(
                        "omitted-tail bound {budget:.3e} beyond R_trunc = {r_trunc} exceeds \
                         {TRUNCATION_TOL:.0e}; raise R_trunc to the grid diagonal {diag:.3}"
                    ),
                });
            }
        }
    }
    match part {
        KernelPart::Full => {
            let near = apply_direct(p, f, KernelPart::Near, r_trunc)?;
            let far = apply_direct(p, f, KernelPart::Far, r_trunc)?;
            let mut out = near;
            for (o, fv) in out.values_mut().iter_mut().zip(far.values()) {
                *o += fv;
            }
            Ok(out)
        }
        _ => {
            let table = build_weight_table(p, f, part, r_trunc)?;
            Ok(convolve_table(f, &table))
        }
    }
}

/// Convolve with the compactly supported oscillatory kernel
/// `e^{iλ|y|} ψ(|y|)` (the single-scale model operator).  The grid must
/// resolve the wavelength `2π/λ` with at least 4 cells.
pub fn apply_g_lambda<F>(lambda: f64, psi_profile: F, f: &GridFunction) -> Result<GridFunction>
where
    F: Fn(f64) -> f64,
{
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain {
            context: "apply_g_lambda",
            message: format!("lambda = {lambda} must be positive"),
        });
    }
    let h = f.spacing();
    if h > PI / (2.0 * lambda) {
        return Err(Error::Resolution {
            message: format!(
                "spacing {h} too coarse for wavelength {:.4} (need ≥ 4 cells per wavelength)",
                2.0 * PI / lambda
            ),
        });
    }
    let dim = f.dim();
    let mut s = [1usize; 3];
    for d in 0..dim {
        s[d] = f.shape()[d];
    }
    let cell = h.powi(dim as i32);
    // Sparse offset list over the kernel's support.
    let mut offsets: Vec<([i64; 3], Complex64)> = Vec::new();
    let ranges: Vec<i64> = (0..3)
        .map(|d| if d < dim { s[d] as i64 - 1 } else { 0 })
        .collect();
    for k0 in -ranges[0]..=ranges[0] {
        for k1 in -ranges[1]..=ranges[1] {
            for k2 in -ranges[2]..=ranges[2] {
                let r = ((k0 * k0 + k1 * k1 + k2 * k2) as f64).sqrt() * h;
                let psi = psi_profile(r);
                if psi != 0.0 {
                    let w = Complex64::new(0.0, lambda * r).exp() * psi * cell;
                    offsets.push(([k0, k1, k2], w));
                }
            }
        }
    }
    let values = f.values();
    let out: Vec<Complex64> = (0..f.len())
        .into_par_iter()
        .map(|flat_i| {
            let i = [
                (flat_i / (s[1] * s[2])) as i64,
                ((flat_i / s[2]) % s[1]) as i64,
                (flat_i % s[2]) as i64,
            ];
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, w) in &offsets {
                let j = [i[0] - k[0], i[1] - k[1], i[2] - k[2]];
                if (0..3).any(|d| j[d] < 0 || j[d] >= s[d] as i64) {
                    continue;
                }
                let flat_j = (j[0] as usize * s[1] + j[1] as usize) * s[2] + j[2] as usize;
                acc += *w * values[flat_j];
            }
            acc
        })
        .collect();
    let mut g = GridFunction::zeros(f.shape().to_vec(), h, f.origin().to_vec())?;
    g.values_mut().copy_from_slice(&out);
    Ok(g)
}
