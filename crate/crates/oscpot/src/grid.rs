//! Sampled complex-valued functions on uniform grids, with binary and JSON
//! serialization.
//!
//! A [`GridFunction`] is a row-major complex array over a `dim`-dimensional
//! rectangular lattice (`1 ≤ dim ≤ 3`) with uniform spacing `h` and a real
//! per-axis origin: sample `j` of axis `d` sits at `origin[d] + j·h`.  These
//! carry the test functions that the operator module convolves and the norm
//! estimates that the probe campaigns fit.

use crate::{Complex64, Error, Result};
use serde::{Deserialize, Serialize};

/// A complex function sampled on a uniform rectangular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    dim: usize,
    shape: Vec<usize>,
    spacing: f64,
    origin: Vec<f64>,
    values: Vec<Complex64>,
}

impl GridFunction {
    /// Validates `1 ≤ dim ≤ 3`, at least 4 samples per axis, positive
    /// spacing, and finite data of the right length.
    pub fn new(
        shape: Vec<usize>,
        spacing: f64,
        origin: Vec<f64>,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        let dim = shape.len();
        if !(1..=3).contains(&dim) {
            return Err(Error::Domain {
                context: "GridFunction",
                message: format!("dimension {dim} out of the supported range 1..=3"),
            });
        }
        if shape.iter().any(|&s| s < 4) {
            return Err(Error::Domain {
                context: "GridFunction",
                message: format!("every axis needs at least 4 samples, got {shape:?}"),
            });
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::Domain {
                context: "GridFunction",
                message: format!("spacing {spacing} must be positive and finite"),
            });
        }
        if origin.len() != dim || origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::Domain {
                context: "GridFunction",
                message: format!("origin {origin:?} must be {dim} finite values"),
            });
        }
        let expected: usize = shape.iter().product();
        if values.len() != expected {
            return Err(Error::Domain {
                context: "GridFunction",
                message: format!("value count {} does not match shape {shape:?}", values.len()),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain {
                context: "GridFunction",
                message: "values must all be finite".into(),
            });
        }
        Ok(GridFunction { dim, shape, spacing, origin, values })
    }

    /// Zero-filled grid.
    pub fn zeros(shape: Vec<usize>, spacing: f64, origin: Vec<f64>) -> Result<Self> {
        let count = shape.iter().product();
        GridFunction::new(shape, spacing, origin, vec![Complex64::new(0.0, 0.0); count])
    }

    /// Sample a closure of the physical coordinates.
    pub fn from_fn<F: Fn(&[f64]) -> Complex64>(
        shape: Vec<usize>,
        spacing: f64,
        origin: Vec<f64>,
        f: F,
    ) -> Result<Self> {
        let mut grid = GridFunction::zeros(shape, spacing, origin)?;
        let mut coords = vec![0.0; grid.dim];
        let shape = grid.shape.clone();
        let mut idx = vec![0usize; grid.dim];
        for flat in 0..grid.values.len() {
            grid.unravel(flat, &mut idx);
            for d in 0..grid.dim {
                coords[d] = grid.origin[d] + idx[d] as f64 * grid.spacing;
            }
            grid.values[flat] = f(&coords);
        }
        debug_assert_eq!(shape, grid.shape);
        grid.assert_finite()?;
        Ok(grid)
    }

    fn assert_finite(&self) -> Result<()> {
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain {
                context: "GridFunction",
                message: "sampled values must all be finite".into(),
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Row-major flat index of a multi-index.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for d in 0..self.dim {
            flat = flat * self.shape[d] + idx[d];
        }
        flat
    }

    /// Multi-index of a row-major flat index (written into `idx`).
    pub fn unravel(&self, mut flat: usize, idx: &mut [usize]) {
        for d in (0..self.dim).rev() {
            idx[d] = flat % self.shape[d];
            flat /= self.shape[d];
        }
    }

    /// Physical coordinates of a multi-index.
    pub fn point(&self, idx: &[usize]) -> Vec<f64> {
        (0..self.dim).map(|d| self.origin[d] + idx[d] as f64 * self.spacing).collect()
    }

    /// Largest per-axis physical extent `shape·h`.
    pub fn max_extent(&self) -> f64 {
        self.shape.iter().map(|&s| s as f64 * self.spacing).fold(0.0, f64::max)
    }

    /// Length of the longest representable offset between two samples.
    pub fn diagonal_extent(&self) -> f64 {
        self.shape
            .iter()
            .map(|&s| {
                let e = (s - 1) as f64 * self.spacing;
                e * e
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Pointwise multiply by `e^{i θ·x}`.
    pub fn modulate(&mut self, theta: &[f64]) {
        assert_eq!(theta.len(), self.dim, "modulation frequency dimension mismatch");
        let mut idx = vec![0usize; self.dim];
        for flat in 0..self.values.len() {
            self.unravel(flat, &mut idx);
            let mut phase = 0.0;
            for d in 0..self.dim {
                phase += theta[d] * (self.origin[d] + idx[d] as f64 * self.spacing);
            }
            self.values[flat] *= Complex64::new(0.0, phase).exp();
        }
    }

    // -- serialization ------------------------------------------------------

    /// Flat little-endian binary layout: `dim` (u64), `shape` (dim × u64),
    /// `spacing` (f64), `origin` (dim × f64), then interleaved re/im f64
    /// pairs in row-major order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out =
            Vec::with_capacity(8 * (2 + 2 * self.dim) + 16 * self.values.len());
        out.extend_from_slice(&(self.dim as u64).to_le_bytes());
        for &s in &self.shape {
            out.extend_from_slice(&(s as u64).to_le_bytes());
        }
        out.extend_from_slice(&self.spacing.to_le_bytes());
        for &o in &self.origin {
            out.extend_from_slice(&o.to_le_bytes());
        }
        for v in &self.values {
            out.extend_from_slice(&v.re.to_le_bytes());
            out.extend_from_slice(&v.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |message: String| Error::Serialization { message };
        let mut pos = 0usize;
        let mut take = |n: usize| -> Result<&[u8]> {
            if pos + n > bytes.len() {
                return Err(bad(format!(
                    "grid binary truncated at byte {pos} (need {n} more of {})",
                    bytes.len()
                )));
            }
            let slice = &bytes[pos..pos + n];
            pos += n;
            Ok(slice)
        };
        let read_u64 =
            |b: &[u8]| u64::from_le_bytes(b.try_into().expect("8-byte slice"));
        let read_f64 =
            |b: &[u8]| f64::from_le_bytes(b.try_into().expect("8-byte slice"));
        let dim = read_u64(take(8)?) as usize;
        if !(1..=3).contains(&dim) {
            return Err(bad(format!("grid binary declares dimension {dim}")));
        }
        let mut shape = Vec::with_capacity(dim);
        for _ in 0..dim {
            shape.push(read_u64(take(8)?) as usize);
        }
        let spacing = read_f64(take(8)?);
        let mut origin = Vec::with_capacity(dim);
        for _ in 0..dim {
            origin.push(read_f64(take(8)?));
        }
        let count: usize = shape.iter().product();
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            let re = read_f64(take(8)?);
            let im = read_f64(take(8)?);
            values.push(Complex64::new(re, im));
        }
        if pos != bytes.len() {
            return Err(bad(format!(
                "grid binary has {} trailing bytes",
                bytes.len() - pos
            )));
        }
        GridFunction::new(shape, spacing, origin, values)
    }

    /// JSON form (for small grids): values as `[re, im]` pairs.
    pub fn to_json(&self) -> Result<String> {
        let mirror = GridJson {
            dim: self.dim,
            shape: self.shape.clone(),
            spacing: self.spacing,
            origin: self.origin.clone(),
            values: self.values.iter().map(|v| [v.re, v.im]).collect(),
        };
        serde_json::to_string(&mirror)
            .map_err(|e| Error::Serialization { message: format!("grid json: {e}") })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mirror: GridJson = serde_json::from_str(text)
            .map_err(|e| Error::Serialization { message: format!("grid json: {e}") })?;
        if mirror.dim != mirror.shape.len() {
            return Err(Error::Serialization {
                message: format!(
                    "grid json dim {} does not match shape {:?}",
                    mirror.dim, mirror.shape
                ),
            });
        }
        GridFunction::new(
            mirror.shape,
            mirror.spacing,
            mirror.origin,
            mirror.values.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct GridJson {
    dim: usize,
    shape: Vec<usize>,
    spacing: f64,
    origin: Vec<f64>,
    values: Vec<[f64; 2]>,
}

/// Centered Gaussian `exp(-|x - center|² / (2σ²))`.
pub fn gaussian(
    shape: Vec<usize>,
    spacing: f64,
    origin: Vec<f64>,
    center: &[f64],
    sigma: f64,
) -> Result<GridFunction> {
    let c = center.to_vec();
    GridFunction::from_fn(shape, spacing, origin, move |x| {
        let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
        Complex64::new((-r2 / (2.0 * sigma * sigma)).exp(), 0.0)
    })
}

/// Indicator of the ball `|x - center| ≤ radius`, with boundary cells
/// weighted by sub-sampled coverage (4 sub-samples per axis) so the
/// discretization error of norms drops from O(h) to roughly O(h²).
pub fn ball_indicator(
    shape: Vec<usize>,
    spacing: f64,
    origin: Vec<f64>,
    center: &[f64],
    radius: f64,
) -> Result<GridFunction> {
    let c = center.to_vec();
    let dim = shape.len();
    const SUB: usize = 4;
    let offsets: Vec<f64> =
        (0..SUB).map(|k| ((k as f64 + 0.5) / SUB as f64 - 0.5) * spacing).collect();
    GridFunction::from_fn(shape, spacing, origin, move |x| {
        let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
        let margin = (dim as f64).sqrt() * spacing;
        let r = r2.sqrt();
        if r <= radius - margin {
            return Complex64::new(1.0, 0.0);
        }
        if r >= radius + margin {
            return Complex64::new(0.0, 0.0);
        }
        // Boundary cell: fraction of sub-samples inside.
        let mut hits = 0usize;
        let total = SUB.pow(dim as u32);
        let mut sub = vec![0usize; dim];
        for flat in 0..total {
            let mut rem = flat;
            for s in sub.iter_mut() {
                *s = rem % SUB;
                rem /= SUB;
            }
            let rr2: f64 = (0..dim)
                .map(|d| {
                    let v = x[d] + offsets[sub[d]] - c[d];
                    v * v
                })
                .sum();
            if rr2 <= radius * radius {
                hits += 1;
            }
        }
        Complex64::new(hits as f64 / total as f64, 0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_validation() {
        assert!(GridFunction::zeros(vec![4, 4], 0.5, vec![0.0, 0.0]).is_ok());
        assert!(GridFunction::zeros(vec![3, 4], 0.5, vec![0.0, 0.0]).is_err());
        assert!(GridFunction::zeros(vec![4, 4, 4, 4], 0.5, vec![0.0; 4]).is_err());
        assert!(GridFunction::zeros(vec![4, 4], -1.0, vec![0.0, 0.0]).is_err());
        assert!(GridFunction::zeros(vec![4, 4], 0.5, vec![0.0]).is_err());
        assert!(GridFunction::new(
            vec![4],
            1.0,
            vec![0.0],
            vec![Complex64::new(f64::NAN, 0.0); 4]
        )
        .is_err());
    }

    #[test]
    fn indexing_round_trip_and_points() {
        let g = GridFunction::zeros(vec![4, 6, 5], 0.25, vec![-1.0, 0.0, 2.0]).unwrap();
        let mut idx = vec![0; 3];
        for flat in 0..g.len() {
            g.unravel(flat, &mut idx);
            assert_eq!(g.flat_index(&idx), flat);
        }
        assert_eq!(g.point(&[2, 0, 4]), vec![-0.5, 0.0, 3.0]);
    }

    #[test]
    fn sampling_places_values_at_coordinates() {
        let g = GridFunction::from_fn(vec![4, 4], 0.5, vec![1.0, -1.0], |x| {
            Complex64::new(x[0], x[1])
        })
        .unwrap();
        let v = g.values()[g.flat_index(&[3, 1])];
        assert_eq!(v, Complex64::new(2.5, -0.5));
    }

    #[test]
    fn binary_round_trip_is_bitwise() {
        let g = GridFunction::from_fn(vec![5, 4], 0.3, vec![-0.7, 0.2], |x| {
            Complex64::new(x[0] * x[1], (x[0] + x[1]).sin())
        })
        .unwrap();
        let bytes = g.to_bytes();
        let back = GridFunction::from_bytes(&bytes).unwrap();
        assert_eq!(g, back);
        assert_eq!(bytes, back.to_bytes());
        assert!(GridFunction::from_bytes(&bytes[..bytes.len() - 3]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = GridFunction::from_fn(vec![4, 4], 0.5, vec![0.0, 0.0], |x| {
            Complex64::new(x[0], -x[1])
        })
        .unwrap();
        let text = g.to_json().unwrap();
        assert_eq!(GridFunction::from_json(&text).unwrap(), g);
    }

    #[test]
    fn modulation_multiplies_by_plane_wave() {
        let mut g = GridFunction::from_fn(vec![4, 4], 1.0, vec![0.0, 0.0], |_| {
            Complex64::new(1.0, 0.0)
        })
        .unwrap();
        g.modulate(&[0.5, -0.25]);
        let v = g.values()[g.flat_index(&[2, 1])];
        let expect = Complex64::new(0.0, 0.5 * 2.0 - 0.25).exp();
        assert!((v - expect).norm() < 1e-15);
    }

    #[test]
    fn ball_indicator_area_converges() {
        // Area of the unit disc to ~O(h²) thanks to boundary sub-sampling.
        let g = ball_indicator(vec![80, 80], 0.05, vec![-2.0, -2.0], &[0.0, 0.0], 1.0)
            .unwrap();
        let area: f64 = g.values().iter().map(|v| v.re).sum::<f64>() * 0.05 * 0.05;
        assert!((area - std::f64::consts::PI).abs() < 4e-3, "area {area}");
    }
}
