//! N-dimensional FFT plumbing over a [`GridSpec`], backed by `rustfft`.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::{GridField, GridSpec};

pub use rustfft::num_complex::Complex64 as Complex;

/// Forward/inverse transforms plus the discrete wavenumbers k = 2πj/L.
#[derive(Clone)]
pub struct Spectral {
    spec: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("spec", &self.spec).finish()
    }
}

impl Spectral {
    pub fn new(spec: GridSpec) -> Self {
        let n = spec.points_per_axis;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let dk = 2.0 * PI / spec.box_length;
        let wavenumbers = (0..n)
            .map(|j| {
                let m = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
                m * dk
            })
            .collect();
        Self {
            spec,
            forward,
            inverse,
            wavenumbers,
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// |k|² for every flat spectral index.
    pub fn k_squared(&self) -> Vec<f64> {
        (0..self.spec.len())
            .map(|i| {
                let idx = self.spec.multi_index(i);
                idx[..self.spec.dimension]
                    .iter()
                    .map(|&j| self.wavenumbers[j].powi(2))
                    .sum()
            })
            .collect()
    }

    /// Mask keeping modes with every |index| ≤ n/3 (2/3-rule).
    pub fn dealias_mask(&self) -> Vec<bool> {
        let n = self.spec.points_per_axis;
        let cut = n / 3;
        (0..self.spec.len())
            .map(|i| {
                let idx = self.spec.multi_index(i);
                idx[..self.spec.dimension].iter().all(|&j| {
                    let m = if j <= n / 2 { j } else { n - j };
                    m <= cut
                })
            })
            .collect()
    }

    /// Largest per-axis |mode index| of each flat spectral index.
    pub fn max_mode_index(&self) -> Vec<usize> {
        let n = self.spec.points_per_axis;
        (0..self.spec.len())
            .map(|i| {
                let idx = self.spec.multi_index(i);
                idx[..self.spec.dimension]
                    .iter()
                    .map(|&j| if j <= n / 2 { j } else { n - j })
                    .max()
                    .unwrap_or(0)
            })
            .collect()
    }

    fn transform_axes(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.spec.points_per_axis;
        let dim = self.spec.dimension;
        let total = data.len();
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        for axis in 0..dim {
            let stride = n.pow((dim - 1 - axis) as u32);
            if stride == 1 {
                for chunk in data.chunks_exact_mut(n) {
                    plan.process_with_scratch(chunk, &mut scratch);
                }
                continue;
            }
            let block = stride * n;
            for start in (0..total).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (j, c) in line.iter_mut().enumerate() {
                        *c = data[base + j * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (j, c) in line.iter().enumerate() {
                        data[base + j * stride] = *c;
                    }
                }
            }
        }
    }

    /// Unnormalized forward DFT of a real field.
    pub fn forward(&self, field: &GridField) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = field
            .values()
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        self.transform_axes(&mut data, &self.forward);
        data
    }

    /// Inverse DFT (normalized by n^N), keeping the real part.
    pub fn inverse_real(&self, mut data: Vec<Complex64>) -> GridField {
        self.transform_axes(&mut data, &self.inverse);
        let scale = 1.0 / self.spec.len() as f64;
        GridField::from_parts(self.spec, data.into_iter().map(|c| c.re * scale).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sample_function;

    #[test]
    fn cosine_has_two_bins() {
        let spec = GridSpec::new(1, 64, 5.0).unwrap();
        let f = sample_function(&spec, |x| (2.0 * PI * x[0] / 5.0).cos()).unwrap();
        let s = Spectral::new(spec);
        let hat = s.forward(&f);
        let nonzero = hat.iter().filter(|c| c.norm() > 1e-9).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn roundtrip_2d_3d() {
        for dim in [2, 3] {
            let spec = GridSpec::new(dim, 8, 2.0).unwrap();
            let f = sample_function(&spec, |x| x.iter().map(|v| (3.0 * v).sin()).sum::<f64>() + x[0] * x[0]).unwrap();
            let s = Spectral::new(spec);
            let back = s.inverse_real(s.forward(&f));
            for (a, b) in f.values().iter().zip(back.values()) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }
}
