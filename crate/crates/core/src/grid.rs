//! Uniform periodic grids on `[−L/2, L/2)^N`, sampled fields and Lebesgue norms.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative threshold for the boundary-leak diagnostic.
pub const BOUNDARY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dimension: usize,
    pub points_per_axis: usize,
    pub box_length: f64,
}

impl GridSpec {
    pub fn new(dimension: usize, points_per_axis: usize, box_length: f64) -> Result<Self> {
        let spec = Self {
            dimension,
            points_per_axis,
            box_length,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dimension) {
            return Err(Error::Domain(format!(
                "grid dimension must be 1, 2 or 3, got {}",
                self.dimension
            )));
        }
        if self.points_per_axis < 8 || !self.points_per_axis.is_power_of_two() {
            return Err(Error::Domain(format!(
                "points_per_axis must be a power of two >= 8, got {}",
                self.points_per_axis
            )));
        }
        if !(self.box_length > 0.0) || !self.box_length.is_finite() {
            return Err(Error::Domain(format!(
                "box_length must be positive, got {}",
                self.box_length
            )));
        }
        Ok(())
    }

    /// Grid spacing h = L / n.
    pub fn spacing(&self) -> f64 {
        self.box_length / self.points_per_axis as f64
    }

    /// Cell volume h^N.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dimension as i32)
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.dimension as i32)
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Per-axis indices of a flat node index (last axis fastest).
    pub fn multi_index(&self, mut flat: usize) -> [usize; 3] {
        let n = self.points_per_axis;
        let mut idx = [0usize; 3];
        for a in (0..self.dimension).rev() {
            idx[a] = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn axis_coordinate(&self, i: usize) -> f64 {
        -0.5 * self.box_length + i as f64 * self.spacing()
    }

    /// Coordinates of node `flat`; unused trailing axes are zero.
    pub fn coordinates(&self, flat: usize) -> [f64; 3] {
        let idx = self.multi_index(flat);
        let mut x = [0.0; 3];
        for a in 0..self.dimension {
            x[a] = self.axis_coordinate(idx[a]);
        }
        x
    }

    pub fn radius(&self, flat: usize) -> f64 {
        let x = self.coordinates(flat);
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Same box and dimension, `factor` times more points per axis.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.dimension, self.points_per_axis * factor, self.box_length)
    }

    pub fn is_boundary(&self, flat: usize) -> bool {
        let n = self.points_per_axis;
        let idx = self.multi_index(flat);
        idx[..self.dimension].iter().any(|&i| i == 0 || i == n - 1)
    }
}

/// A real field sampled at the nodes of a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    spec: GridSpec,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.len() {
            return Err(Error::SpecMismatch(format!(
                "expected {} values, got {}",
                spec.len(),
                values.len()
            )));
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                node,
                coords: spec.coordinates(node)[..spec.dimension].to_vec(),
            });
        }
        Ok(Self { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            values: vec![0.0; spec.len()],
            spec,
        }
    }

    /// Internal constructor for values already known to be finite.
    pub(crate) fn from_parts(spec: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Self { spec, values }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// ∫ u dx by the rectangle rule.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.cell_volume()
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        Self::new(self.spec, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_parts(self.spec, self.values.iter().map(|v| c * v).collect())
    }

    fn check_same(&self, other: &GridField) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch(format!(
                "{:?} vs {:?}",
                self.spec, other.spec
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &GridField) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_parts(
            self.spec,
            self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &GridField) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_parts(
            self.spec,
            self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        ))
    }

    /// Largest |u| over nodes in the outermost layer of cells.
    pub fn boundary_max(&self) -> f64 {
        (0..self.values.len())
            .filter(|&i| self.spec.is_boundary(i))
            .fold(0.0, |m, i| m.max(self.values[i].abs()))
    }

    /// Fails if the boundary layer carries more than `tolerance · ‖u‖_∞`.
    ///
    /// The periodic box stands in for ℝ^N only while the field has
    /// negligible mass near the box edge.
    pub fn ensure_boundary_negligible(&self, tolerance: f64) -> Result<f64> {
        let sup = self.sup_norm();
        let boundary = self.boundary_max();
        if boundary > tolerance * sup {
            return Err(Error::BoundaryLeak {
                boundary,
                sup,
                tolerance,
            });
        }
        Ok(boundary)
    }

    pub fn write_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut w, &self.spec)?;
        w.write_all(b"\n")?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_binary(path: impl AsRef<Path>) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut header = String::new();
        r.read_line(&mut header)?;
        let spec: GridSpec = serde_json::from_str(header.trim_end())?;
        spec.validate()?;
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != 8 * spec.len() {
            return Err(Error::Invalid(format!(
                "payload has {} bytes, header implies {}",
                bytes.len(),
                8 * spec.len()
            )));
        }
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::new(spec, values)
    }

    /// `x,value` rows; only defined for one-dimensional grids.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        if self.spec.dimension != 1 {
            return Err(Error::Domain("CSV export is defined for N = 1 only".into()));
        }
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "x,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{:e},{:e}", self.spec.axis_coordinate(i), v)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Lebesgue exponent accepted by [`lp_norm`]; use `f64::INFINITY` for the sup norm.
pub fn lp_norm(field: &GridField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!("Lebesgue exponent must be >= 1, got {p}")));
    }
    Ok(lp_norm_unchecked(field.values(), field.spec().cell_volume(), p))
}

pub(crate) fn lp_norm_unchecked(values: &[f64], cell: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let sup = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if sup == 0.0 {
        return 0.0;
    }
    // scale by the sup norm so large p cannot overflow
    let s: f64 = values.iter().map(|v| (v.abs() / sup).powf(p)).sum();
    sup * (s * cell).powf(1.0 / p)
}

/// Sample `f` at every node. `f` receives the node coordinates (length N).
pub fn sample_function<F: Fn(&[f64]) -> f64>(spec: &GridSpec, f: F) -> Result<GridField> {
    spec.validate()?;
    let dim = spec.dimension;
    let mut values = Vec::with_capacity(spec.len());
    for i in 0..spec.len() {
        let x = spec.coordinates(i);
        let v = f(&x[..dim]);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                node: i,
                coords: x[..dim].to_vec(),
            });
        }
        values.push(v);
    }
    Ok(GridField::from_parts(*spec, values))
}

/// Sample a radial profile g(|x|), evaluating nodes with |x| < h/2 at radius h/2.
///
/// Used for witnesses with integrable singularities at the origin.
pub fn sample_radial_clipped<F: Fn(f64) -> f64>(spec: &GridSpec, g: F) -> Result<GridField> {
    let clip = 0.5 * spec.spacing();
    sample_function(spec, |x| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        g(r.max(clip))
    })
}

/// Smooth compactly supported bump a·e^{1 − 1/(1 − |x−c|²/w²)}, peak value a.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: [f64; 3],
    pub width: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn centered(width: f64, amplitude: f64) -> Self {
        Self {
            center: [0.0; 3],
            width,
            amplitude,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, c)| (a - c).powi(2))
            .sum::<f64>()
            / (self.width * self.width);
        if r2 < 1.0 {
            self.amplitude * (1.0 - 1.0 / (1.0 - r2)).exp()
        } else {
            0.0
        }
    }
}

pub fn sample_bumps(spec: &GridSpec, bumps: &[Bump]) -> Result<GridField> {
    if let Some(b) = bumps.iter().find(|b| !(b.width > 0.0)) {
        return Err(Error::Domain(format!("bump width must be positive, got {}", b.width)));
    }
    sample_function(spec, |x| bumps.iter().map(|b| b.eval(x)).sum())
}
