//! The polyharmonic semigroup `e^{−t(−Δ)^d}` on the periodic grid, and
//! numerical checks of its L^p–L^q and Orlicz smoothing estimates.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{lp_norm, GridField, GridSpec};
use crate::orlicz::{exp_l2_norm, InequalityCheck};
use crate::quadrature;
use crate::spectral::{Complex, Spectral};

/// Reusable spectral plan for `e^{−t(−Δ)^d}` at any t ≥ 0.
#[derive(Clone)]
pub struct Propagator {
    spectral: Spectral,
    /// |ξ|^{2d} per flattened frequency
    k2d: Vec<f64>,
    d: u32,
}

impl Propagator {
    pub fn new(spec: GridSpec, d: u32) -> Result<Self> {
        spec.validate()?;
        if d == 0 {
            return Err(Error::Domain("operator order d must be >= 1".into()));
        }
        let spectral = Spectral::new(spec);
        let k2d = spectral.k_squared().into_iter().map(|k2| k2.powi(d as i32)).collect();
        Ok(Self { spectral, k2d, d })
    }

    pub fn spec(&self) -> &GridSpec {
        self.spectral.spec()
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn order(&self) -> u32 {
        self.d
    }

    /// |ξ|^{2d} on the DFT frequency lattice.
    pub fn symbol_exponents(&self) -> &[f64] {
        &self.k2d
    }

    pub fn symbol(&self, t: f64) -> Vec<f64> {
        self.k2d.iter().map(|&k| (-t * k).exp()).collect()
    }

    /// Multiply Fourier coefficients by e^{−t|ξ|^{2d}} in place.
    pub fn damp(&self, t: f64, hat: &mut [Complex]) {
        for (c, &k) in hat.iter_mut().zip(&self.k2d) {
            *c *= (-t * k).exp();
        }
    }

    pub fn apply(&self, t: f64, field: &GridField) -> Result<GridField> {
        if field.spec() != self.spec() {
            return Err(Error::SpecMismatch(format!(
                "field on {:?}, propagator on {:?}",
                field.spec(),
                self.spec()
            )));
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("semigroup time must be finite and >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(field.clone());
        }
        let mut hat = self.spectral.forward(field);
        self.damp(t, &mut hat);
        Ok(self.spectral.inverse_real(hat))
    }
}

/// A single time slice of the semigroup on a fixed grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemigroupOp {
    pub d: u32,
    pub t: f64,
    pub spec: GridSpec,
}

impl SemigroupOp {
    pub fn new(spec: GridSpec, d: u32, t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("semigroup time must be >= 0, got {t}")));
        }
        Ok(Self { d, t, spec })
    }

    pub fn symbol(&self) -> Result<Vec<f64>> {
        Ok(Propagator::new(self.spec, self.d)?.symbol(self.t))
    }

    pub fn apply(&self, field: &GridField) -> Result<GridField> {
        Propagator::new(self.spec, self.d)?.apply(self.t, field)
    }
}

fn check_exponents(p: f64, q: f64) -> Result<()> {
    if !(p >= 1.0) || !(q >= 1.0) {
        return Err(Error::Domain(format!("need p, q >= 1, got p={p}, q={q}")));
    }
    if p > q {
        return Err(Error::Domain(format!("need p <= q, got p={p}, q={q}")));
    }
    Ok(())
}

/// Exponent N/(2d)·(1/p − 1/q) of the L^p–L^q smoothing rate.
pub fn smoothing_exponent(n: usize, d: u32, p: f64, q: f64) -> f64 {
    n as f64 / (2.0 * d as f64) * (1.0 / p - 1.0 / q)
}

/// ‖e^{−t(−Δ)^d}φ‖_q / (t^{−N/(2d)(1/p−1/q)}‖φ‖_p); zero for the zero field.
pub fn smoothing_ratio(prop: &Propagator, field: &GridField, t: f64, p: f64, q: f64) -> Result<f64> {
    check_exponents(p, q)?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("smoothing ratio needs t > 0, got {t}")));
    }
    let denom = lp_norm(field, p)?;
    if denom == 0.0 {
        return Ok(0.0);
    }
    let evolved = prop.apply(t, field)?;
    let rate = t.powf(-smoothing_exponent(prop.spec().dimension, prop.order(), p, q));
    Ok(lp_norm(&evolved, q)? / (rate * denom))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingRecord {
    pub field: usize,
    pub t: f64,
    pub p: f64,
    pub q: f64,
    pub ratio: f64,
}

/// Every admissible pair p ≤ q from {1, 2, 4, ∞}.
pub fn standard_pairs() -> Vec<(f64, f64)> {
    let ps = [1.0, 2.0, 4.0, f64::INFINITY];
    let mut out = Vec::new();
    for (i, &p) in ps.iter().enumerate() {
        for &q in &ps[i..] {
            out.push((p, q));
        }
    }
    out
}

/// Ratios for every field × pair × time; fields are processed in parallel.
pub fn smoothing_sweep(
    prop: &Propagator,
    fields: &[GridField],
    pairs: &[(f64, f64)],
    times: &[f64],
) -> Result<Vec<SmoothingRecord>> {
    let rows: Vec<Vec<SmoothingRecord>> = fields
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let mut rows = Vec::with_capacity(pairs.len() * times.len());
            for &t in times {
                let evolved = prop.apply(t, f)?;
                for &(p, q) in pairs {
                    check_exponents(p, q)?;
                    let denom = lp_norm(f, p)?;
                    let ratio = if denom == 0.0 {
                        0.0
                    } else {
                        let rate = t.powf(-smoothing_exponent(f.spec().dimension, prop.order(), p, q));
                        lp_norm(&evolved, q)? / (rate * denom)
                    };
                    rows.push(SmoothingRecord { field: i, t, p, q, ratio });
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Empirical (p,q)-uniform smoothing constant for one (N, d).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingConstant {
    pub dimension: usize,
    pub d: u32,
    pub h: f64,
    /// max ratio restricted to p = q
    pub h_diagonal: f64,
    pub samples: usize,
}

impl SmoothingConstant {
    pub fn from_sweep(dimension: usize, d: u32, records: &[SmoothingRecord]) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Invalid("empty smoothing sweep".into()));
        }
        let h = records.iter().map(|r| r.ratio).fold(0.0, f64::max);
        if !h.is_finite() {
            return Err(Error::NonFinite { node: 0, coords: vec![] });
        }
        let h_diagonal = records
            .iter()
            .filter(|r| r.p == r.q)
            .map(|r| r.ratio)
            .fold(0.0, f64::max);
        Ok(Self {
            dimension,
            d,
            h,
            h_diagonal,
            samples: records.len(),
        })
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        serde_json::to_writer_pretty(BufWriter::new(File::create(path)?), self)?;
        Ok(())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?)
    }
}

fn fmt_exponent(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

pub fn write_sweep_csv(records: &[SmoothingRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,p,q,ratio")?;
    for r in records {
        writeln!(w, "{:e},{},{},{:e}", r.t, fmt_exponent(r.p), fmt_exponent(r.q), r.ratio)?;
    }
    w.flush()?;
    Ok(())
}

/// (ii): ‖e^{−t(−Δ)^d}φ‖_{exp L²} ≤ ℋ t^{−N/(2dp)} (log(t^{−N/(2d)} + 1))^{−1/2} ‖φ‖_p, 1 ≤ p ≤ 2.
pub fn orlicz_smoothing_check(
    prop: &Propagator,
    field: &GridField,
    t: f64,
    p: f64,
    h: f64,
) -> Result<InequalityCheck> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::Domain(format!("Orlicz smoothing needs 1 <= p <= 2, got {p}")));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("need t > 0, got {t}")));
    }
    let lhs = exp_l2_norm(&prop.apply(t, field)?);
    let a = prop.spec().dimension as f64 / (2.0 * prop.order() as f64);
    let rhs = h * t.powf(-a / p) * t.powf(-a).ln_1p().powf(-0.5) * lp_norm(field, p)?;
    Ok(InequalityCheck::new(lhs, rhs))
}

/// (iii): ‖e^{−t(−Δ)^d}φ‖_{exp L²} ≤ (ℋ/√log 2)(t^{−N/(2dq)}‖φ‖_q + ‖φ‖_2).
pub fn orlicz_smoothing_check_mixed(
    prop: &Propagator,
    field: &GridField,
    t: f64,
    q: f64,
    h: f64,
) -> Result<InequalityCheck> {
    if !(q >= 1.0) {
        return Err(Error::Domain(format!("need q >= 1, got {q}")));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("need t > 0, got {t}")));
    }
    let lhs = exp_l2_norm(&prop.apply(t, field)?);
    let a = prop.spec().dimension as f64 / (2.0 * prop.order() as f64);
    let rhs = h / std::f64::consts::LN_2.sqrt()
        * (t.powf(-a / q) * lp_norm(field, q)? + lp_norm(field, 2.0)?);
    Ok(InequalityCheck::new(lhs, rhs))
}

pub fn write_checks_csv(rows: &[(f64, InequalityCheck)], path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,lhs,rhs,holds")?;
    for (t, c) in rows {
        writeln!(w, "{t:e},{:e},{:e},{}", c.lhs, c.rhs, c.holds)?;
    }
    w.flush()?;
    Ok(())
}

/// x·(log(1 + x))^{−e} for x = e^{ln_x}, without underflow when x is tiny.
fn damped_power(ln_x: f64, e: f64) -> f64 {
    let ln_log = if ln_x < -30.0 { ln_x } else { ln_x.exp().ln_1p().ln() };
    (ln_x - e * ln_log).exp()
}

/// κ(t) = (2ℋ/√log 2)·min{t^{−N/(2dq)} + 1, t^{−N/(2d)}(log(t^{−N/(2d)} + 1))^{−1/2}}.
pub fn kappa(t: f64, n: usize, q: f64, d: u32, h: f64) -> Result<f64> {
    let a = n as f64 / (2.0 * d as f64);
    if a <= 2.0 {
        return Err(Error::Domain(format!(
            "kappa needs N > 4d (N >= 9 for d = 2), got N = {n}, d = {d}"
        )));
    }
    if !(q > a) || q.is_infinite() {
        return Err(Error::Domain(format!("kappa needs finite q > N/(2d) = {a}, got {q}")));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("need t > 0, got {t}")));
    }
    let first = t.powf(-a / q) + 1.0;
    let second = damped_power(-a * t.ln(), 0.5);
    Ok(2.0 * h / std::f64::consts::LN_2.sqrt() * first.min(second))
}

/// ζ(t) = (ℋ/√log 2)·min{1 + t^{−1/2}, t^{−2}(log(t^{−2} + 1))^{−1/4}}, the N = 8 form.
pub fn zeta(t: f64, h: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("need t > 0, got {t}")));
    }
    let first = 1.0 + t.powf(-0.5);
    let second = damped_power(-2.0 * t.ln(), 0.25);
    Ok(h / std::f64::consts::LN_2.sqrt() * first.min(second))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfLineIntegral {
    pub value: f64,
    /// same integral with both truncation points pushed out by half again
    pub refined: f64,
    pub rel_change: f64,
}

/// ∫₀^∞ g(t) dt for g with g(t)·t ~ t^{a₀} at 0 and ~ t^{−b₀} at ∞ (a₀, b₀ > 0),
/// integrated in log time over a window sized so the dropped ends are below 1e−12.
pub fn integrate_half_line<F: Fn(f64) -> f64>(g: F, a0: f64, b0: f64) -> Result<HalfLineIntegral> {
    if !(a0 > 0.0) || !(b0 > 0.0) {
        return Err(Error::Domain(format!("integrand not integrable: a0={a0}, b0={b0}")));
    }
    let drop = 12.0 * std::f64::consts::LN_10;
    let lo = -(drop + 5.0) / a0;
    let hi = (drop + 5.0) / b0;
    let f = |x: f64| {
        let t = x.exp();
        g(t) * t
    };
    let run = |lo: f64, hi: f64| -> Result<f64> {
        let pieces = 64;
        let mut total = 0.0;
        for k in 0..pieces {
            let a = lo + (hi - lo) * k as f64 / pieces as f64;
            let b = lo + (hi - lo) * (k + 1) as f64 / pieces as f64;
            total += match quadrature::adaptive(f, a, b, 1e-12, 200_000) {
                Ok(r) => r.value,
                // pieces of negligible mass can stall short of relative accuracy
                Err(Error::Quadrature { .. }) => quadrature::gk15(&f, a, b).0,
                Err(e) => return Err(e),
            };
        }
        Ok(total)
    };
    let value = run(lo, hi)?;
    let refined = run(1.5 * lo, 1.5 * hi)?;
    Ok(HalfLineIntegral {
        value,
        refined,
        rel_change: ((refined - value) / refined).abs(),
    })
}

/// ∫₀^∞ κ.
pub fn kappa_integral(n: usize, q: f64, d: u32, h: f64) -> Result<HalfLineIntegral> {
    kappa(1.0, n, q, d, h)?;
    let a = n as f64 / (2.0 * d as f64);
    integrate_half_line(
        |t| kappa(t, n, q, d, h).unwrap_or(f64::NAN),
        1.0 - a / q,
        0.5 * a - 1.0,
    )
}

/// ∫₀^∞ ζ.
pub fn zeta_integral(h: f64) -> Result<HalfLineIntegral> {
    integrate_half_line(|t| zeta(t, h).unwrap_or(f64::NAN), 0.5, 0.5)
}

/// ‖e^{−t(−Δ)^d}u₀ − u₀‖_{exp L²} for each t of a positive decreasing list.
pub fn continuity_at_zero(prop: &Propagator, field: &GridField, times: &[f64]) -> Result<Vec<f64>> {
    if times.iter().any(|&t| !(t > 0.0)) || times.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("times must be positive and strictly decreasing".into()));
    }
    let mut hat0 = prop.spectral().forward(field);
    let mut out = Vec::with_capacity(times.len());
    // e^{−tλ} − 1 computed with expm1 so small t keeps its relative accuracy
    let scratch = hat0.clone();
    for &t in times {
        for ((c, s), &k) in hat0.iter_mut().zip(&scratch).zip(prop.symbol_exponents()) {
            *c = *s * (-t * k).exp_m1();
        }
        let diff = prop.spectral().inverse_real(hat0.clone());
        out.push(exp_l2_norm(&diff));
    }
    Ok(out)
}
