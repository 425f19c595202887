//! The polyharmonic heat kernel `E_d(t,·)`, inverse Fourier transform of
//! `e^{−t|ξ|^{2d}}`, and its stretched-exponential majorant.
//!
//! For radial symbols the inversion reduces to a Hankel transform
//!
//! ```text
//! E_d(t, r) = (2π)^{−N/2} r^{1−N/2} ∫₀^∞ e^{−t s^{2d}} s^{N/2} J_{N/2−1}(r s) ds
//! ```
//!
//! which is integrated panel by panel between the asymptotic zeros of the
//! Bessel factor. The symbol kills the integrand superexponentially, so the
//! panel sum is cut where `t s^{2d}` reaches [`SYMBOL_CUTOFF`] and no tail
//! acceleration is needed.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::quadrature::{self, gauss_legendre};
use crate::spectral::{Complex, Spectral};
use crate::specfun;

/// Value of `t s^{2d}` beyond which the symbol is dropped (e^{−45} ≈ 3e−20).
pub const SYMBOL_CUTOFF: f64 = 45.0;
/// Target absolute accuracy of a single kernel evaluation, relative to E(0).
pub const KERNEL_TARGET: f64 = 1e-12;
/// Search box for the majorant constant.
pub const MAJORANT_K_MAX: f64 = 1e4;

fn rules() -> &'static ((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>)) {
    static RULES: OnceLock<((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>))> = OnceLock::new();
    RULES.get_or_init(|| (gauss_legendre(32), gauss_legendre(20)))
}

fn check_params(n: usize, d: u32) -> Result<()> {
    if d == 0 {
        return Err(Error::Domain("operator order d must be >= 1".into()));
    }
    if n == 0 || (n > 3 && n % 2 == 1) {
        return Err(Error::Domain(format!(
            "kernel evaluation supports N = 1, 2, 3 and even N; got N = {n}"
        )));
    }
    Ok(())
}

/// Area of the unit sphere S^{N−1}.
pub fn sphere_area(n: usize) -> f64 {
    let half = 0.5 * n as f64;
    2.0 * (half * PI.ln() - specfun::ln_gamma(half).expect("positive")).exp()
}

/// Hankel integrand without the r-dependent prefactor, per dimension.
fn radial_integrand(n: usize, r: f64, s: f64) -> f64 {
    match n {
        1 => (r * s).cos(),
        2 => s * libm::j0(r * s),
        3 => s * (r * s).sin(),
        _ => s.powf(0.5 * n as f64) * libm::jn((n / 2 - 1) as i32, r * s),
    }
}

fn radial_prefactor(n: usize, r: f64) -> f64 {
    match n {
        1 => 1.0 / PI,
        2 => 1.0 / (2.0 * PI),
        3 => 1.0 / (2.0 * PI * PI * r),
        _ => (2.0 * PI).powf(-0.5 * n as f64) * r.powf(1.0 - 0.5 * n as f64),
    }
}

/// Kernel value together with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: f64,
    pub error: f64,
}

/// E_d(t, r) by Hankel-transform quadrature of the symbol e^{−t s^{2d}}.
pub fn eval_kernel(t: f64, r: f64, n: usize, d: u32) -> Result<KernelValue> {
    check_params(n, d)?;
    if !(t > 0.0) || !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("need t > 0 and r >= 0, got t={t}, r={r}")));
    }
    let two_d = 2.0 * d as f64;
    let s_max = (SYMBOL_CUTOFF / t).powf(1.0 / two_d);
    let symbol = |s: f64| (-t * s.powf(two_d)).exp();
    let ((x32, w32), (x20, w20)) = rules();

    if r == 0.0 {
        // (2π)^{−N} |S^{N−1}| ∫ s^{N−1} e^{−t s^{2d}} ds
        let f = |s: f64| s.powi(n as i32 - 1) * symbol(s);
        let panels = 32;
        let (mut hi, mut lo) = (0.0, 0.0);
        for k in 0..panels {
            let a = s_max * k as f64 / panels as f64;
            let b = s_max * (k + 1) as f64 / panels as f64;
            hi += quadrature::fixed(f, a, b, x32, w32);
            lo += quadrature::fixed(f, a, b, x20, w20);
        }
        let c = sphere_area(n) * (2.0 * PI).powi(-(n as i32));
        return Ok(KernelValue {
            value: c * hi,
            error: c * (hi - lo).abs(),
        });
    }

    // panels no wider than half an oscillation period nor s_max/32
    let width = (PI / r).min(s_max / 32.0);
    let panels = (s_max / width).ceil() as usize;
    let width = s_max / panels as f64;
    let f = |s: f64| symbol(s) * radial_integrand(n, r, s);
    let (mut hi, mut lo) = (0.0, 0.0);
    for k in 0..panels {
        let a = width * k as f64;
        let b = a + width;
        hi += quadrature::fixed(f, a, b, x32, w32);
        lo += quadrature::fixed(f, a, b, x20, w20);
    }
    let c = radial_prefactor(n, r);
    Ok(KernelValue {
        value: c * hi,
        error: (c * (hi - lo)).abs(),
    })
}

/// E_d(1, r).
pub fn eval_profile(r: f64, n: usize, d: u32) -> Result<f64> {
    let v = eval_kernel(1.0, r, n, d)?;
    let scale = eval_kernel(1.0, 0.0, n, d)?.value;
    if v.error > KERNEL_TARGET * scale {
        return Err(Error::Quadrature {
            estimate: v.error,
            target: KERNEL_TARGET * scale,
        });
    }
    Ok(v.value)
}

/// Closed form of the d = 1 kernel: (4πt)^{−N/2} e^{−r²/4t}.
pub fn gaussian_kernel(t: f64, r: f64, n: usize) -> f64 {
    (4.0 * PI * t).powf(-0.5 * n as f64) * (-r * r / (4.0 * t)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

/// Compare E_d(t, x) from the time-t symbol with t^{−N/2d} E_d(1, t^{−1/2d}|x|).
pub fn scaling_check(t: f64, x: &[f64], d: u32) -> Result<ScalingCheck> {
    let n = x.len();
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let lhs = eval_kernel(t, r, n, d)?.value;
    let two_d = 2.0 * d as f64;
    let rhs = t.powf(-(n as f64) / two_d) * eval_kernel(1.0, t.powf(-1.0 / two_d) * r, n, d)?.value;
    let rel_err = if lhs == rhs { 0.0 } else { ((lhs - rhs) / rhs).abs() };
    Ok(ScalingCheck { lhs, rhs, rel_err })
}

/// Tabulated radial profile E_d(1, ·).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelProfile {
    pub d: u32,
    pub dimension: usize,
    /// E_d(1, 0)
    pub origin: f64,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub quad_error: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileConfig {
    pub count: usize,
    pub r_min: f64,
    /// Tabulate until |E| stays below `cutoff_rel · E(0)`.
    pub cutoff_rel: f64,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self {
            count: 2048,
            r_min: 0.5 * (1.0 / 64.0),
            cutoff_rel: 1e-10,
        }
    }
}

impl ProfileConfig {
    /// 2048 radii starting at half the spacing of `spec`.
    pub fn for_grid(spec: &GridSpec) -> Self {
        Self {
            r_min: 0.5 * spec.spacing(),
            ..Self::default()
        }
    }
}

/// Radius past which |E_d(1,·)| stays below `rel · E(0)` over a window of samples.
pub fn decay_cutoff(n: usize, d: u32, rel: f64) -> Result<f64> {
    let origin = eval_kernel(1.0, 0.0, n, d)?.value;
    let step = 0.25;
    let window = 12;
    let mut below = 0;
    let mut r = 0.0;
    while r < 1e4 {
        r += step;
        let v = eval_kernel(1.0, r, n, d)?.value;
        if v.abs() < rel * origin {
            below += 1;
            if below == window {
                return Ok(r);
            }
        } else {
            below = 0;
        }
    }
    Err(Error::Infeasible("kernel never decayed below the cutoff".into()))
}

pub fn build_profile(n: usize, d: u32, config: &ProfileConfig) -> Result<KernelProfile> {
    check_params(n, d)?;
    if config.count < 2 || !(config.r_min > 0.0) {
        return Err(Error::Domain("profile needs count >= 2 and r_min > 0".into()));
    }
    let origin = eval_kernel(1.0, 0.0, n, d)?.value;
    let cutoff = decay_cutoff(n, d, config.cutoff_rel)?;
    let ratio = (cutoff / config.r_min).ln() / (config.count - 1) as f64;
    let radii: Vec<f64> = (0..config.count)
        .map(|j| {
            if j + 1 == config.count {
                cutoff
            } else {
                config.r_min * (ratio * j as f64).exp()
            }
        })
        .collect();
    let evaluated: Vec<KernelValue> = radii
        .par_iter()
        .map(|&r| eval_kernel(1.0, r, n, d))
        .collect::<Result<_>>()?;
    Ok(KernelProfile {
        d,
        dimension: n,
        origin,
        radii,
        values: evaluated.iter().map(|v| v.value).collect(),
        quad_error: evaluated.iter().map(|v| v.error).collect(),
    })
}

impl KernelProfile {
    /// Number of sign changes along the tabulated radii.
    pub fn sign_changes(&self) -> usize {
        let mut prev = self.origin.signum();
        let mut count = 0;
        for &v in &self.values {
            // ignore values lost in quadrature noise
            if v.abs() < 1e-14 * self.origin {
                continue;
            }
            let s = v.signum();
            if s != prev {
                count += 1;
                prev = s;
            }
        }
        count
    }

    /// max |E| over the tabulated radii and the origin.
    pub fn sup(&self) -> f64 {
        self.values.iter().fold(self.origin.abs(), |m, v| m.max(v.abs()))
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "r,value,quad_error")?;
        writeln!(w, "0,{:e},0", self.origin)?;
        for ((r, v), e) in self.radii.iter().zip(&self.values).zip(&self.quad_error) {
            writeln!(w, "{r:e},{v:e},{e:e}")?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Constants of the bound |E(r)| ≤ K ω e^{−μ r^β}, ω normalizing the majorant to unit mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MajorantFit {
    #[serde(rename = "K")]
    pub k: f64,
    pub mu: f64,
    pub omega: f64,
    pub exponent: f64,
    /// max_r |E(r)| / (K ω e^{−μ r^β}); ≤ 1 when the bound holds.
    pub max_ratio: f64,
}

/// Majorant exponent 2d/(2d−1): 4/3 for the biharmonic kernel.
pub fn majorant_exponent(d: u32) -> f64 {
    let two_d = 2.0 * d as f64;
    two_d / (two_d - 1.0)
}

/// ω with ω^{−1} = ∫_{ℝ^N} e^{−μ|η|^β} dη.
pub fn majorant_omega(n: usize, mu: f64, beta: f64) -> f64 {
    let nf = n as f64;
    let ln_int = sphere_area(n).ln() + specfun::ln_gamma(nf / beta).expect("positive")
        - beta.ln()
        - (nf / beta) * mu.ln();
    (-ln_int).exp()
}

impl MajorantFit {
    pub fn bound(&self, r: f64) -> f64 {
        self.k * self.omega * (-self.mu * r.powf(self.exponent)).exp()
    }

    /// max |E| / bound over a profile.
    pub fn max_ratio_on(&self, profile: &KernelProfile) -> f64 {
        profile
            .radii
            .iter()
            .zip(&profile.values)
            .map(|(&r, &v)| v.abs() / self.bound(r))
            .fold(profile.origin.abs() / self.bound(0.0), f64::max)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }
}

/// Smallest K over a log-spaced μ grid such that the majorant dominates every
/// tabulated value.
pub fn fit_majorant(profile: &KernelProfile, exponent: f64) -> Result<MajorantFit> {
    if !(exponent > 0.0) {
        return Err(Error::Domain(format!("majorant exponent must be positive, got {exponent}")));
    }
    let n = profile.dimension;
    let mus: Vec<f64> = (0..600)
        .map(|i| 1e-3 * (i as f64 / 599.0 * (3e4_f64).ln()).exp())
        .collect();
    let required = |mu: f64| -> f64 {
        // work in logs: ln K ≥ ln|E| − ln ω + μ r^β
        let ln_omega = majorant_omega(n, mu, exponent).ln();
        let mut worst = profile.origin.abs().ln() - ln_omega;
        for (&r, &v) in profile.radii.iter().zip(&profile.values) {
            if v != 0.0 {
                worst = worst.max(v.abs().ln() - ln_omega + mu * r.powf(exponent));
            }
        }
        worst
    };
    let (mu, ln_k) = mus
        .iter()
        .map(|&mu| (mu, required(mu)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid");
    let k = ln_k.exp() * (1.0 + 1e-9);
    if !(k <= MAJORANT_K_MAX) {
        return Err(Error::Infeasible(format!(
            "no (K, mu) with K <= {MAJORANT_K_MAX:e} dominates the profile (best K = {k:.3e} at mu = {mu:.3e})"
        )));
    }
    let mut fit = MajorantFit {
        k: k.max(1.0 + 1e-9),
        mu,
        omega: majorant_omega(n, mu, exponent),
        exponent,
        max_ratio: 0.0,
    };
    fit.max_ratio = fit.max_ratio_on(profile);
    Ok(fit)
}

/// Periodized E_d(t,·) on a grid by inverse DFT of the sampled symbol,
/// returned along the first axis as (r, value) pairs for 0 ≤ r ≤ L/2.
pub fn dft_axis_profile(spec: &GridSpec, t: f64, d: u32) -> Vec<(f64, f64)> {
    let spectral = Spectral::new(*spec);
    let two_d = d as i32;
    let hat: Vec<Complex> = spectral
        .k_squared()
        .into_iter()
        .map(|k2| Complex::new((-t * k2.powi(two_d)).exp(), 0.0))
        .collect();
    let field = spectral.inverse_real(hat);
    let n = spec.points_per_axis;
    let stride = n.pow(spec.dimension as u32 - 1);
    let scale = spec.len() as f64 / spec.volume();
    (0..=n / 2)
        .map(|j| (j as f64 * spec.spacing(), field.values()[j * stride] * scale))
        .collect()
}

/// |S^{N−1}| ∫₀^R r^{N−1} E_d(1, r) dr; equals 1 up to the truncation at R.
pub fn kernel_mass(n: usize, d: u32, radius: f64) -> Result<f64> {
    check_params(n, d)?;
    let f = |r: f64| {
        let v = eval_kernel(1.0, r, n, d).map(|k| k.value).unwrap_or(f64::NAN);
        r.powi(n as i32 - 1) * v
    };
    let total = quadrature::adaptive(f, 0.0, radius, 1e-12, 400_000)?.value;
    Ok(total * if n == 1 { 2.0 } else { sphere_area(n) })
}
