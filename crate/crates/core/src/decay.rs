//! Decay exponents for small-data global solutions, their admissible p-ranges,
//! log-log rate fits, and the scalar certificate for the logarithmic bound
//! used to split the Duhamel integral near s = t.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::Trajectory;

/// σ = 1/(m−1) − N/(2dp), with N/(2dp) = 0 at p = ∞.
pub fn sigma_theory(m: f64, n: usize, p: f64, d: u32) -> Result<f64> {
    if !(m > 1.0) {
        return Err(Error::Domain(format!("sigma needs m > 1, got {m}")));
    }
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("sigma needs p >= 1, got {p}")));
    }
    if d == 0 {
        return Err(Error::Domain("operator order d must be >= 1".into()));
    }
    let spatial = if p.is_infinite() { 0.0 } else { n as f64 / (2.0 * d as f64 * p) };
    Ok(1.0 / (m - 1.0) - spatial)
}

/// Admissible window of p for the decay estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PRange {
    pub lower: f64,
    pub upper: f64,
    pub lower_closed: bool,
    pub upper_closed: bool,
    pub branch: String,
}

impl PRange {
    pub fn contains(&self, p: f64) -> bool {
        let above = if self.lower_closed { p >= self.lower } else { p > self.lower };
        let below = if self.upper_closed { p <= self.upper } else { p < self.upper };
        above && below
    }

    pub fn describe(&self) -> String {
        let l = if self.lower_closed { '[' } else { '(' };
        let r = if self.upper_closed { ']' } else { ')' };
        let upper = if self.upper.is_infinite() { "inf".to_string() } else { self.upper.to_string() };
        format!("{l}{}, {upper}{r} ({})", self.lower, self.branch)
    }
}

/// [max(m, 2N(m−1)/(4d−N)), ∞] when N < 4d, (N(m−1)/(2d), ∞) when N ≥ 4d.
pub fn admissible_p_range(m: f64, n: usize, d: u32) -> Result<PRange> {
    if d == 0 || n == 0 {
        return Err(Error::Domain("need N >= 1 and d >= 1".into()));
    }
    if !(m >= 2.0) {
        return Err(Error::Hypothesis(format!("regime needs m >= 2, got m = {m}")));
    }
    let nf = n as f64;
    let two_d = 2.0 * d as f64;
    let scaled = nf * (m - 1.0) / two_d;
    if scaled < 2.0 {
        return Err(Error::Hypothesis(format!(
            "regime needs N(m-1)/(2d) >= 2, got {scaled}"
        )));
    }
    if nf < 2.0 * two_d {
        Ok(PRange {
            lower: m.max(2.0 * nf * (m - 1.0) / (2.0 * two_d - nf)),
            upper: f64::INFINITY,
            lower_closed: true,
            upper_closed: true,
            branch: "N < 4d".into(),
        })
    } else {
        Ok(PRange {
            lower: scaled,
            upper: f64::INFINITY,
            lower_closed: false,
            upper_closed: false,
            branch: "N >= 4d".into(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub p: f64,
    pub sigma_hat: f64,
    pub sigma_theory: Option<f64>,
    pub window: (f64, f64),
    pub r_squared: f64,
    pub samples: usize,
}

/// Least-squares slope of log v against log t over the window; σ̂ is its negation.
pub fn fit_power_law(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(&t, _)| t >= window.0 && t <= window.1 && t > 0.0)
        .map(|(&t, &v)| (t, v))
        .collect();
    if pts.len() < 8 {
        return Err(Error::Invalid(format!(
            "decay fit needs >= 8 samples in [{}, {}], found {}",
            window.0,
            window.1,
            pts.len()
        )));
    }
    if let Some((t, _)) = pts.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::Invalid(format!("non-positive norm at t = {t} inside the fit window")));
    }
    let xs: Vec<f64> = pts.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, v)| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Invalid("decay fit window holds a single time".into()));
    }
    let slope = sxy / sxx;
    let resid: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - resid / syy).clamp(0.0, 1.0) };
    Ok(DecayFit {
        p: f64::NAN,
        sigma_hat: -slope,
        sigma_theory: None,
        window,
        r_squared,
        samples: pts.len(),
    })
}

/// Decay fit of ‖u(t)‖_p over a window of a trajectory.
pub fn fit_decay(traj: &Trajectory, p: f64, window: (f64, f64)) -> Result<DecayFit> {
    let (t, v) = traj.norm_series(p)?;
    let t_max = *t.last().expect("non-empty trajectory");
    if window.0 > t_max || window.0 >= window.1 {
        return Err(Error::Invalid(format!(
            "window [{}, {}] outside the trajectory support (0, {t_max}]",
            window.0, window.1
        )));
    }
    let mut fit = fit_power_law(&t, &v, (window.0, window.1.min(t_max)))?;
    fit.p = p;
    Ok(fit)
}

/// Window start: ten times the diffusion time ℓ^{2d} of the datum's length scale.
pub fn default_window_start(length_scale: f64, d: u32) -> f64 {
    10.0 * length_scale.powi(2 * d as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub m: f64,
    pub n: usize,
    pub d: u32,
    pub fit: DecayFit,
}

pub fn write_fits_csv(rows: &[DecayRow], path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "m,N,d,p,sigma_theory,sigma_hat,r_squared,t_min,t_max")?;
    for r in rows {
        let theory = r.fit.sigma_theory.map_or(String::from("nan"), |s| format!("{s}"));
        writeln!(
            w,
            "{},{},{},{},{},{},{},{:e},{:e}",
            r.m, r.n, r.d, r.fit.p, theory, r.fit.sigma_hat, r.fit.r_squared, r.fit.window.0, r.fit.window.1
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Positive root of a = 2 log(a + 1), by bisection on (2, 3).
pub fn log_root() -> f64 {
    let g = |a: f64| a - 2.0 * (a + 1.0).ln();
    let (mut lo, mut hi) = (2.0_f64, 3.0_f64);
    debug_assert!(g(lo) < 0.0 && g(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogCertificate {
    pub a_root: f64,
    pub threshold: f64,
    pub checked: usize,
    pub holds_all: bool,
    /// min over τ of rhs/lhs − 1
    pub min_margin: f64,
}

/// (log(τ^{−N/(2d)} + 1))^{−1/2} ≤ √2·τ^{N/(4d)} for all τ ≥ a^{−2d/N}.
pub fn log_inequality_certificate(n: usize, d: u32, taus: &[f64]) -> Result<LogCertificate> {
    if n == 0 || d == 0 {
        return Err(Error::Domain("need N >= 1 and d >= 1".into()));
    }
    let a = log_root();
    let e = n as f64 / (2.0 * d as f64);
    let threshold = a.powf(-1.0 / e);
    if let Some(&bad) = taus.iter().find(|&&t| !(t >= threshold)) {
        return Err(Error::Domain(format!(
            "tau = {bad} is below the threshold a^(-2d/N) = {threshold}"
        )));
    }
    let mut holds_all = true;
    let mut min_margin = f64::INFINITY;
    for &tau in taus {
        let lhs = tau.powf(-e).ln_1p().powf(-0.5);
        let rhs = std::f64::consts::SQRT_2 * tau.powf(0.5 * e);
        min_margin = min_margin.min(rhs / lhs - 1.0);
        holds_all &= lhs <= rhs * (1.0 + 1e-9);
    }
    Ok(LogCertificate {
        a_root: a,
        threshold,
        checked: taus.len(),
        holds_all,
        min_margin,
    })
}
