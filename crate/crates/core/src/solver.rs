//! Picard iteration on the Duhamel formulation
//!
//! ```text
//! u(t) = e^{−t(−Δ)^d} u₀ + ∫₀^t e^{−(t−s)(−Δ)^d} f(u(s)) ds
//! ```
//!
//! with a left-endpoint exponential rule in time: the semigroup factor is
//! exact and only the source is frozen over each step. Iterates are stored as
//! the fixed linear orbit plus a Duhamel part so that distances between
//! iterates never suffer cancellation against the (much larger) linear part.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{lp_norm, GridField, GridSpec};
use crate::orlicz::exp_l2_norm;
use crate::semigroup::Propagator;
use crate::spectral::Complex;

/// Cap on λu² before e^{λu²} is declared an overflow.
pub const EXPONENT_LIMIT: f64 = 700.0;

/// f(u) = sign·|u|^{m−1}·u·e^{λu²}; sign 0 switches the nonlinearity off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySpec {
    pub m: f64,
    pub lambda: f64,
    pub sign: f64,
}

impl NonlinearitySpec {
    pub fn new(m: f64, lambda: f64, sign: f64) -> Result<Self> {
        let s = Self { m, lambda, sign };
        s.validate()?;
        Ok(s)
    }

    /// The zero nonlinearity.
    pub fn zero() -> Self {
        Self {
            m: 1.0,
            lambda: 0.0,
            sign: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m >= 1.0) || !self.m.is_finite() {
            return Err(Error::Domain(format!("need m >= 1, got {}", self.m)));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::Domain(format!("need lambda >= 0, got {}", self.lambda)));
        }
        if ![-1.0, 0.0, 1.0].contains(&self.sign) {
            return Err(Error::Domain(format!("sign must be -1, 0 or +1, got {}", self.sign)));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    /// Regime condition for global small-data solutions: m ≥ 2 and N(m−1)/(2d) ≥ 2.
    pub fn check_global_regime(&self, n: usize, d: u32) -> Result<()> {
        let scaled = n as f64 * (self.m - 1.0) / (2.0 * d as f64);
        if self.m < 2.0 {
            return Err(Error::Hypothesis(format!("global regime needs m >= 2, got m = {}", self.m)));
        }
        if scaled < 2.0 {
            return Err(Error::Hypothesis(format!(
                "global regime needs N(m-1)/(2d) >= 2, got {scaled}"
            )));
        }
        Ok(())
    }

    /// Pointwise value; `None` when λu² exceeds [`EXPONENT_LIMIT`].
    pub fn eval(&self, u: f64) -> Option<f64> {
        if self.sign == 0.0 || u == 0.0 {
            return Some(0.0);
        }
        let e = self.lambda * u * u;
        if e > EXPONENT_LIMIT {
            return None;
        }
        Some(self.sign * u.abs().powf(self.m - 1.0) * u * e.exp())
    }

    /// e^{λu²} replaced by its Taylor polynomial with `terms` terms.
    pub fn eval_series(&self, u: f64, terms: usize) -> f64 {
        if self.sign == 0.0 || u == 0.0 {
            return 0.0;
        }
        let x = self.lambda * u * u;
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 0..terms {
            sum += term;
            term *= x / (k + 1) as f64;
        }
        self.sign * u.abs().powf(self.m - 1.0) * u * sum
    }

    /// |u|^{m−1} e^{λu²}, the local Lipschitz weight.
    pub fn weight(&self, u: f64) -> f64 {
        u.abs().powf(self.m - 1.0) * (self.lambda * u * u).exp()
    }
}

pub fn eval_nonlinearity(spec: &NonlinearitySpec, field: &GridField) -> Result<GridField> {
    eval_with_context(spec, field, "")
}

fn eval_with_context(spec: &NonlinearitySpec, field: &GridField, context: &str) -> Result<GridField> {
    let values = field
        .values()
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            spec.eval(u).ok_or_else(|| Error::Overflow {
                node: i,
                exponent: spec.lambda * u * u,
                context: context.to_string(),
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(GridField::from_parts(*field.spec(), values))
}

/// Smallest C with |f(u)−f(v)| ≤ C|u−v|(w(u)+w(v)) over the given pairs.
pub fn lipschitz_constant(spec: &NonlinearitySpec, pairs: &[(f64, f64)]) -> f64 {
    pairs
        .iter()
        .filter(|(u, v)| u != v)
        .filter_map(|&(u, v)| {
            let num = (spec.eval(u)? - spec.eval(v)?).abs();
            let den = (u - v).abs() * (spec.weight(u) + spec.weight(v));
            (den > 0.0).then(|| num / den)
        })
        .fold(0.0, f64::max)
}

/// Metric used to measure successive Picard iterates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Metric {
    /// sup_j t_j^σ ‖u_j − v_j‖_p
    Weighted { p: f64, sigma: f64 },
    /// sup_j ‖u_j − v_j‖_{exp L²}
    ExpL2,
}

impl Metric {
    fn node_distance(&self, t: f64, diff: &GridField) -> Result<f64> {
        match *self {
            Metric::Weighted { p, sigma } => {
                if t == 0.0 {
                    return Ok(0.0);
                }
                Ok(t.powf(sigma) * lp_norm(diff, p)?)
            }
            Metric::ExpL2 => Ok(exp_l2_norm(diff)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub d: u32,
    pub horizon: f64,
    pub steps: usize,
    pub p_track: Vec<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub metric: Metric,
    pub dealias: bool,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Domain("operator order d must be >= 1".into()));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::Domain(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.steps < 8 {
            return Err(Error::Domain(format!("need at least 8 steps, got {}", self.steps)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Domain(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Domain("max_iter must be >= 1".into()));
        }
        if self.p_track.iter().any(|&p| !(p >= 1.0)) {
            return Err(Error::Domain("tracked exponents must be >= 1".into()));
        }
        if let Metric::Weighted { p, sigma } = self.metric {
            if !(p >= 1.0) || !(sigma >= 0.0) {
                return Err(Error::Domain(format!("bad metric parameters p={p}, sigma={sigma}")));
            }
        }
        Ok(())
    }
}

/// Relative spacing of the graded part of the time grid is GRADING/steps.
pub const GRADING: f64 = 16.0;

/// t₀ = 0, t₁ = T/steps², then geometric with ratio 1 + GRADING/steps until the
/// spacing reaches T/steps, then uniform to T.
///
/// The grading keeps the relative step size O(1/steps) near t = 0, where the
/// source can decay like a power of t; a fixed-ratio prefix would leave an
/// error that does not shrink as steps grows.
pub fn time_grid(horizon: f64, steps: usize) -> Vec<f64> {
    let dt = horizon / steps as f64;
    let ratio = 1.0 + (GRADING / steps as f64).min(1.0);
    let mut times = vec![0.0];
    let mut t = horizon / (steps * steps) as f64;
    while t * (ratio - 1.0) < dt && t < horizon {
        times.push(t);
        t *= ratio;
    }
    let start = *times.last().expect("non-empty");
    let remaining = ((horizon - start) / dt).ceil().max(1.0) as usize;
    let step = (horizon - start) / remaining as f64;
    for k in 1..=remaining {
        times.push(if k == remaining { horizon } else { start + step * k as f64 });
    }
    times
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub t: f64,
    pub lp: Vec<f64>,
    pub exp_l2: f64,
}

/// Solution samples on the time grid, t = 0 first.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub fields: Vec<GridField>,
    /// u(t_j) − e^{−t_j(−Δ)^d}u₀, kept separately for cancellation-free differences
    pub duhamel: Vec<GridField>,
    pub p_track: Vec<f64>,
    pub norms: Vec<NormRecord>,
}

impl Trajectory {
    pub fn spec(&self) -> &GridSpec {
        self.fields[0].spec()
    }

    pub fn final_field(&self) -> &GridField {
        self.fields.last().expect("trajectory is non-empty")
    }

    pub fn p_index(&self, p: f64) -> Result<usize> {
        self.p_track
            .iter()
            .position(|&q| q == p)
            .ok_or_else(|| Error::Domain(format!("exponent p = {p} is not tracked")))
    }

    /// (t, ‖u(t)‖_p) for a tracked p.
    pub fn norm_series(&self, p: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let k = self.p_index(p)?;
        Ok(self.norms.iter().map(|r| (r.t, r.lp[k])).unzip())
    }

    pub fn write_norms_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        let header: Vec<String> = self
            .p_track
            .iter()
            .map(|p| if p.is_infinite() { "norm_inf".into() } else { format!("norm_{p}") })
            .collect();
        writeln!(w, "t,{},norm_expl2", header.join(","))?;
        for r in &self.norms {
            let lp: Vec<String> = r.lp.iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{:e},{},{:e}", r.t, lp.join(","), r.exp_l2)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Binary snapshots of every `every`-th time slice plus the last one.
    pub fn write_snapshots(&self, dir: impl AsRef<Path>, every: usize) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let last = self.fields.len() - 1;
        for (j, f) in self.fields.iter().enumerate() {
            if j % every.max(1) == 0 || j == last {
                f.write_binary(dir.join(format!("u_{j:05}.bin")))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    pub iterations: usize,
    /// successive-distance ratios d_k / d_{k−1}
    pub contraction_factors: Vec<f64>,
    pub distances: Vec<f64>,
    pub converged: bool,
    pub final_residual: f64,
    /// why iteration stopped early, if it did
    pub stop_reason: Option<String>,
}

/// Writes manifest.json (config echo + report) and norms.csv into `dir`.
pub fn persist_run<C: Serialize>(
    dir: impl AsRef<Path>,
    config: &C,
    report: &PicardReport,
    traj: &Trajectory,
) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let manifest = serde_json::json!({
        "schema_version": 1,
        "config": config,
        "report": report,
        "times": traj.times.len(),
    });
    serde_json::to_writer_pretty(BufWriter::new(File::create(dir.join("manifest.json"))?), &manifest)?;
    traj.write_norms_csv(dir.join("norms.csv"))
}

/// Fixed-point problem u = L + Duhamel[source(j, u_j)] on a time grid.
struct Picard<'a> {
    prop: &'a Propagator,
    times: &'a [f64],
    linear: &'a [GridField],
    mask: Option<Vec<bool>>,
}

impl Picard<'_> {
    /// Duhamel parts D_j of the map applied to the current iterate.
    fn duhamel<S>(&self, current: &[GridField], source: &S) -> Result<Vec<GridField>>
    where
        S: Fn(usize, &GridField) -> Result<GridField>,
    {
        let spec = *self.prop.spec();
        let mut out = Vec::with_capacity(self.times.len());
        out.push(GridField::zeros(spec));
        let mut acc: Vec<Complex> = vec![Complex::new(0.0, 0.0); spec.len()];
        for j in 0..self.times.len() - 1 {
            let u = self.linear[j].add(&current[j])?;
            let f = source(j, &u)?;
            let w = self.times[j + 1] - self.times[j];
            let mut fh = self.prop.spectral().forward(&f);
            if let Some(mask) = &self.mask {
                for (c, &keep) in fh.iter_mut().zip(mask) {
                    if !keep {
                        *c = Complex::new(0.0, 0.0);
                    }
                }
            }
            for (a, c) in acc.iter_mut().zip(&fh) {
                *a += *c * w;
            }
            self.prop.damp(w, &mut acc);
            out.push(self.prop.spectral().inverse_real(acc.clone()));
        }
        Ok(out)
    }

    fn run<S>(&self, source: S, config: &SolverConfig) -> Result<(Vec<GridField>, PicardReport)>
    where
        S: Fn(usize, &GridField) -> Result<GridField>,
    {
        let spec = *self.prop.spec();
        let mut current: Vec<GridField> = vec![GridField::zeros(spec); self.times.len()];
        let mut distances: Vec<f64> = Vec::new();
        let mut factors: Vec<f64> = Vec::new();
        let mut converged = false;
        let mut stop_reason = None;
        let mut growth_streak = 0;
        for k in 1..=config.max_iter {
            let next = match self.duhamel(&current, &source) {
                Ok(n) => n,
                // a blow-up after the iteration has left the contraction regime is an outcome
                Err(e @ Error::Overflow { .. }) if k > 1 => {
                    stop_reason = Some(e.to_string());
                    break;
                }
                Err(e) => return Err(e),
            };
            let mut dist: f64 = 0.0;
            for (j, (a, b)) in next.iter().zip(&current).enumerate() {
                dist = dist.max(config.metric.node_distance(self.times[j], &a.sub(b)?)?);
            }
            if let Some(&prev) = distances.last() {
                factors.push(if prev > 0.0 { dist / prev } else { f64::INFINITY });
            }
            distances.push(dist);
            current = next;
            if !dist.is_finite() {
                stop_reason = Some("non-finite iterate distance".into());
                break;
            }
            if dist <= config.tol && (k >= 2 || dist == 0.0) {
                converged = true;
                break;
            }
            if factors.last().is_some_and(|&f| f >= 1.0) {
                growth_streak += 1;
            } else {
                growth_streak = 0;
            }
            if growth_streak >= 3 {
                stop_reason = Some("distances grew for three consecutive iterations".into());
                break;
            }
        }
        if !converged && stop_reason.is_none() {
            stop_reason = Some(format!("no convergence within {} iterations", config.max_iter));
        }
        let report = PicardReport {
            iterations: distances.len(),
            contraction_factors: factors,
            final_residual: distances.last().copied().unwrap_or(0.0),
            distances,
            converged,
            stop_reason,
        };
        Ok((current, report))
    }
}

fn linear_orbit(prop: &Propagator, u0: &GridField, times: &[f64]) -> Result<Vec<GridField>> {
    let hat = prop.spectral().forward(u0);
    times
        .iter()
        .map(|&t| {
            if t == 0.0 {
                return Ok(u0.clone());
            }
            let mut h = hat.clone();
            prop.damp(t, &mut h);
            Ok(prop.spectral().inverse_real(h))
        })
        .collect()
}

fn assemble(
    times: Vec<f64>,
    linear: Vec<GridField>,
    duhamel: Vec<GridField>,
    p_track: &[f64],
) -> Result<Trajectory> {
    let fields = linear
        .iter()
        .zip(&duhamel)
        .map(|(l, d)| l.add(d))
        .collect::<Result<Vec<_>>>()?;
    let norms = times
        .iter()
        .zip(&fields)
        .map(|(&t, f)| {
            Ok(NormRecord {
                t,
                lp: p_track.iter().map(|&p| lp_norm(f, p)).collect::<Result<_>>()?,
                exp_l2: exp_l2_norm(f),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    for (j, f) in fields.iter().enumerate() {
        if let Some(i) = f.values().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                node: i,
                coords: vec![times[j]],
            });
        }
    }
    Ok(Trajectory {
        times,
        fields,
        duhamel,
        p_track: p_track.to_vec(),
        norms,
    })
}

fn step_context(times: &[f64], j: usize) -> String {
    format!(" at time step {j} (t = {:.6e})", times[j])
}

pub fn duhamel_solve(
    u0: &GridField,
    spec: &NonlinearitySpec,
    config: &SolverConfig,
) -> Result<(Trajectory, PicardReport)> {
    spec.validate()?;
    config.validate()?;
    let prop = Propagator::new(*u0.spec(), config.d)?;
    let times = time_grid(config.horizon, config.steps);
    let linear = linear_orbit(&prop, u0, &times)?;
    let picard = Picard {
        prop: &prop,
        times: &times,
        linear: &linear,
        mask: config.dealias.then(|| prop.spectral().dealias_mask()),
    };
    let (duhamel, report) = picard.run(
        |j, u| eval_with_context(spec, u, &step_context(&times, j)),
        config,
    )?;
    Ok((assemble(times, linear, duhamel, &config.p_track)?, report))
}

/// Result of splitting u₀ into a smooth part and a part small in exp L².
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub smooth: GridField,
    pub small: GridField,
    /// radial cutoff in units of the fundamental wavenumber 2π/L
    pub cutoff: f64,
    pub small_norm: f64,
}

/// v₀ = low-pass of u₀ with the smallest cutoff such that ‖u₀ − v₀‖_{exp L²} ≤ eps.
pub fn split_initial_data(u0: &GridField, eps: f64) -> Result<Split> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let spec = *u0.spec();
    let prop = Propagator::new(spec, 1)?;
    let spectral = prop.spectral();
    let hat = spectral.forward(u0);
    let fundamental = 2.0 * std::f64::consts::PI / spec.box_length;
    let radius: Vec<f64> = spectral.k_squared().iter().map(|k2| k2.sqrt() / fundamental).collect();
    let max_radius = radius.iter().cloned().fold(0.0, f64::max);
    let scale = hat.iter().map(|c| c.norm()).fold(0.0, f64::max);

    let mut cutoff = 0.0;
    loop {
        let dropped = hat
            .iter()
            .zip(&radius)
            .filter(|(_, &r)| r > cutoff + 1e-9)
            .map(|(c, _)| c.norm())
            .fold(0.0, f64::max);
        if dropped <= 1e-13 * scale {
            // nothing of substance above the cutoff: the canonical exact split
            return Ok(Split {
                smooth: u0.clone(),
                small: GridField::zeros(spec),
                cutoff,
                small_norm: 0.0,
            });
        }
        let low: Vec<Complex> = hat
            .iter()
            .zip(&radius)
            .map(|(&c, &r)| if r <= cutoff + 1e-9 { c } else { Complex::new(0.0, 0.0) })
            .collect();
        let smooth = spectral.inverse_real(low);
        let small = u0.sub(&smooth)?;
        let small_norm = exp_l2_norm(&small);
        if small_norm <= eps {
            return Ok(Split {
                smooth,
                small,
                cutoff,
                small_norm,
            });
        }
        if cutoff >= max_radius {
            return Err(Error::Infeasible(format!(
                "remainder norm {small_norm:.3e} exceeds eps = {eps:.3e} even with the full spectrum"
            )));
        }
        cutoff = if cutoff == 0.0 { 1.0 } else { (cutoff * 1.25).ceil().min(max_radius) };
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitSolution {
    pub split: Split,
    pub smooth: Trajectory,
    pub small: Trajectory,
    pub smooth_report: PicardReport,
    pub small_report: PicardReport,
    pub direct_report: PicardReport,
    /// sup_t ‖(v + w) − u‖₂ / sup_t ‖u‖₂ against a direct solve
    pub residual: f64,
}

/// Solve for v from v₀ with f, then for w from w₀ with source f(w + v) − f(v),
/// and compare v + w with a direct solve from u₀.
pub fn split_solve(
    u0: &GridField,
    spec: &NonlinearitySpec,
    config: &SolverConfig,
    eps: f64,
) -> Result<SplitSolution> {
    let split = split_initial_data(u0, eps)?;
    let (v, smooth_report) = duhamel_solve(&split.smooth, spec, config)?;

    let prop = Propagator::new(*u0.spec(), config.d)?;
    let times = v.times.clone();
    let linear = linear_orbit(&prop, &split.small, &times)?;
    let picard = Picard {
        prop: &prop,
        times: &times,
        linear: &linear,
        mask: config.dealias.then(|| prop.spectral().dealias_mask()),
    };
    let (w_duhamel, small_report) = picard.run(
        |j, w| {
            let ctx = step_context(&times, j);
            let total = eval_with_context(spec, &w.add(&v.fields[j])?, &ctx)?;
            let base = eval_with_context(spec, &v.fields[j], &ctx)?;
            total.sub(&base)
        },
        config,
    )?;
    let w = assemble(times, linear, w_duhamel, &config.p_track)?;

    let (direct, direct_report) = duhamel_solve(u0, spec, config)?;
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for j in 0..direct.times.len() {
        let sum = v.fields[j].add(&w.fields[j])?;
        num = num.max(lp_norm(&sum.sub(&direct.fields[j])?, 2.0)?);
        den = den.max(lp_norm(&direct.fields[j], 2.0)?);
    }
    let residual = if den == 0.0 { num } else { num / den };
    Ok(SplitSolution {
        split,
        smooth: v,
        small: w,
        smooth_report,
        small_report,
        direct_report,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YmCheck {
    pub value: f64,
    pub holds: bool,
}

/// sup_j t_j^σ‖u(t_j)‖_p + max_j ‖u(t_j)‖_{exp L²} against the radius M.
pub fn ym_membership(traj: &Trajectory, radius: f64, p: f64, sigma: f64) -> Result<YmCheck> {
    let k = traj.p_index(p)?;
    let weighted = traj
        .norms
        .iter()
        .map(|r| if r.t == 0.0 { 0.0 } else { r.t.powf(sigma) * r.lp[k] })
        .fold(0.0, f64::max);
    let orlicz = traj.norms.iter().map(|r| r.exp_l2).fold(0.0, f64::max);
    let value = weighted + orlicz;
    Ok(YmCheck {
        value,
        holds: value <= radius,
    })
}

/// ‖u(t_j) − e^{−t_j(−Δ)^d}u₀‖_{exp L²} for every time of the trajectory.
pub fn continuity_residual(traj: &Trajectory, u0: &GridField, d: u32) -> Result<Vec<f64>> {
    if traj.fields[0] == *u0 && traj.duhamel.len() == traj.fields.len() {
        return Ok(traj.duhamel.iter().map(exp_l2_norm).collect());
    }
    let prop = Propagator::new(*u0.spec(), d)?;
    traj.times
        .iter()
        .zip(&traj.fields)
        .map(|(&t, f)| Ok(exp_l2_norm(&f.sub(&prop.apply(t, u0)?)?)))
        .collect()
}

/// Observed order from three final-time solutions at steps s, 2s, 4s.
pub fn richardson_order(coarse: &GridField, mid: &GridField, fine: &GridField) -> Result<f64> {
    let e1 = lp_norm(&coarse.sub(mid)?, 2.0)?;
    let e2 = lp_norm(&mid.sub(fine)?, 2.0)?;
    if e2 == 0.0 {
        return Err(Error::Invalid("Richardson differences vanish".into()));
    }
    Ok((e1 / e2).log2())
}
