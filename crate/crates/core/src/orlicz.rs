//! Luxemburg norms, decreasing rearrangements, the `exp L²` embedding and
//! moment inequalities, and the explicit witness functions.

use std::f64::consts::{E, PI};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{lp_norm_unchecked, sample_radial_clipped, GridField, GridSpec};
use crate::specfun;

/// Relative width at which the Luxemburg bisection stops.
pub const LUXEMBURG_REL_WIDTH: f64 = 1e-12;
const LUXEMBURG_MAX_BISECTIONS: usize = 80;
/// Slack granted to inequality checks for the bisection and summation error.
pub const INEQUALITY_SLACK: f64 = 1e-9;

/// Young function φ generating an Orlicz space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum YoungFunction {
    /// φ(s) = e^{s²} − 1
    ExpL2,
    /// φ(s) = e^{s²} − 1 − s²
    Phi8,
    /// φ(s) = s^p, p ≥ 1
    Power(f64),
}

impl YoungFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            YoungFunction::Power(p) if !(p >= 1.0) || !p.is_finite() => Err(Error::Domain(
                format!("power Young function needs finite p >= 1, got {p}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        let s = s.abs();
        match *self {
            YoungFunction::ExpL2 => (s * s).exp_m1(),
            YoungFunction::Phi8 => phi8(s * s),
            YoungFunction::Power(p) => s.powf(p),
        }
    }

    /// φ(s)·w, computed in log domain for large s. Returns `inf` when the
    /// product exceeds the double range.
    fn weighted(&self, s: f64, ln_w: f64, w: f64) -> f64 {
        let s2 = s * s;
        match *self {
            YoungFunction::ExpL2 | YoungFunction::Phi8 if s2 > 700.0 => {
                let ln_term = s2 + ln_w;
                if ln_term > 700.0 {
                    f64::INFINITY
                } else {
                    ln_term.exp()
                }
            }
            _ => self.eval(s) * w,
        }
    }
}

fn phi8(x: f64) -> f64 {
    // e^x − 1 − x without cancellation for small x
    if x < 0.1 {
        let mut term = x * x / 2.0;
        let mut sum = term;
        let mut k = 2.0;
        while term > sum * 1e-17 {
            k += 1.0;
            term *= x / k;
            sum += term;
        }
        sum
    } else {
        x.exp_m1() - x
    }
}

/// Σ φ(|u_i|/α) h^N; `inf` once a single cell already exceeds the range.
pub fn modular(values: &[f64], cell: f64, phi: YoungFunction, alpha: f64) -> f64 {
    let ln_w = cell.ln();
    let mut sum = 0.0;
    for &v in values {
        if v == 0.0 {
            continue;
        }
        let t = phi.weighted(v / alpha, ln_w, cell);
        if !t.is_finite() {
            return f64::INFINITY;
        }
        sum += t;
    }
    sum
}

/// Luxemburg norm inf{α > 0 : Σ φ(|u_i|/α) h^N ≤ 1}.
///
/// The returned α always satisfies the defining inequality; it sits within
/// a relative distance [`LUXEMBURG_REL_WIDTH`] above the infimum.
pub fn luxemburg_norm(field: &GridField, phi: YoungFunction) -> Result<f64> {
    phi.validate()?;
    Ok(luxemburg_values(field.values(), field.spec().cell_volume(), field.spec().volume(), phi))
}

pub(crate) fn luxemburg_values(values: &[f64], cell: f64, volume: f64, phi: YoungFunction) -> f64 {
    let sup = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if sup == 0.0 {
        return 0.0;
    }
    let below_one = |a: f64| modular(values, cell, phi, a) <= 1.0;
    let mut hi = sup / (1.0 + 1.0 / volume).ln().sqrt();
    while !below_one(hi) {
        hi *= 2.0;
    }
    let mut lo = hi;
    loop {
        lo *= 0.5;
        if !below_one(lo) {
            break;
        }
        hi = lo;
    }
    for _ in 0..LUXEMBURG_MAX_BISECTIONS {
        if hi - lo <= LUXEMBURG_REL_WIDTH * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if below_one(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `exp L²` norm shorthand.
pub fn exp_l2_norm(field: &GridField) -> f64 {
    let s = field.spec();
    luxemburg_values(field.values(), s.cell_volume(), s.volume(), YoungFunction::ExpL2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityCheck {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            holds: lhs <= rhs * (1.0 + INEQUALITY_SLACK),
        }
    }
}

/// ‖u‖_r ≤ Γ(r/2+1)^{1/r} ‖u‖_{exp L²} for 2 ≤ r < ∞.
pub fn embedding_check(field: &GridField, r: f64) -> Result<InequalityCheck> {
    if !(r >= 2.0) || !r.is_finite() {
        return Err(Error::Domain(format!("embedding needs 2 <= r < inf, got {r}")));
    }
    let lhs = lp_norm_unchecked(field.values(), field.spec().cell_volume(), r);
    let constant = (specfun::ln_gamma(0.5 * r + 1.0)? / r).exp();
    Ok(InequalityCheck::new(lhs, constant * exp_l2_norm(field)))
}

/// ‖e^{λu²} − 1‖_p ≤ (λpK²)^{1/p} whenever ‖u‖_{exp L²} ≤ K and λpK² ≤ 1.
pub fn exp_moment_bound(field: &GridField, lambda: f64, p: f64, k: f64) -> Result<InequalityCheck> {
    if !(lambda > 0.0) || !(p >= 1.0) || !p.is_finite() || !(k > 0.0) {
        return Err(Error::Domain(format!(
            "need lambda > 0, 1 <= p < inf, K > 0; got ({lambda}, {p}, {k})"
        )));
    }
    let product = lambda * p * k * k;
    // allow a few ulps so that λ = 1/(pK²) computed in floating point is admissible
    if product > 1.0 + 4.0 * f64::EPSILON {
        return Err(Error::Hypothesis(format!("lambda*p*K^2 = {product} > 1")));
    }
    let norm = exp_l2_norm(field);
    if norm > k {
        return Err(Error::Hypothesis(format!(
            "||u||_expL2 = {norm} exceeds K = {k}"
        )));
    }
    let transformed: Vec<f64> = field
        .values()
        .iter()
        .map(|&u| (lambda * u * u).exp_m1())
        .collect();
    if let Some(node) = transformed.iter().position(|v| !v.is_finite()) {
        return Err(Error::Overflow {
            node,
            exponent: lambda * field.values()[node].powi(2),
            context: String::new(),
        });
    }
    let lhs = lp_norm_unchecked(&transformed, field.spec().cell_volume(), p);
    Ok(InequalityCheck::new(lhs, product.powf(1.0 / p)))
}

/// ‖u‖_{exp L²} ≤ (‖u‖_2 + ‖u‖_∞)/√(log 2).
pub fn log2_bound(field: &GridField) -> InequalityCheck {
    let cell = field.spec().cell_volume();
    let l2 = lp_norm_unchecked(field.values(), cell, 2.0);
    let sup = field.sup_norm();
    InequalityCheck::new(exp_l2_norm(field), (l2 + sup) / 2f64.ln().sqrt())
}

/// Decreasing rearrangement u♯ of |u| and its running average u♯♯.
///
/// Sample j occupies the measure interval ((j−1)h^N, j h^N]; `radii[j]` is
/// its right end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RearrangementProfile {
    pub cell: f64,
    pub radii: Vec<f64>,
    pub u_sharp: Vec<f64>,
    pub u_sharpsharp: Vec<f64>,
}

pub fn rearrange(field: &GridField) -> RearrangementProfile {
    let cell = field.spec().cell_volume();
    let mut u_sharp: Vec<f64> = field.values().iter().map(|v| v.abs()).collect();
    u_sharp.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut radii = Vec::with_capacity(u_sharp.len());
    let mut u_sharpsharp = Vec::with_capacity(u_sharp.len());
    let mut acc = 0.0;
    for (j, &v) in u_sharp.iter().enumerate() {
        acc += v;
        let r = (j + 1) as f64 * cell;
        radii.push(r);
        // (1/r) Σ_{i≤j} u♯_i h^N = acc / (j+1); never below the current u♯ value
        u_sharpsharp.push((acc / (j + 1) as f64).max(v));
    }
    RearrangementProfile {
        cell,
        radii,
        u_sharp,
        u_sharpsharp,
    }
}

impl RearrangementProfile {
    /// u♯ at measure coordinate r (0 beyond the support).
    pub fn sharp_at(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return self.u_sharp.first().copied().unwrap_or(0.0);
        }
        let j = ((r / self.cell).ceil() as usize).saturating_sub(1);
        self.u_sharp.get(j).copied().unwrap_or(0.0)
    }

    /// Exact average (1/r)∫₀^r u♯ of the piecewise-constant rearrangement.
    pub fn sharpsharp_at(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return self.sharp_at(0.0);
        }
        let full = ((r / self.cell).floor() as usize).min(self.u_sharp.len());
        let head = if full == 0 {
            0.0
        } else {
            self.u_sharpsharp[full - 1] * self.radii[full - 1]
        };
        let partial = if full < self.u_sharp.len() {
            (r - full as f64 * self.cell) * self.u_sharp[full]
        } else {
            0.0
        };
        (head + partial) / r
    }

    /// ‖u♯‖_{L^p(0,∞)}.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm_unchecked(&self.u_sharp, self.cell, p)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "r,u_sharp,u_sharpsharp")?;
        for ((r, a), b) in self.radii.iter().zip(&self.u_sharp).zip(&self.u_sharpsharp) {
            writeln!(w, "{r:e},{a:e},{b:e}")?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpBound {
    /// sup_{0<r≤1} u♯♯(r) / (log(e/r))^{1/2}
    pub sup_quotient: f64,
    pub l2: f64,
    pub lux_norm: f64,
}

impl SharpBound {
    /// (sup_quotient + ‖u‖_2)/‖u‖_{exp L²}; zero for the zero field.
    pub fn ratio(&self) -> f64 {
        if self.lux_norm == 0.0 {
            0.0
        } else {
            (self.sup_quotient + self.l2) / self.lux_norm
        }
    }

    pub fn holds(&self, constant: f64) -> bool {
        self.sup_quotient + self.l2 <= constant * self.lux_norm * (1.0 + INEQUALITY_SLACK)
    }
}

/// Left-hand side of the rearrangement lower bound for the `exp L²` norm.
pub fn sharp_norm_lower_bound(field: &GridField) -> SharpBound {
    let profile = rearrange(field);
    let sup_quotient = profile
        .radii
        .iter()
        .zip(&profile.u_sharpsharp)
        .take_while(|(&r, _)| r <= 1.0)
        .map(|(&r, &v)| v / (E / r).ln().sqrt())
        .fold(0.0, f64::max);
    SharpBound {
        sup_quotient,
        l2: lp_norm_unchecked(field.values(), profile.cell, 2.0),
        lux_norm: exp_l2_norm(field),
    }
}

/// Smallest constant C making every bound in the corpus hold.
pub fn empirical_sharp_constant(bounds: &[SharpBound]) -> f64 {
    bounds.iter().map(SharpBound::ratio).fold(0.0, f64::max)
}

/// (‖u‖_2 + ‖u‖_{L^φ8}) / ‖u‖_{exp L²}; the two-sided bounds of this ratio
/// over a corpus are the equivalence constants between the spaces.
pub fn phi8_equivalence_ratio(field: &GridField) -> f64 {
    let s = field.spec();
    let lux = exp_l2_norm(field);
    if lux == 0.0 {
        return 0.0;
    }
    let l2 = lp_norm_unchecked(field.values(), s.cell_volume(), 2.0);
    let phi8 = luxemburg_values(field.values(), s.cell_volume(), s.volume(), YoungFunction::Phi8);
    (l2 + phi8) / lux
}

/// Volume ω_N of the unit ball in ℝ^N.
pub fn unit_ball_volume(n: usize) -> f64 {
    let half = 0.5 * n as f64;
    (half * PI.ln() - specfun::ln_gamma(half + 1.0).expect("positive")).exp()
}

/// Explicit functions separating `exp L²`, `exp L²₀`, `L^∞` and `L^r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Witness {
    /// (−log|x|)^{1/2} on |x| ≤ 1: in exp L² but not in exp L²₀.
    OrlLebI,
    /// (log(1 − log|x|))^{1/2} on |x| ≤ 1: in exp L²₀ but unbounded.
    OrlLebII,
    /// |x|^{−N/r} on |x| ≥ 1 with r ∈ [1, 2): in exp L²₀ but not in L^r.
    OrlLebIII(f64),
    /// Datum on which the semigroup is not continuous at t = 0 in exp L².
    Discontinuity,
}

/// Profile of the discontinuity witness in the measure variable s = ω_N|x|^N.
///
/// Its primitive is s·(log(e/s))^{1/2}, so the running average equals
/// (log(e/r))^{1/2} on the support. The formula is positive and decreasing
/// only for s < √e; beyond that it is negative and at s = e singular, so the
/// support is cut at s = √e.
pub fn discontinuity_profile(s: f64) -> f64 {
    if s <= 0.0 || s >= E.sqrt() {
        return 0.0;
    }
    let l = s.ln();
    (1.0 - 2.0 * l) / (2.0 * (1.0 - l).sqrt())
}

pub fn witness_function(which: Witness, spec: &GridSpec) -> Result<GridField> {
    spec.validate()?;
    let n = spec.dimension as f64;
    match which {
        Witness::OrlLebI => sample_radial_clipped(spec, |r| if r <= 1.0 { (-r.ln()).sqrt() } else { 0.0 }),
        Witness::OrlLebII => sample_radial_clipped(spec, |r| {
            if r <= 1.0 {
                (1.0 - r.ln()).ln().sqrt()
            } else {
                0.0
            }
        }),
        Witness::OrlLebIII(r_exp) => {
            if !(1.0..2.0).contains(&r_exp) {
                return Err(Error::Domain(format!(
                    "OrlLeb_iii parameter must lie in [1, 2), got {r_exp}"
                )));
            }
            sample_radial_clipped(spec, |r| if r >= 1.0 { r.powf(-n / r_exp) } else { 0.0 })
        }
        Witness::Discontinuity => {
            let omega = unit_ball_volume(spec.dimension);
            sample_radial_clipped(spec, |r| {
                if r >= 1.0 {
                    0.0
                } else {
                    discontinuity_profile(omega * r.powf(n))
                }
            })
        }
    }
}

/// Integrals ∫(e^{u²/α²} − 1) of a witness over successive refinements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipScan {
    pub alpha: f64,
    pub points_per_axis: Vec<usize>,
    pub integrals: Vec<f64>,
    /// Increments between refinements stopped shrinking.
    pub diverging: bool,
}

/// Refinement-divergence diagnostic for `exp L²₀` membership at scale α.
///
/// A finite grid always yields a finite integral; membership is read off
/// the trend: converging increments ⇒ finite integral at this α.
pub fn membership_scan(which: Witness, base: &GridSpec, alpha: f64, levels: usize) -> Result<MembershipScan> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    if levels < 3 {
        return Err(Error::Domain("membership scan needs at least 3 levels".into()));
    }
    let mut points = Vec::with_capacity(levels);
    let mut integrals = Vec::with_capacity(levels);
    let mut spec = *base;
    for level in 0..levels {
        if level > 0 {
            spec = spec.refined(2)?;
        }
        let u = witness_function(which, &spec)?;
        let integral = modular(u.values(), spec.cell_volume(), YoungFunction::ExpL2, alpha);
        points.push(spec.points_per_axis);
        integrals.push(integral);
    }
    let k = integrals.len();
    let last = integrals[k - 1] - integrals[k - 2];
    let prev = integrals[k - 2] - integrals[k - 3];
    let diverging = !integrals[k - 1].is_finite() || (last > 0.0 && last >= prev * 0.999);
    Ok(MembershipScan {
        alpha,
        points_per_axis: points,
        integrals,
        diverging,
    })
}
