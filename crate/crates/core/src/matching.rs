//! Times at which a deformed area quantum equals the canonical quantum
//! `2πθ`, i.e. solutions of `f(t) = θ`.
//!
//! Two independent routes are kept side by side. [`closed_form_time`]
//! evaluates the published inverse-function formulas literally, including
//! the nested radicals for `K6`. [`numeric_roots`] scans `g(t) = f(t) - θ`
//! on a uniform grid and refines sign changes by bisection. [`validate`]
//! checks every closed-form candidate against the residual and cross-links
//! it to the scan, which is treated as ground truth.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::Serialize;

use crate::deformation::{DeformationModel, Family, Parity, Variant};
use crate::error::{Error, Result};
use crate::exec::{linspace, Execution};

pub const DEFAULT_GRID_POINTS: usize = 4096;
pub const MAX_GRID_POINTS: usize = 1 << 20;
pub const DEFAULT_TOL: f64 = 1e-12;

/// Residual bound for accepting a candidate, relative to `θ`.
pub const ACCEPT_REL: f64 = 1e-9;
/// Distance, in units of `τ`, within which a candidate matches a scan root.
pub const ROOT_MATCH_REL: f64 = 1e-8;
/// Imaginary part, in units of `τ`, tolerated on a complex-evaluated time.
pub const IMAG_REL: f64 = 1e-9;

const TANGENT_REL: f64 = 1e-10;
const CROWDED_REL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchQuery {
    pub model: DeformationModel,
    pub theta: f64,
    pub window: (f64, f64),
    pub tol: f64,
    pub grid_points: usize,
}

impl MatchQuery {
    /// Query with the default window `[-πτ, πτ]`, tolerance and grid.
    pub fn new(model: DeformationModel, theta: f64) -> Result<Self> {
        let tau = model.tau();
        let q = MatchQuery {
            model,
            theta,
            window: (-PI * tau, PI * tau),
            tol: DEFAULT_TOL,
            grid_points: DEFAULT_GRID_POINTS,
        };
        q.check()?;
        Ok(q)
    }

    pub fn with_window(mut self, lo: f64, hi: f64) -> Result<Self> {
        self.window = (lo, hi);
        self.check()?;
        Ok(self)
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        self.tol = tol;
        self.check()?;
        Ok(self)
    }

    pub fn with_grid_points(mut self, grid_points: usize) -> Result<Self> {
        self.grid_points = grid_points;
        self.check()?;
        Ok(self)
    }

    fn check(&self) -> Result<()> {
        if !(self.theta.is_finite() && self.theta > 0.0) {
            return Err(Error::InvalidQuery(format!("theta must be finite and > 0, got {}", self.theta)));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidQuery(format!("tol must be finite and > 0, got {}", self.tol)));
        }
        if !(DEFAULT_GRID_POINTS..=MAX_GRID_POINTS).contains(&self.grid_points) {
            return Err(Error::InvalidQuery(format!(
                "grid_points must lie in {DEFAULT_GRID_POINTS}..={MAX_GRID_POINTS}, got {}",
                self.grid_points
            )));
        }
        let (lo, hi) = self.window;
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::EmptyWindow { lo, hi });
        }
        Ok(())
    }

    fn contains(&self, t: f64) -> bool {
        self.window.0 <= t && t <= self.window.1
    }
}

/// Which root of the published expression a candidate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// The expression as printed.
    Printed,
    /// `-t` of the printed value (even families only).
    Mirrored,
    /// Other sign in front of the outer square root (`K5` only).
    Companion,
    /// `-t` of the companion value.
    CompanionMirrored,
}

impl Branch {
    fn mirrored(self) -> Branch {
        match self {
            Branch::Printed => Branch::Mirrored,
            Branch::Companion => Branch::CompanionMirrored,
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    /// The family whose formula produced the candidate.
    pub formula: Family,
    pub branch: Branch,
    /// Real time, `None` when the formula leaves the real domain.
    pub time: Option<f64>,
    /// Why the formula has no real value, when it has none.
    pub domain_issue: Option<String>,
}

impl Candidate {
    fn real(formula: Family, branch: Branch, time: f64) -> Self {
        Candidate { formula, branch, time: Some(time), domain_issue: None }
    }

    fn out_of_domain(formula: Family, branch: Branch, reason: String) -> Self {
        Candidate { formula, branch, time: None, domain_issue: Some(reason) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Multiplicity {
    Simple,
    /// Touches `θ` without crossing; found by minimizing `|g|`.
    AtLeastDouble,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericRoot {
    pub time: f64,
    pub bracket: (f64, f64),
    pub residual: f64,
    pub multiplicity: Multiplicity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Accepted { residual: f64 },
    /// Residual too large. `suspected_defect` is set when the scan did find
    /// real solutions, which points at the printed formula.
    Rejected { residual: f64, suspected_defect: bool },
    OutOfDomain { reason: String },
    /// Real and in-domain but outside the query window.
    OutOfWindow { residual: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateVerdict {
    pub candidate: Candidate,
    pub verdict: Verdict,
    /// Index into `numeric_roots` of the closest root, if any.
    pub nearest_root: Option<usize>,
    pub nearest_distance: Option<f64>,
    /// Closest root lies within `1e-8 τ`.
    pub matches_root: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchingTimeReport {
    pub query: MatchQuery,
    pub candidates: Vec<CandidateVerdict>,
    pub numeric_roots: Vec<NumericRoot>,
    /// Grid size actually used by the scan after any refinement.
    pub grid_points_used: usize,
    /// Range of `f` seen on the scan grid.
    pub sampled_range: (f64, f64),
    pub notes: Vec<String>,
}

impl MatchingTimeReport {
    pub fn accepted(&self) -> impl Iterator<Item = &CandidateVerdict> {
        self.candidates.iter().filter(|c| matches!(c.verdict, Verdict::Accepted { .. }))
    }

    /// A printed formula was rejected although real solutions exist.
    pub fn has_formula_defect(&self) -> bool {
        self.candidates
            .iter()
            .any(|c| matches!(c.verdict, Verdict::Rejected { suspected_defect: true, .. }))
    }
}

fn acosh_checked(x: f64) -> std::result::Result<f64, String> {
    if x >= 1.0 {
        Ok(x.acosh())
    } else {
        Err(format!("arccosh argument {x} < 1"))
    }
}

fn acos_checked(x: f64) -> std::result::Result<f64, String> {
    if (-1.0..=1.0).contains(&x) {
        Ok(x.acos())
    } else {
        Err(format!("arccos argument {x} outside [-1, 1]"))
    }
}

fn asin_checked(x: f64) -> std::result::Result<f64, String> {
    if (-1.0..=1.0).contains(&x) {
        Ok(x.asin())
    } else {
        Err(format!("arcsin argument {x} outside [-1, 1]"))
    }
}

/// `arccosh` for the plus variant, `arccos` for the minus variant.
fn inverse_c(variant: Variant, x: f64) -> std::result::Result<f64, String> {
    match variant {
        Variant::Plus => acosh_checked(x),
        Variant::Minus => acos_checked(x),
    }
}

fn inverse_s(variant: Variant, x: f64) -> std::result::Result<f64, String> {
    match variant {
        Variant::Plus => Ok(x.asinh()),
        Variant::Minus => asin_checked(x),
    }
}

/// Candidates from the published closed forms, evaluated as printed.
///
/// Even families get `±t` for every real value since only one sign is
/// printed. `K5` also gets the companion root of its quadratic in `C`.
/// Formulas that leave the real domain produce tagged candidates instead
/// of being dropped.
pub fn closed_form_time(query: &MatchQuery) -> Vec<Candidate> {
    let model = &query.model;
    let (kappa, tau, theta) = (model.kappa(), model.tau(), query.theta);
    let family = model.family();
    let variant = model.variant();

    let mut raw: Vec<(Branch, std::result::Result<f64, String>)> = Vec::new();
    match family {
        Family::K1 => {
            let arg = -(theta / kappa).sqrt();
            raw.push((Branch::Printed, inverse_c(variant, arg).map(|u| -tau * u)));
        }
        Family::K2 => {
            let arg = 2.0 * theta / (tau * kappa);
            raw.push((Branch::Printed, inverse_s(variant, arg).map(|u| 0.5 * tau * u)));
        }
        Family::K3 => {
            let arg = (theta / (tau * tau * kappa)).sqrt();
            raw.push((Branch::Printed, inverse_s(variant, arg).map(|u| -tau * u)));
        }
        Family::K4 => {
            let arg = 1.0 - (theta / (4.0 * tau.powi(4) * kappa)).sqrt();
            raw.push((Branch::Printed, inverse_c(variant, arg).map(|u| -tau * u)));
        }
        Family::K5 => {
            // printed: (1 ± sqrt(1 ± 4θ/(τ²κ)))/2 with both signs following the variant
            let sign = variant.sign();
            let radicand = 1.0 + sign * 4.0 * theta / (tau * tau * kappa);
            for (branch, outer) in [(Branch::Printed, sign), (Branch::Companion, -sign)] {
                let value = if radicand < 0.0 {
                    Err(format!("negative radicand {radicand} under the inner square root"))
                } else {
                    inverse_c(variant, 0.5 * (1.0 + outer * radicand.sqrt())).map(|u| -tau * u)
                };
                raw.push((branch, value));
            }
        }
        Family::K6 => {
            let c = k6_radical_argument(variant, theta / kappa, tau);
            let u = match variant {
                Variant::Plus => c.acosh(),
                Variant::Minus => c.acos(),
            };
            let t = -tau * u;
            let value = if t.im.abs() <= IMAG_REL * tau {
                Ok(t.re)
            } else {
                Err(format!("complex-valued time {} {:+}i", t.re, t.im))
            };
            raw.push((Branch::Printed, value));
        }
    }

    let mut out = Vec::new();
    for (branch, value) in raw {
        match value {
            Ok(t) => {
                out.push(Candidate::real(family, branch, t));
                if family.parity_class() == Parity::Even {
                    out.push(Candidate::real(family, branch.mirrored(), -t));
                }
            }
            Err(reason) => out.push(Candidate::out_of_domain(family, branch, reason)),
        }
    }
    out
}

/// Argument of the outer `arccosh`/`arccos` in the `K6` closed form, built
/// from the `A`, `B` radicals exactly as printed with principal branches.
/// `w` is `θ/κ`.
pub fn k6_radical_argument(variant: Variant, w: f64, tau: f64) -> Complex64 {
    // every "x/y" slash in the printed form picks x for plus, y for minus
    let s = variant.sign();
    let w2 = w * w;
    let root = Complex64::new(s * 16.0 * w2.powi(3) * tau.powi(18) + 27.0 * w2 * w2 * tau.powi(24), 0.0).sqrt();
    let inner = Complex64::new(-s * 9.0 * w2 * tau.powi(12), 0.0) - s * 3f64.sqrt() * root;
    let cube = inner.powf(1.0 / 3.0);

    let a = 2.0 * 2f64.powf(2.0 / 3.0) * w2 / (3f64.cbrt() * cube);
    let b = 2f64.cbrt() * cube / (3f64.powf(2.0 / 3.0) * tau.powi(6));

    let first = (1.0 - s * a + b).sqrt();
    let second = (2.0 + s * a - b - 2.0 / first).sqrt();
    0.5 + 0.5 * first - 0.5 * second
}

/// Real solutions of `f(t) = θ` in the query window.
pub fn numeric_roots(query: &MatchQuery) -> Result<Vec<NumericRoot>> {
    numeric_roots_with(query, Execution::default())
}

pub fn numeric_roots_with(query: &MatchQuery, exec: Execution) -> Result<Vec<NumericRoot>> {
    query.check()?;
    Ok(scan(query, query.theta, exec)?.roots)
}

/// Solutions of `f(t) = level` for any real nonzero `level`; shares the
/// scan used by [`numeric_roots`].
pub fn level_crossings(query: &MatchQuery, level: f64, exec: Execution) -> Result<Vec<NumericRoot>> {
    query.check()?;
    if !level.is_finite() || level == 0.0 {
        return Err(Error::InvalidQuery(format!("level must be finite and nonzero, got {level}")));
    }
    Ok(scan(query, level, exec)?.roots)
}

struct Scan {
    roots: Vec<NumericRoot>,
    grid_points: usize,
    range: (f64, f64),
}

fn scan(query: &MatchQuery, level: f64, exec: Execution) -> Result<Scan> {
    let model = query.model;
    let (lo, hi) = query.window;
    let scale = level.abs();
    let g = |t: f64| model.eval_f(t).map(|f| f - level);

    let mut points = query.grid_points;
    let (ts, gs) = loop {
        let ts = linspace(lo, hi, points);
        let gs = exec.map_slice(&ts, |&t| g(t)).into_iter().collect::<Result<Vec<f64>>>()?;
        // two adjacent small values on the same side suggest an unresolved pair
        let crowded = gs.windows(2).any(|w| {
            w[0].abs() < CROWDED_REL * scale && w[1].abs() < CROWDED_REL * scale && w[0] * w[1] > 0.0
        });
        if crowded && points < MAX_GRID_POINTS {
            points = (2 * points).min(MAX_GRID_POINTS);
            continue;
        }
        break (ts, gs);
    };

    let mut roots = Vec::new();
    let n = ts.len();
    for i in 0..n {
        let gi = gs[i];
        if gi == 0.0 {
            let left = if i > 0 { gs[i - 1] } else { 0.0 };
            let right = if i + 1 < n { gs[i + 1] } else { 0.0 };
            let multiplicity = if left * right > 0.0 { Multiplicity::AtLeastDouble } else { Multiplicity::Simple };
            roots.push(NumericRoot { time: ts[i], bracket: (ts[i], ts[i]), residual: 0.0, multiplicity });
            continue;
        }
        if i + 1 < n && gi * gs[i + 1] < 0.0 {
            let t = bisect(&g, ts[i], ts[i + 1], gi, query.tol)?;
            roots.push(NumericRoot {
                time: t,
                bracket: (ts[i], ts[i + 1]),
                residual: g(t)?.abs(),
                multiplicity: Multiplicity::Simple,
            });
        }
        if i > 0 && i + 1 < n {
            let (gl, gr) = (gs[i - 1], gs[i + 1]);
            let local_min = gi.abs() <= gl.abs() && gi.abs() <= gr.abs();
            if local_min && gl * gi > 0.0 && gi * gr > 0.0 {
                let abs_g = |t: f64| g(t).map(f64::abs);
                let t = golden_section_min(&abs_g, ts[i - 1], ts[i + 1], query.tol)?;
                let residual = abs_g(t)?;
                if residual <= TANGENT_REL * scale {
                    roots.push(NumericRoot {
                        time: t,
                        bracket: (ts[i - 1], ts[i + 1]),
                        residual,
                        multiplicity: Multiplicity::AtLeastDouble,
                    });
                }
            }
        }
    }

    roots.sort_by(|a, b| a.time.total_cmp(&b.time));
    roots.dedup_by(|later, earlier| (later.time - earlier.time).abs() <= query.tol);

    let range = gs
        .iter()
        .map(|v| v + level)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    Ok(Scan { roots, grid_points: points, range })
}

fn bisect<G>(g: &G, mut lo: f64, mut hi: f64, mut g_lo: f64, tol: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid)?;
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if g_lo * g_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            g_lo = g_mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn golden_section_min<H>(h: &H, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    H: Fn(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut h1 = h(x1)?;
    let mut h2 = h(x2)?;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if h1 <= h2 {
            hi = x2;
            x2 = x1;
            h2 = h1;
            x1 = hi - inv_phi * (hi - lo);
            h1 = h(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            h1 = h2;
            x2 = lo + inv_phi * (hi - lo);
            h2 = h(x2)?;
        }
    }
    Ok(if h1 <= h2 { x1 } else { x2 })
}

/// Runs both routes and grades every closed-form candidate.
pub fn validate(query: &MatchQuery) -> Result<MatchingTimeReport> {
    validate_with(query, Execution::default())
}

pub fn validate_with(query: &MatchQuery, exec: Execution) -> Result<MatchingTimeReport> {
    query.check()?;
    let model = query.model;
    let tau = model.tau();
    let theta = query.theta;
    let scan = scan(query, theta, exec)?;
    let roots = scan.roots;

    let mut candidates = Vec::new();
    for candidate in closed_form_time(query) {
        let verdict = match (candidate.time, &candidate.domain_issue) {
            (Some(t), _) => match model.eval_f(t) {
                Ok(f) => {
                    let residual = (f - theta).abs();
                    if !query.contains(t) {
                        Verdict::OutOfWindow { residual }
                    } else if residual <= ACCEPT_REL * theta {
                        Verdict::Accepted { residual }
                    } else {
                        Verdict::Rejected { residual, suspected_defect: !roots.is_empty() }
                    }
                }
                Err(e) => Verdict::OutOfDomain { reason: e.to_string() },
            },
            (None, reason) => Verdict::OutOfDomain { reason: reason.clone().unwrap_or_default() },
        };
        let nearest = candidate.time.and_then(|t| {
            roots
                .iter()
                .enumerate()
                .map(|(i, r)| (i, (r.time - t).abs()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
        });
        candidates.push(CandidateVerdict {
            candidate,
            verdict,
            nearest_root: nearest.map(|(i, _)| i),
            nearest_distance: nearest.map(|(_, d)| d),
            matches_root: nearest.is_some_and(|(_, d)| d <= ROOT_MATCH_REL * tau),
        });
    }

    let mut notes = Vec::new();
    if roots.is_empty() {
        notes.push(format!(
            "theta = {theta} is not reached in the window: f ranges over [{}, {}] on the scan grid",
            scan.range.0, scan.range.1
        ));
    }
    for cv in &candidates {
        match &cv.verdict {
            Verdict::Rejected { suspected_defect: true, residual } => notes.push(format!(
                "{} {:?} candidate t = {} misses (residual {residual}) while the scan finds {} root(s): suspected defect in the printed formula",
                cv.candidate.formula,
                cv.candidate.branch,
                cv.candidate.time.unwrap_or(f64::NAN),
                roots.len()
            )),
            Verdict::Accepted { .. } if !cv.matches_root => notes.push(format!(
                "accepted candidate t = {} has no scan root within {ROOT_MATCH_REL} tau",
                cv.candidate.time.unwrap_or(f64::NAN)
            )),
            _ => {}
        }
    }

    Ok(MatchingTimeReport {
        query: *query,
        candidates,
        numeric_roots: roots,
        grid_points_used: scan.grid_points,
        sampled_range: scan.range,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodicRoot {
    pub time: f64,
    pub shift: i64,
    pub residual: f64,
    pub verified: bool,
}

/// Translates every scan root by `2πτ k` for `k` in `shifts` and re-checks
/// the residual. Only the trigonometric variant is periodic.
pub fn enumerate_periodic(query: &MatchQuery, shifts: RangeInclusive<i64>) -> Result<Vec<PeriodicRoot>> {
    if query.model.variant() != Variant::Minus {
        return Err(Error::WrongVariant);
    }
    let base = numeric_roots(query)?;
    let period = 2.0 * PI * query.model.tau();
    let mut out = Vec::new();
    for k in shifts {
        for root in &base {
            let time = root.time + period * k as f64;
            let residual = (query.model.eval_f(time)? - query.theta).abs();
            out.push(PeriodicRoot { time, shift: k, residual, verified: residual <= ACCEPT_REL * query.theta });
        }
    }
    out.sort_by(|a, b| a.time.total_cmp(&b.time));
    Ok(out)
}
