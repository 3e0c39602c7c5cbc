//! Invariant suites over standard parameter grids, aggregated into
//! [`VerificationSummary`] records. Cases fan out through [`Execution`] and
//! come back in a fixed order.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::deformation::{DeformationModel, Family, Parity, Variant};
use crate::error::Result;
use crate::exec::{linspace, Execution};
use crate::fock;
use crate::limits;
use crate::matching::{self, MatchQuery, Verdict, ACCEPT_REL, ROOT_MATCH_REL};

/// Values used for both `κ` and `τ` in every suite.
pub const PARAMETER_GRID: [f64; 3] = [0.5, 1.0, 2.0];
/// Candidate sample times in units of `τ`; the first five with `|f| > 1e-6` are used.
pub const SAMPLE_TIMES: [f64; 8] = [-1.3, -0.4, 0.35, 0.9, 1.7, 2.3, -2.1, 0.6];
pub const SYMMETRY_GRID_POINTS: usize = 1000;
/// Times (in units of `τ`) whose `f` values become the matching-suite `θ`s.
pub const MATCH_REFERENCE_TIMES: [f64; 2] = [0.6, 1.3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Fock,
    Parity,
    Duality,
    Limits,
    Matching,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Fock, Suite::Parity, Suite::Duality, Suite::Limits, Suite::Matching];

    pub fn tag(self) -> &'static str {
        match self {
            Suite::Fock => "fock",
            Suite::Parity => "parity",
            Suite::Duality => "duality",
            Suite::Limits => "limits",
            Suite::Matching => "matching",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.tag() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown suite `{s}` (expected fock, parity, duality, limits or matching)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &'static str, deviation: f64, tolerance: f64) -> Self {
        Check { name, deviation, tolerance, passed: deviation <= tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseRecord {
    pub case: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub error: Option<String>,
}

impl CaseRecord {
    fn from_result(case: String, result: Result<Vec<Check>>) -> Self {
        match result {
            Ok(checks) => CaseRecord { passed: checks.iter().all(|c| c.passed), case, checks, error: None },
            Err(e) => CaseRecord { case, passed: false, checks: Vec::new(), error: Some(e.to_string()) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationSummary {
    pub suite: Suite,
    pub cases_run: usize,
    pub cases_passed: usize,
    /// Raw deviation of the check that came closest to (or furthest past)
    /// its tolerance.
    pub worst_deviation: f64,
    pub worst_check: Option<String>,
    /// `deviation / tolerance` for that check.
    pub worst_ratio: f64,
    /// Largest raw deviation seen for each check name.
    pub worst_by_check: BTreeMap<String, f64>,
    pub records: Vec<CaseRecord>,
}

impl VerificationSummary {
    fn from_records(suite: Suite, records: Vec<CaseRecord>) -> Self {
        let mut worst_by_check: BTreeMap<String, f64> = BTreeMap::new();
        let mut worst: Option<(&Check, &str)> = None;
        for record in &records {
            for check in &record.checks {
                let entry = worst_by_check.entry(check.name.to_string()).or_insert(0.0);
                *entry = entry.max(check.deviation);
                let ratio = check.deviation / check.tolerance;
                if worst.is_none_or(|(w, _)| ratio > w.deviation / w.tolerance) {
                    worst = Some((check, check.name));
                }
            }
        }
        VerificationSummary {
            suite,
            cases_run: records.len(),
            cases_passed: records.iter().filter(|r| r.passed).count(),
            worst_deviation: worst.map_or(0.0, |(c, _)| c.deviation),
            worst_check: worst.map(|(_, n)| n.to_string()),
            worst_ratio: worst.map_or(0.0, |(c, _)| c.deviation / c.tolerance),
            worst_by_check,
            records,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.cases_passed == self.cases_run
    }
}

pub fn run_suite(suite: Suite, dim: usize, exec: Execution) -> VerificationSummary {
    match suite {
        Suite::Fock => fock_suite(dim, exec),
        Suite::Parity => parity_suite(exec),
        Suite::Duality => duality_suite(exec),
        Suite::Limits => limits_suite(exec),
        Suite::Matching => matching_suite(exec),
    }
}

/// Every `(family, variant, κ, τ)` on the standard grid, in a fixed order.
pub fn standard_models(families: &[Family]) -> Vec<DeformationModel> {
    let mut out = Vec::new();
    for &family in families {
        for variant in Variant::ALL {
            for kappa in PARAMETER_GRID {
                for tau in PARAMETER_GRID {
                    out.push(DeformationModel::new(family, variant, kappa, tau).expect("grid values are positive"));
                }
            }
        }
    }
    out
}

fn label(m: &DeformationModel) -> String {
    format!("{} {} kappa={} tau={}", m.family(), m.variant(), m.kappa(), m.tau())
}

/// Five times with `|f| > 1e-6` taken from [`SAMPLE_TIMES`].
pub fn sample_times(model: &DeformationModel) -> Vec<f64> {
    SAMPLE_TIMES
        .iter()
        .map(|u| u * model.tau())
        .filter(|&t| model.eval_f(t).is_ok_and(|f| f.abs() > 1e-6))
        .take(5)
        .collect()
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Checks every truncated-representation identity for one `(model, t)`.
pub fn fock_checks(model: &DeformationModel, t: f64, dim: usize) -> Result<Vec<Check>> {
    let rep = fock::build_rep(model, t, dim)?;
    let d = dim as f64;
    let identity = DMatrix::<f64>::identity(dim, dim);

    let comm = &rep.a * &rep.a_dagger - &rep.a_dagger * &rep.a;
    let comm_defect = &comm - &identity;
    let corner = comm[(dim - 1, dim - 1)];

    let exact_number = DMatrix::from_fn(dim, dim, |i, j| if i == j { i as f64 } else { 0.0 });
    let coord_number = fock::number_from_coordinates(model, t, dim)?;
    let n_raise = (&coord_number * &rep.a_dagger - &rep.a_dagger * &coord_number) - &rep.a_dagger;
    let n_lower = (&coord_number * &rep.a - &rep.a * &coord_number) + &rep.a;
    let n_scale = fock::number_commutator_scale(dim);

    let area = fock::area_diagonal_report(&rep);
    let scale = 2.0 * PI * rep.f_value;
    let identity_defect = (&rep.area / scale) - (&rep.number + &identity * 0.5);

    let eig = fock::sorted_eigenvalues(&rep.area);
    let expected = fock::expected_area_eigenvalues(rep.f_value, dim);
    let eig_dev = eig.iter().zip(&expected).map(|(a, b)| rel_diff(*a, *b)).fold(0.0, f64::max);

    let mut residual: f64 = 0.0;
    for n in 0..dim - 1 {
        residual = residual.max(fock::eigenstate_residual(&rep, n)? / area.norm);
    }

    Ok(vec![
        Check::at_most("commutator_interior", fock::interior_max_abs(&comm_defect), 1e-13),
        Check::at_most("commutator_corner", rel_diff(corner, -(d - 1.0)), 1e-10),
        Check::at_most("number_ladder", (&rep.number - &exact_number).amax(), 1e-13),
        Check::at_most("number_raise_interior", fock::interior_max_abs(&n_raise) / n_scale, 1e-13),
        Check::at_most("number_lower_interior", fock::interior_max_abs(&n_lower) / n_scale, 1e-13),
        Check::at_most(
            "number_coordinates",
            fock::interior_max_abs(&(&coord_number - &rep.number)),
            1e-12,
        ),
        Check::at_most("area_off_diagonal", area.max_off_diagonal / area.norm, 1e-12),
        Check::at_most("area_interior", area.interior_max_rel_deviation, 1e-10),
        Check::at_most("area_corner", rel_diff(area.corner_value, area.expected_corner), 1e-10),
        Check::at_most("area_identity", fock::interior_max_abs(&identity_defect), 1e-12),
        Check::at_most("area_eigenvalues", eig_dev, 1e-10),
        Check::at_most("eigenstate_residual", residual, 1e-10),
    ])
}

pub fn fock_suite(dim: usize, exec: Execution) -> VerificationSummary {
    let mut jobs = Vec::new();
    for model in standard_models(&Family::ALL) {
        for t in sample_times(&model) {
            jobs.push((model, t));
        }
    }
    let records = exec.map_slice(&jobs, |(model, t)| {
        CaseRecord::from_result(format!("{} t={t}", label(model)), fock_checks(model, *t, dim))
    });
    VerificationSummary::from_records(Suite::Fock, records)
}

/// Worst relative deviation from `f(-t) = ±f(t)` on the symmetric grid.
pub fn parity_deviation(model: &DeformationModel, exec: Execution) -> Result<f64> {
    let tau = model.tau();
    let grid = linspace(-3.0 * tau, 3.0 * tau, SYMMETRY_GRID_POINTS);
    let sign = match model.family().parity_class() {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };
    let devs = exec.map_slice(&grid, |&t| -> Result<f64> {
        Ok(rel_diff(model.eval_f(-t)?, sign * model.eval_f(t)?))
    });
    devs.into_iter().try_fold(0.0, |acc: f64, d| Ok(acc.max(d?)))
}

/// Worst relative deviation between the substituted formula and the dual family.
pub fn duality_deviation(model: &DeformationModel, exec: Execution) -> Result<f64> {
    let tau = model.tau();
    let dual = model
        .dual()
        .ok_or(crate::error::Error::UnsupportedFamily(model.family().tag()))?;
    let grid = linspace(-3.0 * tau, 3.0 * tau, SYMMETRY_GRID_POINTS);
    let devs = exec.map_slice(&grid, |&t| -> Result<f64> {
        Ok(rel_diff(model.apply_duality(t)?, dual.eval_f(t)?))
    });
    devs.into_iter().try_fold(0.0, |acc: f64, d| Ok(acc.max(d?)))
}

pub fn parity_suite(exec: Execution) -> VerificationSummary {
    let models = standard_models(&Family::ALL);
    let records = exec.map_slice(&models, |m| {
        let result = parity_deviation(m, Execution::Sequential).map(|d| vec![Check::at_most("parity", d, 1e-12)]);
        CaseRecord::from_result(label(m), result)
    });
    VerificationSummary::from_records(Suite::Parity, records)
}

pub fn duality_suite(exec: Execution) -> VerificationSummary {
    let models = standard_models(&[Family::K1, Family::K2, Family::K3]);
    let records = exec.map_slice(&models, |m| {
        let result = duality_deviation(m, Execution::Sequential).map(|d| vec![Check::at_most("duality", d, 1e-12)]);
        CaseRecord::from_result(label(m), result)
    });
    VerificationSummary::from_records(Suite::Duality, records)
}

/// Times (not scaled by τ) at which the limit suite measures convergence.
pub const LIMIT_TIMES: [f64; 3] = [0.5, 1.0, 2.0];

pub fn limit_checks(model: &DeformationModel, t: f64) -> Result<Vec<Check>> {
    let report = limits::galilei_report(model, t, &limits::default_tau_ladder(t))?;
    let order_dev = report.fitted_order.map_or(f64::INFINITY, |o| (o - 2.0).abs());
    let ratio_dev = report.ratios.iter().map(|r| (r - 4.0).abs()).fold(0.0, f64::max);

    // leading τ-independent series coefficient against the hard-coded monomial
    let (degree, coefficient) = report.polynomial.terms[0];
    let series = model.with_tau(report.rows[0].tau)?.series_expand(degree as usize)?;
    let lower = series[..degree as usize].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let poly_dev = rel_diff(series[degree as usize], coefficient).max(lower);

    Ok(vec![
        Check::at_most("fitted_order", order_dev, 0.2),
        Check::at_most("doubling_ratio", ratio_dev, 0.5),
        Check::at_most("limit_polynomial", poly_dev, 1e-14),
    ])
}

pub fn limits_suite(exec: Execution) -> VerificationSummary {
    let mut jobs = Vec::new();
    for family in Family::ALL {
        for variant in Variant::ALL {
            for kappa in PARAMETER_GRID {
                for t in LIMIT_TIMES {
                    jobs.push((DeformationModel::new(family, variant, kappa, 1.0).expect("positive"), t));
                }
            }
        }
    }
    let records = exec.map_slice(&jobs, |(m, t)| {
        CaseRecord::from_result(
            format!("{} {} kappa={} t={t}", m.family(), m.variant(), m.kappa()),
            limit_checks(m, *t),
        )
    });
    VerificationSummary::from_records(Suite::Limits, records)
}

/// Closed forms that are expected to hold wherever they are real.
pub fn closed_form_expected_sound(family: Family) -> bool {
    matches!(family, Family::K2 | Family::K3 | Family::K4)
}

pub fn matching_checks(query: &MatchQuery, reference_time: f64) -> Result<Vec<Check>> {
    let report = matching::validate_with(query, Execution::Sequential)?;
    let tau = query.model.tau();
    let theta = query.theta;

    let found_reference = report
        .numeric_roots
        .iter()
        .map(|r| (r.time - reference_time).abs())
        .fold(f64::INFINITY, f64::min);

    let accepted_link = report
        .accepted()
        .map(|c| c.nearest_distance.unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);

    let mut checks = vec![
        Check::at_most("oracle_finds_reference", found_reference, ROOT_MATCH_REL * tau),
        Check::at_most("accepted_matches_root", accepted_link, ROOT_MATCH_REL * tau),
    ];

    if closed_form_expected_sound(query.model.family()) {
        let worst = report
            .candidates
            .iter()
            .filter_map(|c| match c.verdict {
                Verdict::Accepted { residual } | Verdict::Rejected { residual, .. } => Some(residual / theta),
                _ => None,
            })
            .fold(0.0, f64::max);
        checks.push(Check::at_most("closed_form_residual", worst, ACCEPT_REL));
    } else {
        // every candidate carries an explicit verdict and real ones are linked to the scan
        let silent = report.candidates.is_empty()
            || report
                .candidates
                .iter()
                .any(|c| c.candidate.time.is_some() && !report.numeric_roots.is_empty() && c.nearest_root.is_none());
        checks.push(Check::at_most("explicit_verdicts", if silent { 1.0 } else { 0.0 }, 0.0));
    }
    Ok(checks)
}

/// One query per standard model and reference time, `θ = f(t_ref)`.
pub fn matching_cases() -> Vec<(MatchQuery, f64)> {
    let mut out = Vec::new();
    for model in standard_models(&Family::ALL) {
        for u in MATCH_REFERENCE_TIMES {
            let t_ref = u * model.tau();
            let theta = model.eval_f(t_ref).expect("reference time is in range");
            out.push((MatchQuery::new(model, theta).expect("theta is positive"), t_ref));
        }
    }
    out
}

pub fn matching_suite(exec: Execution) -> VerificationSummary {
    let cases = matching_cases();
    let records = exec.map_slice(&cases, |(q, t_ref)| {
        CaseRecord::from_result(format!("{} theta={}", label(&q.model), q.theta), matching_checks(q, *t_ref))
    });
    VerificationSummary::from_records(Suite::Matching, records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        for s in Suite::ALL {
            assert_eq!(s.tag().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn sample_times_avoid_zeros() {
        for m in standard_models(&Family::ALL) {
            let ts = sample_times(&m);
            assert_eq!(ts.len(), 5, "{m:?}");
        }
    }

    #[test]
    fn summary_tracks_worst() {
        let records = vec![
            CaseRecord::from_result("a".into(), Ok(vec![Check::at_most("x", 1e-14, 1e-13)])),
            CaseRecord::from_result("b".into(), Ok(vec![Check::at_most("x", 5e-13, 1e-13)])),
        ];
        let s = VerificationSummary::from_records(Suite::Parity, records);
        assert_eq!(s.cases_run, 2);
        assert_eq!(s.cases_passed, 1);
        assert_eq!(s.worst_deviation, 5e-13);
        assert!(!s.all_passed());
    }

    #[test]
    fn small_fock_case_passes() {
        let m = DeformationModel::new(Family::K5, Variant::Minus, 2.0, 0.5).unwrap();
        let checks = fock_checks(&m, 0.4, 16).unwrap();
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
    }
}
