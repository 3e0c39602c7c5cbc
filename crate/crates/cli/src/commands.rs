use serde::Serialize;
use serde_json::{json, Value};

use nhspec_core::fock::MAX_DIM;
use nhspec_core::limits::{default_tau_ladder, galilei_report};
use nhspec_core::matching::{validate_with, MatchQuery, Verdict};
use nhspec_core::spectrum::{canonical_spectrum, spectrum, SpectrumTable};
use nhspec_core::verify::run_suite;
use nhspec_core::exec::linspace;
use nhspec_core::{DeformationModel, Execution, Suite};

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;
use crate::output::{csv_string, emit, format_f64, json_string};

/// Accepted range for the fitted convergence order of the limit report.
pub const ORDER_RANGE: (f64, f64) = (1.8, 2.2);

const DEFAULT_N_MAX: u32 = 10;
const DEFAULT_DIM: usize = 64;

struct Table {
    header: &'static [&'static str],
    rows: Vec<Vec<String>>,
}

fn write<D: Serialize>(command: &str, cfg: &RunConfig, data: &D, table: impl FnOnce() -> Table) -> Result<(), CliError> {
    let text = match cfg.format() {
        OutputFormat::Json => {
            let meta = json!({
                "command": command,
                "version": env!("CARGO_PKG_VERSION"),
                "settings": cfg,
            });
            json_string(&meta, data)?
        }
        OutputFormat::Csv => {
            let t = table();
            csv_string(t.header, &t.rows)?
        }
    };
    emit(&text, cfg.output_path.as_deref())
}

fn model(cfg: &RunConfig) -> Result<DeformationModel, CliError> {
    Ok(DeformationModel::new(
        RunConfig::require(&cfg.family, "family")?,
        RunConfig::require(&cfg.variant, "variant")?,
        RunConfig::require(&cfg.kappa, "kappa")?,
        RunConfig::require(&cfg.tau, "tau")?,
    )?)
}

fn f(x: f64) -> String {
    format_f64(x)
}

fn opt(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

#[derive(Serialize)]
struct EvalRow {
    t: f64,
    f: f64,
    quantum: f64,
}

pub fn eval(cfg: &RunConfig) -> Result<(), CliError> {
    let m = model(cfg)?;
    let times = match (cfg.t, cfg.t_grid) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --t or --t-grid, not both".into())),
        (Some(t), None) => vec![t],
        (None, Some(g)) => linspace(g.lo, g.hi, g.count),
        (None, None) => return Err(CliError::Usage("missing required setting --t or --t-grid".into())),
    };
    let rows = times
        .iter()
        .map(|&t| Ok(EvalRow { t, f: m.eval_f(t)?, quantum: m.eval_quantum(t)? }))
        .collect::<Result<Vec<_>, CliError>>()?;
    write("eval", cfg, &rows, || Table {
        header: &["t", "f", "quantum"],
        rows: rows.iter().map(|r| vec![f(r.t), f(r.f), f(r.quantum)]).collect(),
    })
}

pub fn spectrum_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let n_max = cfg.n_max.unwrap_or(DEFAULT_N_MAX);
    let table: SpectrumTable = if cfg.canonical.unwrap_or(false) {
        canonical_spectrum(RunConfig::require(&cfg.theta, "theta")?, n_max)?
    } else {
        spectrum(&model(cfg)?, RunConfig::require(&cfg.t, "t")?, n_max)?
    };
    write("spectrum", cfg, &table, || Table {
        header: &["n", "s_n"],
        rows: table.levels.iter().map(|l| vec![l.n.to_string(), f(l.s_n)]).collect(),
    })
}

pub fn match_cmd(cfg: &RunConfig, exec: Execution) -> Result<(), CliError> {
    let mut query = MatchQuery::new(model(cfg)?, RunConfig::require(&cfg.theta, "theta")?)?;
    if let Some(w) = cfg.window {
        query = query.with_window(w.lo, w.hi)?;
    }
    if let Some(tol) = cfg.tol {
        query = query.with_tol(tol)?;
    }
    if let Some(points) = cfg.grid_points {
        query = query.with_grid_points(points)?;
    }
    let report = validate_with(&query, exec)?;
    write("match", cfg, &report, || {
        let mut rows = Vec::new();
        for c in &report.candidates {
            let branch = serde_json::to_value(c.candidate.branch).ok();
            let branch = branch.as_ref().and_then(Value::as_str).unwrap_or_default().to_string();
            let (verdict, residual, detail) = match &c.verdict {
                Verdict::Accepted { residual } => ("accepted", Some(*residual), String::new()),
                Verdict::Rejected { residual, suspected_defect } => {
                    ("rejected", Some(*residual), if *suspected_defect { "suspected_defect".into() } else { String::new() })
                }
                Verdict::OutOfDomain { reason } => ("out_of_domain", None, reason.clone()),
                Verdict::OutOfWindow { residual } => ("out_of_window", Some(*residual), String::new()),
            };
            rows.push(vec![
                "candidate".into(),
                c.candidate.formula.tag().into(),
                branch,
                opt(c.candidate.time),
                verdict.into(),
                opt(residual),
                c.nearest_root.map(|i| i.to_string()).unwrap_or_default(),
                detail,
            ]);
        }
        for (i, r) in report.numeric_roots.iter().enumerate() {
            let multiplicity = serde_json::to_value(r.multiplicity).ok();
            rows.push(vec![
                "root".into(),
                String::new(),
                String::new(),
                f(r.time),
                String::new(),
                f(r.residual),
                i.to_string(),
                multiplicity.as_ref().and_then(Value::as_str).unwrap_or_default().to_string(),
            ]);
        }
        Table { header: &["kind", "formula", "branch", "time", "verdict", "residual", "root", "detail"], rows }
    })?;
    if report.has_formula_defect() {
        return Err(CliError::Verification("a closed-form matching time was rejected although real roots exist".into()));
    }
    Ok(())
}

pub fn verify(cfg: &RunConfig, exec: Execution) -> Result<(), CliError> {
    let suite: Suite = RunConfig::require(&cfg.suite, "suite")?;
    let dim = cfg.dim.unwrap_or(DEFAULT_DIM);
    if !(2..=MAX_DIM).contains(&dim) {
        return Err(nhspec_core::Error::Dimension(dim).into());
    }
    let summary = run_suite(suite, dim, exec);
    write("verify", cfg, &summary, || {
        let mut rows = Vec::new();
        for r in &summary.records {
            if let Some(e) = &r.error {
                rows.push(vec![r.case.clone(), r.passed.to_string(), "error".into(), String::new(), String::new(), e.clone()]);
            }
            for c in &r.checks {
                rows.push(vec![
                    r.case.clone(),
                    c.passed.to_string(),
                    c.name.into(),
                    f(c.deviation),
                    f(c.tolerance),
                    String::new(),
                ]);
            }
        }
        Table { header: &["case", "passed", "check", "deviation", "tolerance", "error"], rows }
    })?;
    if !summary.all_passed() {
        return Err(CliError::Verification(format!(
            "suite {} failed: {} of {} cases passed",
            suite.tag(),
            summary.cases_passed,
            summary.cases_run
        )));
    }
    Ok(())
}

pub fn limit(cfg: &RunConfig) -> Result<(), CliError> {
    let t = RunConfig::require(&cfg.t, "t")?;
    let taus = cfg.tau_ladder.clone().unwrap_or_else(|| default_tau_ladder(t));
    let first = *taus.first().ok_or_else(|| CliError::Usage("--tau-ladder is empty".into()))?;
    let m = DeformationModel::new(
        RunConfig::require(&cfg.family, "family")?,
        RunConfig::require(&cfg.variant, "variant")?,
        RunConfig::require(&cfg.kappa, "kappa")?,
        first,
    )?;
    let report = galilei_report(&m, t, &taus)?;
    write("limit", cfg, &report, || Table {
        header: &["tau", "f", "limit", "deviation"],
        rows: report.rows.iter().map(|r| vec![f(r.tau), f(r.f), f(r.limit), f(r.deviation)]).collect(),
    })?;
    if let Some(order) = report.fitted_order {
        if !(ORDER_RANGE.0..=ORDER_RANGE.1).contains(&order) {
            return Err(CliError::Verification(format!(
                "fitted convergence order {order} outside [{}, {}]",
                ORDER_RANGE.0, ORDER_RANGE.1
            )));
        }
    }
    Ok(())
}
