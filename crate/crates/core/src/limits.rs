//! Convergence of `f(t; τ)` to its τ → ∞ monomial.

use serde::Serialize;

use crate::deformation::{DeformationModel, LimitPolynomial};
use crate::error::{Error, Result};

/// Multiples of `|t|` used for the default τ ladder.
pub const DEFAULT_LADDER: [f64; 4] = [10.0, 20.0, 40.0, 80.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitRow {
    pub tau: f64,
    pub f: f64,
    pub limit: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitReport {
    pub model: DeformationModel,
    pub t: f64,
    pub polynomial: LimitPolynomial,
    pub rows: Vec<LimitRow>,
    /// `deviation[i] / deviation[i+1]` for consecutive rows.
    pub ratios: Vec<f64>,
    /// Least-squares slope of `-log(deviation)` against `log(τ)`; `None`
    /// when a deviation is exactly zero.
    pub fitted_order: Option<f64>,
}

/// `{10, 20, 40, 80} |t|`, or `{10, 20, 40, 80}` at `t = 0`.
pub fn default_tau_ladder(t: f64) -> Vec<f64> {
    let base = if t == 0.0 { 1.0 } else { t.abs() };
    DEFAULT_LADDER.iter().map(|m| m * base).collect()
}

pub fn galilei_report(model: &DeformationModel, t: f64, taus: &[f64]) -> Result<LimitReport> {
    if taus.len() < 2 {
        return Err(Error::InvalidQuery("tau ladder needs at least two values".into()));
    }
    let polynomial = model.galilei_limit_poly();
    let limit = polynomial.eval(t);
    let rows = taus
        .iter()
        .map(|&tau| {
            let f = model.with_tau(tau)?.eval_f(t)?;
            Ok(LimitRow { tau, f, limit, deviation: (f - limit).abs() })
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios = rows.windows(2).map(|w| w[0].deviation / w[1].deviation).collect();
    let fitted_order = fit_order(&rows);
    Ok(LimitReport { model: *model, t, polynomial, rows, ratios, fitted_order })
}

fn fit_order(rows: &[LimitRow]) -> Option<f64> {
    if rows.iter().any(|r| r.deviation <= 0.0) {
        return None;
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.tau.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.deviation.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(-sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::{Family, Variant};

    #[test]
    fn k2_shrinks_fourfold() {
        let m = DeformationModel::new(Family::K2, Variant::Plus, 1.0, 1.0).unwrap();
        let r = galilei_report(&m, 1.0, &default_tau_ladder(1.0)).unwrap();
        for ratio in &r.ratios {
            assert!((3.5..=4.5).contains(ratio), "{ratio}");
        }
        let order = r.fitted_order.unwrap();
        assert!((1.8..=2.2).contains(&order));
    }

    #[test]
    fn k1_at_origin_is_exact() {
        let m = DeformationModel::new(Family::K1, Variant::Minus, 1.5, 1.0).unwrap();
        let r = galilei_report(&m, 0.0, &default_tau_ladder(0.0)).unwrap();
        assert!(r.rows.iter().all(|row| row.deviation == 0.0));
        assert_eq!(r.fitted_order, None);
        assert_eq!(r.rows.iter().map(|x| x.tau).collect::<Vec<_>>(), vec![10.0, 20.0, 40.0, 80.0]);
    }

    #[test]
    fn k6_limit_coefficient() {
        for v in Variant::ALL {
            let m = DeformationModel::new(Family::K6, v, 2.0, 1.0).unwrap();
            let r = galilei_report(&m, 1.0, &default_tau_ladder(1.0)).unwrap();
            assert_eq!(r.polynomial.coefficient(3), 1.0);
            assert!((r.rows[3].f - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn ladder_needs_two_points() {
        let m = DeformationModel::new(Family::K2, Variant::Plus, 1.0, 1.0).unwrap();
        assert!(galilei_report(&m, 1.0, &[10.0]).is_err());
        assert!(galilei_report(&m, 1.0, &[10.0, -1.0]).is_err());
    }
}
