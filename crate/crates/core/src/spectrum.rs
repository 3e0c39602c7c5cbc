//! Equally spaced disc-area spectra `s_n = 2π f (n + 1/2)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::deformation::DeformationModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub n: u32,
    pub s_n: f64,
}

/// Spectrum of the area operator at one instant.
///
/// `quantum` is the signed level spacing; for `f(t) < 0` every level
/// carries the same sign. `time` is `None` for the time-independent
/// canonical plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub time: Option<f64>,
    pub quantum: f64,
    pub levels: Vec<Level>,
}

impl SpectrumTable {
    fn from_quantum(time: Option<f64>, quantum: f64, n_max: u32) -> Self {
        let levels = (0..=n_max)
            .map(|n| Level { n, s_n: quantum * (f64::from(n) + 0.5) })
            .collect();
        SpectrumTable { time, quantum, levels }
    }

    /// Largest relative departure of consecutive spacings from `quantum`.
    pub fn max_spacing_deviation(&self) -> f64 {
        if self.quantum == 0.0 {
            return self
                .levels
                .iter()
                .map(|l| l.s_n.abs())
                .fold(0.0, f64::max);
        }
        self.levels
            .windows(2)
            .map(|w| ((w[1].s_n - w[0].s_n) - self.quantum).abs() / self.quantum.abs())
            .fold(0.0, f64::max)
    }
}

/// Level `n` of the area spectrum at time `t`.
pub fn level(model: &DeformationModel, t: f64, n: u32) -> Result<f64> {
    Ok(2.0 * PI * model.eval_f(t)? * (f64::from(n) + 0.5))
}

/// Levels `0..=n_max` of the area spectrum at time `t`.
pub fn spectrum(model: &DeformationModel, t: f64, n_max: u32) -> Result<SpectrumTable> {
    let quantum = model.eval_quantum(t)?;
    Ok(SpectrumTable::from_quantum(Some(t), quantum, n_max))
}

/// Spectrum of the constant-θ plane, `2πθ (n + 1/2)`.
pub fn canonical_spectrum(theta: f64, n_max: u32) -> Result<SpectrumTable> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::InvalidModel(format!("theta must be finite and > 0, got {theta}")));
    }
    Ok(SpectrumTable::from_quantum(None, 2.0 * PI * theta, n_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::{Family, Variant};

    fn values(table: &SpectrumTable) -> Vec<f64> {
        table.levels.iter().map(|l| l.s_n).collect()
    }

    #[test]
    fn canonical_levels() {
        assert_eq!(values(&canonical_spectrum(1.0, 0).unwrap()), vec![PI]);
        let half = canonical_spectrum(0.5, 1).unwrap();
        assert!((half.levels[0].s_n - PI / 2.0).abs() < 1e-15);
        assert!((half.levels[1].s_n - 1.5 * PI).abs() < 1e-15);
        let t = canonical_spectrum(1.0, 3).unwrap();
        assert!(t.max_spacing_deviation() < 1e-14);
        assert_eq!(t.quantum, 2.0 * PI);
        assert_eq!(t.time, None);
    }

    #[test]
    fn canonical_rejects_bad_theta() {
        assert!(canonical_spectrum(0.0, 2).is_err());
        assert!(canonical_spectrum(-1.0, 2).is_err());
        assert!(canonical_spectrum(f64::NAN, 2).is_err());
    }

    #[test]
    fn level_examples() {
        let canon = DeformationModel::new(Family::K1, Variant::Minus, 1.0, 1.0).unwrap();
        assert!((level(&canon, 0.0, 0).unwrap() - PI).abs() < 1e-15);
        assert!((level(&canon, 0.0, 1).unwrap() - 3.0 * PI).abs() < 1e-15);
        let k3 = DeformationModel::new(Family::K3, Variant::Plus, 2.0, 1.0).unwrap();
        assert_eq!(level(&k3, 0.0, 7).unwrap(), 0.0);
    }

    #[test]
    fn spectrum_examples() {
        let m = DeformationModel::new(Family::K1, Variant::Minus, 1.0, 1.0).unwrap();
        let table = spectrum(&m, 0.0, 2).unwrap();
        assert_eq!(table.quantum, 2.0 * PI);
        let expected = [PI, 3.0 * PI, 5.0 * PI];
        for (got, want) in values(&table).iter().zip(expected) {
            assert!((got - want).abs() <= 1e-15 * want);
        }
        assert_eq!(table.levels[0].s_n, table.quantum / 2.0);

        let zero = DeformationModel::new(Family::K6, Variant::Plus, 1.0, 1.0).unwrap();
        assert!(values(&spectrum(&zero, 0.0, 5).unwrap()).iter().all(|&s| s == 0.0));
    }

    #[test]
    fn negative_quantum_propagates_sign() {
        let m = DeformationModel::new(Family::K2, Variant::Minus, 1.0, 1.0).unwrap();
        let table = spectrum(&m, 2.0, 4).unwrap();
        assert!(table.quantum < 0.0);
        assert!(table.levels.iter().all(|l| l.s_n < 0.0));
        assert!(table.max_spacing_deviation() < 1e-12);
    }

    #[test]
    fn range_errors_pass_through() {
        let m = DeformationModel::new(Family::K1, Variant::Plus, 1.0, 1.0).unwrap();
        assert!(spectrum(&m, 800.0, 2).is_err());
    }
}
