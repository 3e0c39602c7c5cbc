//! The six time-dependent deformation functions `f(t)` in `[x1, x2] = i f(t)`
//! and the area quanta `2π f(t)` built from them.
//!
//! Every function is written in terms of `C(t/τ)` and `S(t/τ)`, which are
//! `cosh`/`sinh` for the [`Variant::Plus`] space-times and `cos`/`sin` for
//! the [`Variant::Minus`] ones. Results are signed: some families go negative
//! on parts of the time axis and callers that need an area density take `|f|`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `|t/τ|` accepted for the hyperbolic variant.
pub const MAX_HYPERBOLIC_ARG: f64 = 700.0;

/// Highest Taylor order produced by [`DeformationModel::series_expand`].
pub const MAX_SERIES_ORDER: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    K1,
    K2,
    K3,
    K4,
    K5,
    K6,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Hyperbolic: `C = cosh`, `S = sinh`. Expanding noncommutativity.
    Plus,
    /// Trigonometric: `C = cos`, `S = sin`. Oscillating noncommutativity.
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::K1,
        Family::K2,
        Family::K3,
        Family::K4,
        Family::K5,
        Family::K6,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Family::K1 => "k1",
            Family::K2 => "k2",
            Family::K3 => "k3",
            Family::K4 => "k4",
            Family::K5 => "k5",
            Family::K6 => "k6",
        }
    }

    /// Behaviour of `f` under time reflection `t -> -t`.
    pub fn parity_class(self) -> Parity {
        match self {
            Family::K2 | Family::K6 => Parity::Odd,
            _ => Parity::Even,
        }
    }

    /// Partner under the exchange `C <-> τS`. Only the first three
    /// families are closed under it; `K2` maps onto itself.
    pub fn dual_of(self) -> Option<Family> {
        match self {
            Family::K1 => Some(Family::K3),
            Family::K2 => Some(Family::K2),
            Family::K3 => Some(Family::K1),
            _ => None,
        }
    }

    /// Power of τ in the prefactor; equals the degree of the τ → ∞ monomial.
    pub fn tau_power(self) -> i32 {
        match self {
            Family::K1 => 0,
            Family::K2 => 1,
            Family::K3 => 2,
            Family::K4 => 4,
            Family::K5 => 2,
            Family::K6 => 3,
        }
    }
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Plus, Variant::Minus];

    pub fn tag(self) -> &'static str {
        match self {
            Variant::Plus => "plus",
            Variant::Minus => "minus",
        }
    }

    /// Leading sign of the `K5`/`K6` prefactor.
    pub fn sign(self) -> f64 {
        match self {
            Variant::Plus => 1.0,
            Variant::Minus => -1.0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|fam| fam.tag() == s)
            .ok_or_else(|| format!("unknown family `{s}` (expected k1..k6)"))
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "plus" => Ok(Variant::Plus),
            "minus" => Ok(Variant::Minus),
            _ => Err(format!("unknown variant `{s}` (expected plus or minus)")),
        }
    }
}

/// `C`, `S` and `C - 1` at one reduced time `u = t/τ`.
///
/// `C - 1` goes through the half-angle form so it keeps full relative
/// precision near `u = 0`.
#[derive(Debug, Clone, Copy)]
struct Phase {
    c: f64,
    s: f64,
    c_minus_one: f64,
}

impl Phase {
    fn new(variant: Variant, u: f64) -> Self {
        match variant {
            Variant::Plus => {
                let h = (0.5 * u).sinh();
                Phase { c: u.cosh(), s: u.sinh(), c_minus_one: 2.0 * h * h }
            }
            Variant::Minus => {
                let h = (0.5 * u).sin();
                Phase { c: u.cos(), s: u.sin(), c_minus_one: -2.0 * h * h }
            }
        }
    }
}

/// One noncommutative space-time of the family: which function, which
/// variant, and the parameters `κ > 0`, `τ > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformationModel {
    family: Family,
    variant: Variant,
    kappa: f64,
    tau: f64,
}

impl DeformationModel {
    pub fn new(family: Family, variant: Variant, kappa: f64, tau: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidModel(format!("kappa must be finite and > 0, got {kappa}")));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidModel(format!("tau must be finite and > 0, got {tau}")));
        }
        Ok(DeformationModel { family, variant, kappa, tau })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        DeformationModel::new(self.family, self.variant, self.kappa, tau)
    }

    pub fn with_family(&self, family: Family) -> Self {
        DeformationModel { family, ..*self }
    }

    /// `κ τ^p`, the natural magnitude of `f` for this model.
    pub fn scale(&self) -> f64 {
        self.kappa * self.tau.powi(self.family.tau_power())
    }

    fn phase(&self, t: f64) -> Result<Phase> {
        if !t.is_finite() {
            return Err(Error::Range(format!("time must be finite, got {t}")));
        }
        let u = t / self.tau;
        if self.variant == Variant::Plus && u.abs() > MAX_HYPERBOLIC_ARG {
            return Err(Error::Range(format!(
                "|t/tau| = {} exceeds {MAX_HYPERBOLIC_ARG} for the hyperbolic variant",
                u.abs()
            )));
        }
        Ok(Phase::new(self.variant, u))
    }

    fn finite(&self, t: f64, value: f64) -> Result<f64> {
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Range(format!("f({t}) overflows for {self:?}")))
        }
    }

    /// Signed deformation function `f(t)`.
    pub fn eval_f(&self, t: f64) -> Result<f64> {
        let p = self.phase(t)?;
        let (k, tau) = (self.kappa, self.tau);
        let sign = self.variant.sign();
        let value = match self.family {
            Family::K1 => k * p.c * p.c,
            Family::K2 => k * tau * p.c * p.s,
            Family::K3 => k * tau * tau * p.s * p.s,
            Family::K4 => 4.0 * k * tau.powi(4) * p.c_minus_one * p.c_minus_one,
            Family::K5 => sign * k * tau * tau * p.c_minus_one * p.c,
            Family::K6 => sign * k * tau.powi(3) * p.c_minus_one * p.s,
        };
        self.finite(t, value)
    }

    /// Area quantum `2π f(t)`, the level spacing of the disc area spectrum.
    pub fn eval_quantum(&self, t: f64) -> Result<f64> {
        Ok(2.0 * PI * self.eval_f(t)?)
    }

    /// Evaluates this family's formula after substituting `C -> τS` and
    /// `S -> C/τ`. Agrees with `eval_f` of the dual family.
    pub fn apply_duality(&self, t: f64) -> Result<f64> {
        let p = self.phase(t)?;
        let (k, tau) = (self.kappa, self.tau);
        let c = tau * p.s;
        let s = p.c / tau;
        let value = match self.family {
            Family::K1 => k * c * c,
            Family::K2 => k * tau * c * s,
            Family::K3 => k * tau * tau * s * s,
            other => return Err(Error::UnsupportedFamily(other.tag())),
        };
        self.finite(t, value)
    }

    /// The same model with its family replaced by the dual one.
    pub fn dual(&self) -> Option<Self> {
        self.family.dual_of().map(|fam| self.with_family(fam))
    }

    /// Leading τ → ∞ polynomial of `f`. Each family collapses to a single
    /// monomial whose degree equals the τ power of its prefactor.
    pub fn galilei_limit_poly(&self) -> LimitPolynomial {
        let k = self.kappa;
        let (degree, coefficient) = match self.family {
            Family::K1 => (0, k),
            Family::K2 => (1, k),
            Family::K3 => (2, k),
            Family::K4 => (4, k),
            Family::K5 => (2, 0.5 * k),
            Family::K6 => (3, 0.5 * k),
        };
        LimitPolynomial { terms: vec![(degree, coefficient)] }
    }

    /// Taylor coefficients of `f` in `t` around `t = 0`, orders `0..=order`.
    pub fn series_expand(&self, order: usize) -> Result<Vec<f64>> {
        if order > MAX_SERIES_ORDER {
            return Err(Error::SeriesOrder(order));
        }
        let n = order + 1;
        let (c, s) = trig_series(self.variant, n);
        let mut c_minus_one = c.clone();
        c_minus_one[0] = 0.0;

        let (k, tau) = (self.kappa, self.tau);
        let sign = self.variant.sign();
        let (prefactor, in_u) = match self.family {
            Family::K1 => (k, mul_series(&c, &c)),
            Family::K2 => (k * tau, mul_series(&c, &s)),
            Family::K3 => (k * tau * tau, mul_series(&s, &s)),
            Family::K4 => (4.0 * k * tau.powi(4), mul_series(&c_minus_one, &c_minus_one)),
            Family::K5 => (sign * k * tau * tau, mul_series(&c_minus_one, &c)),
            Family::K6 => (sign * k * tau.powi(3), mul_series(&c_minus_one, &s)),
        };
        Ok(in_u
            .iter()
            .enumerate()
            .map(|(j, a)| prefactor * a / tau.powi(j as i32))
            .collect())
    }
}

/// Taylor coefficients of `(C(u), S(u))` up to `u^(n-1)`.
fn trig_series(variant: Variant, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut c = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut factorial = 1.0;
    for j in 0..n {
        if j > 0 {
            factorial *= j as f64;
        }
        let alternating = match variant {
            Variant::Plus => 1.0,
            Variant::Minus => {
                if (j / 2) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
        };
        if j % 2 == 0 {
            c[j] = alternating / factorial;
        } else {
            s[j] = alternating / factorial;
        }
    }
    (c, s)
}

/// Product of two truncated series, keeping the input length.
fn mul_series(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    (0..n)
        .map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum())
        .collect()
}

/// Polynomial in `t` stored as `(degree, coefficient)` monomials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitPolynomial {
    pub terms: Vec<(u32, f64)>,
}

impl LimitPolynomial {
    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|&(d, c)| c * t.powi(d as i32)).sum()
    }

    /// Coefficient of `t^degree`, zero when absent.
    pub fn coefficient(&self, degree: u32) -> f64 {
        self.terms
            .iter()
            .filter(|(d, _)| *d == degree)
            .map(|(_, c)| c)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(family: Family, variant: Variant, kappa: f64, tau: f64) -> DeformationModel {
        DeformationModel::new(family, variant, kappa, tau).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn rejects_non_positive_parameters() {
        assert!(DeformationModel::new(Family::K1, Variant::Plus, 0.0, 1.0).is_err());
        assert!(DeformationModel::new(Family::K1, Variant::Plus, 1.0, -2.0).is_err());
        assert!(DeformationModel::new(Family::K1, Variant::Plus, f64::NAN, 1.0).is_err());
        assert!(DeformationModel::new(Family::K1, Variant::Plus, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn eval_f_reference_points() {
        assert_eq!(model(Family::K1, Variant::Minus, 2.0, 1.0).eval_f(0.0).unwrap(), 2.0);
        assert_eq!(model(Family::K3, Variant::Plus, 1.0, 1.0).eval_f(0.0).unwrap(), 0.0);

        // cosh(1) from the exponential definition, independent of libm cosh
        let e = 1.0f64.exp();
        let cosh1 = 0.5 * (e + 1.0 / e);
        let f = model(Family::K1, Variant::Plus, 1.0, 1.0).eval_f(1.0).unwrap();
        assert!(close(f, cosh1 * cosh1, 1e-14));
        assert!((f - 2.381_097_845_541_815_7).abs() < 1e-14);
    }

    #[test]
    fn eval_quantum_reference_points() {
        let theta = 0.37;
        let canon = model(Family::K1, Variant::Minus, theta, 5.0);
        assert!(close(canon.eval_quantum(0.0).unwrap(), 2.0 * PI * theta, 1e-15));

        let k4 = model(Family::K4, Variant::Minus, 1.0, 1.0);
        assert!(close(k4.eval_quantum(PI / 2.0).unwrap(), 8.0 * PI, 1e-14));

        for v in Variant::ALL {
            assert_eq!(model(Family::K2, v, 1.7, 0.3).eval_quantum(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn signed_values_survive() {
        // K2 minus is negative on (πτ/2, πτ)
        let m = model(Family::K2, Variant::Minus, 1.0, 1.0);
        assert!(m.eval_f(2.0).unwrap() < 0.0);
    }

    #[test]
    fn overflow_is_a_range_error() {
        let m = model(Family::K1, Variant::Plus, 1.0, 1.0);
        assert!(matches!(m.eval_f(701.0), Err(Error::Range(_))));
        assert!(matches!(m.eval_f(f64::NAN), Err(Error::Range(_))));
        // within the guard but cosh^2 overflows
        assert!(matches!(m.eval_f(699.0), Err(Error::Range(_))));
        // trigonometric variant has no guard
        let m = model(Family::K1, Variant::Minus, 1.0, 1.0);
        assert!(m.eval_f(1.0e4).is_ok());
    }

    #[test]
    fn parity_and_duality_tables() {
        assert_eq!(Family::K1.parity_class(), Parity::Even);
        assert_eq!(Family::K2.parity_class(), Parity::Odd);
        assert_eq!(Family::K3.parity_class(), Parity::Even);
        assert_eq!(Family::K4.parity_class(), Parity::Even);
        assert_eq!(Family::K5.parity_class(), Parity::Even);
        assert_eq!(Family::K6.parity_class(), Parity::Odd);

        assert_eq!(Family::K1.dual_of(), Some(Family::K3));
        assert_eq!(Family::K3.dual_of(), Some(Family::K1));
        assert_eq!(Family::K2.dual_of(), Some(Family::K2));
        assert_eq!(Family::K4.dual_of(), None);
        assert_eq!(Family::K5.dual_of(), None);
        assert_eq!(Family::K6.dual_of(), None);
    }

    #[test]
    fn duality_examples() {
        let k1 = model(Family::K1, Variant::Plus, 1.0, 2.0);
        let expected = 4.0 * 0.5f64.sinh().powi(2);
        assert!(close(k1.apply_duality(1.0).unwrap(), expected, 1e-14));
        let k3 = model(Family::K3, Variant::Plus, 1.0, 2.0);
        assert!(close(k3.eval_f(1.0).unwrap(), expected, 1e-14));

        let k2 = model(Family::K2, Variant::Minus, 1.0, 1.0);
        assert!(close(k2.apply_duality(0.3).unwrap(), 0.3f64.sin() * 0.3f64.cos(), 1e-14));

        let c = 0.8;
        let k3 = model(Family::K3, Variant::Plus, c, 1.5);
        let k1 = model(Family::K1, Variant::Plus, c, 1.5);
        assert!(close(k3.apply_duality(0.9).unwrap(), k1.eval_f(0.9).unwrap(), 1e-14));

        let k5 = model(Family::K5, Variant::Plus, 1.0, 1.0);
        assert_eq!(k5.apply_duality(0.1), Err(Error::UnsupportedFamily("k5")));
        assert!(k5.dual().is_none());
    }

    #[test]
    fn series_examples() {
        let s = model(Family::K1, Variant::Minus, 1.0, 1.0).series_expand(2).unwrap();
        assert_eq!(s, vec![1.0, 0.0, -1.0]);
        let s = model(Family::K2, Variant::Plus, 1.0, 1.0).series_expand(1).unwrap();
        assert_eq!(s, vec![0.0, 1.0]);
        for v in Variant::ALL {
            assert_eq!(model(Family::K3, v, 2.0, 3.0).series_expand(0).unwrap(), vec![0.0]);
        }
        assert_eq!(
            model(Family::K1, Variant::Plus, 1.0, 1.0).series_expand(13),
            Err(Error::SeriesOrder(13))
        );
    }

    #[test]
    fn series_known_expansions() {
        // cos^2 x = 1 - x^2 + x^4/3 - 2x^6/45
        let s = model(Family::K1, Variant::Minus, 1.0, 1.0).series_expand(6).unwrap();
        let expected = [1.0, 0.0, -1.0, 0.0, 1.0 / 3.0, 0.0, -2.0 / 45.0];
        for (a, b) in s.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        // sinh x cosh x = x + 2x^3/3 + 2x^5/15
        let s = model(Family::K2, Variant::Plus, 1.0, 1.0).series_expand(5).unwrap();
        let expected = [0.0, 1.0, 0.0, 2.0 / 3.0, 0.0, 2.0 / 15.0];
        for (a, b) in s.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn series_matches_function_near_origin() {
        for fam in Family::ALL {
            for v in Variant::ALL {
                let m = model(fam, v, 1.3, 0.8);
                let coeffs = m.series_expand(12).unwrap();
                for &t in &[-0.05f64, 0.02, 0.07] {
                    let approx: f64 = coeffs.iter().enumerate().map(|(k, c)| c * t.powi(k as i32)).sum();
                    let exact = m.eval_f(t).unwrap();
                    assert!(
                        (approx - exact).abs() <= 1e-14 * m.scale().max(exact.abs()),
                        "{fam} {v} t={t}: {approx} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn series_parity_pattern() {
        for fam in Family::ALL {
            for v in Variant::ALL {
                let coeffs = model(fam, v, 1.0, 1.0).series_expand(12).unwrap();
                let skip = match fam.parity_class() {
                    Parity::Even => 1,
                    Parity::Odd => 0,
                };
                for k in (skip..=12).step_by(2) {
                    assert_eq!(coeffs[k], 0.0, "{fam} {v} order {k}");
                }
            }
        }
    }

    #[test]
    fn limit_polynomial_matches_series_oracle() {
        // The τ-independent term of the series is the τ → ∞ limit: every
        // lower order vanishes and the degree-p coefficient does not move with τ.
        for fam in Family::ALL {
            for v in Variant::ALL {
                for &kappa in &[0.5, 1.0, 2.0] {
                    let poly = model(fam, v, kappa, 1.0).galilei_limit_poly();
                    assert_eq!(poly.terms.len(), 1);
                    let (degree, coefficient) = poly.terms[0];
                    assert_eq!(degree as i32, fam.tau_power());
                    for &tau in &[0.5, 1.0, 3.0, 10.0] {
                        let s = model(fam, v, kappa, tau).series_expand(12).unwrap();
                        for (k, c) in s.iter().enumerate().take(degree as usize) {
                            assert_eq!(*c, 0.0, "{fam} {v} order {k}");
                        }
                        assert!(close(s[degree as usize], coefficient, 1e-14), "{fam} {v} tau={tau}");
                    }
                }
            }
        }
    }

    #[test]
    fn tags_round_trip() {
        for fam in Family::ALL {
            assert_eq!(fam.tag().parse::<Family>().unwrap(), fam);
        }
        assert!("K3".parse::<Family>().is_err());
        assert_eq!("minus".parse::<Variant>().unwrap(), Variant::Minus);
        assert!("k7".parse::<Family>().is_err());
        assert!("zero".parse::<Variant>().is_err());
    }
}
