//! Finite matrix representations of the ladder operators, coordinates,
//! number operator and disc area operator at a fixed time.
//!
//! Truncating to `D` basis states keeps every identity exact except on the
//! last row and column, where the missing state `|D>` shows up as a fixed
//! defect (for instance `[a, a†]` has `-(D-1)` in its corner). Checks below
//! measure the interior block `0..=D-2` and report the edge separately.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::deformation::DeformationModel;
use crate::error::{Error, Result};

pub const DEFAULT_DIM: usize = 64;
pub const MAX_DIM: usize = 1024;

/// Below this `|f|` the ladder construction is treated as singular.
pub const DEGENERATE_F: f64 = 1e-300;

/// Sign of the noncommutativity the representation was built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// `f > 0`: `x2 = i sqrt(f/2) (a† - a)`.
    Positive,
    /// `f < 0`: built from `|f|` with `x2` reversed, which swaps the roles
    /// of `a` and `a†` with respect to `x1 ± i x2`.
    Reversed,
}

#[derive(Debug, Clone)]
pub struct TruncatedFockRep {
    pub dim: usize,
    /// Signed `f(t)` the representation was built from.
    pub f_signed: f64,
    /// `|f(t)|`.
    pub f_value: f64,
    pub orientation: Orientation,
    pub a: DMatrix<f64>,
    pub a_dagger: DMatrix<f64>,
    pub x1: DMatrix<f64>,
    pub x2: DMatrix<Complex64>,
    pub number: DMatrix<f64>,
    pub area: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefectReport {
    pub dim: usize,
    /// Max `|entry|` of the defect matrix over indices `0..=D-2`.
    pub max_interior_deviation: f64,
    pub corner_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AreaDiagonalReport {
    pub dim: usize,
    pub f_value: f64,
    /// Max-entry norm of `S`.
    pub norm: f64,
    pub max_off_diagonal: f64,
    /// Worst relative error of `S[n][n]` against `2π|f|(n + 1/2)`, `n <= D-2`.
    pub interior_max_rel_deviation: f64,
    pub corner_value: f64,
    /// `π |f| (D - 1)`, the value forced by truncation.
    pub expected_corner: f64,
}

fn check_dim(dim: usize) -> Result<()> {
    if (2..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::Dimension(dim))
    }
}

/// Annihilation operator: `a[n][n+1] = sqrt(n+1)`.
pub fn annihilation(dim: usize) -> Result<DMatrix<f64>> {
    check_dim(dim)?;
    Ok(DMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            (j as f64).sqrt()
        } else {
            0.0
        }
    }))
}

fn commutator(x: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
    x * y - y * x
}

/// Max `|entry|` over the leading `(D-1) x (D-1)` block.
pub fn interior_max_abs(m: &DMatrix<f64>) -> f64 {
    let d = m.nrows() - 1;
    m.view((0, 0), (d, d)).amax()
}

/// Max `|entry|` after zeroing the last row and column; zero when every
/// defect is confined to the truncation edge.
pub fn max_outside_edge(m: &DMatrix<f64>) -> f64 {
    interior_max_abs(m)
}

/// Entry of largest magnitude on the last row or column, with its sign.
fn edge_extreme(m: &DMatrix<f64>) -> f64 {
    let last = m.nrows() - 1;
    (0..m.nrows())
        .flat_map(|k| [m[(last, k)], m[(k, last)]])
        .fold(0.0, |acc: f64, v| if v.abs() > acc.abs() { v } else { acc })
}

/// Builds the representation for `f = model.eval_f(t)`.
pub fn build_rep(model: &DeformationModel, t: f64, dim: usize) -> Result<TruncatedFockRep> {
    let f = model.eval_f(t)?;
    if f.abs() < DEGENERATE_F {
        return Err(Error::DegenerateTime { t });
    }
    build_rep_for_f(f, dim)
}

/// Builds the representation directly from a value of `f` (nonzero).
pub fn build_rep_for_f(f: f64, dim: usize) -> Result<TruncatedFockRep> {
    if !f.is_finite() || f.abs() < DEGENERATE_F {
        return Err(Error::DegenerateTime { t: f64::NAN });
    }
    let a = annihilation(dim)?;
    let a_dagger = a.transpose();
    let f_value = f.abs();
    let orientation = if f > 0.0 { Orientation::Positive } else { Orientation::Reversed };
    let half = (0.5 * f_value).sqrt();

    let x1 = (&a + &a_dagger) * half;
    let x2_sign = match orientation {
        Orientation::Positive => 1.0,
        Orientation::Reversed => -1.0,
    };
    let x2 = (&a_dagger - &a).map(|v| Complex64::new(0.0, x2_sign * half * v));

    let number = &a_dagger * &a;
    let x2_squared = &x2 * &x2;
    let area = (&x1 * &x1 + x2_squared.map(|z| z.re)) * PI;

    Ok(TruncatedFockRep { dim, f_signed: f, f_value, orientation, a, a_dagger, x1, x2, number, area })
}

/// `[a, a†] - I`. `corner_value` is the corner of the bare commutator
/// `[a, a†]`, which truncation pins to `-(D-1)`.
pub fn commutator_defect(dim: usize) -> Result<DefectReport> {
    let a = annihilation(dim)?;
    let comm = commutator(&a, &a.transpose());
    let defect = &comm - DMatrix::identity(dim, dim);
    Ok(DefectReport {
        dim,
        max_interior_deviation: interior_max_abs(&defect),
        corner_value: comm[(dim - 1, dim - 1)],
    })
}

/// `[a, a†] - I` as a matrix.
pub fn commutator_defect_matrix(dim: usize) -> Result<DMatrix<f64>> {
    let a = annihilation(dim)?;
    Ok(commutator(&a, &a.transpose()) - DMatrix::identity(dim, dim))
}

/// `[N, a†] - a†` and `[N, a] + a` with `N` taken in coordinate form,
/// `(x1² + x2² - f)/(2f)` (here at `f = 1`; `f` cancels). The coordinate
/// form inherits the truncated corner of `x1² + x2²`, so both defects are
/// nonzero on the edge. `corner_value` is the largest edge entry, signed.
pub fn number_commutators_defect(dim: usize) -> Result<(DefectReport, DefectReport)> {
    let [raise, lower] = number_commutator_matrices(dim)?;
    let report = |m: &DMatrix<f64>| DefectReport {
        dim,
        max_interior_deviation: interior_max_abs(m),
        corner_value: edge_extreme(m),
    };
    Ok((report(&raise), report(&lower)))
}

/// `max|N| * max|a|` for the truncated ladder, `(D-1)^(3/2)`; the rounding
/// floor of `[N, a†]` grows with it.
pub fn number_commutator_scale(dim: usize) -> f64 {
    let top = (dim - 1) as f64;
    top * top.sqrt()
}

/// The two defect matrices behind [`number_commutators_defect`].
pub fn number_commutator_matrices(dim: usize) -> Result<[DMatrix<f64>; 2]> {
    let rep = build_rep_for_f(1.0, dim)?;
    let n = coordinate_number(&rep);
    let raise = commutator(&n, &rep.a_dagger) - &rep.a_dagger;
    let lower = commutator(&n, &rep.a) + &rep.a;
    Ok([raise, lower])
}

fn coordinate_number(rep: &TruncatedFockRep) -> DMatrix<f64> {
    let f = rep.f_value;
    let x2_squared = (&rep.x2 * &rep.x2).map(|z| z.re);
    (&rep.x1 * &rep.x1 + x2_squared - DMatrix::identity(rep.dim, rep.dim) * f) / (2.0 * f)
}

/// Number operator rebuilt from the coordinates, `(x1² + x2² - f)/(2f)`.
pub fn number_from_coordinates(model: &DeformationModel, t: f64, dim: usize) -> Result<DMatrix<f64>> {
    Ok(coordinate_number(&build_rep(model, t, dim)?))
}

/// Eigenvalues of the truncated area operator, ascending.
pub fn area_eigenvalues(model: &DeformationModel, t: f64, dim: usize) -> Result<Vec<f64>> {
    let rep = build_rep(model, t, dim)?;
    Ok(sorted_eigenvalues(&rep.area))
}

pub fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut values: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Expected area eigenvalues of a truncated representation: the interior
/// levels `2π|f|(n + 1/2)` plus the corner artifact, ascending.
pub fn expected_area_eigenvalues(f_value: f64, dim: usize) -> Vec<f64> {
    let mut values: Vec<f64> = (0..dim - 1)
        .map(|n| 2.0 * PI * f_value * (n as f64 + 0.5))
        .chain(std::iter::once(PI * f_value * (dim - 1) as f64))
        .collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Reads the area spectrum off the (analytically diagonal) matrix of `S`.
pub fn area_diagonal_report(rep: &TruncatedFockRep) -> AreaDiagonalReport {
    let s = &rep.area;
    let dim = rep.dim;
    let mut max_off_diagonal: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                max_off_diagonal = max_off_diagonal.max(s[(i, j)].abs());
            }
        }
    }
    let interior_max_rel_deviation = (0..dim - 1)
        .map(|n| {
            let expected = 2.0 * PI * rep.f_value * (n as f64 + 0.5);
            (s[(n, n)] - expected).abs() / expected
        })
        .fold(0.0, f64::max);
    AreaDiagonalReport {
        dim,
        f_value: rep.f_value,
        norm: s.amax(),
        max_off_diagonal,
        interior_max_rel_deviation,
        corner_value: s[(dim - 1, dim - 1)],
        expected_corner: PI * rep.f_value * (dim - 1) as f64,
    }
}

/// `(a†)^n |0> / sqrt(n!)`, normalized one factor at a time.
pub fn eigenstate(n: usize, dim: usize) -> Result<DVector<f64>> {
    let a = annihilation(dim)?;
    if n >= dim {
        return Err(Error::LevelIndex { n, dim });
    }
    let a_dagger = a.transpose();
    let mut state = DVector::zeros(dim);
    state[0] = 1.0;
    for k in 1..=n {
        state = (&a_dagger * state) / (k as f64).sqrt();
    }
    Ok(state)
}

/// `||S v - λ v||` for `v = eigenstate(n)` and `λ = 2π|f|(n + 1/2)`.
pub fn eigenstate_residual(rep: &TruncatedFockRep, n: usize) -> Result<f64> {
    let v = eigenstate(n, rep.dim)?;
    let lambda = 2.0 * PI * rep.f_value * (n as f64 + 0.5);
    Ok((&rep.area * &v - &v * lambda).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::{Family, Variant};

    fn model() -> DeformationModel {
        DeformationModel::new(Family::K1, Variant::Minus, 1.0, 1.0).unwrap()
    }

    #[test]
    fn smallest_ladder() {
        let rep = build_rep_for_f(1.0, 2).unwrap();
        assert_eq!(rep.a, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]));
        assert_eq!(rep.number, DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 1.0])));
        assert_eq!(rep.orientation, Orientation::Positive);
    }

    #[test]
    fn anticommutator_diagonal_dim4() {
        // hand computation: diag(a a† + a† a) = (1, 3, 5, 3)
        for &f in &[0.25, 1.0, 7.0] {
            let rep = build_rep_for_f(f, 4).unwrap();
            let sum = &rep.a * &rep.a_dagger + &rep.a_dagger * &rep.a;
            let diag: Vec<f64> = sum.diagonal().iter().copied().collect();
            for (got, want) in diag.iter().zip([1.0, 3.0, 5.0, 3.0]) {
                assert!((got - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn degenerate_time_is_rejected() {
        let m = DeformationModel::new(Family::K3, Variant::Plus, 1.0, 1.0).unwrap();
        assert!(matches!(build_rep(&m, 0.0, 8), Err(Error::DegenerateTime { .. })));
        assert!(matches!(area_eigenvalues(&m, 0.0, 8), Err(Error::DegenerateTime { .. })));
    }

    #[test]
    fn dimension_bounds() {
        assert_eq!(annihilation(1).unwrap_err(), Error::Dimension(1));
        assert_eq!(annihilation(1025).unwrap_err(), Error::Dimension(1025));
        assert!(annihilation(1024).is_ok());
    }

    #[test]
    fn representation_structure() {
        let rep = build_rep_for_f(0.7, 16).unwrap();
        assert_eq!(rep.a_dagger, rep.a.transpose());
        assert_eq!(rep.x1, rep.x1.transpose());
        assert_eq!(rep.x2, rep.x2.adjoint());
        assert!(rep.x2.iter().all(|z| z.re == 0.0));
        assert!((&rep.area - rep.area.transpose()).amax() == 0.0);
        for i in 0..16 {
            for j in 0..16 {
                let want = if i == j { i as f64 } else { 0.0 };
                assert!((rep.number[(i, j)] - want).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn coordinate_commutator_is_i_f() {
        // [x1, x2] = i f on the interior for both orientations
        for &f in &[1.3, -0.6] {
            let rep = build_rep_for_f(f, 12).unwrap();
            let x1 = rep.x1.map(|v| Complex64::new(v, 0.0));
            let comm = &x1 * &rep.x2 - &rep.x2 * &x1;
            for i in 0..11 {
                for j in 0..11 {
                    let want = if i == j { Complex64::new(0.0, f) } else { Complex64::new(0.0, 0.0) };
                    assert!((comm[(i, j)] - want).norm() < 1e-13, "f={f} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn ladder_commutator_examples() {
        let r = commutator_defect(4).unwrap();
        assert!(r.max_interior_deviation < 1e-15);
        assert!((r.corner_value + 3.0).abs() < 1e-12);
        let r = commutator_defect(2).unwrap();
        assert!((r.corner_value + 1.0).abs() < 1e-12);
        let r = commutator_defect(64).unwrap();
        assert!(r.max_interior_deviation <= 1e-13);
        assert!((r.corner_value + 63.0).abs() <= 1e-10 * 63.0);
    }

    #[test]
    fn number_commutator_examples() {
        // dim 3: coordinate N = diag(0, 1, 1/2); only (2,1) of [N,a†]-a†
        // survives: sqrt(2) (1/2 - 1 - 1) = -3 sqrt(2)/2
        let [raise, _] = number_commutator_matrices(3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if (i, j) == (2, 1) { -1.5 * 2f64.sqrt() } else { 0.0 };
                assert!((raise[(i, j)] - want).abs() < 1e-14, "({i},{j}) = {}", raise[(i, j)]);
            }
        }
        let (r, _) = number_commutators_defect(3).unwrap();
        assert!((r.corner_value + 1.5 * 2f64.sqrt()).abs() < 1e-14);

        let (_, lower) = number_commutators_defect(2).unwrap();
        assert_eq!(lower.max_interior_deviation, 0.0);

        for dim in [5, 17, 64] {
            let (r, l) = number_commutators_defect(dim).unwrap();
            let scale = number_commutator_scale(dim);
            assert!(r.max_interior_deviation <= 1e-13 * scale, "{dim}: {r:?}");
            assert!(l.max_interior_deviation <= 1e-13 * scale, "{dim}: {l:?}");
            assert!(r.corner_value.abs() > 0.5);
            assert!(l.corner_value.abs() > 0.5);
        }
    }

    #[test]
    fn number_from_coordinates_examples() {
        let n = number_from_coordinates(&model(), 0.0, 4).unwrap();
        let want = [0.0, 1.0, 2.0, 1.0];
        for i in 0..4 {
            for j in 0..4 {
                let w = if i == j { want[i] } else { 0.0 };
                assert!((n[(i, j)] - w).abs() < 1e-14);
            }
        }
        let m2 = DeformationModel::new(Family::K1, Variant::Minus, 2.0, 1.0).unwrap();
        let n = number_from_coordinates(&m2, 0.0, 2).unwrap();
        assert!(n[(0, 0)].abs() < 1e-15);

        let a = number_from_coordinates(&model(), 0.4, 10).unwrap();
        let b = number_from_coordinates(&m2, 0.4, 10).unwrap();
        assert!(interior_max_abs(&(a - b)) < 1e-13);
    }

    #[test]
    fn area_eigenvalue_examples() {
        let rep = build_rep(&model(), 0.0, 4).unwrap();
        let diag: Vec<f64> = rep.area.diagonal().iter().map(|v| v / PI).collect();
        for (got, want) in diag.iter().zip([1.0, 3.0, 5.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        let eig = area_eigenvalues(&model(), 0.0, 4).unwrap();
        for (got, want) in eig.iter().zip([1.0, 3.0, 3.0, 5.0]) {
            assert!((got / PI - want).abs() < 1e-12);
        }

        let half = DeformationModel::new(Family::K1, Variant::Minus, 0.5, 1.0).unwrap();
        let rep = build_rep(&half, 0.0, 8).unwrap();
        for n in 0..7 {
            let want = PI * 0.5 * (2.0 * n as f64 + 1.0);
            assert!((rep.area[(n, n)] - want).abs() <= 1e-12 * want);
        }
        let report = area_diagonal_report(&rep);
        assert!(report.max_off_diagonal <= 1e-12 * report.norm);
        assert!((report.corner_value - report.expected_corner).abs() <= 1e-12 * report.expected_corner);
    }

    #[test]
    fn negative_f_uses_magnitude() {
        let m = DeformationModel::new(Family::K2, Variant::Minus, 1.0, 1.0).unwrap();
        let rep = build_rep(&m, 2.0, 8).unwrap();
        assert_eq!(rep.orientation, Orientation::Reversed);
        assert!(rep.f_signed < 0.0);
        let report = area_diagonal_report(&rep);
        assert!(report.interior_max_rel_deviation < 1e-12);
    }

    #[test]
    fn eigenstate_examples() {
        let a = annihilation(4).unwrap();
        let vac = eigenstate(0, 4).unwrap();
        assert_eq!(vac, DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]));
        assert_eq!(&a * &vac, DVector::zeros(4));
        let e2 = eigenstate(2, 4).unwrap();
        assert!((e2 - DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0])).amax() < 1e-15);
        let edge = eigenstate(3, 4).unwrap();
        assert!((edge[3] - 1.0).abs() < 1e-15);
        assert_eq!(eigenstate(4, 4).unwrap_err(), Error::LevelIndex { n: 4, dim: 4 });
    }

    #[test]
    fn defects_are_localized() {
        assert!(max_outside_edge(&commutator_defect_matrix(30).unwrap()) <= 1e-13);
        for m in number_commutator_matrices(30).unwrap() {
            assert!(max_outside_edge(&m) <= 1e-13 * number_commutator_scale(30));
        }
    }
}
