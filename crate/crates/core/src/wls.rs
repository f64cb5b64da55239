//! Weighted least-squares accuracy model.
//!
//! ASF residuals (microseconds) become range biases `d = c * r`. With the
//! geometry matrix `G` and diagonal weights `W`, the normal matrix is
//! `M = G^T W G`. The random horizontal error is
//! `sigma_pos = sqrt((M^-1)_11 + (M^-1)_22)`, the bias-induced state offset is
//! `[dx, dy, db] = M^-1 G^T W d`, `pos_bias = hypot(dx, dy)` and
//! `ACC = hypot(sigma_pos, pos_bias)`.

use alloc::vec::Vec;

use libm::{hypot, sqrt};

use crate::geo::GeometryMatrix;

pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// 1-norm condition number above which the normal matrix is rejected.
pub const MAX_CONDITION: f64 = 1e8;

const INVERSE_RESIDUAL_TOL: f64 = 1e-6;

pub type Mat3 = [[f64; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("singular or ill-conditioned geometry")]
    SingularGeometry,
    #[error("need at least 3 observations, got {0}")]
    InsufficientStations(usize),
    #[error("length mismatch: {rows} geometry rows, {other} weights or residuals")]
    LengthMismatch { rows: usize, other: usize },
    #[error("weights must be finite and positive")]
    BadWeight,
}

/// Per-station ASF residuals in microseconds, aligned with geometry rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualVector(pub Vec<f64>);

impl ResidualVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Residual delays (us) to range biases (m).
pub fn range_bias(r: &ResidualVector) -> Vec<f64> {
    r.0.iter().map(|&us| us * 1e-6 * SPEED_OF_LIGHT_M_S).collect()
}

fn check_inputs(g: &GeometryMatrix, weights: &[f64]) -> Result<(), SolverError> {
    if g.len() < 3 {
        return Err(SolverError::InsufficientStations(g.len()));
    }
    if weights.len() != g.len() {
        return Err(SolverError::LengthMismatch {
            rows: g.len(),
            other: weights.len(),
        });
    }
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(SolverError::BadWeight);
    }
    Ok(())
}

fn gram(g: &GeometryMatrix, weights: &[f64]) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for (row, &w) in g.rows().iter().zip(weights) {
        for a in 0..3 {
            for b in 0..3 {
                m[a][b] += row[a] * w * row[b];
            }
        }
    }
    m
}

/// `M = G^T W G`, rejected when its condition number exceeds
/// [`MAX_CONDITION`].
pub fn normal_matrix(g: &GeometryMatrix, weights: &[f64]) -> Result<Mat3, SolverError> {
    check_inputs(g, weights)?;
    let m = gram(g, weights);
    invert(&m)?;
    Ok(m)
}

fn norm1(m: &Mat3) -> f64 {
    (0..3)
        .map(|c| (0..3).map(|r| m[r][c].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Closed-form adjugate inverse with a 1-norm condition check.
pub fn invert(m: &Mat3) -> Result<Mat3, SolverError> {
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    // adjugate = transpose of the cofactor matrix
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    let det = m[0][0] * adj[0][0] + m[0][1] * adj[1][0] + m[0][2] * adj[2][0];
    if det == 0.0 || !det.is_finite() {
        return Err(SolverError::SingularGeometry);
    }
    let mut inv = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            inv[r][c] = adj[r][c] / det;
        }
    }
    let kappa = norm1(m) * norm1(&inv);
    if !(kappa <= MAX_CONDITION) {
        return Err(SolverError::SingularGeometry);
    }
    // a rank-deficient M yields round-off cofactors whose ratio can look
    // well conditioned; require M * inv to actually be the identity
    let product = |r: usize, c: usize| m[r][0] * inv[0][c] + m[r][1] * inv[1][c] + m[r][2] * inv[2][c];
    for r in 0..3 {
        for c in 0..3 {
            let target = if r == c { 1.0 } else { 0.0 };
            if !((product(r, c) - target).abs() <= INVERSE_RESIDUAL_TOL) {
                return Err(SolverError::SingularGeometry);
            }
        }
    }
    Ok(inv)
}

pub fn sigma_pos(m: &Mat3) -> Result<f64, SolverError> {
    let inv = invert(m)?;
    Ok(sigma_from_inverse(&inv))
}

fn sigma_from_inverse(inv: &Mat3) -> f64 {
    sqrt(inv[0][0] + inv[1][1])
}

/// Position and clock offsets induced by the range biases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasSolution {
    pub dx: f64,
    pub dy: f64,
    /// Clock-bias offset, meters.
    pub db: f64,
    pub pos_bias: f64,
}

fn project(inv: &Mat3, g: &GeometryMatrix, weights: &[f64], d: impl Iterator<Item = f64>) -> [f64; 3] {
    let mut rhs = [0.0; 3];
    for ((row, &w), di) in g.rows().iter().zip(weights).zip(d) {
        for k in 0..3 {
            rhs[k] += row[k] * w * di;
        }
    }
    let solve = |r: usize| inv[r][0] * rhs[0] + inv[r][1] * rhs[1] + inv[r][2] * rhs[2];
    [solve(0), solve(1), solve(2)]
}

fn bias_from_inverse(inv: &Mat3, g: &GeometryMatrix, weights: &[f64], d: &[f64]) -> BiasSolution {
    let first = project(inv, g, weights, d.iter().copied());
    // one refinement pass on the fit residual; the normal equations square
    // the conditioning of G
    let residual = g
        .rows()
        .iter()
        .zip(d)
        .map(|(row, di)| di - (row[0] * first[0] + row[1] * first[1] + row[2] * first[2]));
    let fix = project(inv, g, weights, residual);
    let (dx, dy, db) = (first[0] + fix[0], first[1] + fix[1], first[2] + fix[2]);
    BiasSolution {
        dx,
        dy,
        db,
        pos_bias: hypot(dx, dy),
    }
}

/// `[dx, dy, db] = M^-1 G^T W d`.
pub fn bias_solution(m: &Mat3, g: &GeometryMatrix, weights: &[f64], d: &[f64]) -> Result<BiasSolution, SolverError> {
    check_inputs(g, weights)?;
    if d.len() != g.len() {
        return Err(SolverError::LengthMismatch {
            rows: g.len(),
            other: d.len(),
        });
    }
    let inv = invert(m)?;
    Ok(bias_from_inverse(&inv, g, weights, d))
}

pub fn acc(sigma_pos: f64, pos_bias: f64) -> f64 {
    hypot(sigma_pos, pos_bias)
}

/// Accuracy figures for one receiver position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy {
    pub sigma_pos: f64,
    pub pos_bias: f64,
    pub acc: f64,
    pub dx: f64,
    pub dy: f64,
    pub clock_bias: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoFixReason {
    InsufficientStations,
    SingularGeometry,
    StationTooClose,
}

impl NoFixReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::InsufficientStations => "insufficient stations",
            Self::SingularGeometry => "singular geometry",
            Self::StationTooClose => "station too close",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AccResult {
    Fix(Accuracy),
    NoFix(NoFixReason),
}

impl AccResult {
    pub fn acc(&self) -> Option<f64> {
        match self {
            Self::Fix(a) => Some(a.acc),
            Self::NoFix(_) => None,
        }
    }

    pub fn fix(&self) -> Option<&Accuracy> {
        match self {
            Self::Fix(a) => Some(a),
            Self::NoFix(_) => None,
        }
    }
}

/// Full pipeline from geometry, weights and residuals to [`Accuracy`].
/// The normal matrix is inverted once; `sigma_pos` does not depend on `r`.
pub fn solve_accuracy(g: &GeometryMatrix, weights: &[f64], r: &ResidualVector) -> Result<Accuracy, SolverError> {
    check_inputs(g, weights)?;
    if r.len() != g.len() {
        return Err(SolverError::LengthMismatch {
            rows: g.len(),
            other: r.len(),
        });
    }
    let inv = invert(&gram(g, weights))?;
    let sigma_pos = sigma_from_inverse(&inv);
    let bias = bias_from_inverse(&inv, g, weights, &range_bias(r));
    Ok(Accuracy {
        sigma_pos,
        pos_bias: bias.pos_bias,
        acc: acc(sigma_pos, bias.pos_bias),
        dx: bias.dx,
        dy: bias.dy,
        clock_bias: bias.db,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::TAU;

    fn tri() -> GeometryMatrix {
        GeometryMatrix::from_bearings(&[0.0, TAU / 3.0, 2.0 * TAU / 3.0]).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn range_bias_examples() {
        assert_eq!(range_bias(&ResidualVector(vec![0.0; 3])), vec![0.0; 3]);
        let d = range_bias(&ResidualVector(vec![1.0, 0.0, 0.0]));
        assert!(close(d[0], 299.792458, 1e-9));
        let d = range_bias(&ResidualVector(vec![-0.5, 0.2, 1.0]));
        for (x, e) in d.iter().zip([-149.896229, 59.9584916, 299.792458]) {
            assert!(close(*x, e, 1e-9), "{x} vs {e}");
        }
    }

    #[test]
    fn symmetric_normal_matrix() {
        let m = normal_matrix(&tri(), &[1.0; 3]).unwrap();
        let expected = [[1.5, 0.0, 0.0], [0.0, 1.5, 0.0], [0.0, 0.0, 3.0]];
        for r in 0..3 {
            for c in 0..3 {
                assert!(close(m[r][c], expected[r][c], 1e-9), "{m:?}");
                assert!(close(m[r][c], m[c][r], 1e-12));
            }
        }
        assert!(close(sigma_pos(&m).unwrap(), 1.154_700_538, 1e-6));
    }

    #[test]
    fn identical_bearings_are_singular() {
        let g = GeometryMatrix::from_bearings(&[0.7; 3]).unwrap();
        assert_eq!(normal_matrix(&g, &[1.0; 3]), Err(SolverError::SingularGeometry));
    }

    #[test]
    fn weight_scaling() {
        let g = GeometryMatrix::from_bearings(&[0.3, 2.0, 4.1]).unwrap();
        let w = [0.02, 0.05, 0.01];
        let w4: Vec<f64> = w.iter().map(|x| 4.0 * x).collect();
        let m = normal_matrix(&g, &w).unwrap();
        let m4 = normal_matrix(&g, &w4).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(m4[r][c], 4.0 * m[r][c]);
            }
        }
        assert_eq!(sigma_pos(&m4).unwrap(), sigma_pos(&m).unwrap() / 2.0);
    }

    #[test]
    fn sigma_of_identity() {
        let eye = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(sigma_pos(&eye).unwrap(), core::f64::consts::SQRT_2);
    }

    #[test]
    fn zero_and_common_mode_bias() {
        let g = GeometryMatrix::from_bearings(&[0.3, 2.0, 4.1]).unwrap();
        let w = [0.02, 0.05, 0.01];
        let m = normal_matrix(&g, &w).unwrap();
        let zero = bias_solution(&m, &g, &w, &[0.0; 3]).unwrap();
        assert_eq!((zero.dx, zero.dy, zero.db, zero.pos_bias), (0.0, 0.0, 0.0, 0.0));

        let ck = SPEED_OF_LIGHT_M_S * 1.3e-6;
        let b = bias_solution(&m, &g, &w, &[ck; 3]).unwrap();
        assert!(b.dx.abs() < 1e-9 && b.dy.abs() < 1e-9 && b.pos_bias < 1e-9);
        assert!(close(b.db, ck, 1e-9));
    }

    #[test]
    fn acc_examples() {
        assert_eq!(acc(3.0, 4.0), 5.0);
        assert_eq!(acc(1.7, 0.0), 1.7);
        assert!(close(acc(1.1547, 299.79), 299.7922, 1e-3));
    }

    #[test]
    fn input_validation() {
        let g = tri();
        assert_eq!(
            normal_matrix(&g, &[1.0; 2]),
            Err(SolverError::LengthMismatch { rows: 3, other: 2 })
        );
        assert_eq!(normal_matrix(&g, &[1.0, 0.0, 1.0]), Err(SolverError::BadWeight));
        assert_eq!(
            solve_accuracy(&g, &[1.0; 3], &ResidualVector(vec![0.0; 4])),
            Err(SolverError::LengthMismatch { rows: 3, other: 4 })
        );
    }

    #[test]
    fn zero_residuals_give_sigma_only() {
        let g = GeometryMatrix::from_bearings(&[0.3, 2.0, 4.1]).unwrap();
        let a = solve_accuracy(&g, &[0.02, 0.05, 0.01], &ResidualVector(vec![0.0; 3])).unwrap();
        assert_eq!(a.pos_bias, 0.0);
        assert_eq!(a.acc, a.sigma_pos);
    }
}
