//! Information matrices and optimality criteria.
//!
//! Only the D-criterion ships, but it sits behind the [`Criterion`] trait so
//! any positively homogeneous, monotone criterion evaluated on the information
//! matrix can be dropped in. Values are per-parameter scaled: the D-value is
//! `det(M)^(1/m)`, computed from a symmetric triangular factorization in log
//! space. Singular matrices evaluate to zero rather than erroring, which is
//! what lets the search walk through rank-deficient designs.

use crate::design::{DesignProblem, Direction, ExactDesign};

/// Relative pivot threshold below which a factorization pivot is treated as
/// zero and the matrix as singular.
const PIVOT_REL: f64 = 1e-12;

/// Symmetric `m x m` information matrix `sum_i w_i f_i f_i^T`, stored dense
/// row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct InformationMatrix {
    m: usize,
    data: Vec<f64>,
}

impl InformationMatrix {
    pub fn zero(m: usize) -> Self {
        InformationMatrix {
            m,
            data: vec![0.0; m * m],
        }
    }

    pub fn from_exact(problem: &DesignProblem, design: &ExactDesign) -> Self {
        let mut info = InformationMatrix::zero(problem.m());
        for (i, c) in design.support() {
            info.add_point(problem.regressor(i), c as f64);
        }
        info
    }

    pub fn from_weights(problem: &DesignProblem, weights: &[f64]) -> Self {
        assert_eq!(weights.len(), problem.n());
        let mut info = InformationMatrix::zero(problem.m());
        for (i, &w) in weights.iter().enumerate() {
            if w != 0.0 {
                info.add_point(problem.regressor(i), w);
            }
        }
        info
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.m + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Accumulates `weight * f f^T`. Only the upper triangle is computed; the
    /// lower is mirrored, so the matrix stays exactly symmetric.
    pub fn add_point(&mut self, f: &[f64], weight: f64) {
        let m = self.m;
        debug_assert_eq!(f.len(), m);
        for i in 0..m {
            let wfi = weight * f[i];
            for j in i..m {
                let v = wfi * f[j];
                self.data[i * m + j] += v;
                if j != i {
                    self.data[j * m + i] = self.data[i * m + j];
                }
            }
        }
    }

    /// Log-determinant via LDL^T with diagonal pivoting, exploiting positive
    /// semidefiniteness. Returns `None` when some pivot falls at or below
    /// `1e-12 * max diagonal`, i.e. the matrix is numerically singular.
    ///
    /// Pivoting on the largest remaining diagonal keeps the elimination
    /// rank-revealing: when the matrix is semidefinite, the pivots left after
    /// its rank is exhausted are pure roundoff at machine-epsilon scale, well
    /// under the threshold. Without pivoting, a small genuine pivot can
    /// amplify that roundoff past any fixed tolerance and a rank-deficient
    /// matrix would evaluate to a spurious positive determinant.
    pub fn log_det(&self) -> Option<f64> {
        let m = self.m;
        let mut s = self.data.clone();
        let max_diag = (0..m).map(|i| self.data[i * m + i]).fold(0.0_f64, f64::max);
        let tol = PIVOT_REL * max_diag;
        let mut log_det = 0.0;
        for j in 0..m {
            let mut p = j;
            for i in (j + 1)..m {
                if s[i * m + i] > s[p * m + p] {
                    p = i;
                }
            }
            if p != j {
                for c in 0..m {
                    s.swap(j * m + c, p * m + c);
                }
                for r in 0..m {
                    s.swap(r * m + j, r * m + p);
                }
            }
            let d = s[j * m + j];
            if !(d > tol) {
                return None;
            }
            log_det += d.ln();
            for i in (j + 1)..m {
                let f = s[i * m + j] / d;
                for k in (j + 1)..=i {
                    let v = s[i * m + k] - f * s[k * m + j];
                    s[i * m + k] = v;
                    s[k * m + i] = v;
                }
            }
        }
        Some(log_det)
    }
}

/// The single-unit update `M' = M +- f_i f_i^T` as a pure operation.
pub fn update_information(
    info: &InformationMatrix,
    problem: &DesignProblem,
    i: usize,
    dir: Direction,
) -> InformationMatrix {
    let mut out = info.clone();
    let w = match dir {
        Direction::Up => 1.0,
        Direction::Down => -1.0,
    };
    out.add_point(problem.regressor(i), w);
    out
}

/// A design criterion evaluated on the information matrix. Implementations
/// must be nonnegative, monotone under adding information, and return zero
/// for singular matrices.
pub trait Criterion {
    fn evaluate(&self, info: &InformationMatrix) -> f64;

    fn evaluate_exact(&self, problem: &DesignProblem, design: &ExactDesign) -> f64 {
        self.evaluate(&InformationMatrix::from_exact(problem, design))
    }

    fn evaluate_weights(&self, problem: &DesignProblem, weights: &[f64]) -> f64 {
        self.evaluate(&InformationMatrix::from_weights(problem, weights))
    }
}

/// D-criterion, `det(M)^(1/m)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct DCriterion;

impl Criterion for DCriterion {
    fn evaluate(&self, info: &InformationMatrix) -> f64 {
        match info.log_det() {
            Some(ld) => (ld / info.order() as f64).exp(),
            None => 0.0,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EfficiencyError {
    #[error("reference design has zero criterion value")]
    SingularReference,
}

/// Relative D-efficiency of `design` against `reference`.
pub fn d_efficiency(
    problem: &DesignProblem,
    design: &ExactDesign,
    reference: &ExactDesign,
) -> Result<f64, EfficiencyError> {
    let c = DCriterion;
    let denom = c.evaluate_exact(problem, reference);
    if denom <= 0.0 {
        return Err(EfficiencyError::SingularReference);
    }
    Ok(c.evaluate_exact(problem, design) / denom)
}
