//! Constant skew-symmetric structure matrices and the brackets they define.
//!
//! A [`StructureMatrix`] J defines the Poisson bracket
//! {a, b}_J = aᵀ J b on co-vectors. A constant [`PortMatrix`] g couples the
//! state space to an m-dimensional port; [`port_structure`] embeds it into
//! the anti-diagonal structure matrix [[0, g], [-gᵀ, 0]] on the product
//! space. The Jacobi identity is never checked: it holds automatically for
//! constant matrices and the brackets here are used as pseudo-Poisson
//! brackets anyway.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest absolute entry of M + Mᵀ.
fn skew_defect(m: &DMatrix<f64>) -> f64 {
    let mut defect = 0.0_f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            defect = defect.max((m[(i, j)] + m[(j, i)]).abs());
        }
    }
    defect
}

/// Returns true iff `m` is skew-symmetric within `tol` (max |M + Mᵀ| ≤ tol).
pub fn is_skew(m: &DMatrix<f64>, tol: f64) -> Result<bool> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(skew_defect(m) <= tol)
}

/// A constant skew-symmetric structure matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureMatrix {
    entries: DMatrix<f64>,
}

impl StructureMatrix {
    /// Builds a structure matrix from exact (user-entered) entries.
    ///
    /// Skew-symmetry is required to hold exactly; use [`Self::with_tolerance`]
    /// for matrices assembled from computed values.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(entries, 0.0)
    }

    /// Builds a structure matrix, accepting a skew-symmetry defect up to `tol`.
    pub fn with_tolerance(entries: DMatrix<f64>, tol: f64) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        for i in 0..entries.nrows() {
            for j in 0..entries.ncols() {
                if !entries[(i, j)].is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
            }
        }
        let defect = skew_defect(&entries);
        if defect > tol {
            return Err(Error::NotSkewSymmetric {
                max_defect: defect,
                tol,
            });
        }
        Ok(Self { entries })
    }

    /// The n x n zero structure matrix.
    pub fn zeros(n: usize) -> Self {
        Self {
            entries: DMatrix::zeros(n, n),
        }
    }

    /// The 2x2 symplectic matrix [[0, 1], [-1, 0]].
    pub fn symplectic_2d() -> Self {
        Self {
            entries: DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
        }
    }

    /// Dimension n.
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Applies the matrix to a co-vector: J v.
    pub fn apply(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        if v.len() != self.n() {
            return Err(Error::DimensionMismatch {
                what: "co-vector",
                expected: self.n(),
                actual: v.len(),
            });
        }
        Ok(&self.entries * v)
    }
}

/// A constant n x m port matrix coupling the state space to the port.
#[derive(Debug, Clone, PartialEq)]
pub struct PortMatrix {
    entries: DMatrix<f64>,
}

impl PortMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::DimensionMismatch {
                what: "port matrix",
                expected: 1,
                actual: 0,
            });
        }
        for i in 0..entries.nrows() {
            for j in 0..entries.ncols() {
                if !entries[(i, j)].is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
            }
        }
        Ok(Self { entries })
    }

    /// Column-vector port matrix for a single port (m = 1).
    pub fn column(entries: DVector<f64>) -> Result<Self> {
        let n = entries.len();
        Self::new(DMatrix::from_column_slice(n, 1, entries.as_slice()))
    }

    /// State dimension n.
    pub fn state_dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Port dimension m.
    pub fn port_dim(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// g u, mapping a port input into the state space.
    pub fn apply(&self, u: &DVector<f64>) -> Result<DVector<f64>> {
        if u.len() != self.port_dim() {
            return Err(Error::DimensionMismatch {
                what: "port input",
                expected: self.port_dim(),
                actual: u.len(),
            });
        }
        Ok(&self.entries * u)
    }

    /// gᵀ v, projecting a state-space co-vector onto the port.
    pub fn apply_transpose(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        if v.len() != self.state_dim() {
            return Err(Error::DimensionMismatch {
                what: "state co-vector",
                expected: self.state_dim(),
                actual: v.len(),
            });
        }
        Ok(self.entries.transpose() * v)
    }
}

/// The Poisson bracket {a, b}_J = aᵀ J b.
pub fn poisson_bracket(j: &StructureMatrix, a: &DVector<f64>, b: &DVector<f64>) -> Result<f64> {
    if a.len() != j.n() {
        return Err(Error::DimensionMismatch {
            what: "bracket first argument",
            expected: j.n(),
            actual: a.len(),
        });
    }
    let jb = j.apply(b)?;
    Ok(a.dot(&jb))
}

/// Embeds a constant port matrix into the anti-diagonal structure matrix
/// [[0, g], [-gᵀ, 0]] on the (n + m)-dimensional product space.
pub fn port_structure(g: &PortMatrix) -> StructureMatrix {
    let n = g.state_dim();
    let m = g.port_dim();
    let mut entries = DMatrix::zeros(n + m, n + m);
    for i in 0..n {
        for j in 0..m {
            entries[(i, n + j)] = g.entries()[(i, j)];
            entries[(n + j, i)] = -g.entries()[(i, j)];
        }
    }
    // exactly skew by construction
    StructureMatrix { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;
    use proptest::prelude::*;

    #[test]
    fn bracket_is_heat_conduction_driving_force() {
        // {S, U}_J = T2 - T1 for the symplectic structure
        let j = StructureMatrix::symplectic_2d();
        let grad_s = dvector![1.0, 1.0];
        let grad_h = dvector![300.0, 350.0];
        assert_eq!(poisson_bracket(&j, &grad_s, &grad_h).unwrap(), 50.0);
    }

    #[test]
    fn bracket_annihilates_equal_arguments() {
        let j = StructureMatrix::symplectic_2d();
        let a = dvector![3.7, -1.2];
        assert_eq!(poisson_bracket(&j, &a, &a).unwrap(), 0.0);
    }

    #[test]
    fn bracket_vanishes_for_zero_structure() {
        let j = StructureMatrix::zeros(2);
        let a = dvector![1.0, 2.0];
        let b = dvector![-5.0, 0.5];
        assert_eq!(poisson_bracket(&j, &a, &b).unwrap(), 0.0);
    }

    #[test]
    fn bracket_rejects_mismatched_dimensions() {
        let j = StructureMatrix::symplectic_2d();
        let err = poisson_bracket(&j, &dvector![1.0], &dvector![1.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn construction_rejects_non_skew() {
        let err = StructureMatrix::new(DMatrix::identity(2, 2)).unwrap_err();
        assert!(matches!(err, Error::NotSkewSymmetric { .. }));
    }

    #[test]
    fn construction_rejects_non_finite() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(matches!(
            StructureMatrix::with_tolerance(m, 1.0),
            Err(Error::NonFiniteEntry { .. })
        ));
    }

    #[test]
    fn port_structure_external_wall() {
        // g = (0, 1)'; the embedded structure has (2,3) = 1 and (3,2) = -1
        // (1-indexed), all other entries zero.
        let g = PortMatrix::column(dvector![0.0, 1.0]).unwrap();
        let jp = port_structure(&g);
        let expected =
            DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0, 0.0]);
        assert_eq!(jp.entries(), &expected);
    }

    #[test]
    fn port_structure_zero_matrix() {
        let g = PortMatrix::new(DMatrix::zeros(2, 2)).unwrap();
        assert_eq!(port_structure(&g).entries(), &DMatrix::zeros(4, 4));
    }

    #[test]
    fn port_structure_identity_gives_canonical_form() {
        let g = PortMatrix::new(DMatrix::identity(2, 2)).unwrap();
        let jp = port_structure(&g);
        let mut expected = DMatrix::zeros(4, 4);
        expected[(0, 2)] = 1.0;
        expected[(1, 3)] = 1.0;
        expected[(2, 0)] = -1.0;
        expected[(3, 1)] = -1.0;
        assert_eq!(jp.entries(), &expected);
    }

    #[test]
    fn is_skew_cases() {
        let symplectic = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!(is_skew(&symplectic, 0.0).unwrap());
        assert!(!is_skew(&DMatrix::identity(2, 2), 1e-12).unwrap());
        assert!(is_skew(&DMatrix::zeros(3, 3), 0.0).unwrap());
        assert!(matches!(
            is_skew(&DMatrix::zeros(2, 3), 0.0),
            Err(Error::NotSquare { .. })
        ));
    }

    fn small_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-100.0..100.0f64, n)
    }

    proptest! {
        #[test]
        fn skew_quadratic_form_annihilation(entries in small_vec(3), v in small_vec(3)) {
            // assemble a skew matrix from 3 free entries
            let mut m = DMatrix::zeros(3, 3);
            m[(0, 1)] = entries[0];
            m[(1, 0)] = -entries[0];
            m[(0, 2)] = entries[1];
            m[(2, 0)] = -entries[1];
            m[(1, 2)] = entries[2];
            m[(2, 1)] = -entries[2];
            let j = StructureMatrix::new(m).unwrap();
            let v = DVector::from_vec(v);
            let q = poisson_bracket(&j, &v, &v).unwrap();
            let scale = v.norm_squared() * j.entries().norm();
            prop_assert!(q.abs() <= 1e-12 * scale.max(1e-300));
        }

        #[test]
        fn port_structure_is_skew(entries in small_vec(6)) {
            let g = PortMatrix::new(DMatrix::from_row_slice(3, 2, &entries)).unwrap();
            let jp = port_structure(&g);
            prop_assert!(is_skew(jp.entries(), 0.0).unwrap());
        }

        #[test]
        fn bracket_is_bilinear(
            a in small_vec(2),
            a2 in small_vec(2),
            b in small_vec(2),
            alpha in -10.0..10.0f64,
            beta in -10.0..10.0f64,
        ) {
            let j = StructureMatrix::symplectic_2d();
            let a = DVector::from_vec(a);
            let a2 = DVector::from_vec(a2);
            let b = DVector::from_vec(b);
            let lhs = poisson_bracket(&j, &(&a * alpha + &a2 * beta), &b).unwrap();
            let rhs = alpha * poisson_bracket(&j, &a, &b).unwrap()
                + beta * poisson_bracket(&j, &a2, &b).unwrap();
            let scale = 1.0 + lhs.abs().max(rhs.abs());
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }
    }
}
