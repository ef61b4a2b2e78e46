//! Smooth scalar fields on ℝⁿ with analytically supplied gradients.
//!
//! Hamiltonian and entropy functions are represented as [`ScalarField`]s:
//! a value map together with its exact gradient. Gradients are always
//! analytic; the central-difference path in [`check_gradient`] exists only
//! as a validation oracle, never as the runtime gradient, because the
//! balance identities downstream must hold to near machine precision.

use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};

type ValueFn = dyn Fn(&DVector<f64>) -> f64 + Send + Sync;
type GradientFn = dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync;

/// A smooth real-valued function of the state with an evaluable gradient.
///
/// Immutable after construction; safe to evaluate from multiple threads.
#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    value: Arc<ValueFn>,
    gradient: Arc<GradientFn>,
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField").field("dim", &self.dim).finish()
    }
}

impl ScalarField {
    /// Builds a field from its value map and analytic gradient.
    pub fn new<V, G>(dim: usize, value: V, gradient: G) -> Self
    where
        V: Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
        G: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    {
        Self {
            dim,
            value: Arc::new(value),
            gradient: Arc::new(gradient),
        }
    }

    /// Linear field f(x) = cᵀx with constant gradient c.
    pub fn linear(coefficients: DVector<f64>) -> Self {
        let dim = coefficients.len();
        let c_value = coefficients.clone();
        Self::new(
            dim,
            move |x| c_value.dot(x),
            move |_| coefficients.clone(),
        )
    }

    /// Constant field f ≡ c with zero gradient.
    pub fn constant(dim: usize, c: f64) -> Self {
        Self::new(dim, move |_| c, move |_| DVector::zeros(dim))
    }

    /// State dimension n.
    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_dim(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                what: "state vector",
                expected: self.dim,
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Evaluates the field at `x`.
    pub fn eval(&self, x: &DVector<f64>) -> Result<f64> {
        self.check_dim(x)?;
        Ok((self.value)(x))
    }

    /// Evaluates the analytic gradient at `x`.
    pub fn grad(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(x)?;
        let g = (self.gradient)(x);
        if g.len() != self.dim {
            return Err(Error::DimensionMismatch {
                what: "gradient",
                expected: self.dim,
                actual: g.len(),
            });
        }
        Ok(g)
    }
}

/// Outcome of comparing an analytic gradient against central differences.
#[derive(Debug, Clone, Copy)]
pub struct GradientCheck {
    /// Largest componentwise error, relative to max(1, |gradient component|).
    pub max_rel_error: f64,
    /// Coordinate where the largest error occurred.
    pub worst_component: usize,
    /// True iff `max_rel_error <= tol`.
    pub pass: bool,
}

/// Validates the analytic gradient of `f` at `x` with central differences of step `h`.
///
/// The finite-difference error is O(h²); the check passes iff the largest
/// componentwise error, relative to max(1, |∂f/∂xᵢ|), stays within `tol`.
pub fn check_gradient(f: &ScalarField, x: &DVector<f64>, h: f64, tol: f64) -> Result<GradientCheck> {
    if h <= 0.0 {
        return Err(Error::NotPositive { what: "step h", value: h });
    }
    if tol <= 0.0 {
        return Err(Error::NotPositive { what: "tolerance", value: tol });
    }
    let grad = f.grad(x)?;
    let mut max_rel_error = 0.0_f64;
    let mut worst_component = 0;
    let mut probe = x.clone();
    for i in 0..f.dim() {
        let xi = x[i];
        probe[i] = xi + h;
        let fp = f.eval(&probe)?;
        probe[i] = xi - h;
        let fm = f.eval(&probe)?;
        probe[i] = xi;
        if !fp.is_finite() || !fm.is_finite() {
            return Err(Error::NonFinite { what: "finite-difference value", index: i });
        }
        let fd = (fp - fm) / (2.0 * h);
        let rel = (fd - grad[i]).abs() / grad[i].abs().max(1.0);
        if rel > max_rel_error {
            max_rel_error = rel;
            worst_component = i;
        }
    }
    Ok(GradientCheck {
        max_rel_error,
        worst_component,
        pass: max_rel_error <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn total_entropy() -> ScalarField {
        ScalarField::linear(dvector![1.0, 1.0])
    }

    /// Two-compartment internal energy with T0 = 300, c1 = c2 = 1.
    fn two_compartment_energy() -> ScalarField {
        ScalarField::new(
            2,
            |x: &DVector<f64>| 300.0 * x[0].exp() + 300.0 * x[1].exp(),
            |x: &DVector<f64>| dvector![300.0 * x[0].exp(), 300.0 * x[1].exp()],
        )
    }

    #[test]
    fn eval_linear_entropy() {
        let s = total_entropy();
        assert_eq!(s.eval(&dvector![2.0, 3.0]).unwrap(), 5.0);
        assert_eq!(s.eval(&dvector![0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn eval_energy_at_zero_state() {
        // U(S) = c T0 exp(S/c) is the antiderivative of T(S); at x = 0 each
        // compartment holds c T0, so H = 600 for the default parameters.
        let h = two_compartment_energy();
        assert_eq!(h.eval(&dvector![0.0, 0.0]).unwrap(), 600.0);
    }

    #[test]
    fn eval_rejects_wrong_dimension() {
        let s = total_entropy();
        let err = s.eval(&dvector![1.0, 2.0, 3.0]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn grad_linear_is_constant() {
        let s = total_entropy();
        assert_eq!(s.grad(&dvector![5.0, -3.0]).unwrap(), dvector![1.0, 1.0]);
    }

    #[test]
    fn grad_energy_gives_temperatures() {
        let h = two_compartment_energy();
        let x = dvector![0.0, (350.0_f64 / 300.0).ln()];
        let g = h.grad(&x).unwrap();
        assert!((g[0] - 300.0).abs() < 1e-10);
        assert!((g[1] - 350.0).abs() < 1e-10);
    }

    #[test]
    fn grad_constant_field_is_zero() {
        let f = ScalarField::constant(3, 42.0);
        assert_eq!(f.grad(&dvector![1.0, 2.0, 3.0]).unwrap(), DVector::zeros(3));
    }

    #[test]
    fn grad_is_deterministic() {
        let h = two_compartment_energy();
        let x = dvector![0.3, -0.2];
        let a = h.grad(&x).unwrap();
        let b = h.grad(&x).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn check_gradient_exact_for_linear() {
        let s = total_entropy();
        let report = check_gradient(&s, &dvector![1.0, 1.0], 1e-5, 1e-6).unwrap();
        assert!(report.pass, "error = {}", report.max_rel_error);
        assert!(report.max_rel_error < 1e-9);
    }

    #[test]
    fn check_gradient_energy_field() {
        let h = two_compartment_energy();
        let report = check_gradient(&h, &dvector![0.0, 0.1542], 1e-5, 1e-6).unwrap();
        assert!(report.pass, "error = {}", report.max_rel_error);
    }

    #[test]
    fn check_gradient_detects_wrong_gradient() {
        // gradient deliberately off by a factor of two
        let f = ScalarField::new(
            1,
            |x: &DVector<f64>| x[0] * x[0],
            |x: &DVector<f64>| dvector![4.0 * x[0]],
        );
        let report = check_gradient(&f, &dvector![1.5], 1e-5, 1e-6).unwrap();
        assert!(!report.pass);
        assert_eq!(report.worst_component, 0);
    }

    #[test]
    fn check_gradient_rejects_bad_step() {
        let s = total_entropy();
        assert!(check_gradient(&s, &dvector![0.0, 0.0], 0.0, 1e-6).is_err());
        assert!(check_gradient(&s, &dvector![0.0, 0.0], 1e-5, -1.0).is_err());
    }

    #[test]
    fn check_gradient_reports_nonfinite_coordinate() {
        let f = ScalarField::new(
            2,
            |x: &DVector<f64>| if x[1] > 1.0 { f64::NAN } else { x[0] },
            |_| dvector![1.0, 0.0],
        );
        let err = check_gradient(&f, &dvector![0.0, 1.0], 1e-1, 1e-6).unwrap_err();
        match err {
            Error::NonFinite { index, .. } => assert_eq!(index, 1),
            other => panic!("unexpected error: {other}"),
        }
    }
}
