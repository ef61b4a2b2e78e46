//! Port maps derived by embedding the environment and restricting.
//!
//! The environment is represented by extra state ξ ∈ ℝᵐ carrying linear
//! energy and entropy functions H_c(ξ) = uᵀξ and S_c(ξ) = τᵀξ. Extending
//! the system to the product space and evaluating the (irreversible)
//! Hamiltonian field there, then restricting to the energy variables,
//! recovers the port variables: the reversible construction yields the
//! familiar pair (ẋ = J∂H/∂x + gu, y = gᵀ∂H/∂x), and the irreversible one
//! yields the port maps of [`crate::system::IrreversiblePort`]. Both
//! extensions are kept evaluable so the restriction/embedding consistency
//! is testable rather than assumed.

use nalgebra::{DMatrix, DVector};

use crate::bracket::{port_structure, PortMatrix, StructureMatrix};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::system::{GammaFn, IrreversiblePort};

/// A point (x, ξ) of the product space.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedState {
    pub x: DVector<f64>,
    pub xi: DVector<f64>,
}

impl ExtendedState {
    pub fn new(x: DVector<f64>, xi: DVector<f64>) -> Self {
        Self { x, xi }
    }
}

fn stack(top: &DVector<f64>, bottom: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(top.len() + bottom.len());
    out.rows_mut(0, top.len()).copy_from(top);
    out.rows_mut(top.len(), bottom.len()).copy_from(bottom);
    out
}

fn split(v: DVector<f64>, n: usize) -> (DVector<f64>, DVector<f64>) {
    let top = v.rows(0, n).into_owned();
    let bottom = v.rows(n, v.len() - n).into_owned();
    (top, bottom)
}

/// Hamiltonian system on the product space generated by the separable
/// Hamiltonian H_tot(x, ξ) = H(x) + uᵀξ with structure [[J, g], [-gᵀ, 0]].
#[derive(Debug, Clone)]
pub struct ReversibleExtension {
    structure: StructureMatrix,
    hamiltonian: ScalarField,
    input: DVector<f64>,
}

impl ReversibleExtension {
    fn check_state(&self, state: &ExtendedState) -> Result<()> {
        if state.x.len() != self.hamiltonian.dim() {
            return Err(Error::DimensionMismatch {
                what: "extended state x",
                expected: self.hamiltonian.dim(),
                actual: state.x.len(),
            });
        }
        if state.xi.len() != self.input.len() {
            return Err(Error::DimensionMismatch {
                what: "extended state xi",
                expected: self.input.len(),
                actual: state.xi.len(),
            });
        }
        Ok(())
    }

    /// Structure matrix J_e on the product space.
    pub fn structure(&self) -> &StructureMatrix {
        &self.structure
    }

    /// H_tot(x, ξ) = H(x) + uᵀξ.
    pub fn h_tot(&self, state: &ExtendedState) -> Result<f64> {
        self.check_state(state)?;
        Ok(self.hamiltonian.eval(&state.x)? + self.input.dot(&state.xi))
    }

    /// ∇H_tot = (∂H/∂x, u).
    pub fn grad_h_tot(&self, state: &ExtendedState) -> Result<DVector<f64>> {
        self.check_state(state)?;
        Ok(stack(&self.hamiltonian.grad(&state.x)?, &self.input))
    }

    /// The extended Hamiltonian field J_e ∇H_tot, split into (dx/dt, dξ/dt).
    pub fn field(&self, state: &ExtendedState) -> Result<(DVector<f64>, DVector<f64>)> {
        let grad = self.grad_h_tot(state)?;
        let flow = self.structure.apply(&grad)?;
        Ok(split(flow, state.x.len()))
    }
}

/// Embeds system and environment with the block structure
/// J_e = [[J, g], [-gᵀ, 0]] and the linear environment Hamiltonian uᵀξ.
pub fn extend_reversible(
    j: &StructureMatrix,
    g: &PortMatrix,
    hamiltonian: ScalarField,
    u: DVector<f64>,
) -> Result<ReversibleExtension> {
    let n = j.n();
    let m = g.port_dim();
    if g.state_dim() != n {
        return Err(Error::DimensionMismatch {
            what: "port matrix rows",
            expected: n,
            actual: g.state_dim(),
        });
    }
    if hamiltonian.dim() != n {
        return Err(Error::DimensionMismatch {
            what: "Hamiltonian dimension",
            expected: n,
            actual: hamiltonian.dim(),
        });
    }
    if u.len() != m {
        return Err(Error::DimensionMismatch {
            what: "input coefficients",
            expected: m,
            actual: u.len(),
        });
    }
    let mut entries = DMatrix::zeros(n + m, n + m);
    entries.view_mut((0, 0), (n, n)).copy_from(j.entries());
    entries.view_mut((0, n), (n, m)).copy_from(g.entries());
    entries.view_mut((n, 0), (m, n)).copy_from(&(-g.entries().transpose()));
    let structure = StructureMatrix::new(entries)?;
    Ok(ReversibleExtension { structure, hamiltonian, input: u })
}

/// The port-Hamiltonian system obtained by restricting the environment
/// Hamiltonians to linear functions: ẋ = J∂H/∂x + gu, y = gᵀ∂H/∂x.
#[derive(Debug, Clone)]
pub struct ReversiblePhs {
    j: StructureMatrix,
    g: PortMatrix,
    hamiltonian: ScalarField,
}

impl ReversiblePhs {
    /// State flow and collocated output at (x, u).
    pub fn evaluate(&self, x: &DVector<f64>, u: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
        let grad_h = self.hamiltonian.grad(x)?;
        let xdot = self.j.apply(&grad_h)? + self.g.apply(u)?;
        let y = self.g.apply_transpose(&grad_h)?;
        Ok((xdot, y))
    }
}

/// Restriction of the reversible extension to the energy variables.
pub fn restrict_reversible(
    j: &StructureMatrix,
    g: &PortMatrix,
    hamiltonian: ScalarField,
) -> Result<ReversiblePhs> {
    if g.state_dim() != j.n() || hamiltonian.dim() != j.n() {
        return Err(Error::DimensionMismatch {
            what: "restricted system",
            expected: j.n(),
            actual: g.state_dim().min(hamiltonian.dim()),
        });
    }
    Ok(ReversiblePhs { j: j.clone(), g: g.clone(), hamiltonian })
}

/// Irreversible drift on the product space: only the interface interaction
/// is modelled, through the anti-diagonal structure [[0, g], [-gᵀ, 0]],
/// with H_tot = H + uᵀξ and S_tot = S + τᵀξ.
#[derive(Debug, Clone)]
pub struct IrreversibleExtension {
    structure: StructureMatrix,
    hamiltonian: ScalarField,
    entropy: ScalarField,
    input: DVector<f64>,
    tau: DVector<f64>,
    gamma_port: GammaFn,
}

impl IrreversibleExtension {
    fn check_state(&self, state: &ExtendedState) -> Result<()> {
        if state.x.len() != self.hamiltonian.dim() {
            return Err(Error::DimensionMismatch {
                what: "extended state x",
                expected: self.hamiltonian.dim(),
                actual: state.x.len(),
            });
        }
        if state.xi.len() != self.input.len() {
            return Err(Error::DimensionMismatch {
                what: "extended state xi",
                expected: self.input.len(),
                actual: state.xi.len(),
            });
        }
        Ok(())
    }

    pub fn structure(&self) -> &StructureMatrix {
        &self.structure
    }

    pub fn h_tot(&self, state: &ExtendedState) -> Result<f64> {
        self.check_state(state)?;
        Ok(self.hamiltonian.eval(&state.x)? + self.input.dot(&state.xi))
    }

    pub fn s_tot(&self, state: &ExtendedState) -> Result<f64> {
        self.check_state(state)?;
        Ok(self.entropy.eval(&state.x)? + self.tau.dot(&state.xi))
    }

    /// The extended irreversible drift γ_port {S_tot, H_tot}_{J_port} J_port ∇H_tot,
    /// split into (dx/dt, dξ/dt). The x-rows are the port flow and the
    /// ξ-rows equal -y.
    pub fn field(&self, state: &ExtendedState) -> Result<(DVector<f64>, DVector<f64>)> {
        self.check_state(state)?;
        let grad_h = self.hamiltonian.grad(&state.x)?;
        let grad_s = self.entropy.grad(&state.x)?;
        let grad_h_tot = stack(&grad_h, &self.input);
        let grad_s_tot = stack(&grad_s, &self.tau);
        let j_grad = self.structure.apply(&grad_h_tot)?;
        let bracket = grad_s_tot.dot(&j_grad);
        let gamma = self.gamma_port.evaluate(&state.x, &grad_h, &self.input)?;
        Ok(split(j_grad * (gamma * bracket), state.x.len()))
    }
}

/// Embeds the interface as an irreversible coupling on the product space.
pub fn extend_irreversible(
    g: &PortMatrix,
    gamma_port: GammaFn,
    hamiltonian: ScalarField,
    entropy: ScalarField,
    u: DVector<f64>,
    tau: DVector<f64>,
) -> Result<IrreversibleExtension> {
    let n = g.state_dim();
    let m = g.port_dim();
    if hamiltonian.dim() != n || entropy.dim() != n {
        return Err(Error::DimensionMismatch {
            what: "generating functions",
            expected: n,
            actual: hamiltonian.dim().min(entropy.dim()),
        });
    }
    if u.len() != m || tau.len() != m {
        return Err(Error::DimensionMismatch {
            what: "environment coefficients",
            expected: m,
            actual: u.len().min(tau.len()),
        });
    }
    Ok(IrreversibleExtension {
        structure: port_structure(g),
        hamiltonian,
        entropy,
        input: u,
        tau,
        gamma_port,
    })
}

/// The restricted irreversible port maps (Eq. 9 shape):
/// flow = γ_port [(gᵀ∂S/∂x)ᵀu − τᵀ(gᵀ∂H/∂x)] g u and
/// y = γ_port [(gᵀ∂S/∂x)ᵀu − τᵀ(gᵀ∂H/∂x)] gᵀ∂H/∂x.
#[derive(Debug, Clone)]
pub struct DerivedPort {
    port: IrreversiblePort,
    hamiltonian: ScalarField,
    entropy: ScalarField,
}

impl DerivedPort {
    /// Port flow into the state space and the conjugated output at (x, u).
    pub fn evaluate(&self, x: &DVector<f64>, u: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
        let grad_h = self.hamiltonian.grad(x)?;
        let grad_s = self.entropy.grad(x)?;
        self.port.flow_and_output(x, &grad_h, &grad_s, u)
    }

    /// γ_port · {S_tot, H_tot}_{J_port}: the factor by which the reversible
    /// port map (gu, gᵀ∂H/∂x) is multiplied.
    pub fn multiplier(&self, x: &DVector<f64>, u: &DVector<f64>) -> Result<f64> {
        let grad_h = self.hamiltonian.grad(x)?;
        let grad_s = self.entropy.grad(x)?;
        let bracket = self.port.driving_force(&grad_h, &grad_s, u)?;
        Ok(self.port.gamma_port().evaluate(x, &grad_h, u)? * bracket)
    }

    pub fn port(&self) -> &IrreversiblePort {
        &self.port
    }

    /// Consumes the evaluator, yielding the port map for system assembly.
    pub fn into_port(self) -> IrreversiblePort {
        self.port
    }
}

/// Derives the irreversible port maps from the interface data.
pub fn derive_irreversible_port(
    g: PortMatrix,
    gamma_port: GammaFn,
    entropy: ScalarField,
    hamiltonian: ScalarField,
    tau: DVector<f64>,
) -> Result<DerivedPort> {
    let n = g.state_dim();
    if hamiltonian.dim() != n || entropy.dim() != n {
        return Err(Error::DimensionMismatch {
            what: "generating functions",
            expected: n,
            actual: hamiltonian.dim().min(entropy.dim()),
        });
    }
    let port = IrreversiblePort::new(g, gamma_port, tau)?;
    Ok(DerivedPort { port, hamiltonian, entropy })
}
