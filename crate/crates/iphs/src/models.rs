//! Built-in model catalog: two-compartment heat conduction.
//!
//! Two compartments of ideal gas exchange heat through an internal
//! conducting wall; compartment 2 also exchanges heat with a controlled
//! thermostat at temperature u through an external wall. The state is the
//! pair of compartment entropies, the Hamiltonian is the total internal
//! energy with temperature law T(S) = T₀ exp(S/c), and the total entropy
//! is S = x₁ + x₂. The drift bracket {S, H}_J = T₂ − T₁ is the driving
//! force of the internal conduction; Fourier's law sits in
//! γ = λ/(T₁T₂) and γ_port = λ_e/(T₂u).
//!
//! The same physics is provided in both port formulations so their
//! equivalence is checkable, plus a drift-only variant for conservation
//! studies.

use nalgebra::{DMatrix, DVector};

use crate::bracket::{PortMatrix, StructureMatrix};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::system::{GammaFn, IphsSystem, IrreversiblePort, LegacyPort};

/// Admissible compartment temperatures for the built-in models.
pub const TEMPERATURE_RANGE: (f64, f64) = (10.0, 2000.0);
/// Admissible thermostat temperatures for the built-in models.
pub const INPUT_RANGE: (f64, f64) = (10.0, 2000.0);

/// Catalog identifiers accepted by [`builtin`].
pub const MODEL_IDS: &[&str] = &[
    "two-compartment-legacy",
    "two-compartment-irreversible",
    "two-compartment-drift",
];

/// Parameters of the two-compartment heat-conduction system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoCompartmentParams {
    /// Internal wall conduction coefficient λ > 0.
    pub lambda: f64,
    /// External wall conduction coefficient λ_e > 0.
    pub lambda_e: f64,
    /// Reference temperature T₀ > 0 shared by both compartments.
    pub t0: f64,
    /// Heat capacity of compartment 1.
    pub c1: f64,
    /// Heat capacity of compartment 2.
    pub c2: f64,
}

impl Default for TwoCompartmentParams {
    /// Reference parameter set used throughout the tests and docs.
    fn default() -> Self {
        Self { lambda: 1.0, lambda_e: 0.5, t0: 300.0, c1: 1.0, c2: 1.0 }
    }
}

impl TwoCompartmentParams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("lambda", self.lambda),
            ("lambda_e", self.lambda_e),
            ("t0", self.t0),
            ("c1", self.c1),
            ("c2", self.c2),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NotPositive { what: name, value });
            }
        }
        Ok(())
    }

    fn capacity(&self, compartment: usize) -> f64 {
        if compartment == 0 {
            self.c1
        } else {
            self.c2
        }
    }

    /// Entropy coordinate xᵢ = cᵢ ln(Tᵢ/T₀) at a given temperature.
    pub fn entropy_at_temperature(&self, compartment: usize, temperature: f64) -> Result<f64> {
        if compartment > 1 {
            return Err(Error::DimensionMismatch {
                what: "compartment index",
                expected: 1,
                actual: compartment,
            });
        }
        if !(temperature > 0.0) {
            return Err(Error::NotPositive { what: "temperature", value: temperature });
        }
        Ok(self.capacity(compartment) * (temperature / self.t0).ln())
    }

    /// State vector at the given compartment temperatures.
    pub fn state_from_temperatures(&self, temperatures: &[f64; 2]) -> Result<DVector<f64>> {
        Ok(DVector::from_vec(vec![
            self.entropy_at_temperature(0, temperatures[0])?,
            self.entropy_at_temperature(1, temperatures[1])?,
        ]))
    }

    /// Admissible state box in entropy coordinates (images of [`TEMPERATURE_RANGE`]).
    pub fn state_box(&self) -> Vec<(f64, f64)> {
        (0..2)
            .map(|i| {
                let c = self.capacity(i);
                (
                    c * (TEMPERATURE_RANGE.0 / self.t0).ln(),
                    c * (TEMPERATURE_RANGE.1 / self.t0).ln(),
                )
            })
            .collect()
    }
}

/// The ideal-gas temperature law, unguarded. Shared verbatim by
/// [`ideal_gas_temperature`] and the Hamiltonian gradients so that
/// ∂H/∂xᵢ and the constitutive law agree bit-for-bit.
fn temperature(s: f64, t0: f64, c: f64) -> f64 {
    t0 * (s / c).exp()
}

/// T(S) = T₀ exp(S/c) with domain guards.
pub fn ideal_gas_temperature(s: f64, t0: f64, c: f64) -> Result<f64> {
    if !(t0 > 0.0) {
        return Err(Error::NotPositive { what: "t0", value: t0 });
    }
    if !(c > 0.0) {
        return Err(Error::NotPositive { what: "c", value: c });
    }
    let t = temperature(s, t0, c);
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::Domain {
            reason: format!("temperature overflow or underflow at entropy {s}"),
        });
    }
    Ok(t)
}

/// Total internal energy H(x) = c₁T₀ exp(x₁/c₁) + c₂T₀ exp(x₂/c₂).
///
/// The closed form is the exact antiderivative of the temperature law, so
/// ∂H/∂xᵢ = Tᵢ holds analytically.
pub fn internal_energy(p: &TwoCompartmentParams) -> ScalarField {
    let &TwoCompartmentParams { t0, c1, c2, .. } = p;
    ScalarField::new(
        2,
        move |x: &DVector<f64>| c1 * temperature(x[0], t0, c1) + c2 * temperature(x[1], t0, c2),
        move |x: &DVector<f64>| {
            DVector::from_vec(vec![temperature(x[0], t0, c1), temperature(x[1], t0, c2)])
        },
    )
}

/// Total entropy S(x) = x₁ + x₂.
pub fn total_entropy() -> ScalarField {
    ScalarField::linear(DVector::from_element(2, 1.0))
}

/// Fourier's law for the internal wall: γ = λ/(T₁T₂).
///
/// λ is not validated here; a non-positive coefficient surfaces as a
/// positivity error at evaluation time.
pub fn conduction_gamma(lambda: f64) -> GammaFn {
    GammaFn::of_state("gamma", move |_x, grad_h| lambda / (grad_h[0] * grad_h[1]))
}

/// Fourier's law for the external wall: γ_port = λ_e/(T₂u).
pub fn thermostat_gamma_port(lambda_e: f64) -> GammaFn {
    GammaFn::new("gamma_port", move |_x, grad_h, u| {
        if u.len() != 1 {
            return Err(Error::DimensionMismatch {
                what: "thermostat input",
                expected: 1,
                actual: u.len(),
            });
        }
        if !(u[0] > 0.0) {
            return Err(Error::Domain {
                reason: format!("thermostat temperature u = {} must be > 0", u[0]),
            });
        }
        Ok(lambda_e / (grad_h[1] * u[0]))
    })
}

fn in_range(value: f64, range: (f64, f64)) -> bool {
    value >= range.0 && value <= range.1
}

/// Admissibility predicate for the built-in models: temperatures and inputs
/// inside [`TEMPERATURE_RANGE`] and [`INPUT_RANGE`].
pub fn admissibility(p: &TwoCompartmentParams) -> impl Fn(&DVector<f64>, &DVector<f64>) -> bool {
    let &TwoCompartmentParams { t0, c1, c2, .. } = p;
    move |x: &DVector<f64>, u: &DVector<f64>| {
        in_range(temperature(x[0], t0, c1), TEMPERATURE_RANGE)
            && in_range(temperature(x[1], t0, c2), TEMPERATURE_RANGE)
            && u.iter().all(|&ui| in_range(ui, INPUT_RANGE))
    }
}

/// The system in the original affine formulation:
/// W = (0, −λ_e)ᵀ and g = (0, λ_e/T₂)ᵀ with input u = T_e.
pub fn two_compartment_legacy(p: &TwoCompartmentParams) -> Result<IphsSystem> {
    p.validate()?;
    let lambda_e = p.lambda_e;
    let port = LegacyPort::new(
        1,
        move |_x: &DVector<f64>, _grad_h: &DVector<f64>| DVector::from_vec(vec![0.0, -lambda_e]),
        move |_x: &DVector<f64>, grad_h: &DVector<f64>| {
            DMatrix::from_column_slice(2, 1, &[0.0, lambda_e / grad_h[1]])
        },
    );
    Ok(IphsSystem::legacy(
        internal_energy(p),
        total_entropy(),
        StructureMatrix::symplectic_2d(),
        conduction_gamma(p.lambda),
        port,
    )?
    .with_domain(admissibility(p)))
}

/// The system with the irreversible port map:
/// g = (0, 1)ᵀ, γ_port = λ_e/(T₂u), τ = 1.
pub fn two_compartment_irreversible(p: &TwoCompartmentParams) -> Result<IphsSystem> {
    p.validate()?;
    let g = PortMatrix::column(DVector::from_vec(vec![0.0, 1.0]))?;
    let port = IrreversiblePort::with_unit_tau(g, thermostat_gamma_port(p.lambda_e))?;
    Ok(IphsSystem::irreversible(
        internal_energy(p),
        total_entropy(),
        StructureMatrix::symplectic_2d(),
        conduction_gamma(p.lambda),
        port,
    )?
    .with_domain(admissibility(p)))
}

/// Drift-only variant (W = 0, g = 0): internal conduction with no
/// environment exchange, for conservation and convergence studies.
pub fn two_compartment_drift(p: &TwoCompartmentParams) -> Result<IphsSystem> {
    p.validate()?;
    Ok(IphsSystem::legacy(
        internal_energy(p),
        total_entropy(),
        StructureMatrix::symplectic_2d(),
        conduction_gamma(p.lambda),
        LegacyPort::zero(2, 1),
    )?
    .with_domain(admissibility(p)))
}

/// A built-in system together with its admissible sampling boxes.
#[derive(Debug, Clone)]
pub struct BuiltinModel {
    pub system: IphsSystem,
    /// Per-coordinate bounds on the state (entropy coordinates).
    pub state_box: Vec<(f64, f64)>,
    /// Per-coordinate bounds on the input.
    pub input_box: Vec<(f64, f64)>,
}

/// Looks up a catalog model by identifier.
pub fn builtin(id: &str, p: &TwoCompartmentParams) -> Result<BuiltinModel> {
    let system = match id {
        "two-compartment-legacy" => two_compartment_legacy(p)?,
        "two-compartment-irreversible" => two_compartment_irreversible(p)?,
        "two-compartment-drift" => two_compartment_drift(p)?,
        other => {
            return Err(Error::Domain { reason: format!("unknown model id `{other}`") });
        }
    };
    Ok(BuiltinModel {
        system,
        state_box: p.state_box(),
        input_box: vec![INPUT_RANGE],
    })
}
