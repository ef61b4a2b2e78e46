//! Run configuration: JSON schema, validation and model assembly.
//!
//! A configuration names either a catalog model or an inline custom
//! variant of the heat-conduction family (user-supplied structure matrix,
//! port matrix and entropy co-input over the same constitutive laws).
//! Catalog parameters are fully validated here; for custom models the
//! structure-matrix skewness and coefficient positivity are deliberately
//! left to `check`/runtime so audits can report them as named failures.

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use iphs::models::{self, TwoCompartmentParams};
use iphs::{
    InputSignal, IphsSystem, IrreversiblePort, PortMatrix, ScalarField, StructureMatrix,
};

pub const DEFAULT_TOL_BALANCE: f64 = 1e-10;

fn default_tol() -> f64 {
    DEFAULT_TOL_BALANCE
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub x0: InitialState,
    pub input: InputSpec,
    pub t0: f64,
    pub t1: f64,
    pub h: f64,
    #[serde(default = "default_tol")]
    pub tol_balance: f64,
    #[serde(default)]
    pub out_csv: Option<PathBuf>,
    #[serde(default)]
    pub out_report: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    /// Catalog identifier (e.g. "two-compartment-irreversible").
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub params: Option<ParamsSpec>,
    /// Inline custom model; mutually exclusive with `name`.
    #[serde(default)]
    pub custom: Option<CustomSpec>,
}

/// Parameter map; omitted fields take the reference values.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub lambda: Option<f64>,
    pub lambda_e: Option<f64>,
    pub t0: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
}

impl ParamsSpec {
    fn resolve(&self) -> TwoCompartmentParams {
        let d = TwoCompartmentParams::default();
        TwoCompartmentParams {
            lambda: self.lambda.unwrap_or(d.lambda),
            lambda_e: self.lambda_e.unwrap_or(d.lambda_e),
            t0: self.t0.unwrap_or(d.t0),
            c1: self.c1.unwrap_or(d.c1),
            c2: self.c2.unwrap_or(d.c2),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSpec {
    /// Structure matrix entries (2x2 for the heat-conduction family).
    pub j: Vec<Vec<f64>>,
    /// Port matrix entries (2 rows, one column per port).
    pub g: Vec<Vec<f64>>,
    /// Entropy co-input, one entry per port.
    pub tau: Vec<f64>,
    #[serde(default)]
    pub params: Option<ParamsSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    Temperatures { temperatures: Vec<f64> },
    State { state: Vec<f64> },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputSpec {
    Constant {
        value: Vec<f64>,
    },
    Step {
        before: Vec<f64>,
        after: Vec<f64>,
        switch_time: f64,
    },
    Sinusoid {
        mean: Vec<f64>,
        amplitude: Vec<f64>,
        period: f64,
        #[serde(default)]
        phase: f64,
    },
    Table {
        times: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

impl InputSpec {
    pub fn build(&self) -> Result<InputSignal, String> {
        let signal = match self {
            InputSpec::Constant { value } => {
                InputSignal::constant(DVector::from_vec(value.clone()))
            }
            InputSpec::Step { before, after, switch_time } => InputSignal::step(
                DVector::from_vec(before.clone()),
                DVector::from_vec(after.clone()),
                *switch_time,
            )
            .map_err(|e| format!("input: {e}"))?,
            InputSpec::Sinusoid { mean, amplitude, period, phase } => InputSignal::sinusoid(
                DVector::from_vec(mean.clone()),
                DVector::from_vec(amplitude.clone()),
                *period,
                *phase,
            )
            .map_err(|e| format!("input: {e}"))?,
            InputSpec::Table { times, values } => InputSignal::table(
                times.clone(),
                values.iter().map(|v| DVector::from_vec(v.clone())).collect(),
            )
            .map_err(|e| format!("input: {e}"))?,
        };
        Ok(signal)
    }
}

/// A parsed and shape-validated model, ready to assemble.
#[derive(Debug)]
pub enum ResolvedModel {
    Builtin {
        id: String,
        params: TwoCompartmentParams,
    },
    Custom {
        j: DMatrix<f64>,
        g: DMatrix<f64>,
        tau: DVector<f64>,
        params: TwoCompartmentParams,
    },
}

fn matrix_from_rows(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>, String> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(format!("model.custom.{what}: matrix must be non-empty"));
    }
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(format!("model.custom.{what}: ragged rows"));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    if flat.iter().any(|v| !v.is_finite()) {
        return Err(format!("model.custom.{what}: non-finite entry"));
    }
    Ok(DMatrix::from_row_iterator(rows.len(), ncols, flat))
}

impl ModelSection {
    pub fn resolve(&self) -> Result<ResolvedModel, String> {
        match (&self.name, &self.custom) {
            (Some(_), Some(_)) => {
                Err("model: give either `name` or `custom`, not both".to_string())
            }
            (None, None) => Err("model: one of `name` or `custom` is required".to_string()),
            (Some(name), None) => {
                let params = self.params.map(|p| p.resolve()).unwrap_or_default();
                params.validate().map_err(|e| format!("model.params: {e}"))?;
                if !models::MODEL_IDS.contains(&name.as_str()) {
                    return Err(format!(
                        "model.name: unknown id `{name}` (expected one of {:?})",
                        models::MODEL_IDS
                    ));
                }
                Ok(ResolvedModel::Builtin { id: name.clone(), params })
            }
            (None, Some(custom)) => {
                let params = custom.params.map(|p| p.resolve()).unwrap_or_default();
                // coordinate maps need t0 and the capacities; the conduction
                // coefficients stay unchecked until evaluation
                for (name, value) in [("t0", params.t0), ("c1", params.c1), ("c2", params.c2)] {
                    if !(value > 0.0) || !value.is_finite() {
                        return Err(format!("model.custom.params.{name}: must be > 0, got {value}"));
                    }
                }
                let j = matrix_from_rows(&custom.j, "j")?;
                if j.nrows() != 2 || j.ncols() != 2 {
                    return Err(format!(
                        "model.custom.j: expected a 2x2 matrix, got {}x{}",
                        j.nrows(),
                        j.ncols()
                    ));
                }
                let g = matrix_from_rows(&custom.g, "g")?;
                if g.nrows() != 2 {
                    return Err(format!("model.custom.g: expected 2 rows, got {}", g.nrows()));
                }
                if custom.tau.len() != g.ncols() {
                    return Err(format!(
                        "model.custom.tau: expected {} entries, got {}",
                        g.ncols(),
                        custom.tau.len()
                    ));
                }
                if custom.tau.iter().any(|v| !v.is_finite()) {
                    return Err("model.custom.tau: non-finite entry".to_string());
                }
                Ok(ResolvedModel::Custom {
                    j,
                    g,
                    tau: DVector::from_vec(custom.tau.clone()),
                    params,
                })
            }
        }
    }
}

impl ResolvedModel {
    pub fn label(&self) -> String {
        match self {
            ResolvedModel::Builtin { id, .. } => id.clone(),
            ResolvedModel::Custom { .. } => "custom".to_string(),
        }
    }

    pub fn params(&self) -> &TwoCompartmentParams {
        match self {
            ResolvedModel::Builtin { params, .. } | ResolvedModel::Custom { params, .. } => params,
        }
    }

    /// Raw structure entries of a custom model, for staged skewness checks.
    pub fn raw_structure(&self) -> Option<&DMatrix<f64>> {
        match self {
            ResolvedModel::Custom { j, .. } => Some(j),
            ResolvedModel::Builtin { .. } => None,
        }
    }

    pub fn state_box(&self) -> Vec<(f64, f64)> {
        self.params().state_box()
    }

    pub fn input_box(&self) -> Vec<(f64, f64)> {
        match self {
            ResolvedModel::Builtin { .. } => vec![models::INPUT_RANGE],
            ResolvedModel::Custom { g, .. } => vec![models::INPUT_RANGE; g.ncols()],
        }
    }

    pub fn fields(&self) -> (ScalarField, ScalarField) {
        (models::internal_energy(self.params()), models::total_entropy())
    }

    /// Assembles the system. For custom models this is where skew-symmetry
    /// of J is enforced; a failure there is an invariant violation, not a
    /// configuration error.
    pub fn build(&self) -> Result<IphsSystem, iphs::Error> {
        match self {
            ResolvedModel::Builtin { id, params } => Ok(models::builtin(id, params)?.system),
            ResolvedModel::Custom { j, g, tau, params } => {
                let structure = StructureMatrix::new(j.clone())?;
                let port_matrix = PortMatrix::new(g.clone())?;
                let port = IrreversiblePort::new(
                    port_matrix,
                    models::thermostat_gamma_port(params.lambda_e),
                    tau.clone(),
                )?;
                Ok(IphsSystem::irreversible(
                    models::internal_energy(params),
                    models::total_entropy(),
                    structure,
                    models::conduction_gamma(params.lambda),
                    port,
                )?
                .with_domain(models::admissibility(params)))
            }
        }
    }
}

impl InitialState {
    pub fn resolve(&self, params: &TwoCompartmentParams, dim: usize) -> Result<DVector<f64>, String> {
        match self {
            InitialState::Temperatures { temperatures } => {
                if temperatures.len() != dim {
                    return Err(format!(
                        "x0.temperatures: expected {dim} entries, got {}",
                        temperatures.len()
                    ));
                }
                params
                    .state_from_temperatures(&[temperatures[0], temperatures[1]])
                    .map_err(|e| format!("x0.temperatures: {e}"))
            }
            InitialState::State { state } => {
                if state.len() != dim {
                    return Err(format!("x0.state: expected {dim} entries, got {}", state.len()));
                }
                Ok(DVector::from_vec(state.clone()))
            }
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("config parse error: {e}"))
    }

    /// Span, step and tolerance sanity checks (exit-2 class problems).
    pub fn validate_span(&self) -> Result<(), String> {
        if !(self.h > 0.0) {
            return Err(format!("h: must be > 0, got {}", self.h));
        }
        if !(self.t1 > self.t0) {
            return Err(format!("t1: must exceed t0, got [{}, {}]", self.t0, self.t1));
        }
        if !(self.tol_balance > 0.0) {
            return Err(format!("tol_balance: must be > 0, got {}", self.tol_balance));
        }
        Ok(())
    }
}
