//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).

use std::time::Instant;

use nalgebra::{dvector, DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use iphs::models::{self, TwoCompartmentParams, INPUT_RANGE, MODEL_IDS};
use iphs::{
    check_gradient, derive_irreversible_port, extend_reversible, restrict_reversible, simulate,
    GammaFn, InputSignal, PortMatrix, SimOptions, StructureMatrix,
};

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn sample_in(rng: &mut ChaCha8Rng, bounds: &[(f64, f64)]) -> DVector<f64> {
    DVector::from_iterator(bounds.len(), bounds.iter().map(|(lo, hi)| rng.random_range(*lo..*hi)))
}

fn default_params() -> TwoCompartmentParams {
    TwoCompartmentParams::default()
}

#[test]
fn criterion_1_energy_losslessness() {
    let start = Instant::now();
    let p = default_params();
    let sys = models::two_compartment_irreversible(&p).unwrap();
    let state_box = p.state_box();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut max_violation = 0.0_f64;
    for _ in 0..1000 {
        let x = sample_in(&mut rng, &state_box);
        let u = sample_in(&mut rng, &[INPUT_RANGE]);
        let grad_h = sys.hamiltonian().grad(&x).unwrap();
        let xdot = sys.vector_field(&x, &u).unwrap();
        let y = sys.output(&x, &u).unwrap();
        let supplied = y.dot(&u);
        let residual = (grad_h.dot(&xdot) - supplied).abs();
        max_violation = max_violation.max(residual / (1.0 + supplied.abs()));
    }
    let elapsed = start.elapsed();
    let pass = max_violation <= 1e-10 && elapsed.as_secs_f64() < 1.0;
    report(
        "1 energy losslessness",
        pass,
        &format!("max |dH/dt - y'u| / (1 + |y'u|) = {max_violation:.3e}, {elapsed:.2?}"),
    );
    assert!(pass, "max normalized residual {max_violation:e}, elapsed {elapsed:?}");
}

#[test]
fn criterion_2_entropy_decomposition() {
    let p = default_params();
    let sys = models::two_compartment_irreversible(&p).unwrap();
    let state_box = p.state_box();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut max_violation = 0.0_f64;
    let mut min_sigma = f64::INFINITY;
    for _ in 0..1000 {
        let x = sample_in(&mut rng, &state_box);
        let u = sample_in(&mut rng, &[INPUT_RANGE]);
        let sample = sys.balance(&x, &u, 0.0).unwrap();
        max_violation =
            max_violation.max(sample.entropy_residual.abs() / (1.0 + sample.ds_dt.abs()));
        min_sigma = min_sigma.min(sample.sigma_int).min(sample.sigma_port);
    }
    let pass = max_violation <= 1e-10 && min_sigma >= 0.0;
    report(
        "2 entropy decomposition",
        pass,
        &format!("max normalized residual = {max_violation:.3e}, min sigma = {min_sigma:.3e}"),
    );
    assert!(pass, "residual {max_violation:e}, min sigma {min_sigma:e}");
}

#[test]
fn criterion_3_worked_example_pin() {
    // closed forms recomputed independently from the example's data
    let (t1, t2, u, lambda, lambda_e) = (300.0_f64, 350.0_f64, 400.0_f64, 1.0_f64, 0.5_f64);
    let sigma_int_expected = lambda * (t2 - t1).powi(2) / (t1 * t2);
    let sigma_port_expected = lambda_e * (u - t2).powi(2) / (u * t2);
    let y_expected = lambda_e * (u - t2) / u;
    let supply_expected = 25.0;
    let ds_dt_expected = y_expected + sigma_int_expected + sigma_port_expected;

    let p = default_params();
    let sys = models::two_compartment_irreversible(&p).unwrap();
    let x = p.state_from_temperatures(&[t1, t2]).unwrap();
    let input = dvector![u];
    let sample = sys.balance(&x, &input, 0.0).unwrap();
    let y = sys.output(&x, &input).unwrap();

    let rel = |got: f64, want: f64| (got - want).abs() / want.abs();
    let errors = [
        rel(sample.sigma_int, sigma_int_expected),
        rel(sample.sigma_port, sigma_port_expected),
        rel(y[0], y_expected),
        rel(sample.dh_dt, supply_expected),
        rel(sample.supply_rate, supply_expected),
        rel(sample.ds_dt, ds_dt_expected),
    ];
    let max_error = errors.iter().cloned().fold(0.0, f64::max);
    let pass = max_error <= 1e-12;
    report(
        "3 worked-example pin",
        pass,
        &format!("max relative error = {max_error:.3e} over 6 pinned values"),
    );
    assert!(pass, "errors {errors:?}");
}

#[test]
fn criterion_4_port_formulation_equivalence() {
    let p = default_params();
    let legacy = models::two_compartment_legacy(&p).unwrap();
    let irreversible = models::two_compartment_irreversible(&p).unwrap();
    let state_box = p.state_box();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut max_violation = 0.0_f64;
    for _ in 0..1000 {
        let x = sample_in(&mut rng, &state_box);
        let u = sample_in(&mut rng, &[INPUT_RANGE]);
        let f_legacy = legacy.vector_field(&x, &u).unwrap();
        let f_irrev = irreversible.vector_field(&x, &u).unwrap();
        let diff = (&f_legacy - &f_irrev).amax();
        max_violation = max_violation.max(diff / (1.0 + f_legacy.amax()));
    }
    let pass = max_violation <= 1e-12;
    report(
        "4 legacy/irreversible equivalence",
        pass,
        &format!("max normalized field difference = {max_violation:.3e}"),
    );
    assert!(pass, "max difference {max_violation:e}");
}

#[test]
fn criterion_5_drift_conservation() {
    let start = Instant::now();
    let p = default_params();
    let sys = models::two_compartment_drift(&p).unwrap();
    let x0 = p.state_from_temperatures(&[300.0, 350.0]).unwrap();
    let traj = simulate(
        &sys,
        &x0,
        &InputSignal::constant_scalar(300.0),
        0.0,
        10.0,
        1e-3,
        SimOptions::default(),
    )
    .unwrap();
    let h0 = sys.hamiltonian().eval(&x0).unwrap();
    let mut max_drift = 0.0_f64;
    let mut monotone = true;
    let mut last_entropy = f64::NEG_INFINITY;
    for state in &traj.states {
        let h = sys.hamiltonian().eval(state).unwrap();
        max_drift = max_drift.max(((h - h0) / h0).abs());
        let s = sys.entropy().eval(state).unwrap();
        monotone &= s >= last_entropy;
        last_entropy = s;
    }
    let elapsed = start.elapsed();
    let pass = max_drift <= 1e-10 && monotone && elapsed.as_secs_f64() < 5.0;
    report(
        "5 drift conservation",
        pass,
        &format!("max |dH|/H = {max_drift:.3e}, entropy monotone = {monotone}, {elapsed:.2?}"),
    );
    assert!(pass, "max energy drift {max_drift:e}, monotone {monotone}, elapsed {elapsed:?}");
}

#[test]
fn criterion_6_relaxation_to_thermostat() {
    let p = default_params();
    let sys = models::two_compartment_irreversible(&p).unwrap();
    let x0 = p.state_from_temperatures(&[300.0, 350.0]).unwrap();
    let input = InputSignal::constant_scalar(320.0);
    let run = simulate(&sys, &x0, &input, 0.0, 100.0, 1e-2, SimOptions::default()).unwrap();
    let reference = simulate(&sys, &x0, &input, 0.0, 100.0, 1e-3, SimOptions::default()).unwrap();
    let x_end = run.final_state().unwrap();
    let x_ref = reference.final_state().unwrap();
    let temps = sys.hamiltonian().grad(x_end).unwrap();
    let temp_error =
        ((temps[0] - 320.0).abs() / 320.0).max((temps[1] - 320.0).abs() / 320.0);
    let mut step_error = 0.0_f64;
    for i in 0..x_end.len() {
        step_error = step_error.max((x_end[i] - x_ref[i]).abs() / (1.0 + x_ref[i].abs()));
    }
    let pass = temp_error <= 1e-3 && step_error <= 1e-6;
    report(
        "6 relaxation to thermostat",
        pass,
        &format!("temperature offset = {temp_error:.3e}, h-refinement difference = {step_error:.3e}"),
    );
    assert!(pass, "temperature error {temp_error:e}, refinement error {step_error:e}");
}

#[test]
fn criterion_7_gradient_audit() {
    let p = default_params();
    let state_box = p.state_box();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut max_error = 0.0_f64;
    let mut pass = true;
    for id in MODEL_IDS {
        let model = models::builtin(id, &p).unwrap();
        for _ in 0..100 {
            let x = sample_in(&mut rng, &state_box);
            for field in [model.system.hamiltonian(), model.system.entropy()] {
                let check = check_gradient(field, &x, 1e-5, 1e-5).unwrap();
                max_error = max_error.max(check.max_rel_error);
                pass &= check.pass;
            }
        }
    }
    report(
        "7 gradient audit",
        pass,
        &format!("max relative error = {max_error:.3e} over {} models x 100 states", MODEL_IDS.len()),
    );
    assert!(pass, "max gradient error {max_error:e}");
}

#[test]
fn criterion_8_rk4_order() {
    let p = default_params();
    let sys = models::two_compartment_drift(&p).unwrap();
    let x0 = p.state_from_temperatures(&[300.0, 350.0]).unwrap();
    let input = InputSignal::constant_scalar(300.0);
    let run = |h: f64| {
        simulate(&sys, &x0, &input, 0.0, 2.0, h, SimOptions::default())
            .unwrap()
            .final_state()
            .unwrap()
            .clone()
    };
    let h = 0.05;
    let x_h = run(h);
    let x_half = run(h / 2.0);
    let x_ref = run(h / 16.0);
    let err_h = (&x_h - &x_ref).amax();
    let err_half = (&x_half - &x_ref).amax();
    let ratio = err_h / err_half;
    let pass = (12.0..=20.0).contains(&ratio);
    report(
        "8 RK4 order",
        pass,
        &format!("halving ratio = {ratio:.2} (errors {err_h:.3e} -> {err_half:.3e})"),
    );
    assert!(pass, "convergence ratio {ratio}");
}

#[test]
fn criterion_9_embedding_consistency() {
    let p = default_params();
    let state_box = p.state_box();
    let reference = models::two_compartment_irreversible(&p).unwrap();
    let hamiltonian = reference.hamiltonian().clone();
    let entropy = reference.entropy().clone();
    let j = StructureMatrix::symplectic_2d();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut max_restriction = 0.0_f64;
    let mut max_multiplier = 0.0_f64;
    for _ in 0..1000 {
        let x = sample_in(&mut rng, &state_box);
        let u = sample_in(&mut rng, &[INPUT_RANGE]);
        let g = PortMatrix::new(DMatrix::from_row_slice(
            2,
            1,
            &[rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
        ))
        .unwrap();

        // Extended reversible field vs restricted port-Hamiltonian system.
        let extension = extend_reversible(&j, &g, hamiltonian.clone(), u.clone()).unwrap();
        let restricted = restrict_reversible(&j, &g, hamiltonian.clone()).unwrap();
        let state = iphs::ExtendedState::new(x.clone(), DVector::zeros(1));
        let (dx_ext, dxi) = extension.field(&state).unwrap();
        let (dx_res, y) = restricted.evaluate(&x, &u).unwrap();
        let scale = 1.0 + dx_res.amax().max(y.amax());
        max_restriction = max_restriction
            .max((dx_ext - &dx_res).amax() / scale)
            .max((&dxi + &y).amax() / scale);

        // Derived irreversible port vs the scaled reversible port map.
        let lambda_e = p.lambda_e;
        let gamma_port = GammaFn::new("gamma_port", move |_x, grad_h: &DVector<f64>, uv: &DVector<f64>| {
            Ok(lambda_e / (grad_h[1] * uv[0]))
        });
        let derived = derive_irreversible_port(
            g.clone(),
            gamma_port,
            entropy.clone(),
            hamiltonian.clone(),
            dvector![1.0],
        )
        .unwrap();
        let (flow, y_irr) = derived.evaluate(&x, &u).unwrap();
        let k = derived.multiplier(&x, &u).unwrap();
        let grad_h = hamiltonian.grad(&x).unwrap();
        let flow_expected = g.apply(&u).unwrap() * k;
        let y_expected = g.apply_transpose(&grad_h).unwrap() * k;
        let scale = 1.0 + flow_expected.amax().max(y_expected.amax());
        max_multiplier = max_multiplier
            .max((&flow - &flow_expected).amax() / scale)
            .max((&y_irr - &y_expected).amax() / scale);
    }
    let pass = max_restriction <= 1e-12 && max_multiplier <= 1e-12;
    report(
        "9 embedding consistency",
        pass,
        &format!(
            "max restriction mismatch = {max_restriction:.3e}, max multiplier mismatch = {max_multiplier:.3e}"
        ),
    );
    assert!(pass, "restriction {max_restriction:e}, multiplier {max_multiplier:e}");
}
