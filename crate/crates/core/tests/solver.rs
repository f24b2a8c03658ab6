use boussinesq_core::random::{random_field, rng_for};
use boussinesq_core::*;

fn forced_model(n: usize) -> Model {
    let grid = GridSpec::new(n).unwrap();
    let params = PhysParams::new(0.1, 0.1, 0.75, 0.75, false).unwrap();
    let spec = ForcingSpec {
        modes: vec![
            ForcingMode { k: [1, 0], amplitude: 0.5, phase: Phase::Sin },
            ForcingMode { k: [0, 2], amplitude: 0.5, phase: Phase::Cos },
        ],
    };
    let forcing = make_forcing(grid, &spec, &params, 1.0).unwrap();
    Model::new(grid, params, &forcing, Dynamics::default()).unwrap()
}

fn random_state(grid: GridSpec, seed: u64) -> FlowState {
    let mut rng = rng_for(seed, 0);
    let th = random_field(grid, &mut rng, 2.0, grid.dealias_cut());
    let om = random_field(grid, &mut rng, 2.0, grid.dealias_cut());
    FlowState::new(th, om, 0.0).unwrap()
}

#[test]
fn pure_diffusion_is_exact() {
    let grid = GridSpec::new(32).unwrap();
    let params = PhysParams::new(0.3, 0.2, 0.75, 0.6, false).unwrap();
    let model =
        Model::new(grid, params, &Forcing::zero(grid, &params), Dynamics { advection: false, buoyancy: false }).unwrap();
    let stepper = Stepper::new(model, 0.01, Scheme::IfRk4).unwrap();
    let s0 = random_state(grid, 3);
    let s = (0..100).try_fold(s0.clone(), |s, _| stepper.step(&s)).unwrap();
    for (i, (a, b)) in s.theta.coeffs().iter().zip(s0.theta.coeffs()).enumerate().skip(1) {
        let (k1, k2) = grid.wavevector(i);
        let k = ((k1 * k1 + k2 * k2) as f64).sqrt();
        let exact = b * (-params.kappa * k.powf(2.0 * params.beta) * s.t).exp();
        assert!((a - exact).norm() <= 1e-10 * exact.norm().max(1e-300), "k = ({k1}, {k2})");
    }
}

#[test]
fn temperature_budget_converges_at_second_order() {
    let model = forced_model(32);
    let s0 = random_state(model.grid(), 5);
    let defect = |dt: f64| {
        let st = Stepper::new(model.clone(), dt, Scheme::IfRk4).unwrap();
        let (_, d) = energy_budget_defects(&st, &s0, st.steps_for(2.0)).unwrap();
        d.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    };
    let (a, b) = (defect(0.02), defect(0.01));
    assert!((a / b).log2() >= 1.8, "observed order {}", (a / b).log2());
}

#[test]
fn advection_conserves_temperature_variance() {
    let model = forced_model(32);
    let s = random_state(model.grid(), 9);
    let (adv_t, adv_w) = model.advection(&s.theta, &s.omega);
    assert!(adv_t.inner(&s.theta).abs() < 1e-12 * s.theta.sobolev_norm_sq(1.0));
    assert!(adv_w.inner(&s.omega).abs() < 1e-12 * s.omega.sobolev_norm_sq(1.0));
}

#[test]
fn checkpoint_resume_is_bitwise() {
    let model = forced_model(16);
    let params = *model.params();
    let stepper = Stepper::new(model, 0.01, Scheme::IfRk2).unwrap();
    let s = (0..10).try_fold(random_state(stepper.model().grid(), 1), |s, _| stepper.step(&s)).unwrap();
    let mut buf = Vec::new();
    write_checkpoint(&mut buf, &s, &params).unwrap();
    let (p2, s2) = read_checkpoint(&mut buf.as_slice()).unwrap();
    assert_eq!(p2, params);
    assert_eq!(stepper.step(&s).unwrap(), stepper.step(&s2).unwrap());
}
