use stcmc_core::background::make_schwarzschild;
use stcmc_core::base::BaseGrid;
use stcmc_core::flow::{self, FlowState, Prescription};
use stcmc_core::foliation::{sweep, FoliationOptions, Termination};
use stcmc_core::validate::speed_evolution_rhs;

/// On a symmetric surface the flow is the ODE `ω̇ = f(ω)`, so `ḟ = f'(ω) ω̇`.
#[test]
fn symmetric_speed_matches_ode_linearization() {
    let m = make_schwarzschild(1.0, 2.0).unwrap();
    let g = BaseGrid::symmetric(2).unwrap();
    let presc = Prescription::stcmc(0.02).unwrap();
    let f_at = |s: f64| FlowState::new(&m, &g, &presc, &[s]).unwrap().speed[0];
    for s0 in [0.4, 0.7, 1.0] {
        let st = FlowState::new(&m, &g, &presc, &[s0]).unwrap();
        let h = 1e-5;
        let df = (f_at(s0 + h) - f_at(s0 - h)) / (2.0 * h);
        let oracle = df * st.speed[0];
        let rhs = speed_evolution_rhs(&st, &presc)[0];
        assert!((rhs - oracle).abs() < 1e-6, "s0 = {s0}: {rhs} vs {oracle}");

        let next = flow::step(&st, &m, &presc, 1e-6).unwrap();
        let fd = (next.speed[0] - st.speed[0]) / (next.t - st.t);
        assert!((fd - oracle).abs() < 1e-6, "s0 = {s0}: {fd} vs {oracle}");
    }
}

#[test]
fn sigma_scales_with_inverse_mass_squared() {
    for mass in [0.5, 2.0] {
        let m = make_schwarzschild(mass, 2.0 * mass).unwrap();
        let g = BaseGrid::axisymmetric(2, 64).unwrap();
        let sigma = 1.0 / (27.0 * mass * mass);
        let r = sweep(&m, &g, &vec![0.0; g.len()], 2.0 * sigma, sigma / 20.0, &FoliationOptions::default()).unwrap();
        assert_eq!(r.termination, Termination::InstabilityDetected, "M = {mass}");
        let rel = (r.sigma_estimate - sigma).abs() / sigma;
        assert!(rel < 0.02, "M = {mass}: sigma {} vs {sigma}", r.sigma_estimate);
        let radius = m.area_radius(r.leaves.last().unwrap().omega()[0]);
        assert!((radius / (3.0 * mass) - 1.0).abs() < 0.01, "M = {mass}: r = {radius}");
    }
}
