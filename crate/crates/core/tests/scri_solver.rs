use proptest::prelude::*;
use scrilab::scri_solver::fit::log_samples;
use scrilab::scri_solver::runs::{exponent_matches, generic_transport_data, wave_decay_run, WaveRunSpec};
use scrilab::scri_solver::transport::{homogeneous_solution, ConstantCoefficients, SolveOptions};
use scrilab::scri_solver::*;
use scrilab::tensors::{a_blocks, expand_blocks, ModPair};

proptest! {
    #[test]
    fn fit_recovers_pure_powers(p in 0.0f64..2.0, c in 0.1f64..10.0) {
        let x = log_samples(1e-8, 1e-2, 40);
        let y: Vec<f64> = x.iter().map(|r| c * r.powf(p)).collect();
        let f = decay_fit(&x, &y, (1e-8, 1e-2)).unwrap();
        prop_assert!((f.exponent - p).abs() < 1e-9);
        prop_assert!((f.prefactor - c).abs() < 1e-6 * c);
    }
}

#[test]
fn fit_rejects_a_log_bend() {
    let x = log_samples(1e-12, 1e-2, 60);
    let y: Vec<f64> = x.iter().map(|r| r.powf(0.3) * (1.0 + 0.5 * r.ln().sin())).collect();
    let f = decay_fit(&x, &y, (1e-12, 1e-2)).unwrap();
    assert!(f.rejected || !f.usable());
}

fn deep_grid(n_b: usize, n_a: usize) -> CharGrid {
    CharGrid::with_columns(-1.0, n_a, ((1e-20f64).ln(), 0.5f64.ln()), n_b, 0.0, 0.2).unwrap()
}

#[test]
fn transport_matches_the_exact_homogeneous_family() {
    let pair = ModPair::new(0.5, -0.25).unwrap();
    let a = expand_blocks(&a_blocks(pair));
    let errs: Vec<f64> = [401usize, 801]
        .iter()
        .map(|&nb| {
            let g = deep_grid(nb, (2.0 / ((0.5f64 / 1e-20).ln() / (nb - 1) as f64)).round() as usize + 1);
            let data = generic_transport_data(&g, a);
            let sol = transport_solve(&g, &ConstantCoefficients::new(a), &data, SolveOptions::default()).unwrap();
            let exact = homogeneous_solution(a, g.b_max, |x| {
                let mut w = nalgebra::SVector::<f64, 10>::zeros();
                let mut dw = w;
                for k in 0..10 {
                    (w[k], dw[k]) = scrilab::scri_solver::runs::generic_profile(k, x);
                }
                (w, dw)
            });
            let mut worst = 0.0f64;
            for n in 0..g.n_b {
                for i in 0..g.n_a {
                    let (u, _) = exact(g.a(i), g.b(n));
                    worst = worst.max((sol.u_at(i, n) - u).abs().max());
                }
            }
            worst
        })
        .collect();
    assert!(errs[1] < 5e-3, "{errs:?}");
    assert!(errs[0] / errs[1] > 3.0, "{errs:?}");
}

#[test]
fn wave_exponent_on_a_small_grid() {
    let g = CharGrid::with_columns(-38.0, 512, ((1e-16f64).ln(), 0.5f64.ln()), 512, 0.0, 0.2).unwrap();
    let spec = WaveRunSpec {
        grid: g,
        mass: 0.1,
        damping: Damping::Constraint(0.5),
        bump: (-30.0, 1.0),
        fit_a: -30.0,
        window: (1e-4, 1e-2),
    };
    let (_, r) = wave_decay_run(&spec).unwrap();
    assert!(exponent_matches(0.5, r.fit.exponent, 0.05, 0.01), "{}", r.fit.exponent);
}

#[test]
fn grid_depth_is_enforced() {
    let shallow = CharGrid::with_columns(-1.0, 10, ((1e-4f64).ln(), 0.5f64.ln()), 100, 0.0, 0.2);
    assert!(shallow.is_err());
}

#[test]
fn weighted_norm_of_a_pure_power() {
    let g = CharGrid::with_columns(-2.0, 401, ((1e-18f64).ln(), 0.5f64.ln()), 401, 0.0, 0.2).unwrap();
    let f = norms::sample(&g, |rho0, rho_i| rho0 * rho_i.powf(0.4));
    let spec = NormSpec::b(0.5, 0.2, 0);
    let small = weighted_norm(&g, &f, spec).unwrap().value;
    let big = weighted_norm(&g, &f.iter().map(|x| 2.0 * x).collect::<Vec<_>>(), spec).unwrap().value;
    assert!((big / small - 2.0).abs() < 1e-12);
}

#[test]
fn energy_ratio_is_mesh_stable() {
    let src = |a: f64, b: f64| (-(a + 4.0).powi(2) - (b + 8.0).powi(2)).exp();
    let mult = Multiplier::new(0.0, -0.25, 1.0).unwrap();
    let ratios: Vec<f64> = [257usize, 513]
        .iter()
        .map(|&nb| {
            let g = CharGrid::with_columns(-6.0, (nb - 1) / 8 + 1, ((1e-16f64).ln(), 0.5f64.ln()), nb, 0.0, 0.2).unwrap();
            let p = WaveProblem { mass: 0.1, damping: Damping::None, source: Some(&src) };
            let sol = damped_wave_solve(&g, &p, &ScalarData::zero(&g)).unwrap();
            energy_diagnostic(&sol, &sol.source_grid(&src), &mult).unwrap().ratio
        })
        .collect();
    assert!(ratios[1] / ratios[0] < 1.1 && ratios[0] / ratios[1] < 1.1, "{ratios:?}");
}

#[test]
fn interpolation_on_modes_is_sharp() {
    use scrilab::scri_solver::spectral::{fourier_mode, interpolation_constant};
    let u = fourier_mode(32, 3, 0.1);
    let c = interpolation_constant(&u, 0, 2, 3, 2.0 * std::f64::consts::PI).unwrap();
    assert!((c - 1.0).abs() < 1e-9);
}
