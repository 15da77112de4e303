use scrilab::bondi::*;
use scrilab::scri_solver::fit::DecayFit;
use scrilab::scri_solver::transport::{homogeneous_solution, transport_solve, ConstantCoefficients, SolveOptions, TransportData, TransportSolution};
use scrilab::scri_solver::CharGrid;
use scrilab::tensors::{a_blocks, expand_blocks, Amp, ModPair, NAMP};

fn grid() -> CharGrid {
    CharGrid::with_columns(-3.0, 61, ((1e-32f64).ln(), 0.5f64.ln()), 1101, 0.0, 0.1).unwrap()
}

fn pair() -> ModPair {
    ModPair::new(0.5, -0.25).unwrap()
}

#[test]
fn zero_data_give_the_zero_fixed_point_at_once() {
    let g = grid();
    let spec = PicardSpec { grid: g.clone(), pair: pair(), data: TransportData::zero(&g), iterations: 5, quadratic: true, tol: 1e-13 };
    let r = picard_iterate(&spec, SolveOptions::default()).unwrap();
    assert_eq!(r.solution.sup_norm(), 0.0);
    assert_eq!(r.update_norms, vec![0.0]);
}

#[test]
fn linear_problem_is_the_transport_solve() {
    let g = grid();
    let data = bondi_data(&g, pair(), 0.1, gaussian(-1.0, 0.3));
    let spec = PicardSpec { grid: g.clone(), pair: pair(), data: data.clone(), iterations: 5, quadratic: false, tol: 1e-13 };
    let r = picard_iterate(&spec, SolveOptions::default()).unwrap();
    let a = expand_blocks(&a_blocks(pair()));
    let direct = transport_solve(&g, &ConstantCoefficients::new(a), &data, SolveOptions::default()).unwrap();
    let diff = r.solution.u.iter().zip(&direct.u).map(|(x, y)| (x - y).abs().max()).fold(0.0, f64::max);
    assert!(diff < 1e-12);
}

#[test]
fn small_data_contract() {
    let g = grid();
    let data = bondi_data(&g, pair(), 0.05, gaussian(-1.0, 0.3));
    let spec = PicardSpec { grid: g, pair: pair(), data, iterations: 12, quadratic: true, tol: 1e-13 };
    let r = picard_iterate(&spec, SolveOptions::default()).unwrap();
    assert!(r.contraction.unwrap() < 0.05, "{:?}", r.update_norms);
    assert!(r.fixed_point_residual < 1e-4);
}

#[test]
fn picard_rejects_too_many_iterations() {
    let g = grid();
    let spec = PicardSpec { grid: g.clone(), pair: pair(), data: TransportData::zero(&g), iterations: 21, quadratic: true, tol: 0.0 };
    assert!(picard_iterate(&spec, SolveOptions::default()).is_err());
}

/// A solution history built from closed-form columns.
fn synthetic(g: &CharGrid, field: impl Fn(f64, f64) -> Amp) -> TransportSolution<NAMP> {
    let mut u = Vec::with_capacity(g.nodes());
    for n in 0..g.n_b {
        for i in 0..g.n_a {
            u.push(field(g.rho0(i), g.rho_i(n)));
        }
    }
    TransportSolution { grid: g.clone(), v: vec![Amp::zeros(); u.len()], u }
}

#[test]
fn extraction_is_exact_on_a_single_power() {
    let g = grid();
    let ell_i = 0.1;
    let (c0, c1) = (0.7, -0.4);
    let sol = synthetic(&g, |_, ri| {
        let mut a = Amp::zeros();
        a[4] = c0 + c1 * ri.powf(2.0 * ell_i);
        a[8] = 0.3 + 0.2 * ri.powf(0.5);
        for k in [0, 1, 2, 3, 5, 6, 7] {
            a[k] = ri.powf(0.6);
        }
        a
    });
    let w = RemainderWindows { h11: (1e-24, 1e-12), slashed: (1e-24, 1e-12), cu: (1e-24, 1e-12) };
    let lim = extract_leading(&sol, -1.0, w).unwrap();
    assert!(lim.h11_leading.iter().all(|h| (h - c0).abs() < 1e-6));
    assert!(lim.slashed_leading.iter().all(|s| (s[0] - 0.3).abs() < 1e-6 && s[1] == 0.0));
    assert!((lim.h11_remainder.exponent - 2.0 * ell_i).abs() < 0.02);
    assert!((lim.slashed_remainder.exponent - 0.5).abs() < 0.02);
    assert!((lim.cu_remainder.exponent - 0.6).abs() < 0.02);
    assert!(lim.cu_limit < 1e-4);
    assert!(lim.non_convergent.is_empty());
}

#[test]
fn slashed_leading_of_an_eigenvalue_zero_solution_converges() {
    let a = expand_blocks(&a_blocks(pair()));
    let news = gaussian(-1.0, 0.3);
    let exact = homogeneous_solution(a, 0.5f64.ln(), |x| {
        let mut w = Amp::zeros();
        let mut dw = Amp::zeros();
        (w[8], dw[8]) = news(x);
        (w, dw)
    });
    let errs: Vec<f64> = [(61usize, 1101usize), (121, 2201)]
        .iter()
        .map(|&(n_a, n_b)| {
            let g = CharGrid::with_columns(-3.0, n_a, ((1e-32f64).ln(), 0.5f64.ln()), n_b, 0.0, 0.1).unwrap();
            let data = TransportData::from_fn(&g, &exact);
            let sol = transport_solve(&g, &ConstantCoefficients::new(a), &data, SolveOptions::default()).unwrap();
            let lim = extract_leading(&sol, -1.0, RemainderWindows::default()).unwrap();
            // the exact member is constant along the transport direction
            (0..g.n_a).map(|i| (lim.slashed_leading[i][0] - news(g.a(i)).0).abs()).fold(0.0, f64::max)
        })
        .collect();
    assert!(errs[1] < 3e-3, "{errs:?}");
    assert!(errs[0] / errs[1] > 3.0, "{errs:?}");
}

fn dummy_fit() -> DecayFit {
    let x: Vec<f64> = (0..20).map(|k| 10f64.powi(-k)).collect();
    scrilab::scri_solver::decay_fit(&x, &x, (1e-20, 1.0)).unwrap()
}

#[test]
fn constant_news_keeps_the_mass() {
    let g = grid();
    let n = g.n_a;
    let limits = ScriLimits {
        rho0: (0..n).map(|i| g.rho0(i)).collect(),
        h11_leading: vec![0.2; n],
        slashed_leading: vec![[0.4, -0.1]; n],
        cu_limit: 0.0,
        h11_remainder: dummy_fit(),
        slashed_remainder: dummy_fit(),
        cu_remainder: dummy_fit(),
        non_convergent: vec![],
    };
    let recs = bondi_mass(&limits, &g, 0.3, -0.25).unwrap();
    let spread = recs.iter().map(|r| (r.mass - recs[0].mass).abs()).fold(0.0, f64::max);
    assert!(spread < 1e-8);
    assert!(recs.iter().all(|r| r.news_flux < 1e-24));
}

#[test]
fn mass_loss_balances_the_news_flux() {
    let g = grid();
    let spec = BondiRunSpec {
        grid: g,
        pair: pair(),
        mass: 0.0,
        amplitude: 0.1,
        news: (-1.0, 0.3),
        iterations: 12,
        tol: 1e-13,
        fit_a: -1.0,
        windows: RemainderWindows::default(),
    };
    let r = bondi_run(&spec, SolveOptions::default()).unwrap();
    assert!(mass_nonincreasing(&r.records, 1e-10 * r.mass_change.abs()));
    assert!(((r.mass_change + r.radiated) / r.mass_change).abs() < 0.1);
}
