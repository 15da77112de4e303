use proptest::prelude::*;
use scrilab::maxwell::*;
use scrilab::scri_solver::transport::SolveOptions;
use scrilab::scri_solver::CharGrid;
use scrilab::tensors::ModPair;

proptest! {
    #[test]
    fn duality_holds_for_admissible_pairs(c in 0.01f64..0.99, s in 0.01f64..0.99) {
        prop_assert!(maxwell_duality_residual(ModPair::new(c, -c * s).unwrap()) < 1e-14);
    }
}

fn grid() -> CharGrid {
    CharGrid::with_columns(-1.0, 21, ((1e-24f64).ln(), 0.5f64.ln()), 601, 0.0, 0.2).unwrap()
}

#[test]
fn blockwise_exponents() {
    let pair = ModPair::new(0.6, -0.3).unwrap();
    let (_, r) = maxwell_evolve(&grid(), pair, MaxwellData::Generic, 0.0, (1e-20, 1e-16), SolveOptions::default()).unwrap();
    for (b, want) in r.blocks.iter().zip([0.6, 0.3, 0.0]) {
        assert!((b.fit.exponent - want).abs() < 0.05, "{} {}", b.block, b.fit.exponent);
    }
}

#[test]
fn gauge_condition_propagates() {
    let pair = ModPair::new(0.5, -0.25).unwrap();
    let (sol, r) = maxwell_evolve(&grid(), pair, MaxwellData::GaugeSatisfying, 0.0, (1e-20, 1e-16), SolveOptions::default()).unwrap();
    assert!(r.gauge_relative <= 1e-6, "{}", r.gauge_relative);
    assert!(sol.sup_norm() > 0.1);
}

#[test]
fn zero_data_stay_zero() {
    let pair = ModPair::new(0.5, -0.25).unwrap();
    let (sol, r) = maxwell_evolve(&grid(), pair, MaxwellData::Zero, 0.0, (1e-20, 1e-16), SolveOptions::default()).unwrap();
    assert_eq!(sol.sup_norm(), 0.0);
    assert_eq!(r.gauge_relative, 0.0);
}
