use nalgebra::DMatrix;
use proptest::prelude::*;
use scrilab::chart::{metric, CompactPoint};
use scrilab::tensors::*;

fn tensor() -> impl Strategy<Value = SplitSymTensor> {
    prop::array::uniform10(-2.0f64..2.0).prop_map(SplitSymTensor::new)
}

fn pair() -> impl Strategy<Value = ModPair> {
    (0.01f64..0.99, 0.01f64..0.99).prop_map(|(c, s)| ModPair::new(c, -c * s).unwrap())
}

proptest! {
    #[test]
    fn projections_are_idempotent_and_partition(u in tensor()) {
        for p in [Projection::C, Projection::Upsilon, Projection::CUpsilon, Projection::Slashed0, Projection::OneOne] {
            prop_assert_eq!(project(p, &project(p, &u)), project(p, &u));
        }
        let mut sum = [0.0; NAMP];
        for p in [Projection::CUpsilon, Projection::Slashed0, Projection::OneOne] {
            for (s, x) in sum.iter_mut().zip(project(p, &u).amp) {
                *s += x;
            }
        }
        prop_assert_eq!(sum, u.amp);
    }

    #[test]
    fn frame_round_trip(u in tensor()) {
        let back = SplitSymTensor::from_frame(&u.to_frame());
        for k in 0..NAMP {
            prop_assert!((back.amp[k] - u.amp[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn trace_reversal_is_an_involution(u in tensor(), rho0 in 0.2f64..1.5, x_i in 0.05f64..0.5) {
        let p = CompactPoint::new(rho0, x_i, 0.1).unwrap();
        for g in [minkowski_frame_metric(), metric(&p, 0.1, None).unwrap()] {
            let twice = trace_reversal(&g, &trace_reversal(&g, &u).unwrap()).unwrap();
            for k in 0..NAMP {
                prop_assert!((twice.amp[k] - u.amp[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn duality_on_random_pairs(p in pair()) {
        prop_assert!(duality_check(p) < 1e-12);
    }

    #[test]
    fn block_spectra_match_closed_form(p in pair()) {
        let s = block_spectra(p);
        let mut c = s.c_block.clone();
        c.sort_by(f64::total_cmp);
        let (gc, gu) = (p.gamma_c, p.gamma_u);
        let want = [gc, gc, 2.0 * gc];
        for (x, y) in c.iter().zip(want) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        let mut rest = s.complement.clone();
        rest.sort_by(f64::total_cmp);
        let want = [0.0, -gu, -gu, -2.0 * gu];
        for (x, y) in rest.iter().zip(want) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn commutator_expansion(seed in 0u64..1000, n in 1usize..=4) {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let mut mat = || DMatrix::from_fn(4, 4, |_, _| next());
        let l = mat();
        let xs: Vec<_> = (0..n).map(|_| mat()).collect();
        let (lhs, rhs) = comm_expand(&l, &xs).unwrap();
        prop_assert!((lhs - rhs).abs().max() < 1e-12);
    }
}

#[test]
fn minkowski_a_rows() {
    let a = a_blocks(ModPair::new(0.5, -0.25).unwrap());
    let rows: [[f64; 7]; 7] = [
        [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.25, 0.25, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.5, 0.0, 0.5, 0.0, 0.5, 0.0],
        [0.0, 0.0, 0.75, 0.0, 0.25, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0],
        [0.0; 7],
    ];
    for i in 0..7 {
        for k in 0..7 {
            assert_eq!(a[(i, k)], rows[i][k], "entry ({i}, {k})");
        }
    }
}

#[test]
fn comm_expand_rejects_bad_shapes() {
    let l = DMatrix::<f64>::identity(3, 3);
    assert!(comm_expand(&l, &[]).is_err());
    assert!(comm_expand(&l, &[DMatrix::identity(2, 2)]).is_err());
}

#[test]
fn inadmissible_pairs_are_rejected() {
    for (c, u) in [(0.0, -0.1), (1.0, -0.1), (0.5, 0.0), (0.3, -0.3), (0.3, -0.5)] {
        assert!(ModPair::new(c, u).is_err(), "({c}, {u})");
    }
}
