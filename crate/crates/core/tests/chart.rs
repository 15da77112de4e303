use proptest::prelude::*;
use scrilab::chart::*;

proptest! {
    #[test]
    fn tortoise_inverts(r in 2.3f64..1e6, m in 0.0f64..1.0) {
        let rs = tortoise(r, m).unwrap();
        let back = invert_tortoise(rs, m).unwrap();
        prop_assert!((back - r).abs() <= 1e-10 * r);
    }

    #[test]
    fn compactification_round_trip(rho0 in 0.05f64..1.9, rho_i in 1e-8f64..0.2) {
        let m = 0.1;
        let p = CompactPoint::from_rho(rho0, rho_i, m).unwrap();
        prop_assert!((p.rho() * p.r - 1.0).abs() < 1e-12);
        let (t, rs) = p.decompactify();
        let q = compactify(t, rs, m).unwrap();
        prop_assert!((q.rho0 - rho0).abs() <= 1e-9 * rho0);
        prop_assert!((q.rho_i() - rho_i).abs() <= 1e-8 * rho_i);
    }
}

#[test]
fn points_outside_the_chart_are_rejected() {
    assert!(CompactPoint::from_rho(2.5, 0.1, 0.0).is_err());
    assert!(CompactPoint::from_rho(0.5, -0.1, 0.0).is_err());
    assert!(compactify(1.0, 0.5, 0.0).is_err());
}
