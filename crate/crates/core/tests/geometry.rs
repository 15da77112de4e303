use scrilab::chart::CompactPoint;
use scrilab::gr_ops::geometry::{christoffel, curvature, fd_first_kind, fd_steps, ChristoffelMode, Geometry};
use scrilab::gr_ops::profile::TermProfile;

fn max_diff(a: &[[[f64; 4]; 4]; 4], b: &[[[f64; 4]; 4]; 4]) -> f64 {
    let mut m = 0.0f64;
    for k in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                m = m.max((a[k][i][j] - b[k][i][j]).abs());
            }
        }
    }
    m
}

#[test]
fn finite_difference_christoffel_is_second_order() {
    let h = TermProfile::conforming(0.05, 0.5, 0.2);
    let p = CompactPoint::new(0.7, 0.3, 0.1).unwrap();
    let exact = christoffel(&p, 0.1, Some(&h), ChristoffelMode::Analytic).unwrap().first;
    let err = |s: f64| max_diff(&fd_first_kind(&p, 0.1, Some(&h), fd_steps(&p, s)).unwrap(), &exact);
    let ratio = err(2e-2) / err(1e-2);
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    let rich = christoffel(&p, 0.1, Some(&h), ChristoffelMode::FiniteDifference).unwrap().first;
    assert!(max_diff(&rich, &exact) < err(5e-3));
}

#[test]
fn raising_and_lowering_are_inverse() {
    let h = TermProfile::conforming(0.05, 0.5, 0.2);
    let p = CompactPoint::new(0.9, 0.2, 0.2).unwrap();
    let c = christoffel(&p, 0.2, Some(&h), ChristoffelMode::Analytic).unwrap();
    let geo = Geometry::new(&p, 0.2, Some(&h)).unwrap();
    let scale = c.first.iter().flatten().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    for k in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                let lowered: f64 = (0..4).map(|l| geo.g[k][l] * c.second[l][a][b]).sum();
                assert!((lowered - c.first[k][a][b]).abs() < 1e-12 * scale);
            }
        }
    }
}

#[test]
fn schwarzschild_ricci_vanishes_on_a_sample_lattice() {
    let mut worst = 0.0f64;
    for i in 0..10 {
        for j in 0..10 {
            let rho0 = 0.1 + 0.15 * i as f64;
            let rho_i = 10f64.powf(-1.0 - 0.6 * j as f64);
            let p = CompactPoint::from_rho(rho0, rho_i, 0.25).unwrap();
            let c = curvature(&p, 0.25, None).unwrap();
            worst = c.ricci.iter().flatten().fold(worst, |m, x| m.max(x.abs()));
        }
    }
    assert!(worst < 1e-9, "{worst}");
}
