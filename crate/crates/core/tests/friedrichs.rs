use bmk_core::friedrichs::{
    boundary_mollify, build_interior_mollifier, choose_tau, mollify_on_grid, slab_integral, DiracSequence, HalfSpaceField, HalfSpaceGrid,
    NormalCutoff,
};
use bmk_core::{Error, C64};

fn strip(points: usize) -> HalfSpaceGrid {
    HalfSpaceGrid::uniform(vec![-1.0, -1.0], vec![0.0, 1.0], points).unwrap()
}

#[test]
fn dirac_sequence_mass_and_support() {
    for (eps, tau) in [(0.2, 0.2), (0.1, 0.01), (0.05, 0.003)] {
        let k = DiracSequence::new(2, eps, tau).unwrap();
        let mass: f64 = k.nodes().iter().map(|(_, w)| w).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        for (t, w) in k.nodes() {
            assert!(*w > 0.0);
            assert!(t[0] > tau && t[0] < 2.0 * tau);
            assert!(t[1].abs() < eps);
        }
        // the continuous kernel vanishes off its support
        assert_eq!(k.eval(&[0.5 * tau, 0.0]), 0.0);
        assert_eq!(k.eval(&[1.5 * tau, 1.5 * eps]), 0.0);
        assert!(k.eval(&[1.5 * tau, 0.0]) > 0.0);
    }
}

#[test]
fn tau_larger_than_eps_is_rejected() {
    assert!(DiracSequence::new(2, 0.1, 0.2).is_err());
}

#[test]
fn interior_mollifier_has_unit_mass() {
    for m in 1..=3 {
        let k = build_interior_mollifier(m, 0.1).unwrap();
        let mass: f64 = k.nodes().iter().map(|(_, w)| w).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        for (t, _) in k.nodes() {
            assert!(t[0] >= 0.0 && t[0] <= 0.1);
        }
    }
}

#[test]
fn mollifying_a_constant_is_exact_away_from_the_box_edges() {
    let g = strip(33);
    let f = HalfSpaceField::from_fn(g.clone(), |_| C64::new(2.0, -1.0));
    let m = boundary_mollify(&f, 0.1, 2.0).unwrap();
    for k in 0..g.len() {
        let x = g.point(k);
        if x[0] > -0.7 && x[1].abs() < 0.8 {
            assert!((m.values[k] - C64::new(2.0, -1.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn tau_for_a_singular_trace() {
    // |f|^p = |x_1|^{-1/4}: the slab mass is 2 tau^{3/4} J with
    // J = ∫_0^2 s^{-1/4} (1 - h(s)) ds, so tau is the largest dyadic
    // eps 2^{-k} with 2 J tau^{3/4} <= eps^2
    let h = NormalCutoff::new();
    let steps = 200_000;
    let mid: f64 = (0..steps)
        .map(|i| {
            let s = 1.0 + (i as f64 + 0.5) / steps as f64;
            s.powf(-0.25) * (1.0 - h.eval(s)) / steps as f64
        })
        .sum();
    let j = 4.0 / 3.0 + mid;
    for p in [1.0, 2.0] {
        let f = HalfSpaceField::from_fn(strip(65), move |x: &[f64]| C64::new(x[0].abs().powf(-1.0 / (4.0 * p)), 0.0));
        for eps in [0.2, 0.1, 0.05] {
            let slab = slab_integral(&f, 0.5 * eps, p);
            let oracle = 2.0 * j * (0.5f64 * eps).powf(0.75);
            assert!((slab - oracle).abs() < 1e-6 * oracle, "slab {slab} vs {oracle}");
            let mut expect = eps;
            while 2.0 * j * expect.powf(0.75) > eps * eps {
                expect *= 0.5;
            }
            assert_eq!(choose_tau(&f, eps, p).unwrap(), expect);
        }
    }
}

#[test]
fn tau_is_never_above_eps() {
    let f = HalfSpaceField::from_fn(strip(65), |x: &[f64]| C64::new(1.0 + x[1], 0.0));
    for eps in [0.4, 0.2, 0.1, 0.05] {
        let t = choose_tau(&f, eps, 1.0).unwrap();
        assert!(t <= eps && t > 0.0);
    }
    assert!(matches!(choose_tau(&f, -1.0, 1.0), Err(Error::TauUnsatisfiable(_))));
}

#[test]
fn mollification_is_an_lp_contraction() {
    let g = strip(65);
    let f = HalfSpaceField::from_fn(g.clone(), |x: &[f64]| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        if r2 < 0.49 {
            C64::new((1.0 - r2 / 0.49).powi(2), x[1])
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let k = DiracSequence::new(2, 0.1, 0.02).unwrap();
    let moll = mollify_on_grid(&f, &k);
    for p in [1.0, 2.0, 3.0] {
        let before = g.lp_norm(&f.samples(), p);
        let after = g.lp_norm(&moll, p);
        assert!(after <= before + 1e-6, "p={p}: {after} > {before}");
    }
}

#[test]
fn sampled_field_interpolates_linearly() {
    let g = strip(5);
    let samples: Vec<C64> = (0..g.len()).map(|k| {
        let x = g.point(k);
        C64::new(2.0 * x[0] - x[1], x[0] * 0.5)
    }).collect();
    let f = HalfSpaceField::from_samples(g, samples).unwrap();
    let v = f.eval(&[-0.33, 0.41]);
    assert!((v - C64::new(-0.66 - 0.41, -0.165)).norm() < 1e-12);
    assert_eq!(f.eval(&[0.1, 0.0]), C64::new(0.0, 0.0));
}
