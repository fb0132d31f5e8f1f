use bmk_core::geometry::{make_domain, sphere_rule, unit_sphere_area, Domain, DomainSpec, Exclusion, Region};
use std::f64::consts::PI;

#[test]
fn disc_area_and_circumference() {
    let d = Domain::unit_ball(1);
    let area = d.quadrature(Region::Interior, 3, None).unwrap().total_weight();
    let circ = d.quadrature(Region::Boundary, 3, None).unwrap().total_weight();
    assert!((area - PI).abs() < 1e-10, "area {area}");
    assert!((circ - 2.0 * PI).abs() < 1e-12, "circumference {circ}");
}

#[test]
fn three_sphere_area() {
    let d = Domain::unit_ball(2);
    let s3 = d.quadrature(Region::Boundary, 3, None).unwrap().total_weight();
    assert!((s3 - 2.0 * PI * PI).abs() < 1e-10, "{s3}");
    let vol = d.quadrature(Region::Interior, 3, None).unwrap().total_weight();
    assert!((vol - PI * PI / 2.0).abs() < 1e-10, "{vol}");
}

#[test]
fn sphere_rules_integrate_quadratics() {
    // ∫_{S^{m-1}} x_1^2 dS = |S^{m-1}| / m
    for m in 2..=4 {
        let rule = sphere_rule(m, 3).unwrap();
        let v: f64 = rule.iter().map(|(x, w)| x[0] * x[0] * w).sum();
        assert!((v - unit_sphere_area(m) / m as f64).abs() < 1e-10, "m={m}");
    }
}

#[test]
fn box_boundary_and_volume() {
    let d = make_domain(&DomainSpec::IntervalBox {
        lo: vec![-1.0, 0.0, 0.0],
        hi: vec![1.0, 0.5, 2.0],
    })
    .unwrap();
    let vol = d.quadrature(Region::Interior, 0, None).unwrap().total_weight();
    let area = d.quadrature(Region::Boundary, 0, None).unwrap().total_weight();
    assert!((vol - 2.0).abs() < 1e-12);
    assert!((area - 2.0 * (1.0 + 4.0 + 1.0)).abs() < 1e-12);
}

#[test]
fn nested_refinement_converges() {
    // ∫_D exp(x) dV on the disc = 2π I_1(1)
    let i1 = 0.565_159_103_992_485_f64;
    let d = Domain::unit_ball(1);
    let errs: Vec<f64> = (0..4)
        .map(|l| {
            let v = d.quadrature(Region::Interior, l, None).unwrap().integrate_real(|x| x[0].exp());
            (v - 2.0 * PI * i1).abs()
        })
        .collect();
    assert!(errs[3] < 1e-12, "{errs:?}");
}

#[test]
fn exclusion_removes_nodes_near_center() {
    let d = Domain::unit_ball(2);
    let center = vec![0.1, -0.2, 0.0, 0.3];
    let rule = d
        .quadrature(
            Region::Interior,
            3,
            Some(Exclusion {
                center: center.clone(),
                radius: 0.05,
            }),
        )
        .unwrap();
    for x in &rule.nodes {
        let r: f64 = x.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        assert!(r >= 0.05 - 1e-14);
        assert!(d.contains(x));
    }
    // missing mass is the excluded ball
    let full = PI * PI / 2.0;
    let ball = PI * PI / 2.0 * 0.05f64.powi(4);
    assert!((rule.total_weight() - (full - ball)).abs() < 1e-10);
}

#[test]
fn defining_function_normalized_on_boundary() {
    let d = make_domain(&DomainSpec::Ellipsoid {
        center: vec![0.0, 0.0, 0.0],
        axes: vec![1.0, 2.0, 0.5],
    })
    .unwrap();
    let rule = d.quadrature(Region::Boundary, 1, None).unwrap();
    for x in rule.nodes.iter().step_by(17) {
        let g = d.grad_r(x);
        let n: f64 = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((n - 1.0).abs() < 1e-10);
        assert!(d.r(x).abs() < 1e-10);
    }
}

#[test]
fn boundary_frame_rejects_interior_points() {
    let d = Domain::unit_ball(1);
    assert!(d.boundary_frame(&[0.2, 0.1]).is_err());
    let f = d.boundary_frame(&[0.6, 0.8]).unwrap();
    assert!((f.nu[0] - 0.6).abs() < 1e-12 && (f.nu[1] - 0.8).abs() < 1e-12);
}

#[test]
fn degenerate_domains_rejected() {
    assert!(make_domain(&DomainSpec::Ball { center: vec![], radius: 1.0 }).is_err());
    assert!(make_domain(&DomainSpec::Ellipsoid { center: vec![0.0, 0.0], axes: vec![1.0, -1.0] }).is_err());
}
