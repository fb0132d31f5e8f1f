//! Acceptance suite: one pass/fail line per criterion.

use bmk_core::bmk::{kernel_eval, max_residual_per_level, op_boundary, op_volume, reproduce_residual, SingularQuadratureConfig};
use bmk_core::exterior::{eps_sign, MultiIndex};
use bmk_core::friedrichs::{convergence_report, HalfSpaceField, HalfSpaceGrid};
use bmk_core::geometry::{make_domain, Domain, DomainSpec, Region};
use bmk_core::qops::{equivalence_check, green_stokes_residual, FirstOrderOperator, TestFamily};
use bmk_core::young::{admissible_exponents, log_bound_fit, log_majorant_integral, Case, Exponent, KernelExponents, KernelSpec};
use bmk_core::{expr::parse_field, DifferentialForm, Field, FormValue, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

type Outcome = Result<(bool, String)>;

fn field(text: &str, nvars: usize) -> Field {
    parse_field(text, nvars).expect("valid expression")
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ")
}

fn disc_points() -> Vec<Vec<f64>> {
    let mut pts = Vec::new();
    for r in [0.0, 0.25, 0.5] {
        for k in 0..8 {
            let t = k as f64 * PI / 4.0 + 0.1;
            pts.push(vec![r * t.cos(), r * t.sin()]);
            if r == 0.0 {
                break;
            }
        }
    }
    pts
}

fn c1_cauchy_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let zeta: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let z: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let k = kernel_eval(1, 0, &zeta, &z)?;
        let coef = k.components[0].1.coefficient(MultiIndex::single(1), MultiIndex::empty());
        let d = C64::new(zeta[0] - z[0], zeta[1] - z[1]);
        let oracle = 1.0 / (C64::new(0.0, 2.0 * PI) * d);
        worst = worst.max((coef - oracle).norm() / oracle.norm());
    }
    Ok((worst < 1e-12, format!("max relative error {worst:.2e} over 100 pairs")))
}

fn c2_cauchy_formula() -> Outcome {
    let disc = Domain::unit_ball(1);
    let rule = disc.quadrature(Region::Boundary, 8, None)?;
    let mut worst: f64 = 0.0;
    for k in 0..4u32 {
        let fb = DifferentialForm::function(1, field(&format!("z1^{k}"), 2))?;
        for z in disc_points() {
            let v = op_boundary(&fb, &z, &disc, 8)?.coefficient(MultiIndex::empty(), MultiIndex::empty());
            worst = worst.max((v - C64::new(z[0], z[1]).powu(k)).norm());
        }
    }
    Ok((
        worst < 1e-8 && rule.len() == 2048,
        format!("{} nodes, max |z^k - B(z^k)| = {worst:.2e}", rule.len()),
    ))
}

fn c3_cauchy_pompeiu() -> Outcome {
    let disc = Domain::unit_ball(1);
    let f = DifferentialForm::function(1, field("zb1", 2))?;
    let df = f.dbar()?;
    let config = SingularQuadratureConfig {
        base_level: 0,
        exclusion_factor: 2.0,
        refinement_steps: 3,
    };
    let rows = reproduce_residual(&f, &f, &df, &disc, &disc_points(), 0.25, &config)?;
    let per_level = max_residual_per_level(&rows);
    let deltas: Vec<f64> = per_level.windows(2).map(|w| (w[1].1 - w[0].1).abs()).collect();
    let monotone = deltas.windows(2).all(|w| w[1] <= w[0]);
    let finest = per_level.last().map(|x| x.1).unwrap_or(f64::NAN);
    let spot = op_volume(&DifferentialForm::monomial(1, &[], &[1], Field::constant(2, C64::new(1.0, 0.0)))?, &[0.5, 0.0], &disc, &config)?
        .finest
        .coefficient(MultiIndex::empty(), MultiIndex::empty());
    let spot_ok = (spot - C64::new(-0.5, 0.0)).norm() < 1e-3;
    Ok((
        finest < 1e-3 && deltas.len() >= 3 && monotone && spot_ok,
        format!("finest residual {finest:.2e}, deltas [{}], B(dzb)(0.5) = {:.6}", sci(&deltas), spot.re),
    ))
}

fn c4_bmk_c2() -> Outcome {
    let ball = Domain::unit_ball(2);
    let config = SingularQuadratureConfig::default();
    let points = vec![vec![0.1, 0.0, 0.0, 0.2], vec![0.3, 0.1, -0.2, 0.2]];
    let sqrt = "(1 + sqrt(1 - z1*zb1 - z2*zb2))";
    // (label, q, f coefficient, boundary coefficient, smooth)
    let cases = [
        ("smooth q=0", 0usize, "z1*zb2 + zb1*z1".to_string(), None),
        ("L^p q=0", 0, format!("zb2*{sqrt}"), Some("zb2")),
        ("smooth q=1", 1, "z1*zb2 + zb2*z2".to_string(), None),
        ("L^p q=1", 1, format!("zb2*{sqrt}"), Some("zb2")),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (label, q, coef, boundary) in cases {
        let dzb: &[usize] = if q == 0 { &[] } else { &[1] };
        let f = DifferentialForm::monomial(2, &[], dzb, field(&coef, 4))?;
        let fb = match boundary {
            None => f.clone(),
            // the sqrt factor vanishes on the sphere
            Some(b) => DifferentialForm::monomial(2, &[], dzb, field(b, 4))?,
        };
        let rows = reproduce_residual(&f, &fb, &f.dbar()?, &ball, &points, 0.25, &config)?;
        let per_level: Vec<f64> = max_residual_per_level(&rows).iter().map(|x| x.1).collect();
        let decreasing = per_level.len() >= 3 && per_level.windows(2).all(|w| w[1] < w[0]);
        let last = *per_level.last().unwrap_or(&f64::NAN);
        ok &= decreasing && last < 1e-2;
        detail.push(format!("{label}: [{}]", sci(&per_level)));
    }
    Ok((ok, detail.join("; ")))
}

fn c5_friedrichs() -> Outcome {
    let grid = HalfSpaceGrid::uniform(vec![-1.0, -1.0], vec![0.0, 1.0], 256)?;
    let fe = field("1 + x1 + x2^2", 2).mul(&Field::bump(vec![0.0, 0.0], 0.8));
    let q = FirstOrderOperator::parse(&["1 + x2/2", "0.5"], "0")?;
    let qf = q.apply(&fe)?;
    let f = HalfSpaceField::from_field(grid.clone(), fe.clone());
    let qfh = HalfSpaceField::from_field(grid, qf);
    let mut ok = true;
    let mut detail = Vec::new();
    for p in [1.0, 2.0] {
        let fb = fe.clone();
        let rows = convergence_report(&q, &f, &qfh, &move |x| fb.eval(x), &[0.2, 0.1, 0.05, 0.025], p)?;
        let cols = |k: usize| rows.iter().map(|r| r.values()[k]).collect::<Vec<f64>>();
        let mut nonincreasing = true;
        for k in 2..6 {
            nonincreasing &= cols(k)[1..].windows(2).all(|w| w[1] <= w[0]);
        }
        let comm_bound = cols(4).iter().cloned().fold(0.0, f64::max);
        let trace = rows.last().map(|r| r.trace_err).unwrap_or(f64::NAN);
        ok &= nonincreasing && trace < 1e-2 && comm_bound < 1.0;
        detail.push(format!("p={p}: trace {trace:.2e}, commutator <= {comm_bound:.2e}"));
    }
    Ok((ok, detail.join("; ")))
}

fn c6_green_stokes() -> Outcome {
    let disc = Domain::unit_ball(1);
    let q = FirstOrderOperator::parse(&["1 + x2", "i*x1"], "0.5")?;
    let mut compact: f64 = 0.0;
    for (k, c) in [[0.2, -0.1], [-0.3, 0.25], [0.0, 0.0]].iter().enumerate() {
        let u = field(&format!("1 + x1^{k} - i*x2"), 2).mul(&Field::bump(c.to_vec(), 0.5));
        let v = field("x1*x2 + 2 - i*x1^2", 2);
        compact = compact.max(green_stokes_residual(&q, &u, &v, &disc, 7)?.residual);
    }
    let interval = make_domain(&DomainSpec::IntervalBox { lo: vec![-1.0], hi: vec![0.0] })?;
    let q1 = FirstOrderOperator::parse(&["1 + x1^2"], "i")?;
    let gi = green_stokes_residual(&q1, &field("x1^3 - 2*x1", 1), &field("1 + i*x1", 1), &interval, 2)?;
    let bx = make_domain(&DomainSpec::IntervalBox { lo: vec![-1.0, 0.0], hi: vec![0.5, 1.0] })?;
    let gb = green_stokes_residual(&q, &field("x1^2*x2 + i", 2), &field("x2 - x1", 2), &bx, 2)?;
    let hand = green_stokes_residual(&FirstOrderOperator::parse(&["1"], "0")?, &field("x1", 1), &field("1", 1), &interval, 0)?;
    let hand_ok = (hand.qu_v - 1.0).norm() < 1e-10 && (hand.u_qstar_v + hand.boundary_term - 1.0).norm() < 1e-10;
    Ok((
        compact < 1e-12 && gi.residual < 1e-8 && gb.residual < 1e-8 && hand_ok,
        format!(
            "compact {compact:.1e}, interval {:.1e}, box {:.1e}, hand (Qu,v) = {:.12}",
            gi.residual, gb.residual, hand.qu_v.re
        ),
    ))
}

fn c7_weak_bv_equivalence() -> Outcome {
    let disc = Domain::unit_ball(1);
    let family = TestFamily::for_domain(&disc, 30)?;
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for text in ["1", "z1", "z1^2", "z1^3", "zb1"] {
        let f = DifferentialForm::function(1, field(text, 2))?;
        let rep = equivalence_check(&f, &f.dbar()?, &f, &disc, &family, 5)?;
        worst = worst.max(rep.max_difference);
        detail.push(format!("{text}: {:.1e}", rep.max_difference));
    }
    Ok((worst < 1e-8, format!("max pipeline difference {worst:.1e} ({})", detail.join(", "))))
}

fn c8_young() -> Outcome {
    let disc = Domain::unit_ball(1);
    let exps = KernelExponents::new(1.0, 1.5, Exponent::Finite(4.0), Exponent::Infinite)?;
    let spec = KernelSpec {
        x: (disc.clone(), Region::Boundary),
        y: (disc.clone(), Region::Interior),
        kernel: Arc::new(|x: &[f64], y: &[f64]| 1.0 / (2.0 * PI * ((x[0] - y[0]).hypot(x[1] - y[1])))),
        exponents: exps,
        x_level_offset: 3,
    };
    let mut r_eq_p = true;
    for p in [1.0, 1.25, 1.5, 2.0] {
        let pairs = admissible_exponents(&spec, Exponent::Finite(p));
        let iii: Vec<_> = pairs.iter().filter(|e| e.case == Case::III).collect();
        r_eq_p &= iii.len() == 1 && (iii[0].r.value() - p).abs() <= 1e-12 * p;
    }
    let coarse = log_bound_fit(&disc, 1.0, 8)?;
    let fine = log_bound_fit(&disc, 1.0, 9)?;
    let c1_change = (fine.c1 - coarse.c1).abs() / coarse.c1;
    let mut integrals = Vec::new();
    let mut finite = true;
    for a in [1.0, 2.0, 4.0] {
        let lo = log_majorant_integral(&disc, fine.c0, fine.c1, a, 5)?;
        let hi = log_majorant_integral(&disc, fine.c0, fine.c1, a, 6)?;
        finite &= hi.is_finite() && (hi - lo).abs() < 0.01 * hi;
        integrals.push(hi);
    }
    Ok((
        r_eq_p && c1_change < 0.1 && fine.fit_residual <= 0.0 && coarse.fit_residual <= 0.0 && finite,
        format!(
            "case III r=p: {r_eq_p}, C1 {:.4} -> {:.4}, fit residual {:.1e}, integrals [{}]",
            coarse.c1,
            fine.c1,
            fine.fit_residual,
            sci(&integrals)
        ),
    ))
}

fn c9_structure() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    // eps_sign: exhaustive over all ordered lists of length <= 4 with entries in 1..=4
    let mut lists: Vec<Vec<usize>> = vec![vec![]];
    let mut frontier = lists.clone();
    for _ in 0..4 {
        frontier = frontier
            .iter()
            .flat_map(|l| (1..=4).map(move |k| [l.clone(), vec![k]].concat()))
            .collect();
        lists.extend(frontier.iter().cloned());
    }
    let mut eps_ok = true;
    for l in &lists {
        let mut sorted = l.clone();
        sorted.sort();
        let repeated = sorted.windows(2).any(|w| w[0] == w[1]);
        sorted.dedup();
        let s = eps_sign(&sorted, l);
        if repeated {
            eps_ok &= s == 0;
        } else {
            // parity by counting inversions
            let inv = (0..l.len()).flat_map(|i| (i + 1..l.len()).map(move |j| (i, j))).filter(|&(i, j)| l[i] > l[j]).count();
            eps_ok &= s == if inv % 2 == 0 { 1 } else { -1 };
            for i in 0..l.len() {
                for j in i + 1..l.len() {
                    let mut sw = l.clone();
                    sw.swap(i, j);
                    eps_ok &= eps_sign(&sorted, &sw) == -s;
                }
            }
        }
    }
    ok &= eps_ok;
    notes.push(format!("eps_sign {} lists", lists.len()));

    // pairing identity on 200 random forms
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=3usize);
        let p = rng.gen_range(0..=n);
        let q = rng.gen_range(0..=n);
        let mut rand_form = || {
            let mut v = FormValue::zero(n);
            for i in MultiIndex::all(n, p) {
                for j in MultiIndex::all(n, q) {
                    v.add_term((i, j), C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                }
            }
            v
        };
        let a = rand_form();
        let b = rand_form();
        let lhs = a.wedge(&b.conj().star()).top_density()?;
        let rhs = a.inner(&b);
        worst = worst.max((lhs - rhs).norm() / (1.0 + rhs.norm()));
    }
    ok &= worst < 1e-12;
    notes.push(format!("pairing {worst:.1e}"));

    // double star on every basis monomial, n <= 3
    let mut dstar = true;
    for n in 1..=3 {
        for p in 0..=n {
            for q in 0..=n {
                for i in MultiIndex::all(n, p) {
                    for j in MultiIndex::all(n, q) {
                        let e = FormValue::basis(n, i, j);
                        let sign = if (p + q) % 2 == 0 { 1.0 } else { -1.0 };
                        let d = e.star().star().add(&e.scale(C64::new(-sign, 0.0)));
                        dstar &= d.terms.values().all(|c| c.norm() < 1e-13);
                    }
                }
            }
        }
    }
    ok &= dstar;
    notes.push(format!("double star {dstar}"));

    // dbar^2 = 0 on polynomial forms, exactly
    let mut dd = true;
    let forms = [
        (2, vec![], "z1^2*zb2*zb1 + 3*zb2^3*z2"),
        (2, vec![1], "zb1*zb2^2 + z1*zb2"),
        (3, vec![2], "zb1*zb3*z2 + zb2^2"),
        (3, vec![1, 3], "zb2^3*zb1 + z3"),
    ];
    for (n, dzb, text) in forms {
        let f = DifferentialForm::monomial(n, &[], &dzb, field(text, 2 * n))?;
        dd &= f.dbar()?.dbar()?.is_zero();
    }
    ok &= dd;
    notes.push(format!("dbar^2 {dd}"));

    // kernel bookkeeping: zeta part (n, n-q-1), z part (0,q), C(n,q) components
    let mut book = true;
    for n in 1..=2usize {
        for q in -1..n as isize {
            let zeta: Vec<f64> = (0..2 * n).map(|k| 0.3 + 0.1 * k as f64).collect();
            let z = vec![0.0; 2 * n];
            let k = kernel_eval(n, q, &zeta, &z)?;
            if q < 0 {
                book &= k.components.is_empty();
                continue;
            }
            let binom = MultiIndex::all(n, q as usize).len();
            book &= k.components.len() == binom;
            for (jset, form) in &k.components {
                book &= jset.len() == q as usize;
                book &= !form.is_zero();
                book &= form.terms.keys().all(|(i, j)| i.len() == n && j.len() == n - q as usize - 1);
            }
        }
    }
    ok &= book;
    notes.push(format!("kernel bookkeeping {book}"));
    Ok((ok, notes.join(", ")))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 Cauchy reduction of the kernel", c1_cauchy_reduction),
        ("2 Cauchy formula on the disc", c2_cauchy_formula),
        ("3 Cauchy-Pompeiu for f = zbar", c3_cauchy_pompeiu),
        ("4 BMK residuals in C^2, q in {0,1}", c4_bmk_c2),
        ("5 Friedrichs ladder with boundary values", c5_friedrichs),
        ("6 Green-Stokes identity", c6_green_stokes),
        ("7 weak boundary value pipelines agree", c7_weak_bv_equivalence),
        ("8 Young exponents and log bound", c8_young),
        ("9 structural properties", c9_structure),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        let (pass, detail) = match run() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "[{}] {name}: {detail} ({:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
