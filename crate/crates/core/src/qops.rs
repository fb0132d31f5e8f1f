//! First-order operators `Q = sum a_j d/dx_j + b`, their formal adjoints under
//! the Hermitian pairing `(u, v) = ∫ u conj(v) dV`, principal symbols, and
//! weak boundary-value residuals.

use crate::error::{Error, Result};
use crate::exterior::{DifferentialForm, FormValue, MultiIndex};
use crate::field::Field;
use crate::geometry::{boundary_density, BoundaryFrame, Domain, DomainKind, QuadratureRule, Region};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Debug)]
pub struct FirstOrderOperator {
    pub m: usize,
    pub a: Vec<Field>,
    pub b: Field,
}

/// `sigma_Q(x, xi) = i sum a_j(x) xi_j`.
#[derive(Clone, Debug)]
pub struct PrincipalSymbol {
    a: Vec<Field>,
}

impl PrincipalSymbol {
    pub fn eval(&self, x: &[f64], xi: &[f64]) -> C64 {
        let s: C64 = self.a.iter().zip(xi).map(|(a, &k)| a.eval(x) * k).sum();
        C64::new(0.0, 1.0) * s
    }
}

impl FirstOrderOperator {
    pub fn new(a: Vec<Field>, b: Field) -> Result<Self> {
        let m = a.len();
        if m == 0 || a.iter().any(|f| f.nvars() != m) || b.nvars() != m {
            return Err(Error::DimensionMismatch(format!(
                "operator coefficients must all live on R^{m}"
            )));
        }
        Ok(FirstOrderOperator { m, a, b })
    }

    /// Parse coefficient expressions (see [`crate::expr`]).
    pub fn parse(a: &[&str], b: &str) -> Result<Self> {
        let m = a.len();
        let a = a
            .iter()
            .map(|s| crate::expr::parse_field(s, m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(a, crate::expr::parse_field(b, m)?)
    }

    /// `Q* = -sum conj(a_j) d/dx_j + conj(b) - sum d conj(a_j)/dx_j`.
    pub fn formal_adjoint(&self) -> Result<FirstOrderOperator> {
        let mut b = self.b.conj();
        let mut a = Vec::with_capacity(self.m);
        for (j, aj) in self.a.iter().enumerate() {
            let c = aj.conj();
            b = b.sub(&c.derivative(j)?);
            a.push(c.scale(C64::new(-1.0, 0.0)));
        }
        Ok(FirstOrderOperator { m: self.m, a, b })
    }

    pub fn principal_symbol(&self) -> PrincipalSymbol {
        PrincipalSymbol { a: self.a.clone() }
    }

    pub fn apply(&self, u: &Field) -> Result<Field> {
        let mut out = self.b.mul(u);
        for (j, aj) in self.a.iter().enumerate() {
            out = out.add(&aj.mul(&u.derivative(j)?));
        }
        Ok(out)
    }

    /// Apply at a point with centered differences of step `h` (for black-box `u`).
    pub fn apply_fd(&self, u: &Field, x: &[f64], h: f64) -> C64 {
        let mut acc = self.b.eval(x) * u.eval(x);
        let mut y = x.to_vec();
        for (j, aj) in self.a.iter().enumerate() {
            y[j] = x[j] + h;
            let up = u.eval(&y);
            y[j] = x[j] - h;
            let um = u.eval(&y);
            y[j] = x[j];
            acc += aj.eval(x) * (up - um) / (2.0 * h);
        }
        acc
    }

    /// Coefficients as polynomials, if they all are.
    pub fn poly_coefficients(&self) -> Option<(Vec<crate::field::Poly>, crate::field::Poly)> {
        let a = self.a.iter().map(|f| f.as_poly().cloned()).collect::<Option<Vec<_>>>()?;
        Some((a, self.b.as_poly()?.clone()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenStokes {
    pub qu_v: C64,
    pub u_qstar_v: C64,
    pub boundary_term: C64,
    pub residual: f64,
}

fn boundary_rule(domain: &Domain, level: usize) -> Result<QuadratureRule> {
    domain.quadrature(Region::Boundary, level, None)
}

fn normal_symbol(q: &FirstOrderOperator, x: &[f64], nu: &[f64]) -> C64 {
    q.a.iter().zip(nu).map(|(a, &k)| a.eval(x) * k).sum()
}

/// `|(Qu, v) - (u, Q*v) - (1/i) ∫ <sigma_Q(nu) u, v> dS|` by quadrature.
pub fn green_stokes_residual(
    q: &FirstOrderOperator,
    u: &Field,
    v: &Field,
    domain: &Domain,
    level: usize,
) -> Result<GreenStokes> {
    let qs = q.formal_adjoint()?;
    let qu = q.apply(u)?;
    let qsv = qs.apply(v)?;
    let vol = domain.quadrature(Region::Interior, level, None)?;
    let qu_v = vol.integrate(|x| qu.eval(x) * v.eval(x).conj());
    let u_qstar_v = vol.integrate(|x| u.eval(x) * qsv.eval(x).conj());
    let bd = boundary_rule(domain, level)?;
    let normals = bd.normals.as_ref().expect("boundary rule has normals");
    let mut boundary_term = ZERO;
    for (k, x) in bd.nodes.iter().enumerate() {
        boundary_term += normal_symbol(q, x, &normals[k]) * u.eval(x) * v.eval(x).conj() * bd.weights[k];
    }
    Ok(GreenStokes {
        qu_v,
        u_qstar_v,
        boundary_term,
        residual: (qu_v - u_qstar_v - boundary_term).norm(),
    })
}

/// Candidate `(u, Qu, u_b)` for weak `Q`-boundary values.
#[derive(Clone, Debug)]
pub struct WeakBvCandidate {
    pub u: Field,
    pub qu: Field,
    pub u_b: Field,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub test_index: usize,
    pub residual: f64,
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub records: Vec<ResidualRecord>,
    pub max: f64,
    pub level: usize,
}

impl ResidualReport {
    fn from_values(values: Vec<f64>, level: usize) -> Self {
        let max = values.iter().cloned().fold(0.0, f64::max);
        ResidualReport {
            records: values
                .into_iter()
                .enumerate()
                .map(|(test_index, residual)| ResidualRecord {
                    test_index,
                    residual,
                    level,
                })
                .collect(),
            max,
            level,
        }
    }
}

/// Scalar test functions: monomials in `x - c` times a bump centred at `c`,
/// for boundary centres `c`.
#[derive(Clone, Debug)]
pub struct TestFamily {
    pub members: Vec<Field>,
}

impl TestFamily {
    pub fn new(members: Vec<Field>) -> Self {
        TestFamily { members }
    }

    /// `count` members built from the given centres and bump radius, ordered
    /// by monomial degree (at most 4).
    pub fn from_centers(centers: &[Vec<f64>], radius: f64, count: usize) -> Self {
        let m = centers.first().map_or(0, Vec::len);
        let mut members = Vec::new();
        'outer: for degree in 0..=4usize {
            for exps in exponent_vectors(m, degree) {
                for c in centers {
                    if members.len() == count {
                        break 'outer;
                    }
                    let mono = crate::field::Poly::monomial(
                        exps.iter().map(|&e| e as u16).collect(),
                        C64::new(1.0, 0.0),
                    )
                    .shifted(c);
                    members.push(Field::bump(c.clone(), radius).mul(&Field::Poly(mono)));
                }
            }
        }
        TestFamily { members }
    }

    /// Default boundary-adapted family for the supported domains.
    pub fn for_domain(domain: &Domain, count: usize) -> Result<Self> {
        let m = domain.dim();
        let (centers, radius) = match domain.spec() {
            crate::geometry::DomainSpec::Ball { center, radius } => {
                let dirs = crate::geometry::sphere_rule(m, 0)?;
                let k = 8.min(dirs.len());
                let step = dirs.len() / k;
                let centers = (0..k)
                    .map(|i| {
                        let w = &dirs[i * step].0;
                        (0..m).map(|j| center[j] + radius * w[j]).collect()
                    })
                    .collect::<Vec<Vec<f64>>>();
                (centers, 0.9 * radius)
            }
            crate::geometry::DomainSpec::Ellipsoid { center, axes } => {
                let dirs = crate::geometry::sphere_rule(m, 0)?;
                let k = 8.min(dirs.len());
                let step = dirs.len() / k;
                let centers = (0..k)
                    .map(|i| {
                        let w = &dirs[i * step].0;
                        (0..m).map(|j| center[j] + axes[j] * w[j]).collect()
                    })
                    .collect::<Vec<Vec<f64>>>();
                let amin = axes.iter().cloned().fold(f64::INFINITY, f64::min);
                (centers, 0.9 * amin)
            }
            crate::geometry::DomainSpec::IntervalBox { lo, hi } => {
                // face centres
                let mid: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
                let mut centers = Vec::new();
                for i in 0..m {
                    for v in [lo[i], hi[i]] {
                        let mut c = mid.clone();
                        c[i] = v;
                        centers.push(c);
                    }
                }
                let side = lo.iter().zip(hi).map(|(a, b)| b - a).fold(f64::INFINITY, f64::min);
                (centers, 0.45 * side)
            }
            crate::geometry::DomainSpec::HalfSpacePatch { lo, hi } => {
                // centres on {x_1 = 0}; bumps stay away from the side faces
                let mut centers = Vec::new();
                let fractions = [0.5, 0.35, 0.65];
                for &f in &fractions {
                    let mut c = vec![0.0; m];
                    for j in 1..m {
                        c[j] = lo[j] + f * (hi[j] - lo[j]);
                    }
                    centers.push(c);
                }
                let side = (1..m)
                    .map(|j| hi[j] - lo[j])
                    .chain(std::iter::once(-lo[0]))
                    .fold(f64::INFINITY, f64::min);
                (centers, 0.3 * side)
            }
        };
        Ok(Self::from_centers(&centers, radius, count))
    }
}

fn exponent_vectors(m: usize, degree: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return if degree == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=degree).rev() {
        for mut rest in exponent_vectors(m - 1, degree - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn sup_over(rules: &[&QuadratureRule], f: impl Fn(&[f64]) -> f64) -> f64 {
    rules
        .iter()
        .flat_map(|r| r.nodes.iter())
        .map(|x| f(x))
        .fold(0.0, f64::max)
}

/// Max over the family of the normalized residual of the weak boundary
/// value identity `(Qu, phi) - (u, Q* phi) - ∫ (sum a_j nu_j) u_b conj(phi) dS`.
pub fn weak_bv_residual(
    q: &FirstOrderOperator,
    cand: &WeakBvCandidate,
    family: &TestFamily,
    domain: &Domain,
    level: usize,
) -> Result<ResidualReport> {
    if family.members.is_empty() {
        return Err(Error::EmptyTestFamily);
    }
    let qs = q.formal_adjoint()?;
    let vol = domain.quadrature(Region::Interior, level, None)?;
    let bd = boundary_rule(domain, level)?;
    let normals = bd.normals.as_ref().expect("boundary rule has normals");
    let u_vals: Vec<C64> = vol.nodes.iter().map(|x| cand.u.eval(x)).collect();
    let qu_vals: Vec<C64> = vol.nodes.iter().map(|x| cand.qu.eval(x)).collect();
    let b_vals: Vec<C64> = bd
        .nodes
        .iter()
        .enumerate()
        .map(|(k, x)| normal_symbol(q, x, &normals[k]) * cand.u_b.eval(x) * bd.weights[k])
        .collect();
    let mut values = Vec::with_capacity(family.members.len());
    for phi in &family.members {
        let qsphi = qs.apply(phi)?;
        let mut lhs = ZERO;
        for (k, x) in vol.nodes.iter().enumerate() {
            let p = phi.eval(x);
            if p == ZERO && qsphi.eval(x) == ZERO {
                continue;
            }
            lhs += (qu_vals[k] * p.conj() - u_vals[k] * qsphi.eval(x).conj()) * vol.weights[k];
        }
        let rhs: C64 = bd.nodes.iter().zip(&b_vals).map(|(x, b)| b * phi.eval(x).conj()).sum();
        let sup = sup_over(&[&vol, &bd], |x| phi.eval(x).norm());
        values.push(if sup > 0.0 { (lhs - rhs).norm() / sup } else { 0.0 });
    }
    Ok(ResidualReport::from_values(values, level))
}

/// `dbar r` at a boundary point of a normalized defining function:
/// `sum_k (nu_{2k} + i nu_{2k+1})/2 dzbar_k`.
pub fn dbar_r(nu: &[f64]) -> FormValue {
    let n = nu.len() / 2;
    let mut v = FormValue::zero(n);
    for k in 0..n {
        v.add_term(
            (MultiIndex::empty(), MultiIndex::single(k + 1)),
            C64::new(0.5 * nu[2 * k], 0.5 * nu[2 * k + 1]),
        );
    }
    v
}

/// `(1/i) sigma_dbar(x, nu_flat) u = dbar r ∧ u` at a boundary point.
pub fn dbar_symbol_over_i(frame: &BoundaryFrame, u: &FormValue) -> FormValue {
    dbar_r(&frame.nu).wedge(u)
}

/// Test forms of bidegree `(n, n-q-1)`: scalar members times
/// `dz^{1..n} ∧ dzbar^J`, cycling through `J`.
pub fn test_forms(n: usize, q: usize, family: &TestFamily) -> Result<Vec<DifferentialForm>> {
    if q + 1 > n {
        return Err(Error::InvalidBidegree { p: n, q: q + 1, n });
    }
    let js = MultiIndex::all(n, n - q - 1);
    family
        .members
        .iter()
        .enumerate()
        .map(|(k, psi)| {
            let mut f = DifferentialForm::zero(n, n, n - q - 1)?;
            f.insert_monomial((MultiIndex::full(n), js[k % js.len()]), psi.clone())?;
            Ok(f)
        })
        .collect()
}

fn check_dbar_inputs(f: &DifferentialForm, dbar_f: &DifferentialForm, f_b: &DifferentialForm) -> Result<usize> {
    let q = f.bidegree().q;
    let expect = |what: &str, form: &DifferentialForm, p: usize, qq: usize| {
        if form.bidegree().p != p || form.bidegree().q != qq {
            Err(Error::BidegreeMismatch {
                expected: format!("{what} of bidegree ({p},{qq})"),
                found: form.bidegree().to_string(),
            })
        } else {
            Ok(())
        }
    };
    expect("f", f, 0, q)?;
    expect("dbar f", dbar_f, 0, q + 1)?;
    expect("f_b", f_b, 0, q)?;
    if dbar_f.n() != f.n() || f_b.n() != f.n() {
        return Err(Error::DimensionMismatch("forms on different C^n".into()));
    }
    Ok(q)
}

/// Residuals of both pipelines per test form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// Wedge-integral form of the identity.
    pub wedge_residuals: Vec<f64>,
    /// Hermitian-pairing form with `g = (-1)^{q+1} *conj(phi)` and `Q* = -*∂*`.
    pub pairing_residuals: Vec<f64>,
    pub max_wedge: f64,
    pub max_pairing: f64,
    pub max_difference: f64,
    pub level: usize,
}

struct PipelineValues {
    wedge: C64,
    pairing: C64,
    sup: f64,
}

fn dbar_pipelines(
    f: &DifferentialForm,
    dbar_f: &DifferentialForm,
    f_b: &DifferentialForm,
    phi: &DifferentialForm,
    vol: &QuadratureRule,
    bd: &QuadratureRule,
    q: usize,
    want_pairing: bool,
) -> Result<PipelineValues> {
    let sign_q = if q % 2 == 0 { 1.0 } else { -1.0 };
    let dphi = phi.dbar()?;
    let mut wedge = ZERO;
    let mut pairing = ZERO;
    let mut sup: f64 = 0.0;
    let pair_forms = if want_pairing {
        let g = phi.conj().star().scale(C64::new(-sign_q, 0.0));
        let qstar_g = g.star().del()?.star().scale(C64::new(-1.0, 0.0));
        Some((g, qstar_g))
    } else {
        None
    };
    for (x, w) in vol.nodes.iter().zip(&vol.weights) {
        let pv = phi.eval(x);
        let dpv = dphi.eval(x);
        if pv.is_zero() && dpv.is_zero() {
            continue;
        }
        sup = sup.max(pv.terms.values().map(|c| c.norm()).fold(0.0, f64::max));
        let fv = f.eval(x);
        let dfv = dbar_f.eval(x);
        let a = dfv.wedge(&pv).top_density()? + fv.wedge(&dpv).top_density()? * sign_q;
        wedge += a * *w;
        if let Some((g, qg)) = &pair_forms {
            let b = dfv.inner(&g.eval(x)) - fv.inner(&qg.eval(x));
            pairing += b * *w;
        }
    }
    let normals = bd.normals.as_ref().expect("boundary rule has normals");
    for (k, (x, w)) in bd.nodes.iter().zip(&bd.weights).enumerate() {
        let pv = phi.eval(x);
        if pv.is_zero() {
            continue;
        }
        sup = sup.max(pv.terms.values().map(|c| c.norm()).fold(0.0, f64::max));
        let frame = BoundaryFrame {
            point: x.clone(),
            nu: normals[k].clone(),
            nu_flat: normals[k].clone(),
            ds_weight: 1.0,
        };
        let fb = f_b.eval(x);
        wedge -= boundary_density(&fb.wedge(&pv), &frame)? * *w;
        if let Some((g, _)) = &pair_forms {
            pairing -= dbar_symbol_over_i(&frame, &fb).inner(&g.eval(x)) * *w;
        }
    }
    Ok(PipelineValues { wedge, pairing, sup })
}

/// Max over test forms `phi` of bidegree `(n, n-q-1)` of the normalized residual of
/// `∫ dbar f ∧ phi + (-1)^q ∫ f ∧ dbar phi - ∫_{bD} f_b ∧ iota^* phi`.
pub fn dbar_bv_residual(
    f: &DifferentialForm,
    dbar_f: &DifferentialForm,
    f_b: &DifferentialForm,
    domain: &Domain,
    family: &TestFamily,
    level: usize,
) -> Result<ResidualReport> {
    let q = check_dbar_inputs(f, dbar_f, f_b)?;
    if family.members.is_empty() {
        return Err(Error::EmptyTestFamily);
    }
    let vol = domain.quadrature(Region::Interior, level, None)?;
    let bd = boundary_rule(domain, level)?;
    let mut values = Vec::new();
    for phi in test_forms(f.n(), q, family)? {
        let v = dbar_pipelines(f, dbar_f, f_b, &phi, &vol, &bd, q, false)?;
        values.push(if v.sup > 0.0 { v.wedge.norm() / v.sup } else { 0.0 });
    }
    Ok(ResidualReport::from_values(values, level))
}

/// Evaluate the wedge-integral residual and the Hermitian-pairing residual
/// (`Q = dbar`, `Q* = -*∂*`) on the same test forms.
pub fn equivalence_check(
    f: &DifferentialForm,
    dbar_f: &DifferentialForm,
    f_b: &DifferentialForm,
    domain: &Domain,
    family: &TestFamily,
    level: usize,
) -> Result<EquivalenceReport> {
    let q = check_dbar_inputs(f, dbar_f, f_b)?;
    if family.members.is_empty() {
        return Err(Error::EmptyTestFamily);
    }
    let vol = domain.quadrature(Region::Interior, level, None)?;
    let bd = boundary_rule(domain, level)?;
    let mut wedge_residuals = Vec::new();
    let mut pairing_residuals = Vec::new();
    for phi in test_forms(f.n(), q, family)? {
        let v = dbar_pipelines(f, dbar_f, f_b, &phi, &vol, &bd, q, true)?;
        let s = if v.sup > 0.0 { 1.0 / v.sup } else { 0.0 };
        wedge_residuals.push(v.wedge.norm() * s);
        pairing_residuals.push(v.pairing.norm() * s);
    }
    let max_wedge = wedge_residuals.iter().cloned().fold(0.0, f64::max);
    let max_pairing = pairing_residuals.iter().cloned().fold(0.0, f64::max);
    let max_difference = wedge_residuals
        .iter()
        .zip(&pairing_residuals)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(EquivalenceReport {
        wedge_residuals,
        pairing_residuals,
        max_wedge,
        max_pairing,
        max_difference,
        level,
    })
}

/// `Q* = -n1 d/dx_1 + Q'` in the half-space model with normal `e_1`.
/// Returns the normal coefficient `n1 = conj(a_1)` and `Q'`.
pub fn normal_tangential_split(q: &FirstOrderOperator, frame: &BoundaryFrame) -> Result<(Field, FirstOrderOperator)> {
    let nu = &frame.nu;
    let is_e1 = !nu.is_empty()
        && (nu[0] - 1.0).abs() < 1e-12
        && nu[1..].iter().all(|v| v.abs() < 1e-12);
    if !is_e1 || nu.len() != q.m {
        return Err(Error::NotHalfSpaceFrame(nu.clone()));
    }
    let qs = q.formal_adjoint()?;
    let normal = qs.a[0].scale(C64::new(-1.0, 0.0));
    let mut a = qs.a.clone();
    a[0] = Field::zero(q.m);
    Ok((normal, FirstOrderOperator { m: q.m, a, b: qs.b }))
}

/// Whether the domain is the half-space model.
pub fn is_half_space(domain: &Domain) -> bool {
    domain.kind() == DomainKind::HalfSpacePatch
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Poly;
    use crate::geometry::{make_domain, DomainSpec};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn adjoint_examples() {
        let q = FirstOrderOperator::parse(&["1"], "0").unwrap();
        let qs = q.formal_adjoint().unwrap();
        assert_eq!(qs.a[0].as_poly().unwrap(), &Poly::constant(1, c(-1.0, 0.0)));
        assert!(qs.b.is_zero());

        let q = FirstOrderOperator::parse(&["x1"], "0").unwrap();
        let qs = q.formal_adjoint().unwrap();
        assert_eq!(qs.a[0].as_poly().unwrap(), &Poly::var(1, 0).scale(c(-1.0, 0.0)));
        assert_eq!(qs.b.as_poly().unwrap(), &Poly::constant(1, c(-1.0, 0.0)));

        let q = FirstOrderOperator::parse(&["1"], "2 + 3*i").unwrap();
        let qs = q.formal_adjoint().unwrap();
        assert_eq!(qs.b.as_poly().unwrap(), &Poly::constant(1, c(2.0, -3.0)));
    }

    #[test]
    fn adjoint_is_an_involution() {
        let q = FirstOrderOperator::parse(&["1 + i*x2", "x1*x2 - 2*i"], "x1^2 + i").unwrap();
        let qss = q.formal_adjoint().unwrap().formal_adjoint().unwrap();
        let (a, b) = q.poly_coefficients().unwrap();
        let (a2, b2) = qss.poly_coefficients().unwrap();
        assert_eq!(a, a2);
        assert_eq!(b, b2);
    }

    #[test]
    fn symbol_normalization() {
        let q = FirstOrderOperator::parse(&["1", "0"], "0").unwrap();
        let s = q.principal_symbol();
        assert_eq!(s.eval(&[0.0, 0.3], &[1.0, 0.0]), c(0.0, 1.0));
        assert_eq!(s.eval(&[0.0, 0.3], &[0.0, 0.0]), c(0.0, 0.0));
    }

    #[test]
    fn hand_computed_interval_case() {
        let d = make_domain(&DomainSpec::IntervalBox { lo: vec![-1.0], hi: vec![0.0] }).unwrap();
        let q = FirstOrderOperator::parse(&["1"], "0").unwrap();
        let u = crate::expr::parse_field("x1", 1).unwrap();
        let v = crate::expr::parse_field("1", 1).unwrap();
        let gs = green_stokes_residual(&q, &u, &v, &d, 0).unwrap();
        // (u', 1) = 1 and the boundary term u v |_{-1}^{0} = 1
        assert!((gs.qu_v - 1.0).norm() < 1e-14);
        assert!((gs.boundary_term - 1.0).norm() < 1e-14);
        assert!(gs.residual < 1e-14);
    }

    #[test]
    fn split_examples() {
        let frame = BoundaryFrame {
            point: vec![0.0, 0.2],
            nu: vec![1.0, 0.0],
            nu_flat: vec![1.0, 0.0],
            ds_weight: 1.0,
        };
        let q = FirstOrderOperator::parse(&["1", "1"], "0").unwrap();
        let (a1, qp) = normal_tangential_split(&q, &frame).unwrap();
        assert_eq!(a1.as_poly().unwrap(), &Poly::constant(2, c(1.0, 0.0)));
        assert_eq!(qp.a[1].as_poly().unwrap(), &Poly::constant(2, c(-1.0, 0.0)));
        assert!(qp.a[0].is_zero() && qp.b.is_zero());

        let bad = BoundaryFrame {
            nu: vec![0.0, 1.0],
            ..frame
        };
        assert!(matches!(normal_tangential_split(&q, &bad), Err(Error::NotHalfSpaceFrame(_))));
    }

    #[test]
    fn exponent_vectors_count() {
        assert_eq!(exponent_vectors(2, 2).len(), 3);
        assert_eq!(exponent_vectors(4, 1).len(), 4);
        assert_eq!(exponent_vectors(3, 0), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn empty_family_is_an_error() {
        let d = Domain::unit_ball(1);
        let q = FirstOrderOperator::parse(&["1", "0"], "0").unwrap();
        let cand = WeakBvCandidate {
            u: Field::zero(2),
            qu: Field::zero(2),
            u_b: Field::zero(2),
        };
        assert!(matches!(
            weak_bv_residual(&q, &cand, &TestFamily::new(vec![]), &d, 0),
            Err(Error::EmptyTestFamily)
        ));
    }
}
