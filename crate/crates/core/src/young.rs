//! Generalized Young inequality for integral operators
//! `Tf(y) = ∫_X K(x,y) f(x) dμ(x)`: exponent admissibility, empirical
//! operator norms, and the logarithmic majorant of the boundary kernel.

use crate::error::{Error, Result};
use crate::geometry::{Domain, Region};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

const REL_TOL: f64 = 1e-12;

/// An exponent in `[1, ∞]` with `1/∞ = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn new(v: f64) -> Self {
        if v.is_infinite() {
            Exponent::Infinite
        } else {
            Exponent::Finite(v)
        }
    }

    /// `1/x`, mapping `∞ -> 0` and `0 -> ∞`.
    pub fn from_recip(x: f64) -> Self {
        if x == 0.0 {
            Exponent::Infinite
        } else {
            Exponent::Finite(1.0 / x)
        }
    }

    pub fn recip(self) -> f64 {
        match self {
            Exponent::Finite(v) => 1.0 / v,
            Exponent::Infinite => 0.0,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(v) => v,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    /// Product with another exponent; `∞·x = ∞` for `x >= 1`.
    pub fn mul(self, other: Exponent) -> Exponent {
        Exponent::new(self.value() * other.value())
    }

    pub fn in_range(self) -> bool {
        match self {
            Exponent::Finite(v) => v >= 1.0 && v.is_finite(),
            Exponent::Infinite => true,
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value().partial_cmp(&other.value())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(v) => write!(f, "{v}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    I,
    II,
    III,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
        };
        f.write_str(s)
    }
}

/// `T: L^p -> L^r` is bounded for this `p` and every target exponent up
/// to `r` (both measure spaces are finite, so smaller targets follow).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub p: Exponent,
    pub r: Exponent,
    pub case: Case,
}

/// The exponents `t, s` of the kernel integrability hypotheses and `a, b`
/// of the majorants `g ∈ L^a(Y)`, `h ∈ L^b(X)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelExponents {
    pub t: f64,
    pub s: f64,
    pub a: Exponent,
    pub b: Exponent,
}

impl KernelExponents {
    pub fn new(t: f64, s: f64, a: Exponent, b: Exponent) -> Result<Self> {
        if !(t >= 1.0 && t <= s && s.is_finite()) {
            return Err(Error::Inadmissible(format!("need 1 <= t <= s < inf, got t={t}, s={s}")));
        }
        if !a.in_range() || !b.in_range() {
            return Err(Error::Inadmissible(format!("a, b must lie in [1, inf], got a={a}, b={b}")));
        }
        Ok(KernelExponents { t, s, a, b })
    }

    /// Lower bound on `p` for case I, `None` if `t = 1` forces `p = ∞`.
    fn case_one_p_min(&self) -> Option<f64> {
        (self.t > 1.0).then(|| self.t / (self.t - 1.0))
    }

    /// Lower bound on `p` for case II with majorant exponent `b`, `None` if no
    /// branch applies.
    fn case_two_p_min(&self, b: Exponent) -> Option<f64> {
        match b {
            Exponent::Infinite => Some(1.0),
            Exponent::Finite(b) => {
                let sb = self.s * b;
                (sb > 1.0).then(|| sb / (sb - 1.0))
            }
        }
    }

    /// `1/r` from the case III relation with majorant exponent `b`, before
    /// range checks.
    fn case_three_recip(&self, p: Exponent, b: Exponent) -> Option<f64> {
        let base = p.recip() + 1.0 / self.t - 1.0;
        match b {
            Exponent::Infinite => Some(base),
            Exponent::Finite(b) => {
                let sb = self.s * b;
                if (sb - self.t).abs() <= REL_TOL * sb {
                    None
                } else {
                    Some(sb / (sb - self.t) * base)
                }
            }
        }
    }

    /// Case III target exponent using majorant exponent `b`, if admissible.
    fn case_three_with(&self, p: Exponent, b: Exponent) -> Option<Exponent> {
        let m = self.case_two_p_min(b)?;
        if p.value() < m * (1.0 - REL_TOL) {
            return None;
        }
        let inv = self.case_three_recip(p, b)?;
        if !(-REL_TOL..=1.0 + REL_TOL).contains(&inv) {
            return None;
        }
        let r = Exponent::from_recip(inv.clamp(0.0, 1.0));
        (r.value() <= self.case_three_r_max().value() * (1.0 + REL_TOL)).then_some(r)
    }

    /// Best case III target: `h ∈ L^b` on a finite measure space lies in every
    /// `L^{b'}` with `b' <= b`, so the relation may be used with any such `b'`.
    /// For `1/p + 1/t > 1` the target grows with `b'`, so the optimum is at `b`
    /// or where the target meets the upper bound on `r`.
    fn case_three(&self, p: Exponent) -> Option<Exponent> {
        let mut candidates = vec![self.b];
        let base = p.recip() + 1.0 / self.t - 1.0;
        if let Exponent::Finite(cap) = self.case_three_r_max() {
            if base > 0.0 && cap * base < 1.0 {
                let b_star = self.t / (1.0 - cap * base) / self.s;
                if b_star >= 1.0 && b_star <= self.b.value() {
                    candidates.push(Exponent::Finite(b_star));
                }
            }
        }
        candidates
            .into_iter()
            .filter_map(|b| self.case_three_with(p, b))
            .fold(None, |best: Option<Exponent>, r| match best {
                Some(x) if x >= r => Some(x),
                _ => Some(r),
            })
    }

    /// Upper bound on `r` in case III.
    fn case_three_r_max(&self) -> Exponent {
        match self.a {
            Exponent::Infinite => Exponent::Infinite,
            Exponent::Finite(a) => Exponent::Finite(self.t * (a * (self.s - self.t) / self.s + 1.0)),
        }
    }

    /// The reasons each case rejects `(p, r)`; empty when some case admits it.
    pub fn violations(&self, p: Exponent, r: Exponent) -> Vec<String> {
        let pairs = admissible_for(self, p);
        if pairs.iter().any(|pr| r.value() <= pr.r.value() * (1.0 + REL_TOL)) {
            return Vec::new();
        }
        let mut out = Vec::new();
        match self.case_one_p_min() {
            None if !p.is_infinite() => out.push("case I: t = 1 requires p = inf".to_string()),
            Some(m) if p.value() < m => out.push(format!("case I: p >= t/(t-1) = {m}")),
            _ => out.push(format!("case I: r <= a t = {}", self.a.mul(Exponent::new(self.t)))),
        }
        match self.case_two_p_min(self.b) {
            None => out.push("case II: requires sb > 1".to_string()),
            Some(_) if p.is_infinite() => out.push("case II: requires p < inf".to_string()),
            Some(m) if p.value() < m => out.push(format!("case II: p >= {m}")),
            _ => out.push("case II: r = 1".to_string()),
        }
        match (self.case_two_p_min(self.b), self.case_three_recip(p, self.b)) {
            (_, None) => out.push("case III: requires sb != t".to_string()),
            (None, _) => out.push("case III: requires the case II condition on p".to_string()),
            (Some(m), _) if p.value() < m => out.push(format!("case III: p >= {m}")),
            (_, Some(inv)) => out.push(format!(
                "case III: 1/r = {inv} must lie in [0, 1] with r <= {}",
                self.case_three_r_max()
            )),
        }
        out
    }
}

fn admissible_for(e: &KernelExponents, p: Exponent) -> Vec<ExponentPair> {
    let mut out = Vec::new();
    if !p.in_range() {
        return out;
    }
    let p_ok_one = match e.case_one_p_min() {
        None => p.is_infinite(),
        Some(m) => p.value() >= m,
    };
    if p_ok_one {
        out.push(ExponentPair {
            p,
            r: e.a.mul(Exponent::new(e.t)),
            case: Case::I,
        });
    }
    let p_ok_two = e.case_two_p_min(e.b).is_some_and(|m| p.value() >= m);
    if p_ok_two && !p.is_infinite() {
        out.push(ExponentPair {
            p,
            r: Exponent::Finite(1.0),
            case: Case::II,
        });
    }
    if let Some(r) = e.case_three(p) {
        out.push(ExponentPair { p, r, case: Case::III });
    }
    out
}

/// Kernel for empirical norms: `T f(y) = ∫_X K(x,y) f(x) dμ(x)` with `X`,
/// `Y` given by domain regions and their quadrature rules.
#[derive(Clone)]
pub struct KernelSpec {
    pub x: (Domain, Region),
    pub y: (Domain, Region),
    pub kernel: Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>,
    pub exponents: KernelExponents,
    /// Extra refinement of the `X` rule over the `Y` rule.
    pub x_level_offset: usize,
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelSpec")
            .field("x", &self.x)
            .field("y", &self.y)
            .field("exponents", &self.exponents)
            .field("x_level_offset", &self.x_level_offset)
            .finish()
    }
}

/// Pairs `(p, r)` admitted by each admissibility case for this `p`.
pub fn admissible_exponents(spec: &KernelSpec, p: Exponent) -> Vec<ExponentPair> {
    admissible_for(&spec.exponents, p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    /// `max_i ‖T f_i‖_r` over the normalized test functions; a lower bound
    /// on the operator norm.
    pub estimate: f64,
    pub level: usize,
    pub samples: usize,
    pub argmax: usize,
    pub per_sample: Vec<f64>,
}

/// Real test function: polynomial of degree `<= 3` times an optional bump.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    /// `(exponents, coefficient)`.
    pub terms: Vec<(Vec<u8>, f64)>,
    pub bump: Option<(Vec<f64>, f64)>,
}

impl TestFunction {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let cut = match &self.bump {
            None => 1.0,
            Some((c, rad)) => {
                let d2: f64 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / (rad * rad);
                if d2 >= 1.0 {
                    return 0.0;
                }
                (-1.0 / (1.0 - d2)).exp()
            }
        };
        let poly: f64 = self
            .terms
            .iter()
            .map(|(e, c)| c * x.iter().zip(e).map(|(xi, k)| xi.powi(*k as i32)).product::<f64>())
            .sum();
        poly * cut
    }
}

/// The deterministic test family for `seed`: member 0 is the constant 1.
pub fn test_family(dim: usize, nodes: &[Vec<f64>], diameter: f64, count: usize, seed: u64) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![TestFunction {
        terms: vec![(vec![0; dim], 1.0)],
        bump: None,
    }];
    while out.len() < count {
        let mut terms = Vec::new();
        for e in exponent_tuples(dim, 3) {
            if rng.gen_bool(0.5) {
                terms.push((e, rng.gen_range(-1.0..1.0)));
            }
        }
        if terms.is_empty() {
            terms.push((vec![0; dim], 1.0));
        }
        let bump = if rng.gen_bool(0.5) && !nodes.is_empty() {
            let c = nodes[rng.gen_range(0..nodes.len())].clone();
            Some((c, diameter * rng.gen_range(0.15..0.5)))
        } else {
            None
        };
        out.push(TestFunction { terms, bump });
    }
    out.truncate(count);
    out
}

fn exponent_tuples(dim: usize, max_deg: u8) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        let mut next = Vec::new();
        for e in &out {
            let used: u8 = e.iter().sum();
            for k in 0..=(max_deg - used) {
                let mut f = e.clone();
                f.push(k);
                next.push(f);
            }
        }
        out = next;
    }
    out
}

fn lp_norm(vals: &[f64], weights: &[f64], p: Exponent) -> f64 {
    match p {
        Exponent::Infinite => vals.iter().fold(0.0, |m, v| m.max(v.abs())),
        Exponent::Finite(p) => vals
            .iter()
            .zip(weights)
            .map(|(v, w)| v.abs().powf(p) * w)
            .sum::<f64>()
            .powf(1.0 / p),
    }
}

/// Max of `‖T f_i‖_r` over `sample_count` normalized test functions.
pub fn empirical_norm(spec: &KernelSpec, p: Exponent, r: Exponent, sample_count: usize, level: usize, seed: u64) -> Result<NormEstimate> {
    let v = spec.exponents.violations(p, r);
    if !v.is_empty() {
        return Err(Error::Inadmissible(format!("(p, r) = ({p}, {r}): {}", v.join("; "))));
    }
    if sample_count == 0 {
        return Err(Error::EmptyTestFamily);
    }
    let xr = spec.x.0.quadrature(spec.x.1, level + spec.x_level_offset, None)?;
    let yr = spec.y.0.quadrature(spec.y.1, level, None)?;
    let family = test_family(spec.x.0.dim(), &xr.nodes, spec.x.0.diameter(), sample_count, seed);
    let kmat: Vec<Vec<f64>> = yr
        .nodes
        .iter()
        .map(|y| xr.nodes.iter().zip(&xr.weights).map(|(x, w)| (spec.kernel)(x, y) * w).collect())
        .collect();
    let mut per_sample = Vec::with_capacity(family.len());
    for f in &family {
        let fx: Vec<f64> = xr.nodes.iter().map(|x| f.eval(x)).collect();
        let fnorm = lp_norm(&fx, &xr.weights, p);
        if fnorm == 0.0 || !fnorm.is_finite() {
            per_sample.push(0.0);
            continue;
        }
        let ty: Vec<f64> = kmat.iter().map(|row| row.iter().zip(&fx).map(|(k, v)| k * v).sum::<f64>() / fnorm).collect();
        per_sample.push(lp_norm(&ty, &yr.weights, r));
    }
    let (argmax, estimate) = per_sample
        .iter()
        .enumerate()
        .fold((0, 0.0), |(bi, bv), (i, v)| if *v > bv { (i, *v) } else { (bi, bv) });
    Ok(NormEstimate {
        estimate,
        level,
        samples: per_sample.len(),
        argmax,
        per_sample,
    })
}

/// `∫_{bD} |x - y|^{-exponent} dS(x)` by the boundary rule at `level`.
pub fn boundary_kernel_integral(domain: &Domain, y: &[f64], exponent: f64, level: usize) -> Result<f64> {
    let rule = domain.quadrature(Region::Boundary, level, None)?;
    Ok(rule.integrate_real(|x| {
        let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        d2.powf(-0.5 * exponent)
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogBoundFit {
    pub c0: f64,
    pub c1: f64,
    /// `max_k (I_k - C0 - C1 |log δ_k|)`; non-positive by construction.
    pub fit_residual: f64,
    /// `(δ_k, I(y_k))` along the ladder.
    pub ladder: Vec<(f64, f64)>,
    pub level: usize,
}

/// Radial ladder `y_k` with `δ(y_k) = R 2^{-k}`, `k = 1..=8`, toward the
/// boundary point in direction `e_1` from the center of a ball.
pub fn radial_ladder(domain: &Domain) -> Result<Vec<(f64, Vec<f64>)>> {
    let crate::geometry::DomainSpec::Ball { center, radius } = domain.spec() else {
        return Err(Error::Unsupported("log bound ladder needs a ball".into()));
    };
    Ok((1..=8)
        .map(|k| {
            let delta = radius * 2f64.powi(-k);
            let mut y = center.clone();
            y[0] += radius - delta;
            (delta, y)
        })
        .collect())
}

/// Fit `I(y) <= C0 + C1 |log δ(y)|` for `I(y) = ∫_{bD} |x-y|^{-exponent} dS`:
/// least squares for `C1`, then `C0` raised to the smallest upper bound.
pub fn log_bound_fit(domain: &Domain, kernel_norm_exponent: f64, level: usize) -> Result<LogBoundFit> {
    let mut ladder = Vec::new();
    for (delta, y) in radial_ladder(domain)? {
        ladder.push((delta, boundary_kernel_integral(domain, &y, kernel_norm_exponent, level)?));
    }
    let xs: Vec<f64> = ladder.iter().map(|(d, _)| d.ln().abs()).collect();
    let ys: Vec<f64> = ladder.iter().map(|(_, i)| *i).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let c1 = (sxy / sxx).max(0.0);
    let mut c0 = ys.iter().zip(&xs).map(|(y, x)| y - c1 * x).fold(f64::NEG_INFINITY, f64::max);
    let excess = |c0: f64| {
        ys.iter()
            .zip(&xs)
            .map(|(y, x)| y - (c0 + c1 * x))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    while excess(c0) > 0.0 {
        c0 = c0 + c0.abs() * f64::EPSILON + f64::MIN_POSITIVE;
    }
    Ok(LogBoundFit {
        c0,
        c1,
        fit_residual: excess(c0),
        ladder,
        level,
    })
}

/// `∫_D (C0 + C1 |log δ(y)|)^a dV` by the interior rule at `level`.
pub fn log_majorant_integral(domain: &Domain, c0: f64, c1: f64, a: f64, level: usize) -> Result<f64> {
    let rule = domain.quadrature(Region::Interior, level, None)?;
    Ok(rule.integrate_real(|y| (c0 + c1 * domain.dist_boundary(y).ln().abs()).powf(a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(t: f64, s: f64, a: f64, b: f64) -> KernelExponents {
        KernelExponents::new(t, s, Exponent::new(a), Exponent::new(b)).unwrap()
    }

    #[test]
    fn infinity_arithmetic() {
        assert_eq!(Exponent::Infinite.recip(), 0.0);
        assert_eq!(Exponent::from_recip(0.0), Exponent::Infinite);
        assert_eq!(Exponent::Finite(4.0).recip(), 0.25);
        assert!(Exponent::Infinite > Exponent::Finite(1e300));
        assert_eq!(Exponent::Infinite.mul(Exponent::Finite(2.0)), Exponent::Infinite);
    }

    #[test]
    fn t_one_case_one_only_at_infinity() {
        let e = ex(1.0, 1.5, 4.0, f64::INFINITY);
        assert!(admissible_for(&e, Exponent::Finite(5.0)).iter().all(|p| p.case != Case::I));
        assert!(admissible_for(&e, Exponent::Infinite).iter().any(|p| p.case == Case::I));
    }

    #[test]
    fn case_three_skipped_when_sb_equals_t() {
        let e = ex(2.0, 2.0, 2.0, 1.0);
        assert!(admissible_for(&e, Exponent::Finite(3.0)).iter().all(|p| p.case != Case::III));
    }

    #[test]
    fn a_infinite_relaxes_case_three() {
        let e = ex(1.0, 1.5, f64::INFINITY, f64::INFINITY);
        let pairs = admissible_for(&e, Exponent::Finite(50.0));
        let iii = pairs.iter().find(|p| p.case == Case::III).unwrap();
        assert!((iii.r.value() - 50.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_exponents_rejected() {
        assert!(KernelExponents::new(2.0, 1.5, Exponent::Infinite, Exponent::Infinite).is_err());
        assert!(KernelExponents::new(0.5, 1.5, Exponent::Infinite, Exponent::Infinite).is_err());
        assert!(KernelExponents::new(1.0, 1.5, Exponent::Finite(0.5), Exponent::Infinite).is_err());
    }

    #[test]
    fn violations_name_the_constraint() {
        let e = ex(1.0, 1.5, 4.0, f64::INFINITY);
        let v = e.violations(Exponent::Finite(2.0), Exponent::Finite(3.0));
        assert_eq!(v.len(), 3);
        assert!(v[0].contains("case I"));
        assert!(e.violations(Exponent::Finite(2.0), Exponent::Finite(2.0)).is_empty());
    }
}
