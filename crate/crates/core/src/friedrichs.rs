//! Mollification on the half-space `U = {x_1 < 0}`.
//!
//! The boundary-adapted Dirac sequence is
//! `phi_eps(x) = psi_eps(x') h'(x_1/tau)/tau` with `tau = tau(eps) <= eps`; its
//! support lies in `{tau < x_1 < 2 tau}`, so `f * phi_eps` only samples `f`
//! strictly inside `U` and is smooth up to `{x_1 = 0}`.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::gauss;
use crate::geometry::unit_sphere_area;
use crate::qops::FirstOrderOperator;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// `exp(-1/(1-s))` for `s = |x|^2 < 1`, else 0.
fn bump_sq(s: f64) -> f64 {
    if s < 1.0 {
        (-1.0 / (1.0 - s)).exp()
    } else {
        0.0
    }
}

/// `∫_0^1 exp(-1/(1-r^2)) r^{d-1} dr`
fn radial_bump_moment(d: usize) -> f64 {
    gauss::composite(0.0, 1.0, 16, 16)
        .into_iter()
        .map(|(r, w)| w * bump_sq(r * r) * r.powi(d as i32 - 1))
        .sum()
}

/// Normalized bump `psi(x') = exp(-1/(1-|x'|^2)) / Z` on the unit ball of `R^d`.
#[derive(Clone, Debug)]
pub struct TangentialMollifier {
    pub dim: usize,
    pub normalization: f64,
}

impl TangentialMollifier {
    pub fn new(dim: usize) -> Self {
        let normalization = if dim == 0 {
            1.0
        } else {
            unit_sphere_area(dim) * radial_bump_moment(dim)
        };
        TangentialMollifier { dim, normalization }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        if self.dim == 0 {
            return 1.0;
        }
        bump_sq(x.iter().map(|v| v * v).sum()) / self.normalization
    }

    /// `psi_eps(x') = eps^{-d} psi(x'/eps)`
    pub fn eval_scaled(&self, x: &[f64], eps: f64) -> f64 {
        let y: Vec<f64> = x.iter().map(|v| v / eps).collect();
        self.eval(&y) / eps.powi(self.dim as i32)
    }
}

/// Smooth monotone step: `h = 0` on `(-inf, 1]`, `h = 1` on `[2, inf)`,
/// `h' = beta / Z` with `beta(s) = exp(-1/(1-(2s-3)^2))`.
#[derive(Clone, Debug)]
pub struct NormalCutoff {
    z: f64,
}

impl Default for NormalCutoff {
    fn default() -> Self {
        Self::new()
    }
}

impl NormalCutoff {
    pub fn new() -> Self {
        let z = gauss::composite(1.0, 2.0, 16, 16)
            .into_iter()
            .map(|(s, w)| w * Self::beta(s))
            .sum();
        NormalCutoff { z }
    }

    fn beta(s: f64) -> f64 {
        let u = 2.0 * s - 3.0;
        bump_sq(u * u)
    }

    pub fn derivative(&self, s: f64) -> f64 {
        Self::beta(s) / self.z
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s <= 1.0 {
            return 0.0;
        }
        if s >= 2.0 {
            return 1.0;
        }
        let panels = 8;
        let v: f64 = gauss::composite(1.0, s, panels, 16)
            .into_iter()
            .map(|(t, w)| w * Self::beta(t))
            .sum();
        (v / self.z).clamp(0.0, 1.0)
    }
}

/// Boundary-adapted Dirac kernel at scales `(eps, tau)` on `R^m`.
#[derive(Clone, Debug)]
pub struct DiracSequence {
    pub m: usize,
    pub epsilon: f64,
    pub tau: f64,
    psi: TangentialMollifier,
    h: NormalCutoff,
    nodes: Vec<(Vec<f64>, f64)>,
}

/// Discrete quadrature resolution of the convolution kernels.
const NORMAL_NODES: usize = 8;
const TANGENTIAL_PANELS: usize = 2;
const TANGENTIAL_DEG: usize = 12;

impl DiracSequence {
    pub fn new(m: usize, epsilon: f64, tau: f64) -> Result<Self> {
        if m == 0 || !(epsilon > 0.0) || !(tau > 0.0) || tau > epsilon {
            return Err(Error::Unsupported(format!(
                "kernel scales need 0 < tau <= eps (eps = {epsilon}, tau = {tau})"
            )));
        }
        let psi = TangentialMollifier::new(m - 1);
        let h = NormalCutoff::new();
        // kernel offsets t with weights phi_eps(t) dt, normalized to unit sum
        let normal: Vec<(f64, f64)> = gauss::composite(tau, 2.0 * tau, 1, NORMAL_NODES)
            .into_iter()
            .map(|(t, w)| (t, w * h.derivative(t / tau) / tau))
            .collect();
        let tangential_axis = gauss::composite(-epsilon, epsilon, TANGENTIAL_PANELS, TANGENTIAL_DEG);
        let mut tangential: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
        for _ in 1..m {
            let mut next = Vec::new();
            for (t, w) in &tangential {
                for &(s, v) in &tangential_axis {
                    let mut y = t.clone();
                    y.push(s);
                    next.push((y, w * v));
                }
            }
            tangential = next;
        }
        let tangential: Vec<(Vec<f64>, f64)> = tangential
            .into_iter()
            .map(|(t, w)| {
                let v = w * psi.eval_scaled(&t, epsilon);
                (t, v)
            })
            .filter(|(_, w)| *w > 0.0)
            .collect();
        let mut nodes = Vec::with_capacity(normal.len() * tangential.len());
        for &(t1, w1) in &normal {
            for (tp, wp) in &tangential {
                let mut t = vec![t1];
                t.extend_from_slice(tp);
                nodes.push((t, w1 * wp));
            }
        }
        let total: f64 = nodes.iter().map(|(_, w)| w).sum();
        for n in nodes.iter_mut() {
            n.1 /= total;
        }
        Ok(DiracSequence {
            m,
            epsilon,
            tau,
            psi,
            h,
            nodes,
        })
    }

    /// Continuous kernel value.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let s = x[0] / self.tau;
        if s <= 1.0 || s >= 2.0 {
            return 0.0;
        }
        self.psi.eval_scaled(&x[1..], self.epsilon) * self.h.derivative(s) / self.tau
    }

    /// Offsets and weights of the discrete convolution.
    pub fn nodes(&self) -> &[(Vec<f64>, f64)] {
        &self.nodes
    }

    pub fn convolve_at(&self, f: &dyn Fn(&[f64]) -> C64, x: &[f64]) -> C64 {
        let mut y = vec![0.0; x.len()];
        let mut acc = ZERO;
        for (t, w) in &self.nodes {
            for i in 0..x.len() {
                y[i] = x[i] - t[i];
            }
            acc += f(&y) * *w;
        }
        acc
    }
}

/// Shifted interior kernel `phi_eps(x) = eps^{-m} phi(x/eps)` where `phi` is
/// the normalized bump on the ball of radius 1/2 about `(1/2, 0, ..., 0)`.
#[derive(Clone, Debug)]
pub struct InteriorMollifier {
    pub m: usize,
    pub epsilon: f64,
    normalization: f64,
    nodes: Vec<(Vec<f64>, f64)>,
}

impl InteriorMollifier {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let s: f64 = x
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let c = if i == 0 { 0.5 } else { 0.0 };
                let u = (v / self.epsilon - c) / 0.5;
                u * u
            })
            .sum();
        bump_sq(s) / self.normalization / self.epsilon.powi(self.m as i32)
    }

    pub fn nodes(&self) -> &[(Vec<f64>, f64)] {
        &self.nodes
    }

    pub fn convolve_at(&self, f: &dyn Fn(&[f64]) -> C64, x: &[f64]) -> C64 {
        let mut y = vec![0.0; x.len()];
        let mut acc = ZERO;
        for (t, w) in &self.nodes {
            for i in 0..x.len() {
                y[i] = x[i] - t[i];
            }
            acc += f(&y) * *w;
        }
        acc
    }
}

pub fn build_interior_mollifier(m: usize, epsilon: f64) -> Result<InteriorMollifier> {
    if m == 0 || !(epsilon > 0.0) {
        return Err(Error::Unsupported(format!("interior mollifier with eps = {epsilon}")));
    }
    let normalization = 0.5f64.powi(m as i32) * unit_sphere_area(m) * radial_bump_moment(m);
    let mut k = InteriorMollifier {
        m,
        epsilon,
        normalization,
        nodes: Vec::new(),
    };
    let axis0 = gauss::composite(0.0, epsilon, 2, 12);
    let axis = gauss::composite(-0.5 * epsilon, 0.5 * epsilon, 2, 12);
    let mut pts: Vec<(Vec<f64>, f64)> = axis0.iter().map(|&(t, w)| (vec![t], w)).collect();
    for _ in 1..m {
        let mut next = Vec::new();
        for (t, w) in &pts {
            for &(s, v) in &axis {
                let mut y = t.clone();
                y.push(s);
                next.push((y, w * v));
            }
        }
        pts = next;
    }
    let mut nodes: Vec<(Vec<f64>, f64)> = pts
        .into_iter()
        .map(|(t, w)| {
            let v = w * k.eval(&t);
            (t, v)
        })
        .filter(|(_, w)| *w > 0.0)
        .collect();
    let total: f64 = nodes.iter().map(|(_, w)| w).sum();
    for n in nodes.iter_mut() {
        n.1 /= total;
    }
    k.nodes = nodes;
    Ok(k)
}

/// Vertex grid on `[lo, hi]` with `hi[0] = 0`, axis 0 normal to `bU`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfSpaceGrid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub points: Vec<usize>,
}

impl HalfSpaceGrid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, points: Vec<usize>) -> Result<Self> {
        let m = lo.len();
        if m == 0 || hi.len() != m || points.len() != m {
            return Err(Error::DimensionMismatch("grid bounds and sizes".into()));
        }
        if hi[0] != 0.0 || lo.iter().zip(&hi).any(|(a, b)| !(a < b)) || points.iter().any(|&n| n < 2) {
            return Err(Error::DegenerateDomain("half-space grid needs lo < hi, hi[0] = 0, >= 2 points per axis".into()));
        }
        Ok(HalfSpaceGrid { lo, hi, points })
    }

    pub fn uniform(lo: Vec<f64>, hi: Vec<f64>, per_axis: usize) -> Result<Self> {
        let m = lo.len();
        Self::new(lo, hi, vec![per_axis; m])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / (self.points[axis] - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn multi_index(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = k % self.points[a];
            k /= self.points[a];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.points).fold(0, |acc, (i, n)| acc * n + i)
    }

    pub fn point(&self, k: usize) -> Vec<f64> {
        self.multi_index(k)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.lo[a] + i as f64 * self.spacing(a))
            .collect()
    }

    /// Product trapezoid weight of node `k`.
    pub fn weight(&self, k: usize) -> f64 {
        self.multi_index(k)
            .iter()
            .enumerate()
            .map(|(a, &i)| {
                let h = self.spacing(a);
                if i == 0 || i + 1 == self.points[a] {
                    0.5 * h
                } else {
                    h
                }
            })
            .product()
    }

    /// Indices of nodes on `{x_1 = 0}`.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&k| self.multi_index(k)[0] + 1 == self.points[0])
            .collect()
    }

    /// Trapezoid weight of a boundary node on `{x_1 = 0}`.
    pub fn boundary_weight(&self, k: usize) -> f64 {
        self.multi_index(k)
            .iter()
            .enumerate()
            .skip(1)
            .map(|(a, &i)| {
                let h = self.spacing(a);
                if i == 0 || i + 1 == self.points[a] {
                    0.5 * h
                } else {
                    h
                }
            })
            .product()
    }

    /// `L^p` norm over the grid of values given at every node.
    pub fn lp_norm(&self, values: &[C64], p: f64) -> f64 {
        let s: f64 = values
            .iter()
            .enumerate()
            .map(|(k, v)| self.weight(k) * v.norm().powf(p))
            .sum();
        s.powf(1.0 / p)
    }

    /// `L^p` norm over `{x_1 = 0}` of values given at the boundary nodes.
    pub fn boundary_lp_norm(&self, nodes: &[usize], values: &[C64], p: f64) -> f64 {
        let s: f64 = nodes
            .iter()
            .zip(values)
            .map(|(&k, v)| self.boundary_weight(k) * v.norm().powf(p))
            .sum();
        s.powf(1.0 / p)
    }
}

#[derive(Clone)]
pub enum FieldSource {
    /// Node values on the grid, multilinear interpolation in between.
    Samples(Vec<C64>),
    Function(Arc<dyn Fn(&[f64]) -> C64 + Send + Sync>),
}

impl std::fmt::Debug for FieldSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldSource::Samples(v) => write!(f, "Samples({} values)", v.len()),
            FieldSource::Function(_) => write!(f, "Function"),
        }
    }
}

/// Field on `U ∩ box`, zero outside the grid box.
#[derive(Clone, Debug)]
pub struct HalfSpaceField {
    pub grid: HalfSpaceGrid,
    pub source: FieldSource,
}

impl HalfSpaceField {
    pub fn from_samples(grid: HalfSpaceGrid, samples: Vec<C64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} samples for a grid of {} nodes",
                samples.len(),
                grid.len()
            )));
        }
        Ok(HalfSpaceField {
            grid,
            source: FieldSource::Samples(samples),
        })
    }

    pub fn from_fn<F>(grid: HalfSpaceGrid, f: F) -> Self
    where
        F: Fn(&[f64]) -> C64 + Send + Sync + 'static,
    {
        HalfSpaceField {
            grid,
            source: FieldSource::Function(Arc::new(f)),
        }
    }

    pub fn from_field(grid: HalfSpaceGrid, f: Field) -> Self {
        Self::from_fn(grid, move |x| f.eval(x))
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        let g = &self.grid;
        for a in 0..g.dim() {
            if x[a] < g.lo[a] || x[a] > g.hi[a] {
                return ZERO;
            }
        }
        match &self.source {
            FieldSource::Function(f) => f(x),
            FieldSource::Samples(v) => {
                let m = g.dim();
                let mut base = vec![0usize; m];
                let mut frac = vec![0.0; m];
                for a in 0..m {
                    let s = (x[a] - g.lo[a]) / g.spacing(a);
                    let i = (s.floor() as usize).min(g.points[a] - 2);
                    base[a] = i;
                    frac[a] = s - i as f64;
                }
                let mut acc = ZERO;
                for corner in 0..(1usize << m) {
                    let mut w = 1.0;
                    let mut idx = base.clone();
                    for a in 0..m {
                        if corner & (1 << a) != 0 {
                            idx[a] += 1;
                            w *= frac[a];
                        } else {
                            w *= 1.0 - frac[a];
                        }
                    }
                    if w != 0.0 {
                        acc += v[g.flat_index(&idx)] * w;
                    }
                }
                acc
            }
        }
    }

    pub fn samples(&self) -> Vec<C64> {
        match &self.source {
            FieldSource::Samples(v) => v.clone(),
            FieldSource::Function(_) => (0..self.grid.len()).map(|k| self.eval(&self.grid.point(k))).collect(),
        }
    }
}

/// `∫_U |f|^p (1 - h_tau(-t_1)) dt`, the mass of `|f|^p` in the slab
/// `{-2 tau < t_1 < 0}` weighted by the cutoff.
pub fn slab_integral(f: &HalfSpaceField, tau: f64, p: f64) -> f64 {
    let g = &f.grid;
    let h = NormalCutoff::new();
    let lo1 = (-2.0 * tau).max(g.lo[0]);
    // cutoff transition on [-2 tau, -tau] gets uniform panels; [-tau, 0] is
    // graded towards t_1 = 0 where |f|^p may be singular
    let mid = (-tau).max(lo1);
    let mut breaks: Vec<f64> = (0..16).map(|k| lo1 + (mid - lo1) * k as f64 / 16.0).collect();
    breaks.dedup();
    breaks.extend(gauss::graded_breaks(mid, 0.0, 1, 40));
    let normal: Vec<(f64, f64)> = gauss::on_breaks(&breaks, 8)
        .into_iter()
        .map(|(t, w)| (t, w * (1.0 - h.eval(-t / tau))))
        .collect();
    let tangential_axes: Vec<Vec<(f64, f64)>> = (1..g.dim())
        .map(|a| gauss::composite(g.lo[a], g.hi[a], 32, 8))
        .collect();
    let mut tangential: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
    for ax in &tangential_axes {
        let mut next = Vec::new();
        for (t, w) in &tangential {
            for &(s, v) in ax {
                let mut y = t.clone();
                y.push(s);
                next.push((y, w * v));
            }
        }
        tangential = next;
    }
    let mut acc = 0.0;
    let mut x = vec![0.0; g.dim()];
    for &(t1, w1) in &normal {
        x[0] = t1;
        for (tp, wp) in &tangential {
            x[1..].copy_from_slice(tp);
            acc += w1 * wp * f.eval(&x).norm().powf(p);
        }
    }
    acc
}

/// Largest dyadic `tau = eps 2^{-k}` with `(1/eps) slab_integral(tau) <= eps`.
pub fn choose_tau(f: &HalfSpaceField, epsilon: f64, p: f64) -> Result<f64> {
    if !(epsilon > 0.0) || !(p >= 1.0) {
        return Err(Error::TauUnsatisfiable(format!("need eps > 0 and p >= 1 (eps = {epsilon}, p = {p})")));
    }
    for k in 0..=52 {
        let tau = epsilon * 0.5f64.powi(k);
        if slab_integral(f, tau, p) / epsilon <= epsilon {
            return Ok(tau);
        }
    }
    Err(Error::TauUnsatisfiable(format!(
        "slab condition fails down to tau = eps 2^-52 at eps = {epsilon}; refine the sample grid"
    )))
}

/// Result of a boundary mollification: `f_eps` at every grid node.
#[derive(Clone, Debug)]
pub struct Mollified {
    pub epsilon: f64,
    pub tau: f64,
    pub values: Vec<C64>,
}

pub fn boundary_mollify(f: &HalfSpaceField, epsilon: f64, p: f64) -> Result<Mollified> {
    let tau = choose_tau(f, epsilon, p)?;
    let kernel = DiracSequence::new(f.grid.dim(), epsilon, tau)?;
    Ok(Mollified {
        epsilon,
        tau,
        values: mollify_on_grid(f, &kernel),
    })
}

pub fn mollify_on_grid(f: &HalfSpaceField, kernel: &DiracSequence) -> Vec<C64> {
    let g = &f.grid;
    let ev = |x: &[f64]| f.eval(x);
    (0..g.len()).map(|k| kernel.convolve_at(&ev, &g.point(k))).collect()
}

/// Apply `Q` to grid values by second-order finite differences
/// (one-sided at the grid edges).
pub fn apply_on_grid(q: &FirstOrderOperator, grid: &HalfSpaceGrid, values: &[C64]) -> Vec<C64> {
    let m = grid.dim();
    (0..grid.len())
        .map(|k| {
            let x = grid.point(k);
            let idx = grid.multi_index(k);
            let mut acc = q.b.eval(&x) * values[k];
            for a in 0..m {
                let h = grid.spacing(a);
                let n = grid.points[a];
                let at = |i: usize| {
                    let mut j = idx.clone();
                    j[a] = i;
                    values[grid.flat_index(&j)]
                };
                let i = idx[a];
                let d = if n < 3 {
                    (at(1) - at(0)) / h
                } else if i == 0 {
                    (at(0) * -3.0 + at(1) * 4.0 - at(2)) / (2.0 * h)
                } else if i + 1 == n {
                    (at(i) * 3.0 - at(i - 1) * 4.0 + at(i - 2)) / (2.0 * h)
                } else {
                    (at(i + 1) - at(i - 1)) / (2.0 * h)
                };
                acc += q.a[a].eval(&x) * d;
            }
            acc
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub epsilon: f64,
    pub tau: f64,
    pub interior_err: f64,
    pub q_err: f64,
    pub commutator_ratio: f64,
    pub trace_err: f64,
}

impl ConvergenceRow {
    pub const COLUMNS: [&'static str; 6] = ["epsilon", "tau", "interior_err", "q_err", "commutator_ratio", "trace_err"];

    pub fn values(&self) -> [f64; 6] {
        [
            self.epsilon,
            self.tau,
            self.interior_err,
            self.q_err,
            self.commutator_ratio,
            self.trace_err,
        ]
    }
}

/// Diagnostics of `f_eps = f * phi_eps` over an `eps` ladder: `L^p` errors of
/// `f_eps` and `Q f_eps`, the commutator ratio `|Q f_eps - (Qf) * phi_eps|_p / |f|_p`,
/// and the trace error `|a_1(0,.) f_eps(0,.) - a_1(0,.) f_b|_{L^p(bU)}`.
pub fn convergence_report(
    q: &FirstOrderOperator,
    f: &HalfSpaceField,
    qf: &HalfSpaceField,
    f_b: &dyn Fn(&[f64]) -> C64,
    eps_list: &[f64],
    p: f64,
) -> Result<Vec<ConvergenceRow>> {
    let g = &f.grid;
    if q.m != g.dim() || qf.grid != *g {
        return Err(Error::DimensionMismatch("operator, field and image must share the grid".into()));
    }
    let f_vals = f.samples();
    let qf_vals = qf.samples();
    let f_norm = g.lp_norm(&f_vals, p);
    let bnodes = g.boundary_nodes();
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let tau = choose_tau(f, eps, p)?;
        let kernel = DiracSequence::new(g.dim(), eps, tau)?;
        let fe = mollify_on_grid(f, &kernel);
        let qfe = apply_on_grid(q, g, &fe);
        let qf_moll = mollify_on_grid(qf, &kernel);
        let diff = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<C64>>();
        let interior_err = g.lp_norm(&diff(&fe, &f_vals), p);
        let q_err = g.lp_norm(&diff(&qfe, &qf_vals), p);
        let commutator = g.lp_norm(&diff(&qfe, &qf_moll), p);
        let trace: Vec<C64> = bnodes
            .iter()
            .map(|&k| {
                let x = g.point(k);
                q.a[0].eval(&x) * (fe[k] - f_b(&x))
            })
            .collect();
        rows.push(ConvergenceRow {
            epsilon: eps,
            tau,
            interior_err,
            q_err,
            commutator_ratio: if f_norm > 0.0 { commutator / f_norm } else { 0.0 },
            trace_err: g.boundary_lp_norm(&bnodes, &trace, p),
        });
    }
    Ok(rows)
}
