//! Domains given by normalized defining functions, boundary frames and
//! quadrature rules.
//!
//! Supported shapes: balls and axis-aligned ellipsoids in `R^m` (`m <= 4`,
//! so `C^1` and `C^2`), interval boxes, and the half-space patch
//! `{x_1 < 0} ∩ box` used by the mollification module.

use crate::error::{Error, Result};
use crate::exterior::FormValue;
use crate::gauss;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::io::Write;

/// Boundary tolerance used by [`Domain::boundary_frame`], relative to the
/// domain diameter.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainSpec {
    Ball { center: Vec<f64>, radius: f64 },
    Ellipsoid { center: Vec<f64>, axes: Vec<f64> },
    IntervalBox { lo: Vec<f64>, hi: Vec<f64> },
    /// `{x_1 < 0}` restricted to the support box `[lo, hi]`, `hi[0] = 0`.
    HalfSpacePatch { lo: Vec<f64>, hi: Vec<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    Ball,
    Ellipsoid,
    IntervalBox,
    HalfSpacePatch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Interior,
    Boundary,
}

#[derive(Clone, Debug, PartialEq)]
enum Shape {
    Ellipsoid { center: Vec<f64>, axes: Vec<f64> },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    HalfSpace { lo: Vec<f64>, hi: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    kind: DomainKind,
    shape: Shape,
    spec: DomainSpec,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryFrame {
    pub point: Vec<f64>,
    /// Outward unit normal.
    pub nu: Vec<f64>,
    /// Metric dual of `nu` (same components in the Euclidean metric).
    pub nu_flat: Vec<f64>,
    /// `|grad r|` at the point; `dS = iota^*(*dr)` up to this factor.
    pub ds_weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub region: Region,
    pub level: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Outward unit normals for boundary rules.
    pub normals: Option<Vec<Vec<f64>>>,
    pub exclusion: Option<Exclusion>,
    /// Nominal node spacing at this level.
    pub spacing: f64,
}

/// Pullback of a form to the boundary, in an orthonormal tangential coframe.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentialValue {
    pub degree: usize,
    /// `(increasing tangent indices, coefficient)`.
    pub coefficients: Vec<(Vec<usize>, C64)>,
}

impl TangentialValue {
    pub fn max_abs(&self) -> f64 {
        self.coefficients.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }
}

pub fn make_domain(spec: &DomainSpec) -> Result<Domain> {
    let degenerate = |s: &str| Err(Error::DegenerateDomain(s.to_string()));
    let (kind, shape) = match spec {
        DomainSpec::Ball { center, radius } => {
            if center.is_empty() || center.len() > 4 {
                return degenerate("ball dimension must be 1..=4");
            }
            if !(*radius > 0.0) || !radius.is_finite() {
                return degenerate("radius must be positive");
            }
            (
                DomainKind::Ball,
                Shape::Ellipsoid {
                    center: center.clone(),
                    axes: vec![*radius; center.len()],
                },
            )
        }
        DomainSpec::Ellipsoid { center, axes } => {
            if center.is_empty() || center.len() > 4 || axes.len() != center.len() {
                return degenerate("ellipsoid needs matching center/axes of dimension 1..=4");
            }
            if axes.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
                return degenerate("semi-axes must be positive");
            }
            (
                DomainKind::Ellipsoid,
                Shape::Ellipsoid {
                    center: center.clone(),
                    axes: axes.clone(),
                },
            )
        }
        DomainSpec::IntervalBox { lo, hi } => {
            if lo.is_empty() || lo.len() != hi.len() {
                return degenerate("box bounds must have equal nonzero length");
            }
            if lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
                return degenerate("box bounds must satisfy lo < hi");
            }
            (
                DomainKind::IntervalBox,
                Shape::Box {
                    lo: lo.clone(),
                    hi: hi.clone(),
                },
            )
        }
        DomainSpec::HalfSpacePatch { lo, hi } => {
            if lo.is_empty() || lo.len() != hi.len() {
                return degenerate("patch bounds must have equal nonzero length");
            }
            if lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
                return degenerate("patch bounds must satisfy lo < hi");
            }
            if hi[0] != 0.0 {
                return degenerate("half-space patch needs hi[0] = 0");
            }
            (
                DomainKind::HalfSpacePatch,
                Shape::HalfSpace {
                    lo: lo.clone(),
                    hi: hi.clone(),
                },
            )
        }
    };
    Ok(Domain {
        kind,
        shape,
        spec: spec.clone(),
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap_or(c);
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    d
}

/// Unit-sphere rule in `R^m`: directions and weights summing to `|S^{m-1}|`.
pub fn sphere_rule(m: usize, level: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    let s = 1usize << level;
    Ok(match m {
        1 => vec![(vec![-1.0], 1.0), (vec![1.0], 1.0)],
        2 => gauss::trapezoid_periodic(8 * s)
            .into_iter()
            .map(|(t, w)| (vec![t.cos(), t.sin()], w))
            .collect(),
        3 => {
            let polar = gauss::composite(0.0, PI, s, 8);
            let az = gauss::trapezoid_periodic(16 * s);
            let mut out = Vec::with_capacity(polar.len() * az.len());
            for &(th, wt) in &polar {
                for &(ph, wp) in &az {
                    out.push((
                        vec![th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()],
                        wt * wp * th.sin(),
                    ));
                }
            }
            out
        }
        4 => {
            // Hopf coordinates: dS = sin(eta) cos(eta) d eta d xi1 d xi2
            let eta = gauss::composite(0.0, PI / 2.0, s, 4);
            let xi = gauss::trapezoid_periodic(8 * s);
            let mut out = Vec::with_capacity(eta.len() * xi.len() * xi.len());
            for &(e, we) in &eta {
                let (se, ce) = e.sin_cos();
                for &(a, wa) in &xi {
                    for &(b, wb) in &xi {
                        out.push((
                            vec![ce * a.cos(), ce * a.sin(), se * b.cos(), se * b.sin()],
                            we * wa * wb * se * ce,
                        ));
                    }
                }
            }
            out
        }
        _ => return Err(Error::Unsupported(format!("sphere rule in dimension {m}"))),
    })
}

impl Domain {
    pub fn unit_ball(n: usize) -> Domain {
        make_domain(&DomainSpec::Ball {
            center: vec![0.0; 2 * n],
            radius: 1.0,
        })
        .expect("unit ball is valid")
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    /// Real dimension `m`.
    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Ellipsoid { center, .. } => center.len(),
            Shape::Box { lo, .. } | Shape::HalfSpace { lo, .. } => lo.len(),
        }
    }

    pub fn diameter(&self) -> f64 {
        match &self.shape {
            Shape::Ellipsoid { axes, .. } => 2.0 * axes.iter().cloned().fold(0.0, f64::max),
            Shape::Box { lo, hi } | Shape::HalfSpace { lo, hi } => {
                norm(&lo.iter().zip(hi).map(|(a, b)| b - a).collect::<Vec<_>>())
            }
        }
    }

    /// Nominal node spacing at `level`.
    pub fn spacing(&self, level: usize) -> f64 {
        self.diameter() / (16.0 * (1u64 << level) as f64)
    }

    /// Default singular exclusion radius: twice the spacing.
    pub fn default_exclusion(&self, level: usize) -> f64 {
        2.0 * self.spacing(level)
    }

    fn ellipsoid_rho(center: &[f64], axes: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
        let mut rho = -1.0;
        let mut grad = vec![0.0; x.len()];
        for i in 0..x.len() {
            let u = (x[i] - center[i]) / axes[i];
            rho += u * u;
            grad[i] = 2.0 * u / axes[i];
        }
        (rho, grad)
    }

    /// Normalized defining function: `D = {r < 0}` and `|grad r| = 1` on `bD`.
    pub fn r(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ellipsoid { center, axes } => {
                if self.kind == DomainKind::Ball {
                    let d: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
                    return norm(&d) - axes[0];
                }
                let (rho, g) = Self::ellipsoid_rho(center, axes, x);
                let gn = norm(&g);
                if gn == 0.0 {
                    -axes.iter().cloned().fold(f64::INFINITY, f64::min)
                } else {
                    rho / gn
                }
            }
            Shape::Box { lo, hi } => (0..lo.len())
                .map(|i| (lo[i] - x[i]).max(x[i] - hi[i]))
                .fold(f64::NEG_INFINITY, f64::max),
            Shape::HalfSpace { .. } => x[0],
        }
    }

    pub fn grad_r(&self, x: &[f64]) -> Vec<f64> {
        let m = self.dim();
        match &self.shape {
            Shape::Ellipsoid { center, axes } => {
                if self.kind == DomainKind::Ball {
                    let d: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
                    let nd = norm(&d);
                    if nd == 0.0 {
                        let mut e = vec![0.0; m];
                        e[0] = 1.0;
                        return e;
                    }
                    return d.iter().map(|v| v / nd).collect();
                }
                let (rho, g) = Self::ellipsoid_rho(center, axes, x);
                let gn = norm(&g);
                if gn == 0.0 {
                    return vec![0.0; m];
                }
                // grad(rho/|g|) with grad|g| = H g / |g|, H = diag(2/a_i^2)
                (0..m)
                    .map(|i| {
                        let dgn = 2.0 / (axes[i] * axes[i]) * g[i] / gn;
                        (g[i] * gn - rho * dgn) / (gn * gn)
                    })
                    .collect()
            }
            Shape::Box { lo, hi } => {
                let mut best = (f64::NEG_INFINITY, 0, 0.0);
                for i in 0..m {
                    if lo[i] - x[i] > best.0 {
                        best = (lo[i] - x[i], i, -1.0);
                    }
                    if x[i] - hi[i] > best.0 {
                        best = (x[i] - hi[i], i, 1.0);
                    }
                }
                let mut e = vec![0.0; m];
                e[best.1] = best.2;
                e
            }
            Shape::HalfSpace { .. } => {
                let mut e = vec![0.0; m];
                e[0] = 1.0;
                e
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.r(x) < 0.0
    }

    pub fn boundary_frame(&self, point: &[f64]) -> Result<BoundaryFrame> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "point of length {} in R^{}",
                point.len(),
                self.dim()
            )));
        }
        let r = self.r(point);
        if r.abs() > BOUNDARY_TOL * self.diameter().max(1.0) {
            return Err(Error::OffBoundary(r));
        }
        let g = self.grad_r(point);
        let gn = norm(&g);
        let nu: Vec<f64> = g.iter().map(|v| v / gn).collect();
        Ok(BoundaryFrame {
            point: point.to_vec(),
            nu_flat: nu.clone(),
            nu,
            ds_weight: gn,
        })
    }

    /// Euclidean distance to the boundary; for ellipsoids `|r(y)|`, which
    /// agrees with the distance to first order near `bD`.
    pub fn dist_boundary(&self, y: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ellipsoid { .. } => self.r(y).abs(),
            Shape::Box { lo, hi } => (0..lo.len())
                .map(|i| (y[i] - lo[i]).abs().min((hi[i] - y[i]).abs()))
                .fold(f64::INFINITY, f64::min),
            Shape::HalfSpace { .. } => y[0].abs(),
        }
    }

    /// Nested quadrature rule at `level`.
    ///
    /// Interior rules on balls/ellipsoids are polar rules centred at the
    /// exclusion center (or the domain center), so no node lies within the
    /// exclusion radius and the rule varies smoothly with the center. Box
    /// rules are tensor Gauss-Legendre; exclusion filters nodes.
    pub fn quadrature(&self, region: Region, level: usize, exclusion: Option<Exclusion>) -> Result<QuadratureRule> {
        let spacing = self.spacing(level);
        let mut rule = match (&self.shape, region) {
            (Shape::Ellipsoid { center, axes }, Region::Boundary) => self.ellipsoid_boundary(center, axes, level)?,
            (Shape::Ellipsoid { center, axes }, Region::Interior) => {
                let (c, rho) = match &exclusion {
                    Some(e) => (e.center.clone(), e.radius),
                    None => (center.clone(), 0.0),
                };
                if c.len() != center.len() {
                    return Err(Error::DimensionMismatch("exclusion center".into()));
                }
                if !self.contains(&c) {
                    return Err(Error::NotInterior(self.r(&c)));
                }
                self.polar_interior(center, axes, &c, rho, level)?
            }
            (Shape::Box { lo, hi }, Region::Interior) | (Shape::HalfSpace { lo, hi }, Region::Interior) => {
                box_interior(lo, hi, level)
            }
            (Shape::Box { lo, hi }, Region::Boundary) => box_boundary(lo, hi, level, false),
            (Shape::HalfSpace { lo, hi }, Region::Boundary) => box_boundary(lo, hi, level, true),
        };
        rule.level = level;
        rule.spacing = spacing;
        if let Some(e) = &exclusion {
            if region == Region::Interior {
                let keep: Vec<bool> = rule
                    .nodes
                    .iter()
                    .map(|x| norm(&x.iter().zip(&e.center).map(|(a, b)| a - b).collect::<Vec<_>>()) >= e.radius)
                    .collect();
                let mut k = keep.iter();
                rule.nodes.retain(|_| *k.next().unwrap());
                let mut k = keep.iter();
                rule.weights.retain(|_| *k.next().unwrap());
            }
            rule.exclusion = Some(e.clone());
        }
        Ok(rule)
    }

    fn ellipsoid_boundary(&self, center: &[f64], axes: &[f64], level: usize) -> Result<QuadratureRule> {
        let m = center.len();
        let vol: f64 = axes.iter().product();
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut normals = Vec::new();
        for (w_dir, wt) in sphere_rule(m, level)? {
            let x: Vec<f64> = (0..m).map(|i| center[i] + axes[i] * w_dir[i]).collect();
            // surface element of x = c + A w: det(A) |A^{-1} w| dS_sphere
            let ainv: Vec<f64> = (0..m).map(|i| w_dir[i] / axes[i]).collect();
            let an = norm(&ainv);
            let weight = if m == 1 { wt } else { wt * vol * an };
            normals.push(ainv.iter().map(|v| v / an).collect());
            nodes.push(x);
            weights.push(weight);
        }
        Ok(QuadratureRule {
            region: Region::Boundary,
            level,
            nodes,
            weights,
            normals: Some(normals),
            exclusion: None,
            spacing: 0.0,
        })
    }

    fn polar_interior(&self, center: &[f64], axes: &[f64], z: &[f64], rho: f64, level: usize) -> Result<QuadratureRule> {
        let m = center.len();
        let panels = 1usize << level;
        let grading = level + 2;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (w_dir, wt) in sphere_rule(m, level)? {
            // exit distance along z + t w: solve sum ((d_i + t w_i)/a_i)^2 = 1
            let (mut qa, mut qb, mut qc) = (0.0, 0.0, -1.0);
            for i in 0..m {
                let d = (z[i] - center[i]) / axes[i];
                let w = w_dir[i] / axes[i];
                qa += w * w;
                qb += 2.0 * d * w;
                qc += d * d;
            }
            let t_exit = (-qb + (qb * qb - 4.0 * qa * qc).sqrt()) / (2.0 * qa);
            if t_exit <= rho {
                return Err(Error::DegenerateDomain(format!(
                    "exclusion radius {rho} reaches the boundary"
                )));
            }
            let breaks = gauss::graded_breaks(rho, t_exit, panels, grading);
            for (t, w) in gauss::on_breaks(&breaks, 8) {
                nodes.push((0..m).map(|i| z[i] + t * w_dir[i]).collect());
                weights.push(wt * w * t.powi(m as i32 - 1));
            }
        }
        Ok(QuadratureRule {
            region: Region::Interior,
            level,
            nodes,
            weights,
            normals: None,
            exclusion: None,
            spacing: 0.0,
        })
    }

    /// Pullback of a form value at a boundary frame to the tangent space,
    /// expressed in the coframe dual to [`tangent_basis`].
    pub fn pullback_boundary(&self, form: &FormValue, frame: &BoundaryFrame) -> Result<TangentialValue> {
        pullback(form, frame)
    }
}

/// Orthonormal tangent basis with `det[nu, T_1, ..., T_{m-1}] = +1`.
pub fn tangent_basis(nu: &[f64]) -> Vec<Vec<f64>> {
    let m = nu.len();
    let mut basis: Vec<Vec<f64>> = vec![nu.to_vec()];
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| nu[a].abs().total_cmp(&nu[b].abs()));
    for &k in &order {
        if basis.len() == m {
            break;
        }
        let mut v = vec![0.0; m];
        v[k] = 1.0;
        for b in &basis {
            let c = dot(&v, b);
            for i in 0..m {
                v[i] -= c * b[i];
            }
        }
        let vn = norm(&v);
        if vn > 1e-8 {
            basis.push(v.iter().map(|x| x / vn).collect());
        }
    }
    if det(basis.clone()) < 0.0 {
        let last = basis.len() - 1;
        for x in basis[last].iter_mut() {
            *x = -*x;
        }
    }
    basis.remove(0);
    basis
}

/// Pullback via the real-coordinate expansion `dz = dx + i dy`.
pub fn pullback(form: &FormValue, frame: &BoundaryFrame) -> Result<TangentialValue> {
    let m = frame.nu.len();
    if m != 2 * form.n {
        return Err(Error::DimensionMismatch(format!(
            "form on C^{} at a point of R^{m}",
            form.n
        )));
    }
    let t = tangent_basis(&frame.nu);
    let real = form.to_real();
    let degree = real.keys().next().map_or(0, |b| b.count_ones() as usize);
    if real.keys().any(|b| b.count_ones() as usize != degree) {
        return Err(Error::Unsupported("pullback of a form of mixed degree".into()));
    }
    let mut coefficients = Vec::new();
    if degree > m - 1 {
        return Ok(TangentialValue { degree, coefficients });
    }
    for subset in crate::exterior::MultiIndex::all(m - 1, degree) {
        let idx: Vec<usize> = subset.entries().iter().map(|k| k - 1).collect();
        let mut acc = C64::new(0.0, 0.0);
        for (bits, c) in &real {
            let coords: Vec<usize> = (0..m).filter(|b| bits & (1 << b) != 0).collect();
            let mat: Vec<Vec<f64>> = coords
                .iter()
                .map(|&s| idx.iter().map(|&a| t[a][s]).collect())
                .collect();
            let d = if degree == 0 { 1.0 } else { det(mat) };
            acc += c * d;
        }
        coefficients.push((idx, acc));
    }
    Ok(TangentialValue { degree, coefficients })
}

/// Density of a top-degree boundary form with respect to `dS`
/// (the outward-normal-first orientation).
pub fn boundary_density(form: &FormValue, frame: &BoundaryFrame) -> Result<C64> {
    let m = frame.nu.len();
    if form.is_zero() {
        return Ok(C64::new(0.0, 0.0));
    }
    let tv = pullback(form, frame)?;
    if tv.degree != m - 1 {
        return Err(Error::Unsupported(format!(
            "boundary density of a {}-form in R^{m}",
            tv.degree
        )));
    }
    Ok(tv.coefficients[0].1)
}

fn box_interior(lo: &[f64], hi: &[f64], level: usize) -> QuadratureRule {
    let axes: Vec<Vec<(f64, f64)>> = lo
        .iter()
        .zip(hi)
        .map(|(&a, &b)| gauss::composite(a, b, 1 << level, 8))
        .collect();
    let (nodes, weights) = tensor(&axes);
    QuadratureRule {
        region: Region::Interior,
        level,
        nodes,
        weights,
        normals: None,
        exclusion: None,
        spacing: 0.0,
    }
}

fn tensor(axes: &[Vec<(f64, f64)>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut nodes = vec![Vec::new()];
    let mut weights = vec![1.0];
    for ax in axes {
        let mut nn = Vec::with_capacity(nodes.len() * ax.len());
        let mut nw = Vec::with_capacity(nodes.len() * ax.len());
        for (x, w) in nodes.iter().zip(&weights) {
            for &(t, v) in ax {
                let mut y = x.clone();
                y.push(t);
                nn.push(y);
                nw.push(w * v);
            }
        }
        nodes = nn;
        weights = nw;
    }
    (nodes, weights)
}

fn box_boundary(lo: &[f64], hi: &[f64], level: usize, only_x1_face: bool) -> QuadratureRule {
    let m = lo.len();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut normals = Vec::new();
    for i in 0..m {
        for (side, value) in [(-1.0, lo[i]), (1.0, hi[i])] {
            if only_x1_face && !(i == 0 && side > 0.0) {
                continue;
            }
            let axes: Vec<Vec<(f64, f64)>> = (0..m)
                .filter(|&k| k != i)
                .map(|k| gauss::composite(lo[k], hi[k], 1 << level, 8))
                .collect();
            let (face_nodes, face_weights) = tensor(&axes);
            for (y, w) in face_nodes.into_iter().zip(face_weights) {
                let mut x = y;
                x.insert(i, value);
                nodes.push(x);
                weights.push(w);
                let mut nu = vec![0.0; m];
                nu[i] = side;
                normals.push(nu);
            }
        }
    }
    QuadratureRule {
        region: Region::Boundary,
        level,
        nodes,
        weights,
        normals: Some(normals),
        exclusion: None,
        spacing: 0.0,
    }
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate<F: Fn(&[f64]) -> C64>(&self, f: F) -> C64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| f(x) * *w)
            .sum()
    }

    pub fn integrate_real<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| f(x) * w).sum()
    }

    /// Boundary frame at node `k` of a boundary rule.
    pub fn frame(&self, k: usize) -> Option<BoundaryFrame> {
        let nu = self.normals.as_ref()?.get(k)?.clone();
        Some(BoundaryFrame {
            point: self.nodes[k].clone(),
            nu_flat: nu.clone(),
            nu,
            ds_weight: 1.0,
        })
    }

    /// CSV with columns `x1..xm,weight` (plus `nu1..num` on boundary rules).
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let m = self.nodes.first().map_or(0, Vec::len);
        let mut header: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
        header.push("weight".into());
        if self.normals.is_some() {
            header.extend((1..=m).map(|i| format!("nu{i}")));
        }
        writeln!(out, "{}", header.join(","))?;
        for (k, (x, w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            let mut row: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            row.push(w.to_string());
            if let Some(ns) = &self.normals {
                row.extend(ns[k].iter().map(|v| v.to_string()));
            }
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Surface area of the unit sphere `S^{m-1}`.
pub fn unit_sphere_area(m: usize) -> f64 {
    match m {
        1 => 2.0,
        2 => TAU,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        _ => {
            let h = m as f64 / 2.0;
            2.0 * PI.powf(h) / gamma_half_integer(m)
        }
    }
}

/// `Gamma(m/2)` for integer `m >= 1`.
pub fn gamma_half_integer(m: usize) -> f64 {
    if m == 1 {
        return PI.sqrt();
    }
    if m == 2 {
        return 1.0;
    }
    (m as f64 / 2.0 - 1.0) * gamma_half_integer(m - 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::MultiIndex;

    #[test]
    fn ball_defining_function() {
        let d = Domain::unit_ball(1);
        let x = [0.6, -0.8];
        let f = d.boundary_frame(&x).unwrap();
        assert!((f.nu[0] - 0.6).abs() < 1e-15 && (f.nu[1] + 0.8).abs() < 1e-15);
        assert!(d.boundary_frame(&[0.5, 0.0]).is_err());
        assert_eq!(d.dist_boundary(&[0.0, 0.0]), 1.0);
        assert!((d.dist_boundary(&[0.75, 0.0]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn interval_boundary() {
        let d = make_domain(&DomainSpec::IntervalBox { lo: vec![-1.0], hi: vec![0.0] }).unwrap();
        let rule = d.quadrature(Region::Boundary, 0, None).unwrap();
        assert_eq!(rule.nodes, vec![vec![-1.0], vec![0.0]]);
        assert_eq!(rule.normals.unwrap(), vec![vec![-1.0], vec![1.0]]);
    }

    #[test]
    fn box_distance() {
        let d = make_domain(&DomainSpec::IntervalBox {
            lo: vec![-1.0, -1.0, -1.0],
            hi: vec![0.0, 1.0, 1.0],
        })
        .unwrap();
        assert!((d.dist_boundary(&[-0.1, 0.2, 0.3]) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn ellipsoid_normalization() {
        let d = make_domain(&DomainSpec::Ellipsoid {
            center: vec![0.1, 0.0],
            axes: vec![2.0, 0.5],
        })
        .unwrap();
        let rule = d.quadrature(Region::Boundary, 5, None).unwrap();
        for x in &rule.nodes {
            let g = d.grad_r(x);
            assert!((norm(&g) - 1.0).abs() < 1e-10);
        }
        // perimeter of the ellipse, reference from a fine trapezoid sum
        let fine: f64 = gauss::trapezoid_periodic(20000)
            .iter()
            .map(|(t, w)| w * (4.0 * t.sin().powi(2) + 0.25 * t.cos().powi(2)).sqrt())
            .sum();
        assert!((rule.total_weight() - fine).abs() < 1e-9);
    }

    #[test]
    fn degenerate_parameters_rejected() {
        assert!(make_domain(&DomainSpec::Ball { center: vec![0.0; 2], radius: 0.0 }).is_err());
        assert!(make_domain(&DomainSpec::IntervalBox { lo: vec![0.0], hi: vec![0.0] }).is_err());
        assert!(make_domain(&DomainSpec::HalfSpacePatch { lo: vec![-1.0, -1.0], hi: vec![0.5, 1.0] }).is_err());
    }

    #[test]
    fn tangent_basis_orientation() {
        let t = tangent_basis(&[1.0, 0.0]);
        assert_eq!(t, vec![vec![0.0, 1.0]]);
        let nu = [0.5, 0.5, 0.5, 0.5];
        let t = tangent_basis(&nu);
        let mut m = vec![nu.to_vec()];
        m.extend(t.clone());
        assert!((det(m) - 1.0).abs() < 1e-12);
        for a in &t {
            assert!(dot(a, &nu).abs() < 1e-14);
        }
    }

    #[test]
    fn pullback_of_dr_vanishes() {
        // dr = sum nu_j dx_j expressed through dz, dzbar
        let d = Domain::unit_ball(2);
        let x = [0.5, -0.5, 0.5, 0.5];
        let f = d.boundary_frame(&x).unwrap();
        let mut dr = FormValue::zero(2);
        for k in 0..2 {
            // dx = (dz + dzbar)/2, dy = (dz - dzbar)/(2i)
            let a = C64::new(f.nu[2 * k], 0.0) * 0.5 + C64::new(0.0, -0.5) * f.nu[2 * k + 1];
            let b = C64::new(f.nu[2 * k], 0.0) * 0.5 + C64::new(0.0, 0.5) * f.nu[2 * k + 1];
            dr.add_term((MultiIndex::single(k + 1), MultiIndex::empty()), a);
            dr.add_term((MultiIndex::empty(), MultiIndex::single(k + 1)), b);
        }
        assert!(d.pullback_boundary(&dr, &f).unwrap().max_abs() < 1e-15);
    }
}
