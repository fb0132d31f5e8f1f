//! The Bochner-Martinelli-Koppelman kernel
//!
//! `B_nq(ζ,z) = (n-1)!/(2^{q+1} π^n) |ζ-z|^{-2n}
//!     Σ_{j,J,|L|=q+1} ε^L_{jJ} (conj ζ_j - conj z_j) (*dζ^L) ∧ dzbar^J`
//!
//! and the operators `B^D_q g(z) = ∫_D g ∧ B_nq(·,z)` and
//! `B^{bD}_q f(z) = ∫_{bD} f ∧ B_nq(·,z)`.

use crate::error::{Error, Result};
use crate::exterior::{eps_sign, DifferentialForm, FormValue, MultiIndex};
use crate::field::Field;
use crate::geometry::{Domain, Exclusion, Region};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// `(n-1)! / (2^{q+1} π^n)`, zero for `q = -1`.
pub fn kernel_constant(n: usize, q: isize) -> f64 {
    if q < 0 {
        return 0.0;
    }
    let fact: f64 = (1..n).map(|k| k as f64).product();
    fact / (2f64.powi(q as i32 + 1) * PI.powi(n as i32))
}

/// Kernel value at `(ζ, z)`: for each `J` with `|J| = q`, the `(n, n-q-1)`-form
/// in `ζ` multiplying `dzbar^J`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelValue {
    pub n: usize,
    pub q: isize,
    pub components: Vec<(MultiIndex, FormValue)>,
}

impl KernelValue {
    /// Hermitian norm of the double form.
    pub fn norm(&self) -> f64 {
        let s: f64 = self
            .components
            .iter()
            .map(|(j, v)| v.norm().powi(2) * 2f64.powi(j.len() as i32))
            .sum();
        s.sqrt()
    }
}

fn complex_diff(zeta: &[f64], z: &[f64]) -> Vec<C64> {
    (0..zeta.len() / 2)
        .map(|k| C64::new(zeta[2 * k] - z[2 * k], zeta[2 * k + 1] - z[2 * k + 1]))
        .collect()
}

/// Direct evaluation of the kernel from its definition.
pub fn kernel_eval(n: usize, q: isize, zeta: &[f64], z: &[f64]) -> Result<KernelValue> {
    if zeta.len() != 2 * n || z.len() != 2 * n {
        return Err(Error::DimensionMismatch(format!("points must lie in R^{}", 2 * n)));
    }
    if q < -1 || q > n as isize {
        return Err(Error::InvalidBidegree {
            p: 0,
            q: q.max(0) as usize,
            n,
        });
    }
    if q < 0 || q as usize >= n {
        // B_{n,-1} = 0, and |L| = q+1 > n leaves no terms
        return Ok(KernelValue {
            n,
            q,
            components: Vec::new(),
        });
    }
    let w = complex_diff(zeta, z);
    let r2: f64 = w.iter().map(|c| c.norm_sqr()).sum();
    if r2 == 0.0 {
        return Err(Error::Singular);
    }
    let scale = kernel_constant(n, q) / r2.powi(n as i32);
    let qu = q as usize;
    let mut components = Vec::new();
    for jset in MultiIndex::all(n, qu) {
        let mut form = FormValue::zero(n);
        for l in MultiIndex::all(n, qu + 1) {
            let star_l = FormValue::basis(n, l, MultiIndex::empty()).star();
            for j in 1..=n {
                let mut list = vec![j];
                list.extend(jset.entries());
                let s = eps_sign(&l.entries(), &list);
                if s == 0 {
                    continue;
                }
                form = form.add(&star_l.scale(w[j - 1].conj() * (s as f64 * scale)));
            }
        }
        components.push((jset, form));
    }
    Ok(KernelValue { n, q, components })
}

/// Precomputed sign and density tables for fast quadrature of `g ∧ B` and
/// `f_b ∧ B`.
#[derive(Clone, Debug)]
pub struct KernelTables {
    pub n: usize,
    pub q: usize,
    pub js: Vec<MultiIndex>,
    pub ls: Vec<MultiIndex>,
    /// `(I, |I| = q)` index sets for boundary data.
    pub is: Vec<MultiIndex>,
    /// Per `J`: `(j (0-based), index of L, sign)`.
    pub terms: Vec<Vec<(usize, usize, f64)>>,
    /// `top_density(dzbar^K ∧ *dz^L)` for `K, L` in `ls`.
    pub volume: Vec<Vec<C64>>,
    /// `top_density(dzbar_k ∧ dzbar^I ∧ *dz^L)` indexed `[k][I][L]`.
    pub boundary: Vec<Vec<Vec<C64>>>,
    pub constant: f64,
}

impl KernelTables {
    pub fn new(n: usize, q: usize) -> Result<Self> {
        if q >= n {
            return Err(Error::InvalidBidegree { p: 0, q: q + 1, n });
        }
        let js = MultiIndex::all(n, q);
        let ls = MultiIndex::all(n, q + 1);
        let is = MultiIndex::all(n, q);
        let terms = js
            .iter()
            .map(|jset| {
                let mut t = Vec::new();
                for (li, l) in ls.iter().enumerate() {
                    for j in 1..=n {
                        let mut list = vec![j];
                        list.extend(jset.entries());
                        let s = eps_sign(&l.entries(), &list);
                        if s != 0 {
                            t.push((j - 1, li, s as f64));
                        }
                    }
                }
                t
            })
            .collect();
        let stars: Vec<FormValue> = ls
            .iter()
            .map(|l| FormValue::basis(n, *l, MultiIndex::empty()).star())
            .collect();
        let mut volume = Vec::new();
        for k in &ls {
            let gk = FormValue::basis(n, MultiIndex::empty(), *k);
            volume.push(
                stars
                    .iter()
                    .map(|s| gk.wedge(s).top_density())
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let mut boundary = Vec::new();
        for k in 1..=n {
            let dk = FormValue::basis(n, MultiIndex::empty(), MultiIndex::single(k));
            let mut per_i = Vec::new();
            for i in &is {
                let di = dk.wedge(&FormValue::basis(n, MultiIndex::empty(), *i));
                per_i.push(
                    stars
                        .iter()
                        .map(|s| {
                            let w = di.wedge(s);
                            if w.is_zero() {
                                Ok(ZERO)
                            } else {
                                w.top_density()
                            }
                        })
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            boundary.push(per_i);
        }
        Ok(KernelTables {
            n,
            q,
            js,
            ls,
            is,
            terms,
            volume,
            boundary,
            constant: kernel_constant(n, q as isize),
        })
    }

    /// Density of `g(ζ) ∧ B(ζ, z)` per `J`, given `g` coefficients in `ls` order.
    pub fn volume_density(&self, g: &[C64], w: &[C64], out: &mut [C64]) {
        let r2: f64 = w.iter().map(|c| c.norm_sqr()).sum();
        let scale = self.constant / r2.powi(self.n as i32);
        let gl: Vec<C64> = (0..self.ls.len())
            .map(|l| g.iter().zip(&self.volume).map(|(gk, row)| gk * row[l]).sum())
            .collect();
        for (ji, t) in self.terms.iter().enumerate() {
            let mut acc = ZERO;
            for &(j, l, s) in t {
                acc += w[j].conj() * gl[l] * s;
            }
            out[ji] = acc * scale;
        }
    }

    /// Density of `f(ζ) ∧ B(ζ, z)` with respect to `dS` at a boundary point
    /// with outward normal `nu`, given `f` coefficients in `is` order.
    pub fn boundary_density(&self, f: &[C64], nu: &[f64], w: &[C64], out: &mut [C64]) {
        let r2: f64 = w.iter().map(|c| c.norm_sqr()).sum();
        let scale = self.constant / r2.powi(self.n as i32);
        // dbar r = sum_k (nu_{2k} + i nu_{2k+1})/2 dzbar_k
        let rk: Vec<C64> = (0..self.n)
            .map(|k| C64::new(0.5 * nu[2 * k], 0.5 * nu[2 * k + 1]))
            .collect();
        let mut fl = vec![ZERO; self.ls.len()];
        for (k, rkv) in rk.iter().enumerate() {
            for (ii, fi) in f.iter().enumerate() {
                if *fi == ZERO {
                    continue;
                }
                for (l, v) in self.boundary[k][ii].iter().enumerate() {
                    fl[l] += rkv * fi * v;
                }
            }
        }
        for (ji, t) in self.terms.iter().enumerate() {
            let mut acc = ZERO;
            for &(j, l, s) in t {
                acc += w[j].conj() * fl[l] * s;
            }
            out[ji] = acc * scale;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularQuadratureConfig {
    pub base_level: usize,
    /// Exclusion radius in units of the node spacing.
    pub exclusion_factor: f64,
    pub refinement_steps: usize,
}

impl Default for SingularQuadratureConfig {
    fn default() -> Self {
        SingularQuadratureConfig {
            base_level: 0,
            exclusion_factor: 2.0,
            refinement_steps: 2,
        }
    }
}

impl SingularQuadratureConfig {
    pub fn levels(&self) -> std::ops::RangeInclusive<usize> {
        self.base_level..=self.base_level + self.refinement_steps
    }

    pub fn finest_level(&self) -> usize {
        self.base_level + self.refinement_steps
    }
}

/// Volume operator evaluated over a refinement ladder.
#[derive(Clone, Debug)]
pub struct VolumeEvaluation {
    pub z: Vec<f64>,
    /// Richardson-extrapolated value (order 2 in the exclusion radius,
    /// reported, not claimed exact).
    pub value: FormValue,
    pub finest: FormValue,
    pub levels: Vec<usize>,
    pub values: Vec<FormValue>,
    /// `|value(L+1) - value(L)|` in the Hermitian norm.
    pub deltas: Vec<f64>,
    /// The exclusion ball at the base level reached the boundary and was shrunk.
    pub near_boundary: bool,
}

fn gather(form: &DifferentialForm, sets: &[MultiIndex]) -> Vec<Field> {
    let n = form.n();
    sets.iter()
        .map(|k| {
            form.terms()
                .find(|((i, j), _)| i.is_empty() && j == k)
                .map(|(_, f)| f.clone())
                .unwrap_or_else(|| Field::zero(2 * n))
        })
        .collect()
}

fn to_form_value(n: usize, js: &[MultiIndex], vals: &[C64]) -> FormValue {
    let mut v = FormValue::zero(n);
    for (j, c) in js.iter().zip(vals) {
        v.add_term((MultiIndex::empty(), *j), *c);
    }
    v
}

fn require_complex_domain(domain: &Domain, n: usize) -> Result<()> {
    if domain.dim() != 2 * n {
        return Err(Error::DimensionMismatch(format!(
            "form on C^{n} over a domain in R^{}",
            domain.dim()
        )));
    }
    Ok(())
}

/// Exclusion radius at `level`, shrunk to half the distance to the boundary
/// when necessary (second value reports the shrink).
fn exclusion_radius(domain: &Domain, z: &[f64], level: usize, factor: f64) -> (f64, bool) {
    let rho = factor * domain.spacing(level);
    let d = domain.dist_boundary(z);
    if rho >= d {
        (0.5 * d, true)
    } else {
        (rho, false)
    }
}

/// `B^D_q g(z)` at one level with a given exclusion radius.
pub fn volume_at_level(g: &DifferentialForm, z: &[f64], domain: &Domain, level: usize, rho: f64) -> Result<FormValue> {
    let n = g.n();
    require_complex_domain(domain, n)?;
    let bq = g.bidegree();
    if bq.p != 0 || bq.q == 0 {
        return Err(Error::BidegreeMismatch {
            expected: "(0,q+1) with q >= 0".into(),
            found: bq.to_string(),
        });
    }
    let q = bq.q - 1;
    let tables = KernelTables::new(n, q)?;
    let coeffs = gather(g, &tables.ls);
    let rule = domain.quadrature(
        Region::Interior,
        level,
        Some(Exclusion {
            center: z.to_vec(),
            radius: rho,
        }),
    )?;
    let mut acc = vec![ZERO; tables.js.len()];
    let mut out = vec![ZERO; tables.js.len()];
    let mut gv = vec![ZERO; coeffs.len()];
    for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
        let mut any = false;
        for (k, c) in coeffs.iter().enumerate() {
            gv[k] = c.eval(x);
            any |= gv[k] != ZERO;
        }
        if !any {
            continue;
        }
        let w = complex_diff(x, z);
        tables.volume_density(&gv, &w, &mut out);
        for (a, o) in acc.iter_mut().zip(&out) {
            *a += o * *wt;
        }
    }
    Ok(to_form_value(n, &tables.js, &acc))
}

/// `B^D_q g(z)` over the configured refinement ladder.
pub fn op_volume(g: &DifferentialForm, z: &[f64], domain: &Domain, config: &SingularQuadratureConfig) -> Result<VolumeEvaluation> {
    if !domain.contains(z) {
        return Err(Error::NotInterior(domain.r(z)));
    }
    let mut values = Vec::new();
    let mut levels = Vec::new();
    let mut near_boundary = false;
    for level in config.levels() {
        let (rho, shrunk) = exclusion_radius(domain, z, level, config.exclusion_factor);
        near_boundary |= shrunk && level == config.base_level;
        values.push(volume_at_level(g, z, domain, level, rho)?);
        levels.push(level);
    }
    let deltas: Vec<f64> = values
        .windows(2)
        .map(|p| p[1].add(&p[0].scale(C64::new(-1.0, 0.0))).norm())
        .collect();
    let finest = values.last().cloned().expect("at least one level");
    let value = if values.len() >= 2 {
        let prev = &values[values.len() - 2];
        // exclusion error ~ rho^2 and rho halves per level
        finest.add(&finest.add(&prev.scale(C64::new(-1.0, 0.0))).scale(C64::new(1.0 / 3.0, 0.0)))
    } else {
        finest.clone()
    };
    Ok(VolumeEvaluation {
        z: z.to_vec(),
        value,
        finest,
        levels,
        values,
        deltas,
        near_boundary,
    })
}

/// `B^{bD}_q f_b(z)` by boundary quadrature at `level`; `f_b` is an ambient
/// `(0,q)`-form whose restriction is used.
pub fn op_boundary(f_b: &DifferentialForm, z: &[f64], domain: &Domain, level: usize) -> Result<FormValue> {
    let n = f_b.n();
    require_complex_domain(domain, n)?;
    if !domain.contains(z) {
        return Err(Error::NotInterior(domain.r(z)));
    }
    let bq = f_b.bidegree();
    if bq.p != 0 {
        return Err(Error::BidegreeMismatch {
            expected: "(0,q)".into(),
            found: bq.to_string(),
        });
    }
    let q = bq.q;
    if q >= n {
        // f_b ∧ *dζ^L needs |L| = q+1 <= n
        return Ok(FormValue::zero(n));
    }
    let tables = KernelTables::new(n, q)?;
    let coeffs = gather(f_b, &tables.is);
    let rule = domain.quadrature(Region::Boundary, level, None)?;
    let normals = rule.normals.as_ref().expect("boundary rule has normals");
    let mut acc = vec![ZERO; tables.js.len()];
    let mut out = vec![ZERO; tables.js.len()];
    let mut fv = vec![ZERO; coeffs.len()];
    for (k, (x, wt)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        for (i, c) in coeffs.iter().enumerate() {
            fv[i] = c.eval(x);
        }
        let w = complex_diff(x, z);
        tables.boundary_density(&fv, &normals[k], &w, &mut out);
        for (a, o) in acc.iter_mut().zip(&out) {
            *a += o * *wt;
        }
    }
    Ok(to_form_value(n, &tables.js, &acc))
}

/// `dbar_z` of the potential `z -> B^D_{q-1} f(z)` by centered differences
/// with step `h`.
pub fn potential_dbar(f: &DifferentialForm, z: &[f64], domain: &Domain, level: usize, rho: f64, h: f64) -> Result<FormValue> {
    let n = f.n();
    let q = f.bidegree().q;
    if q == 0 {
        return Ok(FormValue::zero(n));
    }
    let mut out = FormValue::zero(n);
    let mut zz = z.to_vec();
    for k in 0..n {
        let mut d = [FormValue::zero(n), FormValue::zero(n)];
        for (slot, axis) in [2 * k, 2 * k + 1].into_iter().enumerate() {
            zz[axis] = z[axis] + h;
            let plus = volume_at_level(f, &zz, domain, level, rho)?;
            zz[axis] = z[axis] - h;
            let minus = volume_at_level(f, &zz, domain, level, rho)?;
            zz[axis] = z[axis];
            d[slot] = plus.add(&minus.scale(C64::new(-1.0, 0.0))).scale(C64::new(0.5 / h, 0.0));
        }
        // d/dzbar_k = (d/dx + i d/dy)/2
        let dzb = d[0].add(&d[1].scale(C64::new(0.0, 1.0))).scale(C64::new(0.5, 0.0));
        out = out.add(&FormValue::basis(n, MultiIndex::empty(), MultiIndex::single(k + 1)).wedge(&dzb));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub z: Vec<f64>,
    pub residual: f64,
    pub boundary_term_norm: f64,
    pub volume_term_norm: f64,
    pub potential_dbar_norm: f64,
    pub level: usize,
    /// Too close to the boundary for the evaluation margin; values are NaN.
    pub excluded: bool,
}

/// `|f(z) - [B^{bD}_q f_b(z) - B^D_q(dbar f)(z) - dbar_z B^D_{q-1} f(z)]|`
/// per evaluation point and level.
///
/// Points with `dist(z, bD) < margin` are reported as excluded.
pub fn reproduce_residual(
    f: &DifferentialForm,
    f_b: &DifferentialForm,
    dbar_f: &DifferentialForm,
    domain: &Domain,
    points: &[Vec<f64>],
    margin: f64,
    config: &SingularQuadratureConfig,
) -> Result<Vec<ResidualRow>> {
    let n = f.n();
    require_complex_domain(domain, n)?;
    let q = f.bidegree().q;
    if f.bidegree().p != 0 || f_b.bidegree() != f.bidegree() || dbar_f.bidegree().p != 0 || dbar_f.bidegree().q != q + 1 {
        return Err(Error::BidegreeMismatch {
            expected: format!("f, f_b of bidegree (0,{q}) and dbar f of bidegree (0,{})", q + 1),
            found: format!("{}, {}, {}", f.bidegree(), f_b.bidegree(), dbar_f.bidegree()),
        });
    }
    let mut rows = Vec::new();
    for level in config.levels() {
        for z in points {
            if domain.dist_boundary(z) < margin || !domain.contains(z) {
                rows.push(ResidualRow {
                    z: z.clone(),
                    residual: f64::NAN,
                    boundary_term_norm: f64::NAN,
                    volume_term_norm: f64::NAN,
                    potential_dbar_norm: f64::NAN,
                    level,
                    excluded: true,
                });
                continue;
            }
            let (rho, _) = exclusion_radius(domain, z, level, config.exclusion_factor);
            let boundary = op_boundary(f_b, z, domain, level)?;
            let volume = if q < n {
                volume_at_level(dbar_f, z, domain, level, rho)?
            } else {
                FormValue::zero(n)
            };
            let pot = potential_dbar(f, z, domain, level, rho, rho)?;
            let rhs = boundary
                .add(&volume.scale(C64::new(-1.0, 0.0)))
                .add(&pot.scale(C64::new(-1.0, 0.0)));
            let residual = f.eval(z).add(&rhs.scale(C64::new(-1.0, 0.0))).norm();
            rows.push(ResidualRow {
                z: z.clone(),
                residual,
                boundary_term_norm: boundary.norm(),
                volume_term_norm: volume.norm(),
                potential_dbar_norm: pot.norm(),
                level,
                excluded: false,
            });
        }
    }
    Ok(rows)
}

/// Max residual over non-excluded points, per level of the ladder.
pub fn max_residual_per_level(rows: &[ResidualRow]) -> Vec<(usize, f64)> {
    let mut levels: Vec<usize> = rows.iter().map(|r| r.level).collect();
    levels.dedup();
    levels
        .into_iter()
        .map(|l| {
            let m = rows
                .iter()
                .filter(|r| r.level == l && !r.excluded)
                .map(|r| r.residual)
                .fold(0.0, f64::max);
            (l, m)
        })
        .collect()
}
