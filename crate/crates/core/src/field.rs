//! Scalar coefficient fields.
//!
//! Coefficients of forms and operators are complex-valued functions on
//! `R^m`. Polynomials are stored exactly (complex coefficients over real
//! monomials) so that `dbar(dbar f) = 0` and adjoint involutions can be
//! checked by exact equality. The remaining variants are closed under
//! differentiation, so every field except [`Field::Opaque`] has an analytic
//! derivative.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Polynomial in real variables `x_0 .. x_{m-1}` with complex coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "PolyRepr", try_from = "PolyRepr")]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u16>, C64>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    nvars: usize,
    terms: Vec<PolyTerm>,
}

#[derive(Serialize, Deserialize)]
struct PolyTerm {
    exponents: Vec<u16>,
    re: f64,
    im: f64,
}

impl From<Poly> for PolyRepr {
    fn from(p: Poly) -> Self {
        PolyRepr {
            nvars: p.nvars,
            terms: p
                .terms
                .into_iter()
                .map(|(exponents, c)| PolyTerm {
                    exponents,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<PolyRepr> for Poly {
    type Error = Error;

    fn try_from(r: PolyRepr) -> Result<Self> {
        let mut p = Poly::zero(r.nvars);
        for t in r.terms {
            if t.exponents.len() != r.nvars {
                return Err(Error::DimensionMismatch(format!(
                    "monomial has {} exponents, polynomial has {} variables",
                    t.exponents.len(),
                    r.nvars
                )));
            }
            p.accumulate(t.exponents, C64::new(t.re, t.im));
        }
        Ok(p)
    }
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C64) -> Self {
        let mut p = Poly::zero(nvars);
        p.accumulate(vec![0; nvars], c);
        p
    }

    pub fn monomial(exponents: Vec<u16>, c: C64) -> Self {
        let mut p = Poly::zero(exponents.len());
        p.accumulate(exponents, c);
        p
    }

    /// The coordinate `x_i` (0-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly::monomial(e, C64::new(1.0, 0.0))
    }

    /// `z_j = x_{2j} + i x_{2j+1}` in `C^n`, `j` 0-based.
    pub fn z(n: usize, j: usize) -> Self {
        &Poly::var(2 * n, 2 * j) + &Poly::var(2 * n, 2 * j + 1).scale(I)
    }

    /// `conj(z_j) = x_{2j} - i x_{2j+1}`.
    pub fn zbar(n: usize, j: usize) -> Self {
        &Poly::var(2 * n, 2 * j) - &Poly::var(2 * n, 2 * j + 1).scale(I)
    }

    /// `|x|^2` summed over all coordinates.
    pub fn norm_sq(nvars: usize) -> Self {
        let mut p = Poly::zero(nvars);
        for i in 0..nvars {
            let mut e = vec![0; nvars];
            e[i] = 2;
            p.accumulate(e, C64::new(1.0, 0.0));
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u16], C64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&k| k as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Constant value if the polynomial has degree zero.
    pub fn as_constant(&self) -> Option<C64> {
        match self.terms.len() {
            0 => Some(C64::new(0.0, 0.0)),
            1 => {
                let (e, c) = self.terms.iter().next()?;
                e.iter().all(|&k| k == 0).then_some(*c)
            }
            _ => None,
        }
    }

    fn accumulate(&mut self, exponents: Vec<u16>, c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exponents) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = *o.get() + c;
                if sum == C64::new(0.0, 0.0) {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: C64) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, v) in &self.terms {
            out.accumulate(e.clone(), v * c);
        }
        out
    }

    pub fn conj(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.conj())).collect(),
        }
    }

    /// Partial derivative along `x_i`.
    pub fn deriv(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            out.accumulate(d, c * e[i] as f64);
        }
        out
    }

    /// `d/dz_j = (d/dx - i d/dy) / 2`.
    pub fn dz(&self, j: usize) -> Poly {
        &self.deriv(2 * j).scale(C64::new(0.5, 0.0)) + &self.deriv(2 * j + 1).scale(C64::new(0.0, -0.5))
    }

    /// `d/dzbar_j = (d/dx + i d/dy) / 2`.
    pub fn dzbar(&self, j: usize) -> Poly {
        &self.deriv(2 * j).scale(C64::new(0.5, 0.0)) + &self.deriv(2 * j + 1).scale(C64::new(0.0, 0.5))
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = 1.0;
            for (xi, &k) in x.iter().zip(e) {
                if k != 0 {
                    m *= xi.powi(k as i32);
                }
            }
            acc += c * m;
        }
        acc
    }

    /// Compose with the affine shift `x -> x - center`.
    pub fn shifted(&self, center: &[f64]) -> Poly {
        let mut out = Poly::constant(self.nvars, C64::new(0.0, 0.0));
        for (e, c) in &self.terms {
            let mut term = Poly::constant(self.nvars, *c);
            for (i, &k) in e.iter().enumerate() {
                let lin = &Poly::var(self.nvars, i) - &Poly::constant(self.nvars, C64::new(center[i], 0.0));
                for _ in 0..k {
                    term = &term * &lin;
                }
            }
            out = &out + &term;
        }
        out
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.accumulate(e.clone(), *c);
        }
        out
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.accumulate(e.clone(), -*c);
        }
        out
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars.max(rhs.nvars));
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u16> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.accumulate(e, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)", c.re, c.im)?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

type OpaqueFn = Arc<dyn Fn(&[f64]) -> C64 + Send + Sync>;

/// How coefficient derivatives are taken.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference { step: f64 },
}

impl Default for DerivativeMode {
    fn default() -> Self {
        DerivativeMode::Analytic
    }
}

/// Complex scalar field on `R^m`.
#[derive(Clone)]
pub enum Field {
    Poly(Poly),
    /// `exp(P)`
    Exp(Poly),
    /// `P^exponent` with the principal branch.
    Power { base: Poly, exponent: f64 },
    /// `exp(-1 / (1 - |x-c|^2/R^2))` inside the ball, zero outside.
    Bump { center: Vec<f64>, radius: f64 },
    /// `num / den^power`
    Rational { num: Poly, den: Poly, power: u32 },
    Sum(Vec<Field>),
    Product(Vec<Field>),
    /// Black-box values; only finite-difference derivatives.
    Opaque {
        nvars: usize,
        label: String,
        f: OpaqueFn,
    },
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Poly(p) => write!(f, "Poly({p})"),
            Field::Exp(p) => write!(f, "Exp({p})"),
            Field::Power { base, exponent } => write!(f, "Power({base}, {exponent})"),
            Field::Bump { center, radius } => write!(f, "Bump({center:?}, {radius})"),
            Field::Rational { num, den, power } => write!(f, "Rational({num} / ({den})^{power})"),
            Field::Sum(t) => f.debug_tuple("Sum").field(t).finish(),
            Field::Product(t) => f.debug_tuple("Product").field(t).finish(),
            Field::Opaque { label, .. } => write!(f, "Opaque({label})"),
        }
    }
}

impl From<Poly> for Field {
    fn from(p: Poly) -> Self {
        Field::Poly(p)
    }
}

impl Field {
    pub fn zero(nvars: usize) -> Self {
        Field::Poly(Poly::zero(nvars))
    }

    pub fn constant(nvars: usize, c: C64) -> Self {
        Field::Poly(Poly::constant(nvars, c))
    }

    pub fn bump(center: Vec<f64>, radius: f64) -> Self {
        Field::Bump { center, radius }
    }

    pub fn opaque<F>(nvars: usize, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[f64]) -> C64 + Send + Sync + 'static,
    {
        Field::Opaque {
            nvars,
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn nvars(&self) -> usize {
        match self {
            Field::Poly(p) | Field::Exp(p) => p.nvars(),
            Field::Power { base, .. } => base.nvars(),
            Field::Bump { center, .. } => center.len(),
            Field::Rational { num, .. } => num.nvars(),
            Field::Sum(t) | Field::Product(t) => t.first().map_or(0, Field::nvars),
            Field::Opaque { nvars, .. } => *nvars,
        }
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        match self {
            Field::Poly(p) => Some(p),
            _ => None,
        }
    }

    /// Structurally zero (a zero polynomial).
    pub fn is_zero(&self) -> bool {
        matches!(self, Field::Poly(p) if p.is_zero())
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        match self {
            Field::Poly(p) => p.eval(x),
            Field::Exp(p) => p.eval(x).exp(),
            Field::Power { base, exponent } => {
                let b = base.eval(x);
                if b.im == 0.0 && b.re >= 0.0 {
                    C64::new(b.re.powf(*exponent), 0.0)
                } else {
                    b.powf(*exponent)
                }
            }
            Field::Bump { center, radius } => {
                let s: f64 = x
                    .iter()
                    .zip(center)
                    .map(|(a, c)| (a - c) * (a - c))
                    .sum::<f64>()
                    / (radius * radius);
                if s < 1.0 {
                    C64::new((-1.0 / (1.0 - s)).exp(), 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
            Field::Rational { num, den, power } => num.eval(x) / den.eval(x).powu(*power),
            Field::Sum(t) => t.iter().map(|f| f.eval(x)).sum(),
            Field::Product(t) => {
                let mut acc = C64::new(1.0, 0.0);
                for f in t {
                    let v = f.eval(x);
                    if v == C64::new(0.0, 0.0) {
                        return v;
                    }
                    acc *= v;
                }
                acc
            }
            Field::Opaque { f, .. } => f(x),
        }
    }

    pub fn scale(&self, c: C64) -> Field {
        match self {
            Field::Poly(p) => Field::Poly(p.scale(c)),
            _ if c == C64::new(1.0, 0.0) => self.clone(),
            _ if c == C64::new(0.0, 0.0) => Field::zero(self.nvars()),
            _ => self.mul(&Field::constant(self.nvars(), c)),
        }
    }

    pub fn add(&self, other: &Field) -> Field {
        match (self, other) {
            (Field::Poly(a), Field::Poly(b)) => Field::Poly(a + b),
            (a, b) if b.is_zero() => a.clone(),
            (a, b) if a.is_zero() => b.clone(),
            _ => {
                let mut terms = Vec::new();
                let mut poly = Poly::zero(self.nvars());
                for f in [self, other] {
                    match f {
                        Field::Sum(t) => {
                            for g in t {
                                match g {
                                    Field::Poly(p) => poly = &poly + p,
                                    _ => terms.push(g.clone()),
                                }
                            }
                        }
                        Field::Poly(p) => poly = &poly + p,
                        g => terms.push(g.clone()),
                    }
                }
                if !poly.is_zero() {
                    terms.push(Field::Poly(poly));
                }
                match terms.len() {
                    0 => Field::zero(self.nvars()),
                    1 => terms.pop().unwrap(),
                    _ => Field::Sum(terms),
                }
            }
        }
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Field) -> Field {
        match (self, other) {
            (Field::Poly(a), Field::Poly(b)) => Field::Poly(a * b),
            (a, b) if a.is_zero() || b.is_zero() => Field::zero(self.nvars().max(other.nvars())),
            (Field::Poly(a), b) | (b, Field::Poly(a)) if a.as_constant() == Some(C64::new(1.0, 0.0)) => {
                b.clone()
            }
            _ => {
                let mut factors = Vec::new();
                let mut poly: Option<Poly> = None;
                for f in [self, other] {
                    let parts: Vec<&Field> = match f {
                        Field::Product(t) => t.iter().collect(),
                        g => vec![g],
                    };
                    for g in parts {
                        match g {
                            Field::Poly(p) => {
                                poly = Some(match poly {
                                    None => p.clone(),
                                    Some(acc) => &acc * p,
                                })
                            }
                            _ => factors.push(g.clone()),
                        }
                    }
                }
                // Compactly supported factors first so evaluation can stop at zero.
                factors.sort_by_key(|f| !matches!(f, Field::Bump { .. }));
                if let Some(p) = poly {
                    if p.is_zero() {
                        return Field::zero(self.nvars());
                    }
                    if p.as_constant() != Some(C64::new(1.0, 0.0)) {
                        factors.push(Field::Poly(p));
                    }
                }
                match factors.len() {
                    0 => Field::constant(self.nvars(), C64::new(1.0, 0.0)),
                    1 => factors.pop().unwrap(),
                    _ => Field::Product(factors),
                }
            }
        }
    }

    pub fn conj(&self) -> Field {
        match self {
            Field::Poly(p) => Field::Poly(p.conj()),
            Field::Exp(p) => Field::Exp(p.conj()),
            Field::Power { base, exponent } => {
                // principal branch: conj(b^e) = conj(b)^e off the negative real axis
                Field::Power {
                    base: base.conj(),
                    exponent: *exponent,
                }
            }
            Field::Bump { .. } => self.clone(),
            Field::Rational { num, den, power } => Field::Rational {
                num: num.conj(),
                den: den.conj(),
                power: *power,
            },
            Field::Sum(t) => Field::Sum(t.iter().map(Field::conj).collect()),
            Field::Product(t) => Field::Product(t.iter().map(Field::conj).collect()),
            Field::Opaque { nvars, label, f } => {
                let f = f.clone();
                Field::Opaque {
                    nvars: *nvars,
                    label: format!("conj({label})"),
                    f: Arc::new(move |x| f(x).conj()),
                }
            }
        }
    }

    /// Exact partial derivative along `x_i`; fails on opaque fields.
    pub fn derivative(&self, i: usize) -> Result<Field> {
        Ok(match self {
            Field::Poly(p) => Field::Poly(p.deriv(i)),
            Field::Exp(p) => {
                let dp = p.deriv(i);
                if dp.is_zero() {
                    Field::zero(p.nvars())
                } else {
                    Field::Product(vec![self.clone(), Field::Poly(dp)])
                }
            }
            Field::Power { base, exponent } => {
                let db = base.deriv(i).scale(C64::new(*exponent, 0.0));
                if db.is_zero() {
                    Field::zero(base.nvars())
                } else {
                    Field::Product(vec![
                        Field::Power {
                            base: base.clone(),
                            exponent: exponent - 1.0,
                        },
                        Field::Poly(db),
                    ])
                }
            }
            Field::Bump { center, radius } => {
                let m = center.len();
                let shifted = Poly::norm_sq(m).shifted(center);
                let inv_r2 = 1.0 / (radius * radius);
                let u = &Poly::constant(m, C64::new(1.0, 0.0)) - &shifted.scale(C64::new(inv_r2, 0.0));
                let du = u.deriv(i);
                Field::Product(vec![
                    self.clone(),
                    Field::Rational {
                        num: du,
                        den: u,
                        power: 2,
                    },
                ])
            }
            Field::Rational { num, den, power } => {
                let k = C64::new(*power as f64, 0.0);
                let numer = &(&num.deriv(i) * den) - &(&(num * &den.deriv(i))).scale(k);
                if numer.is_zero() {
                    Field::zero(num.nvars())
                } else {
                    Field::Rational {
                        num: numer,
                        den: den.clone(),
                        power: power + 1,
                    }
                }
            }
            Field::Sum(t) => {
                let mut acc = Field::zero(self.nvars());
                for f in t {
                    acc = acc.add(&f.derivative(i)?);
                }
                acc
            }
            Field::Product(t) => {
                let mut acc = Field::zero(self.nvars());
                for k in 0..t.len() {
                    let dk = t[k].derivative(i)?;
                    if dk.is_zero() {
                        continue;
                    }
                    let mut term = Field::constant(self.nvars(), C64::new(1.0, 0.0));
                    // keep the bump-first ordering of the original product
                    for (l, f) in t.iter().enumerate() {
                        term = term.mul(if l == k { &dk } else { f });
                    }
                    acc = acc.add(&term);
                }
                acc
            }
            Field::Opaque { .. } => return Err(Error::NotDifferentiable),
        })
    }

    /// Centered finite-difference derivative along `x_i`.
    pub fn fd_derivative(&self, i: usize, step: f64) -> Field {
        let base = self.clone();
        let nvars = self.nvars();
        Field::opaque(nvars, format!("fd[{i}]"), move |x| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += step;
            xm[i] -= step;
            (base.eval(&xp) - base.eval(&xm)) / (2.0 * step)
        })
    }

    pub fn derivative_with(&self, i: usize, mode: DerivativeMode) -> Result<Field> {
        match mode {
            DerivativeMode::Analytic => self.derivative(i),
            DerivativeMode::FiniteDifference { step } => Ok(self.fd_derivative(i, step)),
        }
    }

    /// `d/dzbar_j` in `C^n` coordinates (`m = 2n`).
    pub fn dzbar(&self, j: usize, mode: DerivativeMode) -> Result<Field> {
        let dx = self.derivative_with(2 * j, mode)?;
        let dy = self.derivative_with(2 * j + 1, mode)?;
        Ok(dx.scale(C64::new(0.5, 0.0)).add(&dy.scale(C64::new(0.0, 0.5))))
    }

    /// `d/dz_j` in `C^n` coordinates.
    pub fn dz(&self, j: usize, mode: DerivativeMode) -> Result<Field> {
        let dx = self.derivative_with(2 * j, mode)?;
        let dy = self.derivative_with(2 * j + 1, mode)?;
        Ok(dx.scale(C64::new(0.5, 0.0)).add(&dy.scale(C64::new(0.0, -0.5))))
    }

    /// Serializable description; opaque fields become sample references.
    pub fn to_desc(&self) -> FieldDesc {
        match self {
            Field::Poly(p) => FieldDesc::Poly { poly: p.clone() },
            Field::Exp(p) => FieldDesc::Exp { poly: p.clone() },
            Field::Power { base, exponent } => FieldDesc::Power {
                base: base.clone(),
                exponent: *exponent,
            },
            Field::Bump { center, radius } => FieldDesc::Bump {
                center: center.clone(),
                radius: *radius,
            },
            Field::Rational { num, den, power } => FieldDesc::Rational {
                num: num.clone(),
                den: den.clone(),
                power: *power,
            },
            Field::Sum(t) => FieldDesc::Sum {
                terms: t.iter().map(Field::to_desc).collect(),
            },
            Field::Product(t) => FieldDesc::Product {
                factors: t.iter().map(Field::to_desc).collect(),
            },
            Field::Opaque { nvars, label, .. } => FieldDesc::SampleGrid {
                nvars: *nvars,
                reference: label.clone(),
            },
        }
    }
}

/// JSON description of a [`Field`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldDesc {
    Poly { poly: Poly },
    Exp { poly: Poly },
    Power { base: Poly, exponent: f64 },
    Bump { center: Vec<f64>, radius: f64 },
    Rational { num: Poly, den: Poly, power: u32 },
    Sum { terms: Vec<FieldDesc> },
    Product { factors: Vec<FieldDesc> },
    Expression { nvars: usize, text: String },
    SampleGrid { nvars: usize, reference: String },
}

impl FieldDesc {
    /// Rebuild the field. Sample-grid references are looked up with `resolve`.
    pub fn to_field_with(&self, resolve: &dyn Fn(&str) -> Option<Field>) -> Result<Field> {
        Ok(match self {
            FieldDesc::Poly { poly } => Field::Poly(poly.clone()),
            FieldDesc::Exp { poly } => Field::Exp(poly.clone()),
            FieldDesc::Power { base, exponent } => Field::Power {
                base: base.clone(),
                exponent: *exponent,
            },
            FieldDesc::Bump { center, radius } => Field::Bump {
                center: center.clone(),
                radius: *radius,
            },
            FieldDesc::Rational { num, den, power } => Field::Rational {
                num: num.clone(),
                den: den.clone(),
                power: *power,
            },
            FieldDesc::Sum { terms } => Field::Sum(
                terms
                    .iter()
                    .map(|t| t.to_field_with(resolve))
                    .collect::<Result<_>>()?,
            ),
            FieldDesc::Product { factors } => Field::Product(
                factors
                    .iter()
                    .map(|t| t.to_field_with(resolve))
                    .collect::<Result<_>>()?,
            ),
            FieldDesc::Expression { nvars, text } => crate::expr::parse_field(text, *nvars)?,
            FieldDesc::SampleGrid { reference, .. } => resolve(reference).ok_or_else(|| {
                Error::InvalidField(format!("unresolved sample reference `{reference}`"))
            })?,
        })
    }

    pub fn to_field(&self) -> Result<Field> {
        self.to_field_with(&|_| None)
    }
}
