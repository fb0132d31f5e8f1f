use super::multi_index::{merge_sign, MultiIndex};
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Index pair `(I, J)` of the monomial `dz^I ∧ dzbar^J`.
pub type Monomial = (MultiIndex, MultiIndex);

/// Constant-coefficient form on `C^n` (a form evaluated at one point).
/// Mixed bidegrees are allowed.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FormValue {
    pub n: usize,
    pub terms: BTreeMap<Monomial, C64>,
}

/// `dz^{1..n} ∧ dzbar^{1..n} = D_n dV` with `dV = dx_1 ∧ dy_1 ∧ ... ∧ dx_n ∧ dy_n`.
pub fn top_density_constant(n: usize) -> C64 {
    let base = C64::new(0.0, -2.0).powu(n as u32);
    if (n * (n.saturating_sub(1)) / 2) % 2 == 0 {
        base
    } else {
        -base
    }
}

/// Sign and target monomial of `e_{a} ∧ e_{b}`; sign 0 if they overlap.
pub fn wedge_monomials(a: Monomial, b: Monomial) -> (i32, Monomial) {
    let (i1, j1) = a;
    let (i2, j2) = b;
    let cross = if (j1.len() * i2.len()) % 2 == 0 { 1 } else { -1 };
    let s = cross * merge_sign(i1, i2) * merge_sign(j1, j2);
    (s, (i1.union(i2), j1.union(j2)))
}

/// `conj(dz^I ∧ dzbar^J) = sign · dz^J ∧ dzbar^I`.
pub fn conj_monomial(m: Monomial) -> (i32, Monomial) {
    let (i, j) = m;
    let s = if (i.len() * j.len()) % 2 == 0 { 1 } else { -1 };
    (s, (j, i))
}

/// Hodge star of a basis monomial: `*e_{I,J} = c · e_{J^c, I^c}`.
///
/// The constant is derived from `α ∧ *conj(β) = <α, β> dV` with the metric
/// `<dz_j, dz_j> = 2`.
pub fn star_monomial(n: usize, m: Monomial) -> (C64, Monomial) {
    let (i, j) = m;
    let target = (j.complement(n), i.complement(n));
    // conj(e_{J,I}) = s e_{I,J}; pair e_{J,I} against itself.
    let (s, _) = conj_monomial((j, i));
    let (sigma, _) = wedge_monomials((j, i), target);
    let norm = 2f64.powi((i.len() + j.len()) as i32);
    let c = C64::new(s as f64 * sigma as f64 * norm, 0.0) / top_density_constant(n);
    (c, target)
}

impl FormValue {
    pub fn zero(n: usize) -> Self {
        FormValue {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(n: usize, i: MultiIndex, j: MultiIndex) -> Self {
        let mut v = FormValue::zero(n);
        v.terms.insert((i, j), C64::new(1.0, 0.0));
        v
    }

    pub fn add_term(&mut self, m: Monomial, c: C64) {
        if c == ZERO {
            return;
        }
        let e = self.terms.entry(m).or_insert(ZERO);
        *e += c;
        if *e == ZERO {
            self.terms.remove(&m);
        }
    }

    pub fn coefficient(&self, i: MultiIndex, j: MultiIndex) -> C64 {
        self.terms.get(&(i, j)).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| *c == ZERO)
    }

    pub fn scale(&self, c: C64) -> FormValue {
        let mut out = FormValue::zero(self.n);
        for (m, v) in &self.terms {
            out.add_term(*m, v * c);
        }
        out
    }

    pub fn add(&self, other: &FormValue) -> FormValue {
        let mut out = self.clone();
        for (m, v) in &other.terms {
            out.add_term(*m, *v);
        }
        out
    }

    pub fn wedge(&self, other: &FormValue) -> FormValue {
        let mut out = FormValue::zero(self.n);
        for (ma, a) in &self.terms {
            for (mb, b) in &other.terms {
                let (s, m) = wedge_monomials(*ma, *mb);
                if s != 0 {
                    out.add_term(m, a * b * s as f64);
                }
            }
        }
        out
    }

    pub fn conj(&self) -> FormValue {
        let mut out = FormValue::zero(self.n);
        for (m, v) in &self.terms {
            let (s, t) = conj_monomial(*m);
            out.add_term(t, v.conj() * s as f64);
        }
        out
    }

    pub fn star(&self) -> FormValue {
        let mut out = FormValue::zero(self.n);
        for (m, v) in &self.terms {
            let (c, t) = star_monomial(self.n, *m);
            out.add_term(t, v * c);
        }
        out
    }

    /// Pointwise Hermitian inner product, `<dz^I ∧ dzbar^J, same> = 2^{|I|+|J|}`.
    pub fn inner(&self, other: &FormValue) -> C64 {
        let mut acc = ZERO;
        for (m, a) in &self.terms {
            if let Some(b) = other.terms.get(m) {
                acc += a * b.conj() * 2f64.powi((m.0.len() + m.1.len()) as i32);
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    /// Density with respect to `dV`; only the `(n,n)` part may be present.
    pub fn top_density(&self) -> Result<C64> {
        let full = MultiIndex::full(self.n);
        let mut acc = ZERO;
        for ((i, j), v) in &self.terms {
            if *i != full || *j != full {
                return Err(Error::NotTopDegree {
                    n: self.n,
                    found: format!("({},{})", i.len(), j.len()),
                });
            }
            acc += v;
        }
        Ok(acc * top_density_constant(self.n))
    }

    /// Expansion in real coordinates: map from a bitmask over `x_0..x_{2n-1}`
    /// to the coefficient of the ordered wedge of those real differentials.
    pub fn to_real(&self) -> BTreeMap<u32, C64> {
        let mut out: BTreeMap<u32, C64> = BTreeMap::new();
        for ((i, j), c) in &self.terms {
            let mut cur: BTreeMap<u32, C64> = BTreeMap::from([(0u32, *c)]);
            let factors = i
                .entries()
                .into_iter()
                .map(|k| (k, 1.0))
                .chain(j.entries().into_iter().map(|k| (k, -1.0)));
            for (k, conj_sign) in factors {
                let comps = [
                    (2 * (k - 1), C64::new(1.0, 0.0)),
                    (2 * (k - 1) + 1, C64::new(0.0, conj_sign)),
                ];
                let mut next = BTreeMap::new();
                for (bits, v) in &cur {
                    for (b, w) in comps {
                        if bits & (1 << b) != 0 {
                            continue;
                        }
                        let above = (bits >> (b + 1)).count_ones();
                        let s = if above % 2 == 0 { 1.0 } else { -1.0 };
                        *next.entry(bits | 1 << b).or_insert(ZERO) += v * w * s;
                    }
                }
                cur = next;
            }
            for (bits, v) in cur {
                *out.entry(bits).or_insert(ZERO) += v;
            }
        }
        out.retain(|_, v| *v != ZERO);
        out
    }
}
