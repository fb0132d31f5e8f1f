use super::multi_index::{merge_sign, MultiIndex, MAX_DIM};
use super::value::{conj_monomial, star_monomial, top_density_constant, wedge_monomials, FormValue, Monomial};
use crate::error::{Error, Result};
use crate::field::{DerivativeMode, Field, FieldDesc};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bidegree {
    pub p: usize,
    pub q: usize,
}

impl Bidegree {
    pub fn new(p: usize, q: usize, n: usize) -> Result<Self> {
        if p > n || q > n {
            return Err(Error::InvalidBidegree { p, q, n });
        }
        Ok(Bidegree { p, q })
    }

    pub fn total(self) -> usize {
        self.p + self.q
    }
}

impl std::fmt::Display for Bidegree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// Homogeneous `(p,q)`-form on a region of `C^n`, real coordinates
/// `z_j = x_{2j-1} + i x_{2j}`.
///
/// The wedge of two forms whose bidegree would exceed `n` in either slot is
/// the zero form; only such zero forms carry a bidegree with `p > n` or
/// `q > n`.
#[derive(Clone, Debug)]
pub struct DifferentialForm {
    n: usize,
    bidegree: Bidegree,
    terms: BTreeMap<Monomial, Field>,
    mode: DerivativeMode,
}

impl DifferentialForm {
    pub fn zero(n: usize, p: usize, q: usize) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::DimensionMismatch(format!("complex dimension {n}")));
        }
        Ok(DifferentialForm {
            n,
            bidegree: Bidegree::new(p, q, n)?,
            terms: BTreeMap::new(),
            mode: DerivativeMode::Analytic,
        })
    }

    /// Single monomial `coeff · dz^I ∧ dzbar^J` (1-based index lists).
    pub fn monomial(n: usize, dz: &[usize], dzbar: &[usize], coeff: Field) -> Result<Self> {
        let mut f = DifferentialForm::zero(n, dz.len(), dzbar.len())?;
        f.insert(dz, dzbar, coeff)?;
        Ok(f)
    }

    /// Scalar function viewed as a (0,0)-form.
    pub fn function(n: usize, coeff: Field) -> Result<Self> {
        Self::monomial(n, &[], &[], coeff)
    }

    pub fn with_mode(mut self, mode: DerivativeMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bidegree(&self) -> Bidegree {
        self.bidegree
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Field)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(Field::is_zero)
    }

    /// Add `coeff · dz^I ∧ dzbar^J`; the index lists must be sorted.
    pub fn insert(&mut self, dz: &[usize], dzbar: &[usize], coeff: Field) -> Result<()> {
        let i = MultiIndex::new(dz, self.n)?;
        let j = MultiIndex::new(dzbar, self.n)?;
        self.insert_monomial((i, j), coeff)
    }

    pub fn insert_monomial(&mut self, m: Monomial, coeff: Field) -> Result<()> {
        if m.0.len() != self.bidegree.p || m.1.len() != self.bidegree.q {
            return Err(Error::BidegreeMismatch {
                expected: self.bidegree.to_string(),
                found: format!("({},{})", m.0.len(), m.1.len()),
            });
        }
        if coeff.nvars() != 2 * self.n {
            return Err(Error::DimensionMismatch(format!(
                "coefficient on {} real variables for C^{}",
                coeff.nvars(),
                self.n
            )));
        }
        let entry = match self.terms.remove(&m) {
            Some(old) => old.add(&coeff),
            None => coeff,
        };
        if !entry.is_zero() {
            self.terms.insert(m, entry);
        }
        Ok(())
    }

    pub fn coefficient(&self, dz: &[usize], dzbar: &[usize]) -> Result<Field> {
        let i = MultiIndex::new(dz, self.n)?;
        let j = MultiIndex::new(dzbar, self.n)?;
        Ok(self
            .terms
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| Field::zero(2 * self.n)))
    }

    pub fn eval(&self, x: &[f64]) -> FormValue {
        let mut v = FormValue::zero(self.n);
        for (m, f) in &self.terms {
            v.add_term(*m, f.eval(x));
        }
        v
    }

    fn check_same(&self, other: &DifferentialForm) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "forms on C^{} and C^{}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &DifferentialForm) -> Result<DifferentialForm> {
        self.check_same(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.bidegree != other.bidegree {
            return Err(Error::BidegreeMismatch {
                expected: self.bidegree.to_string(),
                found: other.bidegree.to_string(),
            });
        }
        let mut out = self.clone();
        for (m, f) in &other.terms {
            out.insert_monomial(*m, f.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: C64) -> DifferentialForm {
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .map(|(m, f)| (*m, f.scale(c)))
            .filter(|(_, f)| !f.is_zero())
            .collect();
        out
    }

    /// Multiply every coefficient by a scalar field.
    pub fn mul_field(&self, g: &Field) -> DifferentialForm {
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .map(|(m, f)| (*m, f.mul(g)))
            .filter(|(_, f)| !f.is_zero())
            .collect();
        out
    }

    pub fn wedge(&self, other: &DifferentialForm) -> Result<DifferentialForm> {
        self.check_same(other)?;
        let p = self.bidegree.p + other.bidegree.p;
        let q = self.bidegree.q + other.bidegree.q;
        let mut out = DifferentialForm {
            n: self.n,
            bidegree: Bidegree { p, q },
            terms: BTreeMap::new(),
            mode: self.mode,
        };
        if p > self.n || q > self.n {
            return Ok(out);
        }
        for (ma, fa) in &self.terms {
            for (mb, fb) in &other.terms {
                let (s, m) = wedge_monomials(*ma, *mb);
                if s != 0 {
                    out.insert_monomial(m, fa.mul(fb).scale(C64::new(s as f64, 0.0)))?;
                }
            }
        }
        Ok(out)
    }

    /// Complex conjugate form; bidegree `(p,q)` becomes `(q,p)`.
    pub fn conj(&self) -> DifferentialForm {
        let mut terms = BTreeMap::new();
        for (m, f) in &self.terms {
            let (s, t) = conj_monomial(*m);
            terms.insert(t, f.conj().scale(C64::new(s as f64, 0.0)));
        }
        DifferentialForm {
            n: self.n,
            bidegree: Bidegree {
                p: self.bidegree.q,
                q: self.bidegree.p,
            },
            terms,
            mode: self.mode,
        }
    }

    /// Hodge star, `(p,q) -> (n-q, n-p)`, applied coefficientwise.
    pub fn star(&self) -> DifferentialForm {
        #[cfg(debug_assertions)]
        super::validate_star_once();
        let mut terms = BTreeMap::new();
        for (m, f) in &self.terms {
            let (c, t) = star_monomial(self.n, *m);
            terms.insert(t, f.scale(c));
        }
        DifferentialForm {
            n: self.n,
            bidegree: Bidegree {
                p: self.n - self.bidegree.q,
                q: self.n - self.bidegree.p,
            },
            terms,
            mode: self.mode,
        }
    }

    /// Cauchy-Riemann operator, `(p,q) -> (p,q+1)`.
    pub fn dbar(&self) -> Result<DifferentialForm> {
        let p = self.bidegree.p;
        let q = self.bidegree.q + 1;
        let mut out = DifferentialForm {
            n: self.n,
            bidegree: Bidegree { p, q },
            terms: BTreeMap::new(),
            mode: self.mode,
        };
        if q > self.n {
            return Ok(out);
        }
        let pass_i = if p % 2 == 0 { 1.0 } else { -1.0 };
        for ((i, j), f) in &self.terms {
            for k in 1..=self.n {
                let s = merge_sign(MultiIndex::single(k), *j);
                if s == 0 {
                    continue;
                }
                let d = f.dzbar(k - 1, self.mode)?;
                if d.is_zero() {
                    continue;
                }
                let m = (*i, j.union(MultiIndex::single(k)));
                out.insert_monomial(m, d.scale(C64::new(pass_i * s as f64, 0.0)))?;
            }
        }
        Ok(out)
    }

    /// Holomorphic differential `∂ = conj ∘ dbar ∘ conj`, `(p,q) -> (p+1,q)`.
    pub fn del(&self) -> Result<DifferentialForm> {
        Ok(self.conj().dbar()?.conj())
    }

    /// Density of an `(n,n)`-form with respect to Lebesgue measure.
    pub fn top_density(&self) -> Result<Field> {
        if self.bidegree.p != self.n || self.bidegree.q != self.n {
            return Err(Error::NotTopDegree {
                n: self.n,
                found: self.bidegree.to_string(),
            });
        }
        let full = MultiIndex::full(self.n);
        Ok(match self.terms.get(&(full, full)) {
            Some(f) => f.scale(top_density_constant(self.n)),
            None => Field::zero(2 * self.n),
        })
    }

    pub fn to_desc(&self) -> FormDesc {
        FormDesc {
            n: self.n,
            p: self.bidegree.p,
            q: self.bidegree.q,
            mode: self.mode,
            terms: self
                .terms
                .iter()
                .map(|((i, j), f)| TermDesc {
                    dz: i.entries(),
                    dzbar: j.entries(),
                    coefficient: f.to_desc(),
                })
                .collect(),
        }
    }
}

/// JSON description of a form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormDesc {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    #[serde(default)]
    pub mode: DerivativeMode,
    pub terms: Vec<TermDesc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermDesc {
    #[serde(default)]
    pub dz: Vec<usize>,
    #[serde(default)]
    pub dzbar: Vec<usize>,
    pub coefficient: FieldDesc,
}

impl FormDesc {
    pub fn to_form_with(&self, resolve: &dyn Fn(&str) -> Option<Field>) -> Result<DifferentialForm> {
        let mut f = DifferentialForm::zero(self.n, self.p, self.q)?.with_mode(self.mode);
        for t in &self.terms {
            f.insert(&t.dz, &t.dzbar, t.coefficient.to_field_with(resolve)?)?;
        }
        Ok(f)
    }

    pub fn to_form(&self) -> Result<DifferentialForm> {
        self.to_form_with(&|_| None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Poly;

    fn one(n: usize) -> Field {
        Field::constant(2 * n, C64::new(1.0, 0.0))
    }

    #[test]
    fn wedge_examples() {
        let d1 = DifferentialForm::monomial(2, &[], &[1], one(2)).unwrap();
        let d2 = DifferentialForm::monomial(2, &[], &[2], one(2)).unwrap();
        assert!(d1.wedge(&d1).unwrap().is_zero());
        let w = d2.wedge(&d1).unwrap();
        let c = w.coefficient(&[], &[1, 2]).unwrap();
        assert_eq!(c.eval(&[0.0; 4]), C64::new(-1.0, 0.0));

        let dzb = DifferentialForm::monomial(1, &[], &[1], one(1)).unwrap();
        let dz = DifferentialForm::monomial(1, &[1], &[], one(1)).unwrap();
        let w = dzb.wedge(&dz).unwrap();
        assert_eq!(w.coefficient(&[1], &[1]).unwrap().eval(&[0.0; 2]), C64::new(-1.0, 0.0));
    }

    #[test]
    fn dbar_examples() {
        let f = DifferentialForm::function(1, Field::Poly(Poly::zbar(1, 0))).unwrap();
        let d = f.dbar().unwrap();
        assert_eq!(d.bidegree(), Bidegree { p: 0, q: 1 });
        assert_eq!(
            d.coefficient(&[], &[1]).unwrap().as_poly().unwrap(),
            &Poly::constant(2, C64::new(1.0, 0.0))
        );
        let g = DifferentialForm::function(1, Field::Poly(&Poly::z(1, 0) * &Poly::zbar(1, 0))).unwrap();
        let d = g.dbar().unwrap();
        assert_eq!(d.coefficient(&[], &[1]).unwrap().as_poly().unwrap(), &Poly::z(1, 0));
        assert!(d.dbar().unwrap().is_zero());
    }

    #[test]
    fn opaque_coefficients_need_fd_mode() {
        let f = DifferentialForm::function(1, Field::opaque(2, "s", |x| C64::new(x[0], -x[1]))).unwrap();
        assert!(matches!(f.dbar(), Err(Error::NotDifferentiable)));
        let g = f.with_mode(DerivativeMode::FiniteDifference { step: 1e-5 });
        let d = g.dbar().unwrap();
        let v = d.coefficient(&[], &[1]).unwrap().eval(&[0.3, 0.2]);
        assert!((v - C64::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn desc_roundtrip() {
        let f = DifferentialForm::monomial(
            2,
            &[],
            &[1],
            crate::expr::parse_field("z1*zb2 + 3*i", 4).unwrap(),
        )
        .unwrap();
        let json = serde_json::to_string(&f.to_desc()).unwrap();
        let back: FormDesc = serde_json::from_str(&json).unwrap();
        let g = back.to_form().unwrap();
        let x = [0.1, 0.2, -0.3, 0.4];
        assert_eq!(f.eval(&x), g.eval(&x));
    }

    #[test]
    fn bidegree_mismatch_is_rejected() {
        let mut f = DifferentialForm::zero(2, 0, 1).unwrap();
        assert!(f.insert(&[1], &[], one(2)).is_err());
        assert!(f.insert(&[], &[3], one(2)).is_err());
        assert!(DifferentialForm::zero(2, 3, 0).is_err());
    }
}
