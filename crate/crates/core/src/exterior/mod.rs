//! Exterior algebra of complex differential forms on `C^n`.
//!
//! Monomials are stored in canonical order `dz^I ∧ dzbar^J` with ascending
//! indices. The Hermitian metric has `<dz_j, dz_j> = 2` (so `|dx| = |dy| = 1`)
//! and the star is determined by `α ∧ *conj(β) = <α, β> dV`.

mod form;
mod multi_index;
mod value;

pub use form::{Bidegree, DifferentialForm, FormDesc, TermDesc};
pub use multi_index::{eps_sign, merge_sign, MultiIndex, MAX_DIM};
pub use value::{
    conj_monomial, star_monomial, top_density_constant, wedge_monomials, FormValue, Monomial,
};

/// Check the pairing identity on every pair of basis monomials for `n <= 3`.
/// Runs once per process in debug builds.
#[cfg(debug_assertions)]
pub(crate) fn validate_star_once() {
    use std::sync::OnceLock;
    static DONE: OnceLock<()> = OnceLock::new();
    DONE.get_or_init(|| {
        for n in 1..=3 {
            if let Some(msg) = pairing_violation(n) {
                panic!("star pairing identity violated: {msg}");
            }
        }
    });
}

/// First basis pair violating `α ∧ *conj(β) = <α, β> dV`, if any.
pub fn pairing_violation(n: usize) -> Option<String> {
    for p in 0..=n {
        for q in 0..=n {
            for ia in MultiIndex::all(n, p) {
                for ja in MultiIndex::all(n, q) {
                    let a = FormValue::basis(n, ia, ja);
                    for ib in MultiIndex::all(n, p) {
                        for jb in MultiIndex::all(n, q) {
                            let b = FormValue::basis(n, ib, jb);
                            let lhs = a.wedge(&b.conj().star()).top_density().ok()?;
                            let rhs = a.inner(&b);
                            if (lhs - rhs).norm() > 1e-12 {
                                return Some(format!("n={n} {ia}{ja} vs {ib}{jb}: {lhs} != {rhs}"));
                            }
                        }
                    }
                }
            }
        }
    }
    None
}
