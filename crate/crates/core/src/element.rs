//! Elements of `V ⊗ ℚ[∂_0, …, ∂_m]`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::matrix::SparseVec;
use crate::arith::poly::{Monomial, MultiPoly};
use crate::arith::scalar::{format_scalar, parse_scalar, Scalar};
use crate::error::{Error, Result};
use crate::vmodule::{basis_vec, vvec_axpy, VVec};

/// Coordinate key of a tensor element: monomial first, so that the key order
/// refines the degree order on monomials.
pub type TensorKey = (Monomial, usize);

/// A finite sum `Σ v_p ⊗ ∂^p`, stored as monomial ↦ `V`-vector.
///
/// No stored vector is empty and no stored coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorElement {
    nvars: usize,
    terms: BTreeMap<Monomial, VVec>,
}

impl TensorElement {
    pub fn zero(nvars: usize) -> Self {
        TensorElement {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    /// `v_j ⊗ ∂^mono`.
    pub fn basis(j: usize, mono: Monomial) -> Self {
        let mut e = TensorElement::zero(mono.nvars());
        e.add_term(j, mono, Scalar::one());
        e
    }

    /// `v_j ⊗ 1`.
    pub fn unit(nvars: usize, j: usize) -> Self {
        Self::basis(j, Monomial::one(nvars))
    }

    /// `u ⊗ f`.
    pub fn from_parts(u: &VVec, f: &MultiPoly) -> Self {
        let mut e = TensorElement::zero(f.nvars());
        e.add_tensor(u, f, &Scalar::one());
        e
    }

    pub fn from_sparse(nvars: usize, v: &SparseVec<TensorKey>) -> Self {
        let mut e = TensorElement::zero(nvars);
        for ((m, j), c) in v {
            e.add_term(*j, m.clone(), c.clone());
        }
        e
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.values().map(BTreeMap::len).sum()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &VVec)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mono: &Monomial) -> VVec {
        self.terms.get(mono).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, j: usize, mono: Monomial, c: Scalar) {
        assert_eq!(mono.nvars(), self.nvars, "monomial arity mismatch");
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(mono.clone()).or_default();
        vvec_axpy(slot, &c, &basis_vec(j));
        if slot.is_empty() {
            self.terms.remove(&mono);
        }
    }

    /// `self += a · (u ⊗ f)`.
    pub fn add_tensor(&mut self, u: &VVec, f: &MultiPoly, a: &Scalar) {
        assert_eq!(f.nvars(), self.nvars, "polynomial arity mismatch");
        if a.is_zero() || u.is_empty() {
            return;
        }
        for (m, c) in f.terms() {
            let coef = a * c;
            let slot = self.terms.entry(m.clone()).or_default();
            vvec_axpy(slot, &coef, u);
            if slot.is_empty() {
                self.terms.remove(m);
            }
        }
    }

    pub fn axpy(&mut self, a: &Scalar, other: &TensorElement) {
        assert_eq!(self.nvars, other.nvars, "element arity mismatch");
        if a.is_zero() {
            return;
        }
        for (m, u) in &other.terms {
            let slot = self.terms.entry(m.clone()).or_default();
            vvec_axpy(slot, a, u);
            if slot.is_empty() {
                self.terms.remove(m);
            }
        }
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        out.axpy(&Scalar::one(), other);
        out
    }

    pub fn sub(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        out.axpy(&-Scalar::one(), other);
        out
    }

    pub fn scale(&self, a: &Scalar) -> TensorElement {
        let mut out = TensorElement::zero(self.nvars);
        out.axpy(a, self);
        out
    }

    /// The ≺-maximal exponent vector, or `None` for zero.
    pub fn degree(&self) -> Option<&Monomial> {
        self.terms.keys().next_back()
    }

    /// The full `V`-coefficient of the ≺-maximal monomial.
    pub fn leading(&self) -> Option<(&Monomial, &VVec)> {
        self.terms.iter().next_back()
    }

    pub fn max_total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    /// Componentwise maximum of the exponent vectors.
    pub fn max_exponents(&self) -> Vec<u32> {
        let mut out = vec![0; self.nvars];
        for m in self.terms.keys() {
            for (o, &e) in out.iter_mut().zip(m.exps()) {
                *o = (*o).max(e);
            }
        }
        out
    }

    pub fn max_v_index(&self) -> Option<usize> {
        self.terms
            .values()
            .filter_map(|u| u.keys().next_back().copied())
            .max()
    }

    pub fn to_sparse(&self) -> SparseVec<TensorKey> {
        let mut out = SparseVec::new();
        for (m, u) in &self.terms {
            for (j, c) in u {
                out.insert((m.clone(), *j), c.clone());
            }
        }
        out
    }

    /// Applies a linear map on `V` to every coefficient.
    pub fn map_v(&self, mut f: impl FnMut(&VVec) -> Result<VVec>) -> Result<TensorElement> {
        let mut out = TensorElement::zero(self.nvars);
        for (m, u) in &self.terms {
            let img = f(u)?;
            if !img.is_empty() {
                let slot = out.terms.entry(m.clone()).or_default();
                vvec_axpy(slot, &Scalar::one(), &img);
                if slot.is_empty() {
                    out.terms.remove(m);
                }
            }
        }
        Ok(out)
    }

    /// Applies a linear map on polynomials term by term: `u ⊗ ∂^p ↦ u ⊗ f(∂^p)`.
    pub fn map_poly(&self, nvars: usize, mut f: impl FnMut(&Monomial) -> MultiPoly) -> TensorElement {
        let mut out = TensorElement::zero(nvars);
        for (m, u) in &self.terms {
            out.add_tensor(u, &f(m), &Scalar::one());
        }
        out
    }

    pub fn check_arity(&self, expected: usize) -> Result<()> {
        if self.nvars != expected {
            return Err(Error::ArityMismatch {
                expected,
                found: self.nvars,
            });
        }
        Ok(())
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, u) in self.terms.iter().rev() {
            for (j, c) in u {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "({})*v{}⊗{}", format_scalar(c), j, m)?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct WireTerm {
    v: usize,
    exp: Vec<u32>,
    coef: String,
}

#[derive(Serialize, Deserialize)]
struct WireElement {
    nvars: usize,
    terms: Vec<WireTerm>,
}

impl Serialize for TensorElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .flat_map(|(m, u)| {
                u.iter().map(move |(j, c)| WireTerm {
                    v: *j,
                    exp: m.0.clone(),
                    coef: format_scalar(c),
                })
            })
            .collect();
        WireElement {
            nvars: self.nvars,
            terms,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TensorElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = WireElement::deserialize(d)?;
        let mut e = TensorElement::zero(w.nvars);
        for t in w.terms {
            if t.exp.len() != w.nvars {
                return Err(serde::de::Error::custom(format!(
                    "exponent vector {:?} does not have {} entries",
                    t.exp, w.nvars
                )));
            }
            let c = parse_scalar(&t.coef).map_err(serde::de::Error::custom)?;
            e.add_term(t.v, Monomial(t.exp), c);
        }
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::scalar::int;

    #[test]
    fn degree_of_unit_is_zero_vector() {
        let e = TensorElement::unit(3, 2);
        assert_eq!(e.degree(), Some(&Monomial(vec![0, 0, 0])));
        assert_eq!(TensorElement::zero(2).degree(), None);
    }

    #[test]
    fn leading_collects_full_v_coefficient() {
        let mut e = TensorElement::zero(2);
        e.add_term(0, Monomial(vec![0, 3]), int(1));
        e.add_term(1, Monomial(vec![1, 0]), int(2));
        e.add_term(4, Monomial(vec![1, 0]), int(-1));
        let (m, u) = e.leading().unwrap();
        assert_eq!(m, &Monomial(vec![1, 0]));
        assert_eq!(u.len(), 2);
    }

    #[test]
    fn cancellation_removes_terms() {
        let a = TensorElement::basis(1, Monomial(vec![2]));
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn json_round_trip() {
        let mut e = TensorElement::zero(2);
        e.add_term(0, Monomial(vec![1, 2]), crate::arith::scalar::ratio(-3, 4));
        e.add_term(3, Monomial(vec![0, 0]), int(5));
        let s = serde_json::to_string(&e).unwrap();
        let back: TensorElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
        assert!(serde_json::from_str::<TensorElement>(
            r#"{"nvars":2,"terms":[{"v":0,"exp":[1],"coef":"1"}]}"#
        )
        .is_err());
    }
}
