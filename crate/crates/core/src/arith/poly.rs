//! Sparse multivariate polynomials in `∂_0, …, ∂_m` over [`Scalar`].

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::scalar::{binomial, format_scalar, int, powi, Scalar};

/// Exponent vector of a monomial `∂_0^{p_0} ⋯ ∂_m^{p_m}`.
///
/// The derived `Ord` is lexicographic with index 0 most significant, which is
/// exactly the total order used for degrees of tensor elements.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise `self ≤ bound`.
    pub fn within_box(&self, bound: &[u32]) -> bool {
        self.0.iter().zip(bound).all(|(a, b)| a <= b)
    }

    /// Every exponent vector of `nvars` entries with total degree at most `max_total`,
    /// in increasing order.
    pub fn all_up_to_total(nvars: usize, max_total: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; nvars];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if i == cur.len() {
                out.push(Monomial(cur.clone()));
                return;
            }
            for e in 0..=left {
                cur[i] = e;
                rec(i + 1, left - e, cur, out);
            }
            cur[i] = 0;
        }
        rec(0, max_total, &mut cur, &mut out);
        out.sort();
        out
    }

    /// Every exponent vector componentwise bounded by `bound`, in increasing order.
    pub fn all_in_box(bound: &[u32]) -> Vec<Monomial> {
        let mut out = vec![Vec::new()];
        for &b in bound {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<u32>| {
                    (0..=b).map(move |e| {
                        let mut p = prefix.clone();
                        p.push(e);
                        p
                    })
                })
                .collect();
        }
        let mut out: Vec<Monomial> = out.into_iter().map(Monomial).collect();
        out.sort();
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "d{i}")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial with a fixed number of variables. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Scalar::one())
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        Self::term(Monomial::var(nvars, i), Scalar::one())
    }

    pub fn term(mono: Monomial, c: Scalar) -> Self {
        let mut p = MultiPoly::zero(mono.nvars());
        p.add_term(mono, c);
        p
    }

    /// Univariate polynomial from coefficients in increasing degree.
    pub fn univariate(coeffs: &[Scalar]) -> Self {
        let mut p = MultiPoly::zero(1);
        for (d, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial(vec![d as u32]), c.clone());
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = MultiPoly::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mono: &Monomial) -> Scalar {
        self.terms.get(mono).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Largest monomial in the lexicographic order, with its coefficient.
    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    pub fn add_term(&mut self, mono: Monomial, c: Scalar) {
        assert_eq!(mono.nvars(), self.nvars, "monomial arity mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &MultiPoly, factor: &Scalar) {
        assert_eq!(self.nvars, other.nvars);
        if factor.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * factor);
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.add_assign_scaled(other, &Scalar::one());
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.add_assign_scaled(other, &-Scalar::one());
        out
    }

    pub fn scale(&self, factor: &Scalar) -> MultiPoly {
        if factor.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * factor))
                .collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = MultiPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(self.nvars);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// `f(∂_var − k)`: substitutes `∂_var ↦ ∂_var − k` and expands.
    pub fn shift(&self, var: usize, k: &Scalar) -> MultiPoly {
        assert!(var < self.nvars, "variable index out of range");
        if k.is_zero() {
            return self.clone();
        }
        let neg_k = -k;
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            for j in 0..=e {
                // C(e, j) ∂^j (−k)^{e−j}
                let coef = c * binomial(e, j) * powi(&neg_k, (e - j) as i64);
                let mut exps = m.0.clone();
                exps[var] = j;
                out.add_term(Monomial(exps), coef);
            }
        }
        out
    }

    /// `(∂_var − c)·f`.
    pub fn mul_linear(&self, var: usize, c: &Scalar) -> MultiPoly {
        assert!(var < self.nvars, "variable index out of range");
        let mut out = MultiPoly::zero(self.nvars);
        for (m, coef) in &self.terms {
            let mut exps = m.0.clone();
            exps[var] += 1;
            out.add_term(Monomial(exps), coef.clone());
            out.add_term(m.clone(), -(coef * c));
        }
        out
    }

    /// Reindexes variables: variable `i` of `self` becomes variable `map[i]` of a
    /// polynomial in `nvars` variables.
    pub fn rename(&self, map: &[usize], nvars: usize) -> MultiPoly {
        assert_eq!(map.len(), self.nvars);
        let mut out = MultiPoly::zero(nvars);
        for (m, c) in &self.terms {
            let mut exps = vec![0; nvars];
            for (i, &e) in m.0.iter().enumerate() {
                exps[map[i]] += e;
            }
            out.add_term(Monomial(exps), c.clone());
        }
        out
    }

    /// Substitutes a univariate `self` at the polynomial `g`: returns `self(g)`.
    pub fn compose_univariate(&self, g: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, 1, "compose_univariate needs a univariate polynomial");
        let deg = self.degree_in(0).unwrap_or(0);
        let mut acc = MultiPoly::zero(g.nvars);
        for d in (0..=deg).rev() {
            acc = acc.mul(g);
            acc.add_term(Monomial::one(g.nvars), self.coeff(&Monomial(vec![d])));
        }
        acc
    }

    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.nvars);
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .zip(point)
                    .fold(c.clone(), |acc, (&e, x)| acc * powi(x, e as i64))
            })
            .fold(Scalar::zero(), |a, b| a + b)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})*{}", format_scalar(c), m)?;
        }
        Ok(())
    }
}

/// `(∂_var + k)` as a polynomial; handy for building test fixtures.
pub fn linear(nvars: usize, var: usize, k: i64) -> MultiPoly {
    let mut p = MultiPoly::var(nvars, var);
    p.add_term(Monomial::one(nvars), int(k));
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::scalar::ratio;
    use proptest::prelude::*;

    fn d(nvars: usize, i: usize) -> MultiPoly {
        MultiPoly::var(nvars, i)
    }

    #[test]
    fn shift_identity_substitution() {
        let f = d(1, 0);
        assert_eq!(f.shift(0, &int(0)), f);
    }

    #[test]
    fn shift_square_by_one() {
        let f = d(1, 0).pow(2);
        // ∂² − 2∂ + 1
        let expect = MultiPoly::univariate(&[int(1), int(-2), int(1)]);
        assert_eq!(f.shift(0, &int(1)), expect);
    }

    #[test]
    fn shift_second_variable() {
        let f = d(2, 0).mul(&d(2, 1));
        let expect = f.sub(&d(2, 0).scale(&int(3)));
        assert_eq!(f.shift(1, &int(3)), expect);
    }

    #[test]
    fn mul_linear_matches_product() {
        let f = linear(2, 0, 2).mul(&d(2, 1));
        let lin = linear(2, 1, -5);
        assert_eq!(f.mul_linear(1, &int(5)), lin.mul(&f));
    }

    #[test]
    fn compose_and_rename() {
        // f(t) = t² + 1 at t = ∂0 + ∂1
        let f = MultiPoly::univariate(&[int(1), int(0), int(1)]);
        let g = d(2, 0).add(&d(2, 1));
        let expect = g.mul(&g).add(&MultiPoly::one(2));
        assert_eq!(f.compose_univariate(&g), expect);
        let r = d(2, 0).mul(&d(2, 0)).rename(&[1, 0], 2);
        assert_eq!(r, d(2, 1).pow(2));
    }

    #[test]
    fn leading_term_is_lex_max() {
        let f = d(3, 1).pow(3).add(&d(3, 0)).add(&d(3, 2).pow(5));
        assert_eq!(f.leading_term().unwrap().0, &Monomial(vec![1, 0, 0]));
    }

    #[test]
    fn monomial_enumerations() {
        assert_eq!(Monomial::all_up_to_total(3, 2).len(), 10);
        assert_eq!(Monomial::all_in_box(&[1, 2]).len(), 6);
    }

    fn poly2() -> impl Strategy<Value = MultiPoly> {
        proptest::collection::vec(((0u32..4, 0u32..4), -6i64..6, 1i64..4), 0..5).prop_map(
            |terms| {
                MultiPoly::from_terms(
                    2,
                    terms
                        .into_iter()
                        .map(|((a, b), n, q)| (Monomial(vec![a, b]), ratio(n, q))),
                )
            },
        )
    }

    proptest! {
        #[test]
        fn shift_inverts(f in poly2(), var in 0usize..2, n in -5i64..5, q in 1i64..4) {
            let k = ratio(n, q);
            prop_assert_eq!(f.shift(var, &k).shift(var, &-k.clone()), f);
        }

        #[test]
        fn shift_is_multiplicative(f in poly2(), g in poly2(), var in 0usize..2, n in -4i64..4) {
            let k = int(n);
            prop_assert_eq!(f.mul(&g).shift(var, &k), f.shift(var, &k).mul(&g.shift(var, &k)));
        }

        #[test]
        fn shift_agrees_with_evaluation(f in poly2(), x in -5i64..5, y in -5i64..5, n in -4i64..4) {
            let k = int(n);
            let shifted = f.shift(0, &k);
            prop_assert_eq!(shifted.eval(&[int(x), int(y)]), f.eval(&[int(x) - &k, int(y)]));
        }
    }
}
