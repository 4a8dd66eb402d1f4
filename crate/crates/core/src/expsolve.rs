//! Recovery of the vectors `v_{i,j}` from samples of
//! `m ↦ Σ_{i,j} μ_i^m m^j v_{i,j}`.
//!
//! All coordinates share one generalized Vandermonde matrix
//! `A[m, (i, j)] = μ_i^m m^j`; it is row-reduced once and the resulting
//! transformation is applied to every coordinate column. On `s(k+1)`
//! consecutive integers the matrix is always invertible: a sequence annihilated
//! by `Π(x − μ_i)^{k+1}` that vanishes at that many consecutive points is zero.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::matrix::{ExactMatrix, SparseVec};
use crate::arith::scalar::{int, powi, serde_scalar_vec, Scalar};
use crate::element::{TensorElement, TensorKey};
use crate::error::{Error, Result};
use crate::modules::TensorDescriptor;

/// Distinct nonzero bases `μ_i` and the polynomial degree bound `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpPolyStructure {
    #[serde(with = "serde_scalar_vec")]
    pub mus: Vec<Scalar>,
    pub degree_bound: usize,
}

impl ExpPolyStructure {
    pub fn new(mus: Vec<Scalar>, degree_bound: usize) -> Result<Self> {
        let s = ExpPolyStructure { mus, degree_bound };
        s.check()?;
        Ok(s)
    }

    pub fn check(&self) -> Result<()> {
        if self.mus.is_empty() {
            return Err(Error::InvalidStructure("at least one base is required".into()));
        }
        if self.mus.iter().any(Zero::is_zero) {
            return Err(Error::InvalidStructure("bases must be nonzero".into()));
        }
        let distinct: BTreeSet<_> = self.mus.iter().collect();
        if distinct.len() != self.mus.len() {
            return Err(Error::InvalidStructure("bases must be pairwise distinct".into()));
        }
        Ok(())
    }

    /// Number of unknown vectors, `s(k+1)`.
    pub fn unknowns(&self) -> usize {
        self.mus.len() * (self.degree_bound + 1)
    }

    /// The default sample window `1, 2, …, s(k+1)`.
    pub fn default_window(&self) -> Vec<i64> {
        (1..=self.unknowns() as i64).collect()
    }

    fn column(&self, i: usize, j: usize) -> usize {
        i * (self.degree_bound + 1) + j
    }

    /// `[μ_i^m m^j]` with one row per window point.
    pub fn matrix(&self, window: &[i64]) -> ExactMatrix {
        let mut a = ExactMatrix::zeros(window.len(), self.unknowns());
        for (row, &m) in window.iter().enumerate() {
            let mm = int(m);
            for (i, mu) in self.mus.iter().enumerate() {
                let base = powi(mu, m);
                let mut pw = base;
                for j in 0..=self.degree_bound {
                    a[(row, self.column(i, j))] = pw.clone();
                    pw *= &mm;
                }
            }
        }
        a
    }

    /// Evaluates `Σ μ_i^m m^j v_{i,j}` for a coefficient table.
    pub fn synthesize(&self, table: &[Vec<Vec<Scalar>>], m: i64) -> Vec<Scalar> {
        let dim = table
            .first()
            .and_then(|r| r.first())
            .map_or(0, Vec::len);
        let mut out = vec![Scalar::zero(); dim];
        let mm = int(m);
        for (mu, row) in self.mus.iter().zip(table) {
            let mut w = powi(mu, m);
            for v in &row[..=self.degree_bound] {
                for (o, x) in out.iter_mut().zip(v) {
                    *o += &w * x;
                }
                w *= &mm;
            }
        }
        out
    }
}

/// Sample points `m` and the sampled vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSet {
    pub window: Vec<i64>,
    pub values: Vec<SampleValue>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SampleValue(#[serde(with = "serde_scalar_vec")] pub Vec<Scalar>);

impl SampleSet {
    pub fn new(window: Vec<i64>, values: Vec<Vec<Scalar>>) -> Self {
        SampleSet {
            window,
            values: values.into_iter().map(SampleValue).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.values.first().map_or(0, |v| v.0.len())
    }
}

/// Coefficient table `v_{i,j}` indexed `[i][j]`, each a vector of the sample dimension.
pub type CoefficientTable = Vec<Vec<Vec<Scalar>>>;

pub fn separate(structure: &ExpPolyStructure, samples: &SampleSet) -> Result<CoefficientTable> {
    structure.check()?;
    let window = &samples.window;
    let n = structure.unknowns();
    if window.len() != samples.values.len() {
        return Err(Error::InvalidStructure(format!(
            "{} window points but {} sample vectors",
            window.len(),
            samples.values.len()
        )));
    }
    let distinct: BTreeSet<_> = window.iter().collect();
    if distinct.len() != window.len() {
        return Err(Error::InvalidStructure("window points must be distinct".into()));
    }
    if window.len() < n {
        return Err(Error::InvalidStructure(format!(
            "window has {} points, structure needs at least {n}",
            window.len()
        )));
    }
    let dim = samples.dim();
    if samples.values.iter().any(|v| v.0.len() != dim) {
        return Err(Error::InvalidStructure("sample vectors differ in length".into()));
    }

    let a = structure.matrix(window);
    let rows = window.len();
    let aug = a.hstack(&ExactMatrix::identity(rows))?.rref_limited(n);
    if aug.rank < n {
        return Err(Error::SingularSystem {
            rank: aug.rank,
            needed: n,
        });
    }
    // E · A = [I; 0] where E is the accumulated row transformation.
    let mut top = ExactMatrix::zeros(n, rows);
    let mut bottom = ExactMatrix::zeros(rows - n, rows);
    for r in 0..rows {
        for c in 0..rows {
            let e = aug.reduced[(r, n + c)].clone();
            if r < n {
                top[(r, c)] = e;
            } else {
                bottom[(r - n, c)] = e;
            }
        }
    }
    let g = ExactMatrix::from_rows(samples.values.iter().map(|v| v.0.clone()).collect())
        .unwrap_or_else(|_| ExactMatrix::zeros(rows, 0));
    let g = if dim == 0 { ExactMatrix::zeros(rows, 0) } else { g };

    // Coordinates are independent: one column of G at a time.
    let mut table = vec![vec![vec![Scalar::zero(); dim]; structure.degree_bound + 1]; structure.mus.len()];
    for coord in 0..dim {
        let col: Vec<Scalar> = (0..rows).map(|r| g[(r, coord)].clone()).collect();
        for r in 0..(rows - n) {
            let check = (0..rows).fold(Scalar::zero(), |acc, c| acc + &bottom[(r, c)] * &col[c]);
            if !check.is_zero() {
                return Err(Error::InconsistentSamples);
            }
        }
        for (pivot_row, &pc) in aug.pivots.iter().enumerate() {
            let x = (0..rows).fold(Scalar::zero(), |acc, c| acc + &top[(pivot_row, c)] * &col[c]);
            let i = pc / (structure.degree_bound + 1);
            let j = pc % (structure.degree_bound + 1);
            table[i][j][coord] = x;
        }
    }
    Ok(table)
}

/// All exponential-polynomial components of `k ↦ L_k(elem)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Separation {
    pub structure: ExpPolyStructure,
    pub window: Vec<i64>,
    /// `components[i][j]` is the coefficient of `μ_i^k k^j`.
    pub components: Vec<Vec<TensorElement>>,
}

impl Separation {
    pub fn component(&self, mu: &Scalar, j: usize) -> Option<&TensorElement> {
        let i = self.structure.mus.iter().position(|m| m == mu)?;
        self.components[i].get(j)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Scalar, usize, &TensorElement)> {
        self.structure
            .mus
            .iter()
            .zip(&self.components)
            .flat_map(|(mu, row)| row.iter().enumerate().map(move |(j, c)| (mu, j, c)))
    }
}

/// Distinct λ's of `d` in order of first appearance, and the largest power of
/// `k` that `L_k(elem)` can carry.
pub fn action_structure(d: &TensorDescriptor, elem: &TensorElement) -> Result<ExpPolyStructure> {
    let mut mus: Vec<Scalar> = Vec::new();
    for l in d.lambdas() {
        if !mus.contains(&l) {
            mus.push(l);
        }
    }
    let r = d.v.r();
    let mut bound = 0usize;
    for (mono, _) in elem.terms() {
        let e = mono.exps();
        bound = bound.max(e[0] as usize + r + 1);
        for &p in &e[1..] {
            bound = bound.max(p as usize + 1);
        }
    }
    ExpPolyStructure::new(mus, bound)
}

/// Separates `k ↦ L_k(elem)` into its `λ^k k^j` components. Every component is
/// a linear combination of the `L_k(elem)` and so lies in any submodule that
/// contains `elem`.
pub fn separate_action(
    d: &TensorDescriptor,
    elem: &TensorElement,
    window: Option<&[i64]>,
) -> Result<Separation> {
    let structure = action_structure(d, elem)?;
    let window: Vec<i64> = match window {
        Some(w) => w.to_vec(),
        None => structure.default_window(),
    };
    let mut images: Vec<SparseVec<TensorKey>> = Vec::with_capacity(window.len());
    for &k in &window {
        images.push(d.act(k, elem)?.to_sparse());
    }
    let keys: Vec<TensorKey> = images
        .iter()
        .flat_map(|im| im.keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let values = images
        .iter()
        .map(|im| {
            keys.iter()
                .map(|key| im.get(key).cloned().unwrap_or_else(Scalar::zero))
                .collect()
        })
        .collect();
    let samples = SampleSet::new(window.clone(), values);
    let table = separate(&structure, &samples)?;
    let nvars = d.nvars();
    let components = table
        .iter()
        .map(|row| {
            row.iter()
                .map(|coords| {
                    let sv: SparseVec<TensorKey> = keys
                        .iter()
                        .zip(coords)
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(k, c)| (k.clone(), c.clone()))
                        .collect();
                    TensorElement::from_sparse(nvars, &sv)
                })
                .collect()
        })
        .collect();
    Ok(Separation {
        structure,
        window,
        components,
    })
}

/// The coefficient of `μ^k k^j` in `L_k(elem)`; zero when `(μ, j)` does not occur.
pub fn extract_component(
    d: &TensorDescriptor,
    elem: &TensorElement,
    window: Option<&[i64]>,
    mu: &Scalar,
    j: usize,
) -> Result<TensorElement> {
    let sep = separate_action(d, elem, window)?;
    Ok(sep
        .component(mu, j)
        .cloned()
        .unwrap_or_else(|| TensorElement::zero(d.nvars())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::poly::Monomial;
    use crate::arith::scalar::ratio;
    use crate::modules::OmegaParams;
    use crate::vmodule::{basis_vec, VDescriptor};

    fn v(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn single_constant_term() {
        let s = ExpPolyStructure::new(v(&[1]), 0).unwrap();
        let t = separate(&s, &SampleSet::new(vec![0], vec![v(&[7])])).unwrap();
        assert_eq!(t, vec![vec![v(&[7])]]);
    }

    #[test]
    fn two_bases_by_hand() {
        let s = ExpPolyStructure::new(v(&[1, 2]), 0).unwrap();
        let t = separate(&s, &SampleSet::new(vec![0, 1], vec![v(&[1, 0]), v(&[1, 1])])).unwrap();
        assert_eq!(t, vec![vec![v(&[1, -1])], vec![v(&[0, 1])]]);
    }

    #[test]
    fn linear_term_by_finite_differences() {
        let s = ExpPolyStructure::new(v(&[1]), 1).unwrap();
        let t = separate(&s, &SampleSet::new(vec![0, 1], vec![v(&[2]), v(&[5])])).unwrap();
        assert_eq!(t, vec![vec![v(&[2]), v(&[3])]]);
    }

    #[test]
    fn singular_window_detected() {
        // μ = ±1 on {1, 3}: both rows equal up to sign pattern (1, −1), (1, −1).
        let s = ExpPolyStructure::new(v(&[1, -1]), 0).unwrap();
        let err = separate(&s, &SampleSet::new(vec![1, 3], vec![v(&[1]), v(&[1])])).unwrap_err();
        assert!(matches!(err, Error::SingularSystem { rank: 1, needed: 2 }));
    }

    #[test]
    fn inconsistent_samples_detected() {
        // A constant model cannot produce 1, 2.
        let s = ExpPolyStructure::new(v(&[1]), 0).unwrap();
        let err = separate(&s, &SampleSet::new(vec![0, 1], vec![v(&[1]), v(&[2])])).unwrap_err();
        assert_eq!(err, Error::InconsistentSamples);
    }

    #[test]
    fn structure_validation() {
        assert!(ExpPolyStructure::new(v(&[1, 1]), 0).is_err());
        assert!(ExpPolyStructure::new(v(&[0]), 0).is_err());
        let s = ExpPolyStructure::new(v(&[1, 2]), 1).unwrap();
        assert!(separate(&s, &SampleSet::new(vec![1, 2], vec![v(&[1]), v(&[1])])).is_err());
    }

    fn two_factor(beta: i64, a0: i64, a1: i64) -> TensorDescriptor {
        TensorDescriptor::new(
            VDescriptor::one_dim(int(beta)),
            OmegaParams::ints(1, a0),
            vec![OmegaParams::ints(2, a1)],
        )
        .unwrap()
    }

    #[test]
    fn extract_lambda1_linear_component() {
        let d = two_factor(3, 5, 7);
        let x = TensorElement::unit(2, 0);
        let got = extract_component(&d, &x, None, &int(2), 1).unwrap();
        assert_eq!(got, x.scale(&int(-7)));
    }

    #[test]
    fn extract_lambda0_components() {
        let d = two_factor(3, 5, 7);
        let x = TensorElement::unit(2, 0);
        let c0 = extract_component(&d, &x, None, &int(1), 0).unwrap();
        assert_eq!(c0, TensorElement::basis(0, Monomial(vec![1, 0])));
        // k¹ coefficient: (β − α_0) v ⊗ 1
        let c1 = extract_component(&d, &x, None, &int(1), 1).unwrap();
        assert_eq!(c1, x.scale(&int(-2)));
    }

    #[test]
    fn absent_component_is_zero() {
        let d = two_factor(3, 5, 7);
        let x = TensorElement::unit(2, 0);
        assert!(extract_component(&d, &x, None, &int(9), 0).unwrap().is_zero());
        assert!(extract_component(&d, &x, None, &int(2), 5).unwrap().is_zero());
    }

    #[test]
    fn shift_module_top_component() {
        // L_k(v_0 ⊗ 1) in M(Shift(0), Ω(2, 1)): coefficient of 2^k k² is ½ L̄_1 v_0.
        let d = TensorDescriptor::m_module(VDescriptor::shift(int(0), 4), OmegaParams::ints(2, 1));
        let x = TensorElement::unit(1, 0);
        let c = extract_component(&d, &x, None, &int(2), 2).unwrap();
        let expect = TensorElement::from_parts(&basis_vec(0), &crate::MultiPoly::one(1))
            .scale(&ratio(1, 2));
        assert_eq!(c, expect);
    }

    #[test]
    fn window_choice_does_not_matter() {
        let d = two_factor(1, 2, 3);
        let mut x = TensorElement::basis(0, Monomial(vec![1, 2]));
        x.add_term(0, Monomial(vec![0, 1]), ratio(1, 3));
        let a = separate_action(&d, &x, None).unwrap();
        let n = a.structure.unknowns() as i64;
        let w: Vec<i64> = (-3..-3 + n + 2).collect();
        let b = separate_action(&d, &x, Some(&w)).unwrap();
        assert_eq!(a.components, b.components);
    }
}
