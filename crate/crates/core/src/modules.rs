//! Virasoro actions on `Ω(λ, α)`, `M(V, Ω(λ, α))` and their tensor products.
//!
//! The central element `C` acts as zero on every module here, so brackets are
//! checked against `[L_m, L_n] = (n − m) L_{m+n}` with the central term
//! evaluated through [`LModule::act_central`].

use std::fmt::Debug;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::poly::{Monomial, MultiPoly};
use crate::arith::scalar::{factorial, int, powi, serde_scalar, Scalar};
use crate::element::TensorElement;
use crate::error::{Error, Result};
use crate::vmodule::VDescriptor;

/// Parameters `(λ, α)` of `Ω(λ, α)`; `λ` must be nonzero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OmegaParams {
    #[serde(with = "serde_scalar")]
    pub lambda: Scalar,
    #[serde(with = "serde_scalar")]
    pub alpha: Scalar,
}

impl OmegaParams {
    pub fn new(lambda: Scalar, alpha: Scalar) -> Self {
        OmegaParams { lambda, alpha }
    }

    pub fn ints(lambda: i64, alpha: i64) -> Self {
        OmegaParams::new(int(lambda), int(alpha))
    }
}

/// `λ^k (∂_var − kα) f(∂_var − k)`.
pub fn omega_in_var(p: &OmegaParams, k: i64, f: &MultiPoly, var: usize) -> MultiPoly {
    let kk = int(k);
    f.shift(var, &kk)
        .mul_linear(var, &(&kk * &p.alpha))
        .scale(&powi(&p.lambda, k))
}

/// `L_k f(∂) = λ^k (∂ − kα) f(∂ − k)` on `Ω(λ, α) = ℚ[∂]`.
pub fn act_omega(p: &OmegaParams, k: i64, f: &MultiPoly) -> MultiPoly {
    assert_eq!(f.nvars(), 1, "act_omega expects a univariate polynomial");
    omega_in_var(p, k, f, 0)
}

/// `k^{i+1} / (i+1)!`, the weight of `L̄_i` in `L_k`.
pub fn lbar_weight(k: i64, i: usize) -> Scalar {
    powi(&int(k), i as i64 + 1) / factorial(i as u32 + 1)
}

/// Full description of `M(V, Ω(λ_0, α_0)) ⊗ Ω(λ_1, α_1) ⊗ ⋯ ⊗ Ω(λ_m, α_m)`.
///
/// `Ω(λ, α)` alone is `M(V_0, Ω(λ, α))` with no further factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorDescriptor {
    pub v: VDescriptor,
    pub factor0: OmegaParams,
    pub factors: Vec<OmegaParams>,
}

impl TensorDescriptor {
    pub fn new(v: VDescriptor, factor0: OmegaParams, factors: Vec<OmegaParams>) -> Result<Self> {
        let d = TensorDescriptor {
            v,
            factor0,
            factors,
        };
        d.check()?;
        Ok(d)
    }

    /// `Ω(λ, α)` as a one-variable descriptor over `V_0`.
    pub fn omega(p: OmegaParams) -> Self {
        TensorDescriptor {
            v: VDescriptor::one_dim(Scalar::zero()),
            factor0: p,
            factors: Vec::new(),
        }
    }

    /// `M(V, Ω(λ, α))`.
    pub fn m_module(v: VDescriptor, p: OmegaParams) -> Self {
        TensorDescriptor {
            v,
            factor0: p,
            factors: Vec::new(),
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.factor0.lambda.is_zero() {
            return Err(Error::InvalidDescriptor("factor0.lambda: must be nonzero".into()));
        }
        for (i, f) in self.factors.iter().enumerate() {
            if f.lambda.is_zero() {
                return Err(Error::InvalidDescriptor(format!(
                    "factors[{i}].lambda: must be nonzero"
                )));
            }
        }
        Ok(())
    }

    pub fn nvars(&self) -> usize {
        1 + self.factors.len()
    }

    /// Number of `Ω` factors past the first (`m`).
    pub fn m(&self) -> usize {
        self.factors.len()
    }

    pub fn params(&self, i: usize) -> &OmegaParams {
        if i == 0 {
            &self.factor0
        } else {
            &self.factors[i - 1]
        }
    }

    pub fn lambdas(&self) -> Vec<Scalar> {
        (0..self.nvars()).map(|i| self.params(i).lambda.clone()).collect()
    }

    pub fn lambdas_distinct(&self) -> bool {
        let mut ls = self.lambdas();
        ls.sort();
        ls.windows(2).all(|w| w[0] != w[1])
    }

    /// λ's pairwise distinct and `α_i ≠ 0` for every `i ≥ 1`.
    pub fn is_standard(&self) -> bool {
        self.lambdas_distinct() && self.factors.iter().all(|f| !f.alpha.is_zero())
    }

    /// Descriptor with factors `i ≥ 1` reordered: new factor `t` is old factor `perm[t]`
    /// (both 1-based, `perm` indexed from 0 for factor 1).
    pub fn permute_factors(&self, perm: &[usize]) -> TensorDescriptor {
        TensorDescriptor {
            v: self.v.clone(),
            factor0: self.factor0.clone(),
            factors: perm.iter().map(|&p| self.factors[p - 1].clone()).collect(),
        }
    }

    /// `L_k` on the tensor module, via the Leibniz rule across factors.
    pub fn act(&self, k: i64, x: &TensorElement) -> Result<TensorElement> {
        act_tensor(self, k, x)
    }
}

/// Contribution of factor 0 (the `M(V, Ω(λ_0, α_0))` part) to `L_k(u ⊗ ∂^p)`.
fn factor0_action(
    v: &VDescriptor,
    p: &OmegaParams,
    k: i64,
    x: &TensorElement,
    out: &mut TensorElement,
) -> Result<()> {
    let nvars = x.nvars();
    let lam = powi(&p.lambda, k);
    let weights: Vec<Scalar> = (0..=v.r()).map(|i| lbar_weight(k, i)).collect();
    let kk = int(k);
    for (mono, u) in x.terms() {
        let shifted = MultiPoly::term(mono.clone(), Scalar::one()).shift(0, &kk);
        let main = shifted.mul_linear(0, &(&kk * &p.alpha));
        out.add_tensor(u, &main, &lam);
        if k == 0 {
            continue;
        }
        for (i, w) in weights.iter().enumerate() {
            let img = v.apply(i, u)?;
            out.add_tensor(&img, &shifted, &(w * &lam));
        }
        debug_assert_eq!(shifted.nvars(), nvars);
    }
    Ok(())
}

/// `L_k` on `M(V, Ω(λ, α)) = V ⊗ ℚ[∂]`:
/// `L_k(v ⊗ f) = v ⊗ λ^k(∂ − kα)f(∂ − k) + Σ_i k^{i+1}/(i+1)! L̄_i v ⊗ λ^k f(∂ − k)`.
pub fn act_m(v: &VDescriptor, p: &OmegaParams, k: i64, x: &TensorElement) -> Result<TensorElement> {
    x.check_arity(1)?;
    let mut out = TensorElement::zero(1);
    factor0_action(v, p, k, x, &mut out)?;
    Ok(out)
}

/// `L_k` on the full tensor product: factor 0 acts through [`act_m`] in `∂_0`,
/// factor `i ≥ 1` through the `Ω(λ_i, α_i)` action in `∂_i`.
pub fn act_tensor(d: &TensorDescriptor, k: i64, x: &TensorElement) -> Result<TensorElement> {
    x.check_arity(d.nvars())?;
    let mut out = TensorElement::zero(d.nvars());
    factor0_action(&d.v, &d.factor0, k, x, &mut out)?;
    for (idx, p) in d.factors.iter().enumerate() {
        let var = idx + 1;
        for (mono, u) in x.terms() {
            let f = MultiPoly::term(mono.clone(), Scalar::one());
            out.add_tensor(u, &omega_in_var(p, k, &f, var), &Scalar::one());
        }
    }
    Ok(out)
}

/// Vector-space operations every module element supports.
pub trait ModuleElement: Clone + PartialEq + Debug {
    fn zero_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn axpy(&mut self, a: &Scalar, other: &Self);

    fn combine(&self, a: &Scalar, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(a, other);
        out
    }
}

impl ModuleElement for MultiPoly {
    fn zero_like(&self) -> Self {
        MultiPoly::zero(self.nvars())
    }
    fn is_zero(&self) -> bool {
        MultiPoly::is_zero(self)
    }
    fn axpy(&mut self, a: &Scalar, other: &Self) {
        self.add_assign_scaled(other, a);
    }
}

impl ModuleElement for TensorElement {
    fn zero_like(&self) -> Self {
        TensorElement::zero(self.nvars())
    }
    fn is_zero(&self) -> bool {
        TensorElement::is_zero(self)
    }
    fn axpy(&mut self, a: &Scalar, other: &Self) {
        TensorElement::axpy(self, a, other);
    }
}

/// A Virasoro module with an exact action.
pub trait LModule {
    type Elem: ModuleElement;

    fn act(&self, k: i64, x: &Self::Elem) -> Result<Self::Elem>;

    /// Action of the central element `C`.
    fn act_central(&self, x: &Self::Elem) -> Self::Elem {
        x.zero_like()
    }
}

impl LModule for OmegaParams {
    type Elem = MultiPoly;
    fn act(&self, k: i64, x: &MultiPoly) -> Result<MultiPoly> {
        if x.nvars() != 1 {
            return Err(Error::ArityMismatch {
                expected: 1,
                found: x.nvars(),
            });
        }
        Ok(act_omega(self, k, x))
    }
}

impl LModule for TensorDescriptor {
    type Elem = TensorElement;
    fn act(&self, k: i64, x: &TensorElement) -> Result<TensorElement> {
        act_tensor(self, k, x)
    }
}

/// Result of checking `[L_m, L_n] x = (n − m) L_{m+n} x + δ_{m+n,0}(m³ − m)/12 · C x`.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketReport<E> {
    pub m: i64,
    pub n: i64,
    /// One residual per probe; all zero on success.
    pub residuals: Vec<E>,
    pub pass: bool,
}

pub fn check_bracket<M: LModule>(
    module: &M,
    m: i64,
    n: i64,
    probes: &[M::Elem],
) -> Result<BracketReport<M::Elem>> {
    let mut residuals = Vec::with_capacity(probes.len());
    for x in probes {
        let mn = module.act(m, &module.act(n, x)?)?;
        let nm = module.act(n, &module.act(m, x)?)?;
        let sum = module.act(m + n, x)?;
        let mut res = mn.combine(&int(-1), &nm);
        res.axpy(&-int(n - m), &sum);
        if m + n == 0 {
            let central = int(m * m * m - m) / int(12);
            res.axpy(&-central, &module.act_central(x));
        }
        residuals.push(res);
    }
    let pass = residuals.iter().all(ModuleElement::is_zero);
    Ok(BracketReport {
        m,
        n,
        residuals,
        pass,
    })
}

/// Monomial `∂^p` of a one-variable element, as a convenience for fixtures.
pub fn mono1(p: u32) -> Monomial {
    Monomial(vec![p])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::poly::linear;
    use crate::arith::scalar::ratio;
    use crate::vmodule::{basis_vec, vvec_axpy, VVec};

    fn d1() -> MultiPoly {
        MultiPoly::var(1, 0)
    }

    #[test]
    fn act_omega_examples() {
        // λ=1, α=0, m=0, f=1 → ∂
        assert_eq!(act_omega(&OmegaParams::ints(1, 0), 0, &MultiPoly::one(1)), d1());
        // λ=2, α=1, m=1, f=1 → 2∂ − 2
        assert_eq!(
            act_omega(&OmegaParams::ints(2, 1), 1, &MultiPoly::one(1)),
            linear(1, 0, -1).scale(&int(2))
        );
        // λ=1, α=1, m=1, f=∂ → (∂ − 1)²
        assert_eq!(act_omega(&OmegaParams::ints(1, 1), 1, &d1()), linear(1, 0, -1).pow(2));
    }

    #[test]
    fn act_omega_negative_mode() {
        // λ=2, α=3, k=−1, f=∂: ½(∂ + 3)(∂ + 1)
        let got = act_omega(&OmegaParams::ints(2, 3), -1, &d1());
        let expect = linear(1, 0, 3).mul(&linear(1, 0, 1)).scale(&ratio(1, 2));
        assert_eq!(got, expect);
    }

    #[test]
    fn act_m_one_dim_example() {
        // V_1, λ=1, α=0, m=1, f=1 → v ⊗ (∂ + 1)
        let v = VDescriptor::one_dim(int(1));
        let x = TensorElement::unit(1, 0);
        let got = act_m(&v, &OmegaParams::ints(1, 0), 1, &x).unwrap();
        assert_eq!(got, TensorElement::from_parts(&basis_vec(0), &linear(1, 0, 1)));
        // cross-check against Ω(1, −1)
        let omega = act_omega(&OmegaParams::ints(1, -1), 1, &MultiPoly::one(1));
        assert_eq!(got, TensorElement::from_parts(&basis_vec(0), &omega));
    }

    #[test]
    fn act_m_zero_mode_is_multiplication_by_d() {
        let v = VDescriptor::shift(int(3), 4);
        let x = TensorElement::unit(1, 2);
        let got = act_m(&v, &OmegaParams::ints(5, 7), 0, &x).unwrap();
        assert_eq!(got, TensorElement::basis(2, mono1(1)));
    }

    #[test]
    fn act_m_shift_example() {
        // ShiftModule(0), λ=1, α=0, m=1, v_0 ⊗ 1 → v_0⊗∂ + (L̄_0 v_0 + ½ L̄_1 v_0) ⊗ 1
        let v = VDescriptor::shift(int(0), 4);
        let got = act_m(&v, &OmegaParams::ints(1, 0), 1, &TensorElement::unit(1, 0)).unwrap();
        let mut u: VVec = v.apply_basis(0, 0).unwrap();
        vvec_axpy(&mut u, &ratio(1, 2), &v.apply_basis(1, 0).unwrap());
        let mut expect = TensorElement::basis(0, mono1(1));
        expect.add_tensor(&u, &MultiPoly::one(1), &int(1));
        assert_eq!(got, expect);
        // L̄_0 v_0 = −v_1, L̄_1 v_0 = v_0
        assert_eq!(u, [(0, ratio(1, 2)), (1, int(-1))].into_iter().collect());
    }

    #[test]
    fn act_tensor_examples() {
        let d = TensorDescriptor::new(
            VDescriptor::one_dim(int(1)),
            OmegaParams::ints(1, 0),
            vec![OmegaParams::ints(2, 1)],
        )
        .unwrap();
        let x = TensorElement::unit(2, 0);
        // m = 0: v ⊗ (∂_0 + ∂_1)
        let sum = MultiPoly::var(2, 0).add(&MultiPoly::var(2, 1));
        assert_eq!(d.act(0, &x).unwrap(), TensorElement::from_parts(&basis_vec(0), &sum));
        // k = 1: v⊗(∂_0 + 1) + 2 v⊗(∂_1 − 1)
        let expect = linear(2, 0, 1).add(&linear(2, 1, -1).scale(&int(2)));
        let got = d.act(1, &x).unwrap();
        assert_eq!(got, TensorElement::from_parts(&basis_vec(0), &expect));
        assert_eq!(got.degree(), Some(&Monomial(vec![1, 0])));
    }

    #[test]
    fn bracket_on_omega_example() {
        // Ω(1,1), m=1, n=−1, f=1: L_1L_{−1}1 − L_{−1}L_1 1 = −2 L_0 1
        let p = OmegaParams::ints(1, 1);
        let one = MultiPoly::one(1);
        let lhs = act_omega(&p, 1, &act_omega(&p, -1, &one))
            .sub(&act_omega(&p, -1, &act_omega(&p, 1, &one)));
        assert_eq!(lhs, act_omega(&p, 0, &one).scale(&int(-2)));
        assert!(check_bracket(&p, 1, -1, &[one]).unwrap().pass);
    }

    #[test]
    fn bracket_equal_modes_vanishes() {
        let d = TensorDescriptor::m_module(VDescriptor::shift(int(2), 6), OmegaParams::ints(3, 1));
        let x = TensorElement::basis(1, mono1(2));
        let lhs = d.act(4, &d.act(4, &x).unwrap()).unwrap();
        assert!(lhs.sub(&lhs).is_zero());
        assert!(check_bracket(&d, 4, 4, &[x]).unwrap().pass);
    }

    #[test]
    fn bracket_shift_module_example() {
        // M(Shift(0), Ω(1,1)), m=2, n=−1, x = v_0 ⊗ ∂: commutator = (n − m) L_1 x = −3 L_1 x
        let d = TensorDescriptor::m_module(VDescriptor::shift(int(0), 6), OmegaParams::ints(1, 1));
        let x = TensorElement::basis(0, mono1(1));
        let comm = d
            .act(2, &d.act(-1, &x).unwrap())
            .unwrap()
            .sub(&d.act(-1, &d.act(2, &x).unwrap()).unwrap());
        assert_eq!(comm, d.act(1, &x).unwrap().scale(&int(-3)));
    }

    #[test]
    fn matrix_module_overflow_propagates() {
        let s = VDescriptor::shift(int(0), 3);
        let actions = (0..=1)
            .map(|i| (0..3).map(|j| s.apply_basis(i, j).unwrap()).collect())
            .collect();
        let v = VDescriptor::Matrix(crate::vmodule::MatrixModule::new(1, 3, actions).unwrap());
        let d = TensorDescriptor::m_module(v, OmegaParams::ints(1, 0));
        let x = TensorElement::unit(1, 2);
        assert!(d.act(1, &x).is_ok());
        let y = d.act(1, &x).unwrap();
        assert!(matches!(d.act(1, &y), Err(Error::WindowOverflow { index: 3, .. })));
    }

    #[test]
    fn rejects_zero_lambda() {
        assert!(TensorDescriptor::new(
            VDescriptor::one_dim(int(0)),
            OmegaParams::ints(0, 1),
            vec![]
        )
        .is_err());
    }
}
