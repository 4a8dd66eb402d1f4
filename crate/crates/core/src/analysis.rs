//! Constructive irreducibility machinery: degree reduction, generation from
//! `v ⊗ 1`, projected closure, exact invariance checks on graded subspaces,
//! the `V ⊗ W_s` filtration, and reducibility exhibits.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::matrix::{SparseSpan, SparseVec};
use crate::arith::poly::{Monomial, MultiPoly};
use crate::arith::scalar::{factorial, int, serde_scalar, Scalar};
use crate::element::{TensorElement, TensorKey};
use crate::error::{Error, Result};
use crate::expsolve::separate_action;
use crate::modules::{act_m, OmegaParams, TensorDescriptor};
use crate::vmodule::{basis_vec, VDescriptor};

/// Finite window of `V ⊗ ℚ[∂]`: total ∂-degree at most `degree`, `V`-indices
/// below `v_indices` (always just `v_0` for one-dimensional `V`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub degree: u32,
    pub v_indices: usize,
}

impl Window {
    pub fn new(degree: u32, v_indices: usize) -> Self {
        Window { degree, v_indices }
    }

    pub fn v_count(&self, v: &VDescriptor) -> usize {
        if v.is_one_dim() {
            1
        } else {
            self.v_indices
        }
    }

    pub fn contains_key(&self, v: &VDescriptor, key: &TensorKey) -> bool {
        key.0.total_degree() <= self.degree && key.1 < self.v_count(v)
    }

    pub fn contains(&self, v: &VDescriptor, x: &TensorElement) -> bool {
        x.terms()
            .all(|(m, u)| m.total_degree() <= self.degree && u.keys().all(|&j| j < self.v_count(v)))
    }

    pub fn keys(&self, d: &TensorDescriptor) -> Vec<TensorKey> {
        let monos = Monomial::all_up_to_total(d.nvars(), self.degree);
        let mut out = Vec::new();
        for m in monos {
            for j in 0..self.v_count(&d.v) {
                out.push((m.clone(), j));
            }
        }
        out
    }

    pub fn basis(&self, d: &TensorDescriptor) -> Vec<TensorElement> {
        self.keys(d)
            .into_iter()
            .map(|(m, j)| TensorElement::basis(j, m))
            .collect()
    }

    pub fn project(&self, v: &VDescriptor, x: &TensorElement) -> TensorElement {
        let mut sv = x.to_sparse();
        sv.retain(|k, _| self.contains_key(v, k));
        TensorElement::from_sparse(x.nvars(), &sv)
    }
}

/// One step of the degree-lowering argument.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub input_degree: Monomial,
    /// First index with a positive exponent in the input degree.
    pub branch: usize,
    #[serde(with = "serde_scalar")]
    pub mu: Scalar,
    pub power: usize,
    /// Whether the slot `(λ_branch, top power)` worked, or a fallback slot was used.
    pub prescribed: bool,
    pub output: TensorElement,
    pub output_degree: Monomial,
}

/// Produces a nonzero element of strictly smaller degree in the submodule
/// generated by `w`.
///
/// With `q = deg(w)` and `i'` the first index with `q_{i'} > 0`, the element is
/// the coefficient of `λ_{i'}^k k^{top}` in `L_k(w)`, where `top = q_0 + r + 1`
/// (scaled by `(r+1)!`) when `i' = 0` and `top = q_{i'} + 1` otherwise. Its
/// leading part is `(−1)^{q_0} L̄_r v_q ⊗ ∂_1^{q_1}⋯` respectively
/// `(−1)^{q_{i'}+1} α_{i'} v_q ⊗ ∂^q / ∂_{i'}^{q_{i'}}`. If that slot is zero
/// every other component is tried before giving up.
pub fn reduce_degree(d: &TensorDescriptor, w: &TensorElement) -> Result<Reduction> {
    w.check_arity(d.nvars())?;
    let q = w
        .degree()
        .cloned()
        .ok_or_else(|| Error::Precondition("cannot reduce the zero element".into()))?;
    let Some(branch) = q.exps().iter().position(|&e| e > 0) else {
        return Err(Error::Precondition(
            "element already has degree 0; nothing to reduce".into(),
        ));
    };
    let sep = separate_action(d, w, None)?;
    let r = d.v.r();
    let mu = d.params(branch).lambda.clone();
    let (power, scale) = if branch == 0 {
        (q.exps()[0] as usize + r + 1, factorial(r as u32 + 1))
    } else {
        (q.exps()[branch] as usize + 1, Scalar::one())
    };
    let smaller = |x: &TensorElement| x.degree().is_some_and(|deg| deg < &q);
    if let Some(c) = sep.component(&mu, power) {
        let c = c.scale(&scale);
        if smaller(&c) {
            let output_degree = c.degree().cloned().unwrap();
            return Ok(Reduction {
                input_degree: q,
                branch,
                mu,
                power,
                prescribed: true,
                output: c,
                output_degree,
            });
        }
    }
    let best = sep
        .iter()
        .filter(|(_, _, c)| smaller(c))
        .min_by(|a, b| a.2.degree().cmp(&b.2.degree()));
    match best {
        Some((m, j, c)) => Ok(Reduction {
            input_degree: q,
            branch,
            mu: m.clone(),
            power: j,
            prescribed: false,
            output_degree: c.degree().cloned().unwrap(),
            output: c.clone(),
        }),
        None => Err(Error::NotReducible {
            degree: q.exps().to_vec(),
        }),
    }
}

/// Outcome of [`generate_from`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generation {
    pub window: Window,
    pub window_dim: usize,
    pub reached_dim: usize,
    /// Elements skipped because acting on them needed `L̄_i` columns past the
    /// `V` window.
    pub overflow_skips: usize,
    pub full: bool,
}

/// Spans the part of the submodule generated by `start` that can be reached
/// inside `window`, using only honestly computed elements: `start`, images
/// `L_k x` for `|k| ≤ k_bound`, and separated components of `k ↦ L_k x`.
///
/// Work happens in a slightly wider `V`-window; the answer is the intersection
/// of the reached span with the target window.
pub fn generate_from(
    d: &TensorDescriptor,
    start: &TensorElement,
    window: Window,
    k_bound: i64,
) -> Result<(Generation, Vec<TensorElement>)> {
    start.check_arity(d.nvars())?;
    let target = window.v_count(&d.v);
    let work_v = if d.v.is_one_dim() {
        1
    } else {
        (target + d.v.r() + 1).max(start.max_v_index().map_or(0, |j| j + 1))
    };
    let work = Window::new(window.degree, work_v);
    let key = |k: &TensorKey| (!window.contains_key(&d.v, k), k.0.clone(), k.1);
    let to_keyed = |x: &TensorElement| -> SparseVec<(bool, Monomial, usize)> {
        x.to_sparse()
            .into_iter()
            .map(|(k, c)| (key(&k), c))
            .collect()
    };
    let from_keyed = |v: &SparseVec<(bool, Monomial, usize)>| {
        let sv: SparseVec<TensorKey> = v
            .iter()
            .map(|((_, m, j), c)| ((m.clone(), *j), c.clone()))
            .collect();
        TensorElement::from_sparse(d.nvars(), &sv)
    };

    let mut span = SparseSpan::new();
    let mut queue = vec![start.clone()];
    let mut overflow_skips = 0;
    while let Some(x) = queue.pop() {
        if x.is_zero() || !work.contains(&d.v, &x) {
            continue;
        }
        let Some(row) = span.insert(&to_keyed(&x)) else {
            continue;
        };
        let row = from_keyed(&row);
        match separate_action(d, &row, None) {
            Ok(sep) => queue.extend(sep.iter().map(|(_, _, c)| c.clone())),
            Err(Error::WindowOverflow { .. }) => overflow_skips += 1,
            Err(e) => return Err(e),
        }
        for k in -k_bound..=k_bound {
            match d.act(k, &row) {
                Ok(y) => queue.push(y),
                Err(Error::WindowOverflow { .. }) => overflow_skips += 1,
                Err(e) => return Err(e),
            }
        }
    }
    let reached: Vec<TensorElement> = span
        .rows_with_lead(|k| !k.0)
        .iter()
        .map(from_keyed)
        .collect();
    let window_dim = window.keys(d).len();
    let gen = Generation {
        window,
        window_dim,
        reached_dim: reached.len(),
        overflow_skips,
        full: reached.len() == window_dim,
    };
    Ok((gen, reached))
}

/// Projected closure: the smallest subspace of the window containing the
/// projected seeds and closed under `x ↦ proj(L_k x)` for `|k| ≤ k_bound`.
///
/// This is evidence about the module, not a submodule computation: projection
/// discards the parts of `L_k x` that leave the window.
pub fn closure(
    d: &TensorDescriptor,
    seeds: &[TensorElement],
    window: Window,
    k_bound: i64,
) -> Result<Vec<TensorElement>> {
    let mut span = SparseSpan::<TensorKey>::new();
    let mut queue: Vec<TensorElement> = seeds.iter().map(|s| window.project(&d.v, s)).collect();
    while let Some(x) = queue.pop() {
        x.check_arity(d.nvars())?;
        let Some(row) = span.insert(&x.to_sparse()) else {
            continue;
        };
        let row = TensorElement::from_sparse(d.nvars(), &row);
        for k in -k_bound..=k_bound {
            queue.push(window.project(&d.v, &d.act(k, &row)?));
        }
    }
    let mut basis: Vec<TensorElement> = span
        .rows()
        .map(|r| TensorElement::from_sparse(d.nvars(), r))
        .collect();
    basis.sort_by(|a, b| a.degree().cmp(&b.degree()));
    Ok(basis)
}

/// Which spanning family defines `W_s` inside the `(∂_a, ∂_b)` variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `f(∂_a) (∂_a + ∂_b)^n`, `deg f ≤ s`.
    First,
    /// `(∂_a + ∂_b)^n f(∂_b)`, `deg f ≤ s`.
    Second,
}

/// A graded subspace `V ⊗ P` of the tensor module, described by a spanning
/// family of homogeneous polynomials `P`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Subspace {
    /// `V ⊗ ∂_var ℚ[∂]`.
    DivisibleBy { var: usize },
    /// `V ⊗ W_s ⊗ ℚ[other variables]` for the pair `(a, b)`.
    Diagonal {
        a: usize,
        b: usize,
        s: u32,
        side: Side,
    },
}

impl Subspace {
    /// Homogeneous polynomials of total degree at most `degree` spanning the
    /// degree-≤`degree` part of `P`.
    pub fn polys(&self, nvars: usize, degree: u32) -> Vec<MultiPoly> {
        match *self {
            Subspace::DivisibleBy { var } => {
                if degree == 0 {
                    return Vec::new();
                }
                Monomial::all_up_to_total(nvars, degree - 1)
                    .into_iter()
                    .map(|m| MultiPoly::term(m.mul(&Monomial::var(nvars, var)), Scalar::one()))
                    .collect()
            }
            Subspace::Diagonal { a, b, s, side } => {
                let others: Vec<usize> = (0..nvars).filter(|&i| i != a && i != b).collect();
                let sum = MultiPoly::var(nvars, a).add(&MultiPoly::var(nvars, b));
                let edge = match side {
                    Side::First => a,
                    Side::Second => b,
                };
                let mut out = Vec::new();
                for t in 0..=s.min(degree) {
                    for n in 0..=(degree - t) {
                        let core = MultiPoly::var(nvars, edge).pow(t).mul(&sum.pow(n));
                        let rest = degree - t - n;
                        for m in Monomial::all_up_to_total(others.len(), rest) {
                            let mut exps = vec![0; nvars];
                            for (o, &e) in others.iter().zip(m.exps()) {
                                exps[*o] = e;
                            }
                            out.push(core.mul(&MultiPoly::term(Monomial(exps), Scalar::one())));
                        }
                    }
                }
                out
            }
        }
    }

    pub fn elements(&self, nvars: usize, degree: u32, v_indices: &BTreeSet<usize>) -> Vec<TensorElement> {
        let polys = self.polys(nvars, degree);
        v_indices
            .iter()
            .flat_map(|&j| {
                polys
                    .iter()
                    .map(move |f| TensorElement::from_parts(&basis_vec(j), f))
            })
            .collect()
    }

    fn span(&self, nvars: usize, degree: u32, v_indices: &BTreeSet<usize>) -> SparseSpan<TensorKey> {
        let mut span = SparseSpan::new();
        for e in self.elements(nvars, degree, v_indices) {
            span.insert(&e.to_sparse());
        }
        span
    }
}

/// A tested element whose image left the subspace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceFailure {
    pub k: i64,
    pub element: TensorElement,
    pub residual: TensorElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Invariance {
    pub subspace: Subspace,
    pub window: Window,
    pub k_bound: i64,
    pub tested: usize,
    pub failures: Vec<InvarianceFailure>,
    /// A window basis element outside the subspace, showing it is proper.
    pub outside_witness: Option<TensorElement>,
    pub nonzero: bool,
    pub pass: bool,
}

/// Checks `L_k x ∈ V ⊗ P` exactly for every spanning element `x` of degree
/// below `window.degree` and every `|k| ≤ k_bound`.
///
/// Because `P` is graded, membership of an image of degree `≤ window.degree`
/// is decided exactly against the spanning elements of that degree.
pub fn check_invariance(
    d: &TensorDescriptor,
    subspace: &Subspace,
    window: Window,
    k_bound: i64,
) -> Result<Invariance> {
    if window.degree == 0 {
        return Err(Error::Precondition("invariance needs window degree >= 1".into()));
    }
    let nvars = d.nvars();
    let test_v: BTreeSet<usize> = (0..window.v_count(&d.v)).collect();
    let tests = subspace.elements(nvars, window.degree - 1, &test_v);
    let mut images = Vec::with_capacity(tests.len());
    let mut all_v = test_v.clone();
    for x in &tests {
        for k in -k_bound..=k_bound {
            let y = d.act(k, x)?;
            for (_, u) in y.terms() {
                all_v.extend(u.keys().copied());
            }
            images.push((k, x, y));
        }
    }
    let span = subspace.span(nvars, window.degree, &all_v);
    let mut failures = Vec::new();
    for (k, x, y) in images {
        let res = span.reduce(&y.to_sparse());
        if !res.is_empty() {
            failures.push(InvarianceFailure {
                k,
                element: x.clone(),
                residual: TensorElement::from_sparse(nvars, &res),
            });
        }
    }
    let outside_witness = window
        .basis(d)
        .into_iter()
        .find(|b| !span.contains(&b.to_sparse()));
    let nonzero = span.dim() > 0;
    let pass = failures.is_empty() && nonzero && outside_witness.is_some();
    Ok(Invariance {
        subspace: subspace.clone(),
        window,
        k_bound,
        tested: tests.len(),
        failures,
        outside_witness,
        nonzero,
        pass,
    })
}

/// Result of the quotient check for one filtration level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientMatch {
    pub s: u32,
    pub side: Side,
    #[serde(with = "serde_scalar")]
    pub quotient_alpha: Scalar,
    pub tested: usize,
    pub failures: Vec<InvarianceFailure>,
    pub pass: bool,
}

/// `g(∂) ↦ ∂_0^s g(∂_0 + ∂_1)` (first side) or `g(∂_0 + ∂_1) ∂_1^s` (second side).
pub fn quotient_embedding(side: Side, s: u32, x: &TensorElement) -> TensorElement {
    let sum = MultiPoly::var(2, 0).add(&MultiPoly::var(2, 1));
    let edge = match side {
        Side::First => MultiPoly::var(2, 0).pow(s),
        Side::Second => MultiPoly::var(2, 1).pow(s),
    };
    x.map_poly(2, |m| {
        MultiPoly::term(m.clone(), Scalar::one())
            .compose_univariate(&sum)
            .mul(&edge)
    })
}

/// Checks `V⊗W_s / V⊗W_{s−1} ≅ M(V, Ω(λ, s + α_0 + α_1))` on a window: for
/// every `v_j ⊗ ∂^n` with `s + n < window.degree` and every `|k| ≤ k_bound`,
/// `L_k φ(v_j ⊗ ∂^n) − φ(L_k(v_j ⊗ ∂^n))` must lie in `V ⊗ W_{s−1}`
/// (and be zero when `s = 0`).
pub fn check_quotient(
    d: &TensorDescriptor,
    s: u32,
    side: Side,
    window: Window,
    k_bound: i64,
) -> Result<QuotientMatch> {
    if d.nvars() != 2 || d.factor0.lambda != d.factors[0].lambda {
        return Err(Error::Precondition(
            "quotient check needs two factors with equal λ".into(),
        ));
    }
    let lambda = d.factor0.lambda.clone();
    let quotient_alpha = int(s as i64) + &d.factor0.alpha + &d.factors[0].alpha;
    let qp = OmegaParams::new(lambda, quotient_alpha.clone());
    let mut tested = 0;
    let mut residuals = Vec::new();
    let mut all_v: BTreeSet<usize> = BTreeSet::new();
    if window.degree > s {
        for j in 0..window.v_count(&d.v) {
            for n in 0..(window.degree - s) {
                let x1 = TensorElement::basis(j, Monomial(vec![n]));
                let x = quotient_embedding(side, s, &x1);
                tested += 1;
                for k in -k_bound..=k_bound {
                    let lhs = d.act(k, &x)?;
                    let rhs = quotient_embedding(side, s, &act_m(&d.v, &qp, k, &x1)?);
                    let res = lhs.sub(&rhs);
                    for (_, u) in res.terms() {
                        all_v.extend(u.keys().copied());
                    }
                    residuals.push((k, x.clone(), res));
                }
            }
        }
    }
    let lower = if s == 0 {
        SparseSpan::new()
    } else {
        Subspace::Diagonal {
            a: 0,
            b: 1,
            s: s - 1,
            side,
        }
        .span(2, window.degree, &all_v)
    };
    let mut failures = Vec::new();
    for (k, x, res) in residuals {
        let red = lower.reduce(&res.to_sparse());
        if !red.is_empty() {
            failures.push(InvarianceFailure {
                k,
                element: x,
                residual: TensorElement::from_sparse(2, &red),
            });
        }
    }
    Ok(QuotientMatch {
        s,
        side,
        quotient_alpha,
        tested,
        pass: failures.is_empty(),
        failures,
    })
}

/// Checks that every spanning element of `V ⊗ W_{s−1}` (degree ≤ window) lies
/// in the span of `V ⊗ W_s`.
pub fn check_chain(s: u32, side: Side, window: Window, v: &VDescriptor) -> bool {
    if s == 0 {
        return true;
    }
    let vs: BTreeSet<usize> = (0..window.v_count(v)).collect();
    let upper = Subspace::Diagonal { a: 0, b: 1, s, side }.span(2, window.degree, &vs);
    Subspace::Diagonal {
        a: 0,
        b: 1,
        s: s - 1,
        side,
    }
    .elements(2, window.degree, &vs)
    .iter()
    .all(|e| upper.contains(&e.to_sparse()))
}

/// Per-level result of [`filtration_check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationLevel {
    pub s: u32,
    pub side: Side,
    pub invariance: Invariance,
    pub chain: bool,
    pub quotient: QuotientMatch,
    pub pass: bool,
}

/// The descriptor `M(V, Ω(λ, α_0)) ⊗ Ω(λ, α_1)` on which the filtration lives.
pub fn filtration_descriptor(
    v: &VDescriptor,
    lambda: &Scalar,
    alpha0: &Scalar,
    alpha1: &Scalar,
) -> Result<TensorDescriptor> {
    TensorDescriptor::new(
        v.clone(),
        OmegaParams::new(lambda.clone(), alpha0.clone()),
        vec![OmegaParams::new(lambda.clone(), alpha1.clone())],
    )
}

pub fn filtration_level(
    d: &TensorDescriptor,
    s: u32,
    side: Side,
    window: Window,
    k_bound: i64,
) -> Result<FiltrationLevel> {
    let invariance = check_invariance(d, &Subspace::Diagonal { a: 0, b: 1, s, side }, window, k_bound)?;
    let chain = check_chain(s, side, window, &d.v);
    let quotient = check_quotient(d, s, side, window, k_bound)?;
    let pass = invariance.failures.is_empty() && invariance.nonzero && chain && quotient.pass;
    Ok(FiltrationLevel {
        s,
        side,
        invariance,
        chain,
        quotient,
        pass,
    })
}

/// All levels `0 ≤ s ≤ s_max` on both sides.
pub fn filtration_check(
    v: &VDescriptor,
    lambda: &Scalar,
    alpha0: &Scalar,
    alpha1: &Scalar,
    s_max: u32,
    window: Window,
    k_bound: i64,
) -> Result<Vec<FiltrationLevel>> {
    if lambda.is_zero() {
        return Err(Error::Precondition("λ must be nonzero".into()));
    }
    let d = filtration_descriptor(v, lambda, alpha0, alpha1)?;
    let mut out = Vec::new();
    for side in [Side::First, Side::Second] {
        for s in 0..=s_max {
            out.push(filtration_level(&d, s, side, window, k_bound)?);
        }
    }
    Ok(out)
}

/// Why a descriptor is reducible, with the invariant subspace that shows it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum ReducibleConfig {
    /// `V ≅ V_{α_0}`: `v ⊗ ∂_0 ℚ[∂]` is invariant.
    VIsOneDimAlpha0,
    /// `α_i = 0` for a factor `i ≥ 1`: `∂_i ℚ[∂]` is invariant.
    ZeroAlpha { factor: usize },
    /// `λ_a = λ_b`: `V ⊗ W_0` in the `(∂_a, ∂_b)` variables is invariant.
    RepeatedLambda { a: usize, b: usize },
}

impl ReducibleConfig {
    pub fn subspace(&self) -> Subspace {
        match *self {
            ReducibleConfig::VIsOneDimAlpha0 => Subspace::DivisibleBy { var: 0 },
            ReducibleConfig::ZeroAlpha { factor } => Subspace::DivisibleBy { var: factor },
            ReducibleConfig::RepeatedLambda { a, b } => Subspace::Diagonal {
                a,
                b,
                s: 0,
                side: Side::First,
            },
        }
    }
}

/// Every reducibility condition that `d` meets, in a fixed order.
pub fn reducible_configs(d: &TensorDescriptor) -> Vec<ReducibleConfig> {
    let mut out = Vec::new();
    if let VDescriptor::OneDim { beta } = &d.v {
        if beta == &d.factor0.alpha {
            out.push(ReducibleConfig::VIsOneDimAlpha0);
        }
    }
    for (i, f) in d.factors.iter().enumerate() {
        if f.alpha.is_zero() {
            out.push(ReducibleConfig::ZeroAlpha { factor: i + 1 });
        }
    }
    let ls = d.lambdas();
    for a in 0..ls.len() {
        for b in (a + 1)..ls.len() {
            if ls[a] == ls[b] {
                out.push(ReducibleConfig::RepeatedLambda { a, b });
            }
        }
    }
    out
}

/// Produces an explicit proper nonzero invariant subspace and checks its
/// invariance on `window`. Errors with `NotApplicable` for irreducible data.
pub fn exhibit_reducible(
    d: &TensorDescriptor,
    window: Window,
    k_bound: i64,
) -> Result<(ReducibleConfig, Invariance)> {
    let config = reducible_configs(d).into_iter().next().ok_or_else(|| {
        Error::NotApplicable(
            "descriptor is irreducible (distinct λ, nonzero α_i, V not V_{α_0})".into(),
        )
    })?;
    let inv = check_invariance(d, &config.subspace(), window, k_bound)?;
    Ok((config, inv))
}
