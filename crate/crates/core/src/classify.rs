//! Irreducibility and isomorphism decisions for tensor modules, with explicit
//! intertwiners backing every positive answer.
//!
//! `M(V, Ω(λ, α))` depends on `V` only through `L̄_0 − α`, so the invariant
//! attached to the first factor is the twist `V^{−α_0}`. For one-dimensional
//! `V = V_β` this collapses to `Ω(λ_0, α_0 − β)` and the module is a pure
//! tensor product of `Ω`'s.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::analysis::{reducible_configs, ReducibleConfig, Window};
use crate::arith::matrix::ExactMatrix;
use crate::arith::poly::Monomial;
use crate::arith::scalar::{binomial, powi, serde_scalar, Scalar};
use crate::element::TensorElement;
use crate::error::{Error, Result};
use crate::modules::{OmegaParams, TensorDescriptor};
use crate::vmodule::{basis_vec, validate_vdescriptor, vvec_axpy, VDescriptor, VVec};

/// Isomorphism-invariant data of an irreducible descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormalForm {
    /// All factors as `(λ, α)` pairs, first factor rewritten to `α_0 − β`; sorted.
    PureTensor { pairs: Vec<OmegaParams> },
    /// `V^{−α_0}`, `λ_0` and the sorted factors `i ≥ 1`.
    WithV {
        v: VDescriptor,
        #[serde(with = "serde_scalar")]
        lambda0: Scalar,
        factors: Vec<OmegaParams>,
    },
}

pub fn normal_form(d: &TensorDescriptor) -> NormalForm {
    match &d.v {
        VDescriptor::OneDim { beta } => {
            let mut pairs = vec![OmegaParams::new(
                d.factor0.lambda.clone(),
                &d.factor0.alpha - beta,
            )];
            pairs.extend(d.factors.iter().cloned());
            pairs.sort();
            NormalForm::PureTensor { pairs }
        }
        v => {
            let mut factors = d.factors.clone();
            factors.sort();
            NormalForm::WithV {
                v: v.twist(&-&d.factor0.alpha),
                lambda0: d.factor0.lambda.clone(),
                factors,
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrreducibilityVerdict {
    pub irreducible: bool,
    /// Every reducibility condition met; empty exactly when irreducible.
    pub reasons: Vec<ReducibleConfig>,
}

/// Irreducible iff the λ's are pairwise distinct, `α_i ≠ 0` for `i ≥ 1` and
/// `V` is not `V_{α_0}`. Requires `V` to pass validation on its window.
pub fn decide_irreducible(d: &TensorDescriptor) -> Result<IrreducibilityVerdict> {
    let val = validate_vdescriptor(&d.v);
    if !val.pass {
        return Err(Error::Precondition(format!(
            "V fails validation (brackets_hold={}, top_injective={}, cyclic={})",
            val.brackets_hold, val.top_injective, val.cyclic
        )));
    }
    let reasons = reducible_configs(d);
    Ok(IrreducibilityVerdict {
        irreducible: reasons.is_empty(),
        reasons,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsoCase {
    /// Both one-dimensional `V`: pure tensors, `σ` may move the first factor.
    PureTensor,
    /// Both infinite-dimensional `V`: `σ` fixes the first factor.
    WithV,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoReason {
    MMismatch,
    Lambda0Mismatch,
    MultisetMismatch,
    /// Same λ's and factors, different invariant of the first factor.
    TwistMismatch,
    FiniteVsInfinite,
}

impl fmt::Display for NoReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NoReason::MMismatch => "different number of factors",
            NoReason::Lambda0Mismatch => "λ_0 differs",
            NoReason::MultisetMismatch => "factor multisets differ",
            NoReason::TwistMismatch => "twisted V (or α_0 − β) differs",
            NoReason::FiniteVsInfinite => "one-dimensional V against infinite-dimensional V",
        };
        f.write_str(s)
    }
}

/// Isomorphism of the `V` parts, after twisting by `−α_0` and `−β_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum VMap {
    Identity,
    /// On shift modules: `f(x) ↦ f(x + a)`, i.e. `v_n ↦ Σ_t C(n,t) a^{n−t} v_t`.
    Translate {
        #[serde(with = "serde_scalar")]
        a: Scalar,
    },
}

impl VMap {
    pub fn apply(&self, u: &VVec) -> VVec {
        match self {
            VMap::Identity => u.clone(),
            VMap::Translate { a } => {
                let mut out = VVec::new();
                for (&n, c) in u {
                    for t in 0..=n {
                        let coef = c * binomial(n as u32, t as u32) * powi(a, (n - t) as i64);
                        vvec_axpy(&mut out, &coef, &basis_vec(t));
                    }
                }
                out
            }
        }
    }
}

/// Result of the truncated intertwiner search between two matrix modules.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSearch {
    pub window: usize,
    pub equations: usize,
    /// Dimension of the space of window maps satisfying every in-window equation.
    pub solution_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum IsoVerdict {
    Yes {
        case: IsoCase,
        /// `sigma[i]` is the factor of the second module matched with factor `i` of the first.
        sigma: Vec<usize>,
        vmap: VMap,
    },
    No {
        reason: NoReason,
    },
    UndecidedAtWindow {
        reason: String,
        evidence: Option<WindowSearch>,
    },
}

impl IsoVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, IsoVerdict::Yes { .. })
    }
}

/// Matches two lists of pairs as multisets; `None` if they differ.
fn match_multisets(a: &[OmegaParams], b: &[OmegaParams]) -> Option<Vec<usize>> {
    if a.len() != b.len() {
        return None;
    }
    let mut ia: Vec<usize> = (0..a.len()).collect();
    let mut ib: Vec<usize> = (0..b.len()).collect();
    ia.sort_by(|&x, &y| a[x].cmp(&a[y]));
    ib.sort_by(|&x, &y| b[x].cmp(&b[y]));
    let mut sigma = vec![0; a.len()];
    for (&x, &y) in ia.iter().zip(&ib) {
        if a[x] != b[y] {
            return None;
        }
        sigma[x] = y;
    }
    Some(sigma)
}

fn all_pairs(d: &TensorDescriptor, first_alpha: Scalar) -> Vec<OmegaParams> {
    let mut out = vec![OmegaParams::new(d.factor0.lambda.clone(), first_alpha)];
    out.extend(d.factors.iter().cloned());
    out
}

/// Decides `d1 ≅ d2` for irreducible descriptors.
///
/// Shift modules of every parameter are isomorphic to one another through a
/// translation, so two shift descriptors only need matching `λ_0` and
/// factors. Matrix modules are compared through their twisted data; anything
/// beyond equality is reported as undecided together with window evidence.
pub fn decide_iso(d1: &TensorDescriptor, d2: &TensorDescriptor) -> Result<IsoVerdict> {
    for (name, d) in [("first", d1), ("second", d2)] {
        let v = decide_irreducible(d)?;
        if !v.irreducible {
            return Err(Error::Precondition(format!(
                "{name} descriptor is reducible ({:?})",
                v.reasons
            )));
        }
    }
    if d1.m() != d2.m() {
        return Ok(IsoVerdict::No {
            reason: NoReason::MMismatch,
        });
    }
    match (&d1.v, &d2.v) {
        (VDescriptor::OneDim { beta: b1 }, VDescriptor::OneDim { beta: b2 }) => {
            let p1 = all_pairs(d1, &d1.factor0.alpha - b1);
            let p2 = all_pairs(d2, &d2.factor0.alpha - b2);
            if let Some(sigma) = match_multisets(&p1, &p2) {
                return Ok(IsoVerdict::Yes {
                    case: IsoCase::PureTensor,
                    sigma,
                    vmap: VMap::Identity,
                });
            }
            let rest_match = match_multisets(&d1.factors, &d2.factors).is_some();
            let reason = if rest_match && d1.factor0.lambda == d2.factor0.lambda {
                NoReason::TwistMismatch
            } else {
                NoReason::MultisetMismatch
            };
            Ok(IsoVerdict::No { reason })
        }
        (VDescriptor::OneDim { .. }, _) | (_, VDescriptor::OneDim { .. }) => Ok(IsoVerdict::No {
            reason: NoReason::FiniteVsInfinite,
        }),
        (v1, v2) => {
            if d1.factor0.lambda != d2.factor0.lambda {
                return Ok(IsoVerdict::No {
                    reason: NoReason::Lambda0Mismatch,
                });
            }
            let Some(rest) = match_multisets(&d1.factors, &d2.factors) else {
                return Ok(IsoVerdict::No {
                    reason: NoReason::MultisetMismatch,
                });
            };
            let mut sigma = vec![0];
            sigma.extend(rest.iter().map(|&j| j + 1));
            let t1 = v1.twist(&-&d1.factor0.alpha);
            let t2 = v2.twist(&-&d2.factor0.alpha);
            match (&t1, &t2) {
                (VDescriptor::Shift { c: c1, .. }, VDescriptor::Shift { c: c2, .. }) => {
                    Ok(IsoVerdict::Yes {
                        case: IsoCase::WithV,
                        sigma,
                        vmap: VMap::Translate { a: c1 - c2 },
                    })
                }
                (VDescriptor::Matrix(a), VDescriptor::Matrix(b)) if a == b => Ok(IsoVerdict::Yes {
                    case: IsoCase::WithV,
                    sigma,
                    vmap: VMap::Identity,
                }),
                (VDescriptor::Matrix(_), VDescriptor::Matrix(_)) => {
                    Ok(IsoVerdict::UndecidedAtWindow {
                        reason: "twisted matrix modules differ as data; abstract isomorphism is not decidable from a window".into(),
                        evidence: Some(window_intertwiner_search(&t1, &t2)?),
                    })
                }
                _ => Ok(IsoVerdict::UndecidedAtWindow {
                    reason: format!(
                        "comparison of a {} module with a {} module",
                        t1.family(),
                        t2.family()
                    ),
                    evidence: None,
                }),
            }
        }
    }
}

/// Solves `T L̄_i^{(1)} v_j = L̄_i^{(2)} T v_j` for a window map `T`, keeping
/// only equations whose terms stay inside both windows.
pub fn window_intertwiner_search(v1: &VDescriptor, v2: &VDescriptor) -> Result<WindowSearch> {
    let w = v1.window().min(v2.window());
    if v1.r() != v2.r() {
        return Ok(WindowSearch {
            window: w,
            equations: 0,
            solution_dim: 0,
        });
    }
    let var = |a: usize, b: usize| a * w + b;
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for i in 0..=v1.r() {
        let imgs2: Vec<VVec> = (0..w).map(|b| v2.apply_basis(i, b)).collect::<Result<_>>()?;
        if imgs2.iter().any(|u| u.keys().any(|&t| t >= w)) {
            continue;
        }
        for j in 0..w {
            let img1 = v1.apply_basis(i, j)?;
            if img1.keys().any(|&t| t >= w) {
                continue;
            }
            for a in 0..w {
                let mut row = vec![Scalar::zero(); w * w];
                for (&t, c) in &img1 {
                    row[var(a, t)] += c;
                }
                for (b, u) in imgs2.iter().enumerate() {
                    if let Some(c) = u.get(&a) {
                        row[var(b, j)] -= c;
                    }
                }
                rows.push(row);
            }
        }
    }
    let rank = if rows.is_empty() {
        0
    } else {
        ExactMatrix::from_rows(rows.clone())?.rank()
    };
    Ok(WindowSearch {
        window: w,
        equations: rows.len(),
        solution_dim: w * w - rank,
    })
}

/// `φ(u ⊗ ∂^p) = vmap(u) ⊗ ∂^{σ(p)}`, where factor `i` of the source goes to
/// factor `sigma[i]` of the target.
pub fn apply_iso(sigma: &[usize], vmap: &VMap, x: &TensorElement) -> TensorElement {
    let n = sigma.len();
    let mut out = TensorElement::zero(n);
    for (m, u) in x.terms() {
        let mut e = vec![0; n];
        for (i, &s) in sigma.iter().enumerate() {
            e[s] = m.exps()[i];
        }
        let f = crate::arith::poly::MultiPoly::term(Monomial(e), Scalar::one());
        out.add_tensor(&vmap.apply(u), &f, &Scalar::one());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntertwinerFailure {
    pub k: i64,
    pub element: TensorElement,
    pub residual: TensorElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntertwinerEvidence {
    pub window: Window,
    pub k_bound: i64,
    pub tested: usize,
    pub failures: Vec<IntertwinerFailure>,
    pub pass: bool,
}

/// Checks `L_k φ(x) = φ(L_k x)` for every window basis element `x` of `d1`
/// and every `|k| ≤ k_bound`.
pub fn iso_intertwiner_evidence(
    d1: &TensorDescriptor,
    d2: &TensorDescriptor,
    sigma: &[usize],
    vmap: &VMap,
    window: Window,
    k_bound: i64,
) -> Result<IntertwinerEvidence> {
    if sigma.len() != d1.nvars() || d1.nvars() != d2.nvars() {
        return Err(Error::ArityMismatch {
            expected: d1.nvars(),
            found: sigma.len(),
        });
    }
    let mut window = window;
    window.v_indices = window.v_indices.min(d1.v.window());
    let basis = window.basis(d1);
    let mut failures = Vec::new();
    for x in &basis {
        let fx = apply_iso(sigma, vmap, x);
        for k in -k_bound..=k_bound {
            let lhs = d2.act(k, &fx)?;
            let rhs = apply_iso(sigma, vmap, &d1.act(k, x)?);
            let res = lhs.sub(&rhs);
            if !res.is_zero() {
                failures.push(IntertwinerFailure {
                    k,
                    element: x.clone(),
                    residual: res,
                });
            }
        }
    }
    Ok(IntertwinerEvidence {
        window,
        k_bound,
        tested: basis.len(),
        pass: failures.is_empty(),
        failures,
    })
}
