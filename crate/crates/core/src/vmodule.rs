//! Modules over the truncated positive Witt algebra `L̄_r` (basis `L̄_0, …, L̄_r`,
//! bracket `[L̄_i, L̄_j] = (j − i) L̄_{i+j}`, zero past `r`).
//!
//! Three descriptor families are supported:
//!
//! * `OneDim(β)`: the one-dimensional module `V_β` (`L̄_0 = β`, `L̄_i = 0` for `i ≥ 1`);
//! * `Shift(c)`: polynomials in `x` with basis `v_n = x^n`, `L̄_0 = c − x·` and
//!   `L̄_1 f(x) = f(x + 1)`. Its action is known in closed form on every basis
//!   vector, so it never overflows; `window` only bounds validation;
//! * `Matrix`: user data giving the columns `L̄_i v_j` for `j < window`. Asking
//!   for a column past the window is a [`Error::WindowOverflow`].

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::matrix::SparseSpan;
use crate::arith::scalar::{binomial, format_scalar, int, parse_scalar, Scalar};
use crate::error::{Error, Result};

/// Sparse vector of `V` in the basis `v_0, v_1, …`.
pub type VVec = BTreeMap<usize, Scalar>;

pub fn basis_vec(j: usize) -> VVec {
    [(j, Scalar::one())].into_iter().collect()
}

pub fn vvec_axpy(acc: &mut VVec, a: &Scalar, x: &VVec) {
    if a.is_zero() {
        return;
    }
    for (j, c) in x {
        let e = acc.entry(*j).or_insert_with(Scalar::zero);
        *e += a * c;
        if e.is_zero() {
            acc.remove(j);
        }
    }
}

pub fn vvec_scale(x: &VVec, a: &Scalar) -> VVec {
    if a.is_zero() {
        return VVec::new();
    }
    x.iter().map(|(j, c)| (*j, c * a)).collect()
}

/// Column data of a user-supplied module: `actions[i][j] = L̄_i v_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixModule {
    pub r: usize,
    pub window: usize,
    pub actions: Vec<Vec<VVec>>,
}

impl MatrixModule {
    pub fn new(r: usize, window: usize, actions: Vec<Vec<VVec>>) -> Result<Self> {
        let m = MatrixModule { r, window, actions };
        m.check_shape()?;
        Ok(m)
    }

    fn check_shape(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::InvalidDescriptor(
                "v.r: matrix modules need r >= 1 (r = 0 is one_dim)".into(),
            ));
        }
        if self.window == 0 {
            return Err(Error::InvalidDescriptor("v.window: must be positive".into()));
        }
        if self.actions.len() != self.r + 1 {
            return Err(Error::InvalidDescriptor(format!(
                "v.actions: expected r + 1 = {} operators, found {}",
                self.r + 1,
                self.actions.len()
            )));
        }
        for (i, cols) in self.actions.iter().enumerate() {
            if cols.len() != self.window {
                return Err(Error::InvalidDescriptor(format!(
                    "v.actions[{i}]: expected {} columns, found {}",
                    self.window,
                    cols.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VDescriptor {
    OneDim { beta: Scalar },
    Shift { c: Scalar, window: usize },
    Matrix(MatrixModule),
}

impl VDescriptor {
    pub fn one_dim(beta: Scalar) -> Self {
        VDescriptor::OneDim { beta }
    }

    pub fn shift(c: Scalar, window: usize) -> Self {
        VDescriptor::Shift { c, window }
    }

    /// Largest index `r` with `L̄_r` part of the descriptor.
    pub fn r(&self) -> usize {
        match self {
            VDescriptor::OneDim { .. } => 0,
            VDescriptor::Shift { .. } => 1,
            VDescriptor::Matrix(m) => m.r,
        }
    }

    pub fn window(&self) -> usize {
        match self {
            VDescriptor::OneDim { .. } => 1,
            VDescriptor::Shift { window, .. } => *window,
            VDescriptor::Matrix(m) => m.window,
        }
    }

    pub fn is_one_dim(&self) -> bool {
        matches!(self, VDescriptor::OneDim { .. })
    }

    pub fn family(&self) -> &'static str {
        match self {
            VDescriptor::OneDim { .. } => "one_dim",
            VDescriptor::Shift { .. } => "shift",
            VDescriptor::Matrix(_) => "matrix",
        }
    }

    /// Whether basis vector `v_j` exists at all (only `v_0` for `OneDim`).
    pub fn has_index(&self, j: usize) -> bool {
        !self.is_one_dim() || j == 0
    }

    /// `L̄_i v_j`.
    pub fn apply_basis(&self, i: usize, j: usize) -> Result<VVec> {
        if i > self.r() {
            return Ok(VVec::new());
        }
        match self {
            VDescriptor::OneDim { beta } => {
                if j != 0 {
                    return Err(Error::WindowOverflow {
                        op: i,
                        index: j,
                        window: 1,
                    });
                }
                Ok(if i == 0 {
                    vvec_scale(&basis_vec(0), beta)
                } else {
                    VVec::new()
                })
            }
            VDescriptor::Shift { c, .. } => Ok(match i {
                0 => {
                    let mut out = vvec_scale(&basis_vec(j), c);
                    vvec_axpy(&mut out, &-Scalar::one(), &basis_vec(j + 1));
                    out
                }
                // (x + 1)^j = Σ_t C(j, t) x^t
                _ => (0..=j as u32)
                    .map(|t| (t as usize, binomial(j as u32, t)))
                    .collect(),
            }),
            VDescriptor::Matrix(m) => {
                if j >= m.window {
                    return Err(Error::WindowOverflow {
                        op: i,
                        index: j,
                        window: m.window,
                    });
                }
                Ok(m.actions[i][j].clone())
            }
        }
    }

    /// `L̄_i u` for an arbitrary vector `u`.
    pub fn apply(&self, i: usize, u: &VVec) -> Result<VVec> {
        let mut out = VVec::new();
        for (j, c) in u {
            let img = self.apply_basis(i, *j)?;
            vvec_axpy(&mut out, c, &img);
        }
        Ok(out)
    }

    /// `V^α`: the same module with `L̄_0` replaced by `L̄_0 + α·id`.
    pub fn twist(&self, alpha: &Scalar) -> VDescriptor {
        match self {
            VDescriptor::OneDim { beta } => VDescriptor::OneDim { beta: beta + alpha },
            VDescriptor::Shift { c, window } => VDescriptor::Shift {
                c: c + alpha,
                window: *window,
            },
            VDescriptor::Matrix(m) => {
                let mut m = m.clone();
                for (j, col) in m.actions[0].iter_mut().enumerate() {
                    vvec_axpy(col, alpha, &basis_vec(j));
                }
                VDescriptor::Matrix(m)
            }
        }
    }
}

/// Nonzero residual of one bracket relation on one basis column.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketResidual {
    pub i: usize,
    pub j: usize,
    pub column: usize,
    #[serde(with = "serde_vvec")]
    pub residual: VVec,
}

/// Outcome of [`validate_vdescriptor`]. Failures are reported here, never thrown.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VValidation {
    pub family: String,
    pub r: usize,
    pub window: usize,
    /// Number of (i, j, column) bracket relations evaluated exactly.
    pub bracket_checks: usize,
    /// Relations that could not be evaluated because an image left the window.
    pub bracket_skipped: usize,
    pub bracket_residuals: Vec<BracketResidual>,
    /// Column rank of `L̄_r` on the window; `None` when the check does not apply.
    pub top_rank: Option<usize>,
    /// Dimension of the smallest in-window subspace containing `v_0` closed
    /// under the in-window `L̄_i` actions.
    pub cyclic_dim: usize,
    pub brackets_hold: bool,
    pub top_injective: bool,
    pub cyclic: bool,
    pub pass: bool,
}

pub fn validate_vdescriptor(v: &VDescriptor) -> VValidation {
    let r = v.r();
    let window = v.window();
    let mut checks = 0;
    let mut skipped = 0;
    let mut residuals = Vec::new();

    for i in 0..=r {
        for j in (i + 1)..=r {
            for col in 0..window {
                match bracket_residual(v, i, j, col) {
                    Ok(res) => {
                        checks += 1;
                        if !res.is_empty() {
                            residuals.push(BracketResidual {
                                i,
                                j,
                                column: col,
                                residual: res,
                            });
                        }
                    }
                    Err(_) => skipped += 1,
                }
            }
        }
    }

    let top_rank = if v.is_one_dim() {
        None
    } else {
        let mut span = SparseSpan::<usize>::new();
        for col in 0..window {
            if let Ok(img) = v.apply_basis(r, col) {
                span.insert(&img);
            }
        }
        Some(span.dim())
    };
    let top_injective = top_rank.is_none_or(|k| k == window);

    let cyclic_dim = cyclic_span_dim(v);
    let brackets_hold = residuals.is_empty();
    let cyclic = cyclic_dim == window;
    VValidation {
        family: v.family().to_string(),
        r,
        window,
        bracket_checks: checks,
        bracket_skipped: skipped,
        bracket_residuals: residuals,
        top_rank,
        cyclic_dim,
        brackets_hold,
        top_injective,
        cyclic,
        pass: brackets_hold && top_injective && cyclic,
    }
}

fn bracket_residual(v: &VDescriptor, i: usize, j: usize, col: usize) -> Result<VVec> {
    let e = basis_vec(col);
    let ij = v.apply(i, &v.apply(j, &e)?)?;
    let ji = v.apply(j, &v.apply(i, &e)?)?;
    let mut res = ij;
    vvec_axpy(&mut res, &-Scalar::one(), &ji);
    let coef = int(j as i64 - i as i64);
    let sum = v.apply(i + j, &e)?;
    vvec_axpy(&mut res, &-coef, &sum);
    Ok(res)
}

fn cyclic_span_dim(v: &VDescriptor) -> usize {
    let window = v.window();
    let mut span = SparseSpan::<usize>::new();
    let mut queue = vec![basis_vec(0)];
    while let Some(u) = queue.pop() {
        if u.keys().any(|&j| j >= window) {
            continue;
        }
        if let Some(row) = span.insert(&u) {
            for i in 0..=v.r() {
                if let Ok(img) = v.apply(i, &row) {
                    queue.push(img);
                }
            }
        }
    }
    span.dim()
}

/// Serde adapter for [`VVec`] as `[[index, "p/q"], …]`.
pub mod serde_vvec {
    use super::{format_scalar, parse_scalar, VVec};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &VVec, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|(j, c)| (*j, format_scalar(c))))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<VVec, D::Error> {
        let raw = Vec::<(usize, String)>::deserialize(d)?;
        let mut out = VVec::new();
        for (j, c) in raw {
            let c = parse_scalar(&c).map_err(serde::de::Error::custom)?;
            super::vvec_axpy(&mut out, &c, &super::basis_vec(j));
        }
        Ok(out)
    }
}
