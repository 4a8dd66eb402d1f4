//! JSON form of descriptors.
//!
//! ```json
//! {"v": {"kind": "shift", "c": "0", "window": 8},
//!  "factor0": {"lambda": "2", "alpha": "0"},
//!  "factors": [{"lambda": "3", "alpha": "1"}]}
//! ```
//!
//! `v.kind` is one of `one_dim` (`beta`), `shift` (`c`, `window`) or `matrix`
//! (`r`, `window`, `actions[i][j] = [[index, "coef"], …]` giving `L̄_i v_j`).

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::scalar::{serde_scalar, Scalar};
use crate::error::{Error, Result};
use crate::modules::{OmegaParams, TensorDescriptor};
use crate::vmodule::{serde_vvec, MatrixModule, VDescriptor, VVec};

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct WireColumn(#[serde(with = "serde_vvec")] VVec);

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum WireV {
    OneDim {
        #[serde(with = "serde_scalar")]
        beta: Scalar,
    },
    Shift {
        #[serde(with = "serde_scalar")]
        c: Scalar,
        window: usize,
    },
    Matrix {
        r: usize,
        window: usize,
        actions: Vec<Vec<WireColumn>>,
    },
}

impl Serialize for VDescriptor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let w = match self {
            VDescriptor::OneDim { beta } => WireV::OneDim { beta: beta.clone() },
            VDescriptor::Shift { c, window } => WireV::Shift {
                c: c.clone(),
                window: *window,
            },
            VDescriptor::Matrix(m) => WireV::Matrix {
                r: m.r,
                window: m.window,
                actions: m
                    .actions
                    .iter()
                    .map(|cols| cols.iter().cloned().map(WireColumn).collect())
                    .collect(),
            },
        };
        w.serialize(s)
    }
}

impl<'de> Deserialize<'de> for VDescriptor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match WireV::deserialize(d)? {
            WireV::OneDim { beta } => Ok(VDescriptor::OneDim { beta }),
            WireV::Shift { c, window } => {
                if window == 0 {
                    return Err(serde::de::Error::custom("window must be positive"));
                }
                Ok(VDescriptor::Shift { c, window })
            }
            WireV::Matrix { r, window, actions } => {
                let actions = actions
                    .into_iter()
                    .map(|cols| cols.into_iter().map(|c| c.0).collect())
                    .collect();
                MatrixModule::new(r, window, actions)
                    .map(VDescriptor::Matrix)
                    .map_err(serde::de::Error::custom)
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireDescriptor {
    v: VDescriptor,
    factor0: OmegaParams,
    #[serde(default)]
    factors: Vec<OmegaParams>,
}

impl Serialize for TensorDescriptor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WireDescriptor {
            v: self.v.clone(),
            factor0: self.factor0.clone(),
            factors: self.factors.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TensorDescriptor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = WireDescriptor::deserialize(d)?;
        TensorDescriptor::new(w.v, w.factor0, w.factors).map_err(serde::de::Error::custom)
    }
}

/// Parses a value, naming the offending JSON path on failure.
pub fn from_json_str<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::InvalidDescriptor(format!("at `{path}`: {}", e.into_inner()))
    })
}

pub fn parse_descriptor(text: &str) -> Result<TensorDescriptor> {
    from_json_str(text)
}

pub fn parse_vdescriptor(text: &str) -> Result<VDescriptor> {
    from_json_str(text)
}
