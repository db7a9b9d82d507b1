//! Mode-tagged matrices and the JSON interchange format.
//!
//! ```json
//! {"n": 2, "mode": "exact", "entries": [[[1,0],[0,0]], [[0,0],[1,0]]]}
//! ```
//!
//! Entries are row-major `[re, im]` pairs; in exact mode they must be integers.

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Number;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, Unit};
use crate::{ExactMatrix, FloatMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// A matrix in either exact Gaussian-integer or floating mode.
#[derive(Clone, Debug, PartialEq)]
pub enum GaussianMatrix {
    Exact(ExactMatrix),
    Float(FloatMatrix),
}

impl GaussianMatrix {
    pub fn mode(&self) -> Mode {
        match self {
            GaussianMatrix::Exact(_) => Mode::Exact,
            GaussianMatrix::Float(_) => Mode::Float,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            GaussianMatrix::Exact(m) => m.n(),
            GaussianMatrix::Float(m) => m.n(),
        }
    }

    pub fn to_float(&self) -> FloatMatrix {
        match self {
            GaussianMatrix::Exact(m) => m.to_float(),
            GaussianMatrix::Float(m) => m.clone(),
        }
    }

    /// exact × exact stays exact; any float operand makes the product float.
    pub fn matmul(&self, other: &GaussianMatrix) -> Result<GaussianMatrix> {
        match (self, other) {
            (GaussianMatrix::Exact(a), GaussianMatrix::Exact(b)) => a.matmul(b).map(GaussianMatrix::Exact),
            _ => self.to_float().matmul(&other.to_float()).map(GaussianMatrix::Float),
        }
    }

    pub fn herm(&self) -> GaussianMatrix {
        match self {
            GaussianMatrix::Exact(m) => GaussianMatrix::Exact(m.herm()),
            GaussianMatrix::Float(m) => GaussianMatrix::Float(m.herm()),
        }
    }

    pub fn trace(&self) -> Complex64 {
        match self {
            GaussianMatrix::Exact(m) => {
                let t = m.trace();
                Complex64::new(t.re as f64, t.im as f64)
            }
            GaussianMatrix::Float(m) => m.trace(),
        }
    }

    pub fn frob_norm(&self) -> f64 {
        match self {
            GaussianMatrix::Exact(m) => m.frob_norm(),
            GaussianMatrix::Float(m) => m.frob_norm(),
        }
    }

    /// Exact mode only admits the units `{±1, ±j}`.
    pub fn scalar_mul(&self, c: Complex64) -> Result<GaussianMatrix> {
        match self {
            GaussianMatrix::Exact(m) => Unit::from_complex(c)
                .map(|u| GaussianMatrix::Exact(m.mul_unit(u)))
                .ok_or(Error::NonUnitScalar { re: c.re, im: c.im }),
            GaussianMatrix::Float(m) => Ok(GaussianMatrix::Float(m.scale(c))),
        }
    }

    pub fn from_json(s: &str) -> Result<GaussianMatrix> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serialization cannot fail")
    }
}

impl From<ExactMatrix> for GaussianMatrix {
    fn from(m: ExactMatrix) -> Self {
        GaussianMatrix::Exact(m)
    }
}

impl From<FloatMatrix> for GaussianMatrix {
    fn from(m: FloatMatrix) -> Self {
        GaussianMatrix::Float(m)
    }
}

/// Rank over ℝ; exact when every matrix is exact.
pub fn real_rank(mats: &[GaussianMatrix]) -> usize {
    if mats.iter().all(|m| m.mode() == Mode::Exact) {
        let exact: Vec<ExactMatrix> = mats
            .iter()
            .map(|m| match m {
                GaussianMatrix::Exact(e) => e.clone(),
                GaussianMatrix::Float(_) => unreachable!(),
            })
            .collect();
        crate::rank::real_rank(&exact)
    } else {
        let float: Vec<FloatMatrix> = mats.iter().map(GaussianMatrix::to_float).collect();
        crate::rank::real_rank(&float)
    }
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    n: usize,
    mode: Mode,
    entries: Vec<Vec<[Number; 2]>>,
}

impl Serialize for GaussianMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = match self {
            GaussianMatrix::Exact(m) => m
                .rows()
                .map(|r| r.iter().map(|z| [Number::from(z.re), Number::from(z.im)]).collect())
                .collect(),
            GaussianMatrix::Float(m) => m
                .rows()
                .map(|r| r.iter().map(|z| [float_number(z.re), float_number(z.im)]).collect())
                .collect(),
        };
        RawMatrix {
            n: self.n(),
            mode: self.mode(),
            entries,
        }
        .serialize(s)
    }
}

fn float_number(x: f64) -> Number {
    // Non-finite values have no JSON representation.
    Number::from_f64(x).unwrap_or_else(|| Number::from(0))
}

impl<'de> Deserialize<'de> for GaussianMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawMatrix::deserialize(d)?;
        if raw.n == 0 || raw.entries.len() != raw.n || raw.entries.iter().any(|r| r.len() != raw.n) {
            return Err(D::Error::custom(format!("entries must be an {0}x{0} array", raw.n)));
        }
        match raw.mode {
            Mode::Exact => {
                let mut rows = Vec::with_capacity(raw.n);
                for row in &raw.entries {
                    let mut out = Vec::with_capacity(raw.n);
                    for [re, im] in row {
                        let (Some(re), Some(im)) = (re.as_i64(), im.as_i64()) else {
                            return Err(D::Error::custom(format!(
                                "exact-mode entry [{re}, {im}] is not a pair of integers"
                            )));
                        };
                        out.push(Complex::new(re, im));
                    }
                    rows.push(out);
                }
                CMatrix::from_rows(rows)
                    .map(GaussianMatrix::Exact)
                    .map_err(D::Error::custom)
            }
            Mode::Float => {
                let rows = raw
                    .entries
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|[re, im]| {
                                Complex64::new(re.as_f64().unwrap_or(f64::NAN), im.as_f64().unwrap_or(f64::NAN))
                            })
                            .collect()
                    })
                    .collect();
                CMatrix::from_rows(rows)
                    .map(GaussianMatrix::Float)
                    .map_err(D::Error::custom)
            }
        }
    }
}
