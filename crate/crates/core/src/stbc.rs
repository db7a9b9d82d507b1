//! Linear dispersion codes and the code families built from anticommuting
//! matrices.
//!
//! A codeword is `S = Σ_i x_iI·A_iI + x_iQ·A_iQ` for complex symbols
//! `x_i = x_iI + j·x_iQ`. Weight pairs are stored in symbol order.

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use crate::clifford::AnticommutingFamily;
use crate::error::{Error, Result};
use crate::gaussian::{GaussianMatrix, Mode};
use crate::matrix::{CMatrix, Unit};
use crate::scalar::Scalar;
use crate::verifier::CodeClass;
use crate::{ExactMatrix, FloatMatrix};

/// Tolerance for unitarity of floating transforms.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct LinearDispersionCode<T> {
    label: String,
    n: usize,
    weights: Vec<(CMatrix<T>, CMatrix<T>)>,
    declared_class: Option<CodeClass>,
}

pub type ExactCode = LinearDispersionCode<i64>;
pub type FloatCode = LinearDispersionCode<f64>;

impl<T: Scalar> LinearDispersionCode<T> {
    pub fn new(label: impl Into<String>, n: usize, weights: Vec<(CMatrix<T>, CMatrix<T>)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("code size n must be positive".into()));
        }
        for (i, (a, b)) in weights.iter().enumerate() {
            for m in [a, b] {
                if m.n() != n {
                    return Err(Error::Malformed(format!(
                        "weight pair {} is {}x{}, code is {n}x{n}",
                        i + 1,
                        m.n(),
                        m.n()
                    )));
                }
            }
        }
        Ok(LinearDispersionCode {
            label: label.into(),
            n,
            weights,
            declared_class: None,
        })
    }

    pub fn with_declared_class(mut self, class: CodeClass) -> Self {
        self.declared_class = Some(class);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of complex symbols.
    pub fn k(&self) -> usize {
        self.weights.len()
    }

    /// Complex symbols per channel use (square codes: T = n).
    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n as f64
    }

    pub fn declared_class(&self) -> Option<CodeClass> {
        self.declared_class
    }

    pub fn weights(&self) -> &[(CMatrix<T>, CMatrix<T>)] {
        &self.weights
    }

    /// `(A_iI, A_iQ)` for 1-based symbol index i.
    pub fn pair(&self, i: usize) -> &(CMatrix<T>, CMatrix<T>) {
        &self.weights[i - 1]
    }

    /// All 2k weights in the order `A_1I, A_1Q, A_2I, A_2Q, …`.
    pub fn all_weights(&self) -> impl Iterator<Item = &CMatrix<T>> {
        self.weights.iter().flat_map(|(a, b)| [a, b])
    }

    pub fn to_float(&self) -> FloatCode {
        LinearDispersionCode {
            label: self.label.clone(),
            n: self.n,
            weights: self
                .weights
                .iter()
                .map(|(a, b)| (a.to_float(), b.to_float()))
                .collect(),
            declared_class: self.declared_class,
        }
    }

    /// Multiplies every weight by the real factor `g`.
    pub fn scaled(&self, g: f64) -> FloatCode {
        let f = self.to_float();
        LinearDispersionCode {
            weights: f
                .weights
                .iter()
                .map(|(a, b)| (a.scale_real(g), b.scale_real(g)))
                .collect(),
            ..f
        }
    }

    /// `Σ‖A‖_F² / 2k`; 0 for the empty code.
    pub fn mean_weight_energy(&self) -> f64 {
        if self.weights.is_empty() {
            return 0.0;
        }
        let total: f64 = self.all_weights().map(|m| m.frob_norm_sq().to_f64_lossy()).sum();
        total / (2 * self.k()) as f64
    }

    /// `S = Σ x_iI·A_iI + x_iQ·A_iQ`.
    pub fn codeword(&self, symbols: &[Complex64]) -> Result<FloatMatrix> {
        if symbols.len() != self.k() {
            return Err(Error::SymbolCount {
                expected: self.k(),
                got: symbols.len(),
            });
        }
        let mut s = FloatMatrix::zeros(self.n);
        for ((a, b), x) in self.weights.iter().zip(symbols) {
            s = &s + &weighted_pair(a, b, x.re, x.im);
        }
        Ok(s)
    }

    /// Premultiplies every weight matrix by the unitary `u`.
    pub fn left_multiply(&self, u: &CMatrix<T>) -> Result<Self> {
        if u.n() != self.n {
            return Err(Error::DimensionMismatch {
                left: u.n(),
                right: self.n,
            });
        }
        let tol = if T::EXACT { 0.0 } else { UNITARY_TOL };
        if !u.is_unitary(tol) {
            return Err(Error::NotUnitary {
                deviation: u.unitarity_defect(),
            });
        }
        Ok(LinearDispersionCode {
            label: self.label.clone(),
            n: self.n,
            weights: self.weights.iter().map(|(a, b)| (u * a, u * b)).collect(),
            declared_class: self.declared_class,
        })
    }
}

/// `x_I·A + x_Q·B` in floating point.
pub fn weighted_pair<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>, xi: f64, xq: f64) -> FloatMatrix {
    FloatMatrix::from_fn(a.n(), |r, c| {
        let (p, q) = (a.get(r, c), b.get(r, c));
        Complex64::new(
            xi * p.re.to_f64_lossy() + xq * q.re.to_f64_lossy(),
            xi * p.im.to_f64_lossy() + xq * q.im.to_f64_lossy(),
        )
    })
}

fn check_family_param(a: u32, fam: &AnticommutingFamily) -> Result<()> {
    if fam.a() != a || fam.len() != 2 * a as usize + 1 {
        return Err(Error::InvalidParameter(format!(
            "family has parameter {} ({} members), expected a = {a}",
            fam.a(),
            fam.len()
        )));
    }
    Ok(())
}

fn ordered_product(ms: &[&ExactMatrix], n: usize) -> ExactMatrix {
    ms.iter().fold(ExactMatrix::identity(n), |acc, m| &acc * *m)
}

/// Maximal-rate unitary-weight SSD code on 2^a antennas: k = 2a symbols.
///
/// `A_1I = I`, `A_iI = F_{i−1}` (i = 2..2a), `A_1Q = m·F_1⋯F_{2a−1}` with
/// `m = j` for odd a and `m = 1` for even a, and `A_iQ = A_1Q·A_iI`.
///
/// Either sign of `A_iQ` gives an SSD code with the same coding gain; the
/// plus sign reproduces the familiar 4-antenna codeword entry for entry.
pub fn build_max_rate_ussd(a: u32, fam: &AnticommutingFamily) -> Result<ExactCode> {
    check_family_param(a, fam)?;
    let n = fam.n();
    let k = 2 * a as usize;
    let m = if a % 2 == 1 { Unit::J } else { Unit::One };
    let generators: Vec<&ExactMatrix> = (1..k).map(|i| fam.f(i)).collect();
    let a1q = ordered_product(&generators, n).mul_unit(m);
    let mut weights = vec![(ExactMatrix::identity(n), a1q.clone())];
    for g in generators {
        let aq = &a1q * g;
        weights.push((g.clone(), aq));
    }
    Ok(LinearDispersionCode::new(format!("ussd-{n}tx"), n, weights)?.with_declared_class(CodeClass::UnitaryWeightSsd))
}

/// Square complex orthogonal design on 2^a antennas: k = a+1 symbols.
///
/// `A_1I = I`, `A_1Q = F_1`, and `(A_iI, A_iQ) = (F_{2i−2}, F_{2i−1})`.
pub fn build_square_cod(a: u32, fam: &AnticommutingFamily) -> Result<ExactCode> {
    check_family_param(a, fam)?;
    let n = fam.n();
    let mut weights = vec![(ExactMatrix::identity(n), fam.f(1).clone())];
    for i in 2..=(a as usize + 1) {
        weights.push((fam.f(2 * i - 2).clone(), fam.f(2 * i - 1).clone()));
    }
    Ok(LinearDispersionCode::new(format!("cod-{n}tx"), n, weights)?.with_declared_class(CodeClass::Cod))
}

/// The 4-antenna coordinate-interleaved orthogonal design.
///
/// Two Alamouti blocks on the diagonal carry `x̃_1 = x_1I + j·x_3Q`,
/// `x̃_2 = x_2I + j·x_4Q` and `x̃_3 = x_3I + j·x_1Q`, `x̃_4 = x_4I + j·x_2Q`:
///
/// ```text
/// [ x̃1   x̃2   0    0  ]
/// [-x̃2*  x̃1*  0    0  ]
/// [ 0    0    x̃3   x̃4 ]
/// [ 0    0   -x̃4*  x̃3*]
/// ```
pub fn build_ciod4() -> ExactCode {
    // Coefficients of a component t placed as the first (resp. second)
    // entry of an Alamouti block at `offset`: real part or j·part.
    fn block(offset: usize, first: bool, imag: bool) -> ExactMatrix {
        let (o, z) = (offset, Complex::new(0, 0));
        let j = Complex::new(0, 1);
        let one = Complex::new(1, 0);
        ExactMatrix::from_fn(4, |r, c| match (first, imag) {
            // t at (o,o) and t* at (o+1,o+1)
            (true, false) if (r, c) == (o, o) || (r, c) == (o + 1, o + 1) => one,
            (true, true) if (r, c) == (o, o) => j,
            (true, true) if (r, c) == (o + 1, o + 1) => -j,
            // t at (o,o+1) and −t* at (o+1,o)
            (false, false) if (r, c) == (o, o + 1) => one,
            (false, false) if (r, c) == (o + 1, o) => -one,
            (false, true) if (r, c) == (o, o + 1) || (r, c) == (o + 1, o) => j,
            _ => z,
        })
    }
    let weights = vec![
        (block(0, true, false), block(2, true, true)),
        (block(0, false, false), block(2, false, true)),
        (block(2, true, false), block(0, true, true)),
        (block(2, false, false), block(0, false, true)),
    ];
    LinearDispersionCode::new("ciod-4tx", 4, weights)
        .expect("fixed 4x4 weights")
        .with_declared_class(CodeClass::NonUnitaryWeightSsd)
}

/// A code whose weights may be exact or floating.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyCode {
    Exact(ExactCode),
    Float(FloatCode),
}

impl AnyCode {
    pub fn to_float(&self) -> FloatCode {
        match self {
            AnyCode::Exact(c) => c.to_float(),
            AnyCode::Float(c) => c.clone(),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            AnyCode::Exact(c) => c.label(),
            AnyCode::Float(c) => c.label(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            AnyCode::Exact(c) => c.n(),
            AnyCode::Float(c) => c.n(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            AnyCode::Exact(c) => c.k(),
            AnyCode::Float(c) => c.k(),
        }
    }

    pub fn declared_class(&self) -> Option<CodeClass> {
        match self {
            AnyCode::Exact(c) => c.declared_class(),
            AnyCode::Float(c) => c.declared_class(),
        }
    }

    pub fn from_json(s: &str) -> Result<AnyCode> {
        let raw: RawCode = serde_json::from_str(s)?;
        if raw.weights.len() != 2 * raw.k {
            return Err(Error::Malformed(format!(
                "k = {} needs {} weight matrices, found {}",
                raw.k,
                2 * raw.k,
                raw.weights.len()
            )));
        }
        let all_exact = raw.weights.iter().all(|m| m.mode() == Mode::Exact);
        let code = if all_exact {
            let ms: Vec<ExactMatrix> = raw
                .weights
                .into_iter()
                .map(|m| match m {
                    GaussianMatrix::Exact(e) => e,
                    GaussianMatrix::Float(_) => unreachable!(),
                })
                .collect();
            let mut code = LinearDispersionCode::new(raw.label, raw.n, pairs(ms))?;
            code.declared_class = raw.class;
            AnyCode::Exact(code)
        } else {
            let ms: Vec<FloatMatrix> = raw.weights.iter().map(GaussianMatrix::to_float).collect();
            let mut code = LinearDispersionCode::new(raw.label, raw.n, pairs(ms))?;
            code.declared_class = raw.class;
            AnyCode::Float(code)
        };
        Ok(code)
    }

    pub fn to_json(&self) -> String {
        let (label, n, k, class, weights): (_, _, _, _, Vec<GaussianMatrix>) = match self {
            AnyCode::Exact(c) => (
                c.label.clone(),
                c.n,
                c.k(),
                c.declared_class,
                c.all_weights().cloned().map(Into::into).collect(),
            ),
            AnyCode::Float(c) => (
                c.label.clone(),
                c.n,
                c.k(),
                c.declared_class,
                c.all_weights().cloned().map(Into::into).collect(),
            ),
        };
        serde_json::to_string_pretty(&RawCode {
            label,
            n,
            k,
            class,
            weights,
        })
        .expect("code serialization cannot fail")
    }
}

impl From<ExactCode> for AnyCode {
    fn from(c: ExactCode) -> Self {
        AnyCode::Exact(c)
    }
}

impl From<FloatCode> for AnyCode {
    fn from(c: FloatCode) -> Self {
        AnyCode::Float(c)
    }
}

fn pairs<T>(ms: Vec<CMatrix<T>>) -> Vec<(CMatrix<T>, CMatrix<T>)> {
    let mut it = ms.into_iter();
    let mut out = Vec::new();
    while let (Some(a), Some(b)) = (it.next(), it.next()) {
        out.push((a, b));
    }
    out
}

#[derive(Serialize, Deserialize)]
struct RawCode {
    label: String,
    n: usize,
    k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    class: Option<CodeClass>,
    weights: Vec<GaussianMatrix>,
}
