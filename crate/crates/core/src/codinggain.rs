//! Constellations, difference sets and the minimum determinant.
//!
//! For a full-diversity code the coding gain is governed by
//! `Δ_min = min det((S−S′)ᴴ(S−S′))` over distinct codeword pairs. Since the
//! code is linear, pairs reduce to nonzero difference patterns
//! `(Δx_1, …, Δx_k)` with each `Δx_i ∈ {0} ∪ ΔA`.
//!
//! When the code is single-symbol decodable the Gram matrix splits into a sum
//! of per-symbol positive semidefinite terms, so the minimum is attained with
//! a single nonzero `Δx_i`. For maximal-rate unitary-weight codes this gives
//! the closed form `min_{Δx ∈ ΔA} |Δx_I² − Δx_Q²|^n`.

use std::collections::HashSet;
use std::f64::consts::FRAC_PI_4;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::scalar::Scalar;
use crate::stbc::{weighted_pair, LinearDispersionCode};
use crate::verifier::check_ssd;
use crate::FloatMatrix;

/// Enumeration budget for the unreduced search (difference patterns).
pub const BRUTE_FORCE_BUDGET: u64 = 10_000_000;
/// Differences with `||Δ_I| − |Δ_Q|| <= DIVERSITY_TOL` lie on a ±45° line.
pub const DIVERSITY_TOL: f64 = 1e-12;
/// Eigenvalues of a Hermitian unitary matrix within this of ±1 are snapped.
pub const EIGEN_SNAP_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyMode {
    /// Odd-integer grid as is.
    Raw,
    /// Scaled to mean `|x|² = 1`.
    UnitAverage,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constellation {
    name: String,
    points: Vec<Complex64>,
    rotation: f64,
    energy_mode: EnergyMode,
}

impl Constellation {
    /// `points` are taken as given (already rotated and scaled).
    pub fn new(name: impl Into<String>, points: Vec<Complex64>, rotation: f64, energy_mode: EnergyMode) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter("a constellation needs at least two points".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if points[..i].iter().any(|q| (p - q).norm() <= 1e-12) {
                return Err(Error::InvalidParameter(format!("duplicate constellation point {p}")));
            }
        }
        Ok(Constellation {
            name: name.into(),
            points,
            rotation,
            energy_mode,
        })
    }

    /// Rotates `base` by `angle` and applies the energy convention.
    fn from_base(name: String, base: Vec<Complex64>, angle: f64, energy_mode: EnergyMode) -> Result<Self> {
        let rot = Complex64::from_polar(1.0, angle);
        let mut points: Vec<Complex64> = base.into_iter().map(|p| p * rot).collect();
        if energy_mode == EnergyMode::UnitAverage {
            let e = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / points.len() as f64;
            let g = e.sqrt().recip();
            points.iter_mut().for_each(|p| *p *= g);
        }
        Constellation::new(name, points, angle, energy_mode)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    pub fn energy_mode(&self) -> EnergyMode {
        self.energy_mode
    }

    pub fn mean_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    pub fn mean(&self) -> Complex64 {
        self.points.iter().sum::<Complex64>() / self.points.len() as f64
    }

    /// Distinct nonzero differences `a − b`, `a ≠ b`.
    pub fn difference_set(&self) -> Vec<Complex64> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for a in &self.points {
            for b in &self.points {
                let d = a - b;
                if d.norm() <= 1e-12 {
                    continue;
                }
                let key = ((d.re * 1e9).round() as i64, (d.im * 1e9).round() as i64);
                if seen.insert(key) {
                    out.push(d);
                }
            }
        }
        out
    }
}

/// Square M-QAM on the odd-integer grid `{±1, ±3, …}²`, rotated by `angle`.
pub fn rotated_qam(m: usize, angle: f64, energy_mode: EnergyMode) -> Result<Constellation> {
    let side = match m {
        4 => 2,
        16 => 4,
        64 => 8,
        _ => {
            return Err(Error::InvalidParameter(format!(
                "unsupported QAM size {m}; expected 4, 16 or 64"
            )))
        }
    };
    let levels: Vec<f64> = (0..side).map(|i| (2 * i as i64 - (side as i64 - 1)) as f64).collect();
    let base = levels
        .iter()
        .flat_map(|&re| levels.iter().map(move |&im| Complex64::new(re, im)))
        .collect();
    Constellation::from_base(format!("qam{m}"), base, angle, energy_mode)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Qam8Kind {
    /// 4×2 grid `{±1, ±3} × {±1}`.
    Rect,
    /// 9-QAM on `{−1, 1, 3}²` minus its highest-energy point `3+3j`.
    SquareDerived,
}

pub fn special_8qam(kind: Qam8Kind, angle: f64, energy_mode: EnergyMode) -> Result<Constellation> {
    let (name, base): (&str, Vec<Complex64>) = match kind {
        Qam8Kind::Rect => (
            "8qam-rect",
            [-3.0, -1.0, 1.0, 3.0]
                .iter()
                .flat_map(|&re| [-1.0, 1.0].into_iter().map(move |im| Complex64::new(re, im)))
                .collect(),
        ),
        Qam8Kind::SquareDerived => (
            "8qam-sq",
            [
                (-1.0, -1.0),
                (-1.0, 1.0),
                (-1.0, 3.0),
                (1.0, -1.0),
                (1.0, 1.0),
                (1.0, 3.0),
                (3.0, -1.0),
                (3.0, 1.0),
            ]
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect(),
        ),
    };
    Constellation::from_base(name.into(), base, angle, energy_mode)
}

/// Rotation maximizing the coding gain of maximal-rate unitary-weight SSD
/// codes over QAM: `π/4 + ½·arctan 2`.
pub fn optimal_angle() -> f64 {
    FRAC_PI_4 + ciod_angle()
}

/// Rotation maximizing the QAM product distance: `½·arctan 2`.
pub fn ciod_angle() -> f64 {
    0.5 * 2f64.atan()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiversityReport {
    pub passed: bool,
    /// Differences lying on a ±45° line.
    pub witnesses: Vec<Complex64>,
}

pub fn diversity_check(constellation: &Constellation) -> DiversityReport {
    let witnesses: Vec<Complex64> = constellation
        .difference_set()
        .into_iter()
        .filter(|d| (d.re.abs() - d.im.abs()).abs() <= DIVERSITY_TOL)
        .collect();
    DiversityReport {
        passed: witnesses.is_empty(),
        witnesses,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// Single-symbol search for SSD codes, full enumeration otherwise.
    Auto,
    /// Every nonzero difference pattern.
    Full,
    /// One nonzero symbol difference; requires an SSD code.
    SingleSymbol,
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchMode::Auto => "auto",
            SearchMode::Full => "full",
            SearchMode::SingleSymbol => "single-symbol",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinDet {
    pub value: f64,
    /// Per-symbol differences of a minimizing pattern.
    pub difference: Vec<Complex64>,
    pub mode: SearchMode,
    pub patterns: u64,
}

/// `det((ΔS)ᴴΔS) = |det ΔS|²` for square ΔS.
fn gram_det(ds: &FloatMatrix) -> f64 {
    ds.det().norm_sqr()
}

/// Minimum of `det((S−S′)ᴴ(S−S′))` over distinct codewords.
pub fn min_det_bruteforce<T: Scalar>(
    code: &LinearDispersionCode<T>,
    constellation: &Constellation,
    mode: SearchMode,
) -> Result<MinDet> {
    let mode = match mode {
        SearchMode::Auto if check_ssd(code).passed() => SearchMode::SingleSymbol,
        SearchMode::Auto => SearchMode::Full,
        m => m,
    };
    if code.k() == 0 {
        return Err(Error::InvalidParameter("code has no symbols".into()));
    }
    let diffs = constellation.difference_set();
    match mode {
        SearchMode::SingleSymbol => {
            let ssd = check_ssd(code);
            if !ssd.passed() {
                let first = ssd.failures.first().map(|f| f.to_string()).unwrap_or_default();
                return Err(Error::NotSsd(format!("single-symbol reduction unavailable: {first}")));
            }
            single_symbol_search(code, &diffs)
        }
        SearchMode::Full => full_search(code, &diffs),
        SearchMode::Auto => unreachable!(),
    }
}

fn single_symbol_search<T: Scalar>(code: &LinearDispersionCode<T>, diffs: &[Complex64]) -> Result<MinDet> {
    let k = code.k();
    let mut best: Option<(f64, usize, Complex64)> = None;
    for (slot, (a, b)) in code.weights().iter().enumerate() {
        for d in diffs {
            let v = gram_det(&weighted_pair(a, b, d.re, d.im));
            if best.is_none_or(|(bv, _, _)| v < bv) {
                best = Some((v, slot, *d));
            }
        }
    }
    let (value, slot, d) = best.expect("non-empty search");
    let mut difference = vec![Complex64::new(0.0, 0.0); k];
    difference[slot] = d;
    Ok(MinDet {
        value,
        difference,
        mode: SearchMode::SingleSymbol,
        patterns: (k * diffs.len()) as u64,
    })
}

fn full_search<T: Scalar>(code: &LinearDispersionCode<T>, diffs: &[Complex64]) -> Result<MinDet> {
    let k = code.k();
    let mut alphabet = vec![Complex64::new(0.0, 0.0)];
    alphabet.extend_from_slice(diffs);
    let radix = alphabet.len() as u64;
    let total = (radix as f64).powi(k as i32);
    if total - 1.0 > BRUTE_FORCE_BUDGET as f64 {
        return Err(Error::BudgetExceeded {
            needed: total - 1.0,
            budget: BRUTE_FORCE_BUDGET,
        });
    }
    let total = radix.pow(k as u32);
    // per-slot contribution for each alphabet entry
    let parts: Vec<Vec<FloatMatrix>> = code
        .weights()
        .iter()
        .map(|(a, b)| alphabet.iter().map(|d| weighted_pair(a, b, d.re, d.im)).collect())
        .collect();
    let n = code.n();
    let digits = |mut idx: u64| {
        let mut out = vec![0usize; k];
        for slot in out.iter_mut() {
            *slot = (idx % radix) as usize;
            idx /= radix;
        }
        out
    };
    let (value, idx) = (1..total)
        .into_par_iter()
        .map(|idx| {
            let ds = digits(idx)
                .iter()
                .enumerate()
                .fold(CMatrix::zeros(n), |acc, (slot, &d)| &acc + &parts[slot][d]);
            (gram_det(&ds), idx)
        })
        .reduce(
            || (f64::INFINITY, u64::MAX),
            |x, y| if (y.0, y.1) < (x.0, x.1) { y } else { x },
        );
    Ok(MinDet {
        value,
        difference: digits(idx).into_iter().map(|d| alphabet[d]).collect(),
        mode: SearchMode::Full,
        patterns: total - 1,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub value: f64,
    pub difference: Complex64,
}

/// `min_{Δx ∈ ΔA} |Δx_I² − Δx_Q²|^n`, the minimum determinant of any
/// maximal-rate unitary-weight SSD code on n antennas.
pub fn min_det_closed_form(constellation: &Constellation, n: usize) -> ClosedForm {
    constellation
        .difference_set()
        .into_iter()
        .map(|d| ClosedForm {
            value: (d.re * d.re - d.im * d.im).abs().powi(n as i32),
            difference: d,
        })
        .min_by(|x, y| x.value.total_cmp(&y.value))
        .expect("a constellation has at least one difference")
}

/// Multiplicities `(m₊, m₋)` of the eigenvalues +1 and −1 of a Hermitian
/// unitary matrix.
pub fn eigen_split<T: Scalar>(a1q: &CMatrix<T>) -> Result<(usize, usize)> {
    let f = a1q.to_float();
    let herm_dev = (&f - &f.herm()).frob_norm();
    if herm_dev > EIGEN_SNAP_TOL {
        return Err(Error::NotHermitian { deviation: herm_dev });
    }
    let unit_dev = f.unitarity_defect();
    if unit_dev > EIGEN_SNAP_TOL {
        return Err(Error::NotUnitary { deviation: unit_dev });
    }
    let eig = f.to_nalgebra().symmetric_eigen();
    let (mut plus, mut minus) = (0, 0);
    for &ev in eig.eigenvalues.iter() {
        if (ev - 1.0).abs() <= EIGEN_SNAP_TOL {
            plus += 1;
        } else if (ev + 1.0).abs() <= EIGEN_SNAP_TOL {
            minus += 1;
        } else {
            return Err(Error::NotUnitary {
                deviation: (ev.abs() - 1.0).abs(),
            });
        }
    }
    Ok((plus, minus))
}

/// Factor bringing a code to mean weight energy `n/2`.
///
/// That is the energy of the 4-antenna CIOD, whose weights each carry two
/// unit-modulus entries. Codes rescaled this way transmit the same average
/// energy per channel use for any zero-mean constellation with uncorrelated
/// I/Q components, so their minimum determinants compare directly.
pub fn equal_energy_scale<T: Scalar>(code: &LinearDispersionCode<T>) -> f64 {
    let e = code.mean_weight_energy();
    if e == 0.0 {
        return 1.0;
    }
    (code.n() as f64 / 2.0 / e).sqrt()
}
