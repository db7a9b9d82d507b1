//! Algebraic conditions on weight matrices and the code classification.
//!
//! Condition identifiers used in reports:
//!
//! | id            | condition                                        | range        |
//! |---------------|--------------------------------------------------|--------------|
//! | `UW`          | `A_iIᴴA_iI = A_iQᴴA_iQ = I`                      | every i      |
//! | `SSD-IQ`      | `A_iIᴴA_jQ + A_jQᴴA_iI = 0`                      | i ≠ j        |
//! | `SSD-II`      | `A_iIᴴA_jI + A_jIᴴA_iI = 0`                      | i < j        |
//! | `SSD-QQ`      | `A_iQᴴA_jQ + A_jQᴴA_iQ = 0`                      | i < j        |
//! | `COD-IQ-self` | `A_iIᴴA_iQ + A_iQᴴA_iI = 0`                      | every i      |
//! | `INDEP`       | the 2k weights are linearly independent over ℝ   | whole code   |
//!
//! Exact codes are checked exactly; floating codes to [`VERIFY_TOL`] in
//! Frobenius norm.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::rank::real_rank;
use crate::scalar::Scalar;
use crate::stbc::{LinearDispersionCode, UNITARY_TOL};

pub const VERIFY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CodeClass {
    #[serde(rename = "COD")]
    Cod,
    #[serde(rename = "unitary-weight-SSD")]
    UnitaryWeightSsd,
    #[serde(rename = "non-unitary-weight-SSD")]
    NonUnitaryWeightSsd,
    #[serde(rename = "not-SSD")]
    NotSsd,
}

impl CodeClass {
    pub fn is_ssd(self) -> bool {
        self != CodeClass::NotSsd
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CodeClass::Cod => "COD",
            CodeClass::UnitaryWeightSsd => "unitary-weight-SSD",
            CodeClass::NonUnitaryWeightSsd => "non-unitary-weight-SSD",
            CodeClass::NotSsd => "not-SSD",
        }
    }
}

impl fmt::Display for CodeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    #[serde(rename = "UW")]
    UnitaryWeight,
    #[serde(rename = "SSD-IQ")]
    SsdIq,
    #[serde(rename = "SSD-II")]
    SsdIi,
    #[serde(rename = "SSD-QQ")]
    SsdQq,
    #[serde(rename = "COD-IQ-self")]
    CodIqSelf,
    #[serde(rename = "INDEP")]
    Independence,
    /// `A_1I = I`.
    #[serde(rename = "NORM-ID")]
    NormIdentity,
    /// `A_iIᴴ = −A_iI`, i ≥ 2.
    #[serde(rename = "NORM-I-SKEW")]
    NormISkew,
    /// `A_iQᴴ = −A_iQ`, i ≥ 2.
    #[serde(rename = "NORM-Q-SKEW")]
    NormQSkew,
    /// `A_1QᴴA_iI = A_iIA_1Q`, i ≥ 2.
    #[serde(rename = "NORM-1Q-I")]
    Norm1qI,
    /// `A_1QᴴA_iQ = A_iQA_1Q`, i ≥ 2.
    #[serde(rename = "NORM-1Q-Q")]
    Norm1qQ,
    /// `A_iI`, `A_jI` anticommute, 2 ≤ i < j.
    #[serde(rename = "NORM-II")]
    NormIi,
    /// `A_iQ`, `A_jQ` anticommute, 2 ≤ i < j.
    #[serde(rename = "NORM-QQ")]
    NormQq,
    /// `A_iI`, `A_jQ` anticommute, 2 ≤ i ≠ j.
    #[serde(rename = "NORM-IQ")]
    NormIq,
    /// `A_1Q` Hermitian with `A_1Q² = I`.
    #[serde(rename = "MAX-1Q-HERM")]
    Max1qHermitian,
    /// `A_iI` commutes with `A_1Q`, i ≥ 2.
    #[serde(rename = "MAX-1Q-COMMUTE")]
    Max1qCommute,
    /// `A_iQ = ±A_iI·A_1Q`, i ≥ 2.
    #[serde(rename = "MAX-IQ-PRODUCT")]
    MaxIqProduct,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().unwrap_or("?"))
    }
}

/// A failed condition with 1-based symbol indices (`j` for pair conditions).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub condition: Condition,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.i, self.j) {
            (Some(i), Some(j)) => write!(f, "{} ({i},{j})", self.condition),
            (Some(i), None) => write!(f, "{} ({i})", self.condition),
            _ => write!(f, "{}", self.condition),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub failures: Vec<Failure>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn has(&self, condition: Condition) -> bool {
        self.failures.iter().any(|f| f.condition == condition)
    }

    fn fail(&mut self, condition: Condition, i: Option<usize>, j: Option<usize>) {
        self.failures.push(Failure { condition, i, j });
    }

    fn extend(&mut self, other: CheckResult) {
        self.failures.extend(other.failures);
    }
}

fn tol<T: Scalar>() -> f64 {
    if T::EXACT {
        0.0
    } else {
        VERIFY_TOL
    }
}

/// `XᴴY + YᴴX = 0`.
fn hermitian_anticommutes<T: Scalar>(x: &CMatrix<T>, y: &CMatrix<T>) -> bool {
    let xy = &x.herm() * y;
    (&xy + &xy.herm()).is_zero_within(tol::<T>())
}

fn independence<T: Scalar>(code: &LinearDispersionCode<T>) -> CheckResult {
    let mut r = CheckResult::default();
    let ws: Vec<CMatrix<T>> = code.all_weights().cloned().collect();
    if real_rank(&ws) < ws.len() {
        r.fail(Condition::Independence, None, None);
    }
    r
}

fn ssd_conditions<T: Scalar>(code: &LinearDispersionCode<T>) -> CheckResult {
    let mut r = CheckResult::default();
    let w = code.weights();
    for i in 0..w.len() {
        for j in 0..w.len() {
            if i == j {
                continue;
            }
            if !hermitian_anticommutes(&w[i].0, &w[j].1) {
                r.fail(Condition::SsdIq, Some(i + 1), Some(j + 1));
            }
            if i < j {
                if !hermitian_anticommutes(&w[i].0, &w[j].0) {
                    r.fail(Condition::SsdIi, Some(i + 1), Some(j + 1));
                }
                if !hermitian_anticommutes(&w[i].1, &w[j].1) {
                    r.fail(Condition::SsdQq, Some(i + 1), Some(j + 1));
                }
            }
        }
    }
    r
}

fn cod_self<T: Scalar>(code: &LinearDispersionCode<T>) -> CheckResult {
    let mut r = CheckResult::default();
    for (i, (a, b)) in code.weights().iter().enumerate() {
        if !hermitian_anticommutes(a, b) {
            r.fail(Condition::CodIqSelf, Some(i + 1), None);
        }
    }
    r
}

/// Pairwise SSD conditions plus linear independence of the 2k weights.
pub fn check_ssd<T: Scalar>(code: &LinearDispersionCode<T>) -> CheckResult {
    let mut r = independence(code);
    r.extend(ssd_conditions(code));
    r
}

/// Every weight matrix is unitary. Independence is not part of this check.
pub fn check_unitary_weight<T: Scalar>(code: &LinearDispersionCode<T>) -> CheckResult {
    let mut r = CheckResult::default();
    for (i, (a, b)) in code.weights().iter().enumerate() {
        if !a.is_unitary(tol::<T>()) || !b.is_unitary(tol::<T>()) {
            r.fail(Condition::UnitaryWeight, Some(i + 1), None);
        }
    }
    r
}

/// Unitary weights, the pairwise SSD conditions, the per-symbol self
/// condition and independence. The empty code passes vacuously.
pub fn check_cod<T: Scalar>(code: &LinearDispersionCode<T>) -> CheckResult {
    let mut r = independence(code);
    r.extend(check_unitary_weight(code));
    r.extend(ssd_conditions(code));
    r.extend(cod_self(code));
    r
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub class: CodeClass,
    pub failed_conditions: Vec<Failure>,
    pub linear_independent: bool,
    /// `A_1I` is the identity.
    pub normalized: bool,
}

pub fn classify<T: Scalar>(code: &LinearDispersionCode<T>) -> ClassificationReport {
    let indep = independence(code);
    let ssd = ssd_conditions(code);
    let uw = check_unitary_weight(code);
    let selfc = cod_self(code);
    let class = if !indep.passed() || !ssd.passed() {
        CodeClass::NotSsd
    } else if !uw.passed() {
        CodeClass::NonUnitaryWeightSsd
    } else if selfc.passed() {
        CodeClass::Cod
    } else {
        CodeClass::UnitaryWeightSsd
    };
    let normalized = code
        .weights()
        .first()
        .is_some_and(|(a, _)| a.approx_eq(&CMatrix::identity(code.n()), tol::<T>()));
    let linear_independent = indep.passed();
    let mut failed = indep;
    failed.extend(uw);
    failed.extend(ssd);
    failed.extend(selfc);
    ClassificationReport {
        class,
        failed_conditions: failed.failures,
        linear_independent,
        normalized,
    }
}

/// Left-multiplies by `A_1Iᴴ` so that the first weight becomes the identity.
pub fn normalize<T: Scalar>(code: &LinearDispersionCode<T>) -> Result<LinearDispersionCode<T>> {
    let Some((a1, _)) = code.weights().first() else {
        return Err(Error::InvalidParameter("cannot normalize a code with no symbols".into()));
    };
    let t = if T::EXACT { 0.0 } else { UNITARY_TOL };
    if !a1.is_unitary(t) {
        return Err(Error::NotUnitary {
            deviation: a1.unitarity_defect(),
        });
    }
    code.left_multiply(&a1.herm())
}

/// Structure every normalized unitary-weight SSD code has.
pub fn check_normalized_structure<T: Scalar>(code: &LinearDispersionCode<T>) -> CheckResult {
    let mut r = CheckResult::default();
    let w = code.weights();
    let Some((a1i, a1q)) = w.first() else {
        return r;
    };
    let t = tol::<T>();
    if !a1i.approx_eq(&CMatrix::identity(code.n()), t) {
        r.fail(Condition::NormIdentity, Some(1), None);
    }
    let a1q_h = a1q.herm();
    for (idx, (ai, aq)) in w.iter().enumerate().skip(1) {
        let i = Some(idx + 1);
        if !ai.is_anti_hermitian(t) {
            r.fail(Condition::NormISkew, i, None);
        }
        if !aq.is_anti_hermitian(t) {
            r.fail(Condition::NormQSkew, i, None);
        }
        if !(&a1q_h * ai).approx_eq(&(ai * a1q), t) {
            r.fail(Condition::Norm1qI, i, None);
        }
        if !(&a1q_h * aq).approx_eq(&(aq * a1q), t) {
            r.fail(Condition::Norm1qQ, i, None);
        }
    }
    for i in 1..w.len() {
        for j in 1..w.len() {
            if i == j {
                continue;
            }
            if !w[i].0.anticommutes_with(&w[j].1, t) {
                r.fail(Condition::NormIq, Some(i + 1), Some(j + 1));
            }
            if i < j {
                if !w[i].0.anticommutes_with(&w[j].0, t) {
                    r.fail(Condition::NormIi, Some(i + 1), Some(j + 1));
                }
                if !w[i].1.anticommutes_with(&w[j].1, t) {
                    r.fail(Condition::NormQq, Some(i + 1), Some(j + 1));
                }
            }
        }
    }
    r
}

/// Extra structure of a maximal-rate normalized unitary-weight SSD code.
pub fn check_max_rate_structure<T: Scalar>(code: &LinearDispersionCode<T>) -> CheckResult {
    let mut r = CheckResult::default();
    let w = code.weights();
    let Some((_, a1q)) = w.first() else {
        return r;
    };
    let t = tol::<T>();
    let id = CMatrix::identity(code.n());
    if !a1q.is_hermitian(t) || !(a1q * a1q).approx_eq(&id, t) {
        r.fail(Condition::Max1qHermitian, Some(1), None);
    }
    for (idx, (ai, aq)) in w.iter().enumerate().skip(1) {
        let i = Some(idx + 1);
        if !ai.commutes_with(a1q, t) {
            r.fail(Condition::Max1qCommute, i, None);
        }
        let prod = ai * a1q;
        if !(aq.approx_eq(&prod, t) || aq.approx_eq(&-&prod, t)) {
            r.fail(Condition::MaxIqProduct, i, None);
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::generate_family;
    use crate::matrix::Unit;
    use crate::stbc::{build_ciod4, build_max_rate_ussd, build_square_cod, ExactCode};
    use crate::ExactMatrix;

    fn ussd(a: u32) -> ExactCode {
        build_max_rate_ussd(a, &generate_family(a).unwrap()).unwrap()
    }

    fn cod(a: u32) -> ExactCode {
        build_square_cod(a, &generate_family(a).unwrap()).unwrap()
    }

    #[test]
    fn ussd_passes_ssd_and_uw_but_not_cod() {
        let code = ussd(2);
        assert!(check_ssd(&code).passed());
        assert!(check_unitary_weight(&code).passed());
        let cod = check_cod(&code);
        assert!(!cod.passed());
        assert!(cod.has(Condition::CodIqSelf));
    }

    #[test]
    fn square_cods_pass() {
        for a in 1..=3 {
            let c = cod(a);
            assert!(check_cod(&c).passed(), "a={a}: {:?}", check_cod(&c).failures);
            assert!(check_ssd(&c).passed());
        }
    }

    #[test]
    fn dependent_second_weight_fails() {
        let code = ussd(2);
        let mut w = code.weights().to_vec();
        w[1].0 = w[0].0.mul_unit(Unit::J);
        let bad = ExactCode::new("bad", 4, w).unwrap();
        let r = check_ssd(&bad);
        assert!(!r.passed());
        assert!(r.has(Condition::Independence) || r.has(Condition::SsdIi));
    }

    #[test]
    fn ciod_is_non_unitary() {
        let c = build_ciod4();
        assert!(check_ssd(&c).passed());
        assert!(!check_unitary_weight(&c).passed());
        assert_eq!(classify(&c).class, CodeClass::NonUnitaryWeightSsd);
    }

    #[test]
    fn identity_weights_are_unitary_but_dependent() {
        let id = ExactMatrix::identity(2);
        let code = ExactCode::new("ids", 2, vec![(id.clone(), id.clone()), (id.clone(), id)]).unwrap();
        assert!(check_unitary_weight(&code).passed());
        let rep = classify(&code);
        assert!(!rep.linear_independent);
        assert_eq!(rep.class, CodeClass::NotSsd);
    }

    #[test]
    fn empty_code_is_vacuously_cod() {
        let code = ExactCode::new("empty", 2, vec![]).unwrap();
        assert!(check_cod(&code).passed());
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(&cod(1)).class, CodeClass::Cod);
        assert_eq!(classify(&ussd(2)).class, CodeClass::UnitaryWeightSsd);
        assert!(classify(&ussd(2)).normalized);
    }

    #[test]
    fn normalize_rejects_non_unitary_first_weight() {
        assert!(matches!(normalize(&build_ciod4()), Err(Error::NotUnitary { .. })));
        let code = ussd(2);
        assert_eq!(normalize(&code).unwrap(), code);
    }

    #[test]
    fn max_rate_structure_holds() {
        for a in 1..=3 {
            let code = ussd(a);
            assert!(check_normalized_structure(&code).passed());
            assert!(check_max_rate_structure(&code).passed());
        }
    }

    #[test]
    fn condition_ids_render() {
        assert_eq!(Condition::SsdIi.to_string(), "SSD-II");
        assert_eq!(Condition::CodIqSelf.to_string(), "COD-IQ-self");
        assert_eq!(
            serde_json::to_string(&CodeClass::UnitaryWeightSsd).unwrap(),
            "\"unitary-weight-SSD\""
        );
    }
}
