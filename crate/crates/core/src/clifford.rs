//! Maximal families of pairwise anticommuting, anti-Hermitian, unitary
//! matrices of size 2^a.
//!
//! A family has 2a+1 members `F_1 … F_{2a+1}` with `F_i² = −I` and
//! `F_{2a+1} = c·F_1F_2⋯F_{2a}`, where `c = j` if `(F_1⋯F_{2a})² = I`
//! (a even) and `c = 1` otherwise (a odd).
//!
//! Generation is recursive. For a = 1 the members are `jσ_z, jσ_y, jσ_x`.
//! Given the family `G_1 … G_{2a−1}` of size 2^{a−1}, the family of size 2^a
//! starts with
//!
//! ```text
//! G_1⊗σ_z, I⊗jσ_y, G_2⊗σ_z, I⊗jσ_x, G_3⊗σ_z, …, G_{2a−2}⊗σ_z
//! ```
//!
//! (2a matrices) and is closed with `c·F_1⋯F_{2a}`. For a = 2 the first four
//! members are exactly the 4×4 matrices commonly quoted for four transmit
//! antennas: `diag(j,−j,−j,j)`, `I⊗jσ_y`, `jσ_y⊗σ_z`, `I⊗jσ_x`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Unit;
use crate::ExactMatrix;

pub const MAX_FAMILY_PARAM: u32 = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct AnticommutingFamily {
    a: u32,
    matrices: Vec<ExactMatrix>,
    c: Unit,
}

impl AnticommutingFamily {
    /// Assembles a family without checking it; see [`verify_family`].
    pub fn from_parts(a: u32, matrices: Vec<ExactMatrix>, c: Unit) -> Self {
        AnticommutingFamily { a, matrices, c }
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn n(&self) -> usize {
        1 << self.a
    }

    pub fn c(&self) -> Unit {
        self.c
    }

    pub fn matrices(&self) -> &[ExactMatrix] {
        &self.matrices
    }

    /// 1-based, matching the usual `F_1 … F_{2a+1}` labels.
    pub fn f(&self, i: usize) -> &ExactMatrix {
        &self.matrices[i - 1]
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }
}

fn pauli_x() -> ExactMatrix {
    ExactMatrix::from_pairs(&[&[(0, 0), (1, 0)], &[(1, 0), (0, 0)]]).unwrap()
}

fn pauli_y() -> ExactMatrix {
    ExactMatrix::from_pairs(&[&[(0, 0), (0, -1)], &[(0, 1), (0, 0)]]).unwrap()
}

fn pauli_z() -> ExactMatrix {
    ExactMatrix::from_pairs(&[&[(1, 0), (0, 0)], &[(0, 0), (-1, 0)]]).unwrap()
}

/// `c` for a family of parameter `a`: j when a is even, 1 when a is odd.
pub fn closing_scalar(a: u32) -> Unit {
    if a % 2 == 0 {
        Unit::J
    } else {
        Unit::One
    }
}

pub fn generate_family(a: u32) -> Result<AnticommutingFamily> {
    if a < 1 {
        return Err(Error::InvalidParameter("family parameter a must be at least 1".into()));
    }
    if a > MAX_FAMILY_PARAM {
        return Err(Error::InvalidParameter(format!(
            "family parameter a = {a} exceeds the supported maximum {MAX_FAMILY_PARAM}"
        )));
    }
    let mut members = vec![
        pauli_z().mul_unit(Unit::J),
        pauli_y().mul_unit(Unit::J),
        pauli_x().mul_unit(Unit::J),
    ];
    for level in 2..=a {
        let half = members.len(); // 2(level-1)+1
        let i_small = ExactMatrix::identity(1 << (level - 1));
        let z = pauli_z();
        let mut next = Vec::with_capacity(2 * level as usize + 1);
        next.push(members[0].kron(&z));
        next.push(i_small.kron(&pauli_y().mul_unit(Unit::J)));
        next.push(members[1].kron(&z));
        next.push(i_small.kron(&pauli_x().mul_unit(Unit::J)));
        for g in &members[2..half - 1] {
            next.push(g.kron(&z));
        }
        debug_assert_eq!(next.len(), 2 * level as usize);
        let closing = product(&next).mul_unit(closing_scalar(level));
        next.push(closing);
        members = next;
    }
    Ok(AnticommutingFamily {
        a,
        matrices: members,
        c: closing_scalar(a),
    })
}

fn product(ms: &[ExactMatrix]) -> ExactMatrix {
    let n = ms[0].n();
    ms.iter().fold(ExactMatrix::identity(n), |acc, m| &acc * m)
}

/// Which property a [`FamilyCheck`] covers. Indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum FamilyCheckKind {
    Size,
    Unitary { i: usize },
    AntiHermitian { i: usize },
    SquaresToMinusIdentity { i: usize },
    Anticommute { i: usize, j: usize },
    ClosingProduct,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyCheck {
    #[serde(flatten)]
    pub kind: FamilyCheckKind,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub checks: Vec<FamilyCheck>,
}

impl FamilyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &FamilyCheckKind> {
        self.checks.iter().filter(|c| !c.passed).map(|c| &c.kind)
    }

    fn push(&mut self, kind: FamilyCheckKind, passed: bool) {
        self.checks.push(FamilyCheck { kind, passed });
    }
}

/// Exact check of every family invariant; failures are report entries.
pub fn verify_family(fam: &AnticommutingFamily) -> FamilyReport {
    let mut report = FamilyReport::default();
    let n = fam.n();
    let expected = 2 * fam.a as usize + 1;
    let well_formed = fam.len() == expected && fam.matrices.iter().all(|m| m.n() == n);
    report.push(FamilyCheckKind::Size, well_formed);
    if !well_formed {
        return report;
    }
    let id = ExactMatrix::identity(n);
    for (idx, f) in fam.matrices.iter().enumerate() {
        let i = idx + 1;
        report.push(FamilyCheckKind::Unitary { i }, f.is_unitary(0.0));
        report.push(FamilyCheckKind::AntiHermitian { i }, f.is_anti_hermitian(0.0));
        report.push(FamilyCheckKind::SquaresToMinusIdentity { i }, &(f * f) == &-&id);
    }
    for i in 0..fam.len() {
        for j in i + 1..fam.len() {
            report.push(
                FamilyCheckKind::Anticommute { i: i + 1, j: j + 1 },
                fam.matrices[i].anticommutes_with(&fam.matrices[j], 0.0),
            );
        }
    }
    let head = &fam.matrices[..expected - 1];
    let closing = product(head).mul_unit(fam.c);
    report.push(FamilyCheckKind::ClosingProduct, closing == fam.matrices[expected - 1]);
    report
}

/// Ordered product `F_{i_1}⋯F_{i_s}` for strictly increasing 1-based indices
/// drawn from `1..=2a`; the empty product is the identity.
pub fn product_subset(fam: &AnticommutingFamily, indices: &[usize]) -> Result<ExactMatrix> {
    let upper = 2 * fam.a as usize;
    for (pos, &i) in indices.iter().enumerate() {
        if i < 1 || i > upper {
            return Err(Error::InvalidParameter(format!("index {i} outside 1..={upper}")));
        }
        if pos > 0 && indices[pos - 1] >= i {
            return Err(Error::InvalidParameter(format!(
                "indices must be strictly increasing, got {:?}",
                indices
            )));
        }
    }
    Ok(indices
        .iter()
        .fold(ExactMatrix::identity(fam.n()), |acc, &i| &acc * fam.f(i)))
}

/// Subset of `1..=2a` encoded as a bitmask (bit i-1 ⇔ F_i), as an index list.
pub fn mask_to_indices(mask: u64, upper: usize) -> Vec<usize> {
    (1..=upper).filter(|&i| mask >> (i - 1) & 1 == 1).collect()
}

/// `(−1)^{s(s+1)/2}`: the square of a product of s distinct family members.
pub fn square_sign(s: u32) -> Result<i32> {
    if s < 1 {
        return Err(Error::InvalidParameter("square_sign needs s >= 1".into()));
    }
    let t = (s as u64) * (s as u64 + 1) / 2;
    Ok(if t % 2 == 0 { 1 } else { -1 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Commutation {
    Commute,
    Anticommute,
}

/// Products of r and s distinct members sharing p members commute iff
/// `(−1)^{rs−p} = 1`.
pub fn commute_predicate(r: u32, s: u32, p: u32) -> Result<Commutation> {
    if r < 1 || s < 1 || p > r.min(s) {
        return Err(Error::InvalidParameter(format!(
            "need r, s >= 1 and 0 <= p <= min(r, s); got r={r}, s={s}, p={p}"
        )));
    }
    let exponent = (r as u64) * (s as u64) - p as u64;
    Ok(if exponent % 2 == 0 {
        Commutation::Commute
    } else {
        Commutation::Anticommute
    })
}

#[derive(Serialize, Deserialize)]
struct RawFamily {
    a: u32,
    c: [i64; 2],
    matrices: Vec<crate::GaussianMatrix>,
}

impl AnticommutingFamily {
    pub fn to_json(&self) -> String {
        let c = self.c.to_complex::<i64>();
        let raw = RawFamily {
            a: self.a,
            c: [c.re, c.im],
            matrices: self.matrices.iter().cloned().map(Into::into).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("family serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawFamily = serde_json::from_str(s)?;
        let c = Unit::from_complex(Complex::new(raw.c[0] as f64, raw.c[1] as f64))
            .ok_or(Error::NonUnitScalar {
                re: raw.c[0] as f64,
                im: raw.c[1] as f64,
            })?;
        let matrices = raw
            .matrices
            .into_iter()
            .map(|m| match m {
                crate::GaussianMatrix::Exact(e) => Ok(e),
                crate::GaussianMatrix::Float(_) => {
                    Err(Error::Malformed("family matrices must be exact".into()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AnticommutingFamily { a: raw.a, matrices, c })
    }
}
