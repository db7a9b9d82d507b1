//! Square complex matrices generic over the scalar type.
//!
//! `CMatrix<i64>` holds Gaussian-integer entries and is closed (and exact)
//! under addition, multiplication, conjugate transpose, trace and scaling by
//! the units `{±1, ±j}`. `CMatrix<f64>` is the floating counterpart used once
//! rotated constellations or random unitaries enter the picture.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{RealField, Scalar};

/// One of the four units of the Gaussian integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    One,
    NegOne,
    J,
    NegJ,
}

impl Unit {
    pub fn to_complex<T: Scalar>(self) -> Complex<T> {
        let (o, z) = (T::one(), T::zero());
        match self {
            Unit::One => Complex::new(o, z),
            Unit::NegOne => Complex::new(-o, z),
            Unit::J => Complex::new(z, o),
            Unit::NegJ => Complex::new(z, -o),
        }
    }

    /// Exact match only; anything else is not a unit.
    pub fn from_complex(c: Complex64) -> Option<Unit> {
        match (c.re, c.im) {
            (re, im) if re == 1.0 && im == 0.0 => Some(Unit::One),
            (re, im) if re == -1.0 && im == 0.0 => Some(Unit::NegOne),
            (re, im) if re == 0.0 && im == 1.0 => Some(Unit::J),
            (re, im) if re == 0.0 && im == -1.0 => Some(Unit::NegJ),
            _ => None,
        }
    }

    pub fn mul(self, other: Unit) -> Unit {
        let quarter = |u: Unit| match u {
            Unit::One => 0,
            Unit::J => 1,
            Unit::NegOne => 2,
            Unit::NegJ => 3,
        };
        match (quarter(self) + quarter(other)) % 4 {
            0 => Unit::One,
            1 => Unit::J,
            2 => Unit::NegOne,
            _ => Unit::NegJ,
        }
    }

    pub fn neg(self) -> Unit {
        self.mul(Unit::NegOne)
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Unit::One => "1",
            Unit::NegOne => "-1",
            Unit::J => "j",
            Unit::NegJ => "-j",
        };
        f.write_str(s)
    }
}

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |r, c| if r == c { Complex::one() } else { Complex::zero() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                data.push(f(r, c));
            }
        }
        CMatrix { n, data }
    }

    pub fn diagonal(diag: &[Complex<T>]) -> Self {
        Self::from_fn(diag.len(), |r, c| if r == c { diag[r] } else { Complex::zero() })
    }

    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Malformed("matrix has no rows".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Malformed(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(CMatrix { n, data })
    }

    /// Builds from `(re, im)` pairs; handy for literal matrices in tests.
    pub fn from_pairs(rows: &[&[(T, T)]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(re, im)| Complex::new(re, im)).collect())
                .collect(),
        )
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        self.data[r * self.n + c]
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex<T>]> {
        self.data.chunks(self.n)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.n;
        let mut out = vec![Complex::<T>::zero(); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a.is_zero() {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                let orow = &mut out[r * n..(r + 1) * n];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(CMatrix { n, data: out })
    }

    /// Conjugate transpose.
    pub fn herm(&self) -> Self {
        Self::from_fn(self.n, |r, c| self.get(c, r).conj())
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.n).fold(Complex::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn frob_norm_sq(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn frob_norm(&self) -> f64 {
        self.frob_norm_sq().to_f64_lossy().sqrt()
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, t: T) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|&z| z * t).collect(),
        }
    }

    pub fn mul_unit(&self, u: Unit) -> Self {
        self.scale(u.to_complex())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (p, q) = (self.n, other.n);
        Self::from_fn(p * q, |r, c| self.get(r / q, c / q) * other.get(r % q, c % q))
    }

    /// Exact zero test for exact scalars; Frobenius norm `<= tol` otherwise.
    pub fn is_zero_within(&self, tol: f64) -> bool {
        if T::EXACT {
            self.data.iter().all(|z| z.is_zero())
        } else {
            self.frob_norm_sq().to_f64_lossy() <= tol * tol
        }
    }

    /// Frobenius distance to `other`, or 0/1 equality for exact scalars.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.n == other.n && (self - other).is_zero_within(tol)
    }

    /// `‖AᴴA − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.herm().matmul(self).expect("same size");
        (&g - &Self::identity(self.n)).frob_norm()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let g = self.herm().matmul(self).expect("same size");
        g.approx_eq(&Self::identity(self.n), tol)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.approx_eq(&self.herm(), tol)
    }

    pub fn is_anti_hermitian(&self, tol: f64) -> bool {
        self.approx_eq(&-&self.herm(), tol)
    }

    pub fn anticommutes_with(&self, other: &Self, tol: f64) -> bool {
        (&(self * other) + &(other * self)).is_zero_within(tol)
    }

    pub fn commutes_with(&self, other: &Self, tol: f64) -> bool {
        (&(self * other) - &(other * self)).is_zero_within(tol)
    }

    pub fn to_float(&self) -> CMatrix<f64> {
        CMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .map(|z| Complex64::new(z.re.to_f64_lossy(), z.im.to_f64_lossy()))
                .collect(),
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

impl<T: RealField> CMatrix<T> {
    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> Complex<T> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = Complex::<T>::one();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    a[i * n + col]
                        .norm_sqr()
                        .partial_cmp(&a[j * n + col].norm_sqr())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .expect("non-empty range");
            let p = a[pivot * n + col];
            if p.is_zero() {
                return Complex::zero();
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                }
                det = -det;
            }
            det = det * p;
            for r in col + 1..n {
                let f = a[r * n + col] / p;
                if f.is_zero() {
                    continue;
                }
                for k in col..n {
                    let v = a[col * n + k];
                    a[r * n + k] = a[r * n + k] - f * v;
                }
            }
        }
        det
    }
}

impl CMatrix<f64> {
    /// Back to Gaussian integers when every entry is (within `tol` of) an integer.
    pub fn to_exact(&self, tol: f64) -> Option<CMatrix<i64>> {
        let mut data = Vec::with_capacity(self.data.len());
        for z in &self.data {
            let (re, im) = (z.re.round(), z.im.round());
            if (z.re - re).abs() > tol || (z.im - im).abs() > tol {
                return None;
            }
            data.push(Complex::new(re as i64, im as i64));
        }
        Some(CMatrix { n: self.n, data })
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_row_slice(self.n, self.n, &self.data)
    }

    pub fn from_nalgebra(m: &nalgebra::DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Malformed(format!(
                "expected a square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows();
        Ok(Self::from_fn(n, |r, c| m[(r, c)]))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<T: Scalar> $trait<&CMatrix<T>> for &CMatrix<T> {
            type Output = CMatrix<T>;

            /// Panics on a size mismatch.
            fn $method(self, rhs: &CMatrix<T>) -> CMatrix<T> {
                assert_eq!(self.n, rhs.n, "matrix size mismatch");
                CMatrix {
                    n: self.n,
                    data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a $op b).collect(),
                }
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);

impl<T: Scalar> Mul<&CMatrix<T>> for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        self.matmul(rhs).expect("matrix size mismatch")
    }
}

impl<T: Scalar> Neg for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn neg(self) -> CMatrix<T> {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|&z| -z).collect(),
        }
    }
}

impl<T: Scalar> fmt::Display for CMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|z| format!("{z}")).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}
