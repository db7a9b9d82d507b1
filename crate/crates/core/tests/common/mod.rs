#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use stbc_forge::clifford::AnticommutingFamily;
use stbc_forge::{ExactMatrix, FloatMatrix, Unit};

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_symbols(k: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    (0..k).map(|_| gaussian(rng)).collect()
}

/// Haar-ish unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> FloatMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    FloatMatrix::from_nalgebra(&g.qr().q()).unwrap()
}

fn m4(rows: [[(i64, i64); 4]; 4]) -> ExactMatrix {
    let r: Vec<&[(i64, i64)]> = rows.iter().map(|r| &r[..]).collect();
    ExactMatrix::from_pairs(&r).unwrap()
}

const O: (i64, i64) = (0, 0);
const P: (i64, i64) = (1, 0);
const N: (i64, i64) = (-1, 0);
const J: (i64, i64) = (0, 1);
const NJ: (i64, i64) = (0, -1);

/// The hand-written 4×4 generators F1..F4 and their closing product.
pub fn printed_family() -> AnticommutingFamily {
    let f1 = m4([[J, O, O, O], [O, NJ, O, O], [O, O, NJ, O], [O, O, O, J]]);
    let f2 = m4([[O, P, O, O], [N, O, O, O], [O, O, O, P], [O, O, N, O]]);
    let f3 = m4([[O, O, P, O], [O, O, O, N], [N, O, O, O], [O, P, O, O]]);
    let f4 = m4([[O, J, O, O], [J, O, O, O], [O, O, O, J], [O, O, J, O]]);
    let f5 = (&(&(&f1 * &f2) * &f3) * &f4).mul_unit(Unit::J);
    AnticommutingFamily::from_parts(2, vec![f1, f2, f3, f4, f5], Unit::J)
}

/// Entry-by-entry evaluation of the 4-antenna maximal-rate codeword.
pub fn golden_codeword(x: &[Complex64]) -> FloatMatrix {
    let c = Complex64::new;
    let (x1i, x1q) = (x[0].re, x[0].im);
    let (x2i, x2q) = (x[1].re, x[1].im);
    let (x3i, x3q) = (x[2].re, x[2].im);
    let (x4i, x4q) = (x[3].re, x[3].im);
    let rows = vec![
        vec![c(x1i, x2i), c(x3i, -x4q), c(x4i, x3q), c(x2q, -x1q)],
        vec![c(-x3i, -x4q), c(x1i, -x2i), c(x2q, x1q), c(-x4i, x3q)],
        vec![c(-x4i, x3q), c(-x2q, -x1q), c(x1i, -x2i), c(x3i, x4q)],
        vec![c(-x2q, x1q), c(x4i, x3q), c(-x3i, x4q), c(x1i, x2i)],
    ];
    FloatMatrix::from_rows(rows).unwrap()
}
