//! Quasi-static Rayleigh flat-fading Monte Carlo with ML decoding.
//!
//! Channel model `Y = g·S·H + N` with `H` an n×m matrix of i.i.d. CN(0,1)
//! entries held constant over the codeword and `N` i.i.d. CN(0,N₀).
//!
//! SNR convention: `g` scales the code so the average transmitted energy per
//! channel use is 1 for the chosen constellation, hence the average received
//! energy per receive antenna per channel use is 1 and `SNR = 1/N₀`.
//!
//! Every trial draws its symbols, channel and unit-variance noise from its
//! own ChaCha stream (`seed`, stream = trial index); the same draws are reused
//! at every SNR point with the noise scaled by `√N₀`. Error counts are summed,
//! so results do not depend on how trials are spread over threads.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codinggain::Constellation;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stbc::{weighted_pair, LinearDispersionCode};
use crate::verifier::check_ssd;
use crate::FloatMatrix;

/// Codeword budget for exhaustive ML decoding.
pub const ML_BUDGET: u64 = 1_000_000;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

pub const SNR_DEFINITION: &str = "code scaled to unit average transmit energy per channel use; \
     H ~ CN(0,1) i.i.d.; SNR = 1/N0 per receive antenna";

/// Row-major n×m complex block (channel, noise, received signal).
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Block {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Block {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Block { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// `s · self` for a square `s` with matching size.
    pub fn left_mul(&self, s: &FloatMatrix) -> Block {
        assert_eq!(s.n(), self.rows, "size mismatch");
        Block::from_fn(self.rows, self.cols, |r, c| {
            (0..self.rows).map(|k| s.get(r, k) * self.get(k, c)).sum()
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `Re⟨self, other⟩ = Re tr(selfᴴ·other)`.
    pub fn re_inner(&self, other: &Block) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    pub fn axpy(&mut self, alpha: f64, x: &Block) {
        for (y, x) in self.data.iter_mut().zip(&x.data) {
            *y += x * alpha;
        }
    }
}

fn complex_normal<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// n×m channel with i.i.d. CN(0,1) entries.
pub fn channel_sample<R: Rng>(n: usize, m: usize, rng: &mut R) -> Block {
    Block::from_fn(n, m, |_, _| complex_normal(rng))
}

/// n×m noise with i.i.d. CN(0, n0) entries.
pub fn noise_sample<R: Rng>(n: usize, m: usize, n0: f64, rng: &mut R) -> Block {
    let s = n0.sqrt();
    Block::from_fn(n, m, |_, _| complex_normal(rng) * s)
}

/// `N₀` for an SNR in dB under the unit-energy convention.
pub fn noise_variance(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// `‖Y − S·H‖²`.
pub fn ml_metric(s: &FloatMatrix, h: &Block, y: &Block) -> f64 {
    let sh = h.left_mul(s);
    y.data.iter().zip(&sh.data).map(|(a, b)| (a - b).norm_sqr()).sum()
}

/// `E‖S‖²` for i.i.d. uniform symbols from `constellation`.
pub fn mean_codeword_energy<T: Scalar>(code: &LinearDispersionCode<T>, constellation: &Constellation) -> f64 {
    let pts = constellation.points();
    let mu = constellation.mean();
    let mut total = 0.0;
    let means: Vec<FloatMatrix> = code
        .weights()
        .iter()
        .map(|(a, b)| weighted_pair(a, b, mu.re, mu.im))
        .collect();
    for (a, b) in code.weights() {
        total += pts
            .iter()
            .map(|x| weighted_pair(a, b, x.re, x.im).frob_norm_sq())
            .sum::<f64>()
            / pts.len() as f64;
    }
    for (i, mi) in means.iter().enumerate() {
        for (j, mj) in means.iter().enumerate() {
            if i != j {
                total += (&mi.herm() * mj).trace().re;
            }
        }
    }
    total
}

/// Factor `g` giving unit average transmit energy per channel use.
pub fn unit_energy_scale<T: Scalar>(code: &LinearDispersionCode<T>, constellation: &Constellation) -> f64 {
    let e = mean_codeword_energy(code, constellation);
    (code.n() as f64 / e).sqrt()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    /// Constellation index per symbol.
    pub indices: Vec<usize>,
    pub metric_evaluations: u64,
}

/// Per-symbol contributions `(x_I·A_i + x_Q·B_i)·H` for every point.
fn slot_images(parts: &[Vec<FloatMatrix>], h: &Block) -> Vec<Vec<Block>> {
    parts
        .iter()
        .map(|slot| slot.iter().map(|p| h.left_mul(p)).collect())
        .collect()
}

fn slot_parts<T: Scalar>(code: &LinearDispersionCode<T>, constellation: &Constellation) -> Vec<Vec<FloatMatrix>> {
    code.weights()
        .iter()
        .map(|(a, b)| {
            constellation
                .points()
                .iter()
                .map(|x| weighted_pair(a, b, x.re, x.im))
                .collect()
        })
        .collect()
}

fn check_shapes(n: usize, y: &Block, h: &Block) -> Result<()> {
    if h.rows != n || y.rows != n || y.cols != h.cols {
        return Err(Error::Malformed(format!(
            "Y is {}x{}, H is {}x{}, code needs {n} rows",
            y.rows, y.cols, h.rows, h.cols
        )));
    }
    Ok(())
}

/// Per-symbol ML decoder for single-symbol decodable codes.
#[derive(Clone, Debug)]
pub struct SsdDecoder {
    n: usize,
    parts: Vec<Vec<FloatMatrix>>,
}

impl SsdDecoder {
    pub fn new<T: Scalar>(code: &LinearDispersionCode<T>, constellation: &Constellation) -> Result<Self> {
        let ssd = check_ssd(code);
        if !ssd.passed() {
            let first = ssd.failures.first().map(|f| f.to_string()).unwrap_or_default();
            return Err(Error::NotSsd(format!("per-symbol decoding would not be ML: {first}")));
        }
        Ok(SsdDecoder {
            n: code.n(),
            parts: slot_parts(code, constellation),
        })
    }

    /// Minimizes `‖P_i(x)‖² − 2·Re⟨Y, P_i(x)⟩` independently per symbol,
    /// with `P_i(x) = (x_I·A_iI + x_Q·A_iQ)·H`. Ties go to the lowest index.
    pub fn decode(&self, y: &Block, h: &Block) -> Result<Decoded> {
        check_shapes(self.n, y, h)?;
        let images = slot_images(&self.parts, h);
        let mut evals = 0;
        let indices = images
            .iter()
            .map(|slot| {
                let mut best = (f64::INFINITY, 0);
                for (idx, p) in slot.iter().enumerate() {
                    evals += 1;
                    let g = p.norm_sqr() - 2.0 * y.re_inner(p);
                    if g < best.0 {
                        best = (g, idx);
                    }
                }
                best.1
            })
            .collect();
        Ok(Decoded {
            indices,
            metric_evaluations: evals,
        })
    }
}

pub fn ssd_decode<T: Scalar>(
    code: &LinearDispersionCode<T>,
    y: &Block,
    h: &Block,
    constellation: &Constellation,
) -> Result<Decoded> {
    SsdDecoder::new(code, constellation)?.decode(y, h)
}

/// Exhaustive ML over all `|A|^k` codewords.
#[derive(Clone, Debug)]
pub struct MlDecoder {
    n: usize,
    parts: Vec<Vec<FloatMatrix>>,
}

impl MlDecoder {
    pub fn new<T: Scalar>(code: &LinearDispersionCode<T>, constellation: &Constellation) -> Result<Self> {
        let needed = (constellation.len() as f64).powi(code.k() as i32);
        if needed > ML_BUDGET as f64 {
            return Err(Error::BudgetExceeded {
                needed,
                budget: ML_BUDGET,
            });
        }
        Ok(MlDecoder {
            n: code.n(),
            parts: slot_parts(code, constellation),
        })
    }

    /// Lexicographic enumeration (first symbol most significant); the first
    /// minimizer wins, matching the per-symbol tie-break.
    pub fn decode(&self, y: &Block, h: &Block) -> Result<Decoded> {
        check_shapes(self.n, y, h)?;
        let images = slot_images(&self.parts, h);
        let k = images.len();
        if k == 0 {
            return Ok(Decoded {
                indices: vec![],
                metric_evaluations: 0,
            });
        }
        let q = images[0].len();
        let mut idx = vec![0usize; k];
        let mut best = (f64::INFINITY, idx.clone());
        let mut evals = 0;
        loop {
            let mut sh = Block::zeros(y.rows, y.cols);
            for (slot, &i) in images.iter().zip(&idx) {
                sh.axpy(1.0, &slot[i]);
            }
            let mut diff = y.clone();
            diff.axpy(-1.0, &sh);
            let metric = diff.norm_sqr();
            evals += 1;
            if metric < best.0 {
                best = (metric, idx.clone());
            }
            // odometer, last symbol fastest
            let mut pos = k;
            loop {
                if pos == 0 {
                    return Ok(Decoded {
                        indices: best.1,
                        metric_evaluations: evals,
                    });
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < q {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
}

pub fn ml_decode_bruteforce<T: Scalar>(
    code: &LinearDispersionCode<T>,
    y: &Block,
    h: &Block,
    constellation: &Constellation,
) -> Result<Decoded> {
    MlDecoder::new(code, constellation)?.decode(y, h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    Ssd,
    BruteMl,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub snr_db: Vec<f64>,
    pub rx_antennas: usize,
    pub trials: u64,
    pub seed: u64,
    pub decoder: DecoderKind,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.snr_db.is_empty() {
            return Err(Error::InvalidParameter("SNR list is empty".into()));
        }
        if self.rx_antennas < 1 {
            return Err(Error::InvalidParameter("need at least one receive antenna".into()));
        }
        if self.snr_db.iter().any(|s| s.is_nan()) {
            return Err(Error::InvalidParameter("SNR values must be numbers".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CerRecord {
    pub snr_db: f64,
    pub trials: u64,
    pub errors: u64,
    pub cer: f64,
    pub ci95: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CerReport {
    pub code: String,
    pub constellation: String,
    pub energy_scale: f64,
    pub snr_definition: String,
    pub records: Vec<CerRecord>,
}

/// Half-width of the Wilson score interval at 95% confidence.
pub fn wilson_half_width(errors: u64, trials: u64) -> f64 {
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()
}

enum AnyDecoder {
    Ssd(SsdDecoder),
    Ml(MlDecoder),
}

impl AnyDecoder {
    fn decode(&self, y: &Block, h: &Block) -> Result<Decoded> {
        match self {
            AnyDecoder::Ssd(d) => d.decode(y, h),
            AnyDecoder::Ml(d) => d.decode(y, h),
        }
    }
}

/// Error counts for one trial at every SNR point.
fn run_trial(
    trial: u64,
    config: &SimConfig,
    code: &LinearDispersionCode<f64>,
    constellation: &Constellation,
    decoder: &AnyDecoder,
    noise_scales: &[f64],
) -> Result<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(trial);
    let (n, m) = (code.n(), config.rx_antennas);
    let q = constellation.len();
    let sent: Vec<usize> = (0..code.k()).map(|_| rng.random_range(0..q)).collect();
    let symbols: Vec<Complex64> = sent.iter().map(|&i| constellation.points()[i]).collect();
    let h = channel_sample(n, m, &mut rng);
    let w = noise_sample(n, m, 1.0, &mut rng);
    let sh = h.left_mul(&code.codeword(&symbols)?);
    noise_scales
        .iter()
        .map(|&s| {
            let mut y = sh.clone();
            y.axpy(s, &w);
            let d = decoder.decode(&y, &h)?;
            Ok(u64::from(d.indices != sent))
        })
        .collect()
}

/// Codeword error rate at each SNR point of `config`.
pub fn simulate_cer<T: Scalar>(
    code: &LinearDispersionCode<T>,
    constellation: &Constellation,
    config: &SimConfig,
) -> Result<CerReport> {
    config.validate()?;
    let g = unit_energy_scale(code, constellation);
    let scaled = code.scaled(g);
    let decoder = match config.decoder {
        DecoderKind::Ssd => AnyDecoder::Ssd(SsdDecoder::new(&scaled, constellation)?),
        DecoderKind::BruteMl => AnyDecoder::Ml(MlDecoder::new(&scaled, constellation)?),
    };
    let noise_scales: Vec<f64> = config.snr_db.iter().map(|&s| noise_variance(s).sqrt()).collect();
    let points = noise_scales.len();
    let errors = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(t, config, &scaled, constellation, &decoder, &noise_scales))
        .try_reduce(
            || vec![0u64; points],
            |mut acc, e| {
                acc.iter_mut().zip(e).for_each(|(a, b)| *a += b);
                Ok(acc)
            },
        )?;
    let records = config
        .snr_db
        .iter()
        .zip(errors)
        .map(|(&snr_db, errors)| CerRecord {
            snr_db,
            trials: config.trials,
            errors,
            cer: errors as f64 / config.trials as f64,
            ci95: wilson_half_width(errors, config.trials),
        })
        .collect();
    Ok(CerReport {
        code: code.label().to_string(),
        constellation: constellation.name().to_string(),
        energy_scale: g,
        snr_definition: SNR_DEFINITION.to_string(),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::generate_family;
    use crate::codinggain::{optimal_angle, rotated_qam, EnergyMode};
    use crate::stbc::{build_ciod4, build_max_rate_ussd};

    #[test]
    fn wilson_reference_values() {
        // p = 0.5, n = 100, evaluated independently: 0.0961684696...
        let hw = wilson_half_width(50, 100);
        assert!((hw - 0.096_168_469_634).abs() < 1e-10, "{hw}");
        assert!(wilson_half_width(0, 1000) > 0.0);
    }

    #[test]
    fn fixed_seed_same_channel() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(channel_sample(4, 2, &mut a), channel_sample(4, 2, &mut b));
        let col = channel_sample(4, 1, &mut a);
        assert_eq!((col.rows(), col.cols()), (4, 1));
    }

    #[test]
    fn unit_energy_scale_values() {
        let q = rotated_qam(4, optimal_angle(), EnergyMode::UnitAverage).unwrap();
        let ussd = build_max_rate_ussd(2, &generate_family(2).unwrap()).unwrap();
        let ciod = build_ciod4();
        // E‖S‖² = k·n for unitary weights, k·n/2 for the CIOD
        assert!((mean_codeword_energy(&ussd, &q) - 16.0).abs() < 1e-12);
        assert!((mean_codeword_energy(&ciod, &q) - 8.0).abs() < 1e-12);
        assert!((unit_energy_scale(&ussd, &q) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ml_decoder_budget() {
        let q = rotated_qam(64, 0.0, EnergyMode::Raw).unwrap();
        let ussd = build_max_rate_ussd(2, &generate_family(2).unwrap()).unwrap();
        assert!(matches!(MlDecoder::new(&ussd, &q), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn config_validation() {
        let base = SimConfig {
            snr_db: vec![0.0],
            rx_antennas: 1,
            trials: 1,
            seed: 0,
            decoder: DecoderKind::Ssd,
        };
        assert!(base.validate().is_ok());
        assert!(SimConfig { trials: 0, ..base.clone() }.validate().is_err());
        assert!(SimConfig { snr_db: vec![], ..base.clone() }.validate().is_err());
        assert!(SimConfig { rx_antennas: 0, ..base }.validate().is_err());
    }
}
