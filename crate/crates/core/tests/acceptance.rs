//! End-to-end acceptance checks, one verdict line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use stbc_forge::clifford::{
    commute_predicate, generate_family, mask_to_indices, product_subset, square_sign, Commutation,
};
use stbc_forge::codinggain::{
    ciod_angle, equal_energy_scale, min_det_bruteforce, min_det_closed_form, optimal_angle, rotated_qam,
    EnergyMode, SearchMode,
};
use stbc_forge::simulator::{
    channel_sample, noise_sample, noise_variance, simulate_cer, unit_energy_scale, DecoderKind, MlDecoder,
    SimConfig, SsdDecoder,
};
use stbc_forge::stbc::{build_ciod4, build_max_rate_ussd, ExactCode};
use stbc_forge::verifier::{check_ssd, check_unitary_weight, classify};
use stbc_forge::ExactMatrix;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ussd(a: u32) -> ExactCode {
    build_max_rate_ussd(a, &generate_family(a).unwrap()).unwrap()
}

fn within(elapsed: Duration, limit: Duration) -> Outcome {
    if elapsed < limit {
        Ok(format!("{:.2?}", elapsed))
    } else {
        Err(format!("took {elapsed:.2?}, limit {limit:?}"))
    }
}

fn construction_rate() -> Outcome {
    let start = Instant::now();
    for a in 1..=3u32 {
        let code = ussd(a);
        let n = 1usize << a;
        ensure!(code.n() == n && code.k() == 2 * a as usize, "a={a}: n={} k={}", code.n(), code.k());
        ensure!(code.rate() == a as f64 / (1u32 << (a - 1)) as f64, "a={a}: rate {}", code.rate());
        let ssd = check_ssd(&code);
        ensure!(ssd.passed(), "a={a}: {:?}", ssd.failures);
        let uw = check_unitary_weight(&code);
        ensure!(uw.passed(), "a={a}: {:?}", uw.failures);
    }
    within(start.elapsed(), Duration::from_secs(1)).map(|t| format!("a = 1, 2, 3 in {t}"))
}

fn golden_matrix() -> Outcome {
    let code = build_max_rate_ussd(2, &common::printed_family()).unwrap();
    let mut rng = common::rng(2024);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x = common::random_symbols(4, &mut rng);
        let d = (&code.codeword(&x).unwrap() - &common::golden_codeword(&x))
            .entries()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        worst = worst.max(d);
    }
    ensure!(worst <= 1e-12, "max entry error {worst:e}");
    Ok(format!("20 vectors, max entry error {worst:e}"))
}

fn table_one() -> Outcome {
    let start = Instant::now();
    let u = ussd(2);
    let u = u.scaled(equal_energy_scale(&u));
    let c = build_ciod4();
    let c = c.scaled(equal_energy_scale(&c));
    let mut cells = Vec::new();
    for m in [4, 16, 64] {
        for (name, code, angle) in [("ussd4", &u, optimal_angle()), ("ciod4", &c, ciod_angle())] {
            let q = rotated_qam(m, angle, EnergyMode::Raw).unwrap();
            let d = min_det_bruteforce(code, &q, SearchMode::Auto).map_err(|e| e.to_string())?;
            ensure!((d.value - 10.24).abs() <= 1e-6, "{name} qam{m}: {}", d.value);
            cells.push(format!("{name}/qam{m}={:.6}", d.value));
        }
    }
    within(start.elapsed(), Duration::from_secs(60)).map(|t| format!("{} in {t}", cells.join(" ")))
}

fn closed_form_vs_oracle() -> Outcome {
    let code = ussd(1);
    let mut rng = common::rng(77);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let q = rotated_qam(4, rng.random_range(0.0..std::f64::consts::PI), EnergyMode::Raw).unwrap();
        let full = min_det_bruteforce(&code, &q, SearchMode::Full).map_err(|e| e.to_string())?;
        ensure!(full.mode == SearchMode::Full, "search was reduced");
        let closed = min_det_closed_form(&q, 2);
        worst = worst.max((full.value - closed.value).abs());
    }
    ensure!(worst <= 1e-9, "max deviation {worst:e}");
    Ok(format!("10 angles, max deviation {worst:e}"))
}

fn clifford_properties() -> Outcome {
    let mut subsets = 0;
    for a in 1..=3u32 {
        let fam = generate_family(a).unwrap();
        let upper = 2 * a as usize;
        let id = ExactMatrix::identity(fam.n());
        for mask in 1u64..(1 << upper) {
            let idx = mask_to_indices(mask, upper);
            let p = product_subset(&fam, &idx).unwrap();
            let want = if square_sign(idx.len() as u32).unwrap() == 1 { id.clone() } else { -&id };
            ensure!(&p * &p == want, "a={a} {idx:?}: wrong square");
            ensure!(p.trace() == num_complex::Complex::new(0, 0), "a={a} {idx:?}: trace {}", p.trace());
            subsets += 1;
        }
    }
    let mut rng = common::rng(5);
    for _ in 0..200 {
        let a = rng.random_range(1..=3u32);
        let fam = generate_family(a).unwrap();
        let upper = 2 * a as usize;
        let full = (1u64 << upper) - 1;
        let (m1, m2) = (rng.random_range(1..=full), rng.random_range(1..=full));
        let (s1, s2) = (mask_to_indices(m1, upper), mask_to_indices(m2, upper));
        let x = product_subset(&fam, &s1).unwrap();
        let y = product_subset(&fam, &s2).unwrap();
        let predicted = commute_predicate(s1.len() as u32, s2.len() as u32, (m1 & m2).count_ones()).unwrap();
        let holds = match predicted {
            Commutation::Commute => x.commutes_with(&y, 0.0),
            Commutation::Anticommute => x.anticommutes_with(&y, 0.0),
        };
        ensure!(holds, "a={a} {s1:?} {s2:?}: predicted {predicted:?}");
    }
    Ok(format!("{subsets} subsets, 200 random pairs"))
}

fn decoder_equivalence() -> Outcome {
    let q = rotated_qam(4, optimal_angle(), EnergyMode::UnitAverage).unwrap();
    let code = ussd(2);
    let code = code.scaled(unit_energy_scale(&code, &q));
    let ssd = SsdDecoder::new(&code, &q).map_err(|e| e.to_string())?;
    let ml = MlDecoder::new(&code, &q).map_err(|e| e.to_string())?;
    let mut rng = common::rng(606);
    let mut agree = 0;
    for _ in 0..1000 {
        let x: Vec<_> = (0..4).map(|_| q.points()[rng.random_range(0..4)]).collect();
        let h = channel_sample(4, 1, &mut rng);
        let mut y = h.left_mul(&code.codeword(&x).unwrap());
        y.axpy(1.0, &noise_sample(4, 1, noise_variance(10.0), &mut rng));
        if ssd.decode(&y, &h).unwrap().indices == ml.decode(&y, &h).unwrap().indices {
            agree += 1;
        }
    }
    ensure!(agree == 1000, "{agree}/1000 agree");
    Ok("1000/1000 instances agree".into())
}

fn cer_behaviour() -> Outcome {
    let start = Instant::now();
    let snrs = vec![4.0, 8.0, 12.0, 16.0, 20.0];
    let cfg = |seed| SimConfig {
        snr_db: snrs.clone(),
        rx_antennas: 1,
        trials: 100_000,
        seed,
        decoder: DecoderKind::Ssd,
    };
    let run = |code: &ExactCode, angle: f64, seed: u64| {
        let q = rotated_qam(4, angle, EnergyMode::UnitAverage).unwrap();
        simulate_cer(code, &q, &cfg(seed)).map_err(|e| e.to_string())
    };
    let u = run(&ussd(2), optimal_angle(), 1001)?;
    let c = run(&build_ciod4(), ciod_angle(), 1002)?;
    let plain = run(&ussd(2), 0.0, 1003)?;
    let mut line = Vec::new();
    for ((ru, rc), rp) in u.records.iter().zip(&c.records).zip(&plain.records) {
        let gap = (ru.cer - rc.cer).abs();
        let tol = 3.0 * ru.ci95.max(rc.ci95);
        ensure!(gap <= tol, "{} dB: ussd4 {} vs ciod4 {} (gap {gap:e} > {tol:e})", ru.snr_db, ru.cer, rc.cer);
        if ru.snr_db >= 12.0 {
            ensure!(
                rp.cer > ru.cer && rp.cer > rc.cer,
                "{} dB: unrotated {} does not exceed ussd4 {} / ciod4 {}",
                ru.snr_db,
                rp.cer,
                ru.cer,
                rc.cer
            );
        }
        line.push(format!("{}dB {:.2e}/{:.2e}/{:.2e}", ru.snr_db, ru.cer, rc.cer, rp.cer));
    }
    within(start.elapsed(), Duration::from_secs(600)).map(|t| format!("ussd4/ciod4/unrotated: {} in {t}", line.join(", ")))
}

fn unitary_invariance() -> Outcome {
    let q = rotated_qam(4, optimal_angle(), EnergyMode::Raw).unwrap();
    let mut rng = common::rng(88);
    let mut worst = 0.0f64;
    for code in [ussd(2).to_float(), build_ciod4().to_float()] {
        let class = classify(&code).class;
        let base = min_det_bruteforce(&code, &q, SearchMode::Auto).map_err(|e| e.to_string())?.value;
        for _ in 0..10 {
            let u = common::random_unitary(4, &mut rng);
            let moved = code.left_multiply(&u).map_err(|e| e.to_string())?;
            let got = classify(&moved).class;
            ensure!(got == class, "{}: class {class} became {got}", code.label());
            let v = min_det_bruteforce(&moved, &q, SearchMode::Auto).map_err(|e| e.to_string())?.value;
            worst = worst.max((v - base).abs());
        }
    }
    ensure!(worst <= 1e-9, "min det moved by {worst:e}");
    Ok(format!("10 unitaries per code, max min-det change {worst:e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("construction rate", construction_rate),
        ("golden matrix", golden_matrix),
        ("minimum determinant table", table_one),
        ("closed form vs oracle", closed_form_vs_oracle),
        ("anticommuting family properties", clifford_properties),
        ("decoder equivalence", decoder_equivalence),
        ("CER behaviour", cer_behaviour),
        ("unitary invariance", unitary_invariance),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({why})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
