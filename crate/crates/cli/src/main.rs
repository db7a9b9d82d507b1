mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use stbc_forge::clifford::generate_family;
use stbc_forge::codinggain::{
    ciod_angle, diversity_check, equal_energy_scale, min_det_bruteforce, optimal_angle, rotated_qam, special_8qam,
    Constellation, EnergyMode, Qam8Kind, SearchMode,
};
use stbc_forge::simulator::{simulate_cer, CerReport, DecoderKind, SimConfig};
use stbc_forge::stbc::{build_ciod4, build_max_rate_ussd, build_square_cod, AnyCode, FloatCode};
use stbc_forge::verifier::{classify, ClassificationReport, CodeClass};

/// Build, check and evaluate single-symbol decodable space-time block codes.
#[derive(Parser)]
#[command(name = "stbc-forge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the 2a+1 pairwise anticommuting matrices of size 2^a.
    Family {
        /// Family parameter a (matrices are 2^a × 2^a), 1..=6.
        #[arg(long)]
        a: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a code and write its weight matrices as JSON.
    Construct {
        /// Number of transmit antennas, a power of two (ciod4 needs 4).
        #[arg(long)]
        antennas: usize,
        #[arg(long, value_enum)]
        family: Builder,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify a code; exits 1 if it does not match its declared class
    /// (or, without one, is not single-symbol decodable).
    Verify {
        code: PathBuf,
        /// Also write the full classification report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Minimum determinant of a code over a rotated constellation.
    CodingGain {
        #[command(flatten)]
        signal: SignalArgs,
        /// Constellation energy convention.
        #[arg(long, value_enum, default_value = "raw")]
        energy: Energy,
        /// Code scaling before the search: `equal-energy` rescales to mean
        /// weight energy n/2 so different codes compare at equal transmit
        /// energy; `none` uses the weights as stored.
        #[arg(long, value_enum, default_value = "equal-energy")]
        code_scaling: CodeScaling,
        /// Enumerate every difference pattern instead of using the
        /// single-symbol reduction.
        #[arg(long, conflicts_with = "single_symbol")]
        brute_force: bool,
        /// Force the single-symbol search (fails for codes that are not SSD).
        #[arg(long)]
        single_symbol: bool,
    },
    /// Monte Carlo codeword error rate over quasi-static Rayleigh fading.
    Simulate {
        #[command(flatten)]
        signal: SignalArgs,
        /// SNR points in dB: `start:step:stop` (inclusive) or a comma list.
        #[arg(long, default_value = "0:2:24")]
        snr: String,
        /// Receive antennas.
        #[arg(long, default_value_t = 1)]
        rx: usize,
        /// Trials per SNR point.
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value = "ssd")]
        decoder: Decoder,
        /// CSV output; the run configuration goes to the same path with a
        /// `.json` extension.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SignalArgs {
    /// Code JSON as written by `construct`.
    #[arg(long)]
    code: PathBuf,
    #[arg(long, value_enum)]
    constellation: ConstellationName,
    /// Rotation in radians, or `auto` for the recommended angle of the code.
    #[arg(long, default_value = "auto", value_parser = parse_angle)]
    angle: Angle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Builder {
    Ussd,
    Cod,
    Ciod4,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstellationName {
    Qam4,
    Qam16,
    Qam64,
    #[value(name = "8qam-rect")]
    Qam8Rect,
    #[value(name = "8qam-sq")]
    Qam8Sq,
}

#[derive(Clone, Copy, ValueEnum)]
enum Energy {
    Raw,
    Unit,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum CodeScaling {
    EqualEnergy,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum Decoder {
    Ssd,
    BruteMl,
}

#[derive(Clone, Copy)]
enum Angle {
    Auto,
    Radians(f64),
}

fn parse_angle(s: &str) -> Result<Angle, String> {
    if s == "auto" {
        return Ok(Angle::Auto);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Angle::Radians(v)),
        _ => Err(format!("expected `auto` or a number of radians, got `{s}`")),
    }
}

/// Failures that map to a specific exit status.
#[derive(Debug)]
enum Exit {
    Verification(String),
}

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exit::Verification(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for Exit {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let Some(Exit::Verification(m)) = e.downcast_ref::<Exit>() {
                println!("{m}");
                return ExitCode::from(1);
            }
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<String> {
    match command {
        Command::Family { a, out } => {
            let fam = generate_family(a)?;
            output::write_atomic(&out, (fam.to_json() + "\n").as_bytes())?;
            Ok(format!("wrote {} matrices of size {} to {}", fam.len(), fam.n(), out.display()))
        }
        Command::Construct { antennas, family, out } => {
            let code: AnyCode = build(antennas, family)?.into();
            output::write_atomic(&out, (code.to_json() + "\n").as_bytes())?;
            Ok(format!(
                "wrote {} (n = {}, k = {}) to {}",
                code.label(),
                code.n(),
                code.k(),
                out.display()
            ))
        }
        Command::Verify { code, report } => verify(&code, report.as_deref()),
        Command::CodingGain {
            signal,
            energy,
            code_scaling,
            brute_force,
            single_symbol,
        } => {
            let code = load(&signal.code)?.to_float();
            let energy = match energy {
                Energy::Raw => EnergyMode::Raw,
                Energy::Unit => EnergyMode::UnitAverage,
            };
            let (q, angle) = constellation(&signal, &code, energy)?;
            let code = match code_scaling {
                CodeScaling::EqualEnergy => code.scaled(equal_energy_scale(&code)),
                CodeScaling::None => code,
            };
            let mode = if brute_force {
                SearchMode::Full
            } else if single_symbol {
                SearchMode::SingleSymbol
            } else {
                SearchMode::Auto
            };
            let d = min_det_bruteforce(&code, &q, mode)?;
            let diff: Vec<String> = d.difference.iter().map(|z| format!("{:.6}{:+.6}j", z.re, z.im)).collect();
            let mut line = format!(
                "min_det {:.6}  difference [{}]  angle {angle:.10}  search {} ({} patterns)",
                d.value,
                diff.join(", "),
                d.mode,
                d.patterns
            );
            if !diversity_check(&q).passed {
                line.push_str("  (constellation is not full diversity)");
            }
            Ok(line)
        }
        Command::Simulate {
            signal,
            snr,
            rx,
            trials,
            seed,
            decoder,
            out,
        } => {
            let code = load(&signal.code)?.to_float();
            let (q, angle) = constellation(&signal, &code, EnergyMode::UnitAverage)?;
            let config = SimConfig {
                snr_db: parse_snr(&snr)?,
                rx_antennas: rx,
                trials,
                seed,
                decoder: match decoder {
                    Decoder::Ssd => DecoderKind::Ssd,
                    Decoder::BruteMl => DecoderKind::BruteMl,
                },
            };
            let report = simulate_cer(&code, &q, &config)?;
            write_cer(&out, &report)?;
            let sidecar = out.with_extension("json");
            output::write_json(
                &sidecar,
                &Sidecar {
                    code_file: &signal.code,
                    angle,
                    config: &config,
                    report: &report,
                },
            )?;
            Ok(format!(
                "wrote {} SNR points to {} (config in {})",
                report.records.len(),
                out.display(),
                sidecar.display()
            ))
        }
    }
}

fn build(antennas: usize, family: Builder) -> Result<stbc_forge::stbc::ExactCode> {
    if let Builder::Ciod4 = family {
        if antennas != 4 {
            bail!("ciod4 is defined for 4 antennas only, got {antennas}");
        }
        return Ok(build_ciod4());
    }
    if antennas < 2 || !antennas.is_power_of_two() {
        bail!("--antennas must be a power of two >= 2, got {antennas}");
    }
    let a = antennas.trailing_zeros();
    let fam = generate_family(a)?;
    Ok(match family {
        Builder::Ussd => build_max_rate_ussd(a, &fam)?,
        Builder::Cod => build_square_cod(a, &fam)?,
        Builder::Ciod4 => unreachable!(),
    })
}

fn load(path: &Path) -> Result<AnyCode> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    AnyCode::from_json(&text).with_context(|| format!("{} is not a valid code file", path.display()))
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    label: &'a str,
    declared: Option<CodeClass>,
    #[serde(flatten)]
    report: &'a ClassificationReport,
    ok: bool,
}

fn verify(path: &Path, report_path: Option<&Path>) -> Result<String> {
    let code = load(path)?;
    let report = match &code {
        AnyCode::Exact(c) => classify(c),
        AnyCode::Float(c) => classify(c),
    };
    let declared = code.declared_class();
    let ok = match declared {
        Some(d) => d == report.class,
        None => report.class.is_ssd(),
    };
    if let Some(p) = report_path {
        output::write_json(
            p,
            &VerifyReport {
                label: code.label(),
                declared,
                report: &report,
                ok,
            },
        )?;
    }
    let mut line = format!("{}: {}", code.label(), report.class);
    if let Some(d) = declared {
        line.push_str(&format!(" (declared {d})"));
    }
    if !ok && !report.failed_conditions.is_empty() {
        let shown: Vec<String> = report.failed_conditions.iter().take(6).map(|f| f.to_string()).collect();
        let more = report.failed_conditions.len().saturating_sub(shown.len());
        line.push_str(&format!("; failed: {}", shown.join(", ")));
        if more > 0 {
            line.push_str(&format!(" and {more} more"));
        }
    }
    if ok {
        Ok(line)
    } else {
        Err(Exit::Verification(format!("FAIL {line}")).into())
    }
}

/// Resolves the constellation and rotation for `code`.
fn constellation(args: &SignalArgs, code: &FloatCode, energy: EnergyMode) -> Result<(Constellation, f64)> {
    let angle = match args.angle {
        Angle::Radians(r) => r,
        // unitary-weight codes want π/4 + ½·atan 2; the CIOD wants ½·atan 2
        Angle::Auto => match classify(code).class {
            CodeClass::NonUnitaryWeightSsd => ciod_angle(),
            _ => optimal_angle(),
        },
    };
    let q = match args.constellation {
        ConstellationName::Qam4 => rotated_qam(4, angle, energy)?,
        ConstellationName::Qam16 => rotated_qam(16, angle, energy)?,
        ConstellationName::Qam64 => rotated_qam(64, angle, energy)?,
        ConstellationName::Qam8Rect => special_8qam(Qam8Kind::Rect, angle, energy)?,
        ConstellationName::Qam8Sq => special_8qam(Qam8Kind::SquareDerived, angle, energy)?,
    };
    Ok((q, angle))
}

fn parse_snr(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .with_context(|| format!("bad SNR value `{t}`"))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if step <= 0.0 || stop < start {
                bail!("SNR range needs step > 0 and stop >= start");
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| start + i as f64 * step).collect())
        }
        [_] => s.split(',').map(num).collect(),
        _ => bail!("SNR must be `start:step:stop` or a comma list"),
    }
}

fn write_cer(path: &Path, report: &CerReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &report.records {
        w.serialize(r)?;
    }
    output::write_atomic(path, &w.into_inner()?)
}

#[derive(Serialize)]
struct Sidecar<'a> {
    code_file: &'a Path,
    angle: f64,
    #[serde(flatten)]
    config: &'a SimConfig,
    #[serde(flatten)]
    report: &'a CerReport,
}
