//! Command-line frontend for the unlinkable fuzzy vault pipeline.
//!
//! Exit codes: 0 success/match, 1 internal error, 2 usage or input error,
//! 3 verification produced no match.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use fuzzy_vault::eval::{
    fas, generate_identities, measure_t, read_embeddings_csv, read_embeddings_raw, run_protocol,
    write_report, EvalReport, Identity, ProtocolConfig, SyntheticConfig,
};
use fuzzy_vault::feature_transform::{transform, Binarizer, FeatureSet, Quantizer, TransformConfig};
use fuzzy_vault::galois::{default_modulus, FieldContext};
use fuzzy_vault::vault::{enroll, verify_diagnostic, VaultRecord};
use fuzzy_vault::{Error, Result};

#[derive(Parser)]
#[command(name = "fuzzy-vault", version, about = "Unlinkable improved fuzzy vault pipeline")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quantize, binarize and map embeddings to feature sets (JSON lines).
    Transform(TransformArgs),
    /// Bind a fresh secret to a reference sample and write the vault record.
    Enroll(EnrollArgs),
    /// Check a probe sample against a vault record.
    Verify(VerifyArgs),
    /// Run the GMR/FMR/FAS evaluation protocol and write reports.
    Benchmark(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum QuantizerArg {
    /// Sign split at zero (two intervals).
    Sign,
    /// Rank-based equal-frequent intervals.
    EqualFrequent,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BinarizerArg {
    Dbr,
    Lssc,
}

#[derive(Args, Debug, Clone)]
struct TransformFlags {
    /// Quantization strategy.
    #[arg(long, value_enum, default_value = "equal-frequent")]
    quantizer: QuantizerArg,
    /// Quantization interval count.
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Binary encoding of quantization levels.
    #[arg(long, value_enum, default_value = "dbr")]
    binarizer: BinarizerArg,
}

impl TransformFlags {
    fn config(&self, n: usize) -> Result<TransformConfig> {
        let quantizer = match self.quantizer {
            QuantizerArg::Sign => Quantizer::EqualProbableSign,
            QuantizerArg::EqualFrequent => Quantizer::EqualFrequent,
        };
        let binarizer = match self.binarizer {
            BinarizerArg::Dbr => Binarizer::Dbr,
            BinarizerArg::Lssc => Binarizer::Lssc,
        };
        TransformConfig::new(quantizer, self.m, binarizer, n)
    }
}

#[derive(Args)]
struct TransformArgs {
    /// Embedding file: CSV rows `label,v1,...,vn`, or raw f32 with --manifest.
    #[arg(long)]
    input: PathBuf,
    /// JSON manifest marking --input as raw little-endian f32 data.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[command(flatten)]
    flags: TransformFlags,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnrollArgs {
    /// Embedding file (CSV, or raw f32 with --manifest).
    #[arg(long, conflicts_with = "features")]
    input: Option<PathBuf>,
    #[arg(long, requires = "input")]
    manifest: Option<PathBuf>,
    /// Pre-transformed feature-set file (JSON lines); requires --n.
    #[arg(long, requires = "n")]
    features: Option<PathBuf>,
    /// Identity label to enrol; defaults to the first one in the input.
    #[arg(long)]
    label: Option<String>,
    #[command(flatten)]
    flags: TransformFlags,
    /// Embedding dimensionality (only needed with --features).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 16)]
    field_width: u32,
    /// Hex field modulus; per-width default when omitted.
    #[arg(long)]
    modulus: Option<String>,
    /// Secret polynomial length (key strength).
    #[arg(long)]
    k: usize,
    /// Public record identifier; drives the record permutation.
    #[arg(long)]
    record_id: String,
    /// Deterministic secret entropy; random when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Vault record output path.
    #[arg(long)]
    out: PathBuf,
    /// Write the secret polynomial (the bound key) to this path.
    #[arg(long)]
    key_out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Vault record written by `enroll`.
    #[arg(long)]
    record: PathBuf,
    /// Probe embedding file (CSV, or raw f32 with --manifest).
    #[arg(long, conflicts_with = "features")]
    probe: Option<PathBuf>,
    #[arg(long, requires = "probe")]
    manifest: Option<PathBuf>,
    /// Pre-transformed probe feature-set file (JSON lines).
    #[arg(long)]
    features: Option<PathBuf>,
    /// Identity label to probe with; defaults to the first one.
    #[arg(long)]
    label: Option<String>,
    /// Interpolation multiplicity cap for the list decoder.
    #[arg(long, default_value_t = 8)]
    mu_max: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// Generate a synthetic corpus instead of reading embeddings.
    #[arg(long, conflicts_with = "input")]
    synthetic: bool,
    #[arg(long, default_value_t = 20)]
    identities: usize,
    #[arg(long, default_value_t = 3)]
    samples: usize,
    /// Embedding dimensionality of the synthetic corpus.
    #[arg(long, default_value_t = 512)]
    dim: usize,
    /// Within-identity noise standard deviation (truth is N(0,1)).
    #[arg(long, default_value_t = 0.3)]
    sigma: f64,
    /// Embedding file (CSV, or raw f32 with --manifest).
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, requires = "input")]
    manifest: Option<PathBuf>,
    #[command(flatten)]
    flags: TransformFlags,
    #[arg(long, default_value_t = 16)]
    field_width: u32,
    #[arg(long)]
    modulus: Option<String>,
    /// Comma-separated secret lengths to evaluate.
    #[arg(long, default_value = "4,8,12")]
    k_list: String,
    /// Interpolation multiplicity cap; 1 keeps large corpora fast.
    #[arg(long, default_value_t = 1)]
    mu_max: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads for the comparison trials; 0 = all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Output prefix; writes <out>.csv and <out>.json.
    #[arg(long, default_value = "report")]
    out: String,
    /// Additionally evaluate sign and equal-frequent pipelines side by side.
    #[arg(long)]
    compare_transforms: bool,
    /// Skip timing and use this decode/interpolation runtime ratio.
    #[arg(long)]
    t_ratio: Option<f64>,
    /// Timing repetitions for the runtime ratio t.
    #[arg(long, default_value_t = 3)]
    t_trials: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Command::Transform(args) => cmd_transform(args),
        Command::Enroll(args) => cmd_enroll(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Benchmark(args) => cmd_benchmark(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// 1 for internal faults, 2 for anything traceable to caller input.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) | Error::InfeasibleParams { .. } | Error::ZeroInversion => 1,
        _ => 2,
    }
}

fn build_ctx(width: u32, modulus: &Option<String>) -> Result<FieldContext> {
    let modulus = match modulus {
        Some(s) => {
            let digits = s.trim_start_matches("0x").trim_start_matches("0X");
            u32::from_str_radix(digits, 16)
                .map_err(|_| Error::BadRecord(format!("modulus {s:?} is not hex")))?
        }
        None => default_modulus(width)?,
    };
    FieldContext::new(width, modulus)
}

fn load_identities(input: &Path, manifest: &Option<PathBuf>) -> Result<Vec<Identity>> {
    match manifest {
        Some(m) => read_embeddings_raw(input, m),
        None => read_embeddings_csv(input),
    }
}

fn pick_identity<'a>(identities: &'a [Identity], label: &Option<String>) -> Result<&'a Identity> {
    match label {
        None => Ok(&identities[0]),
        Some(l) => identities
            .iter()
            .find(|i| &i.label == l)
            .ok_or_else(|| Error::BadEmbeddingFile(format!("label {l:?} not present"))),
    }
}

/// One line of the feature-set file emitted by `transform`.
#[derive(Serialize, Deserialize)]
struct FeatureLine {
    label: String,
    elements: Vec<usize>,
}

fn read_feature_line(path: &Path, label: &Option<String>) -> Result<FeatureSet> {
    for line in std::fs::read_to_string(path)?.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: FeatureLine = serde_json::from_str(line)?;
        if label.as_ref().is_none_or(|l| *l == parsed.label) {
            return FeatureSet::new(parsed.elements);
        }
    }
    Err(Error::BadEmbeddingFile("no matching feature-set line".into()))
}

fn cmd_transform(args: TransformArgs) -> Result<u8> {
    let raw = std::fs::read(&args.input)?;
    let mut writer: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    };
    if raw.iter().all(|b| b.is_ascii_whitespace()) {
        return Ok(0); // nothing to transform
    }
    let identities = load_identities(&args.input, &args.manifest)?;
    let n = identities[0].samples[0].len();
    let cfg = args.flags.config(n)?;
    for id in &identities {
        for sample in &id.samples {
            let set = transform(sample, &cfg)?;
            let line = FeatureLine {
                label: id.label.clone(),
                elements: set.elements().to_vec(),
            };
            writeln!(writer, "{}", serde_json::to_string(&line)?)?;
        }
    }
    Ok(0)
}

fn cmd_enroll(args: EnrollArgs) -> Result<u8> {
    let (set, n) = match (&args.features, &args.input) {
        (Some(features), _) => {
            let n = args.n.expect("clap enforces --n with --features");
            (read_feature_line(features, &args.label)?, n)
        }
        (None, Some(input)) => {
            let identities = load_identities(input, &args.manifest)?;
            let id = pick_identity(&identities, &args.label)?;
            let n = id.samples[0].len();
            let cfg = args.flags.config(n)?;
            (transform(&id.samples[0], &cfg)?, n)
        }
        (None, None) => {
            return Err(Error::BadEvalConfig("provide --input or --features".into()));
        }
    };
    let cfg = args.flags.config(n)?;
    let ctx = build_ctx(args.field_width, &args.modulus)?;
    let entropy = match args.seed {
        Some(s) => format!("enroll|{}|{s}", args.record_id),
        None => format!("enroll|{}|{:032x}", args.record_id, rand::random::<u128>()),
    };
    let (record, secret) = enroll(
        &ctx,
        &set,
        args.k,
        args.record_id.as_bytes(),
        entropy.as_bytes(),
        &cfg,
    )?;
    std::fs::write(&args.out, record.to_json()?)?;
    if let Some(key_path) = &args.key_out {
        #[derive(Serialize)]
        struct KeyFile {
            k: usize,
            coeffs: Vec<String>,
        }
        let key = KeyFile {
            k: secret.k(),
            coeffs: secret.coeffs().iter().map(|c| format!("{c:04x}")).collect(),
        };
        std::fs::write(key_path, serde_json::to_string_pretty(&key)?)?;
    }
    println!("kappa_hash: {}", hex::encode(record.kappa_hash));
    println!("record: {}", args.out.display());
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8> {
    let record = VaultRecord::from_json(&std::fs::read_to_string(&args.record)?)?;
    let ctx = FieldContext::new(record.field_width, record.modulus)?;
    let set = match (&args.features, &args.probe) {
        (Some(features), _) => read_feature_line(features, &args.label)?,
        (None, Some(probe)) => {
            let identities = load_identities(probe, &args.manifest)?;
            let id = pick_identity(&identities, &args.label)?;
            // the record's stored transform is authoritative
            transform(&id.samples[0], &record.transform)?
        }
        (None, None) => {
            return Err(Error::BadEvalConfig("provide --probe or --features".into()));
        }
    };
    let result = verify_diagnostic(&ctx, &record, &set, args.mu_max, None)?;
    println!("{}", if result.matched { "MATCH" } else { "NO-MATCH" });
    println!(
        "probe_size: {}  k: {}  mu: {}  l: {}  candidates: {}  degraded: {}",
        set.len(), record.k, result.mu_used, result.l_used,
        result.candidate_count, result.degraded
    );
    Ok(if result.matched { 0 } else { 3 })
}

fn parse_k_list(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let k: usize = part
            .trim()
            .parse()
            .map_err(|_| Error::BadEvalConfig(format!("bad k value {part:?}")))?;
        out.push(k);
    }
    if out.is_empty() {
        return Err(Error::BadEvalConfig("empty k list".into()));
    }
    Ok(out)
}

fn bench_one(
    ctx: &FieldContext,
    identities: &[Identity],
    flags_cfg: TransformConfig,
    args: &BenchArgs,
    k_values: &[usize],
    out_prefix: &str,
) -> Result<EvalReport> {
    let cfg = ProtocolConfig {
        transform: flags_cfg,
        k_values: k_values.to_vec(),
        mu_max: args.mu_max,
        jobs: args.jobs,
        seed: args.seed,
    };
    let t_ratio = match args.t_ratio {
        Some(t) => t.max(1.0),
        None => {
            let probe = transform(&identities[0].samples[0], &flags_cfg)?;
            let k = *k_values.iter().max().unwrap();
            let u = probe.len().max(k);
            measure_t(ctx, u, k, args.mu_max, args.t_trials.max(1), args.seed)?
        }
    };
    let report = run_protocol(ctx, identities, &cfg, t_ratio)?;
    let csv_path = PathBuf::from(format!("{out_prefix}.csv"));
    let json_path = PathBuf::from(format!("{out_prefix}.json"));
    write_report(&report, &csv_path, &json_path)?;
    println!("# {out_prefix} (t = {t_ratio:.2})");
    println!("{:>4} {:>8} {:>8} {:>10}", "k", "gmr", "fmr", "fas_bits");
    for row in &report.per_k {
        println!(
            "{:>4} {:>8.4} {:>8.4} {:>10.2}",
            row.k, row.gmr, row.fmr, fas(row.fmr, t_ratio)
        );
    }
    Ok(report)
}

fn cmd_benchmark(args: BenchArgs) -> Result<u8> {
    let identities = if args.synthetic {
        generate_identities(&SyntheticConfig {
            identities: args.identities,
            samples_per_identity: args.samples,
            dim: args.dim,
            noise_sigma: args.sigma,
            seed: args.seed,
        })?
    } else {
        match &args.input {
            Some(input) => load_identities(input, &args.manifest)?,
            None => {
                return Err(Error::BadEvalConfig(
                    "provide --synthetic or --input".into(),
                ));
            }
        }
    };
    let n = identities[0].samples[0].len();
    let ctx = build_ctx(args.field_width, &args.modulus)?;
    let k_values = parse_k_list(&args.k_list)?;

    if args.compare_transforms {
        let sign = TransformFlags {
            quantizer: QuantizerArg::Sign,
            m: 2,
            binarizer: args.flags.binarizer,
        };
        let eqf = TransformFlags {
            quantizer: QuantizerArg::EqualFrequent,
            m: args.flags.m,
            binarizer: args.flags.binarizer,
        };
        bench_one(&ctx, &identities, sign.config(n)?, &args, &k_values,
                  &format!("{}-sign", args.out))?;
        bench_one(&ctx, &identities, eqf.config(n)?, &args, &k_values,
                  &format!("{}-eqf", args.out))?;
    } else {
        bench_one(&ctx, &identities, args.flags.config(n)?, &args, &k_values, &args.out)?;
    }
    Ok(0)
}
