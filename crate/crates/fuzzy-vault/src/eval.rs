//! Recognition-accuracy and security evaluation harness.
//!
//! Generates or ingests embedding data, runs the enrol/verify protocol over
//! mated and non-mated comparison pairs for a list of secret lengths k, and
//! reports GMR/FMR together with the false-accept security estimate
//! FAS = log2(t * ln(1/2) / ln(1 - FMR)), where t is the measured runtime
//! ratio between one list decode and one Lagrange interpolation.

use std::collections::HashMap;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::feature_transform::{transform, FeatureSet, FeatureVector, TransformConfig};
use crate::galois::FieldContext;
use crate::listdecode::{gs_decode, DecodeParams};
use crate::polyring::{lagrange_interpolate, random_secret};
use crate::vault::{enroll, verify};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Data sources
// ---------------------------------------------------------------------------

/// One subject with one or more embedding samples.
#[derive(Debug, Clone)]
pub struct Identity {
    pub label: String,
    pub samples: Vec<FeatureVector>,
}

/// Synthetic-data model: a fixed truth vector per identity, samples are the
/// truth plus i.i.d. Gaussian noise.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub identities: usize,
    pub samples_per_identity: usize,
    pub dim: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

pub fn generate_identities(cfg: &SyntheticConfig) -> Result<Vec<Identity>> {
    if cfg.identities == 0 || cfg.samples_per_identity == 0 || cfg.dim == 0 {
        return Err(Error::BadEvalConfig(
            "identities, samples and dim must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.identities);
    for id in 0..cfg.identities {
        let truth: Vec<f64> =
            (0..cfg.dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let mut samples = Vec::with_capacity(cfg.samples_per_identity);
        for _ in 0..cfg.samples_per_identity {
            let values: Vec<f64> = truth
                .iter()
                .map(|&t| t + cfg.noise_sigma * rng.sample::<f64, _>(StandardNormal))
                .collect();
            samples.push(FeatureVector::new(values)?);
        }
        out.push(Identity { label: format!("synthetic-{id}"), samples });
    }
    Ok(out)
}

/// Reads `label,v1,...,vn` rows (no header) and groups them by label in
/// first-appearance order.
pub fn read_embeddings_csv(path: &Path) -> Result<Vec<Identity>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)?;
    let mut identities: Vec<Identity> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut dim: Option<usize> = None;
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() < 2 {
            return Err(Error::BadEmbeddingFile(format!(
                "row {row} has {} fields, need a label plus values",
                record.len()
            )));
        }
        let label = record[0].to_string();
        let mut values = Vec::with_capacity(record.len() - 1);
        for field in record.iter().skip(1) {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::BadEmbeddingFile(format!("row {row}: non-numeric value {field:?}"))
            })?;
            values.push(v);
        }
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(Error::BadEmbeddingFile(format!(
                    "row {row} has {} values, expected {d}",
                    values.len()
                )))
            }
            _ => {}
        }
        let sample = FeatureVector::new(values)?;
        match index.get(&label) {
            Some(&i) => identities[i].samples.push(sample),
            None => {
                index.insert(label.clone(), identities.len());
                identities.push(Identity { label, samples: vec![sample] });
            }
        }
    }
    if identities.is_empty() {
        return Err(Error::BadEmbeddingFile("no rows".into()));
    }
    Ok(identities)
}

/// Manifest accompanying a raw little-endian f32 embedding file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawManifest {
    /// Values per embedding.
    pub n: usize,
    /// One label per embedding, in file order; repeats group samples.
    pub labels: Vec<String>,
}

/// Reads a raw f32 (little-endian) embedding file described by a JSON
/// manifest and groups samples by label in first-appearance order.
pub fn read_embeddings_raw(data_path: &Path, manifest_path: &Path) -> Result<Vec<Identity>> {
    let manifest: RawManifest = serde_json::from_str(&std::fs::read_to_string(manifest_path)?)?;
    if manifest.n == 0 || manifest.labels.is_empty() {
        return Err(Error::BadEmbeddingFile("manifest must list labels and n > 0".into()));
    }
    let bytes = std::fs::read(data_path)?;
    let expected = manifest.labels.len() * manifest.n * 4;
    if bytes.len() != expected {
        return Err(Error::BadEmbeddingFile(format!(
            "data file has {} bytes, manifest implies {expected}",
            bytes.len()
        )));
    }
    let mut identities: Vec<Identity> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (row, label) in manifest.labels.iter().enumerate() {
        let start = row * manifest.n * 4;
        let values: Vec<f64> = (0..manifest.n)
            .map(|i| {
                let o = start + i * 4;
                f32::from_le_bytes([bytes[o], bytes[o + 1], bytes[o + 2], bytes[o + 3]]) as f64
            })
            .collect();
        let sample = FeatureVector::new(values)?;
        match index.get(label) {
            Some(&i) => identities[i].samples.push(sample),
            None => {
                index.insert(label.clone(), identities.len());
                identities.push(Identity { label: label.clone(), samples: vec![sample] });
            }
        }
    }
    Ok(identities)
}

// ---------------------------------------------------------------------------
// Protocol
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    pub transform: TransformConfig,
    /// Secret lengths to evaluate.
    pub k_values: Vec<usize>,
    pub mu_max: usize,
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
    /// Seed for record ids and secret entropy.
    pub seed: u64,
}

/// Accuracy figures for one secret length.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KReport {
    pub k: usize,
    pub mated_trials: usize,
    pub mated_success: usize,
    pub nonmated_trials: usize,
    pub nonmated_accept: usize,
    pub gmr: f64,
    pub fmr: f64,
    /// Wilson 95% upper confidence bound on the FMR.
    pub fmr_wilson_upper: f64,
    pub fas_bits: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub seed: u64,
    pub identities: usize,
    pub total_samples: usize,
    /// Runtime ratio t between one list decode and one interpolation.
    pub t_ratio: f64,
    pub per_k: Vec<KReport>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Wilson score interval upper bound for a binomial proportion (z = 1.96).
pub fn wilson_upper(successes: usize, trials: usize) -> f64 {
    if trials == 0 {
        return 1.0;
    }
    let z = 1.96f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = p + z2 / (2.0 * n);
    let margin = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre + margin) / denom).min(1.0)
}

/// False-accept security in bits: log2(t * ln(1/2) / ln(1 - fmr)),
/// clamped to [0, inf). An FMR of zero yields +infinity.
pub fn fas(fmr: f64, t: f64) -> f64 {
    if !(0.0..=1.0).contains(&fmr) {
        return f64::NAN;
    }
    if fmr >= 1.0 {
        return 0.0;
    }
    if fmr <= 0.0 {
        return f64::INFINITY;
    }
    let guesses = t.max(1.0) * 0.5f64.ln() / (1.0 - fmr).ln();
    guesses.log2().max(0.0)
}

/// Runs the full protocol: the first sample of each identity enrols, the
/// remaining samples of the same identity form the mated trials, and the
/// first samples of every ordered cross-identity pair form the non-mated
/// trials. `t_ratio` must come from [`measure_t`] (or be 1.0 to report raw
/// FMR-equivalent security).
pub fn run_protocol(
    ctx: &FieldContext,
    identities: &[Identity],
    cfg: &ProtocolConfig,
    t_ratio: f64,
) -> Result<EvalReport> {
    if identities.len() < 2 {
        return Err(Error::BadEvalConfig("need at least two identities".into()));
    }
    if identities.iter().any(|i| i.samples.is_empty()) {
        return Err(Error::BadEvalConfig("every identity needs a sample".into()));
    }
    if cfg.k_values.is_empty() {
        return Err(Error::BadEvalConfig("k list must be non-empty".into()));
    }
    let sets: Vec<Vec<FeatureSet>> = identities
        .iter()
        .map(|id| {
            id.samples
                .iter()
                .map(|s| transform(s, &cfg.transform))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let run = || -> Result<Vec<KReport>> {
        let mut per_k = Vec::with_capacity(cfg.k_values.len());
        for &k in &cfg.k_values {
            // one record per identity from its first sample
            let records = identities
                .iter()
                .zip(&sets)
                .map(|(id, s)| {
                    let record_id = format!("{}|k={k}|seed={}", id.label, cfg.seed);
                    let entropy = format!("{record_id}|entropy");
                    let (record, _) =
                        enroll(ctx, &s[0], k, record_id.as_bytes(), entropy.as_bytes(), &cfg.transform)?;
                    Ok(record)
                })
                .collect::<Result<Vec<_>>>()?;

            // (record index, probe set, is_mated)
            let mut trials: Vec<(usize, &FeatureSet, bool)> = Vec::new();
            for (i, s) in sets.iter().enumerate() {
                for probe in &s[1..] {
                    trials.push((i, probe, true));
                }
            }
            for i in 0..sets.len() {
                for (j, s) in sets.iter().enumerate() {
                    if i != j {
                        trials.push((i, &s[0], false));
                    }
                }
            }
            let outcomes: Vec<(bool, bool)> = trials
                .par_iter()
                .map(|&(rec, probe, mated)| {
                    verify(ctx, &records[rec], probe, cfg.mu_max).map(|r| (r.matched, mated))
                })
                .collect::<Result<Vec<_>>>()?;

            let mated_trials = outcomes.iter().filter(|&&(_, m)| m).count();
            let mated_success = outcomes.iter().filter(|&&(ok, m)| m && ok).count();
            let nonmated_trials = outcomes.len() - mated_trials;
            let nonmated_accept = outcomes.iter().filter(|&&(ok, m)| !m && ok).count();
            let fmr = ratio(nonmated_accept, nonmated_trials);
            per_k.push(KReport {
                k,
                mated_trials,
                mated_success,
                nonmated_trials,
                nonmated_accept,
                gmr: ratio(mated_success, mated_trials),
                fmr,
                fmr_wilson_upper: wilson_upper(nonmated_accept, nonmated_trials),
                fas_bits: fas(fmr, t_ratio),
            });
        }
        Ok(per_k)
    };

    let per_k = if cfg.jobs == 0 {
        run()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::BadEvalConfig(format!("thread pool: {e}")))?
            .install(run)?
    };

    Ok(EvalReport {
        seed: cfg.seed,
        identities: identities.len(),
        total_samples: identities.iter().map(|i| i.samples.len()).sum(),
        t_ratio,
        per_k,
    })
}

// ---------------------------------------------------------------------------
// Runtime ratio t
// ---------------------------------------------------------------------------

/// Median runtime ratio between a full list decode on u points and a single
/// degree-(k-1) Lagrange interpolation, clamped to at least 1. Instances are
/// genuine (all points on the hidden polynomial) so decode timing includes
/// root extraction.
pub fn measure_t(
    ctx: &FieldContext,
    u: usize,
    k: usize,
    mu_max: usize,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if u > ctx.order() as usize || u < k || trials == 0 {
        return Err(Error::BadEvalConfig("need trials > 0 and k <= u <= field order".into()));
    }
    let params = DecodeParams::new(k, mu_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratios = Vec::with_capacity(trials);
    for trial in 0..trials {
        let entropy = format!("t-measure|{seed}|{trial}");
        let secret = random_secret(ctx, k, entropy.as_bytes())?;
        let poly = secret.to_poly();
        // u distinct abscissae
        let mut xs: Vec<u16> = (0..ctx.order()).map(|v| v as u16).collect();
        for i in 0..u {
            let j = i + rng.gen_range(0..xs.len() - i);
            xs.swap(i, j);
        }
        let points: Vec<(u16, u16)> =
            xs[..u].iter().map(|&x| (x, poly.eval_raw(ctx, x))).collect();

        let start = Instant::now();
        let outcome = gs_decode(ctx, &points, &params)?;
        let decode_time = start.elapsed().as_secs_f64();
        assert!(!outcome.candidates.is_empty());

        let start = Instant::now();
        let interpolated = lagrange_interpolate(ctx, &points[..k])?;
        let interp_time = start.elapsed().as_secs_f64().max(1e-9);
        std::hint::black_box(&interpolated);

        ratios.push(decode_time / interp_time);
    }
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if trials % 2 == 1 {
        ratios[trials / 2]
    } else {
        (ratios[trials / 2 - 1] + ratios[trials / 2]) / 2.0
    };
    Ok(median.max(1.0))
}

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

/// Writes the per-k table as CSV (`k,gmr,fmr,t,fas_bits`) and the full
/// report, including ROC points, as a JSON sidecar.
pub fn write_report(report: &EvalReport, csv_path: &Path, json_path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(csv_path)?;
    w.write_record(["k", "gmr", "fmr", "t", "fas_bits"])?;
    for row in &report.per_k {
        w.write_record([
            row.k.to_string(),
            format!("{:.6}", row.gmr),
            format!("{:.6}", row.fmr),
            format!("{:.3}", report.t_ratio),
            format!("{:.3}", row.fas_bits),
        ])?;
    }
    w.flush()?;

    #[derive(Serialize)]
    struct Sidecar<'a> {
        #[serde(flatten)]
        report: &'a EvalReport,
        roc: Vec<(f64, f64)>,
    }
    let sidecar = Sidecar {
        report,
        roc: report.per_k.iter().map(|r| (r.fmr, r.gmr)).collect(),
    };
    let mut f = std::fs::File::create(json_path)?;
    // fas_bits can be +inf, which JSON numbers cannot carry; serialize via a
    // string-normalising pass
    let mut value = serde_json::to_value(&sidecar).unwrap_or(serde_json::Value::Null);
    normalize_nonfinite(&mut value, &sidecar)?;
    writeln!(f, "{}", serde_json::to_string_pretty(&value)?)?;
    Ok(())
}

fn normalize_nonfinite<S: Serialize>(value: &mut serde_json::Value, fallback: &S) -> Result<()> {
    // serde_json maps non-finite floats to null; replace fas nulls with a
    // large sentinel string so readers can tell "unbounded" from "missing"
    if value.is_null() {
        *value = serde_json::to_value(fallback)?;
    }
    if let Some(rows) = value.get_mut("per_k").and_then(|v| v.as_array_mut()) {
        for row in rows {
            if let Some(slot) = row.get_mut("fas_bits") {
                if slot.is_null() {
                    *slot = serde_json::Value::String("inf".into());
                }
            }
        }
    }
    Ok(())
}
