//! Key binding and retrieval for the unlinkable improved fuzzy vault.
//!
//! Enrolment hides a secret polynomial kappa by storing V = kappa + p,
//! where p is the monic root product of the permuted feature set; the
//! record-specific public permutation makes records from the same subject
//! non-correlatable. Verification evaluates V on the permuted probe set
//! and list-decodes the resulting points.

use serde::{Deserialize, Serialize};

use crate::drbg::Drbg;
use crate::feature_transform::{FeatureSet, TransformConfig};
use crate::galois::FieldContext;
use crate::listdecode::{gs_decode, DecodeParams};
use crate::polyring::{monic_from_roots, random_secret, Polynomial, SecretPolynomial};
use crate::{Error, Result};

pub const RECORD_VERSION: u32 = 1;

/// A bijection on [0, domain_size), derived deterministically from a public
/// record identifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<usize>,
}

impl Permutation {
    pub fn domain_size(&self) -> usize {
        self.forward.len()
    }

    pub fn image(&self, i: usize) -> Option<usize> {
        self.forward.get(i).copied()
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }
}

/// Fisher-Yates shuffle of [0, domain_size) driven by the counter-mode
/// SHA-256 stream keyed with SHA-256(record_id). Same id, same permutation.
pub fn derive_permutation(
    ctx: &FieldContext,
    record_id: &[u8],
    domain_size: usize,
) -> Result<Permutation> {
    if domain_size > ctx.order() as usize {
        return Err(Error::DomainExceedsField { domain: domain_size, order: ctx.order() as usize });
    }
    let mut forward: Vec<usize> = (0..domain_size).collect();
    let mut stream = Drbg::new(record_id);
    for i in (1..domain_size).rev() {
        let j = stream.uniform(i as u32 + 1) as usize;
        forward.swap(i, j);
    }
    Ok(Permutation { forward })
}

/// Image of a feature set under the permutation, re-sorted.
pub fn apply_permutation(perm: &Permutation, set: &FeatureSet) -> Result<FeatureSet> {
    let mut mapped = Vec::with_capacity(set.len());
    for &e in set.elements() {
        let img = perm
            .image(e)
            .ok_or(Error::ElementOutOfDomain { element: e, domain: perm.domain_size() })?;
        mapped.push(img);
    }
    FeatureSet::new(mapped)
}

/// The stored protected template. Contains only V, H(kappa) and public
/// metadata; kappa itself never appears.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRecord", into = "RawRecord")]
pub struct VaultRecord {
    pub version: u32,
    pub field_width: u32,
    pub modulus: u32,
    pub k: usize,
    /// Coefficients of V, ascending degree; monic of degree |A|.
    pub vault_coeffs: Vec<u16>,
    pub kappa_hash: [u8; 32],
    pub record_id: Vec<u8>,
    pub transform: TransformConfig,
}

#[derive(Serialize, Deserialize)]
struct RawRecord {
    version: u32,
    field_width: u32,
    modulus: String,
    k: usize,
    vault_coeffs: Vec<String>,
    kappa_hash: String,
    record_id: String,
    transform: TransformConfig,
}

impl From<VaultRecord> for RawRecord {
    fn from(r: VaultRecord) -> Self {
        RawRecord {
            version: r.version,
            field_width: r.field_width,
            modulus: format!("{:x}", r.modulus),
            k: r.k,
            vault_coeffs: r.vault_coeffs.iter().map(|c| format!("{c:04x}")).collect(),
            kappa_hash: hex::encode(r.kappa_hash),
            record_id: hex::encode(&r.record_id),
            transform: r.transform,
        }
    }
}

impl TryFrom<RawRecord> for VaultRecord {
    type Error = Error;

    fn try_from(r: RawRecord) -> Result<Self> {
        let bad = |what: &str| Error::BadRecord(what.to_string());
        let modulus = u32::from_str_radix(&r.modulus, 16).map_err(|_| bad("modulus"))?;
        let mut vault_coeffs = Vec::with_capacity(r.vault_coeffs.len());
        for c in &r.vault_coeffs {
            vault_coeffs.push(u16::from_str_radix(c, 16).map_err(|_| bad("vault coefficient"))?);
        }
        let hash_bytes = hex::decode(&r.kappa_hash).map_err(|_| bad("kappa_hash"))?;
        let kappa_hash: [u8; 32] =
            hash_bytes.try_into().map_err(|_| bad("kappa_hash length"))?;
        let record_id = hex::decode(&r.record_id).map_err(|_| bad("record_id"))?;
        let record = VaultRecord {
            version: r.version,
            field_width: r.field_width,
            modulus,
            k: r.k,
            vault_coeffs,
            kappa_hash,
            record_id,
            transform: r.transform,
        };
        record.validate()?;
        Ok(record)
    }
}

impl VaultRecord {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Error::BadRecord(what.to_string());
        if self.version != RECORD_VERSION {
            return Err(bad("unsupported version"));
        }
        if self.vault_coeffs.last() != Some(&1) {
            return Err(bad("vault polynomial must be monic"));
        }
        let degree = self.vault_coeffs.len() - 1;
        if self.k > degree {
            return Err(bad("k exceeds vault polynomial degree"));
        }
        let order = 1u64 << self.field_width;
        if self.vault_coeffs.iter().any(|&c| c as u64 >= order) {
            return Err(bad("vault coefficient outside field"));
        }
        if self.transform.domain_size() as u64 > order {
            return Err(bad("transform domain exceeds field"));
        }
        Ok(())
    }

    pub fn vault_poly(&self) -> Polynomial {
        Polynomial::from_raw(self.vault_coeffs.clone())
    }

    /// Checks that a field context matches the record's parameters.
    pub fn check_field(&self, ctx: &FieldContext) -> Result<()> {
        if ctx.width() != self.field_width || ctx.modulus() != self.modulus {
            return Err(Error::PipelineMismatch(format!(
                "record expects GF(2^{}) mod {:#x}",
                self.field_width, self.modulus
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Binds a secret to an already-permuted feature set: V = kappa + p with
/// p the monic root product over the set.
pub fn bind(ctx: &FieldContext, permuted_set: &FeatureSet, secret: &SecretPolynomial) -> Result<Polynomial> {
    let roots: Vec<u16> = permuted_set.elements().iter().map(|&e| e as u16).collect();
    let p = monic_from_roots(ctx, &roots)?;
    // characteristic 2: kappa - p = kappa + p
    Ok(p.add(&secret.to_poly()))
}

/// Enrolment: permutes the reference set, binds a fresh secret to it and
/// assembles the public record. Returns the secret to the caller for key
/// use; it is never persisted here.
#[allow(clippy::too_many_arguments)]
pub fn enroll(
    ctx: &FieldContext,
    reference_set: &FeatureSet,
    k: usize,
    record_id: &[u8],
    entropy: &[u8],
    transform: &TransformConfig,
) -> Result<(VaultRecord, SecretPolynomial)> {
    if k > reference_set.len() {
        return Err(Error::SecretExceedsSet { k, set: reference_set.len() });
    }
    let domain = transform.domain_size();
    if let Some(&max) = reference_set.elements().last() {
        if max >= domain {
            return Err(Error::ElementOutOfDomain { element: max, domain });
        }
    }
    let perm = derive_permutation(ctx, record_id, domain)?;
    let permuted = apply_permutation(&perm, reference_set)?;
    let secret = random_secret(ctx, k, entropy)?;
    let vault = bind(ctx, &permuted, &secret)?;
    let record = VaultRecord {
        version: RECORD_VERSION,
        field_width: ctx.width(),
        modulus: ctx.modulus(),
        k,
        vault_coeffs: vault.coeffs().to_vec(),
        kappa_hash: secret.hash(),
        record_id: record_id.to_vec(),
        transform: *transform,
    };
    record.validate()?;
    Ok((record, secret))
}

/// Outcome of a verification attempt.
#[derive(Debug, Clone)]
pub struct VerifyResult {
    /// True iff some decoded candidate hashes to the stored kappa_hash.
    pub matched: bool,
    /// Mirrors `matched`; the only way to match is hash agreement.
    pub recovered_hash_ok: bool,
    /// Overlap |A^ intersect B^|; only populated in diagnostic mode when
    /// the caller supplies the reference set.
    pub omega_if_known: Option<usize>,
    pub mu_used: usize,
    pub l_used: usize,
    pub candidate_count: usize,
    pub degraded: bool,
}

/// Key retrieval: evaluates V on the permuted probe set and list-decodes.
pub fn verify(
    ctx: &FieldContext,
    record: &VaultRecord,
    probe_set: &FeatureSet,
    mu_max: usize,
) -> Result<VerifyResult> {
    verify_diagnostic(ctx, record, probe_set, mu_max, None)
}

/// Like [`verify`], additionally reporting the true overlap when the
/// caller (a test harness) supplies the unpermuted reference set.
pub fn verify_diagnostic(
    ctx: &FieldContext,
    record: &VaultRecord,
    probe_set: &FeatureSet,
    mu_max: usize,
    reference_set: Option<&FeatureSet>,
) -> Result<VerifyResult> {
    record.validate()?;
    record.check_field(ctx)?;
    let domain = record.transform.domain_size();
    if let Some(&max) = probe_set.elements().last() {
        if max >= domain {
            return Err(Error::ElementOutOfDomain { element: max, domain });
        }
    }
    let perm = derive_permutation(ctx, &record.record_id, domain)?;
    let permuted = apply_permutation(&perm, probe_set)?;
    let vault = record.vault_poly();
    let points: Vec<(u16, u16)> = permuted
        .elements()
        .iter()
        .map(|&x| (x as u16, vault.eval_raw(ctx, x as u16)))
        .collect();
    let omega_if_known = reference_set.map(|r| r.intersection_size(probe_set));

    if points.len() < record.k {
        // too few probe points to determine any degree-<k candidate
        return Ok(VerifyResult {
            matched: false,
            recovered_hash_ok: false,
            omega_if_known,
            mu_used: 0,
            l_used: 0,
            candidate_count: 0,
            degraded: true,
        });
    }
    let params = DecodeParams::new(record.k, mu_max)?;
    let outcome = gs_decode(ctx, &points, &params)?;
    let matched = outcome.candidates.iter().any(|c| {
        crate::polyring::secret_hash(c, record.k)
            .map(|h| h == record.kappa_hash)
            .unwrap_or(false)
    });
    Ok(VerifyResult {
        matched,
        recovered_hash_ok: matched,
        omega_if_known,
        mu_used: outcome.mu_used,
        l_used: outcome.l_used,
        candidate_count: outcome.candidates.len(),
        degraded: outcome.degraded,
    })
}
