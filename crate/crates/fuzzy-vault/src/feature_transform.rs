//! Feature-type transformation: real-valued vectors to integer feature
//! sets via quantization (sign split or rank-based equal-frequent),
//! binarization (DBR or LSSC) and index-set mapping.
//!
//! The equal-frequent quantizer assigns each quantization level to exactly
//! n/m features, which fixes the feature-set size and with it the decoding
//! threshold of the vault.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A fixed-length real-valued embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    /// Rejects non-finite entries; rank-based quantization is undefined on
    /// NaN and infinities.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteFeature(i));
        }
        Ok(FeatureVector { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantizer {
    /// Split at zero: two equal-probable intervals for zero-centered data.
    EqualProbableSign,
    /// Per-vector rank quantization into m equal-frequent intervals.
    EqualFrequent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binarizer {
    /// Direct binary representation, ceil(log2 m) bits, MSB first.
    Dbr,
    /// Linearly separable subcode: m-1 bits, i ones then zeros.
    Lssc,
}

/// Pipeline configuration; stored inside vault records so enrolment and
/// verification always run the same transformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformConfig {
    pub quantizer: Quantizer,
    /// Interval count m.
    pub intervals: usize,
    pub binarizer: Binarizer,
    /// Expected vector length n.
    pub n: usize,
}

impl TransformConfig {
    pub fn new(quantizer: Quantizer, intervals: usize, binarizer: Binarizer, n: usize) -> Result<Self> {
        if intervals < 2 {
            return Err(Error::BadIntervalCount(intervals));
        }
        if quantizer == Quantizer::EqualProbableSign && intervals != 2 {
            return Err(Error::SignRequiresTwo(intervals));
        }
        if quantizer == Quantizer::EqualFrequent && !n.is_multiple_of(intervals) {
            return Err(Error::LengthNotDivisible { n, m: intervals });
        }
        Ok(TransformConfig { quantizer, intervals, binarizer, n })
    }

    /// Bits per feature after binarization.
    pub fn bits_per_feature(&self) -> usize {
        match self.binarizer {
            Binarizer::Dbr => (usize::BITS - (self.intervals - 1).leading_zeros()) as usize,
            Binarizer::Lssc => self.intervals - 1,
        }
    }

    /// Size of the index domain n*b the feature sets live in.
    pub fn domain_size(&self) -> usize {
        self.n * self.bits_per_feature()
    }
}

/// A strictly increasing set of distinct indices below the domain size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSet {
    elements: Vec<usize>,
}

impl FeatureSet {
    /// Accepts any iterable of indices; sorts and rejects duplicates.
    pub fn new(mut elements: Vec<usize>) -> Result<Self> {
        elements.sort_unstable();
        if elements.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DuplicateFeatureIndex);
        }
        Ok(FeatureSet { elements })
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn intersection_size(&self, other: &FeatureSet) -> usize {
        let mut count = 0;
        let (mut i, mut j) = (0, 0);
        while i < self.elements.len() && j < other.elements.len() {
            match self.elements[i].cmp(&other.elements[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }
}

/// Sign quantization: 1 for values >= 0, else 0.
pub fn quantize_equal_probable_sign(v: &FeatureVector) -> Vec<usize> {
    v.values().iter().map(|&x| usize::from(x >= 0.0)).collect()
}

/// Rank of each feature when sorting ascending (rank 0 = smallest), ties
/// broken by original index.
pub fn ranks(v: &FeatureVector) -> Vec<usize> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| {
        v.values()[a]
            .partial_cmp(&v.values()[b])
            .expect("finite values are totally ordered")
            .then(a.cmp(&b))
    });
    let mut out = vec![0; v.len()];
    for (rank, &idx) in order.iter().enumerate() {
        out[idx] = rank;
    }
    out
}

/// Equal-frequent quantization q(x_i) = floor(rank(x_i) * m / n); every
/// level occurs exactly n/m times.
pub fn quantize_equal_frequent(v: &FeatureVector, m: usize) -> Result<Vec<usize>> {
    if m < 2 {
        return Err(Error::BadIntervalCount(m));
    }
    let n = v.len();
    if !n.is_multiple_of(m) {
        return Err(Error::LengthNotDivisible { n, m });
    }
    Ok(ranks(v).into_iter().map(|r| r * m / n).collect())
}

/// DBR: each level as ceil(log2 m) bits, most-significant first.
pub fn binarize_dbr(q: &[usize], m: usize) -> Result<Vec<bool>> {
    let bits = (usize::BITS - (m - 1).leading_zeros()) as usize;
    let mut out = Vec::with_capacity(q.len() * bits);
    for &value in q {
        if value >= m {
            return Err(Error::QuantOutOfRange { value, m });
        }
        for b in (0..bits).rev() {
            out.push(value >> b & 1 == 1);
        }
    }
    Ok(out)
}

/// LSSC thermometer code: level i as i ones followed by m-1-i zeros, so
/// Hamming distance between codewords equals the level distance.
pub fn binarize_lssc(q: &[usize], m: usize) -> Result<Vec<bool>> {
    let bits = m - 1;
    let mut out = Vec::with_capacity(q.len() * bits);
    for &value in q {
        if value >= m {
            return Err(Error::QuantOutOfRange { value, m });
        }
        for b in 0..bits {
            out.push(b < value);
        }
    }
    Ok(out)
}

/// Indices of 1-bits, ascending.
pub fn map_to_set(bits: &[bool]) -> FeatureSet {
    FeatureSet {
        elements: bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect(),
    }
}

/// Full transformation: quantize, binarize, collect 1-bit indices.
pub fn transform(v: &FeatureVector, cfg: &TransformConfig) -> Result<FeatureSet> {
    if v.len() != cfg.n {
        return Err(Error::VectorLengthMismatch { got: v.len(), expected: cfg.n });
    }
    let quantized = match cfg.quantizer {
        Quantizer::EqualProbableSign => quantize_equal_probable_sign(v),
        Quantizer::EqualFrequent => quantize_equal_frequent(v, cfg.intervals)?,
    };
    let bits = match cfg.binarizer {
        Binarizer::Dbr => binarize_dbr(&quantized, cfg.intervals)?,
        Binarizer::Lssc => binarize_lssc(&quantized, cfg.intervals)?,
    };
    Ok(map_to_set(&bits))
}
