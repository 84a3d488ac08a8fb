//! Polynomial streams and bit-exact transduction verification.
//!
//! The stream of an integer-valued, eventually nonnegative polynomial f is
//! `1 0^f(start) 1 0^f(start+1) ...` with an additive offset available to
//! lift polynomials that dip negative (the degree is unchanged by adding a
//! constant). Prefixes are generated lazily block by block, so verifying a
//! multi-megabit transduction never materializes the whole input next to
//! the whole output.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{Poly, Rat};
use crate::fst::{Bit, Fst};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StreamError {
    #[error("polynomial must have a positive leading coefficient, got {0}")]
    NegativeLeadingCoefficient(Rat),
    #[error("polynomial is not integer-valued: {0}")]
    NotIntegerValued(Poly),
    #[error("block {index} would have negative length {value}")]
    NegativeBlock { index: u64, value: BigInt },
    #[error("block {index} has length {value}, too large to materialize")]
    BlockTooLarge { index: u64, value: BigInt },
}

/// Index past which a positive-leading-coefficient polynomial is provably
/// increasing: a Cauchy-style root bound on the derivative (every real
/// root of p' has |x| <= 1 + max_i |c'_i| / |lead(p')|).
fn monotone_bound(p: &Poly) -> u64 {
    let d = p.degree() as usize;
    let deriv: Vec<Rat> = (1..=d)
        .map(|i| p.coeff(i) * Rat::from_int(i as i64))
        .collect();
    let lead = deriv.last().expect("degree >= 1").clone();
    let max_ratio = deriv[..d - 1]
        .iter()
        .map(|c| (c / &lead).abs())
        .max()
        .unwrap_or_else(Rat::zero);
    (Rat::one() + max_ratio)
        .ceil()
        .to_u64()
        .expect("monotonicity bound overflows u64")
}

/// Least c >= 0 such that p(n) + c >= 0 for every natural n. The scan runs
/// up to a coefficient bound beyond which p is provably increasing, so the
/// minimum over the naturals is attained inside the scanned range.
pub fn nonneg_offset(p: &Poly) -> Result<BigInt, StreamError> {
    if p.is_zero() {
        return Ok(BigInt::zero());
    }
    if p.is_constant() {
        let c = p.constant_term();
        return if c.is_negative() {
            Ok((-c).ceil())
        } else {
            Ok(BigInt::zero())
        };
    }
    if p.leading_coeff().is_negative() {
        return Err(StreamError::NegativeLeadingCoefficient(p.leading_coeff()));
    }
    let bound = monotone_bound(p);
    let mut min = p.eval_int(0);
    for n in 1..=bound {
        let v = p.eval_bigint(&BigInt::from(n));
        if v < min {
            min = v;
        }
    }
    if min.is_negative() {
        Ok((-min).ceil())
    } else {
        Ok(BigInt::zero())
    }
}

/// A stream description: the polynomial, a nonnegative additive offset,
/// and the index of the first emitted block. Denotes the concatenation of
/// `1 0^(poly(i)+offset)` for i >= start.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "StreamSpecRepr", into = "StreamSpecRepr")]
pub struct StreamSpec {
    poly: Poly,
    offset: BigInt,
    start: u64,
}

#[derive(Serialize, Deserialize)]
struct StreamSpecRepr {
    poly: Poly,
    offset: String,
    start: u64,
}

impl TryFrom<StreamSpecRepr> for StreamSpec {
    type Error = String;
    fn try_from(r: StreamSpecRepr) -> Result<Self, Self::Error> {
        let offset: BigInt = r.offset.parse().map_err(|_| "bad offset".to_string())?;
        StreamSpec::with_offset_from(r.poly, offset, r.start).map_err(|e| e.to_string())
    }
}

impl From<StreamSpec> for StreamSpecRepr {
    fn from(s: StreamSpec) -> Self {
        StreamSpecRepr {
            poly: s.poly,
            offset: s.offset.to_string(),
            start: s.start,
        }
    }
}

impl StreamSpec {
    /// Stream of an already-nonnegative polynomial (offset 0, start 0).
    pub fn new(poly: Poly) -> Result<Self, StreamError> {
        StreamSpec::with_offset_from(poly, BigInt::zero(), 0)
    }

    /// Stream of poly + its automatic nonnegativity offset.
    pub fn with_auto_offset(poly: Poly) -> Result<Self, StreamError> {
        let offset = nonneg_offset(&poly)?;
        StreamSpec::with_offset_from(poly, offset, 0)
    }

    pub fn with_offset_from(poly: Poly, offset: BigInt, start: u64) -> Result<Self, StreamError> {
        if !poly.is_integer_valued() {
            return Err(StreamError::NotIntegerValued(poly));
        }
        if offset.is_negative() {
            return Err(StreamError::NegativeBlock {
                index: start,
                value: offset,
            });
        }
        let spec = StreamSpec { poly, offset, start };
        spec.check_nonnegative()?;
        Ok(spec)
    }

    fn check_nonnegative(&self) -> Result<(), StreamError> {
        if self.poly.is_zero() || self.poly.is_constant() {
            let v = self.block_value(self.start)?;
            if v.is_negative() {
                return Err(StreamError::NegativeBlock {
                    index: self.start,
                    value: v,
                });
            }
            return Ok(());
        }
        if self.poly.leading_coeff().is_negative() {
            return Err(StreamError::NegativeLeadingCoefficient(self.poly.leading_coeff()));
        }
        // p is increasing past the bound, so only a finite prefix can dip
        let shifted = self.poly.shift(self.start as i64);
        for n in 0..=monotone_bound(&shifted) {
            let index = self.start + n;
            let v = self.block_value(index)?;
            if v.is_negative() {
                return Err(StreamError::NegativeBlock { index, value: v });
            }
        }
        Ok(())
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn offset(&self) -> &BigInt {
        &self.offset
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    /// The same stream with `extra` more blocks dropped from the front.
    pub fn shifted_start(&self, extra: u64) -> StreamSpec {
        StreamSpec {
            poly: self.poly.clone(),
            offset: self.offset.clone(),
            start: self.start + extra,
        }
    }

    fn block_value(&self, index: u64) -> Result<BigInt, StreamError> {
        let v = self.poly.eval_bigint(&BigInt::from(index));
        let v = v
            .to_integer()
            .ok_or_else(|| StreamError::NotIntegerValued(self.poly.clone()))?;
        Ok(v + &self.offset)
    }

    /// Zero-run length of the block at stream position i (0-based from
    /// `start`), i.e. poly(start + i) + offset.
    pub fn block_len(&self, i: u64) -> Result<u64, StreamError> {
        let index = self.start + i;
        let v = self.block_value(index)?;
        if v.is_negative() {
            return Err(StreamError::NegativeBlock { index, value: v });
        }
        v.to_u64().ok_or(StreamError::BlockTooLarge { index, value: v })
    }

    /// The first `blocks` blocks as explicit bits.
    pub fn prefix(&self, blocks: u64) -> Result<Vec<Bit>, StreamError> {
        let mut out = Vec::new();
        for i in 0..blocks {
            let zeros = self.block_len(i)?;
            out.reserve(zeros as usize + 1);
            out.push(1);
            out.resize(out.len() + zeros as usize, 0);
        }
        Ok(out)
    }

    /// Total bit length of the first `blocks` blocks.
    pub fn prefix_len(&self, blocks: u64) -> Result<u64, StreamError> {
        let mut total = 0u64;
        for i in 0..blocks {
            total += 1 + self.block_len(i)?;
        }
        Ok(total)
    }
}

/// Result of replaying a transduction claim on stream prefixes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Verification {
    Ok,
    /// First bit position (0-based) where the transducer output and the
    /// claimed target stream disagree. When the output simply stops short
    /// of the compared prefix, the position is the output's length.
    Mismatch { position: u64 },
}

impl Verification {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verification::Ok)
    }
}

/// Upper bound on source blocks fed while waiting for the output to cover
/// the compared target prefix; machines that emit too little trip it and
/// report a mismatch at the stall point instead of looping forever.
const SOURCE_BLOCK_CAP_SLACK: u64 = 4096;

/// Runs T on enough source blocks that the output covers `blocks` target
/// blocks, comparing bit-for-bit as output arrives (the longer side is
/// truncated to the shorter). The source is generated lazily block by
/// block.
pub fn verify_transduction(
    t: &Fst,
    source: &StreamSpec,
    target: &StreamSpec,
    blocks: u64,
) -> Result<Verification, StreamError> {
    let pipeline: [&Fst; 1] = [t];
    verify_transduction_pipeline(&pipeline, source, target, blocks)
}

/// Same as [`verify_transduction`] but with a sequence of machines applied
/// in order (equivalent to running their composition, without paying for
/// the product construction).
pub fn verify_transduction_pipeline(
    stages: &[&Fst],
    source: &StreamSpec,
    target: &StreamSpec,
    blocks: u64,
) -> Result<Verification, StreamError> {
    assert!(!stages.is_empty(), "empty pipeline");
    let expected = target.prefix(blocks)?;
    let cap = blocks
        .saturating_mul(64)
        .saturating_add(SOURCE_BLOCK_CAP_SLACK);

    let mut cursors: Vec<_> = stages.iter().map(|f| f.cursor()).collect();
    let mut produced: Vec<Bit> = Vec::new();
    let mut compared: u64 = 0; // bits of `expected` already matched

    let mut buf_in: Vec<Bit> = Vec::new();
    let mut buf_out: Vec<Bit> = Vec::new();

    for i in 0..cap {
        // push one source block through the whole pipeline
        let zeros = source.block_len(i)?;
        buf_out.clear();
        cursors[0].feed_run(1, 1, &mut buf_out);
        cursors[0].feed_run(0, zeros, &mut buf_out);
        for cursor in cursors.iter_mut().skip(1) {
            std::mem::swap(&mut buf_in, &mut buf_out);
            buf_out.clear();
            cursor.feed(&buf_in, &mut buf_out);
        }
        produced.extend_from_slice(&buf_out);

        // compare what we can
        let limit = produced.len().min(expected.len() - compared as usize);
        let fresh = &produced[..limit];
        if let Some(off) = fresh.iter().zip(&expected[compared as usize..]).position(|(a, b)| a != b)
        {
            return Ok(Verification::Mismatch {
                position: compared + off as u64,
            });
        }
        compared += limit as u64;
        produced.drain(..limit);
        if compared == expected.len() as u64 {
            return Ok(Verification::Ok);
        }
    }
    // output never covered the prefix: it ends (stalls) at `compared`
    Ok(Verification::Mismatch { position: compared })
}
