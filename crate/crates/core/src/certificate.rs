//! Replayable certificates for degree claims.
//!
//! Every claim this crate makes comes with a witness that a third party
//! can re-check mechanically: algebraic certificates (the 2-transform
//! reduction and the canonicalization chain) replay by exact re-derivation,
//! and transduction certificates replay by synthesizing the claimed FST
//! pipeline and comparing its output bit-for-bit against the target stream
//! prefix.
//!
//! A transduction certificate asserts
//!
//!   weight x (shift-by-skip of source) = (shift-by-target_shift of target) + delta
//!
//! as functions, and realizes it as machines: the block-phase machine of
//! the naturalized weight, a constant add/remove stage for the (scaled)
//! delta, a scale-down stage undoing the naturalization, and a prepend
//! stage restoring the target's dropped blocks. Stages are composed into a
//! single machine when the product stays small.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::degrees::{
    bigint_string, classify, CanonCertificate, CanonicalDegree, Classification, DegreeWitness,
    Reduce2Certificate,
};
use crate::exact::{Poly, Rat};
use crate::fst::{Fst, FstError};
use crate::stream::{verify_transduction_pipeline, StreamError, StreamSpec, Verification};
use crate::weight::{single_product_poly, Weight};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertifyError {
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error(transparent)]
    Fst(#[from] FstError),
    #[error("chain not realizable: {0}")]
    ChainNotRealizable(String),
}

/// Compose stages into one machine while the product construction stays
/// small; otherwise keep the pipeline and replay it sequentially.
const COMPOSE_STATE_BUDGET: usize = 4096;

fn compose_stages(stages: Vec<Fst>) -> Vec<Fst> {
    if stages.len() < 2 {
        return stages;
    }
    let mut budget = 1usize;
    for f in &stages {
        budget = match budget.checked_mul(f.state_count()) {
            Some(b) if b <= COMPOSE_STATE_BUDGET => b,
            _ => return stages,
        };
    }
    let mut iter = stages.into_iter();
    let first = iter.next().expect("nonempty");
    vec![iter.fold(first, |acc, next| acc.compose(&next))]
}

/// A replayable stream-level witness for one reduction step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransductionCertificate {
    pub source: StreamSpec,
    pub target: StreamSpec,
    /// The (possibly rational) weight realizing the step.
    pub weight: Weight,
    /// Source blocks the machine swallows before the first output block.
    pub skip: u64,
    /// Target blocks dropped by the claim and re-attached on replay.
    pub target_shift: u64,
    /// Naturalization factor: weight entries and delta times scale are
    /// integers, and the pipeline scales back down at the end.
    #[serde(with = "bigint_string")]
    pub scale: BigInt,
    /// Constant by which the weight product overshoots the shifted target.
    pub constant_delta: Rat,
    /// The synthesized machine(s), run left to right.
    pub stages: Vec<Fst>,
}

fn effective_poly(spec: &StreamSpec, extra_shift: u64) -> Poly {
    let shifted = spec.poly().shift((spec.start() + extra_shift) as i64);
    &shifted + &Poly::constant(Rat::from_bigint(spec.offset().clone()))
}

/// Builds the certificate for the claim
/// `weight x S^skip(source) = S^target_shift(target) + constant`, deriving
/// the constant from the polynomials and synthesizing the machine stages.
/// Fails if the residual is not a constant (the claim is simply false) or
/// if a stage cannot be realized.
pub fn build_transduction(
    source: StreamSpec,
    target: StreamSpec,
    weight: Weight,
    skip: u64,
    target_shift: u64,
) -> Result<TransductionCertificate, CertifyError> {
    let product = single_product_poly(&weight, &effective_poly(&source, skip));
    let shifted_target = effective_poly(&target, target_shift);
    let residual = &product - &shifted_target;
    if !residual.is_constant() {
        return Err(CertifyError::ChainNotRealizable(format!(
            "weight product differs from the target by the non-constant {residual}"
        )));
    }
    let constant_delta = residual.constant_term();

    let scale = weight.denominator_lcm().lcm(constant_delta.denom());
    let scaled_weight = weight.scaled(&Rat::from_bigint(scale.clone()));
    let delta_scaled = (&constant_delta * &Rat::from_bigint(scale.clone()))
        .to_integer()
        .expect("scale clears the delta denominator");

    let skip_usize = skip
        .to_usize()
        .ok_or_else(|| CertifyError::ChainNotRealizable("skip too large".into()))?;
    let mut stages = vec![Fst::from_weight(&scaled_weight, skip_usize)?];
    let delta_abs = delta_scaled
        .abs()
        .to_usize()
        .ok_or_else(|| CertifyError::ChainNotRealizable("delta too large".into()))?;
    if delta_scaled.is_positive() {
        stages.push(Fst::remove_const(delta_abs));
    } else if delta_scaled.is_negative() {
        stages.push(Fst::add_const(delta_abs));
    }
    if !scale.is_one() {
        let s = scale
            .to_usize()
            .ok_or_else(|| CertifyError::ChainNotRealizable("scale too large".into()))?;
        stages.push(Fst::scale_down(s)?);
    }
    if target_shift > 0 {
        stages.push(Fst::prepend(&target.prefix(target_shift)?));
    }

    Ok(TransductionCertificate {
        source,
        target,
        weight,
        skip,
        target_shift,
        scale,
        constant_delta,
        stages: compose_stages(stages),
    })
}

impl TransductionCertificate {
    /// Replays the certificate over `blocks` target blocks: re-synthesizes
    /// the pipeline from the declared fields, checks it matches the stored
    /// stages, and compares output against the target prefix bit by bit.
    pub fn replay(&self, blocks: u64) -> ReplayOutcome {
        let rebuilt = match build_transduction(
            self.source.clone(),
            self.target.clone(),
            self.weight.clone(),
            self.skip,
            self.target_shift,
        ) {
            Ok(c) => c,
            Err(e) => return ReplayOutcome::Invalid { reason: e.to_string() },
        };
        if rebuilt.stages != self.stages
            || rebuilt.scale != self.scale
            || rebuilt.constant_delta != self.constant_delta
        {
            return ReplayOutcome::Invalid {
                reason: "stored stages or constants disagree with re-synthesis".into(),
            };
        }
        let stages: Vec<&Fst> = self.stages.iter().collect();
        match verify_transduction_pipeline(&stages, &self.source, &self.target, blocks) {
            Ok(Verification::Ok) => ReplayOutcome::Ok,
            Ok(Verification::Mismatch { position }) => ReplayOutcome::Mismatch { position },
            Err(e) => ReplayOutcome::Invalid { reason: e.to_string() },
        }
    }
}

/// Full classification certificate: the case witness plus a stream-level
/// membership certificate showing the cube (or its shift) reaches the
/// product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyCertificate {
    pub weight: Weight,
    pub shift: i64,
    pub degree: CanonicalDegree,
    pub product: Poly,
    pub witness: DegreeWitness,
    pub membership: TransductionCertificate,
}

/// Any certificate this crate emits, tagged by kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
#[allow(clippy::large_enum_variant)]
pub enum Certificate {
    Transduction(TransductionCertificate),
    Reduce2(Reduce2Certificate),
    Canon(CanonCertificate),
    Classify(ClassifyCertificate),
}

/// Result of replaying a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ReplayOutcome {
    Ok,
    /// Bit position of the first disagreement during stream replay.
    Mismatch { position: u64 },
    /// The certificate is internally inconsistent.
    Invalid { reason: String },
}

impl ReplayOutcome {
    pub fn is_ok(&self) -> bool {
        matches!(self, ReplayOutcome::Ok)
    }
}

impl Certificate {
    /// Replays the certificate: algebraic kinds by exact re-derivation,
    /// stream kinds by running the pipeline over `blocks` target blocks.
    pub fn replay(&self, blocks: u64) -> ReplayOutcome {
        let algebraic = |r: Result<(), String>| match r {
            Ok(()) => ReplayOutcome::Ok,
            Err(reason) => ReplayOutcome::Invalid { reason },
        };
        match self {
            Certificate::Transduction(c) => c.replay(blocks),
            Certificate::Reduce2(c) => algebraic(c.replay()),
            Certificate::Canon(c) => algebraic(c.replay()),
            Certificate::Classify(c) => {
                let witness_check = match &c.witness {
                    DegreeWitness::OneTransform { canon, .. } => canon.replay(),
                    DegreeWitness::TwoTransform { reduce2, .. } => reduce2.replay(),
                    DegreeWitness::Constant { .. } | DegreeWitness::MTransform { .. } => Ok(()),
                };
                if let Err(reason) = witness_check {
                    return ReplayOutcome::Invalid { reason };
                }
                let fresh = classify(&c.weight, c.shift);
                if fresh.degree != c.degree || fresh.product != c.product {
                    return ReplayOutcome::Invalid {
                        reason: "classification does not match re-derivation".into(),
                    };
                }
                c.membership.replay(blocks)
            }
        }
    }
}

/// Stream-level witness that the cube reaches the product of `alpha` over
/// `(n+t)^3`: for t >= 0 the source is the cube stream with t blocks
/// skipped; for t < 0 the source is the offset-lifted `(n+t)^3` stream.
pub fn membership_certificate(alpha: &Weight, t: i64) -> Result<TransductionCertificate, CertifyError> {
    let (source, skip) = if t >= 0 {
        (StreamSpec::new(Poly::monomial(3))?, t as u64)
    } else {
        (StreamSpec::with_auto_offset(Poly::linear_cubed(1, t))?, 0)
    };
    let product = single_product_poly(alpha, &Poly::linear_cubed(1, t));
    let target = StreamSpec::with_auto_offset(product)?;
    build_transduction(source, target, alpha.clone(), skip, 0)
}

/// Certificate for the classification of `alpha` over `(n+t)^3`.
pub fn classify_certificate(alpha: &Weight, t: i64) -> Result<ClassifyCertificate, CertifyError> {
    let Classification {
        degree,
        product,
        witness,
    } = classify(alpha, t);
    let membership = membership_certificate(alpha, t)?;
    Ok(ClassifyCertificate {
        weight: alpha.clone(),
        shift: t,
        degree,
        product,
        witness,
        membership,
    })
}

/// The divisibility step `(an+1)^3 >= (acn+1)^3`: the weight samples every
/// c-th block, i.e. composes n -> cn into the argument.
pub fn divisibility_certificate(a: u64, c: u64) -> Result<TransductionCertificate, CertifyError> {
    assert!(a >= 1 && c >= 1);
    let source = StreamSpec::new(Poly::linear_cubed(a as i64, 1))?;
    let target = StreamSpec::new(Poly::linear_cubed((a * c) as i64, 1))?;
    let mut entries = vec![Rat::zero(); c as usize];
    entries[0] = Rat::one();
    let weight = Weight::new(entries, Rat::zero()).expect("nonnegative");
    build_transduction(source, target, weight, 0, 0)
}

/// The trivial claim f >= f via the identity weight.
pub fn identity_certificate(spec: StreamSpec) -> Result<TransductionCertificate, CertifyError> {
    build_transduction(spec.clone(), spec, Weight::identity(), 0, 0)
}

/// One half of the canonicalization equivalence, downward:
/// `(an+b)^3 >= (an+1)^3` (or n^3 when b = 0) by sampling every b-th block
/// and dividing out b^3. The rational weight keeps the pipeline honest:
/// naturalization scales up, the machine works integrally, and the
/// scale-down stage undoes it.
pub fn canon_descent_certificate(a: u64, b: u64) -> Result<TransductionCertificate, CertifyError> {
    assert!(a >= 1);
    let source = StreamSpec::new(Poly::linear_cubed(a as i64, b as i64))?;
    if b <= 1 {
        // already canonical (or the plain cube)
        return identity_certificate(source);
    }
    let target = StreamSpec::new(Poly::linear_cubed(a as i64, 1))?;
    let mut entries = vec![Rat::zero(); b as usize];
    entries[0] = Rat::ratio(1, (b * b * b) as i64);
    let weight = Weight::new(entries, Rat::zero()).expect("nonnegative");
    build_transduction(source, target, weight, 0, 0)
}

/// The other half, upward: `(an+1)^3 >= (an+b)^3` for b coprime to a, via
/// the multiplicative-order construction: skip m blocks so the offset
/// becomes b^i, then sample every b^(i-1)-th block and divide out
/// b^(3(i-1)). The scale grows as b^(3(i-1)), so this is only materialized
/// for small instances.
pub fn canon_ascent_certificate(a: u64, b: u64) -> Result<TransductionCertificate, CertifyError> {
    assert!(a >= 2 && b >= 2 && b < a);
    let order = crate::exact::multiplicative_order(b, a)
        .map_err(|e| CertifyError::ChainNotRealizable(e.to_string()))?;
    let pow_im1 = BigInt::from(b).pow(order as u32 - 1);
    let window = pow_im1
        .to_usize()
        .ok_or_else(|| CertifyError::ChainNotRealizable("order window too large".into()))?;
    let m = (BigInt::from(b).pow(order as u32) - BigInt::one()) / BigInt::from(a);
    let skip = m
        .to_u64()
        .ok_or_else(|| CertifyError::ChainNotRealizable("shift too large".into()))?;

    let source = StreamSpec::new(Poly::linear_cubed(a as i64, 1))?;
    let target = StreamSpec::new(Poly::linear_cubed(a as i64, b as i64))?;
    let mut entries = vec![Rat::zero(); window];
    let cube_scale = &pow_im1 * &pow_im1 * &pow_im1;
    entries[0] = Rat::new(BigInt::one(), cube_scale);
    let weight = Weight::new(entries, Rat::zero()).expect("nonnegative");
    build_transduction(source, target, weight, skip, 0)
}

/// A degree claim that can be backed by a stream-level certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Claim {
    /// "The product of this weight over (n+shift)^3 has its classified
    /// degree", witnessed by membership plus the case certificate.
    Classify { weight: Weight, shift: i64 },
    /// "left relates to right", witnessed by the appropriate reduction.
    Compare {
        left: CanonicalDegree,
        right: CanonicalDegree,
    },
}

fn bottom_representative() -> Poly {
    // the 3-transform (3n)^3 + (3n+1)^3 + (3n+2)^3
    single_product_poly(&Weight::from_ints(&[1, 1, 1], 0), &Poly::monomial(3))
}

fn constant_collapse_certificate(source: Poly) -> Result<TransductionCertificate, CertifyError> {
    // the zero weight maps any stream to the all-ones (period-1) stream
    let weight = Weight::from_ints(&[0], 0);
    let target = StreamSpec::new(Poly::zero())?;
    build_transduction(StreamSpec::new(source)?, target, weight, 0, 0)
}

fn one_t_poly(a: u64) -> Poly {
    Poly::linear_cubed(a as i64, if a == 1 { 0 } else { 1 })
}

/// Assembles the certificate for a claim and replays it over `blocks`
/// target blocks. Claims whose witness needs machinery outside the weight
/// chain (anything lowering a 1-transform into the bottom degree) are not
/// realizable here and error out instead.
pub fn certify_stream(
    claim: &Claim,
    blocks: u64,
) -> Result<(Certificate, ReplayOutcome), CertifyError> {
    use crate::degrees::compare;
    use CanonicalDegree::{Bottom3, OneT, Zero};
    let cert = match claim {
        Claim::Classify { weight, shift } => {
            Certificate::Classify(classify_certificate(weight, *shift)?)
        }
        Claim::Compare { left, right } => {
            let relation = compare(*left, *right);
            // orient so the certificate witnesses higher >= lower
            let (hi, lo) = match relation {
                crate::degrees::Comparison::Above | crate::degrees::Comparison::Equivalent => {
                    (*left, *right)
                }
                crate::degrees::Comparison::Below => (*right, *left),
                crate::degrees::Comparison::Incomparable => {
                    return Err(CertifyError::ChainNotRealizable(format!(
                        "{left} and {right} are incomparable"
                    )))
                }
            };
            let transduction = match (hi, lo) {
                (OneT(a), OneT(b)) if a == b => {
                    identity_certificate(StreamSpec::new(one_t_poly(a))?)?
                }
                (OneT(a), OneT(b)) => divisibility_certificate(a, b / a)?,
                (OneT(a), Zero) => constant_collapse_certificate(one_t_poly(a))?,
                (Bottom3, Zero) => constant_collapse_certificate(bottom_representative())?,
                (Zero, Zero) => identity_certificate(StreamSpec::new(Poly::zero())?)?,
                (Bottom3, Bottom3) => {
                    identity_certificate(StreamSpec::new(bottom_representative())?)?
                }
                (OneT(_), Bottom3) => {
                    return Err(CertifyError::ChainNotRealizable(
                        "reaching the bottom degree from a 1-transform needs a caller-supplied \
                         perturbed base; only the algebraic ordering fact is available"
                            .into(),
                    ))
                }
                (pair_hi, pair_lo) => {
                    return Err(CertifyError::ChainNotRealizable(format!(
                        "no weight chain witnesses {pair_hi} >= {pair_lo}"
                    )))
                }
            };
            Certificate::Transduction(transduction)
        }
    };
    let outcome = cert.replay(blocks);
    Ok((cert, outcome))
}
