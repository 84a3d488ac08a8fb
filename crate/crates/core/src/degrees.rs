//! Classification and comparison of the degrees below the cube.
//!
//! Every degree below the cube's is the degree of an m-transform of some
//! shift of n^3. Transforms with two or more positive entries all collapse
//! into a single bottom degree; transforms with exactly one positive entry
//! survive, reduce to a canonical representative `(an+1)^3`, and order
//! themselves by divisibility of a. Below everything sits the degree of
//! the ultimately periodic streams. This module computes that picture and
//! produces a replayable certificate for each claim.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::exact::{multiplicative_order, Poly, Rat};
use crate::weight::{single_product_poly, Weight, WeightTuple};

/// A degree below (or equal to) the cube's, in canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "degree", content = "a", rename_all = "snake_case")]
pub enum CanonicalDegree {
    /// Ultimately periodic streams: the global bottom.
    Zero,
    /// The common degree of every transform with two or more positive
    /// entries: the bottom degree for cubics.
    Bottom3,
    /// The degree of `(an+1)^3`. `OneT(1)` is the cube itself, the top of
    /// the studied fragment.
    OneT(u64),
}

impl std::fmt::Display for CanonicalDegree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CanonicalDegree::Zero => write!(f, "Zero"),
            CanonicalDegree::Bottom3 => write!(f, "Bottom3"),
            CanonicalDegree::OneT(a) => write!(f, "OneT({a})"),
        }
    }
}

/// How two degrees relate in the transducibility order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Equivalent,
    Above,
    Below,
    Incomparable,
}

impl std::fmt::Display for Comparison {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Comparison::Equivalent => "equivalent",
            Comparison::Above => "above",
            Comparison::Below => "below",
            Comparison::Incomparable => "incomparable",
        };
        write!(f, "{s}")
    }
}

/// Total comparison on the classified fragment: Zero below everything,
/// Bottom3 between Zero and every 1-transform, and `(an+1)^3` above
/// `(bn+1)^3` exactly when a divides b.
pub fn compare(x: CanonicalDegree, y: CanonicalDegree) -> Comparison {
    use CanonicalDegree::*;
    use Comparison::*;
    match (x, y) {
        (Zero, Zero) | (Bottom3, Bottom3) => Equivalent,
        (Zero, _) => Below,
        (_, Zero) => Above,
        (Bottom3, OneT(_)) => Below,
        (OneT(_), Bottom3) => Above,
        (OneT(a), OneT(b)) => {
            if a == b {
                Equivalent
            } else if b % a == 0 {
                Above
            } else if a % b == 0 {
                Below
            } else {
                Incomparable
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Reduce2Error {
    #[error("positions must satisfy 0 <= r != s < p, got r={r}, s={s}, p={p}")]
    BadPositions { p: u64, r: u64, s: u64 },
    #[error("coefficients must be strictly positive, got {0}")]
    NonPositiveCoefficient(Rat),
}

/// Which case of the 2-transform reduction applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduce2Case {
    /// r > 0: the emitted 3-transform sits over n^3 itself.
    RPositive,
    /// r = 0: the emitted 3-transform sits over (n-k)^3.
    RZero,
}

/// Replayable witness that `a(pn+r)^3 + b(pn+s)^3` equals a 3-transform up
/// to a constant: the solved coefficients, the positions they land on, and
/// the constant mismatch. The identity
///
///   a(pn+r)^3 + b(pn+s)^3
///     = sum of c_i (period n + i + base_shift)^3 + constant_delta
///
/// holds exactly in all four coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduce2Certificate {
    pub a: Rat,
    pub b: Rat,
    pub p: u64,
    pub r: u64,
    pub s: u64,
    pub d: Rat,
    pub j: u64,
    pub k: u64,
    pub a1: Rat,
    pub a2: Rat,
    pub a3: Rat,
    pub case: Reduce2Case,
    pub period: u64,
    pub base_shift: i64,
    /// (position, coefficient) pairs of the emitted 3-transform.
    pub positions: Vec<(u64, Rat)>,
    /// Constant term of (left side - right side).
    pub constant_delta: Rat,
}

/// The three solved coefficients of `n^3 + d(n+j)^3 = a1 (kn+jk-1)^3
/// + a2 (kn-k+1)^3 + a3 (kn)^3` (matching in the n^3, n^2, n terms).
pub fn reduce2_coefficients(d: &Rat, j: u64, k: u64) -> (Rat, Rat, Rat) {
    let jk = Rat::from_int((j * k) as i64);
    let kk = Rat::from_int(k as i64);
    let jr = Rat::from_int(j as i64);
    let one = Rat::one();

    // jk - 1, jk + k - 1, jk + k - 2, k - 1
    let jk1 = &jk - &one;
    let jkk1 = &(&jk + &kk) - &one;
    let jkk2 = &(&jk + &kk) - &Rat::from_int(2);
    let k1 = &kk - &one;
    let k2 = &kk * &kk;
    let k3 = &k2 * &kk;

    let a1 = &(&(d * &jr) * &jkk1) / &(&(&k2 * &jk1) * &jkk2);
    let a2 = &(d * &jr) / &(&(&k2 * &k1) * &jkk2);
    let a3 = &(&one - &(&(d * &jkk1) / &(&k1 * &jk1))) / &k3;
    (a1, a2, a3)
}

/// Least k >= 2 making all three reduction coefficients strictly positive
/// for the given d > 0 and j >= 1. Terminates because the only sign
/// constraint, (k-1)(jk-1) > d(jk+k-1), is quadratic-versus-linear in k.
pub fn min_k_positive(d: &Rat, j: u64) -> u64 {
    assert!(d.is_positive(), "d must be positive");
    assert!(j >= 1, "j must be at least 1");
    let mut k = 2u64;
    loop {
        let (a1, a2, a3) = reduce2_coefficients(d, j, k);
        if a1.is_positive() && a2.is_positive() && a3.is_positive() {
            return k;
        }
        k += 1;
    }
}

/// Reduction of the 2-transform `a(pn+r)^3 + b(pn+s)^3` to a 3-transform.
/// The positions may arrive in either order; they are swapped (with their
/// coefficients) so that r < s.
pub fn reduce_2transform(
    a: &Rat,
    b: &Rat,
    p: u64,
    r: u64,
    s: u64,
) -> Result<Reduce2Certificate, Reduce2Error> {
    for c in [a, b] {
        if !c.is_positive() {
            return Err(Reduce2Error::NonPositiveCoefficient(c.clone()));
        }
    }
    if r == s || r >= p || s >= p {
        return Err(Reduce2Error::BadPositions { p, r, s });
    }
    let (a, b, r, s) = if r < s {
        (a.clone(), b.clone(), r, s)
    } else {
        (b.clone(), a.clone(), s, r)
    };

    let d = &b / &a;
    let j = s - r;
    let k = min_k_positive(&d, j);
    let (a1, a2, a3) = reduce2_coefficients(&d, j, k);

    let (case, base_shift, positions) = if r > 0 {
        (
            Reduce2Case::RPositive,
            0i64,
            vec![
                (s * k - 1, &a * &a1),
                ((r - 1) * k + 1, &a * &a2),
                (r * k, &a * &a3),
            ],
        )
    } else {
        (
            Reduce2Case::RZero,
            -(k as i64),
            vec![
                ((s + 1) * k - 1, &a * &a1),
                (1, &a * &a2),
                (k, &a * &a3),
            ],
        )
    };

    // constant term of (base LHS - base RHS), then scaled by a: the
    // substitutions n -> n+r, n -> pn leave the constant residual intact
    let jk1 = Rat::from_int((j * k) as i64) - Rat::one();
    let k1neg = Rat::one() - Rat::from_int(k as i64); // 1 - k
    let base_delta = &(&d * &Rat::from_int(j as i64).pow(3))
        - &(&(&a1 * &jk1.pow(3)) + &(&a2 * &k1neg.pow(3)));
    let constant_delta = &a * &base_delta;

    Ok(Reduce2Certificate {
        a,
        b,
        p,
        r,
        s,
        d,
        j,
        k,
        a1,
        a2,
        a3,
        case,
        period: p * k,
        base_shift,
        positions,
        constant_delta,
    })
}

impl Reduce2Certificate {
    /// The 2-transform polynomial a(pn+r)^3 + b(pn+s)^3.
    pub fn left_poly(&self) -> Poly {
        let term = |coef: &Rat, pos: u64| {
            Poly::from_ints(&[pos as i64, self.p as i64]).pow(3).scale(coef)
        };
        &term(&self.a, self.r) + &term(&self.b, self.s)
    }

    /// The emitted 3-transform polynomial, before adding constant_delta.
    pub fn right_poly(&self) -> Poly {
        let mut acc = Poly::zero();
        for (pos, c) in &self.positions {
            let base = Poly::from_ints(&[*pos as i64 + self.base_shift, self.period as i64]);
            acc = &acc + &base.pow(3).scale(c);
        }
        acc
    }

    /// Re-derives everything and checks the full polynomial identity, the
    /// positivity of the emitted coefficients, the minimality of k, and
    /// the case-appropriate positions. Returns the first complaint.
    pub fn replay(&self) -> Result<(), String> {
        let fresh = reduce_2transform(&self.a, &self.b, self.p, self.r, self.s)
            .map_err(|e| e.to_string())?;
        if fresh != *self {
            return Err("certificate fields do not match re-derivation".into());
        }
        if !(self.a1.is_positive() && self.a2.is_positive() && self.a3.is_positive()) {
            return Err("reduction coefficients are not all positive".into());
        }
        let lhs = self.left_poly();
        let rhs = &self.right_poly() + &Poly::constant(self.constant_delta.clone());
        if lhs != rhs {
            return Err(format!("identity fails: {lhs} != {rhs}"));
        }
        Ok(())
    }
}

/// Order step of a canonicalization: with a and b coprime, the least i
/// with b^i = 1 (mod a) and the witness m with a*m + 1 = b^i.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderStep {
    pub i: u64,
    /// a*m + 1 = b^i; can be large, so serialized as a string.
    #[serde(with = "bigint_string")]
    pub m: BigInt,
}

pub(crate) mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Replayable witness that `(an+b)^3` canonicalizes to `(a'n+1)^3`:
/// the shift reducing b below a, the gcd division, and (when the reduced
/// offset exceeds 1) the multiplicative-order construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonCertificate {
    pub a: u64,
    pub b: u64,
    /// b = shift_q * a + b_mod.
    pub shift_q: u64,
    pub b_mod: u64,
    pub gcd: u64,
    pub reduced_a: u64,
    pub reduced_b: u64,
    pub order: Option<OrderStep>,
    pub canonical: u64,
    /// Human-readable equivalence chain, one entry per applied step.
    pub chain: Vec<String>,
}

/// Canonical representative of the 1-transform `(an+b)^3`: reduce b mod a,
/// divide out the gcd, and (for offsets other than 0 and 1) apply the
/// multiplicative-order argument. The canonical value is a / gcd(a, b).
pub fn canonicalize_1transform(a: u64, b: u64) -> (u64, CanonCertificate) {
    assert!(a >= 1, "period must be positive");
    let shift_q = b / a;
    let b_mod = b % a;
    let mut chain = Vec::new();
    if shift_q > 0 {
        chain.push(format!(
            "shift: ({a}n+{b})^3 = ({a}(n+{shift_q})+{b_mod})^3, drop {shift_q} leading blocks"
        ));
    }
    let gcd = if b_mod == 0 { a } else { a.gcd(&b_mod) };
    let reduced_a = a / gcd;
    let reduced_b = b_mod / gcd;
    if gcd > 1 {
        let g3 = gcd * gcd * gcd;
        chain.push(format!(
            "scale: ({a}n+{b_mod})^3 = {g3}({reduced_a}n+{reduced_b})^3, scalar factors preserve the degree"
        ));
    }
    let (canonical, order) = match reduced_b {
        0 => {
            // gcd(a, 0) = a, so this is (1n+0)^3 = n^3 already
            chain.push("offset 0: (n+0)^3 = n^3, canonical 1".into());
            (1, None)
        }
        1 => (reduced_a, None),
        _ => {
            let i = multiplicative_order(reduced_b, reduced_a)
                .expect("reduced pair is coprime by construction");
            let pow = BigInt::from(reduced_b).pow(i as u32);
            let m = (&pow - BigInt::one()) / BigInt::from(reduced_a);
            chain.push(format!(
                "order: {reduced_b}^{i} = {pow} = {reduced_a}*{m}+1, so ({reduced_a}n+{reduced_b})^3 and ({reduced_a}n+1)^3 share a degree"
            ));
            (reduced_a, Some(OrderStep { i, m }))
        }
    };
    let cert = CanonCertificate {
        a,
        b,
        shift_q,
        b_mod,
        gcd,
        reduced_a,
        reduced_b,
        order,
        canonical,
        chain,
    };
    (canonical, cert)
}

impl CanonCertificate {
    /// Re-checks every arithmetic step of the chain.
    pub fn replay(&self) -> Result<(), String> {
        if self.a == 0 {
            return Err("period must be positive".into());
        }
        if self.shift_q != self.b / self.a || self.b_mod != self.b % self.a {
            return Err("shift step does not reduce b mod a".into());
        }
        let g = if self.b_mod == 0 { self.a } else { self.a.gcd(&self.b_mod) };
        if g != self.gcd || self.reduced_a != self.a / g || self.reduced_b != self.b_mod / g {
            return Err("gcd step is inconsistent".into());
        }
        match (&self.order, self.reduced_b) {
            (None, 0) => {
                if self.canonical != 1 {
                    return Err("offset 0 must canonicalize to 1".into());
                }
            }
            (None, 1) => {
                if self.canonical != self.reduced_a {
                    return Err("offset 1 is already canonical".into());
                }
            }
            (Some(step), rb) if rb >= 2 => {
                let expected = multiplicative_order(rb, self.reduced_a)
                    .map_err(|e| e.to_string())?;
                if step.i != expected {
                    return Err(format!("order {} is not minimal ({expected})", step.i));
                }
                let pow = BigInt::from(rb).pow(step.i as u32);
                if BigInt::from(self.reduced_a) * &step.m + BigInt::one() != pow {
                    return Err("order witness m does not satisfy a*m+1 = b^i".into());
                }
                if self.canonical != self.reduced_a {
                    return Err("canonical value must be the reduced period".into());
                }
            }
            _ => return Err("order step present/absent inconsistently".into()),
        }
        Ok(())
    }
}

/// Why a weight classified where it did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum DegreeWitness {
    /// No positive entries: the product is the constant stream.
    Constant { value: Rat },
    /// Exactly one positive entry: the product is a scaled, shifted cube.
    OneTransform {
        position: usize,
        coefficient: Rat,
        period: u64,
        /// (position + shift) mod period: the offset fed to canonicalization.
        residue: u64,
        canon: CanonCertificate,
    },
    /// Exactly two positive entries: reduced to a 3-transform.
    TwoTransform {
        /// The positions after adding the shift and normalizing mod p.
        mapped_r: u64,
        mapped_s: u64,
        reduce2: Reduce2Certificate,
    },
    /// Three or more positive entries: an m-transform, bottom by itself.
    MTransform { m: usize, support: Vec<usize> },
}

/// A classification result: the canonical degree, the product polynomial
/// the weight actually denotes over `(n+t)^3`, and the case witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub degree: CanonicalDegree,
    pub product: Poly,
    pub witness: DegreeWitness,
}

fn rem_euclid_u64(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

/// Classifies the product of a single weight with `(n+t)^3`. Total: every
/// nonnegative weight lands in exactly one canonical degree.
pub fn classify(alpha: &Weight, t: i64) -> Classification {
    let base = Poly::linear_cubed(1, t);
    let product = single_product_poly(alpha, &base);
    let positives = alpha.positive_positions();
    let p = alpha.window() as u64;

    match positives.len() {
        0 => Classification {
            degree: CanonicalDegree::Zero,
            product,
            witness: DegreeWitness::Constant {
                value: alpha.constant().clone(),
            },
        },
        1 => {
            let position = positives[0];
            let residue = rem_euclid_u64(position as i64 + t, p);
            let (canonical, canon) = canonicalize_1transform(p, residue);
            Classification {
                degree: CanonicalDegree::OneT(canonical),
                product,
                witness: DegreeWitness::OneTransform {
                    position,
                    coefficient: alpha.entries()[position].clone(),
                    period: p,
                    residue,
                    canon,
                },
            }
        }
        2 => {
            let (pos_r, pos_s) = (positives[0], positives[1]);
            let coef_r = alpha.entries()[pos_r].clone();
            let coef_s = alpha.entries()[pos_s].clone();
            let mapped_r = rem_euclid_u64(pos_r as i64 + t, p);
            let mapped_s = rem_euclid_u64(pos_s as i64 + t, p);
            let reduce2 = reduce_2transform(&coef_r, &coef_s, p, mapped_r, mapped_s)
                .expect("distinct in-range positions with positive coefficients");
            Classification {
                degree: CanonicalDegree::Bottom3,
                product,
                witness: DegreeWitness::TwoTransform {
                    mapped_r,
                    mapped_s,
                    reduce2,
                },
            }
        }
        m => Classification {
            degree: CanonicalDegree::Bottom3,
            product,
            witness: DegreeWitness::MTransform {
                m,
                support: positives[..3].to_vec(),
            },
        },
    }
}

/// Outcome of classifying a tuple of weights over the cube.
#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum TupleClassification {
    /// The tuple product is a polynomial and the collapsed single weight
    /// reproduces it exactly, so the single-weight classification applies.
    Classified {
        beta: Weight,
        classification: Classification,
    },
    /// The residue polynomials do not glue: the product is not a
    /// polynomial and no degree semantics is defined for it.
    NotPolynomial { residues: Vec<Poly> },
    /// The product is a polynomial but the collapse only matches it on the
    /// indices divisible by the tuple length; rotating the tuple so its
    /// shortest weight comes first (a degree-preserving shift) makes the
    /// two agree.
    CollapseMismatch { beta: Weight, product: Poly },
}

/// Classifies a tuple of weights over n^3 (shift 0 only). Refuses unless
/// the tuple product is a polynomial reproduced exactly by the collapsed
/// single weight; every accepted answer is verified before it is returned.
pub fn classify_tuple(tuple: &WeightTuple) -> TupleClassification {
    let cube = Poly::monomial(3);
    let product = match tuple.product_poly(&cube) {
        crate::weight::TupleProduct::Poly(p) => p,
        crate::weight::TupleProduct::NotPolynomial { residues } => {
            return TupleClassification::NotPolynomial { residues }
        }
    };
    let beta = tuple
        .collapse_to_single(3)
        .expect("exponent 3 is valid");
    if single_product_poly(&beta, &cube) != product {
        return TupleClassification::CollapseMismatch { beta, product };
    }
    TupleClassification::Classified {
        classification: classify(&beta, 0),
        beta,
    }
}

/// The divisibility lattice of canonical 1-transforms up to N, plus the
/// two degrees below it. Hasse edges run downward in the degree order:
/// a -> a*q for prime q.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub max: u64,
    /// Hasse edges (a, a*q) of the divisibility order, a*q <= max.
    pub edges: Vec<(u64, u64)>,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn divisor_lattice(max: u64) -> Lattice {
    assert!(max >= 1);
    let primes: Vec<u64> = (2..=max).filter(|&q| is_prime(q)).collect();
    let mut edges = Vec::new();
    for a in 1..=max {
        for &q in &primes {
            match a.checked_mul(q) {
                Some(aq) if aq <= max => edges.push((a, aq)),
                _ => {}
            }
        }
    }
    edges.sort_unstable();
    Lattice { max, edges }
}

impl Lattice {
    fn node_label(a: u64) -> String {
        if a == 1 {
            "n^3".to_string()
        } else {
            format!("({a}n+1)^3")
        }
    }

    /// DOT rendering: solid edges are Hasse covers of the divisibility
    /// order; the dashed edges to "bottom" and "0" are schematic, since
    /// the bottom degree is below every 1-transform but covered by none
    /// of them in the infinite lattice.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        out.push_str("digraph degrees {\n");
        out.push_str("  // transducer degrees below the cube, edges point downward\n");
        out.push_str("  // solid: (an+1)^3 covers (aqn+1)^3 for prime q\n");
        out.push_str("  // dashed: schematic; \"bottom\" lies below every (an+1)^3\n");
        out.push_str("  //         and \"0\" (ultimately periodic) below bottom\n");
        out.push_str("  rankdir=TB;\n");
        for a in 1..=self.max {
            out.push_str(&format!("  one{a} [label=\"{}\"];\n", Self::node_label(a)));
        }
        out.push_str("  bottom [label=\"bottom\"];\n");
        out.push_str("  zero [label=\"0\"];\n");
        for (a, b) in &self.edges {
            out.push_str(&format!("  one{a} -> one{b};\n"));
        }
        out.push_str("  one1 -> bottom [style=dashed];\n");
        out.push_str("  bottom -> zero [style=dashed];\n");
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let nodes: Vec<serde_json::Value> = (1..=self.max)
            .map(|a| {
                serde_json::json!({
                    "id": format!("one{a}"),
                    "label": Self::node_label(a),
                    "a": a,
                })
            })
            .chain([
                serde_json::json!({"id": "bottom", "label": "bottom"}),
                serde_json::json!({"id": "zero", "label": "0"}),
            ])
            .collect();
        let edges: Vec<serde_json::Value> = self
            .edges
            .iter()
            .map(|(a, b)| serde_json::json!({"from": format!("one{a}"), "to": format!("one{b}")}))
            .collect();
        serde_json::json!({
            "max": self.max,
            "nodes": nodes,
            "edges": edges,
            "meta_edges": [
                {"from": "every one<a>", "to": "bottom",
                 "note": "bottom is below every 1-transform degree, covered by none"},
                {"from": "bottom", "to": "zero"},
            ],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compare_examples() {
        use CanonicalDegree::*;
        use Comparison::*;
        assert_eq!(compare(OneT(2), OneT(6)), Above);
        assert_eq!(compare(OneT(4), OneT(6)), Incomparable);
        assert_eq!(compare(Bottom3, OneT(7)), Below);
        assert_eq!(compare(OneT(1), Bottom3), Above);
        assert_eq!(compare(Zero, Bottom3), Below);
        assert_eq!(compare(OneT(5), OneT(5)), Equivalent);
        assert_eq!(compare(Zero, Zero), Equivalent);
    }

    #[test]
    fn min_k_examples() {
        assert_eq!(min_k_positive(&Rat::one(), 1), 4);
        assert_eq!(min_k_positive(&Rat::ratio(1, 8), 1), 2);
    }

    #[test]
    fn min_k_matches_inequality_scan() {
        // oracle: a1, a2 are positive for every k >= 2, so the binding
        // constraint is a3 > 0, i.e. (k-1)(jk-1) > d(jk+k-1)
        let scan = |d: &Rat, j: u64| -> u64 {
            let mut k = 2u64;
            loop {
                let lhs = Rat::from_int((k - 1) as i64) * Rat::from_int((j * k - 1) as i64);
                let rhs = d * &Rat::from_int((j * k + k - 1) as i64);
                if lhs > rhs {
                    return k;
                }
                k += 1;
            }
        };
        for (num, den, j) in [
            (1i64, 1i64, 1u64),
            (1, 8, 1),
            (100, 1, 1),
            (3, 2, 2),
            (7, 1, 3),
            (1, 100, 6),
        ] {
            let d = Rat::ratio(num, den);
            assert_eq!(min_k_positive(&d, j), scan(&d, j), "d={d}, j={j}");
        }
        // large-d instance, frozen from the oracle scan
        assert_eq!(min_k_positive(&Rat::from_int(100), 1), 202);
    }

    #[test]
    fn reduce2_worked_instance() {
        // a=b=1, p=2, r=0, s=1: d=1, j=1, k=4
        let one = Rat::one();
        let cert = reduce_2transform(&one, &one, 2, 0, 1).unwrap();
        assert_eq!(cert.k, 4);
        assert_eq!(cert.a1, Rat::ratio(7, 288));
        assert_eq!(cert.a2, Rat::ratio(1, 288));
        assert_eq!(cert.a3, Rat::ratio(1, 288));
        assert_eq!(cert.case, Reduce2Case::RZero);
        assert_eq!(cert.period, 8);
        assert_eq!(cert.base_shift, -4);
        let positions: Vec<u64> = cert.positions.iter().map(|(p, _)| *p).collect();
        assert_eq!(positions, vec![7, 1, 4]);
        assert_eq!(cert.constant_delta, Rat::ratio(7, 16));
        cert.replay().unwrap();
    }

    #[test]
    fn reduce2_interior_instance() {
        let one = Rat::one();
        let cert = reduce_2transform(&one, &one, 3, 1, 2).unwrap();
        assert_eq!(cert.k, 4);
        assert_eq!(cert.case, Reduce2Case::RPositive);
        assert_eq!(cert.period, 12);
        assert_eq!(cert.base_shift, 0);
        let positions: Vec<u64> = cert.positions.iter().map(|(p, _)| *p).collect();
        assert_eq!(positions, vec![7, 1, 4]);
        cert.replay().unwrap();
    }

    #[test]
    fn reduce2_rejects_degenerate_positions() {
        let one = Rat::one();
        assert!(matches!(
            reduce_2transform(&one, &one, 2, 1, 1),
            Err(Reduce2Error::BadPositions { .. })
        ));
        assert!(matches!(
            reduce_2transform(&one, &one, 2, 0, 2),
            Err(Reduce2Error::BadPositions { .. })
        ));
        assert!(matches!(
            reduce_2transform(&Rat::zero(), &one, 2, 0, 1),
            Err(Reduce2Error::NonPositiveCoefficient(_))
        ));
    }

    #[test]
    fn reduce2_swaps_to_order_positions() {
        let a = Rat::from_int(2);
        let b = Rat::from_int(3);
        let swapped = reduce_2transform(&a, &b, 5, 3, 1).unwrap();
        let direct = reduce_2transform(&b, &a, 5, 1, 3).unwrap();
        assert_eq!(swapped, direct);
        assert_eq!(swapped.r, 1);
        assert_eq!(swapped.s, 3);
        assert_eq!(swapped.a, b);
    }

    #[test]
    fn canonicalize_examples() {
        let (c, cert) = canonicalize_1transform(4, 2);
        assert_eq!(c, 2);
        assert_eq!(cert.gcd, 2);
        cert.replay().unwrap();

        let (c, cert) = canonicalize_1transform(7, 3);
        assert_eq!(c, 7);
        let step = cert.order.as_ref().unwrap();
        assert_eq!(step.i, 6);
        assert_eq!(step.m, BigInt::from(104));
        cert.replay().unwrap();

        let (c, cert) = canonicalize_1transform(9, 0);
        assert_eq!(c, 1);
        cert.replay().unwrap();

        let (c, cert) = canonicalize_1transform(6, 1);
        assert_eq!(c, 6);
        assert!(cert.order.is_none());
        assert!(cert.chain.is_empty());
        cert.replay().unwrap();

        // b >= a first reduces mod a
        let (c, cert) = canonicalize_1transform(4, 10);
        assert_eq!(c, 2);
        assert_eq!(cert.shift_q, 2);
        assert_eq!(cert.b_mod, 2);
        cert.replay().unwrap();
    }

    #[test]
    fn canonicalize_idempotent() {
        for a in 1..=12u64 {
            for b in 0..a {
                let (c, _) = canonicalize_1transform(a, b);
                let (c2, _) = canonicalize_1transform(c, 1);
                assert_eq!(c, c2);
            }
        }
    }

    #[test]
    fn classify_examples() {
        let odd = Weight::from_ints(&[0, 1], 0);
        let c = classify(&odd, 0);
        assert_eq!(c.degree, CanonicalDegree::OneT(2));
        assert_eq!(c.product, Poly::linear_cubed(2, 1));

        let toe = Weight::from_ints(&[1, 3, 3], 7);
        assert_eq!(classify(&toe, 0).degree, CanonicalDegree::Bottom3);

        let halfcube = Weight::from_ints(&[1, 0], 0);
        let at0 = classify(&halfcube, 0);
        assert_eq!(at0.degree, CanonicalDegree::OneT(1));
        assert_eq!(at0.product, Poly::from_ints(&[0, 0, 0, 8]));
        let at1 = classify(&halfcube, 1);
        assert_eq!(at1.degree, CanonicalDegree::OneT(2));
        assert_eq!(at1.product, Poly::linear_cubed(2, 1));

        let flat = Weight::from_ints(&[0, 0, 0], 5);
        let c = classify(&flat, 0);
        assert_eq!(c.degree, CanonicalDegree::Zero);
        assert_eq!(c.product, Poly::from_ints(&[5]));
    }

    #[test]
    fn classify_two_transform_normalizes_positions() {
        // positions 0 and 1 on period 2, shifted by 1: residues 1 and 0
        let pair = Weight::from_ints(&[1, 1], 0);
        let c = classify(&pair, 1);
        assert_eq!(c.degree, CanonicalDegree::Bottom3);
        match &c.witness {
            DegreeWitness::TwoTransform {
                mapped_r,
                mapped_s,
                reduce2,
            } => {
                assert_eq!((*mapped_r, *mapped_s), (1, 0));
                // the reduction re-sorts them
                assert_eq!((reduce2.r, reduce2.s), (0, 1));
                reduce2.replay().unwrap();
            }
            other => panic!("expected TwoTransform, got {other:?}"),
        }
    }

    #[test]
    fn classify_negative_shift() {
        let odd = Weight::from_ints(&[0, 1], 0);
        // position 1 + shift -3 = -2, residue 0 mod 2: the even sampler
        let c = classify(&odd, -3);
        assert_eq!(c.degree, CanonicalDegree::OneT(1));
    }

    #[test]
    fn classify_tuple_accepts_polynomial_products() {
        use crate::weight::WeightTuple;
        let twin = WeightTuple::new(vec![
            Weight::from_ints(&[1], 0),
            Weight::from_ints(&[1], 0),
        ])
        .unwrap();
        match classify_tuple(&twin) {
            TupleClassification::Classified { classification, .. } => {
                assert_eq!(classification.degree, CanonicalDegree::OneT(1));
                assert_eq!(classification.product, Poly::monomial(3));
            }
            other => panic!("expected Classified, got {other:?}"),
        }

        let single = WeightTuple::single(Weight::from_ints(&[0, 1], 0));
        match classify_tuple(&single) {
            TupleClassification::Classified { classification, .. } => {
                assert_eq!(classification.degree, CanonicalDegree::OneT(2));
            }
            other => panic!("expected Classified, got {other:?}"),
        }
    }

    #[test]
    fn classify_tuple_refuses_non_polynomial_products() {
        use crate::weight::WeightTuple;
        let skewed = WeightTuple::new(vec![
            Weight::from_ints(&[1], 0),
            Weight::from_ints(&[2], 0),
        ])
        .unwrap();
        assert!(matches!(
            classify_tuple(&skewed),
            TupleClassification::NotPolynomial { .. }
        ));
    }

    #[test]
    fn lattice_examples() {
        let l = divisor_lattice(6);
        assert_eq!(l.edges, vec![(1, 2), (1, 3), (1, 5), (2, 4), (2, 6), (3, 6)]);

        let l1 = divisor_lattice(1);
        assert!(l1.edges.is_empty());

        let l12 = divisor_lattice(12);
        let covers_of_12: Vec<u64> = l12
            .edges
            .iter()
            .filter(|(_, b)| *b == 12)
            .map(|(a, _)| *a)
            .collect();
        assert_eq!(covers_of_12, vec![4, 6]);
    }

    #[test]
    fn lattice_matches_divisor_oracle() {
        // Hasse oracle: edge a -> b iff a | b, a != b, and nothing strictly between
        let max = 24u64;
        let l = divisor_lattice(max);
        let mut oracle = Vec::new();
        for a in 1..=max {
            for b in 1..=max {
                if a != b && b % a == 0 {
                    let between = (1..=max).any(|c| {
                        c != a && c != b && c % a == 0 && b % c == 0
                    });
                    if !between {
                        oracle.push((a, b));
                    }
                }
            }
        }
        oracle.sort_unstable();
        assert_eq!(l.edges, oracle);
    }

    #[test]
    fn dot_output_mentions_every_node_and_edge() {
        let dot = divisor_lattice(6).to_dot();
        for needle in [
            "one1 [label=\"n^3\"]",
            "one2 [label=\"(2n+1)^3\"]",
            "one1 -> one2;",
            "one3 -> one6;",
            "bottom [label=\"bottom\"]",
            "zero [label=\"0\"]",
            "bottom -> zero [style=dashed];",
        ] {
            assert!(dot.contains(needle), "missing {needle:?} in:\n{dot}");
        }
    }

    #[test]
    fn compare_is_a_partial_order_on_the_fragment() {
        use CanonicalDegree::*;
        let mut degrees = vec![Zero, Bottom3];
        degrees.extend((1..=24).map(OneT));
        let leq = |x: CanonicalDegree, y: CanonicalDegree| {
            matches!(compare(x, y), Comparison::Below | Comparison::Equivalent)
        };
        for &x in &degrees {
            assert_eq!(compare(x, x), Comparison::Equivalent);
            for &y in &degrees {
                // antisymmetry
                if leq(x, y) && leq(y, x) {
                    assert_eq!(compare(x, y), Comparison::Equivalent);
                    assert_eq!(x, y);
                }
                // compare is symmetric in the expected way
                let flipped = match compare(x, y) {
                    Comparison::Above => Comparison::Below,
                    Comparison::Below => Comparison::Above,
                    other => other,
                };
                assert_eq!(compare(y, x), flipped);
                for &z in &degrees {
                    if leq(x, y) && leq(y, z) {
                        assert!(leq(x, z), "transitivity fails at {x} <= {y} <= {z}");
                    }
                }
            }
        }
    }
}
