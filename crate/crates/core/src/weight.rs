//! Weights and weight products.
//!
//! A weight `(a_0, ..., a_{k-1}; b)` acts on a function `f` as the shifted
//! linear combination `b + a_0 f(kn) + ... + a_{k-1} f(kn+k-1)`; a tuple of
//! weights cycles through its members, each consuming its own window of
//! samples. These products are exactly what complete pure sequential
//! transducers can do to polynomial streams, so everything downstream —
//! classification, certificates, FST synthesis — is phrased in terms of
//! them.
//!
//! One bookkeeping convention matters everywhere: the *length* of a weight
//! counts the constant too, so a weight with k entries has length k+1 and
//! the product recursion advances the sample window by length-1 = k. All
//! APIs here speak in entry counts (window sizes); get this off by one and
//! every downstream result is corrupted.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::exact::{Poly, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeightError {
    #[error("weight entries and constant must be nonnegative, got {0}")]
    NegativeEntry(Rat),
    #[error("a weight needs at least one entry")]
    NoEntries,
    #[error("a weight tuple needs at least one weight")]
    EmptyTuple,
    #[error("tuple collapse needs exponent k >= 1, got {0}")]
    InvalidExponent(u32),
}

/// A weight `(a_0, ..., a_{k-1}; b)`: nonnegative rational entries plus a
/// nonnegative rational constant.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WeightRepr", into = "WeightRepr")]
pub struct Weight {
    entries: Vec<Rat>,
    constant: Rat,
}

#[derive(Serialize, Deserialize)]
struct WeightRepr {
    entries: Vec<Rat>,
    constant: Rat,
}

impl TryFrom<WeightRepr> for Weight {
    type Error = WeightError;
    fn try_from(r: WeightRepr) -> Result<Self, Self::Error> {
        Weight::new(r.entries, r.constant)
    }
}

impl From<Weight> for WeightRepr {
    fn from(w: Weight) -> Self {
        WeightRepr {
            entries: w.entries,
            constant: w.constant,
        }
    }
}

impl Weight {
    pub fn new(entries: Vec<Rat>, constant: Rat) -> Result<Self, WeightError> {
        if entries.is_empty() {
            return Err(WeightError::NoEntries);
        }
        if let Some(bad) = entries.iter().chain([&constant]).find(|r| r.is_negative()) {
            return Err(WeightError::NegativeEntry(bad.clone()));
        }
        Ok(Weight { entries, constant })
    }

    /// Integer shorthand: `Weight::from_ints(&[1, 3, 3], 7)`.
    pub fn from_ints(entries: &[i64], constant: i64) -> Self {
        Weight::new(
            entries.iter().map(|&e| Rat::from_int(e)).collect(),
            Rat::from_int(constant),
        )
        .expect("nonnegative integer weight")
    }

    /// The identity weight (1; 0): its product with any f is f itself.
    pub fn identity() -> Self {
        Weight::from_ints(&[1], 0)
    }

    pub fn entries(&self) -> &[Rat] {
        &self.entries
    }

    pub fn constant(&self) -> &Rat {
        &self.constant
    }

    /// Number of entries = samples consumed per product step.
    pub fn window(&self) -> usize {
        self.entries.len()
    }

    /// Count of strictly positive entries (the constant does not count):
    /// the m that makes the product of this weight an m-transform.
    pub fn m_degree(&self) -> usize {
        self.entries.iter().filter(|e| e.is_positive()).count()
    }

    /// Positions of the strictly positive entries, ascending.
    pub fn positive_positions(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_positive())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_constant(&self) -> bool {
        self.m_degree() == 0
    }

    /// The head sum `a_0 f(0) + a_1 f(1) + ... + a_{k-1} f(k-1) + b`.
    pub fn dot(&self, f: &Poly) -> Rat {
        let mut acc = self.constant.clone();
        for (i, a) in self.entries.iter().enumerate() {
            if !a.is_zero() {
                acc += a * &f.eval_int(i as i64);
            }
        }
        acc
    }

    /// Least common multiple of every denominator: multiplying through by
    /// this makes the weight integral without changing the degree of any
    /// product.
    pub fn denominator_lcm(&self) -> BigInt {
        self.entries
            .iter()
            .chain([&self.constant])
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
    }

    pub fn scaled(&self, s: &Rat) -> Weight {
        Weight {
            entries: self.entries.iter().map(|e| e * s).collect(),
            constant: &self.constant * s,
        }
    }

    /// (scaled-to-integers weight, scale).
    pub fn naturalized(&self) -> (Weight, BigInt) {
        let scale = self.denominator_lcm();
        (self.scaled(&Rat::from_bigint(scale.clone())), scale)
    }

    /// Integer entries and constant, when the weight is integral.
    pub fn integer_parts(&self) -> Option<(Vec<BigInt>, BigInt)> {
        let mut out = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            out.push(e.to_integer()?);
        }
        Some((out, self.constant.to_integer()?))
    }
}

impl std::fmt::Display for Weight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ";{})", self.constant)
    }
}

impl std::fmt::Debug for Weight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

/// Closed form of the product with a single weight:
/// `g(n) = b + sum_i a_i f(kn + i)` where k is the window size.
pub fn single_product_poly(alpha: &Weight, f: &Poly) -> Poly {
    let k = Rat::from_int(alpha.window() as i64);
    let mut acc = Poly::constant(alpha.constant().clone());
    for (i, a) in alpha.entries().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let sampled = f.affine(&k, &Rat::from_int(i as i64));
        acc = &acc + &sampled.scale(a);
    }
    acc
}

/// Weight composition: the single weight realizing "apply `inner`, then
/// `outer`". With inner = (a_0..a_{k-1}; b) and outer = (b_0..b_{l-1}; c)
/// the result has k*l entries, entry b_j * a_i at position k*j + i, and
/// constant c + b * sum_j b_j.
pub fn compose_single(outer: &Weight, inner: &Weight) -> Weight {
    let k = inner.window();
    let l = outer.window();
    let mut entries = vec![Rat::zero(); k * l];
    for (j, bj) in outer.entries().iter().enumerate() {
        for (i, ai) in inner.entries().iter().enumerate() {
            entries[k * j + i] = bj * ai;
        }
    }
    let outer_sum: Rat = outer.entries().iter().cloned().sum();
    let constant = outer.constant() + &(inner.constant() * &outer_sum);
    Weight { entries, constant }
}

/// A nonempty cyclic tuple of weights.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TupleRepr", into = "TupleRepr")]
pub struct WeightTuple {
    weights: Vec<Weight>,
}

#[derive(Serialize, Deserialize)]
struct TupleRepr {
    weights: Vec<Weight>,
}

impl TryFrom<TupleRepr> for WeightTuple {
    type Error = WeightError;
    fn try_from(r: TupleRepr) -> Result<Self, Self::Error> {
        WeightTuple::new(r.weights)
    }
}

impl From<WeightTuple> for TupleRepr {
    fn from(t: WeightTuple) -> Self {
        TupleRepr { weights: t.weights }
    }
}

impl std::fmt::Debug for WeightTuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(&self.weights).finish()
    }
}

/// Result of asking whether a tuple product is a polynomial: either the
/// glued polynomial, or the per-residue polynomials that refused to glue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TupleProduct {
    Poly(Poly),
    NotPolynomial { residues: Vec<Poly> },
}

impl WeightTuple {
    pub fn new(weights: Vec<Weight>) -> Result<Self, WeightError> {
        if weights.is_empty() {
            return Err(WeightError::EmptyTuple);
        }
        Ok(WeightTuple { weights })
    }

    pub fn single(w: Weight) -> Self {
        WeightTuple { weights: vec![w] }
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sample span of one full cycle: the sum of all window sizes.
    pub fn span(&self) -> usize {
        self.weights.iter().map(Weight::window).sum()
    }

    /// First count values of the product with f, by the literal recursion:
    /// step n uses weight n mod m and advances the sample window by that
    /// weight's size.
    pub fn product_values(&self, f: &Poly, count: usize) -> Vec<Rat> {
        let mut out = Vec::with_capacity(count);
        let mut offset: i64 = 0;
        for n in 0..count {
            let w = &self.weights[n % self.weights.len()];
            let mut acc = w.constant().clone();
            for (i, a) in w.entries().iter().enumerate() {
                if !a.is_zero() {
                    acc += a * &f.eval_int(offset + i as i64);
                }
            }
            out.push(acc);
            offset += w.window() as i64;
        }
        out
    }

    /// For each residue r mod m the subsequence of product values is a
    /// polynomial in the quotient; this computes all m of them exactly.
    /// residue r's polynomial g_r satisfies (tuple x f)(mq + r) = g_r(q).
    pub fn residue_polys(&self, f: &Poly) -> Vec<Poly> {
        let m = self.weights.len() as i64;
        let span = Rat::from_int(self.span() as i64);
        let mut offset = Rat::zero();
        self.weights
            .iter()
            .map(|w| {
                // window for step mq + r starts at span*q + offset
                let mut acc = Poly::constant(w.constant().clone());
                for (i, a) in w.entries().iter().enumerate() {
                    if !a.is_zero() {
                        let at = f.affine(&span, &(&offset + &Rat::from_int(i as i64)));
                        acc = &acc + &at.scale(a);
                    }
                }
                offset += Rat::from_int(w.window() as i64);
                let _ = m;
                acc
            })
            .collect()
    }

    /// The product polynomial, when the residue polynomials glue into one:
    /// interpolates the candidate from residue 0 and checks every other
    /// residue against it.
    pub fn product_poly(&self, f: &Poly) -> TupleProduct {
        let residues = self.residue_polys(f);
        let m = self.weights.len() as i64;
        // candidate g with g(mq + 0) = residues[0](q)
        let candidate = residues[0].affine(&Rat::ratio(1, m), &Rat::zero());
        let glues = residues.iter().enumerate().all(|(r, pr)| {
            candidate.affine(&Rat::from_int(m), &Rat::from_int(r as i64)) == *pr
        });
        if glues {
            TupleProduct::Poly(candidate)
        } else {
            TupleProduct::NotPolynomial { residues }
        }
    }

    /// Scale every weight by the least positive integer making the whole
    /// tuple integral; returns (scaled tuple, scale).
    pub fn naturalized(&self) -> (WeightTuple, BigInt) {
        let scale = self
            .weights
            .iter()
            .fold(BigInt::one(), |acc, w| acc.lcm(&w.denominator_lcm()));
        let s = Rat::from_bigint(scale.clone());
        let weights = self.weights.iter().map(|w| w.scaled(&s)).collect();
        (WeightTuple { weights }, scale)
    }

    /// Rotation placing (the first occurrence of) the shortest weight
    /// first; returns the rotated tuple and the rotation amount. Rotating
    /// a tuple only shifts the product sequence, so degrees survive.
    pub fn rotated_shortest_first(&self) -> (WeightTuple, usize) {
        let r = self
            .weights
            .iter()
            .enumerate()
            .min_by_key(|(i, w)| (w.window(), *i))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let mut weights = self.weights.clone();
        weights.rotate_left(r);
        (WeightTuple { weights }, r)
    }

    /// Single weight agreeing with this tuple's product of n^k on every
    /// index divisible by m (the tuple length). The tuple is first rotated
    /// shortest-weight-first so the collapsed entries fit inside one span;
    /// the contract therefore reads:
    ///
    ///   (beta x n^k)(n) = (rotated tuple x n^k)(n)  for all n = 0 mod m,
    ///
    /// and holds at every n whenever the tuple product is a polynomial.
    /// beta has span-many entries: entry a_i / m^k at position i*m for each
    /// entry a_i of the (rotated) first weight, and that weight's constant.
    pub fn collapse_to_single(&self, k: u32) -> Result<Weight, WeightError> {
        if k < 1 {
            return Err(WeightError::InvalidExponent(k));
        }
        let (rotated, _) = self.rotated_shortest_first();
        let m = rotated.weights.len();
        let span = rotated.span();
        let head = &rotated.weights[0];
        let mk = Rat::from_int(m as i64).pow(k);
        let mut entries = vec![Rat::zero(); span];
        for (i, a) in head.entries().iter().enumerate() {
            entries[i * m] = a / &mk;
        }
        Ok(Weight {
            entries,
            constant: head.constant().clone(),
        })
    }
}
