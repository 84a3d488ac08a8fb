use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::Rat;

/// Dense univariate polynomial over the rationals. `coeffs[i]` is the
/// coefficient of `n^i`; trailing zeros are trimmed, so the zero
/// polynomial has an empty coefficient vector and degree -1.
///
/// Serializes as `{"coeffs":["a0","a1",...]}` with rationals as strings.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "PolyRepr", into = "PolyRepr")]
pub struct Poly {
    coeffs: Vec<Rat>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    coeffs: Vec<Rat>,
}

impl From<PolyRepr> for Poly {
    fn from(r: PolyRepr) -> Self {
        Poly::new(r.coeffs)
    }
}

impl From<Poly> for PolyRepr {
    fn from(p: Poly) -> Self {
        PolyRepr { coeffs: p.coeffs }
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Rat::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rat) -> Self {
        Poly::new(vec![c])
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Rat::from_int(c)).collect())
    }

    /// The monomial n^d.
    pub fn monomial(d: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); d + 1];
        coeffs[d] = Rat::one();
        Poly::new(coeffs)
    }

    /// (a n + b)^3, the shape every cubic 1-transform takes.
    pub fn linear_cubed(a: i64, b: i64) -> Self {
        Poly::from_ints(&[b, a]).pow(3)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Coefficient of n^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    /// Highest index with a nonzero coefficient; -1 for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when every coefficient above n^0 is zero.
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading_coeff(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(0)
    }

    /// Exact evaluation at a rational point, by Horner's rule.
    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_int(&self, n: i64) -> Rat {
        self.eval(&Rat::from_int(n))
    }

    pub fn eval_bigint(&self, n: &BigInt) -> Rat {
        self.eval(&Rat::from_bigint(n.clone()))
    }

    /// The shifted polynomial n -> p(n+k), expanded exactly with the
    /// binomial theorem. k may be negative.
    pub fn shift(&self, k: i64) -> Poly {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let d = self.coeffs.len() - 1;
        let k = Rat::from_int(k);
        // binomial(i, j) built row by row
        let mut out = vec![Rat::zero(); d + 1];
        let mut row: Vec<BigInt> = vec![BigInt::from(1)];
        for (i, c) in self.coeffs.iter().enumerate() {
            // row holds C(i, 0..=i)
            if !c.is_zero() {
                let mut kpow = Rat::one();
                for j in (0..=i).rev() {
                    // contribution of c * C(i,j) * k^(i-j) to n^j
                    out[j] += c.clone() * Rat::from_bigint(row[j].clone()) * kpow.clone();
                    kpow *= k.clone();
                }
            }
            let mut next = vec![BigInt::from(1)];
            for j in 1..=i {
                next.push(&row[j - 1] + &row[j]);
            }
            next.push(BigInt::from(1));
            row = next;
        }
        Poly::new(out)
    }

    /// The substituted polynomial n -> p(a n + b), expanded exactly.
    pub fn affine(&self, a: &Rat, b: &Rat) -> Poly {
        let inner = Poly::new(vec![b.clone(), a.clone()]);
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &inner) + &Poly::constant(c.clone());
        }
        acc
    }

    pub fn scale(&self, s: &Rat) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::constant(Rat::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Whether p(n) is an integer for every natural n, decided exactly by
    /// expanding p in the binomial-coefficient basis: the Newton forward
    /// differences at 0 must all be integers.
    pub fn is_integer_valued(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        let d = self.coeffs.len() - 1;
        let mut values: Vec<Rat> = (0..=d as i64).map(|n| self.eval_int(n)).collect();
        for _ in 0..=d {
            if !values[0].is_integer() {
                return false;
            }
            for i in 0..values.len() - 1 {
                values[i] = &values[i + 1] - &values[i];
            }
            values.pop();
        }
        true
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}")?;
                    }
                    if i == 1 {
                        write!(f, "n")?;
                    } else {
                        write!(f, "n^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
