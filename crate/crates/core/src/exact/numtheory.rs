use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrderError {
    #[error("multiplicative order undefined: gcd({base}, {modulus}) != 1")]
    NotCoprime { base: u64, modulus: u64 },
}

/// Least i >= 1 with b^i = 1 (mod a), by iterated multiplication.
/// For a = 1 every power is congruent to 1, so the order is 1.
pub fn multiplicative_order(b: u64, a: u64) -> Result<u64, OrderError> {
    assert!(a >= 1, "modulus must be positive");
    assert!(b >= 1, "base must be positive");
    if a == 1 {
        return Ok(1);
    }
    let a_big = BigInt::from(a);
    if BigInt::from(b).gcd(&a_big) != BigInt::one() {
        return Err(OrderError::NotCoprime { base: b, modulus: a });
    }
    let b_mod = BigInt::from(b) % &a_big;
    let mut pow = b_mod.clone();
    let mut i = 1u64;
    while pow != BigInt::one() {
        pow = (pow * &b_mod) % &a_big;
        i += 1;
    }
    Ok(i)
}
