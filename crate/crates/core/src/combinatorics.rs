//! Exact integer helpers shared by the counting formulas.

use num_bigint::BigUint;
use num_traits::{One, Zero};

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `n!!`, with the usual conventions `0!! = (-1)!! = 1`.
pub fn double_factorial(n: i64) -> BigUint {
    let mut acc = BigUint::one();
    let mut i = n;
    while i > 1 {
        acc *= i as u64;
        i -= 2;
    }
    acc
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Number of distinct orderings of a multiset given the multiplicities of its
/// distinct values.
pub fn multinomial(multiplicities: &[usize]) -> BigUint {
    let total: usize = multiplicities.iter().sum();
    let mut acc = factorial(total as u64);
    for &m in multiplicities {
        acc /= factorial(m as u64);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(factorial(5), BigUint::from(120u32));
        assert_eq!(binomial(6, 3), BigUint::from(20u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(double_factorial(5), BigUint::from(15u32));
        assert_eq!(double_factorial(6), BigUint::from(48u32));
        assert_eq!(double_factorial(0), BigUint::one());
        assert_eq!(double_factorial(-1), BigUint::one());
        assert_eq!(multinomial(&[2, 1]), BigUint::from(3u32));
    }
}
