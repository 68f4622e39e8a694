use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::enumerate::{enumerate_graphs, MAX_ENUMERATION_ORDER};
use crate::error::{check_range, Result};
use crate::series::PowerSeries;

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Exponential generating function of connected labeled graphs, `log` of
/// the all-graphs EGF, truncated after `x^len-1`.
fn connected_egf(len: usize) -> PowerSeries {
    let coeffs = (0..len)
        .map(|k| {
            let all = BigInt::one() << (k * k.saturating_sub(1) / 2);
            BigRational::new(all, factorial(k))
        })
        .collect();
    PowerSeries::new(coeffs, len).ln()
}

fn egf_count(series: &PowerSeries, n: usize, shift: usize) -> u64 {
    (series.coeff(n - shift) * BigRational::from_integer(factorial(n - shift)))
        .to_integer()
        .to_u64()
        .expect("counts for n <= 8 fit in u64")
}

/// Number of connected labeled graphs on `n` vertices, from the
/// exponential formula.
pub fn count_connected(n: usize) -> Result<u64> {
    check_range("vertex count", n, 1, MAX_ENUMERATION_ORDER)?;
    Ok(egf_count(&connected_egf(n + 1), n, 0))
}

/// Number of 2-connected labeled graphs on `n` vertices (the single edge
/// included).
///
/// Rooted connected graphs satisfy `C'(x) = x exp(B'(C'(x)))` where `B` is
/// the 2-connected EGF, so `B'(u) = log(u / C'^{-1}(u))`.
pub fn count_two_connected(n: usize) -> Result<u64> {
    check_range("vertex count", n, 2, MAX_ENUMERATION_ORDER)?;
    let len = n + 2;
    let rooted = PowerSeries::variable(len) * connected_egf(len).derivative();
    let inverse = rooted.reversion();
    // inverse(u) / u, shifted down one power
    let shifted: Vec<BigRational> = inverse.coeffs()[1..].to_vec();
    let quotient = PowerSeries::new(shifted, len - 1).reciprocal();
    let block_derivative = quotient.ln();
    Ok(egf_count(&block_derivative, n, 1))
}

pub fn count_connected_brute_force(n: usize) -> Result<u64> {
    let mut count = 0;
    for g in enumerate_graphs(n)? {
        if g.is_connected()? {
            count += 1;
        }
    }
    Ok(count)
}

pub fn count_two_connected_brute_force(n: usize) -> Result<u64> {
    check_range("vertex count", n, 2, MAX_ENUMERATION_ORDER)?;
    let mut count = 0;
    for g in enumerate_graphs(n)? {
        if g.is_two_connected()? {
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(count_connected(3).unwrap(), 4);
        assert_eq!(count_connected(4).unwrap(), 38);
        assert_eq!(count_two_connected(2).unwrap(), 1);
        assert_eq!(count_two_connected(4).unwrap(), 10);
        assert!(count_two_connected(1).is_err());
        assert!(count_connected(9).is_err());
    }

    #[test]
    fn formulas_match_brute_force() {
        for n in 1..=6 {
            assert_eq!(count_connected(n).unwrap(), count_connected_brute_force(n).unwrap());
        }
        for n in 2..=6 {
            assert_eq!(
                count_two_connected(n).unwrap(),
                count_two_connected_brute_force(n).unwrap()
            );
        }
    }

    #[test]
    fn larger_counts_follow_known_sequences() {
        let connected: Vec<u64> = (1..=8).map(|n| count_connected(n).unwrap()).collect();
        assert_eq!(connected, [1, 1, 4, 38, 728, 26704, 1866256, 251548592]);
        let blocks: Vec<u64> = (2..=8).map(|n| count_two_connected(n).unwrap()).collect();
        assert_eq!(blocks, [1, 1, 10, 238, 11368, 1014888, 166537616]);
    }
}
