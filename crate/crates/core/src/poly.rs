//! Dense truncated polynomials with big-integer coefficients.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{ensure_invariant, Result};

/// `binom(n, k)`, zero when `k > n`.
pub fn binomial(n: &BigUint, k: u64) -> BigUint {
    if &BigUint::from(k) > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `binom(n, k)` for `k = 0..=max_k`, i.e. `(1 + x)^n` truncated after degree `max_k`.
pub fn binomial_row(n: &BigUint, max_k: usize) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(max_k + 1);
    let mut acc = BigUint::one();
    row.push(acc.clone());
    for k in 1..=max_k as u64 {
        if &BigUint::from(k) > n {
            acc = BigUint::zero();
        } else {
            acc = acc * (n - (k - 1)) / k;
        }
        row.push(acc.clone());
    }
    row
}

/// Splits `(1 + x)^n` into its even and odd parts as
/// `E = ((1+x)^n + (1-x)^n) / 2` and `O = ((1+x)^n - (1-x)^n) / 2`.
pub fn even_odd_split(row: &[BigUint]) -> Result<(Vec<BigUint>, Vec<BigUint>)> {
    let mut even = Vec::with_capacity(row.len());
    let mut odd = Vec::with_capacity(row.len());
    for (k, b) in row.iter().enumerate() {
        let plus = BigInt::from(b.clone());
        let minus = if k % 2 == 0 {
            plus.clone()
        } else {
            -plus.clone()
        };
        let (e, e_rem) = (&plus + &minus).div_rem(&BigInt::from(2));
        let (o, o_rem) = (&plus - &minus).div_rem(&BigInt::from(2));
        ensure_invariant!(
            e_rem.is_zero() && o_rem.is_zero(),
            "even/odd split of binomial coefficient {k} is not exact"
        );
        even.push(e.magnitude().clone());
        odd.push(o.magnitude().clone());
    }
    Ok((even, odd))
}

/// `acc += a * b`, truncated to `acc.len()` coefficients.
pub fn mul_add_truncated(acc: &mut [BigUint], a: &[BigUint], b: &[BigUint]) {
    let len = acc.len();
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            if !bj.is_zero() {
                acc[i + j] += ai * bj;
            }
        }
    }
}

/// Coefficients `0..=max_k` of `(1 + x)^(len - w) (1 - x)^w`, from the
/// three-term recurrence `(i+1) p_{i+1} = (len - 2w) p_i - (len - i + 1) p_{i-1}`.
pub fn krawtchouk_row(len: &BigUint, w: &BigUint, max_k: usize) -> Result<Vec<BigInt>> {
    let n = BigInt::from(len.clone());
    let slope: BigInt = &n - BigInt::from(w.clone()) * 2u32;
    let mut row = Vec::with_capacity(max_k + 1);
    row.push(BigInt::one());
    if max_k == 0 {
        return Ok(row);
    }
    row.push(slope.clone());
    for i in 1..max_k {
        let numer = &slope * &row[i] - (&n - (i as i64 - 1)) * &row[i - 1];
        let (value, rem) = numer.div_rem(&BigInt::from(i + 1));
        ensure_invariant!(
            rem.is_zero(),
            "Krawtchouk recurrence inexact at degree {}",
            i + 1
        );
        row.push(value);
    }
    Ok(row)
}
