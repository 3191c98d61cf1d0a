//! Elementary bijections between positive naturals and structured sets.

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::{One, ToPrimitive, Zero};

use super::NumberingError;

/// Numbering of the coproduct of `m` copies of the positive naturals:
/// `n` is element `k` of summand `i`, with `n = m(k-1)+i`.
pub fn coprod_number(m: u64, n: u64) -> Result<(u64, u64), NumberingError> {
    if m == 0 || n == 0 {
        return Err(NumberingError::OutOfRange(format!("m={m}, n={n} must be positive")));
    }
    Ok(((n - 1) % m + 1, n.div_ceil(m)))
}

pub fn coprod_unnumber(m: u64, i: u64, k: u64) -> Result<u64, NumberingError> {
    if m == 0 || i == 0 || i > m || k == 0 {
        return Err(NumberingError::OutOfRange(format!("summand {i} of {m}, element {k}")));
    }
    m.checked_mul(k - 1)
        .and_then(|v| v.checked_add(i))
        .ok_or(NumberingError::Overflow)
}

/// Binary word of `n` with the leading 1 dropped.
pub fn bin_number(n: u64) -> Result<String, NumberingError> {
    if n == 0 {
        return Err(NumberingError::OutOfRange("0 has no binary word".into()));
    }
    let s = format!("{n:b}");
    Ok(s[1..].to_string())
}

pub fn bin_unnumber(word: &str) -> Result<u64, NumberingError> {
    if word.len() >= 64 {
        return Err(NumberingError::Overflow);
    }
    word.chars().try_fold(1u64, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(NumberingError::OutOfRange(format!("not a binary digit: {c:?}"))),
    })
}

/// `(k+l-2)(k+l-1)/2 + k` on positive naturals.
pub fn cantor_pair(k: u64, l: u64) -> Result<u64, NumberingError> {
    if k == 0 || l == 0 {
        return Err(NumberingError::OutOfRange(format!("({k},{l}) must be positive")));
    }
    let d = k as u128 + l as u128 - 1;
    let v = (d - 1) * d / 2 + k as u128;
    u64::try_from(v).map_err(|_| NumberingError::Overflow)
}

pub fn cantor_unpair(n: u64) -> Result<(u64, u64), NumberingError> {
    if n == 0 {
        return Err(NumberingError::OutOfRange("0 is not a pair number".into()));
    }
    let n = n as u128;
    // largest d with d(d-1)/2 < n, i.e. the anti-diagonal k+l-1 = d
    let mut d = ((8 * n).sqrt() + 1) / 2;
    while d * (d - 1) / 2 >= n {
        d -= 1;
    }
    while (d + 1) * d / 2 < n {
        d += 1;
    }
    let k = n - d * (d - 1) / 2;
    let l = d + 1 - k;
    Ok((k as u64, l as u64))
}

/// Zero-based Cantor pairing `(a+b)(a+b+1)/2 + b` on arbitrary naturals.
pub fn pair_big(a: &BigUint, b: &BigUint) -> BigUint {
    let w = a + b;
    (&w * (&w + 1u32) >> 1) + b
}

pub fn unpair_big(m: &BigUint) -> (BigUint, BigUint) {
    if m.is_zero() {
        return (BigUint::zero(), BigUint::zero());
    }
    // w = floor((sqrt(8m+1) - 1) / 2)
    let w: BigUint = ((m * 8u32 + 1u32).sqrt() - 1u32) >> 1;
    let t = (&w * (&w + BigUint::one())) >> 1;
    let b = m - t;
    let a = &w - &b;
    (a, b)
}

/// Zigzag map from integers to naturals: 0, -1, 1, -2, 2, ... -> 0, 1, 2, 3, 4, ...
pub fn zigzag(d: i64) -> u64 {
    if d >= 0 {
        (d as u64) << 1
    } else {
        ((-(d + 1)) as u64) * 2 + 1
    }
}

pub fn unzigzag(z: &BigUint) -> Option<i64> {
    let z = z.to_u64()?;
    Some(if z & 1 == 0 { (z >> 1) as i64 } else { -((z >> 1) as i64) - 1 })
}
