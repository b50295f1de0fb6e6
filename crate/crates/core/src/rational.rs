//! Small helpers over `BigRational` / `BigInt`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_i64(q: &Rational) -> Option<i64> {
    if q.is_integer() {
        q.numer().to_i64()
    } else {
        None
    }
}

/// Exact `q^k` for integer `k`; `None` for `0^negative`.
pub fn pow(q: &Rational, k: i64) -> Option<Rational> {
    if k < 0 {
        if q.is_zero() {
            return None;
        }
        let p = num_traits::pow(q.recip(), k.unsigned_abs() as usize);
        Some(p)
    } else {
        Some(num_traits::pow(q.clone(), k as usize))
    }
}

/// Exact square root of a non-negative integer, if it is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

/// Splits a positive integer as `s^2 * t`, pulling out square factors found by
/// trial division (complete for values below 10^12).
pub fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    let mut s = BigInt::one();
    let mut t = n.clone();
    if let Some(r) = exact_sqrt(&t) {
        return (r, BigInt::one());
    }
    let mut p = BigInt::from(2);
    let limit = BigInt::from(1_000_000u64);
    while &p * &p <= t && p <= limit {
        let pp = &p * &p;
        while (&t % &pp).is_zero() {
            t /= &pp;
            s *= &p;
        }
        p += 1;
    }
    (s, t)
}

/// Positive divisors of `|n|` (n != 0), ascending. Trial division.
pub fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            let q = &n / &d;
            if q != d {
                large.push(q);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

pub fn gcd_int(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

pub fn lcm_int(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

/// Parses `123` or `12.34` into an exact rational.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let (whole, frac_part) = match s.split_once('.') {
        Some((w, f)) => (w, f),
        None => (s, ""),
    };
    if whole.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{whole}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    Some(Rational::new(numer, denom))
}

/// Exact value of a finite float (through its binary expansion).
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_decimal("0.97"), Some(frac(97, 100)));
        assert_eq!(parse_decimal("12"), Some(int(12)));
        assert_eq!(parse_decimal("3."), Some(int(3)));
        assert_eq!(parse_decimal("."), None);
    }

    #[test]
    fn square_split() {
        let (s, t) = split_square(&BigInt::from(72));
        assert_eq!((s, t), (BigInt::from(6), BigInt::from(2)));
        let (s, t) = split_square(&BigInt::from(49));
        assert_eq!((s, t), (BigInt::from(7), BigInt::from(1)));
    }

    #[test]
    fn divisor_list() {
        let d: Vec<i64> = divisors(&BigInt::from(-12)).iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(d, [1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn negative_powers() {
        assert_eq!(pow(&frac(2, 3), -2), Some(frac(9, 4)));
        assert_eq!(pow(&int(0), -1), None);
    }
}
