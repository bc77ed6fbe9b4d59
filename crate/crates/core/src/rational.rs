//! Small helpers around `BigRational`: parsing, exact float import, export.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact value of a finite `f64` (every finite double is a dyadic rational).
pub fn from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::InvalidArgument(format!("non-finite value {x}")))
}

pub fn to_f64(q: &Rational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    if let Some(v) = q.to_f64() {
        if v.is_finite() && v != 0.0 {
            return v;
        }
    }
    // Fall back through the bit lengths when numerator or denominator overflow a double.
    let (n, d) = (q.numer(), q.denom());
    let shift = n.bits() as i64 - d.bits() as i64;
    let scaled = if shift > 0 {
        Rational::new(n.clone(), d.clone() << (shift as usize))
    } else {
        Rational::new(n.clone() << ((-shift) as usize), d.clone())
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

/// Parses `3`, `-3/2`, `0.25`, `1e-3`, `2.5E2` exactly.
pub fn parse(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((a, b)) = s.split_once('/') {
        let num = parse(a)?;
        let den = parse(b)?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(num / den);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("no digits in {s:?}")));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("invalid number {s:?}")));
    }
    let all: String = format!("{int_part}{frac_part}");
    let n: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().unwrap() };
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = Rational::from_integer(n);
    if scale >= 0 {
        q *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        q /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -q } else { q })
}

/// Canonical text: `p` or `p/q`.
pub fn format(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

/// A rational within relative error 2^{−bits} of e^x.
pub fn exp_approx(x: &Rational, bits: u64) -> Rational {
    if x.is_zero() {
        return Rational::one();
    }
    // halve until |x|/2^s ≤ 1/2, sum the series in fixed point, square back
    let mut s: u64 = 0;
    let mut r = x.abs();
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    while r > half {
        r /= BigInt::from(2);
        s += 1;
    }
    let frac = bits + 2 * s + 64;
    let one = BigInt::one() << frac;
    let xr: BigInt = ((r.numer() << frac) / r.denom()).clone();
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut n = 1u64;
    while !term.is_zero() {
        term = ((&term * &xr) >> frac) / BigInt::from(n);
        sum += &term;
        n += 1;
    }
    for _ in 0..s {
        sum = (&sum * &sum) >> frac;
    }
    if x.is_negative() {
        Rational::new(one, sum)
    } else {
        Rational::new(sum, one)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_approximation() {
        for (x, e) in [(ratio(1, 10), 0.1f64.exp()), (int(-12), (-12f64).exp()), (int(30), 30f64.exp())] {
            let v = to_f64(&exp_approx(&x, 200));
            assert!(((v - e) / e).abs() < 1e-15, "{v} vs {e}");
        }
        // e^{1/2} e^{1/2} = e to far beyond double precision
        let h = exp_approx(&ratio(1, 2), 300);
        let e = exp_approx(&int(1), 300);
        let rel = (&h * &h - &e) / &e;
        assert!(rel.abs() < Rational::new(BigInt::one(), BigInt::one() << 280u32));
    }

    #[test]
    fn parses_decimal_and_fraction_forms() {
        assert_eq!(parse("0.5").unwrap(), ratio(1, 2));
        assert_eq!(parse("-3/2").unwrap(), ratio(-3, 2));
        assert_eq!(parse("1e-3").unwrap(), ratio(1, 1000));
        assert_eq!(parse("2.5E2").unwrap(), int(250));
        assert_eq!(parse(".25").unwrap(), ratio(1, 4));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn float_import_is_exact() {
        assert_eq!(from_f64(0.75).unwrap(), ratio(3, 4));
        assert_eq!(to_f64(&from_f64(0.1).unwrap()), 0.1);
        assert!(from_f64(f64::NAN).is_err());
    }

    #[test]
    fn huge_ratios_convert() {
        let big = Rational::new(BigInt::from(1) << 3000usize, BigInt::from(3) << 2990usize);
        assert!((to_f64(&big) - 1024.0 / 3.0).abs() < 1e-12);
    }
}
