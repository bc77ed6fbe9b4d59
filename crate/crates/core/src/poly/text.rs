//! Text form of polynomials: `3/2*x1^2*x2 - x3 + 1`.
//!
//! Variables are `x1..xd` (1-based). Terms print in descending total degree,
//! ties broken by descending exponent vector, so printing is canonical and
//! `parse(print(p)) == p` holds exactly.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed};

use super::{monomial_degree, Exponents, Polynomial};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

impl Polynomial {
    pub fn parse(text: &str, dim: usize) -> Result<Polynomial> {
        let terms = split_terms(text)?;
        let mut out = Polynomial::zero(dim);
        for (negative, body) in terms {
            let (e, c) = parse_term(&body, dim)?;
            let c = if negative { -c } else { c };
            out = &out + &Polynomial::monomial(dim, e, c);
        }
        Ok(out)
    }
}

fn split_terms(text: &str) -> Result<Vec<(bool, String)>> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut out = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    let mut prev: Option<char> = None;
    for ch in s.chars() {
        // a sign directly after '^', '*' or '/' belongs to a number, not a term break
        let binds = matches!(prev, Some('^') | Some('*') | Some('/'));
        if (ch == '+' || ch == '-') && !binds {
            if !current.is_empty() {
                out.push((negative, std::mem::take(&mut current)));
                negative = false;
            }
            if ch == '-' {
                negative = !negative;
            }
        } else {
            current.push(ch);
        }
        prev = Some(ch);
    }
    if current.is_empty() {
        return Err(Error::Parse(format!("dangling sign in {text:?}")));
    }
    out.push((negative, current));
    Ok(out)
}

fn parse_term(body: &str, dim: usize) -> Result<(Exponents, Rational)> {
    let mut e = vec![0u16; dim];
    let mut c = Rational::one();
    for factor in body.split('*') {
        if factor.is_empty() {
            return Err(Error::Parse(format!("empty factor in {body:?}")));
        }
        if let Some(rest) = factor.strip_prefix('x') {
            let (idx, pow) = match rest.split_once('^') {
                Some((i, p)) => (i, p.parse::<u16>().map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?),
                None => (rest, 1),
            };
            let j: usize = if idx.is_empty() && dim == 1 {
                1
            } else {
                idx.parse().map_err(|_| Error::Parse(format!("bad variable {factor:?}")))?
            };
            if j == 0 || j > dim {
                return Err(Error::Parse(format!("variable {factor:?} outside dimension {dim}")));
            }
            e[j - 1] = e[j - 1]
                .checked_add(pow)
                .ok_or_else(|| Error::Parse(format!("exponent overflow in {body:?}")))?;
        } else {
            c *= rational::parse(factor)?;
        }
    }
    Ok((e, c))
}

fn max_var_index(text: &str) -> usize {
    let bytes = text.as_bytes();
    let mut best = 0;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'x' {
            let mut j = i + 1;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            let n = text[i + 1..j].parse::<usize>().unwrap_or(1);
            best = best.max(n);
            i = j;
        } else {
            i += 1;
        }
    }
    best.max(1)
}

/// Dimension is inferred from the largest variable index present.
impl FromStr for Polynomial {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Polynomial::parse(s, max_var_index(s))
    }
}

fn print_order(p: &Polynomial) -> Vec<(&Exponents, &Rational)> {
    let mut terms: Vec<_> = p.terms().collect();
    terms.sort_by(|(a, _), (b, _)| monomial_degree(b).cmp(&monomial_degree(a)).then_with(|| b.cmp(a)));
    terms
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in print_order(self).into_iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| if k == 1 { format!("x{}", j + 1) } else { format!("x{}^{}", j + 1, k) })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", rational::format(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", rational::format(&mag), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    #[test]
    fn parses_the_documented_example() {
        let p = Polynomial::parse("3/2*x1^2*x2 - x3 + 1", 3).unwrap();
        assert_eq!(p.coefficient(&[2, 1, 0]), ratio(3, 2));
        assert_eq!(p.coefficient(&[0, 0, 1]), int(-1));
        assert_eq!(p.constant_term(), int(1));
        assert_eq!(p.to_string(), "3/2*x1^2*x2 - x3 + 1");
    }

    #[test]
    fn accepts_loose_forms() {
        let p = Polynomial::parse("-x^2 + 0.5*x", 1).unwrap();
        assert_eq!(p.to_string(), "-x1^2 + 1/2*x1");
        assert_eq!(Polynomial::parse("x1*x1", 1).unwrap().to_string(), "x1^2");
        assert_eq!(Polynomial::parse("2*-3", 1).unwrap(), Polynomial::constant(1, int(-6)));
        assert_eq!("x2 - x1".parse::<Polynomial>().unwrap().dim(), 2);
        assert_eq!(Polynomial::parse("x1 - x1", 1).unwrap().to_string(), "0");
    }

    #[test]
    fn rejects_malformed_text() {
        for bad in ["", "x1 +", "x4", "x0", "x1^a", "3**x1", "1/0*x1"] {
            assert!(Polynomial::parse(bad, 3).is_err(), "{bad:?}");
        }
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(((0u16..5, 0u16..5, 0u16..5), -20i64..20, 1i64..6), 0..8).prop_map(|ts| {
            Polynomial::from_terms(
                3,
                ts.into_iter().map(|((a, b, c), n, d)| (vec![a, b, c], ratio(n, d))),
            )
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(p in arb_poly()) {
            let text = p.to_string();
            prop_assert_eq!(Polynomial::parse(&text, 3).unwrap(), p);
        }
    }
}
