//! The Dunkl kernel E_k for rank 1 and Z₂^d.
//!
//! In rank 1, E_k(x, y) depends only on u = xy and equals Σ b_n uⁿ with
//! b₀ = 1 and θ(n)·b_n = b_{n−1}, where θ(2m) = 2m and θ(2m+1) = 2m+1+2k.
//! For Z₂^d the kernel is the product of the rank-1 kernels along the axes.
//!
//! Evaluation runs the recurrence in big-integer fixed point. Terms alternate
//! in sign for u < 0 and reach e^{|u|} in size while the sum stays above
//! e^{−|u|}, so the working precision grows by 2|u|/ln 2 bits in that case.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::rootsys::RootSystem;

pub const DEFAULT_PRECISION_DIGITS: u32 = 30;

/// Arguments beyond this are refused; the series would need tens of
/// thousands of terms.
pub const MAX_ARGUMENT: f64 = 1.0e4;

/// θ(n) as an exact rational.
fn theta(k: &Rational, n: usize) -> Rational {
    let v = rational::int(n as i64);
    if n.is_multiple_of(2) {
        v
    } else {
        v + k * rational::int(2)
    }
}

/// Exact truncated kernel series Σ_{n≤N} b_n uⁿ.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSeries {
    k: Rational,
    coefficients: Vec<Rational>,
}

impl KernelSeries {
    pub fn multiplicity(&self) -> &Rational {
        &self.k
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    /// Bound on Σ_{n>N} b_n |u|ⁿ for |u| ≤ `u_max`, from b_{n+1}/b_n ≤ 1/(n+1).
    /// Infinite when the ratio bound does not converge at this order.
    pub fn tail_bound(&self, u_max: f64) -> f64 {
        let n = self.order();
        let ratio = u_max.abs() / (n as f64 + 2.0);
        if ratio >= 1.0 {
            return f64::INFINITY;
        }
        let next = rational::to_f64(&(self.coefficients[n].clone() / theta(&self.k, n + 1)));
        next * u_max.abs().powi(n as i32 + 1) / (1.0 - ratio)
    }

    /// Horner evaluation in double precision.
    pub fn eval(&self, u: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, b| acc * u + rational::to_f64(b))
    }
}

pub fn series_build(k: &Rational, order: usize) -> Result<KernelSeries> {
    if k.is_negative() {
        return Err(Error::InvalidMultiplicity(format!("kernel series needs k ≥ 0, got {k}")));
    }
    if order < 1 {
        return Err(Error::InvalidArgument("kernel series order must be at least 1".into()));
    }
    let mut coefficients = Vec::with_capacity(order + 1);
    coefficients.push(Rational::one());
    for n in 1..=order {
        let prev: &Rational = coefficients.last().unwrap();
        coefficients.push(prev / theta(k, n));
    }
    Ok(KernelSeries { k: k.clone(), coefficients })
}

/// Fixed-point evaluator for the rank-1 kernel at a chosen decimal precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelEvaluator {
    digits: u32,
}

impl Default for KernelEvaluator {
    fn default() -> Self {
        KernelEvaluator { digits: DEFAULT_PRECISION_DIGITS }
    }
}

impl KernelEvaluator {
    pub fn new(digits: u32) -> Result<Self> {
        if !(16..=1000).contains(&digits) {
            return Err(Error::InvalidArgument(format!("precision must be 16..=1000 digits, got {digits}")));
        }
        Ok(KernelEvaluator { digits })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// ln E_k(u) for the rank-1 kernel.
    pub fn ln_ek_1d(&self, k: &Rational, u: f64) -> Result<f64> {
        if k.is_negative() {
            return Err(Error::InvalidMultiplicity(format!("kernel needs k ≥ 0, got {k}")));
        }
        if !u.is_finite() || u.abs() > MAX_ARGUMENT {
            return Err(Error::Numerical(format!("kernel argument {u} outside the supported range ±{MAX_ARGUMENT}")));
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        let guard = if u < 0.0 { (2.0 * u.abs() / std::f64::consts::LN_2).ceil() as u64 } else { 0 };
        let frac_bits = (self.digits as f64 * std::f64::consts::LOG2_10).ceil() as u64 + guard + 64;

        // u = m·2^e exactly
        let exact = rational::from_f64(u)?;
        let (m, e) = dyadic_parts(&exact);
        let p = k.numer().clone();
        let q = k.denom().clone();

        let one: BigInt = BigInt::one() << frac_bits;
        let mut term = one.clone();
        let mut sum = one;
        let mut n: u64 = 0;
        loop {
            n += 1;
            // θ(n) = (q·n + 2p[n odd])/q, so term·u/θ(n) = term·m·2^e·q/(q·n + 2p[n odd])
            let mut den = &q * BigInt::from(n);
            if n % 2 == 1 {
                den += &p * 2;
            }
            term *= &m;
            term *= &q;
            term = if e >= 0 { term << (e as u64) } else { term >> ((-e) as u64) };
            term /= den;
            if term.is_zero() {
                break;
            }
            sum += &term;
            if (n as f64) > u.abs() && term.bits() < 2 {
                break;
            }
        }
        if sum.sign() != Sign::Plus {
            return Err(Error::Numerical(format!(
                "kernel sum lost all significance at u = {u} with {} digits",
                self.digits
            )));
        }
        Ok(ln_fixed_point(&sum, frac_bits))
    }

    pub fn ek_1d(&self, k: &Rational, u: f64) -> Result<f64> {
        Ok(self.ln_ek_1d(k, u)?.exp())
    }

    /// ln E_k(x, y) on Z₂^d (product over axes).
    pub fn ln_ek(&self, rs: &RootSystem, x: &[f64], y: &[f64]) -> Result<f64> {
        rs.require_kernel()?;
        let ks = rs.axis_multiplicities()?;
        if x.len() != ks.len() || y.len() != ks.len() {
            return Err(Error::DimensionMismatch { expected: ks.len(), found: x.len().max(y.len()) });
        }
        let mut acc = 0.0;
        for ((k, a), b) in ks.iter().zip(x).zip(y) {
            acc += self.ln_ek_1d(k, a * b)?;
        }
        Ok(acc)
    }

    pub fn ek(&self, rs: &RootSystem, x: &[f64], y: &[f64]) -> Result<f64> {
        Ok(self.ln_ek(rs, x, y)?.exp())
    }
}

/// Splits a dyadic rational into (m, e) with value m·2^e.
fn dyadic_parts(q: &Rational) -> (BigInt, i64) {
    let den = q.denom();
    let shift = den.trailing_zeros().unwrap_or(0);
    debug_assert!((den >> shift as usize).is_one());
    (q.numer().clone(), -(shift as i64))
}

/// ln(v·2^{−frac_bits}) for positive v, keeping the binary exponent exact.
fn ln_fixed_point(v: &BigInt, frac_bits: u64) -> f64 {
    let shift = v.bits().saturating_sub(60);
    let top = (v >> shift).to_f64().unwrap();
    top.ln() + (shift as i64 - frac_bits as i64) as f64 * std::f64::consts::LN_2
}

pub fn ln_ek_1d(k: &Rational, u: f64) -> Result<f64> {
    KernelEvaluator::default().ln_ek_1d(k, u)
}

pub fn ek_1d(k: &Rational, u: f64) -> Result<f64> {
    KernelEvaluator::default().ek_1d(k, u)
}

pub fn ek(rs: &RootSystem, x: &[f64], y: &[f64]) -> Result<f64> {
    KernelEvaluator::default().ek(rs, x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{dunkl_tj, Polynomial};
    use crate::rational::{int, ratio};
    use crate::rootsys::GroupKind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn series_coefficients() {
        let s0 = series_build(&int(0), 10).unwrap();
        let mut fact = int(1);
        for (n, b) in s0.coefficients().iter().enumerate() {
            if n > 0 {
                fact *= int(n as i64);
            }
            assert_eq!(*b, int(1) / fact.clone());
        }
        for k in [ratio(1, 2), int(1), int(2), ratio(7, 3)] {
            let s = series_build(&k, 6).unwrap();
            let one_2k = int(1) + &k * int(2);
            assert_eq!(s.coefficients()[0], int(1));
            assert_eq!(s.coefficients()[1], int(1) / one_2k.clone());
            assert_eq!(s.coefficients()[2], int(1) / (int(2) * one_2k));
            assert!(s.coefficients().iter().all(|b| b.is_positive()));
        }
        assert!(series_build(&int(-1), 4).is_err());
        assert!(series_build(&int(1), 0).is_err());
    }

    #[test]
    fn series_solves_the_defining_system_symbolically() {
        // Truncating at N leaves T(Σ b_n xⁿyⁿ) − y·Σ b_n xⁿyⁿ = −b_N x^N y^{N+1}.
        for k in [int(0), ratio(1, 2), int(3)] {
            let s = series_build(&k, 7).unwrap();
            let rs = RootSystem::build(GroupKind::Rank1, std::slice::from_ref(&k)).unwrap();
            // y is fixed at 1 so the series is a polynomial in x
            let p = Polynomial::from_terms(1, s.coefficients().iter().enumerate().map(|(n, b)| (vec![n as u16], b.clone())));
            let residual = &dunkl_tj(&rs, 0, &p).unwrap() - &p;
            let expect = Polynomial::monomial(1, vec![7], -s.coefficients()[7].clone());
            assert_eq!(residual, expect);
        }
    }

    #[test]
    fn tail_bound_covers_truncation() {
        let s = series_build(&ratio(1, 2), 40).unwrap();
        let long = series_build(&ratio(1, 2), 120).unwrap();
        for u in [1.0, 5.0, 10.0] {
            let err = (long.eval(u) - s.eval(u)).abs();
            assert!(err <= s.tail_bound(u) * (1.0 + 1e-12) + 1e-12 * long.eval(u));
        }
        assert!(series_build(&int(1), 3).unwrap().tail_bound(10.0).is_infinite());
    }

    #[test]
    fn rank1_kernel_examples() {
        for k in [int(0), ratio(1, 2), int(1), int(2)] {
            assert_eq!(ek_1d(&k, 0.0).unwrap(), 1.0);
        }
        for u in [-30.0, -10.0, -1.5, -1e-3, 0.25, 1.0, 7.5, 40.0] {
            assert!(close(ek_1d(&int(0), u).unwrap(), f64::exp(u), 1e-14), "u={u}");
        }
    }

    #[test]
    fn k_one_matches_closed_form() {
        // E_1(u) = sinh(u)/u + (u cosh u − sinh u)/u²
        let oracle = |u: f64| u.sinh() / u + (u * u.cosh() - u.sinh()) / (u * u);
        for u in [-12.0, -4.0, -1.0, 0.5, 2.0, 9.0, 20.0] {
            let got = ek_1d(&int(1), u).unwrap();
            assert!(close(got, oracle(u), 1e-12), "u={u}: {got} vs {}", oracle(u));
        }
    }

    #[test]
    fn matches_exact_series_at_moderate_arguments() {
        for k in [ratio(1, 3), int(2)] {
            let s = series_build(&k, 80).unwrap();
            for u in [-3.0, -0.7, 0.3, 2.0, 6.0] {
                assert!(close(ek_1d(&k, u).unwrap(), s.eval(u), 1e-13));
            }
        }
    }

    #[test]
    fn positive_and_bounded_by_exponential() {
        for k in [ratio(1, 2), int(1), int(2)] {
            for i in 0..=80 {
                let u = -10.0 + 0.25 * i as f64;
                let v = ek_1d(&k, u).unwrap();
                assert!(v > 0.0);
                assert!(v <= u.abs().exp() * (1.0 + 1e-14), "k={k} u={u}");
            }
        }
    }

    #[test]
    fn large_negative_arguments_keep_relative_accuracy() {
        let lo = KernelEvaluator::new(30).unwrap();
        let hi = KernelEvaluator::new(60).unwrap();
        for k in [ratio(1, 2), int(2)] {
            for u in [-50.0, -120.0, -300.0] {
                assert!((lo.ln_ek_1d(&k, u).unwrap() - hi.ln_ek_1d(&k, u).unwrap()).abs() < 1e-13);
            }
        }
        assert!(ek_1d(&int(1), 2e4).is_err());
        assert!(KernelEvaluator::new(5).is_err());
    }

    #[test]
    fn product_kernel_properties() {
        let rs = RootSystem::build(GroupKind::Z2Power(3), &[ratio(1, 2), int(0), int(2)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        assert_eq!(ek(&rs, &[1.0, -2.0, 0.5], &[0.0, 0.0, 0.0]).unwrap(), 1.0);
        for _ in 0..200 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let y: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let lambda: f64 = rng.gen_range(-2.0..2.0);
            let a = ek(&rs, &x, &y).unwrap();
            assert!(a > 0.0);
            assert!(close(a, ek(&rs, &y, &x).unwrap(), 1e-12));
            let lx: Vec<f64> = x.iter().map(|v| v * lambda).collect();
            let ly: Vec<f64> = y.iter().map(|v| v * lambda).collect();
            assert!(close(ek(&rs, &lx, &y).unwrap(), ek(&rs, &x, &ly).unwrap(), 1e-12));
        }
        let flat = RootSystem::build(GroupKind::Z2Power(2), &[int(0), int(0)]).unwrap();
        let v = ek(&flat, &[1.5, -0.5], &[0.4, 2.0]).unwrap();
        assert!(close(v, (1.5f64 * 0.4 - 0.5 * 2.0).exp(), 1e-14));
        let sym = RootSystem::build(GroupKind::SymmetricGroup(3), &[int(1)]).unwrap();
        assert!(matches!(ek(&sym, &[0.0; 3], &[0.0; 3]), Err(Error::Capability(_))));
    }

    #[test]
    fn defining_system_residual_by_finite_differences() {
        let rs = RootSystem::build(GroupKind::Z2Power(2), &[int(1), ratio(1, 2)]).unwrap();
        let ks = [1.0, 0.5];
        let h = 1e-5;
        let y = [0.7, -1.3];
        let e = |x: &[f64]| ek(&rs, x, &y).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                let x = [-2.0 + 0.5 * i as f64 + 0.1, -2.0 + 0.5 * j as f64 + 0.05];
                for axis in 0..2 {
                    let mut xp = x;
                    let mut xm = x;
                    xp[axis] += h;
                    xm[axis] -= h;
                    let deriv = (e(&xp) - e(&xm)) / (2.0 * h);
                    let mut refl = x;
                    refl[axis] = -refl[axis];
                    let t = deriv + ks[axis] * (e(&x) - e(&refl)) / x[axis];
                    let residual = t - y[axis] * e(&x);
                    assert!(residual.abs() <= 1e-6, "x={x:?} axis={axis}: {residual}");
                }
            }
        }
    }
}
