//! Sparse multivariate polynomials with exact rational coefficients, and the
//! symbolic Dunkl calculus built on top of them.

mod dunkl;
mod text;

pub use dunkl::*;

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub type Exponents = Vec<u16>;

/// Products whose degree would exceed this are rejected.
pub const DEFAULT_DEGREE_CAP: u32 = 64;

/// Canonical form: no zero coefficients are ever stored, so equality of
/// polynomials is equality of term maps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Exponents, Rational>,
}

pub fn monomial_degree(e: &[u16]) -> u32 {
    e.iter().map(|&v| v as u32).sum()
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial { dim, terms: BTreeMap::new() }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::monomial(dim, vec![0; dim], c)
    }

    /// The coordinate function x_j (0-based index).
    pub fn var(dim: usize, j: usize) -> Self {
        assert!(j < dim, "variable index {j} out of range for dimension {dim}");
        let mut e = vec![0; dim];
        e[j] = 1;
        Self::monomial(dim, e, Rational::one())
    }

    pub fn monomial(dim: usize, exponents: Exponents, c: Rational) -> Self {
        assert_eq!(exponents.len(), dim, "exponent vector length must equal dimension");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exponents, c);
        }
        Polynomial { dim, terms }
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, Rational)>,
    {
        let mut p = Polynomial::zero(dim);
        for (e, c) in terms {
            assert_eq!(e.len(), dim, "exponent vector length must equal dimension");
            p.add_term(e, c);
        }
        p
    }

    /// α*(x) = ⟨α, x⟩ as a polynomial.
    pub fn linear_form(coeffs: &[Rational]) -> Self {
        let dim = coeffs.len();
        Polynomial::from_terms(
            dim,
            coeffs.iter().enumerate().map(|(j, c)| {
                let mut e = vec![0; dim];
                e[j] = 1;
                (e, c.clone())
            }),
        )
    }

    /// ‖x‖² = Σ x_j².
    pub fn norm_sq(dim: usize) -> Self {
        Polynomial::from_terms(
            dim,
            (0..dim).map(|j| {
                let mut e = vec![0; dim];
                e[j] = 2;
                (e, Rational::one())
            }),
        )
    }

    fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&v| v == 0))
    }

    /// Total degree; the zero polynomial reports 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| monomial_degree(e)).max().unwrap_or(0)
    }

    pub fn coefficient(&self, e: &[u16]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&vec![0; self.dim])
    }

    /// The homogeneous component of total degree `n`.
    pub fn homogeneous_part(&self, n: u32) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| monomial_degree(e) == n)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    fn same_dim(&self, other: &Polynomial) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, found: other.dim })
        }
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.same_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.same_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.try_mul_capped(other, DEFAULT_DEGREE_CAP)
    }

    pub fn try_mul_capped(&self, other: &Polynomial, cap: u32) -> Result<Polynomial> {
        self.same_dim(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Polynomial::zero(self.dim));
        }
        let degree = self.degree() + other.degree();
        if degree > cap {
            return Err(Error::DegreeCap { degree, cap });
        }
        let mut out = Polynomial::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.dim);
        }
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Result<Polynomial> {
        let mut acc = Polynomial::one(self.dim);
        for _ in 0..n {
            acc = acc.try_mul(self)?;
        }
        Ok(acc)
    }

    /// ∂_j p (0-based j).
    pub fn partial(&self, j: usize) -> Result<Polynomial> {
        if j >= self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: j + 1 });
        }
        let mut out = Polynomial::zero(self.dim);
        for (e, c) in &self.terms {
            if e[j] > 0 {
                let mut f = e.clone();
                f[j] -= 1;
                out.add_term(f, c * Rational::from_integer(e[j].into()));
            }
        }
        Ok(out)
    }

    /// ∂_ξ p = Σ ξ_j ∂_j p.
    pub fn directional_derivative(&self, xi: &[Rational]) -> Result<Polynomial> {
        if xi.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: xi.len() });
        }
        let mut out = Polynomial::zero(self.dim);
        for (j, c) in xi.iter().enumerate() {
            if !c.is_zero() {
                out = &out + &self.partial(j)?.scale(c);
            }
        }
        Ok(out)
    }

    pub fn gradient(&self) -> PolyVector {
        PolyVector((0..self.dim).map(|j| self.partial(j).expect("in range")).collect())
    }

    /// x·∇p: each monomial is multiplied by its total degree.
    pub fn euler(&self) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| monomial_degree(e) > 0)
                .map(|(e, c)| (e.clone(), c * Rational::from_integer(monomial_degree(e).into())))
                .collect(),
        }
    }

    /// p ∘ A where row i of `images` is the linear polynomial replacing x_i.
    pub fn substitute_linear(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: images.len() });
        }
        // Fast path: each x_i maps to c_i·x_{π(i)} (sign changes, permutations).
        let simple: Option<Vec<(usize, Rational)>> = images
            .iter()
            .map(|img| {
                if img.num_terms() != 1 {
                    return None;
                }
                let (e, c) = img.terms.iter().next().unwrap();
                if monomial_degree(e) != 1 {
                    return None;
                }
                let j = e.iter().position(|&v| v == 1).unwrap();
                Some((j, c.clone()))
            })
            .collect();
        if let Some(map) = simple {
            let mut out = Polynomial::zero(self.dim);
            for (e, c) in &self.terms {
                let mut f = vec![0u16; self.dim];
                let mut coeff = c.clone();
                for (i, &ei) in e.iter().enumerate() {
                    if ei > 0 {
                        let (j, s) = &map[i];
                        f[*j] += ei;
                        coeff *= num_traits::pow(s.clone(), ei as usize);
                    }
                }
                out.add_term(f, coeff);
            }
            return Ok(out);
        }
        let mut powers: Vec<Vec<Polynomial>> = images.iter().map(|img| vec![Polynomial::one(self.dim), img.clone()]).collect();
        let mut out = Polynomial::zero(self.dim);
        for (e, c) in &self.terms {
            let mut term = Polynomial::constant(self.dim, c.clone());
            for (i, &ei) in e.iter().enumerate() {
                while powers[i].len() <= ei as usize {
                    let next = powers[i].last().unwrap().try_mul(&images[i])?;
                    powers[i].push(next);
                }
                if ei > 0 {
                    term = term.try_mul(&powers[i][ei as usize])?;
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "evaluation point has wrong dimension");
        self.terms
            .iter()
            .map(|(e, c)| {
                rational::to_f64(c)
                    * e.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product::<f64>()
            })
            .sum()
    }

    pub fn eval_exact(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.dim, "evaluation point has wrong dimension");
        ExactPoly::new(self).eval(x)
    }

    /// Integer-coefficient copy for fast repeated exact evaluation.
    pub fn to_exact(&self) -> ExactPoly {
        ExactPoly::new(self)
    }

    /// Double-precision copy for fast repeated evaluation.
    pub fn to_float(&self) -> FloatPoly {
        FloatPoly::new(self)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).expect("polynomial addition")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("polynomial subtraction")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("polynomial multiplication")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

/// `(p_1, …, p_d)`, e.g. the Dunkl gradient Tf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVector(pub Vec<Polynomial>);

impl PolyVector {
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        if let Some(first) = components.first() {
            if let Some(bad) = components.iter().find(|p| p.dim() != first.dim()) {
                return Err(Error::DimensionMismatch { expected: first.dim(), found: bad.dim() });
            }
        }
        Ok(PolyVector(components))
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.0
    }

    pub fn dot(&self, other: &PolyVector) -> Result<Polynomial> {
        let dim = self.0.first().map(Polynomial::dim).unwrap_or(0);
        let mut acc = Polynomial::zero(dim);
        for (a, b) in self.0.iter().zip(&other.0) {
            acc = acc.try_add(&a.try_mul(b)?)?;
        }
        Ok(acc)
    }

    pub fn norm_sq(&self) -> Result<Polynomial> {
        self.dot(self)
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.0.iter().map(|p| p.eval(x)).collect()
    }
}

/// p = (1/D)·Σ c_e x^e with integer c_e, evaluated over a common denominator
/// so that only one fraction is reduced per evaluation.
#[derive(Clone, Debug)]
pub struct ExactPoly {
    dim: usize,
    degree: u32,
    denominator: BigInt,
    terms: Vec<(Exponents, BigInt)>,
}

impl ExactPoly {
    pub fn new(p: &Polynomial) -> Self {
        let denominator = p.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let terms = p
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), c.numer() * (&denominator / c.denom())))
            .collect();
        ExactPoly { dim: p.dim, degree: p.degree(), denominator, terms }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.dim, "evaluation point has wrong dimension");
        if self.terms.is_empty() {
            return Rational::zero();
        }
        // x_j = X_j / q over a common denominator q
        let q = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let numerators: Vec<BigInt> = x.iter().map(|v| v.numer() * (&q / v.denom())).collect();
        let top = self.degree as usize;
        let mut q_powers = Vec::with_capacity(top + 1);
        q_powers.push(BigInt::one());
        for i in 0..top {
            let next = &q_powers[i] * &q;
            q_powers.push(next);
        }
        let mut x_powers: Vec<Vec<BigInt>> = numerators.iter().map(|_| vec![BigInt::one()]).collect();
        let mut sum = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (j, &k) in e.iter().enumerate() {
                let row = &mut x_powers[j];
                while row.len() <= k as usize {
                    let next = row.last().unwrap() * &numerators[j];
                    row.push(next);
                }
                if k > 0 {
                    t *= &row[k as usize];
                }
            }
            sum += t * &q_powers[top - monomial_degree(e) as usize];
        }
        Rational::new(sum, &self.denominator * &q_powers[top])
    }
}

/// Polynomial with `f64` coefficients, evaluated through a power table.
#[derive(Clone, Debug)]
pub struct FloatPoly {
    dim: usize,
    max_exp: Vec<usize>,
    terms: Vec<(Exponents, f64)>,
}

impl FloatPoly {
    pub fn new(p: &Polynomial) -> Self {
        let mut max_exp = vec![0usize; p.dim];
        for e in p.terms.keys() {
            for (m, &v) in max_exp.iter_mut().zip(e) {
                *m = (*m).max(v as usize);
            }
        }
        FloatPoly {
            dim: p.dim,
            max_exp,
            terms: p.terms.iter().map(|(e, c)| (e.clone(), rational::to_f64(c))).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut powers: Vec<Vec<f64>> = Vec::with_capacity(self.dim);
        for (j, &m) in self.max_exp.iter().enumerate() {
            let mut row = Vec::with_capacity(m + 1);
            let mut v = 1.0;
            for _ in 0..=m {
                row.push(v);
                v *= x[j];
            }
            powers.push(row);
        }
        let mut sum = 0.0;
        let mut comp = 0.0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (j, &k) in e.iter().enumerate() {
                t *= powers[j][k as usize];
            }
            // Neumaier summation
            let s = sum + t;
            if sum.abs() >= t.abs() {
                comp += (sum - s) + t;
            } else {
                comp += (t - s) + sum;
            }
            sum = s;
        }
        sum + comp
    }
}
