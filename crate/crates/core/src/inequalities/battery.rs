//! Reproducible test functions: random polynomials and strictly positive
//! Gaussian-weighted functions (ε + q²)e^{−β‖x‖²/2}.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::{Exponents, FloatPoly, Polynomial};
use crate::rational::{self, Rational};

pub const MAX_DEGREE: u32 = 8;
pub const DEFAULT_SEED: u64 = 20_240_917;
pub const DEFAULT_SIZE: usize = 30;
/// Positive members are costlier to integrate; their count is capped.
pub const MAX_POSITIVE: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionSpec {
    Polynomial(Polynomial),
    /// p(x) e^{−β‖x‖²/2}.
    GaussianPoly { p: Polynomial, beta: Rational },
    /// (ε + q(x)²) e^{−β‖x‖²/2}.
    PositiveGaussianPoly { q: Polynomial, beta: Rational, eps: Rational },
}

impl FunctionSpec {
    pub fn positive(q: Polynomial, beta: Rational, eps: Rational) -> Result<Self> {
        if !beta.is_positive() || !eps.is_positive() {
            return Err(Error::InvalidArgument("positive Gaussian functions need β > 0 and ε > 0".into()));
        }
        Ok(FunctionSpec::PositiveGaussianPoly { q, beta, eps })
    }

    pub fn dim(&self) -> usize {
        match self {
            FunctionSpec::Polynomial(p) | FunctionSpec::GaussianPoly { p, .. } => p.dim(),
            FunctionSpec::PositiveGaussianPoly { q, .. } => q.dim(),
        }
    }

    /// The polynomial factor P and the Gaussian scale β of f = P e^{−β‖x‖²/2}
    /// (β = 0 for a bare polynomial).
    pub fn split(&self) -> Result<(Polynomial, Rational)> {
        Ok(match self {
            FunctionSpec::Polynomial(p) => (p.clone(), Rational::zero()),
            FunctionSpec::GaussianPoly { p, beta } => (p.clone(), beta.clone()),
            FunctionSpec::PositiveGaussianPoly { q, beta, eps } => {
                (&q.try_mul(q)? + &Polynomial::constant(q.dim(), eps.clone()), beta.clone())
            }
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let (p, beta) = self.split().expect("battery polynomials stay under the degree cap");
        let r2: f64 = x.iter().map(|v| v * v).sum();
        p.eval(x) * (-0.5 * rational::to_f64(&beta) * r2).exp()
    }

    pub fn describe(&self) -> String {
        match self {
            FunctionSpec::Polynomial(p) => p.to_string(),
            FunctionSpec::GaussianPoly { p, beta } => format!("({p})*exp(-{}|x|^2/2)", rational::format(beta)),
            FunctionSpec::PositiveGaussianPoly { q, beta, eps } => {
                format!("({} + ({q})^2)*exp(-{}|x|^2/2)", rational::format(eps), rational::format(beta))
            }
        }
    }
}

/// Evaluates f = P e^{−β‖x‖²/2} quickly once split.
#[derive(Clone, Debug)]
pub struct SplitFunction {
    pub poly: Polynomial,
    pub beta: Rational,
    pub float: FloatPoly,
}

impl SplitFunction {
    pub fn new(f: &FunctionSpec) -> Result<Self> {
        let (poly, beta) = f.split()?;
        let float = poly.to_float();
        Ok(SplitFunction { poly, beta, float })
    }

    pub fn beta_f64(&self) -> f64 {
        rational::to_f64(&self.beta)
    }
}

#[derive(Clone, Debug)]
pub struct Battery {
    pub seed: u64,
    pub dim: usize,
    pub polynomials: Vec<Polynomial>,
    pub positives: Vec<FunctionSpec>,
}

/// A coefficient p/q with q ≤ 4, nonzero, |p/q| ≤ bound.
fn coefficient(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    loop {
        let q = rng.gen_range(1..=4i64);
        let p = rng.gen_range(-bound * q..=bound * q);
        if p != 0 {
            return rational::ratio(p, q);
        }
    }
}

fn exponents(rng: &mut ChaCha8Rng, dim: usize, degree: u32) -> Exponents {
    let mut e = vec![0u16; dim];
    for _ in 0..degree {
        e[rng.gen_range(0..dim)] += 1;
    }
    e
}

/// A random polynomial with 1–`max_terms` distinct monomials of degree ≤ `max_degree`.
pub fn random_polynomial(rng: &mut ChaCha8Rng, dim: usize, max_degree: u32, max_terms: usize, bound: i64) -> Polynomial {
    let n = rng.gen_range(1..=max_terms);
    let mut terms: Vec<(Exponents, Rational)> = Vec::with_capacity(n);
    for _ in 0..n {
        let deg = rng.gen_range(0..=max_degree);
        let e = exponents(rng, dim, deg);
        let c = coefficient(rng, bound);
        if terms.iter().all(|(f, _)| *f != e) {
            terms.push((e, c));
        }
    }
    Polynomial::from_terms(dim, terms)
}

impl Battery {
    /// `size` polynomials of degree ≤ 8 with coefficients in [−3, 3], and
    /// min(size, MAX_POSITIVE) positive functions with deg q ≤ 2, |coefficients| ≤ 1,
    /// ε = 1/10 and β alternating between 1 and 2.
    pub fn generate(dim: usize, seed: u64, size: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let polynomials = (0..size).map(|_| random_polynomial(&mut rng, dim, MAX_DEGREE, 6, 3)).collect();
        let positives = (0..size.min(MAX_POSITIVE))
            .map(|i| {
                let q = random_polynomial(&mut rng, dim, 2, 3, 1);
                let beta = rational::int(1 + (i % 2) as i64);
                FunctionSpec::PositiveGaussianPoly { q, beta, eps: rational::ratio(1, 10) }
            })
            .collect();
        Battery { seed, dim, polynomials, positives }
    }

    /// Consecutive polynomials paired up.
    pub fn pairs(&self) -> impl Iterator<Item = (&Polynomial, &Polynomial)> {
        self.polynomials.chunks_exact(2).map(|c| (&c[0], &c[1]))
    }

    /// Members of degree ≤ `n`.
    pub fn up_to_degree(&self, n: u32) -> impl Iterator<Item = &Polynomial> {
        self.polynomials.iter().filter(move |p| p.degree() <= n)
    }
}
