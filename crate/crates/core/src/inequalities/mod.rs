//! Checkers for the identities and inequalities of the Dunkl
//! Ornstein–Uhlenbeck calculus. Every check computes both sides, usually by
//! different paths, and emits a [`CheckReport`]; failures are reported, never
//! raised.

pub mod battery;
pub mod entropy;
pub mod gradient;
pub mod identity;
pub mod poincare;
pub mod report;
pub mod semigroup;
pub mod suite;

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::quadrature::{rule_mk, QuadratureRule, DEFAULT_ORDER};
use crate::rational::{self, Rational};
use crate::rootsys::RootSystem;
use crate::spectral::{build_basis, EigenBasis};

pub use battery::{Battery, FunctionSpec};
pub use report::{CheckKind, CheckReport, EvalPath, Status, Subject, Tolerances};
pub use suite::{run_suite, rule_convergence_report, Suite};

/// Knobs shared by all checks.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub order: usize,
    pub digits: u32,
    pub t_grid: Vec<f64>,
    pub seed: u64,
    pub battery_size: usize,
    pub tolerances: Tolerances,
    /// Points per axis of the evaluation lattice on [−3, 3]^d.
    pub grid_points: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            order: DEFAULT_ORDER,
            digits: crate::kernel::DEFAULT_PRECISION_DIGITS,
            t_grid: vec![0.1, 0.5, 1.0, 2.0],
            seed: battery::DEFAULT_SEED,
            battery_size: battery::DEFAULT_SIZE,
            tolerances: Tolerances::default(),
            grid_points: 9,
        }
    }
}

/// The equispaced lattice of `n` points per axis on [−3, 3]^d, exact.
pub fn default_grid(dim: usize, n: usize) -> Vec<Vec<Rational>> {
    let axis: Vec<Rational> = if n <= 1 {
        vec![Rational::zero()]
    } else {
        (0..n).map(|i| rational::ratio(6 * i as i64, n as i64 - 1) - rational::int(3)).collect()
    };
    let mut points: Vec<Vec<Rational>> = vec![Vec::new()];
    for _ in 0..dim {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |a| {
                    let mut q = p.clone();
                    q.push(a.clone());
                    q
                })
            })
            .collect();
    }
    points
}

pub fn format_point(x: &[Rational]) -> String {
    format!("({})", x.iter().map(rational::format).collect::<Vec<_>>().join(","))
}

/// One root system with its battery, grid and lazily built numeric objects.
#[derive(Debug)]
pub struct CheckContext {
    pub rs: RootSystem,
    pub group: String,
    pub settings: Settings,
    pub battery: Battery,
    pub grid: Vec<Vec<Rational>>,
    basis: OnceLock<std::result::Result<EigenBasis, String>>,
    rule: OnceLock<std::result::Result<QuadratureRule, String>>,
}

impl CheckContext {
    pub fn new(rs: RootSystem, settings: Settings) -> Self {
        let d = rs.dimension();
        let battery = Battery::generate(d, settings.seed, settings.battery_size);
        let grid = default_grid(d, settings.grid_points);
        CheckContext {
            group: rs.label(),
            rs,
            settings,
            battery,
            grid,
            basis: OnceLock::new(),
            rule: OnceLock::new(),
        }
    }

    /// The same checks with every multiplicity multiplied by `factor`.
    pub fn rescaled_multiplicities(&self, factor: &Rational) -> Result<Self> {
        Ok(CheckContext::new(self.rs.with_scaled_multiplicities(factor)?, self.settings.clone()))
    }

    pub fn dim(&self) -> usize {
        self.rs.dimension()
    }

    pub fn has_kernel(&self) -> bool {
        self.rs.capabilities().kernel_numeric
    }

    pub fn subject(&self, id: &str, function: impl Into<String>, params: impl Into<String>) -> Subject {
        Subject::new(id, &self.group, function, params)
    }

    /// Eigenbasis up to twice the battery degree, so that f² expands too.
    pub fn basis(&self) -> Result<&EigenBasis> {
        self.basis
            .get_or_init(|| build_basis(&self.rs, 2 * battery::MAX_DEGREE).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| Error::Capability(e.clone()))
    }

    /// Normalized m_k rule of the configured order.
    pub fn rule(&self) -> Result<&QuadratureRule> {
        self.rule
            .get_or_init(|| rule_mk(&self.rs, self.settings.order).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| Error::Capability(e.clone()))
    }

    pub fn grid_f64(&self) -> Vec<Vec<f64>> {
        self.grid.iter().map(|p| p.iter().map(rational::to_f64).collect()).collect()
    }

    /// Grid coordinates per axis, for tensor evaluation.
    pub fn grid_axes(&self) -> Vec<Vec<f64>> {
        let axis: Vec<f64> = default_grid(1, self.settings.grid_points).into_iter().map(|p| rational::to_f64(&p[0])).collect();
        vec![axis; self.dim()]
    }

    /// The reason numeric checks are unavailable, if they are.
    pub fn kernel_unavailable(&self) -> Option<String> {
        self.rs.require_kernel().err().map(|e| e.to_string())
    }
}

/// f = ⟨e_1, x⟩.
pub fn first_coordinate(dim: usize) -> Polynomial {
    Polynomial::var(dim, 0)
}

/// Exact values of a family of polynomials on a grid, stored per point as
/// integer numerators over one common denominator.
#[derive(Clone, Debug)]
pub(crate) struct GridValues {
    numerators: Vec<Vec<BigInt>>,
    denominators: Vec<BigInt>,
}

impl GridValues {
    pub(crate) fn new(parts: &[Polynomial], grid: &[Vec<Rational>]) -> Self {
        use rayon::prelude::*;
        let exact: Vec<_> = parts.iter().map(Polynomial::to_exact).collect();
        let (numerators, denominators) = grid
            .par_iter()
            .map(|x| {
                let values: Vec<Rational> = exact.iter().map(|p| p.eval(x)).collect();
                let den = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
                (values.iter().map(|v| v.numer() * (&den / v.denom())).collect(), den)
            })
            .unzip();
        GridValues { numerators, denominators }
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.numerators.first().is_none_or(|v| v.is_empty())
    }

    /// Σ_n ρ^n v_n(x_i), exact.
    pub(crate) fn combine(&self, i: usize, rho: &DyadicPowers) -> Rational {
        let sum = self.numerators[i].iter().zip(&rho.scaled).fold(BigInt::zero(), |acc, (a, r)| acc + a * r);
        Rational::new(sum, &self.denominators[i] * &rho.denominator)
    }
}

/// Powers of a dyadic ρ = R/2^s over the common denominator 2^{s(N−1)}.
#[derive(Clone, Debug)]
pub(crate) struct DyadicPowers {
    pub rho: Rational,
    scaled: Vec<BigInt>,
    denominator: BigInt,
}

impl DyadicPowers {
    /// ρ = ⌊e^{−t}·2^bits⌉/2^bits, powers 0..n.
    pub(crate) fn exp_neg(t: f64, bits: u64, n: usize) -> Result<Self> {
        let e = rational::exp_approx(&rational::from_f64(-t)?, bits + 16);
        let r: BigInt = ((e * Rational::from_integer(BigInt::one() << bits)).round()).to_integer();
        let n = n.max(1);
        let scaled = (0..n).map(|k| num_traits::pow(r.clone(), k) << (bits as usize * (n - 1 - k))).collect();
        Ok(DyadicPowers {
            rho: Rational::new(r, BigInt::one() << bits),
            scaled,
            denominator: BigInt::one() << (bits as usize * (n - 1)),
        })
    }
}

/// max(1, |a|, |b|), the factor applied to relative tolerances.
pub fn scale(a: f64, b: f64) -> f64 {
    1f64.max(a.abs()).max(b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_the_nine_point_lattice() {
        let g = default_grid(2, 9);
        assert_eq!(g.len(), 81);
        assert_eq!(g[0], vec![rational::int(-3), rational::int(-3)]);
        assert_eq!(g[1][1], rational::ratio(-9, 4));
        assert_eq!(g[80], vec![rational::int(3), rational::int(3)]);
        assert_eq!(format_point(&g[1]), "(-3,-9/4)");
    }
}
