//! The kernels K and Q of the Dunkl Ornstein–Uhlenbeck semigroup and the
//! quadrature realization O_t f(x) = ∫ f(y) Q(e^{−t}, x, y) dm_k(y).
//!
//! For Z₂^d both kernels factor over the axes:
//!
//! ```text
//! ln Q_i(τ, x, y) = −(k_i+½) ln s² − τ²(x² + y²)/(2s²) + ln E_{k_i}(τxy/s²),   s² = 1 − τ²
//! ```
//!
//! As τ → 1 the kernel concentrates like e^{−y²/(2s²)}, far narrower than the
//! Gaussian of m_k, so the y-integral uses a Gauss rule for the scale
//! β = 1 + τ²/(2s²) and carries e^{(β−1)y²/2} in the integrand. O_t is then a
//! tensor product of per-axis transition matrices.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::KernelEvaluator;
use crate::numeric::NeumaierSum;
use crate::poly::{dunkl_gradient, Polynomial};
use crate::quadrature::{mass_1d, rule_1d, QuadratureRule};
use crate::rational::{self, Rational};
use crate::rootsys::RootSystem;

/// Node contributions below e^{−SKIP_LOG} relative to O(1) are dropped.
const SKIP_LOG: f64 = 200.0;

fn check_tau(tau: f64) -> Result<()> {
    if (0.0..1.0).contains(&tau) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("kernel parameter must lie in [0, 1), got {tau}")))
    }
}

/// K and Q for a product root system.
#[derive(Clone, Debug)]
pub struct MehlerKernel {
    ks: Vec<Rational>,
    evaluator: KernelEvaluator,
}

impl MehlerKernel {
    pub fn new(rs: &RootSystem) -> Result<Self> {
        Self::with_evaluator(rs, KernelEvaluator::default())
    }

    pub fn with_evaluator(rs: &RootSystem, evaluator: KernelEvaluator) -> Result<Self> {
        rs.require_kernel()?;
        Ok(MehlerKernel { ks: rs.axis_multiplicities()?, evaluator })
    }

    fn check_point(&self, x: &[f64], y: &[f64]) -> Result<()> {
        if x.len() != self.ks.len() || y.len() != self.ks.len() {
            return Err(Error::DimensionMismatch { expected: self.ks.len(), found: x.len().max(y.len()) });
        }
        Ok(())
    }

    pub fn ln_q(&self, tau: f64, x: &[f64], y: &[f64]) -> Result<f64> {
        check_tau(tau)?;
        self.check_point(x, y)?;
        let s2 = 1.0 - tau * tau;
        let mut acc = 0.0;
        for ((k, &a), &b) in self.ks.iter().zip(x).zip(y) {
            acc += ln_q_axis(&self.evaluator, k, tau, s2, a, b)?;
        }
        Ok(acc)
    }

    /// Q(τ, x, y) = e^{‖y‖²/2} K(τ, x, y).
    pub fn kernel_q(&self, tau: f64, x: &[f64], y: &[f64]) -> Result<f64> {
        Ok(self.ln_q(tau, x, y)?.exp())
    }

    /// K(τ, x, y) = (1−τ²)^{−γ−d/2} e^{−(τ²‖x‖²+‖y‖²)/(2(1−τ²))} E_k(τx/s, y/s).
    pub fn kernel_k(&self, tau: f64, x: &[f64], y: &[f64]) -> Result<f64> {
        let y2: f64 = y.iter().map(|v| v * v).sum();
        Ok((self.ln_q(tau, x, y)? - 0.5 * y2).exp())
    }

    /// (1−τ²)^{−γ−d/2} e^{−(τ‖x‖−‖y‖)²/(2(1−τ²))}.
    pub fn kernel_k_bound(&self, tau: f64, x: &[f64], y: &[f64]) -> Result<f64> {
        check_tau(tau)?;
        self.check_point(x, y)?;
        let s2 = 1.0 - tau * tau;
        let exponent: f64 = self.ks.iter().map(|k| rational::to_f64(k) + 0.5).sum();
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok((-exponent * s2.ln() - (tau * nx - ny).powi(2) / (2.0 * s2)).exp())
    }
}

fn ln_q_axis(ev: &KernelEvaluator, k: &Rational, tau: f64, s2: f64, x: f64, y: f64) -> Result<f64> {
    let kf = rational::to_f64(k);
    Ok(-(kf + 0.5) * s2.ln() - tau * tau * (x * x + y * y) / (2.0 * s2) + ev.ln_ek_1d(k, tau * x * y / s2)?)
}

/// Upper bound on ln Q_i from E_k(u) ≤ e^{|u|}.
fn ln_q_axis_bound(k: f64, tau: f64, s2: f64, x: f64, y: f64) -> f64 {
    -(k + 0.5) * s2.ln() - (tau * x.abs() - y.abs()).powi(2) / (2.0 * s2) + 0.5 * y * y
}

pub fn kernel_k(rs: &RootSystem, tau: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    MehlerKernel::new(rs)?.kernel_k(tau, x, y)
}

pub fn kernel_q(rs: &RootSystem, tau: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    MehlerKernel::new(rs)?.kernel_q(tau, x, y)
}

#[derive(Clone, Debug)]
struct AxisTransition {
    k: Rational,
    nodes: Vec<f64>,
    /// ln(w_j c_k) + (β − 1 − β_f) y_j²/2 for the Gauss weights w_j of scale β.
    log_weights: Vec<f64>,
}

/// O_t (or ∫ · Q(τ,x,·) dm_k for a kernel parameter τ) on a product group.
#[derive(Clone, Debug)]
pub struct OuQuadrature {
    tau: f64,
    s2: f64,
    beta: f64,
    gaussian_beta: f64,
    order: usize,
    axes: Vec<AxisTransition>,
    evaluator: KernelEvaluator,
}

impl OuQuadrature {
    /// O_t with τ = e^{−t}; t must be positive.
    pub fn new(rs: &RootSystem, t: f64, order: usize) -> Result<Self> {
        Self::build(rs, t, order, 0.0, KernelEvaluator::default())
    }

    /// O_t for integrands f(y)e^{−β_f‖y‖²/2} where only f is evaluated at nodes.
    pub fn with_gaussian_factor(rs: &RootSystem, t: f64, order: usize, beta_f: f64) -> Result<Self> {
        Self::build(rs, t, order, beta_f, KernelEvaluator::default())
    }

    pub fn build(rs: &RootSystem, t: f64, order: usize, beta_f: f64, evaluator: KernelEvaluator) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("quadrature semigroup needs t > 0, got {t}")));
        }
        // s² = 1 − e^{−2t} without cancellation at small t
        Self::from_parameter(rs, (-t).exp(), -(-2.0 * t).exp_m1(), order, beta_f, evaluator)
    }

    /// The kernel-parameter form: integrates against Q(τ, x, ·) dm_k.
    pub fn for_kernel_parameter(rs: &RootSystem, tau: f64, order: usize) -> Result<Self> {
        check_tau(tau)?;
        Self::from_parameter(rs, tau, 1.0 - tau * tau, order, 0.0, KernelEvaluator::default())
    }

    fn from_parameter(
        rs: &RootSystem,
        tau: f64,
        s2: f64,
        order: usize,
        beta_f: f64,
        evaluator: KernelEvaluator,
    ) -> Result<Self> {
        rs.require_kernel()?;
        if !(beta_f >= 0.0 && beta_f.is_finite()) {
            return Err(Error::InvalidArgument(format!("Gaussian factor must be nonnegative, got {beta_f}")));
        }
        let beta = 1.0 + tau * tau / (2.0 * s2) + beta_f;
        let axes = rs
            .axis_multiplicities()?
            .into_iter()
            .map(|k| {
                let rule = rule_1d(&k, beta, order)?;
                let ln_c = -mass_1d(&k, 1.0).ln();
                let axis = &rule.axes()[0];
                let log_weights = axis
                    .nodes
                    .iter()
                    .zip(&axis.weights)
                    .map(|(y, w)| w.ln() + ln_c + 0.5 * (beta - 1.0 - beta_f) * y * y)
                    .collect();
                Ok(AxisTransition { k, nodes: axis.nodes.clone(), log_weights })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OuQuadrature { tau, s2, beta, gaussian_beta: beta_f, order, axes, evaluator })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn rule_beta(&self) -> f64 {
        self.beta
    }

    pub fn gaussian_beta(&self) -> f64 {
        self.gaussian_beta
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn node_count(&self) -> usize {
        self.axes.iter().map(|a| a.nodes.len()).product()
    }

    /// Row i holds the weights y_j ↦ w_j c_k Q_i(τ, x_i, y_j) e^{(β−1−β_f)y_j²/2}.
    pub fn transition_row(&self, axis: usize, x: f64) -> Result<Vec<f64>> {
        let a = &self.axes[axis];
        let kf = rational::to_f64(&a.k);
        a.nodes
            .iter()
            .zip(&a.log_weights)
            .map(|(&y, &lw)| {
                if lw + ln_q_axis_bound(kf, self.tau, self.s2, x, y) < -SKIP_LOG {
                    return Ok(0.0);
                }
                Ok((lw + ln_q_axis(&self.evaluator, &a.k, self.tau, self.s2, x, y)?).exp())
            })
            .collect()
    }

    fn transition_matrix(&self, axis: usize, targets: &[f64]) -> Result<Vec<Vec<f64>>> {
        targets.par_iter().map(|&x| self.transition_row(axis, x)).collect()
    }

    /// f at the tensor nodes, last axis fastest.
    pub fn node_values<F: Fn(&[f64]) -> f64 + Sync>(&self, f: F) -> Vec<f64> {
        let d = self.axes.len();
        let n = self.node_count();
        (0..n)
            .into_par_iter()
            .map(|flat| {
                let mut rest = flat;
                let mut point = vec![0.0; d];
                for axis in (0..d).rev() {
                    let len = self.axes[axis].nodes.len();
                    point[axis] = self.axes[axis].nodes[rest % len];
                    rest /= len;
                }
                f(&point)
            })
            .collect()
    }

    /// O_t applied to node values, evaluated on the tensor grid of `targets`
    /// (one coordinate list per axis, output last axis fastest).
    pub fn apply_on_grid(&self, values: &[f64], targets: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.on_grid(targets)?.apply(values)
    }

    /// The transition matrices onto a tensor grid, for reuse across functions.
    pub fn on_grid(&self, targets: &[Vec<f64>]) -> Result<GridOperator> {
        if targets.len() != self.axes.len() {
            return Err(Error::DimensionMismatch { expected: self.axes.len(), found: targets.len() });
        }
        let matrices = targets.iter().enumerate().map(|(axis, xs)| self.transition_matrix(axis, xs)).collect::<Result<_>>()?;
        Ok(GridOperator { shape: self.axes.iter().map(|a| a.nodes.len()).collect(), matrices })
    }

    /// O_t f(x) from precomputed node values.
    pub fn apply(&self, values: &[f64], x: &[f64]) -> Result<f64> {
        let targets: Vec<Vec<f64>> = x.iter().map(|&v| vec![v]).collect();
        Ok(self.apply_on_grid(values, &targets)?[0])
    }

    pub fn eval<F: Fn(&[f64]) -> f64 + Sync>(&self, f: F, x: &[f64]) -> Result<f64> {
        self.apply(&self.node_values(f), x)
    }

    /// The functional values ↦ O_t f(x) at a fixed point, for reuse across functions.
    pub fn at_point(&self, x: &[f64]) -> Result<PointOperator> {
        if x.len() != self.axes.len() {
            return Err(Error::DimensionMismatch { expected: self.axes.len(), found: x.len() });
        }
        let rows = x.iter().enumerate().map(|(axis, &v)| self.transition_row(axis, v)).collect::<Result<_>>()?;
        Ok(PointOperator { rows })
    }
}

/// O_t at one point: one transition row per axis.
#[derive(Clone, Debug)]
pub struct PointOperator {
    rows: Vec<Vec<f64>>,
}

impl PointOperator {
    pub fn apply(&self, values: &[f64]) -> f64 {
        let mut data = values.to_vec();
        // contract the last axis first so each step is a matrix-vector product
        for row in self.rows.iter().rev() {
            let len = row.len();
            data = data.chunks_exact(len).map(|c| c.iter().zip(row).map(|(a, b)| a * b).sum()).collect();
        }
        data[0]
    }
}

/// O_t from the rule nodes onto a fixed tensor grid.
#[derive(Clone, Debug)]
pub struct GridOperator {
    shape: Vec<usize>,
    matrices: Vec<Vec<Vec<f64>>>,
}

impl GridOperator {
    pub fn target_count(&self) -> usize {
        self.matrices.iter().map(|m| m.len()).product()
    }

    pub fn apply(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.shape.iter().product::<usize>() {
            return Err(Error::InvalidArgument("node value count does not match the rule".into()));
        }
        let mut shape = self.shape.clone();
        let mut data = values.to_vec();
        for (axis, m) in self.matrices.iter().enumerate() {
            data = mode_product(&data, &shape, axis, m);
            shape[axis] = m.len();
        }
        Ok(data)
    }
}

/// Contracts `data` (row-major, `shape`) along `axis` with `m` (rows × shape[axis]).
fn mode_product(data: &[f64], shape: &[usize], axis: usize, m: &[Vec<f64>]) -> Vec<f64> {
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let len = shape[axis];
    let rows = m.len();
    let mut out = vec![0.0; outer * rows * inner];
    out.par_chunks_mut(rows * inner).enumerate().for_each(|(o, block)| {
        let src = &data[o * len * inner..(o + 1) * len * inner];
        for (a, row) in m.iter().enumerate() {
            let dst = &mut block[a * inner..(a + 1) * inner];
            for (j, &w) in row.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let s = &src[j * inner..(j + 1) * inner];
                for (d, v) in dst.iter_mut().zip(s) {
                    *d += w * v;
                }
            }
        }
    });
    out
}

fn check_rule(rs: &RootSystem, rule: &QuadratureRule) -> Result<usize> {
    let ks = rs.axis_multiplicities()?;
    if !rule.is_normalized() || rule.dimension() != ks.len() || ks.iter().zip(rule.axes()).any(|(k, a)| *k != a.k) {
        return Err(Error::InvalidArgument(format!("rule is not a normalized rule for {}", rs.label())));
    }
    let order = rule.axes()[0].order();
    if rule.axes().iter().any(|a| a.order() != order) {
        return Err(Error::InvalidArgument("semigroup quadrature needs equal orders on every axis".into()));
    }
    Ok(order)
}

/// O_t f(x); the rule fixes the order, the scale is adapted to the kernel.
pub fn ou_quadrature<F: Fn(&[f64]) -> f64 + Sync>(
    rs: &RootSystem,
    f: F,
    t: f64,
    x: &[f64],
    rule: &QuadratureRule,
) -> Result<f64> {
    rs.require_kernel()?;
    let order = check_rule(rs, rule)?;
    if t == 0.0 {
        return Ok(f(x));
    }
    OuQuadrature::new(rs, t, order)?.eval(f, x)
}

/// (O_t T_1 f, …, O_t T_d f)(x).
pub fn ou_vector(rs: &RootSystem, f: &Polynomial, t: f64, x: &[f64], rule: &QuadratureRule) -> Result<Vec<f64>> {
    rs.require_kernel()?;
    let order = check_rule(rs, rule)?;
    let grad = dunkl_gradient(rs, f)?;
    let floats: Vec<_> = grad.components().iter().map(Polynomial::to_float).collect();
    if t == 0.0 {
        return Ok(floats.iter().map(|p| p.eval(x)).collect());
    }
    let ou = OuQuadrature::new(rs, t, order)?;
    floats.iter().map(|p| ou.eval(|y| p.eval(y), x)).collect()
}

/// Σ over nodes with compensation; exposed for callers that integrate O_t f.
pub fn weighted_sum(values: &[f64], weights: &[f64]) -> f64 {
    values.iter().zip(weights).map(|(v, w)| v * w).collect::<NeumaierSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_mk, rule_mk};
    use crate::rational::{int, ratio};
    use crate::rootsys::GroupKind;
    use crate::spectral::build_basis;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rank1(k: Rational) -> RootSystem {
        RootSystem::build(GroupKind::Rank1, &[k]).unwrap()
    }

    #[test]
    fn kernel_at_zero_parameter() {
        let rs = RootSystem::build(GroupKind::Z2Power(2), &[int(1), ratio(1, 2)]).unwrap();
        let mk = MehlerKernel::new(&rs).unwrap();
        for (x, y) in [([0.3, -1.0], [2.0, 0.5]), ([-2.5, 1.5], [0.0, -3.0])] {
            let y2: f64 = y.iter().map(|v| v * v).sum();
            assert!((mk.kernel_k(0.0, &x, &y).unwrap() - (-0.5 * y2).exp()).abs() < 1e-15);
            assert!((mk.kernel_q(0.0, &x, &y).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!(mk.kernel_k(1.0, &[0.0, 0.0], &[0.0, 0.0]).is_err());
        assert!(mk.kernel_k(-0.1, &[0.0, 0.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn classical_mehler_kernel_at_k_zero() {
        let mk = MehlerKernel::new(&rank1(int(0))).unwrap();
        for t in [0.1, 0.5, 0.9] {
            for (x, y) in [(0.5, -1.0), (2.0, 1.7), (-3.0, -0.2)] {
                let s2: f64 = 1.0 - t * t;
                let classical = (-(t * t * x * x + y * y - 2.0 * t * x * y) / (2.0 * s2)).exp() / s2.sqrt();
                let got = mk.kernel_k(t, &[x], &[y]).unwrap();
                assert!((got - classical).abs() <= 1e-13 * classical);
            }
        }
    }

    #[test]
    fn kernel_is_below_its_gaussian_bound() {
        for rs in [rank1(ratio(1, 2)), RootSystem::build(GroupKind::Z2Power(2), &[int(2), ratio(1, 2)]).unwrap()] {
            let mk = MehlerKernel::new(&rs).unwrap();
            let d = rs.dimension();
            for i in 0..20 {
                for j in 0..20 {
                    for t in [0.05, 0.3, 0.6, 0.9, 0.99] {
                        let x: Vec<f64> = (0..d).map(|a| -3.0 + 6.0 * i as f64 / 19.0 + 0.1 * a as f64).collect();
                        let y: Vec<f64> = (0..d).map(|a| -3.0 + 6.0 * j as f64 / 19.0 - 0.2 * a as f64).collect();
                        let k = mk.kernel_k(t, &x, &y).unwrap();
                        assert!(k >= 0.0);
                        assert!(k <= mk.kernel_k_bound(t, &x, &y).unwrap() * (1.0 + 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn q_is_symmetric() {
        let rs = RootSystem::build(GroupKind::Z2Power(3), &[int(1), int(0), ratio(3, 2)]).unwrap();
        let mk = MehlerKernel::new(&rs).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..100 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let y: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let t = rng.gen_range(0.0..0.95);
            let a = mk.kernel_q(t, &x, &y).unwrap();
            let b = mk.kernel_q(t, &y, &x).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.max(b));
        }
    }

    #[test]
    fn q_integrates_to_one() {
        for rs in [rank1(int(0)), rank1(ratio(1, 2)), rank1(int(2)), RootSystem::build(GroupKind::Z2Power(2), &[int(1), ratio(1, 2)]).unwrap()] {
            let d = rs.dimension();
            for tau in [0.1, 0.3, 0.5, 0.7, 0.9, 0.95] {
                let q = OuQuadrature::for_kernel_parameter(&rs, tau, 64).unwrap();
                let ones = vec![1.0; q.node_count()];
                for x in [-3.0, -1.2, 0.0, 2.0, 3.0] {
                    let pt = vec![x / (d as f64).sqrt(); d];
                    let v = q.apply(&ones, &pt).unwrap();
                    assert!((v - 1.0).abs() <= 1e-10, "tau={tau} x={x}: {v}");
                }
            }
        }
    }

    #[test]
    fn ou_quadrature_examples() {
        for k in [int(0), ratio(1, 2), int(2)] {
            let rs = rank1(k);
            let rule = rule_mk(&rs, 64).unwrap();
            for t in [0.05, 0.5, 2.0] {
                for x in [-2.5, 0.4, 3.0] {
                    let one = ou_quadrature(&rs, |_| 1.0, t, &[x], &rule).unwrap();
                    assert!((one - 1.0).abs() < 1e-10);
                    let lin = ou_quadrature(&rs, |y| y[0], t, &[x], &rule).unwrap();
                    assert!((lin - (-t).exp() * x).abs() < 1e-8);
                    let v = ou_vector(&rs, &"x1^2".parse().unwrap(), t, &[x], &rule).unwrap();
                    assert!((v[0] - (-t).exp() * 2.0 * x).abs() < 1e-8);
                }
            }
            assert_eq!(ou_quadrature(&rs, |y| y[0].sin(), 0.0, &[0.7], &rule).unwrap(), 0.7f64.sin());
            assert_eq!(ou_vector(&rs, &"x1^2".parse().unwrap(), 0.0, &[0.7], &rule).unwrap(), vec![1.4]);
        }
    }

    #[test]
    fn contraction_for_bounded_functions() {
        let rs = RootSystem::build(GroupKind::Z2Power(2), &[ratio(1, 2), int(1)]).unwrap();
        let f = |y: &[f64]| (3.0 * y[0]).sin() * (y[1] * y[1]).cos();
        for t in [0.1, 1.0] {
            let q = OuQuadrature::new(&rs, t, 64).unwrap();
            let vals = q.node_values(f);
            let grid = vec![(0..9).map(|i| -3.0 + 0.75 * i as f64).collect::<Vec<_>>(); 2];
            for v in q.apply_on_grid(&vals, &grid).unwrap() {
                assert!(v.abs() <= 1.0 + 1e-10);
            }
        }
    }

    #[test]
    fn matches_spectral_path() {
        let rs = RootSystem::build(GroupKind::Z2Power(2), &[int(1), ratio(1, 2)]).unwrap();
        let basis = build_basis(&rs, 8).unwrap();
        let p: Polynomial = "x1^4*x2^2 - 2*x1*x2^3 + 3/2*x2^2 - x1 + 1/3".parse().unwrap();
        let fp = p.to_float();
        for t in [0.05, 0.3, 1.0, 3.0] {
            let q = OuQuadrature::new(&rs, t, 64).unwrap();
            let vals = q.node_values(|y| fp.eval(y));
            let spec = basis.ou_spectral(&p, t).unwrap();
            let grid = vec![(0..9).map(|i| -3.0 + 0.75 * i as f64).collect::<Vec<_>>(); 2];
            let got = q.apply_on_grid(&vals, &grid).unwrap();
            let mut idx = 0;
            for a in &grid[0] {
                for b in &grid[1] {
                    let expect = spec.eval(&[*a, *b]);
                    assert!((got[idx] - expect).abs() < 1e-8, "t={t} x=({a},{b}): {} vs {expect}", got[idx]);
                    idx += 1;
                }
            }
        }
    }

    #[test]
    fn point_operator_matches_apply() {
        let rs = RootSystem::build(GroupKind::Z2Power(2), &[int(1), ratio(1, 2)]).unwrap();
        let q = OuQuadrature::new(&rs, 0.7, 32).unwrap();
        let vals = q.node_values(|y| y[0] * y[0] * y[1] - y[1] + 2.0);
        for x in [[0.3, -1.2], [2.5, 0.0]] {
            let a = q.apply(&vals, &x).unwrap();
            let b = q.at_point(&x).unwrap().apply(&vals);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn gaussian_factor_is_absorbed() {
        let rs = rank1(ratio(1, 2));
        let t = 0.4;
        let plain = OuQuadrature::new(&rs, t, 64).unwrap();
        let split = OuQuadrature::with_gaussian_factor(&rs, t, 64, 2.0).unwrap();
        let full = |y: &[f64]| (1.0 + y[0] * y[0]) * (-y[0] * y[0]).exp();
        let smooth = |y: &[f64]| 1.0 + y[0] * y[0];
        for x in [-2.0, 0.0, 1.3] {
            let a = plain.eval(full, &[x]).unwrap();
            let b = split.eval(smooth, &[x]).unwrap();
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn invariance_of_mk() {
        let rs = RootSystem::build(GroupKind::Z2Power(2), &[int(1), int(0)]).unwrap();
        let p: Polynomial = "x1^2*x2^2 + x1^3 - 4*x2 + 2".parse().unwrap();
        let fp = p.to_float();
        let outer = rule_mk(&rs, 24).unwrap();
        let exact = integrate_mk(&rs, |y| fp.eval(y), &outer).unwrap();
        for t in [0.1, 0.5, 2.0] {
            let q = OuQuadrature::new(&rs, t, 64).unwrap();
            let vals = q.node_values(|y| fp.eval(y));
            let axes: Vec<Vec<f64>> = outer.axes().iter().map(|a| a.nodes.clone()).collect();
            let on_grid = q.apply_on_grid(&vals, &axes).unwrap();
            let (_, w) = outer.nodes_and_weights();
            assert!((weighted_sum(&on_grid, &w) - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn rule_mismatch_is_rejected() {
        let rs = rank1(int(1));
        assert!(ou_quadrature(&rs, |_| 1.0, 1.0, &[0.0], &rule_mk(&rank1(int(2)), 8).unwrap()).is_err());
        assert!(OuQuadrature::new(&rs, 0.0, 8).is_err());
        let sym = RootSystem::build(GroupKind::SymmetricGroup(3), &[int(1)]).unwrap();
        assert!(matches!(MehlerKernel::new(&sym), Err(Error::Capability(_))));
    }
}
