//! Gauss rules for the generalized Hermite weights |x|^{2k} e^{−βx²/2}, their
//! tensor products over Z₂^d, and integration against m_k and ω_k.
//!
//! Recurrence coefficients come from the modified-moment-free Chebyshev
//! algorithm run in exact rational arithmetic on the moments, so no
//! precision is lost before the Jacobi matrix is formed. Nodes are then
//! polished by Newton steps on the orthonormal recurrence and the weights
//! are taken from the Christoffel function at the polished nodes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{One, Signed, Zero};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::poly::Polynomial;
use crate::rational::{self, Rational};
use crate::rootsys::RootSystem;

pub const DEFAULT_ORDER: usize = 64;

/// μ_{2m}/μ_0 = Π_{i<m} (2i + 2k + 1) for β = 1.
pub fn moment_ratio(k: &Rational, m: u32) -> Rational {
    let two = rational::int(2);
    (0..m).fold(Rational::one(), |acc, i| acc * (rational::int(2 * i as i64 + 1) + &two * k))
}

/// ∫ |x|^{2k} e^{−βx²/2} dx = β^{−(k+½)} 2^{k+½} Γ(k+½).
pub fn mass_1d(k: &Rational, beta: f64) -> f64 {
    let s = rational::to_f64(k) + 0.5;
    beta.powf(-s) * 2f64.powf(s) * gamma(s)
}

/// ∫ x^{2m} |x|^{2k} e^{−βx²/2} dx = β^{−(m+k+½)} 2^{m+k+½} Γ(m+k+½).
pub fn moments_1d(k: &Rational, beta: f64, m: u32) -> f64 {
    mass_1d(k, beta) * rational::to_f64(&moment_ratio(k, m)) / beta.powi(m as i32)
}

/// ∫ x^j |x|^{2k} e^{−βx²/2} dx for any power j; odd powers vanish.
pub fn moment_1d(k: &Rational, beta: f64, j: u32) -> f64 {
    if j % 2 == 1 {
        0.0
    } else {
        moments_1d(k, beta, j / 2)
    }
}

/// One axis of a rule: nodes increasing, weights positive.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisRule {
    pub k: Rational,
    pub beta: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub normalized: bool,
}

impl AxisRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().copied().collect::<NeumaierSum>().value()
    }
}

/// Tensor product of axis rules; a single axis is a 1-d rule.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    axes: Vec<AxisRule>,
}

impl QuadratureRule {
    pub fn axes(&self) -> &[AxisRule] {
        &self.axes
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(AxisRule::order).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_normalized(&self) -> bool {
        self.axes.iter().all(|a| a.normalized)
    }

    /// β shared by all axes, if any.
    pub fn beta(&self) -> Option<f64> {
        let b = self.axes.first()?.beta;
        self.axes.iter().all(|a| a.beta == b).then_some(b)
    }

    /// Visits every product node with its weight.
    pub fn for_each_node<F: FnMut(&[f64], f64)>(&self, mut visit: F) {
        let d = self.axes.len();
        if d == 0 || self.is_empty() {
            return;
        }
        let mut index = vec![0usize; d];
        let mut point: Vec<f64> = self.axes.iter().map(|a| a.nodes[0]).collect();
        loop {
            let w: f64 = self.axes.iter().zip(&index).map(|(a, &i)| a.weights[i]).product();
            visit(&point, w);
            let mut axis = d;
            loop {
                if axis == 0 {
                    return;
                }
                axis -= 1;
                index[axis] += 1;
                if index[axis] < self.axes[axis].order() {
                    point[axis] = self.axes[axis].nodes[index[axis]];
                    break;
                }
                index[axis] = 0;
                point[axis] = self.axes[axis].nodes[0];
            }
        }
    }

    pub fn nodes_and_weights(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut nodes = Vec::with_capacity(self.len());
        let mut weights = Vec::with_capacity(self.len());
        self.for_each_node(|x, w| {
            nodes.push(x.to_vec());
            weights.push(w);
        });
        (nodes, weights)
    }

    /// Σ w_i f(x_i), compensated.
    pub fn apply<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        let mut acc = NeumaierSum::new();
        self.for_each_node(|x, w| acc.add(w * f(x)));
        acc.value()
    }
}

/// Monic recurrence p_{j+1} = x p_j − b_j p_{j−1} for β = 1 (a_j = 0 by symmetry).
/// Entry j of the result is b_j for j = 1..n−1; entry 0 is μ_0 = 1.
pub fn recurrence_coefficients(k: &Rational, n: usize) -> Result<Vec<Rational>> {
    if n == 0 {
        return Err(Error::InvalidArgument("rule order must be at least 1".into()));
    }
    if k.is_negative() {
        return Err(Error::InvalidMultiplicity(format!("quadrature needs k ≥ 0, got {k}")));
    }
    let moments: Vec<Rational> = (0..2 * n)
        .map(|j| if j % 2 == 1 { Rational::zero() } else { moment_ratio(k, (j / 2) as u32) })
        .collect();
    chebyshev_algorithm(&moments, n).map(|(_, b)| b)
}

/// Chebyshev's algorithm: recurrence coefficients (a, b) from 2n ordinary moments.
fn chebyshev_algorithm(mu: &[Rational], n: usize) -> Result<(Vec<Rational>, Vec<Rational>)> {
    let len = 2 * n;
    let mut a = vec![Rational::zero(); n];
    let mut b = vec![Rational::zero(); n];
    a[0] = &mu[1] / &mu[0];
    b[0] = mu[0].clone();
    let mut sigma_prev = vec![Rational::zero(); len];
    let mut sigma = mu.to_vec();
    for j in 1..n {
        let mut next = vec![Rational::zero(); len];
        for l in j..(len - j) {
            next[l] = &sigma[l + 1] - &a[j - 1] * &sigma[l] - &b[j - 1] * &sigma_prev[l];
        }
        if !next[j].is_positive() {
            return Err(Error::Numerical(format!("moment sequence is not positive definite at order {j}")));
        }
        a[j] = &next[j + 1] / &next[j] - &sigma[j] / &sigma[j - 1];
        b[j] = &next[j] / &sigma[j - 1];
        sigma_prev = sigma;
        sigma = next;
    }
    Ok((a, b))
}

/// Orthonormal recurrence values p̃_0..p̃_n at x and the derivative of p̃_n.
fn orthonormal_values(sqrt_b: &[f64], n: usize, x: f64) -> (Vec<f64>, f64) {
    let mut p = vec![0.0; n + 1];
    let mut dp = vec![0.0; n + 1];
    p[0] = 1.0;
    for j in 0..n {
        let prev = if j > 0 { p[j - 1] } else { 0.0 };
        let dprev = if j > 0 { dp[j - 1] } else { 0.0 };
        let sb = if j > 0 { sqrt_b[j] } else { 0.0 };
        p[j + 1] = (x * p[j] - sb * prev) / sqrt_b[j + 1];
        dp[j + 1] = (p[j] + x * dp[j] - sb * dprev) / sqrt_b[j + 1];
    }
    (p, dp[n])
}

struct BaseRule {
    nodes: Vec<f64>,
    /// Weights against the probability measure with β = 1.
    probability_weights: Vec<f64>,
}

fn build_base(k: &Rational, n: usize) -> Result<BaseRule> {
    if n == 0 {
        return Err(Error::InvalidArgument("rule order must be at least 1".into()));
    }
    // b_1..b_n, where b_n is needed only for the Newton polish of p̃_n
    let b = recurrence_coefficients(k, n + 1)?;
    let sqrt_b: Vec<f64> = b.iter().map(|v| rational::to_f64(v).sqrt()).collect();
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for j in 1..n {
        jacobi[(j, j - 1)] = sqrt_b[j];
        jacobi[(j - 1, j)] = sqrt_b[j];
    }
    let mut nodes: Vec<f64> = if n == 1 {
        vec![0.0]
    } else {
        SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect()
    };
    nodes.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, dpn) = orthonormal_values(&sqrt_b, n, *x);
            if dpn == 0.0 {
                break;
            }
            let step = p[n] / dpn;
            *x -= step;
            if step.abs() <= 1e-17 * x.abs().max(1.0) {
                break;
            }
        }
        let (p, _) = orthonormal_values(&sqrt_b, n, *x);
        let christoffel: NeumaierSum = p[..n].iter().map(|v| v * v).collect();
        weights.push(1.0 / christoffel.value());
    }
    // the weight is even: enforce exact symmetry
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -x;
        nodes[j] = x;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) || nodes.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::Numerical(format!("Gauss rule of order {n} for k = {k} broke down")));
    }
    let total: f64 = weights.iter().copied().collect::<NeumaierSum>().value();
    for w in weights.iter_mut() {
        *w /= total;
    }
    Ok(BaseRule { nodes, probability_weights: weights })
}

fn base_rule(k: &Rational, n: usize) -> Result<Arc<BaseRule>> {
    static CACHE: OnceLock<Mutex<HashMap<(Rational, usize), Arc<BaseRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&(k.clone(), n)) {
        return Ok(hit.clone());
    }
    let built = Arc::new(build_base(k, n)?);
    cache.lock().unwrap().insert((k.clone(), n), built.clone());
    Ok(built)
}

/// n-point Gauss rule for |x|^{2k} e^{−βx²/2}, weights summing to the mass.
pub fn rule_1d(k: &Rational, beta: f64, n: usize) -> Result<QuadratureRule> {
    Ok(QuadratureRule { axes: vec![axis_rule(k, beta, n, false)?] })
}

/// Same nodes, weights rescaled to sum to one.
pub fn rule_1d_normalized(k: &Rational, beta: f64, n: usize) -> Result<QuadratureRule> {
    Ok(QuadratureRule { axes: vec![axis_rule(k, beta, n, true)?] })
}

fn axis_rule(k: &Rational, beta: f64, n: usize, normalized: bool) -> Result<AxisRule> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidArgument(format!("rule scale β must be positive, got {beta}")));
    }
    let base = base_rule(k, n)?;
    let scale = beta.sqrt().recip();
    let mass = if normalized { 1.0 } else { mass_1d(k, beta) };
    Ok(AxisRule {
        k: k.clone(),
        beta,
        nodes: base.nodes.iter().map(|x| x * scale).collect(),
        weights: base.probability_weights.iter().map(|w| w * mass).collect(),
        normalized,
    })
}

pub fn tensor(rules: &[QuadratureRule]) -> QuadratureRule {
    QuadratureRule { axes: rules.iter().flat_map(|r| r.axes.iter().cloned()).collect() }
}

/// Product rule for rs with one axis per coordinate.
pub fn rule_for(rs: &RootSystem, beta: f64, n: usize, normalized: bool) -> Result<QuadratureRule> {
    rs.require_kernel()?;
    let axes = rs
        .axis_multiplicities()?
        .iter()
        .map(|k| axis_rule(k, beta, n, normalized))
        .collect::<Result<_>>()?;
    Ok(QuadratureRule { axes })
}

/// Normalized product rule for m_k.
pub fn rule_mk(rs: &RootSystem, n: usize) -> Result<QuadratureRule> {
    rule_for(rs, 1.0, n, true)
}

/// Gauss rule for x^{2k} on [0, 1] (Legendre when k = 0): nodes and weights,
/// the weights summing to 1/(2k+1).
pub fn jacobi_panel_rule(k: &Rational, m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if m == 0 {
        return Err(Error::InvalidArgument("panel rule needs at least one point".into()));
    }
    if k.is_negative() {
        return Err(Error::InvalidMultiplicity(format!("quadrature needs k ≥ 0, got {k}")));
    }
    let s = rational::int(2) * k + rational::int(1);
    let mu0 = s.recip();
    let moments: Vec<Rational> = (0..2 * m).map(|j| (&s + rational::int(j as i64)).recip()).collect();
    let (a, b) = chebyshev_algorithm(&moments, m)?;
    let mut jacobi = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        jacobi[(j, j)] = rational::to_f64(&a[j]);
        if j > 0 {
            let off = rational::to_f64(&b[j]).sqrt();
            jacobi[(j, j - 1)] = off;
            jacobi[(j - 1, j)] = off;
        }
    }
    let eig = SymmetricEigen::new(jacobi);
    let total = rational::to_f64(&mu0);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| (eig.eigenvalues[i], total * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    if pairs.iter().any(|(x, w)| !(*x > 0.0 && *x < 1.0 && *w > 0.0)) {
        return Err(Error::Numerical(format!("panel rule of order {m} for k = {k} broke down")));
    }
    Ok(pairs.into_iter().unzip())
}

/// Composite rule for |x|^{2k} e^{−βx²/2} on [−L, L]: `panels` panels of
/// width L/panels on each side, `m` points each. The panel at the origin
/// carries |x|^{2k} in its Gauss weight; the others multiply it in. Suited to
/// integrands with singularities close to the real axis, where a single Gauss
/// rule converges slowly.
pub fn composite_axis_rule(k: &Rational, beta: f64, half_width: f64, panels: usize, m: usize) -> Result<AxisRule> {
    if !(beta.is_finite() && beta > 0.0) || !(half_width.is_finite() && half_width > 0.0) || panels == 0 {
        return Err(Error::InvalidArgument("composite rule needs β > 0, L > 0 and at least one panel".into()));
    }
    let kf = rational::to_f64(k);
    let h = half_width / panels as f64;
    let (jn, jw) = jacobi_panel_rule(k, m)?;
    let (ln, lw) = jacobi_panel_rule(&Rational::zero(), m)?;
    let mut half: Vec<(f64, f64)> = Vec::with_capacity(panels * m);
    let hk = h.powf(2.0 * kf + 1.0);
    for (t, w) in jn.iter().zip(&jw) {
        let x = h * t;
        half.push((x, hk * w * (-0.5 * beta * x * x).exp()));
    }
    for j in 1..panels {
        for (t, w) in ln.iter().zip(&lw) {
            let x = h * (j as f64 + t);
            half.push((x, h * w * x.powf(2.0 * kf) * (-0.5 * beta * x * x).exp()));
        }
    }
    let mut nodes: Vec<f64> = half.iter().rev().map(|(x, _)| -x).collect();
    let mut weights: Vec<f64> = half.iter().rev().map(|(_, w)| *w).collect();
    nodes.extend(half.iter().map(|(x, _)| *x));
    weights.extend(half.iter().map(|(_, w)| *w));
    Ok(AxisRule { k: k.clone(), beta, nodes, weights, normalized: false })
}

/// Unnormalized composite product rule for e^{−β‖x‖²/2} ω_k.
pub fn composite_rule(rs: &RootSystem, beta: f64, half_width: f64, panels: usize, m: usize) -> Result<QuadratureRule> {
    rs.require_kernel()?;
    let axes = rs
        .axis_multiplicities()?
        .iter()
        .map(|k| composite_axis_rule(k, beta, half_width, panels, m))
        .collect::<Result<_>>()?;
    Ok(QuadratureRule { axes })
}

fn check_rule(rs: &RootSystem, rule: &QuadratureRule) -> Result<()> {
    rs.require_kernel()?;
    let ks = rs.axis_multiplicities()?;
    if ks.len() != rule.dimension() {
        return Err(Error::DimensionMismatch { expected: ks.len(), found: rule.dimension() });
    }
    if ks.iter().zip(rule.axes()).any(|(k, a)| *k != a.k) {
        return Err(Error::InvalidArgument(format!("rule multiplicities do not match {}", rs.label())));
    }
    Ok(())
}

/// ∫ f dm_k with a normalized β = 1 rule.
pub fn integrate_mk<F: Fn(&[f64]) -> f64>(rs: &RootSystem, f: F, rule: &QuadratureRule) -> Result<f64> {
    check_rule(rs, rule)?;
    if !rule.is_normalized() || rule.beta() != Some(1.0) {
        return Err(Error::InvalidArgument("integration against m_k needs a normalized β = 1 rule".into()));
    }
    Ok(rule.apply(f))
}

/// ∫ f(x) e^{−β‖x‖²/2} ω_k(x) dx; `f` is the smooth factor and β is the rule's scale.
pub fn integrate_wk<F: Fn(&[f64]) -> f64>(rs: &RootSystem, f: F, rule: &QuadratureRule) -> Result<f64> {
    check_rule(rs, rule)?;
    if rule.is_normalized() || rule.beta().is_none() {
        return Err(Error::InvalidArgument("integration against ω_k needs an unnormalized rule with one β".into()));
    }
    Ok(rule.apply(f))
}

/// c_k with c_k^{−1} = ∫ e^{−‖x‖²/2} ω_k(x) dx.
pub fn normalization_ck(rs: &RootSystem) -> Result<f64> {
    rs.require_kernel()?;
    Ok(rs.axis_multiplicities()?.iter().map(|k| 1.0 / mass_1d(k, 1.0)).product())
}

/// Exact ∫ p dm_k from the moment ratios.
pub fn expectation_exact(rs: &RootSystem, p: &Polynomial) -> Result<Rational> {
    rs.require_kernel()?;
    let ks = rs.axis_multiplicities()?;
    if p.dim() != ks.len() {
        return Err(Error::DimensionMismatch { expected: ks.len(), found: p.dim() });
    }
    let mut acc = Rational::zero();
    for (e, c) in p.terms() {
        if e.iter().any(|v| v % 2 == 1) {
            continue;
        }
        let mut t = c.clone();
        for (k, &v) in ks.iter().zip(e) {
            t *= moment_ratio(k, (v / 2) as u32);
        }
        acc += t;
    }
    Ok(acc)
}

/// ∫ p(x) e^{−β‖x‖²/2} ω_k(x) dx, exact up to the Gamma-function mass factor.
pub fn integral_wk_poly(rs: &RootSystem, p: &Polynomial, beta: f64) -> Result<f64> {
    rs.require_kernel()?;
    let ks = rs.axis_multiplicities()?;
    if p.dim() != ks.len() {
        return Err(Error::DimensionMismatch { expected: ks.len(), found: p.dim() });
    }
    let mass: f64 = ks.iter().map(|k| mass_1d(k, beta)).product();
    let mut acc = NeumaierSum::new();
    for (e, c) in p.terms() {
        if e.iter().any(|v| v % 2 == 1) {
            continue;
        }
        let mut t = c.clone();
        let mut half_degree = 0i32;
        for (k, &v) in ks.iter().zip(e) {
            t *= moment_ratio(k, (v / 2) as u32);
            half_degree += (v / 2) as i32;
        }
        acc.add(rational::to_f64(&t) / beta.powi(half_degree));
    }
    Ok(mass * acc.value())
}

/// Smooth non-polynomial probe for the pre-flight convergence check.
pub fn convergence_probe(x: &[f64]) -> f64 {
    let s: f64 = x.iter().sum();
    let r2: f64 = x.iter().map(|v| v * v).sum();
    s.cos() / (1.0 + r2 / 8.0)
}

/// (I_n, I_{2n}) for the probe against m_k.
pub fn rule_convergence(rs: &RootSystem, n: usize) -> Result<(f64, f64)> {
    let coarse = integrate_mk(rs, convergence_probe, &rule_mk(rs, n)?)?;
    let fine = integrate_mk(rs, convergence_probe, &rule_mk(rs, 2 * n)?)?;
    Ok((coarse, fine))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::generator_l;
    use crate::rational::{int, ratio};
    use crate::rootsys::GroupKind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn moment_examples() {
        assert!(rel(moments_1d(&int(0), 1.0, 0), (2.0 * std::f64::consts::PI).sqrt()) < 1e-15);
        for k in [int(0), ratio(1, 2), int(1), int(3)] {
            let r = moments_1d(&k, 1.0, 1) / moments_1d(&k, 1.0, 0);
            assert!(rel(r, 1.0 + 2.0 * rational::to_f64(&k)) < 1e-14);
            assert_eq!(moment_ratio(&k, 1), int(1) + &k * int(2));
        }
        assert_eq!(moment_1d(&int(1), 1.0, 3), 0.0);
        assert!(rel(moment_1d(&int(1), 2.0, 4), moments_1d(&int(1), 2.0, 2)) < 1e-15);
        // half-integer k: Γ(1) = 1 so the mass is 2/β
        assert!(rel(mass_1d(&ratio(1, 2), 1.0), 2.0) < 1e-15);
        assert!(rel(mass_1d(&ratio(1, 2), 4.0), 0.5) < 1e-15);
    }

    #[test]
    fn recurrence_matches_closed_form() {
        // b_n = n + 2k[n odd]
        for k in [int(0), ratio(1, 2), int(1), ratio(7, 3)] {
            let b = recurrence_coefficients(&k, 20).unwrap();
            for (n, bn) in b.iter().enumerate().skip(1) {
                let expect = int(n as i64) + if n % 2 == 1 { &k * int(2) } else { int(0) };
                assert_eq!(*bn, expect);
            }
        }
    }

    #[test]
    fn chebyshev_algorithm_rejects_degenerate_moments() {
        // a point mass at 0 has only one orthogonal polynomial
        let mu = vec![int(1), int(0), int(0), int(0)];
        assert!(chebyshev_algorithm(&mu, 2).is_err());
    }

    #[test]
    fn hermite_rule_matches_classical_values() {
        // k = 0, n = 10: nodes are √2 times the physicists' Hermite roots
        // (reference table from numpy.polynomial.hermite.hermgauss)
        let r = rule_1d_normalized(&int(0), 1.0, 10).unwrap();
        let a = &r.axes()[0];
        let physicists = [0.3429013272237046, 1.0366108297895136, 1.7566836492998816, 2.5327316742327897, 3.4361591188377374];
        let weights = [0.6108626337353258, 0.2401386110823147, 0.033874394455481106, 0.0013436457467812324, 7.640432855232641e-6];
        for i in 0..5 {
            let node = a.nodes[5 + i];
            assert!((node - physicists[i] * 2f64.sqrt()).abs() < 1e-12);
            assert!((a.weights[5 + i] - weights[i] / std::f64::consts::PI.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn rule_invariants_and_exactness() {
        for k in [int(0), ratio(1, 2), int(1), int(2)] {
            for n in [1usize, 2, 7, 8, 16, 64] {
                let rule = rule_1d(&k, 1.0, n).unwrap();
                let a = &rule.axes()[0];
                assert!(a.weights.iter().all(|w| *w > 0.0));
                assert!(a.nodes.windows(2).all(|p| p[0] < p[1]));
                for i in 0..n {
                    assert_eq!(a.nodes[i], -a.nodes[n - 1 - i]);
                    assert_eq!(a.weights[i], a.weights[n - 1 - i]);
                }
                assert!(rel(a.weight_sum(), moments_1d(&k, 1.0, 0)) < 1e-13);
                for m in 0..n as u32 {
                    let q = rule.apply(|x| x[0].powi(2 * m as i32));
                    assert!(rel(q, moments_1d(&k, 1.0, m)) < 1e-12, "k={k} n={n} m={m}");
                }
                let normalized = rule_1d_normalized(&k, 1.0, n).unwrap();
                assert!((normalized.axes()[0].weight_sum() - 1.0).abs() < 1e-13);
            }
        }
        let r = rule_1d(&int(1), 1.0, 8).unwrap();
        assert!(rel(r.apply(|x| x[0].powi(14)), moments_1d(&int(1), 1.0, 7)) < 1e-12);
    }

    #[test]
    fn scale_covariance() {
        for beta in [0.5, 2.0, 3.7] {
            let k = ratio(3, 2);
            let one = rule_1d(&k, 1.0, 12).unwrap();
            let scaled = rule_1d(&k, beta, 12).unwrap();
            let f = beta.powf(-(1.5 + 0.5));
            for i in 0..12 {
                assert!((scaled.axes()[0].nodes[i] - one.axes()[0].nodes[i] / beta.sqrt()).abs() < 1e-14);
                assert!(rel(scaled.axes()[0].weights[i], one.axes()[0].weights[i] * f) < 1e-13);
            }
            for m in 0..12 {
                assert!(rel(scaled.apply(|x| x[0].powi(2 * m)), moments_1d(&k, beta, m as u32)) < 1e-12);
            }
        }
        assert!(rule_1d(&int(1), -1.0, 4).is_err());
        assert!(rule_1d(&int(1), 1.0, 0).is_err());
    }

    #[test]
    fn high_orders_are_stable() {
        for k in [int(0), ratio(5, 2)] {
            let rule = rule_1d_normalized(&k, 1.0, 128).unwrap();
            for m in [0u32, 10, 40, 80] {
                let q = rule.apply(|x| x[0].powi(2 * m as i32));
                assert!(rel(q, rational::to_f64(&moment_ratio(&k, m))) < 1e-11, "k={k} m={m}");
            }
        }
    }

    #[test]
    fn tensor_examples() {
        let k = ratio(1, 2);
        let one_point = tensor(&[rule_1d(&k, 1.0, 1).unwrap(), rule_1d(&int(0), 1.0, 1).unwrap()]);
        assert_eq!(one_point.len(), 1);
        let rs = RootSystem::build(GroupKind::Z2Power(2), &[int(1), ratio(1, 2)]).unwrap();
        let rule = rule_mk(&rs, 6).unwrap();
        assert!(rule.is_normalized());
        assert!((rule.apply(|_| 1.0) - 1.0).abs() < 1e-13);
        let got = integrate_mk(&rs, |x| x[0] * x[0] * x[1] * x[1], &rule).unwrap();
        assert!(rel(got, 3.0 * 2.0) < 1e-13);
        let (nodes, weights) = rule.nodes_and_weights();
        assert_eq!(nodes.len(), 36);
        assert_eq!(weights.len(), 36);
    }

    #[test]
    fn normalization_constant() {
        let r1 = |k: Rational| RootSystem::build(GroupKind::Rank1, &[k]).unwrap();
        assert!(rel(1.0 / normalization_ck(&r1(int(0))).unwrap(), (2.0 * std::f64::consts::PI).sqrt()) < 1e-15);
        assert!(rel(1.0 / normalization_ck(&r1(ratio(1, 2))).unwrap(), 2.0) < 1e-15);
        let rs = RootSystem::build(GroupKind::Z2Power(2), &[int(0), ratio(1, 2)]).unwrap();
        assert!(rel(1.0 / normalization_ck(&rs).unwrap(), 2.0 * (2.0 * std::f64::consts::PI).sqrt()) < 1e-15);
        let sym = RootSystem::build(GroupKind::SymmetricGroup(3), &[int(1)]).unwrap();
        assert!(matches!(normalization_ck(&sym), Err(Error::Capability(_))));
    }

    #[test]
    fn integration_against_mk() {
        for k in [int(0), ratio(1, 2), int(2)] {
            let rs = RootSystem::build(GroupKind::Rank1, std::slice::from_ref(&k)).unwrap();
            let rule = rule_mk(&rs, 16).unwrap();
            assert!((integrate_mk(&rs, |_| 1.0, &rule).unwrap() - 1.0).abs() < 1e-13);
            let x2 = integrate_mk(&rs, |x| x[0] * x[0], &rule).unwrap();
            assert!(rel(x2, 1.0 + 2.0 * rational::to_f64(&k)) < 1e-13);
        }
        let rs = RootSystem::build(GroupKind::Rank1, &[int(1)]).unwrap();
        assert!(integrate_mk(&rs, |_| 1.0, &rule_1d(&int(1), 1.0, 4).unwrap()).is_err());
        assert!(integrate_mk(&rs, |_| 1.0, &rule_1d_normalized(&int(2), 1.0, 4).unwrap()).is_err());
    }

    #[test]
    fn generator_integrates_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rs = RootSystem::build(GroupKind::Z2Power(2), &[int(1), ratio(1, 2)]).unwrap();
        let rule = rule_mk(&rs, 16).unwrap();
        for _ in 0..20 {
            let p = Polynomial::from_terms(
                2,
                (0..4).map(|_| (vec![rng.gen_range(0..5), rng.gen_range(0..5)], ratio(rng.gen_range(-5..=5), rng.gen_range(1..=3)))),
            );
            let lp = generator_l(&rs, &p).unwrap();
            assert!(expectation_exact(&rs, &lp).unwrap().is_zero());
            let fl = lp.to_float();
            assert!(integrate_mk(&rs, |x| fl.eval(x), &rule).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn exact_and_quadrature_integrals_agree() {
        let rs = RootSystem::build(GroupKind::Z2Power(2), &[ratio(1, 2), int(2)]).unwrap();
        let p: Polynomial = "x1^4*x2^2 - 3*x2^6 + 1/2*x1^2 + 7".parse().unwrap();
        let exact = rational::to_f64(&expectation_exact(&rs, &p).unwrap());
        let fp = p.to_float();
        let quad = integrate_mk(&rs, |x| fp.eval(x), &rule_mk(&rs, 8).unwrap()).unwrap();
        assert!(rel(quad, exact) < 1e-12);
        let beta = 2.5;
        let wk = integrate_wk(&rs, |x| fp.eval(x), &rule_for(&rs, beta, 8, false).unwrap()).unwrap();
        assert!(rel(wk, integral_wk_poly(&rs, &p, beta).unwrap()) < 1e-12);
        assert!(integrate_wk(&rs, |_| 1.0, &rule_mk(&rs, 4).unwrap()).is_err());
    }

    #[test]
    fn default_order_converges_on_the_probe() {
        for rs in [
            RootSystem::build(GroupKind::Rank1, &[ratio(1, 2)]).unwrap(),
            RootSystem::build(GroupKind::Z2Power(2), &[int(1), int(0)]).unwrap(),
        ] {
            let (a, b) = rule_convergence(&rs, DEFAULT_ORDER).unwrap();
            assert!((a - b).abs() <= 1e-10);
        }
    }
}
