//! Polynomial eigenbasis of L_k in L²(m_k) for rank 1 and Z₂^d, and the
//! exact action of O_t on polynomials.
//!
//! On each axis the monomials 1, x, x², … are orthogonalized against m_k with
//! exact moments. For the product measure, graded Gram–Schmidt of the
//! multivariate monomials yields exactly the products H_a(x) = Π_i h_{a_i}(x_i),
//! so the basis is assembled from the axis polynomials. Elements are kept
//! monic and unnormalized with exact squared norms. Every element is checked
//! against L_k H_a = −|a| H_a before the basis is handed out.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::poly::{generator_l, FloatPoly, Polynomial};
use crate::quadrature::moment_ratio;
use crate::rational::{self, Rational};
use crate::rootsys::RootSystem;

/// Orthogonal polynomials of one axis, with the table of ⟨x^m, h_n⟩.
#[derive(Clone, Debug)]
struct AxisBasis {
    /// Coefficients of h_n in powers of x, index = power.
    polys: Vec<Vec<Rational>>,
    norms: Vec<Rational>,
    /// inner[m][n] = ∫ x^m h_n dm_k (zero for n > m).
    inner: Vec<Vec<Rational>>,
}

fn axis_moment(k: &Rational, j: usize) -> Rational {
    if j % 2 == 1 {
        Rational::zero()
    } else {
        moment_ratio(k, (j / 2) as u32)
    }
}

impl AxisBasis {
    fn build(k: &Rational, n_max: usize) -> Result<Self> {
        let mu: Vec<Rational> = (0..=2 * n_max).map(|j| axis_moment(k, j)).collect();
        let pair = |a: &[Rational], b: &[Rational]| -> Rational {
            let mut acc = Rational::zero();
            for (i, ai) in a.iter().enumerate() {
                if ai.is_zero() {
                    continue;
                }
                for (j, bj) in b.iter().enumerate() {
                    if !bj.is_zero() {
                        acc += ai * bj * &mu[i + j];
                    }
                }
            }
            acc
        };
        let mut polys: Vec<Vec<Rational>> = Vec::with_capacity(n_max + 1);
        let mut norms: Vec<Rational> = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let mut h = vec![Rational::zero(); n + 1];
            h[n] = Rational::one();
            let monomial = h.clone();
            for (j, hj) in polys.iter().enumerate() {
                let c = pair(&monomial, hj) / &norms[j];
                for (i, v) in hj.iter().enumerate() {
                    h[i] -= &c * v;
                }
            }
            let norm = pair(&h, &h);
            if !norm.is_positive() {
                return Err(Error::Numerical(format!("Gram–Schmidt produced a null vector at degree {n}")));
            }
            polys.push(h);
            norms.push(norm);
        }
        let inner = (0..=n_max)
            .map(|m| {
                let mut xm = vec![Rational::zero(); m + 1];
                xm[m] = Rational::one();
                (0..=n_max).map(|n| if n > m { Rational::zero() } else { pair(&xm, &polys[n]) }).collect()
            })
            .collect();
        Ok(AxisBasis { polys, norms, inner })
    }
}

#[derive(Clone, Debug)]
pub struct BasisElement {
    pub index: Vec<u16>,
    pub degree: u32,
    pub poly: Polynomial,
    /// ∫ H_a² dm_k, exact.
    pub norm_sq: Rational,
}

impl BasisElement {
    /// L_k H_a = −|a| H_a.
    pub fn eigenvalue(&self) -> i64 {
        -(self.degree as i64)
    }
}

#[derive(Clone, Debug)]
pub struct EigenBasis {
    rs: RootSystem,
    max_degree: u32,
    axes: Vec<AxisBasis>,
    elements: Vec<BasisElement>,
    position: HashMap<Vec<u16>, usize>,
}

/// Multi-indices of total degree ≤ n in graded lexicographic order
/// (by degree, then descending exponent vector).
fn graded_indices(d: usize, n: u32) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    for deg in 0..=n {
        let mut level = Vec::new();
        let mut current = vec![0u16; d];
        fill(&mut level, &mut current, 0, deg);
        level.sort_by(|a, b| b.cmp(a));
        out.extend(level);
    }
    out
}

fn fill(out: &mut Vec<Vec<u16>>, current: &mut Vec<u16>, axis: usize, remaining: u32) {
    if axis + 1 == current.len() {
        current[axis] = remaining as u16;
        out.push(current.clone());
        return;
    }
    for v in 0..=remaining {
        current[axis] = v as u16;
        fill(out, current, axis + 1, remaining - v);
    }
    current[axis] = 0;
}

pub fn build_basis(rs: &RootSystem, max_degree: u32) -> Result<EigenBasis> {
    rs.require_kernel()?;
    let ks = rs.axis_multiplicities()?;
    let d = ks.len();
    let axes = ks.iter().map(|k| AxisBasis::build(k, max_degree as usize)).collect::<Result<Vec<_>>>()?;
    let mut elements = Vec::new();
    let mut position = HashMap::new();
    for index in graded_indices(d, max_degree) {
        let mut poly = Polynomial::one(d);
        let mut norm_sq = Rational::one();
        for (axis, &a) in index.iter().enumerate() {
            let h = Polynomial::from_terms(
                d,
                axes[axis].polys[a as usize].iter().enumerate().map(|(p, c)| {
                    let mut e = vec![0u16; d];
                    e[axis] = p as u16;
                    (e, c.clone())
                }),
            );
            poly = poly.try_mul_capped(&h, u32::MAX)?;
            norm_sq *= &axes[axis].norms[a as usize];
        }
        let degree = index.iter().map(|&v| v as u32).sum::<u32>();
        let expect = poly.scale(&rational::int(-(degree as i64)));
        let got = generator_l(rs, &poly)?;
        if got != expect {
            return Err(Error::CrossPath(format!(
                "basis element {poly} on {} fails the eigen relation: L gives {got}",
                rs.label()
            )));
        }
        position.insert(index.clone(), elements.len());
        elements.push(BasisElement { index, degree, poly, norm_sq });
    }
    Ok(EigenBasis { rs: rs.clone(), max_degree, axes, elements, position })
}

impl EigenBasis {
    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn element(&self, index: &[u16]) -> Option<&BasisElement> {
        self.position.get(index).map(|&i| &self.elements[i])
    }

    /// The 1-d orthogonal polynomial h_n of an axis.
    pub fn axis_polynomial(&self, axis: usize, n: usize) -> Polynomial {
        Polynomial::from_terms(1, self.axes[axis].polys[n].iter().enumerate().map(|(p, c)| (vec![p as u16], c.clone())))
    }

    fn check(&self, p: &Polynomial) -> Result<()> {
        if p.dim() != self.rs.dimension() {
            return Err(Error::DimensionMismatch { expected: self.rs.dimension(), found: p.dim() });
        }
        if p.degree() > self.max_degree {
            return Err(Error::DegreeCap { degree: p.degree(), cap: self.max_degree });
        }
        Ok(())
    }

    /// Exact coefficients c_a with p = Σ c_a H_a, aligned with `elements()`.
    pub fn expand(&self, p: &Polynomial) -> Result<Vec<Rational>> {
        self.check(p)?;
        let d = self.rs.dimension();
        let mut inner = vec![Rational::zero(); self.elements.len()];
        for (e, c) in p.terms() {
            // H_a pairs with x^e only when a_i ≤ e_i and a_i ≡ e_i (mod 2) on every axis
            let mut index = vec![0u16; d];
            for (i, v) in e.iter().enumerate() {
                index[i] = v % 2;
            }
            loop {
                let mut t = c.clone();
                for (axis, (&ei, &ai)) in e.iter().zip(&index).enumerate() {
                    t *= &self.axes[axis].inner[ei as usize][ai as usize];
                }
                if !t.is_zero() {
                    inner[self.position[&index]] += t;
                }
                let mut axis = 0;
                loop {
                    if axis == d {
                        break;
                    }
                    if index[axis] + 2 <= e[axis] {
                        index[axis] += 2;
                        break;
                    }
                    index[axis] = e[axis] % 2;
                    axis += 1;
                }
                if axis == d {
                    break;
                }
            }
        }
        Ok(inner.into_iter().zip(&self.elements).map(|(v, el)| v / &el.norm_sq).collect())
    }

    /// Σ c_a H_a.
    pub fn reconstruct(&self, coefficients: &[Rational]) -> Polynomial {
        let mut out = Polynomial::zero(self.rs.dimension());
        for (c, el) in coefficients.iter().zip(&self.elements) {
            if !c.is_zero() {
                out = &out + &el.poly.scale(c);
            }
        }
        out
    }

    /// The projections P_n p onto the degree-n eigenspaces, n = 0..deg p.
    pub fn eigen_components(&self, p: &Polynomial) -> Result<Vec<Polynomial>> {
        let c = self.expand(p)?;
        let top = p.degree() as usize;
        let mut parts = vec![Polynomial::zero(self.rs.dimension()); top + 1];
        for (ci, el) in c.iter().zip(&self.elements) {
            if !ci.is_zero() {
                parts[el.degree as usize] = &parts[el.degree as usize] + &el.poly.scale(ci);
            }
        }
        Ok(parts)
    }

    /// E_n = ∫ (P_n p)² dm_k for n = 0..deg p.
    pub fn energies(&self, p: &Polynomial) -> Result<Vec<Rational>> {
        let c = self.expand(p)?;
        let mut e = vec![Rational::zero(); p.degree() as usize + 1];
        for (ci, el) in c.iter().zip(&self.elements) {
            if !ci.is_zero() {
                e[el.degree as usize] += ci * ci * &el.norm_sq;
            }
        }
        Ok(e)
    }

    /// O_t p = Σ_n e^{−nt} P_n p.
    pub fn ou_spectral(&self, p: &Polynomial, t: f64) -> Result<SpectralFunction> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("semigroup time must be nonnegative, got {t}")));
        }
        let parts = self.eigen_components(p)?;
        Ok(SpectralFunction::from_parts(self.rs.dimension(), parts).evolve(t))
    }

    /// ∫ f L_k^j f dm_k = Σ_n E_n (−n)^j for j = 0..=n_max, exact.
    pub fn psi_moments(&self, f: &Polynomial, n_max: usize) -> Result<Vec<Rational>> {
        let e = self.energies(f)?;
        Ok((0..=n_max)
            .map(|j| {
                e.iter().enumerate().fold(Rational::zero(), |acc, (n, en)| {
                    acc + en * num_traits::pow(rational::int(-(n as i64)), j)
                })
            })
            .collect())
    }

    /// ψ(t) = ∫ (O_t f)² dm_k = Σ_n E_n e^{−2nt}.
    pub fn psi(&self, f: &Polynomial, t: f64) -> Result<f64> {
        let e = self.energies(f)?;
        Ok(e.iter().enumerate().map(|(n, en)| rational::to_f64(en) * (-2.0 * n as f64 * t).exp()).collect::<NeumaierSum>().value())
    }

    /// ∫ Γ_k(O_t f) dm_k = Σ_n n E_n e^{−2nt} = −ψ′(t)/2.
    pub fn dirichlet_form(&self, f: &Polynomial, t: f64) -> Result<f64> {
        let e = self.energies(f)?;
        Ok(e.iter()
            .enumerate()
            .map(|(n, en)| n as f64 * rational::to_f64(en) * (-2.0 * n as f64 * t).exp())
            .collect::<NeumaierSum>()
            .value())
    }
}

/// Σ_n s_n P_n with exact eigen-components P_n and floating scalars s_n.
#[derive(Clone, Debug)]
pub struct SpectralFunction {
    dim: usize,
    components: Vec<SpectralComponent>,
}

#[derive(Clone, Debug)]
pub struct SpectralComponent {
    pub degree: u32,
    pub scalar: f64,
    pub poly: Polynomial,
    float: FloatPoly,
}

impl SpectralFunction {
    fn from_parts(dim: usize, parts: Vec<Polynomial>) -> Self {
        let components = parts
            .into_iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(n, p)| SpectralComponent { degree: n as u32, scalar: 1.0, float: p.to_float(), poly: p })
            .collect();
        SpectralFunction { dim, components }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[SpectralComponent] {
        &self.components
    }

    /// Applies O_t: each scalar gains e^{−nt}.
    pub fn evolve(mut self, t: f64) -> Self {
        for c in &mut self.components {
            c.scalar *= (-(c.degree as f64) * t).exp();
        }
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.components.iter().map(|c| c.scalar * c.float.eval(x)).collect::<NeumaierSum>().value()
    }

    /// The constant (degree-0) coefficient, i.e. ∫ · dm_k.
    pub fn mean(&self) -> f64 {
        self.components
            .iter()
            .find(|c| c.degree == 0)
            .map(|c| c.scalar * rational::to_f64(&c.poly.constant_term()))
            .unwrap_or(0.0)
    }
}
