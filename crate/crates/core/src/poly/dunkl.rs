//! Symbolic Dunkl calculus on exact polynomials.
//!
//! For a root α with multiplicity k(α):
//!
//! ```text
//! T_ξ p   = ∂_ξ p + Σ_α k(α)⟨α,ξ⟩ (p − σ_α p)/α*
//! Δ_k p   = Σ_j T_j² p
//!         = Δp + Σ_α k(α) [2⟨∇p,α⟩α* − ‖α‖²(p − σ_α p)] / (α*)²
//! L_k p   = Δ_k p − x·∇p
//! Γ_k(p,q) = ½(L_k(pq) − p L_k q − q L_k p)
//!          = ⟨∇p,∇q⟩ + ½ Σ_α k(α)‖α‖² D_α p · D_α q,   D_α p = (p − σ_α p)/α*
//! ```
//!
//! Δ_k and Γ_k are always computed along both routes; any difference in a
//! single coefficient is reported as [`Error::CrossPath`].

use num_traits::Zero;

use super::{PolyVector, Polynomial};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::rootsys::RootSystem;

fn check_dim(rs: &RootSystem, p: &Polynomial) -> Result<()> {
    if rs.dimension() == p.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: rs.dimension(), found: p.dim() })
    }
}

fn unit(dim: usize, j: usize) -> Vec<Rational> {
    (0..dim).map(|l| if l == j { Rational::from_integer(1.into()) } else { Rational::zero() }).collect()
}

/// p ∘ σ_α.
pub fn reflect_poly(rs: &RootSystem, root_index: usize, p: &Polynomial) -> Result<Polynomial> {
    check_dim(rs, p)?;
    let d = rs.dimension();
    // σ_α is linear; the image of x_i is the i-th coordinate of σ_α x.
    let columns: Vec<Vec<Rational>> =
        (0..d).map(|j| rs.reflect_exact(root_index, &unit(d, j))).collect::<Result<_>>()?;
    // (σ_α x)_i = Σ_j (σ_α e_j)_i x_j
    let images: Vec<Polynomial> = (0..d)
        .map(|i| Polynomial::linear_form(&columns.iter().map(|c| c[i].clone()).collect::<Vec<_>>()))
        .collect();
    p.substitute_linear(&images)
}

/// Exact quotient of `p` by the linear form α*. A nonzero remainder is an error.
pub fn divide_by_root_form(rs: &RootSystem, root_index: usize, p: &Polynomial) -> Result<Polynomial> {
    check_dim(rs, p)?;
    let root = rs.root(root_index)?;
    let d = rs.dimension();
    let pivot = root
        .vector
        .iter()
        .position(|c| !c.is_zero())
        .ok_or_else(|| Error::InvalidArgument("zero root".into()))?;
    let lead = root.vector[pivot].clone();
    // α* = lead·(x_pivot − r),  r = −(1/lead) Σ_{l≠pivot} α_l x_l
    let r_coeffs: Vec<Rational> = root
        .vector
        .iter()
        .enumerate()
        .map(|(l, c)| if l == pivot { Rational::zero() } else { -c / &lead })
        .collect();
    let r = Polynomial::linear_form(&r_coeffs);

    // p = Σ_m c_m x_pivot^m with c_m free of x_pivot
    let top = p.terms().map(|(e, _)| e[pivot]).max().unwrap_or(0) as usize;
    let mut c: Vec<Polynomial> = vec![Polynomial::zero(d); top + 1];
    for (e, v) in p.terms() {
        let m = e[pivot] as usize;
        let mut f = e.clone();
        f[pivot] = 0;
        c[m] = &c[m] + &Polynomial::monomial(d, f, v.clone());
    }
    // synthetic division by (x_pivot − r)
    let mut q: Vec<Polynomial> = vec![Polynomial::zero(d); top.max(1)];
    if top >= 1 {
        q[top - 1] = c[top].clone();
        for m in (1..top).rev() {
            q[m - 1] = &c[m] + &(&r * &q[m]);
        }
    }
    let remainder = if top >= 1 { &c[0] + &(&r * &q[0]) } else { c[0].clone() };
    if !remainder.is_zero() {
        return Err(Error::CrossPath(format!(
            "division by the root form of root {root_index} left remainder {remainder}"
        )));
    }
    let mut quotient = Polynomial::zero(d);
    for (m, qm) in q.iter().enumerate() {
        if qm.is_zero() {
            continue;
        }
        let mut e = vec![0u16; d];
        e[pivot] = m as u16;
        quotient = &quotient + &(qm * &Polynomial::monomial(d, e, Rational::from_integer(1.into())));
    }
    Ok(quotient.scale(&(Rational::from_integer(1.into()) / lead)))
}

/// D_α p = (p − σ_α p)/α*, always a polynomial.
pub fn divided_difference(rs: &RootSystem, root_index: usize, p: &Polynomial) -> Result<Polynomial> {
    let reflected = reflect_poly(rs, root_index, p)?;
    divide_by_root_form(rs, root_index, &(p - &reflected))
}

/// T_ξ p.
pub fn dunkl_t(rs: &RootSystem, xi: &[Rational], p: &Polynomial) -> Result<Polynomial> {
    check_dim(rs, p)?;
    let mut out = p.directional_derivative(xi)?;
    for (i, root) in rs.roots().iter().enumerate() {
        if root.multiplicity.is_zero() {
            continue;
        }
        let pairing: Rational = root.vector.iter().zip(xi).fold(Rational::zero(), |a, (u, v)| a + u * v);
        if pairing.is_zero() {
            continue;
        }
        let dd = divided_difference(rs, i, p)?;
        out = &out + &dd.scale(&(&root.multiplicity * pairing));
    }
    Ok(out)
}

/// T_j p = T_{e_j} p (0-based j).
pub fn dunkl_tj(rs: &RootSystem, j: usize, p: &Polynomial) -> Result<Polynomial> {
    if j >= rs.dimension() {
        return Err(Error::DimensionMismatch { expected: rs.dimension(), found: j + 1 });
    }
    dunkl_t(rs, &unit(rs.dimension(), j), p)
}

/// Tp = (T_1 p, …, T_d p).
pub fn dunkl_gradient(rs: &RootSystem, p: &Polynomial) -> Result<PolyVector> {
    PolyVector::new((0..rs.dimension()).map(|j| dunkl_tj(rs, j, p)).collect::<Result<_>>()?)
}

/// Σ_j T_j(T_j p).
pub fn dunkl_laplacian_sum_of_squares(rs: &RootSystem, p: &Polynomial) -> Result<Polynomial> {
    let mut out = Polynomial::zero(p.dim());
    for j in 0..rs.dimension() {
        out = &out + &dunkl_tj(rs, j, &dunkl_tj(rs, j, p)?)?;
    }
    Ok(out)
}

/// Δp + Σ_α k(α)[2⟨∇p,α⟩α* − ‖α‖²(p − σ_α p)]/(α*)².
pub fn dunkl_laplacian_closed_form(rs: &RootSystem, p: &Polynomial) -> Result<Polynomial> {
    check_dim(rs, p)?;
    let d = rs.dimension();
    let mut out = Polynomial::zero(d);
    for j in 0..d {
        out = &out + &p.partial(j)?.partial(j)?;
    }
    for (i, root) in rs.roots().iter().enumerate() {
        if root.multiplicity.is_zero() {
            continue;
        }
        let form = Polynomial::linear_form(&root.vector);
        let grad_pair = p.directional_derivative(&root.vector)?;
        let two = Rational::from_integer(2.into());
        let numerator = &(&grad_pair * &form).scale(&two)
            - &(p - &reflect_poly(rs, i, p)?).scale(&root.norm_sq);
        let once = divide_by_root_form(rs, i, &numerator)?;
        let twice = divide_by_root_form(rs, i, &once)?;
        out = &out + &twice.scale(&root.multiplicity);
    }
    Ok(out)
}

/// Δ_k p through both routes; the sum-of-squares result is returned.
pub fn dunkl_laplacian(rs: &RootSystem, p: &Polynomial) -> Result<Polynomial> {
    let via_squares = dunkl_laplacian_sum_of_squares(rs, p)?;
    let via_formula = dunkl_laplacian_closed_form(rs, p)?;
    if via_squares != via_formula {
        return Err(Error::CrossPath(format!(
            "Dunkl Laplacian of {p} on {}: Σ T_j² gives {via_squares}, closed form gives {via_formula}",
            rs.label()
        )));
    }
    Ok(via_squares)
}

/// L_k p = Δ_k p − x·∇p.
pub fn generator_l(rs: &RootSystem, p: &Polynomial) -> Result<Polynomial> {
    Ok(&dunkl_laplacian(rs, p)? - &p.euler())
}

/// ½(L_k(pq) − p L_k q − q L_k p).
pub fn carre_du_champ_definition(rs: &RootSystem, p: &Polynomial, q: &Polynomial) -> Result<Polynomial> {
    let pq = p.try_mul(q)?;
    let lp = generator_l(rs, p)?;
    let lq = generator_l(rs, q)?;
    let inner = &(&generator_l(rs, &pq)? - &(p * &lq)) - &(q * &lp);
    Ok(inner.scale(&Rational::new(1.into(), 2.into())))
}

/// ⟨∇p,∇q⟩ + ½ Σ_α k(α)‖α‖² D_α p · D_α q.
pub fn carre_du_champ_gradient_form(rs: &RootSystem, p: &Polynomial, q: &Polynomial) -> Result<Polynomial> {
    check_dim(rs, p)?;
    check_dim(rs, q)?;
    let mut out = p.gradient().dot(&q.gradient())?;
    let half = Rational::new(1.into(), 2.into());
    for (i, root) in rs.roots().iter().enumerate() {
        if root.multiplicity.is_zero() {
            continue;
        }
        let dp = divided_difference(rs, i, p)?;
        let dq = if p == q { dp.clone() } else { divided_difference(rs, i, q)? };
        out = &out + &(&dp * &dq).scale(&(&half * &root.multiplicity * &root.norm_sq));
    }
    Ok(out)
}

/// Γ_k(p, q) through both routes; the definition result is returned.
pub fn carre_du_champ(rs: &RootSystem, p: &Polynomial, q: &Polynomial) -> Result<Polynomial> {
    let by_definition = carre_du_champ_definition(rs, p, q)?;
    let by_gradient = carre_du_champ_gradient_form(rs, p, q)?;
    if by_definition != by_gradient {
        return Err(Error::CrossPath(format!(
            "carré du champ of ({p}, {q}) on {}: definition gives {by_definition}, gradient form gives {by_gradient}",
            rs.label()
        )));
    }
    Ok(by_definition)
}

/// ‖Tp‖² = Σ_j (T_j p)².
pub fn gradient_norm_sq(rs: &RootSystem, p: &Polynomial) -> Result<Polynomial> {
    dunkl_gradient(rs, p)?.norm_sq()
}
