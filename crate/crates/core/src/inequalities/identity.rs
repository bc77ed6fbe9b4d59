//! Algebraic identities: the two computations of Δ_k and Γ_k, the generator
//! identities under m_k, the ∫Γ_k identity, the eigen gate and the convexity
//! theorem L_k(Φ(f)) ≥ Φ′(f)L_k(f).

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::report::{CheckKind, CheckReport, EvalPath};
use super::{format_point, scale, CheckContext};
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::poly::{
    carre_du_champ_definition, carre_du_champ_gradient_form, dunkl_gradient, dunkl_laplacian_closed_form,
    dunkl_laplacian_sum_of_squares, generator_l, gradient_norm_sq, reflect_poly, Polynomial,
};
use crate::quadrature::{expectation_exact, QuadratureRule};
use crate::rational::{self, Rational};
use crate::rootsys::RootSystem;
use crate::spectral::build_basis;

/// Largest |coefficient| of a − b.
pub fn max_coefficient_gap(a: &Polynomial, b: &Polynomial) -> Rational {
    (a - b).terms().map(|(_, c)| c.abs()).fold(Rational::zero(), |m, c| if c > m { c } else { m })
}

/// Δ_k and Γ_k(p, q) by both paths, compared coefficient by coefficient.
pub fn two_path_reports(rs: &RootSystem, p: &Polynomial, q: &Polynomial) -> Vec<CheckReport> {
    let group = rs.label();
    let zero = Rational::zero();
    let mut out = Vec::new();
    let subject = |id: &str| super::Subject::new(id, &group, p.to_string(), "");
    match dunkl_laplacian_sum_of_squares(rs, p).and_then(|a| Ok((a, dunkl_laplacian_closed_form(rs, p)?))) {
        Ok((a, b)) => out.push(subject("identity.laplacian_two_path").cross_path_exact(
            EvalPath::Symbolic,
            &zero,
            &max_coefficient_gap(&a, &b),
            0.0,
        )),
        Err(e) => out.push(subject("identity.laplacian_two_path").errored(CheckKind::CrossPath, EvalPath::Symbolic, &e)),
    }
    let gamma = carre_du_champ_definition(rs, p, q).and_then(|a| Ok((a, carre_du_champ_gradient_form(rs, p, q)?)));
    let s = super::Subject::new("identity.gamma_two_path", &group, format!("{p} ; {q}"), "");
    match gamma {
        Ok((a, b)) => out.push(s.cross_path_exact(EvalPath::Symbolic, &zero, &max_coefficient_gap(&a, &b), 0.0)),
        Err(e) => out.push(s.errored(CheckKind::CrossPath, EvalPath::Symbolic, &e)),
    }
    out
}

pub fn check_two_path(ctx: &CheckContext) -> Vec<CheckReport> {
    let polys = &ctx.battery.polynomials;
    (0..polys.len())
        .into_par_iter()
        .flat_map_iter(|i| two_path_reports(&ctx.rs, &polys[i], &polys[(i + 1) % polys.len()]))
        .collect()
}

/// (Σ w h(x), Σ w |h(x)|) over the rule.
pub fn integrate_with_magnitude<F: Fn(&[f64]) -> f64>(rule: &QuadratureRule, h: F) -> (f64, f64) {
    let mut value = NeumaierSum::new();
    let mut magnitude = NeumaierSum::new();
    rule.for_each_node(|x, w| {
        let v = w * h(x);
        value.add(v);
        magnitude.add(v.abs());
    });
    (value.value(), magnitude.value())
}

/// A quadrature value against an exact one, with tolerance relative to ∫|h|.
fn quadrature_vs_exact(
    subject: super::Subject,
    kind: CheckKind,
    rule: &QuadratureRule,
    integrand: &Polynomial,
    exact: &Rational,
    tol: f64,
) -> CheckReport {
    let fp = integrand.to_float();
    let (value, magnitude) = integrate_with_magnitude(rule, |x| fp.eval(x));
    let exact = rational::to_f64(exact);
    let eff = tol * scale(magnitude, exact);
    let r = match kind {
        CheckKind::Inequality => subject.inequality(EvalPath::Both, value, exact, eff),
        _ => subject.identity(EvalPath::Both, value, exact, eff),
    };
    r.with_note("lhs by quadrature, rhs by exact moments; tolerance relative to the integrand magnitude")
}

fn pair_reports(ctx: &CheckContext, rule: &QuadratureRule, f: &Polynomial, g: &Polynomial) -> Result<Vec<CheckReport>> {
    let rs = &ctx.rs;
    let tol = ctx.settings.tolerances.quadrature;
    let name = format!("{f} ; {g}");
    let lf = generator_l(rs, f)?;
    let lg = generator_l(rs, g)?;
    let lf_g = lf.try_mul(g)?;
    let mut out = Vec::new();

    // ∫L(f)g = −∫⟨Tf,Tg⟩ + ½Σ k(α)∫(f−σf)(g−σg)
    let tf = dunkl_gradient(rs, f)?;
    let tg = dunkl_gradient(rs, g)?;
    let mut rhs = -expectation_exact(rs, &tf.dot(&tg)?)?;
    let mut differences = Vec::new();
    for (i, root) in rs.roots().iter().enumerate() {
        let df = f - &reflect_poly(rs, i, f)?;
        let dg = g - &reflect_poly(rs, i, g)?;
        let e = expectation_exact(rs, &df.try_mul(&dg)?)?;
        rhs += &root.multiplicity * &e / rational::int(2);
        differences.push((df, e));
    }
    out.push(quadrature_vs_exact(
        ctx.subject("identity.generator_three_term", name.clone(), ""),
        CheckKind::Identity,
        rule,
        &lf_g,
        &rhs,
        tol,
    ));
    out.push(quadrature_vs_exact(
        ctx.subject("identity.generator_symmetry", name.clone(), ""),
        CheckKind::Identity,
        rule,
        &lf_g,
        &expectation_exact(rs, &f.try_mul(&lg)?)?,
        tol,
    ));
    // ∫(f−σf)g = ½∫(f−σf)(g−σg)
    for (i, (df, e)) in differences.iter().enumerate() {
        out.push(quadrature_vs_exact(
            ctx.subject("identity.reflection", name.clone(), format!("root={i}")),
            CheckKind::Identity,
            rule,
            &df.try_mul(g)?,
            &(e / rational::int(2)),
            tol,
        ));
    }
    Ok(out)
}

/// ∫L_k f dm_k = 0, the three-term formula for ∫L_k(f)g, symmetry of L_k and
/// the reflection identity, over the battery and its consecutive pairs.
pub fn check_generator_identities(ctx: &CheckContext) -> Vec<CheckReport> {
    let ids = ["identity.generator_mean", "identity.generator_three_term", "identity.generator_symmetry", "identity.reflection"];
    let rule = match (ctx.kernel_unavailable(), ctx.rule()) {
        (None, Ok(rule)) => rule,
        (reason, _) => {
            let why = format!("capability: {}", reason.unwrap_or_else(|| "no m_k rule".into()));
            return ids.iter().map(|id| ctx.subject(id, "battery", "").skipped(CheckKind::Identity, EvalPath::Both, &why)).collect();
        }
    };
    let rs = &ctx.rs;
    let mut out: Vec<CheckReport> = ctx
        .battery
        .polynomials
        .par_iter()
        .map(|f| {
            let s = ctx.subject("identity.generator_mean", f.to_string(), "");
            match generator_l(rs, f).and_then(|lf| expectation_exact(rs, &lf)) {
                Ok(v) => s.identity_exact(EvalPath::Symbolic, &v, &Rational::zero(), ctx.settings.tolerances.symbolic),
                Err(e) => s.errored(CheckKind::Identity, EvalPath::Symbolic, &e),
            }
        })
        .collect();
    let pairs: Vec<_> = ctx.battery.pairs().collect();
    let nested: Vec<Vec<CheckReport>> = pairs
        .par_iter()
        .map(|(f, g)| {
            pair_reports(ctx, rule, f, g).unwrap_or_else(|e| {
                vec![ctx.subject("identity.generator_three_term", format!("{f} ; {g}"), "").errored(
                    CheckKind::Identity,
                    EvalPath::Both,
                    &e,
                )]
            })
        })
        .collect();
    out.extend(nested.into_iter().flatten());
    out
}

/// ½Σ k(α)‖f − σ_α f‖² in L²(m_k), exact.
pub fn reflection_energy(rs: &RootSystem, f: &Polynomial) -> Result<Rational> {
    let mut acc = Rational::zero();
    for (i, root) in rs.roots().iter().enumerate() {
        let df = f - &reflect_poly(rs, i, f)?;
        acc += &root.multiplicity * expectation_exact(rs, &df.try_mul(&df)?)?;
    }
    Ok(acc / rational::int(2))
}

/// ∫Γ_k(f)dm_k = ∫‖Tf‖²dm_k − ½Σk(α)‖f−σ_αf‖², and the inequality it implies.
pub fn check_gamma_identity(ctx: &CheckContext) -> Vec<CheckReport> {
    let rule = match (ctx.kernel_unavailable(), ctx.rule()) {
        (None, Ok(rule)) => rule,
        (reason, _) => {
            let why = format!("capability: {}", reason.unwrap_or_else(|| "no m_k rule".into()));
            return vec![
                ctx.subject("identity.gamma_integral", "battery", "").skipped(CheckKind::Identity, EvalPath::Both, &why),
                ctx.subject("identity.gradient_dominates_reflections", "battery", "").skipped(
                    CheckKind::Inequality,
                    EvalPath::Symbolic,
                    &why,
                ),
            ];
        }
    };
    let tol = ctx.settings.tolerances;
    let rs = &ctx.rs;
    let nested: Vec<Vec<CheckReport>> = ctx
        .battery
        .polynomials
        .par_iter()
        .map(|f| {
            let run = || -> Result<Vec<CheckReport>> {
                let gamma = carre_du_champ_definition(rs, f, f)?;
                let grad = expectation_exact(rs, &gradient_norm_sq(rs, f)?)?;
                let refl = reflection_energy(rs, f)?;
                Ok(vec![
                    quadrature_vs_exact(
                        ctx.subject("identity.gamma_integral", f.to_string(), ""),
                        CheckKind::Identity,
                        rule,
                        &gamma,
                        &(&grad - &refl),
                        tol.quadrature,
                    ),
                    ctx.subject("identity.gradient_dominates_reflections", f.to_string(), "").inequality_exact(
                        EvalPath::Symbolic,
                        &refl,
                        &grad,
                        tol.symbolic,
                    ),
                ])
            };
            run().unwrap_or_else(|e| {
                vec![ctx.subject("identity.gamma_integral", f.to_string(), "").errored(CheckKind::Identity, EvalPath::Both, &e)]
            })
        })
        .collect();
    nested.into_iter().flatten().collect()
}

/// L_k p = −deg(p) p for every basis element up to `max_degree`.
pub fn check_eigen_gate(ctx: &CheckContext, max_degree: u32) -> Vec<CheckReport> {
    let s = ctx.subject("identity.eigen_gate", format!("basis up to degree {max_degree}"), "");
    if let Some(why) = ctx.kernel_unavailable() {
        return vec![s.skipped(CheckKind::CrossPath, EvalPath::Symbolic, format!("capability: {why}"))];
    }
    let run = || -> Result<(usize, usize)> {
        let basis = build_basis(&ctx.rs, max_degree)?;
        let mut bad = 0;
        for el in basis.elements() {
            let lp = generator_l(&ctx.rs, &el.poly)?;
            if lp != el.poly.scale(&rational::int(el.eigenvalue())) {
                bad += 1;
            }
        }
        Ok((bad, basis.elements().len()))
    };
    match run() {
        Ok((bad, total)) => vec![s
            .cross_path_exact(EvalPath::Symbolic, &rational::int(bad as i64), &Rational::zero(), 0.0)
            .with_note(format!("{total} elements; lhs counts failures of the eigen relation"))],
        Err(e) => vec![s.errored(CheckKind::CrossPath, EvalPath::Symbolic, &e)],
    }
}

/// Convex test functions for the convexity theorem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phi {
    Square,
    Fourth,
    /// Σ_{j≤6} z^j/j!, convex since its second derivative is the (positive)
    /// even-order truncation Σ_{j≤4} z^j/j!.
    ExpTruncated,
}

impl Phi {
    pub fn name(&self) -> &'static str {
        match self {
            Phi::Square => "z^2",
            Phi::Fourth => "z^4",
            Phi::ExpTruncated => "exp_6",
        }
    }

    /// Coefficients of Φ in powers of z.
    fn coefficients(&self) -> Vec<Rational> {
        match self {
            Phi::Square => vec![Rational::zero(), Rational::zero(), rational::int(1)],
            Phi::Fourth => {
                let mut c = vec![Rational::zero(); 5];
                c[4] = rational::int(1);
                c
            }
            Phi::ExpTruncated => {
                let mut fact = 1i64;
                (0..=6)
                    .map(|j| {
                        if j > 0 {
                            fact *= j;
                        }
                        rational::ratio(1, fact)
                    })
                    .collect()
            }
        }
    }

    fn compose(coeffs: &[Rational], f: &Polynomial) -> Result<Polynomial> {
        let mut out = Polynomial::zero(f.dim());
        for c in coeffs.iter().rev() {
            out = &out.try_mul_capped(f, u32::MAX)? + &Polynomial::constant(f.dim(), c.clone());
        }
        Ok(out)
    }

    pub fn apply(&self, f: &Polynomial) -> Result<Polynomial> {
        Self::compose(&self.coefficients(), f)
    }

    pub fn derivative(&self, f: &Polynomial) -> Result<Polynomial> {
        let c = self.coefficients();
        let d: Vec<Rational> = c.iter().enumerate().skip(1).map(|(j, v)| v * rational::int(j as i64)).collect();
        Self::compose(&d, f)
    }
}

/// M = L_k(Φ(f)) − Φ′(f)L_k(f), exact.
pub fn convexity_margin(rs: &RootSystem, phi: Phi, f: &Polynomial) -> Result<Polynomial> {
    let lhs = generator_l(rs, &phi.apply(f)?)?;
    let rhs = phi.derivative(f)?.try_mul_capped(&generator_l(rs, f)?, u32::MAX)?;
    Ok(&lhs - &rhs)
}

/// min over the grid of an exact polynomial, with the minimizing point.
pub fn grid_minimum(p: &Polynomial, grid: &[Vec<Rational>]) -> Result<(Rational, usize)> {
    let exact = p.to_exact();
    let values: Vec<Rational> = grid.par_iter().map(|x| exact.eval(x)).collect();
    values
        .into_iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(&b.1))
        .map(|(i, v)| (v, i))
        .ok_or_else(|| Error::InvalidArgument("empty grid".into()))
}

/// Degree limit of battery members composed with z⁴ and exp_6.
pub const CONVEXITY_HIGH_POWER_DEGREE: u32 = 4;

/// Pointwise convexity margins on the grid, the Φ = z² reduction to 2Γ_k(f),
/// and the corollary ∫f^{p−1}L_k f dm_k ≤ 0 for f = ε + q².
pub fn check_convexity_theorem(ctx: &CheckContext) -> Vec<CheckReport> {
    let rs = &ctx.rs;
    let tol = ctx.settings.tolerances.symbolic;
    let mut jobs: Vec<(Phi, &Polynomial)> = Vec::new();
    for f in &ctx.battery.polynomials {
        jobs.push((Phi::Square, f));
        if f.degree() <= CONVEXITY_HIGH_POWER_DEGREE {
            jobs.push((Phi::Fourth, f));
            jobs.push((Phi::ExpTruncated, f));
        }
    }
    let mut out: Vec<CheckReport> = jobs
        .par_iter()
        .map(|(phi, f)| {
            let s = ctx.subject("convexity.pointwise", f.to_string(), format!("phi={}", phi.name()));
            let run = || -> Result<CheckReport> {
                let m = convexity_margin(rs, *phi, f)?;
                let (min, at) = grid_minimum(&m, &ctx.grid)?;
                let x = &ctx.grid[at];
                let lhs = phi.derivative(f)?.eval_exact(x) * generator_l(rs, f)?.eval_exact(x);
                let rhs = &lhs + &min;
                Ok(s.inequality_exact(EvalPath::Symbolic, &lhs, &rhs, tol)
                    .with_note(format!("worst grid point {}: lhs = Φ′(f)L(f), rhs = L(Φ(f))", format_point(x))))
            };
            run().unwrap_or_else(|e| {
                ctx.subject("convexity.pointwise", f.to_string(), format!("phi={}", phi.name()))
                    .errored(CheckKind::Inequality, EvalPath::Symbolic, &e)
            })
        })
        .collect();

    // Φ = z²: L(f²) − 2fL(f) = 2Γ_k(f) as polynomials
    out.extend(ctx.battery.polynomials.par_iter().map(|f| {
        let s = ctx.subject("convexity.square_is_gamma", f.to_string(), "");
        let run = || -> Result<Rational> {
            let m = convexity_margin(rs, Phi::Square, f)?;
            let g = carre_du_champ_definition(rs, f, f)?.scale(&rational::int(2));
            Ok(max_coefficient_gap(&m, &g))
        };
        match run() {
            Ok(gap) => s.identity_exact(EvalPath::Symbolic, &gap, &Rational::zero(), 0.0),
            Err(e) => s.errored(CheckKind::Identity, EvalPath::Symbolic, &e),
        }
    }).collect::<Vec<_>>());

    for power in [2u32, 3, 4] {
        for spec in &ctx.battery.positives {
            let s = ctx.subject("convexity.corollary", spec.describe(), format!("p={power}"));
            if let Some(why) = ctx.kernel_unavailable() {
                out.push(s.skipped(CheckKind::Inequality, EvalPath::Symbolic, format!("capability: {why}")));
                continue;
            }
            let run = || -> Result<Rational> {
                // the polynomial factor ε + q² of the positive member
                let (f, _) = spec.split()?;
                let integrand = f.pow(power - 1)?.try_mul(&generator_l(rs, &f)?)?;
                expectation_exact(rs, &integrand)
            };
            out.push(match run() {
                Ok(v) => s
                    .inequality_exact(EvalPath::Symbolic, &v, &Rational::zero(), tol)
                    .with_note("f = ε + q², exact moments"),
                Err(e) => s.errored(CheckKind::Inequality, EvalPath::Symbolic, &e),
            });
        }
    }
    out
}
