//! Entropy against ω_k for strictly positive Gaussian-weighted functions, the
//! explicit-constant entropy bounds and the empirical log-Sobolev ratios.
//!
//! For f = P e^{−β‖x‖²/2}, ∫f log f dω_k splits into ∫P log P e^{−β‖x‖²/2}dω_k,
//! integrated by a composite rule, and −(β/2)∫P‖x‖²e^{−β‖x‖²/2}dω_k, which is
//! exact, as are all integer-power norms.

use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::battery::{FunctionSpec, SplitFunction};
use super::report::{CheckKind, CheckReport, EvalPath};
use super::{scale, CheckContext};
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::poly::{divided_difference, dunkl_tj, Polynomial};
use crate::quadrature::{composite_rule, integral_wk_poly};
use crate::rational::{self, Rational};
use crate::rootsys::RootSystem;

pub const PANEL_POINTS: usize = 20;
pub const COARSE_PANELS: usize = 16;
pub const FINE_PANELS: usize = 32;
/// The rules cover [−L, L]^d with L = 11/√β, beyond which e^{−βx²/2} < e^{−60}.
pub const HALF_WIDTH_SCALE: f64 = 11.0;
/// Tensor rules with more nodes than this are not attempted.
pub const MAX_NODES: usize = 4_000_000;
pub const DELTAS: [(i64, i64); 3] = [(1, 2), (1, 1), (2, 1)];
pub const SCALING_FACTOR: i64 = 3;

/// ∫ h(x) e^{−β‖x‖²/2} dω_k by the composite rule with `panels` panels per half-axis.
pub fn composite_integral<F: Fn(&[f64]) -> f64>(rs: &RootSystem, beta: f64, panels: usize, h: F) -> Result<f64> {
    let nodes = (2 * panels * PANEL_POINTS).pow(rs.dimension() as u32);
    if nodes > MAX_NODES {
        return Err(Error::Capability(format!(
            "entropy rules in dimension {} would need {nodes} nodes, above the cap of {MAX_NODES}",
            rs.dimension()
        )));
    }
    let rule = composite_rule(rs, beta, HALF_WIDTH_SCALE / beta.sqrt(), panels, PANEL_POINTS)?;
    let mut acc = NeumaierSum::new();
    rule.for_each_node(|x, w| acc.add(w * h(x)));
    Ok(acc.value())
}

/// Ent_k(f) with the coarse-rule value kept for the convergence check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyValue {
    pub value: f64,
    pub coarse: f64,
    /// ∫f dω_k.
    pub mass: f64,
}

/// Ent_k(f) = ∫f log f dω_k − m log m, m = ∫f dω_k, for f = P e^{−β‖x‖²/2}, P > 0.
pub fn entropy_split(rs: &RootSystem, p: &Polynomial, beta: &Rational) -> Result<EntropyValue> {
    if !beta.is_positive() {
        return Err(Error::InvalidArgument("entropy needs a Gaussian factor with β > 0".into()));
    }
    let b = rational::to_f64(beta);
    let fp = p.to_float();
    let p_log_p = |x: &[f64]| {
        let v = fp.eval(x);
        if v > 0.0 {
            v * v.ln()
        } else {
            f64::NAN
        }
    };
    let fine = composite_integral(rs, b, FINE_PANELS, p_log_p)?;
    let coarse = composite_integral(rs, b, COARSE_PANELS, p_log_p)?;
    if !(fine.is_finite() && coarse.is_finite()) {
        return Err(Error::InvalidArgument("entropy needs f > 0 at every node".into()));
    }
    let r2 = Polynomial::norm_sq(p.dim());
    let gaussian = 0.5 * b * integral_wk_poly(rs, &p.try_mul(&r2)?, b)?;
    let mass = integral_wk_poly(rs, p, b)?;
    if !(mass > 0.0) {
        return Err(Error::InvalidArgument("entropy needs ∫f dω_k > 0".into()));
    }
    let tail = mass * mass.ln() + gaussian;
    Ok(EntropyValue { value: fine - tail, coarse: coarse - tail, mass })
}

pub fn entropy(rs: &RootSystem, f: &FunctionSpec) -> Result<EntropyValue> {
    if matches!(f, FunctionSpec::Polynomial(_)) {
        return Err(Error::InvalidArgument("entropy is defined here for Gaussian-weighted positive functions".into()));
    }
    let (p, beta) = f.split()?;
    entropy_split(rs, &p, &beta)
}

/// ‖f‖_{r, ω_k} for f = P e^{−β‖x‖²/2}: exact for integer r, otherwise by the
/// composite rule with P^r = e^{r log P}.
pub fn lp_norm(rs: &RootSystem, p: &Polynomial, beta: &Rational, r: &Rational) -> Result<f64> {
    if !r.is_positive() {
        return Err(Error::InvalidArgument("norm exponent must be positive".into()));
    }
    let rb = rational::to_f64(&(r * beta));
    let rf = rational::to_f64(r);
    let integral = if r.is_integer() {
        let n = r.to_integer().to_u32().ok_or_else(|| Error::InvalidArgument("norm exponent too large".into()))?;
        integral_wk_poly(rs, &p.pow(n)?, rb)?
    } else {
        let fp = p.to_float();
        composite_integral(rs, rb, FINE_PANELS, |x| {
            let v = fp.eval(x);
            if v > 0.0 {
                (rf * v.ln()).exp()
            } else {
                f64::NAN
            }
        })?
    };
    Ok(integral.powf(1.0 / rf))
}

/// (∫‖Tf‖²dω_k, ∫Γ_k(f)dω_k) for f = P e^{−β‖x‖²/2}, exact up to the mass factor:
/// Tf = G(TP − βxP) and Γ_k(f) = G²(‖∇P − βxP‖² + ½Σk(α)‖α‖²(D_αP)²), G = e^{−β‖x‖²/2}.
pub fn dirichlet_integrals(rs: &RootSystem, p: &Polynomial, beta: &Rational) -> Result<(f64, f64)> {
    let d = rs.dimension();
    let mut dunkl = Polynomial::zero(d);
    let mut gamma = Polynomial::zero(d);
    for j in 0..d {
        let shift = Polynomial::var(d, j).try_mul(p)?.scale(beta);
        let t = &dunkl_tj(rs, j, p)? - &shift;
        let g = &p.partial(j)? - &shift;
        dunkl = &dunkl + &t.try_mul(&t)?;
        gamma = &gamma + &g.try_mul(&g)?;
    }
    for (i, root) in rs.roots().iter().enumerate() {
        if root.multiplicity.is_zero() {
            continue;
        }
        let dp = divided_difference(rs, i, p)?;
        gamma = &gamma + &dp.try_mul(&dp)?.scale(&(&root.multiplicity * &root.norm_sq / rational::int(2)));
    }
    let b2 = 2.0 * rational::to_f64(beta);
    Ok((integral_wk_poly(rs, &dunkl, b2)?, integral_wk_poly(rs, &gamma, b2)?))
}

/// The δ+1 exponent and constant (1+δ)/δ.
fn delta_terms(delta: &Rational) -> (Rational, f64) {
    (delta + rational::int(1), rational::to_f64(&((delta + rational::int(1)) / delta)))
}

struct Member {
    name: String,
    split: SplitFunction,
    square: (Polynomial, Rational),
}

fn members(ctx: &CheckContext) -> Result<Vec<Member>> {
    ctx.battery
        .positives
        .iter()
        .map(|f| {
            let split = SplitFunction::new(f)?;
            let square = (split.poly.try_mul(&split.poly)?, &split.beta * rational::int(2));
            Ok(Member { name: f.describe(), split, square })
        })
        .collect()
}

fn skip(ctx: &CheckContext, why: &str) -> Vec<CheckReport> {
    [
        ("entropy.convergence", CheckKind::CrossPath),
        ("entropy.bound", CheckKind::Inequality),
        ("entropy.bound_square", CheckKind::Inequality),
        ("entropy.scaling", CheckKind::Identity),
        ("entropy.energy_relation", CheckKind::Inequality),
        ("entropy.energy_identity", CheckKind::Identity),
        ("entropy.log_sobolev_ratio", CheckKind::Info),
    ]
    .iter()
    .map(|(id, kind)| ctx.subject(id, "positive battery", "").skipped(*kind, EvalPath::Both, format!("capability: {why}")))
    .collect()
}

fn member_reports(ctx: &CheckContext, m: &Member) -> Result<(Vec<CheckReport>, Option<(f64, f64)>)> {
    let rs = &ctx.rs;
    let tol = ctx.settings.tolerances.compound;
    let (p, beta) = (&m.split.poly, &m.split.beta);
    let mut out = Vec::new();
    let ent = entropy_split(rs, p, beta)?;
    let (p2, beta2) = &m.square;
    let ent2 = entropy_split(rs, p2, beta2)?;
    for (e, which) in [(ent, "f"), (ent2, "f^2")] {
        out.push(
            ctx.subject("entropy.convergence", m.name.clone(), format!("of={which}"))
                .cross_path(EvalPath::Quadrature, e.coarse, e.value, tol * scale(e.coarse, e.value))
                .with_note(format!("lhs {COARSE_PANELS} panels, rhs {FINE_PANELS} panels per half-axis")),
        );
    }
    for (num, den) in DELTAS {
        let delta = rational::ratio(num, den);
        let params = format!("delta={}", rational::format(&delta));
        let (r, c) = delta_terms(&delta);
        let rhs = c * lp_norm(rs, p, beta, &r)?;
        out.push(
            ctx.subject("entropy.bound", m.name.clone(), params.clone())
                .inequality(EvalPath::Both, ent.value, rhs, tol * scale(ent.value, rhs))
                .with_note("lhs Ent(f), rhs (1+δ)/δ‖f‖_{δ+1}; tolerance relative to the larger side"),
        );
        let r2 = rational::int(2) * &r;
        let norm = lp_norm(rs, p, beta, &r2)?;
        let rhs2 = c * norm * norm;
        out.push(
            ctx.subject("entropy.bound_square", m.name.clone(), params)
                .inequality(EvalPath::Both, ent2.value, rhs2, tol * scale(ent2.value, rhs2))
                .with_note("lhs Ent(f²), rhs (1+δ)/δ‖f‖²_{2δ+2}; tolerance relative to the larger side"),
        );
    }
    let c = rational::int(SCALING_FACTOR);
    let scaled = entropy_split(rs, &p.scale(&c), beta)?;
    let expected = SCALING_FACTOR as f64 * ent.value;
    out.push(
        ctx.subject("entropy.scaling", m.name.clone(), format!("c={SCALING_FACTOR}"))
            .identity(EvalPath::Both, scaled.value, expected, tol * scale(scaled.value, expected))
            .with_note("lhs Ent(cf), rhs c·Ent(f)"),
    );

    let (grad, gamma) = dirichlet_integrals(rs, p, beta)?;
    out.push(
        ctx.subject("entropy.energy_identity", m.name.clone(), "")
            .identity(EvalPath::Symbolic, gamma, grad, ctx.settings.tolerances.quadrature * scale(grad, gamma))
            .with_note("lhs ∫Γ(f)dω, rhs ∫‖Tf‖²dω; equal since ∫Δ_k(f²)dω = 0 and ∫fΔ_k f dω = −∫‖Tf‖²dω"),
    );
    let constant = rational::to_f64(&rs.gradient_constant());
    out.push(
        ctx.subject("entropy.energy_relation", m.name.clone(), "")
            .inequality(EvalPath::Symbolic, grad, constant * gamma, ctx.settings.tolerances.quadrature * scale(grad, constant * gamma))
            .with_note("lhs ∫‖Tf‖²dω, rhs (1+2γ|R+|)∫Γ(f)dω; so Ent/∫Γ ≤ (1+2γ|R+|)·Ent/∫‖Tf‖²"),
    );
    let homogeneous = ctx.dim() as f64 + 2.0 * ctx.rs.gamma_f64();
    if homogeneous <= 2.0 {
        let why = format!("hypothesis: d + 2γ = {homogeneous} ≤ 2, no admissible δ at p = 2");
        for energy in ["gradient", "gamma"] {
            out.push(
                ctx.subject("entropy.log_sobolev_ratio", m.name.clone(), format!("energy={energy}"))
                    .skipped(CheckKind::Info, EvalPath::Both, why.clone()),
            );
        }
        return Ok((out, None));
    }
    for (energy, value) in [("gradient", grad), ("gamma", gamma)] {
        out.push(
            ctx.subject("entropy.log_sobolev_ratio", m.name.clone(), format!("energy={energy}"))
                .info(EvalPath::Both, ent2.value, value)
                .with_note(format!("Ent(f²)/∫ = {:e}", ent2.value / value)),
        );
    }
    Ok((out, Some((ent2.value / grad, ent2.value / gamma))))
}

/// Convergence of the entropy rule, the bounds for δ ∈ {½, 1, 2} on f and f²,
/// the scaling identity, and the log-Sobolev ratios with their suprema.
pub fn check_entropy(ctx: &CheckContext) -> Vec<CheckReport> {
    if let Some(why) = ctx.kernel_unavailable() {
        return skip(ctx, &why);
    }
    let nodes = (2 * FINE_PANELS * PANEL_POINTS).pow(ctx.dim() as u32);
    if nodes > MAX_NODES {
        return skip(ctx, &format!("entropy rules in dimension {} would need {nodes} nodes, above the cap of {MAX_NODES}", ctx.dim()));
    }
    let members = match members(ctx) {
        Ok(m) => m,
        Err(e) => return vec![ctx.subject("entropy.bound", "positive battery", "").errored(CheckKind::Inequality, EvalPath::Both, &e)],
    };
    let results: Vec<_> = members.par_iter().map(|m| (m, member_reports(ctx, m))).collect();
    let mut out = Vec::new();
    let mut sup: Option<(f64, f64)> = None;
    for (m, r) in results {
        match r {
            Ok((reports, ratios)) => {
                out.extend(reports);
                if let Some((a, b)) = ratios {
                    sup = Some(sup.map_or((a, b), |(x, y)| (x.max(a), y.max(b))));
                }
            }
            Err(e) => out.push(ctx.subject("entropy.bound", m.name.clone(), "").errored(CheckKind::Inequality, EvalPath::Both, &e)),
        }
    }
    if let Some((grad, gamma)) = sup {
        let c = rational::to_f64(&ctx.rs.gradient_constant());
        out.push(
            ctx.subject("entropy.log_sobolev_sup", "positive battery", "")
                .info(EvalPath::Both, gamma, c * grad)
                .with_note("lhs sup Ent(f²)/∫Γ(f), rhs (1+2γ|R+|)·sup Ent(f²)/∫‖Tf‖²"),
        );
    }
    out
}
