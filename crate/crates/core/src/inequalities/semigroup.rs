//! Kernel and semigroup properties: normalization and symmetry of Q, the
//! Gaussian estimate of K, the spectral/quadrature cross-path for O_t,
//! commutation with T_j, Jensen, invariance of m_k, self-adjointness and
//! contraction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::report::{CheckKind, CheckReport, EvalPath};
use super::{scale, CheckContext};
use crate::error::Result;
use crate::kernel::KernelEvaluator;
use crate::numeric::NeumaierSum;
use crate::poly::{dunkl_tj, Polynomial};
use crate::quadrature::{convergence_probe, expectation_exact};
use crate::rational;
use crate::semigroup::{MehlerKernel, OuQuadrature};

pub const NORMALIZATION_TIMES: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 3.0];
pub const CROSS_PATH_TIMES: [f64; 4] = [0.05, 0.3, 1.0, 3.0];
pub const CROSS_PATH_POINTS: usize = 50;
pub const CROSS_PATH_FUNCTIONS: usize = 30;
pub const INVARIANCE_TIMES: [f64; 3] = [0.1, 0.5, 2.0];
pub const JENSEN_POWERS: [i32; 3] = [1, 2, 4];
/// Battery members used by the grid-heavy checks.
const GRID_FUNCTIONS: usize = 10;

fn skip_all(ctx: &CheckContext, ids: &[(&str, CheckKind)], why: &str) -> Vec<CheckReport> {
    ids.iter()
        .map(|(id, kind)| ctx.subject(id, "battery", "").skipped(*kind, EvalPath::Quadrature, format!("capability: {why}")))
        .collect()
}

fn ou(ctx: &CheckContext, t: f64) -> Result<OuQuadrature> {
    OuQuadrature::build(&ctx.rs, t, ctx.settings.order, 0.0, KernelEvaluator::new(ctx.settings.digits)?)
}

/// Seeded points in [−3, 3]^d on the 1/16 lattice.
pub fn sample_points(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..dim).map(|_| rng.gen_range(-48i32..=48) as f64 / 16.0).collect()).collect()
}

fn fmt_point(x: &[f64]) -> String {
    format!("({})", x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
}

/// |∫Q(e^{−t}, x, ·)dm_k − 1| on the grid.
pub fn check_kernel_normalization(ctx: &CheckContext) -> Vec<CheckReport> {
    if let Some(why) = ctx.kernel_unavailable() {
        return skip_all(ctx, &[("semigroup.kernel_normalization", CheckKind::Identity)], &why);
    }
    let axes = ctx.grid_axes();
    NORMALIZATION_TIMES
        .par_iter()
        .map(|&t| {
            let s = ctx.subject("semigroup.kernel_normalization", "1", format!("t={t}"));
            let run = || -> Result<CheckReport> {
                let q = ou(ctx, t)?;
                let ones = vec![1.0; q.node_count()];
                let v = q.on_grid(&axes)?.apply(&ones)?;
                let worst = v.iter().copied().fold(1.0, |w, x| if (x - 1.0).abs() > (w - 1.0f64).abs() { x } else { w });
                Ok(s.identity(EvalPath::Quadrature, worst, 1.0, ctx.settings.tolerances.symbolic)
                    .with_note("worst grid point"))
            };
            run().unwrap_or_else(|e| {
                ctx.subject("semigroup.kernel_normalization", "1", format!("t={t}")).errored(
                    CheckKind::Identity,
                    EvalPath::Quadrature,
                    &e,
                )
            })
        })
        .collect()
}

/// Q(τ,x,y) = Q(τ,y,x) on seeded pairs, relative 1e−12; and K ≤ its
/// Gaussian estimate on a 20 × 20 × 5 grid of (x, y, τ).
pub fn check_kernel_properties(ctx: &CheckContext) -> Vec<CheckReport> {
    if let Some(why) = ctx.kernel_unavailable() {
        return skip_all(
            ctx,
            &[("semigroup.q_symmetry", CheckKind::Identity), ("semigroup.kernel_bound", CheckKind::Inequality)],
            &why,
        );
    }
    let kernel = match KernelEvaluator::new(ctx.settings.digits).and_then(|ev| MehlerKernel::with_evaluator(&ctx.rs, ev)) {
        Ok(k) => k,
        Err(e) => return vec![ctx.subject("semigroup.q_symmetry", "Q", "").errored(CheckKind::Identity, EvalPath::Quadrature, &e)],
    };
    let d = ctx.dim();
    let mut out = Vec::new();
    let pts = sample_points(d, 40, ctx.settings.seed ^ 0x51);
    for tau in [0.1, 0.5, 0.9] {
        let s = ctx.subject("semigroup.q_symmetry", "Q", format!("tau={tau}"));
        let run = || -> Result<CheckReport> {
            let mut worst = (0.0, 1.0, 1.0);
            for pair in pts.chunks_exact(2) {
                let a = kernel.kernel_q(tau, &pair[0], &pair[1])?;
                let b = kernel.kernel_q(tau, &pair[1], &pair[0])?;
                let rel = (a - b).abs() / scale(a, b);
                if rel >= worst.0 {
                    worst = (rel, a, b);
                }
            }
            let (_, a, b) = worst;
            Ok(s.identity(EvalPath::Quadrature, a, b, 1e-12 * scale(a, b)).with_note("worst of 20 pairs, relative tolerance"))
        };
        out.push(run().unwrap_or_else(|e| {
            ctx.subject("semigroup.q_symmetry", "Q", format!("tau={tau}")).errored(CheckKind::Identity, EvalPath::Quadrature, &e)
        }));
    }
    // x and y run along two fixed directions
    let u: Vec<f64> = (0..d).map(|i| 1.0 / (i + 1) as f64).collect();
    let v: Vec<f64> = (0..d).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let unit = |w: &[f64]| -> Vec<f64> {
        let n = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        w.iter().map(|a| a / n).collect()
    };
    let (u, v) = (unit(&u), unit(&v));
    let line: Vec<f64> = (0..20).map(|i| -3.0 + 6.0 * i as f64 / 19.0).collect();
    for tau in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let s = ctx.subject("semigroup.kernel_bound", "K", format!("tau={tau}"));
        let run = || -> Result<CheckReport> {
            let mut worst = (f64::NEG_INFINITY, 0.0, 0.0);
            for &a in &line {
                for &b in &line {
                    let x: Vec<f64> = u.iter().map(|c| a * c).collect();
                    let y: Vec<f64> = v.iter().map(|c| b * c).collect();
                    let k = kernel.kernel_k(tau, &x, &y)?;
                    let bound = kernel.kernel_k_bound(tau, &x, &y)?;
                    let gap = (k - bound) / scale(k, bound);
                    if gap > worst.0 {
                        worst = (gap, k, bound);
                    }
                }
            }
            let (_, k, bound) = worst;
            Ok(s.inequality(EvalPath::Quadrature, k, bound, ctx.settings.tolerances.symbolic * scale(k, bound))
                .with_note("closest approach over the 20 × 20 grid"))
        };
        out.push(run().unwrap_or_else(|e| {
            ctx.subject("semigroup.kernel_bound", "K", format!("tau={tau}")).errored(CheckKind::Inequality, EvalPath::Quadrature, &e)
        }));
    }
    out
}

/// ou_spectral against the kernel quadrature at seeded points, absolute tolerance.
pub fn check_cross_path(ctx: &CheckContext) -> Vec<CheckReport> {
    if let Some(why) = ctx.kernel_unavailable() {
        return skip_all(ctx, &[("semigroup.cross_path", CheckKind::CrossPath)], &why);
    }
    let basis = match ctx.basis() {
        Ok(b) => b,
        Err(e) => return vec![ctx.subject("semigroup.cross_path", "battery", "").errored(CheckKind::CrossPath, EvalPath::Both, &e)],
    };
    let polys: Vec<&Polynomial> = ctx.battery.polynomials.iter().take(CROSS_PATH_FUNCTIONS).collect();
    let points = sample_points(ctx.dim(), CROSS_PATH_POINTS, ctx.settings.seed);
    let tol = ctx.settings.tolerances.compound;
    let mut out = Vec::new();
    for &t in &CROSS_PATH_TIMES {
        let setup = || -> Result<_> {
            let q = ou(ctx, t)?;
            let ops = points.par_iter().map(|x| q.at_point(x)).collect::<Result<Vec<_>>>()?;
            Ok((q, ops))
        };
        let (q, ops) = match setup() {
            Ok(v) => v,
            Err(e) => {
                out.push(ctx.subject("semigroup.cross_path", "battery", format!("t={t}")).errored(CheckKind::CrossPath, EvalPath::Both, &e));
                continue;
            }
        };
        out.extend(polys.par_iter().map(|p| {
            let s = ctx.subject("semigroup.cross_path", p.to_string(), format!("t={t}"));
            let run = || -> Result<CheckReport> {
                let spectral = basis.ou_spectral(p, t)?;
                let fp = p.to_float();
                let values = q.node_values(|y| fp.eval(y));
                let mut worst = (-1.0, 0.0, 0.0, 0usize);
                for (i, (x, op)) in points.iter().zip(&ops).enumerate() {
                    let a = spectral.eval(x);
                    let b = op.apply(&values);
                    if (a - b).abs() > worst.0 {
                        worst = ((a - b).abs(), a, b, i);
                    }
                }
                let (_, a, b, i) = worst;
                Ok(s.cross_path(EvalPath::Both, a, b, tol)
                    .with_note(format!("worst of {} points at {}: lhs spectral, rhs quadrature", points.len(), fmt_point(&points[i]))))
            };
            run().unwrap_or_else(|e| {
                ctx.subject("semigroup.cross_path", p.to_string(), format!("t={t}")).errored(CheckKind::CrossPath, EvalPath::Both, &e)
            })
        }).collect::<Vec<_>>());
    }
    out
}

/// T_j∘O_t = e^{−t}O_t∘T_j: exactly on eigen-components, and at points by quadrature.
pub fn check_commutation(ctx: &CheckContext) -> Vec<CheckReport> {
    if let Some(why) = ctx.kernel_unavailable() {
        return skip_all(
            ctx,
            &[("semigroup.commutation_exact", CheckKind::CrossPath), ("semigroup.commutation_quadrature", CheckKind::CrossPath)],
            &why,
        );
    }
    let basis = match ctx.basis() {
        Ok(b) => b,
        Err(e) => {
            return vec![ctx.subject("semigroup.commutation_exact", "battery", "").errored(CheckKind::CrossPath, EvalPath::Spectral, &e)]
        }
    };
    let rs = &ctx.rs;
    let d = ctx.dim();
    let mut out: Vec<CheckReport> = ctx
        .battery
        .polynomials
        .par_iter()
        .map(|p| {
            let s = ctx.subject("semigroup.commutation_exact", p.to_string(), "");
            // T_j P_n p = P_{n−1} T_j p for every n and j; the scalars then
            // agree because e^{−nt} = e^{−t}e^{−(n−1)t}
            let run = || -> Result<(i64, f64)> {
                let parts = basis.eigen_components(p)?;
                let mut mismatches = 0i64;
                for j in 0..d {
                    let tj = dunkl_tj(rs, j, p)?;
                    let tparts = if tj.is_zero() { Vec::new() } else { basis.eigen_components(&tj)? };
                    for n in 1..parts.len() {
                        let lhs = dunkl_tj(rs, j, &parts[n])?;
                        let rhs = tparts.get(n - 1).cloned().unwrap_or_else(|| Polynomial::zero(d));
                        if lhs != rhs {
                            mismatches += 1;
                        }
                    }
                }
                let mut scalar_gap: f64 = 0.0;
                for &t in &ctx.settings.t_grid {
                    for n in 1..parts.len() {
                        let a = (-(n as f64) * t).exp();
                        let b = (-t).exp() * (-((n - 1) as f64) * t).exp();
                        scalar_gap = scalar_gap.max((a - b).abs() / a);
                    }
                }
                Ok((mismatches, scalar_gap))
            };
            match run() {
                Ok((bad, gap)) => {
                    let r = s.cross_path_exact(EvalPath::Spectral, &rational::int(bad), &rational::int(0), 0.0);
                    if gap > 1e-14 {
                        r.with_note(format!("scalar mismatch {gap:e} exceeds 1e-14"))
                    } else {
                        r.with_note(format!("lhs counts mismatched components; scalar gap {gap:e}"))
                    }
                }
                Err(e) => s.errored(CheckKind::CrossPath, EvalPath::Spectral, &e),
            }
        })
        .collect();

    let points = sample_points(d, 10, ctx.settings.seed ^ 0xC0);
    let tol = ctx.settings.tolerances.compound;
    for &t in ctx.settings.t_grid.iter().filter(|t| **t > 0.0) {
        let setup = || -> Result<_> {
            let q = ou(ctx, t)?;
            let ops = points.par_iter().map(|x| q.at_point(x)).collect::<Result<Vec<_>>>()?;
            Ok((q, ops))
        };
        let (q, ops) = match setup() {
            Ok(v) => v,
            Err(e) => {
                out.push(ctx.subject("semigroup.commutation_quadrature", "battery", format!("t={t}")).errored(
                    CheckKind::CrossPath,
                    EvalPath::Both,
                    &e,
                ));
                continue;
            }
        };
        out.extend(ctx.battery.polynomials.iter().take(GRID_FUNCTIONS).collect::<Vec<_>>().par_iter().flat_map_iter(|p| {
            (0..d).map(|j| {
                let s = ctx.subject("semigroup.commutation_quadrature", p.to_string(), format!("t={t};j={}", j + 1));
                let run = || -> Result<CheckReport> {
                    // T_j(O_t p) from the exact components, e^{−t}O_t(T_j p) by quadrature
                    let parts = basis.eigen_components(p)?;
                    let lhs_terms: Vec<(f64, _)> = parts
                        .iter()
                        .enumerate()
                        .map(|(n, pn)| Ok(((-(n as f64) * t).exp(), dunkl_tj(&ctx.rs, j, pn)?.to_float())))
                        .collect::<Result<_>>()?;
                    let tj = dunkl_tj(&ctx.rs, j, p)?.to_float();
                    let values = q.node_values(|y| tj.eval(y));
                    let mut worst = (-1.0, 0.0, 0.0);
                    for (x, op) in points.iter().zip(&ops) {
                        let a: f64 = lhs_terms.iter().map(|(c, fp)| c * fp.eval(x)).collect::<NeumaierSum>().value();
                        let b = (-t).exp() * op.apply(&values);
                        if (a - b).abs() > worst.0 {
                            worst = ((a - b).abs(), a, b);
                        }
                    }
                    Ok(s.cross_path(EvalPath::Both, worst.1, worst.2, tol)
                        .with_note("worst of 10 points: lhs T_j O_t f (spectral), rhs e^{-t} O_t T_j f (quadrature)"))
                };
                run().unwrap_or_else(|e| {
                    ctx.subject("semigroup.commutation_quadrature", p.to_string(), format!("t={t};j={}", j + 1)).errored(
                        CheckKind::CrossPath,
                        EvalPath::Both,
                        &e,
                    )
                })
            }).collect::<Vec<_>>()
        }).collect::<Vec<_>>());
    }
    out
}

/// |O_t f|^p ≤ O_t(|f|^p) on the grid (relative tolerance), and
/// |O_t g| ≤ sup|g| for the bounded probe g.
pub fn check_jensen_and_contraction(ctx: &CheckContext) -> Vec<CheckReport> {
    if let Some(why) = ctx.kernel_unavailable() {
        return skip_all(
            ctx,
            &[("semigroup.jensen", CheckKind::Inequality), ("semigroup.contraction", CheckKind::Inequality)],
            &why,
        );
    }
    let axes = ctx.grid_axes();
    let tol = ctx.settings.tolerances.symbolic;
    let mut out = Vec::new();
    for &t in ctx.settings.t_grid.iter().filter(|t| **t > 0.0) {
        let (q, op) = match ou(ctx, t).and_then(|q| Ok((q.on_grid(&axes)?, q))) {
            Ok((op, q)) => (q, op),
            Err(e) => {
                out.push(ctx.subject("semigroup.jensen", "battery", format!("t={t}")).errored(CheckKind::Inequality, EvalPath::Quadrature, &e));
                continue;
            }
        };
        let polys: Vec<&Polynomial> = ctx.battery.polynomials.iter().take(GRID_FUNCTIONS).collect();
        out.extend(polys.par_iter().flat_map_iter(|p| {
            let fp = p.to_float();
            let plain = q.node_values(|y| fp.eval(y));
            let base = op.apply(&plain);
            JENSEN_POWERS
                .iter()
                .map(|&power| {
                    let s = ctx.subject("semigroup.jensen", p.to_string(), format!("t={t};p={power}"));
                    let run = || -> Result<CheckReport> {
                        let base = base.as_ref().map_err(|e| crate::Error::Numerical(e.to_string()))?;
                        let powered: Vec<f64> = plain.iter().map(|v| v.abs().powi(power)).collect();
                        let avg = op.apply(&powered)?;
                        let mut worst = (f64::INFINITY, 0.0, 0.0);
                        for (a, b) in base.iter().zip(&avg) {
                            let lhs = a.abs().powi(power);
                            let rel = (b - lhs) / scale(lhs, *b);
                            if rel < worst.0 {
                                worst = (rel, lhs, *b);
                            }
                        }
                        let (_, lhs, rhs) = worst;
                        Ok(s.inequality(EvalPath::Quadrature, lhs, rhs, tol * scale(lhs, rhs))
                            .with_note("worst grid point, relative tolerance"))
                    };
                    run().unwrap_or_else(|e| {
                        ctx.subject("semigroup.jensen", p.to_string(), format!("t={t};p={power}")).errored(
                            CheckKind::Inequality,
                            EvalPath::Quadrature,
                            &e,
                        )
                    })
                })
                .collect::<Vec<_>>()
        }).collect::<Vec<_>>());

        let s = ctx.subject("semigroup.contraction", "cos(sum x)/(1+|x|^2/8)", format!("t={t}"));
        let values = q.node_values(convergence_probe);
        out.push(match op.apply(&values) {
            Ok(v) => {
                let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                s.inequality(EvalPath::Quadrature, m, 1.0, tol).with_note("lhs max over the grid of |O_t g|, rhs sup |g|")
            }
            Err(e) => s.errored(CheckKind::Inequality, EvalPath::Quadrature, &e),
        });
    }
    out
}

/// ∫O_t f dm_k = ∫f dm_k and ∫(O_t f)g dm_k = ∫f(O_t g)dm_k, with O_t by
/// quadrature evaluated at the nodes of the m_k rule.
pub fn check_invariance_and_symmetry(ctx: &CheckContext) -> Vec<CheckReport> {
    if let Some(why) = ctx.kernel_unavailable() {
        return skip_all(
            ctx,
            &[("semigroup.invariance", CheckKind::Identity), ("semigroup.self_adjoint", CheckKind::Identity)],
            &why,
        );
    }
    let rule = match ctx.rule() {
        Ok(r) => r,
        Err(e) => return vec![ctx.subject("semigroup.invariance", "battery", "").errored(CheckKind::Identity, EvalPath::Quadrature, &e)],
    };
    let targets: Vec<Vec<f64>> = rule.axes().iter().map(|a| a.nodes.clone()).collect();
    let (_, weights) = rule.nodes_and_weights();
    let tol = ctx.settings.tolerances.quadrature;
    let polys: Vec<&Polynomial> = ctx.battery.polynomials.iter().take(GRID_FUNCTIONS).collect();
    let mut out = Vec::new();
    for &t in &INVARIANCE_TIMES {
        let (q, op) = match ou(ctx, t).and_then(|q| Ok((q.on_grid(&targets)?, q))) {
            Ok((op, q)) => (q, op),
            Err(e) => {
                out.push(ctx.subject("semigroup.invariance", "battery", format!("t={t}")).errored(CheckKind::Identity, EvalPath::Quadrature, &e));
                continue;
            }
        };
        let (nodes, _) = rule.nodes_and_weights();
        // O_t f at the rule nodes, for each battery member
        let evolved: Vec<Result<(Vec<f64>, Vec<f64>)>> = polys
            .par_iter()
            .map(|p| {
                let fp = p.to_float();
                let at_nodes = op.apply(&q.node_values(|y| fp.eval(y)))?;
                let plain = nodes.iter().map(|x| fp.eval(x)).collect();
                Ok((at_nodes, plain))
            })
            .collect();
        for (p, ev) in polys.iter().zip(&evolved) {
            let s = ctx.subject("semigroup.invariance", p.to_string(), format!("t={t}"));
            let exact = expectation_exact(&ctx.rs, p);
            out.push(match (ev.as_ref(), exact.as_ref()) {
                (Ok((at_nodes, _)), Ok(exact)) => {
                    let terms: Vec<f64> = at_nodes.iter().zip(&weights).map(|(v, w)| v * w).collect();
                    let mag: f64 = terms.iter().map(|v| v.abs()).sum();
                    let lhs = terms.into_iter().collect::<NeumaierSum>().value();
                    let rhs = rational::to_f64(exact);
                    s.identity(EvalPath::Both, lhs, rhs, tol * scale(mag, rhs))
                        .with_note("lhs quadrature of O_t f, rhs exact mean; tolerance relative to ∫|O_t f|")
                }
                (Err(e), _) | (_, Err(e)) => s.errored(CheckKind::Identity, EvalPath::Both, e),
            });
        }
        for (i, pair) in evolved.chunks_exact(2).enumerate() {
            let (f, g) = (polys[2 * i], polys[2 * i + 1]);
            let s = ctx.subject("semigroup.self_adjoint", format!("{f} ; {g}"), format!("t={t}"));
            out.push(match (&pair[0], &pair[1]) {
                (Ok((of, pf)), Ok((og, pg))) => {
                    let a: Vec<f64> = of.iter().zip(pg).zip(&weights).map(|((x, y), w)| x * y * w).collect();
                    let b: Vec<f64> = pf.iter().zip(og).zip(&weights).map(|((x, y), w)| x * y * w).collect();
                    let mag = a.iter().chain(&b).map(|v| v.abs()).fold(0.0, f64::max) * a.len() as f64;
                    let lhs = a.into_iter().collect::<NeumaierSum>().value();
                    let rhs = b.into_iter().collect::<NeumaierSum>().value();
                    let mag = mag.min(scale(lhs, rhs) * 1e6).max(scale(lhs, rhs));
                    s.identity(EvalPath::Quadrature, lhs, rhs, tol * mag)
                        .with_note("lhs ∫(O_t f)g, rhs ∫f(O_t g); tolerance relative to the integrand magnitude")
                }
                (Err(e), _) | (_, Err(e)) => s.errored(CheckKind::Identity, EvalPath::Quadrature, e),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequalities::Settings;
    use crate::rational::{int, ratio};
    use crate::rootsys::{GroupKind, RootSystem};

    fn ctx(kind: GroupKind, ks: &[crate::Rational]) -> CheckContext {
        let settings = Settings { battery_size: 4, t_grid: vec![0.5], ..Settings::default() };
        CheckContext::new(RootSystem::build(kind, ks).unwrap(), settings)
    }

    #[test]
    fn semigroup_checks_pass_on_rank1() {
        let c = ctx(GroupKind::Rank1, &[ratio(1, 2)]);
        for r in check_kernel_normalization(&c)
            .into_iter()
            .chain(check_kernel_properties(&c))
            .chain(check_cross_path(&c))
            .chain(check_commutation(&c))
            .chain(check_jensen_and_contraction(&c))
            .chain(check_invariance_and_symmetry(&c))
        {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn sample_points_are_reproducible() {
        assert_eq!(sample_points(2, 5, 1), sample_points(2, 5, 1));
        assert!(sample_points(3, 50, 9).iter().flatten().all(|v| v.abs() <= 3.0));
    }

    #[test]
    fn skipped_without_kernel() {
        let c = ctx(GroupKind::SymmetricGroup(3), &[int(1)]);
        assert!(check_cross_path(&c).iter().all(|r| r.status == crate::inequalities::Status::Skipped));
    }
}
