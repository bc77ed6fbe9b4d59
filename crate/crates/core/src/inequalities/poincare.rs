//! The Poincaré sandwich, the Taylor development of ψ(t) = ∫(O_t f)²dm_k,
//! convexity of ψ and the reverse Poincaré inequality.

use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::report::{CheckKind, CheckReport, EvalPath};
use super::battery::MAX_DEGREE;
use super::{first_coordinate, format_point, scale, CheckContext, DyadicPowers, GridValues};
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::poly::{dunkl_tj, Polynomial};
use crate::rational::{self, Rational};
use crate::quadrature::QuadratureRule;
use crate::semigroup::{GridOperator, OuQuadrature};
use crate::spectral::EigenBasis;

/// Bits of e^{−t} kept by the exact paths.
pub const EXACT_BITS: u64 = 64;
pub const TAYLOR_TERMS: usize = 30;
/// The remainder must decrease from this index on.
pub const TAYLOR_MONOTONE_FROM: usize = 12;
pub const TAYLOR_MAX_DEGREE: u32 = 6;
pub const TAYLOR_TOLERANCE: f64 = 1e-8;

/// The three terms of the sandwich for one f and t.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sandwich {
    /// 2t∫Γ_k(O_t f)dm_k.
    pub lower: f64,
    /// ∫f²dm_k − ∫(O_t f)²dm_k.
    pub gap: f64,
    /// 2t∫Γ_k(f)dm_k.
    pub upper: f64,
}

/// Eigen-energies of f and of each T_j f, as floats.
#[derive(Clone, Debug)]
pub struct Energies {
    pub plain: Vec<f64>,
    pub gradient: Vec<Vec<f64>>,
}

impl Energies {
    pub fn new(basis: &EigenBasis, f: &Polynomial) -> Result<Self> {
        let rs = basis.root_system();
        let floats = |e: Vec<Rational>| e.iter().map(rational::to_f64).collect::<Vec<_>>();
        let gradient = (0..rs.dimension())
            .map(|j| {
                let tj = dunkl_tj(rs, j, f)?;
                Ok(if tj.is_zero() { Vec::new() } else { floats(basis.energies(&tj)?) })
            })
            .collect::<Result<_>>()?;
        Ok(Energies { plain: floats(basis.energies(f)?), gradient })
    }

    /// gap = ΣE_n(1 − e^{−2nt}), upper = 2tΣnE_n, lower = 2tΣnE_n e^{−2nt}.
    pub fn sandwich(&self, t: f64) -> Sandwich {
        let mut gap = NeumaierSum::new();
        let mut upper = NeumaierSum::new();
        let mut lower = NeumaierSum::new();
        for (n, en) in self.plain.iter().enumerate() {
            let n = n as f64;
            gap.add(-en * (-2.0 * n * t).exp_m1());
            upper.add(2.0 * t * n * en);
            lower.add(2.0 * t * n * en * (-2.0 * n * t).exp());
        }
        Sandwich { lower: lower.value(), gap: gap.value(), upper: upper.value() }
    }

    /// The printed lower bound read componentwise: 2tΣ_j∫Γ_k(O_t T_j f)dm_k.
    pub fn literal_lower_bound(&self, t: f64) -> f64 {
        self.gradient
            .iter()
            .flat_map(|e| e.iter().enumerate().map(move |(n, en)| 2.0 * t * n as f64 * en * (-2.0 * n as f64 * t).exp()))
            .collect::<NeumaierSum>()
            .value()
    }
}

pub fn sandwich_terms(basis: &EigenBasis, f: &Polynomial, t: f64) -> Result<Sandwich> {
    Ok(Energies::new(basis, f)?.sandwich(t))
}

/// ∫f²dm_k − ∫(O_t f)²dm_k with O_t by kernel quadrature onto the nodes of
/// the m_k rule (`op`), and ∫f²dm_k by the same rule.
pub fn quadrature_gap(rule: &QuadratureRule, q: &OuQuadrature, op: &GridOperator, f: &Polynomial) -> Result<(f64, f64)> {
    let fp = f.to_float();
    let evolved = op.apply(&q.node_values(|y| fp.eval(y)))?;
    let (nodes, weights) = rule.nodes_and_weights();
    let mut gap = NeumaierSum::new();
    let mut magnitude = NeumaierSum::new();
    for ((x, w), o) in nodes.iter().zip(&weights).zip(&evolved) {
        let v = fp.eval(x);
        gap.add(w * (v * v - o * o));
        magnitude.add(w * v * v);
    }
    Ok((gap.value(), magnitude.value()))
}

fn sandwich_reports(ctx: &CheckContext, e: &Energies, f: &Polynomial, t: f64) -> Vec<CheckReport> {
    let tol = ctx.settings.tolerances.quadrature;
    let name = f.to_string();
    let params = format!("t={t}");
    let s = e.sandwich(t);
    vec![
        ctx.subject("poincare.sandwich_lower", name.clone(), params.clone())
            .inequality(EvalPath::Spectral, s.lower, s.gap, tol * scale(s.lower, s.gap))
            .with_note("lhs 2t∫Γ(O_t f), rhs ∫f² − ∫(O_t f)²; tolerance relative to the larger side"),
        ctx.subject("poincare.sandwich_upper", name.clone(), params.clone())
            .inequality(EvalPath::Spectral, s.gap, s.upper, tol * scale(s.gap, s.upper))
            .with_note("lhs ∫f² − ∫(O_t f)², rhs 2t∫Γ(f); tolerance relative to the larger side"),
        ctx.subject("poincare.sandwich_literal_lower", name, params)
            .info(EvalPath::Spectral, e.literal_lower_bound(t), s.gap)
            .with_note("componentwise reading 2tΣ_j∫Γ(O_t T_j f) of the printed lower bound, reported only"),
    ]
}

/// Both sandwich margins over the battery and t-grid, the literal-form
/// lower bound as information, the spectral gap against the quadrature gap,
/// and in rank one the closed forms for f = x.
pub fn check_poincare_sandwich(ctx: &CheckContext) -> Vec<CheckReport> {
    let ids = [
        ("poincare.sandwich_lower", CheckKind::Inequality),
        ("poincare.sandwich_upper", CheckKind::Inequality),
        ("poincare.sandwich_literal_lower", CheckKind::Info),
        ("poincare.gap_cross_path", CheckKind::CrossPath),
    ];
    let basis = match (ctx.kernel_unavailable(), ctx.basis()) {
        (None, Ok(b)) => b,
        (why, res) => {
            let why = why.or_else(|| res.err().map(|e| e.to_string())).unwrap_or_default();
            return ids
                .iter()
                .map(|(id, kind)| ctx.subject(id, "battery", "").skipped(*kind, EvalPath::Spectral, format!("capability: {why}")))
                .collect();
        }
    };
    let mut functions: Vec<Polynomial> = ctx.battery.polynomials.clone();
    functions.push(first_coordinate(ctx.dim()));
    let energies: Vec<Result<Energies>> = functions.par_iter().map(|f| Energies::new(basis, f)).collect();
    let mut out = Vec::new();
    for (f, e) in functions.iter().zip(&energies) {
        match e {
            Ok(e) => out.extend(ctx.settings.t_grid.iter().flat_map(|&t| sandwich_reports(ctx, e, f, t))),
            Err(e) => out.push(ctx.subject("poincare.sandwich_lower", f.to_string(), "").errored(CheckKind::Inequality, EvalPath::Spectral, e)),
        }
    }

    let tol = ctx.settings.tolerances.compound;
    for &t in &ctx.settings.t_grid {
        let setup = || -> Result<_> {
            let rule = ctx.rule()?;
            let targets: Vec<Vec<f64>> = rule.axes().iter().map(|a| a.nodes.clone()).collect();
            let q = OuQuadrature::new(&ctx.rs, t, ctx.settings.order)?;
            Ok((rule, q.on_grid(&targets)?, q))
        };
        let (rule, op, q) = match setup() {
            Ok(v) => v,
            Err(e) => {
                out.push(ctx.subject("poincare.gap_cross_path", "battery", format!("t={t}")).errored(CheckKind::CrossPath, EvalPath::Both, &e));
                continue;
            }
        };
        out.extend(
            functions
                .par_iter()
                .zip(&energies)
                .map(|(f, e)| {
                    let s = ctx.subject("poincare.gap_cross_path", f.to_string(), format!("t={t}"));
                    let run = || -> Result<CheckReport> {
                        let spectral = e.as_ref().map_err(|e| Error::Numerical(e.to_string()))?.sandwich(t).gap;
                        let (quad, magnitude) = quadrature_gap(rule, &q, &op, f)?;
                        Ok(s.cross_path(EvalPath::Both, spectral, quad, tol * scale(magnitude, spectral))
                            .with_note("lhs spectral, rhs quadrature; tolerance relative to ∫f²"))
                    };
                    run().unwrap_or_else(|e| {
                        ctx.subject("poincare.gap_cross_path", f.to_string(), format!("t={t}")).errored(CheckKind::CrossPath, EvalPath::Both, &e)
                    })
                })
                .collect::<Vec<_>>(),
        );
    }

    if let Ok(k) = ctx.rs.axis_multiplicities() {
        if ctx.dim() == 1 {
            let c = 1.0 + 2.0 * rational::to_f64(&k[0]);
            let x = first_coordinate(1);
            for &t in &ctx.settings.t_grid {
                let expected = [
                    ("lower", 2.0 * t * (-2.0 * t).exp() * c),
                    ("gap", -(-2.0 * t).exp_m1() * c),
                    ("upper", 2.0 * t * c),
                ];
                match sandwich_terms(basis, &x, t) {
                    Ok(s) => {
                        for ((name, closed), got) in expected.into_iter().zip([s.lower, s.gap, s.upper]) {
                            out.push(
                                ctx.subject("poincare.sandwich_closed_form", "x1", format!("t={t};term={name}"))
                                    .identity(EvalPath::Spectral, got, closed, 1e-12)
                                    .with_note("lhs from the eigen-energies, rhs closed form for f = x"),
                            );
                        }
                    }
                    Err(e) => out.push(ctx.subject("poincare.sandwich_closed_form", "x1", format!("t={t}")).errored(
                        CheckKind::Identity,
                        EvalPath::Spectral,
                        &e,
                    )),
                }
            }
        }
    }
    out
}

/// One row of the Taylor table: the partial sum S_N = Σ_{n≤N}(2t)^n/n!·∫fL_k^n f
/// and its distance to ψ(t).
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorRow {
    pub n: usize,
    pub partial_sum: f64,
    pub psi: f64,
    pub error: f64,
    /// |S_N − ψ(t)| exactly (up to the 512-bit approximation of e^{−2t}).
    pub error_exact: Rational,
}

/// Rows N = 0..=n_max for f at time t, in exact arithmetic.
pub fn taylor_table(basis: &EigenBasis, f: &Polynomial, t: f64, n_max: usize) -> Result<Vec<TaylorRow>> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("semigroup time must be nonnegative, got {t}")));
    }
    let t = rational::from_f64(t)?;
    let energies = basis.energies(f)?;
    let moments = basis.psi_moments(f, n_max)?;
    // ψ(t) = ΣE_n ρ^{2n} with ρ = e^{−t}
    let rho2 = rational::exp_approx(&(-&t * rational::int(2)), 512);
    let mut psi = Rational::zero();
    let mut power = Rational::one();
    for e in &energies {
        psi += e * &power;
        power *= &rho2;
    }
    let two_t = &t * rational::int(2);
    let mut coefficient = Rational::one();
    let mut sum = Rational::zero();
    let mut rows = Vec::with_capacity(n_max + 1);
    for (n, m) in moments.iter().enumerate() {
        if n > 0 {
            coefficient = coefficient * &two_t / rational::int(n as i64);
        }
        sum += &coefficient * m;
        let error_exact = (&sum - &psi).abs();
        rows.push(TaylorRow {
            n,
            partial_sum: rational::to_f64(&sum),
            psi: rational::to_f64(&psi),
            error: rational::to_f64(&error_exact),
            error_exact,
        });
    }
    Ok(rows)
}

/// |S_30 − ψ(t)| ≤ 1e−8 for deg f ≤ 6 and t ≤ 1, and the remainder
/// non-increasing from N = 12 on.
pub fn check_taylor(ctx: &CheckContext) -> Vec<CheckReport> {
    let basis = match (ctx.kernel_unavailable(), ctx.basis()) {
        (None, Ok(b)) => b,
        (why, res) => {
            let why = why.or_else(|| res.err().map(|e| e.to_string())).unwrap_or_default();
            return ["poincare.taylor_remainder", "poincare.taylor_monotone"]
                .iter()
                .map(|id| ctx.subject(id, "battery", "").skipped(CheckKind::Inequality, EvalPath::Spectral, format!("capability: {why}")))
                .collect();
        }
    };
    let mut functions: Vec<Polynomial> = ctx.battery.up_to_degree(TAYLOR_MAX_DEGREE).cloned().collect();
    functions.push(first_coordinate(ctx.dim()));
    let jobs: Vec<(&Polynomial, f64)> = functions
        .iter()
        .flat_map(|f| ctx.settings.t_grid.iter().filter(|t| **t > 0.0 && **t <= 1.0).map(move |&t| (f, t)))
        .collect();
    jobs.par_iter()
        .flat_map_iter(|&(f, t)| {
            let params = format!("t={t};N={TAYLOR_TERMS}");
            match taylor_table(basis, f, t, TAYLOR_TERMS) {
                Ok(rows) => {
                    let last = &rows[TAYLOR_TERMS];
                    let remainder = ctx
                        .subject("poincare.taylor_remainder", f.to_string(), params.clone())
                        .inequality(EvalPath::Spectral, last.error, TAYLOR_TOLERANCE, 0.0)
                        .with_note("lhs |S_N − ψ(t)| in exact arithmetic, rhs the required bound");
                    // largest increase of the remainder past the threshold index
                    let (rise, at) = rows[TAYLOR_MONOTONE_FROM..]
                        .windows(2)
                        .map(|w| (&w[1].error_exact - &w[0].error_exact, w[1].n))
                        .max_by(|a, b| a.0.cmp(&b.0))
                        .unwrap_or((Rational::zero(), TAYLOR_MONOTONE_FROM));
                    let monotone = ctx
                        .subject("poincare.taylor_monotone", f.to_string(), params)
                        .inequality_exact(EvalPath::Spectral, &rise, &Rational::zero(), 0.0)
                        .with_note(format!("lhs the largest step |R_N| − |R_(N−1)| for N > {TAYLOR_MONOTONE_FROM}, at N = {at}"));
                    vec![remainder, monotone]
                }
                Err(e) => vec![ctx.subject("poincare.taylor_remainder", f.to_string(), params).errored(
                    CheckKind::Inequality,
                    EvalPath::Spectral,
                    &e,
                )],
            }
        })
        .collect()
}

/// t-grid of the convexity check and its finite-difference step.
pub const CONVEXITY_T_GRID: [f64; 6] = [0.1, 0.25, 0.5, 1.0, 2.0, 3.0];
pub const CONVEXITY_STEP: f64 = 0.05;

/// ψ^{(2n)} ≥ 0: exactly, since every even derivative at 0 is ΣE_j(2j)^{2n}
/// with E_j ≥ 0, and numerically through centered second differences.
pub fn check_psi_convexity(ctx: &CheckContext) -> Vec<CheckReport> {
    let basis = match (ctx.kernel_unavailable(), ctx.basis()) {
        (None, Ok(b)) => b,
        (why, res) => {
            let why = why.or_else(|| res.err().map(|e| e.to_string())).unwrap_or_default();
            return ["poincare.psi_even_derivatives", "poincare.psi_second_difference"]
                .iter()
                .map(|id| ctx.subject(id, "battery", "").skipped(CheckKind::Inequality, EvalPath::Spectral, format!("capability: {why}")))
                .collect();
        }
    };
    ctx.battery
        .polynomials
        .par_iter()
        .flat_map_iter(|f| {
            let run = || -> Result<Vec<CheckReport>> {
                let moments = basis.psi_moments(f, 2 * TAYLOR_TERMS)?;
                let min_even = moments.iter().step_by(2).min().cloned().unwrap_or_else(Rational::zero);
                let energies_min = basis.energies(f)?.into_iter().min().unwrap_or_else(Rational::zero);
                let mut out = vec![ctx
                    .subject("poincare.psi_even_derivatives", f.to_string(), format!("orders<={}", 2 * TAYLOR_TERMS))
                    .inequality_exact(EvalPath::Spectral, &Rational::zero(), &min_even.clone().min(energies_min), 0.0)
                    .with_note("rhs the smallest of the energies E_n and the even moments ∫fL^{2n}f")];
                let h = CONVEXITY_STEP;
                let psi0 = basis.psi(f, 0.0)?;
                for &t in &CONVEXITY_T_GRID {
                    let d2 = basis.psi(f, t + h)? - 2.0 * basis.psi(f, t)? + basis.psi(f, t - h)?;
                    out.push(
                        ctx.subject("poincare.psi_second_difference", f.to_string(), format!("t={t};h={h}"))
                            .inequality(EvalPath::Spectral, 0.0, d2, 1e-12 * scale(psi0, 0.0))
                            .with_note("rhs ψ(t+h) − 2ψ(t) + ψ(t−h); tolerance relative to ψ(0)"),
                    );
                }
                Ok(out)
            };
            run().unwrap_or_else(|e| {
                vec![ctx.subject("poincare.psi_even_derivatives", f.to_string(), "").errored(CheckKind::Inequality, EvalPath::Spectral, &e)]
            })
        })
        .collect()
}

/// Exact values on the grid of the eigen-components of f², f and each T_j f,
/// so that O_t of each is Σ_n ρ^n·(value) with ρ a rational stand-in for e^{−t}.
struct ReverseData {
    square: GridValues,
    plain: GridValues,
    gradient: Vec<GridValues>,
    points: usize,
}

impl ReverseData {
    fn new(basis: &EigenBasis, f: &Polynomial, grid: &[Vec<Rational>]) -> Result<Self> {
        let rs = basis.root_system();
        let gradient = (0..rs.dimension())
            .map(|j| {
                let tj = dunkl_tj(rs, j, f)?;
                Ok(GridValues::new(&if tj.is_zero() { Vec::new() } else { basis.eigen_components(&tj)? }, grid))
            })
            .collect::<Result<_>>()?;
        Ok(ReverseData {
            square: GridValues::new(&basis.eigen_components(&f.try_mul(f)?)?, grid),
            plain: GridValues::new(&basis.eigen_components(f)?, grid),
            gradient,
            points: grid.len(),
        })
    }

    /// (variance side, gradient side) at every point.
    fn sides(&self, rho: &DyadicPowers, constant: &Rational) -> Vec<(Rational, Rational)> {
        let factor = (Rational::one() - &rho.rho * &rho.rho) / constant;
        (0..self.points)
            .into_par_iter()
            .map(|i| {
                let of2 = self.square.combine(i, rho);
                let of = self.plain.combine(i, rho);
                let grad = self.gradient.iter().filter(|g| !g.is_empty()).fold(Rational::zero(), |acc, g| {
                    let v = g.combine(i, rho);
                    acc + &v * &v
                });
                (of2 - &of * &of, &factor * grad)
            })
            .collect()
    }
}

/// O_t(f²) − (O_t f)² ≥ (1−e^{−2t})/(1+2γ|R₊|)·‖O_t Tf‖² on the grid, exact;
/// the variance side is cross-checked by kernel quadrature.
pub fn check_reverse_poincare(ctx: &CheckContext) -> Vec<CheckReport> {
    let basis = match (ctx.kernel_unavailable(), ctx.basis()) {
        (None, Ok(b)) => b,
        (why, res) => {
            let why = why.or_else(|| res.err().map(|e| e.to_string())).unwrap_or_default();
            return vec![
                ctx.subject("poincare.reverse", "battery", "").skipped(CheckKind::Inequality, EvalPath::Spectral, format!("capability: {why}")),
                ctx.subject("poincare.reverse_variance_cross_path", "battery", "").skipped(
                    CheckKind::CrossPath,
                    EvalPath::Both,
                    format!("capability: {why}"),
                ),
            ];
        }
    };
    let constant = ctx.rs.gradient_constant();
    let tol = ctx.settings.tolerances.compound;
    let mut functions: Vec<Polynomial> = ctx.battery.polynomials.clone();
    functions.push(first_coordinate(ctx.dim()));
    let data: Vec<Result<ReverseData>> = functions.iter().map(|f| ReverseData::new(basis, f, &ctx.grid)).collect();
    let grid_f64 = ctx.grid_f64();
    let axes = ctx.grid_axes();
    let mut out = Vec::new();
    for &t in ctx.settings.t_grid.iter().filter(|t| **t > 0.0) {
        let params = format!("t={t}");
        let rho = match DyadicPowers::exp_neg(t, EXACT_BITS, 2 * MAX_DEGREE as usize + 1) {
            Ok(r) => r,
            Err(e) => {
                out.push(ctx.subject("poincare.reverse", "battery", params).errored(CheckKind::Inequality, EvalPath::Spectral, &e));
                continue;
            }
        };
        let q = OuQuadrature::new(&ctx.rs, t, ctx.settings.order).and_then(|q| Ok((q.on_grid(&axes)?, q)));
        for (f, d) in functions.iter().zip(&data) {
            let d = match d {
                Ok(d) => d,
                Err(e) => {
                    out.push(ctx.subject("poincare.reverse", f.to_string(), params.clone()).errored(CheckKind::Inequality, EvalPath::Spectral, e));
                    continue;
                }
            };
            let sides = d.sides(&rho, &constant);
            let (at, (var, grad)) = sides
                .iter()
                .enumerate()
                .min_by(|a, b| (&a.1 .0 - &a.1 .1).cmp(&(&b.1 .0 - &b.1 .1)))
                .expect("nonempty grid");
            out.push(
                ctx.subject("poincare.reverse", f.to_string(), params.clone())
                    .inequality_exact(EvalPath::Spectral, grad, var, tol)
                    .with_note(format!(
                        "worst grid point {}: lhs (1−e^(−2t))/C·‖O_t Tf‖², rhs O_t(f²) − (O_t f)²; e^(−t) to {EXACT_BITS} bits",
                        format_point(&ctx.grid[at])
                    )),
            );

            let s = ctx.subject("poincare.reverse_variance_cross_path", f.to_string(), params.clone());
            let cross = || -> Result<CheckReport> {
                let (op, q) = q.as_ref().map_err(|e| Error::Numerical(e.to_string()))?;
                let fp = f.to_float();
                let plain = q.node_values(|y| fp.eval(y));
                let squared: Vec<f64> = plain.iter().map(|v| v * v).collect();
                let of = op.apply(&plain)?;
                let of2 = op.apply(&squared)?;
                let mut worst = (f64::NEG_INFINITY, 0.0, 0.0, 0usize);
                for (i, (a, b)) in of2.iter().zip(&of).enumerate() {
                    let quad = a - b * b;
                    let exact = sides[i].0.to_f64().unwrap_or(f64::NAN);
                    let rel = (quad - exact).abs() / scale(*a, exact);
                    if rel > worst.0 {
                        worst = (rel, exact, quad, i);
                    }
                }
                let (_, exact, quad, i) = worst;
                let magnitude = of2[i].abs();
                Ok(s.cross_path(EvalPath::Both, exact, quad, tol * scale(magnitude, exact)).with_note(format!(
                    "worst grid point {:?}: lhs exact variance, rhs quadrature; tolerance relative to |O_t(f²)|",
                    grid_f64[i]
                )))
            };
            out.push(cross().unwrap_or_else(|e| {
                ctx.subject("poincare.reverse_variance_cross_path", f.to_string(), params.clone()).errored(
                    CheckKind::CrossPath,
                    EvalPath::Both,
                    &e,
                )
            }));
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
    use crate::spectral::build_basis;

    fn ctx(kind: GroupKind, ks: &[Rational]) -> CheckContext {
        let settings = Settings { battery_size: 4, ..Settings::default() };
        CheckContext::new(RootSystem::build(kind, ks).unwrap(), settings)
    }

    #[test]
    fn sandwich_for_the_coordinate() {
        let rs = RootSystem::build(GroupKind::Rank1, &[int(1)]).unwrap();
        let basis = build_basis(&rs, 4).unwrap();
        let t = 0.5;
        let s = sandwich_terms(&basis, &first_coordinate(1), t).unwrap();
        assert!((s.gap - 3.0 * (1.0 - (-1.0f64).exp())).abs() < 1e-14);
        assert!((s.upper - 3.0).abs() < 1e-14);
        assert!((s.lower - 3.0 * (-1.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn taylor_table_for_the_coordinate() {
        // (1+2k)e^{−2t} summed to N terms; with t = 1/2 the error is (1+2k)|Σ_{n>N}(−1)^n/n!|
        let rs = RootSystem::build(GroupKind::Rank1, &[ratio(1, 2)]).unwrap();
        let basis = build_basis(&rs, 2).unwrap();
        let rows = taylor_table(&basis, &first_coordinate(1), 0.5, 12).unwrap();
        let mut tail = 0.0;
        let mut term = 1.0;
        let mut terms = vec![1.0];
        for n in 1..40 {
            term *= -1.0 / n as f64;
            terms.push(term);
        }
        for row in &rows {
            tail = terms[row.n + 1..].iter().sum::<f64>().abs();
            assert!((row.error - 2.0 * tail).abs() <= 1e-15 * 2.0 + 1e-12 * tail, "{row:?}");
        }
        assert!(tail > 0.0);
        assert!((rows[0].error - 2.0 * (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn constant_function_has_exact_partial_sums() {
        let rs = RootSystem::build(GroupKind::Rank1, &[int(2)]).unwrap();
        let basis = build_basis(&rs, 2).unwrap();
        let rows = taylor_table(&basis, &Polynomial::one(1), 0.7, 5).unwrap();
        assert!(rows.iter().all(|r| r.partial_sum == 1.0 && r.error_exact.is_zero()));
    }

    #[test]
    fn reverse_poincare_is_tight_for_the_coordinate() {
        let c = ctx(GroupKind::Rank1, &[int(1)]);
        let reports = check_reverse_poincare(&c);
        for r in &reports {
            assert!(r.pass, "{r:?}");
        }
        let x = reports.iter().find(|r| r.id == "poincare.reverse" && r.function == "x1").unwrap();
        assert_eq!(x.margin, Some(0.0));
    }

    #[test]
    fn sandwich_and_convexity_pass_on_z2() {
        let c = ctx(GroupKind::Z2Power(2), &[int(1), ratio(1, 2)]);
        for r in check_poincare_sandwich(&c).into_iter().chain(check_psi_convexity(&c)) {
            assert!(r.pass || r.status == crate::inequalities::Status::Info, "{r:?}");
        }
    }

    #[test]
    fn sandwich_closed_forms_in_rank_one() {
        let c = ctx(GroupKind::Rank1, &[ratio(1, 2)]);
        let closed: Vec<_> = check_poincare_sandwich(&c).into_iter().filter(|r| r.id == "poincare.sandwich_closed_form").collect();
        assert_eq!(closed.len(), 3 * c.settings.t_grid.len());
        assert!(closed.iter().all(|r| r.pass));
    }
}
