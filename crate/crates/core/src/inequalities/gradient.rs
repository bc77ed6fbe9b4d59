//! ‖Tf‖² against Γ_k(f): the pointwise bound with constant 1 + 2γ|R₊|, the
//! improved integrated bound, its semigroup corollary, the failure of any
//! reverse bound in rank one, and the sharpness sweep.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::identity::{grid_minimum, max_coefficient_gap, reflection_energy};
use super::poincare::EXACT_BITS;
use super::report::{CheckKind, CheckReport, EvalPath};
use super::{first_coordinate, format_point, CheckContext, DyadicPowers, GridValues};
use crate::error::{Error, Result};
use crate::poly::{carre_du_champ, divided_difference, dunkl_tj, gradient_norm_sq, Polynomial};
use crate::quadrature::expectation_exact;
use crate::rational::{self, Rational};
use crate::rootsys::{GroupKind, RootSystem};
use crate::spectral::EigenBasis;

/// C·Γ_k(f) − ‖Tf‖², exact.
pub fn gradient_margin(rs: &RootSystem, f: &Polynomial) -> Result<Polynomial> {
    let gamma = carre_du_champ(rs, f, f)?;
    Ok(&gamma.scale(&rs.gradient_constant()) - &gradient_norm_sq(rs, f)?)
}

/// Pointwise C·Γ_k(f) ≥ ‖Tf‖² on the grid for the battery, and in rank one
/// the exact equality for f = x.
pub fn check_pointwise_bound(ctx: &CheckContext) -> Vec<CheckReport> {
    let rs = &ctx.rs;
    let tol = ctx.settings.tolerances.symbolic;
    let mut functions = ctx.battery.polynomials.clone();
    functions.push(first_coordinate(ctx.dim()));
    let mut out: Vec<CheckReport> = functions
        .par_iter()
        .map(|f| {
            let s = ctx.subject("gradient.pointwise", f.to_string(), "");
            let run = || -> Result<CheckReport> {
                let m = gradient_margin(rs, f)?;
                let (min, at) = grid_minimum(&m, &ctx.grid)?;
                let x = &ctx.grid[at];
                let lhs = gradient_norm_sq(rs, f)?.eval_exact(x);
                Ok(s.inequality_exact(EvalPath::Symbolic, &lhs, &(&lhs + &min), tol).with_note(format!(
                    "worst grid point {}: lhs ‖Tf‖², rhs (1+2γ|R+|)Γ(f) with constant {}",
                    format_point(x),
                    rational::format(&rs.gradient_constant())
                )))
            };
            run().unwrap_or_else(|e| ctx.subject("gradient.pointwise", f.to_string(), "").errored(CheckKind::Inequality, EvalPath::Symbolic, &e))
        })
        .collect();
    if ctx.dim() == 1 {
        let x = first_coordinate(1);
        let s = ctx.subject("gradient.rank_one_equality", "x1", "");
        out.push(match gradient_margin(rs, &x) {
            Ok(m) => s
                .identity_exact(EvalPath::Symbolic, &max_coefficient_gap(&m, &Polynomial::zero(1)), &Rational::zero(), 0.0)
                .with_note("lhs the largest coefficient of (1+2γ)Γ(x) − (Tx)²"),
            Err(e) => s.errored(CheckKind::Identity, EvalPath::Symbolic, &e),
        });
    }
    out
}

/// The two branches of ∫‖Tf‖²dm_k ≥ max(½, C/(4γ|R₊|))·Σk(α)‖f − σ_αf‖².
pub fn check_improved_bound(ctx: &CheckContext) -> Vec<CheckReport> {
    let rs = &ctx.rs;
    let tol = ctx.settings.tolerances.symbolic;
    let gamma = rs.gamma();
    let c = rs.gradient_constant();
    let second = if gamma.is_positive() {
        Some(&c / (&gamma * rational::int(4 * rs.num_positive_roots() as i64)))
    } else {
        None
    };
    ctx.battery
        .polynomials
        .par_iter()
        .flat_map_iter(|f| {
            let half = ctx.subject("gradient.improved_bound", f.to_string(), "branch=1/2");
            let other = ctx.subject("gradient.improved_bound", f.to_string(), "branch=C/(4γ|R+|)");
            if let Some(why) = ctx.kernel_unavailable() {
                let why = format!("capability: {why}");
                return vec![
                    half.skipped(CheckKind::Inequality, EvalPath::Symbolic, &why),
                    other.skipped(CheckKind::Inequality, EvalPath::Symbolic, &why),
                ];
            }
            let run = || -> Result<(Rational, Rational)> {
                let energy = expectation_exact(rs, &gradient_norm_sq(rs, f)?)?;
                // reflection_energy is ½Σk‖f−σf‖²
                Ok((energy, reflection_energy(rs, f)? * rational::int(2)))
            };
            match run() {
                Ok((energy, reflections)) => {
                    let half_lhs = &reflections / rational::int(2);
                    let mut out = vec![half
                        .inequality_exact(EvalPath::Symbolic, &half_lhs, &energy, tol)
                        .with_note("lhs ½Σk(α)‖f−σf‖², rhs ∫‖Tf‖²")];
                    out.push(match &second {
                        Some(factor) => other
                            .inequality_exact(EvalPath::Symbolic, &(factor * &reflections), &energy, tol)
                            .with_note(format!("lhs {}·Σk(α)‖f−σf‖², rhs ∫‖Tf‖²", rational::format(factor))),
                        None => other.skipped(CheckKind::Inequality, EvalPath::Symbolic, "hypothesis: requires γ > 0"),
                    });
                    out
                }
                Err(e) => vec![half.errored(CheckKind::Inequality, EvalPath::Symbolic, &e)],
            }
        })
        .collect()
}

/// Exact grid values for the corollary: the eigen-components of each T_j f
/// (left side), and the partial derivatives and divided differences of the
/// eigen-components of f (right side, through the gradient form of Γ_k).
struct CorollaryData {
    dunkl: Vec<GridValues>,
    partials: Vec<GridValues>,
    differences: Vec<(Rational, GridValues)>,
}

impl CorollaryData {
    fn new(basis: &EigenBasis, f: &Polynomial, grid: &[Vec<Rational>]) -> Result<Self> {
        let rs = basis.root_system();
        let parts = basis.eigen_components(f)?;
        let map = |g: &dyn Fn(&Polynomial) -> Result<Polynomial>| -> Result<GridValues> {
            let images = parts.iter().map(g).collect::<Result<Vec<_>>>()?;
            Ok(GridValues::new(&images, grid))
        };
        let dunkl = (0..rs.dimension())
            .map(|j| {
                let tj = dunkl_tj(rs, j, f)?;
                Ok(GridValues::new(&if tj.is_zero() { Vec::new() } else { basis.eigen_components(&tj)? }, grid))
            })
            .collect::<Result<_>>()?;
        let partials = (0..rs.dimension()).map(|j| map(&|p: &Polynomial| p.partial(j))).collect::<Result<_>>()?;
        let differences = rs
            .roots()
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.multiplicity.is_zero())
            .map(|(i, r)| Ok((&r.multiplicity * &r.norm_sq / rational::int(2), map(&|p: &Polynomial| divided_difference(rs, i, p))?)))
            .collect::<Result<_>>()?;
        Ok(CorollaryData { dunkl, partials, differences })
    }

    /// (e^{−2t}‖O_t Tf‖², C·Γ_k(O_t f)) at grid point i with e^{−t} ↦ ρ.
    fn sides(&self, i: usize, rho: &DyadicPowers, constant: &Rational) -> (Rational, Rational) {
        let square = |v: &GridValues| {
            if v.is_empty() {
                return Rational::zero();
            }
            let c = v.combine(i, rho);
            &c * &c
        };
        let lhs = self.dunkl.iter().fold(Rational::zero(), |acc, v| acc + square(v)) * &rho.rho * &rho.rho;
        let mut gamma = self.partials.iter().fold(Rational::zero(), |acc, v| acc + square(v));
        for (w, v) in &self.differences {
            gamma += w * square(v);
        }
        (lhs, constant * gamma)
    }
}

/// e^{−2t}‖O_t Tf‖² ≤ C·Γ_k(O_t f) on the grid, exact with e^{−t} replaced by a
/// rational ρ: the left from the eigen-components of each T_j f, the right
/// from those of f through the gradient form of Γ_k.
pub fn check_semigroup_corollary(ctx: &CheckContext) -> Vec<CheckReport> {
    let basis = match (ctx.kernel_unavailable(), ctx.basis()) {
        (None, Ok(b)) => b,
        (why, res) => {
            let why = why.or_else(|| res.err().map(|e| e.to_string())).unwrap_or_default();
            return vec![ctx.subject("gradient.corollary", "battery", "").skipped(
                CheckKind::Inequality,
                EvalPath::Spectral,
                format!("capability: {why}"),
            )];
        }
    };
    let c = ctx.rs.gradient_constant();
    let tol = ctx.settings.tolerances.symbolic;
    let top = 2 * super::battery::MAX_DEGREE as usize + 2;
    let mut out = Vec::new();
    for f in &ctx.battery.polynomials {
        let data = match CorollaryData::new(basis, f, &ctx.grid) {
            Ok(d) => d,
            Err(e) => {
                out.push(ctx.subject("gradient.corollary", f.to_string(), "").errored(CheckKind::Inequality, EvalPath::Spectral, &e));
                continue;
            }
        };
        for &t in &ctx.settings.t_grid {
            let s = ctx.subject("gradient.corollary", f.to_string(), format!("t={t}"));
            let rho = match DyadicPowers::exp_neg(t, EXACT_BITS, top) {
                Ok(r) => r,
                Err(e) => {
                    out.push(s.errored(CheckKind::Inequality, EvalPath::Spectral, &e));
                    continue;
                }
            };
            let sides: Vec<(Rational, Rational)> = (0..ctx.grid.len()).into_par_iter().map(|i| data.sides(i, &rho, &c)).collect();
            let (at, (l, r)) = sides
                .iter()
                .enumerate()
                .min_by(|a, b| (&a.1 .1 - &a.1 .0).cmp(&(&b.1 .1 - &b.1 .0)))
                .expect("nonempty grid");
            out.push(s.inequality_exact(EvalPath::Spectral, l, r, tol).with_note(format!(
                "worst grid point {}: lhs e^(−2t)‖O_t Tf‖², rhs CΓ(O_t f); e^(−t) to {EXACT_BITS} bits",
                format_point(&ctx.grid[at])
            )));
        }
    }
    out
}

/// The rank-one witness f = x² + x against any bound c·Γ_k(f) ≤ (Tf)².
#[derive(Clone, Debug, PartialEq)]
pub struct LowerBoundFailure {
    /// −(1 + 2k)/2.
    pub zero: Rational,
    pub tf_at_zero: Rational,
    pub gamma_at_zero: Rational,
    /// min of (Tf)²/Γ_k(f) over the lattice and the located zero.
    pub infimum: Rational,
    pub infimum_at: Rational,
    /// The same minimum over the lattice alone.
    pub lattice_infimum: Rational,
}

pub fn lower_bound_failure(rs: &RootSystem, grid: &[Vec<Rational>]) -> Result<LowerBoundFailure> {
    if *rs.kind() != GroupKind::Rank1 {
        return Err(Error::InvalidArgument("the lower-bound witness lives in rank one".into()));
    }
    let k = rs.orbit_multiplicities()[0].clone();
    if !k.is_positive() {
        return Err(Error::InvalidArgument("at k = 0 the gradient and Γ_0 coincide; no failure to witness".into()));
    }
    let f: Polynomial = Polynomial::parse("x1^2 + x1", 1)?;
    let tf = dunkl_tj(rs, 0, &f)?;
    let gamma = carre_du_champ(rs, &f, &f)?;
    let tf2 = tf.try_mul(&tf)?;
    let ratio = |x: &Rational| -> Option<Rational> {
        let g = gamma.eval_exact(std::slice::from_ref(x));
        (!g.is_zero()).then(|| tf2.eval_exact(std::slice::from_ref(x)) / g)
    };
    let minimum = |points: &mut dyn Iterator<Item = Rational>| -> Option<(Rational, Rational)> {
        points.filter_map(|x| ratio(&x).map(|r| (r, x))).min_by(|a, b| a.0.cmp(&b.0))
    };
    let zero = -(Rational::one() + rational::int(2) * &k) / rational::int(2);
    let (lattice_infimum, _) = minimum(&mut grid.iter().map(|p| p[0].clone()))
        .ok_or_else(|| Error::InvalidArgument("empty grid".into()))?;
    let (infimum, infimum_at) = minimum(&mut grid.iter().map(|p| p[0].clone()).chain(std::iter::once(zero.clone())))
        .expect("the located zero has Γ > 0");
    Ok(LowerBoundFailure {
        tf_at_zero: tf.eval_exact(std::slice::from_ref(&zero)),
        gamma_at_zero: gamma.eval_exact(std::slice::from_ref(&zero)),
        zero,
        infimum,
        infimum_at,
        lattice_infimum,
    })
}

pub const LOWER_BOUND_INFIMUM: f64 = 1e-6;

pub fn check_lower_bound_failure(ctx: &CheckContext) -> Vec<CheckReport> {
    if *ctx.rs.kind() != GroupKind::Rank1 {
        return Vec::new();
    }
    let k = ctx.rs.orbit_multiplicities()[0].clone();
    let f = "x1^2 + x1";
    if !k.is_positive() {
        return vec![ctx
            .subject("gradient.lower_bound_failure", f, "")
            .skipped(CheckKind::Inequality, EvalPath::Symbolic, "hypothesis: requires k > 0")];
    }
    match lower_bound_failure(&ctx.rs, &ctx.grid) {
        Ok(w) => {
            let four_k2_2k = rational::int(4) * &k * &k + rational::int(2) * &k;
            vec![
                ctx.subject("gradient.lower_bound_failure", f, "quantity=infimum")
                    .inequality(EvalPath::Symbolic, rational::to_f64(&w.infimum), LOWER_BOUND_INFIMUM, 0.0)
                    .with_note(format!("min of (Tf)²/Γ(f) over the lattice and x* = {}, attained at {}", rational::format(&w.zero), rational::format(&w.infimum_at))),
                ctx.subject("gradient.lower_bound_failure", f, "quantity=lattice_infimum")
                    .info(EvalPath::Symbolic, rational::to_f64(&w.lattice_infimum), LOWER_BOUND_INFIMUM)
                    .with_note("min of (Tf)²/Γ(f) over the lattice alone"),
                ctx.subject("gradient.lower_bound_failure", f, "quantity=Tf(x*)")
                    .identity_exact(EvalPath::Symbolic, &w.tf_at_zero, &Rational::zero(), 0.0)
                    .with_note(format!("x* = {}", rational::format(&w.zero))),
                ctx.subject("gradient.lower_bound_failure", f, "quantity=Γ(x*)")
                    .identity_exact(EvalPath::Symbolic, &w.gamma_at_zero, &four_k2_2k, 0.0)
                    .with_note("rhs 4k² + 2k"),
            ]
        }
        Err(e) => vec![ctx.subject("gradient.lower_bound_failure", f, "").errored(CheckKind::Inequality, EvalPath::Symbolic, &e)],
    }
}

/// One row of the sharpness sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub group: String,
    pub constant: Rational,
    /// ‖Tf‖²/Γ_k(f) for f = x_1, as an exact value where it is constant on
    /// the lattice, else its maximum there.
    pub witness_ratio: Rational,
    pub witness_constant: bool,
    /// Maximum over battery members and lattice points of ‖Tf‖²/Γ_k(f).
    pub battery_sup: f64,
    pub battery_sup_function: String,
}

/// max over the lattice of ‖Tf‖²/Γ_k(f), and whether the ratio is constant there.
pub fn ratio_on_grid(rs: &RootSystem, f: &Polynomial, grid: &[Vec<Rational>]) -> Result<Option<(Rational, bool)>> {
    let num = gradient_norm_sq(rs, f)?;
    let den = carre_du_champ(rs, f, f)?;
    let ratios: Vec<Rational> = grid
        .par_iter()
        .filter_map(|x| {
            let d = den.eval_exact(x);
            (!d.is_zero()).then(|| num.eval_exact(x) / d)
        })
        .collect();
    let Some(max) = ratios.iter().max().cloned() else { return Ok(None) };
    let constant = ratios.iter().all(|r| *r == max);
    Ok(Some((max, constant)))
}

pub fn sweep_row(rs: &RootSystem, battery: &[Polynomial], grid: &[Vec<Rational>]) -> Result<SweepRow> {
    let witness = first_coordinate(rs.dimension());
    let (witness_ratio, witness_constant) =
        ratio_on_grid(rs, &witness, grid)?.ok_or_else(|| Error::Numerical("Γ(x1) vanishes on the whole lattice".into()))?;
    let mut battery_sup = f64::NEG_INFINITY;
    let mut battery_sup_function = String::new();
    let ratios: Vec<Option<(Rational, bool)>> = battery.par_iter().map(|f| ratio_on_grid(rs, f, grid)).collect::<Result<_>>()?;
    for (f, r) in battery.iter().zip(ratios) {
        if let Some((r, _)) = r {
            let v = rational::to_f64(&r);
            if v > battery_sup {
                battery_sup = v;
                battery_sup_function = f.to_string();
            }
        }
    }
    Ok(SweepRow {
        group: rs.label(),
        constant: rs.gradient_constant(),
        witness_ratio,
        witness_constant,
        battery_sup,
        battery_sup_function,
    })
}

/// The sweep row for this context as reports: the witness ratio (identity with
/// the constant in rank one) and the battery supremum (bounded by the constant).
pub fn check_sweep(ctx: &CheckContext) -> Vec<CheckReport> {
    sweep_reports(ctx, sweep_row(&ctx.rs, &ctx.battery.polynomials, &ctx.grid))
}

/// Reports for an already computed sweep row.
pub fn sweep_reports(ctx: &CheckContext, row: Result<SweepRow>) -> Vec<CheckReport> {
    let tol = ctx.settings.tolerances.symbolic;
    match row {
        Ok(row) => {
            let c = rational::to_f64(&row.constant);
            let witness = ctx.subject("gradient.sweep_witness", "x1", "");
            let witness = if ctx.dim() == 1 {
                witness.identity_exact(EvalPath::Symbolic, &row.witness_ratio, &row.constant, 0.0)
            } else {
                witness.info(EvalPath::Symbolic, rational::to_f64(&row.witness_ratio), c)
            };
            vec![
                witness.with_note("lhs max over the lattice of ‖Tf‖²/Γ(f), rhs 1+2γ|R+|"),
                ctx.subject("gradient.sweep_battery", row.battery_sup_function.clone(), "")
                    .inequality(EvalPath::Symbolic, row.battery_sup, c, tol * c)
                    .with_note("lhs sup over battery and lattice of ‖Tf‖²/Γ(f), rhs 1+2γ|R+|"),
            ]
        }
        Err(e) => vec![ctx.subject("gradient.sweep_witness", "x1", "").errored(CheckKind::Info, EvalPath::Symbolic, &e)],
    }
}
