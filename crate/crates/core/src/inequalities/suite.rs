//! Named groups of checks and the parallel runner.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::report::{sort_reports, CheckKind, CheckReport, EvalPath};
use super::{entropy, gradient, identity, poincare, semigroup, CheckContext};
use crate::error::{Error, Result};
use crate::quadrature::rule_convergence;
use crate::rational;

/// Degree up to which the eigen gate verifies the basis.
pub const EIGEN_GATE_DEGREE: u32 = 10;
/// Factor applied to every multiplicity in the rescaled rerun of `all`.
pub const RESCALE_FACTOR: i64 = 2;
/// Bound on |I_{2n} − I_n| for the rule convergence probe.
pub const RULE_CONVERGENCE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Identity,
    Semigroup,
    Poincare,
    Gradient,
    Entropy,
    All,
}

type Check = fn(&CheckContext) -> Vec<CheckReport>;

fn eigen_gate(ctx: &CheckContext) -> Vec<CheckReport> {
    identity::check_eigen_gate(ctx, EIGEN_GATE_DEGREE)
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["identity", "semigroup", "poincare", "gradient", "entropy", "all"];

    fn checks(self) -> Vec<Check> {
        match self {
            Suite::Identity => vec![
                identity::check_two_path,
                identity::check_generator_identities,
                identity::check_gamma_identity,
                identity::check_convexity_theorem,
                eigen_gate,
            ],
            Suite::Semigroup => vec![
                semigroup::check_kernel_normalization,
                semigroup::check_kernel_properties,
                semigroup::check_cross_path,
                semigroup::check_commutation,
                semigroup::check_jensen_and_contraction,
                semigroup::check_invariance_and_symmetry,
            ],
            Suite::Poincare => vec![
                poincare::check_poincare_sandwich,
                poincare::check_taylor,
                poincare::check_psi_convexity,
                poincare::check_reverse_poincare,
            ],
            Suite::Gradient => vec![
                gradient::check_pointwise_bound,
                gradient::check_improved_bound,
                gradient::check_semigroup_corollary,
                gradient::check_lower_bound_failure,
                gradient::check_sweep,
            ],
            Suite::Entropy => vec![entropy::check_entropy],
            Suite::All => [Suite::Identity, Suite::Semigroup, Suite::Poincare, Suite::Gradient, Suite::Entropy]
                .into_iter()
                .flat_map(Suite::checks)
                .collect(),
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "identity" => Suite::Identity,
            "semigroup" => Suite::Semigroup,
            "poincare" => Suite::Poincare,
            "gradient" => Suite::Gradient,
            "entropy" => Suite::Entropy,
            "all" => Suite::All,
            other => {
                return Err(Error::Parse(format!("unknown suite {other:?}, expected one of {}", Suite::NAMES.join(", "))))
            }
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = [Suite::Identity, Suite::Semigroup, Suite::Poincare, Suite::Gradient, Suite::Entropy, Suite::All]
            .iter()
            .position(|s| s == self)
            .unwrap_or(0);
        f.write_str(Suite::NAMES[i])
    }
}

fn run_checks(ctx: &CheckContext, checks: &[Check]) -> Vec<CheckReport> {
    checks.par_iter().flat_map_iter(|check| check(ctx)).collect()
}

/// Runs a suite and returns its reports sorted by key. `all` additionally
/// reruns every non-entropy check with the multiplicities doubled.
pub fn run_suite(ctx: &CheckContext, suite: Suite) -> Vec<CheckReport> {
    let mut reports = run_checks(ctx, &suite.checks());
    if suite == Suite::All {
        let rescaled_checks: Vec<Check> =
            [Suite::Identity, Suite::Semigroup, Suite::Poincare, Suite::Gradient].into_iter().flat_map(Suite::checks).collect();
        match ctx.rescaled_multiplicities(&rational::int(RESCALE_FACTOR)) {
            Ok(doubled) => reports.extend(run_checks(&doubled, &rescaled_checks)),
            Err(e) => reports.push(ctx.subject("suite.rescaled", "", format!("factor={RESCALE_FACTOR}")).errored(
                CheckKind::Info,
                EvalPath::Both,
                &e,
            )),
        }
    }
    sort_reports(&mut reports);
    reports
}

/// The pre-flight convergence probe: |I_{2n} − I_n| at the configured order.
pub fn rule_convergence_report(ctx: &CheckContext) -> CheckReport {
    let n = ctx.settings.order;
    let s = ctx.subject("quadrature.rule_convergence", "cos(Σx)/(1+|x|²/8)", format!("n={n}"));
    if let Some(why) = ctx.kernel_unavailable() {
        return s.skipped(CheckKind::CrossPath, EvalPath::Quadrature, format!("capability: {why}"));
    }
    match rule_convergence(&ctx.rs, n) {
        Ok((coarse, fine)) => s
            .cross_path(EvalPath::Quadrature, coarse, fine, RULE_CONVERGENCE_TOLERANCE)
            .with_note(format!("lhs order {n}, rhs order {}", 2 * n)),
        Err(e) => s.errored(CheckKind::CrossPath, EvalPath::Quadrature, &e),
    }
}
