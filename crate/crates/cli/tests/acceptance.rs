//! Acceptance criteria, each run at its pinned tolerance. Prints one PASS/FAIL
//! line per criterion and exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use dunkl_ou::inequalities::gradient::{self, gradient_margin, lower_bound_failure};
use dunkl_ou::inequalities::poincare::{self, sandwich_terms};
use dunkl_ou::inequalities::{
    default_grid, entropy, first_coordinate, semigroup, Battery, CheckContext, CheckReport, Settings, Status,
};
use dunkl_ou::poly::{
    carre_du_champ, carre_du_champ_definition, carre_du_champ_gradient_form, dunkl_laplacian_closed_form,
    dunkl_laplacian_sum_of_squares, dunkl_tj, generator_l,
};
use dunkl_ou::rational::{self, int, ratio};
use num_traits::Zero;
use dunkl_ou::spectral::build_basis;
use dunkl_ou::{GroupSpec, Polynomial, RootSystem};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn group(spec: &str) -> RootSystem {
    spec.parse::<GroupSpec>().and_then(|g| g.build()).expect("built-in group spec")
}

fn context(spec: &str) -> CheckContext {
    CheckContext::new(group(spec), Settings::default())
}

const EIGEN_GROUPS: [&str; 6] =
    ["rank1:k=0", "rank1:k=1/2", "rank1:k=1", "rank1:k=2", "z2:2:k=1,1", "z2:2:k=1,1/2"];
const PAIR: [&str; 2] = ["rank1:k=1", "z2:2:k=1,1/2"];

fn collect(groups: &[&str], check: fn(&CheckContext) -> Vec<CheckReport>) -> Vec<CheckReport> {
    groups.iter().flat_map(|g| check(&context(g))).collect()
}

fn with_id<'a>(reports: &'a [CheckReport], id: &'a str) -> impl Iterator<Item = &'a CheckReport> + 'a {
    reports.iter().filter(move |r| r.id == id)
}

/// Reports with this id that errored or were skipped.
fn missing(reports: &[CheckReport], id: &str) -> usize {
    with_id(reports, id).filter(|r| r.margin.is_none()).count()
}

fn min_margin(reports: &[CheckReport], id: &str) -> f64 {
    with_id(reports, id).filter_map(|r| r.margin).fold(f64::INFINITY, f64::min)
}

fn max_abs_margin(reports: &[CheckReport], id: &str) -> f64 {
    with_id(reports, id).filter_map(|r| r.margin).fold(0.0, |m, x| m.max(x.abs()))
}

fn two_path_exactness() -> Outcome {
    let start = Instant::now();
    let groups = ["rank1:k=1", "z2:2:k=1,1/2", "z2:3:k=1,1/2,2", "sym:3:k=1"];
    let (mut count, mut mismatches) = (0, 0);
    for (i, g) in groups.iter().enumerate() {
        let rs = group(g);
        let polys = Battery::generate(rs.dimension(), 1000 + i as u64, 50).polynomials;
        for (j, p) in polys.iter().enumerate() {
            let q = &polys[(j + 1) % polys.len()];
            let laplacian = dunkl_laplacian_sum_of_squares(&rs, p).unwrap() == dunkl_laplacian_closed_form(&rs, p).unwrap();
            let gamma = carre_du_champ_definition(&rs, p, q).unwrap() == carre_du_champ_gradient_form(&rs, p, q).unwrap();
            count += 1;
            mismatches += usize::from(!laplacian) + usize::from(!gamma);
        }
    }
    let elapsed = start.elapsed();
    outcome(
        count >= 200 && mismatches == 0 && elapsed < Duration::from_secs(30),
        format!("{count} polynomials, {mismatches} coefficient mismatches, {:.1} s (limit 30 s)", elapsed.as_secs_f64()),
    )
}

fn eigen_gate() -> Outcome {
    let (mut count, mut bad) = (0, 0);
    for g in EIGEN_GROUPS {
        let rs = group(g);
        let basis = build_basis(&rs, 10).unwrap();
        for el in basis.elements() {
            count += 1;
            let degree = el.poly.degree() as i64;
            if generator_l(&rs, &el.poly).unwrap() != el.poly.scale(&int(-degree)) {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("{count} basis elements up to degree 10, {bad} violate L p = −deg(p) p"))
}

fn kernel_normalization() -> Outcome {
    let reports = collect(&EIGEN_GROUPS, semigroup::check_kernel_normalization);
    let id = "semigroup.kernel_normalization";
    let worst = max_abs_margin(&reports, id);
    let n = with_id(&reports, id).count();
    let absent = missing(&reports, id);
    outcome(
        n == EIGEN_GROUPS.len() * 5 && absent == 0 && worst <= 1e-10,
        format!("{n} (group, t) cases, max |∫Q dm_k − 1| = {worst:.2e} (tol 1e-10)"),
    )
}

fn cross_path() -> Outcome {
    let reports = collect(&PAIR, semigroup::check_cross_path);
    let id = "semigroup.cross_path";
    let worst = max_abs_margin(&reports, id);
    let n = with_id(&reports, id).count();
    outcome(
        n == PAIR.len() * 30 * 4 && missing(&reports, id) == 0 && worst <= 1e-8,
        format!("{n} (function, t) cases × 50 points, max |spectral − quadrature| = {worst:.2e} (tol 1e-8)"),
    )
}

fn commutation() -> Outcome {
    let reports = collect(&PAIR, semigroup::check_commutation);
    let exact_bad = with_id(&reports, "semigroup.commutation_exact").filter(|r| r.margin != Some(0.0)).count();
    let quad = max_abs_margin(&reports, "semigroup.commutation_quadrature");
    let absent = missing(&reports, "semigroup.commutation_quadrature");
    outcome(
        exact_bad == 0 && absent == 0 && quad <= 1e-8,
        format!("{exact_bad} nonzero exact residuals, max quadrature residual {quad:.2e} (tol 1e-8)"),
    )
}

fn poincare_sandwich() -> Outcome {
    let groups = [&EIGEN_GROUPS[..4], &PAIR[1..]].concat();
    let reports = collect(&groups, poincare::check_poincare_sandwich);
    let lower = min_margin(&reports, "poincare.sandwich_lower");
    let upper = min_margin(&reports, "poincare.sandwich_upper");
    let absent = missing(&reports, "poincare.sandwich_lower") + missing(&reports, "poincare.sandwich_upper");
    // closed forms for f = x in rank one
    let mut closed = 0.0f64;
    for k in [int(0), ratio(1, 2), int(1), int(2)] {
        let rs = RootSystem::build(dunkl_ou::GroupKind::Rank1, std::slice::from_ref(&k)).unwrap();
        let basis = build_basis(&rs, 4).unwrap();
        let c = 1.0 + 2.0 * rational::to_f64(&k);
        for t in [0.0, 0.1, 0.5, 1.0, 2.0] {
            let s = sandwich_terms(&basis, &first_coordinate(1), t).unwrap();
            let e = (-2.0 * t).exp();
            closed = closed
                .max((s.lower - 2.0 * t * e * c).abs())
                .max((s.gap - (1.0 - e) * c).abs())
                .max((s.upper - 2.0 * t * c).abs());
        }
    }
    outcome(
        lower >= -1e-9 && upper >= -1e-9 && absent == 0 && closed <= 1e-12,
        format!("min margins lower {lower:.2e}, upper {upper:.2e} (tol 1e-9); f = x closed-form error {closed:.2e} (tol 1e-12)"),
    )
}

fn gradient_bound() -> Outcome {
    let groups = ["rank1:k=1/2", "rank1:k=1", "rank1:k=2", "z2:2:k=1,1", "z2:2:k=1,1/2", "z2:3:k=1,1/2,2", "sym:3:k=1"];
    let reports = collect(&groups, gradient::check_pointwise_bound);
    let worst = min_margin(&reports, "gradient.pointwise");
    let absent = missing(&reports, "gradient.pointwise");
    let equality = ["rank1:k=0", "rank1:k=1/2", "rank1:k=1", "rank1:k=2"]
        .iter()
        .all(|g| gradient_margin(&group(g), &first_coordinate(1)).unwrap().is_zero());
    outcome(
        worst >= -1e-10 && absent == 0 && equality,
        format!("min pointwise margin {worst:.2e} (tol 1e-10); rank-one witness f = x exact equality: {equality}"),
    )
}

fn lower_bound() -> Outcome {
    let grid = default_grid(1, 9);
    let f = Polynomial::parse("x1^2 + x1", 1).unwrap();
    let mut ok = true;
    let mut details = Vec::new();
    for k in [ratio(1, 2), int(1), int(2)] {
        let rs = RootSystem::build(dunkl_ou::GroupKind::Rank1, std::slice::from_ref(&k)).unwrap();
        let w = lower_bound_failure(&rs, &grid).unwrap();
        let zero = -(int(1) + int(2) * &k) / int(2);
        let at = [zero.clone()];
        let tf = dunkl_tj(&rs, 0, &f).unwrap().eval_exact(&at);
        let gamma = carre_du_champ(&rs, &f, &f).unwrap().eval_exact(&at);
        let expected_gamma = int(4) * &k * &k + int(2) * &k;
        ok &= w.zero == zero
            && tf.is_zero()
            && w.tf_at_zero.is_zero()
            && gamma == expected_gamma
            && w.gamma_at_zero == expected_gamma
            && rational::to_f64(&w.infimum) <= 1e-6;
        details.push(format!(
            "k={}: x*={}, Γ(x*)={}, inf={:.1e}, lattice-only inf={:.3}",
            rational::format(&k),
            rational::format(&w.zero),
            rational::format(&w.gamma_at_zero),
            rational::to_f64(&w.infimum),
            rational::to_f64(&w.lattice_infimum)
        ));
    }
    outcome(ok, details.join("; "))
}

fn reverse_poincare() -> Outcome {
    let reports = collect(&PAIR, poincare::check_reverse_poincare);
    let id = "poincare.reverse";
    let worst = min_margin(&reports, id);
    let ts: std::collections::BTreeSet<&str> = with_id(&reports, id).map(|r| r.params.as_str()).collect();
    outcome(
        worst >= -1e-8 && missing(&reports, id) == 0 && !ts.is_empty(),
        format!("{} reports over t ∈ {{0.1, 0.5, 1, 2}}, min pointwise margin {worst:.2e} (tol 1e-8)", with_id(&reports, id).count()),
    )
}

fn taylor() -> Outcome {
    let reports = collect(&PAIR, poincare::check_taylor);
    let remainder: Vec<&CheckReport> = with_id(&reports, "poincare.taylor_remainder").collect();
    let worst = remainder.iter().filter_map(|r| r.lhs).fold(0.0f64, f64::max);
    let over = remainder.iter().filter(|r| r.lhs.is_none_or(|v| v > 1e-8)).count();
    let non_monotone = with_id(&reports, "poincare.taylor_monotone").filter(|r| r.status != Status::Pass).count();
    outcome(
        over == 0 && non_monotone == 0,
        format!(
            "{over} of {} cases exceed |S_30 − ψ| ≤ 1e-8 (worst {worst:.2e}); {non_monotone} non-monotone beyond N = 12",
            remainder.len()
        ),
    )
}

fn entropy_bounds() -> Outcome {
    let reports = collect(&PAIR, entropy::check_entropy);
    let bound = min_margin(&reports, "entropy.bound");
    let square = min_margin(&reports, "entropy.bound_square");
    let absent = missing(&reports, "entropy.bound") + missing(&reports, "entropy.bound_square");
    let ratios = with_id(&reports, "entropy.log_sobolev_ratio")
        .filter(|r| r.status == Status::Info && r.lhs.zip(r.rhs).is_some_and(|(a, b)| (a / b).is_finite()))
        .count();
    let converged = with_id(&reports, "entropy.convergence").all(|r| r.status == Status::Pass);
    outcome(
        bound >= -1e-8 && square >= -1e-8 && absent == 0 && ratios > 0 && converged,
        format!("min margins Ent(f) {bound:.2e}, Ent(f²) {square:.2e} (tol 1e-8); {ratios} log-Sobolev ratios reported"),
    )
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("dunkl-ou-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut outputs = Vec::new();
    let mut times = Vec::new();
    for run in 0..2 {
        let csv = dir.join(format!("run{run}.csv"));
        let start = Instant::now();
        let status = Command::new(env!("CARGO_BIN_EXE_dunkl-ou"))
            .args(["verify", "--suite", "all", "--group", "z2:2:k=1,0.5", "--out-csv"])
            .arg(&csv)
            .output()
            .expect("binary runs");
        times.push(start.elapsed());
        if ![0, 1].contains(&status.status.code().unwrap_or(-1)) {
            return outcome(false, format!("verify exited with {:?}", status.status.code()));
        }
        outputs.push(std::fs::read(&csv).unwrap());
    }
    let _ = std::fs::remove_dir_all(&dir);
    let identical = outputs[0] == outputs[1] && !outputs[0].is_empty();
    let slowest = times.iter().max().copied().unwrap_or_default();
    outcome(
        identical && slowest < Duration::from_secs(300),
        format!("CSV byte-identical: {identical} ({} bytes); slowest full run {:.1} s (limit 300 s)", outputs[0].len(), slowest.as_secs_f64()),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("two-path exactness", two_path_exactness),
        ("eigen gate", eigen_gate),
        ("kernel normalization", kernel_normalization),
        ("cross-path oracle", cross_path),
        ("commutation", commutation),
        ("Poincaré sandwich", poincare_sandwich),
        ("gradient bound and sharpness", gradient_bound),
        ("lower-bound failure", lower_bound),
        ("reverse Poincaré", reverse_poincare),
        ("Taylor theorem", taylor),
        ("entropy bounds", entropy_bounds),
        ("determinism and runtime", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += usize::from(!o.pass);
        println!("criterion {:>2} {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
