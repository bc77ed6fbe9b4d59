use std::fs;
use std::path::Path;

use dunkl_ou::inequalities::gradient::{sweep_reports, sweep_row};
use dunkl_ou::inequalities::poincare::taylor_table;
use dunkl_ou::inequalities::report::{self, summarize, CheckReport, Status};
use dunkl_ou::inequalities::{entropy, rule_convergence_report, run_suite, CheckContext, EvalPath};
use dunkl_ou::rational;
use dunkl_ou::{Error, Result};

use crate::config::RunConfig;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CROSS_PATH: u8 = 3;

/// Lines of failure detail printed before truncating.
const SHOWN_FAILURES: usize = 20;

fn context(config: &RunConfig) -> Result<CheckContext> {
    Ok(CheckContext::new(config.group.build()?, config.settings()))
}

/// 3 if an internal cross-path check failed, else 1 on any failure, else 0.
pub fn exit_code(reports: &[CheckReport]) -> u8 {
    let s = summarize(reports);
    if s.cross_path_failures > 0 {
        EXIT_CROSS_PATH
    } else if s.fail > 0 {
        EXIT_FAIL
    } else {
        EXIT_PASS
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

fn describe(r: &CheckReport) -> String {
    let num = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_else(|| "-".into());
    format!(
        "{} [{}] {} {} lhs={} rhs={} margin={} tol={:e} {}",
        r.id,
        r.group,
        r.function,
        r.params,
        num(r.lhs),
        num(r.rhs),
        num(r.margin),
        r.tolerance,
        r.note
    )
}

/// Writes the requested report files, prints the summary and returns the exit code.
fn finish(config: &RunConfig, reports: &mut [CheckReport]) -> Result<u8> {
    report::sort_reports(reports);
    if let Some(p) = &config.out_json {
        write_file(p, &report::to_json(reports)?)?;
    }
    if let Some(p) = &config.out_csv {
        write_file(p, &report::to_csv(reports)?)?;
    }
    let s = summarize(reports);
    println!(
        "{} reports: {} pass, {} fail, {} skipped, {} info",
        reports.len(),
        s.pass,
        s.fail,
        s.skipped,
        s.info
    );
    let failures: Vec<&CheckReport> = reports.iter().filter(|r| r.status == Status::Fail).collect();
    for r in failures.iter().take(SHOWN_FAILURES) {
        let tag = if r.is_cross_path_failure() { "CROSS-PATH" } else { "FAIL" };
        eprintln!("{tag} {}", describe(r));
    }
    if failures.len() > SHOWN_FAILURES {
        eprintln!("... and {} more failures", failures.len() - SHOWN_FAILURES);
    }
    Ok(exit_code(reports))
}

pub fn verify(config: &RunConfig) -> Result<u8> {
    let ctx = context(config)?;
    let probe = rule_convergence_report(&ctx);
    if probe.status == Status::Fail {
        eprintln!("quadrature rule did not converge: {}", describe(&probe));
        let mut reports = vec![probe];
        finish(config, &mut reports)?;
        return Ok(EXIT_CROSS_PATH);
    }
    let mut reports = run_suite(&ctx, config.suite);
    reports.push(probe);
    finish(config, &mut reports)
}

/// For each k on the grid, with k applied to every orbit: the witness ratio
/// ‖Tx_1‖²/Γ(x_1) and the battery supremum against 1 + 2γ|R+|.
pub fn sweep(config: &RunConfig) -> Result<u8> {
    let mut reports = Vec::new();
    println!("{:<24} {:>12} {:>14} {:>8} {:>14}  sup attained by", "group", "1+2γ|R+|", "witness", "exact", "battery sup");
    for k in &config.k_grid {
        let ctx = CheckContext::new(config.group.with_uniform_multiplicity(k).build()?, config.settings());
        let row = sweep_row(&ctx.rs, &ctx.battery.polynomials, &ctx.grid);
        if let Ok(row) = &row {
            println!(
                "{:<24} {:>12} {:>14} {:>8} {:>14.10}  {}",
                row.group,
                rational::format(&row.constant),
                rational::format(&row.witness_ratio),
                row.witness_constant,
                row.battery_sup,
                row.battery_sup_function
            );
        }
        reports.extend(sweep_reports(&ctx, row));
    }
    finish(config, &mut reports)
}

/// Partial sums S_N of the Taylor series of t ↦ ∫(O_t f)²dm_k against the
/// exact value, for each configured t.
pub fn taylor(config: &RunConfig) -> Result<u8> {
    let ctx = context(config)?;
    if let Some(why) = ctx.kernel_unavailable() {
        return Err(Error::Capability(why));
    }
    let f = config.polynomial()?;
    let basis = ctx.basis()?;
    let mut reports = Vec::new();
    for &t in &config.t_grid {
        let rows = taylor_table(basis, &f, t, config.terms)?;
        println!("t = {t}");
        println!("{:>4} {:>24} {:>24} {:>12}", "N", "S_N", "ψ(t)", "|S_N − ψ|");
        for row in rows {
            println!("{:>4} {:>24.16e} {:>24.16e} {:>12.3e}", row.n, row.partial_sum, row.psi, row.error);
            reports.push(
                ctx.subject("taylor.partial_sum", f.to_string(), format!("t={t};N={:02}", row.n))
                    .info(EvalPath::Spectral, row.partial_sum, row.psi)
                    .with_note(format!("|S_N − ψ(t)| = {:e}", row.error)),
            );
        }
    }
    finish(config, &mut reports)
}

/// Entropy bounds and the empirical log-Sobolev ratios for the positive battery.
pub fn entropy(config: &RunConfig) -> Result<u8> {
    let ctx = context(config)?;
    let mut reports = entropy::check_entropy(&ctx);
    for r in reports.iter().filter(|r| r.id.starts_with("entropy.log_sobolev")) {
        match (r.lhs, r.rhs) {
            (Some(a), Some(b)) if r.id == "entropy.log_sobolev_sup" => {
                println!("{:<26} sup Ent/∫Γ = {a:.10e}, (1+2γ|R+|)·sup Ent/∫‖Tf‖² = {b:.10e}", r.id)
            }
            (Some(a), Some(b)) if r.status == Status::Info => {
                println!("{:<26} {:<16} {:<60} {:.10e}", r.id, r.params, r.function, a / b)
            }
            _ => println!("{:<26} {:<16} {:<60} {}", r.id, r.params, r.function, r.note),
        }
    }
    finish(config, &mut reports)
}
