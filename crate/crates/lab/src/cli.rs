//! The `magdirac` command line.
//!
//! Exit codes: 0 every verdict passes, 1 a verdict fails, 2 usage or config
//! error, 3 numerical non-convergence, 4 no blow-up certificate (`μ ≤ 0`).

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use magdirac_core::cutoff::make_cutoffs;
use magdirac_core::exponents::{admissible, exponents_f64};
use magdirac_core::params::ConstructionParams;
use magdirac_core::quasimode::Quasimode;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{LabError, Result};
use crate::evolve::{persistence, persistence_box, TRUNCATION_TOL};
use crate::io;
use crate::landau::{default_mode_index, solve_modes_with, EigenMode2D};
use crate::scaling::{
    all_checks, blow_up_report, halving_check, run_ladder, Check, Column, LadderRow, NormLadderReport, BOUND_SLACK,
    FREE_EDGE_TOL, MODE_REFINEMENT, SLOPE_TOL, SPREAD_LIMIT,
};
use crate::sweep::exponent_sweep;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICS: i32 = 3;
pub const EXIT_NO_CERTIFICATE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "magdirac", version, about = "Quasimode experiments for the magnetic Dirac equation")]
pub struct Cli {
    /// TOML run configuration; the reference campaign when absent.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker thread cap.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Seed of randomized checks.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the low-|λ| Landau modes and cache them.
    Eigen,
    /// Run the R-ladder, fit every slope and write CSV, JSON and plot data.
    Scaling,
    /// Follow f_R under the magnetic and the free flow and write fidelity curves.
    Evolve,
    /// Print the closed-form exponents.
    Exponents {
        p: f64,
        q: f64,
        delta: f64,
        gamma: f64,
        beta: f64,
        /// Also check κ = μ and the γ-window on this many random rational tuples.
        #[arg(long, value_name = "N")]
        sweep: Option<usize>,
    },
    /// Summarize the results already in the output directory.
    Report,
}

/// Exit status for an error.
pub fn exit_code(err: &LabError) -> i32 {
    match err {
        LabError::NonConvergence { .. }
        | LabError::Quadrature { .. }
        | LabError::BoundaryDecay { .. }
        | LabError::DecayFit { .. }
        | LabError::Padding { .. }
        | LabError::Truncation { .. } => EXIT_NUMERICS,
        _ => EXIT_USAGE,
    }
}

/// Runs a parsed command line and returns the exit status.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(LabError::Config("--jobs must be positive".into()));
        }
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    if let Command::Exponents { p, q, delta, gamma, beta, sweep } = cli.command {
        return cmd_exponents(p, q, delta, gamma, beta, sweep, cli.seed.unwrap_or(0));
    }
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::reference(),
    };
    let out = cli.out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("out"));
    match cli.command {
        Command::Eigen => cmd_eigen(&cfg, &out).map(|_| EXIT_PASS),
        Command::Scaling => cmd_scaling(&cfg, &out),
        Command::Evolve => cmd_evolve(&cfg, &out),
        Command::Report => cmd_report(&out),
        Command::Exponents { .. } => unreachable!(),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| LabError::Format(e.to_string()))?;
    fs::create_dir_all(path.parent().unwrap_or(Path::new(".")))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Loads the cached modes of the config's grid if they are all present and
/// meet the tolerance, otherwise solves and rewrites the cache.
pub fn ensure_modes(cfg: &RunConfig, out: &Path) -> Result<Vec<EigenMode2D>> {
    let grid = cfg.mode_grid()?;
    let dir = out.join("modes");
    let count = cfg.mode_count();
    match io::load_modes(&dir, grid, count) {
        Ok(Some(cached)) if cached.iter().all(|(m, _)| m.residual < cfg.tolerance.eigen) => {
            println!("reusing {count} cached modes in {} (checksums match)", dir.display());
            return Ok(cached.into_iter().map(|(m, _)| m).collect());
        }
        Ok(Some(_)) => println!("cached modes miss the tolerance {:.1e}; solving again", cfg.tolerance.eigen),
        Ok(None) => {}
        Err(e) => println!("ignoring mode cache: {e}"),
    }
    let start = Instant::now();
    let modes = solve_modes_with(grid, count, cfg.solve_options())?;
    let hash = cfg.hash();
    for (i, m) in modes.iter().enumerate() {
        io::write_mode(&io::mode_path(&dir, grid, i), m, Some(&hash))?;
    }
    println!(
        "solved {} modes on L={} N={} in {:.1}s",
        modes.len(),
        grid.half_width,
        grid.n,
        start.elapsed().as_secs_f64()
    );
    Ok(modes)
}

fn selected(cfg: &RunConfig, modes: &[EigenMode2D]) -> Result<usize> {
    match cfg.construction.mode_index {
        Some(i) if i < modes.len() => Ok(i),
        Some(i) => Err(LabError::Config(format!("mode_index {i} but only {} modes", modes.len()))),
        None => default_mode_index(modes)
            .ok_or_else(|| LabError::Config("no mode with positive λ; set construction.mode_index".into())),
    }
}

fn cmd_eigen(cfg: &RunConfig, out: &Path) -> Result<Vec<EigenMode2D>> {
    let modes = ensure_modes(cfg, out)?;
    let pick = selected(cfg, &modes)?;
    println!("{:>3}  {:>14}  {:>10}  {:>10}  {:>8}", "k", "lambda", "residual", "decay", "R2");
    for (i, m) in modes.iter().enumerate() {
        let mark = if i == pick { " *" } else { "" };
        println!(
            "{i:>3}  {:>14.10}  {:>10.2e}  {:>10.5}  {:>8.5}{mark}",
            m.lambda, m.residual, m.decay_rate, m.decay_r2
        );
    }
    Ok(modes)
}

fn fit_json(c: &Check) -> Value {
    json!({
        "name": c.name,
        "required": c.required,
        "passed": c.passed,
        "detail": c.detail,
        "fit": c.fit.map(|f| json!({
            "slope": f.slope,
            "intercept": f.intercept,
            "residual": f.residual,
            "predicted": f.predicted,
            "tolerance": f.tolerance,
            "kind": format!("{:?}", f.kind),
            "verdict": f.verdict,
        })),
    })
}

fn row_json(r: &LadderRow) -> Value {
    json!({
        "R": r.r,
        "norm_fR_Hsigma": r.norm_fr_hsigma,
        "norm_fR_L2": r.norm_fr_l2,
        "norm_fR_H1": r.norm_fr_h1,
        "norm_fR_Lq": r.norm_fr_lq,
        "norm_WR_mixed": r.norm_wr_mixed,
        "norm_FR_dual": r.norm_fsource_dual,
        "norm_FtildeR_dual": r.norm_ftilde_dual,
        "profile_lambda": r.profile_lambda,
        "quot_epo25": r.quot_epo25,
        "quot_epo26": r.quot_epo26,
        "quot_epo75": r.quot_epo75,
        "norm_free_mixed": r.free_mixed,
        "quot_free": r.quot_free,
        "terms": r.terms,
        "quadrature_nodes": r.nodes,
        "valid": r.valid,
        "error": r.error,
    })
}

fn params_json(p: &ConstructionParams) -> Value {
    json!({ "delta": p.delta, "gamma": p.gamma, "beta": p.beta, "R": p.r })
}

/// Status of a finished scaling campaign.
pub fn scaling_exit(certificate: bool, checks: &[Check], rows_valid: bool) -> i32 {
    if !certificate {
        EXIT_NO_CERTIFICATE
    } else if rows_valid && checks.iter().filter(|c| c.required).all(|c| c.passed) {
        EXIT_PASS
    } else {
        EXIT_VERDICT
    }
}

fn plotted_columns(report: &NormLadderReport) -> Vec<Column> {
    let mut cols = vec![
        Column::FrHsigma,
        Column::FrL2,
        Column::FrH1,
        Column::FrLq,
        Column::WrMixed,
        Column::FsourceDual,
        Column::FtildeDual,
        Column::ProfileLambda,
        Column::Quot25,
        Column::Quot26,
        Column::Quot75,
    ];
    if report.options.free_control {
        cols.extend([Column::FreeMixed, Column::QuotFree]);
    }
    if report.options.term_diagnostics {
        cols.extend((0..5).map(Column::Term));
    }
    cols
}

fn cmd_scaling(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let start = Instant::now();
    let modes = ensure_modes(cfg, out)?;
    let index = selected(cfg, &modes)?;
    let mode = &modes[index];
    let (template, pair, policy) = (cfg.params()?, cfg.pair()?, cfg.policy());
    let mut report = run_ladder(&template, &cfg.construction.r_list, pair, policy, cfg.ladder_options(), mode)?;
    if let Some(r) = cfg.campaign.halving_r {
        report.convergence = Some(halving_check(&template, r, pair, policy, mode)?);
    }
    let checks = all_checks(&report);
    let blow = blow_up_report(&report);
    let hash = cfg.hash();
    io::write_ladder_csv(create(&out.join("ladder.csv"))?, &report, &hash)?;
    for col in plotted_columns(&report) {
        io::write_plot(create(&out.join("plot").join(format!("{}.dat", col.name())))?, &report, col, &hash)?;
    }
    let rows_valid = report.rows.iter().all(|r| r.valid);
    let code = scaling_exit(blow.certificate, &checks, rows_valid);
    let e = &report.exponents;
    let manifest = json!({
        "kind": "scaling",
        "version": env!("CARGO_PKG_VERSION"),
        "config_hash": hash,
        "config": cfg,
        "params": params_json(&template),
        "pair": { "p": pair.p(), "q": pair.q(), "sigma": pair.sigma() },
        "mode": { "index": index, "lambda": mode.lambda, "residual": mode.residual, "grid": { "L": mode.grid.half_width, "N": mode.grid.n }, "refinement": MODE_REFINEMENT },
        "grids": report.rows.iter().map(|r| {
            let g = policy.grid(&template.with_r(r.r).unwrap_or(template)).ok();
            json!({ "R": r.r, "rho_max": g.map(|g| g.rho_max), "z_lo": g.map(|g| g.z_lo), "z_hi": g.map(|g| g.z_hi), "n_rho": policy.n_rho, "n_z": policy.n_z })
        }).collect::<Vec<_>>(),
        "tolerances": {
            "slope": SLOPE_TOL, "bound_slack": BOUND_SLACK, "spread_limit": SPREAD_LIMIT,
            "free_edge": FREE_EDGE_TOL, "halving": 1e-2, "eigen": cfg.tolerance.eigen, "boundary": cfg.tolerance.boundary,
        },
        "exponents": {
            "sigma": e.sigma, "fR": e.f_r_exp, "fR_L2": e.f_r_l2_exp, "fR_H1": e.f_r_h1_exp, "WR": e.w_r_exp,
            "WR_mixed": e.w_r_mixed_exp, "FR": e.f_source_exp, "FR_penalty": e.f_source_penalty,
            "FR_penalty_alt": e.f_source_penalty_alt, "FR_dual": e.f_source_dual_exp, "FR_dual_alt": e.f_source_dual_exp_alt,
            "ratio25": e.ratio25_exp, "kappa": e.kappa, "mu": e.mu, "beta_threshold": e.beta_threshold,
            "gamma_window": [e.gamma_window.0, e.gamma_window.1],
        },
        "rows": report.rows.iter().map(row_json).collect::<Vec<_>>(),
        "convergence": report.convergence.as_ref().map(|c| json!({
            "R": c.r, "max_relative_change": c.max_relative_change(), "coarse": row_json(&c.coarse), "fine": row_json(&c.fine),
        })),
        "checks": checks.iter().map(fit_json).collect::<Vec<_>>(),
        "blow_up": {
            "quotients": blow.quotients, "increasing_tail": blow.increasing_tail, "mu": blow.mu,
            "certificate": blow.certificate, "free_spread": blow.free_spread,
        },
        "warnings": report.warnings,
        "verdict": { "certificate": blow.certificate, "rows_valid": rows_valid, "exit_code": code },
        "wall_clock_seconds": start.elapsed().as_secs_f64(),
    });
    write_json(&out.join("manifest.json"), &manifest)?;
    print_rows(&report);
    for w in &report.warnings {
        println!("warning: {w}");
    }
    print_checks(&checks);
    if !blow.certificate {
        println!("no blow-up certificate: mu = {:.6} <= 0", blow.mu);
    }
    println!("wrote {} ({:.1}s)", out.display(), start.elapsed().as_secs_f64());
    Ok(code)
}

fn print_rows(report: &NormLadderReport) {
    println!(
        "{:>6} {:>11} {:>11} {:>11} {:>11} {:>11} {:>10} {:>10} {:>10}",
        "R", "fR_Hs", "fR_L2", "fR_H1", "WR_mixed", "Ft_dual", "q25", "q26", "q75"
    );
    for r in &report.rows {
        if r.valid {
            println!(
                "{:>6} {:>11.5} {:>11.5} {:>11.5} {:>11.5} {:>11.3} {:>10.5} {:>10.6} {:>10.6}",
                r.r,
                r.norm_fr_hsigma,
                r.norm_fr_l2,
                r.norm_fr_h1,
                r.norm_wr_mixed,
                r.norm_ftilde_dual,
                r.quot_epo25,
                r.quot_epo26,
                r.quot_epo75
            );
        } else {
            println!("{:>6} invalid: {}", r.r, r.error.as_deref().unwrap_or("?"));
        }
    }
}

fn print_checks(checks: &[Check]) {
    for c in checks {
        let status = match (c.passed, c.required) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "info",
        };
        println!("{status} {:<26} {}", c.name, c.detail);
    }
}

fn cmd_evolve(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let start = Instant::now();
    let modes = ensure_modes(cfg, out)?;
    let mode = &modes[selected(cfg, &modes)?];
    let profile = mode.interpolant(MODE_REFINEMENT)?;
    let params = cfg.params()?;
    let qm = Quasimode::new(params, make_cutoffs(), &profile);
    let e = &cfg.evolve;
    let grid = persistence_box(&params, [e.n_xy, e.n_xy, e.n_z])?;
    let run = persistence(&qm, grid, e.checkpoints)?;
    let hash = cfg.hash();
    io::write_curve(
        create(&out.join("fidelity_magnetic.dat"))?,
        "fidelity_magnetic",
        &run.times,
        &run.magnetic,
        &hash,
    )?;
    io::write_curve(create(&out.join("fidelity_free.dat"))?, "fidelity_free", &run.times, &run.free, &hash)?;
    if e.write_final {
        io::write_field(&out.join("magnetic_final.bin"), &run.last, Some(&hash))?;
    }
    let dominates = run.dominates();
    let code = if dominates { EXIT_PASS } else { EXIT_VERDICT };
    write_json(
        &out.join("evolve.json"),
        &json!({
            "kind": "evolve",
            "version": env!("CARGO_PKG_VERSION"),
            "config_hash": hash,
            "config": cfg,
            "params": params_json(&params),
            "grid": { "origin": grid.origin, "spacing": grid.spacing, "dims": grid.dims },
            "dt": run.spec.dt, "steps": run.spec.steps, "checkpoint_every": run.spec.checkpoint_every,
            "truncation_tol": TRUNCATION_TOL,
            "times": run.times, "magnetic": run.magnetic, "free": run.free,
            "mass_drift": run.mass_drift,
            "verdict": { "dominates": dominates, "exit_code": code },
            "wall_clock_seconds": start.elapsed().as_secs_f64(),
        }),
    )?;
    println!("{:>10} {:>10} {:>10}", "t", "magnetic", "free");
    for ((t, m), f) in run.times.iter().zip(&run.magnetic).zip(&run.free) {
        println!("{t:>10.4} {m:>10.5} {f:>10.5}");
    }
    println!("mass drift {:.2e}; {} steps of {:.4}", run.mass_drift, run.spec.steps, run.spec.dt);
    println!(
        "{} magnetic fidelity dominates ({:.1}s)",
        if dominates { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    Ok(code)
}

fn cmd_exponents(p: f64, q: f64, delta: f64, gamma: f64, beta: f64, sweep: Option<usize>, seed: u64) -> Result<i32> {
    let pair = admissible(p, q)?;
    // R does not enter the exponents; any admissible radius validates the rest.
    let params = ConstructionParams::new(delta, gamma, beta, 8.0)?;
    let e = exponents_f64(delta, gamma, beta, &pair);
    println!("p = {p}, q = {q}, sigma = {}", e.sigma);
    if pair.is_excluded() {
        println!("note: (p, q) = (inf, 2) is excluded from the counterexample");
    }
    for (name, v) in [
        ("fR (H^sigma)", e.f_r_exp),
        ("fR (L2)", e.f_r_l2_exp),
        ("fR (H1)", e.f_r_h1_exp),
        ("WR (L^q)", e.w_r_exp),
        ("WR (mixed, T=R^beta)", e.w_r_mixed_exp),
        ("FR (spatial)", e.f_source_exp),
        ("FR penalty", e.f_source_penalty),
        ("FR penalty (R^-1 branch)", e.f_source_penalty_alt),
        ("FR dual", e.f_source_dual_exp),
        ("FR dual (R^-1 branch)", e.f_source_dual_exp_alt),
        ("quotient epo25", e.ratio25_exp),
        ("kappa", e.kappa),
        ("mu", e.mu),
        ("beta threshold", e.beta_threshold),
    ] {
        println!("{name:<26} {v:>10.6}");
    }
    println!("gamma window              ({}, {})", e.gamma_window.0, e.gamma_window.1);
    println!("beta above threshold: {}", params.beta_above_threshold());
    println!("mu > 0: {}", e.mu_positive());
    if let Some(n) = sweep {
        let s = exponent_sweep(n, seed)?;
        println!(
            "sweep of {n} rational tuples (seed {seed}): {} kappa/mu mismatches, {} window mismatches, {} inside the window",
            s.kappa_mismatches, s.window_mismatches, s.inside_window
        );
        if let Some(f) = &s.first_failure {
            println!("first failure: {f}");
        }
        if !s.passed() {
            return Ok(EXIT_VERDICT);
        }
    }
    Ok(if e.mu_positive() { EXIT_PASS } else { EXIT_NO_CERTIFICATE })
}

fn cmd_report(out: &Path) -> Result<i32> {
    let read = |name: &str| -> Result<Option<Value>> {
        let path = out.join(name);
        if !path.is_file() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path)?;
        serde_json::from_str(&text).map(Some).map_err(|e| LabError::Format(format!("{}: {e}", path.display())))
    };
    let (scaling, evolve) = (read("manifest.json")?, read("evolve.json")?);
    if scaling.is_none() && evolve.is_none() {
        return Err(LabError::Config(format!("nothing to report in {}", out.display())));
    }
    let mut code = EXIT_PASS;
    if let Some(m) = scaling {
        println!("scaling campaign (config {})", m["config_hash"].as_str().unwrap_or("?"));
        for c in m["checks"].as_array().into_iter().flatten() {
            let (passed, required) = (c["passed"].as_bool() == Some(true), c["required"].as_bool() == Some(true));
            let status = if passed {
                "PASS"
            } else if required {
                "FAIL"
            } else {
                "info"
            };
            println!("{status} {:<26} {}", c["name"].as_str().unwrap_or("?"), c["detail"].as_str().unwrap_or(""));
        }
        for w in m["warnings"].as_array().into_iter().flatten() {
            println!("warning: {}", w.as_str().unwrap_or(""));
        }
        code = code.max(m["verdict"]["exit_code"].as_i64().unwrap_or(EXIT_VERDICT as i64) as i32);
    }
    if let Some(v) = evolve {
        println!("evolve (config {})", v["config_hash"].as_str().unwrap_or("?"));
        let pairs = v["times"]
            .as_array()
            .into_iter()
            .flatten()
            .zip(v["magnetic"].as_array().into_iter().flatten())
            .zip(v["free"].as_array().into_iter().flatten());
        for ((t, m), f) in pairs {
            println!(
                "t = {:>8.4}  magnetic {:>8.5}  free {:>8.5}",
                t.as_f64().unwrap_or(f64::NAN),
                m.as_f64().unwrap_or(f64::NAN),
                f.as_f64().unwrap_or(f64::NAN)
            );
        }
        let dominates = v["verdict"]["dominates"].as_bool() == Some(true);
        println!("{} magnetic fidelity dominates", if dominates { "PASS" } else { "FAIL" });
        if !dominates {
            code = code.max(EXIT_VERDICT);
        }
    }
    Ok(code)
}
